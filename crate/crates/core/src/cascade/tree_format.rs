//! Text format for decision trees, one stage per line:
//!
//! ```text
//! # comment
//! AAA  (U>=73.715, G>=52456.1), OR (U<=90.02, C>=-9.54, G>=40460.8)
//! BB   No case
//! ```
//!
//! A line starts with a rating label followed by either `No case` or
//! parenthesised patterns of comma-separated `CODE op VALUE` literals joined
//! by `OR` (a comma before `OR` is optional). Whitespace is insignificant.
//! Labels absent from the file get empty stages; the last label's row is kept
//! but does not take part in classification.
//!
//! Lenient mode repairs the defects found in typeset tables and records a
//! note for each: extra dots or a slash in numbers (`26.17.5` reads as
//! `26.175`, `0/685` as `0.685`), digit-suffixed codes (`PPP6` reads as
//! `PPP`), a missing `(` or `OR`, stray `)`, non-tree lines before the first
//! stage, and duplicate same-direction literals (the tighter one is kept).

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{CascadeModel, ModelSource, Provenance};
use crate::binarize::{Direction, Literal};
use crate::data::{IndicatorRegistry, Rank, RatingScale};
use crate::error::{Error, Result};
use crate::pattern::{ClassDnf, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImportMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Default)]
pub struct ImportOptions {
    pub mode: ImportMode,
    pub registry: IndicatorRegistry,
}

impl ImportOptions {
    pub fn lenient() -> Self {
        ImportOptions {
            mode: ImportMode::Lenient,
            ..ImportOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoteKind {
    /// Input was altered to make it parse.
    Repair,
    /// Input parsed as written but looks doubtful.
    Flag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImportNote {
    pub line: usize,
    pub column: usize,
    pub kind: NoteKind,
    pub message: String,
}

impl std::fmt::Display for ImportNote {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.kind {
            NoteKind::Repair => "repaired",
            NoteKind::Flag => "flagged",
        };
        write!(
            f,
            "line {}, column {}: {kind}: {}",
            self.line, self.column, self.message
        )
    }
}

#[derive(Debug, Clone)]
pub struct ImportedTree {
    pub model: CascadeModel,
    pub notes: Vec<ImportNote>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Comma,
    Or,
    NoCase,
    Lit {
        code: String,
        direction: Direction,
        value: String,
        value_col: usize,
    },
}

struct Parser<'a> {
    line: usize,
    mode: ImportMode,
    registry: &'a IndicatorRegistry,
    notes: &'a mut Vec<ImportNote>,
}

impl Parser<'_> {
    fn error(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn note(&mut self, column: usize, kind: NoteKind, message: impl Into<String>) {
        self.notes.push(ImportNote {
            line: self.line,
            column,
            kind,
            message: message.into(),
        });
    }

    fn lenient(&self) -> bool {
        self.mode == ImportMode::Lenient
    }

    fn lex(&self, chars: &[(usize, char)]) -> Result<Vec<(usize, Tok)>> {
        let mut toks = Vec::new();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < chars.len() && chars[*i].1.is_whitespace() {
                *i += 1;
            }
        };
        loop {
            skip_ws(&mut i);
            let Some(&(col, c)) = chars.get(i) else { break };
            match c {
                '(' => {
                    toks.push((col, Tok::Open));
                    i += 1;
                }
                ')' => {
                    toks.push((col, Tok::Close));
                    i += 1;
                }
                ',' => {
                    toks.push((col, Tok::Comma));
                    i += 1;
                }
                c if c.is_ascii_alphabetic() => {
                    let start = i;
                    while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                    if word.eq_ignore_ascii_case("or") {
                        toks.push((col, Tok::Or));
                        continue;
                    }
                    if word.eq_ignore_ascii_case("no") {
                        let mut j = i;
                        skip_ws(&mut j);
                        let rest: String = chars[j..].iter().take(4).map(|&(_, c)| c).collect();
                        if rest.eq_ignore_ascii_case("case") {
                            toks.push((col, Tok::NoCase));
                            i = j + 4;
                            continue;
                        }
                    }
                    skip_ws(&mut i);
                    let direction = match chars.get(i..i + 2).map(|s| (s[0].1, s[1].1)) {
                        Some(('>', '=')) => {
                            i += 2;
                            Direction::AtLeast
                        }
                        Some(('<', '=')) => {
                            i += 2;
                            Direction::AtMost
                        }
                        _ => match chars.get(i).map(|&(_, c)| c) {
                            Some('≥') => {
                                i += 1;
                                Direction::AtLeast
                            }
                            Some('≤') => {
                                i += 1;
                                Direction::AtMost
                            }
                            _ => {
                                let at = chars.get(i).map_or(col + word.len(), |&(c, _)| c);
                                return Err(
                                    self.error(at, format!("expected >= or <= after {word:?}"))
                                );
                            }
                        },
                    };
                    skip_ws(&mut i);
                    let start = i;
                    while i < chars.len()
                        && matches!(chars[i].1, '0'..='9' | '.' | '-' | '+' | '/' | 'e' | 'E')
                    {
                        i += 1;
                    }
                    let value_col = chars.get(start).map_or(col, |&(c, _)| c);
                    if start == i {
                        return Err(self.error(value_col, format!("missing value after {word:?}")));
                    }
                    toks.push((
                        col,
                        Tok::Lit {
                            code: word,
                            direction,
                            value: chars[start..i].iter().map(|&(_, c)| c).collect(),
                            value_col,
                        },
                    ));
                }
                other => return Err(self.error(col, format!("unexpected character {other:?}"))),
            }
        }
        Ok(toks)
    }

    fn literal(&mut self, col: usize, tok: &Tok) -> Result<Literal> {
        let Tok::Lit {
            code,
            direction,
            value,
            value_col,
        } = tok
        else {
            return Err(self.error(col, "expected a literal"));
        };
        let indicator = match self.registry.get(code) {
            Some(ind) => ind,
            None => {
                let stem = code.trim_end_matches(|c: char| c.is_ascii_digit());
                match self.registry.get(stem) {
                    Some(ind) if self.lenient() && stem.len() < code.len() => {
                        self.note(col, NoteKind::Repair, format!("read code {code} as {stem}"));
                        ind
                    }
                    _ => return Err(self.error(col, format!("unknown indicator code {code:?}"))),
                }
            }
        };
        let threshold = self.number(*value_col, value)?;
        if let Some(range) = &indicator.plausible {
            if !range.contains(&threshold.abs()) && !range.contains(&threshold) {
                self.note(
                    col,
                    NoteKind::Flag,
                    format!(
                        "{}{}{} is implausible for {} ({})",
                        indicator.code,
                        direction.symbol(),
                        threshold,
                        indicator.description,
                        indicator.unit
                    ),
                );
            }
        }
        Ok(Literal {
            indicator: indicator.code.clone(),
            direction: *direction,
            threshold,
        })
    }

    fn number(&mut self, col: usize, text: &str) -> Result<f64> {
        if let Some(v) = text.parse::<f64>().ok().filter(|v| v.is_finite()) {
            return Ok(v);
        }
        if self.lenient() {
            let mut repaired = text.replace('/', ".");
            if let Some(first) = repaired.find('.') {
                let (head, tail) = repaired.split_at(first + 1);
                repaired = format!("{head}{}", tail.replace('.', ""));
            }
            if let Some(v) = repaired.parse::<f64>().ok().filter(|v| v.is_finite()) {
                self.note(
                    col,
                    NoteKind::Repair,
                    format!("read number {text} as {repaired}"),
                );
                return Ok(v);
            }
        }
        Err(self.error(col, format!("malformed number {text:?}")))
    }

    fn body(&mut self, toks: &[(usize, Tok)], end_col: usize) -> Result<Vec<Pattern>> {
        if let [(_, Tok::NoCase)] = toks {
            return Ok(Vec::new());
        }
        if toks.is_empty() {
            if self.lenient() {
                self.note(end_col, NoteKind::Repair, "empty stage read as No case");
                return Ok(Vec::new());
            }
            return Err(self.error(end_col, "empty stage body"));
        }
        let col_at = |i: usize| toks.get(i).map_or(end_col, |t| t.0);
        let mut patterns = Vec::new();
        let mut i = 0;
        loop {
            match toks.get(i).map(|t| &t.1) {
                Some(Tok::Open) => i += 1,
                Some(Tok::Lit { .. }) if self.lenient() => {
                    self.note(col_at(i), NoteKind::Repair, "inserted missing '('");
                }
                _ => return Err(self.error(col_at(i), "expected '('")),
            }
            let mut literals = Vec::new();
            loop {
                let Some((col, tok)) = toks.get(i) else {
                    return Err(self.error(end_col, "expected a literal"));
                };
                literals.push(self.literal(*col, tok)?);
                i += 1;
                if matches!(toks.get(i).map(|t| &t.1), Some(Tok::Comma))
                    && matches!(toks.get(i + 1).map(|t| &t.1), Some(Tok::Lit { .. }))
                {
                    i += 1;
                    continue;
                }
                break;
            }
            match toks.get(i).map(|t| &t.1) {
                Some(Tok::Close) => i += 1,
                None | Some(Tok::Comma) | Some(Tok::Or) if self.lenient() => {
                    self.note(col_at(i), NoteKind::Repair, "inserted missing ')'");
                }
                _ => return Err(self.error(col_at(i), "expected ')'")),
            }
            while self.lenient() && matches!(toks.get(i).map(|t| &t.1), Some(Tok::Close)) {
                self.note(col_at(i), NoteKind::Repair, "dropped extra ')'");
                i += 1;
            }
            patterns.push(self.pattern(literals, col_at(i))?);
            if i >= toks.len() {
                break;
            }
            if matches!(toks[i].1, Tok::Comma) {
                i += 1;
            }
            match toks.get(i).map(|t| &t.1) {
                Some(Tok::Or) => i += 1,
                Some(Tok::Open) | Some(Tok::Lit { .. }) if self.lenient() => {
                    self.note(col_at(i), NoteKind::Repair, "inserted missing OR");
                }
                _ => return Err(self.error(col_at(i), "expected OR")),
            }
        }
        Ok(patterns)
    }

    fn pattern(&mut self, literals: Vec<Literal>, col: usize) -> Result<Pattern> {
        let mut kept: Vec<Literal> = Vec::with_capacity(literals.len());
        for lit in literals {
            let twin = kept
                .iter_mut()
                .find(|k| k.indicator == lit.indicator && k.direction == lit.direction);
            match twin {
                None => kept.push(lit),
                Some(existing) if self.lenient() => {
                    let tighter = match lit.direction {
                        Direction::AtLeast => existing.threshold.max(lit.threshold),
                        Direction::AtMost => existing.threshold.min(lit.threshold),
                    };
                    let message = format!("merged {existing} and {lit} into one literal");
                    existing.threshold = tighter;
                    self.note(col, NoteKind::Repair, message);
                }
                Some(existing) => {
                    return Err(self.error(
                        col,
                        format!("redundant literals {existing} and {lit} in one pattern"),
                    ))
                }
            }
        }
        Ok(Pattern::new(kept))
    }
}

/// Parses a decision tree into a cascade model for `scale`.
pub fn import_decision_tree(
    source: &str,
    scale: &RatingScale,
    year: i32,
    options: &ImportOptions,
) -> Result<ImportedTree> {
    let mut notes = Vec::new();
    let mut rows: HashMap<Rank, Vec<Pattern>> = HashMap::new();
    for (index, raw) in source.lines().enumerate() {
        let line = index + 1;
        let chars: Vec<(usize, char)> = raw.chars().enumerate().map(|(i, c)| (i + 1, c)).collect();
        let Some(start) = chars.iter().position(|(_, c)| !c.is_whitespace()) else {
            continue;
        };
        if chars[start].1 == '#' {
            continue;
        }
        let end = chars[start..]
            .iter()
            .position(|(_, c)| c.is_whitespace())
            .map_or(chars.len(), |p| start + p);
        let label: String = chars[start..end].iter().map(|&(_, c)| c).collect();
        let mut parser = Parser {
            line,
            mode: options.mode,
            registry: &options.registry,
            notes: &mut notes,
        };
        let Some(rank) = scale.rank(&label) else {
            let looks_like_tree = raw.contains(">=") || raw.contains("<=");
            if parser.lenient() && rows.is_empty() && !looks_like_tree {
                parser.note(
                    chars[start].0,
                    NoteKind::Repair,
                    format!("skipped line {raw:?}"),
                );
                continue;
            }
            return Err(parser.error(chars[start].0, format!("unknown rating label {label:?}")));
        };
        if rows.contains_key(&rank) {
            return Err(parser.error(chars[start].0, format!("duplicate stage {label}")));
        }
        let toks = parser.lex(&chars[end..])?;
        let patterns = parser.body(&toks, chars.len() + 1)?;
        rows.insert(rank, patterns);
    }

    let residual = rows.remove(&scale.last()).map(|patterns| ClassDnf {
        rank: scale.last(),
        patterns,
    });
    let mut stages: Vec<ClassDnf> = rows
        .into_iter()
        .map(|(rank, patterns)| ClassDnf { rank, patterns })
        .collect();
    stages.sort_by_key(|s| s.rank);
    let provenance = Provenance::new(ModelSource::Imported {
        strict: options.mode == ImportMode::Strict,
        notes: notes.iter().map(|n| n.to_string()).collect(),
    });
    let model = CascadeModel::new(scale.clone(), year, stages, provenance)?.with_residual(residual);
    Ok(ImportedTree { model, notes })
}

fn write_stage(out: &mut String, label: &str, dnf: Option<&ClassDnf>) {
    out.push_str(label);
    out.push('\t');
    match dnf {
        Some(d) if !d.is_empty() => {
            let body: Vec<String> = d.patterns.iter().map(|p| p.to_string()).collect();
            out.push_str(&body.join(", OR "));
        }
        _ => out.push_str("No case"),
    }
    out.push('\n');
}

/// Canonical text of `model`; importing it strictly yields an equivalent model.
pub fn export_decision_tree(model: &CascadeModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# decision tree, year {}", model.year());
    for stage in model.stages() {
        write_stage(&mut out, model.scale().label(stage.rank), Some(stage));
    }
    write_stage(
        &mut out,
        model.scale().label(model.scale().last()),
        model.residual(),
    );
    out
}
