mod bundle;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lad_core::binarize::{parse_cutpoints, MinimizeOptions, MinimizeStrategy};
use lad_core::cascade::{
    import_decision_tree, suggest_rating, ImportMode, ImportOptions, TrainingLog,
};
use lad_core::data::{load_dataset, split_dataset, IndicatorRegistry, LoadOptions};
use lad_core::pattern::PrevalenceMode;
use lad_core::{
    classify, evaluate, export_decision_tree, key_variables, train_cascade, CascadeModel,
    CountryRecord, Dataset, Error, FallbackPolicy, MiningConfig, RatingScale, TrainConfig,
};

/// Rule-based sovereign rating models built with Logical Analysis of Data.
#[derive(Debug, Parser)]
#[command(name = "lad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learn a decision tree from rated records and write a model bundle.
    Train(TrainArgs),
    /// Rate records with a model.
    Classify(ClassifyArgs),
    /// Propose ratings for records that have none.
    Suggest(ClassifyArgs),
    /// Compare a model's ratings with observed ones.
    Evaluate(EvaluateArgs),
    /// Turn a decision-tree text file into a model bundle.
    ImportTree(ImportArgs),
    /// Print a model's decision tree.
    ExportTree(ExportArgs),
    /// Summarize which indicators the model's patterns use.
    ReportKeyvars(KeyvarArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Fallback {
    /// Records no stage accepts get the last rating.
    Last,
    /// Records no stage accepts stay unrated.
    Unclassified,
}

impl From<Fallback> for FallbackPolicy {
    fn from(f: Fallback) -> Self {
        match f {
            Fallback::Last => FallbackPolicy::FallbackToLast,
            Fallback::Unclassified => FallbackPolicy::Unclassified,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Minimize {
    Auto,
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrevalenceScope {
    PerPattern,
    PerDnf,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Comma-separated records: country, year, rating, indicator columns.
    #[arg(long)]
    data: PathBuf,
    /// Use only records of this year.
    #[arg(long)]
    year: Option<i32>,
    /// Share of each rating class used for training; enables a seeded split.
    #[arg(long, value_name = "FRACTION")]
    split: Option<f64>,
    /// Seed of the train/test split.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// TOML file of mining parameters; flags override its values.
    #[arg(long, env = "LAD_CONFIG")]
    config: Option<PathBuf>,
    /// Maximum literals per pattern [default: 3].
    #[arg(long)]
    degree: Option<usize>,
    /// Minimum share of positives a pattern must cover [default: 0.7].
    #[arg(long)]
    prevalence: Option<f64>,
    /// Minimum share of positives among covered records [default: 1.0].
    #[arg(long)]
    homogeneity: Option<f64>,
    /// Share of positives the stage DNF must cover [default: 1.0].
    #[arg(long)]
    coverage: Option<f64>,
    /// Comma-separated prevalence floors tried when coverage falls short
    /// [default: 0.4,0.2,0].
    #[arg(long, value_delimiter = ',')]
    relaxation: Option<Vec<f64>>,
    /// Apply the prevalence floor per pattern or to the whole DNF
    /// [default: per-pattern].
    #[arg(long, value_enum)]
    prevalence_scope: Option<PrevalenceScope>,
    /// Keep patterns that extend other accepted patterns.
    #[arg(long)]
    no_prune: bool,
    /// Cut-point minimization method.
    #[arg(long, value_enum, default_value = "auto")]
    minimize: Minimize,
    /// Use the `indicator,threshold` lines of this file as cut-points.
    #[arg(long)]
    cutpoints: Option<PathBuf>,
    /// Policy for records no stage accepts.
    #[arg(long, value_enum, default_value = "last")]
    fallback: Fallback,
    /// Fail with exit code 5 if any stage leaves positives uncovered.
    #[arg(long)]
    require_full_coverage: bool,
    /// Directory for the model bundle and training log.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Model bundle directory.
    #[arg(long)]
    model: PathBuf,
    /// Records to rate.
    #[arg(
        long,
        conflicts_with = "country_values",
        required_unless_present = "country_values"
    )]
    data: Option<PathBuf>,
    /// One record given inline, e.g. "U=80,G=60000".
    #[arg(long)]
    country_values: Option<String>,
    /// Override the model's policy for records no stage accepts.
    #[arg(long, value_enum)]
    fallback: Option<Fallback>,
    /// Write the ratings here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Model bundle directory.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    /// Override the model's policy for records no stage accepts.
    #[arg(long, value_enum)]
    fallback: Option<Fallback>,
    /// Directory for report.txt and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ImportArgs {
    /// Decision-tree text file.
    #[arg(long)]
    file: PathBuf,
    /// Year the tree describes.
    #[arg(long)]
    year: i32,
    /// Repair typesetting defects instead of rejecting them.
    #[arg(long)]
    lenient: bool,
    /// Policy for records no stage accepts.
    #[arg(long, value_enum, default_value = "last")]
    fallback: Fallback,
    /// Directory for the model bundle.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Model bundle directory.
    #[arg(long)]
    model: PathBuf,
    /// Write the tree here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KeyvarArgs {
    /// Model bundle directory.
    #[arg(long)]
    model: PathBuf,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

/// A run that completed but did not meet `--require-full-coverage`.
#[derive(Debug)]
struct CoverageShortfall(usize);

impl std::fmt::Display for CoverageShortfall {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} stage(s) left positives uncovered", self.0)
    }
}

impl std::error::Error for CoverageShortfall {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<CoverageShortfall>() {
            return 5;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Parse { .. }
                | Error::DuplicateRecord { .. }
                | Error::UnknownRating { .. }
                | Error::Csv(_) => 3,
                Error::Contradiction { .. } => 4,
                Error::Io(_) => 6,
                _ => 1,
            };
        }
        if cause.is::<std::io::Error>() {
            return 6;
        }
        if cause.is::<serde_json::Error>() || cause.is::<toml::de::Error>() {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Train(args) => train(args),
        Command::Classify(args) => rate(args, false),
        Command::Suggest(args) => rate(args, true),
        Command::Evaluate(args) => evaluate_cmd(args),
        Command::ImportTree(args) => import(args),
        Command::ExportTree(args) => {
            let model = bundle::load(&args.model)?;
            emit(args.out.as_deref(), &export_decision_tree(&model))
        }
        Command::ReportKeyvars(args) => {
            let report = key_variables(&bundle::load(&args.model)?);
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.to_text());
            }
            Ok(())
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => bundle::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_data(args: &DataArgs, scale: &RatingScale) -> Result<Dataset> {
    let mut options = LoadOptions::default();
    if let Some(year) = args.year {
        options.years = year..=year;
    }
    let file = std::fs::File::open(&args.data)
        .with_context(|| format!("reading {}", args.data.display()))?;
    let loaded =
        load_dataset(file, scale, &options).with_context(|| args.data.display().to_string())?;
    for warning in &loaded.warnings {
        eprintln!("warning: {}: {warning}", args.data.display());
    }
    let dataset = loaded.dataset;
    match args.split {
        Some(fraction) if dataset.labeled_indices().len() >= 2 => {
            Ok(split_dataset(&dataset, fraction, args.seed)?)
        }
        _ => Ok(dataset),
    }
}

fn mining_config(args: &TrainArgs) -> Result<MiningConfig> {
    let mut config = match &args.config {
        Some(path) => toml::from_str(&bundle::read(path)?)
            .with_context(|| format!("{}: invalid mining configuration", path.display()))?,
        None => MiningConfig::default(),
    };
    if let Some(d) = args.degree {
        config.max_degree = d;
    }
    if let Some(p) = args.prevalence {
        config.min_prevalence = p;
    }
    if let Some(h) = args.homogeneity {
        config.min_homogeneity = h;
    }
    if let Some(c) = args.coverage {
        config.dnf_coverage_target = c;
    }
    if let Some(r) = &args.relaxation {
        config.relaxation_schedule = r.clone();
    }
    if let Some(scope) = args.prevalence_scope {
        config.prevalence_mode = match scope {
            PrevalenceScope::PerPattern => PrevalenceMode::PerPattern,
            PrevalenceScope::PerDnf => PrevalenceMode::PerDnf,
        };
    }
    if args.no_prune {
        config.prune = false;
    }
    config.validate()?;
    Ok(config)
}

fn log_text(log: &TrainingLog) -> String {
    let mut out = String::from(
        "stage\tpositives\tnegatives\tcandidates\tcut-points\tminimization\tpatterns\trelaxations\tuncovered\tundistinguished\n",
    );
    for s in &log.stages {
        let relax: Vec<String> = s.relaxations.iter().map(f64::to_string).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}{}\n",
            s.label,
            s.positives,
            s.negatives,
            s.candidate_cutpoints,
            s.cutpoints,
            if s.exact_minimization {
                "exact"
            } else {
                "greedy"
            },
            s.patterns,
            if relax.is_empty() {
                "-".to_owned()
            } else {
                relax.join(",")
            },
            if s.uncovered.is_empty() {
                "-".to_owned()
            } else {
                s.uncovered.join(",")
            },
            s.undistinguished_pairs,
            s.note
                .as_deref()
                .map(|n| format!("\t# {n}"))
                .unwrap_or_default(),
        ));
    }
    out
}

fn train(args: TrainArgs) -> Result<()> {
    let scale = RatingScale::fitch().with_fallback(args.fallback.into());
    let mining = mining_config(&args)?;
    let dataset = load_data(&args.data, &scale)?;
    let fixed_cutpoints = match &args.cutpoints {
        Some(path) => Some(
            parse_cutpoints(&bundle::read(path)?, &IndicatorRegistry::world_bank())
                .with_context(|| path.display().to_string())?,
        ),
        None => None,
    };
    let strategy = match args.minimize {
        Minimize::Auto => MinimizeStrategy::Auto,
        Minimize::Exact => MinimizeStrategy::Exact,
        Minimize::Greedy => MinimizeStrategy::Greedy,
    };
    let config = TrainConfig {
        mining,
        minimize: MinimizeOptions {
            strategy,
            ..MinimizeOptions::default()
        },
        fixed_cutpoints,
    };
    let trained = train_cascade(&dataset, &config)?;
    bundle::save(&trained.model, &args.out)?;
    bundle::write(&args.out.join("training-log.txt"), &log_text(&trained.log))?;
    bundle::write(
        &args.out.join("training-log.json"),
        &(serde_json::to_string_pretty(&trained.log)? + "\n"),
    )?;
    let partial = trained.log.stages.iter().filter(|s| s.is_partial()).count();
    println!(
        "trained {} patterns over {} stages; model written to {}",
        trained.model.pattern_count(),
        trained
            .model
            .stages()
            .iter()
            .filter(|s| !s.is_empty())
            .count(),
        args.out.display()
    );
    if partial > 0 {
        eprintln!("warning: {partial} stage(s) left positives uncovered; see training-log.txt");
        if args.require_full_coverage {
            return Err(CoverageShortfall(partial).into());
        }
    }
    Ok(())
}

fn with_fallback(model: CascadeModel, fallback: Option<Fallback>) -> CascadeModel {
    match fallback {
        Some(f) => model.with_fallback(f.into()),
        None => model,
    }
}

fn parse_country_values(text: &str, year: i32) -> Result<CountryRecord> {
    let registry = IndicatorRegistry::world_bank();
    let mut record = CountryRecord::new("input", year);
    for (i, pair) in text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .enumerate()
    {
        let (code, value) = pair.split_once('=').ok_or_else(|| {
            anyhow!(
                "--country-values item {}: expected CODE=value, got {pair:?}",
                i + 1
            )
        })?;
        let code = registry
            .resolve(code.trim())
            .ok_or_else(|| anyhow!("--country-values: unknown indicator {:?}", code.trim()))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| anyhow!("--country-values: {code} has non-numeric value {value:?}"))?;
        record = record.with_value(code.as_str(), value);
    }
    if record.values.is_empty() {
        bail!("--country-values: no values given");
    }
    Ok(record)
}

fn rate(args: ClassifyArgs, suggest: bool) -> Result<()> {
    let model = with_fallback(bundle::load(&args.model)?, args.fallback);
    let records = match (&args.data, &args.country_values) {
        (_, Some(values)) => vec![parse_country_values(values, model.year())?],
        (Some(path), None) => {
            let file =
                std::fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
            load_dataset(file, model.scale(), &LoadOptions::default())
                .with_context(|| path.display().to_string())?
                .dataset
                .records()
                .to_vec()
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let mut out = String::from("country\tyear\trating\tmatched\n");
    let mut skipped = 0;
    for record in &records {
        if suggest {
            match suggest_rating(&model, record) {
                Ok(_) => {}
                Err(Error::AlreadyRated(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e.into()),
            }
        }
        let explained = model.explain(record);
        debug_assert_eq!(explained.outcome, classify(&model, record));
        let matched = match explained.matched {
            Some((rank, p)) => format!("{} pattern {}", model.scale().label(rank), p + 1),
            None => "fallback".to_owned(),
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{matched}\n",
            record.country,
            record.year,
            model.label(explained.outcome)
        ));
    }
    if skipped > 0 {
        eprintln!("note: skipped {skipped} record(s) that already carry a rating");
    }
    emit(args.out.as_deref(), &out)
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<()> {
    let model = with_fallback(bundle::load(&args.model)?, args.fallback);
    let dataset = load_data(&args.data, model.scale())?;
    let report =
        evaluate(&model, &dataset).with_context(|| args.data.data.display().to_string())?;
    let text = report.to_text();
    if let Some(dir) = &args.out {
        bundle::write(&dir.join("report.txt"), &text)?;
        bundle::write(
            &dir.join("report.json"),
            &(serde_json::to_string_pretty(&report)? + "\n"),
        )?;
    }
    print!("{text}");
    Ok(())
}

fn import(args: ImportArgs) -> Result<()> {
    let scale = RatingScale::fitch().with_fallback(args.fallback.into());
    let options = ImportOptions {
        mode: if args.lenient {
            ImportMode::Lenient
        } else {
            ImportMode::Strict
        },
        ..ImportOptions::default()
    };
    let text = bundle::read(&args.file)?;
    let tree = import_decision_tree(&text, &scale, args.year, &options)
        .with_context(|| args.file.display().to_string())?;
    for note in &tree.notes {
        eprintln!("{}: {note}", args.file.display());
    }
    bundle::save(&tree.model, &args.out)?;
    println!(
        "imported {} patterns; model written to {}",
        tree.model.pattern_count(),
        args.out.display()
    );
    Ok(())
}
