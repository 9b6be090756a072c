//! Model bundles: a directory holding `tree.txt` and `model.json`.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use lad_core::cascade::{import_decision_tree, ImportOptions, Provenance};
use lad_core::{export_decision_tree, CascadeModel, FallbackPolicy, RatingScale};
use serde::{Deserialize, Serialize};

pub const TREE_FILE: &str = "tree.txt";
pub const META_FILE: &str = "model.json";

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    year: i32,
    ratings: Vec<String>,
    fallback: FallbackPolicy,
    provenance: Provenance,
}

pub fn save(model: &CascadeModel, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let meta = Meta {
        year: model.year(),
        ratings: model.scale().labels().to_vec(),
        fallback: model.scale().fallback(),
        provenance: model.provenance().clone(),
    };
    write(&dir.join(TREE_FILE), &export_decision_tree(model))?;
    write(
        &dir.join(META_FILE),
        &(serde_json::to_string_pretty(&meta)? + "\n"),
    )
}

pub fn load(dir: &Path) -> Result<CascadeModel> {
    let meta_path = dir.join(META_FILE);
    let meta: Meta = serde_json::from_str(&read(&meta_path)?)
        .with_context(|| format!("{}: not a model description", meta_path.display()))?;
    let scale = RatingScale::new(meta.ratings, meta.fallback)?;
    let tree_path = dir.join(TREE_FILE);
    let tree = import_decision_tree(
        &read(&tree_path)?,
        &scale,
        meta.year,
        &ImportOptions::default(),
    )
    .with_context(|| tree_path.display().to_string())?;
    Ok(tree.model.with_provenance(meta.provenance))
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
