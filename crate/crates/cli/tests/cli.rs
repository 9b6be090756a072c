use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lad_core::data::write_dataset;
use lad_core::synthetic::{generate, SyntheticConfig};
use lad_core::{CountryRecord, Dataset, RatingScale};

fn table3() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/table3_2012.txt")
}

fn lad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lad"))
        .args(args)
        .env_remove("LAD_CONFIG")
        .output()
        .expect("spawn lad")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_csv(dir: &Path, name: &str, data: &Dataset) -> PathBuf {
    let file = dir.join(name);
    let mut bytes = Vec::new();
    write_dataset(data, &mut bytes, b',').unwrap();
    fs::write(&file, bytes).unwrap();
    file
}

fn synthetic_csv(dir: &Path, spread: f64) -> PathBuf {
    let config = SyntheticConfig {
        records: 80,
        spread,
        ..SyntheticConfig::default()
    };
    write_csv(
        dir,
        "synthetic.csv",
        &generate(&config, &RatingScale::fitch(), 3),
    )
}

#[test]
fn imported_table_rates_strong_economy_aaa() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m");
    let out = lad(&[
        "import-tree",
        "--file",
        path(&table3()),
        "--year",
        "2012",
        "--lenient",
        "--out",
        path(&model),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("26.17.5"));

    let out = lad(&[
        "classify",
        "--model",
        path(&model),
        "--country-values",
        "U=80,G=60000",
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let rows = text(&out.stdout);
    let row = rows.lines().nth(1).unwrap();
    assert_eq!(row.split('\t').nth(2), Some("AAA"), "{rows}");
}

#[test]
fn strict_import_reports_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = lad(&[
        "import-tree",
        "--file",
        path(&table3()),
        "--year",
        "2012",
        "--out",
        path(&dir.path().join("m")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = text(&out.stderr);
    assert!(
        err.contains("table3_2012.txt") && err.contains("line 1"),
        "{err}"
    );
}

#[test]
fn evaluate_without_labels_fails() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m");
    assert!(lad(&[
        "import-tree",
        "--file",
        path(&table3()),
        "--year",
        "2012",
        "--lenient",
        "--out",
        path(&model)
    ])
    .status
    .success());
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "country,year,rating,G\n").unwrap();
    let out = lad(&["evaluate", "--model", path(&model), "--data", path(&empty)]);
    assert!(!out.status.success());
    assert!(
        text(&out.stderr).contains("no labeled records"),
        "{}",
        text(&out.stderr)
    );
}

#[test]
fn train_and_evaluate_are_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let data = synthetic_csv(dir.path(), 1.0);
    let run = |name: &str| {
        let model = dir.path().join(name);
        let out = lad(&[
            "train",
            "--data",
            path(&data),
            "--year",
            "2012",
            "--split",
            "0.6",
            "--seed",
            "9",
            "--degree",
            "3",
            "--prevalence",
            "0.70",
            "--homogeneity",
            "1.0",
            "--out",
            path(&model),
        ]);
        assert!(out.status.success(), "{}", text(&out.stderr));
        let report = model.join("eval");
        let out = lad(&[
            "evaluate",
            "--model",
            path(&model),
            "--data",
            path(&data),
            "--split",
            "0.6",
            "--seed",
            "9",
            "--out",
            path(&report),
        ]);
        assert!(out.status.success(), "{}", text(&out.stderr));
        model
    };
    let (a, b) = (run("a"), run("b"));
    for file in [
        "tree.txt",
        "model.json",
        "training-log.txt",
        "training-log.json",
        "eval/report.txt",
        "eval/report.json",
    ] {
        let (x, y) = (
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
        );
        assert!(!x.is_empty(), "{file} empty");
        assert_eq!(x, y, "{file} differs between runs");
    }
    let report = fs::read_to_string(a.join("eval/report.txt")).unwrap();
    assert!(report.contains("matched, training set: 4"), "{report}");

    let exported = lad(&["export-tree", "--model", path(&a)]);
    assert_eq!(exported.stdout, fs::read(a.join("tree.txt")).unwrap());
    let keyvars = lad(&["report-keyvars", "--model", path(&a)]);
    assert!(
        text(&keyvars.stdout).contains("AAA ("),
        "{}",
        text(&keyvars.stdout)
    );
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let data = synthetic_csv(dir.path(), 1.0);
    let config = dir.path().join("mining.toml");
    fs::write(&config, "max_degree = 2\nmin_prevalence = 0.5\n").unwrap();
    let model = dir.path().join("m");
    let out = Command::new(env!("CARGO_BIN_EXE_lad"))
        .args([
            "train",
            "--data",
            path(&data),
            "--homogeneity",
            "1.0",
            "--out",
            path(&model),
        ])
        .env("LAD_CONFIG", &config)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", text(&out.stderr));
    let meta = fs::read_to_string(model.join("model.json")).unwrap();
    assert!(
        meta.contains("\"max_degree\": 2") && meta.contains("\"min_prevalence\": 0.5"),
        "{meta}"
    );

    fs::write(&config, "max_degree = 2\nbogus = 1\n").unwrap();
    let out = lad(&[
        "train",
        "--data",
        path(&data),
        "--config",
        path(&config),
        "--out",
        path(&model),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", text(&out.stderr));
}

#[test]
fn help_lists_defaults() {
    let help = text(&lad(&["train", "--help"]).stdout);
    for flag in [
        "--degree",
        "--prevalence",
        "--homogeneity",
        "--relaxation",
        "--seed",
        "--fallback",
    ] {
        assert!(help.contains(flag), "{flag} missing");
    }
    for default in [
        "[default: 3]",
        "[default: 0.7]",
        "[default: 1.0]",
        "[default: 0.4,0.2,0]",
    ] {
        assert!(help.contains(default), "{default} missing");
    }
}

#[test]
fn contradiction_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let records = vec![
        CountryRecord::new("Twin A", 2012)
            .with_value("G", 1.0)
            .with_rating("AA"),
        CountryRecord::new("Twin B", 2012)
            .with_value("G", 1.0)
            .with_rating("B"),
        CountryRecord::new("Other", 2012)
            .with_value("G", 0.0)
            .with_rating("BM"),
    ];
    let data = write_csv(
        dir.path(),
        "twins.csv",
        &Dataset::new(records, RatingScale::fitch()),
    );
    let out = lad(&[
        "train",
        "--data",
        path(&data),
        "--out",
        path(&dir.path().join("m")),
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("Twin A"));
}

#[test]
fn coverage_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let data = synthetic_csv(dir.path(), 3.0);
    let model = dir.path().join("m");
    let args = [
        "train",
        "--data",
        path(&data),
        "--degree",
        "1",
        "--out",
        path(&model),
    ];
    assert!(lad(&args).status.success());
    let mut strict = args.to_vec();
    strict.push("--require-full-coverage");
    let out = lad(&strict);
    assert_eq!(out.status.code(), Some(5), "{}", text(&out.stderr));
}

#[test]
fn missing_file_exit_code() {
    let out = lad(&["export-tree", "--model", "/nonexistent/model"]);
    assert_eq!(out.status.code(), Some(6));
    assert!(text(&out.stderr).contains("/nonexistent/model"));
}

#[test]
fn suggest_skips_rated_records() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m");
    assert!(lad(&[
        "import-tree",
        "--file",
        path(&table3()),
        "--year",
        "2012",
        "--lenient",
        "--out",
        path(&model)
    ])
    .status
    .success());
    let records = vec![
        CountryRecord::new("Rated", 2012)
            .with_value("G", 60000.0)
            .with_value("U", 80.0)
            .with_rating("AA"),
        CountryRecord::new("Unrated", 2012)
            .with_value("G", 60000.0)
            .with_value("U", 80.0),
    ];
    let data = write_csv(
        dir.path(),
        "mixed.csv",
        &Dataset::new(records, RatingScale::fitch()),
    );
    let out = lad(&["suggest", "--model", path(&model), "--data", path(&data)]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert!(
        stdout.contains("Unrated\t2012\tAAA") && !stdout.contains("Rated\t"),
        "{stdout}"
    );
}
