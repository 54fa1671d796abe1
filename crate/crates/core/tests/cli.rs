use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sciprod::config::AnalysisConfig;
use sciprod::synth::{generate, oracle_compute, SynthConfig};

fn sciprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sciprod"))
        .args(args)
        .env("SCIPROD_LOG", "error")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn dataset(dir: &Path, seed: u64) {
    generate(&SynthConfig::standard(seed)).unwrap().write_dir(dir).unwrap();
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).expect("JSON error line");
    serde_json::from_str(line).unwrap()
}

#[test]
fn validate_consistent_dataset_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    dataset(&dir.path().join("in"), 1);
    let out = sciprod(&["validate", "--input-dir", s(&dir.path().join("in")), "--out", s(&dir.path().join("out"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/validation_report.json")).unwrap()).unwrap();
    assert_eq!(report["valid"], true);
}

#[test]
fn missing_salary_fails_validation_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    dataset(&input, 2);
    let salaries = fs::read_to_string(input.join("salaries.csv")).unwrap();
    let kept: Vec<&str> = salaries.lines().filter(|l| !(l.starts_with("NO,") && l.contains("associate"))).collect();
    fs::write(input.join("salaries.csv"), kept.join("\n") + "\n").unwrap();
    let out = sciprod(&["validate", "--input-dir", s(&input), "--out", s(&dir.path().join("out"))]);
    assert_eq!(out.status.code(), Some(1));
    let report = fs::read_to_string(dir.path().join("out/validation_report.json")).unwrap();
    assert!(report.contains("salary for (NO, associate)"), "{report}");
}

#[test]
fn empty_publications_is_an_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    dataset(&input, 3);
    let header = |f: &str| fs::read_to_string(input.join(f)).unwrap().lines().next().unwrap().to_string() + "\n";
    let (p, a) = (header("publications.csv"), header("authorships.csv"));
    fs::write(input.join("publications.csv"), p).unwrap();
    fs::write(input.join("authorships.csv"), a).unwrap();
    let out = sciprod(&["validate", "--input-dir", s(&input), "--out", s(&dir.path().join("out"))]);
    assert_eq!(out.status.code(), Some(1));
    let report = fs::read_to_string(dir.path().join("out/validation_report.json")).unwrap();
    assert!(report.contains("empty corpus"));

    let out = sciprod(&["compute", "--input-dir", s(&input), "--out", s(&dir.path().join("out"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "invalid_dataset");
}

#[test]
fn missing_input_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = sciprod(&["compute", "--input-dir", s(&dir.path().join("nope")), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "io");
    assert_eq!(err["module"], "ingestion");
}

#[test]
fn compute_is_deterministic_and_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    let bundle = generate(&SynthConfig::small(8)).unwrap();
    bundle.write_dir(&input).unwrap();
    let run = |name: &str, threads: &str| {
        let out_dir = dir.path().join(name);
        let out = sciprod(&["compute", "--input-dir", s(&input), "--out", s(&out_dir), "--parallel", threads]);
        assert!(out.status.success());
        fs::read_to_string(out_dir.join("indicators.csv")).unwrap()
    };
    let first = run("a", "1");
    assert_eq!(first, run("b", "1"));
    assert_eq!(first, run("c", "8"));

    let mut analysis = AnalysisConfig::default();
    analysis.min_sc_professors = 10;
    let oracle = oracle_compute(&bundle, &analysis).unwrap();
    let mut rdr = csv::Reader::from_reader(first.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["professor_id", "country", "sc", "discipline", "t", "cost_eur", "N", "O_raw", "FO_raw", "AC_raw", "AIF_raw", "FSS_raw"]
    );
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let o = &oracle.rows[&rec[0]];
        let parse = |i: usize| rec[i].parse::<f64>().ok();
        for (i, want) in [(7, Some(o.o)), (8, Some(o.fo)), (9, o.ac), (10, o.aif), (11, Some(o.fss))] {
            match (parse(i), want) {
                (Some(g), Some(w)) => assert!((g - w).abs() <= 1e-9 * w.abs().max(1e-300), "{}: col {i}", &rec[0]),
                (None, None) => assert_eq!(&rec[i], ""),
                other => panic!("{}: col {i}: {other:?}", &rec[0]),
            }
        }
        rows += 1;
    }
    assert_eq!(rows, oracle.rows.len());
}

fn gap_rows(dir: &Path, extra: &[&str]) -> Vec<csv::StringRecord> {
    let input = dir.join("in");
    if !input.exists() {
        dataset(&input, 5);
    }
    let out_dir = dir.join(format!("out{}", extra.join("_").replace([',', '-'], "")));
    let mut args = vec!["report", "--input-dir", s(&input), "--out", s(&out_dir)];
    args.extend_from_slice(extra);
    let out = sciprod(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_dir.join("gap_O.csv")).unwrap();
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn countries_flag_flips_gap_signs() {
    let dir = tempfile::tempdir().unwrap();
    let fwd = gap_rows(dir.path(), &["--countries", "IT,NO"]);
    let rev = gap_rows(dir.path(), &["--countries", "NO,IT"]);
    assert_eq!(fwd.len(), rev.len());
    for r in &fwd {
        let twin = rev.iter().find(|x| x[2] == r[2]).expect("same SC in both");
        assert_eq!(&twin[0], &r[0], "favored country is the same");
        let (a, b): (f64, f64) = (r[10].parse().unwrap(), twin[10].parse().unwrap());
        assert_eq!(a, -b);
    }
}

#[test]
fn top_k_limits_gap_rows() {
    let dir = tempfile::tempdir().unwrap();
    let rows = gap_rows(dir.path(), &["--top-k", "3"]);
    let count = |c: &str| rows.iter().filter(|r| &r[0] == c).count();
    assert_eq!((count("IT"), count("NO")), (3, 3));
}

#[test]
fn json_and_text_formats() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    dataset(&input, 6);
    let out_dir = dir.path().join("out");
    let out = sciprod(&["report", "--input-dir", s(&input), "--out", s(&out_dir), "--format", "json", "--text"]);
    assert!(out.status.success());
    for stem in sciprod::analytics::REPORT_FILES {
        let text = fs::read_to_string(out_dir.join(format!("{stem}.json"))).unwrap();
        serde_json::from_str::<serde_json::Value>(&text).unwrap();
    }
    let text = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(text.contains("Normalized averages by discipline"));
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    dataset(&dir.path().join("data"), 7);
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "input_dir = \"data\"\nout_dir = \"results\"\ntop_k = 2\ncountries = [\"NO\", \"IT\"]\nemit_baselines = \"results/baselines.csv\"\n",
    )
    .unwrap();
    let out = sciprod(&["run", "--config", s(&config)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let results = dir.path().join("results");
    for f in ["indicators.csv", "cohort.csv", "baselines.csv", "validation_report.json", "summary_overall.csv"] {
        assert!(results.join(f).exists(), "{f}");
    }
    let gap = fs::read_to_string(results.join("gap_FO.csv")).unwrap();
    assert!(gap.lines().nth(1).unwrap().contains(",NO,"));
}

#[test]
fn bad_options_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = sciprod(&["report", "--input-dir", s(dir.path()), "--decile", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "config");
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("synth.toml");
    fs::write(&cfg_path, toml::to_string(&SynthConfig::small(0)).unwrap()).unwrap();
    let gen = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = sciprod(&["generate", "--seed", "42", "--config", s(&cfg_path), "--out", s(&out_dir)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let (a, b) = (gen("a"), gen("b"));
    for f in sciprod::ingest::DatasetPaths::in_dir(&a).all() {
        let name = f.file_name().unwrap();
        assert_eq!(fs::read(f).unwrap(), fs::read(b.join(name)).unwrap(), "{name:?}");
    }
}

#[test]
fn invalid_synth_config_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SynthConfig::small(0);
    cfg.journals_per_sc = 0;
    let path = dir.path().join("synth.toml");
    fs::write(&path, toml::to_string(&cfg).unwrap()).unwrap();
    let out = sciprod(&["generate", "--config", s(&path), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_json(&out)["message"].as_str().unwrap().contains("journals_per_sc"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let run = sciprod::config::RunConfig::from_file(&dir.join("run.toml")).unwrap();
    run.validate().unwrap();
    assert!(run.inputs.personnel.exists());
    let synth = SynthConfig::from_file(&dir.join("synth.toml")).unwrap();
    synth.validate().unwrap();
}
