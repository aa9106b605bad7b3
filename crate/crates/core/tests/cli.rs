//! Drives the `clex` binary through the whole pipeline on a small generated
//! corpus.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use clex::context::{write_records, WordSpan};
use clex::synthetic::{planted_corpus, PlantedConfig, PlantedCorpus};
use clex::ContextualSentenceRecord;

fn clex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clex")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn error_of(o: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&o.stderr);
    let last = stderr.lines().last().unwrap_or_default();
    serde_json::from_str(last).unwrap_or_else(|_| panic!("not a JSON error line: {stderr}"))
}

fn write_charters(corpus: &PlantedCorpus, path: &Path) {
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(["id", "year", "text"]).unwrap();
    for c in corpus.charters(4) {
        w.write_record([c.id, c.year.to_string(), c.text]).unwrap();
    }
    w.flush().unwrap();
}

/// Random 2-layer, 4-dim records with one piece per word.
fn write_contextual(corpus: &PlantedCorpus, dir: &Path) -> Vec<PathBuf> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    corpus
        .slices
        .iter()
        .map(|slice| {
            let records: Vec<ContextualSentenceRecord> = slice
                .sentences
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let (k, l, d) = (2, s.len(), 4);
                    let tensor = (0..k * l * d).map(|_| rng.random_range(-1.0f32..1.0)).collect();
                    let words = s.iter().enumerate().map(|(j, w)| WordSpan::new(w.clone(), j, j + 1)).collect();
                    ContextualSentenceRecord::new(format!("{}-{i}", slice.name()), slice.name(), k, l, d, tensor, words)
                        .unwrap()
                })
                .collect();
            let path = dir.join(format!("{}.ndjson", slice.name()));
            write_records(&records, &path).unwrap();
            path
        })
        .collect()
}

struct Workspace {
    _dir: tempfile::TempDir,
    root: PathBuf,
    config: PathBuf,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let corpus = planted_corpus(&PlantedConfig {
            sentences_per_period: 240,
            ..PlantedConfig::default()
        });
        write_charters(&corpus, &root.join("charters.csv"));
        fs::write(root.join("labels.csv"), corpus.labels_csv()).unwrap();
        fs::write(root.join("periods.json"), serde_json::to_string(&corpus.specs).unwrap()).unwrap();
        let records = write_contextual(&corpus, &root);
        let config = serde_json::json!({
            "charters": root.join("charters.csv"),
            "periods": root.join("periods.json"),
            "labels": root.join("labels.csv"),
            "out": root.join("out"),
            "strategies": ["incremental"],
            "train": { "dim": 16, "epochs": 3, "bucket_count": 5000, "min_count": 1 },
            "records": { "ctx": { "EARLY": records[0], "LATE": records[1] } },
            "sweep": { "dims": [8, 16], "epochs": [1, 2] }
        });
        let config_path = root.join("run.json");
        fs::write(&config_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
        Workspace {
            _dir: dir,
            root,
            config: config_path,
        }
    }

    fn run(&self, args: &[&str]) -> Output {
        let mut all = vec!["--config", self.config.to_str().unwrap()];
        all.extend_from_slice(args);
        clex(&all)
    }

    fn ok(&self, args: &[&str]) -> String {
        let o = self.run(args);
        assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    }

    fn out(&self, rel: &str) -> PathBuf {
        self.root.join("out").join(rel)
    }

    fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.out(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }
}

fn manifest_hashes(ws: &Workspace) -> Vec<String> {
    let m: serde_json::Value = serde_json::from_str(&ws.read("static/incremental/manifest.json")).unwrap();
    m["spaces"].as_array().unwrap().iter().map(|s| s["fnv1a_64"].as_str().unwrap().to_string()).collect()
}

#[test]
fn full_pipeline() {
    let ws = Workspace::new();

    let split = ws.ok(&["split"]);
    assert!(split.contains("EARLY: 60 charters"), "{split}");
    let stats = ws.read("corpus_stats.csv");
    let mut lines = stats.lines();
    assert_eq!(lines.next(), Some("period,start_year,end_year,charters,tokens"));
    assert!(lines.next().unwrap().starts_with("EARLY,1000,1099,60,"));
    assert_eq!(ws.read("excluded.csv"), "id,year\n");
    assert_eq!(ws.read("targets.txt").lines().count(), 60 + 6 * 20);

    ws.ok(&["train-static", "--threads", "1"]);
    assert!(ws.out("static/incremental/EARLY.space").is_file());
    let first = manifest_hashes(&ws);
    ws.ok(&["train-static", "--threads", "1"]);
    assert_eq!(first, manifest_hashes(&ws), "single-threaded reruns must be identical");

    let agg = ws.ok(&["aggregate"]);
    assert!(agg.contains("ctx/EARLY"), "{agg}");
    assert!(ws.out("contextual/ctx/LATE.vec").is_file());

    ws.ok(&["analyze"]);
    let metrics = ws.read("analysis/metrics.csv");
    let rows: Vec<&str> = metrics.lines().collect();
    assert_eq!(rows[0], "model,transition,delta_mu,t_p,rho,rho_p");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("incremental,EL,") && rows[2].starts_with("ctx,EL,"));
    assert!(ws.read("analysis/similarities.csv").starts_with("model,transition,word,label,cos\n"));
    let bundle: serde_json::Value = serde_json::from_str(&ws.read("analysis/bundle.json")).unwrap();
    assert_eq!(bundle["schema"], "clex-report/1");

    ws.ok(&["sweep", "--sweep.epochs", "[1]"]);
    let sweep = ws.read("sweep/incremental.csv");
    assert_eq!(sweep.lines().next(), Some("strategy,dim,epochs,delta_mu,rho"));
    assert_eq!(sweep.lines().count(), 1 + 2);

    let html_path = ws.ok(&["report"]);
    assert!(html_path.trim().ends_with("report.html"));
    let html = ws.read("report.html");
    assert_eq!(html.matches("<figure>").count(), 2);
    assert_eq!(html.matches("class=\"cell\"").count(), 2 * 2);
}

#[test]
fn split_counts_three_charters() {
    let dir = tempfile::tempdir().unwrap();
    let charters = dir.path().join("c.jsonl");
    fs::write(
        &charters,
        "{\"id\":\"a\",\"year\":700,\"text\":\"Ego rex dedi.\"}\n\
         {\"id\":\"b\",\"year\":1000,\"text\":\"Terram dedi.\"}\n\
         {\"id\":\"c\",\"year\":1100,\"text\":\"Rex confirmavit.\"}\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = clex(&["split", "--charters", charters.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("ANG: 2 charters") && s.contains("NOR: 1 charters"), "{s}");
}

#[test]
fn unwritable_output_fails_first() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    // the charter file does not exist either; the output check must come first
    let o = clex(&["split", "--charters", "missing.csv", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_of(&o)["error"], "io");
}

#[test]
fn unknown_strategy_is_usage_error() {
    let o = clex(&["train-static", "--strategy", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_of(&o)["error"], "usage");
}

#[test]
fn aggregate_errors() {
    let ws = Workspace::new();
    let empty = ws.root.join("empty.ndjson");
    fs::write(&empty, "").unwrap();
    let o = ws.run(&["aggregate", "--records.ctx.EARLY", empty.to_str().unwrap()]);
    assert_eq!(error_of(&o)["error"], "empty_period_stream");

    // records of LATE read as EARLY
    let late = ws.root.join("LATE.ndjson");
    let o = ws.run(&["aggregate", "--records.ctx.EARLY", late.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e = error_of(&o);
    assert_eq!(e["error"], "empty_period_stream");
    assert!(e["message"].as_str().unwrap().contains("empty period stream"));
}

#[test]
fn analyze_requires_labels() {
    let ws = Workspace::new();
    ws.ok(&["split"]);
    let o = ws.run(&["analyze", "--labels", "null"]);
    assert_eq!(error_of(&o)["error"], "config");
}

#[test]
fn report_rejects_empty_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("b.json");
    fs::write(&bundle, r#"{"schema":"clex-report/1","models":[],"sweeps":[]}"#).unwrap();
    let o = clex(&["report", "--bundle", bundle.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(error_of(&o)["error"], "validation");
}
