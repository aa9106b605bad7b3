use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::context::{aggregate, export_as_wordvectors, read_records, AggregationStats};
use crate::corpus::{
    compute_frequencies, load_charters, load_labels, read_slice, select_targets, split_periods, write_slice,
    CharterFormat, PeriodSlice, PeriodSpec,
};
use crate::embed::{
    fnv1a_64, load_pretrained_text_vectors, load_space, save_space, sweep, train_strategy, EmbeddingSpace,
    InitStrategy, StageRecord, StrategyRun, TrainConfig, VectorTable, WordVectors,
};
use crate::report::{write_html, ModelReport, ReportBundle, TransitionReport};
use crate::semantics::{
    attach_labels, compare_transitions, compute_metrics, distribution_summary, merge_rows, pair_similarities,
    Coverage, SimilarityRow, Transition,
};
use crate::{ChangeLabelSet, Error, Result};

fn io<T>(path: &Path, r: std::io::Result<T>) -> Result<T> {
    r.map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    io(path, fs::create_dir_all(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    io(path, fs::write(path, serde_json::to_string_pretty(value)? + "\n"))
}

/// Fails unless `dir` can be created and written to.
fn ensure_writable(dir: &Path) -> Result<()> {
    create_dir(dir)?;
    let probe = dir.join(".clex-write-probe");
    io(&probe, fs::write(&probe, b""))?;
    io(&probe, fs::remove_file(&probe))
}

/// Slice metadata written by `split` next to the slice files.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct SliceEntry {
    period: PeriodSpec,
    file: String,
    charters: usize,
    tokens: usize,
}

fn slices_dir(out: &Path) -> PathBuf {
    out.join("slices")
}

fn load_slices(out: &Path) -> Result<Vec<PeriodSlice>> {
    let dir = slices_dir(out);
    let manifest = dir.join("manifest.json");
    if !manifest.is_file() {
        return Err(Error::Precondition(format!(
            "{} not found; run `clex split` first",
            manifest.display()
        )));
    }
    let entries: Vec<SliceEntry> = serde_json::from_str(&io(&manifest, fs::read_to_string(&manifest))?)?;
    entries
        .into_iter()
        .map(|e| read_slice(dir.join(&e.file), e.period, e.charters))
        .collect()
}

fn load_targets(out: &Path) -> Result<BTreeSet<String>> {
    let path = out.join("targets.txt");
    if !path.is_file() {
        return Err(Error::Precondition(format!("{} not found; run `clex split` first", path.display())));
    }
    let file = io(&path, fs::File::open(&path))?;
    let mut targets = BTreeSet::new();
    for line in BufReader::new(file).lines() {
        let line = io(&path, line)?;
        if !line.trim().is_empty() {
            targets.insert(line.trim().to_string());
        }
    }
    Ok(targets)
}

/// Outcome of `split`, per period in spec order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitSummary {
    pub periods: Vec<(String, usize, usize)>,
    pub excluded: usize,
    pub targets: usize,
}

/// Writes `slices/<P>.txt`, `slices/manifest.json`, `corpus_stats.csv`
/// (`period,start_year,end_year,charters,tokens`), `excluded.csv`
/// (`id,year`) and `targets.txt`.
pub fn cmd_split(config: &RunConfig) -> Result<SplitSummary> {
    let out = &config.out;
    ensure_writable(out)?;
    let charters_path = config.require_file("charters", config.charters.as_ref())?;
    let format = CharterFormat::from_path(&charters_path).ok_or_else(|| {
        Error::Config(format!("{}: expected a .csv or .jsonl charter file", charters_path.display()))
    })?;
    let specs = config.period_specs()?;
    let charters = load_charters(&charters_path, format)?;
    let split = split_periods(&charters, &specs)?;

    let dir = slices_dir(out);
    create_dir(&dir)?;
    let mut entries = Vec::new();
    for slice in &split.slices {
        let file = format!("{}.txt", slice.name());
        write_slice(slice, dir.join(&file))?;
        entries.push(SliceEntry {
            period: slice.period.clone(),
            file,
            charters: slice.charter_count,
            tokens: slice.token_count,
        });
    }
    write_json(&dir.join("manifest.json"), &entries)?;

    let mut stats = csv::Writer::from_path(out.join("corpus_stats.csv"))?;
    stats.write_record(["period", "start_year", "end_year", "charters", "tokens"])?;
    for e in &entries {
        stats.write_record([
            e.period.name.clone(),
            e.period.start_year.to_string(),
            e.period.end_year.to_string(),
            e.charters.to_string(),
            e.tokens.to_string(),
        ])?;
    }
    stats.flush().map_err(|e| Error::io(out.join("corpus_stats.csv"), e))?;

    let mut excluded = csv::Writer::from_path(out.join("excluded.csv"))?;
    excluded.write_record(["id", "year"])?;
    for c in &split.excluded {
        excluded.write_record([c.id.clone(), c.year.to_string()])?;
    }
    excluded.flush().map_err(|e| Error::io(out.join("excluded.csv"), e))?;
    if !split.excluded.is_empty() {
        log::warn!("{} charters fall outside every period", split.excluded.len());
    }

    let targets = if split.slices.iter().all(|s| !s.is_empty()) {
        select_targets(&compute_frequencies(&split.slices)?, config.threshold_per_100k)?
    } else {
        log::warn!("some period is empty; no targets selected");
        BTreeSet::new()
    };
    let targets_path = out.join("targets.txt");
    let text: String = targets.iter().map(|w| format!("{w}\n")).collect();
    io(&targets_path, fs::write(&targets_path, text))?;

    Ok(SplitSummary {
        periods: entries.iter().map(|e| (e.period.name.clone(), e.charters, e.tokens)).collect(),
        excluded: split.excluded.len(),
        targets: targets.len(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceEntry {
    pub period: String,
    pub file: String,
    /// FNV-1a 64 of the file bytes, hex.
    pub fnv1a_64: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrainManifest {
    pub strategy: InitStrategy,
    pub config: TrainConfig,
    pub created_unix: u64,
    pub stages: Vec<StageRecord>,
    pub spaces: Vec<SpaceEntry>,
}

fn static_dir(out: &Path, strategy: InitStrategy) -> PathBuf {
    out.join("static").join(strategy.as_str())
}

fn load_pretrained(config: &RunConfig, strategy: InitStrategy) -> Result<Option<VectorTable>> {
    if strategy != InitStrategy::BackwardExternal {
        return Ok(None);
    }
    let path = config.require_file("pretrained", config.pretrained.as_ref())?;
    load_pretrained_text_vectors(path).map(Some)
}

/// Trains every strategy and writes `static/<strategy>/<P>.space` plus a
/// `manifest.json` with the config, stages and file digests.
pub fn cmd_train_static(config: &RunConfig, strategies: &[InitStrategy]) -> Result<Vec<TrainManifest>> {
    let slices = load_slices(&config.out)?;
    let mut manifests = Vec::new();
    for &strategy in strategies {
        let pretrained = load_pretrained(config, strategy)?;
        log::info!("training {strategy} over {} periods", slices.len());
        let run = train_strategy(strategy, &slices, &config.train, pretrained.as_ref())?;
        let dir = static_dir(&config.out, strategy);
        create_dir(&dir)?;
        let mut spaces = Vec::new();
        for (period, space) in &run.spaces {
            let file = format!("{period}.space");
            let path = dir.join(&file);
            save_space(space, &path)?;
            let bytes = io(&path, fs::read(&path))?;
            spaces.push(SpaceEntry {
                period: period.clone(),
                file,
                fnv1a_64: format!("{:016x}", fnv1a_64(&bytes)),
            });
        }
        let manifest = TrainManifest {
            strategy,
            config: config.train.clone(),
            created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            stages: run.stages,
            spaces,
        };
        write_json(&dir.join("manifest.json"), &manifest)?;
        manifests.push(manifest);
    }
    Ok(manifests)
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodAggregation {
    pub period: String,
    pub words: usize,
    pub stats: AggregationStats,
}

fn contextual_dir(out: &Path, model: &str) -> PathBuf {
    out.join("contextual").join(model)
}

/// Aggregates every configured record file into
/// `contextual/<model>/<P>.vec` and writes `contextual/<model>/aggregation.json`.
pub fn cmd_aggregate(config: &RunConfig) -> Result<BTreeMap<String, Vec<PeriodAggregation>>> {
    if config.records.is_empty() {
        return Err(Error::Config("`records` is empty; nothing to aggregate".into()));
    }
    let mut reports = BTreeMap::new();
    for (model, files) in &config.records {
        let dir = contextual_dir(&config.out, model);
        create_dir(&dir)?;
        let mut report = Vec::new();
        for (period, path) in files {
            let outcome = aggregate(read_records(path)?, period)?;
            export_as_wordvectors(&outcome.embeddings, dir.join(format!("{period}.vec")))?;
            if outcome.stats.truncated_words > 0 {
                log::warn!("{model}/{period}: {} words were truncated by the exporter", outcome.stats.truncated_words);
            }
            report.push(PeriodAggregation {
                period: period.clone(),
                words: outcome.embeddings.len(),
                stats: outcome.stats,
            });
        }
        write_json(&dir.join("aggregation.json"), &report)?;
        reports.insert(model.clone(), report);
    }
    Ok(reports)
}

/// One model's per-period vectors.
enum ModelVectors {
    Static(Vec<(String, EmbeddingSpace)>),
    Contextual(Vec<(String, VectorTable)>),
}

impl ModelVectors {
    fn period(&self, name: &str) -> Option<&dyn WordVectors> {
        match self {
            ModelVectors::Static(v) => v.iter().find(|(p, _)| p == name).map(|(_, s)| s as &dyn WordVectors),
            ModelVectors::Contextual(v) => v.iter().find(|(p, _)| p == name).map(|(_, s)| s as &dyn WordVectors),
        }
    }
}

fn load_models(config: &RunConfig, periods: &[String]) -> Result<Vec<(String, ModelVectors)>> {
    let mut models = Vec::new();
    for &strategy in &config.strategies {
        let dir = static_dir(&config.out, strategy);
        if !dir.is_dir() {
            log::warn!("no trained spaces for {strategy} in {}", dir.display());
            continue;
        }
        let spaces = periods
            .iter()
            .map(|p| Ok((p.clone(), load_space(dir.join(format!("{p}.space")))?)))
            .collect::<Result<Vec<_>>>()?;
        models.push((strategy.as_str().to_string(), ModelVectors::Static(spaces)));
    }
    for model in config.records.keys() {
        let dir = contextual_dir(&config.out, model);
        let tables = periods
            .iter()
            .map(|p| Ok((p.clone(), load_pretrained_text_vectors(dir.join(format!("{p}.vec")))?)))
            .collect::<Result<Vec<_>>>()?;
        models.push((model.clone(), ModelVectors::Contextual(tables)));
    }
    if models.is_empty() {
        return Err(Error::Precondition(
            "no embeddings to analyze; run `clex train-static` or `clex aggregate` first".into(),
        ));
    }
    Ok(models)
}

fn transitions(config: &RunConfig, specs: &[PeriodSpec]) -> Result<Vec<Transition>> {
    let all = Transition::consecutive(&specs.iter().map(|s| s.name.as_str()).collect::<Vec<_>>());
    if config.transitions.is_empty() {
        return Ok(all);
    }
    config
        .transitions
        .iter()
        .map(|name| {
            all.iter()
                .find(|t| &t.name == name)
                .cloned()
                .ok_or_else(|| Error::Config(format!("unknown transition {name:?}")))
        })
        .collect()
}

fn load_label_set(config: &RunConfig, targets: &BTreeSet<String>) -> Result<ChangeLabelSet> {
    let path = config.require_file("labels", config.labels.as_ref())?;
    let load = load_labels(path, targets)?;
    for w in &load.warnings {
        log::warn!("{w}");
    }
    Ok(load.labels)
}

/// Labeled rows of one model over the given transitions.
fn similarity_rows<'a>(
    lookup: &dyn Fn(&str) -> Option<&'a dyn WordVectors>,
    transitions: &[Transition],
    targets: &BTreeSet<String>,
    labels: &ChangeLabelSet,
) -> Result<(Vec<SimilarityRow>, Vec<Coverage>)> {
    let mut sets = Vec::new();
    let mut coverage = Vec::new();
    for t in transitions {
        let (a, b) = match (lookup(&t.from), lookup(&t.to)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Precondition(format!("missing vectors for transition {}", t.name))),
        };
        let (rows, cov) = pair_similarities(a, b, targets, &t.name)?;
        sets.push(rows);
        coverage.push(cov);
    }
    let mut rows = merge_rows(sets);
    attach_labels(&mut rows, labels);
    Ok((rows, coverage))
}

fn evaluate_model(
    name: &str,
    rows: &[SimilarityRow],
    coverage: Vec<Coverage>,
    transitions: &[Transition],
) -> Result<ModelReport> {
    let mut reports = Vec::new();
    for t in transitions {
        reports.push(TransitionReport {
            metrics: compute_metrics(rows, &t.name)?,
            distribution: distribution_summary(rows, &t.name)?,
        });
    }
    let comparison = if transitions.len() >= 2 {
        // compare on the words present in both transitions
        let (first, second) = (&transitions[0].name, &transitions[1].name);
        let common: Vec<SimilarityRow> = rows
            .iter()
            .filter(|r| r.cos.contains_key(first) && r.cos.contains_key(second))
            .cloned()
            .collect();
        Some(compare_transitions(&compute_metrics(&common, first)?, &compute_metrics(&common, second)?)?)
    } else {
        None
    };
    Ok(ModelReport {
        name: name.to_string(),
        transitions: reports,
        comparison,
        coverage,
    })
}

/// Writes `analysis/similarities.csv` (`model,transition,word,label,cos`),
/// `analysis/metrics.csv` (`model,transition,delta_mu,t_p,rho,rho_p`) and
/// `analysis/bundle.json`.
pub fn cmd_analyze(config: &RunConfig) -> Result<ReportBundle> {
    let specs = config.period_specs()?;
    let targets = load_targets(&config.out)?;
    let labels = load_label_set(config, &targets)?;
    let transitions = transitions(config, &specs)?;
    let periods: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    let models = load_models(config, &periods)?;

    let dir = config.out.join("analysis");
    create_dir(&dir)?;
    let mut sims = csv::Writer::from_path(dir.join("similarities.csv"))?;
    sims.write_record(["model", "transition", "word", "label", "cos"])?;
    let mut metrics = csv::Writer::from_path(dir.join("metrics.csv"))?;
    metrics.write_record(["model", "transition", "delta_mu", "t_p", "rho", "rho_p"])?;

    let mut bundle = ReportBundle::new();
    for (name, model) in &models {
        let lookup = |p: &str| model.period(p);
        let (rows, coverage) = similarity_rows(&lookup, &transitions, &targets, &labels)?;
        for t in &transitions {
            for r in &rows {
                if let Some(c) = r.cos.get(&t.name) {
                    let label = r.label.map(|l| (l as u8).to_string()).unwrap_or_default();
                    sims.write_record([name.as_str(), t.name.as_str(), r.word.as_str(), label.as_str(), &c.to_string()])?;
                }
            }
        }
        let report = evaluate_model(name, &rows, coverage, &transitions)?;
        for t in &report.transitions {
            let m = &t.metrics;
            metrics.write_record([
                name.clone(),
                m.transition.clone(),
                m.delta_mu.to_string(),
                m.t_p_value.to_string(),
                m.rho.to_string(),
                m.rho_p_value.to_string(),
            ])?;
        }
        bundle.models.push(report);
    }
    sims.flush().map_err(|e| Error::io(dir.join("similarities.csv"), e))?;
    metrics.flush().map_err(|e| Error::io(dir.join("metrics.csv"), e))?;
    bundle.save(dir.join("bundle.json"))?;
    Ok(bundle)
}

/// Writes `sweep/<strategy>.csv` and `sweep/bundle.json`.
pub fn cmd_sweep(config: &RunConfig, strategy: InitStrategy) -> Result<ReportBundle> {
    let specs = config.period_specs()?;
    let slices = load_slices(&config.out)?;
    let targets = load_targets(&config.out)?;
    let labels = load_label_set(config, &targets)?;
    let all = transitions(config, &specs)?;
    let transition = match &config.sweep.transition {
        Some(name) => all
            .iter()
            .find(|t| &t.name == name)
            .cloned()
            .ok_or_else(|| Error::Config(format!("unknown transition {name:?}")))?,
        None => all.first().cloned().ok_or_else(|| Error::Config("no transitions".into()))?,
    };
    let pretrained = load_pretrained(config, strategy)?;
    let report = sweep(
        &slices,
        strategy,
        &config.sweep.dims,
        &config.sweep.epochs,
        &config.train,
        pretrained.as_ref(),
        |run: &StrategyRun| {
            let lookup = |p: &str| run.space(p).map(|s| s as &dyn WordVectors);
            let (rows, _) = similarity_rows(&lookup, std::slice::from_ref(&transition), &targets, &labels)?;
            let m = compute_metrics(&rows, &transition.name)?;
            Ok((m.delta_mu, m.rho))
        },
    )?;
    let dir = config.out.join("sweep");
    create_dir(&dir)?;
    let csv_path = dir.join(format!("{}.csv", strategy.as_str()));
    report.write_csv(io(&csv_path, fs::File::create(&csv_path))?)?;
    let bundle_path = dir.join("bundle.json");
    let mut bundle = if bundle_path.is_file() { ReportBundle::load(&bundle_path)? } else { ReportBundle::new() };
    bundle.sweeps.retain(|s| s.strategy != strategy);
    bundle.sweeps.push(report);
    bundle.save(&bundle_path)?;
    Ok(bundle)
}

/// Merges the given bundles (by default the analysis and sweep bundles found
/// under `out`) and renders them to one HTML file.
pub fn cmd_report(config: &RunConfig, bundles: &[PathBuf], html: Option<&Path>) -> Result<PathBuf> {
    let paths: Vec<PathBuf> = if bundles.is_empty() {
        [config.out.join("analysis/bundle.json"), config.out.join("sweep/bundle.json")]
            .into_iter()
            .filter(|p| p.is_file())
            .collect()
    } else {
        bundles.to_vec()
    };
    if paths.is_empty() {
        return Err(Error::Precondition(
            "no report bundle found; run `clex analyze` or `clex sweep` first".into(),
        ));
    }
    let mut merged = ReportBundle::new();
    for p in &paths {
        let b = ReportBundle::load(p)?;
        merged.models.extend(b.models);
        merged.sweeps.extend(b.sweeps);
    }
    let target = html.map(Path::to_path_buf).unwrap_or_else(|| config.out.join("report.html"));
    if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_html(&merged, &target)?;
    Ok(target)
}
