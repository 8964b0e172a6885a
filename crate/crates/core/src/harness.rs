//! Multi-run campaigns: load instances, run the solver with one seed per
//! run, revalidate every answer and aggregate the results into table, CSV or
//! JSON reports.

use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipgraph::BipartiteGraph;
use crate::cbts::UnbalanceVariant;
use crate::instance_io::{
    fetch_konect, generated_instance, parse_bip, parse_konect, InstanceMeta, IoError, Source,
};
use crate::solution::is_biclique;
use crate::solver::{serde_secs, solve, ReductionVariant, RunReport, SolverParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    Bip,
    Konect,
}

impl FileFormat {
    /// `.bip` files are native; anything else is read as a KONECT edge list.
    pub fn from_path(path: &Path) -> FileFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bip") => FileFormat::Bip,
            _ => FileFormat::Konect,
        }
    }
}

impl FromStr for FileFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bip" => Ok(FileFormat::Bip),
            "konect" => Ok(FileFormat::Konect),
            other => Err(format!("unknown format `{other}` (expected bip or konect)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceSpec {
    File { path: PathBuf, format: FileFormat },
    Konect { name: String },
    Generated { n: usize, p: f64, id: u64 },
}

impl InstanceSpec {
    /// Parses the `n,p,id` triple of a generated instance.
    pub fn parse_generated(triple: &str) -> Result<InstanceSpec, String> {
        let parts: Vec<&str> = triple.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected n,p,id but got `{triple}`"));
        }
        let n = parts[0].parse().map_err(|_| format!("bad n `{}`", parts[0]))?;
        let p = parts[1].parse().map_err(|_| format!("bad p `{}`", parts[1]))?;
        let id = parts[2].parse().map_err(|_| format!("bad id `{}`", parts[2]))?;
        Ok(InstanceSpec::Generated { n, p, id })
    }

    pub fn label(&self) -> String {
        match self {
            InstanceSpec::File { path, .. } => path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            InstanceSpec::Konect { name } => name.clone(),
            InstanceSpec::Generated { n, p, id } => format!("G_{n}_{p}_{id}"),
        }
    }

    pub fn load(&self, cache_dir: &Path) -> Result<(BipartiteGraph, InstanceMeta), IoError> {
        match self {
            InstanceSpec::File { path, format } => {
                let reader = BufReader::new(File::open(path)?);
                let label = self.label();
                match format {
                    FileFormat::Bip => parse_bip(reader, &label),
                    FileFormat::Konect => parse_konect(reader, &label),
                }
            }
            InstanceSpec::Konect { name } => {
                let path = fetch_konect(name, cache_dir)?;
                let (g, mut meta) = parse_konect(BufReader::new(File::open(path)?), name)?;
                meta.source = Source::Fetched;
                Ok((g, meta))
            }
            InstanceSpec::Generated { n, p, id } => generated_instance(*n, *p, *id),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for Emit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Emit::Table),
            "csv" => Ok(Emit::Csv),
            "json" => Ok(Emit::Json),
            other => Err(format!("unknown output format `{other}` (expected table, csv or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub instances: Vec<InstanceSpec>,
    pub runs: usize,
    /// `params.seed` is the base seed; run `i` uses `base + i`.
    pub params: SolverParams,
    pub jobs: usize,
    pub cache_dir: PathBuf,
}

impl CampaignConfig {
    pub fn new(instances: Vec<InstanceSpec>, params: SolverParams) -> Self {
        CampaignConfig {
            instances,
            runs: 1,
            params,
            jobs: 1,
            cache_dir: default_cache_dir(),
        }
    }
}

/// `$MBBP_CACHE_DIR`, or `.mbbp-cache` in the working directory.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os("MBBP_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".mbbp-cache"))
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("jobs must be at least 1")]
    NoJobs,
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error("malformed report: {0}")]
    Report(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    #[serde(flatten)]
    pub report: RunReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub meta: InstanceMeta,
    /// Largest balanced size over the runs.
    pub best: usize,
    pub avg_best: f64,
    #[serde(with = "serde_secs")]
    pub avg_time_to_best: Duration,
    /// Vertices removed by peeling in the first run that reached `best`.
    pub red_1: usize,
    /// Vertices removed by exact search in that run.
    pub red_2: usize,
    pub optimal_runs: usize,
    pub avg_restarts: f64,
    pub runs: Vec<RunRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum InstanceEntry {
    Solved(InstanceReport),
    Failed { name: String, error: String },
}

impl InstanceEntry {
    pub fn name(&self) -> &str {
        match self {
            InstanceEntry::Solved(r) => &r.meta.name,
            InstanceEntry::Failed { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub params: SolverParams,
    pub runs_per_instance: usize,
    pub instances: Vec<InstanceEntry>,
}

/// Runs every instance `config.runs` times on a pool of `config.jobs`
/// workers. A loading failure becomes a [`InstanceEntry::Failed`] entry.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport, HarnessError> {
    if config.runs == 0 {
        return Err(HarnessError::NoRuns);
    }
    if config.jobs == 0 {
        return Err(HarnessError::NoJobs);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let instances = pool.install(|| {
        config
            .instances
            .iter()
            .map(|spec| run_instance(spec, config))
            .collect()
    });
    Ok(CampaignReport {
        params: config.params.clone(),
        runs_per_instance: config.runs,
        instances,
    })
}

fn run_instance(spec: &InstanceSpec, config: &CampaignConfig) -> InstanceEntry {
    let failed = |error: String| InstanceEntry::Failed {
        name: spec.label(),
        error,
    };
    let (g, meta) = match spec.load(&config.cache_dir) {
        Ok(loaded) => loaded,
        Err(e) => return failed(e.to_string()),
    };
    let results: Vec<_> = (0..config.runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = config.params.seed.wrapping_add(i);
            let params = SolverParams {
                seed,
                ..config.params.clone()
            };
            solve(&g, &params).map(|report| RunRecord { seed, report })
        })
        .collect();
    let mut runs = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(run) => runs.push(run),
            Err(e) => return failed(e.to_string()),
        }
    }
    drop(g);

    let fresh = match spec.load(&config.cache_dir) {
        Ok((fresh, _)) => fresh,
        Err(e) => return failed(format!("reloading for validation: {e}")),
    };
    for run in &runs {
        if let Err(e) = validate(&fresh, &run.report) {
            return failed(format!("run with seed {}: {e}", run.seed));
        }
    }
    InstanceEntry::Solved(aggregate(meta, runs))
}

fn validate(g: &BipartiteGraph, report: &RunReport) -> Result<(), String> {
    let b = &report.best;
    match is_biclique(g, b) {
        Ok(true) => {}
        Ok(false) => return Err("reported sets are not a biclique".into()),
        Err(e) => return Err(e.to_string()),
    }
    if b.balance_deviation() != 0 {
        return Err(format!("reported biclique has deviation {}", b.balance_deviation()));
    }
    if b.balanced_size() != report.omega {
        return Err(format!(
            "reported omega {} but the biclique has size {}",
            report.omega,
            b.balanced_size()
        ));
    }
    Ok(())
}

fn aggregate(meta: InstanceMeta, runs: Vec<RunRecord>) -> InstanceReport {
    let n = runs.len() as f64;
    let best = runs.iter().map(|r| r.report.omega).max().unwrap_or(0);
    let first_best = runs
        .iter()
        .find(|r| r.report.omega == best)
        .expect("at least one run");
    let total_ttb: Duration = runs.iter().map(|r| r.report.time_to_best).sum();
    InstanceReport {
        meta,
        best,
        avg_best: runs.iter().map(|r| r.report.omega as f64).sum::<f64>() / n,
        avg_time_to_best: total_ttb / runs.len() as u32,
        red_1: first_best.report.removed_by_peel,
        red_2: first_best.report.removed_by_exact,
        optimal_runs: runs.iter().filter(|r| r.report.proven_optimal).count(),
        avg_restarts: runs.iter().map(|r| r.report.restarts as f64).sum::<f64>() / n,
        runs,
    }
}

/// One CSV row per instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub instance: String,
    pub status: String,
    pub n_u: Option<usize>,
    pub n_v: Option<usize>,
    pub edges: Option<usize>,
    pub best: Option<usize>,
    pub avg_best: Option<f64>,
    pub avg_time_to_best: Option<f64>,
    pub red_1: Option<usize>,
    pub red_2: Option<usize>,
    pub optimal_runs: Option<usize>,
    pub runs: Option<usize>,
    pub error: Option<String>,
}

impl CampaignReport {
    pub fn all_failed(&self) -> bool {
        self.instances
            .iter()
            .all(|e| matches!(e, InstanceEntry::Failed { .. }))
    }

    pub fn solved(&self) -> impl Iterator<Item = &InstanceReport> {
        self.instances.iter().filter_map(|e| match e {
            InstanceEntry::Solved(r) => Some(r),
            InstanceEntry::Failed { .. } => None,
        })
    }

    pub fn render(&self, emit: Emit) -> Result<String, HarnessError> {
        match emit {
            Emit::Table => Ok(self.to_table()),
            Emit::Csv => self.to_csv(),
            Emit::Json => self.to_json(),
        }
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.instances
            .iter()
            .map(|e| match e {
                InstanceEntry::Solved(r) => CsvRow {
                    instance: r.meta.name.clone(),
                    status: "ok".into(),
                    n_u: Some(r.meta.n_u),
                    n_v: Some(r.meta.n_v),
                    edges: Some(r.meta.edge_count),
                    best: Some(r.best),
                    avg_best: Some(r.avg_best),
                    avg_time_to_best: Some(r.avg_time_to_best.as_secs_f64()),
                    red_1: Some(r.red_1),
                    red_2: Some(r.red_2),
                    optimal_runs: Some(r.optimal_runs),
                    runs: Some(r.runs.len()),
                    error: None,
                },
                InstanceEntry::Failed { name, error } => CsvRow {
                    instance: name.clone(),
                    status: "error".into(),
                    n_u: None,
                    n_v: None,
                    edges: None,
                    best: None,
                    avg_best: None,
                    avg_time_to_best: None,
                    red_1: None,
                    red_2: None,
                    optimal_runs: None,
                    runs: None,
                    error: Some(error.clone()),
                },
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in self.csv_rows() {
            w.serialize(row).map_err(|e| HarnessError::Report(e.to_string()))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| HarnessError::Report(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| HarnessError::Report(e.to_string()))
    }

    pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>, HarnessError> {
        csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<Result<_, _>>()
            .map_err(|e| HarnessError::Report(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        serde_json::to_string_pretty(self).map_err(|e| HarnessError::Report(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<CampaignReport, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Report(e.to_string()))
    }

    /// Fixed-width table; proven optima carry a `*`, and the average is
    /// shown in parentheses only when the runs disagree.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<28} {:>20} {:>10} {:>14} {:>9} {:>9} {:>7} {:>5}",
            "instance", "(|U|,|V|)", "|E|", "best(ave)", "time", "red_1", "red_2", "opt"
        );
        for entry in &self.instances {
            match entry {
                InstanceEntry::Solved(r) => {
                    let _ = writeln!(
                        out,
                        "{:<28} {:>20} {:>10} {:>14} {:>9.2} {:>9} {:>7} {:>5}",
                        r.meta.name,
                        format!("({}, {})", r.meta.n_u, r.meta.n_v),
                        r.meta.edge_count,
                        best_cell(r),
                        r.avg_time_to_best.as_secs_f64(),
                        r.red_1,
                        r.red_2,
                        format!("{}/{}", r.optimal_runs, r.runs.len()),
                    );
                }
                InstanceEntry::Failed { name, error } => {
                    let _ = writeln!(out, "{name:<28} error: {error}");
                }
            }
        }
        out
    }
}

fn best_cell(r: &InstanceReport) -> String {
    let star = if r.optimal_runs > 0 { "*" } else { "" };
    if r.runs.iter().all(|run| run.report.omega == r.best) {
        format!("{}{star}", r.best)
    } else {
        format!("{}{star} ({:.2})", r.best, r.avg_best)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    /// Tabu search restricted to deviation 1, 2 or unbounded.
    Unbalance,
    /// No reduction, peeling only, peeling plus exact search.
    Reduction,
}

impl FromStr for Study {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unbalance" => Ok(Study::Unbalance),
            "reduction" => Ok(Study::Reduction),
            other => Err(format!("unknown study `{other}` (expected unbalance or reduction)")),
        }
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Study::Unbalance => "unbalance",
            Study::Reduction => "reduction",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub study: Study,
    /// One campaign per variant, labelled by the variant name.
    pub variants: Vec<(String, CampaignReport)>,
}

/// Runs the same campaign once per variant of `study`, everything else
/// equal.
pub fn run_variants(config: &CampaignConfig, study: Study) -> Result<VariantReport, HarnessError> {
    let variants: Vec<(String, SolverParams)> = match study {
        Study::Unbalance => [
            UnbalanceVariant::Unbounded,
            UnbalanceVariant::Bound1,
            UnbalanceVariant::Bound2,
        ]
        .into_iter()
        .map(|u| {
            (
                format!("omega^{u}"),
                SolverParams {
                    unbalance: u,
                    ..config.params.clone()
                },
            )
        })
        .collect(),
        Study::Reduction => [
            ReductionVariant::None,
            ReductionVariant::Peel,
            ReductionVariant::PeelExact,
        ]
        .into_iter()
        .map(|r| {
            (
                r.to_string(),
                SolverParams {
                    reduction: r,
                    ..config.params.clone()
                },
            )
        })
        .collect(),
    };
    let mut out = Vec::with_capacity(variants.len());
    for (label, params) in variants {
        let cfg = CampaignConfig {
            params,
            ..config.clone()
        };
        out.push((label, run_campaign(&cfg)?));
    }
    Ok(VariantReport {
        study,
        variants: out,
    })
}

impl VariantReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<28}", "instance");
        for (label, _) in &self.variants {
            let _ = write!(out, " {:>14} {:>9} {:>5}", label, "time", "opt");
        }
        out.push('\n');
        let Some((_, first)) = self.variants.first() else {
            return out;
        };
        for (k, entry) in first.instances.iter().enumerate() {
            let _ = write!(out, "{:<28}", entry.name());
            for (_, campaign) in &self.variants {
                match &campaign.instances[k] {
                    InstanceEntry::Solved(r) => {
                        let _ = write!(
                            out,
                            " {:>14} {:>9.2} {:>5}",
                            best_cell(r),
                            r.avg_time_to_best.as_secs_f64(),
                            format!("{}/{}", r.optimal_runs, r.runs.len())
                        );
                    }
                    InstanceEntry::Failed { .. } => {
                        let _ = write!(out, " {:>14} {:>9} {:>5}", "error", "-", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn render(&self, emit: Emit) -> Result<String, HarnessError> {
        match emit {
            Emit::Table => Ok(self.to_table()),
            Emit::Json => {
                serde_json::to_string_pretty(self).map_err(|e| HarnessError::Report(e.to_string()))
            }
            Emit::Csv => {
                let mut text = String::new();
                for (k, (label, campaign)) in self.variants.iter().enumerate() {
                    let csv = campaign.to_csv()?;
                    let mut lines = csv.lines();
                    let header = lines.next().unwrap_or_default();
                    if k == 0 {
                        let _ = writeln!(text, "variant,{header}");
                    }
                    for line in lines {
                        let _ = writeln!(text, "{label},{line}");
                    }
                }
                Ok(text)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1_file() -> (tempfile::TempDir, InstanceSpec) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t1.bip");
        let edges: Vec<String> = (1..=3)
            .flat_map(|i| (1..=3).map(move |j| (i, j)))
            .filter(|&(i, j)| !(i == 3 && j == 3))
            .map(|(i, j)| format!("e {i} {j}"))
            .collect();
        std::fs::write(&path, format!("p bip 3 3 8\n{}\n", edges.join("\n"))).unwrap();
        let spec = InstanceSpec::File {
            path,
            format: FileFormat::Bip,
        };
        (dir, spec)
    }

    fn quick() -> SolverParams {
        SolverParams {
            time_limit: Duration::from_secs(2),
            seed: 100,
            ..SolverParams::dense()
        }
    }

    #[test]
    fn twenty_runs_on_t1() {
        let (_dir, spec) = t1_file();
        let mut config = CampaignConfig::new(vec![spec], quick());
        config.runs = 20;
        let report = run_campaign(&config).unwrap();
        let r = report.solved().next().unwrap();
        assert_eq!(r.best, 2);
        assert_eq!(r.avg_best, 2.0);
        assert_eq!(r.optimal_runs, 20);
        let seeds: Vec<u64> = r.runs.iter().map(|run| run.seed).collect();
        assert_eq!(seeds, (100..120).collect::<Vec<_>>());
        assert_eq!(best_cell(r), "2*");
    }

    #[test]
    fn missing_file_is_a_failed_entry() {
        let spec = InstanceSpec::File {
            path: PathBuf::from("/nonexistent/x.bip"),
            format: FileFormat::Bip,
        };
        let report = run_campaign(&CampaignConfig::new(vec![spec], quick())).unwrap();
        assert!(report.all_failed());
        assert!(report.to_table().contains("error"));
    }

    #[test]
    fn reports_round_trip() {
        let (_dir, spec) = t1_file();
        let gen = InstanceSpec::parse_generated("12,0.5,3").unwrap();
        let bad = InstanceSpec::Konect {
            name: "nonexistent".into(),
        };
        let mut config = CampaignConfig::new(vec![spec, gen, bad], quick());
        config.runs = 3;
        let report = run_campaign(&config).unwrap();
        assert!(!report.all_failed());

        let json = report.to_json().unwrap();
        assert_eq!(CampaignReport::from_json(&json).unwrap(), report);

        let rows = CampaignReport::parse_csv(&report.to_csv().unwrap()).unwrap();
        assert_eq!(rows, report.csv_rows());
        assert_eq!(rows[2].status, "error");
    }

    #[test]
    fn parallel_matches_serial() {
        let spec = InstanceSpec::parse_generated("30,0.6,1").unwrap();
        let mut config = CampaignConfig::new(
            vec![spec],
            SolverParams {
                max_restarts: Some(5),
                time_limit: Duration::from_secs(60),
                ..quick()
            },
        );
        config.runs = 4;
        let serial = run_campaign(&config).unwrap();
        config.jobs = 3;
        let parallel = run_campaign(&config).unwrap();
        let (a, b) = (serial.solved().next().unwrap(), parallel.solved().next().unwrap());
        assert_eq!(a.runs.len(), b.runs.len());
        for (x, y) in a.runs.iter().zip(&b.runs) {
            assert_eq!(x.seed, y.seed);
            assert!(x.report.same_outcome(&y.report));
        }
    }

    #[test]
    fn zero_runs_rejected() {
        let mut config = CampaignConfig::new(Vec::new(), quick());
        config.runs = 0;
        assert!(matches!(run_campaign(&config), Err(HarnessError::NoRuns)));
    }

    #[test]
    fn generated_triple_parsing() {
        assert_eq!(
            InstanceSpec::parse_generated("250,0.95,1").unwrap(),
            InstanceSpec::Generated { n: 250, p: 0.95, id: 1 }
        );
        assert!(InstanceSpec::parse_generated("250,0.95").is_err());
        assert!(InstanceSpec::parse_generated("a,0.95,1").is_err());
    }

    #[test]
    fn reduction_study_has_three_variants() {
        let (_dir, spec) = t1_file();
        let config = CampaignConfig::new(
            vec![spec],
            SolverParams {
                time_limit: Duration::from_millis(200),
                ..quick()
            },
        );
        let report = run_variants(&config, Study::Reduction).unwrap();
        let labels: Vec<&str> = report.variants.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["none", "peel", "peel+exact"]);
        assert!(report.to_table().contains("t1.bip"));
        assert!(report.render(Emit::Csv).unwrap().starts_with("variant,instance"));
    }
}
