//! `mbbp`: solve, generate, export and benchmark maximum balanced biclique
//! instances.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mbbp::harness::default_cache_dir;
use mbbp::instance_io::{export_lp_with_cap, fetch_konect, write_bip, DEFAULT_LP_CAP};
use mbbp::{
    peel, run_campaign, run_variants, solve, CampaignConfig, Emit, FileFormat, InstanceSpec,
    ReductionVariant, SolverParams, Study, UnbalanceVariant,
};

#[derive(Parser, Debug)]
#[command(name = "mbbp", version, about = "Maximum balanced biclique solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the solver on one or more instances.
    Solve(SolveArgs),
    /// Write a random instance in .bip format.
    Gen(GenArgs),
    /// Write the binary program of an instance in LP format.
    ExportLp(ExportArgs),
    /// Download a KONECT dataset into the cache and print its path.
    Fetch(FetchArgs),
    /// Compare tabu search or reduction variants on the same instances.
    Variants(VariantArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Profile {
    Dense,
    Sparse,
}

#[derive(Args, Debug, Clone)]
struct InstanceArgs {
    /// Instance file (repeatable).
    #[arg(long = "in", value_name = "PATH")]
    inputs: Vec<PathBuf>,
    /// Format of --in files; inferred from the extension when omitted.
    #[arg(long, value_parser = parse_from_str::<FileFormat>)]
    format: Option<FileFormat>,
    /// Generated instance `n,p,id` (repeatable).
    #[arg(long = "gen", value_name = "N,P,ID", value_parser = InstanceSpec::parse_generated)]
    generated: Vec<InstanceSpec>,
    /// KONECT dataset name (repeatable).
    #[arg(long = "konect", value_name = "NAME")]
    konect: Vec<String>,
}

impl InstanceArgs {
    fn specs(&self) -> Vec<InstanceSpec> {
        let files = self.inputs.iter().map(|path| InstanceSpec::File {
            path: path.clone(),
            format: self.format.unwrap_or_else(|| FileFormat::from_path(path)),
        });
        let konect = self
            .konect
            .iter()
            .map(|name| InstanceSpec::Konect { name: name.clone() });
        files
            .chain(self.generated.iter().cloned())
            .chain(konect)
            .collect()
    }
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Parameter profile; individual flags override it.
    #[arg(long, value_enum, default_value = "dense")]
    profile: Profile,
    /// Base seed; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seconds per run (profile default: 30 dense, 360 sparse).
    #[arg(long, value_name = "SECS")]
    time_limit: Option<f64>,
    /// Tabu search depth.
    #[arg(long = "L")]
    depth: Option<usize>,
    /// Tabu tenure coefficient.
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest component solved exactly.
    #[arg(long = "K")]
    k: Option<usize>,
    /// Seconds per exact search.
    #[arg(long, value_name = "SECS", default_value_t = 10.0)]
    exact_timeout: f64,
    #[arg(long, value_parser = parse_from_str::<UnbalanceVariant>, default_value = "2")]
    unbalance: UnbalanceVariant,
    #[arg(long, value_parser = parse_from_str::<ReductionVariant>, default_value = "peel+exact")]
    reduction: ReductionVariant,
    /// Stop after this many restarts.
    #[arg(long)]
    max_restarts: Option<u64>,
    /// Stop once a biclique of this balanced size is found.
    #[arg(long)]
    target: Option<usize>,
}

impl SolverArgs {
    fn params(&self) -> Result<SolverParams> {
        let mut p = match self.profile {
            Profile::Dense => SolverParams::dense(),
            Profile::Sparse => SolverParams::sparse(),
        };
        if let Some(t) = self.time_limit {
            p.time_limit = seconds(t, "--time-limit")?;
        }
        p.exact_budget = seconds(self.exact_timeout, "--exact-timeout")?;
        p.depth = self.depth.unwrap_or(p.depth);
        p.alpha = self.alpha.unwrap_or(p.alpha);
        p.k = self.k.unwrap_or(p.k);
        p.unbalance = self.unbalance;
        p.reduction = self.reduction;
        p.max_restarts = self.max_restarts;
        p.target = self.target;
        p.seed = self.seed;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Debug, Clone)]
struct ReportArgs {
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, value_parser = parse_from_str::<Emit>, default_value = "table")]
    emit: Emit,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Download cache (default: $MBBP_CACHE_DIR or ./.mbbp-cache).
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    instances: InstanceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct VariantArgs {
    #[arg(long, value_parser = parse_from_str::<Study>)]
    study: Study,
    #[command(flatten)]
    instances: InstanceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// `n,p,id`; the id doubles as the seed.
    #[arg(long = "gen", value_name = "N,P,ID", value_parser = InstanceSpec::parse_generated)]
    spec: InstanceSpec,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    instances: InstanceArgs,
    /// Solve first and export only the graph peeled with the best size.
    #[arg(long)]
    peel_with_best: bool,
    /// Peel with this bound before exporting.
    #[arg(long, value_name = "OMEGA", conflicts_with = "peel_with_best")]
    peel_omega: Option<usize>,
    /// Refuse programs with more non-edge constraints than this.
    #[arg(long, default_value_t = DEFAULT_LP_CAP)]
    cap: u128,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FetchArgs {
    name: String,
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
}

fn parse_from_str<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn seconds(value: f64, flag: &str) -> Result<Duration> {
    Duration::try_from_secs_f64(value).with_context(|| format!("{flag} must be a non-negative number"))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn campaign(instances: &InstanceArgs, solver: &SolverArgs, report: &ReportArgs) -> Result<CampaignConfig> {
    let specs = instances.specs();
    if specs.is_empty() {
        bail!("no instance given; use --in, --gen or --konect");
    }
    Ok(CampaignConfig {
        instances: specs,
        runs: report.runs,
        params: solver.params()?,
        jobs: report.jobs,
        cache_dir: report.cache_dir.clone().unwrap_or_else(default_cache_dir),
    })
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode> {
    let config = campaign(&args.instances, &args.solver, &args.report)?;
    let report = run_campaign(&config)?;
    let mut out = output(args.report.out.as_deref())?;
    out.write_all(report.render(args.report.emit)?.as_bytes())?;
    out.flush()?;
    for entry in &report.instances {
        if let mbbp::InstanceEntry::Failed { name, error } = entry {
            eprintln!("mbbp: {name}: {error}");
        }
    }
    Ok(if report.all_failed() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn cmd_variants(args: &VariantArgs) -> Result<ExitCode> {
    let config = campaign(&args.instances, &args.solver, &args.report)?;
    let report = run_variants(&config, args.study)?;
    let mut out = output(args.report.out.as_deref())?;
    out.write_all(report.render(args.report.emit)?.as_bytes())?;
    out.flush()?;
    let all_failed = report.variants.iter().all(|(_, c)| c.all_failed());
    Ok(if all_failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode> {
    let (g, meta) = args.spec.load(&default_cache_dir())?;
    let mut out = output(args.out.as_deref())?;
    writeln!(out, "c {}", meta.name)?;
    write_bip(&g, &mut out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(args: &ExportArgs) -> Result<ExitCode> {
    let specs = args.instances.specs();
    let [spec] = specs.as_slice() else {
        bail!("export-lp takes exactly one instance");
    };
    let cache = args.cache_dir.clone().unwrap_or_else(default_cache_dir);
    let (mut g, meta) = spec.load(&cache)?;
    let omega = if args.peel_with_best {
        let report = solve(&g, &args.solver.params()?)?;
        eprintln!("mbbp: {}: best balanced size {}", meta.name, report.omega);
        Some(report.omega)
    } else {
        args.peel_omega
    };
    if let Some(omega) = omega {
        let removed = peel(&mut g, omega);
        eprintln!("mbbp: peeling with {omega} removed {removed} vertices");
    }
    let mut out = output(args.out.as_deref())?;
    let summary = export_lp_with_cap(&g, &mut out, args.cap)?;
    eprintln!(
        "mbbp: wrote {} variables, {} pairwise constraints",
        summary.variables, summary.pairwise_constraints
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_fetch(args: &FetchArgs) -> Result<ExitCode> {
    let cache = args.cache_dir.clone().unwrap_or_else(default_cache_dir);
    let path = fetch_konect(&args.name, &cache)?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::ExportLp(a) => cmd_export(a),
        Command::Fetch(a) => cmd_fetch(a),
        Command::Variants(a) => cmd_variants(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mbbp: {e:#}");
            ExitCode::FAILURE
        }
    }
}
