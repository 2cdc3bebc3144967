use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use randpoly::pipeline::{
    self, format_table, preset, preset_names, run_table, write_table_csv, Parallelism,
    PipelineError, RunConfig,
};
use randpoly::{DistributionKind, Seed};

#[derive(Parser)]
#[command(name = "randpoly", version, about = "f-vectors of random polytopes versus the Gaussian")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate N random polytopes and write their f-vectors as CSV.
    Generate(GenerateArgs),
    /// Whiten a dataset and compute D_K; writes a JSON summary.
    Analyze(AnalyzeArgs),
    /// Write histogram and whitened-scatter CSVs for a dataset.
    Report(ReportArgs),
    /// Run a list of experiments and print the aggregated table.
    Table(TableArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// cube | l1ball | l2ball | gaussian | halfball
    #[arg(long)]
    dist: DistributionKind,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long = "N")]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: $RANDPOLY_THREADS or one per core)
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 3)]
    max_resamples: u32,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "M", default_value_t = 100_000)]
    directions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    summary: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct TableSource {
    /// Built-in preset, e.g. paper-table-1-scaled
    #[arg(long)]
    preset: Option<String>,
    /// JSON file holding one config or a list of configs
    #[arg(long)]
    config: Option<PathBuf>,
    /// List the built-in presets
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    source: TableSource,
    /// Directory for per-row datasets and summaries
    #[arg(long, default_value = "table-runs")]
    work_dir: PathBuf,
    /// Aggregated table CSV (default: <work-dir>/table.csv)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

fn parallelism(threads: Option<usize>) -> Parallelism {
    threads.map_or(Parallelism::Auto, Parallelism::Threads)
}

fn install_threads(threads: Option<usize>) {
    let count = parallelism(threads).resolve();
    // Only fails if a global pool already exists.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(count).build_global();
}

fn load_configs(path: &PathBuf) -> Result<Vec<RunConfig>, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.clone(),
        source: e,
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| PipelineError::Validation(format!("{}: {e}", path.display())))?;
    let parsed = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|c| vec![c])
    };
    parsed.map_err(|e| PipelineError::Validation(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Generate(a) => {
            let config = RunConfig {
                seed: Seed(a.seed),
                parallelism: parallelism(a.threads),
                max_resamples: a.max_resamples,
                ..RunConfig::new(a.dist, a.d, a.n, a.replicates)
            };
            let sim = pipeline::generate(&config, &a.out)?;
            println!(
                "{} rows -> {} ({} resamples, {:.2}s)",
                sim.fvectors.len(),
                a.out.display(),
                sim.resample_count,
                sim.wall_time
            );
        }
        Command::Analyze(a) => {
            if !(a.rel_tol > 0.0 && a.rel_tol < 1.0) {
                return Err(PipelineError::Validation(format!(
                    "--rel-tol must be in (0, 1), got {}",
                    a.rel_tol
                )));
            }
            install_threads(a.threads);
            let s = pipeline::analyze(&a.input, a.directions, Seed(a.seed), a.rel_tol, Some(&a.out))?;
            println!(
                "N={} d={} p={} D_K={:.6} (M={}) -> {}",
                s.samples,
                s.d,
                s.p,
                s.d_k,
                s.directions,
                a.out.display()
            );
        }
        Command::Report(a) => {
            let files = pipeline::report(&a.input, &a.summary, &a.out_dir)?;
            println!(
                "{} histograms, scatter {} -> {}",
                files.histograms.len(),
                files.scatter.display(),
                a.out_dir.display()
            );
        }
        Command::Table(a) => {
            if a.source.list {
                for name in preset_names() {
                    println!("{name}");
                }
                return Ok(());
            }
            let configs: Vec<(RunConfig, Option<f64>)> = match (&a.source.preset, &a.source.config) {
                (Some(name), _) => preset(name)
                    .ok_or_else(|| {
                        PipelineError::Validation(format!(
                            "unknown preset {name:?}; available: {}",
                            preset_names().join(", ")
                        ))
                    })?
                    .rows
                    .into_iter()
                    .map(|r| (r.config, Some(r.reference.3)))
                    .collect(),
                (None, Some(path)) => load_configs(path)?.into_iter().map(|c| (c, None)).collect(),
                (None, None) => unreachable!("clap enforces one source"),
            };
            let configs: Vec<_> = configs
                .into_iter()
                .map(|(mut c, r)| {
                    if a.threads.is_some() {
                        c.parallelism = parallelism(a.threads);
                    }
                    (c, r)
                })
                .collect();
            install_threads(a.threads);
            let rows = run_table(&configs, &a.work_dir)?;
            let out = a.out.unwrap_or_else(|| a.work_dir.join("table.csv"));
            if !rows.is_empty() || a.work_dir.exists() {
                write_table_csv(&out, &rows)?;
            }
            print!("{}", format_table(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
