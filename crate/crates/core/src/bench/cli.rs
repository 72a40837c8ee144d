use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{Algorithm, ExperimentConfig, OutputFormat};
use super::experiment::run_experiment;
use super::report::{tail_report, write_csv, write_json};
use super::BenchError;

#[derive(Parser, Debug)]
#[command(name = "whp-bench", about = "Seeded trials of the work-efficient parallel primitives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Semisort generated or loaded records.
    Semisort(RunArgs),
    /// Integer sort with keys in [n].
    Intsort(RunArgs),
    /// Place records into slack targets; one target per distinct key.
    Placement(RunArgs),
    /// Culled balanced partition of a graph.
    Partition(RunArgs),
    /// Boosted maximal independent set.
    Mis(RunArgs),
    /// Boosted (Δ+1)-coloring.
    Color(RunArgs),
    /// Evaluate a tail bound, e.g. --param bound=geom_sum --param lambda=2 --param r=10.
    Bounds(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Input size; comma-separated list or 2^e allowed.
    #[arg(long)]
    n: Option<String>,
    /// Edge count of generated graphs.
    #[arg(long)]
    m: Option<String>,
    /// Piece count of the partition.
    #[arg(long)]
    k: Option<usize>,
    /// uniform | zipf:θ | all_equal | all_distinct
    #[arg(long)]
    dist: Option<String>,
    /// gnm | star | path | power_law
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Parameter override, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Flat key=value file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record file (PSRT) or graph file (edge list or PCSR).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Record wall-clock time per trial.
    #[arg(long)]
    wall_time: bool,
}

fn resolve(algorithm: Algorithm, a: RunArgs) -> Result<ExperimentConfig, BenchError> {
    let mut cfg = ExperimentConfig::new(algorithm);
    if let Some(path) = &a.config {
        for (k, v) in ExperimentConfig::load_file(path)? {
            cfg.set(&k, &v)?;
        }
    }
    let flags = [
        ("n", a.n),
        ("m", a.m),
        ("k", a.k.map(|k| k.to_string())),
        ("dist", a.dist),
        ("graph", a.graph),
        ("trials", a.trials.map(|t| t.to_string())),
        ("seed", a.seed.map(|s| s.to_string())),
        ("format", a.format),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, &v)?;
        }
    }
    if let Some(out) = a.out {
        cfg.out = Some(out);
    }
    if let Some(input) = a.input {
        cfg.input = Some(input);
    }
    cfg.wall_time |= a.wall_time;
    for p in &a.params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| BenchError::Config(format!("--param expects KEY=VALUE, got {p}")))?;
        cfg.set(k, v)?;
    }
    cfg.algorithm = algorithm;
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, body: impl FnOnce(&mut dyn Write) -> Result<(), BenchError>) -> Result<(), BenchError> {
    match &cfg.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            body(&mut w)?;
            w.flush().map_err(|e| BenchError::Io(e.to_string()))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)
        }
    }
}

fn run_bounds(cfg: &ExperimentConfig) -> Result<(), BenchError> {
    let bound = cfg.bound()?;
    let value = bound.eval().map_err(|e| BenchError::Config(e.to_string()))?;
    let log = bound.log_eval().map_err(|e| BenchError::Config(e.to_string()))?;
    let entries = cfg.entries();
    emit(cfg, |w| {
        let io = |e: io::Error| BenchError::Io(e.to_string());
        match cfg.format {
            OutputFormat::Csv => {
                for (k, v) in &entries {
                    writeln!(w, "# {k}={v}").map_err(io)?;
                }
                writeln!(w, "bound,value,log_value").map_err(io)?;
                writeln!(w, "{},{value:e},{log:e}", bound.name()).map_err(io)
            }
            OutputFormat::Json => {
                let v = serde_json::json!({ "config": bound, "value": value, "log_value": log });
                serde_json::to_writer_pretty(&mut *w, &v).map_err(|e| BenchError::Io(e.to_string()))?;
                writeln!(w).map_err(io)
            }
        }
    })
}

fn execute(cfg: &ExperimentConfig) -> Result<(), BenchError> {
    if cfg.algorithm == Algorithm::Bounds {
        return run_bounds(cfg);
    }
    let rows = run_experiment(cfg)?;
    let entries = cfg.entries();
    emit(cfg, |w| match cfg.format {
        OutputFormat::Csv => write_csv(w, &entries, &rows),
        OutputFormat::Json => write_json(w, &entries, &rows),
    })?;
    let summary = tail_report(&rows);
    let work = &summary.metrics[0];
    eprintln!(
        "{} trials, {} failed; work/elem max {:.3} mean {:.3}; slope {:.3} ({} -> {})",
        summary.trials, summary.failures, work.max, work.mean, summary.slope.ratio, summary.slope.n_small, summary.slope.n_large
    );
    for e in &summary.exceedance {
        eprintln!("attempts > {}: {:.5} of {} buckets (geometric tail {:.5})", e.j, e.empirical, e.buckets, e.geometric);
    }
    if let Some(r) = rows.iter().find(|r| !r.verified) {
        return Err(BenchError::Verification(format!("trial {} at n={}: {}", r.trial, r.n, if r.error.is_empty() { "verifier rejected output" } else { &r.error })));
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (algorithm, a) = match cli.command {
        Command::Semisort(a) => (Algorithm::Semisort, a),
        Command::Intsort(a) => (Algorithm::Intsort, a),
        Command::Placement(a) => (Algorithm::Placement, a),
        Command::Partition(a) => (Algorithm::Partition, a),
        Command::Mis(a) => (Algorithm::Mis, a),
        Command::Color(a) => (Algorithm::Color, a),
        Command::Bounds(a) => (Algorithm::Bounds, a),
    };
    match resolve(algorithm, a).and_then(|cfg| execute(&cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
