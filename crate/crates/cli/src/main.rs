use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use seasonal_immunization::experiment::{
    emit_csv, estimate_threshold, network_rng, run_ensemble_config, run_preset, workers_from_env, write_csv,
    ExperimentConfig, NetworkSource, Preset, PresetOptions, ThresholdSpec,
};
use seasonal_immunization::meanfield::uniform_threshold;
use seasonal_immunization::net::{degree_stats, generate_ba, write_edge_list};
use seasonal_immunization::{Error, Strategy};

#[derive(Parser, Debug)]
#[command(name = "seasonal-imm", version, about = "Seasonal SIR immunization experiments on networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a replica ensemble and write the per-season CSV report.
    Run(RunArgs),
    /// Search for the coverage that suppresses the epidemic.
    Threshold(ThresholdArgs),
    /// Generate a Barabási–Albert graph as an edge list.
    GenBa(GenBaArgs),
    /// Print size, degree moments and the analytic uniform threshold.
    Stats(StatsArgs),
    /// Mean-field versus simulation on the small BA graph.
    Fig2(PresetArgs),
    /// Strategy comparison.
    Fig3(PresetArgs),
    /// Recurrence, streak and repeat statistics.
    Fig56(PresetArgs),
    /// Prevalence sweep over coverage and thresholds over infection rate.
    Fig7(PresetArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `ba:N:M` or an edge-list path.
    #[arg(long)]
    network: Option<String>,
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    seasons: Option<usize>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip the vaccinated-set structural profiles.
    #[arg(long)]
    no_profiles: bool,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    strategy: Strategy,
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    network: Option<String>,
    #[arg(long, default_value_t = 50)]
    replicas: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 5)]
    seasons: usize,
    /// JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenBaArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Edge-list destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    network: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct PresetArgs {
    /// Directory receiving the CSV files.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    network: Option<String>,
    #[arg(long, default_value_t = 100)]
    replicas: usize,
    #[arg(long)]
    seasons: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 0.1)]
    v: f64,
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(args: RunArgs) -> Result<(), Error> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = args.network {
        config.network = n.parse()?;
    }
    if let Some(s) = args.strategy {
        config.strategy = s;
    }
    if let Some(b) = args.beta {
        config.beta = b;
    }
    if let Some(v) = args.v {
        config.v = v;
    }
    if let Some(s) = args.seasons {
        config.seasons = s;
    }
    if let Some(r) = args.replicas {
        config.replicas = r;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if args.out.is_some() {
        config.out = args.out;
    }
    if args.no_profiles {
        config.profiles = false;
    }
    if let Some(w) = workers_from_env()? {
        config.workers = Some(w);
    }
    let (_, report) = run_ensemble_config(&config)?;
    match &config.out {
        Some(path) => emit_csv(&report, path),
        None => write_csv(&report, io::stdout().lock()),
    }
}

fn threshold(args: ThresholdArgs) -> Result<(), Error> {
    let base = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let source: NetworkSource = match &args.network {
        Some(n) => n.parse()?,
        None => base.network.clone(),
    };
    let seed = args.seed.unwrap_or(base.seed);
    if !(args.beta > 0.0 && args.beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {}", args.beta)));
    }
    let net = source.load(seed)?;
    let spec = ThresholdSpec {
        seasons: args.seasons,
        tolerance: args.tol,
        replicas: args.replicas,
        seed,
        workers: workers_from_env()?.or(base.workers),
        ..ThresholdSpec::new(args.strategy, args.beta)
    };
    let est = estimate_threshold(&net, &spec)?;
    let probes: Vec<_> = est
        .probes
        .iter()
        .map(|p| json!({"v": p.v, "prevalence": p.prevalence, "meets": p.meets}))
        .collect();
    let doc = json!({
        "network": source.to_string(),
        "strategy": args.strategy.as_str(),
        "beta": args.beta,
        "v_c": est.estimate,
        "lower": est.lower,
        "upper": est.upper,
        "saturated": est.saturated,
        "probes": probes,
    });
    let mut out = output(args.out.as_ref())?;
    writeln!(out, "{doc}")?;
    out.flush()?;
    Ok(())
}

fn gen_ba(args: GenBaArgs) -> Result<(), Error> {
    let net = generate_ba(args.n, args.m, &mut network_rng(args.seed))?;
    let mut out = output(args.out.as_ref())?;
    write_edge_list(&net, &mut out)?;
    out.flush()?;
    Ok(())
}

fn stats(args: StatsArgs) -> Result<(), Error> {
    let source: NetworkSource = args.network.parse()?;
    let net = source.load(args.seed)?;
    let s = degree_stats(&net)?;
    let thresholds: Vec<_> = [0.1, 0.05]
        .into_iter()
        .map(|beta| {
            uniform_threshold(s.mean_degree, s.mean_sq_degree, beta).map(|t| json!({"beta": beta, "v_c": t.value}))
        })
        .collect::<Result<_, _>>()?;
    let doc = json!({
        "network": source.to_string(),
        "nodes": net.node_count(),
        "edges": net.edge_count(),
        "mean_degree": s.mean_degree,
        "mean_sq_degree": s.mean_sq_degree,
        "clustering": s.clustering,
        "uniform_threshold": thresholds,
    });
    println!("{doc}");
    Ok(())
}

fn preset(which: Preset, args: PresetArgs) -> Result<(), Error> {
    let opts = PresetOptions {
        network: args.network.map(|n| n.parse()).transpose()?,
        replicas: args.replicas,
        seasons: args.seasons,
        beta: args.beta,
        v: args.v,
        seed: args.seed,
        workers: workers_from_env()?,
        ..PresetOptions::default()
    };
    for path in run_preset(which, &opts, &args.out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let doc = json!({"error": {"kind": "usage", "message": e.to_string().trim()}});
            eprintln!("{doc}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Threshold(a) => threshold(a),
        Command::GenBa(a) => gen_ba(a),
        Command::Stats(a) => stats(a),
        Command::Fig2(a) => preset(Preset::Fig2, a),
        Command::Fig3(a) => preset(Preset::Fig3, a),
        Command::Fig56(a) => preset(Preset::Fig56, a),
        Command::Fig7(a) => preset(Preset::Fig7, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let doc = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            eprintln!("{doc}");
            ExitCode::FAILURE
        }
    }
}
