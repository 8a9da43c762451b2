//! Canned experiments with fixed desk-scale defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::config::NetworkSource;
use super::ensemble::{run_ensemble, EnsembleSpec};
use super::output::{emit_csv, write_recurrence_csv, write_table};
use super::threshold::{estimate_threshold, ThresholdSpec};
use crate::error::{Error, Result};
use crate::immunize::Strategy;
use crate::meanfield::{integrate_season_observed, run_meanfield_seasons, IntegrationSettings};
use crate::net::{DegreeDistribution, Network};

/// BA graph used by the desk-scale strategy and recurrence presets.
pub const DESK_NETWORK: NetworkSource = NetworkSource::Ba { n: 1000, m: 8 };
/// Small BA graph of the theory-versus-simulation comparison.
pub const SMALL_NETWORK: NetworkSource = NetworkSource::Ba { n: 100, m: 2 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Mean-field versus Monte Carlo prevalence, plus class trajectories.
    Fig2,
    /// The four strategies side by side.
    Fig3,
    /// Recurrence, streak and repeat statistics of the dynamical strategy.
    Fig56,
    /// Prevalence against coverage, and thresholds against `β`.
    Fig7,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Fig2, Preset::Fig3, Preset::Fig56, Preset::Fig7];

    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig56 => "fig56",
            Preset::Fig7 => "fig7",
        }
    }

    fn default_network(&self) -> NetworkSource {
        match self {
            Preset::Fig2 => SMALL_NETWORK,
            _ => DESK_NETWORK,
        }
    }

    fn default_seasons(&self) -> usize {
        match self {
            Preset::Fig2 | Preset::Fig7 => 5,
            Preset::Fig3 | Preset::Fig56 => 10,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown preset {s:?}")))
    }
}

/// Knobs shared by all presets; `None` picks the preset's default.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetOptions {
    pub network: Option<NetworkSource>,
    pub replicas: usize,
    pub seasons: Option<usize>,
    pub beta: f64,
    pub v: f64,
    pub seed: u64,
    pub workers: Option<usize>,
    /// Coverage grid of the prevalence sweep.
    pub sweep: Vec<f64>,
    /// Infection rates of the prevalence sweep.
    pub sweep_betas: Vec<f64>,
    /// Infection rates of the threshold curve.
    pub threshold_betas: Vec<f64>,
    pub threshold_replicas: usize,
    pub threshold_tolerance: f64,
}

impl Default for PresetOptions {
    fn default() -> Self {
        PresetOptions {
            network: None,
            replicas: 100,
            seasons: None,
            beta: 0.1,
            v: 0.1,
            seed: 1,
            workers: None,
            sweep: (0..=10).map(|i| i as f64 * 0.05).collect(),
            sweep_betas: vec![0.10, 0.05, 0.02],
            threshold_betas: vec![0.02, 0.04, 0.06, 0.08, 0.10],
            threshold_replicas: 50,
            threshold_tolerance: 0.01,
        }
    }
}

impl PresetOptions {
    fn spec(&self, strategy: Strategy, beta: f64, v: f64, seasons: usize) -> EnsembleSpec {
        EnsembleSpec {
            strategy,
            beta,
            v,
            seasons,
            replicas: self.replicas,
            seed: self.seed,
            workers: self.workers,
            profiles: true,
        }
    }
}

/// Runs `preset` and writes its CSV files into `dir`, returning their paths.
pub fn run_preset(preset: Preset, opts: &PresetOptions, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let source = opts.network.clone().unwrap_or_else(|| preset.default_network());
    let net = source.load(opts.seed)?;
    let seasons = opts.seasons.unwrap_or_else(|| preset.default_seasons());
    match preset {
        Preset::Fig2 => fig2(&net, opts, seasons, dir),
        Preset::Fig3 => fig3(&net, opts, seasons, dir),
        Preset::Fig56 => fig56(&net, opts, seasons, dir),
        Preset::Fig7 => fig7(&net, opts, seasons, dir),
    }
}

/// Degree class closest to `k` (the smaller one on ties).
fn nearest_class(dist: &DegreeDistribution, k: usize) -> usize {
    dist.degrees()
        .enumerate()
        .min_by_key(|&(_, d)| d.abs_diff(k))
        .map(|(idx, _)| idx)
        .unwrap_or(0)
}

fn fig2(net: &Network, opts: &PresetOptions, seasons: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    let report = run_ensemble(net, &opts.spec(Strategy::Dynamical, opts.beta, opts.v, seasons))?;
    let dist = DegreeDistribution::from_network(net)?;
    let i0 = 1.0 / net.node_count() as f64;
    let settings = IntegrationSettings::default();
    let series = run_meanfield_seasons(&dist, opts.beta, opts.v, i0, seasons, settings)?;

    let mut paths = Vec::new();
    let path = dir.join("fig2_simulation.csv");
    emit_csv(&report, &path)?;
    paths.push(path);

    let rows: Vec<Vec<String>> = report
        .seasons
        .iter()
        .zip(&series.prevalence)
        .map(|(agg, mf)| {
            vec![agg.season.to_string(), mf.to_string(), agg.r_inf_mean.to_string(), agg.r_inf_stderr.to_string()]
        })
        .collect();
    let path = dir.join("fig2_theory.csv");
    write_table(&path, &["season", "r_inf_meanfield", "r_inf_mean", "r_inf_stderr"], &rows)?;
    paths.push(path);

    // class trajectories of the first and last season, sampled every 0.1
    let degrees: Vec<usize> = dist.degrees().collect();
    let low = nearest_class(&dist, 2);
    let high = nearest_class(&dist, 20);
    let mut rows = Vec::new();
    for season in [1, seasons] {
        let profile = &series.profiles[season - 1];
        let mut step = 0usize;
        integrate_season_observed(&dist, profile, opts.beta, i0, settings, |state| {
            if step % 10 == 0 {
                rows.push(vec![
                    season.to_string(),
                    state.t.to_string(),
                    degrees[low].to_string(),
                    state.r[low].to_string(),
                    degrees[high].to_string(),
                    state.r[high].to_string(),
                ]);
            }
            step += 1;
        })?;
        if seasons == 1 {
            break;
        }
    }
    let path = dir.join("fig2_classes.csv");
    write_table(&path, &["season", "t", "k_low", "r_k_low", "k_high", "r_k_high"], &rows)?;
    paths.push(path);
    Ok(paths)
}

fn fig3(net: &Network, opts: &PresetOptions, seasons: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    Strategy::ALL
        .into_iter()
        .map(|strategy| {
            let report = run_ensemble(net, &opts.spec(strategy, opts.beta, opts.v, seasons))?;
            let path = dir.join(format!("fig3_{strategy}.csv"));
            emit_csv(&report, &path)?;
            Ok(path)
        })
        .collect()
}

fn fig56(net: &Network, opts: &PresetOptions, seasons: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    let report = run_ensemble(net, &opts.spec(Strategy::Dynamical, opts.beta, opts.v, seasons))?;
    let seasons_path = dir.join("fig56_seasons.csv");
    emit_csv(&report, &seasons_path)?;
    let window_path = dir.join("fig56_window.csv");
    write_recurrence_csv(&report, std::io::BufWriter::new(std::fs::File::create(&window_path)?))?;
    Ok(vec![seasons_path, window_path])
}

fn fig7(net: &Network, opts: &PresetOptions, seasons: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut rows = Vec::new();
    for &beta in &opts.sweep_betas {
        for &v in &opts.sweep {
            let mut spec = opts.spec(Strategy::Dynamical, beta, v, seasons);
            spec.profiles = false;
            let report = run_ensemble(net, &spec)?;
            let last = &report.seasons[seasons - 1];
            rows.push(vec![
                beta.to_string(),
                v.to_string(),
                last.r_inf_mean.to_string(),
                last.r_inf_stderr.to_string(),
            ]);
        }
    }
    let sweep_path = dir.join("fig7_sweep.csv");
    write_table(&sweep_path, &["beta", "v", "r_inf_mean", "r_inf_stderr"], &rows)?;

    let mut rows = Vec::new();
    for strategy in [Strategy::Dynamical, Strategy::Uniform] {
        for &beta in &opts.threshold_betas {
            let est = estimate_threshold(
                net,
                &ThresholdSpec {
                    seasons,
                    tolerance: opts.threshold_tolerance,
                    replicas: opts.threshold_replicas,
                    seed: opts.seed,
                    workers: opts.workers,
                    ..ThresholdSpec::new(strategy, beta)
                },
            )?;
            rows.push(vec![
                strategy.to_string(),
                beta.to_string(),
                est.estimate.to_string(),
                est.lower.to_string(),
                est.upper.to_string(),
                est.saturated.to_string(),
            ]);
        }
    }
    let threshold_path = dir.join("fig7_threshold.csv");
    write_table(
        &threshold_path,
        &["strategy", "beta", "v_c", "lower", "upper", "saturated"],
        &rows,
    )?;
    Ok(vec![sweep_path, threshold_path])
}
