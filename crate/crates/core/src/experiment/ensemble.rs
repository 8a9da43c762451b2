use rayon::prelude::*;

use super::config::{replica_rng, ExperimentConfig};
use crate::error::{Error, Result};
use crate::immunize::{run_seasons, Strategy};
use crate::metrics::{recurrence_report, ProfileContext, RecurrenceReport, StructuralProfile};
use crate::net::Network;
use crate::sir::SpreadParams;

/// What to run on an already-loaded network.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub strategy: Strategy,
    pub beta: f64,
    pub v: f64,
    pub seasons: usize,
    pub replicas: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub profiles: bool,
}

impl From<&ExperimentConfig> for EnsembleSpec {
    fn from(c: &ExperimentConfig) -> Self {
        EnsembleSpec {
            strategy: c.strategy,
            beta: c.beta,
            v: c.v,
            seasons: c.seasons,
            replicas: c.replicas,
            seed: c.seed,
            workers: c.workers,
            profiles: c.profiles,
        }
    }
}

/// Per-replica results, indexed by season - 1 where applicable.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaSummary {
    pub replica: usize,
    pub recovered: Vec<usize>,
    pub prevalence: Vec<f64>,
    pub q1: Vec<Option<f64>>,
    pub q2: Vec<Option<f64>>,
    /// `(S, A_{S_max}(S))`; empty when fewer than 3 seasons ran.
    pub streak: Vec<(usize, f64)>,
    /// `F_{S_max}(i)` at index `i - 1`; empty when fewer than 3 seasons ran.
    pub repeat: Vec<f64>,
    pub profiles: Vec<Option<StructuralProfile>>,
}

/// Cross-replica means for one season. Optional columns are `None` when no
/// replica produced the statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonAggregate {
    pub season: usize,
    pub r_inf_mean: f64,
    pub r_inf_stderr: f64,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
    pub vacc_mean_degree: Option<f64>,
    pub vacc_mean_kshell: Option<f64>,
    pub vacc_mean_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub strategy: Strategy,
    pub beta: f64,
    pub v: f64,
    pub node_count: usize,
    pub seasons: Vec<SeasonAggregate>,
    pub replicas: Vec<ReplicaSummary>,
    pub baseline: Option<StructuralProfile>,
}

/// Sample mean and standard error of the mean (zero for one sample).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

impl EnsembleReport {
    /// Mean and standard error of `r_∞` in `season` (1-based).
    pub fn prevalence_stats(&self, season: usize) -> (f64, f64) {
        let values: Vec<f64> = self.replicas.iter().map(|r| r.prevalence[season - 1]).collect();
        mean_and_stderr(&values)
    }

    /// Mean and standard error of Q₁ in `season`.
    pub fn q1_stats(&self, season: usize) -> (f64, f64) {
        let values: Vec<f64> = self.replicas.iter().filter_map(|r| r.q1[season - 1]).collect();
        mean_and_stderr(&values)
    }

    /// `(S, mean, stderr)` of `A_{S_max}(S)` across replicas.
    pub fn streak_stats(&self) -> Vec<(usize, f64, f64)> {
        let Some(first) = self.replicas.first() else {
            return Vec::new();
        };
        (0..first.streak.len())
            .map(|j| {
                let vals: Vec<f64> = self.replicas.iter().map(|r| r.streak[j].1).collect();
                let (m, se) = mean_and_stderr(&vals);
                (first.streak[j].0, m, se)
            })
            .collect()
    }

    /// `(i, mean, stderr)` of `F_{S_max}(i)` across replicas.
    pub fn repeat_stats(&self) -> Vec<(usize, f64, f64)> {
        let Some(first) = self.replicas.first() else {
            return Vec::new();
        };
        (0..first.repeat.len())
            .map(|j| {
                let vals: Vec<f64> = self.replicas.iter().map(|r| r.repeat[j]).collect();
                let (m, se) = mean_and_stderr(&vals);
                (j + 1, m, se)
            })
            .collect()
    }
}

fn run_replica(
    net: &Network,
    spec: &EnsembleSpec,
    params: SpreadParams,
    profiler: Option<&ProfileContext<'_>>,
    replica: usize,
) -> Result<ReplicaSummary> {
    let mut rng = replica_rng(spec.seed, replica);
    let mut history = run_seasons(net, spec.strategy, params, spec.v, spec.seasons, &mut rng)?;
    history.config.seed = Some(spec.seed);
    let sets = history.vaccination_sets();
    // with nothing vaccinated the overlap ratios are undefined
    let report = if sets[0].is_empty() {
        RecurrenceReport { q1: Vec::new(), q2: Vec::new(), a_streak: Vec::new(), f_repeat: Vec::new(), upto: spec.seasons }
    } else {
        recurrence_report(&sets, spec.seasons)?
    };

    let mut q1 = vec![None; spec.seasons];
    for &(s, q) in &report.q1 {
        q1[s - 1] = Some(q);
    }
    let mut q2 = vec![None; spec.seasons];
    for &(s, q) in &report.q2 {
        q2[s - 1] = Some(q);
    }
    let profiles = match profiler {
        Some(ctx) => sets
            .iter()
            .map(|set| if set.len() >= 2 { ctx.profile(set.members()).map(Some) } else { Ok(None) })
            .collect::<Result<Vec<_>>>()?,
        None => vec![None; spec.seasons],
    };
    Ok(ReplicaSummary {
        replica,
        recovered: history.records.iter().map(|r| r.outcome.recovered_count()).collect(),
        prevalence: history.prevalences(),
        q1,
        q2,
        streak: report.a_streak,
        repeat: report.f_repeat,
        profiles,
    })
}

/// Runs `spec.replicas` independent season histories on `net`.
///
/// Replica `i` draws from its own stream of the master seed, so results do
/// not depend on the worker count or completion order.
pub fn run_ensemble(net: &Network, spec: &EnsembleSpec) -> Result<EnsembleReport> {
    let params = SpreadParams::new(spec.beta)?;
    if spec.replicas == 0 || spec.seasons == 0 {
        return Err(Error::InvalidParameter("replicas and seasons must be positive".into()));
    }
    let profiler = if spec.profiles { Some(ProfileContext::new(net)?) } else { None };
    let job = || {
        (0..spec.replicas)
            .into_par_iter()
            .map(|i| {
                run_replica(net, spec, params, profiler.as_ref(), i).map_err(|e| Error::Replica {
                    replica: i,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    let replicas = match spec.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(job)?,
        None => job()?,
    };
    Ok(aggregate(net.node_count(), spec, replicas, profiler.map(|p| p.baseline())))
}

pub(crate) fn aggregate(
    node_count: usize,
    spec: &EnsembleSpec,
    replicas: Vec<ReplicaSummary>,
    baseline: Option<StructuralProfile>,
) -> EnsembleReport {
    let seasons = if replicas.is_empty() { 0 } else { spec.seasons };
    let aggregates = (0..seasons)
        .map(|j| {
            let values: Vec<f64> = replicas.iter().map(|r| r.prevalence[j]).collect();
            let (_, stderr) = mean_and_stderr(&values);
            // integer totals keep the mean exact when every replica agrees
            let total: usize = replicas.iter().map(|r| r.recovered[j]).sum();
            let mean = total as f64 / (replicas.len() * node_count) as f64;
            SeasonAggregate {
                season: j + 1,
                r_inf_mean: mean,
                r_inf_stderr: stderr,
                q1: mean_of(replicas.iter().map(|r| r.q1[j])),
                q2: mean_of(replicas.iter().map(|r| r.q2[j])),
                vacc_mean_degree: mean_of(replicas.iter().map(|r| r.profiles[j].map(|p| p.mean_degree))),
                vacc_mean_kshell: mean_of(replicas.iter().map(|r| r.profiles[j].map(|p| p.mean_kshell))),
                vacc_mean_distance: mean_of(replicas.iter().map(|r| r.profiles[j].map(|p| p.mean_distance))),
            }
        })
        .collect();
    EnsembleReport {
        strategy: spec.strategy,
        beta: spec.beta,
        v: spec.v,
        node_count,
        seasons: aggregates,
        replicas,
        baseline,
    }
}

/// Loads the configured network and runs the ensemble on it.
pub fn run_ensemble_config(config: &ExperimentConfig) -> Result<(Network, EnsembleReport)> {
    config.validate()?;
    let net = config.network.load(config.seed)?;
    let report = run_ensemble(&net, &EnsembleSpec::from(config))?;
    Ok((net, report))
}
