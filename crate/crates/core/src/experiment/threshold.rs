use super::ensemble::{run_ensemble, EnsembleSpec};
use crate::error::{Error, Result};
use crate::immunize::Strategy;
use crate::net::Network;

/// Settings for the Monte Carlo threshold search.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSpec {
    pub strategy: Strategy,
    pub beta: f64,
    /// The criterion is read off this season.
    pub seasons: usize,
    /// Mean prevalence below which a coverage counts as suppressing.
    pub criterion: f64,
    /// Largest coverage probed.
    pub v_max: f64,
    /// Bisection stops once the bracket is at most this wide.
    pub tolerance: f64,
    pub replicas: usize,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl ThresholdSpec {
    pub fn new(strategy: Strategy, beta: f64) -> Self {
        ThresholdSpec {
            strategy,
            beta,
            seasons: 5,
            criterion: 0.005,
            v_max: 0.99,
            tolerance: 0.01,
            replicas: 50,
            seed: 1,
            workers: None,
        }
    }
}

/// One evaluated coverage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub v: f64,
    pub prevalence: f64,
    pub meets: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    /// Smallest probed coverage meeting the criterion (`v_max` if saturated).
    pub estimate: f64,
    /// Largest probed coverage failing the criterion, or 0.
    pub lower: f64,
    pub upper: f64,
    /// The criterion was not met even at `v_max`.
    pub saturated: bool,
    /// Probes in evaluation order.
    pub probes: Vec<Probe>,
}

/// Bisects on `v` for the smallest coverage whose ensemble-mean prevalence in
/// the final season drops below the criterion.
///
/// Every probe reuses the same master seed, so neighbouring coverages are
/// compared on common random numbers.
pub fn estimate_threshold(net: &Network, spec: &ThresholdSpec) -> Result<ThresholdEstimate> {
    if !(spec.tolerance > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    if !(0.0..1.0).contains(&spec.v_max) {
        return Err(Error::InvalidParameter(format!("v_max must lie in [0, 1), got {}", spec.v_max)));
    }
    let mut probes = Vec::new();
    let mut probe = |v: f64| -> Result<bool> {
        let report = run_ensemble(
            net,
            &EnsembleSpec {
                strategy: spec.strategy,
                beta: spec.beta,
                v,
                seasons: spec.seasons,
                replicas: spec.replicas,
                seed: spec.seed,
                workers: spec.workers,
                profiles: false,
            },
        )?;
        let prevalence = report.seasons[spec.seasons - 1].r_inf_mean;
        let meets = prevalence < spec.criterion;
        probes.push(Probe { v, prevalence, meets });
        Ok(meets)
    };

    if probe(0.0)? {
        return Ok(ThresholdEstimate { estimate: 0.0, lower: 0.0, upper: 0.0, saturated: false, probes });
    }
    if !probe(spec.v_max)? {
        return Ok(ThresholdEstimate {
            estimate: spec.v_max,
            lower: spec.v_max,
            upper: spec.v_max,
            saturated: true,
            probes,
        });
    }
    let (mut lo, mut hi) = (0.0, spec.v_max);
    while hi - lo > spec.tolerance {
        let mid = 0.5 * (lo + hi);
        if probe(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdEstimate { estimate: hi, lower: lo, upper: hi, saturated: false, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::generate_ba;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_beta_needs_no_vaccination() {
        let g = generate_ba(300, 2, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let est = estimate_threshold(&g, &ThresholdSpec { replicas: 5, ..ThresholdSpec::new(Strategy::Uniform, 0.0) })
            .unwrap();
        assert_eq!(est.estimate, 0.0);
        assert!(!est.saturated);
        assert_eq!(est.probes.len(), 1);
    }

    #[test]
    fn bracket_is_consistent() {
        let g = generate_ba(300, 3, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let spec = ThresholdSpec { replicas: 10, tolerance: 0.02, ..ThresholdSpec::new(Strategy::Uniform, 0.4) };
        let est = estimate_threshold(&g, &spec).unwrap();
        assert!(!est.saturated);
        assert!(est.upper - est.lower <= spec.tolerance);
        assert_eq!(est.estimate, est.upper);
        for p in &est.probes {
            if p.v == est.upper {
                assert!(p.meets);
            }
            if p.v == est.lower && est.lower > 0.0 {
                assert!(!p.meets);
            }
        }
    }

    #[test]
    fn unreachable_criterion_saturates() {
        let g = generate_ba(300, 3, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        // prevalence is at least 1/N = 0.0033, never below 0.001
        let spec = ThresholdSpec { replicas: 3, criterion: 0.001, ..ThresholdSpec::new(Strategy::Uniform, 0.5) };
        let est = estimate_threshold(&g, &spec).unwrap();
        assert!(est.saturated);
        assert_eq!(est.estimate, 0.99);
    }
}
