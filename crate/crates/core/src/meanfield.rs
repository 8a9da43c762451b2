//! Degree-class (heterogeneous) mean-field theory of seasonal immunization.
//!
//! Within a season every degree class `k` carries densities `s_k`, `i_k`,
//! `r_k` that evolve as
//!
//! ```text
//! ds_k/dt = -β (1 - v_k) k s_k Θ
//! di_k/dt =  β (1 - v_k) k s_k Θ - i_k
//! dr_k/dt =  i_k
//! Θ       =  Σ_k (k - 1) P(k) i_k / ⟨k⟩
//! ```
//!
//! Between seasons the vaccination profile `v_k` is moved toward classes
//! whose expected infection pressure `k p + r_k` was high, where `p` is the
//! prevalence seen at the end of a random edge.

use crate::error::{Error, Result};
use crate::net::DegreeDistribution;

/// Per-class densities at time `t`, aligned with the classes of the
/// distribution they were computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldState {
    pub t: f64,
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
}

impl MeanFieldState {
    fn initial(classes: usize, i0: f64) -> Self {
        MeanFieldState {
            t: 0.0,
            s: vec![1.0 - i0; classes],
            i: vec![i0; classes],
            r: vec![0.0; classes],
        }
    }

    /// Largest per-class deviation of `s_k + i_k + r_k` from 1.
    pub fn conservation_error(&self) -> f64 {
        self.s
            .iter()
            .zip(&self.i)
            .zip(&self.r)
            .map(|((s, i), r)| (s + i + r - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-class vaccination probabilities `v_k` with `Σ P(k) v_k = v`.
#[derive(Debug, Clone, PartialEq)]
pub struct VaccProfile {
    per_class: Vec<f64>,
    target: f64,
}

impl VaccProfile {
    pub fn uniform(dist: &DegreeDistribution, v: f64) -> Result<Self> {
        check_fraction(v)?;
        Ok(VaccProfile {
            per_class: vec![v; dist.len()],
            target: v,
        })
    }

    pub fn new(dist: &DegreeDistribution, per_class: Vec<f64>, target: f64) -> Result<Self> {
        if per_class.len() != dist.len() {
            return Err(Error::InvalidParameter(format!(
                "profile has {} classes, distribution has {}",
                per_class.len(),
                dist.len()
            )));
        }
        if per_class.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter("v_k must lie in [0, 1]".into()));
        }
        Ok(VaccProfile { per_class, target })
    }

    pub fn values(&self) -> &[f64] {
        &self.per_class
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    /// `Σ P(k) v_k`
    pub fn weighted_total(&self, dist: &DegreeDistribution) -> f64 {
        dist.probabilities()
            .zip(&self.per_class)
            .map(|(p, v)| p * v)
            .sum()
    }
}

fn check_fraction(v: f64) -> Result<()> {
    if !(0.0..1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("v must lie in [0, 1), got {v}")));
    }
    Ok(())
}

fn check_rate(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be a nonnegative rate, got {beta}")));
    }
    Ok(())
}

fn positive_mean(dist: &DegreeDistribution) -> Result<f64> {
    let mean = dist.mean();
    if mean > 0.0 {
        Ok(mean)
    } else {
        Err(Error::DegenerateDistribution("mean degree is zero".into()))
    }
}

/// Density of infected nodes at the end of a random edge, excluding the edge
/// it arrived along: `Θ = Σ (k-1) P(k) i_k / ⟨k⟩`.
pub fn theta(dist: &DegreeDistribution, infected: &[f64]) -> Result<f64> {
    let mean = positive_mean(dist)?;
    if infected.len() != dist.len() {
        return Err(Error::InvalidParameter("density vector does not match the distribution".into()));
    }
    Ok(theta_unchecked(dist, infected, mean))
}

fn theta_unchecked(dist: &DegreeDistribution, infected: &[f64], mean: f64) -> f64 {
    dist.classes()
        .iter()
        .zip(infected)
        .map(|(c, i)| (c.degree as f64 - 1.0) * c.probability * i)
        .sum::<f64>()
        / mean
}

/// Step size, horizon and extinction level for [`integrate_season`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    pub step: f64,
    pub horizon: f64,
    /// Integration stops once every `i_k` is below this.
    pub extinction: f64,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        IntegrationSettings {
            step: 0.01,
            horizon: 500.0,
            extinction: 1e-9,
        }
    }
}

/// Result of one integrated season.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonSolution {
    /// Final state; `state.r` holds `r_k(∞)`.
    pub state: MeanFieldState,
    /// False when the horizon was reached before extinction. The densities are
    /// still returned, but `r_k` may not be final.
    pub converged: bool,
    /// Worst `|s_k + i_k + r_k - 1|` seen along the trajectory.
    pub max_conservation_error: f64,
}

impl SeasonSolution {
    pub fn class_prevalence(&self) -> &[f64] {
        &self.state.r
    }

    /// `Σ P(k) r_k`
    pub fn prevalence(&self, dist: &DegreeDistribution) -> f64 {
        dist.probabilities().zip(&self.state.r).map(|(p, r)| p * r).sum()
    }
}

/// Integrates one season with fourth-order Runge–Kutta from
/// `s_k = 1 - i0`, `i_k = i0`, `r_k = 0`.
pub fn integrate_season(
    dist: &DegreeDistribution,
    profile: &VaccProfile,
    beta: f64,
    i0: f64,
    settings: IntegrationSettings,
) -> Result<SeasonSolution> {
    integrate_season_observed(dist, profile, beta, i0, settings, |_| {})
}

/// [`integrate_season`] that hands every accepted state (including the
/// initial one) to `observer`.
pub fn integrate_season_observed<F>(
    dist: &DegreeDistribution,
    profile: &VaccProfile,
    beta: f64,
    i0: f64,
    settings: IntegrationSettings,
    mut observer: F,
) -> Result<SeasonSolution>
where
    F: FnMut(&MeanFieldState),
{
    check_rate(beta)?;
    if !(i0 > 0.0 && i0 < 1.0) {
        return Err(Error::InvalidParameter(format!("i0 must lie in (0, 1), got {i0}")));
    }
    if !(settings.step > 0.0 && settings.horizon > 0.0) {
        return Err(Error::InvalidParameter("step and horizon must be positive".into()));
    }
    if profile.values().len() != dist.len() {
        return Err(Error::InvalidParameter("profile does not match the distribution".into()));
    }
    let mean = positive_mean(dist)?;
    let n = dist.len();
    // β (1 - v_k) k, the per-class force multiplier
    let rate: Vec<f64> = dist
        .degrees()
        .zip(profile.values())
        .map(|(k, v)| beta * (1.0 - v) * k as f64)
        .collect();
    let system = System { dist, rate: &rate, mean };

    let mut state = MeanFieldState::initial(n, i0);
    observer(&state);
    let mut max_err = state.conservation_error();
    let h = settings.step;
    let steps = (settings.horizon / h).ceil() as usize;
    let mut scratch = Rk4Scratch::new(n);
    let mut converged = state.i.iter().all(|&i| i < settings.extinction);

    for step in 1..=steps {
        if converged {
            break;
        }
        system.rk4_step(&mut state, h, &mut scratch);
        state.t = step as f64 * h;
        max_err = max_err.max(state.conservation_error());
        observer(&state);
        converged = state.i.iter().all(|&i| i < settings.extinction);
    }

    Ok(SeasonSolution {
        state,
        converged,
        max_conservation_error: max_err,
    })
}

struct System<'a> {
    dist: &'a DegreeDistribution,
    rate: &'a [f64],
    mean: f64,
}

struct Rk4Scratch {
    k: [Derivative; 4],
    tmp: MeanFieldState,
}

#[derive(Clone)]
struct Derivative {
    ds: Vec<f64>,
    di: Vec<f64>,
    dr: Vec<f64>,
}

impl Rk4Scratch {
    fn new(n: usize) -> Self {
        let zero = Derivative {
            ds: vec![0.0; n],
            di: vec![0.0; n],
            dr: vec![0.0; n],
        };
        Rk4Scratch {
            k: [zero.clone(), zero.clone(), zero.clone(), zero],
            tmp: MeanFieldState::initial(n, 0.0),
        }
    }
}

impl System<'_> {
    fn derivative(&self, s: &[f64], i: &[f64], out: &mut Derivative) {
        let theta = theta_unchecked(self.dist, i, self.mean);
        for k in 0..s.len() {
            let force = self.rate[k] * s[k] * theta;
            out.ds[k] = -force;
            out.di[k] = force - i[k];
            out.dr[k] = i[k];
        }
    }

    fn rk4_step(&self, y: &mut MeanFieldState, h: f64, scratch: &mut Rk4Scratch) {
        let n = y.s.len();
        let Rk4Scratch { k, tmp } = scratch;
        let [k1, k2, k3, k4] = k;

        self.derivative(&y.s, &y.i, k1);
        for j in 0..n {
            tmp.s[j] = y.s[j] + 0.5 * h * k1.ds[j];
            tmp.i[j] = y.i[j] + 0.5 * h * k1.di[j];
        }
        self.derivative(&tmp.s, &tmp.i, k2);
        for j in 0..n {
            tmp.s[j] = y.s[j] + 0.5 * h * k2.ds[j];
            tmp.i[j] = y.i[j] + 0.5 * h * k2.di[j];
        }
        self.derivative(&tmp.s, &tmp.i, k3);
        for j in 0..n {
            tmp.s[j] = y.s[j] + h * k3.ds[j];
            tmp.i[j] = y.i[j] + h * k3.di[j];
        }
        self.derivative(&tmp.s, &tmp.i, k4);
        let w = h / 6.0;
        for j in 0..n {
            y.s[j] += w * (k1.ds[j] + 2.0 * k2.ds[j] + 2.0 * k3.ds[j] + k4.ds[j]);
            y.i[j] += w * (k1.di[j] + 2.0 * k2.di[j] + 2.0 * k3.di[j] + k4.di[j]);
            y.r[j] += w * (k1.dr[j] + 2.0 * k2.dr[j] + 2.0 * k3.dr[j] + k4.dr[j]);
        }
    }
}

const PHI_TOL: f64 = 1e-12;
const PHI_MAX_ITER: usize = 100_000;
/// Converged roots below this are reported as the trivial root.
const PHI_ZERO: f64 = 1e-9;

/// Solves `φ = 1 - 1/⟨k⟩ - (1/⟨k⟩) Σ (k-1) P(k) exp(-β(1-v) k φ)` by
/// fixed-point iteration from `φ = 1`.
///
/// `damping` is the relaxation weight of the new iterate (1 = plain
/// iteration). The right-hand side is increasing and concave in `φ`, so the
/// plain iteration descends monotonically onto the largest root.
pub fn solve_phi(dist: &DegreeDistribution, beta: f64, v: f64, damping: f64) -> Result<f64> {
    check_rate(beta)?;
    check_fraction(v)?;
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::InvalidParameter(format!("damping must lie in (0, 1], got {damping}")));
    }
    let mean = positive_mean(dist)?;
    let lambda = beta * (1.0 - v);
    let rhs = |phi: f64| {
        let tail: f64 = dist
            .classes()
            .iter()
            .map(|c| {
                let k = c.degree as f64;
                (k - 1.0) * c.probability * (-lambda * k * phi).exp()
            })
            .sum();
        1.0 - 1.0 / mean - tail / mean
    };

    let mut phi = 1.0;
    for _ in 0..PHI_MAX_ITER {
        let next = (1.0 - damping) * phi + damping * rhs(phi);
        if (next - phi).abs() < PHI_TOL {
            return Ok(if next < PHI_ZERO { 0.0 } else { next.max(0.0) });
        }
        phi = next;
    }
    Err(Error::Numeric(format!(
        "φ iteration did not converge in {PHI_MAX_ITER} steps (last φ = {phi})"
    )))
}

/// Final size of the first (uniformly vaccinated) season in the limit of a
/// vanishing initial infection: `Σ P(k) (1 - exp(-β(1-v) k φ))`.
pub fn closed_form_prevalence(dist: &DegreeDistribution, beta: f64, v: f64) -> Result<f64> {
    let phi = solve_phi(dist, beta, v, 1.0)?;
    let lambda = beta * (1.0 - v);
    Ok(dist
        .classes()
        .iter()
        .map(|c| c.probability * (1.0 - (-lambda * c.degree as f64 * phi).exp()))
        .sum())
}

/// Critical uniform vaccination fraction `1 - ⟨k⟩ / (β (⟨k²⟩ - ⟨k⟩))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformThreshold {
    pub value: f64,
}

impl UniformThreshold {
    /// False when `value <= 0`: the epidemic is subcritical without any
    /// vaccination.
    pub fn immunization_needed(&self) -> bool {
        self.value > 0.0
    }
}

pub fn uniform_threshold(mean_k: f64, mean_k2: f64, beta: f64) -> Result<UniformThreshold> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    if !(mean_k > 0.0) {
        return Err(Error::InvalidParameter(format!("⟨k⟩ must be positive, got {mean_k}")));
    }
    let spread = mean_k2 - mean_k;
    if spread == 0.0 {
        return Err(Error::Division("⟨k²⟩ equals ⟨k⟩".into()));
    }
    if spread < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "⟨k²⟩ = {mean_k2} is smaller than ⟨k⟩ = {mean_k}"
        )));
    }
    Ok(UniformThreshold {
        value: 1.0 - mean_k / (beta * spread),
    })
}

/// Next-season profile, plus whether the degenerate all-zero input forced
/// the uniform fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileUpdate {
    pub profile: VaccProfile,
    pub fallback: bool,
}

/// Moves vaccination toward classes in proportion to `k p + r_k`, where
/// `p = Σ η(i) r_i` and `η(i) = i P(i) / ⟨k⟩`.
///
/// Classes whose share would exceed 1 are capped at 1 and the surplus is
/// spread proportionally over the remaining classes, keeping
/// `Σ P(k) v_k = v`.
pub fn update_vk(dist: &DegreeDistribution, class_prevalence: &[f64], v: f64) -> Result<ProfileUpdate> {
    check_fraction(v)?;
    if class_prevalence.len() != dist.len() {
        return Err(Error::InvalidParameter("r_k vector does not match the distribution".into()));
    }
    if class_prevalence.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(Error::InvalidParameter("r_k must lie in [0, 1]".into()));
    }
    let eta = dist.edge_end_weights()?;
    let p: f64 = eta.iter().zip(class_prevalence).map(|(e, r)| e * r).sum();
    let weight: Vec<f64> = dist
        .degrees()
        .zip(class_prevalence)
        .map(|(k, r)| k as f64 * p + r)
        .collect();
    let probs: Vec<f64> = dist.probabilities().collect();
    let norm: f64 = weight.iter().zip(&probs).map(|(w, p)| w * p).sum();
    if norm <= 0.0 {
        return Ok(ProfileUpdate {
            profile: VaccProfile::uniform(dist, v)?,
            fallback: true,
        });
    }

    let n = dist.len();
    let mut values = vec![0.0; n];
    let mut capped = vec![false; n];
    loop {
        let capped_mass: f64 = (0..n).filter(|&j| capped[j]).map(|j| probs[j]).sum();
        let remaining = (v - capped_mass).max(0.0);
        let free_weight: f64 = (0..n).filter(|&j| !capped[j]).map(|j| weight[j] * probs[j]).sum();
        let free_mass: f64 = (0..n).filter(|&j| !capped[j]).map(|j| probs[j]).sum();
        let mut newly = false;
        for j in 0..n {
            if capped[j] {
                values[j] = 1.0;
                continue;
            }
            values[j] = if free_weight > 0.0 {
                weight[j] * remaining / free_weight
            } else {
                // only zero-weight classes are left to absorb the rest
                remaining / free_mass
            };
            if values[j] > 1.0 {
                capped[j] = true;
                newly = true;
            }
        }
        if !newly {
            break;
        }
    }
    Ok(ProfileUpdate {
        profile: VaccProfile {
            per_class: values,
            target: v,
        },
        fallback: false,
    })
}

/// Mean-field season series.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldSeries {
    /// `r_∞^{(S)} = Σ P(k) r_k^{(S)}` for S = 1, 2, ...
    pub prevalence: Vec<f64>,
    /// `r_k^{(S)}` per season.
    pub class_prevalence: Vec<Vec<f64>>,
    /// `v_k^{(S)}` per season.
    pub profiles: Vec<VaccProfile>,
    /// Seasons whose integration hit the horizon.
    pub unconverged: Vec<usize>,
    /// Seasons whose profile came from the uniform fallback.
    pub fallbacks: Vec<usize>,
}

/// Season 1 uses `v_k = v`; each later season integrates with the profile
/// derived from the previous season's `r_k`.
pub fn run_meanfield_seasons(
    dist: &DegreeDistribution,
    beta: f64,
    v: f64,
    i0: f64,
    seasons: usize,
    settings: IntegrationSettings,
) -> Result<MeanFieldSeries> {
    if seasons == 0 {
        return Err(Error::InvalidParameter("at least one season is required".into()));
    }
    let mut series = MeanFieldSeries {
        prevalence: Vec::with_capacity(seasons),
        class_prevalence: Vec::with_capacity(seasons),
        profiles: Vec::with_capacity(seasons),
        unconverged: Vec::new(),
        fallbacks: Vec::new(),
    };
    let mut profile = VaccProfile::uniform(dist, v)?;
    for season in 1..=seasons {
        let solution = integrate_season(dist, &profile, beta, i0, settings)?;
        if !solution.converged {
            series.unconverged.push(season);
        }
        series.prevalence.push(solution.prevalence(dist));
        let r_k = solution.state.r;
        let update = update_vk(dist, &clamp_unit(&r_k), v)?;
        if update.fallback && season < seasons {
            series.fallbacks.push(season + 1);
        }
        series.profiles.push(std::mem::replace(&mut profile, update.profile));
        series.class_prevalence.push(r_k);
    }
    Ok(series)
}

/// Rounding can leave densities a hair outside [0, 1].
fn clamp_unit(values: &[f64]) -> Vec<f64> {
    values.iter().map(|x| x.clamp(0.0, 1.0)).collect()
}
