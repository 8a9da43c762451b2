//! One epidemic season: discrete-time synchronous SIR with a single seed.
//!
//! Every infected node gets one step to transmit along each edge to a
//! susceptible, unvaccinated neighbor (independently, with probability
//! `beta`) and then recovers. Vaccinated nodes never change state and never
//! transmit. The season ends when no infected node is left.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::immunize::VaccinationSet;
use crate::net::{Network, NodeId};

/// Terminal label of a node after a season.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeState {
    Susceptible,
    Recovered,
    Vaccinated,
}

/// Transmission probability per edge per step. Recovery is certain after one
/// step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadParams {
    beta: f64,
}

impl SpreadParams {
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!("beta must lie in [0, 1], got {beta}")));
        }
        Ok(SpreadParams { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Always 1: infectious for exactly one step.
    pub fn mu(&self) -> f64 {
        1.0
    }
}

/// Compartment sizes at the start of a step (and once more at extinction).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Compartments {
    pub susceptible: usize,
    pub infected: usize,
    pub recovered: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicOutcome {
    states: Vec<NodeState>,
    seed: NodeId,
    duration: usize,
    trace: Vec<Compartments>,
}

impl EpidemicOutcome {
    /// Outcome with the given terminal labels and no step trace. The seed is
    /// taken to be the first recovered node (or node 0).
    pub fn from_labels(states: Vec<NodeState>) -> Self {
        let seed = states
            .iter()
            .position(|&s| s == NodeState::Recovered)
            .unwrap_or(0);
        EpidemicOutcome {
            states,
            seed,
            duration: 0,
            trace: Vec::new(),
        }
    }

    pub fn states(&self) -> &[NodeState] {
        &self.states
    }

    pub fn state(&self, u: NodeId) -> NodeState {
        self.states[u]
    }

    pub fn is_recovered(&self, u: NodeId) -> bool {
        self.states[u] == NodeState::Recovered
    }

    pub fn seed(&self) -> NodeId {
        self.seed
    }

    /// Number of steps until extinction.
    pub fn duration(&self) -> usize {
        self.duration
    }

    pub fn trace(&self) -> &[Compartments] {
        &self.trace
    }

    pub fn recovered_nodes(&self) -> Vec<NodeId> {
        (0..self.states.len()).filter(|&u| self.is_recovered(u)).collect()
    }

    pub fn recovered_count(&self) -> usize {
        self.states.iter().filter(|&&s| s == NodeState::Recovered).count()
    }

    /// Final epidemic size `r_∞`: recovered nodes over all `N` nodes.
    pub fn prevalence(&self) -> f64 {
        self.recovered_count() as f64 / self.states.len() as f64
    }
}

const SUSCEPTIBLE: u8 = 0;
const INFECTED: u8 = 1;
const RECOVERED: u8 = 2;
const VACCINATED: u8 = 3;

/// Runs one season from a seed drawn uniformly among unvaccinated nodes.
pub fn run_sir<R: Rng + ?Sized>(
    net: &Network,
    vaccinated: &VaccinationSet,
    params: SpreadParams,
    rng: &mut R,
) -> Result<EpidemicOutcome> {
    let n = net.node_count();
    let mask = vaccinated.mask(n);
    let unvaccinated = n - vaccinated.len();
    if unvaccinated == 0 {
        return Err(Error::NoSeed);
    }
    // Rejection sampling is uniform over the unvaccinated nodes.
    let seed = loop {
        let u = rng.gen_range(0..n);
        if !mask[u] {
            break u;
        }
    };
    Ok(spread(net, &mask, seed, params, rng))
}

/// Runs one season from a given seed.
pub fn run_sir_from_seed<R: Rng + ?Sized>(
    net: &Network,
    vaccinated: &VaccinationSet,
    seed: NodeId,
    params: SpreadParams,
    rng: &mut R,
) -> Result<EpidemicOutcome> {
    let mask = vaccinated.mask(net.node_count());
    if seed >= net.node_count() || mask[seed] {
        return Err(Error::InvalidParameter(format!(
            "seed {seed} is vaccinated or out of range"
        )));
    }
    Ok(spread(net, &mask, seed, params, rng))
}

fn spread<R: Rng + ?Sized>(
    net: &Network,
    vaccinated: &[bool],
    seed: NodeId,
    params: SpreadParams,
    rng: &mut R,
) -> EpidemicOutcome {
    let beta = params.beta();
    let mut state: Vec<u8> = vaccinated
        .iter()
        .map(|&v| if v { VACCINATED } else { SUSCEPTIBLE })
        .collect();
    let unvaccinated = state.iter().filter(|&&s| s == SUSCEPTIBLE).count();

    state[seed] = INFECTED;
    let mut infected = vec![seed];
    let mut next = Vec::new();
    let mut recovered = 0usize;
    let mut trace = vec![Compartments {
        susceptible: unvaccinated - 1,
        infected: 1,
        recovered: 0,
    }];
    let mut duration = 0;

    while !infected.is_empty() {
        // Only nodes infected at the start of the step transmit; a node
        // claimed earlier in the step is no longer susceptible, which is
        // the same as OR-ing independent attempts.
        for &u in &infected {
            for &w in net.neighbors(u) {
                if state[w] == SUSCEPTIBLE && rng.gen::<f64>() < beta {
                    state[w] = INFECTED;
                    next.push(w);
                }
            }
        }
        for &u in &infected {
            state[u] = RECOVERED;
        }
        recovered += infected.len();
        std::mem::swap(&mut infected, &mut next);
        next.clear();
        duration += 1;
        trace.push(Compartments {
            susceptible: unvaccinated - recovered - infected.len(),
            infected: infected.len(),
            recovered,
        });
    }

    let states = state
        .into_iter()
        .map(|s| match s {
            SUSCEPTIBLE => NodeState::Susceptible,
            RECOVERED => NodeState::Recovered,
            _ => NodeState::Vaccinated,
        })
        .collect();
    EpidemicOutcome {
        states,
        seed,
        duration,
        trace,
    }
}

/// Largest number of unvaccinated nodes accepted by
/// [`exact_outcome_distribution`].
pub const EXACT_LIMIT: usize = 12;

/// Exact law of the terminal recovered set, by expanding every seed and every
/// per-step infection pattern of the synchronous process.
///
/// Keys are sorted node lists.
pub fn exact_outcome_distribution(
    net: &Network,
    vaccinated: &VaccinationSet,
    params: SpreadParams,
) -> Result<BTreeMap<Vec<NodeId>, f64>> {
    let n = net.node_count();
    let mask = vaccinated.mask(n);
    let free: Vec<NodeId> = (0..n).filter(|&u| !mask[u]).collect();
    if free.is_empty() {
        return Err(Error::NoSeed);
    }
    if free.len() > EXACT_LIMIT {
        return Err(Error::Capacity {
            unvaccinated: free.len(),
            limit: EXACT_LIMIT,
        });
    }
    let mut local = vec![usize::MAX; n];
    for (i, &u) in free.iter().enumerate() {
        local[u] = i;
    }
    let neighbor_masks: Vec<u32> = free
        .iter()
        .map(|&u| {
            net.neighbors(u)
                .iter()
                .filter(|&&w| local[w] != usize::MAX)
                .fold(0u32, |m, &w| m | (1 << local[w]))
        })
        .collect();

    let everyone = (1u32 << free.len()) - 1;
    let mut finals: BTreeMap<u32, f64> = BTreeMap::new();
    let seed_prob = 1.0 / free.len() as f64;
    let expander = Expander {
        neighbor_masks: &neighbor_masks,
        beta: params.beta(),
    };
    for s in 0..free.len() {
        let seed = 1u32 << s;
        expander.expand(everyone & !seed, seed, 0, seed_prob, &mut finals);
    }

    Ok(finals
        .into_iter()
        .map(|(bits, p)| {
            let nodes = (0..free.len())
                .filter(|i| bits & (1 << i) != 0)
                .map(|i| free[i])
                .collect();
            (nodes, p)
        })
        .collect())
}

struct Expander<'a> {
    neighbor_masks: &'a [u32],
    beta: f64,
}

impl Expander<'_> {
    fn expand(&self, susceptible: u32, infected: u32, recovered: u32, prob: f64, out: &mut BTreeMap<u32, f64>) {
        if infected == 0 {
            *out.entry(recovered).or_default() += prob;
            return;
        }
        // susceptible nodes with at least one infected neighbor, and the
        // chance that at least one of those edges transmits
        let mut at_risk: Vec<(u32, f64)> = Vec::new();
        let mut bits = susceptible;
        while bits != 0 {
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            let exposures = (self.neighbor_masks[i as usize] & infected).count_ones();
            if exposures > 0 {
                let q = 1.0 - (1.0 - self.beta).powi(exposures as i32);
                at_risk.push((1 << i, q));
            }
        }
        let recovered = recovered | infected;
        for pattern in 0u32..(1 << at_risk.len()) {
            let mut p = prob;
            let mut newly = 0u32;
            for (j, &(bit, q)) in at_risk.iter().enumerate() {
                if pattern & (1 << j) != 0 {
                    p *= q;
                    newly |= bit;
                } else {
                    p *= 1.0 - q;
                }
            }
            if p > 0.0 {
                self.expand(susceptible & !newly, newly, recovered, p, out);
            }
        }
    }
}
