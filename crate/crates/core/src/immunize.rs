//! Vaccination strategies and the season loop.
//!
//! Uniform, targeted and acquaintance immunization draw a fresh set every
//! season without looking at past epidemics. Dynamical immunization starts
//! from a uniform draw and then moves each vaccinated slot to the node in its
//! closed neighborhood that the last epidemic hit hardest, as measured by
//! [`w_score`].

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::net::{Network, NodeId};
use crate::sir::{run_sir, EpidemicOutcome, SpreadParams};

/// Vaccinated nodes of one season, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VaccinationSet {
    members: Vec<NodeId>,
    season: usize,
}

impl VaccinationSet {
    pub fn new(mut members: Vec<NodeId>, season: usize) -> Self {
        members.sort_unstable();
        members.dedup();
        VaccinationSet { members, season }
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn season(&self) -> usize {
        self.season
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, u: NodeId) -> bool {
        self.members.binary_search(&u).is_ok()
    }

    pub fn mask(&self, node_count: usize) -> Vec<bool> {
        let mut mask = vec![false; node_count];
        for &u in &self.members {
            mask[u] = true;
        }
        mask
    }

    pub fn overlap(&self, other: &VaccinationSet) -> usize {
        let (mut i, mut j, mut common) = (0, 0, 0);
        while i < self.members.len() && j < other.members.len() {
            match self.members[i].cmp(&other.members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    common += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        common
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Uniform,
    Targeted,
    Acquaintance,
    Dynamical,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Uniform,
        Strategy::Targeted,
        Strategy::Acquaintance,
        Strategy::Dynamical,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::Targeted => "targeted",
            Strategy::Acquaintance => "acquaintance",
            Strategy::Dynamical => "dynamical",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy {s:?}")))
    }
}

/// `round(v N)` with halves rounded up.
pub fn vaccinated_count(node_count: usize, v: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("v must lie in [0, 1), got {v}")));
    }
    Ok((v * node_count as f64 + 0.5).floor() as usize)
}

fn check_count(net: &Network, count: usize) -> Result<()> {
    if count > net.node_count() {
        return Err(Error::InvalidParameter(format!(
            "cannot vaccinate {count} of {} nodes",
            net.node_count()
        )));
    }
    Ok(())
}

pub fn select_uniform<R: Rng + ?Sized>(net: &Network, count: usize, rng: &mut R) -> Result<VaccinationSet> {
    check_count(net, count)?;
    let members = index::sample(rng, net.node_count(), count).into_vec();
    Ok(VaccinationSet::new(members, 1))
}

/// Highest-degree nodes; ties at the cutoff degree are broken uniformly.
pub fn select_targeted<R: Rng + ?Sized>(net: &Network, count: usize, rng: &mut R) -> Result<VaccinationSet> {
    check_count(net, count)?;
    if count == 0 {
        return Ok(VaccinationSet::new(Vec::new(), 1));
    }
    let mut by_degree: Vec<NodeId> = (0..net.node_count()).collect();
    by_degree.sort_by(|&a, &b| net.degree(b).cmp(&net.degree(a)).then(a.cmp(&b)));
    let cutoff = net.degree(by_degree[count - 1]);
    let mut members: Vec<NodeId> = by_degree
        .iter()
        .copied()
        .take_while(|&u| net.degree(u) > cutoff)
        .collect();
    let tied: Vec<NodeId> = by_degree
        .iter()
        .copied()
        .filter(|&u| net.degree(u) == cutoff)
        .collect();
    let needed = count - members.len();
    members.extend(tied.choose_multiple(rng, needed).copied());
    Ok(VaccinationSet::new(members, 1))
}

/// Random neighbors of random nodes, repeated until `count` distinct nodes
/// are vaccinated.
pub fn select_acquaintance<R: Rng + ?Sized>(
    net: &Network,
    count: usize,
    rng: &mut R,
) -> Result<VaccinationSet> {
    check_count(net, count)?;
    let n = net.node_count();
    // only nodes with a neighbor can ever be named as an acquaintance
    let reachable = (0..n).filter(|&u| net.degree(u) > 0).count();
    if count > reachable {
        return Err(Error::InvalidParameter(format!(
            "only {reachable} nodes can be reached as acquaintances, {count} requested"
        )));
    }
    let mut chosen = vec![false; n];
    let mut members = Vec::with_capacity(count);
    while members.len() < count {
        let u = rng.gen_range(0..n);
        let Some(&w) = net.neighbors(u).choose(rng) else {
            continue;
        };
        if !chosen[w] {
            chosen[w] = true;
            members.push(w);
        }
    }
    Ok(VaccinationSet::new(members, 1))
}

/// Infection pressure around `u` after a season: recovered neighbors, plus
/// one when `u` itself recovered. Vaccinated nodes never recover, so they
/// score their recovered neighbors only.
pub fn w_score(net: &Network, outcome: &EpidemicOutcome, u: NodeId) -> usize {
    let around = net
        .neighbors(u)
        .iter()
        .filter(|&&w| outcome.is_recovered(w))
        .count();
    around + usize::from(outcome.is_recovered(u))
}

/// Where one vaccinated slot moved during a [`seasonal_update`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Succession {
    pub predecessor: NodeId,
    pub successor: NodeId,
    /// Set when `u` and all of its neighbors were already claimed and the slot
    /// went to a random unclaimed node instead.
    pub fallback: bool,
}

/// Dynamical immunization step from one season's set to the next.
pub fn seasonal_update<R: Rng + ?Sized>(
    net: &Network,
    outcome: &EpidemicOutcome,
    current: &VaccinationSet,
    rng: &mut R,
) -> VaccinationSet {
    let moves = seasonal_update_traced(net, outcome, current, rng);
    VaccinationSet::new(
        moves.into_iter().map(|m| m.successor).collect(),
        current.season() + 1,
    )
}

/// Like [`seasonal_update`] but reports the slot-by-slot moves, in the order
/// the slots were processed.
///
/// Slots are visited in a fresh random order. Each slot `u` moves to the
/// highest-scoring node of `{u} ∪ Γ(u)` not already claimed this round; `u`
/// keeps its slot when it ties the maximum, other ties are broken uniformly.
pub fn seasonal_update_traced<R: Rng + ?Sized>(
    net: &Network,
    outcome: &EpidemicOutcome,
    current: &VaccinationSet,
    rng: &mut R,
) -> Vec<Succession> {
    let n = net.node_count();
    let mut order = current.members().to_vec();
    order.shuffle(rng);
    let mut claimed = vec![false; n];
    let mut moves = Vec::with_capacity(order.len());
    let mut tied: Vec<NodeId> = Vec::new();

    for u in order {
        tied.clear();
        let mut best = 0usize;
        for y in std::iter::once(u).chain(net.neighbors(u).iter().copied()) {
            if claimed[y] {
                continue;
            }
            let w = w_score(net, outcome, y);
            if tied.is_empty() || w > best {
                best = w;
                tied.clear();
                tied.push(y);
            } else if w == best {
                tied.push(y);
            }
        }
        let (successor, fallback) = if tied.is_empty() {
            (fallback_node(&claimed, current, rng), true)
        } else if tied[0] == u {
            (u, false)
        } else {
            (*tied.choose(rng).expect("nonempty"), false)
        };
        claimed[successor] = true;
        moves.push(Succession {
            predecessor: u,
            successor,
            fallback,
        });
    }
    moves
}

/// Uniform pick among unclaimed nodes outside the current set, or among all
/// unclaimed nodes if that is empty.
fn fallback_node<R: Rng + ?Sized>(claimed: &[bool], current: &VaccinationSet, rng: &mut R) -> NodeId {
    let outside: Vec<NodeId> = (0..claimed.len())
        .filter(|&y| !claimed[y] && !current.contains(y))
        .collect();
    if let Some(&y) = outside.choose(rng) {
        return y;
    }
    let unclaimed: Vec<NodeId> = (0..claimed.len()).filter(|&y| !claimed[y]).collect();
    *unclaimed
        .choose(rng)
        .expect("fewer claims than nodes while slots remain")
}

/// One season: its vaccinated set, the epidemic that followed, and `r_∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonRecord {
    pub vaccinated: VaccinationSet,
    pub outcome: EpidemicOutcome,
    pub prevalence: f64,
}

/// Parameters a history was produced with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryConfig {
    pub strategy: Strategy,
    pub beta: f64,
    pub v: f64,
    pub seed: Option<u64>,
}

/// Seasons `1..=S` in order.
#[derive(Debug, Clone, PartialEq)]
pub struct SeasonHistory {
    pub config: HistoryConfig,
    pub records: Vec<SeasonRecord>,
}

impl SeasonHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn vaccination_sets(&self) -> Vec<VaccinationSet> {
        self.records.iter().map(|r| r.vaccinated.clone()).collect()
    }

    pub fn prevalences(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.prevalence).collect()
    }
}

/// Alternates vaccination and spreading for `seasons` seasons.
pub fn run_seasons<R: Rng + ?Sized>(
    net: &Network,
    strategy: Strategy,
    params: SpreadParams,
    v: f64,
    seasons: usize,
    rng: &mut R,
) -> Result<SeasonHistory> {
    if seasons == 0 {
        return Err(Error::InvalidParameter("at least one season is required".into()));
    }
    let count = vaccinated_count(net.node_count(), v)?;
    let mut records: Vec<SeasonRecord> = Vec::with_capacity(seasons);

    for season in 1..=seasons {
        let drawn = match (strategy, records.last()) {
            (Strategy::Dynamical, Some(prev)) => {
                seasonal_update(net, &prev.outcome, &prev.vaccinated, rng)
            }
            (Strategy::Uniform | Strategy::Dynamical, _) => select_uniform(net, count, rng)?,
            (Strategy::Targeted, _) => select_targeted(net, count, rng)?,
            (Strategy::Acquaintance, _) => select_acquaintance(net, count, rng)?,
        };
        let vaccinated = VaccinationSet::new(drawn.members, season);
        let outcome = run_sir(net, &vaccinated, params, rng)?;
        let prevalence = outcome.prevalence();
        records.push(SeasonRecord {
            vaccinated,
            outcome,
            prevalence,
        });
    }

    Ok(SeasonHistory {
        config: HistoryConfig {
            strategy,
            beta: params.beta(),
            v,
            seed: None,
        },
        records,
    })
}
