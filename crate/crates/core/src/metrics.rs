//! How vaccinated sets evolve over seasons.
//!
//! All ratios are taken against the fixed set size `vN`. Seasons are
//! numbered from 1; season 1 is a uniform draw and is left out of the
//! streak and repeat statistics.

use crate::error::{Error, Result};
use crate::immunize::VaccinationSet;
use crate::net::{k_shell, mean_pairwise_distance, Network, NodeId};

fn set_size(sets: &[VaccinationSet]) -> Result<f64> {
    let size = sets.first().map_or(0, VaccinationSet::len);
    if size == 0 {
        return Err(Error::UndefinedStatistic("vaccinated sets are empty".into()));
    }
    if sets.iter().any(|s| s.len() != size) {
        return Err(Error::InvalidParameter("vaccinated sets differ in size".into()));
    }
    Ok(size as f64)
}

/// `Q_lag(S) = |V_S ∩ V_{S-lag}| / vN` for `S = lag+1 ..= len`, returned as
/// `(S, value)` pairs.
pub fn recurrence(sets: &[VaccinationSet], lag: usize) -> Result<Vec<(usize, f64)>> {
    if !(1..=2).contains(&lag) {
        return Err(Error::InvalidParameter(format!("lag must be 1 or 2, got {lag}")));
    }
    if sets.len() < lag + 1 {
        return Err(Error::InvalidParameter(format!(
            "lag {lag} needs at least {} seasons, history has {}",
            lag + 1,
            sets.len()
        )));
    }
    let size = set_size(sets)?;
    Ok((lag..sets.len())
        .map(|idx| (idx + 1, sets[idx].overlap(&sets[idx - lag]) as f64 / size))
        .collect())
}

/// `A_{S'}(S)`: share of slots held by nodes vaccinated in every season from
/// `S` through `S'`, for `S = 2 ..= S'-1`, as `(S, value)` pairs.
pub fn continuous_streak(sets: &[VaccinationSet], upto: usize) -> Result<Vec<(usize, f64)>> {
    if upto < 3 || upto > sets.len() {
        return Err(Error::InvalidParameter(format!(
            "streak window end must lie in 3..={}, got {upto}",
            sets.len()
        )));
    }
    let size = set_size(&sets[..upto])?;
    // walk backwards from S', shrinking the running intersection
    let mut running: Vec<NodeId> = sets[upto - 1].members().to_vec();
    let mut out = Vec::with_capacity(upto - 2);
    for season in (2..upto).rev() {
        let set = &sets[season - 1];
        running.retain(|&u| set.contains(u));
        out.push((season, running.len() as f64 / size));
    }
    out.reverse();
    Ok(out)
}

/// `F_{S'}(i)` for `i = 1 ..= S'-1` (index `i - 1`): among nodes vaccinated at
/// least once in seasons `2..=S'`, the share vaccinated exactly `i` times.
pub fn repeat_frequency(sets: &[VaccinationSet], upto: usize) -> Result<Vec<f64>> {
    if upto < 3 || upto > sets.len() {
        return Err(Error::InvalidParameter(format!(
            "repeat window end must lie in 3..={}, got {upto}",
            sets.len()
        )));
    }
    let mut counts: std::collections::HashMap<NodeId, usize> = std::collections::HashMap::new();
    for set in &sets[1..upto] {
        for &u in set.members() {
            *counts.entry(u).or_default() += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::UndefinedStatistic("no node was vaccinated in the window".into()));
    }
    let mut hist = vec![0usize; upto - 1];
    for &c in counts.values() {
        hist[c - 1] += 1;
    }
    let total = counts.len() as f64;
    Ok(hist.into_iter().map(|h| h as f64 / total).collect())
}

/// All recurrence statistics for one history.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceReport {
    /// `(S, Q₁(S))` for S ≥ 2.
    pub q1: Vec<(usize, f64)>,
    /// `(S, Q₂(S))` for S ≥ 3.
    pub q2: Vec<(usize, f64)>,
    /// `(S, A_{S'}(S))` for 2 ≤ S < S'.
    pub a_streak: Vec<(usize, f64)>,
    /// `F_{S'}(i)` at index `i - 1`.
    pub f_repeat: Vec<f64>,
    pub upto: usize,
}

/// Q₁ and Q₂ over the whole history; A and F over the window ending at
/// `upto`. Parts that need more seasons than available are left empty.
pub fn recurrence_report(sets: &[VaccinationSet], upto: usize) -> Result<RecurrenceReport> {
    let q1 = if sets.len() >= 2 { recurrence(sets, 1)? } else { Vec::new() };
    let q2 = if sets.len() >= 3 { recurrence(sets, 2)? } else { Vec::new() };
    let (a_streak, f_repeat) = if upto >= 3 && upto <= sets.len() {
        (continuous_streak(sets, upto)?, repeat_frequency(sets, upto)?)
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(RecurrenceReport {
        q1,
        q2,
        a_streak,
        f_repeat,
        upto,
    })
}

/// Mean degree, mean k-shell and mean pairwise distance of a node set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuralProfile {
    pub mean_degree: f64,
    pub mean_kshell: f64,
    pub mean_distance: f64,
}

/// Profile of a vaccinated set alongside the whole-network baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaccinatedProfile {
    pub vaccinated: StructuralProfile,
    pub network: StructuralProfile,
}

/// Caches k-shells and the whole-network baseline so that many sets can be
/// profiled against one network.
#[derive(Debug, Clone)]
pub struct ProfileContext<'a> {
    net: &'a Network,
    shells: Vec<usize>,
    baseline: StructuralProfile,
}

impl<'a> ProfileContext<'a> {
    /// Computes the baseline over all nodes (one BFS per node).
    pub fn new(net: &'a Network) -> Result<Self> {
        let shells = k_shell(net);
        let all: Vec<NodeId> = (0..net.node_count()).collect();
        let baseline = structural_profile(net, &shells, &all)?;
        Ok(ProfileContext { net, shells, baseline })
    }

    pub fn baseline(&self) -> StructuralProfile {
        self.baseline
    }

    pub fn profile(&self, nodes: &[NodeId]) -> Result<StructuralProfile> {
        structural_profile(self.net, &self.shells, nodes)
    }
}

fn structural_profile(net: &Network, shells: &[usize], nodes: &[NodeId]) -> Result<StructuralProfile> {
    let mean_distance = mean_pairwise_distance(net, nodes)?;
    let count = nodes.len() as f64;
    Ok(StructuralProfile {
        mean_degree: nodes.iter().map(|&u| net.degree(u) as f64).sum::<f64>() / count,
        mean_kshell: nodes.iter().map(|&u| shells[u] as f64).sum::<f64>() / count,
        mean_distance,
    })
}

pub fn vaccinated_profile(net: &Network, vset: &VaccinationSet) -> Result<VaccinatedProfile> {
    let ctx = ProfileContext::new(net)?;
    Ok(VaccinatedProfile {
        vaccinated: ctx.profile(vset.members())?,
        network: ctx.baseline(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sets(seasons: &[&[usize]]) -> Vec<VaccinationSet> {
        seasons
            .iter()
            .enumerate()
            .map(|(i, m)| VaccinationSet::new(m.to_vec(), i + 1))
            .collect()
    }

    #[test]
    fn recurrence_examples() {
        let same = sets(&[&[1, 2], &[1, 2], &[1, 2]]);
        assert_eq!(recurrence(&same, 1).unwrap(), vec![(2, 1.0), (3, 1.0)]);
        assert_eq!(recurrence(&same, 2).unwrap(), vec![(3, 1.0)]);

        let disjoint = sets(&[&[1, 2], &[3, 4], &[5, 6]]);
        assert_eq!(recurrence(&disjoint, 1).unwrap(), vec![(2, 0.0), (3, 0.0)]);

        let half = sets(&[&[1, 2, 3, 4], &[3, 4, 5, 6]]);
        assert_eq!(recurrence(&half, 1).unwrap(), vec![(2, 0.5)]);
    }

    #[test]
    fn recurrence_errors() {
        let two = sets(&[&[1], &[2]]);
        assert!(recurrence(&two, 2).is_err());
        assert!(recurrence(&two, 3).is_err());
        assert!(recurrence(&sets(&[&[], &[]]), 1).is_err());
        assert!(recurrence(&sets(&[&[1], &[2, 3]]), 1).is_err());
    }

    #[test]
    fn streak_examples() {
        let same = sets(&[&[1, 2], &[1, 2], &[1, 2], &[1, 2]]);
        assert_eq!(continuous_streak(&same, 4).unwrap(), vec![(2, 1.0), (3, 1.0)]);

        let last_new = sets(&[&[1, 2], &[1, 2], &[1, 2], &[7, 8]]);
        assert_eq!(continuous_streak(&last_new, 4).unwrap(), vec![(2, 0.0), (3, 0.0)]);

        let three = sets(&[&[5, 6], &[1, 2], &[2, 3]]);
        assert_eq!(continuous_streak(&three, 3).unwrap(), vec![(2, 0.5)]);

        assert!(continuous_streak(&three, 4).is_err());
        assert!(continuous_streak(&three, 2).is_err());
    }

    #[test]
    fn repeat_examples() {
        let same = sets(&[&[1], &[1], &[1], &[1]]);
        assert_eq!(repeat_frequency(&same, 4).unwrap(), vec![0.0, 0.0, 1.0]);

        let disjoint = sets(&[&[9], &[1], &[2], &[3]]);
        assert_eq!(repeat_frequency(&disjoint, 4).unwrap(), vec![1.0, 0.0, 0.0]);

        let mixed = sets(&[&[9], &[1], &[1], &[2]]);
        assert_eq!(repeat_frequency(&mixed, 4).unwrap(), vec![0.5, 0.5, 0.0]);

        assert!(repeat_frequency(&sets(&[&[], &[], &[]]), 3).is_err());
    }

    #[test]
    fn report_skips_unavailable_parts() {
        let short = sets(&[&[1, 2], &[2, 3]]);
        let rep = recurrence_report(&short, 10).unwrap();
        assert_eq!(rep.q1, vec![(2, 0.5)]);
        assert!(rep.q2.is_empty() && rep.a_streak.is_empty() && rep.f_repeat.is_empty());
    }

    fn star(leaves: usize) -> Network {
        Network::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    #[test]
    fn profile_examples() {
        let g = star(5);
        let p = vaccinated_profile(&g, &VaccinationSet::new(vec![0, 3], 2)).unwrap();
        assert_eq!(p.vaccinated.mean_degree, 3.0);
        assert_eq!(p.vaccinated.mean_distance, 1.0);
        assert_eq!(p.vaccinated.mean_kshell, 1.0);

        let ring = Network::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        let p = vaccinated_profile(&ring, &VaccinationSet::new(vec![1, 4], 1)).unwrap();
        assert_eq!(p.vaccinated.mean_kshell, 2.0);
        assert_eq!(p.vaccinated.mean_distance, 3.0);

        assert!(vaccinated_profile(&ring, &VaccinationSet::new(vec![1], 1)).is_err());
    }

    #[test]
    fn full_set_profile_equals_baseline() {
        let g = star(7);
        let all = VaccinationSet::new((0..8).collect(), 1);
        let p = vaccinated_profile(&g, &all).unwrap();
        assert_eq!(p.vaccinated, p.network);
    }

    fn arb_history() -> impl Strategy<Value = Vec<VaccinationSet>> {
        (3usize..12, 1usize..6).prop_flat_map(|(seasons, size)| {
            proptest::collection::vec(proptest::sample::subsequence((0..15).collect::<Vec<_>>(), size), seasons)
                .prop_map(|raw| {
                    raw.into_iter()
                        .enumerate()
                        .map(|(i, m)| VaccinationSet::new(m, i + 1))
                        .collect()
                })
        })
    }

    proptest! {
        #[test]
        fn recurrence_matches_brute_force(history in arb_history()) {
            let size = history[0].len() as f64;
            for lag in 1..=2 {
                for (season, q) in recurrence(&history, lag).unwrap() {
                    let a = history[season - 1].members();
                    let b = history[season - 1 - lag].members();
                    let common = a.iter().filter(|u| b.contains(u)).count();
                    prop_assert_eq!(q, common as f64 / size);
                }
            }
        }

        #[test]
        fn streak_and_repeat_bounds(history in arb_history()) {
            let upto = history.len();
            let a = continuous_streak(&history, upto).unwrap();
            for w in a.windows(2) {
                prop_assert!(w[0].1 <= w[1].1);
            }
            prop_assert!(a.iter().all(|(_, x)| (0.0..=1.0).contains(x)));
            let f = repeat_frequency(&history, upto).unwrap();
            prop_assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(f.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }
}
