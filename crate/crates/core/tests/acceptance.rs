//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits nonzero if any criterion failed.

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use seasonal_immunization::experiment::{
    run_ensemble, run_preset, EnsembleReport, EnsembleSpec, NetworkSource, Preset, PresetOptions,
};
use seasonal_immunization::experiment::presets::DESK_NETWORK;
use seasonal_immunization::meanfield::{
    closed_form_prevalence, integrate_season, run_meanfield_seasons, uniform_threshold, IntegrationSettings,
    VaccProfile,
};
use seasonal_immunization::net::{degree_stats, read_edge_list_file, DegreeDistribution, Network};
use seasonal_immunization::sir::{exact_outcome_distribution, run_sir};
use seasonal_immunization::{SpreadParams, Strategy, VaccinationSet};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

const SEED: u64 = 1;
const REPLICAS: usize = 100;

// ---------------------------------------------------------------------------
// 1. threshold formula against reference network moments

fn threshold_table() -> Verdict {
    // name, <k>, <k^2>, v_c at beta = 0.1, v_c at beta = 0.05
    let rows = [
        ("Wiki-Vote", 29.4, 4554.8, 0.935, 0.870),
        ("Epinions", 16.4, 3172.1, 0.955, 0.909),
        ("Slashdot", 23.5, 6428.8, 0.963, 0.927),
        ("Enron", 22.5, 6812.1, 0.967, 0.934),
    ];
    let mut misses = Vec::new();
    let mut checked = 0;
    for (name, k, k2, at10, at05) in rows {
        for (beta, expected) in [(0.1, at10), (0.05, at05)] {
            checked += 1;
            let got = match uniform_threshold(k, k2, beta) {
                Ok(t) => t.value,
                Err(e) => return verdict(false, format!("{name} beta={beta}: {e}")),
            };
            if (got - expected).abs() > 0.001 {
                misses.push(format!("{name} beta={beta}: {got:.4} vs {expected}"));
            }
        }
    }
    if misses.is_empty() {
        verdict(true, format!("{checked}/{checked} entries within 0.001"))
    } else {
        verdict(
            false,
            format!("{}/{checked} entries within 0.001; off: {}", checked - misses.len(), misses.join("; ")),
        )
    }
}

// ---------------------------------------------------------------------------
// 2. Wiki-Vote ingestion

fn wiki_vote_path() -> PathBuf {
    std::env::var_os("WIKI_VOTE_PATH")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/wiki-Vote.txt"))
}

fn wiki_vote() -> Verdict {
    let path = wiki_vote_path();
    if !path.exists() {
        return verdict(
            false,
            format!("dataset not found at {} (set WIKI_VOTE_PATH to the SNAP wiki-Vote.txt)", path.display()),
        );
    }
    let net = match read_edge_list_file(&path) {
        Ok(n) => n,
        Err(e) => return verdict(false, format!("load failed: {e}")),
    };
    let s = match degree_stats(&net) {
        Ok(s) => s,
        Err(e) => return verdict(false, format!("stats failed: {e}")),
    };
    let rel_k = (s.mean_degree - 29.4).abs() / 29.4;
    let rel_k2 = (s.mean_sq_degree - 4554.8).abs() / 4554.8;
    let pass = net.node_count() == 7115 && rel_k <= 0.02 && rel_k2 <= 0.02;
    verdict(
        pass,
        format!(
            "N={} <k>={:.2} ({:+.1}%) <k^2>={:.1} ({:+.1}%)",
            net.node_count(),
            s.mean_degree,
            100.0 * (s.mean_degree / 29.4 - 1.0),
            s.mean_sq_degree,
            100.0 * (s.mean_sq_degree / 4554.8 - 1.0),
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. mean field against simulation on the small BA graph

fn theory_vs_simulation() -> Verdict {
    let net = NetworkSource::Ba { n: 100, m: 2 }.load(SEED).unwrap();
    let mean_k = degree_stats(&net).unwrap().mean_degree;
    let report = run_ensemble(&net, &spec(Strategy::Dynamical, 5)).unwrap();
    let dist = DegreeDistribution::from_network(&net).unwrap();
    let mf = run_meanfield_seasons(&dist, 0.1, 0.1, 0.01, 5, IntegrationSettings::default()).unwrap();
    let mc: Vec<f64> = report.seasons.iter().map(|s| s.r_inf_mean).collect();
    let worst = mc.iter().zip(&mf.prevalence).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let pass = worst <= 0.15 && mc[4] < mc[0] && mf.prevalence[4] < mf.prevalence[0];
    verdict(
        pass,
        format!(
            "<k>={mean_k:.2}; max |mf-mc|={worst:.4}; mc S1={:.4} S5={:.4}; mf S1={:.4} S5={:.4}",
            mc[0], mc[4], mf.prevalence[0], mf.prevalence[4]
        ),
    )
}

// ---------------------------------------------------------------------------
// 4-7. desk-scale BA ensembles

fn spec(strategy: Strategy, seasons: usize) -> EnsembleSpec {
    EnsembleSpec {
        strategy,
        beta: 0.1,
        v: 0.1,
        seasons,
        replicas: REPLICAS,
        seed: SEED,
        workers: None,
        profiles: false,
    }
}

fn desk_reports() -> &'static BTreeMap<Strategy, EnsembleReport> {
    static REPORTS: OnceLock<BTreeMap<Strategy, EnsembleReport>> = OnceLock::new();
    REPORTS.get_or_init(|| {
        let net = DESK_NETWORK.load(SEED).unwrap();
        Strategy::ALL.into_iter().map(|s| (s, run_ensemble(&net, &spec(s, 10)).unwrap())).collect()
    })
}

fn gap_ok(low: (f64, f64), high: (f64, f64)) -> (bool, f64) {
    let z = (high.0 - low.0) / (low.1.powi(2) + high.1.powi(2)).sqrt();
    (high.0 - low.0 > 2.0 * (low.1.powi(2) + high.1.powi(2)).sqrt(), z)
}

fn strategy_ordering() -> Verdict {
    let r = desk_reports();
    let at5 = |s: Strategy| r[&s].prevalence_stats(5);
    let (t, d, a, u) = (
        at5(Strategy::Targeted),
        at5(Strategy::Dynamical),
        at5(Strategy::Acquaintance),
        at5(Strategy::Uniform),
    );
    let (td, ztd) = gap_ok(t, d);
    let (da, zda) = gap_ok(d, a);
    let (du, zdu) = gap_ok(d, u);
    verdict(
        td && da && du,
        format!(
            "S5 targeted={:.4}±{:.4} dynamical={:.4}±{:.4} acquaintance={:.4}±{:.4} uniform={:.4}±{:.4}; \
             gaps in combined SE: {ztd:.1}, {zda:.1}, {zdu:.1}",
            t.0, t.1, d.0, d.1, a.0, a.1, u.0, u.1
        ),
    )
}

fn recurrence_trend() -> Verdict {
    let r = &desk_reports()[&Strategy::Dynamical];
    let (q2, q10) = (r.q1_stats(2), r.q1_stats(10));
    let (pass, z) = gap_ok(q2, q10);
    verdict(pass, format!("Q1(2)={:.4}±{:.4} Q1(10)={:.4}±{:.4}; gap {z:.1} SE", q2.0, q2.1, q10.0, q10.1))
}

fn streak_scarcity() -> Verdict {
    let r = &desk_reports()[&Strategy::Dynamical];
    let monotone = r
        .replicas
        .iter()
        .all(|rep| rep.streak.windows(2).all(|w| w[0].1 <= w[1].1));
    let a2 = r.streak_stats()[0];
    verdict(
        monotone && a2.0 == 2 && a2.1 < 0.2,
        format!("A10(S) <= A10(S+1) in every replica: {monotone}; mean A10(2)={:.4}±{:.4}", a2.1, a2.2),
    )
}

fn repeat_frequency() -> Verdict {
    let r = &desk_reports()[&Strategy::Dynamical];
    let worst = r
        .replicas
        .iter()
        .map(|rep| (rep.repeat.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let beyond = r
        .replicas
        .iter()
        .filter(|rep| rep.repeat.iter().skip(3).any(|&f| f > 0.0))
        .count();
    let share = beyond as f64 / r.replicas.len() as f64;
    let f4 = r.repeat_stats()[3].1;
    verdict(
        worst <= 1e-9 && share >= 0.5,
        format!("max |sum F10 - 1|={worst:.1e}; support beyond i=3 in {beyond}/{} replicas; mean F10(4)={f4:.4}", r.replicas.len()),
    )
}

// ---------------------------------------------------------------------------
// 8. Monte Carlo outcome frequencies against exhaustive enumeration

/// One representative per isomorphism class of connected graphs on `n` nodes.
fn connected_graphs(n: usize) -> Vec<Network> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let net = Network::from_edges(n, edges.iter().copied()).unwrap();
        if !net.is_connected() {
            continue;
        }
        let canonical = perms
            .iter()
            .map(|p| {
                let mut relabeled: Vec<(usize, usize)> =
                    edges.iter().map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
                relabeled.sort_unstable();
                relabeled
            })
            .min()
            .unwrap();
        if seen.insert(canonical) {
            out.push(net);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn oracle_equivalence() -> Verdict {
    const RUNS: usize = 100_000;
    let graphs: Vec<Network> = (1..=6).flat_map(connected_graphs).collect();
    let cases: Vec<(usize, f64)> = (0..graphs.len()).flat_map(|g| [0.0, 0.3, 1.0].map(|b| (g, b))).collect();
    let none = VaccinationSet::new(Vec::new(), 1);
    // (comparisons, failures, worst z)
    let results: Vec<(usize, Vec<String>, f64)> = cases
        .par_iter()
        .enumerate()
        .map(|(idx, &(g, beta))| {
            let net = &graphs[g];
            let params = SpreadParams::new(beta).unwrap();
            let exact = exact_outcome_distribution(net, &none, params).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(idx as u64);
            let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            for _ in 0..RUNS {
                *counts.entry(run_sir(net, &none, params, &mut rng).unwrap().recovered_nodes()).or_default() += 1;
            }
            let keys: HashSet<&Vec<usize>> = exact.keys().chain(counts.keys()).collect();
            let mut failures = Vec::new();
            let mut worst: f64 = 0.0;
            for key in &keys {
                let p = exact.get(*key).copied().unwrap_or(0.0);
                let f = counts.get(*key).copied().unwrap_or(0) as f64 / RUNS as f64;
                let se = (p * (1.0 - p) / RUNS as f64).sqrt();
                let diff = (f - p).abs();
                let z = if se > 0.0 { diff / se } else if diff > 1e-12 { f64::INFINITY } else { 0.0 };
                worst = worst.max(z);
                if z > 4.0 {
                    failures.push(format!(
                        "n={} m={} beta={beta} outcome {key:?}: p={p:.5} f={f:.5} z={z:.2}",
                        net.node_count(),
                        net.edge_count()
                    ));
                }
            }
            (keys.len(), failures, worst)
        })
        .collect();
    let comparisons: usize = results.iter().map(|r| r.0).sum();
    let failures: Vec<&String> = results.iter().flat_map(|r| &r.1).collect();
    let worst = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let mut detail = format!(
        "{} graphs x 3 beta x {RUNS} runs; {}/{comparisons} outcome frequencies within 4 SE; worst z={worst:.2}",
        graphs.len(),
        comparisons - failures.len()
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; first miss: {}", failures[0]));
    }
    verdict(failures.is_empty(), detail)
}

// ---------------------------------------------------------------------------
// 9. closed form against integration

fn meanfield_consistency() -> Verdict {
    let dist = DegreeDistribution::from_pairs([(2, 0.5), (5, 0.3), (20, 0.2)]).unwrap();
    let mut worst_gap: f64 = 0.0;
    let mut worst_conservation: f64 = 0.0;
    for (beta, v) in [(0.3, 0.1), (0.6, 0.2), (0.2, 0.0), (0.8, 0.5)] {
        let profile = VaccProfile::uniform(&dist, v).unwrap();
        let sol = integrate_season(&dist, &profile, beta, 1e-5, IntegrationSettings::default()).unwrap();
        let closed = closed_form_prevalence(&dist, beta, v).unwrap();
        worst_gap = worst_gap.max((sol.prevalence(&dist) - closed).abs());
        worst_conservation = worst_conservation.max(sol.max_conservation_error);
    }
    verdict(
        worst_gap <= 2e-3 && worst_conservation <= 1e-8,
        format!("max |closed - integrated|={worst_gap:.2e}; max conservation error={worst_conservation:.1e}"),
    )
}

// ---------------------------------------------------------------------------
// 10. presets are reproducible byte for byte

fn preset_determinism() -> Verdict {
    let base = tempfile::tempdir().unwrap();
    let opts = PresetOptions { seed: SEED, ..PresetOptions::default() };
    let mut files = 0;
    for preset in Preset::ALL {
        let a = run_preset(preset, &opts, &base.path().join(format!("{preset}-a"))).unwrap();
        let b = run_preset(preset, &opts, &base.path().join(format!("{preset}-b"))).unwrap();
        for (pa, pb) in a.iter().zip(&b) {
            files += 1;
            if std::fs::read(pa).unwrap() != std::fs::read(pb).unwrap() {
                return verdict(false, format!("{} differs between runs", pa.display()));
            }
        }
    }
    verdict(true, format!("{files} CSV files from {} presets identical across two runs", Preset::ALL.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 10] = [
        (1, "threshold formula regression", threshold_table),
        (2, "Wiki-Vote ingestion", wiki_vote),
        (3, "mean field vs simulation", theory_vs_simulation),
        (4, "strategy ordering", strategy_ordering),
        (5, "recurrence trend", recurrence_trend),
        (6, "streak scarcity", streak_scarcity),
        (7, "repeat-frequency normalization", repeat_frequency),
        (8, "oracle equivalence", oracle_equivalence),
        (9, "mean-field internal consistency", meanfield_consistency),
        (10, "preset determinism", preset_determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = std::panic::catch_unwind(check)
            .unwrap_or_else(|_| verdict(false, "panicked"));
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id:>2} {name}: {} ({:.1}s)", v.detail, start.elapsed().as_secs_f64());
        if !v.pass {
            failed.push(id);
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
