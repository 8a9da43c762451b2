use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::immunize::Strategy;
use crate::net::{generate_ba, giant_component, read_edge_list_file, Network};

/// Where an experiment's network comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetworkSource {
    /// SNAP edge list; experiments run on its giant component.
    File(PathBuf),
    /// Barabási–Albert graph generated from the master seed.
    Ba { n: usize, m: usize },
}

impl NetworkSource {
    /// Loads or generates the network. Generation draws from stream 0 of the
    /// master seed, which replicas never use.
    pub fn load(&self, master_seed: u64) -> Result<Network> {
        match self {
            NetworkSource::File(path) => Ok(giant_component(&read_edge_list_file(path)?)),
            NetworkSource::Ba { n, m } => generate_ba(*n, *m, &mut network_rng(master_seed)),
        }
    }
}

impl FromStr for NetworkSource {
    type Err = Error;

    /// `ba:N:M` for a generated graph, otherwise a path (an optional `file:`
    /// prefix is stripped).
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("ba:") {
            let mut parts = rest.split(':');
            let (Some(n), Some(m), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::InvalidParameter(format!("expected ba:N:M, got {s:?}")));
            };
            let n = parse_value("network", n)?;
            let m = parse_value("network", m)?;
            return Ok(NetworkSource::Ba { n, m });
        }
        let path = s.strip_prefix("file:").unwrap_or(s);
        if path.is_empty() {
            return Err(Error::InvalidParameter("empty network path".into()));
        }
        Ok(NetworkSource::File(PathBuf::from(path)))
    }
}

impl fmt::Display for NetworkSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkSource::File(p) => write!(f, "{}", p.display()),
            NetworkSource::Ba { n, m } => write!(f, "ba:{n}:{m}"),
        }
    }
}

/// Random stream used to generate the network.
pub fn network_rng(master_seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(0);
    rng
}

/// Independent random stream of one replica: the ChaCha stream
/// `replica + 1` under the master key.
pub fn replica_rng(master_seed: u64, replica: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replica as u64 + 1);
    rng
}

/// Environment variable holding the worker-thread limit.
pub const WORKERS_ENV: &str = "SEASONAL_IMM_WORKERS";

/// Worker limit from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(raw) => {
            let n: usize = parse_value(WORKERS_ENV, raw.trim())?;
            if n == 0 {
                return Err(Error::InvalidParameter(format!("{WORKERS_ENV} must be positive")));
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

/// Flat experiment description, read from `key = value` files and
/// overridable key by key.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub network: NetworkSource,
    pub strategy: Strategy,
    pub beta: f64,
    pub v: f64,
    pub seasons: usize,
    pub replicas: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Compute vaccinated-set structural profiles (one BFS per vaccinated
    /// node per season).
    pub profiles: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            network: NetworkSource::Ba { n: 1000, m: 8 },
            strategy: Strategy::Dynamical,
            beta: 0.1,
            v: 0.1,
            seasons: 10,
            replicas: 100,
            seed: 1,
            out: None,
            workers: None,
            profiles: true,
        }
    }
}

pub const CONFIG_KEYS: [&str; 10] = [
    "network", "strategy", "beta", "v", "seasons", "replicas", "seed", "out", "workers", "profiles",
];

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::InvalidParameter(format!("bad value {raw:?} for {key}")))
}

impl ExperimentConfig {
    /// Parses `key = value` lines over the defaults. Blank lines and `#`
    /// comments are skipped; unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected key = value, got {line:?}"),
                });
            };
            config.set(key.trim(), value.trim()).map_err(|e| Error::Parse {
                line: idx + 1,
                message: e.to_string(),
            })?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "network" => self.network = value.parse()?,
            "strategy" => self.strategy = value.parse()?,
            "beta" => self.beta = parse_value(key, value)?,
            "v" => self.v = parse_value(key, value)?,
            "seasons" => self.seasons = parse_value(key, value)?,
            "replicas" => self.replicas = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "out" => self.out = (!value.is_empty()).then(|| PathBuf::from(value)),
            "workers" => self.workers = Some(parse_value(key, value)?),
            "profiles" => self.profiles = parse_value(key, value)?,
            _ => return Err(Error::InvalidParameter(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParameter(format!("beta must lie in [0, 1], got {}", self.beta)));
        }
        if !(0.0..1.0).contains(&self.v) {
            return Err(Error::InvalidParameter(format!("v must lie in [0, 1), got {}", self.v)));
        }
        if self.seasons == 0 {
            return Err(Error::InvalidParameter("seasons must be at least 1".into()));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidParameter("replicas must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be positive".into()));
        }
        Ok(())
    }

    /// Renders the config in the same `key = value` format it is read from.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("network = {}\n", self.network));
        s.push_str(&format!("strategy = {}\n", self.strategy));
        s.push_str(&format!("beta = {}\n", self.beta));
        s.push_str(&format!("v = {}\n", self.v));
        s.push_str(&format!("seasons = {}\n", self.seasons));
        s.push_str(&format!("replicas = {}\n", self.replicas));
        s.push_str(&format!("seed = {}\n", self.seed));
        if let Some(out) = &self.out {
            s.push_str(&format!("out = {}\n", out.display()));
        }
        if let Some(w) = self.workers {
            s.push_str(&format!("workers = {w}\n"));
        }
        s.push_str(&format!("profiles = {}\n", self.profiles));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn parse_full_config() {
        let text = "# experiment\nnetwork = ba:500:3\nstrategy = targeted\nbeta=0.05\nv = 0.2 # trailing\n\
                    seasons = 7\nreplicas = 12\nseed = 99\nout = results.csv\nworkers = 2\nprofiles = false\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.network, NetworkSource::Ba { n: 500, m: 3 });
        assert_eq!(c.strategy, Strategy::Targeted);
        assert_eq!((c.beta, c.v, c.seasons, c.replicas, c.seed), (0.05, 0.2, 7, 12, 99));
        assert_eq!(c.out, Some(PathBuf::from("results.csv")));
        assert_eq!(c.workers, Some(2));
        assert!(!c.profiles);
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(ExperimentConfig::parse("beta = 0.1\nbogus = 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(ExperimentConfig::parse("beta 0.1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ExperimentConfig::parse("seasons = many\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::parse("beta = 1.5").is_err());
        assert!(ExperimentConfig::parse("v = 1").is_err());
        assert!(ExperimentConfig::parse("seasons = 0").is_err());
        assert!(ExperimentConfig::parse("replicas = 0").is_err());
        assert!(ExperimentConfig::parse("").is_ok());
    }

    #[test]
    fn network_sources() {
        assert_eq!("ba:100:2".parse::<NetworkSource>().unwrap(), NetworkSource::Ba { n: 100, m: 2 });
        assert_eq!(
            "file:data/wiki-Vote.txt".parse::<NetworkSource>().unwrap(),
            NetworkSource::File(PathBuf::from("data/wiki-Vote.txt"))
        );
        assert!("ba:100".parse::<NetworkSource>().is_err());
        assert!("ba:x:2".parse::<NetworkSource>().is_err());
    }

    #[test]
    fn replica_streams_are_distinct_and_stable() {
        let a: Vec<u64> = (0..4).map(|r| replica_rng(5, r).next_u64()).collect();
        let b: Vec<u64> = (0..4).map(|r| replica_rng(5, r).next_u64()).collect();
        assert_eq!(a, b);
        let mut uniq = a.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 4);
        assert_ne!(network_rng(5).next_u64(), a[0]);
    }
}
