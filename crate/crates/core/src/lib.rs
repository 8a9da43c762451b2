//! Seasonal epidemics on complex networks and the immunization strategies
//! that adapt to them.
//!
//! The crate is organized bottom-up:
//!
//! - [`net`]: graph representation, SNAP edge-list ingestion, Barabási–Albert
//!   generation, degree statistics, k-shells and distances.
//! - [`sir`]: one season of discrete-time SIR spreading with a fixed
//!   vaccinated set, plus an exhaustive outcome enumerator for small graphs.
//! - [`immunize`]: uniform, targeted, acquaintance and dynamical
//!   immunization, and the season loop that alternates vaccination and
//!   spreading.
//! - [`meanfield`]: degree-class mean-field theory for the same process.
//! - [`metrics`]: recurrence, streak and repeat statistics over a season
//!   history, and structural profiles of vaccinated sets.
//! - [`experiment`]: configuration, ensembles, threshold search and CSV output.

pub mod error;
pub mod experiment;
pub mod immunize;
pub mod meanfield;
pub mod metrics;
pub mod net;
pub mod sir;

pub use error::{Error, Result};
pub use immunize::{SeasonHistory, Strategy, VaccinationSet};
pub use net::{DegreeDistribution, Network};
pub use sir::{EpidemicOutcome, NodeState, SpreadParams};
