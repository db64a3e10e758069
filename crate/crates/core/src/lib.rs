//! Simulator for a three-source fermionic interferometer whose coincidence
//! counts carry a GHZ-type parity law, plus a testbed for hidden-variable
//! models of those counts.
//!
//! The pipeline is
//!
//! ```
//! use fermi_ghz::measurement::{outcome_distribution, parity_expectation};
//! use fermi_ghz::optics::{simulate, CircuitConfig};
//! use std::f64::consts::PI;
//!
//! let run = simulate(&CircuitConfig::new(PI / 3.0, PI / 3.0, PI / 3.0));
//! assert!((run.keep_probability - 0.25).abs() < 1e-12);
//!
//! let dist = outcome_distribution(&run.final_state).unwrap();
//! assert!((parity_expectation(&dist) - 1.0).abs() < 1e-12);
//! ```
//!
//! Modules:
//!
//! * [`amplitude`]: sparse fermionic states and the ordering sign.
//! * [`optics`]: beam splitters, phase shifts, post-selection.
//! * [`measurement`]: outcome distributions, parity, sampling.
//! * [`hv_models`]: symmetric and asymmetric hidden-variable models.
//! * [`rng`]: the portable seeded generator.

pub mod amplitude;
pub mod error;
pub mod hv_models;
pub mod measurement;
pub mod optics;
pub mod rng;

pub use error::{Error, Result};
