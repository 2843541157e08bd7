//! Secure key-generation rates of binary-modulated optical key distribution
//! against passive eavesdroppers using direct detection, homodyne detection,
//! minimum-error (Helstrom) measurements, or collective measurements bounded
//! by the Holevo quantity.
//!
//! The crate evaluates exact rates by Gaussian-weighted quadrature, maximizes
//! them over the modulation depth, reproduces the strong-eavesdropping
//! constants, and cross-checks everything with a Monte Carlo simulation of
//! protocol rounds.

pub mod cli;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod optimize;
pub mod quadrature;
pub mod rates;

pub use error::{Error, Result};
pub use model::{ChannelParams, Depths, ModulationScheme, Scenario};
pub use optimize::{optimal_rate, sweep, OptimizeConfig, SweepGrid, SweepRow, SweepTable};
pub use quadrature::QuadratureConfig;
pub use rates::RateResult;
