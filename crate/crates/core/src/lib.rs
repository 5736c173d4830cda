//! Transmission rates and capacities of bosonic Gaussian channels whose
//! thermal noise is correlated across two consecutive uses.
//!
//! The crate builds the covariance matrices of the two-use channel (noise,
//! two-mode squeezed inputs, channel output, modulated mixture), computes
//! symplectic spectra and Gaussian entropies, and maximizes the per-mode
//! transmission rate over the trade-off between the degree of input
//! entanglement `eta` and the classical modulation correlation `y` under a
//! mean photon-number budget.
//!
//! All rates are in bits per mode. Optimal rates are called capacities under
//! the standard conjecture that Gaussian ensembles are optimal for Gaussian
//! channels with an energy constraint; see the [`rate`] module notes.

pub mod channel;
pub mod error;
pub mod gaussian;
pub mod optim;
pub mod rate;

pub use channel::{InputStrategy, NoiseModel, NoisePattern};
pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, SymplecticSpectrum};
pub use optim::{OptimizationResult, OptimizerOptions};
pub use rate::RatePoint;

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Maximum allowed asymmetry when validating covariance-matrix input.
    pub const SYMMETRY: f64 = 1e-12;
    /// Slack below a physicality bound (symplectic values below 1/2,
    /// negative discriminants) before input is rejected as unphysical.
    pub const PHYSICALITY: f64 = 1e-9;
    /// Required agreement between independent computation routes.
    pub const PATH_EQUIVALENCE: f64 = 1e-10;
    /// Arguments of the thermal entropy below this floor evaluate to 0.
    pub const G_ARG_FLOOR: f64 = 1e-12;
}
