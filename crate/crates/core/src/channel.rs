//! Covariance-matrix constructors for two uses of a thermal channel whose
//! displacement noise is correlated across the uses.
//!
//! The channel acts additively on covariance matrices. In the phase-sensitive
//! pattern the q noise displacements are anticorrelated and the p ones
//! correlated, so two-mode squeezing can cancel part of the noise; in the
//! symmetric pattern both quadratures are correlated the same way and the
//! channel is phase-insensitive in the +/- basis.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;

/// How the added noise is correlated between the two channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisePattern {
    /// q anticorrelated, p correlated; entangled inputs can help.
    PhaseSensitive,
    /// Both quadratures anticorrelated; coherent inputs are optimal.
    Symmetric,
}

impl fmt::Display for NoisePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoisePattern::PhaseSensitive => write!(f, "phase-sensitive"),
            NoisePattern::Symmetric => write!(f, "symmetric"),
        }
    }
}

/// Thermal photon number `N` added per use and the memory coefficient
/// `x` in [0, 1] correlating the noise across the two uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    thermal_photons: f64,
    memory: f64,
    pattern: NoisePattern,
}

impl NoiseModel {
    pub fn new(thermal_photons: f64, memory: f64, pattern: NoisePattern) -> Result<Self> {
        if !thermal_photons.is_finite() || thermal_photons < 0.0 {
            return Err(Error::InvalidPhotonNumber(thermal_photons));
        }
        if !memory.is_finite() || !(0.0..=1.0).contains(&memory) {
            return Err(Error::OutOfRange {
                name: "memory",
                value: memory,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Self {
            thermal_photons,
            memory,
            pattern,
        })
    }

    pub fn thermal_photons(&self) -> f64 {
        self.thermal_photons
    }

    pub fn memory(&self) -> f64 {
        self.memory
    }

    pub fn pattern(&self) -> NoisePattern {
        self.pattern
    }
}

/// Input-ensemble parameters: the degree of entanglement `eta`, the classical
/// modulation correlation `y`, and the per-mode photon budget `nbar`.
///
/// Squeezing consumes `eta * nbar` photons per mode (`sinh^2 r = eta * nbar`)
/// and modulation the remaining `(1 - eta) * nbar`, so the budget is always
/// saturated. `|y| <= 1` keeps the modulation covariance positive
/// semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputStrategy {
    eta: f64,
    y: f64,
    nbar: f64,
}

impl InputStrategy {
    pub fn new(eta: f64, y: f64, nbar: f64) -> Result<Self> {
        if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
            return Err(Error::OutOfRange {
                name: "eta",
                value: eta,
                min: 0.0,
                max: 1.0,
            });
        }
        if !y.is_finite() || !(-1.0..=1.0).contains(&y) {
            return Err(Error::OutOfRange {
                name: "y",
                value: y,
                min: -1.0,
                max: 1.0,
            });
        }
        if !nbar.is_finite() || nbar <= 0.0 {
            return Err(Error::InvalidPhotonNumber(nbar));
        }
        Ok(Self { eta, y, nbar })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }
}

/// Two-mode matrix with constant diagonal and diagonal 2x2 coupling blocks
/// `diag(q_coupling, p_coupling)` between the modes.
fn coupled_pair(diag: f64, q_coupling: f64, p_coupling: f64) -> CovarianceMatrix {
    let mut m = DMatrix::zeros(4, 4);
    for i in 0..4 {
        m[(i, i)] = diag;
    }
    m[(0, 2)] = q_coupling;
    m[(2, 0)] = q_coupling;
    m[(1, 3)] = p_coupling;
    m[(3, 1)] = p_coupling;
    CovarianceMatrix::new(m).expect("symmetric by construction")
}

/// Noise covariance for the two uses: variance `N` per quadrature with
/// off-diagonal couplings `-xN` (q) and `+xN` or `-xN` (p) by pattern.
pub fn noise_covariance(model: &NoiseModel) -> CovarianceMatrix {
    let n = model.thermal_photons();
    let c = model.memory() * n;
    let p_sign = match model.pattern() {
        NoisePattern::PhaseSensitive => 1.0,
        NoisePattern::Symmetric => -1.0,
    };
    coupled_pair(n, -c, p_sign * c)
}

/// Two-mode squeezed vacuum with `sinh^2 r = eta * nbar`: q quadratures
/// correlated, p anticorrelated. Pure for every `eta`.
pub fn input_covariance(strategy: &InputStrategy) -> CovarianceMatrix {
    let a = strategy.eta() * strategy.nbar();
    let coupling = (a * (1.0 + a)).sqrt();
    coupled_pair(0.5 + a, -coupling, coupling)
}

/// Channel output: the input plus the noise covariance.
pub fn output_covariance(strategy: &InputStrategy, model: &NoiseModel) -> CovarianceMatrix {
    input_covariance(strategy)
        .sum(&noise_covariance(model))
        .expect("matching mode counts")
}

/// Classical modulation covariance: `(1 - eta) nbar` per quadrature with the
/// q displacements correlated by `+y` and the p ones by `-y`.
pub fn modulation_covariance(strategy: &InputStrategy) -> CovarianceMatrix {
    let m = (1.0 - strategy.eta()) * strategy.nbar();
    let c = strategy.y() * m;
    coupled_pair(m, c, -c)
}

/// Covariance of the modulated output ensemble: output plus modulation.
/// Saturates the energy constraint at `nbar` photons per mode.
pub fn mixture_covariance(strategy: &InputStrategy, model: &NoiseModel) -> CovarianceMatrix {
    output_covariance(strategy, model)
        .sum(&modulation_covariance(strategy))
        .expect("matching mode counts")
}
