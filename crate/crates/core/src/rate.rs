//! Transmission-rate formulas: the single-use closed form and the two-use
//! rate `R(eta, y)`, via both closed-form symplectic values and the generic
//! covariance pipeline.
//!
//! "Capacity" here always means the maximum of the Gaussian-ensemble rate.
//! Promoting it to the channel capacity relies on the standard (unproven)
//! conjecture that Gaussian ensembles are optimal for Gaussian channels
//! under a mean photon-number constraint.

use crate::channel::{self, InputStrategy, NoiseModel, NoisePattern};
use crate::error::{Error, Result};
use crate::gaussian::{self, g_entropy, g_entropy_inverse};
use crate::tol;

/// One evaluated point of the rate surface.
///
/// `lambda_out` and `lambda_mix` are the per-mode symplectic values of the
/// output and mixture states; the rate always equals
/// `g(lambda_mix - 1/2) - g(lambda_out - 1/2)`. For the phase-sensitive
/// pattern the spectra are doubly degenerate and these are the actual
/// moduli; otherwise they are the per-mode effective values with the same
/// entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub eta: f64,
    pub y: f64,
    /// Per-mode transmission rate in bits.
    pub rate_bits_per_mode: f64,
    pub lambda_out: f64,
    pub lambda_mix: f64,
}

/// One-shot rate of the single-use thermal channel: `g(nbar + N) - g(N)`.
pub fn monomodal_capacity(nbar: f64, thermal_photons: f64) -> Result<f64> {
    if !nbar.is_finite() || nbar <= 0.0 {
        return Err(Error::OutOfRange {
            name: "nbar",
            value: nbar,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    Ok(g_entropy(nbar + thermal_photons)? - g_entropy(thermal_photons)?)
}

/// Symplectic value `sqrt(u^2 - v^2)` of a doubly degenerate two-mode state,
/// in the factored form `(u - v)(u + v)` to limit cancellation.
fn degenerate_lambda(u: f64, v: f64) -> Result<f64> {
    let d = (u - v) * (u + v);
    if d < -tol::PHYSICALITY {
        return Err(Error::Unphysical(format!(
            "u^2 - v^2 = {d:.3e} is negative"
        )));
    }
    Ok(d.max(0.0).sqrt())
}

/// Closed-form `R(eta, y)` for the phase-sensitive pattern, whose output and
/// mixture spectra are doubly degenerate with
/// `u_out = 1/2 + eta nbar + N`, `v_out = sqrt(eta nbar (1 + eta nbar)) + xN`,
/// `u_mix = 1/2 + nbar + N`, and `v_mix = v_out - y (1 - eta) nbar`.
pub fn rate_closed_form(strategy: &InputStrategy, model: &NoiseModel) -> Result<RatePoint> {
    if model.pattern() != NoisePattern::PhaseSensitive {
        return Err(Error::UnsupportedPattern);
    }
    let (eta, y, nbar) = (strategy.eta(), strategy.y(), strategy.nbar());
    let (n, x) = (model.thermal_photons(), model.memory());
    let a = eta * nbar;
    let squeeze = (a * (1.0 + a)).sqrt();
    let lambda_out = degenerate_lambda(0.5 + a + n, squeeze + x * n)?;
    let lambda_mix = degenerate_lambda(0.5 + nbar + n, squeeze + x * n - y * (1.0 - eta) * nbar)?;
    let rate = g_entropy((lambda_mix - 0.5).max(0.0))? - g_entropy((lambda_out - 0.5).max(0.0))?;
    Ok(RatePoint {
        eta,
        y,
        rate_bits_per_mode: rate,
        lambda_out,
        lambda_mix,
    })
}

/// Rate alone through the generic pipeline; used by the optimizer's hot
/// loop, which has no use for the effective symplectic values.
pub(crate) fn generic_rate_value(strategy: &InputStrategy, model: &NoiseModel) -> Result<f64> {
    let entropy_out = gaussian::entropy(&channel::output_covariance(strategy, model))?;
    let entropy_mix = gaussian::entropy(&channel::mixture_covariance(strategy, model))?;
    Ok(0.5 * (entropy_mix - entropy_out))
}

/// `R(eta, y)` through the full covariance pipeline: build the output and
/// mixture matrices, take entropies over the general spectrum, divide by
/// two for the per-mode rate. Valid for both noise patterns; agrees with
/// [`rate_closed_form`] to [`tol::PATH_EQUIVALENCE`] on the phase-sensitive
/// pattern.
pub fn rate_generic(strategy: &InputStrategy, model: &NoiseModel) -> Result<RatePoint> {
    let entropy_out = gaussian::entropy(&channel::output_covariance(strategy, model))?;
    let entropy_mix = gaussian::entropy(&channel::mixture_covariance(strategy, model))?;
    Ok(RatePoint {
        eta: strategy.eta(),
        y: strategy.y(),
        rate_bits_per_mode: 0.5 * (entropy_mix - entropy_out),
        lambda_out: 0.5 + g_entropy_inverse(0.5 * entropy_out)?,
        lambda_mix: 0.5 + g_entropy_inverse(0.5 * entropy_mix)?,
    })
}

/// Quadrature-variance squeezing of the input family in decibels:
/// `10 log10(e^{2r})` with `sinh^2 r = eta * nbar`.
pub fn squeezing_db(eta: f64, nbar: f64) -> f64 {
    let r = (eta * nbar).sqrt().asinh();
    20.0 * r / std::f64::consts::LN_10
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::beamsplitter_transform;
    use approx::assert_abs_diff_eq;

    // Frozen anchors from independent 40+-digit evaluation.
    const MONOMODAL_1_THIRD: f64 = 1.217_161_484_801_076_3;
    const RATE_AT_REFERENCE_POINT: f64 = 1.424_456_265_718_028;
    const LAMBDA_OUT_REFERENCE_POINT: f64 = 0.738_083_185_924_583_6;
    const LAMBDA_MIX_REFERENCE_POINT: f64 = 1.833_329_041_547_390_4;
    const RATE_SYMMETRIC_ANCHOR: f64 = 1.302_756_187_656_669_2;
    const DB_FULL_SQUEEZING: f64 = 7.655_513_706_757_261;
    const DB_REFERENCE_POINT: f64 = 3.675_421_755_644_297;

    fn strategy(eta: f64, y: f64, nbar: f64) -> InputStrategy {
        InputStrategy::new(eta, y, nbar).unwrap()
    }

    fn model(n: f64, x: f64, pattern: NoisePattern) -> NoiseModel {
        NoiseModel::new(n, x, pattern).unwrap()
    }

    #[test]
    fn monomodal_anchors() {
        assert_eq!(monomodal_capacity(1.0, 0.0).unwrap(), 2.0);
        assert_abs_diff_eq!(
            monomodal_capacity(1.0, 1.0 / 3.0).unwrap(),
            MONOMODAL_1_THIRD,
            epsilon = 1e-14
        );
        // continuity at nbar -> 0+
        assert!(monomodal_capacity(1e-12, 0.5).unwrap() < 1e-9);
        assert!(monomodal_capacity(0.0, 0.5).is_err());
        assert!(monomodal_capacity(1.0, -0.5).is_err());
    }

    #[test]
    fn monomodal_monotonicity() {
        let c = monomodal_capacity(1.0, 0.3).unwrap();
        assert!(monomodal_capacity(1.5, 0.3).unwrap() > c);
        assert!(monomodal_capacity(1.0, 0.5).unwrap() < c);
        assert!(c > 0.0);
    }

    #[test]
    fn closed_form_reduces_to_monomodal_when_memoryless() {
        let point = rate_closed_form(
            &strategy(0.0, 0.0, 1.0),
            &model(1.0 / 3.0, 0.0, NoisePattern::PhaseSensitive),
        )
        .unwrap();
        assert_abs_diff_eq!(
            point.rate_bits_per_mode,
            monomodal_capacity(1.0, 1.0 / 3.0).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn closed_form_matches_reference_point() {
        let point = rate_closed_form(
            &strategy(0.19, 0.88, 1.0),
            &model(1.0 / 3.0, 0.7, NoisePattern::PhaseSensitive),
        )
        .unwrap();
        assert_abs_diff_eq!(point.lambda_out, LAMBDA_OUT_REFERENCE_POINT, epsilon = 1e-12);
        assert_abs_diff_eq!(point.lambda_mix, LAMBDA_MIX_REFERENCE_POINT, epsilon = 1e-12);
        assert_abs_diff_eq!(
            point.rate_bits_per_mode,
            RATE_AT_REFERENCE_POINT,
            epsilon = 1e-12
        );
    }

    #[test]
    fn full_entanglement_transmits_nothing() {
        for y in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let point = rate_closed_form(
                &strategy(1.0, y, 2.0),
                &model(0.4, 0.6, NoisePattern::PhaseSensitive),
            )
            .unwrap();
            assert_abs_diff_eq!(point.rate_bits_per_mode, 0.0, epsilon = 1e-12);
            let generic = rate_generic(
                &strategy(1.0, y, 2.0),
                &model(0.4, 0.6, NoisePattern::Symmetric),
            )
            .unwrap();
            assert_abs_diff_eq!(generic.rate_bits_per_mode, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn closed_form_rejects_symmetric_pattern() {
        assert!(matches!(
            rate_closed_form(
                &strategy(0.1, 0.1, 1.0),
                &model(0.3, 0.5, NoisePattern::Symmetric)
            ),
            Err(Error::UnsupportedPattern)
        ));
    }

    #[test]
    fn generic_agrees_with_closed_form_on_a_grid() {
        let m = model(1.0 / 3.0, 0.7, NoisePattern::PhaseSensitive);
        for i in 0..=4 {
            for j in 0..=4 {
                let eta = i as f64 / 4.0;
                let y = j as f64 / 2.0 - 1.0;
                let s = strategy(eta, y, 1.0);
                let closed = rate_closed_form(&s, &m).unwrap();
                let generic = rate_generic(&s, &m).unwrap();
                assert_abs_diff_eq!(
                    closed.rate_bits_per_mode,
                    generic.rate_bits_per_mode,
                    epsilon = tol::PATH_EQUIVALENCE
                );
                assert_abs_diff_eq!(
                    closed.lambda_out,
                    generic.lambda_out,
                    epsilon = tol::PATH_EQUIVALENCE
                );
                assert_abs_diff_eq!(
                    closed.lambda_mix,
                    generic.lambda_mix,
                    epsilon = tol::PATH_EQUIVALENCE
                );
            }
        }
    }

    #[test]
    fn rate_point_invariant_holds_for_both_patterns() {
        for pattern in [NoisePattern::PhaseSensitive, NoisePattern::Symmetric] {
            let point =
                rate_generic(&strategy(0.35, -0.4, 1.7), &model(0.28, 0.55, pattern)).unwrap();
            let reconstructed = g_entropy(point.lambda_mix - 0.5).unwrap()
                - g_entropy(point.lambda_out - 0.5).unwrap();
            assert_abs_diff_eq!(point.rate_bits_per_mode, reconstructed, epsilon = 1e-10);
            assert!(point.rate_bits_per_mode >= -1e-9);
        }
    }

    #[test]
    fn symmetric_rate_matches_independent_anchor() {
        let point = rate_generic(
            &strategy(0.3, 0.6, 1.5),
            &model(0.5, 0.8, NoisePattern::Symmetric),
        )
        .unwrap();
        assert_abs_diff_eq!(
            point.rate_bits_per_mode,
            RATE_SYMMETRIC_ANCHOR,
            epsilon = 1e-11
        );
    }

    #[test]
    fn symmetric_pattern_rewards_no_entanglement() {
        // At y = 0 the unentangled input beats every eta > 0 on the grid.
        let m = model(1.0 / 3.0, 0.7, NoisePattern::Symmetric);
        let base = rate_generic(&strategy(0.0, 0.0, 1.0), &m)
            .unwrap()
            .rate_bits_per_mode;
        assert!(base > 0.0);
        for i in 1..=10 {
            let eta = i as f64 / 10.0;
            let r = rate_generic(&strategy(eta, 0.0, 1.0), &m)
                .unwrap()
                .rate_bits_per_mode;
            assert!(r < base, "eta = {eta} gave {r} >= {base}");
        }
    }

    #[test]
    fn rate_is_invariant_under_the_beamsplitter_basis() {
        // Entropies of the transformed output and mixture give the same rate.
        let s = strategy(0.42, 0.31, 2.2);
        for pattern in [NoisePattern::PhaseSensitive, NoisePattern::Symmetric] {
            let m = model(0.37, 0.81, pattern);
            let out = channel::output_covariance(&s, &m);
            let mix = channel::mixture_covariance(&s, &m);
            let direct =
                0.5 * (gaussian::entropy(&mix).unwrap() - gaussian::entropy(&out).unwrap());
            let rotated = 0.5
                * (gaussian::entropy(&beamsplitter_transform(&mix).unwrap()).unwrap()
                    - gaussian::entropy(&beamsplitter_transform(&out).unwrap()).unwrap());
            assert_abs_diff_eq!(direct, rotated, epsilon = tol::PATH_EQUIVALENCE);
        }
    }

    #[test]
    fn rate_nonnegative_across_the_box_sample() {
        let m = model(0.6, 0.9, NoisePattern::PhaseSensitive);
        for i in 0..=10 {
            for j in 0..=10 {
                let eta = i as f64 / 10.0;
                let y = j as f64 / 5.0 - 1.0;
                let r = rate_closed_form(&strategy(eta, y, 3.0), &m).unwrap();
                assert!(
                    r.rate_bits_per_mode >= -1e-9,
                    "negative rate at ({eta}, {y})"
                );
            }
        }
    }

    #[test]
    fn squeezing_decibel_anchors() {
        assert_eq!(squeezing_db(0.0, 1.0), 0.0);
        assert_abs_diff_eq!(squeezing_db(1.0, 1.0), DB_FULL_SQUEEZING, epsilon = 1e-12);
        assert_abs_diff_eq!(squeezing_db(0.19, 1.0), DB_REFERENCE_POINT, epsilon = 1e-12);
    }
}
