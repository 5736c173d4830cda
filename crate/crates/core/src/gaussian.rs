//! Covariance matrices, symplectic spectra, and Gaussian-state entropies.
//!
//! Quadratures are ordered `[q1, p1, ..., qs, ps]` and the vacuum variance is
//! 1/2 (so `[q, p] = i`); every symplectic eigenvalue of a physical state is
//! at least 1/2 and pure states sit exactly at 1/2. Entropies are in bits.
//!
//! Two-mode spectra can be computed through two independent routes: a
//! closed-form biquadratic built from 2x2 block determinants, and a dense
//! eigenvalue decomposition valid for any mode count. The routes share no
//! code so that either can serve as an oracle for the other.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::tol;

/// Real symmetric covariance matrix of an `s`-mode Gaussian state.
///
/// Entries are symmetrized on construction, so downstream sums and congruence
/// transforms stay exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    modes: usize,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates shape, finiteness, and symmetry (within [`tol::SYMMETRY`]).
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return Err(Error::BadShape { rows, cols });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::Unphysical("non-finite matrix entry".into()));
        }
        let mut max_asym = 0.0f64;
        for i in 0..rows {
            for j in (i + 1)..rows {
                max_asym = max_asym.max((entries[(i, j)] - entries[(j, i)]).abs());
            }
        }
        if max_asym > tol::SYMMETRY {
            return Err(Error::NotSymmetric(max_asym));
        }
        let entries = 0.5 * (&entries + entries.transpose());
        Ok(Self {
            modes: rows / 2,
            entries,
        })
    }

    /// Builds a `2s x 2s` matrix from an entry function over `(row, col)`.
    pub fn from_fn(modes: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(DMatrix::from_fn(2 * modes, 2 * modes, f))
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Entry-wise sum; Gaussian channels act additively on covariances.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::BadModeCount {
                expected: self.modes,
                got: other.modes,
            });
        }
        Ok(Self {
            modes: self.modes,
            entries: &self.entries + &other.entries,
        })
    }
}

/// Moduli `|lambda_j|` of the symplectic eigenvalues, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    moduli: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn new(mut moduli: Vec<f64>) -> Result<Self> {
        if moduli.is_empty() || moduli.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::Unphysical(
                "spectrum moduli must be finite and nonnegative".into(),
            ));
        }
        moduli.sort_by(|a, b| b.partial_cmp(a).expect("finite moduli"));
        Ok(Self { moduli })
    }

    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }
}

/// Entropy in bits of a thermal state with mean photon number `x`:
/// `(x+1) log2(x+1) - x log2 x`, continued by 0 at `x = 0`.
pub fn g_entropy(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidPhotonNumber(x));
    }
    if x < tol::G_ARG_FLOOR {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

/// Inverse of [`g_entropy`]: the mean photon number whose thermal entropy is
/// `bits`. `g` is strictly increasing, so a bracketed bisection suffices.
pub fn g_entropy_inverse(bits: f64) -> Result<f64> {
    if !bits.is_finite() || bits < 0.0 {
        return Err(Error::OutOfRange {
            name: "bits",
            value: bits,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if bits == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0f64;
    while g_entropy(hi)? < bits {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::OutOfRange {
                name: "bits",
                value: bits,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g_entropy(mid)? < bits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Direct sum of per-mode symplectic blocks `[[0, 1], [-1, 0]]`.
fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Eigenvalues of `Omega^{-1} gamma` by real Schur decomposition. The QR
/// iteration can stall on exactly degenerate `+-i lambda` pairs, so a `None`
/// here is possible and callers fall back to [`spectrum_via_factorization`].
fn schur_raw_eigenvalues(gamma: &CovarianceMatrix) -> Option<Vec<Complex<f64>>> {
    // Omega^2 = -I, so Omega^{-1} = -Omega.
    let m = -(symplectic_form(gamma.modes()) * gamma.entries());
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)?;
    Some(schur.complex_eigenvalues().iter().copied().collect())
}

/// Spectrum through a positive-semidefinite factorization: with
/// `gamma = L L^T`, the matrix `K = L^T Omega L` is antisymmetric and similar
/// to `Omega gamma`, and `K^T K = -K^2` is symmetric with eigenvalues
/// `lambda_j^2`, each twice. Symmetric eigensolvers have no trouble with the
/// degenerate pairs that stall the QR iteration on `Omega^{-1} gamma`.
fn spectrum_via_factorization(gamma: &CovarianceMatrix) -> Result<Vec<f64>> {
    let eig =
        nalgebra::linalg::SymmetricEigen::try_new(gamma.entries().clone(), f64::EPSILON, 10_000)
            .ok_or(Error::EigenFailure)?;
    let mut factor = eig.eigenvectors;
    for (k, &d) in eig.eigenvalues.iter().enumerate() {
        if d < -tol::PHYSICALITY {
            return Err(Error::Unphysical(format!(
                "covariance matrix has negative eigenvalue {d:.3e}"
            )));
        }
        let scale = d.max(0.0).sqrt();
        for i in 0..factor.nrows() {
            factor[(i, k)] *= scale;
        }
    }
    let k = factor.transpose() * symplectic_form(gamma.modes()) * &factor;
    let mut moduli: Vec<f64> = (k.transpose() * &k)
        .symmetric_eigenvalues()
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).expect("finite moduli"));
    Ok(moduli
        .chunks_exact(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect())
}

/// Raw eigenvalues of `Omega^{-1} gamma`; for a physical state they are the
/// purely imaginary pairs `+-i lambda_j`, so the set is symmetric under
/// negation. When the Schur iteration stalls on a degenerate spectrum, the
/// pairs are reconstructed from the factorization route instead.
pub fn symplectic_raw_eigenvalues(gamma: &CovarianceMatrix) -> Result<Vec<Complex<f64>>> {
    if let Some(raw) = schur_raw_eigenvalues(gamma) {
        return Ok(raw);
    }
    Ok(spectrum_via_factorization(gamma)?
        .iter()
        .flat_map(|&l| [Complex::new(0.0, l), Complex::new(0.0, -l)])
        .collect())
}

/// Symplectic spectrum via a dense eigenvalue decomposition, collapsing each
/// `+-lambda_j` pair to one modulus. Valid for any mode count; the oracle for
/// the biquadratic route.
pub fn symplectic_spectrum_general(gamma: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    let moduli = match schur_raw_eigenvalues(gamma) {
        Some(raw) => {
            let mut m: Vec<f64> = raw.iter().map(|z| z.norm()).collect();
            m.sort_by(|a, b| b.partial_cmp(a).expect("finite moduli"));
            m.chunks_exact(2)
                .map(|pair| 0.5 * (pair[0] + pair[1]))
                .collect()
        }
        None => spectrum_via_factorization(gamma)?,
    };
    SymplecticSpectrum::new(moduli)
}

// ---------------------------------------------------------------------------
// Compensated arithmetic for the biquadratic route
//
// The discriminant delta^2 - 4 det(gamma) cancels catastrophically for
// near-degenerate spectra (pure squeezed inputs at large photon number would
// lose ~7 digits in plain f64), so the block determinants, the full
// determinant, and the discriminant are accumulated as unevaluated
// double-double sums and only collapsed at the end.
// ---------------------------------------------------------------------------

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    // requires |a| >= |b|
    let hi = a + b;
    Dd {
        hi,
        lo: b - (hi - a),
    }
}

fn two_sum(a: f64, b: f64) -> Dd {
    let hi = a + b;
    let bb = hi - a;
    Dd {
        hi,
        lo: (a - (hi - bb)) + (b - bb),
    }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let hi = a * b;
    Dd {
        hi,
        lo: f64::mul_add(a, b, -hi),
    }
}

impl Dd {
    fn value(self) -> f64 {
        self.hi + self.lo
    }

    fn add(self, other: Dd) -> Dd {
        let s = two_sum(self.hi, other.hi);
        quick_two_sum(s.hi, s.lo + self.lo + other.lo)
    }

    fn sub(self, other: Dd) -> Dd {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    fn mul(self, other: Dd) -> Dd {
        let p = two_prod(self.hi, other.hi);
        quick_two_sum(p.hi, p.lo + self.hi * other.lo + self.lo * other.hi)
    }

    fn scale_pow2(self, c: f64) -> Dd {
        Dd {
            hi: self.hi * c,
            lo: self.lo * c,
        }
    }
}

/// `m[(r0,c0)] m[(r1,c1)] - m[(r0,c1)] m[(r1,c0)]` without cancellation loss.
fn det2_dd(m: &DMatrix<f64>, r0: usize, c0: usize, r1: usize, c1: usize) -> Dd {
    two_prod(m[(r0, c0)], m[(r1, c1)]).sub(two_prod(m[(r0, c1)], m[(r1, c0)]))
}

/// 4x4 determinant by Laplace expansion in complementary 2x2 minors of the
/// first and last two rows, accumulated in double-double.
fn det4_dd(m: &DMatrix<f64>) -> Dd {
    let top = |c0: usize, c1: usize| det2_dd(m, 0, c0, 1, c1);
    let bot = |c0: usize, c1: usize| det2_dd(m, 2, c0, 3, c1);
    top(0, 1)
        .mul(bot(2, 3))
        .sub(top(0, 2).mul(bot(1, 3)))
        .add(top(0, 3).mul(bot(1, 2)))
        .add(top(1, 2).mul(bot(0, 3)))
        .sub(top(1, 3).mul(bot(0, 2)))
        .add(top(2, 3).mul(bot(0, 1)))
}

/// Two-mode spectrum from the biquadratic in the block determinants,
/// `lambda^4 - (|g1| + |g2| + 2|s12|) lambda^2 + |gamma| = 0`.
///
/// Discriminants and squared roots marginally below zero (within
/// [`tol::PHYSICALITY`]) are clamped; anything further negative is rejected
/// as unphysical input.
pub fn symplectic_spectrum_biquadratic(gamma: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    if gamma.modes() != 2 {
        return Err(Error::BadModeCount {
            expected: 2,
            got: gamma.modes(),
        });
    }
    let m = gamma.entries();
    let delta_dd = det2_dd(m, 0, 0, 1, 1)
        .add(det2_dd(m, 2, 2, 3, 3))
        .add(det2_dd(m, 0, 2, 1, 3).scale_pow2(2.0));
    let full_dd = det4_dd(m);
    let disc_dd = delta_dd.mul(delta_dd).sub(full_dd.scale_pow2(4.0));

    let delta = delta_dd.value();
    let full = full_dd.value();
    let mut disc = disc_dd.value();
    if disc < -tol::PHYSICALITY {
        return Err(Error::Unphysical(format!(
            "biquadratic discriminant {disc:.3e} is negative"
        )));
    }
    disc = disc.max(0.0);

    // Larger root directly, smaller via Vieta (product of roots = |gamma|)
    // to avoid cancellation when the roots are far apart.
    let large = 0.5 * (delta + disc.sqrt());
    let small = if large > 0.0 { full / large } else { 0.0 };
    let mut squared = [large, small];
    for s in &mut squared {
        if *s < -tol::PHYSICALITY {
            return Err(Error::Unphysical(format!(
                "biquadratic root {s:.3e} is negative"
            )));
        }
        *s = s.max(0.0);
    }
    SymplecticSpectrum::new(vec![squared[0].sqrt(), squared[1].sqrt()])
}

/// Von Neumann entropy in bits: `sum_j g(|lambda_j| - 1/2)` over the general
/// spectrum. Moduli marginally below 1/2 contribute 0.
pub fn entropy(gamma: &CovarianceMatrix) -> Result<f64> {
    let spectrum = symplectic_spectrum_general(gamma)?;
    let mut total = 0.0;
    for &l in spectrum.moduli() {
        if l < 0.5 - tol::PHYSICALITY {
            return Err(Error::Unphysical(format!(
                "symplectic eigenvalue {l} below 1/2"
            )));
        }
        total += g_entropy((l - 0.5).max(0.0))?;
    }
    Ok(total)
}

/// The 50/50 beam splitter as the orthogonal symplectic map sending
/// `(q1,p1,q2,p2)` to `(q+,p+,q-,p-)` with `q± = (q1 ± q2)/sqrt(2)` and
/// `p± = (p1 ± p2)/sqrt(2)`. Involutive, and preserves the spectrum.
pub fn beamsplitter_transform(gamma: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if gamma.modes() != 2 {
        return Err(Error::BadModeCount {
            expected: 2,
            got: gamma.modes(),
        });
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let s = DMatrix::from_row_slice(4, 4, &[
          h, 0.0,   h,  0.0,
        0.0,   h, 0.0,    h,
          h, 0.0,  -h,  0.0,
        0.0,   h, 0.0,   -h,
    ]);
    CovarianceMatrix::new(&s * gamma.entries() * s.transpose())
}
