//! Assembled first-order form of the linearized platoon dynamics and the
//! numerically verified stability verdicts derived from it.
//!
//! State ordering is `[y_0 .. y_{N-1}, dy_0 .. dy_{N-1}]` with vehicle `N-1`
//! the leader, giving the block matrix `[[0, I], [K, D]]`: `K` holds the
//! `V'`-weighted position couplings of each law, `D` the velocity damping.
//! The linearization always closes the loop: the leader follows vehicle 0 by
//! the plain law (sensitivity `a`, or `a + b` for the blended model), which
//! is the configuration the closed-form analyses assume.
//!
//! Ring translation invariance puts the uniform shift `y = const` in the
//! kernel, contributing the physically neutral pair `{0, -damping}`. Those
//! two modes are identified by eigenvector shape (position block parallel to
//! the all-ones vector), not by eigenvalue magnitude, so genuinely slow modes
//! near neutral stability are never misclassified.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::eigen::{eigensystem, EigenDecomposition, EigenError};
use super::matrix::DenseMatrix;
use super::povm_eigenvalues;
use crate::math::sqrt;
use crate::models::{ModelKind, ModelSpec};

/// Cosine-similarity threshold for recognizing the uniform-shift modes.
const UNIFORM_MODE_COS: f64 = 1.0 - 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    pub matrix: DenseMatrix,
    pub model: ModelSpec,
    /// Slope `V'(h)` at the operating headway (1/s).
    pub vp: f64,
    /// Vehicle count (the matrix is `2N x 2N`).
    pub n: usize,
}

/// Assemble the `2N x 2N` linearization of `model` around a uniform flow
/// with OVF slope `vp`.
pub fn build_linearized(model: &ModelSpec, vp: f64, n: usize) -> LinearizedSystem {
    assert!(n >= 2, "linearization needs at least two vehicles");
    let a = model.a;
    let b = model.b;
    let mut m = DenseMatrix::zeros(2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
    }
    let leader = n - 1;
    let damping = model.damping();
    match model.kind {
        ModelKind::Ovm => {
            for i in 0..n {
                m[(n + i, (i + 1) % n)] += a * vp;
                m[(n + i, i)] -= a * vp;
            }
        }
        ModelKind::POvm => {
            for i in 0..leader {
                let c = a * vp / (leader - i) as f64;
                m[(n + i, leader)] += c;
                m[(n + i, i)] -= c;
            }
            m[(n + leader, 0)] += a * vp;
            m[(n + leader, leader)] -= a * vp;
        }
        ModelKind::TOvm => {
            for i in 0..leader {
                m[(n + i, i + 1)] += a * vp;
                m[(n + i, i)] -= a * vp;
                let c = b * vp / (leader - i) as f64;
                m[(n + i, leader)] += c;
                m[(n + i, i)] -= c;
            }
            m[(n + leader, 0)] += (a + b) * vp;
            m[(n + leader, leader)] -= (a + b) * vp;
        }
        ModelKind::FOvm => {
            for i in 0..n {
                m[(n + i, (i + 1) % n)] += a * vp;
                m[(n + i, i)] -= a * vp;
                m[(n + i, (i + 2) % n)] += 0.5 * b * vp;
                m[(n + i, i)] -= 0.5 * b * vp;
            }
        }
    }
    for i in 0..n {
        m[(n + i, n + i)] -= damping;
    }
    LinearizedSystem { matrix: m, model: *model, vp, n }
}

/// Verified eigendecomposition of the assembled system.
pub fn spectrum(sys: &LinearizedSystem) -> Result<EigenDecomposition, EigenError> {
    eigensystem(&sys.matrix)
}

/// Does the eigenvector's position block align with the all-ones direction?
fn is_uniform_shift(vector: &[Complex64], n: usize) -> bool {
    let y = &vector[..n];
    let dot: Complex64 = y.iter().sum();
    let norm = sqrt(y.iter().map(|z| z.norm_sqr()).sum());
    if norm == 0.0 {
        return false;
    }
    dot.norm() / (norm * sqrt(n as f64)) > UNIFORM_MODE_COS
}

/// Largest real part over the spectrum, excluding the neutral uniform-shift
/// pair `{0, -damping}`. Every eigenpair entering the verdict has passed the
/// solver's residual bound.
pub fn spectral_abscissa(sys: &LinearizedSystem) -> Result<f64, EigenError> {
    let dec = spectrum(sys)?;
    let mut excluded = 0usize;
    let mut max_re = f64::MIN;
    for pair in &dec.pairs {
        if excluded < 2 && is_uniform_shift(&pair.vector, sys.n) {
            excluded += 1;
            continue;
        }
        max_re = max_re.max(pair.value.re);
    }
    Ok(max_re)
}

/// Exact component ratio `y_j / y_N` (1-based `j`) of the leader-coupled
/// eigenmode of the leader-following law: `(N-1) / (N j - N^2 + N - 1)`.
/// Derived by substituting the mode's eigenvalue relation back into the
/// follower rows; hand-checkable at `j = N` (ratio 1) and `j = 1`
/// (ratio `-1/(N-1)`).
pub fn leader_mode_ratio(n: usize, j: usize) -> f64 {
    debug_assert!(j >= 1 && j <= n);
    let nf = n as f64;
    let jf = j as f64;
    (nf - 1.0) / (nf * jf - nf * nf + nf - 1.0)
}

/// The linear-profile ratio prediction `N - j + (j-1)/(N-1)` that
/// [`eigvec_ratio_check`] tests the computed eigenvector against.
pub fn leader_mode_ratio_prediction(n: usize, j: usize) -> f64 {
    debug_assert!(j >= 1 && j <= n);
    let nf = n as f64;
    let jf = j as f64;
    nf - jf + (jf - 1.0) / (nf - 1.0)
}

/// Comparison of a computed leader-following eigenvector against the
/// linear-profile ratio prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigvecRatioReport {
    /// Eigenvalue whose eigenvector was inspected (the closed-form mode root
    /// with positive imaginary part, matched in the computed spectrum).
    pub lambda: Complex64,
    /// Measured ratios `y_j / y_N`, indexed by `j - 1`.
    pub measured: Vec<Complex64>,
    /// Predicted ratios, same indexing.
    pub predicted: Vec<f64>,
    /// Largest relative deviation between measured and predicted.
    pub max_rel_error: f64,
    /// Whether every ratio matched within `1e-6` relative error.
    pub consistent: bool,
}

/// Check the leader-following law's closed-form eigenvalue's eigenvector
/// against the ratio prediction `y_j / y_N = N - j + (j-1)/(N-1)`.
///
/// The report carries the measured complex ratios so callers can see what
/// the eigenvector actually does when the prediction fails.
pub fn eigvec_ratio_check(a: f64, vp: f64, n: usize) -> Result<EigvecRatioReport, EigenError> {
    assert!(n >= 3);
    let model = ModelSpec { kind: ModelKind::POvm, a, b: 0.0, leader_rule: crate::models::LeaderRule::OvmFollowsFirst };
    let sys = build_linearized(&model, vp, n);
    let dec = spectrum(&sys)?;

    let target = povm_eigenvalues(a, vp, n)[0];
    let pair = dec
        .pairs
        .iter()
        .min_by(|p, q| {
            (p.value - target).norm().partial_cmp(&(q.value - target).norm()).unwrap()
        })
        .expect("nonempty spectrum");

    let y_leader = pair.vector[n - 1];
    let mut measured = Vec::with_capacity(n);
    let mut predicted = Vec::with_capacity(n);
    let mut max_rel_error = 0.0f64;
    for j in 1..=n {
        let ratio = pair.vector[j - 1] / y_leader;
        let expect = leader_mode_ratio_prediction(n, j);
        let scale = expect.abs().max(1e-12);
        let err = (ratio - Complex64::new(expect, 0.0)).norm() / scale;
        max_rel_error = max_rel_error.max(err);
        measured.push(ratio);
        predicted.push(expect);
    }
    Ok(EigvecRatioReport {
        lambda: pair.value,
        measured,
        predicted,
        max_rel_error,
        consistent: max_rel_error <= 1e-6,
    })
}
