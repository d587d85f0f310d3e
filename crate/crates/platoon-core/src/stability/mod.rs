//! Linear string-stability analysis.
//!
//! Around the uniform flow `x_i = h i + V(h) t`, each law linearizes to a
//! second-order system in the deviations `y_i`. Three complementary views are
//! implemented and cross-checked against each other:
//!
//! * closed-form criteria: predecessor-following is stable iff
//!   `a > 2 V'(h)`; the blended law (in its large-platoon limit) iff
//!   `(a + b)^2 / a > 2 V'(h)`; the leader-following law needs no condition
//!   at all; both roots of its mode quadratic always have negative real
//!   part;
//! * per-mode algebra on the ring: wave ansatz with ratio `r = e^{i theta}`,
//!   `theta = 2 pi k / N`, giving the quadratic
//!   `lambda^2 + damping lambda - coupling (e^{i theta} - 1) = 0`, plus the
//!   equivalent radical and reduced-polynomial forms of its sign condition;
//! * the assembled `2N x 2N` first-order systems with a verified dense
//!   eigensolve ([`spectral_abscissa`]), which is the arbiter wherever the
//!   closed forms are asymptotic.
//!
//! Verdicts use strict inequalities: an exactly neutral configuration counts
//! as unstable.

pub mod eigen;
mod linearized;
mod matrix;

pub use eigen::{
    eigensystem, eigenvalues, EigenDecomposition, EigenError, EigenPair, RESIDUAL_REL_TOL,
};
pub use linearized::{
    build_linearized, eigvec_ratio_check, leader_mode_ratio, leader_mode_ratio_prediction,
    spectral_abscissa, spectrum, EigvecRatioReport, LinearizedSystem,
};
pub use matrix::DenseMatrix;

use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use num_complex::Complex64;

use crate::math::{cos, sin, sqrt};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
}

impl Verdict {
    pub fn is_stable(self) -> bool {
        matches!(self, Verdict::Stable)
    }

    fn from_margin(margin: f64) -> Self {
        if margin > 0.0 {
            Verdict::Stable
        } else {
            Verdict::Unstable
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StabilityError {
    /// Leader-sensitivity fractions live in `[0, 1]`.
    InvalidFraction(f64),
}

impl fmt::Display for StabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityError::InvalidFraction(x) => {
                write!(f, "fraction {x} outside [0, 1]")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for StabilityError {}

/// Predecessor-following criterion: stable iff `a > 2 vp` (strict).
pub fn ovm_criterion(a: f64, vp: f64) -> Verdict {
    Verdict::from_margin(a - 2.0 * vp)
}

/// Blended-law criterion in the large-platoon limit: stable iff
/// `(a + b)^2 / a > 2 vp`. With `a = 0` the law degenerates to pure
/// leader-following, which is unconditionally stable.
pub fn tovm_criterion(a: f64, b: f64, vp: f64) -> Verdict {
    if a == 0.0 {
        return Verdict::Stable;
    }
    Verdict::from_margin((a + b) * (a + b) / a - 2.0 * vp)
}

/// Closed-form eigenvalue pair of the leader-following law's non-trivial
/// mode: roots of `lambda^2 + a lambda + a vp (1/(N-1) + 1) = 0`, i.e.
/// `lambda = (-a +- sqrt(a^2 + 4 a vp (-1/(N-1) - 1))) / 2`.
pub fn povm_eigenvalues(a: f64, vp: f64, n: usize) -> [Complex64; 2] {
    debug_assert!(n >= 2);
    let disc = Complex64::new(a * a + 4.0 * a * vp * (-1.0 / (n as f64 - 1.0) - 1.0), 0.0);
    let root = disc.sqrt();
    [(-a + root) / 2.0, (-a - root) / 2.0]
}

/// Roots of the ring-mode quadratic
/// `lambda^2 + damping lambda - coupling (e^{i theta} - 1) = 0`.
///
/// For the predecessor-following law pass `(a, a vp)`; for the blended law's
/// large-platoon limit pass `(a + b, a vp)`.
pub fn mode_quadratic_roots(damping: f64, coupling: f64, theta: f64) -> [Complex64; 2] {
    let ratio = Complex64::new(cos(theta), sin(theta));
    let disc = Complex64::new(damping * damping, 0.0)
        + 4.0 * coupling * (ratio - Complex64::new(1.0, 0.0));
    let root = disc.sqrt();
    [(-damping + root) / 2.0, (-damping - root) / 2.0]
}

/// Larger real part of the two mode roots.
pub fn mode_max_re(damping: f64, coupling: f64, theta: f64) -> f64 {
    let [r1, r2] = mode_quadratic_roots(damping, coupling, theta);
    r1.re.max(r2.re)
}

/// Radical form of the per-mode sign condition for the predecessor law:
/// the mode is stable iff `a - sqrt((d + sqrt(d^2 + e^2)) / 2) > 0` with
/// `d = a^2 + 4 a vp cos(theta) - 4 a vp` and `e = -4 a vp sin(theta)`.
/// This returns the left-hand margin.
pub fn mode_radical_margin(a: f64, vp: f64, theta: f64) -> f64 {
    let d = a * a + 4.0 * a * vp * cos(theta) - 4.0 * a * vp;
    let e = -4.0 * a * vp * sin(theta);
    a - sqrt(0.5 * (d + sqrt(d * d + e * e)))
}

/// Verdict form of [`mode_radical_margin`].
pub fn mode_radical_condition(a: f64, vp: f64, theta: f64) -> Verdict {
    Verdict::from_margin(mode_radical_margin(a, vp, theta))
}

/// Reduced polynomial form of the same condition: the mode is stable iff
/// `-vp cos^2(theta) + a cos(theta) + vp - a < 0`. Returns the polynomial
/// value (negative means stable).
pub fn mode_reduced_value(a: f64, vp: f64, theta: f64) -> f64 {
    let c = cos(theta);
    -vp * c * c + a * c + vp - a
}

/// One ring mode: index, angle, complex ratio, quadratic roots, and the
/// radical-form intermediates.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAnalysis {
    /// Mode index `k` in `1..=N`.
    pub k: usize,
    pub n: usize,
    /// `2 pi k / N`.
    pub theta: f64,
    /// `e^{i theta}`, the per-vehicle amplitude ratio of the mode.
    pub ratio: Complex64,
    /// Roots of the mode quadratic.
    pub lambda: [Complex64; 2],
    pub d: f64,
    pub e: f64,
}

/// Analyze mode `k` of an `N`-vehicle predecessor-following ring.
pub fn analyze_mode(a: f64, vp: f64, n: usize, k: usize) -> ModeAnalysis {
    debug_assert!(k >= 1 && k <= n);
    let theta = TAU * k as f64 / n as f64;
    ModeAnalysis {
        k,
        n,
        theta,
        ratio: Complex64::new(cos(theta), sin(theta)),
        lambda: mode_quadratic_roots(a, a * vp, theta),
        d: a * a + 4.0 * a * vp * cos(theta) - 4.0 * a * vp,
        e: -4.0 * a * vp * sin(theta),
    }
}

/// All `N` modes of the predecessor-following ring, `k = 1..=N` (mode `N` is
/// the neutral translation mode).
pub fn ring_mode_spectrum(a: f64, vp: f64, n: usize) -> Vec<ModeAnalysis> {
    (1..=n).map(|k| analyze_mode(a, vp, n, k)).collect()
}

/// Exact finite-`N` growth rate of the predecessor-following ring: the
/// largest real part over the non-translation modes `k = 1..N`.
pub fn ovm_finite_ring_abscissa(a: f64, vp: f64, n: usize) -> f64 {
    (1..n).map(|k| mode_max_re(a, a * vp, TAU * k as f64 / n as f64)).fold(f64::MIN, f64::max)
}

/// One neutral-stability line: threshold total sensitivity as a function of
/// `V'` at a fixed leader-sensitivity fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct NeutralLine {
    /// `b / (a + b)`.
    pub fraction: f64,
    /// `(vp, s_threshold)` samples; the region above the line is stable.
    pub points: Vec<(f64, f64)>,
    /// `fraction = 1` leaves pure leader-following, stable for any positive
    /// sensitivity; the line collapses to zero.
    pub degenerate: bool,
}

/// Neutral line of the blended law at fraction `f = b/(a+b)`: the large-`N`
/// criterion `(a+b)^2/a > 2 vp` with `a = s (1-f)` crosses neutrality at
/// `s = 2 vp (1 - f)`.
pub fn neutral_line(fraction: f64, vp_values: &[f64]) -> Result<NeutralLine, StabilityError> {
    if !(0.0..=1.0).contains(&fraction) || !fraction.is_finite() {
        return Err(StabilityError::InvalidFraction(fraction));
    }
    let degenerate = fraction == 1.0;
    let points = vp_values
        .iter()
        .map(|&vp| (vp, if degenerate { 0.0 } else { 2.0 * vp * (1.0 - fraction) }))
        .collect();
    Ok(NeutralLine { fraction, points, degenerate })
}
