//! Dense nonsymmetric eigensolver: balancing, Householder reduction to
//! Hessenberg form, Francis double-shift QR for the eigenvalues, then inverse
//! iteration on the saved Hessenberg matrix for one eigenvector per
//! eigenvalue.
//!
//! Every reported pair is verified a posteriori against the *original*
//! matrix: the returned unit vector `w` must satisfy
//! `||(M - lambda I) w|| <= RESIDUAL_REL_TOL * ||M||_F`, otherwise the solve
//! fails loudly rather than returning a doubtful spectrum. The QR iteration
//! itself follows the classic EISPACK/Jama `hqr` scheme (Wilkinson's
//! exceptional shift after 10 stalled sweeps, the alternative ad-hoc shift
//! after 30) with a hard per-eigenvalue sweep budget on top.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use super::matrix::DenseMatrix;
use crate::math::{abs, sqrt};

/// Acceptance bound for `||(M - lambda I) w|| / ||M||_F`.
pub const RESIDUAL_REL_TOL: f64 = 1e-8;

/// QR sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Inverse-iteration refinements per eigenvector.
const MAX_INVERSE_ITERATIONS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    /// Unit-norm right eigenvector.
    pub vector: Vec<Complex64>,
    /// `||(M - lambda I) w||` against the original matrix.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub pairs: Vec<EigenPair>,
    /// Frobenius norm of the input, the scale for residual bounds.
    pub matrix_norm: f64,
}

impl EigenDecomposition {
    pub fn values(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenError {
    EmptyMatrix,
    NonFiniteInput,
    /// QR iteration stalled: `remaining` eigenvalues undeflated after the
    /// sweep budget.
    NonConvergence { order: usize, remaining: usize, sweeps: usize },
    /// An eigenvector failed the residual bound even after refinement.
    ResidualTooLarge { value: Complex64, residual: f64, bound: f64 },
}

impl fmt::Display for EigenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenError::EmptyMatrix => write!(f, "eigensolve of an empty matrix"),
            EigenError::NonFiniteInput => write!(f, "matrix holds non-finite entries"),
            EigenError::NonConvergence { order, remaining, sweeps } => write!(
                f,
                "QR iteration did not converge: {remaining} of {order} eigenvalues undeflated after {sweeps} sweeps"
            ),
            EigenError::ResidualTooLarge { value, residual, bound } => write!(
                f,
                "eigenpair residual {residual:.3e} exceeds bound {bound:.3e} at lambda = {value}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EigenError {}

/// Full verified eigendecomposition of a real square matrix.
pub fn eigensystem(a: &DenseMatrix) -> Result<EigenDecomposition, EigenError> {
    let n = a.order();
    if n == 0 {
        return Err(EigenError::EmptyMatrix);
    }
    if !a.is_finite() {
        return Err(EigenError::NonFiniteInput);
    }
    let matrix_norm = a.frobenius_norm();
    if n == 1 {
        return Ok(EigenDecomposition {
            pairs: vec![EigenPair {
                value: Complex64::new(a[(0, 0)], 0.0),
                vector: vec![Complex64::new(1.0, 0.0)],
                residual: 0.0,
            }],
            matrix_norm,
        });
    }

    let (balanced, scale) = balance(a);
    let (hess, q) = hessenberg(balanced);
    let values = francis_eigenvalues(hess.clone())?;
    let hnorm = hess.frobenius_norm();

    let bound = RESIDUAL_REL_TOL * matrix_norm;
    let mut pairs = Vec::with_capacity(n);
    for value in values {
        let pair = resolve_pair(a, &hess, hnorm, &q, &scale, value)?;
        if pair.residual > bound {
            return Err(EigenError::ResidualTooLarge {
                value: pair.value,
                residual: pair.residual,
                bound,
            });
        }
        pairs.push(pair);
    }
    Ok(EigenDecomposition { pairs, matrix_norm })
}

/// Eigenvalues only (no vectors, no residual certification).
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>, EigenError> {
    let n = a.order();
    if n == 0 {
        return Err(EigenError::EmptyMatrix);
    }
    if !a.is_finite() {
        return Err(EigenError::NonFiniteInput);
    }
    if n == 1 {
        return Ok(vec![Complex64::new(a[(0, 0)], 0.0)]);
    }
    let (balanced, _) = balance(a);
    let (hess, _) = hessenberg(balanced);
    francis_eigenvalues(hess)
}

/// Eigenvector for one eigenvalue, with a Rayleigh-quotient retry if the
/// first residual misses the bound.
fn resolve_pair(
    a: &DenseMatrix,
    hess: &DenseMatrix,
    hnorm: f64,
    q: &DenseMatrix,
    scale: &[f64],
    value: Complex64,
) -> Result<EigenPair, EigenError> {
    let bound = RESIDUAL_REL_TOL * a.frobenius_norm();
    let mut best: Option<EigenPair> = None;
    let mut lambda = value;
    for _ in 0..3 {
        let v_hess = inverse_iteration(hess, hnorm, lambda);
        let vector = map_back(q, scale, &v_hess);
        let residual = residual_norm(a, lambda, &vector);
        let candidate = EigenPair { value: lambda, vector, residual };
        let improved = best.as_ref().is_none_or(|b| candidate.residual < b.residual);
        if improved {
            best = Some(candidate);
        }
        let current = best.as_ref().expect("set above");
        if current.residual <= bound {
            break;
        }
        // Rayleigh-quotient polish of the eigenvalue, then try again.
        lambda = rayleigh_quotient(a, &current.vector);
    }
    Ok(best.expect("at least one attempt"))
}

/// Iterative diagonal scaling (radix-2, exact) that roughly equalizes row and
/// column norms; returns the balanced matrix `D^-1 A D` and `diag(D)`.
fn balance(a: &DenseMatrix) -> (DenseMatrix, Vec<f64>) {
    let n = a.order();
    let mut m = a.clone();
    let mut scale = vec![1.0; n];
    let radix = 2.0f64;
    let sqr = radix * radix;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs(m[(j, i)]);
                    r += abs(m[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqr;
            }
            g = r * radix;
            while c >= g {
                f /= radix;
                c /= sqr;
            }
            if (c + r) / f < 0.95 * s {
                let ginv = 1.0 / f;
                scale[i] *= f;
                for j in 0..n {
                    m[(i, j)] *= ginv;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    (m, scale)
}

/// Householder reduction to upper Hessenberg form; returns `(H, Q)` with
/// `H = Q^T B Q` and `Q` orthogonal.
fn hessenberg(mut m: DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = m.order();
    // Reflector k zeroes column k below the subdiagonal; vs[k] spans rows
    // k+1..n.
    let mut vs: Vec<Vec<f64>> = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<f64> = (k + 1..n).map(|i| m[(i, k)]).collect();
        let norm = sqrt(v.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            vs.push(Vec::new());
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            vs.push(Vec::new());
            continue;
        }
        // Left: rows k+1.., columns k.. (earlier columns are already zero
        // below the subdiagonal).
        for j in k..n {
            let mut s = 0.0;
            for i in k + 1..n {
                s += v[i - (k + 1)] * m[(i, j)];
            }
            let s = 2.0 * s / vnorm2;
            for i in k + 1..n {
                m[(i, j)] -= s * v[i - (k + 1)];
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let mut s = 0.0;
            for j in k + 1..n {
                s += m[(i, j)] * v[j - (k + 1)];
            }
            let s = 2.0 * s / vnorm2;
            for j in k + 1..n {
                m[(i, j)] -= s * v[j - (k + 1)];
            }
        }
        m[(k + 1, k)] = alpha;
        for i in k + 2..n {
            m[(i, k)] = 0.0;
        }
        vs.push(v);
    }

    // Q = P_0 P_1 ... accumulated backward so each reflector touches the
    // trailing identity block only.
    let mut q = DenseMatrix::identity(n);
    for k in (0..vs.len()).rev() {
        let v = &vs[k];
        if v.is_empty() {
            continue;
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        for j in 0..n {
            let mut s = 0.0;
            for i in k + 1..n {
                s += v[i - (k + 1)] * q[(i, j)];
            }
            let s = 2.0 * s / vnorm2;
            for i in k + 1..n {
                q[(i, j)] -= s * v[i - (k + 1)];
            }
        }
    }
    (m, q)
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
// The control flow mirrors the classic hqr routine, including its shared
// scratch variables; some assignments are dead on specific paths.
#[allow(unused_assignments)]
fn francis_eigenvalues(mut hm: DenseMatrix) -> Result<Vec<Complex64>, EigenError> {
    let nn = hm.order() as isize;
    let mut d = vec![0.0f64; nn as usize];
    let mut e = vec![0.0f64; nn as usize];
    let low: isize = 0;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z, mut w, mut x, mut y) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += abs(hm[(i as usize, j as usize)]);
        }
    }

    let mut n = nn - 1;
    let mut iter = 0usize;
    let mut total_sweeps = 0usize;
    while n >= low {
        // Deflation point: single small subdiagonal element.
        let mut l = n;
        while l > low {
            s = abs(hm[((l - 1) as usize, (l - 1) as usize)]) + abs(hm[(l as usize, l as usize)]);
            if s == 0.0 {
                s = norm;
            }
            if abs(hm[(l as usize, (l - 1) as usize)]) < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One real root.
            let v = hm[(n as usize, n as usize)] + exshift;
            d[n as usize] = v;
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // A 2x2 block: real or complex pair.
            w = hm[(n as usize, (n - 1) as usize)] * hm[((n - 1) as usize, n as usize)];
            p = (hm[((n - 1) as usize, (n - 1) as usize)] - hm[(n as usize, n as usize)]) / 2.0;
            q = p * p + w;
            z = sqrt(abs(q));
            let xx = hm[(n as usize, n as usize)] + exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = xx + z;
                d[n as usize] = if z != 0.0 { xx - w / z } else { d[(n - 1) as usize] };
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
            } else {
                d[(n - 1) as usize] = xx + p;
                d[n as usize] = xx + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // Form the shift.
            x = hm[(n as usize, n as usize)];
            y = 0.0;
            w = 0.0;
            if l < n {
                y = hm[((n - 1) as usize, (n - 1) as usize)];
                w = hm[(n as usize, (n - 1) as usize)] * hm[((n - 1) as usize, n as usize)];
            }
            if iter == 10 {
                // Wilkinson's exceptional shift.
                exshift += x;
                for i in low..=n {
                    let ii = i as usize;
                    hm[(ii, ii)] -= x;
                }
                s = abs(hm[(n as usize, (n - 1) as usize)])
                    + abs(hm[((n - 1) as usize, (n - 2) as usize)]);
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = sqrt(s);
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        let ii = i as usize;
                        hm[(ii, ii)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_sweeps += 1;
            if iter > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(EigenError::NonConvergence {
                    order: nn as usize,
                    remaining: (n - low + 1) as usize,
                    sweeps: total_sweeps,
                });
            }

            // Two consecutive small subdiagonals let the sweep start late.
            let mut m = n - 2;
            while m >= l {
                z = hm[(m as usize, m as usize)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / hm[((m + 1) as usize, m as usize)]
                    + hm[(m as usize, (m + 1) as usize)];
                q = hm[((m + 1) as usize, (m + 1) as usize)] - z - r - s;
                r = hm[((m + 2) as usize, (m + 1) as usize)];
                s = abs(p) + abs(q) + abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if abs(hm[(m as usize, (m - 1) as usize)]) * (abs(q) + abs(r))
                    < eps
                        * (abs(p)
                            * (abs(hm[((m - 1) as usize, (m - 1) as usize)])
                                + abs(z)
                                + abs(hm[((m + 1) as usize, (m + 1) as usize)])))
                {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=n {
                let ii = i as usize;
                hm[(ii, ii - 2)] = 0.0;
                if i > m + 2 {
                    hm[(ii, ii - 3)] = 0.0;
                }
            }

            // Double QR sweep on rows l..n, columns m..n.
            for k in m..=(n - 1) {
                let notlast = k != n - 1;
                if k != m {
                    p = hm[(k as usize, (k - 1) as usize)];
                    q = hm[((k + 1) as usize, (k - 1) as usize)];
                    r = if notlast { hm[((k + 2) as usize, (k - 1) as usize)] } else { 0.0 };
                    x = abs(p) + abs(q) + abs(r);
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = sqrt(p * p + q * q + r * r);
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        hm[(k as usize, (k - 1) as usize)] = -s * x;
                    } else if l != m {
                        hm[(k as usize, (k - 1) as usize)] =
                            -hm[(k as usize, (k - 1) as usize)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in (k as usize)..(nn as usize) {
                        let mut pp = hm[(k as usize, j)] + q * hm[((k + 1) as usize, j)];
                        if notlast {
                            pp += r * hm[((k + 2) as usize, j)];
                            hm[((k + 2) as usize, j)] -= pp * z;
                        }
                        hm[(k as usize, j)] -= pp * x;
                        hm[((k + 1) as usize, j)] -= pp * y;
                    }

                    let imax = n.min(k + 3) as usize;
                    for i in 0..=imax {
                        let mut pp =
                            x * hm[(i, k as usize)] + y * hm[(i, (k + 1) as usize)];
                        if notlast {
                            pp += z * hm[(i, (k + 2) as usize)];
                            hm[(i, (k + 2) as usize)] -= pp * r;
                        }
                        hm[(i, k as usize)] -= pp;
                        hm[(i, (k + 1) as usize)] -= pp * q;
                    }
                }
            }
        }
    }

    Ok(d.into_iter().zip(e).map(|(re, im)| Complex64::new(re, im)).collect())
}

/// Complex LU of `(H - lambda I)` specialized to upper Hessenberg structure:
/// one multiplier per column, adjacent-row pivoting, zero pivots floored at
/// `eps * ||H||` so inverse iteration can divide by them.
struct HessSolver {
    n: usize,
    u: Vec<Complex64>,
    mult: Vec<Complex64>,
    swaps: Vec<bool>,
}

impl HessSolver {
    fn factor(h: &DenseMatrix, lambda: Complex64, pivot_floor: f64) -> Self {
        let n = h.order();
        let mut u = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let lo = i.saturating_sub(1);
            for j in lo..n {
                u[i * n + j] = Complex64::new(h[(i, j)], 0.0);
            }
            u[i * n + i] -= lambda;
        }
        let mut mult = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
        let mut swaps = vec![false; n.saturating_sub(1)];
        for k in 0..n.saturating_sub(1) {
            if u[(k + 1) * n + k].norm_sqr() > u[k * n + k].norm_sqr() {
                for j in k..n {
                    u.swap(k * n + j, (k + 1) * n + j);
                }
                swaps[k] = true;
            }
            if u[k * n + k].norm() < pivot_floor {
                u[k * n + k] = Complex64::new(pivot_floor, 0.0);
            }
            let m = u[(k + 1) * n + k] / u[k * n + k];
            mult[k] = m;
            u[(k + 1) * n + k] = Complex64::new(0.0, 0.0);
            for j in k + 1..n {
                let above = u[k * n + j];
                u[(k + 1) * n + j] -= m * above;
            }
        }
        if n > 0 && u[(n - 1) * n + (n - 1)].norm() < pivot_floor {
            u[(n - 1) * n + (n - 1)] = Complex64::new(pivot_floor, 0.0);
        }
        Self { n, u, mult, swaps }
    }

    fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        for k in 0..n.saturating_sub(1) {
            if self.swaps[k] {
                b.swap(k, k + 1);
            }
            let bk = b[k];
            b[k + 1] -= self.mult[k] * bk;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            let row = &self.u[i * n + i + 1..(i + 1) * n];
            for (uij, bj) in row.iter().zip(&b[i + 1..]) {
                acc -= uij * bj;
            }
            b[i] = acc / self.u[i * n + i];
        }
    }
}

fn norm2_complex(v: &[Complex64]) -> f64 {
    sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// Inverse iteration on the Hessenberg matrix; returns a unit vector in
/// Hessenberg coordinates.
fn inverse_iteration(hess: &DenseMatrix, hnorm: f64, lambda: Complex64) -> Vec<Complex64> {
    let n = hess.order();
    let pivot_floor = f64::EPSILON * hnorm.max(f64::MIN_POSITIVE);
    let solver = HessSolver::factor(hess, lambda, pivot_floor);
    let start = 1.0 / sqrt(n as f64);
    let mut v = vec![Complex64::new(start, 0.0); n];
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let mut y = v.clone();
        solver.solve_in_place(&mut y);
        let ny = norm2_complex(&y);
        if !ny.is_finite() || ny == 0.0 {
            break;
        }
        let inv = 1.0 / ny;
        for (slot, yi) in v.iter_mut().zip(&y) {
            *slot = yi * inv;
        }
        // ||(H - lambda) v_new|| = ||v_old|| / ||y||; tiny means converged.
        if inv <= 1e-13 * hnorm.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    v
}

/// Hessenberg coordinates -> balanced coordinates (apply Q) -> original
/// coordinates (undo the balancing scale), normalized.
fn map_back(q: &DenseMatrix, scale: &[f64], v: &[Complex64]) -> Vec<Complex64> {
    let n = q.order();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += v[j] * q[(i, j)];
        }
        w[i] = acc * scale[i];
    }
    let norm = norm2_complex(&w);
    if norm > 0.0 {
        let inv = 1.0 / norm;
        for z in &mut w {
            *z *= inv;
        }
    }
    w
}

fn residual_norm(a: &DenseMatrix, lambda: Complex64, w: &[Complex64]) -> f64 {
    let n = a.order();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    a.mul_complex(w, &mut out);
    for (oi, wi) in out.iter_mut().zip(w) {
        *oi -= lambda * wi;
    }
    norm2_complex(&out)
}

fn rayleigh_quotient(a: &DenseMatrix, w: &[Complex64]) -> Complex64 {
    let n = a.order();
    let mut aw = vec![Complex64::new(0.0, 0.0); n];
    a.mul_complex(w, &mut aw);
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (wi, awi) in w.iter().zip(&aw) {
        num += wi.conj() * awi;
        den += wi.norm_sqr();
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn sorted_by_re_im(mut vals: Vec<Complex64>) -> Vec<Complex64> {
        vals.sort_by(|a, b| {
            a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
        });
        vals
    }

    #[test]
    fn diagonal_matrix() {
        let mut m = DenseMatrix::zeros(4);
        for (i, v) in [3.0, -1.0, 0.5, 7.0].iter().enumerate() {
            m[(i, i)] = *v;
        }
        let dec = eigensystem(&m).unwrap();
        let vals = sorted_by_re_im(dec.values());
        let expect = [-1.0, 0.5, 3.0, 7.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v.re - e).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn companion_of_cubic() {
        // Companion matrix of x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3).
        let mut m = DenseMatrix::zeros(3);
        m[(0, 0)] = 6.0;
        m[(0, 1)] = -11.0;
        m[(0, 2)] = 6.0;
        m[(1, 0)] = 1.0;
        m[(2, 1)] = 1.0;
        let dec = eigensystem(&m).unwrap();
        let vals = sorted_by_re_im(dec.values());
        for (v, e) in vals.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v.re - e).abs() < 1e-9 && v.im.abs() < 1e-9, "{v} vs {e}");
        }
        assert!(dec.max_residual() <= RESIDUAL_REL_TOL * dec.matrix_norm);
    }

    #[test]
    fn rotation_scaling_pair() {
        let mut m = DenseMatrix::zeros(2);
        m[(0, 0)] = -0.3;
        m[(0, 1)] = 1.7;
        m[(1, 0)] = -1.7;
        m[(1, 1)] = -0.3;
        let dec = eigensystem(&m).unwrap();
        let vals = sorted_by_re_im(dec.values());
        assert!((vals[0].re + 0.3).abs() < 1e-12);
        assert!((vals[0].im + 1.7).abs() < 1e-12);
        assert!((vals[1].im - 1.7).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_toeplitz_closed_form() {
        // diag 2, off-diagonals -1: eigenvalues 2 - 2 cos(k pi / (n+1)).
        let n = 12;
        let m = DenseMatrix::from_fn(n, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        let dec = eigensystem(&m).unwrap();
        let mut got: Vec<f64> = dec.values().iter().map(|v| v.re).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (k, g) in (1..=n).zip(&got) {
            let expect = 2.0 - 2.0 * (k as f64 * core::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((g - expect).abs() < 1e-10, "k={k}: {g} vs {expect}");
            let im_ok = dec.values().iter().all(|v| v.im.abs() < 1e-10);
            assert!(im_ok);
        }
    }

    #[test]
    fn defective_jordan_block() {
        let mut m = DenseMatrix::zeros(2);
        m[(0, 0)] = 2.0;
        m[(0, 1)] = 1.0;
        m[(1, 1)] = 2.0;
        let dec = eigensystem(&m).unwrap();
        for p in &dec.pairs {
            assert!((p.value.re - 2.0).abs() < 1e-6 && p.value.im.abs() < 1e-6);
        }
    }

    #[test]
    fn trace_matches_eigenvalue_sum_on_random_matrices() {
        let mut rng = SplitMix64::new(2024);
        for trial in 0..20 {
            let n = 3 + (trial % 9);
            let m = DenseMatrix::from_fn(n, |_, _| rng.uniform(-2.0, 2.0));
            let dec = eigensystem(&m).unwrap();
            let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
            let sum: Complex64 = dec.values().iter().sum();
            assert!((sum.re - trace).abs() < 1e-8 * (1.0 + dec.matrix_norm));
            assert!(sum.im.abs() < 1e-8 * (1.0 + dec.matrix_norm));
            assert!(dec.max_residual() <= RESIDUAL_REL_TOL * dec.matrix_norm);
        }
    }

    #[test]
    fn cyclic_permutation_needs_the_exceptional_shift() {
        // Plain double shifts stall on a cyclic permutation matrix; the
        // ad-hoc exceptional shifts must kick in. Eigenvalues are the n-th
        // roots of unity.
        let n = 8;
        let m = DenseMatrix::from_fn(n, |i, j| if (i + 1) % n == j { 1.0 } else { 0.0 });
        let dec = eigensystem(&m).unwrap();
        for v in dec.values() {
            assert!((v.norm() - 1.0).abs() < 1e-9, "|{v}| != 1");
        }
        for k in 0..n {
            let theta = core::f64::consts::TAU * k as f64 / n as f64;
            let root = Complex64::new(theta.cos(), theta.sin());
            let dist = dec
                .values()
                .iter()
                .map(|v| (v - root).norm())
                .fold(f64::MAX, f64::min);
            assert!(dist < 1e-9, "missing root of unity {root}");
        }
        assert!(dec.max_residual() <= RESIDUAL_REL_TOL * dec.matrix_norm);
    }

    #[test]
    fn badly_scaled_matrix_benefits_from_balancing() {
        // Same spectrum as [[1, 1], [1, 1]] (0 and 2) but scaled by 1e8.
        let mut m = DenseMatrix::zeros(2);
        m[(0, 0)] = 1.0;
        m[(0, 1)] = 1e8;
        m[(1, 0)] = 1e-8;
        m[(1, 1)] = 1.0;
        let dec = eigensystem(&m).unwrap();
        let vals = sorted_by_re_im(dec.values());
        assert!((vals[0].re - 0.0).abs() < 1e-9);
        assert!((vals[1].re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn eigenvectors_satisfy_definition() {
        let mut rng = SplitMix64::new(7);
        let n = 8;
        let m = DenseMatrix::from_fn(n, |_, _| rng.uniform(-1.0, 1.0));
        let dec = eigensystem(&m).unwrap();
        for pair in &dec.pairs {
            let r = residual_norm(&m, pair.value, &pair.vector);
            assert!((r - pair.residual).abs() < 1e-12);
            let len = norm2_complex(&pair.vector);
            assert!((len - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(eigensystem(&DenseMatrix::zeros(0)), Err(EigenError::EmptyMatrix)));
        let mut m = DenseMatrix::zeros(2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(eigensystem(&m), Err(EigenError::NonFiniteInput)));
    }
}
