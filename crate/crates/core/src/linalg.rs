//! Dense complex linear algebra kernel.
//!
//! Everything above this module works with [`ComplexMatrix`], a dense
//! `nalgebra` matrix over `Complex<f64>`, and a small set of rank-revealing
//! primitives (Jacobi SVD based rank and kernel, guarded inversion) plus the scalar
//! polynomial root finder used to locate finite eigenvalues.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Numerical thresholds shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Singular values below `rank_tol * max(rows, cols) * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Roots closer than `cluster_radius * (1 + max |root|)` are merged.
    pub cluster_radius: f64,
    /// Threshold for scaled residual checks.
    pub residual_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_tol: 1e-10,
            cluster_radius: 1e-7,
            residual_tol: 1e-8,
        }
    }
}

impl Tolerance {
    /// Derives the rank and clustering thresholds from a residual tolerance.
    pub fn from_residual(residual_tol: f64) -> Self {
        Self {
            rank_tol: residual_tol * 1e-2,
            cluster_radius: residual_tol * 1e3,
            residual_tol,
        }
    }

    /// Whether two eigenvalues belong to the same cluster.
    pub fn same_eigenvalue(&self, a: C64, b: C64) -> bool {
        (a - b).norm() <= self.cluster_radius * (1.0 + a.norm().max(b.norm()))
    }
}

/// Complex from a real number.
#[inline]
pub fn c64(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Builds a complex matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    assert_eq!(data.len(), rows * cols, "real_matrix: bad data length");
    ComplexMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c64(x)))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Frobenius norm.
pub fn norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum absolute row sum.
pub fn inf_norm(m: &ComplexMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Horizontal concatenation; all blocks must share the row count `rows`.
pub fn hstack(rows: usize, blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack: row mismatch");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Integer power by repeated multiplication.
pub fn mat_pow(m: &ComplexMatrix, e: usize) -> ComplexMatrix {
    let mut out = identity(m.nrows());
    for _ in 0..e {
        out = &out * m;
    }
    out
}

/// Thin singular value decomposition `A V = U Σ` with a full unitary `V`.
///
/// `s` is sorted in descending order and has one entry per column of `A`;
/// columns of `u` belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
///
/// nalgebra's complex bidiagonal SVD returns inaccurate factors on some
/// rank-deficient inputs; pairwise column orthogonalisation is slower but
/// exact to rounding at the sizes used here.
pub fn svd(a: &ComplexMatrix) -> Svd {
    let (rows, cols) = a.shape();
    let mut w = a.clone();
    let mut v = identity(cols);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for m in [&mut w, &mut v] {
                    for r in 0..m.nrows() {
                        let xp = m[(r, p)];
                        let xq = m[(r, q)] * phase;
                        m[(r, p)] = xp * c - xq * sn;
                        m[(r, q)] = xp * sn + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = zeros(rows, cols);
    let mut vs = zeros(cols, cols);
    let mut s = Vec::with_capacity(cols);
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        if sigma > 0.0 {
            u.set_column(k, &(w.column(j) / c64(sigma)));
        }
        vs.set_column(k, &v.column(j));
        s.push(sigma);
    }
    Svd { u, s, v: vs }
}

/// Singular values sorted in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s = svd(m).s;
    s.truncate(m.nrows().min(m.ncols()));
    s
}

fn rank_threshold(m: &ComplexMatrix, sigma_max: f64, tol: &Tolerance) -> f64 {
    tol.rank_tol * m.nrows().max(m.ncols()) as f64 * sigma_max
}

/// Number of singular values above `rank_tol * max(rows, cols) * sigma_max`.
pub fn numerical_rank(m: &ComplexMatrix, tol: &Tolerance) -> usize {
    numerical_rank_relative(m, 0.0, tol)
}

/// As [`numerical_rank`], measuring against `max(sigma_max, reference)`.
///
/// For an evaluation `P(a)`, `reference` is `Σ ‖A_i‖ |a|ⁱ`; without it a
/// `1 x 1` evaluation could never be rank deficient.
pub fn numerical_rank_relative(m: &ComplexMatrix, reference: f64, tol: &Tolerance) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    let thr = rank_threshold(m, smax.max(reference), tol);
    s.iter().filter(|&&x| x > thr).count()
}

/// Ratio of extreme singular values (infinite when singular).
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Orthonormal basis of the numerical kernel, one column per null direction.
pub fn nullspace(m: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    nullspace_relative(m, 0.0, tol)
}

/// As [`nullspace`], measuring against `max(sigma_max, reference)`.
pub fn nullspace_relative(m: &ComplexMatrix, reference: f64, tol: &Tolerance) -> ComplexMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return zeros(0, 0);
    }
    if rows == 0 {
        return identity(cols);
    }
    let d = svd(m);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let thr = rank_threshold(m, smax.max(reference), tol);
    let rank = d.s[..rows.min(cols)].iter().filter(|&&x| x > thr).count();
    d.v.columns(rank, cols - rank).into_owned()
}

/// Orthonormal basis (as columns) of the `count` dominant left singular directions.
pub fn dominant_column_space(m: &ComplexMatrix, count: usize) -> ComplexMatrix {
    let rows = m.nrows();
    if count == 0 || m.ncols() == 0 {
        return zeros(rows, 0);
    }
    let count = count.min(rows.min(m.ncols()));
    svd(m).u.columns(0, count).into_owned()
}

/// Inverse of a square matrix, rejecting numerically singular input.
pub fn invert(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let dim = m.nrows();
    if dim == 0 {
        return Ok(zeros(0, 0));
    }
    let rank = numerical_rank(m, tol);
    if rank < dim {
        return Err(Error::SingularMatrix { rank, dim });
    }
    m.clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularMatrix { rank, dim })
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn least_squares(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    if a.ncols() == 0 {
        return zeros(0, b.ncols());
    }
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let eps = rank_threshold(a, smax, tol);
    let mut x = zeros(a.ncols(), b.ncols());
    for (k, &sigma) in d.s.iter().enumerate() {
        if sigma > eps {
            let coeff = d.u.column(k).adjoint() * b / c64(sigma);
            x += d.v.column(k) * coeff;
        }
    }
    x
}

/// Eigenvalue ordering: real part descending, then imaginary part descending.
///
/// Real parts within a relative `1e-9` are treated as equal so that complex
/// conjugates and repeated values order stably.
pub fn cmp_eigenvalues(a: &C64, b: &C64) -> Ordering {
    let scale = 1e-9 * (1.0 + a.norm().max(b.norm()));
    if (a.re - b.re).abs() > scale {
        return b.re.total_cmp(&a.re);
    }
    if (a.im - b.im).abs() > scale {
        return b.im.total_cmp(&a.im);
    }
    Ordering::Equal
}

/// A polynomial with complex coefficients, `coeffs[i]` multiplying `λ^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarPolynomial {
    coeffs: Vec<C64>,
}

impl ScalarPolynomial {
    /// Trailing zero coefficients are trimmed.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == c64(0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![c64(1.0)];
        for &r in roots {
            let mut next = vec![c64(0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(c64(0.0), |acc, &c| acc * z + c)
    }
}

/// A (clustered) root with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: C64,
    pub multiplicity: usize,
}

const ROOT_MAX_ITER: usize = 1000;

/// All roots of `p` with multiplicity, clustered and sorted.
///
/// Exact zero low-order coefficients are deflated as roots at the origin; the
/// rest are found by Aberth–Ehrlich simultaneous iteration.
pub fn poly_roots(p: &ScalarPolynomial, tol: &Tolerance) -> Result<Vec<Root>> {
    let Some(deg) = p.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    let c = p.coeffs();
    let zeros_at_origin = c.iter().take_while(|z| **z == c64(0.0)).count();
    let mut raw = vec![c64(0.0); zeros_at_origin];
    if deg > zeros_at_origin {
        raw.extend(aberth(&c[zeros_at_origin..])?);
    }
    let clusters = cluster_roots(&raw, tol);
    let mut merged = merge_pseudo_roots(p, &raw, clusters, tol);
    for r in merged.iter_mut().filter(|r| r.multiplicity > 1) {
        r.value = polish_multiple_root(c, r.value, r.multiplicity);
    }
    Ok(coalesce(merged, tol))
}

/// Joins roots that landed on the same point, weighting by multiplicity.
fn coalesce(roots: Vec<Root>, tol: &Tolerance) -> Vec<Root> {
    let scale = roots.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
    let radius = tol.cluster_radius * (1.0 + scale);
    let mut out: Vec<Root> = Vec::new();
    for r in roots {
        match out.iter_mut().find(|o| (o.value - r.value).norm() <= radius) {
            Some(o) => {
                let g = o.multiplicity + r.multiplicity;
                if o.value != c64(0.0) {
                    o.value = (o.value * o.multiplicity as f64 + r.value * r.multiplicity as f64)
                        / g as f64;
                }
                o.multiplicity = g;
            }
            None => out.push(r),
        }
    }
    out.sort_by(|a, b| cmp_eigenvalues(&a.value, &b.value));
    out
}

/// Newton on `p^(g-1)`, where a `g`-fold root is simple (`g = 1` is plain Newton).
///
/// Aberth stops each copy of a multiple root once `|p|` is at rounding
/// level, about `eps^(1/g)` away; the centroid is no better than that.
pub(crate) fn polish_multiple_root(coeffs: &[C64], start: C64, g: usize) -> C64 {
    if g == 0 || start == c64(0.0) {
        return start;
    }
    let limit = 1e-4 * (1.0 + start.norm());
    let mut z = start;
    for _ in 0..20 {
        let f = taylor_coefficient(coeffs, z, g - 1);
        let df = taylor_coefficient(coeffs, z, g) * g as f64;
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        if !(step.re.is_finite() && step.im.is_finite()) || (z - step - start).norm() > limit {
            return start;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Merges neighbouring clusters whose union is indistinguishable from a
/// single multiple root at working precision.
///
/// A `g`-fold root perturbed by rounding splits by about `eps^(1/g)`, which
/// can exceed the clustering radius. A group of clusters within `1e-4` is
/// merged when `|t_g(c)| δ^g`, with `t_g` the `g`-th Taylor coefficient at
/// the centroid `c` and `δ` the group spread, stays at rounding level.
fn merge_pseudo_roots(
    p: &ScalarPolynomial,
    raw: &[C64],
    clusters: Vec<Root>,
    tol: &Tolerance,
) -> Vec<Root> {
    if clusters.len() < 2 {
        return clusters;
    }
    let scale = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let wide = 1e-4 * (1.0 + scale);
    let wide = wide.max(tol.cluster_radius * (1.0 + scale));
    let mut groups: Vec<Vec<Root>> = Vec::new();
    for r in clusters {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|m| (m.value - r.value).norm() <= wide))
        {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    let deg = p.degree().unwrap_or(0);
    let mut out = Vec::new();
    for group in groups {
        if group.len() == 1 {
            out.extend(group);
            continue;
        }
        let g: usize = group.iter().map(|r| r.multiplicity).sum();
        let centroid = if group.iter().any(|r| r.value == c64(0.0)) {
            c64(0.0)
        } else {
            group.iter().map(|r| r.value * r.multiplicity as f64).sum::<C64>() / g as f64
        };
        let spread = raw
            .iter()
            .filter(|z| group.iter().any(|r| (**z - r.value).norm() <= wide))
            .map(|z| (z - centroid).norm())
            .fold(0.0, f64::max);
        let taylor_g = taylor_coefficient(p.coeffs(), centroid, g);
        let bound: f64 = p
            .coeffs()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * centroid.norm() + c.norm());
        if taylor_g.norm() * spread.powi(g as i32) <= 64.0 * deg as f64 * f64::EPSILON * bound {
            out.push(Root {
                value: centroid,
                multiplicity: g,
            });
        } else {
            out.extend(group);
        }
    }
    out.sort_by(|a, b| cmp_eigenvalues(&a.value, &b.value));
    out
}

/// `p^{(j)}(c) / j!`.
fn taylor_coefficient(coeffs: &[C64], c: C64, j: usize) -> C64 {
    let mut binom = 1.0;
    let mut acc = c64(0.0);
    // Σ_{i≥j} C(i, j) a_i c^{i-j}, accumulated in increasing i.
    let mut power = c64(1.0);
    for (i, a) in coeffs.iter().enumerate().skip(j) {
        if i > j {
            binom = binom * i as f64 / (i - j) as f64;
            power *= c;
        }
        acc += a * binom * power;
    }
    acc
}

fn aberth(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let a: Vec<C64> = coeffs.iter().map(|&c| c / lead).collect();
    if n == 1 {
        return Ok(vec![-a[0]]);
    }
    let abs_a: Vec<f64> = a.iter().map(|z| z.norm()).collect();

    // Start on a circle whose radius matches the geometric mean of the roots.
    let radius = {
        let r = abs_a[0].powf(1.0 / n as f64);
        if r > 0.0 && r.is_finite() {
            r
        } else {
            1.0
        }
    };
    let mut z: Vec<C64> = (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.4;
            C64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; n];

    let eval = |x: C64| -> (C64, C64, f64) {
        let mut p = c64(0.0);
        let mut dp = c64(0.0);
        let mut bound = 0.0;
        let ax = x.norm();
        for (i, &ai) in a.iter().enumerate().rev() {
            dp = dp * x + p;
            p = p * x + ai;
            bound = bound * ax + abs_a[i];
        }
        (p, dp, bound)
    };

    for _ in 0..ROOT_MAX_ITER {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp, bound) = eval(z[i]);
            if p.norm() <= 16.0 * f64::EPSILON * n as f64 * bound {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let sum: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| c64(1.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (c64(1.0) - ratio * sum);
            if !(w.re.is_finite() && w.im.is_finite()) {
                // Perturb off a critical point.
                let nudge = C64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += nudge;
                continue;
            }
            z[i] -= w;
            if w.norm() <= f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence {
        iterations: ROOT_MAX_ITER,
    })
}

/// Single-linkage clustering within `cluster_radius * (1 + max |root|)`.
pub fn cluster_roots(raw: &[C64], tol: &Tolerance) -> Vec<Root> {
    let scale = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let radius = tol.cluster_radius * (1.0 + scale);
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (raw[i] - raw[j]).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for (i, &z) in raw.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(z),
            None => groups.push((r, vec![z])),
        }
    }
    let mut roots: Vec<Root> = groups
        .into_iter()
        .map(|(_, members)| {
            let exact_zero = members.iter().any(|z| *z == c64(0.0));
            let mean = members.iter().sum::<C64>() / members.len() as f64;
            Root {
                value: if exact_zero { c64(0.0) } else { mean },
                multiplicity: members.len(),
            }
        })
        .collect();
    roots.sort_by(|a, b| cmp_eigenvalues(&a.value, &b.value));
    roots
}

/// Full Jordan basis of a square matrix, computed as the Jordan chains of the
/// pencil `λI - A`.
pub fn matrix_jordan_structure(
    a: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Vec<crate::spectral::JordanChain>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let pencil = crate::poly::MatrixPolynomial::new(vec![-a.clone(), identity(a.nrows())])?;
    crate::spectral::all_finite_chains(&pencil, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn cplx(rows: usize, cols: usize, data: &[(f64, f64)]) -> ComplexMatrix {
        ComplexMatrix::from_row_iterator(rows, cols, data.iter().map(|&(r, i)| C64::new(r, i)))
    }

    #[test]
    fn jacobi_svd_on_rank_one_complex() {
        let u = cplx(3, 1, &[(0.3, -0.7), (1.1, 0.2), (-0.4, 0.9)]);
        let w = cplx(1, 2, &[(0.8, 0.5), (-0.2, 1.3)]);
        let m = &u * &w;
        let d = svd(&m);
        assert!(d.s[0] > 1.0 && d.s[1] < 1e-15);
        let rebuilt = &d.u * ComplexMatrix::from_diagonal(&DVector::from_iterator(2, d.s.iter().map(|&x| c64(x)))) * d.v.adjoint();
        assert!(norm(&(rebuilt - &m)) < 1e-14);
        assert!(norm(&(d.v.adjoint() * &d.v - identity(2))) < 1e-14);
        let target = u.clone() / c64(u.norm());
        let x = least_squares(&m, &target, &tol());
        assert!(norm(&(&m * x - target)) < 1e-14);
    }

    #[test]
    fn wide_svd_has_full_right_basis() {
        let m = real_matrix(1, 3, &[1., 2., 2.]);
        let d = svd(&m);
        assert_eq!(d.v.shape(), (3, 3));
        assert_eq!(singular_values(&m).len(), 1);
        assert!((d.s[0] - 3.0).abs() < 1e-14);
        assert_eq!(nullspace(&m, &tol()).ncols(), 2);
    }

    #[test]
    fn reference_scale_reveals_small_kernels() {
        let tiny = real_matrix(1, 1, &[1e-17]);
        assert_eq!(nullspace(&tiny, &tol()).ncols(), 0);
        assert_eq!(nullspace_relative(&tiny, 1.0, &tol()).ncols(), 1);
        assert_eq!(numerical_rank_relative(&tiny, 1.0, &tol()), 0);
    }

    #[test]
    fn multiple_roots_are_polished() {
        // (z - 1.3)^3 (z + 0.4): Aberth leaves the triple root spread out.
        let p = ScalarPolynomial::from_roots(&[c64(1.3), c64(1.3), c64(1.3), c64(-0.4)]);
        let roots = poly_roots(&p, &tol()).unwrap();
        let triple = roots.iter().find(|r| r.multiplicity == 3).expect("triple root");
        assert!((triple.value - c64(1.3)).norm() < 1e-12, "{}", triple.value);
    }

    #[test]
    fn rank_of_zero_and_rank_one() {
        assert_eq!(numerical_rank(&zeros(3, 3), &tol()), 0);
        assert_eq!(numerical_rank(&real_matrix(2, 2, &[1., 1., 1., 1.]), &tol()), 1);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(nullspace(&identity(2), &tol()).ncols(), 0);
        let n = nullspace(&real_matrix(2, 2, &[0., 1., 0., 0.]), &tol());
        assert_eq!(n.ncols(), 1);
        assert!((n[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(n[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let m = real_matrix(1, 3, &[1., 1., 0.]);
        let n = nullspace(&m, &tol());
        assert_eq!(n.ncols(), 2);
        assert!(norm(&(&m * &n)) < 1e-12);
    }

    #[test]
    fn invert_examples() {
        assert_eq!(invert(&identity(3), &tol()).unwrap(), identity(3));
        let x = real_matrix(2, 2, &[1., 1., 1., 8.]);
        let inv = invert(&x, &tol()).unwrap();
        let expected = real_matrix(2, 2, &[8. / 7., -1. / 7., -1. / 7., 1. / 7.]);
        assert!(norm(&(inv - expected)) < 1e-14);
        assert!(matches!(
            invert(&real_matrix(2, 2, &[1., 1., 1., 1.]), &tol()),
            Err(Error::SingularMatrix { rank: 1, dim: 2 })
        ));
    }

    #[test]
    fn roots_simple_cases() {
        let p = ScalarPolynomial::new(vec![c64(-1.), c64(0.), c64(1.)]);
        let r = poly_roots(&p, &tol()).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value - c64(1.)).norm() < 1e-12);
        assert!((r[1].value - c64(-1.)).norm() < 1e-12);

        let cube = ScalarPolynomial::new(vec![c64(0.), c64(0.), c64(0.), c64(1.)]);
        let r = poly_roots(&cube, &tol()).unwrap();
        assert_eq!(r, vec![Root { value: c64(0.), multiplicity: 3 }]);

        assert_eq!(
            poly_roots(&ScalarPolynomial::new(vec![]), &tol()),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn roots_cluster_double_root() {
        // (λ-2)^2 (λ+1)
        let p = ScalarPolynomial::from_roots(&[c64(2.), c64(2.), c64(-1.)]);
        let r = poly_roots(&p, &tol()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value - c64(2.)).norm() < 1e-7);
    }

    #[test]
    fn eigenvalue_ordering() {
        let mut v = vec![C64::new(0., 1.), C64::new(2., 0.), C64::new(0., -1.), c64(-2.)];
        v.sort_by(cmp_eigenvalues);
        assert_eq!(v, vec![c64(2.), C64::new(0., 1.), C64::new(0., -1.), c64(-2.)]);
    }

    #[test]
    fn jordan_structure_of_nilpotent_and_diagonal() {
        let nil = real_matrix(2, 2, &[0., 1., 0., 0.]);
        let chains = matrix_jordan_structure(&nil, &tol()).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].len(), 2);

        let d = real_matrix(2, 2, &[2., 0., 0., -2.]);
        let chains = matrix_jordan_structure(&d, &tol()).unwrap();
        assert_eq!(chains.len(), 2);
        assert!(chains.iter().all(|c| c.len() == 1));
    }
}
