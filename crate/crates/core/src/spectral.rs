//! Jordan chains and standard pairs.
//!
//! Chains at a point `a` are read off the nested kernels of the lower
//! triangular block Toeplitz matrices built from the Taylor coefficients of
//! `P` at `a`. Chains at infinity are chains of the reverse polynomial at 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, cmp_eigenvalues, direct_sum, dominant_column_space, hstack, identity, invert,
    least_squares, mat_pow, norm, nullspace, nullspace_relative, numerical_rank, numerical_rank_relative, poly_roots,
    polish_multiple_root, svd, zeros, ComplexMatrix,
    ComplexVector, Root, Tolerance, C64,
};
use crate::poly::MatrixPolynomial;

/// A finite eigenvalue or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EigenPoint {
    Finite(C64),
    Infinite,
}

/// Jordan chain `v₁, …, v_κ` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanChain {
    pub eigenvalue: EigenPoint,
    pub vectors: Vec<ComplexVector>,
}

impl JordanChain {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Largest scaled residual of the chain recurrences (at infinity: for the reverse).
    pub fn residual(&self, p: &MatrixPolynomial) -> f64 {
        let (poly, a) = match self.eigenvalue {
            EigenPoint::Finite(a) => (p.clone(), a),
            EigenPoint::Infinite => (p.reverse(), c64(0.0)),
        };
        let taylor: Vec<ComplexMatrix> =
            (0..self.len()).map(|j| poly.taylor_coeff(a, j)).collect();
        let scale = poly.scale_at(a).max(f64::MIN_POSITIVE);
        let vnorm = self.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
        (0..self.len())
            .map(|j| {
                let mut acc = ComplexVector::zeros(p.rows());
                for (i, t) in taylor.iter().enumerate().take(j + 1) {
                    acc += t * &self.vectors[j - i];
                }
                acc.norm() / (scale * vnorm.max(f64::MIN_POSITIVE))
            })
            .fold(0.0, f64::max)
    }
}

/// Eigenvalue and size of one diagonal block of `T` or `Z`.
///
/// For `Z` the eigenvalue is that of the block itself: 0 for the infinite
/// eigenvalue, `1/λ` for an inverted finite eigenvalue `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockInfo {
    pub eigenvalue: C64,
    pub size: usize,
}

impl BlockInfo {
    pub fn new(eigenvalue: C64, size: usize) -> Self {
        Self { eigenvalue, size }
    }
}

/// `([X, Y], T ⊕ Z)`, optionally with the block layout of `T` and `Z`.
///
/// When the layout is present, `T` and `Z` are block diagonal with upper
/// triangular blocks each carrying a single eigenvalue, so that leading
/// column prefixes of every block span invariant subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardPair {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub t: ComplexMatrix,
    pub z: ComplexMatrix,
    pub t_blocks: Option<Vec<BlockInfo>>,
    pub z_blocks: Option<Vec<BlockInfo>>,
}

/// Which way a spectral inversion moves blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InversionDirection {
    /// Move blocks of `T` onto the `Z` side as their inverses.
    FiniteToInfinite,
    /// Move invertible blocks of `Z` back onto the `T` side.
    InfiniteToFinite,
}

/// Result of [`verify_standard_pair`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub residual_finite: f64,
    pub residual_infinite: f64,
    pub rank: usize,
    pub rank_ok: bool,
}

impl PairReport {
    pub fn passes(&self, tol: &Tolerance) -> bool {
        self.rank_ok
            && self.residual_finite <= tol.residual_tol
            && self.residual_infinite <= tol.residual_tol
    }
}

/// Finite eigenvalues with partial multiplicities and the infinite partial multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassData {
    /// Eigenvalues in canonical order, partial multiplicities descending.
    pub finite: Vec<(C64, Vec<usize>)>,
    /// Descending.
    pub infinite: Vec<usize>,
}

impl WeierstrassData {
    pub fn finite_total(&self) -> usize {
        self.finite.iter().flat_map(|(_, m)| m).sum()
    }

    pub fn infinite_total(&self) -> usize {
        self.infinite.iter().sum()
    }

    /// Equality as multisets, eigenvalues compared within the cluster radius.
    /// Equal up to eigenvalue tolerance, ignoring the order of eigenvalues and
    /// of partial multiplicities.
    pub fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        let sorted = |v: &[usize]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v
        };
        if sorted(&self.infinite) != sorted(&other.infinite)
            || self.finite.len() != other.finite.len()
        {
            return false;
        }
        let mut used = vec![false; other.finite.len()];
        self.finite.iter().all(|(e, mults)| {
            let hit = other.finite.iter().enumerate().position(|(i, (f, m))| {
                !used[i] && sorted(m) == sorted(mults) && tol.same_eigenvalue(*e, *f)
            });
            match hit {
                Some(i) => {
                    used[i] = true;
                    true
                }
                None => false,
            }
        })
    }

    fn from_blocks(finite: Vec<(C64, usize)>, infinite: Vec<usize>, tol: &Tolerance) -> Self {
        let mut groups: Vec<(C64, Vec<usize>)> = Vec::new();
        for (e, size) in finite {
            match groups.iter_mut().find(|(g, _)| tol.same_eigenvalue(*g, e)) {
                Some((_, sizes)) => sizes.push(size),
                None => groups.push((e, vec![size])),
            }
        }
        for (_, sizes) in groups.iter_mut() {
            sizes.sort_unstable_by(|a, b| b.cmp(a));
        }
        groups.sort_by(|a, b| cmp_eigenvalues(&a.0, &b.0));
        let mut infinite = infinite;
        infinite.sort_unstable_by(|a, b| b.cmp(a));
        Self { finite: groups, infinite }
    }
}

impl StandardPair {
    /// A pair without block layout.
    pub fn new(x: ComplexMatrix, y: ComplexMatrix, t: ComplexMatrix, z: ComplexMatrix) -> Self {
        Self {
            x,
            y,
            t,
            z,
            t_blocks: None,
            z_blocks: None,
        }
    }

    pub fn with_blocks(
        x: ComplexMatrix,
        y: ComplexMatrix,
        t: ComplexMatrix,
        z: ComplexMatrix,
        t_blocks: Vec<BlockInfo>,
        z_blocks: Vec<BlockInfo>,
    ) -> Self {
        Self {
            x,
            y,
            t,
            z,
            t_blocks: Some(t_blocks),
            z_blocks: Some(z_blocks),
        }
    }

    /// Row dimension of `X` and `Y`.
    pub fn m(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.t.nrows()
    }

    pub fn q(&self) -> usize {
        self.z.nrows()
    }

    pub fn blocks(&self) -> Result<(&[BlockInfo], &[BlockInfo])> {
        match (&self.t_blocks, &self.z_blocks) {
            (Some(t), Some(z)) => Ok((t, z)),
            _ => Err(Error::NotJordan),
        }
    }

    pub fn check_dimensions(&self) -> Result<()> {
        let (m, p, q) = (self.m(), self.p(), self.q());
        let ok = self.x.ncols() == p
            && self.t.is_square()
            && self.y.nrows() == m
            && self.y.ncols() == q
            && self.z.is_square();
        if !ok {
            return Err(Error::DimensionMismatch(format!(
                "pair shapes X {:?}, Y {:?}, T {:?}, Z {:?}",
                self.x.shape(),
                self.y.shape(),
                self.t.shape(),
                self.z.shape()
            )));
        }
        if let (Some(tb), Some(zb)) = (&self.t_blocks, &self.z_blocks) {
            let ts: usize = tb.iter().map(|b| b.size).sum();
            let zs: usize = zb.iter().map(|b| b.size).sum();
            if ts != p || zs != q {
                return Err(Error::DimensionMismatch(
                    "block layout does not cover T and Z".into(),
                ));
            }
        }
        Ok(())
    }

    /// Gauge transform `([XG, YH], G⁻¹TG ⊕ H⁻¹ZH)`; drops the block layout.
    pub fn gauge(&self, g: &ComplexMatrix, h: &ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let gi = invert(g, tol)?;
        let hi = invert(h, tol)?;
        Ok(Self::new(
            &self.x * g,
            &self.y * h,
            &gi * &self.t * g,
            &hi * &self.z * h,
        ))
    }

    /// Spectral data encoded by the block layout: `T` eigenvalues and inverse
    /// nonzero `Z` eigenvalues are finite, zero `Z` blocks are infinite.
    pub fn weierstrass_data(&self, tol: &Tolerance) -> Result<WeierstrassData> {
        let (tb, zb) = self.blocks()?;
        let mut finite: Vec<(C64, usize)> = tb.iter().map(|b| (b.eigenvalue, b.size)).collect();
        let mut infinite = Vec::new();
        for b in zb {
            if is_zero_eigenvalue(b.eigenvalue, tol) {
                infinite.push(b.size);
            } else {
                finite.push((c64(1.0) / b.eigenvalue, b.size));
            }
        }
        Ok(WeierstrassData::from_blocks(finite, infinite, tol))
    }
}

pub(crate) fn is_zero_eigenvalue(e: C64, tol: &Tolerance) -> bool {
    e.norm() <= tol.cluster_radius
}

pub(crate) fn jordan_block(eigenvalue: C64, size: usize) -> ComplexMatrix {
    let mut j = identity(size) * eigenvalue;
    for i in 1..size {
        j[(i - 1, i)] = c64(1.0);
    }
    j
}

/// Rotates so that the first clearly nonzero entry is positive real, and scales to unit norm.
fn normalize_phase(v: &mut ComplexVector) {
    let nrm = v.norm();
    if nrm == 0.0 {
        return;
    }
    let biggest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-8 * biggest).copied() {
        let rot = lead.conj() / lead.norm() / nrm;
        *v *= rot;
    }
}

/// Columns indexed by the `count` smallest right singular directions of `m`.
fn weakest_directions(m: &ComplexMatrix, count: usize) -> ComplexMatrix {
    let cols = m.ncols();
    if count == 0 {
        return zeros(cols, 0);
    }
    if m.nrows() == 0 {
        return identity(cols).columns(0, count).into_owned();
    }
    let v = svd(m).v;
    ComplexMatrix::from_fn(cols, count, |r, c| v[(r, cols - 1 - c)])
}

/// Canonical system of Jordan chains of `p` at the finite point `a`.
///
/// `alg_mult`, when known, caps the growth of the Toeplitz system.
fn chains_at_point(
    p: &MatrixPolynomial,
    a: C64,
    alg_mult: Option<usize>,
    tol: &Tolerance,
) -> Result<Vec<Vec<ComplexVector>>> {
    let n = p.cols();
    let cap = alg_mult.unwrap_or(n * p.degree().max(1));
    let taylor: Vec<ComplexMatrix> = (0..cap.max(1)).map(|j| p.taylor_coeff(a, j)).collect();
    let scale = p.rank_scale_at(a);

    // kernels[l-1] is an orthonormal basis of ker T_l, T_l the l-block Toeplitz matrix.
    let mut kernels: Vec<ComplexMatrix> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut prev_dim = 0;
    for l in 1..=cap.max(1) {
        let mut toeplitz = zeros(n * l, n * l);
        for r in 0..l {
            for c in 0..=r {
                toeplitz
                    .view_mut((r * n, c * n), (n, n))
                    .copy_from(&taylor[r - c]);
            }
        }
        let kernel = nullspace_relative(&toeplitz, scale, tol);
        let dim = kernel.ncols();
        let mut grew = dim.saturating_sub(prev_dim);
        if let Some(&last) = counts.last() {
            grew = grew.min(last);
        }
        if grew == 0 {
            break;
        }
        counts.push(grew);
        kernels.push(kernel);
        prev_dim = dim;
        if alg_mult.is_some_and(|am| dim >= am) {
            break;
        }
    }
    if counts.is_empty() {
        return Err(Error::NotAnEigenvalue(format!("{a}")));
    }

    // Eigenvector spaces E_l = first block of ker T_l, dim counts[l-1].
    let levels = counts.len();
    let mut chosen: Vec<ComplexVector> = Vec::new();
    let mut chains: Vec<Vec<ComplexVector>> = Vec::new();
    for l in (1..=levels).rev() {
        let kernel = &kernels[l - 1];
        let head = kernel.rows(0, n).into_owned();
        let e_l = dominant_column_space(&head, counts[l - 1]);
        let fresh = counts[l - 1].saturating_sub(chosen.len());
        let chosen_mat = if chosen.is_empty() {
            zeros(n, 0)
        } else {
            ComplexMatrix::from_columns(&chosen)
        };
        let coords = weakest_directions(&(chosen_mat.adjoint() * &e_l), fresh);
        let new_vectors = &e_l * coords;
        for c in 0..new_vectors.ncols() {
            let mut v: ComplexVector = new_vectors.column(c).into_owned();
            normalize_phase(&mut v);
            let target = ComplexMatrix::from_column_slice(n, 1, v.as_slice());
            let coeff = least_squares(&head, &target, tol);
            let full = kernel * &coeff;
            let mut vectors: Vec<ComplexVector> = (0..l)
                .map(|b| full.view((b * n, 0), (n, 1)).column(0).into_owned())
                .collect();
            vectors[0] = v.clone();
            chosen.push(v);
            chains.push(vectors);
        }
    }
    Ok(chains)
}

fn finite_roots(p: &MatrixPolynomial, tol: &Tolerance) -> Result<(Vec<Root>, usize)> {
    let report = p.require_regular()?;
    let roots = if report.det_degree == 0 {
        Vec::new()
    } else {
        merge_by_structure(p, poly_roots(&report.det_poly, tol)?, tol)
    };
    Ok((roots, report.infinite_mult_total))
}

/// Taylor coefficients of `det P` at `c`, from samples on the circle `|z - c| = rho`.
fn local_det_taylor(p: &MatrixPolynomial, c: C64, rho: f64) -> Vec<C64> {
    let points = p.rows() * p.degree() + 1;
    let values: Vec<C64> = (0..points)
        .map(|j| {
            let w = C64::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / points as f64);
            p.eval(c + w).determinant()
        })
        .collect();
    (0..points)
        .map(|i| {
            let s: C64 = values
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    let ang =
                        -2.0 * std::f64::consts::PI * ((i * j) % points) as f64 / points as f64;
                    d * C64::from_polar(1.0, ang)
                })
                .sum();
            s / points as f64 / rho.powi(i as i32)
        })
        .collect()
}

/// Places a `g`-fold eigenvalue near `c` by Newton on the `(g-1)`-th
/// derivative of a local expansion of `det P`.
///
/// The expansion is taken on a small circle, so its rounding error follows
/// the size of `P` near the cluster rather than on a circle enclosing the
/// whole spectrum.
fn polish_eigenvalue(p: &MatrixPolynomial, c: C64, g: usize, spread: f64) -> C64 {
    if g == 0 || p.rows() == 0 {
        return c;
    }
    let unit = 1.0 + c.norm();
    let rho = (2.0 * spread).clamp(1e-2 * unit, 1e-1 * unit);
    let local = local_det_taylor(p, c, rho);
    let w = polish_multiple_root(&local, C64::new(rho * 1e-3, 0.0), g);
    if w.norm() <= 1e-4 * unit {
        c + w
    } else {
        c
    }
}

/// Joins neighbouring roots of `det P` into one eigenvalue when the Jordan
/// chains of `P` at the polished centroid account for their whole multiplicity.
///
/// Rounding in the determinant splits a `g`-fold eigenvalue by roughly
/// `(eps * cond)^(1/g)`, which can exceed both clustering stages.
fn merge_by_structure(
    p: &MatrixPolynomial,
    roots: Vec<Root>,
    tol: &Tolerance,
) -> Vec<Root> {
    let scale = roots.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
    let wide = 1e-2 * (1.0 + scale);
    let mut groups: Vec<Vec<Root>> = Vec::new();
    for r in roots {
        let hits: Vec<usize> = (0..groups.len())
            .filter(|&i| groups[i].iter().any(|m| (m.value - r.value).norm() <= wide))
            .collect();
        let mut joined = vec![r];
        for &i in hits.iter().rev() {
            joined.extend(groups.remove(i));
        }
        groups.push(joined);
    }
    let mut out = Vec::new();
    for group in groups {
        let g: usize = group.iter().map(|r| r.multiplicity).sum();
        let centroid = if group.iter().any(|r| r.value == c64(0.0)) {
            c64(0.0)
        } else {
            group.iter().map(|r| r.value * r.multiplicity as f64).sum::<C64>() / g as f64
        };
        let spread = group
            .iter()
            .map(|r| (r.value - centroid).norm())
            .fold(0.0, f64::max);
        if group.len() == 1 {
            let r = group[0];
            let value = if r.value == c64(0.0) {
                r.value
            } else {
                polish_eigenvalue(p, r.value, r.multiplicity, spread)
            };
            out.push(Root { value, ..r });
            continue;
        }
        let c = if centroid == c64(0.0) {
            centroid
        } else {
            polish_eigenvalue(p, centroid, g, spread)
        };
        let total = chains_at_point(p, c, Some(g), tol)
            .map(|chains| chains.iter().map(Vec::len).sum::<usize>())
            .unwrap_or(0);
        if total == g {
            out.push(Root {
                value: c,
                multiplicity: g,
            });
        } else {
            out.extend(group);
        }
    }
    out.sort_by(|a, b| cmp_eigenvalues(&a.value, &b.value));
    out
}

/// Maximal Jordan system of `p` at `point`.
pub fn jordan_chains_at(
    p: &MatrixPolynomial,
    point: EigenPoint,
    tol: &Tolerance,
) -> Result<Vec<JordanChain>> {
    let (roots, infinite_total) = finite_roots(p, tol)?;
    let (poly, a, mult) = match point {
        EigenPoint::Finite(a) => {
            let mult = roots
                .iter()
                .find(|r| tol.same_eigenvalue(r.value, a))
                .map(|r| r.multiplicity);
            (p.clone(), a, mult)
        }
        EigenPoint::Infinite => {
            if infinite_total == 0 {
                return Err(Error::NotAnEigenvalue("infinity".into()));
            }
            (p.reverse(), c64(0.0), Some(infinite_total))
        }
    };
    let chains = chains_at_point(&poly, a, mult, tol)?;
    Ok(chains
        .into_iter()
        .map(|vectors| JordanChain {
            eigenvalue: point,
            vectors,
        })
        .collect())
}

/// Chains at every finite eigenvalue, in canonical eigenvalue order.
pub fn all_finite_chains(p: &MatrixPolynomial, tol: &Tolerance) -> Result<Vec<JordanChain>> {
    let (roots, _) = finite_roots(p, tol)?;
    let mut out = Vec::new();
    for r in roots {
        for vectors in chains_at_point(p, r.value, Some(r.multiplicity), tol)? {
            out.push(JordanChain {
                eigenvalue: EigenPoint::Finite(r.value),
                vectors,
            });
        }
    }
    Ok(out)
}

fn chains_to_block(
    m: usize,
    chains: &[JordanChain],
) -> (ComplexMatrix, ComplexMatrix, Vec<BlockInfo>) {
    let cols: Vec<ComplexVector> = chains.iter().flat_map(|c| c.vectors.clone()).collect();
    let x = if cols.is_empty() {
        zeros(m, 0)
    } else {
        ComplexMatrix::from_columns(&cols)
    };
    let mut t = zeros(0, 0);
    let mut blocks = Vec::new();
    for c in chains {
        let e = match c.eigenvalue {
            EigenPoint::Finite(e) => e,
            EigenPoint::Infinite => c64(0.0),
        };
        t = direct_sum(&t, &jordan_block(e, c.len()));
        blocks.push(BlockInfo::new(e, c.len()));
    }
    (x, t, blocks)
}

/// Maximal Jordan pair with `T` carrying the finite and nilpotent `Z` the infinite spectrum.
pub fn maximal_standard_pair(p: &MatrixPolynomial, tol: &Tolerance) -> Result<StandardPair> {
    let (_, infinite_total) = finite_roots(p, tol)?;
    let finite = all_finite_chains(p, tol)?;
    let infinite = if infinite_total > 0 {
        jordan_chains_at(p, EigenPoint::Infinite, tol)?
    } else {
        Vec::new()
    };
    let m = p.cols();
    let (x, t, t_blocks) = chains_to_block(m, &finite);
    let (y, z, z_blocks) = chains_to_block(m, &infinite);
    Ok(StandardPair::with_blocks(x, y, t, z, t_blocks, z_blocks))
}

/// Weierstrass data of a regular polynomial computed from its Jordan chains.
pub fn weierstrass_data_of(p: &MatrixPolynomial, tol: &Tolerance) -> Result<WeierstrassData> {
    let pair = maximal_standard_pair(p, tol)?;
    pair.weierstrass_data(tol)
}

/// `Q_j`: block rows `[X T^i, Y Z^{j-1-i}]` for `i = 0..j`.
pub fn controllability(pair: &StandardPair, depth: usize) -> ComplexMatrix {
    let m = pair.m();
    let (p, q) = (pair.p(), pair.q());
    let mut out = zeros(m * depth, p + q);
    let mut xt = pair.x.clone();
    for i in 0..depth {
        out.view_mut((i * m, 0), (m, p)).copy_from(&xt);
        xt = &xt * &pair.t;
        let yz = &pair.y * mat_pow(&pair.z, depth - 1 - i);
        out.view_mut((i * m, p), (m, q)).copy_from(&yz);
    }
    out
}

fn mat_scale(m: &ComplexMatrix) -> f64 {
    norm(m).max(1.0)
}

/// Scaled residuals of both pair relations and the rank of `Q_k`.
pub fn verify_standard_pair(
    p: &MatrixPolynomial,
    pair: &StandardPair,
    tol: &Tolerance,
) -> Result<PairReport> {
    pair.check_dimensions()?;
    if pair.m() != p.cols() {
        return Err(Error::DimensionMismatch(format!(
            "pair has {} rows, polynomial has {} columns",
            pair.m(),
            p.cols()
        )));
    }
    let k = p.degree();
    let residual_finite = {
        let mut acc = zeros(p.rows(), pair.p());
        let mut xt = pair.x.clone();
        for a in p.coeffs() {
            acc += a * &xt;
            xt = &xt * &pair.t;
        }
        let scale = p.scale() * norm(&pair.x).max(f64::MIN_POSITIVE) * mat_scale(&pair.t).powi(k as i32);
        if pair.p() == 0 { 0.0 } else { norm(&acc) / scale }
    };
    let residual_infinite = {
        let mut acc = zeros(p.rows(), pair.q());
        let mut yz = pair.y.clone();
        for a in p.coeffs().iter().rev() {
            acc += a * &yz;
            yz = &yz * &pair.z;
        }
        let scale = p.scale() * norm(&pair.y).max(f64::MIN_POSITIVE) * mat_scale(&pair.z).powi(k as i32);
        if pair.q() == 0 { 0.0 } else { norm(&acc) / scale }
    };
    let rank = if pair.p() + pair.q() == 0 {
        0
    } else {
        numerical_rank(&controllability(pair, k), tol)
    };
    Ok(PairReport {
        residual_finite,
        residual_infinite,
        rank,
        rank_ok: rank == pair.p() + pair.q(),
    })
}

pub(crate) fn block_offsets(blocks: &[BlockInfo]) -> Vec<usize> {
    blocks
        .iter()
        .scan(0, |at, b| {
            let start = *at;
            *at += b.size;
            Some(start)
        })
        .collect()
}

pub(crate) fn select_columns(m: &ComplexMatrix, cols: &[usize]) -> ComplexMatrix {
    let mut out = zeros(m.nrows(), cols.len());
    for (j, &c) in cols.iter().enumerate() {
        out.set_column(j, &m.column(c));
    }
    out
}

pub(crate) fn diagonal_block(m: &ComplexMatrix, start: usize, size: usize) -> ComplexMatrix {
    m.view((start, start), (size, size)).into_owned()
}

/// Moves the blocks of the given nonzero eigenvalues between `T` and `Z`.
///
/// Eigenvalues are always eigenvalues of `P`: for
/// [`InversionDirection::InfiniteToFinite`] the `Z` blocks with eigenvalue
/// `1/λ` are moved back. Moved blocks are appended after the blocks already
/// present on the destination side for `InfiniteToFinite` and prepended for
/// `FiniteToInfinite`.
pub fn spectral_inversion(
    pair: &StandardPair,
    eigenvalues: &[C64],
    direction: InversionDirection,
    tol: &Tolerance,
) -> Result<StandardPair> {
    if eigenvalues.is_empty() {
        return Ok(pair.clone());
    }
    pair.check_dimensions()?;
    let (tb, zb) = pair.blocks()?;
    for &e in eigenvalues {
        if is_zero_eigenvalue(e, tol) {
            return Err(Error::ZeroEigenvalueInversion);
        }
    }
    let (src_m, src_mat, src_blocks, dst_m, dst_mat, dst_blocks) = match direction {
        InversionDirection::FiniteToInfinite => (&pair.x, &pair.t, tb, &pair.y, &pair.z, zb),
        InversionDirection::InfiniteToFinite => (&pair.y, &pair.z, zb, &pair.x, &pair.t, tb),
    };
    let matches = |b: &BlockInfo, e: C64| match direction {
        InversionDirection::FiniteToInfinite => tol.same_eigenvalue(b.eigenvalue, e),
        InversionDirection::InfiniteToFinite => {
            !is_zero_eigenvalue(b.eigenvalue, tol)
                && tol.same_eigenvalue(c64(1.0) / b.eigenvalue, e)
        }
    };
    for &e in eigenvalues {
        if !src_blocks.iter().any(|b| matches(b, e)) {
            return Err(Error::EigenvalueNotPresent(format!("{e}")));
        }
    }
    let offsets = block_offsets(src_blocks);
    let mut keep_cols = Vec::new();
    let mut keep_mat = zeros(0, 0);
    let mut keep_blocks = Vec::new();
    let mut move_cols = Vec::new();
    let mut move_mat = zeros(0, 0);
    let mut move_blocks = Vec::new();
    for (b, &start) in src_blocks.iter().zip(&offsets) {
        let block = diagonal_block(src_mat, start, b.size);
        let cols = start..start + b.size;
        if eigenvalues.iter().any(|&e| matches(b, e)) {
            move_cols.extend(cols);
            move_mat = direct_sum(&move_mat, &invert(&block, tol)?);
            move_blocks.push(BlockInfo::new(c64(1.0) / b.eigenvalue, b.size));
        } else {
            keep_cols.extend(cols);
            keep_mat = direct_sum(&keep_mat, &block);
            keep_blocks.push(*b);
        }
    }
    let m = pair.m();
    let kept = select_columns(src_m, &keep_cols);
    let moved = select_columns(src_m, &move_cols);
    Ok(match direction {
        InversionDirection::FiniteToInfinite => {
            let mut z_blocks = move_blocks;
            z_blocks.extend_from_slice(dst_blocks);
            StandardPair::with_blocks(
                kept,
                hstack(m, &[&moved, dst_m]),
                keep_mat,
                direct_sum(&move_mat, dst_mat),
                keep_blocks,
                z_blocks,
            )
        }
        InversionDirection::InfiniteToFinite => {
            let mut t_blocks = dst_blocks.to_vec();
            t_blocks.extend(move_blocks);
            StandardPair::with_blocks(
                hstack(m, &[dst_m, &moved]),
                kept,
                direct_sum(dst_mat, &move_mat),
                keep_mat,
                t_blocks,
                keep_blocks,
            )
        }
    })
}

/// Outcome of [`merge_pairs`].
#[derive(Debug, Clone, PartialEq)]
pub struct MergedPair {
    pub pair: StandardPair,
    pub rank: usize,
    pub controllable: bool,
}

/// Concatenates `X`s and `Y`s and takes direct sums of `T`s and `Z`s.
///
/// Controllability is re-checked at the given depth.
pub fn merge_pairs(pairs: &[StandardPair], depth: usize, tol: &Tolerance) -> Result<MergedPair> {
    let first = pairs
        .first()
        .ok_or_else(|| Error::DimensionMismatch("no pairs to merge".into()))?;
    let m = first.m();
    for pr in pairs {
        pr.check_dimensions()?;
        if pr.m() != m {
            return Err(Error::DimensionMismatch(format!(
                "pair row counts {} and {} differ",
                m,
                pr.m()
            )));
        }
    }
    let xs: Vec<&ComplexMatrix> = pairs.iter().map(|pr| &pr.x).collect();
    let ys: Vec<&ComplexMatrix> = pairs.iter().map(|pr| &pr.y).collect();
    let t = pairs.iter().fold(zeros(0, 0), |acc, pr| direct_sum(&acc, &pr.t));
    let z = pairs.iter().fold(zeros(0, 0), |acc, pr| direct_sum(&acc, &pr.z));
    let layout = |f: fn(&StandardPair) -> &Option<Vec<BlockInfo>>| -> Option<Vec<BlockInfo>> {
        pairs
            .iter()
            .map(|pr| f(pr).clone())
            .collect::<Option<Vec<_>>>()
            .map(|v| v.concat())
    };
    let pair = StandardPair {
        x: hstack(m, &xs),
        y: hstack(m, &ys),
        t,
        z,
        t_blocks: layout(|pr| &pr.t_blocks),
        z_blocks: layout(|pr| &pr.z_blocks),
    };
    let size = pair.p() + pair.q();
    let rank = if size == 0 {
        0
    } else {
        numerical_rank(&controllability(&pair, depth.max(1)), tol)
    };
    Ok(MergedPair {
        pair,
        rank,
        controllable: rank == size,
    })
}

/// Recovers `[A₀, …, A_k]` as the left kernel of the stacked `[X Tⁱ | Y Z^{k-i}]`.
///
/// The left `GL` freedom is fixed by making `A_k = I` when it is invertible,
/// else `A₀ = I` when that is invertible, else keeping orthonormal rows.
pub fn reconstruct_from_pair(
    pair: &StandardPair,
    degree: usize,
    tol: &Tolerance,
) -> Result<MatrixPolynomial> {
    pair.check_dimensions()?;
    let n = pair.m();
    let stacked = controllability(pair, degree + 1);
    let left = nullspace(&stacked.adjoint(), tol);
    if left.ncols() != n || pair.p() + pair.q() != n * degree {
        return Err(Error::RankDeficientPair {
            found: left.ncols(),
            expected: n,
        });
    }
    let rows = left.adjoint();
    let coeffs: Vec<ComplexMatrix> = (0..=degree)
        .map(|i| rows.view((0, i * n), (n, n)).into_owned())
        .collect();
    // The kernel rows are orthonormal, so blocks are judged against unit size.
    let normalizer = [degree, 0]
        .into_iter()
        .map(|i| &coeffs[i])
        .find(|a| numerical_rank_relative(a, 1.0, tol) == n)
        .map(|a| invert(a, tol))
        .transpose()?;
    let coeffs = match normalizer {
        Some(g) => coeffs.iter().map(|a| &g * a).collect(),
        None => coeffs,
    };
    MatrixPolynomial::new(coeffs)
}
