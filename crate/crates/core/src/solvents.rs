//! Solvents, cosolvents and separable bisolvents built from chain prefixes of
//! a standard pair, plus the additive form of bisolvents.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, condition_number, direct_sum, hstack, identity, invert, mat_pow, norm,
    numerical_rank, numerical_rank_relative, zeros, ComplexMatrix, Tolerance, C64,
};
use crate::poly::MatrixPolynomial;
use crate::spectral::{
    block_offsets, diagonal_block, is_zero_eigenvalue, maximal_standard_pair, select_columns,
    spectral_inversion, BlockInfo, EigenPoint, InversionDirection, StandardPair,
};

/// Default cap on the number of selections visited by one enumeration.
pub const DEFAULT_MAX_SELECTIONS: usize = 1_000_000;

const CONDITION_WARNING: f64 = 1e10;
const MAX_IDEMPOTENTS: usize = 64;

/// Which blocks of a pair a selection may draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    TOnly,
    ZOnly,
    Both,
}

/// Leading prefixes of chains, given as `(block index, prefix length)` pairs
/// on each side of a pair with block layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubspaceSelection {
    pub t_prefixes: Vec<(usize, usize)>,
    pub z_prefixes: Vec<(usize, usize)>,
}

impl SubspaceSelection {
    pub fn dimension(&self) -> usize {
        let (p, q) = self.split();
        p + q
    }

    /// `(p̃, q̃)`: dimensions taken from the `T` side and the `Z` side.
    pub fn split(&self) -> (usize, usize) {
        let sum = |v: &[(usize, usize)]| v.iter().map(|&(_, l)| l).sum();
        (sum(&self.t_prefixes), sum(&self.z_prefixes))
    }

    /// Eigenvalues of `P` touched by the selection, where `z_blocks` come from
    /// a pair whose `Z` blocks with eigenvalue `μ ≠ 0` encode `1/μ`.
    pub fn eigen_points(&self, pair: &StandardPair, tol: &Tolerance) -> Result<Vec<EigenPoint>> {
        let (tb, zb) = pair.blocks()?;
        let mut out: Vec<EigenPoint> = self
            .t_prefixes
            .iter()
            .map(|&(b, _)| EigenPoint::Finite(tb[b].eigenvalue))
            .collect();
        for &(b, _) in &self.z_prefixes {
            let e = zb[b].eigenvalue;
            out.push(if is_zero_eigenvalue(e, tol) {
                EigenPoint::Infinite
            } else {
                EigenPoint::Finite(c64(1.0) / e)
            });
        }
        Ok(out)
    }
}

/// Restriction of a pair to a selection: `(X̃, T̃, Ỹ, Z̃)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    pub x: ComplexMatrix,
    pub t: ComplexMatrix,
    pub y: ComplexMatrix,
    pub z: ComplexMatrix,
}

/// Output of the enumerations.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult<T> {
    pub items: Vec<T>,
    /// Some found item has an eigenvalue of smaller geometric multiplicity
    /// than in `P`, so the items are representatives of a continuum.
    pub infinite_family: bool,
    /// `C(M, m)` with `M` the degree of `det P`.
    pub bound: u64,
    /// The selection cap was hit before the enumeration finished.
    pub truncated: bool,
    pub warnings: Vec<String>,
}

/// A solvent or cosolvent with the selection it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Solvent {
    pub matrix: ComplexMatrix,
    pub selection: SubspaceSelection,
    /// Cosolvents only: every selected block belongs to the infinite eigenvalue.
    pub nilpotent: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bisolvent {
    pub s1: ComplexMatrix,
    pub s2: ComplexMatrix,
    pub pi: ComplexMatrix,
    /// Further idempotents separating the same `(S₁, S₂)`.
    pub alternatives: Vec<ComplexMatrix>,
    pub selection: Option<SubspaceSelection>,
}

impl Bisolvent {
    pub fn new(s1: ComplexMatrix, s2: ComplexMatrix, pi: ComplexMatrix) -> Self {
        Self {
            s1,
            s2,
            pi,
            alternatives: Vec::new(),
            selection: None,
        }
    }

    pub fn size(&self) -> usize {
        self.s1.nrows()
    }

    /// `Π` followed by the alternatives.
    pub fn idempotents(&self) -> impl Iterator<Item = &ComplexMatrix> {
        std::iter::once(&self.pi).chain(self.alternatives.iter())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveBisolvent {
    pub p1: ComplexMatrix,
    pub p2: ComplexMatrix,
    pub pi: ComplexMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub value: f64,
    pub pass: bool,
}

impl Check {
    fn new(value: f64, tol: &Tolerance) -> Self {
        Self {
            value,
            pass: value <= tol.residual_tol,
        }
    }
}

/// Scaled residuals of the four bisolvent conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BisolventReport {
    pub commute: Check,
    pub idempotent: Check,
    pub separable: Check,
    pub residual: Check,
}

impl BisolventReport {
    pub fn all_pass(&self) -> bool {
        self.commute.pass && self.idempotent.pass && self.separable.pass && self.residual.pass
    }
}

/// Result of trying to read a bisolvent as a solvent or a cosolvent.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    /// `S₂⁻¹S₁` when `S₂` is invertible.
    pub solvent: Option<ComplexMatrix>,
    /// `S₁⁻¹S₂` when `S₁` is invertible.
    pub cosolvent: Option<ComplexMatrix>,
}

impl Reduction {
    pub fn is_neither(&self) -> bool {
        self.solvent.is_none() && self.cosolvent.is_none()
    }
}

fn rel_scale(m: &ComplexMatrix) -> f64 {
    norm(m).max(1.0)
}

/// `‖Σ A_i Sⁱ‖ / (Σ ‖A_i‖ max(1,‖S‖)ⁱ)`.
pub fn solvent_residual(p: &MatrixPolynomial, s: &ComplexMatrix) -> f64 {
    power_residual(p, s, false)
}

/// `‖Σ A_i S^{k-i}‖ / (Σ ‖A_i‖ max(1,‖S‖)^{k-i})`.
pub fn cosolvent_residual(p: &MatrixPolynomial, s: &ComplexMatrix) -> f64 {
    power_residual(p, s, true)
}

fn power_residual(p: &MatrixPolynomial, s: &ComplexMatrix, reversed: bool) -> f64 {
    let k = p.degree();
    let ns = rel_scale(s);
    let mut acc = zeros(p.rows(), s.ncols());
    let mut scale = 0.0;
    for i in 0..=k {
        let e = if reversed { k - i } else { i };
        let a = p.coeff(i);
        acc += &a * mat_pow(s, e);
        scale += norm(&a) * ns.powi(e as i32);
    }
    norm(&acc) / scale
}

/// `‖Σ A_i S₁ⁱ S₂^{k-i}‖` relative to `Σ ‖A_i‖ max(1,‖S₁‖)ⁱ max(1,‖S₂‖)^{k-i}`.
pub fn bisolvent_residual(p: &MatrixPolynomial, s1: &ComplexMatrix, s2: &ComplexMatrix) -> f64 {
    let k = p.degree();
    let (n1, n2) = (rel_scale(s1), rel_scale(s2));
    let mut acc = zeros(p.rows(), s1.ncols());
    let mut scale = 0.0;
    for i in 0..=k {
        let a = p.coeff(i);
        acc += &a * mat_pow(s1, i) * mat_pow(s2, k - i);
        scale += norm(&a) * n1.powi(i as i32) * n2.powi((k - i) as i32);
    }
    norm(&acc) / scale
}

/// Upper bound `C(M, m)` on the number of isolated solvents.
pub fn solvent_count_bound(p: &MatrixPolynomial) -> Result<u64> {
    let report = p.require_regular()?;
    Ok(binomial(report.det_degree, p.rows()))
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| {
        acc.saturating_mul((n - i) as u64) / (i as u64 + 1)
    })
}

/// All chain-prefix selections of total dimension `m`, in a fixed order:
/// blocks of `T` first, then of `Z`, each prefix length counting up from 0.
pub fn enumerate_selections(
    pair: &StandardPair,
    m: usize,
    side: Side,
) -> Result<Vec<SubspaceSelection>> {
    Ok(enumerate_selections_limited(pair, m, side, usize::MAX)?.0)
}

/// As [`enumerate_selections`], stopping after `limit` selections; the flag
/// reports whether the cap was reached.
pub fn enumerate_selections_limited(
    pair: &StandardPair,
    m: usize,
    side: Side,
    limit: usize,
) -> Result<(Vec<SubspaceSelection>, bool)> {
    let (tb, zb) = pair.blocks()?;
    let mut sizes: Vec<(bool, usize, usize)> = Vec::new();
    if side != Side::ZOnly {
        sizes.extend(tb.iter().enumerate().map(|(i, b)| (false, i, b.size)));
    }
    if side != Side::TOnly {
        sizes.extend(zb.iter().enumerate().map(|(i, b)| (true, i, b.size)));
    }
    let mut capacity = vec![0; sizes.len() + 1];
    for i in (0..sizes.len()).rev() {
        capacity[i] = capacity[i + 1] + sizes[i].2;
    }
    let mut out = Vec::new();
    let mut lengths = vec![0; sizes.len()];
    let mut truncated = false;
    walk(&sizes, &capacity, 0, m, &mut lengths, &mut out, limit, &mut truncated);
    let selections = out
        .into_iter()
        .map(|lengths: Vec<usize>| {
            let mut sel = SubspaceSelection {
                t_prefixes: Vec::new(),
                z_prefixes: Vec::new(),
            };
            for (&(on_z, block, _), &len) in sizes.iter().zip(&lengths) {
                if len > 0 {
                    if on_z {
                        sel.z_prefixes.push((block, len));
                    } else {
                        sel.t_prefixes.push((block, len));
                    }
                }
            }
            sel
        })
        .collect();
    Ok((selections, truncated))
}

#[allow(clippy::too_many_arguments)]
fn walk(
    sizes: &[(bool, usize, usize)],
    capacity: &[usize],
    at: usize,
    remaining: usize,
    lengths: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
    truncated: &mut bool,
) {
    if *truncated {
        return;
    }
    if at == sizes.len() {
        if remaining == 0 {
            if out.len() >= limit {
                *truncated = true;
                return;
            }
            out.push(lengths.clone());
        }
        return;
    }
    if capacity[at] < remaining {
        return;
    }
    for len in 0..=sizes[at].2.min(remaining) {
        lengths[at] = len;
        walk(sizes, capacity, at + 1, remaining - len, lengths, out, limit, truncated);
    }
    lengths[at] = 0;
}

fn restrict_side(
    vecs: &ComplexMatrix,
    mat: &ComplexMatrix,
    blocks: &[BlockInfo],
    prefixes: &[(usize, usize)],
) -> (ComplexMatrix, ComplexMatrix) {
    let offsets = block_offsets(blocks);
    let mut cols = Vec::new();
    let mut sub = zeros(0, 0);
    for &(b, len) in prefixes {
        cols.extend(offsets[b]..offsets[b] + len);
        sub = direct_sum(&sub, &diagonal_block(mat, offsets[b], len));
    }
    (select_columns(vecs, &cols), sub)
}

/// `(X̃, T̃, Ỹ, Z̃)` for a selection. Each block of `T` and `Z` is upper
/// triangular, so chain prefixes span invariant subspaces and the
/// restrictions are leading principal sub-blocks.
pub fn restrict(pair: &StandardPair, sel: &SubspaceSelection) -> Result<Restriction> {
    let (tb, zb) = pair.blocks()?;
    let (x, t) = restrict_side(&pair.x, &pair.t, tb, &sel.t_prefixes);
    let (y, z) = restrict_side(&pair.y, &pair.z, zb, &sel.z_prefixes);
    Ok(Restriction { x, t, y, z })
}

/// Rank slack used when comparing geometric multiplicities at computed eigenvalues.
fn geometry_tolerance(tol: &Tolerance) -> Tolerance {
    Tolerance {
        rank_tol: (tol.cluster_radius * 10.0).max(tol.rank_tol),
        ..*tol
    }
}

/// True when some eigenvalue of the pencil `λB - A` has a smaller geometric
/// multiplicity there than in `P`.
fn deficient_geometry(
    p: &MatrixPolynomial,
    b: &ComplexMatrix,
    a: &ComplexMatrix,
    points: &[EigenPoint],
    tol: &Tolerance,
) -> bool {
    let loose = geometry_tolerance(tol);
    let (n, m) = (p.rows(), b.nrows());
    points.iter().any(|point| {
        let (factor, f_scale, full, p_scale) = match *point {
            EigenPoint::Finite(e) => {
                (b * e - a, norm(b) * e.norm().max(1.0) + norm(a), p.eval(e), p.rank_scale_at(e))
            }
            EigenPoint::Infinite => (b.clone(), norm(b), p.leading().clone(), norm(p.leading())),
        };
        let geo_f = m - numerical_rank_relative(&factor, f_scale, &loose);
        let geo_p = n - numerical_rank_relative(&full, p_scale, &loose);
        geo_f > 0 && geo_f < geo_p
    })
}

fn conditioned_inverse(
    basis: &ComplexMatrix,
    tol: &Tolerance,
    warnings: &mut Vec<String>,
    what: &str,
) -> Option<ComplexMatrix> {
    if numerical_rank(basis, tol) < basis.ncols() {
        return None;
    }
    let cond = condition_number(basis);
    if cond > CONDITION_WARNING {
        warnings.push(format!("{what}: ill-conditioned basis (condition {cond:.3e})"));
    }
    invert(basis, tol).ok()
}

fn same_matrix(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    let scale = 1.0 + a.iter().chain(b.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= 1e-7 * scale)
}

fn push_unique(items: &mut Vec<Solvent>, s: Solvent) {
    if !items.iter().any(|o| same_matrix(&o.matrix, &s.matrix)) {
        items.push(s);
    }
}

/// Solvents `S = X̃T̃X̃⁻¹` from the `T`-only selections with invertible `X̃`.
pub fn solvents(p: &MatrixPolynomial, tol: &Tolerance) -> Result<EnumerationResult<Solvent>> {
    solvents_limited(p, tol, DEFAULT_MAX_SELECTIONS)
}

pub fn solvents_limited(
    p: &MatrixPolynomial,
    tol: &Tolerance,
    limit: usize,
) -> Result<EnumerationResult<Solvent>> {
    let bound = solvent_count_bound(p)?;
    let pair = maximal_standard_pair(p, tol)?;
    let m = p.rows();
    let (selections, truncated) = enumerate_selections_limited(&pair, m, Side::TOnly, limit)?;
    let mut out = EnumerationResult {
        items: Vec::new(),
        infinite_family: false,
        bound,
        truncated,
        warnings: Vec::new(),
    };
    for sel in selections {
        let r = restrict(&pair, &sel)?;
        let Some(xi) = conditioned_inverse(&r.x, tol, &mut out.warnings, "solvent") else {
            continue;
        };
        let s = &r.x * &r.t * xi;
        let residual = solvent_residual(p, &s);
        if residual > tol.residual_tol {
            out.warnings
                .push(format!("solvent candidate rejected, residual {residual:.3e}"));
            continue;
        }
        let points = sel.eigen_points(&pair, tol)?;
        out.infinite_family |= deficient_geometry(p, &identity(m), &s, &points, tol);
        push_unique(
            &mut out.items,
            Solvent {
                matrix: s,
                selection: sel,
                nilpotent: false,
                residual,
            },
        );
    }
    if truncated {
        out.warnings.push(format!("enumeration truncated at {limit} selections"));
    }
    Ok(out)
}

fn distinct_eigenvalues(blocks: &[BlockInfo], tol: &Tolerance) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for b in blocks {
        if !is_zero_eigenvalue(b.eigenvalue, tol)
            && !out.iter().any(|&e| tol.same_eigenvalue(e, b.eigenvalue))
        {
            out.push(b.eigenvalue);
        }
    }
    out
}

/// Maximal pair with every nonzero finite eigenvalue moved to the `Z` side.
pub fn inverted_pair(p: &MatrixPolynomial, tol: &Tolerance) -> Result<StandardPair> {
    let pair = maximal_standard_pair(p, tol)?;
    let (tb, _) = pair.blocks()?;
    let eigs = distinct_eigenvalues(tb, tol);
    spectral_inversion(&pair, &eigs, InversionDirection::FiniteToInfinite, tol)
}

/// Cosolvents `S = ỸZ̃Ỹ⁻¹` from `Z`-only selections of [`inverted_pair`].
pub fn cosolvents(p: &MatrixPolynomial, tol: &Tolerance) -> Result<EnumerationResult<Solvent>> {
    cosolvents_limited(p, tol, DEFAULT_MAX_SELECTIONS)
}

pub fn cosolvents_limited(
    p: &MatrixPolynomial,
    tol: &Tolerance,
    limit: usize,
) -> Result<EnumerationResult<Solvent>> {
    let bound = solvent_count_bound(p)?;
    let pair = inverted_pair(p, tol)?;
    let (_, zb) = pair.blocks()?;
    let m = p.rows();
    let (selections, truncated) = enumerate_selections_limited(&pair, m, Side::ZOnly, limit)?;
    let mut out = EnumerationResult {
        items: Vec::new(),
        infinite_family: false,
        bound,
        truncated,
        warnings: Vec::new(),
    };
    for sel in selections {
        let r = restrict(&pair, &sel)?;
        let Some(yi) = conditioned_inverse(&r.y, tol, &mut out.warnings, "cosolvent") else {
            continue;
        };
        let s = &r.y * &r.z * yi;
        let residual = cosolvent_residual(p, &s);
        if residual > tol.residual_tol {
            out.warnings
                .push(format!("cosolvent candidate rejected, residual {residual:.3e}"));
            continue;
        }
        let nilpotent = sel
            .z_prefixes
            .iter()
            .all(|&(b, _)| is_zero_eigenvalue(zb[b].eigenvalue, tol));
        let points = sel.eigen_points(&pair, tol)?;
        out.infinite_family |= deficient_geometry(p, &(-&s), &(-identity(m)), &points, tol);
        push_unique(
            &mut out.items,
            Solvent {
                matrix: s,
                selection: sel,
                nilpotent,
                residual,
            },
        );
    }
    if truncated {
        out.warnings.push(format!("enumeration truncated at {limit} selections"));
    }
    Ok(out)
}

/// Canonical bisolvent of a selection:
/// `S₁ = Q₀(T̃⊕I)Q₀⁻¹`, `S₂ = Q₀(I⊕Z̃)Q₀⁻¹`, `Π = Q₀(I⊕0)Q₀⁻¹` with `Q₀ = [X̃, Ỹ]`.
pub fn bisolvent_from_selection(
    pair: &StandardPair,
    sel: &SubspaceSelection,
    tol: &Tolerance,
) -> Result<Bisolvent> {
    let mut warnings = Vec::new();
    let (b, _) = bisolvent_with_q0(pair, sel, tol, &mut warnings)?;
    Ok(b)
}

fn bisolvent_with_q0(
    pair: &StandardPair,
    sel: &SubspaceSelection,
    tol: &Tolerance,
    warnings: &mut Vec<String>,
) -> Result<(Bisolvent, (ComplexMatrix, ComplexMatrix))> {
    let m = pair.m();
    if sel.dimension() != m {
        return Err(Error::DimensionMismatch(format!(
            "selection of dimension {} for m = {m}",
            sel.dimension()
        )));
    }
    let r = restrict(pair, sel)?;
    let (pt, qt) = sel.split();
    let q0 = hstack(m, &[&r.x, &r.y]);
    let q0i = conditioned_inverse(&q0, tol, warnings, "bisolvent").ok_or(Error::SingularQ0)?;
    let s1 = &q0 * direct_sum(&r.t, &identity(qt)) * &q0i;
    let s2 = &q0 * direct_sum(&identity(pt), &r.z) * &q0i;
    let pi = &q0 * direct_sum(&identity(pt), &zeros(qt, qt)) * &q0i;
    let mut b = Bisolvent::new(s1, s2, pi);
    b.selection = Some(sel.clone());
    Ok((b, (q0, q0i)))
}

/// Columns of `T̃` that are size-one prefixes at the eigenvalue 1; moving any
/// subset of them to the `Z` side keeps `(S₁, S₂)` and changes `Π`.
fn unit_columns(pair: &StandardPair, sel: &SubspaceSelection, tol: &Tolerance) -> Result<Vec<usize>> {
    let (tb, _) = pair.blocks()?;
    let mut at = 0;
    let mut out = Vec::new();
    for &(b, len) in &sel.t_prefixes {
        if len == 1 && tol.same_eigenvalue(tb[b].eigenvalue, c64(1.0)) {
            out.push(at);
        }
        at += len;
    }
    Ok(out)
}

fn alternative_idempotents(
    q0: &ComplexMatrix,
    q0i: &ComplexMatrix,
    p_tilde: usize,
    unit: &[usize],
) -> Vec<ComplexMatrix> {
    let m = q0.nrows();
    let subsets = (1u64 << unit.len().min(16)) - 1;
    (1..=subsets)
        .take(MAX_IDEMPOTENTS)
        .map(|mask| {
            let mut d = zeros(m, m);
            for i in 0..p_tilde {
                d[(i, i)] = c64(1.0);
            }
            for (bit, &col) in unit.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    d[(col, col)] = c64(0.0);
                }
            }
            q0 * d * q0i
        })
        .collect()
}

/// All separable bisolvents over the maximal pair, with equal `(S₁, S₂)`
/// merged into one record carrying every separating idempotent found.
pub fn bisolvents(p: &MatrixPolynomial, tol: &Tolerance) -> Result<EnumerationResult<Bisolvent>> {
    bisolvents_limited(p, tol, DEFAULT_MAX_SELECTIONS)
}

pub fn bisolvents_limited(
    p: &MatrixPolynomial,
    tol: &Tolerance,
    limit: usize,
) -> Result<EnumerationResult<Bisolvent>> {
    let bound = solvent_count_bound(p)?;
    let pair = maximal_standard_pair(p, tol)?;
    let (selections, truncated) = enumerate_selections_limited(&pair, p.rows(), Side::Both, limit)?;
    let mut out = EnumerationResult {
        items: Vec::<Bisolvent>::new(),
        infinite_family: false,
        bound,
        truncated,
        warnings: Vec::new(),
    };
    for sel in selections {
        let (b, (q0, q0i)) = match bisolvent_with_q0(&pair, &sel, tol, &mut out.warnings) {
            Ok(found) => found,
            Err(Error::SingularQ0) => continue,
            Err(e) => return Err(e),
        };
        let report = verify_bisolvent(p, &b, tol)?;
        if !report.all_pass() {
            out.warnings.push(format!(
                "bisolvent candidate rejected, residual {:.3e}",
                report.residual.value
            ));
            continue;
        }
        let points = sel.eigen_points(&pair, tol)?;
        out.infinite_family |= deficient_geometry(p, &b.s2, &b.s1, &points, tol);
        let unit = unit_columns(&pair, &sel, tol)?;
        let extra = alternative_idempotents(&q0, &q0i, sel.split().0, &unit);
        let slot = match out
            .items
            .iter()
            .position(|o| same_matrix(&o.s1, &b.s1) && same_matrix(&o.s2, &b.s2))
        {
            Some(i) => i,
            None => {
                out.items.push(Bisolvent {
                    alternatives: Vec::new(),
                    ..b.clone()
                });
                out.items.len() - 1
            }
        };
        let record = &mut out.items[slot];
        for pi in std::iter::once(b.pi).chain(extra) {
            if !record.idempotents().any(|q| same_matrix(q, &pi)) {
                record.alternatives.push(pi);
            }
        }
    }
    if truncated {
        out.warnings.push(format!("enumeration truncated at {limit} selections"));
    }
    Ok(out)
}

fn require_square_size(b: &ComplexMatrix, m: usize, what: &str) -> Result<()> {
    if b.nrows() != m || b.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {:?}, expected {m}x{m}",
            b.shape()
        )));
    }
    Ok(())
}

/// Commutativity, idempotency, separability and the matrix equation, each as
/// a scaled residual judged against `residual_tol`.
pub fn verify_bisolvent(
    p: &MatrixPolynomial,
    b: &Bisolvent,
    tol: &Tolerance,
) -> Result<BisolventReport> {
    let m = p.rows();
    for (what, mat) in [("S1", &b.s1), ("S2", &b.s2), ("Pi", &b.pi)] {
        require_square_size(mat, m, what)?;
    }
    let (s1, s2, pi) = (&b.s1, &b.s2, &b.pi);
    let (n1, n2, np) = (rel_scale(s1), rel_scale(s2), rel_scale(pi));
    let id = identity(m);
    let commute = norm(&(s1 * s2 - s2 * s1)) / (n1 * n2);
    let idempotent = norm(&(pi * pi - pi)) / (np * np);
    let co = &id - pi;
    let sep1 = norm(&(s1 - (pi * s1 * pi + &co)));
    let sep2 = norm(&(s2 - (pi + &co * s2 * &co)));
    let separable = (sep1 / n1).max(sep2 / n2) / (np * np);
    Ok(BisolventReport {
        commute: Check::new(commute, tol),
        idempotent: Check::new(idempotent, tol),
        separable: Check::new(separable, tol),
        residual: Check::new(bisolvent_residual(p, s1, s2), tol),
    })
}

/// Reads off `S₂⁻¹S₁` as a solvent and `S₁⁻¹S₂` as a cosolvent where the
/// inverses exist, checking each by substitution into `P`.
pub fn reduce_bisolvent(p: &MatrixPolynomial, b: &Bisolvent, tol: &Tolerance) -> Result<Reduction> {
    let m = b.size();
    let solvent = if numerical_rank(&b.s2, tol) == m {
        let s = invert(&b.s2, tol)? * &b.s1;
        let r = solvent_residual(p, &s);
        if r > tol.residual_tol {
            return Err(Error::InvariantViolation(format!(
                "reduced solvent fails substitution ({r:.3e})"
            )));
        }
        Some(s)
    } else {
        None
    };
    let cosolvent = if numerical_rank(&b.s1, tol) == m {
        let s = invert(&b.s1, tol)? * &b.s2;
        let r = cosolvent_residual(p, &s);
        if r > tol.residual_tol {
            return Err(Error::InvariantViolation(format!(
                "reduced cosolvent fails substitution ({r:.3e})"
            )));
        }
        Some(s)
    } else {
        None
    };
    Ok(Reduction { solvent, cosolvent })
}

/// `P₁ = ΠS₁Π`, `P₂ = (I-Π)S₂(I-Π)`.
pub fn to_additive(b: &Bisolvent) -> AdditiveBisolvent {
    let co = identity(b.size()) - &b.pi;
    AdditiveBisolvent {
        p1: &b.pi * &b.s1 * &b.pi,
        p2: &co * &b.s2 * &co,
        pi: b.pi.clone(),
    }
}

/// `S₁ = P₁ + (I-Π)`, `S₂ = P₂ + Π`, after checking the additive invariants
/// and that `P₁ⁱ + P₂ʲ = S₁ⁱS₂ʲ` for `1 ≤ i, j ≤ max_power`.
pub fn from_additive(
    a: &AdditiveBisolvent,
    max_power: usize,
    tol: &Tolerance,
) -> Result<Bisolvent> {
    let m = a.pi.nrows();
    require_square_size(&a.p1, m, "P1")?;
    require_square_size(&a.p2, m, "P2")?;
    let co = identity(m) - &a.pi;
    let (n1, n2, np) = (rel_scale(&a.p1), rel_scale(&a.p2), rel_scale(&a.pi));
    let checks = [
        ("P1 P2 = 0", norm(&(&a.p1 * &a.p2)) / (n1 * n2)),
        ("P2 P1 = 0", norm(&(&a.p2 * &a.p1)) / (n1 * n2)),
        ("Pi^2 = Pi", norm(&(&a.pi * &a.pi - &a.pi)) / (np * np)),
        ("P1 = Pi P1 Pi", norm(&(&a.p1 - &a.pi * &a.p1 * &a.pi)) / (n1 * np * np)),
        ("P2 = (I-Pi) P2 (I-Pi)", norm(&(&a.p2 - &co * &a.p2 * &co)) / (n2 * np * np)),
    ];
    for (what, value) in checks {
        if value > tol.residual_tol {
            return Err(Error::InvariantViolation(format!("{what} fails ({value:.3e})")));
        }
    }
    let b = Bisolvent::new(&a.p1 + &co, &a.p2 + &a.pi, a.pi.clone());
    for i in 1..=max_power {
        for j in 1..=max_power {
            let lhs = mat_pow(&a.p1, i) + mat_pow(&a.p2, j);
            let rhs = mat_pow(&b.s1, i) * mat_pow(&b.s2, j);
            let scale = rel_scale(&b.s1).powi(i as i32) * rel_scale(&b.s2).powi(j as i32);
            let value = norm(&(lhs - rhs)) / scale;
            if value > tol.residual_tol {
                return Err(Error::InvariantViolation(format!(
                    "power identity fails at ({i}, {j}) ({value:.3e})"
                )));
            }
        }
    }
    Ok(b)
}

/// `‖Σ A_i (P₁^[i] + P₂^[k-i])‖` scaled, where the zeroth powers are `Π` and `I-Π`.
pub fn additive_residual(p: &MatrixPolynomial, a: &AdditiveBisolvent) -> f64 {
    let k = p.degree();
    let co = identity(a.pi.nrows()) - &a.pi;
    let power = |m: &ComplexMatrix, unit: &ComplexMatrix, e: usize| {
        if e == 0 {
            unit.clone()
        } else {
            mat_pow(m, e)
        }
    };
    let (n1, n2) = (rel_scale(&a.p1), rel_scale(&a.p2));
    let mut acc = zeros(p.rows(), a.pi.ncols());
    let mut scale = 0.0;
    for i in 0..=k {
        let c = p.coeff(i);
        acc += &c * (power(&a.p1, &a.pi, i) + power(&a.p2, &co, k - i));
        scale += norm(&c) * (n1.powi(i as i32) + n2.powi((k - i) as i32));
    }
    norm(&acc) / scale
}
