//! First-order right factors `λS₂ - S₁` obtained from bisolvents, and the
//! matching left quotients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, condition_number, invert, least_squares, norm, singular_values, zeros, ComplexMatrix,
    Tolerance, C64,
};
use crate::linearize::Pencil;
use crate::poly::MatrixPolynomial;
use crate::solvents::{bisolvents, Bisolvent};

const SAMPLE_SEED: u64 = 0x6d70_6f6c_7966_6163;
const MAX_RETRIES: usize = 20;
const AVOIDANCE: f64 = 1e-8;
const EQUIVALENCE_TOL: f64 = 1e-7;

/// `P = Q·F` with `F` a right factor built from `source`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub factor: Pencil,
    pub quotient: MatrixPolynomial,
    pub max_rel_residual: f64,
    pub source: Bisolvent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorReport {
    /// `F` divides `P` on the right.
    pub divides: bool,
    /// Largest relative residual of `P - QF` at the check points, if a quotient was formed.
    pub quotient_residual: Option<f64>,
    /// Index of an atlas factor left-equivalent to `F`.
    pub atlas_match: Option<usize>,
}

impl FactorReport {
    pub fn is_factor(&self) -> bool {
        self.divides && self.atlas_match.is_some()
    }
}

/// `F(λ) = λS₂ - S₁`, rejected when `det F` vanishes identically.
pub fn right_factor(b: &Bisolvent) -> Result<Pencil> {
    let f = Pencil::new(b.s2.clone(), -&b.s1).map_err(|_| Error::DegenerateFactor)?;
    if !f.to_polynomial().regularity()?.regular {
        return Err(Error::DegenerateFactor);
    }
    Ok(f)
}

/// `|det F(z)|` against `10⁻⁸ |det F(z)| κ(F(z))`, i.e. `σ_min > 10⁻⁸ σ_max`.
///
/// A Hadamard-type scale would reject every point of a clean but strongly
/// non-normal factor, since it compounds over all singular values.
fn det_is_clear(f: &Pencil, z: C64) -> bool {
    let sv = singular_values(&f.eval(z));
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) => hi > 0.0 && lo > AVOIDANCE * hi,
        _ => true,
    }
}

/// `count` points `r e^{iθ} ωʲ` whose `F` values are safely invertible.
fn clean_points(f: &Pencil, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<C64>> {
    for _ in 0..MAX_RETRIES {
        let r = rng.gen_range(0.6..1.4);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let pts: Vec<C64> = (0..count)
            .map(|j| {
                C64::from_polar(
                    r,
                    theta + std::f64::consts::TAU * j as f64 / count as f64,
                )
            })
            .collect();
        if pts.iter().all(|&z| det_is_clear(f, z)) {
            return Ok(pts);
        }
    }
    Err(Error::SpectrumAvoidanceFailed)
}

/// `‖P(λ) - Q(λ)F(λ)‖` relative to `Σ‖A_i‖|λ|ⁱ + ‖Q(λ)‖‖F(λ)‖`.
pub fn relative_residual(p: &MatrixPolynomial, q: &MatrixPolynomial, f: &Pencil, z: C64) -> f64 {
    let (qz, fz) = (q.eval(z), f.eval(z));
    let r = p.eval(z) - &qz * &fz;
    norm(&r) / (p.scale_at(z) + norm(&qz) * norm(&fz))
}

/// Largest [`relative_residual`] over a set of points.
pub fn max_residual(p: &MatrixPolynomial, q: &MatrixPolynomial, f: &Pencil, pts: &[C64]) -> f64 {
    pts.iter()
        .map(|&z| relative_residual(p, q, f, z))
        .fold(0.0, f64::max)
}

fn interpolated_quotient(
    p: &MatrixPolynomial,
    f: &Pencil,
    tol: &Tolerance,
) -> Result<(MatrixPolynomial, f64)> {
    if p.rows() != f.size() || p.cols() != f.size() {
        return Err(Error::DimensionMismatch(format!(
            "P is {}x{}, F is {}x{}",
            p.rows(),
            p.cols(),
            f.size(),
            f.size()
        )));
    }
    let k = p.degree();
    let n = p.rows();
    if k == 0 {
        // A nonzero constant has no quotient of degree below zero.
        return Err(Error::NotADivisor { residual: 1.0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let pts = clean_points(f, k, &mut rng)?;
    let values: Vec<ComplexMatrix> = pts
        .iter()
        .map(|&z| Ok(p.eval(z) * invert(&f.eval(z), tol)?))
        .collect::<Result<_>>()?;
    // Points are r·e^{iθ}·ωʲ, so the coefficients follow from an inverse DFT.
    let base = pts[0];
    let mut coeffs = vec![zeros(n, n); k];
    for (c, coeff) in coeffs.iter_mut().enumerate() {
        let mut acc = zeros(n, n);
        for (j, v) in values.iter().enumerate() {
            let w = C64::from_polar(
                1.0,
                -std::f64::consts::TAU * (j * c) as f64 / k as f64,
            );
            acc += v * w;
        }
        *coeff = acc / (base.powu(c as u32) * k as f64);
    }
    if coeffs.iter().all(|a| a.iter().all(|z| *z == c64(0.0))) {
        return Err(Error::NotADivisor { residual: 1.0 });
    }
    let q = MatrixPolynomial::new(coeffs)?;
    let fresh = clean_points(f, k.max(2), &mut rng)?;
    let residual = max_residual(p, &q, f, &fresh);
    Ok((q, residual))
}

fn quotient_at_points(
    p: &MatrixPolynomial,
    f: &Pencil,
    tol: &Tolerance,
) -> Result<(MatrixPolynomial, f64)> {
    let interpolated = interpolated_quotient(p, f, tol);
    if matches!(&interpolated, Ok((_, r)) if *r <= tol.residual_tol) {
        return interpolated;
    }
    if let Err(Error::DimensionMismatch(_)) = interpolated {
        return interpolated;
    }
    // Sample points near the unit circle can all sit in the pseudospectrum of
    // a strongly non-normal F; exact division does not invert F(λ).
    let divided = divided_quotient(p, f, tol).map(|q| {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 0xd1d1);
        let fresh: Vec<C64> = (0..p.degree().max(2))
            .map(|_| C64::from_polar(rng.gen_range(0.6..1.4), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let r = max_residual(p, &q, f, &fresh);
        (q, r)
    });
    match (interpolated, divided) {
        (Ok(a), Some(b)) => Ok(if b.1 < a.1 { b } else { a }),
        (Err(_), Some(b)) => Ok(b),
        (a, None) => a,
    }
}

/// `Q` by right division of `P` by `λI - S`, where `F = B(λI - S)` when the
/// `λ` coefficient `B` is invertible, and through the reversals `λᵏP(1/λ)`
/// and `μC + B` when only the constant `C` is.
fn divided_quotient(p: &MatrixPolynomial, f: &Pencil, tol: &Tolerance) -> Option<MatrixPolynomial> {
    let (b, c) = (f.lambda_coeff(), f.constant());
    let k = p.degree();
    if k == 0 {
        return None;
    }
    let coeffs = if condition_number(b) <= condition_number(c) {
        synthetic_division(p.coeffs(), b, c, tol)?
    } else {
        let reversed: Vec<ComplexMatrix> = p.coeffs().iter().rev().cloned().collect();
        let mut q = synthetic_division(&reversed, c, b, tol)?;
        q.reverse();
        q
    };
    debug_assert_eq!(coeffs.len(), k);
    MatrixPolynomial::new(coeffs).ok()
}

/// Coefficients of `Q` with `Σ aᵢλⁱ = Q(λ)(λB + C)` up to the remainder, for invertible `B`.
fn synthetic_division(
    a: &[ComplexMatrix],
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    tol: &Tolerance,
) -> Option<Vec<ComplexMatrix>> {
    let k = a.len() - 1;
    let bi = invert(b, tol).ok()?;
    let s = -(&bi * c);
    let mut q = vec![zeros(a[0].nrows(), a[0].ncols()); k];
    q[k - 1] = a[k].clone();
    for i in (1..k).rev() {
        q[i - 1] = &a[i] + &q[i] * &s;
    }
    Some(q.into_iter().map(|m| m * &bi).collect())
}

/// `Q` of degree at most `k - 1` with `P = QF`, by interpolating `P(λ)F(λ)⁻¹`
/// at `k` points on a circle and checking at as many fresh points.
pub fn left_quotient(p: &MatrixPolynomial, f: &Pencil, tol: &Tolerance) -> Result<MatrixPolynomial> {
    let (q, residual) = quotient_at_points(p, f, tol)?;
    if residual > tol.residual_tol {
        return Err(Error::NotADivisor { residual });
    }
    Ok(q)
}

/// One verified factorization per bisolvent of `P`.
pub fn factor_atlas(p: &MatrixPolynomial, tol: &Tolerance) -> Result<Vec<Factorization>> {
    let found = bisolvents(p, tol)?;
    found
        .items
        .into_iter()
        .map(|b| factorization(p, b, tol))
        .collect()
}

/// Factorization induced by a single bisolvent.
pub fn factorization(p: &MatrixPolynomial, b: Bisolvent, tol: &Tolerance) -> Result<Factorization> {
    let f = right_factor(&b)?;
    let (q, residual) = quotient_at_points(p, &f, tol)?;
    if residual > tol.residual_tol {
        return Err(Error::NotADivisor { residual });
    }
    Ok(Factorization {
        factor: f,
        quotient: q,
        max_rel_residual: residual,
        source: b,
    })
}

/// `F₁ = G F₂` for a constant invertible `G`.
///
/// `G` solves `G [B₂ C₂] = [B₁ C₁]` in the least squares sense; a regular `F₂`
/// has `[B₂ C₂]` of full row rank, so `G` is unique when it exists.
pub fn left_equivalent(f1: &Pencil, f2: &Pencil, tol: &Tolerance) -> Result<bool> {
    if f1.size() != f2.size() {
        return Ok(false);
    }
    let n = f1.size();
    let stack = |f: &Pencil| {
        let mut m = zeros(n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(f.lambda_coeff());
        m.view_mut((0, n), (n, n)).copy_from(f.constant());
        m
    };
    let (m1, m2) = (stack(f1), stack(f2));
    let g = least_squares(&m2.transpose(), &m1.transpose(), tol).transpose();
    if crate::linalg::numerical_rank(&g, tol) < n {
        return Ok(false);
    }
    let scale = norm(&m1).max(norm(&g) * norm(&m2)).max(f64::MIN_POSITIVE);
    Ok(norm(&(&g * &m2 - &m1)) <= EQUIVALENCE_TOL * scale)
}

/// Divisibility of `P` by `F` together with a search for a left-equivalent
/// factor in the bisolvent atlas.
pub fn verify_right_factor(p: &MatrixPolynomial, f: &Pencil, tol: &Tolerance) -> Result<FactorReport> {
    if !f.to_polynomial().regularity()?.regular {
        return Err(Error::NotRegularFactor("det F vanishes identically".into()));
    }
    let (divides, quotient_residual) = match quotient_at_points(p, f, tol) {
        Ok((_, r)) => (r <= tol.residual_tol, Some(r)),
        Err(Error::NotADivisor { .. }) => (false, None),
        Err(e) => return Err(e),
    };
    let atlas = factor_atlas(p, tol)?;
    let mut atlas_match = None;
    for (i, entry) in atlas.iter().enumerate() {
        if left_equivalent(f, &entry.factor, tol)? {
            atlas_match = Some(i);
            break;
        }
    }
    Ok(FactorReport {
        divides,
        quotient_residual,
        atlas_match,
    })
}
