//! Known-answer generators and brute-force checkers for tests.
//!
//! These deliberately avoid the chain and selection machinery of
//! [`crate::spectral`] and [`crate::solvents`] (apart from building a
//! polynomial from a planted pair) so that they can serve as references.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, condition_number, direct_sum, hstack, invert, norm, nullspace_relative, numerical_rank,
    poly_roots, zeros, ComplexMatrix, Tolerance, C64,
};
use crate::linearize::Pencil;
use crate::poly::MatrixPolynomial;
use crate::spectral::{
    controllability, jordan_block, reconstruct_from_pair, BlockInfo, StandardPair,
};

const MAX_ATTEMPTS: usize = 50;
const MAX_CONDITION: f64 = 1e6;

/// A spectrum to plant in a random `n×n` polynomial of degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSpectrum {
    pub n: usize,
    pub k: usize,
    /// Finite eigenvalues with their partial multiplicities.
    pub finite: Vec<(C64, Vec<usize>)>,
    /// Partial multiplicities at infinity.
    pub infinite: Vec<usize>,
    pub seed: u64,
}

impl PlantedSpectrum {
    pub fn total(&self) -> usize {
        self.finite.iter().flat_map(|(_, b)| b).sum::<usize>() + self.infinite.iter().sum::<usize>()
    }

    /// Random plan with well separated eigenvalues, occasional Jordan blocks,
    /// repeated semisimple eigenvalues, zero eigenvalues and infinite blocks.
    pub fn random(n: usize, k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let total = n * k;
        let mut infinite = Vec::new();
        let mut left = total;
        if n > 1 && rng.gen_bool(0.5) {
            let blocks = rng.gen_range(1..n);
            for _ in 0..blocks {
                if left <= 1 {
                    break;
                }
                let size = rng.gen_range(1..=2.min(left - 1));
                infinite.push(size);
                left -= size;
            }
        }
        let with_zero = rng.gen_bool(0.3);
        let values = separated_values(&mut rng, left, with_zero);
        let mut finite = Vec::new();
        let mut values = values.into_iter();
        while left > 0 {
            let e = values.next().expect("enough eigenvalues");
            let blocks = match rng.gen_range(0..6) {
                0 if left >= 2 => vec![2],
                1 if left >= 2 && n >= 2 => vec![1, 1],
                _ => vec![1],
            };
            left -= blocks.iter().sum::<usize>();
            finite.push((e, blocks));
        }
        Self {
            n,
            k,
            finite,
            infinite,
            seed,
        }
    }

    /// Random plan whose finite eigenvalues are all simple.
    pub fn semisimple(n: usize, k: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2545_f491_4f6c_dd1d);
        let total = n * k;
        let q = if n > 1 && rng.gen_bool(0.4) { rng.gen_range(1..n) } else { 0 };
        let with_zero = rng.gen_bool(0.3);
        let values = separated_values(&mut rng, total - q, with_zero);
        Self {
            n,
            k,
            finite: values.into_iter().map(|e| (e, vec![1])).collect(),
            infinite: vec![1; q],
            seed,
        }
    }
}

/// `count` distinct values with pairwise gaps of at least 0.5, also kept 0.5
/// away from the origin; one of them is zero when `with_zero` is set.
fn separated_values(rng: &mut ChaCha8Rng, count: usize, with_zero: bool) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    if with_zero && count > 0 {
        out.push(c64(0.0));
    }
    while out.len() < count {
        let re = rng.gen_range(-3.0..3.0);
        let im = if rng.gen_bool(0.3) { rng.gen_range(-2.0..2.0) } else { 0.0 };
        let z = C64::new(re, im);
        if z.norm() >= 0.5 && out.iter().all(|w| (w - z).norm() >= 0.5) {
            out.push(z);
        }
    }
    out
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c64(rng.gen_range(-1.0..1.0)))
}

/// Random chain vectors for the plan, reconstructed into a polynomial.
///
/// Returns the polynomial and the planted pair (with block layout). The
/// draw is repeated until the controllability matrix is well conditioned.
pub fn random_regular(plan: &PlantedSpectrum) -> Result<(MatrixPolynomial, StandardPair)> {
    let (n, k) = (plan.n, plan.k);
    if n == 0 || k == 0 || plan.total() != n * k {
        return Err(Error::PlanInfeasible(format!(
            "planned dimension {} differs from nk = {}",
            plan.total(),
            n * k
        )));
    }
    if plan.infinite.len() >= n {
        return Err(Error::PlanInfeasible(
            "at least n chains at infinity force a zero leading coefficient".into(),
        ));
    }
    if plan.finite.iter().any(|(_, b)| b.len() > n || b.contains(&0))
        || plan.infinite.contains(&0)
    {
        return Err(Error::PlanInfeasible("more chains than n, or an empty chain".into()));
    }
    let mut t = zeros(0, 0);
    let mut t_blocks = Vec::new();
    for (e, sizes) in &plan.finite {
        for &s in sizes {
            t = direct_sum(&t, &jordan_block(*e, s));
            t_blocks.push(BlockInfo::new(*e, s));
        }
    }
    let mut z = zeros(0, 0);
    let mut z_blocks = Vec::new();
    for &s in &plan.infinite {
        z = direct_sum(&z, &jordan_block(c64(0.0), s));
        z_blocks.push(BlockInfo::new(c64(0.0), s));
    }
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    for _ in 0..MAX_ATTEMPTS {
        let x = random_matrix(&mut rng, n, t.nrows());
        let y = random_matrix(&mut rng, n, z.nrows());
        let pair = StandardPair::with_blocks(
            x,
            y,
            t.clone(),
            z.clone(),
            t_blocks.clone(),
            z_blocks.clone(),
        );
        if condition_number(&controllability(&pair, k)) > MAX_CONDITION {
            continue;
        }
        let Ok(p) = reconstruct_from_pair(&pair, k, &tol) else {
            continue;
        };
        let finite: usize = plan.finite.iter().flat_map(|(_, b)| b).sum();
        let counts_match = p
            .regularity()
            .is_ok_and(|r| r.regular && r.det_degree == finite);
        if p.degree() == k && counts_match {
            return Ok((p, pair));
        }
    }
    Err(Error::PlanInfeasible(format!(
        "no well-conditioned draw in {MAX_ATTEMPTS} attempts"
    )))
}

/// `‖Σ A_i Sⁱ‖ / (Σ ‖A_i‖ max(1,‖S‖)ⁱ)` via Horner's rule in `S`.
pub fn brute_solvent_check(p: &MatrixPolynomial, s: &ComplexMatrix) -> f64 {
    let coeffs = p.coeffs();
    let ns = norm(s).max(1.0);
    let mut acc = coeffs[coeffs.len() - 1].clone();
    let mut scale = norm(&acc);
    for a in coeffs.iter().rev().skip(1) {
        acc = &acc * s + a;
        scale = scale * ns + norm(a);
    }
    norm(&acc) / scale
}

/// Every solvent `V diag(λ) V⁻¹` built from `m` eigenpairs of a semisimple
/// `P`, with eigenvectors taken directly from the kernels of `P(λᵢ)`.
pub fn exhaustive_semisimple_solvents(
    p: &MatrixPolynomial,
    tol: &Tolerance,
) -> Result<Vec<ComplexMatrix>> {
    let det = p.determinant_polynomial()?;
    if det.is_zero() {
        return Err(Error::NotRegular);
    }
    let loose = Tolerance {
        rank_tol: 1e-8,
        ..*tol
    };
    let mut pairs: Vec<(C64, ComplexMatrix)> = Vec::new();
    for root in poly_roots(&det, tol)? {
        let kernel = nullspace_relative(&p.eval(root.value), p.rank_scale_at(root.value), &loose);
        if kernel.ncols() != root.multiplicity {
            return Err(Error::NotSemisimple);
        }
        for c in 0..kernel.ncols() {
            pairs.push((root.value, kernel.columns(c, 1).into_owned()));
        }
    }
    let m = p.rows();
    let mut out: Vec<ComplexMatrix> = Vec::new();
    for subset in (0..pairs.len()).combinations(m) {
        let cols: Vec<&ComplexMatrix> = subset.iter().map(|&i| &pairs[i].1).collect();
        let v = hstack(m, &cols);
        if numerical_rank(&v, tol) < m {
            continue;
        }
        let mut d = zeros(m, m);
        for (j, &i) in subset.iter().enumerate() {
            d[(j, j)] = pairs[i].0;
        }
        let s = &v * d * invert(&v, tol)?;
        if brute_solvent_check(p, &s) <= tol.residual_tol
            && !out.iter().any(|o| norm(&(o - &s)) <= 1e-7 * (1.0 + norm(&s)))
        {
            out.push(s);
        }
    }
    Ok(out)
}

/// `count` random points in the box `[-2, 2] + i[-2, 2]`.
pub fn probe_points(count: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect()
}

/// Whether `P(λ)F(λ)⁻¹` agrees with a polynomial of degree below `k`:
/// Newton interpolation through the first `k` points, comparison at the rest.
pub fn divisibility_probe(p: &MatrixPolynomial, f: &Pencil, points: &[C64]) -> Result<bool> {
    let k = p.degree();
    if points.len() <= k {
        return Err(Error::DimensionMismatch(format!(
            "need more than {k} probe points, got {}",
            points.len()
        )));
    }
    let tol = Tolerance::default();
    let mut values = Vec::with_capacity(points.len());
    for &z in points {
        let fz = f.eval(z);
        let bound: f64 = fz.column_iter().map(|c| c.norm()).product();
        if fz.determinant().norm() <= 1e-8 * bound {
            return Err(Error::SpectrumAvoidanceFailed);
        }
        values.push(p.eval(z) * invert(&fz, &tol)?);
    }
    if k == 0 {
        return Ok(false);
    }
    let nodes = &points[..k];
    let mut dd: Vec<ComplexMatrix> = values[..k].to_vec();
    for j in 1..k {
        for i in (j..k).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (nodes[i] - nodes[i - j]);
        }
    }
    let newton = |z: C64| {
        let mut acc = dd[k - 1].clone();
        for i in (0..k - 1).rev() {
            acc = acc * (z - nodes[i]) + &dd[i];
        }
        acc
    };
    let scale = values.iter().map(norm).fold(1.0, f64::max);
    Ok(points[k..]
        .iter()
        .zip(&values[k..])
        .all(|(&z, v)| norm(&(newton(z) - v)) <= 1e-7 * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{identity, real_matrix};
    use crate::spectral::{maximal_standard_pair, verify_standard_pair};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn monic_plan() {
        let plan = PlantedSpectrum {
            n: 2,
            k: 2,
            finite: [1., -1., 2., 3.].iter().map(|&e| (c64(e), vec![1])).collect(),
            infinite: vec![],
            seed: 11,
        };
        let (p, pair) = random_regular(&plan).unwrap();
        assert!(numerical_rank(p.leading(), &tol()) == 2);
        assert!(verify_standard_pair(&p, &pair, &tol()).unwrap().passes(&tol()));
    }

    #[test]
    fn example6_shaped_plan() {
        let plan = PlantedSpectrum {
            n: 3,
            k: 2,
            finite: [3., 2., 0.].iter().map(|&e| (c64(e), vec![1])).collect(),
            infinite: vec![3],
            seed: 5,
        };
        let (p, _) = random_regular(&plan).unwrap();
        let w = maximal_standard_pair(&p, &tol()).unwrap().weierstrass_data(&tol()).unwrap();
        assert_eq!(w.infinite, vec![3]);
        assert_eq!(w.finite_total(), 3);
    }

    #[test]
    fn infeasible_plans() {
        let short = PlantedSpectrum {
            n: 2,
            k: 2,
            finite: vec![(c64(1.), vec![1])],
            infinite: vec![],
            seed: 0,
        };
        assert!(matches!(random_regular(&short), Err(Error::PlanInfeasible(_))));
        let all_infinite = PlantedSpectrum {
            n: 2,
            k: 1,
            finite: vec![],
            infinite: vec![1, 1],
            seed: 0,
        };
        assert!(matches!(random_regular(&all_infinite), Err(Error::PlanInfeasible(_))));
    }

    #[test]
    fn random_plans_are_consistent() {
        for seed in 0..40 {
            for (n, k) in [(1, 3), (2, 2), (3, 2), (2, 3)] {
                for plan in [PlantedSpectrum::random(n, k, seed), PlantedSpectrum::semisimple(n, k, seed)] {
                    assert_eq!(plan.total(), n * k, "{plan:?}");
                    assert!(plan.infinite.len() < n || plan.infinite.is_empty());
                }
            }
        }
    }

    #[test]
    fn brute_check_values() {
        let p = fixtures::example4();
        let s = real_matrix(2, 2, &[18. / 7., -4. / 7., 32. / 7., -18. / 7.]);
        assert!(brute_solvent_check(&p, &s) <= 1e-10);
        let e = real_matrix(2, 2, &[1., 0., 0., 0.]);
        let r1 = brute_solvent_check(&p, &(&s + &e * c64(1e-3)));
        let r2 = brute_solvent_check(&p, &(&s + &e * c64(2e-3)));
        assert!(r1 > 1e-6 && (r2 / r1 - 2.0).abs() < 0.05, "{r1} {r2}");
        let want = norm(&p.coeff(0)) / p.scale();
        assert!((brute_solvent_check(&p, &zeros(2, 2)) - want).abs() < 1e-15);
    }

    #[test]
    fn exhaustive_examples() {
        let sols = exhaustive_semisimple_solvents(&fixtures::example4(), &tol()).unwrap();
        assert_eq!(sols.len(), 1);

        // Monic 2x2 quadratic with eigenvalues 1, -1, 2, 3 and generic vectors.
        let plan = PlantedSpectrum {
            n: 2,
            k: 2,
            finite: [1., -1., 2., 3.].iter().map(|&e| (c64(e), vec![1])).collect(),
            infinite: vec![],
            seed: 3,
        };
        let (p, _) = random_regular(&plan).unwrap();
        assert_eq!(exhaustive_semisimple_solvents(&p, &tol()).unwrap().len(), 6);

        // Make the eigenvectors at 1 and -1 collinear.
        let x = real_matrix(2, 4, &[1., 1., 0., 1., 0., 0., 1., 1.]);
        let t = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [1., -1., 2., 3.].iter().map(|&e| c64(e)).collect(),
        ));
        let pair = StandardPair::new(x, zeros(2, 0), t, zeros(0, 0));
        let p = reconstruct_from_pair(&pair, 2, &tol()).unwrap();
        assert_eq!(exhaustive_semisimple_solvents(&p, &tol()).unwrap().len(), 5);

        let defective = MatrixPolynomial::new(vec![
            -real_matrix(2, 2, &[0., 1., 0., 0.]),
            identity(2),
        ])
        .unwrap();
        assert_eq!(
            exhaustive_semisimple_solvents(&defective, &tol()),
            Err(Error::NotSemisimple)
        );
    }

    #[test]
    fn probe_on_known_factors() {
        let p = fixtures::example4();
        let s = real_matrix(2, 2, &[18. / 7., -4. / 7., 32. / 7., -18. / 7.]);
        let f = Pencil::new(identity(2), -s).unwrap();
        assert!(divisibility_probe(&p, &f, &probe_points(6, 1)).unwrap());
        let stranger = Pencil::new(identity(2), real_matrix(2, 2, &[1., 2., 3., 0.5])).unwrap();
        assert!(!divisibility_probe(&p, &stranger, &probe_points(6, 2)).unwrap());
    }
}
