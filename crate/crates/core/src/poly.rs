//! The matrix polynomial value type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, is_finite, norm, zeros, ComplexMatrix, ScalarPolynomial, C64};

const DET_RADIUS_PASSES: usize = 4;

/// `max_i (|c_i| / |c_top|)^{1/(top-i)}`, an upper estimate of the root moduli.
fn root_scale(p: &ScalarPolynomial) -> Option<f64> {
    let c = p.coeffs();
    let top = p.degree().filter(|&d| d > 0)?;
    let lead = c[top].norm();
    Some(
        (0..top)
            .filter(|&i| c[i].norm() > 0.0)
            .map(|i| (c[i].norm() / lead).powf(1.0 / (top - i) as f64))
            .fold(0.0, f64::max),
    )
}

/// `P(λ) = Σ A_i λ^i` with `n x m` complex coefficients and `A_k ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    coeffs: Vec<ComplexMatrix>,
}

/// Outcome of the regularity test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub det_poly: ScalarPolynomial,
    /// Degree of `det P(λ)`, i.e. the number of finite eigenvalues.
    pub det_degree: usize,
    /// `nk - M`, the total multiplicity of the infinite eigenvalue.
    pub infinite_mult_total: usize,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl MatrixPolynomial {
    /// Validates dimensions and trims trailing zero coefficients.
    pub fn new(mut coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty coefficient list".into()))?;
        let shape = first.shape();
        if let Some((i, a)) = coeffs.iter().enumerate().find(|(_, a)| a.shape() != shape) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient {i} is {}x{}, expected {}x{}",
                a.nrows(),
                a.ncols(),
                shape.0,
                shape.1
            )));
        }
        if coeffs.iter().any(|a| !is_finite(a)) {
            return Err(Error::InvariantViolation("non-finite coefficient entry".into()));
        }
        while coeffs.last().is_some_and(|a| a.iter().all(|z| *z == c64(0.0))) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomialInput);
        }
        Ok(Self { coeffs })
    }

    pub fn rows(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn cols(&self) -> usize {
        self.coeffs[0].ncols()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn coeffs(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    /// Coefficient of `λ^i`; zero beyond the degree.
    pub fn coeff(&self, i: usize) -> ComplexMatrix {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| zeros(self.rows(), self.cols()))
    }

    pub fn leading(&self) -> &ComplexMatrix {
        self.coeffs.last().expect("nonempty by construction")
    }

    /// `Σ ‖A_i‖`, the scale used by residual checks.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(norm).sum()
    }

    /// `Σ ‖A_i‖ max(1, |λ|)ⁱ`, a reference size for rank decisions on `P(λ)`
    /// that does not collapse when `λ` is near zero.
    pub fn rank_scale_at(&self, lambda: C64) -> f64 {
        self.scale_at(c64(lambda.norm().max(1.0)))
    }

    /// Scale of `P(λ)` at a point: `Σ ‖A_i‖ |λ|^i`.
    pub fn scale_at(&self, lambda: C64) -> f64 {
        let r = lambda.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * r + norm(a))
    }

    /// Horner evaluation of `P(λ₀)`.
    pub fn eval(&self, lambda: C64) -> ComplexMatrix {
        let mut acc = zeros(self.rows(), self.cols());
        for a in self.coeffs.iter().rev() {
            acc = acc * lambda + a;
        }
        acc
    }

    /// `λ^k P(1/λ)`, re-trimmed when `A_0 = 0`.
    pub fn reverse(&self) -> Self {
        let mut rev = self.coeffs.clone();
        rev.reverse();
        Self::new(rev).expect("reverse of a nonzero polynomial is nonzero")
    }

    pub fn transpose(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.transpose()).collect(),
        }
    }

    /// `(1/j!) P^{(j)}(a) = Σ_{i≥j} C(i,j) A_i a^{i-j}`; zero for `j > k`.
    pub fn taylor_coeff(&self, a: C64, j: usize) -> ComplexMatrix {
        let mut acc = zeros(self.rows(), self.cols());
        for i in (j..self.coeffs.len()).rev() {
            // Horner in `a` over the shifted, binomially weighted coefficients.
            acc = acc * a + &self.coeffs[i] * c64(binomial(i, j));
        }
        acc
    }

    /// `det P(λ)` by evaluation on `nk + 1` points of a circle and DFT interpolation.
    ///
    /// A first pass on a circle of radius `1 + max ‖A_i‖` gives the root
    /// scale; later passes interpolate on a circle of the current root scale
    /// until it settles, which keeps low-order coefficients accurate when the
    /// roots are small compared to the coefficients.
    pub fn determinant_polynomial(&self) -> Result<ScalarPolynomial> {
        self.require_square()?;
        let first_radius = 1.0 + self.coeffs.iter().map(norm).fold(0.0, f64::max);
        // The Hadamard bound overestimates badly on a large circle when a
        // coefficient is strongly non-normal, so confirm a zero on |λ| = 1.
        let Some((mut radius, mut current)) = [first_radius, 1.0]
            .into_iter()
            .find_map(|r| self.interpolate_det(r).map(|d| (r, d)))
        else {
            return Ok(ScalarPolynomial::new(Vec::new()));
        };
        for _ in 0..DET_RADIUS_PASSES {
            let Some(next) = root_scale(&current).map(|r| r.clamp(0.5, first_radius)) else {
                break;
            };
            if (next / radius - 1.0).abs() < 0.25 {
                break;
            }
            radius = next;
            match self.interpolate_det(radius) {
                Some(found) => current = found,
                None => break,
            }
        }
        Ok(current)
    }

    /// Interpolated coefficients, or `None` when every sample is zero
    /// relative to the Hadamard bound.
    fn interpolate_det(&self, radius: f64) -> Option<ScalarPolynomial> {
        let n = self.rows();
        let points = n * self.degree() + 1;
        let mut values = Vec::with_capacity(points);
        let mut hadamard: f64 = 0.0;
        for j in 0..points {
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / points as f64);
            let m = self.eval(w * radius);
            let h: f64 = m.row_iter().map(|r| r.norm()).product();
            hadamard = hadamard.max(h);
            values.push(if n == 0 { c64(1.0) } else { m.determinant() });
        }
        let peak = values.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if n > 0 && peak <= 1e-12 * hadamard {
            return None;
        }
        let mut coeffs: Vec<C64> = (0..points)
            .map(|i| {
                let s: C64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, d)| {
                        let ang = -2.0 * std::f64::consts::PI * ((i * j) % points) as f64
                            / points as f64;
                        d * C64::from_polar(1.0, ang)
                    })
                    .sum();
                s / points as f64 / radius.powi(i as i32)
            })
            .collect();
        let biggest = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        // Interpolation noise: drop whole coefficients and stray real or
        // imaginary parts below the relative threshold.
        let floor = 1e-10 * biggest;
        for c in coeffs.iter_mut() {
            if c.norm() < floor {
                *c = c64(0.0);
            }
            if c.re.abs() < floor {
                c.re = 0.0;
            }
            if c.im.abs() < floor {
                c.im = 0.0;
            }
        }
        Some(ScalarPolynomial::new(coeffs))
    }

    pub fn regularity(&self) -> Result<RegularityReport> {
        let det_poly = self.determinant_polynomial()?;
        let nk = self.rows() * self.degree();
        Ok(match det_poly.degree() {
            Some(m) => RegularityReport {
                regular: true,
                det_poly,
                det_degree: m,
                infinite_mult_total: nk - m.min(nk),
            },
            None => RegularityReport {
                regular: false,
                det_poly,
                det_degree: 0,
                infinite_mult_total: 0,
            },
        })
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    /// Regularity report, or `NotRegular`.
    pub(crate) fn require_regular(&self) -> Result<RegularityReport> {
        let report = self.regularity()?;
        if report.regular {
            Ok(report)
        } else {
            Err(Error::NotRegular)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{identity, real_matrix, Tolerance};

    #[test]
    fn construction_trims_and_rejects() {
        let a = real_matrix(2, 2, &[1., 2., 3., 4.]);
        let p = MatrixPolynomial::new(vec![-a.clone(), identity(2)]).unwrap();
        assert_eq!(p.degree(), 1);
        let p0 = MatrixPolynomial::new(vec![a, zeros(2, 2)]).unwrap();
        assert_eq!(p0.degree(), 0);
        assert_eq!(
            MatrixPolynomial::new(vec![zeros(2, 2), zeros(2, 2)]),
            Err(Error::ZeroPolynomialInput)
        );
        assert!(matches!(
            MatrixPolynomial::new(vec![zeros(2, 2), zeros(2, 3)]),
            Err(Error::DimensionMismatch(_))
        ));
        let ex4 = fixtures::example4();
        assert_eq!((ex4.rows(), ex4.degree()), (2, 2));
    }

    #[test]
    fn evaluation_examples() {
        let a = real_matrix(2, 2, &[1., 2., 3., 4.]);
        let p = MatrixPolynomial::new(vec![-a.clone(), identity(2)]).unwrap();
        assert_eq!(p.eval(c64(0.)), -a);
        let ex5 = fixtures::example5();
        assert_eq!(ex5.eval(c64(1.)), real_matrix(3, 3, &[1., 0., 0., 0., 0., 0., 0., 0., 1.]));
        let ex4 = fixtures::example4();
        let v = ex4.eval(c64(2.)) * real_matrix(2, 1, &[1., 1.]);
        assert!(norm(&v) < 1e-13);
    }

    #[test]
    fn reverse_examples() {
        let a = real_matrix(2, 2, &[1., 2., 3., 4.]);
        let p = MatrixPolynomial::new(vec![-a.clone(), identity(2)]).unwrap();
        let r = p.reverse();
        assert_eq!(r.coeffs(), &[identity(2), -a]);
        let ex4 = fixtures::example4();
        assert_eq!(ex4.reverse().reverse(), ex4);
        assert_eq!(ex4.reverse().coeff(2), ex4.coeff(0));
    }

    #[test]
    fn taylor_examples() {
        let a = real_matrix(2, 2, &[1., 2., 3., 4.]);
        let p = MatrixPolynomial::new(vec![-a, identity(2)]).unwrap();
        assert_eq!(p.taylor_coeff(C64::new(0.3, 1.0), 1), identity(2));
        let ex4 = fixtures::example4();
        let z = C64::new(0.5, -0.25);
        assert!(norm(&(ex4.taylor_coeff(z, 0) - ex4.eval(z))) < 1e-13);
        assert_eq!(ex4.taylor_coeff(c64(0.), 2), ex4.coeff(2));
    }

    #[test]
    fn determinant_examples() {
        let p = MatrixPolynomial::new(vec![zeros(2, 2), identity(2)]).unwrap();
        let d = p.determinant_polynomial().unwrap();
        assert_eq!(d.degree(), Some(2));
        assert!((d.coeffs()[2] - c64(1.)).norm() < 1e-12);

        let ex5 = fixtures::example5().regularity().unwrap();
        assert!(ex5.regular);
        assert_eq!((ex5.det_degree, ex5.infinite_mult_total), (2, 1));

        // det of the Example 4 quadratic expands to -(2/7)(λ-2)(λ+2).
        let d = fixtures::example4().determinant_polynomial().unwrap();
        assert_eq!(d.degree(), Some(2));
        let expected = [8. / 7., 0., -2. / 7.];
        for (c, e) in d.coeffs().iter().zip(expected) {
            assert!((c - c64(e)).norm() < 1e-12, "{c} vs {e}");
        }
        let roots = crate::linalg::poly_roots(&d, &Tolerance::default()).unwrap();
        assert!((roots[0].value - c64(2.)).norm() < 1e-10);
        assert!((roots[1].value - c64(-2.)).norm() < 1e-10);
    }

    #[test]
    fn regularity_examples() {
        let singular = MatrixPolynomial::new(vec![
            zeros(2, 2),
            real_matrix(2, 2, &[1., 0., 0., 0.]),
        ])
        .unwrap();
        assert!(!singular.regularity().unwrap().regular);

        let ex6 = fixtures::example6().regularity().unwrap();
        assert!(ex6.regular);
        assert_eq!((ex6.det_degree, ex6.infinite_mult_total), (3, 3));

        let monic = MatrixPolynomial::new(vec![
            real_matrix(2, 2, &[1., 2., 0., 1.]),
            real_matrix(2, 2, &[0., 1., 3., 0.]),
            identity(2),
        ])
        .unwrap();
        let r = monic.regularity().unwrap();
        assert_eq!((r.det_degree, r.infinite_mult_total), (4, 0));

        // det(λN - I) = 1 with a large nilpotent N.
        let nilpotent = MatrixPolynomial::new(vec![
            -identity(2),
            real_matrix(2, 2, &[0., 1e8, 0., 0.]),
        ])
        .unwrap();
        let r = nilpotent.regularity().unwrap();
        assert!(r.regular);
        assert_eq!((r.det_degree, r.infinite_mult_total), (0, 2));

        let rect = MatrixPolynomial::new(vec![zeros(2, 3), real_matrix(2, 3, &[1.; 6])]).unwrap();
        assert_eq!(rect.regularity(), Err(Error::NotSquare { rows: 2, cols: 3 }));
    }
}
