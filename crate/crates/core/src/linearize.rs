//! Companion pencils and Weierstrass data of regular pencils.

use crate::error::{Error, Result};
use crate::linalg::{c64, identity, norm, zeros, ComplexMatrix, Tolerance, C64};
use crate::poly::MatrixPolynomial;
use crate::spectral::{weierstrass_data_of, WeierstrassData};

/// A degree-one matrix polynomial `λ A₁ + A₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    lambda_coeff: ComplexMatrix,
    constant: ComplexMatrix,
}

impl Pencil {
    pub fn new(lambda_coeff: ComplexMatrix, constant: ComplexMatrix) -> Result<Self> {
        if lambda_coeff.shape() != constant.shape() {
            return Err(Error::DimensionMismatch(format!(
                "pencil coefficients {:?} and {:?}",
                lambda_coeff.shape(),
                constant.shape()
            )));
        }
        if lambda_coeff.iter().all(|z| *z == c64(0.0)) {
            return Err(Error::InvariantViolation(
                "pencil has a zero λ-coefficient".into(),
            ));
        }
        Ok(Self {
            lambda_coeff,
            constant,
        })
    }

    pub fn from_polynomial(p: &MatrixPolynomial) -> Result<Self> {
        if p.degree() != 1 {
            return Err(Error::InvariantViolation(format!(
                "a pencil has degree 1, got {}",
                p.degree()
            )));
        }
        Self::new(p.coeff(1), p.coeff(0))
    }

    /// `A₁`.
    pub fn lambda_coeff(&self) -> &ComplexMatrix {
        &self.lambda_coeff
    }

    /// `A₀`.
    pub fn constant(&self) -> &ComplexMatrix {
        &self.constant
    }

    pub fn size(&self) -> usize {
        self.constant.nrows()
    }

    pub fn eval(&self, lambda: C64) -> ComplexMatrix {
        &self.lambda_coeff * lambda + &self.constant
    }

    pub fn scale(&self) -> f64 {
        norm(&self.lambda_coeff) + norm(&self.constant)
    }

    pub fn to_polynomial(&self) -> MatrixPolynomial {
        MatrixPolynomial::new(vec![self.constant.clone(), self.lambda_coeff.clone()])
            .expect("nonzero λ-coefficient")
    }

    pub fn transpose(&self) -> Self {
        Self {
            lambda_coeff: self.lambda_coeff.transpose(),
            constant: self.constant.transpose(),
        }
    }
}

/// Lower companion pencil: `λ diag(I, …, I, A_k)` plus a constant with `-I`
/// superdiagonal blocks and bottom block row `(A₀, …, A_{k-1})`.
pub fn companion_down(p: &MatrixPolynomial) -> Result<Pencil> {
    p.require_square()?;
    let k = p.degree();
    if k == 0 {
        return Err(Error::InvariantViolation(
            "constant polynomial has no companion pencil".into(),
        ));
    }
    if k == 1 {
        return Pencil::from_polynomial(p);
    }
    let n = p.rows();
    let size = n * k;
    let mut lead = identity(size);
    lead.view_mut((size - n, size - n), (n, n))
        .copy_from(p.leading());
    let mut constant = zeros(size, size);
    for i in 0..k - 1 {
        constant
            .view_mut((i * n, (i + 1) * n), (n, n))
            .copy_from(&(-identity(n)));
    }
    for i in 0..k {
        constant
            .view_mut((size - n, i * n), (n, n))
            .copy_from(&p.coeff(i));
    }
    Pencil::new(lead, constant)
}

/// Right companion pencil `C_d(Pᵀ)ᵀ`: coefficients in the rightmost block column.
pub fn companion_right(p: &MatrixPolynomial) -> Result<Pencil> {
    Ok(companion_down(&p.transpose())?.transpose())
}

/// Finite eigenvalues with partial multiplicities and the infinite partial
/// multiplicities, with all infinite blocks reported as nilpotent.
pub fn weierstrass_data(c: &Pencil, tol: &Tolerance) -> Result<WeierstrassData> {
    let p = c.to_polynomial();
    if !p.regularity()?.regular {
        return Err(Error::SingularPencil);
    }
    weierstrass_data_of(&p, tol)
}
