//! Small reference instances with known spectral data.
//!
//! These are the polynomials shipped under `fixtures/` at the workspace root,
//! together with their hand-computed standard pairs.

use crate::linalg::{real_matrix, zeros, ComplexMatrix};
use crate::poly::MatrixPolynomial;
use crate::spectral::{BlockInfo, StandardPair};
use crate::linalg::c64;

fn frac(rows: usize, cols: usize, num: &[f64], den: f64) -> ComplexMatrix {
    let scaled: Vec<f64> = num.iter().map(|x| x / den).collect();
    real_matrix(rows, cols, &scaled)
}

/// A pencil `λA₁ + A₀` with singular `A₁` and invertible `A₀`: `λ·diag(1,0) + I`.
pub fn example3() -> MatrixPolynomial {
    MatrixPolynomial::new(vec![
        real_matrix(2, 2, &[1., 0., 0., 1.]),
        real_matrix(2, 2, &[1., 0., 0., 0.]),
    ])
    .unwrap()
}

/// 2x2 quadratic with finite eigenvalues {2, -2} and a length-2 chain at infinity.
pub fn example4() -> MatrixPolynomial {
    MatrixPolynomial::new(vec![
        frac(2, 2, &[2., -2., 174., -146.], 7.),
        frac(2, 2, &[1., -1., 27., -41.], 7.),
        real_matrix(2, 2, &[0., 0., -2., 2.]),
    ])
    .unwrap()
}

/// Maximal Jordan pair of [`example4`] with nilpotent `Z`.
pub fn example4_pair() -> StandardPair {
    StandardPair::with_blocks(
        real_matrix(2, 2, &[1., 1., 1., 8.]),
        real_matrix(2, 2, &[1., 1., 1., 2.]),
        real_matrix(2, 2, &[2., 0., 0., -2.]),
        real_matrix(2, 2, &[0., 1., 0., 0.]),
        vec![BlockInfo::new(c64(2.), 1), BlockInfo::new(c64(-2.), 1)],
        vec![BlockInfo::new(c64(0.), 2)],
    )
}

/// The pencil `λ ⊕ (λ-1) ⊕ 1`.
pub fn example5() -> MatrixPolynomial {
    MatrixPolynomial::new(vec![
        real_matrix(3, 3, &[0., 0., 0., 0., -1., 0., 0., 0., 1.]),
        real_matrix(3, 3, &[1., 0., 0., 0., 1., 0., 0., 0., 0.]),
    ])
    .unwrap()
}

/// Pair of [`example5`] with `T = 0 ⊕ 1`, `Z = 0`.
pub fn example5_pair() -> StandardPair {
    StandardPair::with_blocks(
        real_matrix(3, 2, &[1., 0., 0., 1., 0., 0.]),
        real_matrix(3, 1, &[0., 0., 1.]),
        real_matrix(2, 2, &[0., 0., 0., 1.]),
        zeros(1, 1),
        vec![BlockInfo::new(c64(0.), 1), BlockInfo::new(c64(1.), 1)],
        vec![BlockInfo::new(c64(0.), 1)],
    )
}

/// Pair of [`example5`] after inverting the eigenvalue 1: `T = 0`, `Z = 1 ⊕ 0`.
pub fn example5_inverted_pair() -> StandardPair {
    StandardPair::with_blocks(
        real_matrix(3, 1, &[1., 0., 0.]),
        real_matrix(3, 2, &[0., 0., 1., 0., 0., 1.]),
        zeros(1, 1),
        real_matrix(2, 2, &[1., 0., 0., 0.]),
        vec![BlockInfo::new(c64(0.), 1)],
        vec![BlockInfo::new(c64(1.), 1), BlockInfo::new(c64(0.), 1)],
    )
}

/// 3x3 quadratic with finite eigenvalues {3, 2, 0} and one length-3 chain at infinity.
pub fn example6() -> MatrixPolynomial {
    MatrixPolynomial::new(vec![
        frac(3, 3, &[-60., 76., 74., 30., -81., 6., -36., 80., 10.], 43.),
        frac(
            3,
            3,
            &[-788., 55., 281., 931., -110., -347., 1097., -670., -589.],
            215.,
        ),
        frac(3, 3, &[-33., 15., 16., -32., 10., 14., 19., -5., -8.], 10.),
    ])
    .unwrap()
}

/// Maximal Jordan pair of [`example6`] with nilpotent `Z`.
pub fn example6_pair() -> StandardPair {
    StandardPair::with_blocks(
        real_matrix(3, 3, &[2., 2., 5., 4., 4., 2., 1., 1., 2.]),
        real_matrix(3, 3, &[1., 1., 3., -1., -1., 1., 3., 3., 4.]),
        real_matrix(3, 3, &[3., 0., 0., 0., 2., 0., 0., 0., 0.]),
        real_matrix(3, 3, &[0., 1., 0., 0., 0., 1., 0., 0., 0.]),
        vec![
            BlockInfo::new(c64(3.), 1),
            BlockInfo::new(c64(2.), 1),
            BlockInfo::new(c64(0.), 1),
        ],
        vec![BlockInfo::new(c64(0.), 3)],
    )
}

/// The similarity `U₁` relating the two [`example6`] bisolvents to diagonal form.
pub fn example6_u1() -> ComplexMatrix {
    real_matrix(3, 3, &[2., 5., 1., 4., 2., -1., 1., 2., 3.])
}
