//! Partial transpose and negativity of two-qubit states.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::basis;

/// Inputs with a larger `max |rho - rho^dag|` are rejected.
pub const HERMITICITY_TOLERANCE: f64 = 1e-8;

/// Negative eigenvalues of the partial transpose above this value are
/// treated as roundoff.
pub const EIGENVALUE_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PartialTranspose {
    pub matrix: Matrix4<C64>,
}

impl PartialTranspose {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vector4<f64> {
        let mut values = self.matrix.symmetric_eigenvalues();
        values.as_mut_slice().sort_by(f64::total_cmp);
        values
    }
}

pub fn hermiticity_error(rho: &Matrix4<C64>) -> f64 {
    (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_hermitian(rho: &Matrix4<C64>) -> Result<()> {
    let err = hermiticity_error(rho);
    if err > HERMITICITY_TOLERANCE || err.is_nan() {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// Transpose the indices of atom 1 (the cavity atom).
pub fn partial_transpose_atom1(rho: &Matrix4<C64>) -> Result<PartialTranspose> {
    check_hermitian(rho)?;
    Ok(PartialTranspose {
        matrix: partial_transpose_with(rho, |(a1, a2), (b1, b2)| ((b1, a2), (a1, b2))),
    })
}

/// Transpose the indices of atom 2; same spectrum as the atom-1 version.
pub fn partial_transpose_atom2(rho: &Matrix4<C64>) -> Result<PartialTranspose> {
    check_hermitian(rho)?;
    Ok(PartialTranspose {
        matrix: partial_transpose_with(rho, |(a1, a2), (b1, b2)| ((a1, b2), (b1, a2))),
    })
}

type Levels = (usize, usize);

fn partial_transpose_with(rho: &Matrix4<C64>, source: impl Fn(Levels, Levels) -> (Levels, Levels)) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| {
        let ((r1, r2), (c1, c2)) = source(basis::levels(i), basis::levels(j));
        rho[(basis::index(r1, r2), basis::index(c1, c2))]
    })
}

/// `-2` times the sum of the negative eigenvalues of the atom-1 partial
/// transpose.
pub fn negativity(rho: &Matrix4<C64>) -> Result<f64> {
    let pt = partial_transpose_atom1(rho)?;
    Ok(negativity_from_spectrum(pt.eigenvalues().iter().copied()))
}

pub fn negativity_from_spectrum(eigenvalues: impl IntoIterator<Item = f64>) -> f64 {
    let negative: f64 = eigenvalues.into_iter().filter(|&mu| mu < -EIGENVALUE_CLAMP).sum();
    -2.0 * negative
}
