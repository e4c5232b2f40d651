//! Dense Hermitian eigensolver shared by all modules.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const MAX_SWEEPS: usize = 10_000;

/// Diagonalizes the Hermitian part of `m`. Real-symmetric input takes the real path,
/// which is both faster and a little more accurate.
pub fn hermitian_eigen(m: &CMatrix) -> Result<Eigen> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{}, not square",
            n,
            m.ncols()
        )));
    }
    if n == 0 {
        return Ok(Eigen {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let (values, vectors) = if sym.iter().all(|z| z.im == 0.0) {
        let re = sym.map(|z| z.re);
        let eig = SymmetricEigen::try_new(re, f64::EPSILON, MAX_SWEEPS)
            .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
        (
            eig.eigenvalues.iter().copied().collect::<Vec<_>>(),
            eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS)
            .ok_or_else(|| Error::Numerical("hermitian eigensolver did not converge".into()))?;
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    Ok(Eigen {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|e| e.values)
}

/// max |M - M†|
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
