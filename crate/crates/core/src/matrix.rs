//! Shared dense-matrix plumbing: the serializable complex matrix format and
//! Hermitian helpers used throughout the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense complex matrix, serialized as
/// `{"rows": r, "cols": c, "data": [[re, im], ...]}`.
///
/// This is the interchange format shared by every module; computation happens
/// on [`DMatrix<Complex64>`] obtained through [`ComplexMatrix::to_dmatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawComplexMatrix", into = "RawComplexMatrix")]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<(f64, f64)>,
}

impl TryFrom<RawComplexMatrix> for ComplexMatrix {
    type Error = String;

    fn try_from(raw: RawComplexMatrix) -> std::result::Result<Self, String> {
        if raw.rows * raw.cols != raw.data.len() {
            return Err(format!(
                "rows*cols = {} does not match data length {}",
                raw.rows * raw.cols,
                raw.data.len()
            ));
        }
        if raw.data.iter().any(|(re, im)| !re.is_finite() || !im.is_finite()) {
            return Err("non-finite matrix entry".to_string());
        }
        Ok(ComplexMatrix {
            rows: raw.rows,
            cols: raw.cols,
            data: raw.data.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
        })
    }
}

impl From<ComplexMatrix> for RawComplexMatrix {
    fn from(m: ComplexMatrix) -> Self {
        RawComplexMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data.into_iter().map(|z| (z.re, z.im)).collect(),
        }
    }
}

impl ComplexMatrix {
    pub fn from_dmatrix(m: &DMatrix<Complex64>) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(m[(i, j)]);
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Self {
        Self::from_dmatrix(&m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.data[i * self.cols + j])
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }
}

/// Frobenius inner product `Tr(A* B)`; real for Hermitian arguments.
pub fn frobenius_inner(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius_norm(a: &DMatrix<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entrywise modulus of `A - A*`.
pub fn hermitian_deviation(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(A + A*)/2`. Serialized Hermitian matrices are symmetrized on entry
/// rather than rejected.
pub fn hermitize(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Hermitian inverse square root, used by the polar tightening step.
pub fn inv_sqrt_hermitian(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let eig = a.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::NotAFrame);
    }
    let d = DMatrix::from_diagonal(
        &eig.eigenvalues.map(|l| Complex64::new(1.0 / l.sqrt(), 0.0)),
    );
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Entrywise squared modulus as a real matrix.
pub fn abs_sq(a: &DMatrix<Complex64>) -> DMatrix<f64> {
    a.map(|z| z.norm_sqr())
}

/// Numerical rank via singular values with threshold `tol * sigma_max`.
pub fn numerical_rank(a: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    let sv = a.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let m = ComplexMatrix {
            rows: 1,
            cols: 3,
            data: vec![
                Complex64::new(1.0 / 3.0, -0.1),
                Complex64::new(f64::MIN_POSITIVE, 2.0_f64.sqrt()),
                Complex64::new(-0.0, 1e300),
            ],
        };
        let s = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        for (a, b) in m.data.iter().zip(back.data.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let res: std::result::Result<ComplexMatrix, _> =
            serde_json::from_str(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#);
        assert!(res.is_err());
    }

    #[test]
    fn inv_sqrt_inverts() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 3.0])
            .map(|x| Complex64::new(x, 0.0));
        let s = inv_sqrt_hermitian(&a).unwrap();
        let id = &s * &a * &s;
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)].re - want).abs() < 1e-12);
            }
        }
    }
}
