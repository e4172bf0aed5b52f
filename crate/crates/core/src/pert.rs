//! Projection onto the elliptope perturbation subspace of a Gram matrix,
//! the PSD overlap inequalities it implies, the fourth-moment gap matrix
//! for ETFs, and the degree-4 moment-matrix witness.
//!
//! The perturbation subspace of a UNTF Gram matrix X consists of the
//! Hermitian directions A with X +- tA staying inside the (complex)
//! elliptope for small t; it equals { V* H V : H Hermitian, v_i* H v_i = 0 }.
//! The orthogonal projector onto it has the closed form
//!
//! ```text
//! P A = (r^2/N^2) ( X A X - sum_ij ((|X|^2)^-1)_ij (x_i* A x_i) x_j x_j* )
//! ```
//!
//! whenever the entrywise square |X|^2 of the Gram matrix is nonsingular.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{gram, verify_frame, Frame};
use crate::matrix::{abs_sq, frobenius_norm, hermitize, symmetric_eigenvalues};
use crate::report::{Check, VerificationReport};

/// Condition-number gate on |X|^2 before inversion. Near-Gerzon ETFs make
/// it nearly singular.
const COND_LIMIT: f64 = 1e12;

/// Largest N for which the dense N^2 x N^2 projector form is assembled.
const DENSE_LIMIT: usize = 64;

/// The projector onto the perturbation subspace of a UNTF Gram matrix.
pub struct PertProjector {
    frame: Frame,
    x: DMatrix<Complex64>,
    inv_x2: DMatrix<f64>,
    cond: f64,
}

impl PertProjector {
    pub fn new(frame: &Frame) -> Result<Self> {
        let report = verify_frame(frame)?;
        if !report.is_untf {
            return Err(Error::NotUntf);
        }
        let x = gram(frame).matrix().clone();
        let x2 = abs_sq(&x);
        let eigs = symmetric_eigenvalues(&x2);
        let (min, max) = (eigs[0], eigs[eigs.len() - 1]);
        let cond = if min > 0.0 { max / min } else { f64::INFINITY };
        if cond > COND_LIMIT {
            return Err(Error::SingularX2(cond));
        }
        let inv_x2 = x2.try_inverse().ok_or(Error::SingularX2(cond))?;
        Ok(PertProjector { frame: frame.clone(), x, inv_x2, cond })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn inv_x2(&self) -> &DMatrix<f64> {
        &self.inv_x2
    }

    /// Condition number of |X|^2, reported for diagnostics.
    pub fn condition_number(&self) -> f64 {
        self.cond
    }

    /// Apply the projector to a Hermitian matrix. The input is symmetrized
    /// on entry; members of the perturbation subspace have zero diagonal,
    /// so `diag(P A) = 0` up to rounding.
    pub fn apply(&self, a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        let n = self.frame.len();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.nrows() });
        }
        let a = hermitize(a);
        let r = self.frame.dim();
        // t_i = x_i* A x_i (real), then c = (|X|^2)^-1 t
        let ax = &a * &self.x;
        let mut t = nalgebra::DVector::<f64>::zeros(n);
        for i in 0..n {
            let mut acc = Complex64::ZERO;
            for k in 0..n {
                acc += self.x[(k, i)].conj() * ax[(k, i)];
            }
            t[i] = acc.re;
        }
        let c = &self.inv_x2 * t;
        let cd = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
            if i == j { Complex64::new(c[i], 0.0) } else { Complex64::ZERO }
        });
        // X A X - X diag(c) X; the second term equals sum_j c_j x_j x_j*
        let scale = Complex64::new((r * r) as f64 / (n * n) as f64, 0.0);
        Ok((&self.x * &ax - &self.x * cd * &self.x) * scale)
    }

    /// Dense form of the projector in the canonical orthonormal Hermitian
    /// basis (diagonal units, then symmetric pairs, then antisymmetric
    /// pairs, each in lexicographic order). Real symmetric, idempotent, and
    /// its trace is the dimension of the perturbation subspace.
    pub fn dense(&self) -> Result<DMatrix<f64>> {
        let n = self.frame.len();
        if n > DENSE_LIMIT {
            return Err(Error::TooLargeForDense { n, limit: DENSE_LIMIT });
        }
        let dim = n * n;
        let mut p = DMatrix::<f64>::zeros(dim, dim);
        for b in 0..dim {
            let pb = self.apply(&herm_basis_element(n, b))?;
            for a in 0..dim {
                p[(a, b)] = herm_coefficient(&pb, n, a);
            }
        }
        Ok(p)
    }

    /// Dense form in plain row-major vec coordinates, for real frames: the
    /// orthogonal projector on R^{N^2} onto the vectorized perturbation
    /// subspace. Column (j1, j2) is vec(P sym(E_{j1 j2})).
    pub fn dense_vec(&self) -> Result<DMatrix<f64>> {
        if !self.frame.is_real() {
            return Err(Error::ComplexFrame);
        }
        let n = self.frame.len();
        if n > DENSE_LIMIT {
            return Err(Error::TooLargeForDense { n, limit: DENSE_LIMIT });
        }
        let dim = n * n;
        let mut p = DMatrix::<f64>::zeros(dim, dim);
        for j1 in 0..n {
            for j2 in 0..n {
                let mut e = DMatrix::<Complex64>::zeros(n, n);
                e[(j1, j2)] += Complex64::new(0.5, 0.0);
                e[(j2, j1)] += Complex64::new(0.5, 0.0);
                let pe = self.apply(&e)?;
                for i1 in 0..n {
                    for i2 in 0..n {
                        p[(i1 * n + i2, j1 * n + j2)] = pe[(i1, i2)].re;
                    }
                }
            }
        }
        Ok(p)
    }
}

/// The b-th canonical orthonormal Hermitian basis element of C^{n x n}.
fn herm_basis_element(n: usize, b: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    if b < n {
        m[(b, b)] = Complex64::new(1.0, 0.0);
        return m;
    }
    let pairs = n * (n - 1) / 2;
    let idx = b - n;
    let (pair, antisym) = if idx < pairs { (idx, false) } else { (idx - pairs, true) };
    let (i, j) = pair_from_index(n, pair);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if antisym {
        m[(i, j)] = Complex64::new(0.0, s);
        m[(j, i)] = Complex64::new(0.0, -s);
    } else {
        m[(i, j)] = Complex64::new(s, 0.0);
        m[(j, i)] = Complex64::new(s, 0.0);
    }
    m
}

/// Coefficient of a Hermitian matrix on the a-th basis element.
fn herm_coefficient(m: &DMatrix<Complex64>, n: usize, a: usize) -> f64 {
    if a < n {
        return m[(a, a)].re;
    }
    let pairs = n * (n - 1) / 2;
    let idx = a - n;
    let (pair, antisym) = if idx < pairs { (idx, false) } else { (idx - pairs, true) };
    let (i, j) = pair_from_index(n, pair);
    let s = std::f64::consts::SQRT_2;
    if antisym {
        s * m[(i, j)].im
    } else {
        s * m[(i, j)].re
    }
}

/// The k-th pair (i, j) with i < j in lexicographic order.
fn pair_from_index(n: usize, mut k: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair index out of range")
}

/// Apply the perturbation projector of `f` to a Hermitian matrix.
pub fn project_pert(f: &Frame, a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    PertProjector::new(f)?.apply(a)
}

/// Dense projector in the Hermitian basis; see [`PertProjector::dense`].
pub fn pert_projector_dense(f: &Frame) -> Result<DMatrix<f64>> {
    PertProjector::new(f)?.dense()
}

/// Independent construction of the same projector, used only as a test
/// oracle: enumerate Hermitian r x r matrices H with v_i* H v_i = 0, map
/// them through H -> V* H V, orthonormalize the images, and assemble the
/// projector from the resulting basis.
pub fn pert_oracle(f: &Frame) -> Result<DMatrix<f64>> {
    let (r, n) = (f.dim(), f.len());
    if n > DENSE_LIMIT {
        return Err(Error::TooLargeForDense { n, limit: DENSE_LIMIT });
    }
    let v = f.synthesis();
    let hdim = r * r;

    // constraint matrix: rows are points, columns are Hermitian basis elements
    let mut c = DMatrix::<f64>::zeros(n, hdim);
    for k in 0..hdim {
        let h = herm_basis_element(r, k);
        for i in 0..n {
            let vi = v.column(i);
            let hv = &h * vi;
            c[(i, k)] = vi.dotc(&hv).re;
        }
    }

    // kernel of the constraint map via the spectral decomposition of C^T C
    let gram_c = c.transpose() * &c;
    let eig = gram_c.symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
    let mut images: Vec<DMatrix<Complex64>> = Vec::new();
    for k in 0..hdim {
        if eig.eigenvalues[k] > 1e-10 * max_eig {
            continue;
        }
        let mut h = DMatrix::<Complex64>::zeros(r, r);
        for j in 0..hdim {
            h += herm_basis_element(r, j) * Complex64::new(eig.eigenvectors[(j, k)], 0.0);
        }
        images.push(v.adjoint() * h * v);
    }

    // orthonormalize the images in the Frobenius inner product
    let mut basis: Vec<DMatrix<Complex64>> = Vec::new();
    for mut g in images {
        for _ in 0..2 {
            for u in &basis {
                let coef = crate::matrix::frobenius_inner(u, &g);
                g -= u * coef;
            }
        }
        let norm = frobenius_norm(&g);
        if norm > 1e-9 {
            g /= Complex64::new(norm, 0.0);
            basis.push(g);
        }
    }

    let dim = n * n;
    let mut p = DMatrix::<f64>::zeros(dim, dim);
    for g in &basis {
        let coords: Vec<f64> = (0..dim).map(|a| herm_coefficient(g, n, a)).collect();
        for a in 0..dim {
            for b in 0..dim {
                p[(a, b)] += coords[a] * coords[b];
            }
        }
    }
    Ok(p)
}

/// Residuals of the two equivalent overlap inequalities for a UNTF.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapReport {
    /// min eigenvalue of I_r - (|V|^2)(|X|^2)^-1 (|V|^2)^T
    pub min_eig_form1: f64,
    /// min eigenvalue of |X|^2 - (|V|^2)^T (|V|^2)
    pub min_eig_form2: f64,
    pub passed: bool,
    /// Whether the two forms agree in sign.
    pub forms_agree: bool,
}

/// Check both forms of the UNTF overlap inequality.
pub fn overlap_inequality_check(f: &Frame) -> Result<OverlapReport> {
    let proj = PertProjector::new(f)?;
    let v2 = abs_sq(f.synthesis());
    let x2 = abs_sq(gram(f).matrix());

    let form2 = &x2 - v2.transpose() * &v2;
    let min2 = symmetric_eigenvalues(&form2)[0];

    let r = f.dim();
    let form1 = DMatrix::<f64>::identity(r, r) - &v2 * proj.inv_x2() * v2.transpose();
    let min1 = symmetric_eigenvalues(&form1)[0];

    const TOL: f64 = 1e-8;
    Ok(OverlapReport {
        min_eig_form1: min1,
        min_eig_form2: min2,
        passed: min1 >= -TOL && min2 >= -TOL,
        forms_agree: (min1 >= -TOL) == (min2 >= -TOL),
    })
}

/// R = (|V|^2)(|V|^2)^T, the fourth-moment matrix of the frame rows.
pub fn r_matrix(f: &Frame) -> DMatrix<f64> {
    let v2 = abs_sq(f.synthesis());
    &v2 * v2.transpose()
}

/// The gap between the ETF fourth-moment bound and R, with its spectrum.
#[derive(Debug, Clone)]
pub struct GapMatrix {
    pub gap: DMatrix<f64>,
    /// Ascending eigenvalues of the gap.
    pub eigenvalues: Vec<f64>,
    pub min_eig: f64,
    /// Eigenvalues in (-1e-8, 1e-6 r) count as kernel.
    pub kernel_dim: usize,
    pub passed: bool,
}

/// Evaluate the ETF inequality: R is dominated by
/// ((1-1/r)/(1-1/N)) I + ((N/r - 1)/(r(1-1/N))) 11^T.
pub fn etf_gap(f: &Frame) -> Result<GapMatrix> {
    let report = verify_frame(f)?;
    if !report.is_etf {
        return Err(Error::NotEtf);
    }
    let (r, n) = (f.dim() as f64, f.len() as f64);
    let diag_coef = (1.0 - 1.0 / r) / (1.0 - 1.0 / n);
    let ones_coef = (n / r - 1.0) / (r * (1.0 - 1.0 / n));
    let rr = f.dim();
    let rhs = DMatrix::<f64>::from_fn(rr, rr, |i, j| {
        ones_coef + if i == j { diag_coef } else { 0.0 }
    });
    let gap = rhs - r_matrix(f);
    let eigenvalues = symmetric_eigenvalues(&gap);
    let min_eig = eigenvalues[0];
    let kernel_dim = eigenvalues
        .iter()
        .filter(|&&l| l > -1e-8 && l < 1e-6 * r)
        .count();
    Ok(GapMatrix { gap, eigenvalues, min_eig, kernel_dim, passed: min_eig >= -1e-8 })
}

/// Degree-4 moment-matrix witness for a real ETF with N < r(r+1)/2:
/// Y = vec(X) vec(X)^T + c P with c = N^2 (1 - 1/r) / (r(r+1)/2 - N),
/// P in plain vec coordinates.
pub fn sos_witness(f: &Frame) -> Result<DMatrix<f64>> {
    if !f.is_real() {
        return Err(Error::ComplexFrame);
    }
    let report = verify_frame(f)?;
    if !report.is_etf {
        return Err(Error::NotEtf);
    }
    let (r, n) = (f.dim(), f.len());
    let limit = r * (r + 1) / 2;
    if n >= limit {
        return Err(Error::GerzonSaturated { n, limit });
    }
    let c = (n * n) as f64 * (1.0 - 1.0 / r as f64) / (limit - n) as f64;
    let p = PertProjector::new(f)?.dense_vec()?;
    let x = gram(f).matrix().map(|z| z.re);
    let vx = nalgebra::DVector::<f64>::from_fn(n * n, |k, _| x[(k / n, k % n)]);
    let mut y = &vx * vx.transpose() + p * c;
    y = (&y + y.transpose()) * 0.5;
    Ok(y)
}

/// Check the four degree-4 moment-matrix membership conditions of Y
/// against X, indices read as pairs (i1, i2) in row-major order:
/// even-multiplicity entries equal 1, entries depend only on the
/// odd-multiplicity index set, the (1,i)(1,j) block reproduces X, and Y is
/// PSD.
pub fn verify_e4_membership(y: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<VerificationReport> {
    let n = x.nrows();
    if x.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.ncols() });
    }
    if y.nrows() != n * n || y.ncols() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: y.nrows() });
    }
    const TOL: f64 = 1e-7;

    let mut even_dev: f64 = 0.0;
    let mut groups: std::collections::HashMap<Vec<usize>, Vec<f64>> =
        std::collections::HashMap::new();
    for i1 in 0..n {
        for i2 in 0..n {
            for j1 in 0..n {
                for j2 in 0..n {
                    let mut counts = std::collections::BTreeMap::new();
                    for ix in [i1, i2, j1, j2] {
                        *counts.entry(ix).or_insert(0usize) += 1;
                    }
                    let odd: Vec<usize> =
                        counts.iter().filter(|(_, &c)| c % 2 == 1).map(|(&k, _)| k).collect();
                    let val = y[(i1 * n + i2, j1 * n + j2)];
                    if odd.is_empty() {
                        even_dev = even_dev.max((val - 1.0).abs());
                    } else {
                        groups.entry(odd).or_default().push(val);
                    }
                }
            }
        }
    }
    let mut group_dev: f64 = 0.0;
    for vals in groups.values() {
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        for v in vals {
            group_dev = group_dev.max((v - mean).abs());
        }
    }
    let mut x_dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            x_dev = x_dev.max((y[(i, j)] - x[(i, j)]).abs());
        }
    }
    let min_eig = symmetric_eigenvalues(y)[0];
    let norm = y.norm();

    let checks = vec![
        Check::new("even_multiplicity_ones", even_dev < TOL, Some(even_dev), "max |Y - 1| over even-multiplicity entries"),
        Check::new("odd_set_consistency", group_dev < TOL, Some(group_dev), "max deviation from group mean"),
        Check::new("reproduces_x", x_dev < TOL, Some(x_dev), "max |Y_(1,i)(1,j) - X_ij|"),
        Check::new("psd", min_eig >= -TOL * norm, Some(min_eig), "min eigenvalue of Y"),
    ];
    Ok(VerificationReport::from_checks(checks))
}
