//! Frame algebra: synthesis matrices, Gram matrices, UNTF/ETF verification,
//! Welch and Gerzon bounds, Steiner and simplex ETF assembly, and Naimark
//! complements.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::designs::SteinerSystem;
use crate::error::{Error, Result};
use crate::hadamard::verify_hadamard;
use crate::matrix::{
    frobenius_norm, hermitian_eigenvalues, hermitize, inv_sqrt_hermitian, numerical_rank,
    ComplexMatrix,
};

/// Unit-norm tight frame of N vectors in dimension r, held as its synthesis
/// matrix (columns are the frame vectors). Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFrame", into = "RawFrame")]
pub struct Frame {
    v: DMatrix<Complex64>,
    real: bool,
}

#[derive(Serialize, Deserialize)]
struct RawFrame {
    kind: String,
    real: bool,
    #[serde(flatten)]
    matrix: ComplexMatrix,
}

impl TryFrom<RawFrame> for Frame {
    type Error = String;

    fn try_from(raw: RawFrame) -> std::result::Result<Self, String> {
        if raw.kind != "frame" {
            return Err(format!("expected kind \"frame\", got {:?}", raw.kind));
        }
        if raw.real != raw.matrix.is_real() {
            return Err("real flag inconsistent with matrix entries".to_string());
        }
        Frame::new(raw.matrix.to_dmatrix()).map_err(|e| e.to_string())
    }
}

impl From<Frame> for RawFrame {
    fn from(f: Frame) -> Self {
        RawFrame {
            kind: "frame".to_string(),
            real: f.real,
            matrix: ComplexMatrix::from_dmatrix(&f.v),
        }
    }
}

impl Frame {
    /// Wrap a synthesis matrix, checking unit columns and full row rank.
    pub fn new(v: DMatrix<Complex64>) -> Result<Self> {
        let (r, n) = v.shape();
        if r > n || r == 0 {
            return Err(Error::NotAFrame);
        }
        for j in 0..n {
            let norm = v.column(j).norm();
            if (norm - 1.0).abs() >= 1e-9 {
                return Err(Error::NotAFrame);
            }
        }
        if numerical_rank(&v, 1e-12) < r {
            return Err(Error::NotAFrame);
        }
        let real = v.iter().all(|z| z.im == 0.0);
        Ok(Frame { v, real })
    }

    pub fn synthesis(&self) -> &DMatrix<Complex64> {
        &self.v
    }

    /// Ambient dimension r.
    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    /// Number of vectors N.
    pub fn len(&self) -> usize {
        self.v.ncols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn gram(&self) -> GramMatrix {
        gram(self)
    }
}

/// N x N Hermitian Gram matrix of a frame, with its coherence.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    x: DMatrix<Complex64>,
    coherence: f64,
}

impl GramMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Maximum off-diagonal modulus.
    pub fn coherence(&self) -> f64 {
        self.coherence
    }
}

/// X = V* V, Hermitian-symmetrized to kill rounding asymmetry.
pub fn gram(f: &Frame) -> GramMatrix {
    let x = hermitize(&(f.synthesis().adjoint() * f.synthesis()));
    let n = x.nrows();
    let mut coherence: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                coherence = coherence.max(x[(i, j)].norm());
            }
        }
    }
    GramMatrix { x, coherence }
}

/// The Welch bound sqrt((N - r) / (r (N - 1))); zero iff N = r.
pub fn welch_bound(n: usize, r: usize) -> Result<f64> {
    if r < 1 || r > n {
        return Err(Error::Domain(format!("need 1 <= r <= N, got r={}, N={}", r, n)));
    }
    if n == r {
        return Ok(0.0);
    }
    if n < 2 {
        return Err(Error::Domain("need N >= 2".to_string()));
    }
    Ok((((n - r) as f64) / ((r * (n - 1)) as f64)).sqrt())
}

/// Maximum number of ETF vectors in dimension r: r(r+1)/2 real, r^2 complex.
pub fn gerzon_limit(real: bool, r: usize) -> usize {
    if real {
        r * (r + 1) / 2
    } else {
        r * r
    }
}

/// Aggregated verification result for a frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameReport {
    pub n: usize,
    pub r: usize,
    pub is_untf: bool,
    pub is_etf: bool,
    pub coherence: f64,
    pub welch: f64,
    /// Residuals of the three equivalent UNTF conditions: frame-operator
    /// deviation, Gram eigenvalue deviation, Frobenius-norm deviation.
    pub untf_residuals: [f64; 3],
    /// Welch-equality residual |coherence - welch|; meaningful when ETF.
    pub welch_residual: f64,
    pub gerzon_limit_real: usize,
    pub gerzon_limit_complex: usize,
    pub real: bool,
}

/// Check all three equivalent UNTF conditions and equiangularity.
///
/// UNTF holds iff every residual is below `1e-7 * N`; ETF additionally
/// requires the off-diagonal Gram moduli to share a common value within
/// 1e-9. An ETF with coherence below 1 that exceeds its Gerzon limit is a
/// hard error.
pub fn verify_frame(f: &Frame) -> Result<FrameReport> {
    verify_frame_with(f, 1e-7, 1e-9)
}

pub fn verify_frame_with(f: &Frame, untf_tol_per_n: f64, entry_tol: f64) -> Result<FrameReport> {
    let (r, n) = (f.dim(), f.len());
    let v = f.synthesis();
    let g = gram(f);
    let x = g.matrix();
    let ratio = n as f64 / r as f64;

    // condition 1: sum of outer products = (N/r) I
    let mut op = v * v.adjoint();
    for i in 0..r {
        op[(i, i)] -= Complex64::new(ratio, 0.0);
    }
    let res1 = frobenius_norm(&op);

    // condition 2: the r nonzero eigenvalues of X equal N/r
    let eigs = hermitian_eigenvalues(x);
    let res2 = eigs[n - r..]
        .iter()
        .map(|l| (l - ratio).abs())
        .fold(0.0_f64, f64::max);

    // condition 3: ||X||_F^2 = N^2 / r
    let res3 = (frobenius_norm(x).powi(2) - (n * n) as f64 / r as f64).abs();

    let untf_tol = untf_tol_per_n * n as f64;
    let is_untf = res1 < untf_tol && res2 < untf_tol && res3 < untf_tol;

    let coherence = g.coherence();
    let mut max_angle_dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_angle_dev = max_angle_dev.max((x[(i, j)].norm() - coherence).abs());
            }
        }
    }
    let is_etf = is_untf && max_angle_dev < entry_tol;

    let welch = welch_bound(n, r)?;
    let welch_residual = (coherence - welch).abs();

    if is_etf && coherence < 1.0 - entry_tol {
        let limit = gerzon_limit(f.is_real(), r);
        if n > limit {
            return Err(Error::GerzonViolated { n, r, limit });
        }
    }

    Ok(FrameReport {
        n,
        r,
        is_untf,
        is_etf,
        coherence,
        welch,
        untf_residuals: [res1, res2, res3],
        welch_residual,
        gerzon_limit_real: gerzon_limit(true, r),
        gerzon_limit_complex: gerzon_limit(false, r),
        real: f.is_real(),
    })
}

/// Regular simplex ETF: r+1 unit vectors in R^r with pairwise inner
/// products -1/r. Built deterministically from the Helmert basis of the
/// hyperplane orthogonal to the all-ones vector in R^{r+1}.
pub fn simplex_etf(r: usize) -> Frame {
    assert!(r >= 1);
    let np = r + 1;
    // rows of the reduced Helmert matrix: orthonormal basis of 1-perp
    let mut b = DMatrix::<f64>::zeros(r, np);
    for i in 1..np {
        let scale = 1.0 / ((i * (i + 1)) as f64).sqrt();
        for j in 0..i {
            b[(i - 1, j)] = scale;
        }
        b[(i - 1, i)] = -(i as f64) * scale;
    }
    // columns of B have norm sqrt(r/(r+1)); rescale to unit vectors
    let v = b * (np as f64 / r as f64).sqrt();
    Frame::new(v.map(|x| Complex64::new(x, 0.0))).expect("simplex construction is a frame")
}

/// Steiner ETF with the default Hadamard row convention: point j uses rows
/// 2..=1+rho of H (never row 1), assigned to its incident blocks in
/// increasing block order.
pub fn steiner_etf(sys: &SteinerSystem, h: &ComplexMatrix) -> Result<Frame> {
    let rho = sys.rho();
    let assignments: Vec<Vec<usize>> = (0..sys.v()).map(|_| (1..=rho).collect()).collect();
    steiner_etf_with_assignment(sys, h, &assignments)
}

/// Steiner ETF with an explicit Hadamard row assignment: `assignments[j]`
/// lists, for point j, the rho distinct rows of H placed at its incident
/// blocks in increasing block order. Exposed so that convention-independence
/// of (N, r, alpha) can be exercised; normal use goes through
/// [`steiner_etf`].
pub fn steiner_etf_with_assignment(
    sys: &SteinerSystem,
    h: &ComplexMatrix,
    assignments: &[Vec<usize>],
) -> Result<Frame> {
    let rho = sys.rho();
    let order = 1 + rho;
    if h.rows != h.cols || h.rows != order {
        return Err(Error::SizeMismatch { expected: order, got: h.rows });
    }
    if !verify_hadamard(h).passed {
        return Err(Error::NotHadamard);
    }
    if !crate::designs::verify_steiner(sys).passed {
        return Err(Error::Domain("input is not a (2,k,v)-Steiner system".to_string()));
    }
    let (v_pts, b) = (sys.v(), sys.b());
    let n = v_pts * order;
    let scale = Complex64::new(1.0 / (rho as f64).sqrt(), 0.0);
    let hm = h.to_dmatrix();
    let mut v = DMatrix::<Complex64>::zeros(b, n);
    for j in 0..v_pts {
        let incident = sys.blocks_through(j);
        debug_assert_eq!(incident.len(), rho);
        let rows = &assignments[j];
        assert_eq!(rows.len(), rho, "assignment must name rho rows");
        for (s, &block) in incident.iter().enumerate() {
            for t in 0..order {
                v[(block, j * order + t)] = scale * hm[(rows[s], t)];
            }
        }
    }
    Frame::new(v)
}

/// Naimark complement: N vectors in dimension N - r whose Gram X' satisfies
/// (N - r) X' + r X = N I. The orthonormal completion is computed by
/// Gram-Schmidt extension with the standard basis in index order, so the
/// result is deterministic.
pub fn naimark_complement(f: &Frame) -> Result<Frame> {
    let (r, n) = (f.dim(), f.len());
    if r == n {
        return Err(Error::FullRank);
    }
    let report = verify_frame(f)?;
    if !report.is_untf {
        return Err(Error::NotUntf);
    }

    // rows of sqrt(r/N) V are orthonormal up to rounding; re-orthonormalize
    let scale = Complex64::new((r as f64 / n as f64).sqrt(), 0.0);
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for i in 0..r {
        let mut w: DVector<Complex64> = f.synthesis().row(i).transpose().map(|z| z * scale);
        for _ in 0..2 {
            for u in &basis {
                let c = u.dotc(&w);
                w -= u * c;
            }
        }
        basis.push(w.normalize());
    }
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut w = DVector::<Complex64>::zeros(n);
        w[i] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for u in &basis {
                let c = u.dotc(&w);
                w -= u * c;
            }
        }
        if w.norm() > 1e-6 {
            basis.push(w.normalize());
        }
    }
    if basis.len() != n {
        return Err(Error::NotAFrame);
    }

    let comp_scale = Complex64::new((n as f64 / (n - r) as f64).sqrt(), 0.0);
    let mut vp = DMatrix::<Complex64>::zeros(n - r, n);
    for (row, u) in basis[r..].iter().enumerate() {
        // stacking sqrt(r/N) V over sqrt((N-r)/N) V' gives a unitary matrix
        for col in 0..n {
            vp[(row, col)] = u[col] * comp_scale;
        }
    }
    Frame::new(vp)
}

/// Seeded random UNTF via polar-factor tightening: alternate the polar
/// projection onto tight frames with column renormalization until both
/// residuals vanish.
pub fn random_untf(r: usize, n: usize, real: bool, seed: u64) -> Result<Frame> {
    assert!(r >= 1 && r <= n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DMatrix::<Complex64>::from_fn(r, n, |_, _| {
        let re: f64 = rng.random_range(-1.0..1.0);
        let im: f64 = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
        Complex64::new(re, im)
    });
    let ratio = Complex64::new((n as f64 / r as f64).sqrt(), 0.0);
    for _ in 0..500 {
        // polar factor: make V V* = (N/r) I
        let s = inv_sqrt_hermitian(&(&v * v.adjoint()))?;
        v = s * &v * ratio;
        // renormalize columns
        let mut max_dev: f64 = 0.0;
        for j in 0..n {
            let norm = v.column(j).norm();
            max_dev = max_dev.max((norm - 1.0).abs());
            let inv = Complex64::new(1.0 / norm, 0.0);
            for i in 0..r {
                v[(i, j)] *= inv;
            }
        }
        let mut tight = &v * v.adjoint();
        for i in 0..r {
            tight[(i, i)] -= Complex64::new(n as f64 / r as f64, 0.0);
        }
        if max_dev < 1e-13 && frobenius_norm(&tight) < 1e-12 {
            break;
        }
    }
    Frame::new(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{affine_plane, projective_plane};
    use crate::hadamard::{dft, sylvester};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{} vs {}", a, b);
    }

    #[test]
    fn welch_values() {
        assert_close(welch_bound(16, 6).unwrap(), 1.0 / 3.0, 1e-15);
        assert_close(welch_bound(28, 7).unwrap(), 1.0 / 3.0, 1e-15);
        assert_eq!(welch_bound(5, 5).unwrap(), 0.0);
        assert!(welch_bound(3, 5).is_err());
    }

    #[test]
    fn gerzon_values() {
        assert_eq!(gerzon_limit(true, 7), 28);
        assert_eq!(gerzon_limit(false, 3), 9);
        assert_eq!(gerzon_limit(true, 1), 1);
    }

    #[test]
    fn simplex_gram() {
        let f = simplex_etf(3);
        let g = gram(&f);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { -1.0 / 3.0 };
                assert_close(g.matrix()[(i, j)].re, want, 1e-12);
            }
        }
        // centroid of the simplex is the origin
        let sum = f.synthesis().column_sum();
        assert!(sum.norm() < 1e-12);

        // r = 1: antipodal pair
        let f1 = simplex_etf(1);
        let g1 = gram(&f1);
        assert_close(g1.matrix()[(0, 1)].re, -1.0, 1e-15);
    }

    #[test]
    fn simplex_is_etf() {
        for r in 1..=6 {
            let f = simplex_etf(r);
            let rep = verify_frame(&f).unwrap();
            assert!(rep.is_etf, "simplex({})", r);
            assert!(rep.welch_residual < 1e-9);
        }
    }

    #[test]
    fn orthonormal_basis_report() {
        let f = Frame::new(DMatrix::identity(3, 3).map(|x: f64| Complex64::new(x, 0.0))).unwrap();
        let rep = verify_frame(&f).unwrap();
        assert!(rep.is_untf);
        assert_eq!(rep.coherence, 0.0);
        assert_eq!(rep.welch, 0.0);
    }

    #[test]
    fn perturbed_basis_is_not_untf() {
        // 3 unit vectors in C^3 that are not orthogonal
        let mut m = DMatrix::identity(3, 3).map(|x: f64| Complex64::new(x, 0.0));
        m[(0, 1)] = Complex64::new(0.6, 0.0);
        m[(1, 1)] = Complex64::new(0.8, 0.0);
        let f = Frame::new(m).unwrap();
        assert!(!verify_frame(&f).unwrap().is_untf);
    }

    #[test]
    fn steiner_affine2_real() {
        let sys = affine_plane(2).unwrap();
        let f = steiner_etf(&sys, &sylvester(2).unwrap()).unwrap();
        assert_eq!((f.dim(), f.len()), (6, 16));
        assert!(f.is_real());
        let rep = verify_frame(&f).unwrap();
        assert!(rep.is_etf);
        assert_close(rep.coherence, 1.0 / 3.0, 1e-9);
        // entries in {0, +-3^{-1/2}}
        let s = 3.0_f64.sqrt().recip();
        for z in f.synthesis().iter() {
            assert!(z.norm() < 1e-12 || (z.norm() - s).abs() < 1e-12);
        }
        // each block row has k(1+rho) nonzeros
        for i in 0..6 {
            let nnz = f.synthesis().row(i).iter().filter(|z| z.norm() > 1e-12).count();
            assert_eq!(nnz, sys.k() * (1 + sys.rho()));
        }
    }

    #[test]
    fn steiner_fano_saturates_real_gerzon() {
        let sys = projective_plane(2).unwrap();
        let f = steiner_etf(&sys, &sylvester(2).unwrap()).unwrap();
        assert_eq!((f.dim(), f.len()), (7, 28));
        let rep = verify_frame(&f).unwrap();
        assert!(rep.is_etf);
        assert_eq!(rep.gerzon_limit_real, 28);
    }

    #[test]
    fn steiner_dft_complex() {
        let sys = affine_plane(2).unwrap();
        let f = steiner_etf(&sys, &dft(4)).unwrap();
        assert!(!f.is_real());
        let rep = verify_frame(&f).unwrap();
        assert!(rep.is_etf);
        assert_eq!((rep.n, rep.r), (16, 6));
        assert_close(rep.coherence, 1.0 / 3.0, 1e-9);
    }

    #[test]
    fn steiner_gram_moduli() {
        let sys = affine_plane(2).unwrap();
        let f = steiner_etf(&sys, &sylvester(2).unwrap()).unwrap();
        let g = gram(&f);
        let rho = sys.rho() as f64;
        for i in 0..16 {
            for j in 0..16 {
                if i != j {
                    assert_close(g.matrix()[(i, j)].norm(), 1.0 / rho, 1e-9);
                }
            }
        }
    }

    #[test]
    fn steiner_size_mismatch() {
        let sys = affine_plane(2).unwrap();
        assert!(matches!(
            steiner_etf(&sys, &sylvester(1).unwrap()),
            Err(Error::SizeMismatch { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn naimark_of_simplex() {
        // simplex(3) -> 4 vectors in R^1 with all-ones Gram
        let f = simplex_etf(3);
        let c = naimark_complement(&f).unwrap();
        assert_eq!((c.dim(), c.len()), (1, 4));
        let g = gram(&c);
        for i in 0..4 {
            for j in 0..4 {
                assert_close(g.matrix()[(i, j)].norm(), 1.0, 1e-9);
            }
        }
    }

    #[test]
    fn naimark_gram_identity() {
        for f in [
            simplex_etf(2),
            simplex_etf(3),
            simplex_etf(5),
            steiner_etf(&affine_plane(2).unwrap(), &sylvester(2).unwrap()).unwrap(),
            steiner_etf(&affine_plane(2).unwrap(), &dft(4)).unwrap(),
        ] {
            let (r, n) = (f.dim() as f64, f.len() as f64);
            let c = naimark_complement(&f).unwrap();
            let x = gram(&f);
            let xp = gram(&c);
            for i in 0..f.len() {
                for j in 0..f.len() {
                    let lhs = (n - r) * xp.matrix()[(i, j)] + r * x.matrix()[(i, j)];
                    let want = if i == j { n } else { 0.0 };
                    assert!((lhs - Complex64::new(want, 0.0)).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn naimark_of_steiner_coherence() {
        let f = steiner_etf(&affine_plane(2).unwrap(), &sylvester(2).unwrap()).unwrap();
        let c = naimark_complement(&f).unwrap();
        assert_eq!((c.dim(), c.len()), (10, 16));
        let rep = verify_frame(&c).unwrap();
        assert!(rep.is_etf);
        // r alpha / (N - r) = 6 (1/3) / 10 = 1/5 = welch(16, 10)
        assert_close(rep.coherence, 0.2, 1e-9);
    }

    #[test]
    fn double_complement_restores_gram() {
        let f = steiner_etf(&affine_plane(2).unwrap(), &sylvester(2).unwrap()).unwrap();
        let cc = naimark_complement(&naimark_complement(&f).unwrap()).unwrap();
        let a = gram(&f);
        let b = gram(&cc);
        for i in 0..16 {
            for j in 0..16 {
                assert!((a.matrix()[(i, j)] - b.matrix()[(i, j)]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn naimark_full_rank_rejected() {
        let f = Frame::new(DMatrix::identity(3, 3).map(|x: f64| Complex64::new(x, 0.0))).unwrap();
        assert!(matches!(naimark_complement(&f), Err(Error::FullRank)));
    }

    #[test]
    fn tightened_random_frames_are_untf() {
        for seed in 0..10 {
            let f = random_untf(3, 7, seed % 2 == 0, seed).unwrap();
            let rep = verify_frame(&f).unwrap();
            assert!(rep.is_untf, "seed {}", seed);
        }
    }

    #[test]
    fn frame_json_roundtrip_bit_exact() {
        let f = steiner_etf(&affine_plane(2).unwrap(), &dft(4)).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: Frame = serde_json::from_str(&s).unwrap();
        for (a, b) in f.synthesis().iter().zip(back.synthesis().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn frame_json_rejects_malformed() {
        assert!(serde_json::from_str::<Frame>(r#"{"kind":"frame","real":true,"rows":2"#).is_err());
        assert!(serde_json::from_str::<Frame>(
            r#"{"kind":"frame","real":true,"rows":2,"cols":2,"data":[[1,0]]}"#
        )
        .is_err());
    }
}
