//! The semi-Hilbert context induced by a PSD weight `A`, and the A-adjoint
//! calculus on it.

// Redundant once std is in the build graph (test builds).
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{psd_eig, spectral_synthesis, CMatrix, RankTolerance, C64};

/// Default relative Frobenius residual accepted by membership and
/// selfadjointness tests.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;

/// `(H, <.,.>_A)` for a PSD weight `A`, with every factor the functionals
/// need cached at construction.
#[derive(Clone, Debug)]
pub struct SemiHilbertSpace {
    a: CMatrix,
    sqrt_a: CMatrix,
    sqrt_a_pinv: CMatrix,
    a_pinv: CMatrix,
    range_basis: CMatrix,
    projection: CMatrix,
    /// `U_r* A^{1/2}`, `r x n`.
    compress_left: CMatrix,
    /// `(A^{1/2})^+ U_r`, `n x r`.
    compress_right: CMatrix,
    eigenvalues: Vec<f64>,
    rank: usize,
    tol: RankTolerance,
    membership_tol: f64,
    is_identity: bool,
}

/// The `r x r` matrix `B = U_r* A^{1/2} T (A^{1/2})^+ U_r`. For `T` in
/// `B_A(H)`, `w(B) = w_A(T)`, `||B|| = ||T||_A`, and likewise for the
/// Crawford number and the cosine of angle.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedOperator {
    pub b: CMatrix,
    pub source_dim: usize,
}

impl SemiHilbertSpace {
    /// Builds the space for a Hermitian PSD weight. Eigenvalues of `A` in
    /// `[-cutoff * lambda_max, cutoff * lambda_max]` count as zero.
    pub fn new(a: &CMatrix, tol: RankTolerance) -> Result<Self> {
        let n = a.rows();
        let eig = psd_eig(a, tol)?;
        // Eigenvalues are ascending; the positive ones are at the tail.
        let positive: Vec<usize> = (0..n).filter(|&k| eig.values[k] > 0.0).collect();
        let rank = positive.len();
        if rank == 0 {
            return Err(Error::ZeroWeight);
        }
        let range_basis = CMatrix::from_fn(n, rank, |i, j| eig.vectors[(i, positive[j])]);
        let root: Vec<f64> = eig.values.iter().map(|&l| l.sqrt()).collect();
        let inv_root: Vec<f64> = eig.values.iter().map(|&l| if l > 0.0 { 1.0 / l.sqrt() } else { 0.0 }).collect();
        let inv: Vec<f64> = eig.values.iter().map(|&l| if l > 0.0 { 1.0 / l } else { 0.0 }).collect();
        let ind: Vec<f64> = eig.values.iter().map(|&l| if l > 0.0 { 1.0 } else { 0.0 }).collect();
        let compress_left = CMatrix::from_fn(rank, n, |i, j| eig.vectors[(j, positive[i])].conj() * root[positive[i]]);
        let compress_right = CMatrix::from_fn(n, rank, |i, j| eig.vectors[(i, positive[j])] * inv_root[positive[j]]);
        let is_identity = *a == CMatrix::identity(n);
        let (sqrt_a, sqrt_a_pinv, a_pinv, projection) = if is_identity {
            let id = CMatrix::identity(n);
            (id.clone(), id.clone(), id.clone(), id)
        } else {
            (
                spectral_synthesis(&eig.vectors, &root),
                spectral_synthesis(&eig.vectors, &inv_root),
                spectral_synthesis(&eig.vectors, &inv),
                spectral_synthesis(&eig.vectors, &ind),
            )
        };
        Ok(SemiHilbertSpace {
            a: a.clone(),
            sqrt_a,
            sqrt_a_pinv,
            a_pinv,
            range_basis,
            projection,
            compress_left,
            compress_right,
            eigenvalues: eig.values,
            rank,
            tol,
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
            is_identity,
        })
    }

    /// Same as [`SemiHilbertSpace::new`] with the default rank cutoff for the
    /// dimension of `a`.
    pub fn with_default_tol(a: &CMatrix) -> Result<Self> {
        Self::new(a, RankTolerance::for_shape(a.rows(), a.cols()))
    }

    pub fn with_membership_tol(mut self, tol: f64) -> Self {
        self.membership_tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn weight(&self) -> &CMatrix {
        &self.a
    }
    pub fn sqrt_weight(&self) -> &CMatrix {
        &self.sqrt_a
    }
    pub fn sqrt_weight_pinv(&self) -> &CMatrix {
        &self.sqrt_a_pinv
    }
    pub fn weight_pinv(&self) -> &CMatrix {
        &self.a_pinv
    }
    /// Orthonormal basis of `R(A)`, `n x r`.
    pub fn range_basis(&self) -> &CMatrix {
        &self.range_basis
    }
    /// Orthogonal projection onto `R(A)`.
    pub fn projection(&self) -> &CMatrix {
        &self.projection
    }
    /// Eigenvalues of `A` after clamping, ascending.
    pub fn weight_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
    pub fn rank_tolerance(&self) -> RankTolerance {
        self.tol
    }
    pub fn membership_tol(&self) -> f64 {
        self.membership_tol
    }
    pub fn is_identity(&self) -> bool {
        self.is_identity
    }

    fn check_operator(&self, t: &CMatrix) -> Result<()> {
        if !t.is_square() {
            return Err(Error::NonSquare { rows: t.rows(), cols: t.cols() });
        }
        if t.rows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: t.rows() });
        }
        Ok(())
    }

    fn check_vector(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    /// `<x, y>_A = <Ax, y>`, linear in `x`, conjugate-linear in `y`.
    pub fn semi_inner(&self, x: &[C64], y: &[C64]) -> Result<C64> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        let ax = self.a.mul_vec(x);
        Ok(ax.iter().zip(y).map(|(u, v)| u * v.conj()).sum())
    }

    /// `||x||_A = ||A^{1/2} x||`.
    pub fn vec_seminorm(&self, x: &[C64]) -> Result<f64> {
        self.check_vector(x)?;
        Ok(self.sqrt_a.mul_vec(x).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    }

    /// Relative residual `||(I - P) T* A||_F / max(1, ||T* A||_F)`; zero iff
    /// `R(T* A)` lies in `R(A)`.
    pub fn membership_residual(&self, t: &CMatrix) -> Result<f64> {
        self.check_operator(t)?;
        if self.is_identity {
            return Ok(0.0);
        }
        let tsa = &t.adjoint() * &self.a;
        let inside = &self.projection * &tsa;
        Ok((&tsa - &inside).frobenius_norm() / tsa.frobenius_norm().max(1.0))
    }

    /// Whether `T` lies in `B_A(H)`, i.e. admits an A-adjoint.
    pub fn admits_adjoint(&self, t: &CMatrix) -> Result<bool> {
        Ok(self.membership_residual(t)? <= self.membership_tol)
    }

    fn require_member(&self, t: &CMatrix) -> Result<()> {
        let residual = self.membership_residual(t)?;
        if residual > self.membership_tol {
            return Err(Error::NoAdjoint { residual });
        }
        Ok(())
    }

    /// The distinguished A-adjoint `A^+ T* A`.
    pub fn sharp(&self, t: &CMatrix) -> Result<CMatrix> {
        self.require_member(t)?;
        if self.is_identity {
            return Ok(t.adjoint());
        }
        Ok(&(&self.a_pinv * &t.adjoint()) * &self.a)
    }

    /// `AT` is Hermitian (to relative tolerance).
    pub fn is_a_selfadjoint(&self, t: &CMatrix) -> Result<bool> {
        self.check_operator(t)?;
        let at = &self.a * t;
        Ok(at.hermiticity_residual() <= self.membership_tol * at.frobenius_norm().max(1.0))
    }

    /// `AT` is Hermitian PSD (to relative tolerance).
    pub fn is_a_positive(&self, t: &CMatrix) -> Result<bool> {
        if !self.is_a_selfadjoint(t)? {
            return Ok(false);
        }
        let at = (&self.a * t).hermitian_part();
        let e = crate::linalg::hermitian_eig(&at, f64::INFINITY)?;
        Ok(e.values[0] >= -self.membership_tol * at.frobenius_norm().max(1.0))
    }

    /// Compression of `T` to the classical space `C^r`.
    pub fn compress(&self, t: &CMatrix) -> Result<CompressedOperator> {
        self.require_member(t)?;
        Ok(CompressedOperator { b: self.compress_unchecked(t), source_dim: self.dim() })
    }

    /// Compression without the membership test; callers must know `T` lies in
    /// `B_A(H)` (e.g. sums and products of members).
    pub fn compress_unchecked(&self, t: &CMatrix) -> CMatrix {
        &(&self.compress_left * t) * &self.compress_right
    }

    /// Maps `x` to its coordinates `U_r* A^{1/2} x` in the compressed space;
    /// `||x||_A` equals the Euclidean norm of the result.
    pub fn compress_vector(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.check_vector(x)?;
        Ok(self.compress_left.mul_vec(x))
    }

    /// Maps coordinates `y` in `C^r` back to a vector `x` in `R(A)` with
    /// `compress_vector(x) = y` and `||x||_A = ||y||`.
    pub fn lift_vector(&self, y: &[C64]) -> Vec<C64> {
        assert_eq!(y.len(), self.rank, "coordinate length must equal rank(A)");
        self.compress_right.mul_vec(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn weighted_pair() -> (CMatrix, CMatrix) {
        (CMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]), CMatrix::from_real_rows(&[[2.0, 2.0], [0.0, 0.0]]))
    }

    #[test]
    fn identity_weight() {
        let sp = SemiHilbertSpace::with_default_tol(&CMatrix::identity(3)).unwrap();
        assert_eq!(sp.rank(), 3);
        assert_eq!(sp.projection(), &CMatrix::identity(3));
        assert_eq!(sp.sqrt_weight(), &CMatrix::identity(3));
    }

    #[test]
    fn rank_one_weight() {
        let (a, _) = weighted_pair();
        let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
        assert_eq!(sp.rank(), 1);
        let half = CMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]);
        assert!((sp.projection() - &half).max_abs() < 1e-15);
        let s = a.scale_real(core::f64::consts::FRAC_1_SQRT_2);
        assert!((sp.sqrt_weight() - &s).max_abs() < 1e-15);

        let sp = SemiHilbertSpace::with_default_tol(&CMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
        assert_eq!(sp.rank(), 1);
        assert!((sp.projection() - &CMatrix::from_real_diag(&[1.0, 0.0])).max_abs() < 1e-15);
    }

    #[test]
    fn zero_weight_rejected() {
        assert_eq!(SemiHilbertSpace::with_default_tol(&CMatrix::zeros(2, 2)).unwrap_err(), Error::ZeroWeight);
        assert!(matches!(SemiHilbertSpace::with_default_tol(&CMatrix::zeros(2, 3)), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn semi_inner_and_seminorm() {
        let e1 = [c(1.0), c(0.0)];
        let e2 = [c(0.0), c(1.0)];
        let id = SemiHilbertSpace::with_default_tol(&CMatrix::identity(2)).unwrap();
        assert_eq!(id.semi_inner(&e1, &e1).unwrap(), c(1.0));
        assert!((id.vec_seminorm(&[c(3.0), c(4.0)]).unwrap() - 5.0).abs() < 1e-15);

        let d = SemiHilbertSpace::with_default_tol(&CMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
        assert_eq!(d.semi_inner(&e2, &e2).unwrap(), c(0.0));
        assert_eq!(d.vec_seminorm(&[c(0.0), c(7.0)]).unwrap(), 0.0);

        let (a, _) = weighted_pair();
        let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
        assert_eq!(sp.semi_inner(&e1, &e2).unwrap(), c(1.0));
        assert!((sp.vec_seminorm(&[c(1.0), c(1.0)]).unwrap() - 2.0).abs() < 1e-14);
        assert!(matches!(sp.semi_inner(&e1, &[c(1.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn semi_inner_is_conjugate_linear_in_second_slot() {
        let sp = SemiHilbertSpace::with_default_tol(&CMatrix::identity(2)).unwrap();
        let x = [C64::new(1.0, 2.0), C64::new(0.5, -1.0)];
        let y = [C64::new(-0.3, 0.1), C64::new(2.0, 0.0)];
        let i = C64::new(0.0, 1.0);
        let iy: Vec<C64> = y.iter().map(|v| v * i).collect();
        let ix: Vec<C64> = x.iter().map(|v| v * i).collect();
        let base = sp.semi_inner(&x, &y).unwrap();
        assert!((sp.semi_inner(&x, &iy).unwrap() - base * i.conj()).norm() < 1e-15);
        assert!((sp.semi_inner(&ix, &y).unwrap() - base * i).norm() < 1e-15);
    }

    #[test]
    fn membership_examples() {
        let inv = SemiHilbertSpace::with_default_tol(&CMatrix::from_real_diag(&[2.0, 1.0])).unwrap();
        assert!(inv.admits_adjoint(&CMatrix::from_real_rows(&[[0.0, 5.0], [-1.0, 3.0]])).unwrap());

        let (a, t) = weighted_pair();
        let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
        assert!(sp.admits_adjoint(&t).unwrap());

        let d = SemiHilbertSpace::with_default_tol(&CMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
        // T* A = [[0, 0], [1, 0]] maps into N(A).
        let upper = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(!d.admits_adjoint(&upper).unwrap());
        assert!(matches!(d.sharp(&upper), Err(Error::NoAdjoint { .. })));
        assert!(matches!(d.compress(&upper), Err(Error::NoAdjoint { .. })));
        // T* A = 0 for the transpose, which is therefore a member.
        assert!(d.admits_adjoint(&upper.adjoint()).unwrap());
    }

    #[test]
    fn sharp_examples() {
        let (a, t) = weighted_pair();
        let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
        let ts = sp.sharp(&t).unwrap();
        assert!((&ts - &a).max_abs() < 1e-12);
        assert!(ts != t);
        // Identity is sent to the range projection.
        let is = sp.sharp(&CMatrix::identity(2)).unwrap();
        assert!((&is - sp.projection()).max_abs() < 1e-14);

        let id = SemiHilbertSpace::with_default_tol(&CMatrix::identity(2)).unwrap();
        let m = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 + 1.0, j as f64 - 0.5));
        assert_eq!(id.sharp(&m).unwrap(), m.adjoint());
    }

    #[test]
    fn selfadjoint_and_positive_predicates() {
        let (a, t) = weighted_pair();
        let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
        assert!(sp.is_a_selfadjoint(&t).unwrap());
        assert!(sp.is_a_positive(&t).unwrap());
        let id = SemiHilbertSpace::with_default_tol(&CMatrix::identity(2)).unwrap();
        let nil = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(!id.is_a_selfadjoint(&nil).unwrap());
        assert!(!id.is_a_positive(&nil).unwrap());
        assert!(!id.is_a_positive(&CMatrix::identity(2).scale_real(-1.0)).unwrap());
    }

    #[test]
    fn compression_examples() {
        let id = SemiHilbertSpace::with_default_tol(&CMatrix::identity(2)).unwrap();
        let m = CMatrix::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let b = id.compress(&m).unwrap().b;
        // Unitary similarity only; compare invariants.
        assert!((b.trace() - m.trace()).norm() < 1e-14);
        assert!((b.frobenius_norm() - m.frobenius_norm()).abs() < 1e-14);

        let (a, t) = weighted_pair();
        let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
        let b = sp.compress(&t).unwrap();
        assert_eq!((b.b.rows(), b.b.cols(), b.source_dim), (1, 1, 2));
        assert!((b.b[(0, 0)] - c(2.0)).norm() < 1e-14);

        let bp = sp.compress(&sp.projection().clone()).unwrap().b;
        assert!((&bp - &CMatrix::identity(1)).max_abs() < 1e-14);
    }

    #[test]
    fn lift_and_compress_vectors_round_trip() {
        let (a, _) = weighted_pair();
        let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
        let y = vec![C64::new(0.6, -0.8)];
        let x = sp.lift_vector(&y);
        assert!((sp.vec_seminorm(&x).unwrap() - 1.0).abs() < 1e-14);
        let back = sp.compress_vector(&x).unwrap();
        assert!((back[0] - y[0]).norm() < 1e-14);
    }
}
