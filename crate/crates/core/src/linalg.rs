//! Dense complex matrix kernel.
//!
//! Hermitian eigendecomposition (cyclic Jacobi), thin SVD (one-sided Jacobi),
//! Moore-Penrose pseudoinverse, PSD square root and spectral norm. All
//! routines are deterministic for a fixed input.

// Redundant once std is in the build graph (test builds).
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

const JACOBI_MAX_SWEEPS: usize = 60;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "CMatrix dimensions must be positive");
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        let m = CMatrix { rows, cols, data };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    /// Real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows[0].as_ref().len();
        Self::from_fn(rows.len(), cols, |i, j| {
            let row = rows[i].as_ref();
            assert_eq!(row.len(), cols, "ragged rows");
            C64::new(row[j], 0.0)
        })
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// First `k` columns.
    pub fn leading_columns(&self, k: usize) -> Self {
        Self::from_fn(self.rows, k, |i, j| self[(i, j)])
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `||M - M*||_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        assert!(self.is_square());
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn add_identity(&self, z: C64) -> Self {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i * self.cols + i] += z;
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks(self.cols)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Relative cutoff below which singular values count as zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankTolerance {
    relative_cutoff: f64,
}

impl RankTolerance {
    pub fn new(relative_cutoff: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&relative_cutoff) {
            return Err(Error::InvalidTolerance(relative_cutoff));
        }
        Ok(RankTolerance { relative_cutoff })
    }

    /// Default cutoff `1e-10 * max(rows, cols)`.
    pub fn for_shape(rows: usize, cols: usize) -> Self {
        RankTolerance { relative_cutoff: 1e-10 * rows.max(cols) as f64 }
    }

    pub fn relative_cutoff(&self) -> f64 {
        self.relative_cutoff
    }
}

/// Eigenvalues ascending, eigenvectors as the columns of a unitary matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Thin SVD `M = U diag(sigma) V*` with `k = min(rows, cols)` columns in
/// `u` and `v` and singular values nonincreasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.singular_values.len();
        let us = CMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)] * self.singular_values[j]);
        &us * &self.v.adjoint()
    }

    /// Number of singular values strictly above `cutoff * sigma_1`.
    pub fn rank(&self, tol: RankTolerance) -> usize {
        let s1 = self.singular_values.first().copied().unwrap_or(0.0);
        if s1 == 0.0 {
            return 0;
        }
        let cut = tol.relative_cutoff * s1;
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }
}

/// Reusable buffers for repeated small Hermitian eigenproblems.
#[derive(Clone, Debug, Default)]
pub struct JacobiWorkspace {
    a: Vec<C64>,
    v: Vec<C64>,
    n: usize,
}

impl JacobiWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Diagonalizes the Hermitian matrix given row-major in `h` (`n x n`).
    /// Afterwards `diag(i)` holds the eigenvalues (unsorted) and
    /// `vector(i)` the matching eigenvectors.
    pub fn diagonalize(&mut self, h: &[C64], n: usize) {
        self.n = n;
        self.a.clear();
        self.a.extend_from_slice(h);
        self.v.clear();
        self.v.resize(n * n, ZERO);
        for i in 0..n {
            self.v[i * n + i] = ONE;
        }
        jacobi_sweeps(&mut self.a, &mut self.v, n);
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        self.a[i * self.n + i].re
    }

    /// Index of the smallest and largest eigenvalue.
    pub fn extreme_indices(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut hi = 0;
        for i in 1..self.n {
            if self.diag(i) < self.diag(lo) {
                lo = i;
            }
            if self.diag(i) > self.diag(hi) {
                hi = i;
            }
        }
        (lo, hi)
    }

    /// Copies eigenvector `i` into `out`.
    pub fn vector_into(&self, i: usize, out: &mut Vec<C64>) {
        out.clear();
        out.extend((0..self.n).map(|k| self.v[k * self.n + i]));
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Iteration cap per eigenvalue of the implicit QL step.
const QL_MAX_ITERS: usize = 60;

/// Buffers for repeated small Hermitian eigenproblems, solved by Householder
/// reduction to real tridiagonal form and implicit QL. Same interface as
/// [`JacobiWorkspace`], but several times faster beyond `n = 3`; eigenvectors
/// are only assembled on request.
#[derive(Clone, Debug, Default)]
pub struct TridiagonalWorkspace {
    a: Vec<C64>,
    /// Householder product times the diagonal phase that makes `T` real.
    q: Vec<C64>,
    /// Eigenvectors of the real tridiagonal matrix, row-major.
    z: Vec<f64>,
    d: Vec<f64>,
    e: Vec<f64>,
    v: Vec<C64>,
    p: Vec<C64>,
    n: usize,
}

impl TridiagonalWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Diagonalizes the Hermitian matrix given row-major in `h` (`n x n`).
    pub fn diagonalize(&mut self, h: &[C64], n: usize) {
        self.n = n;
        self.a.clear();
        self.a.extend_from_slice(h);
        self.q.clear();
        self.q.resize(n * n, ZERO);
        for i in 0..n {
            self.q[i * n + i] = ONE;
        }
        self.householder();
        self.d.clear();
        self.d.extend((0..n).map(|i| self.a[i * n + i].re));
        // Phases turning the complex subdiagonal into |e_i|.
        self.e.clear();
        self.e.push(0.0);
        let mut delta = ONE;
        for i in 0..n.saturating_sub(1) {
            let off = self.a[(i + 1) * n + i];
            let r = off.norm();
            if r > 0.0 {
                delta *= off / r;
            }
            self.e.push(r);
            for k in 0..n {
                self.q[k * n + i + 1] *= delta;
            }
        }
        self.z.clear();
        self.z.resize(n * n, 0.0);
        for i in 0..n {
            self.z[i * n + i] = 1.0;
        }
        tql2(&mut self.d, &mut self.e, &mut self.z, n);
    }

    /// Reduces `a` in place to tridiagonal form, accumulating into `q`.
    fn householder(&mut self) {
        let n = self.n;
        let a = &mut self.a;
        self.v.clear();
        self.v.resize(n, ZERO);
        let v = &mut self.v;
        self.p.clear();
        self.p.resize(n, ZERO);
        let p = &mut self.p;
        for k in 0..n.saturating_sub(2) {
            let tail: f64 = ((k + 2)..n).map(|i| a[i * n + k].norm_sqr()).sum();
            if tail == 0.0 {
                continue;
            }
            let x0 = a[(k + 1) * n + k];
            let alpha = (x0.norm_sqr() + tail).sqrt();
            let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
            for i in (k + 1)..n {
                v[i] = a[i * n + k];
            }
            v[k + 1] += phase * alpha;
            let vnorm2: f64 = ((k + 1)..n).map(|i| v[i].norm_sqr()).sum();
            let tau = 2.0 / vnorm2;
            // p = tau S v over the trailing block.
            for i in (k + 1)..n {
                let mut acc = ZERO;
                for j in (k + 1)..n {
                    acc += a[i * n + j] * v[j];
                }
                p[i] = acc * tau;
            }
            let vp: C64 = ((k + 1)..n).map(|i| v[i].conj() * p[i]).sum();
            let kk = 0.5 * tau * vp.re;
            for i in (k + 1)..n {
                p[i] -= v[i] * kk;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    a[i * n + j] -= v[i] * p[j].conj() + p[i] * v[j].conj();
                }
            }
            let top = -phase * alpha;
            a[(k + 1) * n + k] = top;
            a[k * n + k + 1] = top.conj();
            for i in (k + 2)..n {
                a[i * n + k] = ZERO;
                a[k * n + i] = ZERO;
            }
            // q <- q (I - tau v v*).
            for r in 0..n {
                let row = &mut self.q[r * n + k + 1..(r + 1) * n];
                let tail = &v[k + 1..n];
                let acc = tau * row.iter().zip(tail).map(|(q, v)| q * v).sum::<C64>();
                for (q, v) in row.iter_mut().zip(tail) {
                    *q -= acc * v.conj();
                }
            }
        }
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        self.d[i]
    }

    /// Index of the smallest and largest eigenvalue.
    pub fn extreme_indices(&self) -> (usize, usize) {
        let mut lo = 0;
        let mut hi = 0;
        for i in 1..self.n {
            if self.d[i] < self.d[lo] {
                lo = i;
            }
            if self.d[i] > self.d[hi] {
                hi = i;
            }
        }
        (lo, hi)
    }

    /// Writes eigenvector `i` into `out`.
    pub fn vector_into(&self, i: usize, out: &mut Vec<C64>) {
        let n = self.n;
        out.clear();
        out.extend((0..n).map(|r| (0..n).map(|k| self.q[r * n + k] * self.z[k * n + i]).sum::<C64>()));
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Implicit QL on the symmetric tridiagonal matrix with diagonal `d` and
/// subdiagonal `e[1..]`, accumulating rotations into `z` (row-major).
/// Follows the EISPACK routine of the same name.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) {
    if n == 1 {
        return;
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > f64::EPSILON * tst1 {
            m += 1;
        }
        if m > l {
            for _ in 0..QL_MAX_ITERS {
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk1 = z[k * n + i + 1];
                        let zk = z[k * n + i];
                        z[k * n + i + 1] = s * zk + c * zk1;
                        z[k * n + i] = c * zk - s * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= f64::EPSILON * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Cyclic complex Jacobi on a Hermitian matrix stored row-major in `a`,
/// accumulating rotations into `v`. On return `a` is diagonal to working
/// accuracy.
fn jacobi_sweeps(a: &mut [C64], v: &mut [C64], n: usize) {
    if n == 1 {
        a[0] = C64::new(a[0].re, 0.0);
        return;
    }
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if total == 0.0 {
        return;
    }
    let eps2 = (f64::EPSILON * f64::EPSILON) * total;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= eps2 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[p * n + q];
                let gabs = g.norm();
                if gabs == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                if gabs <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                let phase = g / gabs;
                let tau = (aqq - app) / (2.0 * gabs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on coordinates (p, q).
                let ph = phase.conj();
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = ph * (-s);
                let gqq = ph * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * gpp + akq * gqp;
                    a[k * n + q] = akp * gpq + akq * gqq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[q * n + k] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * gpp + vkq * gqp;
                    v[k * n + q] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }
}

fn check_hermitian(m: &CMatrix, hermiticity_tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = m.hermiticity_residual() / m.frobenius_norm().max(1.0);
    if residual > hermiticity_tol {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// diagonalization once it passes the hermiticity check.
pub fn hermitian_eig(m: &CMatrix, hermiticity_tol: f64) -> Result<HermitianEigen> {
    check_hermitian(m, hermiticity_tol)?;
    let n = m.rows();
    let h = m.hermitian_part();
    let mut ws = JacobiWorkspace::new();
    ws.diagonalize(h.as_slice(), n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| ws.diag(i).total_cmp(&ws.diag(j)));
    let values = order.iter().map(|&i| ws.diag(i)).collect();
    let vectors = CMatrix::from_fn(n, n, |k, j| ws.v[k * n + order[j]]);
    Ok(HermitianEigen { values, vectors })
}

/// Thin SVD by one-sided (Hestenes) Jacobi.
pub fn svd(m: &CMatrix) -> Svd {
    if m.rows() < m.cols() {
        let t = svd_tall(&m.adjoint());
        return Svd { u: t.v, singular_values: t.singular_values, v: t.u };
    }
    svd_tall(m)
}

fn svd_tall(m: &CMatrix) -> Svd {
    let (rows, cols) = (m.rows(), m.cols());
    // Work column-major: col j occupies w[j*rows .. (j+1)*rows].
    let mut w: Vec<C64> = vec![ZERO; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            w[j * rows + i] = m[(i, j)];
        }
    }
    let mut v: Vec<C64> = vec![ZERO; cols * cols];
    for j in 0..cols {
        v[j * cols + j] = ONE;
    }
    let tol = f64::EPSILON * 4.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for i in 0..rows {
                    let up = w[p * rows + i];
                    let uq = w[q * rows + i];
                    alpha += up.norm_sqr();
                    beta += uq.norm_sqr();
                    gamma += up.conj() * uq;
                }
                let gabs = gamma.norm();
                if gabs == 0.0 || gabs <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = (gamma / gabs).conj();
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let up = w[p * rows + i];
                    let uq = w[q * rows + i] * ph;
                    w[p * rows + i] = up * c - uq * s;
                    w[q * rows + i] = up * s + uq * c;
                }
                for i in 0..cols {
                    let vp = v[p * cols + i];
                    let vq = v[q * cols + i] * ph;
                    v[p * cols + i] = vp * c - vq * s;
                    v[q * cols + i] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> =
        (0..cols).map(|j| w[j * rows..(j + 1) * rows].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let s_max = norms[order[0]];
    let mut u = CMatrix::zeros(rows, cols);
    let mut vm = CMatrix::zeros(cols, cols);
    let mut singular_values = Vec::with_capacity(cols);
    let mut missing = Vec::new();
    for (jj, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        singular_values.push(sigma);
        for i in 0..cols {
            vm[(i, jj)] = v[j * cols + i];
        }
        if sigma > 0.0 && sigma > s_max * f64::EPSILON * 1e-2 {
            for i in 0..rows {
                u[(i, jj)] = w[j * rows + i] / sigma;
            }
        } else {
            missing.push(jj);
        }
    }
    complete_orthonormal(&mut u, &missing);
    Svd { u, singular_values, v: vm }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to all other
/// columns (Gram-Schmidt against the standard basis).
fn complete_orthonormal(u: &mut CMatrix, missing: &[usize]) {
    let rows = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &j in missing {
        while candidate < rows {
            let mut x = vec![ZERO; rows];
            x[candidate] = ONE;
            candidate += 1;
            for _ in 0..2 {
                for &k in &filled {
                    let dot: C64 = (0..rows).map(|i| u[(i, k)].conj() * x[i]).sum();
                    for (i, xi) in x.iter_mut().enumerate() {
                        *xi -= u[(i, k)] * dot;
                    }
                }
            }
            let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-6 {
                for (i, xi) in x.iter().enumerate() {
                    u[(i, j)] = xi / nrm;
                }
                filled.push(j);
                break;
            }
        }
    }
}

/// Moore-Penrose pseudoinverse; singular values at or below
/// `tol.relative_cutoff() * sigma_1` are treated as zero.
pub fn pinv(m: &CMatrix, tol: RankTolerance) -> CMatrix {
    let d = svd(m);
    let k = d.rank(tol);
    let mut out = CMatrix::zeros(m.cols(), m.rows());
    for j in 0..k {
        let inv = 1.0 / d.singular_values[j];
        for r in 0..m.cols() {
            let vr = d.v[(r, j)] * inv;
            for c in 0..m.rows() {
                out[(r, c)] += vr * d.u[(c, j)].conj();
            }
        }
    }
    out
}

/// Hermiticity threshold used when a PSD matrix is expected.
pub const PSD_HERMITICITY_TOL: f64 = 1e-10;

/// Eigendecomposition of a PSD matrix with eigenvalues in
/// `[-cutoff * lambda_max, cutoff * lambda_max]` clamped to zero.
/// Eigenvalues are returned ascending.
pub fn psd_eig(a: &CMatrix, tol: RankTolerance) -> Result<HermitianEigen> {
    let mut e = hermitian_eig(a, PSD_HERMITICITY_TOL)?;
    let lmax = e.values.last().copied().unwrap_or(0.0).max(0.0);
    let cut = tol.relative_cutoff() * lmax;
    if let Some(&lmin) = e.values.first() {
        if lmin < -cut && lmin < 0.0 {
            return Err(Error::NotPsd { eigenvalue: if lmax > 0.0 { lmin / lmax } else { lmin } });
        }
    }
    for l in &mut e.values {
        if *l <= cut {
            *l = 0.0;
        }
    }
    Ok(e)
}

/// Hermitian PSD square root.
pub fn psd_sqrt(a: &CMatrix, tol: RankTolerance) -> Result<CMatrix> {
    let e = psd_eig(a, tol)?;
    let roots: Vec<f64> = e.values.iter().map(|l| l.sqrt()).collect();
    Ok(spectral_synthesis(&e.vectors, &roots))
}

/// `V diag(f) V*`.
pub fn spectral_synthesis(vectors: &CMatrix, f: &[f64]) -> CMatrix {
    let n = vectors.rows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &fk) in f.iter().enumerate() {
        if fk == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = vectors[(i, k)] * fk;
            for j in 0..n {
                out[(i, j)] += vi * vectors[(j, k)].conj();
            }
        }
    }
    out
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    svd(m).singular_values[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        random(n, n, seed).hermitian_part()
    }

    #[test]
    fn tridiagonal_matches_jacobi() {
        let mut ws = TridiagonalWorkspace::new();
        let mut x = Vec::new();
        for n in 1..=7 {
            for seed in 0..20 {
                let h = random_hermitian(n, 1000 + seed);
                ws.diagonalize(h.as_slice(), n);
                let mut got: Vec<f64> = (0..n).map(|i| ws.diag(i)).collect();
                got.sort_by(f64::total_cmp);
                let want = hermitian_eig(&h, 1e-12).unwrap().values;
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-13, "n={n}: {got:?} vs {want:?}");
                }
                for i in 0..n {
                    ws.vector_into(i, &mut x);
                    let hx = h.mul_vec(&x);
                    let res: f64 = hx.iter().zip(&x).map(|(a, b)| (a - b * ws.diag(i)).norm_sqr()).sum::<f64>().sqrt();
                    let norm: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    assert!(res < 1e-13 && (norm - 1.0).abs() < 1e-13, "n={n} residual {res} norm {norm}");
                }
            }
        }
        // Already diagonal, and a block that needs no reflection.
        ws.diagonalize(CMatrix::from_real_diag(&[3.0, -1.0, 2.0]).as_slice(), 3);
        assert_eq!(ws.extreme_indices(), (1, 0));
    }

    #[test]
    fn eig_diagonal_and_pauli() {
        let e = hermitian_eig(&CMatrix::from_real_diag(&[2.0, 1.0]), 1e-12).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);

        let x = CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let e = hermitian_eig(&x, 1e-12).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_reassembles_random_hermitian() {
        for seed in 0..20 {
            let h = random_hermitian(5, seed);
            let e = hermitian_eig(&h, 1e-12).unwrap();
            let back = spectral_synthesis_signed(&e.vectors, &e.values);
            assert!((&back - &h).frobenius_norm() <= 1e-12 * h.frobenius_norm());
            let vtv = &e.vectors.adjoint() * &e.vectors;
            assert!((&vtv - &CMatrix::identity(5)).frobenius_norm() < 1e-13);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    fn spectral_synthesis_signed(v: &CMatrix, l: &[f64]) -> CMatrix {
        let d = CMatrix::from_real_diag(l);
        &(v * &d) * &v.adjoint()
    }

    #[test]
    fn eig_rejects_non_hermitian_and_non_square() {
        let m = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m, 1e-8), Err(Error::NotHermitian { .. })));
        let r = CMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&r, 1e-8), Err(Error::NonSquare { .. })));
    }

    #[test]
    fn svd_small_cases() {
        let s = svd(&CMatrix::identity(3));
        assert_eq!(s.singular_values, vec![1.0, 1.0, 1.0]);
        let s = svd(&CMatrix::from_real_rows(&[[0.0, 2.0], [0.0, 0.0]]));
        assert!((s.singular_values[0] - 2.0).abs() < 1e-15);
        assert_eq!(s.singular_values[1], 0.0);
        assert!((&s.reconstruct() - &CMatrix::from_real_rows(&[[0.0, 2.0], [0.0, 0.0]])).max_abs() < 1e-15);
        let utu = &s.u.adjoint() * &s.u;
        assert!((&utu - &CMatrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn svd_reassembles_rectangular() {
        for seed in 0..10 {
            for (r, c) in [(4, 6), (6, 4), (5, 5), (1, 3)] {
                let m = random(r, c, seed);
                let s = svd(&m);
                assert!((&s.reconstruct() - &m).frobenius_norm() <= 1e-12 * m.frobenius_norm());
                assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn pinv_examples() {
        let tol = RankTolerance::for_shape(2, 2);
        let ones = CMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        let p = pinv(&ones, tol);
        assert!((&p - &ones.scale_real(0.25)).max_abs() < 1e-15);
        let d = pinv(&CMatrix::from_real_diag(&[2.0, 5.0]), tol);
        assert!((&d - &CMatrix::from_real_diag(&[0.5, 0.2])).max_abs() < 1e-15);
        let z = pinv(&CMatrix::zeros(2, 3), tol);
        assert_eq!((z.rows(), z.cols()), (3, 2));
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn psd_sqrt_examples() {
        let tol = RankTolerance::for_shape(2, 2);
        let ones = CMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        let s = psd_sqrt(&ones, tol).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((&s - &ones.scale_real(h)).max_abs() < 1e-15);
        assert!((&(&s * &s) - &ones).max_abs() < 1e-15);
        assert!((&psd_sqrt(&CMatrix::identity(3), tol).unwrap() - &CMatrix::identity(3)).max_abs() < 1e-15);
        let s = psd_sqrt(&CMatrix::from_real_diag(&[4.0, 0.0]), tol).unwrap();
        assert!((&s - &CMatrix::from_real_diag(&[2.0, 0.0])).max_abs() < 1e-15);
        let bad = CMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(psd_sqrt(&bad, tol), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]])) - 1.0).abs() < 1e-15);
        assert!((spectral_norm(&CMatrix::identity(3).scale_real(3.0)) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_matches_power_iteration() {
        for seed in 0..5 {
            let m = random(6, 6, 100 + seed);
            let g = &m.adjoint() * &m;
            let mut x = vec![C64::new(1.0, 0.3); 6];
            let mut lambda = 0.0;
            for _ in 0..5000 {
                let y = g.mul_vec(&x);
                let n = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                lambda = n;
                x = y.into_iter().map(|z| z / n).collect();
            }
            assert!((spectral_norm(&m) - lambda.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn rank_tolerance_bounds() {
        assert!(RankTolerance::new(1.0).is_err());
        assert!(RankTolerance::new(-1e-3).is_err());
        assert!(RankTolerance::new(0.0).is_ok());
    }

    #[test]
    fn from_vec_validates() {
        assert_eq!(CMatrix::from_vec(0, 1, vec![]), Err(Error::EmptyMatrix));
        assert!(matches!(CMatrix::from_vec(2, 2, vec![ZERO; 3]), Err(Error::DimensionMismatch { .. })));
        assert_eq!(CMatrix::from_vec(1, 1, vec![C64::new(f64::NAN, 0.0)]), Err(Error::NonFinite));
    }
}
