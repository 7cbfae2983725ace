//! Operator-angle cosine `|cos|_A T = inf |<Tx, x>_A| / (||Tx||_A ||x||_A)`
//! over `x` with `||Tx||_A ||x||_A != 0`, evaluated on the compression as
//! `inf |y* B y| / (||By|| ||y||)`.
//!
//! The objective is not convex, so the infimum is approached by projected
//! gradient descent from many starts. Every returned value is attained by
//! some vector and is therefore an upper bound on the infimum.

// Redundant once std is in the build graph (test builds).
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, CMatrix, TridiagonalWorkspace, C64};
use crate::space::SemiHilbertSpace;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosConfig {
    /// Random starting vectors for the descent.
    pub starts: usize,
    /// Largest compressed rank that gets the dense-sampling stage.
    pub brute_force_rank_limit: usize,
    pub dense_samples: usize,
    /// Descent iterations per start.
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for CosConfig {
    fn default() -> Self {
        CosConfig {
            starts: 16,
            brute_force_rank_limit: 3,
            dense_samples: 20_000,
            max_iters: 400,
            seed: 0x636f_735f_615f,
        }
    }
}

impl CosConfig {
    pub fn with_starts(starts: usize) -> Self {
        CosConfig { starts, ..CosConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidConfig("cosine search needs at least one start"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosEstimate {
    /// In `[0, 1]`.
    pub value: f64,
    /// `false`: multi-start upper bound on the infimum. `true`: the rank was
    /// small enough for the dense-sampling stage as well.
    pub certified: bool,
    pub starts_used: usize,
    /// Sphere samples drawn by the dense stage (0 when skipped).
    pub dense_samples: usize,
}

/// `|cos|_A T` with default settings and `starts` random starts.
pub fn cosine_of_angle(sp: &SemiHilbertSpace, t: &CMatrix, starts: usize) -> Result<CosEstimate> {
    cosine_of_angle_with(sp, t, &CosConfig::with_starts(starts))
}

pub fn cosine_of_angle_with(sp: &SemiHilbertSpace, t: &CMatrix, cfg: &CosConfig) -> Result<CosEstimate> {
    cfg.validate()?;
    let b = sp.compress(t)?.b;
    classical_cosine(&b, cfg)
}

/// `|sin|_A T = sqrt(1 - |cos|_A^2 T)`. Since the cosine is an upper
/// bound, the sine is a lower bound.
pub fn sine_of_angle(sp: &SemiHilbertSpace, t: &CMatrix, starts: usize) -> Result<CosEstimate> {
    let c = cosine_of_angle(sp, t, starts)?;
    Ok(CosEstimate { value: sine_from_cosine(c.value), ..c })
}

pub fn sine_from_cosine(c: f64) -> f64 {
    (1.0 - c * c).max(0.0).sqrt()
}

/// Cosine of a matrix in the classical sense.
pub fn classical_cosine(b: &CMatrix, cfg: &CosConfig) -> Result<CosEstimate> {
    cfg.validate()?;
    let r = b.rows();
    let norm = spectral_norm(b);
    if norm <= 1e-14 {
        return Err(Error::ZeroOperator);
    }
    let prob = Problem::new(b);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best = 1.0f64;
    let mut starts = 0;

    for y in prob.spectral_seeds(8) {
        starts += 1;
        best = best.min(prob.descend(y, cfg.max_iters));
    }
    for _ in 0..cfg.starts {
        starts += 1;
        let y = gaussian(&mut rng, r);
        best = best.min(prob.descend(y, cfg.max_iters));
    }

    let dense = r <= cfg.brute_force_rank_limit;
    let mut dense_samples = 0;
    if dense {
        dense_samples = cfg.dense_samples;
        let mut keep: Vec<(f64, Vec<C64>)> = Vec::new();
        const POLISH: usize = 8;
        for _ in 0..cfg.dense_samples {
            let y = gaussian(&mut rng, r);
            let Some(g) = prob.value(&y) else { continue };
            if keep.len() < POLISH || g < keep[POLISH - 1].0 {
                if keep.len() == POLISH {
                    keep.pop();
                }
                let pos = keep.partition_point(|k| k.0 <= g);
                keep.insert(pos, (g, y));
            }
        }
        for (g, y) in keep {
            best = best.min(g.sqrt());
            best = best.min(prob.descend(y, cfg.max_iters));
        }
    }
    Ok(CosEstimate { value: best.clamp(0.0, 1.0), certified: dense, starts_used: starts, dense_samples })
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let mut y: Vec<C64> = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    normalize(&mut y);
    y
}

fn normalize(y: &mut [C64]) -> f64 {
    let n = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in y.iter_mut() {
            *z /= n;
        }
    }
    n
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

struct Problem<'a> {
    b: &'a CMatrix,
    bh: CMatrix,
    bhb: CMatrix,
    scale: f64,
}

impl<'a> Problem<'a> {
    fn new(b: &'a CMatrix) -> Self {
        let bh = b.adjoint();
        let bhb = &bh * b;
        let scale = bhb.max_abs();
        Problem { b, bh, bhb, scale }
    }

    /// `G(y) = |y* B y|^2 / ||By||^2` for unit `y`; `None` on the kernel.
    fn value(&self, y: &[C64]) -> Option<f64> {
        let by = self.b.mul_vec(y);
        let a: f64 = by.iter().map(|z| z.norm_sqr()).sum();
        if a <= 1e-28 * self.scale {
            return None;
        }
        let q = dot(y, &by);
        Some((q.norm_sqr() / a).min(1.0))
    }

    /// Value and Wirtinger gradient with respect to `conj(y)`.
    fn value_grad(&self, y: &[C64]) -> Option<(f64, Vec<C64>)> {
        let by = self.b.mul_vec(y);
        let a: f64 = by.iter().map(|z| z.norm_sqr()).sum();
        if a <= 1e-28 * self.scale {
            return None;
        }
        let q = dot(y, &by);
        let q2 = q.norm_sqr();
        let bhy = self.bh.mul_vec(y);
        let bhby = self.bhb.mul_vec(y);
        let a2 = a * a;
        let grad =
            (0..y.len()).map(|i| ((q.conj() * by[i] + q * bhy[i]) * a - (bhby[i] + y[i] * a) * q2) / a2).collect();
        Some((q2 / a, grad))
    }

    /// Armijo-backtracked gradient descent on the unit sphere; returns the
    /// square root of the best objective seen.
    fn descend(&self, mut y: Vec<C64>, iters: usize) -> f64 {
        if normalize(&mut y) == 0.0 {
            return 1.0;
        }
        let Some((mut g, mut grad)) = self.value_grad(&y) else {
            return 1.0;
        };
        let mut step = 1.0;
        let mut trial = Vec::with_capacity(y.len());
        for _ in 0..iters {
            let gn: f64 = grad.iter().map(|z| z.norm_sqr()).sum();
            if g <= 1e-30 || gn <= 1e-32 {
                break;
            }
            let mut accepted = false;
            for _ in 0..40 {
                trial.clear();
                trial.extend(y.iter().zip(&grad).map(|(a, d)| a - d * step));
                normalize(&mut trial);
                if let Some((gt, gradt)) = self.value_grad(&trial) {
                    if gt <= g - 1e-4 * step * gn {
                        core::mem::swap(&mut y, &mut trial);
                        g = gt;
                        grad = gradt;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            step *= 2.0;
        }
        g.min(1.0).sqrt()
    }

    /// Extreme eigenvectors of `(e^{it} B + e^{-it} B*) / 2` at a few angles,
    /// plus their sums and differences (those mix boundary points across the
    /// origin, where `|y* B y|` is small).
    fn spectral_seeds(&self, angles: usize) -> Vec<Vec<C64>> {
        let n = self.b.rows();
        let mut ws = TridiagonalWorkspace::new();
        let mut h = Vec::with_capacity(n * n);
        let mut out = Vec::new();
        let (mut lo_v, mut hi_v) = (Vec::new(), Vec::new());
        for k in 0..angles {
            let e = C64::from_polar(0.5, PI * k as f64 / angles as f64);
            h.clear();
            for i in 0..n {
                for j in 0..n {
                    h.push(e * self.b[(i, j)] + e.conj() * self.b[(j, i)].conj());
                }
            }
            ws.diagonalize(&h, n);
            let (lo, hi) = ws.extreme_indices();
            ws.vector_into(lo, &mut lo_v);
            ws.vector_into(hi, &mut hi_v);
            out.push(lo_v.clone());
            out.push(hi_v.clone());
            out.push(lo_v.iter().zip(&hi_v).map(|(a, b)| a + b).collect());
            out.push(lo_v.iter().zip(&hi_v).map(|(a, b)| a - b).collect());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_space(n: usize) -> SemiHilbertSpace {
        SemiHilbertSpace::with_default_tol(&CMatrix::identity(n)).unwrap()
    }

    #[test]
    fn identity_has_cosine_one() {
        let c = cosine_of_angle(&identity_space(3), &CMatrix::identity(3), 4).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
        assert!(c.certified);
    }

    #[test]
    fn nilpotent_has_cosine_zero() {
        let nil = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let c = cosine_of_angle(&identity_space(2), &nil, 4).unwrap();
        assert!(c.value < 1e-6, "{c:?}");
        let s = sine_of_angle(&identity_space(2), &nil, 4).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_operator_is_rejected() {
        let z = CMatrix::zeros(2, 2);
        assert_eq!(cosine_of_angle(&identity_space(2), &z, 4), Err(Error::ZeroOperator));
    }

    #[test]
    fn uncertified_above_rank_limit() {
        let b = CMatrix::from_fn(5, 5, |i, j| C64::new((i + 2 * j) as f64 % 3.0 - 1.0, (i * j) as f64 % 2.0));
        let c = cosine_of_angle(&identity_space(5), &b, 4).unwrap();
        assert!(!c.certified && c.dense_samples == 0);
        assert!((0.0..=1.0).contains(&c.value));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let b = CMatrix::from_fn(3, 3, |i, j| C64::new(1.0 + i as f64 - j as f64, 0.3 * (i + j) as f64));
        let p = Problem::new(&b);
        let y = [C64::new(0.3, 0.1), C64::new(-0.5, 0.4), C64::new(0.2, -0.6)];
        let (_, grad) = p.value_grad(&y).unwrap();
        // Unnormalized objective, matching the gradient formula at ||y|| = 1.
        let f = |v: &[C64]| {
            let by = b.mul_vec(v);
            let a: f64 = by.iter().map(|z| z.norm_sqr()).sum();
            let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            dot(v, &by).norm_sqr() / (a * n2)
        };
        let mut yn = y.to_vec();
        normalize(&mut yn);
        let h = 1e-6;
        for i in 0..3 {
            let mut p1 = yn.clone();
            p1[i] += h;
            let mut m1 = yn.clone();
            m1[i] -= h;
            let dre = (f(&p1) - f(&m1)) / (2.0 * h);
            let mut p2 = yn.clone();
            p2[i] += C64::new(0.0, h);
            let mut m2 = yn.clone();
            m2[i] -= C64::new(0.0, h);
            let dim = (f(&p2) - f(&m2)) / (2.0 * h);
            // d/d(conj y) = (d/dre + i d/dim) / 2
            let (_, g) = p.value_grad(&yn).unwrap();
            let expect = C64::new(dre, dim) * 0.5;
            assert!((g[i] - expect).norm() < 1e-6, "{i}: {} vs {}", g[i], expect);
        }
        assert_eq!(grad.len(), 3);
    }
}
