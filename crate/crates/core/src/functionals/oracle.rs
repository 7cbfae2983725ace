//! Brute-force sampling of the defining suprema and infima.
//!
//! Vectors are drawn uniformly from the A-unit sphere of `R(A)` and every
//! quantity is evaluated on `H` from `A` and `T` directly (`<ATx, x>`,
//! `<ATx, Tx>`), never through the compressed matrix. A sampled supremum is
//! a lower bound on the true one and a sampled infimum an upper bound.

// Redundant once std is in the build graph (test builds).
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::space::SemiHilbertSpace;

struct Sampled {
    radius: f64,
    crawford: f64,
    norm: f64,
}

/// Sampled `sup |<Tx, x>_A|` over the A-unit sphere.
pub fn oracle_sample_radius(sp: &SemiHilbertSpace, t: &CMatrix, samples: usize, seed: u64) -> Result<f64> {
    Ok(sample(sp, t, samples, seed)?.radius)
}

/// Sampled `inf |<Tx, x>_A|` over the A-unit sphere.
pub fn oracle_sample_crawford(sp: &SemiHilbertSpace, t: &CMatrix, samples: usize, seed: u64) -> Result<f64> {
    Ok(sample(sp, t, samples, seed)?.crawford)
}

/// Sampled `sup ||Tx||_A` over the A-unit sphere.
pub fn oracle_sample_norm(sp: &SemiHilbertSpace, t: &CMatrix, samples: usize, seed: u64) -> Result<f64> {
    Ok(sample(sp, t, samples, seed)?.norm)
}

/// Sampled `inf |<Tx, x>_A| / (||Tx||_A ||x||_A)` over `x` with `Tx` outside `N(A)`.
pub fn oracle_sample_cosine(sp: &SemiHilbertSpace, t: &CMatrix, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidConfig("oracle needs at least one sample"));
    }
    if !sp.admits_adjoint(t)? {
        return Err(Error::NoAdjoint { residual: sp.membership_residual(t)? });
    }
    let at = sp.weight() * t;
    let tat = &t.adjoint() * &at;
    let scale = tat.max_abs();
    let mut best = 1.0f64;
    let mut y = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        fill_gaussian(&mut rng, &mut y, sp.rank());
        let x = sp.lift_vector(&y);
        let n2 = quad(sp.weight(), &x).re;
        let tn2 = quad(&tat, &x).re;
        if tn2 <= 1e-28 * scale.max(f64::MIN_POSITIVE) || n2 <= 0.0 {
            continue;
        }
        best = best.min(quad(&at, &x).norm() / (tn2 * n2).sqrt());
    }
    Ok(best.min(1.0))
}

fn sample(sp: &SemiHilbertSpace, t: &CMatrix, samples: usize, seed: u64) -> Result<Sampled> {
    if samples == 0 {
        return Err(Error::InvalidConfig("oracle needs at least one sample"));
    }
    if !sp.admits_adjoint(t)? {
        return Err(Error::NoAdjoint { residual: sp.membership_residual(t)? });
    }
    let at = sp.weight() * t;
    let tat = &t.adjoint() * &at;
    let mut out = Sampled { radius: 0.0, crawford: f64::INFINITY, norm: 0.0 };
    let mut y = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        fill_gaussian(&mut rng, &mut y, sp.rank());
        let x = sp.lift_vector(&y);
        // ||x||_A^2 is 1 up to rounding; divide anyway.
        let n2 = quad(sp.weight(), &x).re;
        if n2 <= 0.0 {
            continue;
        }
        let v = quad(&at, &x).norm() / n2;
        out.radius = out.radius.max(v);
        out.crawford = out.crawford.min(v);
        out.norm = out.norm.max((quad(&tat, &x).re.max(0.0) / n2).sqrt());
    }
    Ok(out)
}

fn fill_gaussian(rng: &mut ChaCha8Rng, y: &mut Vec<C64>, r: usize) {
    y.clear();
    let mut n2 = 0.0;
    for _ in 0..r {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        n2 += re * re + im * im;
        y.push(C64::new(re, im));
    }
    let n = n2.sqrt();
    for z in y.iter_mut() {
        *z /= n;
    }
}

/// `x* M x`.
fn quad(m: &CMatrix, x: &[C64]) -> C64 {
    m.mul_vec(x).iter().zip(x).map(|(u, v)| v.conj() * u).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_radius_concentrates() {
        let sp = SemiHilbertSpace::with_default_tol(&CMatrix::identity(2)).unwrap();
        let nil = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let w = oracle_sample_radius(&sp, &nil, 100_000, 1).unwrap();
        assert!((0.499..=0.5 + 1e-15).contains(&w), "{w}");
        let c = oracle_sample_crawford(&sp, &nil, 100_000, 1).unwrap();
        assert!((0.0..1e-2).contains(&c));
    }

    #[test]
    fn weighted_example_norm() {
        let a = CMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
        let t = CMatrix::from_real_rows(&[[2.0, 2.0], [0.0, 0.0]]);
        let n = oracle_sample_norm(&sp, &t, 1000, 3).unwrap();
        assert!((1.99..=2.0 + 1e-12).contains(&n), "{n}");
    }

    #[test]
    fn deterministic_and_validated() {
        let sp = SemiHilbertSpace::with_default_tol(&CMatrix::identity(3)).unwrap();
        let t = CMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64));
        assert_eq!(oracle_sample_radius(&sp, &t, 500, 9), oracle_sample_radius(&sp, &t, 500, 9));
        assert!(oracle_sample_radius(&sp, &t, 0, 9).is_err());
    }
}
