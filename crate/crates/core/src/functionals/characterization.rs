//! Direct evaluation of the two seminorm characterizations of `w_A`:
//!
//! * `sup_t || (e^{it} T + (e^{it} T)^#) / 2 ||_A`
//! * `sup_{a^2 + b^2 = 1} || a (T + T^#) / 2 + b (T - T^#) / (2i) ||_A`
//!
//! These go through the A-adjoint and the operator seminorm (largest singular
//! value), not through the eigenvalue scan behind
//! [`numerical_radius`](super::numerical_radius), so they serve as an
//! independent route to the same number.

// Redundant once std is in the build graph (test builds).
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::linalg::{spectral_norm, CMatrix, TridiagonalWorkspace, C64};
use crate::space::SemiHilbertSpace;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacterizationConfig {
    /// Grid points on the half period `[0, pi)`.
    pub grid_points: usize,
    /// Golden-section refinement stops once the bracket is this narrow.
    pub bracket_tol: f64,
    /// Whether to refine grid maxima at all.
    pub refine: bool,
}

impl Default for CharacterizationConfig {
    fn default() -> Self {
        CharacterizationConfig { grid_points: 512, bracket_tol: 1e-10, refine: true }
    }
}

/// `sup_t || (e^{it} T + (e^{it} T)^#) / 2 ||_A`.
pub fn theta_sup(sp: &SemiHilbertSpace, t: &CMatrix, cfg: &CharacterizationConfig) -> Result<f64> {
    let sharp = sp.sharp(t)?;
    let bt = sp.compress_unchecked(t);
    let bs = sp.compress_unchecked(&sharp);
    // (e^{it} T)^# = e^{-it} T^#, and compression is linear.
    let mut ws = TridiagonalWorkspace::new();
    let f = |theta: f64| {
        let e = C64::from_polar(0.5, theta);
        hermitian_norm(&mut ws, &(&bt.scale(e) + &bs.scale(e.conj())))
    };
    Ok(periodic_max(f, cfg, spectral_norm(&bt)))
}

/// `sup_{a^2 + b^2 = 1} || a Re_A T + b Im_A T ||_A` with
/// `Re_A T = (T + T^#) / 2` and `Im_A T = (T - T^#) / (2i)`.
pub fn alpha_beta_sup(sp: &SemiHilbertSpace, t: &CMatrix, cfg: &CharacterizationConfig) -> Result<f64> {
    let (re, im) = real_imag_parts(sp, t)?;
    let b_re = sp.compress_unchecked(&re);
    let b_im = sp.compress_unchecked(&im);
    let lip = spectral_norm(&b_re) + spectral_norm(&b_im);
    let mut ws = TridiagonalWorkspace::new();
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        hermitian_norm(&mut ws, &(&b_re.scale_real(c) + &b_im.scale_real(s)))
    };
    Ok(periodic_max(f, cfg, lip))
}

/// Spectral norm of a matrix that is Hermitian up to rounding.
fn hermitian_norm(ws: &mut TridiagonalWorkspace, m: &CMatrix) -> f64 {
    ws.diagonalize(m.hermitian_part().as_slice(), m.rows());
    let (lo, hi) = ws.extreme_indices();
    ws.diag(hi).max(-ws.diag(lo))
}

/// `(Re_A T, Im_A T) = ((T + T^#) / 2, (T - T^#) / (2i))`.
pub fn real_imag_parts(sp: &SemiHilbertSpace, t: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let sharp = sp.sharp(t)?;
    let re = (t + &sharp).scale_real(0.5);
    let im = (t - &sharp).scale(C64::new(0.0, -0.5));
    Ok((re, im))
}

/// Maximum of a `pi`-periodic function with Lipschitz constant `lip`: grid,
/// then golden-section refinement around every grid-local maximum that can
/// still beat the incumbent.
fn periodic_max(mut f: impl FnMut(f64) -> f64, cfg: &CharacterizationConfig, lip: f64) -> f64 {
    let n = cfg.grid_points.max(4);
    let step = PI / n as f64;
    let vals: Vec<f64> = (0..n).map(|k| f(step * k as f64)).collect();
    let mut best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !cfg.refine {
        return best;
    }
    let cutoff = best - lip * step;
    let candidates: Vec<usize> = (0..n)
        .filter(|&k| {
            let prev = vals[(k + n - 1) % n];
            let next = vals[(k + 1) % n];
            vals[k] >= prev && vals[k] >= next && vals[k] >= cutoff
        })
        .collect();
    for k in candidates {
        let centre = step * k as f64;
        best = best.max(golden_max(&mut f, centre - step, centre + step, cfg.bracket_tol));
    }
    best
}

fn golden_max(f: &mut impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = fc.max(fd);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            best = best.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            best = best.max(fd);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_characterizations() {
        let sp = SemiHilbertSpace::with_default_tol(&CMatrix::identity(2)).unwrap();
        let nil = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let cfg = CharacterizationConfig::default();
        assert!((theta_sup(&sp, &nil, &cfg).unwrap() - 0.5).abs() < 1e-12);
        assert!((alpha_beta_sup(&sp, &nil, &cfg).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn golden_section_finds_interior_peak() {
        let v = golden_max(&mut |x: f64| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!(v > -1e-20);
    }

    #[test]
    fn real_imag_parts_are_a_selfadjoint() {
        let a = CMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 1.0]]);
        let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
        let t = CMatrix::from_fn(2, 2, |i, j| C64::new(i as f64 - 0.5 * j as f64, 1.0 + j as f64));
        let (re, im) = real_imag_parts(&sp, &t).unwrap();
        assert!(sp.is_a_selfadjoint(&re).unwrap());
        assert!(sp.is_a_selfadjoint(&im).unwrap());
        let back = &re + &im.scale(C64::new(0.0, 1.0));
        assert!((&back - &t).max_abs() < 1e-12);
    }
}
