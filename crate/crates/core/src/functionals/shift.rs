//! Functionals that optimize over a scalar shift `T + zeta I`.
//!
//! Shifting by `zeta` translates the numerical range by `zeta` and the support
//! function by `Re(e^{it} zeta)`, so one [`SupportScan`] of `B` serves every
//! shift.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::scan::SupportScan;
use super::{abs_tol, scan_of, ScanConfig, ORIGIN};
use crate::error::Result;
use crate::linalg::{spectral_norm, CMatrix, C64};
use crate::space::SemiHilbertSpace;

const MEC_ROUNDS: usize = 40;

/// Minimizer of `zeta -> w_A(R + zeta I)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarShift {
    /// Attained estimate of `w_A(R + shift I)`; never above the estimate of
    /// `w_A(R)` at `shift = 0`.
    pub value: f64,
    pub shift: C64,
    /// Certified lower bound on `d_A(R)`.
    pub lower_bound: f64,
}

/// `d_A(R) = inf_zeta w_A(R + zeta I)`.
pub fn dist_to_scalars(sp: &SemiHilbertSpace, r: &CMatrix, cfg: &ScanConfig) -> Result<f64> {
    Ok(nearest_scalar(sp, r, cfg)?.value)
}

/// Solves `min_zeta w_A(R + zeta I)`.
///
/// `w(B + zeta I)` is the largest distance from `-zeta` to the numerical range
/// of `B`, so the minimum is the radius of the smallest disk enclosing
/// `W(B)`. The smallest disk around the sampled boundary points gives a lower
/// bound and a candidate centre; the certified radius scan at that centre
/// gives an upper bound and refines the boundary near the contact points. The
/// centre lies in `W(B)`, so it stays inside `|zeta| <= w_A(R)`.
pub fn nearest_scalar(sp: &SemiHilbertSpace, r: &CMatrix, cfg: &ScanConfig) -> Result<ScalarShift> {
    classical_nearest_scalar(&sp.compress(r)?.b, cfg)
}

/// [`nearest_scalar`] for a matrix in the classical sense.
pub fn classical_nearest_scalar(b: &CMatrix, cfg: &ScanConfig) -> Result<ScalarShift> {
    cfg.validate()?;
    let (mut scan, norm) = scan_of(b, cfg);
    Ok(nearest_scalar_scan(&mut scan, norm, cfg))
}

pub(crate) fn nearest_scalar_scan(scan: &mut SupportScan, norm: f64, cfg: &ScanConfig) -> ScalarShift {
    if norm == 0.0 {
        return ScalarShift { value: 0.0, shift: ORIGIN, lower_bound: 0.0 };
    }
    let tol = abs_tol(cfg, norm);
    let at_origin = scan.max_enclosure(ORIGIN, tol, cfg.max_refine_iters);
    let mut best = ScalarShift { value: at_origin.value(), shift: ORIGIN, lower_bound: 0.0 };
    let mut order_rng = ChaCha8Rng::seed_from_u64(0x6d65_635f_7365_6564);
    let mut best_hi = at_origin.hi;
    for _ in 0..MEC_ROUNDS {
        let mut pts: Vec<C64> = scan.points(ORIGIN).collect();
        pts.shuffle(&mut order_rng);
        let (centre, radius) = min_enclosing_circle(&pts);
        best.lower_bound = best.lower_bound.max(radius);
        let shift = -centre;
        let enc = scan.max_enclosure(shift, tol, cfg.max_refine_iters);
        if enc.value() < best.value {
            best.value = enc.value();
            best.shift = shift;
        }
        best_hi = best_hi.min(enc.hi);
        if best_hi - best.lower_bound <= 4.0 * tol || best.value - best.lower_bound <= 0.25 * tol {
            break;
        }
    }
    best.lower_bound = best.lower_bound.min(best.value);
    best
}

/// Smallest circle enclosing `pts` (incremental Welzl); `pts` should be in
/// random order for expected linear time.
pub fn min_enclosing_circle(pts: &[C64]) -> (C64, f64) {
    let Some(&first) = pts.first() else {
        return (ORIGIN, 0.0);
    };
    let scale = pts.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1e-300);
    let slack = 1e-14 * scale;
    let outside = |c: C64, r: f64, p: C64| (p - c).norm() > r + slack;
    let (mut c, mut r) = (first, 0.0);
    for i in 1..pts.len() {
        if !outside(c, r, pts[i]) {
            continue;
        }
        c = pts[i];
        r = 0.0;
        for j in 0..i {
            if !outside(c, r, pts[j]) {
                continue;
            }
            c = (pts[i] + pts[j]) * 0.5;
            r = (pts[i] - pts[j]).norm() * 0.5;
            for k in 0..j {
                if outside(c, r, pts[k]) {
                    (c, r) = circumcircle(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    (c, r)
}

fn circumcircle(a: C64, b: C64, c: C64) -> (C64, f64) {
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * (ab.re * ac.im - ab.im * ac.re);
    if d.abs() <= 1e-300 || !d.is_finite() {
        // Collinear: the widest pair decides.
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs.iter().copied().max_by(|x, y| (x.0 - x.1).norm().total_cmp(&(y.0 - y.1).norm())).unwrap();
        return ((p + q) * 0.5, (p - q).norm() * 0.5);
    }
    let ab2 = ab.norm_sqr();
    let ac2 = ac.norm_sqr();
    let ux = (ac.im * ab2 - ab.im * ac2) / d;
    let uy = (ab.re * ac2 - ac.re * ab2) / d;
    let centre = a + C64::new(ux, uy);
    let r = (centre - a).norm().max((centre - b).norm()).max((centre - c).norm());
    (centre, r)
}

/// Both sides of `||T||_A^2 - w_A(T)^2 <= inf_g { ||T + g I||_A^2 - c_A(T + g I)^2 }`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapBound {
    pub lhs: f64,
    /// Value at `shift`; the inequality holds at every shift, so any shift
    /// gives a valid right-hand side.
    pub rhs: f64,
    pub shift: C64,
}

/// Evaluates the seminorm/radius gap and minimizes its shifted upper bound
/// over `|g| <= 2 w_A(T) + 1` (polar grid, then compass search).
pub fn gap_bound(sp: &SemiHilbertSpace, t: &CMatrix, cfg: &ScanConfig) -> Result<GapBound> {
    cfg.validate()?;
    let b = sp.compress(t)?.b;
    let (mut scan, norm) = scan_of(&b, cfg);
    Ok(gap_bound_scan(&b, &mut scan, norm, cfg))
}

pub(crate) fn gap_bound_scan(b: &CMatrix, scan: &mut SupportScan, norm: f64, cfg: &ScanConfig) -> GapBound {
    if norm == 0.0 {
        return GapBound { lhs: 0.0, rhs: 0.0, shift: ORIGIN };
    }
    let tol = abs_tol(cfg, norm);
    let w = scan.max_enclosure(ORIGIN, tol, cfg.max_refine_iters).value();
    let lhs = norm * norm - w * w;
    let radius = 2.0 * w + 1.0;

    let objective = |scan: &SupportScan, g: C64| {
        let n = spectral_norm(&b.add_identity(g));
        let c = scan.sampled_crawford(g);
        n * n - c * c
    };
    let mut best_g = ORIGIN;
    let mut best = objective(scan, ORIGIN);
    for ring in 1..=4 {
        let rho = radius * ring as f64 / 4.0;
        for k in 0..16 {
            let g = C64::from_polar(rho, core::f64::consts::TAU * k as f64 / 16.0);
            let v = objective(scan, g);
            if v < best {
                best = v;
                best_g = g;
            }
        }
    }
    let mut step = radius / 8.0;
    let dirs = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
    let floor = 1e-9 * radius;
    let mut evals = 0;
    while step > floor && evals < 400 {
        let mut moved = false;
        for d in dirs {
            let g = best_g + d * step;
            if g.norm() > radius {
                continue;
            }
            evals += 1;
            let v = objective(scan, g);
            if v < best {
                best = v;
                best_g = g;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    let n = spectral_norm(&b.add_identity(best_g));
    // The attained end never exceeds the true Crawford number, so rhs stays
    // an upper bound on the infimum.
    let c = scan.crawford_enclosure(best_g, tol, cfg.max_refine_iters).value();
    GapBound { lhs, rhs: n * n - c * c, shift: best_g }
}
