//! Certified scans of the support function of a numerical range.
//!
//! For an `r x r` matrix `B` write `H(t) = (e^{it} B + e^{-it} B*) / 2`. The
//! top eigenvalue `h(t) = lambda_max(H(t))` is the support function of the
//! numerical range `W(B)` in direction `e^{-it}`, and the top eigenvector `x`
//! gives the boundary point `x* B x` where that support is attained. The
//! numerical radius is `max_t h(t)`; the Crawford number is
//! `max(0, -min_t h(t))`.
//!
//! Between two sampled directions the support function is bracketed from
//! above by the vertex of the two supporting lines and from below by the two
//! attained boundary points, so both brackets close quadratically in the cell
//! width. A Lipschitz bracket (slope at most `||B||`) is kept as a fallback.

// Redundant once std is in the build graph (test builds).
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, TridiagonalWorkspace, C64};

/// Refinement stops once the scan holds this many times the initial grid.
/// Only a support function that is flat at its extremum (a circular arc of
/// the boundary, as for a disk) exhausts it; the attained lower end `lo` is
/// then already exact.
const SAMPLE_BUDGET_FACTOR: usize = 16;

/// Parameters for the angle scan behind every numerical-radius type functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    pub grid_points: usize,
    /// Target enclosure width relative to `max(1, ||B||)`.
    pub refine_tol: f64,
    pub max_refine_iters: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { grid_points: 1024, refine_tol: 1e-12, max_refine_iters: 200 }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 16 {
            return Err(Error::InvalidConfig("grid_points must be at least 16"));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(Error::InvalidConfig("refine_tol must be positive"));
        }
        Ok(())
    }
}

/// Interval `[lo, hi]` certified to contain a scanned extremum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    pub lipschitz_bound: f64,
    /// Size of the initial uniform grid.
    pub grid_used: usize,
    /// Total number of sampled directions after refinement.
    pub samples_used: usize,
}

impl Enclosure {
    pub fn exact(value: f64) -> Self {
        Enclosure { lo: value, hi: value, lipschitz_bound: 0.0, grid_used: 0, samples_used: 0 }
    }

    /// Point estimate: the best sampled extremum, which is attained by a
    /// boundary point. It is exact whenever a sample hits the extremum, which
    /// covers flat extrema where `hi` converges slowly.
    pub fn value(&self) -> f64 {
        self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub angle: f64,
    pub support: f64,
    pub point: C64,
}

impl Sample {
    #[inline]
    fn shifted(&self, shift: C64) -> (f64, C64) {
        let (s, c) = self.angle.sin_cos();
        (self.support + shift.re * c - shift.im * s, self.point + shift)
    }
}

/// Support-function samples of one matrix, refined on demand. Samples
/// persist across queries, so repeated queries with different scalar shifts
/// share refinement work.
#[derive(Clone, Debug)]
pub struct SupportScan {
    re_part: CMatrix,
    im_part: CMatrix,
    lipschitz: f64,
    samples: Vec<Sample>,
    grid: usize,
    ws: TridiagonalWorkspace,
    h_buf: Vec<C64>,
    v_buf: Vec<C64>,
}

impl SupportScan {
    /// Samples `grid` equally spaced directions. `lipschitz` must bound
    /// `||B||_2`.
    pub fn new(b: &CMatrix, grid: usize, lipschitz: f64) -> Self {
        assert!(b.is_square());
        let re_part = b.hermitian_part();
        // (B - B*) / (2i)
        let im_part = CMatrix::from_fn(b.rows(), b.cols(), |i, j| (b[(i, j)] - b[(j, i)].conj()) * C64::new(0.0, -0.5));
        let mut scan = SupportScan {
            re_part,
            im_part,
            lipschitz,
            samples: Vec::with_capacity(grid + 64),
            grid,
            ws: TridiagonalWorkspace::new(),
            h_buf: Vec::new(),
            v_buf: Vec::new(),
        };
        let step = TAU / grid as f64;
        if grid.is_multiple_of(2) {
            let half = grid / 2;
            let mut upper = Vec::with_capacity(half);
            for k in 0..half {
                let (top, bottom) = scan.eval_pair(step * k as f64);
                scan.samples.push(top);
                upper.push(bottom);
            }
            for (k, mut s) in upper.into_iter().enumerate() {
                s.angle = step * (k + half) as f64;
                scan.samples.push(s);
            }
        } else {
            for k in 0..grid {
                let (top, _) = scan.eval_pair(step * k as f64);
                scan.samples.push(top);
            }
        }
        scan
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Top sample at `angle` and the bottom one, reported at `angle + pi`.
    fn eval_pair(&mut self, angle: f64) -> (Sample, Sample) {
        let n = self.re_part.rows();
        let (s, c) = angle.sin_cos();
        self.h_buf.clear();
        self.h_buf.extend(self.re_part.as_slice().iter().zip(self.im_part.as_slice()).map(|(x, y)| x * c - y * s));
        self.ws.diagonalize(&self.h_buf, n);
        let (lo, hi) = self.ws.extreme_indices();
        let top_val = self.ws.diag(hi);
        self.ws.vector_into(hi, &mut self.v_buf);
        let top_point = self.point_of(&self.v_buf);
        let bot_val = self.ws.diag(lo);
        self.ws.vector_into(lo, &mut self.v_buf);
        let bot_point = self.point_of(&self.v_buf);
        let mut back = angle + PI;
        if back >= TAU {
            back -= TAU;
        }
        (
            Sample { angle, support: top_val, point: top_point },
            Sample { angle: back, support: -bot_val, point: bot_point },
        )
    }

    /// `x* B x = x* X x + i x* Y x`.
    fn point_of(&self, x: &[C64]) -> C64 {
        C64::new(quad(&self.re_part, x), quad(&self.im_part, x))
    }

    /// Samples the given directions and merges them into the sorted sample list.
    fn insert_all(&mut self, angles: &[f64]) {
        for &a in angles {
            let (top, _) = self.eval_pair(wrap(a));
            self.samples.push(top);
        }
        self.samples.sort_by(|x, y| x.angle.total_cmp(&y.angle));
    }

    fn budget_left(&self) -> bool {
        self.samples.len() < self.grid.max(64) * SAMPLE_BUDGET_FACTOR
    }

    fn cell(&self, i: usize) -> (usize, f64) {
        let j = (i + 1) % self.samples.len();
        let mut width = self.samples[j].angle - self.samples[i].angle;
        if width <= 0.0 {
            width += TAU;
        }
        (j, width)
    }

    /// Enclosure of `max_t (h(t) + Re(e^{it} shift))`, i.e. of the numerical
    /// radius of `B + shift I`.
    pub fn max_enclosure(&mut self, shift: C64, tol: f64, max_iters: usize) -> Enclosure {
        let lip = self.lipschitz + shift.norm();
        let mut iter = 0;
        loop {
            let vals: Vec<(f64, C64)> = self.samples.iter().map(|s| s.shifted(shift)).collect();
            let lo = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
            let mut hi = lo;
            let mut active = Vec::new();
            for i in 0..self.samples.len() {
                let (j, width) = self.cell(i);
                let (ha, hb) = (vals[i].0, vals[j].0);
                let ub = vertex_upper(ha, hb, width).min(0.5 * (ha + hb + lip * width));
                hi = hi.max(ub);
                if ub > lo + tol {
                    active.push(self.samples[i].angle + 0.5 * width);
                }
            }
            if hi - lo <= tol || iter >= max_iters || active.is_empty() || !self.budget_left() {
                return self.enclosure(lo, hi, lip);
            }
            self.insert_all(&active);
            iter += 1;
        }
    }

    /// Enclosure of `max(0, -min_t (h(t) + Re(e^{it} shift)))`, the Crawford
    /// number of `B + shift I`.
    pub fn crawford_enclosure(&mut self, shift: C64, tol: f64, max_iters: usize) -> Enclosure {
        let lip = self.lipschitz + shift.norm();
        let mut iter = 0;
        loop {
            let vals: Vec<(f64, C64)> = self.samples.iter().map(|s| s.shifted(shift)).collect();
            let min_sample = vals.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
            let mut min_lower = min_sample;
            let mut cells = Vec::with_capacity(vals.len());
            for i in 0..self.samples.len() {
                let (j, width) = self.cell(i);
                let lb = inner_lower(self.samples[i].angle, vals[i].1, vals[j].1, width)
                    .max(0.5 * (vals[i].0 + vals[j].0 - lip * width));
                min_lower = min_lower.min(lb);
                cells.push((lb, self.samples[i].angle + 0.5 * width));
            }
            let c_lo = (-min_sample).max(0.0);
            let c_hi = (-min_lower).max(0.0);
            let threshold = min_sample.min(0.0) - tol;
            let active: Vec<f64> = cells.iter().filter(|c| c.0 < threshold).map(|c| c.1).collect();
            if c_hi - c_lo <= tol || iter >= max_iters || active.is_empty() || !self.budget_left() {
                return self.enclosure(c_lo, c_hi.max(c_lo), lip);
            }
            self.insert_all(&active);
            iter += 1;
        }
    }

    /// Boundary points of `W(B)` found so far, translated by `shift`.
    pub fn points(&self, shift: C64) -> impl Iterator<Item = C64> + '_ {
        self.samples.iter().map(move |s| s.point + shift)
    }

    /// `max(0, -min_k h(t_k) - Re(e^{it_k} shift))` over the current samples
    /// only: a cheap lower estimate of the Crawford number of `B + shift I`.
    pub fn sampled_crawford(&self, shift: C64) -> f64 {
        let m = self.samples.iter().map(|s| s.shifted(shift).0).fold(f64::INFINITY, f64::min);
        (-m).max(0.0)
    }

    fn enclosure(&self, lo: f64, hi: f64, lip: f64) -> Enclosure {
        Enclosure { lo, hi, lipschitz_bound: lip, grid_used: self.grid, samples_used: self.samples.len() }
    }
}

fn quad(m: &CMatrix, x: &[C64]) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for (i, row) in m.rows_iter().enumerate() {
        let mut r = C64::new(0.0, 0.0);
        for (a, b) in row.iter().zip(x) {
            r += a * b;
        }
        acc += x[i].conj() * r;
    }
    acc.re
}

fn wrap(a: f64) -> f64 {
    if a >= TAU {
        a - TAU
    } else {
        a
    }
}

/// Upper bound of the support function on a cell of the given angular width
/// whose endpoint supports are `ha`, `hb`: the numerical range lies in both
/// half-planes, so the support is at most that of their intersection, which
/// over the cell is attained at the vertex where the two lines meet.
fn vertex_upper(ha: f64, hb: f64, width: f64) -> f64 {
    if width >= PI {
        return f64::INFINITY;
    }
    let (s, c) = width.sin_cos();
    // Vertex u in the frame rotated so the cell starts at angle 0.
    let ur = ha;
    let ui = (ha * c - hb) / s;
    let peak = (-ui).atan2(ur);
    if (0.0..=width).contains(&peak) {
        ur.hypot(ui)
    } else {
        ha.max(hb)
    }
}

/// Lower bound of the support function over `[start, start + width]` given
/// two points `za`, `zb` of the numerical range: the support is at least
/// `max(Re(e^{it} za), Re(e^{it} zb))`, minimized exactly over the cell.
fn inner_lower(start: f64, za: C64, zb: C64, width: f64) -> f64 {
    let rot = C64::from_polar(1.0, start);
    let u = rot * za;
    let v = rot * zb;
    let psi = |phi: f64| {
        let (s, c) = phi.sin_cos();
        (u.re * c - u.im * s).max(v.re * c - v.im * s)
    };
    let mut best = psi(0.0).min(psi(width));
    let d = u - v;
    let cross = d.re.atan2(d.im);
    let trough_u = PI - u.im.atan2(u.re);
    let trough_v = PI - v.im.atan2(v.re);
    for cand in [cross, cross + PI, cross - PI, trough_u, trough_v] {
        let mut phi = cand % TAU;
        if phi < 0.0 {
            phi += TAU;
        }
        if phi <= width {
            best = best.min(psi(phi));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;

    fn scan(b: &CMatrix) -> SupportScan {
        SupportScan::new(b, 64, spectral_norm(b))
    }

    #[test]
    fn vertex_bound_is_exact_for_a_disk_edge() {
        // Support of the unit disk is 1 everywhere; vertex of two tangent lines
        // at angular distance w sits at distance 1/cos(w/2).
        let w = 0.1;
        let ub = vertex_upper(1.0, 1.0, w);
        assert!((ub - 1.0 / (0.5 * w).cos()).abs() < 1e-14);
    }

    #[test]
    fn inner_bound_for_two_disk_points() {
        // Points of the unit circle at the cell ends; the chord between them has
        // support cos(w/2) in the middle direction.
        let w = 0.2;
        let za = C64::new(1.0, 0.0);
        let zb = C64::from_polar(1.0, -w);
        let lb = inner_lower(0.0, za, zb, w);
        assert!((lb - (0.5 * w).cos()).abs() < 1e-14);
    }

    #[test]
    fn nilpotent_radius_and_crawford() {
        let b = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let mut s = scan(&b);
        let w = s.max_enclosure(C64::new(0.0, 0.0), 1e-13, 200);
        // Flat support function: every sample is exact, the upper end closes
        // slowly until the sample budget runs out.
        assert!((w.value() - 0.5).abs() < 1e-15 && w.hi >= 0.5);
        assert!(w.width() <= 1e-5);
        let c = s.crawford_enclosure(C64::new(0.0, 0.0), 1e-13, 200);
        assert_eq!((c.lo, c.hi), (0.0, 0.0));
        // Shift by 2: disk of radius 1/2 around 2.
        let w2 = s.max_enclosure(C64::new(2.0, 0.0), 1e-13, 200);
        assert!((w2.value() - 2.5).abs() < 1e-12);
        let c2 = s.crawford_enclosure(C64::new(2.0, 0.0), 1e-13, 200);
        assert!((c2.mid() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn normal_matrix_hits_corner() {
        let b = CMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let mut s = scan(&b);
        let w = s.max_enclosure(C64::new(0.0, 0.0), 1e-13, 200);
        assert!((w.mid() - 1.0).abs() < 1e-13);
        // Segment from 1 to i: distance from origin is 1/sqrt(2).
        let c = s.crawford_enclosure(C64::new(0.0, 0.0), 1e-13, 200);
        assert!((c.mid() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn initial_grid_respects_lipschitz_width() {
        let b = CMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64 * 0.1 - 0.3, (i as f64 - j as f64) * 0.2));
        let mut s = scan(&b);
        let e = s.max_enclosure(C64::new(0.0, 0.0), 1e-12, 0);
        assert!(e.width() <= e.lipschitz_bound * TAU / 64.0);
        let e = s.max_enclosure(C64::new(0.0, 0.0), 1e-12, 200);
        assert!(e.width() <= 1e-12 * spectral_norm(&b).max(1.0));
    }
}
