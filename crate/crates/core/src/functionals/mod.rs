//! Scalar functionals of operators on a semi-Hilbert space.
//!
//! Every functional is evaluated on the compression `B` of the operator (see
//! [`SemiHilbertSpace::compress`]): `||T||_A = ||B||_2`, `w_A(T) = w(B)`,
//! `c_A(T) = c(B)` and `|cos|_A T = |cos| B`. The sampling oracles in
//! [`oracle`] evaluate the defining suprema directly on `H` instead and are
//! kept independent of the compression for that reason.

pub mod characterization;
pub mod cosine;
pub mod oracle;
pub mod scan;
pub mod shift;

use crate::error::Result;
use crate::linalg::{spectral_norm, CMatrix, C64};
use crate::space::SemiHilbertSpace;

pub use characterization::{alpha_beta_sup, theta_sup, CharacterizationConfig};
pub use cosine::{
    classical_cosine, cosine_of_angle, cosine_of_angle_with, sine_from_cosine, sine_of_angle, CosConfig, CosEstimate,
};
pub use oracle::{oracle_sample_cosine, oracle_sample_crawford, oracle_sample_norm, oracle_sample_radius};
pub use scan::{Enclosure, ScanConfig, SupportScan};
pub use shift::{
    classical_nearest_scalar, dist_to_scalars, gap_bound, min_enclosing_circle, nearest_scalar, GapBound, ScalarShift,
};

const ORIGIN: C64 = C64::new(0.0, 0.0);

/// `||T||_A`.
pub fn op_seminorm(sp: &SemiHilbertSpace, t: &CMatrix) -> Result<f64> {
    Ok(spectral_norm(&sp.compress(t)?.b))
}

/// Absolute enclosure tolerance for a compressed operator of norm `norm`.
pub(crate) fn abs_tol(cfg: &ScanConfig, norm: f64) -> f64 {
    cfg.refine_tol * norm.max(1.0)
}

/// Fresh scan of a compressed operator together with its spectral norm.
pub(crate) fn scan_of(b: &CMatrix, cfg: &ScanConfig) -> (SupportScan, f64) {
    let norm = spectral_norm(b);
    (SupportScan::new(b, cfg.grid_points, norm), norm)
}

/// Numerical radius of a matrix in the classical sense.
pub fn classical_radius(b: &CMatrix, cfg: &ScanConfig) -> Result<Enclosure> {
    cfg.validate()?;
    let (mut scan, norm) = scan_of(b, cfg);
    if norm == 0.0 {
        return Ok(Enclosure::exact(0.0));
    }
    Ok(scan.max_enclosure(ORIGIN, abs_tol(cfg, norm), cfg.max_refine_iters))
}

/// Crawford number of a matrix in the classical sense.
pub fn classical_crawford(b: &CMatrix, cfg: &ScanConfig) -> Result<Enclosure> {
    cfg.validate()?;
    let (mut scan, norm) = scan_of(b, cfg);
    if norm == 0.0 {
        return Ok(Enclosure::exact(0.0));
    }
    Ok(scan.crawford_enclosure(ORIGIN, abs_tol(cfg, norm), cfg.max_refine_iters))
}

/// A-numerical radius `w_A(T) = sup { |<Tx, x>_A| : ||x||_A = 1 }`, as the
/// maximum over `t` of `lambda_max((e^{it} B + e^{-it} B*) / 2)`.
pub fn numerical_radius(sp: &SemiHilbertSpace, t: &CMatrix, cfg: &ScanConfig) -> Result<Enclosure> {
    classical_radius(&sp.compress(t)?.b, cfg)
}

/// A-Crawford number `c_A(T) = inf { |<Tx, x>_A| : ||x||_A = 1 }`, the
/// distance from the origin to the (convex) numerical range of `B`.
pub fn crawford_number(sp: &SemiHilbertSpace, t: &CMatrix, cfg: &ScanConfig) -> Result<Enclosure> {
    classical_crawford(&sp.compress(t)?.b, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RankTolerance;

    fn identity_space(n: usize) -> SemiHilbertSpace {
        SemiHilbertSpace::with_default_tol(&CMatrix::identity(n)).unwrap()
    }

    fn weighted_space() -> (SemiHilbertSpace, CMatrix) {
        let a = CMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        (
            SemiHilbertSpace::new(&a, RankTolerance::for_shape(2, 2)).unwrap(),
            CMatrix::from_real_rows(&[[2.0, 2.0], [0.0, 0.0]]),
        )
    }

    #[test]
    fn seminorm_examples() {
        let (sp, t) = weighted_space();
        assert!((op_seminorm(&sp, &t).unwrap() - 2.0).abs() < 1e-14);
        let nil = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!((op_seminorm(&identity_space(2), &nil).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radius_examples() {
        let cfg = ScanConfig::default();
        let nil = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let w = numerical_radius(&identity_space(2), &nil, &cfg).unwrap();
        assert!((w.value() - 0.5).abs() < 1e-15 && w.contains(0.5, 1e-15) && w.width() <= 1e-7, "{w:?}");
        let normal = CMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let w = numerical_radius(&identity_space(2), &normal, &cfg).unwrap();
        assert!((w.mid() - 1.0).abs() < 1e-12);
        let (sp, t) = weighted_space();
        let w = numerical_radius(&sp, &t, &cfg).unwrap();
        assert!((w.mid() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn crawford_examples() {
        let cfg = ScanConfig::default();
        let nil = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        let c = crawford_number(&identity_space(2), &nil, &cfg).unwrap();
        assert_eq!(c.hi, 0.0);
        let (sp, t) = weighted_space();
        assert!((crawford_number(&sp, &t, &cfg).unwrap().mid() - 2.0).abs() < 1e-12);
        let c = crawford_number(&identity_space(2), &CMatrix::identity(2), &cfg).unwrap();
        assert!((c.mid() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_operator_functionals_vanish() {
        let cfg = ScanConfig::default();
        let sp = identity_space(3);
        let z = CMatrix::zeros(3, 3);
        assert_eq!(numerical_radius(&sp, &z, &cfg).unwrap().hi, 0.0);
        assert_eq!(crawford_number(&sp, &z, &cfg).unwrap().hi, 0.0);
        assert_eq!(op_seminorm(&sp, &z).unwrap(), 0.0);
    }

    #[test]
    fn scan_config_validation() {
        let bad = ScanConfig { grid_points: 8, ..ScanConfig::default() };
        assert!(bad.validate().is_err());
        let bad = ScanConfig { refine_tol: 0.0, ..ScanConfig::default() };
        assert!(bad.validate().is_err());
        let nil = CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(numerical_radius(&identity_space(2), &nil, &bad).is_err());
    }
}
