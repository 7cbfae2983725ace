//! Reproducible random instances: PSD weights of prescribed rank and
//! operators that admit an A-adjoint by construction.
//!
//! Every draw comes from ChaCha8 keyed by the ensemble seed, with the trial
//! index as the stream id, so a trial does not depend on which trials ran
//! before it or on which thread runs it.

// Redundant once std is in the build graph (test builds).
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, spectral_norm, CMatrix, RankTolerance, C64};
use crate::space::SemiHilbertSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Any operator in `B_A(H)`.
    Generic,
    /// `AT` Hermitian.
    ASelfadjoint,
    /// `AT` Hermitian PSD.
    APositive,
    /// `A = I`, strictly upper triangular `T`, so `T^n = 0`.
    NilpotentClassical,
    /// `A = I`, unitarily diagonalizable `T`.
    NormalClassical,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Generic, Family::ASelfadjoint, Family::APositive, Family::NilpotentClassical, Family::NormalClassical];

    pub fn name(self) -> &'static str {
        match self {
            Family::Generic => "generic",
            Family::ASelfadjoint => "a_selfadjoint",
            Family::APositive => "a_positive",
            Family::NilpotentClassical => "nilpotent_classical",
            Family::NormalClassical => "normal_classical",
        }
    }

    /// Classical families live on `A = I`.
    pub fn is_classical(self) -> bool {
        matches!(self, Family::NilpotentClassical | Family::NormalClassical)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or(Error::InvalidConfig("unknown family"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub dim: usize,
    /// Rank of `A`, between 1 and `dim`; must equal `dim` for classical families.
    pub rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub family: Family,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be at least 1"));
        }
        if self.rank == 0 || self.rank > self.dim {
            return Err(Error::InvalidConfig("rank must lie in 1..=dim"));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1"));
        }
        if self.family.is_classical() && self.rank != self.dim {
            return Err(Error::InvalidConfig("classical families need rank = dim (A = I)"));
        }
        Ok(())
    }
}

/// Which operand of a trial a draw belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    T = 1,
    S = 2,
    R = 3,
}

/// One random trial: the space and three operands of the ensemble's family.
#[derive(Clone, Debug)]
pub struct Instance {
    pub space: SemiHilbertSpace,
    pub t: CMatrix,
    pub s: CMatrix,
    pub r: CMatrix,
}

/// Word offset between the streams of different slots within one trial.
const SLOT_STRIDE: u128 = 1 << 40;

fn rng_for(seed: u64, trial: usize, slot: u128) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng.set_word_pos(slot * SLOT_STRIDE);
    rng
}

/// Standard complex Gaussian (`E|z|^2 = 1`).
fn cgauss(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| cgauss(rng) * scale)
}

/// The weight `A = G* D G / ||G* D G||` with `rank` positive entries in `D`
/// drawn from `[0.25, 1]`; the identity for classical families.
pub fn gen_weight(spec: &EnsembleSpec, trial: usize) -> Result<CMatrix> {
    spec.validate()?;
    let n = spec.dim;
    if spec.family.is_classical() {
        return Ok(CMatrix::identity(n));
    }
    let mut rng = rng_for(spec.seed, trial, 0);
    let g = gaussian_matrix(&mut rng, n, 1.0);
    let d: Vec<f64> = (0..n).map(|k| if k < spec.rank { rng.random_range(0.25..=1.0) } else { 0.0 }).collect();
    let a = &(&g.adjoint() * &CMatrix::from_real_diag(&d)) * &g;
    let a = a.hermitian_part();
    Ok(a.scale_real(1.0 / spectral_norm(&a)))
}

/// Space of trial `trial`, with the default rank cutoff.
pub fn gen_space(spec: &EnsembleSpec, trial: usize) -> Result<SemiHilbertSpace> {
    let a = gen_weight(spec, trial)?;
    SemiHilbertSpace::new(&a, RankTolerance::for_shape(spec.dim, spec.dim))
}

/// The `T` operand of trial `trial`.
pub fn gen_operator(spec: &EnsembleSpec, sp: &SemiHilbertSpace, trial: usize) -> Result<CMatrix> {
    gen_operator_slot(spec, sp, trial, Slot::T)
}

/// An operand of the ensemble's family in `B_A(H)`. Generic operators are
/// `T0 P + (I - P) T0 (I - P)`, for which `T* A = P T0* A` has range in
/// `R(A)`; `A`-selfadjoint ones are `A^+ (P H0 P)` with `H0` Hermitian.
pub fn gen_operator_slot(spec: &EnsembleSpec, sp: &SemiHilbertSpace, trial: usize, slot: Slot) -> Result<CMatrix> {
    spec.validate()?;
    let n = spec.dim;
    if sp.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: sp.dim() });
    }
    if spec.family.is_classical() && !sp.is_identity() {
        return Err(Error::FamilyNeedsIdentityA);
    }
    let mut rng = rng_for(spec.seed, trial, slot as u128);
    let scale = 1.0 / (n as f64).sqrt();
    let p = sp.projection();
    let t = match spec.family {
        Family::Generic => {
            let t0 = gaussian_matrix(&mut rng, n, scale);
            if sp.rank() == n {
                t0
            } else {
                let q = &CMatrix::identity(n) - p;
                &(&t0 * p) + &(&(&q * &t0) * &q)
            }
        }
        Family::ASelfadjoint => {
            let h0 = gaussian_matrix(&mut rng, n, scale).hermitian_part();
            sp.weight_pinv() * &(&(p * &h0) * p)
        }
        Family::APositive => {
            let g = gaussian_matrix(&mut rng, n, scale);
            let h0 = (&g * &g.adjoint()).hermitian_part();
            sp.weight_pinv() * &(&(p * &h0) * p)
        }
        Family::NilpotentClassical => {
            CMatrix::from_fn(n, n, |i, j| if j > i { cgauss(&mut rng) * scale } else { C64::new(0.0, 0.0) })
        }
        Family::NormalClassical => {
            let h = gaussian_matrix(&mut rng, n, 1.0).hermitian_part();
            let u = hermitian_eig(&h, f64::INFINITY)?.vectors;
            let lambda: Vec<C64> = (0..n).map(|_| cgauss(&mut rng)).collect();
            &(&u * &CMatrix::from_diag(&lambda)) * &u.adjoint()
        }
    };
    Ok(t)
}

/// Space and the three operands of trial `trial`.
pub fn gen_instance(spec: &EnsembleSpec, trial: usize) -> Result<Instance> {
    let space = gen_space(spec, trial)?;
    let t = gen_operator_slot(spec, &space, trial, Slot::T)?;
    let s = gen_operator_slot(spec, &space, trial, Slot::S)?;
    let r = gen_operator_slot(spec, &space, trial, Slot::R)?;
    Ok(Instance { space, t, s, r })
}
