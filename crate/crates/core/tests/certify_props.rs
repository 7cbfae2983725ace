mod common;

use common::{generic, instance, shape};
use proptest::prelude::*;
use shnr_core::certify::*;
use shnr_core::ensembles::Family;
use shnr_core::functionals::ScanConfig;
use shnr_core::{CMatrix, SemiHilbertSpace, C64};

fn fast() -> CertifyConfig {
    CertifyConfig { scan: ScanConfig { grid_points: 64, ..ScanConfig::default() }, ..CertifyConfig::default() }
}

fn identity_space(n: usize) -> SemiHilbertSpace {
    SemiHilbertSpace::with_default_tol(&CMatrix::identity(n)).unwrap()
}

fn nil() -> CMatrix {
    CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]])
}

fn values(c: &Certificate) -> Vec<f64> {
    c.terms.iter().map(|t| t.value).collect()
}

/// Recomputes the verdict from slacks, scale and tolerance alone.
fn consistent(c: &Certificate) -> bool {
    let counted: Vec<&Chain> = c.chains.iter().filter(|ch| !ch.informational).collect();
    let all_ok = counted.iter().all(|ch| ch.slacks.iter().all(|&s| s >= -c.tol * c.scale));
    match c.verdict {
        Verdict::Pass => all_ok,
        Verdict::Fail => !all_ok,
        Verdict::Inconclusive => !all_ok || !c.hypothesis_met(),
    }
}

#[test]
fn power_bounds_examples() {
    let cfg = CertifyConfig::default();
    let c = evaluate_certificate(InequalityId::PwrBounds, &identity_space(2), &Operands::new(nil()), &cfg).unwrap();
    let v = values(&c);
    assert!((v[0] - 0.5).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12);
    assert!(c.slacks[0].abs() <= 1e-9);
    assert_eq!(c.verdict, Verdict::Pass);

    let normal = CMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
    let c = evaluate_certificate(InequalityId::PwrBounds, &identity_space(2), &Operands::new(normal), &cfg).unwrap();
    let v = values(&c);
    assert!((v[0] - 0.5).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12);
    assert!(c.slacks[1].abs() <= 1e-9);
}

#[test]
fn section2_on_the_weighted_example() {
    let a = CMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]);
    let sp = SemiHilbertSpace::with_default_tol(&a).unwrap();
    let t = CMatrix::from_real_rows(&[[2.0, 2.0], [0.0, 0.0]]);
    let rep = run_suite(Suite::Section2, &sp, &Operands::new(t.clone()), &CertifyConfig::default()).unwrap();
    assert_eq!(rep.certificates.len(), 11);
    assert!(rep.certificates.iter().all(|c| c.verdict == Verdict::Pass));
    let ids: Vec<InequalityId> = rep.certificates.iter().map(|c| c.id).collect();
    assert_eq!(ids, Suite::Section2.ids().collect::<Vec<_>>());
    let selfadj = &rep.certificates[1];
    assert_eq!(selfadj.id, InequalityId::SelfadjEq);
    assert!(values(selfadj).iter().all(|v| (v - 2.0).abs() < 1e-12));
}

#[test]
fn product_condition_with_identity_factor() {
    let inst = generic(4, 2, 11);
    let ops = Operands::new(inst.t).with_s(CMatrix::identity(4));
    let c = evaluate_certificate(InequalityId::ProdCond, &inst.space, &ops, &fast()).unwrap();
    assert_eq!(c.verdict, Verdict::Pass);
    assert!(c.hypothesis_met());
}

#[test]
fn errors() {
    let sp = SemiHilbertSpace::with_default_tol(&CMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
    let outside = nil();
    let err = evaluate_certificate(InequalityId::PwrBounds, &sp, &Operands::new(outside), &fast()).unwrap_err();
    assert!(matches!(err, shnr_core::Error::NoAdjoint { .. }));
    let err =
        evaluate_certificate(InequalityId::CommMain, &identity_space(2), &Operands::new(nil()), &fast()).unwrap_err();
    assert_eq!(err, shnr_core::Error::ArityMismatch { needed: 2, given: 1 });
    assert!("COMM-NOPE".parse::<InequalityId>().is_err());
}

#[test]
fn heuristic_failures_downgrade() {
    let weak = Term { label: "sin".into(), value: 0.1, certified: false };
    let one = Term { label: "half norm".into(), value: 1.0, certified: true };
    let top = Term { label: "w".into(), value: 1.2, certified: true };
    let chain = Chain::inequality("", vec![one.clone(), weak, top.clone()]);
    let c = Certificate::assemble(InequalityId::LowerSin, vec![chain], 1e-8, Vec::new());
    assert_eq!(c.verdict, Verdict::Inconclusive);
    let bad = Chain::inequality("", vec![top, one]);
    let c = Certificate::assemble(InequalityId::PwrBounds, vec![bad], 1e-8, Vec::new());
    assert_eq!(c.verdict, Verdict::Fail);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_suites_never_fail((n, r, seed) in shape(5)) {
        let inst = generic(n, r, seed);
        let ops = Operands::new(inst.t).with_s(inst.s).with_r(inst.r);
        let rep = run_suite(Suite::All, &inst.space, &ops, &fast()).unwrap();
        prop_assert_eq!(rep.certificates.len(), InequalityId::ALL.len());
        for c in &rep.certificates {
            prop_assert_ne!(c.verdict, Verdict::Fail, "{:?}", c);
            prop_assert!(consistent(c));
            if c.verdict == Verdict::Inconclusive {
                prop_assert!(!c.hypothesis_met() || c.id == InequalityId::LowerSin);
            }
        }
        let s = &rep.summary;
        prop_assert_eq!(s.pass + s.fail + s.inconclusive, rep.certificates.len());
    }

    #[test]
    fn tightness_witnesses(n in 2usize..6, seed: u64) {
        let cfg = fast();
        let nil = instance(n, n, seed, Family::NilpotentClassical);
        let c = evaluate_certificate(InequalityId::PwrBounds, &nil.space, &Operands::new(nil.t.clone()), &cfg).unwrap();
        // Only T^2 = 0 forces equality; in dimension 2 every strictly upper
        // triangular matrix qualifies.
        if n == 2 {
            prop_assert!(c.slacks[0].abs() <= 1e-9);
        }
        let normal = instance(n, n, seed, Family::NormalClassical);
        let c = evaluate_certificate(InequalityId::PwrBounds, &normal.space, &Operands::new(normal.t), &cfg).unwrap();
        prop_assert!(c.slacks[1].abs() <= 1e-9 * c.scale);
    }
}
