//! Inequality chains between the functionals, evaluated on concrete
//! operators.
//!
//! Each registry entry is a chain `t_0 <= t_1 <= ...` (or an equality). A
//! [`Certificate`] carries the term values, the consecutive slacks and a
//! verdict. Operator algebra runs on compressions: for `T, S` in `B_A(H)`,
//! compressing is multiplicative and sends `T#` to `B_T*`, so products,
//! sums and adjoints of operands never leave `C^{r x r}`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use core::fmt;
use core::str::FromStr;

// Redundant once std is in the build graph (test builds).
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::functionals::cosine::{classical_cosine, sine_from_cosine};
use crate::functionals::scan::SupportScan;
use crate::functionals::shift::{gap_bound_scan, nearest_scalar_scan};
use crate::functionals::{
    abs_tol, alpha_beta_sup, scan_of, theta_sup, CharacterizationConfig, CosConfig, CosEstimate, Enclosure, GapBound,
    ScalarShift, ScanConfig,
};
use crate::linalg::{spectral_norm, CMatrix, C64};
use crate::space::SemiHilbertSpace;

/// Absolute allowance per unit of `max(1, ||T||_A)` for the grid-based
/// characterization suprema.
pub const CHARACTERIZATION_ALLOWANCE: f64 = 1e-9;

const ORIGIN: C64 = C64::new(0.0, 0.0);

/// Operands an entry needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    T,
    TS,
    TSR,
}

impl Arity {
    pub fn count(self) -> usize {
        match self {
            Arity::T => 1,
            Arity::TS => 2,
            Arity::TSR => 3,
        }
    }
}

macro_rules! registry {
    ($($variant:ident => $key:literal, $arity:ident, $section:literal;)*) => {
        /// Closed registry of inequality chains.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum InequalityId {
            $($variant,)*
        }

        impl InequalityId {
            /// Registry order.
            pub const ALL: &'static [InequalityId] = &[$(InequalityId::$variant,)*];

            pub fn key(self) -> &'static str {
                match self {
                    $(InequalityId::$variant => $key,)*
                }
            }

            pub fn arity(self) -> Arity {
                match self {
                    $(InequalityId::$variant => Arity::$arity,)*
                }
            }

            /// Group the entry belongs to (2: single operator, 3: products,
            /// 4: commutators and anticommutators).
            pub fn section(self) -> u8 {
                match self {
                    $(InequalityId::$variant => $section,)*
                }
            }
        }
    };
}

registry! {
    PwrBounds => "PWR-BOUNDS", T, 2;
    SelfadjEq => "SELFADJ-EQ", T, 2;
    RemarkGap => "REMARK-GAP", T, 2;
    CharTheta => "CHAR-THETA", T, 2;
    CharAb => "CHAR-AB", T, 2;
    ReImLower => "RE-IM-LOWER", T, 2;
    UpperAnti => "UPPER-ANTI", T, 2;
    UpperSq => "UPPER-SQ", T, 2;
    LowerSq => "LOWER-SQ", T, 2;
    LowerCrawford => "LOWER-CRAWFORD", T, 2;
    LowerSin => "LOWER-SIN", T, 2;
    ProdChain => "PROD-CHAIN", TS, 3;
    ProdSharpLemma => "PROD-SHARP-LEMMA", TS, 3;
    ProdT28 => "PROD-T28", TS, 3;
    ProdCond => "PROD-COND", TS, 3;
    ProdDist => "PROD-DIST", TS, 3;
    ProdDist2 => "PROD-DIST2", TS, 3;
    AntiDist => "ANTI-DIST", T, 4;
    CommMain => "COMM-MAIN", TS, 4;
    CommCor => "COMM-COR", TS, 4;
    Sandwich => "SANDWICH", TSR, 4;
    AnticommSharp => "ANTICOMM-SHARP", TS, 4;
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL.iter().copied().find(|id| id.key() == s).ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// Subsets of the registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Section2,
    Section3,
    Section4,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Section2 => "section2",
            Suite::Section3 => "section3",
            Suite::Section4 => "section4",
        }
    }

    pub fn ids(self) -> impl Iterator<Item = InequalityId> {
        let section = match self {
            Suite::All => None,
            Suite::Section2 => Some(2),
            Suite::Section3 => Some(3),
            Suite::Section4 => Some(4),
        };
        InequalityId::ALL.iter().copied().filter(move |id| section.is_none_or(|s| id.section() == s))
    }

    /// Largest operand count among the suite's entries.
    pub fn arity(self) -> usize {
        self.ids().map(|id| id.arity().count()).max().unwrap_or(1).min(2)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All, Suite::Section2, Suite::Section3, Suite::Section4]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or(Error::InvalidConfig("unknown suite"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub label: String,
    pub value: f64,
    /// `false` for heuristic values (multi-start cosine, unconverged
    /// distance to scalars).
    pub certified: bool,
}

impl Term {
    fn new(label: impl Into<String>, value: f64) -> Self {
        Term { label: label.into(), value, certified: true }
    }

    fn heuristic(label: impl Into<String>, value: f64, certified: bool) -> Self {
        Term { label: label.into(), value, certified }
    }
}

/// One evaluated chain.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    /// Empty for single chains; the sign or item otherwise.
    pub label: String,
    pub terms: Vec<Term>,
    /// `terms[k+1] - terms[k]` for inequalities; `allowance - |t0 - t1|` for
    /// equalities.
    pub slacks: Vec<f64>,
    /// Absolute allowance of an equality row, `None` for inequalities.
    pub equality_allowance: Option<f64>,
    /// Reported but not part of the verdict.
    pub informational: bool,
}

impl Chain {
    pub fn inequality(label: impl Into<String>, terms: Vec<Term>) -> Self {
        let slacks = terms.windows(2).map(|w| w[1].value - w[0].value).collect();
        Chain { label: label.into(), terms, slacks, equality_allowance: None, informational: false }
    }

    pub fn equality(label: impl Into<String>, lhs: Term, rhs: Term, allowance: f64) -> Self {
        let slack = allowance - (lhs.value - rhs.value).abs();
        Chain {
            label: label.into(),
            terms: vec![lhs, rhs],
            slacks: vec![slack],
            equality_allowance: Some(allowance),
            informational: false,
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Whether slack `k` rests on an uncertified term.
    fn slack_is_heuristic(&self, k: usize) -> bool {
        !self.terms[k].certified || !self.terms[k + 1].certified
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub id: InequalityId,
    /// Terms and slacks of the deciding chain: the one with the smallest
    /// slack among those counted in the verdict.
    pub terms: Vec<Term>,
    pub slacks: Vec<f64>,
    /// Every evaluated chain (both signs, both items, informational variants).
    pub chains: Vec<Chain>,
    pub verdict: Verdict,
    pub tol: f64,
    /// `max(1, largest |term|)` over the counted chains.
    pub scale: f64,
    pub notes: Vec<String>,
}

impl Certificate {
    /// Applies the verdict policy: PASS iff every counted slack is at least
    /// `-tol * scale`; a failure that only touches heuristic terms is
    /// INCONCLUSIVE.
    pub fn assemble(id: InequalityId, chains: Vec<Chain>, tol: f64, mut notes: Vec<String>) -> Self {
        let counted = || chains.iter().filter(|c| !c.informational);
        let scale = counted().flat_map(|c| c.terms.iter()).map(|t| t.value.abs()).fold(1.0, f64::max);
        let threshold = -tol * scale;
        let mut failing = 0;
        let mut heuristic_only = true;
        for c in counted() {
            for (k, &s) in c.slacks.iter().enumerate() {
                if s.is_nan() || s < threshold {
                    failing += 1;
                    heuristic_only &= c.slack_is_heuristic(k);
                }
            }
        }
        let verdict = if failing == 0 {
            Verdict::Pass
        } else if heuristic_only {
            notes.push("failing slack rests on a heuristic term".to_string());
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
        let deciding = counted().min_by(|a, b| a.min_slack().total_cmp(&b.min_slack()));
        let (terms, slacks) = deciding.map(|c| (c.terms.clone(), c.slacks.clone())).unwrap_or_default();
        Certificate { id, terms, slacks, chains, verdict, tol, scale, notes }
    }

    /// A certificate whose hypothesis does not hold: INCONCLUSIVE, with the
    /// chains kept for reference.
    fn hypothesis_not_met(id: InequalityId, chains: Vec<Chain>, tol: f64, mut notes: Vec<String>) -> Self {
        let chains: Vec<Chain> = chains.into_iter().map(Chain::informational).collect();
        notes.insert(0, "hypothesis not met".to_string());
        let (terms, slacks) = chains.first().map(|c| (c.terms.clone(), c.slacks.clone())).unwrap_or_default();
        let scale = chains.iter().flat_map(|c| c.terms.iter()).map(|t| t.value.abs()).fold(1.0, f64::max);
        Certificate { id, terms, slacks, chains, verdict: Verdict::Inconclusive, tol, scale, notes }
    }

    pub fn min_slack(&self) -> f64 {
        self.slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn hypothesis_met(&self) -> bool {
        !self.notes.iter().any(|n| n == "hypothesis not met")
    }
}

/// Operands of a run. `R` defaults to `T` where an entry needs it.
#[derive(Clone, Debug, PartialEq)]
pub struct Operands {
    pub t: CMatrix,
    pub s: Option<CMatrix>,
    pub r: Option<CMatrix>,
}

impl Operands {
    pub fn new(t: CMatrix) -> Self {
        Operands { t, s: None, r: None }
    }

    pub fn with_s(mut self, s: CMatrix) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_r(mut self, r: CMatrix) -> Self {
        self.r = Some(r);
        self
    }

    fn given(&self) -> usize {
        1 + self.s.is_some() as usize + self.r.is_some() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyConfig {
    /// Relative verdict tolerance.
    pub tol: f64,
    pub scan: ScanConfig,
    pub cos: CosConfig,
    pub characterization: CharacterizationConfig,
    /// Relative Frobenius tolerance of the `(TS)# = T# S` hypothesis.
    pub hypothesis_tol: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            tol: 1e-8,
            scan: ScanConfig::default(),
            cos: CosConfig::default(),
            characterization: CharacterizationConfig::default(),
            hypothesis_tol: 1e-8,
        }
    }
}

impl CertifyConfig {
    pub fn validate(&self) -> Result<()> {
        if [self.tol, self.hypothesis_tol].iter().any(|t| t.is_nan() || *t < 0.0) {
            return Err(Error::InvalidConfig("tolerances must be nonnegative"));
        }
        self.scan.validate()?;
        self.cos.validate()
    }
}

/// Certificates of one run in registry order, with totals.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub certificates: Vec<Certificate>,
    pub summary: Summary,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    /// Smallest deciding slack per entry, registry order.
    pub min_slack: Vec<(InequalityId, f64)>,
}

impl Summary {
    pub fn of(certs: &[Certificate]) -> Self {
        let mut s = Summary::default();
        for c in certs {
            match c.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Inconclusive => s.inconclusive += 1,
            }
            match s.min_slack.iter_mut().find(|(id, _)| *id == c.id) {
                Some(entry) => entry.1 = entry.1.min(c.min_slack()),
                None => s.min_slack.push((c.id, c.min_slack())),
            }
        }
        s.min_slack.sort_by_key(|e| e.0);
        s
    }
}

/// Evaluates one registry entry.
pub fn evaluate_certificate(
    id: InequalityId,
    sp: &SemiHilbertSpace,
    operands: &Operands,
    cfg: &CertifyConfig,
) -> Result<Certificate> {
    check_arity(id.arity().count().min(2), operands)?;
    let mut ctx = Context::new(sp, operands, cfg)?;
    ctx.evaluate(id)
}

/// Evaluates every entry of `suite` in registry order, sharing functional
/// values between entries.
pub fn run_suite(suite: Suite, sp: &SemiHilbertSpace, operands: &Operands, cfg: &CertifyConfig) -> Result<SuiteReport> {
    check_arity(suite.arity(), operands)?;
    let mut ctx = Context::new(sp, operands, cfg)?;
    let certificates = suite.ids().map(|id| ctx.evaluate(id)).collect::<Result<Vec<_>>>()?;
    let summary = Summary::of(&certificates);
    Ok(SuiteReport { certificates, summary })
}

/// `R` is optional everywhere, so only `S` is ever missing.
fn check_arity(needed: usize, operands: &Operands) -> Result<()> {
    if needed >= 2 && operands.s.is_none() {
        return Err(Error::ArityMismatch { needed, given: operands.given() });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Which {
    T,
    S,
    R,
}

/// Lazily computed functionals of one operand.
struct Stats {
    b: CMatrix,
    norm: f64,
    scan: Option<SupportScan>,
    w: Option<Enclosure>,
    c: Option<Enclosure>,
    d: Option<ScalarShift>,
}

impl Stats {
    fn new(b: CMatrix) -> Self {
        let norm = spectral_norm(&b);
        Stats { b, norm, scan: None, w: None, c: None, d: None }
    }

    fn scan(&mut self, cfg: &ScanConfig) -> &mut SupportScan {
        let (b, norm) = (&self.b, self.norm);
        self.scan.get_or_insert_with(|| SupportScan::new(b, cfg.grid_points, norm))
    }
}

struct Context<'a> {
    sp: &'a SemiHilbertSpace,
    h_t: &'a CMatrix,
    h_s: Option<&'a CMatrix>,
    cfg: &'a CertifyConfig,
    t: Stats,
    s: Option<Stats>,
    r: Option<Stats>,
    cos_t: Option<Result<CosEstimate>>,
}

impl<'a> Context<'a> {
    fn new(sp: &'a SemiHilbertSpace, ops: &'a Operands, cfg: &'a CertifyConfig) -> Result<Self> {
        cfg.validate()?;
        let t = Stats::new(sp.compress(&ops.t)?.b);
        let s = ops.s.as_ref().map(|s| sp.compress(s)).transpose()?.map(|c| Stats::new(c.b));
        let r = ops.r.as_ref().map(|r| sp.compress(r)).transpose()?.map(|c| Stats::new(c.b));
        Ok(Context { sp, h_t: &ops.t, h_s: ops.s.as_ref(), cfg, t, s, r, cos_t: None })
    }

    fn stats(&mut self, which: Which) -> &mut Stats {
        match which {
            Which::T => &mut self.t,
            Which::S => self.s.as_mut().expect("arity checked"),
            Which::R => match self.r {
                Some(ref mut r) => r,
                None => &mut self.t,
            },
        }
    }

    fn b(&mut self, which: Which) -> CMatrix {
        self.stats(which).b.clone()
    }

    fn norm(&mut self, which: Which) -> f64 {
        self.stats(which).norm
    }

    fn w(&mut self, which: Which) -> Enclosure {
        let cfg = self.cfg.scan;
        let st = self.stats(which);
        if st.w.is_none() {
            st.w = Some(if st.norm == 0.0 {
                Enclosure::exact(0.0)
            } else {
                let tol = abs_tol(&cfg, st.norm);
                st.scan(&cfg).max_enclosure(ORIGIN, tol, cfg.max_refine_iters)
            });
        }
        st.w.unwrap()
    }

    fn c(&mut self, which: Which) -> Enclosure {
        let cfg = self.cfg.scan;
        let st = self.stats(which);
        if st.c.is_none() {
            st.c = Some(if st.norm == 0.0 {
                Enclosure::exact(0.0)
            } else {
                let tol = abs_tol(&cfg, st.norm);
                st.scan(&cfg).crawford_enclosure(ORIGIN, tol, cfg.max_refine_iters)
            });
        }
        st.c.unwrap()
    }

    fn d(&mut self, which: Which) -> ScalarShift {
        let cfg = self.cfg.scan;
        let st = self.stats(which);
        if st.d.is_none() {
            let norm = st.norm;
            st.d = Some(nearest_scalar_scan(st.scan(&cfg), norm, &cfg));
        }
        st.d.unwrap()
    }

    fn gap(&mut self) -> GapBound {
        let cfg = self.cfg.scan;
        let st = &mut self.t;
        let (b, norm) = (st.b.clone(), st.norm);
        gap_bound_scan(&b, st.scan(&cfg), norm, &cfg)
    }

    fn cos_t(&mut self) -> Result<CosEstimate> {
        if self.cos_t.is_none() {
            self.cos_t = Some(classical_cosine(&self.t.b, &self.cfg.cos));
        }
        self.cos_t.clone().unwrap()
    }

    /// Numerical radius of an arbitrary compressed matrix.
    fn radius(&self, m: &CMatrix) -> Enclosure {
        let (mut scan, norm) = scan_of(m, &self.cfg.scan);
        if norm == 0.0 {
            return Enclosure::exact(0.0);
        }
        scan.max_enclosure(ORIGIN, abs_tol(&self.cfg.scan, norm), self.cfg.scan.max_refine_iters)
    }

    fn crawford(&self, m: &CMatrix) -> Enclosure {
        let (mut scan, norm) = scan_of(m, &self.cfg.scan);
        if norm == 0.0 {
            return Enclosure::exact(0.0);
        }
        scan.crawford_enclosure(ORIGIN, abs_tol(&self.cfg.scan, norm), self.cfg.scan.max_refine_iters)
    }

    /// `d_A` as a term; certified once the enclosing-circle lower bound
    /// meets the attained value.
    fn d_term(&mut self, which: Which) -> (f64, bool) {
        let d = self.d(which);
        let certified = d.value - d.lower_bound <= self.cfg.tol * d.value.max(1.0);
        (d.value, certified)
    }

    fn evaluate(&mut self, id: InequalityId) -> Result<Certificate> {
        use InequalityId::*;
        let tol = self.cfg.tol;
        let mut notes = Vec::new();
        let chains = match id {
            PwrBounds => {
                let n = self.norm(Which::T);
                let w = self.w(Which::T).value();
                vec![Chain::inequality(
                    "",
                    vec![Term::new("||T||_A/2", 0.5 * n), Term::new("w_A(T)", w), Term::new("||T||_A", n)],
                )]
            }
            SelfadjEq => {
                let bt = self.b(Which::T);
                let m = if self.sp.is_a_selfadjoint(self.h_t)? {
                    bt
                } else {
                    notes.push("T is not A-selfadjoint; applied to (T + T#)/2".to_string());
                    bt.hermitian_part()
                };
                let w = self.radius(&m);
                let n = spectral_norm(&m);
                vec![Chain::equality("", Term::new("w_A(M)", w.value()), Term::new("||M||_A", n), w.width())]
            }
            RemarkGap => {
                let g = self.gap();
                notes.push(format!("infimum evaluated at gamma = {}{:+}i", g.shift.re, g.shift.im));
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("0", 0.0),
                        Term::new("||T||_A^2 - w_A(T)^2", g.lhs),
                        Term::new("||T+gI||_A^2 - c_A(T+gI)^2", g.rhs),
                    ],
                )]
            }
            CharTheta | CharAb => {
                let w = self.w(Which::T);
                let n = self.norm(Which::T);
                let (label, sup) = if id == CharTheta {
                    ("sup_t ||Re_A(e^{it} T)||_A", theta_sup(self.sp, self.h_t, &self.cfg.characterization)?)
                } else {
                    (
                        "sup_{a^2+b^2=1} ||a Re_A T + b Im_A T||_A",
                        alpha_beta_sup(self.sp, self.h_t, &self.cfg.characterization)?,
                    )
                };
                let allowance = w.width() + CHARACTERIZATION_ALLOWANCE * n.max(1.0);
                vec![Chain::equality("", Term::new("w_A(T)", w.value()), Term::new(label, sup), allowance)]
            }
            ReImLower => {
                let bt = self.b(Which::T);
                let re = bt.hermitian_part();
                let im = CMatrix::from_fn(bt.rows(), bt.cols(), |i, j| {
                    (bt[(i, j)] - bt[(j, i)].conj()) * C64::new(0.0, -0.5)
                });
                let m = spectral_norm(&re).max(spectral_norm(&im));
                let w = self.w(Which::T).value();
                vec![Chain::inequality(
                    "",
                    vec![Term::new("max(||Re_A T||_A, ||Im_A T||_A)", m), Term::new("w_A(T)", w)],
                )]
            }
            UpperAnti => {
                let w = self.w(Which::T).value();
                let n = self.norm(Which::T);
                let anti = self.anti_norm(Which::T);
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("w_A(T)", w),
                        Term::new("sqrt(||TT# + T#T||_A)/sqrt2", FRAC_1_SQRT_2 * anti.sqrt()),
                        Term::new("||T||_A", n),
                    ],
                )]
            }
            UpperSq => {
                let w = self.w(Which::T).value();
                let n = self.norm(Which::T);
                let anti = self.anti_norm(Which::T);
                let bt = self.b(Which::T);
                let w2 = self.radius(&(&bt * &bt)).value();
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("w_A(T)", w),
                        Term::new("sqrt(||TT# + T#T||_A + 2w_A(T^2))/2", 0.5 * (anti + 2.0 * w2).sqrt()),
                        Term::new("||T||_A", n),
                    ],
                )]
            }
            LowerSq => {
                let w = self.w(Which::T).value();
                let n = self.norm(Which::T);
                let anti = self.anti_norm(Which::T);
                let bt = self.b(Which::T);
                let c2 = self.crawford(&(&bt * &bt)).value();
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("||T||_A/2", 0.5 * n),
                        Term::new("sqrt(||TT# + T#T||_A + 2c_A(T^2))/2", 0.5 * (anti + 2.0 * c2).sqrt()),
                        Term::new("w_A(T)", w),
                    ],
                )]
            }
            LowerCrawford => {
                let w = self.w(Which::T).value();
                let n = self.norm(Which::T);
                let c = self.c(Which::T).value().min(w);
                let mid = (0.5 * w * w + 0.5 * w * (w * w - c * c).max(0.0).sqrt()).sqrt();
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("||T||_A/2", 0.5 * n),
                        Term::new("sqrt(w^2/2 + (w/2) sqrt(w^2 - c^2))", mid),
                        Term::new("w_A(T)", w),
                    ],
                )]
            }
            LowerSin => {
                let w = self.w(Which::T).value();
                let n = self.norm(Which::T);
                let (factor, certified) = match self.cos_t() {
                    Ok(c) => {
                        let sin = sine_from_cosine(c.value);
                        if !c.certified {
                            notes.push(format!("uses heuristic cos_A ({} starts)", c.starts_used));
                        }
                        (sin.max(FRAC_1_SQRT_2), c.certified)
                    }
                    Err(Error::ZeroOperator) => {
                        notes.push("T compresses to zero; |sin|_A T undefined".to_string());
                        (FRAC_1_SQRT_2, true)
                    }
                    Err(e) => return Err(e),
                };
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("||T||_A/2", 0.5 * n),
                        Term::heuristic("max(|sin|_A T, 1/sqrt2) w_A(T)", factor * w, certified),
                        Term::new("w_A(T)", w),
                    ],
                )]
            }
            ProdChain => {
                let (bt, bs) = (self.b(Which::T), self.b(Which::S));
                let ts = &bt * &bs;
                let (nt, wt, ws) = (self.norm(Which::T), self.w(Which::T).value(), self.w(Which::S).value());
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("w_A(TS)", self.radius(&ts).value()),
                        Term::new("||TS||_A", spectral_norm(&ts)),
                        Term::new("2||T||_A w_A(S)", 2.0 * nt * ws),
                        Term::new("4w_A(T)w_A(S)", 4.0 * wt * ws),
                    ],
                )]
            }
            ProdSharpLemma | ProdT28 => {
                let (bt, bs) = (self.b(Which::T), self.b(Which::S));
                let ts = &bt * &bs;
                // (TS)# and T#S in compressed form.
                let ts_sharp = ts.adjoint();
                let t_sharp_s = &bt.adjoint() * &bs;
                let (wt, ns) = (self.w(Which::T).value(), self.norm(Which::S));
                let w_ts = self.radius(&ts).value();
                let mut chains = Vec::new();
                for (label, sign) in [("+", 1.0), ("-", -1.0)] {
                    let m = &ts_sharp + &t_sharp_s.scale_real(sign);
                    let wm = self.radius(&m).value();
                    let terms = if id == ProdSharpLemma {
                        vec![
                            Term::new(format!("w_A((TS)# {label} T#S)"), wm),
                            Term::new("2w_A(T)||S||_A", 2.0 * wt * ns),
                        ]
                    } else {
                        vec![
                            Term::new("w_A(TS)", w_ts),
                            Term::new(format!("w_A(T)||S||_A + w_A((TS)# {label} T#S)/2"), wt * ns + 0.5 * wm),
                            Term::new("2w_A(T)||S||_A", 2.0 * wt * ns),
                        ]
                    };
                    chains.push(Chain::inequality(label, terms));
                }
                chains
            }
            ProdCond => {
                let h_s = self.h_s.expect("arity checked");
                let lhs = self.sp.sharp(&(self.h_t * h_s))?;
                let rhs = &self.sp.sharp(self.h_t)? * h_s;
                let residual = (&lhs - &rhs).frobenius_norm() / rhs.frobenius_norm().max(1.0);
                let bt = self.b(Which::T);
                let bs = self.b(Which::S);
                let w_ts = self.radius(&(&bt * &bs)).value();
                let (wt, ns) = (self.w(Which::T).value(), self.norm(Which::S));
                let chain =
                    Chain::inequality("", vec![Term::new("w_A(TS)", w_ts), Term::new("w_A(T)||S||_A", wt * ns)]);
                if residual > self.cfg.hypothesis_tol {
                    notes.push(format!("||(TS)# - T#S||_F relative residual {residual:.3e}"));
                    return Ok(Certificate::hypothesis_not_met(id, vec![chain], tol, notes));
                }
                vec![chain]
            }
            ProdDist => {
                let (bt, bs) = (self.b(Which::T), self.b(Which::S));
                let ts = &bt * &bs;
                let (nt, ns) = (self.norm(Which::T), self.norm(Which::S));
                let (wt, ws) = (self.w(Which::T).value(), self.w(Which::S).value());
                let (dt, ct) = self.d_term(Which::T);
                let (ds, cs) = self.d_term(Which::S);
                self.note_distance(&mut notes, ct && cs);
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("w_A(TS)", self.radius(&ts).value()),
                        Term::new("||TS||_A", spectral_norm(&ts)),
                        Term::heuristic(
                            "min(||T||_A(w_A(S)+d_A(S)), ||S||_A(w_A(T)+d_A(T)))",
                            (nt * (ws + ds)).min(ns * (wt + dt)),
                            ct && cs,
                        ),
                        Term::new("2min(||T||_A w_A(S), ||S||_A w_A(T))", 2.0 * (nt * ws).min(ns * wt)),
                    ],
                )]
            }
            ProdDist2 => {
                let (bt, bs) = (self.b(Which::T), self.b(Which::S));
                let ts = &bt * &bs;
                let (wt, ws) = (self.w(Which::T).value(), self.w(Which::S).value());
                let (dt, ct) = self.d_term(Which::T);
                let (ds, cs) = self.d_term(Which::S);
                self.note_distance(&mut notes, ct && cs);
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("w_A(TS)", self.radius(&ts).value()),
                        Term::new("||TS||_A", spectral_norm(&ts)),
                        Term::heuristic("(w_A(T)+d_A(T))(w_A(S)+d_A(S))", (wt + dt) * (ws + ds), ct && cs),
                        Term::new("4w_A(T)w_A(S)", 4.0 * wt * ws),
                    ],
                )]
            }
            AntiDist => {
                let anti = self.anti_norm(Which::R);
                let w = self.w(Which::R).value();
                let (d, cd) = self.d_term(Which::R);
                self.note_distance(&mut notes, cd);
                vec![Chain::inequality(
                    "",
                    vec![
                        Term::new("||R#R + RR#||_A", anti),
                        Term::heuristic("2(w_A(R)^2 + d_A(R)^2)", 2.0 * (w * w + d * d), cd),
                        Term::new("4w_A(R)^2", 4.0 * w * w),
                    ],
                )]
            }
            CommMain | CommCor => {
                let (bt, bs) = (self.b(Which::T), self.b(Which::S));
                let (ts, st) = (&bt * &bs, &bs * &bt);
                let (nt, ns) = (self.norm(Which::T), self.norm(Which::S));
                let (wt, ws) = (self.w(Which::T).value(), self.w(Which::S).value());
                let (dt, ct) = self.d_term(Which::T);
                let (ds, cs) = self.d_term(Which::S);
                self.note_distance(&mut notes, ct && cs);
                let et = (wt * wt + dt * dt).sqrt();
                let es = (ws * ws + ds * ds).sqrt();
                let (at, as_) = (self.anti_norm(Which::T), self.anti_norm(Which::S));
                let mut chains = Vec::new();
                for (label, sign) in [("+", 1.0), ("-", -1.0)] {
                    let w_c = self.radius(&(&ts + &st.scale_real(sign))).value();
                    let lhs = Term::new(format!("w_A(TS {label} ST)"), w_c);
                    let terms = if id == CommMain {
                        vec![
                            lhs,
                            Term::new("sqrt(||TT# + T#T||_A) sqrt(||SS# + S#S||_A)", at.sqrt() * as_.sqrt()),
                            Term::heuristic(
                                "2min(||T||_A sqrt(w_A(S)^2+d_A(S)^2), ||S||_A sqrt(w_A(T)^2+d_A(T)^2))",
                                2.0 * (nt * es).min(ns * et),
                                ct && cs,
                            ),
                            Term::new(
                                "2sqrt2 min(||T||_A w_A(S), ||S||_A w_A(T))",
                                2.0 * SQRT_2 * (nt * ws).min(ns * wt),
                            ),
                        ]
                    } else {
                        vec![
                            lhs,
                            Term::heuristic(
                                "2sqrt(w_A(T)^2+d_A(T)^2) sqrt(w_A(S)^2+d_A(S)^2)",
                                2.0 * et * es,
                                ct && cs,
                            ),
                            Term::new("4w_A(T)w_A(S)", 4.0 * wt * ws),
                        ]
                    };
                    chains.push(Chain::inequality(label, terms));
                }
                chains
            }
            Sandwich => {
                let (bt, bs, br) = (self.b(Which::T), self.b(Which::S), self.b(Which::R));
                let bt_sharp = bt.adjoint();
                let trt = &(&bt * &br) * &bt_sharp;
                let srt = &(&bs * &br) * &bt_sharp;
                let nt = self.norm(Which::T);
                let (wr, nr) = (self.w(Which::R).value(), self.norm(Which::R));
                let tt_ss = &(&bt * &bt_sharp) + &(&bs * &bs.adjoint());
                vec![
                    Chain::inequality(
                        "(i)",
                        vec![
                            Term::new("w_A(TRT#)", self.radius(&trt).value()),
                            Term::new("||T||_A^2 w_A(R)", nt * nt * wr),
                        ],
                    ),
                    Chain::inequality(
                        "(ii)",
                        vec![
                            Term::new("w_A(SRT#)", self.radius(&srt).value()),
                            Term::new("||TT# + SS#||_A ||R||_A/2", 0.5 * spectral_norm(&tt_ss) * nr),
                        ],
                    ),
                ]
            }
            AnticommSharp => {
                let (bt, bs) = (self.b(Which::T), self.b(Which::S));
                let (bt_sharp, bs_sharp) = (bt.adjoint(), bs.adjoint());
                let ts = &bt * &bs_sharp;
                let st = &bs * &bt_sharp;
                let ss = &bs * &bs_sharp;
                let proof_rhs = spectral_norm(&(&(&bt * &bt_sharp) + &ss));
                let statement_rhs = spectral_norm(&(&(&bt_sharp * &bt) + &ss));
                let mut chains = Vec::new();
                let mut statement_min = f64::INFINITY;
                for (label, sign) in [("+", 1.0), ("-", -1.0)] {
                    let w_c = self.radius(&(&ts + &st.scale_real(sign))).value();
                    let lhs = Term::new(format!("w_A(TS# {label} ST#)"), w_c);
                    chains.push(Chain::inequality(label, vec![lhs.clone(), Term::new("||TT# + SS#||_A", proof_rhs)]));
                    let stmt = Chain::inequality(
                        format!("{label} T#T variant"),
                        vec![lhs, Term::new("||T#T + SS#||_A", statement_rhs)],
                    );
                    statement_min = statement_min.min(stmt.min_slack());
                    chains.push(stmt.informational());
                }
                notes.push(format!("T#T + SS# variant reported only; its smallest slack is {statement_min:.6e}"));
                chains
            }
        };
        Ok(Certificate::assemble(id, chains, tol, notes))
    }

    /// `||XX# + X#X||_A = ||B B* + B* B||`.
    fn anti_norm(&mut self, which: Which) -> f64 {
        let b = self.b(which);
        let bh = b.adjoint();
        spectral_norm(&(&(&b * &bh) + &(&bh * &b)))
    }

    fn note_distance(&self, notes: &mut Vec<String>, certified: bool) {
        if !certified {
            notes.push("d_A bracket still open; tightness not claimed".to_string());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RankTolerance;

    fn identity_space(n: usize) -> SemiHilbertSpace {
        SemiHilbertSpace::with_default_tol(&CMatrix::identity(n)).unwrap()
    }

    fn weighted_pair() -> (SemiHilbertSpace, CMatrix) {
        let a = CMatrix::from_real_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        (
            SemiHilbertSpace::new(&a, RankTolerance::for_shape(2, 2)).unwrap(),
            CMatrix::from_real_rows(&[[2.0, 2.0], [0.0, 0.0]]),
        )
    }

    fn nil() -> CMatrix {
        CMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]])
    }

    #[test]
    fn registry_is_closed_and_ordered() {
        assert_eq!(InequalityId::ALL.len(), 22);
        assert_eq!(Suite::Section2.ids().count(), 11);
        assert_eq!(Suite::Section3.ids().count(), 6);
        assert_eq!(Suite::Section4.ids().count(), 5);
        for id in InequalityId::ALL {
            assert_eq!(id.key().parse::<InequalityId>().unwrap(), *id);
        }
        assert_eq!("NOPE".parse::<InequalityId>(), Err(Error::UnknownId("NOPE".into())));
    }

    #[test]
    fn power_bounds_nilpotent_is_tight_below() {
        let cfg = CertifyConfig::default();
        let c = evaluate_certificate(InequalityId::PwrBounds, &identity_space(2), &Operands::new(nil()), &cfg).unwrap();
        let v: Vec<f64> = c.terms.iter().map(|t| t.value).collect();
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-15);
        assert!(c.slacks[0].abs() < 1e-9);
        assert_eq!(c.verdict, Verdict::Pass);
    }

    #[test]
    fn power_bounds_normal_is_tight_above() {
        let cfg = CertifyConfig::default();
        let t = CMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let c = evaluate_certificate(InequalityId::PwrBounds, &identity_space(2), &Operands::new(t), &cfg).unwrap();
        assert!(c.slacks[1].abs() < 1e-9);
        assert_eq!(c.verdict, Verdict::Pass);
    }

    #[test]
    fn selfadjoint_equality_on_weighted_example() {
        let (sp, t) = weighted_pair();
        let c =
            evaluate_certificate(InequalityId::SelfadjEq, &sp, &Operands::new(t), &CertifyConfig::default()).unwrap();
        assert!((c.terms[0].value - 2.0).abs() < 1e-12 && (c.terms[1].value - 2.0).abs() < 1e-12);
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(c.notes.is_empty());
    }

    #[test]
    fn section2_on_weighted_example_passes() {
        let (sp, t) = weighted_pair();
        let rep = run_suite(Suite::Section2, &sp, &Operands::new(t), &CertifyConfig::default()).unwrap();
        assert_eq!(rep.certificates.len(), 11);
        for c in &rep.certificates {
            assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
        }
        assert_eq!(rep.summary.pass, 11);
    }

    #[test]
    fn section3_needs_s() {
        let (sp, t) = weighted_pair();
        let err = run_suite(Suite::Section3, &sp, &Operands::new(t), &CertifyConfig::default()).unwrap_err();
        assert_eq!(err, Error::ArityMismatch { needed: 2, given: 1 });
    }

    #[test]
    fn product_condition_with_identity() {
        let sp = identity_space(3);
        let t = CMatrix::from_fn(3, 3, |i, j| C64::new((i + j) as f64 * 0.3 - 0.4, i as f64 * 0.2 - j as f64 * 0.1));
        let ops = Operands::new(t).with_s(CMatrix::identity(3));
        let c = evaluate_certificate(InequalityId::ProdCond, &sp, &ops, &CertifyConfig::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(c.slacks[0].abs() < 1e-9);
    }

    #[test]
    fn product_condition_skips_when_hypothesis_fails() {
        let sp = identity_space(2);
        let ops = Operands::new(nil()).with_s(nil().adjoint());
        let c = evaluate_certificate(InequalityId::ProdCond, &sp, &ops, &CertifyConfig::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(!c.hypothesis_met());
    }

    #[test]
    fn heuristic_failure_is_inconclusive() {
        let chain = Chain::inequality(
            "",
            vec![
                Term::new("||T||_A/2", 1.0),
                Term::heuristic("max(|sin|_A T, 1/sqrt2) w_A(T)", 0.9, false),
                Term::new("w_A(T)", 1.2),
            ],
        );
        let c = Certificate::assemble(InequalityId::LowerSin, vec![chain.clone()], 1e-8, Vec::new());
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(!c.notes.is_empty());
        let mut certified = chain;
        certified.terms[1].certified = true;
        let c = Certificate::assemble(InequalityId::LowerSin, vec![certified], 1e-8, Vec::new());
        assert_eq!(c.verdict, Verdict::Fail);
    }

    #[test]
    fn anticommutator_statement_variant_is_informational() {
        let sp = identity_space(2);
        let ops = Operands::new(nil()).with_s(nil());
        let c = evaluate_certificate(InequalityId::AnticommSharp, &sp, &ops, &CertifyConfig::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        let stmt = c.chains.iter().find(|ch| ch.informational).unwrap();
        assert!(stmt.min_slack() < -0.5);
    }

    #[test]
    fn classical_random_all_suite_passes() {
        let sp = identity_space(4);
        let t =
            CMatrix::from_fn(4, 4, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0));
        let s =
            CMatrix::from_fn(4, 4, |i, j| C64::new(((i * 2 + j * 5) % 7) as f64 - 3.0, ((3 * i + j) % 4) as f64 - 1.5));
        let rep = run_suite(Suite::All, &sp, &Operands::new(t).with_s(s), &CertifyConfig::default()).unwrap();
        assert_eq!(rep.certificates.len(), 22);
        for c in &rep.certificates {
            assert_ne!(c.verdict, Verdict::Fail, "{c:?}");
        }
    }
}
