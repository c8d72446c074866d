//! Resource kinds, ledgers of resource amounts, and certificates tying a
//! simulated state to the resource it is supposed to be.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::frames::{ChargeMap, FrameAssignment, Party, PartyLayout};
use crate::hilbert::{entanglement_entropy, fidelity, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ResourceKind {
    Qubit,
    Cbit,
    Cobit,
    Ebit,
    Refbit,
    Refbit2,
    QubitL,
    CbitL,
    CobitL,
    EbitL,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 10] = [
        ResourceKind::Qubit,
        ResourceKind::Cbit,
        ResourceKind::Cobit,
        ResourceKind::Ebit,
        ResourceKind::Refbit,
        ResourceKind::Refbit2,
        ResourceKind::QubitL,
        ResourceKind::CbitL,
        ResourceKind::CobitL,
        ResourceKind::EbitL,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ResourceKind::Qubit => "qubit",
            ResourceKind::Cbit => "cbit",
            ResourceKind::Cobit => "cobit",
            ResourceKind::Ebit => "ebit",
            ResourceKind::Refbit => "refbit",
            ResourceKind::Refbit2 => "refbit2",
            ResourceKind::QubitL => "QubitL",
            ResourceKind::CbitL => "CbitL",
            ResourceKind::CobitL => "CobitL",
            ResourceKind::EbitL => "EbitL",
        }
    }

    pub fn is_encoded(self) -> bool {
        matches!(
            self,
            ResourceKind::QubitL | ResourceKind::CbitL | ResourceKind::CobitL | ResourceKind::EbitL
        )
    }

    /// Channel uses, as opposed to states shared between the parties.
    pub fn is_channel(self) -> bool {
        matches!(
            self,
            ResourceKind::Qubit | ResourceKind::Cbit | ResourceKind::Cobit
        )
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Amount of one resource. Most coefficients are exact fractions; a few
/// rates (for instance `log2 3` cbits) are irrational.
#[derive(Clone, Debug, PartialEq)]
pub enum Amount {
    Exact(BigRational),
    Real(f64),
}

impl Amount {
    pub fn int(n: i64) -> Self {
        Amount::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Amount::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn real(x: f64) -> Self {
        Amount::Real(x)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Amount::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Amount::Real(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Amount::Exact(r) => Some(r),
            Amount::Real(_) => None,
        }
    }

    fn is_negative(&self) -> bool {
        match self {
            Amount::Exact(r) => r.is_negative(),
            Amount::Real(x) => *x < -1e-12,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Amount::Exact(r) => r.is_zero(),
            Amount::Real(x) => x.abs() <= 1e-12,
        }
    }

    fn combine(&self, other: &Amount, sign: i64) -> Amount {
        match (self, other) {
            (Amount::Exact(a), Amount::Exact(b)) => {
                Amount::Exact(a + b * BigRational::from_integer(BigInt::from(sign)))
            }
            _ => Amount::Real(self.to_f64() + sign as f64 * other.to_f64()),
        }
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Amount::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Amount::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Amount::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Nonnegative amounts per resource kind.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResourceVector(BTreeMap<ResourceKind, Amount>);

impl ResourceVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `amount` of `kind`; zero amounts are dropped.
    pub fn with(mut self, kind: ResourceKind, amount: Amount) -> Self {
        let merged = match self.0.remove(&kind) {
            Some(old) => old.combine(&amount, 1),
            None => amount,
        };
        if !merged.is_zero() {
            self.0.insert(kind, merged);
        }
        self
    }

    pub fn get(&self, kind: ResourceKind) -> Option<&Amount> {
        self.0.get(&kind)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ResourceKind, &Amount)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ResourceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, a)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{a} {k}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LedgerOp {
    Add,
    Subtract,
}

pub fn ledger_combine(a: &ResourceVector, b: &ResourceVector, op: LedgerOp) -> Result<ResourceVector> {
    let sign = match op {
        LedgerOp::Add => 1,
        LedgerOp::Subtract => -1,
    };
    let mut out = a.0.clone();
    for (k, amount) in &b.0 {
        let zero = Amount::int(0);
        let merged = out.get(k).unwrap_or(&zero).combine(amount, sign);
        if merged.is_negative() {
            return Err(Error::Overdraw(k.name()));
        }
        if merged.is_zero() {
            out.remove(k);
        } else {
            out.insert(*k, merged);
        }
    }
    Ok(ResourceVector(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verified,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Failed => "failed",
        }
    }
}

/// How a metric is judged.
#[derive(Clone, Debug, PartialEq)]
pub enum Criterion {
    AtLeast(f64),
    AtMost(f64),
    Near { target: f64, tolerance: f64 },
    /// Observed frequency of `trials` Bernoulli draws against `expected`.
    ThreeSigma { expected: f64, trials: u64 },
}

impl Criterion {
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Criterion::AtLeast(b) => value >= b,
            Criterion::AtMost(b) => value <= b,
            Criterion::Near { target, tolerance } => (value - target).abs() <= tolerance,
            Criterion::ThreeSigma { expected, trials } => {
                let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
                (value - expected).abs() <= 3.0 * sigma + 1e-12
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub criterion: Criterion,
    pub passed: bool,
}

impl Check {
    fn is_worse_than(&self, other: &Check) -> bool {
        if self.passed != other.passed {
            return !self.passed;
        }
        match self.criterion {
            Criterion::AtLeast(_) => self.value < other.value,
            Criterion::AtMost(_) => self.value > other.value,
            Criterion::Near { target, .. } => {
                (self.value - target).abs() > (other.value - target).abs()
            }
            Criterion::ThreeSigma { expected, .. } => {
                (self.value - expected).abs() > (other.value - expected).abs()
            }
        }
    }
}

/// Outcome of running one relation.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationCertificate {
    pub relation_id: String,
    pub lhs: ResourceVector,
    pub rhs: ResourceVector,
    pub status: Status,
    /// Reported numbers in insertion order.
    pub metrics: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub tolerance: f64,
    pub seed: u64,
    pub trials: u64,
}

impl RelationCertificate {
    pub fn new(
        relation_id: &str,
        lhs: ResourceVector,
        rhs: ResourceVector,
        tolerance: f64,
        seed: u64,
        trials: u64,
    ) -> Self {
        Self {
            relation_id: relation_id.to_string(),
            lhs,
            rhs,
            status: Status::Verified,
            metrics: Vec::new(),
            checks: Vec::new(),
            tolerance,
            seed,
            trials,
        }
    }

    /// Records a reported number without judging it.
    pub fn metric(&mut self, name: &str, value: f64) {
        match self.metrics.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.metrics.push((name.to_string(), value)),
        }
    }

    /// Records and judges a number; any failed check fails the certificate.
    pub fn check(&mut self, name: &str, value: f64, criterion: Criterion) -> bool {
        let passed = value.is_finite() && criterion.holds(value);
        self.metric(name, value);
        self.checks.push(Check {
            name: name.to_string(),
            value,
            criterion,
            passed,
        });
        if !passed {
            self.status = Status::Failed;
        }
        passed
    }

    /// Records a condition that has no numeric value.
    pub fn require(&mut self, name: &str, ok: bool) -> bool {
        self.check(name, if ok { 1.0 } else { 0.0 }, Criterion::AtLeast(1.0))
    }

    /// Folds the checks of another run of the same relation into this one,
    /// keeping for each name the value that is worst under its criterion.
    pub fn absorb(&mut self, other: &RelationCertificate) {
        for check in &other.checks {
            match self.checks.iter().position(|c| c.name == check.name) {
                Some(i) => {
                    if check.is_worse_than(&self.checks[i]) {
                        self.checks[i] = check.clone();
                        self.metric(&check.name, check.value);
                    }
                }
                None => {
                    self.checks.push(check.clone());
                    self.metric(&check.name, check.value);
                }
            }
            if !check.passed {
                self.status = Status::Failed;
            }
        }
        for (name, value) in &other.metrics {
            if !self.checks.iter().any(|c| &c.name == name) {
                self.metric(name, *value);
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn amp(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn e(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

fn two_level(a: Complex64, b: Complex64, n: usize) -> Result<PureState> {
    // a|0..0> + b|1..1> over n qubits
    let mut amps = vec![Complex64::zero(); 1 << n];
    amps[0] = a;
    amps[(1 << n) - 1] = b;
    PureState::normalized(n, amps)
}

fn with_layout(
    state: PureState,
    owners: Vec<Party>,
) -> (PureState, PartyLayout, ChargeMap) {
    let n = owners.len();
    (state, PartyLayout::new(owners), ChargeMap::uniform(n))
}

/// `|1>_A|0>_B + sign |0>_A|1>_B`.
pub fn ebit_state(sign: f64) -> PureState {
    PureState::new(
        2,
        vec![amp(0.0), amp(sign * FRAC_1_SQRT_2), amp(FRAC_1_SQRT_2), amp(0.0)],
    )
    .expect("normalized")
}

/// `(|0> + e^{iφ}|1>) ⊗ (|0> + e^{iφ}|1>)`.
pub fn refbit_state(phi: f64) -> PureState {
    let half = two_level(amp(1.0), e(phi), 1).expect("normalized");
    half.tensor(&half).expect("two qubits")
}

/// `(|00> + e^{2iφ}|11>) ⊗ (|00> + e^{2iφ}|11>)` on four physical qubits.
pub fn refbit2_state(phi: f64) -> PureState {
    let half = two_level(amp(1.0), e(2.0 * phi), 2).expect("normalized");
    half.tensor(&half).expect("four qubits")
}

/// `|0_L 1_L> + sign |1_L 0_L>` with `|0_L> = |01>`, `|1_L> = |10>`.
pub fn logical_ebit_state(sign: f64) -> PureState {
    let mut amps = vec![Complex64::zero(); 16];
    amps[0b0110] = amp(FRAC_1_SQRT_2);
    amps[0b1001] = amp(sign * FRAC_1_SQRT_2);
    PureState::new(4, amps).expect("normalized")
}

/// Reference state of a shared resource, in the third-party frame. For the
/// single-party encoded kinds the logical basis state `|0_L>` (sign `+`) or
/// `|1_L>` (sign `-`) held by Alice is returned.
pub fn canonical_state(
    kind: ResourceKind,
    frame: &FrameAssignment,
    sign: f64,
) -> Result<(PureState, PartyLayout, ChargeMap)> {
    use Party::{Alice, Bob};
    let sign = if sign < 0.0 { -1.0 } else { 1.0 };
    Ok(match kind {
        ResourceKind::Ebit => with_layout(ebit_state(sign), vec![Alice, Bob]),
        ResourceKind::Refbit => with_layout(refbit_state(frame.phi_a()), vec![Alice, Bob]),
        ResourceKind::Refbit2 => {
            with_layout(refbit2_state(frame.phi_a()), vec![Alice, Alice, Bob, Bob])
        }
        ResourceKind::EbitL => with_layout(logical_ebit_state(sign), vec![Alice, Alice, Bob, Bob]),
        ResourceKind::QubitL | ResourceKind::CbitL | ResourceKind::CobitL => {
            let bits: &[u8] = if sign > 0.0 { &[0, 1] } else { &[1, 0] };
            with_layout(PureState::from_bits(bits)?, vec![Alice, Alice])
        }
        ResourceKind::Qubit => return Err(Error::NoCanonicalState("qubit")),
        ResourceKind::Cbit => return Err(Error::NoCanonicalState("cbit")),
        ResourceKind::Cobit => return Err(Error::NoCanonicalState("cobit")),
    })
}

/// States that count as `kind` under the local-equivalence freedoms of its
/// definition, given the true frames.
pub fn equivalent_forms(kind: ResourceKind, frame: &FrameAssignment) -> Vec<PureState> {
    let (pa, pb) = (frame.phi_a(), frame.phi_b());
    let mut forms = Vec::new();
    match kind {
        ResourceKind::Ebit => {
            for s in [1.0, -1.0] {
                forms.push(ebit_state(s));
                let mut amps = vec![Complex64::zero(); 4];
                amps[0b10] = e(2.0 * pa) * FRAC_1_SQRT_2;
                amps[0b01] = e(2.0 * pb) * s * FRAC_1_SQRT_2;
                forms.push(PureState::new(2, amps).expect("normalized"));
                forms.push(two_level(amp(1.0), e(2.0 * pa) * s, 2).expect("normalized"));
            }
        }
        ResourceKind::Refbit => {
            forms.push(refbit_state(pa));
            forms.push(refbit_state(pb));
        }
        ResourceKind::Refbit2 => {
            forms.push(refbit2_state(pa));
            forms.push(refbit2_state(pb));
        }
        ResourceKind::EbitL => {
            for s in [1.0, -1.0] {
                forms.push(logical_ebit_state(s));
                let mut amps = vec![Complex64::zero(); 16];
                amps[0b0101] = amp(FRAC_1_SQRT_2);
                amps[0b1010] = amp(s * FRAC_1_SQRT_2);
                forms.push(PureState::new(4, amps).expect("normalized"));
            }
        }
        _ => {}
    }
    forms
}

/// Best fidelity of `state` against the accepted forms of `kind`; passes when
/// it reaches `1 - tol`. Single-party encoded kinds pass when the state lies
/// in the logical code space, and channel kinds never pass.
pub fn certify_state(
    state: &PureState,
    kind: ResourceKind,
    frame: &FrameAssignment,
    tol: f64,
) -> (bool, f64) {
    let score = match kind {
        ResourceKind::QubitL | ResourceKind::CbitL | ResourceKind::CobitL => {
            if state.n_qubits() == 2 {
                state.amplitude(0b01).norm_sqr() + state.amplitude(0b10).norm_sqr()
            } else {
                0.0
            }
        }
        _ => equivalent_forms(kind, frame)
            .iter()
            .filter(|f| f.n_qubits() == state.n_qubits())
            .filter_map(|f| fidelity(f, state).ok())
            .fold(0.0, f64::max),
    };
    (score >= 1.0 - tol, score)
}

/// Entanglement that survives when Alice may not coherently mix her local
/// charge sectors: `Σ_n p_n E(ψ_n)` over Alice's total charge `n`.
pub fn accessible_entanglement(
    state: &PureState,
    layout: &PartyLayout,
    charges: &ChargeMap,
) -> Result<f64> {
    if layout.len() != state.n_qubits() || charges.len() != state.n_qubits() {
        return Err(Error::DimensionMismatch(layout.len(), state.n_qubits()));
    }
    if !layout.qubits_of(Party::Environment).is_empty() {
        return Err(Error::EnvironmentPresent);
    }
    let alice = layout.qubits_of(Party::Alice);
    let sectors: Vec<u32> = (0..state.dim()).map(|i| charges.total(i, &alice)).collect();
    let mut levels = sectors.clone();
    levels.sort_unstable();
    levels.dedup();
    let mut total = 0.0;
    for n in levels {
        let amps: Vec<Complex64> = state
            .amplitudes()
            .iter()
            .zip(&sectors)
            .map(|(a, &s)| if s == n { *a } else { Complex64::zero() })
            .collect();
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p < 1e-15 {
            continue;
        }
        let branch = PureState::normalized(state.n_qubits(), amps)?;
        total += p * entanglement_entropy(&branch, &alice)?;
    }
    Ok(total)
}
