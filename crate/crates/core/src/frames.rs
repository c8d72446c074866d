//! Party-local unknown phases.
//!
//! Every ket is written in the frame of a fictitious third party. Alice's
//! local `|1>` is `e^{iφ_A}|1>` in that frame (Bob's likewise with `φ_B`), so a
//! gate `u` that a party applies "in her own frame" acts as `P u P†` with
//! `P = diag(e^{i φ q(x)})`, `q(x)` being the total charge of the set bits.
//! What a party can observe without a shared reference is obtained by
//! averaging over the unknown phase, which for a `U(1)` action reduces to
//! deleting coherences between different total-charge sectors.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::{kernel, MixedState, Operator, QuantumState, UnitaryOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    Alice,
    Bob,
    Environment,
}

/// Ground-truth local phases of Alice and Bob relative to the third party.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameAssignment {
    phi_a: f64,
    phi_b: f64,
}

fn reduce_angle(x: f64) -> f64 {
    let r = x - TAU * (x / TAU).floor();
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl FrameAssignment {
    pub fn new(phi_a: f64, phi_b: f64) -> Self {
        Self {
            phi_a: reduce_angle(phi_a),
            phi_b: reduce_angle(phi_b),
        }
    }

    /// Both parties aligned with the third party.
    pub fn aligned() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(rng.gen::<f64>() * TAU, rng.gen::<f64>() * TAU)
    }

    pub fn phi_a(&self) -> f64 {
        self.phi_a
    }

    pub fn phi_b(&self) -> f64 {
        self.phi_b
    }

    /// Local phase of `party`; the environment acts in the third-party frame.
    pub fn phase(&self, party: Party) -> f64 {
        match party {
            Party::Alice => self.phi_a,
            Party::Bob => self.phi_b,
            Party::Environment => 0.0,
        }
    }
}

/// Per-qubit phase charge: 1 for a physical qubit, 2 for a refbit(2) unit
/// stored as a single two-level system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeMap(Vec<u32>);

impl ChargeMap {
    pub fn new(charges: Vec<u32>) -> Self {
        Self(charges)
    }

    pub fn uniform(n_qubits: usize) -> Self {
        Self(vec![1; n_qubits])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn charge(&self, qubit: usize) -> u32 {
        self.0[qubit]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn push(&mut self, charge: u32) {
        self.0.push(charge);
    }

    /// Total charge within `scope` of the full-register basis index `index`.
    pub fn total(&self, index: usize, scope: &[usize]) -> u32 {
        let n = self.0.len();
        scope
            .iter()
            .filter(|&&q| (index >> (n - 1 - q)) & 1 == 1)
            .map(|&q| self.0[q])
            .sum()
    }

    /// Charges of each scope sub-index, first scope qubit most significant.
    pub fn sub_charges(&self, scope: &[usize]) -> Vec<u32> {
        let k = scope.len();
        (0..1usize << k)
            .map(|s| {
                scope
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| (s >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, &q)| self.0[q])
                    .sum()
            })
            .collect()
    }

    fn check_scope(&self, scope: &[usize]) -> Result<()> {
        kernel::check_targets(self.0.len(), scope)
    }
}

/// Owner of every qubit in a register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyLayout(Vec<Party>);

impl PartyLayout {
    pub fn new(owners: Vec<Party>) -> Self {
        Self(owners)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn owner(&self, qubit: usize) -> Party {
        self.0[qubit]
    }

    pub fn qubits_of(&self, party: Party) -> Vec<usize> {
        (0..self.0.len()).filter(|&q| self.0[q] == party).collect()
    }

    pub fn push(&mut self, party: Party) {
        self.0.push(party);
    }

    /// Hands `qubit` to `party`, as a noiseless quantum channel would.
    pub fn transfer(&mut self, qubit: usize, party: Party) {
        self.0[qubit] = party;
    }

    pub fn as_slice(&self) -> &[Party] {
        &self.0
    }

    /// Fails with a scope violation unless every target belongs to `party`.
    pub fn check_owned(&self, party: Party, targets: &[usize]) -> Result<()> {
        for &t in targets {
            if t >= self.0.len() {
                return Err(Error::QubitOutOfRange {
                    index: t,
                    n_qubits: self.0.len(),
                });
            }
            if self.0[t] != party {
                return Err(Error::ScopeViolation { qubit: t });
            }
        }
        Ok(())
    }
}

/// `diag(e^{i φ q})` over `scope`, `q` the total charge of the set bits.
pub fn number_phase(phi: f64, charges: &ChargeMap, scope: &[usize]) -> Result<UnitaryOp> {
    charges.check_scope(scope)?;
    let diag: Vec<Complex64> = charges
        .sub_charges(scope)
        .into_iter()
        .map(|q| Complex64::from_polar(1.0, phi * f64::from(q)))
        .collect();
    Ok(UnitaryOp::diagonal(&diag))
}

fn conjugate_operator(op: &Operator, phase: &UnitaryOp) -> Result<Operator> {
    if op.dim() != phase.dim() {
        return Err(Error::DimensionMismatch(op.dim(), phase.dim()));
    }
    // P op P† for diagonal P, entrywise.
    let d = op.dim();
    let diag: Vec<Complex64> = (0..d).map(|i| phase.get(i, i)).collect();
    let mut data = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            data.push(diag[r] * op.get(r, c) * diag[c].conj());
        }
    }
    Operator::new(d, data)
}

/// `P u P†` with `P = number_phase(phi, charges, scope)`.
pub fn frame_conjugate(
    u: &UnitaryOp,
    phi: f64,
    charges: &ChargeMap,
    scope: &[usize],
) -> Result<UnitaryOp> {
    let p = number_phase(phi, charges, scope)?;
    conjugate_operator(u, &p).map(UnitaryOp::from_operator_unchecked)
}

/// Same conjugation for a general (measurement or Kraus) operator.
pub fn frame_conjugate_operator(
    op: &Operator,
    phi: f64,
    charges: &ChargeMap,
    scope: &[usize],
) -> Result<Operator> {
    let p = number_phase(phi, charges, scope)?;
    conjugate_operator(op, &p)
}

/// `party` applies `u` on `targets` in her own frame.
pub fn apply_local_gate<S: QuantumState>(
    state: &S,
    u: &UnitaryOp,
    targets: &[usize],
    party: Party,
    frame: &FrameAssignment,
    layout: &PartyLayout,
    charges: &ChargeMap,
) -> Result<S> {
    layout.check_owned(party, targets)?;
    let local = frame_conjugate(u, frame.phase(party), charges, targets)?;
    state.apply_unitary(&local, targets)
}

/// Exact average over a uniformly distributed phase acting on `scope`:
/// coherences between different total charges are deleted.
pub fn twirl(state: &MixedState, scope: &[usize], charges: &ChargeMap) -> Result<MixedState> {
    charges.check_scope(scope)?;
    if charges.len() != state.n_qubits() {
        return Err(Error::DimensionMismatch(charges.len(), state.n_qubits()));
    }
    let d = state.dim();
    let q: Vec<u32> = (0..d).map(|i| charges.total(i, scope)).collect();
    let mut out = state.clone();
    let data = out.entries_mut();
    for r in 0..d {
        for c in 0..d {
            if q[r] != q[c] {
                data[r * d + c] = Complex64::zero();
            }
        }
    }
    Ok(out)
}

/// Sampled version of [`twirl`]: the mean of `P(φ) ρ P(φ)†` over `samples`
/// uniform phases.
pub fn twirl_monte_carlo<R: Rng + ?Sized>(
    state: &MixedState,
    scope: &[usize],
    charges: &ChargeMap,
    samples: usize,
    rng: &mut R,
) -> Result<MixedState> {
    charges.check_scope(scope)?;
    let d = state.dim();
    let q: Vec<f64> = (0..d).map(|i| f64::from(charges.total(i, scope))).collect();
    let mut acc = vec![Complex64::zero(); d * d];
    for _ in 0..samples {
        let phi = rng.gen::<f64>() * TAU;
        for r in 0..d {
            for c in 0..d {
                let rot = Complex64::from_polar(1.0, phi * (q[r] - q[c]));
                acc[r * d + c] += state.get(r, c) * rot;
            }
        }
    }
    let inv = Complex64::new(1.0 / samples as f64, 0.0);
    for z in &mut acc {
        *z *= inv;
    }
    Ok(MixedState::from_raw(state.n_qubits(), acc))
}

/// Projector onto total charge `q` within `scope`, as an operator on `scope`.
pub fn charge_sector_projector(charges: &ChargeMap, scope: &[usize], q: u32) -> Result<Operator> {
    charges.check_scope(scope)?;
    let diag: Vec<Complex64> = charges
        .sub_charges(scope)
        .into_iter()
        .map(|c| if c == q { Complex64::new(1.0, 0.0) } else { Complex64::zero() })
        .collect();
    Ok(Operator::diagonal(&diag))
}

/// Distinct total charges reachable within `scope`, ascending.
pub fn charge_sectors(charges: &ChargeMap, scope: &[usize]) -> Vec<u32> {
    let mut all = charges.sub_charges(scope);
    all.sort_unstable();
    all.dedup();
    all
}

/// One outcome of a local measurement.
#[derive(Clone, Debug)]
pub struct MeasurementBranch<S> {
    pub probability: f64,
    pub state: Option<S>,
}

/// `party` measures `targets` with the family `operators`, each written in her
/// own frame (it is conjugated by her phase before being applied).
pub fn measure_local<S: QuantumState>(
    state: &S,
    party: Party,
    frame: &FrameAssignment,
    layout: &PartyLayout,
    charges: &ChargeMap,
    targets: &[usize],
    operators: &[Operator],
) -> Result<Vec<MeasurementBranch<S>>> {
    layout.check_owned(party, targets)?;
    let d = 1usize << targets.len();
    let mut sum = Operator::zeros(d);
    for k in operators {
        sum = sum.add(&k.adjoint().matmul(k)?)?;
    }
    let defect = sum.max_distance(&Operator::identity(d));
    if defect > 1e-10 {
        return Err(Error::IncompleteMeasurement(defect));
    }
    let phi = frame.phase(party);
    operators
        .iter()
        .map(|k| {
            let local = frame_conjugate_operator(k, phi, charges, targets)?;
            let (probability, state) = state.apply_kraus(&local, targets)?;
            Ok(MeasurementBranch { probability, state })
        })
        .collect()
}
