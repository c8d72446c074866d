//! Helpers shared by the protocol runners.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use num_traits::Zero;

use alloc::string::String;

use crate::error::Result;
use crate::frames::{twirl, ChargeMap, FrameAssignment, Party, PartyLayout};
use crate::hilbert::{gates, trace_distance, MixedState, Operator, PureState, UnitaryOp};
use crate::resources::{certify_state, Amount, Criterion, RelationCertificate, ResourceKind, ResourceVector};

use super::lab::{ChannelUses, Lab};

/// Run-wide knobs: judging tolerance for exact-physics checks, the seed of
/// every random draw, and the Monte Carlo trial count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub tolerance: f64,
    pub seed: u64,
    pub trials: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            seed: 0,
            trials: 10_000,
        }
    }
}

/// Random instances drawn for relations verified on sampled inputs and frames.
pub const RANDOM_INSTANCES: usize = 20;

/// Numerical drift allowed in the norm of a state evolved unitarily.
pub const NORM_DRIFT: f64 = 1e-12;

pub fn resources(items: &[(ResourceKind, Amount)]) -> ResourceVector {
    items
        .iter()
        .cloned()
        .fold(ResourceVector::new(), |v, (k, a)| v.with(k, a))
}

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub(crate) fn e(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

/// Alice's local `a|0> + b|1>` as seen from the third-party frame.
pub fn alice_local_state(frame: &FrameAssignment, a: Complex64, b: Complex64) -> Result<PureState> {
    PureState::qubit(a, b * e(frame.phi_a()))
}

/// Two-qubit Bell states in the order `Φ+, Φ-, Ψ+, Ψ-`.
pub fn bell_states() -> [PureState; 4] {
    let s = FRAC_1_SQRT_2;
    let mk = |v: [f64; 4]| PureState::new(2, v.iter().map(|&x| c(x * s)).collect()).expect("normalized");
    [
        mk([1.0, 0.0, 0.0, 1.0]),
        mk([1.0, 0.0, 0.0, -1.0]),
        mk([0.0, 1.0, 1.0, 0.0]),
        mk([0.0, 1.0, -1.0, 0.0]),
    ]
}

pub fn bell_projectors() -> Vec<Operator> {
    bell_states().iter().map(Operator::projector).collect()
}

pub fn computational_projectors(n_qubits: usize) -> Vec<Operator> {
    (0..1usize << n_qubits)
        .map(|i| Operator::projector(&PureState::basis(n_qubits, i).expect("in range")))
        .collect()
}

/// Physical index of logical index `l` over `k` pairs: bit `j` of the
/// logical register becomes pair `j` reading `10` (set) or `01` (clear).
fn encode_index(l: usize, k: usize) -> usize {
    (0..k).fold(0usize, |acc, j| {
        let bit = (l >> (k - 1 - j)) & 1;
        (acc << 2) | if bit == 1 { 0b10 } else { 0b01 }
    })
}

fn decode_index(p: usize, k: usize) -> Option<usize> {
    (0..k).try_fold(0usize, |acc, j| {
        match (p >> (2 * (k - 1 - j))) & 0b11 {
            0b01 => Some(acc << 1),
            0b10 => Some((acc << 1) | 1),
            _ => None,
        }
    })
}

/// `u` acting on the code space `|0_L> = |01>`, `|1_L> = |10>` of each pair,
/// identity outside it. Every pair keeps charge one inside the code, so the
/// result commutes with every number phase.
pub fn encode_gate(u: &UnitaryOp) -> UnitaryOp {
    let k = u.n_qubits();
    let dim = 1usize << (2 * k);
    let mut data = vec![Complex64::zero(); dim * dim];
    for col in 0..dim {
        match decode_index(col, k) {
            Some(lc) => {
                for lr in 0..u.dim() {
                    data[encode_index(lr, k) * dim + col] = u.get(lr, lc);
                }
            }
            None => data[col * dim + col] = c(1.0),
        }
    }
    UnitaryOp::new(dim, data).expect("embedding of a unitary is unitary")
}

/// Logical state `Σ ψ_l |l>` written on `2k` physical qubits.
pub fn encode_state(logical: &PureState) -> PureState {
    let k = logical.n_qubits();
    let mut amps = vec![Complex64::zero(); 1 << (2 * k)];
    for (l, a) in logical.amplitudes().iter().enumerate() {
        amps[encode_index(l, k)] = *a;
    }
    PureState::new(2 * k, amps).expect("isometry preserves the norm")
}

/// Trace distance between a state and its average over both parties'
/// unknown phases (each party's qubits twirled separately).
pub fn frame_dependence(state: &MixedState, owners: &[Party], charges: &ChargeMap) -> Result<f64> {
    let layout = PartyLayout::new(owners.to_vec());
    let mut twirled = state.clone();
    for party in [Party::Alice, Party::Bob] {
        let scope = layout.qubits_of(party);
        if !scope.is_empty() {
            twirled = twirl(&twirled, &scope, charges)?;
        }
    }
    trace_distance(state, &twirled)
}

/// Tolerance on the total probability of a measurement's branches.
pub const BRANCH_SUM: f64 = 1e-10;

/// One branch of a measured protocol.
#[derive(Clone, Debug)]
pub struct ProtocolOutcome {
    pub label: String,
    pub probability: f64,
    pub state: Option<PureState>,
    pub layout: PartyLayout,
    pub produced: ResourceVector,
}

/// Bob's halves of `n` refbits, `|0> + e^{iφ_A}|1>` each. Alice's halves are
/// product states she can always re-prepare, so they are not simulated.
pub fn add_refbit_halves(lab: &mut Lab, n: usize) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let q = lab.fresh(Party::Alice)?;
        lab.local(Party::Alice, &gates::h(), &[q])?;
        lab.reassign(q, Party::Bob);
        out.push(q);
    }
    Ok(out)
}

/// Bob's halves of `m` refbit(2)s, `|00> + e^{2iφ_A}|11>` on two qubits each.
pub fn add_refbit2_halves(lab: &mut Lab, m: usize) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(2 * m);
    for _ in 0..m {
        let q0 = lab.fresh(Party::Alice)?;
        let q1 = lab.fresh(Party::Alice)?;
        lab.local(Party::Alice, &gates::h(), &[q0])?;
        lab.local(Party::Alice, &gates::cnot(), &[q0, q1])?;
        for q in [q0, q1] {
            lab.reassign(q, Party::Bob);
            out.push(q);
        }
    }
    Ok(out)
}

/// Projectors onto each total charge `0..=n` of `n` unit-charge qubits.
pub fn charge_projectors(n: usize) -> Vec<Operator> {
    (0..=n as u32)
        .map(|k| {
            let diag: Vec<Complex64> = (0..1usize << n)
                .map(|i| c(if i.count_ones() == k { 1.0 } else { 0.0 }))
                .collect();
            Operator::diagonal(&diag)
        })
        .collect()
}

pub(crate) fn check_branch_sum(cert: &mut RelationCertificate, name: &str, probs: impl IntoIterator<Item = f64>) {
    let total: f64 = probs.into_iter().sum();
    cert.check(name, (total - 1.0).abs(), Criterion::AtMost(BRANCH_SUM));
}

/// Records a seeded frequency and judges it against a 3σ band.
pub(crate) fn check_frequency(cert: &mut RelationCertificate, name: &str, hits: u64, trials: u64, expected: f64) {
    if trials == 0 {
        return;
    }
    let freq = hits as f64 / trials as f64;
    cert.metric(&alloc::format!("{name}_trials"), trials as f64);
    cert.check(name, freq, Criterion::ThreeSigma { expected, trials });
}

pub(crate) fn pure_fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

pub(crate) fn finish(cert: &mut RelationCertificate, lab: &Lab, expected: ChannelUses) {
    let uses = lab.uses();
    cert.metric("qubits_sent", f64::from(uses.qubits));
    cert.metric("cobits_sent", f64::from(uses.cobits));
    cert.metric("cbits_sent", f64::from(uses.cbits));
    cert.require("channel_uses_match", uses == expected);
    cert.check("norm_defect", lab.norm_defect(), Criterion::AtMost(NORM_DRIFT));
}

pub(crate) fn uses(qubits: u32, cobits: u32, cbits: u32) -> ChannelUses {
    ChannelUses { qubits, cobits, cbits }
}

pub(crate) fn fidelity_check(cert: &mut RelationCertificate, name: &str, value: f64, tol: f64) {
    cert.check(name, value, Criterion::AtLeast(1.0 - tol));
}

pub(crate) fn certified(
    cert: &mut RelationCertificate,
    name: &str,
    state: &PureState,
    kind: ResourceKind,
    frame: &FrameAssignment,
    tol: f64,
) {
    let (_, score) = certify_state(state, kind, frame, tol);
    fidelity_check(cert, name, score, tol);
}

pub(crate) fn new_cert(id: &str, lhs: &[(ResourceKind, Amount)], rhs: &[(ResourceKind, Amount)], tol: f64) -> RelationCertificate {
    RelationCertificate::new(id, resources(lhs), resources(rhs), tol, 0, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::frame_conjugate;
    use crate::hilbert::gates;

    #[test]
    fn encoded_gates_are_frame_free() {
        let u = gates::h();
        let enc = encode_gate(&u);
        let conj = frame_conjugate(&enc, 1.234, &ChargeMap::uniform(2), &[0, 1]).unwrap();
        assert!(conj.max_distance(&enc) < 1e-15);
        let zero_l = PureState::from_bits(&[0, 1]).unwrap();
        let out = crate::hilbert::apply_unitary(&zero_l, &enc, &[0, 1]).unwrap();
        assert!((out.amplitude(0b01) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((out.amplitude(0b10) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn encoding_round_trip() {
        for k in 1..=3 {
            for l in 0..1usize << k {
                assert_eq!(decode_index(encode_index(l, k), k), Some(l));
            }
        }
        assert_eq!(decode_index(0b00, 1), None);
        assert_eq!(decode_index(0b11, 1), None);
    }
}
