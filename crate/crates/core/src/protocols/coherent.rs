//! Protocols that never measure: generation of ebits, refbits and cobits
//! from channels, protocols C1 to C4, coherent superdense coding, and the
//! encoded identity between Qubit + Ebit and two Cobits.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frames::{frame_conjugate, twirl, ChargeMap, FrameAssignment, Party, PartyLayout};
use crate::hilbert::{
    gates, partial_trace, tensor, trace_distance, MixedState, PureState, QuantumState, UnitaryOp,
};
use crate::resources::{
    certify_state, ebit_state, logical_ebit_state, refbit2_state, refbit_state, Amount, Criterion,
    RelationCertificate, ResourceKind,
};

use super::common::{
    alice_local_state, c, certified, e, encode_gate, encode_state, fidelity_check, finish, frame_dependence,
    new_cert, pure_fidelity, uses, NORM_DRIFT,
};
use super::lab::Lab;

use Party::{Alice, Bob};
use ResourceKind as K;

/// Applies one cobit to `state`: the frame-conjugated copy of `src` (owned by
/// Alice) onto the fresh qubit `fresh`.
pub fn cobit_send(
    state: &PureState,
    layout: &PartyLayout,
    charges: &ChargeMap,
    frame: &FrameAssignment,
    src: usize,
    fresh: usize,
) -> Result<PureState> {
    layout.check_owned(Alice, &[src])?;
    let copy = frame_conjugate(&gates::cnot(), frame.phi_a(), charges, &[src, fresh])?;
    state.apply_unitary(&copy, &[src, fresh])
}

/// Applies one cbit: a cobit from `src` into the environment qubit `env`,
/// whose value is copied onto Bob's qubit `bob`; the environment is then
/// traced out. The remaining qubits keep their relative order.
pub fn cbit_send(
    state: &PureState,
    layout: &PartyLayout,
    charges: &ChargeMap,
    frame: &FrameAssignment,
    src: usize,
    env: usize,
    bob: usize,
) -> Result<MixedState> {
    let copied = cobit_send(state, layout, charges, frame, src, env)?;
    let out = copied.apply_unitary(&gates::cnot(), &[env, bob])?;
    let keep: Vec<usize> = (0..state.n_qubits()).filter(|&q| q != env).collect();
    partial_trace(&out.to_mixed(), &keep)
}

/// 1 qubit >= 1 ebit: Alice prepares `|10> + |01>` locally and sends half.
pub fn run_qubit_to_ebit(frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert("R_QUBIT_EBIT", &[(K::Qubit, Amount::int(1))], &[(K::Ebit, Amount::int(1))], tol);
    let mut lab = Lab::new(*frame);
    let a1 = lab.fresh(Alice)?;
    let a2 = lab.fresh(Alice)?;
    lab.local(Alice, &gates::h(), &[a1])?;
    lab.local(Alice, &gates::cnot(), &[a1, a2])?;
    lab.local(Alice, &gates::x(), &[a2])?;
    lab.send(a2, Bob);
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&ebit_state(1.0), &lab.permuted(&[a1, a2])?)?, tol);
    certified(&mut cert, "ebit_certification", &lab.permuted(&[a1, a2])?, K::Ebit, frame, tol);
    finish(&mut cert, &lab, uses(1, 0, 0));
    Ok(cert)
}

/// 1 qubit >= 1 cobit: Alice copies her qubit in her basis and sends the copy.
pub fn run_qubit_to_cobit(a: Complex64, b: Complex64, frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert("R_QUBIT_COBIT", &[(K::Qubit, Amount::int(1))], &[(K::Cobit, Amount::int(1))], tol);
    let mut lab = Lab::new(*frame);
    let qa = lab.fresh(Alice)?;
    lab.local(Alice, &gates::prepare(a, b), &[qa])?;
    let qc = lab.fresh(Alice)?;
    lab.local(Alice, &gates::cnot(), &[qa, qc])?;
    lab.send(qc, Bob);

    let input = alice_local_state(frame, a, b)?;
    let pair = input.tensor(&PureState::basis(1, 0)?)?;
    let layout = PartyLayout::new(vec![Alice, Bob]);
    let expected = cobit_send(&pair, &layout, &ChargeMap::uniform(2), frame, 0, 1)?;
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&expected, &lab.permuted(&[qa, qc])?)?, tol);
    finish(&mut cert, &lab, uses(1, 0, 0));
    Ok(cert)
}

/// 1 cobit >= 1 ebit: `H_A`, a cobit, then `X_A` on Alice's qubit.
pub fn run_cobit_to_ebit(frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert("R_COBIT_EBIT", &[(K::Cobit, Amount::int(1))], &[(K::Ebit, Amount::int(1))], tol);
    let mut lab = Lab::new(*frame);
    let qa = lab.fresh(Alice)?;
    lab.local(Alice, &gates::h(), &[qa])?;
    let qb = lab.cobit(qa)?;
    lab.local(Alice, &gates::x(), &[qa])?;
    let out = lab.permuted(&[qa, qb])?;
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&ebit_state(1.0), &out)?, tol);
    certified(&mut cert, "ebit_certification", &out, K::Ebit, frame, tol);
    finish(&mut cert, &lab, uses(0, 1, 0));
    Ok(cert)
}

/// 1 qubit >= 1 refbit: Alice prepares two equatorial qubits, sends one.
pub fn run_qubit_to_refbit(frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert("R_QUBIT_REFBIT", &[(K::Qubit, Amount::int(1))], &[(K::Refbit, Amount::int(1))], tol);
    let mut lab = Lab::new(*frame);
    let a1 = lab.fresh(Alice)?;
    let a2 = lab.fresh(Alice)?;
    lab.local(Alice, &gates::h(), &[a1])?;
    lab.local(Alice, &gates::h(), &[a2])?;
    lab.send(a2, Bob);
    let out = lab.permuted(&[a1, a2])?;
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&refbit_state(frame.phi_a()), &out)?, tol);
    certified(&mut cert, "refbit_certification", &out, K::Refbit, frame, tol);
    finish(&mut cert, &lab, uses(1, 0, 0));
    Ok(cert)
}

/// 1 qubit + 1 ebit >= 1 refbit(2): `X_A` turns the ebit into
/// `|00> + e^{2iφ_A}|11>`, Alice sends her half, and prepares her own pair.
pub fn run_qubit_ebit_to_refbit2(frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert(
        "R_QUBIT_EBIT_REFBIT2",
        &[(K::Qubit, Amount::int(1)), (K::Ebit, Amount::int(1))],
        &[(K::Refbit2, Amount::int(1))],
        tol,
    );
    let mut lab = Lab::new(*frame);
    let pair = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
    let (qa, qb) = (pair[0], pair[1]);
    lab.local(Alice, &gates::x(), &[qa])?;
    lab.send(qa, Bob);
    let a1 = lab.fresh(Alice)?;
    let a2 = lab.fresh(Alice)?;
    lab.local(Alice, &gates::h(), &[a1])?;
    lab.local(Alice, &gates::cnot(), &[a1, a2])?;
    let out = lab.permuted(&[a1, a2, qa, qb])?;
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&refbit2_state(frame.phi_a()), &out)?, tol);
    certified(&mut cert, "refbit2_certification", &out, K::Refbit2, frame, tol);
    finish(&mut cert, &lab, uses(1, 0, 0));
    Ok(cert)
}

/// Alice's two-qubit step of C1 on `(A1, A)`: `H` on `A`, `CNOT` from `A`
/// onto `A1`, `H` on `A`.
fn c1_alice_gate() -> UnitaryOp {
    let h_on_a = gates::identity(1).kron(&gates::h());
    let cnot_a_to_a1 = gates::swap()
        .compose(&gates::cnot())
        .and_then(|u| u.compose(&gates::swap()))
        .expect("two-qubit gates");
    h_on_a
        .compose(&cnot_a_to_a1)
        .and_then(|u| u.compose(&h_on_a))
        .expect("two-qubit gates")
}

/// Protocol C1, 2 cobits >= 1 qubit + 1 ebit, on Alice's input `a|0> + b|1>`.
pub fn run_c1(a: Complex64, b: Complex64, frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert(
        "R_C1",
        &[(K::Cobit, Amount::int(2))],
        &[(K::Qubit, Amount::int(1)), (K::Ebit, Amount::int(1))],
        tol,
    );
    let mut lab = Lab::new(*frame);
    let qa = lab.fresh(Alice)?;
    lab.local(Alice, &gates::prepare(a, b), &[qa])?;
    let qa1 = lab.fresh(Alice)?;
    let qb = lab.cobit(qa)?;
    lab.local(Alice, &c1_alice_gate(), &[qa1, qa])?;
    let qb1 = lab.cobit(qa1)?;
    lab.local(Bob, &gates::cz(), &[qb1, qb])?;
    // Alice turns her two qubits plus Bob's B1 into an ebit and a blank.
    lab.local(Alice, &gates::h(), &[qa])?;
    lab.local(Alice, &gates::cnot(), &[qa1, qa])?;
    lab.local(Alice, &gates::x(), &[qa1])?;

    let input = alice_local_state(frame, a, b)?;
    let target = tensor(&[&ebit_state(1.0), &PureState::basis(1, 0)?, &input])?;
    let out = lab.permuted(&[qa1, qb1, qa, qb])?;
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&target, &out)?, tol);
    fidelity_check(&mut cert, "received_qubit_fidelity", lab.fidelity_on(&[qb], &input)?, tol);
    certified(&mut cert, "ebit_certification", &lab.factor(&[qa1, qb1])?, K::Ebit, frame, tol);
    finish(&mut cert, &lab, uses(0, 2, 0));
    Ok(cert)
}

/// Protocol C2, 1 cobit + 1 qubit >= 1 Qubit: Bob ends with `a|0_L> + b|1_L>`
/// on the pair (his cobit copy, Alice's sent qubit).
pub fn run_c2(a: Complex64, b: Complex64, frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert(
        "R_C2",
        &[(K::Cobit, Amount::int(1)), (K::Qubit, Amount::int(1))],
        &[(K::QubitL, Amount::int(1))],
        tol,
    );
    let mut lab = Lab::new(*frame);
    let qa = lab.fresh(Alice)?;
    lab.local(Alice, &gates::prepare(a, b), &[qa])?;
    let qb = lab.cobit(qa)?;
    lab.local(Alice, &gates::x(), &[qa])?;
    lab.send(qa, Bob);

    let logical = encode_state(&PureState::qubit(a, b)?);
    let out = lab.permuted(&[qb, qa])?;
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&logical, &out)?, tol);
    certified(&mut cert, "qubit_l_certification", &out, K::QubitL, frame, tol);
    let dependence = frame_dependence(&out.to_mixed(), &[Bob, Bob], &ChargeMap::uniform(2))?;
    cert.check("frame_dependence", dependence, Criterion::AtMost(tol));
    finish(&mut cert, &lab, uses(1, 1, 0));
    Ok(cert)
}

/// Protocol C3, 1 cobit + 1 refbit >= 1 Ebit. The refbit is taken in its
/// `φ_B` form; Alice's pair is `(A, A')`, Bob's is `(B', B)`.
pub fn run_c3(frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert(
        "R_C3",
        &[(K::Cobit, Amount::int(1)), (K::Refbit, Amount::int(1))],
        &[(K::EbitL, Amount::int(1))],
        tol,
    );
    let mut lab = Lab::new(*frame);
    let pair = lab.add_shared(&refbit_state(frame.phi_b()), &[Alice, Bob], &[1, 1])?;
    let (qa, qb) = (pair[0], pair[1]);
    let qb2 = lab.cobit(qa)?;
    // Intermediate: |00> + e^{i(φ_A+φ_B)}|11> on (A, B'), Bob's refbit half aside.
    let mid = PureState::normalized(2, vec![c(1.0), c(0.0), c(0.0), e(frame.phi_a() + frame.phi_b())])?;
    fidelity_check(&mut cert, "intermediate_fidelity", lab.fidelity_on(&[qa, qb2], &mid)?, tol);

    lab.local(Bob, &gates::h(), &[qb])?;
    let qa2 = lab.fresh(Alice)?;
    lab.local(Alice, &gates::x(), &[qa2])?;
    lab.local(Alice, &gates::cnot(), &[qa, qa2])?;
    lab.local(Bob, &gates::cnot(), &[qb2, qb])?;
    lab.local(Bob, &gates::x(), &[qb2])?;

    let out = lab.permuted(&[qa, qa2, qb2, qb])?;
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&logical_ebit_state(1.0), &out)?, tol);
    certified(&mut cert, "ebit_l_certification", &out, K::EbitL, frame, tol);
    let dependence = frame_dependence(&out.to_mixed(), &[Alice, Alice, Bob, Bob], &ChargeMap::uniform(4))?;
    cert.check("frame_dependence", dependence, Criterion::AtMost(tol));
    finish(&mut cert, &lab, uses(0, 1, 0));
    Ok(cert)
}

/// Both parties encode their ebit half with a fresh qubit, using no channel:
/// the result is `e^{iφ_A}|0_L 1_L> + e^{iφ_B}|1_L 0_L>` on (Alice pair, Bob pair).
pub fn ebit_encoded_locally(frame: &FrameAssignment) -> Result<PureState> {
    let mut lab = Lab::new(*frame);
    let pair = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
    let (qa, qb) = (pair[0], pair[1]);
    let qa2 = lab.fresh(Alice)?;
    let qb2 = lab.fresh(Bob)?;
    lab.local(Alice, &gates::x(), &[qa2])?;
    lab.local(Alice, &gates::cnot(), &[qa, qa2])?;
    lab.local(Bob, &gates::x(), &[qb2])?;
    lab.local(Bob, &gates::cnot(), &[qb, qb2])?;
    lab.permuted(&[qa, qa2, qb, qb2])
}

/// Protocol C4, 1 cobit + 1 ebit >= 1 Ebit. Also confirms that local
/// encoding of the ebit alone does not give an Ebit.
pub fn run_c4(frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert(
        "R_C4",
        &[(K::Cobit, Amount::int(1)), (K::Ebit, Amount::int(1))],
        &[(K::EbitL, Amount::int(1))],
        tol,
    );
    let mut lab = Lab::new(*frame);
    let pair = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
    let (qa, qb) = (pair[0], pair[1]);
    let qb2 = lab.cobit(qa)?;
    let qa2 = lab.fresh(Alice)?;
    lab.local(Alice, &gates::x(), &[qa2])?;
    lab.local(Alice, &gates::cnot(), &[qa, qa2])?;

    let out = lab.permuted(&[qa, qa2, qb, qb2])?;
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&logical_ebit_state(1.0), &out)?, tol);
    certified(&mut cert, "ebit_l_certification", &out, K::EbitL, frame, tol);
    let owners = [Alice, Alice, Bob, Bob];
    let dependence = frame_dependence(&out.to_mixed(), &owners, &ChargeMap::uniform(4))?;
    cert.check("frame_dependence", dependence, Criterion::AtMost(tol));

    // Encoding both halves locally picks up the relative phase of the two
    // frames, so the result is an Ebit only when the frames happen to agree.
    let local_only = ebit_encoded_locally(frame)?;
    let (_, score) = certify_state(&local_only, K::EbitL, frame, tol);
    cert.metric("local_only_score", score);
    let shifted = FrameAssignment::new(frame.phi_a(), frame.phi_b() + core::f64::consts::PI);
    let overlap = pure_fidelity(&local_only, &ebit_encoded_locally(&shifted)?)?;
    cert.check("local_only_frame_overlap", overlap, Criterion::AtMost(tol));
    finish(&mut cert, &lab, uses(0, 1, 0));
    Ok(cert)
}

/// Alice's conditional Pauli of coherent superdense coding, indexed by the
/// ancilla pair: `00 -> X`, `01 -> Z`, `10 -> I`, `11 -> ZX` (before frame
/// conjugation).
pub fn superdense_encoder() -> UnitaryOp {
    gates::multiplexed(&[gates::x(), gates::z(), gates::identity(1), gates::zx()])
}

/// The full state `(A1, A2, A, B)` after Alice encodes ancilla bits `bits`
/// into the ebit `|10> + |01>` and sends `A`.
pub fn coherent_superdense_outcome(bits: [u8; 2], frame: &FrameAssignment) -> Result<PureState> {
    let mut lab = Lab::new(*frame);
    let anc = lab.add(Alice, &PureState::from_bits(&bits)?)?;
    let pair = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
    lab.local(Alice, &superdense_encoder(), &[anc[0], anc[1], pair[0]])?;
    lab.send(pair[0], Bob);
    Ok(lab.state().clone())
}

/// Bob's frame-free rotation on the charge-one pair: `|01> - |10>` to
/// `|0_L>` and `|01> + |10>` to `|1_L>`.
fn superdense_decoder() -> UnitaryOp {
    let s = FRAC_1_SQRT_2;
    encode_gate(&UnitaryOp::new(2, vec![c(s), c(-s), c(s), c(s)]).expect("orthogonal"))
}

/// Coherent superdense coding, 1 qubit + 1 ebit >= 1 Cobit, on the logical
/// ancilla `a|0_L> + b|1_L>`.
pub fn run_coherent_superdense(a: Complex64, b: Complex64, frame: &FrameAssignment, tol: f64) -> Result<RelationCertificate> {
    let mut cert = new_cert(
        "R_SDC_COHERENT",
        &[(K::Qubit, Amount::int(1)), (K::Ebit, Amount::int(1))],
        &[(K::CobitL, Amount::int(1))],
        tol,
    );
    let mut lab = Lab::new(*frame);
    let anc = lab.add(Alice, &encode_state(&PureState::qubit(a, b)?))?;
    let pair = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
    lab.local(Alice, &superdense_encoder(), &[anc[0], anc[1], pair[0]])?;
    lab.send(pair[0], Bob);
    lab.local(Bob, &superdense_decoder(), &[pair[0], pair[1]])?;

    // a|0_L>|0_L> + b|1_L>|1_L> on (ancilla pair, Bob's pair).
    let logical = PureState::new(2, vec![a, c(0.0), c(0.0), b]).map_err(|_| Error::NotNormalized(a.norm_sqr() + b.norm_sqr()))?;
    let target = encode_state(&logical);
    let out = lab.permuted(&[anc[0], anc[1], pair[0], pair[1]])?;
    fidelity_check(&mut cert, "fidelity", pure_fidelity(&target, &out)?, tol);
    let owners = [Alice, Alice, Bob, Bob];
    let dependence = frame_dependence(&out.to_mixed(), &owners, &ChargeMap::uniform(4))?;
    cert.check("frame_dependence", dependence, Criterion::AtMost(tol));

    // The four basis messages against their listed outcomes.
    let (pa, s) = (frame.phi_a(), FRAC_1_SQRT_2);
    let listed: [([u8; 2], [Complex64; 4]); 4] = [
        ([1, 0], [c(0.0), c(s), c(s), c(0.0)]),
        ([0, 1], [c(0.0), c(s), c(-s), c(0.0)]),
        ([0, 0], [e(-pa) * s, c(0.0), c(0.0), e(pa) * s]),
        ([1, 1], [e(-pa) * s, c(0.0), c(0.0), -e(pa) * s]),
    ];
    let mut worst: f64 = 1.0;
    let mut bob_views = Vec::new();
    for (bits, amps) in &listed {
        let pair_state = PureState::new(2, amps.to_vec())?;
        let expected = PureState::from_bits(bits)?.tensor(&pair_state)?;
        let got = coherent_superdense_outcome(*bits, frame)?;
        worst = worst.min(pure_fidelity(&expected, &got)?);
        bob_views.push(got.reduced(&[2, 3])?);
    }
    fidelity_check(&mut cert, "table_fidelity", worst, tol);
    let twirled: Vec<MixedState> = bob_views[2..]
        .iter()
        .map(|r| twirl(r, &[0, 1], &ChargeMap::uniform(2)))
        .collect::<Result<_>>()?;
    let dropped = trace_distance(&twirled[0], &twirled[1])?;
    cert.check("dropped_bit_distance", dropped, Criterion::AtMost(tol));
    finish(&mut cert, &lab, uses(1, 0, 0));
    Ok(cert)
}

/// Encoded C1 (2 Cobits >= 1 Qubit + 1 Ebit) and encoded coherent superdense
/// coding (1 Qubit + 1 Ebit >= 2 Cobits), both simulated on physical pairs
/// with frame-conjugated logical gates.
pub fn run_encoded_identity(
    input: &PureState,
    ancillas: &PureState,
    frame: &FrameAssignment,
    tol: f64,
) -> Result<RelationCertificate> {
    let mut cert = new_cert(
        "R_ENCODED_IDENTITY",
        &[(K::QubitL, Amount::int(1)), (K::EbitL, Amount::int(1))],
        &[(K::CobitL, Amount::int(2))],
        tol,
    );
    let zero = PureState::basis(1, 0)?;
    let g = |u: UnitaryOp| encode_gate(&u);

    // Encoded C1; logical registers are pairs of physical qubits.
    let mut lab = Lab::new(*frame);
    let la = lab.add(Alice, &encode_state(input))?;
    let la1 = lab.add(Alice, &encode_state(&zero))?;
    let lb = lab.add(Alice, &encode_state(&zero))?;
    let lb1 = lab.add(Alice, &encode_state(&zero))?;
    let cat = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
    lab.local(Alice, &g(gates::cnot()), &cat(&la, &lb))?;
    for &q in &lb {
        lab.reassign(q, Bob);
    }
    lab.local(Alice, &g(c1_alice_gate()), &cat(&la1, &la))?;
    lab.local(Alice, &g(gates::cnot()), &cat(&la1, &lb1))?;
    for &q in &lb1 {
        lab.reassign(q, Bob);
    }
    lab.local(Bob, &g(gates::cz()), &cat(&lb1, &lb))?;
    lab.local(Alice, &g(gates::h()), &la)?;
    lab.local(Alice, &g(gates::cnot()), &cat(&la1, &la))?;
    lab.local(Alice, &g(gates::x()), &la1)?;
    let order: Vec<usize> = [la1.clone(), lb1.clone(), la.clone(), lb.clone()].concat();
    let target = tensor(&[&logical_ebit_state(1.0), &encode_state(&zero), &encode_state(input)])?;
    fidelity_check(&mut cert, "encoded_c1_fidelity", pure_fidelity(&target, &lab.permuted(&order)?)?, tol);
    cert.check("encoded_c1_norm_defect", lab.norm_defect(), Criterion::AtMost(NORM_DRIFT));

    // Encoded superdense coding with two logical ancillas.
    let mut lab = Lab::new(*frame);
    let anc = lab.add(Alice, &encode_state(ancillas))?;
    let ebit = lab.add_shared(&logical_ebit_state(1.0), &[Alice, Alice, Bob, Bob], &[1; 4])?;
    let (ea, eb) = (ebit[..2].to_vec(), ebit[2..].to_vec());
    let paulis = [gates::identity(1), gates::z(), gates::x(), gates::zx()];
    lab.local(Alice, &g(gates::multiplexed(&paulis)), &cat(&anc, &ea))?;
    for &q in &ea {
        lab.send(q, Bob);
    }
    // Bob maps each of the four logical Bell states back to the message.
    let psi_plus = PureState::new(2, vec![c(0.0), c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(0.0)])?;
    let mut rows = vec![c(0.0); 16];
    for (k, p) in paulis.iter().enumerate() {
        // The encoder acted on the first logical qubit only.
        let image = psi_plus.apply_unitary(&p.kron(&gates::identity(1)), &[0, 1])?;
        for col in 0..4 {
            rows[k * 4 + col] = image.amplitude(col).conj();
        }
    }
    let decoder = UnitaryOp::new(4, rows)?;
    lab.local(Bob, &g(decoder), &cat(&ea, &eb))?;
    let order: Vec<usize> = [anc.clone(), ea.clone(), eb.clone()].concat();
    let mut copied = vec![c(0.0); 16];
    for (k, amp) in ancillas.amplitudes().iter().enumerate() {
        copied[k * 4 + k] = *amp;
    }
    let target = encode_state(&PureState::new(4, copied)?);
    fidelity_check(&mut cert, "encoded_superdense_fidelity", pure_fidelity(&target, &lab.permuted(&order)?)?, tol);
    cert.check("encoded_superdense_norm_defect", lab.norm_defect(), Criterion::AtMost(NORM_DRIFT));
    cert.metric("qubit_l_sent", (ea.len() / 2) as f64);
    Ok(cert)
}
