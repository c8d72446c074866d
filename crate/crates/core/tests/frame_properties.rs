use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use refres_core::frames::{
    apply_local_gate, frame_conjugate, number_phase, twirl, twirl_monte_carlo, ChargeMap,
    FrameAssignment, Party, PartyLayout,
};
use refres_core::hilbert::{gates, QuantumState, UnitaryOp};
use refres_core::sampling::{random_state, rng_for};

fn random_unitary_2q(seed: u64) -> UnitaryOp {
    // A product of bare gates interleaved with random diagonal phases.
    let mut rng = rng_for(seed, "unitary");
    let mut u = gates::identity(2);
    for _ in 0..4 {
        let d: Vec<Complex64> = (0..4)
            .map(|_| Complex64::from_polar(1.0, rng.gen::<f64>() * TAU))
            .collect();
        u = UnitaryOp::diagonal(&d)
            .compose(&gates::h().kron(&gates::h()))
            .unwrap()
            .compose(&gates::cnot())
            .unwrap()
            .compose(&u)
            .unwrap();
    }
    u
}

proptest! {
    #[test]
    fn covariance_closes_under_products(phi in 0.0..TAU, s1 in any::<u64>(), s2 in any::<u64>()) {
        let charges = ChargeMap::uniform(2);
        let (u, v) = (random_unitary_2q(s1), random_unitary_2q(s2));
        let lhs = frame_conjugate(&u.compose(&v).unwrap(), phi, &charges, &[0, 1]).unwrap();
        let rhs = frame_conjugate(&u, phi, &charges, &[0, 1]).unwrap()
            .compose(&frame_conjugate(&v, phi, &charges, &[0, 1]).unwrap()).unwrap();
        prop_assert!(lhs.max_distance(&rhs) < 1e-12);
    }

    #[test]
    fn charge_diagonal_gates_are_frame_free(phi in 0.0..TAU, a in 0.0..TAU, b in 0.0..TAU) {
        let charges = ChargeMap::uniform(1);
        let d = UnitaryOp::diagonal(&[Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, b)]);
        let conj = frame_conjugate(&d, phi, &charges, &[0]).unwrap();
        prop_assert!(conj.max_distance(&d) < 1e-15);
    }

    #[test]
    fn number_phase_is_additive(a in 0.0..TAU, b in 0.0..TAU) {
        let charges = ChargeMap::new(vec![1, 2, 1]);
        let pa = number_phase(a, &charges, &[0, 1, 2]).unwrap();
        let pb = number_phase(b, &charges, &[0, 1, 2]).unwrap();
        let pab = number_phase(a + b, &charges, &[0, 1, 2]).unwrap();
        prop_assert!(pa.compose(&pb).unwrap().max_distance(&pab) < 1e-12);
    }

    #[test]
    fn twirl_is_idempotent(seed in any::<u64>()) {
        let mut rng = rng_for(seed, "twirl");
        let rho = random_state(3, &mut rng).unwrap().to_mixed();
        let charges = ChargeMap::new(vec![1, 1, 2]);
        let once = twirl(&rho, &[0, 2], &charges).unwrap();
        let twice = twirl(&once, &[0, 2], &charges).unwrap();
        prop_assert!(once.max_distance(&twice) < 1e-15);
        prop_assert!((once.trace().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn relabelling_the_reference_frame_changes_nothing_observable() {
    // Shifting every frame and the global reference by the same angle maps
    // each local gate sequence to an identical state up to a number phase.
    let mut rng = rng_for(3, "gauge");
    let layout = PartyLayout::new(vec![Party::Alice, Party::Alice, Party::Bob]);
    let charges = ChargeMap::uniform(3);
    for _ in 0..50 {
        let frame = FrameAssignment::random(&mut rng);
        let shift = rng.gen::<f64>() * TAU;
        let shifted = FrameAssignment::new(frame.phi_a() + shift, frame.phi_b() + shift);
        let input = random_state(3, &mut rng).unwrap();
        let rotate = number_phase(shift, &charges, &[0, 1, 2]).unwrap();
        let run = |f: &FrameAssignment, psi: &refres_core::hilbert::PureState| {
            let s = apply_local_gate(psi, &gates::cnot(), &[0, 1], Party::Alice, f, &layout, &charges).unwrap();
            let s = apply_local_gate(&s, &gates::h(), &[0], Party::Alice, f, &layout, &charges).unwrap();
            apply_local_gate(&s, &gates::x(), &[2], Party::Bob, f, &layout, &charges).unwrap()
        };
        let direct = run(&frame, &input).apply_unitary(&rotate, &[0, 1, 2]).unwrap();
        let relabelled = run(&shifted, &input.apply_unitary(&rotate, &[0, 1, 2]).unwrap());
        let overlap = direct.inner(&relabelled).unwrap();
        assert!((overlap - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn sampled_twirl_converges_to_the_exact_average() {
    let mut rng = rng_for(5, "twirl-mc");
    let rho = random_state(2, &mut rng).unwrap().to_mixed();
    let charges = ChargeMap::uniform(2);
    let exact = twirl(&rho, &[1], &charges).unwrap();
    let sampled = twirl_monte_carlo(&rho, &[1], &charges, 10_000, &mut rng).unwrap();
    assert!(exact.max_distance(&sampled) <= 2e-2);
}

#[test]
fn party_cannot_observe_its_own_phase() {
    let mut rng = rng_for(4, "own-phase");
    let layout = PartyLayout::new(vec![Party::Alice, Party::Alice, Party::Bob]);
    let charges = ChargeMap::uniform(3);
    let alice = [0usize, 1];
    for trial in 0..50 {
        let rho = twirl(&random_state(3, &mut rng).unwrap().to_mixed(), &alice, &charges).unwrap();
        let u = random_unitary_2q(trial);
        let at = |phi: f64| {
            let f = FrameAssignment::new(phi, 0.0);
            let out = apply_local_gate(&rho, &u, &alice, Party::Alice, &f, &layout, &charges).unwrap();
            twirl(&out, &alice, &charges).unwrap()
        };
        let (p1, p2) = (rng.gen::<f64>() * TAU, rng.gen::<f64>() * TAU);
        assert!(at(p1).max_distance(&at(p2)) <= 1e-10);
    }
}

#[test]
fn twirl_preserves_positivity_and_commutes_with_number_phases() {
    let mut rng = rng_for(6, "twirl-props");
    let charges = ChargeMap::new(vec![1, 2, 1]);
    for _ in 0..10 {
        let psi = random_state(3, &mut rng).unwrap();
        let rho = refres_core::hilbert::MixedState::mixture(&[(0.3, &psi), (0.7, &random_state(3, &mut rng).unwrap())]).unwrap();
        let t = twirl(&rho, &[0, 1, 2], &charges).unwrap();
        assert!(t.min_eigenvalue() >= -1e-10);
        let d: Vec<Complex64> = (0..8).map(|_| Complex64::from_polar(1.0, rng.gen::<f64>() * TAU)).collect();
        let phases = UnitaryOp::diagonal(&d);
        let a = twirl(&rho.apply_unitary(&phases, &[0, 1, 2]).unwrap(), &[0, 1, 2], &charges).unwrap();
        let b = t.apply_unitary(&phases, &[0, 1, 2]).unwrap();
        assert!(a.max_distance(&b) < 1e-12);
    }
}

#[test]
fn bell_measurement_outcomes_are_uniform_in_any_frame() {
    use refres_core::frames::measure_local;
    use refres_core::hilbert::{Operator, PureState};
    let mut rng = rng_for(8, "bell");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = |v: [f64; 4]| Operator::projector(&PureState::new(2, v.iter().map(|&x| Complex64::new(x * s, 0.0)).collect()).unwrap());
    let family = [
        bell([1.0, 0.0, 0.0, 1.0]),
        bell([1.0, 0.0, 0.0, -1.0]),
        bell([0.0, 1.0, 1.0, 0.0]),
        bell([0.0, 1.0, -1.0, 0.0]),
    ];
    let layout = PartyLayout::new(vec![Party::Alice, Party::Alice, Party::Bob]);
    let ebit = PureState::new(2, vec![Complex64::new(0.0, 0.0), Complex64::new(s, 0.0), Complex64::new(s, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
    for _ in 0..10 {
        let input = random_state(1, &mut rng).unwrap();
        let frame = FrameAssignment::random(&mut rng);
        let joint = input.tensor(&ebit).unwrap();
        let out = measure_local(&joint, Party::Alice, &frame, &layout, &ChargeMap::uniform(3), &[0, 1], &family).unwrap();
        let total: f64 = out.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-10);
        for b in &out {
            assert!((b.probability - 0.25).abs() < 1e-12);
        }
    }
}
