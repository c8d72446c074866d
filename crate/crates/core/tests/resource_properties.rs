use num_complex::Complex64;

use refres_core::frames::{ChargeMap, FrameAssignment, Party, PartyLayout};
use refres_core::hilbert::{entanglement_entropy, fidelity, PureState, QuantumState, UnitaryOp};
use refres_core::resources::{
    accessible_entanglement, canonical_state, certify_state, ebit_state, refbit2_state,
    refbit_state, ResourceKind,
};
use refres_core::sampling::{random_state, rng_for};

#[test]
fn canonical_states_certify_in_every_frame() {
    let mut rng = rng_for(21, "certify");
    let shared = [
        ResourceKind::Ebit,
        ResourceKind::Refbit,
        ResourceKind::Refbit2,
        ResourceKind::EbitL,
    ];
    for _ in 0..50 {
        let frame = FrameAssignment::random(&mut rng);
        for kind in shared {
            for sign in [1.0, -1.0] {
                let (psi, _, _) = canonical_state(kind, &frame, sign).unwrap();
                let (ok, score) = certify_state(&psi, kind, &frame, 1e-12);
                assert!(ok, "{kind} scored {score}");
            }
        }
    }
}

#[test]
fn accessible_entanglement_never_exceeds_entanglement() {
    let mut rng = rng_for(22, "ep-bound");
    for trial in 0..100 {
        let n = 2 + trial % 3;
        let psi = random_state(n, &mut rng).unwrap();
        let owners: Vec<Party> = (0..n)
            .map(|q| if q % 2 == 0 { Party::Alice } else { Party::Bob })
            .collect();
        let layout = PartyLayout::new(owners);
        let alice = layout.qubits_of(Party::Alice);
        let ep = accessible_entanglement(&psi, &layout, &ChargeMap::uniform(n)).unwrap();
        let e = entanglement_entropy(&psi, &alice).unwrap();
        assert!(ep <= e + 1e-10, "{ep} > {e}");
        assert!(ep >= -1e-12);
    }
}

fn n_ebits(n: usize) -> (PureState, PartyLayout) {
    let one = ebit_state(1.0);
    let psi = (1..n).fold(one.clone(), |acc, _| acc.tensor(&one).unwrap());
    let owners = (0..2 * n)
        .map(|q| if q % 2 == 0 { Party::Alice } else { Party::Bob })
        .collect();
    (psi, PartyLayout::new(owners))
}

#[test]
fn accessible_entanglement_of_ebit_copies() {
    let mut totals = Vec::new();
    for n in [1usize, 2, 4, 8] {
        let (psi, layout) = n_ebits(n);
        totals.push(accessible_entanglement(&psi, &layout, &ChargeMap::uniform(2 * n)).unwrap());
    }
    assert!(totals[0].abs() < 1e-12);
    assert!((totals[1] - 0.5).abs() < 1e-12);
    // Independent evaluation: Alice's charge is binomial(n, 1/2); within
    // charge k the state is maximally entangled over C(n, k) terms.
    for (i, n) in [1u32, 2, 4, 8].iter().enumerate() {
        let oracle: f64 = (0..=*n)
            .map(|k| {
                let c = (0..k).fold(1.0, |acc, j| acc * f64::from(n - j) / f64::from(j + 1));
                c / 2f64.powi(*n as i32) * c.log2()
            })
            .sum();
        assert!((totals[i] - oracle).abs() < 1e-10, "n = {n}");
    }
    for w in totals.windows(2) {
        assert!(w[1] >= w[0]);
    }
}

#[test]
fn refbit_forms_differ_by_local_phase_gates() {
    let mut rng = rng_for(23, "refbit-forms");
    for _ in 0..20 {
        let f = FrameAssignment::random(&mut rng);
        let delta = f.phi_b() - f.phi_a();
        let r = UnitaryOp::diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, delta)]);
        let a_form = refbit_state(f.phi_a());
        let moved = a_form.apply_unitary(&r, &[0]).unwrap().apply_unitary(&r, &[1]).unwrap();
        assert!((fidelity(&refbit_state(f.phi_b()), &moved).unwrap() - 1.0).abs() < 1e-12);

        let r2 = UnitaryOp::diagonal(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, 2.0 * delta),
        ]);
        let a2 = refbit2_state(f.phi_a());
        let moved2 = a2.apply_unitary(&r2, &[0, 1]).unwrap().apply_unitary(&r2, &[2, 3]).unwrap();
        assert!((fidelity(&refbit2_state(f.phi_b()), &moved2).unwrap() - 1.0).abs() < 1e-12);
    }
}
