//! Teleportation through an ebit when Alice and Bob share no frame, with
//! Bob's reference bits used to rescue the `Φ±` outcomes.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::frames::{frame_conjugate_operator, ChargeMap, FrameAssignment, Party};
use crate::hilbert::{gates, Operator, PureState};
use crate::resources::{ebit_state, Amount, Criterion, RelationCertificate, ResourceKind, ResourceVector};
use crate::sampling::{rng_for, sample_index};
use crate::usd::{binomial, ratio_to_f64};

use super::common::{
    alice_local_state, bell_projectors, check_branch_sum, check_frequency, new_cert, ProtocolOutcome, RunConfig,
    NORM_DRIFT,
};
use super::lab::{ChannelUses, Lab};
use super::superdense::Register;

use Party::{Alice, Bob};
use ResourceKind as K;

/// Largest register the branch simulation accepts: the input, the ebit, two
/// cbits (three qubits each) and the register must fit the dense cap.
pub const MAX_TELEPORT_REGISTER: usize = 7;

/// Level of a register basis string: the number of units reading all ones,
/// or `None` when some unit is only partly set.
fn level(index: usize, units: usize, width: usize) -> Option<usize> {
    let mask = (1usize << width) - 1;
    (0..units).try_fold(0usize, |acc, u| {
        match (index >> ((units - 1 - u) * width)) & mask {
            0 => Some(acc),
            m if m == mask => Some(acc + 1),
            _ => None,
        }
    })
}

fn unit_layout(register: Register) -> (usize, usize) {
    match register {
        Register::Refbits(n) => (n as usize, 1),
        Register::Refbit2s(m) => (m as usize, 2),
    }
}

/// Bob's rescue operators on `(B, register...)`. Each pairs `|1>|S_l>` with
/// `|0>|S_{l+s}>` (the two differ by the phase `e^{2iφ_A}`), filters both to
/// the smaller branch count, and maps them to `|0>|J_l>` and `|1>|J_l>` where
/// `J_l` is a string of matching charge. Every operator conserves charge.
pub fn salvage_kraus(register: Register) -> Result<Vec<Operator>> {
    let (units, width) = unit_layout(register);
    let r = units * width;
    if r > MAX_TELEPORT_REGISTER {
        return Err(Error::OutOfRange(format!(
            "register of {r} qubits exceeds {MAX_TELEPORT_REGISTER}"
        )));
    }
    let shift = 2 / width;
    let dim = 1usize << (r + 1);
    let count = |l: usize| -> f64 { binomial(units as u32, l as i64).to_f64().unwrap_or(f64::NAN) };
    let mut out = Vec::new();
    for l in 0..=units {
        if l + shift > units {
            break;
        }
        let (lo, hi) = (count(l), count(l + shift));
        let m = lo.min(hi);
        // J_l: the first `l * width + 1` register qubits set.
        let ones = l * width + 1;
        let j = ((1usize << ones) - 1) << (r - ones);
        let mut data = vec![Complex64::zero(); dim * dim];
        let row0 = j;
        let row1 = (1 << r) | j;
        for s in 0..1usize << r {
            match level(s, units, width) {
                Some(k) if k == l => data[row0 * dim + ((1 << r) | s)] = Complex64::new((m / lo).sqrt() / lo.sqrt(), 0.0),
                Some(k) if k == l + shift => data[row1 * dim + s] = Complex64::new((m / hi).sqrt() / hi.sqrt(), 0.0),
                _ => {}
            }
        }
        out.push(Operator::new(dim, data)?);
    }
    Ok(out)
}

/// Exact rescue probability per `Φ±` outcome: the refbit or refbit(2)
/// unambiguous success.
pub fn salvage_probability(register: Register) -> Result<BigRational> {
    register.usd_success()
}

/// Exact overall success `(1 + P) / 2`.
pub fn teleport_success(register: Register) -> Result<BigRational> {
    let p = salvage_probability(register)?;
    Ok((p + BigRational::from_integer(1.into())) / BigRational::from_integer(2.into()))
}

/// Branches of one teleportation run with the bookkeeping of the channel.
#[derive(Clone, Debug)]
pub struct TeleportRun {
    pub outcomes: Vec<ProtocolOutcome>,
    /// Channel uses counted in each of Alice's branches.
    pub uses: Vec<ChannelUses>,
    pub norm_defect: f64,
    /// Smallest purity of Bob's qubit over the successful branches.
    pub min_purity: f64,
}

/// All heralded branches of the protocol: Alice's Bell outcome, and for
/// `Φ±` Bob's rescue sector. Failed rescues are reported with no state.
pub fn teleport_outcomes(
    a: Complex64,
    b: Complex64,
    register: Register,
    frame: &FrameAssignment,
) -> Result<TeleportRun> {
    let mut lab = Lab::new(*frame);
    let q = lab.fresh(Alice)?;
    lab.local(Alice, &gates::prepare(a, b), &[q])?;
    let pair = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
    let reg = register.add_to(&mut lab)?;
    let (qa, qb) = (pair[0], pair[1]);
    let bob: Vec<usize> = core::iter::once(qb).chain(reg.iter().copied()).collect();
    let kraus = salvage_kraus(register)?;
    let labels = ["phi+", "phi-", "psi+", "psi-"];

    let mut outcomes = Vec::new();
    let mut uses = Vec::new();
    let mut norm_defect = lab.norm_defect();
    let mut min_purity: f64 = 1.0;
    for (idx, (p, branch)) in lab.branches(Alice, &bell_projectors(), &[q, qa])?.into_iter().enumerate() {
        let Some(mut blab) = branch else {
            outcomes.push(outcome(labels[idx], p, None, &lab, false));
            continue;
        };
        for bit in [idx >> 1, idx & 1] {
            let m = blab.fresh(Alice)?;
            if bit == 1 {
                blab.local(Alice, &gates::x(), &[m])?;
            }
            blab.cbit(m)?;
        }
        uses.push(blab.uses());
        if idx >= 2 {
            if idx == 3 {
                blab.local(Bob, &gates::z(), &[qb])?;
            }
            norm_defect = norm_defect.max(blab.norm_defect());
            let s = blab.reduced(&[qb])?;
            min_purity = min_purity.min(purity(&s));
            outcomes.push(outcome(labels[idx], p, Some(pure_of(&s)?), &blab, true));
            continue;
        }
        let mut rescued = 0.0;
        for (l, k) in kraus.iter().enumerate() {
            let mut klab = blab.clone();
            let Ok(pk) = klab.postselect(Bob, k, &bob) else { continue };
            if idx == 1 {
                klab.local(Bob, &gates::z(), &[qb])?;
            }
            norm_defect = norm_defect.max(klab.norm_defect());
            rescued += pk;
            let s = klab.reduced(&[qb])?;
            min_purity = min_purity.min(purity(&s));
            outcomes.push(outcome(&format!("{}/sector{l}", labels[idx]), p * pk, Some(pure_of(&s)?), &klab, true));
        }
        outcomes.push(outcome(&format!("{}/fail", labels[idx]), p * (1.0 - rescued), None, &blab, false));
    }
    Ok(TeleportRun { outcomes, uses, norm_defect, min_purity })
}

fn purity(rho: &crate::hilbert::MixedState) -> f64 {
    let (r00, r11, r10) = (rho.get(0, 0).re, rho.get(1, 1).re, rho.get(1, 0));
    r00 * r00 + r11 * r11 + 2.0 * r10.norm_sqr()
}

/// The dominant eigenvector of a one-qubit state that should be pure.
fn pure_of(rho: &crate::hilbert::MixedState) -> Result<PureState> {
    let (r00, r11, r10) = (rho.get(0, 0).re, rho.get(1, 1).re, rho.get(1, 0));
    if r00 >= r11 {
        PureState::normalized(1, vec![Complex64::new(r00, 0.0), r10])
    } else {
        PureState::normalized(1, vec![r10.conj(), Complex64::new(r11, 0.0)])
    }
}

fn outcome(label: &str, probability: f64, state: Option<PureState>, lab: &Lab, success: bool) -> ProtocolOutcome {
    let produced = if success {
        ResourceVector::new().with(K::Qubit, Amount::int(1))
    } else {
        ResourceVector::new()
    };
    ProtocolOutcome {
        label: label.to_string(),
        probability,
        state,
        layout: lab.layout().clone(),
        produced,
    }
}

fn relation_id(register: Register) -> alloc::string::String {
    match register {
        Register::Refbits(n) => format!("R_TEL_N{n}"),
        Register::Refbit2s(1) => "R_TEL_REFBIT2".to_string(),
        Register::Refbit2s(m) => format!("R_TEL_REFBIT2_M{m}"),
    }
}

/// Teleports `a|0> + b|1>` (in Alice's frame) with `register` on Bob's side.
pub fn run_teleport(
    a: Complex64,
    b: Complex64,
    register: Register,
    frame: &FrameAssignment,
    config: &RunConfig,
) -> Result<RelationCertificate> {
    let tol = config.tolerance;
    let exact = teleport_success(register)?;
    let mut lhs = vec![(K::Ebit, Amount::int(1)), (K::Cbit, Amount::int(2))];
    match register {
        Register::Refbits(0) => {}
        Register::Refbits(n) => lhs.push((K::Refbit, Amount::int(i64::from(n)))),
        Register::Refbit2s(m) => lhs.push((K::Refbit2, Amount::int(i64::from(m)))),
    }
    let id = relation_id(register);
    let mut cert = new_cert(&id, &lhs, &[(K::Qubit, Amount::Exact(exact.clone()))], tol);
    cert.seed = config.seed;
    cert.trials = config.trials;

    let TeleportRun { outcomes, uses, norm_defect, min_purity } = teleport_outcomes(a, b, register, frame)?;
    cert.check("output_purity", min_purity, Criterion::AtLeast(1.0 - tol));
    check_branch_sum(&mut cert, "branch_sum", outcomes.iter().map(|o| o.probability));
    cert.check("norm_defect", norm_defect, Criterion::AtMost(NORM_DRIFT));
    cert.require(
        "two_cbits_per_branch",
        uses.iter().all(|u| *u == ChannelUses { qubits: 0, cobits: 0, cbits: 2 }),
    );

    let target = alice_local_state(frame, a, b)?;
    let mut worst: f64 = 1.0;
    let mut success = 0.0;
    let mut rescued = 0.0;
    for o in &outcomes {
        if let Some(s) = &o.state {
            worst = worst.min(target.inner(s)?.norm_sqr());
            success += o.probability;
            if o.label.starts_with("phi") {
                rescued += o.probability;
            }
        }
    }
    let exact_f = ratio_to_f64(&exact);
    let salvage = ratio_to_f64(&salvage_probability(register)?);
    cert.metric("success_probability_exact", exact_f);
    cert.check("success_probability", success, Criterion::Near { target: exact_f, tolerance: tol });
    cert.check("salvage_per_failed_branch", rescued / 0.5, Criterion::Near { target: salvage, tolerance: tol });
    cert.check("conditional_fidelity", worst, Criterion::AtLeast(1.0 - tol));

    // Bob's rescue is built from his own charge sectors only.
    let (units, width) = unit_layout(register);
    let charges = ChargeMap::uniform(1 + units * width);
    let targets: Vec<usize> = (0..charges.len()).collect();
    let mut drift: f64 = 0.0;
    for k in salvage_kraus(register)? {
        let moved = frame_conjugate_operator(&k, frame.phi_b(), &charges, &targets)?;
        drift = drift.max(moved.max_distance(&k));
    }
    cert.check("salvage_frame_free", drift, Criterion::AtMost(1e-12));

    let probs: Vec<f64> = outcomes.iter().map(|o| o.probability.max(0.0)).collect();
    let mut rng = rng_for(config.seed, &id);
    let hits = (0..config.trials)
        .filter(|_| outcomes[sample_index(&mut rng, &probs)].state.is_some())
        .count() as u64;
    check_frequency(&mut cert, "empirical_success", hits, config.trials, exact_f);
    Ok(cert)
}
