//! Turning ebits into encoded Ebits with a second ebit or refbits, remote
//! preparation of a refbit, and data hiding in an ebit.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::frames::{twirl, ChargeMap, FrameAssignment, Party};
use crate::hilbert::{binary_entropy, entanglement_entropy, gates, trace_distance, Operator, PureState};
use crate::resources::{
    certify_state, ebit_state, logical_ebit_state, refbit_state, Amount, Criterion, RelationCertificate,
    ResourceKind,
};
use crate::sampling::{rng_for, sample_index};
use crate::usd::{binomial, ratio_to_f64, MAX_REGISTER};

use super::common::{
    add_refbit_halves, c, charge_projectors, check_branch_sum, check_frequency, fidelity_check, frame_dependence,
    new_cert, RunConfig, NORM_DRIFT,
};
use super::lab::{ChannelUses, Lab};

use Party::{Alice, Bob};
use ResourceKind as K;

/// Largest refbit count simulated state by state; larger counts use the
/// exact branch table only.
pub const MAX_CONVERSION_SIM: u32 = 6;

/// What accompanies the ebit `|10> + |01>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EbitSource {
    TwoEbits,
    EbitPlusRefbit,
    EbitPlusRefbits(u32),
}

impl EbitSource {
    fn refbits(self) -> u32 {
        match self {
            EbitSource::TwoEbits | EbitSource::EbitPlusRefbit => 1,
            EbitSource::EbitPlusRefbits(n) => n,
        }
    }

    fn relation_id(self) -> &'static str {
        match self {
            EbitSource::TwoEbits => "R_EBITS_EBIT_L",
            EbitSource::EbitPlusRefbit => "R_EBIT_REFBIT_EBIT_L",
            EbitSource::EbitPlusRefbits(_) => "R_EBIT_REFBITS_EBIT_L",
        }
    }
}

/// Bob's outcome `k` (total charge of his `N + 1` qubits).
#[derive(Clone, Debug, PartialEq)]
pub struct ConversionBranch {
    pub charge: u32,
    pub probability: BigRational,
    /// Entanglement of the encoded state left in this branch, in Ebits.
    pub entanglement: f64,
}

/// `p_k = (C(N,k) + C(N,k-1)) / 2^{N+1}` and `E_k = H(C(N,k) / (C(N,k) + C(N,k-1)))`.
pub fn ebit_conversion_branches(n: u32) -> Result<Vec<ConversionBranch>> {
    if n > MAX_REGISTER {
        return Err(Error::OutOfRange(format!("{n} refbits exceeds {MAX_REGISTER}")));
    }
    let denom = BigInt::from(BigUint::one() << (n as usize + 1));
    Ok((0..=n + 1)
        .map(|k| {
            let (now, before) = (binomial(n, i64::from(k)), binomial(n, i64::from(k) - 1));
            let total = &now + &before;
            let share = BigRational::new(BigInt::from(now), BigInt::from(total.clone()));
            ConversionBranch {
                charge: k,
                probability: BigRational::new(BigInt::from(total), denom.clone()),
                entanglement: binary_entropy(share.to_f64().unwrap_or(f64::NAN)),
            }
        })
        .collect())
}

/// Expected Ebits `Σ p_k E_k` from one ebit and `n` refbits.
pub fn ebit_conversion_yield(n: u32) -> Result<f64> {
    Ok(ebit_conversion_branches(n)?
        .iter()
        .map(|b| ratio_to_f64(&b.probability) * b.entanglement)
        .sum())
}

/// Simulated branches `(charge, probability, entanglement, frame dependence,
/// EbitL score)` for a source.
fn simulate_conversion(source: EbitSource, frame: &FrameAssignment) -> Result<(Vec<[f64; 5]>, f64)> {
    let mut lab = Lab::new(*frame);
    let first = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
    let (alice, bob_reg): (Vec<usize>, Vec<usize>) = match source {
        EbitSource::TwoEbits => {
            let second = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
            (alice_pair(first[0], second[0]), alice_pair(first[1], second[1]))
        }
        _ => {
            let reg = add_refbit_halves(&mut lab, source.refbits() as usize)?;
            (alice_pair(first[0], usize::MAX), core::iter::once(first[1]).chain(reg).collect())
        }
    };
    let mut rows = Vec::new();
    let mut norm_defect = lab.norm_defect();
    let branches = lab.branches(Bob, &charge_projectors(bob_reg.len()), &bob_reg)?;
    for (k, (p, branch)) in branches.into_iter().enumerate() {
        let Some(mut blab) = branch else {
            rows.push([k as f64, p, 0.0, 0.0, 0.0]);
            continue;
        };
        let alice_qubits: Vec<usize> = if alice[1] == usize::MAX {
            // Alice encodes her single half next to a fresh qubit.
            let a2 = blab.fresh(Alice)?;
            blab.local(Alice, &gates::x(), &[a2])?;
            blab.local(Alice, &gates::cnot(), &[alice[0], a2])?;
            [alice[0], a2].to_vec()
        } else {
            alice.clone()
        };
        norm_defect = norm_defect.max(blab.norm_defect());
        let state = blab.state();
        let e = entanglement_entropy(state, &alice_qubits)?;
        let owners = blab.layout().as_slice().to_vec();
        let dependence = frame_dependence(&state.to_mixed(), &owners, &ChargeMap::uniform(state.n_qubits()))?;
        let score = if bob_reg.len() == 2 {
            let order: Vec<usize> = alice_qubits.iter().chain(&bob_reg).copied().collect();
            certify_state(&blab.permuted(&order)?, K::EbitL, frame, 1e-9).1
        } else {
            0.0
        };
        rows.push([k as f64, p, e, dependence, score]);
    }
    Ok((rows, norm_defect))
}

fn alice_pair(a: usize, b: usize) -> Vec<usize> {
    [a, b].to_vec()
}

/// One ebit plus a second ebit or refbits to encoded Ebits by Bob's charge
/// measurement; Alice encodes her half when she holds only one qubit.
pub fn run_ebit_to_ebit_l(source: EbitSource, frame: &FrameAssignment, config: &RunConfig) -> Result<RelationCertificate> {
    let tol = config.tolerance;
    let n = source.refbits();
    let oracle = ebit_conversion_branches(n)?;
    let expected = ebit_conversion_yield(n)?;
    let mut lhs = [(K::Ebit, Amount::int(1)), (K::Refbit, Amount::int(i64::from(n)))].to_vec();
    if source == EbitSource::TwoEbits {
        lhs = [(K::Ebit, Amount::int(2))].to_vec();
    }
    let rhs = if n == 1 {
        [(K::EbitL, Amount::ratio(1, 2))].to_vec()
    } else {
        [(K::EbitL, Amount::real(expected))].to_vec()
    };
    let mut cert = new_cert(source.relation_id(), &lhs, &rhs, tol);
    cert.metric("n_refbits", f64::from(n));
    cert.metric("expected_ebit_l_exact", expected);
    check_branch_sum(&mut cert, "oracle_branch_sum", oracle.iter().map(|b| ratio_to_f64(&b.probability)));

    if n > MAX_CONVERSION_SIM {
        cert.metric("simulated", 0.0);
        return Ok(cert);
    }
    let (rows, norm_defect) = simulate_conversion(source, frame)?;
    cert.check("norm_defect", norm_defect, Criterion::AtMost(NORM_DRIFT));
    check_branch_sum(&mut cert, "branch_sum", rows.iter().map(|r| r[1]));
    let mut prob_err: f64 = 0.0;
    let mut ent_err: f64 = 0.0;
    let mut dependence: f64 = 0.0;
    let mut yield_sim = 0.0;
    for (row, b) in rows.iter().zip(&oracle) {
        prob_err = prob_err.max((row[1] - ratio_to_f64(&b.probability)).abs());
        if row[1] > 1e-14 {
            ent_err = ent_err.max((row[2] - b.entanglement).abs());
            dependence = dependence.max(row[3]);
        }
        yield_sim += row[1] * row[2];
    }
    cert.check("branch_probability_error", prob_err, Criterion::AtMost(tol));
    cert.check("branch_entanglement_error", ent_err, Criterion::AtMost(tol.max(1e-9)));
    cert.check("branch_frame_dependence", dependence, Criterion::AtMost(tol));
    cert.check(
        "expected_ebit_l",
        yield_sim,
        Criterion::Near { target: expected, tolerance: tol.max(1e-9) },
    );
    if n == 1 {
        cert.check("maximal_branch_probability", rows[1][1], Criterion::Near { target: 0.5, tolerance: tol });
        cert.check("maximal_branch_ebit_l", rows[1][4], Criterion::AtLeast(1.0 - tol));
    }
    Ok(cert)
}

/// `(1 - yield) · 2N` for one ebit and `N` refbits.
pub fn conversion_deficit_ratio(n: u32) -> Result<f64> {
    Ok((1.0 - ebit_conversion_yield(n)?) * 2.0 * f64::from(n))
}

/// Remote preparation of a refbit: Alice measures her ebit half in her
/// equatorial basis and sends the outcome; Bob flips the phase on `-`.
pub fn run_rsp_refbit(frame: &FrameAssignment, config: &RunConfig) -> Result<RelationCertificate> {
    let tol = config.tolerance;
    let mut cert = new_cert(
        "R_RSP",
        &[(K::Ebit, Amount::int(1)), (K::Cbit, Amount::int(1))],
        &[(K::Refbit, Amount::int(1))],
        tol,
    );
    cert.seed = config.seed;
    cert.trials = config.trials;
    let mut lab = Lab::new(*frame);
    let pair = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let plus = Operator::projector(&PureState::new(1, [c(s), c(s)].to_vec())?);
    let minus = Operator::projector(&PureState::new(1, [c(s), c(-s)].to_vec())?);
    let branches = lab.branches(Alice, &[plus, minus], &[pair[0]])?;
    check_branch_sum(&mut cert, "branch_sum", branches.iter().map(|b| b.0));
    let target = refbit_state(frame.phi_a());
    let mut worst: f64 = 1.0;
    let mut probs = Vec::new();
    for (outcome, (p, branch)) in branches.into_iter().enumerate() {
        probs.push(p);
        cert.check(
            &format!("branch_{outcome}_probability"),
            p,
            Criterion::Near { target: 0.5, tolerance: tol },
        );
        let Some(mut blab) = branch else {
            worst = 0.0;
            continue;
        };
        let m = blab.fresh(Alice)?;
        if outcome == 1 {
            blab.local(Alice, &gates::x(), &[m])?;
        }
        let r = blab.cbit(m)?;
        blab.local(Bob, &gates::cz(), &[r, pair[1]])?;
        let a = blab.fresh(Alice)?;
        blab.local(Alice, &gates::h(), &[a])?;
        worst = worst.min(blab.fidelity_on(&[a, pair[1]], &target)?);
        cert.require(
            &format!("branch_{outcome}_one_cbit"),
            blab.uses() == ChannelUses { qubits: 0, cobits: 0, cbits: 1 },
        );
        cert.check("norm_defect", blab.norm_defect(), Criterion::AtMost(NORM_DRIFT));
    }
    fidelity_check(&mut cert, "refbit_fidelity", worst, tol);
    let mut rng = rng_for(config.seed, "R_RSP");
    let hits = (0..config.trials).filter(|_| sample_index(&mut rng, &probs) == 0).count() as u64;
    check_frequency(&mut cert, "empirical_plus_frequency", hits, config.trials, 0.5);
    Ok(cert)
}

/// Unlocked state for the hidden sign `sign`: Bob's charge-one branch after
/// adding a second ebit (`with_ebit`) or a refbit, with its probability.
pub fn unlock_hidden_bit(sign: f64, with_ebit: bool, frame: &FrameAssignment) -> Result<(f64, PureState)> {
    let mut lab = Lab::new(*frame);
    let pair = lab.add_shared(&ebit_state(sign), &[Alice, Bob], &[1, 1])?;
    let (helper_a, helper_b) = if with_ebit {
        let second = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
        (Some(second[0]), second[1])
    } else {
        (None, add_refbit_halves(&mut lab, 1)?[0])
    };
    let bob = [pair[1], helper_b];
    let p = lab.postselect(Bob, &charge_projectors(2)[1], &bob)?;
    let a2 = match helper_a {
        Some(a) => a,
        None => {
            let a2 = lab.fresh(Alice)?;
            lab.local(Alice, &gates::x(), &[a2])?;
            lab.local(Alice, &gates::cnot(), &[pair[0], a2])?;
            a2
        }
    };
    Ok((p, lab.permuted(&[pair[0], a2, bob[0], bob[1]])?))
}

/// A classical bit hidden in the sign of `|10> ± |01>` is invisible to
/// either party alone and is unlocked half the time by a second ebit or a
/// refbit, as one of two orthogonal encoded Ebits.
pub fn run_data_hiding(frame: &FrameAssignment, config: &RunConfig) -> Result<RelationCertificate> {
    let tol = config.tolerance;
    let mut cert = new_cert(
        "R_DATA_HIDING",
        &[(K::Ebit, Amount::int(2))],
        &[(K::Cbit, Amount::ratio(1, 2))],
        tol,
    );
    cert.seed = config.seed;
    cert.trials = config.trials;
    let (plus, minus) = (ebit_state(1.0).to_mixed(), ebit_state(-1.0).to_mixed());
    let mut local: f64 = 0.0;
    for q in [0usize, 1] {
        let (rp, rm) = (plus.reduced(&[q])?, minus.reduced(&[q])?);
        local = local.max(trace_distance(&rp, &rm)?);
    }
    cert.check("local_distinguishability", local, Criterion::AtMost(tol));
    // Jointly the two signs stay orthogonal even after both phases are averaged.
    let tw = |r: &crate::hilbert::MixedState| -> Result<crate::hilbert::MixedState> {
        let one = twirl(r, &[0], &ChargeMap::uniform(2))?;
        twirl(&one, &[1], &ChargeMap::uniform(2))
    };
    cert.metric("twirled_global_distance", trace_distance(&tw(&plus)?, &tw(&minus)?)?);

    let mut prob = Vec::new();
    for with_ebit in [true, false] {
        let tag = if with_ebit { "ebit" } else { "refbit" };
        let (pp, sp) = unlock_hidden_bit(1.0, with_ebit, frame)?;
        let (pm, sm) = unlock_hidden_bit(-1.0, with_ebit, frame)?;
        prob.push(pp);
        cert.check(&format!("unlock_probability_{tag}"), pp.min(pm), Criterion::Near { target: 0.5, tolerance: tol });
        let f = crate::hilbert::fidelity(&logical_ebit_state(1.0), &sp.to_mixed())?
            .min(crate::hilbert::fidelity(&logical_ebit_state(-1.0), &sm.to_mixed())?);
        fidelity_check(&mut cert, &format!("unlocked_ebit_l_{tag}"), f, tol);
        cert.check(&format!("unlocked_overlap_{tag}"), sp.inner(&sm)?.norm(), Criterion::AtMost(tol));
        let owners = [Alice, Alice, Bob, Bob];
        let d = frame_dependence(&sp.to_mixed(), &owners, &ChargeMap::uniform(4))?
            .max(frame_dependence(&sm.to_mixed(), &owners, &ChargeMap::uniform(4))?);
        cert.check(&format!("unlocked_frame_dependence_{tag}"), d, Criterion::AtMost(tol));
    }
    let mut rng = rng_for(config.seed, "R_DATA_HIDING");
    let p = prob[0];
    let hits = (0..config.trials)
        .filter(|_| sample_index(&mut rng, &[p, 1.0 - p]) == 0)
        .count() as u64;
    check_frequency(&mut cert, "empirical_unlock_frequency", hits, config.trials, 0.5);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_table_examples() {
        assert!((ebit_conversion_yield(1).unwrap() - 0.5).abs() < 1e-15);
        let two = 3.0 * 3f64.log2() / 4.0 - 0.5;
        assert!((ebit_conversion_yield(2).unwrap() - two).abs() < 1e-12);
        let b = ebit_conversion_branches(2).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b[1].probability, BigRational::new(3.into(), 8.into()));
        assert!(ebit_conversion_branches(65).is_err());
    }

    #[test]
    fn certificates_verify() {
        let mut rng = rng_for(12, "conv-unit");
        let config = RunConfig { trials: 2000, ..RunConfig::default() };
        for _ in 0..3 {
            let f = FrameAssignment::random(&mut rng);
            for cert in [
                run_ebit_to_ebit_l(EbitSource::TwoEbits, &f, &config).unwrap(),
                run_ebit_to_ebit_l(EbitSource::EbitPlusRefbit, &f, &config).unwrap(),
                run_ebit_to_ebit_l(EbitSource::EbitPlusRefbits(2), &f, &config).unwrap(),
                run_ebit_to_ebit_l(EbitSource::EbitPlusRefbits(3), &f, &config).unwrap(),
                run_rsp_refbit(&f, &config).unwrap(),
                run_data_hiding(&f, &config).unwrap(),
            ] {
                assert!(cert.is_verified(), "{}: {:?}", cert.relation_id, cert.failed_checks().collect::<Vec<_>>());
            }
        }
    }
}
