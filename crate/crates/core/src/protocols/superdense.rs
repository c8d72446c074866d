//! Incoherent superdense coding without a shared frame, with and without
//! reference bits, and its two-copy and catalytic variants.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::frames::{ChargeMap, FrameAssignment, Party};
use crate::hilbert::{binary_entropy, gates, Operator, PureState, UnitaryOp};
use crate::resources::{ebit_state, refbit2_state, Amount, Criterion, RelationCertificate, ResourceKind};
use crate::sampling::{rng_for, sample_index};
use crate::usd::{pn_closed_form, ratio_to_f64, sector_usd_outcomes, usd_refbit2_assisted, usd_refbit_assisted};

use super::common::{
    add_refbit2_halves, add_refbit_halves, c, check_branch_sum, check_frequency, new_cert, RunConfig,
    NORM_DRIFT,
};
use super::lab::Lab;

use Party::{Alice, Bob};
use ResourceKind as K;

/// What Bob holds next to the ebit half.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Register {
    Refbits(u32),
    Refbit2s(u32),
}

impl Register {
    /// Exact unambiguous success for the `X` / `ZX` pair.
    pub fn usd_success(self) -> Result<BigRational> {
        Ok(match self {
            Register::Refbits(n) => usd_refbit_assisted(n)?.success_probability,
            Register::Refbit2s(m) => usd_refbit2_assisted(m)?.success_probability,
        })
    }

    pub(crate) fn add_to(self, lab: &mut Lab) -> Result<Vec<usize>> {
        match self {
            Register::Refbits(n) => add_refbit_halves(lab, n as usize),
            Register::Refbit2s(m) => add_refbit2_halves(lab, m as usize),
        }
    }
}

/// `H(p) + (1 - P) p + P` cbits per use.
pub fn superdense_rate(p: f64, usd_success: f64) -> f64 {
    binary_entropy(p) + (1.0 - usd_success) * p + usd_success
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p} must lie in [0, 1]")));
    }
    Ok(())
}

/// Bob's register `(sent qubit, ebit half, register...)` after Alice applies
/// `op` in her frame to her ebit half and sends it.
pub fn superdense_message_state(op: &UnitaryOp, register: Register, frame: &FrameAssignment) -> Result<(PureState, f64)> {
    let mut lab = Lab::new(*frame);
    let pair = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
    let reg = register.add_to(&mut lab)?;
    lab.local(Alice, op, &[pair[0]])?;
    lab.send(pair[0], Bob);
    let order: Vec<usize> = pair.iter().chain(&reg).copied().collect();
    Ok((lab.permuted(&order)?, lab.norm_defect()))
}

/// Weight of `state` on odd total charge of its first two qubits.
fn odd_flag_weight(state: &PureState) -> f64 {
    let n = state.n_qubits();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| ((i >> (n - 1)) ^ (i >> (n - 2))) & 1 == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Decoding statistics for the four messages `I, Z, X_A, ZX_A`.
struct Decoding {
    /// Smallest probability that Bob's flag-parity test sorts a message right.
    parity_separation: f64,
    /// `|<I|Z>|`.
    iz_overlap: f64,
    /// `[correct, wrong, inconclusive]` for the `X_A` and `ZX_A` inputs.
    x_outcomes: [[f64; 3]; 2],
    norm_defect: f64,
}

fn decode(register: Register, frame: &FrameAssignment) -> Result<Decoding> {
    let ops = [gates::identity(1), gates::z(), gates::x(), gates::zx()];
    let mut states = Vec::with_capacity(4);
    let mut norm_defect: f64 = 0.0;
    for op in &ops {
        let (s, d) = superdense_message_state(op, register, frame)?;
        norm_defect = norm_defect.max(d);
        states.push(s);
    }
    let parity_separation = [
        odd_flag_weight(&states[0]),
        odd_flag_weight(&states[1]),
        1.0 - odd_flag_weight(&states[2]),
        1.0 - odd_flag_weight(&states[3]),
    ]
    .into_iter()
    .fold(1.0, f64::min);
    let iz_overlap = states[0].inner(&states[1])?.norm();
    let charges = ChargeMap::uniform(states[2].n_qubits());
    let for_x = sector_usd_outcomes(&states[2], &states[3], &states[2], &charges)?;
    let for_zx = sector_usd_outcomes(&states[2], &states[3], &states[3], &charges)?;
    Ok(Decoding {
        parity_separation,
        iz_overlap,
        x_outcomes: [for_x, [for_zx[1], for_zx[0], for_zx[2]]],
        norm_defect,
    })
}

fn superdense_cert(
    id: &str,
    register: Register,
    p: f64,
    frame: &FrameAssignment,
    config: &RunConfig,
) -> Result<RelationCertificate> {
    check_p(p)?;
    let tol = config.tolerance;
    let exact = register.usd_success()?;
    let pn = ratio_to_f64(&exact);
    let rate = superdense_rate(p, pn);

    let mut lhs = vec![(K::Qubit, Amount::int(1)), (K::Ebit, Amount::int(1))];
    let mut rhs = vec![(K::Cbit, Amount::real(rate))];
    // With no register the X-type message is a single known state, which
    // Bob keeps as a refbit(2).
    let three_messages = register == Register::Refbits(0);
    match register {
        Register::Refbits(0) => rhs.push((K::Refbit2, Amount::real(1.0 - p))),
        Register::Refbits(n) => {
            lhs.push((K::Refbit, Amount::int(i64::from(n))));
            rhs.push((K::Refbit, Amount::real(p * f64::from(n))));
        }
        Register::Refbit2s(m) => {
            lhs.push((K::Refbit2, Amount::int(i64::from(m))));
            rhs.push((K::Refbit2, Amount::real(p * f64::from(m))));
        }
    }
    let mut cert = new_cert(id, &lhs, &rhs, tol);
    cert.seed = config.seed;
    cert.trials = config.trials;
    cert.metric("p", p);
    cert.metric("usd_success_exact", pn);
    cert.metric("rate_cbits", rate);
    if let Some(a) = rhs.get(1) {
        cert.metric("leftover", a.1.to_f64());
    }

    let d = decode(register, frame)?;
    cert.check("flag_parity_separation", d.parity_separation, Criterion::AtLeast(1.0 - tol));
    cert.check("iz_overlap", d.iz_overlap, Criterion::AtMost(tol));
    cert.check("norm_defect", d.norm_defect, Criterion::AtMost(NORM_DRIFT));
    for (name, o) in ["x", "zx"].iter().zip(&d.x_outcomes) {
        check_branch_sum(&mut cert, &format!("{name}_branch_sum"), o.iter().copied());
        cert.check(&format!("{name}_wrong_guess"), o[1], Criterion::AtMost(tol));
        if !three_messages {
            cert.check(
                &format!("{name}_usd_success"),
                o[0],
                Criterion::Near { target: pn, tolerance: tol },
            );
        }
    }

    // Seeded run of the message ensemble through Bob's decoder.
    let probs = if three_messages {
        vec![p / 2.0, p / 2.0, 1.0 - p, 0.0]
    } else {
        vec![p / 2.0, p / 2.0, (1.0 - p) / 2.0, (1.0 - p) / 2.0]
    };
    let mut rng = rng_for(config.seed, id);
    let (mut x_draws, mut x_hits, mut errors) = (0u64, 0u64, 0u64);
    for _ in 0..config.trials {
        let m = sample_index(&mut rng, &probs);
        if m >= 2 && !three_messages {
            x_draws += 1;
            match sample_index(&mut rng, &d.x_outcomes[m - 2]) {
                0 => x_hits += 1,
                1 => errors += 1,
                _ => {}
            }
        }
    }
    if !three_messages {
        check_frequency(&mut cert, "empirical_usd_success", x_hits, x_draws, pn);
    }
    cert.require("no_wrong_decodings", errors == 0);
    Ok(cert)
}

/// Superdense coding with `n` refbits on Bob's side: `I, Z` with probability
/// `p/2` each, `X_A, ZX_A` with `(1-p)/2` each. For `n = 0` Alice uses only
/// `I, Z, X_A` and Bob keeps the `X_A` outcome as a refbit(2).
pub fn run_incoherent_superdense(n: u32, p: f64, frame: &FrameAssignment, config: &RunConfig) -> Result<RelationCertificate> {
    let id = if n == 0 { "R_SDC_N0" } else { "R_SDC_TRADEOFF" };
    let mut cert = superdense_cert(id, Register::Refbits(n), p, frame, config)?;
    cert.metric("n_refbits", f64::from(n));
    Ok(cert)
}

/// Two refbits become one refbit(2) when Bob finds even charge on his two
/// halves; Alice prepares her half locally.
pub fn run_refbit2_generation(frame: &FrameAssignment, config: &RunConfig) -> Result<RelationCertificate> {
    let tol = config.tolerance;
    let mut cert = new_cert(
        "R_REFBIT2_FROM_REFBITS",
        &[(K::Refbit, Amount::int(2))],
        &[(K::Refbit2, Amount::ratio(1, 2))],
        tol,
    );
    let mut lab = Lab::new(*frame);
    let halves = add_refbit_halves(&mut lab, 2)?;
    let even = Operator::diagonal(&[c(1.0), c(0.0), c(0.0), c(1.0)]);
    let odd = Operator::diagonal(&[c(0.0), c(1.0), c(1.0), c(0.0)]);
    let branches = lab.branches(Bob, &[even, odd], &halves)?;
    check_branch_sum(&mut cert, "parity_branch_sum", branches.iter().map(|b| b.0));
    cert.check(
        "generation_probability",
        branches[0].0,
        Criterion::Near { target: 0.5, tolerance: tol },
    );
    if let (_, Some(mut lab)) = branches[0].clone() {
        let a1 = lab.fresh(Alice)?;
        let a2 = lab.fresh(Alice)?;
        lab.local(Alice, &gates::h(), &[a1])?;
        lab.local(Alice, &gates::cnot(), &[a1, a2])?;
        let order = [a1, a2, halves[0], halves[1]];
        let f = lab.fidelity_on(&order, &refbit2_state(frame.phi_a()))?;
        cert.check("generated_refbit2_fidelity", f, Criterion::AtLeast(1.0 - tol));
    } else {
        cert.require("generated_refbit2_fidelity", false);
    }
    Ok(cert)
}

/// Superdense coding with one refbit(2) on Bob's side, together with the
/// generation of that refbit(2) from two refbits.
pub fn run_superdense_refbit2(p: f64, frame: &FrameAssignment, config: &RunConfig) -> Result<RelationCertificate> {
    let mut cert = superdense_cert("R_SDC_REFBIT2", Register::Refbit2s(1), p, frame, config)?;
    cert.absorb(&run_refbit2_generation(frame, config)?);
    Ok(cert)
}

/// Golden-section maximum of the trade-off for `n` refbits, cross-checked by
/// a 10^4-point grid and the stationary point `log2((1-p)/p) = -(1-P)`.
/// Returns `(p_star, rate_star)`.
pub fn optimize_tradeoff(n: u32) -> Result<(f64, f64)> {
    let pn = ratio_to_f64(&usd_refbit_assisted(n)?.success_probability);
    let f = |p: f64| superdense_rate(p, pn);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-9 {
        let x1 = hi - ratio * (hi - lo);
        let x2 = lo + ratio * (hi - lo);
        if f(x1) < f(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let p_star = (lo + hi) / 2.0;
    Ok((p_star, f(p_star)))
}

/// Stationary point `1 / (1 + 2^{P-1})` of the trade-off.
pub fn tradeoff_stationary_point(usd_success: f64) -> f64 {
    1.0 / (1.0 + (usd_success - 1.0).exp2())
}

/// Best grid point of the trade-off on `points + 1` equally spaced values.
pub fn tradeoff_grid_max(n: u32, points: usize) -> Result<(f64, f64)> {
    let pn = ratio_to_f64(&usd_refbit_assisted(n)?.success_probability);
    Ok((0..=points)
        .map(|i| {
            let p = i as f64 / points as f64;
            (p, superdense_rate(p, pn))
        })
        .fold((0.0, f64::NEG_INFINITY), |best, x| if x.1 > best.1 { x } else { best }))
}

/// The trade-off at `n` refbits, its optimum and monotonicity in `n`.
pub fn run_superdense_tradeoff(frame: &FrameAssignment, config: &RunConfig) -> Result<RelationCertificate> {
    let tol = config.tolerance;
    let mut cert = run_incoherent_superdense(2, 2.0 / 3.0, frame, config)?;
    let log3 = 3f64.log2();
    cert.check(
        "rate_at_two_thirds",
        cert.get("rate_cbits").unwrap_or(f64::NAN),
        Criterion::Near { target: log3 + 1.0 / 12.0, tolerance: 1e-12 },
    );
    let (p_star, rate_star) = optimize_tradeoff(2)?;
    cert.metric("p_star", p_star);
    cert.metric("rate_star", rate_star);
    let stationary = tradeoff_stationary_point(0.25);
    cert.check("optimizer_vs_stationary", (p_star - stationary).abs(), Criterion::AtMost(1e-6));
    let (_, grid_rate) = tradeoff_grid_max(2, 10_000)?;
    cert.check("optimizer_vs_grid", rate_star - grid_rate, Criterion::AtLeast(-tol));
    let mut last = f64::NEG_INFINITY;
    let mut monotone = true;
    for n in (0..=24).step_by(2) {
        let (_, r) = optimize_tradeoff(n)?;
        monotone &= r >= last - 1e-12;
        last = r;
    }
    cert.require("optimal_rate_monotone_in_n", monotone);
    Ok(cert)
}

/// The base case at `N = 0`: `log2 3` cbits and 1/3 refbit(2) at `p = 2/3`.
pub fn run_superdense_base(frame: &FrameAssignment, config: &RunConfig) -> Result<RelationCertificate> {
    let mut cert = run_incoherent_superdense(0, 2.0 / 3.0, frame, config)?;
    cert.check(
        "rate_is_log2_3",
        cert.get("rate_cbits").unwrap_or(f64::NAN),
        Criterion::Near { target: 3f64.log2(), tolerance: 1e-12 },
    );
    Ok(cert)
}

/// Two-copy superdense coding: on the second copy `X_A` and `Y_A` each take
/// probability 1/6, and `X_A X_A` is told apart from `X_A Y_A` half the time.
pub fn run_double_superdense(frame: &FrameAssignment, config: &RunConfig) -> Result<RelationCertificate> {
    let tol = config.tolerance;
    let log3 = 3f64.log2();
    let mut cert = new_cert(
        "R_SDC_DOUBLE",
        &[(K::Qubit, Amount::int(2)), (K::Ebit, Amount::int(2))],
        &[(K::Cbit, Amount::real(2.0 * log3 + 1.0 / 18.0)), (K::Refbit2, Amount::ratio(2, 9))],
        tol,
    );
    cert.seed = config.seed;
    cert.trials = config.trials;

    let candidate = |second: &UnitaryOp| -> Result<(PureState, f64)> {
        let mut lab = Lab::new(*frame);
        let p1 = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
        let p2 = lab.add_shared(&ebit_state(1.0), &[Alice, Bob], &[1, 1])?;
        lab.local(Alice, &gates::x(), &[p1[0]])?;
        lab.local(Alice, second, &[p2[0]])?;
        lab.send(p1[0], Bob);
        lab.send(p2[0], Bob);
        Ok((lab.permuted(&[p1[0], p1[1], p2[0], p2[1]])?, lab.norm_defect()))
    };
    let (xx, d1) = candidate(&gates::x())?;
    let (xy, d2) = candidate(&gates::y())?;
    cert.check("norm_defect", d1.max(d2), Criterion::AtMost(NORM_DRIFT));
    let charges = ChargeMap::uniform(4);
    let on_xx = sector_usd_outcomes(&xx, &xy, &xx, &charges)?;
    let on_xy = sector_usd_outcomes(&xx, &xy, &xy, &charges)?;
    check_branch_sum(&mut cert, "xx_branch_sum", on_xx.iter().copied());
    check_branch_sum(&mut cert, "xy_branch_sum", on_xy.iter().copied());
    cert.check("xx_xy_usd_success", on_xx[0], Criterion::Near { target: 0.5, tolerance: tol });
    cert.check("xy_xx_usd_success", on_xy[1], Criterion::Near { target: 0.5, tolerance: tol });
    cert.check("wrong_guess", on_xx[1].max(on_xy[0]), Criterion::AtMost(tol));

    // Extra information: the XX/XY class has probability 1/9 and resolves
    // one bit with the measured probability.
    let gain = (on_xx[0] + on_xy[1]) / 2.0 / 9.0;
    cert.check("gain_cbits", gain, Criterion::Near { target: 1.0 / 18.0, tolerance: tol });
    cert.metric("rate_cbits", 2.0 * log3 + gain);
    cert.metric("rate_listed_cbits", log3 + 1.0 / 18.0);
    cert.metric("leftover_refbit2", 2.0 / 9.0);

    let first = [1.0 / 3.0; 3];
    let second = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
    let mut rng = rng_for(config.seed, "R_SDC_DOUBLE");
    let (mut class, mut resolved) = (0u64, 0u64);
    for _ in 0..config.trials {
        let a = sample_index(&mut rng, &first);
        let b = sample_index(&mut rng, &second);
        if a == 2 && b >= 2 {
            class += 1;
            let outcomes = if b == 2 { &on_xx } else { &on_xy };
            let hit = if b == 2 { 0 } else { 1 };
            if sample_index(&mut rng, outcomes) == hit {
                resolved += 1;
            }
        }
    }
    check_frequency(&mut cert, "empirical_class_frequency", class, config.trials, 1.0 / 9.0);
    check_frequency(&mut cert, "empirical_usd_success", resolved, class, 0.5);
    Ok(cert)
}

/// `3/2 + P_{2N}/2` cbits per use with `2N` refbits, `N` of which come back.
pub fn catalytic_rate(n: u32) -> Result<f64> {
    if n % 2 == 1 || n == 0 {
        return Err(Error::OutOfRange(format!("catalytic N must be even and positive, got {n}")));
    }
    let p = ratio_to_f64(&usd_refbit_assisted(2 * n)?.success_probability);
    Ok(superdense_rate(0.5, p))
}

/// Catalytic superdense coding at `N`: rate against `2 - 1/sqrt(πN)`.
pub fn run_catalytic_superdense(n: u32, config: &RunConfig) -> Result<RelationCertificate> {
    let rate = catalytic_rate(n)?;
    let mut cert = new_cert(
        "R_SDC_CATALYTIC",
        &[(K::Qubit, Amount::int(1)), (K::Ebit, Amount::int(1)), (K::Refbit, Amount::int(2 * i64::from(n)))],
        &[(K::Cbit, Amount::real(rate)), (K::Refbit, Amount::int(i64::from(n)))],
        config.tolerance,
    );
    let bound = 2.0 - 1.0 / (core::f64::consts::PI * f64::from(n)).sqrt();
    let p2n = ratio_to_f64(&pn_closed_form(2 * n));
    cert.check(
        &format!("rate_formula_n{n}"),
        rate,
        Criterion::Near { target: 1.5 + p2n / 2.0, tolerance: 1e-12 },
    );
    cert.check(&format!("rate_vs_bound_n{n}"), rate - bound, Criterion::AtLeast(-0.01));
    cert.metric(&format!("refbits_returned_n{n}"), 0.5 * 2.0 * f64::from(n));
    Ok(cert)
}
