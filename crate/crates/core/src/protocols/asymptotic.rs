//! Many-copy relations: the fixed-weight code, fixed-weight projection of
//! many ebits, and superdense coding with a catalytic refbit supply.

use alloc::format;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::resources::{Amount, Criterion, RelationCertificate, ResourceKind};
use crate::usd::binomial;

use super::common::{new_cert, RunConfig};
use super::superdense::run_catalytic_superdense;

use ResourceKind as K;

/// Largest block length accepted by [`fixed_weight_code`].
pub const MAX_CODE_LENGTH: u32 = 128;

/// Code on `n` physical qubits spanned by the strings with `n1` ones.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedWeightCode {
    pub n1: u32,
    pub dimension: BigUint,
    pub logical_qubits: f64,
    /// `n - ½ log2(πn/2)`, the large-`n` estimate of `logical_qubits`.
    pub stirling: f64,
}

pub fn fixed_weight_code(n: u32) -> Result<FixedWeightCode> {
    if !(1..=MAX_CODE_LENGTH).contains(&n) {
        return Err(Error::OutOfRange(format!("code length {n} outside 1..={MAX_CODE_LENGTH}")));
    }
    let n1 = n / 2;
    let dimension = binomial(n, i64::from(n1));
    let logical_qubits = dimension.to_f64().unwrap_or(f64::NAN).log2();
    let stirling = f64::from(n) - 0.5 * (core::f64::consts::PI * f64::from(n) / 2.0).log2();
    Ok(FixedWeightCode { n1, dimension, logical_qubits, stirling })
}

/// Expected Ebits per ebit when both parties project `n` ebits onto fixed
/// weight: outcome `k` has probability `C(n,k)/2^n` and leaves a maximally
/// entangled state of Schmidt rank `C(n,k)`.
pub fn fixed_weight_ebit_yield(n: u32) -> Result<f64> {
    if n == 0 || n > 1024 {
        return Err(Error::OutOfRange(format!("ebit count {n} outside 1..=1024")));
    }
    let sum: f64 = (0..=n)
        .map(|k| {
            let log_c = log2_big(&binomial(n, i64::from(k)));
            (log_c - f64::from(n)).exp2() * log_c
        })
        .sum();
    Ok(sum / f64::from(n))
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::NAN).log2() + shift as f64
}

/// 1 qubit >= 1 Qubit, 1 ebit >= 1 Ebit and 1 qubit + 1 ebit >= 2 cbits in
/// the many-copy limit, checked through their finite-size rates.
pub fn run_asymptotic(config: &RunConfig) -> Result<RelationCertificate> {
    let mut cert = new_cert(
        "R_ASYMPTOTIC",
        &[(K::Qubit, Amount::int(1)), (K::Ebit, Amount::int(1))],
        &[(K::QubitL, Amount::int(1)), (K::EbitL, Amount::int(1))],
        config.tolerance,
    );
    let two = fixed_weight_code(2)?;
    cert.require("code_n2_is_pair_encoding", two.n1 == 1 && two.dimension == BigUint::from(2u32));
    let mut last = 0.0;
    let mut monotone = true;
    for n in [16u32, 32, 64, 128] {
        let code = fixed_weight_code(n)?;
        let rate = code.logical_qubits / f64::from(n);
        cert.metric(&format!("code_rate_n{n}"), rate);
        monotone &= rate > last;
        last = rate;
    }
    cert.require("code_rate_increasing", monotone);
    cert.check("code_rate_n128", last, Criterion::AtLeast(0.95));
    let c64 = fixed_weight_code(64)?;
    cert.check("code_stirling_gap_n64", (c64.logical_qubits - c64.stirling).abs(), Criterion::AtMost(0.05));

    let mut last = 0.0;
    let mut monotone = true;
    for n in [16u32, 64, 256, 1024] {
        let y = fixed_weight_ebit_yield(n)?;
        cert.metric(&format!("ebit_l_per_ebit_n{n}"), y);
        monotone &= y > last;
        last = y;
    }
    cert.require("ebit_l_yield_increasing", monotone);
    cert.check("ebit_l_per_ebit_n1024", last, Criterion::AtLeast(0.99));

    for n in [8u32, 16, 32] {
        let sdc = run_catalytic_superdense(n, config)?;
        cert.absorb(&sdc);
        if let Some(r) = sdc.get(&format!("rate_formula_n{n}")) {
            cert.metric(&format!("catalytic_rate_n{n}"), r);
        }
    }
    let r32 = cert.get("catalytic_rate_n32").unwrap_or(f64::NAN);
    cert.check("catalytic_rate_n32", r32, Criterion::AtLeast(1.9));
    Ok(cert)
}
