//! Unambiguous discrimination of the `|00> ± e^{2iφ}|11>` pair when the
//! receiver holds no frame but some reference bits.
//!
//! Averaging over the unknown phase splits the state into total-charge
//! sectors. Inside a sector the two candidates are pure with branch weights
//! taken from the register's level counts, so the optimal unambiguous
//! success in that sector is the smaller weight.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::frames::ChargeMap;
use crate::hilbert::PureState;

/// Largest register size handled by the exact sector tables.
pub const MAX_REGISTER: u32 = 64;

/// `C(n, k)` as an exact integer; zero outside `0..=n`.
pub fn binomial(n: u32, k: i64) -> BigUint {
    if k < 0 || k > i64::from(n) {
        return BigUint::zero();
    }
    let k = k.min(i64::from(n) - k) as u32;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// One total-charge sector of the averaged pair-plus-register state.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector {
    pub charge: u32,
    /// Branch count with the flag pair in `|00>`.
    pub weight_plus: BigUint,
    /// Branch count with the flag pair in `|11>`.
    pub weight_minus: BigUint,
    /// Probability of landing in this sector (identical for both candidates).
    pub probability: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectorDecomposition {
    pub sectors: Vec<Sector>,
}

impl SectorDecomposition {
    /// Sectors for a register whose level `l` (charge `l * unit`) holds
    /// `weights[l]` branches, with a flag of `shift` levels.
    fn from_levels(weights: &[BigUint], shift: usize, unit: u32) -> Self {
        let total: BigUint = weights.iter().sum();
        let denom = BigRational::from_integer((total * 2u32).into());
        let at = |i: isize| -> BigUint {
            if i < 0 {
                BigUint::zero()
            } else {
                weights.get(i as usize).cloned().unwrap_or_default()
            }
        };
        let sectors = (0..weights.len() + shift)
            .map(|t| {
                let plus = at(t as isize);
                let minus = at(t as isize - shift as isize);
                let mass = BigRational::from_integer((&plus + &minus).into());
                Sector {
                    charge: t as u32 * unit,
                    weight_plus: plus,
                    weight_minus: minus,
                    probability: mass / &denom,
                }
            })
            .collect();
        Self { sectors }
    }

    pub fn total_probability(&self) -> BigRational {
        self.sectors.iter().map(|s| &s.probability).sum()
    }

    /// `Σ min(w+, w-) / Σ w`, the optimal unambiguous success.
    pub fn success(&self) -> BigRational {
        let total: BigUint = self.sectors.iter().map(|s| &s.weight_plus).sum();
        let num: BigUint = self
            .sectors
            .iter()
            .map(|s| s.weight_plus.clone().min(s.weight_minus.clone()))
            .sum();
        BigRational::new(num.into(), total.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UsdResult {
    pub success_probability: BigRational,
    pub per_sector: SectorDecomposition,
}

impl UsdResult {
    fn from_sectors(per_sector: SectorDecomposition) -> Self {
        Self {
            success_probability: per_sector.success(),
            per_sector,
        }
    }

    pub fn success_f64(&self) -> f64 {
        ratio_to_f64(&self.success_probability)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Equal-prior unambiguous success for two pure states with `|<a|b>| = overlap`.
pub fn pair_usd_success(overlap: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::OutOfRange("overlap must lie in [0, 1]".into()));
    }
    Ok(1.0 - overlap)
}

/// `1 - [C(N, N/2) + C(N, N/2 + 1)] / 2^N` for even `N`; odd `N` share the
/// value of `N - 1`.
pub fn pn_closed_form(n: u32) -> BigRational {
    let even = n - n % 2;
    let half = i64::from(even / 2);
    let lost = binomial(even, half) + binomial(even, half + 1);
    let total = BigUint::one() << even as usize;
    let kept = &total - lost;
    BigRational::new(kept.into(), total.into())
}

/// Large-`N` approximation `1 - 4 / sqrt(2πN)`.
pub fn pn_asymptotic(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("the asymptote needs N >= 1".into()));
    }
    Ok(1.0 - 4.0 / (2.0 * PI * f64::from(n)).sqrt())
}

fn check_register(n: u32) -> Result<()> {
    if n > MAX_REGISTER {
        return Err(Error::OutOfRange(alloc::format!(
            "register size {n} exceeds {MAX_REGISTER}"
        )));
    }
    Ok(())
}

/// Discrimination of `(|00> ± e^{2iφ}|11>) ⊗ (|0> + e^{iφ}|1>)^{⊗N}`.
pub fn usd_refbit_assisted(n: u32) -> Result<UsdResult> {
    check_register(n)?;
    let levels: Vec<BigUint> = (0..=n).map(|k| binomial(n, i64::from(k))).collect();
    Ok(UsdResult::from_sectors(SectorDecomposition::from_levels(
        &levels, 2, 1,
    )))
}

/// Discrimination of `(|00> ± e^{2iφ}|11>) ⊗ (|00> + e^{2iφ}|11>)^{⊗M}`.
/// Only `M = 1` appears in the literature; larger `M` follow the same
/// sector count.
pub fn usd_refbit2_assisted(m: u32) -> Result<UsdResult> {
    check_register(m)?;
    let levels: Vec<BigUint> = (0..=m).map(|j| binomial(m, i64::from(j))).collect();
    Ok(UsdResult::from_sectors(SectorDecomposition::from_levels(
        &levels, 1, 2,
    )))
}

/// Sector sum `Σ_q min(C(N,q), C(N,q-2))` computed directly.
pub fn refbit_min_sum(n: u32) -> BigUint {
    (0..=i64::from(n) + 2)
        .map(|q| binomial(n, q).min(binomial(n, q - 2)))
        .sum()
}

/// Outcome probabilities `[guess a, guess b, inconclusive]` of the optimal
/// equal-prior unambiguous measurement between the normalized vectors `a`
/// and `b`, applied to the (possibly sub-normalized) vector `input`.
pub fn pair_usd_outcomes(a: &[Complex64], b: &[Complex64], input: &[Complex64]) -> [f64; 3] {
    let dot = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
        u.iter().zip(v).map(|(x, y)| x.conj() * y).sum()
    };
    let s = dot(a, b);
    let mass: f64 = input.iter().map(|z| z.norm_sqr()).sum();
    if 1.0 - s.norm() < 1e-12 {
        return [0.0, 0.0, mass];
    }
    // Component of `input` orthogonal to `b` (resp. `a`), measured along the
    // normalized orthogonal complement, scaled by 1 / (1 + |s|).
    // `coeff` is <drop|keep>.
    let perp = |keep: &[Complex64], drop: &[Complex64], coeff: Complex64| -> f64 {
        let v: Vec<Complex64> = keep.iter().zip(drop).map(|(k, d)| k - coeff * d).collect();
        let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        dot(&v, input).norm_sqr() / nv
    };
    let scale = 1.0 / (1.0 + s.norm());
    let pa = perp(a, b, s.conj()) * scale;
    let pb = perp(b, a, s) * scale;
    [pa, pb, (mass - pa - pb).max(0.0)]
}

/// Unambiguous success between two pure candidates after the receiver
/// projects onto total-charge sectors of `charges` (all qubits in scope).
pub fn sector_usd_success(plus: &PureState, minus: &PureState, charges: &ChargeMap) -> Result<f64> {
    if plus.n_qubits() != minus.n_qubits() || charges.len() != plus.n_qubits() {
        return Err(Error::DimensionMismatch(plus.n_qubits(), minus.n_qubits()));
    }
    let scope: Vec<usize> = (0..plus.n_qubits()).collect();
    let totals: Vec<u32> = (0..plus.dim()).map(|i| charges.total(i, &scope)).collect();
    let mut sectors: Vec<u32> = totals.clone();
    sectors.sort_unstable();
    sectors.dedup();
    let mut success = 0.0;
    for q in sectors {
        let project = |s: &PureState| -> Vec<Complex64> {
            s.amplitudes()
                .iter()
                .zip(&totals)
                .filter(|(_, &t)| t == q)
                .map(|(a, _)| *a)
                .collect()
        };
        let (p, m) = (project(plus), project(minus));
        let np: f64 = p.iter().map(|z| z.norm_sqr()).sum();
        let nm: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        if np < 1e-15 || nm < 1e-15 {
            // Only one candidate reaches this sector: identified with certainty.
            success += 0.5 * (np + nm);
            continue;
        }
        let overlap: Complex64 = p.iter().zip(&m).map(|(x, y)| x.conj() * y).sum();
        let s = (overlap.norm() / (np * nm).sqrt()).min(1.0);
        // Equal sector weights for both candidates in the families used here.
        success += 0.5 * (np + nm) * pair_usd_success(s)?;
    }
    Ok(success)
}

/// Outcome probabilities `[guess plus, guess minus, inconclusive]` when the
/// receiver first projects onto total-charge sectors and then applies the
/// optimal unambiguous measurement inside each sector, on input `input`.
pub fn sector_usd_outcomes(
    plus: &PureState,
    minus: &PureState,
    input: &PureState,
    charges: &ChargeMap,
) -> Result<[f64; 3]> {
    let n = plus.n_qubits();
    if minus.n_qubits() != n || input.n_qubits() != n || charges.len() != n {
        return Err(Error::DimensionMismatch(plus.n_qubits(), minus.n_qubits()));
    }
    let scope: Vec<usize> = (0..n).collect();
    let totals: Vec<u32> = (0..plus.dim()).map(|i| charges.total(i, &scope)).collect();
    let mut sectors = totals.clone();
    sectors.sort_unstable();
    sectors.dedup();
    let mut out = [0.0; 3];
    for q in sectors {
        let project = |s: &PureState| -> Vec<Complex64> {
            s.amplitudes()
                .iter()
                .zip(&totals)
                .filter(|(_, &t)| t == q)
                .map(|(a, _)| *a)
                .collect()
        };
        let (p, m, x) = (project(plus), project(minus), project(input));
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let (np, nm, mass) = (norm(&p), norm(&m), norm(&x));
        if mass < 1e-15 {
            continue;
        }
        match (np < 1e-15, nm < 1e-15) {
            (false, true) => out[0] += mass,
            (true, false) => out[1] += mass,
            (true, true) => out[2] += mass,
            (false, false) => {
                let unit = |v: &[Complex64], nv: f64| -> Vec<Complex64> {
                    v.iter().map(|z| z / nv.sqrt()).collect()
                };
                let r = pair_usd_outcomes(&unit(&p, np), &unit(&m, nm), &x);
                for (o, v) in out.iter_mut().zip(r) {
                    *o += v;
                }
            }
        }
    }
    Ok(out)
}
