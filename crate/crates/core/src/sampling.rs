//! Seeded randomness for inputs, frames and Monte Carlo branches.

use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::hilbert::PureState;

pub type SimRng = ChaCha8Rng;

/// Independent stream for `label` under a run seed, so that registry entries
/// do not depend on the order in which they are evaluated.
pub fn rng_for(seed: u64, label: &str) -> SimRng {
    // FNV-1a over the label, folded into the seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    SimRng::seed_from_u64(seed ^ h)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; u1 in (0, 1] keeps the log finite.
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// Haar-random amplitudes `(a, b)` with `|a|^2 + |b|^2 = 1`.
pub fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> (Complex64, Complex64) {
    let s = random_state(1, rng).expect("one qubit is within the cap");
    (s.amplitude(0), s.amplitude(1))
}

pub fn random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<PureState> {
    let amps = (0..1usize << n_qubits)
        .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
        .collect();
    PureState::normalized(n_qubits, amps)
}

/// Index drawn from a discrete distribution.
pub fn sample_index<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let u = rng.gen::<f64>();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Observed frequency of an event against its predicted probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyCheck {
    pub trials: u64,
    pub hits: u64,
    pub expected: f64,
}

impl FrequencyCheck {
    pub fn frequency(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    pub fn sigma(&self) -> f64 {
        (self.expected * (1.0 - self.expected) / self.trials as f64).sqrt()
    }

    /// `|f - p| <= 3σ`; for `p ∈ {0, 1}` the frequency must match exactly.
    pub fn within_three_sigma(&self) -> bool {
        (self.frequency() - self.expected).abs() <= 3.0 * self.sigma() + 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_label_dependent() {
        let a: u64 = rng_for(7, "R_C1").gen();
        let b: u64 = rng_for(7, "R_C1").gen();
        let c: u64 = rng_for(7, "R_C2").gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_qubit_is_normalized() {
        let mut rng = rng_for(1, "q");
        for _ in 0..20 {
            let (a, b) = random_qubit(&mut rng);
            assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn three_sigma_band() {
        let ok = FrequencyCheck { trials: 10_000, hits: 5_100, expected: 0.5 };
        assert!(ok.within_three_sigma());
        let bad = FrequencyCheck { trials: 10_000, hits: 5_200, expected: 0.5 };
        assert!(!bad.within_three_sigma());
        let certain = FrequencyCheck { trials: 10, hits: 10, expected: 1.0 };
        assert!(certain.within_three_sigma());
    }
}
