//! The table of verifiable relations, keyed by relation id.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::frames::FrameAssignment;
use crate::hilbert::PureState;
use crate::resources::RelationCertificate;
use crate::sampling::{random_qubit, random_state, rng_for, SimRng};

use super::asymptotic::run_asymptotic;
use super::coherent::*;
use super::common::{RunConfig, RANDOM_INSTANCES};
use super::conversion::{conversion_deficit_ratio, run_data_hiding, run_ebit_to_ebit_l, run_rsp_refbit, EbitSource};
use super::superdense::*;
use super::teleport::run_teleport;

/// One verifiable relation.
#[derive(Clone, Copy)]
pub struct RelationEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub default_tolerance: f64,
    pub runner: fn(&RunConfig) -> Result<RelationCertificate>,
}

impl core::fmt::Debug for RelationEntry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("RelationEntry")
            .field("id", &self.id)
            .field("description", &self.description)
            .field("default_tolerance", &self.default_tolerance)
            .finish()
    }
}

/// Runs `body` on the aligned frame and on `RANDOM_INSTANCES - 1` random
/// frames, keeping the worst value of every check.
fn over_instances(
    id: &str,
    config: &RunConfig,
    mut body: impl FnMut(&FrameAssignment, &mut SimRng) -> Result<RelationCertificate>,
) -> Result<RelationCertificate> {
    let mut rng = rng_for(config.seed, id);
    let mut cert = body(&FrameAssignment::aligned(), &mut rng)?;
    for _ in 1..RANDOM_INSTANCES {
        let frame = FrameAssignment::random(&mut rng);
        cert.absorb(&body(&frame, &mut rng)?);
    }
    cert.tolerance = config.tolerance;
    cert.seed = config.seed;
    cert.trials = config.trials;
    Ok(cert)
}

fn qubit_to_ebit(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_QUBIT_EBIT", config, |f, _| run_qubit_to_ebit(f, config.tolerance))
}

fn qubit_to_cobit(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_QUBIT_COBIT", config, |f, rng| {
        let (a, b) = random_qubit(rng);
        run_qubit_to_cobit(a, b, f, config.tolerance)
    })
}

fn cobit_to_ebit(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_COBIT_EBIT", config, |f, _| run_cobit_to_ebit(f, config.tolerance))
}

fn qubit_to_refbit(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_QUBIT_REFBIT", config, |f, _| run_qubit_to_refbit(f, config.tolerance))
}

fn qubit_ebit_to_refbit2(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_QUBIT_EBIT_REFBIT2", config, |f, _| run_qubit_ebit_to_refbit2(f, config.tolerance))
}

fn c1(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_C1", config, |f, rng| {
        let (a, b) = random_qubit(rng);
        run_c1(a, b, f, config.tolerance)
    })
}

fn c2(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_C2", config, |f, rng| {
        let (a, b) = random_qubit(rng);
        run_c2(a, b, f, config.tolerance)
    })
}

fn c3(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_C3", config, |f, _| run_c3(f, config.tolerance))
}

fn c4(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_C4", config, |f, _| run_c4(f, config.tolerance))
}

fn sdc_coherent(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_SDC_COHERENT", config, |f, rng| {
        let (a, b) = random_qubit(rng);
        run_coherent_superdense(a, b, f, config.tolerance)
    })
}

fn encoded_identity(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_ENCODED_IDENTITY", config, |f, rng| {
        let input: PureState = random_state(1, rng)?;
        let ancillas = random_state(2, rng)?;
        run_encoded_identity(&input, &ancillas, f, config.tolerance)
    })
}

fn sdc_n0(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_SDC_N0", config, |f, _| run_superdense_base(f, config))
}

fn sdc_tradeoff(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_SDC_TRADEOFF", config, |f, _| run_superdense_tradeoff(f, config))
}

fn sdc_refbit2(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_SDC_REFBIT2", config, |f, rng| run_superdense_refbit2(rng.gen::<f64>(), f, config))
}

fn sdc_double(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_SDC_DOUBLE", config, |f, _| run_double_superdense(f, config))
}

fn teleport(register: Register, id: &'static str, config: &RunConfig) -> Result<RelationCertificate> {
    over_instances(id, config, |f, rng| {
        let (a, b) = random_qubit(rng);
        run_teleport(a, b, register, f, config)
    })
}

fn tel_n0(config: &RunConfig) -> Result<RelationCertificate> {
    teleport(Register::Refbits(0), "R_TEL_N0", config)
}

fn tel_n2(config: &RunConfig) -> Result<RelationCertificate> {
    teleport(Register::Refbits(2), "R_TEL_N2", config)
}

fn tel_refbit2(config: &RunConfig) -> Result<RelationCertificate> {
    teleport(Register::Refbit2s(1), "R_TEL_REFBIT2", config)
}

fn ebits_ebit_l(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_EBITS_EBIT_L", config, |f, _| run_ebit_to_ebit_l(EbitSource::TwoEbits, f, config))
}

fn ebit_refbit_ebit_l(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_EBIT_REFBIT_EBIT_L", config, |f, _| {
        run_ebit_to_ebit_l(EbitSource::EbitPlusRefbit, f, config)
    })
}

fn ebit_refbits_ebit_l(config: &RunConfig) -> Result<RelationCertificate> {
    let mut cert = over_instances("R_EBIT_REFBITS_EBIT_L", config, |f, _| {
        run_ebit_to_ebit_l(EbitSource::EbitPlusRefbits(2), f, config)
    })?;
    for n in [16u32, 32, 64] {
        cert.metric(&format!("deficit_ratio_n{n}"), conversion_deficit_ratio(n)?);
    }
    Ok(cert)
}

fn rsp(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_RSP", config, |f, _| run_rsp_refbit(f, config))
}

fn data_hiding(config: &RunConfig) -> Result<RelationCertificate> {
    over_instances("R_DATA_HIDING", config, |f, _| run_data_hiding(f, config))
}

fn asymptotic(config: &RunConfig) -> Result<RelationCertificate> {
    let mut cert = run_asymptotic(config)?;
    cert.seed = config.seed;
    cert.trials = config.trials;
    Ok(cert)
}

const fn entry(
    id: &'static str,
    description: &'static str,
    runner: fn(&RunConfig) -> Result<RelationCertificate>,
) -> RelationEntry {
    RelationEntry { id, description, default_tolerance: 1e-9, runner }
}

static REGISTRY: [RelationEntry; 24] = [
    entry("R_ASYMPTOTIC", "qubit -> Qubit, ebit -> Ebit, qubit + ebit -> 2 cbits at large N", asymptotic),
    entry("R_C1", "2 cobits >= qubit + ebit", c1),
    entry("R_C2", "cobit + qubit >= 2 cobits", c2),
    entry("R_C3", "cobit + refbit >= qubit", c3),
    entry("R_C4", "cobit + ebit >= qubit + refbit", c4),
    entry("R_COBIT_EBIT", "cobit >= ebit", cobit_to_ebit),
    entry("R_DATA_HIDING", "a bit hidden in the sign of an ebit", data_hiding),
    entry("R_EBITS_EBIT_L", "2 ebits >= 1/2 Ebit", ebits_ebit_l),
    entry("R_EBIT_REFBITS_EBIT_L", "ebit + N refbits >= Ebits by charge measurement", ebit_refbits_ebit_l),
    entry("R_EBIT_REFBIT_EBIT_L", "ebit + refbit >= 1/2 Ebit", ebit_refbit_ebit_l),
    entry("R_ENCODED_IDENTITY", "encoded C1 and encoded coherent superdense coding", encoded_identity),
    entry("R_QUBIT_COBIT", "qubit >= cobit", qubit_to_cobit),
    entry("R_QUBIT_EBIT", "qubit >= ebit", qubit_to_ebit),
    entry("R_QUBIT_EBIT_REFBIT2", "qubit + ebit >= refbit(2)", qubit_ebit_to_refbit2),
    entry("R_QUBIT_REFBIT", "qubit >= refbit", qubit_to_refbit),
    entry("R_RSP", "qubit + cbit prepares a refbit remotely", rsp),
    entry("R_SDC_COHERENT", "qubit + ebit >= 2 cobits", sdc_coherent),
    entry("R_SDC_DOUBLE", "two superdense rounds on a shared ebit pair", sdc_double),
    entry("R_SDC_N0", "qubit + ebit >= log2 3 cbits", sdc_n0),
    entry("R_SDC_REFBIT2", "superdense coding with a refbit(2), and refbit(2) from refbits", sdc_refbit2),
    entry("R_SDC_TRADEOFF", "superdense rate against refbit spend", sdc_tradeoff),
    entry("R_TEL_N0", "teleportation without a reference succeeds half the time", tel_n0),
    entry("R_TEL_N2", "teleportation with 2 refbits", tel_n2),
    entry("R_TEL_REFBIT2", "teleportation with a refbit(2)", tel_refbit2),
];

/// Every relation, ordered by id.
pub fn registry() -> &'static [RelationEntry] {
    &REGISTRY
}

pub fn find_relation(id: &str) -> Result<&'static RelationEntry> {
    REGISTRY
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownRelation(id.to_string()))
}

pub fn verify_relation(id: &str, config: &RunConfig) -> Result<RelationCertificate> {
    (find_relation(id)?.runner)(config)
}

/// Certificates for every relation, ordered by id.
pub fn verify_all(config: &RunConfig) -> Result<Vec<RelationCertificate>> {
    REGISTRY.iter().map(|e| (e.runner)(config)).collect()
}
