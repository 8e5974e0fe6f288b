//! Monte Carlo emulation of coincidence-counting runs.
//!
//! Shots are drawn from the exact joint detection distribution, so the
//! sampler inherits every interference null from the state algebra; there
//! is no approximate physics here, only multinomial noise. Each sweep point
//! uses its own counter-based RNG substream derived from (seed, point
//! index), making reports byte-identical regardless of thread schedule.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::elements::{apply_beam_splitter, apply_pauli_z};
use crate::error::{Error, Result};
use crate::fit::{fit_visibility, FitResult};
use crate::fock::{ModeRegistry, PureState};
use crate::measure::{click_distribution, condition_on_pattern, outcome_distribution, DetectorModel};
use crate::protocol::{
    classify_alice, modes, run_active, run_passive, state_after_alice, verification_bs,
    BellOutcome, ExperimentConfig, FringeRecord, PairId, Variant,
};

/// Name of the deterministic generator, echoed in every report.
pub const RNG_NAME: &str = "chacha12";

/// Bell-outcome tallies of the photon patterns Alice actually observed
/// (after detector loss, so a bunched pair that lost a photon tallies as
/// the single-photon class it mimics, exactly as in the lab).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BellTally {
    pub psi1: u64,
    pub psi2: u64,
    pub psi3: u64,
    pub psi4: u64,
}

impl BellTally {
    fn add(&mut self, outcome: BellOutcome) {
        match outcome {
            BellOutcome::Psi1 => self.psi1 += 1,
            BellOutcome::Psi2 => self.psi2 += 1,
            BellOutcome::Psi3 => self.psi3 += 1,
            BellOutcome::Psi4 => self.psi4 += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.psi1 + self.psi2 + self.psi3 + self.psi4
    }
}

/// One sweep point: the analytic fringe record with sampled coincidence
/// counts filled in, plus the per-shot Bell tallies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub record: FringeRecord,
    pub bell_counts: BellTally,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairFit {
    pub pair: PairId,
    pub fit: FitResult,
}

/// Full result of a counting run. Serializes deterministically for a fixed
/// config and seed; wall-clock timing stays out of the serialized form.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub rng: &'static str,
    pub seed: u64,
    pub shots_per_point: u64,
    pub points: Vec<PointReport>,
    pub fits: Vec<PairFit>,
    #[serde(skip)]
    pub elapsed_ms: f64,
}

/// Joint detection distribution over observed photon counts on
/// (k_1, k_2, k_1s, k_2s), detector efficiency included.
///
/// The passive variant measures one pure state. The active variant is a
/// classical mixture: the σ_z correction fires on an observed D2 photon, so
/// the state is conditioned on Alice's pre-loss pattern, Alice's counts are
/// thinned, and Bob's splitter sees the corrected state only when a k_2
/// photon survived to trigger the electro-optic switch.
pub fn detection_distribution(
    config: &ExperimentConfig,
    phi: f64,
) -> Result<Vec<(Vec<u8>, f64)>> {
    let input = config.input()?;
    let bs_b = verification_bs(config.bsb_r_sq_effective())?;
    let model = DetectorModel::resolving(config.eta)?;
    let state = state_after_alice(&input, phi)?;

    let joint: BTreeMap<Vec<u8>, f64> = match config.variant {
        Variant::Passive => {
            let full = state.add_modes([modes::DET_1S, modes::DET_2S])?;
            let full = apply_beam_splitter(&full, &bs_b)?;
            let dist = click_distribution(
                &full,
                &[
                    (modes::DET_1, model),
                    (modes::DET_2, model),
                    (modes::DET_1S, model),
                    (modes::DET_2S, model),
                ],
            )?;
            dist.iter().map(|(p, v)| (p.to_vec(), v)).collect()
        }
        Variant::Active => {
            let mut joint = BTreeMap::new();
            let alice = outcome_distribution(&state, &[modes::DET_1, modes::DET_2])?;
            for (pattern, p_pattern) in alice.iter() {
                let (_, cond) =
                    condition_on_pattern(&state, &[modes::DET_1, modes::DET_2], pattern)?;
                let Some(cond) = cond else { continue };

                let alice_reg =
                    std::sync::Arc::new(ModeRegistry::new([modes::DET_1, modes::DET_2])?);
                let alice_state = PureState::basis_state(alice_reg, [pattern[0], pattern[1]])?;
                let observed = click_distribution(
                    &alice_state,
                    &[(modes::DET_1, model), (modes::DET_2, model)],
                )?;

                for (seen, p_seen) in observed.iter() {
                    let triggered = seen[1] >= 1;
                    let bob = if triggered {
                        apply_pauli_z(&cond, modes::BOB)?
                    } else {
                        cond.clone()
                    };
                    let bob = bob.add_modes([modes::DET_1S, modes::DET_2S])?;
                    let bob = apply_beam_splitter(&bob, &bs_b)?;
                    let verif = click_distribution(
                        &bob,
                        &[(modes::DET_1S, model), (modes::DET_2S, model)],
                    )?;
                    for (b, p_b) in verif.iter() {
                        let key = vec![seen[0], seen[1], b[0], b[1]];
                        *joint.entry(key).or_insert(0.0) += p_pattern * p_seen * p_b;
                    }
                }
            }
            joint
        }
    };
    Ok(joint.into_iter().collect())
}

fn sample_point(
    config: &ExperimentConfig,
    phi: f64,
    point_index: u64,
) -> Result<(FringeRecord, BellTally)> {
    let mut record = match config.variant {
        Variant::Passive => run_passive(config, phi)?,
        Variant::Active => run_active(config, phi)?,
    };
    let outcomes = detection_distribution(config, phi)?;
    let mut cumulative = Vec::with_capacity(outcomes.len());
    let mut acc = 0.0;
    for (pattern, p) in &outcomes {
        acc += p;
        cumulative.push((acc, pattern));
    }
    let total = acc;

    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    rng.set_stream(point_index);

    let mut tally = BellTally::default();
    let mut pair_counts = [0u64; 4];
    for _ in 0..config.shots {
        let u = rng.gen::<f64>() * total;
        let idx = cumulative.partition_point(|(edge, _)| *edge < u);
        let pattern = cumulative[idx.min(cumulative.len() - 1)].1;
        tally.add(classify_alice(pattern[0], pattern[1])?);
        for pair in PairId::ALL {
            let alice = if pair.alice_mode() == modes::DET_1 { pattern[0] } else { pattern[1] };
            let bob = if pair.bob_mode() == modes::DET_1S { pattern[2] } else { pattern[3] };
            if alice >= 1 && bob >= 1 {
                pair_counts[pair.index()] += 1;
            }
        }
    }
    for pair in PairId::ALL {
        record.pairs[pair.index()].counts = pair_counts[pair.index()];
    }
    Ok((record, tally))
}

/// Samples `config.shots` emissions at every sweep point and tallies
/// coincidences per detector pair. Deterministic for a fixed seed.
pub fn simulate_counts(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    if config.shots == 0 {
        return Err(Error::InvalidConfig(
            "Monte Carlo run requested with shots = 0; set shots >= 1".into(),
        ));
    }
    let started = Instant::now();
    let points = config.phase_points()?;
    let sampled: Vec<(FringeRecord, BellTally)> = points
        .par_iter()
        .enumerate()
        .map(|(i, &phi)| sample_point(config, phi, i as u64))
        .collect::<Result<_>>()?;

    let mut fits = Vec::new();
    for pair in PairId::ALL {
        let series: Vec<(f64, f64)> = sampled
            .iter()
            .map(|(rec, _)| (rec.phi, rec.pairs[pair.index()].counts as f64))
            .collect();
        if let Ok(fit) = fit_visibility(&series) {
            fits.push(PairFit { pair, fit });
        }
    }

    Ok(RunReport {
        config: config.clone(),
        rng: RNG_NAME,
        seed: config.seed,
        shots_per_point: config.shots,
        points: sampled
            .into_iter()
            .map(|(record, bell_counts)| PointReport { record, bell_counts })
            .collect(),
        fits,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}
