//! End-to-end teleportation pipeline: source and channel preparation,
//! Alice's partial Bell measurement, optional active σ_z correction, Bob's
//! verification interferometer, and phase / superposition-parameter sweeps.
//!
//! Port conventions (fixed once, so every fringe is reproducible):
//! the source splitter acts on (k_S, k_a~) with r = α; the channel photon
//! enters the second port of a 50:50 splitter on (k_A, k_B), giving the
//! singlet with its minus sign; Alice's splitter takes (k_S, k_A) to
//! (k_2, k_1); Bob's verification splitter takes (k_a~, k_B) to
//! (k_2s, k_1s). D1, D2, D1*, D2* watch k_1, k_2, k_1s, k_2s. With these
//! choices the symmetric-case conditional coincidences are ½sin²(φ/2) for
//! the like-index pairs and ½cos²(φ/2) for the cross pairs, and the
//! matched active protocol turns D2* dark at the φ = π fringe extremum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elements::{apply_beam_splitter, apply_pauli_z, apply_phase_shift, BeamSplitterParams};
use crate::error::{Error, Result};
use crate::fock::{ModeRegistry, PureState};
use crate::measure::{
    click_distribution, condition_on_pattern, outcome_distribution, DetectorModel,
    OutcomeDistribution,
};

pub mod modes {
    pub const SOURCE: &str = "k_S";
    pub const ANCILLA: &str = "k_a~";
    pub const ALICE: &str = "k_A";
    pub const BOB: &str = "k_B";
    pub const DET_1: &str = "k_1";
    pub const DET_2: &str = "k_2";
    pub const DET_1S: &str = "k_1s";
    pub const DET_2S: &str = "k_2s";
}

use modes::*;

/// Default mirror-calibration wavelength in micrometers.
pub const DEFAULT_LAMBDA_UM: f64 = 0.7276;

/// Qubit to teleport, encoded in the source splitter: r_S = α, t_S = β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputQubitSpec {
    alpha: f64,
    beta: f64,
}

impl InputQubitSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha)
            || !(0.0..=1.0).contains(&beta)
            || (alpha * alpha + beta * beta - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidConfig(format!(
                "amplitudes alpha={alpha}, beta={beta} must lie in [0,1] with alpha^2+beta^2=1"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn from_alpha_sq(alpha_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_sq) {
            return Err(Error::InvalidConfig(format!(
                "alpha_sq={alpha_sq} outside [0,1]"
            )));
        }
        Self::new(alpha_sq.sqrt(), (1.0 - alpha_sq).sqrt())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha * self.alpha
    }
}

/// Alice's four Bell-measurement outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellOutcome {
    Psi1,
    Psi2,
    Psi3,
    Psi4,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] =
        [BellOutcome::Psi1, BellOutcome::Psi2, BellOutcome::Psi3, BellOutcome::Psi4];

    pub fn index(self) -> usize {
        match self {
            BellOutcome::Psi1 => 0,
            BellOutcome::Psi2 => 1,
            BellOutcome::Psi3 => 2,
            BellOutcome::Psi4 => 3,
        }
    }
}

/// Maps a detected photon pattern on (k_1, k_2) to the Bell outcome.
/// (1,1) is impossible under ideal two-photon interference; seeing it means
/// the state algebra is broken, so it is a hard error rather than a class.
pub fn classify_alice(n1: u8, n2: u8) -> Result<BellOutcome> {
    match (n1, n2) {
        (0, 0) => Ok(BellOutcome::Psi1),
        (2, 0) | (0, 2) => Ok(BellOutcome::Psi2),
        (1, 0) => Ok(BellOutcome::Psi3),
        (0, 1) => Ok(BellOutcome::Psi4),
        (1, 1) => Err(Error::ImpossiblePattern),
        _ => Err(Error::InvalidAlicePattern(n1, n2)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Passive,
    Active,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "passive" => Ok(Variant::Passive),
            "active" => Ok(Variant::Active),
            other => Err(Error::InvalidConfig(format!(
                "variant must be `passive` or `active`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Joint,
    #[default]
    Conditional,
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joint" => Ok(Normalization::Joint),
            "conditional" => Ok(Normalization::Conditional),
            other => Err(Error::InvalidConfig(format!(
                "normalization must be `joint` or `conditional`, got `{other}`"
            ))),
        }
    }
}

/// Inclusive phase grid. `steps` is the number of points; a single-point
/// "sweep" is allowed only when start == stop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSweep {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl PhaseSweep {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidConfig("sweep needs at least one step".into()));
        }
        if self.steps == 1 && self.start != self.stop {
            return Err(Error::InvalidConfig(
                "sweeping a nondegenerate range needs at least 2 steps".into(),
            ));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidConfig("sweep bounds must be finite".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.start + i as f64 * h).collect()
    }
}

/// Mirror-position grid in micrometers, converted to phases via the
/// calibration wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorSweep {
    pub start_um: f64,
    pub stop_um: f64,
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_um: Option<f64>,
}

/// Interferometer phase, optionally tied to a mirror position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSetting {
    pub phi: f64,
    pub mirror_um: Option<f64>,
    pub lambda_um: Option<f64>,
}

impl PhaseSetting {
    pub fn from_phase(phi: f64) -> Self {
        Self { phi, mirror_um: None, lambda_um: None }
    }

    pub fn from_mirror(x_um: f64, lambda_um: f64) -> Result<Self> {
        Ok(Self {
            phi: mirror_to_phase(x_um, lambda_um)?,
            mirror_um: Some(x_um),
            lambda_um: Some(lambda_um),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if let (Some(x), Some(lambda)) = (self.mirror_um, self.lambda_um) {
            let back = phase_to_mirror(self.phi, lambda)?;
            if (back - x).abs() > 1e-9 * x.abs().max(1.0) {
                return Err(Error::InvalidConfig(format!(
                    "phase {} and mirror position {} um are inconsistent for lambda {} um",
                    self.phi, x, lambda
                )));
            }
        }
        Ok(())
    }
}

/// φ = 2^{3/2}·π·X/λ.
pub fn mirror_to_phase(x: f64, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::InvalidWavelength(lambda));
    }
    Ok(2.0_f64.powf(1.5) * std::f64::consts::PI * x / lambda)
}

/// X = 2^{-3/2}·λ·φ/π.
pub fn phase_to_mirror(phi: f64, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::InvalidWavelength(lambda));
    }
    Ok(lambda * phi / (2.0_f64.powf(1.5) * std::f64::consts::PI))
}

fn default_alpha_sq() -> f64 {
    0.5
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA_UM
}

fn default_eta() -> f64 {
    1.0
}

fn default_seed() -> u64 {
    1
}

/// Free parameters of one experiment run. `bsb_r_sq = None` means the
/// verification splitter is matched to the source (r_B = α).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_alpha_sq")]
    pub alpha_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bsb_r_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<PhaseSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror: Option<MirrorSweep>,
    #[serde(default = "default_lambda")]
    pub lambda_um: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub shots: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub normalization: Normalization,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha_sq: default_alpha_sq(),
            bsb_r_sq: None,
            phase: None,
            mirror: None,
            lambda_um: default_lambda(),
            eta: default_eta(),
            variant: Variant::default(),
            shots: 0,
            seed: default_seed(),
            normalization: Normalization::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha_sq) {
            return Err(Error::InvalidConfig(format!(
                "alpha_sq={} outside [0,1]",
                self.alpha_sq
            )));
        }
        if let Some(r_sq) = self.bsb_r_sq {
            if !(0.0..=1.0).contains(&r_sq) {
                return Err(Error::InvalidConfig(format!("bsb_r_sq={r_sq} outside [0,1]")));
            }
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidEfficiency(self.eta));
        }
        if self.lambda_um.is_nan() || self.lambda_um <= 0.0 {
            return Err(Error::InvalidWavelength(self.lambda_um));
        }
        if self.phase.is_some() && self.mirror.is_some() {
            return Err(Error::InvalidConfig(
                "config sets both `phase` and `mirror`; pick one".into(),
            ));
        }
        if let Some(p) = &self.phase {
            p.validate()?;
        }
        if let Some(m) = &self.mirror {
            PhaseSweep { start: m.start_um, stop: m.stop_um, steps: m.steps }.validate()?;
            if let Some(lambda) = m.lambda_um {
                if lambda.is_nan() || lambda <= 0.0 {
                    return Err(Error::InvalidWavelength(lambda));
                }
            }
        }
        Ok(())
    }

    pub fn input(&self) -> Result<InputQubitSpec> {
        InputQubitSpec::from_alpha_sq(self.alpha_sq)
    }

    /// Verification-splitter reflectivity; matched to α² unless overridden.
    pub fn bsb_r_sq_effective(&self) -> f64 {
        self.bsb_r_sq.unwrap_or(self.alpha_sq)
    }

    pub fn effective_lambda_um(&self) -> f64 {
        self.mirror
            .as_ref()
            .and_then(|m| m.lambda_um)
            .unwrap_or(self.lambda_um)
    }

    /// Phase grid of the configured sweep (default: 65 points over [0, 2π],
    /// which lands exactly on both fringe extrema).
    pub fn phase_points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if let Some(m) = &self.mirror {
            let lambda = self.effective_lambda_um();
            let sweep = PhaseSweep { start: m.start_um, stop: m.stop_um, steps: m.steps };
            return sweep
                .points()
                .into_iter()
                .map(|x| mirror_to_phase(x, lambda))
                .collect();
        }
        let sweep = self.phase.unwrap_or(PhaseSweep {
            start: 0.0,
            stop: std::f64::consts::TAU,
            steps: 65,
        });
        Ok(sweep.points())
    }
}

/// Coincidence pair (Alice detector, Bob detector).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairId {
    #[serde(rename = "D1-D1*")]
    D1D1s,
    #[serde(rename = "D1-D2*")]
    D1D2s,
    #[serde(rename = "D2-D1*")]
    D2D1s,
    #[serde(rename = "D2-D2*")]
    D2D2s,
}

impl PairId {
    pub const ALL: [PairId; 4] = [PairId::D1D1s, PairId::D1D2s, PairId::D2D1s, PairId::D2D2s];

    pub fn label(self) -> &'static str {
        match self {
            PairId::D1D1s => "D1-D1*",
            PairId::D1D2s => "D1-D2*",
            PairId::D2D1s => "D2-D1*",
            PairId::D2D2s => "D2-D2*",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::UnknownDetector(s.to_string()))
    }

    pub fn index(self) -> usize {
        match self {
            PairId::D1D1s => 0,
            PairId::D1D2s => 1,
            PairId::D2D1s => 2,
            PairId::D2D2s => 3,
        }
    }

    /// Bell outcome heralded by the pair's Alice detector.
    pub fn alice_outcome(self) -> BellOutcome {
        match self {
            PairId::D1D1s | PairId::D1D2s => BellOutcome::Psi3,
            PairId::D2D1s | PairId::D2D2s => BellOutcome::Psi4,
        }
    }

    pub fn alice_mode(self) -> &'static str {
        match self {
            PairId::D1D1s | PairId::D1D2s => DET_1,
            PairId::D2D1s | PairId::D2D2s => DET_2,
        }
    }

    pub fn bob_mode(self) -> &'static str {
        match self {
            PairId::D1D1s | PairId::D2D1s => DET_1S,
            PairId::D1D2s | PairId::D2D2s => DET_2S,
        }
    }
}

impl std::fmt::Display for PairId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairProbability {
    pub pair: PairId,
    pub joint: f64,
    pub conditional: f64,
    pub counts: u64,
}

/// One sweep point: phase, equivalent mirror position and the four
/// coincidence-pair probabilities (joint over all emissions, conditional on
/// the post-selected success ensemble).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeRecord {
    pub phi: f64,
    pub mirror_um: f64,
    pub pairs: [PairProbability; 4],
}

impl FringeRecord {
    pub fn pair(&self, id: PairId) -> &PairProbability {
        &self.pairs[id.index()]
    }
}

/// Bell-outcome probabilities of Alice's measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellStats {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    pub psi4: f64,
}

impl BellStats {
    pub fn success_probability(&self) -> f64 {
        self.psi3 + self.psi4
    }
}

/// α|0⟩_S|1⟩_ã + β|1⟩_S|0⟩_ã from a single photon on the source splitter.
pub fn prepare_source(input: &InputQubitSpec) -> Result<PureState> {
    let registry = std::sync::Arc::new(ModeRegistry::new([SOURCE, ANCILLA])?);
    let photon = PureState::basis_state(registry, [1u8, 0])?;
    let bs = BeamSplitterParams::new(input.alpha, input.beta, (SOURCE, ANCILLA), (SOURCE, ANCILLA))?;
    apply_beam_splitter(&photon, &bs)
}

/// 2^{-1/2}(|1⟩_A|0⟩_B − |0⟩_A|1⟩_B) from a single photon entering the
/// second port of a 50:50 splitter.
pub fn prepare_channel() -> Result<PureState> {
    let registry = std::sync::Arc::new(ModeRegistry::new([ALICE, BOB])?);
    let photon = PureState::basis_state(registry, [0u8, 1])?;
    let bs = BeamSplitterParams::symmetric((ALICE, BOB), (ALICE, BOB))?;
    apply_beam_splitter(&photon, &bs)
}

/// Source ⊗ channel over (k_S, k_a~, k_A, k_B).
pub fn assemble_total_state(input: &InputQubitSpec) -> Result<PureState> {
    prepare_source(input)?.tensor(&prepare_channel()?)
}

/// Full state after the phase shift on k_S and Alice's beam splitter;
/// Alice's photons live on (k_1, k_2), k_S and k_A are left in vacuum.
pub fn state_after_alice(input: &InputQubitSpec, phi: f64) -> Result<PureState> {
    let source = apply_phase_shift(&prepare_source(input)?, SOURCE, phi)?;
    let total = source
        .tensor(&prepare_channel()?)?
        .add_modes([DET_1, DET_2])?;
    let bs_a = BeamSplitterParams::symmetric((SOURCE, ALICE), (DET_2, DET_1))?;
    apply_beam_splitter(&total, &bs_a)
}

pub(crate) fn verification_bs(bsb_r_sq: f64) -> Result<BeamSplitterParams> {
    BeamSplitterParams::from_r_sq(bsb_r_sq, (ANCILLA, BOB), (DET_2S, DET_1S))
}

/// Probabilities of Alice's four Bell outcomes (phase independent).
pub fn bell_statistics(input: &InputQubitSpec) -> Result<BellStats> {
    let state = state_after_alice(input, 0.0)?;
    let dist = outcome_distribution(&state, &[DET_1, DET_2])?;
    let mut probs = [0.0f64; 4];
    for (pattern, p) in dist.iter() {
        probs[classify_alice(pattern[0], pattern[1])?.index()] += p;
    }
    Ok(BellStats {
        psi1: probs[0],
        psi2: probs[1],
        psi3: probs[2],
        psi4: probs[3],
    })
}

/// Joint probability of a success outcome and the teleported (ancilla, Bob)
/// state it heralds, reduced to the (k_a~, k_B) registry. With
/// `correct = true` the σ_z correction is applied to k_B on Psi4.
pub fn teleported_state(
    input: &InputQubitSpec,
    phi: f64,
    outcome: BellOutcome,
    correct: bool,
) -> Result<(f64, PureState)> {
    let pattern: [u8; 2] = match outcome {
        BellOutcome::Psi3 => [1, 0],
        BellOutcome::Psi4 => [0, 1],
        other => {
            return Err(Error::InvalidConfig(format!(
                "teleported state is defined for the success outcomes, not {other:?}"
            )))
        }
    };
    let state = state_after_alice(input, phi)?;
    let (p, cond) = condition_on_pattern(&state, &[DET_1, DET_2], &pattern)?;
    let cond = cond.ok_or(Error::ZeroNorm)?;
    let (_, reduced) = condition_on_pattern(&cond, &[SOURCE, ALICE], &[0, 0])?;
    let mut reduced = reduced.ok_or(Error::ZeroNorm)?;
    if correct && outcome == BellOutcome::Psi4 {
        reduced = apply_pauli_z(&reduced, BOB)?;
    }
    Ok((p, reduced))
}

/// The source state rewritten on Bob's side: k_S renamed to k_B, modes
/// ordered (k_a~, k_B) to line up with [`teleported_state`] output.
pub fn teleported_reference(input: &InputQubitSpec) -> Result<PureState> {
    prepare_source(input)?
        .rename_mode(SOURCE, BOB)?
        .permuted(&[ANCILLA, BOB])
}

/// Click distribution on Bob's verification detectors (D1*, D2*) given an
/// Alice success outcome, honoring the config's variant and efficiency.
pub fn verification_click_distribution(
    config: &ExperimentConfig,
    phi: f64,
    outcome: BellOutcome,
) -> Result<OutcomeDistribution> {
    let input = config.input()?;
    let correct = config.variant == Variant::Active;
    let (_, state) = teleported_state(&input, phi, outcome, correct)?;
    let state = state.add_modes([DET_1S, DET_2S])?;
    let out = apply_beam_splitter(&state, &verification_bs(config.bsb_r_sq_effective())?)?;
    let model = DetectorModel::threshold(config.eta)?;
    click_distribution(&out, &[(DET_1S, model), (DET_2S, model)])
}

fn run_point(config: &ExperimentConfig, phi: f64, variant: Variant) -> Result<FringeRecord> {
    let input = config.input()?;
    let bs_b = verification_bs(config.bsb_r_sq_effective())?;
    let state = state_after_alice(&input, phi)?;

    let mut joint = [0.0f64; 4];
    for (outcome, pattern) in [(BellOutcome::Psi3, [1u8, 0]), (BellOutcome::Psi4, [0u8, 1])] {
        let (p, cond) = condition_on_pattern(&state, &[DET_1, DET_2], &pattern)?;
        let Some(mut cond) = cond else { continue };
        if variant == Variant::Active && outcome == BellOutcome::Psi4 {
            cond = apply_pauli_z(&cond, BOB)?;
        }
        let cond = cond.add_modes([DET_1S, DET_2S])?;
        let out = apply_beam_splitter(&cond, &bs_b)?;
        let dist = outcome_distribution(&out, &[DET_1S, DET_2S])?;
        for pair in PairId::ALL {
            if pair.alice_outcome() == outcome {
                let bob_pattern = if pair.bob_mode() == DET_1S { [1u8, 0] } else { [0u8, 1] };
                joint[pair.index()] = p * dist.probability(&bob_pattern);
            }
        }
    }

    let success: f64 = joint.iter().sum();
    let pairs = PairId::ALL.map(|pair| {
        let j = joint[pair.index()];
        PairProbability {
            pair,
            joint: j,
            conditional: if success > 0.0 { j / success } else { 0.0 },
            counts: 0,
        }
    });
    Ok(FringeRecord {
        phi,
        mirror_um: phase_to_mirror(phi, config.effective_lambda_um())?,
        pairs,
    })
}

/// One passive-protocol sweep point.
pub fn run_passive(config: &ExperimentConfig, phi: f64) -> Result<FringeRecord> {
    if config.variant != Variant::Passive {
        return Err(Error::InvalidConfig(
            "run_passive called with an active-variant config".into(),
        ));
    }
    run_point(config, phi, Variant::Passive)
}

/// One active-protocol sweep point: σ_z is applied to k_B whenever D2
/// heralds Psi4, before the verification splitter.
pub fn run_active(config: &ExperimentConfig, phi: f64) -> Result<FringeRecord> {
    if config.variant != Variant::Active {
        return Err(Error::InvalidConfig(
            "run_active called with a passive-variant config".into(),
        ));
    }
    run_point(config, phi, Variant::Active)
}

/// Analytic fringe over the configured phase grid. Points are independent
/// pure computations; they run in parallel and are returned in grid order.
pub fn fringe_scan(config: &ExperimentConfig) -> Result<Vec<FringeRecord>> {
    config.validate()?;
    let points = config.phase_points()?;
    points
        .par_iter()
        .map(|&phi| run_point(config, phi, config.variant))
        .collect()
}

/// Fringe visibility of one pair's conditional probability over a phase
/// sweep. A flat fringe is reported as zero visibility with the flag set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisibilityPoint {
    pub alpha_sq: f64,
    pub visibility: f64,
    pub degenerate: bool,
}

/// V = (max − min)/(max + min) of `pair`'s conditional probability over the
/// config's phase sweep, for each α² in `alpha_grid`. The verification
/// splitter is frozen at the config's effective r_B² while α² varies.
pub fn visibility_sweep(
    config: &ExperimentConfig,
    alpha_grid: &[f64],
    pair: PairId,
) -> Result<Vec<VisibilityPoint>> {
    config.validate()?;
    let bsb_r_sq = config.bsb_r_sq_effective();
    alpha_grid
        .par_iter()
        .map(|&alpha_sq| {
            let point_config = ExperimentConfig {
                alpha_sq,
                bsb_r_sq: Some(bsb_r_sq),
                ..config.clone()
            };
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for phi in point_config.phase_points()? {
                let record = run_point(&point_config, phi, point_config.variant)?;
                let p = record.pair(pair).conditional;
                lo = lo.min(p);
                hi = hi.max(p);
            }
            let degenerate = hi + lo <= 0.0 || hi - lo <= 1e-12 * (hi + lo);
            Ok(VisibilityPoint {
                alpha_sq,
                visibility: if degenerate { 0.0 } else { (hi - lo) / (hi + lo) },
                degenerate,
            })
        })
        .collect()
}
