//! Born-rule outcome distributions, post-selection and threshold detection.
//!
//! Detection with efficiency eta < 1 routes each detector mode through
//! [`apply_loss`] and marginalizes the loss modes, so the click statistics
//! come from the same state algebra as everything else; the binomial
//! thinning formula is used only as an independent oracle in tests.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::elements::apply_loss;
use crate::error::{Error, Result};
use crate::fock::{ModeRegistry, Occupation, PureState};

/// Detector with efficiency `eta`; threshold detectors report click/no-click,
/// resolving detectors report the surviving photon count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub eta: f64,
    pub resolving: bool,
}

impl DetectorModel {
    pub fn threshold(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidEfficiency(eta));
        }
        Ok(Self { eta, resolving: false })
    }

    pub fn resolving(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidEfficiency(eta));
        }
        Ok(Self { eta, resolving: true })
    }

    /// Lossless threshold detector.
    pub fn ideal() -> Self {
        Self { eta: 1.0, resolving: false }
    }
}

/// Joint detector result, one entry per measured detector in listing order:
/// a photon count for resolving detectors, 0/1 for threshold clicks.
pub type OutcomePattern = Vec<u8>;

/// Probability distribution over joint detector outcomes. Patterns hold one
/// entry per detector, in the order the detectors were listed; entries are
/// photon counts for resolving detectors and 0/1 clicks for threshold ones.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    detectors: Vec<String>,
    probs: BTreeMap<OutcomePattern, f64>,
}

impl OutcomeDistribution {
    pub(crate) fn from_map(detectors: Vec<String>, probs: BTreeMap<OutcomePattern, f64>) -> Self {
        Self { detectors, probs }
    }

    pub fn detectors(&self) -> &[String] {
        &self.detectors
    }

    pub fn probability(&self, pattern: &[u8]) -> f64 {
        self.probs.get(pattern).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], f64)> {
        self.probs.iter().map(|(p, &v)| (p.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    fn index_of(&self, detector: &str) -> Result<usize> {
        self.detectors
            .iter()
            .position(|d| d == detector)
            .ok_or_else(|| Error::UnknownDetector(detector.to_string()))
    }

    /// P(detector sees at least one photon / clicks).
    pub fn marginal_click_probability(&self, detector: &str) -> Result<f64> {
        let i = self.index_of(detector)?;
        Ok(self
            .probs
            .iter()
            .filter(|(pattern, _)| pattern[i] >= 1)
            .map(|(_, &p)| p)
            .sum())
    }

    /// Total-variation distance ½·Σ|p−q| over the union of patterns.
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        if self.detectors != other.detectors {
            return Err(Error::DetectorSetMismatch);
        }
        let mut acc = 0.0;
        for (pattern, &p) in &self.probs {
            acc += (p - other.probability(pattern)).abs();
        }
        for (pattern, &q) in &other.probs {
            if !self.probs.contains_key(pattern) {
                acc += q.abs();
            }
        }
        Ok(acc / 2.0)
    }

    /// Sorted `pattern : probability` lines for golden-file comparison.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        for (pattern, p) in &self.probs {
            let counts: Vec<String> = pattern.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "{} : {:.16e}", counts.join(","), p);
        }
        out
    }
}

/// Born-rule distribution of joint occupation patterns on `modes`; all other
/// modes (including loss modes) are summed over.
pub fn outcome_distribution(state: &PureState, modes: &[&str]) -> Result<OutcomeDistribution> {
    let reg = state.registry();
    let ids: Vec<_> = modes.iter().map(|m| reg.mode(m)).collect::<Result<_>>()?;
    let mut probs: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let pattern: Vec<u8> = ids.iter().map(|&id| occ.get(id)).collect();
        *probs.entry(pattern).or_insert(0.0) += amp.norm_sqr();
    }
    Ok(OutcomeDistribution::from_map(
        modes.iter().map(|m| m.to_string()).collect(),
        probs,
    ))
}

/// Projects onto `pattern` for the given modes. Returns the joint probability
/// and the renormalized conditional state over the remaining modes; a
/// zero-probability pattern yields `(0.0, None)` rather than an error.
pub fn condition_on_pattern(
    state: &PureState,
    modes: &[&str],
    pattern: &[u8],
) -> Result<(f64, Option<PureState>)> {
    let reg = state.registry();
    let ids: Vec<_> = modes.iter().map(|m| reg.mode(m)).collect::<Result<_>>()?;
    if pattern.len() != ids.len() {
        return Err(Error::OccupationLength {
            got: pattern.len(),
            expected: ids.len(),
        });
    }
    let measured: Vec<usize> = ids.iter().map(|id| id.index()).collect();
    let remaining: Vec<usize> = (0..reg.len()).filter(|i| !measured.contains(i)).collect();

    let mut p = 0.0;
    let mut terms = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let matches = ids
            .iter()
            .zip(pattern)
            .all(|(&id, &want)| occ.get(id) == want);
        if !matches {
            continue;
        }
        p += amp.norm_sqr();
        let counts: Vec<u8> = remaining.iter().map(|&i| occ.counts()[i]).collect();
        terms.insert(Occupation::new(counts), *amp);
    }
    if terms.is_empty() {
        return Ok((0.0, None));
    }
    let sub_registry = ModeRegistry::new(
        remaining.iter().map(|&i| reg.names()[i].clone()),
    )?;
    let conditional = PureState::from_parts(
        std::sync::Arc::new(sub_registry),
        terms,
        state.photon_cap(),
    )
    .normalized()?;
    Ok((p, Some(conditional)))
}

/// Joint detection distribution for the listed detectors. Efficiency is
/// applied per detector through a loss-mode beam splitter; threshold
/// detectors then collapse counts to click/no-click.
pub fn click_distribution(
    state: &PureState,
    detectors: &[(&str, DetectorModel)],
) -> Result<OutcomeDistribution> {
    let mut lossy = state.clone();
    for (mode, model) in detectors {
        if model.eta < 1.0 {
            let loss_name = format!("loss_{mode}");
            lossy = apply_loss(&lossy, mode, model.eta, &loss_name)?;
        }
    }
    let modes: Vec<&str> = detectors.iter().map(|(m, _)| *m).collect();
    let resolved = outcome_distribution(&lossy, &modes)?;

    let mut probs: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    for (pattern, p) in resolved.iter() {
        let collapsed: Vec<u8> = pattern
            .iter()
            .zip(detectors)
            .map(|(&n, (_, model))| if model.resolving { n } else { n.min(1) })
            .collect();
        *probs.entry(collapsed).or_insert(0.0) += p;
    }
    Ok(OutcomeDistribution::from_map(
        modes.iter().map(|m| m.to_string()).collect(),
        probs,
    ))
}

/// P(both detectors of `pair` see at least one photon).
pub fn coincidence_probability(dist: &OutcomeDistribution, pair: (&str, &str)) -> Result<f64> {
    let i = dist.index_of(pair.0)?;
    let j = dist.index_of(pair.1)?;
    Ok(dist
        .probs
        .iter()
        .filter(|(pattern, _)| pattern[i] >= 1 && pattern[j] >= 1)
        .map(|(_, &p)| p)
        .sum())
}

/// Coincidence of `pair` with every detector in `silent` seeing nothing.
pub fn exclusive_coincidence_probability(
    dist: &OutcomeDistribution,
    pair: (&str, &str),
    silent: &[&str],
) -> Result<f64> {
    let i = dist.index_of(pair.0)?;
    let j = dist.index_of(pair.1)?;
    let quiet: Vec<usize> = silent
        .iter()
        .map(|d| dist.index_of(d))
        .collect::<Result<_>>()?;
    Ok(dist
        .probs
        .iter()
        .filter(|(pattern, _)| {
            pattern[i] >= 1 && pattern[j] >= 1 && quiet.iter().all(|&k| pattern[k] == 0)
        })
        .map(|(_, &p)| p)
        .sum())
}
