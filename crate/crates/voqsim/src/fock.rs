//! Sparse multimode Fock states with a bounded per-mode photon number.
//!
//! A [`PureState`] is a sparse map from occupation vectors to complex
//! amplitudes, indexed against an immutable [`ModeRegistry`]. All operations
//! return new values; nothing here mutates shared state, so states can be
//! handed freely to parallel sweep workers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default per-mode photon cap. Two photons implement the whole protocol;
/// the cap can be raised to [`MAX_PHOTON_CAP`] for headroom.
pub const DEFAULT_PHOTON_CAP: u8 = 2;

/// Largest supported per-mode photon cap.
pub const MAX_PHOTON_CAP: u8 = 4;

/// Amplitudes with modulus below this threshold are pruned after every
/// operation. Small enough to only ever discard floating-point dust.
pub const AMPLITUDE_EPS: f64 = 1e-14;

/// Index of a mode inside its registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeId(pub(crate) usize);

impl ModeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Ordered, immutable set of named optical modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegistry {
    names: Vec<String>,
}

impl ModeRegistry {
    /// Builds a registry from mode names. Names must be unique; order is
    /// fixed for the lifetime of the registry.
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateMode(name.clone()));
            }
        }
        Ok(Self { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, id: ModeId) -> &str {
        &self.names[id.0]
    }

    /// Looks a mode up by name.
    pub fn mode(&self, name: &str) -> Result<ModeId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(ModeId)
            .ok_or_else(|| Error::UnknownMode(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// Registry with `extra` appended after the existing modes.
    pub fn extended<I, S>(&self, extra: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(self.names.iter().cloned().chain(extra.into_iter().map(Into::into)))
    }

    /// Concatenation of two disjoint registries.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if let Some(name) = other.names.iter().find(|n| self.contains(n)) {
            return Err(Error::OverlappingRegistries(name.clone()));
        }
        self.extended(other.names.iter().cloned())
    }
}

/// Per-mode photon counts, one entry per registry mode.
///
/// Derives `Ord` so occupation vectors sort lexicographically, which fixes
/// the term order in [`PureState`] and in the canonical serialization.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<u8>);

impl Occupation {
    pub fn new(counts: Vec<u8>) -> Self {
        Self(counts)
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, mode: ModeId) -> u8 {
        self.0[mode.0]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| u32::from(n)).sum()
    }

    fn validate(&self, registry: &ModeRegistry, cap: u8) -> Result<()> {
        if self.0.len() != registry.len() {
            return Err(Error::OccupationLength {
                got: self.0.len(),
                expected: registry.len(),
            });
        }
        for (i, &n) in self.0.iter().enumerate() {
            if n > cap {
                return Err(Error::PhotonCapExceeded {
                    mode: registry.names[i].clone(),
                    occ: n,
                    cap,
                });
            }
        }
        Ok(())
    }
}

impl From<&[u8]> for Occupation {
    fn from(counts: &[u8]) -> Self {
        Self(counts.to_vec())
    }
}

impl<const N: usize> From<[u8; N]> for Occupation {
    fn from(counts: [u8; N]) -> Self {
        Self(counts.to_vec())
    }
}

/// Sparse pure state: occupation vector -> complex amplitude.
#[derive(Debug, Clone)]
pub struct PureState {
    registry: Arc<ModeRegistry>,
    terms: BTreeMap<Occupation, Complex64>,
    photon_cap: u8,
}

impl PureState {
    /// Single-term state `|occ>` with amplitude 1.
    pub fn basis_state(registry: Arc<ModeRegistry>, occ: impl Into<Occupation>) -> Result<Self> {
        Self::basis_state_with_cap(registry, occ, DEFAULT_PHOTON_CAP)
    }

    /// Same as [`PureState::basis_state`] with an explicit per-mode photon cap.
    pub fn basis_state_with_cap(
        registry: Arc<ModeRegistry>,
        occ: impl Into<Occupation>,
        photon_cap: u8,
    ) -> Result<Self> {
        let cap = photon_cap.min(MAX_PHOTON_CAP);
        let occ = occ.into();
        occ.validate(&registry, cap)?;
        let mut terms = BTreeMap::new();
        terms.insert(occ, Complex64::new(1.0, 0.0));
        Ok(Self {
            registry,
            terms,
            photon_cap: cap,
        })
    }

    /// Normalized linear combination `sum_i c_i |state_i>`.
    ///
    /// All constituents must share one registry; the result is pruned and
    /// normalized, and a zero-norm combination is rejected.
    pub fn superpose(terms: &[(Complex64, &PureState)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::EmptySuperposition)?;
        let registry = Arc::clone(&first.registry);
        let cap = terms.iter().map(|(_, s)| s.photon_cap).max().unwrap();
        let mut combined: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (coeff, state) in terms {
            if state.registry != registry {
                return Err(Error::RegistryMismatch);
            }
            for (occ, amp) in &state.terms {
                *combined.entry(occ.clone()).or_insert(Complex64::new(0.0, 0.0)) += coeff * amp;
            }
        }
        Self {
            registry,
            terms: combined,
            photon_cap: cap,
        }
        .pruned()
        .normalized()
    }

    /// `<self|other>`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, amp) in &self.terms {
            if let Some(b) = other.terms.get(occ) {
                acc += amp.conj() * b;
            }
        }
        Ok(acc)
    }

    /// Tensor product over the concatenated registry. Mode sets must be
    /// disjoint; amplitudes multiply termwise.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let registry = Arc::new(self.registry.concat(&other.registry)?);
        let cap = self.photon_cap.max(other.photon_cap);
        let mut terms = BTreeMap::new();
        for (occ_a, amp_a) in &self.terms {
            for (occ_b, amp_b) in &other.terms {
                let mut counts = Vec::with_capacity(registry.len());
                counts.extend_from_slice(occ_a.counts());
                counts.extend_from_slice(occ_b.counts());
                terms.insert(Occupation(counts), amp_a * amp_b);
            }
        }
        Self {
            registry,
            terms,
            photon_cap: cap,
        }
        .pruned()
        .ok_nonempty()
    }

    /// State over an extended registry; the new modes start in vacuum.
    pub fn add_modes<I, S>(&self, extra: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let extra: Vec<String> = extra.into_iter().map(Into::into).collect();
        let registry = Arc::new(self.registry.extended(extra.iter().cloned())?);
        let terms = self
            .terms
            .iter()
            .map(|(occ, amp)| {
                let mut counts = occ.counts().to_vec();
                counts.resize(registry.len(), 0);
                (Occupation(counts), *amp)
            })
            .collect();
        Ok(Self {
            registry,
            terms,
            photon_cap: self.photon_cap,
        })
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn photon_cap(&self) -> u8 {
        self.photon_cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Amplitude of `occ`, zero if the term is absent.
    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.terms.get(occ).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales the state to unit norm. Idempotent.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sq().sqrt();
        if norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        for amp in self.terms.values_mut() {
            *amp /= norm;
        }
        Ok(self)
    }

    pub(crate) fn pruned(mut self) -> Self {
        self.terms.retain(|_, amp| amp.norm() >= AMPLITUDE_EPS);
        self
    }

    pub(crate) fn ok_nonempty(self) -> Result<Self> {
        if self.terms.is_empty() {
            Err(Error::ZeroNorm)
        } else {
            Ok(self)
        }
    }

    pub(crate) fn from_parts(
        registry: Arc<ModeRegistry>,
        terms: BTreeMap<Occupation, Complex64>,
        photon_cap: u8,
    ) -> Self {
        Self {
            registry,
            terms,
            photon_cap,
        }
    }

    /// Same state with one mode renamed; occupations are untouched.
    pub fn rename_mode(&self, old: &str, new: &str) -> Result<Self> {
        let idx = self.registry.mode(old)?.0;
        let names = self.registry.names().iter().enumerate().map(|(i, n)| {
            if i == idx {
                new.to_string()
            } else {
                n.clone()
            }
        });
        Ok(Self {
            registry: Arc::new(ModeRegistry::new(names)?),
            terms: self.terms.clone(),
            photon_cap: self.photon_cap,
        })
    }

    /// Same state with modes reordered to `order`, which must be a
    /// permutation of the registry's names.
    pub fn permuted(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.registry.len() {
            return Err(Error::OccupationLength {
                got: order.len(),
                expected: self.registry.len(),
            });
        }
        let perm: Vec<usize> = order
            .iter()
            .map(|name| self.registry.mode(name).map(|id| id.0))
            .collect::<Result<_>>()?;
        let registry = Arc::new(ModeRegistry::new(order.iter().copied())?);
        let terms = self
            .terms
            .iter()
            .map(|(occ, amp)| {
                let counts: Vec<u8> = perm.iter().map(|&i| occ.counts()[i]).collect();
                (Occupation::new(counts), *amp)
            })
            .collect();
        Ok(Self {
            registry,
            terms,
            photon_cap: self.photon_cap,
        })
    }

    /// Canonical textual form: one `n1,n2,...,nk : re,im` line per term,
    /// sorted lexicographically by occupation, after the global phase is
    /// fixed so the first stored amplitude is real and positive.
    pub fn to_canonical_string(&self) -> String {
        let phase = self
            .terms
            .values()
            .next()
            .map(|a| {
                let n = a.norm();
                if n > 0.0 {
                    a.conj() / n
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .unwrap_or(Complex64::new(1.0, 0.0));
        let mut out = String::new();
        for (occ, amp) in &self.terms {
            let rotated = amp * phase;
            let counts: Vec<String> = occ.counts().iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "{} : {:.16e},{:.16e}", counts.join(","), rotated.re, rotated.im);
        }
        out
    }
}
