//! Optical elements: beam splitter, phase shifter, Pauli-z correction and
//! the beam-splitter loss channel.
//!
//! The beam splitter uses the real involutive convention
//! `a† -> t·c† + r·d†`, `b† -> r·c† - t·d†`; the matrix [[t, r], [r, -t]]
//! is its own inverse, so applying the same element twice is the identity.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{Occupation, PureState, AMPLITUDE_EPS};

const FACT: [u64; 9] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320];

fn binom(n: u32, k: u32) -> u64 {
    FACT[n as usize] / (FACT[k as usize] * FACT[(n - k) as usize])
}

/// Two-port beam splitter with real amplitudes r (reflection) and
/// t (transmission), r² + t² = 1.
///
/// Ports are mode names resolved against the state's registry when the
/// element is applied. Output ports must either coincide with the input
/// pair (photons redistributed in place) or name two other registry modes
/// that are vacuum in every term (photons moved there).
#[derive(Debug, Clone)]
pub struct BeamSplitterParams {
    r: f64,
    t: f64,
    input: (String, String),
    output: (String, String),
}

impl BeamSplitterParams {
    pub fn new(
        r: f64,
        t: f64,
        input: (impl Into<String>, impl Into<String>),
        output: (impl Into<String>, impl Into<String>),
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&t)
            || (r * r + t * t - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidBeamSplitter { r, t });
        }
        let input = (input.0.into(), input.1.into());
        let output = (output.0.into(), output.1.into());
        if input.0 == input.1 {
            return Err(Error::DegeneratePorts(input.0));
        }
        if output.0 == output.1 {
            return Err(Error::DegeneratePorts(output.0));
        }
        let out_in = [&output.0, &output.1]
            .iter()
            .filter(|o| ***o == input.0 || ***o == input.1)
            .count();
        if out_in == 1 {
            return Err(Error::MixedPorts);
        }
        Ok(Self { r, t, input, output })
    }

    /// Beam splitter with reflectivity r² = `r_sq`.
    pub fn from_r_sq(
        r_sq: f64,
        input: (impl Into<String>, impl Into<String>),
        output: (impl Into<String>, impl Into<String>),
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&r_sq) {
            return Err(Error::InvalidBeamSplitter { r: r_sq, t: f64::NAN });
        }
        Self::new(r_sq.sqrt(), (1.0 - r_sq).sqrt(), input, output)
    }

    /// 50:50 beam splitter.
    pub fn symmetric(
        input: (impl Into<String>, impl Into<String>),
        output: (impl Into<String>, impl Into<String>),
    ) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(s, s, input, output)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn input(&self) -> (&str, &str) {
        (&self.input.0, &self.input.1)
    }

    pub fn output(&self) -> (&str, &str) {
        (&self.output.0, &self.output.1)
    }
}

/// Amplitude <p,q|BS|n,m> for the convention above:
/// sqrt(p!q!/(n!m!)) · Σ_{i+j=p} C(n,i)C(m,j) tⁱ rⁿ⁻ⁱ rʲ (−t)ᵐ⁻ʲ.
///
/// Integer combinatorics stay in u64; the only floating-point work is the
/// power products and the final square root, so the (1,1)->(1,1) case gives
/// r·r − t·t, exactly 0.0 for a 50:50 splitter.
fn bs_coefficient(n: u32, m: u32, p: u32, q: u32, r: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    for i in p.saturating_sub(m)..=p.min(n) {
        let j = p - i;
        let sign = if (m - j) % 2 == 1 { -1.0 } else { 1.0 };
        let mag = (binom(n, i) * binom(m, j)) as f64
            * t.powi(i as i32)
            * r.powi((n - i) as i32)
            * r.powi(j as i32)
            * t.powi((m - j) as i32);
        sum += sign * mag;
    }
    sum * ((FACT[p as usize] * FACT[q as usize]) as f64
        / (FACT[n as usize] * FACT[m as usize]) as f64)
        .sqrt()
}

/// Applies `bs` to `state` by exact binomial expansion of each term's
/// creation-operator monomial. Norm is preserved within 1e-12.
pub fn apply_beam_splitter(state: &PureState, bs: &BeamSplitterParams) -> Result<PureState> {
    let reg = state.registry().clone();
    let a = reg.mode(&bs.input.0)?;
    let b = reg.mode(&bs.input.1)?;
    let c = reg.mode(&bs.output.0)?;
    let d = reg.mode(&bs.output.1)?;
    let in_place = c == a || c == b;
    if !in_place {
        for (occ, _) in state.terms() {
            for out in [c, d] {
                if occ.get(out) != 0 {
                    return Err(Error::OutputModeOccupied(reg.name(out).to_string()));
                }
            }
        }
    }

    let cap = state.photon_cap();
    let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let n = u32::from(occ.get(a));
        let m = u32::from(occ.get(b));
        if n + m == 0 {
            *out.entry(occ.clone()).or_insert(Complex64::new(0.0, 0.0)) += amp;
            continue;
        }
        for p in 0..=(n + m) {
            let q = n + m - p;
            let coeff = bs_coefficient(n, m, p, q, bs.r, bs.t);
            if amp.norm() * coeff.abs() < AMPLITUDE_EPS {
                continue;
            }
            if p > u32::from(cap) || q > u32::from(cap) {
                let (mode, occ) = if p > u32::from(cap) { (c, p) } else { (d, q) };
                return Err(Error::PhotonCapExceeded {
                    mode: reg.name(mode).to_string(),
                    occ: occ as u8,
                    cap,
                });
            }
            let mut counts = occ.counts().to_vec();
            counts[a.index()] = 0;
            counts[b.index()] = 0;
            counts[c.index()] = p as u8;
            counts[d.index()] = q as u8;
            *out.entry(Occupation::new(counts)).or_insert(Complex64::new(0.0, 0.0)) +=
                amp * coeff;
        }
    }
    PureState::from_parts(reg, out, cap).pruned().ok_nonempty()
}

/// Multiplies each term by exp(i·n·phi), n the term's occupation of `mode`.
pub fn apply_phase_shift(state: &PureState, mode: &str, phi: f64) -> Result<PureState> {
    let id = state.registry().mode(mode)?;
    map_amplitudes(state, |occ, amp| {
        let n = occ.get(id);
        if n == 0 {
            Ok(amp)
        } else {
            Ok(amp * Complex64::from_polar(1.0, f64::from(n) * phi))
        }
    })
}

/// σ_z on the qubit subspace of `mode`: |0> fixed, |1> negated (exactly).
pub fn apply_pauli_z(state: &PureState, mode: &str) -> Result<PureState> {
    let id = state.registry().mode(mode)?;
    map_amplitudes(state, |occ, amp| match occ.get(id) {
        0 => Ok(amp),
        1 => Ok(-amp),
        n => Err(Error::NonQubitOccupation {
            mode: mode.to_string(),
            occ: n,
        }),
    })
}

/// Loss channel on `mode` with survival probability `eta`: a beam splitter
/// with t = sqrt(eta) into the freshly added vacuum mode `loss_mode`. Global
/// norm is preserved; probability merely leaks into the loss mode, which is
/// marginalized at measurement.
pub fn apply_loss(state: &PureState, mode: &str, eta: f64, loss_mode: &str) -> Result<PureState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidEfficiency(eta));
    }
    state.registry().mode(mode)?;
    let extended = state.add_modes([loss_mode])?;
    if eta == 1.0 {
        return Ok(extended);
    }
    let bs = BeamSplitterParams::new(
        (1.0 - eta).sqrt(),
        eta.sqrt(),
        (mode, loss_mode),
        (mode, loss_mode),
    )?;
    apply_beam_splitter(&extended, &bs)
}

fn map_amplitudes(
    state: &PureState,
    mut f: impl FnMut(&Occupation, Complex64) -> Result<Complex64>,
) -> Result<PureState> {
    let mut terms = BTreeMap::new();
    for (occ, amp) in state.terms() {
        terms.insert(occ.clone(), f(occ, *amp)?);
    }
    Ok(PureState::from_parts(state.registry().clone(), terms, state.photon_cap()).pruned())
}
