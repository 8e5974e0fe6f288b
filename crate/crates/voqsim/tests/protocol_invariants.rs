//! Cross-route checks of the pipeline: closed-form fringe and visibility
//! formulas (derived independently of the state algebra), the Monte Carlo
//! detection distribution against analytic branch probabilities, sampler
//! consistency via chi-square, and fit standard-error coverage.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use voqsim::fit::fit_visibility;
use voqsim::mc::{detection_distribution, simulate_counts};
use voqsim::protocol::{
    fringe_scan, run_active, run_passive, visibility_sweep, ExperimentConfig, FringeRecord,
    PairId, PhaseSweep, Variant,
};

const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

/// Conditional pair probabilities from the interference algebra done by
/// hand: like pairs carry a -cos(phi) fringe for (D1-D1*), the partner of
/// each pair swaps r and t or flips the fringe sign.
fn closed_form_conditionals(alpha_sq: f64, r_sq: f64, phi: f64, variant: Variant) -> [f64; 4] {
    let (a, b) = (alpha_sq.sqrt(), (1.0 - alpha_sq).sqrt());
    let (r, t) = (r_sq.sqrt(), (1.0 - r_sq).sqrt());
    let cross = 2.0 * a * b * r * t * phi.cos();
    let p11 = a * a * r * r + b * b * t * t - cross;
    let p12 = a * a * t * t + b * b * r * r + cross;
    let (p21, p22) = match variant {
        Variant::Passive => (p11 + 2.0 * cross, p12 - 2.0 * cross),
        Variant::Active => (p11, p12),
    };
    [p11 / 2.0, p12 / 2.0, p21 / 2.0, p22 / 2.0]
}

fn config_for(alpha_sq: f64, r_sq: f64, variant: Variant) -> ExperimentConfig {
    ExperimentConfig {
        alpha_sq,
        bsb_r_sq: Some(r_sq),
        variant,
        ..ExperimentConfig::default()
    }
}

fn record_for(config: &ExperimentConfig, phi: f64) -> FringeRecord {
    match config.variant {
        Variant::Passive => run_passive(config, phi).unwrap(),
        Variant::Active => run_active(config, phi).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fringes_match_the_closed_form(
        alpha_sq in 0.0f64..=1.0,
        r_sq in 0.0f64..=1.0,
        phi in 0.0f64..TAU,
        active in proptest::bool::ANY,
    ) {
        let variant = if active { Variant::Active } else { Variant::Passive };
        let config = config_for(alpha_sq, r_sq, variant);
        let record = record_for(&config, phi);
        let want = closed_form_conditionals(alpha_sq, r_sq, phi, variant);
        for pair in PairId::ALL {
            let got = record.pair(pair).conditional;
            prop_assert!(
                (got - want[pair.index()]).abs() < 1e-12,
                "{pair}: got {got}, closed form {}",
                want[pair.index()]
            );
        }
    }

    #[test]
    fn joints_sum_to_the_success_probability(
        alpha_sq in 0.0f64..=1.0,
        r_sq in 0.0f64..=1.0,
        phi in 0.0f64..TAU,
    ) {
        let config = config_for(alpha_sq, r_sq, Variant::Passive);
        let record = record_for(&config, phi);
        let joint: f64 = record.pairs.iter().map(|p| p.joint).sum();
        prop_assert!((joint - 0.5).abs() < 1e-12, "joint sum {joint}");
        let conditional: f64 = record.pairs.iter().map(|p| p.conditional).sum();
        prop_assert!((conditional - 1.0).abs() < 1e-10, "conditional sum {conditional}");
        for p in &record.pairs {
            prop_assert!(p.joint >= -1e-15 && p.conditional >= -1e-15);
        }
    }

    #[test]
    fn noiseless_fit_recovers_fringe_parameters(
        a in 0.1f64..100.0,
        v in 0.0f64..=1.0,
        phi0 in -PI..PI,
    ) {
        let samples: Vec<(f64, f64)> = (0..16)
            .map(|i| {
                let phi = TAU * i as f64 / 16.0;
                (phi, a * (1.0 + v * (phi + phi0).cos()))
            })
            .collect();
        let fit = fit_visibility(&samples).unwrap();
        prop_assert!((fit.a - a).abs() < 1e-9 * a.max(1.0));
        prop_assert!((fit.v - v).abs() < 1e-9);
        if v > 1e-6 {
            let wrap = (fit.phi0 - phi0 + PI).rem_euclid(TAU) - PI;
            prop_assert!(wrap.abs() < 1e-7, "phi0 {} vs {}", fit.phi0, phi0);
        }
    }
}

#[test]
fn visibility_sweep_matches_the_closed_form() {
    for &r_sq in &[0.1, 0.2, 0.5, 0.8, 0.9] {
        let config = ExperimentConfig { bsb_r_sq: Some(r_sq), ..ExperimentConfig::default() };
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        for (pair, swap) in [(PairId::D1D1s, false), (PairId::D2D2s, true)] {
            let points = visibility_sweep(&config, &grid, pair).unwrap();
            for p in &points {
                let (a2, b2) = (p.alpha_sq, 1.0 - p.alpha_sq);
                let (rr, tt) = if swap { (1.0 - r_sq, r_sq) } else { (r_sq, 1.0 - r_sq) };
                let level = a2 * rr + b2 * tt;
                let amplitude = 2.0 * (a2 * b2 * rr * tt).sqrt();
                if level <= 1e-12 {
                    assert!(p.degenerate, "expected degenerate point at alpha_sq={a2}");
                    continue;
                }
                let want = amplitude / level;
                assert!(
                    (p.visibility - want).abs() < 1e-9,
                    "{pair}, r_sq={r_sq}, alpha_sq={a2}: V={} want {want}",
                    p.visibility
                );
            }
        }
    }
}

#[test]
fn analytic_fringe_has_negligible_fit_residual() {
    let config = ExperimentConfig {
        alpha_sq: 0.5,
        bsb_r_sq: Some(0.2),
        ..ExperimentConfig::default()
    };
    let records = fringe_scan(&config).unwrap();
    for pair in PairId::ALL {
        let series: Vec<(f64, f64)> = records
            .iter()
            .map(|r| (r.phi, r.pair(pair).conditional))
            .collect();
        let fit = fit_visibility(&series).unwrap();
        assert!(fit.residual_norm < 1e-10, "{pair}: residual {}", fit.residual_norm);
    }
}

/// Coincidence marginal of `pair` in a sampled-click distribution.
fn pair_marginal(dist: &[(Vec<u8>, f64)], pair: PairId) -> f64 {
    let ai = usize::from(pair.alice_mode() != voqsim::protocol::modes::DET_1);
    let bi = 2 + usize::from(pair.bob_mode() != voqsim::protocol::modes::DET_1S);
    dist.iter()
        .filter(|(pattern, _)| pattern[ai] >= 1 && pattern[bi] >= 1)
        .map(|(_, p)| p)
        .sum()
}

#[test]
fn detection_distribution_reproduces_analytic_joints() {
    for variant in [Variant::Passive, Variant::Active] {
        for &alpha_sq in &[0.3, 0.5] {
            for &r_sq in &[0.2, 0.5] {
                for &phi in &[0.7, PI] {
                    for &eta in &[1.0, 0.7] {
                        let mut config = config_for(alpha_sq, r_sq, variant);
                        config.eta = eta;
                        let record = record_for(&config, phi);
                        let dist = detection_distribution(&config, phi).unwrap();
                        let total: f64 = dist.iter().map(|(_, p)| p).sum();
                        assert!((total - 1.0).abs() < 1e-12, "not normalized: {total}");
                        for pair in PairId::ALL {
                            let got = pair_marginal(&dist, pair);
                            let want = eta * eta * record.pair(pair).joint;
                            assert!(
                                (got - want).abs() < 1e-12,
                                "{variant:?} {pair} alpha_sq={alpha_sq} r_sq={r_sq} \
                                 phi={phi} eta={eta}: {got} vs {want}"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn sampled_pair_frequencies_pass_chi_square() {
    // at phi = pi/2 the five categories (four pairs, no pair) have exact
    // probabilities [1/8, 1/8, 1/8, 1/8, 1/2]
    let expected = [0.125, 0.125, 0.125, 0.125, 0.5];
    let chi = ChiSquared::new(4.0).unwrap();
    let shots = 100_000u64;
    for seed in 1..=20u64 {
        let config = ExperimentConfig {
            alpha_sq: 0.5,
            bsb_r_sq: Some(0.5),
            phase: Some(PhaseSweep { start: PI / 2.0, stop: PI / 2.0, steps: 1 }),
            shots,
            seed,
            ..ExperimentConfig::default()
        };
        let report = simulate_counts(&config).unwrap();
        let record = &report.points[0].record;
        let mut observed = [0.0f64; 5];
        for pair in PairId::ALL {
            observed[pair.index()] = record.pair(pair).counts as f64;
        }
        observed[4] = shots as f64 - observed[..4].iter().sum::<f64>();
        let statistic: f64 = observed
            .iter()
            .zip(expected)
            .map(|(obs, p)| {
                let exp = p * shots as f64;
                (obs - exp).powi(2) / exp
            })
            .sum();
        let p_value = 1.0 - chi.cdf(statistic);
        assert!(p_value > 0.001, "seed {seed}: chi2 = {statistic:.2}, p = {p_value:.5}");
    }
}

#[test]
fn fit_errors_cover_the_truth_in_randomized_trials() {
    let mut rng = ChaCha12Rng::seed_from_u64(1234);
    let trials = 1000;
    let mut covered = 0;
    for _ in 0..trials {
        let a = rng.gen_range(50.0..500.0);
        let v = rng.gen_range(0.1..0.95);
        let phi0 = rng.gen_range(-PI..PI);
        let sigma = rng.gen_range(0.5..5.0);
        let noise = Normal::new(0.0, sigma).unwrap();
        let samples: Vec<(f64, f64)> = (0..65)
            .map(|i| {
                let phi = TAU * i as f64 / 64.0;
                (phi, a * (1.0 + v * (phi + phi0).cos()) + noise.sample(&mut rng))
            })
            .collect();
        let fit = fit_visibility(&samples).unwrap();
        let wrap = (fit.phi0 - phi0 + PI).rem_euclid(TAU) - PI;
        let ok = (fit.v - v).abs() <= 3.0 * fit.v_stderr && wrap.abs() <= 3.0 * fit.phi0_stderr;
        if ok {
            covered += 1;
        }
    }
    assert!(covered >= 990, "only {covered} of {trials} trials within 3 standard errors");
}
