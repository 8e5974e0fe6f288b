//! Least-squares fringe fitting.
//!
//! The model A·(1 + V·cos(φ + φ₀)) is linear in (A, B, C) after rewriting
//! as A + B·cosφ + C·sinφ with B = A·V·cosφ₀, C = −A·V·sinφ₀, so the fit is
//! a 3×3 normal-equation solve; V and φ₀ plus their standard errors follow
//! from the delta method.

use serde::Serialize;

use crate::error::{Error, Result};

/// Fitted fringe parameters with 1σ standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    /// Visibility: (max − min)/(max + min) of the fitted sinusoid.
    pub v: f64,
    /// Phase offset in radians, in (−π, π].
    pub phi0: f64,
    /// Mean level (same units as the input samples).
    pub a: f64,
    /// Euclidean norm of the fit residuals.
    pub residual_norm: f64,
    pub v_stderr: f64,
    pub phi0_stderr: f64,
    pub a_stderr: f64,
}

fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Result<[f64; 3]> {
    let mut aug = [[0.0f64; 4]; 3];
    for i in 0..3 {
        aug[i][..3].copy_from_slice(&m[i]);
        aug[i][3] = rhs[i];
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs()))
            .unwrap();
        if aug[pivot][col].abs() < 1e-12 {
            return Err(Error::Fit("singular normal equations; φ grid too degenerate".into()));
        }
        aug.swap(col, pivot);
        let lead = aug[col];
        for (row, r) in aug.iter_mut().enumerate() {
            if row == col {
                continue;
            }
            let f = r[col] / lead[col];
            for k in col..4 {
                r[k] -= f * lead[k];
            }
        }
    }
    Ok([aug[0][3] / aug[0][0], aug[1][3] / aug[1][1], aug[2][3] / aug[2][2]])
}

fn invert3(m: [[f64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let mut inv = [[0.0f64; 3]; 3];
    for (j, col) in inv.iter_mut().enumerate() {
        let mut e = [0.0; 3];
        e[j] = 1.0;
        *col = solve3(m, e)?;
    }
    // solve3 returned columns of the inverse; transpose into row-major form
    let mut out = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = inv[j][i];
        }
    }
    Ok(out)
}

/// Fits A·(1 + V·cos(φ + φ₀)) to `samples` of (φ, value). Needs at least 5
/// distinct phases spanning a full period; values may be probabilities or
/// counts. On noise-free fringe input the residual norm is < 1e-9.
pub fn fit_visibility(samples: &[(f64, f64)]) -> Result<FitResult> {
    let mut distinct: Vec<f64> = samples.iter().map(|&(phi, _)| phi).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let n_distinct = distinct.len();
    if n_distinct < 5 {
        return Err(Error::Fit(format!(
            "need at least 5 distinct phase values, got {n_distinct}"
        )));
    }
    let span = distinct[n_distinct - 1] - distinct[0];
    let full_period = std::f64::consts::TAU * (n_distinct as f64 - 1.0) / n_distinct as f64;
    if span < full_period - 1e-9 {
        return Err(Error::Fit(format!(
            "phase range {span:.4} rad does not span a full period"
        )));
    }

    let n = samples.len();
    let mut xtx = [[0.0f64; 3]; 3];
    let mut xty = [0.0f64; 3];
    for &(phi, y) in samples {
        let row = [1.0, phi.cos(), phi.sin()];
        for i in 0..3 {
            for j in 0..3 {
                xtx[i][j] += row[i] * row[j];
            }
            xty[i] += row[i] * y;
        }
    }
    let [a, b, c] = solve3(xtx, xty)?;

    let mut rss = 0.0;
    for &(phi, y) in samples {
        let r = y - (a + b * phi.cos() + c * phi.sin());
        rss += r * r;
    }
    let residual_norm = rss.sqrt();

    if a.abs() < 1e-300 {
        return Err(Error::Fit("fitted mean level is zero; visibility undefined".into()));
    }
    let r_len = b.hypot(c);
    let v = r_len / a;
    let phi0 = if r_len > 0.0 { (-c).atan2(b) } else { 0.0 };

    let dof = n.saturating_sub(3);
    let sigma_sq = if dof > 0 { rss / dof as f64 } else { 0.0 };
    let cov = invert3(xtx)?;
    let (var_a, var_b, var_c) = (
        sigma_sq * cov[0][0],
        sigma_sq * cov[1][1],
        sigma_sq * cov[2][2],
    );
    let cov_ab = sigma_sq * cov[0][1];
    let cov_ac = sigma_sq * cov[0][2];
    let cov_bc = sigma_sq * cov[1][2];

    // delta method; at R = |(B,C)| = 0 the gradient of V degenerates, so fall
    // back to the unprojected component spread
    let (v_var, phi0_var) = if r_len > 1e-300 {
        let dv = [-r_len / (a * a), b / (a * r_len), c / (a * r_len)];
        let v_var = dv[0] * dv[0] * var_a
            + dv[1] * dv[1] * var_b
            + dv[2] * dv[2] * var_c
            + 2.0 * dv[0] * dv[1] * cov_ab
            + 2.0 * dv[0] * dv[2] * cov_ac
            + 2.0 * dv[1] * dv[2] * cov_bc;
        let dp = [0.0, c / (r_len * r_len), -b / (r_len * r_len)];
        let phi0_var =
            dp[1] * dp[1] * var_b + dp[2] * dp[2] * var_c + 2.0 * dp[1] * dp[2] * cov_bc;
        (v_var, phi0_var)
    } else {
        ((var_b + var_c) / (a * a), 0.0)
    };

    Ok(FitResult {
        v,
        phi0,
        a,
        residual_norm,
        v_stderr: v_var.max(0.0).sqrt(),
        phi0_stderr: phi0_var.max(0.0).sqrt(),
        a_stderr: var_a.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, Normal};

    fn grid(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| i as f64 * std::f64::consts::TAU / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn perfect_sine_squared_fringe_gives_unit_visibility() {
        let samples: Vec<(f64, f64)> = grid(64)
            .into_iter()
            .map(|phi| (phi, 0.5 * (phi / 2.0).sin().powi(2)))
            .collect();
        let fit = fit_visibility(&samples).unwrap();
        assert!((fit.v - 1.0).abs() < 1e-9);
        assert!((fit.a - 0.25).abs() < 1e-12);
        assert!(fit.residual_norm < 1e-9);
        // ½sin²(φ/2) = ¼(1 + cos(φ + π))
        assert!((fit.phi0.abs() - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn known_offset_fringe_is_recovered() {
        let (a, v, phi0) = (12.5, 0.73, 0.9);
        let samples: Vec<(f64, f64)> = grid(48)
            .into_iter()
            .map(|phi| (phi, a * (1.0 + v * (phi + phi0).cos())))
            .collect();
        let fit = fit_visibility(&samples).unwrap();
        assert!((fit.v - v).abs() < 1e-10);
        assert!((fit.phi0 - phi0).abs() < 1e-10);
        assert!((fit.a - a).abs() < 1e-10);
        assert!(fit.residual_norm < 1e-9);
    }

    #[test]
    fn preconditions_are_enforced() {
        let few: Vec<(f64, f64)> = grid(4).into_iter().map(|p| (p, 1.0)).collect();
        assert!(matches!(fit_visibility(&few), Err(Error::Fit(_))));

        let narrow: Vec<(f64, f64)> = (0..12)
            .map(|i| (i as f64 * 0.2, (i as f64 * 0.2).cos() + 2.0))
            .collect();
        assert!(matches!(fit_visibility(&narrow), Err(Error::Fit(_))));
    }

    #[test]
    fn flat_fringe_reports_zero_visibility() {
        let samples: Vec<(f64, f64)> = grid(16).into_iter().map(|p| (p, 3.0)).collect();
        let fit = fit_visibility(&samples).unwrap();
        assert!(fit.v < 1e-12);
        assert!((fit.a - 3.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_fit_lands_within_standard_errors() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 5.0).unwrap();
        let (a, v, phi0) = (250.0, 0.91, -0.4);
        let samples: Vec<(f64, f64)> = grid(64)
            .into_iter()
            .map(|phi| {
                let y = a * (1.0 + v * (phi + phi0).cos()) + noise.sample(&mut rng);
                (phi, y)
            })
            .collect();
        let fit = fit_visibility(&samples).unwrap();
        assert!((fit.v - v).abs() < 3.0 * fit.v_stderr);
        assert!((fit.phi0 - phi0).abs() < 3.0 * fit.phi0_stderr);
        assert!((fit.a - a).abs() < 3.0 * fit.a_stderr);
    }
}
