//! Drift, shadowing and landing-direction diagnostics for hyperbolic Brownian motion.

use std::f64::consts::TAU;

use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::diffusion::{increment, sampler::check_horizon};
use crate::error::{invalid, Result};
use crate::hypgeo::DiscPoint;
use crate::rng::{linear_fit, quantile, RngStream};

/// Extra time simulated past the last reported time to fix the landing direction.
pub const LANDING_EXTRA_TIME: f64 = 20.0;

/// Quantiles of the normalised statistics at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowRow {
    pub t: f64,
    /// Quantiles of `dist(ω(t), γ_ω(t)) / (sqrt(t) (log t)^1.5)`.
    pub shadow_q50: f64,
    pub shadow_q95: f64,
    /// Quantiles of `|dist(ω(t), 0) - t| / (sqrt(t) (log t)^1.5)`.
    pub drift_q50: f64,
    pub drift_q95: f64,
    /// Median of `dist(ω(t), 0) / t`.
    pub drift_ratio_median: f64,
}

#[derive(Clone, Debug)]
pub struct ShadowingReport {
    pub rows: Vec<ShadowRow>,
    /// Log-log slope of the 95th percentile of the shadowing statistic.
    pub shadow_slope: Option<f64>,
    pub drift_slope: Option<f64>,
    pub passed: bool,
}

fn normaliser(t: f64) -> f64 {
    t.sqrt() * t.ln().powf(1.5)
}

// Distance from (rho, phi) to the point at distance t on the ray at angle phi + dphi.
fn ray_distance(rho: f64, t: f64, dphi: f64) -> f64 {
    let s = (0.5 * (rho - t)).sinh();
    let h = (0.5 * dphi).sin();
    2.0 * (s * s + rho.sinh() * t.sinh() * h * h).sqrt().asinh()
}

/// Per path, the landing direction is read off the angle at time
/// `max(t_list) + LANDING_EXTRA_TIME`. Angular offsets are tail sums of the
/// per-step increments, which keeps them accurate far from the origin.
pub fn shadowing_report(n_paths: usize, t_list: &[f64], step: f64, rng: &RngStream) -> Result<ShadowingReport> {
    let mut times = t_list.to_vec();
    times.sort_by(|a, b| a.total_cmp(b));
    let t_max = *times.last().ok_or_else(|| invalid("t_list", "must not be empty"))?;
    if t_max < 20.0 || times[0] < 0.0 {
        return Err(invalid("t_list", "times must be >= 0 with maximum >= 20"));
    }
    let t_end = t_max + LANDING_EXTRA_TIME;
    let n = check_horizon(t_end, step)?;
    let h = t_end / n as f64;
    let marks: Vec<usize> = times.iter().map(|t| (t / h).round() as usize).collect();

    // per path: (rho, dphi to landing) at each mark
    let per_path = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut g = rng.child(i).rng();
            let mut p = DiscPoint::ORIGIN;
            let mut rho_at = vec![0.0; marks.len()];
            // angle increments accumulated between consecutive marks
            let mut segment = vec![0.0; marks.len() + 1];
            let mut seg = 0;
            for k in 0..=n {
                while seg < marks.len() && marks[seg] == k {
                    rho_at[seg] = p.rho();
                    seg += 1;
                }
                if k == n {
                    break;
                }
                let (len, bearing) = increment(&mut g, h);
                let (q, dphi) = p.displace(len, bearing);
                segment[seg] += dphi;
                p = q;
            }
            let mut tail = vec![0.0; marks.len()];
            let mut acc = 0.0;
            for j in (0..marks.len()).rev() {
                acc += segment[j + 1];
                tail[j] = acc;
            }
            (rho_at, tail)
        })
        .collect::<Vec<_>>();

    let mut rows = Vec::with_capacity(times.len());
    for (j, &t) in times.iter().enumerate() {
        if t == 0.0 {
            rows.push(ShadowRow {
                t,
                shadow_q50: 0.0,
                shadow_q95: 0.0,
                drift_q50: 0.0,
                drift_q95: 0.0,
                drift_ratio_median: f64::NAN,
            });
            continue;
        }
        let norm = if t > 1.0 { normaliser(t) } else { 1.0 };
        let shadow: Vec<f64> = per_path.iter().map(|(r, d)| ray_distance(r[j], t, d[j]) / norm).collect();
        let drift: Vec<f64> = per_path.iter().map(|(r, _)| (r[j] - t).abs() / norm).collect();
        let ratio: Vec<f64> = per_path.iter().map(|(r, _)| r[j] / t).collect();
        rows.push(ShadowRow {
            t,
            shadow_q50: quantile(&shadow, 0.5),
            shadow_q95: quantile(&shadow, 0.95),
            drift_q50: quantile(&drift, 0.5),
            drift_q95: quantile(&drift, 0.95),
            drift_ratio_median: quantile(&ratio, 0.5),
        });
    }
    let fit = |f: &dyn Fn(&ShadowRow) -> f64| {
        let (x, y): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.t > 1.0 && f(r) > 0.0)
            .map(|r| (r.t.ln(), f(r).ln()))
            .unzip();
        linear_fit(&x, &y).map(|(s, _)| s)
    };
    let shadow_slope = fit(&|r| r.shadow_q95);
    let drift_slope = fit(&|r| r.drift_q95);
    let passed = shadow_slope.is_some_and(|s| s <= 0.1) && drift_slope.is_some_and(|s| s <= 0.1);
    Ok(ShadowingReport {
        rows,
        shadow_slope,
        drift_slope,
        passed,
    })
}

/// Chi-square test of the final angular coordinate against the uniform law.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformityReport {
    pub counts: Vec<usize>,
    pub statistic: f64,
    pub p_value: f64,
    pub passed: bool,
}

/// Bins the angle at time `t`, shifted by `shift_turns` of a full turn.
pub fn direction_distribution_check(
    n_paths: usize,
    t: f64,
    step: f64,
    n_bins: usize,
    shift_turns: f64,
    rng: &RngStream,
) -> Result<UniformityReport> {
    if !(t.is_finite() && t >= 40.0) {
        return Err(invalid("t", format!("must be >= 40, got {t}")));
    }
    if n_bins == 0 || n_paths == 0 {
        return Err(invalid("n_bins", "bins and paths must be positive"));
    }
    let n = check_horizon(t, step)?;
    let h = t / n as f64;
    let angles = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut g = rng.child(i).rng();
            let mut p = DiscPoint::ORIGIN;
            for _ in 0..n {
                let (len, bearing) = increment(&mut g, h);
                p = p.displace(len, bearing).0;
            }
            p.phi()
        })
        .collect::<Vec<f64>>();
    let mut counts = vec![0usize; n_bins];
    for phi in angles {
        let turns = (phi / TAU + shift_turns).rem_euclid(1.0);
        let bin = ((turns * n_bins as f64) as usize).min(n_bins - 1);
        counts[bin] += 1;
    }
    if n_bins == 1 {
        return Ok(UniformityReport {
            counts,
            statistic: 0.0,
            p_value: 1.0,
            passed: true,
        });
    }
    let expected = n_paths as f64 / n_bins as f64;
    let statistic: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let chi = ChiSquared::new((n_bins - 1) as f64).expect("positive degrees of freedom");
    let p_value = chi.sf(statistic);
    Ok(UniformityReport {
        counts,
        statistic,
        p_value,
        passed: p_value > 0.001,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_distance_examples() {
        assert_eq!(ray_distance(5.0, 5.0, 0.0), 0.0);
        assert!((ray_distance(7.0, 5.0, 0.0) - 2.0).abs() < 1e-12);
        // perpendicular offset: cosh d = cosh^2 r at the same radius with angle π
        let d = ray_distance(2.0, 2.0, std::f64::consts::PI);
        assert!((d - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_bin_is_uniform() {
        let r = direction_distribution_check(50, 40.0, 0.05, 1, 0.0, &RngStream::new(0, 0)).unwrap();
        assert!(r.passed && r.p_value == 1.0 && r.counts == vec![50]);
    }

    #[test]
    fn rotation_by_whole_bins_keeps_the_statistic() {
        let s = RngStream::new(4, 0);
        let a = direction_distribution_check(500, 40.0, 0.05, 16, 0.0, &s).unwrap();
        let b = direction_distribution_check(500, 40.0, 0.05, 16, 3.0 / 16.0, &s).unwrap();
        assert!((a.statistic - b.statistic).abs() <= 1e-12 * a.statistic.max(1.0));
        let mut rotated = a.counts.clone();
        rotated.rotate_right(3);
        assert_eq!(rotated, b.counts);
    }

    #[test]
    fn zero_time_rows_are_zero() {
        let r = shadowing_report(50, &[0.0, 10.0, 20.0], 0.05, &RngStream::new(1, 0)).unwrap();
        assert_eq!(r.rows[0].shadow_q95, 0.0);
        assert!(shadowing_report(10, &[5.0], 0.05, &RngStream::new(1, 0)).is_err());
    }
}
