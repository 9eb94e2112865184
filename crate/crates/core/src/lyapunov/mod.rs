//! Lyapunov spectrum estimators: along Brownian paths, along geodesic rays
//! and through heat-diffusion expectations, plus path diagnostics.

mod brownian;
mod geodesic;
mod shadow;
mod sphere;

pub use brownian::{
    benettin_spectrum, brownian_norm_rate, brownian_rate, check_exp_conversion, diffusion_spectrum,
    expectation_functions, walk_letters, BenettinOptions, ConversionReport, ExpectationInterval,
};
pub use geodesic::{
    expansion_interval, geodesic_average, geodesic_cocycle, geodesic_norm_rate, geodesic_rate, geodesic_spectrum,
    ExpansionSample, RateKind,
};
pub use shadow::{direction_distribution_check, shadowing_report, ShadowRow, ShadowingReport, UniformityReport};
pub use sphere::{optimize_on_sphere, sphere_samples};

use crate::cocycle::CMatrix;
use crate::rng::{McEstimate, Z95};

/// Rounding bound for exponents read off singular values at horizon `h`:
/// relative accuracy of the smallest one degrades with the condition number.
pub(crate) fn svd_rounding(exponents: &[f64], h: f64) -> f64 {
    let spread = ((exponents[0] - exponents[exponents.len() - 1]) * h).min(700.0);
    16.0 * f64::EPSILON * exponents.len() as f64 * spread.exp() / h
}

/// Smallest gap kept between distinct exponents.
pub const MIN_CLUSTER_GAP: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Brownian,
    Geodesic,
    Diffusion,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Brownian => "brownian",
            Method::Geodesic => "geodesic",
            Method::Diffusion => "diffusion",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "brownian" => Some(Method::Brownian),
            "geodesic" => Some(Method::Geodesic),
            "diffusion" => Some(Method::Diffusion),
            _ => None,
        }
    }
}

/// Where an estimate came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Provenance {
    pub master_seed: u64,
    pub stream_index: u64,
    pub n_samples: usize,
    pub horizon: f64,
    pub step: f64,
    pub workers: usize,
}

/// Estimated spectrum with multiplicities and Oseledec blocks.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// Strictly decreasing cluster exponents.
    pub exponents: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Columns grouped by cluster, in the order of `exponents`.
    pub oseledec_basis: CMatrix,
    /// 95% half-widths, rounding bound included.
    pub ci_halfwidths: Vec<f64>,
    /// Per-index estimates before clustering.
    pub raw: Vec<McEstimate>,
    /// Mean over samples of the sum of the per-sample exponents.
    pub exponent_sum: McEstimate,
    /// Bound on the floating-point error of `exponent_sum`.
    pub sum_rounding: f64,
    pub method: Method,
    pub provenance: Provenance,
}

impl SpectrumReport {
    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn top(&self) -> f64 {
        self.exponents[0]
    }

    /// 95% half-width of `exponent_sum`, rounding bound included.
    pub fn sum_halfwidth(&self) -> f64 {
        self.exponent_sum.ci_halfwidth() + self.sum_rounding
    }

    /// Builds a report from per-sample exponent vectors sorted in decreasing order,
    /// each with a bound on the rounding error of its sum.
    pub(crate) fn from_samples(
        samples: &[Vec<f64>],
        rounding: &[f64],
        basis: CMatrix,
        method: Method,
        provenance: Provenance,
    ) -> SpectrumReport {
        let d = samples[0].len();
        let raw: Vec<McEstimate> = (0..d)
            .map(|i| McEstimate::from_samples(&samples.iter().map(|s| s[i]).collect::<Vec<_>>()))
            .collect();
        let sums: Vec<f64> = samples.iter().map(|s| crate::rng::pairwise_sum(s)).collect();
        let exponent_sum = McEstimate::from_samples(&sums);
        let sum_rounding = rounding.iter().fold(0.0_f64, |m, &r| m.max(r));

        // merge neighbours closer than the gap threshold
        let mut blocks: Vec<Vec<usize>> = vec![vec![0]];
        for i in 1..d {
            let prev = *blocks.last().unwrap().last().unwrap();
            let gap = (raw[prev].mean - raw[i].mean).abs();
            let threshold = MIN_CLUSTER_GAP.max(3.0 * raw[prev].combined_se(&raw[i]));
            if gap < threshold {
                blocks.last_mut().unwrap().push(i);
            } else {
                blocks.push(vec![i]);
            }
        }
        let mut exponents = Vec::new();
        let mut multiplicities = Vec::new();
        let mut ci_halfwidths = Vec::new();
        for block in &blocks {
            let per_sample: Vec<f64> = samples
                .iter()
                .map(|s| block.iter().map(|&i| s[i]).sum::<f64>() / block.len() as f64)
                .collect();
            let est = McEstimate::from_samples(&per_sample);
            exponents.push(est.mean);
            multiplicities.push(block.len());
            ci_halfwidths.push(Z95 * est.std_error + sum_rounding);
        }
        SpectrumReport {
            exponents,
            multiplicities,
            oseledec_basis: basis,
            ci_halfwidths,
            raw,
            exponent_sum,
            sum_rounding,
            method,
            provenance,
        }
    }
}
