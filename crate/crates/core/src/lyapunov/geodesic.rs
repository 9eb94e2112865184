//! Expansion rates along geodesic rays from the origin.

use rayon::prelude::*;

use super::sphere::{optimize_on_sphere, sphere_samples};
use super::{svd_rounding, Method, Provenance, SpectrumReport};
use crate::cocycle::{CMatrix, CVector, CocycleValue, Representation};
use crate::error::{invalid, Result};
use crate::rng::{pairwise_sum, McEstimate, RngStream};
use crate::surface::{FuchsianGroup, GeodesicWalker, GEODESIC_SPACING};

/// One value of the expansion rate `E(0, θ, R[, v])`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionSample {
    pub theta: f64,
    pub big_r: f64,
    pub value: f64,
    pub vector: Option<CVector>,
}

fn check_ray(theta: f64, big_r: f64) -> Result<()> {
    if !(0.0..1.0).contains(&theta) {
        return Err(invalid("theta", format!("must lie in [0, 1), got {theta}")));
    }
    if !(big_r.is_finite() && big_r > 0.0) {
        return Err(invalid("R", format!("must be finite and > 0, got {big_r}")));
    }
    Ok(())
}

/// `A(γ_θ, R)` along the ray from the origin, followed at spacing
/// [`GEODESIC_SPACING`].
pub fn geodesic_cocycle(rep: &Representation, group: &FuchsianGroup, theta: f64, big_r: f64) -> Result<CocycleValue> {
    rep.require_exact()?;
    check_ray(theta, big_r)?;
    let mut walker = GeodesicWalker::from_origin(group, theta);
    let mut letters = Vec::new();
    walker.walk(big_r, &mut letters)?;
    let mut a = CocycleValue::identity(rep.dim());
    for &l in &letters {
        a.mul_left(rep.letter(-l));
    }
    Ok(a)
}

/// `(1/R) log(||A(γ_θ, R) v|| / ||v||)`.
pub fn geodesic_rate(
    rep: &Representation,
    group: &FuchsianGroup,
    theta: f64,
    big_r: f64,
    v: &CVector,
) -> Result<ExpansionSample> {
    if v.len() != rep.dim() || !(v.norm() > 0.0) {
        return Err(invalid("v", "must be a nonzero vector of the representation's dimension"));
    }
    let a = geodesic_cocycle(rep, group, theta, big_r)?;
    Ok(ExpansionSample {
        theta,
        big_r,
        value: a.log_stretch(v) / big_r,
        vector: Some(v.clone()),
    })
}

/// `(1/R) log ||A(γ_θ, R)||`.
pub fn geodesic_norm_rate(rep: &Representation, group: &FuchsianGroup, theta: f64, big_r: f64) -> Result<ExpansionSample> {
    let a = geodesic_cocycle(rep, group, theta, big_r)?;
    Ok(ExpansionSample {
        theta,
        big_r,
        value: a.log_norm() / big_r,
        vector: None,
    })
}

/// What [`geodesic_average`] averages.
#[derive(Clone, Debug)]
pub enum RateKind {
    Norm,
    Vector(CVector),
}

fn direction_grid(n_dirs: usize) -> impl IndexedParallelIterator<Item = f64> {
    (0..n_dirs).into_par_iter().map(move |j| j as f64 / n_dirs as f64)
}

/// Rates on the uniform grid of `n_dirs` directions, summarised as mean and standard error.
pub fn geodesic_average(
    rep: &Representation,
    group: &FuchsianGroup,
    big_r: f64,
    n_dirs: usize,
    kind: &RateKind,
) -> Result<McEstimate> {
    if n_dirs == 0 {
        return Err(invalid("n_dirs", "must be positive"));
    }
    let values = direction_grid(n_dirs)
        .map(|theta| match kind {
            RateKind::Norm => geodesic_norm_rate(rep, group, theta, big_r).map(|s| s.value),
            RateKind::Vector(v) => geodesic_rate(rep, group, theta, big_r, v).map(|s| s.value),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&values))
}

/// Spectrum from `(1/R) log σ_i(A(γ_θ, R))` averaged over a direction grid.
pub fn geodesic_spectrum(
    rep: &Representation,
    group: &FuchsianGroup,
    big_r: f64,
    n_dirs: usize,
) -> Result<SpectrumReport> {
    if n_dirs == 0 {
        return Err(invalid("n_dirs", "must be positive"));
    }
    let results = direction_grid(n_dirs)
        .map(|theta| {
            let (logs, basis) = geodesic_cocycle(rep, group, theta, big_r)?.log_singular_values()?;
            Ok((logs.iter().map(|l| l / big_r).collect::<Vec<f64>>(), basis))
        })
        .collect::<Result<Vec<_>>>()?;
    let basis = results[0].1.clone();
    let samples: Vec<Vec<f64>> = results.into_iter().map(|(s, _)| s).collect();
    let rounding: Vec<f64> = samples.iter().map(|s| svd_rounding(s, big_r)).collect();
    Ok(SpectrumReport::from_samples(
        &samples,
        &rounding,
        basis,
        Method::Geodesic,
        Provenance {
            master_seed: 0,
            stream_index: 0,
            n_samples: n_dirs,
            horizon: big_r,
            step: GEODESIC_SPACING,
            workers: rayon::current_num_threads(),
        },
    ))
}

/// `[a, b]`: inf and sup over `v ∈ H` of the direction-averaged rate
/// `∫ (1/R) log(||A(γ_θ, R) v|| / ||v||) dθ` on a periodic grid of `n_dirs` nodes.
pub fn expansion_interval(
    rep: &Representation,
    group: &FuchsianGroup,
    big_r: f64,
    basis: &CMatrix,
    n_dirs: usize,
    n_vectors: usize,
    rng: &RngStream,
) -> Result<(f64, f64)> {
    if n_dirs < 64 {
        return Err(invalid("n_dirs", format!("must be >= 64, got {n_dirs}")));
    }
    if n_vectors < 64 {
        return Err(invalid("n_vectors", format!("must be >= 64, got {n_vectors}")));
    }
    if basis.nrows() != rep.dim() || basis.ncols() == 0 || basis.ncols() > rep.dim() {
        return Err(invalid("H", format!("basis must be {}xk with 1 <= k <= {}", rep.dim(), rep.dim())));
    }
    let cocycles = direction_grid(n_dirs)
        .map(|theta| geodesic_cocycle(rep, group, theta, big_r))
        .collect::<Result<Vec<_>>>()?;
    let objective = |c: &CVector| {
        let v = basis * c;
        let rates: Vec<f64> = cocycles.iter().map(|a| a.log_stretch(&v) / big_r).collect();
        pairwise_sum(&rates) / n_dirs as f64
    };
    let k = basis.ncols();
    let samples = sphere_samples(rep.field(), k, n_vectors, rng);
    if k == 1 {
        let v = objective(&samples[0]);
        return Ok((v, v));
    }
    let (a, _) = optimize_on_sphere(rep.field(), &samples, objective, false);
    let (b, _) = optimize_on_sphere(rep.field(), &samples, objective, true);
    Ok((a.min(b), a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_genus2;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn trivial_rates_vanish() {
        let g = build_genus2().unwrap();
        let rep = Representation::trivial(2, &g).unwrap();
        let v = CVector::from_vec(vec![c(1.0), c(1.0)]);
        assert_eq!(geodesic_rate(&rep, &g, 0.3, 10.0, &v).unwrap().value, 0.0);
        assert_eq!(geodesic_norm_rate(&rep, &g, 0.3, 10.0).unwrap().value, 0.0);
        let h = CMatrix::identity(2, 2);
        assert_eq!(expansion_interval(&rep, &g, 5.0, &h, 64, 64, &RngStream::new(0, 0)).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn norm_rate_dominates_vector_rates() {
        let g = build_genus2().unwrap();
        let rep = Representation::uniformizing(&g).unwrap();
        for k in 0..8 {
            let theta = k as f64 / 8.0 + 0.01;
            let n = geodesic_norm_rate(&rep, &g, theta, 8.0).unwrap().value;
            for v in [vec![c(1.0), c(0.0)], vec![c(0.3), Complex64::new(0.0, 1.0)]] {
                let r = geodesic_rate(&rep, &g, theta, 8.0, &CVector::from_vec(v)).unwrap().value;
                assert!(r <= n + 1e-12);
            }
        }
    }

    #[test]
    fn rates_are_additive_over_the_ray() {
        let g = build_genus2().unwrap();
        let rep = Representation::uniformizing(&g).unwrap();
        let v = CVector::from_vec(vec![c(1.0), c(0.5)]);
        for theta in [0.05, 0.4, 0.77] {
            let a_r = geodesic_cocycle(&rep, &g, theta, 10.0).unwrap();
            let a_2r = geodesic_cocycle(&rep, &g, theta, 20.0).unwrap();
            let growth = (a_2r.log_stretch(&v) - a_r.log_stretch(&v)).abs();
            let bound = a_2r.log_norm() + (a_r.to_matrix().try_inverse().unwrap()).iter().map(|z| z.norm()).sum::<f64>().ln();
            assert!(growth <= bound.max(0.0) + 1e-9);
        }
    }

    #[test]
    fn uniformizing_norm_rate_is_near_half() {
        // ||ρ(W)|| ≈ exp(dist / 2) for the SU(1,1) matrices of the deck group
        let g = build_genus2().unwrap();
        let rep = Representation::uniformizing(&g).unwrap();
        let e = geodesic_average(&rep, &g, 30.0, 64, &RateKind::Norm).unwrap();
        assert!((e.mean - 0.5).abs() < 0.03, "{e:?}");
    }

    #[test]
    fn interval_on_a_line_is_a_point() {
        let g = build_genus2().unwrap();
        let rep = Representation::diagonal_on_first(&[2.0, 0.5], &g).unwrap();
        let h = CMatrix::from_column_slice(2, 1, &[c(1.0), c(0.0)]);
        let (a, b) = expansion_interval(&rep, &g, 10.0, &h, 64, 64, &RngStream::new(0, 0)).unwrap();
        assert_eq!(a, b);
    }
}
