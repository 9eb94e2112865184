//! Estimators along Brownian paths on the surface.
//!
//! Paths are simulated in the local chart of the octagon with
//! [`SurfaceWalker`], which never leaves a bounded region however long the
//! path runs. Each side crossing appends a letter `l` to the path's word `W`;
//! the cocycle `A = ρ(W)^{-1}` is then updated by `A <- ρ(l)^{-1} A`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::sphere::{optimize_on_sphere, sphere_samples};
use super::{svd_rounding, Method, Provenance, SpectrumReport};
use crate::cocycle::{specialize, CMatrix, CVector, CocycleValue, Field, Representation};
use crate::diffusion::{diffuse_from, sampler::check_horizon};
use crate::error::{invalid, Error, Result};
use crate::hypgeo::DiscPoint;
use crate::rng::{McEstimate, RngStream};
use crate::surface::{FuchsianGroup, SurfaceWalker};

/// Simulates a Brownian path of duration `t` from the octagon point `start`
/// and calls `on_step` with the letters gained at every step.
pub fn walk_letters<F: FnMut(usize, &[i32]) -> Result<()>>(
    group: &FuchsianGroup,
    start: DiscPoint,
    t: f64,
    step: f64,
    stream: &RngStream,
    mut on_step: F,
) -> Result<usize> {
    let n = check_horizon(t, step)?;
    if n == 0 {
        return Ok(0);
    }
    let h = t / n as f64;
    let mut rng = stream.rng();
    let mut walker = SurfaceWalker::new(group, start);
    let mut letters = Vec::with_capacity(4);
    for i in 0..n {
        letters.clear();
        walker.brownian_step(h, &mut rng, &mut letters)?;
        on_step(i, &letters)?;
    }
    Ok(n)
}

fn check_rate_args(rep: &Representation, t: f64, n_paths: usize) -> Result<()> {
    rep.require_exact()?;
    if !(t.is_finite() && t >= 1.0) {
        return Err(invalid("t", format!("must be finite and >= 1, got {t}")));
    }
    if n_paths == 0 {
        return Err(invalid("n_paths", "must be positive"));
    }
    Ok(())
}

// Applies `A <- ρ(l)^{-1} A` to a vector, returning the accumulated log scale.
fn push_vector(rep: &Representation, x: &mut CVector, letters: &[i32], log: &mut f64) {
    for &l in letters {
        *x = rep.letter(-l) * &*x;
        let n = x.norm();
        if !(1e-150..=1e150).contains(&n) {
            *log += n.ln();
            x.apply(|z| *z = *z / n);
        }
    }
}

fn log_ratio(x: &CVector, log: f64, v: &CVector) -> f64 {
    log + x.norm().ln() - v.norm().ln()
}

/// Cocycle `A(ω, t)` along one Brownian path from the origin.
fn path_cocycle(rep: &Representation, group: &FuchsianGroup, t: f64, step: f64, stream: &RngStream) -> Result<CocycleValue> {
    let mut a = CocycleValue::identity(rep.dim());
    walk_letters(group, DiscPoint::ORIGIN, t, step, stream, |_, letters| {
        for &l in letters {
            a.mul_left(rep.letter(-l));
        }
        Ok(())
    })?;
    Ok(a)
}

/// Mean of `(1/t) log(||A(ω,t) v|| / ||v||)` over Brownian paths from the origin.
pub fn brownian_rate(
    rep: &Representation,
    group: &FuchsianGroup,
    v: &CVector,
    t: f64,
    n_paths: usize,
    step: f64,
    rng: &RngStream,
) -> Result<McEstimate> {
    check_rate_args(rep, t, n_paths)?;
    if v.len() != rep.dim() || !(v.norm() > 0.0) {
        return Err(invalid("v", "must be a nonzero vector of the representation's dimension"));
    }
    let values = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut x = v.clone();
            let mut log = 0.0;
            walk_letters(group, DiscPoint::ORIGIN, t, step, &rng.child(i), |_, letters| {
                push_vector(rep, &mut x, letters, &mut log);
                Ok(())
            })?;
            Ok(log_ratio(&x, log, v) / t)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&values))
}

/// Mean of `(1/t) log ||A(ω,t)||` over Brownian paths from the origin.
pub fn brownian_norm_rate(
    rep: &Representation,
    group: &FuchsianGroup,
    t: f64,
    n_paths: usize,
    step: f64,
    rng: &RngStream,
) -> Result<McEstimate> {
    check_rate_args(rep, t, n_paths)?;
    let values = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| Ok(path_cocycle(rep, group, t, step, &rng.child(i))?.log_norm() / t))
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&values))
}

/// Settings of [`benettin_spectrum`].
#[derive(Clone, Copy, Debug)]
pub struct BenettinOptions {
    pub t_max: f64,
    pub step: f64,
    /// Steps between QR re-orthonormalisations; `reorth_every * step <= 1`.
    pub reorth_every: usize,
    pub n_paths: usize,
}

fn haar_frame<R: Rng + ?Sized>(field: Field, d: usize, rng: &mut R) -> CMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if field == Field::Complex { rng.sample(StandardNormal) } else { 0.0 };
        Complex64::new(re, im)
    });
    g.qr().q()
}

// Accumulates log |R_ii| and the magnitude of everything added, for the rounding bound.
fn qr_logs(frame: &mut CMatrix, logs: &mut [f64], magnitude: &mut f64, step: usize) -> Result<()> {
    let qr = frame.clone().qr();
    let r = qr.r();
    let d = logs.len() as f64;
    for (i, log) in logs.iter_mut().enumerate() {
        let v = r[(i, i)].norm();
        if !(v > 1e-300 && v.is_finite()) {
            return Err(Error::FrameDegeneracy { step, value: v });
        }
        *log += v.ln();
        *magnitude += v.ln().abs() + d;
    }
    *frame = qr.q();
    Ok(())
}

/// Full spectrum by QR deflation of a random orthonormal frame along each path.
pub fn benettin_spectrum(
    rep: &Representation,
    group: &FuchsianGroup,
    opts: BenettinOptions,
    rng: &RngStream,
) -> Result<SpectrumReport> {
    check_rate_args(rep, opts.t_max, opts.n_paths)?;
    if opts.reorth_every == 0 || opts.reorth_every as f64 * opts.step > 1.0 + 1e-12 {
        return Err(invalid(
            "reorth_every",
            format!("reorth_every * step must be <= 1, got {} * {}", opts.reorth_every, opts.step),
        ));
    }
    let d = rep.dim();
    let paths = rng.child(0);
    let frames = rng.child(1);
    let samples = (0..opts.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut frame = haar_frame(rep.field(), d, &mut frames.child(i).rng());
            let mut logs = vec![0.0; d];
            let mut magnitude = 0.0;
            let n = walk_letters(group, DiscPoint::ORIGIN, opts.t_max, opts.step, &paths.child(i), |k, letters| {
                for &l in letters {
                    frame = rep.letter(-l) * &frame;
                }
                if (k + 1) % opts.reorth_every == 0 {
                    qr_logs(&mut frame, &mut logs, &mut magnitude, k + 1)?;
                }
                Ok(())
            })?;
            if n % opts.reorth_every != 0 {
                qr_logs(&mut frame, &mut logs, &mut magnitude, n)?;
            }
            let scaled = logs.iter().map(|l| l / opts.t_max).collect::<Vec<f64>>();
            Ok((scaled, 16.0 * f64::EPSILON * magnitude / opts.t_max))
        })
        .collect::<Result<Vec<_>>>()?;
    let (samples, rounding): (Vec<Vec<f64>>, Vec<f64>) = samples.into_iter().unzip();
    let reference = path_cocycle(rep, group, opts.t_max, opts.step, &paths.child(0))?;
    let (_, basis) = reference.log_singular_values()?;
    Ok(SpectrumReport::from_samples(
        &samples,
        &rounding,
        basis,
        Method::Brownian,
        Provenance {
            master_seed: rng.master_seed,
            stream_index: rng.stream_index,
            n_samples: opts.n_paths,
            horizon: opts.t_max,
            step: opts.step,
            workers: rayon::current_num_threads(),
        },
    ))
}

/// Spectrum from expectations: the mean of `(1/n) log σ_i(A(ω, n))`.
pub fn diffusion_spectrum(
    rep: &Representation,
    group: &FuchsianGroup,
    n: f64,
    n_paths: usize,
    step: f64,
    rng: &RngStream,
) -> Result<SpectrumReport> {
    check_rate_args(rep, n, n_paths)?;
    let results = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let a = path_cocycle(rep, group, n, step, &rng.child(i))?;
            let (logs, basis) = a.log_singular_values()?;
            Ok((logs.iter().map(|l| l / n).collect::<Vec<f64>>(), basis))
        })
        .collect::<Result<Vec<_>>>()?;
    let basis = results[0].1.clone();
    let samples: Vec<Vec<f64>> = results.into_iter().map(|(s, _)| s).collect();
    let rounding: Vec<f64> = samples.iter().map(|s| svd_rounding(s, n)).collect();
    Ok(SpectrumReport::from_samples(
        &samples,
        &rounding,
        basis,
        Method::Diffusion,
        Provenance {
            master_seed: rng.master_seed,
            stream_index: rng.stream_index,
            n_samples: n_paths,
            horizon: n,
            step,
            workers: rayon::current_num_threads(),
        },
    ))
}

/// `[m_n, M_n]` with the estimates at the optimising directions.
#[derive(Clone, Debug)]
pub struct ExpectationInterval {
    pub lower: McEstimate,
    pub upper: McEstimate,
    pub argmin: CVector,
    pub argmax: CVector,
}

fn subspace_dim(rep: &Representation, basis: &CMatrix) -> Result<usize> {
    if basis.nrows() != rep.dim() || basis.ncols() == 0 || basis.ncols() > rep.dim() {
        return Err(invalid("H", format!("basis must be {}xk with 1 <= k <= {}", rep.dim(), rep.dim())));
    }
    let s = basis.singular_values();
    if !(s.min() > 1e-12 * s.max()) {
        return Err(invalid("H", "basis columns are linearly dependent"));
    }
    Ok(basis.ncols())
}

/// Inf and sup over unit `v ∈ H` of `(1/n) E_0[log ||A(·, n) v|| / ||v||]`,
/// all directions sharing one sample of paths.
#[allow(clippy::too_many_arguments)]
pub fn expectation_functions(
    rep: &Representation,
    group: &FuchsianGroup,
    basis: &CMatrix,
    n: f64,
    n_paths: usize,
    step: f64,
    n_vectors: usize,
    rng: &RngStream,
) -> Result<ExpectationInterval> {
    rep.require_exact()?;
    if !(n.is_finite() && n >= 1.0) {
        return Err(invalid("n", format!("must be >= 1, got {n}")));
    }
    let k = subspace_dim(rep, basis)?;
    let cocycles = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| path_cocycle(rep, group, n, step, &rng.child(i)))
        .collect::<Result<Vec<_>>>()?;
    let per_path = |c: &CVector| -> Vec<f64> {
        let v = basis * c;
        cocycles.iter().map(|a| a.log_stretch(&v) / n).collect()
    };
    let objective = |c: &CVector| McEstimate::from_samples(&per_path(c)).mean;
    let samples = sphere_samples(rep.field(), k, n_vectors.max(1), &rng.child(u64::MAX));
    let (_, argmin) = optimize_on_sphere(rep.field(), &samples, objective, false);
    let (_, argmax) = optimize_on_sphere(rep.field(), &samples, objective, true);
    let lower = McEstimate::from_samples(&per_path(&argmin));
    let upper = McEstimate::from_samples(&per_path(&argmax));
    Ok(ExpectationInterval {
        lower,
        upper,
        argmin: basis * argmin,
        argmax: basis * argmax,
    })
}

/// Both sides of the change-of-base identity for expectations.
#[derive(Clone, Debug)]
pub struct ConversionReport {
    /// `E_η[log ||A(·,t) v|| / ||v||]` with `v = A(0 → η) u`.
    pub lhs: McEstimate,
    /// `(D_t f)(η) - f(η)` for the specialization `f` based at the origin.
    pub rhs: McEstimate,
    pub f_eta: f64,
    pub passed: bool,
}

/// Checks `E_η[log ||A(·,t)v||] = (D_t f_u)(η) - f_u(η)` with two independent samples.
#[allow(clippy::too_many_arguments)]
pub fn check_exp_conversion(
    rep: &Representation,
    group: &FuchsianGroup,
    u: &CVector,
    eta: DiscPoint,
    t: f64,
    n_paths: usize,
    step: f64,
    rng: &RngStream,
) -> Result<ConversionReport> {
    if !(t.is_finite() && t >= 0.5) {
        return Err(invalid("t", format!("must be >= 0.5, got {t}")));
    }
    let f_origin = specialize(rep, group, u)?;
    let v = f_origin.cocycle_to(&eta)?.to_matrix() * u;
    let (start, _) = group.locate(&eta)?;
    let lhs_root = rng.child(0);
    let values = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut x = v.clone();
            let mut log = 0.0;
            walk_letters(group, start, t, step, &lhs_root.child(i), |_, letters| {
                push_vector(rep, &mut x, letters, &mut log);
                Ok(())
            })?;
            Ok(log_ratio(&x, log, &v))
        })
        .collect::<Result<Vec<f64>>>()?;
    let lhs = McEstimate::from_samples(&values);
    let f_eta = f_origin.try_value(&eta)?;
    let diffused = diffuse_from(&f_origin, eta, t, n_paths, step, &rng.child(1))?;
    let rhs = McEstimate {
        mean: diffused.mean - f_eta,
        ..diffused
    };
    let tol = 3.0 * lhs.combined_se(&rhs);
    let passed = (lhs.mean - rhs.mean).abs() <= tol.max(1e-12);
    Ok(ConversionReport { lhs, rhs, f_eta, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_genus2;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn trivial_representation_has_zero_rates() {
        let g = build_genus2().unwrap();
        let rep = Representation::trivial(3, &g).unwrap();
        let s = RngStream::new(1, 0);
        let v = CVector::from_vec(vec![c(1.0), c(2.0), c(0.0)]);
        let r = brownian_rate(&rep, &g, &v, 2.0, 20, 0.02, &s).unwrap();
        assert_eq!((r.mean, r.std_error), (0.0, 0.0));
        assert_eq!(brownian_norm_rate(&rep, &g, 2.0, 20, 0.02, &s).unwrap().mean, 0.0);
        let opts = BenettinOptions {
            t_max: 2.0,
            step: 0.02,
            reorth_every: 10,
            n_paths: 20,
        };
        let b = benettin_spectrum(&rep, &g, opts, &s).unwrap();
        assert_eq!(b.multiplicities, vec![3]);
        assert!(b.exponents[0].abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = build_genus2().unwrap();
        let rep = Representation::trivial(2, &g).unwrap();
        let s = RngStream::new(1, 0);
        let v = CVector::from_vec(vec![c(1.0), c(0.0)]);
        assert!(brownian_rate(&rep, &g, &v, 0.5, 10, 0.02, &s).is_err());
        assert!(brownian_rate(&rep, &g, &CVector::zeros(2), 2.0, 10, 0.02, &s).is_err());
        let opts = BenettinOptions {
            t_max: 2.0,
            step: 0.02,
            reorth_every: 60,
            n_paths: 4,
        };
        assert!(benettin_spectrum(&rep, &g, opts, &s).is_err());
    }

    #[test]
    fn uniformizing_spectrum_is_plus_minus_half() {
        // the surface group acting on the disc: norms grow like exp(dist / 2)
        let g = build_genus2().unwrap();
        let rep = Representation::uniformizing(&g).unwrap();
        let opts = BenettinOptions {
            t_max: 30.0,
            step: 0.02,
            reorth_every: 25,
            n_paths: 200,
        };
        let b = benettin_spectrum(&rep, &g, opts, &RngStream::new(8, 0)).unwrap();
        assert_eq!(b.multiplicities, vec![1, 1]);
        assert!((b.exponents[0] - 0.5).abs() < 0.05, "{:?}", b.exponents);
        assert!((b.exponents[1] + 0.5).abs() < 0.05, "{:?}", b.exponents);
        assert!(b.exponent_sum.mean.abs() < 1e-9);
    }

    #[test]
    fn expectation_interval_on_a_line_is_degenerate() {
        let g = build_genus2().unwrap();
        let rep = Representation::diagonal_on_first(&[2.0, 0.5], &g).unwrap();
        let h = CMatrix::from_column_slice(2, 1, &[c(1.0), c(0.0)]);
        let e = expectation_functions(&rep, &g, &h, 2.0, 50, 0.02, 64, &RngStream::new(2, 0)).unwrap();
        assert_eq!(e.lower.mean, e.upper.mean);
    }

    #[test]
    fn conversion_with_trivial_representation() {
        let g = build_genus2().unwrap();
        let rep = Representation::trivial(2, &g).unwrap();
        let u = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let eta = g.generator(1).apply(&DiscPoint::ORIGIN);
        let r = check_exp_conversion(&rep, &g, &u, eta, 1.0, 100, 0.02, &RngStream::new(3, 0)).unwrap();
        assert!(r.passed && r.lhs.mean == 0.0 && r.rhs.mean == 0.0);
    }
}
