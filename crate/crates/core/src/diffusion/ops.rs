//! Monte Carlo heat diffusions and the identities they satisfy.

use std::f64::consts::TAU;

use rayon::prelude::*;

use super::field::{LaplacianOf, ScalarField};
use super::sampler::{walk_endpoint, DEFAULT_STEP};
use crate::error::{invalid, Error, Result};
use crate::hypgeo::DiscPoint;
use crate::rng::{linear_fit, pairwise_sum, McEstimate, RngStream};

/// Inner endpoints per outer endpoint in the nested semigroup estimate.
pub const SEMIGROUP_INNER: usize = 32;

/// `(D_t f)(0)` by Monte Carlo.
pub fn diffuse<F: ScalarField + ?Sized>(f: &F, t: f64, n_samples: usize, rng: &RngStream) -> Result<McEstimate> {
    diffuse_from(f, DiscPoint::ORIGIN, t, n_samples, DEFAULT_STEP, rng)
}

/// `(D_t f)(start)` by Monte Carlo with time step `step`.
pub fn diffuse_from<F: ScalarField + ?Sized>(
    f: &F,
    start: DiscPoint,
    t: f64,
    n_samples: usize,
    step: f64,
    rng: &RngStream,
) -> Result<McEstimate> {
    if n_samples < 100 {
        return Err(invalid("n_samples", format!("must be >= 100, got {n_samples}")));
    }
    let values = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| walk_endpoint(start, t, step, &rng.child(i)).map(|p| f.value(&p)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(McEstimate::from_samples(&values))
}

/// Two estimates of the same quantity and whether they agree.
#[derive(Clone, Debug)]
pub struct SemigroupReport {
    pub direct: McEstimate,
    pub nested: McEstimate,
    pub combined_se: f64,
    pub passed: bool,
}

fn agree(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol.max(1e-12 * a.abs().max(b.abs()))
}

/// Compares `(D_{t+s} f)(0)` with the nested estimate `(D_t (D_s f))(0)`.
pub fn check_semigroup<F: ScalarField + ?Sized>(
    f: &F,
    t: f64,
    s: f64,
    n: usize,
    step: f64,
    rng: &RngStream,
) -> Result<SemigroupReport> {
    let direct = diffuse_from(f, DiscPoint::ORIGIN, t + s, n, step, &rng.child(0))?;
    let nested_root = rng.child(1);
    let outer = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let task = nested_root.child(i);
            let mid = walk_endpoint(DiscPoint::ORIGIN, t, step, &task)?;
            let inner = (0..SEMIGROUP_INNER as u64)
                .map(|j| walk_endpoint(mid, s, step, &task.child(j)).map(|p| f.value(&p)))
                .collect::<Result<Vec<f64>>>()?;
            Ok(pairwise_sum(&inner) / SEMIGROUP_INNER as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let nested = McEstimate::from_samples(&outer);
    let combined_se = direct.combined_se(&nested);
    Ok(SemigroupReport {
        direct,
        nested,
        combined_se,
        passed: agree(direct.mean, nested.mean, 3.0 * combined_se),
    })
}

/// Options for [`check_dynkin`].
#[derive(Clone, Copy, Debug)]
pub struct DynkinOptions {
    /// Number of trapezoid intervals on `[0, t]`; must be even.
    pub grid: usize,
    pub allow_fd: bool,
    pub step: f64,
}

impl Default for DynkinOptions {
    fn default() -> Self {
        Self {
            grid: 8,
            allow_fd: true,
            step: DEFAULT_STEP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DynkinReport {
    /// `(D_t f)(0) - f(0)`.
    pub lhs: McEstimate,
    /// `∫_0^t (D_s Δf)(0) ds` by the trapezoid rule.
    pub rhs: McEstimate,
    /// Richardson estimate of the trapezoid error.
    pub quadrature_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `(D_t f)(0) - f(0) = ∫_0^t (D_s Δf)(0) ds`.
pub fn check_dynkin<F: ScalarField + ?Sized>(
    f: &F,
    t: f64,
    n: usize,
    opts: DynkinOptions,
    rng: &RngStream,
) -> Result<DynkinReport> {
    if opts.grid < 2 || opts.grid % 2 != 0 {
        return Err(invalid("grid", format!("must be even and >= 2, got {}", opts.grid)));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(invalid("t", format!("must be finite and > 0, got {t}")));
    }
    if f.laplacian(&DiscPoint::ORIGIN).is_none() && !opts.allow_fd {
        return Err(Error::MissingLaplacian);
    }
    let lap = LaplacianOf {
        field: f,
        allow_fd: opts.allow_fd,
    };
    let f0 = f.value(&DiscPoint::ORIGIN);
    let end = diffuse_from(f, DiscPoint::ORIGIN, t, n, opts.step, &rng.child(0))?;
    let lhs = McEstimate {
        mean: end.mean - f0,
        ..end
    };

    let m = opts.grid;
    let h = t / m as f64;
    let mut nodes = Vec::with_capacity(m + 1);
    nodes.push(McEstimate::exact(lap.value(&DiscPoint::ORIGIN)));
    for j in 1..=m {
        nodes.push(diffuse_from(&lap, DiscPoint::ORIGIN, j as f64 * h, n, opts.step, &rng.child(1 + j as u64))?);
    }
    let trapezoid = |stride: usize| -> (f64, f64) {
        let hh = h * stride as f64;
        let idx: Vec<usize> = (0..=m).step_by(stride).collect();
        let mut terms = Vec::with_capacity(idx.len());
        let mut var = 0.0;
        for (k, &j) in idx.iter().enumerate() {
            let w = if k == 0 || k == idx.len() - 1 { 0.5 } else { 1.0 };
            terms.push(w * nodes[j].mean);
            var += (w * nodes[j].std_error).powi(2);
        }
        (hh * pairwise_sum(&terms), hh * var.sqrt())
    };
    let (fine, fine_se) = trapezoid(1);
    let (coarse, _) = trapezoid(2);
    let quadrature_error = (fine - coarse).abs() / 3.0;
    let rhs = McEstimate {
        mean: fine,
        std_error: fine_se,
        n,
    };
    let tolerance = 3.0 * lhs.combined_se(&rhs) + quadrature_error;
    Ok(DynkinReport {
        lhs,
        rhs,
        quadrature_error,
        tolerance,
        passed: agree(lhs.mean, rhs.mean, tolerance),
    })
}

/// Average of `f` over the hyperbolic circle of radius `big_r` about 0 on a uniform grid.
pub fn circle_average<F: ScalarField + ?Sized>(f: &F, big_r: f64, n_dirs: usize) -> Result<f64> {
    if !big_r.is_finite() || big_r < 0.0 {
        return Err(invalid("R", format!("must be finite and >= 0, got {big_r}")));
    }
    if n_dirs < 8 {
        return Err(invalid("n_dirs", format!("must be >= 8, got {n_dirs}")));
    }
    let values: Vec<f64> = (0..n_dirs)
        .map(|j| f.value(&DiscPoint::polar_unchecked(big_r, TAU * j as f64 / n_dirs as f64)))
        .collect();
    // Averaging offsets from the first value makes constant fields exact.
    let v0 = values[0];
    let offsets: Vec<f64> = values.iter().map(|v| v - v0).collect();
    Ok(v0 + pairwise_sum(&offsets) / n_dirs as f64)
}

#[derive(Clone, Debug)]
pub struct CircleRow {
    pub big_r: f64,
    pub circle: f64,
    pub diffusion: McEstimate,
    pub error: f64,
}

#[derive(Clone, Debug)]
pub struct CircleReport {
    pub rows: Vec<CircleRow>,
    /// Slope of `log err` against `log R`; `None` when fewer than two errors are positive.
    pub slope: Option<f64>,
    pub passed: bool,
}

/// Directions used for the circle side of [`check_circle_vs_diffusion`].
pub const CIRCLE_DIRS: usize = 256;

/// Compares circle averages at radius `R` with `(D_{[R]} f)(0)` and fits the error growth.
pub fn check_circle_vs_diffusion<F: ScalarField + ?Sized>(
    f: &F,
    radii: &[f64],
    n: usize,
    step: f64,
    rng: &RngStream,
) -> Result<CircleReport> {
    if radii.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "circle check needs at least 4 radii, got {}",
            radii.len()
        )));
    }
    let mut rows = Vec::with_capacity(radii.len());
    for (k, &r) in radii.iter().enumerate() {
        let circle = circle_average(f, r, CIRCLE_DIRS)?;
        let diffusion = diffuse_from(f, DiscPoint::ORIGIN, r.floor(), n, step, &rng.child(k as u64))?;
        rows.push(CircleRow {
            big_r: r,
            circle,
            diffusion,
            error: (circle - diffusion.mean).abs(),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|row| row.error > 0.0 && row.big_r > 0.0)
        .map(|row| (row.big_r.ln(), row.error.ln()))
        .unzip();
    let slope = linear_fit(&xs, &ys).map(|(s, _)| s);
    let within_noise = rows
        .iter()
        .all(|row| row.error <= 3.0 * row.diffusion.std_error + 1e-12);
    let passed = within_noise || slope.is_some_and(|s| s <= 0.75);
    Ok(CircleReport { rows, slope, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::field::{Constant, Distance, ExpDecay, RealPart, SmoothDistance};

    #[test]
    fn constant_fields_are_exact() {
        let s = RngStream::new(0, 0);
        let e = diffuse(&Constant(1.0), 3.0, 200, &s).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
        assert_eq!(diffuse(&Constant(0.0), 1.0, 100, &s).unwrap().mean, 0.0);
        assert!(diffuse(&Constant(1.0), 1.0, 99, &s).is_err());
    }

    #[test]
    fn odd_harmonic_vanishes() {
        let e = diffuse(&RealPart, 1.0, 4000, &RngStream::new(4, 0)).unwrap();
        assert!(e.mean.abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn deterministic_regardless_of_threads() {
        let s = RngStream::new(9, 1);
        let a = diffuse(&ExpDecay, 0.5, 500, &s).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| diffuse(&ExpDecay, 0.5, 500, &s).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn semigroup_checks() {
        let s = RngStream::new(12, 0);
        let c = check_semigroup(&Constant(1.0), 0.5, 0.5, 200, 0.01, &s).unwrap();
        assert!(c.passed && c.direct.mean == 1.0 && c.nested.mean == 1.0);
        let e = check_semigroup(&ExpDecay, 0.5, 0.5, 1000, 0.01, &s).unwrap();
        assert!(e.passed, "{e:?}");
    }

    #[test]
    fn dynkin_checks() {
        let s = RngStream::new(13, 0);
        let c = check_dynkin(&Constant(2.0), 1.0, 200, DynkinOptions::default(), &s).unwrap();
        assert!(c.passed && c.lhs.mean == 0.0 && c.rhs.mean == 0.0);
        let opts = DynkinOptions {
            allow_fd: false,
            ..Default::default()
        };
        assert_eq!(
            check_dynkin(&Distance, 1.0, 200, opts, &s).unwrap_err(),
            Error::MissingLaplacian
        );
    }

    #[test]
    fn circle_averages() {
        assert_eq!(circle_average(&Constant(0.1), 2.0, 64).unwrap(), 0.1);
        assert!(circle_average(&RealPart, 1.5, 64).unwrap().abs() < 1e-15);
        assert!((circle_average(&Distance, 3.0, 64).unwrap() - 3.0).abs() < 1e-9);
        assert!(circle_average(&Distance, 3.0, 4).is_err());
    }

    #[test]
    fn circle_check_needs_four_radii() {
        let s = RngStream::new(0, 0);
        assert!(matches!(
            check_circle_vs_diffusion(&SmoothDistance, &[1.0, 2.0, 3.0], 100, 0.05, &s),
            Err(Error::InsufficientData(_))
        ));
        let c = check_circle_vs_diffusion(&Constant(4.0), &[1.0, 2.0, 3.0, 4.0], 100, 0.05, &s).unwrap();
        assert!(c.passed && c.rows.iter().all(|r| r.error == 0.0));
    }
}
