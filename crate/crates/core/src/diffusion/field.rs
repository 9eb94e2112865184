//! Scalar fields on the disc and their Laplace–Beltrami operator.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::hypgeo::DiscPoint;

/// Geodesic spacing of the finite-difference Laplacian.
pub const FD_SPACING: f64 = 1e-3;

/// A deterministic real function on the disc, optionally with its Laplacian.
pub trait ScalarField: Sync {
    fn value(&self, p: &DiscPoint) -> f64;

    /// Analytic Laplace–Beltrami operator, when known.
    fn laplacian(&self, _p: &DiscPoint) -> Option<f64> {
        None
    }
}

/// Five-point stencil in normal coordinates at `p` with geodesic spacing `h`.
pub fn fd_laplacian<F: ScalarField + ?Sized>(f: &F, p: &DiscPoint, h: f64) -> f64 {
    let centre = f.value(p);
    let mut acc = 0.0;
    for k in 0..4 {
        let (q, _) = p.displace(h, k as f64 * FRAC_PI_2);
        acc += f.value(&q) - centre;
    }
    acc / (h * h)
}

/// Analytic Laplacian if present, else the finite-difference stencil when allowed.
pub fn laplacian_or_fd<F: ScalarField + ?Sized>(f: &F, p: &DiscPoint, allow_fd: bool) -> Result<f64> {
    match f.laplacian(p) {
        Some(v) => Ok(v),
        None if allow_fd => Ok(fd_laplacian(f, p, FD_SPACING)),
        None => Err(Error::MissingLaplacian),
    }
}

/// The field `Δf`.
pub struct LaplacianOf<'a, F: ScalarField + ?Sized> {
    pub field: &'a F,
    pub allow_fd: bool,
}

impl<F: ScalarField + ?Sized> ScalarField for LaplacianOf<'_, F> {
    fn value(&self, p: &DiscPoint) -> f64 {
        match self.field.laplacian(p) {
            Some(v) => v,
            None if self.allow_fd => fd_laplacian(self.field, p, FD_SPACING),
            None => f64::NAN,
        }
    }
}

/// `f ≡ c`.
#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl ScalarField for Constant {
    fn value(&self, _p: &DiscPoint) -> f64 {
        self.0
    }
    fn laplacian(&self, _p: &DiscPoint) -> Option<f64> {
        Some(0.0)
    }
}

/// `Re z`, bounded and harmonic.
#[derive(Clone, Copy, Debug)]
pub struct RealPart;

impl ScalarField for RealPart {
    fn value(&self, p: &DiscPoint) -> f64 {
        p.re()
    }
    fn laplacian(&self, _p: &DiscPoint) -> Option<f64> {
        Some(0.0)
    }
}

// rho * coth(rho), continuous at 0.
fn rho_coth(rho: f64) -> f64 {
    if rho < 1e-4 {
        1.0 + rho * rho / 3.0
    } else {
        rho / rho.tanh()
    }
}

/// `dist_P(0, ·)`.
#[derive(Clone, Copy, Debug)]
pub struct Distance;

impl ScalarField for Distance {
    fn value(&self, p: &DiscPoint) -> f64 {
        p.rho()
    }
}

/// `dist_P(0, ·)^2`, which is smooth at the origin: `Δ = 2 + 2 rho coth rho`.
#[derive(Clone, Copy, Debug)]
pub struct DistanceSquared;

impl ScalarField for DistanceSquared {
    fn value(&self, p: &DiscPoint) -> f64 {
        p.rho() * p.rho()
    }
    fn laplacian(&self, p: &DiscPoint) -> Option<f64> {
        Some(2.0 + 2.0 * rho_coth(p.rho()))
    }
}

/// `sqrt(1 + rho^2)`: a smoothed distance, 1-Lipschitz with bounded Laplacian.
#[derive(Clone, Copy, Debug)]
pub struct SmoothDistance;

impl ScalarField for SmoothDistance {
    fn value(&self, p: &DiscPoint) -> f64 {
        (1.0 + p.rho() * p.rho()).sqrt()
    }
    fn laplacian(&self, p: &DiscPoint) -> Option<f64> {
        let r = p.rho();
        let s = (1.0 + r * r).sqrt();
        // f'' + coth(r) f' with f' = r/s, f'' = s^-3
        Some(1.0 / (s * s * s) + rho_coth(r) / s)
    }
}

/// `exp(-dist_P(0, ·))`.
#[derive(Clone, Copy, Debug)]
pub struct ExpDecay;

impl ScalarField for ExpDecay {
    fn value(&self, p: &DiscPoint) -> f64 {
        (-p.rho()).exp()
    }
}

/// A field from closures.
pub struct FnField<F, L = fn(&DiscPoint) -> f64> {
    value: F,
    laplacian: Option<L>,
}

impl<F> FnField<F>
where
    F: Fn(&DiscPoint) -> f64 + Sync,
{
    pub fn new(value: F) -> Self {
        Self {
            value,
            laplacian: None,
        }
    }
}

impl<F, L> FnField<F, L>
where
    F: Fn(&DiscPoint) -> f64 + Sync,
    L: Fn(&DiscPoint) -> f64 + Sync,
{
    pub fn with_laplacian(value: F, laplacian: L) -> Self {
        Self {
            value,
            laplacian: Some(laplacian),
        }
    }
}

impl<F, L> ScalarField for FnField<F, L>
where
    F: Fn(&DiscPoint) -> f64 + Sync,
    L: Fn(&DiscPoint) -> f64 + Sync,
{
    fn value(&self, p: &DiscPoint) -> f64 {
        (self.value)(p)
    }
    fn laplacian(&self, p: &DiscPoint) -> Option<f64> {
        self.laplacian.as_ref().map(|l| l(p))
    }
}
