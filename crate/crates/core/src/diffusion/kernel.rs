//! Heat kernel of `∂t = Δ` on the hyperbolic plane.
//!
//! `p(rho, t) = sqrt(2) e^{-t/4} / (4πt)^{3/2} ∫_rho^∞ s e^{-s²/4t} / sqrt(cosh s - cosh rho) ds`,
//! a density against hyperbolic area. The substitution `s = rho + u²` removes the
//! inverse square-root singularity and the integrand is evaluated in log space.

use std::f64::consts::{PI, SQRT_2, TAU};

use crate::error::{invalid, Result};
use crate::quadrature::integrate;

const ABS_TOL: f64 = 1e-8;
const NEAR_DIAGONAL: f64 = 1e-6;

// log(sinh(y)) for y > 0.
fn ln_sinh(y: f64) -> f64 {
    if y > 0.5 {
        y + (-(-2.0 * y).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        y.sinh().ln()
    }
}

// log(sinh(x) / x), continuous at 0.
fn ln_sinhc(x: f64) -> f64 {
    if x < 1e-4 {
        x * x / 6.0
    } else {
        ln_sinh(x) - x.ln()
    }
}

fn prefactor(t: f64) -> f64 {
    SQRT_2 * (-0.25 * t).exp() / (4.0 * PI * t).powf(1.5)
}

fn integral(rho: f64, t: f64, tol: f64) -> Result<f64> {
    let integrand = |u: f64| {
        let x = 0.5 * u * u;
        let s = rho + u * u;
        if s == 0.0 {
            return 0.0;
        }
        let log = (2.0 * s).ln() - s * s / (4.0 * t) - 0.5 * ln_sinh(rho + x) - 0.5 * ln_sinhc(x);
        log.exp()
    };
    let s_max = rho + (240.0 * t).sqrt() + 1.0;
    let u_max = (s_max - rho).sqrt();
    Ok(integrate(integrand, 0.0, u_max, tol)?.value)
}

/// `p(rho, t)` for `rho >= 0`, `t > 0`.
pub fn heat_kernel(rho: f64, t: f64) -> Result<f64> {
    if !t.is_finite() || t <= 0.0 {
        return Err(invalid("t", format!("must be finite and > 0, got {t}")));
    }
    if !rho.is_finite() || rho < 0.0 {
        return Err(invalid("rho", format!("must be finite and >= 0, got {rho}")));
    }
    if rho < NEAR_DIAGONAL {
        let p0 = kernel_at(0.0, t)?;
        return Ok(p0 * (-rho * rho / (4.0 * t)).exp());
    }
    kernel_at(rho, t)
}

fn kernel_at(rho: f64, t: f64) -> Result<f64> {
    let c = prefactor(t);
    // A coarse pass fixes the magnitude so tiny tail values keep relative accuracy.
    let rough = c * integral(rho, t, f64::INFINITY)?;
    let tol = ABS_TOL.min(1e-10 * rough.abs()).max(f64::MIN_POSITIVE);
    Ok(c * integral(rho, t, tol / c)?)
}

/// Total mass `∫ p(rho, t) 2π sinh(rho) d rho`.
pub fn heat_kernel_mass(t: f64) -> Result<f64> {
    if !t.is_finite() || t <= 0.0 {
        return Err(invalid("t", format!("must be finite and > 0, got {t}")));
    }
    let rho_max = t + 12.0 * (2.0 * t).sqrt() + 5.0;
    let f = |rho: f64| {
        if rho == 0.0 {
            return 0.0;
        }
        heat_kernel(rho, t).unwrap_or(f64::NAN) * TAU * rho.sinh()
    };
    let mass = integrate(f, 0.0, rho_max, 1e-7)?;
    Ok(mass.value)
}
