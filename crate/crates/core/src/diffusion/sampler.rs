//! Brownian paths with generator the full Laplace–Beltrami operator.
//!
//! Each step moves geodesically by the polar Gaussian increment
//! `(sqrt(2h) N1, sqrt(2h) N2)` in normal coordinates at the current point, so
//! `E[rho^2] ≈ 4t` for small `t` and the radial drift is 1 at large distance.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::hypgeo::{dist_p, DiscPoint, MobiusMap};
use crate::rng::RngStream;

/// Largest admissible time step.
pub const MAX_STEP: f64 = 0.05;

/// Time step used when callers do not choose one.
pub const DEFAULT_STEP: f64 = 0.01;

/// A time-stamped discretized path on the disc.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafPath {
    times: Vec<f64>,
    points: Vec<DiscPoint>,
    step: f64,
}

impl LeafPath {
    pub fn new(times: Vec<f64>, points: Vec<DiscPoint>, step: f64) -> Result<Self> {
        if times.is_empty() || times.len() != points.len() {
            return Err(Error::InvalidPath(format!(
                "{} times for {} points",
                times.len(),
                points.len()
            )));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(invalid("step", format!("must be finite and > 0, got {step}")));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidPath(format!("first time is {}, expected 0", times[0])));
        }
        let bound = 50.0 * step.sqrt();
        for i in 1..times.len() {
            if !(times[i] > times[i - 1]) || !times[i].is_finite() {
                return Err(Error::InvalidPath(format!("times not increasing at index {i}")));
            }
            let d = dist_p(&points[i - 1], &points[i]);
            if !(d <= bound) {
                return Err(Error::InvalidPath(format!(
                    "segment {} has length {d}, above the bound {bound}",
                    i - 1
                )));
            }
        }
        Ok(Self { times, points, step })
    }

    pub fn constant(point: DiscPoint, step: f64) -> Self {
        Self {
            times: vec![0.0],
            points: vec![point],
            step,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[DiscPoint] {
        &self.points
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> DiscPoint {
        self.points[0]
    }

    /// The endpoint `ω(t_max)`.
    pub fn end(&self) -> DiscPoint {
        *self.points.last().expect("non-empty path")
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().expect("non-empty path")
    }

    /// Head `[0, k]` and tail `[k, end]`, the tail re-timed to start at 0.
    pub fn split_at(&self, k: usize) -> (LeafPath, LeafPath) {
        assert!(k < self.len(), "split index {k} out of range");
        let head = LeafPath {
            times: self.times[..=k].to_vec(),
            points: self.points[..=k].to_vec(),
            step: self.step,
        };
        let t0 = self.times[k];
        let tail = LeafPath {
            times: self.times[k..].iter().map(|t| t - t0).collect(),
            points: self.points[k..].to_vec(),
            step: self.step,
        };
        (head, tail)
    }

    /// Inserts geodesic midpoints so that no segment is longer than `max_len`.
    /// Times are interpolated linearly; the homotopy class is unchanged.
    pub fn refined(&self, max_len: f64) -> LeafPath {
        let mut times = vec![self.times[0]];
        let mut points = vec![self.points[0]];
        for i in 1..self.len() {
            let (p, q) = (self.points[i - 1], self.points[i]);
            let d = dist_p(&p, &q);
            let pieces = (d / max_len).floor() as usize + 1;
            if pieces > 1 {
                let frame = MobiusMap::chart(&p);
                let local = frame.inverse().apply(&q);
                for j in 1..pieces {
                    let s = j as f64 / pieces as f64;
                    times.push(self.times[i - 1] + s * (self.times[i] - self.times[i - 1]));
                    points.push(frame.apply(&DiscPoint::polar_unchecked(s * local.rho(), local.phi())));
                }
            }
            times.push(self.times[i]);
            points.push(q);
        }
        LeafPath {
            times,
            points,
            step: self.step,
        }
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    pub fn concat(&self, other: &LeafPath) -> Result<LeafPath> {
        if dist_p(&self.end(), &other.start()) > 1e-12 {
            return Err(Error::InvalidPath("concatenated paths do not meet".into()));
        }
        let t0 = self.duration();
        let mut times = self.times.clone();
        let mut points = self.points.clone();
        times.extend(other.times[1..].iter().map(|t| t + t0));
        points.extend_from_slice(&other.points[1..]);
        Ok(LeafPath {
            times,
            points,
            step: self.step.max(other.step),
        })
    }
}

pub(crate) fn check_horizon(t_max: f64, step: f64) -> Result<usize> {
    if !t_max.is_finite() || t_max < 0.0 {
        return Err(invalid("t_max", format!("must be finite and >= 0, got {t_max}")));
    }
    if !step.is_finite() || step <= 0.0 || step > MAX_STEP {
        return Err(invalid("step", format!("must lie in (0, {MAX_STEP}], got {step}")));
    }
    if t_max == 0.0 {
        return Ok(0);
    }
    Ok(((t_max / step) - 1e-9).ceil().max(1.0) as usize)
}

/// One Brownian increment over time `h` as (geodesic length, bearing).
pub fn increment<R: Rng + ?Sized>(rng: &mut R, h: f64) -> (f64, f64) {
    let n1: f64 = rng.sample(StandardNormal);
    let n2: f64 = rng.sample(StandardNormal);
    let s = (2.0 * h).sqrt();
    (s * n1.hypot(n2), n2.atan2(n1))
}

/// Samples a path on the uniform grid of `ceil(t_max / step)` steps ending at `t_max`.
pub fn sample_path(start: DiscPoint, t_max: f64, step: f64, rng: &RngStream) -> Result<LeafPath> {
    let n = check_horizon(t_max, step)?;
    let mut g = rng.rng();
    let mut times = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    times.push(0.0);
    points.push(start);
    if n == 0 {
        return Ok(LeafPath { times, points, step });
    }
    let h = t_max / n as f64;
    let mut p = start;
    for i in 1..=n {
        let (len, bearing) = increment(&mut g, h);
        p = p.displace(len, bearing).0;
        times.push(if i == n { t_max } else { i as f64 * h });
        points.push(p);
    }
    Ok(LeafPath { times, points, step })
}

/// The endpoint of `sample_path(start, t_max, step, rng)` without storing the path.
pub fn walk_endpoint(start: DiscPoint, t_max: f64, step: f64, rng: &RngStream) -> Result<DiscPoint> {
    let n = check_horizon(t_max, step)?;
    if n == 0 {
        return Ok(start);
    }
    let h = t_max / n as f64;
    let mut g = rng.rng();
    let mut p = start;
    for _ in 0..n {
        let (len, bearing) = increment(&mut g, h);
        p = p.displace(len, bearing).0;
    }
    Ok(p)
}

/// Endpoint together with the unwrapped polar angle, accumulated from
/// per-step increments so that it keeps precision far from the origin.
pub fn walk_polar(start: DiscPoint, t_max: f64, step: f64, rng: &RngStream) -> Result<(f64, f64)> {
    let n = check_horizon(t_max, step)?;
    let h = if n == 0 { 0.0 } else { t_max / n as f64 };
    let mut g = rng.rng();
    let mut p = start;
    let mut phi = start.phi();
    for _ in 0..n {
        let (len, bearing) = increment(&mut g, h);
        let (q, dphi) = p.displace(len, bearing);
        p = q;
        phi += dphi;
    }
    Ok((p.rho(), phi))
}
