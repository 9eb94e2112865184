//! Sampling and optimisation on the unit sphere of a subspace.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::cocycle::{CVector, Field};
use crate::cocycle::golden_section_min;
use crate::rng::RngStream;

fn normalized(v: CVector) -> CVector {
    let n = v.norm();
    v.map(|z| z / n)
}

/// `n` quasi-uniform points on the projective unit sphere of `K^k`: an angle
/// grid for real `k = 2`, a Fibonacci lattice for real `k = 3`, seeded
/// Gaussian directions otherwise.
pub fn sphere_samples(field: Field, k: usize, n: usize, rng: &RngStream) -> Vec<CVector> {
    let c = |x: f64| Complex64::new(x, 0.0);
    if k == 1 {
        return vec![CVector::from_element(1, c(1.0))];
    }
    match (field, k) {
        (Field::Real, 2) => (0..n)
            .map(|j| {
                let psi = PI * j as f64 / n as f64;
                CVector::from_vec(vec![c(psi.cos()), c(psi.sin())])
            })
            .collect(),
        (Field::Real, 3) => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|j| {
                    let z = (j as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * j as f64;
                    CVector::from_vec(vec![c(r * phi.cos()), c(r * phi.sin()), c(z)])
                })
                .collect()
        }
        _ => {
            let mut g = rng.rng();
            (0..n)
                .map(|_| {
                    let v = CVector::from_iterator(
                        k,
                        (0..k).map(|_| {
                            let re: f64 = g.sample(StandardNormal);
                            let im: f64 = if field == Field::Complex { g.sample(StandardNormal) } else { 0.0 };
                            Complex64::new(re, im)
                        }),
                    );
                    normalized(v)
                })
                .collect()
        }
    }
}

/// Best value of `objective` over the samples, refined by coordinate-wise
/// golden-section searches around the incumbent. Minimises unless `maximize`.
pub fn optimize_on_sphere<F: Fn(&CVector) -> f64>(
    field: Field,
    samples: &[CVector],
    objective: F,
    maximize: bool,
) -> (f64, CVector) {
    let sign = if maximize { -1.0 } else { 1.0 };
    let cost = |v: &CVector| sign * objective(v);
    let (mut best_v, mut best) = samples
        .iter()
        .map(|v| (v.clone(), cost(v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one sample");
    let k = best_v.len();
    if k > 1 {
        let mut delta = 0.5;
        for _ in 0..4 {
            for i in 0..k {
                let units: &[Complex64] = if field == Field::Complex {
                    &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]
                } else {
                    &[Complex64::new(1.0, 0.0)]
                };
                for &unit in units {
                    let along = |s: f64| {
                        let mut v = best_v.clone();
                        v[i] += unit * s;
                        if v.norm() == 0.0 {
                            return f64::INFINITY;
                        }
                        cost(&normalized(v))
                    };
                    let s = golden_section_min(along, -delta, delta, 1e-4 * delta);
                    let value = along(s);
                    if value < best {
                        best = value;
                        let mut v = best_v.clone();
                        v[i] += unit * s;
                        best_v = normalized(v);
                    }
                }
            }
            delta *= 0.25;
        }
    }
    (sign * best, best_v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_unit_vectors() {
        let s = RngStream::new(0, 0);
        for (field, k) in [(Field::Real, 2), (Field::Real, 3), (Field::Complex, 2), (Field::Real, 4)] {
            let pts = sphere_samples(field, k, 64, &s);
            assert_eq!(pts.len(), 64);
            assert!(pts.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12 && v.len() == k));
        }
        assert_eq!(sphere_samples(Field::Real, 1, 64, &s).len(), 1);
    }

    #[test]
    fn refines_a_quadratic_form() {
        // Rayleigh quotient of diag(3, 1, 2): max 3 at e1, min 1 at e2
        let q = |v: &CVector| 3.0 * v[0].norm_sqr() + v[1].norm_sqr() + 2.0 * v[2].norm_sqr();
        let samples = sphere_samples(Field::Real, 3, 64, &RngStream::new(1, 0));
        let (hi, _) = optimize_on_sphere(Field::Real, &samples, q, true);
        let (lo, _) = optimize_on_sphere(Field::Real, &samples, q, false);
        assert!((hi - 3.0).abs() < 1e-6 && (lo - 1.0).abs() < 1e-6, "{lo} {hi}");
    }
}
