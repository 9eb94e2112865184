//! Constant curvature −1 geometry on the Poincaré disc.
//!
//! The metric is `ds = 2|dz| / (1 - |z|^2)`, so the distance from the origin to
//! the Euclidean radius `r` is `R = log((1 + r) / (1 - r))`.
//!
//! Points are stored in geodesic polar coordinates about the origin. Brownian
//! paths routinely travel a hyperbolic distance of 50 to 100, where the
//! Euclidean radius `tanh(R/2)` is no longer distinguishable from 1 in double
//! precision; polar storage keeps the distance to the origin and the angle
//! exact at any range. Euclidean coordinates are derived on demand.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Points closer than this to the unit circle are rejected by the Euclidean constructor.
pub const DISC_MARGIN: f64 = 1e-15;

/// Determinant magnitude below which Möbius coefficients are rejected.
pub const MOBIUS_DET_MIN: f64 = 1e-14;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x % TAU;
    if y <= -PI {
        y += TAU;
    } else if y > PI {
        y -= TAU;
    }
    y
}

/// A point of the open unit disc.
#[derive(Clone, Copy, PartialEq)]
pub struct DiscPoint {
    rho: f64,
    phi: f64,
}

impl DiscPoint {
    pub const ORIGIN: DiscPoint = DiscPoint { rho: 0.0, phi: 0.0 };

    /// Builds a point from Euclidean coordinates; rejects `|z| >= 1 - 1e-15`.
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let r = re.hypot(im);
        if !r.is_finite() || r >= 1.0 - DISC_MARGIN {
            return Err(Error::OutsideDisc { re, im });
        }
        if r == 0.0 {
            return Ok(Self::ORIGIN);
        }
        Ok(Self {
            rho: 2.0 * r.atanh(),
            phi: im.atan2(re),
        })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// Builds a point from its hyperbolic distance to the origin and its polar angle.
    pub fn from_polar(rho: f64, phi: f64) -> Result<Self> {
        if !rho.is_finite() || rho < 0.0 {
            return Err(invalid("rho", format!("must be finite and >= 0, got {rho}")));
        }
        if !phi.is_finite() {
            return Err(invalid("phi", "must be finite"));
        }
        Ok(Self::polar_unchecked(rho, phi))
    }

    pub(crate) fn polar_unchecked(rho: f64, phi: f64) -> Self {
        if rho == 0.0 {
            Self::ORIGIN
        } else {
            Self {
                rho,
                phi: wrap_angle(phi),
            }
        }
    }

    /// Hyperbolic distance to the origin.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Polar angle in `(-π, π]`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Euclidean modulus `tanh(rho / 2)`.
    pub fn radius(&self) -> f64 {
        (0.5 * self.rho).tanh()
    }

    pub fn re(&self) -> f64 {
        self.radius() * self.phi.cos()
    }

    pub fn im(&self) -> f64 {
        self.radius() * self.phi.sin()
    }

    /// Euclidean coordinate. Saturates to the unit circle once `rho` exceeds about 37.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.radius(), self.phi)
    }

    /// Moves a hyperbolic distance `len` along the geodesic leaving this point
    /// at angle `bearing`, measured from the outward radial direction (from the
    /// direction `phi` when the point is the origin). Returns the new point and
    /// the increment of the polar angle, which is computed without cancellation
    /// so that small angular increments far from the origin keep full relative
    /// precision.
    pub fn displace(&self, len: f64, bearing: f64) -> (DiscPoint, f64) {
        let (sr, cr) = (self.rho.sinh(), self.rho.cosh());
        let (ss, cs) = (len.sinh(), len.cosh());
        let (sb, cb) = bearing.sin_cos();
        let x1 = cs * sr + ss * cb * cr;
        let x2 = ss * sb;
        let rho = x1.hypot(x2).asinh();
        let dphi = x2.atan2(x1);
        (DiscPoint::polar_unchecked(rho, self.phi + dphi), dphi)
    }
}

impl fmt::Debug for DiscPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DiscPoint {{ re: {:.6}, im: {:.6}, rho: {:.6} }}",
            self.re(),
            self.im(),
            self.rho
        )
    }
}

/// Hyperbolic distance between two points of the disc.
pub fn dist_p(p: &DiscPoint, q: &DiscPoint) -> f64 {
    if p == q {
        return 0.0;
    }
    // sinh^2(d/2) = sinh^2((r1 - r2)/2) + sinh r1 sinh r2 sin^2(dphi/2)
    let s = (0.5 * (p.rho - q.rho)).sinh();
    let h = (0.5 * wrap_angle(p.phi - q.phi)).sin();
    let x = s * s + p.rho.sinh() * q.rho.sinh() * h * h;
    2.0 * x.sqrt().asinh()
}

/// Euclidean radius of the hyperbolic circle of radius `big_r` about the origin.
pub fn radius_for_r(big_r: f64) -> Result<f64> {
    if !big_r.is_finite() || big_r < 0.0 {
        return Err(invalid("R", format!("must be finite and >= 0, got {big_r}")));
    }
    Ok((0.5 * big_r).tanh())
}

/// Inverse of [`radius_for_r`]: `log((1 + r) / (1 - r))`.
pub fn r_for_radius(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(invalid("r", format!("must lie in [0, 1), got {r}")));
    }
    Ok(2.0 * r.atanh())
}

/// A disc automorphism `z -> (a z + b) / (conj(b) z + conj(a))` with `|a|^2 - |b|^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    a: Complex64,
    b: Complex64,
}

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
    };

    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        if !det.is_finite() || det < MOBIUS_DET_MIN {
            return Err(Error::DegenerateMobius { det });
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Euclidean rotation `z -> e^{i angle} z`.
    pub fn rotation(angle: f64) -> Self {
        Self {
            a: Complex64::from_polar(1.0, 0.5 * angle),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// Hyperbolic translation of length `len` along the diameter in direction
    /// `2π theta`; it moves the origin to the point at distance `len` in that direction.
    pub fn translation(theta: f64, len: f64) -> Self {
        Self {
            a: Complex64::new((0.5 * len).cosh(), 0.0),
            b: Complex64::from_polar((0.5 * len).sinh(), TAU * theta),
        }
    }

    /// The map sending 0 to `p` with positive real derivative at 0.
    pub fn chart(p: &DiscPoint) -> Self {
        Self::translation(p.phi / TAU, p.rho)
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> Self {
        let a = self.a * other.a + self.b * other.b.conj();
        let b = self.a * other.b + self.b * other.a.conj();
        let out = Self { a, b };
        // The determinant is only computable without cancellation for moderate entries.
        if a.norm_sqr() <= 1e4 {
            let det = a.norm_sqr() - b.norm_sqr();
            if det > 0.0 {
                let s = det.sqrt();
                return Self { a: a / s, b: b / s };
            }
        }
        out
    }

    /// Applies the map to a Euclidean coordinate.
    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    /// Applies the map to a point. Computed through the composed frame so that
    /// images far from the origin keep their polar precision.
    pub fn apply(&self, p: &DiscPoint) -> DiscPoint {
        let frame = self.compose(&MobiusMap::chart(p));
        frame.origin_image()
    }

    /// The image of the origin, `b / conj(a)`.
    pub fn origin_image(&self) -> DiscPoint {
        let nb = self.b.norm();
        if nb == 0.0 {
            return DiscPoint::ORIGIN;
        }
        DiscPoint::polar_unchecked(2.0 * nb.asinh(), self.b.arg() + self.a.arg())
    }

    /// Argument of the derivative at the Euclidean point `z`; tangent directions rotate by this angle.
    pub fn derivative_arg(&self, z: Complex64) -> f64 {
        -2.0 * (self.b.conj() * z + self.a.conj()).arg()
    }

    /// Largest coefficient deviation from `other`, minimised over the global sign.
    pub fn distance_to(&self, other: &MobiusMap) -> f64 {
        let plus = (self.a - other.a).norm().max((self.b - other.b).norm());
        let minus = (self.a + other.a).norm().max((self.b + other.b).norm());
        plus.min(minus)
    }

    pub fn distance_to_identity(&self) -> f64 {
        self.distance_to(&MobiusMap::IDENTITY)
    }
}

impl Mul for MobiusMap {
    type Output = MobiusMap;

    fn mul(self, rhs: MobiusMap) -> MobiusMap {
        self.compose(&rhs)
    }
}

/// A unit-speed geodesic ray leaving `base` in the leaf-direction `direction ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicRay {
    pub base: DiscPoint,
    pub direction: f64,
}

impl GeodesicRay {
    pub fn new(base: DiscPoint, direction: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&direction) {
            return Err(invalid("direction", format!("must lie in [0, 1), got {direction}")));
        }
        Ok(Self { base, direction })
    }

    pub fn from_origin(direction: f64) -> Result<Self> {
        Self::new(DiscPoint::ORIGIN, direction)
    }

    /// The point at hyperbolic distance `big_r` along the ray.
    pub fn eval(&self, big_r: f64) -> Result<DiscPoint> {
        if !big_r.is_finite() || big_r < 0.0 {
            return Err(invalid("R", format!("must be finite and >= 0, got {big_r}")));
        }
        let local = DiscPoint::polar_unchecked(big_r, TAU * self.direction);
        if self.base == DiscPoint::ORIGIN {
            return Ok(local);
        }
        Ok(MobiusMap::chart(&self.base).apply(&local))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Independent oracle: invert R(r) = log((1+r)/(1-r)) by bisection.
    fn bisect_radius(target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ((1.0 + mid) / (1.0 - mid)).ln() < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    // Independent oracle: move p to 0 with a Euclidean Möbius map, then use the radial formula.
    fn reduced_distance(p: Complex64, q: Complex64) -> f64 {
        let w = ((q - p) / (c(1.0, 0.0) - p.conj() * q)).norm();
        ((1.0 + w) / (1.0 - w)).ln()
    }

    #[test]
    fn distance_examples() {
        let o = DiscPoint::ORIGIN;
        assert_eq!(dist_p(&o, &o), 0.0);
        let half = DiscPoint::new(0.5, 0.0).unwrap();
        assert!((dist_p(&o, &half) - 3f64.ln()).abs() < 1e-14);
        let p = DiscPoint::new(0.3, 0.0).unwrap();
        let q = DiscPoint::new(0.0, 0.3).unwrap();
        let expected = reduced_distance(c(0.3, 0.0), c(0.0, 0.3));
        assert!((dist_p(&p, &q) - expected).abs() < 1e-13);
        assert!((dist_p(&q, &p) - expected).abs() < 1e-13);
    }

    #[test]
    fn radius_examples() {
        assert_eq!(radius_for_r(0.0).unwrap(), 0.0);
        assert!((radius_for_r(3f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        let r2 = radius_for_r(2.0).unwrap();
        assert!((r2 - bisect_radius(2.0)).abs() < 1e-14);
        assert!((r2 - 0.7615942).abs() < 1e-7);
        assert!(radius_for_r(-1.0).is_err());
        assert!(radius_for_r(f64::NAN).is_err());
        assert!(radius_for_r(f64::INFINITY).is_err());
    }

    #[test]
    fn radius_round_trip() {
        let o = DiscPoint::ORIGIN;
        for r in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99] {
            let p = DiscPoint::new(r, 0.0).unwrap();
            let back = radius_for_r(dist_p(&o, &p)).unwrap();
            assert!((back - r).abs() <= 1e-12, "r = {r}: {back}");
            let big_r = r_for_radius(r).unwrap();
            assert!((dist_p(&o, &DiscPoint::new(radius_for_r(big_r).unwrap(), 0.0).unwrap()) - big_r).abs() <= 1e-12);
        }
    }

    #[test]
    fn construction_rejects_boundary() {
        assert!(DiscPoint::new(1.0, 0.0).is_err());
        assert!(DiscPoint::new(0.0, 1.0 - 1e-16).is_err());
        assert!(DiscPoint::new(f64::NAN, 0.0).is_err());
        assert!(DiscPoint::new(0.999_999, 0.0).is_ok());
        assert!(DiscPoint::from_polar(-1.0, 0.0).is_err());
        // far points stay representable in polar form
        let far = DiscPoint::from_polar(80.0, 1.0).unwrap();
        assert_eq!(far.rho(), 80.0);
    }

    #[test]
    fn geodesic_examples() {
        let ray = GeodesicRay::from_origin(0.37).unwrap();
        assert_eq!(ray.eval(0.0).unwrap(), DiscPoint::ORIGIN);
        let p = GeodesicRay::from_origin(0.25).unwrap().eval(3f64.ln()).unwrap();
        assert!(p.re().abs() < 1e-15 && (p.im() - 0.5).abs() < 1e-15);
        let q = GeodesicRay::from_origin(0.5).unwrap().eval(2.0).unwrap();
        assert!((q.re() + bisect_radius(2.0)).abs() < 1e-14 && q.im().abs() < 1e-14);
        assert!(GeodesicRay::from_origin(1.0).is_err());
        assert!(ray.eval(-0.5).is_err());
    }

    #[test]
    fn ray_from_base_starts_at_base() {
        let base = DiscPoint::new(0.2, -0.4).unwrap();
        let ray = GeodesicRay::new(base, 0.1).unwrap();
        let p = ray.eval(0.0).unwrap();
        assert!(dist_p(&p, &base) < 1e-14);
    }

    #[test]
    fn unit_speed_grid() {
        let bases = [
            DiscPoint::ORIGIN,
            DiscPoint::new(0.3, 0.4).unwrap(),
            DiscPoint::new(-0.7, 0.1).unwrap(),
        ];
        for base in bases {
            for k in 0..8 {
                let ray = GeodesicRay::new(base, k as f64 / 8.0).unwrap();
                for (r1, r2) in [(0.0, 1.0), (0.5, 2.5), (1.0, 7.0), (3.0, 3.25), (10.0, 20.0)] {
                    let d = dist_p(&ray.eval(r1).unwrap(), &ray.eval(r2).unwrap());
                    assert!((d - (r2 - r1)).abs() <= 1e-10, "base {base:?} k {k}: {d} vs {}", r2 - r1);
                }
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let z = DiscPoint::new(0.3, 0.2).unwrap();
        let w = MobiusMap::IDENTITY.apply(&z);
        assert!((w.re() - 0.3).abs() < 1e-15 && (w.im() - 0.2).abs() < 1e-15);
        let quarter = MobiusMap::rotation(0.5 * PI);
        let w = quarter.apply(&DiscPoint::new(0.5, 0.0).unwrap());
        assert!(w.re().abs() < 1e-15 && (w.im() - 0.5).abs() < 1e-15);
        let t = MobiusMap::translation(0.0, 1.0);
        let w = t.apply(&DiscPoint::ORIGIN);
        assert!((w.re() - bisect_radius(1.0)).abs() < 1e-14);
        assert!((w.re() - 0.4621172).abs() < 1e-7);
        assert!(MobiusMap::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(MobiusMap::new(c(0.5, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn translation_matches_ray() {
        for k in 0..12 {
            let theta = k as f64 / 12.0;
            for len in [0.1, 1.0, 4.0, 9.0] {
                let p = MobiusMap::translation(theta, len).apply(&DiscPoint::ORIGIN);
                let q = GeodesicRay::from_origin(theta).unwrap().eval(len).unwrap();
                assert!(dist_p(&p, &q) < 1e-12 * len.cosh(), "{theta} {len} {}", dist_p(&p, &q));
            }
        }
    }

    #[test]
    fn group_laws() {
        let f = MobiusMap::new(c(1.3, 0.2), c(0.4, -0.6)).unwrap();
        let g = MobiusMap::translation(0.3, 1.7) * MobiusMap::rotation(0.4);
        assert!((f * f.inverse()).distance_to_identity() < 1e-12);
        assert!((f.inverse() * f).distance_to_identity() < 1e-12);
        let lhs = (f * g) * f.inverse();
        let rhs = f * (g * f.inverse());
        assert!(lhs.distance_to(&rhs) < 1e-12);
        let z = DiscPoint::new(-0.2, 0.55).unwrap();
        let one = (f * g).apply(&z);
        let two = f.apply(&g.apply(&z));
        assert!(dist_p(&one, &two) < 1e-12);
    }

    #[test]
    fn displace_is_unit_speed() {
        let p = DiscPoint::new(0.4, -0.3).unwrap();
        for k in 0..16 {
            let bearing = k as f64 * TAU / 16.0;
            let (q, _) = p.displace(0.7, bearing);
            assert!((dist_p(&p, &q) - 0.7).abs() < 1e-12);
        }
        let far = DiscPoint::from_polar(60.0, 0.3).unwrap();
        let (q, dphi) = far.displace(0.2, 0.5 * PI);
        assert!((q.rho() - 60.0) > 0.0 && dphi > 0.0 && dphi < 1e-20);
        let (q, _) = far.displace(0.2, 0.0);
        assert!((q.rho() - 60.2).abs() < 1e-12);
    }

    fn point_strategy() -> impl Strategy<Value = DiscPoint> {
        (0.0f64..0.95, -PI..PI).prop_map(|(r, t)| DiscPoint::new(r * t.cos(), r * t.sin()).unwrap())
    }

    fn map_strategy() -> impl Strategy<Value = MobiusMap> {
        (0.0f64..1.0, 0.0f64..3.0, -PI..PI)
            .prop_map(|(th, len, rot)| MobiusMap::translation(th, len) * MobiusMap::rotation(rot))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn isometry(m in map_strategy(), p in point_strategy(), q in point_strategy()) {
            let before = dist_p(&p, &q);
            let after = dist_p(&m.apply(&p), &m.apply(&q));
            prop_assert!((after - before).abs() <= 1e-10, "{} vs {}", after, before);
        }

        #[test]
        fn triangle_inequality(p in point_strategy(), q in point_strategy(), r in point_strategy()) {
            let slack = dist_p(&p, &q) + dist_p(&q, &r) - dist_p(&p, &r);
            prop_assert!(slack >= -1e-10);
        }

        #[test]
        fn distance_matches_reduction_oracle(p in point_strategy(), q in point_strategy()) {
            let oracle = reduced_distance(p.to_complex(), q.to_complex());
            prop_assert!((dist_p(&p, &q) - oracle).abs() <= 1e-9 * (1.0 + oracle));
        }
    }
}
