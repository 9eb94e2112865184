//! The genus-2 surface as the quotient of the disc by the side pairings of a
//! regular octagon with interior angles π/4.
//!
//! Side `k` (1..=8) is the geodesic perpendicular to the direction
//! `(k - 1)π/4` at distance `a` (the inradius) from the origin. Generator
//! `g_k` is the translation by `2a` towards side `k + 4`; it maps side `k`
//! onto side `k + 4`, so `g_{k+4} = g_k^{-1}` and `g_k(D)` is the tile across
//! side `k + 4`.
//!
//! Words use signed letters: generator `k <= 4` is the letter `k`, generator
//! `k + 4` is the letter `-k`. A word `w1 w2 … wn` evaluates to the composition
//! `g_{w1} ∘ g_{w2} ∘ … ∘ g_{wn}`.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::diffusion::{increment, LeafPath};
use crate::error::{Error, Result};
use crate::hypgeo::{dist_p, wrap_angle, DiscPoint, MobiusMap};

/// Points whose side excess is within this of zero count as lying on the side.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Iteration cap for fundamental-domain reduction.
pub const REDUCTION_CAP: usize = 1_000_000;

/// Largest path segment accepted by [`FuchsianGroup::track`].
pub const TRACK_STEP_LIMIT: f64 = 0.1;

const BOUNDARY_PUSHES: usize = 16;

/// Signed letter of generator `k` in `1..=8`.
pub fn generator_letter(k: usize) -> i32 {
    assert!((1..=8).contains(&k), "generator index {k} out of range");
    if k <= 4 {
        k as i32
    } else {
        -((k - 4) as i32)
    }
}

/// Generator index in `1..=8` of a signed letter.
pub fn letter_generator(letter: i32) -> usize {
    assert!(letter != 0 && letter.abs() <= 4, "letter {letter} out of range");
    if letter > 0 {
        letter as usize
    } else {
        (4 - letter) as usize
    }
}

/// A freely reduced word in the four generators and their inverses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DeckWord {
    letters: Vec<i32>,
}

impl DeckWord {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates and freely reduces `letters`.
    pub fn new(letters: &[i32]) -> Result<Self> {
        let mut w = Self::empty();
        for &l in letters {
            if l == 0 || l.abs() > 4 {
                return Err(Error::InvalidParameter {
                    name: "letter",
                    reason: format!("{l} is not in ±1..±4"),
                });
            }
            w.push(l);
        }
        Ok(w)
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Right-multiplies by one letter, cancelling against the last letter.
    pub fn push(&mut self, letter: i32) {
        if self.letters.last() == Some(&-letter) {
            self.letters.pop();
        } else {
            self.letters.push(letter);
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// The reduced product `self · other`.
    pub fn concat(&self, other: &DeckWord) -> Self {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn eval(&self, group: &FuchsianGroup) -> MobiusMap {
        self.letters
            .iter()
            .fold(MobiusMap::IDENTITY, |acc, &l| acc * group.letter_map(l))
    }
}

/// The deck group of the genus-2 octagon surface.
#[derive(Clone, Debug)]
pub struct FuchsianGroup {
    generators: [MobiusMap; 8],
    vertices: [DiscPoint; 8],
    circumradius: f64,
    inradius: f64,
    cosh_a: f64,
    sinh_a: f64,
    relator: Vec<i32>,
    relator_residual: f64,
}

// Direction of the midpoint of side k.
fn side_direction(k: usize) -> f64 {
    (k - 1) as f64 * FRAC_PI_4
}

// Interior angle at a vertex of the regular octagon with circumradius `rc`.
fn vertex_angle_for(rc: f64) -> f64 {
    let v = |j: usize| DiscPoint::polar_unchecked(rc, side_direction(j) + FRAC_PI_8);
    let centre = MobiusMap::chart(&v(1)).inverse();
    let prev = centre.apply(&v(8));
    let next = centre.apply(&v(2));
    wrap_angle(prev.phi() - next.phi()).abs()
}

/// Builds the group; the circumradius is found by bisection on the vertex angle.
pub fn build_genus2() -> Result<FuchsianGroup> {
    let target = FRAC_PI_4;
    let (mut lo, mut hi) = (0.1_f64, 10.0_f64);
    if !(vertex_angle_for(lo) > target && vertex_angle_for(hi) < target) {
        return Err(Error::InvalidParameter {
            name: "circumradius",
            reason: "vertex angle does not bracket π/4".into(),
        });
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if vertex_angle_for(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rc = 0.5 * (lo + hi);
    let inradius = (rc.tanh() * FRAC_PI_8.cos()).atanh();
    let generators = std::array::from_fn(|i| {
        let dir = side_direction(i + 1) + PI;
        MobiusMap::translation(dir / (2.0 * PI), 2.0 * inradius)
    });
    let vertices = std::array::from_fn(|i| DiscPoint::polar_unchecked(rc, side_direction(i + 1) + FRAC_PI_8));
    let mut group = FuchsianGroup {
        generators,
        vertices,
        circumradius: rc,
        inradius,
        cosh_a: inradius.cosh(),
        sinh_a: inradius.sinh(),
        relator: Vec::new(),
        relator_residual: f64::NAN,
    };
    group.walk_vertex_cycle()?;
    Ok(group)
}

impl FuchsianGroup {
    /// Generator `g_k`, `k` in `1..=8`.
    pub fn generator(&self, k: usize) -> MobiusMap {
        self.generators[k - 1]
    }

    pub fn generators(&self) -> &[MobiusMap; 8] {
        &self.generators
    }

    pub fn letter_map(&self, letter: i32) -> MobiusMap {
        self.generators[letter_generator(letter) - 1]
    }

    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }

    /// Distance from the origin to each side.
    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    /// Vertex `k` lies between sides `k` and `k + 1`.
    pub fn vertices(&self) -> &[DiscPoint; 8] {
        &self.vertices
    }

    /// Endpoints of side `k`: vertices `k - 1` and `k`.
    pub fn side(&self, k: usize) -> (DiscPoint, DiscPoint) {
        let prev = if k == 1 { 8 } else { k - 1 };
        (self.vertices[prev - 1], self.vertices[k - 1])
    }

    /// Interior angle at vertex `k`.
    pub fn vertex_angle(&self, k: usize) -> f64 {
        let v = |j: usize| self.vertices[(j + 7) % 8];
        let centre = MobiusMap::chart(&v(k)).inverse();
        let prev = centre.apply(&v(k + 7));
        let next = centre.apply(&v(k + 1));
        wrap_angle(prev.phi() - next.phi()).abs()
    }

    /// The surface relator read off the vertex cycle.
    pub fn relator(&self) -> &[i32] {
        &self.relator
    }

    /// Coefficient distance of the evaluated relator from the identity.
    pub fn relator_residual(&self) -> f64 {
        self.relator_residual
    }

    fn nearest_vertex(&self, p: &DiscPoint) -> (usize, f64) {
        (1..=8)
            .map(|k| (k, dist_p(p, &self.vertices[k - 1])))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("eight vertices")
    }

    // Start at vertex 1 having entered across side 1, leave across the other
    // side at the vertex, and follow the pairing until the cycle closes.
    fn walk_vertex_cycle(&mut self) -> Result<()> {
        let mut vertex = 1usize;
        let mut entered = 1usize;
        let mut total = MobiusMap::IDENTITY;
        let mut letters = Vec::with_capacity(8);
        for _ in 0..8 {
            // vertex k touches sides k and k + 1
            let other = if entered == vertex { vertex % 8 + 1 } else { vertex };
            let g = self.generator(other);
            total = total * g.inverse();
            letters.push(-generator_letter(other));
            let image = g.apply(&self.vertices[vertex - 1]);
            let (next, err) = self.nearest_vertex(&image);
            if err > 1e-9 {
                return Err(Error::Representation(format!(
                    "side pairing moves vertex {vertex} off the vertex set (error {err:e})"
                )));
            }
            vertex = next;
            entered = (other + 3) % 8 + 1;
            if vertex == 1 && entered == 1 {
                break;
            }
        }
        self.relator = letters;
        self.relator_residual = total.distance_to_identity();
        Ok(())
    }

    /// Signed excess of `p` past side `k`: the sinh of the signed distance
    /// beyond the side, positive outside the octagon.
    pub fn side_excess(&self, k: usize, p: &DiscPoint) -> f64 {
        let (rho, phi) = (p.rho(), p.phi());
        self.cosh_a * rho.sinh() * (phi - side_direction(k)).cos() - self.sinh_a * rho.cosh()
    }

    fn side_excess_complex(&self, k: usize, z: Complex64) -> f64 {
        let r2 = z.norm_sqr();
        let proj = (z * Complex64::from_polar(1.0, -side_direction(k))).re;
        (2.0 * self.cosh_a * proj - self.sinh_a * (1.0 + r2)) / (1.0 - r2)
    }

    // Most violated side with ties going to the smallest index.
    fn worst_side(excess: impl Fn(usize) -> f64) -> (usize, f64) {
        let mut best = (1, excess(1));
        for k in 2..=8 {
            let e = excess(k);
            if e > best.1 {
                best = (k, e);
            }
        }
        best
    }

    /// True when `p` satisfies all eight side inequalities up to `slack`.
    pub fn contains(&self, p: &DiscPoint, slack: f64) -> bool {
        (1..=8).all(|k| self.side_excess(k, p) <= slack)
    }

    /// Minimum over sides of the negated excess (positive inside).
    pub fn interior_slack(&self, p: &DiscPoint) -> f64 {
        (1..=8).map(|k| -self.side_excess(k, p)).fold(f64::INFINITY, f64::min)
    }

    // Maps `p` into the closed octagon, appending to `word` the letter of
    // g_k^{-1} for every g_k applied.
    fn reduce(&self, mut p: DiscPoint, word: &mut DeckWord, normalize: bool) -> Result<DiscPoint> {
        let mut iterations = 0;
        loop {
            let (k, e) = Self::worst_side(|k| self.side_excess(k, &p));
            if e <= BOUNDARY_TOL {
                break;
            }
            iterations += 1;
            if iterations > REDUCTION_CAP {
                return Err(Error::ReductionCap { iterations: REDUCTION_CAP });
            }
            p = self.generator(k).apply(&p);
            word.push(-generator_letter(k));
        }
        if normalize {
            for _ in 0..BOUNDARY_PUSHES {
                let Some(k) = (5..=8).find(|&k| self.side_excess(k, &p) > -BOUNDARY_TOL) else {
                    break;
                };
                p = self.generator(k).apply(&p);
                word.push(-generator_letter(k));
            }
        }
        Ok(p)
    }

    /// Representative in the closed octagon and the word `W` with `W(rep) = z`.
    /// Points on sides 5..8 are moved to the paired side among 1..4.
    pub fn locate(&self, z: &DiscPoint) -> Result<(DiscPoint, DeckWord)> {
        let mut word = DeckWord::empty();
        let rep = self.reduce(*z, &mut word, true)?;
        Ok((rep, word))
    }

    /// Homotopy class of `path` relative to its start: `W_start^{-1} W_end`,
    /// built by following the path through successive tiles.
    pub fn track(&self, path: &LeafPath) -> Result<DeckWord> {
        let points = path.points();
        let (_, start_word) = self.locate(&points[0])?;
        let mut to_local = start_word.eval(self).inverse();
        let mut rel = DeckWord::empty();
        for (i, pair) in points.windows(2).enumerate() {
            let d = dist_p(&pair[0], &pair[1]);
            if !(d < TRACK_STEP_LIMIT) {
                return Err(Error::StepTooLong {
                    index: i,
                    length: d,
                    limit: TRACK_STEP_LIMIT,
                });
            }
            let local = to_local.apply(&pair[1]);
            let mut step = DeckWord::empty();
            let normalize = i + 2 == points.len();
            self.reduce(local, &mut step, normalize)?;
            for &l in step.letters() {
                // applying g to the local point means the frame gains g^{-1} = letter
                to_local = self.letter_map(-l) * to_local;
                rel.push(l);
            }
        }
        if points.len() == 1 {
            // a constant path still normalises its endpoint like locate
            let mut step = DeckWord::empty();
            self.reduce(to_local.apply(&points[0]), &mut step, true)?;
            return Ok(step);
        }
        Ok(rel)
    }

    /// Generator coefficients as text, 17 significant digits per number.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# genus2-octagon side pairings: z -> (a z + b) / (conj(b) z + conj(a))");
        let _ = writeln!(out, "circumradius {:.16e}", self.circumradius);
        let _ = writeln!(out, "inradius {:.16e}", self.inradius);
        let _ = writeln!(out, "relator_residual {:.16e}", self.relator_residual);
        let _ = writeln!(out, "# k a_re a_im b_re b_im");
        for (i, g) in self.generators.iter().enumerate() {
            let _ = writeln!(
                out,
                "g{} {:.16e} {:.16e} {:.16e} {:.16e}",
                i + 1,
                g.a().re,
                g.a().im,
                g.b().re,
                g.b().im
            );
        }
        out
    }
}

/// A point on the surface tracked in the local chart of the octagon, with
/// Brownian steps taken intrinsically. Each side crossing reports the letter
/// right-multiplied onto the path's word.
#[derive(Clone, Debug)]
pub struct SurfaceWalker<'g> {
    group: &'g FuchsianGroup,
    point: DiscPoint,
}

impl<'g> SurfaceWalker<'g> {
    /// Starts at `start`, which must already lie in the closed octagon.
    pub fn new(group: &'g FuchsianGroup, start: DiscPoint) -> Self {
        Self { group, point: start }
    }

    pub fn point(&self) -> DiscPoint {
        self.point
    }

    /// Moves by a geodesic segment and reduces back into the octagon.
    pub fn step(&mut self, len: f64, bearing: f64, out: &mut Vec<i32>) -> Result<()> {
        let (q, _) = self.point.displace(len, bearing);
        let mut w = DeckWord::empty();
        self.point = self.group.reduce(q, &mut w, false)?;
        out.extend_from_slice(w.letters());
        Ok(())
    }

    /// One Brownian step over time `h`.
    pub fn brownian_step<R: rand::Rng + ?Sized>(&mut self, h: f64, rng: &mut R, out: &mut Vec<i32>) -> Result<()> {
        let (len, bearing) = increment(rng, h);
        self.step(len, bearing, out)
    }
}

/// Spacing of the geodesic walker.
pub const GEODESIC_SPACING: f64 = 0.05;

/// A unit-speed geodesic followed in the local chart of the octagon.
///
/// The direction is the Euclidean angle of the tangent vector at the local
/// point. Beyond a length of about 37 the geodesic flow on the surface
/// amplifies rounding errors past unit size, so long rays are followed
/// faithfully only up to shadowing, which preserves the statistics that
/// the expansion rates depend on.
#[derive(Clone, Debug)]
pub struct GeodesicWalker<'g> {
    group: &'g FuchsianGroup,
    z: Complex64,
    alpha: f64,
}

impl<'g> GeodesicWalker<'g> {
    /// Starts at the origin heading in the leaf-direction `theta ∈ [0, 1)`.
    pub fn from_origin(group: &'g FuchsianGroup, theta: f64) -> Self {
        Self {
            group,
            z: Complex64::new(0.0, 0.0),
            alpha: 2.0 * PI * theta,
        }
    }

    pub fn position(&self) -> Complex64 {
        self.z
    }

    pub fn direction(&self) -> f64 {
        self.alpha
    }

    /// Advances by `len` (at most a few tenths) and reports side crossings.
    pub fn advance(&mut self, len: f64, out: &mut Vec<i32>) -> Result<()> {
        let w = Complex64::from_polar((0.5 * len).tanh(), self.alpha);
        let denom = Complex64::new(1.0, 0.0) + self.z.conj() * w;
        let z = (w + self.z) / denom;
        let mut alpha = self.alpha - 2.0 * denom.arg();
        let mut z = z;
        let mut iterations = 0;
        loop {
            let (k, e) = FuchsianGroup::worst_side(|k| self.group.side_excess_complex(k, z));
            if e <= BOUNDARY_TOL {
                break;
            }
            iterations += 1;
            if iterations > 64 {
                return Err(Error::ReductionCap { iterations });
            }
            let g = self.group.generator(k);
            alpha += g.derivative_arg(z);
            z = g.apply_complex(z);
            out.push(-generator_letter(k));
        }
        self.z = z;
        self.alpha = wrap_angle(alpha);
        Ok(())
    }

    /// Walks a total length `big_r` at the standard spacing.
    pub fn walk(&mut self, big_r: f64, out: &mut Vec<i32>) -> Result<()> {
        let n = (big_r / GEODESIC_SPACING).ceil() as usize;
        if n == 0 {
            return Ok(());
        }
        let h = big_r / n as f64;
        for _ in 0..n {
            self.advance(h, out)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::sample_path;
    use crate::hypgeo::GeodesicRay;
    use crate::rng::RngStream;
    use rand::Rng;
    use std::f64::consts::TAU;

    fn group() -> FuchsianGroup {
        build_genus2().unwrap()
    }

    #[test]
    fn octagon_geometry() {
        let g = group();
        // regular octagon with angle π/4: cosh R = cot²(π/8)
        let cot = 1.0 / FRAC_PI_8.tan();
        assert!((g.circumradius().cosh() - cot * cot).abs() < 1e-10);
        assert!((g.inradius().cosh() - cot).abs() < 1e-10);
        for k in 1..=8 {
            assert!((g.vertex_angle(k) - FRAC_PI_4).abs() < 1e-9, "vertex {k}");
        }
        assert!(g.relator_residual() <= 1e-8, "{}", g.relator_residual());
        assert_eq!(g.relator().len(), 8);
    }

    #[test]
    fn generators_pair_opposite_sides() {
        let g = group();
        for k in 1..=8 {
            let inv = g.generator((k + 3) % 8 + 1);
            assert!((g.generator(k) * inv).distance_to_identity() < 1e-10);
            let (p, q) = g.side(k);
            let (p2, q2) = g.side((k + 3) % 8 + 1);
            let (ip, iq) = (g.generator(k).apply(&p), g.generator(k).apply(&q));
            let err = dist_p(&ip, &q2).max(dist_p(&iq, &p2)).min(dist_p(&ip, &p2).max(dist_p(&iq, &q2)));
            assert!(err <= 1e-9, "side {k}: {err}");
        }
    }

    #[test]
    fn locate_examples() {
        let g = group();
        let (rep, w) = g.locate(&DiscPoint::ORIGIN).unwrap();
        assert_eq!(rep, DiscPoint::ORIGIN);
        assert!(w.is_empty());

        let z1 = g.generator(1).apply(&DiscPoint::ORIGIN);
        let (rep, w) = g.locate(&z1).unwrap();
        assert!(rep.rho() < 1e-10);
        assert_eq!(w.letters(), &[1]);

        let z2 = (g.generator(2) * g.generator(1)).apply(&DiscPoint::ORIGIN);
        let (rep, w) = g.locate(&z2).unwrap();
        assert!(rep.rho() < 1e-10);
        assert_eq!(w.letters(), &[2, 1]);
        assert!(w.eval(&g).distance_to(&(g.generator(2) * g.generator(1))) < 1e-10);
    }

    #[test]
    fn tiling_covers_the_disc() {
        let g = group();
        let mut rng = RngStream::new(21, 0).rng();
        for _ in 0..1000 {
            let r = 0.999 * rng.random::<f64>().sqrt();
            let z = DiscPoint::new(r * 0.3f64.cos(), 0.0).unwrap();
            let z = MobiusMap::rotation(TAU * rng.random::<f64>()).apply(&z);
            let (rep, w) = g.locate(&z).unwrap();
            assert!(g.interior_slack(&rep) >= -1e-9);
            assert!(dist_p(&w.eval(&g).apply(&rep), &z) < 1e-8);
            let again = g.locate(&z).unwrap();
            assert_eq!(again, (rep, w));
        }
    }

    #[test]
    fn boundary_points_prefer_low_sides() {
        let g = group();
        let mid5 = DiscPoint::from_polar(g.inradius(), side_direction(5)).unwrap();
        let (rep, w) = g.locate(&mid5).unwrap();
        assert!(g.side_excess(1, &rep).abs() < 1e-9);
        assert_eq!(w.letters(), &[1]);
        assert_eq!(g.locate(&mid5).unwrap(), (rep, w));
        let mid1 = DiscPoint::from_polar(g.inradius(), side_direction(1)).unwrap();
        let (_, w1) = g.locate(&mid1).unwrap();
        assert!(w1.is_empty());
    }

    #[test]
    fn words_reduce_and_invert() {
        let g = group();
        let w = DeckWord::new(&[1, 2, -2, 3]).unwrap();
        assert_eq!(w.letters(), &[1, 3]);
        assert!(DeckWord::new(&[5]).is_err());
        assert!(DeckWord::empty().eval(&g).distance_to_identity() == 0.0);
        let w = DeckWord::new(&[1, -3, 2]).unwrap();
        assert!((w.eval(&g) * w.inverse().eval(&g)).distance_to_identity() < 1e-10);
        assert!(w.concat(&w.inverse()).is_empty());
        let rel = DeckWord::new(g.relator()).unwrap();
        assert_eq!(rel.len(), 8);
        assert!(rel.eval(&g).distance_to_identity() < 1e-8);
    }

    fn geodesic_path(from: &DiscPoint, to: &DiscPoint, spacing: f64) -> LeafPath {
        let frame = MobiusMap::chart(from);
        let local = frame.inverse().apply(to);
        let n = (local.rho() / spacing).ceil().max(1.0) as usize;
        let points: Vec<DiscPoint> = (0..=n)
            .map(|i| frame.apply(&DiscPoint::from_polar(local.rho() * i as f64 / n as f64, local.phi()).unwrap()))
            .collect();
        let times = (0..=n).map(|i| i as f64).collect();
        LeafPath::new(times, points, 1.0).unwrap()
    }

    #[test]
    fn track_examples() {
        let g = group();
        assert!(g.track(&LeafPath::constant(DiscPoint::ORIGIN, 0.01)).unwrap().is_empty());
        let target = g.generator(1).apply(&DiscPoint::ORIGIN);
        let path = geodesic_path(&DiscPoint::ORIGIN, &target, 0.05);
        assert_eq!(g.track(&path).unwrap().letters(), &[1]);
        // out across side 1 and back
        let out = DiscPoint::from_polar(g.inradius() + 0.2, 0.0).unwrap();
        let there = geodesic_path(&DiscPoint::ORIGIN, &out, 0.05);
        let back = geodesic_path(&out, &DiscPoint::ORIGIN, 0.05);
        assert!(!g.track(&there).unwrap().is_empty());
        assert!(g.track(&there.concat(&back).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn track_rejects_long_steps() {
        let g = group();
        let far = DiscPoint::from_polar(0.5, 0.0).unwrap();
        let path = LeafPath::new(vec![0.0, 1.0], vec![DiscPoint::ORIGIN, far], 1.0).unwrap();
        assert!(matches!(g.track(&path), Err(Error::StepTooLong { index: 0, .. })));
    }

    #[test]
    fn track_agrees_with_locate() {
        let g = group();
        for i in 0..50 {
            let start = DiscPoint::from_polar(0.3, i as f64).unwrap();
            let path = sample_path(start, 3.0, 0.01, &RngStream::new(31, i)).unwrap().refined(0.05);
            let w = g.track(&path).unwrap();
            let (rep_s, w_s) = g.locate(&path.start()).unwrap();
            let (rep_e, w_e) = g.locate(&path.end()).unwrap();
            // equal as group elements; the letters may differ by a relator
            assert!(w_s.concat(&w).eval(&g).distance_to(&w_e.eval(&g)) < 1e-8);
            assert!(dist_p(&w_s.concat(&w).eval(&g).apply(&rep_e), &path.end()) < 1e-8);
            assert!(g.interior_slack(&rep_s) >= -1e-9);
            let (head, tail) = path.split_at(path.len() / 2);
            let joined = g.track(&head).unwrap().concat(&g.track(&tail).unwrap());
            assert_eq!(joined, w);
        }
    }

    #[test]
    fn geodesic_walker_follows_the_ray() {
        let g = group();
        for k in 0..16 {
            let theta = (k as f64 + 0.37) / 16.0;
            let mut walker = GeodesicWalker::from_origin(&g, theta);
            let mut word = DeckWord::empty();
            let mut out = Vec::new();
            walker.walk(12.0, &mut out).unwrap();
            for &l in &out {
                word.push(l);
            }
            let local = DiscPoint::from_complex(walker.position()).unwrap();
            let lifted = word.eval(&g).apply(&local);
            let exact = GeodesicRay::from_origin(theta).unwrap().eval(12.0).unwrap();
            assert!(dist_p(&lifted, &exact) < 1e-6, "theta {theta}: {}", dist_p(&lifted, &exact));
        }
    }

    #[test]
    fn surface_walker_lifts_consistently() {
        let g = group();
        let mut walker = SurfaceWalker::new(&g, DiscPoint::ORIGIN);
        let mut rng = RngStream::new(41, 0).rng();
        let mut word = DeckWord::empty();
        let mut lifted = vec![DiscPoint::ORIGIN];
        let mut lengths = Vec::new();
        for _ in 0..300 {
            let (len, bearing) = increment(&mut rng, 0.01);
            let mut out = Vec::new();
            walker.step(len, bearing, &mut out).unwrap();
            for &l in &out {
                word.push(l);
            }
            assert!(g.interior_slack(&walker.point()) >= -1e-9);
            lifted.push(word.eval(&g).apply(&walker.point()));
            lengths.push(len);
        }
        for (w, len) in lifted.windows(2).zip(&lengths) {
            assert!((dist_p(&w[0], &w[1]) - len).abs() < 1e-9);
        }
        let times = (0..lifted.len()).map(|i| i as f64 * 0.01).collect();
        let path = LeafPath::new(times, lifted, 0.01).unwrap().refined(0.05);
        assert_eq!(g.track(&path).unwrap(), word);
    }

    #[test]
    fn export_lists_all_generators() {
        let text = group().export();
        assert_eq!(text.lines().filter(|l| l.starts_with('g')).count(), 8);
        let line = text.lines().find(|l| l.starts_with("g1 ")).unwrap();
        let a_re: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert_eq!(a_re, group().generator(1).a().re);
    }
}
