//! Representation cocycles over the genus-2 surface.
//!
//! A representation assigns a matrix to each of the four generators. Along a
//! leafwise path with deck word `W` (from [`FuchsianGroup::track`]) the cocycle
//! is `A = ρ(W)^{-1}`, which satisfies `A(full) = A(tail) · A(head)` for a
//! path split at any sample. The identifier between fibres is constant, so
//! cocycle values only change when a path crosses a side of the octagon.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::diffusion::{LeafPath, ScalarField};
use crate::error::{Error, Result};
use crate::hypgeo::{dist_p, DiscPoint};
use crate::rng::{linear_fit, RngStream};
use crate::surface::{letter_generator, DeckWord, FuchsianGroup};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest admissible condition number of a generator image.
pub const MAX_CONDITION: f64 = 1e12;

/// Residual below which the relator image counts as the identity.
pub const RELATOR_TOL: f64 = 1e-8;

/// Product norms beyond this move into the log-scale accumulator.
pub const RESCALE_THRESHOLD: f64 = 1e300;

/// Scalar field of a representation. Only affects parsing and sphere sampling;
/// arithmetic is complex throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn name(&self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].norm();
    }
    let big = max_entry(m);
    if big == 0.0 || !big.is_finite() {
        return big;
    }
    // The SVD breaks down on subnormal entries, which carry no weight at this scale anyway.
    let scaled = m.map(|z| {
        let w = z / big;
        if w.norm() < 1e-200 {
            Complex64::new(0.0, 0.0)
        } else {
            w
        }
    });
    big * scaled.singular_values().max()
}

fn condition_number(m: &CMatrix) -> f64 {
    let s = m.singular_values();
    s.max() / s.min()
}

/// A representation of the surface group in `GL(d)`.
#[derive(Clone, Debug)]
pub struct Representation {
    dim: usize,
    field: Field,
    images: Vec<CMatrix>,
    inverses: Vec<CMatrix>,
    log_abs_dets: [f64; 4],
    relator_residual: f64,
}

impl Representation {
    /// Validates the four generator images and evaluates the surface relator.
    pub fn new(field: Field, images: Vec<CMatrix>, group: &FuchsianGroup) -> Result<Self> {
        if images.len() != 4 {
            return Err(Error::Representation(format!("expected 4 images, got {}", images.len())));
        }
        let dim = images[0].nrows();
        if dim == 0 {
            return Err(Error::Representation("dimension must be at least 1".into()));
        }
        let mut inverses = Vec::with_capacity(4);
        let mut log_abs_dets = [0.0; 4];
        for (k, m) in images.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Representation(format!(
                    "image {} is {}x{}, expected {dim}x{dim}",
                    k + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Representation(format!("image {} has non-finite entries", k + 1)));
            }
            if field == Field::Real && m.iter().any(|z| z.im != 0.0) {
                return Err(Error::Representation(format!(
                    "image {} has complex entries in a real representation",
                    k + 1
                )));
            }
            let cond = condition_number(m);
            if !(cond < MAX_CONDITION) {
                return Err(Error::Representation(format!(
                    "image {} has condition number {cond:e} (limit {MAX_CONDITION:e})",
                    k + 1
                )));
            }
            let inv = m
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Representation(format!("image {} is singular", k + 1)))?;
            inverses.push(inv);
            log_abs_dets[k] = m.determinant().norm().ln();
        }
        let mut rep = Self {
            dim,
            field,
            images,
            inverses,
            log_abs_dets,
            relator_residual: f64::NAN,
        };
        let relator = rep.word_product(group.relator());
        rep.relator_residual = (relator - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        Ok(rep)
    }

    /// Real representation from row-major entries.
    pub fn real(images: &[Vec<f64>], dim: usize, group: &FuchsianGroup) -> Result<Self> {
        let mats = images
            .iter()
            .map(|rows| {
                if rows.len() != dim * dim {
                    return Err(Error::Representation(format!(
                        "expected {} entries, got {}",
                        dim * dim,
                        rows.len()
                    )));
                }
                Ok(CMatrix::from_row_iterator(dim, dim, rows.iter().map(|&x| Complex64::new(x, 0.0))))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(Field::Real, mats, group)
    }

    /// All images equal to the identity.
    pub fn trivial(dim: usize, group: &FuchsianGroup) -> Result<Self> {
        Self::new(Field::Real, vec![CMatrix::identity(dim, dim); 4], group)
    }

    /// `ρ(g_1) = diag(entries)`, the other images the identity.
    pub fn diagonal_on_first(entries: &[f64], group: &FuchsianGroup) -> Result<Self> {
        let d = entries.len();
        let first = CMatrix::from_diagonal(&CVector::from_iterator(d, entries.iter().map(|&x| Complex64::new(x, 0.0))));
        let mut images = vec![CMatrix::identity(d, d); 4];
        images[0] = first;
        Self::new(Field::Real, images, group)
    }

    /// The generators themselves as `SU(1,1)` matrices `[[a, b], [conj b, conj a]]`.
    pub fn uniformizing(group: &FuchsianGroup) -> Result<Self> {
        let images = (1..=4)
            .map(|k| {
                let g = group.generator(k);
                CMatrix::from_row_slice(2, 2, &[g.a(), g.b(), g.b().conj(), g.a().conj()])
            })
            .collect();
        Self::new(Field::Complex, images, group)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    pub fn relator_residual(&self) -> f64 {
        self.relator_residual
    }

    /// True when the relator maps to the identity, so the cocycle is well defined.
    pub fn is_exact(&self) -> bool {
        self.relator_residual <= RELATOR_TOL
    }

    pub fn require_exact(&self) -> Result<()> {
        if self.is_exact() {
            Ok(())
        } else {
            Err(Error::Representation(format!(
                "projective-only: relator residual {:e} exceeds {RELATOR_TOL:e}",
                self.relator_residual
            )))
        }
    }

    /// `ρ` of a signed letter.
    pub fn letter(&self, letter: i32) -> &CMatrix {
        let k = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            &self.images[k]
        } else {
            &self.inverses[k]
        }
    }

    /// `log|det ρ|` of a signed letter.
    pub fn letter_log_abs_det(&self, letter: i32) -> f64 {
        let v = self.log_abs_dets[letter.unsigned_abs() as usize - 1];
        if letter > 0 {
            v
        } else {
            -v
        }
    }

    fn word_product(&self, letters: &[i32]) -> CMatrix {
        letters
            .iter()
            .fold(CMatrix::identity(self.dim, self.dim), |acc, &l| acc * self.letter(l))
    }
}

/// A cocycle value `exp(log_scale) · matrix`.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleValue {
    pub matrix: CMatrix,
    pub log_scale: f64,
}

impl CocycleValue {
    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
            log_scale: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `self · m`, rescaling before the product could leave the floating range.
    pub fn mul_right(&mut self, m: &CMatrix) {
        self.rescale_for(m);
        self.matrix = &self.matrix * m;
    }

    /// `m · self`.
    pub fn mul_left(&mut self, m: &CMatrix) {
        self.rescale_for(m);
        self.matrix = m * &self.matrix;
    }

    fn rescale_for(&mut self, m: &CMatrix) {
        // entry magnitudes: the Frobenius norm squares them and overflows early
        let a = max_entry(&self.matrix);
        let bound = a * max_entry(m) * self.dim() as f64;
        if bound > RESCALE_THRESHOLD || (a > 0.0 && a < 1.0 / RESCALE_THRESHOLD) {
            // real scaling: complex division would square `a`
            self.matrix.apply(|z| *z = *z / a);
            self.log_scale += a.ln();
        }
    }

    /// `log ||A||` with the operator norm.
    pub fn log_norm(&self) -> f64 {
        self.log_scale + operator_norm(&self.matrix).ln()
    }

    /// `log (||A v|| / ||v||)`.
    pub fn log_stretch(&self, v: &CVector) -> f64 {
        let w = &self.matrix * v;
        let s = w.iter().chain(v.iter()).map(|z| z.norm()).fold(0.0, f64::max);
        let ratio = (w.map(|z| z / s).norm()) / (v.map(|z| z / s).norm());
        self.log_scale + ratio.ln()
    }

    pub fn log_abs_det(&self) -> f64 {
        self.dim() as f64 * self.log_scale + self.matrix.determinant().norm().ln()
    }

    /// `log` of the singular values in decreasing order, with the matching
    /// right singular vectors as columns.
    pub fn log_singular_values(&self) -> Result<(Vec<f64>, CMatrix)> {
        let big = max_entry(&self.matrix);
        if !(big > 0.0 && big.is_finite()) {
            return Err(Error::FrameDegeneracy { step: 0, value: big });
        }
        let scaled = self.matrix.map(|z| {
            let w = z / big;
            if w.norm() < 1e-200 {
                Complex64::new(0.0, 0.0)
            } else {
                w
            }
        });
        let svd = scaled.svd(false, true);
        let vt = svd.v_t.expect("requested right singular vectors");
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let mut logs = Vec::with_capacity(self.dim());
        let mut basis = CMatrix::zeros(self.dim(), self.dim());
        for (col, &i) in order.iter().enumerate() {
            let s = svd.singular_values[i];
            if !(s > 0.0) {
                return Err(Error::FrameDegeneracy { step: 0, value: s });
            }
            logs.push(self.log_scale + big.ln() + s.ln());
            basis.set_column(col, &vt.row(i).adjoint());
        }
        Ok((logs, basis))
    }

    /// The value as a plain matrix (may overflow for large scales).
    pub fn to_matrix(&self) -> CMatrix {
        &self.matrix * Complex64::new(self.log_scale.exp(), 0.0)
    }
}

/// Ordered product `ρ(w1) ρ(w2) …` along the word.
pub fn cocycle_of_word(rep: &Representation, word: &DeckWord) -> Result<CocycleValue> {
    rep.require_exact()?;
    Ok(product_of_letters(rep, word.letters()))
}

pub(crate) fn product_of_letters(rep: &Representation, letters: &[i32]) -> CocycleValue {
    let mut acc = CocycleValue::identity(rep.dim());
    for &l in letters {
        acc.mul_right(rep.letter(l));
    }
    acc
}

/// The cocycle along a leafwise path: `ρ(W)^{-1}` for the tracked word `W`.
pub fn evaluate(rep: &Representation, path: &LeafPath, group: &FuchsianGroup) -> Result<CocycleValue> {
    let word = group.track(path)?;
    cocycle_of_word(rep, &word.inverse())
}

/// `f(ζ) = log ||A(base → ζ) v|| - log ||v||` for a fixed direction `v`.
#[derive(Clone, Debug)]
pub struct Specialization<'a> {
    rep: &'a Representation,
    group: &'a FuchsianGroup,
    base: DiscPoint,
    base_word: DeckWord,
    vector: CVector,
}

/// Specialization based at the origin.
pub fn specialize<'a>(rep: &'a Representation, group: &'a FuchsianGroup, u: &CVector) -> Result<Specialization<'a>> {
    specialize_at(rep, group, DiscPoint::ORIGIN, u)
}

/// Specialization based at `eta` with direction `v`.
pub fn specialize_at<'a>(
    rep: &'a Representation,
    group: &'a FuchsianGroup,
    eta: DiscPoint,
    v: &CVector,
) -> Result<Specialization<'a>> {
    rep.require_exact()?;
    if v.len() != rep.dim() {
        return Err(Error::Representation(format!(
            "direction has length {}, representation has dimension {}",
            v.len(),
            rep.dim()
        )));
    }
    let n = v.norm();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Representation("direction must be a finite nonzero vector".into()));
    }
    let (_, base_word) = group.locate(&eta)?;
    Ok(Specialization {
        rep,
        group,
        base: eta,
        base_word,
        vector: v.clone(),
    })
}

impl Specialization<'_> {
    pub fn base(&self) -> DiscPoint {
        self.base
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    /// Cocycle from the base to `zeta`: `ρ(W_ζ)^{-1} ρ(W_base)`.
    pub fn cocycle_to(&self, zeta: &DiscPoint) -> Result<CocycleValue> {
        let (_, w) = self.group.locate(zeta)?;
        let rel = w.inverse().concat(&self.base_word);
        Ok(product_of_letters(self.rep, rel.letters()))
    }

    pub fn try_value(&self, zeta: &DiscPoint) -> Result<f64> {
        let (_, w) = self.group.locate(zeta)?;
        let rel = w.inverse().concat(&self.base_word);
        if rel.is_empty() {
            return Ok(0.0);
        }
        // apply the letters right to left, rescaling only far from unit size
        let mut v = self.vector.clone();
        let mut log = 0.0;
        for &l in rel.letters().iter().rev() {
            v = self.rep.letter(l) * v;
            let n = v.norm();
            if !(1e-150..=1e150).contains(&n) {
                log += n.ln();
                v.apply(|z| *z = *z / n);
            }
        }
        log += v.norm().ln() - self.vector.norm().ln();
        Ok(log)
    }
}

impl ScalarField for Specialization<'_> {
    fn value(&self, p: &DiscPoint) -> f64 {
        self.try_value(p).unwrap_or(f64::NAN)
    }
}

/// Output of [`estimate_regularity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularityFit {
    /// Exponent of the best power-law fit `c d^alpha + k` to the envelope.
    pub alpha: f64,
    pub c: f64,
    /// Slope of the least-squares line through the envelope.
    pub lipschitz_c: f64,
}

/// Number of distance bins of the envelope.
pub const REGULARITY_BINS: usize = 16;

/// Fits the upper envelope of `|f(y) - f(z)|` against `dist_P(y, z) <= radius`.
pub fn estimate_regularity<F: ScalarField + ?Sized>(
    f: &F,
    n_pairs: usize,
    radius: f64,
    rng: &RngStream,
) -> Result<RegularityFit> {
    use rand::Rng;
    if n_pairs < 100 {
        return Err(Error::InvalidParameter {
            name: "n_pairs",
            reason: format!("must be >= 100, got {n_pairs}"),
        });
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter {
            name: "radius",
            reason: format!("must be finite and > 0, got {radius}"),
        });
    }
    let mut g = rng.rng();
    let width = radius / REGULARITY_BINS as f64;
    let mut envelope = vec![0.0_f64; REGULARITY_BINS];
    let mut seen = vec![false; REGULARITY_BINS];
    for _ in 0..n_pairs {
        let y = DiscPoint::polar_unchecked(radius * g.random::<f64>(), std::f64::consts::TAU * g.random::<f64>());
        let d = radius * (1.0 - g.random::<f64>());
        let (z, _) = y.displace(d, std::f64::consts::TAU * g.random::<f64>());
        let diff = (f.value(&y) - f.value(&z)).abs();
        if !diff.is_finite() {
            continue;
        }
        let bin = ((dist_p(&y, &z) / width) as usize).min(REGULARITY_BINS - 1);
        envelope[bin] = envelope[bin].max(diff);
        seen[bin] = true;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = (0..REGULARITY_BINS)
        .filter(|&b| seen[b])
        .map(|b| ((b + 1) as f64 * width, envelope[b]))
        .unzip();
    if ys.iter().all(|&y| y == 0.0) {
        return Ok(RegularityFit {
            alpha: 0.0,
            c: 0.0,
            lipschitz_c: 0.0,
        });
    }
    let lipschitz_c = linear_fit(&xs, &ys).map(|(s, _)| s).unwrap_or(0.0);
    let fit = |alpha: f64| -> (f64, f64) {
        let xa: Vec<f64> = xs.iter().map(|x| x.powf(alpha)).collect();
        match linear_fit(&xa, &ys) {
            Some((c, k)) => {
                let sse = xa.iter().zip(&ys).map(|(x, y)| (c * x + k - y).powi(2)).sum();
                (sse, c)
            }
            None => (f64::INFINITY, 0.0),
        }
    };
    let alpha = golden_section_min(|a| fit(a).0, 1e-3, 2.0, 1e-6);
    let (_, c) = fit(alpha);
    Ok(RegularityFit { alpha, c, lipschitz_c })
}

/// Minimises a unimodal function on `[lo, hi]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Generator index of a letter, for diagnostics.
pub fn letter_name(letter: i32) -> String {
    format!("g{}", letter_generator(letter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{sample_path, Distance};
    use crate::surface::build_genus2;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn word_products() {
        let g = build_genus2().unwrap();
        let rep = Representation::real(
            &[
                vec![2.0, 0.0, 0.0, 0.5],
                vec![1.0, 1.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0, 1.0],
            ],
            2,
            &g,
        );
        // a generic pair of images does not satisfy the relator
        let rep = rep.unwrap();
        assert!(!rep.is_exact());
        assert!(cocycle_of_word(&rep, &DeckWord::empty()).is_err());

        let rep = Representation::diagonal_on_first(&[2.0, 0.5], &g).unwrap();
        assert!(rep.is_exact());
        let id = cocycle_of_word(&rep, &DeckWord::empty()).unwrap();
        assert_eq!(id.to_matrix(), CMatrix::identity(2, 2));
        let one = cocycle_of_word(&rep, &DeckWord::new(&[1]).unwrap()).unwrap();
        assert_eq!(one.to_matrix(), CMatrix::from_row_slice(2, 2, &[c(2.0), c(0.0), c(0.0), c(0.5)]));

        let u = Representation::uniformizing(&g).unwrap();
        assert!(u.is_exact(), "{}", u.relator_residual());
        let w = DeckWord::new(&[2, 1]).unwrap();
        let direct = u.images()[1].clone() * u.images()[0].clone();
        let got = cocycle_of_word(&u, &w).unwrap().to_matrix();
        assert!((got - direct).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_images() {
        let g = build_genus2().unwrap();
        assert!(Representation::diagonal_on_first(&[1e13, 1.0], &g).is_err());
        assert!(Representation::real(&vec![vec![1.0]; 3], 1, &g).is_err());
        let complex = vec![CMatrix::from_element(1, 1, Complex64::new(0.0, 1.0)); 4];
        assert!(Representation::new(Field::Real, complex.clone(), &g).is_err());
        assert!(Representation::new(Field::Complex, complex, &g).unwrap().is_exact());
    }

    #[test]
    fn log_scaling_survives_overflow() {
        let g = build_genus2().unwrap();
        let rep = Representation::diagonal_on_first(&[1e5, 1e-5], &g).unwrap();
        let word = DeckWord::new(&[1; 100]).unwrap();
        let v = cocycle_of_word(&rep, &word).unwrap();
        assert!((v.log_norm() - 500.0 * 10f64.ln()).abs() < 1e-9);
        assert!(v.matrix.iter().all(|z| z.re.is_finite()));
    }

    #[test]
    fn singular_values_of_diagonal() {
        let mut v = CocycleValue::identity(3);
        v.mul_left(&CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5), c(4.0), c(1.0)])));
        let (logs, basis) = v.log_singular_values().unwrap();
        assert!((logs[0] - 4f64.ln()).abs() < 1e-12);
        assert!(logs[1].abs() < 1e-12);
        assert!((logs[2] - 0.5f64.ln()).abs() < 1e-12);
        assert!((basis[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn determinant_additivity() {
        let g = build_genus2().unwrap();
        let rep = Representation::new(
            Field::Real,
            vec![
                CMatrix::from_row_slice(2, 2, &[c(3.0), c(0.0), c(0.0), c(0.5)]),
                CMatrix::identity(2, 2),
                CMatrix::identity(2, 2),
                CMatrix::identity(2, 2),
            ],
            &g,
        )
        .unwrap();
        for i in 0..20 {
            let path = sample_path(DiscPoint::ORIGIN, 4.0, 0.01, &RngStream::new(55, i)).unwrap().refined(0.05);
            let word = g.track(&path).unwrap();
            let value = evaluate(&rep, &path, &g).unwrap();
            let expected: f64 = word.inverse().letters().iter().map(|&l| rep.letter_log_abs_det(l)).sum();
            assert!((value.log_abs_det() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn specialization_basics() {
        let g = build_genus2().unwrap();
        let rep = Representation::diagonal_on_first(&[2.0, 0.5], &g).unwrap();
        let u = CVector::from_vec(vec![c(1.0), c(1.0)]);
        let f = specialize(&rep, &g, &u).unwrap();
        assert_eq!(f.value(&DiscPoint::ORIGIN), 0.0);
        let scaled = specialize(&rep, &g, &(&u * Complex64::new(-3.0, 2.0))).unwrap();
        let p = g.generator(5).apply(&DiscPoint::from_polar(0.4, 1.0).unwrap());
        assert!((f.value(&p) - scaled.value(&p)).abs() < 1e-12);
        // across side 1 the word is g_5 = g_1^{-1}, so A = ρ(g_1) stretches e1 by 2
        let e1 = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let f1 = specialize(&rep, &g, &e1).unwrap();
        assert!((f1.value(&p) - 2f64.ln()).abs() < 1e-12);

        let trivial = Representation::trivial(2, &g).unwrap();
        let t = specialize(&trivial, &g, &u).unwrap();
        assert_eq!(t.value(&p), 0.0);
        assert!(specialize(&rep, &g, &CVector::zeros(2)).is_err());
    }

    #[test]
    fn regularity_of_simple_fields() {
        let s = RngStream::new(3, 0);
        let zero = estimate_regularity(&crate::diffusion::Constant(1.0), 500, 4.0, &s).unwrap();
        assert_eq!(zero, RegularityFit { alpha: 0.0, c: 0.0, lipschitz_c: 0.0 });
        let d = estimate_regularity(&Distance, 4000, 4.0, &s).unwrap();
        assert!(d.lipschitz_c <= 1.05 && d.lipschitz_c > 0.8, "{d:?}");
    }
}
