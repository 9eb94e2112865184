use std::f64::consts::TAU;

use hypcocycle::cocycle::{cocycle_of_word, specialize, specialize_at, CVector, Representation};
use hypcocycle::diffusion::{heat_kernel, sample_path, ScalarField};
use hypcocycle::surface::{build_genus2, DeckWord, FuchsianGroup};
use hypcocycle::{dist_p, DiscPoint, MobiusMap, RngStream};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn group() -> &'static FuchsianGroup {
    static G: OnceLock<FuchsianGroup> = OnceLock::new();
    G.get_or_init(|| build_genus2().unwrap())
}

fn letters() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(prop_oneof![1..=4i32, -4..=-1i32], 0..12)
}

fn point(max_rho: f64) -> impl Strategy<Value = DiscPoint> {
    (0.0..max_rho, 0.0..TAU).prop_map(|(r, p)| DiscPoint::from_polar(r, p).unwrap())
}

// Relative distance between coefficient pairs, which are defined up to a common sign.
fn same_coefficients(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> f64 {
    let plus = (a.0 - b.0).norm() + (a.1 - b.1).norm();
    let minus = (a.0 + b.0).norm() + (a.1 + b.1).norm();
    plus.min(minus) / a.0.norm()
}

fn same_map(a: &MobiusMap, b: &MobiusMap) -> f64 {
    same_coefficients((a.a(), a.b()), (b.a(), b.b()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_times_inverse_is_empty(w in letters()) {
        let w = DeckWord::new(&w).unwrap();
        prop_assert!(w.concat(&w.inverse()).is_empty());
        prop_assert!(w.inverse().concat(&w).is_empty());
    }

    #[test]
    fn uniformizing_products_follow_composition(w in letters()) {
        let g = group();
        let rep = Representation::uniformizing(g).unwrap();
        let w = DeckWord::new(&w).unwrap();
        let m = cocycle_of_word(&rep, &w).unwrap().to_matrix();
        let e = w.eval(g);
        prop_assert!(same_coefficients((m[(0, 0)], m[(0, 1)]), (e.a(), e.b())) < 1e-10);
    }

    #[test]
    fn locate_lands_in_the_domain(p in point(7.0)) {
        let g = group();
        let (rep, word) = g.locate(&p).unwrap();
        prop_assert!(g.contains(&rep, 1e-9));
        prop_assert!(dist_p(&word.eval(g).apply(&rep), &p) < 1e-8 * p.rho().cosh());
    }

    #[test]
    fn deck_images_share_a_representative(p in point(1.0), w in prop::collection::vec(prop_oneof![1..=4i32, -4..=-1i32], 0..4)) {
        let g = group();
        let q = DeckWord::new(&w).unwrap().eval(g).apply(&p);
        let (rp, _) = g.locate(&p).unwrap();
        let (rq, _) = g.locate(&q).unwrap();
        prop_assert!(dist_p(&rp, &rq) < 1e-6);
    }

    #[test]
    fn specialization_is_projective(re in -2.0..2.0f64, im in -2.0..2.0f64, scale in 0.01..100.0f64, z in point(4.0)) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let g = group();
        let rep = Representation::uniformizing(g).unwrap();
        let u = CVector::from_vec(vec![Complex64::new(re, im), Complex64::new(1.0, 0.0)]);
        let scaled = &u * Complex64::new(0.0, scale);
        let f = specialize(&rep, g, &u).unwrap();
        let h = specialize(&rep, g, &scaled).unwrap();
        prop_assert!((f.value(&z) - h.value(&z)).abs() < 1e-12);
        prop_assert_eq!(f.value(&DiscPoint::ORIGIN), 0.0);
    }

    #[test]
    fn change_of_base(z in point(4.0)) {
        let g = group();
        let rep = Representation::diagonal_on_first(&[2.0, 0.5], g).unwrap();
        let u = CVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]);
        let f = specialize(&rep, g, &u).unwrap();
        let eta = g.generator(1).origin_image();
        let v = f.cocycle_to(&eta).unwrap().to_matrix() * &u;
        let h = specialize_at(&rep, g, eta, &v).unwrap();
        prop_assert!((h.value(&z) - (f.value(&z) - f.value(&eta))).abs() < 1e-10);
    }

    #[test]
    fn heat_kernel_decreases_in_distance(t in 0.1..5.0f64, r in 0.0..6.0f64, dr in 0.01..2.0f64) {
        let near = heat_kernel(r, t).unwrap();
        let far = heat_kernel(r + dr, t).unwrap();
        prop_assert!(near > 0.0 && far > 0.0 && far < near);
    }

    #[test]
    fn tracking_concatenates(seed in 0u64..1000) {
        let g = group();
        let path = sample_path(DiscPoint::ORIGIN, 1.0, 0.01, &RngStream::new(seed, 3)).unwrap().refined(0.05);
        let (head, tail) = path.split_at(path.len() / 3);
        let whole = g.track(&path).unwrap().eval(g);
        let parts = g.track(&head).unwrap().concat(&g.track(&tail).unwrap()).eval(g);
        prop_assert!(same_map(&whole, &parts) < 1e-8);
    }
}
