//! Named validation suites behind `validate` and `method = "validate:<name>"`.

use std::f64::consts::TAU;

use hypcocycle::cocycle::{estimate_regularity, evaluate, specialize, CVector, Representation};
use hypcocycle::diffusion::{
    check_circle_vs_diffusion, check_dynkin, check_semigroup, heat_kernel_mass, sample_path, Constant, DynkinOptions,
    ExpDecay, FnField, LeafPath, RealPart, ScalarField, SmoothDistance,
};
use hypcocycle::lyapunov::{
    benettin_spectrum, brownian_norm_rate, check_exp_conversion, direction_distribution_check, geodesic_average,
    shadowing_report, BenettinOptions, RateKind,
};
use hypcocycle::rng::McEstimate;
use hypcocycle::surface::FuchsianGroup;
use hypcocycle::{dist_p, r_for_radius, radius_for_r, DiscPoint, GeodesicRay, MobiusMap, RngStream};
use num_complex::Complex64;
use rand::Rng;

use crate::error::CliResult;

pub const SUITES: [&str; 11] = [
    "geometry",
    "cocycle",
    "heat-kernel",
    "semigroup",
    "dynkin",
    "circle",
    "drift",
    "uniformity",
    "spectrum",
    "regularity",
    "conversion",
];

/// One pass/fail line.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Sizes for a suite; unset values fall back to the suite's own defaults.
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub n_paths: Option<usize>,
    pub step: Option<f64>,
    pub horizon: Option<f64>,
    pub seed: u64,
}

pub struct SuiteContext<'a> {
    pub group: &'a FuchsianGroup,
    pub rep: &'a Representation,
    pub options: SuiteOptions,
}

impl SuiteContext<'_> {
    fn n(&self, default: usize) -> usize {
        self.options.n_paths.unwrap_or(default)
    }

    fn step(&self, default: f64) -> f64 {
        self.options.step.unwrap_or(default)
    }

    fn rng(&self, index: u64) -> RngStream {
        RngStream::new(self.options.seed, index)
    }
}

pub fn run_suite(name: &str, ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    match name {
        "geometry" => Ok(geometry(ctx)),
        "cocycle" => cocycle(ctx),
        "heat-kernel" => heat_kernel(),
        "semigroup" => semigroup(ctx),
        "dynkin" => dynkin(ctx),
        "circle" => circle(ctx),
        "drift" => drift(ctx),
        "uniformity" => uniformity(ctx),
        "spectrum" => spectrum(ctx),
        "regularity" => regularity(ctx),
        "conversion" => conversion(ctx),
        other => Err(crate::error::CliError::Usage(format!(
            "unknown validation suite `{other}` (known: {})",
            SUITES.join(", ")
        ))),
    }
}

fn geometry(ctx: &SuiteContext) -> Vec<Check> {
    let mut rng = ctx.rng(0).rng();
    let point = |rng: &mut dyn rand::RngCore| DiscPoint::from_polar(5.0 * rng.random::<f64>(), TAU * rng.random::<f64>()).expect("finite radius");
    let mut iso = 0.0_f64;
    for _ in 0..1000 {
        let t = MobiusMap::translation(rng.random(), 4.0 * rng.random::<f64>()).compose(&MobiusMap::rotation(TAU * rng.random::<f64>()));
        let (p, q) = (point(&mut rng), point(&mut rng));
        iso = iso.max((dist_p(&t.apply(&p), &t.apply(&q)) - dist_p(&p, &q)).abs());
    }
    let mut speed = 0.0_f64;
    for _ in 0..200 {
        let ray = GeodesicRay::new(point(&mut rng), rng.random::<f64>()).expect("direction in [0, 1)");
        let (a, b) = (10.0 * rng.random::<f64>(), 10.0 * rng.random::<f64>());
        let d = dist_p(&ray.eval(a).expect("finite"), &ray.eval(b).expect("finite"));
        speed = speed.max((d - (a - b).abs()).abs());
    }
    let mut round = 0.0_f64;
    for r in (0..10).map(|k| k as f64 / 10.0).chain([0.99]) {
        let back = radius_for_r(r_for_radius(r).expect("r < 1")).expect("finite R");
        round = round.max((back - r).abs());
    }
    let relator = ctx.group.relator_residual();
    vec![
        Check::new("isometry", iso <= 1e-10, format!("max distance change {iso:.2e} <= 1e-10")),
        Check::new("ray unit speed", speed <= 1e-10, format!("max error {speed:.2e} <= 1e-10")),
        Check::new("r <-> R round trip", round <= 1e-12, format!("max error {round:.2e} <= 1e-12")),
        Check::new("octagon relator", relator <= 1e-8, format!("residual {relator:.2e} <= 1e-8")),
    ]
}

fn rel_err(a: &hypcocycle::cocycle::CMatrix, b: &hypcocycle::cocycle::CMatrix) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn cocycle(ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    let (g, rep) = (ctx.group, ctx.rep);
    let n = ctx.n(100);
    let (mut identity, mut split, mut homotopy) = (0.0_f64, 0.0_f64, 0.0_f64);
    let root = ctx.rng(1);
    for i in 0..n as u64 {
        let raw = sample_path(DiscPoint::ORIGIN, 2.0, ctx.step(0.01), &root.child(i))?;
        let path = raw.refined(0.05);
        let (head, tail) = path.split_at(path.len() / 2);
        let full = evaluate(rep, &path, g)?.to_matrix();
        let id = hypcocycle::cocycle::CMatrix::identity(rep.dim(), rep.dim());
        identity = identity.max(rel_err(&evaluate(rep, &LeafPath::constant(path.end(), path.step()), g)?.to_matrix(), &id));
        split = split.max(rel_err(&full, &(evaluate(rep, &tail, g)?.to_matrix() * evaluate(rep, &head, g)?.to_matrix())));
        homotopy = homotopy.max(rel_err(&full, &evaluate(rep, &raw.refined(0.02), g)?.to_matrix()));
    }
    Ok(vec![
        Check::new("identity", identity <= 1e-10, format!("max rel err {identity:.2e} over {n} paths")),
        Check::new("split path", split <= 1e-10, format!("max rel err {split:.2e} over {n} paths")),
        Check::new("re-discretization", homotopy <= 1e-10, format!("max rel err {homotopy:.2e} over {n} paths")),
    ])
}

fn heat_kernel() -> CliResult<Vec<Check>> {
    [0.25, 1.0, 4.0]
        .into_iter()
        .map(|t| {
            let m = heat_kernel_mass(t)?;
            Ok(Check::new(format!("kernel mass t={t}"), (0.999..=1.001).contains(&m), format!("{m:.8} in [0.999, 1.001]")))
        })
        .collect()
}

fn semigroup(ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    let fields: [(&str, &dyn ScalarField, f64); 3] =
        [("constant", &Constant(1.0), 0.5), ("exp(-d)", &ExpDecay, 0.5), ("Re z", &RealPart, 1.0)];
    fields
        .into_iter()
        .enumerate()
        .map(|(k, (name, f, t))| {
            let r = check_semigroup(f, t, t, ctx.n(4000), ctx.step(0.01), &ctx.rng(10 + k as u64))?;
            Ok(Check::new(
                format!("semigroup {name} t=s={t}"),
                r.passed,
                format!("direct {:+.5} nested {:+.5} combined se {:.5}", r.direct.mean, r.nested.mean, r.combined_se),
            ))
        })
        .collect()
}

fn dynkin(ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    let squared = FnField::new(|p: &DiscPoint| p.rho() * p.rho());
    let fields: [(&str, &dyn ScalarField); 3] = [("constant", &Constant(2.0)), ("Re z", &RealPart), ("d^2 (stencil)", &squared)];
    let opts = DynkinOptions {
        grid: 8,
        allow_fd: true,
        step: ctx.step(0.005),
    };
    fields
        .into_iter()
        .enumerate()
        .map(|(k, (name, f))| {
            let r = check_dynkin(f, 1.0, ctx.n(20000), opts, &ctx.rng(20 + k as u64))?;
            Ok(Check::new(
                format!("dynkin {name} t=1"),
                r.passed,
                format!("lhs {:+.5} rhs {:+.5} tolerance {:.5}", r.lhs.mean, r.rhs.mean, r.tolerance),
            ))
        })
        .collect()
}

fn circle(ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    let radii = [4.0, 8.0, 16.0, 32.0];
    let c = check_circle_vs_diffusion(&Constant(1.5), &radii, 100, ctx.step(0.05), &ctx.rng(30))?;
    let r = check_circle_vs_diffusion(&SmoothDistance, &radii, ctx.n(4000), ctx.step(0.01), &ctx.rng(31))?;
    let slope = r.slope.unwrap_or(f64::INFINITY);
    let errs: Vec<String> = r.rows.iter().map(|row| format!("{:.3}", row.error)).collect();
    Ok(vec![
        Check::new("circle constant", c.rows.iter().all(|row| row.error == 0.0), "all errors exactly 0"),
        Check::new(
            "circle smoothed distance",
            slope <= 0.75,
            format!("errors [{}] at R = 4, 8, 16, 32; slope {slope:.4} <= 0.75", errs.join(", ")),
        ),
    ])
}

fn drift(ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    let r = shadowing_report(ctx.n(10_000), &[20.0, 40.0, 80.0], ctx.step(0.01), &ctx.rng(40))?;
    let at_40 = r.rows.iter().find(|row| row.t == 40.0).expect("t = 40 requested");
    let shadow = r.shadow_slope.unwrap_or(f64::INFINITY);
    let drift = r.drift_slope.unwrap_or(f64::INFINITY);
    Ok(vec![
        Check::new(
            "drift ratio t=40",
            (0.92..=1.08).contains(&at_40.drift_ratio_median),
            format!("median d/t {:.4} in [0.92, 1.08]", at_40.drift_ratio_median),
        ),
        Check::new("shadowing growth", shadow <= 0.1, format!("log-log slope of q95 {shadow:.4} <= 0.1")),
        Check::new("drift deviation growth", drift <= 0.1, format!("log-log slope of q95 {drift:.4} <= 0.1")),
    ])
}

fn uniformity(ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    let t = ctx.options.horizon.unwrap_or(40.0);
    let r = direction_distribution_check(ctx.n(10_000), t, ctx.step(0.01), 32, 0.0, &ctx.rng(50))?;
    Ok(vec![Check::new(
        format!("direction uniformity t={t}"),
        r.passed,
        format!("chi2 {:.2} on 31 dof, p {:.4} > 0.001", r.statistic, r.p_value),
    )])
}

fn agree(a: &McEstimate, b: &McEstimate) -> bool {
    (a.mean - b.mean).abs() <= (3.0 * a.combined_se(b)).max(0.05 * a.mean.abs().max(b.mean.abs()))
}

fn spectrum(ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    let (g, rep) = (ctx.group, ctx.rep);
    let horizon = ctx.options.horizon.unwrap_or(60.0);
    let n = ctx.n(2000);
    let step = ctx.step(0.02);
    let b = benettin_spectrum(
        rep,
        g,
        BenettinOptions {
            t_max: horizon,
            step,
            reorth_every: 10.min((1.0 / step) as usize).max(1),
            n_paths: n,
        },
        &ctx.rng(60),
    )?;
    let geo = geodesic_average(rep, g, horizon, 256, &RateKind::Norm)?;
    let norm = brownian_norm_rate(rep, g, horizon, n, step, &ctx.rng(61))?;
    let top = b.raw[0];
    let show = |e: &McEstimate| format!("{:.5}±{:.5}", e.mean, e.ci_halfwidth());
    let mut checks = vec![
        Check::new("benettin vs geodesic", agree(&top, &geo), format!("{} vs {}", show(&top), show(&geo))),
        Check::new("benettin vs brownian norm", agree(&top, &norm), format!("{} vs {}", show(&top), show(&norm))),
        Check::new("geodesic vs brownian norm", agree(&geo, &norm), format!("{} vs {}", show(&geo), show(&norm))),
    ];
    // with |det| = 1 on every generator the exponents must sum to zero
    if (1..=4).all(|l| rep.letter_log_abs_det(l).abs() < 1e-12) {
        checks.push(Check::new(
            "exponent sum",
            b.exponent_sum.mean.abs() <= b.sum_halfwidth(),
            format!("{:.3e} within {:.3e} of 0", b.exponent_sum.mean, b.sum_halfwidth()),
        ));
    }
    Ok(checks)
}

fn regularity(ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    let u = first_axis(ctx.rep.dim());
    let f = specialize(ctx.rep, ctx.group, &u)?;
    let fits = (0..5u64)
        .map(|k| Ok(estimate_regularity(&f, ctx.n(20_000), 4.0, &RngStream::new(ctx.options.seed.wrapping_add(k), 70))?.lipschitz_c))
        .collect::<CliResult<Vec<f64>>>()?;
    let mean = fits.iter().sum::<f64>() / fits.len() as f64;
    let stable = mean.is_finite() && fits.iter().all(|l| l.is_finite() && (l - mean).abs() <= 0.2 * mean.abs());
    let shown: Vec<String> = fits.iter().map(|l| format!("{l:.4}")).collect();
    Ok(vec![Check::new(
        "lipschitz constant across 5 seeds",
        stable,
        format!("[{}] within 20% of {mean:.4}", shown.join(", ")),
    )])
}

fn first_axis(d: usize) -> CVector {
    CVector::from_fn(d, |i, _| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0))
}

fn conversion(ctx: &SuiteContext) -> CliResult<Vec<Check>> {
    let eta = ctx.group.generator(1).origin_image();
    let t = ctx.options.horizon.unwrap_or(5.0);
    let r = check_exp_conversion(ctx.rep, ctx.group, &first_axis(ctx.rep.dim()), eta, t, ctx.n(4000), ctx.step(0.02), &ctx.rng(80))?;
    Ok(vec![Check::new(
        format!("change of base point t={t}"),
        r.passed,
        format!("lhs {:+.5} rhs {:+.5}", r.lhs.mean, r.rhs.mean),
    )])
}
