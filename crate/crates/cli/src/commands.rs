//! The four subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hypcocycle::cocycle::Representation;
use hypcocycle::lyapunov::{benettin_spectrum, diffusion_spectrum, geodesic_spectrum, BenettinOptions, Method, SpectrumReport};
use hypcocycle::surface::{build_genus2, FuchsianGroup};
use hypcocycle::RngStream;

use crate::config::{build_representation, merge_flags, ConfigFile, ExperimentConfig, ExperimentKeys, SeedSource, Task};
use crate::error::{CliError, CliResult};
use crate::report::{expand, read_rows, rows_to_csv, spectrum_rows, write_file, write_manifest};
use crate::suites::{run_suite, Check, SuiteContext, SuiteOptions};

/// Exit status of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    ValidationFailed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::ValidationFailed => 2,
        }
    }

    fn from_checks(checks: &[Check]) -> Self {
        if checks.iter().all(|c| c.passed) {
            Status::Success
        } else {
            Status::ValidationFailed
        }
    }
}

fn pool(workers: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))
}

struct Setup {
    keys: ExperimentKeys,
    config: ExperimentConfig,
    group: FuchsianGroup,
    rep: Representation,
}

fn setup(file: ConfigFile, flags: &ExperimentKeys, env_seed: Option<&str>) -> CliResult<Setup> {
    let keys = merge_flags(file.experiment, flags)?;
    let config = ExperimentConfig::resolve(&keys, env_seed)?;
    let group = build_genus2()?;
    let rep = build_representation(&file.representation, &group)?;
    Ok(Setup {
        keys,
        config,
        group,
        rep,
    })
}

fn suite_options(keys: &ExperimentKeys, config: &ExperimentConfig) -> SuiteOptions {
    SuiteOptions {
        n_paths: keys.n_paths,
        step: keys.step,
        horizon: keys.horizon,
        seed: config.seed,
    }
}

fn compute_spectrum(method: Method, s: &Setup) -> CliResult<SpectrumReport> {
    let c = &s.config;
    let rng = RngStream::new(c.seed, 0);
    Ok(match method {
        Method::Brownian => benettin_spectrum(
            &s.rep,
            &s.group,
            BenettinOptions {
                t_max: c.horizon,
                step: c.step,
                reorth_every: c.reorth_every,
                n_paths: c.n_paths,
            },
            &rng,
        )?,
        Method::Geodesic => geodesic_spectrum(&s.rep, &s.group, c.horizon, c.n_dirs)?,
        Method::Diffusion => diffusion_spectrum(&s.rep, &s.group, c.horizon, c.n_paths, c.step, &rng)?,
    })
}

fn seed_note(source: &SeedSource) -> &'static str {
    match source {
        SeedSource::Default => "default",
        SeedSource::Config => "config",
        SeedSource::Environment => "environment",
    }
}

fn header(s: &Setup) -> String {
    let c = &s.config;
    format!(
        "method {}, horizon {}, seed {} ({}), workers {}\nrepresentation: dim {}, {}, relator residual {:.2e}\n",
        String::from(c.method.clone()),
        c.horizon,
        c.seed,
        seed_note(&c.seed_source),
        c.workers,
        s.rep.dim(),
        s.rep.field().name(),
        s.rep.relator_residual()
    )
}

fn spectrum_summary(s: &Setup, report: &SpectrumReport, elapsed: f64) -> String {
    let mut out = header(s);
    out.push_str("exponents:\n");
    for k in 0..report.exponents.len() {
        let _ = writeln!(
            out,
            "  chi_{} = {:+.6} ± {:.6} (multiplicity {})",
            k + 1,
            report.exponents[k],
            report.ci_halfwidths[k],
            report.multiplicities[k]
        );
    }
    let _ = writeln!(
        out,
        "exponent sum {:+.3e} ± {:.3e}\nsamples {}, step {}, elapsed {elapsed:.1} s",
        report.exponent_sum.mean,
        report.sum_halfwidth(),
        report.provenance.n_samples,
        report.provenance.step
    );
    out
}

fn check_lines(checks: &[Check]) -> String {
    checks.iter().map(|c| c.line() + "\n").collect()
}

/// `run`: computes what the config asks for and writes manifest, results and summary
/// into the output directory.
pub fn run(config_path: &Path, flags: &ExperimentKeys, env_seed: Option<&str>) -> CliResult<Status> {
    let s = setup(ConfigFile::load(config_path)?, flags, env_seed)?;
    let dir = s.config.output.clone();
    let start = Instant::now();
    let (status, summary, result_file, body) = pool(s.config.workers)?.install(|| -> CliResult<_> {
        match &s.config.method {
            Task::Spectrum(m) => {
                let report = compute_spectrum(*m, &s)?;
                let csv = rows_to_csv(&spectrum_rows(&report, s.config.seed));
                let summary = spectrum_summary(&s, &report, start.elapsed().as_secs_f64());
                Ok((Status::Success, summary, "spectrum.csv", csv))
            }
            Task::Validate(name) => {
                let ctx = SuiteContext {
                    group: &s.group,
                    rep: &s.rep,
                    options: suite_options(&s.keys, &s.config),
                };
                let checks = run_suite(name, &ctx)?;
                let lines = check_lines(&checks);
                let status = Status::from_checks(&checks);
                let summary = format!(
                    "{}{lines}suite {name}: {}\n",
                    header(&s),
                    if status == Status::Success { "passed" } else { "FAILED" }
                );
                Ok((status, summary, "validation.txt", lines))
            }
        }
    })?;
    write_file(&dir.join(result_file), &body)?;
    write_file(&dir.join("summary.txt"), &summary)?;
    write_manifest(
        &dir,
        &s.config,
        s.rep.relator_residual(),
        s.rep.dim(),
        s.rep.field().name(),
        start.elapsed().as_secs_f64(),
    )?;
    print!("{summary}");
    println!("wrote {}", dir.display());
    Ok(status)
}

/// `validate`: runs one suite and prints a line per check.
pub fn validate(suite: &str, config_path: Option<&PathBuf>, flags: &ExperimentKeys, env_seed: Option<&str>) -> CliResult<Status> {
    let file = match config_path {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let flags = ExperimentKeys {
        method: Some(format!("validate:{suite}")),
        ..flags.clone()
    };
    if file.experiment.method.is_some() {
        return Err(CliError::Config("method: not allowed in the config for `validate`; the suite is the argument".into()));
    }
    let s = setup(file, &flags, env_seed)?;
    let ctx = SuiteContext {
        group: &s.group,
        rep: &s.rep,
        options: suite_options(&s.keys, &s.config),
    };
    let checks = pool(s.config.workers)?.install(|| run_suite(suite, &ctx))?;
    print!("{}", check_lines(&checks));
    Ok(Status::from_checks(&checks))
}

/// Tolerance rule of `compare`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub sigmas: f64,
    pub relative: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            sigmas: 3.0,
            relative: 0.05,
        }
    }
}

/// Index-by-index agreement: within `sigmas` combined standard errors or
/// `relative` of the larger magnitude, whichever is looser.
pub fn compare_rows(a: &[(f64, f64)], b: &[(f64, f64)], tol: Tolerance) -> CliResult<Vec<Check>> {
    if a.len() != b.len() {
        return Err(CliError::Usage(format!("dimension mismatch: {} vs {} exponents", a.len(), b.len())));
    }
    Ok(a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&(x, sx), &(y, sy)))| {
            let allowed = (tol.sigmas * sx.hypot(sy)).max(tol.relative * x.abs().max(y.abs()));
            let diff = (x - y).abs();
            Check {
                name: format!("chi_{}", i + 1),
                passed: diff <= allowed,
                detail: format!("{x:+.6} vs {y:+.6}, |diff| {diff:.3e}, allowed {allowed:.3e}"),
            }
        })
        .collect())
}

/// `compare`: pairwise exponent agreement between two spectrum CSVs.
pub fn compare(a: &Path, b: &Path, tol: Tolerance) -> CliResult<Status> {
    let checks = compare_rows(&expand(&read_rows(a)?), &expand(&read_rows(b)?), tol)?;
    print!("{}", check_lines(&checks));
    Ok(Status::from_checks(&checks))
}

/// `dump-surface`: generator coefficients, to stdout or a file.
pub fn dump_surface(output: Option<&Path>) -> CliResult<Status> {
    let text = build_genus2()?.export();
    match output {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(Status::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_rule() {
        let tol = Tolerance::default();
        let a = [(1.0, 0.01), (-1.0, 0.01)];
        assert!(compare_rows(&a, &a, tol).unwrap().iter().all(|c| c.passed));
        // 3 sigma: 0.03 * sqrt 2 covers 0.04
        assert!(compare_rows(&a, &[(1.04, 0.01), (-1.0, 0.01)], tol).unwrap()[0].passed);
        // 5% relative covers 0.05 with no error bars
        assert!(compare_rows(&[(1.0, 0.0)], &[(1.05, 0.0)], tol).unwrap()[0].passed);
        assert!(!compare_rows(&[(1.0, 0.0)], &[(1.2, 0.0)], tol).unwrap()[0].passed);
        assert!(compare_rows(&a, &a[..1], tol).is_err());
    }
}
