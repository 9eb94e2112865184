//! Experiment configuration: a small TOML file with `[experiment]` and
//! `[representation]` sections, strict about unknown keys.
//!
//! ```toml
//! [experiment]
//! method = "brownian"
//! horizon = 60
//! step = 0.02
//! n_paths = 2000
//!
//! [representation]
//! dim = 2
//! field = "real"
//! g1 = "2 0 0 0.5"
//! g2 = "1 0 0 1"
//! g3 = "1 0 0 1"
//! g4 = "1 0 0 1"
//! ```

use std::path::{Path, PathBuf};

use hypcocycle::cocycle::{CMatrix, Field, Representation};
use hypcocycle::surface::FuchsianGroup;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, CliResult};

/// Environment variable that overrides the seed.
pub const SEED_ENV: &str = "HYPCOCYCLE_SEED";

pub const SURFACE: &str = "genus2-octagon";

/// `[experiment]` as written: every key optional.
#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentKeys {
    pub surface: Option<String>,
    pub method: Option<String>,
    pub horizon: Option<f64>,
    pub step: Option<f64>,
    pub n_paths: Option<usize>,
    pub n_dirs: Option<usize>,
    pub n_vectors: Option<usize>,
    pub reorth_every: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RepresentationKeys {
    /// `trivial`, `uniformizing` or `diagonal` (with `diagonal` entries).
    pub preset: Option<String>,
    pub dim: Option<usize>,
    pub field: Option<String>,
    pub diagonal: Option<String>,
    pub g1: Option<String>,
    pub g2: Option<String>,
    pub g3: Option<String>,
    pub g4: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub experiment: ExperimentKeys,
    #[serde(default)]
    pub representation: RepresentationKeys,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

macro_rules! merge_keys {
    ($file:expr, $flags:expr, $($key:ident),+) => {
        $(
            if $flags.$key.is_some() {
                if $file.$key.is_some() {
                    return Err(CliError::Config(format!(
                        "`{}` is set both in the config file and on the command line",
                        stringify!($key)
                    )));
                }
                $file.$key = $flags.$key.clone();
            }
        )+
    };
}

/// Folds command-line values into the file's keys; a key given twice is an error.
pub fn merge_flags(mut file: ExperimentKeys, flags: &ExperimentKeys) -> CliResult<ExperimentKeys> {
    merge_keys!(file, flags, surface, method, horizon, step, n_paths, n_dirs, n_vectors, reorth_every, seed, workers, output);
    Ok(file)
}

/// What to run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum Task {
    Spectrum(hypcocycle::lyapunov::Method),
    Validate(String),
}

impl From<Task> for String {
    fn from(t: Task) -> String {
        match t {
            Task::Spectrum(m) => m.name().to_string(),
            Task::Validate(name) => format!("validate:{name}"),
        }
    }
}

impl Task {
    pub fn parse(s: &str) -> CliResult<Self> {
        if let Some(name) = s.strip_prefix("validate:") {
            if !crate::suites::SUITES.contains(&name) {
                return Err(CliError::Config(format!(
                    "method: unknown validation suite `{name}` (known: {})",
                    crate::suites::SUITES.join(", ")
                )));
            }
            return Ok(Task::Validate(name.to_string()));
        }
        hypcocycle::lyapunov::Method::parse(s).map(Task::Spectrum).ok_or_else(|| {
            CliError::Config(format!(
                "method: expected brownian, geodesic, diffusion or validate:<suite>, got `{s}`"
            ))
        })
    }
}

/// Where the seed came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedSource {
    Default,
    Config,
    Environment,
}

/// Fully resolved `[experiment]`, as recorded in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub surface: String,
    pub method: Task,
    pub horizon: f64,
    pub step: f64,
    pub n_paths: usize,
    pub n_dirs: usize,
    pub n_vectors: usize,
    pub reorth_every: usize,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub workers: usize,
    pub output: PathBuf,
}

pub const DEFAULT_HORIZON: f64 = 60.0;
pub const DEFAULT_STEP: f64 = 0.02;
pub const DEFAULT_N_PATHS: usize = 2000;
pub const DEFAULT_N_DIRS: usize = 256;
pub const DEFAULT_N_VECTORS: usize = 64;
pub const DEFAULT_OUTPUT: &str = "hypcocycle-out";

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name}: must be a finite positive number, got {v}")))
    }
}

fn nonzero(name: &str, v: usize) -> CliResult<usize> {
    if v > 0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name}: must be positive")))
    }
}

impl ExperimentConfig {
    /// Applies defaults and checks ranges. `env_seed` is the raw value of [`SEED_ENV`], if set.
    pub fn resolve(keys: &ExperimentKeys, env_seed: Option<&str>) -> CliResult<Self> {
        let surface = keys.surface.clone().unwrap_or_else(|| SURFACE.to_string());
        if surface != SURFACE {
            return Err(CliError::Config(format!("surface: only `{SURFACE}` is supported, got `{surface}`")));
        }
        let method = Task::parse(keys.method.as_deref().unwrap_or("brownian"))?;
        let step = positive("step", keys.step.unwrap_or(DEFAULT_STEP))?;
        if step > hypcocycle::diffusion::MAX_STEP {
            return Err(CliError::Config(format!(
                "step: must be <= {}, got {step}",
                hypcocycle::diffusion::MAX_STEP
            )));
        }
        let horizon = positive("horizon", keys.horizon.unwrap_or(DEFAULT_HORIZON))?;
        if matches!(method, Task::Spectrum(m) if m != hypcocycle::lyapunov::Method::Geodesic) && horizon < 1.0 {
            return Err(CliError::Config(format!("horizon: must be >= 1, got {horizon}")));
        }
        let reorth_every = nonzero("reorth_every", keys.reorth_every.unwrap_or_else(|| 10.min((1.0 / step) as usize).max(1)))?;
        if reorth_every as f64 * step > 1.0 + 1e-12 {
            return Err(CliError::Config(format!(
                "reorth_every: reorth_every * step must be <= 1, got {reorth_every} * {step}"
            )));
        }
        let (seed, seed_source) = match env_seed {
            Some(raw) => (
                raw.trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("{SEED_ENV}: not an unsigned integer: `{raw}`")))?,
                SeedSource::Environment,
            ),
            None => match keys.seed {
                Some(s) => (s, SeedSource::Config),
                None => (0, SeedSource::Default),
            },
        };
        let workers = match keys.workers {
            Some(w) => nonzero("workers", w)?,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        let n_dirs = nonzero("n_dirs", keys.n_dirs.unwrap_or(DEFAULT_N_DIRS))?;
        let n_vectors = nonzero("n_vectors", keys.n_vectors.unwrap_or(DEFAULT_N_VECTORS))?;
        Ok(Self {
            surface,
            method,
            horizon,
            step,
            n_paths: nonzero("n_paths", keys.n_paths.unwrap_or(DEFAULT_N_PATHS))?,
            n_dirs,
            n_vectors,
            reorth_every,
            seed,
            seed_source,
            workers,
            output: keys.output.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
        })
    }
}

fn parse_entries(key: &str, text: &str, field: Field) -> CliResult<Vec<Complex64>> {
    text.split_whitespace()
        .map(|tok| {
            let z: Complex64 = tok
                .parse()
                .map_err(|_| CliError::Config(format!("representation.{key}: cannot parse entry `{tok}`")))?;
            if field == Field::Real && z.im != 0.0 {
                return Err(CliError::Config(format!(
                    "representation.{key}: complex entry `{tok}` in a real representation"
                )));
            }
            Ok(z)
        })
        .collect()
}

/// Builds and checks the representation described by `[representation]`.
/// With no keys at all the default is `diag(2, 1/2)` on the first generator.
pub fn build_representation(keys: &RepresentationKeys, group: &FuchsianGroup) -> CliResult<Representation> {
    let explicit = [&keys.g1, &keys.g2, &keys.g3, &keys.g4];
    let named = |e: hypcocycle::Error| CliError::Config(format!("representation: {e}"));
    let preset = match (&keys.preset, explicit.iter().any(|g| g.is_some())) {
        (Some(_), true) => {
            return Err(CliError::Config("representation: give either `preset` or g1..g4, not both".into()));
        }
        (Some(p), false) => Some(p.as_str()),
        (None, false) => Some("diagonal"),
        (None, true) => None,
    };
    let rep = match preset {
        Some("trivial") => Representation::trivial(keys.dim.unwrap_or(2), group).map_err(named)?,
        Some("uniformizing") => {
            if keys.dim.is_some_and(|d| d != 2) {
                return Err(CliError::Config("representation.dim: the uniformizing representation has dim 2".into()));
            }
            Representation::uniformizing(group).map_err(named)?
        }
        Some("diagonal") => {
            let entries = match &keys.diagonal {
                Some(text) => parse_entries("diagonal", text, Field::Real)?.iter().map(|z| z.re).collect(),
                None => vec![2.0, 0.5],
            };
            if keys.dim.is_some_and(|d| d != entries.len()) {
                return Err(CliError::Config(format!(
                    "representation.dim: {} does not match {} diagonal entries",
                    keys.dim.unwrap(),
                    entries.len()
                )));
            }
            Representation::diagonal_on_first(&entries, group).map_err(named)?
        }
        Some(other) => {
            return Err(CliError::Config(format!(
                "representation.preset: expected trivial, uniformizing or diagonal, got `{other}`"
            )))
        }
        None => {
            let dim = keys
                .dim
                .ok_or_else(|| CliError::Config("representation.dim: required with explicit matrices".into()))?;
            let field = match keys.field.as_deref().unwrap_or("real") {
                "real" => Field::Real,
                "complex" => Field::Complex,
                other => {
                    return Err(CliError::Config(format!(
                        "representation.field: expected real or complex, got `{other}`"
                    )))
                }
            };
            let mut images = Vec::with_capacity(4);
            for (k, g) in explicit.iter().enumerate() {
                let key = format!("g{}", k + 1);
                let text = g
                    .as_ref()
                    .ok_or_else(|| CliError::Config(format!("representation.{key}: missing")))?;
                let entries = parse_entries(&key, text, field)?;
                if entries.len() != dim * dim {
                    return Err(CliError::Config(format!(
                        "representation.{key}: expected {} entries for dim {dim}, got {}",
                        dim * dim,
                        entries.len()
                    )));
                }
                images.push(CMatrix::from_row_slice(dim, dim, &entries));
            }
            Representation::new(field, images, group).map_err(named)?
        }
    };
    if !rep.is_exact() {
        return Err(CliError::Config(format!(
            "representation: relator residual {:.3e} exceeds {:e}; g1..g4 must satisfy the surface relation",
            rep.relator_residual(),
            hypcocycle::cocycle::RELATOR_TOL
        )));
    }
    Ok(rep)
}
