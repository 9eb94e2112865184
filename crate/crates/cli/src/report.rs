//! Spectrum CSV files and the run manifest.

use std::io::Write;
use std::path::Path;

use hypcocycle::lyapunov::SpectrumReport;
use hypcocycle::rng::Z95;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{io_err, CliError, CliResult};

pub const CSV_HEADER: [&str; 8] = ["method", "horizon", "i", "chi_i", "multiplicity", "ci_halfwidth", "seed", "n_samples"];

/// One exponent cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub method: String,
    pub horizon: f64,
    pub i: usize,
    pub chi_i: f64,
    pub multiplicity: usize,
    pub ci_halfwidth: f64,
    pub seed: u64,
    pub n_samples: usize,
}

pub fn spectrum_rows(report: &SpectrumReport, seed: u64) -> Vec<SpectrumRow> {
    (0..report.exponents.len())
        .map(|k| SpectrumRow {
            method: report.method.name().to_string(),
            horizon: report.provenance.horizon,
            i: k + 1,
            chi_i: report.exponents[k],
            multiplicity: report.multiplicities[k],
            ci_halfwidth: report.ci_halfwidths[k],
            seed,
            n_samples: report.provenance.n_samples,
        })
        .collect()
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text with floats at 17 significant digits.
pub fn rows_to_csv(rows: &[SpectrumRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.method.clone(),
            float(r.horizon),
            r.i.to_string(),
            float(r.chi_i),
            r.multiplicity.to_string(),
            float(r.ci_halfwidth),
            r.seed.to_string(),
            r.n_samples.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn read_rows(path: &Path) -> CliResult<Vec<SpectrumRow>> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CliError::Usage(format!(
            "{}: expected header {}, got {}",
            path.display(),
            CSV_HEADER.join(","),
            header.join(",")
        )));
    }
    let rows = r.deserialize().collect::<Result<Vec<SpectrumRow>, _>>().map_err(csv_err)?;
    if rows.is_empty() {
        return Err(CliError::Usage(format!("{}: no exponent rows", path.display())));
    }
    Ok(rows)
}

/// Per-index exponents with their standard errors, clusters expanded by multiplicity.
pub fn expand(rows: &[SpectrumRow]) -> Vec<(f64, f64)> {
    rows.iter()
        .flat_map(|r| std::iter::repeat((r.chi_i, r.ci_halfwidth / Z95)).take(r.multiplicity))
        .collect()
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    timestamp_unix: u64,
    elapsed_seconds: f64,
    relator_residual: f64,
    representation_dim: usize,
    representation_field: &'static str,
    experiment: &'a ExperimentConfig,
}

pub fn write_manifest(
    dir: &Path,
    config: &ExperimentConfig,
    relator_residual: f64,
    dim: usize,
    field: &'static str,
    elapsed_seconds: f64,
) -> CliResult<()> {
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        elapsed_seconds,
        relator_residual,
        representation_dim: dim,
        representation_field: field,
        experiment: config,
    };
    let text = toml::to_string(&manifest).map_err(|e| CliError::Usage(format!("manifest: {e}")))?;
    write_file(&dir.join("manifest.toml"), &text)
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}
