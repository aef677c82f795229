//! Driver behind the `qws` binary: parse a circuit file, run it on one of
//! the three backends, and render the requested reports.

mod format;
mod parse;

use std::path::{Path, PathBuf};

use qws_core::dense::DenseState;
use qws_core::pathint::{self, hbar_report};
use qws_core::stabilizer::{mixed_representation_search, support_classification, StabilizerState};
use qws_core::weyl::wigner_pure;
use qws_core::{Dim, WignerTable};
use serde_json::json;
use thiserror::Error;

pub use format::{format_g12, wigner_csv};
pub use parse::{parse_circuit, CircuitFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("dimension {0} is not supported: d must be odd and at least 3")]
    BadDimension(u64),

    #[error("line {line}, column {column}: bad target: {message}")]
    BadTarget { line: usize, column: usize, message: String },

    #[error("the stabilizer backend cannot run `{gate}` (line {line}): it is an hbar^1 gate and needs the reflection backend")]
    BackendRefused { gate: String, line: usize },

    #[error("verification failed: {reference} and {backend} Wigner tables differ by {diff:.3e} (tolerance {tol:e})")]
    VerifyMismatch { backend: Backend, reference: Backend, diff: f64, tol: f64 },

    #[error(transparent)]
    Core(#[from] qws_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::BadDimension(_) | CliError::BadTarget { .. } => 2,
            CliError::VerifyMismatch { .. } => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Backend {
    Stabilizer,
    Dense,
    Reflection,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Stabilizer => "stabilizer",
            Backend::Dense => "dense",
            Backend::Reflection => "reflection",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Report {
    Wigner,
    Support,
    Hbar,
    Gaussian,
}

impl Report {
    pub fn name(self) -> &'static str {
        match self {
            Report::Wigner => "wigner",
            Report::Support => "support",
            Report::Hbar => "hbar",
            Report::Gaussian => "gaussian",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Report::Wigner => "csv",
            _ => "json",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub backend: Backend,
    pub reports: Vec<Report>,
    pub verify: bool,
    /// Bound on phase-space points and amplitudes any backend may enumerate.
    pub cap: u128,
    /// Verification tolerance on Wigner values.
    pub tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { backend: Backend::Stabilizer, reports: vec![Report::Wigner], verify: false, cap: qws_core::DEFAULT_ENUMERATION_CAP, tol: 1e-9 }
    }
}

/// Rendered report ready to be written out.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub report: Report,
    pub contents: String,
}

/// Summary of a `--verify` comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub backend: Backend,
    pub reference: Backend,
    pub max_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub emitted: Vec<Emitted>,
    pub verification: Option<Verification>,
}

/// State of the circuit as each backend sees it.
enum Simulated {
    Stabilizer(StabilizerState),
    Dense(DenseState),
}

fn check_cap(dim: Dim, cap: u128, phase_space: bool) -> Result<(), CliError> {
    let required = if phase_space { dim.phase_space_points() } else { (dim.d() as u128).saturating_pow(dim.n() as u32) };
    if required > cap {
        return Err(qws_core::Error::SizeLimitExceeded { required, cap }.into());
    }
    Ok(())
}

fn simulate(backend: Backend, circuit: &CircuitFile, cap: u128) -> Result<Simulated, CliError> {
    match backend {
        Backend::Stabilizer => {
            if let Some(pos) = circuit.gates.iter().position(|g| !g.kind.is_clifford()) {
                return Err(CliError::BackendRefused { gate: circuit.gates[pos].to_string(), line: circuit.lines[pos] });
            }
            Ok(Simulated::Stabilizer(StabilizerState::simulate(&circuit.gates, circuit.dim)?))
        }
        Backend::Dense => {
            check_cap(circuit.dim, cap, false)?;
            Ok(Simulated::Dense(DenseState::simulate(&circuit.gates, circuit.dim)?))
        }
        Backend::Reflection => {
            check_cap(circuit.dim, cap, false)?;
            Ok(Simulated::Dense(pathint::simulate(&circuit.gates, circuit.dim)?.0))
        }
    }
}

fn wigner_of(sim: &Simulated, cap: u128) -> Result<WignerTable, CliError> {
    let dim = match sim {
        Simulated::Stabilizer(s) => s.dim(),
        Simulated::Dense(psi) => psi.dim(),
    };
    check_cap(dim, cap, true)?;
    Ok(match sim {
        Simulated::Stabilizer(s) => s.wigner_table()?,
        Simulated::Dense(psi) => wigner_pure(psi)?,
    })
}

fn dense_of(sim: &Simulated, circuit: &CircuitFile, cap: u128) -> Result<DenseState, CliError> {
    match sim {
        Simulated::Dense(psi) => Ok(psi.clone()),
        Simulated::Stabilizer(_) => {
            check_cap(circuit.dim, cap, false)?;
            Ok(DenseState::simulate(&circuit.gates, circuit.dim)?)
        }
    }
}

fn render(report: Report, sim: &Simulated, circuit: &CircuitFile, config: &RunConfig) -> Result<String, CliError> {
    let dim = circuit.dim;
    let header = json!({ "backend": config.backend.to_string(), "d": dim.d(), "n": dim.n() });
    let merge = |mut base: serde_json::Value, extra: serde_json::Value| {
        if let (Some(b), Some(e)) = (base.as_object_mut(), extra.as_object()) {
            b.extend(e.clone());
        }
        base
    };
    let value = match report {
        Report::Wigner => return Ok(wigner_csv(&wigner_of(sim, config.cap)?)),
        Report::Hbar => merge(header, serde_json::to_value(hbar_report(&circuit.gates, dim)?)?),
        Report::Support => {
            let (support, phi, r) = match sim {
                Simulated::Stabilizer(s) => {
                    check_cap(dim, config.cap, false)?;
                    (s.support()?, Some(s.constraints().clone()), Some(s.values().clone()))
                }
                Simulated::Dense(psi) => (support_classification(psi), None, None),
            };
            merge(header, json!({ "class": support.class, "per_qudit": per_qudit_json(&support), "phi": phi, "r": r }))
        }
        Report::Gaussian => {
            let psi = dense_of(sim, circuit, config.cap)?;
            let form = match mixed_representation_search(&psi) {
                Ok(form) => Some(form),
                Err(qws_core::Error::NoGaussianForm) => None,
                Err(e) => return Err(e.into()),
            };
            merge(header, json!({ "found": form.is_some(), "form": form }))
        }
    };
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

fn per_qudit_json(support: &qws_core::stabilizer::SupportReport) -> serde_json::Value {
    support
        .per_qudit
        .iter()
        .zip(&support.per_qudit_class)
        .map(|(q, class)| json!({ "position": q.position, "momentum": q.momentum, "class": class }))
        .collect()
}

/// Backend whose Wigner table `--verify` compares against.
fn reference_for(backend: Backend, circuit: &CircuitFile) -> Backend {
    match backend {
        Backend::Stabilizer | Backend::Reflection => Backend::Dense,
        Backend::Dense if circuit.gates.iter().all(|g| g.kind.is_clifford()) => Backend::Stabilizer,
        Backend::Dense => Backend::Reflection,
    }
}

pub fn run(config: &RunConfig, circuit: &CircuitFile) -> Result<RunOutput, CliError> {
    let sim = simulate(config.backend, circuit, config.cap)?;
    let verification = if config.verify {
        let reference = reference_for(config.backend, circuit);
        let ours = wigner_of(&sim, config.cap)?;
        let theirs = wigner_of(&simulate(reference, circuit, config.cap)?, config.cap)?;
        let max_diff = ours.max_abs_diff(&theirs);
        if max_diff.is_nan() || max_diff > config.tol {
            return Err(CliError::VerifyMismatch { backend: config.backend, reference, diff: max_diff, tol: config.tol });
        }
        Some(Verification { backend: config.backend, reference, max_diff })
    } else {
        None
    };
    let emitted = config
        .reports
        .iter()
        .map(|&report| render(report, &sim, circuit, config).map(|contents| Emitted { report, contents }))
        .collect::<Result<_, _>>()?;
    Ok(RunOutput { emitted, verification })
}

/// Where each report goes: the path itself for a single report, otherwise
/// `<out>.<report>.<csv|json>`.
pub fn output_paths(out: &Path, reports: &[Report]) -> Vec<PathBuf> {
    if reports.len() == 1 {
        return vec![out.to_path_buf()];
    }
    reports
        .iter()
        .map(|r| {
            let mut name = out.as_os_str().to_owned();
            name.push(format!(".{}.{}", r.name(), r.extension()));
            PathBuf::from(name)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit(text: &str) -> CircuitFile {
        parse_circuit(text).unwrap()
    }

    #[test]
    fn stabilizer_refuses_t() {
        let c = circuit("qudits 1 dim 3\nF 0\n\nT 0\n");
        let err = run(&RunConfig::default(), &c).unwrap_err();
        assert!(matches!(err, CliError::BackendRefused { line: 4, .. }), "{err:?}");
        assert!(err.to_string().contains("hbar^1"));
    }

    #[test]
    fn hbar_report_total() {
        let c = circuit("qudits 2 dim 3\nF 0\nT 0\nC 0 1\n");
        let config = RunConfig { backend: Backend::Dense, reports: vec![Report::Hbar], ..RunConfig::default() };
        let out = run(&config, &c).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.emitted[0].contents).unwrap();
        assert_eq!(v["total_terms"], 9);
        assert_eq!(v["gates"][1]["kind"], "T");
        assert_eq!(v["gates"][1]["order"], 1);
    }

    #[test]
    fn cap_is_enforced() {
        let c = circuit("qudits 3 dim 7\nF 0\n");
        let config = RunConfig { cap: 1000, ..RunConfig::default() };
        assert!(matches!(run(&config, &c), Err(CliError::Core(qws_core::Error::SizeLimitExceeded { .. }))));
    }

    #[test]
    fn verify_reports_difference() {
        let c = circuit("qudits 2 dim 3\nF 0\nC 0 1\nP 1\n");
        let config = RunConfig { verify: true, ..RunConfig::default() };
        let v = run(&config, &c).unwrap().verification.unwrap();
        assert_eq!(v.reference, Backend::Dense);
        assert!(v.max_diff < 1e-12);
    }

    #[test]
    fn multiple_reports_get_suffixes() {
        let paths = output_paths(Path::new("out/run"), &[Report::Wigner, Report::Support]);
        assert_eq!(paths, vec![PathBuf::from("out/run.wigner.csv"), PathBuf::from("out/run.support.json")]);
        assert_eq!(output_paths(Path::new("w.csv"), &[Report::Wigner]), vec![PathBuf::from("w.csv")]);
    }
}
