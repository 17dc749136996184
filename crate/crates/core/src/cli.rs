//! Batch runner behind the `resfluor run` subcommand.
//!
//! A run reads a JSON config, evaluates the selected methods at every sweep
//! point, writes one CSV per `(method, point)` and a `report.json`, and maps
//! the outcome to an exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | every comparison passed |
//! | 1 | I/O failure |
//! | 2 | methods disagree or a spectrum went negative |
//! | 3 | malformed config or singular Liouvillian |

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouvillian::{Model, ModelConfig};
use crate::pipeline::Emitter;
use crate::spectrum::{FrequencyGrid, Method, SpectrumResult};
use crate::tolerances::{EQUIVALENCE_REL, MOLLOW_REL, ORACLE_REL, POSITIVITY_REL, SPECTRUM_ABS};

/// Overrides the output directory of every run.
pub const OUT_DIR_ENV: &str = "RESFLUOR_OUT_DIR";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// Local maxima at or above this fraction of the peak are reported.
const PEAK_REPORT_REL: f64 = 0.01;

fn default_output() -> String {
    "out".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_equivalence")]
    pub equivalence_rel: f64,
    #[serde(default = "default_positivity")]
    pub positivity_rel: f64,
}

fn default_equivalence() -> f64 {
    EQUIVALENCE_REL
}

fn default_positivity() -> f64 {
    POSITIVITY_REL
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            equivalence_rel: EQUIVALENCE_REL,
            positivity_rel: POSITIVITY_REL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    pub grid: FrequencyGrid,
    pub methods: Vec<Method>,
    #[serde(default = "default_output")]
    pub output_path: String,
    #[serde(default)]
    pub sweep: Vec<Sweep>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

const SWEEPABLE: [&str; 7] = [
    "rabi_1",
    "rabi_2",
    "detuning_1",
    "detuning_2",
    "gamma_1",
    "gamma_2",
    "geometry_factor",
];

fn parameter_mut<'a>(cfg: &'a mut ModelConfig, name: &str) -> Option<&'a mut f64> {
    Some(match name {
        "rabi_1" => &mut cfg.rabi_1,
        "rabi_2" => &mut cfg.rabi_2,
        "detuning_1" => &mut cfg.detuning_1,
        "detuning_2" => &mut cfg.detuning_2,
        "gamma_1" => &mut cfg.gamma_1,
        "gamma_2" => &mut cfg.gamma_2,
        "geometry_factor" => &mut cfg.geometry_factor,
        _ => return None,
    })
}

impl RunConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::ConfigParse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.grid.validate()?;
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "select at least one method"));
        }
        if self.methods.contains(&Method::MollowAnalytic)
            && (self.model.model != Model::TwoLevel || self.model.detuning_1 != 0.0)
        {
            return Err(Error::invalid(
                "methods",
                "mollow needs model two_level with detuning_1 = 0",
            ));
        }
        for sweep in &self.sweep {
            if !SWEEPABLE.contains(&sweep.parameter.as_str()) {
                return Err(Error::invalid(
                    "sweep",
                    format!("unknown parameter `{}`", sweep.parameter),
                ));
            }
            if sweep.values.is_empty() {
                return Err(Error::invalid(
                    "sweep",
                    format!("no values for `{}`", sweep.parameter),
                ));
            }
        }
        for (name, value) in [
            ("equivalence_rel", self.tolerances.equivalence_rel),
            ("positivity_rel", self.tolerances.positivity_rel),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::invalid(
                    "tolerances",
                    format!("{name} must be positive"),
                ));
            }
        }
        Ok(())
    }

    /// `(label, parameters)` in declaration order; a single unlabeled point
    /// when there is no sweep.
    pub fn points(&self) -> Result<Vec<(Option<String>, ModelConfig)>> {
        if self.sweep.is_empty() {
            return Ok(vec![(None, self.model.clone())]);
        }
        let mut out = Vec::new();
        for sweep in &self.sweep {
            for (k, value) in sweep.values.iter().enumerate() {
                let mut cfg = self.model.clone();
                *parameter_mut(&mut cfg, &sweep.parameter)
                    .ok_or_else(|| Error::invalid("sweep", sweep.parameter.clone()))? = *value;
                cfg.validate()?;
                out.push((Some(format!("{}_{k:03}", sweep.parameter)), cfg));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub max_abs_diff: f64,
    /// Relative to the reference peak.
    pub max_rel_diff: f64,
    pub min_value: f64,
    pub peak_positions: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub method: Method,
    pub max_rel_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodOutput {
    pub method: Method,
    pub file: String,
    pub coherent_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub label: Option<String>,
    pub parameters: ModelConfig,
    pub reference: Method,
    pub comparison: ComparisonReport,
    pub cross_checks: Vec<CrossCheck>,
    pub outputs: Vec<MethodOutput>,
}

impl PointReport {
    pub fn pass(&self) -> bool {
        self.comparison.pass && self.cross_checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub frequency_unit: &'static str,
    pub gamma_1: f64,
    pub config: RunConfig,
    pub points: Vec<PointReport>,
    pub pass: bool,
}

fn relative(diff: f64, peak: f64) -> f64 {
    if peak > 0.0 {
        diff / peak
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Compares `limit` against `reference` and checks positivity of the
/// reference. `floor` is an absolute allowance added to both relative
/// bounds, so spectra that vanish up to rounding still pass.
pub fn compare(
    reference: &SpectrumResult,
    limit: Option<&SpectrumResult>,
    tolerances: &Tolerances,
    floor: f64,
) -> ComparisonReport {
    let peak = reference.peak().max(0.0);
    let max_abs_diff = limit.map_or(0.0, |l| l.max_abs_diff(reference));
    let max_rel_diff = relative(max_abs_diff, peak);
    let min_value = reference.min();
    let peak_positions = reference
        .local_maxima(PEAK_REPORT_REL)
        .into_iter()
        .map(|i| reference.grid.point(i))
        .collect();
    let pass = max_abs_diff <= tolerances.equivalence_rel * peak + floor
        && min_value >= -(tolerances.positivity_rel * peak + floor);
    ComparisonReport {
        max_abs_diff,
        max_rel_diff,
        min_value,
        peak_positions,
        pass,
    }
}

/// Shortest round-trip decimal; `0` for either signed zero. Positional
/// notation for magnitudes in `[1e-4, 1e16)`, exponent notation otherwise.
pub fn format_number(v: f64) -> String {
    let mag = v.abs();
    if v == 0.0 {
        "0".to_string()
    } else if (1e-4..1e16).contains(&mag) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn csv_string(result: &SpectrumResult) -> String {
    let mut out = String::from("nu,S\n");
    for (i, value) in result.values.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{}",
            format_number(result.grid.point(i)),
            format_number(*value)
        );
    }
    out
}

pub fn emit_csv(result: &SpectrumResult, path: &Path) -> Result<()> {
    fs::write(path, csv_string(result)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn file_name(method: Method, label: Option<&str>) -> String {
    match label {
        Some(label) => format!("{}_{label}.csv", method.name()),
        None => format!("{}.csv", method.name()),
    }
}

/// Reference precedence: variance, limit, oracle, mollow.
fn reference_method(methods: &[Method]) -> Method {
    [
        Method::Variance,
        Method::Limit,
        Method::OracleTimeDomain,
        Method::MollowAnalytic,
    ]
    .into_iter()
    .find(|m| methods.contains(m))
    .expect("validated: at least one method")
}

fn unique_methods(methods: &[Method]) -> Vec<Method> {
    let mut seen = Vec::new();
    for m in methods {
        if !seen.contains(m) {
            seen.push(*m);
        }
    }
    seen
}

/// Evaluates every point and writes CSVs plus `report.json` into `out_dir`.
pub fn execute(config: &RunConfig, out_dir: &Path) -> Result<RunReport> {
    config.validate()?;
    let methods = unique_methods(&config.methods);
    let reference = reference_method(&methods);
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let mut points = Vec::new();
    for (label, params) in config.points()? {
        let emitter = Emitter::new(&params)?;
        let results = methods
            .iter()
            .map(|m| emitter.spectrum(*m, &config.grid).map(|r| (*m, r)))
            .collect::<Result<Vec<_>>>()?;
        let find = |m: Method| results.iter().find(|(k, _)| *k == m).map(|(_, r)| r);
        let reference_result = find(reference).expect("reference is among the results");
        let partner = (reference == Method::Variance)
            .then(|| find(Method::Limit))
            .flatten();
        let floor = SPECTRUM_ABS * params.geometry_factor;
        let comparison = compare(reference_result, partner, &config.tolerances, floor);
        log::info!(
            "{}: max_rel_diff {:e}, min {:e}",
            label.as_deref().unwrap_or("base"),
            comparison.max_rel_diff,
            comparison.min_value
        );

        let peak = reference_result.peak().max(0.0);
        let cross_checks = [
            (Method::OracleTimeDomain, ORACLE_REL),
            (Method::MollowAnalytic, MOLLOW_REL),
        ]
        .into_iter()
        .filter(|(m, _)| *m != reference)
        .filter_map(|(m, tol)| {
            find(m).map(|r| {
                let diff = r.max_abs_diff(reference_result);
                let tolerance = tol.max(config.tolerances.equivalence_rel);
                CrossCheck {
                    method: m,
                    max_rel_diff: relative(diff, peak),
                    tolerance,
                    pass: diff <= tolerance * peak + floor,
                }
            })
        })
        .collect();

        let mut outputs = Vec::new();
        for (method, result) in &results {
            let name = file_name(*method, label.as_deref());
            emit_csv(result, &out_dir.join(&name))?;
            outputs.push(MethodOutput {
                method: *method,
                file: name,
                coherent_weight: result.coherent_weight,
            });
        }
        points.push(PointReport {
            label,
            parameters: params,
            reference,
            comparison,
            cross_checks,
            outputs,
        });
    }

    let pass = points.iter().all(PointReport::pass);
    let report = RunReport {
        version: env!("CARGO_PKG_VERSION"),
        frequency_unit: "gamma_1",
        gamma_1: config.model.gamma_1,
        config: config.clone(),
        points,
        pass,
    };
    let report_path = out_dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    fs::write(&report_path, text).map_err(|source| Error::Io {
        path: report_path,
        source,
    })?;
    Ok(report)
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub methods: Option<Vec<Method>>,
    pub out: Option<PathBuf>,
}

/// Parses a comma-separated method list (`limit,variance,oracle,mollow`).
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "limit" => Ok(Method::Limit),
            "variance" => Ok(Method::Variance),
            "oracle" => Ok(Method::OracleTimeDomain),
            "mollow" => Ok(Method::MollowAnalytic),
            other => Err(Error::invalid(
                "methods",
                format!("unknown method `{other}`"),
            )),
        })
        .collect()
}

fn resolve(config_path: &Path, options: &RunOptions) -> Result<(RunConfig, PathBuf)> {
    let mut config = RunConfig::load(config_path)?;
    if let Some(methods) = &options.methods {
        config.methods = methods.clone();
    }
    let out = options
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(&config.output_path));
    config.output_path = out.to_string_lossy().into_owned();
    config.validate()?;
    Ok((config, out))
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

/// Runs a config file end to end; diagnostics go to stderr.
pub fn run(config_path: &Path, options: &RunOptions) -> i32 {
    let outcome = resolve(config_path, options).and_then(|(config, out)| execute(&config, &out));
    match outcome {
        Ok(report) if report.pass => EXIT_PASS,
        Ok(report) => {
            report_failures(&report);
            EXIT_MISMATCH
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn report_failures(report: &RunReport) {
    for point in report.points.iter().filter(|p| !p.pass()) {
        eprintln!(
            "FAIL {}: max_rel_diff = {:e}, min_value = {:e}",
            point.label.as_deref().unwrap_or("base"),
            point.comparison.max_rel_diff,
            point.comparison.min_value,
        );
        for check in point.cross_checks.iter().filter(|c| !c.pass) {
            eprintln!(
                "FAIL {} vs {}: {:e} > {:e}",
                check.method.name(),
                point.reference.name(),
                check.max_rel_diff,
                check.tolerance
            );
        }
    }
}
