//! The `qdm` command line: argument parsing, command dispatch and report
//! formatting. The binary only forwards `std::env::args` here.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::fock::{compare_with_gaussian, DeviationReport, FockConfig};
use crate::interferometer::{Circuit, CircuitSpec, Output};
use crate::metrology::{self, analytic_counterparts, SnrReport};
use crate::scenario::{validate_axes, Format, Scenario, ScenarioError, SweepAxis};

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Default Gaussian-vs-Fock tolerance of the `validate` command.
pub const DEFAULT_ORACLE_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "qdm", version, about = "Gaussian simulation of SU(2) and SU(1,1) interferometers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format: json or csv.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Signal, noise, SNR and closed-form comparison for one scenario.
    Run { file: PathBuf },
    /// Evaluate a scenario over one or two parameter axes.
    Sweep {
        file: PathBuf,
        /// `name=start:stop:count`; replaces the file's sweep axes.
        #[arg(long = "axis")]
        axes: Vec<SweepAxis>,
    },
    /// Probe-mode noise ellipses at the four stages of a degenerate SU(1,1)
    /// interferometer.
    ExportStates { file: PathBuf },
    /// Cross-check the Gaussian engine against the truncated Fock simulator.
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = 40)]
        cutoff: usize,
        #[arg(long, default_value_t = DEFAULT_ORACLE_TOLERANCE)]
        tolerance: f64,
    },
}

/// A failed command: exit code plus message.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) => EXIT_VALIDATION,
            _ => EXIT_NUMERICAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Invalid(inner) => inner.into(),
            other => CliError {
                code: EXIT_PARSE,
                message: other.to_string(),
            },
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => match write_output(cli.out.as_deref(), &text) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Runs the parsed command and returns the text it produces.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Run { file } => {
            let scenario = Scenario::load(file)?;
            let format = cli.format.or(scenario.run.format).unwrap_or(Format::Json);
            let report = run_report(&scenario)?;
            Ok(match format {
                Format::Json => to_json(&report),
                Format::Csv => report.to_csv(),
            })
        }
        Command::Sweep { file, axes } => {
            let mut scenario = Scenario::load(file)?;
            if !axes.is_empty() {
                scenario.sweep = axes.clone();
            }
            let format = cli.format.or(scenario.run.format).unwrap_or(Format::Csv);
            let table = sweep(&scenario, cli.workers)?;
            Ok(match format {
                Format::Csv => table.to_csv(),
                Format::Json => to_json(&table.to_records()),
            })
        }
        Command::ExportStates { file } => {
            let scenario = Scenario::load(file)?;
            Ok(to_json(&export_states(&scenario.circuit)?))
        }
        Command::Validate {
            file,
            cutoff,
            tolerance,
        } => {
            let scenario = Scenario::load(file)?;
            let config = FockConfig::with_cutoff(*cutoff);
            let report: DeviationReport = compare_with_gaussian(&scenario.circuit, &config, *tolerance)?;
            let text = to_json(&report);
            if report.passed {
                Ok(text)
            } else {
                Err(CliError {
                    code: EXIT_NUMERICAL,
                    message: format!(
                        "Gaussian and Fock engines differ by {:.3e} (tolerance {:.1e})\n{text}",
                        report.max_deviation(),
                        tolerance
                    ),
                })
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize to JSON");
    s.push('\n');
    s
}

fn num(v: f64) -> String {
    format!("{v:.11e}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// One monitored output of a `run` report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    #[serde(flatten)]
    pub report: SnrReport,
    /// Closed-form SNR at the same operating point, if one exists.
    pub analytic_snr: Option<f64>,
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    /// The resolved spec, defaults included.
    pub spec: CircuitSpec,
    pub i_ps: f64,
    pub outputs: Vec<OutputRecord>,
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "quadrature,parameter,value,signal_slope,signal,noise_var,snr,enhancement,analytic_snr,relative_error\n",
        );
        for o in &self.outputs {
            let r = &o.report;
            let parameter = serde_json::to_value(r.parameter).expect("enum serializes");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                r.quadrature,
                parameter.as_str().unwrap_or_default(),
                num(r.value),
                num(r.signal_slope),
                num(r.signal),
                num(r.noise_var),
                num(r.snr),
                opt_num(r.enhancement),
                opt_num(o.analytic_snr),
                opt_num(o.relative_error),
            );
        }
        s
    }
}

fn selected<'a>(circuit: &'a Circuit, names: &[String]) -> Result<Vec<&'a Output>, CliError> {
    if names.is_empty() {
        return Ok(circuit.outputs().iter().collect());
    }
    names
        .iter()
        .map(|n| circuit.output(n).map_err(CliError::from))
        .collect()
}

fn relative_error(numeric: f64, analytic: f64) -> f64 {
    if analytic == 0.0 {
        numeric.abs()
    } else {
        ((numeric - analytic) / analytic).abs()
    }
}

pub fn run_report(scenario: &Scenario) -> Result<RunReport, CliError> {
    let spec = &scenario.circuit;
    let circuit = Circuit::compile(spec)?;
    let analytic = analytic_counterparts(spec)?;
    let outputs = selected(&circuit, &scenario.run.outputs)?;
    let mut records = Vec::with_capacity(outputs.len());
    for o in outputs {
        let value = metrology::parameter_value(spec, o.parameter);
        let report = metrology::snr_numeric(&circuit, o.parameter, o, value)?;
        let idx = circuit
            .outputs()
            .iter()
            .position(|x| x.name == o.name)
            .expect("selected outputs come from the circuit");
        let analytic_snr = analytic[idx];
        records.push(OutputRecord {
            relative_error: analytic_snr.map(|a| relative_error(report.snr, a)),
            analytic_snr,
            report,
        });
    }
    Ok(RunReport {
        spec: spec.clone(),
        i_ps: spec.i_ps(),
        outputs: records,
    })
}

/// Per-output columns of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub noise_var: f64,
    pub snr: f64,
    pub enhancement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axes: Vec<String>,
    pub outputs: Vec<String>,
    /// Axis values and one cell per output, in lexicographic axis order.
    pub rows: Vec<(Vec<f64>, Vec<SweepCell>)>,
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    axes: Vec<(&'a str, f64)>,
    outputs: Vec<(&'a str, &'a SweepCell)>,
}

impl SweepTable {
    pub fn header(&self) -> Vec<String> {
        let mut cols = self.axes.clone();
        for o in &self.outputs {
            cols.push(format!("{o}_noise_var"));
            cols.push(format!("{o}_snr"));
            cols.push(format!("{o}_enhancement"));
        }
        cols
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header().join(",");
        s.push('\n');
        for (point, cells) in &self.rows {
            let mut fields: Vec<String> = point.iter().map(|&v| num(v)).collect();
            for c in cells {
                fields.push(num(c.noise_var));
                fields.push(num(c.snr));
                fields.push(opt_num(c.enhancement));
            }
            s.push_str(&fields.join(","));
            s.push('\n');
        }
        s
    }

    fn to_records(&self) -> Vec<SweepRecord<'_>> {
        self.rows
            .iter()
            .map(|(point, cells)| SweepRecord {
                axes: self.axes.iter().map(String::as_str).zip(point.iter().copied()).collect(),
                outputs: self.outputs.iter().map(String::as_str).zip(cells.iter()).collect(),
            })
            .collect()
    }

    /// Column of `{output}_{field}` values, `field` one of `noise_var`,
    /// `snr`, `enhancement`.
    pub fn column(&self, output: &str, field: &str) -> Option<Vec<Option<f64>>> {
        let k = self.outputs.iter().position(|o| o == output)?;
        let pick = |c: &SweepCell| match field {
            "noise_var" => Some(Some(c.noise_var)),
            "snr" => Some(Some(c.snr)),
            "enhancement" => Some(c.enhancement),
            _ => None,
        };
        self.rows.iter().map(|(_, cells)| pick(&cells[k])).collect()
    }
}

fn evaluate_point(scenario: &Scenario, axes: &[SweepAxis], point: &[f64]) -> Result<Vec<SweepCell>, CliError> {
    let mut spec = scenario.circuit.clone();
    for (a, &v) in axes.iter().zip(point) {
        a.axis.apply(&mut spec, v)?;
    }
    let circuit = Circuit::compile(&spec)?;
    selected(&circuit, &scenario.run.outputs)?
        .into_iter()
        .map(|o| {
            let value = metrology::parameter_value(&spec, o.parameter);
            let r = metrology::snr_numeric(&circuit, o.parameter, o, value)?;
            Ok(SweepCell {
                noise_var: r.noise_var,
                snr: r.snr,
                enhancement: r.enhancement,
            })
        })
        .collect()
}

/// Evaluates every grid point of the scenario's sweep axes, in parallel on
/// up to `workers` threads.
pub fn sweep(scenario: &Scenario, workers: Option<usize>) -> Result<SweepTable, CliError> {
    let axes = &scenario.sweep;
    if axes.is_empty() {
        return Err(Error::invalid("sweep needs at least one axis").into());
    }
    validate_axes(axes)?;
    if workers == Some(0) {
        return Err(Error::invalid("--workers must be at least 1").into());
    }
    let grids: Vec<Vec<f64>> = axes.iter().map(SweepAxis::points).collect();
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for g in &grids {
        points = points
            .into_iter()
            .flat_map(|p| {
                g.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let circuit = Circuit::compile(&scenario.circuit)?;
    let outputs: Vec<String> = selected(&circuit, &scenario.run.outputs)?
        .iter()
        .map(|o| o.name.to_string())
        .collect();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    let cells: Vec<Vec<SweepCell>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| evaluate_point(scenario, axes, p))
            .collect::<Result<_, _>>()
    })?;
    Ok(SweepTable {
        axes: axes.iter().map(|a| a.axis.name().to_string()).collect(),
        outputs,
        rows: points.into_iter().zip(cells).collect(),
    })
}

/// One stage of the degenerate SU(1,1) state evolution, flattened for
/// plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: char,
    pub label: crate::interferometer::StageLabel,
    pub center: [f64; 2],
    pub major_variance: f64,
    pub minor_variance: f64,
    pub orientation: f64,
}

pub fn export_states(spec: &CircuitSpec) -> Result<Vec<StageRecord>, CliError> {
    let circuit = Circuit::compile(spec)?;
    Ok(circuit
        .stage_snapshots()?
        .into_iter()
        .map(|s| StageRecord {
            stage: s.label.letter(),
            label: s.label,
            center: [s.ellipse.center_x, s.ellipse.center_y],
            major_variance: s.ellipse.major_variance,
            minor_variance: s.ellipse.minor_variance,
            orientation: s.ellipse.orientation,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(text: &str) -> Scenario {
        Scenario::from_toml_str(text).unwrap()
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(Error::invalid("x")).code, EXIT_VALIDATION);
        assert_eq!(CliError::from(Error::Numerical("x".into())).code, EXIT_NUMERICAL);
        let parse = ScenarioError::Parse {
            line: 1,
            column: 1,
            message: "x".into(),
        };
        assert_eq!(CliError::from(parse).code, EXIT_PARSE);
    }

    #[test]
    fn mzi_run_report_matches_closed_form() {
        let s = scenario(
            "[circuit]\ntopology = \"mzi\"\nalpha = { re = 100.0 }\nsplitters = [{ t = 0.9 }, { t = 0.9 }]\ndelta = 1e-3\nepsilon = 1e-3\n",
        );
        let r = run_report(&s).unwrap();
        assert_eq!(r.outputs.len(), 2);
        for o in &r.outputs {
            let expected = 4.0 * 0.9 * 1000.0 * 1e-6;
            assert!((o.report.snr - expected).abs() / expected < 1e-9);
            assert!(o.relative_error.unwrap() < 1e-9);
        }
        assert_eq!(r.to_csv().lines().count(), 3);
    }

    #[test]
    fn sweep_rows_follow_axis_order() {
        let mut s = scenario(
            "[circuit]\ntopology = \"mzi\"\nalpha = { re = 10.0 }\nsplitters = [{ t = 0.9 }, { t = 0.9 }]\ndelta = 1e-3\n",
        );
        s.sweep = vec!["t=0.5:0.9:3".parse().unwrap(), "alpha=1:2:2".parse().unwrap()];
        let table = sweep(&s, Some(2)).unwrap();
        let firsts: Vec<Vec<f64>> = table.rows.iter().map(|r| r.0.clone()).collect();
        assert_eq!(firsts[0], vec![0.5, 1.0]);
        assert_eq!(firsts[1], vec![0.5, 2.0]);
        assert_eq!(firsts[5], vec![0.9, 2.0]);
        assert_eq!(table.header()[..3], ["t", "alpha", "bout_y_noise_var"]);
    }
}
