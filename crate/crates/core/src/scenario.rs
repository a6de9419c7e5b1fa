//! TOML scenario files: one circuit, run options and optional sweep axes.
//!
//! ```toml
//! [circuit]
//! topology = "nested_sui"
//! alpha = { re = 100.0 }
//! splitters = [{ t = 0.9999 }, { t = 0.9999 }]
//! gains = [{ gain = 1.6666666666666667 }, { gain = 1.6666666666666667 }]
//! phi = 3.141592653589793
//!
//! [run]
//! outputs = ["d1_y"]
//!
//! [[sweep]]
//! axis = "phi"
//! start = 0.0
//! stop = 6.283185307179586
//! count = 629
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::elements::{PaGain, SplitterSpec};
use crate::error::Error;
use crate::interferometer::{Amplitude, Circuit, CircuitSpec, Topology};

/// Most points allowed on one sweep axis.
pub const MAX_AXIS_POINTS: usize = 10_000;
/// Most axes in one sweep.
pub const MAX_AXES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    /// Output names to report; empty means every monitored output.
    #[serde(default)]
    pub outputs: Vec<String>,
    #[serde(default)]
    pub format: Option<Format>,
    /// Reserved. Every computation in the crate is deterministic.
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Scalar parameter a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Real probe amplitude.
    Alpha,
    /// Both Mach-Zehnder splitters.
    T,
    /// Output splitter of the joint measurement.
    T3,
    G1,
    G2,
    /// First DPA phase alone (changes `Δ = θ₁ − θ₂`).
    Theta1,
    /// Second DPA phase with `θ₁` following, so `Δ` is kept.
    Theta2,
    Phi,
    MziPhi,
    Delta,
    Epsilon,
    /// Detection efficiency.
    Eta,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Alpha => "alpha",
            Axis::T => "t",
            Axis::T3 => "t3",
            Axis::G1 => "g1",
            Axis::G2 => "g2",
            Axis::Theta1 => "theta1",
            Axis::Theta2 => "theta2",
            Axis::Phi => "phi",
            Axis::MziPhi => "mzi_phi",
            Axis::Delta => "delta",
            Axis::Epsilon => "epsilon",
            Axis::Eta => "eta",
        }
    }

    const ALL: [Axis; 12] = [
        Axis::Alpha,
        Axis::T,
        Axis::T3,
        Axis::G1,
        Axis::G2,
        Axis::Theta1,
        Axis::Theta2,
        Axis::Phi,
        Axis::MziPhi,
        Axis::Delta,
        Axis::Epsilon,
        Axis::Eta,
    ];

    /// Writes `value` into the matching field of `spec`.
    pub fn apply(&self, spec: &mut CircuitSpec, value: f64) -> crate::Result<()> {
        let gain_slot = |spec: &mut CircuitSpec, i: usize| -> crate::Result<()> {
            let g = spec
                .gains
                .get_mut(i)
                .ok_or_else(|| Error::invalid(format!("axis {:?} needs amplifier gains", self.name())))?;
            *g = PaGain::new(value, g.phase())?;
            Ok(())
        };
        let phase_slot = |spec: &mut CircuitSpec, i: usize, phase: f64| -> crate::Result<()> {
            let g = spec
                .gains
                .get_mut(i)
                .ok_or_else(|| Error::invalid(format!("axis {:?} needs amplifier gains", self.name())))?;
            *g = g.with_phase(phase);
            Ok(())
        };
        match self {
            Axis::Alpha => spec.alpha = Amplitude::real(value),
            Axis::T => {
                if spec.topology == Topology::DirectHomodyne {
                    return Err(Error::invalid("axis \"t\" needs an interferometer"));
                }
                let s = SplitterSpec::new(value)?;
                for slot in spec.splitters.iter_mut().take(2) {
                    *slot = s;
                }
            }
            Axis::T3 => {
                let s = SplitterSpec::new(value)?;
                let idx = match spec.topology {
                    Topology::DirectHomodyne => 0,
                    Topology::Mzi => 2,
                    _ => return Err(Error::invalid("axis \"t3\" needs a direct or mzi topology")),
                };
                if spec.splitters.len() > idx {
                    spec.splitters[idx] = s;
                } else if spec.splitters.len() == idx {
                    spec.splitters.push(s);
                } else {
                    return Err(Error::invalid("axis \"t3\": mzi splitters missing"));
                }
            }
            Axis::G1 => gain_slot(spec, 0)?,
            Axis::G2 => gain_slot(spec, 1)?,
            Axis::Theta1 => phase_slot(spec, 0, value)?,
            Axis::Theta2 => {
                let (t1, t2) = match spec.gains.as_slice() {
                    [a, b] => (a.phase(), b.phase()),
                    _ => return Err(Error::invalid("axis \"theta2\" needs amplifier gains")),
                };
                phase_slot(spec, 0, value + (t1 - t2))?;
                phase_slot(spec, 1, value)?;
            }
            Axis::Phi => spec.phi = value,
            Axis::MziPhi => spec.mzi_phi = value,
            Axis::Delta => spec.delta = value,
            Axis::Epsilon => spec.epsilon = value,
            Axis::Eta => spec.detection_loss = value,
        }
        Ok(())
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Axis::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Axis::ALL.iter().map(|a| a.name()).collect();
                format!("unknown axis {s:?}; known axes: {}", names.join(", "))
            })
    }
}

/// `count` evenly spaced points from `start` to `stop`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn validate(&self) -> crate::Result<()> {
        if self.count == 0 || self.count > MAX_AXIS_POINTS {
            return Err(Error::invalid(format!(
                "axis {} has {} points; allowed 1..={MAX_AXIS_POINTS}",
                self.axis, self.count
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::invalid(format!("axis {} has a non-finite range", self.axis)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + span * (i as f64 / last))
            .collect()
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    /// Parses `name=start:stop:count`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| format!("axis {s:?} is not of the form name=start:stop:count"))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(format!("axis range {range:?} is not start:stop:count"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number {v:?}: {e}"));
        Ok(SweepAxis {
            axis: name.trim().parse()?,
            start: num(start)?,
            stop: num(stop)?,
            count: count
                .trim()
                .parse()
                .map_err(|e| format!("bad point count {count:?}: {e}"))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub circuit: CircuitSpec,
    #[serde(default)]
    pub run: RunOptions,
    #[serde(default)]
    pub sweep: Vec<SweepAxis>,
}

/// Why a scenario could not be loaded.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(#[from] Error),
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Scenario, ScenarioError> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| {
            let message = e.message().trim().to_string();
            // constructor checks surface through serde as custom messages
            if let Some(rest) = message.strip_prefix("invalid argument: ") {
                return ScenarioError::Invalid(Error::InvalidArgument(rest.to_string()));
            }
            let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
            ScenarioError::Parse {
                line,
                column,
                message,
            }
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Scenario::from_toml_str(&text)
    }

    /// Physical constraints of the circuit, the output selection and the
    /// sweep budget.
    pub fn validate(&self) -> crate::Result<()> {
        let circuit = Circuit::compile(&self.circuit)?;
        for name in &self.run.outputs {
            circuit.output(name)?;
        }
        validate_axes(&self.sweep)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario fields are all TOML-representable")
    }
}

pub fn validate_axes(axes: &[SweepAxis]) -> crate::Result<()> {
    if axes.len() > MAX_AXES {
        return Err(Error::invalid(format!(
            "{} sweep axes given; at most {MAX_AXES} allowed",
            axes.len()
        )));
    }
    for (i, a) in axes.iter().enumerate() {
        a.validate()?;
        if axes[..i].iter().any(|b| b.axis == a.axis) {
            return Err(Error::invalid(format!("axis {} given twice", a.axis)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MZI: &str = r#"
[circuit]
topology = "mzi"
alpha = { re = 100.0 }
splitters = [{ t = 0.9 }, { t = 0.9 }]
delta = 1e-3
epsilon = 1e-3
"#;

    #[test]
    fn parses_minimal_scenario_with_defaults() {
        let s = Scenario::from_toml_str(MZI).unwrap();
        assert_eq!(s.circuit.topology, Topology::Mzi);
        assert_eq!(s.circuit.detection_loss, 1.0);
        assert!(s.run.outputs.is_empty());
        assert!(s.sweep.is_empty());
        let again = Scenario::from_toml_str(&s.to_toml_string()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        let text = MZI.replace("delta = 1e-3", "delta = 1e-3\ncolour = 1");
        match Scenario::from_toml_str(&text) {
            Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        assert!(matches!(Scenario::from_toml_str(""), Err(ScenarioError::Parse { .. })));
    }

    #[test]
    fn out_of_range_transmissivity_is_a_validation_error() {
        let text = MZI.replace("{ t = 0.9 }, { t = 0.9 }", "{ t = 1.2 }, { t = 0.9 }");
        match Scenario::from_toml_str(&text) {
            Err(ScenarioError::Invalid(e)) => assert!(e.to_string().contains("transmissivity")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_output_is_rejected() {
        let text = format!("{MZI}\n[run]\noutputs = [\"nope\"]\n");
        assert!(matches!(Scenario::from_toml_str(&text), Err(ScenarioError::Invalid(_))));
    }

    #[test]
    fn axis_parsing_and_points() {
        let a: SweepAxis = "phi=0:6.283185307179586:629".parse().unwrap();
        assert_eq!(a.axis, Axis::Phi);
        let p = a.points();
        assert_eq!(p.len(), 629);
        assert_eq!(p[314], std::f64::consts::PI);
        assert_eq!(*p.last().unwrap(), std::f64::consts::TAU);
        assert!("phi=0:1".parse::<SweepAxis>().is_err());
        assert!("bogus=0:1:2".parse::<SweepAxis>().is_err());
        let zero: SweepAxis = "phi=0:1:0".parse().unwrap();
        assert!(zero.validate().is_err());
        let over: SweepAxis = "phi=0:1:10001".parse().unwrap();
        assert!(over.validate().is_err());
    }

    #[test]
    fn theta2_axis_keeps_phase_difference() {
        let mut spec = CircuitSpec::degenerate_sui(1.0, 0.9, 1.2, std::f64::consts::PI, 1.2, 0.0);
        Axis::Theta2.apply(&mut spec, 0.5).unwrap();
        assert_eq!(spec.gains[1].phase(), 0.5);
        assert!((spec.gains[0].phase() - spec.gains[1].phase() - std::f64::consts::PI).abs() < 1e-15);
        assert!(Axis::G1.apply(&mut CircuitSpec::mzi(1.0, 0.5), 1.2).is_err());
    }
}
