//! The four measurement topologies, compiled from a [`CircuitSpec`].
//!
//! | topology          | modes                    | monitored outputs            |
//! |-------------------|--------------------------|------------------------------|
//! | `direct_homodyne` | `a_in` [+ `v3`]          | `y`, `x` (or `t_y`, `r_x`)   |
//! | `mzi`             | `a_in`, `b_in` [+ `v3`]  | `bout_y`, `bout_x` (or `bout_t_y`, `bout_r_x`) |
//! | `nested_sui`      | `a0`, `b0`, `a_in`       | `d1_y`, `d2_x`               |
//! | `degenerate_sui`  | `b0`, `a_in`             | `cal_x`, `cal_y`             |
//!
//! The Mach-Zehnder block follows the splitter signs
//! `A = √T₁ a + √R₁ b`, `B = √T₁ b − √R₁ a`,
//! `a_out = √T₂ A − √R₂ B'`, `b_out = √T₂ B' + √R₂ A`, with the modulations
//! and the internal phase acting on arm `B`. At zero internal phase, zero
//! modulation and `T₁ = T₂` the block is exactly the identity.
//!
//! Sign note: with `Y = (b − b†)/i` the dark port of the Mach-Zehnder block
//! carries `⟨Y⟩ = −2αδ√(TR)`; the magnitude is the familiar `2αδ√(TR)`. The
//! nested amplifier conjugates the probe, so `⟨Y_{d1}⟩ = +2g₂δ√I_ps`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elements::{
    amplitude_modulator, beam_splitter, complex_multiplier, linearized_modulation, loss_channel,
    phase_shifter, single_mode_squeezer, two_mode_squeezer, PaGain, SplitterSpec,
};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianMap, GaussianState};

/// Largest |δ|, |ε| accepted in linearized mode.
pub const SMALL_MODULATION_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    DirectHomodyne,
    Mzi,
    NestedSui,
    DegenerateSui,
}

/// How the PM/AM modulators act on the probe arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulationMode {
    /// Phase shifter `e^{iδ}` and loss channel `e^{-2ε}` (vacuum admitted).
    Exact,
    /// First-order mean displacement `β → (1 + iδ − ε)β`, covariance untouched.
    #[default]
    Linearized,
}

/// How the Mach-Zehnder block is represented inside the SU(1,1) topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MziModel {
    /// Both splitters and the modulated arm, at finite `R`.
    #[default]
    Full,
    /// Dark-port relation in the unbalanced limit, `b_out = b_in + √R(ε − iδ)a_in`.
    /// Linearized mode only.
    DarkPortLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Amplitude {
    pub fn real(re: f64) -> Self {
        Amplitude { re, im: 0.0 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// Full description of one interferometer and its operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub topology: Topology,
    /// Coherent amplitude of the probe `a_in`.
    pub alpha: Amplitude,
    /// `[T₁, T₂]` plus an optional output splitter `T₃`. For direct
    /// homodyne only the optional `[T₃]`.
    #[serde(default)]
    pub splitters: Vec<SplitterSpec>,
    /// `[G₁, G₂]`; phases are `θ₁, θ₂` for the degenerate topology.
    #[serde(default)]
    pub gains: Vec<PaGain>,
    /// SU(1,1) internal phase on the `C` arm.
    #[serde(default)]
    pub phi: f64,
    /// Mach-Zehnder internal phase on arm `B`.
    #[serde(default)]
    pub mzi_phi: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub modulation_mode: ModulationMode,
    #[serde(default)]
    pub mzi_model: MziModel,
    /// Detection efficiency applied to every monitored output.
    #[serde(default = "unit")]
    pub detection_loss: f64,
}

fn unit() -> f64 {
    1.0
}

impl CircuitSpec {
    fn base(topology: Topology, alpha: f64) -> Self {
        CircuitSpec {
            topology,
            alpha: Amplitude::real(alpha),
            splitters: Vec::new(),
            gains: Vec::new(),
            phi: 0.0,
            mzi_phi: 0.0,
            delta: 0.0,
            epsilon: 0.0,
            modulation_mode: ModulationMode::Linearized,
            mzi_model: MziModel::Full,
            detection_loss: 1.0,
        }
    }

    pub fn direct_homodyne(alpha: f64) -> Self {
        Self::base(Topology::DirectHomodyne, alpha)
    }

    /// Balanced-identical Mach-Zehnder, `T₁ = T₂ = t`, at the dark fringe.
    ///
    /// # Panics
    /// If `t` is outside `[0, 1]`.
    pub fn mzi(alpha: f64, t: f64) -> Self {
        let s = SplitterSpec::new(t).expect("transmissivity in [0, 1]");
        CircuitSpec {
            splitters: vec![s, s],
            ..Self::base(Topology::Mzi, alpha)
        }
    }

    /// Nested SU(1,1) interferometer at its dark fringe `φ = π`.
    ///
    /// # Panics
    /// If `t` is outside `[0, 1]` or a gain is below 1.
    pub fn nested_sui(alpha: f64, t: f64, g1: f64, g2: f64) -> Self {
        let s = SplitterSpec::new(t).expect("transmissivity in [0, 1]");
        CircuitSpec {
            splitters: vec![s, s],
            gains: vec![
                PaGain::new(g1, 0.0).expect("gain >= 1"),
                PaGain::new(g2, 0.0).expect("gain >= 1"),
            ],
            phi: PI,
            ..Self::base(Topology::NestedSui, alpha)
        }
    }

    /// Degenerate SU(1,1) interferometer with DPA phases `θ₁`, `θ₂`.
    ///
    /// # Panics
    /// If `t` is outside `[0, 1]` or a gain is below 1.
    pub fn degenerate_sui(alpha: f64, t: f64, g1: f64, theta1: f64, g2: f64, theta2: f64) -> Self {
        let s = SplitterSpec::new(t).expect("transmissivity in [0, 1]");
        CircuitSpec {
            splitters: vec![s, s],
            gains: vec![
                PaGain::new(g1, theta1).expect("gain >= 1"),
                PaGain::new(g2, theta2).expect("gain >= 1"),
            ],
            ..Self::base(Topology::DegenerateSui, alpha)
        }
    }

    pub fn with_modulation(mut self, delta: f64, epsilon: f64) -> Self {
        self.delta = delta;
        self.epsilon = epsilon;
        self
    }

    pub fn with_mode(mut self, mode: ModulationMode) -> Self {
        self.modulation_mode = mode;
        self
    }

    pub fn with_mzi_model(mut self, model: MziModel) -> Self {
        self.mzi_model = model;
        self
    }

    pub fn with_detection_loss(mut self, eta: f64) -> Self {
        self.detection_loss = eta;
        self
    }

    pub fn with_output_splitter(mut self, t3: f64) -> Result<Self> {
        self.splitters.push(SplitterSpec::new(t3)?);
        Ok(self)
    }

    fn mzi_splitters(&self) -> Result<(SplitterSpec, SplitterSpec)> {
        match self.splitters.as_slice() {
            [t1, t2, ..] => Ok((*t1, *t2)),
            _ => Err(Error::invalid(format!(
                "{:?} needs two splitters [T1, T2], got {}",
                self.topology,
                self.splitters.len()
            ))),
        }
    }

    /// Optional output splitter used for joint measurement.
    pub fn output_splitter(&self) -> Option<SplitterSpec> {
        match self.topology {
            Topology::DirectHomodyne => self.splitters.first().copied(),
            Topology::Mzi => self.splitters.get(2).copied(),
            _ => None,
        }
    }

    fn amplifiers(&self) -> Result<(PaGain, PaGain)> {
        match self.gains.as_slice() {
            [g1, g2] => Ok((*g1, *g2)),
            other => Err(Error::invalid(format!(
                "{:?} needs two amplifier gains [G1, G2], got {}",
                self.topology,
                other.len()
            ))),
        }
    }

    /// Phase-sensing photon number: `R₁|α|²`, or `|α|²` for direct homodyne.
    pub fn i_ps(&self) -> f64 {
        match self.topology {
            Topology::DirectHomodyne => self.alpha.norm_sqr(),
            _ => self
                .splitters
                .first()
                .map_or(0.0, |s| s.r() * self.alpha.norm_sqr()),
        }
    }

    /// Checks every physical constraint of the spec.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.alpha.re,
            self.alpha.im,
            self.phi,
            self.mzi_phi,
            self.delta,
            self.epsilon,
            self.detection_loss,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("all circuit parameters must be finite"));
        }
        if !(self.detection_loss > 0.0 && self.detection_loss <= 1.0) {
            return Err(Error::invalid(format!(
                "detection_loss (efficiency) {} outside (0, 1]",
                self.detection_loss
            )));
        }
        if self.modulation_mode == ModulationMode::Linearized
            && (self.delta.abs() >= SMALL_MODULATION_LIMIT
                || self.epsilon.abs() >= SMALL_MODULATION_LIMIT)
        {
            return Err(Error::invalid(format!(
                "linearized modulation needs |delta|, |epsilon| < {SMALL_MODULATION_LIMIT} \
                 (got delta = {}, epsilon = {})",
                self.delta, self.epsilon
            )));
        }
        if self.modulation_mode == ModulationMode::Exact && self.epsilon < 0.0 {
            return Err(Error::invalid("exact amplitude modulation needs epsilon >= 0"));
        }
        match self.topology {
            Topology::DirectHomodyne => {
                if self.splitters.len() > 1 {
                    return Err(Error::invalid(
                        "direct homodyne accepts at most one (output) splitter",
                    ));
                }
                if !self.gains.is_empty() {
                    return Err(Error::invalid("direct homodyne has no amplifiers"));
                }
            }
            Topology::Mzi => {
                self.mzi_splitters()?;
                if self.splitters.len() > 3 {
                    return Err(Error::invalid("MZI accepts at most three splitters"));
                }
                if !self.gains.is_empty() {
                    return Err(Error::invalid("MZI has no amplifiers"));
                }
            }
            Topology::NestedSui | Topology::DegenerateSui => {
                self.mzi_splitters()?;
                self.amplifiers()?;
                if self.splitters.len() > 2 {
                    return Err(Error::invalid(format!(
                        "{:?} accepts exactly two splitters",
                        self.topology
                    )));
                }
            }
        }
        if self.mzi_model == MziModel::DarkPortLimit {
            if self.topology == Topology::DirectHomodyne {
                return Err(Error::invalid("dark_port_limit needs an interferometer"));
            }
            if self.modulation_mode == ModulationMode::Exact {
                return Err(Error::invalid("dark_port_limit is only defined in linearized mode"));
            }
            let (t1, t2) = self.mzi_splitters()?;
            if t1 != t2 || self.mzi_phi != 0.0 {
                return Err(Error::invalid(
                    "dark_port_limit assumes identical splitters and mzi_phi = 0",
                ));
            }
        }
        Ok(())
    }
}

/// Which modulation a signal slope refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Delta,
    Epsilon,
    /// The combination `δ·∂/∂δ + ε·∂/∂ε`, normalised by `√(δ² + ε²)`.
    Joint,
}

/// A monitored homodyne output: mode, quadrature angle and the modulation it
/// is meant to read out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Output {
    pub name: &'static str,
    pub mode: usize,
    pub angle: f64,
    pub parameter: Parameter,
}

/// Position in the degenerate SU(1,1) interferometer where a snapshot of
/// the probe mode is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageLabel {
    Input,
    AfterFirstAmplifier,
    AfterEncoding,
    AfterSecondAmplifier,
}

impl StageLabel {
    pub fn letter(&self) -> char {
        match self {
            StageLabel::Input => 'a',
            StageLabel::AfterFirstAmplifier => 'b',
            StageLabel::AfterEncoding => 'c',
            StageLabel::AfterSecondAmplifier => 'd',
        }
    }
}

/// Noise ellipse of one mode: eigen-decomposition of its 2×2 covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ellipse {
    pub center_x: f64,
    pub center_y: f64,
    pub major_variance: f64,
    pub minor_variance: f64,
    /// Direction of the major axis in `[0, π)`; 0 for a circle.
    pub orientation: f64,
}

impl Ellipse {
    pub fn of_mode(state: &GaussianState, mode: usize) -> Result<Ellipse> {
        let (mean, cov) = state.mode_block(mode)?;
        let eig = SymmetricEigen::new(cov);
        let (imax, imin) = if eig.eigenvalues[0] >= eig.eigenvalues[1] {
            (0, 1)
        } else {
            (1, 0)
        };
        let major = eig.eigenvalues[imax];
        let minor = eig.eigenvalues[imin];
        let orientation = if (major - minor).abs() <= 1e-12 * major.abs().max(1.0) {
            0.0
        } else {
            let v = eig.eigenvectors.column(imax);
            v[1].atan2(v[0]).rem_euclid(PI)
        };
        // snap values like π - 1e-16 back to 0
        let orientation = if PI - orientation < 1e-12 { 0.0 } else { orientation };
        Ok(Ellipse {
            center_x: mean[0],
            center_y: mean[1],
            major_variance: major,
            minor_variance: minor,
            orientation,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageSnapshot {
    pub label: StageLabel,
    #[serde(skip)]
    pub state: GaussianState,
    pub ellipse: Ellipse,
}

enum Step {
    Map {
        map: GaussianMap,
        modes: Vec<usize>,
    },
    /// Mean-only linear map with its derivatives in δ and ε.
    Mean {
        linear: DMatrix<f64>,
        d_delta: DMatrix<f64>,
        d_epsilon: DMatrix<f64>,
        modes: Vec<usize>,
    },
    Stage(StageLabel),
}

/// Final state of one evaluation plus any stage snapshots along the way.
#[derive(Debug, Clone)]
pub struct Trace {
    pub state: GaussianState,
    pub stages: Vec<(StageLabel, GaussianState)>,
}

/// A validated [`CircuitSpec`] with its mode roster and monitored outputs.
#[derive(Debug, Clone)]
pub struct Circuit {
    spec: CircuitSpec,
    roster: Vec<&'static str>,
    outputs: Vec<Output>,
    probe: Option<usize>,
}

impl Circuit {
    pub fn compile(spec: &CircuitSpec) -> Result<Circuit> {
        spec.validate()?;
        let split = spec.output_splitter().is_some();
        let (roster, outputs, probe): (Vec<&'static str>, Vec<Output>, Option<usize>) =
            match spec.topology {
                Topology::DirectHomodyne if split => (
                    vec!["a_in", "v3"],
                    vec![
                        out("t_y", 0, FRAC_PI_2, Parameter::Delta),
                        out("r_x", 1, 0.0, Parameter::Epsilon),
                    ],
                    None,
                ),
                Topology::DirectHomodyne => (
                    vec!["a_in"],
                    vec![
                        out("y", 0, FRAC_PI_2, Parameter::Delta),
                        out("x", 0, 0.0, Parameter::Epsilon),
                    ],
                    None,
                ),
                Topology::Mzi if split => (
                    vec!["a_in", "b_in", "v3"],
                    vec![
                        out("bout_t_y", 1, FRAC_PI_2, Parameter::Delta),
                        out("bout_r_x", 2, 0.0, Parameter::Epsilon),
                    ],
                    None,
                ),
                Topology::Mzi => (
                    vec!["a_in", "b_in"],
                    vec![
                        out("bout_y", 1, FRAC_PI_2, Parameter::Delta),
                        out("bout_x", 1, 0.0, Parameter::Epsilon),
                    ],
                    None,
                ),
                Topology::NestedSui => (
                    vec!["a0", "b0", "a_in"],
                    vec![
                        out("d1_y", 0, FRAC_PI_2, Parameter::Delta),
                        out("d2_x", 1, 0.0, Parameter::Epsilon),
                    ],
                    Some(1),
                ),
                Topology::DegenerateSui => {
                    let half = spec.gains[1].phase() / 2.0;
                    (
                        vec!["b0", "a_in"],
                        vec![
                            out("cal_x", 0, half, Parameter::Joint),
                            out("cal_y", 0, half + FRAC_PI_2, Parameter::Joint),
                        ],
                        Some(0),
                    )
                }
            };
        Ok(Circuit {
            spec: spec.clone(),
            roster,
            outputs,
            probe,
        })
    }

    pub fn spec(&self) -> &CircuitSpec {
        &self.spec
    }

    pub fn roster(&self) -> &[&'static str] {
        &self.roster
    }

    pub fn n_modes(&self) -> usize {
        self.roster.len()
    }

    pub fn outputs(&self) -> &[Output] {
        &self.outputs
    }

    pub fn output(&self, name: &str) -> Result<&Output> {
        self.outputs.iter().find(|o| o.name == name).ok_or_else(|| {
            Error::invalid(format!(
                "no output named {name:?}; available: {:?}",
                self.outputs.iter().map(|o| o.name).collect::<Vec<_>>()
            ))
        })
    }

    /// Mode carrying the SU(1,1) probe field (`b0 → b_in → b_out → …`).
    pub fn probe_mode(&self) -> Option<usize> {
        self.probe
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.roster.iter().position(|&m| m == name)
    }

    /// Input state: vacuum everywhere, coherent `α` on `a_in`.
    pub fn input_state(&self) -> GaussianState {
        let vac = GaussianState::vacuum(self.n_modes()).expect("roster is never empty");
        let a_in = self.mode_index("a_in").expect("every roster has a_in");
        vac.displace(a_in, self.spec.alpha.re, self.spec.alpha.im)
            .expect("a_in is in range")
    }

    fn modulation_steps(&self, arm: usize, delta: f64, epsilon: f64, steps: &mut Vec<Step>) -> Result<()> {
        match self.spec.modulation_mode {
            ModulationMode::Exact => {
                if epsilon != 0.0 {
                    steps.push(Step::Map {
                        map: amplitude_modulator(epsilon)?,
                        modes: vec![arm],
                    });
                }
                if delta != 0.0 {
                    steps.push(Step::Map {
                        map: phase_shifter(delta),
                        modes: vec![arm],
                    });
                }
            }
            ModulationMode::Linearized => steps.push(Step::Mean {
                linear: linearized_modulation(delta, epsilon),
                d_delta: complex_multiplier(Complex64::i()),
                d_epsilon: -DMatrix::identity(2, 2),
                modes: vec![arm],
            }),
        }
        Ok(())
    }

    /// Steps of the Mach-Zehnder block acting on `(a_in, b)`.
    fn mzi_steps(&self, a: usize, b: usize, delta: f64, epsilon: f64, steps: &mut Vec<Step>) -> Result<()> {
        let (t1, t2) = self.spec.mzi_splitters()?;
        match self.spec.mzi_model {
            MziModel::Full => {
                steps.push(Step::Map {
                    map: beam_splitter(&t1),
                    modes: vec![a, b],
                });
                self.modulation_steps(b, delta, epsilon, steps)?;
                if self.spec.mzi_phi != 0.0 {
                    steps.push(Step::Map {
                        map: phase_shifter(self.spec.mzi_phi),
                        modes: vec![b],
                    });
                }
                // reversed order realises a_out = √T A − √R B', b_out = √T B' + √R A
                steps.push(Step::Map {
                    map: beam_splitter(&t2),
                    modes: vec![b, a],
                });
            }
            MziModel::DarkPortLimit => {
                let coupling = t1.r().sqrt();
                let block = |z: Complex64| {
                    let mut m = DMatrix::zeros(4, 4);
                    m.view_mut((2, 0), (2, 2))
                        .copy_from(&(complex_multiplier(z) * coupling));
                    m
                };
                let linear = DMatrix::identity(4, 4) + block(Complex64::new(epsilon, -delta));
                steps.push(Step::Mean {
                    linear,
                    d_delta: block(Complex64::new(0.0, -1.0)),
                    d_epsilon: block(Complex64::new(1.0, 0.0)),
                    modes: vec![a, b],
                });
            }
        }
        Ok(())
    }

    fn steps(&self, delta: f64, epsilon: f64) -> Result<Vec<Step>> {
        let spec = &self.spec;
        let mut steps = Vec::new();
        match spec.topology {
            Topology::DirectHomodyne => {
                self.modulation_steps(0, delta, epsilon, &mut steps)?;
                if let Some(t3) = spec.output_splitter() {
                    steps.push(Step::Map {
                        map: beam_splitter(&t3),
                        modes: vec![0, 1],
                    });
                }
            }
            Topology::Mzi => {
                self.mzi_steps(0, 1, delta, epsilon, &mut steps)?;
                if let Some(t3) = spec.output_splitter() {
                    steps.push(Step::Map {
                        map: beam_splitter(&t3),
                        modes: vec![1, 2],
                    });
                }
            }
            Topology::NestedSui => {
                let (g1, g2) = spec.amplifiers()?;
                steps.push(Step::Stage(StageLabel::Input));
                // (a0, b0) → (C, b_in)
                steps.push(Step::Map {
                    map: two_mode_squeezer(&g1),
                    modes: vec![0, 1],
                });
                steps.push(Step::Stage(StageLabel::AfterFirstAmplifier));
                self.mzi_steps(2, 1, delta, epsilon, &mut steps)?;
                steps.push(Step::Stage(StageLabel::AfterEncoding));
                if spec.phi != 0.0 {
                    steps.push(Step::Map {
                        map: phase_shifter(spec.phi),
                        modes: vec![0],
                    });
                }
                // (C e^{iφ}, b_out) → (d1, d2)
                steps.push(Step::Map {
                    map: two_mode_squeezer(&g2),
                    modes: vec![0, 1],
                });
                steps.push(Step::Stage(StageLabel::AfterSecondAmplifier));
            }
            Topology::DegenerateSui => {
                let (g1, g2) = spec.amplifiers()?;
                steps.push(Step::Stage(StageLabel::Input));
                steps.push(Step::Map {
                    map: single_mode_squeezer(&g1),
                    modes: vec![0],
                });
                steps.push(Step::Stage(StageLabel::AfterFirstAmplifier));
                self.mzi_steps(1, 0, delta, epsilon, &mut steps)?;
                steps.push(Step::Stage(StageLabel::AfterEncoding));
                steps.push(Step::Map {
                    map: single_mode_squeezer(&g2),
                    modes: vec![0],
                });
                steps.push(Step::Stage(StageLabel::AfterSecondAmplifier));
            }
        }
        if spec.detection_loss < 1.0 {
            let mut detected: Vec<usize> = self.outputs.iter().map(|o| o.mode).collect();
            detected.sort_unstable();
            detected.dedup();
            for mode in detected {
                steps.push(Step::Map {
                    map: loss_channel(spec.detection_loss)?,
                    modes: vec![mode],
                });
            }
        }
        Ok(steps)
    }

    /// Runs the circuit at modulation depths `(delta, epsilon)`.
    pub fn evaluate(&self, delta: f64, epsilon: f64) -> Result<Trace> {
        let mut state = self.input_state();
        let mut stages = Vec::new();
        for step in self.steps(delta, epsilon)? {
            state = match step {
                Step::Map { map, modes } => state.apply_map(&map, &modes)?,
                Step::Mean { linear, modes, .. } => state.map_mean(&linear, &modes)?,
                Step::Stage(label) => {
                    stages.push((label, state.clone()));
                    state
                }
            };
        }
        Ok(Trace { state, stages })
    }

    /// Final state at the circuit's own operating point.
    pub fn run(&self) -> Result<GaussianState> {
        Ok(self.evaluate(self.spec.delta, self.spec.epsilon)?.state)
    }

    /// Exact derivative of the output mean with respect to `parameter`, in
    /// linearized mode. Forward-mode propagation of a tangent vector through
    /// the step list.
    pub fn mean_tangent(&self, parameter: Parameter) -> Result<DVector<f64>> {
        if self.spec.modulation_mode != ModulationMode::Linearized {
            return Err(Error::invalid("analytic tangents need linearized modulation"));
        }
        if parameter == Parameter::Joint {
            let norm = self.spec.delta.hypot(self.spec.epsilon);
            if norm == 0.0 {
                return Err(Error::invalid("joint direction undefined at delta = epsilon = 0"));
            }
            let d = self.mean_tangent(Parameter::Delta)?;
            let e = self.mean_tangent(Parameter::Epsilon)?;
            return Ok(d * (self.spec.delta / norm) + e * (self.spec.epsilon / norm));
        }
        let mut state = self.input_state();
        let mut tangent = DVector::zeros(2 * self.n_modes());
        for step in self.steps(self.spec.delta, self.spec.epsilon)? {
            match step {
                Step::Map { map, modes } => {
                    let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
                    let sub = DVector::from_iterator(idx.len(), idx.iter().map(|&g| tangent[g]));
                    let out = map.linear() * sub;
                    for (i, &g) in idx.iter().enumerate() {
                        tangent[g] = out[i];
                    }
                    state = state.apply_map(&map, &modes)?;
                }
                Step::Mean {
                    linear,
                    d_delta,
                    d_epsilon,
                    modes,
                } => {
                    let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
                    let t = DVector::from_iterator(idx.len(), idx.iter().map(|&g| tangent[g]));
                    let m = DVector::from_iterator(idx.len(), idx.iter().map(|&g| state.mean()[g]));
                    let dl = match parameter {
                        Parameter::Delta => &d_delta,
                        _ => &d_epsilon,
                    };
                    let out = &linear * t + dl * m;
                    for (i, &g) in idx.iter().enumerate() {
                        tangent[g] = out[i];
                    }
                    state = state.map_mean(&linear, &modes)?;
                }
                Step::Stage(_) => {}
            }
        }
        Ok(tangent)
    }

    /// Composition of every element at `(delta, epsilon)` as one map on all
    /// modes. Fails if a non-trivial mean-only step is present.
    pub fn end_to_end_map(&self, delta: f64, epsilon: f64) -> Result<GaussianMap> {
        let n = self.n_modes();
        let mut total = GaussianMap::identity(n);
        for step in self.steps(delta, epsilon)? {
            match step {
                Step::Map { map, modes } => total = total.then(&map.embed(&modes, n)?)?,
                Step::Mean { linear, .. } => {
                    if linear != DMatrix::identity(linear.nrows(), linear.ncols()) {
                        return Err(Error::invalid(
                            "mean-only modulation has no channel representation",
                        ));
                    }
                }
                Step::Stage(_) => {}
            }
        }
        Ok(total)
    }

    /// Snapshots of the probe mode at the four stages of the degenerate
    /// SU(1,1) interferometer, evaluated at the circuit's operating point.
    pub fn stage_snapshots(&self) -> Result<Vec<StageSnapshot>> {
        if self.spec.topology != Topology::DegenerateSui {
            return Err(Error::invalid(format!(
                "stage snapshots are defined for degenerate_sui, not {:?}",
                self.spec.topology
            )));
        }
        let probe = self.probe.expect("degenerate SUI has a probe mode");
        let trace = self.evaluate(self.spec.delta, self.spec.epsilon)?;
        trace
            .stages
            .into_iter()
            .map(|(label, state)| {
                let reduced = state.reduced(&[probe])?;
                let ellipse = Ellipse::of_mode(&reduced, 0)?;
                Ok(StageSnapshot {
                    label,
                    state: reduced,
                    ellipse,
                })
            })
            .collect()
    }
}

fn out(name: &'static str, mode: usize, angle: f64, parameter: Parameter) -> Output {
    Output {
        name,
        mode,
        angle,
        parameter,
    }
}

fn expect_topology(spec: &CircuitSpec, want: Topology) -> Result<Circuit> {
    if spec.topology != want {
        return Err(Error::invalid(format!(
            "expected topology {want:?}, got {:?}",
            spec.topology
        )));
    }
    Circuit::compile(spec)
}

pub fn build_mzi(spec: &CircuitSpec) -> Result<Circuit> {
    expect_topology(spec, Topology::Mzi)
}

pub fn build_nested_sui(spec: &CircuitSpec) -> Result<Circuit> {
    expect_topology(spec, Topology::NestedSui)
}

pub fn build_degenerate_sui(spec: &CircuitSpec) -> Result<Circuit> {
    expect_topology(spec, Topology::DegenerateSui)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn var(c: &Circuit, name: &str) -> f64 {
        let o = c.output(name).unwrap();
        c.evaluate(0.0, 0.0)
            .unwrap()
            .state
            .quadrature_stats(o.mode, o.angle)
            .unwrap()
            .1
    }

    #[test]
    fn balanced_mzi_passes_light_through_at_dark_fringe() {
        let c = build_mzi(&CircuitSpec::mzi(2.0, 0.5)).unwrap();
        let out = c.run().unwrap();
        assert_relative_eq!(out.mean()[0], 4.0, epsilon = 1e-14);
        assert!(out.mean()[1].abs() < 1e-14);
        assert!(out.mean().rows(2, 2).norm() < 1e-14);
        assert!((out.cov() - DMatrix::<f64>::identity(4, 4)).abs().max() < 1e-14);
    }

    #[test]
    fn mzi_dark_port_signal() {
        let spec = CircuitSpec::mzi(100.0, 0.99).with_modulation(1e-3, 0.0);
        let c = build_mzi(&spec).unwrap();
        let s = c.run().unwrap();
        let (y, _) = s.quadrature_stats(1, FRAC_PI_2).unwrap();
        let expected = 2.0 * 100.0 * 1e-3 * (0.99_f64 * 0.01).sqrt();
        assert_relative_eq!(expected, 0.019_899_748_742_132_4, epsilon = 1e-12);
        // literal algebra of the splitter relations puts a minus sign on ⟨Y⟩
        assert_relative_eq!(y, -expected, max_relative = 1e-12);

        let c = build_mzi(&CircuitSpec::mzi(100.0, 0.99).with_modulation(0.0, 1e-3)).unwrap();
        let s = c.run().unwrap();
        let (x, _) = s.quadrature_stats(1, 0.0).unwrap();
        let (y, _) = s.quadrature_stats(1, FRAC_PI_2).unwrap();
        assert_relative_eq!(x, expected, max_relative = 1e-12);
        assert!(y.abs() < 1e-15);
    }

    #[test]
    fn nested_sui_noise_examples() {
        let c = build_nested_sui(&CircuitSpec::nested_sui(10.0, 0.9, 5.0 / 3.0, 5.0 / 3.0)).unwrap();
        assert_relative_eq!(var(&c, "d1_y"), 1.0, max_relative = 1e-12);
        assert_relative_eq!(var(&c, "d2_x"), 1.0, max_relative = 1e-12);

        let mut spec = CircuitSpec::nested_sui(10.0, 0.9, 5.0 / 3.0, 5.0 / 3.0);
        spec.phi = 0.0;
        let c = build_nested_sui(&spec).unwrap();
        assert_relative_eq!(var(&c, "d1_y"), 3281.0 / 81.0, max_relative = 1e-12);

        let c = build_nested_sui(&CircuitSpec::nested_sui(10.0, 0.9, 1.0, 1.0).with_modulation(1e-3, 0.0))
            .unwrap();
        assert_relative_eq!(var(&c, "d1_y"), 1.0, max_relative = 1e-12);
        // identity amplifiers: d1 = e^{iπ} C with C vacuum, d2 = b_out
        let (x, _) = c.run().unwrap().quadrature_stats(1, FRAC_PI_2).unwrap();
        assert_relative_eq!(x, -2.0 * 10.0 * 1e-3 * (0.09_f64).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn degenerate_sui_noise_examples() {
        let spec = CircuitSpec::degenerate_sui(3.0, 0.99, 5.0 / 3.0, PI, 1.25, 0.0);
        let c = build_degenerate_sui(&spec).unwrap();
        assert_relative_eq!(var(&c, "cal_x"), 4.0 / 9.0, max_relative = 1e-12);
        assert_relative_eq!(var(&c, "cal_y"), 9.0 / 4.0, max_relative = 1e-12);

        let spec = CircuitSpec::degenerate_sui(3.0, 0.99, 1.4, PI, 1.4, 0.0);
        let c = build_degenerate_sui(&spec).unwrap();
        assert_relative_eq!(var(&c, "cal_x"), 1.0, max_relative = 1e-12);
        assert_relative_eq!(var(&c, "cal_y"), 1.0, max_relative = 1e-12);

        let g1 = PaGain::new(5.0 / 3.0, PI).unwrap();
        let spec = CircuitSpec::degenerate_sui(3.0, 0.99, 5.0 / 3.0, PI, 1.0, 0.0);
        let c = build_degenerate_sui(&spec).unwrap();
        assert_relative_eq!(var(&c, "cal_x"), (g1.gain() - g1.amp()).powi(2), max_relative = 1e-12);
    }

    #[test]
    fn builders_check_topology_and_parameters() {
        let spec = CircuitSpec::mzi(1.0, 0.5);
        assert!(build_nested_sui(&spec).is_err());
        let mut missing = CircuitSpec::nested_sui(1.0, 0.5, 1.2, 1.2);
        missing.gains.pop();
        assert!(matches!(build_nested_sui(&missing), Err(Error::InvalidArgument(_))));
        let mut missing = CircuitSpec::mzi(1.0, 0.5);
        missing.splitters.pop();
        assert!(build_mzi(&missing).is_err());
        let big = CircuitSpec::mzi(1.0, 0.5).with_modulation(0.2, 0.0);
        assert!(build_mzi(&big).is_err());
        assert!(build_mzi(&big.with_mode(ModulationMode::Exact)).is_ok());
        let exact_limit = CircuitSpec::mzi(1.0, 0.5)
            .with_mode(ModulationMode::Exact)
            .with_mzi_model(MziModel::DarkPortLimit);
        assert!(build_mzi(&exact_limit).is_err());
    }

    #[test]
    fn stage_snapshot_examples() {
        let spec = CircuitSpec::degenerate_sui(1.0, 0.99, 5.0 / 3.0, PI, 5.0 / 3.0, 0.0)
            .with_modulation(1e-3, 1e-3);
        let snaps = build_degenerate_sui(&spec).unwrap().stage_snapshots().unwrap();
        assert_eq!(snaps.len(), 4);
        let a = snaps[0].ellipse;
        assert_eq!((a.center_x, a.center_y), (0.0, 0.0));
        assert_relative_eq!(a.major_variance, 1.0);
        assert_relative_eq!(a.minor_variance, 1.0);

        let b = snaps[1].ellipse;
        assert_relative_eq!(b.major_variance, 9.0, max_relative = 1e-12);
        assert_relative_eq!(b.minor_variance, 1.0 / 9.0, max_relative = 1e-12);
        assert_relative_eq!(b.orientation, FRAC_PI_2, epsilon = 1e-12);

        let d = snaps[3].ellipse;
        assert_relative_eq!(d.major_variance, 1.0, max_relative = 1e-12);
        assert_relative_eq!(d.minor_variance, 1.0, max_relative = 1e-12);
        assert!(d.center_x.hypot(d.center_y) > snaps[2].ellipse.center_x.hypot(snaps[2].ellipse.center_y));

        let nested = build_nested_sui(&CircuitSpec::nested_sui(1.0, 0.5, 1.2, 1.2)).unwrap();
        assert!(nested.stage_snapshots().is_err());
    }
}
