//! Signal, noise and SNR extraction from compiled circuits, together with
//! the closed-form expressions they are checked against.

use num_complex::Complex64;
use serde::Serialize;

use crate::elements::PaGain;
use crate::error::{Error, Result};
use crate::interferometer::{
    Circuit, CircuitSpec, ModulationMode, Output, Parameter, Topology, SMALL_MODULATION_LIMIT,
};

/// Default central-difference half-width for exact-mode slopes.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Relative agreement required between successive finite-difference
/// estimates before a slope is accepted.
pub const SLOPE_AGREEMENT: f64 = 1e-7;

/// Signal, noise and SNR of one monitored quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrReport {
    pub quadrature: String,
    pub parameter: Parameter,
    /// `d⟨X_θ⟩/d(parameter)` at zero modulation.
    pub signal_slope: f64,
    /// Modulation depth the signal is evaluated at.
    pub value: f64,
    pub signal: f64,
    pub noise_var: f64,
    pub snr: f64,
    /// Phase-sensing photon number `R|α|²`.
    pub i_ps: f64,
    /// SNR relative to the classical unsplit baseline `4·I_ps·value²`.
    /// Computed per unit modulation, so it is defined at `value = 0` too;
    /// `None` when `I_ps = 0`.
    pub enhancement: Option<f64>,
}

/// `γ₋ = −ε cos(θ₂/2) + δ sin(θ₂/2)`, `γ₊ = ε sin(θ₂/2) + δ cos(θ₂/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureAngle {
    pub theta2: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

impl MixtureAngle {
    pub fn new(theta2: f64, delta: f64, epsilon: f64) -> Self {
        let (s, c) = (theta2 / 2.0).sin_cos();
        MixtureAngle {
            theta2,
            gamma_minus: -epsilon * c + delta * s,
            gamma_plus: epsilon * s + delta * c,
        }
    }
}

fn output_mean(circuit: &Circuit, output: &Output, delta: f64, epsilon: f64) -> Result<f64> {
    let state = circuit.evaluate(delta, epsilon)?.state;
    Ok(state.quadrature_stats(output.mode, output.angle)?.0)
}

fn check_finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("{what} is not finite ({v})")))
    }
}

fn accept(coarse: f64, fine: f64, refined: f64, f_scale: f64, h: f64) -> Result<f64> {
    let rounding = 64.0 * f64::EPSILON * f_scale / h;
    let tol = SLOPE_AGREEMENT * refined.abs().max(1.0) + rounding;
    if (coarse - fine).abs() > tol {
        return Err(Error::Numerical(format!(
            "finite-difference slope did not converge ({coarse:.12e} vs {fine:.12e})"
        )));
    }
    check_finite(refined, "slope")
}

/// Central difference in δ with one Richardson refinement.
fn slope_delta_fd(circuit: &Circuit, output: &Output, h: f64) -> Result<f64> {
    let f = |d: f64| output_mean(circuit, output, d, 0.0);
    let f0 = f(0.0)?;
    let central = |h: f64| -> Result<f64> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    let d1 = central(h)?;
    let d2 = central(h / 2.0)?;
    let refined = (4.0 * d2 - d1) / 3.0;
    accept(d1, d2, refined, f0.abs().max(1.0), h)
}

/// One-sided difference in ε (the amplitude modulator has no physical
/// continuation to ε < 0), with two Richardson levels.
fn slope_epsilon_fd(circuit: &Circuit, output: &Output, h: f64) -> Result<f64> {
    let f0 = output_mean(circuit, output, 0.0, 0.0)?;
    let forward = |h: f64| -> Result<f64> { Ok((output_mean(circuit, output, 0.0, h)? - f0) / h) };
    let (f1, f2, f4) = (forward(h)?, forward(h / 2.0)?, forward(h / 4.0)?);
    let r1 = 2.0 * f2 - f1;
    let r2 = 2.0 * f4 - f2;
    let refined = (4.0 * r2 - r1) / 3.0;
    accept(r1, r2, refined, f0.abs().max(1.0), h / 4.0)
}

/// `d⟨X_θ⟩/d(parameter)` at zero modulation. Exact (tangent propagation) in
/// linearized mode; Richardson-checked finite differences in exact mode.
pub fn signal_slope(circuit: &Circuit, parameter: Parameter, output: &Output, step: f64) -> Result<f64> {
    if output.mode >= circuit.n_modes() {
        return Err(Error::invalid(format!("output mode {} out of range", output.mode)));
    }
    let spec = circuit.spec();
    let slope = match spec.modulation_mode {
        ModulationMode::Linearized => {
            let tangent = circuit.mean_tangent(parameter)?;
            let (s, c) = output.angle.sin_cos();
            c * tangent[2 * output.mode] + s * tangent[2 * output.mode + 1]
        }
        ModulationMode::Exact => {
            if !(step > 0.0) {
                return Err(Error::invalid(format!("finite-difference step {step} must be > 0")));
            }
            match parameter {
                Parameter::Delta => slope_delta_fd(circuit, output, step)?,
                Parameter::Epsilon => slope_epsilon_fd(circuit, output, step)?,
                Parameter::Joint => {
                    let norm = spec.delta.hypot(spec.epsilon);
                    if norm == 0.0 {
                        return Err(Error::invalid("joint direction undefined at delta = epsilon = 0"));
                    }
                    let mut s = 0.0;
                    if spec.delta != 0.0 {
                        s += spec.delta / norm * slope_delta_fd(circuit, output, step)?;
                    }
                    if spec.epsilon != 0.0 {
                        s += spec.epsilon / norm * slope_epsilon_fd(circuit, output, step)?;
                    }
                    s
                }
            }
        }
    };
    check_finite(slope, "slope")
}

/// Variance of the monitored quadrature at zero modulation.
pub fn output_noise(circuit: &Circuit, output: &Output) -> Result<f64> {
    let state = circuit.evaluate(0.0, 0.0)?.state;
    let var = state.quadrature_stats(output.mode, output.angle)?.1;
    if !(var > 0.0) {
        return Err(Error::InternalConsistency(format!(
            "non-positive output variance {var}"
        )));
    }
    Ok(var)
}

/// SNR of `output` for a modulation of depth `value` in `parameter`.
/// Detection loss in the circuit description is part of the circuit, so the slope carries
/// `√η` and the noise becomes `η·V + 1 − η`.
pub fn snr_numeric(circuit: &Circuit, parameter: Parameter, output: &Output, value: f64) -> Result<SnrReport> {
    if !(value.abs() < SMALL_MODULATION_LIMIT) {
        return Err(Error::invalid(format!(
            "modulation {value} outside the linear regime |value| < {SMALL_MODULATION_LIMIT}"
        )));
    }
    let slope = signal_slope(circuit, parameter, output, DEFAULT_STEP)?;
    let noise = output_noise(circuit, output)?;
    let i_ps = circuit.spec().i_ps();
    let signal = slope * value;
    let per_unit = slope * slope / noise;
    Ok(SnrReport {
        quadrature: output.name.to_string(),
        parameter,
        signal_slope: slope,
        value,
        signal,
        noise_var: noise,
        snr: signal * signal / noise,
        i_ps,
        enhancement: (i_ps > 0.0).then(|| per_unit / (4.0 * i_ps)),
    })
}

/// Modulation depth an output reads at the circuit's operating point.
pub fn parameter_value(spec: &CircuitSpec, parameter: Parameter) -> f64 {
    match parameter {
        Parameter::Delta => spec.delta,
        Parameter::Epsilon => spec.epsilon,
        Parameter::Joint => spec.delta.hypot(spec.epsilon),
    }
}

/// [`snr_numeric`] for every monitored output at the circuit's own δ, ε.
pub fn reports(circuit: &Circuit) -> Result<Vec<SnrReport>> {
    circuit
        .outputs()
        .iter()
        .map(|o| {
            let value = parameter_value(circuit.spec(), o.parameter);
            snr_numeric(circuit, o.parameter, o, value)
        })
        .collect()
}

/// Closed-form expressions, keyed by the quantity they describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Formula {
    /// Mach-Zehnder dark-port SNRs `(4T·I_ps·δ², 4T·I_ps·ε²)`.
    Su2Snr,
    /// Nested SU(1,1) output noise
    /// `(G₁² + g₁²)(G₂² + g₂²) + 4G₁G₂g₁g₂ cos φ`.
    SuiNoise,
    /// Nested SU(1,1) SNRs `(4g₂²·I_ps·δ², 4G₂²·I_ps·ε²) / noise(φ)`. With
    /// `φ = π` (default) the denominator is
    /// `(G₂G₁ − g₁g₂)² + (G₁g₂ − G₂g₁)²`.
    SuiSnr,
    /// Large-`G₂` optimum `(2·I_ps·δ²(G₁ + g₁)², 2·I_ps·ε²(G₁ + g₁)²)`.
    SuiOptimum,
    /// Classical joint measurement with an output splitter,
    /// `(4T₃·I_ps·δ², 4R₃·I_ps·ε²)`.
    SplitT3,
    /// Degenerate SU(1,1) noise `((G₂ + g₂)²|G₁ + g₁e^{−iΔ}|², (G₂ − g₂)²|G₁ − g₁e^{−iΔ}|²)`;
    /// at the default `Δ = π`, `((G₂ + g₂)²(G₁ − g₁)², (G₂ − g₂)²(G₁ + g₁)²)`.
    DsuiNoise,
    /// Degenerate SU(1,1) SNRs; at `Δ = π`,
    /// `(4·I_ps·γ₋²(G₁ + g₁)², 4·I_ps·γ₊²(G₁ − g₁)²)`.
    DsuiSnr,
}

/// Inputs to [`snr_analytic`]; each formula reads the fields it needs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnalyticParams {
    pub t: Option<f64>,
    pub t3: Option<f64>,
    pub i_ps: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub g1: Option<PaGain>,
    pub g2: Option<PaGain>,
    /// Nested SU(1,1) phase; defaults to `π`.
    pub phi: Option<f64>,
    pub theta2: Option<f64>,
    /// Degenerate SU(1,1) total phase `Δ = θ₁ − θ₂`; defaults to `π`.
    pub sui_delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ClosedForm {
    Scalar(f64),
    Pair(f64, f64),
}

impl ClosedForm {
    pub fn first(&self) -> f64 {
        match *self {
            ClosedForm::Scalar(v) | ClosedForm::Pair(v, _) => v,
        }
    }

    pub fn second(&self) -> Option<f64> {
        match *self {
            ClosedForm::Scalar(_) => None,
            ClosedForm::Pair(_, v) => Some(v),
        }
    }
}

fn need<T>(v: Option<T>, formula: Formula, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::invalid(format!("{formula:?} needs parameter {name}")))
}

fn sui_noise(g1: &PaGain, g2: &PaGain, phi: f64) -> f64 {
    let (big1, small1, big2, small2) = (g1.gain(), g1.amp(), g2.gain(), g2.amp());
    (big1 * big1 + small1 * small1) * (big2 * big2 + small2 * small2)
        + 4.0 * big1 * big2 * small1 * small2 * phi.cos()
}

/// Evaluates one closed form.
pub fn snr_analytic(formula: Formula, p: &AnalyticParams) -> Result<ClosedForm> {
    use Formula::*;
    let value = match formula {
        Su2Snr => {
            let t = need(p.t, formula, "t")?;
            let i = need(p.i_ps, formula, "i_ps")?;
            let (d, e) = (need(p.delta, formula, "delta")?, need(p.epsilon, formula, "epsilon")?);
            ClosedForm::Pair(4.0 * t * i * d * d, 4.0 * t * i * e * e)
        }
        SuiNoise => {
            let g1 = need(p.g1, formula, "g1")?;
            let g2 = need(p.g2, formula, "g2")?;
            let phi = need(p.phi, formula, "phi")?;
            ClosedForm::Scalar(sui_noise(&g1, &g2, phi))
        }
        SuiSnr => {
            let g1 = need(p.g1, formula, "g1")?;
            let g2 = need(p.g2, formula, "g2")?;
            let i = need(p.i_ps, formula, "i_ps")?;
            let (d, e) = (need(p.delta, formula, "delta")?, need(p.epsilon, formula, "epsilon")?);
            let denom = match p.phi {
                None => {
                    let (big1, small1, big2, small2) = (g1.gain(), g1.amp(), g2.gain(), g2.amp());
                    (big2 * big1 - small1 * small2).powi(2) + (big1 * small2 - big2 * small1).powi(2)
                }
                Some(phi) => sui_noise(&g1, &g2, phi),
            };
            ClosedForm::Pair(
                4.0 * g2.amp().powi(2) * i * d * d / denom,
                4.0 * g2.gain().powi(2) * i * e * e / denom,
            )
        }
        SuiOptimum => {
            let g1 = need(p.g1, formula, "g1")?;
            let i = need(p.i_ps, formula, "i_ps")?;
            let (d, e) = (need(p.delta, formula, "delta")?, need(p.epsilon, formula, "epsilon")?);
            let q = g1.stretch().powi(2);
            ClosedForm::Pair(2.0 * i * d * d * q, 2.0 * i * e * e * q)
        }
        SplitT3 => {
            let t3 = need(p.t3, formula, "t3")?;
            let i = need(p.i_ps, formula, "i_ps")?;
            let (d, e) = (need(p.delta, formula, "delta")?, need(p.epsilon, formula, "epsilon")?);
            ClosedForm::Pair(4.0 * t3 * i * d * d, 4.0 * (1.0 - t3) * i * e * e)
        }
        DsuiNoise => {
            let g1 = need(p.g1, formula, "g1")?;
            let g2 = need(p.g2, formula, "g2")?;
            let (plus2, minus2) = (g2.stretch().powi(2), (g2.gain() - g2.amp()).powi(2));
            match p.sui_delta {
                None => ClosedForm::Pair(
                    plus2 * (g1.gain() - g1.amp()).powi(2),
                    minus2 * g1.stretch().powi(2),
                ),
                Some(dl) => {
                    let rot = Complex64::from_polar(g1.amp(), -dl);
                    ClosedForm::Pair(
                        plus2 * (g1.gain() + rot).norm_sqr(),
                        minus2 * (g1.gain() - rot).norm_sqr(),
                    )
                }
            }
        }
        DsuiSnr => {
            let g1 = need(p.g1, formula, "g1")?;
            let theta2 = need(p.theta2, formula, "theta2")?;
            let i = need(p.i_ps, formula, "i_ps")?;
            let (d, e) = (need(p.delta, formula, "delta")?, need(p.epsilon, formula, "epsilon")?);
            let mix = MixtureAngle::new(theta2, d, e);
            let (gm2, gp2) = (mix.gamma_minus.powi(2), mix.gamma_plus.powi(2));
            match p.sui_delta {
                None => ClosedForm::Pair(
                    4.0 * i * gm2 * g1.stretch().powi(2),
                    4.0 * i * gp2 * (g1.gain() - g1.amp()).powi(2),
                ),
                Some(dl) => {
                    let rot = Complex64::from_polar(g1.amp(), -dl);
                    ClosedForm::Pair(
                        4.0 * i * gm2 / (g1.gain() + rot).norm_sqr(),
                        4.0 * i * gp2 / (g1.gain() - rot).norm_sqr(),
                    )
                }
            }
        }
    };
    Ok(value)
}

/// Closed-form counterpart of each monitored output of `spec`, in output
/// order, when one exists.
pub fn analytic_counterparts(spec: &CircuitSpec) -> Result<Vec<Option<f64>>> {
    let i_ps = spec.i_ps();
    let mut p = AnalyticParams {
        i_ps: Some(i_ps),
        delta: Some(spec.delta),
        epsilon: Some(spec.epsilon),
        ..Default::default()
    };
    let eta = spec.detection_loss;
    let pair = |v: ClosedForm| vec![Some(v.first()), v.second()];
    let values = match spec.topology {
        Topology::DirectHomodyne => match spec.output_splitter() {
            Some(t3) => {
                p.t3 = Some(t3.t());
                pair(snr_analytic(Formula::SplitT3, &p)?)
            }
            None => {
                p.t = Some(1.0);
                pair(snr_analytic(Formula::Su2Snr, &p)?)
            }
        },
        Topology::Mzi => match spec.output_splitter() {
            Some(t3) => {
                p.t3 = Some(t3.t());
                pair(snr_analytic(Formula::SplitT3, &p)?)
            }
            None => {
                p.t = Some(spec.splitters[0].t());
                pair(snr_analytic(Formula::Su2Snr, &p)?)
            }
        },
        Topology::NestedSui => {
            p.g1 = Some(spec.gains[0]);
            p.g2 = Some(spec.gains[1]);
            p.phi = Some(spec.phi);
            pair(snr_analytic(Formula::SuiSnr, &p)?)
        }
        Topology::DegenerateSui => {
            p.g1 = Some(spec.gains[0]);
            p.theta2 = Some(spec.gains[1].phase());
            p.sui_delta = Some(spec.gains[0].phase() - spec.gains[1].phase());
            pair(snr_analytic(Formula::DsuiSnr, &p)?)
        }
    };
    if eta < 1.0 {
        // detection loss: scale by η·V / (η·V + 1 − η) using the lossless noise
        let lossless = Circuit::compile(&spec.clone().with_detection_loss(1.0))?;
        return lossless
            .outputs()
            .iter()
            .zip(values)
            .map(|(o, v)| {
                let noise = output_noise(&lossless, o)?;
                Ok(v.map(|v| v * retention(eta, noise)))
            })
            .collect();
    }
    Ok(values)
}

/// Fraction of SNR kept after detection efficiency `eta` on an output whose
/// lossless noise variance is `noise`.
pub fn retention(eta: f64, noise: f64) -> f64 {
    eta * noise / (eta * noise + 1.0 - eta)
}

/// Enhancement per channel and the total resource spent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceSummary {
    pub enhancements: Vec<f64>,
    /// `Σ SNR_k / value_k²`.
    pub total: f64,
    /// `4·I_ps·(G₁ + g₁)²`.
    pub bound: f64,
}

impl ResourceSummary {
    pub fn fraction_of_bound(&self) -> f64 {
        self.total / self.bound
    }
}

/// Splits the total resource between the channels of one run.
pub fn enhancement_and_resources(reports: &[SnrReport], i_ps: f64, g1: &PaGain) -> Result<ResourceSummary> {
    if reports.is_empty() {
        return Err(Error::invalid("need at least one report"));
    }
    if !(i_ps > 0.0) {
        return Err(Error::invalid("resource accounting needs I_ps > 0"));
    }
    let mut total = 0.0;
    let mut enhancements = Vec::with_capacity(reports.len());
    for r in reports {
        if r.value == 0.0 {
            return Err(Error::invalid(format!(
                "report {} has zero modulation; per-unit resource undefined",
                r.quadrature
            )));
        }
        let per_unit = r.snr / (r.value * r.value);
        total += per_unit;
        enhancements.push(per_unit / (4.0 * i_ps));
    }
    Ok(ResourceSummary {
        enhancements,
        total,
        bound: 4.0 * i_ps * g1.stretch().powi(2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossRow {
    /// `G₂`
    pub gain2: f64,
    /// Output noise without detection loss.
    pub lossless_noise: f64,
    /// SNR per unit modulation squared, without and with loss.
    pub snr_lossless: f64,
    pub snr_lossy: f64,
    /// `snr_lossy / snr_lossless`, from the simulated lossy detector.
    pub ratio: f64,
    /// `η·V / (η·V + 1 − η)`.
    pub ratio_formula: f64,
}

/// Detection-loss tolerance of the first monitored output as `G₂` varies.
pub fn loss_tolerance_scan(spec: &CircuitSpec, eta: f64, g2_values: &[f64]) -> Result<Vec<LossRow>> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid(format!("detection efficiency {eta} outside (0, 1]")));
    }
    if !matches!(spec.topology, Topology::NestedSui | Topology::DegenerateSui) {
        return Err(Error::invalid("loss tolerance scan needs an SU(1,1) topology"));
    }
    g2_values
        .iter()
        .map(|&gain2| {
            let mut base = spec.clone().with_detection_loss(1.0);
            if base.gains.len() != 2 {
                return Err(Error::invalid("circuit needs two amplifier gains"));
            }
            base.gains[1] = PaGain::new(gain2, base.gains[1].phase())?;
            let lossless = Circuit::compile(&base)?;
            let lossy = Circuit::compile(&base.clone().with_detection_loss(eta))?;
            let per_unit = |c: &Circuit| -> Result<(f64, f64)> {
                let o = &c.outputs()[0];
                let slope = signal_slope(c, o.parameter, o, DEFAULT_STEP)?;
                let noise = output_noise(c, o)?;
                Ok((slope * slope / noise, noise))
            };
            let (snr_lossless, v) = per_unit(&lossless)?;
            let (snr_lossy, _) = per_unit(&lossy)?;
            Ok(LossRow {
                gain2,
                lossless_noise: v,
                snr_lossless,
                snr_lossy,
                ratio: snr_lossy / snr_lossless,
                ratio_formula: retention(eta, v),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn gain(g: f64) -> PaGain {
        PaGain::new(g, 0.0).unwrap()
    }

    #[test]
    fn mixture_angle_identity() {
        for k in 0..16 {
            let m = MixtureAngle::new(k as f64 * 0.41, 0.3, -0.7);
            assert_relative_eq!(
                m.gamma_minus.powi(2) + m.gamma_plus.powi(2),
                0.58,
                max_relative = 1e-12
            );
        }
        let pure_am = MixtureAngle::new(0.0, 0.01, 0.02);
        assert_relative_eq!(pure_am.gamma_minus, -0.02);
        let pure_pm = MixtureAngle::new(PI, 0.01, 0.02);
        assert_relative_eq!(pure_pm.gamma_minus, 0.01, epsilon = 1e-17);
    }

    #[test]
    fn analytic_examples() {
        let p = AnalyticParams {
            g1: Some(gain(5.0 / 3.0)),
            g2: Some(gain(5.0 / 3.0)),
            i_ps: Some(100.0),
            delta: Some(0.01),
            epsilon: Some(0.01),
            ..Default::default()
        };
        let v = snr_analytic(Formula::SuiSnr, &p).unwrap();
        assert_relative_eq!(v.first(), 4.0 * 16.0 / 9.0 * 100.0 * 1e-4, max_relative = 1e-12);
        assert_relative_eq!(v.first(), 0.071_111_111_111, max_relative = 1e-10);

        let p1 = AnalyticParams {
            g1: Some(gain(1.0)),
            ..p
        };
        let v = snr_analytic(Formula::SuiOptimum, &p1).unwrap();
        assert_relative_eq!(v.first(), 2.0 * 100.0 * 1e-4);

        let pd = AnalyticParams {
            theta2: Some(PI),
            epsilon: Some(0.0),
            ..p
        };
        let v = snr_analytic(Formula::DsuiSnr, &pd).unwrap();
        assert_relative_eq!(v.first(), 0.36, max_relative = 1e-12);

        let ps = AnalyticParams {
            t3: Some(0.25),
            ..p
        };
        assert_eq!(
            snr_analytic(Formula::SplitT3, &ps).unwrap(),
            ClosedForm::Pair(0.01, 0.03)
        );
    }

    #[test]
    fn printed_denominators_match_general_forms() {
        for &(a, b) in &[(1.0, 1.0), (1.2, 3.0), (5.0 / 3.0, 5.0 / 4.0), (2.0, 7.0)] {
            let p = AnalyticParams {
                g1: Some(gain(a)),
                g2: Some(gain(b)),
                i_ps: Some(3.0),
                delta: Some(0.02),
                epsilon: Some(0.01),
                theta2: Some(0.7),
                ..Default::default()
            };
            let printed = snr_analytic(Formula::SuiSnr, &p).unwrap();
            let general = snr_analytic(Formula::SuiSnr, &AnalyticParams { phi: Some(PI), ..p }).unwrap();
            assert_relative_eq!(printed.first(), general.first(), max_relative = 1e-12);
            let printed = snr_analytic(Formula::DsuiNoise, &p).unwrap();
            let general =
                snr_analytic(Formula::DsuiNoise, &AnalyticParams { sui_delta: Some(PI), ..p }).unwrap();
            assert_relative_eq!(printed.first(), general.first(), max_relative = 1e-12);
            assert_relative_eq!(printed.second().unwrap(), general.second().unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn incomplete_parameters_are_rejected() {
        let p = AnalyticParams::default();
        for f in [
            Formula::Su2Snr,
            Formula::SuiNoise,
            Formula::SuiSnr,
            Formula::SuiOptimum,
            Formula::SplitT3,
            Formula::DsuiNoise,
            Formula::DsuiSnr,
        ] {
            assert!(matches!(snr_analytic(f, &p), Err(Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn mzi_snr_example() {
        let spec = CircuitSpec::mzi(1000.0, 0.99).with_modulation(1e-3, 0.0);
        let c = Circuit::compile(&spec).unwrap();
        let o = c.output("bout_y").unwrap();
        let r = snr_numeric(&c, Parameter::Delta, o, 1e-3).unwrap();
        assert_relative_eq!(r.i_ps, 1e4, max_relative = 1e-12);
        // 4·T·I_ps·δ² = 4 · 0.99 · 1e4 · 1e-6
        assert_relative_eq!(r.snr, 0.0396, max_relative = 1e-9);
        assert_relative_eq!(r.noise_var, 1.0, max_relative = 1e-12);
        let zero = snr_numeric(&c, Parameter::Delta, o, 0.0).unwrap();
        assert_eq!(zero.snr, 0.0);
        let cross = signal_slope(&c, Parameter::Delta, c.output("bout_x").unwrap(), DEFAULT_STEP).unwrap();
        assert!(cross.abs() < 1e-12);
        assert!(snr_numeric(&c, Parameter::Delta, o, 0.2).is_err());
    }

    #[test]
    fn exact_slopes_match_linearized() {
        for spec in [
            CircuitSpec::mzi(10.0, 0.9).with_modulation(1e-3, 1e-3),
            CircuitSpec::nested_sui(10.0, 0.99, 1.5, 2.0).with_modulation(1e-3, 1e-3),
            CircuitSpec::degenerate_sui(10.0, 0.99, 1.5, PI + 0.4, 2.0, 0.4).with_modulation(1e-3, 2e-3),
        ] {
            let lin = Circuit::compile(&spec).unwrap();
            let exact = Circuit::compile(&spec.clone().with_mode(ModulationMode::Exact)).unwrap();
            for o in lin.outputs() {
                for p in [Parameter::Delta, Parameter::Epsilon, Parameter::Joint] {
                    let a = signal_slope(&lin, p, o, DEFAULT_STEP).unwrap();
                    let b = signal_slope(&exact, p, o, DEFAULT_STEP).unwrap();
                    assert!((a - b).abs() <= 1e-7 * a.abs().max(1.0), "{} {p:?}: {a} vs {b}", o.name);
                }
            }
        }
    }

    #[test]
    fn loss_scan_examples() {
        let spec = CircuitSpec::degenerate_sui(10.0, 0.99, 5.0 / 3.0, PI, 1.0, 0.0).with_modulation(0.0, 1e-3);
        let g81 = PaGain::from_power(81.0, 0.0).unwrap().gain();
        let rows = loss_tolerance_scan(&spec, 0.5, &[1.0, g81]).unwrap();
        assert_relative_eq!(rows[0].ratio, 0.1, max_relative = 1e-9);
        assert_relative_eq!(rows[1].ratio, 0.9, max_relative = 1e-9);
        let rows = loss_tolerance_scan(&spec, 1.0, &[1.0, 2.0, 10.0]).unwrap();
        assert!(rows.iter().all(|r| (r.ratio - 1.0).abs() < 1e-12));
        assert!(loss_tolerance_scan(&spec, 0.0, &[1.0]).is_err());
        assert!(loss_tolerance_scan(&CircuitSpec::mzi(1.0, 0.5), 0.5, &[1.0]).is_err());
    }

    #[test]
    fn resource_summary_examples() {
        let spec = CircuitSpec::nested_sui(1000.0, 0.9999, 1.0, 1.0)
            .with_mzi_model(crate::interferometer::MziModel::DarkPortLimit)
            .with_modulation(1e-3, 1e-3);
        let c = Circuit::compile(&spec).unwrap();
        let r = reports(&c).unwrap();
        let s = enhancement_and_resources(&r, spec.i_ps(), &gain(1.0)).unwrap();
        // identity amplifiers: d1 is vacuum conjugate of the probe, d2 is the probe
        assert!(s.enhancements[0].abs() < 1e-12);
        assert_relative_eq!(s.enhancements[1], 1.0, max_relative = 1e-12);
        let mut zero = r.clone();
        zero[0].value = 0.0;
        assert!(enhancement_and_resources(&zero, spec.i_ps(), &gain(1.0)).is_err());
    }
}
