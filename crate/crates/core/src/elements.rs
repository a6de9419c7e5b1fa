//! Gaussian maps for the optical elements of the interferometers.
//!
//! Every lossless element is specified by its Heisenberg-picture action on
//! the annihilation operators, `a'_j = Σ_k U_jk a_k + V_jk a_k†`, and turned
//! into a real symplectic matrix by [`bogoliubov`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianMap;

/// Gain of a parametric amplifier: `G ≥ 1`, `g = √(G² − 1)`, plus a pump
/// phase (θ for degenerate amplifiers).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PaGainRaw", into = "PaGainRaw")]
pub struct PaGain {
    gain: f64,
    amp: f64,
    phase: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PaGainRaw {
    gain: f64,
    #[serde(default)]
    phase: f64,
}

impl TryFrom<PaGainRaw> for PaGain {
    type Error = Error;
    fn try_from(raw: PaGainRaw) -> Result<Self> {
        PaGain::new(raw.gain, raw.phase)
    }
}

impl From<PaGain> for PaGainRaw {
    fn from(g: PaGain) -> Self {
        PaGainRaw {
            gain: g.gain,
            phase: g.phase,
        }
    }
}

impl PaGain {
    pub fn new(gain: f64, phase: f64) -> Result<Self> {
        if !gain.is_finite() || gain < 1.0 {
            return Err(Error::invalid(format!("amplifier gain G = {gain} must be >= 1")));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("amplifier phase must be finite"));
        }
        let amp = if gain == 1.0 { 0.0 } else { (gain * gain - 1.0).sqrt() };
        Ok(PaGain { gain, amp, phase })
    }

    /// The gain whose maximal power amplification `(G + g)²` equals `power`.
    pub fn from_power(power: f64, phase: f64) -> Result<Self> {
        if !(power >= 1.0) {
            return Err(Error::invalid(format!("power gain {power} must be >= 1")));
        }
        let s = power.sqrt();
        PaGain::new(0.5 * (s + 1.0 / s), phase)
    }

    pub fn identity() -> Self {
        PaGain {
            gain: 1.0,
            amp: 0.0,
            phase: 0.0,
        }
    }

    /// `G`
    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// `g = √(G² − 1)`
    pub fn amp(&self) -> f64 {
        self.amp
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        PaGain { phase, ..*self }
    }

    /// `G + g`
    pub fn stretch(&self) -> f64 {
        self.gain + self.amp
    }

    /// `G − g = 1/(G + g)`
    pub fn squeeze(&self) -> f64 {
        1.0 / self.stretch()
    }
}

/// Beam splitter transmissivity `T` with `R = 1 − T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SplitterRaw", into = "SplitterRaw")]
pub struct SplitterSpec {
    t: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitterRaw {
    t: f64,
}

impl TryFrom<SplitterRaw> for SplitterSpec {
    type Error = Error;
    fn try_from(raw: SplitterRaw) -> Result<Self> {
        SplitterSpec::new(raw.t)
    }
}

impl From<SplitterSpec> for SplitterRaw {
    fn from(s: SplitterSpec) -> Self {
        SplitterRaw { t: s.t }
    }
}

impl SplitterSpec {
    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!("transmissivity T = {t} outside [0, 1]")));
        }
        Ok(SplitterSpec { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        1.0 - self.t
    }
}

/// Real symplectic matrix of the Bogoliubov transformation
/// `a'_j = Σ_k U_jk a_k + V_jk a_k†`.
pub fn bogoliubov(u: &DMatrix<Complex64>, v: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = u.nrows();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let plus = u[(j, k)] + v[(j, k)];
            let minus = u[(j, k)] - v[(j, k)];
            s[(2 * j, 2 * k)] = plus.re;
            s[(2 * j, 2 * k + 1)] = -minus.im;
            s[(2 * j + 1, 2 * k)] = plus.im;
            s[(2 * j + 1, 2 * k + 1)] = minus.re;
        }
    }
    s
}

fn lossless(u: DMatrix<Complex64>, v: DMatrix<Complex64>) -> GaussianMap {
    GaussianMap::symplectic(bogoliubov(&u, &v)).expect("Bogoliubov maps are symplectic")
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `A = √T a + √R b`, `B = √T b − √R a` on the mode pair `(a, b)`.
pub fn beam_splitter(spec: &SplitterSpec) -> GaussianMap {
    let (st, sr) = (spec.t().sqrt(), spec.r().sqrt());
    let u = DMatrix::from_row_slice(2, 2, &[c(st), c(sr), c(-sr), c(st)]);
    lossless(u, DMatrix::zeros(2, 2))
}

/// `a → a e^{iφ}`: rotation of the `(X, Y)` plane by `φ`.
pub fn phase_shifter(phi: f64) -> GaussianMap {
    let u = DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phi));
    lossless(u, DMatrix::zeros(1, 1))
}

/// Pure loss: mixing with vacuum on a beam splitter of transmission `η`.
pub fn loss_channel(transmission: f64) -> Result<GaussianMap> {
    if !(transmission > 0.0 && transmission <= 1.0) {
        return Err(Error::invalid(format!(
            "loss transmission {transmission} outside (0, 1]"
        )));
    }
    GaussianMap::new(
        DMatrix::identity(2, 2) * transmission.sqrt(),
        DMatrix::identity(2, 2) * (1.0 - transmission),
        DVector::zeros(2),
    )
}

/// Non-degenerate amplifier on `(a, b)`:
/// `a → G a + g e^{iφ} b†`, `b → G b + g e^{iφ} a†`.
pub fn two_mode_squeezer(gain: &PaGain) -> GaussianMap {
    let amp = Complex64::from_polar(gain.amp(), gain.phase());
    let u = DMatrix::from_diagonal_element(2, 2, c(gain.gain()));
    let v = DMatrix::from_row_slice(2, 2, &[c(0.0), amp, amp, c(0.0)]);
    lossless(u, v)
}

/// Degenerate amplifier `b → G b + g e^{iθ} b†`. The amplified direction in
/// phase space is at angle `θ/2`.
pub fn single_mode_squeezer(gain: &PaGain) -> GaussianMap {
    let u = DMatrix::from_element(1, 1, c(gain.gain()));
    let v = DMatrix::from_element(1, 1, Complex64::from_polar(gain.amp(), gain.phase()));
    lossless(u, v)
}

/// Exact amplitude modulation: `a → e^{-ε} a` plus the vacuum admitted
/// through the loss port.
pub fn amplitude_modulator(epsilon: f64) -> Result<GaussianMap> {
    loss_channel((-2.0 * epsilon).exp())
}

/// First-order mean map of combined modulation, `β → (1 + iδ − ε) β`.
pub fn linearized_modulation(delta: f64, epsilon: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0 - epsilon, -delta, delta, 1.0 - epsilon])
}

/// Matrix of multiplication by the complex number `z` on `(Re, Im)` pairs.
pub fn complex_multiplier(z: Complex64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[z.re, -z.im, z.im, z.re])
}
