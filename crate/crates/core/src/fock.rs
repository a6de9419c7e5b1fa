//! Truncated Fock-space simulator, used as a brute-force oracle for the
//! Gaussian engine.
//!
//! Each element is a unitary `exp(K)` with `K` an anti-Hermitian polynomial
//! in the truncated ladder operators. `K` is split into its connected blocks
//! (photon-number sectors), and each block is exponentiated through the
//! eigendecomposition of the Hermitian `iK`. Loss couples the mode to a
//! fresh vacuum ancilla on a beam splitter; the ancilla is never touched
//! again, so measuring any other mode traces it out. The state therefore
//! stays pure on the enlarged space.
//!
//! The circuit interpretation here is written independently of
//! [`crate::interferometer`]; only output names are shared.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interferometer::{Circuit, CircuitSpec, ModulationMode, MziModel, Topology};

/// Largest Hilbert-space dimension accepted.
pub const MAX_DIMENSION: usize = 2_000_000;
/// Most optical modes (ancillas included) the oracle will simulate.
pub const MAX_MODES: usize = 3;
/// Largest amplifier gain in the truncation-safe regime.
pub const MAX_GAIN: f64 = 1.6;
/// Largest coherent amplitude in the truncation-safe regime.
pub const MAX_ALPHA: f64 = 2.0;

const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockConfig {
    /// Photon-number levels kept per mode (`0..cutoff`).
    pub cutoff: usize,
    /// Largest admissible probability in the top two Fock levels of any mode.
    pub tail_threshold: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        FockConfig {
            cutoff: 40,
            tail_threshold: 1e-6,
        }
    }
}

impl FockConfig {
    pub fn with_cutoff(cutoff: usize) -> Self {
        FockConfig {
            cutoff,
            ..Default::default()
        }
    }

    pub fn validate(&self, modes: usize) -> Result<()> {
        if self.cutoff < 4 {
            return Err(Error::invalid(format!("cutoff {} must be >= 4", self.cutoff)));
        }
        if !(self.tail_threshold > 0.0 && self.tail_threshold <= 1e-3) {
            return Err(Error::invalid(format!(
                "tail threshold {} outside (0, 1e-3]",
                self.tail_threshold
            )));
        }
        if modes == 0 || modes > MAX_MODES {
            return Err(Error::invalid(format!(
                "{modes} modes requested; the oracle handles 1..={MAX_MODES}"
            )));
        }
        let dim = (self.cutoff as u128).pow(modes as u32);
        if dim > MAX_DIMENSION as u128 {
            return Err(Error::invalid(format!(
                "cutoff^modes = {dim} exceeds {MAX_DIMENSION}"
            )));
        }
        Ok(())
    }
}

/// Pure state on `n_modes` truncated modes; mode 0 is the most significant
/// digit of the basis index.
#[derive(Debug, Clone)]
pub struct FockState {
    cutoff: usize,
    n_modes: usize,
    amps: Vec<Complex64>,
    tail_threshold: f64,
}

/// Sparse anti-Hermitian generator on the local basis of one or two modes.
struct Generator {
    local_dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

fn sqrt_n(n: usize) -> f64 {
    (n as f64).sqrt()
}

impl FockState {
    /// Vacuum on `n_modes` modes.
    pub fn vacuum(n_modes: usize, config: &FockConfig) -> Result<Self> {
        config.validate(n_modes)?;
        let dim = config.cutoff.pow(n_modes as u32);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(FockState {
            cutoff: config.cutoff,
            n_modes,
            amps,
            tail_threshold: config.tail_threshold,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    fn stride(&self, mode: usize) -> usize {
        self.cutoff.pow((self.n_modes - 1 - mode) as u32)
    }

    fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.cutoff
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::invalid(format!("mode {mode} out of range")));
        }
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability that some mode sits in one of its top two levels.
    pub fn tail_mass(&self) -> f64 {
        let edge = self.cutoff - 2;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (0..self.n_modes).any(|m| self.occupation(*i, m) >= edge))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn check_after_step(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InternalConsistency(format!(
                "Fock state norm drifted to {norm:.12}"
            )));
        }
        let tail = self.tail_mass();
        if tail > self.tail_threshold {
            return Err(Error::Truncation {
                tail_mass: tail,
                threshold: self.tail_threshold,
            });
        }
        Ok(())
    }

    fn apply(&mut self, modes: &[usize], generator: &Generator) -> Result<()> {
        for &m in modes {
            self.check_mode(m)?;
        }
        if modes.len() == 2 && modes[0] == modes[1] {
            return Err(Error::invalid("two-mode element needs distinct modes"));
        }
        let d = self.cutoff;
        let strides: Vec<usize> = modes.iter().map(|&m| self.stride(m)).collect();
        let offset = |local: usize| -> usize {
            match strides.as_slice() {
                [s] => local * s,
                [s0, s1] => (local / d) * s0 + (local % d) * s1,
                _ => unreachable!("elements act on one or two modes"),
            }
        };

        // connected blocks of the generator
        let mut parent: Vec<usize> = (0..generator.local_dim).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(r, c, _) in &generator.entries {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a] = b;
            }
        }
        let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for l in 0..generator.local_dim {
            let root = find(&mut parent, l);
            blocks.entry(root).or_default().push(l);
        }
        let mut position = vec![0usize; generator.local_dim];
        for members in blocks.values() {
            for (k, &l) in members.iter().enumerate() {
                position[l] = k;
            }
        }
        let mut block_h: std::collections::BTreeMap<usize, DMatrix<Complex64>> = blocks
            .iter()
            .map(|(&root, m)| (root, DMatrix::zeros(m.len(), m.len())))
            .collect();
        for &(r, c, v) in &generator.entries {
            let root = find(&mut parent, r);
            // H = iK is Hermitian
            block_h.get_mut(&root).unwrap()[(position[r], position[c])] += Complex64::i() * v;
        }

        // environment offsets: every index with the acted-on modes empty
        let env: Vec<usize> = (0..self.amps.len())
            .filter(|&i| modes.iter().all(|&m| self.occupation(i, m) == 0))
            .collect();

        for (root, members) in &blocks {
            let h = &block_h[root];
            let unitary = if members.len() == 1 {
                DMatrix::from_element(1, 1, Complex64::from_polar(1.0, -h[(0, 0)].re))
            } else {
                let eig = SymmetricEigen::new(h.clone());
                let phases = DVector::from_iterator(
                    members.len(),
                    eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l)),
                );
                let v = &eig.eigenvectors;
                v * DMatrix::from_diagonal(&phases) * v.adjoint()
            };
            let offs: Vec<usize> = members.iter().map(|&l| offset(l)).collect();
            let mut buf = DVector::zeros(members.len());
            for &base in &env {
                for (k, &o) in offs.iter().enumerate() {
                    buf[k] = self.amps[base + o];
                }
                let out = &unitary * &buf;
                for (k, &o) in offs.iter().enumerate() {
                    self.amps[base + o] = out[k];
                }
            }
        }
        self.check_after_step()
    }

    fn single(&self, build: impl Fn(usize, &mut Vec<(usize, usize, Complex64)>)) -> Generator {
        let mut entries = Vec::new();
        for n in 0..self.cutoff {
            build(n, &mut entries);
        }
        Generator {
            local_dim: self.cutoff,
            entries,
        }
    }

    fn pair(&self, build: impl Fn(usize, usize, &mut Vec<(usize, usize, Complex64)>)) -> Generator {
        let mut entries = Vec::new();
        for na in 0..self.cutoff {
            for nb in 0..self.cutoff {
                build(na, nb, &mut entries);
            }
        }
        Generator {
            local_dim: self.cutoff * self.cutoff,
            entries,
        }
    }

    /// `exp(β a† − β* a)`: mean of `a` shifts by `β`.
    pub fn displace(&mut self, mode: usize, beta: Complex64) -> Result<()> {
        let d = self.cutoff;
        let g = self.single(|n, e| {
            if n + 1 < d {
                let s = sqrt_n(n + 1);
                e.push((n + 1, n, beta * s));
                e.push((n, n + 1, -beta.conj() * s));
            }
        });
        self.apply(&[mode], &g)
    }

    /// `a → a e^{iφ}`.
    pub fn phase(&mut self, mode: usize, phi: f64) -> Result<()> {
        let g = self.single(|n, e| e.push((n, n, Complex64::new(0.0, phi * n as f64))));
        self.apply(&[mode], &g)
    }

    /// `a → G a + g e^{iθ} a†` with `G = cosh r`.
    pub fn squeeze(&mut self, mode: usize, gain: f64, theta: f64) -> Result<()> {
        let r = gain.acosh();
        let d = self.cutoff;
        let z = Complex64::from_polar(r / 2.0, theta);
        let g = self.single(|n, e| {
            if n + 2 < d {
                let s = sqrt_n((n + 1) * (n + 2));
                e.push((n + 2, n, z * s));
                e.push((n, n + 2, -z.conj() * s));
            }
        });
        self.apply(&[mode], &g)
    }

    /// `a → √T a + √R b`, `b → √T b − √R a`.
    pub fn beam_splitter(&mut self, a: usize, b: usize, transmissivity: f64) -> Result<()> {
        let chi = transmissivity.sqrt().acos();
        let d = self.cutoff;
        // K = χ (a† b − a b†)
        let g = self.pair(|na, nb, e| {
            let here = na * d + nb;
            if na + 1 < d && nb >= 1 {
                let v = chi * sqrt_n(na + 1) * sqrt_n(nb);
                e.push(((na + 1) * d + nb - 1, here, Complex64::new(v, 0.0)));
            }
            if na >= 1 && nb + 1 < d {
                let v = chi * sqrt_n(na) * sqrt_n(nb + 1);
                e.push(((na - 1) * d + nb + 1, here, Complex64::new(-v, 0.0)));
            }
        });
        self.apply(&[a, b], &g)
    }

    /// `a → G a + g e^{iφ} b†`, `b → G b + g e^{iφ} a†`.
    pub fn two_mode_squeeze(&mut self, a: usize, b: usize, gain: f64, phase: f64) -> Result<()> {
        let r = gain.acosh();
        let z = Complex64::from_polar(r, phase);
        let d = self.cutoff;
        let g = self.pair(|na, nb, e| {
            let here = na * d + nb;
            if na + 1 < d && nb + 1 < d {
                let s = sqrt_n((na + 1) * (nb + 1));
                e.push(((na + 1) * d + nb + 1, here, z * s));
            }
            if na >= 1 && nb >= 1 {
                let s = sqrt_n(na * nb);
                e.push(((na - 1) * d + nb - 1, here, -z.conj() * s));
            }
        });
        self.apply(&[a, b], &g)
    }

    /// Loss of transmission `eta` on `mode`, dumping the rest into the
    /// vacuum `ancilla`.
    pub fn loss(&mut self, mode: usize, ancilla: usize, eta: f64) -> Result<()> {
        self.beam_splitter(mode, ancilla, eta)
    }

    /// Mean and variance of `X_θ = a e^{-iθ} + a† e^{iθ}` on `mode`.
    pub fn quadrature_stats(&self, mode: usize, angle: f64) -> Result<(f64, f64)> {
        self.check_mode(mode)?;
        let s = self.stride(mode);
        let mut a1 = Complex64::new(0.0, 0.0);
        let mut a2 = Complex64::new(0.0, 0.0);
        let mut n_mean = 0.0;
        for (i, amp) in self.amps.iter().enumerate() {
            let n = self.occupation(i, mode);
            if n == 0 {
                continue;
            }
            n_mean += n as f64 * amp.norm_sqr();
            a1 += self.amps[i - s].conj() * amp * sqrt_n(n);
            if n >= 2 {
                a2 += self.amps[i - 2 * s].conj() * amp * sqrt_n(n * (n - 1));
            }
        }
        let rot = Complex64::from_polar(1.0, -angle);
        let mean = 2.0 * (rot * a1).re;
        let second = 2.0 * (rot * rot * a2).re + 2.0 * n_mean + 1.0;
        Ok((mean, second - mean * mean))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockOutput {
    pub name: String,
    pub mean: f64,
    pub variance: f64,
}

fn check_preconditions(spec: &CircuitSpec) -> Result<()> {
    spec.validate()?;
    if spec.modulation_mode != ModulationMode::Exact {
        return Err(Error::invalid("the Fock oracle runs exact-mode specs only"));
    }
    if spec.mzi_model != MziModel::Full {
        return Err(Error::invalid("the Fock oracle needs the full MZI model"));
    }
    if spec.alpha.norm_sqr().sqrt() > MAX_ALPHA {
        return Err(Error::invalid(format!("|alpha| must be <= {MAX_ALPHA} for the oracle")));
    }
    if spec.gains.iter().any(|g| g.gain() > MAX_GAIN) {
        return Err(Error::invalid(format!("amplifier gains must be <= {MAX_GAIN} for the oracle")));
    }
    Ok(())
}

/// Builds the mode list for `spec` (named system modes first, then
/// ancillas as they are needed) and runs the circuit in Fock space.
struct Builder {
    modes: Vec<String>,
}

impl Builder {
    fn add(&mut self, name: &str) -> usize {
        self.modes.push(name.to_string());
        self.modes.len() - 1
    }
}

/// Runs `spec` at its own `(δ, ε)` and returns the statistics of every
/// monitored quadrature.
pub fn simulate_fock(spec: &CircuitSpec, config: &FockConfig) -> Result<Vec<FockOutput>> {
    check_preconditions(spec)?;
    let t3 = spec.output_splitter();
    let am = spec.epsilon != 0.0;
    let det = spec.detection_loss < 1.0;

    // mode layout
    let mut b = Builder { modes: Vec::new() };
    let (probe, arm, extra) = match spec.topology {
        Topology::DirectHomodyne => (b.add("a_in"), None, None),
        Topology::Mzi => (b.add("a_in"), Some(b.add("b_in")), None),
        Topology::NestedSui => {
            let a0 = b.add("a0");
            let b0 = b.add("b0");
            (b.add("a_in"), Some(b0), Some(a0))
        }
        Topology::DegenerateSui => {
            let b0 = b.add("b0");
            (b.add("a_in"), Some(b0), None)
        }
    };
    let am_anc = am.then(|| b.add("am_vacuum"));
    let split_anc = t3.map(|_| b.add("v3"));

    // monitored outputs: (name, mode, angle)
    let outputs: Vec<(&str, usize, f64)> = match spec.topology {
        Topology::DirectHomodyne => match split_anc {
            Some(v) => vec![("t_y", probe, FRAC_PI_2), ("r_x", v, 0.0)],
            None => vec![("y", probe, FRAC_PI_2), ("x", probe, 0.0)],
        },
        Topology::Mzi => {
            let bm = arm.unwrap();
            match split_anc {
                Some(v) => vec![("bout_t_y", bm, FRAC_PI_2), ("bout_r_x", v, 0.0)],
                None => vec![("bout_y", bm, FRAC_PI_2), ("bout_x", bm, 0.0)],
            }
        }
        Topology::NestedSui => vec![("d1_y", extra.unwrap(), FRAC_PI_2), ("d2_x", arm.unwrap(), 0.0)],
        Topology::DegenerateSui => {
            let half = spec.gains[1].phase() / 2.0;
            vec![("cal_x", arm.unwrap(), half), ("cal_y", arm.unwrap(), half + FRAC_PI_2)]
        }
    };
    let mut detected: Vec<usize> = outputs.iter().map(|o| o.1).collect();
    detected.sort_unstable();
    detected.dedup();
    let det_anc: Vec<usize> = if det {
        detected.iter().map(|_| b.add("det_vacuum")).collect()
    } else {
        Vec::new()
    };

    let mut psi = FockState::vacuum(b.modes.len(), config)?;
    psi.displace(probe, Complex64::new(spec.alpha.re, spec.alpha.im))?;

    // modulation of one arm: e^{-ε} through loss, then e^{iδ}
    let modulate = |psi: &mut FockState, mode: usize| -> Result<()> {
        if let Some(anc) = am_anc {
            psi.loss(mode, anc, (-2.0 * spec.epsilon).exp())?;
        }
        if spec.delta != 0.0 {
            psi.phase(mode, spec.delta)?;
        }
        Ok(())
    };
    let mzi = |psi: &mut FockState, a: usize, bm: usize| -> Result<()> {
        psi.beam_splitter(a, bm, spec.splitters[0].t())?;
        modulate(psi, bm)?;
        if spec.mzi_phi != 0.0 {
            psi.phase(bm, spec.mzi_phi)?;
        }
        // second splitter: a_out = √T A − √R B, b_out = √T B + √R A
        psi.beam_splitter(bm, a, spec.splitters[1].t())
    };

    match spec.topology {
        Topology::DirectHomodyne => {
            modulate(&mut psi, probe)?;
            if let (Some(t), Some(v)) = (t3, split_anc) {
                psi.beam_splitter(probe, v, t.t())?;
            }
        }
        Topology::Mzi => {
            let bm = arm.unwrap();
            mzi(&mut psi, probe, bm)?;
            if let (Some(t), Some(v)) = (t3, split_anc) {
                psi.beam_splitter(bm, v, t.t())?;
            }
        }
        Topology::NestedSui => {
            let (a0, b0) = (extra.unwrap(), arm.unwrap());
            let (g1, g2) = (spec.gains[0], spec.gains[1]);
            psi.two_mode_squeeze(a0, b0, g1.gain(), g1.phase())?;
            mzi(&mut psi, probe, b0)?;
            if spec.phi != 0.0 {
                psi.phase(a0, spec.phi)?;
            }
            psi.two_mode_squeeze(a0, b0, g2.gain(), g2.phase())?;
        }
        Topology::DegenerateSui => {
            let b0 = arm.unwrap();
            let (g1, g2) = (spec.gains[0], spec.gains[1]);
            psi.squeeze(b0, g1.gain(), g1.phase())?;
            mzi(&mut psi, probe, b0)?;
            psi.squeeze(b0, g2.gain(), g2.phase())?;
        }
    }
    for (mode, anc) in detected.iter().zip(&det_anc) {
        psi.loss(*mode, *anc, spec.detection_loss)?;
    }

    outputs
        .into_iter()
        .map(|(name, mode, angle)| {
            let (mean, variance) = psi.quadrature_stats(mode, angle)?;
            Ok(FockOutput {
                name: name.to_string(),
                mean,
                variance,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub name: String,
    pub gaussian_mean: f64,
    pub fock_mean: f64,
    pub gaussian_variance: f64,
    pub fock_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub cutoff: usize,
    pub entries: Vec<Deviation>,
    pub max_mean_deviation: f64,
    pub max_variance_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl DeviationReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_mean_deviation.max(self.max_variance_deviation)
    }
}

/// Runs the Gaussian engine and the Fock oracle on the same exact-mode circuit
/// and compares every monitored mean and variance.
pub fn compare_with_gaussian(spec: &CircuitSpec, config: &FockConfig, tolerance: f64) -> Result<DeviationReport> {
    let fock = simulate_fock(spec, config)?;
    let circuit = Circuit::compile(spec)?;
    let state = circuit.run()?;
    let mut entries = Vec::with_capacity(fock.len());
    let (mut dm, mut dv) = (0.0_f64, 0.0_f64);
    for f in fock {
        let o = circuit.output(&f.name)?;
        let (gm, gv) = state.quadrature_stats(o.mode, o.angle)?;
        dm = dm.max((gm - f.mean).abs());
        dv = dv.max((gv - f.variance).abs());
        entries.push(Deviation {
            name: f.name,
            gaussian_mean: gm,
            fock_mean: f.mean,
            gaussian_variance: gv,
            fock_variance: f.variance,
        });
    }
    Ok(DeviationReport {
        cutoff: config.cutoff,
        entries,
        max_mean_deviation: dm,
        max_variance_deviation: dv,
        tolerance,
        passed: dm.max(dv) < tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn coherent_state_statistics() {
        let mut psi = FockState::vacuum(1, &FockConfig::with_cutoff(20)).unwrap();
        psi.displace(0, Complex64::new(1.0, 0.0)).unwrap();
        let (m, v) = psi.quadrature_stats(0, 0.0).unwrap();
        assert!((m - 2.0).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn vacuum_is_isotropic() {
        let psi = FockState::vacuum(2, &FockConfig::with_cutoff(8)).unwrap();
        for k in 0..10 {
            let (m, v) = psi.quadrature_stats(1, 0.3 * k as f64).unwrap();
            assert_eq!(m, 0.0);
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn single_mode_squeezer_variances() {
        let mut psi = FockState::vacuum(1, &FockConfig::with_cutoff(40)).unwrap();
        psi.squeeze(0, 1.25, 0.0).unwrap();
        assert_relative_eq!(psi.quadrature_stats(0, 0.0).unwrap().1, 4.0, epsilon = 1e-4);
        assert_relative_eq!(psi.quadrature_stats(0, FRAC_PI_2).unwrap().1, 0.25, epsilon = 1e-4);
    }

    #[test]
    fn two_mode_squeezer_variances() {
        let mut psi = FockState::vacuum(2, &FockConfig::with_cutoff(25)).unwrap();
        psi.two_mode_squeeze(0, 1, 1.25, 0.0).unwrap();
        for m in 0..2 {
            assert_relative_eq!(psi.quadrature_stats(m, 0.0).unwrap().1, 2.125, epsilon = 1e-4);
        }
    }

    #[test]
    fn beam_splitter_sign_convention() {
        let mut psi = FockState::vacuum(2, &FockConfig::with_cutoff(12)).unwrap();
        psi.displace(0, Complex64::new(1.0, 0.0)).unwrap();
        psi.beam_splitter(0, 1, 0.5).unwrap();
        let s = 2.0_f64.sqrt();
        assert_relative_eq!(psi.quadrature_stats(0, 0.0).unwrap().0, s, epsilon = 1e-8);
        assert_relative_eq!(psi.quadrature_stats(1, 0.0).unwrap().0, -s, epsilon = 1e-8);
    }

    #[test]
    fn truncation_is_detected() {
        let mut psi = FockState::vacuum(1, &FockConfig::with_cutoff(6)).unwrap();
        let err = psi.displace(0, Complex64::new(2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn config_guards() {
        assert!(FockConfig::with_cutoff(3).validate(1).is_err());
        assert!(FockConfig::with_cutoff(200).validate(3).is_err());
        assert!(FockConfig::with_cutoff(40).validate(4).is_err());
        let loose = FockConfig {
            cutoff: 10,
            tail_threshold: 0.1,
        };
        assert!(loose.validate(1).is_err());
    }

    #[test]
    fn oracle_preconditions() {
        let spec = CircuitSpec::mzi(1.0, 0.9).with_modulation(0.01, 0.0);
        assert!(simulate_fock(&spec, &FockConfig::default()).is_err());
        let big = CircuitSpec::mzi(3.0, 0.9).with_mode(ModulationMode::Exact);
        assert!(simulate_fock(&big, &FockConfig::default()).is_err());
    }
}
