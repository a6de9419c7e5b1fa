//! Gaussian simulation of SU(2), SU(1,1) and nested SU(2)-in-SU(1,1)
//! interferometers for joint phase/amplitude (PM/AM) metrology.
//!
//! The crate is organised bottom-up:
//!
//! - [`gaussian`]: multimode Gaussian states (mean + covariance) and affine
//!   Gaussian maps acting on them.
//! - [`elements`]: beam splitters, phase shifters, loss, one- and two-mode
//!   parametric amplifiers.
//! - [`interferometer`]: the four measurement topologies (direct homodyne,
//!   Mach-Zehnder, nested SU(1,1), degenerate SU(1,1)) compiled from a
//!   [`CircuitSpec`].
//! - [`metrology`]: signal slopes, output noise, SNR, quantum enhancement,
//!   resource accounting and detection-loss tolerance, plus the closed-form
//!   expressions used for cross-checking.
//! - [`fock`]: a truncated Fock-space simulator used as an independent
//!   brute-force oracle for the Gaussian engine.
//! - [`scenario`] and [`cli`]: TOML scenario files and the `qdm` command line.
//!
//! # Conventions
//!
//! Quadratures are `X = a + a†` and `Y = (a - a†)/i`, so the vacuum has unit
//! variance in every direction and a coherent state `|α⟩` has mean
//! `(2 Re α, 2 Im α)`. Phase-space vectors are interleaved per mode:
//! `(X₁, Y₁, X₂, Y₂, …)`.
//!
//! ```
//! use qdm::{CircuitSpec, Circuit, metrology};
//!
//! // Nested SU(1,1) interferometer at its dark fringe with equal gains.
//! let spec = CircuitSpec::nested_sui(100.0, 0.9999, 5.0 / 3.0, 5.0 / 3.0);
//! let circuit = Circuit::compile(&spec).unwrap();
//! let noise = metrology::output_noise(&circuit, circuit.output("d1_y").unwrap()).unwrap();
//! assert!((noise - 1.0).abs() < 1e-9);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod elements;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod interferometer;
pub mod metrology;
pub mod scenario;

pub use elements::{PaGain, SplitterSpec};
pub use error::{Error, Result};
pub use gaussian::{GaussianMap, GaussianState};
pub use interferometer::{
    Circuit, CircuitSpec, ModulationMode, MziModel, Output, Parameter, StageSnapshot, Topology,
};
pub use metrology::SnrReport;
