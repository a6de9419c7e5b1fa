//! In the degenerate SU(1,1) interferometer the second amplifier phase `θ₂`
//! picks which mixture `γ₋ = δ·sin(θ₂/2) − ε·cos(θ₂/2)` of the two
//! modulations is amplified. `θ₂ = 0` reads pure amplitude modulation,
//! `θ₂ = π` pure phase modulation.
//!
//! ```text
//! cargo run --example degenerate_mixture
//! ```

use std::f64::consts::PI;

use qdm::metrology::{signal_slope, snr_numeric, MixtureAngle, DEFAULT_STEP};
use qdm::{Circuit, CircuitSpec, Parameter};

fn main() -> qdm::Result<()> {
    let (delta, epsilon) = (1e-3, 2e-3);
    let g1 = 5.0 / 3.0;
    println!(
        "{:>8} {:>12} {:>12} {:>14} {:>14} {:>14}",
        "theta2", "d/d delta", "d/d eps", "gamma_minus", "snr_x", "snr/gamma^2"
    );
    for k in 0..=8 {
        let theta2 = k as f64 * PI / 4.0;
        // θ₁ − θ₂ = π keeps the interferometer on its dark fringe
        let spec = CircuitSpec::degenerate_sui(100.0, 0.99, g1, theta2 + PI, 2.0, theta2)
            .with_modulation(delta, epsilon);
        let circuit = Circuit::compile(&spec)?;
        let out = circuit.output("cal_x")?;
        let sd = signal_slope(&circuit, Parameter::Delta, out, DEFAULT_STEP)?;
        let se = signal_slope(&circuit, Parameter::Epsilon, out, DEFAULT_STEP)?;
        let gm = MixtureAngle::new(theta2, delta, epsilon).gamma_minus;
        let r = snr_numeric(&circuit, Parameter::Joint, out, delta.hypot(epsilon))?;
        println!(
            "{theta2:>8.4} {sd:>12.4} {se:>12.4} {gm:>14.4e} {:>14.6e} {:>14.6e}",
            r.snr,
            r.snr / (gm * gm)
        );
    }
    Ok(())
}
