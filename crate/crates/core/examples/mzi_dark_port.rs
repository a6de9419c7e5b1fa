//! Dark-port signal and SNR of an unbalanced Mach-Zehnder interferometer,
//! compared with `4·T·I_ps·δ²` as the splitter transmissivity varies.
//!
//! ```text
//! cargo run --example mzi_dark_port
//! ```

use qdm::metrology::{reports, snr_analytic, AnalyticParams, Formula};
use qdm::{Circuit, CircuitSpec};

fn main() -> qdm::Result<()> {
    let (alpha, delta, epsilon) = (1000.0, 1e-3, 1e-3);
    println!("{:>8} {:>10} {:>14} {:>14} {:>14} {:>10}", "T", "I_ps", "slope_y", "snr_y", "closed form", "noise");
    for t in [0.5, 0.9, 0.99, 0.999] {
        let spec = CircuitSpec::mzi(alpha, t).with_modulation(delta, epsilon);
        let circuit = Circuit::compile(&spec)?;
        let r = reports(&circuit)?;
        let p = AnalyticParams {
            t: Some(t),
            i_ps: Some(spec.i_ps()),
            delta: Some(delta),
            epsilon: Some(epsilon),
            ..Default::default()
        };
        let closed = snr_analytic(Formula::Su2Snr, &p)?;
        println!(
            "{t:>8} {:>10.1} {:>14.6} {:>14.6e} {:>14.6e} {:>10.6}",
            spec.i_ps(),
            r[0].signal_slope,
            r[0].snr,
            closed.first(),
            r[0].noise_var
        );
    }
    // The signal grows as √(TR) while the light reaching the detector shrinks:
    // most of the probe leaves by the bright port.
    Ok(())
}
