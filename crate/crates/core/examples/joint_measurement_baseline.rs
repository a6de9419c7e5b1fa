//! Classical joint measurement: split the dark-port light on a beam splitter
//! and read phase on one half and amplitude on the other. The two SNRs share
//! the classical resource, `T₃ + R₃ = 1`.
//!
//! ```text
//! cargo run --example joint_measurement_baseline
//! ```

use qdm::metrology::reports;
use qdm::{Circuit, CircuitSpec};

fn main() -> qdm::Result<()> {
    let (delta, epsilon) = (1e-3, 1e-3);
    println!("{:>6} {:>14} {:>14} {:>10} {:>10}", "T3", "snr(delta)", "snr(eps)", "enh_d", "enh_e");
    for t3 in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let spec = CircuitSpec::direct_homodyne(100.0)
            .with_modulation(delta, epsilon)
            .with_output_splitter(t3)?;
        let r = reports(&Circuit::compile(&spec)?)?;
        println!(
            "{t3:>6} {:>14.6e} {:>14.6e} {:>10.4} {:>10.4}",
            r[0].snr,
            r[1].snr,
            r[0].enhancement.unwrap_or(f64::NAN),
            r[1].enhancement.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
