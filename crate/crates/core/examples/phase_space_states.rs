//! Noise ellipse of the probe mode at the four stages of a degenerate SU(1,1)
//! interferometer: vacuum, squeezed, displaced by the modulation, and
//! amplified. Prints CSV suitable for plotting.
//!
//! ```text
//! cargo run --example phase_space_states > stages.csv
//! ```

use std::f64::consts::PI;

use qdm::{Circuit, CircuitSpec};

fn main() -> qdm::Result<()> {
    let spec = CircuitSpec::degenerate_sui(10.0, 0.99, 5.0 / 3.0, PI, 5.0 / 3.0, 0.0).with_modulation(0.02, 0.02);
    let circuit = Circuit::compile(&spec)?;
    println!("stage,label,center_x,center_y,major_variance,minor_variance,orientation");
    for s in circuit.stage_snapshots()? {
        let e = s.ellipse;
        println!(
            "{},{:?},{:.6},{:.6},{:.6},{:.6},{:.6}",
            s.label.letter(),
            s.label,
            e.center_x,
            e.center_y,
            e.major_variance,
            e.minor_variance,
            e.orientation
        );
    }
    Ok(())
}
