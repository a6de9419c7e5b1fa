//! Detection loss after a strong second amplifier costs almost nothing: the
//! SNR kept is `η·V / (η·V + 1 − η)`, where `V` is the lossless output noise.
//!
//! ```text
//! cargo run --example loss_tolerance
//! ```

use std::f64::consts::{FRAC_PI_3, PI};

use qdm::metrology::loss_tolerance_scan;
use qdm::CircuitSpec;

fn main() -> qdm::Result<()> {
    let eta = 0.5;
    let spec = CircuitSpec::degenerate_sui(100.0, 0.99, 5.0 / 3.0, PI + FRAC_PI_3, 1.0, FRAC_PI_3)
        .with_modulation(1e-3, 1e-3);
    let rows = loss_tolerance_scan(&spec, eta, &[1.0, 1.25, 2.0, 4.5556, 10.0, 100.0])?;
    println!("detection efficiency {eta}");
    println!("{:>8} {:>14} {:>12} {:>12}", "G2", "lossless V", "retained", "formula");
    for r in rows {
        println!(
            "{:>8.4} {:>14.4} {:>12.6} {:>12.6}",
            r.gain2, r.lossless_noise, r.ratio, r.ratio_formula
        );
    }
    Ok(())
}
