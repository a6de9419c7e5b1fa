//! Joint phase and amplitude readout with a Mach-Zehnder nested inside an
//! SU(1,1) interferometer. As the second amplifier gain grows, both channels
//! approach the same enhancement `(G₁ + g₁)²/2` and together use up the full
//! resource `4·I_ps·(G₁ + g₁)²`.
//!
//! ```text
//! cargo run --example nested_sui_dense_metrology
//! ```

use qdm::metrology::{enhancement_and_resources, reports};
use qdm::{Circuit, CircuitSpec, PaGain};

fn main() -> qdm::Result<()> {
    let g1 = PaGain::new(5.0 / 3.0, 0.0)?;
    let limit = g1.stretch().powi(2) / 2.0;
    println!("G1 = {:.4}, limiting enhancement per channel = {limit:.4}", g1.gain());
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "G2", "noise", "enh(delta)", "enh(eps)", "resource");
    for g2 in [1.0, 1.25, 5.0 / 3.0, 3.0, 10.0, 100.0] {
        let spec = CircuitSpec::nested_sui(1000.0, 0.9999, g1.gain(), g2).with_modulation(1e-3, 1e-3);
        let circuit = Circuit::compile(&spec)?;
        let r = reports(&circuit)?;
        let res = enhancement_and_resources(&r, spec.i_ps(), &g1)?;
        println!(
            "{g2:>8.3} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            r[0].noise_var,
            res.enhancements[0],
            res.enhancements[1],
            res.fraction_of_bound()
        );
    }
    Ok(())
}
