//! Cross-checks the Gaussian engine against a brute-force truncated Fock
//! simulation, and shows how the agreement improves with the cutoff.
//!
//! ```text
//! cargo run --release --example fock_validation
//! ```

use std::f64::consts::PI;

use qdm::fock::{compare_with_gaussian, FockConfig};
use qdm::{CircuitSpec, ModulationMode};

fn main() -> qdm::Result<()> {
    let specs = [
        ("mzi", CircuitSpec::mzi(1.0, 0.9).with_modulation(0.01, 0.0)),
        ("nested_sui", CircuitSpec::nested_sui(0.8, 0.8, 1.2, 1.2).with_modulation(0.02, 0.0)),
        (
            "degenerate_sui",
            CircuitSpec::degenerate_sui(1.0, 0.9, 1.25, PI, 1.25, 0.0).with_modulation(0.0, 0.01),
        ),
    ];
    for (name, spec) in specs {
        let spec = spec.with_mode(ModulationMode::Exact);
        for cutoff in [20, 30, 40] {
            let config = FockConfig::with_cutoff(cutoff);
            match compare_with_gaussian(&spec, &config, 1e-4) {
                Ok(r) => println!(
                    "{name:<15} cutoff {cutoff:>3}: mean dev {:.2e}, var dev {:.2e}, {}",
                    r.max_mean_deviation,
                    r.max_variance_deviation,
                    if r.passed { "pass" } else { "fail" }
                ),
                Err(e) => println!("{name:<15} cutoff {cutoff:>3}: {e}"),
            }
        }
    }
    Ok(())
}
