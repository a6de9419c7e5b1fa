//! Loads a TOML scenario, overrides its sweep and prints the resulting table,
//! the same path the `qdm sweep` command takes.
//!
//! ```text
//! cargo run --example scenario_sweep
//! ```

use std::path::Path;

use qdm::cli::sweep;
use qdm::scenario::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/nested_sui.toml");
    let mut scenario = Scenario::load(&path)?;
    scenario.sweep = vec!["g2=1:10:10".parse()?, "phi=3.0:3.2831853071795862:3".parse()?];
    let table = sweep(&scenario, Some(4)).map_err(|e| e.message)?;
    print!("{}", table.to_csv());
    Ok(())
}
