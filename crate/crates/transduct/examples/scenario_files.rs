//! Scenario files: the declarative front door.
//!
//! Everything the other examples do programmatically can be described in a
//! strict-JSON scenario document and fed to `transduct run <file>` — or,
//! as here, parsed and executed through the library API.
//!
//! ```bash
//! cargo run --example scenario_files
//! ```

use transduct::scenario::{parse_scenario, run_scenario, to_json};

fn main() -> transduct::Result<()> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios");
    for name in [
        "cotter_pins.json",
        "commander.json",
        "steel_yield.json",
        "sensor_glitches.json",
    ] {
        let text = std::fs::read_to_string(dir.join(name))
            .map_err(|e| transduct::Error::ScenarioIo(format!("{name}: {e}")))?;
        let spec = parse_scenario(&text)?;
        println!("==> {name} (kind: {})\n", spec.params.kind());
        println!("{}", run_scenario(&spec)?);
    }

    // parsing fills defaults; the canonical form writes them back out
    let minimal = r#"{
        "name": "minimal",
        "kind": "cotter-pin",
        "parameters": {"n0": [100], "ratio": 0.06, "n": 100, "threshold": 10}
    }"#;
    let spec = parse_scenario(minimal)?;
    println!("==> canonical form of a minimal document\n");
    println!("{}", to_json(&spec));
    Ok(())
}
