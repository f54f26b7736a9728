//! Runs a small sweep, exports it as CSV and JSON, and reads the JSON back.
//!
//! Usage: `cargo run --example export_sweep [out_dir]`

use std::path::PathBuf;

use duetdyn::experiment::{export, read_json, run_sweep, Axis, ExportFormat, SweepSpec};
use duetdyn::{InitialState, IntegratorConfig, LindbladSpec, ModelParams, TimeGrid};

fn main() -> duetdyn::Result<()> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let spec = SweepSpec {
        base: ModelParams::new(0.0, 0.0, LindbladSpec::sigma_z()),
        c_axis: Axis::new(0.0, 3.0, 7),
        gamma_axis: vec![0.0, 0.05],
        init: InitialState::new(0.8, 0.0)?,
        grid: TimeGrid::new(20.0, 1e-3, 200)?,
        cfg: IntegratorConfig::default(),
        observables: vec![],
        summary_window: (10.0, 20.0),
    };
    let result = run_sweep(&spec)?;
    let csv = out_dir.join("sweep.csv");
    let json = out_dir.join("sweep.json");
    export(&result, ExportFormat::Csv, &csv)?;
    export(&result, ExportFormat::Json, &json)?;
    let back = read_json(&json)?;
    println!(
        "{} cells, JSON round trip exact: {}",
        back.cells.len(),
        back == result
    );
    println!("written by {}", back.provenance.code_version);
    for gi in 0..back.gamma_values.len() {
        for (c, z) in back.summary_curve(gi)? {
            println!(
                "Γ = {:4}  c = {c:.1}  mean z = {z:+.4}",
                back.gamma_values[gi]
            );
        }
    }
    Ok(())
}
