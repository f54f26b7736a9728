//! Coherence |ρ_RL| over (c, t) for σ₊ decoherence at Γ = 0.1, written as
//! one CSV per rate the way the plotting scripts expect.
//!
//! Usage: `cargo run --release --example coherence_surface [out_dir]`

use std::path::PathBuf;

use duetdyn::experiment::{figure_preset, run_sweep, write_csv, FigureName};

fn main() -> duetdyn::Result<()> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let spec = figure_preset(FigureName::Fig3);
    let result = run_sweep(&spec)?;
    for (gi, &rate) in result.gamma_values.iter().enumerate() {
        let path = out_dir.join(format!("coherence_gamma{rate}.csv"));
        let rows = write_csv(result.gamma_slice(gi), &path)?;
        println!("wrote {rows} rows to {}", path.display());
    }
    for cell in result.gamma_slice(0).iter().step_by(50) {
        let summary = cell.summary.as_ref().expect("cell succeeded");
        println!(
            "c = {:.2}: mean coherence over {:?} = {:.4}",
            cell.c, summary.window, summary.mean_coherence
        );
    }
    Ok(())
}
