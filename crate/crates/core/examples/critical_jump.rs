//! Sweeps c at several σ₊ decoherence rates and locates the jump in the
//! time-averaged imbalance.
//!
//! Run with `cargo run --release --example critical_jump`.

use duetdyn::analysis::{detect_critical_c, jump_sharpness_vs_gamma, DEFAULT_SHARPNESS_FLOOR};
use duetdyn::experiment::{run_sweep, Axis, Observable, SweepSpec};
use duetdyn::{InitialState, IntegratorConfig, LindbladSpec, ModelParams, TimeGrid};

fn main() -> duetdyn::Result<()> {
    let spec = SweepSpec {
        base: ModelParams::new(0.0, 0.0, LindbladSpec::sigma_plus()),
        c_axis: Axis::new(0.0, 4.0, 101),
        gamma_axis: vec![0.0, 0.1, 0.3, 0.5],
        init: InitialState::right(),
        grid: TimeGrid::new(50.0, 1e-3, 100)?,
        cfg: IntegratorConfig::default(),
        observables: vec![Observable::Z],
        summary_window: (25.0, 50.0),
    };
    let result = run_sweep(&spec)?;
    let mut curves = Vec::new();
    for (gi, &rate) in result.gamma_values.iter().enumerate() {
        let curve = result.summary_curve(gi)?;
        let rep = detect_critical_c(&curve, DEFAULT_SHARPNESS_FLOOR)?;
        match rep.c_star {
            Some(c) => println!(
                "Γ = {rate}: jump at c = {c:.3} (sharpness {:.2})",
                rep.sharpness
            ),
            None => println!("Γ = {rate}: no jump (sharpness {:.2})", rep.sharpness),
        }
        curves.push((rate, curve));
    }
    for (rate, s) in jump_sharpness_vs_gamma(&curves)? {
        println!("sharpness(Γ = {rate}) = {s:.3}");
    }
    Ok(())
}
