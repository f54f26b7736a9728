//! Symmetric σx decoherence: self-trapping survives for a while, then the
//! state relaxes to the maximally mixed fixed point.

use duetdyn::analysis::{self_trapping_indicator, window_summary};
use duetdyn::{evolve, DensityMatrix, IntegratorConfig, LindbladSpec, ModelParams, TimeGrid};

fn main() -> duetdyn::Result<()> {
    let p = ModelParams::new(3.0, 0.01, LindbladSpec::sigma_x());
    let traj = evolve(
        &DensityMatrix::right(),
        &p,
        &TimeGrid::new(300.0, 1e-3, 100)?,
        &IntegratorConfig::default(),
    )?;
    for window in [(0.0, 30.0), (50.0, 100.0), (150.0, 200.0), (250.0, 300.0)] {
        let w = window_summary(&traj, window.0, window.1)?;
        println!(
            "{window:?}: trapped {:5}  mean z {:+.4}  mean |ρ_RL| {:.4}",
            self_trapping_indicator(&traj, window)?,
            w.mean_z,
            w.mean_coherence
        );
    }
    let last = traj.last().expect("final sample");
    println!(
        "t = {}: purity {:.4}, z {:+.2e}",
        last.t, last.purity, last.z
    );
    Ok(())
}
