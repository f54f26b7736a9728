//! Linear Rabi oscillation: with c = 0 and no decoherence the imbalance
//! follows cos(Vt) exactly.

use duetdyn::{evolve, DensityMatrix, IntegratorConfig, ModelParams, TimeGrid};

fn main() -> duetdyn::Result<()> {
    let grid = TimeGrid::new(4.0 * std::f64::consts::PI, 1e-3, 500)?;
    let traj = evolve(
        &DensityMatrix::right(),
        &ModelParams::closed(0.0),
        &grid,
        &IntegratorConfig::default(),
    )?;
    println!("{:>8} {:>12} {:>12} {:>10}", "t", "z", "cos t", "|error|");
    for s in traj.samples() {
        println!(
            "{:8.4} {:12.8} {:12.8} {:10.2e}",
            s.t,
            s.z,
            s.t.cos(),
            (s.z - s.t.cos()).abs()
        );
    }
    Ok(())
}
