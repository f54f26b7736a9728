//! A custom condensate operator A = λ·σ, here a mix of tunnelling and
//! dephasing noise, integrated with the adaptive solver.

use duetdyn::{
    build_lindblad_operator, evolve, DensityMatrix, IntegratorConfig, LindbladSpec, ModelParams,
    TimeGrid, C64,
};

fn main() -> duetdyn::Result<()> {
    let op = LindbladSpec::custom([C64::new(0.5, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0)]);
    println!("A = {}", build_lindblad_operator(&op)?);
    let p = ModelParams::new(2.5, 0.05, op).with_bias(0.2);
    let traj = evolve(
        &DensityMatrix::right(),
        &p,
        &TimeGrid::new(60.0, 0.5, 1)?,
        &IntegratorConfig::adaptive(1e-10, 1e-10),
    )?;
    for s in traj.samples().iter().step_by(10) {
        println!(
            "t = {:5.1}  z = {:+.5}  |ρ_RL| = {:.5}  purity = {:.5}",
            s.t, s.z, s.coherence, s.purity
        );
    }
    Ok(())
}
