//! Macroscopic self-trapping in the closed system, solved both as a
//! master equation and as the two-mode Gross–Pitaevskii equation.

use duetdyn::analysis::{self_trapping_indicator, window_summary};
use duetdyn::validate::gpe_population_gap;
use duetdyn::{
    density_from_initial, evolve, evolve_gpe, InitialState, IntegratorConfig, ModelParams, TimeGrid,
};

fn main() -> duetdyn::Result<()> {
    let grid = TimeGrid::new(50.0, 1e-3, 10)?;
    let cfg = IntegratorConfig::default();
    let init = InitialState::right();
    for c in [1.0, 1.9, 2.1, 3.0] {
        let p = ModelParams::closed(c);
        let me = evolve(&density_from_initial(&init)?, &p, &grid, &cfg)?;
        let gpe = evolve_gpe(&init, &p, &grid, &cfg)?;
        let w = window_summary(&me, 25.0, 50.0)?;
        println!(
            "c = {c:.1}: trapped {:5}  mean z [25, 50] = {:+.4}  min z = {:+.4}  gap to GPE = {:.1e}",
            self_trapping_indicator(&me, (0.0, 50.0))?,
            w.mean_z,
            w.min_z,
            gpe_population_gap(&me, &gpe),
        );
    }
    Ok(())
}
