//! Long-time states for each preset operator at Γ = 0.1, c = V.

use duetdyn::{
    bloch_from_density, steady_state, DensityMatrix, IntegratorConfig, LindbladSpec, ModelParams,
};

fn main() -> duetdyn::Result<()> {
    let cfg = IntegratorConfig::default();
    for (name, op) in [
        ("sigma_plus", LindbladSpec::sigma_plus()),
        ("sigma_x", LindbladSpec::sigma_x()),
        ("sigma_z", LindbladSpec::sigma_z()),
    ] {
        let p = ModelParams::new(1.0, 0.1, op);
        let ss = steady_state(&DensityMatrix::right(), &p, &cfg, 1000.0, 1e-8)?;
        let s = bloch_from_density(&ss.rho)?;
        println!(
            "{name:>10}: converged {:5} at t = {:7.2}  s = ({:+.6}, {:+.6}, {:+.6})  purity {:.6}",
            ss.converged,
            ss.t,
            s.sx,
            s.sy,
            s.sz,
            ss.rho.purity()
        );
    }
    Ok(())
}
