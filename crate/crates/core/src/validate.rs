//! Self-validation suite backing the `validate` subcommand.
//!
//! Each check exercises a property the model or the integrator must satisfy
//! and reports a one-line verdict.

use std::f64::consts::TAU;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::integrator::{evolve, evolve_gpe, IntegratorConfig, TimeGrid, Trajectory};
use crate::model::{
    bloch_from_density, bloch_rhs, closed_energy, density_from_bloch, density_from_initial, pauli,
    rhs, BlochVector, DensityMatrix, InitialState, LindbladSpec, ModelParams, Op2, C64,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check {
            name,
            passed,
            detail,
        }
    }

    fn from_result(name: &'static str, outcome: Result<(bool, String)>) -> Self {
        match outcome {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

/// Uniform random point in the unit Bloch ball.
pub fn random_bloch(rng: &mut impl Rng) -> BlochVector {
    loop {
        let s = BlochVector::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if s.norm_sqr() <= 1.0 {
            return s;
        }
    }
}

/// Random parameters with a random (possibly complex) Lindblad operator.
pub fn random_params(rng: &mut impl Rng) -> ModelParams {
    let mut lambda = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let lindblad =
        LindbladSpec::custom([lambda(), lambda(), lambda()]).with_scale(rng.gen_range(0.1..2.0));
    ModelParams::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.0..1.0), lindblad)
        .with_bias(rng.gen_range(-1.0..1.0))
        .with_v(rng.gen_range(0.2..2.0))
}

/// Bloch components tr(σ_k M) of a traceless operator.
pub fn bloch_components(m: &Op2) -> [f64; 3] {
    [
        (pauli::sigma_x() * m).trace().re,
        (pauli::sigma_y() * m).trace().re,
        (pauli::sigma_z() * m).trace().re,
    ]
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check_rhs_structure(rng: &mut StdRng, states: usize) -> Result<(bool, String)> {
    let (mut worst_trace, mut worst_herm) = (0.0f64, 0.0f64);
    for _ in 0..states {
        let rho = density_from_bloch(&random_bloch(rng))?;
        let d = rhs(&rho, &random_params(rng))?;
        worst_trace = worst_trace.max(d.trace().norm());
        worst_herm = worst_herm.max((d - d.adjoint()).norm());
    }
    Ok((
        worst_trace <= 1e-14 && worst_herm <= 1e-14,
        format!("max |tr| = {worst_trace:.1e}, max |D − D†| = {worst_herm:.1e}"),
    ))
}

fn check_energy_identity(rng: &mut StdRng, states: usize) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..states {
        let s = random_bloch(rng);
        let rho = density_from_bloch(&s)?;
        let p = ModelParams {
            decoherence_rate: 0.0,
            ..random_params(rng)
        };
        // ∂E/∂ρ = ((c/2)sz + γ/2) σz + (V/2) σx
        let grad = pauli::sigma_z() * C64::new(0.5 * p.c * s.sz + 0.5 * p.bias, 0.0)
            + pauli::sigma_x() * C64::new(0.5 * p.v, 0.0);
        let d = rhs(&rho, &p)?;
        worst = worst.max((grad * d).trace().norm());
    }
    Ok((worst <= 1e-12, format!("max |dE/dt| = {worst:.1e}")))
}

fn check_bloch_equivalence(rng: &mut StdRng, states: usize) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..states {
        let s = random_bloch(rng);
        let p = random_params(rng);
        let matrix = bloch_components(&rhs(&density_from_bloch(&s)?, &p)?);
        let direct = bloch_rhs(&s, &p);
        worst = worst.max(max_abs((0..3).map(|k| matrix[k] - direct[k])));
    }
    Ok((worst <= 1e-12, format!("max deviation = {worst:.1e}")))
}

fn check_rabi() -> Result<(bool, String)> {
    let grid = TimeGrid::new(20.0, 1e-3, 10)?;
    let traj = evolve(
        &DensityMatrix::right(),
        &ModelParams::closed(0.0),
        &grid,
        &IntegratorConfig::default(),
    )?;
    let worst = max_abs(traj.samples().iter().map(|s| s.z - s.t.cos()));
    Ok((worst < 1e-6, format!("max |z − cos t| = {worst:.1e}")))
}

fn energy_of(s: &crate::integrator::Sample, p: &ModelParams) -> Result<f64> {
    Ok(closed_energy(&bloch_from_density(&s.rho)?, p))
}

fn check_conservation() -> Result<(bool, String)> {
    let p = ModelParams::closed(3.0);
    let grid = TimeGrid::new(50.0, 1e-3, 10)?;
    let rho0 = density_from_initial(&InitialState::new(0.6, 0.0)?)?;
    let traj = evolve(&rho0, &p, &grid, &IntegratorConfig::default())?;
    let e0 = energy_of(&traj.samples()[0], &p)?;
    let (mut tr, mut pur, mut de) = (0.0f64, 0.0f64, 0.0f64);
    for s in traj.samples() {
        tr = tr.max((s.rho.trace() - C64::new(1.0, 0.0)).norm());
        pur = pur.max((s.purity - 1.0).abs());
        de = de.max((energy_of(s, &p)? - e0).abs());
    }
    Ok((
        tr < 1e-10 && pur < 1e-8 && de < 1e-7,
        format!("trace {tr:.1e}, purity {pur:.1e}, energy {de:.1e}"),
    ))
}

/// Largest population difference between the master equation at Γ = 0 and
/// the amplitude equation, over shared sample times.
pub fn gpe_population_gap(a: &Trajectory, b: &Trajectory) -> f64 {
    a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| {
            debug_assert_eq!(x.t, y.t);
            (x.rho.rr.re - y.rho.rr.re)
                .abs()
                .max((x.rho.ll.re - y.rho.ll.re).abs())
        })
        .fold(0.0, f64::max)
}

fn check_gpe_equivalence(rng: &mut StdRng) -> Result<(bool, String)> {
    let grid = TimeGrid::new(20.0, 1e-3, 10)?;
    let cfg = IntegratorConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = ModelParams::closed(rng.gen_range(0.0..4.0));
        let init = InitialState::new(rng.gen_range(-1.0..=1.0), rng.gen_range(0.0..TAU))?;
        let me = evolve(&density_from_initial(&init)?, &p, &grid, &cfg)?;
        let gpe = evolve_gpe(&init, &p, &grid, &cfg)?;
        worst = worst.max(gpe_population_gap(&me, &gpe));
    }
    Ok((worst < 1e-8, format!("max population gap = {worst:.1e}")))
}

/// Error ratio e(h)/e(h/2) of RK4 against an h/16 reference on the closed
/// c = 3V, z0 = 1 trajectory.
pub fn rk4_halving_ratio(h: f64, t_final: f64) -> Result<f64> {
    let p = ModelParams::closed(3.0);
    let cfg = IntegratorConfig::default();
    let run = |dt: f64| -> Result<Op2> {
        let grid = TimeGrid::new(t_final, dt, usize::MAX)?;
        let traj = evolve(&DensityMatrix::right(), &p, &grid, &cfg)?;
        Ok(traj.last().expect("final sample").rho.to_matrix())
    };
    let reference = run(h / 16.0)?;
    let coarse = (run(h)? - reference).norm();
    let fine = (run(h / 2.0)? - reference).norm();
    Ok(coarse / fine)
}

fn check_rk4_order() -> Result<(bool, String)> {
    let ratio = rk4_halving_ratio(0.02, 10.0)?;
    Ok((
        (12.0..=20.0).contains(&ratio),
        format!("ratio = {ratio:.2}"),
    ))
}

fn check_sigma_x_fixed_point() -> Result<(bool, String)> {
    let p = ModelParams::new(3.0, 0.01, LindbladSpec::sigma_x());
    let d = rhs(&DensityMatrix::maximally_mixed(), &p)?;
    Ok((d == Op2::zeros(), format!("‖rhs(I/2)‖ = {:.1e}", d.norm())))
}

fn check_self_trapping() -> Result<(bool, String)> {
    let grid = TimeGrid::new(50.0, 1e-3, 10)?;
    let traj = evolve(
        &DensityMatrix::right(),
        &ModelParams::closed(3.0),
        &grid,
        &IntegratorConfig::default(),
    )?;
    let min_z = traj
        .samples()
        .iter()
        .map(|s| s.z)
        .fold(f64::INFINITY, f64::min);
    Ok((min_z > 0.0, format!("min z = {min_z:.4}")))
}

/// Runs every check with a fixed seed.
pub fn run_suite() -> Vec<Check> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    vec![
        Check::from_result(
            "rhs traceless and Hermitian",
            check_rhs_structure(&mut rng, 1000),
        ),
        Check::from_result(
            "closed energy identity",
            check_energy_identity(&mut rng, 1000),
        ),
        Check::from_result(
            "Bloch-form equivalence",
            check_bloch_equivalence(&mut rng, 1000),
        ),
        Check::from_result("Rabi oracle", check_rabi()),
        Check::from_result("closed-system conservation", check_conservation()),
        Check::from_result("GPE oracle equivalence", check_gpe_equivalence(&mut rng)),
        Check::from_result("RK4 order", check_rk4_order()),
        Check::from_result("sigma_x fixed point", check_sigma_x_fixed_point()),
        Check::from_result("closed self-trapping", check_self_trapping()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bloch_components_of_pauli() {
        let two = C64::new(2.0, 0.0);
        assert_eq!(bloch_components(&pauli::sigma_x()), [2.0, 0.0, 0.0]);
        assert_eq!(bloch_components(&(pauli::sigma_y() * two)), [0.0, 4.0, 0.0]);
    }

    #[test]
    fn suite_passes() {
        for check in run_suite() {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
    }
}
