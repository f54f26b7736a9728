//! Time stepping for the master equation and for the closed two-mode
//! Gross–Pitaevskii equation.
//!
//! Two methods are available: classic fixed-step RK4, and an embedded
//! Dormand–Prince 5(4) pair with standard step-size control. Both act on
//! small fixed-size complex matrices (the 2×2 density matrix or the
//! amplitude 2-vector). Physics guards run after every step.

use std::ops::ControlFlow;

use nalgebra::{SMatrix, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    build_hamiltonian, DensityMatrix, InitialState, MasterEquation, ModelParams, Op2, C64,
};

/// Default fixed step, units of 1/V.
pub const DEFAULT_DT: f64 = 1e-3;
/// Default run length for trajectory figures, units of 1/V.
pub const DEFAULT_T_FINAL: f64 = 50.0;
/// Default run length for long-time (steady-state) claims, units of 1/V.
pub const DEFAULT_T_STEADY: f64 = 200.0;
/// Maximum tolerated drift of |a_R|² + |a_L|² in [`evolve_gpe`].
pub const NORM_GUARD: f64 = 1e-8;
/// Dwell time, in units of 1/V, over which the steady-state criterion must hold.
pub const STEADY_DWELL: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_final: f64,
    pub dt: f64,
    #[serde(default = "unit_stride")]
    pub record_stride: usize,
}

fn unit_stride() -> usize {
    1
}

impl TimeGrid {
    pub fn new(t_final: f64, dt: f64, record_stride: usize) -> Result<Self> {
        let grid = TimeGrid {
            t_final,
            dt,
            record_stride,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::validation(format!(
                "t_final must be > 0, got {}",
                self.t_final
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::validation(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if self.dt > self.t_final {
            return Err(Error::validation("dt must not exceed t_final"));
        }
        if self.record_stride == 0 {
            return Err(Error::validation("record_stride must be >= 1"));
        }
        Ok(())
    }

    /// Number of uniform steps and their size for the fixed-step method.
    /// The size never exceeds `dt` and the last step lands on `t_final`.
    pub fn fixed_steps(&self) -> (usize, f64) {
        let ratio = self.t_final / self.dt;
        let n = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
            ratio.round()
        } else {
            ratio.ceil()
        } as usize;
        let n = n.max(1);
        (n, self.t_final / n as f64)
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            t_final: DEFAULT_T_FINAL,
            dt: DEFAULT_DT,
            record_stride: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum allowed |tr ρ − 1|.
    pub trace_guard: f64,
    /// Maximum allowed magnitude of a negative eigenvalue of ρ.
    pub positivity_guard: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk4Fixed,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            trace_guard: 1e-9,
            positivity_guard: 1e-9,
        }
    }
}

impl IntegratorConfig {
    pub fn adaptive(abs_tol: f64, rel_tol: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45Adaptive,
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.abs_tol,
            self.rel_tol,
            self.trace_guard,
            self.positivity_guard,
        ];
        if all.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::validation("integrator tolerances must be > 0"));
        }
        Ok(())
    }

    /// Checks trace and positivity guards for a state at time `t`.
    pub fn check_guards(&self, t: f64, rho: &DensityMatrix) -> Result<()> {
        let drift = (rho.trace() - C64::new(1.0, 0.0)).norm();
        if !(drift <= self.trace_guard) {
            return Err(Error::TraceDrift {
                t,
                drift,
                guard: self.trace_guard,
            });
        }
        let eigenvalue = rho.min_eigenvalue();
        if !(eigenvalue >= -self.positivity_guard) {
            return Err(Error::PositivityViolation {
                t,
                eigenvalue,
                guard: self.positivity_guard,
            });
        }
        Ok(())
    }
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub rho: DensityMatrix,
    /// ρ_RR − ρ_LL
    pub z: f64,
    /// |ρ_RL|
    pub coherence: f64,
    /// tr ρ²
    pub purity: f64,
}

impl Sample {
    pub fn new(t: f64, rho: DensityMatrix) -> Self {
        Sample {
            t,
            rho,
            z: rho.imbalance(),
            coherence: rho.coherence(),
            purity: rho.purity(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    samples: Vec<Sample>,
}

impl Trajectory {
    /// Wraps samples, requiring strictly increasing times.
    pub fn from_samples(samples: Vec<Sample>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::validation(
                "trajectory times must be strictly increasing",
            ));
        }
        Ok(Trajectory { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// (first t, last t), or None for an empty trajectory.
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.first()?.t, self.last()?.t))
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }
}

type State<const R: usize, const C: usize> = SMatrix<C64, R, C>;

fn scaled<const R: usize, const C: usize>(y: &State<R, C>, h: f64) -> State<R, C> {
    y.map(|v| v * h)
}

fn rk4_step<const R: usize, const C: usize>(
    f: &impl Fn(&State<R, C>) -> State<R, C>,
    y: &State<R, C>,
    h: f64,
) -> State<R, C> {
    let k1 = f(y);
    let k2 = f(&(y + scaled(&k1, 0.5 * h)));
    let k3 = f(&(y + scaled(&k2, 0.5 * h)));
    let k4 = f(&(y + scaled(&k3, h)));
    y + scaled(&(k1 + scaled(&k2, 2.0) + scaled(&k3, 2.0) + k4), h / 6.0)
}

// Dormand–Prince 5(4) tableau
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus fourth-order weights
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step. Returns the fifth-order solution and the
/// local error estimate.
fn dp45_step<const R: usize, const C: usize>(
    f: &impl Fn(&State<R, C>) -> State<R, C>,
    y: &State<R, C>,
    h: f64,
) -> (State<R, C>, State<R, C>) {
    let mut k: [State<R, C>; 7] = [State::<R, C>::zeros(); 7];
    k[0] = f(y);
    for stage in 0..6 {
        let mut acc = *y;
        for (j, a) in DP_A[stage].iter().enumerate().take(stage + 1) {
            if *a != 0.0 {
                acc += scaled(&k[j], h * a);
            }
        }
        k[stage + 1] = f(&acc);
    }
    // FSAL: the last stage argument is the fifth-order solution
    let mut y_new = *y;
    for (j, a) in DP_A[5].iter().enumerate() {
        if *a != 0.0 {
            y_new += scaled(&k[j], h * a);
        }
    }
    let mut err = State::<R, C>::zeros();
    for (j, e) in DP_E.iter().enumerate() {
        if *e != 0.0 {
            err += scaled(&k[j], h * e);
        }
    }
    (y_new, err)
}

fn error_norm<const R: usize, const C: usize>(
    err: &State<R, C>,
    y: &State<R, C>,
    y_new: &State<R, C>,
    cfg: &IntegratorConfig,
) -> f64 {
    err.iter()
        .zip(y.iter().zip(y_new.iter()))
        .map(|(e, (a, b))| e.norm() / (cfg.abs_tol + cfg.rel_tol * a.norm().max(b.norm())))
        .fold(0.0, f64::max)
}

/// Drives an ODE over `[0, t_final]`, calling `on_step` after every step
/// with the current time, state and whether the point is a record point.
/// `on_step` is also called once at t = 0 (always a record point).
fn drive<const R: usize, const C: usize>(
    f: impl Fn(&State<R, C>) -> State<R, C>,
    y0: State<R, C>,
    grid: &TimeGrid,
    cfg: &IntegratorConfig,
    mut on_step: impl FnMut(f64, &State<R, C>, bool) -> Result<ControlFlow<()>>,
) -> Result<()> {
    if on_step(0.0, &y0, true)?.is_break() {
        return Ok(());
    }
    let stride = grid.record_stride;
    match cfg.method {
        Method::Rk4Fixed => {
            let (n, h) = grid.fixed_steps();
            let mut y = y0;
            for k in 1..=n {
                y = rk4_step(&f, &y, h);
                let t = if k == n { grid.t_final } else { k as f64 * h };
                if on_step(t, &y, k.is_multiple_of(stride) || k == n)?.is_break() {
                    return Ok(());
                }
            }
        }
        Method::Rk45Adaptive => {
            let t_final = grid.t_final;
            let mut y = y0;
            let mut t = 0.0;
            let mut h = grid.dt;
            let mut accepted = 0usize;
            while t < t_final {
                let floor = 1e-12 * t.abs().max(1.0);
                if h < floor {
                    return Err(Error::StepUnderflow { t, dt: h });
                }
                let last = t + h >= t_final * (1.0 - 1e-14);
                let step = if last { t_final - t } else { h };
                let (y_new, err) = dp45_step(&f, &y, step);
                let norm = error_norm(&err, &y, &y_new, cfg);
                let factor = if norm == 0.0 {
                    5.0
                } else {
                    (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                if norm <= 1.0 {
                    y = y_new;
                    t = if last { t_final } else { t + step };
                    accepted += 1;
                    let record = accepted.is_multiple_of(stride) || t >= t_final;
                    if on_step(t, &y, record)?.is_break() {
                        return Ok(());
                    }
                    h = step * factor;
                } else {
                    h = step * factor.min(1.0);
                }
            }
        }
    }
    Ok(())
}

/// Integrates the master equation from `rho0` over `grid`.
pub fn evolve(
    rho0: &DensityMatrix,
    params: &ModelParams,
    grid: &TimeGrid,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    rho0.validate()?;
    grid.validate()?;
    cfg.validate()?;
    let eq = MasterEquation::new(params)?;
    let mut samples = Vec::new();
    drive(
        |m: &Op2| eq.derivative(m),
        rho0.to_matrix(),
        grid,
        cfg,
        |t, m, record| {
            let rho = DensityMatrix::from_matrix(m);
            cfg.check_guards(t, &rho)?;
            if record {
                samples.push(Sample::new(t, rho));
            }
            Ok(ControlFlow::Continue(()))
        },
    )?;
    Ok(Trajectory { samples })
}

/// Integrates the closed two-mode Gross–Pitaevskii equation
/// i d/dt (a_R, a_L) = H(a) (a_R, a_L). The decoherence rate in `params`
/// is ignored.
pub fn evolve_gpe(
    init: &InitialState,
    params: &ModelParams,
    grid: &TimeGrid,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    init.validate()?;
    grid.validate()?;
    cfg.validate()?;
    let closed = ModelParams {
        decoherence_rate: 0.0,
        ..*params
    };
    closed.validate()?;
    let (a_r, a_l) = init.amplitudes();
    let minus_i = C64::new(0.0, -1.0);
    let f = |a: &Vector2<C64>| {
        let rho = DensityMatrix::from_amplitudes(a[0], a[1]);
        build_hamiltonian(&rho, &closed) * a * minus_i
    };
    let mut samples = Vec::new();
    drive(f, Vector2::new(a_r, a_l), grid, cfg, |t, a, record| {
        let drift = (a.norm_squared() - 1.0).abs();
        if !(drift <= NORM_GUARD) {
            return Err(Error::NormDrift { t, drift });
        }
        if record {
            samples.push(Sample::new(t, DensityMatrix::from_amplitudes(a[0], a[1])));
        }
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(Trajectory { samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// Start of the dwell window (or `t_max` when not converged).
    pub t: f64,
    pub converged: bool,
}

/// Integrates until ‖dρ/dt‖_F < `eps` has held for [`STEADY_DWELL`]/V.
///
/// Returns the state at the start of that dwell window, or the state at
/// `t_max` flagged as not converged.
pub fn steady_state(
    rho0: &DensityMatrix,
    params: &ModelParams,
    cfg: &IntegratorConfig,
    t_max: f64,
    eps: f64,
) -> Result<SteadyState> {
    if !(params.decoherence_rate > 0.0) {
        return Err(Error::validation(
            "steady state requires a decoherence rate > 0",
        ));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::validation("eps must be > 0"));
    }
    rho0.validate()?;
    cfg.validate()?;
    let eq = MasterEquation::new(params)?;
    let grid = TimeGrid::new(t_max, DEFAULT_DT.min(t_max), 1)?;
    let dwell = STEADY_DWELL / params.v;
    let mut candidate: Option<(f64, DensityMatrix)> = None;
    let mut result = None;
    let mut last = *rho0;
    drive(
        |m: &Op2| eq.derivative(m),
        rho0.to_matrix(),
        &grid,
        cfg,
        |t, m, _| {
            let rho = DensityMatrix::from_matrix(m);
            cfg.check_guards(t, &rho)?;
            last = rho;
            if eq.derivative(m).norm() < eps {
                let (t0, rho0) = *candidate.get_or_insert((t, rho));
                if t - t0 >= dwell {
                    result = Some(SteadyState {
                        rho: rho0,
                        t: t0,
                        converged: true,
                    });
                    return Ok(ControlFlow::Break(()));
                }
            } else {
                candidate = None;
            }
            Ok(ControlFlow::Continue(()))
        },
    )?;
    Ok(result.unwrap_or(SteadyState {
        rho: last,
        t: t_max,
        converged: false,
    }))
}
