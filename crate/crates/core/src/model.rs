//! Two-mode condensate model: state types, basis conventions and the
//! right-hand side of the mean-field master equation.
//!
//! Basis order is (|R⟩, |L⟩). Pauli matrices in this basis:
//!
//! ```text
//! σx = |R⟩⟨L| + |L⟩⟨R|         = [[0, 1], [1, 0]]
//! σy = −i|R⟩⟨L| + i|L⟩⟨R|      = [[0, −i], [i, 0]]
//! σz = |R⟩⟨R| − |L⟩⟨L|         = [[1, 0], [0, −1]]
//! ```
//!
//! With this choice σ₊ = σx + iσy = 2|R⟩⟨L| moves population from the left
//! well into the right well.
//!
//! The generator is stored in real-time form,
//!
//! ```text
//! dρ/dt = −i[H(ρ), ρ] + (Γ/2)(2AρA† − ρA†A − A†Aρ)
//! ```
//!
//! with ħ = 1, energies in units of the tunneling coupling V and time in
//! units of 1/V.

use std::f64::consts::TAU;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A 2×2 complex operator in the (|R⟩, |L⟩) basis.
pub type Op2 = Matrix2<C64>;

/// Tolerance on trace and Hermiticity of a validated [`DensityMatrix`].
pub const STATE_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated by [`DensityMatrix::validate`].
pub const POSITIVITY_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub mod pauli {
    use super::{Op2, I, ONE, ZERO};

    pub fn identity() -> Op2 {
        Op2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn sigma_x() -> Op2 {
        Op2::new(ZERO, ONE, ONE, ZERO)
    }

    pub fn sigma_y() -> Op2 {
        Op2::new(ZERO, -I, I, ZERO)
    }

    pub fn sigma_z() -> Op2 {
        Op2::new(ONE, ZERO, ZERO, -ONE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LindbladPreset {
    /// A = σx + iσy, decay between the two modes.
    SigmaPlus,
    /// A = σx, environment-driven tunneling noise.
    SigmaX,
    /// A = σz, dephasing.
    SigmaZ,
    /// A = λx σx + λy σy + λz σz with user coefficients.
    Custom,
}

/// Specification of the condensate operator A = scale · (λx σx + λy σy + λz σz).
///
/// For the named presets the coefficients are fixed and the stored
/// `lambdas` are ignored; see [`LindbladSpec::coefficients`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladSpec {
    pub preset: LindbladPreset,
    #[serde(default = "zero_lambdas")]
    pub lambdas: [C64; 3],
    #[serde(default = "unit_scale")]
    pub scale: f64,
}

fn zero_lambdas() -> [C64; 3] {
    [ZERO; 3]
}

fn unit_scale() -> f64 {
    1.0
}

impl LindbladSpec {
    pub fn from_preset(preset: LindbladPreset) -> Self {
        let mut spec = LindbladSpec {
            preset,
            lambdas: zero_lambdas(),
            scale: 1.0,
        };
        spec.lambdas = spec.coefficients();
        spec
    }

    pub fn sigma_plus() -> Self {
        Self::from_preset(LindbladPreset::SigmaPlus)
    }

    pub fn sigma_x() -> Self {
        Self::from_preset(LindbladPreset::SigmaX)
    }

    pub fn sigma_z() -> Self {
        Self::from_preset(LindbladPreset::SigmaZ)
    }

    pub fn custom(lambdas: [C64; 3]) -> Self {
        LindbladSpec {
            preset: LindbladPreset::Custom,
            lambdas,
            scale: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Effective (λx, λy, λz), before the scale factor.
    pub fn coefficients(&self) -> [C64; 3] {
        match self.preset {
            LindbladPreset::SigmaPlus => [ONE, I, ZERO],
            LindbladPreset::SigmaX => [ONE, ZERO, ZERO],
            LindbladPreset::SigmaZ => [ZERO, ZERO, ONE],
            LindbladPreset::Custom => self.lambdas,
        }
    }

    /// True when A is the zero operator.
    pub fn is_zero(&self) -> bool {
        self.coefficients().iter().all(|l| l.norm() == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::validation(format!(
                "lindblad scale must be finite and > 0, got {}",
                self.scale
            )));
        }
        if self
            .coefficients()
            .iter()
            .any(|l| !(l.re.is_finite() && l.im.is_finite()))
        {
            return Err(Error::validation("lindblad coefficients must be finite"));
        }
        Ok(())
    }
}

/// Physical parameters of the double-well model, all in units of `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Energy bias γ between the wells.
    #[serde(default, alias = "gamma")]
    pub bias: f64,
    /// Nonlinear self-interaction c.
    #[serde(default)]
    pub c: f64,
    /// Inter-well coupling V.
    #[serde(default = "unit_scale")]
    pub v: f64,
    /// Decoherence rate Γ.
    #[serde(default)]
    pub decoherence_rate: f64,
    pub lindblad: LindbladSpec,
}

impl ModelParams {
    /// Symmetric well (γ = 0) with V = 1.
    pub fn new(c: f64, decoherence_rate: f64, lindblad: LindbladSpec) -> Self {
        ModelParams {
            bias: 0.0,
            c,
            v: 1.0,
            decoherence_rate,
            lindblad,
        }
    }

    /// Closed system with no decoherence.
    pub fn closed(c: f64) -> Self {
        Self::new(c, 0.0, LindbladSpec::sigma_x())
    }

    pub fn with_bias(mut self, bias: f64) -> Self {
        self.bias = bias;
        self
    }

    pub fn with_v(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn with_decoherence(mut self, rate: f64, lindblad: LindbladSpec) -> Self {
        self.decoherence_rate = rate;
        self.lindblad = lindblad;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v.is_finite() && self.v > 0.0) {
            return Err(Error::validation(format!("v must be > 0, got {}", self.v)));
        }
        if !(self.decoherence_rate.is_finite() && self.decoherence_rate >= 0.0) {
            return Err(Error::validation(format!(
                "decoherence rate must be >= 0, got {}",
                self.decoherence_rate
            )));
        }
        if !self.bias.is_finite() || !self.c.is_finite() {
            return Err(Error::validation("bias and c must be finite"));
        }
        self.lindblad.validate()?;
        if self.decoherence_rate > 0.0 && self.lindblad.is_zero() {
            return Err(Error::validation(
                "decoherence rate > 0 requires a nonzero lindblad operator",
            ));
        }
        Ok(())
    }
}

/// Density matrix of the two-mode condensate, basis (|R⟩, |L⟩).
///
/// `rl` is ⟨R|ρ|L⟩ and `lr` is ⟨L|ρ|R⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub rr: C64,
    pub rl: C64,
    pub lr: C64,
    pub ll: C64,
}

impl DensityMatrix {
    /// Builds and validates a density matrix.
    pub fn new(rr: C64, rl: C64, lr: C64, ll: C64) -> Result<Self> {
        let rho = DensityMatrix { rr, rl, lr, ll };
        rho.validate()?;
        Ok(rho)
    }

    /// Pure state |φ⟩⟨φ| for |φ⟩ = a_R|R⟩ + a_L|L⟩. Not normalized here.
    pub fn from_amplitudes(a_r: C64, a_l: C64) -> Self {
        DensityMatrix {
            rr: a_r * a_r.conj(),
            rl: a_r * a_l.conj(),
            lr: a_l * a_r.conj(),
            ll: a_l * a_l.conj(),
        }
    }

    /// All atoms in the right well.
    pub fn right() -> Self {
        DensityMatrix::from_amplitudes(ONE, ZERO)
    }

    /// All atoms in the left well.
    pub fn left() -> Self {
        DensityMatrix::from_amplitudes(ZERO, ONE)
    }

    /// I/2.
    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            rr: C64::new(0.5, 0.0),
            rl: ZERO,
            lr: ZERO,
            ll: C64::new(0.5, 0.0),
        }
    }

    pub fn from_matrix(m: &Op2) -> Self {
        DensityMatrix {
            rr: m[(0, 0)],
            rl: m[(0, 1)],
            lr: m[(1, 0)],
            ll: m[(1, 1)],
        }
    }

    pub fn to_matrix(&self) -> Op2 {
        Op2::new(self.rr, self.rl, self.lr, self.ll)
    }

    pub fn trace(&self) -> C64 {
        self.rr + self.ll
    }

    /// Population imbalance z = ρ_RR − ρ_LL.
    pub fn imbalance(&self) -> f64 {
        (self.rr - self.ll).re
    }

    /// |ρ_RL|.
    pub fn coherence(&self) -> f64 {
        self.rl.norm()
    }

    /// tr ρ².
    pub fn purity(&self) -> f64 {
        (self.rr * self.rr + self.rl * self.lr + self.lr * self.rl + self.ll * self.ll).re
    }

    /// max(|lr − conj(rl)|, |Im rr|, |Im ll|).
    pub fn hermiticity_error(&self) -> f64 {
        (self.lr - self.rl.conj())
            .norm()
            .max(self.rr.im.abs())
            .max(self.ll.im.abs())
    }

    /// Smaller eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let tr = self.rr.re + self.ll.re;
        let off = 0.5 * (self.rl + self.lr.conj());
        let disc = ((self.rr.re - self.ll.re).powi(2) + 4.0 * off.norm_sqr()).sqrt();
        0.5 * (tr - disc)
    }

    pub fn validate(&self) -> Result<()> {
        let entries = [self.rr, self.rl, self.lr, self.ll];
        if entries
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::validation("density matrix has non-finite entries"));
        }
        let herm = self.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::validation(format!(
                "density matrix is not Hermitian (error {herm:.3e})"
            )));
        }
        let drift = (self.trace() - ONE).norm();
        if drift > STATE_TOL {
            return Err(Error::validation(format!(
                "density matrix trace differs from 1 by {drift:.3e}"
            )));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::validation(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(())
    }
}

/// Real Bloch-vector parametrization ρ = (I + sx σx + sy σy + sz σz)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl BlochVector {
    pub fn new(sx: f64, sy: f64, sz: f64) -> Self {
        BlochVector { sx, sy, sz }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sx * self.sx + self.sy * self.sy + self.sz * self.sz
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.sx, self.sy, self.sz]
    }
}

/// Initial population imbalance and relative phase of a pure two-mode state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub z0: f64,
    #[serde(default)]
    pub theta0: f64,
}

impl InitialState {
    pub fn new(z0: f64, theta0: f64) -> Result<Self> {
        let init = InitialState { z0, theta0 };
        init.validate()?;
        Ok(init)
    }

    /// Everything in the right well.
    pub fn right() -> Self {
        InitialState {
            z0: 1.0,
            theta0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.z0) {
            return Err(Error::validation(format!(
                "z0 must lie in [-1, 1], got {}",
                self.z0
            )));
        }
        if !(0.0..TAU).contains(&self.theta0) {
            return Err(Error::validation(format!(
                "theta0 must lie in [0, 2π), got {}",
                self.theta0
            )));
        }
        Ok(())
    }

    /// (a_R, a_L) with a_R = √((1+z0)/2) and a_L = √((1−z0)/2)·e^{iθ0}.
    pub fn amplitudes(&self) -> (C64, C64) {
        let a_r = ((1.0 + self.z0) / 2.0).sqrt();
        let a_l = C64::from_polar(((1.0 - self.z0) / 2.0).sqrt(), self.theta0);
        (C64::new(a_r, 0.0), a_l)
    }
}

pub fn density_from_initial(init: &InitialState) -> Result<DensityMatrix> {
    init.validate()?;
    let (a_r, a_l) = init.amplitudes();
    Ok(DensityMatrix::from_amplitudes(a_r, a_l))
}

pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector> {
    let herm = rho.hermiticity_error();
    if herm > STATE_TOL {
        return Err(Error::validation(format!(
            "density matrix is not Hermitian (error {herm:.3e})"
        )));
    }
    Ok(BlochVector {
        sx: 2.0 * rho.rl.re,
        sy: -2.0 * rho.rl.im,
        sz: (rho.rr - rho.ll).re,
    })
}

pub fn density_from_bloch(s: &BlochVector) -> Result<DensityMatrix> {
    if !s.as_array().iter().all(|x| x.is_finite()) {
        return Err(Error::validation("bloch vector must be finite"));
    }
    if s.norm_sqr() > 1.0 + POSITIVITY_TOL {
        return Err(Error::validation(format!(
            "bloch vector lies outside the unit ball (|s|² = {})",
            s.norm_sqr()
        )));
    }
    let rl = C64::new(0.5 * s.sx, -0.5 * s.sy);
    Ok(DensityMatrix {
        rr: C64::new(0.5 * (1.0 + s.sz), 0.0),
        rl,
        lr: rl.conj(),
        ll: C64::new(0.5 * (1.0 - s.sz), 0.0),
    })
}

/// A = scale · (λx σx + λy σy + λz σz).
pub fn build_lindblad_operator(spec: &LindbladSpec) -> Result<Op2> {
    spec.validate()?;
    let [lx, ly, lz] = spec.coefficients();
    let a = pauli::sigma_x() * lx + pauli::sigma_y() * ly + pauli::sigma_z() * lz;
    Ok(a * C64::new(spec.scale, 0.0))
}

fn hamiltonian_for_imbalance(z: f64, params: &ModelParams) -> Op2 {
    let diag = 0.5 * params.bias + 0.5 * params.c * z;
    let off = C64::new(0.5 * params.v, 0.0);
    Op2::new(C64::new(diag, 0.0), off, off, C64::new(-diag, 0.0))
}

/// Nonlinear mean-field Hamiltonian with |a_x|² replaced by ρ_xx.
pub fn build_hamiltonian(rho: &DensityMatrix, params: &ModelParams) -> Op2 {
    hamiltonian_for_imbalance(rho.imbalance(), params)
}

/// (Γ/2)(2AρA† − ρA†A − A†Aρ).
pub fn dissipator(rho: &DensityMatrix, a: &Op2, rate: f64) -> Op2 {
    dissipator_matrix(&rho.to_matrix(), a, &(a.adjoint() * a), rate)
}

fn dissipator_matrix(rho: &Op2, a: &Op2, ada: &Op2, rate: f64) -> Op2 {
    if rate == 0.0 {
        return Op2::zeros();
    }
    let two = C64::new(2.0, 0.0);
    (a * rho * a.adjoint() * two - rho * ada - ada * rho) * C64::new(0.5 * rate, 0.0)
}

/// dρ/dt for the master equation at state `rho`.
pub fn rhs(rho: &DensityMatrix, params: &ModelParams) -> Result<Op2> {
    let eq = MasterEquation::new(params)?;
    Ok(eq.derivative(&rho.to_matrix()))
}

/// Master-equation generator with the Lindblad operator precomputed.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    params: ModelParams,
    a: Op2,
    ada: Op2,
}

impl MasterEquation {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let a = build_lindblad_operator(&params.lindblad)?;
        Ok(MasterEquation {
            params: *params,
            a,
            ada: a.adjoint() * a,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn lindblad_operator(&self) -> &Op2 {
        &self.a
    }

    /// dρ/dt evaluated on a raw matrix (no validation).
    pub fn derivative(&self, rho: &Op2) -> Op2 {
        let z = (rho[(0, 0)] - rho[(1, 1)]).re;
        let h = hamiltonian_for_imbalance(z, &self.params);
        let commutator = h * rho - rho * h;
        commutator * (-I) + dissipator_matrix(rho, &self.a, &self.ada, self.params.decoherence_rate)
    }
}

/// Mean-field energy E = (c/4)sz² + (V/2)sx + (γ/2)sz, conserved when Γ = 0.
pub fn closed_energy(s: &BlochVector, params: &ModelParams) -> f64 {
    0.25 * params.c * s.sz * s.sz + 0.5 * params.v * s.sx + 0.5 * params.bias * s.sz
}

/// Bloch-vector form of the master equation.
///
/// The coherent part is precession ṡ = Ω × s with Ω = (V, 0, γ + c·sz).
/// Writing A = scale·(u + iw)·σ with real u, w, the dissipator contributes
/// Γ·(4 u×w + 2 Re(a (a*·s)) − 2|a|² s).
pub fn bloch_rhs(s: &BlochVector, params: &ModelParams) -> [f64; 3] {
    let [sx, sy, sz] = s.as_array();
    let omega = [params.v, 0.0, params.bias + params.c * sz];
    let mut ds = [
        omega[1] * sz - omega[2] * sy,
        omega[2] * sx - omega[0] * sz,
        omega[0] * sy - omega[1] * sx,
    ];
    let rate = params.decoherence_rate;
    if rate > 0.0 {
        let a = params
            .lindblad
            .coefficients()
            .map(|l| l * params.lindblad.scale);
        let u = a.map(|l| l.re);
        let w = a.map(|l| l.im);
        let uxw = [
            u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0],
        ];
        let a_conj_dot_s = a[0].conj() * sx + a[1].conj() * sy + a[2].conj() * sz;
        let norm_sqr: f64 = a.iter().map(|l| l.norm_sqr()).sum();
        let svec = [sx, sy, sz];
        for k in 0..3 {
            ds[k] +=
                rate * (4.0 * uxw[k] + 2.0 * (a[k] * a_conj_dot_s).re - 2.0 * norm_sqr * svec[k]);
        }
    }
    ds
}
