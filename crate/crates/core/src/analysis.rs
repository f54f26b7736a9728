//! Observables and detectors computed from trajectories and sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{Sample, Trajectory};

/// Slope floor (|Δ mean_z / Δc|, units 1/V) below which no jump is declared.
pub const DEFAULT_SHARPNESS_FLOOR: f64 = 2.0;

const WINDOW_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub window: (f64, f64),
    pub mean_z: f64,
    pub min_z: f64,
    pub max_z: f64,
    pub mean_coherence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub c_star: Option<f64>,
    /// Largest |Δ mean_z / Δc| between neighbouring grid points.
    pub sharpness: f64,
    /// Width of the c-cell holding the steepest step.
    pub resolution: f64,
}

fn window_samples(traj: &Trajectory, t_start: f64, t_end: f64) -> Result<&[Sample]> {
    if !(t_start < t_end) {
        return Err(Error::validation(format!(
            "window start {t_start} must precede end {t_end}"
        )));
    }
    let (lo, hi) = traj.span().ok_or(Error::EmptyWindow { t_start, t_end })?;
    let slack = WINDOW_SLACK * hi.abs().max(1.0);
    if t_start < lo - slack || t_end > hi + slack {
        return Err(Error::validation(format!(
            "window [{t_start}, {t_end}] lies outside the trajectory span [{lo}, {hi}]"
        )));
    }
    let samples = traj.samples();
    let begin = samples.partition_point(|s| s.t < t_start - slack);
    let end = samples.partition_point(|s| s.t <= t_end + slack);
    if begin >= end {
        return Err(Error::EmptyWindow { t_start, t_end });
    }
    Ok(&samples[begin..end])
}

/// Arithmetic means and extrema of the samples with t in [t_start, t_end].
pub fn window_summary(traj: &Trajectory, t_start: f64, t_end: f64) -> Result<WindowSummary> {
    let samples = window_samples(traj, t_start, t_end)?;
    let n = samples.len() as f64;
    let (mut min_z, mut max_z) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_z, mut sum_coh) = (0.0, 0.0);
    for s in samples {
        min_z = min_z.min(s.z);
        max_z = max_z.max(s.z);
        sum_z += s.z;
        sum_coh += s.coherence;
    }
    Ok(WindowSummary {
        window: (t_start, t_end),
        mean_z: sum_z / n,
        min_z,
        max_z,
        mean_coherence: sum_coh / n,
    })
}

/// Locates the steepest step of a (c, mean_z) curve.
///
/// `c_star` is the midpoint of the neighbouring pair with the largest
/// |Δ mean_z / Δc|, or `None` when that slope is below `floor`.
pub fn detect_critical_c(curve: &[(f64, f64)], floor: f64) -> Result<CriticalReport> {
    if curve.len() < 3 {
        return Err(Error::validation(
            "critical-c detection needs at least 3 points",
        ));
    }
    if curve.iter().any(|(c, z)| !c.is_finite() || !z.is_finite()) {
        return Err(Error::validation("curve contains non-finite values"));
    }
    if curve.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::validation("c values must be strictly increasing"));
    }
    let (mut best, mut best_slope) = (0, f64::NEG_INFINITY);
    for (i, w) in curve.windows(2).enumerate() {
        let slope = ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs();
        if slope > best_slope {
            best = i;
            best_slope = slope;
        }
    }
    let (c0, c1) = (curve[best].0, curve[best + 1].0);
    Ok(CriticalReport {
        c_star: (best_slope >= floor).then_some(0.5 * (c0 + c1)),
        sharpness: best_slope,
        resolution: c1 - c0,
    })
}

/// Jump sharpness for each decoherence rate, ordered by rate.
pub fn jump_sharpness_vs_gamma(curves: &[(f64, Vec<(f64, f64)>)]) -> Result<Vec<(f64, f64)>> {
    let mut out = curves
        .iter()
        .map(|(rate, curve)| Ok((*rate, detect_critical_c(curve, 0.0)?.sharpness)))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// True when z keeps the sign of the initial imbalance throughout the window.
///
/// The sign is taken from the first sample of the trajectory; a start with
/// z ≥ 0 requires min z > 0 in the window, a start with z < 0 requires
/// max z < 0.
pub fn self_trapping_indicator(traj: &Trajectory, window: (f64, f64)) -> Result<bool> {
    let samples = window_samples(traj, window.0, window.1)?;
    let toward_right = traj.first().is_none_or(|s| s.z >= 0.0);
    Ok(if toward_right {
        samples.iter().all(|s| s.z > 0.0)
    } else {
        samples.iter().all(|s| s.z < 0.0)
    })
}

/// (t, |ρ_RL|) for every sample.
pub fn coherence_series(traj: &Trajectory) -> Vec<(f64, f64)> {
    traj.samples()
        .iter()
        .map(|s| (s.t, s.rho.rl.norm()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{density_from_bloch, BlochVector, DensityMatrix};
    use std::f64::consts::TAU;

    fn traj_from_z(times: &[f64], z: impl Fn(f64) -> f64) -> Trajectory {
        let samples = times
            .iter()
            .map(|&t| {
                let rho = density_from_bloch(&BlochVector::new(0.0, 0.0, z(t))).unwrap();
                Sample::new(t, rho)
            })
            .collect();
        Trajectory::from_samples(samples).unwrap()
    }

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn constant_trajectory_summary() {
        let traj = traj_from_z(&linspace(0.0, 10.0, 101), |_| 1.0);
        let w = window_summary(&traj, 2.0, 8.0).unwrap();
        assert_eq!(w.mean_z, 1.0);
        assert_eq!(w.min_z, 1.0);
        assert_eq!(w.max_z, 1.0);
        assert_eq!(w.mean_coherence, 0.0);
    }

    #[test]
    fn cosine_averages_to_zero_over_whole_periods() {
        // endpoint excluded so the samples tile whole periods exactly
        let times: Vec<f64> = (0..4000).map(|i| i as f64 * 3.0 * TAU / 4000.0).collect();
        let traj = traj_from_z(&times, f64::cos);
        let w = window_summary(&traj, 0.0, *times.last().unwrap()).unwrap();
        assert!(w.mean_z.abs() < 1e-6, "{}", w.mean_z);
        assert!((w.min_z + 1.0).abs() < 1e-6);
    }

    #[test]
    fn window_errors() {
        let traj = traj_from_z(&[0.0, 1.0, 2.0], |_| 0.5);
        assert!(matches!(
            window_summary(&traj, 1.2, 1.8),
            Err(Error::EmptyWindow { .. })
        ));
        assert!(window_summary(&traj, 1.0, 1.0).is_err());
        assert!(window_summary(&traj, -1.0, 1.0).is_err());
        assert!(window_summary(&traj, 1.0, 3.0).is_err());
        assert!(window_summary(&Trajectory::default(), 0.0, 1.0).is_err());
        assert!(self_trapping_indicator(&traj, (1.2, 1.8)).is_err());
    }

    #[test]
    fn detect_step() {
        let curve: Vec<(f64, f64)> = linspace(0.0, 4.0, 201)
            .into_iter()
            .map(|c| (c, if c > 2.0 { 0.8 } else { 0.05 }))
            .collect();
        let rep = detect_critical_c(&curve, DEFAULT_SHARPNESS_FLOOR).unwrap();
        assert!((rep.c_star.unwrap() - 2.01).abs() < 1e-9);
        assert!((rep.sharpness - 0.75 / 0.02).abs() < 1e-9);
        assert!((rep.resolution - 0.02).abs() < 1e-12);
    }

    #[test]
    fn flat_curve_has_no_jump() {
        let curve: Vec<(f64, f64)> = linspace(0.0, 4.0, 21)
            .into_iter()
            .map(|c| (c, 0.0))
            .collect();
        let rep = detect_critical_c(&curve, DEFAULT_SHARPNESS_FLOOR).unwrap();
        assert_eq!(rep.c_star, None);
        assert_eq!(rep.sharpness, 0.0);
    }

    #[test]
    fn detect_rejects_bad_input() {
        assert!(detect_critical_c(&[(0.0, 0.0), (1.0, 1.0)], 0.0).is_err());
        assert!(detect_critical_c(&[(0.0, 0.0), (2.0, 1.0), (1.0, 0.0)], 0.0).is_err());
        assert!(detect_critical_c(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn sharpness_ordering_and_determinism() {
        let steep = vec![(0.0, 0.0), (1.0, 0.0), (1.1, 1.0), (2.0, 1.0)];
        let soft = vec![(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)];
        let out = jump_sharpness_vs_gamma(&[(0.5, soft.clone()), (0.1, steep.clone())]).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].0, 0.1);
        assert!(out[0].1 > out[1].1);

        let single = jump_sharpness_vs_gamma(&[(0.3, soft.clone())]).unwrap();
        assert_eq!(single, vec![(0.3, 0.5)]);

        let same = jump_sharpness_vs_gamma(&[(0.1, steep.clone()), (0.2, steep)]).unwrap();
        assert_eq!(same[0].1, same[1].1);
    }

    #[test]
    fn trapping_indicator_respects_sign() {
        let times = linspace(0.0, 10.0, 101);
        let pos = traj_from_z(&times, |t| 0.5 + 0.3 * t.cos());
        assert!(self_trapping_indicator(&pos, (0.0, 10.0)).unwrap());
        let neg = traj_from_z(&times, |t| -0.5 - 0.3 * t.cos());
        assert!(self_trapping_indicator(&neg, (0.0, 10.0)).unwrap());
        let osc = traj_from_z(&times, f64::cos);
        assert!(!self_trapping_indicator(&osc, (0.0, 10.0)).unwrap());
        assert!(self_trapping_indicator(&osc, (0.0, 1.0)).unwrap());
    }

    #[test]
    fn coherence_extraction() {
        let right = Sample::new(0.0, DensityMatrix::right());
        let x = Sample::new(
            1.0,
            density_from_bloch(&BlochVector::new(1.0, 0.0, 0.0)).unwrap(),
        );
        let traj = Trajectory::from_samples(vec![right, x]).unwrap();
        assert_eq!(coherence_series(&traj), vec![(0.0, 0.0), (1.0, 0.5)]);
    }
}
