use std::f64::consts::TAU;

use proptest::prelude::*;

use duetdyn::validate::bloch_components;
use duetdyn::{
    bloch_from_density, bloch_rhs, build_hamiltonian, closed_energy, density_from_bloch,
    density_from_initial, rhs, BlochVector, DensityMatrix, InitialState, LindbladSpec, ModelParams,
    Op2, C64,
};

fn bloch_ball() -> impl Strategy<Value = BlochVector> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0f64..=1.0)
        .prop_filter("nonzero direction", |(x, y, z, _)| {
            x * x + y * y + z * z > 1e-6
        })
        .prop_map(|(x, y, z, r)| {
            let n = (x * x + y * y + z * z).sqrt();
            BlochVector::new(r * x / n, r * y / n, r * z / n)
        })
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn params() -> impl Strategy<Value = ModelParams> {
    (
        -5.0f64..5.0,
        0.0f64..1.0,
        -1.0f64..1.0,
        0.1f64..3.0,
        [complex(), complex(), complex()],
        0.1f64..2.0,
    )
        .prop_map(|(c, rate, bias, v, lambdas, scale)| {
            ModelParams::new(c, rate, LindbladSpec::custom(lambdas).with_scale(scale))
                .with_bias(bias)
                .with_v(v)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rhs_is_traceless_and_hermitian(s in bloch_ball(), p in params()) {
        let d = rhs(&density_from_bloch(&s).unwrap(), &p).unwrap();
        prop_assert!(d.trace().norm() <= 1e-14);
        prop_assert!((d - d.adjoint()).norm() <= 1e-14);
    }

    #[test]
    fn matrix_and_bloch_forms_agree(s in bloch_ball(), p in params()) {
        let matrix = bloch_components(&rhs(&density_from_bloch(&s).unwrap(), &p).unwrap());
        let direct = bloch_rhs(&s, &p);
        for k in 0..3 {
            prop_assert!((matrix[k] - direct[k]).abs() <= 1e-12, "{k}: {} vs {}", matrix[k], direct[k]);
        }
    }

    #[test]
    fn closed_energy_is_stationary(s in bloch_ball(), p in params()) {
        let p = ModelParams { decoherence_rate: 0.0, ..p };
        let ds = bloch_rhs(&s, &p);
        // chain rule: dE/dt = (c/2 sz + γ/2) ṡz + (V/2) ṡx
        let de = (0.5 * p.c * s.sz + 0.5 * p.bias) * ds[2] + 0.5 * p.v * ds[0];
        prop_assert!(de.abs() <= 1e-12);
        prop_assert!(closed_energy(&s, &p).is_finite());
    }

    #[test]
    fn zero_rate_keeps_purity_stationary(s in bloch_ball(), p in params()) {
        let p = ModelParams { decoherence_rate: 0.0, ..p };
        let rho = density_from_bloch(&s).unwrap();
        let d = rhs(&rho, &p).unwrap();
        prop_assert!((rho.to_matrix() * d).trace().norm() <= 1e-14);
    }

    #[test]
    fn bloch_round_trip(s in bloch_ball()) {
        let back = bloch_from_density(&density_from_bloch(&s).unwrap()).unwrap();
        prop_assert!((back.sx - s.sx).abs() <= 1e-14);
        prop_assert!((back.sy - s.sy).abs() <= 1e-14);
        prop_assert!((back.sz - s.sz).abs() <= 1e-14);
        let rho = density_from_bloch(&s).unwrap();
        let again = density_from_bloch(&bloch_from_density(&rho).unwrap()).unwrap();
        prop_assert!((again.to_matrix() - rho.to_matrix()).norm() <= 1e-14);
        prop_assert!(rho.validate().is_ok());
    }

    #[test]
    fn hamiltonian_sees_only_the_imbalance(s in bloch_ball(), p in params(), phase in 0.0f64..TAU, shrink in 0.0f64..1.0) {
        let rho = density_from_bloch(&s).unwrap();
        let mut other = rho;
        other.rl = rho.rl * C64::from_polar(shrink, phase);
        other.lr = other.rl.conj();
        prop_assert_eq!(build_hamiltonian(&rho, &p), build_hamiltonian(&other, &p));
        let h = build_hamiltonian(&rho, &p);
        prop_assert!(h.trace().norm() <= 1e-15);
        prop_assert_eq!(h, h.adjoint());
    }

    #[test]
    fn initial_states_are_pure(z0 in -1.0f64..=1.0, theta0 in 0.0f64..TAU) {
        let rho = density_from_initial(&InitialState::new(z0, theta0).unwrap()).unwrap();
        prop_assert!((rho.purity() - 1.0).abs() <= 1e-14);
        prop_assert!((rho.rr.re - (1.0 + z0) / 2.0).abs() <= 1e-15);
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-15);
        let (a_r, a_l) = InitialState::new(z0, theta0).unwrap().amplitudes();
        prop_assert!((a_r.norm_sqr() + a_l.norm_sqr() - 1.0).abs() <= 1e-15);
    }
}

#[test]
fn sigma_x_fixed_point_is_exact() {
    for c in [0.0, 1.0, 3.0] {
        for rate in [0.01, 0.1, 0.5] {
            let p = ModelParams::new(c, rate, LindbladSpec::sigma_x());
            assert_eq!(
                rhs(&DensityMatrix::maximally_mixed(), &p).unwrap(),
                Op2::zeros()
            );
        }
    }
}

#[test]
fn sigma_plus_pumps_into_the_right_well() {
    let p = ModelParams::new(0.0, 0.1, LindbladSpec::sigma_plus());
    let s = BlochVector::new(0.0, 0.0, -1.0);
    let ds = bloch_rhs(&s, &p);
    // population transfer 4Γ from |L⟩ to |R⟩ gives ṡz = 8Γ at sz = −1
    assert!((ds[2] - 0.8).abs() < 1e-15);
}
