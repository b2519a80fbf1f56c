use std::f64::consts::PI;

use bcs_gap::asymptotics::{
    csv_row, effective_b_zero, predict_tc, predict_xi, shifted_exponent, thm1_functional, SweepRecord, THM1_TARGET,
    UNIVERSAL_RATIO,
};
use bcs_gap::numerics::{spherical_bessel, spherical_bessel_array};
use bcs_gap::potential::{PotentialKind, RadialPotential};
use bcs_gap::tc_solver::inverse_thermal_energy;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = PotentialKind> {
    prop_oneof![
        Just(PotentialKind::Gaussian),
        Just(PotentialKind::Lorentzian),
        Just(PotentialKind::Yukawa)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kernel_is_symmetric_and_nonpositive(k in kind(), p in 0.01f64..40.0, q in 0.01f64..40.0) {
        let v = RadialPotential::builtin_kind(k, 1.0).unwrap();
        let a = v.angular_kernel(p, q).unwrap();
        let b = v.angular_kernel(q, p).unwrap();
        prop_assert!(a <= 0.0);
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300));
    }

    #[test]
    fn fourier_is_linear_in_coupling(k in kind(), g in 0.0f64..100.0, p in 0.0f64..30.0) {
        let one = RadialPotential::builtin_kind(k, 1.0).unwrap().fourier(p).unwrap();
        let many = RadialPotential::builtin_kind(k, g).unwrap().fourier(p).unwrap();
        prop_assert!(one <= 0.0);
        prop_assert!((many - g * one).abs() <= 1e-14 * (g * one).abs().max(1e-300));
    }

    #[test]
    fn range_rescales_momentum(k in kind(), a in 0.2f64..5.0, p in 0.0f64..10.0) {
        // V(r/a) has transform a³ V̂(a p).
        let v = RadialPotential::builtin_kind(k, 1.0).unwrap();
        let scaled = v.clone().with_range(a).unwrap().fourier(p).unwrap();
        let expect = a.powi(3) * v.fourier(a * p).unwrap();
        prop_assert!((scaled - expect).abs() <= 1e-12 * expect.abs().max(1e-300));
    }

    #[test]
    fn bessel_array_matches_scalar(x in 0.0f64..80.0, l in 0usize..40) {
        let arr = spherical_bessel_array(40, x).unwrap();
        let one = spherical_bessel(l, x).unwrap();
        prop_assert!((arr[l] - one).abs() <= 1e-13);
        prop_assert!(arr.iter().all(|j| j.abs() <= 1.0 + 1e-15));
    }

    #[test]
    fn thermal_factor_is_bounded_and_decreasing(xi in -1e3f64..1e3, t in 1e-8f64..1.0) {
        let f = inverse_thermal_energy(xi, t);
        prop_assert!(f > 0.0 && f <= 0.5 / t * (1.0 + 1e-15));
        let g = inverse_thermal_energy(xi.abs() * 1.5 + 1e-12, t);
        prop_assert!(g <= f * (1.0 + 1e-15));
        prop_assert_eq!(f, inverse_thermal_energy(-xi, t));
    }

    #[test]
    fn predictions_invert_and_share_the_ratio(mu in 1.0f64..1e4, b in -1.0f64..-1e-3) {
        let xi = predict_xi(mu, b).unwrap();
        let tc = predict_tc(mu, b).unwrap();
        prop_assume!(!xi.underflow && xi.value > 1e-290);
        prop_assert!((xi.value / tc.value / UNIVERSAL_RATIO - 1.0).abs() < 1e-13);
        let f = thm1_functional(xi.value, mu, b).unwrap();
        prop_assert!((f - THM1_TARGET).abs() < 1e-9 * (1.0 + xi.exponent.abs()));
    }

    #[test]
    fn kappa_shift_is_invertible(mu in 1.0f64..1e4, kappa in 0.0f64..4.0, x in 1e-3f64..0.24) {
        // √μ |b| < 1/4 keeps the shifted exponent negative for κ < 4.
        let b = -x / mu.sqrt();
        let shifted = shifted_exponent(mu, kappa, b).unwrap();
        prop_assert!((shifted - PI / (2.0 * mu.sqrt() * b) - 0.5 * PI * kappa).abs() < 1e-12 * shifted.abs().max(1.0));
        prop_assert!(shifted < 0.0);
        let b0 = effective_b_zero(mu, kappa, b).unwrap();
        prop_assert!((PI / (2.0 * mu.sqrt() * b0) - shifted).abs() < 1e-9 * shifted.abs());
    }

    #[test]
    fn csv_fields_round_trip(values in proptest::collection::vec(any::<f64>(), 12)) {
        let mut r = SweepRecord::failed(values[0], values[1], values[2], "ok");
        r.e_mu = values[3];
        r.b_mu_kappa = values[4];
        r.xi = values[5];
        r.delta_fermi = values[6];
        r.t_c = values[7];
        r.m_mu = values[8];
        r.thm1_functional = values[9];
        r.ratio = values[10];
        let row = csv_row(&r);
        let fields: Vec<&str> = row.split(',').collect();
        prop_assert_eq!(fields.len(), 13);
        let expect = [values[0], values[1], values[2], values[3], values[4], values[5], values[6], values[7], values[8], values[9], values[10]];
        for (field, x) in fields[1..12].iter().zip(expect) {
            let back: f64 = field.parse().unwrap();
            if x.is_nan() {
                prop_assert!(back.is_nan());
            } else {
                prop_assert_eq!(back.to_bits(), x.to_bits());
            }
        }
    }
}
