use proptest::prelude::*;

use rotator_core::exact::{residual_at, ExactSolution};
use rotator_core::hessian::{closed_det_h, hessian_blocks, lu_det, numeric_hessian};
use rotator_core::minkowski::{build_solution_frame, pauli_lubanski};
use rotator_core::{ChartState, FourVector, PhaseProfile, RotatorProfile};

fn state() -> impl Strategy<Value = ChartState> {
    (0.2..2.9f64, 0.0..6.28f64, prop::array::uniform3(-0.5..0.5f64), -2.0..2.0f64, -2.0..2.0f64)
        .prop_filter("rotating", |(_, _, _, a, b)| a.abs() + b.abs() > 1e-2)
        .prop_map(|(theta, phi_sph, v, theta_dot, phi_sph_dot)| ChartState { theta, phi_sph, v, theta_dot, phi_sph_dot })
}

fn regular_profile() -> impl Strategy<Value = RotatorProfile> {
    prop_oneof![
        (0.1..3.0f64).prop_map(|a| RotatorProfile::Affine { a }),
        (1e-3..1e-1f64).prop_map(|eps| RotatorProfile::Deformed { eps }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_blocks_match_dual_hessian(p in regular_profile(), s in state()) {
        let closed = hessian_blocks(&p, &s).unwrap().assemble();
        let numeric = numeric_hessian(&p, &s).unwrap();
        prop_assert!((closed - numeric).amax() <= 1e-9 * numeric.amax());
        let d = closed_det_h(&p, &s).unwrap();
        prop_assert!((lu_det(&numeric) - d).abs() <= 1e-6 * d.abs());
    }

    #[test]
    fn exact_solutions_pass_both_residuals(
        seed in 1u64..1000,
        omega in 0.3..1.7f64,
        amp in 0.0..0.2f64,
        nu in 0.3..2.0f64,
        t in 0.0..8.0f64,
    ) {
        let frame = build_solution_frame(1.0, 1.0, seed).unwrap();
        let phase = PhaseProfile::Modulated { omega, eps: amp / nu, nu };
        let sol = ExactSolution::new(frame, phase, FourVector::ZERO).unwrap();
        let row = residual_at(&RotatorProfile::Fundamental, &sol, t).unwrap();
        prop_assert!(row.max() < 1e-9, "{row:?}");
    }

    #[test]
    fn noether_charges_reproduce_frame(seed in 1u64..1000, omega in 0.2..1.8f64, t in 0.0..10.0f64) {
        let frame = build_solution_frame(1.0, 1.0, seed).unwrap();
        let sol = ExactSolution::new(frame, PhaseProfile::Linear { omega }, FourVector::ZERO).unwrap();
        let (p, m, w) = sol.noether_charges(&RotatorProfile::Fundamental, t).unwrap();
        prop_assert!((p - frame.p).max_abs() < 1e-9 * frame.p.max_abs());
        prop_assert!((p.square() - 1.0).abs() < 1e-9);
        prop_assert!((w.square() + 0.25).abs() < 1e-9);
        prop_assert!((pauli_lubanski(&m, &p) - w).max_abs() < 1e-12);
    }
}
