use nalgebra::{Matrix4, SymmetricEigen};
use proptest::prelude::*;
use qbsim::dynamics::time_grid;
use qbsim::model::dark_state_vector;
use qbsim::thermo::{battery_hamiltonian, ergotropy, ergotropy_trace, passive_state, BatteryState, ChargingScenario};
use qbsim::{presets, SystemParams, C64};

fn complex_matrix() -> impl Strategy<Value = Matrix4<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16)
        .prop_map(|v| Matrix4::from_iterator(v.into_iter().map(|(a, b)| C64::new(a, b))))
}

fn density_matrix() -> impl Strategy<Value = BatteryState> {
    complex_matrix().prop_filter_map("degenerate draw", |a| {
        let rho = a * a.adjoint();
        let tr = rho.trace().re;
        (tr > 1e-6).then(|| BatteryState { rho: rho / C64::new(tr, 0.0), time: 0.0 })
    })
}

fn unitary() -> impl Strategy<Value = Matrix4<C64>> {
    complex_matrix().prop_filter_map("singular draw", |a| {
        let qr = a.qr();
        (qr.r().diagonal().iter().all(|d| d.norm() > 1e-6)).then(|| qr.q())
    })
}

fn battery_params() -> impl Strategy<Value = SystemParams> {
    (0.5..20.0f64, 0.05..5.0f64, 0.0..40.0f64, 0.0..40.0f64, 0.0..40.0f64).prop_map(|(p, c, d, m, e)| {
        SystemParams {
            omega_p_rabi: p,
            omega_c_rabi: c,
            omega_d_real: d,
            omega_m_level: m,
            omega_e_level: e,
            delta_e: e,
            ..presets::fig5()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ergotropy_is_non_negative(rho in density_matrix(), params in battery_params()) {
        let h = battery_hamiltonian(&params);
        prop_assert!(ergotropy(&rho, &h) >= -1e-10);
    }

    #[test]
    fn passive_states_hold_no_work(rho in density_matrix(), params in battery_params()) {
        let h = battery_hamiltonian(&params);
        let passive = passive_state(&rho, &h);
        prop_assert!(ergotropy(&passive, &h).abs() <= 1e-10);
        prop_assert!((passive.trace() - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn passive_state_ignores_unitary_rotation(rho in density_matrix(), u in unitary(), params in battery_params()) {
        let h = battery_hamiltonian(&params);
        let rotated = BatteryState { rho: u * rho.rho * u.adjoint(), time: 0.0 };
        let a = passive_state(&rho, &h).rho;
        let b = passive_state(&rotated, &h).rho;
        let diff = (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-9, "{}", diff);
    }
}

#[test]
fn early_charging_is_the_dark_gap_times_population() {
    let params = presets::fig5();
    let h = battery_hamiltonian(&params);
    let mut levels: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    levels.sort_by(f64::total_cmp);
    let d = dark_state_vector(&params).unwrap();
    let dark_energy = (d.adjoint() * h.fixed_view::<3, 3>(1, 1) * d)[(0, 0)].re;

    let trace = ergotropy_trace(&ChargingScenario::new(params), &time_grid(3.0, 0.01).unwrap()).unwrap();
    assert_eq!(trace.work[0], 0.0);
    let mut checked = 0;
    for (&p, &w) in trace.p_dark.iter().zip(&trace.work) {
        if p > 1e-12 && p < 0.45 {
            let expected = p * dark_energy - ((1.0 - p) * levels[0] + p * levels[1]);
            assert!((w - expected.max(0.0)).abs() <= 1e-9, "p = {p}: W = {w}, expected {expected}");
            checked += 1;
        }
    }
    assert!(checked > 10);
    // a photon starting one site away has not reached the atom yet
    assert!(trace.work[1] < 1e-6 && trace.p_dark[1] < 1e-6);
}
