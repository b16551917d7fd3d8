use qbsim::dynamics::{evolve, initial_state_atom_m, initial_state_photon_at_site, time_grid, EvolveOptions, ModelKind};
use qbsim::oracle::{lindblad_from_state, population_report, CollapseModel, LindbladOptions};
use qbsim::{presets, Representation, SystemParams};

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn fig3a_master_equation_matches_non_hermitian_run() {
    let params = presets::fig3a();
    let grid = time_grid(50.0, 0.5).unwrap();
    let psi0 = initial_state_photon_at_site(0, &params, ModelKind::Full, Representation::SiteSpace).unwrap();
    let opts = LindbladOptions {
        keep_snapshots: true,
        ..LindbladOptions::default()
    };
    let run = lindblad_from_state(&psi0, &grid, &params, &opts).unwrap();
    let wave = evolve(&psi0, &grid, &params, &EvolveOptions::default()).unwrap();

    let snaps = run.snapshots.as_ref().unwrap();
    let trace_err = snaps.iter().map(|r| (r.trace() - 1.0).abs()).fold(0.0, f64::max);
    assert!(trace_err <= 1e-8, "trace drift {trace_err:e}");
    for k in (0..snaps.len()).step_by(snaps.len() / 10) {
        let lambda = snaps[k].min_eigenvalue();
        assert!(lambda >= -1e-8, "t = {}: eigenvalue {lambda:e}", grid[k]);
        assert!(snaps[k].hermiticity_error() <= 1e-12);
    }
    let gap = max_gap(&run.series.p_dark, &wave.p_dark);
    assert!(gap <= 1e-6, "dark population gap {gap:e}");
    // the excited block is the wavefunction, the rest sits in the ground state
    let gap = max_gap(&run.series.norm, &wave.norm);
    assert!(gap <= 1e-6, "excited population gap {gap:e}");
}

#[test]
fn lossless_master_equation_is_schrodinger() {
    let params = SystemParams {
        kappa: 0.0,
        n_cavities: 31,
        ..presets::fig3a()
    };
    let grid = time_grid(20.0, 0.25).unwrap();
    let psi0 = initial_state_photon_at_site(3, &params, ModelKind::Full, Representation::SiteSpace).unwrap();
    for collapse in [CollapseModel::JumpToGround, CollapseModel::Dephasing] {
        let opts = LindbladOptions {
            collapse,
            ..LindbladOptions::default()
        };
        let run = lindblad_from_state(&psi0, &grid, &params, &opts).unwrap();
        let wave = evolve(&psi0, &grid, &params, &EvolveOptions::default()).unwrap();
        assert!(max_gap(&run.series.p_dark, &wave.p_dark) <= 1e-7, "{collapse:?}");
        assert!((run.final_state.trace() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn dephasing_keeps_the_excitation_but_jumps_remove_it() {
    let params = SystemParams {
        n_cavities: 31,
        ..presets::fig3a()
    };
    let grid = time_grid(10.0, 0.5).unwrap();
    let psi0 = initial_state_atom_m(&params, ModelKind::Full, Representation::SiteSpace).unwrap();
    let jump = lindblad_from_state(&psi0, &grid, &params, &LindbladOptions::default()).unwrap();
    let dephase = lindblad_from_state(
        &psi0,
        &grid,
        &params,
        &LindbladOptions {
            collapse: CollapseModel::Dephasing,
            ..LindbladOptions::default()
        },
    )
    .unwrap();
    let pj = population_report(&jump.final_state);
    let pd = population_report(&dephase.final_state);
    assert!(pj.ground > 1e-3);
    assert!(pd.ground.abs() < 1e-12);
    assert!((pj.total() - 1.0).abs() < 1e-8 && (pd.total() - 1.0).abs() < 1e-8);
    assert!(dephase.final_state.min_eigenvalue() >= -1e-8);
}
