use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use qbsim::dynamics::{initial_state_photon_at_site, time_grid, ModelKind};
use qbsim::presets::fig3a;
use qbsim::thermo::work_series;
use qbsim::Representation;
use qbsim_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qb_last_error()).to_string_lossy().into_owned() }
}

fn preset(id: &str) -> *mut QbParams {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { qb_params_preset(c(id).as_ptr(), &mut p) }, QbStatus::Ok);
    p
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(qb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn params_round_trip_and_validation() {
    let p = preset("fig3a");
    let mut xi = 0.0;
    unsafe {
        assert_eq!(qb_params_get(p, c("xi").as_ptr(), &mut xi), QbStatus::Ok);
        assert_eq!(xi, fig3a().xi);

        assert_eq!(qb_params_set(p, c("xi").as_ptr(), -1.0), QbStatus::Config);
        assert!(last_error().contains("xi"));
        qb_params_get(p, c("xi").as_ptr(), &mut xi);
        assert_eq!(xi, fig3a().xi, "failed set leaves the value alone");

        assert_eq!(qb_params_set(p, c("g").as_ptr(), 0.9), QbStatus::Ok);
        let mut g = 0.0;
        qb_params_get(p, c("g").as_ptr(), &mut g);
        assert!((g - 0.9).abs() < 1e-12);

        // a detuned coupling is stored, and rejected by the operations that need the dark state
        assert_eq!(qb_params_set(p, c("g1").as_ptr(), 0.1), QbStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(qb_evolve(p, QbModel::Effective, 0, 1.0, 0.1, &mut s), QbStatus::Config);
        assert!(last_error().contains("dark"), "{}", last_error());

        assert_eq!(qb_params_get(p, c("colour").as_ptr(), &mut g), QbStatus::Config);
        assert_eq!(qb_params_set(p, c("n_cavities").as_ptr(), 2.5), QbStatus::Config);
        qb_params_free(p);
    }
}

#[test]
fn json_config_is_checked() {
    let good = r#"{"schema_version": 1, "unit": "xi",
        "params": {"omega0": 20.0, "xi": 1.0, "n_cavities": 51, "g": 0.6,
                   "omega_p_rabi": 16.0, "omega_c_rabi": 2.0, "omega_d_real": 20.0, "kappa": 0.5,
                   "omega_e_level": 20.0, "omega_m_level": 20.0},
        "initial": {"photon_site": 0}, "time": {"t_max": 1.0, "dt": 0.1}}"#;
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(qb_params_from_json(c(good).as_ptr(), &mut p), QbStatus::Ok, "{}", last_error());
        let mut n = 0.0;
        qb_params_get(p, c("n_cavities").as_ptr(), &mut n);
        assert_eq!(n, 51.0);
        qb_params_free(p);

        let bad = good.replace("\"schema_version\": 1", "\"schema_version\": 7");
        let mut q = ptr::null_mut();
        assert_eq!(qb_params_from_json(c(&bad).as_ptr(), &mut q), QbStatus::Config);
        assert!(q.is_null());
        assert!(last_error().contains("schema_version"));
    }
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        assert_eq!(qb_params_preset(ptr::null(), ptr::null_mut()), QbStatus::NullArgument);
        assert!(last_error().contains("figure"));
        let mut re = [0.0; 3];
        let mut im = [0.0; 3];
        let mut k = 0usize;
        assert_eq!(
            qb_atom_spectrum(ptr::null(), re.as_mut_ptr(), im.as_mut_ptr(), &mut k),
            QbStatus::NullArgument
        );
        assert_eq!(qb_series_len(ptr::null()), 0);
        qb_series_free(ptr::null_mut());
        qb_params_free(ptr::null_mut());
    }
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { qb_params_preset(c("fig9").as_ptr(), &mut p) }, QbStatus::Config);
}

#[test]
fn spectrum_and_bound_states() {
    let p = preset("fig3a");
    let (mut re, mut im, mut dark) = ([0.0; 3], [0.0; 3], 9usize);
    unsafe {
        assert_eq!(qb_atom_spectrum(p, re.as_mut_ptr(), im.as_mut_ptr(), &mut dark), QbStatus::Ok);
        assert!(dark < 3);
        let e1 = (re[dark], im[dark]);
        let mut states = [QbBoundState::default(); 2];
        let mut n = 0usize;
        assert_eq!(qb_bound_states(p, e1.0, e1.1, states.as_mut_ptr(), &mut n), QbStatus::Ok);
        assert_eq!(n, 2);
        assert_eq!((states[0].above_band, states[1].above_band), (1, 0));
        assert!(states[0].energy_re > states[1].energy_re);
        qb_params_free(p);
    }
}

#[test]
fn evolve_matches_the_library() {
    let p = preset("fig3a");
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(qb_evolve(p, QbModel::Effective, 0, 5.0, 0.05, &mut s), QbStatus::Ok, "{}", last_error());
        let n = qb_series_len(s);
        assert_eq!(n, 101);
        let mut small = vec![0.0; n - 1];
        assert_eq!(qb_series_copy(s, QbColumn::PDark, small.as_mut_ptr(), n - 1), QbStatus::BufferTooSmall);

        let mut p_dark = vec![0.0; n];
        let mut work = vec![0.0; n];
        qb_series_copy(s, QbColumn::PDark, p_dark.as_mut_ptr(), n);
        qb_series_copy(s, QbColumn::Work, work.as_mut_ptr(), n);

        let params = fig3a();
        let psi0 = initial_state_photon_at_site(0, &params, ModelKind::Effective, Representation::SiteSpace).unwrap();
        let grid = time_grid(5.0, 0.05).unwrap();
        let (series, w) = work_series(&psi0, &grid, &params).unwrap();
        assert_eq!(p_dark, series.p_dark);
        assert_eq!(work, w);

        qb_series_free(s);
        assert_eq!(qb_evolve(p, QbModel::Full, 0, -1.0, 0.05, &mut s), QbStatus::Config);
        qb_params_free(p);
    }
}

#[test]
fn decay_fit_recovers_a_rate() {
    let t: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.025).collect();
    let y: Vec<f64> = t.iter().map(|t| (-0.03 * t).exp() * (1.0 + (3.0 * t).cos()) / 2.0).collect();
    let mut fit = QbDecayFit::default();
    unsafe {
        assert_eq!(qb_fit_decay(t.as_ptr(), y.as_ptr(), t.len(), 0.0, 0, &mut fit), QbStatus::Ok);
        assert!((fit.rate / 0.03 - 1.0).abs() < 1e-3, "{}", fit.rate);
        let flat = [1.0; 3];
        assert_eq!(qb_fit_decay(t.as_ptr(), flat.as_ptr(), 3, 0.0, 0, &mut fit), QbStatus::Numerical);
    }
}

#[test]
fn reproduce_writes_files() {
    let dir = tempfile::TempDir::new().unwrap();
    let out = c(dir.path().to_str().unwrap());
    assert_eq!(unsafe { qb_reproduce(c("fig2").as_ptr(), out.as_ptr()) }, QbStatus::Ok);
    assert!(dir.path().join("fig2.csv").exists());
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qbsim.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["qb_evolve", "qb_last_error", "QB_STATUS_NUMERICAL", "typedef struct QbParams QbParams"] {
        assert!(text.contains(name), "{name}");
    }
    let dir = tempfile::TempDir::new().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(&src, "#include \"qbsim.h\"\nint main(void) { return qb_version() == 0; }\n").unwrap();
    let Ok(status) = Command::new("cc")
        .arg("-std=c99")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(status.success());
}
