//! C ABI over `qbsim`.
//!
//! Parameters and trajectories are opaque handles released with the matching `*_free`. Every fallible call returns a [`QbStatus`]; on failure the
//! message is available from [`qb_last_error`] on the same thread until the next failing call.
//! Panics never cross the boundary; they surface as `QB_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qbsim::analysis::{fit_exponential, peaks_of};
use qbsim::config::ScenarioConfig;
use qbsim::dynamics::{initial_state_atom_m, initial_state_photon_at_site, time_grid, ModelKind};
use qbsim::model::atom_eigensystem_exact;
use qbsim::presets::Figure;
use qbsim::spectral::find_bound_states;
use qbsim::thermo::{average_power, work_series};
use qbsim::{Error, Region, Representation, SystemParams, C64};

/// Status codes. The non-zero values for config and numerical errors match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbStatus {
    Ok = 0,
    Io = 1,
    Config = 2,
    Numerical = 3,
    NullArgument = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

/// Schrodinger model used by [`qb_evolve`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbModel {
    Effective = 0,
    Full = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbColumn {
    Time = 0,
    PDark = 1,
    Norm = 2,
    Work = 3,
    Power = 4,
}

/// One atom-photon bound state. `above_band` is 1 above the band, 0 below it.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QbBoundState {
    pub energy_re: f64,
    pub energy_im: f64,
    pub residue_re: f64,
    pub residue_im: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    pub above_band: c_int,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QbDecayFit {
    pub intercept: f64,
    pub rate: f64,
    pub r_abs: f64,
    pub t_first: f64,
    pub t_last: f64,
    pub n_points: usize,
}

/// System parameters.
pub struct QbParams {
    inner: SystemParams,
}

/// Sampled trajectory with columns [`QbColumn`].
pub struct QbSeries {
    columns: [Vec<f64>; 5],
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> QbStatus {
    match err.exit_code() {
        1 => QbStatus::Io,
        2 => QbStatus::Config,
        _ => QbStatus::Numerical,
    }
}

/// Run `f`, translating errors and panics into a status and the last-error message.
fn guard(f: impl FnOnce() -> Result<(), (QbStatus, String)>) -> QbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QbStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QbStatus::Internal
        }
    }
}

fn fail(err: Error) -> (QbStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(name: &str) -> (QbStatus, String) {
    (QbStatus::NullArgument, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (QbStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (QbStatus::Config, format!("{name} is not valid UTF-8")))
}

unsafe fn params_arg<'a>(p: *const QbParams) -> Result<&'a SystemParams, (QbStatus, String)> {
    p.as_ref().map(|p| &p.inner).ok_or_else(|| null("params"))
}

/// Message of the last failing call on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn qb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parameters of a built-in figure preset (`"fig2"`, `"fig3a"`, ..., `"fig7"`).
///
/// # Safety
/// `figure` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_params_preset(figure: *const c_char, out: *mut *mut QbParams) -> QbStatus {
    guard(|| {
        let id = str_arg(figure, "figure")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let fig: Figure = id.parse().map_err(fail)?;
        *out = Box::into_raw(Box::new(QbParams { inner: fig.params() }));
        Ok(())
    })
}

/// Parameters from a scenario config document (`"schema_version": 1`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_params_from_json(json: *const c_char, out: *mut *mut QbParams) -> QbStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = ScenarioConfig::from_json(text).map_err(fail)?;
        let inner = cfg.system_params().map_err(fail)?;
        *out = Box::into_raw(Box::new(QbParams { inner }));
        Ok(())
    })
}

/// Release parameters. Null is ignored.
///
/// # Safety
/// `params` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qb_params_free(params: *mut QbParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

fn field_mut<'a>(p: &'a mut SystemParams, name: &str) -> Option<&'a mut f64> {
    Some(match name {
        "omega0" => &mut p.omega0,
        "xi" => &mut p.xi,
        "g1" => &mut p.g1,
        "g2" => &mut p.g2,
        "omega_p_rabi" => &mut p.omega_p_rabi,
        "omega_c_rabi" => &mut p.omega_c_rabi,
        "omega_d_real" => &mut p.omega_d_real,
        "kappa" => &mut p.kappa,
        "omega_e_level" => &mut p.omega_e_level,
        "omega_m_level" => &mut p.omega_m_level,
        "delta_e" => &mut p.delta_e,
        _ => return None,
    })
}

/// Read a parameter by its config name; `"g"` and `"n_cavities"` are also accepted.
///
/// # Safety
/// Pointers must be valid; `name` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qb_params_get(params: *const QbParams, name: *const c_char, value: *mut f64) -> QbStatus {
    guard(|| {
        let mut p = *params_arg(params)?;
        let name = str_arg(name, "name")?;
        if value.is_null() {
            return Err(null("value"));
        }
        *value = match name {
            "g" => p.g(),
            "n_cavities" => p.n_cavities as f64,
            _ => *field_mut(&mut p, name).ok_or_else(|| (QbStatus::Config, format!("unknown parameter `{name}`")))?,
        };
        Ok(())
    })
}

/// Set a parameter by its config name and revalidate. `"g"` sets a dark-tuned total coupling;
/// `"n_cavities"` must be an odd integer >= 3. On failure the parameters are unchanged. The dark
/// condition is not enforced here; calls that need the dark state reject detuned couplings.
///
/// # Safety
/// Pointers must be valid; `name` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qb_params_set(params: *mut QbParams, name: *const c_char, value: f64) -> QbStatus {
    guard(|| {
        let target = params.as_mut().ok_or_else(|| null("params"))?;
        let name = str_arg(name, "name")?;
        let mut p = target.inner;
        match name {
            "g" => p = p.with_dark_coupling(value),
            "n_cavities" => {
                if !(value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(fail(Error::invalid("n_cavities", format!("must be a whole number, got {value}"))));
                }
                p.n_cavities = value as usize;
            }
            _ => {
                *field_mut(&mut p, name).ok_or_else(|| (QbStatus::Config, format!("unknown parameter `{name}`")))? = value
            }
        }
        p.validate().map_err(fail)?;
        target.inner = p;
        Ok(())
    })
}

/// Exact atom energies (three complex values) and the index of the dark state.
///
/// # Safety
/// `re` and `im` must point to 3 writable doubles; `dark_index` to one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn qb_atom_spectrum(
    params: *const QbParams,
    re: *mut f64,
    im: *mut f64,
    dark_index: *mut usize,
) -> QbStatus {
    guard(|| {
        let p = params_arg(params)?;
        if re.is_null() || im.is_null() || dark_index.is_null() {
            return Err(null("output"));
        }
        let sys = atom_eigensystem_exact(p).map_err(fail)?;
        for (i, e) in sys.energies.iter().enumerate() {
            *re.add(i) = e.re;
            *im.add(i) = e.im;
        }
        *dark_index = sys.dark_index;
        Ok(())
    })
}

/// Bound states for dark energy `e1`. Writes up to 2 states (above the band first) and their count.
///
/// # Safety
/// `states` must point to 2 writable [`QbBoundState`] values; `count` to one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn qb_bound_states(
    params: *const QbParams,
    e1_re: f64,
    e1_im: f64,
    states: *mut QbBoundState,
    count: *mut usize,
) -> QbStatus {
    guard(|| {
        let p = params_arg(params)?;
        if states.is_null() || count.is_null() {
            return Err(null("output"));
        }
        let set = find_bound_states(p, C64::new(e1_re, e1_im)).map_err(fail)?;
        let list = set.states();
        for (i, s) in list.iter().enumerate() {
            *states.add(i) = QbBoundState {
                energy_re: s.energy.re,
                energy_im: s.energy.im,
                residue_re: s.residue_weight.re,
                residue_im: s.residue_weight.im,
                amplitude_re: s.pole_amplitude.re,
                amplitude_im: s.pole_amplitude.im,
                above_band: c_int::from(s.location == Region::AboveBand),
            };
        }
        *count = list.len();
        Ok(())
    })
}

/// Evolve on the grid `0, dt, ..., t_max` and record dark population, norm, ergotropy and power.
/// `photon_site < 0` starts from the atom in level `m` instead of a photon.
///
/// # Safety
/// `out` must be a valid pointer; the series is released with [`qb_series_free`].
#[no_mangle]
pub unsafe extern "C" fn qb_evolve(
    params: *const QbParams,
    model: QbModel,
    photon_site: i64,
    t_max: f64,
    dt: f64,
    out: *mut *mut QbSeries,
) -> QbStatus {
    guard(|| {
        let p = params_arg(params)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match model {
            QbModel::Effective => ModelKind::Effective,
            QbModel::Full => ModelKind::Full,
        };
        let psi0 = if photon_site < 0 {
            initial_state_atom_m(p, kind, Representation::SiteSpace)
        } else {
            initial_state_photon_at_site(photon_site as usize, p, kind, Representation::SiteSpace)
        }
        .map_err(fail)?;
        let grid = time_grid(t_max, dt).map_err(fail)?;
        let (series, work) = work_series(&psi0, &grid, p).map_err(fail)?;
        let power = average_power(&grid, &work);
        *out = Box::into_raw(Box::new(QbSeries {
            columns: [grid, series.p_dark, series.norm, work, power],
        }));
        Ok(())
    })
}

/// Number of samples in a series (0 for null).
///
/// # Safety
/// `series` must be null or a live series.
#[no_mangle]
pub unsafe extern "C" fn qb_series_len(series: *const QbSeries) -> usize {
    series.as_ref().map_or(0, |s| s.columns[0].len())
}

/// Copy one column into `buf`, which must hold at least [`qb_series_len`] doubles.
///
/// # Safety
/// `buf` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qb_series_copy(
    series: *const QbSeries,
    column: QbColumn,
    buf: *mut f64,
    capacity: usize,
) -> QbStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(|| null("series"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let col = &s.columns[column as usize];
        if capacity < col.len() {
            return Err((
                QbStatus::BufferTooSmall,
                format!("buffer holds {capacity} values, series has {}", col.len()),
            ));
        }
        ptr::copy_nonoverlapping(col.as_ptr(), buf, col.len());
        Ok(())
    })
}

/// Release a series. Null is ignored.
///
/// # Safety
/// `series` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qb_series_free(series: *mut QbSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Fit `ln P = a - rate t` to the envelope peaks after `t_min`, or to every sample if `raw != 0`.
///
/// # Safety
/// `t` and `p` must point to `n` doubles; `out` to one [`QbDecayFit`].
#[no_mangle]
pub unsafe extern "C" fn qb_fit_decay(
    t: *const f64,
    p: *const f64,
    n: usize,
    t_min: f64,
    raw: c_int,
    out: *mut QbDecayFit,
) -> QbStatus {
    guard(|| {
        if t.is_null() || p.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let (times, values) = (std::slice::from_raw_parts(t, n), std::slice::from_raw_parts(p, n));
        let points: Vec<(f64, f64)> = if raw != 0 {
            times.iter().copied().zip(values.iter().copied()).filter(|&(t, _)| t >= t_min).collect()
        } else {
            peaks_of(times, values, t_min).map_err(fail)?
        };
        let fit = fit_exponential(&points).map_err(fail)?;
        *out = QbDecayFit {
            intercept: fit.intercept,
            rate: fit.rate,
            r_abs: fit.r_abs,
            t_first: fit.t_first,
            t_last: fit.t_last,
            n_points: fit.n_points,
        };
        Ok(())
    })
}

/// Write the data files of one figure into `out_dir`, as `qbsim reproduce` does.
///
/// # Safety
/// Both arguments must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn qb_reproduce(figure: *const c_char, out_dir: *const c_char) -> QbStatus {
    guard(|| {
        let fig: Figure = str_arg(figure, "figure")?.parse().map_err(fail)?;
        let dir = str_arg(out_dir, "out_dir")?;
        qbsim::runner::reproduce(fig, Path::new(dir)).map_err(fail)?;
        Ok(())
    })
}
