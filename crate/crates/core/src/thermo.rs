//! Ergotropy, passive states, charging power and parameter sweeps.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    evolve_with, initial_state_photon_at_site, EvolveOptions, ModelKind, TimeSeries, WaveFunction,
};
use crate::error::{Error, Result};
use crate::model::{atom_hamiltonian, dark_state_vector, Representation, SystemParams, C64};

/// Reduced atom state over `(g, d, e, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryState {
    pub rho: Matrix4<C64>,
    pub time: f64,
}

impl BatteryState {
    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }
}

/// Hermitian work Hamiltonian: ground energy 0 plus the atom block at `kappa = 0`.
pub fn battery_hamiltonian(params: &SystemParams) -> Matrix4<C64> {
    let mut p = *params;
    p.kappa = 0.0;
    let a = atom_hamiltonian(&p);
    let mut h = Matrix4::zeros();
    h.fixed_view_mut::<3, 3>(1, 1).copy_from(&a);
    h
}

/// Trace out the array. Population that left the single-excitation sector is put in `|g>`.
pub fn reduce_battery(psi: &WaveFunction, params: &SystemParams, time: f64) -> Result<BatteryState> {
    let mut rho = Matrix4::zeros();
    let atom: Vector4<C64> = match psi.model {
        ModelKind::Effective => {
            let d = dark_state_vector(params)?;
            let u = psi.amplitudes[0];
            Vector4::new(C64::new(0.0, 0.0), u * d[0], u * d[1], u * d[2])
        }
        ModelKind::Full => Vector4::new(
            C64::new(0.0, 0.0),
            psi.amplitudes[0],
            psi.amplitudes[1],
            psi.amplitudes[2],
        ),
    };
    rho += atom * atom.adjoint();
    let excited = rho.trace().re;
    rho[(0, 0)] = C64::new(1.0 - excited, 0.0);
    let state = BatteryState { rho, time };
    let tr = state.trace();
    if !(tr > 0.0) {
        return Err(Error::NotNormalizable(tr));
    }
    Ok(state)
}

/// Eigenpairs of a Hermitian 4x4 matrix ordered by eigenvalue (stable in the original index).
fn sorted_eigen(m: &Matrix4<C64>, descending: bool) -> Vec<(f64, Vector4<C64>)> {
    let eig = SymmetricEigen::new(*m);
    let mut pairs: Vec<(f64, Vector4<C64>)> = (0..4)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
        .collect();
    if descending {
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    } else {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    pairs
}

/// Populations of `rho` in descending order placed on the eigenstates of `h` in ascending order.
pub fn passive_state(rho: &BatteryState, h_battery: &Matrix4<C64>) -> BatteryState {
    let r = sorted_eigen(&rho.rho, true);
    let e = sorted_eigen(h_battery, false);
    let mut out = Matrix4::zeros();
    for ((rk, _), (_, v)) in r.iter().zip(&e) {
        out += v * v.adjoint() * C64::new(*rk, 0.0);
    }
    BatteryState {
        rho: out,
        time: rho.time,
    }
}

/// `tr(rho h) - tr(passive(rho) h)`.
pub fn ergotropy(rho: &BatteryState, h_battery: &Matrix4<C64>) -> f64 {
    let r = sorted_eigen(&rho.rho, true);
    let e = sorted_eigen(h_battery, false);
    let energy = (rho.rho * h_battery).trace().re;
    let passive: f64 = r.iter().zip(&e).map(|((rk, _), (ek, _))| rk * ek).sum();
    energy - passive
}

/// Initial condition and model for a charging run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChargingScenario {
    pub params: SystemParams,
    /// Cavity holding the photon at `t = 0`; site 0 hosts the atom.
    pub photon_site: usize,
    pub model: ModelKind,
    pub representation: Representation,
}

impl ChargingScenario {
    pub fn new(params: SystemParams) -> Self {
        ChargingScenario {
            params,
            photon_site: 1,
            model: ModelKind::Effective,
            representation: Representation::SiteSpace,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErgotropyTrace {
    pub times: Vec<f64>,
    pub work: Vec<f64>,
    /// `W(t) / t`, with 0 at `t = 0`.
    pub power: Vec<f64>,
    pub p_dark: Vec<f64>,
    pub w_max: f64,
    pub t_at_max: f64,
}

/// Evolve `psi0` and evaluate the ergotropy of the reduced battery state at every grid time.
pub fn work_series(
    psi0: &WaveFunction,
    t_grid: &[f64],
    params: &SystemParams,
) -> Result<(TimeSeries, Vec<f64>)> {
    let h = battery_hamiltonian(params);
    let mut work = Vec::with_capacity(t_grid.len());
    let mut failure = None;
    let series = evolve_with(psi0, t_grid, params, &EvolveOptions::default(), |t, psi| {
        match reduce_battery(psi, params, t) {
            Ok(rho) => work.push(ergotropy(&rho, &h)),
            Err(e) => {
                failure.get_or_insert(e);
                work.push(f64::NAN);
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok((series, work)),
    }
}

/// `W(t) / t`, with 0 at `t = 0`.
pub fn average_power(t_grid: &[f64], work: &[f64]) -> Vec<f64> {
    t_grid
        .iter()
        .zip(work)
        .map(|(&t, &w)| if t > 0.0 { w / t } else { 0.0 })
        .collect()
}

pub fn ergotropy_trace(scenario: &ChargingScenario, t_grid: &[f64]) -> Result<ErgotropyTrace> {
    let params = &scenario.params;
    let psi0 = initial_state_photon_at_site(
        scenario.photon_site,
        params,
        scenario.model,
        scenario.representation,
    )?;
    let (series, work) = work_series(&psi0, t_grid, params)?;
    let power = average_power(t_grid, &work);
    let (imax, w_max) = work
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, w)| if w > acc.1 { (i, w) } else { acc });
    Ok(ErgotropyTrace {
        times: t_grid.to_vec(),
        work,
        power,
        p_dark: series.p_dark,
        w_max,
        t_at_max: t_grid[imax],
    })
}

/// Maximum ergotropy over `(omega0, xi)`, stored omega0-major. Failed cells are `None`.
#[derive(Debug, Clone, Serialize)]
pub struct ErgotropySweep {
    pub omega0: Vec<f64>,
    pub xi: Vec<f64>,
    pub w_max: Vec<Option<f64>>,
    /// `(omega0 index, xi index, message)` for every failed cell.
    pub failures: Vec<(usize, usize, String)>,
}

impl ErgotropySweep {
    pub fn get(&self, i_omega0: usize, i_xi: usize) -> Option<f64> {
        self.w_max[i_omega0 * self.xi.len() + i_xi]
    }

    /// `W_max(xi)` at one `omega0`.
    pub fn slice_at_omega0(&self, i_omega0: usize) -> Vec<Option<f64>> {
        (0..self.xi.len()).map(|j| self.get(i_omega0, j)).collect()
    }

    /// Index of the best `omega0` at fixed `xi`, ignoring failed cells.
    pub fn argmax_omega0(&self, i_xi: usize) -> Option<usize> {
        argmax((0..self.omega0.len()).map(|i| self.get(i, i_xi)))
    }
}

pub(crate) fn argmax(values: impl Iterator<Item = Option<f64>>) -> Option<usize> {
    values
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub t_grid: Vec<f64>,
    pub photon_site: usize,
    pub model: ModelKind,
}

/// `W_max` on every `(omega0, xi)` cell; cells run in parallel and are gathered in index order.
pub fn sweep_ergotropy(
    omega0_grid: &[f64],
    xi_grid: &[f64],
    base: &SystemParams,
    opts: &SweepOptions,
) -> Result<ErgotropySweep> {
    if omega0_grid.is_empty() || xi_grid.is_empty() {
        return Err(Error::invalid("sweep", "grids must be non-empty"));
    }
    let cells: Vec<(usize, usize)> = (0..omega0_grid.len())
        .flat_map(|i| (0..xi_grid.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let params = SystemParams {
                omega0: omega0_grid[i],
                xi: xi_grid[j],
                ..*base
            };
            let scenario = ChargingScenario {
                params,
                photon_site: opts.photon_site,
                model: opts.model,
                representation: Representation::SiteSpace,
            };
            ergotropy_trace(&scenario, &opts.t_grid).map(|tr| tr.w_max)
        })
        .collect();
    let mut w_max = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (&(i, j), r) in cells.iter().zip(results) {
        match r {
            Ok(w) => w_max.push(Some(w)),
            Err(e) => {
                failures.push((i, j, e.to_string()));
                w_max.push(None);
            }
        }
    }
    Ok(ErgotropySweep {
        omega0: omega0_grid.to_vec(),
        xi: xi_grid.to_vec(),
        w_max,
        failures,
    })
}

/// Average charging power `P(xi, t)`.
#[derive(Debug, Clone, Serialize)]
pub struct PowerMap {
    pub xi: Vec<f64>,
    pub times: Vec<f64>,
    /// One row per `xi`; `None` if that run failed.
    pub power: Vec<Option<Vec<f64>>>,
}

impl PowerMap {
    /// Peak power and its time for row `i`.
    pub fn peak(&self, i: usize) -> Option<(f64, f64)> {
        let row = self.power[i].as_ref()?;
        let k = argmax(row.iter().map(|&v| Some(v)))?;
        Some((self.times[k], row[k]))
    }
}

pub fn power_map(
    xi_grid: &[f64],
    base: &SystemParams,
    opts: &SweepOptions,
) -> Result<PowerMap> {
    if xi_grid.is_empty() {
        return Err(Error::invalid("sweep.xi", "grid must be non-empty"));
    }
    let power = xi_grid
        .par_iter()
        .map(|&xi| {
            let scenario = ChargingScenario {
                params: SystemParams { xi, ..*base },
                photon_site: opts.photon_site,
                model: opts.model,
                representation: Representation::SiteSpace,
            };
            ergotropy_trace(&scenario, &opts.t_grid).ok().map(|t| t.power)
        })
        .collect();
    Ok(PowerMap {
        xi: xi_grid.to_vec(),
        times: opts.t_grid.clone(),
        power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn diag(v: [f64; 4]) -> BatteryState {
        BatteryState {
            rho: Matrix4::from_diagonal(&Vector4::from(v.map(|x| C64::new(x, 0.0)))),
            time: 0.0,
        }
    }

    #[test]
    fn battery_spectrum_contains_ground_and_dark() {
        let p = presets::fig5();
        let h = battery_hamiltonian(&p);
        let e: Vec<f64> = sorted_eigen(&h, false).iter().map(|x| x.0).collect();
        assert!(e[0].abs() < 1e-12);
        assert!(e.iter().any(|x| (x - 21.2).abs() < 1e-10), "{e:?}");
    }

    #[test]
    fn two_level_swap() {
        // h = diag(0, E) on (g, d) with the other levels pushed far up
        let e1 = 21.2;
        let h = Matrix4::from_diagonal(&Vector4::new(0.0, e1, 100.0, 200.0).map(|x| C64::new(x, 0.0)));
        let rho = diag([0.4, 0.6, 0.0, 0.0]);
        let pas = passive_state(&rho, &h);
        assert!((pas.rho[(0, 0)].re - 0.6).abs() < 1e-12);
        assert!((pas.rho[(1, 1)].re - 0.4).abs() < 1e-12);
        assert!((ergotropy(&rho, &h) - 0.2 * e1).abs() < 1e-12);
        assert!(ergotropy(&pas, &h).abs() < 1e-12);
    }

    #[test]
    fn pure_dark_state_work() {
        let p = presets::fig5();
        let h = battery_hamiltonian(&p);
        let psi = WaveFunction {
            model: ModelKind::Effective,
            representation: Representation::SiteSpace,
            amplitudes: vec![C64::new(1.0, 0.0); 1],
        };
        let rho = reduce_battery(&psi, &p, 0.0).unwrap();
        assert!(rho.rho[(2, 2)].norm() < 1e-30);
        assert!((ergotropy(&rho, &h) - 21.2).abs() < 1e-10);
        let empty = WaveFunction {
            amplitudes: vec![C64::new(0.0, 0.0)],
            ..psi
        };
        let rho = reduce_battery(&empty, &p, 0.0).unwrap();
        assert_eq!(rho.rho[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(ergotropy(&rho, &h), 0.0);
    }

    #[test]
    fn uncoupled_battery_never_charges() {
        let mut p = presets::fig7();
        p.n_cavities = 21;
        p.g1 = 0.0;
        p.g2 = 0.0;
        let grid = crate::dynamics::time_grid(3.0, 0.5).unwrap();
        let tr = ergotropy_trace(&ChargingScenario::new(p), &grid).unwrap();
        assert!(tr.work.iter().all(|&w| w == 0.0));
    }
}
