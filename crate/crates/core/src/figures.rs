//! Computations behind each reproducible figure scenario, independent of any file output.

use serde::Serialize;

use crate::analysis::{envelope_peaks, fit_exponential, DecayFit};
use crate::dynamics::{
    evolve, initial_state_atom_m, initial_state_photon_at_site, time_grid, EvolveOptions,
    ModelKind,
};
use crate::error::Result;
use crate::model::{atom_eigensystem_exact, Representation, SystemParams, C64};
use crate::spectral::{find_bound_states, AnalyticSolution, BoundStateSet};
use crate::thermo::{power_map, sweep_ergotropy, ErgotropySweep, PowerMap, SweepOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSweepRow {
    pub e1: f64,
    pub above: Option<f64>,
    pub below: Option<f64>,
}

impl BoundSweepRow {
    pub fn count(&self) -> usize {
        self.above.is_some() as usize + self.below.is_some() as usize
    }
}

/// Bound-state energies for `n_points` real dark energies spread over `[omega0 - 4 xi, omega0 + 4 xi]`.
pub fn bound_state_sweep(params: &SystemParams, n_points: usize) -> Result<Vec<BoundSweepRow>> {
    let lo = params.omega0 - 4.0 * params.xi;
    let hi = params.omega0 + 4.0 * params.xi;
    (0..n_points)
        .map(|i| {
            let e1 = lo + (hi - lo) * i as f64 / (n_points.max(2) - 1) as f64;
            let set = find_bound_states(params, C64::new(e1, 0.0))?;
            Ok(BoundSweepRow {
                e1,
                above: set.above.map(|s| s.energy.re),
                below: set.below.map(|s| s.energy.re),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DarkDynamics {
    pub e1: C64,
    pub bound: BoundStateSet,
    pub times: Vec<f64>,
    /// RK4 dark population of the effective model, photon injected at the atom's site.
    pub p_numeric: Vec<f64>,
    /// Pole contribution `|sum_j B_j Q_j e^{-iE_j t}|^2`.
    pub p_long_time: Vec<f64>,
    /// `2 pi / Re(phi)` when two bound states exist.
    pub rabi_period: Option<f64>,
    /// Mean spacing of the envelope peaks after `t_min`.
    pub peak_spacing: Option<f64>,
}

pub fn dark_dynamics(params: &SystemParams, t_max: f64, dt: f64, t_min: f64) -> Result<DarkDynamics> {
    let e1 = atom_eigensystem_exact(params)?.dark_energy();
    let solution = AnalyticSolution::new(params, e1)?;
    let grid = time_grid(t_max, dt)?;
    let psi0 = initial_state_photon_at_site(0, params, ModelKind::Effective, Representation::SiteSpace)?;
    let series = evolve(&psi0, &grid, params, &EvolveOptions::default())?;
    let p_long_time = grid.iter().map(|&t| solution.long_time_probability(t)).collect();
    let peak_spacing = envelope_peaks(&series, t_min).ok().map(|p| {
        (p[p.len() - 1].0 - p[0].0) / (p.len() - 1) as f64
    });
    Ok(DarkDynamics {
        e1,
        rabi_period: solution.bound.phi().map(|phi| 2.0 * std::f64::consts::PI / phi.re),
        bound: solution.bound,
        times: grid,
        p_numeric: series.p_dark,
        p_long_time,
        peak_spacing,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Lifetime {
    pub e1: C64,
    pub times: Vec<f64>,
    /// Effective model, atom starting in `m`, coupled to the array.
    pub p_coupled: Vec<f64>,
    /// Full model, atom starting in `m`, array decoupled.
    pub p_decoupled: Vec<f64>,
    /// Fit of the envelope peaks of `p_coupled`.
    pub coupled_fit: DecayFit,
    /// Fit of the raw samples of `p_decoupled` (a pure decay has no peaks).
    pub decoupled_fit: DecayFit,
}

pub fn lifetime(params: &SystemParams, t_max: f64, dt: f64, t_min: f64) -> Result<Lifetime> {
    let e1 = atom_eigensystem_exact(params)?.dark_energy();
    let grid = time_grid(t_max, dt)?;
    let opts = EvolveOptions::default();
    let coupled = evolve(
        &initial_state_atom_m(params, ModelKind::Effective, Representation::SiteSpace)?,
        &grid,
        params,
        &opts,
    )?;
    let coupled_fit = fit_exponential(&envelope_peaks(&coupled, t_min)?)?;

    let mut bare = *params;
    bare.g1 = 0.0;
    bare.g2 = 0.0;
    let decoupled = evolve(
        &initial_state_atom_m(&bare, ModelKind::Full, Representation::SiteSpace)?,
        &grid,
        &bare,
        &opts,
    )?;
    let samples: Vec<(f64, f64)> = grid
        .iter()
        .copied()
        .zip(decoupled.p_dark.iter().copied())
        .filter(|&(t, _)| t >= t_min)
        .collect();
    let decoupled_fit = fit_exponential(&samples)?;
    Ok(Lifetime {
        e1,
        times: grid,
        p_coupled: coupled.p_dark,
        p_decoupled: decoupled.p_dark,
        coupled_fit,
        decoupled_fit,
    })
}

/// Charging sweep options with the photon in the cavity next to the atom.
pub fn charging_options(t_max: f64, dt: f64) -> Result<SweepOptions> {
    Ok(SweepOptions {
        t_grid: time_grid(t_max, dt)?,
        photon_site: 1,
        model: ModelKind::Effective,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Resonance {
    pub e1: C64,
    pub sweep: ErgotropySweep,
    /// Best `omega0` for each `xi` (None if every cell in that column failed).
    pub argmax_omega0: Vec<Option<f64>>,
}

pub fn resonance(
    params: &SystemParams,
    omega0_grid: &[f64],
    xi_grid: &[f64],
    opts: &SweepOptions,
) -> Result<Resonance> {
    let e1 = atom_eigensystem_exact(params)?.dark_energy();
    let sweep = sweep_ergotropy(omega0_grid, xi_grid, params, opts)?;
    let argmax_omega0 = (0..xi_grid.len())
        .map(|j| sweep.argmax_omega0(j).map(|i| omega0_grid[i]))
        .collect();
    Ok(Resonance {
        e1,
        sweep,
        argmax_omega0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HoppingScan {
    pub xi: Vec<f64>,
    pub w_max: Vec<Option<f64>>,
    pub argmax_xi: Option<f64>,
}

pub fn hopping_scan(params: &SystemParams, xi_grid: &[f64], opts: &SweepOptions) -> Result<HoppingScan> {
    let sweep = sweep_ergotropy(&[params.omega0], xi_grid, params, opts)?;
    let w_max = sweep.slice_at_omega0(0);
    let argmax_xi = crate::thermo::argmax(w_max.iter().copied()).map(|j| xi_grid[j]);
    Ok(HoppingScan {
        xi: xi_grid.to_vec(),
        w_max,
        argmax_xi,
    })
}

pub fn charging_power(params: &SystemParams, xi_grid: &[f64], opts: &SweepOptions) -> Result<PowerMap> {
    power_map(xi_grid, params, opts)
}

/// True if `values` has one global maximum in its interior, the function rises to it, and after it
/// the tail settles below the peak: the last quarter stays under `settle` times the maximum.
pub fn rises_peaks_and_settles(values: &[f64], settle: f64) -> bool {
    let n = values.len();
    if n < 8 {
        return false;
    }
    let k = crate::thermo::argmax(values.iter().map(|&v| Some(v))).unwrap_or(0);
    if k == 0 || k + 1 >= n {
        return false;
    }
    let peak = values[k];
    let tail = &values[n - n / 4..];
    let tail_max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let flat = tail_max - tail_min <= 0.25 * peak;
    values[1] < peak && tail_max < settle * peak && flat
}
