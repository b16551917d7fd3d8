//! Single-excitation Schrodinger dynamics for the effective and full models.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, SchrodingerRk4, SparseMatrix};
use crate::model::{
    atom_eigensystem_exact, bare_dark_vector, effective_operator, full_operator, mode_grid,
    Representation, SystemParams, C64,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Dark state plus array; bright states dropped.
    #[default]
    Effective,
    /// All three atom levels plus array.
    Full,
}

/// Single-excitation state. Layout: `[u, beta_0 ..]` (effective) or `[u_d, u_e, u_m, beta_0 ..]` (full).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub model: ModelKind,
    pub representation: Representation,
    pub amplitudes: Vec<C64>,
}

impl WaveFunction {
    pub fn atom_len(model: ModelKind) -> usize {
        match model {
            ModelKind::Effective => 1,
            ModelKind::Full => 3,
        }
    }

    pub fn atom(&self) -> &[C64] {
        &self.amplitudes[..Self::atom_len(self.model)]
    }

    pub fn photons(&self) -> &[C64] {
        &self.amplitudes[Self::atom_len(self.model)..]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Overlap with the dark state `|0,E1>`; in the full model the projection on `(-Omega_c, 0, Omega_p) / Omega`.
    pub fn dark_amplitude(&self, params: &SystemParams) -> C64 {
        match self.model {
            ModelKind::Effective => self.amplitudes[0],
            ModelKind::Full => {
                let d = bare_dark_vector(params);
                (0..3).map(|i| d[i].conj() * self.amplitudes[i]).sum()
            }
        }
    }

    /// Same state with the photon part expressed in another basis.
    pub fn to_representation(&self, representation: Representation) -> WaveFunction {
        if representation == self.representation {
            return self.clone();
        }
        let n_atom = Self::atom_len(self.model);
        let photons = self.photons();
        let n = photons.len();
        let ks = mode_grid(n);
        let norm = 1.0 / (n as f64).sqrt();
        // beta_k = sum_j e^{-ikj} beta_j / sqrt(N); inverse has e^{+ikj}
        let sign = match representation {
            Representation::ModeSpace => -1.0,
            Representation::SiteSpace => 1.0,
        };
        let mut out = self.amplitudes[..n_atom].to_vec();
        match representation {
            Representation::ModeSpace => out.extend(ks.iter().map(|&k| {
                (0..n)
                    .map(|j| photons[j] * Complex64::from_polar(norm, sign * k * j as f64))
                    .sum::<C64>()
            })),
            Representation::SiteSpace => out.extend((0..n).map(|j| {
                ks.iter()
                    .zip(photons)
                    .map(|(&k, b)| b * Complex64::from_polar(norm, sign * k * j as f64))
                    .sum::<C64>()
            })),
        }
        WaveFunction {
            model: self.model,
            representation,
            amplitudes: out,
        }
    }
}

/// A photon in cavity `j`, atom in its ground state.
pub fn initial_state_photon_at_site(
    j: usize,
    params: &SystemParams,
    model: ModelKind,
    representation: Representation,
) -> Result<WaveFunction> {
    params.validate()?;
    let n = params.n_cavities;
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    let n_atom = WaveFunction::atom_len(model);
    let mut amplitudes = vec![C64::new(0.0, 0.0); n_atom + n];
    match representation {
        Representation::SiteSpace => amplitudes[n_atom + j] = C64::new(1.0, 0.0),
        Representation::ModeSpace => {
            let norm = 1.0 / (n as f64).sqrt();
            for (i, k) in mode_grid(n).into_iter().enumerate() {
                amplitudes[n_atom + i] = Complex64::from_polar(norm, -k * j as f64);
            }
        }
    }
    Ok(WaveFunction {
        model,
        representation,
        amplitudes,
    })
}

/// Atom in level `m`, array empty. The effective model keeps only the dark projection `Omega_p / Omega`.
pub fn initial_state_atom_m(
    params: &SystemParams,
    model: ModelKind,
    representation: Representation,
) -> Result<WaveFunction> {
    params.validate()?;
    let n_atom = WaveFunction::atom_len(model);
    let mut amplitudes = vec![C64::new(0.0, 0.0); n_atom + params.n_cavities];
    match model {
        ModelKind::Effective => {
            amplitudes[0] = C64::new(params.omega_p_rabi / params.omega_sq().sqrt(), 0.0)
        }
        ModelKind::Full => amplitudes[2] = C64::new(1.0, 0.0),
    }
    Ok(WaveFunction {
        model,
        representation,
        amplitudes,
    })
}

#[derive(Debug, Clone, Default)]
pub struct EvolveOptions {
    /// Upper bound on the RK4 step; default `0.02 / max|H_ii|`.
    pub max_step: Option<f64>,
    pub keep_snapshots: bool,
}

#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    /// Dark-state population `|<0,E1|psi(t)>|^2`.
    pub p_dark: Vec<f64>,
    /// Total population remaining in the single-excitation sector.
    pub norm: Vec<f64>,
    pub snapshots: Option<Vec<WaveFunction>>,
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::invalid("t_grid", "must not be empty"));
    }
    if t_grid[0] != 0.0 {
        return Err(Error::invalid("t_grid", "must start at t = 0"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("t_grid", "must be finite and strictly increasing"));
    }
    Ok(())
}

/// Hamiltonian matching the layout of `psi`.
pub fn hamiltonian_for(psi: &WaveFunction, params: &SystemParams) -> Result<SparseMatrix> {
    match psi.model {
        ModelKind::Effective => {
            let e1 = atom_eigensystem_exact(params)?.dark_energy();
            effective_operator(params, e1, psi.representation)
        }
        ModelKind::Full => full_operator(params, psi.representation),
    }
}

/// Real shift that centres the diagonal, and the default step `0.02 / max|H_ii|`.
pub(crate) fn shift_and_step(h: &SparseMatrix) -> (f64, f64) {
    let diag = h.diagonal();
    let lo = diag.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let hi = diag.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let w_max = diag.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    (0.5 * (lo + hi), 0.02 / w_max)
}

/// Integrate `i dpsi/dt = H psi` with fixed-step RK4 and record the dark population on `t_grid`.
///
/// The integration runs on `H - c` with a real shift `c` centring the diagonal; the global phase
/// `e^{-ict}` is restored in snapshots.
pub fn evolve(
    psi0: &WaveFunction,
    t_grid: &[f64],
    params: &SystemParams,
    opts: &EvolveOptions,
) -> Result<TimeSeries> {
    evolve_with(psi0, t_grid, params, opts, |_, _| {})
}

/// [`evolve`] that also hands every recorded state (phase restored) to `observe`.
pub fn evolve_with<F: FnMut(f64, &WaveFunction)>(
    psi0: &WaveFunction,
    t_grid: &[f64],
    params: &SystemParams,
    opts: &EvolveOptions,
    mut observe: F,
) -> Result<TimeSeries> {
    check_grid(t_grid)?;
    let h = hamiltonian_for(psi0, params)?;
    if h.dim() != psi0.amplitudes.len() {
        return Err(Error::invalid("psi0", "amplitude count does not match n_cavities"));
    }
    if psi0.model == ModelKind::Effective {
        params.require_dark_condition()?;
    }
    let (shift, default_step) = shift_and_step(&h);
    let dt_max = opts.max_step.unwrap_or(default_step);
    let hs = h.shifted(shift);
    let conservative = params.kappa == 0.0 && h.is_hermitian(0.0);

    let mut psi = psi0.amplitudes.clone();
    let mut rk = SchrodingerRk4::new(psi.len());
    let mut series = TimeSeries {
        times: t_grid.to_vec(),
        p_dark: Vec::with_capacity(t_grid.len()),
        norm: Vec::with_capacity(t_grid.len()),
        snapshots: opts.keep_snapshots.then(Vec::new),
    };
    let mut record = |psi: &[C64], t: f64, series: &mut TimeSeries| {
        let phase = Complex64::from_polar(1.0, -shift * t);
        let state = WaveFunction {
            model: psi0.model,
            representation: psi0.representation,
            amplitudes: psi.iter().map(|z| z * phase).collect(),
        };
        series.p_dark.push(state.dark_amplitude(params).norm_sqr().min(1.0));
        series.norm.push(norm_sqr(psi));
        observe(t, &state);
        if let Some(snaps) = series.snapshots.as_mut() {
            snaps.push(state);
        }
    };
    record(&psi, 0.0, &mut series);

    let mut t = 0.0;
    for &target in &t_grid[1..] {
        let span = target - t;
        let steps = (span / dt_max).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        for s in 0..steps {
            let before = if conservative { norm_sqr(&psi) } else { 0.0 };
            rk.step(&hs, &mut psi, dt);
            if conservative {
                let growth = norm_sqr(&psi) - before;
                if growth > 1e-6 || !growth.is_finite() {
                    return Err(Error::StepSizeTooLarge {
                        growth,
                        t: t + (s + 1) as f64 * dt,
                    });
                }
            }
        }
        t = target;
        record(&psi, t, &mut series);
    }
    Ok(series)
}

/// Dark population at `t`, linearly interpolated between samples.
pub fn dark_population(series: &TimeSeries, t: f64) -> Result<f64> {
    let times = &series.times;
    let (start, end) = (times[0], *times.last().unwrap());
    if !(t >= start && t <= end) {
        return Err(Error::OutOfRange { t, start, end });
    }
    let i = times.partition_point(|&x| x <= t);
    if i == 0 {
        return Ok(series.p_dark[0]);
    }
    let i = i - 1;
    if times[i] == t || i + 1 == times.len() {
        return Ok(series.p_dark[i]);
    }
    let w = (t - times[i]) / (times[i + 1] - times[i]);
    Ok(series.p_dark[i] * (1.0 - w) + series.p_dark[i + 1] * w)
}

/// Uniform grid `0, dt, 2 dt, ..` up to `t_max` inclusive.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && dt > 0.0 && t_max.is_finite() && dt.is_finite()) {
        return Err(Error::invalid("time", "t_max and dt must be positive and finite"));
    }
    let n = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| i as f64 * dt).collect())
}

/// Rough Rabi period `2 pi / Re(phi)`, for callers that want to size a sampling grid.
pub fn rabi_period(phi: C64) -> f64 {
    2.0 * PI / phi.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn small(mut p: SystemParams) -> SystemParams {
        p.n_cavities = 41;
        p
    }

    #[test]
    fn photon_initial_states() {
        let p = small(presets::fig3a());
        let s = initial_state_photon_at_site(0, &p, ModelKind::Effective, Representation::ModeSpace).unwrap();
        let c = 1.0 / (41f64).sqrt();
        assert!(s.photons().iter().all(|b| (b - c).norm() < 1e-15));
        let s1 = initial_state_photon_at_site(1, &p, ModelKind::Effective, Representation::ModeSpace).unwrap();
        let ks = mode_grid(41);
        for (b, k) in s1.photons().iter().zip(ks) {
            assert!((b - Complex64::from_polar(c, -k)).norm() < 1e-15);
        }
        assert!((s1.norm_sqr() - 1.0).abs() < 1e-14);
        let site = s1.to_representation(Representation::SiteSpace);
        assert!((site.photons()[1] - 1.0).norm() < 1e-13);
        assert!(matches!(
            initial_state_photon_at_site(41, &p, ModelKind::Full, Representation::SiteSpace),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn atom_m_initial_states() {
        let p = presets::fig3a();
        let s = initial_state_atom_m(&p, ModelKind::Effective, Representation::SiteSpace).unwrap();
        assert!((s.amplitudes[0].re - 0.9950).abs() < 1e-4);
        let f = initial_state_atom_m(&p, ModelKind::Full, Representation::SiteSpace).unwrap();
        assert_eq!(f.norm_sqr(), 1.0);
        let mut q = p;
        q.omega_c_rabi = q.omega_p_rabi;
        let s = initial_state_atom_m(&q, ModelKind::Effective, Representation::SiteSpace).unwrap();
        assert!((s.amplitudes[0].re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn decoupled_atom_keeps_population() {
        let mut p = small(presets::fig3a());
        p.kappa = 0.0;
        p.g1 = 0.0;
        p.g2 = 0.0;
        let psi = initial_state_atom_m(&p, ModelKind::Effective, Representation::SiteSpace).unwrap();
        let grid = time_grid(5.0, 0.5).unwrap();
        let s = evolve(&psi, &grid, &p, &EvolveOptions::default()).unwrap();
        let u0 = psi.amplitudes[0].norm_sqr();
        assert!(s.p_dark.iter().all(|v| (v - u0).abs() < 1e-12));
    }

    #[test]
    fn interpolation() {
        let s = TimeSeries {
            times: vec![0.0, 1.0, 2.0],
            p_dark: vec![0.0, 0.5, 0.5],
            norm: vec![1.0; 3],
            snapshots: None,
        };
        assert_eq!(dark_population(&s, 1.0).unwrap(), 0.5);
        assert_eq!(dark_population(&s, 0.5).unwrap(), 0.25);
        assert_eq!(dark_population(&s, 1.5).unwrap(), 0.5);
        assert!(matches!(dark_population(&s, 2.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn rejects_bad_grids() {
        let p = small(presets::fig3a());
        let psi = initial_state_atom_m(&p, ModelKind::Full, Representation::SiteSpace).unwrap();
        for g in [vec![], vec![1.0, 2.0], vec![0.0, 1.0, 1.0]] {
            assert!(evolve(&psi, &g, &p, &EvolveOptions::default()).is_err());
        }
    }
}
