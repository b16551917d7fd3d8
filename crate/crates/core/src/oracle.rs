//! Lindblad master-equation propagation of the full atom-array system.
//!
//! Basis: `|0,g>` (index 0), the atom levels `d, e, m` (1..=3) with an empty array, then one
//! photon in site `j` with the atom in `g` (4 + j).

use serde::{Deserialize, Serialize};

use crate::dynamics::{check_grid, ModelKind, TimeSeries, WaveFunction};
use crate::error::{Error, Result};
use crate::linalg::{SparseBuilder, SparseMatrix};
use crate::model::{bare_dark_vector, full_operator, Representation, SystemParams, C64};

const GROUND: usize = 0;
const LEVEL_D: usize = 1;
const ATOM: usize = 1;
const SITES: usize = 4;

/// Collapse operator attached to the dissipative level `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseModel {
    /// `sqrt(kappa) |0,g><0,d|`: decay to the ground state, excitation lost.
    #[default]
    JumpToGround,
    /// `sqrt(kappa) |0,d><0,d|`: pure dephasing of `d`.
    Dephasing,
}

/// Dense row-major density matrix over the `N + 4` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// `|psi><psi|` for a full-model state, converted to site space if needed. Missing norm goes to `|0,g>`.
    pub fn from_wavefunction(psi: &WaveFunction) -> Result<Self> {
        if psi.model != ModelKind::Full {
            return Err(Error::invalid("rho0", "density matrices need a full-model state"));
        }
        let psi = psi.to_representation(Representation::SiteSpace);
        let n = psi.amplitudes.len() + 1;
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[ATOM..].copy_from_slice(&psi.amplitudes);
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = v[i] * v[j].conj();
            }
        }
        data[GROUND] += (1.0 - psi.norm_sqr()).max(0.0);
        Ok(DensityMatrix { dim: n, data })
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        nalgebra::SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `<v|rho|v>` for a vector on the atom levels `(d, e, m)` with an empty array.
    pub fn atom_expectation(&self, v: &nalgebra::Vector3<C64>) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..3 {
            for b in 0..3 {
                acc += v[a].conj() * self.get(ATOM + a, ATOM + b) * v[b];
            }
        }
        acc.re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Populations {
    pub ground: f64,
    pub d: f64,
    pub e: f64,
    pub m: f64,
    pub photons: f64,
}

impl Populations {
    pub fn total(&self) -> f64 {
        self.ground + self.d + self.e + self.m + self.photons
    }
}

pub fn population_report(rho: &DensityMatrix) -> Populations {
    let p = |i| rho.get(i, i).re;
    Populations {
        ground: p(GROUND),
        d: p(ATOM),
        e: p(ATOM + 1),
        m: p(ATOM + 2),
        photons: (SITES..rho.dim).map(p).sum(),
    }
}

#[derive(Debug, Clone, Default)]
pub struct LindbladOptions {
    pub collapse: CollapseModel,
    /// Upper bound on the step; default `0.06 / r` with `r` the Gershgorin radius of the centred excited block.
    pub max_step: Option<f64>,
    pub keep_snapshots: bool,
}

#[derive(Debug, Clone)]
pub struct LindbladRun {
    /// `p_dark` is `<0,E1|rho|0,E1>`; `norm` is the population outside `|0,g>`.
    pub series: TimeSeries,
    pub snapshots: Option<Vec<DensityMatrix>>,
    pub final_state: DensityMatrix,
}

/// `H - i kappa/2 |d><d|` on the `N + 4` basis; the ground row is empty.
fn generator(params: &SystemParams) -> Result<SparseMatrix> {
    let excited = full_operator(params, Representation::SiteSpace)?;
    let n = excited.dim() + 1;
    let mut b = SparseBuilder::new(n);
    for i in 0..excited.dim() {
        for (j, v) in excited.row(i) {
            b.add(i + ATOM, j + ATOM, v);
        }
    }
    Ok(b.build())
}

fn default_step(h: &SparseMatrix) -> f64 {
    let diag: Vec<f64> = (ATOM..h.dim()).map(|i| h.get(i, i).re).collect();
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let centre = 0.5 * (lo + hi);
    let radius = (ATOM..h.dim())
        .map(|i| h.row(i).map(|(j, v)| if i == j { (v - centre).norm() } else { v.norm() }).sum::<f64>())
        .fold(0.0, f64::max)
        .max(1e-300);
    0.06 / radius
}

struct Propagator {
    h: SparseMatrix,
    kappa: f64,
    collapse: CollapseModel,
    n: usize,
    x: Vec<C64>,
    term: Vec<C64>,
    next: Vec<C64>,
}

impl Propagator {
    /// `out = L(rho)`; `rho` must be Hermitian, and `out` is Hermitian by construction.
    fn apply(&mut self, rho: &[C64], out: &mut [C64]) {
        let n = self.n;
        self.h.mul_dense(rho, &mut self.x);
        const B: usize = 32;
        let x = &self.x;
        for ib in (0..n).step_by(B) {
            for jb in (ib..n).step_by(B) {
                for i in ib..(ib + B).min(n) {
                    for j in jb.max(i)..(jb + B).min(n) {
                        let d = x[i * n + j] - x[j * n + i].conj();
                        let v = C64::new(d.im, -d.re);
                        out[i * n + j] = v;
                        out[j * n + i] = v.conj();
                    }
                }
            }
        }
        let dd = rho[LEVEL_D * n + LEVEL_D].re * self.kappa;
        match self.collapse {
            CollapseModel::JumpToGround => out[GROUND * n + GROUND] += dd,
            CollapseModel::Dephasing => out[LEVEL_D * n + LEVEL_D] += dd,
        }
    }

    /// One RK4 step. For a linear time-independent generator RK4 equals the fourth-order
    /// Taylor polynomial of `exp(h L)`, which is what is evaluated here.
    fn step(&mut self, rho: &mut [C64], dt: f64) {
        let mut term = std::mem::take(&mut self.term);
        let mut next = std::mem::take(&mut self.next);
        term.copy_from_slice(rho);
        for m in 1..=4 {
            self.apply(&term, &mut next);
            let c = dt / m as f64;
            for (t, v) in term.iter_mut().zip(&next) {
                *t = v * c;
            }
            for (r, t) in rho.iter_mut().zip(&term) {
                *r += t;
            }
        }
        self.term = term;
        self.next = next;
    }
}

/// Integrate the master equation and record `<0,E1|rho|0,E1>` on `t_grid`.
pub fn lindblad_evolve(
    rho0: &DensityMatrix,
    t_grid: &[f64],
    params: &SystemParams,
    opts: &LindbladOptions,
) -> Result<LindbladRun> {
    check_grid(t_grid)?;
    let h = generator(params)?;
    let n = h.dim();
    if rho0.dim != n {
        return Err(Error::invalid("rho0", format!("dimension {} does not match {n}", rho0.dim)));
    }
    let dt_max = opts.max_step.unwrap_or_else(|| default_step(&h));
    let dark = bare_dark_vector(params);
    let zero = C64::new(0.0, 0.0);
    let mut prop = Propagator {
        h,
        kappa: params.kappa,
        collapse: opts.collapse,
        n,
        x: vec![zero; n * n],
        term: vec![zero; n * n],
        next: vec![zero; n * n],
    };

    let mut rho = rho0.clone();
    // start from an exactly Hermitian state
    for i in 0..n {
        for j in i..n {
            let v = 0.5 * (rho.data[i * n + j] + rho.data[j * n + i].conj());
            rho.data[i * n + j] = v;
            rho.data[j * n + i] = v.conj();
        }
    }
    let mut series = TimeSeries {
        times: t_grid.to_vec(),
        p_dark: Vec::with_capacity(t_grid.len()),
        norm: Vec::with_capacity(t_grid.len()),
        snapshots: None,
    };
    let mut snapshots = opts.keep_snapshots.then(Vec::new);
    let mut record = |rho: &DensityMatrix, t: f64, series: &mut TimeSeries| -> Result<()> {
        let trace = rho.trace();
        if (trace - 1.0).abs() > 1e-6 || !trace.is_finite() {
            return Err(Error::TraceDrift { trace, t });
        }
        series.p_dark.push(rho.atom_expectation(&dark).clamp(0.0, 1.0));
        series.norm.push(trace - rho.get(GROUND, GROUND).re);
        if let Some(s) = snapshots.as_mut() {
            s.push(rho.clone());
        }
        Ok(())
    };
    record(&rho, 0.0, &mut series)?;
    let mut t = 0.0;
    for &target in &t_grid[1..] {
        let span = target - t;
        let steps = (span / dt_max).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        for _ in 0..steps {
            prop.step(&mut rho.data, dt);
        }
        t = target;
        record(&rho, t, &mut series)?;
    }
    Ok(LindbladRun {
        series,
        snapshots,
        final_state: rho,
    })
}

/// Convenience: the full-model state `psi` as the initial density matrix.
pub fn lindblad_from_state(
    psi: &WaveFunction,
    t_grid: &[f64],
    params: &SystemParams,
    opts: &LindbladOptions,
) -> Result<LindbladRun> {
    lindblad_evolve(&DensityMatrix::from_wavefunction(psi)?, t_grid, params, opts)
}
