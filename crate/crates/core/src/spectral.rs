//! Bound states of the dark state in the array band, residues, branch cut and analytic amplitudes.
//!
//! Energies `E` are used throughout; the Laplace variable is `p = -iE`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Region, Result};
use crate::model::{SystemParams, C64};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandInfo {
    pub lower_edge: f64,
    pub upper_edge: f64,
    /// Branch-cut endpoints in the Laplace variable, `-omega0 - 2 xi` and `-omega0 + 2 xi`.
    pub p_min: f64,
    pub p_max: f64,
}

impl BandInfo {
    pub fn new(params: &SystemParams) -> Self {
        let (lower_edge, upper_edge) = params.band();
        BandInfo {
            lower_edge,
            upper_edge,
            p_min: -params.omega0 - 2.0 * params.xi,
            p_max: -params.omega0 + 2.0 * params.xi,
        }
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.lower_edge && e <= self.upper_edge
    }
}

/// Form of the lattice sum used in the bound-state equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeSumMode {
    /// Infinite-array closed form.
    #[default]
    Continuum,
    /// Exact sum over the `N` modes of the ring.
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    pub energy: C64,
    pub location: Region,
    pub residue_weight: C64,
    pub pole_amplitude: C64,
    /// Distance from the nearer band edge, measured outward.
    pub edge_offset: C64,
}

impl BoundState {
    /// Contribution `B Q e^{-iEt}` of this pole to the dark amplitude.
    pub fn term(&self, t: f64) -> C64 {
        self.residue_weight * self.pole_amplitude * (C64::new(0.0, -t) * self.energy).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundStateSet {
    pub band: BandInfo,
    pub above: Option<BoundState>,
    pub below: Option<BoundState>,
}

impl BoundStateSet {
    pub fn states(&self) -> Vec<BoundState> {
        self.above.into_iter().chain(self.below).collect()
    }

    pub fn count(&self) -> usize {
        self.above.is_some() as usize + self.below.is_some() as usize
    }

    /// Energy splitting `E_above - E_below` when both states exist.
    pub fn phi(&self) -> Option<C64> {
        Some(self.above?.energy - self.below?.energy)
    }
}

/// `sqrt(x - 2 xi) sqrt(x + 2 xi)`: analytic off the band, positive above it, negative below.
fn band_root(x: C64, xi: f64) -> C64 {
    (x - 2.0 * xi).sqrt() * (x + 2.0 * xi).sqrt()
}

fn on_cut(e: C64, params: &SystemParams) -> bool {
    e.im.abs() < 1e-14 && BandInfo::new(params).contains(e.re)
}

/// Infinite-array closed form of `sum_k 1 / (E - omega_k)`: `N / sqrt((E - omega0)^2 - 4 xi^2)`
/// on the branch that is positive above the band and negative below it.
pub fn lattice_sum(e: C64, params: &SystemParams) -> Result<C64> {
    if on_cut(e, params) {
        return Err(Error::OnBranchCut(e));
    }
    Ok(params.n_cavities as f64 / band_root(e - params.omega0, params.xi))
}

/// Exact `sum_k 1 / (E - omega_k)` over the `N` ring modes, in closed form.
pub fn lattice_sum_ring(e: C64, params: &SystemParams) -> Result<C64> {
    if on_cut(e, params) {
        return Err(Error::OnBranchCut(e));
    }
    let x = e - params.omega0;
    let q = band_root(x, params.xi);
    Ok(params.n_cavities as f64 * ring_factor(x, q, params) / q)
}

/// `(1 + w^N) / (1 - w^N)` with `|w| < 1` the decaying root of `xi w^2 + x w + xi = 0`.
fn ring_factor(x: C64, q: C64, params: &SystemParams) -> C64 {
    let w = -2.0 * params.xi / (x + q);
    let wn = w.powu(params.n_cavities as u32);
    (1.0 + wn) / (1.0 - wn)
}

/// Dispersion function of one region, parametrized by the outward edge offset `delta`.
struct RegionEq<'a> {
    params: &'a SystemParams,
    e1: C64,
    sign: f64,
    mode: LatticeSumMode,
    g2: f64,
}

impl<'a> RegionEq<'a> {
    fn new(params: &'a SystemParams, e1: C64, region: Region, mode: LatticeSumMode) -> Self {
        let sign = match region {
            Region::AboveBand => 1.0,
            Region::BelowBand => -1.0,
        };
        let g = params.g();
        RegionEq {
            params,
            e1,
            sign,
            mode,
            g2: g * g,
        }
    }

    fn x(&self, delta: C64) -> C64 {
        self.sign * (2.0 * self.params.xi + delta)
    }

    fn energy(&self, delta: C64) -> C64 {
        self.params.omega0 + self.x(delta)
    }

    /// `sqrt(x - 2 xi) sqrt(x + 2 xi)` written without cancellation near the edge.
    fn q(&self, delta: C64) -> C64 {
        self.sign * delta.sqrt() * (delta + 4.0 * self.params.xi).sqrt()
    }

    /// Lattice sum divided by N.
    fn sigma(&self, delta: C64) -> C64 {
        let q = self.q(delta);
        match self.mode {
            LatticeSumMode::Continuum => 1.0 / q,
            LatticeSumMode::Ring => ring_factor(self.x(delta), q, self.params) / q,
        }
    }

    fn f(&self, delta: C64) -> C64 {
        self.energy(delta) - self.e1 - self.g2 * self.sigma(delta)
    }

    fn df(&self, delta: C64) -> C64 {
        match self.mode {
            LatticeSumMode::Continuum => {
                let q = self.q(delta);
                let dq = (delta + 2.0 * self.params.xi) / q;
                self.sign + self.g2 * dq / (q * q)
            }
            LatticeSumMode::Ring => {
                let h = 1e-7 * (delta.norm() + self.params.xi * 1e-6);
                (self.f(delta + h) - self.f(delta - h)) / (2.0 * h)
            }
        }
    }

    fn f_real(&self, delta: f64) -> f64 {
        self.f(C64::new(delta, 0.0)).re
    }
}

fn region_root(
    params: &SystemParams,
    e1: C64,
    region: Region,
    mode: LatticeSumMode,
) -> Result<Option<BoundState>> {
    let xi = params.xi;
    let real_eq = RegionEq::new(params, C64::new(e1.re, 0.0), region, mode);
    let lo = 1e-12 * xi;
    let mut hi = 10.0 * xi;
    let f_lo = real_eq.f_real(lo);
    let mut f_hi = real_eq.f_real(hi);
    while f_lo.signum() == f_hi.signum() && hi < 100.0 * xi {
        hi = (2.0 * hi).min(100.0 * xi);
        f_hi = real_eq.f_real(hi);
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) {
        return Err(Error::NoConvergence {
            region,
            detail: "dispersion function is not finite on the bracket".into(),
        });
    }
    if f_lo.signum() == f_hi.signum() {
        // With a coupled continuum the function diverges at the edge, so a root must exist
        // unless the dark energy lies beyond the widest bracket.
        if mode == LatticeSumMode::Continuum && params.g() > 0.0 {
            return Err(Error::NoConvergence {
                region,
                detail: format!("no sign change on [{lo:e}, {hi}] from the band edge"),
            });
        }
        return Ok(None);
    }

    // bisection in log(delta): the root can sit many decades closer to the edge than the bracket
    let (mut a, mut b) = (lo, hi);
    let s_lo = f_lo.signum();
    for _ in 0..200 {
        let m = (a * b).sqrt();
        if m <= a || m >= b {
            break;
        }
        if real_eq.f_real(m).signum() == s_lo {
            a = m;
        } else {
            b = m;
        }
        if b / a - 1.0 < 1e-15 {
            break;
        }
    }
    let mut delta = C64::new(0.5 * (a + b), 0.0);

    if e1.im != 0.0 {
        let eq = RegionEq::new(params, e1, region, mode);
        delta = complex_newton(&eq, delta, region)?;
    }

    let eq = RegionEq::new(params, e1, region, mode);
    let energy = eq.energy(delta);
    let x = eq.x(delta);
    let x2m4 = delta * (delta + 4.0 * xi);
    let residue_weight = x2m4 / (x2m4 + (energy - e1) * x);
    let pole_amplitude = params.g() / eq.q(delta);
    Ok(Some(BoundState {
        energy,
        location: region,
        residue_weight,
        pole_amplitude,
        edge_offset: delta,
    }))
}

fn complex_newton(eq: &RegionEq<'_>, mut delta: C64, region: Region) -> Result<C64> {
    let tol = 1e-12 * eq.params.xi;
    let mut f = eq.f(delta);
    for _ in 0..200 {
        if f.norm() < tol {
            return Ok(delta);
        }
        let step = f / eq.df(delta);
        if !step.is_finite() {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = delta - lambda * step;
            if trial.re > 0.0 {
                let ft = eq.f(trial);
                if ft.norm() < f.norm() || ft.norm() < tol {
                    delta = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if f.norm() < tol {
        return Ok(delta);
    }
    Err(Error::NoConvergence {
        region,
        detail: format!("complex Newton stalled at |f| = {:e}", f.norm()),
    })
}

/// Solve `E = E1 + J^2 S(E)` above and below the band with the infinite-array lattice sum.
pub fn find_bound_states(params: &SystemParams, e1: C64) -> Result<BoundStateSet> {
    find_bound_states_with(params, e1, LatticeSumMode::Continuum)
}

pub fn find_bound_states_with(
    params: &SystemParams,
    e1: C64,
    mode: LatticeSumMode,
) -> Result<BoundStateSet> {
    params.validate()?;
    if !e1.is_finite() {
        return Err(Error::invalid("e1", "dark energy must be finite"));
    }
    Ok(BoundStateSet {
        band: BandInfo::new(params),
        above: region_root(params, e1, Region::AboveBand, mode)?,
        below: region_root(params, e1, Region::BelowBand, mode)?,
    })
}

/// Branch-cut integrand `C(x)` for `x = E - omega0` inside the band.
pub fn branch_cut_integrand(x: f64, t: f64, params: &SystemParams, e1: C64) -> Result<C64> {
    let xi = params.xi;
    if x.abs() >= 2.0 * xi || x.is_nan() {
        return Err(Error::EdgeSingularity(x));
    }
    let g = params.g();
    let w = 4.0 * xi * xi - x * x;
    Ok(cut_kernel(x, t, params, e1) * (g / w.sqrt()) / (e1 - params.omega0 + x).powi(2).add_real(g.powi(4) / w))
}

trait AddReal {
    fn add_real(self, r: f64) -> Self;
}

impl AddReal for C64 {
    fn add_real(self, r: f64) -> Self {
        C64::new(self.re + r, self.im)
    }
}

/// `-(1/pi) (x - omega0 + E1) e^{i (x - omega0) t}`, the numerator shared by both forms.
fn cut_kernel(x: f64, t: f64, params: &SystemParams, e1: C64) -> C64 {
    let phase = (x - params.omega0) * t;
    -(1.0 / PI) * (x - params.omega0 + e1) * C64::new(phase.cos(), phase.sin())
}

/// `int_{-2xi}^{2xi} C(x) dx`, computed with `x = 2 xi sin(theta)` to remove the edge singularities.
pub fn branch_cut_integral(t: f64, params: &SystemParams, e1: C64, tol: f64) -> C64 {
    let xi = params.xi;
    let g = params.g();
    let g4 = g.powi(4);
    let f = |theta: f64| {
        let x = 2.0 * xi * theta.sin();
        let c = 2.0 * xi * theta.cos();
        let w = c * c;
        if w == 0.0 {
            return C64::new(0.0, 0.0);
        }
        // g dx / sqrt(4 xi^2 - x^2) = g dtheta
        cut_kernel(x, t, params, e1) * g / (e1 - params.omega0 + x).powi(2).add_real(g4 / w)
    };
    quad::integrate(f, -0.5 * PI, 0.5 * PI, tol)
}

/// Pole data for one configuration, reusable across many times.
#[derive(Debug, Clone)]
pub struct AnalyticSolution {
    pub params: SystemParams,
    pub e1: C64,
    pub bound: BoundStateSet,
}

impl AnalyticSolution {
    pub fn new(params: &SystemParams, e1: C64) -> Result<Self> {
        Ok(AnalyticSolution {
            params: *params,
            e1,
            bound: find_bound_states(params, e1)?,
        })
    }

    pub fn pole_sum(&self, t: f64) -> C64 {
        self.bound.states().iter().map(|s| s.term(t)).sum()
    }

    /// Dark amplitude `u(t)` for a photon initially at the atom's site.
    pub fn amplitude(&self, t: f64, include_branch_cut: bool) -> C64 {
        let mut u = self.pole_sum(t);
        if include_branch_cut {
            u += branch_cut_integral(t, &self.params, self.e1, 1e-12);
        }
        u
    }

    pub fn long_time_probability(&self, t: f64) -> f64 {
        long_time_probability(t, &self.bound)
    }
}

pub fn analytic_amplitude(
    t: f64,
    params: &SystemParams,
    e1: C64,
    include_branch_cut: bool,
) -> Result<C64> {
    Ok(AnalyticSolution::new(params, e1)?.amplitude(t, include_branch_cut))
}

/// Long-time dark probability `|sum_j B_j Q_j e^{-i E_j t}|^2` once the branch cut has dephased.
///
/// For two mirror-symmetric real poles this is `Q^2 [B1^2 + B2^2 - 2 B1 B2 cos(phi t)]`; with one
/// pole it is the constant (or, for complex energy, decaying) `|B Q|^2 e^{2 Im(E) t}`.
pub fn long_time_probability(t: f64, bound: &BoundStateSet) -> f64 {
    bound
        .states()
        .iter()
        .map(|s| s.term(t))
        .sum::<Complex64>()
        .norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{band_frequency, mode_grid};
    use crate::presets;

    fn discrete_sum(e: C64, p: &SystemParams) -> C64 {
        mode_grid(p.n_cavities)
            .into_iter()
            .map(|k| 1.0 / (e - band_frequency(k, p)))
            .sum()
    }

    #[test]
    fn lattice_sum_closed_forms() {
        let p = presets::fig2();
        let n = p.n_cavities as f64;
        let above = lattice_sum(C64::new(p.omega0 + 3.0, 0.0), &p).unwrap();
        assert!((above.re - n / 5f64.sqrt()).abs() < 1e-12 * n);
        let below = lattice_sum(C64::new(p.omega0 - 3.0, 0.0), &p).unwrap();
        assert!((below.re + n / 5f64.sqrt()).abs() < 1e-12 * n);
        let e = C64::new(p.omega0 + 2.1, 0.0);
        let brute = discrete_sum(e, &p);
        let closed = lattice_sum(e, &p).unwrap();
        assert!(((closed - brute) / brute).norm() < 5e-3);
        assert!(((lattice_sum_ring(e, &p).unwrap() - brute) / brute).norm() < 1e-12);
        assert!(matches!(
            lattice_sum(C64::new(p.omega0 + 1.0, 0.0), &p),
            Err(Error::OnBranchCut(_))
        ));
    }

    #[test]
    fn ring_sum_matches_brute_force_off_axis() {
        let mut p = presets::fig2();
        p.n_cavities = 9;
        for e in [C64::new(17.0, 0.3), C64::new(20.5, -0.01), C64::new(23.0, 1e-3)] {
            let brute = discrete_sum(e, &p);
            assert!((lattice_sum_ring(e, &p).unwrap() - brute).norm() < 1e-12 * brute.norm());
        }
    }

    #[test]
    fn symmetric_bound_pair() {
        let p = presets::fig2();
        let set = find_bound_states(&p, C64::new(p.omega0, 0.0)).unwrap();
        assert_eq!(set.count(), 2);
        let (a, b) = (set.above.unwrap(), set.below.unwrap());
        let da = a.energy.re - p.omega0;
        let db = p.omega0 - b.energy.re;
        assert!((da - 2.000506).abs() < 1e-5, "{da}");
        assert!((da - db).abs() < 1e-12);
        assert!((a.pole_amplitude + b.pole_amplitude).norm() < 1e-12);
        assert!((a.residue_weight - b.residue_weight).norm() < 1e-12);
    }

    #[test]
    fn far_dark_energy_gives_one_state_above() {
        let p = presets::fig3b();
        let set = find_bound_states(&p, C64::new(66.6554, 0.0)).unwrap();
        assert!(set.above.is_some());
        let below = set.below.unwrap();
        // the state below the band is pinned to the edge with vanishing weight
        assert!(below.residue_weight.norm() < 1e-3);
    }

    #[test]
    fn branch_cut_integrand_edges() {
        let p = presets::fig3a();
        let e1 = C64::new(35.3, -0.03);
        assert!(matches!(branch_cut_integrand(2.0, 0.0, &p, e1), Err(Error::EdgeSingularity(_))));
        let near = branch_cut_integrand(2.0 - 1e-12, 0.0, &p, e1).unwrap();
        assert!(near.norm() < 1e-4);
    }

    #[test]
    fn sum_rule_at_t_zero() {
        let p = presets::fig3a();
        let e1 = crate::model::atom_eigensystem_exact(&p).unwrap().dark_energy();
        let u0 = analytic_amplitude(0.0, &p, e1, true).unwrap();
        assert!(u0.norm() < 1e-10, "{u0}");
    }

    #[test]
    fn long_time_probability_symmetric_limits() {
        let p = presets::fig2();
        let set = find_bound_states(&p, C64::new(p.omega0, 0.0)).unwrap();
        assert!(long_time_probability(0.0, &set) < 1e-24);
        let phi = set.phi().unwrap().re;
        let a = set.above.unwrap();
        let expected = 4.0 * (a.pole_amplitude * a.residue_weight).norm_sqr();
        assert!((long_time_probability(PI / phi, &set) - expected).abs() < 1e-12);
    }
}
