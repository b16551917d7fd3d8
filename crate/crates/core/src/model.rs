//! Scenario parameters, Hamiltonians and the driven three-level atom block.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{SparseBuilder, SparseMatrix};

pub type C64 = Complex64;

const fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Physical parameters of one scenario. All frequencies share one caller-chosen unit, hbar = 1.
///
/// `delta_e` is the detuning of the driven transition, `omega_e_level - omega_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub omega0: f64,
    pub xi: f64,
    pub n_cavities: usize,
    pub g1: f64,
    pub g2: f64,
    pub omega_p_rabi: f64,
    pub omega_c_rabi: f64,
    pub omega_d_real: f64,
    pub kappa: f64,
    pub omega_e_level: f64,
    pub omega_m_level: f64,
    pub delta_e: f64,
}

/// Basis used for the photonic part of a state or Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    ModeSpace,
    #[default]
    SiteSpace,
}

impl SystemParams {
    /// Check the structural invariants. Field names in errors match the serialized names.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega0", self.omega0),
            ("xi", self.xi),
            ("g1", self.g1),
            ("g2", self.g2),
            ("omega_p_rabi", self.omega_p_rabi),
            ("omega_c_rabi", self.omega_c_rabi),
            ("omega_d_real", self.omega_d_real),
            ("kappa", self.kappa),
            ("omega_e_level", self.omega_e_level),
            ("omega_m_level", self.omega_m_level),
            ("delta_e", self.delta_e),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.xi <= 0.0 {
            return Err(Error::invalid("xi", format!("must be > 0, got {}", self.xi)));
        }
        if self.kappa < 0.0 {
            return Err(Error::invalid("kappa", format!("must be >= 0, got {}", self.kappa)));
        }
        if self.n_cavities < 3 {
            return Err(Error::invalid(
                "n_cavities",
                format!("must be >= 3, got {}", self.n_cavities),
            ));
        }
        if self.n_cavities.is_multiple_of(2) {
            return Err(Error::invalid(
                "n_cavities",
                format!("must be odd so the mode grid is symmetric about k = 0, got {}", self.n_cavities),
            ));
        }
        if self.omega_sq() <= 0.0 {
            return Err(Error::invalid(
                "omega_p_rabi",
                "omega_p_rabi and omega_c_rabi cannot both be zero",
            ));
        }
        Ok(())
    }

    /// Set `g1`, `g2` so that the total coupling is `g` and only the dark state couples.
    pub fn with_dark_coupling(mut self, g: f64) -> Self {
        let omega = self.omega_sq().sqrt();
        self.g1 = -g * self.omega_c_rabi / omega;
        self.g2 = g * self.omega_p_rabi / omega;
        self
    }

    /// Total atom-cavity coupling `sqrt(g1^2 + g2^2)`.
    pub fn g(&self) -> f64 {
        self.g1.hypot(self.g2)
    }

    /// Per-mode coupling `g / sqrt(N)`.
    pub fn hop_coupling(&self) -> f64 {
        self.g() / (self.n_cavities as f64).sqrt()
    }

    /// `Omega^2 = Omega_c^2 + Omega_p^2`.
    pub fn omega_sq(&self) -> f64 {
        self.omega_c_rabi * self.omega_c_rabi + self.omega_p_rabi * self.omega_p_rabi
    }

    /// Complex energy of the dissipative level, `Omega_d' - i kappa / 2`.
    pub fn omega_d(&self) -> C64 {
        C64::new(self.omega_d_real, -0.5 * self.kappa)
    }

    /// True iff `g1 Omega_p + g2 Omega_c = 0` to relative tolerance 1e-12, i.e. only the dark
    /// combination of `d` and `m` couples to the cavity.
    pub fn dark_condition(&self) -> bool {
        let lhs = self.g1 * self.omega_p_rabi + self.g2 * self.omega_c_rabi;
        let scale = self.g() * self.omega_sq().sqrt();
        lhs.abs() <= 1e-12 * scale
    }

    pub fn require_dark_condition(&self) -> Result<()> {
        if self.dark_condition() {
            Ok(())
        } else {
            Err(Error::DarkConditionViolated {
                g1: self.g1,
                g2: self.g2,
            })
        }
    }

    pub fn band(&self) -> (f64, f64) {
        (self.omega0 - 2.0 * self.xi, self.omega0 + 2.0 * self.xi)
    }
}

/// Array dispersion `omega0 - 2 xi cos k`.
pub fn band_frequency(k: f64, params: &SystemParams) -> f64 {
    params.omega0 - 2.0 * params.xi * k.cos()
}

/// Wavenumbers `2 pi n / N` for `n = -(N-1)/2 ..= (N-1)/2`.
pub fn mode_grid(n_cavities: usize) -> Vec<f64> {
    let half = (n_cavities as i64 - 1) / 2;
    (-half..=half)
        .map(|n| 2.0 * PI * n as f64 / n_cavities as f64)
        .collect()
}

/// Rotating-frame atom block in the `(d, e, m)` basis. Complex symmetric, not Hermitian for kappa > 0.
pub fn atom_hamiltonian(params: &SystemParams) -> Matrix3<C64> {
    let p = re(params.omega_p_rabi);
    let c = re(params.omega_c_rabi);
    let z = re(0.0);
    Matrix3::new(
        params.omega_d(), p, z,
        p, re(params.delta_e), c,
        z, c, re(params.omega_m_level),
    )
}

/// Auxiliary quantities of the perturbative treatment, all relative to `Omega_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomDerived {
    pub omega1: C64,
    pub omega2: C64,
    pub omega_sq: f64,
    /// Bright-state offset `Omega'`.
    pub omega_prime: C64,
    pub omega_plus: C64,
    pub omega_minus: C64,
    /// Unperturbed roots `y_0j` of the cubic at `omega2 = 0`.
    pub y0: [C64; 3],
    /// First-order coefficients `A_j` with `y_j = y_0j + A_j omega2`.
    pub a: [C64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomEigensystem {
    pub energies: [C64; 3],
    /// Unit eigenvectors (Hermitian norm) in the `(d, e, m)` basis.
    pub vectors: [Vector3<C64>; 3],
    /// Norms of the unnormalized closed-form eigenvectors.
    pub norms: [f64; 3],
    pub dark_index: usize,
    pub derived: AtomDerived,
}

impl AtomEigensystem {
    pub fn dark_energy(&self) -> C64 {
        self.energies[self.dark_index]
    }

    pub fn dark_vector(&self) -> Vector3<C64> {
        self.vectors[self.dark_index]
    }
}

fn derived_quantities(params: &SystemParams) -> AtomDerived {
    let od = params.omega_d();
    let omega1 = re(params.delta_e) - od;
    let omega2 = re(params.omega_m_level) - od;
    let omega_sq = params.omega_sq();
    let (p2, c2) = (
        params.omega_p_rabi * params.omega_p_rabi,
        params.omega_c_rabi * params.omega_c_rabi,
    );
    // y^2 - omega1 y - Omega^2 = 0 gives the bright roots when omega2 = 0
    let disc = (omega1 * omega1 + 4.0 * omega_sq).sqrt();
    let omega_plus = 0.5 * (omega1 + disc);
    let omega_minus = 0.5 * (omega1 - disc);
    let y0 = [re(0.0), omega_plus, omega_minus];
    // dP/dy and dP/d(omega2) of the cubic, evaluated at omega2 = 0
    let a = y0.map(|y| {
        let dp_dy = 3.0 * y * y - 2.0 * omega1 * y - omega_sq;
        let dp_dw = -y * y + omega1 * y + p2;
        -dp_dw / dp_dy
    });
    let omega_prime = 0.5 * (omega1 + (c2 / omega_sq) * omega2) + od;
    AtomDerived {
        omega1,
        omega2,
        omega_sq,
        omega_prime,
        omega_plus,
        omega_minus,
        y0,
        a,
    }
}

/// Characteristic cubic in `y = E - Omega_d`: value and derivative.
fn cubic(y: C64, w1: C64, w2: C64, p2: f64, c2: f64) -> (C64, C64) {
    let b = w1 + w2;
    let c = w1 * w2 - c2 - p2;
    let d = p2 * w2;
    let val = ((y - b) * y + c) * y + d;
    let der = (3.0 * y - 2.0 * b) * y + c;
    (val, der)
}

fn closed_form_vector(y: C64, w1: C64, w2: C64, p: f64, c: f64) -> Vector3<C64> {
    Vector3::new((y - w1) * (y - w2) - c * c, p * (y - w2), re(p * c))
}

/// Null vector of `A` from the cross product of its two most independent rows (bilinear, no conjugation).
fn null_vector(a: &Matrix3<C64>) -> Vector3<C64> {
    let rows: [Vector3<C64>; 3] = [0, 1, 2].map(|i| a.row(i).transpose());
    let mut best = Vector3::zeros();
    let mut best_norm = -1.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let v = rows[i].cross(&rows[j]);
        let n = v.norm();
        if n > best_norm {
            best_norm = n;
            best = v;
        }
    }
    best
}

/// Exact eigenvalues and eigenvectors of the atom block, with the dark state identified by
/// continuation from the `kappa = 0, Omega_c = 0` limit where it is the bare level `m`.
pub fn atom_eigensystem_exact(params: &SystemParams) -> Result<AtomEigensystem> {
    params.validate()?;
    let h = atom_hamiltonian(params);
    let od = params.omega_d();
    let derived = derived_quantities(params);
    let (w1, w2) = (derived.omega1, derived.omega2);
    let p = params.omega_p_rabi;
    let c = params.omega_c_rabi;
    let (p2, c2) = (p * p, c * c);

    let schur = nalgebra::linalg::Schur::new(h);
    let (_, t) = schur.unpack();
    let mut energies = [t[(0, 0)], t[(1, 1)], t[(2, 2)]];

    // Newton polish on the cubic in y
    for e in energies.iter_mut() {
        let mut y = *e - od;
        for _ in 0..3 {
            let (f, df) = cubic(y, w1, w2, p2, c2);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            if !step.is_finite() {
                break;
            }
            y -= step;
        }
        *e = y + od;
    }
    if params.kappa == 0.0 {
        for e in energies.iter_mut() {
            e.im = 0.0;
        }
    }

    let scale = h.norm().max(1.0);
    let mut gap = f64::INFINITY;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        gap = gap.min((energies[i] - energies[j]).norm());
    }
    if gap <= 1e-10 * scale {
        return Err(Error::DegenerateSpectrum { gap });
    }

    let dark_index = track_dark_root(params, &energies)?;

    let mut vectors = [Vector3::zeros(); 3];
    let mut norms = [0.0; 3];
    for (k, &e) in energies.iter().enumerate() {
        let y = e - od;
        let mut v = closed_form_vector(y, w1, w2, p, c);
        let a = h - Matrix3::from_diagonal_element(e);
        let residual = |v: &Vector3<C64>| (a * v).norm() / v.norm();
        if v.norm() <= 1e-8 * scale * scale || residual(&v) > 1e-10 * scale {
            let alt = null_vector(&a);
            if v.norm() == 0.0 || residual(&alt) < residual(&v) {
                v = alt;
            }
        }
        let n = v.norm();
        norms[k] = n;
        let mut unit = v / re(n);
        // fix the global phase: largest component real positive
        let (imax, _) = unit
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, z)| if z.norm() > acc.1 { (i, z.norm()) } else { acc });
        let phase = unit[imax] / re(unit[imax].norm());
        unit /= phase;
        if params.kappa == 0.0 {
            for z in unit.iter_mut() {
                z.im = 0.0;
            }
            let n = unit.norm();
            unit /= re(n);
        }
        vectors[k] = unit;
    }

    Ok(AtomEigensystem {
        energies,
        vectors,
        norms,
        dark_index,
        derived,
    })
}

/// Follow the cubic root that starts at `y = omega2` while kappa and Omega_c are ramped up from zero.
fn track_dark_root(params: &SystemParams, energies: &[C64; 3]) -> Result<usize> {
    const STEPS: usize = 400;
    let p2 = params.omega_p_rabi * params.omega_p_rabi;
    let od_full = params.omega_d();
    let mut y = re(params.omega_m_level - params.omega_d_real);
    for step in 1..=STEPS {
        let s = step as f64 / STEPS as f64;
        let od = C64::new(params.omega_d_real, -0.5 * s * params.kappa);
        let w1 = re(params.delta_e) - od;
        let w2 = re(params.omega_m_level) - od;
        let c = s * params.omega_c_rabi;
        for _ in 0..8 {
            let (f, df) = cubic(y, w1, w2, p2, c * c);
            if df.norm() == 0.0 {
                break;
            }
            let dy = f / df;
            if !dy.is_finite() {
                break;
            }
            y -= dy;
            if dy.norm() <= 1e-15 * (1.0 + y.norm()) {
                break;
            }
        }
    }
    let tracked = y + od_full;
    let mut dist: Vec<(usize, f64)> = energies
        .iter()
        .enumerate()
        .map(|(i, e)| (i, (e - tracked).norm()))
        .collect();
    dist.sort_by(|a, b| a.1.total_cmp(&b.1));
    let scale = atom_hamiltonian(params).norm().max(1.0);
    if dist[1].1 - dist[0].1 <= 1e-10 * scale {
        return Err(Error::DegenerateSpectrum {
            gap: dist[1].1 - dist[0].1,
        });
    }
    Ok(dist[0].0)
}

/// First-order closed forms: `[E1, E2, E3]` with `E1` the dark energy and `E2,3 = +-Omega + Omega' - i (Omega_p^2 / 4 Omega^2) kappa`.
pub fn atom_eigensystem_perturbative(params: &SystemParams) -> [C64; 3] {
    let omega_sq = params.omega_sq();
    let omega = omega_sq.sqrt();
    let (p2, c2) = (
        params.omega_p_rabi * params.omega_p_rabi,
        params.omega_c_rabi * params.omega_c_rabi,
    );
    let ratio = p2 / omega_sq;
    let e1 = C64::new(
        ratio * params.omega_m_level + (1.0 - ratio) * params.omega_d_real,
        -(c2 / (2.0 * omega_sq)) * params.kappa,
    );
    let omega_prime = 0.5
        * (params.delta_e
            + (c2 / omega_sq) * params.omega_m_level
            + (1.0 - c2 / omega_sq) * params.omega_d_real);
    let im = -(p2 / (4.0 * omega_sq)) * params.kappa;
    [
        e1,
        C64::new(omega + omega_prime, im),
        C64::new(-omega + omega_prime, im),
    ]
}

/// Unit dark vector `(-Omega_c, 0, Omega_p) / Omega`, equal to `(g1, 0, g2) / g` under the dark condition.
pub fn dark_state_vector(params: &SystemParams) -> Result<Vector3<C64>> {
    params.require_dark_condition()?;
    Ok(bare_dark_vector(params))
}

pub(crate) fn bare_dark_vector(params: &SystemParams) -> Vector3<C64> {
    let omega = params.omega_sq().sqrt();
    Vector3::new(
        re(-params.omega_c_rabi / omega),
        re(0.0),
        re(params.omega_p_rabi / omega),
    )
}

/// Dense effective Hamiltonian: index 0 is the dark state `|0,E1>`, then modes or sites.
pub fn effective_hamiltonian(
    params: &SystemParams,
    representation: Representation,
) -> Result<DMatrix<C64>> {
    let e1 = atom_eigensystem_exact(params)?.dark_energy();
    Ok(effective_operator(params, e1, representation)?.to_dense())
}

/// Sparse effective Hamiltonian with an explicit dark energy `e1`.
pub fn effective_operator(
    params: &SystemParams,
    e1: C64,
    representation: Representation,
) -> Result<SparseMatrix> {
    params.validate()?;
    params.require_dark_condition()?;
    let n = params.n_cavities;
    let mut b = SparseBuilder::new(n + 1);
    b.add(0, 0, e1);
    match representation {
        Representation::ModeSpace => {
            let j = re(params.hop_coupling());
            for (i, k) in mode_grid(n).into_iter().enumerate() {
                b.add(i + 1, i + 1, re(band_frequency(k, params)));
                b.add(0, i + 1, j);
                b.add(i + 1, 0, j);
            }
        }
        Representation::SiteSpace => {
            add_ring(&mut b, params, 1);
            b.add(0, 1, re(params.g()));
            b.add(1, 0, re(params.g()));
        }
    }
    Ok(b.build())
}

/// Cyclic tight-binding ring on indices `offset .. offset + N`.
pub(crate) fn add_ring(b: &mut SparseBuilder, params: &SystemParams, offset: usize) {
    let n = params.n_cavities;
    for j in 0..n {
        b.add(offset + j, offset + j, re(params.omega0));
        let next = offset + (j + 1) % n;
        b.add(offset + j, next, re(-params.xi));
        b.add(next, offset + j, re(-params.xi));
    }
}

/// Full single-excitation operator on `[d, e, m, site_0 .. site_{N-1}]` with the complex level `Omega_d`.
pub fn full_operator(params: &SystemParams, representation: Representation) -> Result<SparseMatrix> {
    params.validate()?;
    let n = params.n_cavities;
    let h = atom_hamiltonian(params);
    let mut b = SparseBuilder::new(n + 3);
    for i in 0..3 {
        for j in 0..3 {
            b.add(i, j, h[(i, j)]);
        }
    }
    match representation {
        Representation::SiteSpace => {
            add_ring(&mut b, params, 3);
            for (atom, g) in [(0, params.g1), (2, params.g2)] {
                b.add(atom, 3, re(g));
                b.add(3, atom, re(g));
            }
        }
        Representation::ModeSpace => {
            let scale = 1.0 / (n as f64).sqrt();
            for (i, k) in mode_grid(n).into_iter().enumerate() {
                b.add(3 + i, 3 + i, re(band_frequency(k, params)));
                for (atom, g) in [(0, params.g1), (2, params.g2)] {
                    b.add(atom, 3 + i, re(g * scale));
                    b.add(3 + i, atom, re(g * scale));
                }
            }
        }
    }
    Ok(b.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn band_frequency_at_special_points() {
        let p = presets::fig3a();
        assert!((band_frequency(0.0, &p) - (p.omega0 - 2.0)).abs() < 1e-14);
        assert!((band_frequency(PI / 2.0, &p) - p.omega0).abs() < 1e-13);
        assert!((band_frequency(PI, &p) - (p.omega0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn mode_grid_is_symmetric() {
        let k = mode_grid(7);
        assert_eq!(k.len(), 7);
        assert_eq!(k[3], 0.0);
        for i in 0..7 {
            assert!((k[i] + k[6 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn atom_hamiltonian_layout() {
        let p = presets::fig3a();
        let h = atom_hamiltonian(&p);
        assert!((h[(0, 0)] - C64::new(106.0 / 3.0, -10.0 / 3.0)).norm() < 1e-12);
        assert_eq!(h, h.transpose());
        let mut q = p;
        q.kappa = 0.0;
        q.omega_p_rabi = 0.0;
        q.omega_c_rabi = 0.0;
        let h = atom_hamiltonian(&q);
        assert_eq!(h, Matrix3::from_diagonal(&h.diagonal()));
    }

    #[test]
    fn fig3_dark_energies() {
        let a = atom_eigensystem_exact(&presets::fig3a()).unwrap().dark_energy();
        assert!((a.re - 35.32779).abs() < 1e-4, "{a}");
        assert!((a.im + 0.032068).abs() < 1e-5, "{a}");
        let b = atom_eigensystem_exact(&presets::fig3b()).unwrap().dark_energy();
        assert!((b.re - 66.65540).abs() < 1e-4, "{b}");
        assert!((b.im + 0.028628).abs() < 1e-5, "{b}");
    }

    #[test]
    fn resonant_dark_state_is_exact() {
        let mut p = presets::fig3a();
        p.kappa = 0.0;
        p.omega_m_level = p.omega_d_real;
        let sys = atom_eigensystem_exact(&p).unwrap();
        assert_eq!(sys.dark_energy(), re(p.omega_d_real));
        assert!(sys.dark_vector()[1].norm() < 1e-14);
    }

    #[test]
    fn perturbative_matches_exact_on_resonance() {
        let mut p = presets::fig3a();
        p.delta_e = p.omega_d_real;
        let exact = atom_eigensystem_exact(&p).unwrap().dark_energy();
        let pert = atom_eigensystem_perturbative(&p)[0];
        assert!((pert.re - exact.re).abs() <= 0.02 * exact.re.abs());
        assert!((pert.im - exact.im).abs() <= 0.02 * exact.im.abs());
    }

    #[test]
    fn perturbative_limits() {
        let mut p = presets::fig3a();
        p.omega_c_rabi = 1e-9;
        assert!(atom_eigensystem_perturbative(&p)[0].im.abs() < 1e-15);
        let mut q = presets::fig3a();
        q.kappa = 0.0;
        q.delta_e = q.omega_d_real;
        q.omega_m_level = q.omega_d_real;
        let e = atom_eigensystem_perturbative(&q);
        assert!(((e[1] - e[2]).re - 2.0 * q.omega_sq().sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dark_vector_examples() {
        let mut p = presets::fig3a();
        p.omega_c_rabi = p.omega_p_rabi;
        let p = p.with_dark_coupling(1.0);
        let v = dark_state_vector(&p).unwrap();
        let s = 0.5f64.sqrt();
        assert!((v - Vector3::new(re(-s), re(0.0), re(s))).norm() < 1e-15);

        let v = dark_state_vector(&presets::fig3a()).unwrap();
        assert!((v[0].re + 0.0995).abs() < 1e-3 && (v[2].re - 0.9950).abs() < 1e-3);
        assert_eq!(v[1], re(0.0));

        let mut bad = presets::fig3a();
        bad.g1 = -bad.g1;
        assert!(matches!(dark_state_vector(&bad), Err(Error::DarkConditionViolated { .. })));
    }

    #[test]
    fn effective_representations_share_spectrum() {
        let mut p = presets::fig3a();
        p.n_cavities = 31;
        p.kappa = 0.0;
        let hm = effective_hamiltonian(&p, Representation::ModeSpace).unwrap();
        let hs = effective_hamiltonian(&p, Representation::SiteSpace).unwrap();
        assert!((&hm - hm.adjoint()).norm() < 1e-12);
        let mut em: Vec<f64> = nalgebra::SymmetricEigen::new(hm).eigenvalues.iter().copied().collect();
        let mut es: Vec<f64> = nalgebra::SymmetricEigen::new(hs).eigenvalues.iter().copied().collect();
        em.sort_by(f64::total_cmp);
        es.sort_by(f64::total_cmp);
        for (a, b) in em.iter().zip(&es) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn effective_hamiltonian_hermitian_iff_kappa_zero() {
        let mut p = presets::fig3a();
        p.n_cavities = 11;
        let h = effective_hamiltonian(&p, Representation::SiteSpace).unwrap();
        assert!((&h - h.adjoint()).norm() > 1e-6);
        p.kappa = 0.0;
        let h = effective_hamiltonian(&p, Representation::SiteSpace).unwrap();
        assert!((&h - h.adjoint()).norm() == 0.0);
    }

    #[test]
    fn validation_names_fields() {
        let mut p = presets::fig3a();
        p.xi = 0.0;
        match p.validate() {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "xi"),
            other => panic!("{other:?}"),
        }
        let mut p = presets::fig3a();
        p.n_cavities = 4;
        assert!(p.validate().is_err());
    }
}
