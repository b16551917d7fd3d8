//! Built-in parameter sets for the reproducible figure scenarios.
//!
//! Figures 2-4 use the hopping `xi` as the frequency unit, figures 5-7 use `Omega_c`.
//! The detuning `delta_e` defaults to `omega_e_level` (drive frequency far below the
//! excited level) and the total coupling `g` is dark-tuned; both are free parameters here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::SystemParams;

/// Coupling used for the two-bound-state dynamics scenarios (units of xi).
pub const G_DYNAMICS: f64 = 3.0;
/// Coupling used for the charging scenarios (units of Omega_c).
pub const G_CHARGING: f64 = 2.0;
/// Window for the maximum ergotropy in the charging scenarios.
pub const CHARGING_T_MAX: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig2,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }

    pub fn params(self) -> SystemParams {
        match self {
            Figure::Fig2 => fig2(),
            Figure::Fig3a | Figure::Fig4 => fig3a(),
            Figure::Fig3b => fig3b(),
            Figure::Fig5 => fig5(),
            Figure::Fig6 => fig6(),
            Figure::Fig7 => fig7(),
        }
    }

    /// Frequency unit label carried by every output of this scenario.
    pub fn unit(self) -> &'static str {
        match self {
            Figure::Fig2 | Figure::Fig3a | Figure::Fig3b | Figure::Fig4 => "xi",
            _ => "omega_c",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown figure `{s}`; expected one of fig2, fig3a, fig3b, fig4, fig5, fig6, fig7"
                ))
            })
    }
}

/// Bound-state sweep scenario: the dark energy is swept directly, atom fields are placeholders.
pub fn fig2() -> SystemParams {
    SystemParams {
        omega0: 20.0,
        xi: 1.0,
        n_cavities: 253,
        g1: 0.0,
        g2: 0.0,
        omega_p_rabi: 50.0 / 3.0,
        omega_c_rabi: 5.0 / 3.0,
        omega_d_real: 20.0,
        kappa: 0.0,
        omega_e_level: 20.0,
        omega_m_level: 20.0,
        delta_e: 20.0,
    }
    .with_dark_coupling(0.3)
}

/// Dark energy inside the band: two bound states.
pub fn fig3a() -> SystemParams {
    SystemParams {
        omega0: 100.0 / 3.0,
        xi: 1.0,
        n_cavities: 253,
        g1: 0.0,
        g2: 0.0,
        omega_p_rabi: 50.0 / 3.0,
        omega_c_rabi: 5.0 / 3.0,
        omega_d_real: 106.0 / 3.0,
        kappa: 20.0 / 3.0,
        omega_e_level: 50.0,
        omega_m_level: 106.0 / 3.0,
        delta_e: 50.0,
    }
    .with_dark_coupling(G_DYNAMICS)
}

/// Dark energy far above the band: one bound state.
pub fn fig3b() -> SystemParams {
    SystemParams {
        omega_d_real: 200.0 / 3.0,
        omega_m_level: 200.0 / 3.0,
        omega_e_level: 100.0,
        delta_e: 100.0,
        ..fig3a()
    }
}

/// Charging sweep over `(omega0, xi)`; `omega0` and `xi` here are the grid centre.
pub fn fig5() -> SystemParams {
    SystemParams {
        omega0: 21.2,
        xi: 1.2,
        n_cavities: 253,
        g1: 0.0,
        g2: 0.0,
        omega_p_rabi: 10.0,
        omega_c_rabi: 1.0,
        omega_d_real: 21.2,
        kappa: 4.0,
        omega_e_level: 30.0,
        omega_m_level: 21.2,
        delta_e: 30.0,
    }
    .with_dark_coupling(G_CHARGING)
}

pub fn fig6() -> SystemParams {
    SystemParams {
        omega0: 21.196,
        kappa: 2.0,
        ..fig5()
    }
}

pub fn fig7() -> SystemParams {
    SystemParams {
        omega0: 21.196,
        ..fig5()
    }
}

/// `start, start + step, ...` up to and including `end` (within half a step).
pub fn linear_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step + 0.5).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// Default `(omega0, xi)` grids for the resonance sweep: 41 x 21 points.
pub fn fig5_grids() -> (Vec<f64>, Vec<f64>) {
    (linear_grid(19.2, 23.2, 0.1), linear_grid(0.2, 4.2, 0.2))
}

/// Default hopping grid for the optimal-hopping and power scans.
pub fn fig6_xi_grid() -> Vec<f64> {
    linear_grid(0.1, 3.0, 0.05)
}

pub fn fig7_xi_grid() -> Vec<f64> {
    linear_grid(0.1, 3.0, 0.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_dark_tuned() {
        for f in Figure::ALL {
            let p = f.params();
            p.validate().unwrap();
            assert!(p.dark_condition(), "{f}");
            assert_eq!(f.id().parse::<Figure>().unwrap(), f);
        }
        assert!("fig9".parse::<Figure>().is_err());
    }

    #[test]
    fn grids_have_expected_sizes() {
        let (w, x) = fig5_grids();
        assert_eq!((w.len(), x.len()), (41, 21));
        assert!((w[40] - 23.2).abs() < 1e-12 && (x[20] - 4.2).abs() < 1e-12);
        assert_eq!(fig6_xi_grid().len(), 59);
    }
}
