//! Envelope extraction and exponential-decay fits.

use serde::Serialize;

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};

/// Default start of the fit window, in inverse frequency units.
pub const DEFAULT_T_MIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Fitted `ln P` at `t = 0`.
    pub intercept: f64,
    /// Decay rate, `-slope` of `ln P` against `t`.
    pub rate: f64,
    /// `|r|`, the absolute Pearson correlation of `ln P` with `t`.
    pub r_abs: f64,
    pub t_first: f64,
    pub t_last: f64,
    pub n_points: usize,
}

/// Strict three-point local maxima of `p_dark` with `t >= t_min`.
pub fn envelope_peaks(series: &TimeSeries, t_min: f64) -> Result<Vec<(f64, f64)>> {
    peaks_of(&series.times, &series.p_dark, t_min)
}

pub fn peaks_of(times: &[f64], values: &[f64], t_min: f64) -> Result<Vec<(f64, f64)>> {
    let peaks: Vec<(f64, f64)> = (1..values.len().saturating_sub(1))
        .filter(|&i| times[i] >= t_min && values[i] > values[i - 1] && values[i] > values[i + 1])
        .map(|i| (times[i], values[i]))
        .collect();
    if peaks.len() < 4 {
        return Err(Error::TooFewPeaks { found: peaks.len() });
    }
    Ok(peaks)
}

/// Least-squares line through `(t, ln P)`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 4 {
        return Err(Error::TooFewPeaks { found: points.len() });
    }
    if let Some((index, &(_, value))) = points.iter().enumerate().find(|(_, p)| !(p.1 > 0.0)) {
        return Err(Error::NonPositivePeak { index, value });
    }
    let n = points.len() as f64;
    let (mt, my) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(t, p)| (a + t / n, b + p.ln() / n));
    let (mut stt, mut syy, mut sty) = (0.0, 0.0, 0.0);
    for &(t, p) in points {
        let (dt, dy) = (t - mt, p.ln() - my);
        stt += dt * dt;
        syy += dy * dy;
        sty += dt * dy;
    }
    if stt == 0.0 {
        return Err(Error::invalid("points", "all sample times coincide"));
    }
    let slope = sty / stt;
    let r_abs = if syy == 0.0 {
        1.0
    } else {
        (sty / (stt * syy).sqrt()).abs().min(1.0)
    };
    Ok(DecayFit {
        intercept: my - slope * mt,
        rate: -slope,
        r_abs,
        t_first: points[0].0,
        t_last: points[points.len() - 1].0,
        n_points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn damped_cosine_peaks() {
        let (a, w) = (0.05, 2.0);
        let times: Vec<f64> = (0..=40_000).map(|i| i as f64 * 1e-3).collect();
        let values: Vec<f64> = times.iter().map(|t| (-a * t).exp() * (1.0 - (w * t).cos()) / 2.0).collect();
        let peaks = peaks_of(&times, &values, 0.0).unwrap();
        // damping pulls each maximum earlier by about 2a / w^2
        for (m, &(t, v)) in peaks.iter().enumerate() {
            let t0 = (2 * m + 1) as f64 * PI / w;
            assert!((t - t0).abs() < 2.0 * a / (w * w) + 2e-3);
            assert!((v / (-a * t0).exp() - 1.0).abs() < 1e-3);
        }
        assert!(matches!(peaks_of(&times, &vec![0.3; times.len()], 0.0), Err(Error::TooFewPeaks { found: 0 })));
    }

    #[test]
    fn exact_exponential() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, (-0.1 * i as f64).exp())).collect();
        let fit = fit_exponential(&pts).unwrap();
        assert!((fit.rate - 0.1).abs() < 1e-12);
        assert!((fit.r_abs - 1.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive() {
        let pts = [(0.0, 1.0), (1.0, 0.5), (2.0, 0.0), (3.0, 0.1)];
        assert!(matches!(fit_exponential(&pts), Err(Error::NonPositivePeak { index: 2, .. })));
    }
}
