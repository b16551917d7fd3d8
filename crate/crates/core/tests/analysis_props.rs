use proptest::prelude::*;
use qbsim::analysis::{fit_exponential, peaks_of};
use qbsim::Error;

proptest! {
    #[test]
    fn rescaling_moves_only_the_intercept(
        rate in 0.001..1.0f64,
        noise in prop::collection::vec(-0.05..0.05f64, 6..40),
        scale in 1e-3..1e3f64,
    ) {
        let pts: Vec<(f64, f64)> = noise
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let t = 10.0 + 2.5 * i as f64;
                (t, (-rate * t + e).exp())
            })
            .collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(t, p)| (t, p * scale)).collect();
        let a = fit_exponential(&pts).unwrap();
        let b = fit_exponential(&scaled).unwrap();
        prop_assert!((a.rate - b.rate).abs() <= 1e-12);
        prop_assert!((a.r_abs - b.r_abs).abs() <= 1e-12);
        prop_assert!((b.intercept - a.intercept - scale.ln()).abs() <= 1e-9);
    }

    #[test]
    fn recovers_a_decaying_envelope(rate in 0.005..0.1f64, w in 2.0..8.0f64) {
        let times: Vec<f64> = (0..=20_000).map(|i| i as f64 * 5e-3).collect();
        let values: Vec<f64> = times.iter().map(|t| (-rate * t).exp() * (1.0 + (w * t).cos()) / 2.0).collect();
        let fit = fit_exponential(&peaks_of(&times, &values, 10.0).unwrap()).unwrap();
        prop_assert!((fit.rate / rate - 1.0).abs() < 1e-3, "{} vs {}", fit.rate, rate);
        prop_assert!(fit.r_abs > 0.999);
    }
}

#[test]
fn too_few_peaks_is_an_error() {
    let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
    let values: Vec<f64> = times.iter().map(|t| (-t).exp()).collect();
    assert!(matches!(peaks_of(&times, &values, 0.0), Err(Error::TooFewPeaks { found: 0 })));
    assert!(matches!(fit_exponential(&[(0.0, 1.0), (1.0, 0.5)]), Err(Error::TooFewPeaks { found: 2 })));
}
