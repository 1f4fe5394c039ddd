//! Log-log regression for decay exponents.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Least-squares fit of `log y` against `log x` over a window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentFit {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub max_dev: f64,
}

/// Fit `log y = slope * log x + intercept` using the samples with
/// `window.0 <= x <= window.1`.
pub fn fit_loglog(xs: &[f64], ys: &[f64], window: (f64, f64)) -> Result<ExponentFit> {
    if xs.len() != ys.len() {
        return Err(Error::validation("fit abscissae and ordinates differ in length"));
    }
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    let mut kept_x = Vec::new();
    let mut kept_y = Vec::new();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        if x < window.0 || x > window.1 {
            continue;
        }
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::numerical(format!(
                "log-log fit needs positive finite samples, got ({x}, {y})"
            )));
        }
        lx.push(x.ln());
        ly.push(y.ln());
        kept_x.push(x);
        kept_y.push(y);
    }
    let m = lx.len();
    if m < 2 {
        return Err(Error::validation(format!(
            "fit window [{}, {}] contains {m} samples; need at least 2",
            window.0, window.1
        )));
    }
    let mx = lx.iter().sum::<f64>() / m as f64;
    let my = ly.iter().sum::<f64>() / m as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..m {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if sxx == 0.0 {
        return Err(Error::validation("fit window has no abscissa spread"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_dev = (0..m)
        .map(|i| (ly[i] - slope * lx[i] - intercept).abs())
        .fold(0.0f64, f64::max);
    if !slope.is_finite() {
        return Err(Error::numerical("fit produced a non-finite slope"));
    }
    Ok(ExponentFit {
        xs: kept_x,
        ys: kept_y,
        slope,
        intercept,
        window,
        max_dev,
    })
}

/// Geometric sample points between `lo` and `hi` inclusive.
pub fn geometric_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let ratio = (hi / lo).powf(1.0 / (count as f64 - 1.0));
    (0..count).map(|i| lo * ratio.powi(i as i32)).collect()
}

/// Linear sample points between `lo` and `hi` inclusive.
pub fn linear_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(hi > lo && count >= 2);
    let step = (hi - lo) / (count as f64 - 1.0);
    (0..count).map(|i| lo + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_pure_power_law() {
        let xs = geometric_points(1.0, 100.0, 25);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.5)).collect();
        let fit = fit_loglog(&xs, &ys, (1.0, 100.0)).unwrap();
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!((fit.intercept - 3.0f64.ln()).abs() < 1e-12);
        assert!(fit.max_dev < 1e-12);
    }

    #[test]
    fn slope_invariant_under_rescaling() {
        let xs = geometric_points(2.0, 50.0, 12);
        let ys: Vec<f64> = xs.iter().map(|x| x.powf(-0.7) * (1.0 + 0.05 * x.sin())).collect();
        let f1 = fit_loglog(&xs, &ys, (2.0, 50.0)).unwrap();
        let scaled: Vec<f64> = ys.iter().map(|y| 17.0 * y).collect();
        let f2 = fit_loglog(&xs, &scaled, (2.0, 50.0)).unwrap();
        assert_eq!(f1.slope, f2.slope);
        assert!((f2.intercept - f1.intercept - 17.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn window_filters_and_validates() {
        let xs = vec![1.0, 2.0, 4.0, 8.0];
        let ys = vec![1.0, 0.5, 0.25, 0.125];
        let fit = fit_loglog(&xs, &ys, (1.5, 10.0)).unwrap();
        assert_eq!(fit.xs.len(), 3);
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit_loglog(&xs, &ys, (20.0, 30.0)).is_err());
    }
}
