use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Default fitting window for power-law slopes.
pub const DEFAULT_WINDOW: (f64, f64) = (1e2, 1e4);

/// A named time series with its log-log slope over a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub name: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    pub window: (f64, f64),
}

impl DecayReport {
    /// Fits `log value = a + slope·log t` by ordinary least squares on the
    /// samples with `t` in `window` (inclusive, with a relative slack of 1e-9
    /// so that window endpoints produced by `logspace` are kept).
    pub fn fit(name: &str, times: Vec<f64>, values: Vec<f64>, window: (f64, f64)) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("times and values differ in length"));
        }
        let (lo, hi) = (window.0 * (1.0 - 1e-9), window.1 * (1.0 + 1e-9));
        let pts: Vec<(f64, f64)> = times
            .iter()
            .zip(&values)
            .filter(|(t, _)| **t >= lo && **t <= hi)
            .map(|(&t, &v)| (t, v))
            .collect();
        if pts.len() < 3 {
            return Err(invalid(format!(
                "{name}: need at least 3 samples in window [{}, {}], got {}",
                window.0,
                window.1,
                pts.len()
            )));
        }
        if let Some((t, v)) = pts.iter().find(|(t, v)| !(*t > 0.0 && *v > 0.0 && v.is_finite())) {
            return Err(invalid(format!("{name}: cannot fit non-positive sample {v} at t = {t}")));
        }
        let (slope, stderr) = ols_slope(pts.iter().map(|(t, v)| (t.ln(), v.ln())));
        Ok(Self {
            name: name.to_owned(),
            times,
            values,
            fitted_slope: slope,
            slope_stderr: stderr,
            window,
        })
    }

    /// True if every sample is at most `(1 + rel_tol)` times its predecessor.
    pub fn is_non_increasing(&self, rel_tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] * (1.0 + rel_tol))
    }
}

/// Slope and its standard error for the regression `y = a + b x`.
pub fn ols_slope<I: IntoIterator<Item = (f64, f64)>>(pts: I) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = pts.into_iter().collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum();
    let stderr = if pts.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (b, stderr)
}

/// `n` log-spaced samples from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                a
            } else if i + 1 == n {
                b
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
