use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes at or below this are treated as roundoff.
pub const DEFAULT_FLOOR: f64 = 1e-13;

/// Fewest samples a rate fit accepts.
pub const MIN_SAMPLES: usize = 10;

/// `|ψ_j(t)|` sampled over time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionSeries {
    pub mode: i64,
    pub times: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl ActionSeries {
    pub fn new(mode: i64, times: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self> {
        if times.len() != amplitudes.len() {
            return Err(Error::invalid(format!(
                "{} times but {} amplitudes",
                times.len(),
                amplitudes.len()
            )));
        }
        if let Some(a) = amplitudes.iter().find(|a| !(**a >= 0.0)) {
            return Err(Error::invalid(format!("amplitude {a} is not a nonnegative number")));
        }
        Ok(ActionSeries { mode, times, amplitudes })
    }
}

/// Exponential rate fitted on a window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub mode: i64,
    /// Window actually used, after shrinking away from the floor.
    pub window: [f64; 2],
    pub alpha_hat: f64,
    pub r_squared: f64,
    pub floor_hit: bool,
    pub samples: usize,
}

pub fn fit_rate(series: &ActionSeries, window: [f64; 2]) -> Result<RateFit> {
    fit_rate_with_floor(series, window, DEFAULT_FLOOR)
}

/// Least squares of `log |ψ_j|` against `t` on the window; `alpha_hat` is
/// minus the slope.
///
/// When some sample in the window is at or below `floor`, the window is cut
/// just before the first such sample and `floor_hit` is set.
pub fn fit_rate_with_floor(series: &ActionSeries, window: [f64; 2], floor: f64) -> Result<RateFit> {
    let [lo, hi] = window;
    if !(lo < hi) {
        return Err(Error::invalid(format!("fit window [{lo}, {hi}] is empty")));
    }
    let mut floor_hit = false;
    let mut pts = Vec::new();
    for (&t, &a) in series.times.iter().zip(&series.amplitudes) {
        if t < lo || t > hi {
            continue;
        }
        if a <= floor {
            floor_hit = true;
            break;
        }
        pts.push((t, a.ln()));
    }
    if pts.len() < MIN_SAMPLES {
        return Err(Error::DegenerateWindow {
            samples: pts.len(),
            required: MIN_SAMPLES,
        });
    }
    let (slope, r_squared) = least_squares(&pts);
    Ok(RateFit {
        mode: series.mode,
        window: [pts[0].0, pts[pts.len() - 1].0],
        alpha_hat: -slope,
        r_squared,
        floor_hit,
        samples: pts.len(),
    })
}

/// Slope and `r²` of the ordinary least-squares line; `r² = 1` for a
/// perfect fit, including a constant series.
pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = pts.iter().map(|(_, y)| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = pts
        .iter()
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    // a series constant up to roundoff counts as a perfect fit
    let roundoff = n * (4.0 * f64::EPSILON * (1.0 + my.abs())).powi(2);
    let r2 = if syy <= roundoff { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    (slope, r2)
}
