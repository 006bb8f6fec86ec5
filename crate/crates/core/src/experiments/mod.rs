//! Configured simulation runs: actions per mode, fitted decay rates, their
//! comparison with the linear predictions, phase drift and conservation
//! diagnostics.

mod config;
mod fit;
mod oracle;
mod output;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use config::{preset, Coefficient, ExperimentConfig, InitialKind, PRESETS};
pub use fit::{fit_rate, fit_rate_with_floor, ActionSeries, RateFit, DEFAULT_FLOOR, MIN_SAMPLES};
pub use oracle::linearized_oracle;
pub use output::{read_actions_csv, write_outputs, OutputFiles};

use crate::error::{Error, Result};
use crate::integrator::{constant_solution, evolve_with, EvolveOptions, ModelParams, Observer, Trajectory};
use crate::linear::{global_rate, mode_rate, RatePrediction};
use crate::spectral::{forward_transform, l2_norm, Field};
use crate::C64;

/// Relative L² drift bound checked on every run.
pub const L2_DRIFT_BOUND: f64 = 1e-8;

/// Measured against predicted rate for one mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub mode: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<RateFit>,
    /// Why no fit is available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_theory: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_theory: Option<u8>,
    /// `k α₁` for the `k`-th harmonic of the slowest mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_cascade: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    /// False when no decay is predicted (`μ = 0`) or the parameters are
    /// outside the theory (`λ ≤ -1/2`).
    pub applicable: bool,
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_beta: Option<u8>,
    pub rows: Vec<RateRow>,
}

/// Statistics of the carrier phase `θ(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaDrift {
    pub rho: f64,
    /// Least-squares slope of the unwrapped phase.
    pub mean_velocity: f64,
    /// `-(|m|² + 2λ log ρ)` when `μ = 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_velocity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// `-2λ log ρ / μ` when `μ > 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    pub final_theta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub initial_norm: f64,
    /// `max_t |‖ψ(t)‖ - ‖ψ(0)‖| / ‖ψ(0)‖`.
    pub l2_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_drift: Option<f64>,
    /// Relative spread `(max - min) / |ψ_m(0)|` of the carrier amplitude.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_variation: Option<f64>,
    /// The same spread restricted to `t ≥ fit_window[0]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_variation_late: Option<f64>,
    /// `‖ψ(T) - ρ e^{-2iλ log ρ/μ}‖_{L²}` for `m = 0`, `μ > 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaDrift>,
    pub branch_warnings: usize,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: ExperimentConfig,
    pub times: Vec<f64>,
    pub actions: Vec<ActionSeries>,
    /// Non-action observer series keyed by name.
    pub series: BTreeMap<String, Vec<f64>>,
    pub rates: RateTable,
    pub diagnostics: Diagnostics,
    pub checks: Vec<Check>,
    pub final_state: Field,
}

impl Report {
    pub fn action(&self, mode: i64) -> Option<&ActionSeries> {
        self.actions.iter().find(|a| a.mode == mode)
    }

    pub fn rate(&self, mode: i64) -> Option<&RateRow> {
        self.rates.rows.iter().find(|r| r.mode == mode)
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn observers(cfg: &ExperimentConfig) -> Vec<Observer> {
    let mut obs = Vec::new();
    if cfg.observe_actions {
        obs.extend(cfg.tracked_modes.iter().map(|&j| Observer::mode_amplitude(j)));
    }
    obs.push(Observer::l2_norm());
    obs.push(Observer::carrier_amplitude(cfg.carrier));
    if cfg.observe_theta {
        obs.push(Observer::theta(cfg.carrier));
    }
    if cfg.observe_energy || cfg.mu == 0.0 {
        obs.push(Observer::energy(cfg.lambda));
    }
    if cfg.observe_norms {
        obs.push(Observer::remainder_hs(cfg.carrier, cfg.sobolev_s.max(1.0)));
    }
    obs
}

fn distance_observer(nu: C64, s: f64) -> Observer {
    Observer::new("distance", move |_, spec| {
        let mut shifted = spec.clone();
        let c0 = spec.mean();
        shifted.set(&spec.grid().axis_mode(0), c0 - nu).ok();
        crate::spectral::hs_norm(&shifted, s)
    })
}

/// Runs the configured simulation and assembles its report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let context = |e: Error| Error::Experiment {
        name: cfg.name.clone(),
        source: Box::new(e),
    };
    cfg.validate().map_err(context)?;
    let params = cfg.params().map_err(context)?;
    let f0 = cfg.initial_field().map_err(context)?;
    let rho = l2_norm(&f0);
    let limit = (cfg.mu > 0.0 && cfg.carrier == 0)
        .then(|| constant_solution(rho, cfg.lambda, cfg.mu))
        .transpose()
        .map_err(context)?;

    let mut obs = observers(cfg);
    if let Some(nu) = limit {
        obs.push(distance_observer(nu, cfg.sobolev_s));
    }
    let options = EvolveOptions {
        snapshot_stride: None,
        observe_stride: cfg.observe_stride,
        domain: cfg.domain_check(),
    };
    let scheme = cfg.split_scheme().map_err(context)?;
    let traj = evolve_with(&f0, &params, &scheme, cfg.t_max, &obs, &options).map_err(context)?;
    assemble(cfg, &params, traj, rho, limit)
}

fn assemble(
    cfg: &ExperimentConfig,
    params: &ModelParams,
    mut traj: Trajectory,
    rho: f64,
    limit: Option<C64>,
) -> Result<Report> {
    let mut actions = Vec::new();
    for &j in cfg.tracked_modes.iter().filter(|_| cfg.observe_actions) {
        let amps = traj.observations.remove(&format!("mode_{j}")).unwrap_or_default();
        actions.push(ActionSeries::new(j, traj.times.clone(), amps)?);
    }

    let norms = &traj.observations["l2_norm"];
    let l2_drift = norms.iter().map(|n| (n - rho).abs()).fold(0.0, f64::max) / rho;
    let energy_drift = traj.observations.get("energy").map(|e| {
        e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max)
    });
    let carrier = &traj.observations["a"];
    let spread = |from: usize| -> f64 {
        let tail = &carrier[from..];
        let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min) / carrier[0]
    };
    let late_start = traj.times.partition_point(|&t| t < cfg.fit_window[0]);
    let carrier_variation = Some(spread(0));
    let carrier_variation_late = (late_start < carrier.len()).then(|| spread(late_start));

    let terminal_distance = limit.map(|nu| {
        let diff = traj.final_state.map(|v| v - nu).expect("finite state");
        l2_norm(&diff)
    });
    // undamped drift is measured against the amplitude of the perturbed
    // plane wave, the damped limit against the conserved norm
    let theta_rho = if cfg.mu == 0.0 && cfg.initial == InitialKind::PerturbedPlaneWave {
        cfg.rho
    } else {
        rho
    };
    let theta = if cfg.observe_theta {
        Some(theta_drift(&traj, params, cfg.carrier, theta_rho)?)
    } else {
        None
    };

    let mut checks = vec![Check {
        name: "l2_conservation".into(),
        value: l2_drift,
        bound: L2_DRIFT_BOUND,
        passed: l2_drift <= L2_DRIFT_BOUND,
    }];
    if cfg.mu > 0.0 {
        // |ψ_m|² = ‖ψ‖² - Σ_{j≠m} |ψ_j|², so the carrier moves by at most the
        // off-carrier power (relative to |ψ_m(0)|, which stays near ρ)
        let off_power = norms
            .iter()
            .zip(carrier)
            .map(|(n, a)| n * n - a * a)
            .fold(0.0, f64::max);
        let bound = off_power / (carrier[0] * carrier[0]);
        let value = spread(0);
        checks.push(Check {
            name: "carrier_parseval".into(),
            value,
            bound,
            passed: value <= bound * (1.0 + 1e-9) + 1e-14,
        });
    }
    if let Some(drift) = energy_drift {
        checks.push(Check {
            name: "energy_finite".into(),
            value: drift,
            bound: f64::INFINITY,
            passed: drift.is_finite(),
        });
    }

    let mut report = Report {
        config: cfg.clone(),
        times: traj.times.clone(),
        actions,
        series: traj.observations.clone(),
        rates: RateTable {
            applicable: false,
            note: String::new(),
            global_alpha: None,
            global_beta: None,
            rows: Vec::new(),
        },
        diagnostics: Diagnostics {
            initial_norm: rho,
            l2_drift,
            energy_drift,
            carrier_variation,
            carrier_variation_late,
            terminal_distance,
            theta,
            branch_warnings: traj.branch_warnings,
        },
        checks,
        final_state: traj.final_state,
    };
    let predictions = predictions_for(cfg)?;
    report.rates = compare_rates(&report, &predictions);
    Ok(report)
}

/// Linear predictions for every tracked mode other than the carrier, keyed
/// by mode. Empty when no decay is predicted.
pub fn predictions_for(cfg: &ExperimentConfig) -> Result<Vec<(i64, RatePrediction)>> {
    if cfg.mu <= 0.0 || cfg.lambda <= -0.5 {
        return Ok(Vec::new());
    }
    cfg.tracked_modes
        .iter()
        .filter(|&&j| j != cfg.carrier)
        .map(|&j| {
            let k = (j - cfg.carrier).unsigned_abs();
            Ok((j, mode_rate(k * k, cfg.lambda, cfg.mu)?))
        })
        .collect()
}

/// Per-mode fitted rates next to the predictions. Modes whose series cannot
/// be fitted keep the reason in `fit_error`.
pub fn compare_rates(report: &Report, predictions: &[(i64, RatePrediction)]) -> RateTable {
    let cfg = &report.config;
    if cfg.lambda <= -0.5 {
        return RateTable {
            applicable: false,
            note: "exploratory: lambda <= -1/2 is outside the stability theory, no prediction".into(),
            global_alpha: None,
            global_beta: None,
            rows: Vec::new(),
        };
    }
    if cfg.mu <= 0.0 {
        return RateTable {
            applicable: false,
            note: "not applicable: no damping, no decay predicted".into(),
            global_alpha: None,
            global_beta: None,
            rows: Vec::new(),
        };
    }
    let (ga, gb) = global_rate(cfg.lambda, cfg.mu).expect("validated parameters");
    let alpha_1 = mode_rate(1, cfg.lambda, cfg.mu).expect("validated parameters").alpha_j;
    let rows = predictions
        .iter()
        .map(|(j, pred)| {
            let series = report.action(*j);
            let (fit, fit_error) = match series.map(|s| fit_rate_with_floor(s, cfg.fit_window, cfg.fit_floor)) {
                Some(Ok(f)) => (Some(f), None),
                Some(Err(e)) => (None, Some(e.to_string())),
                None => (None, Some("mode not tracked".into())),
            };
            let k = (j - cfg.carrier).unsigned_abs() as f64;
            RateRow {
                mode: *j,
                relative_deviation: fit.map(|f| (f.alpha_hat - pred.alpha_j) / pred.alpha_j),
                fit,
                fit_error,
                alpha_theory: Some(pred.alpha_j),
                beta_theory: Some(pred.beta_j),
                alpha_cascade: Some(k * alpha_1),
            }
        })
        .collect();
    RateTable {
        applicable: true,
        note: format!("fit window [{}, {}]", cfg.fit_window[0], cfg.fit_window[1]),
        global_alpha: Some(ga),
        global_beta: Some(gb),
        rows,
    }
}

/// Continues each sample to the branch nearest the previous one.
pub fn unwrap_phase(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset: f64 = 0.0;
    for (i, &v) in raw.iter().enumerate() {
        if i > 0 {
            let step: f64 = v + offset - out[i - 1];
            offset -= 2.0 * PI * (step / (2.0 * PI)).round();
        }
        out.push(v + offset);
    }
    out
}

/// Carrier phase statistics from a trajectory recorded with the `theta`
/// (and optionally `a`) observers.
///
/// With `μ = 0` the mean phase velocity is compared with
/// `-(|m|² + 2λ log ρ)`; with `μ > 0` the final phase is compared with
/// `-2λ log ρ / μ`. Runs from a perturbed plane wave use its amplitude as
/// `ρ` when `μ = 0`; otherwise `ρ` is the L² norm of the initial datum.
pub fn theta_drift(traj: &Trajectory, params: &ModelParams, carrier: i64, rho: f64) -> Result<ThetaDrift> {
    let raw = traj
        .observation("theta")
        .ok_or_else(|| Error::invalid("trajectory has no theta observations"))?;
    if let Some(a) = traj.observation("a") {
        let threshold = crate::spectral::DEFAULT_MEAN_THRESHOLD;
        if let Some(&m) = a.iter().find(|&&v| v <= threshold) {
            return Err(Error::ZeroMean { modulus: m, threshold });
        }
    }
    let theta = unwrap_phase(raw);
    let pts: Vec<(f64, f64)> = traj.times.iter().cloned().zip(theta.iter().cloned()).collect();
    let mean_velocity = if pts.len() >= 2 { fit::least_squares(&pts).0 } else { 0.0 };
    let final_theta = *theta.last().unwrap_or(&0.0);
    let mut drift = ThetaDrift {
        rho,
        mean_velocity,
        predicted_velocity: None,
        residual: None,
        limit: None,
        final_theta,
        final_deviation: None,
    };
    if params.mu == 0.0 {
        let predicted = -((carrier * carrier) as f64 + 2.0 * params.lambda * rho.ln());
        drift.predicted_velocity = Some(predicted);
        drift.residual = Some((mean_velocity - predicted).abs());
    } else {
        let limit = -2.0 * params.lambda * rho.ln() / params.mu;
        let wrapped = (final_theta - limit + PI).rem_euclid(2.0 * PI) - PI;
        drift.limit = Some(limit);
        drift.final_deviation = Some(wrapped.abs());
    }
    Ok(drift)
}

/// Carrier phase of a single field.
pub fn carrier_phase(f: &Field, carrier: i64) -> f64 {
    forward_transform(f).mode(carrier).arg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{evolve, plane_wave_solution, SplitScheme};
    use crate::spectral::GridSpec;

    fn short(name: &str, t_max: f64) -> ExperimentConfig {
        ExperimentConfig {
            points: 32,
            t_max,
            ..preset(name).unwrap()
        }
    }

    #[test]
    fn unwrap_examples() {
        let raw = [3.0, -3.1, -2.9, 3.1];
        let u = unwrap_phase(&raw);
        assert!(u.windows(2).all(|w| (w[1] - w[0]).abs() < PI));
        assert!((u[1] - (2.0 * PI - 3.1)).abs() < 1e-15);
    }

    #[test]
    fn exact_plane_wave_has_no_drift() {
        let grid = GridSpec::one_d(16).unwrap();
        let f = plane_wave_solution(grid, 1.0, &[0], 0.0, 0.5, 0.0).unwrap();
        let p = ModelParams::new(0.5, 0.0).unwrap();
        let obs = [Observer::theta(0), Observer::carrier_amplitude(0)];
        let traj = evolve(&f, &p, &SplitScheme::lie(0.01).unwrap(), 5.0, &obs).unwrap();
        let d = theta_drift(&traj, &p, 0, 1.0).unwrap();
        assert_eq!(d.residual, Some(0.0));
    }

    #[test]
    fn theta_requires_observer() {
        let grid = GridSpec::one_d(8).unwrap();
        let f = Field::constant(grid, C64::new(1.0, 0.0)).unwrap();
        let p = ModelParams::new(0.5, 0.0).unwrap();
        let traj = evolve(&f, &p, &SplitScheme::lie(0.1).unwrap(), 1.0, &[]).unwrap();
        assert!(theta_drift(&traj, &p, 0, 1.0).is_err());
    }

    #[test]
    fn undamped_table_not_applicable() {
        let r = run_experiment(&short("paper-fig3", 2.0)).unwrap();
        assert!(!r.rates.applicable);
        assert!(r.rates.rows.is_empty());
        assert!(r.diagnostics.energy_drift.is_some());
        assert!(r.all_checks_pass());
    }

    #[test]
    fn exploratory_table_marked() {
        let r = run_experiment(&short("paper-fig6", 1.0)).unwrap();
        assert!(!r.rates.applicable);
        assert!(r.rates.note.starts_with("exploratory"));
    }

    #[test]
    fn damped_table_has_predictions() {
        let r = run_experiment(&ExperimentConfig {
            fit_window: [0.5, 2.0],
            ..short("paper-fig5", 2.0)
        })
        .unwrap();
        assert!(r.rates.applicable);
        let row = r.rate(1).unwrap();
        assert!((row.alpha_theory.unwrap() - (4.0 - 14f64.sqrt())).abs() < 1e-14);
        assert_eq!(r.rate(4).unwrap().alpha_theory, Some(4.0));
        assert!(r.rate(0).is_none());
        assert!(r.rate(2).unwrap().alpha_cascade.unwrap() > row.alpha_cascade.unwrap());
    }

    #[test]
    fn invalid_config_has_context() {
        let cfg = ExperimentConfig {
            lambda: -1.0,
            ..preset("paper-fig2").unwrap()
        };
        let err = run_experiment(&cfg).unwrap_err();
        assert!(matches!(err, Error::Experiment { .. }));
        assert!(matches!(err.root(), Error::InvalidParam(_)));
    }
}
