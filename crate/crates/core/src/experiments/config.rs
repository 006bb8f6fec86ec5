use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{step_count, ModelParams, SchemeKind, SplitScheme};
use crate::spectral::{inverse_transform, DomainCheck, Field, GridSpec, Spectrum};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// `1 / (1 + 0.2 cos x_1)`.
    PaperPsi0,
    /// `ρ e^{im x_1} (1 + ε Σ_k e^{iφ_k} e^{ik x_1})`.
    PerturbedPlaneWave,
    /// Explicit Fourier coefficients along the first axis.
    Coefficients,
}

impl std::str::FromStr for InitialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-psi0" => Ok(InitialKind::PaperPsi0),
            "perturbed-plane-wave" => Ok(InitialKind::PerturbedPlaneWave),
            "coefficients" => Ok(InitialKind::Coefficients),
            other => Err(Error::Config(format!("unknown initial condition {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficient {
    pub mode: i64,
    pub re: f64,
    pub im: f64,
}

/// Everything needed to reproduce one run. Each field is one key of the
/// TOML configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub name: String,
    pub lambda: f64,
    pub mu: f64,
    pub exploratory: bool,
    pub dimension: usize,
    pub points: usize,
    pub scheme: SchemeKind,
    pub dt: f64,
    pub t_max: f64,
    pub initial: InitialKind,
    pub rho: f64,
    /// Carrier wave number `m` (first axis).
    pub carrier: i64,
    pub amplitude: f64,
    pub perturbation_modes: Vec<i64>,
    /// Draw the perturbation phases `φ_k` from `seed`; otherwise `φ_k = 0`.
    pub random_phases: bool,
    pub coefficients: Vec<Coefficient>,
    pub seed: u64,
    pub tracked_modes: Vec<i64>,
    pub observe_actions: bool,
    pub observe_norms: bool,
    pub observe_energy: bool,
    pub observe_theta: bool,
    pub observe_stride: usize,
    pub fit_window: [f64; 2],
    pub fit_floor: f64,
    pub sobolev_s: f64,
    pub mean_threshold: f64,
    pub modulus_ratio: f64,
    pub max_steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let domain = DomainCheck::default();
        ExperimentConfig {
            name: "run".into(),
            lambda: 0.5,
            mu: 2.0,
            exploratory: false,
            dimension: 1,
            points: 128,
            scheme: SchemeKind::LieTrotter,
            dt: 0.01,
            t_max: 100.0,
            initial: InitialKind::PaperPsi0,
            rho: 1.0,
            carrier: 0,
            amplitude: 1e-3,
            perturbation_modes: vec![1],
            random_phases: false,
            coefficients: Vec::new(),
            seed: 0,
            tracked_modes: vec![0, 1, 2, 3, 4],
            observe_actions: true,
            observe_norms: true,
            observe_energy: false,
            observe_theta: true,
            observe_stride: 1,
            fit_window: [10.0, 60.0],
            fit_floor: super::fit::DEFAULT_FLOOR,
            sobolev_s: 0.0,
            mean_threshold: domain.mean_threshold,
            modulus_ratio: domain.modulus_ratio,
            max_steps: 10_000_000,
            output_dir: None,
        }
    }
}

pub const PRESETS: &[&str] = &[
    "paper-fig2",
    "paper-fig3",
    "paper-fig5",
    "paper-fig5-single-mode",
    "paper-fig6",
];

/// Named configurations of the reference experiments.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let base = ExperimentConfig {
        name: name.to_string(),
        ..ExperimentConfig::default()
    };
    let cfg = match name {
        "paper-fig2" => base,
        "paper-fig3" => ExperimentConfig {
            mu: 0.0,
            observe_energy: true,
            sobolev_s: 1.0,
            ..base
        },
        "paper-fig5" => ExperimentConfig { mu: 8.0, ..base },
        "paper-fig5-single-mode" => ExperimentConfig {
            mu: 8.0,
            initial: InitialKind::PerturbedPlaneWave,
            amplitude: 1e-3,
            perturbation_modes: vec![1],
            ..base
        },
        "paper-fig6" => ExperimentConfig {
            lambda: -1.0,
            mu: 2.0,
            exploratory: true,
            // the solution passes close to zero early on
            modulus_ratio: 1e-3,
            ..base
        },
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; known presets: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn params(&self) -> Result<ModelParams> {
        if self.exploratory {
            ModelParams::exploratory(self.lambda, self.mu)
        } else {
            ModelParams::new(self.lambda, self.mu)
        }
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.dimension, self.points)
    }

    pub fn split_scheme(&self) -> Result<SplitScheme> {
        SplitScheme::new(self.scheme, self.dt)
    }

    pub fn domain_check(&self) -> DomainCheck {
        DomainCheck {
            mean_threshold: self.mean_threshold,
            modulus_ratio: self.modulus_ratio,
        }
    }

    pub fn steps(&self) -> usize {
        step_count(self.t_max, self.dt)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.grid()?;
        self.split_scheme()?;
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::invalid(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.steps() as u64 > self.max_steps {
            return Err(Error::invalid(format!(
                "t_max / dt = {} steps exceeds max_steps = {}",
                self.steps(),
                self.max_steps
            )));
        }
        let [lo, hi] = self.fit_window;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
            return Err(Error::invalid(format!("fit window [{lo}, {hi}] is not an interval in t >= 0")));
        }
        if self.observe_stride == 0 {
            return Err(Error::invalid("observe_stride must be positive"));
        }
        if !(self.mean_threshold >= 0.0 && self.modulus_ratio >= 0.0) {
            return Err(Error::invalid("domain thresholds must be nonnegative"));
        }
        if self.initial == InitialKind::PerturbedPlaneWave && !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::invalid(format!("rho must be positive, got {}", self.rho)));
        }
        if self.initial == InitialKind::Coefficients && self.coefficients.is_empty() {
            return Err(Error::invalid("initial = \"coefficients\" needs a coefficient list"));
        }
        Ok(())
    }

    /// Samples the initial datum.
    pub fn initial_field(&self) -> Result<Field> {
        let grid = self.grid()?;
        match self.initial {
            InitialKind::PaperPsi0 => Field::from_fn(grid, |x| C64::new(1.0 / (1.0 + 0.2 * x[0].cos()), 0.0)),
            InitialKind::PerturbedPlaneWave => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let terms: Vec<(f64, C64)> = self
                    .perturbation_modes
                    .iter()
                    .map(|&k| {
                        let phase = if self.random_phases {
                            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
                        } else {
                            0.0
                        };
                        (k as f64, C64::from_polar(self.amplitude, phase))
                    })
                    .collect();
                let (rho, m) = (self.rho, self.carrier as f64);
                Field::from_fn(grid, |x| {
                    let bump: C64 = terms.iter().map(|(k, c)| c * C64::from_polar(1.0, k * x[0])).sum();
                    rho * C64::from_polar(1.0, m * x[0]) * (1.0 + bump)
                })
            }
            InitialKind::Coefficients => {
                let mut s = Spectrum::zeros(grid);
                for c in &self.coefficients {
                    s.set(&grid.axis_mode(c.mode), C64::new(c.re, c.im))?;
                }
                Ok(inverse_transform(&s))
            }
        }
    }
}
