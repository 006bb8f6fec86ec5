//! Splitting integrator for
//!
//! ```text
//! i ∂_t ψ + Δψ = λ ψ log|ψ|² + (μ/2i) ψ log(ψ/ψ*)
//! ```
//!
//! The right-hand side splits into three pieces with exact flows:
//!
//! * free: `Φ_A^t u = e^{itΔ} u`, diagonal in Fourier (`e^{-i|j|²t}` per mode);
//! * logarithmic: `Φ_B^t v = v e^{-iλt log|v|²}`, pointwise, modulus kept;
//! * damping: `Φ_C^t w = |w| e^{i arg(w) e^{-μt}}`, pointwise, modulus kept.
//!
//! Every piece preserves the L² norm, so any composition does too.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    fft_nd, forward_transform, inverse_transform, DomainCheck, Field, GridSpec, Spectrum,
};
use crate::C64;

/// Moduli below this make the logarithm singular.
pub const MIN_MODULUS: f64 = 1e-300;

/// Phases this close to `±π` are flagged by the damping flow.
pub const BRANCH_CUT_MARGIN: f64 = 1e-6;

/// Equation parameters `λ` (nonlinearity) and `μ` (damping).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub mu: f64,
    /// Allows `λ <= -1/2`, outside the range covered by the stability theory.
    pub exploratory: bool,
}

impl ModelParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        Self::build(lambda, mu, false)
    }

    pub fn exploratory(lambda: f64, mu: f64) -> Result<Self> {
        Self::build(lambda, mu, true)
    }

    fn build(lambda: f64, mu: f64, exploratory: bool) -> Result<Self> {
        if !lambda.is_finite() || !mu.is_finite() {
            return Err(Error::invalid("lambda and mu must be finite"));
        }
        if mu < 0.0 {
            return Err(Error::invalid(format!("mu must be nonnegative, got {mu}")));
        }
        if lambda <= -0.5 && !exploratory {
            return Err(Error::invalid(format!(
                "lambda = {lambda} violates lambda > -1/2; pass the exploratory flag to run it anyway"
            )));
        }
        Ok(ModelParams { lambda, mu, exploratory })
    }

    /// `z = λ + μ/(2i)`.
    pub fn z(&self) -> C64 {
        C64::new(self.lambda, -self.mu / 2.0)
    }

    /// Whether the stability theory (and thus rate predictions) applies.
    pub fn in_theory_range(&self) -> bool {
        self.lambda > -0.5
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    LieTrotter,
    Strang,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::LieTrotter => "lie-trotter",
            SchemeKind::Strang => "strang",
        })
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lie-trotter" | "lie" => Ok(SchemeKind::LieTrotter),
            "strang" => Ok(SchemeKind::Strang),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitScheme {
    pub kind: SchemeKind,
    pub dt: f64,
}

impl SplitScheme {
    pub fn new(kind: SchemeKind, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!("time step must be positive, got {dt}")));
        }
        Ok(SplitScheme { kind, dt })
    }

    pub fn lie(dt: f64) -> Result<Self> {
        Self::new(SchemeKind::LieTrotter, dt)
    }

    pub fn strang(dt: f64) -> Result<Self> {
        Self::new(SchemeKind::Strang, dt)
    }
}

/// Free flow: multiplies the coefficient at `j` by `e^{-i|j|²t}`.
pub fn flow_free(s: &Spectrum, t: f64) -> Spectrum {
    let mut out = s.clone();
    let k2 = s.grid().wavenumbers_squared();
    for (c, n2) in out.coefficients_mut().iter_mut().zip(k2) {
        *c *= C64::from_polar(1.0, -n2 * t);
    }
    out
}

fn log_in_place(values: &mut [C64], t: f64, lambda: f64) -> Result<()> {
    for (index, v) in values.iter_mut().enumerate() {
        let r2 = v.norm_sqr();
        if r2.sqrt() < MIN_MODULUS {
            return Err(Error::ZeroModulus { index, modulus: r2.sqrt() });
        }
        *v *= C64::from_polar(1.0, -lambda * t * r2.ln());
    }
    Ok(())
}

/// Logarithmic flow `v ↦ v e^{-iλt log|v|²}`.
///
/// The factor `λ` comes from the subproblem `i ∂_t v = λ v log|v|²`.
pub fn flow_log(f: &Field, t: f64, lambda: f64) -> Result<Field> {
    let mut out = f.clone();
    log_in_place(out.values_mut(), t, lambda)?;
    Ok(out)
}

/// Result of the damping flow.
#[derive(Clone, Debug, PartialEq)]
pub struct Damped {
    pub field: Field,
    /// Some pointwise phase lay within [`BRANCH_CUT_MARGIN`] of `±π`.
    pub near_branch_cut: bool,
}

fn damp_in_place(values: &mut [C64], t: f64, mu: f64) -> Result<bool> {
    let factor = (-mu * t).exp();
    let mut near_cut = false;
    for (index, v) in values.iter_mut().enumerate() {
        let (r, phase) = v.to_polar();
        if r < MIN_MODULUS {
            return Err(Error::ZeroModulus { index, modulus: r });
        }
        near_cut |= phase.abs() > PI - BRANCH_CUT_MARGIN;
        *v = C64::from_polar(r, phase * factor);
    }
    Ok(near_cut)
}

/// Damping flow `w ↦ |w| e^{i arg(w) e^{-μt}}`, principal `arg ∈ (-π, π]`.
pub fn flow_damp(f: &Field, t: f64, mu: f64) -> Result<Damped> {
    let mut field = f.clone();
    let near_branch_cut = if mu * t == 0.0 {
        false
    } else {
        damp_in_place(field.values_mut(), t, mu)?
    };
    Ok(Damped { field, near_branch_cut })
}

/// Reusable stepping state for one grid, parameter set and scheme.
pub struct Stepper {
    grid: GridSpec,
    params: ModelParams,
    scheme: SplitScheme,
    domain: DomainCheck,
    phase_full: Vec<C64>,
    phase_half: Vec<C64>,
}

impl Stepper {
    pub fn new(grid: GridSpec, params: ModelParams, scheme: SplitScheme) -> Self {
        let k2 = grid.wavenumbers_squared();
        let scale = 1.0 / grid.len() as f64;
        let phases = |h: f64| -> Vec<C64> {
            k2.iter().map(|&n2| C64::from_polar(scale, -n2 * h)).collect()
        };
        Stepper {
            grid,
            params,
            scheme,
            domain: DomainCheck::default(),
            phase_full: phases(scheme.dt),
            phase_half: phases(scheme.dt / 2.0),
        }
    }

    pub fn with_domain_check(mut self, domain: DomainCheck) -> Self {
        self.domain = domain;
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn scheme(&self) -> &SplitScheme {
        &self.scheme
    }

    /// Free substep. Returns the largest coefficient modulus of the input.
    fn free(&self, data: &mut [C64], half: bool) -> f64 {
        fft_nd(data, &self.grid, true);
        let carrier = data.iter().map(|c| c.norm()).fold(0.0, f64::max) / self.grid.len() as f64;
        let phases = if half { &self.phase_half } else { &self.phase_full };
        for (c, p) in data.iter_mut().zip(phases) {
            *c *= p;
        }
        fft_nd(data, &self.grid, false);
        carrier
    }

    fn log(&self, data: &mut [C64], h: f64) -> Result<()> {
        if self.params.lambda == 0.0 || h == 0.0 {
            return Ok(());
        }
        log_in_place(data, h, self.params.lambda)
    }

    fn damp(&self, data: &mut [C64], h: f64) -> Result<bool> {
        if self.params.mu * h == 0.0 {
            return Ok(false);
        }
        damp_in_place(data, h, self.params.mu)
    }

    /// Advances `f` by one time step in place. Returns whether the damping
    /// flow met a phase near the branch cut.
    ///
    /// The domain check is taken relative to the carrier, the largest
    /// Fourier coefficient: `|c| > mean_threshold` and
    /// `min |f| > modulus_ratio · |c|`. For data close to a constant the
    /// carrier is the mean; for data close to `ρe^{im·x}` it is the
    /// coefficient at `m`. On error `f` is left partially advanced.
    pub fn advance(&mut self, f: &mut Field) -> Result<bool> {
        if f.grid() != &self.grid {
            return Err(Error::invalid("field grid does not match the stepper grid"));
        }
        let min_modulus = f.min_modulus();
        let dt = self.scheme.dt;
        let data = f.values_mut();
        let half = self.scheme.kind == SchemeKind::Strang;
        let carrier = self.free(data, half);
        if carrier <= self.domain.mean_threshold {
            return Err(Error::ZeroMean {
                modulus: carrier,
                threshold: self.domain.mean_threshold,
            });
        }
        if min_modulus <= self.domain.modulus_ratio * carrier {
            return Err(Error::DomainViolation {
                min_modulus,
                mean_modulus: carrier,
            });
        }
        let near_cut = match self.scheme.kind {
            SchemeKind::LieTrotter => {
                self.log(data, dt)?;
                self.damp(data, dt)?
            }
            SchemeKind::Strang => {
                self.log(data, dt / 2.0)?;
                let c = self.damp(data, dt)?;
                self.log(data, dt / 2.0)?;
                self.free(data, true);
                c
            }
        };
        Ok(near_cut)
    }
}

/// One splitting step.
///
/// Lie–Trotter applies the free, logarithmic and damping flows in that order;
/// Strang is `A(dt/2) B(dt/2) C(dt) B(dt/2) A(dt/2)`.
pub fn step(f: &Field, params: &ModelParams, scheme: &SplitScheme) -> Result<Field> {
    let mut out = f.clone();
    Stepper::new(*f.grid(), *params, *scheme).advance(&mut out)?;
    Ok(out)
}

type ObserverFn = dyn Fn(&Field, &Spectrum) -> f64 + Send + Sync;

/// A named scalar diagnostic evaluated on the state after every recorded step.
#[derive(Clone)]
pub struct Observer {
    name: String,
    func: Arc<ObserverFn>,
}

impl fmt::Debug for Observer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observer").field("name", &self.name).finish()
    }
}

impl Observer {
    pub fn new(
        name: impl Into<String>,
        func: impl Fn(&Field, &Spectrum) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Observer {
            name: name.into(),
            func: Arc::new(func),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn observe(&self, f: &Field, s: &Spectrum) -> f64 {
        (self.func)(f, s)
    }

    /// `|ψ_j|` for the mode `j·e_1`, named `mode_<j>`.
    pub fn mode_amplitude(j: i64) -> Self {
        Observer::new(format!("mode_{j}"), move |_, s| s.mode(j).norm())
    }

    pub fn l2_norm() -> Self {
        Observer::new("l2_norm", |f, _| crate::spectral::l2_norm(f))
    }

    /// Energy; NaN where the field vanishes.
    pub fn energy(lambda: f64) -> Self {
        Observer::new("energy", move |f, s| {
            energy_from(f, s, lambda).unwrap_or(f64::NAN)
        })
    }

    /// Argument of the coefficient at the carrier mode `m·e_1`, the phase
    /// `θ` of the polar decomposition of `e^{-imx}ψ`.
    pub fn theta(carrier: i64) -> Self {
        Observer::new("theta", move |_, s| s.mode(carrier).arg())
    }

    /// Modulus of the carrier coefficient, the amplitude `a`.
    pub fn carrier_amplitude(carrier: i64) -> Self {
        Observer::new("a", move |_, s| s.mode(carrier).norm())
    }

    /// `‖w‖_{H^s}` for the remainder around the carrier mode, with the
    /// weight of each coefficient measured relative to the carrier.
    pub fn remainder_hs(carrier: i64, sobolev_s: f64) -> Self {
        Observer::new("remainder_hs", move |_, s| remainder_hs(s, carrier, sobolev_s))
    }
}

pub(crate) fn remainder_hs(s: &Spectrum, carrier: i64, sobolev_s: f64) -> f64 {
    let grid = s.grid();
    let mut total = 0.0;
    for (i, c) in s.coefficients().iter().enumerate() {
        let mut freq = grid.frequencies_at(i);
        freq[0] -= carrier;
        if freq.iter().all(|&n| n == 0) {
            continue;
        }
        let n2: i64 = freq.iter().map(|n| n * n).sum();
        total += (1.0 + n2 as f64).powf(sobolev_s) * c.norm_sqr();
    }
    total.sqrt()
}

/// Options for [`evolve_with`].
#[derive(Clone, Debug)]
pub struct EvolveOptions {
    /// Keep every `n`-th state as a snapshot (`None` keeps none).
    pub snapshot_stride: Option<usize>,
    /// Evaluate observers every `n`-th step (the first and last step are
    /// always recorded).
    pub observe_stride: usize,
    pub domain: DomainCheck,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            snapshot_stride: None,
            observe_stride: 1,
            domain: DomainCheck::default(),
        }
    }
}

/// Recorded output of [`evolve`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Recorded times, strictly increasing from 0.
    pub times: Vec<f64>,
    pub snapshots: Vec<(f64, Field)>,
    pub observations: BTreeMap<String, Vec<f64>>,
    /// Number of steps whose damping flow flagged a near-cut phase.
    pub branch_warnings: usize,
    pub final_state: Field,
}

impl Trajectory {
    pub fn observation(&self, name: &str) -> Option<&[f64]> {
        self.observations.get(name).map(Vec::as_slice)
    }
}

/// Number of steps needed to reach `t_max` with step `dt`.
pub fn step_count(t_max: f64, dt: f64) -> usize {
    (t_max / dt - 1e-9).ceil().max(0.0) as usize
}

pub fn evolve(
    f0: &Field,
    params: &ModelParams,
    scheme: &SplitScheme,
    t_max: f64,
    observers: &[Observer],
) -> Result<Trajectory> {
    evolve_with(f0, params, scheme, t_max, observers, &EvolveOptions::default())
}

/// Repeats [`step`] up to `t_max`, recording observers and snapshots.
pub fn evolve_with(
    f0: &Field,
    params: &ModelParams,
    scheme: &SplitScheme,
    t_max: f64,
    observers: &[Observer],
    options: &EvolveOptions,
) -> Result<Trajectory> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::invalid(format!("t_max must be positive, got {t_max}")));
    }
    let n_steps = step_count(t_max, scheme.dt);
    let stride = options.observe_stride.max(1);
    let mut stepper = Stepper::new(*f0.grid(), *params, *scheme).with_domain_check(options.domain);
    let mut state = f0.clone();
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps / stride + 2),
        snapshots: Vec::new(),
        observations: observers
            .iter()
            .map(|o| (o.name().to_string(), Vec::with_capacity(n_steps / stride + 2)))
            .collect(),
        branch_warnings: 0,
        final_state: f0.clone(),
    };
    let record = |k: usize, state: &Field, traj: &mut Trajectory| {
        let t = k as f64 * scheme.dt;
        if k % stride == 0 || k == n_steps {
            traj.times.push(t);
            if !observers.is_empty() {
                let spec = forward_transform(state);
                for o in observers {
                    let v = o.observe(state, &spec);
                    traj.observations.get_mut(o.name()).unwrap().push(v);
                }
            }
        }
        if let Some(s) = options.snapshot_stride {
            if k % s.max(1) == 0 {
                traj.snapshots.push((t, state.clone()));
            }
        }
    };
    record(0, &state, &mut traj);
    for k in 1..=n_steps {
        let near_cut = stepper.advance(&mut state).map_err(|e| Error::Step {
            time: (k - 1) as f64 * scheme.dt,
            source: Box::new(e),
        })?;
        traj.branch_warnings += near_cut as usize;
        record(k, &state, &mut traj);
    }
    traj.final_state = state;
    Ok(traj)
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::invalid(format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

fn dot(m: &[i64], x: &[f64]) -> f64 {
    m.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum()
}

/// Exact plane wave `ρ e^{iθ₀} e^{im·x} e^{-i(|m|² + 2λ log ρ)t}` of the
/// undamped equation.
pub fn plane_wave_solution(
    grid: GridSpec,
    rho: f64,
    m: &[i64],
    theta0: f64,
    lambda: f64,
    t: f64,
) -> Result<Field> {
    check_rho(rho)?;
    if m.len() != grid.dimension() {
        return Err(Error::invalid("wave vector length must equal the grid dimension"));
    }
    let m2: i64 = m.iter().map(|a| a * a).sum();
    let omega = m2 as f64 + 2.0 * lambda * rho.ln();
    Field::from_fn(grid, |x| C64::from_polar(rho, theta0 + dot(m, x) - omega * t))
}

/// The stationary constant state `ρ e^{-2iλ log ρ / μ}`.
pub fn constant_solution(rho: f64, lambda: f64, mu: f64) -> Result<C64> {
    check_rho(rho)?;
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::invalid(format!("mu must be positive, got {mu}")));
    }
    Ok(C64::from_polar(rho, -2.0 * lambda * rho.ln() / mu))
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
    }
    Ok(())
}

/// Maps a damped solution `ψ(t)` to the solution with initial datum `κψ(0)`:
/// `κ ψ exp(-2i (λ/μ) log κ (1 - e^{-μt}))`.
pub fn gauge_transform(f: &Field, kappa: f64, params: &ModelParams, t: f64) -> Result<Field> {
    check_kappa(kappa)?;
    if params.mu <= 0.0 {
        return Err(Error::invalid("gauge transform needs mu > 0; use scaling_transform"));
    }
    let phase = -2.0 * params.lambda / params.mu * kappa.ln() * (1.0 - (-params.mu * t).exp());
    let factor = C64::from_polar(kappa, phase);
    f.map(|v| v * factor)
}

/// Undamped scaling symmetry `κ ψ e^{-2itλ log κ}`.
pub fn scaling_transform(f: &Field, kappa: f64, lambda: f64, t: f64) -> Result<Field> {
    check_kappa(kappa)?;
    let factor = C64::from_polar(kappa, -2.0 * t * lambda * kappa.ln());
    f.map(|v| v * factor)
}

/// Galilean boost by an integer velocity `v`:
/// `ψ(t, x - 2vt) e^{i(v·x - |v|²t)}`.
///
/// The shift is applied spectrally, so it is exact for grid data. With
/// `v = -m` it maps the plane wave at `m` onto the one at `0`.
pub fn galilean_transform(f: &Field, v: &[i64], t: f64) -> Result<Field> {
    let grid = *f.grid();
    if v.len() != grid.dimension() {
        return Err(Error::invalid("velocity length must equal the grid dimension"));
    }
    let mut s = forward_transform(f);
    for (i, c) in s.coefficients_mut().iter_mut().enumerate() {
        let j = grid.frequencies_at(i);
        let jv: i64 = j.iter().zip(v).map(|(a, b)| a * b).sum();
        *c *= C64::from_polar(1.0, -2.0 * jv as f64 * t);
    }
    let shifted = inverse_transform(&s);
    let v2: i64 = v.iter().map(|a| a * a).sum();
    let mut x = vec![0.0; grid.dimension()];
    let values = shifted
        .values()
        .iter()
        .enumerate()
        .map(|(i, &val)| {
            for (xa, k) in x.iter_mut().zip(grid.unravel(i)) {
                *xa = grid.coordinate(k);
            }
            let vx: f64 = v.iter().zip(&x).map(|(&a, &b)| a as f64 * b).sum();
            val * C64::from_polar(1.0, vx - v2 as f64 * t)
        })
        .collect();
    Field::new(grid, values)
}

/// `H = ‖∇ψ‖² + λ ⟨|ψ|² (log|ψ|² - 1)⟩`.
pub fn energy(f: &Field, lambda: f64) -> Result<f64> {
    energy_from(f, &forward_transform(f), lambda)
}

fn energy_from(f: &Field, s: &Spectrum, lambda: f64) -> Result<f64> {
    let kinetic: f64 = s
        .grid()
        .wavenumbers_squared()
        .iter()
        .zip(s.coefficients())
        .map(|(n2, c)| n2 * c.norm_sqr())
        .sum();
    let mut potential = 0.0;
    for (index, v) in f.values().iter().enumerate() {
        let r2 = v.norm_sqr();
        if r2.sqrt() < MIN_MODULUS {
            return Err(Error::ZeroModulus { index, modulus: r2.sqrt() });
        }
        potential += r2 * (r2.ln() - 1.0);
    }
    Ok(kinetic + lambda * potential / f.values().len() as f64)
}
