//! Self-checks run from the command line: block algebra, L² conservation,
//! covariance under the gauge, scaling and Galilean transforms, and the
//! convergence order of the splitting schemes.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{preset, run_experiment};
use crate::integrator::{
    evolve, galilean_transform, gauge_transform, scaling_transform, ModelParams, SchemeKind,
    SplitScheme,
};
use crate::linear::{block_matrix, diagonalize, hamiltonian_block, symplectic_form, Mat2, RegimeKind};
use crate::spectral::{Field, GridSpec};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Conservation,
    Invariance,
    Order,
    Blocks,
    All,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Conservation => "conservation",
            Suite::Invariance => "invariance",
            Suite::Order => "order",
            Suite::Blocks => "blocks",
            Suite::All => "all",
        })
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conservation" => Ok(Suite::Conservation),
            "invariance" => Ok(Suite::Invariance),
            "order" => Ok(Suite::Order),
            "blocks" => Ok(Suite::Blocks),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyCheck {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    /// Accepted range `[lo, hi]`.
    pub range: [f64; 2],
    pub passed: bool,
}

impl VerifyCheck {
    fn at_most(suite: Suite, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::within(suite, name, value, [f64::NEG_INFINITY, bound])
    }

    fn within(suite: Suite, name: impl Into<String>, value: f64, range: [f64; 2]) -> Self {
        VerifyCheck {
            suite,
            name: name.into(),
            value,
            range,
            passed: value >= range[0] && value <= range[1],
        }
    }
}

impl fmt::Display for VerifyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let [lo, hi] = self.range;
        let range = if lo == f64::NEG_INFINITY {
            format!("<= {hi:e}")
        } else {
            format!("in [{lo}, {hi}]")
        };
        write!(f, "{status} {}/{}: {:.6e} ({range})", self.suite, self.name, self.value)
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<VerifyCheck>> {
    match suite {
        Suite::Blocks => Ok(block_checks(&BlockSweep::default())),
        Suite::Conservation => conservation_checks(),
        Suite::Invariance => invariance_checks(),
        Suite::Order => order_checks(),
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Blocks, Suite::Conservation, Suite::Invariance, Suite::Order] {
                all.extend(run_suite(s)?);
            }
            Ok(all)
        }
    }
}

/// Parameter sweep of the block suite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockSweep {
    pub n_max: u64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for BlockSweep {
    fn default() -> Self {
        BlockSweep {
            n_max: 1000,
            samples: 100,
            seed: 1,
        }
    }
}

/// Worst-case errors of the block identities over a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BlockErrors {
    pub similarity: f64,
    pub det_p: f64,
    pub condition: f64,
    pub eigenvalues: f64,
    pub symplectic: f64,
    /// Parameters at which the largest condition number was found.
    pub worst_condition_at: (u64, f64, f64),
}

/// Parameters `λ ∈ (-0.49, 2]`, `μ ∈ (0, 10]` drawn from `seed`.
pub fn sample_parameters(samples: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let lambda = 2.0 - rng.random::<f64>() * 2.49;
            let mu = 10.0 - rng.random::<f64>() * 10.0;
            (lambda, mu)
        })
        .collect()
}

/// Eigenvalues of a 2×2 matrix from its trace and determinant.
fn generic_eigenvalues(m: &Mat2) -> [C64; 2] {
    let half = m.trace() / 2.0;
    let q = (half * half - m.det()).sqrt();
    [half + q, half - q]
}

fn eigen_mismatch(a: [C64; 2], b: [C64; 2]) -> f64 {
    let straight = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    let crossed = (a[0] - b[1]).norm().max((a[1] - b[0]).norm());
    straight.min(crossed)
}

pub fn block_errors(sweep: &BlockSweep) -> BlockErrors {
    let mut e = BlockErrors::default();
    let j = symplectic_form();
    for (lambda, mu) in sample_parameters(sweep.samples, sweep.seed) {
        for n in 1..=sweep.n_max {
            let block = block_matrix(n, lambda, mu).expect("sampled parameters are valid");
            let d = diagonalize(&block);
            let scale = block.entries.max_abs().max(1.0);
            let sim = d.p_inv * block.entries * d.p;
            e.similarity = e.similarity.max(sim.sub(&d.d).max_abs() / scale);
            if d.regime.kind == RegimeKind::Oscillatory {
                e.det_p = e.det_p.max((d.p.det() - 1.0).norm());
            }
            let cond = d.p.condition_number();
            if cond > e.condition {
                e.condition = cond;
                e.worst_condition_at = (n, lambda, mu);
            }
            e.eigenvalues = e
                .eigenvalues
                .max(eigen_mismatch(block.eigenvalues(), generic_eigenvalues(&block.entries)) / scale);
            let h = hamiltonian_block(n, lambda).expect("sampled parameters are valid");
            let s = h.s_matrix();
            e.symplectic = e.symplectic.max((s.transpose() * j * s).sub(&j).max_abs());
        }
    }
    e
}

fn block_checks(sweep: &BlockSweep) -> Vec<VerifyCheck> {
    let e = block_errors(sweep);
    let s = Suite::Blocks;
    vec![
        VerifyCheck::at_most(s, "similarity", e.similarity, 1e-10),
        VerifyCheck::at_most(s, "det_p", e.det_p, 1e-10),
        VerifyCheck::at_most(s, "condition", e.condition, 2.0 + 1e-9),
        VerifyCheck::at_most(s, "eigenvalues", e.eigenvalues, 1e-10),
        VerifyCheck::at_most(s, "symplectic", e.symplectic, 1e-12),
    ]
}

fn conservation_checks() -> Result<Vec<VerifyCheck>> {
    let report = run_experiment(&preset("paper-fig2")?)?;
    Ok(vec![VerifyCheck::at_most(
        Suite::Conservation,
        "l2_drift_fig2",
        report.diagnostics.l2_drift,
        1e-8,
    )])
}

/// `ψ₀ = 1 / (1 + 0.2 cos x)` on `K` points.
pub fn paper_psi0(points: usize) -> Result<Field> {
    let grid = GridSpec::one_d(points)?;
    Field::from_fn(grid, |x| C64::new(1.0 / (1.0 + 0.2 * x[0].cos()), 0.0))
}

fn evolve_to(f: &Field, params: &ModelParams, scheme: &SplitScheme, t: f64) -> Result<Field> {
    Ok(evolve(f, params, scheme, t, &[])?.final_state)
}

/// L² distances between transform-then-evolve and evolve-then-transform at
/// `t`, for the gauge (`μ = 2`, `κ = 2`), scaling (`μ = 0`, `κ = 2`) and
/// Galilean (`μ = 0`, `v = 1`) symmetries.
pub fn covariance_errors(kind: SchemeKind, dt: f64, t: f64, points: usize) -> Result<[f64; 3]> {
    let psi0 = paper_psi0(points)?;
    let scheme = SplitScheme::new(kind, dt)?;
    let kappa = 2.0;

    let damped = ModelParams::new(0.5, 2.0)?;
    let a = evolve_to(&psi0.map(|v| kappa * v)?, &damped, &scheme, t)?;
    let b = gauge_transform(&evolve_to(&psi0, &damped, &scheme, t)?, kappa, &damped, t)?;
    let gauge = a.l2_distance(&b);

    let free = ModelParams::new(0.5, 0.0)?;
    let plain = evolve_to(&psi0, &free, &scheme, t)?;
    let a = evolve_to(&psi0.map(|v| kappa * v)?, &free, &scheme, t)?;
    let b = scaling_transform(&plain, kappa, free.lambda, t)?;
    let scaling = a.l2_distance(&b);

    let a = evolve_to(&galilean_transform(&psi0, &[1], 0.0)?, &free, &scheme, t)?;
    let b = galilean_transform(&plain, &[1], t)?;
    let galilean = a.l2_distance(&b);
    Ok([gauge, scaling, galilean])
}

fn invariance_checks() -> Result<Vec<VerifyCheck>> {
    let [g, s, v] = covariance_errors(SchemeKind::Strang, 1e-3, 1.0, 128)?;
    let suite = Suite::Invariance;
    Ok(vec![
        VerifyCheck::at_most(suite, "gauge", g, 1e-5),
        VerifyCheck::at_most(suite, "scaling", s, 1e-5),
        VerifyCheck::at_most(suite, "galilean", v, 1e-5),
    ])
}

/// Observed convergence order: least-squares slope of `log e(Δt)` against
/// `log Δt`, with `e` the L² error at `t` against a run with step
/// `min(Δt) / 100`, on the damped `ψ₀` configuration.
pub fn observed_order(kind: SchemeKind, dts: &[f64], t: f64, points: usize) -> Result<(f64, Vec<f64>)> {
    let psi0 = paper_psi0(points)?;
    let params = ModelParams::new(0.5, 2.0)?;
    let dt_min = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let reference = evolve_to(&psi0, &params, &SplitScheme::new(kind, dt_min / 100.0)?, t)?;
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let f = evolve_to(&psi0, &params, &SplitScheme::new(kind, dt)?, t)?;
        errors.push(f.l2_distance(&reference));
    }
    let pts: Vec<(f64, f64)> = dts.iter().zip(&errors).map(|(d, e)| (d.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok((sxy / sxx, errors))
}

pub const ORDER_STEPS: [f64; 3] = [0.04, 0.02, 0.01];

fn order_checks() -> Result<Vec<VerifyCheck>> {
    let (lie, _) = observed_order(SchemeKind::LieTrotter, &ORDER_STEPS, 1.0, 128)?;
    let (strang, _) = observed_order(SchemeKind::Strang, &ORDER_STEPS, 1.0, 128)?;
    Ok(vec![
        VerifyCheck::within(Suite::Order, "lie_trotter", lie, [0.7, 1.3]),
        VerifyCheck::within(Suite::Order, "strang", strang, [1.7, 2.3]),
    ])
}
