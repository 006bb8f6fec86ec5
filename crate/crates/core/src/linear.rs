//! Per-mode 2×2 linear algebra of the linearized dynamics around the
//! constant state.
//!
//! Writing a perturbation of the constant state as `w` and pairing mode `j`
//! with the conjugate of mode `-j`, each shell `n = |j|²` evolves under
//!
//! ```text
//! i d/dt (ξ_j, η_j) = A_n (ξ_j, η_j),
//! A_n = [[ n + z,  z̄     ],
//!        [ -z,    -n - z̄ ]],      z = λ + μ/(2i),
//! ```
//!
//! whose eigenvalues are `μ/(2i) ± sqrt(n² + 2λn - μ²/4)`. The sign of
//! `4n² + 8λn - μ²` splits the shells into oscillatory, overdamped and
//! Jordan (double eigenvalue) blocks, which fix the per-mode damping rates.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Default half-width of the band around a zero discriminant treated as a
/// Jordan block.
pub const JORDAN_TOLERANCE: f64 = 1e-9;

/// A complex 2×2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Mat2::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, C64::default(), C64::default(), d)
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn adjoint(&self) -> Self {
        let t = self.transpose();
        t.map(|v| v.conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|v| v * s)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let m = &self.0;
        Mat2::new(f(m[0][0]), f(m[0][1]), f(m[1][0]), f(m[1][1]))
    }

    pub fn sub(&self, other: &Mat2) -> Self {
        let (a, b) = (&self.0, &other.0);
        Mat2::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(1.0 / det))
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> (f64, f64) {
        // eigenvalues of the hermitian M^H M from trace and determinant
        let g = self.adjoint() * *self;
        let tr = g.trace().re;
        let det = self.det().norm_sqr();
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let hi = tr / 2.0 + disc;
        // the small one from det to avoid cancellation
        let lo = if hi > 0.0 { det / hi } else { 0.0 };
        (hi.sqrt(), lo.max(0.0).sqrt())
    }

    /// Spectral condition number `σ_max / σ_min`.
    pub fn condition_number(&self) -> f64 {
        let (hi, lo) = self.singular_values();
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// `exp(s·self)`, with the closed form for 2×2 matrices.
    ///
    /// Uses `exp(sM) = e^{s·tr/2} (cosh(sq) I + sinh(sq)/q (M - tr/2 I))`
    /// with `q² = (tr/2)² - det`, and the `q → 0` limit.
    pub fn exp_scaled(&self, s: C64) -> Mat2 {
        let half = self.trace() / 2.0;
        let shifted = self.sub(&Mat2::diag(half, half));
        let q = (half * half - self.det()).sqrt();
        let sq = s * q;
        let (c, sh) = if sq.norm() < 1e-8 {
            // series, accurate to roundoff for |sq| < 1e-8
            (C64::new(1.0, 0.0) + sq * sq / 2.0, s * (C64::new(1.0, 0.0) + sq * sq / 6.0))
        } else {
            (sq.cosh(), sq.sinh() / q)
        };
        let e = (s * half).exp();
        let m = &shifted.0;
        Mat2::new(
            e * (c + sh * m[0][0]),
            e * sh * m[0][1],
            e * sh * m[1][0],
            e * (c + sh * m[1][1]),
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[C64::default(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda <= -0.5 {
        return Err(Error::invalid(format!("lambda must exceed -1/2, got {lambda}")));
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<()> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::invalid(format!("mu must be nonnegative, got {mu}")));
    }
    Ok(())
}

/// `z = λ + μ/(2i) = λ - iμ/2`.
fn coupling(lambda: f64, mu: f64) -> C64 {
    C64::new(lambda, -mu / 2.0)
}

/// The block `A_n` for one shell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeBlock {
    pub n: u64,
    pub lambda: f64,
    pub mu: f64,
    pub entries: Mat2,
}

impl ModeBlock {
    /// Closed-form eigenvalues `μ/(2i) ∓ sqrt(n² + 2λn - μ²/4)`.
    pub fn eigenvalues(&self) -> [C64; 2] {
        let n = self.n as f64;
        let delta = C64::new(n * n + 2.0 * self.lambda * n - self.mu * self.mu / 4.0, 0.0).sqrt();
        let center = C64::new(0.0, -self.mu / 2.0);
        [center + delta, center - delta]
    }

    pub fn discriminant(&self) -> f64 {
        discriminant(self.n, self.lambda, self.mu)
    }
}

pub fn block_matrix(n: u64, lambda: f64, mu: f64) -> Result<ModeBlock> {
    if n == 0 {
        return Err(Error::invalid("shell index n must be positive"));
    }
    check_lambda(lambda)?;
    check_mu(mu)?;
    let nn = C64::new(n as f64, 0.0);
    let z = coupling(lambda, mu);
    Ok(ModeBlock {
        n,
        lambda,
        mu,
        entries: Mat2::new(nn + z, z.conj(), -z, -nn - z.conj()),
    })
}

/// `4n² + 8λn - μ²`.
pub fn discriminant(n: u64, lambda: f64, mu: f64) -> f64 {
    let n = n as f64;
    4.0 * n * n + 8.0 * lambda * n - mu * mu
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeKind {
    Oscillatory,
    Overdamped,
    Jordan,
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeKind::Oscillatory => "oscillatory",
            RegimeKind::Overdamped => "overdamped",
            RegimeKind::Jordan => "jordan",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regime {
    pub kind: RegimeKind,
    pub discriminant: f64,
}

pub fn classify(n: u64, lambda: f64, mu: f64) -> Regime {
    classify_with_tolerance(n, lambda, mu, JORDAN_TOLERANCE)
}

pub fn classify_with_tolerance(n: u64, lambda: f64, mu: f64, tol: f64) -> Regime {
    let d = discriminant(n, lambda, mu);
    let kind = if d > tol {
        RegimeKind::Oscillatory
    } else if d < -tol {
        RegimeKind::Overdamped
    } else {
        RegimeKind::Jordan
    };
    Regime { kind, discriminant: d }
}

/// Change of basis `P` with `P⁻¹ A_n P = D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockDiagonalization {
    pub regime: Regime,
    pub p: Mat2,
    pub p_inv: Mat2,
    /// Diagonal, or upper triangular with equal diagonal in the Jordan case.
    pub d: Mat2,
}

impl BlockDiagonalization {
    /// `exp(-itA_n) = P exp(-itD) P⁻¹`.
    pub fn propagator(&self, t: f64) -> Mat2 {
        let minus_it = C64::new(0.0, -t);
        let exp_d = match self.regime.kind {
            RegimeKind::Jordan => {
                let m = &self.d.0;
                let e = (minus_it * m[0][0]).exp();
                Mat2::new(e, e * minus_it * m[0][1], C64::default(), e)
            }
            _ => Mat2::diag((minus_it * self.d.0[0][0]).exp(), (minus_it * self.d.0[1][1]).exp()),
        };
        self.p * exp_d * self.p_inv
    }
}

/// Block diagonalization from the closed forms.
///
/// Outside the Jordan band, with `δ = sqrt(n² + 2λn - μ²/4)` (principal
/// root, imaginary in the overdamped case) and `c = (2δ(δ+n+λ))^{-1/2}`,
///
/// ```text
/// P   = c [[n+λ+δ, -z̄], [-z, n+λ+δ]]
/// P⁻¹ = c [[n+λ+δ,  z̄], [ z, n+λ+δ]]
/// D   = diag(μ/(2i) + δ, μ/(2i) - δ)
/// ```
///
/// so the overdamped `D` reads `diag(-iα_n, -iβ_n)`. In the Jordan band
/// `D = [[μ/(2i), z̄], [0, μ/(2i)]]` with `P = [[1, -z̄/(n+λ)], [-z/(n+λ), 2]]`.
pub fn diagonalize(b: &ModeBlock) -> BlockDiagonalization {
    diagonalize_with_tolerance(b, JORDAN_TOLERANCE)
}

pub fn diagonalize_with_tolerance(b: &ModeBlock, tol: f64) -> BlockDiagonalization {
    let regime = classify_with_tolerance(b.n, b.lambda, b.mu, tol);
    let n = b.n as f64;
    let z = coupling(b.lambda, b.mu);
    let center = C64::new(0.0, -b.mu / 2.0);
    let npl = C64::new(n + b.lambda, 0.0);
    match regime.kind {
        RegimeKind::Jordan => {
            let inv = 1.0 / (n + b.lambda);
            let p = Mat2::new(C64::new(1.0, 0.0), -z.conj() * inv, -z * inv, C64::new(2.0, 0.0));
            let p_inv = Mat2::new(C64::new(2.0, 0.0), z.conj() * inv, z * inv, C64::new(1.0, 0.0));
            let d = Mat2::new(center, z.conj(), C64::default(), center);
            BlockDiagonalization { regime, p, p_inv, d }
        }
        _ => {
            let delta = C64::new(n * n + 2.0 * b.lambda * n - b.mu * b.mu / 4.0, 0.0).sqrt();
            let diag = npl + delta;
            let c = 1.0 / (2.0 * delta * (delta + npl)).sqrt();
            let p = Mat2::new(diag, -z.conj(), -z, diag).scale(c);
            let p_inv = Mat2::new(diag, z.conj(), z, diag).scale(c);
            let d = Mat2::diag(center + delta, center - delta);
            BlockDiagonalization { regime, p, p_inv, d }
        }
    }
}

/// Predicted damping data for one mode and for the whole solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePrediction {
    pub alpha_j: f64,
    pub beta_j: u8,
    pub global_alpha: f64,
    pub global_beta: u8,
}

fn check_rate_params(lambda: f64, mu: f64) -> Result<()> {
    check_lambda(lambda)?;
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::invalid(format!("mu must be positive for damping rates, got {mu}")));
    }
    Ok(())
}

fn shell_rate(n: u64, lambda: f64, mu: f64) -> (f64, u8) {
    let nf = n as f64;
    match classify(n, lambda, mu).kind {
        RegimeKind::Jordan => (mu / 2.0, 1),
        _ => {
            let excess = mu * mu / 4.0 - nf * nf - 2.0 * lambda * nf;
            (mu / 2.0 - excess.max(0.0).sqrt(), 0)
        }
    }
}

/// Damping rate of mode `j` given `|j|²`:
/// `α_j = μ/2 - max(0, μ²/4 - |j|⁴ - 2λ|j|²)^{1/2}`, with `β_j = 1` exactly
/// on the Jordan band.
pub fn mode_rate(j_norm_sq: u64, lambda: f64, mu: f64) -> Result<RatePrediction> {
    check_rate_params(lambda, mu)?;
    if j_norm_sq == 0 {
        return Err(Error::invalid("mode rate is defined for j != 0"));
    }
    let (alpha_j, beta_j) = shell_rate(j_norm_sq, lambda, mu);
    let (global_alpha, global_beta) = global_rate(lambda, mu)?;
    Ok(RatePrediction {
        alpha_j,
        beta_j,
        global_alpha,
        global_beta,
    })
}

/// Global convergence rate `(α, β)` toward the constant state.
pub fn global_rate(lambda: f64, mu: f64) -> Result<(f64, u8)> {
    check_rate_params(lambda, mu)?;
    match classify(1, lambda, mu).kind {
        RegimeKind::Oscillatory => Ok((mu / 2.0, 0)),
        RegimeKind::Jordan => Ok((mu / 2.0, 1)),
        RegimeKind::Overdamped => {
            let alpha = mu / 2.0 - (mu * mu / 4.0 - 1.0 - 2.0 * lambda).sqrt();
            // shells n >= 2 that are still not oscillatory; one on the
            // Jordan band adds a polynomial factor
            let beta = (2u64..)
                .take_while(|&n| discriminant(n, lambda, mu) <= JORDAN_TOLERANCE)
                .any(|n| classify(n, lambda, mu).kind == RegimeKind::Jordan);
            Ok((alpha, beta as u8))
        }
    }
}

/// `Ω_n = sqrt(n² + 2λn)`.
pub fn frequency(n: u64, lambda: f64) -> f64 {
    let n = n as f64;
    (n * n + 2.0 * lambda * n).sqrt()
}

/// Real symplectic diagonalization of the undamped block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianBlock {
    pub n: u64,
    pub lambda: f64,
    pub s: [[f64; 2]; 2],
    pub s_inv: [[f64; 2]; 2],
    pub omega: f64,
}

impl HamiltonianBlock {
    pub fn s_matrix(&self) -> Mat2 {
        let s = &self.s;
        Mat2::real(s[0][0], s[0][1], s[1][0], s[1][1])
    }

    pub fn s_inv_matrix(&self) -> Mat2 {
        let s = &self.s_inv;
        Mat2::real(s[0][0], s[0][1], s[1][0], s[1][1])
    }
}

pub fn hamiltonian_block(n: u64, lambda: f64) -> Result<HamiltonianBlock> {
    if n == 0 {
        return Err(Error::invalid("shell index n must be positive"));
    }
    check_lambda(lambda)?;
    let nf = n as f64;
    let omega = frequency(n, lambda);
    let c = 1.0 / ((nf + omega) * (nf + 2.0 * lambda + omega)).sqrt();
    let diag = c * (nf + lambda + omega);
    let off = c * lambda;
    Ok(HamiltonianBlock {
        n,
        lambda,
        s: [[diag, -off], [-off, diag]],
        s_inv: [[diag, off], [off, diag]],
        omega,
    })
}

/// The standard symplectic form `[[0, 1], [-1, 0]]`.
pub fn symplectic_form() -> Mat2 {
    Mat2::real(0.0, 1.0, -1.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        a.sub(b).max_abs() <= tol
    }

    fn sorted(mut e: [C64; 2]) -> [C64; 2] {
        e.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        e
    }

    #[test]
    fn entries_and_trace() {
        let b = block_matrix(2, 0.3, 1.4).unwrap();
        let m = &b.entries.0;
        assert_eq!(m[0][0], C64::new(2.3, -0.7));
        assert_eq!(m[0][1], C64::new(0.3, 0.7));
        assert_eq!(m[1][0], C64::new(-0.3, 0.7));
        assert_eq!(m[1][1], C64::new(-2.3, -0.7));
        assert_relative_eq!(b.entries.trace().im, -1.4);
        assert_eq!(b.entries.trace().re, 0.0);
        assert!(block_matrix(1, -0.5, 1.0).is_err());
        assert!(block_matrix(0, 0.5, 1.0).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let e = sorted(block_matrix(1, 0.5, 2.0).unwrap().eigenvalues());
        assert!((e[0] - C64::new(-1.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - C64::new(1.0, -1.0)).norm() < 1e-14);

        let e = sorted(block_matrix(1, 0.0, 0.0).unwrap().eigenvalues());
        assert!((e[0] + 1.0).norm() < 1e-14 && (e[1] - 1.0).norm() < 1e-14);

        let b = block_matrix(3, 0.5, 8.0).unwrap();
        assert_relative_eq!(b.discriminant(), -16.0);
        let mut e = b.eigenvalues();
        e.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
        assert!((e[0] - C64::new(0.0, -2.0)).norm() < 1e-14);
        assert!((e[1] - C64::new(0.0, -6.0)).norm() < 1e-14);
    }

    #[test]
    fn classify_examples() {
        let r = classify(1, 0.5, 2.0);
        assert_eq!(r.kind, RegimeKind::Oscillatory);
        assert_relative_eq!(r.discriminant, 4.0);
        assert_eq!(classify(1, 0.5, 2.0 * 2f64.sqrt()).kind, RegimeKind::Jordan);
        assert_eq!(classify(1, 0.5, 8.0).kind, RegimeKind::Overdamped);
        assert_eq!(classify_with_tolerance(1, 0.5, 2.0, 5.0).kind, RegimeKind::Jordan);
    }

    fn check_identities(b: &ModeBlock, tol: f64) -> BlockDiagonalization {
        let bd = diagonalize(b);
        assert!(close(&(bd.p * bd.p_inv), &Mat2::identity(), tol));
        assert!(close(&(bd.p_inv * b.entries * bd.p), &bd.d, tol), "{}", bd.p_inv * b.entries * bd.p);
        bd
    }

    #[test]
    fn oscillatory_diagonalization() {
        let b = block_matrix(1, 0.5, 1.0).unwrap();
        let bd = check_identities(&b, 1e-13);
        assert_eq!(bd.regime.kind, RegimeKind::Oscillatory);
        assert!((bd.p.det() - 1.0).norm() < 1e-13);
        assert!((bd.p_inv.det() - 1.0).norm() < 1e-13);
        let delta = (1.0f64 + 1.0 - 0.25).sqrt();
        assert!((bd.d.0[0][0] - C64::new(delta, -0.5)).norm() < 1e-13);
        assert!((bd.d.0[1][1] - C64::new(-delta, -0.5)).norm() < 1e-13);
        // hermitian
        assert!(close(&bd.p, &bd.p.adjoint(), 1e-15));
    }

    #[test]
    fn jordan_diagonalization() {
        let mu = 2.0 * 2f64.sqrt();
        let b = block_matrix(1, 0.5, mu).unwrap();
        let bd = check_identities(&b, 1e-12);
        assert_eq!(bd.regime.kind, RegimeKind::Jordan);
        let expect = Mat2::new(
            C64::new(0.0, -mu / 2.0),
            C64::new(0.5, mu / 2.0),
            C64::default(),
            C64::new(0.0, -mu / 2.0),
        );
        assert!(close(&bd.d, &expect, 1e-15));
    }

    #[test]
    fn overdamped_diagonalization() {
        let b = block_matrix(1, 0.5, 8.0).unwrap();
        let bd = check_identities(&b, 1e-10);
        assert_eq!(bd.regime.kind, RegimeKind::Overdamped);
        let s14 = 14f64.sqrt();
        assert!((bd.d.0[0][0] - C64::new(0.0, -(4.0 - s14))).norm() < 1e-12);
        assert!((bd.d.0[1][1] - C64::new(0.0, -(4.0 + s14))).norm() < 1e-12);
    }

    #[test]
    fn propagator_matches_matrix_exponential() {
        for &(n, l, mu) in &[(1, 0.5, 1.0), (1, 0.5, 8.0), (1, 0.5, 2.0 * 2f64.sqrt()), (4, 0.2, 0.0)] {
            let b = block_matrix(n, l, mu).unwrap();
            let bd = diagonalize(&b);
            for &t in &[0.0, 0.3, 2.0] {
                let direct = b.entries.exp_scaled(C64::new(0.0, -t));
                assert!(close(&bd.propagator(t), &direct, 1e-9), "n={n} mu={mu} t={t}");
            }
        }
    }

    #[test]
    fn rate_examples() {
        let r = mode_rate(1, 0.5, 2.0).unwrap();
        assert_eq!((r.alpha_j, r.beta_j), (1.0, 0));
        let r = mode_rate(1, 0.5, 8.0).unwrap();
        assert_relative_eq!(r.alpha_j, 4.0 - 14f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(r.alpha_j, 0.25834, epsilon = 1e-5);
        assert_eq!(r.beta_j, 0);
        let r = mode_rate(1, 0.5, 2.0 * 2f64.sqrt()).unwrap();
        assert_relative_eq!(r.alpha_j, 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(r.beta_j, 1);
        assert!(mode_rate(1, -0.6, 1.0).is_err());
        assert!(mode_rate(1, 0.5, 0.0).is_err());
    }

    #[test]
    fn global_rate_examples() {
        assert_eq!(global_rate(0.5, 2.0).unwrap(), (1.0, 0));
        let (a, b) = global_rate(0.5, 2.0 * 2f64.sqrt()).unwrap();
        assert_relative_eq!(a, 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(b, 1);
        let (a, b) = global_rate(0.5, 8.0).unwrap();
        assert_relative_eq!(a, 4.0 - 14f64.sqrt(), epsilon = 1e-14);
        assert_eq!(b, 0);
        // mu² = 4n² + 8λn at n = 2 with λ = 0.5: mu = sqrt(24)
        let (_, b) = global_rate(0.5, 24f64.sqrt()).unwrap();
        assert_eq!(b, 1);
    }

    #[test]
    fn hamiltonian_examples() {
        let h = hamiltonian_block(1, 0.0).unwrap();
        assert_eq!(h.s, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(h.omega, 1.0);

        let j = symplectic_form();
        for &(n, l, om) in &[(1, 0.5, 2f64.sqrt()), (4, 0.5, 20f64.sqrt())] {
            let h = hamiltonian_block(n, l).unwrap();
            assert_relative_eq!(h.omega, om, epsilon = 1e-14);
            let s = h.s_matrix();
            assert!(close(&(s.transpose() * j * s), &j, 1e-12));
            let a0 = block_matrix(n, l, 0.0).unwrap().entries;
            let d = h.s_inv_matrix() * a0 * s;
            assert!(close(&d, &Mat2::real(om, 0.0, 0.0, -om), 1e-12));
        }
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(frequency(1, 0.0), 1.0);
        assert_relative_eq!(frequency(1, 0.5), 2f64.sqrt());
        assert_relative_eq!(frequency(2, 0.5), 6f64.sqrt());
    }

    #[test]
    fn condition_number_of_known_matrices() {
        assert_relative_eq!(Mat2::identity().condition_number(), 1.0);
        assert_relative_eq!(Mat2::real(2.0, 0.0, 0.0, 0.5).condition_number(), 4.0, epsilon = 1e-14);
        assert_eq!(Mat2::real(1.0, 1.0, 1.0, 1.0).condition_number(), f64::INFINITY);
    }
}
