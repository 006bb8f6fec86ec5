//! Small divisors `Ω_{m_1} + … + Ω_{m_p} - Ω_{n_1} - … - Ω_{n_q}` of the
//! linear frequencies `Ω_n = sqrt(n² + 2λn)`.
//!
//! A divisor vanishes identically in `λ` exactly when `m` and `n` agree as
//! multisets; every other combination is expected to stay away from zero
//! like `γ / μ₃^α`, where `μ₃` is the third-largest index involved.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::frequency;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Non-cancelling divisors at or below this are reported as anomalies.
pub const ANOMALY_THRESHOLD: f64 = 1e-13;

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > -0.5) {
        return Err(Error::invalid(format!("lambda must satisfy lambda > -1/2, got {lambda}")));
    }
    Ok(())
}

fn sorted(v: &[u64]) -> Vec<u64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

/// Sum of `Ω` over the indices in ascending order.
fn omega_sum(sorted_indices: &[u64], omega: impl Fn(u64) -> f64) -> f64 {
    sorted_indices.iter().map(|&i| omega(i)).sum()
}

/// Signed divisor `Σ_m Ω - Σ_n Ω`.
///
/// Each side is summed in ascending index order, so the result depends only
/// on the multisets and equal multisets give exactly zero.
pub fn divisor(m: &[u64], n: &[u64], lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if m.iter().chain(n).any(|&i| i == 0) {
        return Err(Error::invalid("divisor indices must be positive"));
    }
    let f = |i| frequency(i, lambda);
    Ok(omega_sum(&sorted(m), f) - omega_sum(&sorted(n), f))
}

/// Whether `m` and `n` agree as multisets.
pub fn cancels_pairwise(m: &[u64], n: &[u64]) -> bool {
    m.len() == n.len() && sorted(m) == sorted(n)
}

/// Third-largest index of `m ∪ n`, or 1 when fewer than three indices are
/// involved.
pub fn mu3(m: &[u64], n: &[u64]) -> u64 {
    let mut all: Vec<u64> = m.iter().chain(n).copied().collect();
    all.sort_unstable_by(|a, b| b.cmp(a));
    all.get(2).copied().unwrap_or(1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorRecord {
    pub m_indices: Vec<u64>,
    pub n_indices: Vec<u64>,
    pub value: f64,
    pub mu3: u64,
    pub cancels: bool,
}

/// Smallest non-cancelling divisor seen for one value of `μ₃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub mu3: u64,
    pub min_divisor: f64,
    /// Non-cancelling combinations in this bucket.
    pub count: u64,
    pub argmin: DivisorRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub lambda: f64,
    pub r: usize,
    pub n_max: u64,
    pub records: Vec<Bucket>,
    /// Fit of `log min|d| = log γ - α log μ₃` over buckets with `μ₃ ≥ 2`;
    /// `None` with fewer than two such buckets.
    pub gamma_fit: Option<f64>,
    pub alpha_fit: Option<f64>,
    pub combinations: u64,
    pub cancelling: u64,
    /// Cancelling combinations whose divisor was not exactly zero.
    pub cancelling_nonzero: u64,
    /// Non-cancelling combinations with `|d| ≤ ANOMALY_THRESHOLD`.
    pub anomalies: Vec<DivisorRecord>,
}

impl ScanResult {
    pub fn min_divisor(&self) -> Option<f64> {
        self.records.iter().map(|b| b.min_divisor).reduce(f64::min)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(["mu3", "min_divisor", "count"])?;
        for b in &self.records {
            out.write_record([
                b.mu3.to_string(),
                format!("{:.16e}", b.min_divisor),
                b.count.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(file).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// Sorted multisets of `{1..=n_max}` with exactly `size` elements.
fn multisets(size: usize, n_max: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![1u64; size];
    if size == 0 {
        return vec![Vec::new()];
    }
    loop {
        out.push(cur.clone());
        // next non-decreasing tuple
        let Some(pos) = (0..size).rev().find(|&i| cur[i] < n_max) else {
            break;
        };
        let v = cur[pos] + 1;
        for c in &mut cur[pos..] {
            *c = v;
        }
    }
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn multiset_count(size: usize, n_max: u64) -> u128 {
    binomial(n_max as u128 + size as u128 - 1, size as u128)
}

/// Number of `(m, n)` pairs a scan enumerates.
pub fn combination_count(r: usize, n_max: u64) -> u128 {
    let mut total = 0u128;
    for p in 1..r {
        for q in 1..=(r - p) {
            total += multiset_count(p, n_max) * multiset_count(q, n_max);
        }
    }
    total
}

pub fn scan(lambda: f64, r: usize, n_max: u64) -> Result<ScanResult> {
    scan_with_budget(lambda, r, n_max, DEFAULT_BUDGET)
}

/// Enumerates all `(m, n)` with `|m|, |n| ≥ 1`, `|m| + |n| ≤ r` and indices in
/// `1..=n_max`, keeping the smallest `|divisor|` of each `μ₃` bucket.
pub fn scan_with_budget(lambda: f64, r: usize, n_max: u64, budget: u128) -> Result<ScanResult> {
    check_lambda(lambda)?;
    if r < 3 {
        return Err(Error::invalid(format!(
            "r must be at least 3 (r = {r} admits only pairwise cancellations)"
        )));
    }
    if n_max < 3 {
        return Err(Error::invalid(format!("n_max must be at least 3, got {n_max}")));
    }
    let combinations = combination_count(r, n_max);
    if combinations > budget {
        return Err(Error::BudgetExceeded { combinations, budget });
    }

    let omega: Vec<f64> = (0..=n_max).map(|n| frequency(n, lambda)).collect();
    let sets: Vec<Vec<(Vec<u64>, f64)>> = (0..r)
        .map(|size| {
            multisets(size, n_max)
                .into_iter()
                .map(|m| {
                    let s = omega_sum(&m, |i| omega[i as usize]);
                    (m, s)
                })
                .collect()
        })
        .collect();

    let mut buckets: BTreeMap<u64, Bucket> = BTreeMap::new();
    let mut result = ScanResult {
        lambda,
        r,
        n_max,
        records: Vec::new(),
        gamma_fit: None,
        alpha_fit: None,
        combinations: 0,
        cancelling: 0,
        cancelling_nonzero: 0,
        anomalies: Vec::new(),
    };
    let record = |m: &[u64], n: &[u64], value: f64, cancels: bool| DivisorRecord {
        m_indices: m.to_vec(),
        n_indices: n.to_vec(),
        value,
        mu3: mu3(m, n),
        cancels,
    };
    for p in 1..r {
        for q in 1..=(r - p) {
            for (m, sm) in &sets[p] {
                for (n, sn) in &sets[q] {
                    result.combinations += 1;
                    let value = sm - sn;
                    if p == q && m == n {
                        result.cancelling += 1;
                        result.cancelling_nonzero += (value != 0.0) as u64;
                        continue;
                    }
                    let key = mu3(m, n);
                    let abs = value.abs();
                    if abs <= ANOMALY_THRESHOLD {
                        result.anomalies.push(record(m, n, value, false));
                    }
                    match buckets.get_mut(&key) {
                        Some(b) => {
                            b.count += 1;
                            if abs < b.min_divisor {
                                b.min_divisor = abs;
                                b.argmin = record(m, n, value, false);
                            }
                        }
                        None => {
                            buckets.insert(
                                key,
                                Bucket {
                                    mu3: key,
                                    min_divisor: abs,
                                    count: 1,
                                    argmin: record(m, n, value, false),
                                },
                            );
                        }
                    }
                }
            }
        }
    }
    result.records = buckets.into_values().collect();
    if let Some((gamma, alpha)) = fit_power_law(&result.records) {
        result.gamma_fit = Some(gamma);
        result.alpha_fit = Some(alpha);
    }
    Ok(result)
}

/// Least-squares `(γ, α)` for `min|d| ≈ γ μ₃^{-α}` over `μ₃ ≥ 2`.
fn fit_power_law(buckets: &[Bucket]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = buckets
        .iter()
        .filter(|b| b.mu3 >= 2 && b.min_divisor > 0.0)
        .map(|b| ((b.mu3 as f64).ln(), b.min_divisor.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Some(((my - slope * mx).exp(), -slope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn divisor_examples() {
        assert_eq!(divisor(&[1], &[1], 0.3).unwrap(), 0.0);
        let d = divisor(&[1, 1], &[2], 0.5).unwrap();
        assert_relative_eq!(d, 2.0 * 2f64.sqrt() - 6f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(d, 0.37894, epsilon = 1e-5);
        assert_eq!(divisor(&[2], &[1, 1], 0.5).unwrap(), -d);
        assert!(divisor(&[0], &[1], 0.5).is_err());
        assert!(divisor(&[1], &[1], -0.5).is_err());
    }

    #[test]
    fn cancellation_examples() {
        assert!(cancels_pairwise(&[3, 5], &[5, 3]));
        assert!(!cancels_pairwise(&[1, 1], &[2]));
        assert!(!cancels_pairwise(&[1, 2], &[1, 3]));
    }

    #[test]
    fn mu3_examples() {
        assert_eq!(mu3(&[1, 1], &[2]), 1);
        assert_eq!(mu3(&[7, 2], &[5, 9]), 5);
        assert_eq!(mu3(&[4], &[6]), 1);
    }

    #[test]
    fn multiset_enumeration_counts() {
        for size in 1..4 {
            for n_max in 1..8 {
                let sets = multisets(size, n_max);
                assert_eq!(sets.len() as u128, multiset_count(size, n_max));
                assert!(sets.iter().all(|s| s.windows(2).all(|w| w[0] <= w[1])));
            }
        }
    }

    #[test]
    fn scan_small() {
        let res = scan(0.5, 3, 5).unwrap();
        assert_eq!(res.cancelling_nonzero, 0);
        assert!(res.cancelling > 0);
        assert!(res.min_divisor().unwrap() > 0.0);
        assert!(res.anomalies.is_empty());
        assert_eq!(res.combinations as u128, combination_count(3, 5));
    }

    #[test]
    fn scan_rejects() {
        assert!(matches!(scan(0.5, 2, 10), Err(Error::InvalidParam(_))));
        assert!(matches!(
            scan_with_budget(0.5, 4, 30, 1000),
            Err(Error::BudgetExceeded { budget: 1000, .. })
        ));
    }

    #[test]
    fn csv_export() {
        let res = scan(0.5, 3, 6).unwrap();
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("mu3,min_divisor,count"));
        assert_eq!(lines.count(), res.records.len());
        assert!(!text.contains('\r'));
    }

    #[test]
    fn power_law_fit_recovers_exponent() {
        let rec = DivisorRecord { m_indices: vec![], n_indices: vec![], value: 0.0, mu3: 0, cancels: false };
        let buckets: Vec<Bucket> = (1..10)
            .map(|k| Bucket {
                mu3: k,
                min_divisor: 0.3 * (k as f64).powf(-2.5),
                count: 1,
                argmin: rec.clone(),
            })
            .collect();
        let (g, a) = fit_power_law(&buckets).unwrap();
        assert_relative_eq!(g, 0.3, epsilon = 1e-12);
        assert_relative_eq!(a, 2.5, epsilon = 1e-12);
    }
}
