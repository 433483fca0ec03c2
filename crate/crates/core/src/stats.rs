//! Distances between distributions and the chi-square goodness-of-fit test.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

const NORMALIZATION_SLACK: f64 = 1e-9;

/// Largest degrees of freedom with a stored critical value.
pub const MAX_TABLE_DF: usize = 100;

/// Total variation distance `½ Σ |p - q|` over the union of supports.
///
/// Both inputs are `(value, probability)` lists; each must sum to one.
pub fn tv_distance(p: &[(i64, f64)], q: &[(i64, f64)]) -> Result<f64> {
    for dist in [p, q] {
        let total: f64 = dist.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > NORMALIZATION_SLACK || dist.iter().any(|&(_, w)| w < 0.0) {
            return Err(Error::NotNormalized(total));
        }
    }
    let mut diff: BTreeMap<i64, f64> = BTreeMap::new();
    for &(v, w) in p {
        *diff.entry(v).or_default() += w;
    }
    for &(v, w) in q {
        *diff.entry(v).or_default() -= w;
    }
    Ok((0.5 * diff.values().map(|d| d.abs()).sum::<f64>()).min(1.0))
}

/// Total variation distance between an empirical law (counts per value)
/// and a reference law given on all values `0..` by `pmf`, including the
/// reference mass beyond the largest value listed.
pub fn tv_to_reference(counts: &BTreeMap<i64, u64>, pmf: impl Fn(i64) -> f64) -> f64 {
    let total: u64 = counts.values().sum();
    let max = counts.keys().copied().max().unwrap_or(0).max(0);
    let mut sum = 0.0;
    let mut covered = 0.0;
    for v in 0..=max {
        let q = pmf(v);
        covered += q;
        let p = counts.get(&v).copied().unwrap_or(0) as f64 / total as f64;
        sum += (p - q).abs();
    }
    for (_, &c) in counts.range(..0) {
        sum += c as f64 / total as f64;
    }
    sum += (1.0 - covered).max(0.0);
    (0.5 * sum).min(1.0)
}

/// Outcome of a chi-square goodness-of-fit computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    /// Critical values at levels 0.01 and 0.001 when `df <= 100`.
    pub critical_01: Option<f64>,
    pub critical_001: Option<f64>,
}

impl ChiSquare {
    /// Pass at level 0.001; `None` if the table has no entry.
    pub fn passes_001(&self) -> Option<bool> {
        self.critical_001.map(|c| self.statistic <= c)
    }

    pub fn passes_01(&self) -> Option<bool> {
        self.critical_01.map(|c| self.statistic <= c)
    }
}

/// Pearson's statistic for observed `counts` against model probabilities.
///
/// Cells are walked in order and merged into runs until every run expects
/// at least `min_cell` observations; a short run at the end joins the run
/// before it. Model mass not covered by `probs` is an extra cell with no
/// observations.
pub fn chi_square_gof(counts: &[u64], probs: &[f64], min_cell: f64) -> Result<ChiSquare> {
    if counts.len() != probs.len() {
        return Err(Error::OutOfRange("counts and probabilities differ in length".into()));
    }
    let total_p: f64 = probs.iter().sum();
    if total_p > 1.0 + NORMALIZATION_SLACK || probs.iter().any(|&p| p < 0.0) {
        return Err(Error::NotNormalized(total_p));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::TooFewSamples);
    }
    let mut cells: Vec<(f64, f64)> = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64, p * n as f64))
        .collect();
    let rest = (1.0 - total_p).max(0.0);
    if rest > NORMALIZATION_SLACK {
        cells.push((0.0, rest * n as f64));
    }
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let mut cur = (0.0, 0.0);
    for (o, e) in cells {
        cur.0 += o;
        cur.1 += e;
        if cur.1 >= min_cell {
            groups.push(cur);
            cur = (0.0, 0.0);
        }
    }
    if cur.1 > 0.0 || cur.0 > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += cur.0;
                last.1 += cur.1;
            }
            None => groups.push(cur),
        }
    }
    if groups.len() < 2 {
        return Err(Error::TooFewSamples);
    }
    let statistic = groups.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let df = groups.len() - 1;
    Ok(ChiSquare {
        statistic,
        df,
        critical_01: critical_value(df, 0.01),
        critical_001: critical_value(df, 0.001),
    })
}

fn table() -> &'static [[f64; 2]] {
    static TABLE: OnceLock<Vec<[f64; 2]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=MAX_TABLE_DF)
            .map(|df| {
                let dist = ChiSquared::new(df as f64).expect("positive df");
                [dist.inverse_cdf(0.99), dist.inverse_cdf(0.999)]
            })
            .collect()
    })
}

/// Upper critical value of the chi-square law with `df` degrees of freedom
/// at `level` 0.01 or 0.001.
pub fn critical_value(df: usize, level: f64) -> Option<f64> {
    if df == 0 || df > MAX_TABLE_DF {
        return None;
    }
    let row = table()[df - 1];
    if level == 0.01 {
        Some(row[0])
    } else if level == 0.001 {
        Some(row[1])
    } else {
        None
    }
}

/// Running sums for a sample mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Pearson correlation of two equally long samples.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        let p = [(0, 0.5), (1, 0.5)];
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&p, &[(2, 1.0)]).unwrap(), 1.0);
        assert!(matches!(tv_distance(&[(0, 0.7)], &p), Err(Error::NotNormalized(_))));
        // Pois(1) truncated at 10 and renormalized is within the tail mass.
        let pmf = |j: i64| crate::formulas::poisson_pmf(1.0, j as u64).unwrap();
        let mass: f64 = (0..=10).map(pmf).sum();
        let trunc: Vec<(i64, f64)> = (0..=10).map(|j| (j, pmf(j) / mass)).collect();
        let full: Vec<(i64, f64)> = (0..=10).map(|j| (j, pmf(j))).chain([(11, 1.0 - mass)]).collect();
        assert!(tv_distance(&trunc, &full).unwrap() <= 1.0 - mass + 1e-15);
    }

    #[test]
    fn tv_against_reference() {
        let mut counts = BTreeMap::new();
        counts.insert(0, 1u64);
        assert!((tv_to_reference(&counts, |v| if v == 0 { 0.25 } else if v == 1 { 0.75 } else { 0.0 }) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn chi_square_examples() {
        let c = chi_square_gof(&[25, 25, 25, 25], &[0.25; 4], 5.0).unwrap();
        assert_eq!(c.statistic, 0.0);
        assert_eq!(c.df, 3);
        assert_eq!(chi_square_gof(&[10], &[1.0], 5.0), Err(Error::TooFewSamples));
        // 2 expected per cell: merged into pairs
        let m = chi_square_gof(&[2, 2, 2, 2], &[0.25; 4], 4.0).unwrap();
        assert_eq!(m.df, 1);
        assert_eq!(m.statistic, 0.0);
    }

    #[test]
    fn stored_critical_values() {
        assert!((critical_value(1, 0.01).unwrap() - 6.634_896_601).abs() < 1e-6);
        assert!((critical_value(1, 0.001).unwrap() - 10.827_566_17).abs() < 1e-6);
        assert!((critical_value(10, 0.001).unwrap() - 29.588_298_44).abs() < 1e-6);
        assert!((critical_value(100, 0.01).unwrap() - 135.806_722_8).abs() < 1e-5);
        assert_eq!(critical_value(101, 0.01), None);
        assert_eq!(critical_value(0, 0.01), None);
    }
}
