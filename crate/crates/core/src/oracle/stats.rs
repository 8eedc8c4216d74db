//! Goodness-of-fit machinery for validating the samplers: Pearson chi-square
//! (one-sample against an exact distribution, and two-sample homogeneity)
//! and the Kolmogorov–Smirnov test.

use std::collections::BTreeMap;

use crate::numerics::regularized_gamma_q;
use crate::oracle::ExactDistribution;
use crate::{Error, Result};

/// Outcome of a chi-square test.
#[derive(Clone, Copy, Debug)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pool cells with expected count below 5 (ascending expected count, ties by
/// key order) and return the pooled `(observed, expected)` pairs.
fn pool_cells(mut cells: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    // cells arrive keyed in deterministic order; sort ascending by expected,
    // stable so equal expectations keep key order
    cells.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite expectations"));
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (obs, exp) in cells {
        acc.0 += obs;
        acc.1 += exp;
        if acc.1 >= 5.0 {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    pooled
}

fn pearson(pooled: &[(f64, f64)]) -> Result<ChiSquare> {
    if pooled.len() < 2 {
        return Err(Error::EmptySupport);
    }
    let statistic: f64 = pooled
        .iter()
        .map(|(obs, exp)| {
            let d = obs - exp;
            d * d / exp
        })
        .sum();
    let dof = pooled.len() - 1;
    let p_value = regularized_gamma_q(dof as f64 / 2.0, statistic / 2.0)?;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value,
    })
}

/// Pearson goodness-of-fit of observed counts against an exact distribution.
///
/// Every observed key must be covered by the expected support; expected
/// counts below 5 are pooled in ascending order of expected count.
pub fn chi_square_gof(
    observed: &BTreeMap<String, u64>,
    expected: &ExactDistribution,
) -> Result<ChiSquare> {
    let m: u64 = observed.values().sum();
    if m < 1000 {
        return Err(Error::invalid(format!(
            "chi-square needs at least 1000 observations, got {m}"
        )));
    }
    for key in observed.keys() {
        if !expected.probs.contains_key(key) {
            return Err(Error::domain(format!(
                "observed tree `{key}` has zero probability under the expected distribution"
            )));
        }
    }
    if expected.probs.is_empty() {
        return Err(Error::EmptySupport);
    }
    let cells: Vec<(f64, f64)> = expected
        .probs
        .iter()
        .map(|(key, lp)| {
            let obs = observed.get(key).copied().unwrap_or(0) as f64;
            (obs, lp.value() * m as f64)
        })
        .collect();
    pearson(&pool_cells(cells))
}

/// Two-sample chi-square test of homogeneity over a shared (string-keyed)
/// support; cells are pooled by their combined count until both groups'
/// expected counts reach 5.
pub fn chi_square_homogeneity(
    sample_a: &BTreeMap<String, u64>,
    sample_b: &BTreeMap<String, u64>,
) -> Result<ChiSquare> {
    let ra: u64 = sample_a.values().sum();
    let rb: u64 = sample_b.values().sum();
    if ra == 0 || rb == 0 {
        return Err(Error::EmptySupport);
    }
    let total = (ra + rb) as f64;
    let mut keys: Vec<&String> = sample_a.keys().chain(sample_b.keys()).collect();
    keys.sort();
    keys.dedup();
    // (combined count, obs_a, obs_b) per cell
    let mut cells: Vec<(f64, f64, f64)> = keys
        .iter()
        .map(|k| {
            let a = sample_a.get(*k).copied().unwrap_or(0) as f64;
            let b = sample_b.get(*k).copied().unwrap_or(0) as f64;
            (a + b, a, b)
        })
        .collect();
    cells.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite counts"));
    let min_row = ra.min(rb) as f64;
    // pool until the smaller group's expected count reaches 5
    let mut pooled: Vec<(f64, f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0, 0.0);
    for (c, a, b) in cells {
        acc.0 += c;
        acc.1 += a;
        acc.2 += b;
        if acc.0 * min_row / total >= 5.0 {
            pooled.push(acc);
            acc = (0.0, 0.0, 0.0);
        }
    }
    if acc.0 > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
                last.2 += acc.2;
            }
            None => pooled.push(acc),
        }
    }
    if pooled.len() < 2 {
        return Err(Error::EmptySupport);
    }
    let statistic: f64 = pooled
        .iter()
        .map(|(c, a, b)| {
            let ea = c * ra as f64 / total;
            let eb = c * rb as f64 / total;
            (a - ea).powi(2) / ea + (b - eb).powi(2) / eb
        })
        .sum();
    let dof = pooled.len() - 1;
    let p_value = regularized_gamma_q(dof as f64 / 2.0, statistic / 2.0)?;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value,
    })
}

/// Kolmogorov–Smirnov statistic from CDF values at the sorted sample points.
pub fn ks_statistic(cdf_at_sorted_samples: &[f64]) -> f64 {
    let m = cdf_at_sorted_samples.len() as f64;
    cdf_at_sorted_samples
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let upper = (i + 1) as f64 / m - f;
            let lower = f - i as f64 / m;
            upper.max(lower)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS p-value with the usual finite-sample correction
/// `λ = (√m + 0.12 + 0.11/√m) D`.
pub fn ks_p_value(d: f64, m: usize) -> f64 {
    let sm = (m as f64).sqrt();
    let lambda = (sm + 0.12 + 0.11 / sm) * d;
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64).powi(2) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_distribution;
    use crate::trees::Resolution;

    fn uniform6_expected() -> ExactDistribution {
        exact_distribution(4, 0.0, 0.0, Resolution::RankedPlanar).unwrap()
    }

    fn counts_from(expected: &ExactDistribution, raw: &[u64]) -> BTreeMap<String, u64> {
        expected
            .probs
            .keys()
            .cloned()
            .zip(raw.iter().copied())
            .collect()
    }

    #[test]
    fn proportional_counts_give_statistic_zero() {
        let expected = uniform6_expected();
        let observed = counts_from(&expected, &[2000; 6]);
        let r = chi_square_gof(&observed, &expected).unwrap();
        assert!(r.statistic.abs() < 1e-9);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert_eq!(r.dof, 5);
    }

    #[test]
    fn supplementary_demo_counts_fit_uniform() {
        let expected = uniform6_expected();
        let observed = counts_from(&expected, &[1700, 1666, 1625, 1664, 1683, 1662]);
        let r = chi_square_gof(&observed, &expected).unwrap();
        assert!((r.statistic - 1.886).abs() < 1e-9);
        assert!((r.p_value - 0.864_683_56).abs() < 1e-6);
        assert!(r.p_value > 0.05);
    }

    #[test]
    fn extreme_misfit_is_rejected() {
        let expected = uniform6_expected();
        let observed = counts_from(&expected, &[10_000, 0, 0, 0, 0, 0]);
        let r = chi_square_gof(&observed, &expected).unwrap();
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn gof_input_validation() {
        let expected = uniform6_expected();
        let tiny = counts_from(&expected, &[10; 6]);
        assert!(chi_square_gof(&tiny, &expected).is_err());
        let mut alien = counts_from(&expected, &[500; 6]);
        alien.insert("(nonsense);".to_string(), 500);
        assert!(chi_square_gof(&alien, &expected).is_err());
    }

    #[test]
    fn pooling_merges_small_cells() {
        // four cells of expected 1000·{0.001, 0.002, 0.003, 0.994}:
        // the three small ones pool together (expected 6 ≥ 5)
        let cells = vec![(1.0, 1.0), (3.0, 2.0), (2.0, 3.0), (994.0, 994.0)];
        let pooled = pool_cells(cells);
        assert_eq!(pooled.len(), 2);
        assert_eq!(pooled[0], (6.0, 6.0));
    }

    #[test]
    fn homogeneity_detects_same_and_different() {
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for (k, ca, cb) in [("x", 5000u64, 5050u64), ("y", 3000, 2980), ("z", 2000, 1970)] {
            a.insert(k.to_string(), ca);
            b.insert(k.to_string(), cb);
        }
        let r = chi_square_homogeneity(&a, &b).unwrap();
        assert!(r.p_value > 0.05, "p = {}", r.p_value);
        b.insert("x".to_string(), 8000);
        let r = chi_square_homogeneity(&a, &b).unwrap();
        assert!(r.p_value < 1e-6);
        assert!(chi_square_homogeneity(&a, &BTreeMap::new()).is_err());
    }

    #[test]
    fn ks_statistic_and_tail() {
        // perfectly uniform quantiles at midpoints: D = 1/(2m)
        let m = 100;
        let cdfs: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
        let d = ks_statistic(&cdfs);
        assert!((d - 0.005).abs() < 1e-12);
        assert!(ks_p_value(d, m) > 0.999);
        // gross mismatch
        let cdfs: Vec<f64> = (0..m).map(|i| (i as f64 * 0.5) / m as f64).collect();
        let d = ks_statistic(&cdfs);
        assert!(d > 0.4);
        assert!(ks_p_value(d, m) < 1e-6);
    }
}
