//! Brute-force ground truth: exhaustive enumeration of ranked planar trees,
//! exact distributions at every resolution by fiber aggregation, numerical
//! quadrature, and statistical tests.
//!
//! Everything here is deliberately independent of the closed forms it
//! validates: enumeration goes through the permutation bijection, and
//! quadrature never touches the Gamma identity.

mod quadrature;
pub mod stats;

pub use quadrature::{
    aldous_split_pmf_quadrature, beta_cdf_sorted, quadrature_check, tanh_sinh_unit, UnitPoint,
};

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::probability::log_prob_ranked_planar;
use crate::trees::{PlanarShape, RankedPlanarTree, Resolution, SplittingPermutation};
use crate::{Error, LogProb, Result};

/// Hard cap on exhaustive enumeration: `(n-1)!` trees, 5040 at `n = 8`.
pub const ENUMERATION_CAP: usize = 8;

/// All `(n-1)!` ranked planar trees on `n` leaves, via the permutation
/// bijection.
pub fn enumerate_ranked_planar(n: usize) -> Result<Vec<RankedPlanarTree>> {
    if n < 1 || n > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    if n == 1 {
        return Ok(vec![RankedPlanarTree::single_leaf()]);
    }
    Ok((1..n as u32)
        .permutations(n - 1)
        .map(|p| {
            SplittingPermutation::new(p)
                .expect("permutations are permutations")
                .to_tree()
        })
        .collect())
}

/// All distinct planar shapes on `n` leaves (Catalan-many).
pub fn enumerate_planar_shapes(n: usize) -> Result<Vec<PlanarShape>> {
    let mut seen: BTreeMap<String, PlanarShape> = BTreeMap::new();
    for t in enumerate_ranked_planar(n)? {
        let ps = t.forget_ranks();
        seen.entry(ps.to_newick()).or_insert(ps);
    }
    Ok(seen.into_values().collect())
}

/// An exact distribution over the trees of one resolution, keyed by their
/// canonical Newick encoding.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    pub resolution: Resolution,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub probs: BTreeMap<String, LogProb>,
}

impl ExactDistribution {
    /// Σ of the probabilities (should be 1).
    pub fn total(&self) -> f64 {
        self.probs.values().map(|p| p.value()).sum()
    }

    pub fn get(&self, key: &str) -> Option<LogProb> {
        self.probs.get(key).copied()
    }

    /// CSV rows `encoding,probability_log_e,probability_mantissa,probability_exp10`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "encoding,probability_log_e,probability_mantissa,probability_exp10\n",
        );
        for (key, lp) in &self.probs {
            let (m, e) = lp.mantissa_exp10();
            out.push_str(&format!("\"{key}\",{},{m},{e}\n", lp.ln()));
        }
        out
    }
}

/// Exact distribution at `resolution` by summing the ranked-planar law over
/// the fibers of the projection.
pub fn exact_distribution(
    n: usize,
    alpha: f64,
    beta: f64,
    resolution: Resolution,
) -> Result<ExactDistribution> {
    let mut probs: BTreeMap<String, LogProb> = BTreeMap::new();
    for t in enumerate_ranked_planar(n)? {
        let p = log_prob_ranked_planar(&t, alpha, beta)?;
        let key = match resolution {
            Resolution::RankedPlanar => t.to_newick(),
            Resolution::Planar => t.forget_ranks().to_newick(),
            Resolution::Ranked => t.forget_planarity().to_newick(),
            Resolution::Shape => t.shape().to_newick(),
        };
        probs
            .entry(key)
            .and_modify(|acc| *acc = acc.add(p))
            .or_insert(p);
    }
    Ok(ExactDistribution {
        resolution,
        n,
        alpha,
        beta,
        probs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn enumeration_counts_are_factorials() {
        for (n, want) in [(1usize, 1usize), (2, 1), (4, 6), (5, 24)] {
            let trees = enumerate_ranked_planar(n).unwrap();
            assert_eq!(trees.len(), want);
            let distinct: BTreeSet<String> = trees.iter().map(|t| t.to_newick()).collect();
            assert_eq!(distinct.len(), want, "trees must be distinct at n = {n}");
        }
        assert!(matches!(
            enumerate_ranked_planar(9),
            Err(Error::EnumerationCap { .. })
        ));
        assert!(enumerate_ranked_planar(0).is_err());
    }

    #[test]
    fn planar_shape_counts_are_catalan() {
        let catalan = [1usize, 1, 2, 5, 14, 42, 132, 429];
        for (i, want) in catalan.iter().enumerate() {
            let n = i + 1;
            assert_eq!(
                enumerate_planar_shapes(n).unwrap().len(),
                *want,
                "n = {n}"
            );
        }
    }

    #[test]
    fn exact_distribution_demo_values() {
        let d = exact_distribution(4, 0.0, 0.0, Resolution::Planar).unwrap();
        assert_eq!(d.probs.len(), 5);
        let values: Vec<f64> = d.probs.values().map(|p| p.value()).collect();
        let third = values.iter().filter(|v| (**v - 1.0 / 3.0).abs() < 1e-12).count();
        let sixth = values.iter().filter(|v| (**v - 1.0 / 6.0).abs() < 1e-12).count();
        assert_eq!((third, sixth), (1, 4));

        let d = exact_distribution(4, 0.0, 0.0, Resolution::Shape).unwrap();
        assert_eq!(d.probs.len(), 2);
        let mut values: Vec<f64> = d.probs.values().map(|p| p.value()).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((values[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((values[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_distribution_single_tree_cases() {
        for res in [
            Resolution::RankedPlanar,
            Resolution::Planar,
            Resolution::Ranked,
            Resolution::Shape,
        ] {
            let d = exact_distribution(2, 1.7, -0.4, res).unwrap();
            assert_eq!(d.probs.len(), 1);
            assert!((d.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_distribution_normalizes_on_grid() {
        for &(alpha, beta) in &[(0.0, 0.0), (-0.5, -0.5), (1.0, 0.0), (0.0, 2.0), (3.0, 3.0)] {
            for n in 2..=6usize {
                for res in [
                    Resolution::RankedPlanar,
                    Resolution::Planar,
                    Resolution::Ranked,
                    Resolution::Shape,
                ] {
                    let d = exact_distribution(n, alpha, beta, res).unwrap();
                    assert!(
                        (d.total() - 1.0).abs() < 1e-10,
                        "n={n} alpha={alpha} beta={beta} {res:?} total={}",
                        d.total()
                    );
                }
            }
        }
    }

    #[test]
    fn csv_export_has_documented_columns() {
        let d = exact_distribution(3, 0.0, 0.0, Resolution::RankedPlanar).unwrap();
        let csv = d.to_csv();
        assert!(csv.starts_with(
            "encoding,probability_log_e,probability_mantissa,probability_exp10\n"
        ));
        assert_eq!(csv.trim_end().lines().count(), 3); // header + 2 trees
    }
}
