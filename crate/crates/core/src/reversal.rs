//! Backward transition kernel on unranked planar trees.
//!
//! Removing a well-chosen cherry from an (n+1)-leaf tree produced by the
//! generating/organizing process yields an n-leaf tree with exactly the
//! process' own n-leaf law. The kernel has the closed form
//! `P(t_{n+1} → t_n) = #t_n / #t_{n+1}` on compatible pairs, where `#t` is
//! the Catalan coefficient (the ranking count); [`verify_reversal`] checks
//! the resulting identity `P(T_n = t_n) = Σ P(T_{n+1} = t_{n+1}) · P(t_{n+1}
//! → t_n)` against full enumeration.

use std::collections::BTreeMap;

use crate::oracle::enumerate_planar_shapes;
use crate::probability::log_prob_planar;
use crate::trees::PlanarShape;
use crate::{Error, Result};

/// A (parent, child) pair under cherry removal.
#[derive(Clone, Debug)]
pub struct CherryRemoval {
    pub parent: PlanarShape,
    pub child: PlanarShape,
    pub compatible: bool,
}

impl CherryRemoval {
    pub fn new(parent: PlanarShape, child: PlanarShape) -> Result<Self> {
        let compatible = compatible(&child, &parent)?;
        Ok(CherryRemoval {
            parent,
            child,
            compatible,
        })
    }
}

/// True iff `t_n1` can be obtained from `t_n` by splitting one leaf —
/// equivalently, contracting some cherry of `t_n1` yields `t_n` (planar
/// equality).
pub fn compatible(t_n: &PlanarShape, t_n1: &PlanarShape) -> Result<bool> {
    if t_n.leaf_count() + 1 != t_n1.leaf_count() {
        return Err(Error::domain(format!(
            "leaf counts must differ by one (got {} and {})",
            t_n.leaf_count(),
            t_n1.leaf_count()
        )));
    }
    Ok(t_n1.with_each_cherry_removed().iter().any(|c| c == t_n))
}

/// The backward kernel `#t_n / #t_{n+1}` on compatible pairs, 0 otherwise.
pub fn reverse_kernel(t_n1: &PlanarShape, t_n: &PlanarShape) -> Result<f64> {
    if !compatible(t_n, t_n1)? {
        return Ok(0.0);
    }
    Ok(t_n.catalan_coefficient() as f64 / t_n1.catalan_coefficient() as f64)
}

/// Max residual of the reversal identity over all n-leaf planar shapes,
/// using full enumeration at `n` and `n+1`.
pub fn verify_reversal(n: usize, alpha: f64, beta: f64) -> Result<f64> {
    let smaller = enumerate_planar_shapes(n)?;
    let larger = enumerate_planar_shapes(n + 1)?;
    let p_larger: Vec<f64> = larger
        .iter()
        .map(|t| log_prob_planar(t, alpha, beta).map(|lp| lp.value()))
        .collect::<Result<_>>()?;
    let mut residual_max = 0.0f64;
    for t_n in &smaller {
        let direct = log_prob_planar(t_n, alpha, beta)?.value();
        let mut summed = 0.0;
        for (t_n1, p) in larger.iter().zip(p_larger.iter()) {
            summed += p * reverse_kernel(t_n1, t_n)?;
        }
        residual_max = residual_max.max((direct - summed).abs());
    }
    Ok(residual_max)
}

/// Row sums of the kernel over the enumerated n-leaf shapes, keyed by the
/// (n+1)-leaf parent's Newick encoding; each should be exactly 1.
pub fn kernel_row_sums(n: usize) -> Result<BTreeMap<String, f64>> {
    let smaller = enumerate_planar_shapes(n)?;
    let larger = enumerate_planar_shapes(n + 1)?;
    let mut out = BTreeMap::new();
    for t_n1 in &larger {
        let total: f64 = smaller
            .iter()
            .map(|t_n| reverse_kernel(t_n1, t_n))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum();
        out.insert(t_n1.to_newick(), total);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::TreeShape;

    fn left_comb3() -> PlanarShape {
        PlanarShape::from_newick("((,),);").unwrap()
    }

    fn right_comb(n: usize) -> PlanarShape {
        let mut s = "(,)".to_string();
        for _ in 3..=n {
            s = format!("(,{s})");
        }
        PlanarShape::from_newick(&format!("{s};")).unwrap()
    }

    #[test]
    fn cherry_is_compatible_with_both_three_leaf_shapes() {
        let cherry = PlanarShape::cherry();
        for t3 in enumerate_planar_shapes(3).unwrap() {
            assert!(compatible(&cherry, &t3).unwrap());
            assert!((reverse_kernel(&t3, &cherry).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn comb_orientation_matters() {
        assert!(!compatible(&left_comb3(), &right_comb(4)).unwrap());
        assert_eq!(reverse_kernel(&right_comb(4), &left_comb3()).unwrap(), 0.0);
        assert!(compatible(&right_comb(3), &right_comb(4)).unwrap());
    }

    #[test]
    fn balanced_parent_splits_evenly() {
        let balanced4 = TreeShape::fully_balanced(4).unwrap().to_planar();
        for child in balanced4.with_each_cherry_removed() {
            let k = reverse_kernel(&balanced4, &child).unwrap();
            assert!((k - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn leaf_count_mismatch_is_an_error() {
        assert!(compatible(&PlanarShape::cherry(), &right_comb(4)).is_err());
    }

    #[test]
    fn rows_sum_to_one() {
        for n in 2..=5 {
            for (key, total) in kernel_row_sums(n).unwrap() {
                assert!(
                    (total - 1.0).abs() < 1e-12,
                    "row {key} sums to {total} at n = {n}"
                );
            }
        }
    }

    #[test]
    fn reversal_identity_examples() {
        assert!(verify_reversal(3, 0.0, 0.0).unwrap() < 1e-12);
        assert!(verify_reversal(4, 1.0, 0.0).unwrap() < 1e-12);
        assert!(verify_reversal(5, -0.5, -0.5).unwrap() < 1e-12);
    }

    #[test]
    fn enumeration_cap_applies() {
        assert!(matches!(
            verify_reversal(8, 0.0, 0.0),
            Err(Error::EnumerationCap { .. })
        ));
    }
}
