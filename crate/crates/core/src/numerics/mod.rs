//! Special functions, log-space arithmetic, and primitive samplers shared by
//! all other modules.
//!
//! Everything here that does real arithmetic is generic over the scalar type
//! through the [`Scalar`] trait (`f32`, `f64`, ...); the rest of the crate
//! instantiates it at [`crate::Real`].

mod logreal;
mod rng;
mod special;

pub use logreal::LogReal;
pub use rng::{sample_beta, stream, StreamRng};
pub use special::{
    ln_beta, ln_binomial, ln_factorial, ln_gamma, log_add, log_sum_exp, regularized_gamma_q,
    Scalar, LN_2,
};

use crate::{Error, Result};

/// Locate the cell of a partition of `[0,1]` containing `u`.
///
/// `breakpoints` lists the full cell boundaries `0 = b_0 < b_1 < … < b_k = 1`,
/// defining cells `[b_j, b_{j+1})` with the last cell closed at 1. A point
/// equal to a breakpoint belongs to the cell on its right, so replays are
/// bit-reproducible.
pub fn pick_interval(breakpoints: &[f64], u: f64) -> Result<usize> {
    if breakpoints.len() < 2 {
        return Err(Error::invalid("partition needs at least two breakpoints"));
    }
    if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
        return Err(Error::invalid("breakpoints must start at 0 and end at 1"));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("breakpoints must be strictly increasing"));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain(format!("u = {u} outside [0,1]")));
    }
    let cells = breakpoints.len() - 1;
    let idx = breakpoints.partition_point(|&b| b <= u);
    // idx counts boundaries <= u; u = 1 lands past the end and belongs to the
    // last (closed) cell.
    Ok((idx - 1).min(cells - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pick_interval_basic() {
        let bp = [0.0, 0.3, 1.0];
        assert_eq!(pick_interval(&bp, 0.2).unwrap(), 0);
        assert_eq!(pick_interval(&bp, 0.3).unwrap(), 1);
        assert_eq!(pick_interval(&bp, 0.0).unwrap(), 0);
        assert_eq!(pick_interval(&bp, 1.0).unwrap(), 1);
    }

    #[test]
    fn pick_interval_single_cell() {
        assert_eq!(pick_interval(&[0.0, 1.0], 0.999).unwrap(), 0);
    }

    #[test]
    fn pick_interval_rejects_out_of_range() {
        assert!(pick_interval(&[0.0, 1.0], 1.5).is_err());
        assert!(pick_interval(&[0.0, 1.0], -0.1).is_err());
        assert!(pick_interval(&[0.0, 1.0], f64::NAN).is_err());
    }

    #[test]
    fn pick_interval_rejects_bad_partition() {
        assert!(pick_interval(&[0.0], 0.5).is_err());
        assert!(pick_interval(&[0.1, 1.0], 0.5).is_err());
        assert!(pick_interval(&[0.0, 0.9], 0.5).is_err());
        assert!(pick_interval(&[0.0, 0.5, 0.5, 1.0], 0.2).is_err());
    }
}
