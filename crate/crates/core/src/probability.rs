//! Exact log-probabilities of trees at all four resolutions, closed-form
//! special cases and limits, and the split distribution of the recursive
//! Beta-splitting construction.
//!
//! The master formula: a ranked planar tree τ with split profile
//! `(n_i^L, n_i^R)` over its internal nodes has
//!
//! ```text
//! P(τ) = ∏_i B(n_i^L + α + 1, n_i^R + β + 1) / B(α + 1, β + 1)
//! ```
//!
//! Coarser resolutions multiply by the fiber size (Catalan coefficient,
//! Tajima's `2^(n-1-c)`, or `2^(n-1-s)`) when α = β; for α ≠ β the
//! non-planar resolutions sum the formula over all planar embeddings, which
//! is exponential in `n` and therefore capped.

use crate::numerics::{ln_beta, log_sum_exp, LogReal, LN_2};
use crate::trees::{PlanarShape, RankedPlanarTree, RankedShape, TreeShape};
use crate::{Error, LogProb, Result};

/// Largest `n` for which α ≠ β coarse-resolution probabilities enumerate
/// their `2^(n-1-c)` or `2^(n-1-s)` planar embeddings by default.
pub const DEFAULT_EMBEDDING_CAP: usize = 20;

/// The `(n_L, n_R)` pairs of a tree's internal nodes: in rank order for
/// ranked trees, in canonical pre-order otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitProfile(Vec<(u32, u32)>);

impl SplitProfile {
    pub fn of_ranked_planar(t: &RankedPlanarTree) -> Self {
        SplitProfile(t.split_pairs_by_rank())
    }

    pub fn of_planar(t: &PlanarShape) -> Self {
        SplitProfile(t.split_pairs())
    }

    pub fn of_ranked_shape(t: &RankedShape) -> Self {
        SplitProfile(t.split_pairs())
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }
}

fn check_params(alpha: f64, beta: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= -1.0 || !beta.is_finite() || beta <= -1.0 {
        return Err(Error::domain(format!(
            "tree probabilities require finite alpha, beta > -1 (got {alpha}, {beta})"
        )));
    }
    Ok(())
}

/// `ln ∏ B(n_L+α+1, n_R+β+1)/B(α+1, β+1)` over a split profile.
fn ln_prob_pairs(pairs: &[(u32, u32)], alpha: f64, beta: f64) -> f64 {
    let base = ln_beta(alpha + 1.0, beta + 1.0).expect("validated params");
    pairs
        .iter()
        .map(|&(l, r)| {
            ln_beta(l as f64 + alpha + 1.0, r as f64 + beta + 1.0).expect("validated params")
                - base
        })
        .sum()
}

/// Probability of a ranked planar tree (the finest resolution).
pub fn log_prob_ranked_planar(t: &RankedPlanarTree, alpha: f64, beta: f64) -> Result<LogProb> {
    check_params(alpha, beta)?;
    let profile = SplitProfile::of_ranked_planar(t);
    Ok(LogReal::from_ln(ln_prob_pairs(profile.pairs(), alpha, beta)))
}

/// Probability of an unranked planar tree: the ranked-planar formula times
/// the Catalan coefficient (the number of valid rankings).
pub fn log_prob_planar(t: &PlanarShape, alpha: f64, beta: f64) -> Result<LogProb> {
    check_params(alpha, beta)?;
    let ln = t.ln_catalan_coefficient() + ln_prob_pairs(&t.split_pairs(), alpha, beta);
    Ok(LogReal::from_ln(ln))
}

/// Probability of a ranked non-planar tree.
///
/// For α = β every planar embedding has the same probability, giving the
/// closed form with Tajima's factor `2^(n-1-c)`. For α ≠ β all
/// `2^(n-1-c)` ranked planar embeddings are enumerated and summed, capped
/// at [`DEFAULT_EMBEDDING_CAP`] leaves.
pub fn log_prob_ranked_shape(t: &RankedShape, alpha: f64, beta: f64) -> Result<LogProb> {
    log_prob_ranked_shape_capped(t, alpha, beta, DEFAULT_EMBEDDING_CAP)
}

/// [`log_prob_ranked_shape`] with an explicit embedding-enumeration cap.
pub fn log_prob_ranked_shape_capped(
    t: &RankedShape,
    alpha: f64,
    beta: f64,
    cap: usize,
) -> Result<LogProb> {
    check_params(alpha, beta)?;
    if alpha == beta {
        let n = t.leaf_count();
        let free = n - 1 - t.cherry_count();
        let ln = free as f64 * LN_2 + ln_prob_pairs(&t.split_pairs(), alpha, beta);
        return Ok(LogReal::from_ln(ln));
    }
    let n = t.leaf_count();
    if n > cap {
        return Err(Error::UnsupportedScale(format!(
            "alpha != beta ranked-shape probability sums 2^(n-1-c) embeddings; \
             n = {n} exceeds the cap of {cap}"
        )));
    }
    let ln = log_sum_exp(
        t.planar_embeddings()
            .iter()
            .map(|e| ln_prob_pairs(&e.split_pairs_by_rank(), alpha, beta)),
    );
    Ok(LogReal::from_ln(ln))
}

/// Probability of an unranked non-planar tree (phylogenetic tree shape).
///
/// For α = β: `2^(n-1-s)` times the probability of any planar embedding.
/// For α ≠ β all distinct planar embeddings are enumerated, capped as for
/// [`log_prob_ranked_shape`].
pub fn log_prob_shape(t: &TreeShape, alpha: f64, beta: f64) -> Result<LogProb> {
    log_prob_shape_capped(t, alpha, beta, DEFAULT_EMBEDDING_CAP)
}

/// [`log_prob_shape`] with an explicit embedding-enumeration cap.
pub fn log_prob_shape_capped(
    t: &TreeShape,
    alpha: f64,
    beta: f64,
    cap: usize,
) -> Result<LogProb> {
    check_params(alpha, beta)?;
    if alpha == beta {
        let n = t.leaf_count();
        let free = n - 1 - t.iso_split_count();
        let planar = log_prob_planar(&t.to_planar(), alpha, beta)?;
        return Ok(LogReal::from_ln(free as f64 * LN_2 + planar.ln()));
    }
    let n = t.leaf_count();
    if n > cap {
        return Err(Error::UnsupportedScale(format!(
            "alpha != beta shape probability sums 2^(n-1-s) embeddings; \
             n = {n} exceeds the cap of {cap}"
        )));
    }
    let ln = log_sum_exp(
        t.planar_embeddings()
            .iter()
            .map(|e| e.ln_catalan_coefficient() + ln_prob_pairs(&e.split_pairs(), alpha, beta)),
    );
    Ok(LogReal::from_ln(ln))
}

// ---------------------------------------------------------------------------
// Closed forms at β ∈ {−1, 0, +∞}
// ---------------------------------------------------------------------------

/// The three β values of the comb/balanced closed forms (α = β throughout).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaCase {
    MinusOne,
    Zero,
    Infinity,
}

impl BetaCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            BetaCase::MinusOne => "-1",
            BetaCase::Zero => "0",
            BetaCase::Infinity => "inf",
        }
    }
}

/// Probability that the process produces the fully unbalanced tree shape
/// (the comb) on `n` leaves: 1 at β = −1, `2^(n-2)/(n-1)!` at β = 0,
/// `2^-(n-2)(n-3)/2` at β = +∞.
pub fn log_prob_comb_shape(n: usize, case: BetaCase) -> Result<LogProb> {
    if n < 2 {
        return Err(Error::domain("comb shape needs n >= 2".to_string()));
    }
    let ln = match case {
        BetaCase::MinusOne => 0.0,
        BetaCase::Zero => (n as f64 - 2.0) * LN_2 - crate::numerics::ln_factorial(n as u64 - 1),
        BetaCase::Infinity => {
            let e = ((n as u64 - 2) * (n as u64 - 3)) / 2;
            -(e as f64) * LN_2
        }
    };
    Ok(LogReal::from_ln(ln))
}

/// Probability of the fully balanced tree shape on `n = 2^N` leaves:
/// `(n-1)! / ∏_k (n/2^k - 1)^(2^k)` times the ranked-planar probability of
/// one balanced tree (`1/(n-1)!` at β = 0, `2^(-n(N-2)-2)` at β = +∞).
pub fn log_prob_balanced_shape(n: usize, case: BetaCase) -> Result<LogProb> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::domain(format!(
            "balanced shape needs n a power of two >= 2, got {n}"
        )));
    }
    let big_n = n.trailing_zeros() as i64; // N = log2 n
    if case == BetaCase::MinusOne {
        // the β → −1 limit is a comb with probability one; the balanced
        // shape coincides with it only at n = 2
        return Ok(if n == 2 { LogReal::one() } else { LogReal::zero() });
    }
    // Σ_k 2^k ln(n/2^k − 1), the log of the ranking-count denominator
    let ln_denominator: f64 = (0..big_n)
        .map(|k| {
            let count = (n >> k) as f64 - 1.0;
            (1u64 << k) as f64 * count.ln()
        })
        .sum();
    let ln_fact = crate::numerics::ln_factorial(n as u64 - 1);
    let ln_ranked_planar = match case {
        BetaCase::Zero => -ln_fact,
        BetaCase::Infinity => -((n as i64 * (big_n - 2) + 2) as f64) * LN_2,
        BetaCase::MinusOne => unreachable!(),
    };
    Ok(LogReal::from_ln(ln_fact - ln_denominator + ln_ranked_planar))
}

/// β → +∞ limit of the ranked planar probability:
/// `∏ 2^-(n_L + n_R)`.
pub fn log_prob_ranked_planar_limit_inf(t: &RankedPlanarTree) -> LogProb {
    let s: u64 = t
        .split_pairs_by_rank()
        .iter()
        .map(|&(l, r)| (l + r) as u64)
        .sum();
    LogReal::from_ln(-(s as f64) * LN_2)
}

/// β → +∞ limit of the planar probability.
pub fn log_prob_planar_limit_inf(t: &PlanarShape) -> LogProb {
    let s: u64 = t.split_pairs().iter().map(|&(l, r)| (l + r) as u64).sum();
    LogReal::from_ln(t.ln_catalan_coefficient() - (s as f64) * LN_2)
}

/// β → +∞ limit of the ranked non-planar probability (α = β in the limit, so
/// the Tajima factor applies).
pub fn log_prob_ranked_shape_limit_inf(t: &RankedShape) -> LogProb {
    let s: u64 = t.split_pairs().iter().map(|&(l, r)| (l + r) as u64).sum();
    let free = t.leaf_count() - 1 - t.cherry_count();
    LogReal::from_ln((free as f64 - s as f64) * LN_2)
}

/// β → +∞ limit of the shape probability.
pub fn log_prob_shape_limit_inf(t: &TreeShape) -> LogProb {
    let free = t.leaf_count() - 1 - t.iso_split_count();
    let planar = log_prob_planar_limit_inf(&t.to_planar());
    LogReal::from_ln(free as f64 * LN_2 + planar.ln())
}

/// β → −1 limit at the planar resolutions: each of the `2^(n-2)` planar
/// combs occurs with probability `2^-(n-2)`; everything else has
/// probability 0.
pub fn log_prob_planar_limit_minus_one(is_comb: bool, n: usize) -> LogProb {
    if !is_comb {
        return LogReal::zero();
    }
    if n <= 2 {
        return LogReal::one();
    }
    LogReal::from_ln(-((n as f64) - 2.0) * LN_2)
}

/// β → −1 limit at the non-planar resolutions: the comb is certain.
pub fn log_prob_shape_limit_minus_one(is_comb: bool) -> LogProb {
    if is_comb {
        LogReal::one()
    } else {
        LogReal::zero()
    }
}

// ---------------------------------------------------------------------------
// Integer and half-integer α = β closed forms
// ---------------------------------------------------------------------------

/// α = β a non-negative integer:
/// `P(τ) = ∏ (n_L+β)! (n_R+β)! (2β+1)! / [(n_L+n_R+2β+1)! (β!)²]`.
pub fn log_prob_integer_beta(t: &RankedPlanarTree, beta: u32) -> LogProb {
    use crate::numerics::ln_factorial as lf;
    let b = beta as u64;
    let ln: f64 = t
        .split_pairs_by_rank()
        .iter()
        .map(|&(l, r)| {
            let (l, r) = (l as u64, r as u64);
            lf(l + b) + lf(r + b) + lf(2 * b + 1) - lf(l + r + 2 * b + 1) - 2.0 * lf(b)
        })
        .sum();
    LogReal::from_ln(ln)
}

/// α = β = b − 1/2 with b a non-negative integer, via
/// `Γ(β+1/2) = (2β)!/(2^{2β} β!) √π`:
/// `P(τ) = ∏ (2n_L+2b)! (2n_R+2b)! (b!)² /
///         [4^{n_L+n_R} (n_L+b)! (n_R+b)! (n_L+n_R+2b)! (2b)!]`.
pub fn log_prob_half_integer(t: &RankedPlanarTree, b: u32) -> LogProb {
    use crate::numerics::ln_factorial as lf;
    let b = b as u64;
    let ln4 = 2.0 * LN_2;
    let ln: f64 = t
        .split_pairs_by_rank()
        .iter()
        .map(|&(l, r)| {
            let (l, r) = (l as u64, r as u64);
            lf(2 * l + 2 * b) + lf(2 * r + 2 * b) + 2.0 * lf(b)
                - (l + r) as f64 * ln4
                - lf(l + b)
                - lf(r + b)
                - lf(l + r + 2 * b)
                - lf(2 * b)
        })
        .sum();
    LogReal::from_ln(ln)
}

// ---------------------------------------------------------------------------
// The recursive-construction split distribution
// ---------------------------------------------------------------------------

/// Split distribution `q_n^β` of the recursive Beta-splitting construction:
/// the probability that the root of an `n`-leaf tree sends `i` leaves left,
/// `q(i) ∝ C(n,i) B(i+β+1, n-i+β+1)`, normalized over `i ∈ 1..n-1`.
///
/// The normalizer is the same integral as the numerators after binomial
/// expansion of `1 - x^n - (1-x)^n`, so it is evaluated termwise through the
/// log-Beta identity; this stays finite on the whole β > −2 range, where the
/// naive three-term split of the normalizing integral diverges for β ≤ −1.
pub fn aldous_split_pmf(n: usize, beta: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::domain("split distribution needs n >= 2".to_string()));
    }
    if !beta.is_finite() || beta <= -2.0 {
        return Err(Error::domain(format!(
            "split distribution requires finite beta > -2, got {beta}"
        )));
    }
    let terms: Vec<f64> = (1..n)
        .map(|i| {
            crate::numerics::ln_binomial(n as u64, i as u64)
                + ln_beta(i as f64 + beta + 1.0, (n - i) as f64 + beta + 1.0)
                    .expect("arguments positive for beta > -2")
        })
        .collect();
    let ln_norm = log_sum_exp(terms.iter().copied());
    let mut q: Vec<f64> = terms.iter().map(|t| (t - ln_norm).exp()).collect();
    // enforce exact symmetry q(i) = q(n-i)
    let k = q.len();
    for i in 0..k / 2 {
        let sym = q[i].max(q[k - 1 - i]);
        q[i] = sym;
        q[k - 1 - i] = sym;
    }
    let total: f64 = q.iter().sum();
    for v in &mut q {
        *v /= total;
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Table of comb/balanced probabilities
// ---------------------------------------------------------------------------

/// One cell pair of the comb/balanced probability table.
#[derive(Clone, Copy, Debug)]
pub struct Table1Entry {
    pub beta: BetaCase,
    pub n: usize,
    pub comb: LogProb,
    pub balanced: LogProb,
}

/// Comb and fully balanced shape probabilities for
/// n ∈ {4, 8, 32, 1024} and β ∈ {−1, 0, +∞}.
pub fn table1_entries() -> Vec<Table1Entry> {
    let mut out = Vec::new();
    for beta in [BetaCase::MinusOne, BetaCase::Zero, BetaCase::Infinity] {
        for n in [4usize, 8, 32, 1024] {
            out.push(Table1Entry {
                beta,
                n,
                comb: log_prob_comb_shape(n, beta).expect("n >= 2"),
                balanced: log_prob_balanced_shape(n, beta).expect("n power of two"),
            });
        }
    }
    out
}
