//! Numerical integration on the unit interval, used as ground truth against
//! the Beta-identity evaluations. Nothing here calls `ln_beta`/`ln_gamma`.
//!
//! The workhorse is tanh-sinh (double-exponential) quadrature, which handles
//! the integrable endpoint singularities `x^p (1-x)^q` with `p, q > -1`
//! natively. Points are supplied with stable `ln x` and `ln(1-x)` so
//! integrands can be evaluated in log space near the endpoints.

use crate::trees::RankedPlanarTree;
use crate::{Error, LogProb, Result};

/// An abscissa `x ∈ (0,1)` with precomputed complements and logs.
#[derive(Clone, Copy, Debug)]
pub struct UnitPoint {
    pub x: f64,
    pub one_minus_x: f64,
    pub ln_x: f64,
    pub ln_one_minus_x: f64,
}

impl UnitPoint {
    fn from_u(u: f64) -> Self {
        // x = 1/(1 + e^{-2u}), 1-x = 1/(1 + e^{2u})
        let ln_x = -(-2.0 * u).exp().ln_1p();
        let ln_one_minus_x = -(2.0 * u).exp().ln_1p();
        UnitPoint {
            x: ln_x.exp(),
            one_minus_x: ln_one_minus_x.exp(),
            ln_x,
            ln_one_minus_x,
        }
    }

    /// `ln(x^p (1-x)^q)`; exponents of exactly zero are skipped so endpoint
    /// `ln = -inf` values never produce `0 × ∞`.
    pub fn ln_pow(&self, p: f64, q: f64) -> f64 {
        let mut s = 0.0;
        if p != 0.0 {
            s += p * self.ln_x;
        }
        if q != 0.0 {
            s += q * self.ln_one_minus_x;
        }
        s
    }
}

const TANH_SINH_T_MAX: f64 = 7.7;
const TANH_SINH_MAX_LEVEL: u32 = 10;

/// `∫_0^1 f(x) dx` by tanh-sinh quadrature with relative tolerance
/// `rel_tol`, for a nonnegative integrand supplied as `ln f` (`-inf` where
/// it vanishes). The log form keeps integrable endpoint blow-ups like
/// `x^p (1-x)^q`, `p, q > -1`, finite all the way into the transformed
/// tails, where `f` alone can overflow long before the weight tames it.
pub fn tanh_sinh_unit(ln_f: impl Fn(&UnitPoint) -> f64, rel_tol: f64) -> Result<f64> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut prev = f64::NAN;
    for level in 0..=TANH_SINH_MAX_LEVEL {
        let h = 1.0 / (1u64 << level) as f64;
        let k_max = (TANH_SINH_T_MAX / h).floor() as i64;
        let mut sum = 0.0;
        for k in -k_max..=k_max {
            let t = k as f64 * h;
            let u = half_pi * t.sinh();
            let point = UnitPoint::from_u(u);
            // dx/dt = 2 x (1-x) (π/2) cosh t
            let ln_weight =
                std::f64::consts::PI.ln() + t.cosh().ln() + point.ln_x + point.ln_one_minus_x;
            let ln_term = ln_weight + ln_f(&point);
            if ln_term > f64::NEG_INFINITY {
                sum += ln_term.exp();
            }
        }
        sum *= h;
        if level >= 2 && (sum - prev).abs() <= rel_tol * sum.abs().max(1e-300) {
            return Ok(sum);
        }
        prev = sum;
    }
    Err(Error::QuadratureNonConvergence(format!(
        "tanh-sinh did not reach relative tolerance {rel_tol}"
    )))
}

/// Theorem-level cross-check: evaluate the per-node integrals
/// `∫ b^{n_L+α} (1-b)^{n_R+β} db` and the normalizer `∫ b^α (1-b)^β db`
/// numerically (never through the Gamma identity) and assemble the ranked
/// planar tree probability from them.
pub fn quadrature_check(t: &RankedPlanarTree, alpha: f64, beta: f64) -> Result<LogProb> {
    if !alpha.is_finite() || alpha <= -1.0 || !beta.is_finite() || beta <= -1.0 {
        return Err(Error::domain(format!(
            "quadrature_check requires finite alpha, beta > -1 (got {alpha}, {beta})"
        )));
    }
    let base = tanh_sinh_unit(|p| p.ln_pow(alpha, beta), 1e-11)?;
    let mut ln_total = 0.0;
    for (l, r) in t.split_pairs_by_rank() {
        let integral = tanh_sinh_unit(
            |p| p.ln_pow(l as f64 + alpha, r as f64 + beta),
            1e-11,
        )?;
        ln_total += integral.ln() - base.ln();
    }
    Ok(LogProb::from_ln(ln_total))
}

/// Quadrature route for the recursive-construction split distribution:
/// `q(i) ∝ C(n,i) ∫ x^{i+β} (1-x)^{n-i+β} dx` with the normalizer
/// integrated directly from `(1 - x^n - (1-x)^n) x^β (1-x)^β`.
pub fn aldous_split_pmf_quadrature(n: usize, beta: f64) -> Result<Vec<f64>> {
    if n < 2 || !beta.is_finite() || beta <= -2.0 {
        return Err(Error::domain(
            "split distribution needs n >= 2 and finite beta > -2".to_string(),
        ));
    }
    let nf = n as f64;
    let norm = tanh_sinh_unit(
        |p| {
            // 1 - x^n - (1-x)^n: take expm1 on whichever side is close to 1
            // so both endpoints stay cancellation-free
            let bracket = if p.x < 0.5 {
                -(nf * p.ln_one_minus_x).exp_m1() - (nf * p.ln_x).exp()
            } else {
                -(nf * p.ln_x).exp_m1() - (nf * p.ln_one_minus_x).exp()
            };
            p.ln_pow(beta, beta) + bracket.ln()
        },
        1e-11,
    )?;
    let mut q = Vec::with_capacity(n - 1);
    for i in 1..n {
        let binom: f64 = {
            let mut acc = 1.0f64;
            for j in 0..i.min(n - i) {
                acc = acc * (n - j) as f64 / (j + 1) as f64;
            }
            acc
        };
        let integral = tanh_sinh_unit(
            |p| p.ln_pow(i as f64 + beta, (n - i) as f64 + beta),
            1e-11,
        )?;
        q.push(binom * integral / norm);
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Beta CDF at many points (for KS tests against the sampler)
// ---------------------------------------------------------------------------

/// 16-point Gauss–Legendre nodes (positive half) and weights on [-1, 1].
const GL16_NODES: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];
const GL16_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_081,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

fn gl16<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let c = 0.5 * (lo + hi);
    let d = 0.5 * (hi - lo);
    let mut sum = 0.0;
    for (node, w) in GL16_NODES.iter().zip(GL16_WEIGHTS.iter()) {
        sum += w * (f(c - d * node) + f(c + d * node));
    }
    sum * d
}

/// Unnormalized lower tail `∫_0^x t^{a-1}(1-t)^{b-1} dt` for tiny `x` by the
/// binomial series; truncation error is O(x^5), far below anything relevant
/// at the cut point used below.
fn lower_tail_series(a: f64, b: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut poch = 1.0; // (1-b)_k / k!
    for k in 0..=4u32 {
        if k > 0 {
            poch *= (k as f64 - b) / k as f64;
        }
        sum += poch * x.powf(a + k as f64) / (a + k as f64);
    }
    sum
}

/// CDF of Beta(a, b) evaluated by quadrature at each of the (ascending)
/// sample points. Interior panels use Gauss–Legendre on a dyadic-plus-uniform
/// grid; the extreme tails use the series above. Never touches the Gamma
/// identity, so it is a valid independent oracle for the sampler.
pub fn beta_cdf_sorted(a: f64, b: f64, xs_sorted: &[f64]) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "beta_cdf requires finite a, b > 0 (got {a}, {b})"
        )));
    }
    if xs_sorted.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("sample points must be ascending".to_string()));
    }
    if xs_sorted.iter().any(|&x| !(0.0 < x && x < 1.0)) {
        return Err(Error::domain("sample points must lie in (0,1)".to_string()));
    }
    let z = tanh_sinh_unit(|p| p.ln_pow(a - 1.0, b - 1.0), 1e-12)?;
    let density = |x: f64| x.powf(a - 1.0) * (1.0 - x).powf(b - 1.0);

    let lo_cut = 2f64.powi(-50);
    let hi_cut = 1.0 - 2f64.powi(-50);
    let mut grid: Vec<f64> = Vec::new();
    for k in (1..=50).rev() {
        grid.push(2f64.powi(-k));
    }
    for j in 1..64 {
        grid.push(j as f64 / 64.0);
    }
    for k in 1..=50 {
        grid.push(1.0 - 2f64.powi(-k));
    }
    grid.sort_by(|p, q| p.partial_cmp(q).unwrap());
    grid.dedup();

    // cumulative unnormalized CDF at each grid point
    let mut cum = Vec::with_capacity(grid.len());
    let mut acc = lower_tail_series(a, b, grid[0]);
    cum.push(acc);
    for w in grid.windows(2) {
        acc += gl16(&density, w[0], w[1]);
        cum.push(acc);
    }

    let mut out = Vec::with_capacity(xs_sorted.len());
    for &x in xs_sorted {
        let raw = if x <= lo_cut {
            lower_tail_series(a, b, x)
        } else if x >= hi_cut {
            z - lower_tail_series(b, a, 1.0 - x)
        } else {
            let i = grid.partition_point(|&g| g <= x) - 1;
            cum[i] + gl16(&density, grid[i], x)
        };
        out.push((raw / z).clamp(0.0, 1.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::SplittingPermutation;

    #[test]
    fn tanh_sinh_smooth_and_singular() {
        // ∫ x dx = 1/2
        let v = tanh_sinh_unit(|p| p.ln_x, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        // ∫ x^{-1/2} dx = 2
        let v = tanh_sinh_unit(|p| p.ln_pow(-0.5, 0.0), 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
        // ∫ x^{-0.9}(1-x)^{-0.9} dx = B(0.1, 0.1)
        let v = tanh_sinh_unit(|p| p.ln_pow(-0.9, -0.9), 1e-12).unwrap();
        assert!((v - 19.714_639_489_050_16).abs() < 1e-8 * 19.7, "v = {v}");
    }

    #[test]
    fn quadrature_check_examples() {
        let cherry = SplittingPermutation::new(vec![1]).unwrap().to_tree();
        let v = quadrature_check(&cherry, 0.3, 4.0).unwrap();
        assert!(v.ln().abs() < 1e-10);
        // Yule comb on 4 leaves: 1/6
        let comb = SplittingPermutation::new(vec![1, 2, 3]).unwrap().to_tree();
        let v = quadrature_check(&comb, 0.0, 0.0).unwrap();
        assert!((v.ln() - (1.0f64 / 6.0).ln()).abs() < 1e-8);
        // asymmetric fractional: ln P(comb4; 0.5, -0.5) = ln(1/32)
        let v = quadrature_check(&comb, 0.5, -0.5).unwrap();
        assert!((v.ln() - (-3.465_735_902_799_726_5)).abs() < 1e-8);
        assert!(quadrature_check(&comb, -1.0, 0.0).is_err());
    }

    #[test]
    fn aldous_quadrature_matches_uniform_case() {
        let q = aldous_split_pmf_quadrature(4, 0.0).unwrap();
        for v in &q {
            assert!((v - 1.0 / 3.0).abs() < 1e-9, "q = {q:?}");
        }
        // heavy-tailed case still normalizes
        let q = aldous_split_pmf_quadrature(6, -1.5).unwrap();
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn beta_cdf_anchors() {
        // symmetry: F(1/2; a, a) = 1/2
        let v = beta_cdf_sorted(0.2, 0.2, &[0.5]).unwrap()[0];
        assert!((v - 0.5).abs() < 1e-10);
        // uniform: F(x) = x
        let xs = [0.1, 0.25, 0.75, 0.999];
        let v = beta_cdf_sorted(1.0, 1.0, &xs).unwrap();
        for (got, want) in v.iter().zip(xs.iter()) {
            assert!((got - want).abs() < 1e-10);
        }
        // regularized incomplete beta reference:
        // I(0.01; 0.1, 0.1) = 0.32030825037562634
        let v = beta_cdf_sorted(0.1, 0.1, &[0.01, 0.99]).unwrap();
        assert!((v[0] - 0.320_308_250_375_626_3).abs() < 1e-10, "got {}", v[0]);
        assert!((v[1] - (1.0 - 0.320_308_250_375_626_3)).abs() < 1e-10);
    }

    #[test]
    fn beta_cdf_monotone_and_continuous_at_cuts() {
        // the series/panel handoff at the cut must not jump
        let cut = 2f64.powi(-50);
        let xs = [
            cut * 0.5,
            cut,
            cut * (1.0 + 1e-13),
            1e-9,
            0.3,
            0.9,
            1.0 - cut,
        ];
        let v = beta_cdf_sorted(0.3, 2.0, &xs).unwrap();
        for w in v.windows(2) {
            assert!(w[0] <= w[1] + 1e-15);
        }
        assert!((v[1] - v[2]).abs() < 1e-13, "handoff jump: {} vs {}", v[1], v[2]);
    }
}
