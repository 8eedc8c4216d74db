//! Log-gamma, log-beta and friends, generic over the scalar type.

use num_traits::{Float, FromPrimitive};

use crate::{Error, Result};

/// ln 2, the workhorse constant of the β → ±limit closed forms.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// Floating-point scalar usable by the numeric kernel.
pub trait Scalar: Float + FromPrimitive + std::fmt::Debug {
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Lanczos coefficients for g = 7, 9 terms (the widely used set giving
/// ~1e-14 relative accuracy in double precision).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for `x > 0`.
///
/// Lanczos approximation with the g = 7 coefficient set above; arguments in
/// `(0, 0.5)` go through the reflection formula.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    debug_assert!(x > T::zero(), "ln_gamma domain: x > 0");
    let half = T::from_f64_lossy(0.5);
    if x < half {
        // ln Γ(x) = ln(π / sin(πx)) − ln Γ(1 − x)
        let pi = T::from_f64_lossy(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let z = x - T::one();
    let mut acc = T::from_f64_lossy(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::from_f64_lossy(c) / (z + T::from_usize(i).unwrap());
    }
    let t = z + T::from_f64_lossy(LANCZOS_G) + half;
    let ln_sqrt_2pi = T::from_f64_lossy(0.918_938_533_204_672_67);
    ln_sqrt_2pi + (z + half) * t.ln() - t + acc.ln()
}

/// Natural log of the Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)` for
/// `a, b > 0`.
pub fn ln_beta<T: Scalar>(a: T, b: T) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) || a <= T::zero() || b <= T::zero() {
        return Err(Error::domain(format!(
            "ln_beta requires finite a, b > 0 (got a = {a:?}, b = {b:?})"
        )));
    }
    Ok(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))
}

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `ln(e^a + e^b)` without overflow; `-inf` encodes zero.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}` over an iterator; `-inf` on empty input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + xs.iter().map(|&x| (x - hi).exp()).sum::<f64>().ln()
}

/// Regularized upper incomplete gamma `Q(s, x) = Γ(s, x)/Γ(s)` for `s > 0`,
/// `x ≥ 0`. Series for `x < s + 1`, continued fraction otherwise.
pub fn regularized_gamma_q(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !(x >= 0.0) {
        return Err(Error::domain(format!(
            "regularized_gamma_q requires s > 0, x >= 0 (got s = {s}, x = {x})"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-15;
    let ln_gs = ln_gamma(s);
    if x < s + 1.0 {
        // P(s,x) by series, then Q = 1 − P.
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut denom = s;
        for _ in 0..MAX_ITER {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                let p = sum * (s * x.ln() - x - ln_gs).exp();
                return Ok((1.0 - p).clamp(0.0, 1.0));
            }
        }
        Err(Error::QuadratureNonConvergence(
            "incomplete gamma series".into(),
        ))
    } else {
        // Lentz continued fraction for Q(s, x).
        let tiny = 1e-300;
        let mut b = x + 1.0 - s;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let an = -(i as f64) * (i as f64 - s);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                return Ok((h * (s * x.ln() - x - ln_gs).exp()).clamp(0.0, 1.0));
            }
        }
        Err(Error::QuadratureNonConvergence(
            "incomplete gamma continued fraction".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_beta_known_values() {
        // B(1,1) = 1, B(2,3) = 1/12, B(1/2,1/2) = π
        assert!(ln_beta(1.0, 1.0).unwrap().abs() < 1e-12);
        assert!((ln_beta(2.0, 3.0).unwrap() - (1.0f64 / 12.0).ln()).abs() < 1e-12);
        assert!((ln_beta(0.5, 0.5).unwrap() - std::f64::consts::PI.ln()).abs() < 1e-12);
    }

    #[test]
    fn ln_beta_reference_values() {
        // High-precision references:
        let cases = [
            (2.5, 3.7, -3.419_543_590_698_987_1),
            (1000.0, 2.5, -16.986_579_078_153_019),
            (1e6, 1e6, -1_386_300.003_362_921_1),
            (0.2, 0.2, 2.251_449_827_159_785_2),
        ];
        for (a, b, want) in cases {
            let got = ln_beta(a, b).unwrap();
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "ln_beta({a},{b}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn ln_beta_symmetry_exact() {
        for &(a, b) in &[(0.3, 4.2), (1.5, 9.0), (0.01, 0.7), (123.0, 0.25)] {
            assert_eq!(ln_beta(a, b).unwrap(), ln_beta(b, a).unwrap());
        }
    }

    #[test]
    fn ln_beta_gamma_recurrence() {
        // exp(lnB(a+1,b) − lnB(a,b)) = a/(a+b)
        for &(a, b) in &[(0.5, 0.5), (2.0, 7.0), (10.0, 0.1), (1234.5, 67.8)] {
            let lhs = (ln_beta(a + 1.0, b).unwrap() - ln_beta(a, b).unwrap()).exp();
            let rhs = a / (a + b);
            assert!((lhs - rhs).abs() < 1e-12 * rhs, "a={a}, b={b}");
        }
    }

    #[test]
    fn ln_beta_rejects_bad_domain() {
        assert!(ln_beta(0.0, 1.0).is_err());
        assert!(ln_beta(1.0, -2.0).is_err());
        assert!(ln_beta(f64::NAN, 1.0).is_err());
        assert!(ln_beta(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn ln_gamma_f32_instance_is_usable() {
        let v: f32 = ln_gamma(5.0f32);
        assert!((v - 24.0f32.ln()).abs() < 1e-4);
    }

    #[test]
    fn ln_factorial_matches_products() {
        let mut acc = 0.0f64;
        for n in 1..=20u64 {
            acc += (n as f64).ln();
            assert!((ln_factorial(n) - acc).abs() < 1e-10);
        }
    }

    #[test]
    fn log_add_and_sum() {
        let v = log_add((0.3f64).ln(), (0.7f64).ln());
        assert!((v.exp() - 1.0).abs() < 1e-14);
        assert_eq!(log_add(f64::NEG_INFINITY, -1.0), -1.0);
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
        let s = log_sum_exp([0.2f64.ln(), 0.3f64.ln(), 0.5f64.ln()]);
        assert!((s.exp() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gamma_q_checks() {
        // Q(1, x) = e^{-x}
        for &x in &[0.1, 1.0, 5.0, 20.0] {
            let q = regularized_gamma_q(1.0, x).unwrap();
            assert!((q - (-x).exp()).abs() < 1e-12);
        }
        // chi-square with 5 dof at the supplementary demo statistic
        let p = regularized_gamma_q(2.5, 1.886 / 2.0).unwrap();
        assert!((p - 0.864_683_56).abs() < 1e-6);
        assert_eq!(regularized_gamma_q(2.0, 0.0).unwrap(), 1.0);
        assert!(regularized_gamma_q(-1.0, 1.0).is_err());
    }
}
