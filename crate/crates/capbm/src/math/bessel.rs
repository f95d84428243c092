//! Log-domain modified Bessel functions of the first kind, orders 0 and 1.
//!
//! `ln I0` normalizes the von Mises phase conditional and feeds the amplitude
//! conditional's logit; `I1/I0` is the mean resultant length of a von Mises
//! distribution and scales expected complex activity. Working in the log
//! domain keeps concentrations up to 1e6 from overflowing.
//!
//! Evaluation strategy: the defining power series below `a = 15`, the large-
//! argument asymptotic expansion at or above it. Both branches keep relative
//! error near machine precision at the split, far inside the documented
//! bounds (<= 1e-12 relative for a <= 20, <= 1e-8 up to 1e4).

use crate::error::{Error, Result};
use std::f64::consts::TAU;

/// Branch point between the power series and the asymptotic expansion.
const SERIES_LIMIT: f64 = 15.0;

/// Series truncation target, relative to the running sum.
const TERM_EPS: f64 = 1e-17;

fn check_arg(a: f64) -> Result<()> {
    if !a.is_finite() || a < 0.0 {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and non-negative, got {a}"
        )));
    }
    Ok(())
}

/// Shared power-series pass. With `t_m = ((a/2)^m / m!)^2` it returns
/// `(sum_{m>=1} t_m, sum_{m>=0} t_m/(m+1))`: the first is `I0 - 1`, kept
/// separate so tiny arguments retain full relative precision through
/// `ln_1p`; the second times `a/2` is `I1`.
fn series_parts(a: f64) -> (f64, f64) {
    let q = (a / 2.0) * (a / 2.0);
    let mut t = 1.0_f64;
    let mut i0_tail = 0.0_f64;
    let mut i1_sum = 1.0_f64;
    let mut m = 1.0_f64;
    loop {
        t *= q / (m * m);
        i0_tail += t;
        i1_sum += t / (m + 1.0);
        if t < TERM_EPS * (1.0 + i0_tail) || m > 500.0 {
            break;
        }
        m += 1.0;
    }
    (i0_tail, i1_sum)
}

/// Bracket `B_v(a)` of the expansion `I_v(a) ~ e^a / sqrt(2 pi a) * B_v(a)`,
/// `B_v(a) = 1 + sum_k u_k` with `u_k = u_{k-1} ((2k-1)^2 - 4v^2) / (8 a k)`.
/// The asymptotic tail eventually grows; summation stops at the smallest
/// term, which bounds the truncation error (~1e-14 absolute at a = 15).
fn asymptotic_bracket(a: f64, order: u32) -> f64 {
    let four_v2 = (4 * order * order) as f64;
    let mut u = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..=40u32 {
        let odd = 2.0 * f64::from(k) - 1.0;
        u *= (odd * odd - four_v2) / (8.0 * a * f64::from(k));
        if u.abs() >= prev {
            break;
        }
        sum += u;
        prev = u.abs();
        if u.abs() < TERM_EPS * sum {
            break;
        }
    }
    sum
}

fn ln_iv_asymptotic(a: f64, order: u32) -> f64 {
    a - 0.5 * (TAU * a).ln() + asymptotic_bracket(a, order).ln()
}

/// `ln I0(a)` for finite `a >= 0`.
///
/// Never overflows: the result is `~a` for large arguments (about 1e6 at
/// `a = 1e6`).
pub fn log_bessel_i0(a: f64) -> Result<f64> {
    check_arg(a)?;
    if a < SERIES_LIMIT {
        let (i0_tail, _) = series_parts(a);
        Ok(i0_tail.ln_1p())
    } else {
        Ok(ln_iv_asymptotic(a, 0))
    }
}

/// `ln I1(a)` for finite `a >= 0`; `-inf` at zero. Internal: callers outside
/// the crate get the same information through [`bessel_ratio`].
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn log_bessel_i1(a: f64) -> Result<f64> {
    check_arg(a)?;
    if a < SERIES_LIMIT {
        let (_, i1_sum) = series_parts(a);
        Ok((a / 2.0).ln() + i1_sum.ln())
    } else {
        Ok(ln_iv_asymptotic(a, 1))
    }
}

/// `I1(a) / I0(a)`: strictly increasing from 0 toward 1, always in `[0, 1)`.
pub fn bessel_ratio(a: f64) -> Result<f64> {
    check_arg(a)?;
    if a < SERIES_LIMIT {
        let (i0_tail, i1_sum) = series_parts(a);
        Ok((a / 2.0) * i1_sum / (1.0 + i0_tail))
    } else {
        Ok(asymptotic_bracket(a, 1) / asymptotic_bracket(a, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // ---- independent references ----

    /// Quadrature oracle from the integral definition
    /// `I_v(a) = (1/pi) \int_0^pi cos(v t) e^{a cos t} dt`, evaluated as
    /// `ln I_v = a + ln((1/pi) \int cos(v t) e^{a (cos t - 1)} dt)`.
    /// The midpoint rule converges spectrally for periodic analytic
    /// integrands; `n` grows with sqrt(a) to track the O(1/sqrt(a))
    /// concentration width of the integrand.
    fn quad_ln_iv(a: f64, order: u32) -> f64 {
        let n = 4096 + (120.0 * a.sqrt()) as usize;
        let h = PI / n as f64;
        let mut sum = 0.0_f64;
        let mut comp = 0.0_f64; // Kahan compensation
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            let term = (f64::from(order) * t).cos() * (a * (t.cos() - 1.0)).exp();
            let y = term - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        a + (sum * h / PI).ln()
    }

    fn quad_ratio(a: f64) -> f64 {
        (quad_ln_iv(a, 1) - quad_ln_iv(a, 0)).exp()
    }

    /// Maclaurin oracle for tiny arguments, where float quadrature loses the
    /// O(a^2) signal to cancellation. Valid to well below 1e-13 relative for
    /// a <= 0.02.
    fn maclaurin_ln_i0(a: f64) -> f64 {
        let a2 = a * a;
        a2 / 4.0 - a2 * a2 / 64.0 + a2 * a2 * a2 / 576.0
            - 11.0 * a2 * a2 * a2 * a2 / 49152.0
    }

    /// Maclaurin oracle for the ratio, `(a/2)(1 - a^2/8 + a^4/48 - ...)`.
    fn maclaurin_ratio(a: f64) -> f64 {
        (a / 2.0) * (1.0 - a * a / 8.0 + a.powi(4) / 48.0)
    }

    fn rel_err(x: f64, reference: f64) -> f64 {
        (x - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
    }

    // ---- ln I0 ----

    #[test]
    fn ln_i0_matches_quadrature_oracle_through_both_branches() {
        // Straddles the series/asymptotic split at 15.
        for &a in &[0.5, 1.0, 2.0, 5.0, 8.0, 10.0, 14.9, 15.0, 15.1, 20.0] {
            let got = log_bessel_i0(a).unwrap();
            let want = quad_ln_iv(a, 0);
            assert!(
                rel_err(got, want) <= 1e-12,
                "a={a}: got {got}, oracle {want}"
            );
        }
    }

    #[test]
    fn ln_i0_matches_maclaurin_oracle_for_tiny_arguments() {
        for &a in &[1e-8, 1e-4, 1e-2, 0.02] {
            let got = log_bessel_i0(a).unwrap();
            let want = maclaurin_ln_i0(a);
            assert!(
                rel_err(got, want) <= 1e-12,
                "a={a}: got {got}, oracle {want}"
            );
        }
        assert_eq!(log_bessel_i0(0.0).unwrap(), 0.0);
    }

    #[test]
    fn ln_i0_large_arguments_stay_accurate_and_finite() {
        for &a in &[50.0, 100.0, 500.0, 1e4] {
            let got = log_bessel_i0(a).unwrap();
            let want = quad_ln_iv(a, 0);
            assert!(rel_err(got, want) <= 1e-8, "a={a}: got {got}, oracle {want}");
        }
        // No overflow at extreme concentrations.
        let big = log_bessel_i0(1e6).unwrap();
        assert!(big.is_finite());
        assert!(rel_err(big, quad_ln_iv(1e6, 0)) <= 1e-8);
    }

    #[test]
    fn ln_i0_frozen_anchor_values() {
        // ln I0(1) = 0.235914 to six decimals.
        assert!((log_bessel_i0(1.0).unwrap() - 0.235914).abs() <= 1e-6);
        // Large-argument anchor against a - ln(2 pi a)/2.
        let anchor = 500.0 - 0.5 * (TAU * 500.0).ln();
        assert!((log_bessel_i0(500.0).unwrap() - anchor).abs() <= 1e-3);
    }

    #[test]
    fn ln_i0_is_monotone_and_convex() {
        // Dense grid crossing the branch split.
        let grid: Vec<f64> = (0..400).map(|i| i as f64 * 0.1).collect();
        let vals: Vec<f64> = grid.iter().map(|&a| log_bessel_i0(a).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] > w[0], "not increasing near {:?}", w);
        }
        for w in vals.windows(3) {
            // Discrete convexity: second difference non-negative.
            assert!(w[2] - 2.0 * w[1] + w[0] > -1e-9, "not convex near {:?}", w);
        }
    }

    #[test]
    fn ln_i0_derivative_is_bessel_ratio() {
        // d/da ln I0(a) = I1(a)/I0(a); centered differences, h small enough
        // for the truncation term yet large enough to dominate rounding.
        let h = 1e-6;
        for &a in &[0.3, 1.0, 3.0, 7.0, 14.0, 16.0, 19.0] {
            let fd = (log_bessel_i0(a + h).unwrap() - log_bessel_i0(a - h).unwrap())
                / (2.0 * h);
            let analytic = bessel_ratio(a).unwrap();
            assert!(
                (fd - analytic).abs() <= 1e-7,
                "a={a}: fd {fd}, ratio {analytic}"
            );
        }
        // Zero slope at the origin: forward difference is h/4 + O(h^3).
        let h0 = 1e-4;
        let slope = (log_bessel_i0(h0).unwrap() - log_bessel_i0(0.0).unwrap()) / h0;
        assert!(slope.abs() < 1e-3);
    }

    // ---- ratio ----

    #[test]
    fn ratio_matches_quadrature_oracle() {
        for &a in &[0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 14.9, 15.1, 30.0, 100.0, 1e4] {
            let got = bessel_ratio(a).unwrap();
            let want = quad_ratio(a);
            assert!(
                rel_err(got, want) <= 1e-10,
                "a={a}: got {got}, oracle {want}"
            );
        }
    }

    #[test]
    fn ratio_matches_maclaurin_oracle_for_tiny_arguments() {
        for &a in &[1e-8, 1e-4, 1e-3, 1e-2] {
            let got = bessel_ratio(a).unwrap();
            let want = maclaurin_ratio(a);
            assert!(
                rel_err(got, want) <= 1e-12,
                "a={a}: got {got}, oracle {want}"
            );
        }
        assert_eq!(bessel_ratio(0.0).unwrap(), 0.0);
    }

    #[test]
    fn ratio_frozen_anchor_values() {
        assert!((bessel_ratio(1.0).unwrap() - 0.446390).abs() <= 1e-6);
        assert!((bessel_ratio(2.0).unwrap() - 0.697775).abs() <= 1e-6);
        // Large-argument behavior 1 - 1/(2a) + O(1/a^2).
        assert!((bessel_ratio(100.0).unwrap() - 0.99499).abs() <= 1e-5);
    }

    #[test]
    fn ratio_is_bounded_and_increasing() {
        let grid: Vec<f64> = (0..=60)
            .map(|i| 10f64.powf(-2.0 + i as f64 * (8.0 / 60.0)))
            .collect();
        let mut prev = bessel_ratio(0.0).unwrap();
        assert_eq!(prev, 0.0);
        for &a in &grid {
            let r = bessel_ratio(a).unwrap();
            assert!((0.0..1.0).contains(&r), "a={a} gave {r}");
            assert!(r > prev, "not increasing at a={a}");
            prev = r;
        }
    }

    #[test]
    fn ratio_consistent_with_log_domain_i1() {
        for &a in &[0.0, 0.3, 1.0, 5.0, 14.0, 15.0, 40.0, 1e3] {
            let via_logs =
                (log_bessel_i1(a).unwrap() - log_bessel_i0(a).unwrap()).exp();
            let direct = bessel_ratio(a).unwrap();
            let scale = direct.abs().max(1e-300);
            assert!(
                (via_logs - direct).abs() / scale <= 1e-12,
                "a={a}: logs {via_logs}, direct {direct}"
            );
        }
    }

    #[test]
    fn ln_i1_matches_quadrature_oracle() {
        for &a in &[0.5, 1.0, 5.0, 14.0, 16.0, 100.0] {
            let got = log_bessel_i1(a).unwrap();
            let want = quad_ln_iv(a, 1);
            assert!(
                rel_err(got, want) <= 1e-10,
                "a={a}: got {got}, oracle {want}"
            );
        }
        assert_eq!(log_bessel_i1(0.0).unwrap(), f64::NEG_INFINITY);
    }

    // ---- domain ----

    #[test]
    fn rejects_invalid_arguments() {
        for bad in [-1.0, -1e-9, f64::NAN, f64::INFINITY] {
            assert!(log_bessel_i0(bad).is_err());
            assert!(bessel_ratio(bad).is_err());
            assert!(log_bessel_i1(bad).is_err());
        }
    }
}
