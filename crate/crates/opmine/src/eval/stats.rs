//! Paired two-sided t-test for comparing metric vectors across folds or
//! seeds.
//!
//! The Student-t tail probability is computed from the regularized
//! incomplete beta function, evaluated with a modified Lentz continued
//! fraction. No approximation tables: the two-sided p-value for statistic
//! `t` with `df` degrees of freedom is exactly `I_x(df/2, 1/2)` at
//! `x = df / (df + t^2)`.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::EvalError;

/// Result of a paired t-test, including the degenerate cases that have no
/// meaningful statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TtestOutcome {
    /// Every pairwise difference is exactly zero.
    NoDifference,
    /// Differences are constant but nonzero: the sample standard deviation
    /// vanishes and the statistic diverges, so the p-value tends to 0.
    /// Treat with suspicion; a zero-variance sample says nothing about
    /// variability under resampling. Detection is exact, so differences
    /// constant only up to float noise still get a proper (huge-t) test.
    ZeroVariance { mean_diff: f64 },
    /// A proper test: `t = mean(d) / (sd(d) / sqrt(n))` with the sample
    /// (n-1) standard deviation, `df = n - 1`, two-sided `p`.
    Test { t: f64, df: usize, p: f64 },
}

impl TtestOutcome {
    /// Two-sided p-value, mapping the degenerate cases to their limits.
    pub fn p_value(&self) -> Option<f64> {
        match *self {
            TtestOutcome::NoDifference => None,
            TtestOutcome::ZeroVariance { .. } => Some(0.0),
            TtestOutcome::Test { p, .. } => Some(p),
        }
    }

    /// True when the outcome rejects at the given level. `NoDifference`
    /// never rejects; `ZeroVariance` always does (with the caveat on the
    /// variant).
    pub fn significant_at(&self, alpha: f64) -> bool {
        self.p_value().is_some_and(|p| p < alpha)
    }
}

impl fmt::Display for TtestOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TtestOutcome::NoDifference => write!(f, "no difference"),
            TtestOutcome::ZeroVariance { mean_diff } => write!(
                f,
                "constant difference {mean_diff:+.6} with zero variance; p -> 0 \
                 (warning: degenerate sample)"
            ),
            TtestOutcome::Test { t, df, p } => {
                write!(f, "t = {t:.4}, df = {df}, p = {p:.4}")
            }
        }
    }
}

/// Paired two-sided t-test between two equal-length metric vectors.
///
/// Pairs `a[i]` with `b[i]` (same fold or seed), tests the mean of the
/// differences against zero. Degenerate samples come back as sentinel
/// variants rather than fabricated numbers.
pub fn paired_ttest(a: &[f64], b: &[f64]) -> Result<TtestOutcome, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Err(EvalError::TooFewRuns { got: n });
    }
    if let Some(bad) = a.iter().chain(b.iter()).find(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite { value: *bad });
    }

    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().all(|&x| x == 0.0) {
        return Ok(TtestOutcome::NoDifference);
    }
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let var = d.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
    if var == 0.0 {
        return Ok(TtestOutcome::ZeroVariance { mean_diff: mean });
    }
    let t = mean / (var.sqrt() / nf.sqrt());
    let df = n - 1;
    Ok(TtestOutcome::Test { t, df, p: student_t_two_sided_p(t, df) })
}

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
fn student_t_two_sided_p(t: f64, df: usize) -> f64 {
    let v = df as f64;
    reg_inc_beta(0.5 * v, 0.5, v / (v + t * t))
}

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and
/// x in [0, 1].
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0 && (0.0..=1.0).contains(&x));
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // The continued fraction converges fast only below the distribution
    // mean; above it, evaluate the mirrored integral instead.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta (modified Lentz method).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const EPS: f64 = 1e-10;
    const TINY: f64 = 1e-300;
    const MAX_ITER: usize = 300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let mf = m as f64;
        let m2 = 2.0 * mf;
        // even step
        let aa = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // odd step
        let aa = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Natural log of the gamma function (Lanczos, g = 7, 9 terms).
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
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
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-12);
        assert!((ln_gamma(2.0)).abs() < 1e-12);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        // reflection path
        assert!((ln_gamma(0.25) + ln_gamma(0.75)
            - (std::f64::consts::PI / (std::f64::consts::PI * 0.25).sin()).ln())
        .abs()
            < 1e-12);
    }

    #[test]
    fn incomplete_beta_endpoints_and_symmetry() {
        assert_eq!(reg_inc_beta(2.0, 0.5, 0.0), 0.0);
        assert_eq!(reg_inc_beta(2.0, 0.5, 1.0), 1.0);
        // I_x(a,b) + I_{1-x}(b,a) = 1
        for &(a, b, x) in
            &[(2.0, 0.5, 0.3), (0.5, 0.5, 0.7), (5.0, 3.0, 0.11), (1.0, 9.0, 0.95)]
        {
            let s = reg_inc_beta(a, b, x) + reg_inc_beta(b, a, 1.0 - x);
            assert!((s - 1.0).abs() < 1e-10, "a={a} b={b} x={x}: {s}");
        }
        // arcsine special case: I_x(1/2, 1/2) = (2/pi) asin(sqrt(x))
        let x = 0.42f64;
        let expect = 2.0 / std::f64::consts::PI * x.sqrt().asin();
        assert!((reg_inc_beta(0.5, 0.5, x) - expect).abs() < 1e-10);
    }

    #[test]
    fn t_tail_matches_closed_forms_for_small_df() {
        // df = 1 is Cauchy: p = 1 - (2/pi) atan(t)
        let cauchy = |t: f64| 1.0 - 2.0 / std::f64::consts::PI * t.atan();
        assert!((student_t_two_sided_p(1.0, 1) - cauchy(1.0)).abs() < 1e-10);
        assert!((student_t_two_sided_p(3f64.sqrt(), 1) - (1.0 / 3.0)).abs() < 1e-10);
        // df = 2: p = 1 - t / sqrt(t^2 + 2)
        let t = 2f64.sqrt();
        assert!((student_t_two_sided_p(t, 2) - (1.0 - t / (t * t + 2.0).sqrt())).abs() < 1e-10);
        // t = 0 keeps all the mass
        assert!((student_t_two_sided_p(0.0, 7) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn t_tail_matches_published_critical_values() {
        // two-sided 5% critical points from standard t tables
        for &(t, df) in &[(12.706, 1), (2.776, 4), (2.228, 10), (2.042, 30)] {
            let p = student_t_two_sided_p(t, df);
            assert!((p - 0.05).abs() < 5e-4, "df={df}: p={p}");
        }
        // large df approaches the normal tail
        let p = student_t_two_sided_p(1.959_964, 100_000);
        assert!((p - 0.05).abs() < 1e-4, "p={p}");
    }

    #[test]
    fn known_five_point_example() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [0.0; 5];
        let TtestOutcome::Test { t, df, p } = paired_ttest(&a, &b).unwrap() else {
            panic!("expected a proper test");
        };
        assert!((t - 18f64.sqrt()).abs() < 1e-12); // mean 3, sd sqrt(2.5), n 5
        assert_eq!(df, 4);
        // closed form: p = 1 - sqrt(y)(3 - y)/2 at y = 18/22 for I_y(1/2, 2)
        let y: f64 = 18.0 / 22.0;
        let expect = 1.0 - y.sqrt() * (3.0 - y) / 2.0;
        assert!((p - expect).abs() < 1e-10, "p={p} expect={expect}");
        assert!((p - 0.0132).abs() < 1e-4);
    }

    #[test]
    fn identical_vectors_are_no_difference() {
        let a = [0.81, 0.79, 0.85];
        assert_eq!(paired_ttest(&a, &a).unwrap(), TtestOutcome::NoDifference);
        assert!(!paired_ttest(&a, &a).unwrap().significant_at(0.05));
    }

    #[test]
    fn constant_nonzero_difference_is_zero_variance() {
        // dyadic values so the differences are bit-identical
        let a = [1.5, 1.25, 0.75];
        let b = [1.25, 1.0, 0.5];
        let out = paired_ttest(&a, &b).unwrap();
        let TtestOutcome::ZeroVariance { mean_diff } = out else {
            panic!("expected zero-variance sentinel, got {out:?}");
        };
        assert_eq!(mean_diff, 0.25);
        assert_eq!(out.p_value(), Some(0.0));
        assert!(out.significant_at(0.05));
    }

    #[test]
    fn short_and_misaligned_inputs_error() {
        assert!(matches!(
            paired_ttest(&[1.0], &[2.0]),
            Err(EvalError::TooFewRuns { got: 1 })
        ));
        assert!(matches!(
            paired_ttest(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(EvalError::LengthMismatch { left: 2, right: 3 })
        ));
        assert!(matches!(
            paired_ttest(&[1.0, f64::NAN], &[0.0, 0.0]),
            Err(EvalError::NonFinite { .. })
        ));
    }

    #[test]
    fn swapping_sides_negates_t_and_keeps_p() {
        let a = [0.71, 0.64, 0.80, 0.77, 0.69];
        let b = [0.62, 0.66, 0.71, 0.70, 0.68];
        let (TtestOutcome::Test { t: t_ab, p: p_ab, .. }, TtestOutcome::Test { t: t_ba, p: p_ba, .. }) =
            (paired_ttest(&a, &b).unwrap(), paired_ttest(&b, &a).unwrap())
        else {
            panic!("expected proper tests");
        };
        assert_eq!(t_ab, -t_ba);
        assert_eq!(p_ab, p_ba);
    }

    #[test]
    fn outcome_serde_round_trip() {
        for out in [
            TtestOutcome::NoDifference,
            TtestOutcome::ZeroVariance { mean_diff: 0.25 },
            TtestOutcome::Test { t: 4.24, df: 4, p: 0.0132 },
        ] {
            let json = serde_json::to_string(&out).unwrap();
            let back: TtestOutcome = serde_json::from_str(&json).unwrap();
            assert_eq!(out, back);
        }
        assert!(serde_json::to_string(&TtestOutcome::NoDifference)
            .unwrap()
            .contains("no_difference"));
    }
}
