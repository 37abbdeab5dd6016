//! Small deterministic numeric kernels shared by every module.

use crate::error::{Error, Result};

/// `base^exp` by repeated squaring.
#[inline]
pub fn powi(base: f64, exp: u32) -> f64 {
    let mut result = 1.0;
    let mut b = base;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        b *= b;
        e >>= 1;
    }
    result
}

/// `1 - (1-s)^n` without cancellation for small `s`.
#[inline]
pub fn one_minus_pow(s: f64, n: u32) -> f64 {
    if s < 0.0625 {
        // s * sum_{i<n} (1-s)^i
        let z = 1.0 - s;
        let mut acc = 0.0;
        let mut zi = 1.0;
        for _ in 0..n {
            acc += zi;
            zi *= z;
        }
        s * acc
    } else {
        1.0 - powi(1.0 - s, n)
    }
}

/// Sum in mirrored pair order `(a_0 + a_{n-1}) + (a_1 + a_{n-2}) + ...`.
///
/// Reversing the input leaves the result bit-identical, which keeps
/// symmetric constellations exactly symmetric.
#[inline]
pub fn mirrored_sum(values: &[f64]) -> f64 {
    let n = values.len();
    let mut acc = 0.0;
    for k in 0..n / 2 {
        acc += values[k] + values[n - 1 - k];
    }
    if n % 2 == 1 {
        acc += values[n / 2];
    }
    acc
}

/// Result of a bisection search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Bisection for a sign change of `f` on `[lo, hi]` down to bracket width `tol`.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    what: &str,
) -> Result<Root> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            lo: a,
            hi: a,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            lo: b,
            hi: b,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket {
            what: what.to_string(),
            lo,
            hi,
        });
    }
    let neg_at_a = fa < 0.0;
    let mut iterations = 0;
    while b - a > tol && iterations < 2000 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        iterations += 1;
        if fm == 0.0 {
            return Ok(Root {
                x: m,
                lo: m,
                hi: m,
                iterations,
            });
        }
        if (fm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Root {
        x: 0.5 * (a + b),
        lo: a,
        hi: b,
        iterations,
    })
}

/// Bisection on a boolean predicate that is `false` on the low end and `true` on the high end.
pub fn bisect_predicate<F: FnMut(f64) -> Result<bool>>(
    mut p: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if p(m)? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok((a, b))
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut failed = false;
    let v = simpson_rec(&f, a, b, fa, fm, fb, whole, tol, max_depth, &mut failed);
    if failed || !v.is_finite() {
        return Err(Error::Quadrature(format!(
            "adaptive Simpson on [{a}, {b}] did not reach tolerance {tol:e}"
        )));
    }
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    failed: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *failed = true;
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, failed)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, failed)
}

/// Binary entropy in bits with `0 log 0 = 0`.
pub fn h2(t: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(t) + term(1.0 - t)
}

/// `n` evenly spaced points on `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    b
                } else {
                    a + (b - a) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Sup-norm of the difference of two equal-length slices.
pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn powi_small_cases() {
        assert_eq!(powi(2.0, 10), 1024.0);
        assert_eq!(powi(0.0, 0), 1.0);
        assert_eq!(powi(0.5, 1), 0.5);
    }

    #[test]
    fn one_minus_pow_small_arguments() {
        assert_eq!(one_minus_pow(0.0, 5), 0.0);
        assert_eq!(one_minus_pow(1e-300, 5), 5e-300);
        assert!((one_minus_pow(1e-17, 5) - 5e-17).abs() < 1e-30);
        for k in 1..100 {
            let s = k as f64 / 100.0;
            assert!((one_minus_pow(s, 7) - (1.0 - (1.0 - s).powi(7))).abs() < 1e-15);
        }
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-13, "x^2-2").unwrap();
        assert!((r.x - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn bisect_rejects_missing_sign_change() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9, "q"),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn simpson_polynomial_and_sine() {
        let v = adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-12, 40).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let s = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-12, 40).unwrap();
        assert!((s - 2.0).abs() < 1e-10);
    }

    #[test]
    fn h2_values() {
        assert_eq!(h2(0.0), 0.0);
        assert_eq!(h2(1.0), 0.0);
        assert!((h2(0.5) - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn powi_matches_powf(b in 0.0f64..1.0, e in 0u32..60) {
            let p = powi(b, e);
            let q = b.powf(e as f64);
            prop_assert!((p - q).abs() <= 1e-13 * q.max(1e-300) + 1e-300);
        }

        #[test]
        fn mirrored_sum_is_reversal_invariant(v in proptest::collection::vec(0.0f64..1.0, 0..40)) {
            let mut r = v.clone();
            r.reverse();
            prop_assert_eq!(mirrored_sum(&v).to_bits(), mirrored_sum(&r).to_bits());
            let naive: f64 = v.iter().sum();
            prop_assert!((mirrored_sum(&v) - naive).abs() < 1e-12);
        }

        #[test]
        fn h2_symmetry(k in 0u32..=(1 << 20)) {
            let t = k as f64 / (1u32 << 20) as f64;
            prop_assert_eq!(h2(t).to_bits(), h2(1.0 - t).to_bits());
        }
    }
}
