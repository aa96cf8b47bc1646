//! Reference implementations that share no code with the library.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 60)
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `₁F₁(a; b; z)` for rational arguments, summed exactly over `terms` terms.
pub fn kummer_exact(a: (i64, i64), b: (i64, i64), z: (i64, i64), terms: usize) -> f64 {
    let (a, b, z) = (rational(a.0, a.1), rational(b.0, b.1), rational(z.0, z.1));
    let mut term = rational(1, 1);
    let mut sum = term.clone();
    for n in 0..terms {
        let n = rational(n as i64, 1);
        term = term * (&a + &n) * &z / ((&b + &n) * (&n + rational(1, 1)));
        sum += &term;
    }
    sum.to_f64().expect("finite sum")
}

/// `I₀(x)` from its ascending series.
pub fn bessel_i0_series(x: f64, terms: usize) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..terms {
        term *= q / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

/// Unit-power Rician amplitude with a random line-of-sight phase.
pub fn rician<R: Rng>(kappa: f64, rng: &mut R) -> (f64, f64) {
    let los = (kappa / (kappa + 1.0)).sqrt();
    let s = (0.5 / (kappa + 1.0)).sqrt();
    let phase = rng.random::<f64>() * std::f64::consts::TAU;
    let x: f64 = StandardNormal.sample(rng);
    let y: f64 = StandardNormal.sample(rng);
    (los * phase.cos() + s * x, los * phase.sin() + s * y)
}

pub fn rician_magnitude<R: Rng>(kappa: f64, rng: &mut R) -> f64 {
    let (re, im) = rician(kappa, rng);
    re.hypot(im)
}

/// Empirical `p`-quantile of sorted samples.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    sorted[((sorted.len() as f64 * p) as usize).min(sorted.len() - 1)]
}

/// Two-sided Kolmogorov-Smirnov distance between sorted samples and `cdf`.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
