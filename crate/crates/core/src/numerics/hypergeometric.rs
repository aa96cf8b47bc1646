//! Confluent (₁F₁) and Gauss (₂F₁) hypergeometric functions on the real line.

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::gamma::{digamma, ln_gamma_positive};

const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 1_000_000;

/// Default distance from the branch point used for [`divergent_2f1_constant`].
pub const DEFAULT_2F1_DELTA: f64 = 1e-6;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

// Γ(x) on the whole real line; poles come back as infinities so that
// reciprocals vanish the way they should in the connection formulas.
fn gamma_signed(x: f64) -> f64 {
    if x > 0.0 {
        if x > 171.0 {
            return f64::INFINITY;
        }
        ln_gamma_positive(x).exp()
    } else if x.fract() == 0.0 {
        f64::INFINITY
    } else {
        PI / ((PI * x).sin() * gamma_signed(1.0 - x))
    }
}

fn recip_gamma(x: f64) -> f64 {
    let g = gamma_signed(x);
    if g.is_infinite() {
        0.0
    } else {
        1.0 / g
    }
}

/// Kummer's confluent hypergeometric function ₁F₁(a; b; z).
///
/// Negative arguments go through Kummer's transformation so the summed
/// series has terms of one sign and no cancellation.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(Error::domain("kummer_1f1", format!("b = {b} is a nonpositive integer")));
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::domain("kummer_1f1", "arguments must be finite"));
    }
    if z < 0.0 {
        let inner = kummer_series(b - a, b, -z)?;
        return Ok(z.exp() * inner);
    }
    kummer_series(a, b, z)
}

fn kummer_series(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * z / ((b + nf) * (nf + 1.0));
        sum += term;
        if term == 0.0 || (term.abs() < EPS * sum.abs() && nf > z - b) {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence {
        function: "kummer_1f1",
        iterations: MAX_TERMS,
    })
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real `z ≤ 1`.
///
/// At `z = 1` the value is the Gauss sum and requires `c − a − b > 0`.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::domain("gauss_2f1", format!("c = {c} is a nonpositive integer")));
    }
    if !(a.is_finite() && b.is_finite() && c.is_finite()) || z.is_nan() {
        return Err(Error::domain("gauss_2f1", "arguments must be finite"));
    }
    if z > 1.0 {
        return Err(Error::domain("gauss_2f1", format!("z = {z} must be <= 1")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z == 1.0 {
        let m = c - a - b;
        if m <= 0.0 {
            return Err(Error::domain(
                "gauss_2f1",
                format!("series diverges at z = 1 since c - a - b = {m} <= 0"),
            ));
        }
        return Ok(gamma_signed(c) * gamma_signed(m) * recip_gamma(c - a) * recip_gamma(c - b));
    }
    if z < 0.0 {
        // Pfaff: maps (-inf, 0) onto (0, 1)
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * gauss_2f1(a, c - b, c, w)?);
    }
    if z <= 0.5 {
        return gauss_series(a, b, c, z);
    }
    let m = c - a - b;
    if m.fract() != 0.0 {
        let w = 1.0 - z;
        let first = gamma_signed(c) * gamma_signed(m) * recip_gamma(c - a) * recip_gamma(c - b);
        let second = gamma_signed(c) * gamma_signed(-m) * recip_gamma(a) * recip_gamma(b);
        let mut value = 0.0;
        if first != 0.0 {
            value += first * gauss_series(a, b, 1.0 - m, w)?;
        }
        if second != 0.0 {
            value += second * w.powf(m) * gauss_series(c - a, c - b, m + 1.0, w)?;
        }
        return Ok(value);
    }
    if m == 0.0 && a > 0.0 && b > 0.0 {
        return gauss_log_case(a, b, z);
    }
    gauss_series(a, b, c, z)
}

fn gauss_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 || (term.abs() < EPS * sum.abs() && nf > 2.0) {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence {
        function: "gauss_2f1",
        iterations: MAX_TERMS,
    })
}

// c = a + b: the 1 − z expansion picks up a logarithm and digamma terms.
fn gauss_log_case(a: f64, b: f64, z: f64) -> Result<f64> {
    let w = 1.0 - z;
    let ln_w = w.ln();
    let prefactor = gamma_signed(a + b) * recip_gamma(a) * recip_gamma(b);
    let mut psi_one = digamma(1.0)?;
    let mut psi_a = digamma(a)?;
    let mut psi_b = digamma(b)?;
    let mut coeff = 1.0;
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let term = coeff * (2.0 * psi_one - psi_a - psi_b - ln_w);
        sum += term;
        if n > 2 && term.abs() < EPS * sum.abs() {
            return Ok(prefactor * sum);
        }
        coeff *= (a + nf) * (b + nf) / ((nf + 1.0) * (nf + 1.0)) * w;
        psi_one += 1.0 / (nf + 1.0);
        psi_a += 1.0 / (a + nf);
        psi_b += 1.0 / (b + nf);
    }
    Err(Error::NoConvergence {
        function: "gauss_2f1",
        iterations: MAX_TERMS,
    })
}

/// ₂F₁(2, ½; 5/2; 1 − δ), the high-power constant of the cascaded channel.
///
/// The function diverges logarithmically at `z = 1` (`c − a − b = 0`), so the
/// value depends on `δ`. Every asymptotic result built on it carries a flag.
pub fn divergent_2f1_constant(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(
            "divergent_2f1_constant",
            format!("delta = {delta} must lie in (0, 1)"),
        ));
    }
    gauss_2f1(2.0, 0.5, 2.5, 1.0 - delta)
}
