//! Modified Bessel functions of the first kind, orders 0 and 1.

use std::f64::consts::PI;

use crate::error::{Error, Result};

// Below this the ascending series is used; above it the asymptotic expansion
// is accurate to machine precision.
const SERIES_LIMIT: f64 = 30.0;

/// Order of the modified Bessel function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

impl BesselOrder {
    fn nu(self) -> f64 {
        match self {
            BesselOrder::Zero => 0.0,
            BesselOrder::One => 1.0,
        }
    }
}

/// `I_ν(x)` for `ν ∈ {0, 1}` and `x ≥ 0`.
pub fn bessel_i(order: BesselOrder, x: f64) -> Result<f64> {
    Ok(bessel_i_scaled(order, x)? * x.exp())
}

/// Exponentially scaled `e^{−x} I_ν(x)`, finite for every `x ≥ 0`.
pub fn bessel_i_scaled(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(Error::domain("bessel_i", format!("x = {x} must be finite and >= 0")));
    }
    if x <= SERIES_LIMIT {
        Ok(ascending_series(order.nu(), x) * (-x).exp())
    } else {
        Ok(asymptotic(order.nu(), x))
    }
}

fn ascending_series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = if nu == 0.0 { 1.0 } else { half };
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
    }
}

fn asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = -term * (mu - odd * odd) / (kf * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_i(BesselOrder::Zero, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(BesselOrder::One, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn branches_agree_at_the_switch() {
        for order in [BesselOrder::Zero, BesselOrder::One] {
            let s = ascending_series(order.nu(), SERIES_LIMIT) * (-SERIES_LIMIT).exp();
            let a = asymptotic(order.nu(), SERIES_LIMIT);
            assert!(((s - a) / s).abs() < 1e-12, "{order:?}");
        }
    }

    #[test]
    fn wronskian_like_identity() {
        // I₀' = I₁, checked by central difference
        let x = 2.3;
        let h = 1e-5;
        let d = (bessel_i(BesselOrder::Zero, x + h).unwrap()
            - bessel_i(BesselOrder::Zero, x - h).unwrap())
            / (2.0 * h);
        assert!((d - bessel_i(BesselOrder::One, x).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn rejects_negative_argument() {
        assert!(bessel_i(BesselOrder::Zero, -1.0).is_err());
    }

    #[test]
    fn large_argument_scaled_is_finite() {
        let v = bessel_i_scaled(BesselOrder::One, 5000.0).unwrap();
        assert!((v * (2.0 * PI * 5000.0).sqrt() - 1.0).abs() < 1e-3);
    }
}
