//! Statistics of the cascaded legitimate and eavesdropping channels, plus the
//! random draws the simulator is built from.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{bessel_i_scaled, kummer_1f1, ln_gamma, regularized_lower_gamma, BesselOrder};

/// Rician K-factor (line-of-sight to scattered power ratio). Zero is Rayleigh.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RicianSpec(f64);

impl RicianSpec {
    pub const RAYLEIGH: RicianSpec = RicianSpec(0.0);

    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::config("kappa", format!("must be finite and >= 0, got {kappa}")));
        }
        Ok(RicianSpec(kappa))
    }

    pub fn kappa(self) -> f64 {
        self.0
    }
}

/// Shape/scale pair of the Gamma approximation to the cascaded magnitude
/// `Σ|h_φ,m h_b,m|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFit {
    pub k: f64,
    pub l: f64,
}

impl GammaFit {
    /// CDF of the squared cascaded magnitude.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        legit_cdf(x, self)
    }

    /// PDF of the squared cascaded magnitude.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        legit_pdf(x, self)
    }
}

/// Exponential law of the eavesdropper's cascaded power `|H_be|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveCascadeSpec {
    pub xi_be: f64,
    pub upsilon: f64,
}

impl EveCascadeSpec {
    /// Builds the law for `elements` randomly phased terms with deterministic gain `xi_be`.
    ///
    /// Each term has unit second moment and a uniform phase, so the mean
    /// power is `M·Ξ²` and the rate is its reciprocal.
    pub fn new(elements: u32, xi_be: f64) -> Result<Self> {
        check_elements(elements)?;
        if !(xi_be > 0.0) || !xi_be.is_finite() {
            return Err(Error::config("xi_be", format!("must be finite and > 0, got {xi_be}")));
        }
        Ok(EveCascadeSpec {
            xi_be,
            upsilon: 1.0 / (elements as f64 * xi_be * xi_be),
        })
    }
}

fn check_elements(elements: u32) -> Result<()> {
    if elements == 0 {
        return Err(Error::config("elements", "must be >= 1"));
    }
    Ok(())
}

// Beyond this the Kummer series is slower than the Bessel form and its
// intermediate terms approach overflow.
const KUMMER_LIMIT: f64 = 500.0;

/// `₁F₁(−½; 1; −κ)`, the factor that carries κ into the mean of a Rician magnitude.
pub fn kummer_factor(kappa: RicianSpec) -> f64 {
    let k = kappa.kappa();
    if k > KUMMER_LIMIT {
        return bessel_factor(kappa);
    }
    // b = 1 is never a pole and the argument is bounded, so this cannot fail
    kummer_1f1(-0.5, 1.0, -k).expect("Kummer series converges for b = 1 and bounded argument")
}

/// The same factor in Bessel form, `e^{−κ/2}[(1+κ)I₀(κ/2) + κI₁(κ/2)]`.
pub fn bessel_factor(kappa: RicianSpec) -> f64 {
    let k = kappa.kappa();
    let half = 0.5 * k;
    let i0 = bessel_i_scaled(BesselOrder::Zero, half).expect("argument is finite and >= 0");
    let i1 = bessel_i_scaled(BesselOrder::One, half).expect("argument is finite and >= 0");
    (1.0 + k) * i0 + k * i1
}

fn mean_from_factors(fb: f64, fp: f64, kb: RicianSpec, kp: RicianSpec) -> f64 {
    PI / 4.0 * fb * fp / ((kb.kappa() + 1.0) * (kp.kappa() + 1.0)).sqrt()
}

/// `E|h_φ,m h_b,m|` for one element.
pub fn cascade_mean(kb: RicianSpec, kp: RicianSpec) -> f64 {
    mean_from_factors(kummer_factor(kb), kummer_factor(kp), kb, kp)
}

/// `E|h_φ,m h_b,m|` evaluated through modified Bessel functions.
pub fn cascade_mean_bessel(kb: RicianSpec, kp: RicianSpec) -> f64 {
    mean_from_factors(bessel_factor(kb), bessel_factor(kp), kb, kp)
}

/// Variance of `|h_φ,m h_b,m|`; each hop has unit power, so this is `1 − mean²`.
pub fn cascade_var(kb: RicianSpec, kp: RicianSpec) -> f64 {
    let e = cascade_mean(kb, kp);
    1.0 - e * e
}

/// Moment-matched Gamma law for the sum of `elements` cascaded magnitudes.
pub fn fit_gamma(elements: u32, kb: RicianSpec, kp: RicianSpec) -> Result<GammaFit> {
    check_elements(elements)?;
    let e = cascade_mean(kb, kp);
    let d = 1.0 - e * e;
    Ok(GammaFit {
        k: elements as f64 * e * e / d,
        l: d / e,
    })
}

/// `P(|Ĥ|² ≤ x) = γ(k, √x / l) / Γ(k)`.
pub fn legit_cdf(x: f64, fit: &GammaFit) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("legit_cdf", format!("x = {x} must be >= 0")));
    }
    regularized_lower_gamma(fit.k, x.sqrt() / fit.l)
}

/// Density of `|Ĥ|²`, `x^{k/2−1} e^{−√x/l} / (2 l^k Γ(k))`.
pub fn legit_pdf(x: f64, fit: &GammaFit) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("legit_pdf", format!("x = {x} must be > 0")));
    }
    let log = (0.5 * fit.k - 1.0) * x.ln()
        - x.sqrt() / fit.l
        - std::f64::consts::LN_2
        - fit.k * fit.l.ln()
        - ln_gamma(fit.k)?;
    Ok(log.exp())
}

/// `P(|H_be|² ≤ x) = 1 − e^{−υx}`.
pub fn eve_cdf(x: f64, spec: &EveCascadeSpec) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("eve_cdf", format!("x = {x} must be >= 0")));
    }
    Ok(-(-spec.upsilon * x).exp_m1())
}

/// Mean power `M(Mκ+1)/(κ+1)` of the coherent sum of `M` unit-power Rician taps,
/// which is how amplifier thermal noise reaches a receiver.
pub fn thermal_gain(elements: u32, k: RicianSpec) -> f64 {
    let m = elements as f64;
    let kappa = k.kappa();
    m * (m * kappa + 1.0) / (kappa + 1.0)
}

/// `E|Ĥ_br|² = M·D + (M·E)²` with the moments taken in Bessel form.
pub fn omega_br(elements: u32, kb: RicianSpec, kr: RicianSpec) -> Result<f64> {
    check_elements(elements)?;
    let m = elements as f64;
    let e = cascade_mean_bessel(kb, kr);
    Ok(m * (1.0 - e * e) + (m * e).powi(2))
}

/// High-power coefficient `16(1+κ_b)(1+κ_φ) / (3 e^{κ_b+κ_φ})`.
pub fn highsnr_coeff(kb: RicianSpec, kp: RicianSpec) -> f64 {
    let (a, b) = (kb.kappa(), kp.kappa());
    16.0 * (1.0 + a) * (1.0 + b) / (3.0 * (a + b).exp())
}

/// One Rician tap `√(κ/(κ+1)) + √(1/(κ+1))·(g₁ + j g₂)/√2`.
pub fn sample_rician<R: Rng + ?Sized>(k: RicianSpec, rng: &mut R) -> Complex64 {
    let kappa = k.kappa();
    let los = (kappa / (kappa + 1.0)).sqrt();
    let scatter = (0.5 / (kappa + 1.0)).sqrt();
    let g1: f64 = StandardNormal.sample(rng);
    let g2: f64 = StandardNormal.sample(rng);
    Complex64::new(los + scatter * g1, scatter * g2)
}

/// User distance drawn uniformly over a disk of radius `r_d`.
pub fn sample_user_distance<R: Rng + ?Sized>(r_d: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    r_d * u.sqrt()
}

/// Exponential power draw with the given mean; a zero mean yields zero.
pub fn sample_exponential<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    mean * e
}

/// Uniform phase on `[0, 2π)`.
pub fn sample_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * 2.0 * PI
}
