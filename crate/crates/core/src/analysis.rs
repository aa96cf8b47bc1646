//! Closed-form and asymptotic secrecy outage probabilities, secrecy diversity
//! order and delay-limited secrecy throughput.
//!
//! Every closed form averages a Gamma-approximated cascaded channel over the
//! random user distance (Fejér's rule on Chebyshev nodes) and, where needed,
//! over exponential eavesdropper or residual-interference powers
//! (Gauss-Laguerre). Sums are reduced in a fixed order so results never
//! depend on the thread count.

use rayon::prelude::*;

use crate::channels::{
    fit_gamma, highsnr_coeff, omega_br, thermal_gain, GammaFit, RicianSpec,
};
use crate::error::{Error, Result};
use crate::linkmodel::{Scenario, Side, Sic, SystemConfig};
use crate::numerics::{
    divergent_2f1_constant, fejer_rule, laguerre_rule, ln_factorial,
    regularized_lower_gamma, QuadRule, DEFAULT_2F1_DELTA,
};

/// Asymptotic values below this are reported as underflow by [`diversity_order`].
pub const SOP_UNDERFLOW: f64 = 1e-300;

/// Default transmit powers (60 and 70 dBm) for the diversity-order slope.
pub const DEFAULT_DIVERSITY_POWERS: (f64, f64) = (1e3, 1e4);

/// Quadrature orders: Fejér `w`, `n`, `i` and Laguerre `s`, `d`, `x`.
///
/// `s` and `d` drive the exact external forms; `x` drives the Laguerre sums
/// of the asymptotic external forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadOrders {
    pub w: usize,
    pub s: usize,
    pub d: usize,
    pub n: usize,
    pub i: usize,
    pub x: usize,
}

impl Default for QuadOrders {
    fn default() -> Self {
        QuadOrders {
            w: 100,
            s: 300,
            d: 300,
            n: 100,
            i: 100,
            x: 300,
        }
    }
}

impl std::str::FromStr for QuadOrders {
    type Err = Error;

    /// Parses `W,S,D,N,I,X`.
    fn from_str(text: &str) -> Result<Self> {
        let parts = text
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::config("orders", format!("expected six integers W,S,D,N,I,X: {e}")))?;
        match parts[..] {
            [w, s, d, n, i, x] => Ok(QuadOrders { w, s, d, n, i, x }),
            _ => Err(Error::config(
                "orders",
                format!("expected six integers W,S,D,N,I,X, got {}", parts.len()),
            )),
        }
    }
}

impl std::fmt::Display for QuadOrders {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{},{},{},{}", self.w, self.s, self.d, self.n, self.i, self.x)
    }
}

impl QuadOrders {
    pub fn doubled(self) -> Self {
        QuadOrders {
            w: 2 * self.w,
            s: 2 * self.s,
            d: 2 * self.d,
            n: 2 * self.n,
            i: 2 * self.i,
            x: 2 * self.x,
        }
    }
}

/// Prebuilt quadrature rules plus the branch-point offset for ₂F₁(2,½;5/2;·).
#[derive(Debug, Clone)]
pub struct QuadRules {
    orders: QuadOrders,
    w: QuadRule,
    s: QuadRule,
    d: QuadRule,
    n: QuadRule,
    i: QuadRule,
    x: QuadRule,
    delta: f64,
}

impl QuadRules {
    pub fn new(orders: QuadOrders) -> Result<Self> {
        Ok(QuadRules {
            orders,
            w: fejer_rule(orders.w)?,
            s: laguerre_rule(orders.s)?,
            d: laguerre_rule(orders.d)?,
            n: fejer_rule(orders.n)?,
            i: fejer_rule(orders.i)?,
            x: laguerre_rule(orders.x)?,
            delta: DEFAULT_2F1_DELTA,
        })
    }

    /// Replaces the distance from the ₂F₁ branch point used by the asymptotic forms.
    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        divergent_2f1_constant(delta)?;
        self.delta = delta;
        Ok(self)
    }

    pub fn orders(&self) -> QuadOrders {
        self.orders
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactQuadrature,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SopFlag {
    /// The value uses ₂F₁(2,½;5/2;1−δ) in place of the divergent value at 1.
    Asymptotic2F1LimitConvention,
    /// The raw value fell outside [0, 1] and was clamped.
    Clamped,
    /// Some quadrature nodes sit in the regime where outage is certain.
    PartialCertainOutage,
    /// Every node sits in the certain-outage regime; the value is exactly 1.
    CertainOutage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SopResult {
    /// Probability in [0, 1].
    pub value: f64,
    /// Value before clamping; differs from `value` only when [`SopFlag::Clamped`] is set.
    pub raw: f64,
    pub method: Method,
    pub orders: QuadOrders,
    pub flags: Vec<SopFlag>,
}

impl SopResult {
    fn new(raw: f64, method: Method, rules: &QuadRules, mut flags: Vec<SopFlag>) -> Self {
        let value = raw.clamp(0.0, 1.0);
        if value != raw {
            flags.push(SopFlag::Clamped);
        }
        flags.sort();
        flags.dedup();
        SopResult {
            value,
            raw,
            method,
            orders: rules.orders,
            flags,
        }
    }

    pub fn has_flag(&self, flag: SopFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// Channel statistics of one side of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideStats {
    pub elements: u32,
    /// Effective power gain `e_φ·β_φ` (or `β_φ` for active RIS).
    pub gain: f64,
    pub fit: GammaFit,
    /// `M(Mκ+1)/(κ+1)` for the side's user link.
    pub thermal: f64,
}

fn side_stats(cfg: &SystemConfig, side: Side) -> Result<SideStats> {
    let kappa = match side {
        Side::Reflection => cfg.kappa_r,
        Side::Refraction => cfg.kappa_t,
    };
    let elements = cfg.elements_per_side();
    Ok(SideStats {
        elements,
        gain: cfg.side_gain(side),
        fit: fit_gamma(elements, cfg.kappa_b, kappa)?,
        thermal: thermal_gain(elements, kappa),
    })
}

/// Every coefficient of the three theorems and their high-power limits.
///
/// Arrays hold the printed indices 1..3 at positions 0..2. Residual terms
/// (index 2 of the ipSIC sets) already include ϖ and vanish under perfect SIC.
/// The helper mappings Λ, Ψ, Υ, Δ and h are methods on this type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub rate_r: f64,
    pub rate_t: f64,
    pub r: SideStats,
    pub t: SideStats,
    /// Elements seen by the external eavesdropper; `|H_be|²` has mean equal to this.
    pub eve_elements: f64,
    pub mu_rr: [f64; 3],
    pub eps_er: [f64; 3],
    pub mu_tt: [f64; 3],
    pub eps_et: [f64; 3],
    pub mu_rt: [f64; 3],
    pub eps_rt: [f64; 3],
    pub mu_rr1_hat: f64,
    pub mu_tt1_hat: f64,
    pub mu_tt2_hat: f64,
    pub mu_rt1_hat: f64,
    pub mu_rt2_hat: f64,
    pub eps_rt1_hat: f64,
    pub eps_rt2_hat: f64,
    /// `a_r χ² B_r d_b^{−α} d_e^{−α} / (ϖ Ω_er)`: slope of the high-power Λ.
    pub eve_ratio_inf: f64,
    /// `E|Ĥ_br|²` for the internal eavesdropper.
    pub omega_br: f64,
    pub sigma_n2: f64,
    pub sigma_e2: f64,
    pub alpha: f64,
    pub r_d: f64,
    pub omega_ip_r: f64,
    pub varpi: f64,
}

impl CoefficientSet {
    pub fn new(cfg: &SystemConfig, sic: Sic) -> Result<Self> {
        cfg.validate()?;
        let r = side_stats(cfg, Side::Reflection)?;
        let t = side_stats(cfg, Side::Refraction)?;
        let varpi = cfg.residual(sic);
        let chi2 = cfg.chi * cfg.chi;
        let pl_b = cfg.path_loss(cfg.d_b);
        let pl_e = cfg.path_loss(cfg.d_e);
        let p_b = cfg.p_b;
        let rho_e = cfg.eve_power() / cfg.sigma_e2;
        let theta_e = thermal_gain(r.elements, cfg.kappa_e);
        let eps_3 = r.gain * cfg.chi * pl_e * cfg.sigma_s2 * theta_e / cfg.sigma_e2 + 1.0;
        let mu_rr3 = r.gain * cfg.chi * cfg.sigma_s2 * r.thermal;
        let mu_tt3 = t.gain * cfg.chi * cfg.sigma_s2 * t.thermal;
        let eve_ratio_inf = if cfg.varpi > 0.0 && cfg.omega_ip_er > 0.0 {
            cfg.a_r * chi2 * r.gain * pl_b * pl_e / (cfg.varpi * cfg.omega_ip_er)
        } else {
            f64::INFINITY
        };
        Ok(CoefficientSet {
            rate_r: cfg.rate_r,
            rate_t: cfg.rate_t,
            r,
            t,
            eve_elements: r.elements as f64,
            mu_rr: [p_b * cfg.a_r * chi2 * r.gain * pl_b, varpi * p_b, mu_rr3],
            eps_er: [
                rho_e * cfg.a_r * chi2 * r.gain * pl_b * pl_e,
                varpi * rho_e * cfg.omega_ip_er,
                eps_3,
            ],
            mu_tt: [
                p_b * cfg.a_t * chi2 * t.gain * pl_b,
                p_b * cfg.a_r * chi2 * t.gain * pl_b,
                mu_tt3,
            ],
            eps_et: [
                rho_e * cfg.a_t * chi2 * r.gain * pl_b * pl_e,
                rho_e * cfg.a_r * chi2 * r.gain * pl_b * pl_e,
                eps_3,
            ],
            mu_rt: [p_b * cfg.a_t * chi2 * t.gain * pl_b, varpi * p_b * cfg.omega_ip_t, mu_tt3],
            eps_rt: [p_b * cfg.a_t * chi2 * r.gain * pl_b, varpi * p_b * cfg.omega_ip_rt, mu_rr3],
            mu_rr1_hat: cfg.a_r * chi2 * r.gain * pl_b,
            mu_tt1_hat: cfg.a_t * chi2 * t.gain * pl_b,
            mu_tt2_hat: cfg.a_r * chi2 * t.gain * pl_b,
            mu_rt1_hat: cfg.a_t * chi2 * t.gain * pl_b,
            mu_rt2_hat: cfg.varpi * cfg.omega_ip_t,
            eps_rt1_hat: cfg.a_t * chi2 * r.gain * pl_b,
            eps_rt2_hat: cfg.varpi * cfg.omega_ip_rt,
            eve_ratio_inf,
            omega_br: omega_br(r.elements, cfg.kappa_b, cfg.kappa_r)?,
            sigma_n2: cfg.sigma_n2,
            sigma_e2: cfg.sigma_e2,
            alpha: cfg.alpha,
            r_d: cfg.r_d,
            omega_ip_r: cfg.omega_ip_r,
            varpi,
        })
    }

    /// Λ_r(y): the legitimate SINR u_r needs to beat an eavesdropper channel power `y`.
    pub fn lambda_r(&self, y: f64) -> f64 {
        let [e1, e2, e3] = self.eps_er;
        2f64.powf(self.rate_r) * (1.0 + e1 * y / (e2 + e3)) - 1.0
    }

    /// Λ_t(y) for u_t against the external eavesdropper.
    pub fn lambda_t(&self, y: f64) -> f64 {
        let [e1, e2, e3] = self.eps_et;
        2f64.powf(self.rate_t) * (1.0 + e1 * y / (e2 * y + e3)) - 1.0
    }

    /// High-power limit of Λ_r under imperfect SIC.
    pub fn lambda_r_inf(&self, y: f64) -> f64 {
        2f64.powf(self.rate_r) * (1.0 + self.eve_ratio_inf * y) - 1.0
    }

    /// Ψ(z): the SINR u_t needs when the internal eavesdropper sits at `d_r^α = z`.
    pub fn psi(&self, z: f64) -> f64 {
        let [e1, e2, e3] = self.eps_rt;
        2f64.powf(self.rate_t) * (1.0 + e1 * self.omega_br / ((e2 + self.sigma_e2) * z + e3)) - 1.0
    }

    /// Υ(z): high-power limit of Ψ under imperfect SIC.
    pub fn upsilon(&self, z: f64) -> f64 {
        2f64.powf(self.rate_t) * (1.0 + self.eps_rt1_hat * self.omega_br / (self.eps_rt2_hat * z)) - 1.0
    }

    /// Δ_∞(z, y): high-power limit of the perfect-SIC CDF argument.
    pub fn delta_inf(&self, z: f64, y: f64) -> f64 {
        let e3 = self.eps_rt[2];
        2f64.powf(self.rate_t) * self.eps_rt1_hat * self.omega_br * (self.sigma_n2 * y + self.mu_rt[2])
            / ((self.sigma_e2 * z + e3) * self.mu_rt1_hat)
    }


    /// q(z) = (z+1)R_d/2, mapping a Chebyshev node onto `d ∈ [0, R_d]`.
    pub fn q(&self, z: f64) -> f64 {
        (z + 1.0) * self.r_d / 2.0
    }
}

/// Fejér nodes mapped onto user distance: `(weight·q/R_d, q^α)`, folding in the
/// uniform-disc density `2d/R_d²`.
fn distance_nodes(c: &CoefficientSet, rule: &QuadRule) -> Vec<(f64, f64)> {
    rule.nodes()
        .iter()
        .enumerate()
        .map(|(j, &z)| {
            let q = c.q(z);
            (rule.weight(j) * q / c.r_d, q.powf(c.alpha))
        })
        .collect()
}

/// Weighted sum over outer nodes, evaluated in parallel and reduced in order.
fn ordered_sum<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<f64> + Sync + Send) -> Result<f64> {
    let parts: Vec<Result<f64>> = items.par_iter().map(f).collect();
    parts.into_iter().try_fold(0.0, |acc, p| Ok(acc + p?))
}

/// `P(k, √x / l)`, the Gamma-approximated CDF of a squared cascaded gain.
fn kernel(fit: &GammaFit, x: f64) -> Result<f64> {
    if x.is_infinite() {
        return Ok(1.0);
    }
    regularized_lower_gamma(fit.k, x.sqrt() / fit.l)
}

/// ln of the small-argument CDF `(C x)^M / (2M)!`.
fn ln_small_cdf(ln_c: f64, elements: u32, x: f64) -> f64 {
    let m = elements as f64;
    m * (ln_c + x.ln()) - ln_factorial(2 * elements as u64)
}

fn ln_highsnr_constant(kb: RicianSpec, kp: RicianSpec, delta: f64) -> Result<f64> {
    Ok((divergent_2f1_constant(delta)? * highsnr_coeff(kb, kp)).ln())
}

fn ext_r(cfg: &SystemConfig, rules: &QuadRules, sic: Sic) -> Result<SopResult> {
    cfg.validate_for(Scenario::External)?;
    let c = CoefficientSet::new(cfg, sic)?;
    let [mu1, mu2, mu3] = c.mu_rr;
    let outer = distance_nodes(&c, &rules.w);
    let residual: Vec<(f64, f64)> = match sic {
        Sic::Perfect => vec![(0.0, 1.0)],
        Sic::Imperfect => rules.s.significant().collect(),
    };
    let eve: Vec<(f64, f64)> = rules.d.significant().collect();
    let raw = ordered_sum(&outer, |&(wq, qa)| {
        let mut acc = 0.0;
        for &(tau_d, g_d) in &eve {
            let lambda = c.lambda_r(c.eve_elements * tau_d);
            for &(tau_s, g_s) in &residual {
                let x = ((mu2 * c.omega_ip_r * tau_s + c.sigma_n2) * qa + mu3) * lambda / mu1;
                acc += g_d * g_s * kernel(&c.r.fit, x)?;
            }
        }
        Ok(wq * acc)
    })?;
    Ok(SopResult::new(raw, Method::ExactQuadrature, rules, Vec::new()))
}

/// SOP of the reflection user under imperfect SIC against the external eavesdropper.
pub fn sop_ext_r_ipsic(cfg: &SystemConfig, rules: &QuadRules) -> Result<SopResult> {
    ext_r(cfg, rules, Sic::Imperfect)
}

/// SOP of the reflection user under perfect SIC against the external eavesdropper.
pub fn sop_ext_r_psic(cfg: &SystemConfig, rules: &QuadRules) -> Result<SopResult> {
    ext_r(cfg, rules, Sic::Perfect)
}

/// SOP of the refraction user against the external eavesdropper.
///
/// Nodes where u_t's SINR ceiling `a_t/a_r` cannot reach Λ_t count as certain outage.
pub fn sop_ext_t(cfg: &SystemConfig, rules: &QuadRules) -> Result<SopResult> {
    cfg.validate_for(Scenario::External)?;
    let c = CoefficientSet::new(cfg, Sic::Perfect)?;
    let [mu1, mu2, mu3] = c.mu_tt;
    let outer = distance_nodes(&c, &rules.w);
    let eve: Vec<(f64, f64, f64)> = rules
        .d
        .significant()
        .map(|(tau, g)| (tau, g, c.lambda_t(c.eve_elements * tau)))
        .collect();
    let certain = eve.iter().filter(|e| mu1 - mu2 * e.2 <= 0.0).count();
    let raw = ordered_sum(&outer, |&(wq, qa)| {
        let mut acc = 0.0;
        for &(_, g_d, lambda) in &eve {
            let margin = mu1 - mu2 * lambda;
            let p = if margin <= 0.0 {
                1.0
            } else {
                kernel(&c.t.fit, (mu3 + c.sigma_n2 * qa) * lambda / margin)?
            };
            acc += g_d * p;
        }
        Ok(wq * acc)
    })?;
    let flags = if certain > 0 { vec![SopFlag::PartialCertainOutage] } else { Vec::new() };
    Ok(SopResult::new(raw, Method::ExactQuadrature, rules, flags))
}

/// High-power SOP of the reflection user under imperfect SIC; independent of `p_b`.
pub fn sop_ext_r_ipsic_asym(cfg: &SystemConfig, rules: &QuadRules) -> Result<SopResult> {
    cfg.validate_for(Scenario::External)?;
    if !(cfg.varpi > 0.0 && cfg.omega_ip_r > 0.0 && cfg.omega_ip_er > 0.0) {
        return Err(Error::config(
            "varpi",
            "the imperfect-SIC asymptote needs varpi > 0 and nonzero residual powers",
        ));
    }
    let c = CoefficientSet::new(cfg, Sic::Imperfect)?;
    let outer = distance_nodes(&c, &rules.w);
    let lag: Vec<(f64, f64)> = rules.x.significant().collect();
    let raw = ordered_sum(&outer, |&(wq, qa)| {
        let mut acc = 0.0;
        for &(tau_d, g_d) in &lag {
            let lambda = c.lambda_r_inf(c.eve_elements * tau_d);
            for &(tau_s, g_s) in &lag {
                let x = cfg.varpi * c.omega_ip_r * tau_s * lambda * qa / c.mu_rr1_hat;
                acc += g_d * g_s * kernel(&c.r.fit, x)?;
            }
        }
        Ok(wq * acc)
    })?;
    Ok(SopResult::new(raw, Method::Asymptotic, rules, Vec::new()))
}

/// High-power SOP of the reflection user under perfect SIC; decays as `p_b^{−M}`.
pub fn sop_ext_r_psic_asym(cfg: &SystemConfig, rules: &QuadRules) -> Result<SopResult> {
    cfg.validate_for(Scenario::External)?;
    let c = CoefficientSet::new(cfg, Sic::Perfect)?;
    let ln_c = ln_highsnr_constant(cfg.kappa_b, cfg.kappa_r, rules.delta)?;
    let [mu1, _, mu3] = c.mu_rr;
    let outer = distance_nodes(&c, &rules.w);
    let lag: Vec<(f64, f64)> = rules.x.significant().collect();
    let raw = ordered_sum(&outer, |&(wq, qa)| {
        let mut acc = 0.0;
        for &(tau_d, g_d) in &lag {
            let x = (mu3 + c.sigma_n2 * qa) * c.lambda_r(c.eve_elements * tau_d) / mu1;
            acc += g_d * ln_small_cdf(ln_c, c.r.elements, x).exp();
        }
        Ok(wq * acc)
    })?;
    Ok(SopResult::new(
        raw,
        Method::Asymptotic,
        rules,
        vec![SopFlag::Asymptotic2F1LimitConvention],
    ))
}

/// High-power SOP of the refraction user against the external eavesdropper.
///
/// Nodes failing `a_t > Λ_t·a_r` contribute certain outage; if all fail the value is 1.
pub fn sop_ext_t_asym(cfg: &SystemConfig, rules: &QuadRules) -> Result<SopResult> {
    cfg.validate_for(Scenario::External)?;
    let c = CoefficientSet::new(cfg, Sic::Perfect)?;
    let ln_c = ln_highsnr_constant(cfg.kappa_b, cfg.kappa_t, rules.delta)?;
    let [mu1, mu2, mu3] = c.mu_tt;
    let lag: Vec<(f64, f64, f64)> = rules
        .x
        .significant()
        .map(|(tau, g)| (tau, g, c.lambda_t(c.eve_elements * tau)))
        .collect();
    let failing = lag.iter().filter(|e| cfg.a_t <= e.2 * cfg.a_r).count();
    if failing == lag.len() {
        return Ok(SopResult::new(1.0, Method::Asymptotic, rules, vec![SopFlag::CertainOutage]));
    }
    let outer = distance_nodes(&c, &rules.w);
    let raw = ordered_sum(&outer, |&(wq, qa)| {
        let mut acc = 0.0;
        for &(_, g_d, lambda) in &lag {
            acc += if cfg.a_t <= lambda * cfg.a_r {
                g_d
            } else {
                let x = (mu3 + c.sigma_n2 * qa) * lambda / (mu1 - mu2 * lambda);
                g_d * ln_small_cdf(ln_c, c.t.elements, x).exp()
            };
        }
        Ok(wq * acc)
    })?;
    let mut flags = vec![SopFlag::Asymptotic2F1LimitConvention];
    if failing > 0 {
        flags.push(SopFlag::PartialCertainOutage);
    }
    Ok(SopResult::new(raw, Method::Asymptotic, rules, flags))
}

/// SOP of the refraction user wiretapped by the reflection user.
///
/// The eavesdropper's cascaded power is replaced by its mean Ω_br.
pub fn sop_int_t(cfg: &SystemConfig, rules: &QuadRules, sic: Sic) -> Result<SopResult> {
    cfg.validate_for(Scenario::Internal)?;
    let c = CoefficientSet::new(cfg, sic)?;
    let [mu1, mu2, mu3] = c.mu_rt;
    let eve_nodes: Vec<(f64, f64)> = distance_nodes(&c, &rules.i)
        .into_iter()
        .map(|(w, hz)| (w, c.psi(hz)))
        .collect();
    let user_nodes = distance_nodes(&c, &rules.n);
    let raw = ordered_sum(&eve_nodes, |&(wz, psi)| {
        let mut acc = 0.0;
        for &(wy, hy) in &user_nodes {
            acc += wy * kernel(&c.t.fit, psi * ((mu2 + c.sigma_n2) * hy + mu3) / mu1)?;
        }
        Ok(wz * acc)
    })?;
    Ok(SopResult::new(raw, Method::ExactQuadrature, rules, Vec::new()))
}

/// High-power SOP of the internally wiretapped refraction user under imperfect SIC.
pub fn sop_int_t_ipsic_asym(cfg: &SystemConfig, rules: &QuadRules) -> Result<SopResult> {
    cfg.validate_for(Scenario::Internal)?;
    if !(cfg.varpi > 0.0 && cfg.omega_ip_t > 0.0 && cfg.omega_ip_rt > 0.0) {
        return Err(Error::config(
            "varpi",
            "the imperfect-SIC asymptote needs varpi > 0 and nonzero residual powers",
        ));
    }
    let c = CoefficientSet::new(cfg, Sic::Imperfect)?;
    let eve_nodes: Vec<(f64, f64)> = distance_nodes(&c, &rules.i)
        .into_iter()
        .map(|(w, hz)| (w, c.upsilon(hz)))
        .collect();
    let user_nodes = distance_nodes(&c, &rules.n);
    let raw = ordered_sum(&eve_nodes, |&(wz, upsilon)| {
        let mut acc = 0.0;
        for &(wy, hy) in &user_nodes {
            acc += wy * kernel(&c.t.fit, upsilon * c.mu_rt2_hat * hy / c.mu_rt1_hat)?;
        }
        Ok(wz * acc)
    })?;
    Ok(SopResult::new(raw, Method::Asymptotic, rules, Vec::new()))
}

/// High-power SOP of the internally wiretapped refraction user under perfect SIC.
pub fn sop_int_t_psic_asym(cfg: &SystemConfig, rules: &QuadRules) -> Result<SopResult> {
    cfg.validate_for(Scenario::Internal)?;
    let c = CoefficientSet::new(cfg, Sic::Perfect)?;
    let ln_c = ln_highsnr_constant(cfg.kappa_b, cfg.kappa_t, rules.delta)?;
    let eve_nodes = distance_nodes(&c, &rules.i);
    let user_nodes = distance_nodes(&c, &rules.n);
    let raw = ordered_sum(&eve_nodes, |&(wz, hz)| {
        let mut acc = 0.0;
        for &(wy, hy) in &user_nodes {
            acc += wy * ln_small_cdf(ln_c, c.t.elements, c.delta_inf(hz, hy)).exp();
        }
        Ok(wz * acc)
    })?;
    Ok(SopResult::new(
        raw,
        Method::Asymptotic,
        rules,
        vec![SopFlag::Asymptotic2F1LimitConvention],
    ))
}

/// Any SOP evaluator with the common signature.
pub type SopFn = fn(&SystemConfig, &QuadRules) -> Result<SopResult>;

/// Secrecy diversity order `−Δlog SOP / Δlog P_b` between two transmit powers.
///
/// The eavesdropper's transmit power is pinned at the configuration's value,
/// so only the legitimate links gain from the extra power.
pub fn diversity_order(
    asym_fn: SopFn,
    cfg: &SystemConfig,
    rules: &QuadRules,
    p_lo: f64,
    p_hi: f64,
) -> Result<f64> {
    if !(p_lo > 0.0 && p_hi > p_lo && p_hi.is_finite()) {
        return Err(Error::config("p_lo, p_hi", "need 0 < p_lo < p_hi"));
    }
    let eval = |p_b: f64| -> Result<f64> {
        let probe = SystemConfig {
            p_b,
            eve_tx_power: Some(cfg.eve_power()),
            ..cfg.clone()
        };
        let raw = asym_fn(&probe, rules)?.raw;
        if raw < SOP_UNDERFLOW {
            return Err(Error::SopUnderflow { value: raw });
        }
        Ok(raw)
    };
    let (lo, hi) = (eval(p_lo)?, eval(p_hi)?);
    Ok(-(hi.ln() - lo.ln()) / (p_hi.ln() - p_lo.ln()))
}

/// Delay-limited secrecy throughput `(1 − SOP)·R`.
pub fn secrecy_throughput(sop: f64, rate: f64) -> f64 {
    (1.0 - sop) * rate
}

/// Relative change of the three exact forms when every quadrature order doubles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub ext_r_ipsic: f64,
    pub ext_t: f64,
    pub int_t_ipsic: f64,
}

impl ConvergenceReport {
    pub fn worst(&self) -> f64 {
        self.ext_r_ipsic.max(self.ext_t).max(self.int_t_ipsic)
    }
}

/// Evaluates the exact forms at `orders` and at doubled orders.
///
/// `external` and `internal` must satisfy their scenario's decoding order.
pub fn convergence_check(
    external: &SystemConfig,
    internal: &SystemConfig,
    orders: QuadOrders,
) -> Result<ConvergenceReport> {
    let base = QuadRules::new(orders)?;
    let fine = QuadRules::new(orders.doubled())?;
    let rel = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
    Ok(ConvergenceReport {
        ext_r_ipsic: rel(
            sop_ext_r_ipsic(external, &base)?.value,
            sop_ext_r_ipsic(external, &fine)?.value,
        ),
        ext_t: rel(sop_ext_t(external, &base)?.value, sop_ext_t(external, &fine)?.value),
        int_t_ipsic: rel(
            sop_int_t(internal, &base, Sic::Imperfect)?.value,
            sop_int_t(internal, &fine, Sic::Imperfect)?.value,
        ),
    })
}

/// The internal-scenario reference point: `a_r = 0.9`, `e_t = 0.8`.
pub fn internal_reference(cfg: &SystemConfig) -> SystemConfig {
    SystemConfig {
        a_r: 0.9,
        a_t: 0.1,
        e_r: 0.2,
        e_t: 0.8,
        ..cfg.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_rules() -> QuadRules {
        QuadRules::new(QuadOrders {
            w: 40,
            s: 60,
            d: 60,
            n: 40,
            i: 40,
            x: 60,
        })
        .unwrap()
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(secrecy_throughput(1.0, 0.3), 0.0);
        assert_eq!(secrecy_throughput(0.0, 0.1), 0.1);
        assert!((secrecy_throughput(0.25, 0.2) - 0.15).abs() < 1e-16);
    }

    #[test]
    fn ipsic_with_zero_residual_matches_psic() {
        let rules = small_rules();
        let cfg = SystemConfig {
            varpi: 0.0,
            ..SystemConfig::default()
        };
        let ip = sop_ext_r_ipsic(&cfg, &rules).unwrap().value;
        let p = sop_ext_r_psic(&cfg, &rules).unwrap().value;
        assert!((ip - p).abs() < 1e-10, "{ip} vs {p}");
        let int = internal_reference(&cfg);
        assert_eq!(
            sop_int_t(&int, &rules, Sic::Imperfect).unwrap().value,
            sop_int_t(&int, &rules, Sic::Perfect).unwrap().value
        );
    }

    #[test]
    fn huge_rate_is_certain_outage() {
        let rules = small_rules();
        let cfg = SystemConfig {
            rate_r: 200.0,
            rate_t: 200.0,
            ..SystemConfig::default()
        };
        for v in [
            sop_ext_r_ipsic(&cfg, &rules).unwrap().value,
            sop_ext_r_psic(&cfg, &rules).unwrap().value,
            sop_ext_t(&cfg, &rules).unwrap().value,
            sop_int_t(&internal_reference(&cfg), &rules, Sic::Imperfect).unwrap().value,
        ] {
            assert!((v - 1.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn asymptote_regime_branch() {
        let rules = small_rules();
        let cfg = SystemConfig {
            a_r: 0.49,
            a_t: 0.51,
            rate_t: 5.0,
            ..SystemConfig::default()
        };
        let res = sop_ext_t_asym(&cfg, &rules).unwrap();
        assert_eq!(res.value, 1.0);
        assert!(res.has_flag(SopFlag::CertainOutage));
    }

    #[test]
    fn ipsic_asymptote_ignores_noise() {
        let rules = small_rules();
        let cfg = SystemConfig::default();
        let noisy = SystemConfig {
            sigma_n2: cfg.sigma_n2 * 7.0,
            sigma_s2: cfg.sigma_s2 * 3.0,
            ..cfg.clone()
        };
        assert_eq!(
            sop_ext_r_ipsic_asym(&cfg, &rules).unwrap().raw,
            sop_ext_r_ipsic_asym(&noisy, &rules).unwrap().raw
        );
    }

    #[test]
    fn internal_asymptotes_ignore_transmit_power() {
        let rules = small_rules();
        let cfg = internal_reference(&SystemConfig::default());
        let loud = SystemConfig {
            p_b: 100.0,
            ..cfg.clone()
        };
        assert_eq!(
            sop_int_t_ipsic_asym(&cfg, &rules).unwrap().raw,
            sop_int_t_ipsic_asym(&loud, &rules).unwrap().raw
        );
        assert_eq!(
            sop_int_t_psic_asym(&cfg, &rules).unwrap().raw,
            sop_int_t_psic_asym(&loud, &rules).unwrap().raw
        );
    }

    #[test]
    fn psic_asymptote_slope_is_element_count() {
        let rules = small_rules();
        for m in [2u32, 3, 4] {
            let cfg = SystemConfig {
                elements: m,
                ..SystemConfig::default()
            };
            let (lo, hi) = DEFAULT_DIVERSITY_POWERS;
            let d = diversity_order(sop_ext_r_psic_asym, &cfg, &rules, lo, hi).unwrap();
            assert!((d - m as f64).abs() < 0.05, "M = {m}: {d}");
        }
    }

    #[test]
    fn ordering_is_enforced() {
        let rules = small_rules();
        assert!(sop_int_t(&SystemConfig::default(), &rules, Sic::Perfect).is_err());
        assert!(sop_ext_t(&internal_reference(&SystemConfig::default()), &rules).is_err());
    }

    #[test]
    fn flags_survive_on_asymptotes() {
        let rules = small_rules();
        let res = sop_ext_r_psic_asym(&SystemConfig::default(), &rules).unwrap();
        assert!(res.has_flag(SopFlag::Asymptotic2F1LimitConvention));
        assert_eq!(res.method, Method::Asymptotic);
    }
}
