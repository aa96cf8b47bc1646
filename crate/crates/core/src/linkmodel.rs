//! Network parameters, per-link SINRs, secrecy capacity and the power budget.
//!
//! All powers are linear watts and all gains linear ratios; unit conversion
//! happens once at the configuration boundary.

use num_complex::Complex64;

use crate::channels::RicianSpec;
use crate::error::{Error, Result};

/// Tolerance used when checking that splits sum to one.
const SPLIT_TOLERANCE: f64 = 1e-9;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// An unregistered eavesdropper in the reflection half-space.
    External,
    /// The reflection user wiretaps its refraction partner.
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sic {
    Perfect,
    Imperfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Energy-splitting surface whose every element reflects, refracts and amplifies.
    MfRis,
    /// Passive energy-splitting surface with no amplifiers.
    StarRis,
    /// Amplifying surface with half the elements per side and no splitting.
    ActiveRis,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::MfRis, Architecture::StarRis, Architecture::ActiveRis];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::MfRis => "mf_ris",
            Architecture::StarRis => "star_ris",
            Architecture::ActiveRis => "active_ris",
        }
    }
}

impl Sic {
    pub fn name(self) -> &'static str {
        match self {
            Sic::Perfect => "perfect",
            Sic::Imperfect => "imperfect",
        }
    }
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::External => "external",
            Scenario::Internal => "internal",
        }
    }
}

/// Half-space of the surface a user lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Reflection,
    Refraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub sic: Sic,
    pub architecture: Architecture,
}

/// Every physical parameter of one network operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub architecture: Architecture,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Frequency-dependent factor (linear power gain).
    pub chi: f64,
    /// Base station to surface distance, m.
    pub d_b: f64,
    /// Surface to external eavesdropper distance, m.
    pub d_e: f64,
    /// Radius of the user disk, m.
    pub r_d: f64,
    pub kappa_b: RicianSpec,
    pub kappa_r: RicianSpec,
    pub kappa_t: RicianSpec,
    pub kappa_e: RicianSpec,
    pub a_r: f64,
    pub a_t: f64,
    pub e_r: f64,
    pub e_t: f64,
    pub beta_r: f64,
    pub beta_t: f64,
    pub beta_max: f64,
    pub elements: u32,
    pub sigma_n2: f64,
    pub sigma_e2: f64,
    pub sigma_s2: f64,
    /// Residual interference level left by imperfect SIC.
    pub varpi: f64,
    pub omega_ip_r: f64,
    pub omega_ip_er: f64,
    pub omega_ip_t: f64,
    pub omega_ip_rt: f64,
    pub rate_r: f64,
    pub rate_t: f64,
    pub p_b: f64,
    pub p_r: f64,
    pub p_ps: f64,
    pub p_dc: f64,
    /// Transmit power as seen by the external eavesdropper. `None` means `p_b`;
    /// pinning it holds the eavesdropper's SNR fixed while `p_b` grows.
    pub eve_tx_power: Option<f64>,
}

impl Default for SystemConfig {
    /// The reference operating point: 12 elements, 80/20 energy split,
    /// 25/75 power allocation, 1 W at the base station.
    fn default() -> Self {
        SystemConfig {
            architecture: Architecture::MfRis,
            alpha: 2.2,
            chi: db_to_linear(-30.0),
            d_b: 200.0,
            d_e: 15.0,
            r_d: 20.0,
            kappa_b: RicianSpec::new(3.0).expect("valid constant"),
            kappa_r: RicianSpec::new(3.0).expect("valid constant"),
            kappa_t: RicianSpec::new(3.0).expect("valid constant"),
            kappa_e: RicianSpec::RAYLEIGH,
            a_r: 0.25,
            a_t: 0.75,
            e_r: 0.8,
            e_t: 0.2,
            beta_r: db_to_linear(10.0),
            beta_t: db_to_linear(10.0),
            beta_max: db_to_linear(20.0),
            elements: 12,
            sigma_n2: dbm_to_watts(-90.0),
            sigma_e2: dbm_to_watts(-90.0),
            sigma_s2: dbm_to_watts(-80.0),
            varpi: 1.0,
            omega_ip_r: db_to_linear(-126.13),
            omega_ip_er: db_to_linear(-130.26),
            omega_ip_t: db_to_linear(-125.04),
            omega_ip_rt: db_to_linear(-129.17),
            rate_r: 0.1,
            rate_t: 0.05,
            p_b: 1.0,
            p_r: dbm_to_watts(-10.0),
            p_ps: dbm_to_watts(-10.0),
            p_dc: dbm_to_watts(-5.0),
            eve_tx_power: None,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite and > 0, got {v}")))
    }
}

fn nonnegative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite and >= 0, got {v}")))
    }
}

fn unit_interval(field: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(field, format!("must lie in [0, 1], got {v}")))
    }
}

impl SystemConfig {
    /// Checks every scenario-independent invariant.
    pub fn validate(&self) -> Result<()> {
        positive("alpha", self.alpha)?;
        positive("chi", self.chi)?;
        positive("d_b", self.d_b)?;
        positive("d_e", self.d_e)?;
        positive("r_d", self.r_d)?;
        unit_interval("a_r", self.a_r)?;
        unit_interval("a_t", self.a_t)?;
        if (self.a_r + self.a_t - 1.0).abs() > SPLIT_TOLERANCE {
            return Err(Error::config("a_r, a_t", "a_r + a_t must equal 1"));
        }
        unit_interval("e_r", self.e_r)?;
        unit_interval("e_t", self.e_t)?;
        if (self.e_r + self.e_t - 1.0).abs() > SPLIT_TOLERANCE {
            return Err(Error::config("e_r, e_t", "e_r + e_t must equal 1"));
        }
        positive("beta_max", self.beta_max)?;
        for (field, beta) in [("beta_r", self.beta_r), ("beta_t", self.beta_t)] {
            if !(beta > 0.0 && beta <= self.beta_max) {
                return Err(Error::config(field, format!("must lie in (0, beta_max], got {beta}")));
            }
        }
        if self.elements == 0 {
            return Err(Error::config("elements", "must be >= 1"));
        }
        positive("sigma_n2", self.sigma_n2)?;
        positive("sigma_e2", self.sigma_e2)?;
        nonnegative("sigma_s2", self.sigma_s2)?;
        unit_interval("varpi", self.varpi)?;
        nonnegative("omega_ip_r", self.omega_ip_r)?;
        nonnegative("omega_ip_er", self.omega_ip_er)?;
        nonnegative("omega_ip_t", self.omega_ip_t)?;
        nonnegative("omega_ip_rt", self.omega_ip_rt)?;
        positive("rate_r", self.rate_r)?;
        positive("rate_t", self.rate_t)?;
        positive("p_b", self.p_b)?;
        nonnegative("p_r", self.p_r)?;
        nonnegative("p_ps", self.p_ps)?;
        nonnegative("p_dc", self.p_dc)?;
        if let Some(p) = self.eve_tx_power {
            positive("eve_tx_power", p)?;
        }
        if self.architecture == Architecture::ActiveRis && !self.elements.is_multiple_of(2) {
            return Err(Error::config("elements", "active RIS needs an even element count"));
        }
        Ok(())
    }

    /// Checks the invariants plus the decoding order the scenario relies on.
    pub fn validate_for(&self, scenario: Scenario) -> Result<()> {
        self.validate()?;
        match scenario {
            Scenario::External if self.a_t <= self.a_r => {
                Err(Error::config("a_r, a_t", "external scenario needs a_t > a_r"))
            }
            Scenario::Internal if self.a_r <= self.a_t => {
                Err(Error::config("a_r, a_t", "internal scenario needs a_r > a_t"))
            }
            Scenario::Internal if self.e_t < self.e_r => {
                Err(Error::config("e_r, e_t", "internal scenario needs e_t >= e_r"))
            }
            _ => Ok(()),
        }
    }

    /// Elements serving one side of the surface.
    pub fn elements_per_side(&self) -> u32 {
        match self.architecture {
            Architecture::ActiveRis => self.elements / 2,
            _ => self.elements,
        }
    }

    /// Power gain a side's signal picks up at the surface: energy share times amplification.
    pub fn side_gain(&self, side: Side) -> f64 {
        let (e, beta) = match side {
            Side::Reflection => (self.e_r, self.beta_r),
            Side::Refraction => (self.e_t, self.beta_t),
        };
        match self.architecture {
            Architecture::ActiveRis => beta,
            _ => e * beta,
        }
    }

    pub fn eve_power(&self) -> f64 {
        self.eve_tx_power.unwrap_or(self.p_b)
    }

    /// Path loss `d^{−α}`.
    pub fn path_loss(&self, d: f64) -> f64 {
        d.powf(-self.alpha)
    }

    /// Residual level actually applied: zero under perfect SIC.
    pub fn residual(&self, sic: Sic) -> f64 {
        match sic {
            Sic::Perfect => 0.0,
            Sic::Imperfect => self.varpi,
        }
    }
}

/// One draw of everything random in a channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRealization {
    /// `Σ|h_r,m h_b,m|` over the reflection elements.
    pub g_legit_r: f64,
    /// `Σ|h_t,m h_b,m|` over the refraction elements.
    pub g_legit_t: f64,
    /// `Σ|h_e,m h_b,m| e^{jθ_m}` with phases the surface did not align.
    pub g_eve: Complex64,
    /// `|Σ h_φ,m|²`, the coherent sum that carries amplifier noise to each receiver.
    pub thermal_r: f64,
    pub thermal_t: f64,
    pub thermal_e: f64,
    /// Residual-interference channel powers left by imperfect SIC.
    pub v_r: f64,
    pub v_er: f64,
    pub v_t: f64,
    pub v_rt: f64,
    pub d_r: f64,
    pub d_t: f64,
}

struct Link {
    signal: f64,
    thermal: f64,
}

fn legit_link(cfg: &SystemConfig, side: Side, real: &LinkRealization) -> Link {
    let (g, t, d) = match side {
        Side::Reflection => (real.g_legit_r, real.thermal_r, real.d_r),
        Side::Refraction => (real.g_legit_t, real.thermal_t, real.d_t),
    };
    let pl = cfg.path_loss(d);
    let gain = cfg.side_gain(side);
    Link {
        signal: gain * cfg.chi * cfg.chi * cfg.path_loss(cfg.d_b) * pl * g * g,
        thermal: gain * cfg.chi * pl * cfg.sigma_s2 * t,
    }
}

fn eve_link(cfg: &SystemConfig, real: &LinkRealization) -> Link {
    let pl = cfg.path_loss(cfg.d_e);
    let gain = cfg.side_gain(Side::Reflection);
    Link {
        signal: gain * cfg.chi * cfg.chi * cfg.path_loss(cfg.d_b) * pl * real.g_eve.norm_sqr(),
        thermal: gain * cfg.chi * pl * cfg.sigma_s2 * real.thermal_e,
    }
}

/// SINR at the reflection user when it decodes the refraction user's message first.
pub fn sinr_r_decodes_t(real: &LinkRealization, cfg: &SystemConfig) -> f64 {
    let l = legit_link(cfg, Side::Reflection, real);
    cfg.p_b * cfg.a_t * l.signal / (cfg.p_b * cfg.a_r * l.signal + l.thermal + cfg.sigma_n2)
}

/// SINR at the reflection user for its own message after SIC.
pub fn sinr_r_own(real: &LinkRealization, cfg: &SystemConfig, sic: Sic) -> f64 {
    let l = legit_link(cfg, Side::Reflection, real);
    let residual = cfg.residual(sic) * cfg.p_b * real.v_r;
    cfg.p_b * cfg.a_r * l.signal / (l.thermal + residual + cfg.sigma_n2)
}

/// SINR at the refraction user, decoding directly with the partner as interference.
pub fn sinr_t_own(real: &LinkRealization, cfg: &SystemConfig) -> f64 {
    let l = legit_link(cfg, Side::Refraction, real);
    cfg.p_b * cfg.a_t * l.signal / (cfg.p_b * cfg.a_r * l.signal + l.thermal + cfg.sigma_n2)
}

/// SINR at the external eavesdropper for the refraction user's message.
pub fn sinr_eve_t(real: &LinkRealization, cfg: &SystemConfig) -> f64 {
    let l = eve_link(cfg, real);
    let p = cfg.eve_power();
    p * cfg.a_t * l.signal / (p * cfg.a_r * l.signal + l.thermal + cfg.sigma_e2)
}

/// SINR at the external eavesdropper for the reflection user's message after SIC.
pub fn sinr_eve_r(real: &LinkRealization, cfg: &SystemConfig, sic: Sic) -> f64 {
    let l = eve_link(cfg, real);
    let p = cfg.eve_power();
    let residual = cfg.residual(sic) * p * real.v_er;
    p * cfg.a_r * l.signal / (l.thermal + residual + cfg.sigma_e2)
}

/// SINR at the refraction user when its message is decoded last.
pub fn sinr_t_own_internal(real: &LinkRealization, cfg: &SystemConfig, sic: Sic) -> f64 {
    let l = legit_link(cfg, Side::Refraction, real);
    let residual = cfg.residual(sic) * cfg.p_b * real.v_t;
    cfg.p_b * cfg.a_t * l.signal / (residual + l.thermal + cfg.sigma_n2)
}

/// SINR at the reflection user when it wiretaps its partner after removing its own message.
pub fn sinr_ieve_t(real: &LinkRealization, cfg: &SystemConfig, sic: Sic) -> f64 {
    let l = legit_link(cfg, Side::Reflection, real);
    let residual = cfg.residual(sic) * cfg.p_b * real.v_rt;
    cfg.p_b * cfg.a_t * l.signal / (l.thermal + residual + cfg.sigma_e2)
}

/// `[log₂(1+γ_leg) − log₂(1+γ_eve)]⁺` in bits per channel use.
pub fn secrecy_capacity(g_leg: f64, g_eve: f64) -> f64 {
    ((g_leg.ln_1p() - g_eve.ln_1p()) / std::f64::consts::LN_2).max(0.0)
}

/// Power drawn by everything except the base station.
pub fn overhead_power(cfg: &SystemConfig) -> f64 {
    let m = cfg.elements as f64;
    let circuits = 2.0 * m * (cfg.p_ps + cfg.p_dc);
    match cfg.architecture {
        Architecture::StarRis => circuits,
        _ => m * cfg.p_r + circuits,
    }
}

/// Total consumed power: base station, amplifiers (if any) and per-element circuits.
pub fn total_power(cfg: &SystemConfig) -> f64 {
    cfg.p_b + overhead_power(cfg)
}

/// Base-station power that exhausts the budget `p_tot` once the surface is paid for.
pub fn solve_bs_power(cfg: &SystemConfig, p_tot: f64) -> Result<f64> {
    let p_b = p_tot - overhead_power(cfg);
    if p_b > 0.0 {
        Ok(p_b)
    } else {
        Err(Error::config(
            "p_tot",
            format!(
                "budget {p_tot:e} W does not cover the surface overhead {:e} W",
                overhead_power(cfg)
            ),
        ))
    }
}

/// Recasts a configuration for the requested architecture.
///
/// STAR-RIS keeps the energy split but loses amplification; active RIS keeps
/// amplification but dedicates half of the elements to each side.
pub fn map_architecture(spec: &ScenarioSpec, cfg: &SystemConfig) -> Result<SystemConfig> {
    let mut out = cfg.clone();
    out.architecture = spec.architecture;
    match spec.architecture {
        Architecture::MfRis => {}
        Architecture::StarRis => {
            out.beta_r = 1.0;
            out.beta_t = 1.0;
        }
        Architecture::ActiveRis => {
            if !cfg.elements.is_multiple_of(2) {
                return Err(Error::config("elements", "active RIS needs an even element count"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_realization() -> LinkRealization {
        LinkRealization {
            g_legit_r: 10.0,
            g_legit_t: 8.0,
            g_eve: Complex64::new(2.0, 1.0),
            thermal_r: 100.0,
            thermal_t: 90.0,
            thermal_e: 12.0,
            v_r: 1e-13,
            v_er: 1e-13,
            v_t: 1e-13,
            v_rt: 1e-13,
            d_r: 10.0,
            d_t: 12.0,
        }
    }

    #[test]
    fn total_power_examples() {
        let mut cfg = SystemConfig {
            p_b: 1.0,
            p_r: 0.0,
            p_ps: 0.0,
            p_dc: 0.0,
            ..SystemConfig::default()
        };
        assert_eq!(total_power(&cfg), 1.0);
        cfg.p_b = 0.5;
        cfg.p_r = 0.01;
        cfg.p_ps = 1e-4;
        cfg.p_dc = dbm_to_watts(-5.0);
        let expect = 0.5 + 0.12 + 24.0 * (1e-4 + dbm_to_watts(-5.0));
        assert!((total_power(&cfg) - expect).abs() < 1e-15);
        assert!((total_power(&cfg) - 0.630).abs() < 1e-3);
        let p_b = solve_bs_power(&cfg, total_power(&cfg)).unwrap();
        assert!((p_b - 0.5).abs() < 1e-15);
        assert!(solve_bs_power(&cfg, 0.1).is_err());
    }

    #[test]
    fn hand_computed_sinrs() {
        let cfg = SystemConfig::default();
        let real = unit_realization();
        let chi = 1e-3;
        let pl_b = 200f64.powf(-2.2);
        let pl_r = 10f64.powf(-2.2);
        let signal = 8.0 * chi * chi * pl_b * pl_r * 100.0;
        let thermal = 8.0 * chi * pl_r * 1e-11 * 100.0;
        let own = 0.25 * signal / (thermal + 1e-13 + 1e-12);
        assert!((sinr_r_own(&real, &cfg, Sic::Imperfect) / own - 1.0).abs() < 1e-12);
        let cross = 0.75 * signal / (0.25 * signal + thermal + 1e-12);
        assert!((sinr_r_decodes_t(&real, &cfg) / cross - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_channel_gives_zero_sinr() {
        let cfg = SystemConfig::default();
        let real = LinkRealization {
            g_legit_r: 0.0,
            g_legit_t: 0.0,
            g_eve: Complex64::new(0.0, 0.0),
            ..unit_realization()
        };
        assert_eq!(sinr_r_decodes_t(&real, &cfg), 0.0);
        assert_eq!(sinr_r_own(&real, &cfg, Sic::Imperfect), 0.0);
        assert_eq!(sinr_t_own(&real, &cfg), 0.0);
        assert_eq!(sinr_eve_t(&real, &cfg), 0.0);
        assert_eq!(sinr_eve_r(&real, &cfg, Sic::Imperfect), 0.0);
        assert_eq!(sinr_t_own_internal(&real, &cfg, Sic::Imperfect), 0.0);
        assert_eq!(sinr_ieve_t(&real, &cfg, Sic::Imperfect), 0.0);
    }

    #[test]
    fn no_intra_pair_interference_limit() {
        let cfg = SystemConfig {
            a_r: 0.0,
            a_t: 1.0,
            ..SystemConfig::default()
        };
        let real = unit_realization();
        let l = legit_link(&cfg, Side::Refraction, &real);
        let expect = cfg.p_b * l.signal / (l.thermal + cfg.sigma_n2);
        assert!((sinr_t_own(&real, &cfg) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn perfect_sic_matches_zero_residual() {
        let cfg = SystemConfig {
            varpi: 0.0,
            ..SystemConfig::default()
        };
        let real = unit_realization();
        assert_eq!(sinr_r_own(&real, &cfg, Sic::Imperfect), sinr_r_own(&real, &cfg, Sic::Perfect));
        assert_eq!(sinr_eve_r(&real, &cfg, Sic::Imperfect), sinr_eve_r(&real, &cfg, Sic::Perfect));
    }

    #[test]
    fn interference_dominated_limit() {
        let cfg = SystemConfig::default();
        let real = LinkRealization {
            v_r: 1e300,
            ..unit_realization()
        };
        assert!(sinr_r_own(&real, &cfg, Sic::Imperfect) < 1e-250);
    }

    #[test]
    fn secrecy_capacity_examples() {
        assert!((secrecy_capacity(3.0, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(secrecy_capacity(1.0, 3.0), 0.0);
        assert_eq!(secrecy_capacity(2.5, 2.5), 0.0);
    }

    #[test]
    fn architecture_mapping() {
        let cfg = SystemConfig::default();
        let spec = |architecture| ScenarioSpec {
            scenario: Scenario::External,
            sic: Sic::Perfect,
            architecture,
        };
        assert_eq!(map_architecture(&spec(Architecture::MfRis), &cfg).unwrap(), cfg);
        let active = map_architecture(&spec(Architecture::ActiveRis), &cfg).unwrap();
        assert_eq!(active.elements_per_side(), 6);
        assert_eq!(active.side_gain(Side::Refraction), cfg.beta_t);
        let star = map_architecture(&spec(Architecture::StarRis), &cfg).unwrap();
        assert_eq!((star.beta_r, star.beta_t), (1.0, 1.0));
        assert_eq!((star.e_r, star.e_t), (0.8, 0.2));
        assert!(total_power(&star) < total_power(&cfg));
        let odd = SystemConfig {
            elements: 7,
            ..cfg
        };
        assert!(map_architecture(&spec(Architecture::ActiveRis), &odd).is_err());
    }

    #[test]
    fn validation_names_the_rule() {
        let cfg = SystemConfig {
            a_r: 0.6,
            a_t: 0.5,
            ..SystemConfig::default()
        };
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("a_r + a_t must equal 1"), "{msg}");
        assert!(SystemConfig::default().validate_for(Scenario::Internal).is_err());
        assert!(SystemConfig::default().validate_for(Scenario::External).is_ok());
    }
}
