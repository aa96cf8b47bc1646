//! Trial-level simulation of the secrecy outage events.
//!
//! Trials are grouped into fixed blocks of [`BLOCK_TRIALS`]; block `b` draws
//! from ChaCha8 stream `b` of the seed. Partitions are contiguous block ranges
//! and only integer outage counts are reduced, so an estimate is bit-identical
//! for every partition count.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::secrecy_throughput;
use crate::channels::{
    sample_exponential, sample_phase, sample_rician, sample_user_distance, RicianSpec,
};
use crate::error::{Error, Result};
use crate::linkmodel::{
    map_architecture, secrecy_capacity, sinr_eve_r, sinr_eve_t, sinr_ieve_t, sinr_r_own,
    sinr_t_own, sinr_t_own_internal, Architecture, LinkRealization, Scenario, ScenarioSpec,
    SystemConfig,
};

/// Trials per RNG stream.
pub const BLOCK_TRIALS: u64 = 4096;

/// Smallest trial count for which an estimate is reported.
pub const MIN_REPORTED_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Number of contiguous block ranges evaluated concurrently.
    pub partitions: usize,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            seed,
            partitions: rayon::current_num_threads(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials < MIN_REPORTED_TRIALS {
            return Err(Error::config(
                "trials",
                format!("must be >= {MIN_REPORTED_TRIALS}, got {}", self.trials),
            ));
        }
        if self.partitions == 0 {
            return Err(Error::config("partitions", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    /// `√(p̂(1−p̂)/trials)`.
    pub stderr: f64,
    pub outages: u64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_counts(outages: u64, trials: u64, seed: u64) -> Self {
        let p_hat = outages as f64 / trials as f64;
        McEstimate {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            outages,
            trials,
            seed,
        }
    }
}

/// Empirical SOP of every user targeted by the scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopEstimates {
    /// Reflection user; only defined for the external scenario.
    pub reflection: Option<McEstimate>,
    pub refraction: McEstimate,
}

/// Outage indicators of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub reflection: Option<bool>,
    pub refraction: bool,
}

/// Throughput `(1 − p̂)·R` with stderr `stderr·R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimates {
    pub reflection: Option<ThroughputEstimate>,
    pub refraction: ThroughputEstimate,
}

/// Draws every random quantity of one channel use.
pub fn draw_realization<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> LinkRealization {
    let mut g_r = 0.0;
    let mut g_t = 0.0;
    let mut g_eve = Complex64::new(0.0, 0.0);
    let mut sum_r = Complex64::new(0.0, 0.0);
    let mut sum_t = Complex64::new(0.0, 0.0);
    let mut sum_e = Complex64::new(0.0, 0.0);
    let mut reflect = |rng: &mut R, h_b: f64| {
        let h_r = sample_rician(cfg.kappa_r, rng);
        let h_e = sample_rician(cfg.kappa_e, rng);
        g_r += h_r.norm() * h_b;
        g_eve += Complex64::from_polar(h_e.norm() * h_b, sample_phase(rng));
        sum_r += h_r;
        sum_e += h_e;
    };
    let refract = |rng: &mut R, h_b: f64, g_t: &mut f64, sum_t: &mut Complex64| {
        let h_t = sample_rician(cfg.kappa_t, rng);
        *g_t += h_t.norm() * h_b;
        *sum_t += h_t;
    };
    let hop = |rng: &mut R, k: RicianSpec| sample_rician(k, rng).norm();
    match cfg.architecture {
        Architecture::ActiveRis => {
            let half = cfg.elements / 2;
            for _ in 0..half {
                let h_b = hop(rng, cfg.kappa_b);
                reflect(rng, h_b);
            }
            for _ in 0..half {
                let h_b = hop(rng, cfg.kappa_b);
                refract(rng, h_b, &mut g_t, &mut sum_t);
            }
        }
        Architecture::MfRis | Architecture::StarRis => {
            for _ in 0..cfg.elements {
                let h_b = hop(rng, cfg.kappa_b);
                reflect(rng, h_b);
                refract(rng, h_b, &mut g_t, &mut sum_t);
            }
        }
    }
    LinkRealization {
        g_legit_r: g_r,
        g_legit_t: g_t,
        g_eve,
        thermal_r: sum_r.norm_sqr(),
        thermal_t: sum_t.norm_sqr(),
        thermal_e: sum_e.norm_sqr(),
        v_r: sample_exponential(cfg.omega_ip_r, rng),
        v_er: sample_exponential(cfg.omega_ip_er, rng),
        v_t: sample_exponential(cfg.omega_ip_t, rng),
        v_rt: sample_exponential(cfg.omega_ip_rt, rng),
        d_r: sample_user_distance(cfg.r_d, rng),
        d_t: sample_user_distance(cfg.r_d, rng),
    }
}

/// Outage indicators implied by one realization.
pub fn outcome(spec: &ScenarioSpec, cfg: &SystemConfig, real: &LinkRealization) -> TrialOutcome {
    match spec.scenario {
        Scenario::External => {
            let c_r = secrecy_capacity(sinr_r_own(real, cfg, spec.sic), sinr_eve_r(real, cfg, spec.sic));
            let c_t = secrecy_capacity(sinr_t_own(real, cfg), sinr_eve_t(real, cfg));
            TrialOutcome {
                reflection: Some(c_r < cfg.rate_r),
                refraction: c_t < cfg.rate_t,
            }
        }
        Scenario::Internal => {
            let c_t = secrecy_capacity(
                sinr_t_own_internal(real, cfg, spec.sic),
                sinr_ieve_t(real, cfg, spec.sic),
            );
            TrialOutcome {
                reflection: None,
                refraction: c_t < cfg.rate_t,
            }
        }
    }
}

/// One simulated channel use. `cfg` must already match `spec.architecture`.
pub fn simulate_trial<R: Rng + ?Sized>(
    spec: &ScenarioSpec,
    cfg: &SystemConfig,
    rng: &mut R,
) -> TrialOutcome {
    let real = draw_realization(cfg, rng);
    outcome(spec, cfg, &real)
}

/// Generator for block `block` of `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn prepare(spec: &ScenarioSpec, cfg: &SystemConfig, mc: &McConfig) -> Result<SystemConfig> {
    mc.validate()?;
    let mapped = map_architecture(spec, cfg)?;
    mapped.validate_for(spec.scenario)?;
    Ok(mapped)
}

fn count_block(spec: &ScenarioSpec, cfg: &SystemConfig, seed: u64, block: u64, trials: u64) -> (u64, u64) {
    let mut rng = block_rng(seed, block);
    let start = block * BLOCK_TRIALS;
    let n = BLOCK_TRIALS.min(trials - start);
    let (mut r, mut t) = (0, 0);
    for _ in 0..n {
        let o = simulate_trial(spec, cfg, &mut rng);
        r += u64::from(o.reflection.unwrap_or(false));
        t += u64::from(o.refraction);
    }
    (r, t)
}

/// Empirical secrecy outage probabilities from `mc.trials` independent trials.
pub fn estimate_sop(spec: &ScenarioSpec, cfg: &SystemConfig, mc: &McConfig) -> Result<SopEstimates> {
    let cfg = prepare(spec, cfg, mc)?;
    let blocks = mc.trials.div_ceil(BLOCK_TRIALS);
    let parts = (mc.partitions as u64).min(blocks);
    let counts: Vec<(u64, u64)> = (0..parts)
        .into_par_iter()
        .map(|p| {
            let lo = p * blocks / parts;
            let hi = (p + 1) * blocks / parts;
            (lo..hi).fold((0, 0), |acc, b| {
                let c = count_block(spec, &cfg, mc.seed, b, mc.trials);
                (acc.0 + c.0, acc.1 + c.1)
            })
        })
        .collect();
    let (r, t) = counts.iter().fold((0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1));
    Ok(SopEstimates {
        reflection: (spec.scenario == Scenario::External)
            .then(|| McEstimate::from_counts(r, mc.trials, mc.seed)),
        refraction: McEstimate::from_counts(t, mc.trials, mc.seed),
    })
}

fn throughput(est: &McEstimate, rate: f64) -> ThroughputEstimate {
    ThroughputEstimate {
        value: secrecy_throughput(est.p_hat, rate),
        stderr: est.stderr * rate,
    }
}

/// Empirical delay-limited secrecy throughput of every targeted user.
pub fn estimate_throughput(
    spec: &ScenarioSpec,
    cfg: &SystemConfig,
    mc: &McConfig,
) -> Result<ThroughputEstimates> {
    let sop = estimate_sop(spec, cfg, mc)?;
    Ok(ThroughputEstimates {
        reflection: sop.reflection.as_ref().map(|e| throughput(e, cfg.rate_r)),
        refraction: throughput(&sop.refraction, cfg.rate_t),
    })
}
