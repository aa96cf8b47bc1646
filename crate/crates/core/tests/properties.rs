//! Randomised invariants of the link model, channel statistics and closed forms.

use mfris_core::analysis::{
    sop_ext_r_ipsic, sop_ext_r_psic, sop_ext_r_psic_asym, sop_ext_t, sop_int_t, QuadOrders,
    QuadRules, SopFlag, SopResult,
};
use mfris_core::channels::{
    cascade_mean, cascade_mean_bessel, cascade_var, fit_gamma, RicianSpec,
};
use mfris_core::linkmodel::{
    map_architecture, secrecy_capacity, sinr_eve_r, sinr_eve_t, sinr_ieve_t, sinr_r_decodes_t,
    sinr_r_own, sinr_t_own, sinr_t_own_internal, Architecture, LinkRealization, Scenario,
    ScenarioSpec, Sic, SystemConfig,
};
use mfris_core::numerics::{gamma_fn, lower_incomplete_gamma};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn rules() -> &'static QuadRules {
    static RULES: OnceLock<QuadRules> = OnceLock::new();
    RULES.get_or_init(|| QuadRules::new(QuadOrders::default()).unwrap())
}

fn realization() -> impl Strategy<Value = LinkRealization> {
    (
        prop::array::uniform8(0.1f64..20.0),
        prop::array::uniform4(1e-15f64..1e-11),
        (1.0f64..20.0, 1.0f64..20.0),
    )
        .prop_map(|(g, v, (d_r, d_t))| LinkRealization {
            g_legit_r: g[0],
            g_legit_t: g[1],
            g_eve: Complex64::new(g[2], g[3]),
            thermal_r: g[4] * 10.0,
            thermal_t: g[5] * 10.0,
            thermal_e: g[6],
            v_r: v[0],
            v_er: v[1],
            v_t: v[2],
            v_rt: v[3],
            d_r,
            d_t,
        })
}

fn system() -> impl Strategy<Value = SystemConfig> {
    (0.05f64..0.45, 0.1f64..0.9, 1e-3f64..10.0, 0.05f64..1.0, 2u32..16).prop_map(
        |(a_r, e_r, p_b, varpi, m)| SystemConfig {
            a_r,
            a_t: 1.0 - a_r,
            e_r,
            e_t: 1.0 - e_r,
            p_b,
            varpi,
            elements: m,
            ..SystemConfig::default()
        },
    )
}

type Sinr = fn(&LinkRealization, &SystemConfig) -> f64;

fn all_sinrs() -> [(&'static str, Sinr); 8] {
    [
        ("r_decodes_t", sinr_r_decodes_t),
        ("r_own", |r, c| sinr_r_own(r, c, Sic::Imperfect)),
        ("t_own", sinr_t_own),
        ("eve_t", sinr_eve_t),
        ("eve_r", |r, c| sinr_eve_r(r, c, Sic::Imperfect)),
        ("t_own_internal", |r, c| sinr_t_own_internal(r, c, Sic::Imperfect)),
        ("ieve_t", |r, c| sinr_ieve_t(r, c, Sic::Imperfect)),
        ("t_decodes", sinr_t_own),
    ]
}

/// (SINR, signal gain bump, interference and noise bumps) for every SINR.
type Bump = fn(&mut LinkRealization, &mut SystemConfig);

fn bumps() -> Vec<(&'static str, Sinr, Bump, Vec<Bump>)> {
    vec![
        (
            "r_decodes_t",
            sinr_r_decodes_t,
            |r, _| r.g_legit_r *= 1.5,
            vec![|r, _| r.thermal_r *= 1.5, |_, c| c.sigma_n2 *= 1.5],
        ),
        (
            "r_own",
            |r, c| sinr_r_own(r, c, Sic::Imperfect),
            |r, _| r.g_legit_r *= 1.5,
            vec![|r, _| r.thermal_r *= 1.5, |r, _| r.v_r *= 1.5, |_, c| c.sigma_n2 *= 1.5],
        ),
        (
            "t_own",
            sinr_t_own,
            |r, _| r.g_legit_t *= 1.5,
            vec![|r, _| r.thermal_t *= 1.5, |_, c| c.sigma_n2 *= 1.5],
        ),
        (
            "eve_t",
            sinr_eve_t,
            |r, _| r.g_eve *= 1.5,
            vec![|r, _| r.thermal_e *= 1.5, |_, c| c.sigma_e2 *= 1.5],
        ),
        (
            "eve_r",
            |r, c| sinr_eve_r(r, c, Sic::Imperfect),
            |r, _| r.g_eve *= 1.5,
            vec![|r, _| r.thermal_e *= 1.5, |r, _| r.v_er *= 1.5, |_, c| c.sigma_e2 *= 1.5],
        ),
        (
            "t_own_internal",
            |r, c| sinr_t_own_internal(r, c, Sic::Imperfect),
            |r, _| r.g_legit_t *= 1.5,
            vec![|r, _| r.thermal_t *= 1.5, |r, _| r.v_t *= 1.5, |_, c| c.sigma_n2 *= 1.5],
        ),
        (
            "ieve_t",
            |r, c| sinr_ieve_t(r, c, Sic::Imperfect),
            |r, _| r.g_legit_r *= 1.5,
            vec![|r, _| r.thermal_r *= 1.5, |r, _| r.v_rt *= 1.5, |_, c| c.sigma_e2 *= 1.5],
        ),
    ]
}

proptest! {
    #[test]
    fn sinrs_rise_with_signal_and_fall_with_interference(real in realization(), cfg in system()) {
        for (name, sinr, up, downs) in bumps() {
            let base = sinr(&real, &cfg);
            prop_assert!(base >= 0.0, "{name}");
            let (mut r, mut c) = (real.clone(), cfg.clone());
            up(&mut r, &mut c);
            prop_assert!(sinr(&r, &c) > base, "{name}: signal");
            for down in &downs {
                let (mut r, mut c) = (real.clone(), cfg.clone());
                down(&mut r, &mut c);
                prop_assert!(sinr(&r, &c) < base, "{name}: interference");
            }
        }
    }

    #[test]
    fn zero_residual_is_perfect_sic_bit_for_bit(real in realization(), cfg in system()) {
        let zero = SystemConfig { varpi: 0.0, ..cfg.clone() };
        prop_assert_eq!(sinr_r_own(&real, &zero, Sic::Imperfect), sinr_r_own(&real, &cfg, Sic::Perfect));
        prop_assert_eq!(sinr_eve_r(&real, &zero, Sic::Imperfect), sinr_eve_r(&real, &cfg, Sic::Perfect));
        prop_assert_eq!(
            sinr_t_own_internal(&real, &zero, Sic::Imperfect),
            sinr_t_own_internal(&real, &cfg, Sic::Perfect)
        );
        prop_assert_eq!(sinr_ieve_t(&real, &zero, Sic::Imperfect), sinr_ieve_t(&real, &cfg, Sic::Perfect));
        for (_, f) in all_sinrs() {
            prop_assert!(f(&real, &cfg).is_finite());
        }
    }

    #[test]
    fn capacity_depends_only_on_the_ratio(g_leg in 0.0f64..1e3, g_eve in 0.0f64..1e3, c in 0.1f64..10.0) {
        let scaled = secrecy_capacity(c * (1.0 + g_leg) - 1.0, c * (1.0 + g_eve) - 1.0);
        prop_assert!((scaled - secrecy_capacity(g_leg, g_eve)).abs() < 1e-9);
    }

    #[test]
    fn architecture_mapping_is_idempotent(cfg in system(), arch in 0usize..3) {
        let cfg = SystemConfig { elements: cfg.elements * 2, ..cfg };
        let spec = ScenarioSpec {
            scenario: Scenario::External,
            sic: Sic::Imperfect,
            architecture: Architecture::ALL[arch],
        };
        let once = map_architecture(&spec, &cfg).unwrap();
        prop_assert_eq!(map_architecture(&spec, &once).unwrap(), once);
    }

    #[test]
    fn lower_gamma_saturates_at_gamma(a in 0.1f64..30.0) {
        let ratio = lower_incomplete_gamma(a, 50.0 + 10.0 * a).unwrap() / gamma_fn(a).unwrap();
        prop_assert!((1.0 - 1e-9..=1.0 + 1e-15).contains(&ratio), "{ratio}");
    }

    #[test]
    fn gamma_fit_matches_first_two_moments(m in 1u32..64, kb in 0.0f64..10.0, kp in 0.0f64..10.0) {
        let (kb, kp) = (RicianSpec::new(kb).unwrap(), RicianSpec::new(kp).unwrap());
        let fit = fit_gamma(m, kb, kp).unwrap();
        let (e, d) = (cascade_mean(kb, kp), cascade_var(kb, kp));
        let mf = m as f64;
        prop_assert!((fit.k * fit.l / (mf * e) - 1.0).abs() < 1e-12);
        prop_assert!((fit.k * fit.l * fit.l / (mf * d) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn moment_forms_agree_on_kappa_grid() {
    let grid = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0];
    for kb in grid {
        for kp in grid {
            let (kb, kp) = (RicianSpec::new(kb).unwrap(), RicianSpec::new(kp).unwrap());
            let (a, b) = (cascade_mean(kb, kp), cascade_mean_bessel(kb, kp));
            assert!((a - b).abs() < 1e-9, "{kb:?} {kp:?}: {a} vs {b}");
        }
    }
}

fn unclamped(r: SopResult) -> f64 {
    assert!(!r.has_flag(SopFlag::Clamped));
    assert!((0.0..=1.0).contains(&r.value) && r.value == r.raw, "{r:?}");
    r.value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn exact_sop_is_a_probability(cfg in system(), rate in 0.01f64..2.0) {
        let cfg = SystemConfig { rate_r: rate, rate_t: rate / 2.0, ..cfg };
        unclamped(sop_ext_r_ipsic(&cfg, rules()).unwrap());
        unclamped(sop_ext_r_psic(&cfg, rules()).unwrap());
        unclamped(sop_ext_t(&cfg, rules()).unwrap());
        let internal = SystemConfig {
            a_r: cfg.a_t,
            a_t: cfg.a_r,
            e_r: cfg.e_r.min(cfg.e_t),
            e_t: cfg.e_r.max(cfg.e_t),
            ..cfg
        };
        unclamped(sop_int_t(&internal, rules(), Sic::Imperfect).unwrap());
        unclamped(sop_int_t(&internal, rules(), Sic::Perfect).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn sop_never_falls_as_rate_rises(cfg in system()) {
        let rates: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
        let mut last = [0.0f64; 3];
        for &rate in &rates {
            let c = SystemConfig { rate_r: rate, rate_t: rate, ..cfg.clone() };
            let now = [
                sop_ext_r_ipsic(&c, rules()).unwrap().value,
                sop_ext_r_psic(&c, rules()).unwrap().value,
                sop_ext_t(&c, rules()).unwrap().value,
            ];
            for k in 0..3 {
                prop_assert!(now[k] >= last[k] - 1e-12, "form {k} at R={rate}: {} < {}", now[k], last[k]);
            }
            last = now;
        }
    }
}

#[test]
fn zero_residual_internal_matches_perfect_branch() {
    let cfg = SystemConfig {
        a_r: 0.9,
        a_t: 0.1,
        e_r: 0.2,
        e_t: 0.8,
        ..SystemConfig::default()
    };
    let zero = SystemConfig { varpi: 0.0, ..cfg.clone() };
    let a = sop_int_t(&zero, rules(), Sic::Imperfect).unwrap().value;
    let b = sop_int_t(&cfg, rules(), Sic::Perfect).unwrap().value;
    assert!((a - b).abs() < 1e-10, "{a} vs {b}");
}

#[test]
fn psic_asymptote_tracks_exact_at_high_power() {
    let ratios: Vec<(u32, f64)> = (2..=4)
        .map(|m| {
            let cfg = SystemConfig {
                elements: m,
                p_b: 1e3,
                eve_tx_power: Some(1.0),
                ..SystemConfig::default()
            };
            let exact = sop_ext_r_psic(&cfg, rules()).unwrap().value;
            let asym = sop_ext_r_psic_asym(&cfg, rules()).unwrap().raw;
            (m, asym / exact)
        })
        .collect();
    assert!(
        ratios.iter().all(|(_, r)| (0.75..=1.25).contains(r)),
        "asymptote/exact ratios {ratios:?}"
    );
}
