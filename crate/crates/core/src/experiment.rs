//! Flat configuration files, parameter sweeps and CSV tables.
//!
//! A configuration is a flat TOML document whose keys are the
//! [`SystemConfig`] field names, with a `_db` or `_dbm` suffix on every
//! unit-bearing quantity. Sweep rows are evaluated concurrently and
//! assembled in a fixed order; row `i` seeds its Monte Carlo run with
//! `seed + i`, so a sweep is byte-identical for any thread or partition count.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analysis::{
    secrecy_throughput, sop_ext_r_ipsic, sop_ext_r_ipsic_asym, sop_ext_r_psic,
    sop_ext_r_psic_asym, sop_ext_t, sop_ext_t_asym, sop_int_t, sop_int_t_ipsic_asym,
    sop_int_t_psic_asym, QuadOrders, QuadRules, SopResult,
};
use crate::channels::RicianSpec;
use crate::error::{Error, Result};
use crate::linkmodel::{
    db_to_linear, dbm_to_watts, map_architecture, solve_bs_power, Architecture, Scenario,
    ScenarioSpec, Side, Sic, SystemConfig,
};
use crate::montecarlo::{estimate_sop, McConfig, McEstimate};

/// CSV header, in column order.
pub const CSV_HEADER: [&str; 8] = [
    "sweep_value",
    "architecture",
    "sic",
    "sop_exact",
    "sop_asym",
    "sop_mc",
    "mc_stderr",
    "throughput",
];

/// Monte Carlo estimates outside this band are not compared against the closed forms.
pub const ORACLE_BAND: (f64, f64) = (1e-3, 0.9);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    PTotDbm,
    Elements,
    ER,
    PowerAllocation,
    Rate,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::PTotDbm => "p_tot_dbm",
            SweepVariable::Elements => "elements",
            SweepVariable::ER => "e_r",
            SweepVariable::PowerAllocation => "power_allocation",
            SweepVariable::Rate => "rate",
        }
    }

    fn parse(text: &str) -> Option<Self> {
        [
            SweepVariable::PTotDbm,
            SweepVariable::Elements,
            SweepVariable::ER,
            SweepVariable::PowerAllocation,
            SweepVariable::Rate,
        ]
        .into_iter()
        .find(|v| v.name() == text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    SopExact,
    SopAsymptotic,
    SopMc,
    ThroughputExact,
    ThroughputMc,
}

impl Output {
    pub const ALL: [Output; 5] = [
        Output::SopExact,
        Output::SopAsymptotic,
        Output::SopMc,
        Output::ThroughputExact,
        Output::ThroughputMc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::SopExact => "sop_exact",
            Output::SopAsymptotic => "sop_asymptotic",
            Output::SopMc => "sop_mc",
            Output::ThroughputExact => "throughput_exact",
            Output::ThroughputMc => "throughput_mc",
        }
    }
}

/// Which x-axis a sweep walks and which curves it produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// Nonempty and strictly monotone.
    pub values: Vec<f64>,
    pub scenario: Scenario,
    /// User whose secrecy outage is reported; internal sweeps always target refraction.
    pub user: Side,
    pub architectures: Vec<Architecture>,
    pub sics: Vec<Sic>,
    pub outputs: Vec<Output>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::config("sweep_values", "must be nonempty"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("sweep_values", "must be finite"));
        }
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::config("sweep_values", "must be strictly monotone"));
        }
        if self.variable == SweepVariable::Elements
            && self.values.iter().any(|v| v.fract() != 0.0 || *v < 1.0)
        {
            return Err(Error::config("sweep_values", "element counts must be positive integers"));
        }
        if self.architectures.is_empty() {
            return Err(Error::config("architectures", "must be nonempty"));
        }
        if self.sics.is_empty() {
            return Err(Error::config("sic_modes", "must be nonempty"));
        }
        if self.outputs.is_empty() {
            return Err(Error::config("outputs", "must be nonempty"));
        }
        if self.outputs.contains(&Output::ThroughputExact) && self.outputs.contains(&Output::ThroughputMc) {
            return Err(Error::config(
                "outputs",
                "the table has one throughput column; request throughput_exact or throughput_mc",
            ));
        }
        if self.scenario == Scenario::Internal && self.user == Side::Reflection {
            return Err(Error::config(
                "user",
                "the internal scenario only protects the refraction user",
            ));
        }
        Ok(())
    }
}

/// How the base-station power is fixed when the sweep does not set it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerSetting {
    /// Total budget in watts; the base station gets what the surface leaves over.
    Budget(f64),
    /// Base-station transmit power in watts.
    BaseStation(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub trials: u64,
    pub seed: u64,
    pub orders: QuadOrders,
    pub partitions: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            trials: 1_000_000,
            seed: 1,
            orders: QuadOrders::default(),
            partitions: rayon::current_num_threads(),
        }
    }
}

/// Everything a configuration file describes.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub system: SystemConfig,
    pub power: PowerSetting,
    /// The single operating point `analyze` evaluates.
    pub scenario: ScenarioSpec,
    pub sweep: SweepSpec,
    pub run: RunSettings,
}

impl Default for Experiment {
    fn default() -> Self {
        let system = SystemConfig::default();
        Experiment {
            power: PowerSetting::Budget(dbm_to_watts(30.0)),
            scenario: ScenarioSpec {
                scenario: Scenario::External,
                sic: Sic::Imperfect,
                architecture: system.architecture,
            },
            sweep: SweepSpec {
                variable: SweepVariable::PTotDbm,
                values: vec![30.0],
                scenario: Scenario::External,
                user: Side::Reflection,
                architectures: vec![system.architecture],
                sics: vec![Sic::Imperfect],
                outputs: vec![Output::SopExact, Output::SopMc],
            },
            run: RunSettings::default(),
            system,
        }
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<Experiment> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

/// Parses configuration text; `path` only labels errors.
pub fn parse_config(text: &str, path: &Path) -> Result<Experiment> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let mut reader = Reader {
        text,
        path,
        table: &table,
    };
    let exp = reader.experiment()?;
    if let Some(key) = table.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(reader.error(key, "unknown key"));
    }
    exp.system.validate_for(exp.scenario.scenario)?;
    exp.sweep.validate()?;
    if exp.sweep.variable == SweepVariable::PTotDbm && matches!(exp.power, PowerSetting::BaseStation(_)) {
        return Err(Error::config(
            "p_b_dbm",
            "cannot be combined with a p_tot_dbm sweep; the budget sets the base-station power",
        ));
    }
    Ok(exp)
}

const KNOWN_KEYS: &[&str] = &[
    "scenario", "sic", "architecture", "user", "alpha", "chi_db", "d_b", "d_e", "r_d",
    "kappa_b", "kappa_r", "kappa_t", "kappa_e", "a_r", "a_t", "e_r", "e_t", "beta_r_db",
    "beta_t_db", "beta_max_db", "elements", "sigma_n2_dbm", "sigma_e2_dbm", "sigma_s2_dbm",
    "varpi", "omega_ip_r_db", "omega_ip_er_db", "omega_ip_t_db", "omega_ip_rt_db", "rate_r",
    "rate_t", "p_tot_dbm", "p_b_dbm", "p_r_dbm", "p_ps_dbm", "p_dc_dbm", "eve_tx_power_dbm",
    "sweep_variable", "sweep_values", "architectures", "sic_modes", "outputs", "trials",
    "seed", "orders", "partitions",
];

struct Reader<'a> {
    text: &'a str,
    path: &'a Path,
    table: &'a toml::Table,
}

impl Reader<'_> {
    fn line_of(&self, key: &str) -> Option<usize> {
        self.text.lines().position(|line| {
            line.trim_start()
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
    }

    fn error(&self, key: &str, message: &str) -> Error {
        let location = match self.line_of(key) {
            Some(i) => format!("line {}: ", i + 1),
            None => String::new(),
        };
        Error::Parse {
            path: self.path.to_path_buf(),
            message: format!("{location}{key}: {message}"),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(v)) => Ok(Some(*v)),
            Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(_) => Err(self.error(key, "expected a number")),
        }
    }

    fn set(&self, key: &str, slot: &mut f64, convert: fn(f64) -> f64) -> Result<()> {
        if let Some(v) = self.float(key)? {
            *slot = convert(v);
        }
        Ok(())
    }

    fn unsigned(&self, key: &str) -> Result<Option<u64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(_) => Err(self.error(key, "expected a nonnegative integer")),
        }
    }

    fn string(&self, key: &str) -> Result<Option<&str>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(self.error(key, "expected a string")),
        }
    }

    fn strings(&self, key: &str) -> Result<Option<Vec<&str>>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| v.as_str().ok_or_else(|| self.error(key, "expected an array of strings")))
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => Err(self.error(key, "expected an array of strings")),
        }
    }

    fn enumerated<T: Copy>(&self, key: &str, text: &str, options: &[(&str, T)]) -> Result<T> {
        options
            .iter()
            .find(|(name, _)| *name == text)
            .map(|(_, v)| *v)
            .ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.error(key, &format!("expected one of {}, got {text:?}", names.join(", ")))
            })
    }

    fn one<T: Copy>(&self, key: &str, options: &[(&str, T)]) -> Result<Option<T>> {
        self.string(key)?
            .map(|s| self.enumerated(key, s, options))
            .transpose()
    }

    fn many<T: Copy>(&self, key: &str, options: &[(&str, T)]) -> Result<Option<Vec<T>>> {
        self.strings(key)?
            .map(|items| items.iter().map(|s| self.enumerated(key, s, options)).collect())
            .transpose()
    }

    fn kappa(&self, key: &str, slot: &mut RicianSpec) -> Result<()> {
        if let Some(v) = self.float(key)? {
            *slot = RicianSpec::new(v).map_err(|e| self.error(key, &e.to_string()))?;
        }
        Ok(())
    }

    fn experiment(&mut self) -> Result<Experiment> {
        let mut exp = Experiment::default();
        let s = &mut exp.system;
        let id = |v: f64| v;
        self.set("alpha", &mut s.alpha, id)?;
        self.set("chi_db", &mut s.chi, db_to_linear)?;
        self.set("d_b", &mut s.d_b, id)?;
        self.set("d_e", &mut s.d_e, id)?;
        self.set("r_d", &mut s.r_d, id)?;
        self.kappa("kappa_b", &mut s.kappa_b)?;
        self.kappa("kappa_r", &mut s.kappa_r)?;
        self.kappa("kappa_t", &mut s.kappa_t)?;
        self.kappa("kappa_e", &mut s.kappa_e)?;
        self.set("a_r", &mut s.a_r, id)?;
        self.set("a_t", &mut s.a_t, id)?;
        self.set("e_r", &mut s.e_r, id)?;
        self.set("e_t", &mut s.e_t, id)?;
        self.set("beta_r_db", &mut s.beta_r, db_to_linear)?;
        self.set("beta_t_db", &mut s.beta_t, db_to_linear)?;
        self.set("beta_max_db", &mut s.beta_max, db_to_linear)?;
        if let Some(m) = self.unsigned("elements")? {
            s.elements = u32::try_from(m).map_err(|_| self.error("elements", "too large"))?;
        }
        self.set("sigma_n2_dbm", &mut s.sigma_n2, dbm_to_watts)?;
        self.set("sigma_e2_dbm", &mut s.sigma_e2, dbm_to_watts)?;
        self.set("sigma_s2_dbm", &mut s.sigma_s2, dbm_to_watts)?;
        self.set("varpi", &mut s.varpi, id)?;
        self.set("omega_ip_r_db", &mut s.omega_ip_r, db_to_linear)?;
        self.set("omega_ip_er_db", &mut s.omega_ip_er, db_to_linear)?;
        self.set("omega_ip_t_db", &mut s.omega_ip_t, db_to_linear)?;
        self.set("omega_ip_rt_db", &mut s.omega_ip_rt, db_to_linear)?;
        self.set("rate_r", &mut s.rate_r, id)?;
        self.set("rate_t", &mut s.rate_t, id)?;
        self.set("p_r_dbm", &mut s.p_r, dbm_to_watts)?;
        self.set("p_ps_dbm", &mut s.p_ps, dbm_to_watts)?;
        self.set("p_dc_dbm", &mut s.p_dc, dbm_to_watts)?;
        s.eve_tx_power = self.float("eve_tx_power_dbm")?.map(dbm_to_watts);

        exp.power = match (self.float("p_tot_dbm")?, self.float("p_b_dbm")?) {
            (Some(_), Some(_)) => {
                return Err(self.error("p_b_dbm", "give either p_tot_dbm or p_b_dbm, not both"))
            }
            (_, Some(p_b)) => PowerSetting::BaseStation(dbm_to_watts(p_b)),
            (Some(p_tot), None) => PowerSetting::Budget(dbm_to_watts(p_tot)),
            (None, None) => exp.power,
        };
        if let PowerSetting::BaseStation(p_b) = exp.power {
            s.p_b = p_b;
        }

        const SCENARIOS: &[(&str, Scenario)] =
            &[("external", Scenario::External), ("internal", Scenario::Internal)];
        const SICS: &[(&str, Sic)] = &[("perfect", Sic::Perfect), ("imperfect", Sic::Imperfect)];
        const ARCHS: &[(&str, Architecture)] = &[
            ("mf_ris", Architecture::MfRis),
            ("star_ris", Architecture::StarRis),
            ("active_ris", Architecture::ActiveRis),
        ];
        const USERS: &[(&str, Side)] = &[("reflection", Side::Reflection), ("refraction", Side::Refraction)];
        const OUTPUTS: &[(&str, Output)] = &[
            ("sop_exact", Output::SopExact),
            ("sop_asymptotic", Output::SopAsymptotic),
            ("sop_mc", Output::SopMc),
            ("throughput_exact", Output::ThroughputExact),
            ("throughput_mc", Output::ThroughputMc),
        ];

        let scenario = self.one("scenario", SCENARIOS)?.unwrap_or(Scenario::External);
        let sic = self.one("sic", SICS)?.unwrap_or(Sic::Imperfect);
        let architecture = self.one("architecture", ARCHS)?.unwrap_or(Architecture::MfRis);
        let default_user = match scenario {
            Scenario::External => Side::Reflection,
            Scenario::Internal => Side::Refraction,
        };
        exp.system.architecture = architecture;
        exp.scenario = ScenarioSpec {
            scenario,
            sic,
            architecture,
        };

        // Without sweep keys the file describes one point, labelled by its budget,
        // or by its target rate when the base-station power is fixed directly.
        let implicit = match exp.power {
            PowerSetting::Budget(_) => SweepVariable::PTotDbm,
            PowerSetting::BaseStation(_) => SweepVariable::Rate,
        };
        let variable = match self.string("sweep_variable")? {
            None if self.table.contains_key("sweep_values") => SweepVariable::PTotDbm,
            None => implicit,
            Some(name) => SweepVariable::parse(name).ok_or_else(|| {
                self.error(
                    "sweep_variable",
                    &format!(
                        "expected one of p_tot_dbm, elements, e_r, power_allocation, rate, got {name:?}"
                    ),
                )
            })?,
        };
        let values = match self.table.get("sweep_values") {
            None => vec![match (variable, exp.power) {
                (SweepVariable::PTotDbm, PowerSetting::Budget(w)) => crate::linkmodel::watts_to_dbm(w),
                (SweepVariable::PTotDbm, PowerSetting::BaseStation(p_b)) => crate::linkmodel::watts_to_dbm(p_b),
                (SweepVariable::Elements, _) => exp.system.elements as f64,
                (SweepVariable::ER, _) => exp.system.e_r,
                (SweepVariable::PowerAllocation, _) => exp.system.a_r,
                (SweepVariable::Rate, _) => match default_user {
                    Side::Reflection => exp.system.rate_r,
                    Side::Refraction => exp.system.rate_t,
                },
            }],
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    toml::Value::Float(x) => Ok(*x),
                    toml::Value::Integer(x) => Ok(*x as f64),
                    _ => Err(self.error("sweep_values", "expected an array of numbers")),
                })
                .collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(self.error("sweep_values", "expected an array of numbers")),
        };
        exp.sweep = SweepSpec {
            variable,
            values,
            scenario,
            user: self.one("user", USERS)?.unwrap_or(default_user),
            architectures: self.many("architectures", ARCHS)?.unwrap_or(vec![architecture]),
            sics: self.many("sic_modes", SICS)?.unwrap_or(vec![sic]),
            outputs: self.many("outputs", OUTPUTS)?.unwrap_or(exp.sweep.outputs),
        };

        if let Some(t) = self.unsigned("trials")? {
            exp.run.trials = t;
        }
        if let Some(seed) = self.unsigned("seed")? {
            exp.run.seed = seed;
        }
        if let Some(p) = self.unsigned("partitions")? {
            exp.run.partitions = usize::try_from(p).map_err(|_| self.error("partitions", "too large"))?;
        }
        if let Some(text) = self.string("orders")? {
            exp.run.orders = text.parse().map_err(|e: Error| self.error("orders", &e.to_string()))?;
        }
        Ok(exp)
    }
}

/// One fully resolved operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    /// Already mapped to the architecture, with the base-station power solved.
    pub cfg: SystemConfig,
    pub spec: ScenarioSpec,
    pub user: Side,
}

impl OperatingPoint {
    /// Resolves `arch`/`sic`, applies the sweep value (if any) and fixes `P_b`.
    pub fn resolve(
        exp: &Experiment,
        architecture: Architecture,
        sic: Sic,
        value: Option<f64>,
    ) -> Result<Self> {
        let spec = ScenarioSpec {
            scenario: exp.sweep.scenario,
            sic,
            architecture,
        };
        let mut cfg = exp.system.clone();
        let mut power = exp.power;
        if let Some(v) = value {
            match exp.sweep.variable {
                SweepVariable::PTotDbm => power = PowerSetting::Budget(dbm_to_watts(v)),
                SweepVariable::Elements => cfg.elements = v as u32,
                SweepVariable::ER => {
                    cfg.e_r = v;
                    cfg.e_t = 1.0 - v;
                }
                SweepVariable::PowerAllocation => {
                    cfg.a_r = v;
                    cfg.a_t = 1.0 - v;
                }
                SweepVariable::Rate => match exp.sweep.user {
                    Side::Reflection => cfg.rate_r = v,
                    Side::Refraction => cfg.rate_t = v,
                },
            }
        }
        let mut cfg = map_architecture(&spec, &cfg)?;
        cfg.p_b = match power {
            PowerSetting::Budget(p_tot) => solve_bs_power(&cfg, p_tot)?,
            PowerSetting::BaseStation(p_b) => p_b,
        };
        cfg.validate_for(spec.scenario)?;
        Ok(OperatingPoint {
            cfg,
            spec,
            user: exp.sweep.user,
        })
    }

    pub fn rate(&self) -> f64 {
        match self.user {
            Side::Reflection => self.cfg.rate_r,
            Side::Refraction => self.cfg.rate_t,
        }
    }

    /// The closed-form SOP that describes this point.
    pub fn sop_exact(&self, rules: &QuadRules) -> Result<SopResult> {
        match (self.spec.scenario, self.user, self.spec.sic) {
            (Scenario::External, Side::Reflection, Sic::Imperfect) => sop_ext_r_ipsic(&self.cfg, rules),
            (Scenario::External, Side::Reflection, Sic::Perfect) => sop_ext_r_psic(&self.cfg, rules),
            (Scenario::External, Side::Refraction, _) => sop_ext_t(&self.cfg, rules),
            (Scenario::Internal, _, sic) => sop_int_t(&self.cfg, rules, sic),
        }
    }

    /// The high-power asymptote of [`Self::sop_exact`].
    pub fn sop_asymptotic(&self, rules: &QuadRules) -> Result<SopResult> {
        match (self.spec.scenario, self.user, self.spec.sic) {
            (Scenario::External, Side::Reflection, Sic::Imperfect) => {
                sop_ext_r_ipsic_asym(&self.cfg, rules)
            }
            (Scenario::External, Side::Reflection, Sic::Perfect) => sop_ext_r_psic_asym(&self.cfg, rules),
            (Scenario::External, Side::Refraction, _) => sop_ext_t_asym(&self.cfg, rules),
            (Scenario::Internal, _, Sic::Imperfect) => sop_int_t_ipsic_asym(&self.cfg, rules),
            (Scenario::Internal, _, Sic::Perfect) => sop_int_t_psic_asym(&self.cfg, rules),
        }
    }

    /// Simulated SOP of the targeted user.
    pub fn sop_mc(&self, mc: &McConfig) -> Result<McEstimate> {
        let est = estimate_sop(&self.spec, &self.cfg, mc)?;
        Ok(match self.user {
            Side::Reflection => est
                .reflection
                .ok_or_else(|| Error::config("user", "no reflection estimate in this scenario"))?,
            Side::Refraction => est.refraction,
        })
    }
}

/// One CSV row; `None` cells are left empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_value: f64,
    pub architecture: Architecture,
    pub sic: Sic,
    pub sop_exact: Option<f64>,
    pub sop_asym: Option<f64>,
    pub sop_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub throughput: Option<f64>,
}

/// Evaluates the requested outputs at one point.
pub fn evaluate(
    point: &OperatingPoint,
    outputs: &[Output],
    rules: &QuadRules,
    mc: &McConfig,
    sweep_value: f64,
) -> Result<Row> {
    let wants = |o: Output| outputs.contains(&o);
    let exact = if wants(Output::SopExact) || wants(Output::ThroughputExact) {
        Some(point.sop_exact(rules)?.value)
    } else {
        None
    };
    let sim = if wants(Output::SopMc) || wants(Output::ThroughputMc) {
        Some(point.sop_mc(mc)?)
    } else {
        None
    };
    let throughput = if wants(Output::ThroughputExact) {
        exact.map(|p| secrecy_throughput(p, point.rate()))
    } else if wants(Output::ThroughputMc) {
        sim.map(|e| secrecy_throughput(e.p_hat, point.rate()))
    } else {
        None
    };
    Ok(Row {
        sweep_value,
        architecture: point.spec.architecture,
        sic: point.spec.sic,
        sop_exact: exact.filter(|_| wants(Output::SopExact)),
        sop_asym: if wants(Output::SopAsymptotic) {
            Some(point.sop_asymptotic(rules)?.value)
        } else {
            None
        },
        sop_mc: sim.filter(|_| wants(Output::SopMc)).map(|e| e.p_hat),
        mc_stderr: sim.filter(|_| wants(Output::SopMc)).map(|e| e.stderr),
        throughput,
    })
}

/// Evaluates every (value × architecture × SIC mode) row, in that nesting order.
pub fn run_sweep(exp: &Experiment) -> Result<Vec<Row>> {
    exp.sweep.validate()?;
    let rules = QuadRules::new(exp.run.orders)?;
    let mut jobs = Vec::new();
    for &value in &exp.sweep.values {
        for &arch in &exp.sweep.architectures {
            for &sic in &exp.sweep.sics {
                jobs.push((value, arch, sic));
            }
        }
    }
    jobs.par_iter()
        .enumerate()
        .map(|(i, &(value, arch, sic))| {
            let point = OperatingPoint::resolve(exp, arch, sic, Some(value))?;
            let mc = McConfig {
                trials: exp.run.trials,
                seed: exp.run.seed.wrapping_add(i as u64),
                partitions: exp.run.partitions,
            };
            evaluate(&point, &exp.sweep.outputs, &rules, &mc, value)
        })
        .collect()
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.7e}")).unwrap_or_default()
}

/// Writes `rows` as CSV with eight significant digits per value.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            format!("{:.7e}", r.sweep_value),
            r.architecture.name().to_string(),
            r.sic.name().to_string(),
            cell(r.sop_exact),
            cell(r.sop_asym),
            cell(r.sop_mc),
            cell(r.mc_stderr),
            cell(r.throughput),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[Row], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a table written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    let parse_err = |message: String| Error::Parse {
        path: PathBuf::from(path),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let header = reader.headers().map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(parse_err(format!("unexpected header {header:?}")));
    }
    let number = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|e| parse_err(format!("{s:?}: {e}")))
        }
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let architecture = Architecture::ALL
            .into_iter()
            .find(|a| a.name() == &record[1])
            .ok_or_else(|| parse_err(format!("unknown architecture {:?}", &record[1])))?;
        let sic = [Sic::Perfect, Sic::Imperfect]
            .into_iter()
            .find(|s| s.name() == &record[2])
            .ok_or_else(|| parse_err(format!("unknown sic {:?}", &record[2])))?;
        rows.push(Row {
            sweep_value: number(&record[0])?.ok_or_else(|| parse_err("empty sweep value".into()))?,
            architecture,
            sic,
            sop_exact: number(&record[3])?,
            sop_asym: number(&record[4])?,
            sop_mc: number(&record[5])?,
            mc_stderr: number(&record[6])?,
            throughput: number(&record[7])?,
        });
    }
    Ok(rows)
}

/// Outcome of comparing a closed form against a simulated estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Within,
    Outside,
    /// The estimate lies outside [`ORACLE_BAND`]; no comparison is made.
    NotCompared,
}

/// `|analytic − p̂| ≤ max(4·stderr, 0.10·p̂)` whenever `p̂` lies in [`ORACLE_BAND`].
pub fn oracle_agreement(analytic: f64, est: &McEstimate) -> Agreement {
    if !(ORACLE_BAND.0..=ORACLE_BAND.1).contains(&est.p_hat) {
        return Agreement::NotCompared;
    }
    let tolerance = (4.0 * est.stderr).max(0.10 * est.p_hat);
    if (analytic - est.p_hat).abs() <= tolerance {
        Agreement::Within
    } else {
        Agreement::Outside
    }
}
