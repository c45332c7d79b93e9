use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ini::Ini;

use crate::cgf::{
    compound_binomial_cgf, compound_poisson_cgf, gamma_gain_cgf, nofading_cgf, omega_cgf, ppp_comp_cgf, CgfRef, GainLaw,
    OmegaCgf, OmegaSpec, PppGeometry,
};
use crate::error::{Error, Result};
use crate::oracles::{InversionSettings, McSettings};
use crate::quad::QuadratureSettings;
use crate::spa::{BaseKind, SpaMethod};

/// Outage model of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Poisson numbers of cooperating (`pλ`) and interfering (`(1−p)λ`)
    /// nodes with Nakagami fading.
    PoissonNakagami,
    /// Binomial numbers `Bin(L, p)` cooperating and `Bin(L, 1−p)` interfering.
    BinomialNakagami,
    /// Cooperative cellular PPP with Nakagami fading.
    PppComp,
    /// Cooperative cellular PPP without fading.
    PppCompNofading,
}

impl Model {
    pub fn is_ppp(self) -> bool {
        matches!(self, Model::PppComp | Model::PppCompNofading)
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson_nakagami" => Ok(Model::PoissonNakagami),
            "binomial_nakagami" => Ok(Model::BinomialNakagami),
            "ppp_comp" => Ok(Model::PppComp),
            "ppp_comp_nofading" => Ok(Model::PppCompNofading),
            _ => Err(Error::config("model", format!("unknown model `{s}`"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::PoissonNakagami => "poisson_nakagami",
            Model::BinomialNakagami => "binomial_nakagami",
            Model::PppComp => "ppp_comp",
            Model::PppCompNofading => "ppp_comp_nofading",
        })
    }
}

/// How an outage value is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spa(SpaMethod),
    GilPelaez,
    Mc,
}

impl Method {
    pub fn is_oracle(self) -> bool {
        matches!(self, Method::GilPelaez | Method::Mc)
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Spa(SpaMethod::Auto)),
            "nig" => Ok(Method::Spa(SpaMethod::Base(BaseKind::AsymmetricNig))),
            "sym_nig" => Ok(Method::Spa(SpaMethod::Base(BaseKind::SymmetricNig))),
            "normal" => Ok(Method::Spa(SpaMethod::Base(BaseKind::Normal))),
            "gil_pelaez" => Ok(Method::GilPelaez),
            "mc" => Ok(Method::Mc),
            _ => Err(Error::config("method", format!("unknown method `{s}`"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Spa(SpaMethod::Auto) => f.write_str("auto"),
            Method::Spa(SpaMethod::Base(b)) => write!(f, "{b}"),
            Method::GilPelaez => f.write_str("gil_pelaez"),
            Method::Mc => f.write_str("mc"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// A one-dimensional parameter grid, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub field: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl Sweep {
    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let f = i as f64 / n;
                match self.scale {
                    Scale::Linear => self.from + f * (self.to - self.from),
                    Scale::Log => self.from * (self.to / self.from).powf(f),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !SWEEPABLE.contains(&self.field.as_str()) {
            return Err(Error::config("sweep_field", format!("`{}` cannot be swept", self.field)));
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(Error::config("sweep_from", "sweep bounds must be finite"));
        }
        if self.steps == 0 {
            return Err(Error::config("sweep_steps", "must be at least 1"));
        }
        if self.scale == Scale::Log && !(self.from > 0.0 && self.to > 0.0) {
            return Err(Error::config("sweep_scale", "log sweeps need positive bounds"));
        }
        Ok(())
    }
}

/// Numeric scenario fields a sweep may vary.
pub const SWEEPABLE: &[&str] = &[
    "theta_db", "sigma2", "lambda", "p", "L", "m_f", "r_f", "a_m", "R_m", "alpha_pl", "power_db", "r_tot_m", "avg_bs_count",
];

/// Every accepted configuration key.
pub const KEYS: &[&str] = &[
    "model", "theta_db", "sigma2", "lambda", "p", "L", "m_f", "r_f", "a_m", "R_m", "alpha_pl", "power_db", "r_tot_m",
    "avg_bs_count", "method", "trials", "seed", "stream_block", "abs_tol", "rel_tol", "max_panels", "tail_cut",
    "sweep_field", "sweep_from", "sweep_to", "sweep_steps", "sweep_scale",
];

/// One fully specified experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub theta_db: f64,
    pub sigma2: f64,
    pub lambda: Option<f64>,
    pub p: f64,
    pub l: u32,
    pub m_f: f64,
    pub r_f: f64,
    pub a_m: f64,
    pub r_m: f64,
    pub alpha_pl: f64,
    pub power_db: f64,
    pub r_tot_m: f64,
    pub avg_bs_count: Option<f64>,
    pub methods: Vec<Method>,
    pub mc: McSettings,
    pub inversion: InversionSettings,
    pub sweep: Option<Sweep>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "default".into(),
            model: Model::PoissonNakagami,
            theta_db: 0.0,
            sigma2: 0.0,
            lambda: None,
            p: 0.7,
            l: 10,
            m_f: 1.0,
            r_f: 1.0,
            a_m: 30.0,
            r_m: 150.0,
            alpha_pl: 4.0,
            power_db: 0.0,
            r_tot_m: 1000.0,
            avg_bs_count: None,
            methods: vec![Method::Spa(SpaMethod::Auto)],
            mc: McSettings::default(),
            inversion: InversionSettings::default(),
            sweep: None,
        }
    }
}

fn num(key: &str, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| Error::config(key, format!("expected a number, got `{v}`")))
}

fn int<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| Error::config(key, format!("expected a non-negative integer, got `{v}`")))
}

impl Scenario {
    /// Builds a scenario from `key = value` pairs applied in order; later
    /// pairs override earlier ones. `model` and `theta_db` are required.
    pub fn from_pairs<'a>(name: &str, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Scenario> {
        let mut sc = Scenario { name: name.to_string(), ..Default::default() };
        let mut seen = Vec::new();
        let mut sweep_keys: Vec<(&str, &str)> = Vec::new();
        for (k, v) in pairs {
            if k.starts_with("sweep_") && KEYS.contains(&k) {
                sweep_keys.retain(|(kk, _)| *kk != k);
                sweep_keys.push((k, v));
            } else {
                sc.set(k, v)?;
            }
            seen.push(k);
        }
        for required in ["model", "theta_db"] {
            if !seen.contains(&required) {
                return Err(Error::config(required, format!("missing in scenario `{name}`")));
            }
        }
        if !sweep_keys.is_empty() {
            sc.sweep = Some(parse_sweep(&sweep_keys)?);
        }
        sc.validate()?;
        Ok(sc)
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "model" => self.model = v.trim().parse()?,
            "method" => {
                self.methods = v.split(',').map(|m| m.trim().parse()).collect::<Result<_>>()?;
            }
            "L" => self.l = int(key, v)?,
            "trials" => self.mc.trials = int(key, v)?,
            "seed" => self.mc.seed = int(key, v)?,
            "stream_block" => self.mc.stream_block = int(key, v)?,
            "max_panels" => self.inversion.max_panels = int(key, v)?,
            "abs_tol" => self.inversion.abs_tol = num(key, v)?,
            "rel_tol" => self.inversion.rel_tol = num(key, v)?,
            "tail_cut" => self.inversion.tail_cut = Some(num(key, v)?),
            k if SWEEPABLE.contains(&k) => self.set_value(k, num(k, v)?)?,
            k if KEYS.contains(&k) => return Err(Error::config(k, "only valid in a sweep definition")),
            k => return Err(Error::config(k, "unknown key")),
        }
        Ok(())
    }

    /// Sets a numeric field (one of [`SWEEPABLE`]).
    pub fn set_value(&mut self, key: &str, v: f64) -> Result<()> {
        match key {
            "theta_db" => self.theta_db = v,
            "sigma2" => self.sigma2 = v,
            "lambda" => self.lambda = Some(v),
            "p" => self.p = v,
            "L" => {
                if !(v >= 1.0 && v <= u32::MAX as f64 && v.fract() == 0.0) {
                    return Err(Error::config("L", format!("must be a positive integer, got {v}")));
                }
                self.l = v as u32;
            }
            "m_f" => self.m_f = v,
            "r_f" => self.r_f = v,
            "a_m" => self.a_m = v,
            "R_m" => self.r_m = v,
            "alpha_pl" => self.alpha_pl = v,
            "power_db" => self.power_db = v,
            "r_tot_m" => self.r_tot_m = v,
            "avg_bs_count" => self.avg_bs_count = Some(v),
            k => return Err(Error::config(k, "not a numeric field")),
        }
        Ok(())
    }

    /// Copy with one numeric field changed and revalidated.
    pub fn with_value(&self, key: &str, v: f64) -> Result<Scenario> {
        let mut sc = self.clone();
        sc.set_value(key, v)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta_db.is_finite() {
            return Err(Error::config("theta_db", format!("must be finite, got {}", self.theta_db)));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::config("sigma2", format!("must be non-negative, got {}", self.sigma2)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::config("p", format!("must lie in [0, 1], got {}", self.p)));
        }
        GainLaw::new(self.m_f, self.r_f)?;
        if self.methods.is_empty() {
            return Err(Error::config("method", "at least one method is required"));
        }
        self.mc.validate()?;
        self.inversion.validate()?;
        match self.model {
            Model::PoissonNakagami => {
                let lam = self.lambda.ok_or_else(|| Error::config("lambda", "required for poisson_nakagami"))?;
                if !(lam > 0.0 && lam.is_finite()) {
                    return Err(Error::config("lambda", format!("must be positive, got {lam}")));
                }
                if !(self.p > 0.0 && self.p < 1.0) {
                    return Err(Error::config("p", format!("must lie strictly inside (0, 1), got {}", self.p)));
                }
            }
            Model::BinomialNakagami => {
                if self.l == 0 {
                    return Err(Error::config("L", "must be at least 1"));
                }
            }
            Model::PppComp | Model::PppCompNofading => {
                if self.lambda.is_some() == self.avg_bs_count.is_some() {
                    return Err(Error::config("lambda", "give exactly one of lambda and avg_bs_count"));
                }
                if let Some(n) = self.avg_bs_count {
                    if !(n > 0.0 && n.is_finite()) {
                        return Err(Error::config("avg_bs_count", format!("must be positive, got {n}")));
                    }
                }
                if !(self.a_m > 0.0 && self.a_m < self.r_m && self.r_m < self.r_tot_m && self.r_tot_m.is_finite()) {
                    return Err(Error::config(
                        "R_m",
                        format!("need 0 < a_m < R_m < r_tot_m, got {}, {}, {}", self.a_m, self.r_m, self.r_tot_m),
                    ));
                }
                if !self.power_db.is_finite() {
                    return Err(Error::config("power_db", "must be finite"));
                }
                self.geometry().validate()?;
            }
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
            for v in s.grid() {
                self.clone_without_sweep().with_value(&s.field, v).map_err(|e| match e {
                    Error::Config { field, detail } => Error::Config { field, detail: format!("{detail} (sweep value {v})") },
                    e => e,
                })?;
            }
        }
        Ok(())
    }

    fn clone_without_sweep(&self) -> Scenario {
        Scenario { sweep: None, ..self.clone() }
    }

    /// Linear SINR threshold.
    pub fn theta(&self) -> f64 {
        10f64.powf(self.theta_db / 10.0)
    }

    pub fn gain(&self) -> GainLaw {
        GainLaw { m_f: self.m_f, r_f: self.r_f }
    }

    /// Base-station intensity of the PPP models (per m²).
    pub fn ppp_lambda(&self) -> f64 {
        match self.avg_bs_count {
            Some(n) => n / (PI * self.r_tot_m * self.r_tot_m),
            None => self.lambda.unwrap_or(f64::NAN),
        }
    }

    /// Whole-plane PPP geometry; the MC oracle truncates it at `r_tot_m`.
    pub fn geometry(&self) -> PppGeometry {
        PppGeometry::new(self.ppp_lambda(), self.a_m, self.r_m, self.alpha_pl, 10f64.powf(self.power_db / 10.0))
    }

    /// CGF of `Ω = θY − X` for this scenario.
    pub fn omega(&self) -> Result<OmegaCgf> {
        let theta = self.theta();
        let quad = QuadratureSettings::default();
        match self.model {
            Model::PoissonNakagami => {
                let lam = self.lambda.unwrap_or(f64::NAN);
                let g: CgfRef = Arc::new(gamma_gain_cgf(self.gain())?);
                let signal: CgfRef = Arc::new(compound_poisson_cgf(self.p * lam, g.clone())?);
                let interference: CgfRef = Arc::new(compound_poisson_cgf((1.0 - self.p) * lam, g)?);
                omega_cgf(OmegaSpec { signal, interference, theta })
            }
            Model::BinomialNakagami => {
                let g: CgfRef = Arc::new(gamma_gain_cgf(self.gain())?);
                let signal: CgfRef = Arc::new(compound_binomial_cgf(self.l, self.p, g.clone())?);
                let interference: CgfRef = Arc::new(compound_binomial_cgf(self.l, 1.0 - self.p, g)?);
                omega_cgf(OmegaSpec { signal, interference, theta })
            }
            Model::PppComp => ppp_comp_cgf(&self.geometry(), self.gain(), theta, quad),
            Model::PppCompNofading => nofading_cgf(&self.geometry(), theta, quad),
        }
    }
}

fn parse_sweep(pairs: &[(&str, &str)]) -> Result<Sweep> {
    let get = |k: &str| pairs.iter().find(|(kk, _)| *kk == k).map(|(_, v)| *v);
    let need = |k: &'static str| get(k).ok_or_else(|| Error::config(k, "required when sweeping"));
    let scale = match get("sweep_scale").map(str::trim) {
        None | Some("linear") => Scale::Linear,
        Some("log") => Scale::Log,
        Some(s) => return Err(Error::config("sweep_scale", format!("expected linear or log, got `{s}`"))),
    };
    Ok(Sweep {
        field: need("sweep_field")?.trim().to_string(),
        from: num("sweep_from", need("sweep_from")?)?,
        to: num("sweep_to", need("sweep_to")?)?,
        steps: int("sweep_steps", need("sweep_steps")?)?,
        scale,
    })
}

/// Raw `key = value` pairs of each scenario in an INI text.
///
/// Keys before the first section header are shared defaults for every
/// section. A file without sections describes one scenario, `default`.
pub fn parse_config(text: &str) -> Result<Vec<(String, Vec<(String, String)>)>> {
    let ini = Ini::load_from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
    let mut shared = Vec::new();
    let mut sections = Vec::new();
    for (name, props) in ini.iter() {
        let pairs: Vec<(String, String)> = props.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        match name {
            None => shared = pairs,
            Some(n) => sections.push((n.to_string(), pairs)),
        }
    }
    if sections.is_empty() {
        return Ok(vec![("default".to_string(), shared)]);
    }
    Ok(sections
        .into_iter()
        .map(|(n, pairs)| (n, shared.iter().cloned().chain(pairs).collect()))
        .collect())
}

/// Parses every scenario of an INI text, appending `overrides` to each.
pub fn load_scenarios(text: &str, overrides: &[(String, String)]) -> Result<Vec<Scenario>> {
    parse_config(text)?
        .into_iter()
        .map(|(name, pairs)| {
            let all = pairs.iter().chain(overrides).map(|(k, v)| (k.as_str(), v.as_str()));
            Scenario::from_pairs(&name, all)
        })
        .collect()
}
