//! Saddle point approximations of a distribution function built on the
//! Wood-Booth-Butler formula `F̂(x) = G(ẑ) + g(ẑ)(1/ŝ − 1/û)`, with a
//! standard normal (Lugannani-Rice), symmetric NIG or asymmetric NIG base.

use std::fmt;

use crate::cgf::Cgf;
use crate::error::{Error, Result};
use crate::saddle::{solve_saddle, SaddleInfo};

mod nig;
mod sym_nig;
mod wbb;

pub use nig::nig_spa_params;
pub use sym_nig::{solve_cubic_negative_root, sym_nig_spa_params, V_FALLBACK};
pub use wbb::{lugannani_rice, near_mean_cdf, wbb_cdf, BaseEval};

/// Below this `η` the target is treated as symmetric and the asymmetric NIG
/// base is skipped.
pub const ETA_MIN: f64 = 1e-12;

/// Four-parameter NIG law: tail `alpha`, asymmetry `beta`, location `mu`,
/// scale `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NigParams {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub delta: f64,
}

impl NigParams {
    pub fn new(alpha: f64, beta: f64, mu: f64, delta: f64) -> Result<Self> {
        let p = NigParams { alpha, beta, mu, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.alpha.is_finite() && self.beta.is_finite() && self.mu.is_finite() && self.delta.is_finite();
        if !finite || !(self.beta.abs() < self.alpha) || !(self.delta > 0.0) {
            return Err(Error::InvalidNig(format!(
                "need |beta| < alpha and delta > 0, got alpha = {}, beta = {}, mu = {}, delta = {}",
                self.alpha, self.beta, self.mu, self.delta
            )));
        }
        Ok(())
    }

    /// `γ = √(α² − β²)`.
    pub fn gamma(&self) -> f64 {
        ((self.alpha - self.beta) * (self.alpha + self.beta)).sqrt()
    }
}

/// Base distribution of the approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseKind {
    Normal,
    SymmetricNig,
    AsymmetricNig,
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseKind::Normal => "normal",
            BaseKind::SymmetricNig => "sym_nig",
            BaseKind::AsymmetricNig => "nig",
        })
    }
}

/// Requested base: a specific one, or the full chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaMethod {
    Auto,
    Base(BaseKind),
}

impl SpaMethod {
    /// Bases tried in order: asymmetric NIG, symmetric NIG, normal, starting
    /// from the requested one.
    pub fn chain(self) -> &'static [BaseKind] {
        const CHAIN: [BaseKind; 3] = [BaseKind::AsymmetricNig, BaseKind::SymmetricNig, BaseKind::Normal];
        match self {
            SpaMethod::Auto | SpaMethod::Base(BaseKind::AsymmetricNig) => &CHAIN,
            SpaMethod::Base(BaseKind::SymmetricNig) => &CHAIN[1..],
            SpaMethod::Base(BaseKind::Normal) => &CHAIN[2..],
        }
    }
}

/// Diagnostics describing which conditions held at the saddle point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConditionReport {
    pub c: f64,
    pub eta: f64,
    pub rho: f64,
    /// Whether `c < 0` and `0 ≤ ρ − 5η/3 ≤ 6/|c|` (with `η > η_min`);
    /// `None` when the asymmetric NIG base was not attempted.
    pub nig_conditions_hold: Option<bool>,
    /// Root of the symmetric-NIG cubic actually used, if computed.
    pub cubic_v: Option<f64>,
    /// True when the cubic had no root below −1 and the substitute was used.
    pub cubic_substituted: bool,
    /// Saddle point too close to the mean: continuity limit used.
    pub near_mean: bool,
    /// Bases that were attempted and rejected, with the reason.
    pub rejected: Vec<(BaseKind, String)>,
}

/// Output of [`spa_cdf`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpaResult {
    /// `F̂(x)` clamped to `[0, 1]`.
    pub cdf: f64,
    /// `1 − F̂(x)` from the complementary form, clamped to `[0, 1]`.
    pub ccdf: f64,
    /// Unclamped `F̂(x)`.
    pub raw_cdf: f64,
    /// Unclamped `1 − F̂(x)`.
    pub raw_ccdf: f64,
    pub method_used: BaseKind,
    /// True when the requested base could not be used as is.
    pub fell_back: bool,
    pub condition_report: ConditionReport,
    pub saddle: SaddleInfo,
    pub z_hat: f64,
    pub s_hat: f64,
    pub u_hat: f64,
}

/// Relative threshold below which `|t̂|√κ₂` counts as the mean point.
pub const T_EPS: f64 = 1e-6;

/// `|c|` below this counts as the mean point for the NIG bases.
pub fn c_eps(saddle: &SaddleInfo) -> f64 {
    1e-14 * saddle.k0.abs().max(1.0)
}

fn attempt(base: BaseKind, saddle: &SaddleInfo, report: &mut ConditionReport) -> Result<BaseEval> {
    match base {
        BaseKind::Normal => Ok(wbb::normal_base(saddle)),
        BaseKind::AsymmetricNig => {
            let r = nig_spa_params(saddle);
            report.nig_conditions_hold = Some(!matches!(r, Err(Error::ConditionViolated(_))));
            r.map(|b| b.eval)
        }
        BaseKind::SymmetricNig => {
            let b = sym_nig_spa_params(saddle)?;
            report.cubic_v = Some(b.v);
            report.cubic_substituted = b.substituted;
            Ok(b.eval)
        }
    }
}

/// Saddle point approximation of `F(x)` for the law with CGF `cgf`, walking
/// the fallback chain of `method` until a base applies.
pub fn spa_cdf(cgf: &dyn Cgf, x: f64, method: SpaMethod) -> Result<SpaResult> {
    let saddle = solve_saddle(cgf, x)?;
    spa_cdf_at(&saddle, cgf.cumulant(2)?, method)
}

/// Same as [`spa_cdf`] for an already solved saddle point; `kappa2` is the
/// variance of the target, used for the mean-point threshold.
pub fn spa_cdf_at(saddle: &SaddleInfo, kappa2: f64, method: SpaMethod) -> Result<SpaResult> {
    let chain = method.chain();
    let mut report = ConditionReport { c: saddle.c, eta: saddle.eta, rho: saddle.rho, ..Default::default() };

    if saddle.t_hat.abs() < T_EPS / kappa2.sqrt() || saddle.c == 0.0 {
        report.near_mean = true;
        let (cdf, ccdf) = near_mean_cdf(saddle);
        return Ok(finish(cdf, ccdf, chain[0], false, report, saddle, (0.0, 0.0, 0.0)));
    }

    for (i, &base) in chain.iter().enumerate() {
        match attempt(base, saddle, &mut report).and_then(|b| wbb_cdf(saddle, &b).map(|v| (b, v))) {
            Ok((b, (cdf, ccdf))) => {
                let fell_back = i > 0 || report.cubic_substituted;
                return Ok(finish(cdf, ccdf, base, fell_back, report, saddle, (b.z_hat, b.s_hat, b.u_hat(saddle))));
            }
            Err(e @ (Error::ConditionViolated(_) | Error::DegenerateC(_) | Error::NonFinite(_))) => {
                report.rejected.push((base, e.to_string()));
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonFinite("saddle point approximation"))
}

fn finish(
    raw_cdf: f64,
    raw_ccdf: f64,
    base: BaseKind,
    fell_back: bool,
    condition_report: ConditionReport,
    saddle: &SaddleInfo,
    (z_hat, s_hat, u_hat): (f64, f64, f64),
) -> SpaResult {
    SpaResult {
        cdf: raw_cdf.clamp(0.0, 1.0),
        ccdf: raw_ccdf.clamp(0.0, 1.0),
        raw_cdf,
        raw_ccdf,
        method_used: base,
        fell_back,
        condition_report,
        saddle: *saddle,
        z_hat,
        s_hat,
        u_hat,
    }
}

/// Outage probability `Pr(Ω > −θσ²) = 1 − F̂_Ω(−θσ²)` for the CGF of
/// `Ω = θY − X`.
pub fn spa_outage(omega: &dyn Cgf, theta: f64, sigma2: f64, method: SpaMethod) -> Result<SpaResult> {
    spa_cdf(omega, -theta * sigma2, method)
}
