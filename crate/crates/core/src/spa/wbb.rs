use super::{spa_cdf_at, BaseKind, SpaMethod, SpaResult};
use crate::error::{Error, Result};
use crate::saddle::SaddleInfo;
use crate::specfun::{normal_cdf, normal_pdf, normal_sf};

/// A base distribution evaluated at its matched point `ẑ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseEval {
    pub kind: BaseKind,
    pub z_hat: f64,
    pub s_hat: f64,
    /// `L''(ŝ)`, second derivative of the base CGF.
    pub lpp: f64,
    /// `G(ẑ)`.
    pub cdf: f64,
    /// `1 − G(ẑ)`.
    pub sf: f64,
    /// `g(ẑ)`.
    pub pdf: f64,
}

impl BaseEval {
    /// `û = t̂ √(K''(t̂)/L''(ŝ))`.
    pub fn u_hat(&self, saddle: &SaddleInfo) -> f64 {
        saddle.t_hat * (saddle.k2 / self.lpp).sqrt()
    }
}

/// Wood-Booth-Butler formula, returning `(F̂, 1 − F̂)`; the second value is
/// computed from the base survival function so it keeps its relative
/// accuracy in the upper tail.
pub fn wbb_cdf(saddle: &SaddleInfo, base: &BaseEval) -> Result<(f64, f64)> {
    let u = base.u_hat(saddle);
    let corr = base.pdf * (1.0 / base.s_hat - 1.0 / u);
    let cdf = base.cdf + corr;
    let ccdf = base.sf - corr;
    if cdf.is_finite() && ccdf.is_finite() {
        Ok((cdf, ccdf))
    } else {
        Err(Error::NonFinite("Wood-Booth-Butler formula"))
    }
}

/// Continuity limit at the mean: `F̂ = 1/2 + κ₃/(6√(2π) κ₂^{3/2})`.
pub fn near_mean_cdf(saddle: &SaddleInfo) -> (f64, f64) {
    let skew = saddle.k3 / saddle.k2.powf(1.5);
    let shift = skew / (6.0 * (2.0 * std::f64::consts::PI).sqrt());
    (0.5 + shift, 0.5 - shift)
}

/// Standard normal base: `ẑ = ŝ = sgn(t̂)√(−2c)`, `L'' = 1`.
pub(super) fn normal_base(saddle: &SaddleInfo) -> BaseEval {
    let s = saddle.t_hat.signum() * (-2.0 * saddle.c).sqrt();
    BaseEval {
        kind: BaseKind::Normal,
        z_hat: s,
        s_hat: s,
        lpp: 1.0,
        cdf: normal_cdf(s),
        sf: normal_sf(s),
        pdf: normal_pdf(s),
    }
}

/// Lugannani-Rice approximation (normal base) at an already solved saddle point.
pub fn lugannani_rice(saddle: &SaddleInfo) -> Result<SpaResult> {
    spa_cdf_at(saddle, saddle.k2, SpaMethod::Base(BaseKind::Normal))
}
