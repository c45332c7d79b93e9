use super::{c_eps, BaseEval, BaseKind, NigParams, ETA_MIN};
use crate::error::{Error, Result};
use crate::saddle::SaddleInfo;
use crate::specfun::{nig_cdf_sf, nig_pdf};

/// Asymmetric NIG base (`μ = 0`, `δ = 1`) matched to the target's third and
/// fourth standardized derivatives at the saddle point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NigSpaBase {
    pub params: NigParams,
    pub eval: BaseEval,
}

/// Parameters of the asymmetric NIG base.
///
/// With `η = K'''²/K''³`, `ρ = K''''/K''²`, `c = K(t̂) − xt̂`:
///
/// * `|ẑ| = √(η/(3ρ − 5η))`, `α = 9/√((3ρ − 5η)(3ρ − 4η))`,
/// * `e = c + α√(1 + ẑ²)`, `β = (eẑ ± √(α²(1 + ẑ²) − e²))/(1 + ẑ²)`,
/// * `ŝ = −β + αẑ/√(1 + ẑ²)`, `L''(ŝ) = (1 + ẑ²)^{3/2}/α`.
///
/// `ẑ` takes the sign of `K'''(t̂)`, which orients the base's skewness like
/// the target's. Of the two `β` roots the one kept satisfies `|β| < α`,
/// `sgn(ŝ) = sgn(t̂)` and `√(α² − β²) = e − βẑ` (the squaring step admits a
/// spurious root).
///
/// Requires `c < 0`, `η > η_min` and `0 ≤ ρ − 5η/3 ≤ 6/|c|`; otherwise
/// returns [`Error::ConditionViolated`]. The upper bound is exactly the
/// condition for a real `β`, since `α²(1 + ẑ²) − e² = −c(c + 18/(3ρ − 5η))`.
pub fn nig_spa_params(s: &SaddleInfo) -> Result<NigSpaBase> {
    let (c, eta, rho) = (s.c, s.eta, s.rho);
    if !(c < 0.0) || c.abs() < c_eps(s) {
        return Err(Error::ConditionViolated(format!("c = {c:e} is not negative")));
    }
    if !(eta > ETA_MIN) {
        return Err(Error::ConditionViolated(format!("eta = {eta:e} at or below eta_min (symmetric target)")));
    }
    let gap = rho - 5.0 * eta / 3.0;
    if !(gap > 0.0) {
        return Err(Error::ConditionViolated(format!("rho - 5 eta/3 = {gap:e} is negative")));
    }
    if gap > 6.0 / c.abs() {
        return Err(Error::ConditionViolated(format!(
            "rho - 5 eta/3 = {gap:e} exceeds 6/|c| = {:e}",
            6.0 / c.abs()
        )));
    }
    let d = 3.0 * gap;
    let z = s.k3.signum() * (eta / d).sqrt();
    let alpha = 9.0 / (d * (d + eta)).sqrt();
    let q = (1.0 + z * z).sqrt();
    let e = c + alpha * q;
    let disc = (alpha * alpha * q * q - e * e).max(0.0);
    let tol = 1e-9 * alpha;
    let mut best: Option<(f64, f64)> = None;
    for sign in [1.0, -1.0] {
        let beta = (e * z + sign * disc.sqrt()) / (q * q);
        let s_hat = -beta + alpha * z / q;
        if !(beta.abs() < alpha) || s_hat.signum() != s.t_hat.signum() {
            continue;
        }
        let gamma = ((alpha - beta) * (alpha + beta)).sqrt();
        let mismatch = (gamma - (e - beta * z)).abs();
        if mismatch <= tol && best.is_none_or(|(_, m)| mismatch < m) {
            best = Some((beta, mismatch));
        }
    }
    let Some((beta, _)) = best else {
        return Err(Error::ConditionViolated("no admissible asymmetry root".into()));
    };
    let params = NigParams::new(alpha, beta, 0.0, 1.0).map_err(|e| Error::ConditionViolated(e.to_string()))?;
    let s_hat = -beta + alpha * z / q;
    let (cdf, sf) = nig_cdf_sf(z, &params)?;
    let pdf = nig_pdf(z, &params)?;
    let eval = BaseEval { kind: BaseKind::AsymmetricNig, z_hat: z, s_hat, lpp: q.powi(3) / alpha, cdf, sf, pdf };
    if !eval.lpp.is_finite() || !s_hat.is_finite() {
        return Err(Error::NonFinite("asymmetric NIG base"));
    }
    Ok(NigSpaBase { params, eval })
}
