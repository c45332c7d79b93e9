use super::{c_eps, BaseEval, BaseKind, NigParams};
use crate::error::{Error, Result};
use crate::saddle::SaddleInfo;
use crate::specfun::{nig_cdf_sf, nig_pdf};

/// Substitute for the cubic root when it does not lie below `−1`.
pub const V_FALLBACK: f64 = -1.000001;

/// `|ρ|` at or below this means the target has Gaussian kurtosis and the
/// symmetric NIG base collapses onto the normal one.
const RHO_MIN: f64 = 1e-12;

/// Symmetric NIG base `NIG(α, 0, 0, δ)` with `α = δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymNigBase {
    pub params: NigParams,
    pub eval: BaseEval,
    /// Root of the matching cubic actually used.
    pub v: f64,
    /// `true` when [`V_FALLBACK`] replaced a root `≥ −1`.
    pub substituted: bool,
}

/// Negative real root of `5v³ − 5v² + (ρc/3 − 4)v + 4 = 0`.
///
/// The roots sum to 1 and multiply to `−4/5`, so exactly one is negative.
/// Solved in closed form (trigonometric when all roots are real, Cardano
/// otherwise) and polished by Newton steps.
pub fn solve_cubic_negative_root(rho_c: f64) -> f64 {
    let (b, c, d) = (-1.0, (rho_c / 3.0 - 4.0) / 5.0, 0.8);
    // v = y − b/3 gives y³ + py + q = 0.
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut v = if disc > 0.0 {
        let sq = disc.sqrt();
        (-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt() + shift
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .fold(f64::INFINITY, f64::min)
    };
    for _ in 0..3 {
        let f = ((v + b) * v + c) * v + d;
        let fp = (3.0 * v + 2.0 * b) * v + c;
        if fp == 0.0 {
            break;
        }
        let step = f / fp;
        v -= step;
        if step.abs() <= 1e-16 * v.abs() {
            break;
        }
    }
    v
}

/// Parameters of the symmetric NIG base.
///
/// `v` is the negative root of the matching cubic (replaced by
/// [`V_FALLBACK`] when `v ≥ −1`), then `α = δ = √(c/(1 + v))`,
/// `ẑ = sgn(t̂)√(c(v − 1))`, `ŝ = αẑ/√(δ² + ẑ²)` and
/// `L''(ŝ) = (δ² + ẑ²)^{3/2}/(αδ²)`.
pub fn sym_nig_spa_params(s: &SaddleInfo) -> Result<SymNigBase> {
    let c = s.c;
    if !(c < 0.0) || c.abs() < c_eps(s) {
        return Err(Error::DegenerateC(c));
    }
    if !(s.rho.abs() > RHO_MIN) {
        return Err(Error::ConditionViolated(format!("rho = {:e}: no excess kurtosis to match", s.rho)));
    }
    let root = solve_cubic_negative_root(s.rho * c);
    let (v, substituted) = if root < -1.0 { (root, false) } else { (V_FALLBACK, true) };
    let alpha = (c / (1.0 + v)).sqrt();
    let delta = alpha;
    let z = s.t_hat.signum() * (c * (v - 1.0)).sqrt();
    let r = (delta * delta + z * z).sqrt();
    let s_hat = alpha * z / r;
    let lpp = r.powi(3) / (alpha * delta * delta);
    let params = NigParams::new(alpha, 0.0, 0.0, delta).map_err(|e| Error::ConditionViolated(e.to_string()))?;
    if !(lpp.is_finite() && s_hat.is_finite()) {
        return Err(Error::NonFinite("symmetric NIG base"));
    }
    let (cdf, sf) = nig_cdf_sf(z, &params)?;
    let pdf = nig_pdf(z, &params)?;
    let eval = BaseEval { kind: BaseKind::SymmetricNig, z_hat: z, s_hat, lpp, cdf, sf, pdf };
    Ok(SymNigBase { params, eval, v, substituted })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(v: f64, rho_c: f64) -> f64 {
        5.0 * v.powi(3) - 5.0 * v * v + (rho_c / 3.0 - 4.0) * v + 4.0
    }

    #[test]
    fn cubic_root_at_zero() {
        // 5v³ − 5v² − 4v + 4 = (v − 1)(5v² − 4).
        let v = solve_cubic_negative_root(0.0);
        assert!((v + 2.0 / 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn cubic_roots_solve() {
        for &rc in &[-100.0, -12.0, -3.0, -0.5, 0.5, 7.0, 1e4] {
            let v = solve_cubic_negative_root(rc);
            assert!(v < 0.0, "rc={rc}");
            assert!(cubic(v, rc).abs() < 1e-10 * (1.0 + rc.abs() * v.abs()), "rc={rc} v={v}");
        }
    }

    #[test]
    fn fallback_engages_near_gaussian() {
        let s = SaddleInfo { t_hat: 0.3, x: 1.0, k0: 0.1, c: -1e-3, k2: 1.0, k3: 0.0, k4: 1e-6, eta: 0.0, rho: 1e-6, iterations: 0 };
        let b = sym_nig_spa_params(&s).unwrap();
        assert!(b.substituted && b.v == V_FALLBACK);
    }

    #[test]
    fn base_matches_target_at_saddle() {
        // The base, tilted to ŝ, has the target's c and its own saddle
        // point at ẑ, whichever root was used.
        use crate::cgf::{Cgf, NigCgf};
        use crate::saddle::solve_saddle;
        let k = NigCgf::new(NigParams::new(1.5, 0.7, 0.0, 1.0).unwrap()).unwrap();
        for &x in &[-2.0, 0.0, 2.5] {
            let s = solve_saddle(&k, x).unwrap();
            let b = sym_nig_spa_params(&s).unwrap();
            let base = NigCgf::new(b.params).unwrap();
            let j = base.jet(b.eval.s_hat).unwrap();
            assert!((j[1] - b.eval.z_hat).abs() < 1e-10, "x={x}");
            assert!((j[2] - b.eval.lpp).abs() < 1e-10 * j[2], "x={x}");
            assert!((j[0] - b.eval.z_hat * b.eval.s_hat - s.c).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn degenerate_cases() {
        let s = SaddleInfo { t_hat: 0.3, x: 1.0, k0: 0.1, c: 0.0, k2: 1.0, k3: 0.0, k4: 1.0, eta: 0.0, rho: 1.0, iterations: 0 };
        assert!(matches!(sym_nig_spa_params(&s), Err(Error::DegenerateC(_))));
        let s = SaddleInfo { c: -0.1, rho: 0.0, ..s };
        assert!(matches!(sym_nig_spa_params(&s), Err(Error::ConditionViolated(_))));
    }
}
