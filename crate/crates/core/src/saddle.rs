//! Saddle point equation `K'(t̂) = x`: a safeguarded Newton solver for any
//! [`Cgf`], plus analytic and approximate saddle points of the wireless
//! models used for initialization and cross-checks.

use crate::cgf::{Cgf, GainLaw, PppGeometry};
use crate::error::{Error, Result};

/// Saddle point `t̂` at abscissa `x` together with the quantities every
/// saddle point approximation consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleInfo {
    pub t_hat: f64,
    pub x: f64,
    /// `K(t̂)`.
    pub k0: f64,
    /// `K(t̂) − x t̂`, never positive.
    pub c: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    /// `K'''²/K''³`.
    pub eta: f64,
    /// `K''''/K''²`.
    pub rho: f64,
    /// Newton/bisection steps taken.
    pub iterations: usize,
}

impl SaddleInfo {
    /// Assembles the record from the jet `[K, K', K'', K''', K'''']` at `t̂`.
    pub fn from_jet(t_hat: f64, x: f64, jet: &[f64; 5], iterations: usize) -> Self {
        let (k0, k2, k3, k4) = (jet[0], jet[2], jet[3], jet[4]);
        // c is a maximum of −(tx − K(t)), so rounding may only push it up.
        let c = (k0 - x * t_hat).min(0.0);
        SaddleInfo {
            t_hat,
            x,
            k0,
            c,
            k2,
            k3,
            k4,
            eta: k3 * k3 / k2.powi(3),
            rho: k4 / (k2 * k2),
            iterations,
        }
    }
}

/// Moment-based starting point `(x − κ₁)/κ₂`.
pub fn initial_guess(x: f64, kappa1: f64, kappa2: f64) -> f64 {
    (x - kappa1) / kappa2
}

const MAX_ITER: usize = 200;

fn residual_tolerance(x: f64, kappa2: f64) -> f64 {
    (1e-10 * x.abs()).max(1e-12 * kappa2.sqrt().min(1.0))
}

/// Solves `K'(t̂) = x` starting from the moment-based guess.
pub fn solve_saddle(cgf: &dyn Cgf, x: f64) -> Result<SaddleInfo> {
    let k1 = cgf.cumulant(1)?;
    let k2 = cgf.cumulant(2)?;
    solve_saddle_from(cgf, x, initial_guess(x, k1, k2))
}

/// Solves `K'(t̂) = x` starting from `t0` (clipped into the strip).
///
/// A bracket `[lo, hi]` with `K'(lo) < x < K'(hi)` is grown from `t = 0`
/// toward the relevant strip edge, after which Newton steps are taken and
/// replaced by bisection whenever they leave the bracket.
pub fn solve_saddle_from(cgf: &dyn Cgf, x: f64, t0: f64) -> Result<SaddleInfo> {
    if !x.is_finite() {
        return Err(Error::domain("solve_saddle", format!("x = {x}")));
    }
    let k1 = cgf.cumulant(1)?;
    let k2 = cgf.cumulant(2)?;
    if x == k1 {
        return Ok(SaddleInfo::from_jet(0.0, x, &cgf.jet(0.0)?, 0));
    }
    let tol = residual_tolerance(x, k2);
    let strip = cgf.strip();
    let dir = if x > k1 { 1.0 } else { -1.0 };
    let edge = if dir > 0.0 { strip.hi } else { strip.lo };
    let f = |t: f64| -> Option<f64> {
        match cgf.deriv(1, t) {
            Ok(v) if v.is_finite() => Some(v - x),
            _ => None,
        }
    };

    // Bracket: `inner` has residual of sign −dir, `outer` of sign +dir.
    let mut inner = 0.0;
    let mut outer = None;
    let mut probe = if t0 * dir > 0.0 && t0.is_finite() { t0 } else { dir / k2.sqrt() };
    if edge.is_finite() && probe * dir >= edge * dir {
        probe = 0.5 * edge;
    }
    let mut iterations = 0;
    let mut last_value = k1 - x;
    while iterations < MAX_ITER {
        iterations += 1;
        match f(probe) {
            Some(v) if v == 0.0 => return finish(cgf, probe, x, iterations),
            Some(v) if v * dir > 0.0 => {
                outer = Some(probe);
                break;
            }
            Some(v) => {
                inner = probe;
                last_value = v;
                probe = if edge.is_finite() { probe + 0.5 * (edge - probe) } else { 2.0 * probe };
                if edge.is_finite() && (edge - probe).abs() <= 4.0 * f64::EPSILON * edge.abs() {
                    break;
                }
            }
            None => {
                // Past the numerically representable range: retreat.
                let next = 0.5 * (inner + probe);
                if next == probe || next == inner {
                    break;
                }
                probe = next;
            }
        }
    }
    let Some(outer) = outer else {
        let (lo, hi) = if dir > 0.0 { (k1, last_value + x) } else { (last_value + x, k1) };
        return Err(Error::SaddleRange { x, lo, hi });
    };

    let (mut a, mut b) = (inner.min(outer), inner.max(outer));
    let mut t = if t0 > a && t0 < b { t0 } else { 0.5 * (a + b) };
    let mut residual = f64::INFINITY;
    while iterations < MAX_ITER {
        iterations += 1;
        let jet1 = cgf.deriv(1, t)?;
        residual = jet1 - x;
        if residual.abs() <= tol {
            return finish(cgf, t, x, iterations);
        }
        // The residual is increasing in t.
        if residual < 0.0 {
            a = t;
        } else {
            b = t;
        }
        if b - a <= 4.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE) {
            return finish(cgf, t, x, iterations);
        }
        let k2t = cgf.deriv(2, t)?;
        let newton = t - residual / k2t;
        t = if newton > a && newton < b && newton.is_finite() { newton } else { 0.5 * (a + b) };
    }
    Err(Error::SaddleConvergence { iterations, residual })
}

fn finish(cgf: &dyn Cgf, t: f64, x: f64, iterations: usize) -> Result<SaddleInfo> {
    Ok(SaddleInfo::from_jet(t, x, &cgf.jet(t)?, iterations))
}

/// Saddle point at `x = 0` of the Poisson-aggregated model with Gamma gains
/// (`λ₁` cooperating, `λ₂` interfering nodes):
/// `t̂ = −β(1 − ζ)/(1 + θζ)`, `ζ = (θλ₂/λ₁)^{−1/(α+1)}` with `α = m_f`,
/// `β = r_f`.
///
/// With `λ₂ = 0` the derivative `K'` stays negative on the whole strip and
/// no saddle point exists; this is reported as a range error.
pub fn analytic_saddle_poisson_nakagami(lam1: f64, lam2: f64, theta: f64, gain: GainLaw) -> Result<f64> {
    if !(lam1 > 0.0) || !(lam2 >= 0.0) || !(theta > 0.0) {
        return Err(Error::domain(
            "analytic_saddle_poisson_nakagami",
            format!("lam1 = {lam1}, lam2 = {lam2}, theta = {theta}"),
        ));
    }
    if lam2 == 0.0 {
        let m = gain.m_f;
        return Err(Error::SaddleRange { x: 0.0, lo: -lam1 * m / gain.r_f, hi: 0.0 });
    }
    let zeta = (theta * lam2 / lam1).powf(-1.0 / (gain.m_f + 1.0));
    Ok(-gain.r_f * (1.0 - zeta) / (1.0 + theta * zeta))
}

/// Saddle point equation of the binomial-aggregated model at `x = 0`,
/// cleared of denominators. With `s = −t/β`, `A = 1 + θs`, `B = 1 − s`:
///
/// `p²A^{α+1} + pq((1 − θ) + 2θs) − θq²B^{α+1}`.
///
/// Its root in `t` is the saddle point of `K_Ω` for `L ln(p + q M_G(θt)) +
/// L ln(q + p M_G(−t))`, for any `L`.
pub fn binomial_saddle_residual(t: f64, prob: f64, theta: f64, gain: GainLaw) -> f64 {
    let (p, q) = (prob, 1.0 - prob);
    let s = -t / gain.r_f;
    let e = gain.m_f + 1.0;
    let a = 1.0 + theta * s;
    let b = 1.0 - s;
    p * p * a.powf(e) + p * q * ((1.0 - theta) + 2.0 * theta * s) - theta * q * q * b.powf(e)
}

/// Closed-form root of [`binomial_saddle_residual`] for exponential gains
/// (`m_f = 1`).
pub fn rayleigh_binomial_saddle(prob: f64, theta: f64, gain: GainLaw) -> f64 {
    let (p, q) = (prob, 1.0 - prob);
    let beta = gain.r_f;
    let root = (p * q * theta * (theta + q) * (1.0 + p * theta)).sqrt();
    let denom = 2.0 * theta * (theta * p * p - q * q);
    if denom.abs() < 1e-300 {
        // Degenerate leading coefficient: the equation is linear in s.
        return beta * (p - theta * q) / (2.0 * theta * (1.0 - p * q));
    }
    let s = (-2.0 * theta * (1.0 - p * q) + 2.0 * root) / denom;
    -beta * s
}

/// Moment-based approximation of the binomial-model saddle point,
/// `−β(p − θq)/(1 − q[1 − θ² − α(θ² + 1)(1 − q)])`. Only meant as a starting
/// value.
pub fn approx_saddle_binomial(prob: f64, theta: f64, gain: GainLaw) -> f64 {
    let (p, q) = (prob, 1.0 - prob);
    let th2 = theta * theta;
    let denom = 1.0 - q * (1.0 - th2 - gain.m_f * (th2 + 1.0) * (1.0 - q));
    -gain.r_f * (p - theta * q) / denom
}

/// Threshold regime for [`approx_saddle_comp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaRegime {
    Small,
    Large,
}

/// Approximate saddle point of the cooperative PPP model, independent of the
/// intensity:
///
/// * small θ: `+C a^α/P`,
/// * large θ: `−C R^α/(θP)`,
///
/// with `C = 2(α−1)/(α−2) · μ₁/μ₂`.
pub fn approx_saddle_comp(regime: ThetaRegime, geom: &PppGeometry, theta: f64, gain: GainLaw) -> f64 {
    let al = geom.alpha;
    let c = 2.0 * (al - 1.0) / (al - 2.0) * gain.moment(1) / gain.moment(2);
    match regime {
        ThetaRegime::Small => c * geom.a.powf(al) / geom.power,
        ThetaRegime::Large => -c * geom.r_coop.powf(al) / (theta * geom.power),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgf::{
        compound_binomial_cgf, compound_poisson_cgf, gamma_gain_cgf, omega_cgf, CgfRef, GaussianCgf, OmegaSpec,
    };
    use std::sync::Arc;

    fn exp_exp(theta: f64) -> impl Cgf {
        let e: CgfRef = Arc::new(gamma_gain_cgf(GainLaw::rayleigh()).unwrap());
        omega_cgf(OmegaSpec { signal: e.clone(), interference: e, theta }).unwrap()
    }

    fn poisson_omega(lam1: f64, lam2: f64, theta: f64) -> impl Cgf {
        let e: CgfRef = Arc::new(gamma_gain_cgf(GainLaw::rayleigh()).unwrap());
        let x: CgfRef = Arc::new(compound_poisson_cgf(lam1, e.clone()).unwrap());
        let y: CgfRef = Arc::new(compound_poisson_cgf(lam2, e).unwrap());
        omega_cgf(OmegaSpec { signal: x, interference: y, theta }).unwrap()
    }

    #[test]
    fn initial_guess_values() {
        assert_eq!(initial_guess(3.0, 3.0, 2.0), 0.0);
        assert_eq!(initial_guess(0.0, -2.0, 4.0), 0.5);
    }

    #[test]
    fn gaussian_saddle_is_linear() {
        let g = GaussianCgf::new(1.0, 4.0).unwrap();
        let s = solve_saddle(&g, 3.0).unwrap();
        assert!((s.t_hat - 0.5).abs() < 1e-15);
        assert!((s.c + 0.5).abs() < 1e-14);
    }

    #[test]
    fn exp_exp_saddles() {
        let s = solve_saddle(&exp_exp(1.0), 0.0).unwrap();
        assert_eq!(s.t_hat, 0.0);
        let k = exp_exp(2.0);
        let s = solve_saddle(&k, 0.0).unwrap();
        assert!((s.t_hat + 0.25).abs() < 1e-12);
        assert!(k.deriv(1, -0.25).unwrap().abs() < 1e-14);
        assert!(s.c < 0.0);
    }

    #[test]
    fn initial_guess_near_poisson_saddle() {
        let k = poisson_omega(7.0, 3.0, 1.0);
        let guess = initial_guess(0.0, k.cumulant(1).unwrap(), k.cumulant(2).unwrap());
        let exact = analytic_saddle_poisson_nakagami(7.0, 3.0, 1.0, GainLaw::rayleigh()).unwrap();
        assert!(((guess - exact) / exact).abs() < 0.25, "{guess} vs {exact}");
    }

    #[test]
    fn poisson_analytic_saddle() {
        let law = GainLaw::rayleigh();
        let t = analytic_saddle_poisson_nakagami(7.0, 3.0, 1.0, law).unwrap();
        // Sign flip of the published minus-convention value (1−ζ)/(1+ζ).
        let zeta = (3.0f64 / 7.0).powf(-0.5);
        assert!((t + (1.0 - zeta) / (1.0 + zeta)).abs() < 1e-15);
        assert!((t - 0.208_712_152_522_080).abs() < 1e-12);
        assert_eq!(analytic_saddle_poisson_nakagami(3.0, 3.0, 1.0, law).unwrap(), 0.0);
        assert!(matches!(analytic_saddle_poisson_nakagami(3.0, 0.0, 1.0, law), Err(Error::SaddleRange { .. })));
        let s = solve_saddle(&poisson_omega(7.0, 3.0, 1.0), 0.0).unwrap();
        assert!((s.t_hat - t).abs() < 1e-10);
    }

    #[test]
    fn binomial_residual_properties() {
        let law = GainLaw::rayleigh();
        assert_eq!(binomial_saddle_residual(0.0, 0.5, 1.0, law), 0.0);
        // No interferers: the root sits at internal t = β/θ.
        assert!(binomial_saddle_residual(0.5, 1.0, 2.0, law).abs() < 1e-15);
        let t = rayleigh_binomial_saddle(0.7, 1.0, law);
        assert!(binomial_saddle_residual(t, 0.7, 1.0, law).abs() < 1e-13);
    }

    #[test]
    fn binomial_residual_root_is_solver_saddle() {
        let law = GainLaw::new(2.0, 1.5).unwrap();
        let e: CgfRef = Arc::new(gamma_gain_cgf(law).unwrap());
        for &(p, theta) in &[(0.3, 0.5), (0.6, 2.0)] {
            let x: CgfRef = Arc::new(compound_binomial_cgf(10, p, e.clone()).unwrap());
            let y: CgfRef = Arc::new(compound_binomial_cgf(10, 1.0 - p, e.clone()).unwrap());
            let k = omega_cgf(OmegaSpec { signal: x, interference: y, theta }).unwrap();
            let s = solve_saddle(&k, 0.0).unwrap();
            assert!(binomial_saddle_residual(s.t_hat, p, theta, law).abs() < 1e-9);
        }
    }

    #[test]
    fn approx_binomial_limits() {
        let law = GainLaw::new(1.0, 2.0).unwrap();
        assert!((approx_saddle_binomial(1.0, 3.0, law) + 2.0).abs() < 1e-15);
        assert!((approx_saddle_binomial(0.0, 3.0, law) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn approx_comp_scaling() {
        let g = PppGeometry::new(1e-4, 30.0, 150.0, 4.0, 1.0);
        let law = GainLaw::rayleigh();
        let l1 = approx_saddle_comp(ThetaRegime::Large, &g, 1.0, law);
        let l2 = approx_saddle_comp(ThetaRegime::Large, &g, 2.0, law);
        assert!((l1 / l2 - 2.0).abs() < 1e-15);
        let g2 = PppGeometry { lam: 1e-2, ..g };
        assert_eq!(approx_saddle_comp(ThetaRegime::Small, &g, 1.0, law), approx_saddle_comp(ThetaRegime::Small, &g2, 1.0, law));
    }
}
