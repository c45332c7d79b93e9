use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::nofading;
use super::{check_order, omega_cgf, Cgf, CgfRef, ConvergenceStrip, GainLaw, OmegaCgf, OmegaSpec};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadValue, QuadratureSettings};

/// Cellular geometry: base stations form a PPP of intensity `lam` on the
/// annulus `a ≤ r < r_outer`; those within `r_coop` cooperate and the rest
/// interfere. Path loss is `P r^{-alpha}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PppGeometry {
    pub lam: f64,
    pub a: f64,
    pub r_coop: f64,
    pub alpha: f64,
    pub power: f64,
    /// Outer edge of the network; infinite for the whole plane.
    pub r_outer: f64,
}

impl PppGeometry {
    /// Network covering the whole plane outside the exclusion disk.
    pub fn new(lam: f64, a: f64, r_coop: f64, alpha: f64, power: f64) -> Self {
        PppGeometry { lam, a, r_coop, alpha, power, r_outer: f64::INFINITY }
    }

    /// The same network truncated at radius `r_outer`.
    pub fn truncated(self, r_outer: f64) -> Self {
        PppGeometry { r_outer, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lam > 0.0 && self.lam.is_finite()) {
            return Err(Error::config("lambda", format!("must be positive, got {}", self.lam)));
        }
        if !(self.a > 0.0 && self.r_coop > self.a && self.r_coop.is_finite()) {
            return Err(Error::config("R_m", format!("need 0 < a < R, got a = {}, R = {}", self.a, self.r_coop)));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::config("alpha_pl", format!("must exceed 2, got {}", self.alpha)));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::config("power_db", format!("power must be positive, got {}", self.power)));
        }
        if !(self.r_outer > self.r_coop) {
            return Err(Error::config("r_tot_m", format!("must exceed R = {}, got {}", self.r_coop, self.r_outer)));
        }
        Ok(())
    }
}

/// Per-link power gain of a shot-noise sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PppGain {
    Gamma(GainLaw),
    /// No fading: unit gain on every link.
    Deterministic,
}

impl PppGain {
    fn moment(&self, n: usize) -> f64 {
        match self {
            PppGain::Gamma(g) => g.moment(n),
            PppGain::Deterministic => 1.0,
        }
    }

    fn m1(&self, s: f64) -> f64 {
        match self {
            PppGain::Gamma(g) => g.mgf_m1_real(s),
            PppGain::Deterministic => s.exp_m1(),
        }
    }

    fn m1_complex(&self, z: Complex64) -> Complex64 {
        match self {
            PppGain::Gamma(g) => g.mgf_m1(z),
            PppGain::Deterministic => {
                if z.norm() < 1e-3 {
                    z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
                } else {
                    z.exp() - 1.0
                }
            }
        }
    }

    fn mgf_deriv(&self, n: usize, s: f64) -> f64 {
        match self {
            PppGain::Gamma(g) => g.mgf_deriv(n, s),
            PppGain::Deterministic => s.exp(),
        }
    }
}

/// CGF of the shot-noise sum `Σ G_i P r_i^{-α}` over the PPP points in the
/// annulus `lo ≤ r < hi` (`hi` may be infinite).
///
/// Integrals are evaluated in the dimensionless radius `ρ = r/lo`; on an
/// infinite annulus the tail is mapped to `(0, 1]` by `ρ^{-α} = v^k` with
/// `k = α/(α−2)`, which makes the integrand bounded at `v = 0`.
#[derive(Debug, Clone)]
pub struct ShotNoiseCgf {
    pub lam: f64,
    pub lo: f64,
    pub hi: f64,
    pub alpha: f64,
    pub power: f64,
    pub gain: PppGain,
    pub quad: QuadratureSettings,
    strip: ConvergenceStrip,
}

impl ShotNoiseCgf {
    pub fn new(lam: f64, lo: f64, hi: f64, alpha: f64, power: f64, gain: PppGain, quad: QuadratureSettings) -> Result<Self> {
        let hi_strip = match gain {
            PppGain::Gamma(g) => g.r_f * lo.powf(alpha) / power,
            PppGain::Deterministic => f64::INFINITY,
        };
        let strip = ConvergenceStrip::new(f64::NEG_INFINITY, hi_strip)?;
        Ok(ShotNoiseCgf { lam, lo, hi, alpha, power, gain, quad, strip })
    }

    /// `t ↦ s` scale: `P lo^{-α}`.
    fn scale(&self) -> f64 {
        self.power * self.lo.powf(-self.alpha)
    }

    fn prefactor(&self) -> f64 {
        2.0 * PI * self.lam * self.lo * self.lo
    }

    fn ratio(&self) -> f64 {
        self.hi / self.lo
    }

    /// `∫_1^{hi/lo} f(ρ^{-α}) ρ^{1-nα} dρ` where `f` is already divided by
    /// `x^n`; on infinite annuli via the tail substitution.
    fn radial_integral<T: QuadValue, F: Fn(f64) -> T>(&self, n: usize, f: F, settings: &QuadratureSettings) -> Result<T> {
        let al = self.alpha;
        if self.hi.is_finite() {
            let g = |rho: f64| f(rho.powf(-al)) * rho.powf(1.0 - n as f64 * al);
            Ok(integrate(g, 1.0, self.ratio(), settings)?.value)
        } else {
            let k = al / (al - 2.0);
            let expo = n as f64 * k - 1.0 - 2.0 / (al - 2.0);
            let g = |v: f64| f(v.powf(k)) * (v.powf(expo) / (al - 2.0));
            Ok(integrate(g, 0.0, 1.0, settings)?.value)
        }
    }

    /// Same as [`Self::radial_integral`] but for integrands that vanish
    /// linearly in `x`: `f(x)` here is the full integrand, divided by `x`.
    fn radial_integral_m1<T: QuadValue, F: Fn(f64) -> T>(&self, f: F, settings: &QuadratureSettings) -> Result<T> {
        // f(x)·x·ρ with x = ρ^{-α}, i.e. order-one weight.
        self.radial_integral(1, f, settings)
    }

    fn cumulant_exact(&self, n: usize) -> f64 {
        let e = 2.0 - n as f64 * self.alpha;
        let tail = if self.hi.is_finite() { self.hi.powf(e) } else { 0.0 };
        2.0 * PI * self.lam * self.gain.moment(n) * self.power.powi(n as i32) * (self.lo.powf(e) - tail) / (n as f64 * self.alpha - 2.0)
    }

    fn tol_for(&self, s: f64) -> QuadratureSettings {
        QuadratureSettings { abs_tol: self.quad.abs_tol * s.abs().min(1.0), ..self.quad }
    }

    fn eval_quad(&self, t: f64) -> Result<f64> {
        let s = t * self.scale();
        if s == 0.0 {
            return Ok(0.0);
        }
        let gain = self.gain;
        let v = self.radial_integral_m1(|x: f64| if x == 0.0 { s * gain.moment(1) } else { gain.m1(s * x) / x }, &self.tol_for(s))?;
        Ok(self.prefactor() * v)
    }

    fn deriv_quad(&self, n: usize, t: f64) -> Result<f64> {
        let s = t * self.scale();
        let gain = self.gain;
        let v = self.radial_integral(n, |x: f64| gain.mgf_deriv(n, s * x), &self.quad)?;
        Ok(self.prefactor() * self.scale().powi(n as i32) * v)
    }

    /// Dimensionless characteristic integral along the real radius.
    fn char_direct(&self, y: f64) -> Result<Complex64> {
        let gain = self.gain;
        let j = Complex64::new(0.0, y);
        self.radial_integral_m1(
            |x: f64| if x == 0.0 { j * gain.moment(1) } else { gain.m1_complex(j * x) / x },
            &self.tol_for(y),
        )
    }

    #[cfg(test)]
    pub(super) fn eval_quad_for_test(&self, t: f64) -> f64 {
        self.eval_quad(t).unwrap()
    }

    #[cfg(test)]
    pub(super) fn deriv_quad_for_test(&self, n: usize, t: f64) -> f64 {
        self.deriv_quad(n, t).unwrap()
    }

    #[cfg(test)]
    pub(super) fn char_direct_for_test(&self, y: f64) -> Complex64 {
        self.char_direct(y).unwrap() * self.prefactor()
    }

    fn uses_closed_form(&self, t: f64) -> bool {
        matches!(self.gain, PppGain::Deterministic) && t < 0.0
    }
}

impl Cgf for ShotNoiseCgf {
    fn strip(&self) -> ConvergenceStrip {
        self.strip
    }

    fn eval(&self, t: f64) -> Result<f64> {
        self.strip.check(t)?;
        let v = if self.uses_closed_form(t) {
            nofading::annulus_value(self.lam, self.lo, self.hi, self.alpha, -t * self.power)?
        } else {
            self.eval_quad(t)?
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("shot-noise CGF"))
        }
    }

    fn deriv(&self, n: usize, t: f64) -> Result<f64> {
        check_order(n)?;
        self.strip.check(t)?;
        let v = if t == 0.0 {
            self.cumulant_exact(n)
        } else if self.uses_closed_form(t) {
            nofading::annulus_deriv(n, self.lam, self.lo, self.hi, self.alpha, self.power, -t * self.power)?
        } else {
            self.deriv_quad(n, t)?
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("shot-noise CGF derivative"))
        }
    }

    fn cumulant(&self, n: usize) -> Result<f64> {
        check_order(n)?;
        Ok(self.cumulant_exact(n))
    }

    fn char_exponent(&self, u: f64) -> Result<Complex64> {
        if u == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if u < 0.0 {
            return Ok(self.char_exponent(-u)?.conj());
        }
        let y = u * self.scale();
        if let PppGain::Deterministic = self.gain {
            if y > nofading::STEEPEST_DESCENT_MIN {
                let rho_max = self.ratio();
                return Ok(nofading::oscillatory_char(y, rho_max, self.alpha, &self.quad)? * self.prefactor());
            }
        }
        Ok(self.char_direct(y)? * self.prefactor())
    }
}

fn shot_pair(geom: &PppGeometry, gain: PppGain, quad: QuadratureSettings) -> Result<(CgfRef, CgfRef)> {
    geom.validate()?;
    let signal = ShotNoiseCgf::new(geom.lam, geom.a, geom.r_coop, geom.alpha, geom.power, gain, quad)?;
    let interference = ShotNoiseCgf::new(geom.lam, geom.r_coop, geom.r_outer, geom.alpha, geom.power, gain, quad)?;
    Ok((Arc::new(signal), Arc::new(interference)))
}

/// CGF of `Ω = θY − X` for cooperative transmission: `X` collects the
/// annulus `[a, R)`, `Y` everything from `R` to the network edge; gains are
/// Gamma distributed.
pub fn ppp_comp_cgf(geom: &PppGeometry, gain: GainLaw, theta: f64, quad: QuadratureSettings) -> Result<OmegaCgf> {
    let (signal, interference) = shot_pair(geom, PppGain::Gamma(gain), quad)?;
    omega_cgf(OmegaSpec { signal, interference, theta })
}

pub(super) fn ppp_nofading_pair(geom: &PppGeometry, quad: QuadratureSettings) -> Result<(CgfRef, CgfRef)> {
    shot_pair(geom, PppGain::Deterministic, quad)
}

/// Closed-form cumulant `κ_n(Ω)` of the cooperative model with Gamma gains.
pub fn ppp_comp_cumulant(n: usize, geom: &PppGeometry, gain: GainLaw, theta: f64) -> Result<f64> {
    check_order(n)?;
    geom.validate()?;
    let e = 2.0 - n as f64 * geom.alpha;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let outer = if geom.r_outer.is_finite() { geom.r_outer.powf(e) } else { 0.0 };
    let bracket = theta.powi(n as i32) * (geom.r_coop.powf(e) - outer) + sign * (geom.a.powf(e) - geom.r_coop.powf(e));
    Ok(2.0 * PI * geom.lam * gain.moment(n) * geom.power.powi(n as i32) * bracket / (n as f64 * geom.alpha - 2.0))
}

/// Squared skewness and excess kurtosis of `Ω` in the limit `R ≫ a`.
pub fn ppp_comp_skew_kurt(lam: f64, a: f64, alpha: f64, gain: GainLaw) -> (f64, f64) {
    let (m2, m3, m4) = (gain.moment(2), gain.moment(3), gain.moment(4));
    let la2 = lam * a * a;
    let skew2 = 8.0 * (alpha - 1.0).powi(3) / (2.0 * PI * la2 * (3.0 * alpha - 2.0).powi(2)) * m3 * m3 / m2.powi(3);
    let kurt = (alpha - 1.0).powi(2) / (PI * la2 * (2.0 * alpha - 1.0)) * m4 / (m2 * m2);
    (skew2, kurt)
}
