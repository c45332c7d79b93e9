//! Cumulant generating functions.
//!
//! Every model uses the convention `K(t) = ln E[exp(tV)]`. A model exposes
//! its value, derivatives up to order four, its convergence strip, cumulants
//! and its values on the imaginary axis (`K(ju)`, the log characteristic
//! function).

use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

mod compound;
mod gain;
mod nofading;
mod omega;
mod ppp;

pub use compound::{compound_binomial_cgf, compound_poisson_cgf, CompoundBinomial, CompoundPoisson};
pub use gain::{gamma_gain_cgf, GainLaw, GammaCgf};
pub use nofading::{nofading_cgf, nofading_tail_deriv};
pub use omega::{omega_cgf, OmegaCgf, OmegaSpec};
pub use ppp::{
    ppp_comp_cgf, ppp_comp_cumulant, ppp_comp_skew_kurt, PppGain, PppGeometry, ShotNoiseCgf,
};

/// Relative margin by which analytic strip endpoints are pulled inward.
pub const STRIP_MARGIN: f64 = 1e-9;

/// Open interval of real `t` on which a CGF is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceStrip {
    pub lo: f64,
    pub hi: f64,
}

impl ConvergenceStrip {
    pub const REAL_LINE: ConvergenceStrip = ConvergenceStrip { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    /// Builds a strip from analytic endpoints, pulling finite endpoints
    /// inward by [`STRIP_MARGIN`] relative.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < 0.0 && hi > 0.0) {
            return Err(Error::EmptyStrip);
        }
        let lo = if lo.is_finite() { lo * (1.0 - STRIP_MARGIN) } else { lo };
        let hi = if hi.is_finite() { hi * (1.0 - STRIP_MARGIN) } else { hi };
        Ok(ConvergenceStrip { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::StripViolation { t, lo: self.lo, hi: self.hi })
        }
    }

    /// Intersection of two strips, without applying a further margin.
    pub fn intersect(&self, other: &ConvergenceStrip) -> Result<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo < 0.0 && hi > 0.0 {
            Ok(ConvergenceStrip { lo, hi })
        } else {
            Err(Error::EmptyStrip)
        }
    }

    /// Image of the strip under `t -> scale * t`.
    pub fn scaled(&self, scale: f64) -> Self {
        if scale > 0.0 {
            ConvergenceStrip { lo: self.lo / scale, hi: self.hi / scale }
        } else {
            ConvergenceStrip { lo: self.hi / scale, hi: self.lo / scale }
        }
    }
}

/// A cumulant generating function with derivatives up to order four.
pub trait Cgf: Debug + Send + Sync {
    fn strip(&self) -> ConvergenceStrip;

    /// `K(t)`.
    fn eval(&self, t: f64) -> Result<f64>;

    /// `n`-th derivative of `K` at `t`, `n` in `1..=4`.
    fn deriv(&self, n: usize, t: f64) -> Result<f64>;

    /// `K(ju)`.
    fn char_exponent(&self, u: f64) -> Result<Complex64>;

    /// `n`-th cumulant, `n` in `1..=4`.
    fn cumulant(&self, n: usize) -> Result<f64> {
        self.deriv(n, 0.0)
    }

    /// `[K, K', K'', K''', K'''']` at `t`.
    fn jet(&self, t: f64) -> Result<[f64; 5]> {
        Ok([self.eval(t)?, self.deriv(1, t)?, self.deriv(2, t)?, self.deriv(3, t)?, self.deriv(4, t)?])
    }
}

pub type CgfRef = Arc<dyn Cgf>;

pub(crate) fn check_order(n: usize) -> Result<()> {
    if (1..=4).contains(&n) {
        Ok(())
    } else {
        Err(Error::DerivativeOrder(n))
    }
}

/// Gaussian law with mean `mean` and variance `var`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCgf {
    pub mean: f64,
    pub var: f64,
}

impl GaussianCgf {
    pub fn new(mean: f64, var: f64) -> Result<Self> {
        if !(var > 0.0) || !mean.is_finite() || !var.is_finite() {
            return Err(Error::domain("GaussianCgf", format!("mean = {mean}, var = {var}")));
        }
        Ok(GaussianCgf { mean, var })
    }
}

impl Cgf for GaussianCgf {
    fn strip(&self) -> ConvergenceStrip {
        ConvergenceStrip::REAL_LINE
    }

    fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.mean * t + 0.5 * self.var * t * t)
    }

    fn deriv(&self, n: usize, t: f64) -> Result<f64> {
        check_order(n)?;
        Ok(match n {
            1 => self.mean + self.var * t,
            2 => self.var,
            _ => 0.0,
        })
    }

    fn char_exponent(&self, u: f64) -> Result<Complex64> {
        Ok(Complex64::new(-0.5 * self.var * u * u, self.mean * u))
    }
}

/// NIG law: `K(s) = μs + δ(γ − √(α² − (β+s)²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NigCgf {
    pub params: crate::spa::NigParams,
}

impl NigCgf {
    pub fn new(params: crate::spa::NigParams) -> Result<Self> {
        params.validate()?;
        Ok(NigCgf { params })
    }

    fn root(&self, t: f64) -> Result<f64> {
        self.strip().check(t)?;
        let p = &self.params;
        let b = p.beta + t;
        Ok(((p.alpha - b) * (p.alpha + b)).sqrt())
    }
}

impl Cgf for NigCgf {
    fn strip(&self) -> ConvergenceStrip {
        let p = &self.params;
        ConvergenceStrip::new(-p.alpha - p.beta, p.alpha - p.beta).expect("|beta| < alpha")
    }

    fn eval(&self, t: f64) -> Result<f64> {
        let w = self.root(t)?;
        let p = &self.params;
        Ok(p.mu * t + p.delta * (p.gamma() - w))
    }

    fn deriv(&self, n: usize, t: f64) -> Result<f64> {
        check_order(n)?;
        let w = self.root(t)?;
        let p = &self.params;
        let b = p.beta + t;
        let a2 = p.alpha * p.alpha;
        Ok(match n {
            1 => p.mu + p.delta * b / w,
            2 => p.delta * a2 / w.powi(3),
            3 => 3.0 * p.delta * a2 * b / w.powi(5),
            _ => 3.0 * p.delta * a2 * (a2 + 4.0 * b * b) / w.powi(7),
        })
    }

    fn char_exponent(&self, u: f64) -> Result<Complex64> {
        let p = &self.params;
        let b = Complex64::new(p.beta, u);
        // Factored as in `gamma()` so that K(0) is exactly 0.
        let w = ((Complex64::new(p.alpha, 0.0) - b) * (Complex64::new(p.alpha, 0.0) + b)).sqrt();
        Ok(Complex64::new(0.0, p.mu * u) + (Complex64::new(p.gamma(), 0.0) - w) * p.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spa::NigParams;

    #[test]
    fn strip_margin_and_intersection() {
        let s = ConvergenceStrip::new(-2.0, 1.0).unwrap();
        assert!(s.hi < 1.0 && s.hi > 1.0 - 1e-8);
        assert!(s.contains(0.0) && !s.contains(1.0));
        assert!(ConvergenceStrip::new(0.5, 1.0).is_err());
        let t = ConvergenceStrip::REAL_LINE.intersect(&s).unwrap();
        assert_eq!(t, s);
        let flipped = s.scaled(-1.0);
        assert!(flipped.lo < -0.99 && flipped.hi > 1.99);
    }

    #[test]
    fn gaussian_cgf() {
        let g = GaussianCgf::new(1.5, 4.0).unwrap();
        assert_eq!(g.eval(0.0).unwrap(), 0.0);
        assert_eq!(g.cumulant(1).unwrap(), 1.5);
        assert_eq!(g.cumulant(2).unwrap(), 4.0);
        assert_eq!(g.cumulant(3).unwrap(), 0.0);
        assert!(g.deriv(5, 0.0).is_err());
    }

    #[test]
    fn nig_cgf_cumulants_match_finite_differences() {
        let g = NigCgf::new(NigParams::new(2.0, 1.0, 0.3, 1.5).unwrap()).unwrap();
        let h = 1e-4;
        for n in 1..=4 {
            let lower = |t: f64| if n == 1 { g.eval(t).unwrap() } else { g.deriv(n - 1, t).unwrap() };
            let fd = (lower(0.2 + h) - lower(0.2 - h)) / (2.0 * h);
            let d = g.deriv(n, 0.2).unwrap();
            assert!(((fd - d) / d).abs() < 1e-6, "order {n}");
        }
        // Mean μ + δβ/γ.
        let gamma = 3f64.sqrt();
        assert!((g.cumulant(1).unwrap() - (0.3 + 1.5 / gamma)).abs() < 1e-14);
        assert!(g.eval(1.5).is_err());
    }

    #[test]
    fn nig_char_exponent_is_conjugate_symmetric() {
        let g = NigCgf::new(NigParams::new(2.0, 1.0, 0.3, 1.5).unwrap()).unwrap();
        let a = g.char_exponent(0.7).unwrap();
        let b = g.char_exponent(-0.7).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
        assert_eq!(g.char_exponent(0.0).unwrap(), Complex64::new(0.0, 0.0));
    }
}
