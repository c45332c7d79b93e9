use num_complex::Complex64;

use super::{check_order, Cgf, CgfRef, ConvergenceStrip};
use crate::error::{Error, Result};

/// Signal `X`, interference `Y` and SINR threshold `θ` (linear scale).
#[derive(Debug, Clone)]
pub struct OmegaSpec {
    pub signal: CgfRef,
    pub interference: CgfRef,
    pub theta: f64,
}

/// CGF of `Ω = θY − X` for independent `X` and `Y`:
/// `K_Ω(t) = K_Y(θt) + K_X(−t)`.
#[derive(Debug, Clone)]
pub struct OmegaCgf {
    spec: OmegaSpec,
    strip: ConvergenceStrip,
}

pub fn omega_cgf(spec: OmegaSpec) -> Result<OmegaCgf> {
    if !(spec.theta > 0.0 && spec.theta.is_finite()) {
        return Err(Error::config("theta", format!("must be positive, got {}", spec.theta)));
    }
    let from_y = spec.interference.strip().scaled(spec.theta);
    let from_x = spec.signal.strip().scaled(-1.0);
    let strip = from_y.intersect(&from_x)?;
    Ok(OmegaCgf { spec, strip })
}

impl OmegaCgf {
    pub fn theta(&self) -> f64 {
        self.spec.theta
    }

    pub fn spec(&self) -> &OmegaSpec {
        &self.spec
    }
}

impl Cgf for OmegaCgf {
    fn strip(&self) -> ConvergenceStrip {
        self.strip
    }

    fn eval(&self, t: f64) -> Result<f64> {
        self.strip.check(t)?;
        Ok(self.spec.interference.eval(self.spec.theta * t)? + self.spec.signal.eval(-t)?)
    }

    fn deriv(&self, n: usize, t: f64) -> Result<f64> {
        check_order(n)?;
        self.strip.check(t)?;
        let th = self.spec.theta;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        Ok(th.powi(n as i32) * self.spec.interference.deriv(n, th * t)? + sign * self.spec.signal.deriv(n, -t)?)
    }

    fn jet(&self, t: f64) -> Result<[f64; 5]> {
        self.strip.check(t)?;
        let th = self.spec.theta;
        let y = self.spec.interference.jet(th * t)?;
        let x = self.spec.signal.jet(-t)?;
        let mut out = [0.0; 5];
        let mut scale = 1.0;
        let mut sign = 1.0;
        for n in 0..5 {
            out[n] = scale * y[n] + sign * x[n];
            scale *= th;
            sign = -sign;
        }
        Ok(out)
    }

    fn cumulant(&self, n: usize) -> Result<f64> {
        check_order(n)?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        Ok(self.spec.theta.powi(n as i32) * self.spec.interference.cumulant(n)? + sign * self.spec.signal.cumulant(n)?)
    }

    fn char_exponent(&self, u: f64) -> Result<Complex64> {
        Ok(self.spec.interference.char_exponent(self.spec.theta * u)? + self.spec.signal.char_exponent(-u)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgf::{gamma_gain_cgf, GainLaw, GaussianCgf};
    use std::sync::Arc;

    fn exp_exp(theta: f64) -> OmegaCgf {
        let e: CgfRef = Arc::new(gamma_gain_cgf(GainLaw::rayleigh()).unwrap());
        omega_cgf(OmegaSpec { signal: e.clone(), interference: e, theta }).unwrap()
    }

    #[test]
    fn cumulant_relation() {
        let x: CgfRef = Arc::new(GaussianCgf::new(0.0, 1.0).unwrap());
        let y: CgfRef = Arc::new(GaussianCgf::new(0.0, 3.0).unwrap());
        let k = omega_cgf(OmegaSpec { signal: x, interference: y, theta: 2.0 }).unwrap();
        assert_eq!(k.cumulant(2).unwrap(), 13.0);
    }

    #[test]
    fn exp_exp_symmetric() {
        let k = exp_exp(1.0);
        assert_eq!(k.cumulant(1).unwrap(), 0.0);
        assert_eq!(k.cumulant(3).unwrap(), 0.0);
        let t = 0.4;
        assert!((k.eval(t).unwrap() - k.eval(-t).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn exp_exp_value_and_strip() {
        let k = exp_exp(2.0);
        let expected = -(0.4f64).ln() - 1.3f64.ln();
        assert!((k.eval(0.3).unwrap() - expected).abs() < 1e-14);
        assert!((k.eval(0.3).unwrap() - 0.65393).abs() < 1e-5);
        let s = k.strip();
        assert!((s.lo + 1.0).abs() < 1e-8 && (s.hi - 0.5).abs() < 1e-8);
        assert!(k.eval(0.6).is_err());
        let j = k.jet(0.1).unwrap();
        for n in 1..=4 {
            assert!((j[n] - k.deriv(n, 0.1).unwrap()).abs() < 1e-12);
        }
    }
}
