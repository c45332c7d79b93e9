use num_complex::Complex64;

use super::{check_order, Cgf, ConvergenceStrip};
use crate::error::{Error, Result};

/// Gamma-distributed channel power gain with shape `m_f` and rate `r_f`
/// (Nakagami-m fading; exponential when `m_f = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainLaw {
    pub m_f: f64,
    pub r_f: f64,
}

impl GainLaw {
    pub fn new(m_f: f64, r_f: f64) -> Result<Self> {
        if !(m_f > 0.0 && m_f.is_finite()) {
            return Err(Error::config("m_f", format!("must be positive, got {m_f}")));
        }
        if !(r_f > 0.0 && r_f.is_finite()) {
            return Err(Error::config("r_f", format!("must be positive, got {r_f}")));
        }
        Ok(GainLaw { m_f, r_f })
    }

    /// Unit-mean exponential gain (Rayleigh fading).
    pub fn rayleigh() -> Self {
        GainLaw { m_f: 1.0, r_f: 1.0 }
    }

    /// Raw moment `E[Gⁿ] = m(m+1)…(m+n−1)/rⁿ`.
    pub fn moment(&self, n: usize) -> f64 {
        (0..n).map(|k| (self.m_f + k as f64) / self.r_f).product()
    }

    /// `n`-th derivative of `E[exp(sG)]` at real `s < r_f`.
    pub fn mgf_deriv(&self, n: usize, s: f64) -> f64 {
        self.moment(n) * (1.0 - s / self.r_f).powf(-self.m_f - n as f64)
    }

    /// `E[exp(zG)] − 1` for complex `z` with `Re z < r_f`, without
    /// cancellation for small `|z|`.
    pub fn mgf_m1(&self, z: Complex64) -> Complex64 {
        let w = z / self.r_f;
        if w.norm() < 0.05 {
            // Binomial series Σ_{k≥1} m(m+1)…(m+k−1)/k! wᵏ.
            let mut term = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 0..30 {
                term *= w * ((self.m_f + k as f64) / (k as f64 + 1.0));
                sum += term;
                if term.norm() < 1e-17 * sum.norm() {
                    break;
                }
            }
            sum
        } else {
            (-(Complex64::new(1.0, 0.0) - w).ln() * self.m_f).exp() - 1.0
        }
    }

    /// Real-argument version of [`GainLaw::mgf_m1`].
    pub fn mgf_m1_real(&self, s: f64) -> f64 {
        (-self.m_f * (-s / self.r_f).ln_1p()).exp_m1()
    }
}

/// CGF of a Gamma gain: `K(t) = −m ln(1 − t/r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCgf {
    pub law: GainLaw,
    strip: ConvergenceStrip,
}

pub fn gamma_gain_cgf(g: GainLaw) -> Result<GammaCgf> {
    GainLaw::new(g.m_f, g.r_f)?;
    Ok(GammaCgf { law: g, strip: ConvergenceStrip::new(f64::NEG_INFINITY, g.r_f)? })
}

impl Cgf for GammaCgf {
    fn strip(&self) -> ConvergenceStrip {
        self.strip
    }

    fn eval(&self, t: f64) -> Result<f64> {
        self.strip.check(t)?;
        Ok(-self.law.m_f * (-t / self.law.r_f).ln_1p())
    }

    fn deriv(&self, n: usize, t: f64) -> Result<f64> {
        check_order(n)?;
        self.strip.check(t)?;
        let fact = [1.0, 1.0, 2.0, 6.0][n - 1];
        Ok(self.law.m_f * fact / (self.law.r_f - t).powi(n as i32))
    }

    fn char_exponent(&self, u: f64) -> Result<Complex64> {
        Ok(-(Complex64::new(1.0, -u / self.law.r_f)).ln() * self.law.m_f)
    }
}
