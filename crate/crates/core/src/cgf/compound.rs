use num_complex::Complex64;

use super::{check_order, Cgf, CgfRef, ConvergenceStrip};
use crate::error::{Error, Result};

/// Derivatives 1..4 of `exp(k(t))` divided by `exp(k(t))`, from the jet of `k`.
fn exp_jet_ratio(j: &[f64; 5]) -> [f64; 4] {
    let (k1, k2, k3, k4) = (j[1], j[2], j[3], j[4]);
    [
        k1,
        k2 + k1 * k1,
        k3 + 3.0 * k1 * k2 + k1.powi(3),
        k4 + 4.0 * k1 * k3 + 3.0 * k2 * k2 + 6.0 * k1 * k1 * k2 + k1.powi(4),
    ]
}

/// Sum of a Poisson(`lambda`) number of i.i.d. copies of `inner`:
/// `K(t) = λ(exp(K_inner(t)) − 1)`.
#[derive(Debug, Clone)]
pub struct CompoundPoisson {
    pub lambda: f64,
    pub inner: CgfRef,
}

pub fn compound_poisson_cgf(lambda_pts: f64, inner: CgfRef) -> Result<CompoundPoisson> {
    if !(lambda_pts > 0.0 && lambda_pts.is_finite()) {
        return Err(Error::config("lambda", format!("must be positive, got {lambda_pts}")));
    }
    Ok(CompoundPoisson { lambda: lambda_pts, inner })
}

impl Cgf for CompoundPoisson {
    fn strip(&self) -> ConvergenceStrip {
        self.inner.strip()
    }

    fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.lambda * self.inner.eval(t)?.exp_m1())
    }

    fn deriv(&self, n: usize, t: f64) -> Result<f64> {
        check_order(n)?;
        Ok(self.jet(t)?[n])
    }

    fn jet(&self, t: f64) -> Result<[f64; 5]> {
        let j = self.inner.jet(t)?;
        let m = j[0].exp();
        let r = exp_jet_ratio(&j);
        let l = self.lambda;
        Ok([l * j[0].exp_m1(), l * m * r[0], l * m * r[1], l * m * r[2], l * m * r[3]])
    }

    fn char_exponent(&self, u: f64) -> Result<Complex64> {
        Ok((self.inner.char_exponent(u)?.exp() - 1.0) * self.lambda)
    }
}

/// Sum of a Binomial(`trials`, `prob`) number of i.i.d. copies of `inner`:
/// `K(t) = L ln(1 − p + p exp(K_inner(t)))`.
#[derive(Debug, Clone)]
pub struct CompoundBinomial {
    pub trials: u32,
    pub prob: f64,
    pub inner: CgfRef,
}

pub fn compound_binomial_cgf(trials: u32, prob: f64, inner: CgfRef) -> Result<CompoundBinomial> {
    if trials == 0 {
        return Err(Error::config("L", "must be at least 1"));
    }
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::config("p", format!("must lie in [0, 1], got {prob}")));
    }
    Ok(CompoundBinomial { trials, prob, inner })
}

impl Cgf for CompoundBinomial {
    fn strip(&self) -> ConvergenceStrip {
        if self.prob == 0.0 {
            ConvergenceStrip::REAL_LINE
        } else {
            self.inner.strip()
        }
    }

    fn eval(&self, t: f64) -> Result<f64> {
        if self.prob == 0.0 {
            return Ok(0.0);
        }
        let l = self.trials as f64;
        Ok(l * (self.prob * self.inner.eval(t)?.exp_m1()).ln_1p())
    }

    fn deriv(&self, n: usize, t: f64) -> Result<f64> {
        check_order(n)?;
        Ok(self.jet(t)?[n])
    }

    fn jet(&self, t: f64) -> Result<[f64; 5]> {
        if self.prob == 0.0 {
            return Ok([0.0; 5]);
        }
        let j = self.inner.jet(t)?;
        let l = self.trials as f64;
        let p = self.prob;
        // h = q + pM; a_n = h⁽ⁿ⁾/h.
        let em1 = j[0].exp_m1();
        let h = 1.0 + p * em1;
        let w = p * (em1 + 1.0) / h;
        let r = exp_jet_ratio(&j);
        let (a1, a2, a3, a4) = (w * r[0], w * r[1], w * r[2], w * r[3]);
        Ok([
            l * h.ln(),
            l * a1,
            l * (a2 - a1 * a1),
            l * (a3 - 3.0 * a1 * a2 + 2.0 * a1.powi(3)),
            l * (a4 - 4.0 * a1 * a3 - 3.0 * a2 * a2 + 12.0 * a1 * a1 * a2 - 6.0 * a1.powi(4)),
        ])
    }

    fn char_exponent(&self, u: f64) -> Result<Complex64> {
        if self.prob == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let h = (self.inner.char_exponent(u)?.exp() - 1.0) * self.prob + 1.0;
        // Only exp(K(ju)) is meaningful, so the principal branch suffices.
        Ok(h.ln() * self.trials as f64)
    }
}
