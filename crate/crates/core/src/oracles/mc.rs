use std::f64::consts::PI;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use rayon::prelude::*;

use crate::cgf::{GainLaw, PppGain, PppGeometry};
use crate::error::{Error, Result};

/// Monte Carlo run parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    /// Outer radius of the simulated region for point-process models (m).
    pub r_tot: f64,
    /// Trials per deterministic random substream.
    pub stream_block: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings { trials: 1_000_000, seed: 0, r_tot: 1000.0, stream_block: 1 << 16, threads: None }
    }
}

impl McSettings {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.stream_block == 0 {
            return Err(Error::config("stream_block", "must be at least 1"));
        }
        if !(self.r_tot > 0.0 && self.r_tot.is_finite()) {
            return Err(Error::config("r_tot", format!("must be positive, got {}", self.r_tot)));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        Ok(())
    }
}

/// Empirical outage probability with a 95% normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    pub ci_halfwidth: f64,
    pub outages: u64,
    pub trials: u64,
}

impl McEstimate {
    fn from_counts(outages: u64, trials: u64) -> Self {
        let p_hat = outages as f64 / trials as f64;
        let ci_halfwidth = 1.959_963_984_540_054 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        McEstimate { p_hat, ci_halfwidth, outages, trials }
    }
}

/// How the numbers of cooperating and interfering transmitters are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aggregation {
    /// `M ~ Poisson(λ₁)` cooperating, `N ~ Poisson(λ₂)` interfering.
    Poisson { lam1: f64, lam2: f64 },
    /// `M ~ Bin(L, p)` cooperating and, independently, `N ~ Bin(L, 1 − p)`
    /// interfering.
    Binomial { trials: u32, prob: f64 },
}

/// Zero signal counts as outage whatever the threshold.
fn is_outage(x: f64, y: f64, theta: f64, sigma2: f64) -> bool {
    x == 0.0 || x < theta * (y + sigma2)
}

/// Runs `trials` Bernoulli experiments in blocks, each block on its own
/// ChaCha stream, and sums the integer counts, so the result does not
/// depend on the number of workers.
fn run_blocks<F>(mc: &McSettings, trial: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    mc.validate()?;
    let blocks = mc.trials.div_ceil(mc.stream_block);
    let count_block = |b: u64| -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
        rng.set_stream(b);
        let n = mc.stream_block.min(mc.trials - b * mc.stream_block);
        (0..n).filter(|_| trial(&mut rng)).count() as u64
    };
    let total = |_: ()| (0..blocks).into_par_iter().map(count_block).sum::<u64>();
    let outages = match mc.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(|| total(())),
        None => total(()),
    };
    Ok(McEstimate::from_counts(outages, mc.trials))
}

fn check_prob(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::config(name, format!("must lie in [0, 1], got {v}")))
    }
}

/// Outage of `X/(Y + σ²)` where `X`, `Y` are sums of `M` and `N` Gamma gains.
///
/// A sum of `k` independent `Gamma(m, r)` gains is drawn as one
/// `Gamma(k·m, r)` variate.
pub fn mc_outage_compound(agg: Aggregation, gain: GainLaw, theta: f64, sigma2: f64, mc: &McSettings) -> Result<McEstimate> {
    if !(theta >= 0.0 && sigma2 >= 0.0) {
        return Err(Error::config("theta", format!("theta = {theta}, sigma2 = {sigma2}")));
    }
    let gain_sum = move |k: u64, rng: &mut ChaCha8Rng| -> f64 {
        if k == 0 {
            0.0
        } else {
            Gamma::new(k as f64 * gain.m_f, 1.0 / gain.r_f).map(|g| g.sample(rng)).unwrap_or(f64::NAN)
        }
    };
    match agg {
        Aggregation::Poisson { lam1, lam2 } => {
            if !(lam1 >= 0.0 && lam2 >= 0.0) {
                return Err(Error::config("lambda", format!("lam1 = {lam1}, lam2 = {lam2}")));
            }
            let count = |lam: f64, rng: &mut ChaCha8Rng| -> u64 {
                if lam == 0.0 {
                    0
                } else {
                    Poisson::new(lam).map(|p| p.sample(rng) as u64).unwrap_or(0)
                }
            };
            run_blocks(mc, |rng| {
                let m = count(lam1, rng);
                let n = count(lam2, rng);
                let x = gain_sum(m, rng);
                let y = gain_sum(n, rng);
                is_outage(x, y, theta, sigma2)
            })
        }
        Aggregation::Binomial { trials, prob } => {
            check_prob("p", prob)?;
            let coop = Binomial::new(trials as u64, prob).map_err(|e| Error::config("p", e.to_string()))?;
            let intf = Binomial::new(trials as u64, 1.0 - prob).map_err(|e| Error::config("p", e.to_string()))?;
            run_blocks(mc, |rng| {
                let m = coop.sample(rng);
                let n = intf.sample(rng);
                let x = gain_sum(m, rng);
                let y = gain_sum(n, rng);
                is_outage(x, y, theta, sigma2)
            })
        }
    }
}

/// Outage of the cooperative point-process model: base stations form a PPP
/// of intensity `λ` on `a ≤ r < r_out`; those in `[a, R)` send the signal
/// (combined coherently), those in `[R, r_out)` interfere.
///
/// `r_out` is the geometry's outer edge, or `mc.r_tot` when that is smaller
/// (always the case for an unbounded geometry). Logs a warning when the
/// mean interference dropped by this truncation exceeds 1% of the total.
pub fn mc_outage_ppp_comp(geom: &PppGeometry, gain: PppGain, theta: f64, sigma2: f64, mc: &McSettings) -> Result<McEstimate> {
    geom.validate()?;
    let r_out = geom.r_outer.min(mc.r_tot);
    if !(r_out > geom.r_coop) {
        return Err(Error::config("r_tot", format!("must exceed R = {}, got {}", geom.r_coop, mc.r_tot)));
    }
    if !(theta >= 0.0 && sigma2 >= 0.0) {
        return Err(Error::config("theta", format!("theta = {theta}, sigma2 = {sigma2}")));
    }
    let kept = |r: f64| if r.is_finite() { (geom.r_coop / r).powf(geom.alpha - 2.0) } else { 0.0 };
    let missing = kept(r_out) - kept(geom.r_outer);
    if missing > 0.01 {
        warn!("interference beyond r_tot = {r_out} m carries {:.2}% of its mean", 100.0 * missing);
    }
    let (a2, r2, t2) = (geom.a * geom.a, geom.r_coop * geom.r_coop, r_out * r_out);
    let mean_coop = geom.lam * PI * (r2 - a2);
    let mean_intf = geom.lam * PI * (t2 - r2);
    let coop = Poisson::new(mean_coop).map_err(|e| Error::config("lambda", e.to_string()))?;
    let intf = Poisson::new(mean_intf).map_err(|e| Error::config("lambda", e.to_string()))?;
    let fading = match gain {
        PppGain::Gamma(g) => Some(Gamma::new(g.m_f, 1.0 / g.r_f).map_err(|e| Error::config("m_f", e.to_string()))?),
        PppGain::Deterministic => None,
    };
    let half_alpha = 0.5 * geom.alpha;
    let shot = move |count: u64, lo2: f64, hi2: f64, rng: &mut ChaCha8Rng| -> f64 {
        let mut sum = 0.0;
        for _ in 0..count {
            let u: f64 = rng.random();
            let r_sq = u * (hi2 - lo2) + lo2;
            let g = fading.map_or(1.0, |d| d.sample(rng));
            sum += g * r_sq.powf(-half_alpha);
        }
        geom.power * sum
    };
    run_blocks(mc, |rng| {
        let m = coop.sample(rng) as u64;
        let n = intf.sample(rng) as u64;
        let x = shot(m, a2, r2, rng);
        let y = shot(n, r2, t2, rng);
        is_outage(x, y, theta, sigma2)
    })
}
