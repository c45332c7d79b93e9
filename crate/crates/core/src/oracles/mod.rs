//! Reference values independent of the saddle point machinery: numerical
//! inversion of the characteristic function and Monte Carlo simulation.

mod gil_pelaez;
mod mc;

pub use gil_pelaez::{gil_pelaez_ccdf, gil_pelaez_cdf, Inversion, InversionSettings};
pub use mc::{mc_outage_compound, mc_outage_ppp_comp, Aggregation, McEstimate, McSettings};
