//! Outage probability of SIR/SINR-type ratios via saddle point approximation
//! with normal and normal inverse Gaussian base distributions, plus
//! Gil-Pelaez inversion and Monte Carlo reference oracles.

pub mod cgf;
pub mod cli;
pub mod error;
pub mod oracles;
pub mod quad;
pub mod saddle;
pub mod spa;
pub mod specfun;

pub use error::{Error, Result};
