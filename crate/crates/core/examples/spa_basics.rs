//! Saddle point approximations of a two-exponential SIR model, where the
//! exact outage is θ/(1 + θ), with every base distribution.

use std::sync::Arc;

use spa_outage::cgf::{gamma_gain_cgf, omega_cgf, CgfRef, GainLaw, OmegaSpec};
use spa_outage::spa::{spa_outage, BaseKind, SpaMethod};

fn main() -> spa_outage::Result<()> {
    let exp: CgfRef = Arc::new(gamma_gain_cgf(GainLaw::rayleigh())?);
    let methods = [
        ("auto", SpaMethod::Auto),
        ("nig", SpaMethod::Base(BaseKind::AsymmetricNig)),
        ("sym_nig", SpaMethod::Base(BaseKind::SymmetricNig)),
        ("normal", SpaMethod::Base(BaseKind::Normal)),
    ];
    println!("{:>8} {:>10} {:>9} {:>10} {:>10}  used", "theta_dB", "exact", "method", "p_out", "error");
    for th_db in [-5.0, 0.0, 3.0, 5.0, 10.0] {
        let theta = 10f64.powf(th_db / 10.0);
        let omega = omega_cgf(OmegaSpec { signal: exp.clone(), interference: exp.clone(), theta })?;
        let exact = theta / (1.0 + theta);
        for (name, m) in methods {
            let r = spa_outage(&omega, theta, 0.0, m)?;
            let note = if r.fell_back { format!("{} (fell back)", r.method_used) } else { r.method_used.to_string() };
            println!("{th_db:>8} {exact:>10.6} {name:>9} {:>10.6} {:>10.2e}  {note}", r.ccdf, r.ccdf - exact);
        }
    }

    // Diagnostics at one point: the saddle point and the quantities the
    // NIG bases are matched to.
    let omega = omega_cgf(OmegaSpec { signal: exp.clone(), interference: exp, theta: 3.0 })?;
    let r = spa_outage(&omega, 3.0, 0.0, SpaMethod::Auto)?;
    let s = r.saddle;
    println!("\ntheta = 3: t = {:.6}, c = {:.6}, eta = {:.4}, rho = {:.4}", s.t_hat, s.c, s.eta, s.rho);
    println!("rejected bases: {:?}", r.condition_report.rejected);
    Ok(())
}
