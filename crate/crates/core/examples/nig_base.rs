//! NIG distribution functions, and the NIG-based saddle point
//! approximation reproducing an NIG law exactly.

use spa_outage::cgf::{Cgf, NigCgf};
use spa_outage::spa::{spa_cdf, BaseKind, NigParams, SpaMethod};
use spa_outage::specfun::{nig_cdf, nig_pdf};

fn main() -> spa_outage::Result<()> {
    let p = NigParams::new(2.0, 1.0, 0.0, 1.0)?;
    let k = NigCgf::new(p)?;
    println!("NIG(alpha = 2, beta = 1, mu = 0, delta = 1)");
    println!("mean {:.6}, variance {:.6}", k.cumulant(1)?, k.cumulant(2)?);
    println!("{:>6} {:>10} {:>12} {:>12} {:>12} {:>12}", "x", "pdf", "cdf", "asym NIG", "sym NIG", "normal");
    for x in [-2.0, -1.0, -0.5, 0.25, 1.0, 2.0, 4.0] {
        let exact = nig_cdf(x, &p)?;
        let approx = |b| spa_cdf(&k, x, SpaMethod::Base(b)).map(|r| r.cdf);
        println!(
            "{x:>6} {:>10.6} {exact:>12.9} {:>12.9} {:>12.9} {:>12.9}",
            nig_pdf(x, &p)?,
            approx(BaseKind::AsymmetricNig)?,
            approx(BaseKind::SymmetricNig)?,
            approx(BaseKind::Normal)?,
        );
    }
    Ok(())
}
