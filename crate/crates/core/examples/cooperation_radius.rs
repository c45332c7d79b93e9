//! Cooperative transmission from a Poisson field of base stations: outage
//! against the cooperation radius R, with every SPA base next to inversion.

use spa_outage::cli::{run_method, Model, Scenario};

fn main() -> spa_outage::Result<()> {
    let names = ["auto", "nig", "sym_nig", "normal", "gil_pelaez"];
    print!("{:>6}", "R_m");
    for n in names {
        print!(" {n:>11}");
    }
    println!("  base used by auto");
    for r in (40..=400).step_by(40) {
        let sc = Scenario { model: Model::PppComp, avg_bs_count: Some(100.0), r_m: r as f64, theta_db: 0.0, ..Default::default() };
        print!("{r:>6}");
        let mut used = String::new();
        for n in names {
            let res = run_method(&sc, n.parse()?)?;
            if n == "auto" {
                used = res.method_used.clone();
            }
            print!(" {:>11.6}", res.p_out);
        }
        println!("  {used}");
    }

    // Without fading the signal and interference are deterministic shot
    // noise; the same machinery applies.
    let sc = Scenario { model: Model::PppCompNofading, avg_bs_count: Some(100.0), theta_db: 0.0, ..Default::default() };
    for n in ["auto", "normal", "gil_pelaez"] {
        println!("no fading, R = 150 m, {n}: {:.6}", run_method(&sc, n.parse()?)?.p_out);
    }
    Ok(())
}
