//! Scenarios from INI text: shared keys at the top, one section per
//! scenario, compared against the reference oracle.

use spa_outage::cli::{format_table, load_scenarios, run_compare};

const CONFIG: &str = "
model = ppp_comp
avg_bs_count = 100
a_m = 30
R_m = 150
method = auto, normal
trials = 200000

[low_threshold]
theta_db = 0

[high_threshold]
theta_db = 5
sweep_field = avg_bs_count
sweep_from = 50
sweep_to = 300
sweep_steps = 6
";

fn main() -> spa_outage::Result<()> {
    // Command-line style overrides apply to every section.
    let overrides = [("seed".to_string(), "3".to_string())];
    for sc in load_scenarios(CONFIG, &overrides)? {
        println!("[{}]", sc.name);
        print!("{}", format_table(&run_compare(&sc)?));
    }
    Ok(())
}
