//! Outage against the mean number of transmitters for Poisson and binomial
//! aggregation, written as CSV to stdout.

use spa_outage::cli::{run_sweep, write_csv, Model, Scale, Scenario, Sweep};

fn main() -> spa_outage::Result<()> {
    let methods = ["normal", "sym_nig", "gil_pelaez"].iter().map(|m| m.parse()).collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for th_db in [-5.0, 0.0, 5.0] {
        for (model, field) in [(Model::PoissonNakagami, "lambda"), (Model::BinomialNakagami, "L")] {
            let sc = Scenario {
                model,
                lambda: Some(2.0),
                p: 0.7,
                theta_db: th_db,
                methods: methods.clone(),
                sweep: Some(Sweep { field: field.into(), from: 2.0, to: 20.0, steps: 10, scale: Scale::Linear }),
                ..Default::default()
            };
            rows.extend(run_sweep(&sc)?);
        }
    }
    write_csv(std::io::stdout().lock(), &rows, false)
}
