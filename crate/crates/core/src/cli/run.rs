use std::io::Write;
use std::time::Instant;

use log::warn;
use rayon::prelude::*;

use super::scenario::{Method, Model, Scenario};
use crate::cgf::PppGain;
use crate::error::{Error, Result};
use crate::oracles::{gil_pelaez_ccdf, mc_outage_compound, mc_outage_ppp_comp, Aggregation, McSettings};
use crate::spa::{spa_outage, ConditionReport};

/// Outcome of one method on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageResult {
    pub method: Method,
    /// Outage probability in `[0, 1]`.
    pub p_out: f64,
    /// Unclamped value.
    pub raw: f64,
    /// Base actually used (`gil_pelaez` / `mc` for the oracles).
    pub method_used: String,
    pub fell_back: bool,
    pub condition_report: Option<ConditionReport>,
    /// Inversion error estimate.
    pub err_est: Option<f64>,
    /// Monte Carlo 95% half-width.
    pub ci_halfwidth: Option<f64>,
    /// Inversion precision flag.
    pub unstable: Option<bool>,
    pub wall_time_ms: f64,
}

/// Evaluates `method` on `sc`.
pub fn run_method(sc: &Scenario, method: Method) -> Result<OutageResult> {
    let start = Instant::now();
    let theta = sc.theta();
    let mut r = match method {
        Method::Spa(m) => {
            let s = spa_outage(&sc.omega()?, theta, sc.sigma2, m)?;
            OutageResult {
                method,
                p_out: s.ccdf,
                raw: s.raw_ccdf,
                method_used: s.method_used.to_string(),
                fell_back: s.fell_back,
                condition_report: Some(s.condition_report),
                err_est: None,
                ci_halfwidth: None,
                unstable: None,
                wall_time_ms: 0.0,
            }
        }
        Method::GilPelaez => {
            let g = gil_pelaez_ccdf(&sc.omega()?, -theta * sc.sigma2, &sc.inversion)?;
            OutageResult {
                method,
                p_out: g.value.clamp(0.0, 1.0),
                raw: g.value,
                method_used: method.to_string(),
                fell_back: false,
                condition_report: None,
                err_est: Some(g.err_est),
                ci_halfwidth: None,
                unstable: Some(g.unstable),
                wall_time_ms: 0.0,
            }
        }
        Method::Mc => {
            let e = run_mc(sc)?;
            OutageResult {
                method,
                p_out: e.p_hat,
                raw: e.p_hat,
                method_used: method.to_string(),
                fell_back: false,
                condition_report: None,
                err_est: None,
                ci_halfwidth: Some(e.ci_halfwidth),
                unstable: None,
                wall_time_ms: 0.0,
            }
        }
    };
    r.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(r)
}

/// Evaluates the first configured method.
pub fn run_outage(sc: &Scenario) -> Result<OutageResult> {
    run_method(sc, sc.methods[0])
}

fn run_mc(sc: &Scenario) -> Result<crate::oracles::McEstimate> {
    let theta = sc.theta();
    let mc = McSettings { r_tot: sc.r_tot_m, ..sc.mc };
    match sc.model {
        Model::PoissonNakagami => {
            let lam = sc.lambda.unwrap_or(f64::NAN);
            let agg = Aggregation::Poisson { lam1: sc.p * lam, lam2: (1.0 - sc.p) * lam };
            mc_outage_compound(agg, sc.gain(), theta, sc.sigma2, &mc)
        }
        Model::BinomialNakagami => {
            mc_outage_compound(Aggregation::Binomial { trials: sc.l, prob: sc.p }, sc.gain(), theta, sc.sigma2, &mc)
        }
        Model::PppComp => mc_outage_ppp_comp(&sc.geometry(), PppGain::Gamma(sc.gain()), theta, sc.sigma2, &mc),
        Model::PppCompNofading => mc_outage_ppp_comp(&sc.geometry(), PppGain::Deterministic, theta, sc.sigma2, &mc),
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub model: Model,
    pub method: Method,
    pub sweep_field: Option<String>,
    pub sweep_value: Option<f64>,
    pub theta_db: f64,
    pub result: Option<OutageResult>,
    /// Error message when the method failed.
    pub error: Option<String>,
    /// Name of the reference method (compare only).
    pub reference: Option<Method>,
    pub abs_err_vs_reference: Option<f64>,
}

pub const CSV_HEADER: [&str; 12] = [
    "model",
    "method",
    "sweep_field",
    "sweep_value",
    "theta_db",
    "p_out",
    "raw",
    "fell_back",
    "reference",
    "abs_err_vs_reference",
    "unstable",
    "wall_time_ms",
];

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl Row {
    fn new(sc: &Scenario, method: Method, sweep: Option<(&str, f64)>, res: Result<OutageResult>) -> Row {
        let (result, error) = match res {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Row {
            model: sc.model,
            method,
            sweep_field: sweep.map(|(f, _)| f.to_string()),
            sweep_value: sweep.map(|(_, v)| v),
            theta_db: sc.theta_db,
            result,
            error,
            reference: None,
            abs_err_vs_reference: None,
        }
    }

    pub fn p_out(&self) -> Option<f64> {
        self.result.as_ref().map(|r| r.p_out)
    }

    /// CSV fields in [`CSV_HEADER`] order; wall time only when `timing`.
    pub fn record(&self, timing: bool) -> [String; 12] {
        let r = self.result.as_ref();
        [
            self.model.to_string(),
            self.method.to_string(),
            self.sweep_field.clone().unwrap_or_default(),
            cell(self.sweep_value),
            self.theta_db.to_string(),
            cell(r.map(|r| r.p_out)),
            cell(r.map(|r| r.raw)),
            cell(r.map(|r| r.fell_back)),
            cell(self.reference),
            cell(self.abs_err_vs_reference),
            cell(r.and_then(|r| r.unstable)),
            if timing { cell(r.map(|r| r.wall_time_ms)) } else { String::new() },
        ]
    }
}

/// Writes `rows` as CSV with a header line.
pub fn write_csv<W: Write>(out: W, rows: &[Row], timing: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.record(timing)).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Grid points of the scenario's sweep, or the scenario itself.
fn points(sc: &Scenario) -> Result<Vec<(Scenario, Option<(String, f64)>)>> {
    match &sc.sweep {
        None => Ok(vec![(sc.clone(), None)]),
        Some(s) => s
            .grid()
            .into_iter()
            .map(|v| Ok((sc.with_value(&s.field, v)?, Some((s.field.clone(), v)))))
            .collect(),
    }
}

/// Every configured method at every sweep point, in grid order. Failed
/// evaluations give rows without values; the sweep carries on.
pub fn run_sweep(sc: &Scenario) -> Result<Vec<Row>> {
    let pts = points(sc)?;
    let jobs: Vec<(usize, Method)> = (0..pts.len()).flat_map(|i| sc.methods.iter().map(move |&m| (i, m))).collect();
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(i, m)| {
            let (p, sw) = &pts[i];
            Row::new(p, m, sw.as_ref().map(|(f, v)| (f.as_str(), *v)), run_method(p, m))
        })
        .collect();
    for r in &rows {
        if let Some(e) = &r.error {
            warn!("{} at {}={}: {e}", r.method, r.sweep_field.as_deref().unwrap_or("-"), cell(r.sweep_value));
        }
    }
    Ok(rows)
}

/// Configured methods against a reference at every sweep point.
///
/// The reference is `gil_pelaez`, replaced by `mc` when the inversion fails
/// or flags its value as unstable. Each point yields one row per method
/// plus rows for the oracles used, the reference row last.
pub fn run_compare(sc: &Scenario) -> Result<Vec<Row>> {
    let pts = points(sc)?;
    let per_point: Vec<Vec<Row>> = pts
        .par_iter()
        .map(|(p, sw)| {
            let sw = sw.as_ref().map(|(f, v)| (f.as_str(), *v));
            let gp = Row::new(p, Method::GilPelaez, sw, run_method(p, Method::GilPelaez));
            let gp_ok = gp.result.as_ref().is_some_and(|r| r.unstable == Some(false));
            let mut oracle_rows = vec![gp];
            if !gp_ok || sc.methods.contains(&Method::Mc) {
                oracle_rows.push(Row::new(p, Method::Mc, sw, run_method(p, Method::Mc)));
                if gp_ok {
                    oracle_rows.swap(0, 1);
                }
            }
            let reference = oracle_rows[oracle_rows.len() - 1].method;
            let ref_value = oracle_rows[oracle_rows.len() - 1].p_out();
            let mut rows: Vec<Row> = sc
                .methods
                .iter()
                .filter(|m| !m.is_oracle())
                .map(|&m| Row::new(p, m, sw, run_method(p, m)))
                .chain(oracle_rows)
                .collect();
            for r in &mut rows {
                r.reference = Some(reference);
                r.abs_err_vs_reference = match (r.p_out(), ref_value) {
                    (Some(a), Some(b)) => Some((a - b).abs()),
                    _ => None,
                };
            }
            rows
        })
        .collect();
    Ok(per_point.into_iter().flatten().collect())
}

/// Both oracles on every sweep point; the `mc` row is referenced to
/// `gil_pelaez`.
pub fn run_oracle(sc: &Scenario) -> Result<Vec<Row>> {
    let pts = points(sc)?;
    let mut rows = Vec::new();
    for (p, sw) in &pts {
        let sw = sw.as_ref().map(|(f, v)| (f.as_str(), *v));
        let gp = Row::new(p, Method::GilPelaez, sw, run_method(p, Method::GilPelaez));
        let mut mc = Row::new(p, Method::Mc, sw, run_method(p, Method::Mc));
        mc.reference = Some(Method::GilPelaez);
        mc.abs_err_vs_reference = match (mc.p_out(), gp.p_out()) {
            (Some(a), Some(b)) => Some((a - b).abs()),
            _ => None,
        };
        rows.push(gp);
        rows.push(mc);
    }
    Ok(rows)
}

/// Plain-text table of compare or oracle rows.
pub fn format_table(rows: &[Row]) -> String {
    let mut s = format!(
        "{:<18} {:<11} {:>12} {:>14} {:>13} {:>9} {:>10}  {}\n",
        "scenario point", "method", "p_out", "+/-", "|err| vs ref", "fell_back", "base", "reference"
    );
    for r in rows {
        let point = match (&r.sweep_field, r.sweep_value) {
            (Some(f), Some(v)) => format!("{f}={v}"),
            _ => format!("theta_db={}", r.theta_db),
        };
        let (p, pm, fb, base) = match &r.result {
            Some(o) => (
                format!("{:.6e}", o.p_out),
                o.err_est.or(o.ci_halfwidth).map(|e| format!("{e:.2e}")).unwrap_or_default(),
                o.fell_back.to_string(),
                o.method_used.clone(),
            ),
            None => ("failed".into(), String::new(), String::new(), String::new()),
        };
        let err = r.abs_err_vs_reference.map(|e| format!("{e:.3e}")).unwrap_or_default();
        let reference = r.reference.map(|m| m.to_string()).unwrap_or_default();
        s.push_str(&format!("{point:<18} {:<11} {p:>12} {pm:>14} {err:>13} {fb:>9} {base:>10}  {reference}\n", r.method.to_string()));
    }
    s
}
