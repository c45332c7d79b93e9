use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use spa_outage::cli::{self, Row, Scenario, KEYS};
use spa_outage::Error;

const VERBS: [(&str, &str); 4] = [
    ("outage", "Evaluate each scenario once per configured method"),
    ("sweep", "Evaluate every method over the scenario's sweep grid"),
    ("compare", "Compare methods against Gil-Pelaez (Monte Carlo when unstable)"),
    ("oracle", "Run both reference oracles"),
];

fn command() -> Command {
    let mut common = vec![
        Arg::new("config").long("config").value_name("PATH").value_parser(value_parser!(PathBuf)).help("INI scenario file"),
        Arg::new("out").long("out").value_name("PATH").value_parser(value_parser!(PathBuf)).help("CSV output (stdout when omitted)"),
        Arg::new("threads").long("threads").value_name("N").value_parser(value_parser!(usize)).help("Worker threads"),
        Arg::new("scenario").long("scenario").value_name("NAME").help("Only run this config section"),
        Arg::new("timing").long("timing").action(ArgAction::SetTrue).help("Fill the wall_time_ms column"),
    ];
    for &k in KEYS {
        let help = match k {
            "method" => "Comma-separated: auto, nig, sym_nig, normal, gil_pelaez, mc",
            "seed" => "Monte Carlo seed",
            _ => "Overrides the config key of the same name",
        };
        common.push(Arg::new(k).long(k).value_name("VALUE").allow_hyphen_values(true).help(help));
    }
    Command::new("spa-outage")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Outage probabilities by saddle point approximation, Gil-Pelaez inversion and Monte Carlo")
        .subcommand_required(true)
        .subcommands(VERBS.iter().map(|(name, about)| Command::new(*name).about(*about).args(common.clone())))
}

fn scenarios(m: &ArgMatches) -> Result<Vec<Scenario>, Error> {
    let config_err = |detail: String| Error::Config { field: "config".into(), detail };
    let text = match m.get_one::<PathBuf>("config") {
        Some(p) => std::fs::read_to_string(p).map_err(|e| config_err(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let overrides: Vec<(String, String)> = KEYS
        .iter()
        .filter_map(|&k| m.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
        .collect();
    let mut all = cli::load_scenarios(&text, &overrides)?;
    if let Some(name) = m.get_one::<String>("scenario") {
        all.retain(|s| &s.name == name);
        if all.is_empty() {
            return Err(Error::Config { field: "scenario".into(), detail: format!("no section named `{name}`") });
        }
    }
    Ok(all)
}

/// Returns whether any evaluation failed.
fn run(verb: &str, m: &ArgMatches) -> Result<bool, Error> {
    if let Some(&n) = m.get_one::<usize>("threads") {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config { field: "threads".into(), detail: e.to_string() })?;
    }
    let mut rows: Vec<Row> = Vec::new();
    for sc in scenarios(m)? {
        rows.extend(match verb {
            "outage" => cli::run_sweep(&Scenario { sweep: None, ..sc })?,
            "sweep" => cli::run_sweep(&sc)?,
            "compare" => cli::run_compare(&sc)?,
            _ => cli::run_oracle(&sc)?,
        });
    }
    if matches!(verb, "compare" | "oracle") {
        eprint!("{}", cli::format_table(&rows));
    }
    for r in &rows {
        if let Some(e) = &r.error {
            eprintln!("{} ({}): {e}", r.method, r.model);
        }
    }
    let timing = m.get_flag("timing");
    match m.get_one::<PathBuf>("out") {
        Some(p) => cli::write_csv(BufWriter::new(File::create(p)?), &rows, timing)?,
        None => cli::write_csv(io::stdout().lock(), &rows, timing)?,
    }
    Ok(rows.iter().any(|r| r.error.is_some()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = command().get_matches();
    let (verb, m) = matches.subcommand().expect("subcommand required");
    match run(verb, m) {
        Ok(failed) if failed && verb != "sweep" => ExitCode::from(3),
        Ok(_) => ExitCode::SUCCESS,
        Err(e @ Error::Config { .. }) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
