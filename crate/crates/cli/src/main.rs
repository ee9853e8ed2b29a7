use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use rpt_iga_core::case::run_case;
use rpt_iga_core::config::CaseConfig;
use rpt_iga_core::laminate::ShearModel;
use rpt_iga_core::reference::{table_cases, TABLE_IDS};
use rpt_iga_core::suite::{run_suite, SuiteOptions};

/// Isogeometric refined-plate analysis of laminated composite plates.
///
/// Boundary codes are four letters from S (simply supported), C (clamped)
/// and F (free) for the edges y = 0, x = a, y = b, x = 0 in that order, so
/// SFSF has its simple supports on y = 0 and y = b.
#[derive(Parser)]
#[command(name = "rpt-iga", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case description (TOML) and print its normalized results.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory for results.csv, profile_*.csv and mode_*.csv
        /// (overrides `output` in the file).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark table and compare with the reference values.
    /// Exits nonzero if any entry is out of tolerance.
    Suite {
        /// table2 ... table10, or all
        #[arg(long)]
        table: String,
        /// Restrict to one shear model (reddy, shimpi, arya, karama, fisdt).
        #[arg(long)]
        model: Option<String>,
        /// Directory for report.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the cases one after another.
        #[arg(long)]
        serial: bool,
    },
    /// List the benchmark cases with their reference quantities.
    ListCases {
        #[arg(long, default_value = "all")]
        table: String,
    },
    /// Print the case description of a benchmark case, ready for `run`.
    ShowCase { id: String },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = CaseConfig::from_file(&config)?;
            let result = run_case(&cfg, out.as_deref())?;
            for (name, value) in &result.quantities {
                println!("{name:<18} {value:.6}");
            }
            for path in &result.artifacts {
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Suite { table, model, out, serial } => {
            let model = model.map(|m| m.parse::<ShearModel>()).transpose()?;
            let opts = SuiteOptions {
                model,
                out: out.as_deref(),
                parallel: !serial,
            };
            let report = run_suite(&table, &opts)?;
            if report.rows.is_empty() {
                bail!("no cases selected");
            }
            let failures: Vec<_> = report.failures().collect();
            for r in &failures {
                let e = &r.entry;
                match (r.computed, &r.error) {
                    (Some(c), _) => println!(
                        "FAIL {} {}: {c:.6} vs {} ({:.3}%, tolerance {:.1}%)",
                        e.case_id,
                        e.quantity,
                        e.value,
                        100.0 * e.relative_error(c),
                        100.0 * e.tolerance
                    ),
                    (None, err) => println!(
                        "FAIL {} {}: {}",
                        e.case_id,
                        e.quantity,
                        err.as_deref().unwrap_or("no value")
                    ),
                }
            }
            println!(
                "{}: {} of {} entries passed",
                table,
                report.rows.len() - failures.len(),
                report.rows.len()
            );
            if let Some(dir) = &out {
                println!("wrote {}", dir.join("report.csv").display());
            }
            Ok(failures.is_empty())
        }
        Command::ListCases { table } => {
            for case in table_cases(&table)? {
                let quantities: Vec<String> = case
                    .references
                    .iter()
                    .map(|r| format!("{}={}", r.quantity, r.value))
                    .collect();
                println!("{:<28} {}", case.config.id, quantities.join(" "));
            }
            Ok(true)
        }
        Command::ShowCase { id } => {
            let case = TABLE_IDS
                .iter()
                .flat_map(|t| table_cases(t).expect("known table id"))
                .find(|c| c.config.id == id)
                .with_context(|| format!("no benchmark case `{id}`; see `rpt-iga list-cases`"))?;
            print!("{}", case.config.to_toml_string());
            Ok(true)
        }
    }
}
