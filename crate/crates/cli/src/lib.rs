//! Command-line front end for the `totnet` lesion-study library.

pub mod commands;
pub mod csvio;
pub mod error;
pub mod manifest;
pub mod settings;
pub mod svg;

use std::io::Write;

pub use commands::{Cli, Command};
pub use error::{CliError, CliResult};

/// Runs one parsed invocation, writing human-facing output to `out`.
pub fn run(cli: &Cli, out: &mut impl Write) -> CliResult<()> {
    let io = |e| CliError::io(std::path::Path::new("<stdout>"), e);
    match &cli.command {
        Command::Curve(args) => {
            let res = commands::cmd_curve(args)?;
            if args.out.is_none() {
                out.write_all(res.csv.as_bytes()).map_err(io)?;
            }
        }
        Command::Survey(args) => {
            let res = commands::cmd_survey(args)?;
            let text = serde_json::to_string_pretty(&res.summary)
                .map_err(|e| CliError::Data(e.to_string()))?;
            writeln!(out, "{text}").map_err(io)?;
        }
        Command::Classify(args) => {
            let res = commands::cmd_classify(args)?;
            out.write_all(res.csv.as_bytes()).map_err(io)?;
            let c = &res.classification;
            writeln!(out, "# target {} ({})", c.target_pfr, c.target_pfr_float).map_err(io)?;
            writeln!(
                out,
                "# TOT frequency {:.6} ± {:.6} %; {}",
                c.tot_frequency.mean_pct, c.tot_frequency.std_pct, c.ratio_text
            )
            .map_err(io)?;
            writeln!(out, "# {}", c.note).map_err(io)?;
        }
        Command::Conventions(args) => {
            let res = commands::cmd_conventions(args)?;
            out.write_all(res.table.as_bytes()).map_err(io)?;
            writeln!(out, "# {}", res.statement).map_err(io)?;
        }
        Command::Report(args) => {
            let res = commands::cmd_report(args)?;
            for (name, svg) in [("curves.svg", &res.curves_svg), ("histogram.svg", &res.histogram_svg)] {
                if svg.is_some() {
                    writeln!(out, "{}", args.out_dir.join(name).display()).map_err(io)?;
                }
            }
        }
    }
    Ok(())
}
