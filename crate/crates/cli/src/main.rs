//! `cvtradeoff`: batch front-end emitting CSV or JSON tables.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use config::ConfigFile;
use error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvtradeoff: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let command = match cli.command {
        Some(c) => c,
        None => {
            let name = cfg
                .get("command")
                .ok_or_else(|| CliError::Usage("no subcommand given and no `command` in config".into()))?;
            Command::empty(name).ok_or_else(|| CliError::Usage(format!("unknown command `{name}` in config")))?
        }
    };
    let out = cfg.merge(cli.out, "out")?;
    let format = match cfg.merge::<Format>(cli.format, "format")? {
        Some(f) => f,
        None => match out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        },
    };

    let job = commands::resolve(&command, &cfg)?;
    let text = commands::run(&job)?.render(format);
    match out {
        Some(path) => {
            std::fs::write(&path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Contract(format!("cannot write output: {e}")))?,
    }
    Ok(())
}
