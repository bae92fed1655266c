mod args;
mod config;
mod run;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};
use serde_json::json;

use args::Cli;

fn parse(argv: Vec<OsString>) -> Result<Cli, clap::Error> {
    let cmd = Cli::command();
    let loose = cmd.clone().ignore_errors(true).try_get_matches_from(&argv)?;
    let Some(path) = loose.get_one::<PathBuf>("config").cloned() else {
        return Cli::from_arg_matches(&cmd.try_get_matches_from(&argv)?);
    };
    let merged = config::merge(&cmd, &loose, &argv, &path)
        .map_err(|m| Cli::command().error(clap::error::ErrorKind::InvalidValue, m))?;
    Cli::from_arg_matches(&cmd.try_get_matches_from(merged)?)
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os().collect()) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let outcome = match run::execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut inputs = serde_json::to_value(&cli).unwrap_or_default();
    inputs["evaluated"] = outcome.parameters.into();
    let record = json!({
        "command": outcome.command,
        "inputs": inputs,
        "results": outcome.results,
        "provenance": {
            "version": env!("CARGO_PKG_VERSION"),
            "git_describe": env!("SHARPCOMM_GIT_DESCRIBE"),
            "resolution": cli.global.resolution,
            "tolerances": { "radial_rel": cli.global.tol },
            "seed": cli.global.seed,
        },
    });
    let text = serde_json::to_string_pretty(&record).expect("JSON values always serialize");
    match writeln!(std::io::stdout().lock(), "{text}") {
        Ok(()) => ExitCode::SUCCESS,
        Err(_) => ExitCode::FAILURE,
    }
}
