mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use riskdex_core::ErrorClass;

use crate::args::Cli;
use crate::commands::ValidationFailed;

const EXIT_DOMAIN: u8 = 1;
const EXIT_ENVIRONMENT: u8 = 2;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ValidationFailed>().is_some() {
        return EXIT_DOMAIN;
    }
    if let Some(e) = err.downcast_ref::<riskdex_core::Error>() {
        return match e.class() {
            ErrorClass::Domain => EXIT_DOMAIN,
            ErrorClass::Environment => EXIT_ENVIRONMENT,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_ENVIRONMENT;
    }
    EXIT_DOMAIN
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                // Usage errors (unknown PS id, bad flag values) are domain failures.
                _ => ExitCode::from(EXIT_DOMAIN),
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
