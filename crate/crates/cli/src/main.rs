#![allow(clippy::neg_cmp_op_on_partial_ord)]
mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use resolab::{with_tolerances, Tolerances};

use crate::args::Cli;
use crate::output::{failure_code, Sink};

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let sink = Sink::new(cli.out.clone(), cli.format);
    let scale = cli.tol_scale.unwrap_or(1.0);
    log::debug!("tolerance scale {scale}");
    let result = with_tolerances(Tolerances::DOUBLE.scaled(scale), || commands::run(&cli.command, &sink));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let code = failure_code(&err);
            eprintln!("error: {err:#}");
            if let Err(io) = sink.error(&err, code) {
                eprintln!("error: could not write error.json: {io:#}");
            }
            ExitCode::from(code)
        }
    }
}
