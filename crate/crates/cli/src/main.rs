mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use parabolic_lp::error::PlpError;

use args::{Cli, Command};

const EXIT_ASSERTION: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_DATA: u8 = 4;

fn exit_code(e: &PlpError) -> u8 {
    match e {
        PlpError::Data(_) | PlpError::Io(_) | PlpError::Json(_) => EXIT_DATA,
        PlpError::Structural(_) | PlpError::Config(_) | PlpError::Precondition(_) | PlpError::Hypothesis(_) => {
            EXIT_CONFIG
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let g = &cli.global;
    let result = match &cli.command {
        Command::Norm(a) => commands::norm(a, g),
        Command::Decompose(a) => commands::decompose(a, g),
        Command::Extend(a) => commands::extend(a, g),
        Command::Verify(a) => commands::verify(a, g),
        Command::Sweep(a) => commands::sweep(a, g),
    };
    let outcome = result.and_then(|o| {
        let out = match cli.command {
            Command::Decompose(_) | Command::Extend(_) => None,
            _ => commands::report_path(g),
        };
        commands::emit(&o.body, out.as_deref())?;
        Ok(o.passed)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERTION),
        Err(e) => {
            eprintln!("plp: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
