//! `loggamma compute|simulate|verify`.
//!
//! Exit codes: 0 success or passing check, 1 failing check or consistency
//! error, 2 usage or domain error, 3 solver non-convergence.

mod args;
mod compute;
mod output;
mod simulate;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use loggamma::Error;

use args::{Cli, Command};
use output::Sink;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Usage(_) | Error::Domain(_) => 2,
        Error::Numeric { .. } => 3,
        Error::Consistency { .. } => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = match &cli.command {
        Command::Compute { flags, .. } | Command::Simulate { flags, .. } | Command::Verify { flags, .. } => flags,
    };
    let mut sink = Sink::new(flags.format);
    let outcome = match &cli.command {
        Command::Compute { op, .. } => compute::run(*op, flags, &mut sink).map(|_| true),
        Command::Simulate { op, .. } => simulate::run(*op, flags, &mut sink).map(|_| true),
        Command::Verify { op, .. } => verify::run(*op, flags, &mut sink),
    };
    let outcome = outcome.and_then(|pass| sink.finish(flags.out.as_deref()).map(|_| pass));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Usage("x".into())), 2);
        assert_eq!(exit_code(&Error::Domain("x".into())), 2);
        assert_eq!(exit_code(&Error::Numeric { what: "x".into(), residual: 1.0, iterations: 3 }), 3);
        assert_eq!(exit_code(&Error::Consistency { what: "x".into(), discrepancy: 1.0 }), 1);
    }
}
