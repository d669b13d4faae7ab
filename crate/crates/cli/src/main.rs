//! `hypersteiner`: solve, verify, generate and compare Steiner tree relaxations.
//!
//! Exit status is 0 on success, 1 when an asserted invariant fails and 2 on
//! usage, input or cap errors.

mod commands;
mod config;
mod corpus;

use std::process::ExitCode;

use clap::Parser;
use hypersteiner::Error;

use crate::commands::Outcome;
use crate::config::{Cli, Command};

fn exit_status(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Invariant(_)
            | Error::VerificationFailed(_)
            | Error::Infeasible
            | Error::Unbounded
            | Error::IrrationalCoefficient,
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Verify(args) => commands::verify(args),
        Command::Heuristic(args) => commands::heuristic(args),
        Command::Gen(args) => commands::gen(args),
        Command::Gap(args) => commands::gap(args),
    };
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_status(&err))
        }
    }
}
