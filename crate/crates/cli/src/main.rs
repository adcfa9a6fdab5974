mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use locnoise::Execution;

use args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = match &cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Distort(a) => commands::distort(a, exec),
        Command::EvalAp(a) => commands::eval_ap(a, exec),
        Command::EvalRings(a) => commands::eval_rings(a, exec),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("locnoise: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
