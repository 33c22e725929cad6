//! `sslsq`: dataset generation, fitting, diagnostics and experiment runs.
//!
//! Exit status: 0 success, 1 other failure, 2 usage, 3 parse, 4 capacity,
//! 5 numerical, 6 i/o, 7 invalid input.

mod args;
mod commands;
mod report;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let run = || match &cli.command {
        Command::Generate(a) => commands::generate_cmd(a),
        Command::Fit(a) => commands::fit_cmd(a),
        Command::Diagnose(a) => commands::diagnose_cmd(a),
        Command::Basin(a) => commands::basin_cmd(a),
        Command::LocalOptima(a) => commands::local_optima_cmd(a),
        Command::LearningCurve(a) => commands::learning_curve_cmd(a),
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: cannot start {n} threads: {e}");
                std::process::exit(1);
            }
        },
        None => run(),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
