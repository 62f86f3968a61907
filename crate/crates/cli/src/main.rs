mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use commands::{Context, Output};

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = Context {
        argv: std::env::args().skip(1).collect(),
        tol: cli.tol,
        budget: cli.budget,
        oracle: cli.oracle,
    };
    let outcome = match &cli.command {
        Command::Validate(a) => commands::validate(&ctx, a),
        Command::Gen(a) => commands::gen(a),
        Command::Unravel(a) => commands::unravel_cmd(&ctx, a),
        Command::Chain(a) => commands::chain_cmd(&ctx, a),
        Command::Bound(a) => commands::bound_cmd(&ctx, a),
        Command::Certify(a) => commands::certify_cmd(&ctx, a),
        Command::Constants => commands::constants(&ctx),
        Command::PlotG(a) => commands::plot_g(a),
    };
    let code = match outcome {
        Ok(Output::Text(text)) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            0
        }
        Ok(Output::Report(rep)) => {
            let _ = std::io::stdout().write_all(rep.render(cli.json).as_bytes());
            if rep.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.0);
            2
        }
    };
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
