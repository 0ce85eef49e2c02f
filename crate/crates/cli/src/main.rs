mod args;
mod commands;
mod error;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use partial_copula::gauss_rule;

use args::{Cli, Command, VerifyArgs};
use error::CliError;
use output::{emit, render};

fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let rule = gauss_rule(args.order as usize);
    let n = args.n as usize;
    let checks = verify::run(&rule, n, args.seed)?;
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.pass()).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if args.output.out.is_some() {
        let content = render(
            args.output.format,
            || verify::table(&checks),
            || verify::json(&checks, rule.order(), n, args.seed),
        );
        emit(&args.output, &content)?;
    }
    if failed > 0 {
        return Err(CliError::Failure(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Measure(a) => commands::measure(a),
        Command::Partial(a) => commands::partial(a),
        Command::Grid(a) => commands::grid(a),
        Command::Sample(a) => commands::sample(a),
        Command::Estimate(a) => commands::estimate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pcopula: {e}");
            e.exit_code()
        }
    }
}
