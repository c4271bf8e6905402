mod args;
mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Common, Threads};
use commands::{CmdResult, Failure, VerifyRequest};
use render::Render;

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::FieldInfo { common }
        | Command::Census { common, .. }
        | Command::Verify { common, .. }
        | Command::Srg { common, .. }
        | Command::GraphBuild { common, .. } => common,
    }
}

/// Runs the command and returns its rendered output plus whether it counts
/// as a verification failure.
fn run(cmd: &Command) -> CmdResult<(String, bool)> {
    let output = common(cmd).output;
    Ok(match cmd {
        Command::FieldInfo { common } => (commands::field_info(common)?.render(output), false),
        Command::Census {
            common,
            n,
            rank,
            method,
        } => (
            commands::census(common, *n, *rank, *method)?.render(output),
            false,
        ),
        Command::Verify {
            common,
            n,
            check,
            samples,
            matrix_a,
            matrix_b,
            perturb_formula,
        } => {
            let req = VerifyRequest {
                n: *n,
                check: *check,
                samples: *samples,
                matrix_a: matrix_a.as_deref(),
                matrix_b: matrix_b.as_deref(),
                perturb_formula: *perturb_formula,
            };
            let summary = commands::verify(common, &req)?;
            for c in summary.checks.iter().filter(|c| !c.passed) {
                eprintln!(
                    "check {} failed: expected {}, observed {}",
                    c.check, c.expected, c.observed
                );
            }
            (summary.render(output), !summary.passed)
        }
        Command::Srg { common, n } => (commands::srg(common, *n)?.render(output), false),
        Command::GraphBuild { common, n } => {
            let report = commands::graph_build(common, *n)?;
            let failed = !report.agrees;
            (report.render(output), failed)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Threads::Fixed(t) = common(&cli.command).threads {
        pool = pool.num_threads(t);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| run(&cli.command)),
        Err(e) => Err(Failure::Usage(format!("cannot start worker threads: {e}"))),
    };
    match result {
        Ok((text, failed)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::from(if failed { 1 } else { 0 })
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
