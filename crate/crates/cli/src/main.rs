use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use lipext_cli::{exit_code, run, Cli, Outcome};

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();
    let dir = match std::env::current_dir() {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: cannot read the working directory: {e}");
            return ExitCode::from(2);
        }
    };
    let result = run(&cli, &dir);
    match &result {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let text = outcome.text();
            let _ = if text.ends_with('\n') { write!(stdout, "{text}") } else { writeln!(stdout, "{text}") };
            if let Outcome::Run(r) = outcome {
                for row in r.failed_rows() {
                    eprintln!("FAIL {}: computed {} vs claimed {}", row.name, row.computed, row.claimed);
                }
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    eprintln!("wall_time: {:.3}s", start.elapsed().as_secs_f64());
    ExitCode::from(exit_code(&result) as u8)
}
