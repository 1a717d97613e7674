use std::process::ExitCode;

use clap::Parser;

use gmi_cli::{render, run, Cli, CliError};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let result = run(&cli).and_then(|rec| {
        let text = render(&cli, &rec, &args);
        match &cli.output {
            Some(path) => std::fs::write(path, text).map_err(CliError::Io),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gmi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
