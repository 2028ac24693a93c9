mod args;
mod commands;
mod suites;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, VerifyArgs};

fn verify(a: &VerifyArgs) -> anyhow::Result<bool> {
    let overrides = verify::parse_overrides(&a.tolerances)?;
    let report = verify::run(a.suite, &overrides)?;
    let mut out = commands::open_out(a.common.out.as_deref())?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    out.flush()?;
    Ok(report.pass)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a)?,
        Command::Wavefunction(a) => commands::wavefunction(a)?,
        Command::Xpct(a) => commands::xpct(a)?,
        Command::Verify(a) => {
            if !verify(a)? {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let argv = match args::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return ExitCode::from(if help { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
