use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    // let clap print help and version itself
    if let Err(e) = weierstrass_lab::cli::Cli::try_parse() {
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            e.exit();
        }
    }
    match weierstrass_lab::run(std::env::args_os()) {
        Ok(summary) => {
            if !summary.is_empty() {
                eprintln!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("wlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
