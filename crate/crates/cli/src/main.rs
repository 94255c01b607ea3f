use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = linkform::Cli::parse();
    match linkform::run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("linkform: {e}");
            e.into()
        }
    }
}
