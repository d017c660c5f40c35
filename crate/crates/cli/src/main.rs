use std::process::ExitCode;

use clap::Parser;
use intertopo_cli::{run, Args, RunConfig};

fn main() -> ExitCode {
    let result = RunConfig::from_args(Args::parse()).and_then(|cfg| run(&cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("intertopo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
