mod args;
mod commands;

use clap::Parser;

use args::Cli;
use commands::{render, run, Config};

fn main() {
    let cli = Cli::parse();
    let result = Config::from_common(&cli.common).and_then(|cfg| {
        let verdict = run(&cli.command, &cfg)?;
        Ok((verdict, cfg.format))
    });
    match result {
        Ok((verdict, format)) => {
            println!("{}", render(&verdict.output, format));
            if !verdict.passed {
                std::process::exit(1);
            }
        }
        Err(e) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&e.payload()).expect("json")
            );
            std::process::exit(e.exit_code());
        }
    }
}
