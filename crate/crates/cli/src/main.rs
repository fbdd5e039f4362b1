use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use surething_cli::{api, commands, run, Cli, Command, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Serve(a) => {
            let rt = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INPUT as u8);
                }
            };
            return match rt.block_on(api::serve(&a.host, a.port)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(EXIT_INPUT as u8)
                }
            };
        }
        Command::Elicit(a) if a.respond_as.is_none() => {
            let stdin = io::stdin();
            commands::elicit_interactive(a, stdin.lock(), io::stdout())
        }
        _ => run(&cli),
    };
    match result {
        Ok(out) => {
            let mut stdout = io::stdout();
            let _ = stdout.write_all(out.render(cli.format).as_bytes());
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
