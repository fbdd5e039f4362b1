//! Command-line front end and HTTP API over the `surething` engine.

pub mod api;
pub mod args;
pub mod commands;
pub mod corpus;
pub mod demo;
pub mod output;

pub use args::{Cli, Command, Format};
pub use output::Output;

/// Exit code for malformed input or a failed command.
pub const EXIT_INPUT: i32 = 2;

/// Runs one parsed invocation. `serve` and interactive `elicit` are driven
/// from `main`; everything else lands here.
pub fn run(cli: &Cli) -> anyhow::Result<Output> {
    match &cli.command {
        Command::Check(a) => commands::check(a),
        Command::Fit(a) => commands::fit(a),
        Command::DutchBook(a) => commands::dutch_book(&a.file),
        Command::Score(a) => commands::score(&a.file),
        Command::Demo(a) => demo::run(a.which),
        Command::Elicit(a) => commands::elicit_scripted(a),
        Command::Serve(_) => anyhow::bail!("`serve` runs a server and has no report"),
    }
}
