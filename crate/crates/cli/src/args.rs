use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use surething::rational;
use surething::Rational;

#[derive(Debug, Parser)]
#[command(name = "surething", version, about = "Check, fit and stress-test subjective expected-utility judgments")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a problem file against the postulates.
    Check(CheckArgs),
    /// Fit a probability, a utility or both to a problem's judgments.
    Fit(FitArgs),
    /// Test a price system for coherence and build a book if there is one.
    DutchBook(FileArg),
    /// Score lotteries by expected utility and decision weights.
    Score(FileArg),
    /// Walk through one of the bundled examples.
    Demo(DemoArgs),
    /// Elicit a probability through the buy-or-sell price game.
    Elicit(ElicitArgs),
    /// Serve the elicitation API over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct FileArg {
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Only run these checks (repeatable), e.g. `--axiom P2`.
    #[arg(long = "axiom")]
    pub axioms: Vec<String>,
    /// Largest event mass treated as small by the continuity audit.
    #[arg(long, value_parser = parse_rational)]
    pub threshold: Option<Rational>,
    #[arg(long, default_value_t = 256)]
    pub max_witnesses: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMode {
    /// Utility if the file carries a probability, else probability from
    /// monetary values, else both.
    Auto,
    Probability,
    Utility,
    Joint,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = FitMode::Auto)]
    pub mode: FitMode,
    /// Joint fitting refuses problems with more than this many
    /// state-consequence pairs.
    #[arg(long, default_value_t = 64)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Allais,
    Ellsberg,
    Ryder,
    Laplace,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub which: DemoName,
}

#[derive(Debug, Args)]
pub struct ElicitArgs {
    /// The event being priced.
    #[arg(long, default_value = "the event happens")]
    pub event: String,
    /// Stop once the interval is at most this wide.
    #[arg(long, default_value = "1/1024", value_parser = parse_rational)]
    pub width: Rational,
    /// What the ticket pays.
    #[arg(long, default_value = "100", value_parser = parse_rational)]
    pub payoff: Rational,
    /// Answer automatically as someone whose probability is this value.
    #[arg(long, value_parser = parse_rational)]
    pub respond_as: Option<Rational>,
    /// Give up after this many answers.
    #[arg(long, default_value_t = 64)]
    pub max_answers: usize,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}
