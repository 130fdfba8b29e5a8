//! `ifthen`: build, inspect, model and evaluate if-then commonsense atlases.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand};
use log::LevelFilter;

use commands::data::{IngestArgs, QueryArgs, SplitArgs, StatsArgs};
use commands::evaluate::{EvalBleuArgs, ExportHumanEvalArgs, OverlapArgs, PrecisionArgs};
use commands::model::{GenerateArgs, GradcheckArgs, TrainArgs};
use config::merge_config;
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "ifthen", version, about = "If-then commonsense atlas toolkit")]
struct Cli {
    /// TOML file of subcommand settings; flags on the command line take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log more (-v info, -vv debug); logs go to standard error
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize raw annotations, blank rare arguments and assign splits
    Ingest(IngestArgs),
    /// Triple, node and word counts per content type
    Stats(StatsArgs),
    /// Inferences recorded for one event
    Query(QueryArgs),
    /// Reassign train/dev/test labels by content-word bucketing
    Split(SplitArgs),
    /// Train an encoder-decoder model
    Train(TrainArgs),
    /// Ranked generations for the events of one split
    Generate(GenerateArgs),
    /// Average top-k BLEU-2 of a generation dump against gold annotations
    EvalBleu(EvalBleuArgs),
    /// Sample events into a judgment sheet for human raters
    ExportHumanEval(ExportHumanEvalArgs),
    /// Precision at 10 from a filled-in judgment sheet
    Precision(PrecisionArgs),
    /// Agreement of atlas triples with an external concept graph
    Overlap(OverlapArgs),
    /// Compare analytic and finite-difference gradients on a synthetic model
    Gradcheck(GradcheckArgs),
}

fn dispatch(cli: Cli, sub: &ArgMatches) -> CliResult<()> {
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Ingest(a) => commands::data::ingest(&merge_config(a, sub, cfg)?),
        Command::Stats(a) => commands::data::stats(&merge_config(a, sub, cfg)?),
        Command::Query(a) => commands::data::query(&merge_config(a, sub, cfg)?),
        Command::Split(a) => commands::data::split(&merge_config(a, sub, cfg)?),
        Command::Train(a) => commands::model::train(&merge_config(a, sub, cfg)?),
        Command::Generate(a) => commands::model::generate(&merge_config(a, sub, cfg)?),
        Command::EvalBleu(a) => commands::evaluate::eval_bleu(&merge_config(a, sub, cfg)?),
        Command::ExportHumanEval(a) => commands::evaluate::export_human_eval(&merge_config(a, sub, cfg)?),
        Command::Precision(a) => commands::evaluate::precision(&merge_config(a, sub, cfg)?),
        Command::Overlap(a) => commands::evaluate::overlap(&merge_config(a, sub, cfg)?),
        Command::Gradcheck(a) => commands::model::gradcheck(&merge_config(a, sub, cfg)?),
    }
}

fn run() -> u8 {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let (_, sub) = matches.subcommand().expect("a subcommand is required");
    let sub = sub.clone();
    match dispatch(cli, &sub) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run())
}
