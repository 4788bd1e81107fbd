//! Command-line interface: `generate`, `evaluate`, `baseline` and `inspect`.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::datapipeline::{
    align_candidates, build_run_input, generate_dataset, make_baseline, read_candidates,
    write_candidates, Bot, Dataset, DatasetError, DatasetSpec, Split,
};
use crate::metrics::evaluate_run;
use crate::semantics::evaluate_caption;
use crate::worldmodel::Task;

#[derive(Debug, Parser)]
#[command(
    name = "gtd",
    version,
    about = "Caption grammaticality, truthfulness and diversity toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset variant
    Generate {
        #[arg(long, value_parser = parse_task)]
        task: Task,
        #[arg(long, default_value_t = 200_000, value_parser = count)]
        train: usize,
        #[arg(long, default_value_t = 4096, value_parser = count)]
        val: usize,
        #[arg(long, default_value_t = 4096, value_parser = count)]
        test: usize,
        #[arg(long, default_value_t = 10, value_parser = count)]
        refs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a candidate file against a dataset's test split
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a candidate file from a degenerate caption bot
    Baseline {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_parser = parse_bot)]
        bot: Bot,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print one instance with per-caption verdicts
    Inspect {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        id: String,
    },
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse()
}

fn parse_bot(s: &str) -> Result<Bot, String> {
    s.parse()
}

fn count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::BotTaskMismatch { .. } | DatasetError::InvalidSpec(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

/// Runs a parsed command, writing human-readable output to `stdout`.
pub fn run(cli: Cli, stdout: &mut impl Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Runtime(e.to_string());
    match cli.command {
        Command::Generate {
            task,
            train,
            val,
            test,
            refs,
            seed,
            out,
        } => {
            let spec = DatasetSpec {
                n_train: train,
                n_val: val,
                n_test: test,
                n_refs: refs,
                master_seed: seed,
                ..DatasetSpec::new(task)
            };
            let meta = generate_dataset(&spec, &out)?;
            writeln!(
                stdout,
                "generated {} into {}: train={} val={} test={} refs={} seed={} grammar={}",
                meta.task,
                out.display(),
                meta.n_train,
                meta.n_val,
                meta.n_test,
                meta.n_refs,
                meta.master_seed,
                &meta.grammar_version[..12]
            )
            .map_err(io)?;
        }
        Command::Evaluate {
            dataset,
            candidates,
            out,
        } => {
            let dataset = Dataset::open(&dataset)?;
            let ids: Vec<String> = (0..dataset.len(Split::Test))
                .map(|i| Split::Test.instance_id(i))
                .collect();
            let candidates = align_candidates(read_candidates(&candidates)?, &ids)?;
            let run = build_run_input(&dataset, &candidates)?;
            let report = evaluate_run(&run).map_err(DatasetError::from)?;
            let mut json = report.to_json();
            json.push('\n');
            fs::write(&out, json)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", out.display())))?;
            writeln!(stdout, "{}", report.summary_line()).map_err(io)?;
        }
        Command::Baseline { dataset, bot, out } => {
            let dataset = Dataset::open(&dataset)?;
            let candidates = make_baseline(&dataset, bot)?;
            write_candidates(&out, &candidates)?;
            writeln!(
                stdout,
                "wrote {} {} captions to {}",
                candidates.len(),
                bot,
                out.display()
            )
            .map_err(io)?;
        }
        Command::Inspect { dataset, id } => {
            let dataset = Dataset::open(&dataset)?;
            let inst = dataset.instance(&id)?;
            writeln!(stdout, "{}", inst.world.to_json_line()).map_err(io)?;
            writeln!(stdout, "image\t{}", inst.image.display()).map_err(io)?;
            for caption in &inst.captions {
                writeln!(
                    stdout,
                    "{}\t{}",
                    evaluate_caption(caption, &inst.world),
                    caption
                )
                .map_err(io)?;
            }
        }
    }
    Ok(())
}
