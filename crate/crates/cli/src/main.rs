use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand};
use nonterm::report::{
    cmd_detect, cmd_rewrite, cmd_witness, AnalysisOptions, CommandOutput, Exit, ModeSelection,
};
use nonterm::{Mode, SizeGuard};

/// Recurrent-pair non-termination analysis for root-rewriting programs.
#[derive(Parser)]
#[command(name = "nonterm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find recurrent pairs and replay a prefix of each binary chain.
    Detect {
        file: PathBuf,
        #[arg(long, default_value = "both")]
        mode: ModeSelection,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = nonterm::report::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = SizeGuard::DEFAULT_MAX_TERM_SIZE)]
        max_term_size: usize,
    },
    /// Replay the chain of one ordered rule pair (0-based indices).
    Witness {
        file: PathBuf,
        #[arg(long, value_parser = parse_pair)]
        pair: (usize, usize),
        #[arg(long, default_value = "both")]
        mode: ModeSelection,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = nonterm::report::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = SizeGuard::DEFAULT_MAX_TERM_SIZE)]
        max_term_size: usize,
    },
    /// Rewrite a term at the root, listing every step.
    Rewrite {
        file: PathBuf,
        #[arg(long)]
        term: String,
        /// Only use this rule (0-based); default is the first applicable rule.
        #[arg(long)]
        rule: Option<usize>,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Defaults to the file's `(MODE ...)` header, then to trs.
        #[arg(long)]
        mode: Option<Mode>,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected I,J")?;
    let index = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad index `{v}`: {e}"))
    };
    Ok((index(a)?, index(b)?))
}

fn read(path: &Path) -> Result<String, CommandOutput> {
    std::fs::read_to_string(path).map_err(|e| CommandOutput {
        stdout: String::new(),
        stderr: format!("error: cannot read {}: {e}\n", path.display()),
        exit: Exit::InputError,
    })
}

fn run(cli: Cli) -> CommandOutput {
    match cli.command {
        Command::Detect {
            file,
            mode,
            json,
            steps,
            max_term_size,
        } => {
            let opts = AnalysisOptions {
                modes: mode,
                steps,
                guard: SizeGuard::new(max_term_size),
            };
            read(&file).map_or_else(|e| e, |text| cmd_detect(&text, &opts, json))
        }
        Command::Witness {
            file,
            pair,
            mode,
            json,
            steps,
            max_term_size,
        } => {
            let opts = AnalysisOptions {
                modes: mode,
                steps,
                guard: SizeGuard::new(max_term_size),
            };
            read(&file).map_or_else(|e| e, |text| cmd_witness(&text, pair, &opts, json))
        }
        Command::Rewrite {
            file,
            term,
            rule,
            steps,
            mode,
        } => read(&file).map_or_else(|e| e, |text| cmd_rewrite(&text, &term, rule, steps, mode)),
    }
}

// Witness terms near the size guard are deeply nested and the term code
// recurses on depth.
const WORKER_STACK: usize = 1 << 30;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Exit::InputError.code() as u8
            } else {
                0
            });
        }
    };
    let out = thread::Builder::new()
        .stack_size(WORKER_STACK)
        .spawn(move || run(cli))
        .expect("spawn worker thread")
        .join()
        .expect("worker thread panicked");
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.exit.code() as u8)
}
