use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sc_core::cli::{parse_box_flag, parse_grid_flag, run_check, CheckOptions, Input, EXIT_ERROR};
use sc_core::engine::{EngineConfig, DEFAULT_DNF_CAP, DEFAULT_SAMPLES};
use sc_core::model::FiniteGrid;

#[derive(Parser)]
#[command(name = "sccheck", version, about = "Check refinement obligations between structural contracts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check the refinement obligations declared in the given files (`-` for stdin).
    Check {
        #[arg(required = true)]
        files: Vec<String>,
        /// Check only this obligation; repeatable.
        #[arg(long = "obligation", value_name = "NAME")]
        obligations: Vec<String>,
        /// Finite grid for the oracle, e.g. "r=0,1/2,1;u=0..3".
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_DNF_CAP)]
        dnf_cap: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Variable ranges, e.g. "x=[-1,1];y=[0,10]".
        #[arg(long = "box")]
        box_: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Zero all timings.
        #[arg(long)]
        deterministic: bool,
        /// Cross-check against the finite semantics on the grid.
        #[arg(long)]
        oracle: bool,
    },
}

fn read_input(path: &str) -> Result<Input, String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| format!("<stdin>: {e}"))?;
        return Ok(Input { name: "<stdin>".into(), text });
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    Ok(Input { name: path.to_string(), text })
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("sccheck: {msg}");
    ExitCode::from(EXIT_ERROR as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_ERROR as u8) } else { ExitCode::SUCCESS };
        }
    };
    let Command::Check { files, obligations, grid, dnf_cap, samples, seed, box_, format, deterministic, oracle } =
        cli.command;
    let grid = match grid.as_deref().map(parse_grid_flag).transpose() {
        Ok(g) => g.unwrap_or_else(FiniteGrid::new),
        Err(e) => return fail(&format!("--grid: {e}")),
    };
    let declared_box = match box_.as_deref().map(parse_box_flag).transpose() {
        Ok(b) => b.unwrap_or_default(),
        Err(e) => return fail(&format!("--box: {e}")),
    };
    let mut inputs = Vec::new();
    for f in &files {
        match read_input(f) {
            Ok(i) => inputs.push(i),
            Err(e) => return fail(&e),
        }
    }
    let opts = CheckOptions {
        obligations,
        grid,
        engine: EngineConfig { dnf_cap, samples, seed, declared_box, ..EngineConfig::default() },
        deterministic,
        oracle,
    };
    let report = run_check(&inputs, &opts);
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
    ExitCode::from(report.exit_code as u8)
}
