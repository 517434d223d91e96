//! `cftp`: perfect sampling of proper colorings from the command line.

mod bench;
mod output;
mod source;
mod tables;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cftp_core::error::EngineError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_NO_COALESCENCE: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "cftp", version, about = "Perfect sampler for uniform proper q-colorings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw exact samples of a uniform proper coloring.
    Sample(SampleArgs),
    /// Run the statistical self-checks or the LP grid check.
    Verify(VerifyArgs),
    /// Sweep (n, Δ, q) and record blocks, updates and wall time.
    Bench(BenchArgs),
    /// Compute and audit the seed-vertex partition of a graph.
    Partition(PartitionArgs),
    /// Tabulate the lower bound of the triangle configuration.
    Lowerbound(LowerboundArgs),
    /// Tabulate the size laws of the seeding coupling.
    Lp(LpArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; `-` or absent means stdout unless an output directory is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for output files named after the command and seed.
    #[arg(long, env = "CFTP_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct GraphArgs {
    /// Generator: k4, bipartite:D, regular:n,d or worstcase:delta,q,copies.
    #[arg(long = "gen")]
    pub generator: Option<String>,
    /// Edge-list file: a header line `n m`, then one `u v` pair per line.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    q: usize,
    /// Number of samples.
    #[arg(long, default_value_t = 1)]
    n: u64,
    /// Master seed; drawn from OS entropy when absent and echoed in the output.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 64)]
    max_blocks: u64,
    /// Allow q below the coalescence threshold.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Check the LP grid instead of the statistical suites.
    #[arg(long)]
    pub lp: bool,
    /// Δ range for the LP grid, e.g. `3..16` (inclusive).
    #[arg(long, default_value = "3..16")]
    pub delta: String,
    /// Draw permutations with a biased shuffle; the suites must then fail.
    #[arg(long)]
    pub inject_fault: bool,
    /// Draws per statistical check.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated Δ values.
    #[arg(long, default_value = "8")]
    pub delta: String,
    /// Comma-separated vertex counts.
    #[arg(long, default_value = "100,200,400,800,1600")]
    pub n: String,
    /// Comma-separated palettes: integers, `auto` for ceil((2.5+η)Δ)+1, or a
    /// multiple of Δ such as `2d` or `2.5d`.
    #[arg(long, default_value = "auto")]
    pub q: String,
    /// Independent runs per (Δ, n, q).
    #[arg(long, default_value_t = 10)]
    pub reps: u64,
    #[arg(long, default_value_t = 16)]
    pub max_blocks: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct LowerboundArgs {
    /// Even Δ range, e.g. `4..20` (inclusive).
    #[arg(long, default_value = "4..20")]
    pub delta: String,
    /// Also estimate E|L| of each coupling on the worst-case configuration.
    #[arg(long)]
    pub audit: bool,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct LpArgs {
    /// Δ range, e.g. `3..16` (inclusive).
    #[arg(long, default_value = "3..16")]
    pub delta: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// An error with the exit code it should produce.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl Exit {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(exit) = err.downcast_ref::<Exit>() {
        return exit.code;
    }
    match err.downcast_ref::<EngineError>() {
        Some(EngineError::NoCoalescence { .. }) => EXIT_NO_COALESCENCE,
        Some(EngineError::BelowThreshold { .. } | EngineError::InvalidConfig(_)) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Use the given seed or draw one from OS entropy, and echo it on stderr.
pub fn resolve_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    eprintln!("master seed: {seed}");
    seed
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Verify(args) => verify::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Partition(args) => tables::partition(args),
        Command::Lowerbound(args) => tables::lowerbound(args),
        Command::Lp(args) => tables::lp(args),
    }
}

fn cmd_sample(args: SampleArgs) -> anyhow::Result<u8> {
    use cftp_core::{Sampler, SamplerConfig, SeedStream};
    use serde_json::json;

    let source = source::load(&args.graph)?;
    let seed = resolve_seed(args.seed);
    let g = &source.graph;
    let config = SamplerConfig::new(args.q, seed)
        .with_max_blocks(args.max_blocks)
        .with_force(args.force);
    // Validate once up front so a bad palette is a usage error.
    Sampler::new(g, config.clone())?;
    let root = SeedStream::new(seed);
    let mut rows = Vec::new();
    for i in 0..args.n {
        let child = if args.n == 1 { seed } else { root.fork(i).master_seed() };
        let run_config = SamplerConfig { master_seed: child, ..config.clone() };
        let out = Sampler::new(g, run_config)?.sample()?;
        rows.push((i, child, out));
    }
    let meta = output::Meta::new(
        "sample",
        seed,
        json!({
            "graph": source.describe(),
            "q": args.q,
            "samples": args.n,
            "sampler": config,
        }),
    );
    let text = match args.output.format {
        Format::Json => {
            let samples: Vec<_> = rows
                .iter()
                .map(|(i, child, out)| json!({"index": i, "seed": child, "coloring": out.coloring, "stats": out.stats}))
                .collect();
            output::json_document(&meta, json!({ "samples": samples }))
        }
        Format::Csv => {
            let mut csv = output::csv_header(&meta, "index,seed,blocks_used,updates,aborted_blocks,wall_ms,coloring");
            for (i, child, out) in &rows {
                let coloring: Vec<String> = out.coloring.iter().map(|c| c.to_string()).collect();
                csv.push_str(&format!(
                    "{i},{child},{},{},{},{:.3},{}\n",
                    out.stats.blocks_used,
                    out.stats.updates,
                    out.stats.aborted_blocks,
                    out.stats.wall_ms,
                    coloring.join(" ")
                ));
            }
            csv
        }
    };
    output::emit(&args.output, "sample", seed, &text)?;
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(EngineError::BelowThreshold { .. }) = e.downcast_ref::<EngineError>() {
                eprintln!("pass --force to sample below the threshold anyway");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
