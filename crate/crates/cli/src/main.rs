//! `pinchsum`: tabulate arithmetic functions, decompose single tuples, run
//! parameter grids and the divisor-count checks.
//!
//! Exit codes: 0 success, 1 other failure, 2 unparsable input, 3 argument
//! past a table horizon, 4 hypothesis violated, 5 empty grid.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pinchsum_core::pinch::theorem0_decompose;
use pinchsum_core::verify::{
    divisor_count_checks, evaluate, run_grid, write_grid_csv, GridRow, Operands,
};
use pinchsum_core::{
    Builtin, Error, FunctionSpec, GridConfig, Identity, ParameterTuple, Scalar, SieveFunction,
};

#[derive(Parser)]
#[command(name = "pinchsum", version, about = "Exact short-correlation decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print f(1), …, f(N) as exact rationals.
    Tabulate {
        /// Function spec: inline JSON, a path to a JSON file, or a builtin name.
        #[arg(long)]
        f: String,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Added to every random seed in `--f`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decompose one identity at one tuple.
    Verify {
        #[arg(long)]
        identity: Identity,
        #[arg(long)]
        f: String,
        /// `g` itself; a sieve spec for every identity except theorem0.
        #[arg(long)]
        g: String,
        #[arg(long)]
        x: Option<u64>,
        #[arg(long)]
        h: u64,
        #[arg(long = "H")]
        shifts: u64,
        #[arg(long = "Q")]
        range: Option<u64>,
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Surrogate constant in `Q ≤ c·x`.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a grid config. CSV output gets a `.summary.json` sidecar next to it.
    Grid {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config epsilon.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Direct counts against divisor-sum bounds for the exceptional moduli.
    Checks {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        h: u64,
        #[arg(long = "H")]
        shifts: u64,
        #[arg(long = "Q")]
        range: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Parse(_)) => 2,
        Some(Error::Horizon { .. }) => 3,
        Some(Error::Hypothesis(_)) => 4,
        Some(Error::EmptyGrid) => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Tabulate { f, n, format, out, seed } => tabulate(&f, n, format, out.as_deref(), seed),
        Command::Verify { identity, f, g, x, h, shifts, range, n, epsilon, c, format, out, seed } => {
            let tuple = ParameterTuple { x, h, shifts, range, n };
            verify(identity, &f, &g, tuple, epsilon, c, format, out.as_deref(), seed)
        }
        Command::Grid { config, format, out, seed, epsilon } => grid(&config, format, out.as_deref(), seed, epsilon),
        Command::Checks { x, h, shifts, range, format, out } => checks(x, h, shifts, range, format, out.as_deref()),
    }
}

/// Inline JSON, then a builtin name, then a file path.
fn load_spec(arg: &str, seed: u64) -> Result<FunctionSpec> {
    let text = arg.trim();
    let spec = if text.starts_with('{') {
        FunctionSpec::from_json(text)?
    } else if let Some(b) = Builtin::from_name(text) {
        FunctionSpec::builtin(b)
    } else {
        let body = std::fs::read_to_string(text)
            .map_err(|e| Error::Parse(format!("{text:?} is neither a spec, a builtin nor a readable file: {e}")))?;
        FunctionSpec::from_json(&body).with_context(|| format!("in {text}"))?
    };
    Ok(spec.with_seed_offset(seed))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TableRow {
    n: u64,
    value: String,
}

#[derive(Serialize)]
struct JsonTableRow<'a> {
    n: u64,
    value: &'a Scalar,
}

fn tabulate(f: &str, n_max: u64, format: Format, out: Option<&Path>, seed: u64) -> Result<()> {
    let spec = load_spec(f, seed)?;
    let table = spec.tabulate(n_max)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(output(out)?);
            for (i, v) in table.values().iter().enumerate() {
                w.serialize(TableRow { n: i as u64 + 1, value: v.to_string() })?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<_> = table
                .values()
                .iter()
                .enumerate()
                .map(|(i, value)| JsonTableRow { n: i as u64 + 1, value })
                .collect();
            write_json(&rows, out)?;
        }
    }
    Ok(())
}

/// `g` as a sieve function: a sieve spec, or the constant `one`.
fn sieve_of(spec: &FunctionSpec) -> Option<Result<SieveFunction, Error>> {
    match spec {
        FunctionSpec::Builtin { name: Builtin::One } => Some(Ok(SieveFunction::one())),
        other => other.sieve_function(),
    }
}

#[allow(clippy::too_many_arguments)]
fn verify(
    identity: Identity,
    f: &str,
    g: &str,
    tuple: ParameterTuple,
    epsilon: f64,
    c: f64,
    format: Format,
    out: Option<&Path>,
    seed: u64,
) -> Result<()> {
    if !(epsilon > 0.0) {
        return Err(Error::Parse(format!("epsilon must be positive, got {epsilon}")).into());
    }
    let f_spec = load_spec(f, seed)?;
    let g_spec = load_spec(g, seed)?;
    let scale = if identity.is_long() {
        tuple.big_n()?
    } else {
        tuple.check_short()?
    };

    let report = match sieve_of(&g_spec) {
        Some(g) => {
            let g = g?;
            if identity.uses_range() {
                ParameterTuple::check_scale(g.range(), scale, c, "Q")?;
            }
            let f_sieve = if identity.is_long() {
                let fs = f_spec
                    .sieve_function()
                    .ok_or_else(|| Error::Parse(format!("{identity} needs f as a sieve spec")))??;
                ParameterTuple::check_scale(fs.range(), scale, c, "D")?;
                Some(fs)
            } else {
                None
            };
            let ops = Operands { f: &f_spec, g: &g, f_sieve: f_sieve.as_ref() };
            evaluate(identity, &ops, &tuple, epsilon)?
        }
        None if identity == Identity::Theorem0 => {
            if let Some(q) = tuple.range {
                ParameterTuple::check_scale(q, scale, c, "Q")?;
            }
            theorem0_decompose(&f_spec, &g_spec, &tuple)?
        }
        None => return Err(Error::Parse(format!("{identity} needs g as a sieve spec")).into()),
    };
    let row = GridRow::new(report, epsilon);
    match format {
        Format::Json => write_json(&row, out),
        Format::Csv => {
            let mut w = output(out)?;
            write_grid_csv(std::slice::from_ref(&row), &mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

/// `runs/cal.csv` → `runs/cal.summary.json`.
fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

fn grid(config_path: &Path, format: Format, out: Option<&Path>, seed: Option<u64>, epsilon: Option<f64>) -> Result<()> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| Error::Parse(format!("reading {}: {e}", config_path.display())))?;
    let mut config = GridConfig::from_json(&text).with_context(|| format!("in {}", config_path.display()))?;
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(e) = epsilon {
        config.epsilon = e;
    }
    let threads = match std::env::var("PINCHSUM_THREADS") {
        Ok(v) => Some(
            v.parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Parse(format!("PINCHSUM_THREADS must be a positive integer, got {v:?}")))?,
        ),
        Err(_) => None,
    };
    let report = run_grid(&config, threads)?;
    for s in &report.skipped {
        match &s.tuple {
            Some(t) => eprintln!("skipped {} {}: {}", s.identity, serde_json::to_string(t)?, s.reason),
            None => eprintln!("skipped {}: {}", s.identity, s.reason),
        }
    }
    for v in &report.growth_violations {
        eprintln!(
            "warning: {} constant grows from {} at {} to {} at {}",
            v.identity, v.from, v.from_scale, v.to, v.to_scale
        );
    }
    match format {
        Format::Json => write_json(&report, out)?,
        Format::Csv => {
            let mut w = output(out)?;
            write_grid_csv(&report.rows, &mut w)?;
            w.flush()?;
            if let Some(p) = out {
                std::fs::write(sidecar_path(p), report.summary_json() + "\n")?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    count: u64,
    bound: u64,
}

fn checks(x: u64, h: u64, shifts: u64, range: u64, format: Format, out: Option<&Path>) -> Result<()> {
    let c = divisor_count_checks(x, h, shifts, range)?;
    match format {
        Format::Json => write_json(&c, out),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(output(out)?);
            let names = ["near_shift_class", "near_wrap", "large_moduli"];
            for (check, pair) in names.into_iter().zip(c.all()) {
                w.serialize(CheckRow { check, count: pair.count, bound: pair.bound })?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
