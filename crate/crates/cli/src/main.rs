use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vkampen::deleted::RepresentativeOrder;
use vkampen::gallery;
use vkampen::io::{read_complex, read_ornament, to_json};
use vkampen::linking::linking_details;
use vkampen::obstruction::{obstruction_trivial_with, ObstructionOptions, Ring};
use vkampen::plmap::van_kampen_parity;
use vkampen::Error;

const AFTER_HELP: &str = "\
Exit codes: 0 ok, 2 invalid input, 3 genericity failure, 4 dimension mismatch, 5 budget exceeded.
Worker threads: set RAYON_NUM_THREADS (defaults to the number of cores).";

#[derive(Parser, Debug)]
#[command(name = "vkampen", version, about = "Van Kampen obstructions and r-linking numbers in exact arithmetic", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a named complex or ornament as JSON.
    #[command(after_help = format!("Names: {}", gallery::NAMES.join(", ")))]
    Gallery {
        name: String,
        /// Output file [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether the generalized van Kampen obstruction of a complex vanishes.
    Obstruction {
        /// Complex JSON file
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value_t = RingArg::Z)]
        ring: RingArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap on deleted product cells
        #[arg(long, default_value_t = 1_000_000)]
        max_cells: usize,
        /// Cap on rows × columns of the folded system
        #[arg(long, default_value_t = 25_000_000)]
        max_matrix: usize,
        /// Widest residual block handed to dense Smith normal form
        #[arg(long, default_value_t = 2000)]
        dense_limit: usize,
        /// Orbit representatives
        #[arg(long, value_enum, default_value_t = OrderArg::LexMin)]
        order: OrderArg,
        /// Include the cochain φ with δφ = c in the report
        #[arg(long)]
        witness: bool,
    },
    /// r-linking number of an ornament.
    Linking {
        /// Ornament JSON file
        #[arg(long)]
        ornament: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of apex seeds, `seed .. seed + repeat`
        #[arg(long, default_value_t = 1)]
        repeat: u64,
    },
    /// Parity of the number of double points of random generic maps.
    Parity {
        /// Complex JSON file
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RingArg {
    Z,
    Z2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrderArg {
    LexMin,
    LexMax,
}

#[derive(Serialize)]
struct SeedValue {
    seed: u64,
    value: i64,
    points: usize,
}

#[derive(Serialize)]
struct LinkingReport {
    r: usize,
    d: usize,
    linking_number: i64,
    seed: u64,
    apex_independent: bool,
    per_seed: Vec<SeedValue>,
}

#[derive(Serialize)]
struct ParityReport {
    complex: String,
    d: usize,
    seed: u64,
    trials: Vec<vkampen::plmap::ParityTrial>,
    odd: usize,
    even: usize,
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gallery { name, out } => emit(&gallery::lookup(&name)?.to_json(), out.as_ref()),
        Command::Obstruction { complex, k, r, ring, seed, out, max_cells, max_matrix, dense_limit, order, witness } => {
            let base = read_complex(&complex)?;
            let opts = ObstructionOptions {
                max_cells,
                max_matrix_entries: max_matrix,
                dense_column_limit: dense_limit,
                include_witness: witness,
                order: match order {
                    OrderArg::LexMin => RepresentativeOrder::LexMin,
                    OrderArg::LexMax => RepresentativeOrder::LexMax,
                },
                ..ObstructionOptions::default()
            };
            let ring = match ring {
                RingArg::Z => Ring::Integers,
                RingArg::Z2 => Ring::Mod2,
            };
            let report = obstruction_trivial_with(&base, k, r, ring, seed, &opts)?;
            emit(&to_json(&report), out.as_ref())
        }
        Command::Linking { ornament, seed, repeat } => {
            if repeat == 0 {
                return Err(Error::InvalidInput("--repeat must be at least 1".into()));
            }
            let orn = read_ornament(&ornament)?;
            let per_seed = (seed..seed + repeat)
                .map(|s| {
                    let res = linking_details(&orn, s)?;
                    Ok(SeedValue { seed: s, value: res.value, points: res.points })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let report = LinkingReport {
                r: orn.r(),
                d: orn.ambient_dim(),
                linking_number: per_seed[0].value,
                seed,
                apex_independent: per_seed.iter().all(|v| v.value == per_seed[0].value),
                per_seed,
            };
            emit(&to_json(&report), None)
        }
        Command::Parity { complex, d, trials, seed } => {
            let base = read_complex(&complex)?;
            let trials = van_kampen_parity(&base, d, trials, seed)?;
            let odd = trials.iter().filter(|t| t.parity == 1).count();
            let report = ParityReport {
                complex: base.name().unwrap_or_default().to_string(),
                d,
                seed,
                even: trials.len() - odd,
                odd,
                trials,
            };
            emit(&to_json(&report), None)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vkampen: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
