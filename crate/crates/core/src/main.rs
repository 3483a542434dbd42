use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use cpo_oam::experiments::{self, MemoryKind, Run};
use cpo_oam::{io, Config, Direction};

#[derive(Parser, Debug)]
#[command(name = "cpo-oam", version, about = "CPO-based OAM memory simulator")]
struct Cli {
    /// TOML configuration; defaults are used for missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV, PGM, field files and report.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for noise experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Memory {
    Cpo,
    Eit,
}

impl From<Memory> for MemoryKind {
    fn from(m: Memory) -> Self {
        match m {
            Memory::Cpo => MemoryKind::Cpo,
            Memory::Eit => MemoryKind::Eit,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// FWM reflectivity vs two-photon detuning for both polarization configurations.
    Spectrum,
    /// Retrieved amplitude vs storage time with Gaussian fits.
    Decay {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        ell_w: i32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        ell_wp: i32,
    },
    /// Retrieved charge for every (ℓ_W, ℓ_W′) pair. Ranges are `a:b` (inclusive) or a single value.
    Table {
        #[arg(long, default_value = "-2:2", allow_hyphen_values = true, value_parser = parse_range)]
        ell_w: ChargeRange,
        #[arg(long, default_value = "-2:2", allow_hyphen_values = true, value_parser = parse_range)]
        ell_wp: ChargeRange,
    },
    /// Tilted-lens measurement of an OAM1 field file.
    Tilt {
        field: PathBuf,
        /// Gaussian pattern noise relative to the pattern maximum.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
    /// Writes an LG beam as an OAM1 field file.
    Lg {
        #[arg(long, allow_hyphen_values = true)]
        ell: i32,
        /// Transverse wavevector, rad/m.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        tilt_kx: f64,
        #[arg(long)]
        backward: bool,
        #[arg(long, default_value = "field.oam1")]
        file: String,
    },
    /// Single write, store and read.
    Store {
        #[arg(long, value_enum, default_value_t = Memory::Cpo)]
        memory: Memory,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        ell_w: i32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        ell_wp: i32,
        /// Storage time, µs.
        #[arg(long, default_value_t = 1.0)]
        t_s: f64,
    },
}

#[derive(Clone, Debug)]
struct ChargeRange(Vec<i32>);

fn parse_range(s: &str) -> Result<ChargeRange, String> {
    let parse = |t: &str| t.trim().parse::<i32>().map_err(|e| format!("bad charge `{t}`: {e}"));
    match s.split_once(':') {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(format!("empty range {a}:{b}"));
            }
            Ok(ChargeRange((a..=b).collect()))
        }
        None => Ok(ChargeRange(vec![parse(s)?])),
    }
}

fn finish<T>(run: Run<T>, out: &std::path::Path) -> anyhow::Result<()> {
    let written = run.write(out).with_context(|| format!("writing into {}", out.display()))?;
    for p in written {
        println!("{}", p.display());
    }
    println!("{}", serde_json::to_string(&run.report.summary)?);
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let out = cli.out.as_path();
    match cli.command {
        Command::Spectrum => finish(experiments::cmd_spectrum(&config)?, out),
        Command::Decay { ell_w, ell_wp } => finish(experiments::cmd_decay(&config, ell_w, ell_wp)?, out),
        Command::Table { ell_w, ell_wp } => {
            finish(experiments::cmd_charge_table(&config, &ell_w.0, &ell_wp.0)?, out)
        }
        Command::Tilt { field, noise } => {
            let f = io::read_field(&field).with_context(|| format!("reading {}", field.display()))?;
            finish(experiments::cmd_tilt(&config, &f, noise, cli.seed)?, out)
        }
        Command::Lg { ell, tilt_kx, backward, file } => {
            let dir = if backward { Direction::Backward } else { Direction::Forward };
            finish(experiments::cmd_lg(&config, ell, tilt_kx, dir, &file)?, out)
        }
        Command::Store { memory, ell_w, ell_wp, t_s } => {
            finish(experiments::cmd_store(&config, memory.into(), ell_w, ell_wp, t_s)?, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
