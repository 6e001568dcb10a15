use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lpcat::config::ExperimentConfig;
use lpcat::error::{CliError, CliResult};
use lpcat::format::{read_json, rat_from_str, scalar_from_str, to_json_bytes, DescriptorJson, ImagesFile};
use lpcat::run::{self, GensetChoice, ImageSource, OracleChoice, Scenario};
use lpcat_core::rigor::CRat;

#[derive(Parser)]
#[command(name = "lpcat", version, about = "Certified experiments on presentations of l^p")]
struct Cli {
    /// Exponent: a rational such as 3/2 or 1.5, or sqrt(r).
    #[arg(long, default_value = "1", global = true)]
    p: String,
    #[arg(long, default_value = "real", global = true)]
    field: String,
    /// `odds`, `primes`, or the path of a c.e.-set spec file.
    #[arg(long = "ce-set", default_value = "odds", global = true)]
    ce_set: String,
    #[arg(long, default_value_t = 20, global = true)]
    k: u32,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Work budget: maximum oracle precision for ball maps, enumeration
    /// stages for membership decisions.
    #[arg(long, default_value_t = 4000, global = true)]
    fuel: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GensetArg {
    #[value(name = "E")]
    E,
    #[value(name = "F")]
    F,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Zeta,
    Rotation,
    #[value(name = "pour-el-richards")]
    PourElRichards,
}

#[derive(Subcommand)]
enum Command {
    /// Query the norm oracle of E or F.
    Norm {
        #[arg(long, value_enum, default_value = "F")]
        genset: GensetArg,
        /// Comma-separated coefficients, each `re` or `re:im`.
        #[arg(long, default_value = "1")]
        coeffs: String,
        /// Record the elapsed time (makes the report nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Approximate e_0 over F using membership decisions.
    #[command(name = "approx-e0")]
    ApproxE0 {
        /// Also run k = 1 ..= --k and include the table.
        #[arg(long)]
        sweep: bool,
        /// Write the sweep table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Recover membership bits from an oracle for a multiple of e_0.
    Extract {
        /// `internal-e0`, or the path of an isometry descriptor file.
        #[arg(long, default_value = "internal-e0")]
        oracle: String,
        #[arg(long = "n-max", default_value_t = 20)]
        n_max: usize,
        /// Add this rational to every oracle coefficient.
        #[arg(long)]
        fault: Option<String>,
    },
    /// Check candidate basis images for unit norms and disjoint supports.
    Classify {
        #[arg(long, conflicts_with_all = ["images", "rotation"])]
        descriptor: Option<PathBuf>,
        #[arg(long, conflicts_with = "rotation")]
        images: Option<PathBuf>,
        /// Classify the rotation of the first two coordinates.
        #[arg(long)]
        rotation: bool,
        /// Truncation precision; defaults to --k.
        #[arg(long)]
        tol: Option<u32>,
    },
    /// Run a narrated scenario.
    Demo {
        #[arg(value_enum)]
        scenario: ScenarioArg,
        /// The unimodular scalar of the zeta scenario, `re:im`.
        #[arg(long, default_value = "3/5:4/5")]
        zeta: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        /// Write the scenario's table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn coefficients(s: &str) -> CliResult<Vec<CRat>> {
    s.split(',').map(scalar_from_str).collect()
}

fn execute(cli: Cli) -> CliResult<()> {
    let cfg = ExperimentConfig::new(&cli.p, &cli.field, &cli.ce_set, cli.k, cli.seed, cli.fuel)?;
    let out = cli.out.as_deref();
    let bytes = match cli.command {
        Command::Norm { genset, coeffs, timing } => {
            let coeffs = coefficients(&coeffs)?;
            let choice = match genset {
                GensetArg::E => GensetChoice::E,
                GensetArg::F => GensetChoice::F,
            };
            let start = Instant::now();
            let mut record = run::cmd_norm(&cfg, choice, &coeffs)?;
            if timing {
                record.elapsed_ms = Some(start.elapsed().as_millis() as u64);
            }
            to_json_bytes(&record)
        }
        Command::ApproxE0 { sweep, csv } => {
            let record = run::cmd_approx_e0(&cfg, sweep || csv.is_some())?;
            if let Some(path) = csv {
                std::fs::write(path, run::sweep_table(&record.sweep)?)?;
            }
            to_json_bytes(&record)
        }
        Command::Extract { oracle, n_max, fault } => {
            let choice = match oracle.as_str() {
                "internal-e0" => OracleChoice::InternalE0,
                path => OracleChoice::Descriptor(read_json::<DescriptorJson>(Path::new(path))?.build()?),
            };
            let fault = fault.as_deref().map(rat_from_str).transpose()?;
            let record = run::cmd_extract(&cfg, &choice, n_max, fault.as_ref())?;
            emit(out, &to_json_bytes(&record))?;
            // the report is written either way; unresolved bits are an oracle failure
            return match record.bits.failures.first() {
                Some((n, why)) => Err(CliError::Oracle(format!(
                    "{} of {} bits unresolved, first n = {n}: {why}",
                    record.bits.failures.len(),
                    n_max + 1
                ))),
                None => Ok(()),
            };
        }
        Command::Classify { descriptor, images, rotation, tol } => {
            let source = match (descriptor, images, rotation) {
                (Some(path), None, false) => ImageSource::Descriptor(read_json::<DescriptorJson>(&path)?.build()?),
                (None, Some(path), false) => ImageSource::Images(read_json::<ImagesFile>(&path)?.build()?),
                (None, None, true) => ImageSource::Rotation,
                _ => return Err(CliError::invalid("give exactly one of --descriptor, --images, --rotation")),
            };
            to_json_bytes(&run::cmd_classify(&cfg, &source, tol.unwrap_or(cfg.k))?)
        }
        Command::Demo { scenario, zeta, samples, csv } => {
            let scenario = match scenario {
                ScenarioArg::Zeta => Scenario::Zeta(scalar_from_str(&zeta)?),
                ScenarioArg::Rotation => Scenario::Rotation,
                ScenarioArg::PourElRichards => Scenario::PourElRichards,
            };
            let record = run::cmd_demo(&cfg, &scenario, samples)?;
            if let Some(path) = csv {
                std::fs::write(path, record.table()?)?;
            }
            to_json_bytes(&record)
        }
    };
    emit(out, &bytes)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lpcat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
