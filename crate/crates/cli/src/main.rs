use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use gksq_cli::config::{CliError, ParamsSpec, SpectrumSpec, SweepDocument, TruncationSpec};
use gksq_cli::run::{cmd_spectra, cmd_state, cmd_sweep, StateRequest, SweepRequest, SweepVar};
use gksq_cli::verify;
use gksq_core::StateClass;

/// Squeezed states of solvable spectra: build states, sweep parameters,
/// inspect spectra, verify against reference claims.
#[derive(Parser)]
#[command(name = "gksq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one squeezed state and emit `n, re(c), im(c), P(n)` as CSV
    State(StateArgs),
    /// Sweep r, alpha or eta and emit `x, Q, var_x, var_p, mean_n` as CSV
    Sweep(SweepArgs),
    /// List built-in spectra, or tabulate and validate one
    Spectra(SpectraArgs),
    /// Run the verification suite (exit 0 iff every criterion passes)
    Verify,
}

#[derive(Args)]
struct SpectrumFlags {
    /// harmonic | poschl_teller | square_well | hydrogen | trapped_ion | table
    #[arg(long)]
    spectrum: Option<String>,
    /// Depth/width parameter of the Poeschl-Teller well
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    /// Lamb-Dicke parameter of the trapped ion
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Comma-separated e_n values for `--spectrum table`
    #[arg(long)]
    levels: Option<String>,
}

impl SpectrumFlags {
    fn spec(&self) -> Result<SpectrumSpec, CliError> {
        SpectrumSpec::from_flags(
            self.spectrum.as_deref(),
            self.nu,
            self.eta,
            self.levels.as_deref(),
        )
    }
}

#[derive(Args)]
struct TruncationFlags {
    /// Per-term relative contribution below which the series is cut
    #[arg(long)]
    tol: Option<f64>,
    /// Hard cap on the truncation index
    #[arg(long)]
    max_n: Option<usize>,
    /// Truncate at exactly this index, even for a divergent series
    #[arg(long)]
    force_truncate: Option<usize>,
}

impl TruncationFlags {
    fn spec(&self) -> TruncationSpec {
        TruncationSpec {
            tol: self.tol,
            max_n: self.max_n,
            force_truncate: self.force_truncate,
        }
    }
}

#[derive(Args)]
struct StateArgs {
    #[command(flatten)]
    spectrum: SpectrumFlags,
    /// State class: I, II, III or IV
    #[arg(long)]
    class: String,
    /// Squeeze magnitude (xi = tanh r e^{i phi})
    #[arg(long, allow_negative_numbers = true)]
    r: f64,
    /// Squeeze phase
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    /// Temporal-stability parameter
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[command(flatten)]
    truncation: TruncationFlags,
    /// Output path, or `-` for standard output
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON document holding spectrum spec + sweep spec (alternative to flags)
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    spectrum: SpectrumFlags,
    #[arg(long)]
    class: Option<String>,
    /// Variable to sweep: r, alpha or eta
    #[arg(long)]
    sweep_var: Option<String>,
    /// Sweep grid start:stop:steps
    #[arg(long)]
    range: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[command(flatten)]
    truncation: TruncationFlags,
    /// Output path, or `-` for standard output
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct SpectraArgs {
    #[command(flatten)]
    spectrum: SpectrumFlags,
    /// Highest level to tabulate and validate
    #[arg(long, default_value_t = 100)]
    max_n: u32,
    /// Output path, or `-` for standard output
    #[arg(long, default_value = "-")]
    output: String,
}

fn parse_range(range: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "--range `{range}` must look like start:stop:steps"
        )));
    }
    let start = parts[0]
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("bad range start `{}`", parts[0])))?;
    let stop = parts[1]
        .parse::<f64>()
        .map_err(|_| CliError::Config(format!("bad range stop `{}`", parts[1])))?;
    let steps = parts[2]
        .parse::<usize>()
        .map_err(|_| CliError::Config(format!("bad range steps `{}`", parts[2])))?;
    Ok((start, stop, steps))
}

fn with_output<F>(path: &str, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    if path == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        body(&mut lock)?;
        lock.flush()?;
    } else {
        let mut file = BufWriter::new(File::create(path)?);
        body(&mut file)?;
        file.flush()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::State(args) => {
            let request = StateRequest {
                spectrum: args.spectrum.spec()?,
                class: StateClass::from_str(&args.class).map_err(CliError::Config)?,
                r: args.r,
                phi: args.phi,
                alpha: args.alpha,
                truncation: args.truncation.spec(),
            };
            with_output(&args.output, |out| cmd_state(&request, out))?;
            Ok(true)
        }
        Command::Sweep(args) => {
            let request = if let Some(path) = &args.config {
                let text = std::fs::read_to_string(path)?;
                let doc: SweepDocument = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                SweepRequest::from_document(&doc)?
            } else {
                let class = args
                    .class
                    .as_deref()
                    .ok_or_else(|| CliError::Config("--class is required".into()))?;
                let var = args
                    .sweep_var
                    .as_deref()
                    .ok_or_else(|| CliError::Config("--sweep-var is required".into()))?;
                let range = args
                    .range
                    .as_deref()
                    .ok_or_else(|| CliError::Config("--range is required".into()))?;
                let (start, stop, steps) = parse_range(range)?;
                SweepRequest {
                    spectrum: args.spectrum.spec()?,
                    class: StateClass::from_str(class).map_err(CliError::Config)?,
                    variable: SweepVar::from_str(var).map_err(CliError::Config)?,
                    start,
                    stop,
                    steps,
                    fixed: ParamsSpec {
                        r: args.r,
                        phi: args.phi,
                        alpha: args.alpha,
                    },
                    truncation: args.truncation.spec(),
                }
            };
            with_output(&args.output, |out| cmd_sweep(&request, out))?;
            Ok(true)
        }
        Command::Spectra(args) => {
            let spec = if args.spectrum.spectrum.is_some() {
                Some(args.spectrum.spec()?)
            } else {
                None
            };
            with_output(&args.output, |out| {
                cmd_spectra(spec.as_ref(), args.max_n, out)
            })?;
            Ok(true)
        }
        Command::Verify => {
            let outcomes = verify::run_all();
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            let all = verify::print_report(&mut lock, &outcomes)?;
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
