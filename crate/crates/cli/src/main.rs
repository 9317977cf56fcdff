use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modheat_cli::{
    cmd_finite, cmd_heat, cmd_spectrum, cmd_verify, parse_n_spec, resolve, CliError, OutputFormat, Overrides, Status,
    VerifyHooks, EXIT_VIOLATION,
};

#[derive(Parser)]
#[command(
    name = "modheat",
    version,
    about = "Heat kernel and spectra of the Cayley graph of PSL2(Z)"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, env = "MODHEAT_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    #[arg(long, global = true)]
    oracle_window: Option<i64>,
    #[arg(long, global = true)]
    oracle_terms: Option<usize>,
    #[arg(long, global = true)]
    gamma_ball_radius: Option<u32>,
    #[arg(long, global = true)]
    zero_threshold: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// K_t(n) by the closed form, the transfer route and the series oracle.
    Heat {
        /// Times, comma separated.
        #[arg(long = "t", value_delimiter = ',', required = true, allow_hyphen_values = true)]
        t: Vec<f64>,
        /// Indices: `a..b` (inclusive), an integer, or a comma list of these.
        #[arg(long = "n", required = true, allow_hyphen_values = true)]
        n: String,
    },
    /// Bands and eigenvalues of the Laplacian of the Cayley graph.
    Spectrum,
    /// Spectra of the finite quotients PSL2(F_p).
    Finite {
        /// Primes, comma separated.
        #[arg(long = "p", value_delimiter = ',', required = true)]
        p: Vec<u32>,
        /// Directory for the per-prime eigenvalue CSVs.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Runs every check and prints a JSON report.
    Verify {
        #[arg(long, hide = true)]
        corrupt_line_weight: bool,
    },
}

fn run(cli: Cli) -> Result<(String, Status), CliError> {
    let g = cli.global;
    let flags = Overrides {
        quad_tol: g.quad_tol,
        oracle_window: g.oracle_window,
        oracle_terms: g.oracle_terms,
        gamma_ball_radius: g.gamma_ball_radius,
        zero_threshold: g.zero_threshold,
        output_format: g.format,
    };
    let env: BTreeMap<String, String> = std::env::vars().collect();
    let cfg = resolve(g.config.as_deref(), &env, &flags)?;
    let out = match cli.command {
        Command::Heat { t, n } => cmd_heat(&t, &parse_n_spec(&n)?, &cfg)?,
        Command::Spectrum => cmd_spectrum(&cfg)?,
        Command::Finite { p, out_dir } => cmd_finite(&p, &out_dir, &cfg)?,
        Command::Verify { corrupt_line_weight } => cmd_verify(&cfg, VerifyHooks { corrupt_line_weight }),
    };
    Ok((out.text, out.status))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, status)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_VIOLATION);
            }
            match status {
                Status::Pass => ExitCode::SUCCESS,
                Status::Violation => {
                    eprintln!("modheat: tolerance violation");
                    ExitCode::from(EXIT_VIOLATION)
                }
            }
        }
        Err(e) => {
            eprintln!("modheat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
