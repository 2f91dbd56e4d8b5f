use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvtelefid_cli::curve::{compute_curve, render_csv, render_json, render_svg, BruteMode};
use cvtelefid_cli::verify::{run_checks, CHECK_NAMES};
use cvtelefid_cli::{config, exit, reports, to_json, write_output, CliError, OutputFormat, Overrides, RunConfig};

/// Fidelity of continuous-variable teleportation with Gaussian displacement noise.
///
/// All noise parameters are variances in units of squared coherent amplitude,
/// with vacuum noise 1/2: the channel adds sigma photons on average and a
/// coherent state keeps fidelity 1/(1+sigma).
#[derive(Parser, Debug)]
#[command(name = "cvtelefid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Flat key = value config file. Flags override its values.
    #[arg(long, env = config::CONFIG_ENV)]
    config: Option<PathBuf>,

    /// Single-threaded evaluation. Output is byte-identical either way.
    #[arg(long)]
    deterministic: bool,

    /// Fock cutoff (highest kept photon number).
    #[arg(long)]
    cutoff: Option<usize>,

    /// Gauss-Hermite points per axis for the noise channel.
    #[arg(long)]
    gh_order: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entanglement fidelity versus noise variance for |alpha> and the ECS |Psi(alpha, -alpha)>.
    Fig1 {
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Largest noise variance sigma.
        #[arg(long, default_value_t = 1.0)]
        sigma_max: f64,
        /// Number of sigma values, from 0 to sigma-max inclusive.
        #[arg(long, default_value_t = 21)]
        steps: usize,
        /// Fock brute-force column.
        #[arg(long, value_enum, default_value_t = BruteMode::Auto)]
        brute: BruteMode,
        /// Also write an SVG chart to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Total variance from squeezing, detector efficiency and other noise, with threshold checks.
    NoiseBudget {
        /// Amplification noise variance, taken as given.
        #[arg(long, default_value_t = 0.0)]
        sigma_g: f64,
        /// Two-mode squeezing parameter, 0 <= eta < 1.
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
        /// Detector efficiency, 0 < nu <= 1.
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma_other: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite; exit status 1 if any check fails.
    Verify {
        /// Run only the named checks (repeatable).
        #[arg(long = "check", value_parser = clap::builder::PossibleValuesParser::new(CHECK_NAMES))]
        checks: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Noise variance, and squeezing in dB, at which the ECS reaches a target entanglement fidelity.
    RequiredSqueezing {
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        target: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let overrides = Overrides {
        cutoff: common.cutoff,
        gh_order: common.gh_order,
        format: common.format,
        out: common.out.clone(),
        deterministic: common.deterministic,
    };
    let cfg = RunConfig::load(common.config.as_deref(), &overrides)?;
    if cfg.deterministic_reduction {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fig1 {
            alpha,
            sigma_max,
            steps,
            brute,
            svg,
            common,
        } => {
            let cfg = load(&common)?;
            let curve = compute_curve(alpha, sigma_max, steps, brute, &cfg)?;
            if let Some(note) = &curve.brute_note {
                eprintln!("fe_ecs_brute left empty: {note}");
            }
            let body = match cfg.output_format {
                OutputFormat::Csv => render_csv(&curve),
                OutputFormat::Json => render_json(&curve),
            };
            write_output(cfg.output_path.as_ref(), &body)?;
            if let Some(path) = svg {
                write_output(Some(&path), &render_svg(&curve))?;
            }
        }
        Command::NoiseBudget {
            sigma_g,
            eta,
            nu,
            sigma_other,
            common,
        } => {
            let cfg = load(&common)?;
            let report = reports::noise_budget(sigma_g, eta, nu, sigma_other)?;
            let body = match cfg.output_format {
                OutputFormat::Csv => report.to_csv(),
                OutputFormat::Json => to_json(&report),
            };
            write_output(cfg.output_path.as_ref(), &body)?;
        }
        Command::Verify { checks, common } => {
            let cfg = load(&common)?;
            let report = run_checks(&cfg, |name| checks.is_empty() || checks.iter().any(|c| c == name));
            for c in &report.checks {
                eprintln!("{} {} ({:.1} s): {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.seconds, c.detail);
            }
            let body = match cfg.output_format {
                OutputFormat::Csv => report.to_csv(),
                OutputFormat::Json => to_json(&report),
            };
            write_output(cfg.output_path.as_ref(), &body)?;
            if !report.all_passed {
                return Err(CliError::Verification(report.failed()));
            }
        }
        Command::RequiredSqueezing { alpha, target, common } => {
            let cfg = load(&common)?;
            let report = reports::required_squeezing(alpha, target)?;
            let body = match cfg.output_format {
                OutputFormat::Csv => report.to_csv(),
                OutputFormat::Json => to_json(&report),
            };
            write_output(cfg.output_path.as_ref(), &body)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
