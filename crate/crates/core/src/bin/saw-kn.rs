//! Command-line reports for self-avoiding walk on `K_n`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 size cap exceeded, 1 numerical
//! failure.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use saw_kn::asymptotics::DEFAULT_WINDOW_EXPONENT;
use saw_kn::exact::DEFAULT_N_CAP;
use saw_kn::report::{
    alpha_table_report, chi_report, length_report, limits_report, window_scan_report, Format,
    LengthStat, Mode, ModelSpec, Report,
};
use saw_kn::{Error, Scaling};

const CAP_ENV: &str = "SAW_KN_N_CAP";

#[derive(Parser)]
#[command(
    name = "saw-kn",
    version,
    about = "Exact and asymptotic statistics of self-avoiding walk on K_n"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Exponent w of the critical window |y - n| < n^w, in (1/2, 2/3)
    #[arg(long, global = true, default_value_t = DEFAULT_WINDOW_EXPONENT)]
    window_exponent: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Asymptotic,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Mean,
    Var,
    Pmf,
    Mgf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SpecArgs {
    /// Step weight z
    #[arg(long, allow_negative_numbers = true)]
    z: Option<f64>,
    /// z = 1/(s n); s > 1 is subcritical, s < 1 supercritical
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    /// z = 1/(n + tau sqrt(n))
    #[arg(long, allow_negative_numbers = true)]
    crit_tau: Option<f64>,
    /// z = 1/(n +- a n^q); needs --near-q and --near-sign
    #[arg(long, requires_all = ["near_q", "near_sign"], allow_negative_numbers = true)]
    near_a: Option<f64>,
}

#[derive(Args)]
struct ModelArgs {
    /// Number of vertices
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    spec: SpecArgs,
    /// Exponent q in (1/2, 1) of the near-critical scalings
    #[arg(long, requires = "near_a")]
    near_q: Option<f64>,
    /// `+` for n + a n^q (subcritical side), `-` for n - a n^q
    #[arg(long, requires = "near_a", allow_hyphen_values = true, value_parser = ["+", "-"])]
    near_sign: Option<String>,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec, Error> {
        let s = &self.spec;
        if let Some(z) = s.z {
            return Ok(ModelSpec::Weight(z));
        }
        let scaling = if let Some(s) = s.s {
            if s > 1.0 {
                Scaling::Subcritical { s }
            } else if s > 0.0 && s < 1.0 {
                Scaling::Supercritical { s }
            } else {
                return Err(Error::Domain(format!(
                    "--s must be positive and different from 1 (use --crit-tau 0 for z = 1/n), got {s}"
                )));
            }
        } else if let Some(tau) = s.crit_tau {
            Scaling::Critical { tau }
        } else if let Some(a) = s.near_a {
            let q = self.near_q.expect("clap enforces --near-q");
            match self.near_sign.as_deref() {
                Some("+") => Scaling::NearSubcritical { a, q },
                _ => Scaling::NearSupercritical { a, q },
            }
        } else {
            unreachable!("clap enforces one model specification")
        };
        scaling.validate()?;
        Ok(ModelSpec::Scaled(scaling))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Susceptibility ln chi, exact and/or asymptotic
    Chi {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
    },
    /// Exact statistics of the walk length L
    Length {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = StatArg::Mean)]
        stats: StatArg,
        /// Tilt for --stats mgf
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        /// Stop the pmf once the remaining mass is below this
        #[arg(long)]
        tail_eps: Option<f64>,
    },
    /// Table of alpha_tau, the mean of the critical limit law
    AlphaTable {
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        tau_min: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        tau_max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Exact against crossover asymptotics across z = 1/(n + tau sqrt(n))
    WindowScan {
        /// Number of vertices
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        tau_min: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        tau_max: f64,
        #[arg(long, default_value_t = 61)]
        points: u64,
    },
    /// Distance between the rescaled length and its limit law
    Limits {
        #[command(flatten)]
        model: ModelArgs,
        /// Monte Carlo samples in addition to the exact comparison
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_cap(raw: Option<&str>) -> Result<u64, Error> {
    let Some(raw) = raw else {
        return Ok(DEFAULT_N_CAP);
    };
    let raw = raw.trim();
    raw.parse::<u64>()
        .ok()
        .or_else(|| {
            raw.parse::<f64>()
                .ok()
                .filter(|v| *v >= 0.0 && v.fract() == 0.0 && *v < u64::MAX as f64)
                .map(|v| v as u64)
        })
        .ok_or_else(|| {
            Error::Domain(format!(
                "{CAP_ENV} must be a non-negative integer, got {raw:?}"
            ))
        })
}

fn run(cli: Cli, cap_env: Option<&str>) -> Result<Report, Error> {
    let w = cli.window_exponent;
    let n_cap = || parse_cap(cap_env);
    saw_kn::asymptotics::check_window_exponent(w)?;
    match cli.command {
        Command::Chi { model, mode } => {
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Asymptotic => Mode::Asymptotic,
                ModeArg::Both => Mode::Both,
            };
            chi_report(model.n, &model.spec()?, mode, w, n_cap()?)
        }
        Command::Length {
            model,
            stats,
            t,
            tail_eps,
        } => {
            let stat = match stats {
                StatArg::Mean => LengthStat::Mean,
                StatArg::Var => LengthStat::Var,
                StatArg::Pmf => LengthStat::Pmf { tail_eps },
                StatArg::Mgf => LengthStat::Mgf {
                    t: t.ok_or_else(|| Error::Domain("--stats mgf needs --t".to_owned()))?,
                },
            };
            length_report(model.n, &model.spec()?, stat, w, n_cap()?)
        }
        Command::AlphaTable {
            tau_min,
            tau_max,
            step,
        } => alpha_table_report(tau_min, tau_max, step),
        Command::WindowScan {
            n,
            tau_min,
            tau_max,
            points,
        } => window_scan_report(n, tau_min, tau_max, points, w, n_cap()?),
        Command::Limits {
            model,
            samples,
            seed,
        } => match model.spec()? {
            ModelSpec::Scaled(scaling) => {
                limits_report(model.n, scaling, samples, seed, w, n_cap()?)
            }
            ModelSpec::Weight(_) => Err(Error::Domain(
                "limits needs one of --s, --crit-tau or --near-a/--near-q/--near-sign".to_owned(),
            )),
        },
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Domain(_) | Error::EmptyGrid => 2,
        Error::CapExceeded { .. } | Error::Size(_) => 3,
        Error::NoConvergence(_) => 1,
    }
}

struct Outcome {
    code: u8,
    stdout: String,
    stderr: String,
}

/// Runs one invocation; `cap_env` is the value of `SAW_KN_N_CAP`.
fn execute<I, T>(args: I, cap_env: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Outcome {
                code: e.exit_code() as u8,
                stdout,
                stderr,
            };
        }
    };
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    match run(cli, cap_env) {
        Ok(report) => Outcome {
            code: 0,
            stdout: report.render(format),
            stderr: String::new(),
        },
        Err(err) => Outcome {
            code: exit_code(&err),
            stdout: String::new(),
            stderr: format!("saw-kn: {err}\n"),
        },
    }
}

fn main() -> ExitCode {
    let cap_env = std::env::var(CAP_ENV).ok();
    let outcome = execute(std::env::args_os(), cap_env.as_deref());
    eprint!("{}", outcome.stderr);
    let mut out = std::io::stdout().lock();
    match out
        .write_all(outcome.stdout.as_bytes())
        .and_then(|_| out.flush())
    {
        Ok(()) => ExitCode::from(outcome.code),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::from(outcome.code),
        Err(e) => {
            eprintln!("saw-kn: {e}");
            ExitCode::from(1)
        }
    }
}
