use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use classfield::numerics::PrecisionPolicy;
use classfield::Error;
use classfield_cli::checks::DEFAULT_SEED;
use classfield_cli::commands::{self, Format, Report, EXIT_FAILED, EXIT_INVALID};

/// Ray class groups of imaginary quadratic orders and their invariants.
#[derive(Parser, Debug)]
#[command(name = "classfield", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for randomised checks.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Target {
    /// Discriminant of the order (negative, 0 or 1 mod 4).
    #[arg(long, allow_hyphen_values = true)]
    disc: i64,

    /// Level N.
    #[arg(long, default_value_t = 1)]
    level: i64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Class representatives, multiplication table and invariant factors.
    Classgroup {
        #[command(flatten)]
        target: Target,
        /// Also build the ideal-side group with at least this norm bound and print the dictionary.
        #[arg(long)]
        norm_bound: Option<i64>,
    },
    /// Minimal polynomial of g_{O,N}(C0) with integer recognition.
    Minpoly {
        #[command(flatten)]
        target: Target,
        /// Target decimal digits.
        #[arg(long, default_value_t = 700)]
        digits: usize,
        /// Precision doublings allowed after a failed recognition.
        #[arg(long, default_value_t = 4)]
        max_escalations: usize,
    },
    /// L'(0, chi) for the characters of the ray class group.
    Lderiv {
        #[command(flatten)]
        target: Target,
        /// 1-based character index; all characters when omitted.
        #[arg(long)]
        character: Option<usize>,
        #[arg(long, default_value_t = 60)]
        digits: usize,
    },
    /// Orders of the Cartan-type subgroups of GL2(Z/N).
    Cartan {
        #[command(flatten)]
        target: Target,
    },
    /// Values f(C) of a Fricke family over all classes.
    Invariants {
        #[command(flatten)]
        target: Target,
        /// One of siegel, fricke, j.
        #[arg(long, default_value = "siegel")]
        family: String,
        /// Index entries as rationals, e.g. `--index 1/3 2/3`; defaults to [0, 1/N].
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        index: Option<Vec<String>>,
        #[arg(long, default_value_t = 60)]
        digits: usize,
    },
    /// Run a verification battery: small, paper or full.
    Verify {
        battery: String,
        /// Digits for the polynomial reconstruction.
        #[arg(long, default_value_t = 700)]
        digits: usize,
    },
}

fn dispatch(cli: &Cli) -> classfield::Result<Report> {
    match &cli.command {
        Command::Classgroup { target, norm_bound } => commands::classgroup(target.disc, target.level, *norm_bound),
        Command::Minpoly { target, digits, max_escalations } => {
            let policy = PrecisionPolicy { max_escalations: *max_escalations, ..PrecisionPolicy::new(*digits) };
            commands::minpoly(target.disc, target.level, &policy)
        }
        Command::Lderiv { target, character, digits } => {
            let idx = match character {
                Some(0) => return Err(Error::Domain("character indices start at 1".into())),
                Some(c) => Some(c - 1),
                None => None,
            };
            commands::lderiv(target.disc, target.level, idx, *digits)
        }
        Command::Cartan { target } => commands::cartan(target.disc, target.level),
        Command::Invariants { target, family, index, digits } => {
            let index = index.as_ref().map(|v| (v[0].clone(), v[1].clone()));
            commands::invariants(target.disc, target.level, family, index, *digits)
        }
        Command::Verify { battery, digits } => commands::verify(battery, cli.seed, *digits),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CLASSFIELD_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            log::warn!("thread pool: {e}");
        }
    }
    log::info!("{:?}", cli.command);
    match dispatch(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(report.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Domain(_) | Error::Format(_) => EXIT_INVALID,
                _ => EXIT_FAILED,
            };
            ExitCode::from(code as u8)
        }
    }
}
