mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ks-lab", version, about = "Exact Kac-Schwarz operator laboratory")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized trials.
    #[arg(long, global = true, default_value_t = ks_core::random::DEFAULT_SEED)]
    pub seed: u64,
    /// Truncation order (at least 4).
    #[arg(
        long,
        global = true,
        env = "KS_LAB_ORDER",
        default_value_t = 16,
        value_parser = clap::value_parser!(i64).range(4..)
    )]
    pub order: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Catalog data of a simple Lie algebra.
    Algebra {
        #[command(subcommand)]
        action: AlgebraCmd,
    },
    /// The blending correspondence.
    Blend {
        #[command(subcommand)]
        action: BlendCmd,
    },
    /// Scalar gauge fixing.
    Gauge {
        #[command(subcommand)]
        action: GaugeCmd,
    },
    /// Graded dressing of vector Grassmannian points.
    Dress {
        #[command(subcommand)]
        action: DressCmd,
    },
    /// Rigidity certificates for the deformation scalar.
    Rigidity {
        #[command(subcommand)]
        action: RigidityCmd,
    },
    /// Witt algebra relations.
    Witt {
        #[command(subcommand)]
        action: WittCmd,
    },
    /// The structural invariant suite.
    Selftest,
}

#[derive(Args, Debug, Clone)]
pub struct AlgebraArgs {
    /// Lie type, A or C.
    #[arg(long = "type", default_value = "A")]
    pub lie_type: String,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
}

#[derive(Subcommand, Debug)]
enum AlgebraCmd {
    Show(AlgebraArgs),
}

#[derive(Subcommand, Debug)]
enum BlendCmd {
    Verify {
        #[arg(long, default_value_t = 2)]
        h: i64,
    },
}

#[derive(Subcommand, Debug)]
enum GaugeCmd {
    Fix {
        #[arg(long, default_value_t = 2)]
        h: i64,
        /// Potential `f`, e.g. "z - 1/4 z^-2 + 3 z^-5".
        #[arg(long, allow_hyphen_values = true, required_unless_present = "operator", conflicts_with = "operator")]
        potential: Option<String>,
        /// Whole operator, e.g. "(1/2 z^-1) D + z - 1/4 z^-2".
        #[arg(long, allow_hyphen_values = true)]
        operator: Option<String>,
        /// Floor of the computation (defaults to -order).
        #[arg(long, allow_hyphen_values = true)]
        floor: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum DressCmd {
    /// Dress `∂ + H/z + Λ` with `H` in the Cartan subalgebra.
    Cartan {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Diagonal of `H`, comma separated.
        #[arg(long = "H", visible_alias = "diag", allow_hyphen_values = true)]
        diag: String,
    },
    /// The Witten-Kontsevich point.
    Wk {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        sign: i64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Rigid,
    Obstructed,
}

#[derive(Subcommand, Debug)]
enum RigidityCmd {
    Scan {
        #[command(flatten)]
        algebra: AlgebraArgs,
        /// Values of the deformation scalar, comma separated.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        star_list: String,
        /// Random gauge perturbations per value, in addition to `g = Λ`.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        /// Expected verdict for every item.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
}

#[derive(Subcommand, Debug)]
enum WittCmd {
    Check {
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
}

fn run(cli: Cli) -> Result<commands::Outcome, ks_core::KsError> {
    let cfg = &cli.config;
    match cli.command {
        Command::Algebra { action: AlgebraCmd::Show(a) } => commands::algebra_show(cfg, &a),
        Command::Blend { action: BlendCmd::Verify { h } } => commands::blend_verify(cfg, h),
        Command::Gauge {
            action: GaugeCmd::Fix { h, potential, operator, floor },
        } => {
            let input = match (potential, operator) {
                (Some(p), _) => commands::OperatorInput::Potential(p),
                (None, Some(o)) => commands::OperatorInput::Operator(o),
                (None, None) => unreachable!("clap requires one of them"),
            };
            commands::gauge_fix(cfg, h, &input, floor.unwrap_or(-cfg.order))
        }
        Command::Dress { action: DressCmd::Cartan { algebra, diag } } => commands::dress_cartan(cfg, &algebra, &diag),
        Command::Dress { action: DressCmd::Wk { algebra, sign } } => commands::dress_wk(cfg, &algebra, sign),
        Command::Rigidity {
            action: RigidityCmd::Scan { algebra, star_list, samples, expect },
        } => commands::rigidity_scan(cfg, &algebra, &star_list, samples, expect),
        Command::Witt { action: WittCmd::Check { bound } } => commands::witt_check(cfg, bound),
        Command::Selftest => commands::selftest(cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
