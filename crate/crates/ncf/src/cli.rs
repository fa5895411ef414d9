//! Command-line grammar.

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::formats::Format;

#[derive(Debug, Parser)]
#[command(name = "ncf", version, about = "N-continued fractions: expansions, measures, operators and experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// The parameter N (at least 1).
    #[arg(long = "n", global = true)]
    pub n: Option<u64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Initial working precision in bits [env: NCF_PRECISION] [default: 256].
    #[arg(long, value_parser = clap::value_parser!(u32).range(64..), global = true)]
    pub precision: Option<u32>,
    /// Precision cap in bits; digit extraction doubles the precision up to it.
    #[arg(long, default_value_t = 16384, value_parser = clap::value_parser!(u32).range(64..), global = true)]
    pub max_precision: u32,
    /// Seed of the random source.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Number of grid cells on [0, 1].
    #[arg(long, default_value_t = 4096, global = true)]
    pub grid: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Digits, convergents and approximation errors of x.
    Expand(ExpandArgs),
    /// Value of a finite expansion with an optional tail.
    Eval(EvalArgs),
    /// Convergent table and determinants of a digit string.
    Convergents(DigitsArgs),
    /// Fundamental interval of a digit string.
    Cylinder(CylinderArgs),
    /// Legendre-type test: is p/q a convergent of x?
    Legendre(LegendreArgs),
    /// Invariant measure, digit laws and the Broden-Borel-Levy formula.
    Measure(MeasureArgs),
    /// Invariant density by power iteration, and the Gauss-Kuzmin experiment.
    Density(DensityArgs),
    /// Transfer operators and their contraction properties.
    Operator(OperatorArgs),
    /// Seeded simulations.
    Simulate(SimulateArgs),
    /// Natural extension on the unit square.
    Natext(NatextArgs),
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// A rational (`3/7`, `0.25`) or an expression such as `(sqrt(15)-3)/2`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct DigitsArgs {
    /// Comma-separated digits, each at least N.
    #[arg(long, allow_hyphen_values = true)]
    pub digits: String,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub digits: DigitsArgs,
    /// Rational tail t in [0, 1).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub tail: String,
}

#[derive(Debug, Args)]
pub struct CylinderArgs {
    #[command(flatten)]
    pub digits: DigitsArgs,
    /// Optional point to test for membership.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
}

#[derive(Debug, Args)]
pub struct LegendreArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(subcommand)]
    pub command: MeasureCommand,
}

#[derive(Debug, Subcommand)]
pub enum MeasureCommand {
    /// G_N([a, b]) and the certified measure of its preimage.
    Interval {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Half-width of the preimage certificate.
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Invariant density at x.
    Density {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Laws of the digit i: Lebesgue, stationary and conditional on a state.
    Digit {
        #[arg(long)]
        i: u64,
        /// State s of the digit chain (defaults to 0).
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        /// Digit history whose state s_n is used instead of --s.
        #[arg(long, allow_hyphen_values = true)]
        history: Option<String>,
    },
    /// Conditional distribution of T^n x given the first n digits.
    Bbl {
        #[arg(long, allow_hyphen_values = true)]
        history: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct DensityArgs {
    #[command(subcommand)]
    pub command: Option<DensityCommand>,
    /// Stop when successive iterates differ by less than this in L1.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Debug, Subcommand)]
pub enum DensityCommand {
    /// Deviation of lambda(T^-n [0, x]) from G_N([0, x]) per n.
    Gk {
        /// Comma-separated probes in [0, 1].
        #[arg(long, default_value = "0.5")]
        x: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[command(flatten)]
        series: SeriesArgs,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SeriesArgs {
    /// Truncation tolerance for series over the branches.
    #[arg(long, default_value_t = 1e-12)]
    pub series_tol: f64,
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    #[command(subcommand)]
    pub command: OperatorCommand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorKind {
    U,
    K,
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityKind {
    /// k_N/(x+N).
    Rho,
    /// The constant 1.
    One,
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// Polynomial coefficients c0,c1,... of f(x) = c0 + c1 x + ...
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub poly: String,
    /// Use 1/(x+c) instead of the polynomial.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "poly")]
    pub recip_shift: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum OperatorCommand {
    /// Apply U, K or S (with density h) `power` times to f.
    Apply {
        #[arg(long, value_enum)]
        op: OperatorKind,
        #[arg(long, default_value_t = 1)]
        power: usize,
        /// Density h for S.
        #[arg(long, value_enum, default_value_t = DensityKind::Rho)]
        h: DensityKind,
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// var(Uf) against var(f)/(N+1) for monotone f.
    Variation {
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// s(Uf) against q s(f).
    Lipschitz {
        #[command(flatten)]
        f: FunctionArgs,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// The Lipschitz contraction constant q(N).
    Q {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub command: SimulateCommand,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Runs of the digit chain started from s = 0.
    Digits {
        #[arg(long)]
        samples: u64,
        /// Length of each run.
        #[arg(long, default_value_t = 1)]
        steps: usize,
        /// Largest digit tabulated in the summary (default N+15).
        #[arg(long)]
        max_digit: Option<u64>,
        /// Print only the summary.
        #[arg(long)]
        summary_only: bool,
    },
    /// Exact orbit of the natural extension.
    Natext {
        #[arg(long)]
        steps: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
}

#[derive(Debug, Args)]
pub struct NatextArgs {
    #[command(subcommand)]
    pub command: NatextCommand,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
}

#[derive(Debug, Subcommand)]
pub enum NatextCommand {
    /// Image of (x, y) under the natural extension.
    Forward(PointArgs),
    /// Preimage of (x, y).
    Inverse(PointArgs),
    /// The inverse branch N/(y+i).
    Branch {
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        i: u64,
    },
    /// Extended digit a_l of (x, y).
    Digit {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
    },
    /// Extended measure of a rectangle and of its preimage.
    Rect {
        #[arg(long, allow_hyphen_values = true)]
        x1: String,
        #[arg(long, allow_hyphen_values = true)]
        x2: String,
        #[arg(long, allow_hyphen_values = true)]
        y1: String,
        #[arg(long, allow_hyphen_values = true)]
        y2: String,
    },
    /// Law of x given the backward digits of y, against the limit law.
    Conditional {
        /// Backward digits a_0, a_-1, ...
        #[arg(long, allow_hyphen_values = true)]
        history: String,
        #[arg(long, default_value = "0.25,0.5,0.75")]
        x: String,
        #[arg(long, default_value_t = 100000)]
        samples: u64,
    },
    /// Law of the next digit given the whole past, against V_{N,i}(y).
    Past {
        #[arg(long, default_value_t = 100000)]
        samples: u64,
        #[arg(long)]
        max_digit: Option<u64>,
    },
}
