use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "euler-series", version, about = "Root, power and logarithm series for Z(z) = 0")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Symbolic,
    Reversion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// z^2 = b^2 + c
    Sqrt,
    /// z^n = b^n + c
    NthRoot,
    /// z^3 = z - 1
    Cubic,
    /// z^lambda = a, series for z^n
    Power,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Trial value: integer, p/q or decimal.
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<String>,
    /// Truncation order K.
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    /// Exact rational arithmetic; fails if the input needs floats.
    #[arg(long)]
    pub exact: bool,
    /// Float precision in bits.
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u32).range(1..=1_000_000))]
    pub precision: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct Equation {
    /// Left-hand side Z(z) of Z(z) = 0.
    #[arg(long = "expr", allow_hyphen_values = true)]
    pub expr: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Series for the root.
    Root(Equation),
    /// Coefficients p, q, r, ... of the root series.
    Coeffs {
        #[command(flatten)]
        eq: Equation,
        #[arg(long, value_enum, default_value_t = Route::Symbolic)]
        route: Route,
    },
    /// Series for z^n.
    Power {
        #[command(flatten)]
        eq: Equation,
        /// Exponent: integer or p/q.
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// ln z = ln v + Omega.
    Log(Equation),
    /// Omega = ln z - ln v.
    Omega(Equation),
    /// Re-anchor repeatedly at the order-K partial sum.
    Refine {
        #[command(flatten)]
        eq: Equation,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
    },
    /// Series value next to Newton and bisection.
    Compare {
        #[command(flatten)]
        eq: Equation,
        /// Bisection bracket; bisection is skipped without it.
        #[arg(long, allow_hyphen_values = true, requires = "hi")]
        lo: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "lo")]
        hi: Option<String>,
        #[arg(long, default_value = "1e-30")]
        tol: String,
        #[arg(long = "max-iter", default_value_t = 100)]
        max_iter: usize,
    },
    /// Closed-form coefficient tables of the classic families.
    Family {
        #[arg(long, value_enum)]
        family: FamilyKind,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        /// Root index for nth-root, power exponent for power.
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Root(_) => "root",
            Command::Coeffs { .. } => "coeffs",
            Command::Power { .. } => "power",
            Command::Log(_) => "log",
            Command::Omega(_) => "omega",
            Command::Refine { .. } => "refine",
            Command::Compare { .. } => "compare",
            Command::Family { .. } => "family",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Root(eq) | Command::Log(eq) | Command::Omega(eq) => &eq.common,
            Command::Coeffs { eq, .. }
            | Command::Power { eq, .. }
            | Command::Refine { eq, .. }
            | Command::Compare { eq, .. } => &eq.common,
            Command::Family { common, .. } => common,
        }
    }
}
