use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Build, evaluate and verify real solutions of second-order PDEs in the
/// plane from complex characteristics.
#[derive(Debug, Clone, Parser)]
#[command(name = "harmonic", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for randomly sampled points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate an expression in z at given or sampled points.
    Eval(EvalArgs),
    /// General solution F(first characteristic) + G(second) of a principal operator.
    Solve(SolveArgs),
    /// Factor the principal part of an operator and print the roots.
    Factor(FactorArgs),
    /// Particular solution of (dx - j*dy) u = G(y - j*x).
    Particular(ParticularArgs),
    /// Finite-difference verification of a field against an operator.
    Verify(VerifyArgs),
    /// Stream function of the semi-infinite bay.
    Bay(BayArgs),
    /// Solution Re[F(y + x) + G(y - x)] of dxx - dyy.
    Wave(WaveArgs),
}

/// Options shared by every subcommand that runs the finite-difference oracle.
#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Grid levels: 1 checks the tolerance only, 2 also estimates the order.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub levels: u8,

    /// Multiplier of the h^2 tolerance.
    #[arg(long, default_value_t = 10.0)]
    pub tau_factor: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Expression in z.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: String,

    /// Constant point such as "1 + 2*j"; repeatable.
    #[arg(long = "at", allow_hyphen_values = true)]
    pub at: Vec<String>,

    /// Additionally sample this many points uniformly in [-1,1]^2.
    #[arg(long, default_value_t = 0)]
    pub random: usize,

    /// Also evaluate the symbolic derivative.
    #[arg(long)]
    pub diff: bool,

    /// CSV output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Operator, e.g. "dxx + dyy".
    #[arg(long, allow_hyphen_values = true)]
    pub op: String,

    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub f: String,

    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub g: String,

    /// Take the real part (default).
    #[arg(long, conflicts_with = "complex")]
    pub real: bool,

    /// Keep the complex value.
    #[arg(long)]
    pub complex: bool,

    /// Grid "x0:x1:nx,y0:y1:ny".
    #[arg(long, default_value = "0:1:17,0:1:17", allow_hyphen_values = true)]
    pub grid: String,

    /// CSV output of the field on the grid.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Run the finite-difference oracle.
    #[arg(long)]
    pub verify: bool,

    /// JSON report path; implies --verify.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Accept non-holomorphic F and G and let the oracle judge.
    #[arg(long)]
    pub unchecked: bool,

    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FactorArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub op: String,

    /// JSON output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ParticularArgs {
    /// Right-hand side G.
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,

    /// Homogeneous part F, added as F(y + j*x).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub fhom: String,

    /// Simpson panels per unit length.
    #[arg(long, default_value_t = 64)]
    pub panels: usize,

    /// Leg order: x-then-y or y-then-x.
    #[arg(long, default_value = "x-then-y")]
    pub path: String,

    /// Base point "x,y" where the particular solution vanishes.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub base: String,

    /// Integrate numerically even for polynomial G.
    #[arg(long)]
    pub numeric: bool,

    #[arg(long, default_value = "-1:1:21,-1:1:21", allow_hyphen_values = true)]
    pub grid: String,

    /// CSV `x,y,a,b,residual_re,residual_im`.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// JSON residual summary; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub op: String,

    /// "EXPR @ SUBST" with SUBST one of y+j*x, y-j*x, y+x, y-x; or `bay`, `bay:N`.
    #[arg(long, allow_hyphen_values = true)]
    pub field: String,

    #[arg(long, default_value = "0:1:17,0:1:17", allow_hyphen_values = true)]
    pub grid: String,

    /// Verify the real part of the field.
    #[arg(long)]
    pub real: bool,

    /// Accept a non-holomorphic expression.
    #[arg(long)]
    pub unchecked: bool,

    /// Wavenumber of the field for the tolerance; named examples supply their own.
    #[arg(long)]
    pub wavenumber: Option<f64>,

    /// JSON report path; stdout when omitted.
    #[arg(long)]
    pub json: Option<PathBuf>,

    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BayArgs {
    /// Mode number.
    #[arg(long, default_value_t = 1)]
    pub n: u32,

    /// Channel width.
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,

    /// Truncation of the semi-infinite domain; 3h when omitted.
    #[arg(long)]
    pub xmax: Option<f64>,

    /// Amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,

    /// Grid; the interior [0.05, xmax] x [0.05, h - 0.05] with 33 nodes per side when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,

    /// CSV `x,y,psi,vx,vy`.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub verify: bool,

    /// JSON report path; implies --verify.
    #[arg(long)]
    pub report: Option<PathBuf>,

    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WaveArgs {
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub f: String,

    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub g: String,

    /// Unequal steps by default: with hx == hy the discrete operator is exact
    /// on travelling waves and no order can be observed.
    #[arg(long, default_value = "0:1:33,0:1:25", allow_hyphen_values = true)]
    pub grid: String,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub verify: bool,

    #[arg(long)]
    pub report: Option<PathBuf>,

    #[command(flatten)]
    pub oracle: OracleArgs,
}
