use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tran_core::contour::BoxRegion;

#[derive(Parser, Debug)]
#[command(
    name = "tran",
    version,
    about = "Terms of P_n + B P_{n-l} + A P_{n-k} = 0, their roots, and the curve Im(B^k / A^l) = 0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coefficients of P_n
    Gen(GenArgs),
    /// Lattice-path polynomial G_{l,k,n}, optionally with its roots
    Gpoly(GpolyArgs),
    /// Roots of P_n
    Roots(RootsArgs),
    /// Check every root of P_n against the curve; exits 1 on any failure
    Verify(VerifyArgs),
    /// Trace the curve, the l = 1 region, or the BKW curve
    Curve(CurveArgs),
    /// SVG of a traced curve together with the roots of P_n
    Plot(PlotArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    /// Im(B^k / A^l) = 0
    Im,
    /// The part of the l = 1 curve where 0 <= (-1)^k Re(B^k / A) <= k^k / (k-1)^(k-1)
    Tran,
    /// Points where the two largest roots of the symbol have equal modulus
    Bkw,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Im => "im",
            CurveKind::Tran => "tran",
            CurveKind::Bkw => "bkw",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Polynomial A, e.g. "z^3+z+1"
    #[arg(long = "A", value_name = "POLY", allow_hyphen_values = true)]
    pub a: String,
    /// Polynomial B, e.g. "z^2-2z+7"
    #[arg(long = "B", value_name = "POLY", allow_hyphen_values = true)]
    pub b: String,
    /// Shift of the B term
    #[arg(long = "l", value_name = "L")]
    pub ell: usize,
    /// Shift of the A term
    #[arg(long = "k", value_name = "K")]
    pub k: usize,
    /// Arithmetic; defaults to exact for integer A and B, float otherwise
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Divide (l, k) by their gcd instead of rejecting them
    #[arg(long)]
    pub auto_reduce: bool,
}

#[derive(Args, Debug, Clone)]
pub struct TolArgs {
    /// Relative tolerance on |Im(B^k / A^l)|
    #[arg(long, value_name = "TOL")]
    pub tol: Option<f64>,
    /// Relative threshold below which |A B| counts as a zero of A B
    #[arg(long = "eps-ab", value_name = "EPS")]
    pub eps_ab: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub n: usize,
    /// Write to this file instead of standard output
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GpolyArgs {
    #[arg(long = "l", value_name = "L")]
    pub ell: usize,
    #[arg(long = "k", value_name = "K")]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    /// Also compute and certify its (negative real) roots
    #[arg(long)]
    pub roots: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RootsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    /// Emit a CSV table instead of JSON
    #[arg(long)]
    pub csv: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub type VerifyArgs = RootsArgs;

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_enum, default_value = "im")]
    pub kind: CurveKind,
    /// Index whose roots set the default box
    #[arg(long)]
    pub n: Option<usize>,
    /// Box as x0,y0,x1,y1
    #[arg(long = "box", value_name = "X0,Y0,X1,Y1", value_parser = parse_box, allow_hyphen_values = true)]
    pub bbox: Option<BoxRegion>,
    /// Grid nodes per side
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PlotArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_enum, default_value = "im")]
    pub kind: CurveKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long = "box", value_name = "X0,Y0,X1,Y1", value_parser = parse_box, allow_hyphen_values = true)]
    pub bbox: Option<BoxRegion>,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    /// SVG file; standard output if omitted
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn parse_box(s: &str) -> Result<BoxRegion, String> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let [x0, y0, x1, y1] = v[..] else {
        return Err(format!("expected four numbers x0,y0,x1,y1, got {}", v.len()));
    };
    BoxRegion::new(x0, y0, x1, y1).map_err(|e| e.to_string())
}
