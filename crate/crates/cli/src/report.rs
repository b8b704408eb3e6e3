//! JSON and CSV shapes of the command outputs.
//!
//! Big integers are written as JSON numbers with every digit; non-finite
//! floats become `null`.

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

/// The recurrence as given, with `A` and `B` in canonical form.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SpecEcho {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    pub l: usize,
    pub k: usize,
    pub n: Option<usize>,
    /// Present when `--auto-reduce` divided `(l, k)` by their gcd.
    pub reduction: Option<Reduction>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Reduction {
    pub factor: usize,
    pub l: usize,
    pub k: usize,
    /// Index into the reduced sequence; `null` when the term vanishes.
    pub n: Option<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RoundingInfo {
    pub exact: bool,
    pub max_rel_err: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct GenReport {
    pub command: String,
    pub spec: SpecEcho,
    pub mode: String,
    pub degree: isize,
    /// Lowest power first; integers in exact mode, `{re, im}` in float mode.
    pub coefficients: Vec<Value>,
    pub text: String,
    pub rounding: Option<RoundingInfo>,
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct GRoots {
    pub values: Vec<f64>,
    pub certified: bool,
    pub method: String,
    pub warning: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct GpolyReport {
    pub command: String,
    pub l: usize,
    pub k: usize,
    pub n: usize,
    pub degree: isize,
    pub coefficients: Vec<Number>,
    pub lattice: Vec<[usize; 2]>,
    pub roots: Option<GRoots>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RootRow {
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub residual: Option<f64>,
    pub multiplicity: usize,
    pub near_ab_zero: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RootsReport {
    pub command: String,
    pub spec: SpecEcho,
    pub mode: String,
    pub degree: isize,
    pub converged: bool,
    pub roots: Vec<RootRow>,
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct VerdictRow {
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub residual: Option<f64>,
    pub im_abs: Option<f64>,
    pub signed_value: Option<f64>,
    pub near_ab_zero: bool,
    pub on_curve: bool,
    pub status: String,
    /// Nearest negative root of `G_{l,k,n}` and its relative distance.
    pub g_root: Option<f64>,
    pub g_rel_err: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummaryInfo {
    pub total: usize,
    pub on_curve_count: usize,
    pub excluded_count: usize,
    pub failed_count: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub spec: SpecEcho,
    pub mode: String,
    pub degree: isize,
    pub converged: bool,
    pub roots: Vec<VerdictRow>,
    pub summary: SummaryInfo,
    pub warnings: Vec<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CurveReport {
    pub command: String,
    pub spec: SpecEcho,
    pub kind: String,
    /// `[x0, y0, x1, y1]`
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
    pub grid: usize,
    pub point_count: usize,
    /// Polylines of `[re, im]` points.
    pub segments: Vec<Vec<[f64; 2]>>,
    pub warnings: Vec<String>,
}

pub(crate) fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
