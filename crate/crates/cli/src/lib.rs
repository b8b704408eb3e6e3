//! Command-line front end: generation, root finding, verification, curve
//! tracing and plotting for `P_n + B P_{n-l} + A P_{n-k} = 0`.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a root off the curve,
//! 2 on usage, parse, numeric-domain or I/O errors.

pub mod args;
pub mod report;
pub mod svg;

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::Parser;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;
use serde_json::{json, Number, Value};
use tran_core::contour::{trace_curve, BoxRegion, CurveSegments};
use tran_core::curve::{im_field, near_ab_zero, trace_bkw, trace_tran};
use tran_core::gpoly::{g_poly, real_negative_roots, Certificate, DEFAULT_ROOT_TOL};
use tran_core::parse::{format_poly, parse_poly};
use tran_core::poly::Rounding;
use tran_core::recurrence::{nth_term, reduce_spec, RecurrenceSpec};
use tran_core::rootfind::Root;
use tran_core::verify::{term_roots_exact, term_roots_float, verify_exact, verify_float, RootStatus, TermRoots};
use tran_core::{ComplexPoly, IntPoly, Poly, ToleranceConfig};

use args::{Cli, Command, CurveArgs, CurveKind, GenArgs, GpolyArgs, ModeArg, PlotArgs, RootsArgs, SpecArgs, TolArgs};
use report::*;

/// Run with the process's standard streams. `argv` excludes the program name.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run_with(argv, &mut out, &mut err)
}

/// [`run`] writing to the given streams.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("tran")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(output) => {
            for w in &output.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            if let Err(e) = output.deliver(out) {
                let _ = writeln!(err, "error: {e:#}");
                return 2;
            }
            output.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

struct Output {
    body: String,
    path: Option<std::path::PathBuf>,
    warnings: Vec<String>,
    code: i32,
}

impl Output {
    fn deliver(&self, out: &mut dyn Write) -> Result<()> {
        match &self.path {
            Some(p) => std::fs::write(p, &self.body).with_context(|| format!("cannot write {}", p.display())),
            None => out.write_all(self.body.as_bytes()).context("cannot write to standard output"),
        }
    }
}

fn execute(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Gpoly(a) => gpoly(a),
        Command::Roots(a) => roots(a),
        Command::Verify(a) => verify(a),
        Command::Curve(a) => curve(a),
        Command::Plot(a) => plot(a),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn config(tol: &TolArgs) -> Result<ToleranceConfig> {
    let mut cfg = ToleranceConfig::default();
    if let Some(t) = tol.tol {
        cfg.curve_im_tol = t;
    }
    if let Some(e) = tol.eps_ab {
        cfg.ab_exclusion_eps = e;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// A parsed, validated recurrence, possibly reduced by `gcd(l, k)`.
struct Problem {
    a: Poly,
    b: Poly,
    ell: usize,
    k: usize,
    factor: usize,
    exact: bool,
    echo: SpecEcho,
}

impl Problem {
    fn new(s: &SpecArgs, n: Option<usize>) -> Result<Problem> {
        let a = parse_poly(&s.a).with_context(|| format!("in --A `{}`", s.a))?;
        let b = parse_poly(&s.b).with_context(|| format!("in --B `{}`", s.b))?;
        let integer = matches!((&a, &b), (Poly::Int(_), Poly::Int(_)));
        let exact = match s.mode {
            Some(ModeArg::Exact) if !integer => bail!("--mode exact needs integer coefficients in A and B"),
            Some(m) => m == ModeArg::Exact,
            None => integer,
        };
        let factor = s.ell.gcd(&s.k);
        if factor > 1 && !s.auto_reduce {
            bail!(
                "(l, k) = ({}, {}) are not coprime (gcd {factor}); pass --auto-reduce to use the reduced \
                 recurrence, whose term m is term {factor}m of this one",
                s.ell,
                s.k
            );
        }
        let (ell, k) = if factor > 1 { (s.ell / factor, s.k / factor) } else { (s.ell, s.k) };
        let reduction = (factor > 1).then(|| Reduction { factor, l: ell, k, n: n.and_then(|n| (n % factor == 0).then(|| n / factor)) });
        let echo = SpecEcho { a: format_poly(&a), b: format_poly(&b), l: s.ell, k: s.k, n, reduction };
        let p = Problem { a, b, ell, k, factor, exact, echo };
        // validate the shifts and polynomials up front
        if p.exact {
            p.exact_spec()?;
        } else {
            p.float_spec()?;
        }
        Ok(p)
    }

    fn mode(&self) -> String {
        if self.exact { "exact" } else { "float" }.into()
    }

    fn int_parts(&self) -> Option<(IntPoly, IntPoly)> {
        match (&self.a, &self.b) {
            (Poly::Int(a), Poly::Int(b)) => Some((a.clone(), b.clone())),
            _ => None,
        }
    }

    fn exact_spec(&self) -> Result<RecurrenceSpec<BigInt>> {
        let (a, b) = self.int_parts().context("exact mode needs integer coefficients")?;
        Ok(reduce_spec(a, b, self.ell * self.factor, self.k * self.factor)?.0)
    }

    fn float_spec(&self) -> Result<RecurrenceSpec<Complex64>> {
        let (a, b) = self.complex_ab()?;
        Ok(reduce_spec(a, b, self.ell * self.factor, self.k * self.factor)?.0)
    }

    fn complex_ab(&self) -> Result<(ComplexPoly, ComplexPoly)> {
        Ok((self.a.to_complex()?, self.b.to_complex()?))
    }

    /// Index into the (reduced) sequence, `None` when the term vanishes.
    fn index(&self, n: usize) -> Option<usize> {
        n.is_multiple_of(self.factor).then(|| n / self.factor)
    }

    fn zero_warning(&self, n: usize) -> String {
        format!("P_{n} is the zero polynomial: {} does not divide {n}", self.factor)
    }

    /// Float mode on integer input: warn when the exact terms do not fit in doubles.
    fn float_rounding_warning(&self, m: usize) -> Result<Option<String>> {
        if self.exact || self.int_parts().is_none() {
            return Ok(None);
        }
        let p = nth_term(&self.exact_spec()?, m);
        Ok(rounding_warning(p.to_complex().ok().map(|(_, r)| r), "float mode generates them in doubles"))
    }

    /// Roots of term `n`; `None` for the zero polynomial.
    fn roots(&self, n: usize, cfg: &ToleranceConfig) -> Result<Option<TermRoots>> {
        let Some(m) = self.index(n) else { return Ok(None) };
        Ok(Some(if self.exact {
            term_roots_exact(&self.exact_spec()?, m, cfg)?
        } else {
            term_roots_float(&self.float_spec()?, m, cfg)?
        }))
    }
}

fn rounding_warning(r: Option<Rounding>, what: &str) -> Option<String> {
    match r {
        Some(r) if r.exact => None,
        Some(r) => Some(format!(
            "P_n coefficients exceed 2^53 (max relative rounding {:.3e}); {what}",
            r.max_rel_err
        )),
        None => Some(format!("P_n coefficients overflow double precision; {what}")),
    }
}

fn gen(args: &GenArgs) -> Result<Output> {
    let p = Problem::new(&args.spec, Some(args.n))?;
    let mut warnings = Vec::new();
    let (degree, coefficients, text, rounding) = match p.index(args.n) {
        None => {
            warnings.push(p.zero_warning(args.n));
            (-1, Vec::new(), "0".to_string(), None)
        }
        Some(m) if p.exact => {
            let t = nth_term(&p.exact_spec()?, m);
            let rounding = t.to_complex().ok().map(|(_, r)| r);
            let coeffs = t.coeffs().iter().map(|c| Ok(Value::Number(c.to_string().parse::<Number>()?))).collect::<Result<_>>()?;
            let info = RoundingInfo { exact: rounding.is_some_and(|r| r.exact), max_rel_err: rounding.and_then(|r| finite(r.max_rel_err)) };
            (t.degree(), coeffs, format_poly(&Poly::Int(t)), Some(info))
        }
        Some(m) => {
            warnings.extend(p.float_rounding_warning(m)?);
            let t = nth_term(&p.float_spec()?, m);
            let coeffs = t.coeffs().iter().map(|c| json!({ "re": finite(c.re), "im": finite(c.im) })).collect();
            (t.degree(), coeffs, format_poly(&Poly::Complex(t)), None)
        }
    };
    let report = GenReport { command: "gen".into(), spec: p.echo.clone(), mode: p.mode(), degree, coefficients, text, rounding, warnings: warnings.clone() };
    Ok(Output { body: to_json(&report)?, path: args.out.clone(), warnings, code: 0 })
}

fn gpoly(args: &GpolyArgs) -> Result<Output> {
    let g = g_poly(args.ell, args.k, args.n)?;
    let mut warnings = Vec::new();
    let roots = if !args.roots {
        None
    } else if g.coeffs.degree() < 1 {
        Some(GRoots { values: Vec::new(), certified: true, method: "none".into(), warning: None })
    } else {
        let r = real_negative_roots(&g, DEFAULT_ROOT_TOL)?;
        warnings.extend(r.warning.clone());
        let method = match r.method {
            Certificate::SignChanges => "sign_changes",
            Certificate::Sturm => "sturm",
            Certificate::Floating => "floating",
        };
        Some(GRoots { values: r.roots, certified: r.certified, method: method.into(), warning: r.warning })
    };
    let report = GpolyReport {
        command: "gpoly".into(),
        l: args.ell,
        k: args.k,
        n: args.n,
        degree: g.coeffs.degree(),
        coefficients: g.coeffs.coeffs().iter().map(|c| c.to_string().parse::<Number>()).collect::<Result<_, _>>()?,
        lattice: g.lattice.solutions.iter().map(|&(i, j)| [i, j]).collect(),
        roots,
    };
    Ok(Output { body: to_json(&report)?, path: args.out.clone(), warnings, code: 0 })
}

fn root_row(r: &Root, a: &ComplexPoly, b: &ComplexPoly, cfg: &ToleranceConfig) -> RootRow {
    RootRow {
        re: finite(r.value.re),
        im: finite(r.value.im),
        residual: finite(r.residual),
        multiplicity: r.multiplicity_hint,
        near_ab_zero: near_ab_zero(a, b, r.value, cfg.ab_exclusion_eps),
    }
}

const ROOT_COLUMNS: [&str; 5] = ["re", "im", "residual", "multiplicity", "near_ab_zero"];
const VERDICT_COLUMNS: [&str; 10] =
    ["re", "im", "residual", "im_abs", "signed_value", "near_ab_zero", "on_curve", "status", "g_root", "g_rel_err"];

fn roots(args: &RootsArgs) -> Result<Output> {
    let p = Problem::new(&args.spec, Some(args.n))?;
    let cfg = config(&args.tol)?;
    let (a, b) = p.complex_ab()?;
    let mut warnings = Vec::new();
    let (degree, converged, rows) = match p.roots(args.n, &cfg)? {
        None => {
            warnings.push(p.zero_warning(args.n));
            (-1, true, Vec::new())
        }
        Some(t) => {
            if p.exact {
                warnings.extend(rounding_warning(t.rounding, "roots were polished without rounded coefficients"));
            } else {
                warnings.extend(p.float_rounding_warning(p.index(args.n).unwrap_or(0))?);
            }
            let mut rows: Vec<RootRow> = t.all().map(|r| root_row(r, &a, &b, &cfg)).collect();
            rows.sort_by(|x, y| key(x.re, x.im).partial_cmp(&key(y.re, y.im)).unwrap_or(std::cmp::Ordering::Equal));
            (t.degree, t.converged, rows)
        }
    };
    if !converged {
        warnings.push("root finding did not converge for every root".into());
    }
    let body = if args.csv {
        to_csv(&rows, &ROOT_COLUMNS)?
    } else {
        to_json(&RootsReport { command: "roots".into(), spec: p.echo.clone(), mode: p.mode(), degree, converged, roots: rows, warnings: warnings.clone() })?
    };
    Ok(Output { body, path: args.out.clone(), warnings, code: 0 })
}

fn key(re: Option<f64>, im: Option<f64>) -> (f64, f64) {
    (re.unwrap_or(f64::INFINITY), im.unwrap_or(f64::INFINITY))
}

/// Build the `verify` report without writing it.
pub fn run_report(args: &RootsArgs) -> Result<RunReport> {
    let p = Problem::new(&args.spec, Some(args.n))?;
    let cfg = config(&args.tol)?;
    let Some(m) = p.index(args.n) else {
        return Ok(RunReport {
            command: "verify".into(),
            spec: p.echo.clone(),
            mode: p.mode(),
            degree: -1,
            converged: true,
            roots: Vec::new(),
            summary: SummaryInfo { total: 0, on_curve_count: 0, excluded_count: 0, failed_count: 0 },
            warnings: vec![p.zero_warning(args.n)],
        });
    };
    let mut warnings = Vec::new();
    let v = if p.exact {
        verify_exact(&p.exact_spec()?, m, &cfg)?
    } else {
        warnings.extend(p.float_rounding_warning(m)?);
        verify_float(&p.float_spec()?, m, &cfg)?
    };
    warnings.extend(v.warnings.iter().cloned());
    if !v.converged {
        warnings.push("root finding did not converge for every root".into());
    }
    let roots = v
        .roots
        .iter()
        .map(|r| VerdictRow {
            re: finite(r.root.value.re),
            im: finite(r.root.value.im),
            residual: finite(r.root.residual),
            im_abs: finite(r.membership.im_abs),
            signed_value: finite(r.membership.signed_value),
            near_ab_zero: r.membership.near_ab_zero,
            on_curve: r.membership.on_curve,
            status: match r.status {
                RootStatus::OnCurve => "on_curve",
                RootStatus::Excluded => "excluded",
                RootStatus::Failed => "failed",
            }
            .into(),
            g_root: r.g_match.and_then(|g| finite(g.tau)),
            g_rel_err: r.g_match.and_then(|g| finite(g.rel_err)),
        })
        .collect();
    let s = v.summary;
    Ok(RunReport {
        command: "verify".into(),
        spec: p.echo.clone(),
        mode: p.mode(),
        degree: v.degree,
        converged: v.converged,
        roots,
        summary: SummaryInfo { total: s.total, on_curve_count: s.on_curve_count, excluded_count: s.excluded_count, failed_count: s.failed_count },
        warnings,
    })
}

fn verify(args: &RootsArgs) -> Result<Output> {
    let report = run_report(args)?;
    let body = if args.csv { to_csv(&report.roots, &VERDICT_COLUMNS)? } else { to_json(&report)? };
    let code = if report.summary.failed_count > 0 { 1 } else { 0 };
    Ok(Output { body, path: args.out.clone(), warnings: report.warnings, code })
}

/// Default box: a square of half-width 1.1 max|root| around the origin.
fn box_around(roots: &[Complex64]) -> Result<BoxRegion> {
    let r = roots.iter().map(|z| z.norm()).filter(|x| x.is_finite()).fold(0.0, f64::max);
    if r == 0.0 {
        bail!("P_n has no nonzero roots to frame; pass --box");
    }
    Ok(BoxRegion::square(1.1 * r)?)
}

fn trace(p: &Problem, kind: CurveKind, bbox: BoxRegion, grid: usize, cfg: &ToleranceConfig) -> Result<CurveSegments> {
    let (a, b) = p.complex_ab()?;
    Ok(match kind {
        CurveKind::Im => trace_curve(im_field(&a, &b, p.ell, p.k), bbox, grid, grid)?,
        CurveKind::Tran => {
            if p.ell != 1 {
                bail!("--kind tran needs l = 1 (got l = {})", p.ell);
            }
            trace_tran(&a, &b, p.k, bbox, grid, grid, cfg)?
        }
        CurveKind::Bkw => {
            let mut q = vec![ComplexPoly::zero(); p.k];
            q[p.ell - 1] = b;
            q[p.k - 1] = a;
            trace_bkw(&q, bbox, grid, grid, cfg)?
        }
    })
}

fn root_values(p: &Problem, n: usize, cfg: &ToleranceConfig, warnings: &mut Vec<String>) -> Result<Vec<Complex64>> {
    match p.roots(n, cfg)? {
        None => {
            warnings.push(p.zero_warning(n));
            Ok(Vec::new())
        }
        Some(t) => {
            if !t.converged {
                warnings.push("root finding did not converge for every root".into());
            }
            Ok(t.all().map(|r| r.value).collect())
        }
    }
}

fn curve(args: &CurveArgs) -> Result<Output> {
    let p = Problem::new(&args.spec, args.n)?;
    let cfg = config(&args.tol)?;
    let mut warnings = Vec::new();
    let bbox = match (args.bbox, args.n) {
        (Some(b), _) => b,
        (None, Some(n)) => box_around(&root_values(&p, n, &cfg, &mut warnings)?)?,
        (None, None) => bail!("curve needs --box or --n"),
    };
    let c = trace(&p, args.kind, bbox, args.grid, &cfg)?;
    let report = CurveReport {
        command: "curve".into(),
        spec: p.echo.clone(),
        kind: args.kind.name().into(),
        bbox: [bbox.re_min, bbox.im_min, bbox.re_max, bbox.im_max],
        grid: args.grid,
        point_count: c.point_count(),
        segments: c.segments.iter().map(|l| l.iter().map(|z| [z.re, z.im]).collect()).collect(),
        warnings: warnings.clone(),
    };
    Ok(Output { body: to_json(&report)?, path: args.out.clone(), warnings, code: 0 })
}

/// Curve and roots shown by `plot`.
#[derive(Clone, Debug)]
pub struct PlotScene {
    pub curve: CurveSegments,
    pub roots: Vec<Complex64>,
    pub warnings: Vec<String>,
}

/// Compute the `plot` scene without rendering it.
pub fn plot_scene(args: &PlotArgs) -> Result<PlotScene> {
    let p = Problem::new(&args.spec, Some(args.n))?;
    let cfg = config(&args.tol)?;
    let mut warnings = Vec::new();
    let roots = root_values(&p, args.n, &cfg, &mut warnings)?;
    let bbox = match args.bbox {
        Some(b) => b,
        None => box_around(&roots)?,
    };
    let curve = trace(&p, args.kind, bbox, args.grid, &cfg)?;
    Ok(PlotScene { curve, roots, warnings })
}

fn plot(args: &PlotArgs) -> Result<Output> {
    let scene = plot_scene(args)?;
    let body = svg::render_svg(&scene.curve, &scene.roots);
    Ok(Output { body, path: args.out.clone(), warnings: scene.warnings, code: 0 })
}

/// Write an SVG of `scene` to `path`.
pub fn write_scene(scene: &PlotScene, path: &Path) -> std::io::Result<()> {
    svg::emit_svg(&scene.curve, &scene.roots, path)
}
