use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dualcurve::clairaut::{general_family, residual, singular_solution, ClairautProblem};
use dualcurve::convexity::young_gap;
use dualcurve::envelope::{envelope_of_family, verify_tangency, FamilyForm, LineFamily};
use dualcurve::io::{
    read_pl, read_points, read_rows, sidecar_path, to_json, transform_diagnostics, write_json,
    write_parametric, write_pl, write_rows, write_sampled,
};
use dualcurve::legendre::{
    catalog_names, polygon_dual, pl_dual, transform_analytic_grid, transform_inf, transform_integral,
    transform_sup, Method, SlopeInverse, TransformReport,
};
use dualcurve::lineforms::{convert, dual_point_map, from_general, to_general};
use dualcurve::numeric::{linspace, parse_grid, parse_interval};
use dualcurve::polepolar::{classify_position, pole_of_polar, pole_via_chords, pole_via_inversion, polar_of_pole};
use dualcurve::{
    run_suite, sample, ConicMatrix, ConvexPolygon, Error, Expression, Form, FormCoefficients,
    ParametricCurve, PiecewiseLinearFunction,
};

const DEFAULT_N: usize = 1025;

#[derive(Parser)]
#[command(name = "dualcurve", version, about = "Dual curves, Legendre transforms and line duality")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Legendre transform of y(x) on a slope grid.
    Transform {
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value = "x")]
        var: String,
        /// x-interval lo:hi
        #[arg(long, value_parser = interval, allow_hyphen_values = true)]
        domain: (f64, f64),
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        /// Slope grid lo:hi:n; defaults to the slope range with n points.
        #[arg(long, value_parser = grid, allow_hyphen_values = true)]
        mgrid: Option<(f64, f64, usize)>,
        /// Sample count for sup/inf.
        #[arg(long, default_value_t = DEFAULT_N, value_parser = count)]
        n: usize,
        /// Report the dual's end rays (sup/inf).
        #[arg(long)]
        end_rays: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Envelope of the line family y = m(k) x + b(k), or y = m(k) x - d(k).
    Envelope {
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long, conflicts_with = "d", required_unless_present = "d", allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        d: Option<String>,
        #[arg(long, default_value = "k")]
        var: String,
        #[arg(long, value_parser = interval, allow_hyphen_values = true)]
        kdomain: (f64, f64),
        #[arg(long, default_value_t = DEFAULT_N, value_parser = count)]
        n: usize,
        /// Also check tangency; exit 1 when a residual exceeds this.
        #[arg(long)]
        tangency_tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Clairaut's equation y = x y' + f(y').
    Clairaut {
        #[arg(value_enum, default_value_t = ClairautMode::Singular)]
        mode: ClairautMode,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value = "s")]
        var: String,
        #[arg(long, value_parser = interval, allow_hyphen_values = true)]
        tdomain: (f64, f64),
        #[arg(long, default_value_t = DEFAULT_N, value_parser = count)]
        n: usize,
        /// Constants C for the general solution, lo:hi:n.
        #[arg(long, value_parser = grid, allow_hyphen_values = true)]
        cs: Option<(f64, f64, usize)>,
        /// Curve (t,x,y CSV) to test in residual mode; defaults to the
        /// singular solution.
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Line forms and dual-space maps.
    Lines {
        #[command(subcommand)]
        cmd: LinesCmd,
    },
    /// Pole of a line with respect to a conic.
    Pole {
        /// parabola, circle, or A,B,C,D,E,F
        #[arg(long)]
        conic: String,
        /// Line as form:key=val,key=val
        #[arg(long, allow_hyphen_values = true)]
        line: String,
        #[arg(long, value_enum, default_value_t = PoleRoute::Matrix)]
        via: PoleRoute,
        /// Chord parameters a1,a2 for --via chords.
        #[arg(long, value_parser = pair, allow_hyphen_values = true)]
        chords: Option<(f64, f64)>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Polar line of a point with respect to a conic.
    Polar {
        #[arg(long)]
        conic: String,
        #[arg(long, value_parser = pair, allow_hyphen_values = true)]
        point: (f64, f64),
        /// Report the polar in this form instead of general a,b,c.
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whether a point is inside, on or outside a conic.
    Classify {
        #[arg(long)]
        conic: String,
        #[arg(long, value_parser = pair, allow_hyphen_values = true)]
        point: (f64, f64),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact dual of a convex piecewise-linear function (x,y CSV).
    PlDual {
        #[arg(long = "in")]
        input: PathBuf,
        /// Ray slopes JSON; defaults to the input with a .json extension
        /// when that file exists.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Lower and upper duals of a convex polygon (x,y CSV, counterclockwise).
    PolygonDual {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Young's inequality for an increasing f with f(0) = 0.
    Young {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value = "x")]
        var: String,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The transform-pair catalog.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum LinesCmd {
    /// Convert a line to another form.
    Convert {
        #[arg(long, allow_hyphen_values = true)]
        line: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Map a dual-space point between two forms.
    MapDual {
        #[arg(long, value_parser = pair, allow_hyphen_values = true)]
        point: (f64, f64),
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Analytic,
    Sup,
    Inf,
    Integral,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ClairautMode {
    General,
    Singular,
    Residual,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PoleRoute {
    Matrix,
    Chords,
    Inversion,
}

fn interval(s: &str) -> Result<(f64, f64), String> {
    match parse_interval(s) {
        Some((lo, hi)) if lo < hi => Ok((lo, hi)),
        Some(_) => Err(format!("interval `{s}` needs lo < hi")),
        None => Err(format!("expected lo:hi, got `{s}`")),
    }
}

fn grid(s: &str) -> Result<(f64, f64, usize), String> {
    match parse_grid(s) {
        Some((lo, hi, n)) if lo < hi && n >= 2 => Ok((lo, hi, n)),
        Some(_) => Err(format!("grid `{s}` needs lo < hi and n >= 2")),
        None => Err(format!("expected lo:hi:n, got `{s}`")),
    }
}

fn count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(format!("expected an integer >= 2, got `{s}`")),
    }
}

fn pair(s: &str) -> Result<(f64, f64), String> {
    let bad = || format!("expected x,y, got `{s}`");
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Engine(e)
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

/// Result of a command: the summary line and whether a verification failed.
struct Outcome {
    summary: String,
    verified: bool,
}

impl Outcome {
    fn ok(summary: impl Into<String>) -> Outcome {
        Outcome {
            summary: summary.into(),
            verified: true,
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

/// Writes to `path`, or stdout when absent.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(|e| io_failure(p, e))?))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn emit_json(out: Option<&Path>, v: &serde_json::Value) -> Result<(), Failure> {
    write_json(sink(out)?, v)?;
    Ok(())
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| io_failure(path, e))
}

fn expr(text: &str, var: &str) -> Result<Expression, Failure> {
    Ok(Expression::parse(text, var).map_err(Error::from)?)
}

fn form(name: &str) -> Result<Form, Failure> {
    Ok(name.parse::<Form>()?)
}

fn line_json(fc: &FormCoefficients) -> serde_json::Value {
    json!({ "form": fc.form().short_name(), "coeffs": fc.coeffs() })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let to_file = writes_file(&cli.cmd);
    match run(cli.cmd) {
        Ok(o) => {
            if to_file {
                println!("{}", o.summary);
            } else {
                eprintln!("{}", o.summary);
            }
            ExitCode::from(if o.verified { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}

/// Whether the data goes to a file, leaving stdout for the summary.
fn writes_file(cmd: &Cmd) -> bool {
    match cmd {
        Cmd::Transform { output, .. }
        | Cmd::Envelope { output, .. }
        | Cmd::Clairaut { output, .. }
        | Cmd::PlDual { output, .. } => output.out.is_some(),
        Cmd::Lines {
            cmd: LinesCmd::Convert { out, .. } | LinesCmd::MapDual { out, .. },
        }
        | Cmd::Pole { out, .. }
        | Cmd::Polar { out, .. }
        | Cmd::Classify { out, .. }
        | Cmd::PolygonDual { out, .. }
        | Cmd::Young { out, .. }
        | Cmd::Verify { out, .. }
        | Cmd::Catalog {
            cmd: CatalogCmd::List { out },
        } => out.is_some(),
    }
}

fn run(cmd: Cmd) -> CmdResult {
    match cmd {
        Cmd::Transform {
            y,
            var,
            domain,
            method,
            mgrid,
            n,
            end_rays,
            output,
        } => transform(&expr(&y, &var)?, domain, method, mgrid, n, end_rays, &output),
        Cmd::Envelope {
            m,
            b,
            d,
            var,
            kdomain,
            n,
            tangency_tol,
            output,
        } => {
            let (second, fam_form) = match (b, d) {
                (Some(b), _) => (b, FamilyForm::SlopeIntercept),
                (None, Some(d)) => (d, FamilyForm::SlopeNegIntercept),
                (None, None) => return Err(Failure::Usage("envelope needs --b or --d".into())),
            };
            let fam = LineFamily::new(expr(&m, &var)?, expr(&second, &var)?, kdomain.0, kdomain.1, fam_form)?;
            let env = envelope_of_family(&fam, n)?;
            write_curve(&env.curve, &output)?;
            let mut o = Outcome::ok(format!(
                "envelope: {} points, {} skipped",
                env.curve.len(),
                env.skipped.len()
            ));
            if let Some(tol) = tangency_tol {
                let r = verify_tangency(&env.curve, &fam, tol)?;
                o.verified = r.pass;
                o.summary += &format!(
                    "; tangency {} (point {:e}, slope {:e}, tol {tol:e})",
                    if r.pass { "ok" } else { "FAILED" },
                    r.max_point_residual,
                    r.max_slope_residual
                );
            }
            Ok(o)
        }
        Cmd::Clairaut {
            mode,
            f,
            var,
            tdomain,
            n,
            cs,
            curve,
            tol,
            output,
        } => clairaut(mode, &expr(&f, &var)?, tdomain, n, cs, curve, tol, &output),
        Cmd::Lines { cmd } => match cmd {
            LinesCmd::Convert { line, to, out } => {
                let fc = FormCoefficients::parse(&line)?;
                let target = form(&to)?;
                let got = convert(&fc, target)?;
                emit_json(out.as_deref(), &line_json(&got))?;
                Ok(Outcome::ok(format!("lines: {} -> {target}", fc.form())))
            }
            LinesCmd::MapDual { point, from, to, out } => {
                let (from, to) = (form(&from)?, form(&to)?);
                let p = dual_point_map(point, from, to)?;
                emit_json(out.as_deref(), &json!({ "form": to.short_name(), "point": [p.0, p.1] }))?;
                Ok(Outcome::ok(format!("lines: dual point {from} -> {to}")))
            }
        },
        Cmd::Pole {
            conic,
            line,
            via,
            chords,
            out,
        } => pole(&ConicMatrix::parse(&conic)?, &FormCoefficients::parse(&line)?, via, chords, out.as_deref()),
        Cmd::Polar {
            conic,
            point,
            form: target,
            out,
        } => {
            let l = polar_of_pole(&ConicMatrix::parse(&conic)?, point)?;
            let v = match target {
                Some(t) => line_json(&from_general(&l, form(&t)?)?),
                None => json!({ "form": "general", "coeffs": l.coefficients() }),
            };
            emit_json(out.as_deref(), &v)?;
            Ok(Outcome::ok(format!("polar of ({}, {})", point.0, point.1)))
        }
        Cmd::Classify { conic, point, out } => {
            let pos = classify_position(&ConicMatrix::parse(&conic)?, point)?;
            emit_json(out.as_deref(), &json!({ "point": [point.0, point.1], "position": pos }))?;
            Ok(Outcome::ok(format!("classify: {}", to_json(&pos)?.trim())))
        }
        Cmd::PlDual { input, sidecar, output } => {
            let side = sidecar.or_else(|| Some(sidecar_path(&input)).filter(|p| p.exists()));
            let f = read_pl(open(&input)?, side.as_deref().map(open).transpose()?)?;
            let d = pl_dual(&f)?;
            write_pl_output(&d, &output)?;
            Ok(Outcome::ok(format!(
                "pl-dual: {} breakpoints, rays {:?} / {:?}",
                d.breakpoints().len(),
                d.left_slope(),
                d.right_slope()
            )))
        }
        Cmd::PolygonDual { input, out } => {
            let poly = ConvexPolygon::new(read_points(open(&input)?)?)?;
            let d = polygon_dual(&poly)?;
            let v = json!({
                "lower": pl_json(&d.lower),
                "upper": pl_json(&d.upper),
                "excluded": d.excluded.iter().map(|v| json!({ "x": v.x, "edge": v.edge })).collect::<Vec<_>>(),
            });
            emit_json(out.as_deref(), &v)?;
            Ok(Outcome::ok(format!(
                "polygon-dual: lower {} / upper {} breakpoints, {} vertical supports",
                d.lower.breakpoints().len(),
                d.upper.breakpoints().len(),
                d.excluded.len()
            )))
        }
        Cmd::Young { f, var, c, a, m, out } => {
            let g = young_gap(&expr(&f, &var)?, c, a, m)?;
            emit_json(out.as_deref(), &json!(g))?;
            let holds = g.gap >= -1e-8;
            Ok(Outcome {
                summary: format!("young: gap {:e} ({})", g.gap, if holds { "holds" } else { "VIOLATED" }),
                verified: holds,
            })
        }
        Cmd::Verify { suite, out } => {
            let r = run_suite(&suite)?;
            emit_json(out.as_deref(), &json!(r))?;
            Ok(Outcome {
                summary: format!("verify {}: {} cases, {} failures", r.suite, r.cases, r.failures.len()),
                verified: r.passed(),
            })
        }
        Cmd::Catalog {
            cmd: CatalogCmd::List { out },
        } => {
            let names = catalog_names();
            let v: Vec<_> = names.iter().map(|(n, y, d)| json!({ "name": n, "y": y, "d": d })).collect();
            emit_json(out.as_deref(), &json!(v))?;
            Ok(Outcome::ok(format!("catalog: {} entries", names.len())))
        }
    }
}

fn pl_json(f: &PiecewiseLinearFunction) -> serde_json::Value {
    json!({
        "breakpoints": f.breakpoints().iter().map(|p| [p.0, p.1]).collect::<Vec<_>>(),
        "left_slope": f.left_slope(),
        "right_slope": f.right_slope(),
    })
}

fn write_pl_output(f: &PiecewiseLinearFunction, output: &Output) -> Result<(), Failure> {
    match (output.format, &output.out) {
        (Format::Json, out) => emit_json(out.as_deref(), &pl_json(f)),
        (Format::Csv, Some(p)) => {
            let side = sidecar_path(p);
            let sw = BufWriter::new(File::create(&side).map_err(|e| io_failure(&side, e))?);
            write_pl(sink(Some(p))?, sw, f)?;
            Ok(())
        }
        (Format::Csv, None) => {
            // rays go to stderr so stdout stays plain CSV
            let mut side = Vec::new();
            write_pl(sink(None)?, &mut side, f)?;
            eprint!("{}", String::from_utf8_lossy(&side));
            Ok(())
        }
    }
}

fn write_curve(c: &ParametricCurve, output: &Output) -> Result<(), Failure> {
    let w = sink(output.out.as_deref())?;
    match output.format {
        Format::Csv => write_parametric(w, c)?,
        Format::Json => write_json(
            w,
            &json!({ "t": c.ts(), "x": c.points().iter().map(|p| p.0).collect::<Vec<_>>(),
                     "y": c.points().iter().map(|p| p.1).collect::<Vec<_>>() }),
        )?,
    }
    Ok(())
}

fn transform(
    y: &Expression,
    (lo, hi): (f64, f64),
    method: MethodArg,
    mgrid: Option<(f64, f64, usize)>,
    n: usize,
    end_rays: bool,
    output: &Output,
) -> CmdResult {
    let report: TransformReport = match method {
        MethodArg::Analytic | MethodArg::Integral => {
            let ms = match mgrid {
                Some((a, b, k)) => linspace(a, b, k),
                None => {
                    let (a, b) = SlopeInverse::new(y, lo, hi)?.slope_range();
                    linspace(a, b, DEFAULT_N)
                }
            };
            if method == MethodArg::Analytic {
                transform_analytic_grid(y, lo, hi, &ms)?
            } else {
                transform_integral(y, lo, hi, &ms)?
            }
        }
        MethodArg::Sup | MethodArg::Inf => {
            let f = sample(y, lo, hi, n)?;
            let ms = match mgrid {
                Some((a, b, k)) => linspace(a, b, k),
                None => {
                    let (a, b) = f.end_slopes();
                    linspace(a.min(b), a.max(b), DEFAULT_N)
                }
            };
            if method == MethodArg::Sup {
                transform_sup(&f, &ms, end_rays)?
            } else {
                transform_inf(&f, &ms, end_rays)?
            }
        }
    };
    let diag = transform_diagnostics(&report);
    match (output.format, &output.out) {
        (Format::Json, out) => {
            let v = json!({ "m": report.dual.xs(), "d": report.dual.ys(), "diagnostics": diag });
            emit_json(out.as_deref(), &v)?;
        }
        (Format::Csv, out) => {
            write_sampled(sink(out.as_deref())?, ["m", "d"], &report.dual)?;
            if let Some(p) = out {
                emit_json(Some(&sidecar_path(p)), &json!(diag))?;
            }
        }
    }
    let mut summary = format!(
        "transform: {} points ({}), {} skipped",
        report.dual.len(),
        report.method,
        report.diagnostics.skipped_m.len()
    );
    if report.diagnostics.nonconvex_input {
        summary += match report.method {
            Method::Inf => "; input is not concave",
            _ => "; input is not convex, dual is of its convex minorant",
        };
    }
    Ok(Outcome::ok(summary))
}

#[allow(clippy::too_many_arguments)]
fn clairaut(
    mode: ClairautMode,
    f: &Expression,
    (lo, hi): (f64, f64),
    n: usize,
    cs: Option<(f64, f64, usize)>,
    curve: Option<PathBuf>,
    tol: f64,
    output: &Output,
) -> CmdResult {
    let p = ClairautProblem::new(f.clone(), lo, hi)?;
    match mode {
        ClairautMode::General => {
            let cs = match cs {
                Some((a, b, k)) => linspace(a, b, k),
                None => linspace(lo, hi, n),
            };
            let fam = general_family(&p, &cs);
            let w = sink(output.out.as_deref())?;
            match output.format {
                Format::Csv => write_rows(w, &["C", "slope", "intercept"], fam.iter().map(|r| vec![r.0, r.1, r.2]))?,
                Format::Json => write_json(w, &fam.iter().map(|r| [r.0, r.1, r.2]).collect::<Vec<_>>())?,
            }
            Ok(Outcome::ok(format!(
                "clairaut general: {} lines, {} undefined",
                fam.len(),
                cs.len() - fam.len()
            )))
        }
        ClairautMode::Singular => {
            let sol = singular_solution(&p, n)?;
            write_curve(&sol.curve, output)?;
            Ok(Outcome::ok(format!(
                "clairaut singular: {} points, {} skipped, {} flat",
                sol.curve.len(),
                sol.skipped.len(),
                sol.flat.len()
            )))
        }
        ClairautMode::Residual => {
            let c = match curve {
                Some(path) => {
                    let rows = read_rows(open(&path)?, 3)?;
                    ParametricCurve::new(rows.iter().map(|r| r[0]).collect(), rows.iter().map(|r| (r[1], r[2])).collect())?
                }
                None => singular_solution(&p, n)?.curve,
            };
            let r = residual(&p, &c)?;
            let pass = r.max_abs <= tol;
            emit_json(
                output.out.as_deref(),
                &json!({ "max_abs": r.max_abs, "at_x": r.at_x, "tol": tol, "pass": pass }),
            )?;
            Ok(Outcome {
                summary: format!("clairaut residual: {:e} at x = {} ({})", r.max_abs, r.at_x, if pass { "ok" } else { "FAILED" }),
                verified: pass,
            })
        }
    }
}

fn pole(
    q: &ConicMatrix,
    fc: &FormCoefficients,
    via: PoleRoute,
    chords: Option<(f64, f64)>,
    out: Option<&Path>,
) -> CmdResult {
    let l = to_general(fc);
    let v = match via {
        PoleRoute::Matrix => {
            let p = pole_of_polar(q, &l)?;
            json!({ "point": [p.0, p.1] })
        }
        PoleRoute::Chords => {
            if *q != ConicMatrix::parabola() {
                return Err(Failure::Usage("--via chords needs --conic parabola".into()));
            }
            let (a1, a2) = chords.ok_or_else(|| Failure::Usage("--via chords needs --chords a1,a2".into()))?;
            let [m, d] = from_general(&l, Form::SlopeNegIntercept)?.coeffs();
            let p = pole_via_chords(m, d, a1, a2)?;
            json!({ "point": [p.0, p.1] })
        }
        PoleRoute::Inversion => {
            if *q != ConicMatrix::unit_circle() {
                return Err(Failure::Usage("--via inversion needs --conic circle".into()));
            }
            let r = pole_via_inversion(&l)?;
            json!({ "point": [r.pole.0, r.pole.1], "foot": [r.foot.0, r.foot.1], "distance_product": r.distance_product })
        }
    };
    emit_json(out, &v)?;
    Ok(Outcome::ok(format!("pole: {}", to_json(&v["point"])?.trim())))
}
