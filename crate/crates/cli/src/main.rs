//! `slicereg`: command-line front end. Every verb reads one JSON document
//! (`--input`, inline or a path) and writes JSON or CSV.

mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use slicereg::acceptance;
use slicereg::algebra;
use slicereg::domains::cap_component;
use slicereg::douren;
use slicereg::integral::{self, CauchyProbe, Contour, SymmetricSet};
use slicereg::poly::{QPoly, QRational};
use slicereg::quaternion::{at, ImaginaryUnit, Quaternion};
use slicereg::series;
use slicereg::slicefn::SliceFunction;
use slicereg::zeros::{self, ExactSphere};
use slicereg::{Result, SliceError};

use input::{field, opt, points, DomainPreset};

/// Step (degrees) of the sphere grid used to resolve caps.
const CAP_STEP: f64 = 2.0;

#[derive(Parser)]
#[command(name = "slicereg", version, about = "Slice regular functions on quaternionic domains")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Input document: inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Acceptance tolerance for reproduction checks and rationalization.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 20_240_601)]
    seed: u64,
    /// Lattice size `NxM` for field dumps and zero scans.
    #[arg(long, global = true)]
    grid: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate `f` at `points`.
    Eval,
    /// Regular product `f * g`.
    Star,
    /// Regular conjugate `f^c`.
    Conj,
    /// Symmetrization `f^s`.
    Sym,
    /// Regular reciprocal `f^{-*}`.
    Recip,
    /// Zero set with multiplicities.
    Zeros {
        /// Exact rational arithmetic (polynomials only).
        #[arg(long)]
        exact: bool,
    },
    /// Divide out `q - point` (or the sphere of `point` with `"sphere": true`).
    Factor,
    /// Classical, spherical and isolated multiplicity at `point`.
    Mult,
    /// Spherical series around `x0 + y0 S`.
    Series,
    /// Laurent coefficients at `point`.
    Laurent,
    /// Classify the singularity at `point`.
    Singular,
    /// Slice-wise or local Cauchy reproduction table.
    Cauchy,
    /// Volume Cauchy reproduction table over a ball.
    VolumeCauchy,
    /// Reports for the counterexample on the non-symmetric domain.
    Douren {
        #[arg(long)]
        caps: bool,
        #[arg(long)]
        jump: bool,
        #[arg(long)]
        zeros: bool,
    },
    /// Run the acceptance battery.
    Selftest {
        /// Only these criteria (repeatable).
        #[arg(long)]
        only: Vec<u8>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: {e}");
        }
    }
    match run(&cli) {
        Ok((value, code)) => match output::write(&value, cli.format, cli.out.as_deref()) {
            Ok(()) => ExitCode::from(code),
            Err(e) => {
                eprintln!("{}", json!({"error": "Io", "message": e.to_string()}));
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("{}", json!({"error": error_code(&e), "message": e.to_string()}));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Variant name of the error, for machine consumption.
fn error_code(e: &SliceError) -> String {
    let d = format!("{e:?}");
    d.split(['(', ' ', '{']).next().unwrap_or_default().to_string()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn run(cli: &Cli) -> Result<(Value, u8)> {
    let doc = input::load(cli.input.as_deref())?;
    let v = match &cli.cmd {
        Cmd::Eval => {
            let (_, f) = input::function(&doc, "f")?;
            value_rows(&f, &require_points(&doc)?)?
        }
        Cmd::Star => star(&doc)?,
        Cmd::Conj => unary(&doc, |s| s.poly().map(|p| to_value(&p.conj())), |f| Ok(algebra::conjugate(f)))?,
        Cmd::Sym => unary(&doc, |s| s.poly().map(|p| to_value(&p.sym())), |f| Ok(algebra::symmetrize(f)))?,
        Cmd::Recip => unary(
            &doc,
            |s| s.rational().and_then(|r| rational_reciprocal(&r)).map(|r| json!({"num": r.num, "den": r.den})),
            algebra::reciprocal,
        )?,
        Cmd::Zeros { exact } => zeros_cmd(&doc, *exact, cli)?,
        Cmd::Factor => factor(&doc)?,
        Cmd::Mult => {
            let (_, f) = input::function(&doc, "f")?;
            let p: Quaternion = field(&doc, "point")?;
            let cap = cap_component(f.domain(), &p, CAP_STEP)?;
            to_value(&zeros::multiplicities(&f, &p, &cap)?)
        }
        Cmd::Series => {
            let (_, f) = input::function(&doc, "f")?;
            let (x0, y0): (f64, f64) = (field(&doc, "x0")?, field(&doc, "y0")?);
            let n_min = opt(&doc, "n_min")?.unwrap_or(0);
            let depth = opt(&doc, "depth")?.unwrap_or(8);
            let cap = if f.domain().symmetric() {
                None
            } else {
                let u: ImaginaryUnit = opt(&doc, "unit")?.unwrap_or(ImaginaryUnit::I);
                Some(cap_component(f.domain(), &at(x0, y0, &u), CAP_STEP)?)
            };
            to_value(&series::spherical_coeffs(&f, x0, y0, cap.as_ref(), n_min, depth)?)
        }
        Cmd::Laurent => {
            let (_, f) = input::function(&doc, "f")?;
            let p: Quaternion = field(&doc, "point")?;
            let window = opt(&doc, "window")?.unwrap_or((-4, 4));
            to_value(&series::laurent_coeffs(&f, &p, window)?)
        }
        Cmd::Singular => {
            let (spec, f) = input::function(&doc, "f")?;
            let p: Quaternion = field(&doc, "point")?;
            let region = match opt::<DomainPreset>(&doc, "region")? {
                Some(r) => r.build()?,
                None => spec.base_region()?,
            };
            let probes = opt(&doc, "probes")?.unwrap_or(6);
            to_value(&series::classify_singularity(&f, &p, &region, probes)?)
        }
        Cmd::Cauchy => cauchy(&doc, cli.tol)?,
        Cmd::VolumeCauchy => volume_cauchy(&doc, cli.tol)?,
        Cmd::Douren { caps, jump, zeros } => douren_cmd(&doc, cli, *caps, *jump, *zeros)?,
        Cmd::Selftest { only } => {
            let results: Vec<_> = if only.is_empty() {
                acceptance::run_all(cli.seed)
            } else {
                only.iter().map(|&id| acceptance::run(id, cli.seed)).collect()
            };
            for r in &results {
                eprintln!("{}", acceptance::format_line(r));
            }
            let code = if results.iter().all(|r| r.passed) { 0 } else { 1 };
            return Ok((to_value(&results), code));
        }
    };
    Ok((v, 0))
}

fn require_points(doc: &Value) -> Result<Vec<Quaternion>> {
    let p = points(doc)?;
    if p.is_empty() {
        return Err(SliceError::InvalidInput("missing field `points`".into()));
    }
    Ok(p)
}

fn value_rows(f: &SliceFunction, pts: &[Quaternion]) -> Result<Value> {
    let rows = pts
        .iter()
        .map(|q| Ok(json!({"point": q, "value": f.eval(q)?})))
        .collect::<Result<Vec<_>>>()?;
    Ok(Value::Array(rows))
}

/// Coefficients when the operand is a plain polynomial and no points are
/// given; values at `points` otherwise.
fn unary(
    doc: &Value,
    exact: impl Fn(&input::FunctionSpec) -> Option<Value>,
    op: impl Fn(&SliceFunction) -> Result<SliceFunction>,
) -> Result<Value> {
    let (spec, f) = input::function(doc, "f")?;
    let pts = points(doc)?;
    if pts.is_empty() {
        return exact(&spec).ok_or_else(|| SliceError::InvalidInput("`points` required for this function kind".into()));
    }
    value_rows(&op(&f)?, &pts)
}

fn star(doc: &Value) -> Result<Value> {
    let (fs, f) = input::function(doc, "f")?;
    let (gs, g) = input::function(doc, "g")?;
    let pts = points(doc)?;
    if pts.is_empty() {
        return match (fs.poly(), gs.poly()) {
            (Some(a), Some(b)) => Ok(to_value(&a.star(&b))),
            _ => Err(SliceError::InvalidInput("`points` required unless both factors are polynomials".into())),
        };
    }
    let rows = pts
        .iter()
        .map(|q| Ok(json!({"point": q, "value": algebra::product_point(&f, &g, q)?})))
        .collect::<Result<Vec<_>>>()?;
    Ok(Value::Array(rows))
}

/// `(N/D)^{-*} = D N^c / N^s`.
fn rational_reciprocal(r: &QRational) -> Option<QRational> {
    QRational::new(r.num.conj().mul_real(&r.den), r.num.sym()).ok()
}

fn rational_strings<T: std::fmt::Display>(c: &Quaternion<T>) -> [String; 4] {
    [c.w.to_string(), c.x.to_string(), c.y.to_string(), c.z.to_string()]
}

fn exact_sphere_json(s: &ExactSphere) -> Value {
    let q = rational_strings;
    json!({
        "x": s.x.to_string(),
        "y2": s.y2.to_string(),
        "sym_multiplicity": s.sym_multiplicity,
        "m": s.m,
        "classical": s.classical,
        "chain": s.chain.iter().map(q).collect::<Vec<_>>(),
    })
}

fn zeros_cmd(doc: &Value, exact: bool, cli: &Cli) -> Result<Value> {
    let (spec, f) = input::function(doc, "f")?;
    if let Some(p) = spec.poly() {
        if exact {
            let coeffs = p
                .coeffs()
                .iter()
                .map(|c| {
                    let r = |v: f64| zeros::rationalize(v, cli.tol);
                    Quaternion::new(r(c.w), r(c.x), r(c.y), r(c.z))
                })
                .collect();
            let (report, spheres) = zeros::poly_zeros_exact(&QPoly::new(coeffs))?;
            let mut v = to_value(&report);
            v["exact"] = Value::Array(spheres.iter().map(exact_sphere_json).collect());
            return Ok(v);
        }
        return Ok(to_value(&zeros::poly_zeros(&p)?));
    }
    if exact {
        return Err(SliceError::InvalidInput("--exact needs a polynomial".into()));
    }
    let resolution = match &cli.grid {
        Some(g) => input::grid(g)?.0,
        None => 24,
    };
    Ok(to_value(&zeros::zero_scan(&f, resolution)))
}

fn factor(doc: &Value) -> Result<Value> {
    let (spec, f) = input::function(doc, "f")?;
    let p: Quaternion = field(doc, "point")?;
    let sphere = opt(doc, "sphere")?.unwrap_or(false);
    let pts = points_excluding(doc)?;
    if !sphere && pts.is_empty() {
        if let Some(poly) = spec.poly() {
            let (quot, rem) = poly.left_div_linear(&p);
            if rem.norm() > 1e-9 * poly.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max) {
                return Err(SliceError::NotADivisor);
            }
            return Ok(json!({"quotient": quot, "remainder": rem}));
        }
    }
    if pts.is_empty() {
        return Err(SliceError::InvalidInput("`points` required for this function kind".into()));
    }
    let cap = cap_component(f.domain(), &p, CAP_STEP)?;
    let g = if sphere {
        let c = slicereg::quaternion::slice_decompose(&p);
        zeros::factor_out_sphere(&f, c.x, c.y, &cap)?
    } else {
        zeros::factor_out_point(&f, &p, &cap)?
    };
    value_rows(&g, &pts)
}

/// `points` only; `point` means the factor here.
fn points_excluding(doc: &Value) -> Result<Vec<Quaternion>> {
    Ok(opt::<Vec<Quaternion>>(doc, "points")?.unwrap_or_default())
}

#[derive(Serialize)]
struct ProbeRow {
    #[serde(flatten)]
    probe: CauchyProbe,
    ok: bool,
}

fn probe_rows(rows: Vec<CauchyProbe>, tol: f64) -> Value {
    to_value(&rows.into_iter().map(|p| ProbeRow { ok: p.residual <= tol, probe: p }).collect::<Vec<_>>())
}

fn cauchy(doc: &Value, tol: f64) -> Result<Value> {
    let (_, f) = input::function(doc, "f")?;
    let pts = require_points(doc)?;
    let mode: String = opt(doc, "mode")?.unwrap_or_else(|| "local".into());
    let rows = match mode.as_str() {
        "slicewise" => {
            let contour: Contour = field(doc, "contour")?;
            pts.iter()
                .map(|q| {
                    let z = contour.unit.project(q);
                    if contour.unit.embed(z).dist(q) > 1e-12 * q.norm().max(1.0) {
                        return Err(SliceError::InvalidInput(format!("probe {q} is not on the contour's slice")));
                    }
                    Ok(CauchyProbe::new(*q, integral::slicewise_cauchy(&f, &contour, z)?, f.eval(q)?))
                })
                .collect::<Result<Vec<_>>>()?
        }
        "local" => {
            let set: SymmetricSet = field(doc, "set")?;
            let unit: ImaginaryUnit = opt(doc, "unit")?.unwrap_or(ImaginaryUnit::I);
            let panels = opt(doc, "panels")?.unwrap_or(16);
            let j0 = match opt::<ImaginaryUnit>(doc, "j0")? {
                Some(j) => {
                    let eps = match opt(doc, "eps")? {
                        Some(e) => e,
                        None => integral::validated_eps(&f, &set, &j),
                    };
                    Some((j, eps))
                }
                None => None,
            };
            pts.iter()
                .map(|q| Ok(CauchyProbe::new(*q, integral::local_cauchy(&f, &set, unit, q, j0, panels)?, f.eval(q)?)))
                .collect::<Result<Vec<_>>>()?
        }
        other => return Err(SliceError::InvalidInput(format!("unknown mode `{other}`"))),
    };
    Ok(probe_rows(rows, tol))
}

fn volume_cauchy(doc: &Value, tol: f64) -> Result<Value> {
    let (_, f) = input::function(doc, "f")?;
    let pts = require_points(doc)?;
    let center: f64 = opt(doc, "center")?.unwrap_or(0.0);
    let radius: f64 = field(doc, "radius")?;
    let j0: Option<ImaginaryUnit> = opt(doc, "j0")?;
    let phi_nodes = opt(doc, "phi_nodes")?.unwrap_or(64);
    let theta_nodes = opt(doc, "theta_nodes")?.unwrap_or(12);
    let rows = pts
        .iter()
        .map(|q| {
            let v = integral::volume_cauchy(&f, center, radius, q, j0, phi_nodes, theta_nodes)?;
            Ok(CauchyProbe::new(*q, v, f.eval(q)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(probe_rows(rows, tol))
}

fn douren_cmd(doc: &Value, cli: &Cli, caps: bool, jump: bool, zeros_flag: bool) -> Result<Value> {
    let cfg = input::douren_config(opt(doc, "unit")?, Some(cli.tol));
    let all = !caps && !jump && !zeros_flag && cli.grid.is_none();
    let mut out = serde_json::Map::new();
    if caps || all {
        let n = opt(doc, "cap_samples")?.unwrap_or(8);
        out.insert("caps".into(), to_value(&douren::cap_table(&cfg, n)?));
    }
    if jump || all {
        let delta = opt(doc, "delta")?.unwrap_or(1e-5);
        out.insert("jump".into(), to_value(&douren::jump_table(&cfg, delta)?));
    }
    if zeros_flag || all {
        let fx = douren::fixtures(&cfg, opt(doc, "i0")?)?;
        out.insert("zeros".into(), to_value(&douren::fixture_zero_report(&fx)?));
    }
    if let Some(g) = &cli.grid {
        let (nx, ny) = input::grid(g)?;
        let f = match opt::<input::FunctionSpec>(doc, "f")? {
            Some(s) => s.build()?,
            None => douren::douren_f(cfg),
        };
        let unit: ImaginaryUnit = opt(doc, "slice")?.unwrap_or(cfg.unit);
        let bounds = opt(doc, "bounds")?.unwrap_or([-3.0, 1.0, 0.0, 4.0]);
        out.insert("field".into(), to_value(&douren::slice_field(&f, &unit, bounds, nx, ny)));
    }
    Ok(Value::Object(out))
}
