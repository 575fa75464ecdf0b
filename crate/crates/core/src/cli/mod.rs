//! The `conjdim` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for input
//! errors.

pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::builtins;
use crate::category::io::{CategoryFile, MatrixJson};
use crate::category::{Arrow, Category};
use crate::conjugation::{self, ConjugateSolution};
use crate::error::{Error, Result};
use crate::fusion::{self, FusionRing, ObjectVec};
use crate::inclusions::{self, FdInclusion};
use crate::jones::{self, IndexClass};
use crate::qsystem;
use crate::tol::{self, Tolerances};

pub use report::{num, sig12, Report};

#[derive(Debug, Parser)]
#[command(name = "conjdim", version, about = "Conjugates, intrinsic dimension and index data for finite tensor C*-categories")]
pub struct Cli {
    /// Residual tolerance for every check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized steps (decomposition, sampling).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension and index class of every named object.
    Dims {
        /// Category or fusion file, or a built-in name (`hilb:3`, `suq2:q=0.5`, `fibonacci`, ...).
        source: String,
    },
    /// Checks a solution file `{"category", "rho", "rho_bar", "R", "R_bar"}`.
    Verify(VerifyArgs),
    /// Fusion table, growth sequence and amenability of a fusion ring.
    FusionTable(FusionArgs),
    /// Checks a Q-system file `{"category", "lambda", "S", "T"}`.
    QsystemCheck { file: PathBuf },
    /// Pimsner–Popa basis, conjugate pair and index of an inclusion file.
    InclusionIndex { file: PathBuf },
    /// Lists the built-in categories and fusion rings.
    List,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub conjugate: bool,
    #[arg(long)]
    pub standard: bool,
    #[arg(long)]
    pub jones: bool,
    #[arg(long)]
    pub minimality: bool,
}

#[derive(Debug, Args)]
pub struct FusionArgs {
    /// Ring name or fusion file.
    pub ring: String,
    /// Object such as `2*sigma+psi`; defaults to the first non-unit label.
    #[arg(long)]
    pub object: Option<String>,
    /// Print `dim(ρⁿ, ρⁿ)` for n = 1..=N.
    #[arg(long, value_name = "N")]
    pub growth: Option<usize>,
    /// Compare the given dimension with `‖m^ρ‖`.
    #[arg(long, value_name = "D")]
    pub amenability: Option<f64>,
    /// Truncation depth for infinite rings.
    #[arg(long)]
    pub depth: Option<usize>,
}

/// Runs the parsed command line; returns the text to print and the exit code.
pub fn execute(cli: &Cli) -> (String, i32) {
    match run(cli) {
        Ok(report) => {
            let code = if report.pass() { 0 } else { 1 };
            let text = if cli.json {
                serde_json::to_string_pretty(&report.to_json()).expect("report serializes") + "\n"
            } else {
                report.to_text()
            };
            (text, code)
        }
        Err(e) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&json!({"error": e.to_string()})).expect("error serializes") + "\n"
            } else {
                format!("error: {e}\n")
            };
            (text, 2)
        }
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Invalid(format!("--tol must be positive, got {t}")));
        }
        tol::set_tolerances(Tolerances { residual: t, ..Tolerances::default() });
    }
    let tol = tol::residual();
    match &cli.command {
        Command::Dims { source } => cmd_dims(source, cli.seed, tol),
        Command::Verify(a) => cmd_verify(a, cli.seed, tol),
        Command::FusionTable(a) => cmd_fusion_table(a, cli.seed, tol),
        Command::QsystemCheck { file } => cmd_qsystem_check(file, cli.seed, tol),
        Command::InclusionIndex { file } => cmd_inclusion_index(file, cli.seed, tol),
        Command::List => Ok(cmd_list(cli.seed, tol)),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

enum Source {
    Category(Category),
    Ring(FusionRing),
}

fn load_source(source: &str) -> Result<(Source, Vec<u8>)> {
    let path = Path::new(source);
    if path.is_file() {
        let text = read(path)?;
        let value: Value = serde_json::from_str(&text)?;
        let src = if value.get("kind").is_some() {
            Source::Category(CategoryFile::parse(&text)?.build()?)
        } else if value.get("labels").is_some() {
            Source::Ring(FusionRing::from_json(&text)?)
        } else {
            return Err(Error::Invalid(format!("{source}: neither a category nor a fusion file")));
        };
        return Ok((src, text.into_bytes()));
    }
    let bytes = source.as_bytes().to_vec();
    match builtins::category_by_name(source) {
        Ok(cat) => Ok((Source::Category(cat), bytes)),
        Err(_) => match fusion::ring_by_name(source) {
            Ok(ring) => Ok((Source::Ring(ring), bytes)),
            Err(_) => Err(Error::Invalid(format!("`{source}` is not a file, built-in category or fusion ring"))),
        },
    }
}

/// A `"category"` field: a built-in name, a path relative to the file, or
/// an inline category object. Missing means Hilb.
fn category_field(value: Option<&Value>, base: &Path) -> Result<Category> {
    match value {
        None | Some(Value::Null) => Ok(Category::hilb()),
        Some(Value::String(s)) => {
            let p = base.join(s);
            if p.is_file() {
                CategoryFile::parse(&read(&p)?)?.build()
            } else {
                builtins::category_by_name(s)
            }
        }
        Some(v) => serde_json::from_value::<CategoryFile>(v.clone())?.build(),
    }
}

fn cmd_dims(source: &str, seed: u64, tol: f64) -> Result<Report> {
    let (src, bytes) = load_source(source)?;
    let mut report = Report::new(&format!("dims {source}"), report::digest(&[&bytes]), seed, tol);
    let mut rows = Vec::new();
    let mut outside = Vec::new();
    match src {
        Source::Category(cat) => {
            report.note("category", json!(cat.name()));
            for o in cat.named_objects() {
                let d = conjugation::dim_object(&cat, &o, seed)?;
                let class = jones::index_range_default(d * d);
                if class == IndexClass::Outside {
                    outside.push(o.label());
                }
                rows.push(vec![json!(o.label()), num(d), num(d * d), json!(class.to_string())]);
            }
        }
        Source::Ring(ring) => {
            report.note("ring", json!(ring.name()));
            let labels: Vec<usize> = if ring.is_finite() {
                (0..ring.size()).collect()
            } else {
                ring.ensure_size(6)?;
                (0..6).collect()
            };
            for i in labels {
                let d = fusion::dimension_of(&ring, &ObjectVec::label(i))?;
                let class = jones::index_range_default(d * d);
                if class == IndexClass::Outside {
                    outside.push(ring.label_name(i));
                }
                rows.push(vec![json!(ring.label_name(i)), num(d), num(d * d), json!(class.to_string())]);
            }
        }
    }
    report.table("objects", &["object", "d", "d^2", "index class"], rows);
    report.check("index_range", outside.is_empty(), vec![("outside", json!(outside))]);
    Ok(report)
}

#[derive(Deserialize)]
struct SolutionFile {
    #[serde(default)]
    category: Option<Value>,
    rho: String,
    rho_bar: String,
    #[serde(rename = "R")]
    r: MatrixJson,
    #[serde(rename = "R_bar")]
    r_bar: MatrixJson,
}

pub fn load_solution(path: &Path) -> Result<(Category, ConjugateSolution, String)> {
    let text = read(path)?;
    let f: SolutionFile = serde_json::from_str(&text)?;
    let cat = category_field(f.category.as_ref(), path.parent().unwrap_or(Path::new(".")))?;
    let rho = cat.object(&f.rho)?;
    let rho_bar = cat.object(&f.rho_bar)?;
    let sol = ConjugateSolution::new(&cat.unit(), &rho, &rho_bar, f.r.to_mat()?, f.r_bar.to_mat()?)?;
    Ok((cat, sol, text))
}

fn cmd_verify(a: &VerifyArgs, seed: u64, tol: f64) -> Result<Report> {
    let (cat, sol, text) = load_solution(&a.file)?;
    let all = !(a.conjugate || a.standard || a.jones || a.minimality);
    let flags: String = [("conjugate", a.conjugate), ("standard", a.standard), ("jones", a.jones), ("minimality", a.minimality)]
        .iter()
        .filter(|f| f.1)
        .map(|f| format!(" --{}", f.0))
        .collect();
    let mut report = Report::new(&format!("verify{flags} {}", a.file.display()), report::digest(&[text.as_bytes()]), seed, tol);
    report.note("category", json!(cat.name()));
    report.note("rho", json!(sol.rho.label()));
    report.note("d(phi)", num(conjugation::dim_solution(&sol)));
    if all || a.conjugate {
        let r = conjugation::verify_conjugate_tol(&sol, tol);
        report.check("conjugate", r.ok, vec![("residual_1", num(r.residual_1)), ("residual_2", num(r.residual_2))]);
    }
    if all || a.standard {
        let r = conjugation::is_standard(&cat, &sol)?;
        report.check("standard", r.standard, vec![("gap", num(r.gap))]);
    }
    if all || a.jones {
        let pair = jones::jones_projections(&sol)?;
        let r = jones::verify_jones_relations(&pair)?;
        let class = jones::index_range_default(1.0 / r.lam);
        report.check(
            "jones",
            r.passes(tol) && class != IndexClass::Outside,
            vec![
                ("projection", num(r.projection)),
                ("e_bar_side", num(r.e_bar_side)),
                ("e_bar_side_mirror", num(r.e_bar_side_mirror)),
                ("e_side", num(r.e_side)),
                ("e_side_mirror", num(r.e_side_mirror)),
                ("lam", num(r.lam)),
                ("index_class", json!(class.to_string())),
            ],
        );
    }
    if all || a.minimality {
        let r = conjugation::minimality_check(&cat, &sol, seed)?;
        report.check("minimality", r.minimal, vec![("product", num(r.product)), ("d_squared", num(r.d_squared))]);
    }
    Ok(report)
}

fn cmd_fusion_table(a: &FusionArgs, seed: u64, tol: f64) -> Result<Report> {
    let (src, bytes) = load_source(&a.ring)?;
    let Source::Ring(ring) = src else {
        return Err(Error::Invalid(format!("`{}` is a category, not a fusion ring", a.ring)));
    };
    let mut command = format!("fusion-table {}", a.ring);
    if let Some(o) = &a.object {
        command += &format!(" --object {o}");
    }
    if let Some(n) = a.growth {
        command += &format!(" --growth {n}");
    }
    if let Some(d) = a.amenability {
        command += &format!(" --amenability {}", sig12(d));
    }
    if let Some(n) = a.depth {
        command += &format!(" --depth {n}");
    }
    let mut report = Report::new(&command, report::digest(&[&bytes]), seed, tol);
    report.note("ring", json!(ring.name()));
    let rho = match &a.object {
        Some(text) => ring.parse_object(text)?,
        None => {
            ring.ensure_size(2)?;
            ObjectVec::label(1.min(ring.size() - 1))
        }
    };
    report.note("object", json!(rho.display(&ring)));
    let shown = if ring.is_finite() { ring.size() } else { 5 };
    if !ring.is_finite() {
        ring.ensure_size(2 * shown)?;
    }
    let mut rows = Vec::new();
    for i in 0..shown {
        for j in 0..shown {
            let prod = ring.tensor(&ObjectVec::label(i), &ObjectVec::label(j))?;
            rows.push(vec![json!(ring.label_name(i)), json!(ring.label_name(j)), json!(prod.display(&ring))]);
        }
    }
    let title = if ring.is_finite() { "fusion rules".to_string() } else { format!("fusion rules (first {shown} labels)") };
    report.table(&title, &["a", "b", "a x b"], rows);
    if ring.is_finite() {
        let pf = fusion::pf_dimension(&ring, &rho)?;
        report.note("pf_dimension", num(pf.value));
    } else {
        report.note("dimension", num(fusion::dimension_of(&ring, &rho)?));
    }
    if let Some(n) = a.growth {
        let terms = fusion::growth_sequence(&ring, &rho, n)?;
        let rows = terms.iter().map(|t| vec![json!(t.n), json!(t.dim), num(t.root)]).collect();
        report.table("growth", &["n", "dim(rho^n, rho^n)", "dim^(1/2n)"], rows);
        report.note("growth_row", json!(terms.iter().map(|t| t.dim.clone()).collect::<Vec<_>>().join(",")));
    }
    if a.amenability.is_some() || !ring.is_finite() {
        let r = fusion::amenability_gap(&ring, &rho, a.amenability, a.depth)?;
        report.table(
            "amenability",
            &["d", "m_norm_lower", "m_norm_upper", "depth", "verdict"],
            vec![vec![
                num(r.d),
                num(r.m_norm_lower),
                num(r.m_norm_upper),
                json!(r.depth),
                json!(if r.amenable { "amenable" } else { "NOT amenable" }),
            ]],
        );
    }
    Ok(report)
}

#[derive(Deserialize)]
struct QSystemFile {
    #[serde(default)]
    category: Option<Value>,
    lambda: String,
    #[serde(rename = "S")]
    s: MatrixJson,
    #[serde(rename = "T", default)]
    t: Option<MatrixJson>,
}

fn cmd_qsystem_check(path: &Path, seed: u64, tol: f64) -> Result<Report> {
    let text = read(path)?;
    let f: QSystemFile = serde_json::from_str(&text)?;
    let cat = category_field(f.category.as_ref(), path.parent().unwrap_or(Path::new(".")))?;
    let lambda = cat.object(&f.lambda)?;
    let s = Arrow::new(&lambda, &lambda.tensor(&lambda), f.s.to_mat()?)?;
    let r = qsystem::verify_qsystem(&cat, &lambda, &s)?;
    let mut report = Report::new(&format!("qsystem-check {}", path.display()), report::digest(&[text.as_bytes()]), seed, tol);
    report.note("category", json!(cat.name()));
    report.note("lambda", json!(lambda.label()));
    report.note("T_norm_sq", num(r.t_norm_sq));
    report.note("d_lambda", num(r.d_lambda));
    report.note("irreducible", json!(r.irreducible));
    report.check("isometry", r.isometry_res < tol, vec![("isometry_res", num(r.isometry_res))]);
    report.check("associativity", r.a_res < tol, vec![("a_res", num(r.a_res))]);
    report.check("unit", r.b_res < tol && r.t_conditioning > tol, vec![("b_res", num(r.b_res)), ("t_conditioning", num(r.t_conditioning))]);
    report.check("exchange", r.d_res < 10.0 * tol, vec![("d_res", num(r.d_res)), ("d_res_derived", num(r.d_res_derived))]);
    report.check("nontrivial", r.d_lambda > 1.0 + tol, vec![("d_lambda", num(r.d_lambda))]);
    if let (Some(given), Some(t)) = (&f.t, &r.t) {
        let given = given.to_mat()?;
        let res = if given.shape() == t.mat().shape() { (&given - t.mat()).norm() / t.mat().norm().max(1.0) } else { f64::INFINITY };
        report.check("given_T", res < tol, vec![("residual", num(res))]);
    }
    Ok(report)
}

fn cmd_inclusion_index(path: &Path, seed: u64, tol: f64) -> Result<Report> {
    let text = read(path)?;
    let inc = FdInclusion::from_json(&text)?;
    let mut report = Report::new(&format!("inclusion-index {}", path.display()), report::digest(&[text.as_bytes()]), seed, tol);
    let basis = inclusions::pp_basis(&inc)?;
    let e = inclusions::expectation_residuals(&inc, seed, 16);
    let r = inclusions::inclusion_conjugate(&inc, &basis);
    report.note("N_blocks", json!(inc.n_alg.blocks()));
    report.note("M_blocks", json!(inc.m_alg.blocks()));
    report.note("index", num(r.index));
    report.note("basis_size", json!(r.basis_size));
    report.note("orthonormal_basis", json!(r.orthonormal_basis));
    report.note("relative_commutant", json!(r.relative_commutant));
    report.note("dimension", num(r.dimension));
    report.check(
        "expectation",
        e.passes(tol),
        vec![("unit", num(e.unit)), ("bimodule", num(e.bimodule)), ("trace", num(e.trace)), ("positivity", num(e.positivity))],
    );
    report.check("reconstruction", r.reconstruction < tol, vec![("residual", num(r.reconstruction))]);
    report.check(
        "conjugate_equations",
        r.first_equation < tol && r.second_equation < tol && r.intertwining < tol,
        vec![("first", num(r.first_equation)), ("second", num(r.second_equation)), ("intertwining", num(r.intertwining))],
    );
    report.check(
        "rho_bar",
        r.rho_bar_homomorphism < tol && r.left_action < tol,
        vec![("homomorphism", num(r.rho_bar_homomorphism)), ("left_action", num(r.left_action))],
    );
    report.check("jones_projection", r.jones_projection < tol, vec![("residual", num(r.jones_projection))]);
    Ok(report)
}

fn cmd_list(seed: u64, tol: f64) -> Report {
    let mut report = Report::new("list", report::digest(&[b"list"]), seed, tol);
    report.table("categories", &["name", "description"], builtins::CATEGORY_NAMES.iter().map(|(n, d)| vec![json!(n), json!(d)]).collect());
    report.table("fusion rings", &["name", "description"], fusion::RING_NAMES.iter().map(|(n, d)| vec![json!(n), json!(d)]).collect());
    report
}
