//! `dcsym`: verify symmetry classifications of diffusion-convection
//! equations from the command line.
//!
//! Exit status: 0 pass, 1 fail, 2 usage or input error, 3 undecided.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use dcsym::catalog::{CaseReport, Catalog, CatalogError, ClassificationCase, Filter, Instance, Setting, TransformReport};
use dcsym::equation::Gauge;
use dcsym::expr::{Canon, Chart, Q};
use dcsym::parser::{format_canon, parse_case_file, parse_expr, CaseSpec};
use dcsym::symmetry::{
    check_symmetry, closure_check_mod, determining_system, Ansatz, ClosureError, StructureConstants, VectorField,
};
use dcsym::transforms::{act_point, verify_maps, TransformError};
use dcsym::Outcome;

#[derive(Parser)]
#[command(name = "dcsym", version, about = "Exact Lie symmetry checks for f(x)u_t = (g(x)A(u)u_x)_x + h(x)B(u)u_x")]
struct Cli {
    /// Sign convention for abs and sign: `positive` (x, u > 0) or `signed`.
    #[arg(long, global = true, default_value = "positive")]
    chart: Chart,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify one catalog row.
    VerifyCase {
        /// Table label: 1, 2, 3, 1', 2', 3' (or 1p, 2p, 3p).
        #[arg(long)]
        table: String,
        /// Case label within the table, e.g. 15 or 2a.
        #[arg(long)]
        case: String,
        /// Parameter or element override, `name=value`.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
    },
    /// Verify every catalog row and transformation; one JSON object per line.
    VerifyAll {
        #[arg(long)]
        jobs: Option<usize>,
        /// `g=1` or `g=h`.
        #[arg(long)]
        gauge: Option<String>,
        /// Comma-separated conditions on table, gauge, id and dim, e.g. `dim>=4`.
        #[arg(long)]
        filter: Option<String>,
    },
    /// List catalog rows.
    List {
        #[arg(long)]
        filter: Option<String>,
    },
    /// Check one vector field against an equation file.
    Check {
        file: PathBuf,
        field: String,
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
    },
    /// Print the split determining equations of an equation file.
    Determining {
        file: PathBuf,
        #[arg(long, default_value = "general")]
        ansatz: Ansatz,
    },
    /// Apply a point map to an equation file, or check it against a target.
    Transform {
        map: PathBuf,
        file: PathBuf,
        target: Option<PathBuf>,
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
    },
    /// Print the structure constants of a catalog basis or of listed fields.
    Bracket {
        #[arg(long)]
        case: Option<String>,
        fields: Vec<String>,
    },
    /// Report which gauge an equation file is written in.
    Gauge {
        file: PathBuf,
        /// Require `g=1` or `g=h`; exits 1 if it does not hold.
        #[arg(long)]
        gauge: Option<String>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Undecided(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Undecided(_) => 3,
            CliError::Catalog(CatalogError::Transform(TransformError::NonInvertible(_) | TransformError::NonInvertibleX(_))) => 3,
            CliError::Catalog(_) => 2,
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> CliError {
        CliError::Catalog(CatalogError::Transform(e))
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Print a line to stdout; a closed pipe ends the process quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout().lock(), $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

fn code(o: Outcome) -> u8 {
    match o {
        Outcome::Pass => 0,
        Outcome::Fail => 1,
        Outcome::Inconclusive => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::VerifyCase { table, case, set } => verify_case(cli, table, case, set),
        Cmd::VerifyAll { jobs, gauge, filter } => verify_all(cli, *jobs, gauge.as_deref(), filter.as_deref()),
        Cmd::List { filter } => list(cli, filter.as_deref()),
        Cmd::Check { file, field, set } => check(cli, file, field, set),
        Cmd::Determining { file, ansatz } => determining(cli, file, *ansatz),
        Cmd::Transform { map, file, target, set } => transform(cli, map, file, target.as_deref(), set),
        Cmd::Bracket { case, fields } => brackets(cli, case.as_deref(), fields),
        Cmd::Gauge { file, gauge } => gauge_cmd(cli, file, gauge.as_deref()),
    }
}

fn catalog(cli: &Cli) -> Result<Catalog> {
    Ok(Catalog::load_default()?.with_chart(cli.chart))
}

fn filter(text: Option<&str>, gauge: Option<&str>) -> Result<Filter> {
    let mut f: Filter = text.unwrap_or_default().parse()?;
    if let Some(g) = gauge {
        f.gauge = Some(g.parse::<Gauge>().map_err(CliError::Usage)?);
    }
    Ok(f)
}

fn value(text: &str) -> Result<Canon> {
    parse_expr(text)
        .map_err(|e| CliError::Usage(format!("'{text}': {e}")))?
        .normalize()
        .map_err(|e| CliError::Usage(format!("'{text}': {e}")))
}

/// Split `name=value` overrides into parameters and element settings.
fn setting(case: &ClassificationCase, set: &[String]) -> Result<Setting> {
    let mut out = Setting::default();
    for s in set {
        let (k, v) = s.split_once('=').ok_or_else(|| CliError::Usage(format!("expected NAME=VALUE, got '{s}'")))?;
        let (k, c) = (k.trim(), value(v.trim())?);
        if case.spec.params.iter().any(|(p, _)| p == k) {
            let q: Q = c.as_q().ok_or_else(|| CliError::Usage(format!("{k} must be a rational number")))?;
            out.params.push((k.to_string(), q));
        } else if ["f", "g", "h", "A", "B"].contains(&k) || case.spec.functions.iter().any(|(n, _)| n == k) {
            out.elements.push((k.to_string(), c));
        } else {
            return Err(CliError::Catalog(CatalogError::UnknownParameter { case: case.id.clone(), name: k.to_string() }));
        }
    }
    Ok(out)
}

fn read_spec(path: &Path) -> Result<CaseSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_case_file(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_equation(cli: &Cli, path: &Path, set: &[String]) -> Result<Instance> {
    let case = ClassificationCase::from_spec(read_spec(path)?)?;
    let s = setting(&case, set)?;
    Ok(Catalog::empty().with_chart(cli.chart).instantiate_with(&case, &s)?)
}

fn table_id(table: &str, case: &str) -> String {
    let t = table.trim().replace('p', "'");
    format!("{t}.{}", case.trim())
}

fn case_json(r: &CaseReport) -> Value {
    json!({
        "id": r.id,
        "verdict": r.outcome.to_string(),
        "dimension": r.dimension,
        "millis": r.millis,
        "residual": r.residual(),
    })
}

fn transform_json(r: &TransformReport) -> Value {
    json!({
        "id": r.id,
        "source": r.source,
        "target": r.target,
        "verdict": r.outcome.to_string(),
        "millis": r.millis,
        "residual": r.residual(),
    })
}

fn verify_case(cli: &Cli, table: &str, case: &str, set: &[String]) -> Result<u8> {
    let cat = catalog(cli)?;
    let c = cat.case(&table_id(table, case))?;
    let r = cat.verify_case_with(c, &setting(c, set)?)?;
    match cli.format {
        Format::Json => {
            let mut v = case_json(&r);
            v["checks"] = r
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "verdict": c.outcome.to_string(), "detail": c.detail}))
                .collect();
            out!("{v}");
        }
        Format::Human => print!("{r}"),
    }
    Ok(code(r.outcome))
}

fn verify_all(cli: &Cli, jobs: Option<usize>, gauge: Option<&str>, text: Option<&str>) -> Result<u8> {
    let cat = catalog(cli)?;
    let s = cat.verify_all(&filter(text, gauge)?, jobs)?;
    for r in &s.cases {
        out!("{}", case_json(r));
    }
    for r in &s.transforms {
        out!("{}", transform_json(r));
    }
    let count = |o| s.cases.iter().filter(|c| c.outcome == o).count() + s.transforms.iter().filter(|t| t.outcome == o).count();
    eprintln!(
        "{} cases, {} transformations: {} pass, {} fail, {} inconclusive in {} ms",
        s.cases.len(),
        s.transforms.len(),
        count(Outcome::Pass),
        count(Outcome::Fail),
        count(Outcome::Inconclusive),
        s.millis
    );
    Ok(code(s.outcome()))
}

fn list(cli: &Cli, text: Option<&str>) -> Result<u8> {
    let cat = catalog(cli)?;
    for c in cat.list_cases(&filter(text, None)?) {
        let dim = c.dimension().map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        match cli.format {
            Format::Json => out!("{}", json!({"id": c.id, "gauge": c.gauge.to_string(), "dimension": c.dimension()})),
            Format::Human => out!("{:<8} {:<4} {dim}", c.id, c.gauge.to_string()),
        }
    }
    Ok(0)
}

fn check(cli: &Cli, file: &Path, field: &str, set: &[String]) -> Result<u8> {
    let inst = read_equation(cli, file, set)?;
    let q = VectorField::parse(field).map_err(|e| CliError::Usage(e.to_string()))?;
    let r = check_symmetry(&inst.equation, &q);
    match cli.format {
        Format::Json => out!(
            "{}",
            json!({
                "field": q.to_string(),
                "verdict": r.outcome.to_string(),
                "residual": (r.outcome != Outcome::Pass).then(|| format_canon(&r.residual)),
                "note": r.note,
            })
        ),
        Format::Human => {
            out!("{}", r.outcome);
            if r.outcome != Outcome::Pass {
                out!("residual: {}", format_canon(&r.residual));
            }
            if let Some(n) = &r.note {
                out!("note: {n}");
            }
        }
    }
    Ok(code(r.outcome))
}

fn determining(cli: &Cli, file: &Path, ansatz: Ansatz) -> Result<u8> {
    let inst = read_equation(cli, file, &[])?;
    let sys = determining_system(&inst.equation, ansatz).map_err(|e| CliError::Undecided(e.to_string()))?;
    for d in &sys {
        match cli.format {
            Format::Json => out!("{}", json!({"monomial": d.monomial_text(), "lhs": format_canon(&d.lhs)})),
            Format::Human => out!("[{}] {} = 0", d.monomial_text(), format_canon(&d.lhs)),
        }
    }
    Ok(0)
}

fn transform(cli: &Cli, map: &Path, file: &Path, target: Option<&Path>, set: &[String]) -> Result<u8> {
    let spec = read_spec(map)?;
    let params: Vec<(String, Q)> = {
        let case = ClassificationCase { id: spec.id.clone(), table: String::new(), gauge: Gauge::GIs1, spec: spec.clone() };
        setting(&case, set)?.params
    };
    let psi = Catalog::empty().with_chart(cli.chart).map_of(&spec, &params)?;
    let src = read_equation(cli, file, &[])?;
    if let Some(t) = target {
        let dst = read_equation(cli, t, &[])?;
        let r = verify_maps(&psi, &src.equation, &dst.equation);
        match cli.format {
            Format::Json => out!(
                "{}",
                json!({
                    "verdict": r.outcome.to_string(),
                    "multiplier": r.multiplier.as_ref().map(format_canon),
                    "residual": (r.outcome != Outcome::Pass).then(|| format_canon(&r.residual)),
                    "note": r.note,
                })
            ),
            Format::Human => {
                out!("{}", r.outcome);
                if let Some(m) = &r.multiplier {
                    out!("multiplier: {}", format_canon(m));
                }
                if r.outcome != Outcome::Pass {
                    out!("residual: {}", format_canon(&r.residual));
                }
                if let Some(n) = &r.note {
                    out!("note: {n}");
                }
            }
        }
        return Ok(code(r.outcome));
    }
    let img = act_point(&psi, &src.equation)?;
    let fields = |e: &dcsym::equation::DCEquation| {
        e.elements().iter().map(|(n, c)| (n.to_string(), Value::String(format_canon(c)))).collect::<serde_json::Map<_, _>>()
    };
    match (&img.equation, cli.format) {
        (Some(e), Format::Json) => out!("{}", json!({"in_class": true, "equation": fields(e)})),
        (Some(e), Format::Human) => out!("{e}"),
        (None, Format::Json) => out!("{}", json!({"in_class": false, "residual": format_canon(&img.residual)})),
        (None, Format::Human) => out!("not in class\nresidual: {}", format_canon(&img.residual)),
    }
    Ok(if img.equation.is_some() { 0 } else { 1 })
}

fn combination(c: &[Q]) -> String {
    let mut parts = Vec::new();
    for (k, q) in c.iter().enumerate() {
        if *q == Q::from_integer(0.into()) {
            continue;
        }
        let q = Canon::q(q.clone());
        parts.push(if q.is_one() {
            format!("Q{}", k + 1)
        } else if q.neg().is_one() {
            format!("-Q{}", k + 1)
        } else {
            format!("{}*Q{}", format_canon(&q), k + 1)
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn print_constants(cli: &Cli, names: &[String], sc: &StructureConstants) {
    for i in 0..sc.n {
        for j in i + 1..sc.n {
            let text = combination(&sc.c[i][j]);
            match cli.format {
                Format::Json => out!("{}", json!({"left": names[i], "right": names[j], "bracket": text})),
                Format::Human => out!("[{}, {}] = {text}", names[i], names[j]),
            }
        }
    }
}

fn brackets(cli: &Cli, case: Option<&str>, fields: &[String]) -> Result<u8> {
    let (names, basis, rels): (Vec<String>, Vec<VectorField>, _) = match case {
        Some(id) => {
            let cat = catalog(cli)?;
            let inst = cat.instantiate(cat.case(id)?, &[])?;
            let names = inst.basis.iter().map(|(n, _)| n.clone()).collect();
            let basis = inst.basis.into_iter().map(|(_, q)| q).collect();
            (names, basis, inst.equation.relations)
        }
        None if fields.is_empty() => return Err(CliError::Usage("give --case or at least one field".into())),
        None => {
            let basis = fields
                .iter()
                .map(|f| VectorField::parse(f).map_err(|e| CliError::Usage(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            ((1..=basis.len()).map(|i| format!("Q{i}")).collect(), basis, Vec::new())
        }
    };
    match closure_check_mod(&basis, &rels, cli.chart) {
        Ok(sc) => {
            print_constants(cli, &names, &sc);
            Ok(0)
        }
        Err(e @ ClosureError::Unsupported(_)) => Err(CliError::Undecided(e.to_string())),
        Err(e) => {
            out!("not closed: {e}");
            Ok(1)
        }
    }
}

fn gauge_cmd(cli: &Cli, file: &Path, want: Option<&str>) -> Result<u8> {
    let inst = read_equation(cli, file, &[])?;
    let e = &inst.equation;
    let (one, gh) = (e.gauge_check(Gauge::GIs1), e.gauge_check(Gauge::GIsH));
    match cli.format {
        Format::Json => out!("{}", json!({"g=1": one, "g=h": gh})),
        Format::Human => out!("g=1: {one}\ng=h: {gh}"),
    }
    match want.map(|g| g.parse::<Gauge>().map_err(CliError::Usage)).transpose()? {
        Some(Gauge::GIs1) => Ok(if one { 0 } else { 1 }),
        Some(Gauge::GIsH) => Ok(if gh { 0 } else { 1 }),
        None => Ok(0),
    }
}
