//! Subcommands of the `jbc` tool.
//!
//! Every command reads a system file, runs one computation and produces a
//! [`Report`]: a structured body rendered as JSON (`--json`) or as indented
//! `key: value` text, plus an exit status.
//!
//! Exit status: 0 success, HOLDS or Member; 1 VIOLATED; 2 INCONCLUSIVE
//! (including incomplete decompositions); 3 usage errors; 4 computation or
//! input errors (with a stable `E_*` code); 5 I/O errors.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jbc_core::decompose::{jbc_check, split_decompose, CharSetComponent, ComponentSource, SplitBounds, Verdict};
use jbc_core::diffpoly::{Convention, DiffPoly, Order, Ring};
use jbc_core::jacobi::{jacobi_assign, jacobi_brute, order_matrix, ritt_bound, JacobiResult, OrderMatrix, MAX_BRUTE};
use jbc_core::linearize::{jacobi_after_linearization, linearize_sym, linearized_system};
use jbc_core::oracle::{radical_member, truncated_member_with, MembershipWitness, TruncationBounds};
use jbc_core::par::Exec;
use jbc_core::point::DiffPoint;
use jbc_core::ranking::Ranking;
use jbc_core::reduction::{ritt_reduce_seq, verify_certificate, FactorKind};
use jbc_core::text::{parse_components, parse_poly, parse_ranking, parse_system, SystemFile};
use serde_json::{json, Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_ERROR: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "jbc", version, about = "Differential-algebra workbench: Jacobi numbers, Ritt division, decompositions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Order of every equation in every variable.
    Order(OrderArgs),
    /// Order matrix, Jacobi number with an optimal assignment, Ritt bound.
    Jacobi(JacobiArgs),
    /// Ritt division with a certificate.
    Reduce(ReduceArgs),
    /// Linearization, symbolic or at a point.
    Linearize(LinearizeArgs),
    /// Bounded splitting into characteristic-set components.
    Decompose(DecomposeArgs),
    /// Compare component dimensions with the Jacobi number.
    JbcCheck(JbcArgs),
    /// Truncated ideal membership.
    Member(MemberArgs),
    /// Truncated radical membership: the first power in the truncated span.
    RadicalMember(MemberArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Maxplus,
    Minusinf,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Maxplus => Convention::MaxPlus,
            ConventionArg::Minusinf => Convention::MinusInfinity,
        }
    }
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// System file.
    pub system: PathBuf,
    /// Override the file's ranking, e.g. `elim x > y` or `orderly y < x`.
    #[arg(long)]
    pub ranking: Option<String>,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long, value_enum, default_value = "maxplus")]
    pub convention: ConventionArg,
}

#[derive(Debug, Args)]
pub struct JacobiArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long, value_enum, default_value = "maxplus")]
    pub convention: ConventionArg,
    /// Also enumerate all permutations and check they agree.
    #[arg(long)]
    pub brute: bool,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    /// Equation name or expression to reduce; defaults to the first equation.
    #[arg(long)]
    pub target: Option<String>,
    /// Comma-separated equation names forming the autoreduced sequence;
    /// defaults to every other equation.
    #[arg(long, value_delimiter = ',')]
    pub by: Vec<String>,
    /// Reduce by the characteristic sequence of this component instead.
    #[arg(long, conflicts_with = "by")]
    pub component: Option<String>,
    /// Component file for `--component`.
    #[arg(long)]
    pub components: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LinearizeArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    /// Named point of the system file.
    #[arg(long, conflicts_with = "generic")]
    pub at: Option<String>,
    /// Generic point of the named component.
    #[arg(long)]
    pub generic: Option<String>,
    /// Component file for `--generic`.
    #[arg(long)]
    pub components: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long, default_value_t = SplitBounds::default().max_components)]
    pub max_components: usize,
    #[arg(long, default_value_t = SplitBounds::default().max_steps)]
    pub max_steps: usize,
}

impl SplitArgs {
    fn bounds(&self) -> SplitBounds {
        SplitBounds {
            max_components: self.max_components,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Args)]
pub struct JbcArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    /// Ingest an externally computed decomposition instead of splitting.
    #[arg(long)]
    pub components: Option<PathBuf>,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Args)]
pub struct MemberArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    /// Polynomial to test.
    #[arg(long)]
    pub target: String,
    /// Comma-separated generator names; defaults to all equations.
    #[arg(long, value_delimiter = ',')]
    pub gens: Vec<String>,
    /// All four bounds at once: `N,P,D,E`.
    #[arg(long, value_parser = parse_bounds)]
    pub bounds: Option<TruncationBounds>,
    #[arg(long)]
    pub jets: Option<u32>,
    #[arg(long)]
    pub prolong: Option<u32>,
    #[arg(long)]
    pub deg: Option<u32>,
    #[arg(long)]
    pub power: Option<u32>,
}

impl MemberArgs {
    fn truncation(&self) -> TruncationBounds {
        let mut b = self.bounds.unwrap_or_default();
        b.jet_order = self.jets.unwrap_or(b.jet_order);
        b.prolongation = self.prolong.unwrap_or(b.prolongation);
        b.degree = self.deg.unwrap_or(b.degree);
        b.power = self.power.unwrap_or(b.power);
        b
    }
}

fn parse_bounds(s: &str) -> Result<TruncationBounds, String> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [n, p, d, e] => Ok(TruncationBounds::new(n, p, d, e)),
        _ => Err(format!("expected N,P,D,E, got {} values", parts.len())),
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(jbc_core::Error),
    Io { path: PathBuf, message: String },
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "E_IO",
            CliError::Usage(_) => "E_USAGE",
        }
    }

    pub fn exit_status(&self) -> i32 {
        match self {
            CliError::Core(_) => EXIT_ERROR,
            CliError::Io { .. } => EXIT_IO,
            CliError::Usage(_) => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<jbc_core::Error> for CliError {
    fn from(e: jbc_core::Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub status: i32,
    pub body: Value,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

struct Context {
    file: SystemFile,
    ranking: Ranking,
}

impl Context {
    fn load(args: &SystemArgs) -> CliResult<Context> {
        let file = parse_system(&read(&args.system)?)?;
        let ranking = match &args.ranking {
            Some(r) => parse_ranking(r, &file.ring)?,
            None => file.ranking.clone(),
        };
        Ok(Context { file, ranking })
    }

    fn ring(&self) -> &Arc<Ring> {
        &self.file.ring
    }

    fn equation(&self, name: &str) -> CliResult<&DiffPoly> {
        self.file
            .equations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
            .ok_or_else(|| CliError::Usage(format!("no equation named `{name}`")))
    }

    fn components(&self, path: Option<&Path>) -> CliResult<Vec<CharSetComponent>> {
        match path {
            Some(p) => Ok(parse_components(&read(p)?, self.ring(), &self.ranking)?),
            None => Ok(self.file.components.clone()),
        }
    }

    fn component(&self, path: Option<&Path>, name: &str) -> CliResult<CharSetComponent> {
        self.components(path)?
            .into_iter()
            .find(|c| c.name == name)
            .ok_or_else(|| CliError::Usage(format!("no component named `{name}`")))
    }

    fn names(&self) -> Vec<String> {
        self.file.equations.iter().map(|(n, _)| n.clone()).collect()
    }
}

fn order_text(o: Order) -> Value {
    match o {
        Order::Finite(v) => json!(v),
        Order::NegInf => json!("-inf"),
    }
}

fn matrix_json(m: &OrderMatrix) -> Value {
    Value::Array(
        m.entries
            .iter()
            .map(|row| Value::Array(row.iter().map(|&o| order_text(o)).collect()))
            .collect(),
    )
}

fn assignment_json(j: &JacobiResult, m: &OrderMatrix, eqs: &[String], ring: &Ring) -> Value {
    match &j.witness {
        None => Value::Null,
        Some(w) => Value::Array(
            w.iter()
                .enumerate()
                .map(|(var, &eq)| {
                    json!({
                        "equation": eqs[eq],
                        "variable": ring.names()[var],
                        "order": order_text(m.get(eq, var)),
                    })
                })
                .collect(),
        ),
    }
}

fn cmd_order(args: &OrderArgs) -> CliResult<Report> {
    let ctx = Context::load(&args.sys)?;
    let conv: Convention = args.convention.into();
    let ring = ctx.ring();
    let eqs: Vec<Value> = ctx
        .file
        .equations
        .iter()
        .map(|(name, p)| {
            let mut orders = Map::new();
            for (j, v) in ring.names().iter().enumerate() {
                orders.insert(v.clone(), order_text(p.order_of(j, conv)));
            }
            json!({ "name": name, "equation": p.to_string(), "orders": orders })
        })
        .collect();
    Ok(Report {
        status: EXIT_OK,
        body: json!({
            "command": "order",
            "convention": conv.to_string(),
            "variables": ring.names(),
            "equations": eqs,
        }),
    })
}

fn cmd_jacobi(args: &JacobiArgs) -> CliResult<Report> {
    let ctx = Context::load(&args.sys)?;
    let conv: Convention = args.convention.into();
    let m = order_matrix(&ctx.file.polys(), ctx.ring().nvars(), conv)?;
    let j = jacobi_assign(&m);
    let mut body = json!({
        "command": "jacobi",
        "convention": conv.to_string(),
        "order_matrix": matrix_json(&m),
        "jacobi": order_text(j.value),
        "assignment": assignment_json(&j, &m, &ctx.names(), ctx.ring()),
        "ritt_bound": ritt_bound(&m),
    });
    if args.brute {
        if m.n() > MAX_BRUTE {
            return Err(jbc_core::Error::TooLargeForBruteForce { n: m.n(), max: MAX_BRUTE }.into());
        }
        let b = jacobi_brute(&m)?;
        body["brute_force_agrees"] = json!(b == j);
    }
    Ok(Report { status: EXIT_OK, body })
}

fn cmd_reduce(args: &ReduceArgs) -> CliResult<Report> {
    let ctx = Context::load(&args.sys)?;
    let names = ctx.names();
    let target_src = args.target.clone().or_else(|| names.first().cloned());
    let Some(target_src) = target_src else {
        return Err(CliError::Usage("the system has no equations".into()));
    };
    let (target_name, target) = match ctx.equation(&target_src) {
        Ok(p) => (target_src.clone(), p.clone()),
        Err(_) => ("target".to_string(), parse_poly(&target_src, ctx.ring())?),
    };
    let (div_names, seq): (Vec<String>, Vec<DiffPoly>) = match &args.component {
        Some(c) => {
            let comp = ctx.component(args.components.as_deref(), c)?;
            let n = comp.sequence.len();
            ((1..=n).map(|i| format!("{c}[{i}]")).collect(), comp.sequence)
        }
        None => {
            let by: Vec<String> = if args.by.is_empty() {
                names.iter().filter(|n| **n != target_name).cloned().collect()
            } else {
                args.by.clone()
            };
            let polys = by.iter().map(|n| ctx.equation(n).cloned()).collect::<CliResult<Vec<_>>>()?;
            (by, polys)
        }
    };
    let cert = ritt_reduce_seq(&target, &seq, &ctx.ranking)?;
    let verified = verify_certificate(&cert, &target, &seq, &ctx.ranking);
    let factors: Vec<String> = cert
        .factors
        .iter()
        .map(|f| {
            let kind = match f.kind {
                FactorKind::Separant => "separant",
                FactorKind::Initial => "initial",
            };
            format!("{kind}({})^{}", div_names[f.divisor], f.exponent)
        })
        .collect();
    let quotients: Vec<Value> = div_names
        .iter()
        .zip(&cert.quotients)
        .map(|(n, q)| json!({ "divisor": n, "operator": q.to_string() }))
        .collect();
    Ok(Report {
        status: EXIT_OK,
        body: json!({
            "command": "reduce",
            "ranking": ctx.ranking.describe(ctx.ring()),
            "target": target.to_string(),
            "divisors": div_names.iter().zip(&seq).map(|(n, p)| json!({ "name": n, "equation": p.to_string() })).collect::<Vec<_>>(),
            "multiplier": cert.multiplier.to_string(),
            "factors": factors,
            "quotients": quotients,
            "remainder": cert.remainder.to_string(),
            "reduces_to_zero": cert.remainder.is_zero(),
            "steps": cert.steps,
            "verified": verified,
        }),
    })
}

fn cmd_linearize(args: &LinearizeArgs) -> CliResult<Report> {
    let ctx = Context::load(&args.sys)?;
    let ring = ctx.ring();
    let us = ctx.file.polys();
    let names = ctx.names();
    let (label, point) = match (&args.at, &args.generic) {
        (Some(name), _) => {
            let pt = ctx
                .file
                .points
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| CliError::Usage(format!("no point named `{name}`")))?;
            (name.clone(), Some(pt))
        }
        (None, Some(c)) => {
            let comp = ctx.component(args.components.as_deref(), c)?;
            (format!("generic point of {c}"), Some(DiffPoint::generic(comp)))
        }
        (None, None) => ("symbolic".to_string(), None),
    };
    let Some(pt) = point else {
        let eqs: Vec<Value> = names
            .iter()
            .zip(&us)
            .map(|(n, u)| json!({ "name": n, "linearization": linearize_sym(u).to_string() }))
            .collect();
        return Ok(Report {
            status: EXIT_OK,
            body: json!({ "command": "linearize", "point": label, "equations": eqs }),
        });
    };
    let lins = linearized_system(&us, &pt)?;
    let heuristic = matches!(&pt, DiffPoint::Generic(c) if !c.prime_verified);
    let eqs: Vec<Value> = names
        .iter()
        .zip(&lins)
        .map(|(n, l)| json!({ "name": n, "linearization": l.describe(ring) }))
        .collect();
    let mut body = json!({
        "command": "linearize",
        "point": label,
        "heuristic": heuristic,
        "equations": eqs,
    });
    if us.len() == ring.nvars() {
        for (conv, key) in [(Convention::MaxPlus, "weak"), (Convention::MinusInfinity, "strong")] {
            let (m, j) = jacobi_after_linearization(&us, &pt, conv)?;
            let orig = jacobi_assign(&order_matrix(&us, ring.nvars(), conv)?);
            body[format!("order_matrix_{key}")] = matrix_json(&m);
            body[format!("jacobi_linearized_{key}")] = order_text(j.value);
            body[format!("jacobi_original_{key}")] = order_text(orig.value);
        }
    }
    Ok(Report { status: EXIT_OK, body })
}

fn components_json(comps: &[CharSetComponent]) -> Vec<Value> {
    comps
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "sequence": c.key(),
                "inequations": c.inequations.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "dimension": jbc_core::decompose::component_dimension(c).to_string(),
            })
        })
        .collect()
}

fn exec(cli: &Cli) -> Exec {
    if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn cmd_decompose(args: &DecomposeArgs, exec: Exec) -> CliResult<Report> {
    let ctx = Context::load(&args.sys)?;
    let d = split_decompose(&ctx.file.polys(), &ctx.ranking, args.split.bounds(), exec)?;
    Ok(Report {
        status: if d.complete { EXIT_OK } else { EXIT_INCONCLUSIVE },
        body: json!({
            "command": "decompose",
            "ranking": ctx.ranking.describe(ctx.ring()),
            "complete": d.complete,
            "steps": d.steps,
            "components": components_json(&d.components),
        }),
    })
}

fn cmd_jbc(args: &JbcArgs, exec: Exec) -> CliResult<Report> {
    let ctx = Context::load(&args.sys)?;
    let source = match &args.components {
        Some(p) => ComponentSource::Ingested(ctx.components(Some(p))?),
        None if !ctx.file.components.is_empty() => ComponentSource::Ingested(ctx.file.components.clone()),
        None => ComponentSource::Split(args.split.bounds()),
    };
    let rep = jbc_check(&ctx.file.equations, &ctx.ranking, source, exec)?;
    let status = match rep.verdict {
        Verdict::Holds => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let mut body = json!({ "command": "jbc-check" });
    let detail = serde_json::to_value(&rep).expect("report serializes");
    if let (Value::Object(b), Value::Object(d)) = (&mut body, detail) {
        b.extend(d);
    }
    body["dimensions"] = json!(rep.components.iter().map(|c| c.dimension.to_string()).collect::<Vec<_>>());
    Ok(Report { status, body })
}

fn witness_json(w: &MembershipWitness, f: &DiffPoly, b: &TruncationBounds) -> Value {
    json!({
        "verdict": if w.is_member() { "Member" } else { "Inconclusive" },
        "power": w.is_member().then_some(w.power),
        "combination": w.is_member().then(|| w.describe(f)),
        "terms": w.terms.len(),
        "columns": w.columns,
        "rank": w.rank,
        "bounds": b.to_string(),
        "diagnostic": w.diagnostic,
    })
}

fn cmd_member(args: &MemberArgs, radical: bool, exec: Exec) -> CliResult<Report> {
    let ctx = Context::load(&args.sys)?;
    let f = parse_poly(&args.target, ctx.ring())?;
    let gen_names = if args.gens.is_empty() { ctx.names() } else { args.gens.clone() };
    let gens = gen_names.iter().map(|n| ctx.equation(n).cloned()).collect::<CliResult<Vec<_>>>()?;
    let b = args.truncation();
    let w = if radical {
        radical_member(&f, &gens, &b)?
    } else {
        truncated_member_with(exec, &f, &gens, &b)?
    };
    let verified = w.is_member() && w.verify(&f, &gens);
    let mut body = json!({
        "command": if radical { "radical-member" } else { "member" },
        "target": f.to_string(),
        "generators": gen_names.iter().zip(&gens).map(|(n, g)| json!({ "name": n, "equation": g.to_string() })).collect::<Vec<_>>(),
    });
    if let (Value::Object(m), Value::Object(w)) = (&mut body, witness_json(&w, &f, &b)) {
        m.extend(w);
    }
    body["verified"] = json!(verified);
    let status = if w.is_member() { EXIT_OK } else { EXIT_INCONCLUSIVE };
    Ok(Report { status, body })
}

/// Runs one parsed command line.
pub fn run_command(cli: &Cli) -> Result<Report, CliError> {
    let ex = exec(cli);
    match &cli.command {
        Command::Order(a) => cmd_order(a),
        Command::Jacobi(a) => cmd_jacobi(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Linearize(a) => cmd_linearize(a),
        Command::Decompose(a) => cmd_decompose(a, ex),
        Command::JbcCheck(a) => cmd_jbc(a, ex),
        Command::Member(a) => cmd_member(a, false, ex),
        Command::RadicalMember(a) => cmd_member(a, true, ex),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object()) => {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        _ => None,
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(item, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

/// Renders a report body; JSON output is pretty-printed with a trailing
/// newline.
pub fn render(body: &Value, json: bool) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(body).expect("value serializes");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        render_text(body, 0, &mut s);
        s
    }
}

pub fn render_error(e: &CliError, json: bool) -> String {
    if json {
        render(&json!({ "error": { "code": e.code(), "message": e.to_string() } }), true)
    } else {
        format!("error[{}]: {e}\n", e.code())
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit status with the text for stdout and stderr.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_OK, text, String::new()),
                _ => (EXIT_USAGE, String::new(), text),
            };
        }
    };
    match run_command(&cli) {
        Ok(r) => (r.status, render(&r.body, cli.json), String::new()),
        Err(e) if cli.json => (e.exit_status(), render_error(&e, true), String::new()),
        Err(e) => (e.exit_status(), String::new(), render_error(&e, false)),
    }
}
