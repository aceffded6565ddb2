//! Batch front end: series, kernel dimensions, generator tables, example
//! verification, the lifting map, and corpus maintenance.
//!
//! Data goes to stdout (or `--out`), diagnostics to stderr. Exit codes:
//! 2 for usage errors including bad partitions and unknown example ids,
//! 3 when a closed form is requested but unavailable and truncation was
//! not allowed, 4 when no invariant generators are available, 1 for
//! failed verification or internal errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wdk_core::constants::{
    builtin_invariants, invariant_generators, kernel_bidegree_dimensions, kernel_dimensions,
    lift_module_generators, module_generators, pi_lie, ModuleRelation,
};
use wdk_core::corpus;
use wdk_core::metabelian::LieElement;
use wdk_core::nice::NiceRational;
use wdk_core::omega::{
    dimensions_from_weights, graded_from_bigraded, kernel_bigraded_closed,
    kernel_bigraded_truncated, partition_arity, DEFAULT_OMEGA_BUDGET,
};
use wdk_core::polynomial::{parse_x_polynomial, Polynomial};
use wdk_core::series::Truncation;
use wdk_core::weitzenbock::{Bidegree, Derivation};
use wdk_core::{Error, Space};

#[derive(Parser)]
#[command(
    name = "wdk",
    version,
    about = "Constants of Weitzenbock derivations on free metabelian Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert series of the constants, graded or weight-refined
    Hilbert(HilbertArgs),
    /// Exact kernel dimensions per degree, from linear algebra
    KernelDims(KernelDimsArgs),
    /// Module generators and relations of the commutator constants
    Generators(GeneratorsArgs),
    /// Check one bundled example against recomputation
    Verify(VerifyArgs),
    /// Apply the lifting map to a polynomial
    Pi(PiArgs),
    /// Maintenance of the bundled example files
    Corpus(CorpusArgs),
}

/// Comma-separated cell sizes, non-increasing, e.g. `2,0`.
#[derive(Clone, Debug)]
struct PartitionArg(Vec<u32>);

impl FromStr for PartitionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Result<Vec<u32>, _> = s.split(',').map(|t| t.trim().parse::<u32>()).collect();
        let parts =
            parts.map_err(|_| format!("bad partition {s:?}: expected comma-separated sizes"))?;
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(format!("partition {s:?} must be non-increasing"));
        }
        Ok(PartitionArg(parts))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    /// Polynomial constants
    Poly,
    /// Commutator constants
    Commutator,
    /// Constants of the whole algebra
    Lie,
}

impl SpaceArg {
    fn space(self) -> Space {
        match self {
            SpaceArg::Poly => Space::Polynomial,
            SpaceArg::Commutator => Space::Commutator,
            SpaceArg::Lie => Space::WholeLie,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SpaceArg::Poly => "poly",
            SpaceArg::Commutator => "commutator",
            SpaceArg::Lie => "lie",
        }
    }
}

#[derive(Args)]
struct HilbertArgs {
    #[arg(long)]
    partition: PartitionArg,
    /// Expansion order; defaults to 8 for rank <= 5 and 6 above
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    max_degree: Option<u32>,
    #[arg(long, value_enum, default_value = "lie")]
    space: SpaceArg,
    /// Weight-refined series in t1, t2, z instead of the z-series
    #[arg(long)]
    bigraded: bool,
    /// Attempt the closed form of the series
    #[arg(long)]
    closed_form: bool,
    /// Fall back to the truncated series if the closed form fails
    #[arg(long)]
    truncate: bool,
    #[arg(long)]
    json: bool,
    /// Write the output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KernelDimsArgs {
    #[arg(long)]
    partition: PartitionArg,
    /// Degree bound; defaults to 8 for rank <= 5 and 6 above
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    max_degree: Option<u32>,
    #[arg(long, value_enum, default_value = "lie")]
    space: SpaceArg,
    /// Split each degree by weight
    #[arg(long)]
    bigraded: bool,
    #[arg(long)]
    json: bool,
    /// Write the output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GeneratorsArgs {
    #[arg(long)]
    partition: PartitionArg,
    /// Discovery bound; defaults to 8 for rank <= 5 and 6 above
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    max_degree: Option<u32>,
    /// Derive invariant generators up to the bound when no tabulated
    /// list exists
    #[arg(long)]
    compute_invariants: bool,
    /// Lift the generators of the partition without its trailing zero
    /// cell instead of running discovery directly
    #[arg(long)]
    lift: bool,
    #[arg(long)]
    json: bool,
    /// Write the output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Example id, e.g. delta-3
    #[arg(long)]
    example: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PiArgs {
    /// Polynomial in x1..xd, e.g. "x2^2 - 2*x1*x3"
    poly: String,
    /// Number of variables; inferred from the polynomial when absent
    #[arg(long)]
    arity: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CorpusArgs {
    #[command(subcommand)]
    action: CorpusAction,
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Regenerate the bundled example JSON files
    Rebuild(RebuildArgs),
}

#[derive(Args)]
struct RebuildArgs {
    /// Target directory
    #[arg(long, default_value = "corpus")]
    out: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn internal(e: Error) -> Failure {
    fail(1, e.to_string())
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("WDK_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("ignoring WDK_THREADS={v:?}: expected a positive integer"),
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Hilbert(args) => cmd_hilbert(args),
        Command::KernelDims(args) => cmd_kernel_dims(args),
        Command::Generators(args) => cmd_generators(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Pi(args) => cmd_pi(args),
        Command::Corpus(args) => match args.action {
            CorpusAction::Rebuild(args) => cmd_corpus_rebuild(args),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn default_bound(d: usize) -> u32 {
    if d <= 5 {
        8
    } else {
        6
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| fail(1, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, doc: &Value) -> CmdResult {
    let mut text = serde_json::to_string_pretty(doc).expect("serializable document");
    text.push('\n');
    emit(out, &text)
}

fn names(prefix: &str, arity: usize) -> Vec<String> {
    (1..=arity).map(|i| format!("{prefix}{i}")).collect()
}

fn render_poly(p: &Polynomial, names: &[String]) -> String {
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    p.render(&refs)
}

fn render_nice(m: &NiceRational, names: &[&str]) -> String {
    m.render(names)
}

fn cmd_hilbert(args: HilbertArgs) -> CmdResult {
    let partition = &args.partition.0;
    let d = partition_arity(partition).map_err(|e| fail(2, e.to_string()))?;
    let order = args.max_degree.unwrap_or(default_bound(d));
    let space = args.space.space();
    let closed = if args.closed_form {
        match kernel_bigraded_closed(space, partition, DEFAULT_OMEGA_BUDGET) {
            Ok(m) => Some(m),
            Err(e) if args.truncate => {
                eprintln!("closed form unavailable ({e}); series truncated at {order}");
                None
            }
            Err(e) => return Err(fail(3, format!("closed form unavailable: {e}"))),
        }
    } else {
        None
    };
    let trunc = Truncation::Var { var: 2, order };
    let series = match closed.as_ref().map(|m| m.expand(trunc)) {
        Some(Ok(s)) => s,
        _ => kernel_bigraded_truncated(space, partition, order).map_err(internal)?,
    };
    if args.bigraded {
        let tnames = ["t1", "t2", "z"];
        if args.json {
            let doc = json!({
                "partition": partition,
                "space": args.space.name(),
                "order": order,
                "closed": closed.as_ref().map(NiceRational::to_json),
                "weights": series.to_json_weights(),
            });
            return emit_json(&args.out, &doc);
        }
        let mut text = String::new();
        if let Some(m) = &closed {
            let _ = writeln!(text, "closed form: {}", render_nice(m, &tnames));
        }
        let _ = writeln!(text, "degree  weights");
        let tname_vec: Vec<String> = tnames.iter().map(|s| s.to_string()).collect();
        for n in 0..=order {
            let slice = series.var_slice(2, n);
            let _ = writeln!(text, "{n:>6}  {}", render_poly(&slice, &tname_vec));
        }
        return emit(&args.out, &text);
    }
    let closed_graded = match &closed {
        Some(m) => Some(graded_from_bigraded(m).map_err(internal)?),
        None => None,
    };
    let dims = dimensions_from_weights(&series).map_err(internal)?;
    if args.json {
        let doc = json!({
            "partition": partition,
            "space": args.space.name(),
            "order": order,
            "closed": closed_graded.as_ref().map(NiceRational::to_json),
            "dimensions": dims,
        });
        return emit_json(&args.out, &doc);
    }
    let mut text = String::new();
    if let Some(m) = &closed_graded {
        let _ = writeln!(text, "closed form: {}", render_nice(m, &["z"]));
    }
    let _ = writeln!(text, "degree  dimension");
    for (n, k) in dims.iter().enumerate() {
        let _ = writeln!(text, "{n:>6}  {k}");
    }
    emit(&args.out, &text)
}

fn cmd_kernel_dims(args: KernelDimsArgs) -> CmdResult {
    let partition = &args.partition.0;
    let deriv = Derivation::from_partition(partition).map_err(|e| fail(2, e.to_string()))?;
    let order = args.max_degree.unwrap_or(default_bound(deriv.arity()));
    let space = args.space.space();
    if args.bigraded {
        let dims = kernel_bidegree_dimensions(&deriv, space, order);
        if args.json {
            let items: Vec<Value> = dims
                .iter()
                .enumerate()
                .map(|(n, slice)| {
                    let weights: Vec<Value> = slice
                        .iter()
                        .map(|(&(a, b), &k)| json!({"t1": a, "t2": b, "dim": k}))
                        .collect();
                    json!({"z": n, "weights": weights})
                })
                .collect();
            let doc = json!({
                "partition": partition,
                "space": args.space.name(),
                "order": order,
                "degrees": items,
            });
            return emit_json(&args.out, &doc);
        }
        let mut text = String::new();
        let _ = writeln!(text, "degree  t1  t2  dimension");
        for (n, slice) in dims.iter().enumerate() {
            for (&(a, b), &k) in slice {
                let _ = writeln!(text, "{n:>6}  {a:>2}  {b:>2}  {k}");
            }
        }
        return emit(&args.out, &text);
    }
    let dims = kernel_dimensions(&deriv, space, order);
    if args.json {
        let doc = json!({
            "partition": partition,
            "space": args.space.name(),
            "order": order,
            "dimensions": dims,
        });
        return emit_json(&args.out, &doc);
    }
    let mut text = String::new();
    let _ = writeln!(text, "degree  dimension");
    for (n, k) in dims.iter().enumerate() {
        let _ = writeln!(text, "{n:>6}  {k}");
    }
    emit(&args.out, &text)
}

/// Tabulated invariants if available, otherwise discovered ones when
/// allowed; exit 4 when neither applies.
fn invariants_for(partition: &[u32], compute: bool, order: u32) -> Result<Vec<Polynomial>, Failure> {
    match builtin_invariants(partition) {
        Ok(f) => Ok(f),
        Err(Error::NoBuiltinInvariants(_)) if compute => {
            let deriv = Derivation::from_partition(partition).map_err(|e| fail(2, e.to_string()))?;
            Ok(invariant_generators(&deriv, order))
        }
        Err(e @ Error::NoBuiltinInvariants(_)) => Err(fail(
            4,
            format!("{e}; pass --compute-invariants to derive them up to the degree bound"),
        )),
        Err(e) => Err(fail(2, e.to_string())),
    }
}

fn generator_rows(deriv: &Derivation, gens: &[LieElement]) -> Vec<(LieElement, u32, Bidegree)> {
    gens.iter()
        .map(|c| {
            let m = c.terms().next().expect("nonzero generator").0;
            (c.clone(), m.degree(), deriv.lie_bidegree(m))
        })
        .collect()
}

fn presentation_doc(
    partition: &[u32],
    order: u32,
    invariants: &[Polynomial],
    rows: &[(LieElement, u32, Bidegree)],
    relations: &[ModuleRelation],
    lifted_from: Option<&[u32]>,
) -> Value {
    let xnames = names("x", invariants.first().map_or(0, Polynomial::arity));
    let inv_items: Vec<Value> = invariants
        .iter()
        .map(|f| json!({"poly": f.to_json(), "render": render_poly(f, &xnames)}))
        .collect();
    let gen_items: Vec<Value> = rows
        .iter()
        .map(|(c, deg, (a, b))| {
            json!({
                "element": c.to_json(),
                "render": c.to_string(),
                "degree": deg,
                "bidegree": [a, b],
            })
        })
        .collect();
    let rel_items: Vec<Value> = relations
        .iter()
        .map(|r| {
            let coeffs: Vec<Value> = r.coefficients.iter().map(Polynomial::to_json).collect();
            json!({
                "coefficients": coeffs,
                "degree": r.degree,
                "bidegree": [r.bidegree.0, r.bidegree.1],
            })
        })
        .collect();
    let mut doc = serde_json::Map::new();
    doc.insert("partition".into(), json!(partition));
    doc.insert("certified_to".into(), json!(order));
    doc.insert("invariants".into(), Value::Array(inv_items));
    doc.insert("generators".into(), Value::Array(gen_items));
    doc.insert("relations".into(), Value::Array(rel_items));
    if let Some(base) = lifted_from {
        doc.insert("lifted_from".into(), json!(base));
    }
    Value::Object(doc)
}

fn presentation_text(
    invariants: &[Polynomial],
    rows: &[(LieElement, u32, Bidegree)],
    relations: &[ModuleRelation],
) -> String {
    let xnames = names("x", invariants.first().map_or(0, Polynomial::arity));
    let fnames = names("f", invariants.len());
    let mut text = String::new();
    let _ = writeln!(text, "invariants");
    for (i, f) in invariants.iter().enumerate() {
        let _ = writeln!(text, "  f{} = {}", i + 1, render_poly(f, &xnames));
    }
    let _ = writeln!(text, "generators");
    for (i, (c, deg, (a, b))) in rows.iter().enumerate() {
        let _ = writeln!(text, "  c{} = {c}  (degree {deg}, bidegree ({a}, {b}))", i + 1);
    }
    let _ = writeln!(text, "relations");
    for r in relations {
        let mut parts = Vec::new();
        for (i, u) in r.coefficients.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            parts.push(format!("({})*c{}", render_poly(u, &fnames), i + 1));
        }
        let _ = writeln!(text, "  {} = 0", parts.join(" + "));
    }
    text
}

fn cmd_generators(args: GeneratorsArgs) -> CmdResult {
    let partition = &args.partition.0;
    let deriv = Derivation::from_partition(partition).map_err(|e| fail(2, e.to_string()))?;
    let order = args.max_degree.unwrap_or(default_bound(deriv.arity()));
    if args.lift {
        let (last, base) = partition
            .split_last()
            .expect("the parser rejects empty partitions");
        if *last != 0 || base.is_empty() {
            return Err(fail(2, "--lift needs a partition with a trailing zero cell"));
        }
        let base_deriv = Derivation::from_partition(base).map_err(|e| fail(2, e.to_string()))?;
        let base_invariants = invariants_for(base, args.compute_invariants, order)?;
        let base_pres = module_generators(&base_deriv, &base_invariants, order);
        let base_gens: Vec<LieElement> = base_pres
            .generators
            .iter()
            .map(|g| g.element.clone())
            .collect();
        let lifted = lift_module_generators(&base_invariants, &base_gens).map_err(internal)?;
        let invariants = invariants_for(partition, args.compute_invariants, order)?;
        let rows = generator_rows(&deriv, &lifted);
        if args.json {
            let doc = presentation_doc(partition, order, &invariants, &rows, &[], Some(base));
            return emit_json(&args.out, &doc);
        }
        return emit(&args.out, &presentation_text(&invariants, &rows, &[]));
    }
    let invariants = invariants_for(partition, args.compute_invariants, order)?;
    let pres = module_generators(&deriv, &invariants, order);
    let rows: Vec<(LieElement, u32, Bidegree)> = pres
        .generators
        .iter()
        .map(|g| (g.element.clone(), g.degree, g.bidegree))
        .collect();
    if args.json {
        let doc = presentation_doc(partition, order, &invariants, &rows, &pres.relations, None);
        emit_json(&args.out, &doc)
    } else {
        emit(&args.out, &presentation_text(&invariants, &rows, &pres.relations))
    }
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let ex = match corpus::example(&args.example) {
        Ok(ex) => ex,
        Err(e @ Error::UnknownExample(_)) => {
            return Err(fail(
                2,
                format!("{e}; known ids: {}", corpus::EXAMPLE_IDS.join(", ")),
            ));
        }
        Err(e) => return Err(internal(e)),
    };
    match corpus::verify(&ex) {
        Ok(()) => {
            if args.json {
                let doc = json!({"example": ex.id, "status": "pass"});
                emit_json(&None, &doc)?;
            } else {
                println!("pass: {}", ex.id);
            }
            Ok(())
        }
        Err(Error::CorpusCheck(msg)) => {
            if args.json {
                let doc = json!({"example": ex.id, "status": "fail", "failed": msg});
                emit_json(&None, &doc)?;
            }
            Err(fail(1, format!("check failed: {msg}")))
        }
        Err(e) => Err(internal(e)),
    }
}

fn cmd_pi(args: PiArgs) -> CmdResult {
    let arity = args.arity.unwrap_or_else(|| inferred_arity(&args.poly));
    let f = parse_x_polynomial(&args.poly, arity).map_err(|e| fail(2, e.to_string()))?;
    let lifted = pi_lie(&f).map_err(internal)?;
    if args.json {
        let doc = json!({
            "arity": arity + 1,
            "element": lifted.to_json(),
            "render": lifted.to_string(),
        });
        emit_json(&None, &doc)
    } else {
        println!("{lifted}");
        Ok(())
    }
}

/// Largest variable index mentioned as `x<k>`, at least one.
fn inferred_arity(s: &str) -> usize {
    let bytes = s.as_bytes();
    let mut best = 1usize;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'x' {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 {
                if let Ok(k) = s[i + 1..j].parse::<usize>() {
                    best = best.max(k);
                }
            }
            i = j;
        } else {
            i += 1;
        }
    }
    best
}

fn cmd_corpus_rebuild(args: RebuildArgs) -> CmdResult {
    corpus::rebuild_json(&args.out).map_err(internal)?;
    eprintln!(
        "wrote {} example files into {}",
        corpus::EXAMPLE_IDS.len(),
        args.out.display()
    );
    Ok(())
}
