//! The subcommands of the binary. Each returns the text to print and an
//! exit code: 0 when a verified answer was produced, 2 on a step failure,
//! 1 on usage or I/O errors.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::coherence::{check_coherence, CoherenceConfig, Verdict};
use crate::engine::{find_filleting_with, AlwaysBreak, FilletingOutcome, FocusOracle, LazyFocus, Overrides, Tuning};
use crate::error::{Error, Result};
use crate::oracle::{
    clique_and_stable_exact, max_anticomplete_pair_exact, search_filleting_bruteforce, verify_certificate, Certificate,
};
use crate::pattern::{derive_caterpillar, hamiltonize, Pattern};
use crate::reduction::{eh_recursion, exact_base, rodl_split_heuristic, EhConfig};
use crate::{Graph, MassedGraphQ, Rational};

use super::format::{parse_graph_file, serialize_graph_file, GraphFile};
use super::generate::{generate_instance, named_pattern, parse_rational, Instance, Params};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_STEP_FAILURE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "filleting", version, about = "Induced filletings in massed graphs, with certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check ε-coherence (or (ε, r)-coherence) under the file's mass.
    Coherence(CoherenceArgs),
    /// Search for an induced filleting; print the certificate.
    Find(FindArgs),
    /// Re-check a certificate against a graph.
    Verify(VerifyArgs),
    /// Exhaustive searches for cross-checking.
    Oracle(OracleArgs),
    /// Clique and stable set by anticomplete splits.
    Eh(EhArgs),
    /// Write a generated instance as a graph file.
    Gen(GenArgs),
    /// Sweep gnp instances and write one CSV row per run.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Theorem,
    Exploratory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

/// Where the host graph comes from: a file, or a generator.
#[derive(Args, Debug, Clone, Default)]
pub struct Source {
    /// Graph file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generator family, used instead of `--input`.
    #[arg(long, conflicts_with = "input")]
    pub family: Option<String>,
    /// Generator parameter `key=value`; repeatable.
    #[arg(long = "param")]
    pub params: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct CoherenceArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub epsilon: String,
    /// Check (ε, r)-coherence.
    #[arg(long)]
    pub radius: Option<usize>,
    /// Largest n decided exactly.
    #[arg(long, default_value_t = 15)]
    pub exact_limit: usize,
}

#[derive(Args, Debug)]
pub struct FindArgs {
    #[command(flatten)]
    pub source: Source,
    /// Named pattern (`c4`, `k4`, `k23`, `w5`, `cycle:n`, ...) or a graph
    /// file with a `path` line.
    #[arg(long)]
    pub pattern: String,
    /// Path of the pattern, overriding the default one.
    #[arg(long, value_delimiter = ',')]
    pub path: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "theorem")]
    pub mode: ModeArg,
    /// Exploratory ε; generated instances supply their own.
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long)]
    pub columns: Option<usize>,
    /// Skip the focus route and go straight to the ladder route.
    #[arg(long)]
    pub always_break: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: Source,
    /// Certificate JSON.
    #[arg(long)]
    pub cert: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleSearch {
    Filleting,
    Pair,
    CliqueStable,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum)]
    pub search: OracleSearch,
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub path: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget_nodes: u64,
}

#[derive(Args, Debug)]
pub struct EhArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "1/4")]
    pub epsilon: String,
    /// Exponent `c` to check `ω·α ≥ n^c` against.
    #[arg(long, default_value = "1/2")]
    pub c: String,
    /// Graphs this small are solved exactly.
    #[arg(long, default_value_t = 40)]
    pub n0: usize,
    #[arg(long, default_value_t = 4)]
    pub effort: usize,
    #[arg(long, default_value_t = 1 << 22)]
    pub budget_nodes: u64,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    pub family: String,
    #[arg(long = "param")]
    pub params: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Vertex counts.
    #[arg(long, value_delimiter = ',', default_value = "200")]
    pub n: Vec<usize>,
    /// Average degrees; each run uses `p = d/n`.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
    pub d: Vec<usize>,
    /// Also sweep these exploratory ε values (theorem mode ignores them).
    #[arg(long, value_delimiter = ',', default_value = "1/10")]
    pub epsilon: Vec<String>,
    /// Seeds `0..seeds`.
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
    #[arg(long, value_delimiter = ',', default_value = "c4")]
    pub pattern: Vec<String>,
    #[arg(long, value_enum, default_value = "exploratory")]
    pub mode: ModeArg,
    /// Add a wall-clock column. Timings make the CSV differ between runs.
    #[arg(long)]
    pub timings: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Text for stdout (or `--out`) and an exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub text: String,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { code: EXIT_OK, text }
    }
}

pub fn run(cli: Cli) -> Output {
    let res = match cli.command {
        Command::Coherence(a) => coherence(&a),
        Command::Find(a) => find(&a),
        Command::Verify(a) => verify(&a),
        Command::Oracle(a) => oracle(&a),
        Command::Eh(a) => eh(&a),
        Command::Gen(a) => gen(&a),
        Command::Experiment(a) => experiment(&a),
    };
    res.unwrap_or_else(|e| Output { code: EXIT_USAGE, text: format!("error: {e}\n") })
}

fn rational(s: &str, what: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| Error::Invalid(format!("{what} `{s}` is not a rational")))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

/// Writes `text` to `out` when given; the returned text is what to print.
fn emit(out: &Option<PathBuf>, text: String) -> Result<String> {
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// The host graph and, for generated instances, the instance itself.
fn load(src: &Source) -> Result<(GraphFile, Option<Instance>)> {
    match (&src.input, &src.family) {
        (Some(p), None) => Ok((parse_graph_file(&read(p)?)?, None)),
        (None, Some(fam)) => {
            let inst = generate_instance(fam, &Params::parse(&src.params)?, src.seed)?;
            Ok((instance_file(&inst), Some(inst)))
        }
        _ => Err(Error::Invalid("give exactly one of --input and --family".into())),
    }
}

pub fn instance_file(inst: &Instance) -> GraphFile {
    GraphFile { graph: inst.graph.clone(), weights: inst.weights.clone(), path: None }
}

/// A named pattern, or a graph file with a `path` line; `path` overrides.
pub fn load_pattern(spec: &str, path: &Option<Vec<usize>>) -> Result<Pattern> {
    let base = match named_pattern(spec) {
        Ok(p) => p,
        Err(named_err) => {
            if !Path::new(spec).exists() {
                return Err(named_err);
            }
            let f = parse_graph_file(&read(Path::new(spec))?)?;
            match (&f.path, path) {
                (_, Some(p)) | (Some(p), None) => return Pattern::new(f.graph, p.clone()),
                (None, None) => return Err(Error::Invalid(format!("{spec} has no `path` line"))),
            }
        }
    };
    match path {
        Some(p) => Pattern::new(base.h, p.clone()),
        None => Ok(base),
    }
}

fn coherence(a: &CoherenceArgs) -> Result<Output> {
    let (f, _) = load(&a.source)?;
    let mg = f.massed()?;
    let eps = rational(&a.epsilon, "epsilon")?;
    let cfg = CoherenceConfig { exact_pair_limit: a.exact_limit, seed: a.source.seed, ..CoherenceConfig::default() };
    let v = check_coherence(&mg, &eps, a.radius, &cfg)?;
    let body = match v {
        Verdict::Coherent { heuristic } => json!({ "verdict": "coherent", "heuristic": heuristic }),
        Verdict::Violated(v) => {
            let mut cert = Certificate::violation(&v, &eps);
            if let Some(r) = a.radius {
                cert = cert.with("radius", r);
            }
            let check = verify_certificate(&mg, &cert);
            json!({ "verdict": "violated", "verified": check.ok(), "certificate": cert })
        }
    };
    Ok(Output::ok(pretty(&body)))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

/// Exploratory tuning from the instance defaults and the flags.
fn tuning(a: &FindArgs, inst: Option<&Instance>) -> Result<Tuning<Rational>> {
    let has_overrides = a.delta.is_some() || a.kappa.is_some() || a.radius.is_some() || a.columns.is_some();
    if a.mode == ModeArg::Theorem {
        if has_overrides || a.epsilon.is_some() {
            return Err(Error::Invalid("thresholds can only be set with --mode exploratory".into()));
        }
        return Ok(Tuning::Theorem);
    }
    let mut o: Overrides<Rational> = inst.map(|i| i.overrides.clone()).unwrap_or_default();
    if let Some(d) = &a.delta {
        o.delta = Some(rational(d, "delta")?);
    }
    if let Some(k) = &a.kappa {
        o.kappa = Some(rational(k, "kappa")?);
    }
    if a.radius.is_some() {
        o.radius = a.radius;
    }
    if a.columns.is_some() {
        o.columns = a.columns;
    }
    let eps = match (&a.epsilon, inst.and_then(|i| i.eps.clone())) {
        (Some(e), _) => rational(e, "epsilon")?,
        (None, Some(e)) => e,
        (None, None) => return Err(Error::Invalid("--mode exploratory needs --epsilon".into())),
    };
    Ok(Tuning::Exploratory { eps, overrides: o })
}

/// Outcome of one search, turned into a certificate and re-verified.
pub struct FindReport {
    pub kind: &'static str,
    pub certificate: Option<Certificate>,
    pub verified: bool,
    pub text: String,
}

pub fn find_report(
    mg: &MassedGraphQ,
    pat: &Pattern,
    t: &Tuning<Rational>,
    always_break: bool,
    echo: &[(&str, String)],
) -> Result<FindReport> {
    let mut oracle: Box<dyn FocusOracle<Rational>> =
        if always_break { Box::new(AlwaysBreak) } else { Box::new(LazyFocus::default()) };
    let out = find_filleting_with(mg, pat, t, oracle.as_mut())?;
    let kind = out.kind_name();
    let eps = match t {
        Tuning::Theorem => {
            let tn = if pat.h.n() == 1 { 1 } else { derive_caterpillar(&hamiltonize(pat).pattern)?.caterpillar.n() };
            t.constants(tn)?.eps
        }
        Tuning::Exploratory { eps, .. } => eps.clone(),
    };
    let cert = match &out {
        FilletingOutcome::Filleting(f) => Certificate::filleting(pat, f),
        FilletingOutcome::Violation(v) => Certificate::violation(v, &eps),
        FilletingOutcome::Failure(f) => {
            let text = pretty(&json!({ "kind": "step_failure", "failure": f }));
            return Ok(FindReport { kind, certificate: None, verified: false, text });
        }
    };
    let mut cert = cert.with("mode", if t.mode() == crate::engine::Mode::Theorem { "theorem" } else { "exploratory" });
    for (k, v) in echo {
        cert = cert.with(k, v);
    }
    if !cert.params.contains_key("eps") {
        cert = cert.with("eps", &eps);
    }
    // Read back what is written, so the check sees exactly the file.
    let text = cert.to_json() + "\n";
    let back = Certificate::from_json(&text)?;
    let verified = verify_certificate(mg, &back).ok();
    Ok(FindReport { kind, certificate: Some(back), verified, text })
}

fn find(a: &FindArgs) -> Result<Output> {
    let (f, inst) = load(&a.source)?;
    let mg = f.massed()?;
    let pat = load_pattern(&a.pattern, &a.path)?;
    let t = tuning(a, inst.as_ref())?;
    let mut echo = vec![("pattern", a.pattern.clone()), ("seed", a.source.seed.to_string())];
    if let Some(fam) = &a.source.family {
        echo.push(("family", fam.clone()));
    }
    let r = find_report(&mg, &pat, &t, a.always_break, &echo)?;
    let code = match (&r.certificate, r.verified) {
        (None, _) => EXIT_STEP_FAILURE,
        (Some(_), true) => EXIT_OK,
        (Some(_), false) => {
            return Err(Error::Invalid("the certificate did not re-verify".into()));
        }
    };
    Ok(Output { code, text: emit(&a.out, r.text)? })
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    let (f, _) = load(&a.source)?;
    let mg = f.massed()?;
    let cert = Certificate::from_json(&read(&a.cert)?)?;
    Ok(Output::ok(format!("{}\n", verify_certificate(&mg, &cert))))
}

fn oracle(a: &OracleArgs) -> Result<Output> {
    let (f, _) = load(&a.source)?;
    let g = &f.graph;
    let body = match a.search {
        OracleSearch::Filleting => {
            let spec = a.pattern.as_deref().ok_or_else(|| Error::Invalid("--search filleting needs --pattern".into()))?;
            let pat = load_pattern(spec, &a.path)?;
            serde_json::to_value(search_filleting_bruteforce(g, &pat, a.budget_nodes)).expect("json")
        }
        OracleSearch::Pair => match max_anticomplete_pair_exact(g)? {
            Some((x, y)) => json!({ "a": x, "b": y, "min": x.len().min(y.len()) }),
            None => json!(null),
        },
        OracleSearch::CliqueStable => serde_json::to_value(clique_and_stable_exact(g, a.budget_nodes)?).expect("json"),
    };
    Ok(Output::ok(pretty(&body)))
}

fn eh(a: &EhArgs) -> Result<Output> {
    let (f, _) = load(&a.source)?;
    let eps = rational(&a.epsilon, "epsilon")?;
    let c = rational(&a.c, "c")?;
    let cfg = EhConfig {
        n0: a.n0,
        node_budget: a.budget_nodes,
        coherence: CoherenceConfig { seed: a.source.seed, ..CoherenceConfig::default() },
    };
    let base = exact_base(a.budget_nodes);
    let effort = a.effort;
    let split = move |g: &Graph, e: &Rational| rodl_split_heuristic(g, e, effort);
    let r = eh_recursion(&f.graph, &eps, &c, &base, &split, &cfg)?;
    Ok(Output::ok(pretty(&serde_json::to_value(&r).expect("json"))))
}

fn gen(a: &GenArgs) -> Result<Output> {
    let inst = generate_instance(&a.family, &Params::parse(&a.params)?, a.seed)?;
    let mut text = String::new();
    for (k, v) in &inst.params {
        text.push_str(&format!("c {k}={v}\n"));
    }
    text.push_str(&serialize_graph_file(&instance_file(&inst)));
    Ok(Output::ok(emit(&a.out, text)?))
}

/// One row of the experiment CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub n: usize,
    pub d: usize,
    pub eps: String,
    pub pattern: String,
    pub seed: u64,
    pub outcome: String,
    pub detail: String,
    pub verified: bool,
    pub millis: Option<u128>,
}

pub const CSV_HEADER: &str = "n,p,eps,pattern,mode,seed,outcome,detail,verified";

pub fn experiment_rows(a: &ExperimentArgs) -> Result<Vec<Row>> {
    let t_mode = a.mode;
    let eps: Vec<String> = if t_mode == ModeArg::Theorem { vec!["theorem".into()] } else { a.epsilon.clone() };
    let mut jobs = Vec::new();
    for &n in &a.n {
        for &d in &a.d {
            for e in &eps {
                for p in &a.pattern {
                    for seed in 0..a.seeds {
                        jobs.push((n, d, e.clone(), p.clone(), seed));
                    }
                }
            }
        }
    }
    for p in &a.pattern {
        load_pattern(p, &None)?;
    }
    jobs.par_iter()
        .map(|(n, d, e, p, seed)| {
            let start = Instant::now();
            let params = Params::from_pairs(&[("n", &n.to_string()), ("p", &format!("{d}/{n}"))]);
            let inst = generate_instance("gnp", &params, *seed)?;
            let mg = inst.massed()?;
            let pat = load_pattern(p, &None)?;
            let t = match t_mode {
                ModeArg::Theorem => Tuning::Theorem,
                ModeArg::Exploratory => Tuning::Exploratory { eps: rational(e, "epsilon")?, overrides: Overrides::default() },
            };
            let r = find_report(&mg, &pat, &t, false, &[])?;
            let detail = match &r.certificate {
                Some(c) => match &c.payload {
                    crate::oracle::Payload::Violation { violation } => violation_kind(violation).into(),
                    crate::oracle::Payload::Filleting { vertices, .. } => format!("{} vertices", vertices.len()),
                    _ => String::new(),
                },
                None => serde_json::from_str::<serde_json::Value>(&r.text)
                    .ok()
                    .and_then(|v| v["failure"]["lemma"].as_str().map(str::to_string))
                    .unwrap_or_default(),
            };
            Ok(Row {
                n: *n,
                d: *d,
                eps: e.clone(),
                pattern: p.clone(),
                seed: *seed,
                outcome: r.kind.into(),
                detail,
                verified: r.verified,
                millis: a.timings.then(|| start.elapsed().as_millis()),
            })
        })
        .collect()
}

fn violation_kind(v: &crate::oracle::ViolationRecord) -> &'static str {
    use crate::oracle::ViolationRecord::*;
    match v {
        HeavyVertex { .. } => "heavy-vertex",
        HeavyNeighbourhood { .. } => "heavy-neighbourhood",
        HeavyBall { .. } => "heavy-ball",
        AnticompletePair { .. } => "anticomplete-pair",
    }
}

pub fn rows_csv(rows: &[Row], mode: ModeArg) -> String {
    let timed = rows.first().is_some_and(|r| r.millis.is_some());
    let mut out = String::from(CSV_HEADER);
    out.push_str(if timed { ",millis\n" } else { "\n" });
    let mode = if mode == ModeArg::Theorem { "theorem" } else { "exploratory" };
    for r in rows {
        out.push_str(&format!(
            "{},{}/{},{},{},{},{},{},{},{}",
            r.n, r.d, r.n, r.eps, r.pattern, mode, r.seed, r.outcome, r.detail, r.verified
        ));
        if let Some(ms) = r.millis {
            out.push_str(&format!(",{ms}"));
        }
        out.push('\n');
    }
    out
}

fn experiment(a: &ExperimentArgs) -> Result<Output> {
    let rows = experiment_rows(a)?;
    let text = match a.format {
        FormatArg::Csv => rows_csv(&rows, a.mode),
        FormatArg::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({ "n": r.n, "p": format!("{}/{}", r.d, r.n), "eps": r.eps, "pattern": r.pattern,
                            "seed": r.seed, "outcome": r.outcome, "detail": r.detail, "verified": r.verified,
                            "millis": r.millis.map(|m| m as u64) })
                })
                .collect();
            pretty(&serde_json::Value::Array(v))
        }
    };
    let unverified = rows.iter().filter(|r| r.outcome != "step_failure" && !r.verified).count();
    if unverified > 0 {
        return Err(Error::Invalid(format!("{unverified} certificates did not re-verify")));
    }
    Ok(Output::ok(emit(&a.out, text)?))
}
