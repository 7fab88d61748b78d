//! The `hx` command line: verify / construct / search / pack / bounds /
//! certify. Exit codes: 0 success, 1 property-false verdict (so scripts can
//! branch on verdicts), 2 errors.

use crate::bounds;
use crate::constructions::{
    build_cancellative_artifacts, build_union_free_artifacts, ConstructionParams,
};
use crate::error::{HxError, Result};
use crate::hypergraph::Hypergraph;
use crate::io::{format_hypergraph, parse_hypergraph, HgFormat, IoOptions};
use crate::packing::{
    greedy_conflict_free_packing, packing_density, ConflictMode, PackingCopy, PackingRecord,
    Strategy,
};
use crate::properties;
use crate::rng::keyed_hash;
use crate::search::{brute_force_oracle, extremal_search, SearchKind, SearchProblem};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::Instant;

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "hx", version, about = "extremal uniform hypergraph toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// 64-bit RNG seed recorded in every artifact (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Byte-reproducible outputs (timing fields are reported as 0).
    #[arg(long, global = true)]
    deterministic: bool,
    /// Worker thread count (also via HX_THREADS); checkers currently run
    /// single-threaded, the flag is accepted for interface stability.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Config file with key=value lines (seed, deterministic, threads);
    /// explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PropertyArg {
    Cancellative,
    UnionFree,
    CoverFree,
    VeFree,
    EllMinus,
    InducedPacking,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Cancellative,
    UnionFree,
    CoverFree,
    Matching,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StrategyArg {
    Faithful,
    Direct,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Cancellative,
    UnionFree,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a property of a hypergraph file; exit 1 when it does not hold.
    Verify {
        #[arg(long)]
        property: PropertyArg,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        v: Option<usize>,
        #[arg(long)]
        e: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// .hg file (or packing.json for induced-packing).
        file: PathBuf,
    },
    /// Run the end-to-end construction pipeline and write its artifacts.
    Construct {
        mode: ModeArg,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m0: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        target_copies: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact extremal search at small n.
    Search {
        #[arg(long)]
        kind: KindArg,
        /// t for the property kinds; the matching bound for kind=matching.
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Also run the independent brute-force oracle and report its value.
        #[arg(long)]
        oracle: bool,
        /// Node expansion budget.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        candidate_limit: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy induced ℓ⁻-free packing of a template into C([n],k).
    Pack {
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        strategy: Option<StrategyArg>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        target: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form bounds table (CSV).
    Bounds {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the counting certificate on a hypergraph file.
    Certify {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point used by the `hx` binary. Returns the process exit code.
pub fn cli_main() -> i32 {
    let mut cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version print and exit 0; usage errors exit 2
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = apply_config(&mut cli.common) {
        eprintln!("{}", json!({ "error": e.to_string() }));
        return 2;
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string() }));
            2
        }
    }
}

fn apply_config(common: &mut Common) -> Result<()> {
    let Some(path) = &common.config else { return Ok(()) };
    let text = std::fs::read_to_string(path)?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(HxError::ParseError {
            line: lineno + 1,
            msg: "expected key=value".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |msg: &str| HxError::ParseError { line: lineno + 1, msg: msg.into() };
        match key {
            // explicit flags win over config values
            "seed" => {
                if common.seed.is_none() {
                    common.seed = Some(value.parse().map_err(|_| bad("seed must be a u64"))?);
                }
            }
            "deterministic" => {
                let v: bool =
                    value.parse().map_err(|_| bad("deterministic must be true/false"))?;
                common.deterministic = common.deterministic || v;
            }
            "threads" => {
                if common.threads.is_none() {
                    common.threads =
                        Some(value.parse().map_err(|_| bad("threads must be an integer"))?);
                }
            }
            _ => return Err(bad(&format!("unknown config key: {key}"))),
        }
    }
    Ok(())
}

fn seed_of(common: &Common) -> u64 {
    common.seed.unwrap_or(0)
}

fn config_digest(cli: &Cli) -> String {
    let repr = format!("{:?}|{:?}", cli.cmd, cli.common);
    format!("{:016x}", keyed_hash(0x6878, &[&repr]))
}

fn elapsed_ms(start: Instant, deterministic: bool) -> u64 {
    if deterministic {
        0
    } else {
        start.elapsed().as_millis() as u64
    }
}

fn meta(cli: &Cli) -> serde_json::Value {
    json!({
        "tool_version": TOOL_VERSION,
        "seed": seed_of(&cli.common),
        "config_digest": config_digest(cli),
    })
}

fn artifact_comments(cli: &Cli) -> Vec<String> {
    vec![format!(
        "hx {TOOL_VERSION} seed={} config={}",
        seed_of(&cli.common),
        config_digest(cli)
    )]
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn read_hg(path: &Path) -> Result<Hypergraph> {
    let text = std::fs::read_to_string(path)?;
    parse_hypergraph(&text, &IoOptions::default())
}

fn run(cli: &Cli) -> Result<i32> {
    let _ = cli
        .common
        .threads
        .or_else(|| std::env::var("HX_THREADS").ok().and_then(|v| v.parse().ok()));
    match &cli.cmd {
        Cmd::Verify { property, t, v, e, k, file } => run_verify(cli, *property, *t, *v, *e, *k, file),
        Cmd::Construct { mode, t, k, n, m0, epsilon, budget, target_copies, out } => {
            run_construct(cli, *mode, *t, *k, *n, *m0, *epsilon, *budget, *target_copies, out)
        }
        Cmd::Search { kind, t, n, r, oracle, budget, candidate_limit, out } => {
            run_search(cli, *kind, *t, *n, *r, *oracle, *budget, *candidate_limit, out.as_deref())
        }
        Cmd::Pack { template, n, k, e, strategy, epsilon, budget, target, out } => {
            run_pack(cli, template, *n, *k, *e, *strategy, *epsilon, *budget, *target, out)
        }
        Cmd::Bounds { t, k, r, n, out } => run_bounds(cli, *t, *k, *r, *n, out.as_deref()),
        Cmd::Certify { t, k, file, out } => run_certify(cli, *t, *k, file, out.as_deref()),
    }
}

fn need(opt: Option<usize>, flag: &str) -> Result<usize> {
    opt.ok_or_else(|| HxError::BadParameters(format!("--{flag} is required for this property")))
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    cli: &Cli,
    property: PropertyArg,
    t: Option<usize>,
    v: Option<usize>,
    e: Option<usize>,
    k: Option<usize>,
    file: &Path,
) -> Result<i32> {
    let start = Instant::now();
    let witness = match property {
        PropertyArg::Cancellative => {
            properties::is_t_cancellative(&read_hg(file)?, need(t, "t")?)?
        }
        PropertyArg::UnionFree => properties::is_t_union_free(&read_hg(file)?, need(t, "t")?)?,
        PropertyArg::CoverFree => properties::is_t_cover_free(&read_hg(file)?, need(t, "t")?)?,
        PropertyArg::VeFree => {
            properties::is_ve_free(&read_hg(file)?, need(v, "v")?, need(e, "e")?)?
        }
        PropertyArg::EllMinus => {
            // checks every level 2..=e; first violating level wins
            let h = read_hg(file)?;
            let (kk, ee) = (need(k, "k")?, need(e, "e")?);
            let mut result = properties::is_ell_minus_free(&h, kk, 2.max(ee.min(2)))?;
            for ell in 2..=ee {
                result = properties::is_ell_minus_free(&h, kk, ell)?;
                if !result.holds {
                    break;
                }
            }
            result
        }
        PropertyArg::InducedPacking => {
            let record = read_packing_file(file)?;
            let kk = k.unwrap_or(record.k);
            properties::is_induced_packing(&record, kk)?
        }
    };
    let out = json!({
        "holds": witness.holds,
        "property": witness.property,
        "witness": witness.witness,
        "elapsed_ms": elapsed_ms(start, cli.common.deterministic),
        "meta": meta(cli),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serialize"));
    Ok(if witness.holds { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn run_construct(
    cli: &Cli,
    mode: ModeArg,
    t: usize,
    k: usize,
    n: usize,
    m0: Option<usize>,
    epsilon: Option<f64>,
    budget: Option<u64>,
    target_copies: Option<usize>,
    out: &Path,
) -> Result<i32> {
    let start = Instant::now();
    let mut params = ConstructionParams::new(t, k, n, seed_of(&cli.common));
    params.m0 = m0;
    if let Some(eps) = epsilon {
        params.epsilon = eps;
    }
    if let Some(b) = budget {
        params.budget = b;
    }
    params.target_copies = target_copies;
    let artifacts = match mode {
        ModeArg::Cancellative => build_cancellative_artifacts(&params)?,
        ModeArg::UnionFree => build_union_free_artifacts(&params)?,
    };
    std::fs::create_dir_all(out)?;
    let opts = IoOptions { one_based: false, comments: artifact_comments(cli) };
    for (name, hg) in [
        ("G.hg", &artifacts.g),
        ("F.hg", &artifacts.f),
        ("shadow.hg", &artifacts.shadow),
        ("H.hg", &artifacts.h),
    ] {
        std::fs::write(out.join(name), format_hypergraph(hg, HgFormat::Text, &opts))?;
    }
    let density = packing_density(&artifacts.packing, n, k, &artifacts.shadow);
    std::fs::write(
        out.join("packing.json"),
        packing_json(cli, &artifacts.packing, &density, &[])?,
    )?;
    let mut report = serde_json::to_value(&artifacts.report).expect("serialize");
    report["elapsed_ms"] = json!(elapsed_ms(start, cli.common.deterministic));
    report["meta"] = meta(cli);
    std::fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&report).expect("serialize") + "\n",
    )?;
    println!(
        "{}",
        json!({
            "out": out.display().to_string(),
            "sizes": artifacts.report.sizes,
            "density": artifacts.report.density_value,
            "all_verdicts_hold": artifacts.report.all_verdicts_hold(),
        })
    );
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_search(
    cli: &Cli,
    kind: KindArg,
    t: usize,
    n: usize,
    r: usize,
    oracle: bool,
    budget: Option<u64>,
    candidate_limit: Option<u64>,
    out: Option<&Path>,
) -> Result<i32> {
    let start = Instant::now();
    let kind = match kind {
        KindArg::Cancellative => SearchKind::Cancellative { t },
        KindArg::UnionFree => SearchKind::UnionFree { t },
        KindArg::CoverFree => SearchKind::CoverFree { t },
        KindArg::Matching => SearchKind::MatchingBounded { nu_max: t },
    };
    let mut problem = SearchProblem::new(kind, n, r);
    problem.node_budget = budget;
    if let Some(limit) = candidate_limit {
        problem.candidate_limit = limit;
    }
    let result = extremal_search(&problem)?;
    let oracle_value = if oracle { Some(brute_force_oracle(&problem)?) } else { None };
    let witness_file = out.map(|p| {
        let mut w = p.to_path_buf();
        w.set_extension("witness.hg");
        w
    });
    if let Some(wf) = &witness_file {
        let opts = IoOptions { one_based: false, comments: artifact_comments(cli) };
        std::fs::write(wf, format_hypergraph(&result.witness, HgFormat::Text, &opts))?;
    }
    let payload = json!({
        "kind": kind,
        "params": { "t": t, "n": n, "r": r },
        "optimum": result.optimum,
        "status": result.status,
        "oracle": oracle_value,
        "witness_file": witness_file.as_ref().map(|p| p.display().to_string()),
        "nodes": result.nodes,
        "elapsed_ms": elapsed_ms(start, cli.common.deterministic),
        "meta": meta(cli),
    });
    let text = serde_json::to_string_pretty(&payload).expect("serialize") + "\n";
    write_or_print(out, &text)?;
    if out.is_some() {
        println!("optimum = {} ({:?})", result.optimum, result.status);
    }
    if let Some(o) = oracle_value {
        if o != result.optimum {
            return Err(HxError::BadParameters(format!(
                "search/oracle disagreement: {} vs {o}",
                result.optimum
            )));
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_pack(
    cli: &Cli,
    template: &Path,
    n: usize,
    k: usize,
    e: usize,
    strategy: Option<StrategyArg>,
    epsilon: Option<f64>,
    budget: Option<u64>,
    target: Option<usize>,
    out: &Path,
) -> Result<i32> {
    let template_hg = read_hg(template)?;
    let m = template_hg.n();
    let strategy = match strategy.unwrap_or(StrategyArg::Direct) {
        StrategyArg::Faithful => Strategy::FaithfulColoring,
        StrategyArg::Direct => Strategy::DirectGreedy,
    };
    let epsilon = epsilon.unwrap_or_else(|| crate::packing::default_epsilon(m, k));
    let budget = budget.unwrap_or(20_000);
    let max_copies = if template_hg.is_empty() {
        0
    } else {
        use num_traits::ToPrimitive;
        (crate::hypergraph::binomial(n as u64, k as u64)
            / num_bigint::BigUint::from(template_hg.len() as u64))
        .to_usize()
        .unwrap_or(usize::MAX)
    };
    let target = target.unwrap_or(max_copies);
    let mode = if target <= 64 { ConflictMode::Exact } else { ConflictMode::StrictOverlap };
    let mut rng = crate::rng::seed_substream(seed_of(&cli.common), &["pack"]);
    let coloring_seed = keyed_hash(seed_of(&cli.common), &["pack", "coloring"]);
    let (record, stats) = greedy_conflict_free_packing(
        &template_hg,
        n,
        k,
        e,
        epsilon,
        strategy,
        mode,
        &mut rng,
        coloring_seed,
        target,
        budget,
    )?;
    let density = packing_density(&record, n, k, &template_hg);
    let mut flags = Vec::new();
    if stats.budget_exhausted {
        flags.push("budget-exhausted".to_string());
    }
    std::fs::write(out, packing_json(cli, &record, &density, &flags)?)?;
    println!(
        "{}",
        json!({ "copies": record.copies.len(), "density": density.to_string(), "flags": flags })
    );
    Ok(0)
}

fn run_bounds(
    cli: &Cli,
    t: usize,
    k: usize,
    r: Option<usize>,
    n: usize,
    out: Option<&Path>,
) -> Result<i32> {
    let r = r.unwrap_or(t * k);
    let table = bounds::closed_form_bounds(t, r, n);
    let header = format!("# {}\n", artifact_comments(cli).join(" "));
    write_or_print(out, &(header + &table.to_csv()))?;
    Ok(0)
}

fn run_certify(cli: &Cli, t: usize, k: usize, file: &Path, out: Option<&Path>) -> Result<i32> {
    let start = Instant::now();
    let f = read_hg(file)?;
    let report = bounds::upper_bound_certificate(&f, t, k)?;
    let mut payload = serde_json::to_value(&report).expect("serialize");
    payload["all_hold"] = json!(report.all_hold());
    payload["elapsed_ms"] = json!(elapsed_ms(start, cli.common.deterministic));
    payload["meta"] = meta(cli);
    let text = serde_json::to_string_pretty(&payload).expect("serialize") + "\n";
    write_or_print(out, &text)?;
    if out.is_some() {
        println!("all_hold = {}", report.all_hold());
    }
    Ok(0)
}

fn packing_json(
    cli: &Cli,
    record: &PackingRecord,
    density: &num_rational::BigRational,
    flags: &[String],
) -> Result<String> {
    use num_traits::ToPrimitive;
    let copies: Vec<serde_json::Value> = record
        .copies
        .iter()
        .map(|c| {
            json!({
                "vertices": c.vertices.to_vec(),
                "bijection": c.bijection,
                "edges": c.edges.iter().map(|e| e.to_vec()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let payload = json!({
        "n": record.n,
        "k": record.k,
        "template": record.template_id,
        "copies": copies,
        "density": {
            "numer": density.numer().to_string(),
            "denom": density.denom().to_string(),
            "value": density.to_f64().unwrap_or(0.0),
        },
        "flags": flags,
        "meta": meta(cli),
    });
    Ok(serde_json::to_string_pretty(&payload).expect("serialize") + "\n")
}

#[derive(serde::Deserialize)]
struct PackingFileCopy {
    vertices: Vec<usize>,
    bijection: Vec<usize>,
    edges: Vec<Vec<usize>>,
}

#[derive(serde::Deserialize)]
struct PackingFile {
    n: usize,
    k: usize,
    #[serde(default)]
    template: String,
    copies: Vec<PackingFileCopy>,
}

fn read_packing_file(path: &Path) -> Result<PackingRecord> {
    let text = std::fs::read_to_string(path)?;
    let pf: PackingFile = serde_json::from_str(&text)
        .map_err(|e| HxError::ParseError { line: e.line(), msg: e.to_string() })?;
    let copies = pf
        .copies
        .into_iter()
        .map(|c| {
            let mut edges: Vec<crate::bitset::BitSet> = c
                .edges
                .iter()
                .map(|e| crate::bitset::BitSet::from_slice(pf.n, e))
                .collect();
            edges.sort();
            PackingCopy {
                vertices: crate::bitset::BitSet::from_slice(pf.n, &c.vertices),
                edges,
                bijection: c.bijection,
            }
        })
        .collect();
    Ok(PackingRecord { n: pf.n, k: pf.k, template_id: pf.template, copies })
}
