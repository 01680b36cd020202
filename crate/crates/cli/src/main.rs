use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use indord_core::bigraph::{canonical_form, BipartiteGraph, SideMode};
use indord_core::counting::{closed_form, total_count, CountBreakdown};
use indord_core::families::{build_cycle_path, build_grm};
use indord_core::invariants::invariant_report;
use indord_core::kseq::{enumerate_ksequences, jsets_from_ksequence};
use indord_core::oracle::{enumerate_graphs, EnumerationJob, GraphFilter};
use indord_core::profile::{
    classify_equal_r, classify_equal_two, compute_profile, ind_match_from_profile, is_ind_ord_one,
    ord_match_from_profile,
};
use serde_json::{json, Value};

const THREADS_VAR: &str = "INDORD_THREADS";

#[derive(Parser)]
#[command(
    name = "indord",
    version,
    about = "Matching invariants and exact counts for bipartite graphs"
)]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Matching numbers, connectivity, leaves and unmixedness of a graph.
    Invariants(GraphArg),
    /// Decide whether ind-match = ord-match = r (default r = 2).
    Classify {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
    /// Neighborhood profile of the Y-vertices over subsets of X.
    Profile(GraphArg),
    /// Exact count N(m, n) of connected graphs with ind-match = ord-match = 2.
    Count {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        /// List every term of the sum.
        #[arg(long)]
        breakdown: bool,
    },
    /// Closed-form count for m in {2, 3, 4}.
    ClosedForm {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    /// List the k-sequences starting at m.
    Kseq {
        #[arg(long)]
        m: u32,
        /// Minimum number of terms (3 or 4).
        #[arg(long, default_value_t = 3)]
        min_length: usize,
        /// Also print the J-sets of each sequence.
        #[arg(long)]
        jsets: bool,
    },
    /// Count graph classes by exhaustive profile enumeration.
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Labeled)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = FilterArg::IndOrd2)]
        filter: FilterArg,
        /// Target value for `--filter ind-ord-r`.
        #[arg(long)]
        r: Option<usize>,
        /// Write one graph file per class into this directory.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Print a graph from one of the built-in families.
    #[command(subcommand)]
    Construct(Family),
    /// Compare N(m, n) with the enumeration oracle for a range of n.
    Verify {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n_max: usize,
    },
}

#[derive(Args)]
struct GraphArg {
    /// Graph file in the `m n` / `i j` edge format, or `-` for stdin.
    graph: String,
}

#[derive(Subcommand)]
enum Family {
    /// Leafless graph with ind-match = ord-match = r and min-match = m.
    Grm {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        m: usize,
    },
    /// 4-cycle with a pendant path; match = ord-match = k.
    CyclePath {
        #[arg(long)]
        k: usize,
    },
    /// Complete bipartite graph.
    Complete {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Labeled,
    Unlabeled,
}

impl From<ModeArg> for SideMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Labeled => SideMode::SidesLabeled,
            ModeArg::Unlabeled => SideMode::SidesUnlabeled,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    #[value(name = "ind-ord-2")]
    IndOrd2,
    IndOrdR,
    Connected,
}

/// A finished command: the JSON results and the text rendering.
struct Report {
    inputs: Value,
    results: Value,
    text: String,
    exit: ExitCode,
}

impl Report {
    fn ok(inputs: Value, results: Value, text: String) -> Self {
        Self {
            inputs,
            results,
            text,
            exit: ExitCode::SUCCESS,
        }
    }
}

fn read_graph(arg: &GraphArg) -> anyhow::Result<BipartiteGraph> {
    let text = if arg.graph == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading graph from stdin")?;
        s
    } else {
        fs::read_to_string(&arg.graph).with_context(|| format!("reading {}", arg.graph))?
    };
    Ok(text.parse()?)
}

fn subset_label(mask: u64, m: usize) -> String {
    let elems: Vec<String> = (0..m)
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{{{}}}", elems.join(","))
}

/// Replaces every JSON number with its decimal string.
fn stringify_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_numbers).collect()),
        Value::Object(o) => Value::Object(
            o.into_iter()
                .map(|(k, v)| (k, stringify_numbers(v)))
                .collect(),
        ),
        other => other,
    }
}

fn run_invariants(arg: &GraphArg) -> anyhow::Result<Report> {
    let g = read_graph(arg)?;
    let rep = invariant_report(&g)?;
    let text = format!(
        "graph: m={} n={} edges={}\nmatch: {}\nmin_match: {}\nind_match: {}\nord_match: {}\nconnected: {}\nhas_leaf: {}\nunmixed: {}\n",
        g.m(),
        g.n(),
        g.edge_count(),
        rep.matching,
        rep.min_match,
        rep.ind_match,
        rep.ord_match,
        rep.connected,
        rep.has_leaf,
        rep.unmixed
    );
    Ok(Report::ok(
        json!({"graph": arg.graph, "m": g.m(), "n": g.n(), "edges": g.edge_count()}),
        serde_json::to_value(rep)?,
        text,
    ))
}

fn run_classify(arg: &GraphArg, r: usize) -> anyhow::Result<Report> {
    let g = read_graph(arg)?;
    let inputs = json!({"graph": arg.graph, "r": r});
    match r {
        0 => bail!("r must be at least 1"),
        1 => {
            let equal = is_ind_ord_one(&g)?;
            let text = format!("ind_match = ord_match = 1: {equal}\n");
            Ok(Report::ok(inputs, json!({"equal": equal, "r": 1}), text))
        }
        2 => {
            let res = classify_equal_two(&g)?;
            let jsets: Vec<String> = res.jsets.iter().map(|&s| subset_label(s, g.m())).collect();
            let text = format!(
                "ind_match = ord_match = 2: {}\nproper subsets (z={}): {}\nc_X: {}\ndisjoint case: {}\n",
                res.equal,
                res.z,
                jsets.join(" "),
                res.c_x,
                res.disjoint_case
            );
            let mut results = serde_json::to_value(&res)?;
            results["jsets"] = json!(jsets);
            Ok(Report::ok(inputs, results, text))
        }
        r => {
            let equal = classify_equal_r(&compute_profile(&g)?, r)?;
            let text = format!("ind_match = ord_match = {r}: {equal}\n");
            Ok(Report::ok(inputs, json!({"equal": equal, "r": r}), text))
        }
    }
}

fn run_profile(arg: &GraphArg) -> anyhow::Result<Report> {
    let g = read_graph(arg)?;
    let p = compute_profile(&g)?;
    let ind = ind_match_from_profile(&p)?;
    let ord = ord_match_from_profile(&p)?;
    let mut text = String::new();
    let mut entries = Vec::new();
    for (&s, &c) in p.counts() {
        let label = subset_label(s, g.m());
        text.push_str(&format!("{label}: {c}\n"));
        entries.push(json!({"subset": label, "count": c}));
    }
    text.push_str(&format!("ind_match: {ind}\nord_match: {ord}\n"));
    Ok(Report::ok(
        json!({"graph": arg.graph}),
        json!({"m": g.m(), "n": p.n(), "counts": entries, "ind_match": ind, "ord_match": ord}),
        text,
    ))
}

fn breakdown_json(b: &CountBreakdown) -> Value {
    json!({
        "total": b.total.to_string(),
        "disjoint_terms": b.disjoint_terms.iter()
            .map(|t| json!({"split": t.split, "count": t.count.to_string()}))
            .collect::<Vec<_>>(),
        "inclusion_exclusion_terms": b.inclusion_exclusion_terms.iter()
            .map(|t| json!({
                "sequences": t.sequences.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "sign": t.sign,
                "value": t.value.to_string(),
            }))
            .collect::<Vec<_>>(),
        "zero_by_prefix": b.zero_by_prefix.to_string(),
    })
}

fn run_count(m: u64, n: u64, breakdown: bool) -> anyhow::Result<Report> {
    let b = total_count(m, n)?;
    let mut text = format!("N({m},{n}) = {}\n", b.total);
    if breakdown {
        for t in &b.disjoint_terms {
            text.push_str(&format!("disjoint |I|={}: +{}\n", t.split, t.count));
        }
        for t in &b.inclusion_exclusion_terms {
            let seqs: Vec<String> = t.sequences.iter().map(|s| s.to_string()).collect();
            let sign = if t.sign > 0 { '+' } else { '-' };
            text.push_str(&format!("K={{{}}}: {sign}{}\n", seqs.join(","), t.value));
        }
        text.push_str(&format!(
            "mixed-prefix subsets (zero): {}\n",
            b.zero_by_prefix
        ));
    }
    let mut results = breakdown_json(&b);
    if !breakdown {
        results = json!({"total": results["total"]});
    }
    Ok(Report::ok(
        json!({"m": m, "n": n, "breakdown": breakdown}),
        results,
        text,
    ))
}

fn mode_name(mode: SideMode) -> &'static str {
    match mode {
        SideMode::SidesLabeled => "sides-labeled",
        SideMode::SidesUnlabeled => "sides-unlabeled",
    }
}

fn run_closed_form(m: u64, n: u64) -> anyhow::Result<Report> {
    let c = closed_form(m, n)?;
    let text = format!(
        "closed form ({m},{n}) = {} [{}]\n",
        c.value,
        mode_name(c.mode)
    );
    Ok(Report::ok(
        json!({"m": m, "n": n}),
        json!({"value": c.value.to_string(), "mode": mode_name(c.mode)}),
        text,
    ))
}

fn run_kseq(m: u32, min_length: usize, with_jsets: bool) -> anyhow::Result<Report> {
    let seqs = enumerate_ksequences(m, min_length)?;
    let mut text = String::new();
    let mut entries = Vec::new();
    for s in &seqs {
        text.push_str(&s.to_string());
        let js = jsets_from_ksequence(s);
        let labels: Vec<String> = js.sets.iter().map(|&j| subset_label(j, js.m)).collect();
        if with_jsets {
            text.push_str(&format!("  J: {}", labels.join(" ")));
        }
        text.push('\n');
        entries.push(json!({"terms": s.terms(), "jsets": labels}));
    }
    text.push_str(&format!("{} sequences\n", seqs.len()));
    Ok(Report::ok(
        json!({"m": m, "min_length": min_length}),
        json!({"count": seqs.len(), "sequences": entries}),
        text,
    ))
}

fn run_enumerate(
    m: usize,
    n: usize,
    mode: ModeArg,
    filter: FilterArg,
    r: Option<usize>,
    emit: Option<&Path>,
) -> anyhow::Result<Report> {
    let filter = match (filter, r) {
        (FilterArg::IndOrd2, None) => GraphFilter::IndOrdTwo,
        (FilterArg::IndOrdR, Some(r)) => GraphFilter::IndOrdR(r),
        (FilterArg::IndOrdR, None) => bail!("--filter ind-ord-r needs --r"),
        (FilterArg::Connected, None) => GraphFilter::AllConnected,
        (_, Some(_)) => bail!("--r only applies to --filter ind-ord-r"),
    };
    let mode = SideMode::from(mode);
    let job = EnumerationJob {
        m,
        n,
        mode,
        filter,
        emit: emit.is_some(),
    };
    let res = enumerate_graphs(&job)?;
    if let Some(dir) = emit {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for g in &res.representatives {
            let key = canonical_form(g, mode.allows_swap())?;
            let path = dir.join(format!("{}.txt", key.to_hex()));
            fs::write(&path, g.to_text()).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let text = format!(
        "classes: {}\nsupports: {}\nprofiles: {}\nspot checks: {}\n",
        res.count, res.supports, res.profiles, res.spot_checks
    );
    Ok(Report::ok(
        json!({"m": m, "n": n, "mode": mode_name(mode), "filter": serde_json::to_value(filter)?,
               "emit": emit.map(|p| p.display().to_string())}),
        serde_json::to_value(&res)?,
        text,
    ))
}

fn run_construct(family: &Family) -> anyhow::Result<Report> {
    let (g, inputs) = match *family {
        Family::Grm { r, m } => (build_grm(r, m)?, json!({"family": "grm", "r": r, "m": m})),
        Family::CyclePath { k } => (
            build_cycle_path(k)?,
            json!({"family": "cycle-path", "k": k}),
        ),
        Family::Complete { m, n } => (
            BipartiteGraph::complete(m, n)?,
            json!({"family": "complete", "m": m, "n": n}),
        ),
    };
    let edges: Vec<[usize; 2]> = g.edges().iter().map(|&(x, y)| [x + 1, y + 1]).collect();
    Ok(Report::ok(
        inputs,
        json!({"m": g.m(), "n": g.n(), "edges": edges}),
        g.to_text(),
    ))
}

fn run_verify(m: usize, n_max: usize) -> anyhow::Result<Report> {
    let mut text = String::from("n,formula,oracle,match\n");
    let mut rows = Vec::new();
    let mut all_match = true;
    for n in m.max(3)..=n_max {
        let formula = total_count(m as u64, n as u64)?.total;
        let job = EnumerationJob {
            m,
            n,
            mode: SideMode::SidesLabeled,
            filter: GraphFilter::IndOrdTwo,
            emit: false,
        };
        let oracle = enumerate_graphs(&job)?.count;
        let ok = formula == u128::from(oracle);
        all_match &= ok;
        text.push_str(&format!("{n},{formula},{oracle},{ok}\n"));
        rows.push(json!({"n": n, "formula": formula.to_string(), "oracle": oracle, "match": ok}));
    }
    if rows.is_empty() {
        bail!("no n in {}..={n_max}", m.max(3));
    }
    let mut report = Report::ok(
        json!({"m": m, "n_max": n_max}),
        json!({"rows": rows, "all_match": all_match}),
        text,
    );
    if !all_match {
        report.exit = ExitCode::from(1);
    }
    Ok(report)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Invariants(_) => "invariants",
        Command::Classify { .. } => "classify",
        Command::Profile(_) => "profile",
        Command::Count { .. } => "count",
        Command::ClosedForm { .. } => "closed-form",
        Command::Kseq { .. } => "kseq",
        Command::Enumerate { .. } => "enumerate",
        Command::Construct(_) => "construct",
        Command::Verify { .. } => "verify",
    }
}

fn dispatch(command: &Command) -> anyhow::Result<Report> {
    match command {
        Command::Invariants(g) => run_invariants(g),
        Command::Classify { graph, r } => run_classify(graph, *r),
        Command::Profile(g) => run_profile(g),
        Command::Count { m, n, breakdown } => run_count(*m, *n, *breakdown),
        Command::ClosedForm { m, n } => run_closed_form(*m, *n),
        Command::Kseq {
            m,
            min_length,
            jsets,
        } => run_kseq(*m, *min_length, *jsets),
        Command::Enumerate {
            m,
            n,
            mode,
            filter,
            r,
            emit,
        } => run_enumerate(*m, *n, *mode, *filter, *r, emit.as_deref()),
        Command::Construct(f) => run_construct(f),
        Command::Verify { m, n_max } => run_verify(*m, *n_max),
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(raw) = std::env::var(THREADS_VAR) {
        let threads: usize = raw
            .parse()
            .with_context(|| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = configure_threads().and_then(|()| dispatch(&cli.command));
    match outcome {
        Ok(report) => {
            if cli.json {
                let doc = json!({
                    "command": command_name(&cli.command),
                    "inputs": stringify_numbers(report.inputs),
                    "results": stringify_numbers(report.results),
                    "engine_version": env!("CARGO_PKG_VERSION"),
                    "elapsed_ms": start.elapsed().as_millis().to_string(),
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("report serializes")
                );
            } else {
                print!("{}", report.text);
            }
            report.exit
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
