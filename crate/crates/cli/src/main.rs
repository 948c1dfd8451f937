//! `lowertail` command-line front end.
//!
//! Exit status: 0 on success (certified / witness found), 2 for an
//! inconclusive certificate or no witness, 64 for usage errors and 65 for
//! numeric or I/O failures.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lowertail::empirics::lower_tail_estimate;
use lowertail::phase::{
    curve_abscissae, emit_curve, format_dat, sparse_constants, CurveKind, Series,
};
use lowertail::symcheck::lt_h_edges_certificate;
use lowertail::{
    find_breaking, find_breaking_sparse, lt_h_general_certificate, lt_h_k3_certificate,
    lt_k3_certificate, solve_lt, ut_k3_certificate, Entropy, Graph, SolverOptions, TailEstimate,
};

/// Environment variable naming the default output directory.
const OUT_DIR_VAR: &str = "LOWERTAIL_OUT_DIR";

const EXIT_NEGATIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_NUMERIC: u8 = 65;

#[derive(Parser)]
#[command(
    name = "lowertail",
    version,
    about = "Lower-tail variational problems for subgraph counts"
)]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sparse constants and the r_m table.
    Constants,
    /// Phase boundary as a two-column data file.
    Curve(CurveArgs),
    /// Tangent or BIP gap function as a two-column data file.
    Gap(GapArgs),
    /// Certificate JSON; exit 0 if certified, 2 if inconclusive.
    Check(CheckArgs),
    /// Breaking witness JSON or "none"; exit 0 if found, 2 otherwise.
    Break(BreakArgs),
    /// Discretized variational problem on k equal blocks.
    Solve(SolveArgs),
    /// Monte-Carlo lower-tail estimate as CSV.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveChoice {
    UpperQ,
    LowerQ,
    UtBoundary,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, value_enum)]
    kind: CurveChoice,
    #[arg(long, default_value_t = lowertail::phase::DEFAULT_POINTS)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GapChoice {
    LtK3,
    UtK3,
    #[value(name = "lt-h-k3")]
    LtHK3,
    HExp,
    Bip,
    BipSparse,
}

#[derive(Args, Default)]
struct Params {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
}

#[derive(Args)]
struct GapArgs {
    #[arg(long, value_enum)]
    kind: GapChoice,
    #[command(flatten)]
    params: Params,
    #[arg(long, default_value_t = 2001)]
    points: usize,
    /// Left end of the abscissa range (default: natural domain).
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    LtK3,
    UtK3,
    #[value(name = "lt-h-k3")]
    LtHK3,
    LtH,
}

#[derive(Args, Default)]
struct GraphSource {
    /// Edge-list file, one `u v` pair per line.
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    /// Named graph such as K3, C5, K2,3 or complete:4.
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    #[command(flatten)]
    params: Params,
    #[command(flatten)]
    source: GraphSource,
    /// Edge count for `lt-h` without an explicit graph.
    #[arg(long, conflicts_with_all = ["graph", "family"])]
    edges: Option<usize>,
}

#[derive(Args)]
struct BreakArgs {
    /// Sparse problem in r instead of (p, q).
    #[arg(long)]
    sparse: bool,
    #[command(flatten)]
    params: Params,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: GraphSource,
    /// `p=VALUE` or `sparse`.
    #[arg(long)]
    mode: String,
    #[arg(long)]
    target: f64,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn need(v: Option<f64>, flag: &str) -> Result<f64> {
    v.ok_or_else(|| usage(format!("missing --{flag}")))
}

impl GraphSource {
    fn load(&self) -> Result<Graph> {
        match (&self.graph, &self.family) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(Graph::from_edge_list(&text)?)
            }
            (None, Some(name)) => Ok(name.parse()?),
            (None, None) => Err(usage("give --graph FILE or --family NAME")),
        }
    }

    fn given(&self) -> bool {
        self.graph.is_some() || self.family.is_some()
    }
}

/// Relative paths land in `$LOWERTAIL_OUT_DIR` when it is set; without
/// `--out` the default name is used there, otherwise output goes to stdout.
fn resolve_out(out: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from);
    match (out, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(default_name)),
        (None, None) => None,
    }
}

fn prepare(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(())
}

fn write_text(text: &str, out: Option<&Path>, default_name: &str) -> Result<()> {
    match resolve_out(out, default_name) {
        Some(path) => {
            prepare(&path)?;
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => emit(text)?,
    }
    Ok(())
}

fn write_series(series: &Series, xs: &[f64], out: Option<&Path>, name: &str) -> Result<()> {
    match resolve_out(out, name) {
        Some(path) => {
            prepare(&path)?;
            let rows = emit_curve(series, xs, &path)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => emit(&format_dat(&series.sample(xs)?))?,
    }
    Ok(())
}

fn constants() -> Result<u8> {
    let c = sparse_constants()?;
    let mut rows = vec![
        ("r_upper".to_string(), c.r_upper),
        ("r_lower".to_string(), c.r_lower),
        ("r_trivial".to_string(), c.r_trivial),
    ];
    rows.extend(c.r_m.iter().map(|(m, v)| (format!("r_{m}"), *v)));
    let mut text = String::new();
    for (name, v) in &rows {
        text.push_str(&format!("{name:>9} {v:.3}  {v}\n"));
    }
    text.push_str(&serde_json::to_string(&c)?);
    text.push('\n');
    emit(&text)?;
    Ok(0)
}

fn curve(a: &CurveArgs) -> Result<u8> {
    if a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let (kind, name) = match a.kind {
        CurveChoice::UpperQ => (CurveKind::UpperQ, "upper_q.dat"),
        CurveChoice::LowerQ => (CurveKind::LowerQ, "lower_q.dat"),
        CurveChoice::UtBoundary => (CurveKind::UtBoundary, "ut_boundary.dat"),
    };
    write_series(
        &Series::Curve(kind),
        &curve_abscissae(a.points),
        a.out.as_deref(),
        name,
    )?;
    Ok(0)
}

fn gap(a: &GapArgs) -> Result<u8> {
    let Params { p, q, r } = a.params;
    let (series, name) = match a.kind {
        GapChoice::LtK3 => (
            Series::LtK3Gap {
                p: need(p, "p")?,
                q: need(q, "q")?,
            },
            "lt_k3_gap.dat",
        ),
        GapChoice::UtK3 => (
            Series::UtK3Gap {
                p: need(p, "p")?,
                q: need(q, "q")?,
            },
            "ut_k3_gap.dat",
        ),
        GapChoice::LtHK3 => (Series::LtHK3Gap { r: need(r, "r")? }, "lt_h_k3_gap.dat"),
        GapChoice::HExp => (Series::HExpGap { r: need(r, "r")? }, "h_exp_gap.dat"),
        GapChoice::Bip => (
            Series::BipGap {
                p: need(p, "p")?,
                q: need(q, "q")?,
            },
            "bip_gap.dat",
        ),
        GapChoice::BipSparse => (
            Series::BipGapSparse { r: need(r, "r")? },
            "bip_gap_sparse.dat",
        ),
    };
    if a.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let (lo, hi) = series.domain();
    let (lo, hi) = (a.from.unwrap_or(lo), a.to.unwrap_or(hi));
    if !(lo < hi) {
        return Err(usage(format!("empty range [{lo}, {hi}]")));
    }
    let xs = lowertail::numeric::linspace(lo, hi, a.points);
    write_series(&series, &xs, a.out.as_deref(), name)?;
    Ok(0)
}

fn check(a: &CheckArgs) -> Result<u8> {
    let Params { p, q, r } = a.params;
    let cert = match a.problem {
        Problem::LtK3 => lt_k3_certificate(need(p, "p")?, need(q, "q")?)?,
        Problem::UtK3 => ut_k3_certificate(need(p, "p")?, need(q, "q")?)?,
        Problem::LtHK3 => lt_h_k3_certificate(need(r, "r")?)?,
        Problem::LtH => {
            let r = need(r, "r")?;
            match a.edges {
                Some(m) => lt_h_edges_certificate(m, r)?,
                None if a.source.given() => lt_h_general_certificate(&a.source.load()?, r)?,
                None => return Err(usage("lt-h needs --graph, --family or --edges")),
            }
        }
    };
    emit(&(serde_json::to_string_pretty(&cert)? + "\n"))?;
    Ok(if cert.is_certified() {
        0
    } else {
        EXIT_NEGATIVE
    })
}

fn breaking(a: &BreakArgs) -> Result<u8> {
    let Params { p, q, r } = a.params;
    let witness = if a.sparse {
        find_breaking_sparse(need(r, "r")?)?
    } else {
        find_breaking(need(p, "p")?, need(q, "q")?)?
    };
    match witness {
        Some(w) => {
            emit(&(serde_json::to_string_pretty(&w)? + "\n"))?;
            Ok(0)
        }
        None => {
            emit("none\n")?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn parse_mode(s: &str) -> Result<Entropy> {
    if s == "sparse" {
        return Ok(Entropy::Sparse);
    }
    let p = s
        .strip_prefix("p=")
        .and_then(|v| v.parse::<f64>().ok())
        .ok_or_else(|| usage(format!("--mode must be `p=VALUE` or `sparse`, got `{s}`")))?;
    Ok(Entropy::finite(p)?)
}

fn solve(a: &SolveArgs) -> Result<u8> {
    let h = a.source.load()?;
    let mode = parse_mode(&a.mode)?;
    let opts = SolverOptions {
        seed: a.seed,
        restarts: a.restarts,
        ..SolverOptions::default()
    };
    let sol = solve_lt(&h, mode, a.target, a.k, &opts)?;
    let text = serde_json::to_string_pretty(&sol)? + "\n";
    write_text(&text, a.out.as_deref(), "solution.json")?;
    Ok(0)
}

fn simulate(a: &SimulateArgs) -> Result<u8> {
    let h = a.source.load()?;
    let est = lower_tail_estimate(&h, a.n, a.p, a.q, a.trials, a.seed)?;
    let text = format!("{}\n{}\n", TailEstimate::CSV_HEADER, est.csv_row());
    write_text(&text, a.out.as_deref(), "simulate.csv")?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Constants => constants(),
        Command::Curve(a) => curve(a),
        Command::Gap(a) => gap(a),
        Command::Check(a) => check(a),
        Command::Break(a) => breaking(a),
        Command::Solve(a) => solve(a),
        Command::Simulate(a) => simulate(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use lowertail::Error as E;
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<E>() {
        Some(
            E::InvalidParameter(_) | E::InvalidGraph(_) | E::UnknownFamily(_) | E::UnknownSeries(_),
        ) => EXIT_USAGE,
        _ => EXIT_NUMERIC,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
