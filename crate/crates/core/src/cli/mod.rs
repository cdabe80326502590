//! The `abelrd` command line tool.
//!
//! Exit codes: 0 success, 1 a verification check disagreed with its
//! prediction, 2 bad input, 3 a resource guard tripped.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::embedding::{candidate_groups, Embedding, EmbeddingSearch, SearchMode};
use crate::error::{Error, Result};
use crate::group::{decompose_cyclic, enumerate_abelian_groups, AbelianGroup};
use crate::prob::JointPmf;
use crate::rate::lower_convex_envelope;
use crate::sim::{self, Decoder, SimConfig, SimReport};

pub mod bundle;
pub mod spec;

pub use bundle::{recompute_point, sig6, solve, solve_problem, write_csv, RegionMode, ResultBundle};
pub use spec::{ProblemSpec, SpecFile};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "ABELRD_THREADS";

#[derive(Debug, Parser)]
#[command(name = "abelrd", version, about = "Rate regions for distributed function coding with abelian group codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primary decomposition of Z_n (or of a direct sum of cyclic groups)
    /// and every abelian group of that order.
    Decompose {
        /// One order `n`, or several cyclic orders to sum.
        #[arg(required = true)]
        orders: Vec<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Embeddings of each problem's target function.
    Embed {
        spec: PathBuf,
        /// A group name such as `Z7` or `Z2^3`, or `auto` for every candidate.
        #[arg(long, default_value = "auto")]
        group: String,
        /// List every embedding (modulo translations) instead of the first.
        #[arg(long)]
        all: bool,
    },
    /// Rate points, envelopes and per-group best sum rates.
    Region {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        mode: RegionMode,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
        /// Write here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Small-blocklength checks of the coding lemmas and the syndrome-sum codec.
    Simulate(SimulateArgs),
    /// Lower convex envelope of `(D, Rsum)` points from a CSV file.
    Envelope {
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Kernel membership probabilities.
    Lemma4,
    /// Joint kernel membership of pairs.
    Lemma6,
    /// Counts of dependency classes.
    Lemma7,
    /// Solutions of `a x = b`.
    Lemma8,
    /// Syndrome-sum codec block error.
    Km,
    /// Covering by random kernels.
    Cover,
    /// Nested parity-check matrices.
    Nested,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Problem spec whose `sim` section and pmf are used.
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub k11: Option<usize>,
    #[arg(long)]
    pub k12: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub matrix_seeds: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_parser = parse_decoder)]
    pub decoder: Option<Decoder>,
    #[arg(long)]
    pub isd_iterations: Option<usize>,
    /// `P(X != Y)` of the doubly symmetric binary source used without a spec
    /// (`km`), or the noise level of `U` given `X` (`cover`).
    #[arg(long, default_value_t = 0.05)]
    pub crossover: f64,
    /// First vector for `lemma7`, comma separated; defaults to `1,0,...,0`.
    #[arg(long, value_delimiter = ',')]
    pub u1: Option<Vec<u64>>,
}

fn parse_decoder(s: &str) -> std::result::Result<Decoder, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown decoder `{s}` (ml, typicality)"))
}

/// Outcome of a command: what to print and the exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::arg(format!("cannot read {}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<SpecFile> {
    SpecFile::parse(&read(path)?)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(text: String, output: Option<&Path>) -> Result<Outcome> {
    match output {
        Some(path) => {
            fs::write(path, text)?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text)),
    }
}

#[derive(Serialize)]
struct Decomposition {
    orders: Vec<u64>,
    order: u64,
    decomposition: String,
    factors: Vec<(u64, u32)>,
    /// Every abelian group of this order, up to isomorphism.
    classes: Vec<String>,
}

pub fn cmd_decompose(orders: &[u64], json: bool) -> Result<Outcome> {
    if orders.is_empty() {
        return Err(Error::arg("give an order"));
    }
    let mut factors = Vec::new();
    let mut order: u64 = 1;
    for &n in orders {
        if n < 2 {
            return Err(Error::arg(format!("order {n} has no non-trivial decomposition")));
        }
        factors.extend(decompose_cyclic(n)?);
        order = order.checked_mul(n).ok_or_else(|| Error::ResourceGuard("order overflows".into()))?;
    }
    let group = AbelianGroup::new(factors)?;
    let classes = enumerate_abelian_groups(order, order)?.iter().map(AbelianGroup::name).collect();
    let d = Decomposition {
        orders: orders.to_vec(),
        order,
        decomposition: group.name(),
        factors: group.factors().iter().map(|f| (f.p(), f.r())).collect(),
        classes,
    };
    if json {
        return Ok(Outcome::ok(to_json(&d)));
    }
    let lhs = orders.iter().map(|n| format!("Z{n}")).collect::<Vec<_>>().join("+");
    let mut s = format!("{lhs} = {}\n", d.decomposition);
    s.push_str(&format!("abelian groups of order {}: {}\n", d.order, d.classes.len()));
    for c in &d.classes {
        s.push_str(&format!("  {c}\n"));
    }
    Ok(Outcome::ok(s))
}

#[derive(Serialize)]
struct EmbeddingOut {
    description: String,
    /// Digits of `s_u(u)` per source symbol.
    s_u: Vec<Vec<u64>>,
    s_v: Vec<Vec<u64>>,
    /// Function value of each group element, `null` where no active cell lands.
    s_g: Vec<Option<usize>>,
}

impl EmbeddingOut {
    fn new(e: &Embedding) -> Self {
        let g = e.group();
        let digits = |m: &[usize]| m.iter().map(|&a| g.digits_at(a)).collect();
        EmbeddingOut { description: e.describe(), s_u: digits(e.s_u()), s_v: digits(e.s_v()), s_g: e.s_g().to_vec() }
    }
}

#[derive(Serialize)]
struct GroupEmbeddings {
    group: String,
    embeddings: Vec<EmbeddingOut>,
}

#[derive(Serialize)]
struct ProblemEmbeddings {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    /// Target function, `function[u][v]`; `null` on cells of zero mass.
    function: Vec<Vec<Option<usize>>>,
    results: Vec<GroupEmbeddings>,
}

pub fn cmd_embed(path: &Path, group: &str, all: bool) -> Result<Outcome> {
    let spec = load_spec(path)?;
    let mode = if all { SearchMode::All } else { SearchMode::First };
    let mut out = Vec::new();
    for p in spec.problems() {
        let f = p.target_function()?;
        let pmf: JointPmf = p.joint_pmf()?;
        let groups = if group.eq_ignore_ascii_case("auto") {
            candidate_groups(&f)?
        } else {
            vec![AbelianGroup::parse(group)?]
        };
        let mut results = Vec::new();
        for g in groups {
            let found = if (g.order() as usize) < f.image().len() {
                Vec::new()
            } else {
                EmbeddingSearch::new(&f, &g).weights(&pmf).mode(mode).limit(p.sweep.embedding_limit).run()?
            };
            results.push(GroupEmbeddings { group: g.name(), embeddings: found.iter().map(EmbeddingOut::new).collect() });
        }
        let function = (0..f.u_size())
            .map(|u| (0..f.v_size()).map(|v| f.is_active(u, v).then(|| f.get(u, v))).collect())
            .collect();
        out.push(ProblemEmbeddings { name: p.name.clone(), function, results });
    }
    Ok(Outcome::ok(to_json(&out)))
}

pub fn cmd_region(path: &Path, mode: RegionMode, out: OutFormat, output: Option<&Path>) -> Result<Outcome> {
    let spec = load_spec(path)?;
    let bundle = solve(&spec, mode)?;
    let text = match out {
        OutFormat::Json => to_json(&bundle),
        OutFormat::Csv => {
            let mut buf = Vec::new();
            write_csv(&bundle, &mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    emit(text, output)
}

fn sim_config(args: &SimulateArgs, spec: Option<&ProblemSpec>) -> SimConfig {
    let mut cfg = spec.and_then(|p| p.sim.clone()).unwrap_or_else(|| SimConfig::new(2, 1, 3, 1));
    macro_rules! set {
        ($($f:ident),*) => {$(if let Some(v) = args.$f { cfg.$f = v; })*};
    }
    set!(p, r, n, k, trials, matrix_seeds, epsilon, decoder, isd_iterations);
    if args.k11.is_some() {
        cfg.k11 = args.k11;
    }
    if args.k12.is_some() {
        cfg.k12 = args.k12;
    }
    if args.k2.is_some() {
        cfg.k2 = args.k2;
    }
    cfg.seed = args.seed;
    cfg
}

/// Doubly symmetric binary source with `P(X != Y) = c`.
fn dsbs(c: f64) -> Result<JointPmf> {
    JointPmf::from_rows(&[vec![(1.0 - c) / 2.0, c / 2.0], vec![c / 2.0, (1.0 - c) / 2.0]])
}

/// `X` uniform on `Z_m`, `U = X` with probability `1 - c`, otherwise uniform.
fn noisy_copy(m: usize, c: f64) -> Result<JointPmf> {
    let rows: Vec<Vec<f64>> =
        (0..m).map(|x| (0..m).map(|u| (if u == x { 1.0 - c } else { 0.0 } + c / m as f64) / m as f64).collect()).collect();
    JointPmf::from_rows(&rows)
}

pub fn run_check(check: Check, cfg: &SimConfig, pmf: Option<&JointPmf>, crossover: f64, u1: Option<&[u64]>) -> Result<SimReport> {
    match check {
        Check::Lemma4 => sim::kernel_membership_suite(cfg),
        Check::Lemma6 => sim::joint_kernel_suite(cfg),
        Check::Lemma7 => {
            let default: Vec<u64> = (0..cfg.n).map(|i| u64::from(i == 0)).collect();
            sim::count_dependency_classes(cfg.p, cfg.r, cfg.n, u1.unwrap_or(&default))
        }
        Check::Lemma8 => sim::solve_linear_check(cfg.p, cfg.r),
        Check::Km => {
            let own;
            let pxy = match pmf {
                Some(p) => p,
                None => {
                    own = dsbs(crossover)?;
                    &own
                }
            };
            sim::km_codec_run(pxy, cfg)
        }
        Check::Cover => {
            let own;
            let pxu = match pmf {
                Some(p) => p,
                None => {
                    own = noisy_copy(cfg.ring()?.order() as usize, crossover)?;
                    &own
                }
            };
            sim::source_cover_check(pxu, cfg)
        }
        Check::Nested => sim::nested_parity_build(cfg).map(|n| n.report),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let spec = args.spec.as_deref().map(load_spec).transpose()?;
    let problem = spec.as_ref().and_then(|s| s.problems().first());
    let cfg = sim_config(args, problem);
    cfg.validate()?;
    let pmf = problem.map(ProblemSpec::joint_pmf).transpose()?;
    let report = run_check(args.check, &cfg, pmf.as_ref(), args.crossover, args.u1.as_deref())?;
    let code = if report.exhaustive_failure() { 1 } else { 0 };
    Ok(Outcome { stdout: to_json(&report), code })
}

pub fn cmd_envelope(input: &Path, output: Option<&Path>) -> Result<Outcome> {
    let text = read(input)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let bad = |e: csv::Error| Error::Parse(format!("envelope input: {e}"));
    let headers = rdr.headers().map_err(bad)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse(format!("envelope input needs a `{name}` column")))
    };
    let (di, ri) = (col("D")?, col("Rsum")?);
    let mut pts = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(bad)?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("row {}: not a number", line + 2)))
        };
        pts.push((num(di)?, num(ri)?));
    }
    if pts.is_empty() {
        return Err(Error::Parse("envelope input has no points".into()));
    }
    let env = lower_convex_envelope(&pts)?;
    let mut s = String::from("D,Rsum\n");
    for (d, r) in &env.vertices {
        s.push_str(&format!("{},{}\n", sig6(*d), sig6(*r)));
    }
    emit(s, output)
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| Error::arg(format!("{THREADS_ENV} must be a positive integer")))?;
    if n == 0 {
        return Err(Error::arg(format!("{THREADS_ENV} must be a positive integer")));
    }
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    match &cli.command {
        Command::Decompose { orders, json } => cmd_decompose(orders, *json),
        Command::Embed { spec, group, all } => cmd_embed(spec, group, *all),
        Command::Region { spec, mode, out, output } => cmd_region(spec, *mode, *out, output.as_deref()),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Envelope { input, output } => cmd_envelope(input, output.as_deref()),
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return 2;
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
