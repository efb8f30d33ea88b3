//! The `rap` command line: `gen`, `solve`, `verify` and `bench`.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 infeasible instance,
//! 3 solution fails verification.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::ear::{solve_ear_with, EarOrder};
use crate::error::{RapError, Result};
use crate::exact::{lower_bounds, solve_exact, BnbConfig};
use crate::format::{
    format_cost, parse_instance, parse_set_cover, parse_solution, write_instance, write_instance_annotated,
    write_solution,
};
use crate::instance::{balanced_completion, verify_solution_any, RapInstance, Solution};
use crate::lp::build_lp;
use crate::reductions::{from_set_cover, from_snpp, gk_family, random_instance, shortest_nice_path, RandomParams, Variant};
use crate::round::{LpRounder, RoundConfig, RoundTrace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE_INSTANCE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rap", version, about = "Robust assignment: generate, solve, verify, benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write an instance from one of the built-in families.
    Gen(GenArgs),
    /// Solve an instance and report the verified result.
    Solve(SolveArgs),
    /// Check a solution against an instance.
    Verify(VerifyArgs),
    /// Run algorithms over a manifest of instances and print CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Setcover,
    Gk,
    Snpp,
    Random,
}

#[derive(Debug, clap::Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    /// Set cover file (setcover) or host graph instance (snpp).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "basic")]
    variant: Variant,
    #[arg(long)]
    k: Option<usize>,
    /// R-side terminal of the nice path (snpp).
    #[arg(long)]
    s: Option<usize>,
    /// T-side terminal of the nice path (snpp).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 6)]
    n_r: usize,
    #[arg(long, default_value_t = 6)]
    n_t: usize,
    #[arg(long, default_value_t = 0.5)]
    edge_prob: f64,
    #[arg(long, default_value_t = 1.0)]
    vuln_prob: f64,
    #[arg(long, default_value_t = 1)]
    cost_min: u32,
    #[arg(long, default_value_t = 1)]
    cost_max: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Algo {
    LpRound,
    Ear,
    Exact,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::LpRound => "lp-round",
            Algo::Ear => "ear",
            Algo::Exact => "exact",
        }
    }
}

#[derive(Debug, clap::Args)]
struct SolveArgs {
    #[arg(long)]
    algo: Algo,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solution file; `-` for standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the rounding trace (lp-round) or ear list (ear) to standard error.
    #[arg(long)]
    trace: bool,
    /// Write the relaxation in LP format (lp-round).
    #[arg(long)]
    lp_dump: Option<PathBuf>,
    /// Write the ear decompositions, one ear per line (ear).
    #[arg(long)]
    ear_dump: Option<PathBuf>,
    #[arg(long, default_value = "lowest")]
    ear_order: EarOrder,
    #[arg(long, default_value_t = BnbConfig::default().max_edges)]
    max_edges: usize,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Debug, clap::Args)]
struct BenchArgs {
    /// Lines of `<instance path> <algo> [<algo> ...]`; paths are relative
    /// to the manifest.
    #[arg(long)]
    manifest: PathBuf,
    /// Seed range for lp-round, `a..b` (exclusive) or `a..=b`.
    #[arg(long, default_value = "0..1")]
    seeds: String,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Instances with more edges get no exact column.
    #[arg(long, default_value_t = BnbConfig::default().max_edges)]
    exact_max_edges: usize,
    /// CSV file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &RapError) -> i32 {
    match err {
        RapError::InfeasibleInstance(_) | RapError::NoPerfectMatching => EXIT_INFEASIBLE_INSTANCE,
        RapError::InfeasibleAt(_) => EXIT_VERIFY_FAILED,
        _ => EXIT_USAGE,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| RapError::InvalidInstance(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<RapInstance> {
    parse_instance(&read(path)?).map_err(|e| RapError::InvalidInstance(format!("{}: {e}", path.display())))
}

fn write_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => Ok(fs::write(p, text)?),
        _ => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn cmd_gen(a: &GenArgs) -> Result<i32> {
    let missing = |what: &str| RapError::InvalidInstance(format!("--family {:?} needs {what}", a.family));
    let text = match a.family {
        Family::Setcover => {
            let path = a.input.as_deref().ok_or_else(|| missing("--in <set cover file>"))?;
            let sc = parse_set_cover(&read(path)?)?;
            let ri = from_set_cover(&sc, a.variant)?;
            let (header, notes) = ri.annotations();
            write_instance_annotated(&ri.rap, &header, &notes)
        }
        Family::Gk => {
            let k = a.k.ok_or_else(|| missing("--k"))?;
            write_instance_annotated(&gk_family(k)?, &[format!("G_k tightness family, k = {k}")], &[])
        }
        Family::Snpp => {
            let path = a.input.as_deref().ok_or_else(|| missing("--in <host graph instance>"))?;
            let (s, t) = (a.s.ok_or_else(|| missing("--s"))?, a.t.ok_or_else(|| missing("--t"))?);
            let host = load_instance(path)?;
            let sn = from_snpp(host.graph(), s, t)?;
            let mut header = vec![format!("nice path reduction, s = r{s}, t = t{t}, f1 = {}, f2 = {}", sn.f1, sn.f2)];
            if let Ok(found) = shortest_nice_path(host.graph(), s, t) {
                header.push(match found {
                    Some(path) => format!(
                        "shortest nice path has {} nodes, predicted optimum {}",
                        path.len(),
                        crate::reductions::SnppInstance::predicted_optimum(host.graph().num_nodes(), path.len())
                    ),
                    None => "no nice path".to_string(),
                });
            }
            write_instance_annotated(&sn.rap, &header, &[])
        }
        Family::Random => {
            let params = RandomParams {
                n_r: a.n_r,
                n_t: a.n_t,
                edge_prob: a.edge_prob,
                vuln_prob: a.vuln_prob,
                cost_range: (a.cost_min, a.cost_max),
                seed: a.seed,
            };
            write_instance(&random_instance(&params)?)
        }
    };
    let inst = parse_instance(&text)?;
    let counts = format!("nodes {} edges {}", inst.graph().num_nodes(), inst.num_edges());
    write_to(a.out.as_deref(), &text)?;
    if a.out.is_some() {
        println!("{counts}");
    } else {
        eprintln!("{counts}");
    }
    Ok(EXIT_OK)
}

/// One solver run as reported by `solve` and `bench`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub instance: String,
    pub algo: &'static str,
    pub seed: Option<u64>,
    pub cost: Option<f64>,
    /// Set by the verifier, never by the solver.
    pub feasible: bool,
    pub iterations: Option<usize>,
    pub millis: f64,
    pub lower_bound: Option<f64>,
    pub exact: Option<f64>,
    pub error: Option<String>,
}

impl RunReport {
    /// Cost over the exact optimum when known, else over the lower bound.
    pub fn ratio(&self) -> Option<f64> {
        let cost = self.cost?;
        let base = self.exact.or(self.lower_bound)?;
        if base > 0.0 {
            Some(cost / base)
        } else {
            (cost == 0.0).then_some(1.0)
        }
    }

    pub const CSV_HEADER: &'static str = "instance,algo,seed,cost,lb,exact,ratio,iters,ms,feasible,error";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_cost).unwrap_or_default();
        let error = self.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        format!(
            "{},{},{},{},{},{},{},{},{:.3},{},{}",
            self.instance,
            self.algo,
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            opt(self.cost),
            opt(self.lower_bound),
            opt(self.exact),
            self.ratio().map(|r| format!("{r:.4}")).unwrap_or_default(),
            self.iterations.map(|i| i.to_string()).unwrap_or_default(),
            self.millis,
            self.feasible,
            error
        )
    }
}

/// What a run produced besides the solution itself.
struct RunOutput {
    solution: Solution,
    iterations: Option<usize>,
    trace: Option<String>,
}

fn bnb_config(max_edges: usize, node_limit: Option<u64>, time_limit: Option<f64>) -> BnbConfig {
    BnbConfig { max_edges, node_limit, time_limit: time_limit.map(Duration::from_secs_f64) }
}

/// Rounds `inst`, going through the balanced completion when needed.
fn run_lp_round(inst: &RapInstance, seed: u64) -> Result<(Solution, RoundTrace)> {
    if inst.graph().is_balanced() {
        return LpRounder::new(inst, RoundConfig::default())?.run(seed);
    }
    let map = balanced_completion(inst);
    let (x, trace) = LpRounder::new(&map.instance, RoundConfig::default())?.run(seed)?;
    Ok((map.decode(inst, &x), trace))
}

fn run_algo(inst: &RapInstance, algo: Algo, seed: u64, order: EarOrder, bnb: &BnbConfig) -> Result<RunOutput> {
    match algo {
        Algo::LpRound => {
            let (solution, trace) = run_lp_round(inst, seed)?;
            Ok(RunOutput { solution, iterations: Some(trace.iterations.len()), trace: Some(trace.to_string()) })
        }
        Algo::Ear => {
            let (solution, report) = solve_ear_with(inst, order)?;
            Ok(RunOutput { solution, iterations: None, trace: Some(report.to_string()) })
        }
        Algo::Exact => Ok(RunOutput { solution: solve_exact(inst, bnb)?, iterations: None, trace: None }),
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let inst = load_instance(&a.input)?;
    if a.algo == Algo::Ear && !inst.has_unit_costs() {
        eprintln!("warning: ear ignores edge costs; the guarantee is for unit costs");
    }
    if let Some(path) = &a.lp_dump {
        let completed = balanced_completion(&inst);
        fs::write(path, build_lp(&completed.instance)?.program().to_lp_format())?;
    }
    let bnb = bnb_config(a.max_edges, a.node_limit, a.time_limit);
    let start = Instant::now();
    let out = run_algo(&inst, a.algo, a.seed, a.ear_order, &bnb)?;
    let millis = start.elapsed().as_secs_f64() * 1e3;
    if let (Some(path), Algo::Ear) = (&a.ear_dump, a.algo) {
        fs::write(path, out.trace.as_deref().unwrap_or(""))?;
    }
    if a.trace {
        if let Some(trace) = &out.trace {
            eprint!("{trace}");
        }
    }
    verify_solution_any(&inst, &out.solution)?;
    if let Some(path) = &a.out {
        write_to(Some(path), &write_solution(&out.solution))?;
    }
    let report = RunReport {
        instance: a.input.display().to_string(),
        algo: a.algo.name(),
        seed: (a.algo == Algo::LpRound).then_some(a.seed),
        cost: Some(out.solution.cost()),
        feasible: true,
        iterations: out.iterations,
        millis,
        lower_bound: lower_bounds(&inst).ok().map(|lb| lb.value()),
        exact: None,
        error: None,
    };
    let mut line = format!(
        "algo {} cost {} edges {} feasible {}",
        report.algo,
        format_cost(out.solution.cost()),
        out.solution.len(),
        report.feasible
    );
    if let Some(seed) = report.seed {
        let _ = write!(line, " seed {seed}");
    }
    if let Some(it) = report.iterations {
        let _ = write!(line, " iters {it}");
    }
    if let Some(lb) = report.lower_bound {
        let _ = write!(line, " lb {}", format_cost(lb));
    }
    if let Some(r) = report.ratio() {
        let _ = write!(line, " ratio {r:.4}");
    }
    println!("{line}");
    eprintln!("time {millis:.3} ms");
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let inst = load_instance(&a.input)?;
    let x = parse_solution(&inst, &read(&a.solution)?)?;
    match verify_solution_any(&inst, &x) {
        Ok(cert) => {
            println!("feasible: {} edges, cost {}, {} scenarios certified", x.len(), format_cost(x.cost()), cert.len());
            for (s, matching) in cert.iter() {
                let ids: Vec<String> = matching.edges().iter().map(|e| e.to_string()).collect();
                println!("scenario {s}: {}", ids.join(" "));
            }
            Ok(EXIT_OK)
        }
        Err(err @ RapError::InfeasibleAt(_)) => {
            println!("{err}");
            Ok(EXIT_VERIFY_FAILED)
        }
        Err(err) => Err(err),
    }
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let bad = || RapError::InvalidInstance(format!("bad seed range '{spec}' (expected a..b or a..=b)"));
    let (lo, hi, inclusive) = if let Some((lo, hi)) = spec.split_once("..=") {
        (lo, hi, true)
    } else if let Some((lo, hi)) = spec.split_once("..") {
        (lo, hi, false)
    } else {
        (spec, spec, true)
    };
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    Ok(if inclusive { (lo..=hi).collect() } else { (lo..hi).collect() })
}

struct ManifestEntry {
    name: String,
    path: PathBuf,
    algos: Vec<Algo>,
}

fn parse_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (i, raw) in read(path)?.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        let Some(file) = tokens.next() else { continue };
        let algos = tokens
            .map(|t| {
                Algo::from_str(t, true).map_err(|_| RapError::Parse { line: i + 1, msg: format!("unknown algorithm '{t}'") })
            })
            .collect::<Result<Vec<_>>>()?;
        if algos.is_empty() {
            return Err(RapError::Parse { line: i + 1, msg: "no algorithm listed".into() });
        }
        entries.push(ManifestEntry { name: file.to_string(), path: base.join(file), algos });
    }
    Ok(entries)
}

fn cmd_bench(a: &BenchArgs) -> Result<i32> {
    let entries = parse_manifest(&a.manifest)?;
    let seeds = parse_seeds(&a.seeds)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.max(1))
        .build()
        .map_err(|e| RapError::InvalidInstance(format!("thread pool: {e}")))?;
    let bnb = BnbConfig::with_max_edges(a.exact_max_edges);

    let mut rows = pool.install(|| {
        entries
            .par_iter()
            .flat_map(|entry| {
                let loaded = load_instance(&entry.path);
                let (exact, lb) = match &loaded {
                    Ok(inst) => (
                        solve_exact(inst, &bnb).ok().map(|x| x.cost()),
                        lower_bounds(inst).ok().map(|b| b.value()),
                    ),
                    Err(_) => (None, None),
                };
                let jobs: Vec<(Algo, Option<u64>)> = entry
                    .algos
                    .iter()
                    .flat_map(|&algo| match algo {
                        Algo::LpRound => seeds.iter().map(|&s| (algo, Some(s))).collect(),
                        _ => vec![(algo, None)],
                    })
                    .collect();
                jobs.into_par_iter()
                    .map(|(algo, seed)| bench_row(entry, &loaded, algo, seed, exact, lb, &bnb))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    });
    rows.sort_by(|x, y| (&x.instance, x.algo, x.seed).cmp(&(&y.instance, y.algo, y.seed)));
    let mut csv = String::from(RunReport::CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv_row());
        csv.push('\n');
    }
    write_to(a.out.as_deref(), &csv)?;
    Ok(EXIT_OK)
}

fn bench_row(
    entry: &ManifestEntry,
    loaded: &Result<RapInstance>,
    algo: Algo,
    seed: Option<u64>,
    exact: Option<f64>,
    lower_bound: Option<f64>,
    bnb: &BnbConfig,
) -> RunReport {
    let mut report = RunReport {
        instance: entry.name.clone(),
        algo: algo.name(),
        seed,
        cost: None,
        feasible: false,
        iterations: None,
        millis: 0.0,
        lower_bound,
        exact,
        error: None,
    };
    let inst = match loaded {
        Ok(inst) => inst,
        Err(err) => {
            report.error = Some(err.to_string());
            return report;
        }
    };
    let start = Instant::now();
    let outcome = run_algo(inst, algo, seed.unwrap_or(0), EarOrder::Lowest, bnb);
    report.millis = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(out) => {
            report.cost = Some(out.solution.cost());
            report.iterations = out.iterations;
            match verify_solution_any(inst, &out.solution) {
                Ok(_) => report.feasible = true,
                Err(err) => report.error = Some(err.to_string()),
            }
        }
        Err(err) => report.error = Some(err.to_string()),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("2..=4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_seeds("5").unwrap(), vec![5]);
        assert!(parse_seeds("a..b").is_err());
    }

    #[test]
    fn ratio_prefers_exact() {
        let mut r = RunReport {
            instance: "x".into(),
            algo: "ear",
            seed: None,
            cost: Some(9.0),
            feasible: true,
            iterations: None,
            millis: 0.0,
            lower_bound: Some(6.0),
            exact: None,
            error: None,
        };
        assert_eq!(r.ratio(), Some(1.5));
        r.exact = Some(9.0);
        assert_eq!(r.ratio(), Some(1.0));
        assert!(r.csv_row().starts_with("x,ear,,9,6,9,1.0000,,"));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["rap", "solve"]), EXIT_USAGE);
        assert_eq!(run(["rap", "--help"]), EXIT_OK);
    }
}
