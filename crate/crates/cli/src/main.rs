mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use simonlab::gf2;
use simonlab::hiding::{random_hiding_function, simon_instance, PromiseCase, QueryCountingOracle};
use simonlab::polybound::{self, check_lemma, extremal_search, theorem_bound};
use simonlab::polymethod::{
    degree_check, estimate_curve, order_exponent, simon_exact_curve, simon_trial,
    synthetic_exact_curve, AcceptanceCurve, RationalPolynomial, SyntheticAlgorithm,
};
use simonlab::qsim::{self, SimulationMode, Verdict};
use simonlab::rational::{self, Rational};
use simonlab::task_rng;

/// Hidden-subgroup oracles, Simon's algorithm and polynomial-method bounds.
#[derive(Parser)]
#[command(name = "simonlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hiding-function oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Simon's decision algorithm and the subgroup solver.
    #[command(subcommand)]
    Simon(SimonCommand),
    /// Classical collision-finding baseline.
    #[command(subcommand)]
    Classical(ClassicalCommand),
    /// Acceptance curves and their degree.
    #[command(subcommand)]
    Poly(PolyCommand),
    /// Degree lower bounds and extremal polynomials.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Run the full exact check suite and emit a JSON ledger.
    VerifyPaper(VerifyArgs),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Random function hiding a random subgroup of the given order.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        order: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum SimonCommand {
    /// Decide injective (case 1) versus order-2 period (case 2).
    Decide {
        #[command(flatten)]
        run: TrialArgs,
        /// 1: one-to-one, 2: hidden subgroup of order 2.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        case: u8,
        #[arg(long, default_value = "1/4")]
        epsilon: String,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Recover an arbitrary hidden subgroup.
    Hsp {
        #[command(flatten)]
        run: TrialArgs,
        #[arg(long, default_value_t = 2)]
        order: u64,
        /// Allowed failure probability.
        #[arg(long, default_value = "1/100")]
        delta: String,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
}

#[derive(Subcommand)]
enum ClassicalCommand {
    /// Query distinct random points and reject on a collision.
    Decide {
        #[command(flatten)]
        run: TrialArgs,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        case: u8,
        /// Number of queries.
        #[arg(long)]
        queries: u64,
    },
}

#[derive(Subcommand)]
enum PolyCommand {
    /// Acceptance curve Q_n(2^d) for d = 0..=n.
    Qn {
        #[arg(long)]
        n: Option<usize>,
        /// `simon` or a path to a synthetic-algorithm JSON file.
        #[arg(long, default_value = "simon")]
        alg: String,
        #[arg(long, default_value = "1/4")]
        epsilon: String,
        /// Exact rational values (the default).
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        /// Monte Carlo with this many trials per point.
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Interpolate an exact curve and compare its degree with 2T.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Query count T; defaults to the one recorded in the curve.
        #[arg(long)]
        queries: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Check the bounded-polynomial premises and the degree conclusion.
    Check {
        /// JSON file: {"coefficients": ["p/q", ...]} or a bare list, lowest
        /// degree first.
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Extremal derivative LP over a grid of x0 in [1, 2].
    Extremal {
        #[arg(long)]
        n: usize,
        /// Single degree; every 1 <= d <= n/2 when omitted.
        #[arg(long)]
        d: Option<usize>,
        /// Also sweep every smaller n.
        #[arg(long)]
        all_n: bool,
        #[arg(long, default_value_t = polybound::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: Output,
    },
    /// Query lower bound (n + 2 + log2(2 - 4 epsilon)) / 8.
    Theorem {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1/4")]
        epsilon: String,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct TrialArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Dense,
    Collapsed,
    Auto,
}

impl From<Mode> for SimulationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Dense => SimulationMode::Dense,
            Mode::Collapsed => SimulationMode::Collapsed,
            Mode::Auto => SimulationMode::Auto,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Bad input detected after parsing; exits with status 2 like a parse error.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A check ran and failed; exits with status 1 after emitting its output.
#[derive(Debug)]
struct CheckFailed;

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("check failed")
    }
}

impl std::error::Error for CheckFailed {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_rational(label: &str, s: &str) -> Result<Rational> {
    rational::parse(s).map_err(|e| usage(format!("invalid --{label} {s:?}: {e}")))
}

/// Library errors on user-supplied parameters are usage errors.
fn input<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> Result<T> {
    r.map_err(|e| usage(e.to_string()))
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                // a closed downstream pipe is not an error for a filter-style tool
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

fn emit_json<T: Serialize>(out: &Output, value: &T) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn case(c: u8) -> Result<PromiseCase> {
    input(PromiseCase::try_from(c))
}

#[derive(Serialize)]
struct VerdictCounts {
    accept: u64,
    reject: u64,
}

fn oracle_gen(n: usize, order: u64, seed: u64, out: &Output) -> Result<()> {
    let d = input(order_exponent(n, order))?;
    let mut rng = task_rng(seed, 0);
    let h = input(gf2::random_subspace(n, d, &mut rng))?;
    let f = random_hiding_function(&h, &mut rng);
    emit_json(out, &f)
}

fn simon_decide(run: &TrialArgs, c: u8, epsilon: &str, mode: Mode) -> Result<()> {
    let eps = parse_rational("epsilon", epsilon)?;
    let promise = case(c)?;
    let queries = input(qsim::simon_query_count(run.n, &eps))?;
    let mut counts = VerdictCounts { accept: 0, reject: 0 };
    for i in 0..run.trials {
        let mut rng = task_rng(run.seed, i);
        let f = input(simon_instance(run.n, promise, &mut rng))?;
        let mut oracle = QueryCountingOracle::new(&f);
        let outcome = input(qsim::simon_decide(&mut oracle, &eps, mode.into(), &mut rng))?;
        match outcome.verdict {
            Verdict::Accept => counts.accept += 1,
            Verdict::Reject => counts.reject += 1,
        }
    }
    let errors = if promise == PromiseCase::Injective { counts.reject } else { counts.accept };
    emit_json(
        &run.out,
        &json!({
            "n": run.n,
            "case": c,
            "epsilon": rational::to_string(&eps),
            "seed": run.seed,
            "trials": run.trials,
            "queries": queries,
            "verdicts": counts,
            "empirical_error": errors as f64 / run.trials.max(1) as f64,
        }),
    )
}

fn simon_hsp(run: &TrialArgs, order: u64, delta: &str, mode: Mode) -> Result<()> {
    let delta = parse_rational("delta", delta)?;
    let d = input(order_exponent(run.n, order))?;
    let mut successes = 0u64;
    let mut queries = 0u64;
    for i in 0..run.trials {
        let mut rng = task_rng(run.seed, i);
        let h = input(gf2::random_subspace(run.n, d, &mut rng))?;
        let f = random_hiding_function(&h, &mut rng);
        let mut oracle = QueryCountingOracle::new(&f);
        let found = input(qsim::hsp_solve(&mut oracle, &delta, mode.into(), &mut rng))?;
        queries = oracle.queries();
        if found == h {
            successes += 1;
        }
    }
    emit_json(
        &run.out,
        &json!({
            "n": run.n,
            "order": order,
            "delta": rational::to_string(&delta),
            "seed": run.seed,
            "trials": run.trials,
            "queries": queries,
            "successes": successes,
            "empirical_error": (run.trials - successes) as f64 / run.trials.max(1) as f64,
        }),
    )
}

fn classical_decide(run: &TrialArgs, c: u8, q: u64) -> Result<()> {
    let promise = case(c)?;
    let mut counts = VerdictCounts { accept: 0, reject: 0 };
    for i in 0..run.trials {
        let mut rng = task_rng(run.seed, i);
        let f = input(simon_instance(run.n, promise, &mut rng))?;
        let mut oracle = QueryCountingOracle::new(&f);
        match input(qsim::classical_decide(&mut oracle, q, &mut rng))? {
            Verdict::Accept => counts.accept += 1,
            Verdict::Reject => counts.reject += 1,
        }
    }
    let errors = if promise == PromiseCase::Injective { counts.reject } else { counts.accept };
    let detection = (promise == PromiseCase::Period)
        .then(|| rational::to_string(&qsim::classical_detection_probability(run.n, q)));
    emit_json(
        &run.out,
        &json!({
            "n": run.n,
            "case": c,
            "seed": run.seed,
            "trials": run.trials,
            "queries": q,
            "verdicts": counts,
            "empirical_error": errors as f64 / run.trials.max(1) as f64,
            "detection_probability": detection,
        }),
    )
}

fn poly_qn(
    n: Option<usize>,
    alg: &str,
    epsilon: &str,
    mc: Option<u64>,
    seed: u64,
    out: &Output,
) -> Result<()> {
    let curve: AcceptanceCurve = if alg == "simon" {
        let n = n.ok_or_else(|| usage("--n is required with --alg simon"))?;
        let eps = parse_rational("epsilon", epsilon)?;
        match mc {
            None => input(simon_exact_curve(n, &eps))?,
            Some(trials) => {
                let queries = input(qsim::simon_query_count(n, &eps))?;
                input(estimate_curve(simon_trial(eps), n, queries, "simon", trials, seed))?
            }
        }
    } else {
        let synthetic: SyntheticAlgorithm = read_json(Path::new(alg))?;
        if let Some(n) = n {
            if n != synthetic.n() {
                bail!(usage(format!("--n {n} does not match the algorithm's n = {}", synthetic.n())));
            }
        }
        match mc {
            None => input(synthetic_exact_curve(&synthetic))?,
            Some(trials) => input(estimate_curve(
                |oracle, rng| synthetic.run(oracle, rng),
                synthetic.n(),
                synthetic.queries(),
                "synthetic",
                trials,
                seed,
            ))?,
        }
    };
    emit_json(out, &curve)
}

fn poly_fit(input_path: &Path, queries: Option<u64>, out: &Output) -> Result<()> {
    let curve: AcceptanceCurve = read_json(input_path)?;
    let t = queries.unwrap_or(curve.queries);
    let report = input(degree_check(&curve, t))?;
    emit_json(out, &report)?;
    if report.pass {
        Ok(())
    } else {
        Err(CheckFailed.into())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolyFile {
    Wrapped(RationalPolynomial),
    Bare(Vec<String>),
}

fn bound_check(path: &Path, n: usize, out: &Output) -> Result<()> {
    let p = match read_json::<PolyFile>(path)? {
        PolyFile::Wrapped(p) => p,
        PolyFile::Bare(coeffs) => RationalPolynomial::new(
            coeffs
                .iter()
                .map(|c| parse_rational("poly", c))
                .collect::<Result<_>>()?,
        ),
    };
    let report = input(check_lemma(&p, n))?;
    emit_json(out, &report)?;
    match report.conclusion_ok {
        Some(false) => Err(CheckFailed.into()),
        _ => Ok(()),
    }
}

fn bound_extremal(
    n: usize,
    d: Option<usize>,
    all_n: bool,
    grid: usize,
    format: Format,
    out: &Output,
) -> Result<()> {
    let ns: Vec<usize> = if all_n { (1..=n).collect() } else { vec![n] };
    let mut results = Vec::new();
    for m in ns {
        let ds: Vec<usize> = match d {
            Some(d) => vec![d],
            None => (1..=m / 2).collect(),
        };
        for dd in ds {
            if d.is_some() && all_n && dd > m {
                continue;
            }
            results.push(input(extremal_search(m, dd, grid))?);
        }
    }
    match format {
        Format::Json => emit_json(out, &results)?,
        Format::Csv => {
            let mut text = String::from("n,d,x0,c*_num,c*_den,lemma_cap");
            for r in &results {
                text.push_str(&format!(
                    "\n{},{},{},{},{},{}",
                    r.n,
                    r.d,
                    rational::to_string(&r.x0),
                    r.c_star.numer(),
                    r.c_star.denom(),
                    r.lemma_cap.as_ref().map(rational::to_string).unwrap_or_default()
                ));
            }
            emit(out, &text)?;
        }
    }
    if results.iter().all(|r| r.within_cap) {
        Ok(())
    } else {
        Err(CheckFailed.into())
    }
}

fn bound_theorem(n: usize, epsilon: &str, out: &Output) -> Result<()> {
    let eps = parse_rational("epsilon", epsilon)?;
    let bound = input(theorem_bound(n, &eps))?;
    let c = input(polybound::reduction_constant(&eps))?;
    let simon = qsim::simon_query_count(n, &eps).ok();
    emit_json(
        out,
        &json!({
            "n": n,
            "epsilon": rational::to_string(&eps),
            "derivative_constant": rational::to_string(&c),
            "bound": bound,
            "exact": bound.is_exact(),
            "approx": bound.midpoint_f64(),
            "simon_queries": simon,
        }),
    )
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Oracle(OracleCommand::Gen { n, order, seed, out }) => oracle_gen(n, order, seed, &out),
        Command::Simon(SimonCommand::Decide { run, case, epsilon, mode }) => {
            simon_decide(&run, case, &epsilon, mode)
        }
        Command::Simon(SimonCommand::Hsp { run, order, delta, mode }) => {
            simon_hsp(&run, order, &delta, mode)
        }
        Command::Classical(ClassicalCommand::Decide { run, case, queries }) => {
            classical_decide(&run, case, queries)
        }
        Command::Poly(PolyCommand::Qn { n, alg, epsilon, exact: _, mc, seed, out }) => {
            poly_qn(n, &alg, &epsilon, mc, seed, &out)
        }
        Command::Poly(PolyCommand::Fit { input, queries, out }) => poly_fit(&input, queries, &out),
        Command::Bound(BoundCommand::Check { poly, n, out }) => bound_check(&poly, n, &out),
        Command::Bound(BoundCommand::Extremal { n, d, all_n, grid, format, out }) => {
            bound_extremal(n, d, all_n, grid, format, &out)
        }
        Command::Bound(BoundCommand::Theorem { n, epsilon, out }) => bound_theorem(n, &epsilon, &out),
        Command::VerifyPaper(args) => {
            let ledger = verify::run(args.max_n, args.seed);
            emit_json(&args.out, &ledger)?;
            if ledger.failed == 0 {
                Ok(())
            } else {
                Err(CheckFailed.into())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<CheckFailed>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
