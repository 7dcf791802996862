//! Command-line front end.
//!
//! Exit codes: 0 success or true, 1 checked and false, 2 usage or input
//! error, 3 internal or resource error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cyclotomic::{
    cos_elem, cyclotomic_poly, galois_kernel, rationality_nullspace, vandermonde_rank, CycloError,
};
use crate::formula::{self, eval_ground, parse, parse_assignment, FormulaError};
use crate::growth::{circle, estimate_order, pell_residual, GrowthError, SolutionSpec};
use crate::params::{select_params_str, ParamSet};
use crate::pell::{check_denef_with, gen, group_add, group_pow, recognize, PellPair};
use crate::polyring::RatPoly;
use crate::reduction::{
    bounded_search, build_witness, check_witness, compile_htp, yk_polynomial_filter, DiophantineInput,
    ReductionError, SearchLimits, WitnessBundle,
};
use crate::verify::{verify_all, Level, Suite};

#[derive(Debug, Parser)]
#[command(name = "htp-lz", version, about = "Pell/Chebyshev machinery, cyclotomic checks and an L_z reduction compiler")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Node budget for `reduce search`.
    #[arg(long, global = true, default_value_t = 5_000_000)]
    budget: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Chebyshev pairs and the Pell group law.
    #[command(subcommand)]
    Pell(PellCmd),
    /// Cyclotomic field computations.
    #[command(subcommand)]
    Cyclo(CycloCmd),
    /// Constants m, p, q, k for an order bound.
    Params {
        /// Order bound as an integer or p/q.
        #[arg(long)]
        rho: String,
    },
    /// Parse, print and evaluate formulas.
    #[command(subcommand)]
    Formula(FormulaCmd),
    /// Compile Diophantine equations and check witnesses.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Numerical growth of transcendental Pell solutions.
    #[command(subcommand)]
    Growth(GrowthCmd),
    /// Run the self-check suites.
    Verify {
        /// quick or full.
        level: Level,
        /// Perturb one suite on purpose (for testing the harness).
        #[arg(long)]
        inject_fault: Option<Suite>,
    },
}

#[derive(Debug, Subcommand)]
enum PellCmd {
    /// Print (x_n, y_n).
    Gen {
        #[arg(allow_negative_numbers = true)]
        n: i64,
    },
    /// Group sum of two pair files.
    Add { a: PathBuf, b: PathBuf },
    /// k-fold group power of a pair file.
    Pow { pair: PathBuf, k: u64 },
    /// Identify a pair file as (eps*x_n, y_n).
    Recognize { pair: PathBuf },
    /// Check the classical properties of the family up to a bound.
    Denef {
        #[arg(long)]
        max: u32,
        /// Bound for the divisibility sweep (defaults to --max).
        #[arg(long)]
        div_max: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
enum CycloCmd {
    /// The k-th cyclotomic polynomial.
    Phi { k: u64 },
    /// cos(2*pi*a/k) in the power basis of Q(zeta_k).
    Cos {
        k: u64,
        #[arg(allow_negative_numbers = true)]
        a: i64,
    },
    /// Rank of the cosine Vandermonde matrix.
    Rank {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u64,
    },
    /// Polynomials of degree <= m taking rational values at all cos(2*pi*a/k).
    Nullspace {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
    },
    /// Kernel of G_pq -> G_q.
    Kernel {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Debug, Subcommand)]
enum FormulaCmd {
    /// Echo the canonical form.
    Parse { file: PathBuf },
    /// Evaluate under a witness file.
    Eval {
        file: PathBuf,
        #[arg(long)]
        assign: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum ReduceCmd {
    /// Compile `P = 0` into a sentence.
    Compile {
        #[arg(long)]
        rho: String,
        equation: String,
    },
    /// Build the witness bundle for a solution.
    Witness {
        #[arg(long)]
        rho: String,
        equation: String,
        /// Comma-separated integers, in order of first appearance.
        #[arg(long, allow_hyphen_values = true)]
        solution: String,
    },
    /// Check a sentence against a witness file.
    Check { formula: PathBuf, witness: PathBuf },
    /// Bounded search for polynomial witnesses.
    Search {
        formula: PathBuf,
        #[arg(long)]
        maxdeg: usize,
        #[arg(long)]
        maxheight: u64,
    },
    /// Decide power-subgroup membership over polynomial candidates.
    Filter {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Debug, Subcommand)]
enum GrowthCmd {
    /// Estimate the order of y.
    Order {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long)]
        h: String,
        #[arg(long)]
        rmin: f64,
        #[arg(long)]
        rmax: f64,
        #[arg(long, default_value_t = 12)]
        count: usize,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        eps: i8,
    },
    /// Pell residual on a circle.
    Residual {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long)]
        h: String,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        eps: i8,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Internal(m) => m,
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

impl From<FormulaError> for Failure {
    fn from(e: FormulaError) -> Self {
        usage(e)
    }
}

impl From<CycloError> for Failure {
    fn from(e: CycloError) -> Self {
        usage(e)
    }
}

impl From<GrowthError> for Failure {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::TooClose(_) | GrowthError::BadArgs(_) => usage(e),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::BudgetExceeded(_) | ReductionError::TooLarge(_) => Failure::Internal(e.to_string()),
            _ => usage(e),
        }
    }
}

/// What a command produced: text or JSON, and whether the checked claim held.
struct Output {
    text: String,
    json: String,
    ok: bool,
}

impl Output {
    fn new(text: impl Into<String>, json: impl Serialize) -> Self {
        Output {
            text: text.into(),
            json: serde_json::to_string(&json).expect("serializable"),
            ok: true,
        }
    }

    fn checked(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_pair(path: &Path) -> Result<PellPair, Failure> {
    PellPair::parse_pair(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn params(rho: &str) -> Result<ParamSet, Failure> {
    select_params_str(rho).map_err(usage)
}

fn parse_poly(s: &str) -> Result<RatPoly, Failure> {
    s.parse().map_err(|e| usage(format!("bad polynomial `{s}`: {e}")))
}

fn pair_json(p: &PellPair) -> Value {
    json!({"x": p.x().to_string(), "y": p.y().to_string()})
}

fn pair_output(p: &PellPair) -> Output {
    Output::new(p.to_string(), pair_json(p))
}

fn run_pell(cmd: PellCmd) -> Result<Output, Failure> {
    Ok(match cmd {
        PellCmd::Gen { n } => pair_output(&gen(n)),
        PellCmd::Add { a, b } => pair_output(&group_add(&read_pair(&a)?, &read_pair(&b)?)),
        PellCmd::Pow { pair, k } => pair_output(&group_pow(&read_pair(&pair)?, k)),
        PellCmd::Recognize { pair } => match recognize(&read_pair(&pair)?) {
            Some(idx) => Output::new(
                format!("n = {}, eps = {}", idx.n, idx.epsilon),
                json!({"recognized": true, "n": idx.n.to_string(), "epsilon": idx.epsilon}),
            ),
            None => Output::new("not in family", json!({"recognized": false})).checked(false),
        },
        PellCmd::Denef { max, div_max } => {
            let r = check_denef_with(max, div_max.unwrap_or(max));
            let text = match &r.counterexample {
                None => format!("pass (|n| <= {max})"),
                Some(c) => format!("fail: {c}"),
            };
            let pass = r.pass;
            Output::new(text, &r).checked(pass)
        }
    })
}

fn run_cyclo(cmd: CycloCmd) -> Result<Output, Failure> {
    Ok(match cmd {
        CycloCmd::Phi { k } => {
            if k == 0 {
                return Err(usage("k must be at least 1"));
            }
            let p = cyclotomic_poly(k);
            Output::new(p.to_string(), json!({"k": k, "phi": p.to_string()}))
        }
        CycloCmd::Cos { k, a } => {
            let c = cos_elem(k, a)?;
            Output::new(c.coords().to_string(), json!({"k": k, "a": a, "coords": c.coords().to_string()}))
        }
        CycloCmd::Rank { q, m } => {
            let r = vandermonde_rank(q, m)?;
            Output::new(r.to_string(), json!({"q": q, "m": m, "rank": r}))
        }
        CycloCmd::Nullspace { k, m } => {
            let r = rationality_nullspace(k, m)?;
            let basis: Vec<String> = r.basis.iter().map(|b| b.to_string()).collect();
            let mut text = format!("dimension {}\n", r.dimension);
            for b in &basis {
                text.push_str(b);
                text.push('\n');
            }
            Output::new(
                text.trim_end(),
                json!({"k": k, "m": m, "dimension": r.dimension, "basis": basis, "constraints": r.constraints}),
            )
        }
        CycloCmd::Kernel { p, q } => {
            let reps: Vec<u64> = galois_kernel(p, q)?.iter().map(|g| g.rep()).collect();
            let text: Vec<String> = reps.iter().map(|r| r.to_string()).collect();
            Output::new(text.join(" "), json!({"p": p, "q": q, "size": reps.len(), "reps": reps}))
        }
    })
}

fn run_formula(cmd: FormulaCmd) -> Result<Output, Failure> {
    Ok(match cmd {
        FormulaCmd::Parse { file } => {
            let f = parse(&read(&file)?)?;
            let text = formula::print(&f);
            Output::new(text.clone(), json!({"formula": text, "free": f.free_vars()}))
        }
        FormulaCmd::Eval { file, assign } => {
            let f = parse(&read(&file)?)?;
            let a = parse_assignment(&read(&assign)?)?;
            let v = eval_ground(&f, &a)?;
            Output::new(v.to_string(), json!({"value": v})).checked(v)
        }
    })
}

fn parse_solution(s: &str) -> Result<Vec<BigInt>, Failure> {
    s.split(',')
        .map(|p| p.trim().parse::<BigInt>().map_err(|_| usage(format!("bad solution entry `{p}`"))))
        .collect()
}

fn run_reduce(cmd: ReduceCmd, budget: u64) -> Result<Output, Failure> {
    Ok(match cmd {
        ReduceCmd::Compile { rho, equation } => {
            let p = params(&rho)?;
            let input = DiophantineInput::parse(&equation)?;
            let f = compile_htp(&input, &p);
            let text = formula::print(&f);
            Output::new(
                text.clone(),
                json!({
                    "k": p.k,
                    "unknowns": input.unknowns(),
                    "variables": f.bound_vars().len(),
                    "atoms": f.atoms().len(),
                    "sentence": text,
                }),
            )
        }
        ReduceCmd::Witness { rho, equation, solution } => {
            let p = params(&rho)?;
            let input = DiophantineInput::parse(&equation)?;
            let sol = parse_solution(&solution)?;
            match build_witness(&input, &sol, &p) {
                Ok(w) => {
                    let map: serde_json::Map<String, Value> = w
                        .assignment
                        .iter()
                        .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
                        .collect();
                    Output::new(w.to_text().trim_end(), json!({"witness": map, "notes": w.notes}))
                }
                Err(e @ ReductionError::NotASolution(..)) => {
                    Output::new(e.to_string(), json!({"error": e.to_string()})).checked(false)
                }
                Err(e) => return Err(e.into()),
            }
        }
        ReduceCmd::Check { formula, witness } => {
            let f = parse(&read(&formula)?)?;
            let w = WitnessBundle::from_text(&read(&witness)?)?;
            let v = check_witness(&f, &w.assignment)?;
            Output::new(v.to_string(), json!({"value": v})).checked(v)
        }
        ReduceCmd::Search { formula, maxdeg, maxheight } => {
            let f = parse(&read(&formula)?)?;
            let limits = SearchLimits {
                max_degree: maxdeg,
                max_height: maxheight,
                budget,
            };
            match bounded_search(&f, limits)? {
                Some(a) => {
                    let text = formula::format_assignment(&a);
                    let map: serde_json::Map<String, Value> =
                        a.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect();
                    Output::new(text.trim_end(), json!({"found": true, "witness": map}))
                }
                None => Output::new("none found within bounds", json!({"found": false})).checked(false),
            }
        }
        ReduceCmd::Filter { rho, n } => {
            let p = params(&rho)?;
            let r = yk_polynomial_filter(&p, n);
            let text = format!(
                "k = {}, |n| <= {}: {} of {} candidates accepted, {} discrepancies",
                r.k,
                r.n_max,
                r.accepted.len(),
                r.candidates,
                r.discrepancies.len()
            );
            let pass = r.pass;
            Output::new(text, &r).checked(pass)
        }
    })
}

fn run_growth(cmd: GrowthCmd) -> Result<Output, Failure> {
    Ok(match cmd {
        GrowthCmd::Order {
            n,
            h,
            rmin,
            rmax,
            count,
            eps,
        } => {
            let spec = SolutionSpec::new(n, parse_poly(&h)?).with_sign(eps);
            let e = estimate_order(&spec, rmin, rmax, count)?;
            let text = serde_json::to_string(&e).expect("serializable");
            Output::new(text, &e)
        }
        GrowthCmd::Residual {
            n,
            h,
            radius,
            samples,
            eps,
        } => {
            let spec = SolutionSpec::new(n, parse_poly(&h)?).with_sign(eps);
            if samples == 0 {
                return Err(usage("--samples must be positive"));
            }
            let pts: Vec<Complex64> = circle(radius, samples);
            let r = pell_residual(&spec, &pts)?;
            Output::new(format!("{r:e}"), json!({"residual": r, "radius": radius, "samples": samples}))
        }
    })
}

fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.cmd {
        Cmd::Pell(c) => run_pell(c),
        Cmd::Cyclo(c) => run_cyclo(c),
        Cmd::Params { rho } => {
            let p = params(&rho)?;
            Ok(Output::new(p.to_json(), &p))
        }
        Cmd::Formula(c) => run_formula(c),
        Cmd::Reduce(c) => run_reduce(c, cli.budget),
        Cmd::Growth(c) => run_growth(c),
        Cmd::Verify { level, inject_fault } => {
            let r = verify_all(level, inject_fault);
            let lines: Vec<String> = r
                .suites
                .iter()
                .map(|s| format!("{:<12} {}  {}", s.suite.name(), if s.pass { "PASS" } else { "FAIL" }, s.detail))
                .collect();
            let pass = r.pass;
            Ok(Output::new(lines.join("\n"), &r).checked(pass))
        }
    }
}

/// Runs the CLI on `argv` (including the program name), writing results to
/// `out` and diagnostics to `err`; returns the exit code.
pub fn dispatch_to<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(o) => {
            let _ = if json {
                writeln!(out, "{}", o.json)
            } else {
                writeln!(out, "{}", o.text)
            };
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(f) => {
            if json {
                let _ = writeln!(out, "{}", json!({"error": f.message(), "exit": f.code()}));
            }
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

/// [`dispatch_to`] on standard output and standard error.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_to(argv, &mut stdout.lock(), &mut stderr.lock())
}
