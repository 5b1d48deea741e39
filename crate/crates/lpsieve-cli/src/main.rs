//! `lpsieve` — sieving solvers for SVP/CVP in any ℓp norm, the
//! complexity-exponent calculator, instance generation, and the
//! brute-force oracle.
//!
//! Exit codes: 0 success, 2 invalid parameters or unreadable input,
//! 3 no vector found, 4 refused for size.

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lpsieve::exponents::{
    self, ExponentInput, ExponentReport, FormulaFlags, Objective, PClass, Variant,
};
use lpsieve::lattice::{self, LatticeKind};
use lpsieve::oracle;
use lpsieve::solver::{self, RunStats, SieveVariant, SolveParams, SolveResult};
use lpsieve::{Basis, Error, NormP};

#[derive(Parser)]
#[command(name = "lpsieve", version, about = "Provable lattice sieving in any lp norm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve exact SVP on a basis file.
    Svp(SolveArgs),
    /// Solve approximate SVP (any nonzero survivor).
    SvpApprox(SolveArgs),
    /// Solve approximate CVP against a target vector.
    Cvp(CvpArgs),
    /// Evaluate, optimize or tabulate the complexity exponents.
    Exponents(ExponentArgs),
    /// Generate a random test lattice.
    Gen(GenArgs),
    /// Brute-force enumeration oracle.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args)]
struct SolveArgs {
    /// Basis file (rows are basis vectors; fplll-style brackets accepted).
    basis: String,
    /// Norm exponent: a real >= 1, or "inf" (also "0") for the max norm.
    #[arg(long, default_value = "2")]
    p: String,
    #[arg(long, default_value_t = 0.6)]
    gamma: f64,
    #[arg(long, default_value_t = 0.9)]
    xi: f64,
    /// Sieve variant: linear | quadratic | mixed | birthday.
    #[arg(long, default_value = "linear")]
    variant: String,
    /// Big-cube edge multiplier of the mixed sieve.
    #[arg(long = "A", visible_alias = "a")]
    a: Option<f64>,
    /// Pair-budget override (required once the provable budget saturates).
    #[arg(long = "N", visible_alias = "n-pairs")]
    n: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target approximation factor (approximate SVP only).
    #[arg(long)]
    tau: Option<f64>,
    /// Check the result against the enumeration oracle (rank <= 10).
    #[arg(long)]
    verify: bool,
    /// Shortcut the guess ladder with the oracle's exact lambda_1.
    #[arg(long)]
    lambda_oracle: bool,
    /// Sibling tables of the birthday prepass.
    #[arg(long, default_value_t = 1)]
    siblings: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Emit the result as one JSON object on stdout.
    #[arg(long)]
    json: bool,
    /// Include wall-clock timings in the output (breaks bit-for-bit
    /// reproducibility of the JSON).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct CvpArgs {
    #[command(flatten)]
    base: SolveArgs,
    /// Target vector: inline whitespace-separated coordinates, or a path
    /// to a one-line file.
    #[arg(long, allow_hyphen_values = true)]
    target: String,
    /// CVP distance-ladder ratio (rungs grow by 1+alpha).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
}

#[derive(Args)]
struct ExponentArgs {
    #[arg(long = "p-class", default_value = "generic")]
    p_class: String,
    #[arg(long, default_value = "linear_birthday")]
    variant: String,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long = "A", visible_alias = "a")]
    a: Option<f64>,
    /// Apply the Euclidean overlap constant regardless of p-class.
    #[arg(long)]
    cs2: bool,
    /// Euclidean c_b without the factor 2 inside the logarithm.
    #[arg(long)]
    alt_cb_p2: bool,
    /// Generic c_b without the +1 inside the logarithm.
    #[arg(long)]
    cb_noplus1: bool,
    /// Drop c_s from the compositions.
    #[arg(long)]
    drop_cs: bool,
    /// Corner-anchored max-norm cell count for c_c.
    #[arg(long)]
    pinf_corner: bool,
    /// Minimize time | space | max_both over (gamma, xi[, A]).
    #[arg(long)]
    optimize: Option<String>,
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    /// Write the trade-off frontier as CSV to this path ("-" = stdout).
    #[arg(long)]
    curve: Option<String>,
    /// gamma grid "lo:hi:steps" for --curve.
    #[arg(long = "gamma-range", default_value = "0.1:0.9:40")]
    gamma_range: String,
    /// xi grid "lo:hi:steps" for --curve.
    #[arg(long = "xi-range", default_value = "0.55:4:40")]
    xi_range: String,
    /// Print the reconciliation table of the published headline figures.
    #[arg(long)]
    reconcile: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// uniform_modular | knapsack
    #[arg(long, default_value = "knapsack")]
    kind: String,
    #[arg(long, default_value_t = 10)]
    bits: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact SVP by coefficient enumeration.
    Svp(OracleArgs),
    /// Exact CVP by coefficient enumeration.
    Cvp(OracleCvpArgs),
}

#[derive(Args)]
struct OracleArgs {
    basis: String,
    #[arg(long, default_value = "2")]
    p: String,
    /// Coefficient box half-width (derived from the basis when absent).
    #[arg(long)]
    bound: Option<u32>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OracleCvpArgs {
    #[command(flatten)]
    base: OracleArgs,
    #[arg(long, allow_hyphen_values = true)]
    target: String,
}

// --- JSON shapes -------------------------------------------------------------

#[derive(Serialize)]
struct ParamsEcho {
    gamma: f64,
    xi: f64,
    variant: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    pairs: u64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    threads: usize,
}

#[derive(Serialize)]
struct ResultJson {
    coefficients: Vec<String>,
    vector: Vec<f64>,
    norm: f64,
}

#[derive(Serialize)]
struct SolveJson<'a> {
    command: &'a str,
    p: String,
    params: ParamsEcho,
    result: ResultJson,
    stats: &'a RunStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_norm: Option<f64>,
}

fn result_json(r: &SolveResult) -> ResultJson {
    ResultJson {
        coefficients: r.point.coeffs.iter().map(|c| c.to_string()).collect(),
        vector: r.vector.clone(),
        norm: r.norm,
    }
}

// --- helpers -----------------------------------------------------------------

fn read_basis(path: &str) -> Result<Basis, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read basis file {path:?}: {e}")))?;
    lattice::parse_basis(&text)
}

fn read_target(spec: &str) -> Result<Vec<f64>, Error> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| Error::Parse(format!("cannot read target file {spec:?}: {e}")))?;
        lattice::parse_vector(&text)
    } else {
        lattice::parse_vector(spec)
    }
}

fn parse_variant(name: &str, a: Option<f64>) -> Result<SieveVariant, Error> {
    match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "linear" => Ok(SieveVariant::Linear),
        "quadratic" => Ok(SieveVariant::Quadratic),
        "mixed" => {
            let a = a.ok_or_else(|| {
                Error::InvalidParameter("variant mixed requires --A".into())
            })?;
            Ok(SieveVariant::Mixed(a))
        }
        "birthday" | "linear_birthday" => Ok(SieveVariant::LinearBirthday),
        other => Err(Error::InvalidParameter(format!(
            "unknown sieve variant {other:?} (expected linear, quadratic, mixed or birthday)"
        ))),
    }
}

fn parse_range(spec: &str) -> Result<(f64, f64, usize), Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParameter(format!(
            "range must be lo:hi:steps (got {spec:?})"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad range start {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad range end {:?}", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad range step count {:?}", parts[2])))?;
    Ok((lo, hi, steps))
}

fn solve_params(args: &SolveArgs, basis: &Basis, p: NormP) -> Result<SolveParams, Error> {
    let variant = parse_variant(&args.variant, args.a)?;
    let mut params = SolveParams {
        p,
        gamma: args.gamma,
        xi: args.xi,
        variant,
        n_override: args.n,
        seed: args.seed,
        tau: args.tau,
        threads: args.threads,
        sibling_count: args.siblings,
        ..SolveParams::default()
    };
    if args.lambda_oracle {
        if basis.rank() > 10 {
            return Err(Error::TooLarge(
                "--lambda-oracle needs rank <= 10 for enumeration".into(),
            ));
        }
        let reduced = lattice::lll_reduce(basis);
        let bound = oracle::default_coeff_bound(&reduced, p);
        let (_, lam) = oracle::enum_svp(&reduced, p, bound)?;
        params.lambda_hint = Some(lam);
    }
    params.validate()?;
    Ok(params)
}

fn oracle_norm_for(basis: &Basis, p: NormP) -> Result<f64, Error> {
    let reduced = lattice::lll_reduce(basis);
    let bound = oracle::default_coeff_bound(&reduced, p);
    let (_, lam) = oracle::enum_svp(&reduced, p, bound)?;
    Ok(lam)
}

fn print_solve(
    command: &str,
    p: NormP,
    args: &SolveArgs,
    alpha: Option<f64>,
    mut result: SolveResult,
    verified: Option<bool>,
    oracle_norm: Option<f64>,
) {
    if !args.timings {
        result.stats.wallclock_ms = None;
    }
    if args.json {
        let json = SolveJson {
            command,
            p: p.to_string(),
            params: ParamsEcho {
                gamma: args.gamma,
                xi: args.xi,
                variant: parse_variant(&args.variant, args.a).expect("validated").name(),
                a: args.a,
                pairs: result.stats.pairs_sampled,
                seed: args.seed,
                tau: args.tau,
                alpha,
                threads: args.threads,
            },
            result: result_json(&result),
            stats: &result.stats,
            verified,
            oracle_norm,
        };
        println!("{}", serde_json::to_string(&json).expect("serializable"));
    } else {
        let coeffs: Vec<String> = result.point.coeffs.iter().map(|c| c.to_string()).collect();
        println!("norm      {:.12}", result.norm);
        println!("coeffs    [{}]", coeffs.join(", "));
        let vec_str: Vec<String> = result.vector.iter().map(|v| format!("{v:.6}")).collect();
        println!("vector    [{}]", vec_str.join(", "));
        println!(
            "stats     pairs={} rungs={} iters={} survivors={} lost={}",
            result.stats.pairs_sampled,
            result.stats.rungs_tried,
            result.stats.iterations,
            result.stats.survivors,
            result.stats.lost
        );
        if let Some(ms) = result.stats.wallclock_ms {
            println!("wallclock {ms} ms");
        }
        if let Some(v) = verified {
            println!("verified  {v} (oracle norm {})", oracle_norm.unwrap());
        }
    }
}

// --- subcommand drivers --------------------------------------------------------

fn run_svp(args: &SolveArgs, approx: bool) -> Result<(), Error> {
    let basis = read_basis(&args.basis)?;
    let p = NormP::from_str(&args.p)?;
    let params = solve_params(args, &basis, p)?;
    let result = if approx {
        solver::svp_approx(&basis, &params)?
    } else {
        solver::svp_exact(&basis, &params)?
    };
    let (verified, oracle_norm) = if args.verify && basis.rank() <= 10 {
        let lam = oracle_norm_for(&basis, p)?;
        let ok = if approx {
            let tau = args.tau.unwrap_or(args.xi * (2.0 - args.gamma) / (1.0 - args.gamma));
            result.norm <= tau * (1.0 + 1.0 / basis.rank() as f64) * lam + 1e-9
        } else {
            (result.norm - lam).abs() <= 1e-6 * lam.max(1.0)
        };
        (Some(ok), Some(lam))
    } else {
        if args.verify {
            eprintln!("verify skipped: rank > 10");
        }
        (None, None)
    };
    print_solve(
        if approx { "svp-approx" } else { "svp" },
        p,
        args,
        None,
        result,
        verified,
        oracle_norm,
    );
    Ok(())
}

fn run_cvp(args: &CvpArgs) -> Result<(), Error> {
    let basis = read_basis(&args.base.basis)?;
    let p = NormP::from_str(&args.base.p)?;
    let target = read_target(&args.target)?;
    let mut params = solve_params(&args.base, &basis, p)?;
    params.alpha = args.alpha;
    params.lambda_hint = None;
    let result = solver::cvp_approx(&basis, &target, &params)?;
    let (verified, oracle_dist) = if args.base.verify && basis.rank() <= 10 {
        let reduced = lattice::lll_reduce(&basis);
        let bound = oracle::default_cvp_coeff_bound(&reduced, &target, p);
        let (_, dist) = oracle::enum_cvp(&reduced, &target, p, bound)?;
        let tau = params.tau.expect("validated");
        (Some(result.norm <= 2.0 * tau * dist + 1e-9), Some(dist))
    } else {
        if args.base.verify {
            eprintln!("verify skipped: rank > 10");
        }
        (None, None)
    };
    print_solve(
        "cvp",
        p,
        &args.base,
        Some(args.alpha),
        result,
        verified,
        oracle_dist,
    );
    Ok(())
}

#[derive(Serialize)]
struct ExponentJson<'a> {
    command: &'a str,
    p_class: PClass,
    variant: Variant,
    gamma: f64,
    xi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    report: ExponentReport,
}

fn report_table(report: &ExponentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "c_c      {:.6}", report.c_c);
    let _ = writeln!(out, "c_s      {:.6}", report.c_s);
    let _ = writeln!(out, "c_b      {:.6}", report.c_b);
    if let Some(cp) = report.c_p {
        let _ = writeln!(out, "c_p      {:.6}", cp);
    }
    let _ = writeln!(out, "c_space  {:.6}", report.c_space);
    let _ = writeln!(out, "c_time   {:.6}", report.c_time);
    let _ = writeln!(out, "flags    {}", report.flags.describe());
    out
}

fn run_exponents(args: &ExponentArgs) -> Result<(), Error> {
    let p_class = PClass::from_str(&args.p_class)?;
    let variant = Variant::from_str(&args.variant)?;
    let flags = FormulaFlags {
        author_cs2: args.cs2,
        alt_cb_p2: args.alt_cb_p2,
        cb_noplus1: args.cb_noplus1,
        drop_cs: args.drop_cs,
        pinf_corner_cc: args.pinf_corner,
    };

    if args.reconcile {
        let table = exponents::reconciliation_table();
        if args.json {
            println!("{}", serde_json::to_string(&table).expect("serializable"));
        } else {
            println!(
                "{:>7}  {:>9}  {:>9}  {:>5}  {:<22}  note",
                "quote", "literal", "variant", "ok", "flags"
            );
            for row in &table {
                println!(
                    "{:>7.3}  {:>9.4}  {:>9.4}  {:>5}  {:<22}  {}",
                    row.quote,
                    row.literal,
                    row.variant_value,
                    if row.within_tolerance { "yes" } else { "NO" },
                    row.variant_flags.describe(),
                    row.note.unwrap_or("")
                );
            }
        }
        return Ok(());
    }

    if let Some(objective) = &args.optimize {
        let objective = Objective::from_str(objective)?;
        let (best, report) =
            exponents::optimize_exponents(p_class, variant, objective, args.resolution)?;
        if args.json {
            #[derive(Serialize)]
            struct OptJson {
                command: &'static str,
                p_class: PClass,
                variant: Variant,
                objective: Objective,
                best: exponents::OptimalParams,
                report: ExponentReport,
            }
            let json = OptJson {
                command: "exponents-optimize",
                p_class,
                variant,
                objective,
                best,
                report,
            };
            println!("{}", serde_json::to_string(&json).expect("serializable"));
        } else {
            println!(
                "optimum  gamma={:.6} xi={:.6}{} value={:.6}",
                best.gamma,
                best.xi,
                best.a.map(|a| format!(" A={a:.6}")).unwrap_or_default(),
                best.objective_value
            );
            print!("{}", report_table(&report));
        }
        return Ok(());
    }

    if let Some(curve_path) = &args.curve {
        let gamma_range = parse_range(&args.gamma_range)?;
        let xi_range = parse_range(&args.xi_range)?;
        let rows = exponents::tradeoff_curve(p_class, variant, gamma_range, xi_range, args.a, flags)?;
        let mut csv = String::new();
        let _ = writeln!(csv, "{}", exponents::CSV_HEADER);
        for row in &rows {
            let _ = writeln!(csv, "{}", row.to_csv());
        }
        if curve_path == "-" {
            print!("{csv}");
        } else {
            std::fs::write(curve_path, csv)
                .map_err(|e| Error::Parse(format!("cannot write {curve_path:?}: {e}")))?;
        }
        return Ok(());
    }

    let gamma = args.gamma.ok_or_else(|| {
        Error::InvalidParameter("exponent evaluation requires --gamma".into())
    })?;
    let xi = args
        .xi
        .ok_or_else(|| Error::InvalidParameter("exponent evaluation requires --xi".into()))?;
    let input = ExponentInput {
        p_class,
        gamma,
        xi,
        a: args.a,
        variant,
        flags,
    };
    let report = exponents::eval_exponents(&input)?;
    if args.json {
        let json = ExponentJson {
            command: "exponents",
            p_class,
            variant,
            gamma,
            xi,
            a: args.a,
            report,
        };
        println!("{}", serde_json::to_string(&json).expect("serializable"));
    } else {
        print!("{}", report_table(&report));
    }
    Ok(())
}

fn run_gen(args: &GenArgs) -> Result<(), Error> {
    let kind = LatticeKind::from_str(&args.kind)?;
    let basis = lattice::random_lattice(args.n, kind, args.bits, args.seed)?;
    let text = lattice::format_basis(&basis);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write {path:?}: {e}")))?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleJson<'a> {
    command: &'a str,
    p: String,
    coefficients: Vec<String>,
    vector: Vec<f64>,
    norm: f64,
}

fn run_oracle(cmd: &OracleCommand) -> Result<(), Error> {
    match cmd {
        OracleCommand::Svp(args) => {
            let basis = read_basis(&args.basis)?;
            let p = NormP::from_str(&args.p)?;
            let reduced = lattice::lll_reduce(&basis);
            let bound = args
                .bound
                .unwrap_or_else(|| oracle::default_coeff_bound(&reduced, p));
            let (z, norm) = oracle::enum_svp(&reduced, p, bound)?;
            let v = reduced.embed(&z);
            let point = basis.coefficients_of(&v).expect("same lattice");
            emit_oracle("oracle-svp", p, &basis, &point, norm, args.json);
            Ok(())
        }
        OracleCommand::Cvp(args) => {
            let basis = read_basis(&args.base.basis)?;
            let p = NormP::from_str(&args.base.p)?;
            let target = read_target(&args.target)?;
            let reduced = lattice::lll_reduce(&basis);
            let bound = args
                .base
                .bound
                .unwrap_or_else(|| oracle::default_cvp_coeff_bound(&reduced, &target, p));
            let (z, dist) = oracle::enum_cvp(&reduced, &target, p, bound)?;
            let v = reduced.embed(&z);
            let point = basis.coefficients_of(&v).expect("same lattice");
            emit_oracle("oracle-cvp", p, &basis, &point, dist, args.base.json);
            Ok(())
        }
    }
}

fn emit_oracle(
    command: &str,
    p: NormP,
    basis: &Basis,
    point: &lpsieve::LatticePoint,
    norm: f64,
    json: bool,
) {
    let coeffs: Vec<String> = point.coeffs.iter().map(|c| c.to_string()).collect();
    let zint: Vec<i64> = point
        .coeffs
        .iter()
        .map(|c| i64::try_from(c.clone()).expect("desk-scale coefficients"))
        .collect();
    let vector = basis.embed_f64(&zint);
    if json {
        let out = OracleJson {
            command,
            p: p.to_string(),
            coefficients: coeffs,
            vector,
            norm,
        };
        println!("{}", serde_json::to_string(&out).expect("serializable"));
    } else {
        println!("norm    {norm:.12}");
        println!("coeffs  [{}]", coeffs.join(", "));
        let vec_str: Vec<String> = vector.iter().map(|v| format!("{v:.6}")).collect();
        println!("vector  [{}]", vec_str.join(", "));
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Svp(args) => run_svp(args, false),
        Command::SvpApprox(args) => run_svp(args, true),
        Command::Cvp(args) => run_cvp(args),
        Command::Exponents(args) => run_exponents(args),
        Command::Gen(args) => run_gen(args),
        Command::Oracle(cmd) => run_oracle(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::InvalidParameter(_) | Error::Parse(_) => 2,
                Error::NotFound { .. } => 3,
                Error::TooLarge(_) => 4,
                Error::ContractViolation(_) => 1,
            };
            ExitCode::from(code)
        }
    }
}
