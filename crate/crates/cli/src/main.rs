//! Command-line driver: single computations, theorem-verification
//! comparisons, corpus scans, and machine-readable reports.
//!
//! Exit codes are a stable contract: 0 success, 2 hypothesis failure,
//! 3 oracle/criterion inconclusive, 4 equivalence violation, 1 other error.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use twodescent::arith;
use twodescent::cassels::{self, Verdict};
use twodescent::curves::{CompanionTriple, CurveTriple, TwistParam};
use twodescent::genus;
use twodescent::selmer::{self, Method, SelmerOptions};
use twodescent::Error as CoreError;

const EXIT_HYPOTHESIS: i32 = 2;
const EXIT_INCONCLUSIVE: i32 = 3;
const EXIT_VIOLATION: i32 = 4;

#[derive(Parser)]
#[command(name = "twodescent", version, about = "2-descent on quadratic twists: Selmer groups, Cassels pairings, class-group criteria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the pure 2-Selmer group of a twist.
    Selmer(SelmerArgs),
    /// Compute the Cassels pairing Gram matrix and the rank-0 verdict.
    Pairing(PairingArgs),
    /// Compare Selmer groups and pairings of a curve and its companion.
    Compare(CompareArgs),
    /// Evaluate the congruent-curve class-group criteria.
    Congruent(CongruentArgs),
    /// Scan a range of twists, streaming one record per n.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Matrix,
    Direct,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Text,
    Csv,
    Jsonl,
}

#[derive(Args)]
struct SelmerArgs {
    /// Curve coefficients e1,e2,e3 with e1+e2+e3 = 0.
    #[arg(long, value_name = "E1,E2,E3", allow_hyphen_values = true)]
    curve: String,
    /// Positive odd square-free twist parameter.
    #[arg(long)]
    n: String,
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Skip theorem hypothesis checks (matrix method).
    #[arg(long)]
    unchecked: bool,
    /// Extra digits on every solvability-oracle depth default.
    #[arg(long, default_value = "0")]
    oracle_depth_boost: u32,
}

#[derive(Args)]
struct PairingArgs {
    #[arg(long, value_name = "E1,E2,E3", allow_hyphen_values = true)]
    curve: String,
    #[arg(long)]
    n: String,
    /// Choice seed for conic solutions and local points.
    #[arg(long, default_value = "0")]
    seed: u64,
    #[arg(long, value_enum, default_value = "matrix")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long)]
    unchecked: bool,
    /// Extra digits on every solvability-oracle depth default.
    #[arg(long, default_value = "0")]
    oracle_depth_boost: u32,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_name = "E1,E2,E3", allow_hyphen_values = true)]
    curve: String,
    /// Companion triple a,b,c with e1·a² + e2·b² + e3·c² = 0.
    #[arg(long, value_name = "A,B,C", allow_hyphen_values = true)]
    companion: String,
    #[arg(long)]
    n: String,
    #[arg(long, default_value = "0")]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    OddThm,
    EvenThm,
}

#[derive(Args)]
struct CongruentArgs {
    #[arg(long)]
    n: String,
    #[arg(long, value_enum)]
    variant: VariantArg,
    /// Companion triple for the congruent curve (default 1,1,1).
    #[arg(long, value_name = "A,B,C", default_value = "1,1,1", allow_hyphen_values = true)]
    companion: String,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Class-group cache file (length-prefixed binary records).
    #[arg(long)]
    class_cache: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_name = "E1,E2,E3", allow_hyphen_values = true)]
    curve: String,
    /// Inclusive-exclusive range LO..HI of twist parameters.
    #[arg(long, value_name = "LO..HI")]
    range: String,
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    /// Output file (default stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Checkpoint file: one completed n per line; enables resuming.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Also compute the pairing verdict where the dimension is positive.
    #[arg(long)]
    pairing: bool,
    /// Worker threads (default: rayon's choice).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "0")]
    seed: u64,
    /// Extra digits on every solvability-oracle depth default.
    #[arg(long, default_value = "0")]
    oracle_depth_boost: u32,
}

fn parse_triple(s: &str) -> Result<[BigInt; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated integers, got '{}'", s));
    }
    let mut out = Vec::new();
    for p in parts {
        out.push(
            p.trim()
                .parse::<BigInt>()
                .map_err(|e| format!("bad integer '{}': {}", p, e))?,
        );
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

fn parse_curve(s: &str) -> Result<CurveTriple, String> {
    let [e1, e2, e3] = parse_triple(s)?;
    CurveTriple::normalize(&e1, &e2, &e3).map_err(|e| e.to_string())
}

fn parse_twist(s: &str) -> Result<TwistParam, String> {
    let n: BigInt = s.trim().parse().map_err(|e| format!("bad n '{}': {}", s, e))?;
    TwistParam::new(n).map_err(|e| e.to_string())
}

fn exit_code_for(err: &CoreError) -> i32 {
    match err {
        CoreError::Hypothesis(_) => EXIT_HYPOTHESIS,
        CoreError::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        _ => 1,
    }
}

fn fail(err: &CoreError) -> ! {
    eprintln!("error: {}", err);
    std::process::exit(exit_code_for(err));
}

fn fail_str(msg: &str) -> ! {
    eprintln!("error: {}", msg);
    std::process::exit(1);
}

#[derive(Serialize)]
struct ConfigEcho {
    version: &'static str,
    command: String,
    curve: Option<String>,
    n: Option<String>,
    method: Option<String>,
    seed: Option<u64>,
    companion: Option<String>,
    variant: Option<String>,
}

impl ConfigEcho {
    fn new(command: &str) -> ConfigEcho {
        ConfigEcho {
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            curve: None,
            n: None,
            method: None,
            seed: None,
            companion: None,
            variant: None,
        }
    }
}

#[derive(Serialize)]
struct SelmerOut {
    config: ConfigEcho,
    case: String,
    hypotheses: Vec<(String, bool)>,
    dimension: usize,
    basis: Vec<[String; 3]>,
    matrix: Option<Vec<String>>,
    methods_agree: Option<bool>,
}

fn lambda_strings(l: &twodescent::descent::Lambda) -> [String; 3] {
    [l.d1().to_string(), l.d2().to_string(), l.d3().to_string()]
}

fn matrix_rows(m: &twodescent::f2linalg::F2Matrix) -> Vec<String> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| if m.get(r, c) { '1' } else { '0' })
                .collect()
        })
        .collect()
}

fn cmd_selmer(args: &SelmerArgs) {
    let curve = parse_curve(&args.curve).unwrap_or_else(|e| fail_str(&e));
    let n = parse_twist(&args.n).unwrap_or_else(|e| fail_str(&e));
    let opts = SelmerOptions {
        skip_hypothesis_checks: args.unchecked,
        oracle_depth_boost: args.oracle_depth_boost,
    };
    let hyp = selmer::check_hypotheses(&curve, &n).unwrap_or_else(|e| fail(&e));
    let mut config = ConfigEcho::new("selmer");
    config.curve = Some(format!("{}", curve));
    config.n = Some(n.value().to_string());
    config.method = Some(
        match args.method {
            MethodArg::Matrix => "matrix",
            MethodArg::Direct => "direct",
            MethodArg::Both => "both",
        }
        .to_string(),
    );

    let run = |m: Method| selmer::pure_selmer(&curve, &n, m, &opts);
    let (basis, matrix, agree) = match args.method {
        MethodArg::Matrix => {
            let b = run(Method::Matrix).unwrap_or_else(|e| fail(&e));
            let sm = selmer::selmer_matrix(&curve, &n, &opts).unwrap_or_else(|e| fail(&e));
            (b, Some(matrix_rows(&sm.matrix)), None)
        }
        MethodArg::Direct => (run(Method::Direct).unwrap_or_else(|e| fail(&e)), None, None),
        MethodArg::Both => {
            let bm = run(Method::Matrix).unwrap_or_else(|e| fail(&e));
            let bd = run(Method::Direct).unwrap_or_else(|e| fail(&e));
            let sm = selmer::selmer_matrix(&curve, &n, &opts).unwrap_or_else(|e| fail(&e));
            let agree = bm.dimension() == bd.dimension()
                && bm.span_normal_forms() == bd.span_normal_forms();
            if !agree {
                let out = format!(
                    "selmer method mismatch for curve {} n {}: matrix dim {}, direct dim {}",
                    curve,
                    n,
                    bm.dimension(),
                    bd.dimension()
                );
                eprintln!("error: {}", out);
                std::process::exit(EXIT_VIOLATION);
            }
            (bm, Some(matrix_rows(&sm.matrix)), Some(agree))
        }
    };
    let out = SelmerOut {
        config,
        case: format!("{}", curve.parity_case()),
        hypotheses: hyp.items.clone(),
        dimension: basis.dimension(),
        basis: basis.basis.iter().map(lambda_strings).collect(),
        matrix,
        methods_agree: agree,
    };
    match args.format {
        FormatArg::Text => {
            println!("curve {}  n {}  case {}", curve, n, curve.parity_case());
            for (name, ok) in &out.hypotheses {
                println!("  [{}] {}", if *ok { "ok" } else { "FAIL" }, name);
            }
            println!("pure 2-Selmer dimension: {}", out.dimension);
            for b in &out.basis {
                println!("  basis ({},{},{})", b[0], b[1], b[2]);
            }
            if let Some(m) = &out.matrix {
                println!("matrix:");
                for row in m {
                    println!("  {}", row);
                }
            }
        }
        _ => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
    }
}

#[derive(Serialize)]
struct PairingOut {
    config: ConfigEcho,
    dimension: usize,
    basis: Vec<[String; 3]>,
    gram: Vec<String>,
    ledger: Vec<LedgerOut>,
    verdict: String,
}

#[derive(Serialize)]
struct LedgerOut {
    row: usize,
    col: usize,
    place: String,
    bit: u8,
}

fn verdict_string(v: &Verdict) -> String {
    match v {
        Verdict::RankZero { sha_dimension } => format!(
            "rank 0, Sha[2^oo] = (Z/2Z)^{}",
            sha_dimension
        ),
        Verdict::Inconclusive { reason } => format!("inconclusive: {}", reason),
    }
}

fn compute_pairing_report(
    curve: &CurveTriple,
    n: &TwistParam,
    method: Method,
    opts: &SelmerOptions,
    seed: u64,
) -> Result<cassels::PairingReport, CoreError> {
    let basis = selmer::pure_selmer(curve, n, method, opts)?;
    cassels::pairing_matrix_with_depth(curve, n, &basis, seed, opts.oracle_depth_boost)
}

fn cmd_pairing(args: &PairingArgs) {
    let curve = parse_curve(&args.curve).unwrap_or_else(|e| fail_str(&e));
    let n = parse_twist(&args.n).unwrap_or_else(|e| fail_str(&e));
    let opts = SelmerOptions {
        skip_hypothesis_checks: args.unchecked,
        oracle_depth_boost: args.oracle_depth_boost,
    };
    let method = match args.method {
        MethodArg::Direct => Method::Direct,
        _ => Method::Matrix,
    };
    let report =
        compute_pairing_report(&curve, &n, method, &opts, args.seed).unwrap_or_else(|e| fail(&e));
    let mut config = ConfigEcho::new("pairing");
    config.curve = Some(format!("{}", curve));
    config.n = Some(n.value().to_string());
    config.seed = Some(args.seed);
    let out = PairingOut {
        config,
        dimension: report.basis.dimension(),
        basis: report.basis.basis.iter().map(lambda_strings).collect(),
        gram: matrix_rows(&report.gram),
        ledger: report
            .ledger
            .iter()
            .map(|e| LedgerOut {
                row: e.row,
                col: e.col,
                place: e.place.to_string(),
                bit: e.bit as u8,
            })
            .collect(),
        verdict: verdict_string(&report.verdict),
    };
    match args.format {
        FormatArg::Text => {
            println!("curve {}  n {}", curve, n);
            println!("dimension {}", out.dimension);
            for row in &out.gram {
                println!("  {}", row);
            }
            println!("verdict: {}", out.verdict);
        }
        _ => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
    }
}

#[derive(Serialize)]
struct CompareOut {
    config: ConfigEcho,
    dimension: usize,
    basis: Vec<[String; 3]>,
    gram_curve: Vec<String>,
    gram_companion: Vec<String>,
    equal: bool,
}

fn cmd_compare(args: &CompareArgs) {
    let curve = parse_curve(&args.curve).unwrap_or_else(|e| fail_str(&e));
    let [a, b, c] = parse_triple(&args.companion).unwrap_or_else(|e| fail_str(&e));
    let companion =
        CompanionTriple::new(&curve, &a, &b, &c).unwrap_or_else(|e| fail(&e));
    let n = parse_twist(&args.n).unwrap_or_else(|e| fail_str(&e));
    let companion_curve = curve.companion_curve(&companion);
    if !n
        .value()
        .gcd(&(curve.product() * companion.product()))
        .is_one()
    {
        fail(&CoreError::Hypothesis(
            "n must be coprime with e1·e2·e3·a·b·c".into(),
        ));
    }
    let opts = SelmerOptions::default();
    let report_e = compute_pairing_report(&curve, &n, Method::Matrix, &opts, args.seed)
        .unwrap_or_else(|e| fail(&e));
    let report_c = compute_pairing_report(&companion_curve, &n, Method::Matrix, &opts, args.seed)
        .unwrap_or_else(|e| fail(&e));
    let same_basis = report_e
        .basis
        .basis
        .iter()
        .zip(report_c.basis.basis.iter())
        .all(|(x, y)| x == y)
        && report_e.basis.dimension() == report_c.basis.dimension();
    let equal = same_basis && matrix_rows(&report_e.gram) == matrix_rows(&report_c.gram);
    let mut config = ConfigEcho::new("compare");
    config.curve = Some(format!("{}", curve));
    config.companion = Some(format!("{}", companion));
    config.n = Some(n.value().to_string());
    config.seed = Some(args.seed);
    let out = CompareOut {
        config,
        dimension: report_e.basis.dimension(),
        basis: report_e.basis.basis.iter().map(lambda_strings).collect(),
        gram_curve: matrix_rows(&report_e.gram),
        gram_companion: matrix_rows(&report_c.gram),
        equal,
    };
    match args.format {
        FormatArg::Text => {
            println!(
                "curve {}  companion {}  twist {}",
                curve, companion, n
            );
            println!("dimension {}", out.dimension);
            println!("gram(curve)     {:?}", out.gram_curve);
            println!("gram(companion) {:?}", out.gram_companion);
            println!("equal: {}", out.equal);
        }
        _ => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
    }
    if !equal {
        eprintln!(
            "error: pairing data of the companion curve differs; this would \
             contradict the equivalence the construction asserts (likely an \
             implementation bug)"
        );
        std::process::exit(EXIT_VIOLATION);
    }
}

#[derive(Serialize)]
struct CongruentOut {
    config: ConfigEcho,
    hypotheses: Vec<(String, bool)>,
    h2: usize,
    h4: usize,
    h8: usize,
    d_candidates: Vec<String>,
    d: Option<String>,
    d_mod_16: Option<u32>,
    criterion: Option<bool>,
    statement: String,
    ambiguity: Option<String>,
}

fn cmd_congruent(args: &CongruentArgs) {
    let n = parse_twist(&args.n).unwrap_or_else(|e| fail_str(&e));
    let base = CurveTriple::normalize(&BigInt::from(1), &BigInt::from(1), &BigInt::from(-2))
        .unwrap();
    let [a, b, c] = parse_triple(&args.companion).unwrap_or_else(|e| fail_str(&e));
    let companion = CompanionTriple::new(&base, &a, &b, &c).unwrap_or_else(|e| fail(&e));
    let mut cache = args.class_cache.as_ref().map(|p| {
        genus::ClassGroupCache::open(p).unwrap_or_else(|e| fail(&e))
    });
    let report = match args.variant {
        VariantArg::OddThm => {
            genus::congruent_criterion_odd_cached(&n, &companion, cache.as_mut())
        }
        VariantArg::EvenThm => {
            genus::congruent_criterion_even_cached(&n, &companion, cache.as_mut())
        }
    }
    .unwrap_or_else(|e| fail(&e));
    let mut config = ConfigEcho::new("congruent");
    config.n = Some(n.value().to_string());
    config.companion = Some(format!("{}", companion));
    config.variant = Some(
        match args.variant {
            VariantArg::OddThm => "odd-thm",
            VariantArg::EvenThm => "even-thm",
        }
        .to_string(),
    );
    let out = CongruentOut {
        config,
        hypotheses: report.hypotheses.items.clone(),
        h2: report.h2,
        h4: report.h4,
        h8: report.h8,
        d_candidates: report
            .d_candidates
            .iter()
            .map(|x| {
                if x.via_2d {
                    format!("{} (via 2d)", x.d)
                } else {
                    x.d.to_string()
                }
            })
            .collect(),
        d: report.d.as_ref().map(|d| d.to_string()),
        d_mod_16: report.d_mod_16,
        criterion: report.criterion,
        statement: report.statement.clone(),
        ambiguity: report.ambiguity.clone(),
    };
    match args.format {
        FormatArg::Text => {
            println!("n {}  h2 {}  h4 {}  h8 {}", out.config.n.as_ref().unwrap(), out.h2, out.h4, out.h8);
            println!("d candidates: {:?}", out.d_candidates);
            match (&out.criterion, &out.ambiguity) {
                (Some(v), _) => println!(
                    "criterion: {}  ({} {})",
                    v,
                    if *v { "certifies:" } else { "does not certify:" },
                    out.statement
                ),
                (None, Some(a)) => println!("criterion: ambiguous — {}", a),
                _ => {}
            }
        }
        _ => println!("{}", serde_json::to_string_pretty(&out).unwrap()),
    }
    if out.criterion.is_none() {
        std::process::exit(EXIT_INCONCLUSIVE);
    }
}

#[derive(Serialize, Clone)]
struct ScanRecord {
    schema: u32,
    n: String,
    case: String,
    hypotheses_ok: bool,
    hypothesis_failure: Option<String>,
    matrix_dim: Option<usize>,
    direct_dim: Option<usize>,
    dimension: Option<usize>,
    mismatch: bool,
    gram: Option<Vec<String>>,
    verdict: Option<String>,
    ms: u128,
}

fn scan_one(
    curve: &CurveTriple,
    nv: i64,
    method: MethodArg,
    with_pairing: bool,
    seed: u64,
    depth_boost: u32,
) -> Result<ScanRecord, CoreError> {
    let start = std::time::Instant::now();
    let n = match TwistParam::new(BigInt::from(nv)) {
        Ok(n) => n,
        Err(_) => unreachable!("scan pre-filters to odd square-free n"),
    };
    let hyp = selmer::check_hypotheses(curve, &n)?;
    let mut rec = ScanRecord {
        schema: 1,
        n: nv.to_string(),
        case: format!("{}", curve.parity_case()),
        hypotheses_ok: hyp.all_ok(),
        hypothesis_failure: hyp.first_failure().map(|s| s.to_string()),
        matrix_dim: None,
        direct_dim: None,
        dimension: None,
        mismatch: false,
        gram: None,
        verdict: None,
        ms: 0,
    };
    let opts = SelmerOptions {
        skip_hypothesis_checks: false,
        oracle_depth_boost: depth_boost,
    };
    if hyp.all_ok() {
        let (mdim, ddim, dim, mismatch, basis) = match method {
            MethodArg::Matrix => {
                let b = selmer::pure_selmer(curve, &n, Method::Matrix, &opts)?;
                (Some(b.dimension()), None, b.dimension(), false, Some(b))
            }
            MethodArg::Direct => {
                let b = selmer::pure_selmer(curve, &n, Method::Direct, &opts)?;
                (None, Some(b.dimension()), b.dimension(), false, Some(b))
            }
            MethodArg::Both => {
                let bm = selmer::pure_selmer(curve, &n, Method::Matrix, &opts)?;
                let bd = selmer::pure_selmer(curve, &n, Method::Direct, &opts)?;
                let mismatch = bm.dimension() != bd.dimension()
                    || bm.span_normal_forms() != bd.span_normal_forms();
                (
                    Some(bm.dimension()),
                    Some(bd.dimension()),
                    bm.dimension(),
                    mismatch,
                    Some(bm),
                )
            }
        };
        rec.matrix_dim = mdim;
        rec.direct_dim = ddim;
        rec.dimension = Some(dim);
        rec.mismatch = mismatch;
        if with_pairing && !mismatch {
            let basis = basis.unwrap();
            let report = cassels::pairing_matrix_with_depth(curve, &n, &basis, seed, depth_boost)?;
            rec.gram = Some(matrix_rows(&report.gram));
            rec.verdict = Some(verdict_string(&report.verdict));
        }
    }
    rec.ms = start.elapsed().as_millis();
    Ok(rec)
}

fn is_squarefree_odd(n: i64) -> bool {
    if n <= 0 || n % 2 == 0 {
        return false;
    }
    arith::factorize(&BigInt::from(n))
        .map(|f| f.is_squarefree())
        .unwrap_or(false)
}

fn cmd_scan(args: &ScanArgs) {
    let curve = parse_curve(&args.curve).unwrap_or_else(|e| fail_str(&e));
    let (lo, hi) = {
        let parts: Vec<&str> = args.range.split("..").collect();
        if parts.len() != 2 {
            fail_str("range must look like LO..HI");
        }
        let lo: i64 = parts[0].parse().unwrap_or_else(|_| fail_str("bad range lower bound"));
        let hi: i64 = parts[1].parse().unwrap_or_else(|_| fail_str("bad range upper bound"));
        (lo.max(1), hi)
    };
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let done: BTreeSet<i64> = args
        .checkpoint
        .as_ref()
        .filter(|p| p.exists())
        .map(|p| {
            std::fs::read_to_string(p)
                .unwrap_or_default()
                .lines()
                .filter_map(|l| l.trim().parse().ok())
                .collect()
        })
        .unwrap_or_default();
    let targets: Vec<i64> = (lo..hi)
        .filter(|&n| is_squarefree_odd(n) && !done.contains(&n))
        .collect();

    use rayon::prelude::*;
    let mut results: Vec<(i64, Result<ScanRecord, CoreError>)> = targets
        .par_iter()
        .map(|&nv| (nv, scan_one(&curve, nv, args.method, args.pairing, args.seed, args.oracle_depth_boost)))
        .collect();
    results.sort_by_key(|(n, _)| *n);

    let mut out: Box<dyn std::io::Write> = match &args.output {
        Some(p) => Box::new(
            std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .unwrap_or_else(|e| fail_str(&format!("cannot open output: {}", e))),
        ),
        None => Box::new(std::io::stdout()),
    };
    let fresh_output = args
        .output
        .as_ref()
        .map(|p| std::fs::metadata(p).map(|m| m.len() == 0).unwrap_or(true))
        .unwrap_or(true);
    if args.format == FormatArg::Csv && fresh_output && done.is_empty() {
        writeln!(
            out,
            "n,case,hypotheses_ok,matrix_dim,direct_dim,dimension,mismatch,verdict,ms"
        )
        .unwrap();
    }
    let mut checkpoint = args.checkpoint.as_ref().map(|p| {
        std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(p)
            .unwrap_or_else(|e| fail_str(&format!("cannot open checkpoint: {}", e)))
    });
    let mut any_mismatch = false;
    for (nv, rec) in results.drain(..) {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => fail(&e),
        };
        any_mismatch |= rec.mismatch;
        match args.format {
            FormatArg::Csv => {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    rec.n,
                    rec.case,
                    rec.hypotheses_ok,
                    rec.matrix_dim.map(|d| d.to_string()).unwrap_or_default(),
                    rec.direct_dim.map(|d| d.to_string()).unwrap_or_default(),
                    rec.dimension.map(|d| d.to_string()).unwrap_or_default(),
                    rec.mismatch,
                    rec.verdict.clone().unwrap_or_default().replace(',', ";"),
                    rec.ms
                )
                .unwrap();
            }
            _ => {
                writeln!(out, "{}", serde_json::to_string(&rec).unwrap()).unwrap();
            }
        }
        if let Some(cp) = checkpoint.as_mut() {
            writeln!(cp, "{}", nv).unwrap();
        }
    }
    out.flush().unwrap();
    if any_mismatch {
        eprintln!("error: matrix/direct mismatch found during scan");
        std::process::exit(EXIT_VIOLATION);
    }
}

fn main() {
    let cli = Cli::parse();
    match &cli.command {
        Command::Selmer(args) => cmd_selmer(args),
        Command::Pairing(args) => cmd_pairing(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Congruent(args) => cmd_congruent(args),
        Command::Scan(args) => cmd_scan(args),
    }
}
