//! Command-line surface for the pipeline.
//!
//! Subcommands: `compute` (run the engine and write a results file),
//! `oracle` (brute-force counts against the formula path), `table` (the
//! small-values q table), `ratio` (asymptotic analysis over a results
//! file), and `congruence` (periodicity scan over stored q values).
//!
//! Exit codes: 0 on success, 1 on a verification mismatch or violation,
//! 2 on usage errors (including feasibility-cap refusals).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{One, Signed};

use pdcoset::analysis::{
    check_congruence, constant_k, figure4_csv, figure4_data, fit_tail_intercept, is_prime,
    AnalysisError, FitPoint, RatioComputer, MIN_RATIO_PRECISION,
};
use pdcoset::arith::exact_div;
use pdcoset::engine::{run, DenseTables, EngineConfig, Mode, SequenceRecord};
use pdcoset::oracle::{
    count_even_partitions_oracle, count_maximal, count_patterns, count_q_oracle, count_tables,
    OracleError,
};
use pdcoset::results::{read_records, write_records, FileFormat, StoredRecord};
use pdcoset::triangles::binomial;
use pdcoset::{chains, triangles};

const EXIT_OK: u8 = 0;
const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "pdcoset",
    version,
    about = "Exact counts of parabolic double cosets of the symmetric group"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute p_n (and optionally q_n) up to a bound and write a results file
    Compute(ComputeArgs),
    /// Compare brute-force oracle counts against the formula path
    Oracle(OracleArgs),
    /// Print small-values tables
    Table(TableArgs),
    /// Ratio and tail-fit analysis over a results file
    Ratio(RatioArgs),
    /// Scan stored q values for prime-power periodicity violations
    Congruence(CongruenceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Dense,
    Streaming,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Json,
}

#[derive(Args)]
struct ComputeArgs {
    /// Largest index to compute
    #[arg(long)]
    max_n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Dense)]
    mode: ModeArg,
    /// Worker threads (streaming mode)
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Checkpoint file; resumes from it when present (streaming mode)
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Rows between checkpoint writes
    #[arg(long, default_value_t = 32)]
    checkpoint_interval: usize,
    /// Output path (defaults to results.tsv / results.json)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
    format: FormatArg,
    /// Store q_n alongside p_n (needed by the congruence command)
    #[arg(long)]
    emit_q: bool,
    /// Suppress the completion timestamp line
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    check: OracleCheck,
}

#[derive(Subcommand)]
enum OracleCheck {
    /// Maximal-table count vs formula p_n
    Pn(OracleOpts),
    /// All-table count vs formula p_{n,0}
    P0(OracleOpts),
    /// Embedding-free pair count vs formula q_n
    Qn(OracleOpts),
    /// Whole distinguished-embedding row vs formula q_{n,k}
    Qnk(OracleOpts),
    /// Pattern counts and the two identities built from them
    Patterns(OracleOpts),
    /// Ordered even-block partition counts vs |h_{t,c}| / 2^c
    Evenparts(OracleOpts),
}

#[derive(Args)]
struct OracleOpts {
    #[arg(long)]
    n: usize,
    /// Raise the hard-coded feasibility caps one notch
    #[arg(long)]
    unsafe_cap: bool,
}

#[derive(Args)]
struct TableArgs {
    #[command(subcommand)]
    which: TableKind,
}

#[derive(Subcommand)]
enum TableKind {
    /// q_n together with the q_{n,k} row
    Q {
        #[arg(long)]
        max_n: usize,
    },
}

#[derive(Args)]
struct RatioArgs {
    /// Results file produced by compute
    #[arg(long = "in")]
    input: PathBuf,
    /// Working precision in significant digits
    #[arg(long, default_value_t = 80)]
    precision: usize,
    /// Fit the tail over points with n >= this bound
    #[arg(long, default_value_t = 1)]
    fit_from: usize,
}

#[derive(Args)]
struct CongruenceArgs {
    /// Results file produced by compute --emit-q
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    prime: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    power: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Table(args) => cmd_table(args),
        Command::Ratio(args) => cmd_ratio(args),
        Command::Congruence(args) => cmd_congruence(args),
    };
    ExitCode::from(code)
}

fn cmd_compute(args: ComputeArgs) -> u8 {
    if args.max_n < 1 {
        eprintln!("error: --max-n must be at least 1");
        return EXIT_USAGE;
    }
    let mut config = EngineConfig::new(args.max_n);
    config.mode = match args.mode {
        ModeArg::Dense => Mode::Dense,
        ModeArg::Streaming => Mode::Streaming,
    };
    config.workers = args.workers.max(1);
    config.checkpoint_path = args.checkpoint.clone();
    config.checkpoint_interval = args.checkpoint_interval.max(1);
    if config.mode == Mode::Dense && args.checkpoint.is_some() {
        eprintln!("note: checkpoints apply to streaming mode only; ignoring --checkpoint");
    }

    let records = match run(&config) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_VERIFY;
        }
    };

    let format = match args.format {
        FormatArg::Tsv => FileFormat::Tsv,
        FormatArg::Json => FileFormat::Json,
    };
    let out_path = args.out.unwrap_or_else(|| {
        PathBuf::from(match format {
            FileFormat::Tsv => "results.tsv",
            FileFormat::Json => "results.json",
        })
    });
    let file = match File::create(&out_path) {
        Ok(f) => f,
        Err(err) => {
            eprintln!("error: cannot create {}: {err}", out_path.display());
            return EXIT_USAGE;
        }
    };
    let mut writer = BufWriter::new(file);
    if let Err(err) = write_records(&mut writer, &records, format, args.emit_q) {
        eprintln!("error: {err}");
        return EXIT_VERIFY;
    }
    if let Err(err) = writer.flush() {
        eprintln!("error: {err}");
        return EXIT_VERIFY;
    }

    for record in &records {
        if record.n > 0 && record.n % 100 == 0 {
            println!("n={} digits={}", record.n, record.digit_count);
        }
    }
    println!(
        "wrote {} records (n = 0..={}) to {}",
        records.len(),
        args.max_n,
        out_path.display()
    );
    if !args.no_timestamp {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        println!("# completed at unix:{stamp}");
    }
    EXIT_OK
}

struct Comparison {
    label: String,
    oracle: BigInt,
    formula: BigInt,
}

fn report_comparisons(rows: &[Comparison]) -> u8 {
    let mut ok = true;
    for row in rows {
        let verdict = if row.oracle == row.formula {
            "OK"
        } else {
            ok = false;
            "MISMATCH"
        };
        println!(
            "{}: oracle={} formula={} {}",
            row.label, row.oracle, row.formula, verdict
        );
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

fn oracle_usage_error(err: &OracleError) -> u8 {
    eprintln!("error: {err}");
    if matches!(err, OracleError::CapExceeded { .. }) {
        eprintln!("hint: --unsafe-cap raises the table-family caps one notch");
    }
    EXIT_USAGE
}

fn cmd_oracle(args: OracleArgs) -> u8 {
    match args.check {
        OracleCheck::Pn(opts) => {
            let oracle = match count_maximal(opts.n, opts.unsafe_cap) {
                Ok(v) => v,
                Err(err) => return oracle_usage_error(&err),
            };
            let formula = formula_records(opts.n)[opts.n].p.clone();
            report_comparisons(&[Comparison {
                label: format!("p_{}", opts.n),
                oracle,
                formula,
            }])
        }
        OracleCheck::P0(opts) => {
            let oracle = match count_tables(opts.n, opts.unsafe_cap) {
                Ok(v) => v,
                Err(err) => return oracle_usage_error(&err),
            };
            let tables = DenseTables::new(opts.n).expect("small build");
            let p0 = pdcoset::engine::p_seq(&tables.stirling1, &tables.facts, &tables.q0_seq())
                .expect("divisibility");
            report_comparisons(&[Comparison {
                label: format!("p_({},0)", opts.n),
                oracle,
                formula: p0[opts.n].clone(),
            }])
        }
        OracleCheck::Qn(opts) => {
            let counts = match count_q_oracle(opts.n, opts.unsafe_cap) {
                Ok(v) => v,
                Err(err) => return oracle_usage_error(&err),
            };
            let tables = DenseTables::new(opts.n).expect("small build");
            report_comparisons(&[Comparison {
                label: format!("q_{}", opts.n),
                oracle: counts.q,
                formula: tables.q_value(opts.n),
            }])
        }
        OracleCheck::Qnk(opts) => {
            let counts = match count_q_oracle(opts.n, opts.unsafe_cap) {
                Ok(v) => v,
                Err(err) => return oracle_usage_error(&err),
            };
            let tables = DenseTables::new(opts.n).expect("small build");
            let mut rows = vec![Comparison {
                label: format!("q_{}", opts.n),
                oracle: counts.q.clone(),
                formula: tables.q_value(opts.n),
            }];
            for (k, oracle_k) in counts.q_k.iter().enumerate() {
                rows.push(Comparison {
                    label: format!("q_({},{})", opts.n, k),
                    oracle: oracle_k.clone(),
                    formula: tables.q_nk(opts.n, k),
                });
            }
            report_comparisons(&rows)
        }
        OracleCheck::Patterns(opts) => cmd_oracle_patterns(&opts),
        OracleCheck::Evenparts(opts) => cmd_oracle_evenparts(&opts),
    }
}

fn cmd_oracle_patterns(opts: &OracleOpts) -> u8 {
    let n = opts.n;
    let mut totals = Vec::with_capacity(n + 1);
    let mut maximals = Vec::with_capacity(n + 1);
    for m in 1..=n {
        match count_patterns(m, opts.unsafe_cap) {
            Ok((total, maximal)) => {
                totals.push(total);
                maximals.push(maximal);
            }
            Err(err) => return oracle_usage_error(&err),
        }
    }
    println!(
        "patterns(n={n}): total={} maximal={}",
        totals[n - 1], maximals[n - 1]
    );

    // p_{n,0} = sum_m binomial(n-1, n-m) |P_{m,0}|
    let mut p0_from_patterns = BigInt::from(0u32);
    for (idx, total) in totals.iter().enumerate() {
        let m = idx + 1;
        p0_from_patterns += binomial(n as i64 - 1, (n - m) as i64).expect("domain") * total;
    }
    let tables = DenseTables::new(n).expect("small build");
    let p0 = pdcoset::engine::p_seq(&tables.stirling1, &tables.facts, &tables.q0_seq())
        .expect("divisibility");

    // q_n = sum_k k! S2(n,k) |P_k|
    let mut q_from_patterns = BigInt::from(0u32);
    for (idx, maximal) in maximals.iter().enumerate() {
        let k = idx + 1;
        q_from_patterns += &tables.facts[k] * tables.stirling2.get(n, k) * maximal;
    }

    report_comparisons(&[
        Comparison {
            label: format!("p_({n},0) via patterns"),
            oracle: p0_from_patterns,
            formula: p0[n].clone(),
        },
        Comparison {
            label: format!("q_{n} via patterns"),
            oracle: q_from_patterns,
            formula: tables.q_value(n),
        },
    ])
}

fn cmd_oracle_evenparts(opts: &OracleOpts) -> u8 {
    let t = opts.n;
    let central = triangles::TriangleTable::build(triangles::TriangleKind::CentralT, t / 2 + 1);
    let mut rows = Vec::new();
    for c in 0..=(t / 2) {
        let oracle = match count_even_partitions_oracle(t, c) {
            Ok(v) => v,
            Err(err) => return oracle_usage_error(&err),
        };
        let h = chains::h_fast(t, c, &central).expect("domain");
        let formula =
            exact_div(&h.abs(), &BigInt::from(2u32).pow(c as u32)).expect("2^c divides h");
        rows.push(Comparison {
            label: format!("S({t},{c})"),
            oracle,
            formula,
        });
    }
    report_comparisons(&rows)
}

fn formula_records(n: usize) -> Vec<SequenceRecord> {
    run(&EngineConfig::new(n)).expect("small dense run")
}

fn cmd_table(args: TableArgs) -> u8 {
    match args.which {
        TableKind::Q { max_n } => {
            let tables = DenseTables::new(max_n).expect("table build");
            let k_cols = max_n.saturating_sub(1).max(0);
            let mut header = String::from("n\tq_n");
            for k in 0..=k_cols {
                header.push_str(&format!("\tq_(n,{k})"));
            }
            println!("{header}");
            for n in 0..=max_n {
                let mut line = format!("{n}\t{}", tables.q_value(n));
                for k in 0..=k_cols {
                    line.push_str(&format!("\t{}", tables.q_nk(n, k)));
                }
                println!("{line}");
            }
            EXIT_OK
        }
    }
}

fn load_records(path: &PathBuf) -> Result<Vec<StoredRecord>, u8> {
    let file = File::open(path).map_err(|err| {
        eprintln!("error: cannot open {}: {err}", path.display());
        EXIT_USAGE
    })?;
    let mut records = read_records(BufReader::new(file)).map_err(|err| {
        eprintln!("error: {err}");
        EXIT_USAGE
    })?;
    records.sort_by_key(|r| r.n);
    Ok(records)
}

fn cmd_ratio(args: RatioArgs) -> u8 {
    let records = match load_records(&args.input) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let work_precision = args.precision.max(MIN_RATIO_PRECISION);
    let computer = match RatioComputer::new(work_precision) {
        Ok(c) => c,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };

    let mut factorial = BigInt::one();
    let mut last_n = 0usize;
    let mut ratio_rows = Vec::new();
    for record in records.iter().filter(|r| r.n >= 1) {
        for i in (last_n + 1)..=record.n {
            factorial *= BigInt::from(i);
        }
        last_n = record.n;
        let row = computer.ratio(record.n, &record.p, &factorial);
        println!("{}\t{}", row.n, row.r.to_fixed_trimmed(6));
        ratio_rows.push(row);
    }
    if ratio_rows.is_empty() {
        eprintln!("error: no records with n >= 1 in {}", args.input.display());
        return EXIT_USAGE;
    }

    println!("K = {}", constant_k(args.precision.max(1)).to_plain_string());

    let points = match figure4_data(&ratio_rows) {
        Ok(p) => p,
        Err(err @ AnalysisError::NonpositiveGap { .. }) => {
            eprintln!("error: {err}");
            return EXIT_VERIFY;
        }
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };

    let fit_points: Vec<FitPoint> = points.iter().map(FitPoint::from).collect();
    match fit_tail_intercept(&fit_points, args.fit_from) {
        Ok(fit) => {
            println!(
                "fit: n_min={} points={} slope={} intercept={} slope_fixed_intercept={}",
                args.fit_from,
                fit.points_used,
                fit.slope.to_fixed_trimmed(6),
                fit.intercept.to_fixed_trimmed(6),
                fit.slope_fixed_intercept.to_fixed_trimmed(6)
            );
        }
        Err(err) => {
            println!("fit: skipped ({err})");
        }
    }

    print!("{}", figure4_csv(&points));
    EXIT_OK
}

fn cmd_congruence(args: CongruenceArgs) -> u8 {
    if !is_prime(args.prime) {
        eprintln!("error: {} is not prime", args.prime);
        return EXIT_USAGE;
    }
    let records = match load_records(&args.input) {
        Ok(r) => r,
        Err(code) => return code,
    };
    let max_n = records.last().map(|r| r.n).unwrap_or(0);
    let mut qs: Vec<Option<BigInt>> = vec![None; max_n + 1];
    for record in &records {
        match &record.q {
            Some(q) => qs[record.n] = Some(q.clone()),
            None => {
                eprintln!(
                    "error: {} has no q column; recompute with --emit-q",
                    args.input.display()
                );
                return EXIT_USAGE;
            }
        }
    }
    let qs: Vec<BigInt> = match qs.into_iter().collect::<Option<Vec<_>>>() {
        Some(v) => v,
        None => {
            eprintln!("error: results file has gaps in n; congruence needs a contiguous range");
            return EXIT_USAGE;
        }
    };

    let report = match check_congruence(&qs, args.prime, args.power, args.power as usize) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    println!(
        "p={} m={} period={} range=[{},{}] checked={} violations={}",
        report.p,
        report.m,
        report.period,
        report.n_lo,
        report.n_hi,
        report.checked,
        report.violations.len()
    );
    for n in &report.violations {
        println!("violation at n={n}");
    }
    if report.holds() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}
