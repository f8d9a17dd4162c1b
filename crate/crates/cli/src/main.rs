//! `aon-teleport`: build channels, run protocol scenarios, print correction
//! tables and run the verification suites.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 protocol did not
//! complete (a sender withheld), 4 verification failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use aon_teleport::channel::{verify_channel_structure, MAX_SENDERS};
use aon_teleport::harness::{run_scenario, ScenarioConfig};
use aon_teleport::oracle::{
    average_receiver_state, enumerate_all_outcomes, generic_inputs, sample_outcomes, sender_outcome_marginals,
    withheld_participation_state, Enumeration, WithheldModel, MAX_AVERAGE_SENDERS, MAX_ENUMERATION_SENDERS,
};
use aon_teleport::protocol::{generate_correction_table, InputQubit, MAX_TABLE_SENDERS};
use aon_teleport::record::{RunRecord, Timing};
use aon_teleport::reference_tables::{compare_with_reference, TableComparison, REFERENCE_SIZES};
use aon_teleport::statevector::DensityMatrix;
use aon_teleport::{BellOutcome, ChannelKind, ChannelLayout, Error, OutcomePolicy, StateVectorF64};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

/// Exhaustive enumeration up to this N in `verify`; sampled above.
const EXHAUSTIVE_MAX: usize = 4;

#[derive(Parser)]
#[command(name = "aon-teleport", version, about = "All-or-nothing multiparty teleportation simulator")]
struct Cli {
    /// Include wall-clock timing in written records (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a 2N-qubit channel and list its nonzero amplitudes.
    Channel(ChannelArgs),
    /// Run the protocol, optionally in vote mode or with withheld senders.
    Run(RunArgs),
    /// Print the 4^N-row correction table, optionally diffed against the published one.
    Tables(TablesArgs),
    /// Run the oracle property suites over a range of N.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Product,
    Entangled,
}

impl From<KindArg> for ChannelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Product => ChannelKind::Product,
            KindArg::Entangled => ChannelKind::Entangled,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum ModelArg {
    TraceOut,
    MeasureNoBroadcast,
}

impl From<ModelArg> for WithheldModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::TraceOut => WithheldModel::TraceOut,
            ModelArg::MeasureNoBroadcast => WithheldModel::MeasureNoBroadcast,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum CompareArg {
    None,
    Paper,
}

#[derive(Args, Serialize)]
struct ChannelArgs {
    /// Number of senders.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "entangled")]
    kind: KindArg,
    /// Also write a JSON record here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct RunArgs {
    /// Number of senders.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "entangled")]
    kind: KindArg,
    /// One sender's qubit as `a,b` (complex literals such as `0.6`, `0.8i`,
    /// `0.3+0.4i`). Repeat once per sender; omitted means generic seeded inputs.
    #[arg(long = "input", value_name = "A,B", conflicts_with = "votes")]
    inputs: Vec<String>,
    /// Vote mode: one bit per sender, 1 = yes.
    #[arg(long)]
    votes: Option<String>,
    /// Force the outcome tuple, e.g. `phi+,psi-`.
    #[arg(long, conflicts_with = "seed")]
    forced: Option<String>,
    /// Seed for sampled outcomes.
    #[arg(long, env = "AON_SEED", default_value_t = 0)]
    seed: u64,
    /// Seed for generic inputs when no --input is given.
    #[arg(long, default_value_t = 1)]
    input_seed: u64,
    /// Comma-separated senders that never broadcast, e.g. `2` or `1,3`.
    #[arg(long)]
    withhold: Option<String>,
    #[arg(long, value_enum, default_value = "trace-out")]
    withheld_model: ModelArg,
    /// Leave the vote encoding basis out of the report.
    #[arg(long)]
    conceal_basis: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct TablesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "none")]
    compare: CompareArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// A single N or an inclusive range such as `1..3`.
    #[arg(long, default_value = "1..3")]
    n: String,
    /// Outcome tuples sampled per N above the exhaustive limit.
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[arg(long, env = "AON_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed command: exit code and message.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Argument(_) | Error::Resource(_) => EXIT_USAGE,
            Error::ProtocolIncomplete(_) => EXIT_INCOMPLETE,
            Error::State(_) | Error::Verification(_) => EXIT_VERIFY,
        };
        Failure(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

type CmdResult = Result<u8, Failure>;

struct Output {
    command: Vec<String>,
    timing: bool,
    start: Instant,
}

impl Output {
    /// Writes the JSON record to `path`; a no-op without one.
    fn emit<C: Serialize, P: Serialize>(&self, path: Option<&PathBuf>, config: C, payload: P) -> Result<(), Failure> {
        let Some(path) = path else { return Ok(()) };
        let mut rec = RunRecord { schema_version: aon_teleport::record::SCHEMA_VERSION, command: self.command.clone(), config, payload, timing: None };
        if self.timing {
            rec.timing = Some(Timing { elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3 });
        }
        let mut text = serde_json::to_string_pretty(&rec).map_err(|e| Failure(EXIT_IO, format!("serializing record: {e}")))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Failure(EXIT_IO, format!("writing {}: {e}", path.display())))
    }
}

#[derive(Serialize)]
struct ChannelPayload {
    senders: usize,
    kind: ChannelKind,
    num_qubits: usize,
    norm: f64,
    /// Basis bitstring (qubit 1 first) and amplitude as [re, im].
    terms: Vec<(String, Complex64)>,
}

fn cmd_channel(out: &Output, args: &ChannelArgs) -> CmdResult {
    if args.n == 0 || args.n > MAX_SENDERS {
        return Err(usage(format!("--n must be in 1..={MAX_SENDERS}")));
    }
    let layout = ChannelLayout::new(args.n, args.kind.into())?;
    let s: StateVectorF64 = layout.build()?;
    let terms = s.nonzero_terms(1e-15);
    let norm = s.norm_sqr().sqrt();
    for (bits, a) in &terms {
        println!("{bits} ({:?}, {:?})", a.re, a.im);
    }
    println!("{} channel, N = {}: {} terms, norm {norm}", layout.kind(), args.n, terms.len());
    let payload = ChannelPayload { senders: args.n, kind: layout.kind(), num_qubits: s.num_qubits(), norm, terms };
    out.emit(args.out.as_ref(), args, payload)?;
    Ok(0)
}

fn parse_input(s: &str) -> Result<InputQubit<f64>, Failure> {
    let (a, b) = s.split_once(',').ok_or_else(|| usage(format!("--input {s:?}: expected a,b")))?;
    let parse = |t: &str| {
        t.trim().parse::<Complex64>().map_err(|_| usage(format!("--input {s:?}: {t:?} is not a complex number")))
    };
    Ok(InputQubit::new(parse(a)?, parse(b)?)?)
}

fn parse_votes(s: &str) -> Result<Vec<bool>, Failure> {
    s.chars()
        .filter(|c| *c != ',')
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(usage(format!("--votes {s:?}: use 0 and 1"))),
        })
        .collect()
}

fn parse_senders(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("--withhold {s:?}: expected sender numbers"))))
        .collect()
}

fn cmd_run(out: &Output, args: &RunArgs) -> CmdResult {
    let n = args.n;
    if n == 0 || n > MAX_SENDERS {
        return Err(usage(format!("--n must be in 1..={MAX_SENDERS}")));
    }
    let policy = match &args.forced {
        Some(list) => OutcomePolicy::Forced(BellOutcome::parse_list(list)?),
        None => OutcomePolicy::Seeded(args.seed),
    };
    let mut cfg = ScenarioConfig::<f64>::new(n, args.kind.into(), policy)
        .with_input_seed(args.input_seed)
        .with_withheld_model(args.withheld_model.into())
        .concealing_basis(args.conceal_basis);
    if let Some(v) = &args.votes {
        cfg = cfg.with_votes(parse_votes(v)?);
    }
    if !args.inputs.is_empty() {
        cfg = cfg.with_inputs(args.inputs.iter().map(|s| parse_input(s)).collect::<Result<_, _>>()?);
    }
    if let Some(w) = &args.withhold {
        let senders = parse_senders(w)?;
        if let Some(bad) = senders.iter().find(|&&i| i == 0 || i > n) {
            return Err(usage(format!("--withhold: sender {bad} out of range 1..={n}")));
        }
        cfg = cfg.withholding(&senders);
    }
    cfg.validate()?;
    let report = run_scenario(&cfg)?;
    let t = &report.transcript;
    let outcomes: Vec<&str> = t.outcomes.iter().map(|o| o.map_or("-", |o| o.token())).collect();
    println!("outcomes: {}", outcomes.join(","));
    let code = if report.is_complete() {
        if let Some(c) = &t.correction {
            println!("correction: {c}");
        }
        println!("fidelity: {:?}", report.joint_fidelity.unwrap_or(f64::NAN));
        if let Some(tally) = report.tally {
            println!("tally: yes={} no={}", tally.yes, tally.no);
        }
        0
    } else {
        println!("protocol incomplete: {:?}", t.status);
        if let Some(a) = &report.withheld {
            println!(
                "receiver fidelity ({} model): {:.6} with participant corrections, {:.6} without",
                a.model, a.joint_fidelity_corrected, a.joint_fidelity_uncorrected
            );
        }
        EXIT_INCOMPLETE
    };
    for c in &report.rule_checks {
        println!("rule ({}) {}: {} [{:.3e}]", c.rule, c.name, if c.passed { "pass" } else { "FAIL" }, c.measured);
    }
    out.emit(args.out.as_ref(), args, &report)?;
    Ok(code)
}

#[derive(Serialize)]
struct TablesPayload {
    rows: Vec<aon_teleport::CorrectionRowF64>,
    comparison: Option<TableComparison>,
}

fn cmd_tables(out: &Output, args: &TablesArgs) -> CmdResult {
    if args.n == 0 || args.n > MAX_TABLE_SENDERS {
        return Err(usage(format!("--n must be in 1..={MAX_TABLE_SENDERS}")));
    }
    if args.compare == CompareArg::Paper && !REFERENCE_SIZES.contains(&args.n) {
        return Err(usage(format!("--compare paper needs --n in {REFERENCE_SIZES:?}")));
    }
    let rows = generate_correction_table::<f64>(args.n)?;
    let mut text = String::new();
    for r in &rows {
        let tuple: Vec<&str> = r.outcomes.iter().map(|o| o.symbol()).collect();
        let _ = writeln!(text, "{}  {:<16} {}", tuple.join(" "), r.correction.sigma_notation(), r.post_cascade_state);
    }
    let comparison = match args.compare {
        CompareArg::Paper => Some(compare_with_reference(&rows)?),
        CompareArg::None => None,
    };
    if let Some(c) = &comparison {
        let _ = writeln!(text, "published table: {}/{} rows match by position, {}/{} by cell", c.positional_matches, c.rows, c.cell_matches, c.rows);
        for m in &c.mismatches {
            let tuple: Vec<&str> = m.outcomes.iter().map(|o| o.symbol()).collect();
            let why = match m.kind {
                aon_teleport::reference_tables::MismatchKind::Absent => "generated operator missing from the printed cell",
                aon_teleport::reference_tables::MismatchKind::OutOfPlace => "printed elsewhere in the same cell",
            };
            let _ = writeln!(
                text,
                "mismatch {}: generated {}, printed {} ({why})",
                tuple.join(""),
                m.generated.sigma_notation(),
                m.published.sigma_notation()
            );
        }
    }
    print!("{text}");
    out.emit(args.out.as_ref(), args, TablesPayload { rows, comparison })?;
    Ok(0)
}

fn parse_range(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || usage(format!("--n {s:?}: expected N or A..B"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().trim_start_matches('=').parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a == 0 || a > b || b > MAX_ENUMERATION_SENDERS {
        return Err(usage(format!("--n {s:?}: range must lie within 1..{MAX_ENUMERATION_SENDERS}")));
    }
    Ok((a, b))
}

#[derive(Serialize)]
struct PropertyResult {
    property: &'static str,
    senders: usize,
    /// `None` when the property does not apply at this N.
    passed: Option<bool>,
    detail: String,
}

fn branch_check(e: &Enumeration<f64>, n: usize, exhaustive: bool) -> (bool, String) {
    let pk = 0.25f64.powi(n as i32);
    let all_fid = e.reports.iter().all(|r| r.fidelity.is_some_and(|f| (f - 1.0).abs() <= 1e-10));
    let all_p = e.reports.iter().all(|r| (r.probability - pk).abs() <= 1e-10);
    let closure = !exhaustive || (e.probability_sum - 1.0).abs() <= 1e-9;
    (
        all_fid && all_p && closure,
        format!(
            "{} tuples, min F {:.12}, sum p {:.12}",
            e.reports.len(),
            e.min_fidelity.unwrap_or(f64::NAN),
            e.probability_sum
        ),
    )
}

fn verify_one(n: usize, samples: usize, seed: u64) -> Result<Vec<PropertyResult>, Failure> {
    let mut res = vec![];
    let mut push = |property, passed: Option<bool>, detail: String| {
        res.push(PropertyResult { property, senders: n, passed, detail });
    };
    let inputs = generic_inputs::<f64>(n, seed);
    let exhaustive = n <= EXHAUSTIVE_MAX;

    let mut structure = true;
    for kind in [ChannelKind::Product, ChannelKind::Entangled] {
        let layout = ChannelLayout::new(n, kind)?;
        structure &= verify_channel_structure(&layout.build::<f64>()?, n, layout.kind())?;
    }
    push("channel structure", Some(structure), "parity rule and uniform amplitudes".into());

    for kind in [ChannelKind::Product, ChannelKind::Entangled] {
        let e = if exhaustive {
            enumerate_all_outcomes(&inputs, kind)?
        } else {
            sample_outcomes(&inputs, kind, samples, seed)?
        };
        let (ok, detail) = branch_check(&e, n, exhaustive);
        let name = if kind == ChannelKind::Product { "perfect teleportation (product)" } else { "perfect teleportation (entangled)" };
        push(name, Some(ok), format!("{}{detail}", if exhaustive { "exhaustive: " } else { "sampled: " }));
    }

    let dev = sender_outcome_marginals(&inputs, ChannelKind::Entangled)?
        .iter()
        .flatten()
        .map(|p| (p - 0.25).abs())
        .fold(0.0, f64::max);
    push("uniform outcome marginals", Some(dev <= 1e-10), format!("max |P - 1/4| {dev:.1e}"));

    if n <= MAX_AVERAGE_SENDERS {
        let other = generic_inputs::<f64>(n, seed.wrapping_add(1));
        let mixed = DensityMatrix::maximally_mixed(n);
        let d = average_receiver_state(&inputs, ChannelKind::Entangled)?
            .max_abs_diff(&mixed)?
            .max(average_receiver_state(&other, ChannelKind::Entangled)?.max_abs_diff(&mixed)?);
        push("input-independent averaged state", Some(d <= 1e-10), format!("max |rho - I/2^N| {d:.1e}"));
    } else {
        push("input-independent averaged state", None, format!("skipped above N = {MAX_AVERAGE_SENDERS}"));
    }

    if (2..=MAX_AVERAGE_SENDERS).contains(&n) {
        let mut worst = 0.0f64;
        for model in WithheldModel::ALL {
            let a = withheld_participation_state(&inputs, ChannelKind::Entangled, &[n], model)?;
            worst = worst.max(a.joint_fidelity_corrected).max(a.joint_fidelity_uncorrected);
        }
        push("withholding blocks the receiver", Some(worst < 0.99), format!("max receiver fidelity {worst:.6}"));
        let b = withheld_participation_state(&inputs, ChannelKind::Product, &[n], WithheldModel::TraceOut)?;
        let dev = b.participant_fidelities().iter().map(|p| (p.1 - 1.0).abs()).fold(0.0, f64::max);
        push("product baseline keeps participants", Some(dev <= 1e-10), format!("max |F - 1| {dev:.1e}"));
    } else {
        let why = if n < 2 { "needs N >= 2".to_string() } else { format!("skipped above N = {MAX_AVERAGE_SENDERS}") };
        push("withholding blocks the receiver", None, why.clone());
        push("product baseline keeps participants", None, why);
    }
    Ok(res)
}

fn cmd_verify(out: &Output, args: &VerifyArgs) -> CmdResult {
    let (lo, hi) = parse_range(&args.n)?;
    if args.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let mut results = vec![];
    for n in lo..=hi {
        results.extend(verify_one(n, args.samples, args.seed)?);
    }
    let mut failed = 0;
    for r in &results {
        let mark = match r.passed {
            Some(true) => "pass",
            Some(false) => {
                failed += 1;
                "FAIL"
            }
            None => "n/a",
        };
        println!("N={} {:<36} {:<4} {}", r.senders, r.property, mark, r.detail);
    }
    println!("{} properties checked, {failed} failed", results.len());
    out.emit(args.out.as_ref(), args, &results)?;
    Ok(if failed == 0 { 0 } else { EXIT_VERIFY })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let out = Output { command: std::env::args().skip(1).collect(), timing: cli.timing, start: Instant::now() };
    let result = match &cli.command {
        Command::Channel(a) => cmd_channel(&out, a),
        Command::Run(a) => cmd_run(&out, a),
        Command::Tables(a) => cmd_tables(&out, a),
        Command::Verify(a) => cmd_verify(&out, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
