//! `lorenz-hole` command-line front end.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lorenz_hole::entropy::{dimension, pair_entropy, shift_entropy, EntropyResult, KneadingDeterminant};
use lorenz_hole::numeric::{MapParams, NumericError, DEFAULT_PRECISION};
use lorenz_hole::oracle::{BoundAutomaton, Extreme, OracleError};
use lorenz_hole::plateau::{
    in_bifurcation_set, plateau_at_critical, plateau_interior, plateau_lower, verify_plateau, Plateau, PlateauError,
};
use lorenz_hole::staircase::{fmt_sig, staircase, MovingHole, StaircaseConfig, StaircaseError, SCHEMA_VERSION};
use lorenz_hole::survivor::{survivor_shift, weak_admissibilize};
use lorenz_hole::{EpSeq, HoleKneading, KneadingError, KneadingPair, SeqError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

mod error;

use error::CliError;

#[derive(Parser)]
#[command(name = "lorenz-hole", version, about = "Survivor shifts, plateaus and entropy for Lorenz maps with a hole")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Operations on eventually periodic sequences.
    Seq {
        #[command(subcommand)]
        op: SeqOp,
    },
    /// Classify a kneading pair.
    Admissible(PairArgs),
    /// Survivor shift of a hole.
    Survivor(HoleArgs),
    /// Plateau of the moving hole endpoint.
    Plateau(PlateauArgs),
    /// Bifurcation-set membership of b.
    Bifurcation(HoleArgs),
    /// Topological entropy of the Lorenz shift or of a survivor shift.
    Entropy(EntropyArgs),
    /// Automaton for the hole's constraint language.
    Oracle(OracleArgs),
    /// Dimension table as one hole endpoint sweeps a grid.
    Staircase(StaircaseArgs),
    /// Escape-time simulation of an intermediate β-transformation.
    Simulate(SimulateArgs),
}

#[derive(Subcommand)]
enum SeqOp {
    /// Canonical form.
    Canon { seq: String },
    /// Lexicographic comparison.
    Compare { x: String, y: String },
    /// A sequence strictly between two others.
    Between { x: String, y: String },
}

#[derive(Args)]
struct PairArgs {
    /// k₊, starting with 1.
    #[arg(long, allow_hyphen_values = true)]
    kplus: String,
    /// k₋, starting with 0.
    #[arg(long, allow_hyphen_values = true)]
    kminus: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Anchor {
    Critical,
    Zero,
    One,
}

#[derive(Args)]
struct HoleArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Lower hole bound τ(a−); omitted means a = c.
    #[arg(long)]
    a: Option<String>,
    /// Upper hole bound τ(b+); omitted means b = c.
    #[arg(long)]
    b: Option<String>,
    /// `zero` reads --b as τ(t+) of the hole (0, t); `one` reads --a as τ(s−) of (s, 1).
    #[arg(long, value_enum, default_value_t = Anchor::Critical)]
    anchor: Anchor,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Upper,
    Lower,
}

#[derive(Args)]
struct PlateauArgs {
    #[command(flatten)]
    hole: HoleArgs,
    /// `upper` moves b with a fixed; `lower` moves a with b fixed.
    #[arg(long, value_enum, default_value_t = Side::Upper)]
    side: Side,
    /// Interior samples used to verify the plateau.
    #[arg(long, default_value_t = 8)]
    samples: usize,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    hole: HoleArgs,
    /// β for the Hausdorff dimension h / ln β.
    #[arg(long)]
    beta: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    hole: HoleArgs,
    /// Print the automaton in Graphviz DOT instead.
    #[arg(long)]
    dot: bool,
    /// Word counts are reported for lengths 1..=depth.
    #[arg(long, default_value_t = 12)]
    depth: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sweep {
    Zero,
    Critical,
}

#[derive(Args)]
struct StaircaseArgs {
    /// β as a decimal, or `golden` / `tribonacci`.
    #[arg(long)]
    beta: String,
    /// α as a decimal, or `symmetric` for 1 - β/2.
    #[arg(long, default_value = "0")]
    alpha: String,
    /// Moving hole: (0, t), or (c, b) / (a, b) when --a is given.
    #[arg(long, value_enum, default_value_t = Sweep::Zero)]
    hole: Sweep,
    /// Fixed lower endpoint a < c, a decimal; implies a (a, b) sweep.
    #[arg(long)]
    a: Option<String>,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value_t = 64)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    beta: String,
    #[arg(long, default_value = "0")]
    alpha: String,
    /// Hole left endpoint, a decimal.
    #[arg(long)]
    a: String,
    /// Hole right endpoint, a decimal.
    #[arg(long)]
    b: String,
    #[arg(long, default_value_t = 10_000)]
    points: usize,
    #[arg(long, default_value_t = 1_000)]
    iters: usize,
    /// Sample uniformly random points with this seed instead of a grid.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

/// Command result: a JSON value, or text already in its final form.
enum Output {
    Value(Value),
    Text(String),
}

fn parse_seq(s: &str) -> Result<EpSeq, CliError> {
    s.parse::<EpSeq>().map_err(|e: SeqError| CliError::Parse(format!("{s:?}: {e}")))
}

fn parse_pair(p: &PairArgs) -> Result<KneadingPair, CliError> {
    Ok(KneadingPair::new(parse_seq(&p.kplus)?, parse_seq(&p.kminus)?)?)
}

fn parse_hole(h: &HoleArgs) -> Result<(KneadingPair, HoleKneading), CliError> {
    let pair = parse_pair(&h.pair)?;
    let a = h.a.as_deref().map(parse_seq).transpose()?;
    let b = h.b.as_deref().map(parse_seq).transpose()?;
    let hole = match h.anchor {
        Anchor::Critical => HoleKneading::around_critical(a, b)?,
        Anchor::Zero => HoleKneading::at_zero(b.ok_or_else(|| CliError::Usage("--anchor zero needs --b".into()))?),
        Anchor::One => HoleKneading::at_one(a.ok_or_else(|| CliError::Usage("--anchor one needs --a".into()))?),
    };
    Ok((pair, hole))
}

fn entropy_json(e: &EntropyResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("entropy_nats".into(), json!(e.entropy));
    m.insert("entropy_bits".into(), json!(e.bits()));
    m.insert("t0_lo".into(), json!(e.t0.as_ref().map(|b| fmt_sig(b.lo.to_f64(), 15))));
    m.insert("t0_hi".into(), json!(e.t0.as_ref().map(|b| fmt_sig(b.hi.to_f64(), 15))));
    m.insert("flags".into(), json!(e.flags));
    m
}

fn plateau_json(pl: &Plateau) -> Value {
    json!({
        "case": pl.case.to_string(),
        "left": { "kneading": pl.left.kneading.to_string(), "closed": pl.left.closed },
        "right": { "kneading": pl.right.kneading.to_string(), "closed": pl.right.closed },
        "s": pl.survivor.s.to_string(),
        "t": pl.survivor.t.to_string(),
    })
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let value = match &cli.command {
        Command::Seq { op } => match op {
            SeqOp::Canon { seq } => json!({ "canonical": parse_seq(seq)?.to_string() }),
            SeqOp::Compare { x, y } => {
                let ord = parse_seq(x)?.cmp(&parse_seq(y)?);
                json!({ "order": format!("{ord:?}").to_lowercase() })
            }
            SeqOp::Between { x, y } => {
                let z = EpSeq::strictly_between(&parse_seq(x)?, &parse_seq(y)?)
                    .map_err(|e| CliError::Computation("no_between", e.to_string()))?;
                json!({ "between": z.to_string() })
            }
        },
        Command::Admissible(p) => {
            let pair = parse_pair(p)?;
            json!({
                "kplus": pair.kplus().to_string(),
                "kminus": pair.kminus().to_string(),
                "classification": pair.classify().to_string(),
            })
        }
        Command::Survivor(h) => {
            let (pair, hole) = parse_hole(h)?;
            let sh = survivor_shift(&hole, &pair)?;
            let flips: Vec<Value> = sh
                .flips
                .iter()
                .map(|f| json!({ "kind": f.kind, "position": f.position, "before": f.before.to_string(), "after": f.after.to_string() }))
                .collect();
            let mut m = Map::new();
            m.insert("s".into(), json!(sh.s.to_string()));
            m.insert("t".into(), json!(sh.t.to_string()));
            m.insert("degenerate".into(), json!(sh.degenerate));
            m.insert("flips".into(), Value::Array(flips));
            m.extend(entropy_json(&shift_entropy(&sh)));
            Value::Object(m)
        }
        Command::Plateau(args) => {
            let (pair, hole) = parse_hole(&args.hole)?;
            if hole.anchor != lorenz_hole::HoleAnchor::Critical {
                return Err(CliError::Usage("plateaus are defined for holes around the critical point".into()));
            }
            let (a, b) = (hole.a_lower.as_ref(), hole.b_upper.as_ref());
            let (pl, fixed) = match args.side {
                Side::Upper => {
                    let b = b.ok_or_else(|| CliError::Usage("--side upper needs --b".into()))?;
                    match a {
                        None => (plateau_at_critical(&pair, b)?, None),
                        Some(a) => (plateau_interior(&pair, a, b)?, Some(a)),
                    }
                }
                Side::Lower => {
                    let a = a.ok_or_else(|| CliError::Usage("--side lower needs --a".into()))?;
                    (plateau_lower(&pair, a, b)?, b)
                }
            };
            let mut v = plateau_json(&pl);
            if args.samples > 0 {
                let report = verify_plateau(&pair, fixed, &pl, args.samples);
                v["verified"] = json!(report.verified());
                v["violations"] = report
                    .violations
                    .iter()
                    .map(|x| json!({ "kind": x.kind, "witness": x.witness.to_string() }))
                    .collect();
            } else {
                v["verified"] = json!(false);
            }
            v
        }
        Command::Bifurcation(h) => {
            let (pair, hole) = parse_hole(h)?;
            let b = hole.b_upper.as_ref().ok_or_else(|| CliError::Usage("bifurcation needs --b".into()))?;
            json!({ "member": in_bifurcation_set(&pair, hole.a_lower.as_ref(), b) })
        }
        Command::Entropy(args) => {
            let (pair, hole) = parse_hole(&args.hole)?;
            let has_hole = args.hole.a.is_some() || args.hole.b.is_some();
            let mut m = Map::new();
            let result = if has_hole {
                let sh = weak_admissibilize(&hole, &pair).or_else(|e| match e {
                    KneadingError::DegenerateHole => survivor_shift(&hole, &pair),
                    e => Err(e),
                })?;
                m.insert("s".into(), json!(sh.s.to_string()));
                m.insert("t".into(), json!(sh.t.to_string()));
                m.insert("degenerate".into(), json!(sh.degenerate));
                if let Some(p) = sh.as_pair() {
                    let k = KneadingDeterminant::of_pair(&p).reduce();
                    m.insert("determinant".into(), json!(k.to_string()));
                }
                shift_entropy(&sh)
            } else {
                let k = KneadingDeterminant::of_pair(&pair).reduce();
                m.insert("determinant".into(), json!(k.to_string()));
                pair_entropy(&pair)
            };
            m.extend(entropy_json(&result));
            if let Some(beta) = &args.beta {
                let p = MapParams::new(beta, "0", DEFAULT_PRECISION)?;
                m.insert("dimension".into(), json!(dimension(p.beta_f64(), &result)));
            }
            Value::Object(m)
        }
        Command::Oracle(args) => {
            let (pair, hole) = parse_hole(&args.hole)?;
            let (l, u) = hole.constraint_bounds(&pair);
            let aut = BoundAutomaton::build_bounds(&l, &u);
            if args.dot {
                return Ok(Output::Text(aut.to_dot()));
            }
            let extremal = |e| aut.extremal(e).map(|x| x.to_string());
            let (min, max) = match (extremal(Extreme::Min), extremal(Extreme::Max)) {
                (Ok(a), Ok(b)) => (Some(a), Some(b)),
                (Err(OracleError::EmptyLanguage), _) | (_, Err(OracleError::EmptyLanguage)) => (None, None),
            };
            json!({
                "lower": l.to_string(),
                "upper": u.to_string(),
                "states": aut.state_count(),
                "live_states": aut.live_count(),
                "entropy_estimate": aut.entropy_estimate(),
                "min": min,
                "max": max,
                "counts": (1..=args.depth).map(|n| aut.count_words(n).to_string()).collect::<Vec<_>>(),
            })
        }
        Command::Staircase(args) => {
            let hole = match (&args.a, args.hole) {
                (Some(a), _) => MovingHole::FixedLower(a.clone()),
                (None, Sweep::Zero) => MovingHole::Zero,
                (None, Sweep::Critical) => MovingHole::Critical,
            };
            let cfg = StaircaseConfig {
                beta: args.beta.clone(),
                alpha: args.alpha.clone(),
                hole,
                grid: args.grid,
                depth: args.depth,
                precision: args.precision,
            };
            let st = staircase(&cfg)?;
            return Ok(match cli.format {
                Format::Csv => Output::Text(st.to_csv()),
                Format::Json => Output::Value(st.to_json()),
            });
        }
        Command::Simulate(args) => {
            let p = MapParams::new(&args.beta, &args.alpha, args.precision)?;
            let (a, b) = (p.to_f64(&p.parse(&args.a)?), p.to_f64(&p.parse(&args.b)?));
            let c = p.to_f64(p.c());
            if !(0.0 <= a && a <= c && c <= b && b <= 1.0) {
                return Err(CliError::Usage(format!("hole ({a}, {b}) must satisfy 0 ≤ a ≤ c ≤ b ≤ 1 with c = {c}")));
            }
            let report = match args.seed {
                Some(seed) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let points: Vec<f64> = (0..args.points).map(|_| rng.gen::<f64>()).collect();
                    p.escape_survivors_at(a, b, &points, args.iters)
                }
                None => p.escape_survivors(a, b, args.points, args.iters),
            };
            json!({
                "surviving_fraction": report.surviving_fraction,
                "histogram": report.histogram,
                "flagged_points": report.flagged_points,
            })
        }
    };
    Ok(Output::Value(value))
}

fn render(format: Format, out: Output) -> String {
    match out {
        Output::Text(t) => t,
        Output::Value(Value::Object(mut m)) if format == Format::Json => {
            m.insert("schema".into(), json!(SCHEMA_VERSION));
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
            s.push('\n');
            s
        }
        Output::Value(v) if format == Format::Json => {
            let mut s = serde_json::to_string_pretty(&v).expect("serializable");
            s.push('\n');
            s
        }
        Output::Value(v) => to_csv(&v),
    }
}

/// One header line and one record; arrays are joined with `;`.
fn to_csv(v: &Value) -> String {
    let Value::Object(m) = v else { return format!("{v}\n") };
    let cell = |v: &Value| -> String {
        let s = match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            Value::Array(xs) => xs.iter().map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string)).collect::<Vec<_>>().join(";"),
            other => other.to_string(),
        };
        if s.contains(',') || s.contains('"') || s.contains('\n') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s
        }
    };
    let header: Vec<&str> = m.keys().map(String::as_str).collect();
    let row: Vec<String> = m.values().map(cell).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn emit(path: Option<&str>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{p}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let json_mode = !raw.windows(2).any(|w| w[0] == "--format" && w[1] == "csv") && !raw.iter().any(|a| a == "--format=csv");
    let cli = match Cli::try_parse_from(&raw) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let msg = msg.strip_prefix("error: ").unwrap_or(&msg).to_string();
            return report(CliError::Usage(msg), json_mode);
        }
    };
    let result = run(&cli).and_then(|out| emit(cli.out.as_deref(), &render(cli.format, out)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e, cli.format == Format::Json),
    }
}

fn report(e: CliError, json_mode: bool) -> ExitCode {
    if json_mode {
        let v = json!({ "schema": SCHEMA_VERSION, "error": { "code": e.code(), "message": e.to_string() } });
        println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
    }
    eprintln!("error: {e}");
    ExitCode::from(e.exit_status())
}

impl From<KneadingError> for CliError {
    fn from(e: KneadingError) -> Self {
        let code = match &e {
            KneadingError::InvalidPair(..) => return CliError::Validation("invalid_pair", e.to_string()),
            KneadingError::NotAdmissiblePair => return CliError::Validation("not_admissible", e.to_string()),
            KneadingError::InvalidBound(_) => return CliError::Validation("invalid_bound", e.to_string()),
            KneadingError::NotCriticalHole => return CliError::Validation("not_critical_hole", e.to_string()),
            KneadingError::DegenerateHole => "degenerate_hole",
            KneadingError::IterationCapExceeded { .. } => "iteration_cap_exceeded",
            KneadingError::Internal { .. } => "internal",
        };
        CliError::Computation(code, e.to_string())
    }
}

impl From<PlateauError> for CliError {
    fn from(e: PlateauError) -> Self {
        match e {
            PlateauError::Kneading(k) => k.into(),
            PlateauError::NonPeriodicBound(_) => CliError::Validation("non_periodic_bound", e.to_string()),
            PlateauError::DegenerateHole => CliError::Computation("degenerate_hole", e.to_string()),
            PlateauError::Internal { .. } => CliError::Computation("internal", e.to_string()),
        }
    }
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        match e {
            NumericError::BadDecimal(_) => CliError::Validation("parse_error", e.to_string()),
            NumericError::OutOfDelta(..) => CliError::Validation("out_of_delta", e.to_string()),
            NumericError::LowPrecision => CliError::Validation("low_precision", e.to_string()),
            NumericError::Incomplete(_) => CliError::Computation("incomplete_kneading", e.to_string()),
        }
    }
}

impl From<StaircaseError> for CliError {
    fn from(e: StaircaseError) -> Self {
        match e {
            StaircaseError::Numeric(n) => n.into(),
            StaircaseError::Kneading(k) => k.into(),
            StaircaseError::Grid => CliError::Validation("bad_grid", e.to_string()),
            StaircaseError::FixedBound(_) => CliError::Validation("invalid_bound", e.to_string()),
        }
    }
}
