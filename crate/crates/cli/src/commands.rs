use std::path::PathBuf;

use clap::Args;
use cryptogen::game::{best_upper_bound, succ_of_protocol, Decision};
use cryptogen::leakcode::{fixed_capacity, indep_capacity, message_bits, ExperimentReport, LeakConfig, WindowChannel};
use cryptogen::protocol::{safety_check, LeakScenario, ProtocolTree, SafetyReport, ScenarioSpec, DEFAULT_BUDGET};
use cryptogen::stego::{
    compose_run, equivalence_audit, interpret_step, AuditBudget, AuditReport, ComposeRun, InnocentChannel,
    InterpreterState, Interval,
};
use cryptogen::suspicion::{check_transcript_bound, SuspicionCertificate, TranscriptCertificate};
use cryptogen::{derive_seed, Rational};
use serde::{Deserialize, Serialize};

use crate::report::{failed, invalid, parse, CliError, Output, RunConfig, Table};

/// Seed, trial count and budget as given on the command line.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub budget: Option<u64>,
}

impl Overrides {
    fn enumeration_budget(&self) -> usize {
        self.budget.map_or(DEFAULT_BUDGET, |b| b as usize)
    }
}

fn in_unit(name: &str, v: &Rational) -> Result<(), CliError> {
    if v.is_positive() && *v < Rational::one() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie strictly between 0 and 1, got {v}")))
    }
}

fn load_scenario(cfg: &mut RunConfig, path: &std::path::Path) -> Result<LeakScenario, CliError> {
    let spec: ScenarioSpec = parse("scenario", &cfg.load("scenario", path)?)?;
    spec.build().map_err(invalid)
}

fn load_protocol(cfg: &mut RunConfig, path: &std::path::Path) -> Result<ProtocolTree, CliError> {
    parse("protocol", &cfg.load("protocol", path)?)
}

fn check_protocol(tree: &ProtocolTree, scenario: &LeakScenario) -> Result<(), CliError> {
    let report = tree.validate_for(scenario);
    if report.is_valid() {
        Ok(())
    } else {
        Err(invalid(format!("invalid protocol: {}", report.issues.join("; "))))
    }
}

// ---------------------------------------------------------------- capacity

#[derive(Args, Debug, Serialize)]
pub struct CapacityArgs {
    /// Leak probability of each player, for the independent model.
    #[arg(long)]
    pub b: Option<Rational>,
    /// Posterior cap. Ignored when --grid is given.
    #[arg(long)]
    pub c: Option<Rational>,
    /// Evaluate at c = k/(grid+1) for k = 1..=grid.
    #[arg(long)]
    pub grid: Option<u32>,
}

#[derive(Serialize)]
struct CapacityRow {
    b: Option<Rational>,
    c: Rational,
    indep_capacity: Option<f64>,
    fixed_capacity: f64,
}

pub fn capacity(args: &CapacityArgs, _cfg: &mut RunConfig) -> Result<Output, CliError> {
    if let Some(b) = &args.b {
        in_unit("b", b)?;
    }
    let cs: Vec<Rational> = match (args.grid, &args.c) {
        (Some(0), _) => return Err(invalid("grid must be positive")),
        (Some(g), _) => (1..=g).map(|k| Rational::new(k, g + 1)).collect(),
        (None, Some(c)) => vec![c.clone()],
        (None, None) => return Err(invalid("give --c or --grid")),
    };
    for c in &cs {
        in_unit("c", c)?;
    }
    if let (None, Some(b)) = (args.grid, &args.b) {
        if b > &cs[0] {
            return Err(invalid(format!("b = {b} exceeds c = {}", cs[0])));
        }
    }
    let mut rows = Vec::with_capacity(cs.len());
    for c in cs {
        let indep = match &args.b {
            Some(b) if *b <= c => Some(indep_capacity(b, &c).map_err(failed)?),
            _ => None,
        };
        rows.push(CapacityRow {
            b: args.b.clone(),
            fixed_capacity: fixed_capacity(&c).map_err(failed)?,
            c,
            indep_capacity: indep,
        });
    }
    let table = Table {
        headers: vec!["b", "c", "indep_capacity", "fixed_capacity"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.b.as_ref().map(ToString::to_string).unwrap_or_default(),
                    r.c.to_string(),
                    r.indep_capacity.map(|v| v.to_string()).unwrap_or_default(),
                    r.fixed_capacity.to_string(),
                ]
            })
            .collect(),
    };
    Ok(Output::new(rows, table))
}

// ------------------------------------------------------------------ verify

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    #[serde(skip)]
    pub protocol: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub scenario: PathBuf,
    /// Posterior cap for the safety scan.
    #[arg(long)]
    pub c: Option<Rational>,
}

#[derive(Serialize)]
struct VerifyResult {
    non_revealing: bool,
    binary: bool,
    bounds_hold: bool,
    certificate: TranscriptCertificate,
    safety: Option<SafetyReport>,
}

fn cert_row(scope: &str, prefix: &[String], player: Option<usize>, c: &SuspicionCertificate) -> Vec<String> {
    vec![
        scope.to_string(),
        prefix.join(" "),
        player.map(|p| p.to_string()).unwrap_or_default(),
        c.lhs_bits.to_f64().to_string(),
        c.rhs_bits.to_f64().to_string(),
        c.slack.to_f64().to_string(),
        c.equality.to_string(),
        c.holds().to_string(),
    ]
}

pub fn verify(args: &VerifyArgs, cfg: &mut RunConfig, o: Overrides) -> Result<Output, CliError> {
    let tree = load_protocol(cfg, &args.protocol)?;
    let scenario = load_scenario(cfg, &args.scenario)?;
    check_protocol(&tree, &scenario)?;
    if let Some(c) = &args.c {
        in_unit("c", c)?;
    }
    let budget = o.enumeration_budget();
    let certificate = check_transcript_bound(&tree, &scenario, budget).map_err(failed)?;
    let safety = match &args.c {
        Some(c) => Some(safety_check(&tree, &scenario, c, budget).map_err(failed)?),
        None => None,
    };
    let mut rows = vec![cert_row("transcript", &[], None, &certificate.total)];
    for r in &certificate.rounds {
        rows.push(cert_row("speaker", &r.prefix, Some(r.speaker), &r.speaker_bound));
        for (p, c) in &r.listeners {
            rows.push(cert_row("listener", &r.prefix, Some(*p), c));
        }
    }
    let result = VerifyResult {
        non_revealing: tree.non_revealing(),
        binary: tree.is_binary(),
        bounds_hold: certificate.holds(),
        certificate,
        safety,
    };
    let table = Table {
        headers: vec!["scope", "prefix", "player", "lhs_bits", "rhs_bits", "slack", "equality", "holds"],
        rows,
    };
    Ok(Output::new(result, table))
}

// -------------------------------------------------------------------- leak

#[derive(Args, Debug, Serialize)]
pub struct LeakArgs {
    /// Experiment description, `{"kind": "indep" | "fixed_two_group", ...}`.
    #[arg(long)]
    #[serde(skip)]
    pub config: PathBuf,
}

#[derive(Serialize)]
struct LeakResult {
    config: LeakConfig,
    report: ExperimentReport,
}

pub fn leak(args: &LeakArgs, cfg: &mut RunConfig, o: Overrides) -> Result<Output, CliError> {
    let mut config: LeakConfig = parse("config", &cfg.load("config", &args.config)?)?;
    match &mut config {
        LeakConfig::Indep(r) => {
            r.seed = o.seed.unwrap_or(r.seed);
            r.trials = o.trials.unwrap_or(r.trials);
            r.symbol_budget = o.budget.unwrap_or(r.symbol_budget);
            WindowChannel::new(r.b.clone(), r.c.clone()).map_err(invalid)?;
            message_bits(r.rate, r.n).map_err(invalid)?;
        }
        LeakConfig::FixedTwoGroup(r) => {
            r.seed = o.seed.unwrap_or(r.seed);
            r.trials = o.trials.unwrap_or(r.trials);
            r.symbol_budget = o.budget.unwrap_or(r.symbol_budget);
            r.window().map_err(invalid)?;
            message_bits(r.rate * r.l as f64 / r.n as f64, r.n).map_err(invalid)?;
        }
    }
    let report = config.run().map_err(failed)?;
    let kind = match config {
        LeakConfig::Indep(_) => "indep",
        LeakConfig::FixedTwoGroup(_) => "fixed_two_group",
    };
    let table = Table {
        headers: vec![
            "kind",
            "players",
            "message_bits",
            "trials",
            "decode_errors",
            "tie_errors",
            "error_rate",
            "max_posterior_seen",
            "posterior_violations",
        ],
        rows: vec![vec![
            kind.to_string(),
            report.players.to_string(),
            report.message_bits.to_string(),
            report.trials.to_string(),
            report.decode_errors.to_string(),
            report.tie_errors.to_string(),
            report.error_rate().to_string(),
            report.max_posterior_seen.to_string(),
            report.posterior_violations.to_string(),
        ]],
    };
    Ok(Output::new(LeakResult { config, report }, table))
}

// -------------------------------------------------------------------- game

#[derive(Args, Debug, Serialize)]
pub struct GameArgs {
    /// `{"h", "l", "n"}` or `{"scenario"}`, plus `"protocols": [{"id", "tree"}]`.
    #[arg(long)]
    #[serde(skip)]
    pub config: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GameConfig {
    h: Option<u32>,
    l: Option<usize>,
    n: Option<usize>,
    scenario: Option<ScenarioSpec>,
    protocols: Vec<NamedProtocol>,
}

#[derive(Deserialize)]
struct NamedProtocol {
    id: String,
    tree: ProtocolTree,
}

#[derive(Serialize)]
struct GameRow {
    h: Option<u32>,
    l: Option<usize>,
    n: Option<usize>,
    protocol_id: String,
    succ: Rational,
    best_bound_c: Option<f64>,
    bound: Option<f64>,
    decisions: Vec<Decision>,
}

pub fn game(args: &GameArgs, cfg: &mut RunConfig, o: Overrides) -> Result<Output, CliError> {
    let config: GameConfig = parse("config", &cfg.load("config", &args.config)?)?;
    let (scenario, shape) = match (&config.scenario, config.h, config.l, config.n) {
        (Some(spec), None, None, None) => (spec.build().map_err(invalid)?, None),
        (None, Some(h), Some(l), Some(n)) => (
            cryptogen::game::game_scenario(h, l, n).map_err(invalid)?,
            Some((h, l, n)),
        ),
        _ => return Err(invalid("game config needs either h, l, n or a scenario")),
    };
    if config.protocols.is_empty() {
        return Err(invalid("game config lists no protocols"));
    }
    for p in &config.protocols {
        check_protocol(&p.tree, &scenario).map_err(|e| invalid(format!("protocol {:?}: {e}", p.id)))?;
    }
    let bound = match shape {
        Some((h, l, _)) if l > 0 => Some(best_upper_bound(f64::from(h), l as u64, 99).map_err(failed)?),
        _ => None,
    };
    let mut rows = Vec::with_capacity(config.protocols.len());
    for p in &config.protocols {
        let v = succ_of_protocol(&p.tree, &scenario, o.enumeration_budget()).map_err(failed)?;
        rows.push(GameRow {
            h: shape.map(|s| s.0),
            l: shape.map(|s| s.1),
            n: shape.map(|s| s.2),
            protocol_id: p.id.clone(),
            succ: v.succ,
            best_bound_c: bound.map(|b| b.0),
            bound: bound.map(|b| b.1),
            decisions: v.decisions,
        });
    }
    let opt = |v: Option<String>| v.unwrap_or_default();
    let table = Table {
        headers: vec!["h", "l", "n", "protocol_id", "succ", "best_bound_c", "bound"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    opt(r.h.map(|v| v.to_string())),
                    opt(r.l.map(|v| v.to_string())),
                    opt(r.n.map(|v| v.to_string())),
                    r.protocol_id.clone(),
                    r.succ.to_f64().to_string(),
                    opt(r.best_bound_c.map(|v| v.to_string())),
                    opt(r.bound.map(|v| v.to_string())),
                ]
            })
            .collect(),
    };
    Ok(Output::new(rows, table))
}

// ------------------------------------------------------------------- embed

#[derive(Args, Debug, Serialize)]
pub struct EmbedArgs {
    #[arg(long)]
    #[serde(skip)]
    pub protocol: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub scenario: PathBuf,
    /// Innocent channel, `{"players", "rounds": [...], "repeat"}`.
    #[arg(long)]
    #[serde(skip)]
    pub channel: PathBuf,
    /// Also run the exhaustive equivalence audit.
    #[arg(long)]
    pub audit: bool,
}

#[derive(Serialize)]
struct SeededRun {
    seed: u64,
    #[serde(flatten)]
    run: ComposeRun,
}

#[derive(Serialize)]
struct EmbedResult {
    max_rounds: usize,
    decoded_runs: usize,
    runs: Vec<SeededRun>,
    audit: Option<AuditReport>,
}

fn load_channel(cfg: &mut RunConfig, path: &std::path::Path) -> Result<InnocentChannel, CliError> {
    parse("channel", &cfg.load("channel", path)?)
}

pub fn embed(args: &EmbedArgs, cfg: &mut RunConfig, o: Overrides) -> Result<Output, CliError> {
    let tree = load_protocol(cfg, &args.protocol)?;
    let scenario = load_scenario(cfg, &args.scenario)?;
    let channel = load_channel(cfg, &args.channel)?;
    check_protocol(&tree, &scenario)?;
    if !tree.non_revealing() {
        return Err(invalid("protocol is revealing and cannot be embedded"));
    }
    if channel.players() < scenario.n_players() {
        return Err(invalid(format!(
            "channel has {} players, scenario needs {}",
            channel.players(),
            scenario.n_players()
        )));
    }
    let max_rounds = o.budget.map_or(1000, |b| b as usize);
    let base = o.seed.unwrap_or(0);
    let runs = (0..o.trials.unwrap_or(1))
        .map(|t| {
            let seed = derive_seed(base, t);
            compose_run(&tree, &channel, &scenario, seed, max_rounds).map(|run| SeededRun { seed, run })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(failed)?;
    let audit = if args.audit {
        let budget = AuditBudget {
            max_rounds: o.budget.map_or(AuditBudget::default().max_rounds, |b| b as usize),
            ..AuditBudget::default()
        };
        Some(equivalence_audit(&tree, &channel, &scenario, budget).map_err(failed)?)
    } else {
        None
    };
    let rows = runs
        .iter()
        .map(|r| {
            vec![
                r.seed.to_string(),
                r.run.x.clone(),
                r.run.leaks.iter().map(|&l| if l { '1' } else { '0' }).collect(),
                r.run.innocent.len().to_string(),
                r.run.decoded.is_some().to_string(),
                r.run.decoded.as_ref().map(|d| d.join(" ")).unwrap_or_default(),
            ]
        })
        .collect();
    let result = EmbedResult {
        max_rounds,
        decoded_runs: runs.iter().filter(|r| r.run.decoded.is_some()).count(),
        runs,
        audit,
    };
    let table = Table {
        headers: vec!["seed", "x", "leaks", "innocent_rounds", "decoded", "transcript"],
        rows,
    };
    Ok(Output::new(result, table))
}

// ------------------------------------------------------------------ decode

#[derive(Args, Debug, Serialize)]
pub struct DecodeArgs {
    #[arg(long)]
    #[serde(skip)]
    pub protocol: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub channel: PathBuf,
    /// Innocent messages in round order, `[{"player", "message"}, ...]`.
    #[arg(long)]
    #[serde(skip)]
    pub transcript: PathBuf,
}

#[derive(Deserialize)]
struct Heard {
    player: usize,
    message: String,
}

#[derive(Serialize)]
struct DecodeResult {
    rounds: usize,
    finished: bool,
    decoded: Vec<String>,
    /// Interval still pending for the next embedded message.
    interval: Interval,
}

pub fn decode(args: &DecodeArgs, cfg: &mut RunConfig) -> Result<Output, CliError> {
    let tree = load_protocol(cfg, &args.protocol)?;
    tree.validate().is_valid().then_some(()).ok_or_else(|| invalid("invalid protocol"))?;
    let channel = load_channel(cfg, &args.channel)?;
    let heard: Vec<Heard> = parse("transcript", &cfg.load("transcript", &args.transcript)?)?;
    let mut state = InterpreterState::start(&tree);
    for (k, h) in heard.iter().enumerate() {
        let round = channel
            .round(k)
            .ok_or_else(|| invalid(format!("transcript is longer than the channel ({k} rounds)")))?;
        if round.player != h.player {
            return Err(invalid(format!("round {k} belongs to player {}, not {}", round.player, h.player)));
        }
        state = interpret_step(&tree, &state, h.player, &h.message, &round.law)
            .map_err(|e| invalid(format!("round {k}: {e}")))?;
    }
    let rows = state
        .pi_transcript
        .iter()
        .enumerate()
        .map(|(i, m)| vec![i.to_string(), m.clone()])
        .collect();
    let result = DecodeResult {
        rounds: heard.len(),
        finished: state.finished,
        decoded: state.pi_transcript,
        interval: state.interval,
    };
    Ok(Output::new(
        result,
        Table {
            headers: vec!["index", "message"],
            rows,
        },
    ))
}
