//! Command-line front end for the flow-game solvers.
//!
//! Subcommands cover instance validation, coalition values, the optimal
//! approximate core, allocation membership checks, nucleon runs (solver or
//! exhaustive reference), the full brute-force oracle suite, and a seeded
//! instance generator. Reports are plain `key: value` lines with rationals
//! in lowest terms; identical invocations produce byte-identical output.

pub mod instancegen;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use flowgame::coresolve::{
    approx_core_membership, approx_core_vertices, auxiliary_core_membership, epsilon_star,
    potential_characterization_check, Allocation, CoreError, EpsilonStarReport,
    MembershipVerdict,
};
use flowgame::flowcore::{coalition_value, CutEnumerationError};
use flowgame::netmodel::{ArcId, Coalition, FlowNetwork, PlayerId, PlayerIndex, Violation};
use flowgame::nucleonengine::{nucleon, EngineError, NucleonSolution};
use flowgame::reforacle::{
    brute_core_vertices, brute_epsilon_star, brute_nucleon, brute_sigma, gamma_table, NucleonSet,
    OracleError,
};
use flowgame::{render_rat, Rat};
use num::Zero;

/// Success.
pub const EXIT_OK: i32 = 0;
/// Unusable invocation, unreadable file, or malformed input.
pub const EXIT_USAGE: i32 = 1;
/// The instance violates the structural assumptions.
pub const EXIT_INVALID: i32 = 2;
/// A size guard refused the computation.
pub const EXIT_LIMIT: i32 = 3;

/// Everything a finished invocation produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser)]
#[command(
    name = "flowgame",
    about = "Exact solvers for cooperative flow games on unit-capacity networks",
    disable_version_flag = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the two structural assumptions and list any violations.
    Validate {
        /// Instance file in the text format.
        instance: PathBuf,
    },
    /// Maximum flow a coalition can route on its own plus the public arcs.
    Gamma {
        instance: PathBuf,
        /// Comma-separated player ids, e.g. `1,4`.
        #[arg(long)]
        coalition: String,
    },
    /// Optimal guarantee factor and the vertices of its approximate core.
    ApproxCore {
        instance: PathBuf,
        /// Stop listing vertices beyond this many.
        #[arg(long, default_value_t = 100)]
        max_vertices: usize,
    },
    /// Test an allocation file for membership in a core polytope.
    CoreCheck {
        instance: PathBuf,
        /// Allocation file: one `player-id value` pair per line.
        #[arg(long)]
        alloc: PathBuf,
        /// Which polytope to test against.
        #[arg(long, value_enum, default_value_t = ScaleArg::Original)]
        scale: ScaleArg,
    },
    /// Nucleon allocation with the per-round transcript.
    Nucleon {
        instance: PathBuf,
        /// Use the exhaustive reference recursion instead of the solver.
        #[arg(long)]
        oracle: bool,
    },
    /// Run every brute-force reference computation on a small instance.
    Oracle { instance: PathBuf },
    /// Write a seeded random instance to standard output.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Vertex budget including source and sink.
        #[arg(long, default_value_t = 5)]
        vertices: usize,
        /// Number of private arcs, one per player.
        #[arg(long)]
        private: usize,
        /// Number of public arcs.
        #[arg(long, default_value_t = 2)]
        public: usize,
    },
}

/// Scale selector for membership checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    /// The optimal approximate core of the game as given.
    Original,
    /// The core of the game with the grand-coalition value rescaled down to
    /// the private path family size.
    Auxiliary,
}

impl ScaleArg {
    fn label(self) -> &'static str {
        match self {
            ScaleArg::Original => "original",
            ScaleArg::Auxiliary => "auxiliary",
        }
    }
}

/// Parses and executes one invocation. The first element of `argv` is the
/// program name, as in [`std::env::args_os`].
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(args.iter().cloned()) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };

    let echo: String = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");

    let result = match &cli.command {
        Command::Validate { instance } => cmd_validate(&echo, instance),
        Command::Gamma {
            instance,
            coalition,
        } => cmd_gamma(&echo, instance, coalition),
        Command::ApproxCore {
            instance,
            max_vertices,
        } => cmd_approx_core(&echo, instance, *max_vertices),
        Command::CoreCheck {
            instance,
            alloc,
            scale,
        } => cmd_core_check(&echo, instance, alloc, *scale),
        Command::Nucleon { instance, oracle } => cmd_nucleon(&echo, instance, *oracle),
        Command::Oracle { instance } => cmd_oracle(&echo, instance),
        Command::Gen {
            seed,
            vertices,
            private,
            public,
        } => cmd_gen(*seed, *vertices, *private, *public),
    };

    match result {
        Ok(report) => report.into_outcome(),
        Err(failure) => Outcome {
            code: failure.code,
            stdout: String::new(),
            stderr: format!("{}\n", failure.message),
        },
    }
}

/// A finished report: stdout lines plus the exit code (validation reports
/// exit nonzero while still printing their findings).
struct Report {
    lines: Vec<String>,
    raw_stdout: Option<String>,
    stderr: String,
    code: i32,
}

impl Report {
    fn lines(lines: Vec<String>, code: i32) -> Self {
        Report {
            lines,
            raw_stdout: None,
            stderr: String::new(),
            code,
        }
    }

    fn into_outcome(self) -> Outcome {
        let stdout = match self.raw_stdout {
            Some(raw) => raw,
            None => {
                let mut text = self.lines.join("\n");
                text.push('\n');
                text
            }
        };
        Outcome {
            code: self.code,
            stdout,
            stderr: self.stderr,
        }
    }
}

/// An abnormal termination: a message for stderr and an exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure {
            code: EXIT_USAGE,
            message,
        }
    }

    fn invalid(message: String) -> Self {
        Failure {
            code: EXIT_INVALID,
            message,
        }
    }

    fn limit(message: String) -> Self {
        Failure {
            code: EXIT_LIMIT,
            message,
        }
    }
}

fn map_core(err: CoreError) -> Failure {
    let message = err.to_string();
    match err {
        CoreError::InvalidNetwork(_) => Failure::invalid(
            "instance violates the structural assumptions; run the validate subcommand for details"
                .to_string(),
        ),
        CoreError::ZeroValue => Failure::invalid(message),
        CoreError::CutEnumeration(CutEnumerationError::RestrictionTooLarge { .. }) => {
            Failure::limit(message)
        }
        CoreError::CutEnumeration(_) => Failure::invalid(message),
        CoreError::WrongDimension { .. } | CoreError::InvalidEpsilon => Failure::usage(message),
    }
}

fn map_oracle(err: OracleError) -> Failure {
    let message = err.to_string();
    match err {
        OracleError::TooManyPlayers { .. } | OracleError::TooManyArcs { .. } => {
            Failure::limit(message)
        }
        OracleError::UnboundedFamily | OracleError::ZeroValue => Failure::invalid(message),
    }
}

fn map_engine(err: EngineError) -> Failure {
    match err {
        EngineError::Core(core) => map_core(core),
        EngineError::Jumps(jumps) => Failure::limit(jumps.to_string()),
    }
}

fn read_instance(path: &Path) -> Result<FlowNetwork, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    FlowNetwork::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Validates the instance and returns its guarantee report, which doubles
/// as the digest source for every solving subcommand.
fn analyzed(net: &FlowNetwork) -> Result<EpsilonStarReport, Failure> {
    epsilon_star(net).map_err(map_core)
}

fn base_lines(echo: &str, net: &FlowNetwork) -> Vec<String> {
    vec![
        format!("command: {echo}"),
        format!("vertices: {}", net.vertex_count()),
        format!("arcs: {}", net.arc_count()),
        format!("players: {}", net.player_count()),
    ]
}

fn push_sigma_lines(lines: &mut Vec<String>, report: &EpsilonStarReport) {
    lines.push(format!("sigma-private: {}", report.sigma_private));
    lines.push(format!("sigma-all: {}", report.sigma_all));
}

fn player_order_line(index: &PlayerIndex) -> String {
    let ids: Vec<String> = index.players().iter().map(|p| p.0.to_string()).collect();
    format!("player-order: {}", ids.join(" "))
}

fn render_alloc(alloc: &Allocation) -> String {
    let parts: Vec<String> = alloc.values.iter().map(render_rat).collect();
    parts.join(", ")
}

fn render_ids<I: IntoIterator<Item = ArcId>>(ids: I) -> String {
    let parts: Vec<String> = ids.into_iter().map(|a| a.0.to_string()).collect();
    parts.join(" ")
}

fn cmd_validate(echo: &str, path: &Path) -> Result<Report, Failure> {
    let net = read_instance(path)?;
    let report = net.validate();
    let mut lines = base_lines(echo, &net);
    if report.truncated {
        lines.push("truncated: true".to_string());
    }
    if !report.is_clean() {
        lines.push("status: invalid".to_string());
        for violation in &report.violations {
            match violation {
                Violation::PublicPath { arcs } => {
                    lines.push(format!("violation: public-path {}", render_ids(arcs.iter().copied())));
                }
                Violation::OffPathArc { arc } => {
                    lines.push(format!("violation: off-path-arc {}", arc.0));
                }
            }
        }
        return Ok(Report::lines(lines, EXIT_INVALID));
    }
    // Both assumptions hold; a zero grand-coalition value can still make
    // the game degenerate (no arcs at all).
    match epsilon_star(&net) {
        Ok(rep) => {
            lines.push("status: clean".to_string());
            push_sigma_lines(&mut lines, &rep);
            Ok(Report::lines(lines, EXIT_OK))
        }
        Err(CoreError::ZeroValue) => {
            lines.push("status: degenerate".to_string());
            Ok(Report::lines(lines, EXIT_INVALID))
        }
        Err(other) => Err(map_core(other)),
    }
}

fn parse_coalition_spec(spec: &str, index: &PlayerIndex) -> Result<Coalition, Failure> {
    let mut players = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        let id: u32 = token
            .parse()
            .map_err(|_| Failure::usage(format!("coalition member {token:?} is not a player id")))?;
        let player = PlayerId(id);
        if index.position(player).is_none() {
            return Err(Failure::usage(format!(
                "player {id} does not appear in the instance"
            )));
        }
        players.push(player);
    }
    Ok(Coalition::from_players(players))
}

fn cmd_gamma(echo: &str, path: &Path, spec: &str) -> Result<Report, Failure> {
    let net = read_instance(path)?;
    let rep = analyzed(&net)?;
    let index = PlayerIndex::new(&net);
    let coalition = parse_coalition_spec(spec, &index)?;
    let value = coalition_value(&net, &coalition);
    let mut lines = base_lines(echo, &net);
    push_sigma_lines(&mut lines, &rep);
    lines.push(format!("coalition: {coalition}"));
    lines.push(format!("value: {value}"));
    Ok(Report::lines(lines, EXIT_OK))
}

fn cmd_approx_core(echo: &str, path: &Path, max_vertices: usize) -> Result<Report, Failure> {
    let net = read_instance(path)?;
    let rep = analyzed(&net)?;
    let index = PlayerIndex::new(&net);
    let vertices = approx_core_vertices(&net, max_vertices).map_err(map_core)?;
    let mut lines = base_lines(echo, &net);
    push_sigma_lines(&mut lines, &rep);
    lines.push(format!("epsilon-star: {}", render_rat(&rep.epsilon_star)));
    lines.push(format!("factor: {}", render_rat(&rep.factor)));
    lines.push(format!(
        "private-cut: {}",
        render_ids(rep.private_witness.min_cut.iter().copied())
    ));
    lines.push(format!(
        "all-cut: {}",
        render_ids(rep.all_witness.min_cut.iter().copied())
    ));
    lines.push(player_order_line(&index));
    lines.push(format!("vertex-count: {}", vertices.vertices.len()));
    if vertices.truncated {
        lines.push("truncated: true".to_string());
    }
    for vertex in &vertices.vertices {
        lines.push(format!("vertex: {}", render_alloc(vertex)));
    }
    Ok(Report::lines(lines, EXIT_OK))
}

fn cmd_core_check(
    echo: &str,
    path: &Path,
    alloc_path: &Path,
    scale: ScaleArg,
) -> Result<Report, Failure> {
    let net = read_instance(path)?;
    let rep = analyzed(&net)?;
    let index = PlayerIndex::new(&net);
    let text = std::fs::read_to_string(alloc_path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", alloc_path.display())))?;
    let alloc = parse_allocation_file(&text, &index)
        .map_err(|e| Failure::usage(format!("{}: {e}", alloc_path.display())))?;

    let (factor, verdict) = match scale {
        ScaleArg::Original => {
            let verdict =
                approx_core_membership(&net, &alloc, &rep.epsilon_star).map_err(map_core)?;
            (rep.factor.clone(), verdict)
        }
        ScaleArg::Auxiliary => {
            let verdict = auxiliary_core_membership(&net, &alloc).map_err(map_core)?;
            (Rat::from_integer(1.into()), verdict)
        }
    };

    let mut lines = base_lines(echo, &net);
    push_sigma_lines(&mut lines, &rep);
    lines.push(format!("scale: {}", scale.label()));
    lines.push(format!("factor: {}", render_rat(&factor)));
    lines.push(player_order_line(&index));
    lines.push(format!("allocation: {}", render_alloc(&alloc)));
    match &verdict {
        MembershipVerdict::Member { potential } => {
            lines.push("verdict: member".to_string());
            let names: Vec<String> = (0..net.vertex_count())
                .map(|v| net.vertex_name(flowgame::netmodel::VertexId(v)).to_string())
                .collect();
            lines.push(format!("vertex-order: {}", names.join(" ")));
            let rendered: Vec<String> = potential.iter().map(render_rat).collect();
            lines.push(format!("potential: {}", rendered.join(", ")));
        }
        MembershipVerdict::NotEfficient { total, expected } => {
            lines.push("verdict: not-efficient".to_string());
            lines.push(format!("total: {}", render_rat(total)));
            lines.push(format!("expected: {}", render_rat(expected)));
        }
        MembershipVerdict::NegativePlayer { player, value } => {
            lines.push("verdict: negative-player".to_string());
            lines.push(format!("player: {}", player.0));
            lines.push(format!("value: {}", render_rat(value)));
        }
        MembershipVerdict::DeficientCoalition {
            coalition,
            coalition_value,
            assigned,
            required,
        } => {
            lines.push("verdict: deficient-coalition".to_string());
            lines.push(format!("coalition: {coalition}"));
            lines.push(format!("coalition-value: {coalition_value}"));
            lines.push(format!("assigned: {}", render_rat(assigned)));
            lines.push(format!("required: {}", render_rat(required)));
            if let Some(check) = potential_characterization_check(&net, &index, &alloc, &factor) {
                if !check.meets_factor {
                    lines.push(format!(
                        "violating-path: {}",
                        render_ids(check.cheapest_path.iter().copied())
                    ));
                }
            }
        }
    }
    Ok(Report::lines(lines, EXIT_OK))
}

fn push_solution_lines(
    lines: &mut Vec<String>,
    auxiliary: &NucleonSolution,
    original: &NucleonSolution,
) {
    match (auxiliary, original) {
        (NucleonSolution::Point(aux), NucleonSolution::Point(orig)) => {
            lines.push("outcome: point".to_string());
            lines.push(format!("auxiliary: {}", render_alloc(aux)));
            lines.push(format!("allocation: {}", render_alloc(orig)));
        }
        (NucleonSolution::CoreFace(aux), NucleonSolution::CoreFace(orig)) => {
            lines.push("outcome: core-face".to_string());
            lines.push(format!("vertex-count: {}", aux.len()));
            for vertex in aux {
                lines.push(format!("auxiliary-vertex: {}", render_alloc(vertex)));
            }
            for vertex in orig {
                lines.push(format!("vertex: {}", render_alloc(vertex)));
            }
        }
        _ => unreachable!("auxiliary and original outcomes have the same shape"),
    }
}

fn push_oracle_outcome_lines(lines: &mut Vec<String>, outcome: &NucleonSet, factor: &Rat) {
    match outcome {
        NucleonSet::Point(aux) => {
            lines.push("outcome: point".to_string());
            lines.push(format!("auxiliary: {}", render_alloc(aux)));
            lines.push(format!("allocation: {}", render_alloc(&aux.scaled(factor))));
        }
        NucleonSet::Face(aux) => {
            lines.push("outcome: core-face".to_string());
            lines.push(format!("vertex-count: {}", aux.len()));
            for vertex in aux {
                lines.push(format!("auxiliary-vertex: {}", render_alloc(vertex)));
            }
            for vertex in aux {
                lines.push(format!("vertex: {}", render_alloc(&vertex.scaled(factor))));
            }
        }
    }
}

fn cmd_nucleon(echo: &str, path: &Path, oracle: bool) -> Result<Report, Failure> {
    let net = read_instance(path)?;
    let rep = analyzed(&net)?;
    let index = PlayerIndex::new(&net);
    let mut lines = base_lines(echo, &net);
    push_sigma_lines(&mut lines, &rep);
    lines.push(format!("scale-factor: {}", render_rat(&rep.factor)));
    lines.push(player_order_line(&index));

    if oracle {
        let brute = brute_nucleon(&net).map_err(map_oracle)?;
        lines.push("mode: oracle".to_string());
        lines.push(format!("rounds: {}", brute.rounds.len()));
        for (i, eps) in brute.rounds.iter().enumerate() {
            lines.push(format!("round {}: epsilon {}", i + 1, render_rat(eps)));
        }
        push_oracle_outcome_lines(&mut lines, &brute.outcome, &rep.factor);
    } else {
        let report = nucleon(&net).map_err(map_engine)?;
        lines.push("mode: engine".to_string());
        lines.push(format!("whole-core: {}", report.whole_core));
        lines.push(format!("rounds: {}", report.rounds.len()));
        for (i, round) in report.rounds.iter().enumerate() {
            lines.push(format!(
                "round {}: epsilon {}, cuts {}, fixed-players {}, fixed-pairs {}",
                i + 1,
                render_rat(&round.epsilon),
                round.cuts_added,
                round.fixed_players_after,
                round.fixed_pairs_after
            ));
        }
        push_solution_lines(&mut lines, &report.auxiliary, &report.original);
    }
    Ok(Report::lines(lines, EXIT_OK))
}

/// Rebuilds a coalition from its bitmask over the sorted player order.
fn mask_coalition(index: &PlayerIndex, mask: u64) -> Coalition {
    Coalition::from_players(
        index
            .players()
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p),
    )
}

/// Coalition counts above this stay unlisted in oracle reports.
const GAMMA_LISTING_PLAYER_CAP: usize = 8;

fn cmd_oracle(echo: &str, path: &Path) -> Result<Report, Failure> {
    let net = read_instance(path)?;
    let rep = analyzed(&net)?;
    let index = PlayerIndex::new(&net);
    let mut lines = base_lines(echo, &net);
    push_sigma_lines(&mut lines, &rep);
    lines.push(player_order_line(&index));

    let table = gamma_table(&net).map_err(map_oracle)?;
    let coalitions = 1u64 << table.player_count();
    if table.player_count() <= GAMMA_LISTING_PLAYER_CAP {
        lines.push(format!("gamma-table: {coalitions} coalitions"));
        for mask in 0..coalitions {
            let coalition = mask_coalition(&index, mask);
            lines.push(format!("gamma {}: {}", coalition, table.value(mask)));
        }
    } else {
        lines.push(format!(
            "gamma-table: {coalitions} coalitions (listing suppressed)"
        ));
    }

    let private = brute_sigma(&net, &net.private_arc_ids()).map_err(map_oracle)?;
    let all_arcs: BTreeSet<ArcId> = net.arc_ids().collect();
    let all = brute_sigma(&net, &all_arcs).map_err(map_oracle)?;
    lines.push(format!("brute-sigma-private: {}", private.value));
    for cut in &private.min_cuts {
        lines.push(format!("private-cut: {}", render_ids(cut.iter().copied())));
    }
    lines.push(format!("brute-sigma-all: {}", all.value));
    for cut in &all.min_cuts {
        lines.push(format!("all-cut: {}", render_ids(cut.iter().copied())));
    }

    let eps = brute_epsilon_star(&net).map_err(map_oracle)?;
    lines.push(format!("epsilon-star: {}", render_rat(&eps.epsilon)));
    lines.push(format!("witness: {}", render_alloc(&eps.witness)));

    let core = brute_core_vertices(&net).map_err(map_oracle)?;
    lines.push(format!("core-vertex-count: {}", core.len()));
    for vertex in &core {
        lines.push(format!("core-vertex: {}", render_alloc(vertex)));
    }

    let nuc = brute_nucleon(&net).map_err(map_oracle)?;
    lines.push(format!("rounds: {}", nuc.rounds.len()));
    for (i, e) in nuc.rounds.iter().enumerate() {
        lines.push(format!("round {}: epsilon {}", i + 1, render_rat(e)));
    }
    push_oracle_outcome_lines(&mut lines, &nuc.outcome, &rep.factor);
    Ok(Report::lines(lines, EXIT_OK))
}

fn cmd_gen(seed: u64, vertices: usize, private: usize, public: usize) -> Result<Report, Failure> {
    match instancegen::generate_instance(seed, vertices, private, public) {
        Ok(generated) => Ok(Report {
            lines: Vec::new(),
            raw_stdout: Some(generated.network.serialize()),
            stderr: format!("attempts: {}\n", generated.attempts),
            code: EXIT_OK,
        }),
        Err(err) => Err(Failure::limit(err.to_string())),
    }
}

/// Parses `p/q` or a plain integer into an exact rational.
fn parse_rat_token(token: &str) -> Result<Rat, String> {
    let (numer_text, denom_text) = match token.split_once('/') {
        None => (token, "1"),
        Some(pair) => pair,
    };
    let numer: num::BigInt = numer_text
        .parse()
        .map_err(|_| format!("{token:?} is not a rational"))?;
    let denom: num::BigInt = denom_text
        .parse()
        .map_err(|_| format!("{token:?} is not a rational"))?;
    if denom.is_zero() {
        return Err(format!("{token:?} has denominator zero"));
    }
    Ok(Rat::new(numer, denom))
}

/// Parses an allocation file: one `player-id value` pair per line, `#`
/// comments, every player of the instance exactly once in any order.
fn parse_allocation_file(text: &str, index: &PlayerIndex) -> Result<Allocation, String> {
    let mut given: std::collections::BTreeMap<PlayerId, Rat> = std::collections::BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(format!(
                "allocation line {}: expected `player-id value`",
                lineno + 1
            ));
        }
        let id: u32 = fields[0].parse().map_err(|_| {
            format!(
                "allocation line {}: {:?} is not a player id",
                lineno + 1,
                fields[0]
            )
        })?;
        let player = PlayerId(id);
        if index.position(player).is_none() {
            return Err(format!(
                "allocation line {}: player {id} does not appear in the instance",
                lineno + 1
            ));
        }
        let value = parse_rat_token(fields[1])
            .map_err(|e| format!("allocation line {}: {e}", lineno + 1))?;
        if given.insert(player, value).is_some() {
            return Err(format!(
                "allocation line {}: player {id} listed twice",
                lineno + 1
            ));
        }
    }
    let mut values = Vec::with_capacity(index.players().len());
    for &player in index.players() {
        match given.remove(&player) {
            Some(value) => values.push(value),
            None => return Err(format!("player {} missing from the allocation file", player.0)),
        }
    }
    Ok(Allocation::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index_for(text: &str) -> (FlowNetwork, PlayerIndex) {
        let net = FlowNetwork::parse(text).expect("test instance parses");
        let index = PlayerIndex::new(&net);
        (net, index)
    }

    const PARALLEL: &str = "vertices 2\nsource s\nsink t\narc s t private 1\narc s t private 2\n";

    #[test]
    fn rational_tokens_cover_integers_fractions_and_negatives() {
        assert_eq!(parse_rat_token("3").unwrap(), flowgame::rat_int(3));
        assert_eq!(parse_rat_token("-2/4").unwrap(), flowgame::rat(-1, 2));
        assert!(parse_rat_token("x").is_err());
        assert!(parse_rat_token("1/0").is_err());
    }

    #[test]
    fn allocation_files_accept_any_order_and_comments() {
        let (_, index) = index_for(PARALLEL);
        let text = "# shares\n2 1/2\n1 3/2\n";
        let alloc = parse_allocation_file(text, &index).unwrap();
        assert_eq!(
            alloc.values,
            vec![flowgame::rat(3, 2), flowgame::rat(1, 2)]
        );
    }

    #[test]
    fn allocation_files_reject_duplicates_gaps_and_strangers() {
        let (_, index) = index_for(PARALLEL);
        assert!(parse_allocation_file("1 1\n1 1\n2 0\n", &index)
            .unwrap_err()
            .contains("listed twice"));
        assert!(parse_allocation_file("1 1\n", &index)
            .unwrap_err()
            .contains("missing"));
        assert!(parse_allocation_file("1 1\n2 0\n9 0\n", &index)
            .unwrap_err()
            .contains("does not appear"));
    }

    #[test]
    fn coalition_specs_reject_unknown_players() {
        let (_, index) = index_for(PARALLEL);
        assert!(parse_coalition_spec("1,2", &index).is_ok());
        assert!(parse_coalition_spec("1,9", &index).is_err());
        assert!(parse_coalition_spec("one", &index).is_err());
    }

    #[test]
    fn run_reports_usage_errors_on_stderr() {
        let out = run(["flowgame", "frobnicate"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }

    #[test]
    fn help_prints_to_stdout_and_succeeds() {
        let out = run(["flowgame", "--help"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("validate"));
    }
}
