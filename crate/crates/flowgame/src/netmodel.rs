//! Network representation, instance text format, validation and
//! preprocessing.
//!
//! A flow network here is a finite directed graph with distinguished source
//! and sink, unit capacity on every arc, and an ownership label per arc:
//! public arcs are usable by every coalition, a private arc is usable only
//! when its owning player joins. Parallel arcs are allowed; arcs are
//! identified by their position in the arc list.
//!
//! Two structural assumptions make the associated game well behaved:
//!
//! 1. every source-sink path contains at least one private arc, and
//! 2. every arc lies on at least one source-sink path.
//!
//! [`FlowNetwork::validate`] reports violations of both as data;
//! [`FlowNetwork::preprocess`] deletes arcs violating (2) and rejects
//! networks that still violate (1).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Index into the vertex list of a [`FlowNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index into the arc list of a [`FlowNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcId(pub usize);

/// A player owning exactly one private arc. Ids are positive integers taken
/// from the instance file; they need not be contiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerId(pub u32);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ownership label of an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ownership {
    Public,
    Private(PlayerId),
}

/// A directed unit-capacity arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
    pub ownership: Ownership,
}

impl Arc {
    pub fn player(&self) -> Option<PlayerId> {
        match self.ownership {
            Ownership::Public => None,
            Ownership::Private(p) => Some(p),
        }
    }
}

/// A coalition of players, kept sorted for deterministic iteration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Coalition(BTreeSet<PlayerId>);

impl Coalition {
    pub fn empty() -> Self {
        Coalition(BTreeSet::new())
    }

    pub fn from_players<I: IntoIterator<Item = PlayerId>>(players: I) -> Self {
        Coalition(players.into_iter().collect())
    }

    pub fn insert(&mut self, p: PlayerId) {
        self.0.insert(p);
    }

    pub fn contains(&self, p: PlayerId) -> bool {
        self.0.contains(&p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = PlayerId> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.0.iter().map(|p| p.0.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// Maps the sorted player list of a network to bitmask positions, so that
/// coalitions can be handled as `u64` masks in exhaustive computations.
#[derive(Debug, Clone)]
pub struct PlayerIndex {
    players: Vec<PlayerId>,
}

impl PlayerIndex {
    pub fn new(net: &FlowNetwork) -> Self {
        PlayerIndex {
            players: net.players(),
        }
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn players(&self) -> &[PlayerId] {
        &self.players
    }

    pub fn position(&self, p: PlayerId) -> Option<usize> {
        self.players.binary_search(&p).ok()
    }

    pub fn full_mask(&self) -> u64 {
        if self.players.len() >= 64 {
            panic!("player index limited to 63 players");
        }
        (1u64 << self.players.len()) - 1
    }

    pub fn mask_of(&self, c: &Coalition) -> u64 {
        let mut m = 0u64;
        for p in c.iter() {
            let pos = self
                .position(p)
                .expect("coalition player missing from network");
            m |= 1 << pos;
        }
        m
    }

    pub fn coalition_of(&self, mask: u64) -> Coalition {
        let mut c = Coalition::empty();
        for (i, p) in self.players.iter().enumerate() {
            if mask & (1 << i) != 0 {
                c.insert(*p);
            }
        }
        c
    }
}

/// A unit-capacity flow network with labelled arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    vertices: Vec<String>,
    arcs: Vec<Arc>,
    source: VertexId,
    sink: VertexId,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
}

impl FlowNetwork {
    /// Builds a network from parts. Vertex names must be distinct, source
    /// and sink must be distinct declared vertices, and each player id may
    /// own at most one arc.
    pub fn new(
        vertices: Vec<String>,
        arcs: Vec<Arc>,
        source: VertexId,
        sink: VertexId,
    ) -> Result<Self, BuildError> {
        let n = vertices.len();
        let mut seen = BTreeSet::new();
        for name in &vertices {
            if !seen.insert(name.clone()) {
                return Err(BuildError::DuplicateVertex(name.clone()));
            }
        }
        if source.0 >= n || sink.0 >= n {
            return Err(BuildError::VertexOutOfRange);
        }
        if source == sink {
            return Err(BuildError::SourceIsSink);
        }
        let mut owners = BTreeSet::new();
        for arc in &arcs {
            if arc.tail.0 >= n || arc.head.0 >= n {
                return Err(BuildError::VertexOutOfRange);
            }
            if let Some(p) = arc.player() {
                if !owners.insert(p) {
                    return Err(BuildError::DuplicatePlayer(p));
                }
            }
        }
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        for (i, arc) in arcs.iter().enumerate() {
            out_arcs[arc.tail.0].push(ArcId(i));
            in_arcs[arc.head.0].push(ArcId(i));
        }
        Ok(FlowNetwork {
            vertices,
            arcs,
            source,
            sink,
            out_arcs,
            in_arcs,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id.0]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (ArcId, &Arc)> {
        self.arcs.iter().enumerate().map(|(i, a)| (ArcId(i), a))
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> {
        (0..self.arcs.len()).map(ArcId)
    }

    pub fn out_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.out_arcs[v.0]
    }

    pub fn in_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.in_arcs[v.0]
    }

    /// Sorted list of all player ids.
    pub fn players(&self) -> Vec<PlayerId> {
        let mut ps: Vec<PlayerId> = self.arcs.iter().filter_map(|a| a.player()).collect();
        ps.sort();
        ps
    }

    pub fn player_count(&self) -> usize {
        self.arcs.iter().filter(|a| a.player().is_some()).count()
    }

    /// The arc owned by a player.
    pub fn player_arc(&self, p: PlayerId) -> Option<ArcId> {
        self.arcs()
            .find(|(_, a)| a.player() == Some(p))
            .map(|(id, _)| id)
    }

    pub fn private_arc_ids(&self) -> BTreeSet<ArcId> {
        self.arcs()
            .filter(|(_, a)| a.player().is_some())
            .map(|(id, _)| id)
            .collect()
    }

    pub fn public_arc_ids(&self) -> BTreeSet<ArcId> {
        self.arcs()
            .filter(|(_, a)| a.player().is_none())
            .map(|(id, _)| id)
            .collect()
    }

    pub fn grand_coalition(&self) -> Coalition {
        Coalition::from_players(self.players())
    }

    /// Arc ids usable by a coalition: its private arcs plus all public arcs.
    pub fn usable_arcs(&self, coalition: &Coalition) -> Vec<ArcId> {
        self.arcs()
            .filter(|(_, a)| match a.player() {
                None => true,
                Some(p) => coalition.contains(p),
            })
            .map(|(id, _)| id)
            .collect()
    }

    /// Vertices reachable from `from` using only the given arcs.
    pub fn reachable(&self, from: VertexId, allowed: &dyn Fn(ArcId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = std::collections::VecDeque::new();
        seen[from.0] = true;
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            for &a in &self.out_arcs[v.0] {
                if !allowed(a) {
                    continue;
                }
                let h = self.arc(a).head;
                if !seen[h.0] {
                    seen[h.0] = true;
                    queue.push_back(h);
                }
            }
        }
        seen
    }

    /// Vertices that can reach `to` using only the given arcs.
    pub fn co_reachable(&self, to: VertexId, allowed: &dyn Fn(ArcId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = std::collections::VecDeque::new();
        seen[to.0] = true;
        queue.push_back(to);
        while let Some(v) = queue.pop_front() {
            for &a in &self.in_arcs[v.0] {
                if !allowed(a) {
                    continue;
                }
                let t = self.arc(a).tail;
                if !seen[t.0] {
                    seen[t.0] = true;
                    queue.push_back(t);
                }
            }
        }
        seen
    }
}

/// Errors from [`FlowNetwork::new`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("vertex id out of range")]
    VertexOutOfRange,
    #[error("source and sink must be distinct")]
    SourceIsSink,
    #[error("player {0} owns more than one arc")]
    DuplicatePlayer(PlayerId),
}

/// Errors from [`FlowNetwork::parse`], each carrying the 1-based line number.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: unknown directive {token:?}")]
    UnknownDirective { line: usize, token: String },
    #[error("line {line}: malformed {directive} directive: {reason}")]
    Malformed {
        line: usize,
        directive: &'static str,
        reason: String,
    },
    #[error("line {line}: duplicate {directive} directive")]
    DuplicateDirective { line: usize, directive: &'static str },
    #[error("line {line}: vertex token {token:?} exceeds the declared vertex count")]
    UndeclaredVertex { line: usize, token: String },
    #[error("line {line}: player {player} declared more than once")]
    DuplicatePlayer { line: usize, player: u32 },
    #[error("line {line}: source and sink must be distinct")]
    SourceIsSink { line: usize },
    #[error("missing {0} directive")]
    MissingDirective(&'static str),
    #[error("declared {declared} vertices but {used} distinct tokens appear")]
    VertexCountMismatch { declared: usize, used: usize },
}

impl FlowNetwork {
    /// Parses the instance text format.
    ///
    /// Directives, one per line: `vertices <n>`, `source <tok>`,
    /// `sink <tok>`, `arc <tail> <head> public`,
    /// `arc <tail> <head> private <player-id>`. `#` starts a comment; blank
    /// lines are ignored. Vertex tokens are introduced by first use and the
    /// distinct-token count must equal the declared count.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut declared: Option<usize> = None;
        let mut source_tok: Option<String> = None;
        let mut sink_tok: Option<String> = None;
        let mut vertices: Vec<String> = Vec::new();
        let mut arcs: Vec<(String, String, Ownership)> = Vec::new();
        let mut players: BTreeSet<u32> = BTreeSet::new();

        // Resolves a vertex token against the declared budget.
        fn intern(
            vertices: &mut Vec<String>,
            declared: Option<usize>,
            tok: &str,
            line: usize,
        ) -> Result<(), ParseError> {
            if vertices.iter().any(|v| v == tok) {
                return Ok(());
            }
            if let Some(n) = declared {
                if vertices.len() >= n {
                    return Err(ParseError::UndeclaredVertex {
                        line,
                        token: tok.to_string(),
                    });
                }
            }
            vertices.push(tok.to_string());
            Ok(())
        }

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            match fields[0] {
                "vertices" => {
                    if declared.is_some() {
                        return Err(ParseError::DuplicateDirective {
                            line,
                            directive: "vertices",
                        });
                    }
                    if fields.len() != 2 {
                        return Err(ParseError::Malformed {
                            line,
                            directive: "vertices",
                            reason: "expected one count argument".into(),
                        });
                    }
                    let n: usize = fields[1].parse().map_err(|_| ParseError::Malformed {
                        line,
                        directive: "vertices",
                        reason: format!("{:?} is not a count", fields[1]),
                    })?;
                    if vertices.len() > n {
                        return Err(ParseError::VertexCountMismatch {
                            declared: n,
                            used: vertices.len(),
                        });
                    }
                    declared = Some(n);
                }
                "source" => {
                    if source_tok.is_some() {
                        return Err(ParseError::DuplicateDirective {
                            line,
                            directive: "source",
                        });
                    }
                    if fields.len() != 2 {
                        return Err(ParseError::Malformed {
                            line,
                            directive: "source",
                            reason: "expected one vertex token".into(),
                        });
                    }
                    intern(&mut vertices, declared, fields[1], line)?;
                    source_tok = Some(fields[1].to_string());
                }
                "sink" => {
                    if sink_tok.is_some() {
                        return Err(ParseError::DuplicateDirective {
                            line,
                            directive: "sink",
                        });
                    }
                    if fields.len() != 2 {
                        return Err(ParseError::Malformed {
                            line,
                            directive: "sink",
                            reason: "expected one vertex token".into(),
                        });
                    }
                    intern(&mut vertices, declared, fields[1], line)?;
                    let tok = fields[1].to_string();
                    if source_tok.as_deref() == Some(tok.as_str()) {
                        return Err(ParseError::SourceIsSink { line });
                    }
                    sink_tok = Some(tok);
                }
                "arc" => {
                    let ownership = match fields.len() {
                        4 if fields[3] == "public" => Ownership::Public,
                        5 if fields[3] == "private" => {
                            let id: u32 =
                                fields[4].parse().map_err(|_| ParseError::Malformed {
                                    line,
                                    directive: "arc",
                                    reason: format!("{:?} is not a player id", fields[4]),
                                })?;
                            if id == 0 {
                                return Err(ParseError::Malformed {
                                    line,
                                    directive: "arc",
                                    reason: "player ids are positive".into(),
                                });
                            }
                            if !players.insert(id) {
                                return Err(ParseError::DuplicatePlayer { line, player: id });
                            }
                            Ownership::Private(PlayerId(id))
                        }
                        _ => {
                            return Err(ParseError::Malformed {
                                line,
                                directive: "arc",
                                reason: "expected `arc <tail> <head> public` or \
                                         `arc <tail> <head> private <player-id>`"
                                    .into(),
                            })
                        }
                    };
                    intern(&mut vertices, declared, fields[1], line)?;
                    intern(&mut vertices, declared, fields[2], line)?;
                    arcs.push((fields[1].to_string(), fields[2].to_string(), ownership));
                }
                other => {
                    return Err(ParseError::UnknownDirective {
                        line,
                        token: other.to_string(),
                    })
                }
            }
        }

        let declared = declared.ok_or(ParseError::MissingDirective("vertices"))?;
        let source_tok = source_tok.ok_or(ParseError::MissingDirective("source"))?;
        let sink_tok = sink_tok.ok_or(ParseError::MissingDirective("sink"))?;
        if vertices.len() != declared {
            return Err(ParseError::VertexCountMismatch {
                declared,
                used: vertices.len(),
            });
        }

        let vid = |tok: &str| VertexId(vertices.iter().position(|v| v == tok).unwrap());
        let source = vid(&source_tok);
        let sink = vid(&sink_tok);
        let arcs: Vec<Arc> = arcs
            .iter()
            .map(|(t, h, o)| Arc {
                tail: vid(t),
                head: vid(h),
                ownership: *o,
            })
            .collect();

        FlowNetwork::new(vertices, arcs, source, sink).map_err(|e| match e {
            // new() re-checks invariants the parser already enforced; only
            // reachable build errors are mapped, the rest cannot occur.
            BuildError::SourceIsSink => ParseError::SourceIsSink { line: 0 },
            BuildError::DuplicatePlayer(p) => ParseError::DuplicatePlayer {
                line: 0,
                player: p.0,
            },
            BuildError::DuplicateVertex(_) | BuildError::VertexOutOfRange => {
                unreachable!("parser interns vertices")
            }
        })
    }

    /// Canonical serialization: `vertices`, `source`, `sink`, then arcs in
    /// id order. Parsing the output reproduces the network exactly when the
    /// network itself came from the parser or the canonical builders.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("vertices {}\n", self.vertices.len()));
        out.push_str(&format!("source {}\n", self.vertex_name(self.source)));
        out.push_str(&format!("sink {}\n", self.vertex_name(self.sink)));
        for (_, arc) in self.arcs() {
            let tail = self.vertex_name(arc.tail);
            let head = self.vertex_name(arc.head);
            match arc.ownership {
                Ownership::Public => out.push_str(&format!("arc {} {} public\n", tail, head)),
                Ownership::Private(p) => {
                    out.push_str(&format!("arc {} {} private {}\n", tail, head, p.0))
                }
            }
        }
        out
    }
}

/// A single structural violation found by [`FlowNetwork::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A source-sink path consisting of public arcs only.
    PublicPath { arcs: Vec<ArcId> },
    /// An arc lying on no source-sink path.
    OffPathArc { arc: ArcId },
}

/// Validation outcome; an empty violation list means both assumptions hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// True when the public-path enumeration stopped at the cap.
    pub truncated: bool,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

const PUBLIC_PATH_CAP: usize = 100;

impl FlowNetwork {
    /// Checks both structural assumptions and reports violations as data.
    ///
    /// All-public source-sink paths are enumerated up to a cap (the count can
    /// be exponential); arcs on no source-sink path are reported one by one.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut truncated = false;

        // Assumption on private coverage: enumerate all-public s-t paths by
        // DFS over the public subgraph, smallest arc id first.
        let mut stack: Vec<ArcId> = Vec::new();
        let mut on_path = vec![false; self.vertex_count()];
        let mut found = Vec::new();
        self.public_path_dfs(
            self.source,
            &mut stack,
            &mut on_path,
            &mut found,
            &mut truncated,
        );
        for arcs in found {
            violations.push(Violation::PublicPath { arcs });
        }

        // Every arc must lie on some s-t path: tail reachable from the
        // source and head co-reachable from the sink.
        let all = |_: ArcId| true;
        let from_s = self.reachable(self.source, &all);
        let to_t = self.co_reachable(self.sink, &all);
        for (id, arc) in self.arcs() {
            let on_some_path = from_s[arc.tail.0] && to_t[arc.head.0] && arc.tail != arc.head;
            if !on_some_path {
                violations.push(Violation::OffPathArc { arc: id });
            }
        }

        ValidationReport {
            violations,
            truncated,
        }
    }

    fn public_path_dfs(
        &self,
        v: VertexId,
        stack: &mut Vec<ArcId>,
        on_path: &mut Vec<bool>,
        found: &mut Vec<Vec<ArcId>>,
        truncated: &mut bool,
    ) {
        if found.len() >= PUBLIC_PATH_CAP {
            *truncated = true;
            return;
        }
        if v == self.sink {
            found.push(stack.clone());
            return;
        }
        on_path[v.0] = true;
        for &a in self.out_arcs(v) {
            if self.arc(a).player().is_some() {
                continue;
            }
            let h = self.arc(a).head;
            if on_path[h.0] {
                continue;
            }
            stack.push(a);
            self.public_path_dfs(h, stack, on_path, found, truncated);
            stack.pop();
        }
        on_path[v.0] = false;
    }
}

/// Result of [`FlowNetwork::preprocess`]: the reduced network plus a log of
/// everything that was deleted, in terms of the original ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preprocessed {
    pub network: FlowNetwork,
    pub removed_arcs: Vec<ArcId>,
    pub removed_players: Vec<PlayerId>,
    pub removed_vertices: Vec<String>,
}

/// Errors from [`FlowNetwork::preprocess`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("network has an all-public source-sink path through arcs {0:?}")]
    PublicPath(Vec<ArcId>),
}

impl FlowNetwork {
    /// Deletes every arc lying on no source-sink path (and any non-terminal
    /// vertex left isolated), then rejects the result if an all-public
    /// source-sink path remains. Idempotent: preprocessing a preprocessed
    /// network deletes nothing.
    pub fn preprocess(&self) -> Result<Preprocessed, PreprocessError> {
        let all = |_: ArcId| true;
        let from_s = self.reachable(self.source, &all);
        let to_t = self.co_reachable(self.sink, &all);

        let mut removed_arcs = Vec::new();
        let mut removed_players = Vec::new();
        let mut kept: Vec<(ArcId, &Arc)> = Vec::new();
        for (id, arc) in self.arcs() {
            let on_some_path = from_s[arc.tail.0] && to_t[arc.head.0] && arc.tail != arc.head;
            if on_some_path {
                kept.push((id, arc));
            } else {
                removed_arcs.push(id);
                if let Some(p) = arc.player() {
                    removed_players.push(p);
                }
            }
        }

        let mut used = vec![false; self.vertex_count()];
        used[self.source.0] = true;
        used[self.sink.0] = true;
        for (_, arc) in &kept {
            used[arc.tail.0] = true;
            used[arc.head.0] = true;
        }
        let mut removed_vertices = Vec::new();
        let mut new_index = vec![usize::MAX; self.vertex_count()];
        let mut vertices = Vec::new();
        for v in self.vertex_ids() {
            if used[v.0] {
                new_index[v.0] = vertices.len();
                vertices.push(self.vertex_name(v).to_string());
            } else {
                removed_vertices.push(self.vertex_name(v).to_string());
            }
        }

        let arcs: Vec<Arc> = kept
            .iter()
            .map(|(_, a)| Arc {
                tail: VertexId(new_index[a.tail.0]),
                head: VertexId(new_index[a.head.0]),
                ownership: a.ownership,
            })
            .collect();
        let network = FlowNetwork::new(
            vertices,
            arcs,
            VertexId(new_index[self.source.0]),
            VertexId(new_index[self.sink.0]),
        )
        .expect("reduction preserves build invariants");

        let report = network.validate();
        for v in &report.violations {
            if let Violation::PublicPath { arcs } = v {
                return Err(PreprocessError::PublicPath(arcs.clone()));
            }
        }

        Ok(Preprocessed {
            network,
            removed_arcs,
            removed_players,
            removed_vertices,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INSTANCE_A: &str = "vertices 3\nsource s\nsink t\narc s v public\narc v t private 1\narc v t private 2\n";
    const INSTANCE_B: &str = "vertices 2\nsource s\nsink t\narc s t private 1\narc s t private 2\n";

    #[test]
    fn parses_golden_instance() {
        let net = FlowNetwork::parse(INSTANCE_A).unwrap();
        assert_eq!(net.vertex_count(), 3);
        assert_eq!(net.arc_count(), 3);
        assert_eq!(net.players(), vec![PlayerId(1), PlayerId(2)]);
        assert_eq!(net.vertex_name(net.source()), "s");
        assert_eq!(net.vertex_name(net.sink()), "t");
        assert_eq!(net.arc(ArcId(0)).ownership, Ownership::Public);
        assert_eq!(
            net.arc(ArcId(1)).ownership,
            Ownership::Private(PlayerId(1))
        );
    }

    #[test]
    fn round_trip_is_identity() {
        for text in [INSTANCE_A, INSTANCE_B] {
            let net = FlowNetwork::parse(text).unwrap();
            let reparsed = FlowNetwork::parse(&net.serialize()).unwrap();
            assert_eq!(net, reparsed);
            assert_eq!(net.serialize(), reparsed.serialize());
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a comment\nvertices 2\n\nsource s # trailing\nsink t\narc s t private 7\n";
        let net = FlowNetwork::parse(text).unwrap();
        assert_eq!(net.players(), vec![PlayerId(7)]);
    }

    #[test]
    fn duplicate_player_is_rejected_with_line() {
        let text = "vertices 2\nsource s\nsink t\narc s t private 1\narc s t private 1\n";
        match FlowNetwork::parse(text) {
            Err(ParseError::DuplicatePlayer { line, player }) => {
                assert_eq!(line, 5);
                assert_eq!(player, 1);
            }
            other => panic!("expected duplicate-player error, got {:?}", other),
        }
    }

    #[test]
    fn extra_vertex_token_is_rejected() {
        let text = "vertices 2\nsource s\nsink t\narc s u public\n";
        match FlowNetwork::parse(text) {
            Err(ParseError::UndeclaredVertex { line, token }) => {
                assert_eq!(line, 4);
                assert_eq!(token, "u");
            }
            other => panic!("expected undeclared-vertex error, got {:?}", other),
        }
    }

    #[test]
    fn missing_source_is_rejected() {
        let text = "vertices 2\nsink t\narc t t public\n";
        assert!(matches!(
            FlowNetwork::parse(text),
            Err(ParseError::MissingDirective("source"))
        ));
    }

    #[test]
    fn validate_flags_public_path() {
        let text = "vertices 2\nsource s\nsink t\narc s t private 1\narc s t public\n";
        let net = FlowNetwork::parse(text).unwrap();
        let report = net.validate();
        assert_eq!(
            report.violations,
            vec![Violation::PublicPath {
                arcs: vec![ArcId(1)]
            }]
        );
    }

    #[test]
    fn validate_flags_off_path_arc() {
        let text =
            "vertices 3\nsource s\nsink t\narc s t private 1\narc s t private 2\narc t u public\n";
        let net = FlowNetwork::parse(text).unwrap();
        let report = net.validate();
        assert_eq!(
            report.violations,
            vec![Violation::OffPathArc { arc: ArcId(2) }]
        );
    }

    #[test]
    fn preprocess_removes_dead_arc_and_vertex() {
        let text =
            "vertices 3\nsource s\nsink t\narc s t private 1\narc s t private 2\narc t u private 3\n";
        let net = FlowNetwork::parse(text).unwrap();
        let pre = net.preprocess().unwrap();
        assert_eq!(pre.removed_arcs, vec![ArcId(2)]);
        assert_eq!(pre.removed_players, vec![PlayerId(3)]);
        assert_eq!(pre.removed_vertices, vec!["u".to_string()]);
        assert_eq!(pre.network.arc_count(), 2);
        assert!(pre.network.validate().is_clean());

        // Idempotent: a second pass removes nothing.
        let again = pre.network.preprocess().unwrap();
        assert!(again.removed_arcs.is_empty());
        assert_eq!(again.network, pre.network);
    }

    #[test]
    fn preprocess_rejects_public_path() {
        let text = "vertices 2\nsource s\nsink t\narc s t public\narc s t private 1\n";
        let net = FlowNetwork::parse(text).unwrap();
        assert_eq!(
            net.preprocess(),
            Err(PreprocessError::PublicPath(vec![ArcId(0)]))
        );
    }

    #[test]
    fn self_loop_is_deleted_by_preprocess() {
        let text = "vertices 3\nsource s\nsink t\narc s t private 1\narc v v public\narc s v public\n";
        let net = FlowNetwork::parse(text).unwrap();
        let report = net.validate();
        // Both the self loop and the dangling public arc are off every path.
        assert_eq!(report.violations.len(), 2);
        let pre = net.preprocess().unwrap();
        assert_eq!(pre.network.arc_count(), 1);
    }

    #[test]
    fn player_index_masks_round_trip() {
        let net = FlowNetwork::parse(INSTANCE_B).unwrap();
        let index = PlayerIndex::new(&net);
        let c = Coalition::from_players([PlayerId(2)]);
        let mask = index.mask_of(&c);
        assert_eq!(mask, 0b10);
        assert_eq!(index.coalition_of(mask), c);
        assert_eq!(index.full_mask(), 0b11);
    }
}
