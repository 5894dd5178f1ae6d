//! Nucleon solver: sequential exact LPs over a lazily separated constraint
//! pool.
//!
//! The nucleon refines the multiplicative core of the auxiliary game (the
//! game whose grand-coalition value is lowered to the private path family
//! size, so that the core is nonempty): round after round it maximizes the
//! worst satisfaction ratio `x(S) / value(S)` over the coalitions whose
//! payoff still varies on the current face, then restricts the face to the
//! maximizers. Enumerating coalitions is hopeless beyond toy sizes, so each
//! round is solved with two flow-based separation oracles instead:
//!
//! * around every private arc whose payoff still varies, sweep families of
//!   pairwise arc-disjoint source-sink paths avoiding that arc, picked by a
//!   min-cost flow priced at the current allocation;
//! * for every jump pair whose potential difference still varies, sweep
//!   families forced to route one extra unit entering the network at the
//!   jump's end vertex and leaving at its start vertex, which mimics a path
//!   using the jump without enumerating the jump's interior.
//!
//! The owner sets of the cheapest families dominate the satisfaction ratio
//! of every still-varying coalition, so certifying the finitely many oracle
//! candidates certifies the whole round. Fixedness itself is decided by
//! exact range queries: a private arc is fixed when its payoff has zero
//! width over the face, a jump pair when the owner total of a realization of
//! its representative jump has zero width (the realization ties the
//! potential difference of the pair to a linear function of the allocation).
//!
//! The constraint pool carries one reachability potential per vertex next to
//! the player payoffs. The potential rows state that potentials start at
//! zero on the source, reach one at the sink, and never climb by more than
//! the arc price along an arc; projecting away the potentials yields exactly
//! the auxiliary core, so the pool needs no path enumeration. Rows frozen by
//! finished rounds are re-checked lazily: every LP answer is validated
//! against the oracles of all earlier rounds before it is trusted.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};
use thiserror::Error;

use crate::coresolve::{self, Allocation, CoreError};
use crate::flowcore::{self, WeightedDigraph};
use crate::lpexact::{dot, solve_lp, Constraint, ConstraintPool, LpOutcome, Sense};
use crate::netmodel::{ArcId, FlowNetwork, PlayerIndex, VertexId};
use crate::pathstruct::{
    enumerate_jumps, jump_pairs, realize_jump, shortest_path_to_sink, BaseSystem, JumpError,
    JumpRealization,
};
use crate::{rat, rat_int, Rat};

/// Errors from the nucleon solver.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Jumps(#[from] JumpError),
}

/// Final answer of the recursion: a single allocation once every payoff is
/// pinned down, or the whole core (as its vertex list) when nothing ever
/// distinguishes core points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NucleonSolution {
    Point(Allocation),
    CoreFace(Vec<Allocation>),
}

impl NucleonSolution {
    pub fn point(&self) -> Option<&Allocation> {
        match self {
            NucleonSolution::Point(a) => Some(a),
            NucleonSolution::CoreFace(_) => None,
        }
    }

    fn scaled(&self, factor: &Rat) -> NucleonSolution {
        match self {
            NucleonSolution::Point(a) => NucleonSolution::Point(a.scaled(factor)),
            // Positive scaling preserves the sorted vertex order.
            NucleonSolution::CoreFace(vs) => {
                NucleonSolution::CoreFace(vs.iter().map(|v| v.scaled(factor)).collect())
            }
        }
    }
}

/// Transcript of one solved round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundLog {
    /// Optimal worst satisfaction ratio minus one; strictly increasing.
    pub epsilon: Rat,
    /// A maximizer of the round LP, in the auxiliary scale.
    pub optimum: Allocation,
    /// Coalition rows the separation oracles generated for this round.
    pub cuts_added: usize,
    /// Private arcs with zero payoff width after the round.
    pub fixed_players_after: usize,
    /// Jump pairs with zero potential-difference width after the round.
    pub fixed_pairs_after: usize,
}

/// Full nucleon computation: per-round transcripts plus the answer in both
/// the auxiliary scale (summing to the private family size) and the original
/// scale (summing to the unrestricted family size).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NucleonReport {
    pub sigma_private: u64,
    pub sigma_all: u64,
    /// Ratio of the two family sizes; rescales auxiliary to original.
    pub scale_factor: Rat,
    /// True when the recursion never separates core points, so the answer
    /// is the whole core; happens exactly at private family size one.
    pub whole_core: bool,
    pub rounds: Vec<RoundLog>,
    pub auxiliary: NucleonSolution,
    pub original: NucleonSolution,
}

impl NucleonReport {
    pub fn epsilons(&self) -> Vec<Rat> {
        self.rounds.iter().map(|r| r.epsilon.clone()).collect()
    }
}

/// Computes the nucleon of the flow game on `net`.
///
/// Validates the network, solves the round recursion on the auxiliary game,
/// and rescales the answer back to the original game. Whenever the private
/// family size is at least two the answer is a single allocation.
pub fn nucleon(net: &FlowNetwork) -> Result<NucleonReport, EngineError> {
    let (private, all) = coresolve::checked_sigmas(net)?;
    let index = PlayerIndex::new(net);
    let factor = rat(all.value as i64, private.value as i64);
    let structure = Structure::analyze(net, &index)?;

    let (rounds, auxiliary) = if private.value == 1 {
        let (rounds, vertices) = whole_core_rounds(net, &index, &structure);
        let solution = if vertices.len() == 1 {
            NucleonSolution::Point(vertices.into_iter().next().expect("one vertex"))
        } else {
            NucleonSolution::CoreFace(vertices)
        };
        (rounds, solution)
    } else {
        let mut engine = Engine::new(net, &index, structure, private.value, all.value);
        let (rounds, point) = engine.run();
        (rounds, NucleonSolution::Point(point))
    };

    let original = auxiliary.scaled(&factor);
    Ok(NucleonReport {
        sigma_private: private.value,
        sigma_all: all.value,
        scale_factor: factor,
        whole_core: private.value == 1,
        rounds,
        auxiliary,
        original,
    })
}

/// Per jump pair: the arcs to drop from the oracle network while the pair is
/// unfixed, the owners of a representative jump, and the linear functional
/// whose face range decides fixedness.
#[derive(Debug, Clone)]
struct PairData {
    /// Union of the off-base arcs over every jump between the pair.
    arcs: BTreeSet<ArcId>,
    /// Owner mask of the representative jump's own arcs.
    rep_mask: u64,
    /// Owner indicator of the representative's realization, over players.
    functional: Vec<Rat>,
    /// Added to the functional value to obtain the potential difference:
    /// minus one for a path realization, zero for a cycle realization.
    offset: Rat,
}

/// Base path system and jump-pair data shared by fixedness queries and the
/// separation oracles.
#[derive(Debug, Clone)]
struct Structure {
    pairs: BTreeMap<(VertexId, VertexId), PairData>,
}

impl Structure {
    fn analyze(net: &FlowNetwork, index: &PlayerIndex) -> Result<Structure, EngineError> {
        // Validation already ruled out all-public escape paths.
        let base = BaseSystem::build(net).expect("validated network has a bounded private family");
        let mut pairs = BTreeMap::new();
        for (key, rep) in jump_pairs(net, &base)? {
            let realization = realize_jump(net, &base, &rep);
            let offset = match realization {
                JumpRealization::Path { .. } => -Rat::one(),
                JumpRealization::Cycle { .. } => Rat::zero(),
            };
            pairs.insert(
                key,
                PairData {
                    arcs: BTreeSet::new(),
                    rep_mask: owner_mask(net, index, &rep.arcs),
                    functional: owner_indicator(net, index, realization.arcs()),
                    offset,
                },
            );
        }
        for jump in enumerate_jumps(net, &base)? {
            pairs
                .get_mut(&(jump.from, jump.to))
                .expect("every jump pair is represented")
                .arcs
                .extend(jump.arcs.iter().copied());
        }
        Ok(Structure { pairs })
    }
}

/// Bitmask of the owners of the private arcs among `arcs`.
fn owner_mask(net: &FlowNetwork, index: &PlayerIndex, arcs: &[ArcId]) -> u64 {
    let mut mask = 0u64;
    for &a in arcs {
        if let Some(p) = net.arc(a).player() {
            mask |= 1 << index.position(p).expect("player indexed");
        }
    }
    mask
}

/// Indicator vector (over player positions) of the owners among `arcs`.
fn owner_indicator(net: &FlowNetwork, index: &PlayerIndex, arcs: &[ArcId]) -> Vec<Rat> {
    let mut coeffs = vec![Rat::zero(); index.len()];
    for &a in arcs {
        if let Some(p) = net.arc(a).player() {
            coeffs[index.position(p).expect("player indexed")] = Rat::one();
        }
    }
    coeffs
}

fn mask_total(x: &[Rat], mask: u64) -> Rat {
    let mut total = Rat::zero();
    for (i, v) in x.iter().enumerate() {
        if mask & (1 << i) != 0 {
            total += v;
        }
    }
    total
}

/// Copies a row into a wider variable space, padding with zeros.
fn widen_row(c: &Constraint, dims: usize) -> Constraint {
    let mut coeffs = c.coeffs.clone();
    coeffs.resize(dims, Rat::zero());
    Constraint {
        coeffs,
        relation: c.relation,
        rhs: c.rhs.clone(),
        label: c.label.clone(),
    }
}

/// An oracle-produced coalition with its exact value and excess ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    mask: u64,
    gamma: u64,
    /// `x(S) / value(S) - 1` at the queried point.
    excess: Rat,
}

/// Unfixed sets a finished round optimized over, kept for re-validation.
#[derive(Debug, Clone)]
struct RoundRecord {
    epsilon: Rat,
    unfixed_players: BTreeSet<ArcId>,
    unfixed_pairs: BTreeSet<(VertexId, VertexId)>,
}

struct Engine<'a> {
    net: &'a FlowNetwork,
    index: PlayerIndex,
    structure: Structure,
    sigma_all: u64,
    /// Pool variables: one payoff per player, then one potential per vertex.
    dims: usize,
    pool: ConstraintPool,
    records: Vec<RoundRecord>,
    fixed_players: BTreeMap<ArcId, Rat>,
    fixed_pairs: BTreeMap<(VertexId, VertexId), Rat>,
    gamma_memo: BTreeMap<u64, u64>,
}

impl<'a> Engine<'a> {
    fn new(
        net: &'a FlowNetwork,
        index: &PlayerIndex,
        structure: Structure,
        sigma_private: u64,
        sigma_all: u64,
    ) -> Engine<'a> {
        let n = index.len();
        let dims = n + net.vertex_count();
        let mut pool = ConstraintPool::new(dims);

        let mut total = vec![Rat::zero(); dims];
        for slot in total.iter_mut().take(n) {
            *slot = Rat::one();
        }
        pool.push(Constraint::eq(
            total,
            rat_int(sigma_private as i64),
            "payoff-total",
        ));
        for i in 0..n {
            let mut coeffs = vec![Rat::zero(); dims];
            coeffs[i] = Rat::one();
            pool.push(Constraint::ge(coeffs, Rat::zero(), format!("nonneg-p{}", i)));
        }
        // Potentials climb by at most the arc price along every arc, start
        // at zero on the source and reach one at the sink; projecting the
        // potentials away leaves exactly the auxiliary core.
        for (id, arc) in net.arcs() {
            let mut coeffs = vec![Rat::zero(); dims];
            if let Some(p) = arc.player() {
                coeffs[index.position(p).expect("player indexed")] = Rat::one();
            }
            coeffs[n + arc.tail.0] += Rat::one();
            coeffs[n + arc.head.0] -= Rat::one();
            pool.push(Constraint::ge(coeffs, Rat::zero(), format!("step-a{}", id.0)));
        }
        let mut coeffs = vec![Rat::zero(); dims];
        coeffs[n + net.source().0] = Rat::one();
        pool.push(Constraint::eq(coeffs, Rat::zero(), "potential-source"));
        let mut coeffs = vec![Rat::zero(); dims];
        coeffs[n + net.sink().0] = Rat::one();
        pool.push(Constraint::eq(coeffs, Rat::one(), "potential-sink"));

        Engine {
            net,
            index: index.clone(),
            structure,
            sigma_all,
            dims,
            pool,
            records: Vec::new(),
            fixed_players: BTreeMap::new(),
            fixed_pairs: BTreeMap::new(),
            gamma_memo: BTreeMap::new(),
        }
    }

    fn player_count(&self) -> usize {
        self.index.len()
    }

    fn gamma_of(&mut self, mask: u64) -> u64 {
        if let Some(&v) = self.gamma_memo.get(&mask) {
            return v;
        }
        let coalition = self.index.coalition_of(mask);
        let v = flowcore::coalition_value(self.net, &coalition);
        self.gamma_memo.insert(mask, v);
        v
    }

    /// Price of an arc under the current allocation: the owner's payoff for
    /// a private arc, zero for a public one.
    fn price(&self, x: &[Rat], a: ArcId) -> Rat {
        match self.net.arc(a).player() {
            None => Rat::zero(),
            Some(p) => x[self.index.position(p).expect("player indexed")].clone(),
        }
    }

    /// Owner mask of the positively used arcs of a flow, ignoring the
    /// auxiliary arcs appended after the real ones.
    fn support_mask(&self, real: &[ArcId], flow: &[u64]) -> u64 {
        let mut mask = 0u64;
        for (i, &a) in real.iter().enumerate() {
            if flow[i] > 0 {
                if let Some(p) = self.net.arc(a).player() {
                    mask |= 1 << self.index.position(p).expect("player indexed");
                }
            }
        }
        mask
    }

    /// Cheapest family of `tau` pairwise arc-disjoint source-sink paths in
    /// the kept arcs minus `skip`, priced at `x`; `None` when none exists.
    fn cheapest_family(&self, x: &[Rat], kept: &[ArcId], skip: ArcId, tau: u64) -> Option<u64> {
        let mut g = WeightedDigraph::new(self.net.vertex_count());
        let mut real = Vec::new();
        for &a in kept {
            if a == skip {
                continue;
            }
            let arc = self.net.arc(a);
            g.add_arc(arc.tail.0, arc.head.0, 1, self.price(x, a));
            real.push(a);
        }
        let flow = g.min_cost_flow(self.net.source().0, self.net.sink().0, tau)?;
        Some(self.support_mask(&real, &flow.flow))
    }

    /// Cheapest routing of `tau` source-sink paths together with one extra
    /// unit entering the kept arcs at `to` and leaving at `from`, all
    /// pairwise arc-disjoint. The extra unit plays the role of a path using
    /// a `from`-to-`to` jump, with the jump's interior left out.
    fn cheapest_detour_family(
        &self,
        x: &[Rat],
        kept: &[ArcId],
        from: VertexId,
        to: VertexId,
        tau: u64,
    ) -> Option<u64> {
        let vertex_count = self.net.vertex_count();
        let super_source = vertex_count;
        let super_sink = vertex_count + 1;
        let mut g = WeightedDigraph::new(vertex_count + 2);
        let mut real = Vec::new();
        for &a in kept {
            let arc = self.net.arc(a);
            g.add_arc(arc.tail.0, arc.head.0, 1, self.price(x, a));
            real.push(a);
        }
        g.add_arc(super_source, self.net.source().0, tau, Rat::zero());
        g.add_arc(super_source, to.0, 1, Rat::zero());
        g.add_arc(from.0, super_sink, 1, Rat::zero());
        g.add_arc(self.net.sink().0, super_sink, tau, Rat::zero());
        let flow = g.min_cost_flow(super_source, super_sink, tau + 1)?;
        Some(self.support_mask(&real, &flow.flow))
    }

    /// Owner masks proposed by both oracles at `x` for the given unfixed
    /// sets. Arcs lying on any jump of an unfixed pair are dropped from the
    /// oracle network: their payoff contribution is not pinned down yet, so
    /// families must reach such jumps only through the detour oracle.
    fn candidate_masks(
        &self,
        x: &[Rat],
        unfixed_players: &BTreeSet<ArcId>,
        unfixed_pairs: &BTreeSet<(VertexId, VertexId)>,
    ) -> BTreeSet<u64> {
        let mut removed: BTreeSet<ArcId> = BTreeSet::new();
        for key in unfixed_pairs {
            removed.extend(self.structure.pairs[key].arcs.iter().copied());
        }
        let kept: Vec<ArcId> = self
            .net
            .arc_ids()
            .filter(|a| !removed.contains(a))
            .collect();

        let mut masks = BTreeSet::new();
        for &e in unfixed_players {
            let e_bit = 1u64
                << self
                    .index
                    .position(self.net.arc(e).player().expect("private arc"))
                    .expect("player indexed");
            // Family sizes are monotone: once tau is infeasible, stop.
            for tau in 0..=self.sigma_all {
                match self.cheapest_family(x, &kept, e, tau) {
                    None => break,
                    Some(mask) => {
                        masks.insert(mask | e_bit);
                    }
                }
            }
        }
        for key in unfixed_pairs {
            let data = &self.structure.pairs[key];
            // The forced extra unit can push the family one past the
            // unrestricted family size.
            for tau in 1..=self.sigma_all + 1 {
                match self.cheapest_detour_family(x, &kept, key.0, key.1, tau) {
                    None => break,
                    Some(mask) => {
                        masks.insert(mask | data.rep_mask);
                    }
                }
            }
        }
        masks
    }

    /// Oracle candidates with exact values and excesses at `x`, skipping the
    /// grand coalition and worthless coalitions.
    fn candidates(
        &mut self,
        x: &[Rat],
        unfixed_players: &BTreeSet<ArcId>,
        unfixed_pairs: &BTreeSet<(VertexId, VertexId)>,
    ) -> Vec<Candidate> {
        let masks = self.candidate_masks(x, unfixed_players, unfixed_pairs);
        let full = self.index.full_mask();
        let mut out = Vec::new();
        for mask in masks {
            if mask == 0 || mask == full {
                continue;
            }
            let gamma = self.gamma_of(mask);
            if gamma == 0 {
                continue;
            }
            let g = rat_int(gamma as i64);
            let excess = (mask_total(x, mask) - &g) / &g;
            out.push(Candidate {
                mask,
                gamma,
                excess,
            });
        }
        out
    }

    /// Frozen-round row for a candidate: `x(S) >= (1 + epsilon) value(S)`.
    fn frozen_row(&self, round: usize, cand: &Candidate, epsilon: &Rat) -> Constraint {
        let mut coeffs = vec![Rat::zero(); self.dims];
        for i in 0..self.player_count() {
            if cand.mask & (1 << i) != 0 {
                coeffs[i] = Rat::one();
            }
        }
        let rhs = (Rat::one() + epsilon) * rat_int(cand.gamma as i64);
        Constraint::ge(coeffs, rhs, format!("r{}-S{}", round, cand.mask))
    }

    /// Checks a pool optimum against everything the pool keeps implicit:
    /// core membership (via a shortest source-sink path priced at `x`) and
    /// the guarantee level of every finished round (via the oracles on that
    /// round's unfixed sets). Returns rows to add when the point cheats.
    /// Rounds are checked oldest first because the oracle certificate for a
    /// round is only meaningful on points inside all earlier rounds' faces.
    fn face_violation(&mut self, x: &[Rat]) -> Option<Vec<Constraint>> {
        let alloc = Allocation::new(x.to_vec());
        let lengths = coresolve::arc_lengths(self.net, &self.index, &alloc);
        let (dist, path) =
            shortest_path_to_sink(self.net, &lengths).expect("sink reachable in validated network");
        if dist < Rat::one() {
            let mut coeffs = vec![Rat::zero(); self.dims];
            for &a in &path {
                if let Some(p) = self.net.arc(a).player() {
                    coeffs[self.index.position(p).expect("player indexed")] = Rat::one();
                }
            }
            let ids: Vec<String> = path.iter().map(|a| a.0.to_string()).collect();
            return Some(vec![Constraint::ge(
                coeffs,
                Rat::one(),
                format!("cut-{}", ids.join("-")),
            )]);
        }

        for round in 0..self.records.len() {
            let (epsilon, players, pairs) = {
                let record = &self.records[round];
                (
                    record.epsilon.clone(),
                    record.unfixed_players.clone(),
                    record.unfixed_pairs.clone(),
                )
            };
            let violated: Vec<Constraint> = self
                .candidates(x, &players, &pairs)
                .iter()
                .filter(|c| c.excess < epsilon)
                .map(|c| self.frozen_row(round, c, &epsilon))
                .collect();
            if !violated.is_empty() {
                return Some(violated);
            }
        }
        None
    }

    /// Optimizes over the pool and lazily repairs it until the answer
    /// survives every implicit check, so the returned optimum is exact over
    /// the current face.
    fn validated_optimum(&mut self, objective: &[Rat], sense: Sense) -> (Rat, Vec<Rat>) {
        loop {
            let (value, point) = match solve_lp(self.pool.rows(), self.dims, objective, sense) {
                LpOutcome::Optimal { value, point } => (value, point),
                other => panic!("pool optimization must stay solvable, got {:?}", other),
            };
            match self.face_violation(&point[..self.player_count()]) {
                None => return (value, point),
                Some(rows) => {
                    for row in rows {
                        assert!(self.pool.push(row), "violated row regenerated");
                    }
                }
            }
        }
    }

    /// Exact range of a linear functional of the payoffs over the face.
    fn functional_range(&mut self, functional: &[Rat]) -> (Rat, Rat) {
        let mut objective = functional.to_vec();
        objective.resize(self.dims, Rat::zero());
        let low = self.validated_optimum(&objective, Sense::Minimize).0;
        let high = self.validated_optimum(&objective, Sense::Maximize).0;
        (low, high)
    }

    /// Any point of the current face.
    fn face_point(&mut self) -> Vec<Rat> {
        let objective = vec![Rat::zero(); self.dims];
        self.validated_optimum(&objective, Sense::Maximize).1
    }

    /// Re-derives which private arcs and jump pairs are fixed on the
    /// current face. Fixed ones stay fixed because faces only shrink.
    fn recompute_fixed(&mut self) {
        let n = self.player_count();
        for i in 0..n {
            let arc = self
                .net
                .player_arc(self.index.players()[i])
                .expect("indexed players own arcs");
            if self.fixed_players.contains_key(&arc) {
                continue;
            }
            let mut functional = vec![Rat::zero(); n];
            functional[i] = Rat::one();
            let (low, high) = self.functional_range(&functional);
            if low == high {
                self.fixed_players.insert(arc, low);
            }
        }
        let keys: Vec<(VertexId, VertexId)> = self.structure.pairs.keys().copied().collect();
        for key in keys {
            if self.fixed_pairs.contains_key(&key) {
                continue;
            }
            let functional = self.structure.pairs[&key].functional.clone();
            let (low, high) = self.functional_range(&functional);
            if low == high {
                let difference = low + self.structure.pairs[&key].offset.clone();
                self.fixed_pairs.insert(key, difference);
            }
        }
    }

    fn unfixed_players(&self) -> BTreeSet<ArcId> {
        self.index
            .players()
            .iter()
            .filter_map(|&p| self.net.player_arc(p))
            .filter(|a| !self.fixed_players.contains_key(a))
            .collect()
    }

    fn unfixed_pairs(&self) -> BTreeSet<(VertexId, VertexId)> {
        self.structure
            .pairs
            .keys()
            .filter(|k| !self.fixed_pairs.contains_key(k))
            .copied()
            .collect()
    }

    /// Maximizes the round slack `epsilon` subject to
    /// `x(S) >= (1 + epsilon) value(S)` for the oracle-generated unfixed
    /// coalitions, repairing lazily until the oracles certify that no
    /// unfixed coalition sits below the optimum. Freezes the generated rows
    /// at the optimal level and records the round.
    fn solve_round(&mut self) -> RoundLog {
        let unfixed_players = self.unfixed_players();
        let unfixed_pairs = self.unfixed_pairs();
        let n = self.player_count();
        let rdims = self.dims + 1;
        let mut objective = vec![Rat::zero(); rdims];
        objective[rdims - 1] = Rat::one();

        // mask -> value, mirrored by one LP row each in `round_rows`.
        let mut round_cuts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut round_rows: Vec<Constraint> = Vec::new();

        loop {
            let rows: Vec<Constraint> = self
                .pool
                .rows()
                .iter()
                .map(|c| widen_row(c, rdims))
                .chain(round_rows.iter().cloned())
                .collect();
            match solve_lp(rows.iter(), rdims, &objective, Sense::Maximize) {
                LpOutcome::Unbounded => {
                    // No coalition row yet: seed with the candidates at any
                    // face point. The recursion only continues while some
                    // unfixed coalition has positive value, and the oracles
                    // always see such a coalition.
                    let probe = self.face_point();
                    let candidates = self.candidates(&probe[..n], &unfixed_players, &unfixed_pairs);
                    for c in &candidates {
                        add_round_cut(c, rdims, &mut round_cuts, &mut round_rows);
                    }
                    assert!(
                        !round_rows.is_empty(),
                        "an unfixed coalition with positive value must exist mid-recursion"
                    );
                }
                LpOutcome::Optimal { value, point } => {
                    let x: Vec<Rat> = point[..n].to_vec();
                    if let Some(rows) = self.face_violation(&x) {
                        for row in rows {
                            assert!(self.pool.push(row), "violated row regenerated");
                        }
                        continue;
                    }
                    let candidates = self.candidates(&x, &unfixed_players, &unfixed_pairs);
                    let violated: Vec<&Candidate> =
                        candidates.iter().filter(|c| c.excess < value).collect();
                    if violated.is_empty() {
                        // Oracle domination certifies optimality over every
                        // unfixed coalition, not just the generated ones.
                        let round = self.records.len();
                        for (&mask, &gamma) in &round_cuts {
                            let frozen = self.frozen_row(
                                round,
                                &Candidate {
                                    mask,
                                    gamma,
                                    excess: Rat::zero(),
                                },
                                &value,
                            );
                            assert!(self.pool.push(frozen), "round rows are fresh");
                        }
                        self.records.push(RoundRecord {
                            epsilon: value.clone(),
                            unfixed_players,
                            unfixed_pairs,
                        });
                        return RoundLog {
                            epsilon: value,
                            optimum: Allocation::new(x),
                            cuts_added: round_cuts.len(),
                            fixed_players_after: 0,
                            fixed_pairs_after: 0,
                        };
                    }
                    for c in violated {
                        add_round_cut(c, rdims, &mut round_cuts, &mut round_rows);
                    }
                }
                LpOutcome::Infeasible => panic!("round faces are never empty"),
            }
        }
    }

    /// Runs the recursion until every payoff is pinned down; returns the
    /// per-round transcript and the unique remaining allocation.
    fn run(&mut self) -> (Vec<RoundLog>, Allocation) {
        let n = self.player_count();
        self.recompute_fixed();
        let start = self.face_point();
        let mut logs = vec![RoundLog {
            epsilon: Rat::zero(),
            optimum: Allocation::new(start[..n].to_vec()),
            cuts_added: 0,
            fixed_players_after: self.fixed_players.len(),
            fixed_pairs_after: self.fixed_pairs.len(),
        }];
        while self.fixed_players.len() < n {
            assert!(
                logs.len() <= n,
                "the recursion finishes within one round per player"
            );
            let mut log = self.solve_round();
            assert!(
                log.epsilon > logs.last().expect("nonempty transcript").epsilon,
                "round slack must strictly increase"
            );
            self.recompute_fixed();
            log.fixed_players_after = self.fixed_players.len();
            log.fixed_pairs_after = self.fixed_pairs.len();
            logs.push(log);
        }
        let values: Vec<Rat> = self
            .index
            .players()
            .iter()
            .map(|&p| {
                let arc = self.net.player_arc(p).expect("indexed players own arcs");
                self.fixed_players[&arc].clone()
            })
            .collect();
        (logs, Allocation::new(values))
    }
}

/// Adds one round LP row `x(S) - value(S) epsilon >= value(S)` for a fresh
/// candidate; `rdims` is the payoff-potential space plus the slack column.
fn add_round_cut(
    c: &Candidate,
    rdims: usize,
    round_cuts: &mut BTreeMap<u64, u64>,
    round_rows: &mut Vec<Constraint>,
) {
    if round_cuts.insert(c.mask, c.gamma).is_some() {
        // A satisfied row cannot be violated again.
        panic!("candidate S{} regenerated within a round", c.mask);
    }
    let mut coeffs = vec![Rat::zero(); rdims];
    for i in 0..rdims - 1 {
        if i < 64 && c.mask & (1 << i) != 0 {
            coeffs[i] = Rat::one();
        }
    }
    let g = rat_int(c.gamma as i64);
    coeffs[rdims - 1] = -g.clone();
    round_rows.push(Constraint::ge(coeffs, g, format!("cand-S{}", c.mask)));
}

/// Recursion outcome at private family size one: the core is the convex
/// hull of the single-arc private cut indicators and no coalition of
/// positive value can separate its points, so the recursion stops after at
/// most one round and returns the whole core.
fn whole_core_rounds(
    net: &FlowNetwork,
    index: &PlayerIndex,
    structure: &Structure,
) -> (Vec<RoundLog>, Vec<Allocation>) {
    let n = index.len();
    let mut vertices: Vec<Allocation> = Vec::new();
    for e in net.private_arc_ids() {
        let mut banned = BTreeSet::new();
        banned.insert(e);
        if flowcore::path_avoiding(net, &banned).is_none() {
            let mut values = vec![Rat::zero(); n];
            let p = net.arc(e).player().expect("private arc");
            values[index.position(p).expect("player indexed")] = Rat::one();
            vertices.push(Allocation::new(values));
        }
    }
    vertices.sort();
    assert!(
        !vertices.is_empty(),
        "a family of size one has a single-arc private cut"
    );

    // The first round only runs when some proper coalition has positive
    // value; checking the maximal proper coalitions covers all of them.
    let full = index.full_mask();
    let positive_proper = (0..n).any(|i| {
        let coalition = index.coalition_of(full & !(1 << i));
        flowcore::coalition_value(net, &coalition) >= 1
    });
    let rounds = if positive_proper {
        let fixed_players_after = (0..n)
            .filter(|&i| {
                vertices
                    .iter()
                    .all(|v| v.values[i] == vertices[0].values[i])
            })
            .count();
        let fixed_pairs_after = structure
            .pairs
            .values()
            .filter(|data| {
                let first = dot(&data.functional, &vertices[0].values);
                vertices
                    .iter()
                    .all(|v| dot(&data.functional, &v.values) == first)
            })
            .count();
        vec![RoundLog {
            epsilon: Rat::zero(),
            optimum: vertices[0].clone(),
            cuts_added: 0,
            fixed_players_after,
            fixed_pairs_after,
        }]
    } else {
        Vec::new()
    };
    (rounds, vertices)
}
