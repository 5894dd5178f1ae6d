//! Base path systems, jumps between them, and the decomposition of
//! arbitrary source-sink paths into base segments and jumps.
//!
//! A base system is a canonical maximum family of source-sink paths that
//! pairwise share no private arc. Arcs and vertices on these paths are "on
//! base"; everything else is off base. A jump is a nonempty path of off-base
//! arcs connecting two distinct on-base vertices with every intermediate
//! vertex off base. Every source-sink path then decomposes into contiguous
//! base-path segments joined by jumps, which is what makes the LP separation
//! oracles downstream work on a small arc set instead of all coalitions.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};
use thiserror::Error;

use crate::flowcore::{max_partially_disjoint, UnboundedFamily};
use crate::netmodel::{ArcId, FlowNetwork, PlayerIndex, VertexId};
use crate::Rat;

/// A canonical maximum family of source-sink paths pairwise disjoint on the
/// private arcs, with lookup tables for membership and positions.
#[derive(Debug, Clone)]
pub struct BaseSystem {
    paths: Vec<Vec<ArcId>>,
    /// (path index, position) pairs per on-base arc.
    arc_occurrences: BTreeMap<ArcId, Vec<(usize, usize)>>,
    /// Position of the vertex on each base path visiting it. Base paths are
    /// simple, so positions are unique per path. Position p means the vertex
    /// precedes the arc at index p; the sink sits at position `len`.
    vertex_positions: BTreeMap<VertexId, Vec<(usize, usize)>>,
}

impl BaseSystem {
    /// Builds the canonical base system: the lexicographic path peel of the
    /// maximum flow that is unit-capacitated on private arcs only.
    pub fn build(net: &FlowNetwork) -> Result<Self, UnboundedFamily> {
        let private = net.private_arc_ids();
        let witness = max_partially_disjoint(net, &private)?;
        Ok(Self::from_paths(net, witness.paths))
    }

    fn from_paths(net: &FlowNetwork, paths: Vec<Vec<ArcId>>) -> Self {
        let mut arc_occurrences: BTreeMap<ArcId, Vec<(usize, usize)>> = BTreeMap::new();
        let mut vertex_positions: BTreeMap<VertexId, Vec<(usize, usize)>> = BTreeMap::new();
        for (pi, path) in paths.iter().enumerate() {
            for (pos, &a) in path.iter().enumerate() {
                arc_occurrences.entry(a).or_default().push((pi, pos));
                vertex_positions
                    .entry(net.arc(a).tail)
                    .or_default()
                    .push((pi, pos));
            }
            if let Some(&last) = path.last() {
                vertex_positions
                    .entry(net.arc(last).head)
                    .or_default()
                    .push((pi, path.len()));
            }
        }
        BaseSystem {
            paths,
            arc_occurrences,
            vertex_positions,
        }
    }

    /// Number of base paths; equals the maximum family size.
    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Vec<ArcId>] {
        &self.paths
    }

    pub fn is_on_base_arc(&self, a: ArcId) -> bool {
        self.arc_occurrences.contains_key(&a)
    }

    pub fn is_on_base_vertex(&self, v: VertexId) -> bool {
        self.vertex_positions.contains_key(&v)
    }

    pub fn on_base_arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.arc_occurrences.keys().copied()
    }

    pub fn on_base_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_positions.keys().copied()
    }

    /// All (path, position) occurrences of an on-base arc.
    pub fn arc_occurrences(&self, a: ArcId) -> &[(usize, usize)] {
        self.arc_occurrences.get(&a).map_or(&[], |v| v.as_slice())
    }

    /// The lowest-index base path visiting a vertex, with the position.
    pub fn home_position(&self, v: VertexId) -> Option<(usize, usize)> {
        self.vertex_positions.get(&v).map(|occ| occ[0])
    }

    /// Private arcs strictly before `v` on its home path.
    pub fn private_prefix(&self, net: &FlowNetwork, v: VertexId) -> Option<Vec<ArcId>> {
        let (pi, pos) = self.home_position(v)?;
        Some(
            self.paths[pi][..pos]
                .iter()
                .copied()
                .filter(|&a| net.arc(a).player().is_some())
                .collect(),
        )
    }

    /// Coefficient vector over players whose dot product with an allocation
    /// in the auxiliary core equals the vertex's shortest-path potential:
    /// the allocation mass of the private arcs preceding the vertex on its
    /// home path. `None` for off-base vertices, whose potential is not an
    /// affine function of the allocation.
    pub fn potential_functional(
        &self,
        net: &FlowNetwork,
        index: &PlayerIndex,
        v: VertexId,
    ) -> Option<Vec<Rat>> {
        let prefix = self.private_prefix(net, v)?;
        let mut coeffs = vec![Rat::zero(); index.len()];
        for a in prefix {
            let p = net.arc(a).player().expect("prefix arcs are private");
            let slot = index.position(p).expect("player indexed");
            coeffs[slot] = Rat::one();
        }
        Some(coeffs)
    }
}

/// A path of off-base arcs between two distinct on-base vertices with all
/// intermediate vertices off base.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Jump {
    pub from: VertexId,
    pub to: VertexId,
    pub arcs: Vec<ArcId>,
}

/// Errors from jump enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JumpError {
    #[error("jump enumeration exceeded {limit} jumps")]
    TooManyJumps { limit: usize },
    #[error("jump enumeration exceeded {limit} search steps")]
    SearchTooLarge { limit: usize },
}

const JUMP_LIMIT: usize = 20_000;
const JUMP_SEARCH_LIMIT: usize = 1_000_000;

/// Enumerates every jump by depth-first search through the off-base
/// subgraph from each on-base vertex, in ascending vertex and arc id order.
pub fn enumerate_jumps(net: &FlowNetwork, base: &BaseSystem) -> Result<Vec<Jump>, JumpError> {
    let mut jumps = Vec::new();
    let mut steps = 0usize;
    for start in base.on_base_vertices() {
        let mut stack = Vec::new();
        let mut visited = vec![false; net.vertex_count()];
        jump_dfs(
            net, base, start, start, &mut stack, &mut visited, &mut jumps, &mut steps,
        )?;
    }
    Ok(jumps)
}

#[allow(clippy::too_many_arguments)]
fn jump_dfs(
    net: &FlowNetwork,
    base: &BaseSystem,
    start: VertexId,
    at: VertexId,
    stack: &mut Vec<ArcId>,
    visited: &mut Vec<bool>,
    jumps: &mut Vec<Jump>,
    steps: &mut usize,
) -> Result<(), JumpError> {
    *steps += 1;
    if *steps > JUMP_SEARCH_LIMIT {
        return Err(JumpError::SearchTooLarge {
            limit: JUMP_SEARCH_LIMIT,
        });
    }
    for &a in net.out_arcs(at) {
        if base.is_on_base_arc(a) {
            continue;
        }
        let h = net.arc(a).head;
        if base.is_on_base_vertex(h) {
            // A closed off-base walk back to the start is not a jump.
            if h != start {
                stack.push(a);
                jumps.push(Jump {
                    from: start,
                    to: h,
                    arcs: stack.clone(),
                });
                stack.pop();
                if jumps.len() > JUMP_LIMIT {
                    return Err(JumpError::TooManyJumps { limit: JUMP_LIMIT });
                }
            }
            continue;
        }
        if visited[h.0] {
            continue;
        }
        visited[h.0] = true;
        stack.push(a);
        let r = jump_dfs(net, base, start, h, stack, visited, jumps, steps);
        stack.pop();
        visited[h.0] = false;
        r?;
    }
    Ok(())
}

/// The representative jump per ordered vertex pair: fewest arcs first, ties
/// broken by the lexicographically smallest arc id sequence.
pub fn jump_pairs(
    net: &FlowNetwork,
    base: &BaseSystem,
) -> Result<BTreeMap<(VertexId, VertexId), Jump>, JumpError> {
    let mut pairs: BTreeMap<(VertexId, VertexId), Jump> = BTreeMap::new();
    for jump in enumerate_jumps(net, base)? {
        let key = (jump.from, jump.to);
        match pairs.get(&key) {
            Some(best)
                if (best.arcs.len(), &best.arcs) <= (jump.arcs.len(), &jump.arcs) => {}
            _ => {
                pairs.insert(key, jump);
            }
        }
    }
    Ok(pairs)
}

/// Structural witness that a jump can occur on a walk through the network:
/// a full source-sink path, or a closed walk when the base prefix of the
/// jump's start and the base suffix of its end intersect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JumpRealization {
    Path { arcs: Vec<ArcId> },
    Cycle { arcs: Vec<ArcId> },
}

impl JumpRealization {
    pub fn arcs(&self) -> &[ArcId] {
        match self {
            JumpRealization::Path { arcs } | JumpRealization::Cycle { arcs } => arcs,
        }
    }
}

/// Builds a walk through the jump: base prefix to its start, the jump, base
/// suffix from its end. When prefix and suffix share vertices the straight
/// concatenation would repeat them, so the walk is closed through the last
/// shared vertex instead.
pub fn realize_jump(net: &FlowNetwork, base: &BaseSystem, jump: &Jump) -> JumpRealization {
    let (pi, upos) = base
        .home_position(jump.from)
        .expect("jump starts on base");
    let (pj, vpos) = base.home_position(jump.to).expect("jump ends on base");
    let prefix = &base.paths()[pi][..upos];
    let suffix = &base.paths()[pj][vpos..];

    let suffix_vertices: BTreeSet<VertexId> = path_vertices(net, suffix, jump.to).collect();
    // Last prefix vertex (walking source to jump start) shared with the
    // suffix, if any.
    let shared = path_vertices(net, prefix, jump.from)
        .filter(|v| suffix_vertices.contains(v))
        .last();

    match shared {
        None => {
            let mut arcs = prefix.to_vec();
            arcs.extend_from_slice(&jump.arcs);
            arcs.extend_from_slice(suffix);
            JumpRealization::Path { arcs }
        }
        Some(w) => {
            let wpos_i = position_on(base, pi, w).expect("shared vertex on prefix path");
            let wpos_j = position_on(base, pj, w).expect("shared vertex on suffix path");
            let mut arcs = base.paths()[pi][wpos_i..upos].to_vec();
            arcs.extend_from_slice(&jump.arcs);
            arcs.extend_from_slice(&base.paths()[pj][vpos..wpos_j]);
            JumpRealization::Cycle { arcs }
        }
    }
}

fn position_on(base: &BaseSystem, path: usize, v: VertexId) -> Option<usize> {
    base.vertex_positions
        .get(&v)?
        .iter()
        .find(|&&(pi, _)| pi == path)
        .map(|&(_, pos)| pos)
}

/// Vertices visited by a path segment, in walk order, ending at `end`.
fn path_vertices<'a>(
    net: &'a FlowNetwork,
    arcs: &'a [ArcId],
    end: VertexId,
) -> impl Iterator<Item = VertexId> + 'a {
    arcs.iter()
        .map(|&a| net.arc(a).tail)
        .chain(std::iter::once(end))
}

/// One piece of a decomposed source-sink path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathPiece {
    /// A contiguous segment of one base path.
    OnBase {
        base_path: usize,
        start: usize,
        arcs: Vec<ArcId>,
    },
    /// A jump between on-base vertices.
    Jump {
        from: VertexId,
        to: VertexId,
        arcs: Vec<ArcId>,
    },
}

impl PathPiece {
    pub fn arcs(&self) -> &[ArcId] {
        match self {
            PathPiece::OnBase { arcs, .. } | PathPiece::Jump { arcs, .. } => arcs,
        }
    }
}

/// Errors from [`decompose`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("arc sequence is empty")]
    Empty,
    #[error("arcs {0:?} and {1:?} do not share a vertex")]
    NotAWalk(ArcId, ArcId),
    #[error("walk does not run from source to sink")]
    WrongEndpoints,
    #[error("walk revisits a vertex and is not a simple path")]
    NotSimple,
}

/// Splits a simple source-sink path into maximal base-path segments and
/// jumps. Concatenating the piece arcs in order reproduces the input.
pub fn decompose(
    net: &FlowNetwork,
    base: &BaseSystem,
    arcs: &[ArcId],
) -> Result<Vec<PathPiece>, DecomposeError> {
    if arcs.is_empty() {
        return Err(DecomposeError::Empty);
    }
    for w in arcs.windows(2) {
        if net.arc(w[0]).head != net.arc(w[1]).tail {
            return Err(DecomposeError::NotAWalk(w[0], w[1]));
        }
    }
    if net.arc(arcs[0]).tail != net.source() || net.arc(arcs[arcs.len() - 1]).head != net.sink() {
        return Err(DecomposeError::WrongEndpoints);
    }
    let mut seen = BTreeSet::new();
    for v in path_vertices(net, arcs, net.sink()) {
        if !seen.insert(v) {
            return Err(DecomposeError::NotSimple);
        }
    }

    let mut pieces = Vec::new();
    let mut i = 0;
    while i < arcs.len() {
        if base.is_on_base_arc(arcs[i]) {
            // Extend the segment while some base path continues through the
            // next arc at the next position.
            let mut cands: Vec<(usize, usize)> = base.arc_occurrences(arcs[i]).to_vec();
            let mut j = i + 1;
            while j < arcs.len() && base.is_on_base_arc(arcs[j]) {
                let next: Vec<(usize, usize)> = base
                    .arc_occurrences(arcs[j])
                    .iter()
                    .copied()
                    .filter(|&(p, pos)| pos > 0 && cands.contains(&(p, pos - 1)))
                    .collect();
                if next.is_empty() {
                    break;
                }
                cands = next;
                j += 1;
            }
            let (path, end_pos) = *cands.iter().min().expect("segment lies on a base path");
            let len = j - i;
            pieces.push(PathPiece::OnBase {
                base_path: path,
                start: end_pos + 1 - len,
                arcs: arcs[i..j].to_vec(),
            });
            i = j;
        } else {
            let from = net.arc(arcs[i]).tail;
            debug_assert!(base.is_on_base_vertex(from));
            let mut j = i;
            while !base.is_on_base_vertex(net.arc(arcs[j]).head) {
                j += 1;
                debug_assert!(j < arcs.len(), "walk ends at the on-base sink");
            }
            pieces.push(PathPiece::Jump {
                from,
                to: net.arc(arcs[j]).head,
                arcs: arcs[i..=j].to_vec(),
            });
            i = j + 1;
        }
    }
    Ok(pieces)
}

/// Exact shortest-path distances from the source under nonnegative arc
/// lengths; `None` marks unreachable vertices. Used as the potential witness
/// in core membership checks.
pub fn shortest_potentials(net: &FlowNetwork, lengths: &[Rat]) -> Vec<Option<Rat>> {
    assert_eq!(lengths.len(), net.arc_count());
    debug_assert!(lengths.iter().all(|l| !num::Signed::is_negative(l)));
    let mut dist: Vec<Option<Rat>> = vec![None; net.vertex_count()];
    dist[net.source().0] = Some(Rat::zero());
    // Bellman-Ford; arc order fixed, so ties resolve identically every run.
    for _ in 0..net.vertex_count().max(1) {
        let mut changed = false;
        for (id, arc) in net.arcs() {
            let Some(d) = dist[arc.tail.0].clone() else {
                continue;
            };
            let cand = d + &lengths[id.0];
            if dist[arc.head.0].as_ref().map_or(true, |cur| cand < *cur) {
                dist[arc.head.0] = Some(cand);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Shortest source-sink path under nonnegative arc lengths, with its exact
/// length. `None` when the sink is unreachable.
pub fn shortest_path_to_sink(net: &FlowNetwork, lengths: &[Rat]) -> Option<(Rat, Vec<ArcId>)> {
    assert_eq!(lengths.len(), net.arc_count());
    let mut dist: Vec<Option<Rat>> = vec![None; net.vertex_count()];
    let mut pred: Vec<Option<ArcId>> = vec![None; net.vertex_count()];
    dist[net.source().0] = Some(Rat::zero());
    for _ in 0..net.vertex_count().max(1) {
        let mut changed = false;
        for (id, arc) in net.arcs() {
            let Some(d) = dist[arc.tail.0].clone() else {
                continue;
            };
            let cand = d + &lengths[id.0];
            if dist[arc.head.0].as_ref().map_or(true, |cur| cand < *cur) {
                dist[arc.head.0] = Some(cand);
                pred[arc.head.0] = Some(id);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let total = dist[net.sink().0].clone()?;
    let mut arcs = Vec::new();
    let mut v = net.sink();
    while v != net.source() {
        let a = pred[v.0].expect("predecessor chain reaches the source");
        arcs.push(a);
        v = net.arc(a).tail;
    }
    arcs.reverse();
    Some((total, arcs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::PlayerId;
    use crate::{rat, rat_int};

    const INSTANCE_A: &str =
        "vertices 3\nsource s\nsink t\narc s v public\narc v t private 1\narc v t private 2\n";
    const INSTANCE_D: &str = "vertices 4\nsource s\nsink t\n\
         arc s a private 1\narc a t private 2\narc s b private 3\narc b t private 4\n\
         arc a b public\n";
    /// Chain s-a-b-t with a public return arc b-a.
    const CHAIN_BACK: &str = "vertices 4\nsource s\nsink t\n\
         arc s a private 1\narc a b private 2\narc b t private 3\narc b a public\n";

    fn vertex(net: &FlowNetwork, name: &str) -> VertexId {
        net.vertex_ids()
            .find(|&v| net.vertex_name(v) == name)
            .unwrap()
    }

    #[test]
    fn base_system_shares_public_arcs() {
        let net = FlowNetwork::parse(INSTANCE_A).unwrap();
        let base = BaseSystem::build(&net).unwrap();
        assert_eq!(base.path_count(), 2);
        assert_eq!(
            base.paths(),
            &[vec![ArcId(0), ArcId(1)], vec![ArcId(0), ArcId(2)]]
        );
        assert!(enumerate_jumps(&net, &base).unwrap().is_empty());
    }

    #[test]
    fn diamond_has_one_jump_pair() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let base = BaseSystem::build(&net).unwrap();
        assert_eq!(base.paths(), &[vec![ArcId(0), ArcId(1)], vec![ArcId(2), ArcId(3)]]);
        let pairs = jump_pairs(&net, &base).unwrap();
        let a = vertex(&net, "a");
        let b = vertex(&net, "b");
        assert_eq!(pairs.len(), 1);
        assert_eq!(
            pairs[&(a, b)],
            Jump {
                from: a,
                to: b,
                arcs: vec![ArcId(4)]
            }
        );
    }

    #[test]
    fn jump_realizes_as_full_path() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let base = BaseSystem::build(&net).unwrap();
        let pairs = jump_pairs(&net, &base).unwrap();
        let jump = pairs.values().next().unwrap();
        assert_eq!(
            realize_jump(&net, &base, jump),
            JumpRealization::Path {
                arcs: vec![ArcId(0), ArcId(4), ArcId(3)]
            }
        );
    }

    #[test]
    fn backward_jump_realizes_as_cycle() {
        let net = FlowNetwork::parse(CHAIN_BACK).unwrap();
        let base = BaseSystem::build(&net).unwrap();
        assert_eq!(base.paths(), &[vec![ArcId(0), ArcId(1), ArcId(2)]]);
        let pairs = jump_pairs(&net, &base).unwrap();
        let a = vertex(&net, "a");
        let b = vertex(&net, "b");
        let jump = &pairs[&(b, a)];
        assert_eq!(
            realize_jump(&net, &base, jump),
            JumpRealization::Cycle {
                arcs: vec![ArcId(3), ArcId(1)]
            }
        );
    }

    #[test]
    fn decompose_splits_at_the_jump() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let base = BaseSystem::build(&net).unwrap();
        let a = vertex(&net, "a");
        let b = vertex(&net, "b");
        let pieces = decompose(&net, &base, &[ArcId(0), ArcId(4), ArcId(3)]).unwrap();
        assert_eq!(
            pieces,
            vec![
                PathPiece::OnBase {
                    base_path: 0,
                    start: 0,
                    arcs: vec![ArcId(0)]
                },
                PathPiece::Jump {
                    from: a,
                    to: b,
                    arcs: vec![ArcId(4)]
                },
                PathPiece::OnBase {
                    base_path: 1,
                    start: 1,
                    arcs: vec![ArcId(3)]
                },
            ]
        );
        let concat: Vec<ArcId> = pieces.iter().flat_map(|p| p.arcs().to_vec()).collect();
        assert_eq!(concat, vec![ArcId(0), ArcId(4), ArcId(3)]);
    }

    #[test]
    fn decompose_switches_base_paths_at_shared_vertices() {
        let text = "vertices 3\nsource s\nsink t\n\
             arc s m private 1\narc m t private 2\narc s m private 3\narc m t private 4\n";
        let net = FlowNetwork::parse(text).unwrap();
        let base = BaseSystem::build(&net).unwrap();
        assert_eq!(base.path_count(), 2);
        let pieces = decompose(&net, &base, &[ArcId(0), ArcId(3)]).unwrap();
        assert_eq!(
            pieces,
            vec![
                PathPiece::OnBase {
                    base_path: 0,
                    start: 0,
                    arcs: vec![ArcId(0)]
                },
                PathPiece::OnBase {
                    base_path: 1,
                    start: 1,
                    arcs: vec![ArcId(3)]
                },
            ]
        );
    }

    #[test]
    fn decompose_rejects_broken_walks() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let base = BaseSystem::build(&net).unwrap();
        assert_eq!(
            decompose(&net, &base, &[]),
            Err(DecomposeError::Empty)
        );
        assert_eq!(
            decompose(&net, &base, &[ArcId(0), ArcId(3)]),
            Err(DecomposeError::NotAWalk(ArcId(0), ArcId(3)))
        );
        assert_eq!(
            decompose(&net, &base, &[ArcId(0), ArcId(4)]),
            Err(DecomposeError::WrongEndpoints)
        );
    }

    #[test]
    fn potential_functionals_accumulate_private_prefixes() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let base = BaseSystem::build(&net).unwrap();
        let index = PlayerIndex::new(&net);
        let z = rat_int(0);
        let o = rat_int(1);
        let f = |name: &str| base.potential_functional(&net, &index, vertex(&net, name));
        assert_eq!(f("s"), Some(vec![z.clone(), z.clone(), z.clone(), z.clone()]));
        assert_eq!(f("a"), Some(vec![o.clone(), z.clone(), z.clone(), z.clone()]));
        assert_eq!(f("b"), Some(vec![z.clone(), z.clone(), o.clone(), z.clone()]));
        assert_eq!(f("t"), Some(vec![o.clone(), o.clone(), z.clone(), z.clone()]));
    }

    #[test]
    fn shortest_potentials_use_exact_lengths() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        // Lengths: x-mass on private arcs of an allocation (2/3,1/3,1/3,2/3).
        let lengths = vec![rat(2, 3), rat(1, 3), rat(1, 3), rat(2, 3), rat_int(0)];
        let d = shortest_potentials(&net, &lengths);
        let at = |name: &str| d[vertex(&net, name).0].clone().unwrap();
        assert_eq!(at("s"), rat_int(0));
        assert_eq!(at("a"), rat(2, 3));
        assert_eq!(at("b"), rat(1, 3));
        assert_eq!(at("t"), rat_int(1));
    }
}
