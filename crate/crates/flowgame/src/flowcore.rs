//! Flow primitives: coalition values, partially disjoint path families,
//! constrained cuts, and exact min-cost flow.
//!
//! Everything here is integral and deterministic. Augmenting paths are found
//! by breadth-first search scanning arcs in id order, so repeated runs on the
//! same network produce identical flows, paths and cuts.

use std::collections::{BTreeSet, VecDeque};

use num::Zero;
use thiserror::Error;

use crate::netmodel::{ArcId, Coalition, FlowNetwork, VertexId};
use crate::Rat;

/// A maximum flow together with a path decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowWitness {
    pub value: u64,
    /// Flow per arc, indexed by arc id.
    pub arc_flow: Vec<u64>,
    /// `value` source-sink paths as arc id sequences; pairwise arc-disjoint
    /// when all capacities are one.
    pub paths: Vec<Vec<ArcId>>,
}

/// Value of a coalition: the maximum number of arc-disjoint source-sink
/// paths using only the coalition's private arcs and the public arcs.
pub fn coalition_value(net: &FlowNetwork, coalition: &Coalition) -> u64 {
    let caps = usable_caps(net, coalition);
    let (value, _) = max_flow_capacitated(net, &caps);
    value
}

/// As [`coalition_value`], but also returns the routed paths.
pub fn coalition_value_witness(net: &FlowNetwork, coalition: &Coalition) -> FlowWitness {
    let caps = usable_caps(net, coalition);
    let (value, mut flow) = max_flow_capacitated(net, &caps);
    cancel_circulations(net, &mut flow);
    let paths = peel_paths(net, &mut flow.clone(), value);
    FlowWitness {
        value,
        arc_flow: flow,
        paths,
    }
}

fn usable_caps(net: &FlowNetwork, coalition: &Coalition) -> Vec<u64> {
    net.arcs()
        .map(|(_, a)| match a.player() {
            None => 1,
            Some(p) if coalition.contains(p) => 1,
            Some(_) => 0,
        })
        .collect()
}

/// A maximum family of source-sink paths pairwise disjoint on a restriction
/// set, with a matching minimum constrained cut inside that set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaWitness {
    pub value: u64,
    /// Paths sharing no arc of the restriction set; arcs outside it may
    /// repeat across paths.
    pub paths: Vec<Vec<ArcId>>,
    /// A subset of the restriction set meeting every source-sink path,
    /// of size exactly `value`.
    pub min_cut: BTreeSet<ArcId>,
}

/// The family is unbounded: some source-sink path avoids the restriction
/// set entirely, so arbitrarily many pairwise-disjoint-on-it paths exist.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unbounded path family: a source-sink path avoids the restriction set")]
pub struct UnboundedFamily {
    pub escape_path: Vec<ArcId>,
}

/// Maximum number of source-sink paths that pairwise share no arc of `f`,
/// computed as a max flow with unit capacity on `f` and effectively
/// unlimited capacity elsewhere. Also yields a minimum cut contained in `f`
/// of the same size.
pub fn max_partially_disjoint(
    net: &FlowNetwork,
    f: &BTreeSet<ArcId>,
) -> Result<SigmaWitness, UnboundedFamily> {
    if let Some(path) = path_avoiding(net, f) {
        return Err(UnboundedFamily { escape_path: path });
    }

    // Every path meets f, so the family size is at most |f| and capacity
    // |E| off f never binds.
    let big = (net.arc_count() as u64).max(1);
    let caps: Vec<u64> = net
        .arc_ids()
        .map(|a| if f.contains(&a) { 1 } else { big })
        .collect();
    let (value, mut flow) = max_flow_capacitated(net, &caps);
    cancel_circulations(net, &mut flow);

    // After circulation cancelling, each arc carries at most `value` units,
    // so no off-f arc is saturated and the residual cut lies inside f.
    let min_cut = residual_cut(net, &caps, &flow);
    debug_assert!(min_cut.iter().all(|a| f.contains(a)));
    debug_assert_eq!(min_cut.len() as u64, value);

    let paths = peel_paths(net, &mut flow, value);
    Ok(SigmaWitness {
        value,
        paths,
        min_cut,
    })
}

/// A smallest subset of `f` whose removal disconnects source from sink.
pub fn min_constrained_cut(
    net: &FlowNetwork,
    f: &BTreeSet<ArcId>,
) -> Result<BTreeSet<ArcId>, UnboundedFamily> {
    max_partially_disjoint(net, f).map(|w| w.min_cut)
}

/// All minimum constrained cuts, up to a cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutEnumeration {
    pub size: u64,
    pub cuts: Vec<BTreeSet<ArcId>>,
    /// True when more cuts exist than the cap allowed.
    pub truncated: bool,
}

/// Errors from [`enumerate_min_constrained_cuts`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutEnumerationError {
    #[error(transparent)]
    Unbounded(#[from] UnboundedFamily),
    #[error("restriction set has {actual} arcs, exhaustive cut enumeration is limited to {limit}")]
    RestrictionTooLarge { limit: usize, actual: usize },
}

const CUT_ENUMERATION_ARC_LIMIT: usize = 20;

/// Enumerates every minimum-size subset of `f` meeting all source-sink
/// paths, in lexicographic arc-id order, stopping after `cap` cuts.
pub fn enumerate_min_constrained_cuts(
    net: &FlowNetwork,
    f: &BTreeSet<ArcId>,
    cap: usize,
) -> Result<CutEnumeration, CutEnumerationError> {
    if f.len() > CUT_ENUMERATION_ARC_LIMIT {
        return Err(CutEnumerationError::RestrictionTooLarge {
            limit: CUT_ENUMERATION_ARC_LIMIT,
            actual: f.len(),
        });
    }
    let size = max_partially_disjoint(net, f)?.value;
    let pool: Vec<ArcId> = f.iter().copied().collect();
    let mut cuts = Vec::new();
    let mut truncated = false;
    let mut chosen: Vec<usize> = Vec::new();
    combinations(&pool, size as usize, 0, &mut chosen, &mut |subset| {
        if cuts.len() >= cap {
            truncated = true;
            return false;
        }
        let set: BTreeSet<ArcId> = subset.iter().copied().collect();
        if path_avoiding(net, &set).is_none() {
            cuts.push(set);
        }
        true
    });
    Ok(CutEnumeration {
        size,
        cuts,
        truncated,
    })
}

/// Visits size-`k` subsets of `pool` in lexicographic order; the callback
/// returns false to stop early.
pub(crate) fn combinations(
    pool: &[ArcId],
    k: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[ArcId]) -> bool,
) -> bool {
    if chosen.len() == k {
        let subset: Vec<ArcId> = chosen.iter().map(|&i| pool[i]).collect();
        return visit(&subset);
    }
    let needed = k - chosen.len();
    for i in start..=pool.len().saturating_sub(needed) {
        chosen.push(i);
        let keep_going = combinations(pool, k, i + 1, chosen, visit);
        chosen.pop();
        if !keep_going {
            return false;
        }
    }
    true
}

/// Shortest (fewest arcs) source-sink path avoiding `banned`, if any.
pub fn path_avoiding(net: &FlowNetwork, banned: &BTreeSet<ArcId>) -> Option<Vec<ArcId>> {
    let mut pred: Vec<Option<ArcId>> = vec![None; net.vertex_count()];
    let mut seen = vec![false; net.vertex_count()];
    let mut queue = VecDeque::new();
    seen[net.source().0] = true;
    queue.push_back(net.source());
    while let Some(v) = queue.pop_front() {
        for &a in net.out_arcs(v) {
            if banned.contains(&a) {
                continue;
            }
            let h = net.arc(a).head;
            if !seen[h.0] {
                seen[h.0] = true;
                pred[h.0] = Some(a);
                queue.push_back(h);
            }
        }
    }
    if !seen[net.sink().0] {
        return None;
    }
    let mut path = Vec::new();
    let mut v = net.sink();
    while v != net.source() {
        let a = pred[v.0].expect("predecessor chain reaches the source");
        path.push(a);
        v = net.arc(a).tail;
    }
    path.reverse();
    Some(path)
}

/// Edmonds-Karp with explicit capacities. Returns the flow value and the
/// per-arc flow.
fn max_flow_capacitated(net: &FlowNetwork, caps: &[u64]) -> (u64, Vec<u64>) {
    let n = net.vertex_count();
    let s = net.source();
    let t = net.sink();
    let mut flow = vec![0u64; net.arc_count()];
    let mut value = 0u64;
    loop {
        // pred[v] = (arc, true for forward residual use).
        let mut pred: Vec<Option<(ArcId, bool)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[s.0] = true;
        queue.push_back(s);
        'bfs: while let Some(v) = queue.pop_front() {
            for &a in net.out_arcs(v) {
                let h = net.arc(a).head;
                if flow[a.0] < caps[a.0] && !seen[h.0] {
                    seen[h.0] = true;
                    pred[h.0] = Some((a, true));
                    if h == t {
                        break 'bfs;
                    }
                    queue.push_back(h);
                }
            }
            for &a in net.in_arcs(v) {
                let u = net.arc(a).tail;
                if flow[a.0] > 0 && !seen[u.0] {
                    seen[u.0] = true;
                    pred[u.0] = Some((a, false));
                    queue.push_back(u);
                }
            }
        }
        if !seen[t.0] {
            break;
        }
        // Bottleneck along the augmenting path, then push.
        let mut bottleneck = u64::MAX;
        let mut v = t;
        while v != s {
            let (a, forward) = pred[v.0].unwrap();
            let slack = if forward {
                caps[a.0] - flow[a.0]
            } else {
                flow[a.0]
            };
            bottleneck = bottleneck.min(slack);
            v = if forward {
                net.arc(a).tail
            } else {
                net.arc(a).head
            };
        }
        let mut v = t;
        while v != s {
            let (a, forward) = pred[v.0].unwrap();
            if forward {
                flow[a.0] += bottleneck;
                v = net.arc(a).tail;
            } else {
                flow[a.0] -= bottleneck;
                v = net.arc(a).head;
            }
        }
        value += bottleneck;
    }
    (value, flow)
}

/// Removes every cycle from the flow support so the flow decomposes into
/// source-sink paths only. Keeps the flow value unchanged.
fn cancel_circulations(net: &FlowNetwork, flow: &mut [u64]) {
    'restart: loop {
        // DFS over positive-flow arcs; a grey vertex closes a cycle.
        let mut state = vec![0u8; net.vertex_count()]; // 0 white, 1 grey, 2 black
        let mut trail: Vec<(VertexId, ArcId)> = Vec::new();
        for start in net.vertex_ids() {
            if state[start.0] != 0 {
                continue;
            }
            if dfs_cycle(net, start, flow, &mut state, &mut trail) {
                // trail ends with the arc re-entering a grey vertex; cancel
                // one unit around the cycle.
                let (_, closing) = *trail.last().unwrap();
                let entry = net.arc(closing).head;
                let cycle_start = trail
                    .iter()
                    .position(|&(v, _)| v == entry)
                    .expect("cycle entry vertex is on the trail");
                let cycle: Vec<ArcId> = trail[cycle_start..].iter().map(|&(_, a)| a).collect();
                let slack = cycle.iter().map(|a| flow[a.0]).min().unwrap();
                for a in cycle {
                    flow[a.0] -= slack;
                }
                continue 'restart;
            }
        }
        return;
    }
}

fn dfs_cycle(
    net: &FlowNetwork,
    v: VertexId,
    flow: &[u64],
    state: &mut [u8],
    trail: &mut Vec<(VertexId, ArcId)>,
) -> bool {
    state[v.0] = 1;
    for &a in net.out_arcs(v) {
        if flow[a.0] == 0 {
            continue;
        }
        let h = net.arc(a).head;
        if state[h.0] == 1 {
            trail.push((v, a));
            return true;
        }
        if state[h.0] == 0 {
            trail.push((v, a));
            if dfs_cycle(net, h, flow, state, trail) {
                return true;
            }
            trail.pop();
        }
    }
    state[v.0] = 2;
    false
}

/// Source side of the residual graph after a maximum flow; the saturated
/// arcs leaving it form a minimum cut.
fn residual_cut(net: &FlowNetwork, caps: &[u64], flow: &[u64]) -> BTreeSet<ArcId> {
    let n = net.vertex_count();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[net.source().0] = true;
    queue.push_back(net.source());
    while let Some(v) = queue.pop_front() {
        for &a in net.out_arcs(v) {
            let h = net.arc(a).head;
            if flow[a.0] < caps[a.0] && !seen[h.0] {
                seen[h.0] = true;
                queue.push_back(h);
            }
        }
        for &a in net.in_arcs(v) {
            let u = net.arc(a).tail;
            if flow[a.0] > 0 && !seen[u.0] {
                seen[u.0] = true;
                queue.push_back(u);
            }
        }
    }
    net.arcs()
        .filter(|(id, a)| seen[a.tail.0] && !seen[a.head.0] && flow[id.0] > 0)
        .map(|(id, _)| id)
        .collect()
}

/// Decomposes a circulation-free flow into `count` source-sink paths,
/// repeatedly walking the smallest-id arc with remaining flow. Consumes the
/// flow array.
fn peel_paths(net: &FlowNetwork, flow: &mut [u64], count: u64) -> Vec<Vec<ArcId>> {
    let mut paths = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let mut path = Vec::new();
        let mut v = net.source();
        while v != net.sink() {
            let a = net
                .out_arcs(v)
                .iter()
                .copied()
                .find(|a| flow[a.0] > 0)
                .expect("flow conservation yields an outgoing arc");
            flow[a.0] -= 1;
            path.push(a);
            v = net.arc(a).head;
        }
        paths.push(path);
    }
    paths
}

/// A directed graph with capacities and exact rational costs, for min-cost
/// flow subproblems on derived graphs.
#[derive(Debug, Clone)]
pub struct WeightedDigraph {
    node_count: usize,
    arcs: Vec<WeightedArc>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct WeightedArc {
    pub tail: usize,
    pub head: usize,
    pub capacity: u64,
    pub cost: Rat,
}

/// A minimum-cost flow of the requested value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCostFlow {
    pub cost: Rat,
    /// Flow per arc, in insertion order.
    pub flow: Vec<u64>,
}

impl WeightedDigraph {
    pub fn new(node_count: usize) -> Self {
        WeightedDigraph {
            node_count,
            arcs: Vec::new(),
            out_arcs: vec![Vec::new(); node_count],
            in_arcs: vec![Vec::new(); node_count],
        }
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: u64, cost: Rat) -> usize {
        assert!(tail < self.node_count && head < self.node_count);
        let id = self.arcs.len();
        self.arcs.push(WeightedArc {
            tail,
            head,
            capacity,
            cost,
        });
        self.out_arcs[tail].push(id);
        self.in_arcs[head].push(id);
        id
    }

    pub fn arc(&self, id: usize) -> &WeightedArc {
        &self.arcs[id]
    }

    /// Minimum-cost flow of value exactly `target` from `source` to `sink`
    /// by successive shortest augmenting paths. Requires the input graph to
    /// be free of negative-cost cycles. Returns `None` when no flow of the
    /// target value exists.
    pub fn min_cost_flow(&self, source: usize, sink: usize, target: u64) -> Option<MinCostFlow> {
        let mut flow = vec![0u64; self.arcs.len()];
        let mut cost = Rat::zero();
        let mut routed = 0u64;
        while routed < target {
            let (dist, pred) = self.residual_shortest_paths(source, &flow);
            let Some(path_cost) = dist[sink].clone() else {
                return None;
            };
            // Bottleneck along the predecessor chain.
            let mut bottleneck = target - routed;
            let mut v = sink;
            while v != source {
                let (a, forward) = pred[v].expect("reachable vertex has a predecessor");
                let slack = if forward {
                    self.arcs[a].capacity - flow[a]
                } else {
                    flow[a]
                };
                bottleneck = bottleneck.min(slack);
                v = if forward {
                    self.arcs[a].tail
                } else {
                    self.arcs[a].head
                };
            }
            let mut v = sink;
            while v != source {
                let (a, forward) = pred[v].unwrap();
                if forward {
                    flow[a] += bottleneck;
                    v = self.arcs[a].tail;
                } else {
                    flow[a] -= bottleneck;
                    v = self.arcs[a].head;
                }
            }
            cost += path_cost * crate::rat_int(bottleneck as i64);
            routed += bottleneck;
        }
        Some(MinCostFlow { cost, flow })
    }

    /// Bellman-Ford over the residual graph. Forward residual arcs cost
    /// `c`, backward ones `-c`. Arcs are relaxed in id order and a
    /// predecessor is only replaced on a strict improvement, so shortest
    /// paths are deterministic.
    fn residual_shortest_paths(
        &self,
        source: usize,
        flow: &[u64],
    ) -> (Vec<Option<Rat>>, Vec<Option<(usize, bool)>>) {
        let mut dist: Vec<Option<Rat>> = vec![None; self.node_count];
        let mut pred: Vec<Option<(usize, bool)>> = vec![None; self.node_count];
        dist[source] = Some(Rat::zero());
        for _round in 0..self.node_count.max(1) {
            let mut changed = false;
            for (a, arc) in self.arcs.iter().enumerate() {
                if flow[a] < arc.capacity {
                    if let Some(d) = dist[arc.tail].clone() {
                        let cand = d + &arc.cost;
                        if dist[arc.head].as_ref().map_or(true, |cur| cand < *cur) {
                            dist[arc.head] = Some(cand);
                            pred[arc.head] = Some((a, true));
                            changed = true;
                        }
                    }
                }
                if flow[a] > 0 {
                    if let Some(d) = dist[arc.head].clone() {
                        let cand = d - &arc.cost;
                        if dist[arc.tail].as_ref().map_or(true, |cur| cand < *cur) {
                            dist[arc.tail] = Some(cand);
                            pred[arc.tail] = Some((a, false));
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return (dist, pred);
            }
        }
        panic!("negative-cost cycle in residual graph");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::PlayerId;
    use crate::{rat, rat_int};

    const INSTANCE_A: &str =
        "vertices 3\nsource s\nsink t\narc s v public\narc v t private 1\narc v t private 2\n";
    const INSTANCE_B: &str = "vertices 2\nsource s\nsink t\narc s t private 1\narc s t private 2\n";
    const INSTANCE_D: &str = "vertices 4\nsource s\nsink t\n\
         arc s a private 1\narc a t private 2\narc s b private 3\narc b t private 4\n\
         arc a b public\n";

    fn players(ids: &[u32]) -> Coalition {
        Coalition::from_players(ids.iter().map(|&i| PlayerId(i)))
    }

    #[test]
    fn coalition_values_on_shared_bottleneck() {
        let net = FlowNetwork::parse(INSTANCE_A).unwrap();
        assert_eq!(coalition_value(&net, &players(&[])), 0);
        assert_eq!(coalition_value(&net, &players(&[1])), 1);
        assert_eq!(coalition_value(&net, &players(&[2])), 1);
        assert_eq!(coalition_value(&net, &players(&[1, 2])), 1);
    }

    #[test]
    fn coalition_values_on_parallel_arcs() {
        let net = FlowNetwork::parse(INSTANCE_B).unwrap();
        assert_eq!(coalition_value(&net, &players(&[1])), 1);
        assert_eq!(coalition_value(&net, &players(&[1, 2])), 2);
    }

    #[test]
    fn witness_paths_route_the_flow() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let w = coalition_value_witness(&net, &players(&[1, 2, 3, 4]));
        assert_eq!(w.value, 2);
        assert_eq!(
            w.paths,
            vec![vec![ArcId(0), ArcId(1)], vec![ArcId(2), ArcId(3)]]
        );
    }

    #[test]
    fn partially_disjoint_paths_share_public_arcs() {
        let net = FlowNetwork::parse(INSTANCE_A).unwrap();
        let private = net.private_arc_ids();
        let w = max_partially_disjoint(&net, &private).unwrap();
        assert_eq!(w.value, 2);
        assert_eq!(
            w.paths,
            vec![vec![ArcId(0), ArcId(1)], vec![ArcId(0), ArcId(2)]]
        );
        assert_eq!(w.min_cut, BTreeSet::from([ArcId(1), ArcId(2)]));

        let all: BTreeSet<ArcId> = net.arc_ids().collect();
        let w = max_partially_disjoint(&net, &all).unwrap();
        assert_eq!(w.value, 1);
        assert_eq!(w.min_cut, BTreeSet::from([ArcId(0)]));
    }

    #[test]
    fn escape_path_makes_family_unbounded() {
        let text = "vertices 2\nsource s\nsink t\narc s t private 1\narc s t public\n";
        let net = FlowNetwork::parse(text).unwrap();
        let private = net.private_arc_ids();
        assert_eq!(
            max_partially_disjoint(&net, &private),
            Err(UnboundedFamily {
                escape_path: vec![ArcId(1)]
            })
        );
    }

    #[test]
    fn cut_enumeration_finds_all_minimum_cuts() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let private = net.private_arc_ids();
        let e = enumerate_min_constrained_cuts(&net, &private, 100).unwrap();
        assert_eq!(e.size, 2);
        assert!(!e.truncated);
        assert_eq!(
            e.cuts,
            vec![
                BTreeSet::from([ArcId(0), ArcId(2)]),
                BTreeSet::from([ArcId(0), ArcId(3)]),
                BTreeSet::from([ArcId(1), ArcId(3)]),
            ]
        );
    }

    #[test]
    fn cut_enumeration_respects_cap() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let private = net.private_arc_ids();
        let e = enumerate_min_constrained_cuts(&net, &private, 2).unwrap();
        assert_eq!(e.cuts.len(), 2);
        assert!(e.truncated);
    }

    #[test]
    fn circulation_cancelling_leaves_path_flow() {
        let text = "vertices 4\nsource s\nsink t\n\
             arc s a private 1\narc a t private 2\narc a b public\narc b a public\n\
             arc s b private 3\narc b t private 4\n";
        let net = FlowNetwork::parse(text).unwrap();
        // Path flow s-a-t plus a circulation around a-b-a.
        let mut flow = vec![1, 1, 1, 1, 0, 0];
        cancel_circulations(&net, &mut flow);
        assert_eq!(flow, vec![1, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn min_cost_flow_prefers_cheap_arcs() {
        let mut g = WeightedDigraph::new(2);
        g.add_arc(0, 1, 1, rat_int(3));
        g.add_arc(0, 1, 1, rat_int(1));
        let one = g.min_cost_flow(0, 1, 1).unwrap();
        assert_eq!(one.cost, rat_int(1));
        assert_eq!(one.flow, vec![0, 1]);
        let two = g.min_cost_flow(0, 1, 2).unwrap();
        assert_eq!(two.cost, rat_int(4));
        assert!(g.min_cost_flow(0, 1, 3).is_none());
    }

    #[test]
    fn min_cost_flow_reroutes_through_backward_arcs() {
        // Classic rerouting: cheap paths 0-1-3 and 0-2-3 exist only after
        // the middle arc 1-2 taken by the first augmentation is undone.
        let mut g = WeightedDigraph::new(4);
        g.add_arc(0, 1, 1, rat(1, 2));
        g.add_arc(1, 2, 1, rat_int(0));
        g.add_arc(2, 3, 1, rat(1, 2));
        g.add_arc(0, 2, 1, rat_int(10));
        g.add_arc(1, 3, 1, rat_int(10));
        let r = g.min_cost_flow(0, 3, 2).unwrap();
        assert_eq!(r.cost, rat_int(21));
        assert_eq!(r.flow, vec![1, 0, 1, 1, 1]);
    }
}
