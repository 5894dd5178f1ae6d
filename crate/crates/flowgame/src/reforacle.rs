//! Brute-force reference implementations.
//!
//! Everything in this module recomputes solver results by exhaustive
//! enumeration: coalition values from all `2^n` max flows, path family sizes
//! from all simple paths, the optimal guarantee factor from a lazily grown
//! full-coalition LP, and the nucleon from the face recursion over an
//! explicit vertex representation. These are the ground truth the fast
//! solvers are tested against; they deliberately share as little code with
//! them as possible.
//!
//! All entry points enforce hard size guards and return an error beyond
//! them; the intended domain is desk-scale instances.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::coresolve::Allocation;
use crate::flowcore::{coalition_value, combinations, path_avoiding};
use crate::lpexact::{solve_lp, Constraint, LpOutcome, Sense, VertexEnumerator};
use crate::netmodel::{ArcId, FlowNetwork, PlayerIndex};
use crate::{rat_int, Rat};

/// Errors from the reference oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {actual} players, this oracle is limited to {limit}")]
    TooManyPlayers { limit: usize, actual: usize },
    #[error("instance has {actual} arcs, this oracle is limited to {limit}")]
    TooManyArcs { limit: usize, actual: usize },
    #[error("a source-sink path avoids the restriction set, the family size is unbounded")]
    UnboundedFamily,
    #[error("grand coalition value is zero")]
    ZeroValue,
}

const GAMMA_PLAYER_LIMIT: usize = 16;
const SIGMA_ARC_LIMIT: usize = 12;
const NUCLEON_PLAYER_LIMIT: usize = 10;

/// Every coalition's value, indexed by player bitmask.
#[derive(Debug, Clone)]
pub struct GammaTable {
    index: PlayerIndex,
    values: Vec<u64>,
}

impl GammaTable {
    pub fn index(&self) -> &PlayerIndex {
        &self.index
    }

    pub fn player_count(&self) -> usize {
        self.index.len()
    }

    pub fn full_mask(&self) -> u64 {
        self.index.full_mask()
    }

    pub fn value(&self, mask: u64) -> u64 {
        self.values[mask as usize]
    }

    /// Value of the grand coalition.
    pub fn grand_value(&self) -> u64 {
        self.values[self.full_mask() as usize]
    }

    /// Total allocated to the players of a mask.
    pub fn mask_total(&self, alloc: &Allocation, mask: u64) -> Rat {
        (0..self.index.len())
            .filter(|i| mask & (1 << i) != 0)
            .fold(Rat::zero(), |acc, i| acc + &alloc.values[i])
    }
}

/// Computes all `2^n` coalition values by independent max-flow runs.
pub fn gamma_table(net: &FlowNetwork) -> Result<GammaTable, OracleError> {
    let index = PlayerIndex::new(net);
    if index.len() > GAMMA_PLAYER_LIMIT {
        return Err(OracleError::TooManyPlayers {
            limit: GAMMA_PLAYER_LIMIT,
            actual: index.len(),
        });
    }
    let values = (0..=index.full_mask())
        .map(|mask| coalition_value(net, &index.coalition_of(mask)))
        .collect();
    Ok(GammaTable { index, values })
}

/// Path family size and all minimum constrained cuts, both by exhaustion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteSigma {
    pub value: u64,
    /// Every minimum-size subset of the restriction set meeting all
    /// source-sink paths, in lexicographic order.
    pub min_cuts: Vec<BTreeSet<ArcId>>,
}

/// Recomputes the maximum partially disjoint path family by dynamic
/// programming over all simple paths, and the minimum constrained cuts by
/// scanning all subsets. Asserts that the two sizes agree.
pub fn brute_sigma(net: &FlowNetwork, f: &BTreeSet<ArcId>) -> Result<BruteSigma, OracleError> {
    if net.arc_count() > SIGMA_ARC_LIMIT {
        return Err(OracleError::TooManyArcs {
            limit: SIGMA_ARC_LIMIT,
            actual: net.arc_count(),
        });
    }
    let paths = all_simple_paths(net);
    let f_list: Vec<ArcId> = f.iter().copied().collect();
    let bit_of = |a: ArcId| f_list.iter().position(|&x| x == a);

    let mut masks: BTreeSet<u64> = BTreeSet::new();
    for p in &paths {
        let mut m = 0u64;
        for &a in p {
            if let Some(b) = bit_of(a) {
                m |= 1 << b;
            }
        }
        if m == 0 {
            return Err(OracleError::UnboundedFamily);
        }
        masks.insert(m);
    }
    let masks: Vec<u64> = masks.into_iter().collect();

    // Largest family of paths with pairwise disjoint restriction masks.
    fn best(avail: u64, masks: &[u64], memo: &mut BTreeMap<u64, u64>) -> u64 {
        if let Some(&v) = memo.get(&avail) {
            return v;
        }
        let mut top = 0;
        for &m in masks {
            if m & !avail == 0 {
                top = top.max(1 + best(avail & !m, masks, memo));
            }
        }
        memo.insert(avail, top);
        top
    }
    let full = if f_list.is_empty() {
        0
    } else {
        (1u64 << f_list.len()) - 1
    };
    let mut memo = BTreeMap::new();
    let value = best(full, &masks, &mut memo);

    // Smallest subsets of f meeting every source-sink path.
    let mut min_cuts = Vec::new();
    for k in 0..=f_list.len() {
        let mut chosen = Vec::new();
        combinations(&f_list, k, 0, &mut chosen, &mut |subset| {
            let set: BTreeSet<ArcId> = subset.iter().copied().collect();
            if path_avoiding(net, &set).is_none() {
                min_cuts.push(set);
            }
            true
        });
        if !min_cuts.is_empty() {
            assert_eq!(
                k as u64, value,
                "family size and cut size must agree by duality"
            );
            break;
        }
    }
    Ok(BruteSigma { value, min_cuts })
}

/// All simple source-sink paths, depth-first in arc id order.
fn all_simple_paths(net: &FlowNetwork) -> Vec<Vec<ArcId>> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let mut on_path = vec![false; net.vertex_count()];
    fn dfs(
        net: &FlowNetwork,
        v: crate::netmodel::VertexId,
        stack: &mut Vec<ArcId>,
        on_path: &mut Vec<bool>,
        out: &mut Vec<Vec<ArcId>>,
    ) {
        if v == net.sink() {
            out.push(stack.clone());
            return;
        }
        on_path[v.0] = true;
        for &a in net.out_arcs(v) {
            let h = net.arc(a).head;
            if on_path[h.0] {
                continue;
            }
            stack.push(a);
            dfs(net, h, stack, on_path, out);
            stack.pop();
        }
        on_path[v.0] = false;
    }
    dfs(net, net.source(), &mut stack, &mut on_path, &mut out);
    out
}

/// The optimal guarantee factor recomputed from first principles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteEpsilon {
    pub epsilon: Rat,
    /// An allocation of the grand-coalition value witnessing the factor.
    pub witness: Allocation,
}

/// Maximizes `epsilon` such that some allocation of the grand-coalition
/// value gives every coalition at least `(1 + epsilon)` times its value.
/// Works directly over all `2^n` coalitions, adding the most violated
/// constraint until the optimum satisfies every coalition.
pub fn brute_epsilon_star(net: &FlowNetwork) -> Result<BruteEpsilon, OracleError> {
    let table = gamma_table(net)?;
    let n = table.player_count();
    let grand = table.grand_value();
    if grand == 0 {
        return Err(OracleError::ZeroValue);
    }

    // Variables: n allocation entries, then epsilon.
    let dims = n + 1;
    let coalition_row = |mask: u64| {
        let gamma = rat_int(table.value(mask) as i64);
        let mut coeffs = vec![Rat::zero(); dims];
        for i in 0..n {
            if mask & (1 << i) != 0 {
                coeffs[i] = Rat::one();
            }
        }
        coeffs[n] = -gamma.clone();
        Constraint::ge(coeffs, gamma, format!("S{mask}"))
    };

    let mut objective = vec![Rat::zero(); dims];
    objective[n] = Rat::one();

    let mut rows: Vec<Constraint> = Vec::new();
    let mut total = vec![Rat::one(); dims];
    total[n] = Rat::zero();
    rows.push(Constraint::eq(
        total,
        rat_int(grand as i64),
        "efficiency",
    ));
    // The grand-coalition row bounds epsilon above.
    rows.push(coalition_row(table.full_mask()));

    loop {
        let (value, point) = match solve_lp(rows.iter(), dims, &objective, Sense::Maximize) {
            LpOutcome::Optimal { value, point } => (value, point),
            other => panic!("guarantee LP must stay solvable, got {:?}", other),
        };
        // Most violated coalition at the claimed optimum, smallest mask on
        // ties.
        let alloc = Allocation::new(point[..n].to_vec());
        let mut worst: Option<(Rat, u64)> = None;
        for mask in 1..=table.full_mask() {
            let gamma = rat_int(table.value(mask) as i64);
            let assigned = table.mask_total(&alloc, mask);
            let shortfall = (Rat::one() + &value) * gamma - assigned;
            if shortfall.is_positive() && worst.as_ref().map_or(true, |(w, _)| shortfall > *w) {
                worst = Some((shortfall, mask));
            }
        }
        match worst {
            Some((_, mask)) => {
                rows.push(coalition_row(mask));
            }
            None => {
                return Ok(BruteEpsilon {
                    epsilon: value,
                    witness: alloc,
                });
            }
        }
    }
}

/// First coalition (by mask) paid less than `factor` times its value, or
/// `None` when the allocation is efficient and meets every coalition.
pub fn brute_first_violation(
    table: &GammaTable,
    alloc: &Allocation,
    factor: &Rat,
    expected_total: &Rat,
) -> Option<u64> {
    if alloc.total() != *expected_total {
        return Some(table.full_mask());
    }
    (1..table.full_mask()).find(|&mask| {
        table.mask_total(alloc, mask) < factor * rat_int(table.value(mask) as i64)
    })
}

/// A satisfaction ratio; coalitions of value zero are unboundedly satisfied
/// and sort last.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Satisfaction {
    Finite(Rat),
    Unbounded,
}

/// The sorted vector of satisfaction ratios `x(S) / gamma(S)` over all
/// proper nonempty coalitions; the object the nucleon lexicographically
/// maximizes.
pub fn excess_vector(table: &GammaTable, alloc: &Allocation) -> Vec<Satisfaction> {
    let mut v: Vec<Satisfaction> = (1..table.full_mask())
        .map(|mask| {
            let gamma = table.value(mask);
            if gamma == 0 {
                Satisfaction::Unbounded
            } else {
                Satisfaction::Finite(table.mask_total(alloc, mask) / rat_int(gamma as i64))
            }
        })
        .collect();
    v.sort();
    v
}

/// Vertices of the auxiliary core computed from its defining inequalities
/// (not from cuts): intersect the allocation simplex with every positive
/// coalition constraint. Sorted for comparison.
pub fn brute_core_vertices(net: &FlowNetwork) -> Result<Vec<Allocation>, OracleError> {
    let table = gamma_table(net)?;
    if table.player_count() > NUCLEON_PLAYER_LIMIT {
        return Err(OracleError::TooManyPlayers {
            limit: NUCLEON_PLAYER_LIMIT,
            actual: table.player_count(),
        });
    }
    let sigma_private = private_family_size(net)?;
    let mut ve = VertexEnumerator::simplex(table.player_count(), rat_int(sigma_private as i64));
    for mask in 1..table.full_mask() {
        let gamma = table.value(mask);
        if gamma == 0 {
            continue;
        }
        ve.add_constraint(&mask_row(&table, mask, rat_int(gamma as i64)));
    }
    let mut vertices: Vec<Allocation> = ve
        .vertices()
        .iter()
        .map(|v| Allocation::new(v.clone()))
        .collect();
    vertices.sort();
    Ok(vertices)
}

fn mask_row(table: &GammaTable, mask: u64, rhs: Rat) -> Constraint {
    let mut coeffs = vec![Rat::zero(); table.player_count()];
    for i in 0..table.player_count() {
        if mask & (1 << i) != 0 {
            coeffs[i] = Rat::one();
        }
    }
    Constraint::ge(coeffs, rhs, format!("S{mask}"))
}

/// The grand-coalition value of the auxiliary game: the largest family of
/// source-sink paths pairwise disjoint on private arcs, recomputed here by
/// the path DP when small enough, otherwise by the flow primitive.
fn private_family_size(net: &FlowNetwork) -> Result<u64, OracleError> {
    let private = net.private_arc_ids();
    if net.arc_count() <= SIGMA_ARC_LIMIT {
        Ok(brute_sigma(net, &private)?.value)
    } else {
        crate::flowcore::max_partially_disjoint(net, &private)
            .map(|w| w.value)
            .map_err(|_| OracleError::UnboundedFamily)
    }
}

/// Outcome of the nucleon recursion: a single allocation, or the final face
/// when nothing distinguishes its points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NucleonSet {
    Point(Allocation),
    Face(Vec<Allocation>),
}

/// Nucleon of the auxiliary game by face recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteNucleon {
    /// The optimal slack per round, strictly increasing.
    pub rounds: Vec<Rat>,
    pub outcome: NucleonSet,
}

/// Runs the nucleon face recursion with an explicit vertex representation:
/// repeatedly maximize the minimum satisfaction ratio over the coalitions
/// whose ratio still varies on the current face, then restrict the face to
/// the maximizers. Allocations are in the auxiliary scale (they sum to the
/// private path family size).
pub fn brute_nucleon(net: &FlowNetwork) -> Result<BruteNucleon, OracleError> {
    let table = gamma_table(net)?;
    let n = table.player_count();
    if n > NUCLEON_PLAYER_LIMIT {
        return Err(OracleError::TooManyPlayers {
            limit: NUCLEON_PLAYER_LIMIT,
            actual: n,
        });
    }
    let sigma_private = private_family_size(net)?;
    if sigma_private == 0 {
        return Err(OracleError::ZeroValue);
    }

    let mut ve = VertexEnumerator::simplex(n, rat_int(sigma_private as i64));
    let mut unfixed: BTreeSet<u64> = (1..table.full_mask())
        .filter(|&m| table.value(m) > 0)
        .collect();
    let mut rounds: Vec<Rat> = Vec::new();

    for _round in 0..=(table.full_mask() as usize) {
        // Fix every coalition whose ratio is constant across the face.
        unfixed.retain(|&mask| {
            let gamma = rat_int(table.value(mask) as i64);
            let ratios: Vec<Rat> = ve
                .vertices()
                .iter()
                .map(|v| table.mask_total(&Allocation::new(v.clone()), mask) / &gamma)
                .collect();
            ratios.iter().any(|r| *r != ratios[0])
        });
        if unfixed.is_empty() || ve.vertices().len() <= 1 {
            break;
        }

        let epsilon = maximize_min_ratio(&table, &ve, &unfixed);
        if let Some(prev) = rounds.last() {
            assert!(
                epsilon > *prev,
                "round slack must strictly increase: {} then {}",
                prev,
                epsilon
            );
        }
        // Restrict the face to the maximizers.
        let level = Rat::one() + &epsilon;
        for &mask in &unfixed {
            let rhs = &level * rat_int(table.value(mask) as i64);
            ve.add_constraint(&mask_row(&table, mask, rhs));
        }
        assert!(!ve.is_empty(), "maximizer face cannot be empty");
        rounds.push(epsilon);
    }
    assert!(
        unfixed.is_empty() || ve.vertices().len() <= 1,
        "face recursion must terminate by fixing every coalition"
    );

    let mut vertices: Vec<Allocation> = ve
        .vertices()
        .iter()
        .map(|v| Allocation::new(v.clone()))
        .collect();
    vertices.sort();
    let outcome = if vertices.len() == 1 {
        NucleonSet::Point(vertices.pop().unwrap())
    } else {
        NucleonSet::Face(vertices)
    };
    Ok(BruteNucleon { rounds, outcome })
}

/// Maximum over the face of the minimum ratio among the given coalitions,
/// minus one. Solved as a lazily separated LP over convex-combination
/// weights of the face vertices.
fn maximize_min_ratio(table: &GammaTable, ve: &VertexEnumerator, unfixed: &BTreeSet<u64>) -> Rat {
    let vertices = ve.vertices();
    let k = vertices.len();
    // Variables: k weights, then epsilon.
    let dims = k + 1;
    let mut objective = vec![Rat::zero(); dims];
    objective[k] = Rat::one();

    let ratio_row = |mask: u64| {
        let gamma = rat_int(table.value(mask) as i64);
        let mut coeffs: Vec<Rat> = vertices
            .iter()
            .map(|v| table.mask_total(&Allocation::new(v.clone()), mask) / &gamma)
            .collect();
        coeffs.push(-Rat::one());
        Constraint::ge(coeffs, Rat::one(), format!("S{mask}"))
    };

    let mut rows: Vec<Constraint> = Vec::new();
    for i in 0..k {
        let mut c = vec![Rat::zero(); dims];
        c[i] = Rat::one();
        rows.push(Constraint::ge(c, Rat::zero(), format!("w{i}")));
    }
    let mut total = vec![Rat::one(); dims];
    total[k] = Rat::zero();
    rows.push(Constraint::eq(total, Rat::one(), "w-total"));
    // Seed with the first coalition to bound epsilon.
    let first = *unfixed.iter().next().expect("nonempty unfixed set");
    rows.push(ratio_row(first));

    loop {
        let (eps, point) = match solve_lp(rows.iter(), dims, &objective, Sense::Maximize) {
            LpOutcome::Optimal { value, point } => (value, point),
            other => panic!("ratio LP must stay solvable, got {:?}", other),
        };
        let x: Vec<Rat> = (0..table.player_count())
            .map(|j| {
                vertices
                    .iter()
                    .zip(&point)
                    .fold(Rat::zero(), |acc, (v, w)| acc + &v[j] * w)
            })
            .collect();
        let alloc = Allocation::new(x);
        let level = Rat::one() + &eps;
        let mut worst: Option<(Rat, u64)> = None;
        for &mask in unfixed {
            let gamma = rat_int(table.value(mask) as i64);
            let shortfall = &level * &gamma - table.mask_total(&alloc, mask);
            if shortfall.is_positive() && worst.as_ref().map_or(true, |(w, _)| shortfall > *w) {
                worst = Some((shortfall, mask));
            }
        }
        match worst {
            Some((_, mask)) => {
                rows.push(ratio_row(mask));
            }
            None => return eps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coresolve::{auxiliary_core_vertices, epsilon_star};
    use crate::flowcore::{enumerate_min_constrained_cuts, max_partially_disjoint};
    use crate::{rat, rat_int};

    const INSTANCE_A: &str =
        "vertices 3\nsource s\nsink t\narc s v public\narc v t private 1\narc v t private 2\n";
    const INSTANCE_B: &str = "vertices 2\nsource s\nsink t\narc s t private 1\narc s t private 2\n";
    const INSTANCE_C: &str = "vertices 2\nsource s\nsink t\narc s t private 1\n";
    const INSTANCE_D: &str = "vertices 4\nsource s\nsink t\n\
         arc s a private 1\narc a t private 2\narc s b private 3\narc b t private 4\n\
         arc a b public\n";

    fn fractions(vals: &[(i64, i64)]) -> Allocation {
        Allocation::new(vals.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn gamma_table_matches_hand_values() {
        let net = FlowNetwork::parse(INSTANCE_A).unwrap();
        let t = gamma_table(&net).unwrap();
        assert_eq!(t.value(0b00), 0);
        assert_eq!(t.value(0b01), 1);
        assert_eq!(t.value(0b10), 1);
        assert_eq!(t.value(0b11), 1);
    }

    #[test]
    fn brute_sigma_agrees_with_flow_computation() {
        for text in [INSTANCE_A, INSTANCE_B, INSTANCE_C, INSTANCE_D] {
            let net = FlowNetwork::parse(text).unwrap();
            for f in [net.private_arc_ids(), net.arc_ids().collect()] {
                let brute = brute_sigma(&net, &f).unwrap();
                let fast = max_partially_disjoint(&net, &f).unwrap();
                assert_eq!(brute.value, fast.value, "sigma mismatch on {:?}", f);
                let enumerated = enumerate_min_constrained_cuts(&net, &f, 1000).unwrap();
                assert_eq!(brute.min_cuts, enumerated.cuts, "cut mismatch on {:?}", f);
            }
        }
    }

    #[test]
    fn brute_sigma_detects_unbounded_families() {
        let text = "vertices 2\nsource s\nsink t\narc s t private 1\narc s t public\n";
        let net = FlowNetwork::parse(text).unwrap();
        assert_eq!(
            brute_sigma(&net, &net.private_arc_ids()),
            Err(OracleError::UnboundedFamily)
        );
    }

    #[test]
    fn brute_epsilon_matches_the_ratio_formula() {
        for (text, expected) in [
            (INSTANCE_A, rat(-1, 2)),
            (INSTANCE_B, rat_int(0)),
            (INSTANCE_C, rat_int(0)),
            (INSTANCE_D, rat_int(0)),
        ] {
            let net = FlowNetwork::parse(text).unwrap();
            let brute = brute_epsilon_star(&net).unwrap();
            assert_eq!(brute.epsilon, expected);
            assert_eq!(epsilon_star(&net).unwrap().epsilon_star, expected);
        }
    }

    #[test]
    fn core_vertices_from_inequalities_match_the_cut_description() {
        for text in [INSTANCE_A, INSTANCE_B, INSTANCE_C, INSTANCE_D] {
            let net = FlowNetwork::parse(text).unwrap();
            let brute = brute_core_vertices(&net).unwrap();
            let mut from_cuts = auxiliary_core_vertices(&net, 1000).unwrap().vertices;
            from_cuts.sort();
            assert_eq!(brute, from_cuts, "vertex mismatch on {}", text);
        }
    }

    #[test]
    fn satisfaction_vector_sorts_ratios() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let t = gamma_table(&net).unwrap();
        let v = excess_vector(&t, &fractions(&[(2, 3), (1, 3), (1, 3), (2, 3)]));
        assert_eq!(v.len(), 14);
        assert_eq!(v[0], Satisfaction::Finite(rat(1, 1)));
        // Coalitions of value zero sort last.
        assert_eq!(v[13], Satisfaction::Unbounded);
        let finite = v
            .iter()
            .filter(|s| matches!(s, Satisfaction::Finite(_)))
            .count();
        assert_eq!(finite, 7);
    }

    #[test]
    fn nucleon_of_parallel_arcs_splits_evenly() {
        let net = FlowNetwork::parse(INSTANCE_B).unwrap();
        let b = brute_nucleon(&net).unwrap();
        assert_eq!(b.rounds, vec![rat_int(0)]);
        assert_eq!(
            b.outcome,
            NucleonSet::Point(fractions(&[(1, 1), (1, 1)]))
        );
    }

    #[test]
    fn nucleon_of_shared_bottleneck() {
        let net = FlowNetwork::parse(INSTANCE_A).unwrap();
        let b = brute_nucleon(&net).unwrap();
        assert_eq!(b.rounds, vec![rat_int(0)]);
        assert_eq!(
            b.outcome,
            NucleonSet::Point(fractions(&[(1, 1), (1, 1)]))
        );
    }

    #[test]
    fn single_player_nucleon_is_the_only_core_point() {
        let net = FlowNetwork::parse(INSTANCE_C).unwrap();
        let b = brute_nucleon(&net).unwrap();
        assert_eq!(b.rounds, Vec::<Rat>::new());
        assert_eq!(b.outcome, NucleonSet::Point(fractions(&[(1, 1)])));
    }

    #[test]
    fn two_player_chain_nucleon_is_a_segment() {
        let text = "vertices 3\nsource s\nsink t\narc s m private 1\narc m t private 2\n";
        let net = FlowNetwork::parse(text).unwrap();
        let b = brute_nucleon(&net).unwrap();
        assert_eq!(b.rounds, Vec::<Rat>::new());
        assert_eq!(
            b.outcome,
            NucleonSet::Face(vec![
                fractions(&[(0, 1), (1, 1)]),
                fractions(&[(1, 1), (0, 1)]),
            ])
        );
    }

    #[test]
    fn diamond_nucleon_needs_a_second_round() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let b = brute_nucleon(&net).unwrap();
        assert_eq!(b.rounds, vec![rat_int(0), rat(1, 3)]);
        assert_eq!(
            b.outcome,
            NucleonSet::Point(fractions(&[(2, 3), (1, 3), (1, 3), (2, 3)]))
        );
    }

    #[test]
    fn nucleon_point_lexicographically_dominates_core_points() {
        let net = FlowNetwork::parse(INSTANCE_D).unwrap();
        let t = gamma_table(&net).unwrap();
        let nucleon = fractions(&[(2, 3), (1, 3), (1, 3), (2, 3)]);
        let best = excess_vector(&t, &nucleon);
        for other in [
            fractions(&[(1, 1), (0, 1), (0, 1), (1, 1)]),
            fractions(&[(1, 1), (0, 1), (1, 1), (0, 1)]),
            fractions(&[(1, 2), (1, 2), (1, 2), (1, 2)]),
        ] {
            assert!(best >= excess_vector(&t, &other));
        }
    }

    #[test]
    fn oversize_instances_are_rejected() {
        // Thirteen parallel private arcs exceed the sigma oracle's arc cap.
        let mut text = String::from("vertices 2\nsource s\nsink t\n");
        for i in 1..=13 {
            text.push_str(&format!("arc s t private {i}\n"));
        }
        let net = FlowNetwork::parse(&text).unwrap();
        assert_eq!(
            brute_sigma(&net, &net.private_arc_ids()),
            Err(OracleError::TooManyArcs {
                limit: 12,
                actual: 13
            })
        );
    }

    #[test]
    fn first_violation_scan_matches_membership() {
        let net = FlowNetwork::parse(INSTANCE_A).unwrap();
        let t = gamma_table(&net).unwrap();
        let expected = rat_int(2);
        assert_eq!(
            brute_first_violation(&t, &fractions(&[(1, 1), (1, 1)]), &Rat::one(), &expected),
            None
        );
        assert_eq!(
            brute_first_violation(&t, &fractions(&[(1, 2), (3, 2)]), &Rat::one(), &expected),
            Some(0b01)
        );
    }
}
