//! Randomized structural properties of the library, checked over arbitrary
//! small networks. Every comparison is exact.

use std::collections::BTreeSet;

use flowgame::coresolve::{
    approx_core_membership, approx_core_vertices, auxiliary_core_membership, epsilon_star,
    scale_allocation, Allocation, Scale,
};
use flowgame::flowcore::{coalition_value, max_partially_disjoint};
use flowgame::netmodel::{ArcId, Coalition, FlowNetwork, PlayerIndex};
use flowgame::pathstruct::{decompose, BaseSystem};
use flowgame::reforacle::{brute_first_violation, brute_sigma, gamma_table};
use flowgame::{rat, rat_int, Rat};
use num::Zero;
use proptest::prelude::*;

/// Raw material for a random instance: a vertex count and arc stubs
/// `(tail index, head index, private?)`. Self-loops are dropped during
/// rendering, and only vertices that actually appear are declared.
fn arb_instance_text() -> impl Strategy<Value = String> {
    (2usize..=7).prop_flat_map(|vertex_count| {
        let arc = (0..vertex_count, 0..vertex_count, any::<bool>());
        proptest::collection::vec(arc, 1..=10)
            .prop_map(move |stubs| render_text(vertex_count, &stubs))
    })
}

fn render_text(vertex_count: usize, stubs: &[(usize, usize, bool)]) -> String {
    let name = |i: usize| format!("n{i}");
    let mut used: BTreeSet<usize> = [0, 1].into_iter().collect();
    let mut arcs: Vec<(usize, usize, bool)> = Vec::new();
    for &(tail, head, private) in stubs {
        if tail == head {
            continue;
        }
        used.insert(tail);
        used.insert(head);
        arcs.push((tail, head, private));
    }
    if arcs.is_empty() {
        // Keep at least one arc so the instance is never vacuous.
        arcs.push((0, 1, true));
    }
    let _ = vertex_count;
    let mut text = format!("vertices {}\nsource n0\nsink n1\n", used.len());
    let mut player = 1u32;
    for (tail, head, private) in arcs {
        if private {
            text.push_str(&format!("arc {} {} private {player}\n", name(tail), name(head)));
            player += 1;
        } else {
            text.push_str(&format!("arc {} {} public\n", name(tail), name(head)));
        }
    }
    text
}

/// The same material restricted to instances that survive preprocessing
/// with a nonzero grand-coalition value.
fn arb_clean_network() -> impl Strategy<Value = FlowNetwork> {
    arb_instance_text().prop_filter_map("instance must preprocess cleanly", |text| {
        let net = FlowNetwork::parse(&text).ok()?;
        let pre = net.preprocess().ok()?;
        if pre.network.arc_count() == 0 || pre.network.player_count() == 0 {
            return None;
        }
        epsilon_star(&pre.network).ok()?;
        Some(pre.network)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialization_round_trips(text in arb_instance_text()) {
        let net = FlowNetwork::parse(&text).expect("rendered text parses");
        let reparsed = FlowNetwork::parse(&net.serialize()).expect("serialized text parses");
        prop_assert_eq!(net, reparsed);
    }

    #[test]
    fn preprocessing_is_idempotent(text in arb_instance_text()) {
        let net = FlowNetwork::parse(&text).expect("rendered text parses");
        if let Ok(pre) = net.preprocess() {
            prop_assert!(pre.network.validate().is_clean());
            let again = pre.network.preprocess().expect("clean instances preprocess");
            prop_assert!(again.removed_arcs.is_empty());
            prop_assert!(again.removed_players.is_empty());
            prop_assert!(again.removed_vertices.is_empty());
            prop_assert_eq!(again.network, pre.network);
        }
    }

    #[test]
    fn path_family_sizes_match_the_exhaustive_count(net in arb_clean_network()) {
        let private = net.private_arc_ids();
        let all: BTreeSet<ArcId> = net.arc_ids().collect();
        for family in [&private, &all] {
            let brute = brute_sigma(&net, family).expect("small instance");
            let fast = max_partially_disjoint(&net, family).expect("clean instance");
            prop_assert_eq!(brute.value, fast.value);
            prop_assert_eq!(fast.paths.len() as u64, fast.value);
            prop_assert_eq!(fast.min_cut.len() as u64, fast.value);
        }
    }

    #[test]
    fn coalition_values_are_monotone_and_capped(net in arb_clean_network(), picks in proptest::collection::vec(any::<bool>(), 12)) {
        let rep = epsilon_star(&net).expect("clean instance");
        let index = PlayerIndex::new(&net);
        let chosen: Vec<_> = index
            .players()
            .iter()
            .zip(picks.iter().cycle())
            .filter(|&(_, &keep)| keep)
            .map(|(&p, _)| p)
            .collect();
        let small = Coalition::from_players(chosen.clone());
        let full = Coalition::from_players(index.players().iter().copied());
        let small_value = coalition_value(&net, &small);
        let full_value = coalition_value(&net, &full);
        prop_assert!(small_value <= full_value);
        prop_assert_eq!(full_value, rep.sigma_all);
        // Removing one member never raises the value.
        if let Some(&first) = chosen.first() {
            let mut fewer = chosen.clone();
            fewer.retain(|&p| p != first);
            let fewer_value = coalition_value(&net, &Coalition::from_players(fewer));
            prop_assert!(fewer_value <= small_value);
        }
    }

    #[test]
    fn decomposition_reproduces_every_simple_path(net in arb_clean_network()) {
        let base = BaseSystem::build(&net).expect("clean instance");
        let mut stack: Vec<ArcId> = Vec::new();
        let mut on_path = vec![false; net.vertex_count()];
        let mut paths: Vec<Vec<ArcId>> = Vec::new();
        collect_paths(&net, net.source(), &mut stack, &mut on_path, &mut paths);
        for path in &paths {
            let pieces = decompose(&net, &base, path).expect("simple path decomposes");
            let flat: Vec<ArcId> = pieces.iter().flat_map(|p| p.arcs().to_vec()).collect();
            prop_assert_eq!(&flat, path);
        }
    }

    #[test]
    fn scaling_round_trips_and_preserves_membership(net in arb_clean_network(), weights in proptest::collection::vec(0i64..=4, 12)) {
        let rep = epsilon_star(&net).expect("clean instance");
        let n = net.player_count();
        let total: i64 = weights.iter().take(n).sum();
        prop_assume!(total > 0);
        let sigma = rat_int(rep.sigma_private as i64);
        let aux = Allocation::new(
            weights
                .iter()
                .take(n)
                .map(|&w| rat(w, 1) * sigma.clone() / rat(total, 1))
                .collect(),
        );
        let orig = scale_allocation(&aux, Scale::Auxiliary, Scale::Original, &rep);
        let back = scale_allocation(&orig, Scale::Original, Scale::Auxiliary, &rep);
        prop_assert_eq!(&back, &aux);
        prop_assert_eq!(orig.total(), rat_int(rep.sigma_all as i64));
        // Membership is a property of the point, not of the scale it is
        // written in.
        let aux_member = auxiliary_core_membership(&net, &aux)
            .expect("dimension matches")
            .is_member();
        let orig_member = approx_core_membership(&net, &orig, &rep.epsilon_star)
            .expect("dimension matches")
            .is_member();
        prop_assert_eq!(aux_member, orig_member);
    }

    #[test]
    fn membership_test_agrees_with_the_exhaustive_check(net in arb_clean_network(), weights in proptest::collection::vec(0i64..=4, 12)) {
        prop_assume!(net.player_count() <= 10);
        let rep = epsilon_star(&net).expect("clean instance");
        let table = gamma_table(&net).expect("small instance");
        let n = net.player_count();
        let total: i64 = weights.iter().take(n).sum();
        prop_assume!(total > 0);
        let sigma = rat_int(rep.sigma_private as i64);
        let probe = Allocation::new(
            weights
                .iter()
                .take(n)
                .map(|&w| rat(w, 1) * sigma.clone() / rat(total, 1))
                .collect(),
        );
        let by_potential = auxiliary_core_membership(&net, &probe)
            .expect("dimension matches")
            .is_member();
        let by_excess =
            brute_first_violation(&table, &probe, &rat_int(1), &sigma).is_none();
        prop_assert_eq!(by_potential, by_excess);
    }

    #[test]
    fn approximate_core_vertices_are_members(net in arb_clean_network()) {
        let rep = epsilon_star(&net).expect("clean instance");
        let vertices = approx_core_vertices(&net, 256).expect("clean instance");
        for vertex in &vertices.vertices {
            prop_assert_eq!(vertex.total(), rat_int(rep.sigma_all as i64));
            prop_assert!(vertex.values.iter().all(|v| *v >= Rat::zero()));
            let verdict = approx_core_membership(&net, vertex, &rep.epsilon_star)
                .expect("dimension matches");
            prop_assert!(verdict.is_member());
        }
    }
}

fn collect_paths(
    net: &FlowNetwork,
    v: flowgame::netmodel::VertexId,
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
        collect_paths(net, h, stack, on_path, out);
        stack.pop();
    }
    on_path[v.0] = false;
}
