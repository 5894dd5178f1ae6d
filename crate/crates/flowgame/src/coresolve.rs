//! The optimal multiplicative approximate core.
//!
//! For a game value function given by max flow, the best achievable uniform
//! guarantee factor is the ratio of the two path-family sizes: with
//! `sigma_all` fully arc-disjoint source-sink paths and `sigma_private`
//! paths pairwise disjoint on private arcs only, some allocation of the
//! grand-coalition value gives every coalition at least
//! `sigma_all / sigma_private` times its own value, and no allocation does
//! better. The witness polytope is a scaled copy of the auxiliary core: the
//! convex hull of the incidence vectors of minimum constrained cuts inside
//! the private arcs.
//!
//! Membership tests run in polynomial time through a shortest-path
//! potential: an efficient nonnegative allocation meets every coalition
//! constraint at factor `c` exactly when the cheapest source-sink path,
//! priced by the allocation mass on private arcs, costs at least `c`.

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::flowcore::{
    enumerate_min_constrained_cuts, max_partially_disjoint, CutEnumerationError, SigmaWitness,
};
use crate::netmodel::{Coalition, FlowNetwork, PlayerId, PlayerIndex, ValidationReport};
use crate::pathstruct::{shortest_path_to_sink, shortest_potentials};
use crate::{rat_int, Rat};

/// Which game an allocation is expressed in: the auxiliary game whose grand
/// coalition is worth `sigma_private`, or the original game worth
/// `sigma_all`. The two differ by the constant factor
/// `sigma_all / sigma_private`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Auxiliary,
    Original,
}

/// An allocation of value to players, aligned with the sorted player order
/// of a [`PlayerIndex`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Allocation {
    pub values: Vec<Rat>,
}

impl Allocation {
    pub fn new(values: Vec<Rat>) -> Self {
        Allocation { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> Rat {
        self.values.iter().fold(Rat::zero(), |a, v| a + v)
    }

    /// Total assigned to a coalition.
    pub fn coalition_total(&self, index: &PlayerIndex, coalition: &Coalition) -> Rat {
        coalition
            .iter()
            .map(|p| index.position(p).expect("player indexed"))
            .fold(Rat::zero(), |a, i| a + &self.values[i])
    }

    pub fn scaled(&self, factor: &Rat) -> Allocation {
        Allocation {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Errors shared by the solvers in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("network violates the structural assumptions; run validation for details")]
    InvalidNetwork(ValidationReport),
    #[error("grand coalition value is zero, guarantee factors are undefined")]
    ZeroValue,
    #[error("allocation has {actual} entries but the network has {expected} players")]
    WrongDimension { expected: usize, actual: usize },
    #[error("guarantee factor 1 + epsilon must be positive")]
    InvalidEpsilon,
    #[error(transparent)]
    CutEnumeration(#[from] CutEnumerationError),
}

/// Checks the structural assumptions and returns the network's two path
/// family sizes; every solver entry point goes through this.
pub(crate) fn checked_sigmas(net: &FlowNetwork) -> Result<(SigmaWitness, SigmaWitness), CoreError> {
    let report = net.validate();
    if !report.is_clean() {
        return Err(CoreError::InvalidNetwork(report));
    }
    // A clean network has no all-public source-sink path, so both families
    // are bounded.
    let private = max_partially_disjoint(net, &net.private_arc_ids())
        .expect("validated network has no all-public path");
    let all = max_partially_disjoint(net, &net.arc_ids().collect())
        .expect("the full arc set cannot be avoided");
    if private.value == 0 {
        return Err(CoreError::ZeroValue);
    }
    Ok((private, all))
}

/// The optimal guarantee factor and its structural witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonStarReport {
    /// Maximum paths pairwise disjoint on private arcs.
    pub sigma_private: u64,
    /// Maximum fully arc-disjoint paths; equals the grand-coalition value.
    pub sigma_all: u64,
    /// `sigma_all / sigma_private - 1`.
    pub epsilon_star: Rat,
    /// `1 + epsilon_star`, the guarantee factor and the auxiliary-to-original
    /// scale factor.
    pub factor: Rat,
    /// Path family and minimum constrained cut for the private restriction.
    pub private_witness: SigmaWitness,
    /// Path family and minimum cut for the full arc set.
    pub all_witness: SigmaWitness,
}

/// The largest `epsilon` for which some efficient allocation gives every
/// coalition at least `(1 + epsilon)` times its value.
pub fn epsilon_star(net: &FlowNetwork) -> Result<EpsilonStarReport, CoreError> {
    let (private, all) = checked_sigmas(net)?;
    let factor = Rat::new(
        num::BigInt::from(all.value),
        num::BigInt::from(private.value),
    );
    Ok(EpsilonStarReport {
        sigma_private: private.value,
        sigma_all: all.value,
        epsilon_star: &factor - Rat::one(),
        factor,
        private_witness: private,
        all_witness: all,
    })
}

/// Per-arc allocation mass: the owner's share on private arcs, zero on
/// public arcs. The lengths under which potentials are computed.
pub fn arc_lengths(net: &FlowNetwork, index: &PlayerIndex, alloc: &Allocation) -> Vec<Rat> {
    net.arcs()
        .map(|(_, a)| match a.player() {
            None => Rat::zero(),
            Some(p) => alloc.values[index.position(p).expect("player indexed")].clone(),
        })
        .collect()
}

/// Outcome of a membership test, carrying an exact witness either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipVerdict {
    /// In the polytope; the potential assigns each vertex its truncated
    /// shortest-path distance and certifies every coalition constraint.
    Member { potential: Vec<Rat> },
    NotEfficient { total: Rat, expected: Rat },
    NegativePlayer { player: PlayerId, value: Rat },
    /// A coalition paid less than `required = factor * value`.
    DeficientCoalition {
        coalition: Coalition,
        coalition_value: u64,
        assigned: Rat,
        required: Rat,
    },
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipVerdict::Member { .. })
    }
}

/// Shared membership test: efficiency against `expected_total`, then the
/// shortest-path potential against `factor`.
fn membership_with_factor(
    net: &FlowNetwork,
    index: &PlayerIndex,
    alloc: &Allocation,
    factor: &Rat,
    expected_total: &Rat,
) -> MembershipVerdict {
    let total = alloc.total();
    if total != *expected_total {
        return MembershipVerdict::NotEfficient {
            total,
            expected: expected_total.clone(),
        };
    }
    for (i, v) in alloc.values.iter().enumerate() {
        if v.is_negative() {
            let player = index.players()[i];
            // A negative share already violates the player's singleton
            // constraint, whose right side is nonnegative.
            return MembershipVerdict::NegativePlayer {
                player,
                value: v.clone(),
            };
        }
    }
    let lengths = arc_lengths(net, index, alloc);
    let (dist, path) =
        shortest_path_to_sink(net, &lengths).expect("validated network connects source to sink");
    if dist < *factor {
        let coalition = Coalition::from_players(
            path.iter().filter_map(|&a| net.arc(a).player()),
        );
        let coalition_value = crate::flowcore::coalition_value(net, &coalition);
        let required = factor * rat_int(coalition_value as i64);
        return MembershipVerdict::DeficientCoalition {
            assigned: alloc.coalition_total(index, &coalition),
            coalition,
            coalition_value,
            required,
        };
    }
    let potential = shortest_potentials(net, &lengths)
        .into_iter()
        .map(|d| match d {
            Some(d) if d < *factor => d,
            // Unreachable vertices sit on the sink side.
            _ => factor.clone(),
        })
        .collect();
    MembershipVerdict::Member { potential }
}

/// Membership in the auxiliary core: nonnegative, totals `sigma_private`,
/// and every coalition receives at least its full value.
pub fn auxiliary_core_membership(
    net: &FlowNetwork,
    alloc: &Allocation,
) -> Result<MembershipVerdict, CoreError> {
    let (private, _) = checked_sigmas(net)?;
    let index = PlayerIndex::new(net);
    if alloc.len() != index.len() {
        return Err(CoreError::WrongDimension {
            expected: index.len(),
            actual: alloc.len(),
        });
    }
    Ok(membership_with_factor(
        net,
        &index,
        alloc,
        &Rat::one(),
        &rat_int(private.value as i64),
    ))
}

/// Membership in the `epsilon`-approximate core of the original game:
/// totals `sigma_all` and every coalition receives at least
/// `(1 + epsilon)` times its value. Requires `epsilon > -1`.
pub fn approx_core_membership(
    net: &FlowNetwork,
    alloc: &Allocation,
    epsilon: &Rat,
) -> Result<MembershipVerdict, CoreError> {
    let factor = Rat::one() + epsilon;
    if !factor.is_positive() {
        return Err(CoreError::InvalidEpsilon);
    }
    let (_, all) = checked_sigmas(net)?;
    let index = PlayerIndex::new(net);
    if alloc.len() != index.len() {
        return Err(CoreError::WrongDimension {
            expected: index.len(),
            actual: alloc.len(),
        });
    }
    Ok(membership_with_factor(
        net,
        &index,
        alloc,
        &factor,
        &rat_int(all.value as i64),
    ))
}

/// The auxiliary core's vertex set, up to `cap` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreVertices {
    pub vertices: Vec<Allocation>,
    pub truncated: bool,
}

/// Vertices of the auxiliary core: incidence allocations of the minimum
/// constrained cuts inside the private arcs, in lexicographic cut order.
pub fn auxiliary_core_vertices(net: &FlowNetwork, cap: usize) -> Result<CoreVertices, CoreError> {
    let _ = checked_sigmas(net)?;
    let index = PlayerIndex::new(net);
    let cuts = enumerate_min_constrained_cuts(net, &net.private_arc_ids(), cap)?;
    let vertices = cuts
        .cuts
        .iter()
        .map(|cut| {
            let mut values = vec![Rat::zero(); index.len()];
            for &a in cut {
                let p = net.arc(a).player().expect("constrained cuts are private");
                values[index.position(p).expect("player indexed")] = Rat::one();
            }
            Allocation::new(values)
        })
        .collect();
    Ok(CoreVertices {
        vertices,
        truncated: cuts.truncated,
    })
}

/// Vertices of the optimal approximate core of the original game: the
/// auxiliary vertices scaled by the guarantee factor.
pub fn approx_core_vertices(net: &FlowNetwork, cap: usize) -> Result<CoreVertices, CoreError> {
    let report = epsilon_star(net)?;
    let aux = auxiliary_core_vertices(net, cap)?;
    Ok(CoreVertices {
        vertices: aux
            .vertices
            .iter()
            .map(|v| v.scaled(&report.factor))
            .collect(),
        truncated: aux.truncated,
    })
}

/// Converts an allocation between the auxiliary and original scales.
pub fn scale_allocation(
    alloc: &Allocation,
    from: Scale,
    to: Scale,
    report: &EpsilonStarReport,
) -> Allocation {
    match (from, to) {
        (Scale::Auxiliary, Scale::Original) => alloc.scaled(&report.factor),
        (Scale::Original, Scale::Auxiliary) => alloc.scaled(&report.factor.recip()),
        _ => alloc.clone(),
    }
}

/// Result of the potential characterization: the exact shortest-path
/// distances under the allocation's arc lengths, and whether the sink
/// distance reaches the required factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialCheck {
    pub sink_distance: Rat,
    pub meets_factor: bool,
    /// A cheapest source-sink path; a violation witness when the check
    /// fails.
    pub cheapest_path: Vec<crate::netmodel::ArcId>,
    pub distances: Vec<Option<Rat>>,
}

/// The potential form of the membership test, exposed for reporting: an
/// efficient nonnegative allocation satisfies all coalition constraints at
/// `factor` iff the cheapest source-sink path costs at least `factor`.
pub fn potential_characterization_check(
    net: &FlowNetwork,
    index: &PlayerIndex,
    alloc: &Allocation,
    factor: &Rat,
) -> Option<PotentialCheck> {
    let lengths = arc_lengths(net, index, alloc);
    let (sink_distance, cheapest_path) = shortest_path_to_sink(net, &lengths)?;
    let distances = shortest_potentials(net, &lengths);
    Some(PotentialCheck {
        meets_factor: sink_distance >= *factor,
        sink_distance,
        cheapest_path,
        distances,
    })
}
