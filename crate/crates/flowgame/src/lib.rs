//! Exact solver library for cooperative flow games on unit-capacity directed
//! networks in which every arc is either owned by a single player (private)
//! or free for everyone to use (public).
//!
//! The crate is organised bottom-up:
//!
//! * [`netmodel`] - network representation, text format, validation and
//!   preprocessing.
//! * [`flowcore`] - exact combinatorial flow primitives: coalition values,
//!   partially disjoint path systems, constrained cuts, min-cost disjoint
//!   paths.
//! * [`pathstruct`] - base path systems, jumps, walk decompositions and
//!   shortest-path potentials.
//! * [`lpexact`] - exact rational LP machinery: constraint pools, a two-phase
//!   simplex with Bland's rule, functional ranges and vertex enumeration.
//! * [`coresolve`] - the optimal multiplicative approximate core and the
//!   auxiliary core (membership, vertices, potential characterization).
//! * [`nucleonengine`] - the sequential-LP nucleon solver driven by
//!   flow-based separation oracles.
//! * [`reforacle`] - brute-force reference implementations used to
//!   cross-check every solver result at desk scale.
//!
//! All arithmetic on allocations, potentials and LP data is exact rational
//! arithmetic; no floating point is used anywhere in the solver paths.

pub mod netmodel;
pub mod flowcore;
pub mod pathstruct;
pub mod lpexact;
pub mod coresolve;
pub mod nucleonengine;
pub mod reforacle;

/// Exact rational scalar used throughout the crate.
pub type Rat = num::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    use num::BigInt;
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as an exact rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(num::BigInt::from(n))
}

/// Renders a rational in lowest terms as `p/q`, or just `p` for integers.
pub fn render_rat(r: &Rat) -> String {
    use num::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
