//! Seeded random instance generator.
//!
//! Instances are built as mostly-forward layered digraphs with occasional
//! back arcs between interior vertices, then checked against the structural
//! assumptions. Candidates that fail (an arc on no source-sink path, or an
//! all-public source-sink path) are rejected and the generator tries again
//! with the same random stream, so the result is a pure function of the
//! seed and the size parameters.

use flowgame::netmodel::FlowNetwork;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Upper bound on the vertex budget and on either arc count.
pub const SIZE_LIMIT: usize = 12;

/// How many rejected candidates the generator tolerates before giving up.
pub const ATTEMPT_LIMIT: u64 = 100_000;

/// Parameter or exhaustion failures of [`generate_instance`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("vertex budget must be between 2 and {SIZE_LIMIT}, got {0}")]
    BadVertexBudget(usize),
    #[error("private arc count must be between 1 and {SIZE_LIMIT}, got {0}")]
    BadPrivateCount(usize),
    #[error("public arc count must be at most {SIZE_LIMIT}, got {0}")]
    BadPublicCount(usize),
    #[error("no valid instance found within {ATTEMPT_LIMIT} attempts")]
    Exhausted,
}

/// A generated instance together with the number of candidates tried.
#[derive(Debug, Clone)]
pub struct Generated {
    pub network: FlowNetwork,
    /// Total candidates built; `attempts - 1` of them were rejected.
    pub attempts: u64,
}

/// Builds a random valid instance with exactly `private` player arcs and
/// `public` free arcs, using at most `vertices` vertices.
///
/// Deterministic: the same arguments always produce the same instance. The
/// returned network passes validation as written, so preprocessing it
/// removes nothing.
pub fn generate_instance(
    seed: u64,
    vertices: usize,
    private: usize,
    public: usize,
) -> Result<Generated, GenError> {
    if !(2..=SIZE_LIMIT).contains(&vertices) {
        return Err(GenError::BadVertexBudget(vertices));
    }
    if !(1..=SIZE_LIMIT).contains(&private) {
        return Err(GenError::BadPrivateCount(private));
    }
    if public > SIZE_LIMIT {
        return Err(GenError::BadPublicCount(public));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=ATTEMPT_LIMIT {
        let text = candidate_text(&mut rng, vertices, private, public);
        let net = FlowNetwork::parse(&text).expect("generated text is well formed");
        // Accept only candidates that are already clean: every arc on a
        // source-sink path and no all-public source-sink path. This keeps
        // the player count exactly as requested.
        if net.validate().is_clean() {
            return Ok(Generated {
                network: net,
                attempts: attempt,
            });
        }
    }
    Err(GenError::Exhausted)
}

/// One candidate in the text format. Endpoint positions 0 and `middles + 1`
/// are the source and the sink; arcs leave positions before the sink and
/// enter positions after the source, mostly moving forward.
fn candidate_text(rng: &mut ChaCha8Rng, vertices: usize, private: usize, public: usize) -> String {
    let middles = vertices - 2;
    let arc_count = private + public;

    let mut endpoints: Vec<(usize, usize)> = Vec::with_capacity(arc_count);
    for _ in 0..arc_count {
        loop {
            let tail = rng.gen_range(0..=middles);
            let head = if tail == 0 || middles == 0 || rng.gen_ratio(7, 8) {
                // Forward step: anywhere strictly downstream of the tail.
                rng.gen_range(tail + 1..=middles + 1)
            } else {
                // Back arc between interior vertices.
                rng.gen_range(1..=middles)
            };
            if head != tail {
                endpoints.push((tail, head));
                break;
            }
        }
    }

    // Ownership pattern shuffled over the arc list; player ids then run
    // 1..=private in arc order.
    let mut owned: Vec<bool> = Vec::with_capacity(arc_count);
    owned.extend(std::iter::repeat(true).take(private));
    owned.extend(std::iter::repeat(false).take(public));
    for i in (1..owned.len()).rev() {
        owned.swap(i, rng.gen_range(0..=i));
    }

    let name = |pos: usize| -> String {
        if pos == 0 {
            "s".to_string()
        } else if pos == middles + 1 {
            "t".to_string()
        } else {
            format!("v{pos}")
        }
    };

    let mut used: std::collections::BTreeSet<usize> = [0, middles + 1].into_iter().collect();
    for &(tail, head) in &endpoints {
        used.insert(tail);
        used.insert(head);
    }

    let mut text = format!("vertices {}\nsource s\nsink t\n", used.len());
    let mut next_player = 1u32;
    for (i, &(tail, head)) in endpoints.iter().enumerate() {
        if owned[i] {
            text.push_str(&format!(
                "arc {} {} private {}\n",
                name(tail),
                name(head),
                next_player
            ));
            next_player += 1;
        } else {
            text.push_str(&format!("arc {} {} public\n", name(tail), name(head)));
        }
    }
    text
}
