//! Dynamic programming over tree decompositions for subgraph isomorphism.
//!
//! A partial match at a bag maps some pattern vertices into the bag (`phi`),
//! marks others as already placed strictly below (`child`), and leaves the rest
//! unmatched. The separating variant additionally colors every non-image bag
//! vertex inside or outside and remembers whether a terminal of either color
//! was seen below.
//!
//! Paths of the bough layering are solved as DAGs of partial matches whose
//! reachability is computed with forest shortcuts; a plain bottom-up join is
//! available as a reference and as a fallback for very large state spaces.

mod dag;
mod solve;
mod state;

pub use dag::{build_match_dag, plain_reach, shortcut_and_reach, MatchDag, Reach};
pub use solve::{Engine, Instance, SolveOptions, SolveStats, Solution};
pub use state::{
    compatible, consistent, enumerate_partial_matches, trivial_extension, PartialMatch, Pattern,
    FLAG_INSIDE, FLAG_OUTSIDE, NONE,
};

/// Largest supported pattern.
pub const MAX_PATTERN: usize = 16;

/// Largest supported bag.
pub const MAX_BAG: usize = 64;
