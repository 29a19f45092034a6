//! Partial-order causal-link planning with character intentionality.
//!
//! [`pocl`] refines plans until every precondition is causally supported;
//! [`ipocl`] additionally requires every non-happening step to belong to a
//! motivated frame of commitment. [`search`] drives either engine best-first.

pub mod dsl;
pub mod export;
pub mod heuristics;
pub mod ipocl;
pub mod model;
pub mod narrate;
pub mod pocl;
pub mod quest;
pub mod search;

pub use model::*;
