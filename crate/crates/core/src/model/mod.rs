//! Plan-structure types shared by both engines.

pub mod bindings;
pub mod ordering;
pub mod plan;
pub mod schema;
pub mod term;

pub use bindings::{may_unify, unify, Bindings};
pub use ordering::{Ordering, StepId};
pub use plan::{CausalLink, Flaw, FlawKind, Frame, FrameId, PendingFlaw, Plan, Reason, Step, StepRole};
pub use schema::{ActionSchema, DomainTheory, Problem};
pub use term::{Literal, Symbol, Term, Variable, INTENDS};
