//! Combinatorial engine for trees of curves at infinity built by iterated
//! blowups of the projective plane.
//!
//! The crate models each exceptional curve as a vertex carrying two labels:
//! `kbar`, the coefficient of the curve in the augmented canonical class
//! (immutable once the curve is created), and `self_int`, its
//! self-intersection (decremented whenever a point on the curve is blown up).
//! On top of the tree engine sit exact intersection-form arithmetic, curve
//! typing under structural constraints, integer feasibility solvers for the
//! divisor classes `L` and `Delta`, and an isomorph-free search that
//! enumerates all trees up to a blowup bound and reports configurations
//! passing every filter.
//!
//! All numeric work that feeds a filter is exact: labels are checked
//! machine integers, determinants are arbitrary-precision, and the solvers
//! run over exact rationals. Trees are immutable values; every operation is
//! a pure function, so everything here is safe to evaluate concurrently.
//! With the default `parallel` feature the search fans frontier expansion
//! out over a rayon pool; without it the same code runs sequentially.

pub mod canon;
pub mod dot;
pub mod graph;
pub mod lattice;
mod linalg;
pub mod linear;
pub mod script;
pub mod search;
pub mod typing;

pub use graph::{CurveTree, GraphError, Vertex, VertexId, Violation};
pub use lattice::{DivisorClass, IntersectionForm, LatticeError};
pub use linear::{DeltaOutcome, DeltaSolution, LFailureCode, LSolution, LSolveError};
pub use script::{BlowupScript, ScriptError, Step};
pub use search::{CandidateReport, EnumeratedTree, RunConfig, SearchSummary};
pub use typing::{ConstraintId, CurveType, TypeAssignment, TypeViolation, TypingError};
