//! PDDL 2.2 subset: model, reader, writer and grounding.

mod error;
mod ground;
mod model;
mod parse;
mod sexpr;
mod state;
mod types;
mod write;

pub use error::{PddlError, PddlErrorKind, Pos};
pub use ground::{ground, static_predicates, AtomId, GroundAction, GroundError, GroundTask, GroundTil};
pub use model::*;
pub use parse::{parse_domain, parse_problem};
pub use sexpr::{read_all, SExpr};
pub use state::AtomSet;
pub use types::{TypeError, TypeHierarchy, TypeRef, ROOT_TYPE};
pub use write::{serialize_domain, serialize_problem};
