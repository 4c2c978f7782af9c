//! The guide in `book/`, compiled so its code listings run as doc-tests.
//!
//! Run with `cargo test -p alhome-book --doc`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/pddl.md")]
pub mod pddl {}
#[doc = include_str!("../../../book/src/planning.md")]
pub mod planning {}
#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod scenarios {}
#[doc = include_str!("../../../book/src/goals.md")]
pub mod goals {}
#[doc = include_str!("../../../book/src/execution.md")]
pub mod execution {}
#[doc = include_str!("../../../book/src/perception.md")]
pub mod perception {}
#[doc = include_str!("../../../book/src/taxonomy.md")]
pub mod taxonomy {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
