//! Temporal planning and execution monitoring for an assistive home robot.

pub mod assets;
pub mod config;
pub mod executor;
pub mod fixed;
pub mod goals;
pub mod pddl;
pub mod perception;
pub mod planner;
pub mod taxonomy;
pub mod world;

pub use fixed::Fixed;
