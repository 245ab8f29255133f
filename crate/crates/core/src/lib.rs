//! Online coloring of the random (di)graph process and constructive extraction
//! of monochromatic (and rainbow) directed Hamilton cycles.
//!
//! The crate is organized bottom-up:
//!
//! * [`process`] generates seeded arc schedules and hitting times.
//! * [`coloring`] runs the online colorers (directed, orient-and-color, rainbow).
//! * [`minor`] hides BAD vertices by contraction and lifts cycles back.
//! * [`one_factor`] picks candidate arcs and extracts a 1-factor by matching.
//! * [`cycle_merger`] merges the 1-factor into a Hamilton cycle with two-arc
//!   exchanges and double rotations.
//! * [`verify`] holds the independent validators.
//! * [`harness`] wires everything into seeded trials and reports.
#![forbid(unsafe_code)]

pub mod coloring;
pub mod cycle_merger;
pub mod error;
pub mod graph;
pub mod harness;
pub mod minor;
pub mod one_factor;
pub mod process;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Arc, Digraph, Vertex};
