//! Finite-depth inverse limit: threads, fibers, consecutive points, 0-flat arcs and 0-boxes.

mod arc;
mod fiber;
mod thread;

pub use arc::{flat_arc_for_word, flat_arc_through, zero_box, FlatArc, ZeroBox};
pub use fiber::{consecutive, consecutive_pairs, consecutive_with_guard, fiber, reconstruct, Cylinder, FiberApprox, GUARD_BAND};
pub use thread::Thread;
pub(crate) use arc::lift_fa;
