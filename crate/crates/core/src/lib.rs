//! Symbolic-numeric CR invariants of real-algebraic hypersurfaces.

pub mod catalog;
pub mod cmw;
pub mod hermpoly;
pub mod levi;
pub mod linalg;
pub mod parallel;
pub mod segremap;
