pub mod bound_state;
pub mod bs;
pub mod ditch;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod runner;
pub mod special;
