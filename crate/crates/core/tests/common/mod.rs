//! Reference implementations shared by the property tests and the
//! acceptance gate.
#![allow(dead_code)]

pub mod gae;
pub mod gradients;
pub mod policies;
pub mod tree_oracle;
