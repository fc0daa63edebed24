//! Stable matching instances, their rotation posets, and constructions that
//! realize a given poset as the rotation poset of an instance from a
//! restricted preference model.

pub mod downset_dp;
pub mod error;
pub mod fair;
pub mod instance;
pub mod pathwidth;
pub mod poset;
pub mod realize;
pub mod rotation;

pub use error::{Error, Result};
