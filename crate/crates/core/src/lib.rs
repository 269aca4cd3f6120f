pub mod cli;
pub mod contextuality;
pub mod entanglement;
pub mod error;
pub mod families;
pub mod graphs;
pub mod io;
pub mod linalg;
pub mod upb;

pub use error::{Error, Result};

#[cfg(test)]
extern crate self as ctxupb;
#[cfg(test)]
mod tests;
