//! Compiles chemical reaction networks with ordered reactants into
//! domain-level DNA strand-displacement systems, checks the compiled
//! system for spurious displacements and simulates it stochastically.
//!
//! `no_std` with `alloc`; file formats, the CLI and other IO live in the
//! `strandc` crate.

#![no_std]

extern crate alloc;

pub mod analyzer;
pub mod compiler;
pub mod crn;
pub mod dsd;
pub mod ordering;
pub mod sim;

pub use compiler::{compile_crn, CompileError, CompileOptions, DsdSystem};
pub use crn::{parse_crn, serialize_crn, Crn, Reaction, Species};
