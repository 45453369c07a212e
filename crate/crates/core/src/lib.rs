//! Coinductive verification of forall-exists temporal safety hyperproperties.
//!
//! The crate checks relational specifications of the form
//! `forall T1..Tn exists T'1..T'm . phi` where `phi` is a safety formula over
//! tuples of events. Two back ends are provided: an automatic game solver for
//! finite labeled transition systems and an interactive proof kernel that
//! also handles IMP_io programs.

pub mod error;
pub mod lasso;
pub mod lts;
pub mod syntax;

pub use error::{Error, ParseError, Resource, Result};
pub use lasso::{Lasso, RunLasso};
pub use lts::{EventLabel, Lts, LtsBuilder, StateId, Transition};
pub mod relspec;
pub mod solver;
pub mod imp;
pub mod kernel;
pub mod decl;
pub mod cli;
