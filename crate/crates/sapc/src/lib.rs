//! Triangulation documents, JSON reports and the batch runner behind the
//! `sapc` command line tool.

pub mod io;
pub mod report;
pub mod run;
pub mod suite;

pub use io::{load, Document, InputError};
pub use run::{run, Command, FamilyChoice, Outcome, RunConfig, RunError};
