//! Scheduling jobs with fractional capacity demands on parallel machines
//! to minimize total weighted completion time.
//!
//! A machine runs any set of jobs at once as long as their demands sum to at
//! most one. The crate provides the WSVF, WSPT and hybrid list schedulers, a
//! single-machine packing scheduler, lower bounds with ratio certificates, an
//! exact oracle for small instances, and the harness behind the `capsched`
//! binary.

pub mod bounds;
pub mod error;
pub mod harness;
pub mod io;
pub mod model;
pub mod oracle;
pub mod schedulers;
pub mod single_machine;

pub use error::{Error, Result};
pub use model::{check_feasibility, evaluate_cost, Instance, Job, Schedule};
pub use schedulers::Algorithm;
