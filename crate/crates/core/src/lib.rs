//! Cutting-plane decomposition for two-stage stochastic integer programs:
//! multi-cut Benders, Benders dual decomposition (per-scenario Lagrangian
//! cuts), and partition-based Benders/Lagrangian cuts with adaptive
//! partition refinement.

pub mod benders;
pub mod drivers;
pub mod error;
pub mod instances;
pub mod io;
pub mod lagrangian;
pub mod lp;
pub mod mip;
pub mod oracle;
pub mod model;
pub mod parallel;
pub mod partition;
pub mod sparse;
pub mod trace;

pub use error::{Error, Result};
pub use model::{Cut, CutKind, Instance, MasterState, Scenario, VarKind};
pub use parallel::Execution;
