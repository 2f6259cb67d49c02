//! Numerical Cartan-calculus verification engine for Kaluza-Klein
//! variational models: exterior calculus on anholonomic frames with exact
//! jets, Lie-algebra invariants, torsion-free spin connections and Einstein
//! tensors, fibration and flux diagnostics, and Euler-Lagrange residual
//! operators for the Maxwell, Yang-Mills and Einstein-Yang-Mills models,
//! all driven by seeded, deterministic check suites.

pub mod chart;
pub mod error;
pub mod fibration;
pub mod field;
pub mod jet;
pub mod forms;
pub mod frame;
pub mod geometry;
pub mod lie;
pub mod metric;
pub mod reduced;
pub mod report;
pub mod variational;
pub mod linalg;

pub use error::Error;
