//! Representation-technique subset sum workbench: instances, exact and EM
//! solvers, a classical quantum-walk vertex simulator, and the analytic cost
//! model with its parameter optimizer.

pub mod bits;
pub mod cost;
pub mod em;
pub mod error;
pub mod exact;
pub mod harness;
pub mod instance;
pub mod optimizer;
pub mod rng;
pub mod walk;

pub use bits::BinVector;
pub use error::{Error, Result};
pub use instance::{generate_instance, RsspInstance};
