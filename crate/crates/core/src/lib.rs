//! Martingale optimal transport workbench.
//!
//! Computes model-free price bounds for path-dependent payoffs under
//! prescribed marginal laws and certifies the finite-scale duality chain
//! between the transport problem, its Lagrangian dual, tree superhedging and
//! pathwise super-replication.

pub mod exec;
pub mod lattice;
pub mod lp;
pub mod measures;
pub mod pathspace;
pub mod penalized;
pub mod scalar;
pub mod transport;

pub use exec::ExecMode;
