//! Independent validators of the closed-form machinery: a moment-ODE
//! integrator, a discrete-bath Monte Carlo sampler, and a phase-space
//! grid integrator of the master equation.

pub mod bath;
pub mod moments;
pub mod pde;
pub mod report;

pub use bath::{
    build_discrete_bath, mc_estimate, mc_estimate_seq, DiscreteBath, McConfig, McEstimate, McMoment,
};
pub use moments::{integrate_moment_odes, MomentCurves};
pub use pde::{integrate_master_equation, MomentSample, PdeResult, PhaseSpaceGrid};
pub use report::{Metric, OracleReport};
