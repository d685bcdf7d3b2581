//! Error types shared by the simulation and analysis modules.

use crate::agent::Role;
use crate::integrator::Trajectory;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SwarmError {
    #[error("agent index {index} out of bounds for swarm of {len}")]
    InvalidIndex { index: usize, len: usize },

    #[error("agent {id} has role {actual:?}, operation requires {expected:?}")]
    WrongRole { id: usize, expected: Role, actual: Role },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid swarm state: {0}")]
    InvalidState(String),

    #[error("non-finite state produced for agent {agent_id} at step {step}")]
    NonFinite { agent_id: usize, step: usize },
}

/// Numerical divergence during a multi-step run. The steps completed before
/// the failure are kept so callers can inspect or persist them.
#[derive(Debug, Error)]
#[error("simulation diverged at step {step} (agent {agent_id})")]
pub struct Diverged {
    pub agent_id: usize,
    pub step: usize,
    pub partial: Trajectory,
}

#[derive(Debug, Error)]
pub enum InfodynError {
    #[error("invalid analysis configuration: {0}")]
    Config(String),

    #[error("trajectory too short: need at least {needed} snapshots for k={k}, got {got}")]
    InsufficientHistory { needed: usize, got: usize, k: usize },

    #[error("no observations with destination role {role:?}")]
    InsufficientData { role: Role },

    #[error("observation history length {got} does not match expected k={expected}")]
    HistoryMismatch { expected: usize, got: usize },

    #[error("snapshots must have consecutive step indices (gap after step {step})")]
    NonConsecutiveSteps { step: usize },
}
