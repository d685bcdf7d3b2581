//! Agent and snapshot types.

use crate::error::SwarmError;
use crate::vec2::Vec2;

/// Behavioral role of an agent. Roles never enter the interaction kernels;
/// they only select which desired-velocity rule the integrator applies, so
/// leaders are indistinguishable to their neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Follower,
    Leader,
}

/// State of one agent at one timestep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentState {
    pub id: usize,
    pub pos: Vec2,
    pub vel: Vec2,
    pub role: Role,
}

/// Full swarm configuration at one timestep. Agents are stored in id order,
/// with `agents[i].id == i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwarmSnapshot {
    pub step: usize,
    pub agents: Vec<AgentState>,
}

impl SwarmSnapshot {
    pub fn new(step: usize, agents: Vec<AgentState>) -> Self {
        SwarmSnapshot { step, agents }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn n_leaders(&self) -> usize {
        self.agents
            .iter()
            .filter(|a| a.role == Role::Leader)
            .count()
    }

    /// Checks the stored-state invariants: ids dense and in order, all
    /// components finite, nonzero speeds.
    pub fn validate(&self) -> Result<(), SwarmError> {
        if self.agents.is_empty() {
            return Err(SwarmError::InvalidState("empty snapshot".into()));
        }
        for (i, a) in self.agents.iter().enumerate() {
            if a.id != i {
                return Err(SwarmError::InvalidState(format!(
                    "agent at position {i} has id {}; ids must be dense and ordered",
                    a.id
                )));
            }
            if !a.pos.is_finite() || !a.vel.is_finite() {
                return Err(SwarmError::NonFinite {
                    agent_id: a.id,
                    step: self.step,
                });
            }
            if a.vel.norm_sq() == 0.0 {
                return Err(SwarmError::InvalidState(format!(
                    "agent {} has zero velocity; headings must be well-defined",
                    a.id
                )));
            }
        }
        Ok(())
    }
}
