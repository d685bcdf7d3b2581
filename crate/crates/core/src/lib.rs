//! Two-dimensional swarm simulation with continuous three-zone interaction
//! kernels, a minority of density-responsive leaders steering toward a goal
//! direction, and per-role conditional transfer entropy estimation over the
//! resulting trajectories.
//!
//! The simulation side lives in [`kernels`], [`leadership`] and
//! [`integrator`]; the information-dynamics side in [`infodyn`]. Everything
//! is deterministic given a seed, including under parallel evaluation.

pub mod agent;
pub mod error;
pub mod grid;
pub mod infodyn;
pub mod integrator;
pub mod kernels;
pub mod leadership;
pub mod order;
pub mod params;
pub mod reference;
pub mod vec2;

pub use agent::{AgentState, Role, SwarmSnapshot};
pub use error::{Diverged, InfodynError, SwarmError};
pub use integrator::{init_lattice, run, step, RunError, Trajectory};
pub use params::SwarmParams;
pub use vec2::Vec2;
