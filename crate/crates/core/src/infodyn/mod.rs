//! Information dynamics over swarm trajectories: observation extraction,
//! role-conditioned density estimation, and local conditional transfer
//! entropy averaged per step and per destination role.

mod estimator;
mod observation;
mod report;

pub use estimator::{fit_density, DensityModel, EstimatorConfig, JointCounts};
pub use observation::{
    extract_observations, extract_observations_windowed, Observation, PairSelector,
};
pub use report::{
    cte_report, cte_report_windowed, report_from_observations, shuffle_sources_within_pairs,
    CteReport, KahanSum, StepCte,
};
