//! Per-step, per-role averaging of local transfer entropy values.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agent::{Role, SwarmSnapshot};
use crate::error::InfodynError;
use crate::infodyn::estimator::{fit_density, DensityModel, EstimatorConfig};
use crate::infodyn::observation::{
    extract_observations_windowed, Observation, PairSelector,
};

/// Averages for one transition step. `step` is the transition target n+1.
/// An average is absent when no local value of that role was defined at the
/// step; pair counts include observations whose local value was undefined,
/// which are tallied separately.
#[derive(Clone, Debug, PartialEq)]
pub struct StepCte {
    pub step: usize,
    pub follower_cte: Option<f64>,
    pub leader_cte: Option<f64>,
    pub follower_pairs: usize,
    pub leader_pairs: usize,
    pub follower_undefined: usize,
    pub leader_undefined: usize,
}

/// Per-step average conditional transfer entropy for follower and leader
/// destinations, in bits.
#[derive(Clone, Debug, PartialEq)]
pub struct CteReport {
    pub k: usize,
    pub estimator: EstimatorConfig,
    pub per_step: Vec<StepCte>,
}

impl CteReport {
    /// Whether any step has a defined average for the role.
    pub fn has_series(&self, role: Role) -> bool {
        self.per_step.iter().any(|s| self.value(s, role).is_some())
    }

    fn value(&self, s: &StepCte, role: Role) -> Option<f64> {
        match role {
            Role::Follower => s.follower_cte,
            Role::Leader => s.leader_cte,
        }
    }

    /// Mean of the defined per-step averages for the role, or `None` when
    /// the whole series is absent.
    pub fn window_mean(&self, role: Role) -> Option<f64> {
        let mut acc = KahanSum::default();
        let mut n = 0usize;
        for s in &self.per_step {
            if let Some(v) = self.value(s, role) {
                acc.add(v);
                n += 1;
            }
        }
        if n == 0 {
            None
        } else {
            Some(acc.total() / n as f64)
        }
    }

    pub fn total_undefined(&self, role: Role) -> usize {
        self.per_step
            .iter()
            .map(|s| match role {
                Role::Follower => s.follower_undefined,
                Role::Leader => s.leader_undefined,
            })
            .sum()
    }
}

/// Compensated accumulator so that averages do not depend on how the work
/// was chunked.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum
    }
}

/// Full-trajectory report; see [`cte_report_windowed`].
pub fn cte_report(
    snapshots: &[SwarmSnapshot],
    k: usize,
    selector: &PairSelector,
    estimator: &EstimatorConfig,
) -> Result<CteReport, InfodynError> {
    cte_report_windowed(snapshots, k, selector, estimator, None)
}

/// Extracts observations (optionally restricted to transition steps inside
/// the inclusive window), fits one density model per destination role
/// present, and averages local values per step and role.
///
/// Densities are pooled over the whole analyzed span, then queried per step;
/// local values are evaluated in parallel but reduced in a fixed order, so
/// the result is independent of thread count.
pub fn cte_report_windowed(
    snapshots: &[SwarmSnapshot],
    k: usize,
    selector: &PairSelector,
    estimator: &EstimatorConfig,
    window: Option<(usize, usize)>,
) -> Result<CteReport, InfodynError> {
    let observations = extract_observations_windowed(snapshots, k, selector, window)?;
    report_from_observations(&observations, k, estimator)
}

/// Report assembly from pre-extracted observations.
pub fn report_from_observations(
    observations: &[Observation],
    k: usize,
    estimator: &EstimatorConfig,
) -> Result<CteReport, InfodynError> {
    for o in observations {
        if o.x_hist.len() != k {
            return Err(InfodynError::HistoryMismatch {
                expected: k,
                got: o.x_hist.len(),
            });
        }
    }

    let fit_role = |role: Role| -> Result<Option<DensityModel>, InfodynError> {
        if observations.iter().any(|o| o.dest_role == role) {
            fit_density(observations, role, estimator).map(Some)
        } else {
            Ok(None)
        }
    };
    let follower_model = fit_role(Role::Follower)?;
    let leader_model = fit_role(Role::Leader)?;

    let locals: Vec<Option<f64>> = observations
        .par_iter()
        .map(|o| {
            let model = match o.dest_role {
                Role::Follower => follower_model.as_ref(),
                Role::Leader => leader_model.as_ref(),
            };
            model
                .expect("model fitted for every present role")
                .local_cte(o)
                .expect("history length checked above")
        })
        .collect();

    #[derive(Default)]
    struct Acc {
        sum: KahanSum,
        defined: usize,
        undefined: usize,
    }
    #[derive(Default)]
    struct StepAcc {
        follower: Acc,
        leader: Acc,
    }

    let mut steps: BTreeMap<usize, StepAcc> = BTreeMap::new();
    for (o, local) in observations.iter().zip(&locals) {
        let entry = steps.entry(o.step + 1).or_default();
        let acc = match o.dest_role {
            Role::Follower => &mut entry.follower,
            Role::Leader => &mut entry.leader,
        };
        match local {
            Some(v) => {
                acc.sum.add(*v);
                acc.defined += 1;
            }
            None => acc.undefined += 1,
        }
    }

    let per_step = steps
        .into_iter()
        .map(|(step, acc)| {
            let avg = |a: &Acc| {
                if a.defined > 0 {
                    Some(a.sum.total() / a.defined as f64)
                } else {
                    None
                }
            };
            StepCte {
                step,
                follower_cte: avg(&acc.follower),
                leader_cte: avg(&acc.leader),
                follower_pairs: acc.follower.defined + acc.follower.undefined,
                leader_pairs: acc.leader.defined + acc.leader.undefined,
                follower_undefined: acc.follower.undefined,
                leader_undefined: acc.leader.undefined,
            }
        })
        .collect();

    Ok(CteReport {
        k,
        estimator: estimator.clone(),
        per_step,
    })
}

/// Shuffles the source variable y among the observations of each directed
/// (destination, source) pair, in place. This preserves each pair's marginal
/// distribution of y while destroying its time alignment with the
/// destination, which is the standard zero-coupling surrogate.
pub fn shuffle_sources_within_pairs(observations: &mut [Observation], seed: u64) {
    let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, o) in observations.iter().enumerate() {
        groups.entry((o.dest_id, o.src_id)).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for idxs in groups.values() {
        for i in (1..idxs.len()).rev() {
            let j = rng.random_range(0..=i);
            if i != j {
                let yi = observations[idxs[i]].y;
                observations[idxs[i]].y = observations[idxs[j]].y;
                observations[idxs[j]].y = yi;
            }
        }
    }
}
