//! Role-conditioned density models and the local conditional transfer
//! entropy they induce.
//!
//! The local value for one observation is
//!
//! ```text
//! t = log2( p(x_next | x_hist, w, y) / p(x_next | x_hist, w) )
//!   = log2( (C_full * C_base) / (C_source_cond * C_next_cond) )
//! ```
//!
//! where the four C's are counts of fitted observations matching the query
//! in the named subspaces. Because every conditional is a ratio of counts
//! over the same fitted set, the set size cancels. A zero count anywhere
//! makes the local value undefined; it is reported as absent rather than
//! imputed.
//!
//! Two estimators are provided. The box kernel counts fitted points within a
//! fixed max-norm radius after per-dimension standardization; it is the
//! default for continuous swarm data. The plug-in estimator counts exact
//! (optionally binned) value tuples and serves as the calibration oracle on
//! discrete data.

use std::collections::HashMap;
use std::fmt;

use crate::agent::Role;
use crate::error::InfodynError;
use crate::infodyn::observation::Observation;

/// Estimator choice plus its tuning knobs.
#[derive(Clone, Debug, PartialEq)]
pub enum EstimatorConfig {
    /// Fixed-radius box kernel over the standardized observation space.
    /// `max_fit_samples` caps the fitted set (deterministic stride
    /// subsample) to bound query cost on long trajectories.
    BoxKernel { radius: f64, max_fit_samples: usize },
    /// Exact counting over value tuples. With `bins` set, each dimension is
    /// uniformly quantized into that many bins over the fitted range;
    /// otherwise values are matched exactly, which suits inherently
    /// discrete data.
    Plugin { bins: Option<usize> },
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig::BoxKernel {
            radius: 0.25,
            max_fit_samples: 100_000,
        }
    }
}

impl fmt::Display for EstimatorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorConfig::BoxKernel {
                radius,
                max_fit_samples,
            } => write!(f, "box radius={radius} max_fit_samples={max_fit_samples}"),
            EstimatorConfig::Plugin { bins: Some(b) } => write!(f, "plugin bins={b}"),
            EstimatorConfig::Plugin { bins: None } => write!(f, "plugin bins=exact"),
        }
    }
}

/// Counts of fitted observations matching a query in each subspace of the
/// conditional ratio.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JointCounts {
    /// (x_next, x_hist, w, y)
    pub full: u64,
    /// (x_hist, w, y)
    pub source_cond: u64,
    /// (x_next, x_hist, w)
    pub next_cond: u64,
    /// (x_hist, w)
    pub base: u64,
}

impl JointCounts {
    /// The local transfer entropy in bits, or `None` when any count is zero.
    pub fn local_cte(&self) -> Option<f64> {
        if self.full == 0 || self.source_cond == 0 || self.next_cond == 0 || self.base == 0 {
            return None;
        }
        let num = self.full as f64 * self.base as f64;
        let den = self.source_cond as f64 * self.next_cond as f64;
        Some((num / den).log2())
    }
}

/// Observation vector layout: [x_hist (2k), w, y (4), x_next (2)].
/// The leading 2k+1 dims form the base conditioning block shared by all
/// four counts.
fn dims_for(k: usize) -> usize {
    2 * k + 7
}

fn flatten_into(obs: &Observation, buf: &mut Vec<f64>) {
    for h in &obs.x_hist {
        buf.push(h.x);
        buf.push(h.y);
    }
    buf.push(obs.w);
    buf.extend_from_slice(&obs.y);
    buf.push(obs.x_next.x);
    buf.push(obs.x_next.y);
}

struct Layout {
    dims: usize,
    base_end: usize, // dims [0, base_end) are (x_hist, w)
    y_end: usize,    // dims [base_end, y_end) are y
}

impl Layout {
    fn new(k: usize) -> Self {
        Layout {
            dims: dims_for(k),
            base_end: 2 * k + 1,
            y_end: 2 * k + 5,
        }
    }
}

// ---------------------------------------------------------------------------
// Box kernel
// ---------------------------------------------------------------------------

struct BoxModel {
    radius: f64,
    layout: Layout,
    mean: Vec<f64>,
    /// 1/std per dimension; 0.0 for (near-)constant dims, which are then
    /// ignored by the distance test — conditioning on a constant removes
    /// nothing.
    scale: Vec<f64>,
    /// Standardized fitted rows, row-major.
    data: Vec<f64>,
    n_rows: usize,
    /// Buckets of row indices keyed on three always-present base dims
    /// (most recent history change and speed), cell side = radius.
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
    key_dims: [usize; 3],
}

impl BoxModel {
    fn fit(rows: &[&Observation], k: usize, radius: f64) -> Self {
        let layout = Layout::new(k);
        let dims = layout.dims;
        let n = rows.len();

        let mut raw = Vec::with_capacity(n * dims);
        for o in rows {
            flatten_into(o, &mut raw);
        }

        let mut mean = vec![0.0; dims];
        for r in 0..n {
            for d in 0..dims {
                mean[d] += raw[r * dims + d];
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut var = vec![0.0; dims];
        for r in 0..n {
            for d in 0..dims {
                let c = raw[r * dims + d] - mean[d];
                var[d] += c * c;
            }
        }
        let scale: Vec<f64> = var
            .iter()
            .map(|v| {
                let std = (v / n as f64).sqrt();
                if std > 1e-12 {
                    1.0 / std
                } else {
                    0.0
                }
            })
            .collect();

        let mut data = raw;
        for r in 0..n {
            for d in 0..dims {
                data[r * dims + d] = (data[r * dims + d] - mean[d]) * scale[d];
            }
        }

        // hist0.x, hist0.y, w
        let key_dims = [0, 1, 2 * k];
        let mut cells: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        for r in 0..n {
            let row = &data[r * dims..(r + 1) * dims];
            cells
                .entry(Self::cell_key(row, &key_dims, radius))
                .or_default()
                .push(r as u32);
        }

        BoxModel {
            radius,
            layout,
            mean,
            scale,
            data,
            n_rows: n,
            cells,
            key_dims,
        }
    }

    fn cell_key(row: &[f64], key_dims: &[usize; 3], radius: f64) -> (i64, i64, i64) {
        (
            (row[key_dims[0]] / radius).floor() as i64,
            (row[key_dims[1]] / radius).floor() as i64,
            (row[key_dims[2]] / radius).floor() as i64,
        )
    }

    fn standardize_query(&self, obs: &Observation, buf: &mut Vec<f64>) {
        buf.clear();
        flatten_into(obs, buf);
        for (d, v) in buf.iter_mut().enumerate() {
            *v = (*v - self.mean[d]) * self.scale[d];
        }
    }

    fn counts(&self, zq: &[f64]) -> JointCounts {
        let r = self.radius;
        let dims = self.layout.dims;
        let base_end = self.layout.base_end;
        let y_end = self.layout.y_end;
        let mut counts = JointCounts::default();

        let center = (
            (zq[self.key_dims[0]] / r).floor() as i64,
            (zq[self.key_dims[1]] / r).floor() as i64,
            (zq[self.key_dims[2]] / r).floor() as i64,
        );

        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(bucket) =
                        self.cells
                            .get(&(center.0 + dx, center.1 + dy, center.2 + dz))
                    else {
                        continue;
                    };
                    'rows: for &ri in bucket {
                        let row = &self.data[ri as usize * dims..(ri as usize + 1) * dims];
                        for d in 0..base_end {
                            if (row[d] - zq[d]).abs() > r {
                                continue 'rows;
                            }
                        }
                        counts.base += 1;
                        let mut y_ok = true;
                        for d in base_end..y_end {
                            if (row[d] - zq[d]).abs() > r {
                                y_ok = false;
                                break;
                            }
                        }
                        let mut x_ok = true;
                        for d in y_end..dims {
                            if (row[d] - zq[d]).abs() > r {
                                x_ok = false;
                                break;
                            }
                        }
                        if y_ok {
                            counts.source_cond += 1;
                        }
                        if x_ok {
                            counts.next_cond += 1;
                        }
                        if y_ok && x_ok {
                            counts.full += 1;
                        }
                    }
                }
            }
        }
        counts
    }
}

// ---------------------------------------------------------------------------
// Discrete plug-in
// ---------------------------------------------------------------------------

struct PluginModel {
    layout: Layout,
    quant: Option<Quantizer>,
    full: HashMap<Vec<i64>, u64>,
    source_cond: HashMap<Vec<i64>, u64>,
    next_cond: HashMap<Vec<i64>, u64>,
    base: HashMap<Vec<i64>, u64>,
    n_rows: usize,
}

struct Quantizer {
    mins: Vec<f64>,
    inv_width: Vec<f64>,
    bins: usize,
}

impl Quantizer {
    fn fit(raw: &[f64], n: usize, dims: usize, bins: usize) -> Self {
        let mut mins = vec![f64::INFINITY; dims];
        let mut maxs = vec![f64::NEG_INFINITY; dims];
        for r in 0..n {
            for d in 0..dims {
                let v = raw[r * dims + d];
                mins[d] = mins[d].min(v);
                maxs[d] = maxs[d].max(v);
            }
        }
        let inv_width = mins
            .iter()
            .zip(&maxs)
            .map(|(lo, hi)| {
                let span = hi - lo;
                if span > 0.0 {
                    bins as f64 / span
                } else {
                    0.0
                }
            })
            .collect();
        Quantizer {
            mins,
            inv_width,
            bins,
        }
    }

    fn code(&self, d: usize, v: f64) -> i64 {
        let b = ((v - self.mins[d]) * self.inv_width[d]).floor() as i64;
        b.clamp(0, self.bins as i64 - 1)
    }
}

fn exact_code(v: f64) -> i64 {
    // collapse -0.0 onto +0.0 so the two compare equal as keys
    let v = if v == 0.0 { 0.0 } else { v };
    v.to_bits() as i64
}

impl PluginModel {
    fn fit(rows: &[&Observation], k: usize, bins: Option<usize>) -> Self {
        let layout = Layout::new(k);
        let dims = layout.dims;
        let n = rows.len();
        let mut raw = Vec::with_capacity(n * dims);
        for o in rows {
            flatten_into(o, &mut raw);
        }
        let quant = bins.map(|b| Quantizer::fit(&raw, n, dims, b));

        let mut model = PluginModel {
            layout,
            quant,
            full: HashMap::new(),
            source_cond: HashMap::new(),
            next_cond: HashMap::new(),
            base: HashMap::new(),
            n_rows: n,
        };
        let mut codes = vec![0i64; dims];
        for r in 0..n {
            model.encode(&raw[r * dims..(r + 1) * dims], &mut codes);
            model.insert(&codes);
        }
        model
    }

    fn encode(&self, row: &[f64], codes: &mut [i64]) {
        for (d, &v) in row.iter().enumerate() {
            codes[d] = match &self.quant {
                Some(q) => q.code(d, v),
                None => exact_code(v),
            };
        }
    }

    fn insert(&mut self, codes: &[i64]) {
        let base_end = self.layout.base_end;
        let y_end = self.layout.y_end;
        let dims = self.layout.dims;
        let base_key = codes[..base_end].to_vec();
        let mut source_key = base_key.clone();
        source_key.extend_from_slice(&codes[base_end..y_end]);
        let mut next_key = base_key.clone();
        next_key.extend_from_slice(&codes[y_end..dims]);
        let full_key = codes.to_vec();
        *self.base.entry(base_key).or_insert(0) += 1;
        *self.source_cond.entry(source_key).or_insert(0) += 1;
        *self.next_cond.entry(next_key).or_insert(0) += 1;
        *self.full.entry(full_key).or_insert(0) += 1;
    }

    fn counts(&self, obs: &Observation) -> JointCounts {
        let dims = self.layout.dims;
        let base_end = self.layout.base_end;
        let y_end = self.layout.y_end;
        let mut raw = Vec::with_capacity(dims);
        flatten_into(obs, &mut raw);
        let mut codes = vec![0i64; dims];
        self.encode(&raw, &mut codes);

        let base_key = codes[..base_end].to_vec();
        let mut source_key = base_key.clone();
        source_key.extend_from_slice(&codes[base_end..y_end]);
        let mut next_key = base_key.clone();
        next_key.extend_from_slice(&codes[y_end..dims]);

        JointCounts {
            full: self.full.get(&codes.to_vec()).copied().unwrap_or(0),
            source_cond: self.source_cond.get(&source_key).copied().unwrap_or(0),
            next_cond: self.next_cond.get(&next_key).copied().unwrap_or(0),
            base: self.base.get(&base_key).copied().unwrap_or(0),
        }
    }
}

// ---------------------------------------------------------------------------
// Public model
// ---------------------------------------------------------------------------

enum ModelKind {
    Box(BoxModel),
    Plugin(PluginModel),
}

impl fmt::Debug for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Box(m) => write!(f, "BoxModel({} rows)", m.n_rows),
            ModelKind::Plugin(m) => write!(f, "PluginModel({} rows)", m.n_rows),
        }
    }
}

/// A density model fitted on the observations of one destination role.
#[derive(Debug)]
pub struct DensityModel {
    role: Role,
    k: usize,
    kind: ModelKind,
}

impl DensityModel {
    pub fn role(&self) -> Role {
        self.role
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_fitted(&self) -> usize {
        match &self.kind {
            ModelKind::Box(m) => m.n_rows,
            ModelKind::Plugin(m) => m.n_rows,
        }
    }

    /// The four subspace counts for a query observation.
    pub fn counts(&self, obs: &Observation) -> Result<JointCounts, InfodynError> {
        if obs.x_hist.len() != self.k {
            return Err(InfodynError::HistoryMismatch {
                expected: self.k,
                got: obs.x_hist.len(),
            });
        }
        Ok(match &self.kind {
            ModelKind::Box(m) => {
                let mut zq = Vec::with_capacity(m.layout.dims);
                m.standardize_query(obs, &mut zq);
                m.counts(&zq)
            }
            ModelKind::Plugin(m) => m.counts(obs),
        })
    }

    /// Local conditional transfer entropy of one observation, in bits.
    /// `Ok(None)` marks an undefined local value (empty neighborhood).
    pub fn local_cte(&self, obs: &Observation) -> Result<Option<f64>, InfodynError> {
        Ok(self.counts(obs)?.local_cte())
    }
}

/// Fits a density model on the observations whose destination has the given
/// role, pooled across agents and steps.
pub fn fit_density(
    observations: &[Observation],
    role: Role,
    config: &EstimatorConfig,
) -> Result<DensityModel, InfodynError> {
    let mut rows: Vec<&Observation> = observations
        .iter()
        .filter(|o| o.dest_role == role)
        .collect();
    if rows.is_empty() {
        return Err(InfodynError::InsufficientData { role });
    }
    let k = rows[0].x_hist.len();
    if k == 0 {
        return Err(InfodynError::Config("observations carry empty history".into()));
    }
    for o in &rows {
        if o.x_hist.len() != k {
            return Err(InfodynError::HistoryMismatch {
                expected: k,
                got: o.x_hist.len(),
            });
        }
    }

    let kind = match config {
        EstimatorConfig::BoxKernel {
            radius,
            max_fit_samples,
        } => {
            if !(*radius > 0.0) {
                return Err(InfodynError::Config(format!(
                    "kernel radius must be > 0, got {radius}"
                )));
            }
            if *max_fit_samples == 0 {
                return Err(InfodynError::Config("max_fit_samples must be >= 1".into()));
            }
            if rows.len() > *max_fit_samples {
                // deterministic stride subsample
                let stride = rows.len().div_ceil(*max_fit_samples);
                rows = rows.into_iter().step_by(stride).collect();
            }
            ModelKind::Box(BoxModel::fit(&rows, k, *radius))
        }
        EstimatorConfig::Plugin { bins } => {
            if let Some(b) = bins {
                if *b == 0 {
                    return Err(InfodynError::Config("bins must be >= 1".into()));
                }
            }
            ModelKind::Plugin(PluginModel::fit(&rows, k, *bins))
        }
    };

    Ok(DensityModel { role, k, kind })
}
