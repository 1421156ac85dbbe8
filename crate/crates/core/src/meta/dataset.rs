//! The meta-learning dataset: many variable-length series, split into
//! training and validation tasks, with random context/target sampling and a
//! line-oriented manifest on disk.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::task::{build_eval_task, input_row, TaskDataset, TaskMeta};
use crate::cnp::NormStats;
use crate::error::{Error, Result};
use crate::sim::{simulate_with, Scenario, SimOptions, TimeSeries};
use crate::vehicle::{ModelKind, VehicleParams};

pub const MANIFEST_NAME: &str = "manifest.txt";
/// Series shorter than this are not kept as tasks.
pub const MIN_TASK_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Val,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Split::Train),
            "val" => Some(Split::Val),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One recorded run and its split tag.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaTask {
    pub id: String,
    pub series: TimeSeries,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetaDataset {
    pub tasks: Vec<MetaTask>,
}

/// Context and target sizes drawn per training sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub min_context: usize,
    pub max_context: usize,
    pub n_targets: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            min_context: 3,
            max_context: 100,
            n_targets: 64,
        }
    }
}

/// A scenario that could not be simulated during generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationFailure {
    pub scenario: String,
    pub reason: String,
}

impl MetaDataset {
    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn indices(&self, split: Split) -> Vec<usize> {
        (0..self.tasks.len()).filter(|&i| self.tasks[i].split == split).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::InvalidArgument("meta dataset has no tasks".into()));
        }
        for task in &self.tasks {
            task.series.validate()?;
        }
        Ok(())
    }

    /// Copy without the in-memory simulator states.
    pub fn without_states(&self) -> Self {
        let mut out = self.clone();
        for task in &mut out.tasks {
            task.series.states = None;
        }
        out
    }

    /// Normalization statistics over every step of the training tasks.
    pub fn norm_stats(&self) -> Result<NormStats> {
        let train: Vec<&TimeSeries> = self
            .tasks
            .iter()
            .filter(|t| t.split == Split::Train)
            .map(|t| &t.series)
            .collect();
        let cat = |f: fn(&TimeSeries) -> &Vec<f64>| train.iter().flat_map(|s| f(s).iter().copied()).collect::<Vec<_>>();
        NormStats::from_channels(&cat(|s| &s.delta), &cat(|s| &s.v), &cat(|s| &s.a_long), &cat(|s| &s.psi_dot))
    }

    /// Evaluation-style validation tasks: chronological context prefix and
    /// at most `max_targets` evenly spaced targets per task.
    pub fn validation_tasks(&self, context_fraction: f64, max_targets: usize) -> Result<Vec<TaskDataset>> {
        let mut out = Vec::new();
        for task in self.tasks.iter().filter(|t| t.split == Split::Val) {
            let mut d = build_eval_task(&task.series, context_fraction)?;
            let stride = d.target_x.len().div_ceil(max_targets.max(1));
            if stride > 1 {
                d.target_x = d.target_x.into_iter().step_by(stride).collect();
                d.target_y = d.target_y.into_iter().step_by(stride).collect();
            }
            out.push(d);
        }
        Ok(out)
    }

    /// Draws one training sample from the tasks tagged `split`.
    pub fn sample<R: Rng + ?Sized>(&self, split: Split, cfg: &SamplerConfig, rng: &mut R) -> Result<TaskDataset> {
        let pool = self.indices(split);
        if pool.is_empty() {
            return Err(Error::InvalidArgument(format!("no {split} tasks to sample from")));
        }
        let task = &self.tasks[pool[rng.random_range(0..pool.len())]];
        Ok(sample_from_series(&task.series, cfg, rng))
    }
}

/// Random disjoint context and target subsets of one series. The context
/// size is uniform in `min_context..=min(max_context, len / 2)`; up to
/// `n_targets` targets come from the remaining steps.
pub fn sample_from_series<R: Rng + ?Sized>(ts: &TimeSeries, cfg: &SamplerConfig, rng: &mut R) -> TaskDataset {
    let len = ts.len();
    let hi = cfg.max_context.min(len / 2).max(cfg.min_context.min(len - 1)).max(1);
    let lo = cfg.min_context.clamp(1, hi);
    let n = rng.random_range(lo..=hi);
    let m = cfg.n_targets.min(len - n);
    let picked = index::sample(rng, len, n + m).into_vec();
    let (ctx, tgt) = picked.split_at(n);
    TaskDataset {
        context_x: ctx.iter().map(|&k| input_row(ts, k)).collect(),
        context_y: ctx.iter().map(|&k| ts.psi_dot[k]).collect(),
        target_x: tgt.iter().map(|&k| input_row(ts, k)).collect(),
        target_y: tgt.iter().map(|&k| ts.psi_dot[k]).collect(),
        meta: TaskMeta::of(ts),
        dt: ts.meta.dt,
        initial_state: None,
    }
}

/// Uniform task draw followed by a context/target split, over the training
/// tasks.
pub fn sample_training_task<R: Rng + ?Sized>(meta: &MetaDataset, rng: &mut R) -> Result<TaskDataset> {
    meta.sample(Split::Train, &SamplerConfig::default(), rng)
}

/// Simulates every scenario under the STD model and tags one instance per
/// scenario family for validation (chosen by `seed`). Runs that fail or end
/// too early are reported and skipped.
pub fn generate_meta(
    scenarios: &[Scenario],
    vehicle: &VehicleParams,
    opts: &SimOptions,
    seed: u64,
) -> (MetaDataset, Vec<GenerationFailure>) {
    let runs: Vec<Result<TimeSeries>> = scenarios
        .par_iter()
        .map(|s| simulate_with(ModelKind::Std, s, vehicle, opts))
        .collect();

    // validation pick: one instance per family among those that succeeded
    let mut families: Vec<&str> = Vec::new();
    for s in scenarios {
        if !families.contains(&s.template.as_str()) {
            families.push(&s.template);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0fa1);
    let mut val = vec![false; scenarios.len()];
    for family in families {
        let members: Vec<usize> = (0..scenarios.len())
            .filter(|&i| scenarios[i].template == family)
            .filter(|&i| matches!(&runs[i], Ok(ts) if ts.len() >= MIN_TASK_LEN))
            .collect();
        if members.len() > 1 {
            val[members[rng.random_range(0..members.len())]] = true;
        }
    }

    let mut meta = MetaDataset::default();
    let mut failures = Vec::new();
    for ((s, run), is_val) in scenarios.iter().zip(runs).zip(val) {
        match run {
            Ok(ts) if ts.len() >= MIN_TASK_LEN => meta.tasks.push(MetaTask {
                id: s.id.clone(),
                series: ts,
                split: if is_val { Split::Val } else { Split::Train },
            }),
            Ok(ts) => failures.push(GenerationFailure {
                scenario: s.id.clone(),
                reason: format!("series too short ({} samples, {})", ts.len(), ts.meta.end.as_str()),
            }),
            Err(e) => failures.push(GenerationFailure {
                scenario: s.id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    (meta, failures)
}

fn csv_name(task: &MetaTask) -> String {
    let safe = |s: &str| s.replace(['/', '\\', ' '], "_");
    format!("tasks/{}/{}.csv", safe(&task.series.meta.vehicle), safe(&task.id))
}

/// Writes every task CSV and `manifest.txt` into `dir`. Returns the manifest
/// path.
pub fn save_meta(meta: &MetaDataset, dir: &Path) -> Result<PathBuf> {
    let mut manifest = String::from("# task <id> <csv-path> mu=<v> vehicle=<id> mass_extra=<v> split=<train|val>\n");
    for task in &meta.tasks {
        let rel = csv_name(task);
        let path = dir.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        task.series.write(&path)?;
        let m = &task.series.meta;
        manifest.push_str(&format!(
            "task {} {} mu={:?} vehicle={} mass_extra={:?} split={}\n",
            task.id, rel, m.mu, m.vehicle, m.mass_extra, task.split
        ));
    }
    fs::create_dir_all(dir)?;
    let path = dir.join(MANIFEST_NAME);
    fs::write(&path, manifest)?;
    Ok(path)
}

/// Reads a manifest (or a directory containing `manifest.txt`) and every
/// series it lists. CSV paths are relative to the manifest.
pub fn load_meta(path: &Path) -> Result<MetaDataset> {
    let manifest = if path.is_dir() { path.join(MANIFEST_NAME) } else { path.to_path_buf() };
    if !manifest.exists() {
        return Err(Error::MissingFile(manifest));
    }
    let base = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let text = fs::read_to_string(&manifest)?;
    let mut meta = MetaDataset::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: String| Error::MalformedManifest { line: i + 1, reason };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 7 || fields[0] != "task" {
            return Err(bad(format!("expected `task <id> <csv> mu= vehicle= mass_extra= split=`, got `{line}`")));
        }
        let mut mu = None;
        let mut vehicle = None;
        let mut mass_extra = None;
        let mut split = None;
        for kv in &fields[3..] {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got `{kv}`")))?;
            let num = || v.parse::<f64>().map_err(|_| bad(format!("bad number in `{kv}`")));
            match k {
                "mu" => mu = Some(num()?),
                "vehicle" => vehicle = Some(v.to_string()),
                "mass_extra" => mass_extra = Some(num()?),
                "split" => split = Some(Split::parse(v).ok_or_else(|| bad(format!("unknown split `{v}`")))?),
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let (Some(mu), Some(vehicle), Some(mass_extra), Some(split)) = (mu, vehicle, mass_extra, split) else {
            return Err(bad("missing one of mu, vehicle, mass_extra, split".into()));
        };
        let series = TimeSeries::read(&base.join(fields[2]))?;
        let m = &series.meta;
        if m.mu != mu || m.vehicle != vehicle || m.mass_extra != mass_extra {
            return Err(bad(format!("metadata disagrees with the sidecar of {}", fields[2])));
        }
        meta.tasks.push(MetaTask {
            id: fields[1].to_string(),
            series,
            split,
        });
    }
    if meta.tasks.is_empty() {
        return Err(Error::MalformedManifest {
            line: 0,
            reason: "manifest lists no tasks".into(),
        });
    }
    Ok(meta)
}
