//! CNP training: minibatches of sampled tasks, Adam, early stopping on the
//! validation NLL.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cnp::{backward, gaussian_nll, Adam, Checkpoint, CnpConfig, CnpModel, Gradients};
use crate::error::{Error, Result};
use crate::meta::{MetaDataset, SamplerConfig, Split, TaskDataset};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub max_steps: usize,
    /// Stop once the validation NLL has not improved for this many steps.
    pub patience: usize,
    /// Validation interval in steps; also the loss-curve resolution.
    pub eval_every: usize,
    pub seed: u64,
    pub sampler: SamplerConfig,
    /// Rescale the batch gradient to at most this Euclidean norm.
    pub clip_norm: Option<f64>,
    pub model: CnpConfig,
    /// Context fraction of the validation tasks.
    pub val_context_fraction: f64,
    /// Targets kept per validation task.
    pub val_max_targets: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            batch_size: 16,
            max_steps: 50_000,
            patience: 5_000,
            eval_every: 100,
            seed: 42,
            sampler: SamplerConfig::default(),
            clip_norm: Some(10.0),
            model: CnpConfig::default(),
            val_context_fraction: 0.1,
            val_max_targets: 256,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.batch_size == 0 || self.eval_every == 0 || self.patience == 0 {
            return bad("batch size, evaluation interval and patience must be positive");
        }
        if self.sampler.min_context == 0 || self.sampler.min_context > self.sampler.max_context {
            return bad("context-size range must satisfy 1 <= min <= max");
        }
        if self.sampler.n_targets == 0 {
            return bad("target count must be positive");
        }
        if self.clip_norm.is_some_and(|c| !(c > 0.0)) {
            return bad("gradient clip norm must be positive");
        }
        if !(self.val_context_fraction > 0.0 && self.val_context_fraction < 1.0) {
            return bad("validation context fraction must lie in (0, 1)");
        }
        Ok(())
    }
}

/// Train and validation NLL at one point of the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub step: usize,
    /// Mean batch NLL over the steps since the previous point.
    pub train_nll: f64,
    pub val_nll: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Parameters with the best validation NLL.
    pub checkpoint: Checkpoint,
    pub curve: Vec<CurvePoint>,
    pub steps: usize,
    pub stopped_early: bool,
}

/// Mean NLL over tasks (each task weighted equally).
pub fn mean_task_nll(model: &CnpModel, tasks: &[TaskDataset]) -> Result<f64> {
    if tasks.is_empty() {
        return Err(Error::EmptySet);
    }
    let per_task: Vec<f64> = tasks
        .par_iter()
        .map(|t| gaussian_nll(&model.predict(&t.context_x, &t.context_y, &t.target_x)?, &t.target_y))
        .collect::<Result<_>>()?;
    Ok(per_task.iter().sum::<f64>() / per_task.len() as f64)
}

/// Mean loss and gradient over a batch. Per-task work runs in parallel; the
/// reduction is sequential in batch order, so the result does not depend on
/// the thread count.
pub fn batch_gradient(model: &CnpModel, batch: &[TaskDataset]) -> Result<(f64, Gradients)> {
    let parts: Vec<(f64, Gradients)> = batch
        .par_iter()
        .map(|t| backward(model, &t.context_x, &t.context_y, &t.target_x, &t.target_y))
        .collect::<Result<_>>()?;
    let mut total = Gradients::zeros_like(model);
    let mut loss = 0.0;
    for (l, g) in &parts {
        loss += l;
        total.add_assign(g);
    }
    let scale = 1.0 / batch.len() as f64;
    total.scale(scale);
    Ok((loss * scale, total))
}

/// Trains a fresh model, seeded by `cfg.seed`, with normalization statistics
/// taken from the training tasks.
pub fn train(meta: &MetaDataset, cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_with(meta, cfg, None, |_| {})
}

/// Training loop. `init` resumes from given parameters (its normalization is
/// kept); `progress` sees every loss-curve point as it is recorded.
pub fn train_with(
    meta: &MetaDataset,
    cfg: &TrainConfig,
    init: Option<CnpModel>,
    mut progress: impl FnMut(&CurvePoint),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    meta.validate()?;
    if meta.indices(Split::Train).is_empty() || meta.indices(Split::Val).is_empty() {
        return Err(Error::InvalidArgument(
            "training needs at least one train and one val task".into(),
        ));
    }
    let mut model = match init {
        Some(m) => {
            m.validate()?;
            m
        }
        None => {
            let mut m = CnpModel::new(&cfg.model, cfg.seed);
            m.norm = meta.norm_stats()?;
            m
        }
    };
    let val = meta.validation_tasks(cfg.val_context_fraction, cfg.val_max_targets)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut adam = Adam::new(cfg.lr, model.num_params());

    let initial_val = mean_task_nll(&model, &val)?;
    let mut best = Checkpoint {
        model: model.clone(),
        step: 0,
        best_val_nll: initial_val,
    };
    let mut curve = Vec::new();
    let mut window = 0.0;
    let mut window_len = 0;
    let mut stopped_early = false;
    let mut step = 0;

    while step < cfg.max_steps {
        let batch = (0..cfg.batch_size)
            .map(|_| meta.sample(Split::Train, &cfg.sampler, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let (loss, mut grads) = batch_gradient(&model, &batch)?;
        step += 1;
        if !loss.is_finite() || !grads.is_finite() {
            return Err(Error::Divergence { step, loss });
        }
        if let Some(limit) = cfg.clip_norm {
            let norm = grads.norm();
            if norm > limit {
                grads.scale(limit / norm);
            }
        }
        adam.step(&mut model, &grads);
        window += loss;
        window_len += 1;

        if step % cfg.eval_every == 0 || step == cfg.max_steps {
            let val_nll = mean_task_nll(&model, &val)?;
            if !val_nll.is_finite() {
                return Err(Error::Divergence { step, loss: val_nll });
            }
            let point = CurvePoint {
                step,
                train_nll: window / window_len as f64,
                val_nll,
            };
            progress(&point);
            curve.push(point);
            window = 0.0;
            window_len = 0;
            if val_nll < best.best_val_nll {
                best = Checkpoint {
                    model: model.clone(),
                    step: step as u64,
                    best_val_nll: val_nll,
                };
            } else if step - best.step as usize >= cfg.patience {
                stopped_early = true;
                break;
            }
        }
    }
    Ok(TrainOutcome {
        checkpoint: best,
        curve,
        steps: step,
        stopped_early,
    })
}

pub const CURVE_HEADER: &str = "step,train_nll,val_nll";

pub fn write_curve(path: &Path, curve: &[CurvePoint]) -> Result<()> {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for p in curve {
        writeln!(out, "{},{},{}", p.step, p.train_nll, p.val_nll).expect("writing to a String cannot fail");
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, out)?;
    Ok(())
}
