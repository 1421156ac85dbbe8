//! Meta-learning tasks built from simulated time series.

mod dataset;
mod task;

pub use dataset::{
    generate_meta, load_meta, sample_from_series, sample_training_task, save_meta, GenerationFailure, MetaDataset,
    MetaTask, SamplerConfig, Split, MANIFEST_NAME, MIN_TASK_LEN,
};
pub use task::{
    build_eval_task, build_target_inputs, context_len, input_row, TaskDataset, TaskMeta, MIN_EVAL_LEN,
};
