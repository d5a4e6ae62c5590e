//! Exit-code policy: 0 success, 2 usage error, 3 data validation error,
//! 4 numeric failure, 1 anything else.

use opmine::autodiff::AutodiffError;
use opmine::eval::EvalError;
use opmine::model::ModelError;
use opmine::train::TrainError;

/// A command-line usage problem: bad flag combination, missing required
/// value, malformed config file.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

fn autodiff_code(err: &AutodiffError) -> i32 {
    match err {
        AutodiffError::NonFinite { .. } => 4,
        _ => 1,
    }
}

fn model_code(err: &ModelError) -> i32 {
    match err {
        ModelError::Autodiff(inner) => autodiff_code(inner),
        ModelError::BadConfig { .. } => 2,
        _ => 3,
    }
}

fn train_code(err: &TrainError) -> i32 {
    match err {
        TrainError::NonFiniteLoss { .. } => 4,
        TrainError::Autodiff(inner) => autodiff_code(inner),
        TrainError::Model(inner) => model_code(inner),
        TrainError::Config { .. } => 2,
        _ => 3,
    }
}

fn eval_code(err: &EvalError) -> i32 {
    match err {
        EvalError::NonFinite { .. } => 4,
        EvalError::TooFewRuns { .. } => 2,
        _ => 3,
    }
}

/// Walks the error chain and maps the most specific recognized cause.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.downcast_ref::<Usage>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<TrainError>() {
            return train_code(e);
        }
        if let Some(e) = cause.downcast_ref::<ModelError>() {
            return model_code(e);
        }
        if let Some(e) = cause.downcast_ref::<EvalError>() {
            return eval_code(e);
        }
        if let Some(e) = cause.downcast_ref::<AutodiffError>() {
            return autodiff_code(e);
        }
        if cause.downcast_ref::<opmine::ingest::IngestError>().is_some()
            || cause.downcast_ref::<opmine::features::FeaturesError>().is_some()
            || cause.downcast_ref::<opmine::subalign::SrtError>().is_some()
            || cause.downcast_ref::<opmine::labels::LabelError>().is_some()
            || cause.downcast_ref::<opmine::synth::SynthError>().is_some()
            || cause.downcast_ref::<std::io::Error>().is_some()
        {
            return 3;
        }
    }
    1
}
