use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::estimator;
use crate::params::{EstimatorKind, EstimatorSpec};

/// Chains named steps into one estimator. Every step but the last must be a
/// transformer; step names must be unique and may not contain `.`.
pub fn pipeline(steps: Vec<(String, EstimatorSpec)>) -> Result<EstimatorSpec> {
    if steps.is_empty() {
        return Err(Error::Empty("pipeline has no steps".into()));
    }
    let mut seen = HashSet::new();
    for (i, (name, spec)) in steps.iter().enumerate() {
        if name.is_empty() || name.contains('.') {
            return Err(Error::InvalidParam { name: "step".into(), reason: format!("bad step name `{name}`") });
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateStepName(name.clone()));
        }
        if i + 1 < steps.len() && !produces_features(spec) {
            return Err(Error::NonTransformerStep(name.clone()));
        }
    }
    Ok(EstimatorSpec::from_steps(steps))
}

fn produces_features(spec: &EstimatorSpec) -> bool {
    match spec.kind() {
        EstimatorKind::Pipeline => {
            !estimator::is_supervised(spec)
                && spec.steps().last().is_some_and(|(_, s)| produces_features(s))
        }
        kind => kind.is_transformer(),
    }
}

/// [`pipeline`] with steps named after their kind; repeated kinds are
/// numbered `pca_1`, `pca_2`, ...
pub fn make_pipeline(specs: Vec<EstimatorSpec>) -> Result<EstimatorSpec> {
    let repeated = |kind: EstimatorKind| specs.iter().filter(|s| s.kind() == kind).count() > 1;
    let mut counters = std::collections::HashMap::new();
    let steps = specs
        .iter()
        .map(|s| {
            let kind = s.kind();
            let name = if repeated(kind) {
                let c = counters.entry(kind).or_insert(0);
                *c += 1;
                format!("{}_{c}", kind.name())
            } else {
                kind.name().to_string()
            };
            (name, s.clone())
        })
        .collect();
    pipeline(steps)
}
