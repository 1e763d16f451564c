//! Model evaluation: pooled acceptance metrics and the size/steps
//! scaling matrix.

use super::metrics::Confusion;
use super::{prepare, Prepared};
use crate::dataset::DatasetRecord;
use crate::model::{forward_batch, GraphBatch, ModelParameters};
use crate::numerics::nn::sigmoid;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Graphs per evaluation batch; outputs are chunking-invariant because
/// batches are disjoint unions.
const EVAL_CHUNK_GRAPHS: usize = 50;

/// Pooled evaluation outcome over one dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mcc: f64,
    pub mae: f64,
    pub confusion: Confusion,
    /// Message-passing steps used at inference.
    pub steps: usize,
    pub records: usize,
    /// Pooled argument count across records.
    pub arguments: usize,
    /// Filled by callers that time the run; excluded from deterministic
    /// comparisons.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_seconds: Option<f64>,
}

pub fn evaluate(
    params: &ModelParameters,
    records: &[DatasetRecord],
    steps: usize,
) -> Result<EvalReport> {
    let prepared = prepare(records)?;
    evaluate_prepared(params, &prepared, steps)
}

pub(super) fn evaluate_prepared(
    params: &ModelParameters,
    prepared: &[Prepared],
    steps: usize,
) -> Result<EvalReport> {
    if prepared.is_empty() {
        return Err(Error::usage("evaluation dataset is empty"));
    }
    let mut confusion = Confusion::default();
    let mut abs_err_sum = 0.0;
    let mut arguments = 0usize;
    for chunk in prepared.chunks(EVAL_CHUNK_GRAPHS) {
        let items: Vec<_> = chunk.iter().map(|p| (&p.af, p.given.as_ref())).collect();
        let batch = GraphBatch::build(&items);
        let step_logits = forward_batch(params, &batch, steps)?;
        let last = step_logits.last().expect("steps >= 1");
        for (k, p) in chunk.iter().enumerate() {
            for (local, global) in batch.range(k).enumerate() {
                let likelihood = sigmoid(last.get(global, 0));
                let label = p.labels[local];
                confusion.record(u8::from(likelihood > 0.5), label);
                abs_err_sum += (likelihood - f64::from(label)).abs();
                arguments += 1;
            }
        }
    }
    Ok(EvalReport {
        mcc: confusion.mcc(),
        mae: if arguments == 0 { 0.0 } else { abs_err_sum / arguments as f64 },
        confusion,
        steps,
        records: prepared.len(),
        arguments,
        wall_seconds: None,
    })
}

/// One entry of the scaling matrix: a dataset evaluated at a step count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCell {
    pub dataset: String,
    pub steps: usize,
    pub mcc: f64,
    pub mae: f64,
    pub records: usize,
    pub arguments: usize,
}

/// Evaluates one model across datasets and inference step counts,
/// including step counts beyond the trained horizon.
pub fn scaling_eval(
    params: &ModelParameters,
    datasets: &[(String, Vec<DatasetRecord>)],
    step_counts: &[usize],
) -> Result<Vec<ScalingCell>> {
    if datasets.is_empty() {
        return Err(Error::usage("scaling evaluation needs at least one dataset"));
    }
    if step_counts.is_empty() {
        return Err(Error::usage("scaling evaluation needs at least one step count"));
    }
    let mut cells = Vec::with_capacity(datasets.len() * step_counts.len());
    for (name, records) in datasets {
        let prepared = prepare(records)?;
        for &steps in step_counts {
            let report = evaluate_prepared(params, &prepared, steps)?;
            cells.push(ScalingCell {
                dataset: name.clone(),
                steps,
                mcc: report.mcc,
                mae: report.mae,
                records: report.records,
                arguments: report.arguments,
            });
        }
    }
    Ok(cells)
}

/// CSV rendering of a scaling matrix.
pub fn scaling_csv(cells: &[ScalingCell]) -> String {
    let mut out = String::from("dataset,steps,mcc,mae,records,arguments\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{},{}\n",
            c.dataset, c.steps, c.mcc, c.mae, c.records, c.arguments
        ));
    }
    out
}
