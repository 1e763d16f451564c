//! Training: batched stochastic optimisation of the acceptance model
//! against exact labels, with validation-driven early stopping and
//! restorable checkpoints.
//!
//! Every run is deterministic given its configuration: parameter
//! initialisation and epoch shuffling draw from fixed counter-mode streams
//! of the configured seed, batches are disjoint graph unions processed
//! sequentially, and checkpoints capture enough state (parameters,
//! optimizer moments, shuffle position) that a resumed run continues
//! bit-identically to an uninterrupted one.

mod checkpoint;
mod eval;
mod metrics;

pub use checkpoint::{
    load_checkpoint, save_checkpoint, Checkpoint, RngState, CHECKPOINT_SCHEMA_VERSION,
};
pub use eval::{evaluate, scaling_csv, scaling_eval, EvalReport, ScalingCell};
pub use metrics::{mae, mcc, Confusion};

use crate::af::{ArgumentSet, ArgumentationFramework};
use crate::dataset::{DatasetRecord, Task};
use crate::model::{loss_on_tape, GraphBatch, ModelParameters};
use crate::numerics::{
    adamw_step, clip_global_norm, cosine_cyclic_lr, AdamWConfig, AdamWState, Matrix, Tape,
};
use crate::solver::Semantics;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Seed streams for the run's generators, far from the low stream ids used
/// by corpus generation so reusing one seed across stages stays harmless.
const PARAM_STREAM: u64 = u64::MAX - 1;
const SHUFFLE_STREAM: u64 = u64::MAX - 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub task: Task,
    pub semantics: Semantics,
    /// Embedding width d.
    pub dim: usize,
    /// Message-passing steps unrolled per forward pass.
    pub steps: usize,
    /// Graphs per batch.
    pub batch_graphs: usize,
    pub lr_max: f64,
    pub lr_min: f64,
    /// Cosine restart period, in epochs.
    pub cycle_epochs: usize,
    pub weight_decay: f64,
    pub clip_norm: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_epochs: usize,
    /// Epochs without a validation MCC improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    /// Epochs between periodic checkpoint writes; 0 disables them. Best
    /// and final checkpoints are always written when a directory is given.
    pub checkpoint_every: usize,
    /// Optional early exit once validation MCC reaches this value; a
    /// workbench convenience for training-to-criterion.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target_val_mcc: Option<f64>,
}

impl TrainConfig {
    /// Desk-scale defaults.
    pub fn new(task: Task, semantics: Semantics, seed: u64) -> Self {
        TrainConfig {
            task,
            semantics,
            dim: 32,
            steps: 16,
            batch_graphs: 50,
            lr_max: 2e-4,
            lr_min: 1e-7,
            cycle_epochs: 4,
            weight_decay: 1e-9,
            clip_norm: 0.5,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_epochs: 50,
            patience: 5,
            seed,
            checkpoint_every: 1,
            target_val_mcc: None,
        }
    }

    pub fn adamw(&self) -> AdamWConfig {
        AdamWConfig {
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
            weight_decay: self.weight_decay,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.dim, "dim"),
            (self.steps, "steps"),
            (self.batch_graphs, "batch_graphs"),
            (self.cycle_epochs, "cycle_epochs"),
            (self.max_epochs, "max_epochs"),
            (self.patience, "patience"),
        ];
        for (value, name) in positive {
            if value == 0 {
                return Err(Error::usage(format!("{name} must be positive")));
            }
        }
        if !(self.lr_min > 0.0 && self.lr_max >= self.lr_min) {
            return Err(Error::usage("learning rates must satisfy 0 < lr_min <= lr_max"));
        }
        if !(self.clip_norm > 0.0) {
            return Err(Error::usage("clip_norm must be positive"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::usage("betas must lie in [0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::usage("epsilon must be positive"));
        }
        if self.weight_decay < 0.0 {
            return Err(Error::usage("weight_decay must be non-negative"));
        }
        if let Some(t) = self.target_val_mcc {
            if !(-1.0..=1.0).contains(&t) {
                return Err(Error::usage("target_val_mcc must lie in [-1, 1]"));
            }
        }
        Ok(())
    }
}

/// One epoch's log line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Mean batch loss over the epoch.
    pub train_loss: f64,
    pub val_mcc: f64,
    pub val_mae: f64,
    /// Learning rate of the epoch's final batch.
    pub learning_rate: f64,
    pub is_best: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxEpochs,
    Patience,
    TargetReached,
}

#[derive(Debug)]
pub struct TrainOutcome {
    /// Snapshot at the best validation epoch seen by this run; for a
    /// resumed run that never improves, the resume point itself.
    pub best: Checkpoint,
    /// Snapshot at the final epoch.
    pub last: Checkpoint,
    /// Every batch loss in order, across epochs.
    pub batch_losses: Vec<f64>,
    pub stop: StopReason,
}

/// A record converted to its runtime form once, up front.
pub(crate) struct Prepared {
    pub af: ArgumentationFramework,
    pub given: Option<ArgumentSet>,
    pub labels: Vec<u8>,
}

pub(crate) fn prepare(records: &[DatasetRecord]) -> Result<Vec<Prepared>> {
    records
        .iter()
        .map(|r| {
            r.validate()?;
            Ok(Prepared { af: r.to_af()?, given: r.given_set()?, labels: r.labels.clone() })
        })
        .collect()
}

fn check_compatible(
    config: &TrainConfig,
    records: &[DatasetRecord],
    what: &str,
) -> Result<()> {
    for (i, r) in records.iter().enumerate() {
        if r.task != config.task || r.semantics != config.semantics {
            return Err(Error::usage(format!(
                "{what} record {i} is {}/{} but the run expects {}/{}",
                r.task, r.semantics, config.task, config.semantics
            )));
        }
    }
    Ok(())
}

struct TrainState {
    config: TrainConfig,
    params: ModelParameters,
    opt: AdamWState,
    rng: ChaCha12Rng,
    epoch: usize,
    best_val_mcc: f64,
    /// 1-based; 0 means no validated epoch yet.
    best_epoch: usize,
    history: Vec<EpochLog>,
}

impl TrainState {
    fn fresh(config: &TrainConfig) -> TrainState {
        let mut param_rng = RngState::fresh(config.seed, PARAM_STREAM).rng();
        let params = ModelParameters::init(config.dim, &mut param_rng);
        let opt = AdamWState::new(&params.shapes());
        TrainState {
            config: config.clone(),
            params,
            opt,
            rng: RngState::fresh(config.seed, SHUFFLE_STREAM).rng(),
            epoch: 0,
            best_val_mcc: -1.0,
            best_epoch: 0,
            history: Vec::new(),
        }
    }

    fn from_checkpoint(c: Checkpoint) -> TrainState {
        TrainState {
            rng: c.shuffle_rng.rng(),
            config: c.config,
            params: c.params,
            opt: c.opt,
            epoch: c.epoch,
            best_val_mcc: c.best_val_mcc,
            best_epoch: c.best_epoch,
            history: c.history,
        }
    }

    fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            v: CHECKPOINT_SCHEMA_VERSION,
            config: self.config.clone(),
            params: self.params.clone(),
            opt: self.opt.clone(),
            shuffle_rng: RngState::capture(self.config.seed, SHUFFLE_STREAM, &self.rng),
            epoch: self.epoch,
            best_val_mcc: self.best_val_mcc,
            best_epoch: self.best_epoch,
            history: self.history.clone(),
        }
    }
}

/// Trains from scratch. Checkpoints are written into `out_dir` when given:
/// `best.json` on every validation improvement, `last.json` periodically
/// and at the end, `diagnostic.json` if the loss turns non-finite.
pub fn train(
    config: &TrainConfig,
    train_records: &[DatasetRecord],
    val_records: &[DatasetRecord],
    out_dir: Option<&Path>,
) -> Result<TrainOutcome> {
    train_with_progress(config, train_records, val_records, out_dir, &mut |_| {})
}

/// [`train`] with a per-epoch observer, called after each epoch's log entry
/// is recorded. The observer must not mutate training state.
pub fn train_with_progress(
    config: &TrainConfig,
    train_records: &[DatasetRecord],
    val_records: &[DatasetRecord],
    out_dir: Option<&Path>,
    progress: &mut dyn FnMut(&EpochLog),
) -> Result<TrainOutcome> {
    config.validate()?;
    check_compatible(config, train_records, "training")?;
    check_compatible(config, val_records, "validation")?;
    let train_prepared = prepare(train_records)?;
    let val_prepared = prepare(val_records)?;
    run_loop(TrainState::fresh(config), &train_prepared, &val_prepared, out_dir, progress)
}

/// Continues a checkpointed run under the checkpoint's own configuration.
/// Raise `max_epochs` (or adjust the stop targets) on the checkpoint before
/// calling to extend a finished run.
pub fn resume(
    checkpoint: Checkpoint,
    train_records: &[DatasetRecord],
    val_records: &[DatasetRecord],
    out_dir: Option<&Path>,
) -> Result<TrainOutcome> {
    resume_with_progress(checkpoint, train_records, val_records, out_dir, &mut |_| {})
}

/// [`resume`] with a per-epoch observer.
pub fn resume_with_progress(
    checkpoint: Checkpoint,
    train_records: &[DatasetRecord],
    val_records: &[DatasetRecord],
    out_dir: Option<&Path>,
    progress: &mut dyn FnMut(&EpochLog),
) -> Result<TrainOutcome> {
    checkpoint.config.validate()?;
    checkpoint.params.validate()?;
    check_compatible(&checkpoint.config, train_records, "training")?;
    check_compatible(&checkpoint.config, val_records, "validation")?;
    let train_prepared = prepare(train_records)?;
    let val_prepared = prepare(val_records)?;
    run_loop(
        TrainState::from_checkpoint(checkpoint),
        &train_prepared,
        &val_prepared,
        out_dir,
        progress,
    )
}

fn assemble(prepared: &[Prepared], chunk: &[usize]) -> (GraphBatch, Vec<f64>) {
    let items: Vec<(&ArgumentationFramework, Option<&ArgumentSet>)> =
        chunk.iter().map(|&i| (&prepared[i].af, prepared[i].given.as_ref())).collect();
    let batch = GraphBatch::build(&items);
    let mut labels = Vec::with_capacity(batch.total_nodes);
    for &i in chunk {
        labels.extend(prepared[i].labels.iter().map(|&y| f64::from(y)));
    }
    (batch, labels)
}

fn run_loop(
    mut state: TrainState,
    train: &[Prepared],
    val: &[Prepared],
    out_dir: Option<&Path>,
    progress: &mut dyn FnMut(&EpochLog),
) -> Result<TrainOutcome> {
    if train.is_empty() {
        return Err(Error::usage("training dataset is empty"));
    }
    if val.is_empty() {
        return Err(Error::usage("validation dataset is empty"));
    }
    let cfg = state.config.clone();
    let adamw_cfg = cfg.adamw();
    let batches_per_epoch = train.len().div_ceil(cfg.batch_graphs);
    let cycle_len = (cfg.cycle_epochs * batches_per_epoch) as u64;
    let mut batch_losses = Vec::new();
    let mut best: Option<Checkpoint> = None;

    let stop = loop {
        if let Some(target) = cfg.target_val_mcc {
            if state.best_epoch > 0 && state.best_val_mcc >= target {
                break StopReason::TargetReached;
            }
        }
        if state.best_epoch > 0 && state.epoch - state.best_epoch >= cfg.patience {
            break StopReason::Patience;
        }
        if state.epoch >= cfg.max_epochs {
            break StopReason::MaxEpochs;
        }

        let mut order: Vec<usize> = (0..train.len()).collect();
        order.shuffle(&mut state.rng);
        let mut loss_sum = 0.0;
        let mut last_lr = cfg.lr_max;
        for chunk in order.chunks(cfg.batch_graphs) {
            let (batch, labels) = assemble(train, chunk);
            let mut tape = Tape::new();
            let nodes = state.params.leaf(&mut tape);
            let loss_id =
                loss_on_tape(&mut tape, &nodes, &state.params, &batch, &labels, cfg.steps)?;
            let loss = tape.value(loss_id).get(0, 0);
            if !loss.is_finite() {
                if let Some(dir) = out_dir {
                    // Best-effort post-mortem state; the error is primary.
                    let _ = save_checkpoint(&dir.join("diagnostic.json"), &state.to_checkpoint());
                }
                return Err(Error::NonFinite(format!(
                    "training loss became non-finite at epoch {}, optimizer step {}",
                    state.epoch + 1,
                    state.opt.step + 1
                )));
            }
            loss_sum += loss;
            batch_losses.push(loss);

            let grads_by_id = tape.backward(loss_id);
            let ids = nodes.ids();
            let shapes = state.params.shapes();
            let mut grads: Vec<Matrix> = ids
                .iter()
                .zip(shapes)
                .map(|(id, (r, c))| match grads_by_id.get(*id) {
                    Some(g) => g.clone(),
                    // A parameter can sit outside the batch's graph (message
                    // nets on edgeless batches); its gradient is zero.
                    None => Matrix::zeros(r, c),
                })
                .collect();
            clip_global_norm(&mut grads, cfg.clip_norm);
            let lr = cosine_cyclic_lr(state.opt.step, cfg.lr_max, cfg.lr_min, cycle_len);
            last_lr = lr;
            let grad_refs: Vec<&Matrix> = grads.iter().collect();
            let mut tensors = state.params.tensors_mut();
            adamw_step(&mut tensors, &grad_refs, &mut state.opt, lr, &adamw_cfg);
        }

        let report = eval::evaluate_prepared(&state.params, val, cfg.steps)?;
        state.epoch += 1;
        let improved = state.best_epoch == 0 || report.mcc > state.best_val_mcc;
        if improved {
            state.best_val_mcc = report.mcc;
            state.best_epoch = state.epoch;
        }
        let log = EpochLog {
            epoch: state.epoch,
            train_loss: loss_sum / batches_per_epoch as f64,
            val_mcc: report.mcc,
            val_mae: report.mae,
            learning_rate: last_lr,
            is_best: improved,
        };
        state.history.push(log);
        progress(&log);
        if improved {
            let snapshot = state.to_checkpoint();
            if let Some(dir) = out_dir {
                save_checkpoint(&dir.join("best.json"), &snapshot)?;
            }
            best = Some(snapshot);
        }
        if let Some(dir) = out_dir {
            if cfg.checkpoint_every > 0 && state.epoch % cfg.checkpoint_every == 0 {
                save_checkpoint(&dir.join("last.json"), &state.to_checkpoint())?;
            }
        }
    };

    let last = state.to_checkpoint();
    if let Some(dir) = out_dir {
        save_checkpoint(&dir.join("last.json"), &last)?;
    }
    let best = best.unwrap_or_else(|| last.clone());
    Ok(TrainOutcome { best, last, batch_losses, stop })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::build_acceptance_record;

    fn no_attack_records(count: usize) -> Vec<DatasetRecord> {
        (1..=count)
            .map(|n| {
                let af = ArgumentationFramework::from_edges(n, vec![]).unwrap();
                build_acceptance_record(&af, Task::Credulous, Semantics::Grounded).unwrap()
            })
            .collect()
    }

    fn tiny_config(seed: u64) -> TrainConfig {
        let mut config = TrainConfig::new(Task::Credulous, Semantics::Grounded, seed);
        config.dim = 4;
        config.steps = 4;
        config.batch_graphs = 1;
        config.max_epochs = 1;
        config
    }

    #[test]
    fn loss_decreases_across_an_epoch_of_trivial_graphs() {
        // No-attack graphs: every argument is accepted, and all nodes share
        // one trajectory, so each batch poses the same objective.
        let records = no_attack_records(10);
        let config = tiny_config(7);
        let outcome = train(&config, &records, &records, None).unwrap();
        assert_eq!(outcome.batch_losses.len(), 10);
        for pair in outcome.batch_losses.windows(2) {
            assert!(pair[1] < pair[0], "loss must strictly decrease: {pair:?}");
        }
        assert_eq!(outcome.stop, StopReason::MaxEpochs);
    }

    #[test]
    fn identical_configurations_train_bit_identically() {
        let records = no_attack_records(6);
        let mut config = tiny_config(21);
        config.batch_graphs = 2;
        config.max_epochs = 3;
        let a = train(&config, &records, &records, None).unwrap();
        let b = train(&config, &records, &records, None).unwrap();
        assert_eq!(a.batch_losses.len(), b.batch_losses.len());
        for (x, y) in a.batch_losses.iter().zip(&b.batch_losses) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for (p, q) in a.last.params.tensors().iter().zip(b.last.params.tensors()) {
            assert_eq!(p.data(), q.data());
        }
        assert_eq!(a.last.history, b.last.history);
    }

    #[test]
    fn resume_continues_bit_identically() {
        let records = no_attack_records(8);
        let mut full_config = tiny_config(33);
        full_config.batch_graphs = 3;
        full_config.max_epochs = 4;
        let full = train(&full_config, &records, &records, None).unwrap();

        let mut half_config = full_config.clone();
        half_config.max_epochs = 2;
        let half = train(&half_config, &records, &records, None).unwrap();
        let mut resumed_from = half.last;
        resumed_from.config.max_epochs = 4;
        let resumed = resume(resumed_from, &records, &records, None).unwrap();

        for (p, q) in full.last.params.tensors().iter().zip(resumed.last.params.tensors()) {
            assert_eq!(p.data(), q.data());
        }
        assert_eq!(full.last.opt.step, resumed.last.opt.step);
        assert_eq!(full.last.history, resumed.last.history);
        assert_eq!(
            full.last.shuffle_rng.rng().get_word_pos(),
            resumed.last.shuffle_rng.rng().get_word_pos()
        );
    }

    #[test]
    fn task_mismatch_is_a_usage_error() {
        let records = no_attack_records(3);
        let mut config = tiny_config(1);
        config.task = Task::Sceptical;
        match train(&config, &records, &records, None) {
            Err(Error::Usage(msg)) => assert!(msg.contains("record 0"), "{msg}"),
            other => panic!("expected usage error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn non_finite_loss_aborts_with_a_diagnostic_checkpoint() {
        let records = no_attack_records(3);
        let config = tiny_config(2);
        let outcome = train(&config, &records, &records, None).unwrap();
        let mut poisoned = outcome.last;
        poisoned.config.max_epochs = 2;
        // Finite parameters whose readout overflows: the hidden layer
        // saturates near f64::MAX and the output sum reaches infinity,
        // which the loss turns into NaN on accepted labels.
        let d = poisoned.config.dim;
        poisoned.params.readout.w1 = Matrix::zeros(d, d);
        poisoned.params.readout.b1 = Matrix::from_vec(1, d, vec![1e308; d]);
        poisoned.params.readout.w2 = Matrix::from_vec(d, 1, vec![1.0; d]);
        poisoned.params.readout.b2 = Matrix::zeros(1, 1);

        let dir = tempfile::tempdir().unwrap();
        let err = resume(poisoned, &records, &records, Some(dir.path())).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)), "{err}");
        let diagnostic = dir.path().join("diagnostic.json");
        assert!(diagnostic.exists());
        // The post-mortem file is well-formed JSON even with a lossy NaN.
        let text = std::fs::read_to_string(diagnostic).unwrap();
        let _: serde_json::Value = serde_json::from_str(&text).unwrap();
    }

    #[test]
    fn patience_stops_a_plateaued_run() {
        // A single-class validation set pins MCC at zero forever, so only
        // the first epoch counts as an improvement.
        let records = no_attack_records(1);
        let mut config = tiny_config(3);
        config.max_epochs = 50;
        config.patience = 2;
        let outcome = train(&config, &records, &records, None).unwrap();
        assert_eq!(outcome.stop, StopReason::Patience);
        assert_eq!(outcome.last.history.len(), 3);
        assert_eq!(outcome.best.epoch, 1);
    }

    #[test]
    fn target_mcc_stops_early() {
        let records = no_attack_records(2);
        let mut config = tiny_config(4);
        config.max_epochs = 50;
        config.target_val_mcc = Some(-1.0);
        let outcome = train(&config, &records, &records, None).unwrap();
        assert_eq!(outcome.stop, StopReason::TargetReached);
        assert_eq!(outcome.last.history.len(), 1);
    }

    #[test]
    fn checkpoints_round_trip_through_disk() {
        let records = no_attack_records(4);
        let mut config = tiny_config(5);
        config.max_epochs = 2;
        let dir = tempfile::tempdir().unwrap();
        let outcome = train(&config, &records, &records, Some(dir.path())).unwrap();
        let loaded = load_checkpoint(&dir.path().join("last.json")).unwrap();
        assert_eq!(loaded.epoch, outcome.last.epoch);
        assert_eq!(loaded.config, outcome.last.config);
        for (p, q) in loaded.params.tensors().iter().zip(outcome.last.params.tensors()) {
            assert_eq!(p.data(), q.data());
        }
        assert_eq!(loaded.history, outcome.last.history);
        assert!(dir.path().join("best.json").exists());
    }
}
