//! Versioned JSON checkpoints carrying everything a resumed run needs.

use super::{EpochLog, TrainConfig};
use crate::model::ModelParameters;
use crate::numerics::AdamWState;
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// Restorable counter-mode generator position. The word position is split
/// into two 64-bit halves to stay inside universally supported JSON
/// integer handling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
    pub word_pos_hi: u64,
    pub word_pos_lo: u64,
}

impl RngState {
    pub fn fresh(seed: u64, stream: u64) -> Self {
        RngState { seed, stream, word_pos_hi: 0, word_pos_lo: 0 }
    }

    /// Snapshot of a generator created by [`RngState::rng`].
    pub fn capture(seed: u64, stream: u64, rng: &ChaCha12Rng) -> Self {
        let pos = rng.get_word_pos();
        RngState {
            seed,
            stream,
            word_pos_hi: (pos >> 64) as u64,
            word_pos_lo: pos as u64,
        }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos((u128::from(self.word_pos_hi) << 64) | u128::from(self.word_pos_lo));
        rng
    }
}

/// Full training state at an epoch boundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub v: u32,
    pub config: TrainConfig,
    pub params: ModelParameters,
    pub opt: AdamWState,
    pub shuffle_rng: RngState,
    /// Completed epochs.
    pub epoch: usize,
    pub best_val_mcc: f64,
    pub best_epoch: usize,
    pub history: Vec<EpochLog>,
}

pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, checkpoint)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let reader = BufReader::new(File::open(path)?);
    let checkpoint: Checkpoint = serde_json::from_reader(reader)?;
    if checkpoint.v != CHECKPOINT_SCHEMA_VERSION {
        return Err(Error::usage(format!(
            "unsupported checkpoint schema version {} (expected {CHECKPOINT_SCHEMA_VERSION})",
            checkpoint.v
        )));
    }
    checkpoint.params.validate()?;
    Ok(checkpoint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn rng_state_round_trips_mid_stream() {
        let mut rng = RngState::fresh(42, 7).rng();
        for _ in 0..13 {
            rng.next_u64();
        }
        let saved = RngState::capture(42, 7, &rng);
        let mut restored = saved.rng();
        for _ in 0..20 {
            assert_eq!(rng.next_u64(), restored.next_u64());
        }
    }

    #[test]
    fn word_pos_split_preserves_high_bits() {
        // The word position is 68 bits wide; exercise a value above 2^64.
        let mut rng = RngState::fresh(1, 1).rng();
        rng.set_word_pos((0xA_u128 << 64) | 12345);
        let state = RngState::capture(1, 1, &rng);
        assert_eq!(state.word_pos_hi, 0xA);
        assert_eq!(state.word_pos_lo, 12345);
        assert_eq!(state.rng().get_word_pos(), rng.get_word_pos());
    }
}
