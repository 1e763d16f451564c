//! Dense f64 linear algebra, a reverse-mode differentiation tape, and the
//! optimizer pieces used by training.
//!
//! Everything is written for deterministic, bit-stable execution: fixed
//! loop orders, no threading, and an order-canonicalising scatter-add (see
//! [`tape::Tape::scatter_sum_rows`]) so that summing a permuted multiset of
//! rows produces bit-identical results.

pub mod matrix;
pub mod nn;
pub mod optim;
pub mod tape;

pub use matrix::{matmul, matmul_nt, matmul_tn, Matrix};
pub use nn::{gated_recurrent_cell, mlp_forward, LstmParams, MlpParams};
pub use optim::{adamw_step, clip_global_norm, cosine_cyclic_lr, AdamWConfig, AdamWState};
pub use tape::{Gradients, NodeId, Tape};
