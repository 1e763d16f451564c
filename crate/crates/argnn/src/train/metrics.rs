//! Binary classification metrics over acceptance maps.

use serde::{Deserialize, Serialize};

/// Pooled binary confusion counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_positives: u64,
    pub true_negatives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

impl Confusion {
    pub fn record(&mut self, prediction: u8, label: u8) {
        match (prediction, label) {
            (1, 1) => self.true_positives += 1,
            (0, 0) => self.true_negatives += 1,
            (1, 0) => self.false_positives += 1,
            (0, 1) => self.false_negatives += 1,
            other => panic!("labels must be binary, got {other:?}"),
        }
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.true_positives += other.true_positives;
        self.true_negatives += other.true_negatives;
        self.false_positives += other.false_positives;
        self.false_negatives += other.false_negatives;
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.true_negatives + self.false_positives + self.false_negatives
    }

    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            (self.true_positives + self.true_negatives) as f64 / self.total() as f64
        }
    }

    /// Matthews correlation coefficient. Any zero factor under the root
    /// (a degenerate row or column) yields 0.
    pub fn mcc(&self) -> f64 {
        let tp = self.true_positives as f64;
        let tn = self.true_negatives as f64;
        let fp = self.false_positives as f64;
        let fn_ = self.false_negatives as f64;
        let denom = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
        if denom == 0.0 {
            0.0
        } else {
            (tp * tn - fp * fn_) / denom.sqrt()
        }
    }
}

impl FromIterator<(u8, u8)> for Confusion {
    fn from_iter<I: IntoIterator<Item = (u8, u8)>>(iter: I) -> Self {
        let mut c = Confusion::default();
        for (p, y) in iter {
            c.record(p, y);
        }
        c
    }
}

/// MCC of binary predictions against binary labels.
pub fn mcc(predictions: &[u8], labels: &[u8]) -> f64 {
    assert_eq!(predictions.len(), labels.len(), "one prediction per label");
    predictions.iter().copied().zip(labels.iter().copied()).collect::<Confusion>().mcc()
}

/// Mean absolute error between likelihoods and binary labels.
pub fn mae(likelihoods: &[f64], labels: &[u8]) -> f64 {
    assert_eq!(likelihoods.len(), labels.len(), "one likelihood per label");
    if labels.is_empty() {
        return 0.0;
    }
    let sum: f64 =
        likelihoods.iter().zip(labels).map(|(&p, &y)| (p - f64::from(y)).abs()).sum();
    sum / labels.len() as f64
}
