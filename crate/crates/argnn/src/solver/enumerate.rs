//! Complete-extension enumeration over in/out/undecided labellings.
//!
//! A labelling is complete when: an argument is in iff all its attackers are
//! out; an argument is out iff some attacker is in; an undecided argument has
//! no in attacker and at least one undecided attacker. Complete extensions
//! are exactly the in-sets of complete labellings.
//!
//! The search assigns labels with unit propagation and backtracks over the
//! first unlabelled argument. Propagation alone yields the grounded core, so
//! branching only happens below it.

use crate::af::{ArgumentSet, ArgumentationFramework};
use std::collections::VecDeque;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Lab {
    Unknown,
    In,
    Out,
    Undec,
}

struct Search<'a> {
    af: &'a ArgumentationFramework,
    labels: Vec<Lab>,
    /// Attackers not currently labelled out; zero forces the argument in.
    non_out_attackers: Vec<usize>,
    /// Attackers currently labelled in; used by the leaf check for out.
    in_attackers: Vec<usize>,
    trail: Vec<usize>,
    queue: VecDeque<(usize, Lab)>,
    found: Vec<ArgumentSet>,
}

impl<'a> Search<'a> {
    fn new(af: &'a ArgumentationFramework) -> Self {
        let n = af.n();
        Search {
            af,
            labels: vec![Lab::Unknown; n],
            non_out_attackers: (0..n).map(|i| af.attacker_indices(i).len()).collect(),
            in_attackers: vec![0; n],
            trail: Vec::with_capacity(n),
            queue: VecDeque::new(),
            found: Vec::new(),
        }
    }

    /// Applies one label and enqueues its consequences. False on conflict.
    fn assign(&mut self, a: usize, lab: Lab) -> bool {
        match self.labels[a] {
            Lab::Unknown => {}
            existing => return existing == lab,
        }
        self.labels[a] = lab;
        self.trail.push(a);
        match lab {
            Lab::In => {
                // In arguments defeat their targets and need all attackers out.
                for &t in self.af.target_indices(a) {
                    self.in_attackers[t] += 1;
                    self.queue.push_back((t, Lab::Out));
                }
                for &b in self.af.attacker_indices(a) {
                    self.queue.push_back((b, Lab::Out));
                }
            }
            Lab::Out => {
                for &t in self.af.target_indices(a) {
                    self.non_out_attackers[t] -= 1;
                    if self.non_out_attackers[t] == 0 {
                        self.queue.push_back((t, Lab::In));
                    }
                }
            }
            Lab::Undec => {}
            Lab::Unknown => unreachable!(),
        }
        true
    }

    fn propagate(&mut self) -> bool {
        while let Some((a, lab)) = self.queue.pop_front() {
            if !self.assign(a, lab) {
                self.queue.clear();
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let a = self.trail.pop().unwrap();
            match self.labels[a] {
                Lab::In => {
                    for &t in self.af.target_indices(a) {
                        self.in_attackers[t] -= 1;
                    }
                }
                Lab::Out => {
                    for &t in self.af.target_indices(a) {
                        self.non_out_attackers[t] += 1;
                    }
                }
                Lab::Undec => {}
                Lab::Unknown => unreachable!(),
            }
            self.labels[a] = Lab::Unknown;
        }
    }

    /// Leaf validity: propagation already guarantees the in rule, so only
    /// out (needs an in attacker) and undecided (needs a non-out attacker,
    /// which at a leaf must be undecided) remain to check.
    fn leaf_is_complete(&self) -> bool {
        self.labels.iter().enumerate().all(|(a, lab)| match lab {
            Lab::In | Lab::Unknown => true,
            Lab::Out => self.in_attackers[a] > 0,
            Lab::Undec => {
                debug_assert_eq!(self.in_attackers[a], 0);
                self.non_out_attackers[a] > 0
            }
        })
    }

    fn recurse(&mut self) {
        match self.labels.iter().position(|l| *l == Lab::Unknown) {
            None => {
                if self.leaf_is_complete() {
                    let ext: ArgumentSet = self
                        .labels
                        .iter()
                        .enumerate()
                        .filter(|(_, l)| **l == Lab::In)
                        .map(|(i, _)| i)
                        .collect();
                    self.found.push(ext);
                }
            }
            Some(a) => {
                for lab in [Lab::In, Lab::Out, Lab::Undec] {
                    let mark = self.trail.len();
                    if self.assign(a, lab) && self.propagate() {
                        self.recurse();
                    }
                    self.undo_to(mark);
                }
            }
        }
    }

    /// Two-valued search (no undecided): leaves are exactly the stable
    /// labellings. Returns at the first one found.
    fn find_stable(&mut self) -> bool {
        match self.labels.iter().position(|l| *l == Lab::Unknown) {
            None => self
                .labels
                .iter()
                .enumerate()
                .all(|(a, lab)| *lab != Lab::Out || self.in_attackers[a] > 0),
            Some(a) => {
                for lab in [Lab::In, Lab::Out] {
                    let mark = self.trail.len();
                    if self.assign(a, lab) && self.propagate() && self.find_stable() {
                        return true;
                    }
                    self.undo_to(mark);
                }
                false
            }
        }
    }
}

/// Whether `af` has at least one stable extension, without enumerating
/// everything.
pub(crate) fn has_stable_extension(af: &ArgumentationFramework) -> bool {
    let mut search = Search::new(af);
    for a in 0..af.n() {
        if search.non_out_attackers[a] == 0 {
            search.queue.push_back((a, Lab::In));
        }
    }
    search.propagate() && search.find_stable()
}

/// All complete extensions of `af`, unsorted and duplicate-free.
pub(super) fn complete_extensions(af: &ArgumentationFramework) -> Vec<ArgumentSet> {
    let mut search = Search::new(af);
    // Unattacked arguments seed the grounded core.
    for a in 0..af.n() {
        if search.non_out_attackers[a] == 0 {
            search.queue.push_back((a, Lab::In));
        }
    }
    let ok = search.propagate();
    debug_assert!(ok, "grounded propagation cannot conflict");
    if ok {
        search.recurse();
    }
    search.found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn masks(mut exts: Vec<ArgumentSet>) -> Vec<u64> {
        exts.sort();
        exts.into_iter().map(|e| e.bits()).collect()
    }

    #[test]
    fn empty_framework_has_empty_extension() {
        let af = ArgumentationFramework::from_edges(0, vec![]).unwrap();
        assert_eq!(masks(complete_extensions(&af)), vec![0]);
    }

    #[test]
    fn lone_self_attacker_yields_empty_extension_only() {
        let af = ArgumentationFramework::from_edges(1, vec![(0, 0)]).unwrap();
        assert_eq!(masks(complete_extensions(&af)), vec![0]);
    }

    #[test]
    fn mutual_attack_yields_three_extensions() {
        let af = ArgumentationFramework::from_edges(2, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(masks(complete_extensions(&af)), vec![0b00, 0b01, 0b10]);
    }

    #[test]
    fn chain_propagates_to_single_extension() {
        // a -> b -> c: grounded {a, c} is the only complete extension.
        let af = ArgumentationFramework::from_edges(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(masks(complete_extensions(&af)), vec![0b101]);
    }
}
