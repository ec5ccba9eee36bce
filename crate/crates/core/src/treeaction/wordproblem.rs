use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use super::{free_reduce, word_step, Factor, GroupWord};
use crate::automaton::Automaton;
use crate::nadic::DigitWord;

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Identity,
    /// `witness` is a digit word moved by the element.
    Nontrivial {
        witness: DigitWord,
    },
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordProblemResult {
    pub outcome: Outcome,
    /// Distinct reduced section words visited.
    pub visited: usize,
}

impl WordProblemResult {
    pub fn is_identity(&self) -> bool {
        self.outcome == Outcome::Identity
    }

    pub fn is_nontrivial(&self) -> bool {
        matches!(self.outcome, Outcome::Nontrivial { .. })
    }

    pub fn budget_exceeded(&self) -> bool {
        self.outcome == Outcome::BudgetExceeded
    }
}

impl fmt::Display for WordProblemResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.outcome {
            Outcome::Identity => "IDENTITY",
            Outcome::Nontrivial { .. } => "NONTRIVIAL",
            Outcome::BudgetExceeded => "BUDGET-EXCEEDED",
        };
        write!(f, "{tag} visited={}", self.visited)
    }
}

/// Decides whether `w` acts trivially on the whole tree.
///
/// Explores the closure of `w` under taking (freely reduced) sections. Sections
/// never have more factors than `w`, so the closure is finite, and `w` is
/// trivial iff every word in it has trivial root permutation. More than
/// `budget` distinct words gives [`Outcome::BudgetExceeded`].
pub fn is_identity(aut: &Automaton, w: &GroupWord, budget: usize) -> WordProblemResult {
    let start = free_reduce(w.factors().iter().copied());
    if start.is_empty() {
        return WordProblemResult {
            outcome: Outcome::Identity,
            visited: 1,
        };
    }

    // (parent node, letter taken from the parent) for witness reconstruction
    let mut parents: Vec<(usize, u32)> = vec![(usize::MAX, 0)];
    let mut nodes: Vec<Vec<Factor>> = vec![start.clone()];
    let mut seen: HashMap<Vec<Factor>, usize> = HashMap::new();
    seen.insert(start, 0);
    let mut buf = Vec::new();
    let mut head = 0;

    while head < nodes.len() {
        let current = std::mem::take(&mut nodes[head]);
        for x in 0..aut.alphabet_size() as u32 {
            let y = word_step(aut, &current, x, &mut buf);
            if y != x {
                let mut path = vec![x as usize];
                let mut at = head;
                while at != 0 {
                    let (p, letter) = parents[at];
                    path.push(letter as usize);
                    at = p;
                }
                path.reverse();
                return WordProblemResult {
                    outcome: Outcome::Nontrivial {
                        witness: DigitWord::from_indices(&path, aut.base(), aut.dim()),
                    },
                    visited: seen.len(),
                };
            }
            let section = free_reduce(buf.iter().copied());
            if section.is_empty() {
                continue;
            }
            if let Entry::Vacant(slot) = seen.entry(section) {
                if nodes.len() >= budget {
                    return WordProblemResult {
                        outcome: Outcome::BudgetExceeded,
                        visited: nodes.len(),
                    };
                }
                nodes.push(slot.key().clone());
                parents.push((head, x));
                slot.insert(nodes.len() - 1);
            }
        }
        head += 1;
    }
    WordProblemResult {
        outcome: Outcome::Identity,
        visited: seen.len(),
    }
}

/// `w1 = w2` in the automaton group, decided as `w1 · w2^-1 = 1`.
pub fn equal(aut: &Automaton, w1: &GroupWord, w2: &GroupWord, budget: usize) -> WordProblemResult {
    is_identity(aut, &w1.mul(&w2.inverse()), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{build_single, BuildOptions};
    use crate::linalg::IntMatrix;
    use crate::treeaction::{act, translation_word};

    #[test]
    fn empty_and_translation() {
        let a = build_single(&IntMatrix::identity(2), 3, &BuildOptions::default()).unwrap();
        assert!(is_identity(&a, &GroupWord::identity(), 10).is_identity());
        let t1 = translation_word(&a, 0, 0).unwrap();
        let res = is_identity(&a, &t1, DEFAULT_NODE_BUDGET);
        let Outcome::Nontrivial { witness } = &res.outcome else {
            panic!("expected nontrivial, got {res}");
        };
        assert_ne!(&act(&a, &t1, witness).unwrap(), witness);

        let t2 = translation_word(&a, 0, 1).unwrap();
        let comm = t1.mul(&t2).mul(&t1.inverse()).mul(&t2.inverse());
        assert!(is_identity(&a, &comm, DEFAULT_NODE_BUDGET).is_identity());
        assert!(equal(&a, &t1.mul(&t2), &t2.mul(&t1), DEFAULT_NODE_BUDGET).is_identity());
        assert!(equal(&a, &t1, &t1.mul(&t1), DEFAULT_NODE_BUDGET).is_nontrivial());
    }

    #[test]
    fn budget_is_reported() {
        let a = build_single(&IntMatrix::from_i64_rows(&[[2]]), 3, &BuildOptions::default()).unwrap();
        let t = translation_word(&a, 0, 0).unwrap();
        let m0 = GroupWord::state(&a, a.state(0, &crate::linalg::IntVector::zeros(1)).unwrap()).unwrap();
        let rel = m0.conjugate(&t).mul(&t.inverse()).mul(&t.inverse());
        let full = is_identity(&a, &rel, DEFAULT_NODE_BUDGET);
        assert!(full.is_identity());
        assert!(full.visited > 1);
        let res = is_identity(&a, &rel, 1);
        assert!(res.budget_exceeded(), "{res}");
        assert_eq!(res.to_string(), format!("BUDGET-EXCEEDED visited={}", res.visited));
    }
}
