//! Words in automaton states as tree automorphisms.
//!
//! A word `s_1 s_2 ⋯ s_k` acts as the composition `s_1 ∘ s_2 ∘ ⋯ ∘ s_k`: the
//! rightmost factor is applied first. Every state acts letter by letter via
//! `g(xw) = π_g(x) g|_x(w)`, and products and inverses are handled by the
//! usual wreath recursion identities.

mod parse;
mod relations;
mod wordproblem;

use std::fmt;

use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};
use crate::nadic::DigitWord;

pub use parse::{format_word, parse_word};
pub use relations::{
    commutator_check, conjugacy_search_bounded, generator_words, power, translation_word, verify_inverse_relation,
    verify_relation, ConjugacyOutcome, RelationReport,
};
pub use wordproblem::{equal, is_identity, Outcome, WordProblemResult, DEFAULT_NODE_BUDGET};

/// One letter of a group word: a state or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub state: StateId,
    pub inverse: bool,
}

impl Factor {
    pub fn inv(self) -> Factor {
        Factor {
            state: self.state,
            inverse: !self.inverse,
        }
    }
}

/// A finite product of states and inverse states. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupWord {
    factors: Vec<Factor>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    /// Checks that every factor names a state of `aut`.
    pub fn new(aut: &Automaton, factors: Vec<Factor>) -> Result<Self> {
        if let Some(f) = factors.iter().find(|f| f.state.index() >= aut.state_count()) {
            return Err(Error::StateOutOfRange(f.state.0));
        }
        Ok(GroupWord { factors })
    }

    pub fn state(aut: &Automaton, s: StateId) -> Result<Self> {
        Self::new(
            aut,
            vec![Factor {
                state: s,
                inverse: false,
            }],
        )
    }

    pub(crate) fn from_factors_unchecked(factors: Vec<Factor>) -> Self {
        GroupWord { factors }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            factors: self.factors.iter().rev().map(|f| f.inv()).collect(),
        }
    }

    /// Concatenation `self · other` (no reduction).
    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        let mut factors = Vec::with_capacity(self.len() + other.len());
        factors.extend_from_slice(&self.factors);
        factors.extend_from_slice(&other.factors);
        GroupWord { factors }
    }

    /// `self · other · self^-1`.
    pub fn conjugate(&self, other: &GroupWord) -> GroupWord {
        self.mul(other).mul(&self.inverse())
    }

    /// Cancels adjacent `s s^-1` and `s^-1 s` pairs.
    pub fn reduced(&self) -> GroupWord {
        GroupWord {
            factors: free_reduce(self.factors.iter().copied()),
        }
    }
}

pub(crate) fn free_reduce(factors: impl IntoIterator<Item = Factor>) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::new();
    for f in factors {
        if out.last() == Some(&f.inv()) {
            out.pop();
        } else {
            out.push(f);
        }
    }
    out
}

/// A permutation of the dense letter indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootPermutation(Vec<u32>);

impl RootPermutation {
    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y as usize)
    }
}

impl fmt::Display for RootPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, y) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{y}")?;
        }
        write!(f, "]")
    }
}

/// Pushes letter `x` through one factor, returning the image letter and the
/// factor's section at `x`.
#[inline]
pub(crate) fn factor_step(aut: &Automaton, f: Factor, x: u32) -> (u32, Factor) {
    if f.inverse {
        // s^-1(y w) = π_s^-1(y) (s|_{π_s^-1(y)})^-1 (w)
        let pre = aut.inv(f.state, x);
        (
            pre,
            Factor {
                state: aut.step(f.state, pre),
                inverse: true,
            },
        )
    } else {
        (
            aut.out(f.state, x),
            Factor {
                state: aut.step(f.state, x),
                inverse: false,
            },
        )
    }
}

/// Pushes letter `x` through the whole word (rightmost factor first), writing
/// the section factors into `sections` in word order.
#[inline]
pub(crate) fn word_step(aut: &Automaton, factors: &[Factor], x: u32, sections: &mut Vec<Factor>) -> u32 {
    sections.clear();
    sections.resize(
        factors.len(),
        Factor {
            state: StateId(0),
            inverse: false,
        },
    );
    let mut y = x;
    for (i, &f) in factors.iter().enumerate().rev() {
        let (img, sec) = factor_step(aut, f, y);
        sections[i] = sec;
        y = img;
    }
    y
}

/// Applies `w` to a word of dense letters in place.
pub fn act_indices(aut: &Automaton, w: &GroupWord, letters: &mut [u32]) {
    for &f in w.factors.iter().rev() {
        let mut f = f;
        for x in letters.iter_mut() {
            let (y, next) = factor_step(aut, f, *x);
            *x = y;
            f = next;
        }
    }
}

/// The image of the digit word `u` under `w`.
pub fn act(aut: &Automaton, w: &GroupWord, u: &DigitWord) -> Result<DigitWord> {
    if u.base() != aut.base() {
        return Err(Error::DigitOutOfRange {
            digit: u.base().into(),
            base: aut.base(),
        });
    }
    if u.dim() != aut.dim() {
        return Err(Error::DimensionMismatch {
            expected: aut.dim(),
            found: u.dim(),
        });
    }
    let mut letters: Vec<u32> = u.indices().into_iter().map(|i| i as u32).collect();
    act_indices(aut, w, &mut letters);
    let idx: Vec<usize> = letters.into_iter().map(|x| x as usize).collect();
    Ok(DigitWord::from_indices(&idx, aut.base(), aut.dim()))
}

/// Root permutation of `w` and its (freely reduced) section at every letter.
pub fn root_and_sections(aut: &Automaton, w: &GroupWord) -> (RootPermutation, Vec<GroupWord>) {
    let mut perm = Vec::with_capacity(aut.alphabet_size());
    let mut sections = Vec::with_capacity(aut.alphabet_size());
    let mut buf = Vec::new();
    for x in 0..aut.alphabet_size() as u32 {
        perm.push(word_step(aut, &w.factors, x, &mut buf));
        sections.push(GroupWord {
            factors: free_reduce(buf.iter().copied()),
        });
    }
    (RootPermutation(perm), sections)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{build_single, BuildOptions};
    use crate::linalg::{IntMatrix, IntVector};

    fn doubling() -> Automaton {
        build_single(&IntMatrix::from_i64_rows(&[[2]]), 3, &BuildOptions::default()).unwrap()
    }

    fn st(aut: &Automaton, v: i64) -> GroupWord {
        GroupWord::state(aut, aut.state(0, &IntVector::from_i64s(&[v])).unwrap()).unwrap()
    }

    #[test]
    fn single_state_recursion() {
        let a = doubling();
        let (perm, secs) = root_and_sections(&a, &st(&a, 0));
        assert_eq!(perm.images(), &[0, 2, 1]);
        assert_eq!(secs, vec![st(&a, 0), st(&a, 0), st(&a, 1)]);
    }

    #[test]
    fn cancelling_pair() {
        let a = doubling();
        let w = st(&a, 1).mul(&st(&a, 1).inverse());
        assert!(w.reduced().is_empty());
        let (perm, secs) = root_and_sections(&a, &w);
        assert!(perm.is_identity());
        assert!(secs.iter().all(GroupWord::is_empty));
    }

    #[test]
    fn inverse_sections_follow_wreath_rule() {
        let a = doubling();
        let g = st(&a, -1);
        let (pg, sg) = root_and_sections(&a, &g);
        let (pi, si) = root_and_sections(&a, &g.inverse());
        for (x, section) in si.iter().enumerate() {
            // π_{g^-1} = π_g^-1 and (g^-1)|_x = (g|_{π_g^-1(x)})^-1
            let pre = pi.apply(x);
            assert_eq!(pg.apply(pre), x);
            assert_eq!(*section, sg[pre].inverse());
        }
    }

    #[test]
    fn act_matches_definition() {
        let a = doubling();
        let u = DigitWord::parse("2 1", 3, 1).unwrap();
        assert_eq!(act(&a, &st(&a, 0), &u).unwrap().to_string(), "1 0");
        assert_eq!(act(&a, &GroupWord::identity(), &u).unwrap(), u);
        let back = act(&a, &st(&a, 0).inverse(), &DigitWord::parse("1 0", 3, 1).unwrap()).unwrap();
        assert_eq!(back, u);
        assert!(act(&a, &st(&a, 0), &DigitWord::parse("1", 2, 1).unwrap()).is_err());
    }

    #[test]
    fn rejects_foreign_state_ids() {
        let a = doubling();
        assert!(matches!(
            GroupWord::state(&a, StateId(4)),
            Err(Error::StateOutOfRange(4))
        ));
    }
}
