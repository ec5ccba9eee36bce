use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{equal, free_reduce, GroupWord, WordProblemResult};
use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, IntVector};

/// Longest word a power expansion may produce.
const MAX_POWER_FACTORS: u64 = 1 << 20;

fn state_word(aut: &Automaton, matrix: usize, offset: &IntVector) -> Result<GroupWord> {
    let id = aut
        .state(matrix, offset)
        .ok_or_else(|| Error::UnknownState(format!("m[{matrix}]:{offset}")))?;
    GroupWord::state(aut, id)
}

/// The translation `u ↦ u + e_axis` as `m_0 · (m_{-e_axis})^-1` inside the
/// component of `matrix` (axis is 0-based).
pub fn translation_word(aut: &Automaton, matrix: usize, axis: usize) -> Result<GroupWord> {
    let d = aut.dim();
    if axis >= d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: axis + 1,
        });
    }
    let zero = state_word(aut, matrix, &IntVector::zeros(d))?;
    let minus = state_word(aut, matrix, &IntVector::unit(d, axis).neg())?;
    Ok(zero.mul(&minus.inverse()))
}

/// `w^k` by repetition; negative `k` repeats the inverse.
pub fn power(w: &GroupWord, k: &BigInt) -> Result<GroupWord> {
    let reps = k
        .abs()
        .to_u64()
        .filter(|r| r.saturating_mul(w.len().max(1) as u64) <= MAX_POWER_FACTORS);
    let Some(reps) = reps else {
        return Err(Error::Resource {
            what: "power expansion length",
            value: format!("{}*{}", k.abs(), w.len()),
            cap: MAX_POWER_FACTORS,
        });
    };
    let base = if k.is_negative() { w.inverse() } else { w.clone() };
    let mut out = Vec::with_capacity(base.len() * reps as usize);
    for _ in 0..reps {
        out.extend_from_slice(base.factors());
    }
    Ok(GroupWord::from_factors_unchecked(out))
}

/// `τ_{e_1}^{c_1} ⋯ τ_{e_d}^{c_d}` for an integer column `c`.
fn translation_product(aut: &Automaton, column: &IntVector) -> Result<GroupWord> {
    let mut out = GroupWord::identity();
    for (axis, c) in column.coords().iter().enumerate() {
        out = out.mul(&power(&translation_word(aut, 0, axis)?, c)?);
    }
    Ok(out)
}

/// Outcome of checking one relation `lhs = rhs` in the automaton group.
#[derive(Clone, Debug)]
pub struct RelationReport {
    pub name: String,
    pub lhs: GroupWord,
    pub rhs: GroupWord,
    pub result: WordProblemResult,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.result.is_identity()
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() {
            "pass"
        } else if self.result.budget_exceeded() {
            "budget-exceeded"
        } else {
            "FAIL"
        };
        write!(
            f,
            "{:<36} {:<15} |lhs|={} |rhs|={} visited={}",
            self.name,
            status,
            self.lhs.len(),
            self.rhs.len(),
            self.result.visited
        )
    }
}

fn check(aut: &Automaton, name: String, lhs: GroupWord, rhs: GroupWord, budget: usize) -> RelationReport {
    let result = equal(aut, &lhs, &rhs, budget);
    RelationReport { name, lhs, rhs, result }
}

fn m0(aut: &Automaton, matrix: usize) -> Result<GroupWord> {
    if matrix >= aut.matrices().len() {
        return Err(Error::UnknownState(format!("m[{matrix}]:(0)")));
    }
    state_word(aut, matrix, &IntVector::zeros(aut.dim()))
}

/// `m_0 τ_{e_j} m_0^-1 = τ_{e_1}^{m(1,j)} ⋯ τ_{e_d}^{m(d,j)}` for the given
/// matrix and (0-based) axis `j`.
pub fn verify_relation(aut: &Automaton, matrix: usize, axis: usize, budget: usize) -> Result<RelationReport> {
    let t = m0(aut, matrix)?;
    let lhs = t.conjugate(&translation_word(aut, 0, axis)?);
    let rhs = translation_product(aut, &aut.matrices()[matrix].column(axis))?;
    let name = format!("M{matrix} e{}", axis + 1);
    Ok(check(aut, name, lhs, rhs, budget))
}

/// The same relation for `M^-1`: `m_0^-1 τ_{e_j} m_0 = Π τ_{e_i}^{(M^-1)(i,j)}`.
/// Only defined for unimodular matrices.
pub fn verify_inverse_relation(aut: &Automaton, matrix: usize, axis: usize, budget: usize) -> Result<RelationReport> {
    let inv: IntMatrix = aut
        .matrices()
        .get(matrix)
        .ok_or_else(|| Error::UnknownState(format!("m[{matrix}]:(0)")))?
        .inverse_unimodular()?;
    let t = m0(aut, matrix)?.inverse();
    let lhs = t.conjugate(&translation_word(aut, 0, axis)?);
    let rhs = translation_product(aut, &inv.column(axis))?;
    let name = format!("M{matrix}^-1 e{}", axis + 1);
    Ok(check(aut, name, lhs, rhs, budget))
}

/// `[τ_{e_i}, τ_{e_j}] = 1` (0-based axes).
pub fn commutator_check(aut: &Automaton, i: usize, j: usize, budget: usize) -> Result<RelationReport> {
    let a = translation_word(aut, 0, i)?;
    let b = translation_word(aut, 0, j)?;
    let lhs = a.mul(&b).mul(&a.inverse()).mul(&b.inverse());
    let name = format!("[e{},e{}]", i + 1, j + 1);
    Ok(check(aut, name, lhs, GroupWord::identity(), budget))
}

/// The standard generating set: `m_0` of every component (named `t<k>`)
/// followed by the translations `τ_{e_j}` (named `a<j>`).
pub fn generator_words(aut: &Automaton) -> Result<Vec<(String, GroupWord)>> {
    let mut out = Vec::new();
    for k in 0..aut.matrices().len() {
        out.push((format!("t{}", k + 1), m0(aut, k)?));
    }
    for j in 0..aut.dim() {
        out.push((format!("a{}", j + 1), translation_word(aut, 0, j)?));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum ConjugacyOutcome {
    /// `conjugator · w1 · conjugator^-1 = w2`, certified by the word problem.
    Found {
        conjugator: GroupWord,
        spelling: String,
        candidates: usize,
    },
    /// Nothing found up to the length bound. Says nothing about non-conjugacy.
    Inconclusive { candidates: usize },
}

/// Semi-decision search for `c` with `c w1 c^-1 = w2`, trying every freely
/// reduced word of length `<= max_len` over the standard generators and their
/// inverses. Candidates whose check runs out of budget are skipped.
pub fn conjugacy_search_bounded(
    aut: &Automaton,
    w1: &GroupWord,
    w2: &GroupWord,
    max_len: usize,
    budget: usize,
) -> Result<ConjugacyOutcome> {
    let gens = generator_words(aut)?;
    // letters: 2*g is generator g, 2*g+1 its inverse
    let letters = 2 * gens.len();
    let mut candidates = 0usize;
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for len in 0..=max_len {
        if len > 0 {
            frontier = frontier
                .iter()
                .flat_map(|w| {
                    (0..letters)
                        .filter(move |&l| w.last().is_none_or(|&p| p ^ 1 != l))
                        .map(move |l| {
                            let mut next = w.clone();
                            next.push(l);
                            next
                        })
                })
                .collect();
        }
        for spelled in &frontier {
            candidates += 1;
            let c = spelled.iter().fold(GroupWord::identity(), |acc, &l| {
                let g = &gens[l / 2].1;
                acc.mul(&if l % 2 == 0 { g.clone() } else { g.inverse() })
            });
            let c = GroupWord::from_factors_unchecked(free_reduce(c.factors().iter().copied()));
            if equal(aut, &c.conjugate(w1), w2, budget).is_identity() {
                let spelling = spelled
                    .iter()
                    .map(|&l| {
                        let name = &gens[l / 2].0;
                        if l % 2 == 0 {
                            name.clone()
                        } else {
                            format!("{name}^-1")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                return Ok(ConjugacyOutcome::Found {
                    conjugator: c,
                    spelling,
                    candidates,
                });
            }
        }
    }
    Ok(ConjugacyOutcome::Inconclusive { candidates })
}
