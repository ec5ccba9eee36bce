//! Matrix constructions over `Z^d`: block-diagonal common extensions of
//! matrix pairs, a stock free pair in `SL_2(Z)`, and the presentation
//! `⟨a_1..a_d, t_1..t_m | [a_i,a_j], t_k a_j t_k^-1 = a_1^{m_1j} ⋯ a_d^{m_dj}⟩`
//! together with a checker that runs every relator through the word problem.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::treeaction::{format_word, is_identity, power, translation_word, GroupWord, WordProblemResult};

/// `diag(upper, lower)` with `lower` acting on the last two coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockExtension {
    pub upper: IntMatrix,
    pub lower: IntMatrix,
    pub combined: IntMatrix,
}

impl BlockExtension {
    pub fn new(upper: IntMatrix, lower: IntMatrix) -> Self {
        let combined = block_diag(&upper, &lower);
        BlockExtension { upper, lower, combined }
    }
}

pub fn block_diag(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (p, q) = (a.dim(), b.dim());
    let mut out = IntMatrix::zero(p + q);
    for i in 0..p {
        for j in 0..p {
            out.set(i, j, a.get(i, j).clone());
        }
    }
    for i in 0..q {
        for j in 0..q {
            out.set(p + i, p + j, b.get(i, j).clone());
        }
    }
    out
}

/// Pairs `uppers[i]` with `lowers[i]` (2×2) into `diag(uppers[i], lowers[i])`.
pub fn block_extend(uppers: &[IntMatrix], lowers: &[IntMatrix]) -> Result<Vec<BlockExtension>> {
    if uppers.len() != lowers.len() {
        return Err(Error::DimensionMismatch {
            expected: uppers.len(),
            found: lowers.len(),
        });
    }
    let Some(first) = uppers.first() else {
        return Ok(Vec::new());
    };
    uppers
        .iter()
        .zip(lowers)
        .map(|(u, l)| {
            if u.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: u.dim(),
                });
            }
            if l.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: l.dim(),
                });
            }
            Ok(BlockExtension::new(u.clone(), l.clone()))
        })
        .collect()
}

/// `[[1,2],[0,1]]` and `[[1,0],[2,1]]`, which generate a free group of rank 2.
pub fn sanov_pair() -> (IntMatrix, IntMatrix) {
    (
        IntMatrix::from_i64_rows(&[[1, 2], [0, 1]]),
        IntMatrix::from_i64_rows(&[[1, 0], [2, 1]]),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Translation generator `a_{j+1}`.
    A(usize),
    /// Stable letter `t_{k+1}` for matrix `k`.
    T(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relator {
    /// `[a_i, a_j] = a_i a_j a_i^-1 a_j^-1`.
    Commutator(usize, usize),
    Word(Vec<(Generator, BigInt)>),
}

impl Relator {
    /// Builds a word relator, merging adjacent powers of the same generator.
    pub fn word(syllables: impl IntoIterator<Item = (Generator, BigInt)>) -> Relator {
        let mut out: Vec<(Generator, BigInt)> = Vec::new();
        for (g, e) in syllables {
            match out.last_mut() {
                Some((last, exp)) if *last == g => {
                    *exp += e;
                    if exp.is_zero() {
                        out.pop();
                    }
                }
                _ if e.is_zero() => {}
                _ => out.push((g, e)),
            }
        }
        Relator::Word(out)
    }

    fn syllables(&self) -> Vec<(Generator, BigInt)> {
        match self {
            Relator::Commutator(i, j) => vec![
                (Generator::A(*i), BigInt::one()),
                (Generator::A(*j), BigInt::one()),
                (Generator::A(*i), -BigInt::one()),
                (Generator::A(*j), -BigInt::one()),
            ],
            Relator::Word(w) => w.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresentationKind {
    /// Every matrix is unimodular: the group is `Z^d ⋊ Γ`.
    SemidirectProduct,
    /// Some determinant is not `±1`; the relators describe an ascending HNN
    /// extension of `Z^d` and only hold one-sidedly over `Z`.
    AscendingHnn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub dim: usize,
    pub stable_letters: usize,
    pub relators: Vec<Relator>,
    pub kind: PresentationKind,
}

impl Presentation {
    pub fn generator_name(&self, g: Generator) -> String {
        match g {
            Generator::A(_) if self.dim == 1 => "a".into(),
            Generator::A(j) => format!("a{}", j + 1),
            Generator::T(_) if self.stable_letters == 1 => "t".into(),
            Generator::T(k) => format!("t{}", k + 1),
        }
    }

    pub fn generators(&self) -> Vec<Generator> {
        (0..self.dim)
            .map(Generator::A)
            .chain((0..self.stable_letters).map(Generator::T))
            .collect()
    }

    pub fn format_relator(&self, r: &Relator) -> String {
        match r {
            Relator::Commutator(i, j) => format!(
                "[{},{}]",
                self.generator_name(Generator::A(*i)),
                self.generator_name(Generator::A(*j))
            ),
            Relator::Word(w) if w.is_empty() => "1".into(),
            Relator::Word(w) => w
                .iter()
                .map(|(g, e)| {
                    let name = self.generator_name(*g);
                    if e.is_one() {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().into_iter().map(|g| self.generator_name(g)).collect();
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_relator(r)).collect();
        write!(f, "< {} | {} >", gens.join(", "), rels.join(", "))
    }
}

/// Commutators `[a_i, a_j]` for `i < j`, then for each matrix `t_k` and
/// column `j` the relator `t_k a_j t_k^-1 a_d^{-m_dj} ⋯ a_1^{-m_1j}`.
pub fn presentation_for(ms: &[IntMatrix]) -> Result<Presentation> {
    let first = ms.first().ok_or(Error::EmptyMatrixList)?;
    let d = first.dim();
    if let Some(bad) = ms.iter().find(|m| m.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }
    let mut relators = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            relators.push(Relator::Commutator(i, j));
        }
    }
    for (k, m) in ms.iter().enumerate() {
        for j in 0..d {
            let mut syl = vec![
                (Generator::T(k), BigInt::one()),
                (Generator::A(j), BigInt::one()),
                (Generator::T(k), -BigInt::one()),
            ];
            for i in (0..d).rev() {
                syl.push((Generator::A(i), -m.get(i, j)));
            }
            relators.push(Relator::word(syl));
        }
    }
    let kind = if ms.iter().all(IntMatrix::is_unimodular) {
        PresentationKind::SemidirectProduct
    } else {
        PresentationKind::AscendingHnn
    };
    Ok(Presentation {
        dim: d,
        stable_letters: ms.len(),
        relators,
        kind,
    })
}

#[derive(Clone, Debug)]
pub struct RelatorCheck {
    pub relator: String,
    pub word: String,
    pub result: WordProblemResult,
}

impl RelatorCheck {
    pub fn passed(&self) -> bool {
        self.result.is_identity()
    }
}

/// Rewrites each relator into automaton states (`a_j` as the translation word
/// of component 0, `t_k` as `m_0` of component `k`) and decides whether it is
/// the identity.
pub fn relator_check(aut: &Automaton, p: &Presentation, budget: usize) -> Result<Vec<RelatorCheck>> {
    if p.dim != aut.dim() {
        return Err(Error::DimensionMismatch {
            expected: aut.dim(),
            found: p.dim,
        });
    }
    if p.stable_letters > aut.matrices().len() {
        return Err(Error::DimensionMismatch {
            expected: aut.matrices().len(),
            found: p.stable_letters,
        });
    }
    let zero = crate::linalg::IntVector::zeros(aut.dim());
    let image = |g: Generator| -> Result<GroupWord> {
        match g {
            Generator::A(j) => translation_word(aut, 0, j),
            Generator::T(k) => {
                let id = aut
                    .state(k, &zero)
                    .ok_or_else(|| Error::UnknownState(format!("m[{k}]:{zero}")))?;
                GroupWord::state(aut, id)
            }
        }
    };
    p.relators
        .iter()
        .map(|r| {
            let mut w = GroupWord::identity();
            for (g, e) in r.syllables() {
                w = w.mul(&power(&image(g)?, &e)?);
            }
            let result = is_identity(aut, &w, budget);
            Ok(RelatorCheck {
                relator: p.format_relator(r),
                word: format_word(aut, &w),
                result,
            })
        })
        .collect()
}

pub fn syllable(g: Generator, e: i64) -> (Generator, BigInt) {
    (g, BigInt::from(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{build_single, build_union, BuildOptions};
    use crate::treeaction::DEFAULT_NODE_BUDGET;
    use proptest::prelude::*;

    #[test]
    fn block_extend_examples() {
        let (a, b) = sanov_pair();
        let ext = block_extend(&[IntMatrix::identity(4), IntMatrix::identity(4)], &[a.clone(), b]).unwrap();
        assert_eq!(ext.len(), 2);
        for e in &ext {
            assert_eq!(e.combined.dim(), 6);
            assert!(e.combined.is_unimodular());
        }
        assert_eq!(ext[0].combined.get(4, 5), &BigInt::from(2));
        assert_eq!(ext[0].combined.row_sum_norm(), BigInt::from(3));

        let one = block_extend(&[IntMatrix::identity(3)], &[IntMatrix::identity(2)]).unwrap();
        assert_eq!(one[0].combined, IntMatrix::identity(5));

        assert!(block_extend(&[IntMatrix::identity(2)], &[]).is_err());
        assert!(block_extend(&[IntMatrix::identity(2)], &[IntMatrix::identity(3)]).is_err());
        assert!(block_extend(&[IntMatrix::identity(2), IntMatrix::identity(1)], &[a.clone(), a]).is_err());
    }

    #[test]
    fn presentation_examples() {
        let bs = presentation_for(&[IntMatrix::from_i64_rows(&[[2]])]).unwrap();
        assert_eq!(bs.kind, PresentationKind::AscendingHnn);
        assert_eq!(bs.to_string(), "< a, t | t a t^-1 a^-2 >");

        let id = presentation_for(&[IntMatrix::identity(2)]).unwrap();
        assert_eq!(id.kind, PresentationKind::SemidirectProduct);
        assert_eq!(
            id.to_string(),
            "< a1, a2, t | [a1,a2], t a1 t^-1 a1^-1, t a2 t^-1 a2^-1 >"
        );

        let shear = presentation_for(&[IntMatrix::from_i64_rows(&[[1, 1], [0, 1]])]).unwrap();
        assert_eq!(
            shear.to_string(),
            "< a1, a2, t | [a1,a2], t a1 t^-1 a1^-1, t a2 t^-1 a2^-1 a1^-1 >"
        );

        let (a, b) = sanov_pair();
        let two = presentation_for(&[a, b]).unwrap();
        assert_eq!(two.relators.len(), 5);
        assert_eq!(two.format_relator(&two.relators[2]), "t1 a2 t1^-1 a2^-1 a1^-2");
    }

    #[test]
    fn relator_word_merges_syllables() {
        let r = Relator::word([
            syllable(Generator::A(0), 2),
            syllable(Generator::A(0), -2),
            syllable(Generator::T(0), 1),
            syllable(Generator::A(1), 0),
        ]);
        assert_eq!(r, Relator::Word(vec![syllable(Generator::T(0), 1)]));
    }

    #[test]
    fn relators_hold_in_automaton() {
        let bs = build_single(&IntMatrix::from_i64_rows(&[[2]]), 3, &BuildOptions::default()).unwrap();
        let p = presentation_for(bs.matrices()).unwrap();
        let checks = relator_check(&bs, &p, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(checks.len(), 1);
        assert!(checks[0].passed());

        let id = build_single(&IntMatrix::identity(2), 3, &BuildOptions::default()).unwrap();
        let p = presentation_for(id.matrices()).unwrap();
        assert!(relator_check(&id, &p, DEFAULT_NODE_BUDGET)
            .unwrap()
            .iter()
            .all(RelatorCheck::passed));

        let (a, b) = sanov_pair();
        let two = build_union(&[a, b], 3, &BuildOptions::default()).unwrap();
        let p = presentation_for(two.matrices()).unwrap();
        assert!(relator_check(&two, &p, DEFAULT_NODE_BUDGET)
            .unwrap()
            .iter()
            .all(RelatorCheck::passed));
    }

    #[test]
    fn corrupted_relator_fails() {
        let bs = build_single(&IntMatrix::from_i64_rows(&[[2]]), 3, &BuildOptions::default()).unwrap();
        let mut p = presentation_for(bs.matrices()).unwrap();
        p.relators = vec![Relator::word([
            syllable(Generator::T(0), 1),
            syllable(Generator::A(0), 1),
            syllable(Generator::T(0), -1),
            syllable(Generator::A(0), -3),
        ])];
        let checks = relator_check(&bs, &p, DEFAULT_NODE_BUDGET).unwrap();
        assert!(checks[0].result.is_nontrivial());
        assert_eq!(checks[0].relator, "t a t^-1 a^-3");
    }

    fn small(d: usize) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(-3i64..=3, d * d).prop_map(move |e| {
            let rows: Vec<Vec<i64>> = e.chunks(d).map(|c| c.to_vec()).collect();
            IntMatrix::from_i64_rows(&rows)
        })
    }

    proptest! {
        #[test]
        fn block_diag_multiplicative(a in small(3), b in small(2), c in small(3), e in small(2)) {
            let lhs = block_diag(&a, &b).mul(&block_diag(&c, &e));
            prop_assert_eq!(lhs, block_diag(&a.mul(&c), &b.mul(&e)));
            prop_assert_eq!(block_diag(&a, &b).det(), a.det() * b.det());
        }
    }
}
