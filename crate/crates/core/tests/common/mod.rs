#![allow(dead_code)]

use autgrp::automaton::{build_union, Automaton, BuildOptions, StateId};
use autgrp::constructions::{block_extend, sanov_pair};
use autgrp::linalg::IntMatrix;
use autgrp::nadic::DigitWord;
use autgrp::treeaction::{Factor, GroupWord};
use rand::Rng;

pub fn mat(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64_rows(rows)
}

/// Named matrix sets used throughout the integration suites.
pub fn matrix_sets() -> Vec<(&'static str, Vec<IntMatrix>)> {
    let (a, b) = sanov_pair();
    let padded: Vec<IntMatrix> = block_extend(
        &[IntMatrix::identity(1), IntMatrix::identity(1)],
        &[a.clone(), b.clone()],
    )
    .unwrap()
    .into_iter()
    .map(|e| e.combined)
    .collect();
    vec![
        ("doubling", vec![mat(&[&[2]])]),
        ("odometer", vec![mat(&[&[1]])]),
        ("negation", vec![mat(&[&[-1]])]),
        ("tripling", vec![mat(&[&[3]])]),
        ("shear", vec![mat(&[&[1, 1], &[0, 1]])]),
        ("cat-map", vec![mat(&[&[2, 1], &[1, 1]])]),
        ("det-7", vec![mat(&[&[1, 2], &[3, -1]])]),
        ("identity-2", vec![IntMatrix::identity(2)]),
        ("sanov", vec![a, b]),
        ("sanov-padded-3", padded),
    ]
}

pub fn coprime_bases(ms: &[IntMatrix], candidates: &[u32]) -> Vec<u32> {
    candidates
        .iter()
        .copied()
        .filter(|&n| ms.iter().all(|m| m.coprime_to(n)))
        .collect()
}

pub fn build(ms: &[IntMatrix], n: u32) -> Automaton {
    build_union(ms, n, &BuildOptions::default()).unwrap()
}

pub fn random_word<R: Rng>(aut: &Automaton, rng: &mut R, max_len: usize) -> GroupWord {
    let len = rng.gen_range(0..=max_len);
    let factors = (0..len)
        .map(|_| Factor {
            state: StateId(rng.gen_range(0..aut.state_count()) as u32),
            inverse: rng.gen_bool(0.5),
        })
        .collect();
    GroupWord::new(aut, factors).unwrap()
}

pub fn random_digits<R: Rng>(aut: &Automaton, rng: &mut R, max_len: usize) -> DigitWord {
    let len = rng.gen_range(0..=max_len);
    let idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..aut.alphabet_size())).collect();
    DigitWord::from_indices(&idx, aut.base(), aut.dim())
}

/// Every digit word of length exactly `len`.
pub fn all_words(aut: &Automaton, len: usize) -> Vec<DigitWord> {
    let a = aut.alphabet_size();
    let total = a.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let idx: Vec<usize> = (0..len)
                .map(|_| {
                    let x = code % a;
                    code /= a;
                    x
                })
                .collect();
            DigitWord::from_indices(&idx, aut.base(), aut.dim())
        })
        .collect()
}
