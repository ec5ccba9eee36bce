//! Big-integer evaluation of affine maps `u ↦ v + M u` on finite prefixes of
//! `n`-adic vectors.
//!
//! This module never touches the automaton tables. It is the reference the
//! automaton action is checked against.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{check_base, mod_div, IntMatrix, IntVector, Letter};

/// A finite word over `{0,..,n-1}^d`, read as the vector `Σ x_i n^(i-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitWord {
    letters: Vec<Letter>,
    base: u32,
    dim: usize,
}

impl DigitWord {
    pub fn new(letters: Vec<Letter>, base: u32, dim: usize) -> Result<Self> {
        check_base(base)?;
        for l in &letters {
            if l.base() != base {
                return Err(Error::DigitOutOfRange {
                    digit: l.base().into(),
                    base,
                });
            }
            if l.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: l.dim(),
                });
            }
        }
        Ok(DigitWord { letters, base, dim })
    }

    pub fn empty(base: u32, dim: usize) -> Self {
        DigitWord {
            letters: Vec::new(),
            base,
            dim,
        }
    }

    /// Builds a word from dense letter indices (first coordinate least significant).
    pub fn from_indices(indices: &[usize], base: u32, dim: usize) -> Self {
        DigitWord {
            letters: indices.iter().map(|&i| Letter::from_index(i, base, dim)).collect(),
            base,
            dim,
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        self.letters.iter().map(Letter::index).collect()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prefix(&self, len: usize) -> DigitWord {
        DigitWord {
            letters: self.letters[..len].to_vec(),
            base: self.base,
            dim: self.dim,
        }
    }

    /// Parses `2,0 1,1` style text: whitespace-separated letters, each a
    /// comma-joined digit tuple.
    pub fn parse(text: &str, base: u32, dim: usize) -> Result<Self> {
        check_base(base)?;
        let mut letters = Vec::new();
        let mut pos = 0;
        for token in text.split_whitespace() {
            let at = text[pos..].find(token).map_or(pos, |p| pos + p);
            pos = at + token.len();
            let digits = token
                .split(',')
                .map(|s| {
                    s.parse::<u32>()
                        .map_err(|_| Error::parse(at, format!("bad digit `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if digits.len() != dim {
                return Err(Error::parse(
                    at,
                    format!("letter `{token}` has {} digits, expected {dim}", digits.len()),
                ));
            }
            letters.push(Letter::new(digits, base)?);
        }
        Ok(DigitWord { letters, base, dim })
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Writes each (non-negative) coordinate of `u` in base `n` using exactly `k` digits.
pub fn encode(u: &IntVector, n: u32, k: usize) -> Result<DigitWord> {
    check_base(n)?;
    let modulus: BigInt = BigInt::from(n).pow(k);
    if let Some(c) = u.coords().iter().find(|c| c.is_negative() || **c >= modulus) {
        return Err(Error::DoesNotFit(c.clone(), k));
    }
    let nb = BigInt::from(n);
    let mut rest: Vec<BigInt> = u.coords().to_vec();
    let mut letters = Vec::with_capacity(k);
    for _ in 0..k {
        let digits = rest
            .iter_mut()
            .map(|c| {
                let (q, r) = c.div_rem(&nb);
                *c = q;
                r.to_u32().expect("digit below base")
            })
            .collect();
        letters.push(Letter::new(digits, n)?);
    }
    DigitWord::new(letters, n, u.dim())
}

pub fn decode(w: &DigitWord) -> IntVector {
    let nb = BigInt::from(w.base);
    let mut acc = vec![BigInt::zero(); w.dim];
    for l in w.letters.iter().rev() {
        for (a, &x) in acc.iter_mut().zip(l.digits()) {
            *a = &*a * &nb + x;
        }
    }
    IntVector::new(acc)
}

/// The affine map `u ↦ offset + matrix·u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub matrix: IntMatrix,
    pub offset: IntVector,
}

impl AffineMap {
    pub fn new(matrix: IntMatrix, offset: IntVector) -> Result<Self> {
        if matrix.dim() != offset.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                found: offset.dim(),
            });
        }
        Ok(AffineMap { matrix, offset })
    }

    pub fn translation(offset: IntVector) -> Self {
        AffineMap {
            matrix: IntMatrix::identity(offset.dim()),
            offset,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap {
            matrix: self.matrix.mul(&inner.matrix),
            offset: self.offset.add(&self.matrix.mul_vec(&inner.offset)),
        }
    }

    pub fn apply(&self, u: &IntVector) -> IntVector {
        self.offset.add(&self.matrix.mul_vec(u))
    }
}

/// Closed form: decode the prefix, apply the map exactly, reduce each
/// coordinate into `[0, n^k)` and re-encode.
pub fn affine_apply_prefix(f: &AffineMap, w: &DigitWord) -> DigitWord {
    let k = w.len();
    let modulus = BigInt::from(w.base).pow(k);
    let image = f.apply(&decode(w));
    let reduced = IntVector::new(image.coords().iter().map(|c| c.mod_floor(&modulus)).collect());
    encode(&reduced, w.base, k).expect("reduced value fits in k digits")
}

/// Digit-by-digit form: emit `Mod(v + M x)` and carry `Div(v + M x)` into
/// the next position.
pub fn affine_apply_recursive(f: &AffineMap, w: &DigitWord) -> DigitWord {
    let mut carry = f.offset.clone();
    let mut out = Vec::with_capacity(w.len());
    for x in &w.letters {
        let (y, q) =
            mod_div(&carry.add(&f.matrix.mul_vec(&x.to_vector())), w.base).expect("base validated on construction");
        out.push(y);
        carry = q;
    }
    DigitWord {
        letters: out,
        base: w.base,
        dim: w.dim,
    }
}
