//! Exact integer vectors and square matrices, plus the digit/carry split and
//! the state box used to index automaton states.
//!
//! Everything here is arbitrary precision. Matrices and vectors serialize to
//! JSON as (nested) arrays of integers, row-major, with no size limit on the
//! integers themselves.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An integer column vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        IntVector(coords)
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        IntVector(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        IntVector(vec![BigInt::zero(); dim])
    }

    /// The standard basis vector `e_axis` (0-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = BigInt::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    /// Coordinates as machine integers, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|c| c.to_i64()).collect()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|c| c * k).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A square integer matrix, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::NotSquare);
        }
        Ok(IntMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for small literal matrices. Panics if not square.
    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(rows).expect("matrix literal must be square")
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        IntMatrix { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigInt) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.dim)
    }

    pub fn column(&self, col: usize) -> IntVector {
        IntVector((0..self.dim).map(|r| self.get(r, col).clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Entries as machine integers (row-major), if they all fit.
    pub fn to_i64_entries(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(|c| c.to_i64()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let d = self.dim;
        let mut out = IntMatrix::zero(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &IntVector) -> IntVector {
        assert_eq!(self.dim, v.dim(), "matrix/vector dimension mismatch");
        IntVector(
            self.rows()
                .map(|row| row.iter().zip(v.coords()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// Maximal absolute row sum.
    pub fn row_sum_norm(&self) -> BigInt {
        self.rows()
            .map(|row| row.iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let d = self.dim;
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d {
            if a[k * d + k].is_zero() {
                let Some(p) = (k + 1..d).find(|&r| !a[r * d + k].is_zero()) else {
                    return BigInt::zero();
                };
                for c in 0..d {
                    a.swap(k * d + c, p * d + c);
                }
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let v = &a[i * d + j] * &a[k * d + k] - &a[i * d + k] * &a[k * d + j];
                    a[i * d + j] = v / &prev;
                }
            }
            prev = a[k * d + k].clone();
        }
        sign * prev
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// True iff `det != 0` and `gcd(|det|, n) = 1`.
    pub fn coprime_to(&self, n: u32) -> bool {
        let det = self.det();
        !det.is_zero() && det.gcd(&BigInt::from(n)).is_one()
    }

    /// Inverse over the integers via the adjugate; only defined for det = ±1.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let det = self.det();
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular(det));
        }
        let d = self.dim;
        if d == 1 {
            return Ok(IntMatrix {
                dim: 1,
                entries: vec![det],
            });
        }
        let mut inv = IntMatrix::zero(d);
        for i in 0..d {
            for j in 0..d {
                let minor = self.minor(i, j);
                let cof = if (i + j) % 2 == 0 { minor.det() } else { -minor.det() };
                // adj(A)[j][i] = cof(i, j); A^{-1} = adj(A) / det
                inv.set(j, i, cof * &det);
            }
        }
        Ok(inv)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let d = self.dim;
        let entries = (0..d)
            .filter(|&r| r != skip_row)
            .flat_map(|r| {
                (0..d)
                    .filter(move |&c| c != skip_col)
                    .map(move |c| self.get(r, c).clone())
            })
            .collect();
        IntMatrix { dim: d - 1, entries }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A letter of the alphabet `{0,..,n-1}^d`: a column of base-`n` digits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    digits: Vec<u32>,
    base: u32,
}

impl Letter {
    pub fn new(digits: Vec<u32>, base: u32) -> Result<Self> {
        check_base(base)?;
        if let Some(&bad) = digits.iter().find(|&&x| x >= base) {
            return Err(Error::DigitOutOfRange {
                digit: bad.into(),
                base,
            });
        }
        Ok(Letter { digits, base })
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.digits.len()
    }

    /// Mixed-radix index, first coordinate least significant.
    pub fn index(&self) -> usize {
        self.digits
            .iter()
            .rev()
            .fold(0usize, |acc, &x| acc * self.base as usize + x as usize)
    }

    pub fn from_index(mut index: usize, base: u32, dim: usize) -> Self {
        let n = base as usize;
        let digits = (0..dim)
            .map(|_| {
                let x = index % n;
                index /= n;
                x as u32
            })
            .collect();
        Letter { digits, base }
    }

    pub fn to_vector(&self) -> IntVector {
        IntVector(self.digits.iter().map(|&x| BigInt::from(x)).collect())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_base(n: u32) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidBase(n))
    } else {
        Ok(())
    }
}

/// Splits `v = r + n q` coordinatewise with every digit of `r` in `[0, n-1]`
/// (floored division).
pub fn mod_div(v: &IntVector, n: u32) -> Result<(Letter, IntVector)> {
    check_base(n)?;
    let nb = BigInt::from(n);
    let mut digits = Vec::with_capacity(v.dim());
    let mut quot = Vec::with_capacity(v.dim());
    for c in v.coords() {
        let (q, r) = c.div_mod_floor(&nb);
        digits.push(r.to_u32().expect("floored remainder lies in [0, n)"));
        quot.push(q);
    }
    Ok((Letter { digits, base: n }, IntVector(quot)))
}

pub fn row_sum_norm(m: &IntMatrix) -> BigInt {
    m.row_sum_norm()
}

/// All integer vectors with every coordinate in `[-‖M‖, ‖M‖-1]`, ordered
/// with the first coordinate varying fastest.
pub fn vm_set(m: &IntMatrix) -> Result<Vec<IntVector>> {
    let norm = m.row_sum_norm();
    if norm.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let side = (&norm * 2u32)
        .to_u64()
        .filter(|&s| s <= u32::MAX as u64)
        .ok_or(Error::Resource {
            what: "state box side 2*norm",
            value: (&norm * 2u32).to_string(),
            cap: u32::MAX as u64,
        })?;
    let d = m.dim();
    let count = (side as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if count > usize::MAX as u128 {
        return Err(Error::Resource {
            what: "state count",
            value: count.to_string(),
            cap: usize::MAX as u64,
        });
    }
    let lo = -norm;
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0u64; d];
    'outer: loop {
        out.push(IntVector(idx.iter().map(|&i| &lo + i).collect()));
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < side {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    Ok(out)
}

pub(crate) fn big_to_json(x: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&x.to_string()).expect("integer literal is a valid JSON number")
}

pub(crate) fn json_to_big<E: serde::de::Error>(n: &serde_json::Number) -> Result<BigInt, E> {
    let s = n.to_string();
    BigInt::from_str(&s).map_err(|_| E::custom(format!("expected an integer, found {s}")))
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(big_to_json))
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let nums = Vec::<serde_json::Number>::deserialize(d)?;
        nums.iter()
            .map(json_to_big)
            .collect::<std::result::Result<_, _>>()
            .map(IntVector)
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.rows().map(|row| row.iter().map(big_to_json).collect::<Vec<_>>()))
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<serde_json::Number>>::deserialize(d)?;
        let rows = rows
            .iter()
            .map(|r| r.iter().map(json_to_big).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        IntMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}

/// Parses a JSON list of matrices, e.g. `[[[2]]]`. All matrices must share a dimension.
pub fn parse_matrix_list(json: &str) -> Result<Vec<IntMatrix>> {
    let ms: Vec<IntMatrix> = serde_json::from_str(json)?;
    if let Some(first) = ms.first() {
        if let Some(bad) = ms.iter().find(|m| m.dim() != first.dim()) {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: bad.dim(),
            });
        }
    }
    Ok(ms)
}
