use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};

/// A point of `Z^d` with arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVector(Vec<BigInt>);

/// A configuration: an `IntVector` whose entries are expected to be nonnegative.
pub type Config = IntVector;

/// Builds an [`IntVector`] from integer literals.
#[macro_export]
macro_rules! ivec {
    ($($x:expr),* $(,)?) => {
        $crate::intlin::IntVector::from_i64s(&[$($x as i64),*])
    };
}

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        IntVector(vec![BigInt::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = BigInt::from(1);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn set(&mut self, i: usize, value: BigInt) {
        self.0[i] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    /// Componentwise `self <= other`. Dimensions must agree.
    pub fn le(&self, other: &IntVector) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Coordinates with a nonzero entry.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.0[i].is_zero()).collect()
    }

    pub fn checked_add(&self, other: &IntVector) -> Result<IntVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &IntVector) -> Result<IntVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(self - other)
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|x| x * k).collect())
    }

    /// `self += k * other`.
    pub fn add_scaled(&mut self, k: &BigInt, other: &IntVector) {
        if k.is_zero() {
            return;
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += k * b;
        }
    }

    /// Keeps only the listed coordinates, in the listed order.
    pub fn project(&self, coords: &[usize]) -> IntVector {
        IntVector(coords.iter().map(|&i| self.0[i].clone()).collect())
    }

    pub fn concat(&self, other: &IntVector) -> IntVector {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        IntVector(v)
    }

    /// Entries reduced into `[0, n)`.
    pub fn residues(&self, n: u64) -> Result<Vec<u64>> {
        if n == 0 {
            return Err(Error::ZeroModulus);
        }
        let m = BigInt::from(n);
        Ok(self.0.iter().map(|x| x.mod_floor(&m).to_u64().expect("residue below u64 modulus")).collect())
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn linear_combination(coeffs: &[BigInt], vectors: &[IntVector], dim: usize) -> IntVector {
        let mut acc = IntVector::zeros(dim);
        for (c, v) in coeffs.iter().zip(vectors) {
            acc.add_scaled(c, v);
        }
        acc
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector::from_i64s(&v)
    }
}

impl From<Vec<BigInt>> for IntVector {
    fn from(v: Vec<BigInt>) -> Self {
        IntVector(v)
    }
}

impl FromIterator<BigInt> for IntVector {
    fn from_iter<I: IntoIterator<Item = BigInt>>(iter: I) -> Self {
        IntVector(iter.into_iter().collect())
    }
}

impl Index<usize> for IntVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl Add for &IntVector {
    type Output = IntVector;
    fn add(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector addition");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntVector {
    type Output = IntVector;
    fn sub(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector subtraction");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serializes a big integer as a JSON number when it fits in `i64`, and as a
/// decimal string otherwise.
pub(crate) fn serialize_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

pub(crate) struct BigIntVisitor;

impl<'de> Visitor<'de> for BigIntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        v.parse().map_err(|_| E::custom(format!("invalid integer {v:?}")))
    }
}

/// Serde adapter for a single `BigInt` field (`#[serde(with = "bigint_serde")]`).
pub mod bigint_serde {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        serialize_bigint(x, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        d.deserialize_any(BigIntVisitor)
    }
}

/// Serde adapter for `Vec<BigInt>` fields.
pub mod bigint_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        IntVector(xs.to_vec()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Ok(IntVector::deserialize(d)?.0)
    }
}

/// Serde adapter for maps with `BigInt` values, such as fixed section values.
pub mod bigint_map_serde {
    use std::collections::BTreeMap;

    use super::*;

    pub fn serialize<K, S>(m: &BTreeMap<K, BigInt>, s: S) -> Result<S::Ok, S::Error>
    where
        K: Serialize + Ord,
        S: Serializer,
    {
        s.collect_map(m.iter().map(|(k, v)| (k, Wrapped(v))))
    }

    pub fn deserialize<'de, K, D>(d: D) -> Result<BTreeMap<K, BigInt>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        D: Deserializer<'de>,
    {
        let raw: BTreeMap<K, Unwrapped> = BTreeMap::deserialize(d)?;
        Ok(raw.into_iter().map(|(k, v)| (k, v.0)).collect())
    }
}

struct Wrapped<'a>(&'a BigInt);

impl Serialize for Wrapped<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_bigint(self.0, s)
    }
}

struct Unwrapped(BigInt);

impl<'de> Deserialize<'de> for Unwrapped {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(BigIntVisitor).map(Unwrapped)
    }
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for x in &self.0 {
            seq.serialize_element(&Wrapped(x))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct SeqVisitor;
        impl<'de> Visitor<'de> for SeqVisitor {
            type Value = IntVector;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an array of integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<IntVector, A::Error> {
                let mut out = Vec::new();
                while let Some(Unwrapped(x)) = seq.next_element()? {
                    out.push(x);
                }
                Ok(IntVector(out))
            }
        }
        d.deserialize_seq(SeqVisitor)
    }
}
