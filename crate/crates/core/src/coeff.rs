//! Coefficient rings and sparse linear combinations.
//!
//! Two rings are supported: the integers and the field with two elements.
//! The ring is carried at runtime so that a single element type can flow
//! through the command line and the C interface.

use std::collections::btree_map::{self, Entry};
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Z,
    F2,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::F2 => write!(f, "F2"),
        }
    }
}

impl std::str::FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" | "z" | "int" | "integers" => Ok(Ring::Z),
            "F2" | "f2" | "Z2" | "z2" | "GF2" | "mod2" => Ok(Ring::F2),
            _ => Err(Error::parse(format!("unknown ring `{s}` (expected Z or F2)"))),
        }
    }
}

/// A ring element tagged with its ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Z(BigInt),
    F2(bool),
}

impl Coefficient {
    pub fn zero(ring: Ring) -> Self {
        match ring {
            Ring::Z => Coefficient::Z(BigInt::zero()),
            Ring::F2 => Coefficient::F2(false),
        }
    }

    pub fn one(ring: Ring) -> Self {
        Self::from_i64(ring, 1)
    }

    pub fn from_i64(ring: Ring, v: i64) -> Self {
        match ring {
            Ring::Z => Coefficient::Z(BigInt::from(v)),
            Ring::F2 => Coefficient::F2(v.rem_euclid(2) == 1),
        }
    }

    pub fn ring(&self) -> Ring {
        match self {
            Coefficient::Z(_) => Ring::Z,
            Coefficient::F2(_) => Ring::F2,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Z(v) => v.is_zero(),
            Coefficient::F2(b) => !*b,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::Z(v) => v.is_one(),
            Coefficient::F2(b) => *b,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring() != other.ring() {
            return Err(Error::RingMismatch(self.ring(), other.ring()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(match (self, other) {
            (Coefficient::Z(a), Coefficient::Z(b)) => Coefficient::Z(a + b),
            (Coefficient::F2(a), Coefficient::F2(b)) => Coefficient::F2(a ^ b),
            _ => unreachable!(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(match (self, other) {
            (Coefficient::Z(a), Coefficient::Z(b)) => Coefficient::Z(a * b),
            (Coefficient::F2(a), Coefficient::F2(b)) => Coefficient::F2(a & b),
            _ => unreachable!(),
        })
    }

    pub fn neg(&self) -> Self {
        match self {
            Coefficient::Z(a) => Coefficient::Z(-a),
            Coefficient::F2(b) => Coefficient::F2(*b),
        }
    }

    /// Multiplies by `(-1)^k`-style signs given as `1` or `-1`.
    pub fn signed(&self, sign: i64) -> Self {
        if sign < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// The image under the reduction map `Z -> F2`.
    pub fn mod2(&self) -> Self {
        match self {
            Coefficient::Z(a) => Coefficient::F2(a.is_odd_int()),
            Coefficient::F2(b) => Coefficient::F2(*b),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Coefficient::Z(a) => match a.to_i64() {
                Some(v) => json!(v),
                None => json!(a.to_string()),
            },
            Coefficient::F2(b) => json!(*b as u8),
        }
    }

    pub fn from_json(ring: Ring, v: &Value) -> Result<Self> {
        let int: BigInt = match v {
            Value::Number(n) => match n.as_i64() {
                Some(i) => BigInt::from(i),
                None => {
                    return Err(Error::parse(format!("coefficient {n} is not an integer")))
                }
            },
            Value::String(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| Error::parse(format!("coefficient `{s}` is not an integer")))?,
            other => return Err(Error::parse(format!("bad coefficient {other}"))),
        };
        Ok(match ring {
            Ring::Z => Coefficient::Z(int),
            Ring::F2 => Coefficient::F2(int.is_odd_int()),
        })
    }
}

trait OddInt {
    fn is_odd_int(&self) -> bool;
}

impl OddInt for BigInt {
    fn is_odd_int(&self) -> bool {
        (self.abs() % 2u8).is_one()
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Z(a) => write!(f, "{a}"),
            Coefficient::F2(b) => write!(f, "{}", *b as u8),
        }
    }
}

/// A finite linear combination of basis elements. Zero coefficients are never
/// stored, so equality of combinations is structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinCombo<B: Ord> {
    ring: Ring,
    terms: BTreeMap<B, Coefficient>,
}

impl<B: Ord + Clone> LinCombo<B> {
    pub fn zero(ring: Ring) -> Self {
        LinCombo { ring, terms: BTreeMap::new() }
    }

    pub fn single(ring: Ring, basis: B) -> Self {
        let mut out = Self::zero(ring);
        out.terms.insert(basis, Coefficient::one(ring));
        out
    }

    pub fn from_terms<I>(ring: Ring, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (B, Coefficient)>,
    {
        let mut out = Self::zero(ring);
        for (b, c) in terms {
            out.add_term(b, c)?;
        }
        Ok(out)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, B, Coefficient> {
        self.terms.iter()
    }

    pub fn basis(&self) -> impl Iterator<Item = &B> {
        self.terms.keys()
    }

    pub fn coefficient(&self, b: &B) -> Coefficient {
        self.terms.get(b).cloned().unwrap_or_else(|| Coefficient::zero(self.ring))
    }

    /// Removes and returns the smallest basis element with its coefficient.
    pub fn pop_first(&mut self) -> Option<(B, Coefficient)> {
        self.terms.pop_first()
    }

    pub fn add_term(&mut self, b: B, c: Coefficient) -> Result<()> {
        if c.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring, c.ring()));
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.entry(b) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&c)?;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    /// Adds `sign * b` where `sign` is a machine integer. Never fails.
    pub fn add_int(&mut self, b: B, v: i64) {
        let c = Coefficient::from_i64(self.ring, v);
        self.add_term(b, c).expect("same ring");
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Coefficient) -> Result<()> {
        if other.ring != self.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        for (b, d) in &other.terms {
            self.add_term(b.clone(), d.mul(c)?)?;
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.add_scaled(other, &Coefficient::one(self.ring))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(other, &Coefficient::from_i64(self.ring, -1))?;
        Ok(out)
    }

    pub fn scale(&self, c: &Coefficient) -> Result<Self> {
        let mut out = Self::zero(self.ring);
        out.add_scaled(self, c)?;
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        LinCombo {
            ring: self.ring,
            terms: self.terms.iter().map(|(b, c)| (b.clone(), c.neg())).collect(),
        }
    }

    /// Applies a linear map given on basis elements.
    pub fn map_linear<C, F>(&self, mut f: F) -> Result<LinCombo<C>>
    where
        C: Ord + Clone,
        F: FnMut(&B) -> Result<LinCombo<C>>,
    {
        let mut out = LinCombo::zero(self.ring);
        for (b, c) in &self.terms {
            out.add_scaled(&f(b)?, c)?;
        }
        Ok(out)
    }

    /// Relabels basis elements, combining coefficients that collide.
    pub fn map_basis<C, F>(&self, mut f: F) -> LinCombo<C>
    where
        C: Ord + Clone,
        F: FnMut(&B) -> C,
    {
        let mut out = LinCombo::zero(self.ring);
        for (b, c) in &self.terms {
            out.add_term(f(b), c.clone()).expect("same ring");
        }
        out
    }

    pub fn mod2(&self) -> Self {
        let mut out = Self::zero(Ring::F2);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), c.mod2()).expect("same ring");
        }
        out
    }

    /// Serializes as `{"ring": .., "terms": [[basis, coeff], ..]}`.
    pub fn to_json_with<F: Fn(&B) -> Value>(&self, f: F) -> Value {
        let terms: Vec<Value> =
            self.terms.iter().map(|(b, c)| json!([f(b), c.to_json()])).collect();
        json!({ "ring": self.ring.to_string(), "terms": terms })
    }

    pub fn from_json_with<F>(v: &Value, f: F) -> Result<Self>
    where
        F: Fn(&Value) -> Result<B>,
    {
        let ring: Ring = v
            .get("ring")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse("linear combination needs a \"ring\" field"))?
            .parse()?;
        Self::from_json_in_ring(ring, v, f)
    }

    /// Parses the `terms` array, using `ring` if the value carries none.
    pub fn from_json_in_ring<F>(ring: Ring, v: &Value, f: F) -> Result<Self>
    where
        F: Fn(&Value) -> Result<B>,
    {
        let ring = match v.get("ring").and_then(Value::as_str) {
            Some(r) => r.parse()?,
            None => ring,
        };
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("linear combination needs a \"terms\" array"))?;
        let mut out = Self::zero(ring);
        for t in terms {
            let pair = t
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::parse("each term must be a [basis, coefficient] pair"))?;
            out.add_term(f(&pair[0])?, Coefficient::from_json(ring, &pair[1])?)?;
        }
        Ok(out)
    }
}

impl<B: Ord + Clone> IntoIterator for LinCombo<B> {
    type Item = (B, Coefficient);
    type IntoIter = btree_map::IntoIter<B, Coefficient>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<'a, B: Ord + Clone> IntoIterator for &'a LinCombo<B> {
    type Item = (&'a B, &'a Coefficient);
    type IntoIter = btree_map::Iter<'a, B, Coefficient>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}
