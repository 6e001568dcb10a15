//! Finitely supported vectors of `l^p` over exact complex rationals.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::error::Result;
use crate::rigor::{modulus_pow, root_p, CRat, Enclosure, Exponent, Guard, Rat};

/// A finitely supported sequence. Zero coordinates are never stored, so the
/// key set is exactly the support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FiniteVector {
    coords: BTreeMap<usize, CRat>,
}

/// The set of indices carrying a nonzero coordinate.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SupportSet(BTreeSet<usize>);

impl SupportSet {
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.0.contains(&n)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_disjoint(&self, other: &SupportSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn first_common(&self, other: &SupportSet) -> Option<usize> {
        self.0.intersection(&other.0).next().copied()
    }
}

impl FiniteVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `e_n`.
    pub fn basis(n: usize) -> Self {
        let mut coords = BTreeMap::new();
        coords.insert(n, CRat::one());
        Self { coords }
    }

    /// Builds a vector from `(index, value)` pairs; repeated indices add up.
    pub fn from_coords<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, CRat)>,
    {
        let mut v = Self::zero();
        for (n, a) in entries {
            v.add_at(n, &a);
        }
        v
    }

    /// Coordinates `0..values.len()` taken from a dense list.
    pub fn from_dense(values: &[CRat]) -> Self {
        Self::from_coords(values.iter().cloned().enumerate())
    }

    pub fn get(&self, n: usize) -> CRat {
        self.coords.get(&n).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &CRat)> {
        self.coords.iter().map(|(n, a)| (*n, a))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.coords.values().all(CRat::is_real)
    }

    /// One past the largest index in the support (0 for the zero vector).
    pub fn extent(&self) -> usize {
        self.coords.keys().next_back().map_or(0, |n| n + 1)
    }

    pub fn support(&self) -> SupportSet {
        SupportSet(self.coords.keys().copied().collect())
    }

    pub fn add_at(&mut self, n: usize, a: &CRat) {
        if a.is_zero() {
            return;
        }
        let sum = &self.get(n) + a;
        if sum.is_zero() {
            self.coords.remove(&n);
        } else {
            self.coords.insert(n, sum);
        }
    }

    pub fn add(&self, other: &FiniteVector) -> FiniteVector {
        let mut out = self.clone();
        for (n, a) in other.iter() {
            out.add_at(n, a);
        }
        out
    }

    pub fn sub(&self, other: &FiniteVector) -> FiniteVector {
        self.add(&other.scale(&-CRat::one()))
    }

    pub fn scale(&self, a: &CRat) -> FiniteVector {
        if a.is_zero() {
            return FiniteVector::zero();
        }
        FiniteVector {
            coords: self.coords.iter().map(|(n, x)| (*n, a * x)).collect(),
        }
    }

    /// Coordinates as a dense list over `0..extent()`.
    pub fn to_dense(&self) -> Vec<CRat> {
        (0..self.extent()).map(|n| self.get(n)).collect()
    }

    /// `sum |a_n|^p` with width `< 2^-k`.
    pub fn norm_pow_p(&self, p: &Exponent, k: u32) -> Result<Enclosure> {
        let n = self.coords.len().max(1) as u32;
        let per_term = k + (32 - n.leading_zeros()) + 1;
        let mut acc = Enclosure::zero();
        for a in self.coords.values() {
            acc = &acc + &modulus_pow(a, p, per_term)?;
        }
        Ok(acc)
    }

    /// `||v||_p` with width `< 2^-k`, plus the guard precision it took.
    pub fn norm_p_traced(&self, p: &Exponent, k: u32) -> Result<(Enclosure, Guard)> {
        if self.is_zero() {
            let g = Guard { requested: k, working: k, attempts: 1 };
            return Ok((Enclosure::zero(), g));
        }
        let mut w = k + 2;
        let mut attempts = 1;
        loop {
            let sum = self.norm_pow_p(p, w)?.clamp_nonneg();
            let norm = root_p(&sum, p, k + 1)?;
            if norm.narrower_than(k) {
                let g = Guard { requested: k, working: w, attempts };
                return Ok((norm, g));
            }
            // the root is Hoelder of order 1/p, so each round gains about w/p bits
            w += (w / 2).max(8);
            attempts += 1;
        }
    }

    pub fn norm_p(&self, p: &Exponent, k: u32) -> Result<Enclosure> {
        Ok(self.norm_p_traced(p, k)?.0)
    }
}

pub fn basis(n: usize) -> FiniteVector {
    FiniteVector::basis(n)
}

pub fn norm_p(v: &FiniteVector, p: &Exponent, k: u32) -> Result<Enclosure> {
    v.norm_p(p, k)
}

pub fn disjoint(u: &FiniteVector, v: &FiniteVector) -> bool {
    u.support().is_disjoint(&v.support())
}

/// Coefficient-wise `sum_j alphas[j] * vectors[j]`.
pub fn combine(alphas: &[CRat], vectors: &[FiniteVector]) -> FiniteVector {
    let mut out = FiniteVector::zero();
    for (a, v) in alphas.iter().zip(vectors) {
        out = out.add(&v.scale(a));
    }
    out
}

impl fmt::Display for FiniteVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, a)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}: {a}")?;
        }
        write!(f, "}}")
    }
}

/// Exact `sum |a_n|` for real vectors, the `p = 1` norm.
pub fn l1_norm_exact(v: &FiniteVector) -> Option<Rat> {
    v.coords
        .values()
        .map(CRat::exact_modulus)
        .try_fold(Rat::default(), |acc, m| Some(acc + m?))
}
