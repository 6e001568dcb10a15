//! Desk-scale c.e. sets: an injective enumeration `c_0, c_1, ...` with a
//! stage function, plus a membership decision used only in decide mode.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::Cell;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rigor::{pow2, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CeKind {
    Odds,
    Primes,
    /// A finite set enumerated in the given order.
    Explicit(Vec<usize>),
    /// A finite set whose elements appear at the given stages; ties keep the
    /// listed order.
    Throttled { elements: Vec<usize>, delays: BTreeMap<usize, usize> },
    /// The odd numbers, enumerated in blocks of `block`, largest first within
    /// each block.
    BlockReversed { block: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CeSet {
    label: String,
    kind: CeKind,
    /// For finite kinds: the enumeration `c_n` and the stage of each.
    order: Vec<usize>,
    stages: Vec<usize>,
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn nth_prime(n: usize) -> usize {
    (2..).filter(|&m| is_prime(m)).nth(n).unwrap()
}

impl CeSet {
    pub fn odds() -> Self {
        Self { label: "odds".into(), kind: CeKind::Odds, order: Vec::new(), stages: Vec::new() }
    }

    pub fn primes() -> Self {
        Self { label: "primes".into(), kind: CeKind::Primes, order: Vec::new(), stages: Vec::new() }
    }

    /// Rejects 0, repeated elements and the empty set.
    pub fn explicit(label: impl Into<String>, elements: Vec<usize>) -> Result<Self> {
        check_elements(&elements)?;
        let stages = (0..elements.len()).collect();
        Ok(Self { label: label.into(), kind: CeKind::Explicit(elements.clone()), order: elements, stages })
    }

    /// Every element of `delays` not in `elements` is appended to the set.
    pub fn throttled(label: impl Into<String>, elements: Vec<usize>, delays: BTreeMap<usize, usize>) -> Result<Self> {
        let mut all = elements.clone();
        for &e in delays.keys() {
            if !all.contains(&e) {
                all.push(e);
            }
        }
        check_elements(&all)?;
        let mut staged: Vec<(usize, usize, usize)> = all
            .iter()
            .enumerate()
            .map(|(i, &e)| (delays.get(&e).copied().unwrap_or(i), i, e))
            .collect();
        staged.sort();
        Ok(Self {
            label: label.into(),
            kind: CeKind::Throttled { elements, delays },
            order: staged.iter().map(|t| t.2).collect(),
            stages: staged.iter().map(|t| t.0).collect(),
        })
    }

    pub fn block_reversed(block: usize) -> Result<Self> {
        if block == 0 {
            return Err(Error::InvalidCeSet("block size must be positive".into()));
        }
        Ok(Self {
            label: format!("odds-reversed-{block}"),
            kind: CeKind::BlockReversed { block },
            order: Vec::new(),
            stages: Vec::new(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &CeKind {
        &self.kind
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, CeKind::Explicit(_) | CeKind::Throttled { .. })
    }

    /// `c_n`, or `None` past the end of a finite enumeration.
    pub fn element(&self, n: usize) -> Option<usize> {
        match &self.kind {
            CeKind::Odds => Some(2 * n + 1),
            CeKind::Primes => Some(nth_prime(n)),
            CeKind::BlockReversed { block } => {
                let (q, r) = (n / block, n % block);
                Some(2 * (q * block + block - 1 - r) + 1)
            }
            _ => self.order.get(n).copied(),
        }
    }

    /// The stage at which `c_n` is enumerated.
    pub fn stage_of(&self, n: usize) -> usize {
        self.stages.get(n).copied().unwrap_or(n)
    }

    /// Ground-truth membership.
    pub fn decide(&self, n: usize) -> bool {
        match &self.kind {
            CeKind::Odds | CeKind::BlockReversed { .. } => n % 2 == 1,
            CeKind::Primes => is_prime(n),
            _ => self.order.contains(&n),
        }
    }

    /// `gamma = sum_{j in C} 2^-j` when it has a closed form.
    pub fn gamma_exact(&self) -> Option<Rat> {
        match &self.kind {
            CeKind::Odds | CeKind::BlockReversed { .. } => Some(Rat::new(2.into(), 3.into())),
            CeKind::Primes => None,
            _ => Some(self.order.iter().map(|&c| pow2(-(c as i64))).sum()),
        }
    }

    /// `sum_{n >= from} 2^-c_n` when it has a closed form.
    pub fn tail_exact(&self, from: usize) -> Option<Rat> {
        let gamma = self.gamma_exact()?;
        let head: Rat = (0..from).map_while(|n| self.element(n)).map(|c| pow2(-(c as i64))).sum();
        Some(gamma - head)
    }

    pub fn session(&self, mode: AccessMode) -> CeSession<'_> {
        CeSession {
            set: self,
            mode,
            max_index: Cell::new(None),
            element_queries: Cell::new(0),
            decide_queries: Cell::new(0),
        }
    }
}

fn check_elements(elements: &[usize]) -> Result<()> {
    if elements.is_empty() {
        return Err(Error::InvalidCeSet("the set must be nonempty".into()));
    }
    if elements.contains(&0) {
        return Err(Error::InvalidCeSet("0 may not be a member".into()));
    }
    let distinct: BTreeSet<_> = elements.iter().collect();
    if distinct.len() != elements.len() {
        return Err(Error::InvalidCeSet("elements repeat".into()));
    }
    Ok(())
}

/// Which oracle an algorithm declared.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccessMode {
    EnumerateOnly,
    Decide,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SessionCounts {
    /// Largest enumeration index `n` whose `c_n` was read.
    pub max_index: Option<usize>,
    pub element_queries: usize,
    pub decide_queries: usize,
}

/// An instrumented view of a c.e. set. Sessions are cheap and single-threaded;
/// every algorithm opens its own.
#[derive(Debug)]
pub struct CeSession<'a> {
    set: &'a CeSet,
    mode: AccessMode,
    max_index: Cell<Option<usize>>,
    element_queries: Cell<usize>,
    decide_queries: Cell<usize>,
}

impl CeSession<'_> {
    pub fn mode(&self) -> AccessMode {
        self.mode
    }

    pub fn set(&self) -> &CeSet {
        self.set
    }

    /// `c_n`.
    pub fn element(&self, n: usize) -> Option<usize> {
        self.element_queries.set(self.element_queries.get() + 1);
        self.max_index.set(Some(self.max_index.get().map_or(n, |m| m.max(n))));
        self.set.element(n)
    }

    /// Elements enumerated by stage `s`.
    pub fn enumerate(&self, s: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut n = 0;
        while self.set.stage_of(n) <= s {
            match self.element(n) {
                Some(c) => out.push(c),
                None => break,
            }
            n += 1;
        }
        out
    }

    /// Membership; only in decide mode.
    pub fn decide(&self, n: usize) -> Result<bool> {
        if self.mode != AccessMode::Decide {
            return Err(Error::AccessViolation("membership decision in an enumerate-only session"));
        }
        self.decide_queries.set(self.decide_queries.get() + 1);
        Ok(self.set.decide(n))
    }

    pub fn counts(&self) -> SessionCounts {
        SessionCounts {
            max_index: self.max_index.get(),
            element_queries: self.element_queries.get(),
            decide_queries: self.decide_queries.get(),
        }
    }

    /// `gamma_s = sum of 2^-c over c enumerated by stage s`.
    pub fn gamma_stage(&self, s: usize) -> Rat {
        self.enumerate(s).iter().map(|&c| pow2(-(c as i64))).sum()
    }

    /// `[sum_{j <= b, j in C} 2^-j, that + 2^-b]`, which contains `gamma`.
    pub fn gamma_bounds(&self, b: usize) -> Result<(Rat, Rat)> {
        let mut lo = Rat::zero();
        for j in 1..=b {
            if self.decide(j)? {
                lo += pow2(-(j as i64));
            }
        }
        let hi = &lo + pow2(-(b as i64));
        Ok((lo, hi))
    }

    /// Enumeration indices of all members `<= b`, located by decide-guided
    /// enumeration.
    pub fn indices_up_to(&self, b: usize) -> Result<Vec<usize>> {
        let mut wanted = 0usize;
        for j in 1..=b {
            if self.decide(j)? {
                wanted += 1;
            }
        }
        let mut out = Vec::with_capacity(wanted);
        let mut n = 0;
        while out.len() < wanted {
            match self.element(n) {
                Some(c) if c <= b => out.push(n),
                Some(_) => {}
                None => return Err(Error::OracleFailure("enumeration ended before all members appeared".into())),
            }
            n += 1;
        }
        Ok(out)
    }
}

/// `gamma` as a decide-mode computable real: members up to `k + 1` plus half
/// the tail bound.
pub fn gamma_approx(set: &CeSet, k: u32) -> Rat {
    let session = set.session(AccessMode::Decide);
    let (lo, _) = session.gamma_bounds(k as usize + 1).expect("decide session");
    lo + pow2(-(k as i64) - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::rat;
    use alloc::vec;
    use num_traits::Signed;

    #[test]
    fn enumerations() {
        let odds = CeSet::odds();
        assert_eq!((0..4).map(|n| odds.element(n).unwrap()).collect::<Vec<_>>(), [1, 3, 5, 7]);
        let primes = CeSet::primes();
        assert_eq!((0..5).map(|n| primes.element(n).unwrap()).collect::<Vec<_>>(), [2, 3, 5, 7, 11]);
        let rev = CeSet::block_reversed(3).unwrap();
        assert_eq!((0..6).map(|n| rev.element(n).unwrap()).collect::<Vec<_>>(), [5, 3, 1, 11, 9, 7]);
        assert!(odds.decide(7) && !odds.decide(8) && primes.decide(13) && !primes.decide(1));
    }

    #[test]
    fn zero_is_rejected() {
        assert!(CeSet::explicit("bad", vec![3, 0]).is_err());
        assert!(CeSet::explicit("dup", vec![3, 3]).is_err());
        assert!(CeSet::throttled("bad", vec![], [(0, 2)].into()).is_err());
    }

    #[test]
    fn throttled_stages() {
        let t = CeSet::throttled("t", vec![2, 5, 9], [(2, 4)].into()).unwrap();
        // 5 at stage 1, 9 at stage 2, 2 held back to stage 4
        assert_eq!((0..3).map(|n| t.element(n).unwrap()).collect::<Vec<_>>(), [5, 9, 2]);
        let s = t.session(AccessMode::EnumerateOnly);
        assert_eq!(s.enumerate(0), Vec::<usize>::new());
        assert_eq!(s.enumerate(3), [5, 9]);
        assert_eq!(s.enumerate(4), [5, 9, 2]);
    }

    #[test]
    fn access_modes() {
        let odds = CeSet::odds();
        let s = odds.session(AccessMode::EnumerateOnly);
        assert!(matches!(s.decide(3), Err(Error::AccessViolation(_))));
        s.element(4);
        s.element(2);
        assert_eq!(s.counts(), SessionCounts { max_index: Some(4), element_queries: 2, decide_queries: 0 });
    }

    #[test]
    fn gamma_of_odds() {
        let odds = CeSet::odds();
        assert_eq!(odds.gamma_exact(), Some(rat(2, 3)));
        let q = gamma_approx(&odds, 10);
        assert!((q - rat(2, 3)).abs() < pow2(-10));
        assert_eq!(odds.tail_exact(2), Some(rat(1, 24)));
        let s = odds.session(AccessMode::Decide);
        let (lo, hi) = s.gamma_bounds(10).unwrap();
        assert!(lo <= rat(2, 3) && rat(2, 3) <= hi);
        assert_eq!(s.indices_up_to(7).unwrap(), [0, 1, 2, 3]);
    }
}
