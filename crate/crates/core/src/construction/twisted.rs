//! The presentation `F` twisted by a c.e. set `C`:
//!
//! `f_0 = (1 - gamma)^(1/p) e_0 + sum_n 2^(-c_n/p) e_(n+1)`, `f_(n+1) = e_(n+1)`.
//!
//! Norms over `F` are computed from the enumeration alone through
//! `||sum a_j f_j||^p = |a_0|^p + sum_{j=1}^M E_j` with
//! `E_j = |a_0 2^(-c_(j-1)/p) + a_j|^p - |a_0|^p 2^(-c_(j-1))`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{Signed, Zero};

use super::ceset::{AccessMode, CeSession, CeSet, SessionCounts};
use crate::error::{Error, Result};
use crate::genset::{check_field, Field, GeneratingSet, GensetDescriptor, QueryStats};
use crate::lpspace::FiniteVector;
use crate::rigor::{
    ceil_log2, modulus_pow, pow2, pow_enclosure, pow_p, root_p, CRat, Enclosure, Exponent, Rat,
};

/// Refinement rounds before an adaptive loop gives up.
const MAX_ROUNDS: u32 = 24;

/// `2^(-c/p)` with width `< 2^-w`.
pub fn twist_weight(c: usize, p: &Exponent, w: u32) -> Result<Enclosure> {
    pow_enclosure(&Enclosure::point(pow2(-(c as i64))), &p.power().recip(), w)
}

/// `|a t + b|^p` over `t` in a nonnegative enclosure.
pub(crate) fn affine_modulus_pow(a: &CRat, t: &Enclosure, b: &CRat, p: &Exponent, w: u32) -> Result<Enclosure> {
    if t.is_point() {
        return modulus_pow(&(&a.scale(t.lo()) + b), p, w);
    }
    if a.is_real() && b.is_real() {
        let z = (&t.scale(&a.re) + &Enclosure::point(b.re.clone())).abs();
        return pow_p(&z, p, w);
    }
    // |a t + b|^2 = |a|^2 t^2 + 2 Re(a conj b) t + |b|^2
    let cross = (a * &b.conj()).re * Rat::from_integer(2.into());
    let sq = &(&t.square().scale(&a.norm_sqr()) + &t.scale(&cross)) + &Enclosure::point(b.norm_sqr());
    pow_enclosure(&sq.clamp_nonneg(), &p.power().half(), w)
}

/// `E_j` for `c = c_(j-1)`, with width `< 2^-k`.
pub fn epsilon_j(alpha0: &CRat, alphaj: &CRat, c: usize, p: &Exponent, k: u32) -> Result<Enclosure> {
    let mut w = k + 2;
    for _ in 0..MAX_ROUNDS {
        let e = epsilon_at(alpha0, alphaj, c, p, w)?;
        if e.narrower_than(k) {
            return Ok(e);
        }
        w += (w / 2).max(8);
    }
    Err(Error::OracleFailure(format!("E_j not resolved to 2^-{k}")))
}

fn epsilon_at(alpha0: &CRat, alphaj: &CRat, c: usize, p: &Exponent, w: u32) -> Result<Enclosure> {
    if alpha0.is_zero() {
        return modulus_pow(alphaj, p, w);
    }
    if alphaj.is_zero() {
        return Ok(Enclosure::zero());
    }
    let t = twist_weight(c, p, w)?;
    let first = affine_modulus_pow(alpha0, &t, alphaj, p, w)?;
    let second = modulus_pow(alpha0, p, w)?.scale(&pow2(-(c as i64)));
    Ok(&first - &second)
}

/// `||sum alphas[j] f_j||` with width `< 2^-k`, reading only `c_0 .. c_(M-1)`
/// for `M + 1` coefficients, and only those with a nonzero `alpha_0`
/// contribution.
pub fn twisted_norm_enclosure(session: &CeSession<'_>, alphas: &[CRat], p: &Exponent, k: u32) -> Result<Enclosure> {
    let Some(a0) = alphas.first() else {
        return Ok(Enclosure::zero());
    };
    if alphas.iter().all(CRat::is_zero) {
        return Ok(Enclosure::zero());
    }
    // c_(j-1) for the coefficients that need it; None past a finite enumeration
    let mut cs = Vec::with_capacity(alphas.len());
    for j in 1..alphas.len() {
        let need = !a0.is_zero() && !alphas[j].is_zero();
        cs.push(if need { session.element(j - 1) } else { None });
    }
    let extra = 32 - (alphas.len() as u32).leading_zeros() + 1;
    let mut w = k + 4;
    for _ in 0..MAX_ROUNDS {
        let mut sum = modulus_pow(a0, p, w + extra)?;
        for (j, c) in cs.iter().enumerate() {
            let aj = &alphas[j + 1];
            let e = match c {
                Some(c) => epsilon_at(a0, aj, *c, p, w + extra)?,
                None => modulus_pow(aj, p, w + extra)?,
            };
            sum = &sum + &e;
        }
        let norm = root_p(&sum.clamp_nonneg(), p, k + 1)?;
        if norm.narrower_than(k) {
            return Ok(norm);
        }
        w += (w / 2).max(8);
    }
    Err(Error::OracleFailure(format!("twisted norm not resolved to 2^-{k}")))
}

/// The norm oracle over `F`: a rational within `2^-k` of the norm, with the
/// enumeration-only session counts of the call.
pub fn twisted_norm(set: &CeSet, alphas: &[CRat], p: &Exponent, k: u32) -> Result<(Rat, SessionCounts)> {
    let session = set.session(AccessMode::EnumerateOnly);
    let e = twisted_norm_enclosure(&session, alphas, p, k)?;
    Ok((e.mid(), session.counts()))
}

/// `||v - sum beta_j f_j||` with width `< 2^-k`, by coordinate expansion.
/// Needs membership decisions: the members up to a bound `B` and their
/// enumeration indices are located, every other coordinate of `f_0` has
/// `c_n > B`, and their total `|beta_0|^p sum 2^-c_n` is at most
/// `|beta_0|^p 2^-B`.
pub fn expansion_residual(set: &CeSet, p: &Exponent, v: &FiniteVector, beta: &[CRat], k: u32) -> Result<Enclosure> {
    let session = set.session(AccessMode::Decide);
    let zero = CRat::zero();
    let b0 = beta.first().unwrap_or(&zero);
    let beta_at = |n: usize| beta.get(n).cloned().unwrap_or_default();
    if b0.is_zero() {
        let w = FiniteVector::from_dense(beta);
        return v.sub(&w).norm_p(p, k);
    }
    let pc = p.ceil()?;
    let scale_bits = ceil_log2(&b0.modulus_upper()).max(0) as u32;
    let mut w = k + 4;
    for _ in 0..MAX_ROUNDS {
        let bound = ((w + 2) * pc + scale_bits * pc + 2) as usize;
        let (g_lo, g_hi) = session.gamma_bounds(bound)?;
        let one = Rat::from_integer(1.into());
        let rest = Enclosure::new(&one - &g_hi, &one - &g_lo);
        if !rest.lo().is_positive() {
            w += 8;
            continue;
        }
        let s = root_p(&rest, p, w + 2)?;
        let mut sum = affine_modulus_pow(&-b0, &s, &v.get(0), p, w + 4)?;
        let listed = session.indices_up_to(bound)?;
        let reach = listed
            .iter()
            .map(|n| n + 1)
            .chain([beta.len().saturating_sub(1), v.extent().saturating_sub(1)])
            .max()
            .unwrap_or(0);
        let extra = 32 - (reach as u32 + 1).leading_zeros();
        for n in 0..reach {
            let target = &v.get(n + 1) - &beta_at(n + 1);
            let term = match session.element(n) {
                Some(c) => {
                    let t = twist_weight(c, p, w + 4 + extra)?;
                    affine_modulus_pow(&-b0, &t, &target, p, w + 4 + extra)?
                }
                None => modulus_pow(&target, p, w + 4 + extra)?,
            };
            sum = &sum + &term;
        }
        let b0p = modulus_pow(b0, p, 4)?;
        let tail = Enclosure::new(Rat::zero(), b0p.hi() * pow2(-(bound as i64)));
        sum = &sum + &tail;
        let norm = root_p(&sum.clamp_nonneg(), p, k + 1)?;
        if norm.narrower_than(k) {
            return Ok(norm);
        }
        w += (w / 2).max(8);
    }
    Err(Error::OracleFailure(format!("expanded residual not resolved to 2^-{k}")))
}

/// Counts of the enumeration-only discipline across all norm queries.
#[derive(Debug, Default)]
pub struct DisciplineLog {
    queries: AtomicUsize,
    violations: AtomicUsize,
    decide_calls: AtomicUsize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DisciplineCounts {
    pub queries: usize,
    /// Queries with `M + 1` coefficients that read some `c_n` with `n >= M`.
    pub violations: usize,
    pub decide_calls: usize,
}

impl DisciplineLog {
    fn record(&self, coeffs: usize, counts: &SessionCounts) {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let m = coeffs.saturating_sub(1);
        if counts.max_index.is_some_and(|n| n >= m) {
            self.violations.fetch_add(1, Ordering::Relaxed);
        }
        self.decide_calls.fetch_add(counts.decide_queries, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> DisciplineCounts {
        DisciplineCounts {
            queries: self.queries.load(Ordering::Relaxed),
            violations: self.violations.load(Ordering::Relaxed),
            decide_calls: self.decide_calls.load(Ordering::Relaxed),
        }
    }
}

/// `F` as an effective generating set.
pub struct TwistedGenSet {
    label: String,
    set: Arc<CeSet>,
    p: Exponent,
    field: Field,
    stats: QueryStats,
    discipline: DisciplineLog,
}

pub fn twisted_genset(set: Arc<CeSet>, p: Exponent, field: Field) -> TwistedGenSet {
    TwistedGenSet {
        label: format!("F[{}]", set.label()),
        set,
        p,
        field,
        stats: QueryStats::default(),
        discipline: DisciplineLog::default(),
    }
}

impl TwistedGenSet {
    pub fn ce_set(&self) -> &Arc<CeSet> {
        &self.set
    }

    pub fn discipline(&self) -> DisciplineCounts {
        self.discipline.snapshot()
    }

    /// The norm query together with the session counts it produced.
    pub fn norm_query_traced(&self, coeffs: &[CRat], k: u32) -> Result<(Rat, SessionCounts)> {
        check_field(self.field, coeffs)?;
        self.stats.record(k);
        let session = self.set.session(AccessMode::EnumerateOnly);
        let e = twisted_norm_enclosure(&session, coeffs, &self.p, k)?;
        let counts = session.counts();
        self.discipline.record(coeffs.len(), &counts);
        Ok((e.mid(), counts))
    }
}

impl GeneratingSet for TwistedGenSet {
    fn label(&self) -> &str {
        &self.label
    }

    fn field(&self) -> Field {
        self.field
    }

    fn exponent(&self) -> &Exponent {
        &self.p
    }

    fn stats(&self) -> &QueryStats {
        &self.stats
    }

    fn descriptor(&self) -> GensetDescriptor {
        GensetDescriptor {
            label: self.label.clone(),
            field: self.field,
            kind: "twisted".into(),
            params: vec![("p".into(), self.p.label()), ("ce_set".into(), self.set.label().into())],
        }
    }

    fn norm_enclosure(&self, coeffs: &[CRat], k: u32) -> Result<Enclosure> {
        let session = self.set.session(AccessMode::EnumerateOnly);
        let e = twisted_norm_enclosure(&session, coeffs, &self.p, k)?;
        self.discipline.record(coeffs.len(), &session.counts());
        Ok(e)
    }

    fn residual_norm(&self, v: &FiniteVector, coeffs: &[CRat], k: u32) -> Option<Result<Enclosure>> {
        Some(expansion_residual(&self.set, &self.p, v, coeffs, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::{int, rat};

    fn c(n: i64) -> CRat {
        CRat::from_int(n)
    }

    #[test]
    fn epsilon_examples() {
        let p = Exponent::from_ratio(3, 2).unwrap();
        let e = epsilon_j(&CRat::zero(), &c(2), 3, &p, 20).unwrap();
        assert!(e.contains(&modulus_pow(&c(2), &p, 40).unwrap().mid()));
        assert_eq!(epsilon_j(&c(1), &CRat::zero(), 3, &p, 20).unwrap(), Enclosure::zero());
        // |1/2 + 1| - 1/2 = 1
        assert_eq!(epsilon_j(&c(1), &c(1), 1, &Exponent::one(), 20).unwrap(), Enclosure::point(int(1)));
    }

    #[test]
    fn f0_has_unit_norm() {
        for p in [Exponent::one(), Exponent::from_ratio(3, 2).unwrap(), Exponent::two()] {
            for set in [CeSet::odds(), CeSet::primes()] {
                let (q, counts) = twisted_norm(&set, &[c(1)], &p, 30).unwrap();
                assert!((q - int(1)).abs() < pow2(-30));
                assert_eq!(counts.max_index, None);
            }
        }
    }

    #[test]
    fn odds_example_at_p1() {
        // ||f_0 + f_1||_1 = 1/3 + 3/2 + (2/3 - 1/2) = 2
        let (q, counts) = twisted_norm(&CeSet::odds(), &[c(1), c(1)], &Exponent::one(), 20).unwrap();
        assert!((q - int(2)).abs() < pow2(-20));
        assert_eq!(counts.max_index, Some(0));
    }

    #[test]
    fn expansion_agrees_with_identity() {
        let set = CeSet::odds();
        let p = Exponent::from_ratio(3, 2).unwrap();
        let alphas = [CRat::real(rat(-2, 3)), c(1), CRat::new(rat(1, 2), rat(1, 5)), c(0), c(3)];
        let a = twisted_norm_enclosure(&set.session(AccessMode::EnumerateOnly), &alphas, &p, 24).unwrap();
        let b = expansion_residual(&set, &p, &FiniteVector::zero(), &alphas, 24).unwrap();
        assert!(a.intersects(&b), "{a} vs {b}");
    }

    #[test]
    fn genset_logs_discipline() {
        let f = twisted_genset(Arc::new(CeSet::primes()), Exponent::two(), Field::Real);
        for m in 1..6 {
            f.norm_query(&vec![c(1); m], 10).unwrap();
        }
        assert_eq!(f.discipline(), DisciplineCounts { queries: 5, violations: 0, decide_calls: 0 });
        assert!(f.norm_query(&[CRat::i()], 3).is_err());
    }
}
