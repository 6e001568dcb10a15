//! The converse direction: an oracle for `lambda e_0` over `F` (with
//! `|lambda| = 1`) yields `(1 - gamma)^(-1/p)`, hence `gamma`, hence `C`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Signed};

use super::ceset::{AccessMode, CeSession, CeSet};
use super::e0::e0_rep;
use super::twisted::TwistedGenSet;
use crate::error::{Error, Result};
use crate::genset::{ballmap_from_disjoint_family, DisjointFamilyMap, GeneratingSet, RepFamily, VectorRep};
use crate::isometry::IsometryDescriptor;
use crate::rigor::{ceil_log2, modulus, pow2, pow_p, rat, ComputableReal, Enclosure, Exponent, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractTrace {
    pub k: u32,
    /// Precision of the oracle query that produced the answer.
    pub k_prime: u32,
    pub queries: usize,
}

/// A rational within `2^-k` of `(1 - gamma)^(-1/p)`: `|alpha_0|` from a
/// query at a precision `k'` large enough that `2^-k' q_0 <= 2^-(k+1)`.
///
/// `q_0` comes from a bootstrap query at precision 3: there
/// `||alpha_0| - x| < x / 8`, so `x < (8/7) |alpha_0|`.
pub fn extract_scale_traced(oracle: &VectorRep, k: u32) -> Result<(Rat, ExtractTrace)> {
    let boot = oracle.eval(3)?;
    let a0 = boot.first().cloned().unwrap_or_default();
    if a0.is_zero() {
        return Err(Error::OracleFailure("bootstrap coefficient on f_0 is zero".into()));
    }
    let q0 = modulus(&a0, 8).hi() * rat(8, 7);
    let k_prime = k + 1 + ceil_log2(&q0).max(0) as u32;
    let coeffs = oracle.eval(k_prime)?;
    let a0 = coeffs.first().cloned().unwrap_or_default();
    let value = modulus(&a0, k + 2).mid();
    Ok((value, ExtractTrace { k, k_prime, queries: 2 }))
}

pub fn extract_scale(oracle: &VectorRep, k: u32) -> Result<Rat> {
    Ok(extract_scale_traced(oracle, k)?.0)
}

/// `(1 - gamma)^(-1/p)` as a computable real relative to the oracle.
pub fn scale_real(oracle: VectorRep) -> ComputableReal {
    ComputableReal::from_fn("scale", move |k| extract_scale(&oracle, k))
}

/// `gamma = 1 - s^-p`. Uses `s` at precision `k + 4 + 2 ceil(p)` and
/// doubles the guard until the enclosure is narrow enough; `s` must be
/// certified above 0 on the way.
pub fn gamma_from_scale(s: ComputableReal, p: Exponent) -> Result<ComputableReal> {
    let pc = p.ceil()?;
    Ok(ComputableReal::from_fn("gamma", move |k| {
        let mut guard = 4 + 2 * pc;
        for _ in 0..12 {
            let j = k + guard;
            let sj = s.refine(j)?;
            if sj.lo().is_positive() {
                let y = pow_p(&sj, &p, j)?;
                let inv = y.recip().expect("positive enclosure");
                let g = &Enclosure::point(Rat::one()) - &inv;
                if g.narrower_than(k) {
                    return Ok(g.mid());
                }
            }
            guard *= 2;
        }
        Err(Error::OracleFailure(format!("gamma not resolved to 2^-{k}")))
    }))
}

/// Whether some approximation up to `max_k` certifies `gamma > 0`; a scale of
/// 1 gives `gamma = 0`, which no c.e. set without 0 produces.
pub fn gamma_positive(gamma: &ComputableReal, max_k: u32) -> Result<bool> {
    for k in 0..=max_k {
        if gamma.approx(k)? > pow2(-(k as i64)) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Membership of `n` from an approximation of gamma and the enumeration:
/// with `|q - gamma| < 2^-m`, `m = n + 2`, enumerate until `gamma_s > q - 2^-m`;
/// then `gamma - gamma_s < 2^-(n+1)`, so an unenumerated `n` is not in `C`.
pub fn decide_membership(gamma: &ComputableReal, session: &CeSession<'_>, n: usize, fuel: usize) -> Result<bool> {
    if n == 0 {
        return Ok(false);
    }
    let m = n as i64 + 2;
    let threshold = gamma.approx(m as u32)? - pow2(-m);
    let set = session.set();
    let mut sum = Rat::default();
    let mut seen = Vec::new();
    let mut idx = 0;
    let mut finished = false;
    for s in 0..=fuel {
        while !finished && set.stage_of(idx) <= s {
            match session.element(idx) {
                Some(c) => {
                    sum += pow2(-(c as i64));
                    seen.push(c);
                    idx += 1;
                }
                None => finished = true,
            }
        }
        if sum > threshold {
            return Ok(seen.contains(&n));
        }
        if finished {
            return Err(Error::OracleFailure(format!(
                "enumeration complete but gamma approximation {threshold} not reached"
            )));
        }
    }
    Err(Error::OracleFailure(format!("enumeration fuel {fuel} exhausted deciding {n}")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitReport {
    /// `(n, recovered membership)`; `None` where the pipeline failed.
    pub bits: Vec<(usize, Option<bool>)>,
    pub ground_truth: Vec<bool>,
    pub agreement: usize,
    /// Disagreement or failure somewhere.
    pub flagged: bool,
    pub failures: Vec<(usize, String)>,
    /// `(k, k', oracle queries)` for the gamma approximation.
    pub query_log: Vec<ExtractTrace>,
}

/// `extract_scale`, then `gamma_from_scale`, then `decide_membership` for
/// `n = 0 ..= n_max`, compared with ground truth.
pub fn recover_bits(oracle: &VectorRep, set: &CeSet, p: &Exponent, n_max: usize, fuel: usize) -> Result<BitReport> {
    let m_max = n_max as u32 + 2;
    let before = oracle.stats().snapshot();
    let gamma = gamma_from_scale(scale_real(oracle.clone()), p.clone())?;
    let top = gamma.approx(m_max);
    let after = oracle.stats().snapshot();
    let query_log = Vec::from([ExtractTrace {
        k: m_max,
        k_prime: after.max_precision,
        queries: after.queries - before.queries,
    }]);
    let mut bits = Vec::with_capacity(n_max + 1);
    let mut failures = Vec::new();
    match top {
        Ok(q) => {
            // one approximation at the finest precision serves every n
            let inner = gamma.clone();
            let cached = ComputableReal::from_fn("gamma", move |k| if k <= m_max { Ok(q.clone()) } else { inner.approx(k) });
            for n in 0..=n_max {
                let session = set.session(AccessMode::EnumerateOnly);
                match decide_membership(&cached, &session, n, fuel) {
                    Ok(b) => bits.push((n, Some(b))),
                    Err(e) => {
                        bits.push((n, None));
                        failures.push((n, format!("{e}")));
                    }
                }
            }
        }
        Err(e) => {
            for n in 0..=n_max {
                bits.push((n, None));
                failures.push((n, format!("{e}")));
            }
        }
    }
    let ground_truth: Vec<bool> = (0..=n_max).map(|n| n != 0 && set.decide(n)).collect();
    let agreement = bits.iter().zip(&ground_truth).filter(|((_, b), t)| *b == Some(**t)).count();
    Ok(BitReport {
        flagged: agreement < bits.len() || !failures.is_empty(),
        bits,
        ground_truth,
        agreement,
        failures,
        query_log,
    })
}

/// `n -> lambda_n e_phi(n)` as vectors computable over `F`, using the
/// decide-mode representation of `e_0`.
pub fn descriptor_family_over_f(d: &IsometryDescriptor, set: Arc<CeSet>, p: Exponent, label: &str) -> RepFamily {
    let e0 = e0_rep(set, p, label);
    let d = d.clone();
    let label = String::from(label);
    Arc::new(move |n| {
        let m = d.phi(n);
        let base = if m == 0 { e0.clone() } else { VectorRep::generator(label.clone(), m) };
        base.scaled(d.lambda(n).clone())
    })
}

/// The ball map over `(E, F)` of the isometry described by `d`.
pub fn descriptor_map_over_f(d: &IsometryDescriptor, f: Arc<TwistedGenSet>) -> Result<DisjointFamilyMap> {
    d.validate()?;
    let family = descriptor_family_over_f(d, f.ce_set().clone(), f.exponent().clone(), f.label());
    let target: Arc<dyn GeneratingSet> = f;
    Ok(ballmap_from_disjoint_family(family, "E", target, None)?.with_params("descriptor-over-f", Vec::new()))
}
