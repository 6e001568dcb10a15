//! With membership decisions for `C`, `e_0` is computable over `F`:
//! `g = q_1 [f_0 - sum_{n=1}^{N_1 - 1} 2^(-c_(n-1)/p) f_n]` is within `2^-k`
//! of `e_0` once `q_1` is within `delta = 2^(-(kp+1)/p)` of
//! `(1 - gamma)^(-1/p) < M` and the tail of `f_0` past `N_1` has norm at most
//! `delta / (delta + M)`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::ceset::{AccessMode, CeSession, CeSet};
use super::twisted::{expansion_residual, twist_weight};
use crate::error::{Error, Result};
use crate::genset::VectorRep;
use crate::lpspace::FiniteVector;
use crate::rigor::{
    floor_dyadic, pow2, pow_enclosure, pow_p, rat, root_p, simplest_in, CRat, Enclosure, Exponent, Rat,
};

const MAX_ROUNDS: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E0Approx {
    pub k: u32,
    pub n1: usize,
    pub q1: Rat,
    /// The integer bound `(1 - gamma)^(-1/p) < M`.
    pub m: u64,
    /// Coefficients of `g` over `F`, `N_1` of them.
    pub coefficients: Vec<CRat>,
    /// Encloses `||e_0 - g||`; its upper end is below `2^-k`.
    pub certified_error: Enclosure,
    /// `||e_0 - g||` exactly, for `p = 1` when `gamma` has a closed form.
    pub exact_error: Option<Rat>,
    /// Bits of rounding applied to irrational coefficients (0 when exact).
    pub rounding_bits: u32,
    pub decide_queries: usize,
    pub enumeration_index: Option<usize>,
}

impl E0Approx {
    pub fn certified_error_bound(&self) -> &Rat {
        self.certified_error.hi()
    }
}

/// `(1 - gamma)^(-1/p)` with width `< 2^-k`, from decide-mode bounds on gamma.
pub fn inverse_scale(session: &CeSession<'_>, p: &Exponent, k: u32) -> Result<Enclosure> {
    let mut b = k as usize + 4;
    for _ in 0..MAX_ROUNDS {
        let (lo, hi) = session.gamma_bounds(b)?;
        let one = Rat::one();
        let rest = Enclosure::new(&one - hi, &one - lo);
        if rest.lo().is_positive() {
            let inv = rest.recip().expect("positive enclosure");
            let x = root_p(&inv, p, k + 1)?;
            if x.narrower_than(k) {
                return Ok(x);
            }
        }
        b += (b / 2).max(8);
    }
    Err(Error::OracleFailure(format!("(1 - gamma)^(-1/p) not resolved to 2^-{k}")))
}

/// Upper bound on `sum_{n >= from} 2^-c_n`, from decide-mode bounds on gamma.
fn tail_upper(session: &CeSession<'_>, from: usize, bits: usize) -> Result<Rat> {
    let (_, hi) = session.gamma_bounds(bits)?;
    let mut head = Rat::zero();
    for n in 0..from {
        match session.element(n) {
            Some(c) => head += pow2(-(c as i64)),
            None => return Ok(Rat::zero()),
        }
    }
    let t = hi - head;
    Ok(if t.is_negative() { Rat::zero() } else { t })
}

/// Runs the decide-mode algorithm at precision `k`.
pub fn approx_e0(set: &CeSet, p: &Exponent, k: u32) -> Result<E0Approx> {
    let session = set.session(AccessMode::Decide);
    let kk = k as i64;
    // delta = 2^-k 2^(-1/p)
    let delta = pow_enclosure(&Enclosure::point(rat(1, 2)), &p.power().recip(), k + 8)?.scale(&pow2(-kk));
    let x = inverse_scale(&session, p, k + 8)?;
    let m_int: num_bigint::BigInt = x.hi().floor().to_integer() + 1;
    let m: u64 = (&m_int).try_into().map_err(|_| Error::OracleFailure("bound M out of range".into()))?;
    let m_rat = Rat::from_integer(m_int);
    let q1 = simplest_in(&(x.hi() - delta.lo()), &(x.lo() + delta.lo()));

    // theta^p with theta = delta / (delta + M), as a lower bound; theta^p is
    // about 2^-(kp+1) M^-p, so this many bits leave it clearly positive
    let theta_lo = delta.lo() / (delta.hi() + &m_rat);
    let pc = p.ceil()?;
    let m_bits = 64 - m.leading_zeros();
    let theta_bits = pc * (k + 2 + m_bits) + 8;
    let theta_p_lo = pow_p(&Enclosure::point(theta_lo), p, theta_bits)?.lo().clone();
    if !theta_p_lo.is_positive() {
        return Err(Error::OracleFailure("tail threshold not certified positive".into()));
    }
    let tail_bits = theta_bits as usize + 8;
    let mut n1 = 3usize;
    loop {
        // ||sum_{n >= N} 2^(-c_(n-1)/p) e_n||^p = sum_{n >= N-1} 2^-c_n
        if tail_upper(&session, n1 - 1, tail_bits)? <= theta_p_lo {
            break;
        }
        n1 += 1;
        if n1 > 4096 {
            return Err(Error::OracleFailure("no N_1 found".into()));
        }
    }

    let cs: Vec<Option<usize>> = (0..n1 - 1).map(|n| session.element(n)).collect();
    let counts = session.counts();
    let mut rounding = 0u32;
    let coefficients = exact_coefficients(&q1, &cs, p, k)?;
    if coefficients.is_none() {
        rounding = k + 8 + (64 - (n1 as u64).leading_zeros());
    }
    let residual_k = k + 6;
    for _ in 0..MAX_ROUNDS {
        let coeffs = match &coefficients {
            Some(c) => c.clone(),
            None => rounded_coefficients(&q1, &cs, p, rounding)?,
        };
        let err = expansion_residual(set, p, &FiniteVector::basis(0), &coeffs, residual_k)?;
        if err.certainly_lt(&pow2(-kk)) {
            let exact_error = match (&coefficients, p.rational_fast_path()) {
                (Some(_), Some(r)) if r.is_one() => exact_l1_error(set, &q1, n1),
                _ => None,
            };
            return Ok(E0Approx {
                k,
                n1,
                q1,
                m,
                coefficients: coeffs,
                certified_error: err,
                exact_error,
                rounding_bits: rounding,
                decide_queries: counts.decide_queries,
                enumeration_index: counts.max_index,
            });
        }
        if coefficients.is_some() {
            return Err(Error::OracleFailure(format!("||e_0 - g|| not certified below 2^-{k}")));
        }
        rounding += 8;
    }
    Err(Error::OracleFailure(format!("rounded g not certified within 2^-{k}")))
}

/// The coefficients exactly, when every `2^(-c/p)` is rational at this `p`.
fn exact_coefficients(q1: &Rat, cs: &[Option<usize>], p: &Exponent, k: u32) -> Result<Option<Vec<CRat>>> {
    let mut out = Vec::with_capacity(cs.len() + 1);
    out.push(CRat::real(q1.clone()));
    for c in cs {
        match c {
            Some(c) => {
                let t = twist_weight(*c, p, k + 8)?;
                if !t.is_point() {
                    return Ok(None);
                }
                out.push(CRat::real(-(q1 * t.lo())));
            }
            None => out.push(CRat::zero()),
        }
    }
    Ok(Some(out))
}

fn rounded_coefficients(q1: &Rat, cs: &[Option<usize>], p: &Exponent, bits: u32) -> Result<Vec<CRat>> {
    let mut out = Vec::with_capacity(cs.len() + 1);
    out.push(CRat::real(q1.clone()));
    for c in cs {
        match c {
            Some(c) => {
                let t = twist_weight(*c, p, bits + 4)?;
                out.push(CRat::real(-floor_dyadic(&(q1 * t.mid()), bits)));
            }
            None => out.push(CRat::zero()),
        }
    }
    Ok(out)
}

/// `||e_0 - g||_1 = |1 - q_1 (1 - gamma)| + |q_1| sum_{n >= N_1 - 1} 2^-c_n`.
fn exact_l1_error(set: &CeSet, q1: &Rat, n1: usize) -> Option<Rat> {
    let gamma = set.gamma_exact()?;
    let tail = set.tail_exact(n1 - 1)?;
    Some((Rat::one() - q1 * (Rat::one() - gamma)).abs() + q1.abs() * tail)
}

/// `e_0` as a vector computable over `F` relative to decisions for `C`.
pub fn e0_rep(set: Arc<CeSet>, p: Exponent, presentation: &str) -> VectorRep {
    VectorRep::new(presentation, move |k| Ok(approx_e0(&set, &p, k)?.coefficients))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::int;

    #[test]
    fn odds_p1_k2() {
        let a = approx_e0(&CeSet::odds(), &Exponent::one(), 2).unwrap();
        assert_eq!((a.n1, a.m), (4, 4));
        assert_eq!(a.q1, int(3));
        let expected = [int(3), rat(-3, 2), rat(-3, 8), rat(-3, 32)];
        assert_eq!(a.coefficients, expected.map(CRat::real));
        assert_eq!(a.exact_error, Some(rat(1, 32)));
        assert!(a.certified_error.contains(&rat(1, 32)));
    }

    #[test]
    fn p2_certificate() {
        let a = approx_e0(&CeSet::odds(), &Exponent::two(), 4).unwrap();
        assert!(a.certified_error_bound() < &pow2(-4));
        assert!(a.rounding_bits > 0);
        // q_1 is within delta of sqrt 3
        let d = &a.q1 * &a.q1 - int(3);
        assert!(d.abs() < rat(1, 2));
    }

    #[test]
    fn primes_and_finite_sets() {
        for set in [CeSet::primes(), CeSet::explicit("s", [3, 4, 9].into()).unwrap()] {
            for k in [1, 5] {
                let a = approx_e0(&set, &Exponent::from_ratio(3, 2).unwrap(), k).unwrap();
                assert!(a.certified_error_bound() < &pow2(-(k as i64)));
            }
        }
    }
}
