//! Presentations of `l^p`: effective generating sets as norm oracles,
//! vectors computable with respect to a presentation, and ball maps.
//!
//! A generating set `F = {f_0, f_1, ...}` is only ever accessed through
//! `norm_query`, which returns a rational `q` with
//! `q - 2^-k < ||sum a_j f_j|| < q + 2^-k`. Presentations that also have a
//! concrete finite back-end can `realize` combinations as vectors in the
//! standard coordinates; that is what the test harnesses use to certify
//! answers independently.

mod ballmap;
mod check;

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;
use core::sync::atomic::{AtomicU32, AtomicUsize, Ordering};

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::lpspace::FiniteVector;
use crate::rigor::{ceil_log2, pow2, CRat, ComputablePoint, Enclosure, Exponent, Rat};

pub use ballmap::{
    ballmap_from_disjoint_family, rep_from_ballmap, BallMap, BallMapDescriptor, ComposedMap,
    DisjointFamilyMap, FnBallMap, RationalBall, RepFamily, TruncationCheck,
};
pub use check::{check_ballmap, CheckReport, ConvergenceFailure, CorrectnessWitness, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }

    pub fn admits(self, a: &CRat) -> bool {
        self == Field::Complex || a.is_real()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Query accounting shared by every oracle interface. Counters are atomic so
/// presentations stay usable from several threads.
#[derive(Debug, Default)]
pub struct QueryStats {
    queries: AtomicUsize,
    max_precision: AtomicU32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryCounts {
    pub queries: usize,
    pub max_precision: u32,
}

impl QueryStats {
    pub fn record(&self, k: u32) {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.max_precision.fetch_max(k, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> QueryCounts {
        QueryCounts {
            queries: self.queries.load(Ordering::Relaxed),
            max_precision: self.max_precision.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.queries.store(0, Ordering::Relaxed);
        self.max_precision.store(0, Ordering::Relaxed);
    }
}

/// Serializable description of a presentation: its label, field, kind and
/// construction parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GensetDescriptor {
    pub label: String,
    pub field: Field,
    pub kind: String,
    pub params: Vec<(String, String)>,
}

/// An effective generating set.
pub trait GeneratingSet: Send + Sync {
    fn label(&self) -> &str;
    fn field(&self) -> Field;
    fn exponent(&self) -> &Exponent;
    fn stats(&self) -> &QueryStats;
    fn descriptor(&self) -> GensetDescriptor;

    /// Enclosure of `||sum coeffs[j] f_j||` of width `< 2^-k`.
    fn norm_enclosure(&self, coeffs: &[CRat], k: u32) -> Result<Enclosure>;

    /// The combination as a finite vector in standard coordinates, when the
    /// presentation has a concrete finite back-end.
    fn realize(&self, _coeffs: &[CRat]) -> Option<FiniteVector> {
        None
    }

    /// Enclosure of `||v - sum coeffs[j] f_j||` for `v` in standard
    /// coordinates, width `< 2^-k`. `None` without a verification back-end.
    fn residual_norm(&self, v: &FiniteVector, coeffs: &[CRat], k: u32) -> Option<Result<Enclosure>> {
        let w = self.realize(coeffs)?;
        Some(v.sub(&w).norm_p(self.exponent(), k))
    }

    /// The norm oracle: a rational `q` with `|q - ||sum a_j f_j||| < 2^-k`.
    fn norm_query(&self, coeffs: &[CRat], k: u32) -> Result<Rat> {
        check_field(self.field(), coeffs)?;
        self.stats().record(k);
        // midpoint of a width < 2^-k enclosure is within 2^-(k+1)
        Ok(self.norm_enclosure(coeffs, k)?.mid())
    }
}

pub fn check_field(field: Field, coeffs: &[CRat]) -> Result<()> {
    if coeffs.iter().all(|a| field.admits(a)) {
        Ok(())
    } else {
        Err(Error::FieldMismatch)
    }
}

/// The standard generating set `E = {e_0, e_1, ...}`.
#[derive(Debug)]
pub struct StandardGenSet {
    p: Exponent,
    field: Field,
    stats: QueryStats,
}

pub fn standard_genset(p: Exponent, field: Field) -> StandardGenSet {
    StandardGenSet {
        p,
        field,
        stats: QueryStats::default(),
    }
}

impl GeneratingSet for StandardGenSet {
    fn label(&self) -> &str {
        "E"
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
            label: "E".into(),
            field: self.field,
            kind: "standard".into(),
            params: vec![("p".into(), self.p.label())],
        }
    }

    fn norm_enclosure(&self, coeffs: &[CRat], k: u32) -> Result<Enclosure> {
        FiniteVector::from_dense(coeffs).norm_p(&self.p, k)
    }

    fn realize(&self, coeffs: &[CRat]) -> Option<FiniteVector> {
        Some(FiniteVector::from_dense(coeffs))
    }
}

/// `F_zeta = {zeta e_0, zeta e_1, ...}` for a unimodular `zeta`.
///
/// The norm oracle never looks at `zeta`, so the set is effective even when
/// `zeta` is only available as an approximation oracle. Realization needs an
/// exact `zeta`.
#[derive(Debug)]
pub struct ScaledGenSet {
    label: String,
    zeta: ComputablePoint,
    p: Exponent,
    field: Field,
    stats: QueryStats,
}

pub fn scaled_genset(zeta: ComputablePoint, p: Exponent, field: Field) -> Result<ScaledGenSet> {
    match zeta.exact_value() {
        Some(z) if !z.is_unimodular() => return Err(Error::NotUnimodular { index: 0 }),
        Some(z) if field == Field::Real && !z.is_real() => return Err(Error::FieldMismatch),
        Some(_) => {}
        None => {
            // |zeta_k|^2 is within 2^-k (2 + 2^-k) of 1
            let k = 32;
            let z = zeta.approx(k)?;
            if (z.norm_sqr() - Rat::one()).abs() >= pow2(2 - k as i64) {
                return Err(Error::NotUnimodular { index: 0 });
            }
        }
    }
    let label = match zeta.exact_value() {
        Some(z) => format!("F_zeta({z})"),
        None => format!("F_zeta({}, {})", zeta.re.label(), zeta.im.label()),
    };
    Ok(ScaledGenSet {
        label,
        zeta,
        p,
        field,
        stats: QueryStats::default(),
    })
}

impl ScaledGenSet {
    pub fn zeta(&self) -> &ComputablePoint {
        &self.zeta
    }
}

impl GeneratingSet for ScaledGenSet {
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
        let zeta = match self.zeta.exact_value() {
            Some(z) => z.to_string(),
            None => "oracle".into(),
        };
        GensetDescriptor {
            label: self.label.clone(),
            field: self.field,
            kind: "scaled".into(),
            params: vec![("p".into(), self.p.label()), ("zeta".into(), zeta)],
        }
    }

    fn norm_enclosure(&self, coeffs: &[CRat], k: u32) -> Result<Enclosure> {
        // ||sum a_j zeta e_j|| = |zeta| ||sum a_j e_j|| and |zeta| = 1
        FiniteVector::from_dense(coeffs).norm_p(&self.p, k)
    }

    fn realize(&self, coeffs: &[CRat]) -> Option<FiniteVector> {
        let z = self.zeta.exact_value()?;
        Some(FiniteVector::from_dense(coeffs).scale(&z))
    }
}

/// A presentation by an explicit family of finitely supported vectors.
pub struct FamilyGenSet {
    label: String,
    family: Arc<dyn Fn(usize) -> FiniteVector + Send + Sync>,
    p: Exponent,
    field: Field,
    stats: QueryStats,
}

pub fn family_genset<F>(label: impl Into<String>, family: F, p: Exponent, field: Field) -> FamilyGenSet
where
    F: Fn(usize) -> FiniteVector + Send + Sync + 'static,
{
    FamilyGenSet {
        label: label.into(),
        family: Arc::new(family),
        p,
        field,
        stats: QueryStats::default(),
    }
}

impl GeneratingSet for FamilyGenSet {
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
            kind: "family".into(),
            params: vec![("p".into(), self.p.label())],
        }
    }

    fn norm_enclosure(&self, coeffs: &[CRat], k: u32) -> Result<Enclosure> {
        let v = self.realize(coeffs).unwrap_or_default();
        v.norm_p(&self.p, k)
    }

    fn realize(&self, coeffs: &[CRat]) -> Option<FiniteVector> {
        let mut out = FiniteVector::zero();
        for (j, a) in coeffs.iter().enumerate() {
            if !a.is_zero() {
                out = out.add(&(self.family)(j).scale(a));
            }
        }
        Some(out)
    }
}

type RepFn = dyn Fn(u32) -> Result<Vec<CRat>> + Send + Sync;

/// A vector `g` computable with respect to a presentation: `approx(k)`
/// returns coefficients with `||g - sum a_j f_j|| < 2^-k`.
#[derive(Clone)]
pub struct VectorRep {
    presentation: String,
    approx: Arc<RepFn>,
    stats: Arc<QueryStats>,
}

impl VectorRep {
    pub fn new<F>(presentation: impl Into<String>, approx: F) -> Self
    where
        F: Fn(u32) -> Result<Vec<CRat>> + Send + Sync + 'static,
    {
        Self {
            presentation: presentation.into(),
            approx: Arc::new(approx),
            stats: Arc::new(QueryStats::default()),
        }
    }

    /// The combination `coeffs` itself, exact at every precision.
    pub fn exact(presentation: impl Into<String>, coeffs: Vec<CRat>) -> Self {
        Self::new(presentation, move |_| Ok(coeffs.clone()))
    }

    /// `f_n` of the presentation.
    pub fn generator(presentation: impl Into<String>, n: usize) -> Self {
        let mut coeffs = vec![CRat::zero(); n + 1];
        coeffs[n] = CRat::one();
        Self::exact(presentation, coeffs)
    }

    pub fn presentation(&self) -> &str {
        &self.presentation
    }

    pub fn stats(&self) -> &QueryStats {
        &self.stats
    }

    /// Coefficients within `2^-k`; every call is logged.
    pub fn eval(&self, k: u32) -> Result<Vec<CRat>> {
        self.stats.record(k);
        (self.approx)(k)
    }

    /// `lambda g`, asking the inner oracle for enough extra bits to absorb
    /// `|lambda|`.
    pub fn scaled(&self, lambda: CRat) -> VectorRep {
        let inner = self.clone();
        let extra = if lambda.is_zero() {
            0
        } else {
            ceil_log2(&lambda.modulus_upper()).max(0) as u32
        };
        VectorRep::new(self.presentation.clone(), move |k| {
            Ok(inner.eval(k + extra)?.iter().map(|a| &lambda * a).collect())
        })
    }

    /// Shifts the coefficient on `f_0` by `offset` at every precision. An
    /// oracle that silently lies; used for fault injection.
    pub fn perturbed(&self, offset: Rat) -> VectorRep {
        let inner = self.clone();
        VectorRep::new(self.presentation.clone(), move |k| {
            let mut c = inner.eval(k)?;
            if c.is_empty() {
                c.push(CRat::zero());
            }
            c[0].re += &offset;
            Ok(c)
        })
    }
}

impl fmt::Debug for VectorRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorRep")
            .field("presentation", &self.presentation)
            .field("stats", &self.stats.snapshot())
            .finish()
    }
}

pub fn eval_rep(rep: &VectorRep, k: u32) -> Result<Vec<CRat>> {
    rep.eval(k)
}

/// Coefficient-wise `sum scalars[j] * lists[j]`.
pub(crate) fn combine_coeffs(terms: &[(CRat, Vec<CRat>)]) -> Vec<CRat> {
    let len = terms.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    let mut out = vec![CRat::zero(); len];
    for (a, coeffs) in terms {
        for (slot, c) in out.iter_mut().zip(coeffs) {
            *slot = &*slot + &(a * c);
        }
    }
    while out.last().is_some_and(CRat::is_zero) {
        out.pop();
    }
    out
}
