//! Rational balls and ball maps, the model of computable operators.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_traits::{Signed, Zero};

use super::{combine_coeffs, GeneratingSet, VectorRep};
use crate::error::{Error, Result};
use crate::isometry::{classify, ImageCandidate, Verdict, WitnessKind};
use crate::rigor::{ceil_log2, pow2, CRat, Rat};

/// `B(sum center[j] f_j; radius)` over the presentation named by
/// `presentation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalBall {
    pub center: Vec<CRat>,
    pub radius: Rat,
    pub presentation: String,
}

impl RationalBall {
    /// Panics unless `radius > 0`.
    pub fn new(center: Vec<CRat>, radius: Rat, presentation: impl Into<String>) -> Self {
        assert!(radius.is_positive(), "ball radius must be positive");
        Self {
            center,
            radius,
            presentation: presentation.into(),
        }
    }

    pub fn try_new(center: Vec<CRat>, radius: Rat, presentation: impl Into<String>) -> Option<Self> {
        radius.is_positive().then(|| Self::new(center, radius, presentation))
    }
}

impl fmt::Display for RationalBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B([")?;
        for (i, a) in self.center.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "] over {}; {})", self.presentation, self.radius)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallMapDescriptor {
    pub kind: String,
    pub source: String,
    pub target: String,
    pub params: Vec<(String, String)>,
}

/// A ball-to-ball transformer. `Ok(None)` stands for "does not halt": the
/// map produced nothing within the `fuel` budget (maximum oracle precision).
pub trait BallMap: Send + Sync {
    fn source(&self) -> &str;
    fn target(&self) -> &str;
    fn descriptor(&self) -> BallMapDescriptor;
    fn apply(&self, ball: &RationalBall, fuel: u32) -> Result<Option<RationalBall>>;
}

fn expect_presentation(ball: &RationalBall, expected: &str) -> Result<()> {
    if ball.presentation == expected {
        Ok(())
    } else {
        Err(Error::PresentationMismatch {
            expected: expected.into(),
            found: ball.presentation.clone(),
        })
    }
}

/// `n -> g_n` as vectors computable with respect to the target presentation.
pub type RepFamily = Arc<dyn Fn(usize) -> VectorRep + Send + Sync>;

/// Which basis images to certify when a map is built from a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncationCheck {
    pub count: usize,
    pub tol: u32,
}

/// The map induced by `T(e_n) = g_n` for disjointly supported unit vectors
/// `g_n`: on `B(sum a_j e_j; r)` it finds `b` with
/// `||sum a_j g_j - sum b_j f_j|| < r` and answers `B(sum b_j f_j; 2r)`.
pub struct DisjointFamilyMap {
    kind: String,
    source: String,
    target: Arc<dyn GeneratingSet>,
    family: RepFamily,
    params: Vec<(String, String)>,
}

impl DisjointFamilyMap {
    pub fn with_params(mut self, kind: impl Into<String>, params: Vec<(String, String)>) -> Self {
        self.kind = kind.into();
        self.params = params;
        self
    }

    pub fn family(&self) -> &RepFamily {
        &self.family
    }

    pub fn target_presentation(&self) -> &Arc<dyn GeneratingSet> {
        &self.target
    }

    /// Precision at which each `g_j` must be evaluated: the least `k` with
    /// `2^-k sum |a_j| < r`.
    fn precision_for(center: &[CRat], radius: &Rat) -> u32 {
        let total: Rat = center.iter().map(CRat::modulus_upper).sum();
        if total.is_zero() {
            return 0;
        }
        (ceil_log2(&(total / radius)) + 1).max(0) as u32
    }
}

impl BallMap for DisjointFamilyMap {
    fn source(&self) -> &str {
        &self.source
    }

    fn target(&self) -> &str {
        self.target.label()
    }

    fn descriptor(&self) -> BallMapDescriptor {
        BallMapDescriptor {
            kind: self.kind.clone(),
            source: self.source.clone(),
            target: self.target.label().to_string(),
            params: self.params.clone(),
        }
    }

    fn apply(&self, ball: &RationalBall, fuel: u32) -> Result<Option<RationalBall>> {
        expect_presentation(ball, &self.source)?;
        let k = Self::precision_for(&ball.center, &ball.radius);
        if k > fuel {
            return Ok(None);
        }
        let mut terms = Vec::new();
        for (j, a) in ball.center.iter().enumerate() {
            if !a.is_zero() {
                terms.push((a.clone(), (self.family)(j).eval(k)?));
            }
        }
        let center = combine_coeffs(&terms);
        let radius = &ball.radius * Rat::from_integer(2.into());
        Ok(Some(RationalBall::new(center, radius, self.target.label())))
    }
}

/// Builds the ball map of `T(e_n) = g_n`. With a [`TruncationCheck`], the
/// first `count` images are evaluated at precision `tol` and classified; a
/// certified failure of unit norm or disjointness is an error. Images whose
/// presentation has no finite back-end are taken as caller-certified.
pub fn ballmap_from_disjoint_family(
    family: RepFamily,
    source: impl Into<String>,
    target: Arc<dyn GeneratingSet>,
    check: Option<TruncationCheck>,
) -> Result<DisjointFamilyMap> {
    if let Some(TruncationCheck { count, tol }) = check {
        let mut images = Vec::with_capacity(count);
        for n in 0..count {
            match ImageCandidate::from_rep(&family(n), target.as_ref(), tol) {
                Some(img) => images.push(img?),
                None => {
                    images.clear();
                    break;
                }
            }
        }
        let verdict = classify(&images, target.exponent(), tol)?;
        if verdict.verdict == Verdict::Violates {
            if let Some(w) = verdict.witnesses.first() {
                return Err(match &w.kind {
                    WitnessKind::Norm { index, .. } => Error::NotUnitVector { index: *index },
                    WitnessKind::Overlap { first, second, coordinate, .. } => Error::SupportsOverlap {
                        first: *first,
                        second: *second,
                        coordinate: *coordinate,
                    },
                });
            }
        }
    }
    Ok(DisjointFamilyMap {
        kind: "disjoint-family".into(),
        source: source.into(),
        target,
        family,
        params: Vec::new(),
    })
}

/// `second` after `first`.
pub struct ComposedMap {
    first: Arc<dyn BallMap>,
    second: Arc<dyn BallMap>,
}

impl ComposedMap {
    pub fn new(first: Arc<dyn BallMap>, second: Arc<dyn BallMap>) -> Result<Self> {
        if first.target() != second.source() {
            return Err(Error::PresentationMismatch {
                expected: second.source().into(),
                found: first.target().into(),
            });
        }
        Ok(Self { first, second })
    }
}

impl BallMap for ComposedMap {
    fn source(&self) -> &str {
        self.first.source()
    }

    fn target(&self) -> &str {
        self.second.target()
    }

    fn descriptor(&self) -> BallMapDescriptor {
        let a = self.first.descriptor();
        let b = self.second.descriptor();
        BallMapDescriptor {
            kind: "composition".into(),
            source: a.source.clone(),
            target: b.target.clone(),
            params: vec![("first".into(), a.kind), ("second".into(), b.kind)],
        }
    }

    fn apply(&self, ball: &RationalBall, fuel: u32) -> Result<Option<RationalBall>> {
        match self.first.apply(ball, fuel)? {
            Some(mid) => self.second.apply(&mid, fuel),
            None => Ok(None),
        }
    }
}

type BallFn = dyn Fn(&RationalBall, u32) -> Result<Option<RationalBall>> + Send + Sync;

/// A ball map given by a closure.
pub struct FnBallMap {
    kind: String,
    source: String,
    target: String,
    f: Arc<BallFn>,
}

impl FnBallMap {
    pub fn new<F>(kind: impl Into<String>, source: impl Into<String>, target: impl Into<String>, f: F) -> Self
    where
        F: Fn(&RationalBall, u32) -> Result<Option<RationalBall>> + Send + Sync + 'static,
    {
        Self {
            kind: kind.into(),
            source: source.into(),
            target: target.into(),
            f: Arc::new(f),
        }
    }
}

impl BallMap for FnBallMap {
    fn source(&self) -> &str {
        &self.source
    }

    fn target(&self) -> &str {
        &self.target
    }

    fn descriptor(&self) -> BallMapDescriptor {
        BallMapDescriptor {
            kind: self.kind.clone(),
            source: self.source.clone(),
            target: self.target.clone(),
            params: Vec::new(),
        }
    }

    fn apply(&self, ball: &RationalBall, fuel: u32) -> Result<Option<RationalBall>> {
        expect_presentation(ball, &self.source)?;
        (self.f)(ball, fuel)
    }
}

/// Reads off a representation of `T(sum center[j] e_j)` from a ball map by
/// shrinking the input radius until the output radius is at most `2^-k`.
pub fn rep_from_ballmap(map: Arc<dyn BallMap>, center: Vec<CRat>, fuel: u32) -> VectorRep {
    let target = map.target().to_string();
    let source = map.source().to_string();
    VectorRep::new(target, move |k| {
        let goal = pow2(-(k as i64));
        for j in 1..=fuel.max(k + 2) {
            let ball = RationalBall::new(center.clone(), pow2(-(j as i64)), source.clone());
            if let Some(out) = map.apply(&ball, fuel)? {
                if out.radius <= goal {
                    return Ok(out.center);
                }
            }
        }
        Err(Error::OracleFailure(format!(
            "ball map did not reach radius 2^-{k} within fuel {fuel}"
        )))
    })
}
