//! The rotation `T(e_0) = (e_0 + e_1)/sqrt 2`, `T(e_1) = (e_0 - e_1)/sqrt 2`,
//! `T(e_n) = e_n` for `n >= 2`: an isometry of `l^2` whose basis images
//! overlap, and not an isometry of any other `l^p`.

use alloc::string::String;
use alloc::vec::Vec;

use super::{classify, ClassifierVerdict, ImageCandidate};
use crate::error::Result;
use crate::lpspace::FiniteVector;
use crate::rigor::{pow2, pow_enclosure, rat, root_p, CRat, ComputableReal, Enclosure, Exponent};

/// `T(e_0), T(e_1)` truncated at precision `tol`: coordinates within
/// `2^-(tol+3)` of `1/sqrt 2`, so each image is within `2^-(tol+2)` in norm.
pub fn rotation_images(tol: u32) -> Result<Vec<ImageCandidate>> {
    let s = CRat::real(ComputableReal::sqrt_of(rat(1, 2)).approx(tol + 3)?);
    let radius = pow2(-(tol as i64) - 2);
    let a = FiniteVector::from_coords([(0, s.clone()), (1, s.clone())]);
    let b = FiniteVector::from_coords([(0, s.clone()), (1, -s)]);
    Ok(Vec::from([
        ImageCandidate { approx: a, radius: radius.clone() },
        ImageCandidate { approx: b, radius },
    ]))
}

/// `||T v||_p` with width `< 2^-k`, from
/// `||T v||^p = 2^(-p/2) (|v_0 + v_1|^p + |v_0 - v_1|^p) + sum_{n>=2} |v_n|^p`.
pub fn rotated_norm(v: &FiniteVector, p: &Exponent, k: u32) -> Result<Enclosure> {
    let (v0, v1) = (v.get(0), v.get(1));
    let mixed = FiniteVector::from_coords([(0, &v0 + &v1), (1, &v0 - &v1)]);
    let rest = FiniteVector::from_coords(v.iter().filter(|(n, _)| *n >= 2).map(|(n, a)| (n, a.clone())));
    if mixed.is_zero() && rest.is_zero() {
        return Ok(Enclosure::zero());
    }
    let mut w = k + 4;
    loop {
        let h = pow_enclosure(&Enclosure::point(rat(1, 2)), &p.power().half(), w)?;
        let sum = (&(&h * &mixed.norm_pow_p(p, w)?) + &rest.norm_pow_p(p, w)?).clamp_nonneg();
        let norm = root_p(&sum, p, k + 1)?;
        if norm.narrower_than(k) {
            return Ok(norm);
        }
        w += (w / 2).max(8);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSample {
    pub v: FiniteVector,
    pub norm_v: Enclosure,
    pub norm_tv: Enclosure,
    /// The two enclosures intersect.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationReport {
    pub p: String,
    pub k: u32,
    pub samples: Vec<RotationSample>,
    pub preserved: usize,
    /// The first sample whose enclosures are disjoint: a certified
    /// `||T v|| != ||v||`.
    pub counterexample: Option<RotationSample>,
    pub classifier: ClassifierVerdict,
}

/// Compares `||T v||` with `||v||` at width `2^-k` on `e_0` followed by
/// `samples`, and classifies the basis images at precision `tol`.
pub fn rotation_demo(p: &Exponent, samples: &[FiniteVector], k: u32, tol: u32) -> Result<RotationReport> {
    let mut out = Vec::with_capacity(samples.len() + 1);
    for v in core::iter::once(&FiniteVector::basis(0)).chain(samples) {
        let norm_v = v.norm_p(p, k)?;
        let norm_tv = rotated_norm(v, p, k)?;
        let consistent = norm_v.intersects(&norm_tv);
        out.push(RotationSample { v: v.clone(), norm_v, norm_tv, consistent });
    }
    let preserved = out.iter().filter(|s| s.consistent).count();
    let counterexample = out.iter().find(|s| !s.consistent).cloned();
    let classifier = classify(&rotation_images(tol)?, p, tol)?;
    Ok(RotationReport {
        p: p.label(),
        k,
        samples: out,
        preserved,
        counterexample,
        classifier,
    })
}

impl RotationReport {
    /// Whether every sample is norm-consistent.
    pub fn preserves_all(&self) -> bool {
        self.counterexample.is_none() && self.preserved == self.samples.len()
    }
}
