//! Reals and complex points presented by precision-indexed approximations.

use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use num_traits::{One, Zero};

use super::enclosure::Enclosure;
use super::rat::{floor_nth_root, pow2, CRat, Rat};
use crate::error::Result;

type ApproxFn = dyn Fn(u32) -> Result<Rat> + Send + Sync;

/// A real `x` given by `approx(k) = q` with `|q - x| < 2^-k`.
///
/// The approximation function must be deterministic. Failures (an
/// underlying oracle refusing) propagate as errors.
#[derive(Clone)]
pub struct ComputableReal {
    label: String,
    approx: Arc<ApproxFn>,
    exact: Option<Rat>,
}

impl ComputableReal {
    pub fn from_fn<F>(label: impl Into<String>, approx: F) -> Self
    where
        F: Fn(u32) -> Result<Rat> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            approx: Arc::new(approx),
            exact: None,
        }
    }

    pub fn constant(x: Rat) -> Self {
        let label = alloc::format!("{x}");
        let value = x.clone();
        Self {
            label,
            approx: Arc::new(move |_| Ok(value.clone())),
            exact: Some(x),
        }
    }

    /// `sqrt(x)` for a nonnegative rational, via floor square roots on the
    /// `2^-(k+1)` grid.
    pub fn sqrt_of(x: Rat) -> Self {
        assert!(x >= Rat::zero(), "square root of a negative rational");
        let label = alloc::format!("sqrt({x})");
        Self::from_fn(label, move |k| {
            let bits = k as usize + 1;
            let scaled = &x * Rat::from_integer(num_bigint::BigInt::one() << (2 * bits));
            let r = floor_nth_root(&scaled.floor().to_integer(), 2);
            // r <= 2^bits sqrt(x) < r + 1, so the grid midpoint is within 2^-(bits+1)
            let mid = Rat::from_integer(r) + Rat::new(1.into(), 2.into());
            Ok(mid * pow2(-(bits as i64)))
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn exact_value(&self) -> Option<&Rat> {
        self.exact.as_ref()
    }

    pub fn approx(&self, k: u32) -> Result<Rat> {
        (self.approx)(k)
    }

    /// `[q - 2^-k, q + 2^-k]` around `q = approx(k)`; contains the real.
    pub fn refine(&self, k: u32) -> Result<Enclosure> {
        if let Some(x) = &self.exact {
            return Ok(Enclosure::ball(x, &pow2(-(k as i64))));
        }
        let q = self.approx(k)?;
        Ok(Enclosure::ball(&q, &pow2(-(k as i64))))
    }

    /// Same real with every approximation shifted by `offset`. Used to inject
    /// faults into otherwise honest oracles.
    pub fn perturbed(&self, offset: Rat) -> Self {
        let inner = self.approx.clone();
        Self {
            label: alloc::format!("{}+fault", self.label),
            approx: Arc::new(move |k| Ok(inner(k)? + &offset)),
            exact: None,
        }
    }
}

impl fmt::Debug for ComputableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComputableReal").field("label", &self.label).finish()
    }
}

/// `[approx(k) - 2^-k, approx(k) + 2^-k]`.
pub fn cr_refine(x: &ComputableReal, k: u32) -> Result<Enclosure> {
    x.refine(k)
}

/// A complex point presented by rational approximations within `2^-k`.
#[derive(Clone, Debug)]
pub struct ComputablePoint {
    pub re: ComputableReal,
    pub im: ComputableReal,
}

impl ComputablePoint {
    pub fn exact(z: CRat) -> Self {
        Self {
            re: ComputableReal::constant(z.re),
            im: ComputableReal::constant(z.im),
        }
    }

    pub fn exact_value(&self) -> Option<CRat> {
        Some(CRat::new(self.re.exact_value()?.clone(), self.im.exact_value()?.clone()))
    }

    /// A rational point within `2^-k` of the represented point.
    pub fn approx(&self, k: u32) -> Result<CRat> {
        // each part within 2^-(k+1) keeps the modulus error below 2^-k
        Ok(CRat::new(self.re.approx(k + 1)?, self.im.approx(k + 1)?))
    }
}
