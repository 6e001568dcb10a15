//! Closed intervals with exact rational endpoints.
//!
//! Endpoints are exact, so every operation here is the exact interval image
//! of its inputs; no outward slack is ever added.

use core::cmp::{max, min};
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::rat::{ceil_dyadic, floor_dyadic, pow2, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Rat,
    hi: Rat,
}

impl Enclosure {
    /// Panics when `lo > hi`.
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order: [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn try_new(lo: Rat, hi: Rat) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn point(x: Rat) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    /// `[center - radius, center + radius]`.
    pub fn ball(center: &Rat, radius: &Rat) -> Self {
        Self::new(center - radius, center + radius)
    }

    pub fn zero() -> Self {
        Self::point(Rat::zero())
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn into_bounds(self) -> (Rat, Rat) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// `width < 2^-k`.
    pub fn narrower_than(&self, k: u32) -> bool {
        self.width() < pow2(-(k as i64))
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: min(&self.lo, &other.lo).clone(),
            hi: max(&self.hi, &other.hi).clone(),
        }
    }

    pub fn intersection(&self, other: &Enclosure) -> Option<Enclosure> {
        Enclosure::try_new(max(&self.lo, &other.lo).clone(), min(&self.hi, &other.hi).clone())
    }

    /// Certified strictly below / above a threshold.
    pub fn certainly_lt(&self, x: &Rat) -> bool {
        &self.hi < x
    }

    pub fn certainly_gt(&self, x: &Rat) -> bool {
        &self.lo > x
    }

    pub fn abs(&self) -> Enclosure {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            Enclosure {
                lo: Rat::zero(),
                hi: max(-&self.lo, self.hi.clone()),
            }
        }
    }

    /// Exact image of `t -> t^2`, tighter than `self * self` across zero.
    pub fn square(&self) -> Enclosure {
        let a = self.abs();
        Enclosure {
            lo: &a.lo * &a.lo,
            hi: &a.hi * &a.hi,
        }
    }

    pub fn scale(&self, a: &Rat) -> Enclosure {
        let (x, y) = (&self.lo * a, &self.hi * a);
        if a.is_negative() {
            Enclosure { lo: y, hi: x }
        } else {
            Enclosure { lo: x, hi: y }
        }
    }

    /// Image of `t -> 1/t`; `None` when the interval meets zero.
    pub fn recip(&self) -> Option<Enclosure> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Some(Enclosure {
                lo: self.hi.recip(),
                hi: self.lo.recip(),
            })
        } else {
            None
        }
    }

    /// Intersection with `[0, +inf)`, used when the exact value is known to
    /// be nonnegative. Returns `[0, 0]` if the enclosure lies wholly below 0.
    pub fn clamp_nonneg(&self) -> Enclosure {
        Enclosure {
            lo: max(self.lo.clone(), Rat::zero()),
            hi: max(self.hi.clone(), Rat::zero()),
        }
    }

    /// Rounds endpoints outward to the `2^-bits` grid to bound their size.
    pub fn round_out(&self, bits: u32) -> Enclosure {
        Enclosure {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl From<Rat> for Enclosure {
    fn from(x: Rat) -> Self {
        Enclosure::point(x)
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, o: &Enclosure) -> Enclosure {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().cloned().unwrap_or_default();
        let hi = c.iter().max().cloned().unwrap_or_default();
        Enclosure { lo, hi }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        -&self
    }
}

impl Add for Enclosure {
    type Output = Enclosure;
    fn add(self, o: Enclosure) -> Enclosure {
        &self + &o
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;
    fn sub(self, o: Enclosure) -> Enclosure {
        &self - &o
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;
    fn mul(self, o: Enclosure) -> Enclosure {
        &self * &o
    }
}

pub fn enc_add(a: &Enclosure, b: &Enclosure) -> Enclosure {
    a + b
}

pub fn enc_mul(a: &Enclosure, b: &Enclosure) -> Enclosure {
    a * b
}

pub fn enc_neg(a: &Enclosure) -> Enclosure {
    -a
}

pub fn enc_abs(a: &Enclosure) -> Enclosure {
    a.abs()
}
