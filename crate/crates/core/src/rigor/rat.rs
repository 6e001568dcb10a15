//! Exact rationals and complex rational points.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational in lowest terms with a positive denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `2^e`, exact for either sign of `e`.
pub fn pow2(e: i64) -> Rat {
    let m = BigInt::one() << (e.unsigned_abs() as usize);
    if e >= 0 {
        Rat::from_integer(m)
    } else {
        Rat::new(BigInt::one(), m)
    }
}

/// Largest multiple of `2^-bits` that is `<= x`.
pub fn floor_dyadic(x: &Rat, bits: u32) -> Rat {
    let scaled = x * Rat::from_integer(BigInt::one() << bits as usize);
    Rat::new(scaled.floor().to_integer(), BigInt::one() << bits as usize)
}

/// Smallest multiple of `2^-bits` that is `>= x`.
pub fn ceil_dyadic(x: &Rat, bits: u32) -> Rat {
    let scaled = x * Rat::from_integer(BigInt::one() << bits as usize);
    Rat::new(scaled.ceil().to_integer(), BigInt::one() << bits as usize)
}

/// Smallest `e` with `|x| <= 2^e`. `x` must be nonzero.
pub fn ceil_log2(x: &Rat) -> i64 {
    let a = x.abs();
    debug_assert!(!a.is_zero());
    // bit lengths give a guess within one of the answer
    let guess = a.numer().bits() as i64 - a.denom().bits() as i64;
    let mut e = guess - 1;
    while a > pow2(e) {
        e += 1;
    }
    while e > guess - 3 && a <= pow2(e - 1) {
        e -= 1;
    }
    e
}

/// The simplest rational (least denominator, then least magnitude) in `[lo, hi]`.
pub fn simplest_in(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo <= hi, "empty interval");
    if !lo.is_positive() && !hi.is_negative() {
        return Rat::zero();
    }
    if hi.is_negative() {
        return -simplest_in(&-hi, &-lo);
    }
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    let fl = lo.floor();
    let inner = simplest_in(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Parses `"3"`, `"-3/2"` or a finite decimal such as `"1.25"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.trim_start().starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            whole.parse().ok()?
        };
        let f: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let magnitude = Rat::from_integer(w.abs()) + Rat::new(f, scale);
        return Some(if negative { -magnitude } else { magnitude });
    }
    s.parse::<BigInt>().ok().map(Rat::from_integer)
}

/// Integer `n`-th root helper: the floor of `x^(1/n)` for `x >= 0`.
pub(crate) fn floor_nth_root(x: &BigInt, n: u32) -> BigInt {
    debug_assert!(!x.is_negative());
    x.nth_root(n)
}

/// A rational point of the complex plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CRat {
    pub re: Rat,
    pub im: Rat,
}

impl CRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rat) -> Self {
        Self { re, im: Rat::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Rat::zero())
    }

    pub fn one() -> Self {
        Self::real(Rat::one())
    }

    pub fn i() -> Self {
        Self::new(Rat::zero(), Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `|z|^2`, exact.
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `|re| + |im|`, a rational upper bound on the modulus.
    pub fn modulus_upper(&self) -> Rat {
        self.re.abs() + self.im.abs()
    }

    /// The exact modulus when it is rational (always so for real points).
    pub fn exact_modulus(&self) -> Option<Rat> {
        if self.im.is_zero() {
            return Some(self.re.abs());
        }
        if self.re.is_zero() {
            return Some(self.im.abs());
        }
        let n2 = self.norm_sqr();
        let rn = floor_nth_root(n2.numer(), 2);
        let rd = floor_nth_root(n2.denom(), 2);
        if &(&rn * &rn) == n2.numer() && &(&rd * &rd) == n2.denom() {
            Some(Rat::new(rn, rd))
        } else {
            None
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.norm_sqr().is_one()
    }

    pub fn scale(&self, a: &Rat) -> Self {
        Self::new(&self.re * a, &self.im * a)
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}{}{}i", self.re, if self.im.is_negative() { "" } else { "+" }, self.im)
        }
    }
}

impl From<Rat> for CRat {
    fn from(re: Rat) -> Self {
        Self::real(re)
    }
}

impl Add for &CRat {
    type Output = CRat;
    fn add(self, o: &CRat) -> CRat {
        CRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &CRat {
    type Output = CRat;
    fn sub(self, o: &CRat) -> CRat {
        CRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &CRat {
    type Output = CRat;
    fn mul(self, o: &CRat) -> CRat {
        CRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for CRat {
            type Output = CRat;
            fn $m(self, o: CRat) -> CRat {
                (&self).$m(&o)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        -&self
    }
}
