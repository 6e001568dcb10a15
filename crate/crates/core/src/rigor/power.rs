//! Certified `t^e` and `t^(1/p)` for nonnegative rational bases.
//!
//! Two tracks share one interface:
//!
//! * rational exponents `a/b`: `t^a` is exact and the `b`-th root is taken on
//!   the `2^-w` grid with an integer floor root, so results are exact points
//!   whenever the root lands on the grid;
//! * computable-real exponents: the exponent is bracketed by dyadics and
//!   `t^d` is assembled from an iterated square-root chain, refined until the
//!   requested width is met.
//!
//! No floating point is used anywhere.

use alloc::format;
use alloc::string::String;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::enclosure::Enclosure;
use super::rat::{ceil_dyadic, ceil_log2, floor_dyadic, floor_nth_root, pow2, CRat, Rat};
use super::real::ComputableReal;
use crate::error::{Error, Result};

/// Precision used to validate `p >= 1` for exponents given by an oracle.
pub const EXPONENT_CHECK_PRECISION: u32 = 32;

/// Maximum number of refinement rounds for the real-exponent track.
const MAX_REFINEMENTS: u32 = 12;

/// A positive exponent.
#[derive(Clone, Debug)]
pub enum Power {
    Rational(Rat),
    Real(ComputableReal),
}

impl Power {
    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            Power::Rational(r) => Some(r),
            Power::Real(_) => None,
        }
    }

    /// `e / 2`.
    pub fn half(&self) -> Power {
        match self {
            Power::Rational(r) => Power::Rational(r / Rat::from_integer(2.into())),
            Power::Real(x) => {
                let x = x.clone();
                let label = format!("{}/2", x.label());
                Power::Real(ComputableReal::from_fn(label, move |k| {
                    Ok(x.approx(k)? / Rat::from_integer(2.into()))
                }))
            }
        }
    }

    /// `1 / e`. The real track assumes `e > 3/4`, which holds for every
    /// validated [`Exponent`].
    pub fn recip(&self) -> Power {
        match self {
            Power::Rational(r) => Power::Rational(r.recip()),
            Power::Real(x) => {
                let x = x.clone();
                let label = format!("1/{}", x.label());
                // guard of 2 bits: |1/q - 1/p| < (8/3) 2^-(k+2), plus 2^-(k+2) rounding
                Power::Real(ComputableReal::from_fn(label, move |k| {
                    let q = x.approx(k + 2)?;
                    if q < Rat::new(3.into(), 4.into()) {
                        return Err(Error::NonPositiveExponent);
                    }
                    Ok(floor_dyadic(&q.recip(), k + 2))
                }))
            }
        }
    }

    /// Dyadic bounds `lo <= e <= hi` of width at most `2^(2-j)`, and the
    /// number of fractional bits they carry.
    fn dyadic_bounds(&self, j: u32) -> Result<(Rat, Rat, u32)> {
        match self {
            Power::Rational(r) => Ok((r.clone(), r.clone(), 0)),
            Power::Real(x) => {
                let q = x.approx(j)?;
                let eps = pow2(-(j as i64));
                let lo = floor_dyadic(&(&q - &eps), j + 1);
                let hi = ceil_dyadic(&(&q + &eps), j + 1);
                if !lo.is_positive() {
                    return Err(Error::NonPositiveExponent);
                }
                Ok((lo, hi, j + 1))
            }
        }
    }

    fn label(&self) -> String {
        match self {
            Power::Rational(r) => format!("{r}"),
            Power::Real(x) => String::from(x.label()),
        }
    }
}

/// The exponent `p >= 1` of an `l^p` space: an exact rational fast path or a
/// computable real.
#[derive(Clone, Debug)]
pub struct Exponent {
    power: Power,
}

impl Exponent {
    pub fn rational(p: Rat) -> Result<Self> {
        if p < Rat::one() {
            return Err(Error::ExponentBelowOne);
        }
        Ok(Self {
            power: Power::Rational(p),
        })
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        Self::rational(Rat::new(num.into(), den.into()))
    }

    pub fn one() -> Self {
        Self {
            power: Power::Rational(Rat::one()),
        }
    }

    pub fn two() -> Self {
        Self {
            power: Power::Rational(Rat::from_integer(2.into())),
        }
    }

    /// Validates `approx(k) > 1 - 2^-k` at [`EXPONENT_CHECK_PRECISION`]. A
    /// real that carries its exact rational value takes the fast path.
    pub fn computable(p: ComputableReal) -> Result<Self> {
        if let Some(r) = p.exact_value() {
            return Self::rational(r.clone());
        }
        let k = EXPONENT_CHECK_PRECISION;
        if p.approx(k)? <= Rat::one() - pow2(-(k as i64)) {
            return Err(Error::ExponentBelowOne);
        }
        Ok(Self {
            power: Power::Real(p),
        })
    }

    pub fn power(&self) -> &Power {
        &self.power
    }

    pub fn rational_fast_path(&self) -> Option<&Rat> {
        self.power.as_rational()
    }

    /// `Some(true)` only for the exact exponent 2; `None` when undecidable.
    pub fn is_two(&self) -> Option<bool> {
        self.rational_fast_path()
            .map(|r| r == &Rat::from_integer(2.into()))
    }

    pub fn is_one(&self) -> bool {
        self.rational_fast_path().is_some_and(|r| r.is_one())
    }

    /// `[approx(k) - 2^-k, approx(k) + 2^-k]`.
    pub fn refine(&self, k: u32) -> Result<Enclosure> {
        match &self.power {
            Power::Rational(r) => Ok(Enclosure::ball(r, &pow2(-(k as i64)))),
            Power::Real(x) => x.refine(k),
        }
    }

    /// Integer upper bound on `p`, used for precision scheduling.
    pub fn ceil(&self) -> Result<u32> {
        let hi = self.refine(4)?.hi().ceil().to_integer();
        Ok(hi.to_u32().unwrap_or(u32::MAX))
    }

    pub fn label(&self) -> String {
        self.power.label()
    }
}

/// Guard-precision accounting for one adaptive evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    pub requested: u32,
    pub working: u32,
    pub attempts: u32,
}

/// Root of `s >= 0` of integer order `n` on the `2^-w` grid: an exact point
/// when the root is a grid point, otherwise the two neighbouring grid points.
pub fn nth_root_grid(s: &Rat, n: u32, w: u32) -> Enclosure {
    debug_assert!(!s.is_negative());
    if n == 1 {
        return Enclosure::point(s.clone());
    }
    let scale = BigInt::one() << (w as usize * n as usize);
    let scaled = s * Rat::from_integer(scale);
    let (floor, rem) = scaled.numer().div_rem(scaled.denom());
    let r = floor_nth_root(&floor, n);
    let den = BigInt::one() << w as usize;
    if rem.is_zero() && num_traits::pow(r.clone(), n as usize) == floor {
        return Enclosure::point(Rat::new(r, den));
    }
    // r^n <= floor <= s 2^(wn) < floor + 1 <= (r + 1)^n
    Enclosure::new(Rat::new(r.clone(), den.clone()), Rat::new(r + 1, den))
}

fn sqrt_enclosure(x: &Enclosure, w: u32) -> Enclosure {
    let lo = nth_root_grid(x.lo(), 2, w);
    let hi = nth_root_grid(x.hi(), 2, w);
    Enclosure::new(lo.lo().clone(), hi.hi().clone())
}

fn rational_pow_grid(t: &Rat, e: &Rat, w: u32) -> Enclosure {
    let a = e.numer().to_usize().expect("exponent numerator too large");
    let b = e.denom().to_u32().expect("exponent denominator too large");
    let ta = num_traits::pow(t.clone(), a);
    nth_root_grid(&ta, b, w)
}

/// `t^d` for a positive dyadic `d` with `bits` fractional bits, via the
/// chain `t^(2^-i) = sqrt(t^(2^-(i-1)))`.
fn dyadic_chain(t: &Rat, d: &Rat, bits: u32, w: u32) -> Enclosure {
    let whole = d.floor().to_integer();
    let frac = ((d - Rat::from_integer(whole.clone())) * pow2(bits as i64)).to_integer();
    let wide = w + bits + 8;
    let mut acc = Enclosure::point(num_traits::pow(t.clone(), whole.to_usize().unwrap_or(0)));
    let mut root = Enclosure::point(t.clone());
    for i in 1..=bits {
        root = sqrt_enclosure(&root, wide);
        if frac.bit((bits - i) as u64) {
            acc = (&acc * &root).round_out(wide);
        }
    }
    acc
}

/// `t^e` for a single nonnegative base, with width `< 2^-k`.
pub fn pow_point_traced(t: &Rat, e: &Power, k: u32) -> Result<(Enclosure, Guard)> {
    if t.is_negative() {
        return Err(Error::NegativeBase);
    }
    if t.is_zero() || t.is_one() {
        let g = Guard { requested: k, working: k, attempts: 1 };
        return Ok((Enclosure::point(t.clone()), g));
    }
    match e {
        Power::Rational(r) => {
            let w = k + 2;
            let g = Guard { requested: k, working: w, attempts: 1 };
            Ok((rational_pow_grid(t, r, w), g))
        }
        Power::Real(_) => {
            // magnitude of log2 t drives how fast exponent error spreads
            let spread = ceil_log2(t).unsigned_abs().min(1 << 16) as u32;
            let mut guard = 8u32;
            for attempt in 1..=MAX_REFINEMENTS {
                let w = k + guard;
                let j = w + 4 + (32 - spread.leading_zeros());
                let (lo, hi, bits) = e.dyadic_bounds(j)?;
                let a = dyadic_chain(t, &lo, bits, w);
                let b = dyadic_chain(t, &hi, bits, w);
                let enc = a.hull(&b);
                if enc.narrower_than(k) {
                    let g = Guard { requested: k, working: w, attempts: attempt };
                    return Ok((enc, g));
                }
                guard = guard.saturating_mul(2);
            }
            Err(Error::OracleFailure(format!(
                "power of {t} not resolved to 2^-{k} within the refinement budget"
            )))
        }
    }
}

/// `{t^e : t in x}` with at most `2^-k` of added width.
///
/// On the rational track both endpoints are rounded on the same `2^-(k+2)`
/// grid, which makes the result monotone under inclusion of `x`. A point
/// base below 1 with exponent above 1 gets a finer grid, so that the inverse
/// root, steep near 0, does not magnify the width; dyadic grids nest, so
/// monotonicity survives.
pub fn pow_enclosure(x: &Enclosure, e: &Power, k: u32) -> Result<Enclosure> {
    if x.lo().is_negative() {
        return Err(Error::NegativeBase);
    }
    if x.is_point() {
        return Ok(pow_point_traced(x.lo(), e, k + 1 + small_base_bits(x.lo(), e))?.0);
    }
    let lo = pow_point_traced(x.lo(), e, k + 1)?.0;
    let hi = pow_point_traced(x.hi(), e, k + 1)?.0;
    Ok(lo.hull(&hi))
}

// ceil((r - 1) log2(1/t)) + 1 for 0 < t < 1 and a rational r > 1
fn small_base_bits(t: &Rat, e: &Power) -> u32 {
    let r = match e.as_rational() {
        Some(r) if r > &Rat::one() => r,
        _ => return 0,
    };
    if !t.is_positive() || t >= &Rat::one() {
        return 0;
    }
    let l = Rat::from_integer(BigInt::from(-ceil_log2(t) + 1));
    let bits: BigInt = ((r - Rat::one()) * l).ceil().to_integer() + 1;
    bits.to_u32().unwrap_or(u32::MAX).min(1 << 16)
}

/// `{t^p : t in x}`.
pub fn pow_p(x: &Enclosure, p: &Exponent, k: u32) -> Result<Enclosure> {
    pow_enclosure(x, p.power(), k)
}

/// `{t^(1/p) : t in x}`.
pub fn root_p(x: &Enclosure, p: &Exponent, k: u32) -> Result<Enclosure> {
    pow_enclosure(x, &p.power().recip(), k)
}

/// `|z|^p` for a rational point. Points with a rational modulus (all real
/// points) use it directly; the rest raise the exact `|z|^2` to `p/2`.
pub fn modulus_pow(z: &CRat, p: &Exponent, k: u32) -> Result<Enclosure> {
    match z.exact_modulus() {
        Some(m) => pow_p(&Enclosure::point(m), p, k),
        None => pow_enclosure(&Enclosure::point(z.norm_sqr()), &p.power().half(), k),
    }
}

/// Enclosure of `|z|` for a rational point, width `< 2^-k`.
pub fn modulus(z: &CRat, k: u32) -> Enclosure {
    match z.exact_modulus() {
        Some(m) => Enclosure::point(m),
        None => nth_root_grid(&z.norm_sqr(), 2, k + 1),
    }
}
