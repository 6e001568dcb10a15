//! Exact rational and enclosure arithmetic, computable reals, and certified
//! powers and roots.

mod enclosure;
mod power;
mod rat;
mod real;

pub use enclosure::{enc_abs, enc_add, enc_mul, enc_neg, Enclosure};
pub use power::{
    modulus, modulus_pow, nth_root_grid, pow_enclosure, pow_p, pow_point_traced, root_p, Exponent,
    Guard, Power, EXPONENT_CHECK_PRECISION,
};
pub use rat::{ceil_dyadic, ceil_log2, floor_dyadic, int, parse_rat, pow2, rat, simplest_in, CRat, Rat};
pub use real::{cr_refine, ComputablePoint, ComputableReal};
