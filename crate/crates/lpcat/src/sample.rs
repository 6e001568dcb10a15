//! Seeded sampling. Every random choice in a report comes from a ChaCha
//! stream keyed by the config seed and a per-purpose stream id.

use lpcat_core::genset::Field;
use lpcat_core::isometry::IsometryDescriptor;
use lpcat_core::lpspace::FiniteVector;
use lpcat_core::rigor::{rat, CRat, Rat};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// `n / d` with `|n| <= bound` and `1 <= d <= den_max`.
pub fn rational(rng: &mut ChaCha8Rng, bound: i64, den_max: i64) -> Rat {
    rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=den_max))
}

pub fn scalar(rng: &mut ChaCha8Rng, field: Field) -> CRat {
    let re = rational(rng, 12, 8);
    let im = match field {
        Field::Real => Rat::zero(),
        Field::Complex => rational(rng, 12, 8),
    };
    CRat::new(re, im)
}

pub fn coefficients(rng: &mut ChaCha8Rng, len: usize, field: Field) -> Vec<CRat> {
    (0..len).map(|_| scalar(rng, field)).collect()
}

/// A vector with at most `entries` nonzero coordinates below `support`.
pub fn vector(rng: &mut ChaCha8Rng, support: usize, entries: usize, field: Field) -> FiniteVector {
    let n = rng.gen_range(1..=entries);
    FiniteVector::from_coords((0..n).map(|_| (rng.gen_range(0..support), scalar(rng, field))))
}

const PYTHAGOREAN: [(i64, i64, i64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];

/// A unimodular scalar with exactly rational parts.
pub fn unimodular(rng: &mut ChaCha8Rng, field: Field) -> CRat {
    let sign = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { 1 } else { -1 };
    if field == Field::Real || rng.gen_bool(0.25) {
        return CRat::from_int(sign(rng));
    }
    let (a, b, c) = *PYTHAGOREAN.choose(rng).expect("nonempty");
    let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
    CRat::new(rat(sign(rng) * a, c), rat(sign(rng) * b, c))
}

/// A permutation of `0..r` with `r <= max_range`, unimodular scalars and a
/// tail shift of at most `max_shift`.
pub fn descriptor(rng: &mut ChaCha8Rng, max_range: usize, max_shift: usize, field: Field) -> IsometryDescriptor {
    let r = rng.gen_range(1..=max_range);
    let mut perm: Vec<usize> = (0..r).collect();
    perm.shuffle(rng);
    let shift = rng.gen_range(0..=max_shift);
    let lambdas = (0..r).map(|_| unimodular(rng, field)).collect();
    let tail = unimodular(rng, field);
    IsometryDescriptor::new(perm.into_iter().enumerate().collect(), shift, lambdas, tail)
        .expect("sampled descriptors are valid")
}
