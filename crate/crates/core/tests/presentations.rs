use std::sync::Arc;

use lpcat_core::construction::{expansion_residual, twisted_genset, twisted_norm_enclosure, AccessMode, CeSet};
use lpcat_core::genset::{family_genset, scaled_genset, standard_genset, Field, GeneratingSet};
use lpcat_core::lpspace::{combine, disjoint, FiniteVector};
use lpcat_core::rigor::{pow2, rat, CRat, ComputablePoint, Enclosure, Exponent, Rat};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        Just(Exponent::one()),
        Just(Exponent::from_ratio(3, 2).unwrap()),
        Just(Exponent::two()),
        Just(Exponent::from_ratio(3, 1).unwrap()),
    ]
}

fn coeff(complex: bool) -> impl Strategy<Value = CRat> {
    let part = (-30i64..=30, 1i64..=12).prop_map(|(n, d)| rat(n, d));
    (part.clone(), part).prop_map(move |(re, im)| CRat::new(re, if complex { im } else { Rat::zero() }))
}

fn coeffs(complex: bool, max: usize) -> impl Strategy<Value = Vec<CRat>> {
    prop::collection::vec(coeff(complex), 1..=max)
}

fn vector() -> impl Strategy<Value = FiniteVector> {
    prop::collection::vec((0usize..12, coeff(true)), 0..6).prop_map(FiniteVector::from_coords)
}

fn near(q: &Rat, e: &Enclosure, k: u32) -> bool {
    let slack = pow2(-(k as i64));
    &(e.lo() - &slack) < q && q < &(e.hi() + &slack)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn norm_axioms(u in vector(), v in vector(), a in coeff(true), p in exponent()) {
        let k = 40;
        let nu = u.norm_p(&p, k).unwrap();
        let nv = v.norm_p(&p, k).unwrap();
        let nuv = u.add(&v).norm_p(&p, k).unwrap();
        for n in [&nu, &nv, &nuv] {
            prop_assert!(n.narrower_than(k));
        }
        prop_assert!(nuv.lo() <= &(nu.hi() + nv.hi()), "triangle: {nuv} vs {nu} + {nv}");
        prop_assert_eq!(u.is_zero(), nu.hi().is_zero());
        if !u.is_zero() {
            prop_assert!(nu.lo() > &Rat::zero());
        }
        // |a| ||u|| against ||a u||, with |a| enclosed through a real exponent-1 norm
        let ma = FiniteVector::basis(0).scale(&a).norm_p(&Exponent::one(), k).unwrap();
        let nau = u.scale(&a).norm_p(&p, k).unwrap();
        prop_assert!(nau.intersects(&(&ma * &nu)), "homogeneity: {nau} vs {ma} * {nu}");
    }

    #[test]
    fn disjoint_norms_add(u in vector(), v in vector(), p in exponent()) {
        let shifted = FiniteVector::from_coords(v.iter().map(|(n, a)| (n + 12, a.clone())));
        prop_assert!(disjoint(&u, &shifted));
        let k = 40;
        let lhs = u.add(&shifted).norm_pow_p(&p, k).unwrap();
        let rhs = &u.norm_pow_p(&p, k).unwrap() + &shifted.norm_pow_p(&p, k).unwrap();
        prop_assert!(lhs.intersects(&rhs), "{lhs} vs {rhs}");
    }

    #[test]
    fn l2_norm_matches_exact_square(u in vector()) {
        let s: Rat = u.iter().map(|(_, a)| a.norm_sqr()).sum();
        let n = u.norm_p(&Exponent::two(), 40).unwrap();
        prop_assert!(n.lo() * n.lo() <= s && s <= n.hi() * n.hi());
    }
}

fn shipped(p: &Exponent, which: usize) -> (Arc<dyn GeneratingSet>, bool) {
    match which {
        0 => (Arc::new(standard_genset(p.clone(), Field::Complex)), true),
        1 => (Arc::new(standard_genset(p.clone(), Field::Real)), false),
        2 => {
            let z = CRat::new(rat(3, 5), rat(-4, 5));
            (Arc::new(scaled_genset(ComputablePoint::exact(z), p.clone(), Field::Complex).unwrap()), true)
        }
        3 => {
            // f_n = e_(2n) - e_(2n+1)/2
            let fam = |n: usize| {
                FiniteVector::from_coords([(2 * n, CRat::one()), (2 * n + 1, CRat::real(rat(-1, 2)))])
            };
            (Arc::new(family_genset("pairs", fam, p.clone(), Field::Real)), false)
        }
        4 => (Arc::new(twisted_genset(Arc::new(CeSet::odds()), p.clone(), Field::Real)), false),
        _ => (Arc::new(twisted_genset(Arc::new(CeSet::primes()), p.clone(), Field::Complex)), true),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_200))]

    #[test]
    fn norm_queries_are_coherent(
        which in 0usize..6,
        p in exponent(),
        raw in coeffs(true, 5),
        k in 1u32..=24,
        j in 1u32..=24,
    ) {
        let (g, complex) = shipped(&p, which);
        let alphas: Vec<CRat> = if complex { raw } else { raw.into_iter().map(|a| CRat::real(a.re)).collect() };
        let qk = g.norm_query(&alphas, k).unwrap();
        let qj = g.norm_query(&alphas, j).unwrap();
        prop_assert!((&qk - &qj).abs() < pow2(-(k as i64)) + pow2(-(j as i64)));
        prop_assert!(qk >= -pow2(-(k as i64)));
        // an independent back-end: realization or coordinate expansion
        let reference = g.residual_norm(&FiniteVector::zero(), &alphas, k + 2).unwrap().unwrap();
        prop_assert!(near(&qk, &reference, k), "{} query {qk} vs {reference}", g.label());
    }

    #[test]
    fn twisted_identity_matches_expansion(
        odds in any::<bool>(),
        p in exponent(),
        raw in coeffs(false, 6),
        k in 1u32..=20,
    ) {
        let set = if odds { CeSet::odds() } else { CeSet::primes() };
        let alphas: Vec<CRat> = raw;
        let session = set.session(AccessMode::EnumerateOnly);
        let id = twisted_norm_enclosure(&session, &alphas, &p, k).unwrap();
        prop_assert!(id.narrower_than(k));
        if let Some(top) = session.counts().max_index {
            prop_assert!(top + 1 < alphas.len().max(1));
        }
        let ex = expansion_residual(&set, &p, &FiniteVector::zero(), &alphas, k).unwrap();
        prop_assert!(id.intersects(&ex), "identity {id} vs expansion {ex}");
    }
}

#[test]
fn realized_combinations_match_vectors() {
    let p = Exponent::from_ratio(3, 2).unwrap();
    let (g, _) = shipped(&p, 3);
    let alphas = [CRat::from_int(2), CRat::zero(), CRat::real(rat(-1, 3))];
    let v = g.realize(&alphas).unwrap();
    let fam: Vec<FiniteVector> = (0..3)
        .map(|n| FiniteVector::from_coords([(2 * n, CRat::one()), (2 * n + 1, CRat::real(rat(-1, 2)))]))
        .collect();
    assert_eq!(v, combine(&alphas, &fam));
}
