use std::collections::BTreeMap;
use std::sync::Arc;

use lpcat_core::construction::{
    approx_e0, e0_rep, gamma_approx, recover_bits, AccessMode, CeSet,
};
use lpcat_core::genset::{check_ballmap, standard_genset, BallMap, ComposedMap, Field, Schedule};
use lpcat_core::isometry::{classify, descriptor_to_ballmap, ImageCandidate, IsometryDescriptor, Verdict, WitnessKind};
use lpcat_core::lpspace::FiniteVector;
use lpcat_core::rigor::{int, pow2, rat, CRat, Exponent, Rat};
use num_traits::{One, Signed};
use proptest::prelude::*;

fn shipped_sets() -> Vec<CeSet> {
    let delays: BTreeMap<usize, usize> = [(5, 3), (9, 7)].into();
    Vec::from([
        CeSet::odds(),
        CeSet::primes(),
        CeSet::explicit("sparse", [2, 5, 11, 12].into()).unwrap(),
        CeSet::throttled("slow", [1, 4, 6, 10].into(), delays).unwrap(),
        CeSet::block_reversed(4).unwrap(),
    ])
}

fn exponents() -> [Exponent; 3] {
    [Exponent::one(), Exponent::from_ratio(3, 2).unwrap(), Exponent::two()]
}

#[test]
fn e0_certificates_hold_up_to_precision_16() {
    for set in shipped_sets() {
        for p in exponents() {
            for k in [1, 2, 5, 9, 13, 16] {
                let a = approx_e0(&set, &p, k).unwrap();
                assert!(a.certified_error_bound() < &pow2(-(k as i64)), "{} p={} k={k}", set.label(), p.label());
                assert!(a.n1 >= 3 && a.coefficients.len() == a.n1);
                assert_eq!(a.coefficients[0], CRat::real(a.q1.clone()));
                if let Some(e) = &a.exact_error {
                    assert!(a.certified_error.contains(e));
                }
            }
        }
    }
}

#[test]
fn l1_error_of_e0_for_the_odds() {
    let odds = CeSet::odds();
    let mut last = Rat::one();
    for k in 1..=12 {
        let a = approx_e0(&odds, &Exponent::one(), k).unwrap();
        let e = a.exact_error.clone().expect("closed form at p = 1");
        assert!(e < pow2(-(k as i64)));
        assert!(e <= last, "k = {k}");
        last = e;
        // every coefficient past the first is -q_1 2^-c for the odd c
        for (n, c) in a.coefficients.iter().enumerate().skip(1) {
            assert_eq!(c, &CRat::real(-(&a.q1 * pow2(-(2 * n as i64 - 1)))));
        }
    }
}

#[test]
fn stage_sums_reach_within_twice_the_tolerance() {
    for set in shipped_sets() {
        let truth = match set.gamma_exact() {
            Some(g) => g,
            None => set.session(AccessMode::Decide).gamma_bounds(80).unwrap().1,
        };
        let session = set.session(AccessMode::EnumerateOnly);
        for m in 1..=24i64 {
            let q = gamma_approx(&set, m as u32);
            assert!((&q - &truth).abs() < pow2(-m) + pow2(-78));
            let mut prev = Rat::from_integer(0.into());
            let mut s = 0;
            loop {
                let g = session.gamma_stage(s);
                assert!(g >= prev);
                prev = g.clone();
                if g > &q - pow2(-m) {
                    assert!(&truth - &g < pow2(1 - m) + pow2(-78), "{} m={m}", set.label());
                    break;
                }
                s += 1;
                assert!(s < 10_000);
            }
        }
    }
}

#[test]
fn bits_are_recovered_and_faults_flagged() {
    for set in shipped_sets() {
        let p = Exponent::one();
        let shared = Arc::new(set.clone());
        let rep = e0_rep(shared.clone(), p.clone(), "F");
        let r = recover_bits(&rep, &set, &p, 14, 400).unwrap();
        assert_eq!(r.agreement, 15, "{}: {:?}", set.label(), r.failures);
        assert!(!r.flagged);
        for offset in [rat(1, 4), rat(-1, 2), int(1)] {
            let bad = rep.perturbed(offset.clone());
            let r = recover_bits(&bad, &set, &p, 14, 400).unwrap();
            assert!(r.flagged, "{} offset {offset}", set.label());
        }
    }
}

fn unimodular(complex: bool) -> impl Strategy<Value = CRat> {
    let mut all = Vec::from([CRat::one(), -CRat::one()]);
    if complex {
        all.extend([CRat::i(), -CRat::i(), CRat::new(rat(3, 5), rat(4, 5)), CRat::new(rat(-5, 13), rat(12, 13))]);
    }
    prop::sample::select(all)
}

fn descriptor(complex: bool) -> impl Strategy<Value = IsometryDescriptor> {
    (1usize..6)
        .prop_flat_map(move |r| {
            (
                Just((0..r).collect::<Vec<_>>()).prop_shuffle(),
                0usize..3,
                prop::collection::vec(unimodular(complex), r),
                unimodular(complex),
            )
        })
        .prop_map(|(perm, shift, lambdas, tail)| {
            let pairs = perm.into_iter().enumerate().collect();
            IsometryDescriptor::new(pairs, shift, lambdas, tail).unwrap()
        })
}

fn real_vector() -> impl Strategy<Value = FiniteVector> {
    prop::collection::vec((0usize..10, -20i64..=20, 1i64..=9), 0..6)
        .prop_map(|e| FiniteVector::from_coords(e.into_iter().map(|(n, a, b)| (n, CRat::real(rat(a, b))))))
}

/// `sum |a_n|^j` exactly, for coordinates with rational moduli.
fn power_sum(v: &FiniteVector, j: usize) -> Rat {
    v.iter().map(|(_, a)| num_traits::pow(a.exact_modulus().unwrap(), j)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn descriptors_preserve_power_sums(d in descriptor(true), v in real_vector()) {
        let t = d.apply(&v);
        for j in 1..=4 {
            prop_assert_eq!(power_sum(&t, j), power_sum(&v, j));
        }
        prop_assert_eq!(d.apply_inverse(&t), Some(v));
    }

    #[test]
    fn exact_descriptor_images_conform(d in descriptor(true), tol in 4u32..30) {
        let images: Vec<ImageCandidate> = (0..d.range() + 3).map(|n| ImageCandidate::exact(d.image(n))).collect();
        for p in exponents() {
            let v = classify(&images, &p, tol).unwrap();
            prop_assert_eq!(v.verdict, Verdict::Conforms);
        }
    }

    #[test]
    fn classifier_verdicts_are_sound(
        d in descriptor(false),
        which in 0usize..4,
        scale in prop::sample::select(Vec::from([rat(1, 2), rat(3, 4), rat(5, 4), rat(2, 1)])),
        tol in 4u32..20,
    ) {
        let n = d.range() + 2;
        let mut images: Vec<ImageCandidate> = (0..n).map(|j| ImageCandidate::exact(d.image(j))).collect();
        let victim = which % n;
        // a norm defect of at least 1/4, or a shared coordinate of size 1/2
        if which % 2 == 0 {
            images[victim].approx = images[victim].approx.scale(&CRat::real(scale));
        } else {
            let other = (victim + 1) % n;
            let m = d.phi(other);
            let bump = FiniteVector::from_coords([(m, CRat::real(rat(1, 2)))]);
            images[victim].approx = images[victim].approx.add(&bump);
        }
        for g in &mut images {
            g.radius = pow2(-(tol as i64) - 2);
        }
        let p = Exponent::from_ratio(3, 2).unwrap();
        let v = classify(&images, &p, tol).unwrap();
        prop_assert_eq!(v.verdict, Verdict::Violates);
        for w in &v.witnesses {
            match w.kind {
                WitnessKind::Norm { index } => prop_assert!(!w.evidence[0].contains(&Rat::one()) && index == victim),
                WitnessKind::Overlap { first, second, .. } => prop_assert!(first == victim || second == victim),
            }
        }
    }

    #[test]
    fn compositions_of_descriptor_maps_check(d1 in descriptor(false), d2 in descriptor(false)) {
        let p = Exponent::from_ratio(3, 2).unwrap();
        let std_e = standard_genset(p.clone(), Field::Real);
        let a: Arc<dyn BallMap> = Arc::new(descriptor_to_ballmap(&d1, p.clone(), Field::Real).unwrap());
        let b: Arc<dyn BallMap> = Arc::new(descriptor_to_ballmap(&d2, p.clone(), Field::Real).unwrap());
        let composed = ComposedMap::new(a, b).unwrap();
        let both = d1.then(&d2).unwrap();
        let mut schedule = Schedule::standard(Vec::from([
            Vec::from([CRat::one()]),
            Vec::from([CRat::real(rat(1, 2)), CRat::zero(), CRat::real(rat(-3, 2))]),
        ]));
        schedule.eps_grid = (1..=8).collect();
        let report = check_ballmap(&composed, &std_e, &std_e, |v| both.apply(v), &schedule).unwrap();
        prop_assert!(report.passed(), "{:?}", report.correctness_violations);
    }
}

#[test]
fn shift_map_is_an_isometry_but_not_onto() {
    let p = Exponent::two();
    let d = IsometryDescriptor::shift_by(3);
    assert!(!d.surjective_on_range());
    assert_eq!(d.apply_inverse(&FiniteVector::basis(0)), None);
    let map = descriptor_to_ballmap(&d, p.clone(), Field::Complex).unwrap();
    let std_e = standard_genset(p.clone(), Field::Complex);
    let centers = Vec::from([
        Vec::from([CRat::one()]),
        Vec::from([CRat::zero(), CRat::new(rat(1, 3), rat(-2, 3))]),
    ]);
    let report = check_ballmap(&map, &std_e, &std_e, |v| d.apply(v), &Schedule::standard(centers)).unwrap();
    assert!(report.passed());
    let images: Vec<ImageCandidate> = (0..6).map(|n| ImageCandidate::exact(d.image(n))).collect();
    assert_eq!(classify(&images, &p, 20).unwrap().verdict, Verdict::Conforms);
    // a wrong reference is caught
    let wrong = check_ballmap(&map, &std_e, &std_e, |v| v.clone(), &Schedule::standard(Vec::from([Vec::from([CRat::one()])]))).unwrap();
    assert!(!wrong.correctness_violations.is_empty());
}
