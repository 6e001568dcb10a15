use lpcat_core::rigor::{pow2, pow_p, rat, root_p, ComputableReal, Enclosure, Exponent, Rat};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rat {
    rat(n, d)
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-400i64..=400, 1i64..=60).prop_map(|(n, d)| q(n, d))
}

fn nonneg_rat(max_num: i64, max_den: i64) -> impl Strategy<Value = Rat> {
    (0..=max_num, 1..=max_den).prop_map(|(n, d)| q(n, d))
}

fn exponents() -> impl Strategy<Value = (i64, i64)> {
    prop_oneof![Just((1, 1)), Just((3, 2)), Just((2, 1)), Just((3, 1))]
}

/// `e` encloses `x^(a/b)` iff `lo^b <= x^a <= hi^b`; exact, no roots taken.
fn encloses_power(e: &Enclosure, x: &Rat, a: i64, b: i64) -> bool {
    let xa = num_traits::pow(x.clone(), a as usize);
    let lo = e.lo().clone().max(Rat::zero());
    num_traits::pow(lo, b as usize) <= xa && xa <= num_traits::pow(e.hi().clone(), b as usize)
}

#[derive(Clone, Debug)]
enum Op {
    Add,
    Sub,
    Mul,
    Abs,
    Neg,
    Square,
    Scale,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        Just(Op::Add),
        Just(Op::Sub),
        Just(Op::Mul),
        Just(Op::Abs),
        Just(Op::Neg),
        Just(Op::Square),
        Just(Op::Scale)
    ]
}

fn around(x: &Rat, below: &Rat, above: &Rat) -> Enclosure {
    Enclosure::new(x - below, x + above)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn enclosure_arithmetic_is_sound(
        start in small_rat(),
        steps in prop::collection::vec((op(), small_rat(), nonneg_rat(5, 40), nonneg_rat(5, 40)), 1..6),
        r0 in (nonneg_rat(5, 40), nonneg_rat(5, 40)),
    ) {
        let mut exact = start.clone();
        let mut enc = around(&start, &r0.0, &r0.1);
        for (o, y, lo, hi) in steps {
            let ey = around(&y, &lo, &hi);
            match o {
                Op::Add => { exact = &exact + &y; enc = &enc + &ey; }
                Op::Sub => { exact = &exact - &y; enc = &enc - &ey; }
                Op::Mul => { exact = &exact * &y; enc = &enc * &ey; }
                Op::Abs => { exact = exact.abs(); enc = enc.abs(); }
                Op::Neg => { exact = -exact; enc = -enc; }
                Op::Square => { exact = &exact * &exact; enc = enc.square(); }
                Op::Scale => { exact = &exact * &y; enc = enc.scale(&y); }
            }
            prop_assert!(enc.contains(&exact), "{exact} escaped {enc}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn root_after_power_contracts(x in nonneg_rat(8000, 1000), (a, b) in exponents(), k in 1u32..=40) {
        let p = Exponent::from_ratio(a, b).unwrap();
        let y = pow_p(&Enclosure::point(x.clone()), &p, k).unwrap();
        prop_assert!(y.narrower_than(k));
        prop_assert!(encloses_power(&y, &x, a, b), "{y} misses {x}^({a}/{b})");
        let back = root_p(&y, &p, k).unwrap();
        prop_assert!(back.contains(&x), "{back} misses {x}");
        prop_assert!(back.width() < pow2(2 - k as i64), "width {} at k = {k}", back.width());
    }

    #[test]
    fn powers_are_monotone_under_inclusion(
        x in nonneg_rat(800, 100),
        inner in (nonneg_rat(3, 50), nonneg_rat(3, 50)),
        outer in (nonneg_rat(3, 50), nonneg_rat(3, 50)),
        (a, b) in exponents(),
        k in 1u32..=30,
    ) {
        let p = Exponent::from_ratio(a, b).unwrap();
        let lo_in = (&x - &inner.0).max(Rat::zero());
        let lo_out = (&lo_in - &outer.0).max(Rat::zero());
        let hi_in = &x + &inner.1;
        let small = Enclosure::new(lo_in, hi_in.clone());
        let big = Enclosure::new(lo_out, &hi_in + &outer.1);
        for e in [small.clone(), Enclosure::point(x.clone())] {
            prop_assert!(pow_p(&big, &p, k).unwrap().contains_enclosure(&pow_p(&e, &p, k).unwrap()));
            prop_assert!(root_p(&big, &p, k).unwrap().contains_enclosure(&root_p(&e, &p, k).unwrap()));
        }
    }

    #[test]
    fn power_enclosures_contain_exact_values(x in nonneg_rat(500, 97), (a, b) in exponents(), k in 1u32..=48) {
        let p = Exponent::from_ratio(a, b).unwrap();
        let y = pow_p(&Enclosure::point(x.clone()), &p, k).unwrap();
        prop_assert!(encloses_power(&y, &x, a, b));
        // x = r^(a/b) for r = root: r^a <= x^b checked on the root endpoints
        let r = root_p(&Enclosure::point(x.clone()), &p, k).unwrap();
        prop_assert!(r.narrower_than(k));
        let rl = r.lo().clone().max(Rat::zero());
        let xb = num_traits::pow(x.clone(), b as usize);
        prop_assert!(num_traits::pow(rl, a as usize) <= xb && xb <= num_traits::pow(r.hi().clone(), a as usize));
    }

    #[test]
    fn square_roots_are_consistent(n in 0i64..=10_000, d in 1i64..=997) {
        let x = q(n, d);
        let s = ComputableReal::sqrt_of(x.clone());
        let approx: Vec<Rat> = (0..=64).map(|k| s.approx(k).unwrap()).collect();
        for (k, a) in approx.iter().enumerate() {
            let e = pow2(-(k as i64));
            let lo = (a - &e).max(Rat::zero());
            prop_assert!(&lo * &lo < x || x.is_zero());
            prop_assert!((a + &e) * (a + &e) > x);
            for (j, b) in approx.iter().enumerate().skip(k) {
                prop_assert!((a - b).abs() < &e + pow2(-(j as i64)));
            }
        }
    }
}

#[test]
fn irrational_exponent_refines_consistently() {
    let p = Exponent::computable(ComputableReal::sqrt_of(q(2, 1))).unwrap();
    for x in [q(1, 3), q(2, 1), q(17, 5), q(1, 1000)] {
        let encs: Vec<Enclosure> = (1..=40).step_by(3).map(|k| pow_p(&Enclosure::point(x.clone()), &p, k).unwrap()).collect();
        for (i, a) in encs.iter().enumerate() {
            assert!(a.narrower_than(1 + 3 * i as u32));
            for b in &encs[i..] {
                assert!(a.intersects(b), "{a} and {b} for {x}");
            }
        }
    }
    // 2^sqrt2 = 2.6651441426...
    let two = pow_p(&Enclosure::point(q(2, 1)), &p, 30).unwrap();
    let known = Enclosure::new(q(2_665_144_142, 1_000_000_000), q(2_665_144_143, 1_000_000_000));
    assert!(two.narrower_than(30) && two.intersects(&known), "{two}");
}

#[test]
fn exponents_below_one_are_rejected() {
    assert!(Exponent::from_ratio(1, 2).is_err());
    assert!(Exponent::computable(ComputableReal::constant(q(99, 100))).is_err());
    assert!(Exponent::computable(ComputableReal::sqrt_of(q(1, 2))).is_err());
    assert!(Exponent::rational(Rat::one()).is_ok());
}
