use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use trianglecf::matrices::{convergent, fundamental_identity_check, recover_pair, recover_terminated};
use trianglecf::numeric::{eval_poly, refine_root, BigFloat, ExactNumber, IntPolynomial, RootSpec, Sign};
use trianglecf::realization::realize;
use trianglecf::simplex::{convergent_nd, recover_nd, sequence_nd, step_nd, tuple_identity_check, PointN, SymbolN};
use trianglecf::triangle::{sequence, step, Point2, SequenceStatus};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Sorted pair `1 >= a >= b > 0` with denominators up to `max`.
fn pair() -> impl Strategy<Value = (BigRational, BigRational)> {
    (1i64..=500, 1i64..=500, 1i64..=500, 1i64..=500).prop_map(|(n1, d1, n2, d2)| {
        let (x, y) = (ratio(n1.min(d1), d1.max(n1)), ratio(n2.min(d2), d2.max(n2)));
        if x >= y {
            (x, y)
        } else {
            (y, x)
        }
    })
}

fn point(a: &BigRational, b: &BigRational) -> Point2 {
    Point2::new(a.clone().into(), b.clone().into()).unwrap()
}

fn expect_rational(x: &ExactNumber) -> BigRational {
    x.as_rational().cloned().expect("rational")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn horner_equals_power_sum(coeffs in prop::collection::vec(-50i64..=50, 1..8), n in -40i64..=40, d in 1i64..=40) {
        let p = IntPolynomial::from_i64(&coeffs);
        let x = ratio(n, d);
        let direct: BigRational = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| BigRational::from_integer(c.into()) * num_traits::pow(x.clone(), i))
            .sum();
        prop_assert_eq!(expect_rational(&eval_poly(&p, &x.clone().into())), direct.clone());
        let ball = eval_poly(&p, &ExactNumber::Float(BigFloat::from_rational(&x, 128)));
        prop_assert!(ball.admits(&direct));
    }

    #[test]
    fn ball_signs_never_contradict(n in -10_000i64..=10_000, d in 1i64..=10_000, prec in 64u32..=256) {
        let r = ratio(n, d);
        let exact = ExactNumber::Rational(r.clone()).sign();
        let ball = ExactNumber::Float(BigFloat::from_rational(&r, prec)).sign();
        prop_assert!(ball == exact || ball == Sign::Ambiguous, "{:?} vs {:?}", ball, exact);
        if !r.is_zero() {
            prop_assert_eq!(ball, exact);
        }
    }

    #[test]
    fn refined_roots_nest(k in 0i64..=20, lo_bits in 64u32..=200, extra in 1u32..=200) {
        let spec = RootSpec::new(IntPolynomial::from_i64(&[-1, 1, k, 1]), BigRational::zero(), BigRational::one()).unwrap();
        let coarse = refine_root(&spec, lo_bits);
        let fine = refine_root(&spec, lo_bits + extra);
        let ExactNumber::Float(f) = &fine else { panic!("irrational root") };
        let ExactNumber::Float(c) = &coarse else { panic!("irrational root") };
        prop_assert!(c.contains(&f.midpoint()));
        prop_assert!(f.radius() <= c.radius());
        prop_assert!(f.radius() <= BigRational::new(BigInt::one(), BigInt::one() << (lo_bits + extra)));
    }

    #[test]
    fn step_lands_in_triangle_with_floor_symbol((a, b) in pair()) {
        let (k, next) = step(&point(&a, &b)).unwrap();
        let want = ((BigRational::one() - &a) / &b).floor().to_integer();
        prop_assert_eq!(BigInt::from(k), want);
        let (u, v) = (expect_rational(&next.alpha), expect_rational(&next.beta));
        prop_assert!(u <= BigRational::one() && u >= v && !v.is_negative());
    }

    #[test]
    fn identity_and_exact_recovery((a, b) in pair()) {
        let p = point(&a, &b);
        let rec = sequence(&p, 1 << 16);
        prop_assert_eq!(rec.status, SequenceStatus::Terminated);
        prop_assert!(fundamental_identity_check(&p, &rec.symbols, rec.symbols.len()).unwrap());
        let n = rec.d_history.len();
        let terminal = (expect_rational(&rec.d_history[n - 3]), expect_rational(&rec.d_history[n - 2]));
        prop_assert_eq!(recover_terminated(&rec.symbols, (&terminal.0, &terminal.1)).unwrap(), (a, b));
    }

    #[test]
    fn witnesses_reproduce_prefixes(symbols in prop::collection::vec(0u32..=6, 1..10)) {
        let s: Vec<BigUint> = symbols.iter().map(|&k| k.into()).collect();
        let r = realize(&s);
        let rec = sequence(&r.witness_point(), s.len());
        prop_assert_eq!(rec.symbols, s);
    }

    #[test]
    fn simplex_steps_stay_inside(raw in prop::collection::vec(1i64..=997, 3), d in 998i64..=5000) {
        let mut c: Vec<BigRational> = raw.iter().map(|&n| ratio(n, d)).collect();
        c.sort_by(|x, y| y.cmp(x));
        let p = PointN::from_rationals(&c).unwrap();
        let (_, q) = step_nd(&p).unwrap();
        let q: Vec<BigRational> = q.coords().iter().map(expect_rational).collect();
        prop_assert!(q.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(q[0] <= BigRational::one() && !q[2].is_negative());
        let rec = sequence_nd(&p, 1 << 12);
        prop_assert!(tuple_identity_check(&p, &rec).unwrap());
    }

    #[test]
    fn planar_minors_equal_cross_product(symbols in prop::collection::vec(0u64..=5, 2..12)) {
        let s: Vec<BigUint> = symbols.iter().map(|&k| k.into()).collect();
        let nd: Vec<SymbolN> = symbols.iter().map(|&k| SymbolN::nonneg(k)).collect();
        let m = convergent(&s);
        prop_assert_eq!(&convergent_nd(&nd, 2).unwrap(), &m);
        match (recover_pair(&m), recover_nd(&m, 2)) {
            (Ok((a, b)), Ok(v)) => prop_assert_eq!(v, vec![a, b]),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "disagree: {:?} {:?}", x, y),
        }
    }
}

#[test]
fn worked_examples() {
    let rec = sequence(&point(&ratio(1, 2), &ratio(1, 3)), 100);
    assert_eq!(rec.symbols, vec![BigUint::from(1u32); 2]);
    assert_eq!(rec.status, SequenceStatus::Terminated);

    let r = realize(&[BigUint::from(2u32)]);
    assert_eq!(r.witness, (ratio(19, 36), ratio(7, 36)));

    let p = PointN::from_rationals(&[ratio(9, 10), ratio(9, 10), ratio(1, 10)]).unwrap();
    assert_eq!(step_nd(&p).unwrap().0, SymbolN::Pair(1, 3));
}
