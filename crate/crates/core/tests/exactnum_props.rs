use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use orbitweil::exactnum::primes::legendre;
use orbitweil::exactnum::{
    padic_valuation, places_above, rat, BasePlace, Extension, LogMag, Place, QuadElem, QuadField, Rational, Scalar,
};
use proptest::prelude::*;

fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p * p) <= n {
        if (&n % p).is_zero() {
            out.push(p);
            while (&n % p).is_zero() {
                n /= p;
            }
        }
        p += 1;
    }
    if n > BigInt::from(1) {
        out.push(n.try_into().expect("small cofactor"));
    }
    out
}

fn rational() -> impl Strategy<Value = Rational> {
    (-100_000i64..=100_000, 1i64..=100_000)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn field() -> impl Strategy<Value = QuadField> {
    prop::sample::select(vec![-7i64, -5, -3, -2, -1, 2, 3, 5, 6, 7, 10, 13]).prop_map(|d| QuadField::new(d).unwrap())
}

fn quad(field: QuadField) -> impl Strategy<Value = QuadElem> {
    (-300i64..=300, 1i64..=40, -300i64..=300, 1i64..=40)
        .prop_filter("nonzero", |(a, _, b, _)| *a != 0 || *b != 0)
        .prop_map(move |(a, da, b, db)| {
            QuadElem::new(
                field,
                Rational::new(a.into(), da.into()),
                Rational::new(b.into(), db.into()),
            )
        })
}

fn relevant_primes(y: &QuadElem) -> Vec<u64> {
    let n = y.norm();
    let mut ps: Vec<u64> = [
        n.numer().clone(),
        n.denom().clone(),
        y.a().denom().clone(),
        y.b().denom().clone(),
    ]
    .iter()
    .flat_map(prime_divisors)
    .chain(prime_divisors(&BigInt::from(2 * y.field().d())))
    .collect();
    ps.sort_unstable();
    ps.dedup();
    ps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rational_product_formula(q in rational()) {
        let mut places = vec![Place::infinite()];
        for p in prime_divisors(&(q.numer() * q.denom())) {
            places.push(Place::finite(p).unwrap());
        }
        let logs: Vec<LogMag> = places.iter().map(|v| q.log_abs(v).unwrap()).collect();
        let total = LogMag::sum(&logs);
        prop_assert_eq!(total.exact_eq(&LogMag::ln(rat(1)).unwrap()), Some(true));
    }

    #[test]
    fn valuation_matches_absolute_value(q in rational(), p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])) {
        let ord = padic_valuation(&q, p).unwrap();
        let expected = LogMag::ln(if ord >= 0 {
            Rational::new(1.into(), BigInt::from(p).pow(ord as u32))
        } else {
            Rational::from_integer(BigInt::from(p).pow((-ord) as u32))
        })
        .unwrap();
        prop_assert_eq!(q.log_abs(&Place::finite(p).unwrap()).unwrap().exact_eq(&expected), Some(true));
    }

    #[test]
    fn rationals_stay_reduced(n in -10_000i64..=10_000, d in 1i64..=10_000) {
        let q = Rational::new(n.into(), d.into());
        prop_assert!(q.denom().is_positive());
        prop_assert_eq!(q.numer().gcd(q.denom()), if n == 0 { q.denom().clone() } else { BigInt::from(1) });
        if n == 0 {
            prop_assert_eq!(q.denom(), &BigInt::from(1));
        }
    }

    #[test]
    fn quadratic_product_formula((f, y) in field().prop_flat_map(|f| (Just(f), quad(f)))) {
        let mut bases = vec![BasePlace::Infinite];
        bases.extend(relevant_primes(&y).into_iter().map(BasePlace::Finite));
        let mut arch = LogMag::zero();
        let mut non = LogMag::zero();
        for base in bases {
            for w in places_above(base, f) {
                let term = y.log_abs(&w).unwrap().scale(&Rational::new(w.local_degree().into(), 2.into()));
                if w.is_archimedean() {
                    arch = arch.add(&term);
                } else {
                    prop_assert!(term.is_exact());
                    non = non.add(&term);
                }
            }
        }
        // log|N y| split into its archimedean and finite parts.
        let norm = y.norm();
        let half_norm = LogMag::ln_root(num_traits::Signed::abs(&norm), 2).unwrap();
        prop_assert_eq!(non.add(&half_norm).exact_eq(&LogMag::zero()), Some(true));
        let total = arch.add(&non);
        prop_assert!(total.within(&LogMag::zero(), 4.0 * total.err_bound().max(1e-300)));
    }

    #[test]
    fn restriction_to_rationals((f, q) in (field(), rational())) {
        let y = QuadElem::from_rational(f, q.clone());
        let mut bases = vec![BasePlace::Infinite];
        bases.extend(prime_divisors(&(q.numer() * q.denom())).into_iter().map(BasePlace::Finite));
        bases.push(BasePlace::Finite(2));
        for base in bases {
            let v = match base {
                BasePlace::Infinite => Place::infinite(),
                BasePlace::Finite(p) => Place::finite(p).unwrap(),
            };
            let expected = q.log_abs(&v).unwrap();
            for w in places_above(base, f) {
                let got = y.log_abs(&w).unwrap();
                prop_assert!(got.within(&expected, 4.0 * got.err_bound().max(expected.err_bound()) + 1e-300),
                    "{} vs {} at {}", got.to_f64(), expected.to_f64(), w);
            }
        }
    }

    #[test]
    fn split_places_swap_under_conjugation(
        (f, y) in field().prop_flat_map(|f| (Just(f), quad(f))),
        p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31]),
    ) {
        prop_assume!(f.d() % p as i64 != 0 && legendre(f.d(), p) == 1);
        let above = places_above(BasePlace::Finite(p), f);
        prop_assert_eq!(above.len(), 2);
        let a = y.log_abs(&above[0]).unwrap();
        let b = y.conjugate().log_abs(&above[1]).unwrap();
        prop_assert_eq!(a.exact_eq(&b), Some(true));
    }

    #[test]
    fn splitting_matches_legendre(f in field(), p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41])) {
        let above = places_above(BasePlace::Finite(p), f);
        let ext = above[0].extension().unwrap().1;
        match legendre(f.d(), p) {
            0 => prop_assert_eq!(ext, Extension::Ramified),
            1 => {
                let split = matches!(ext, Extension::Split { .. });
                prop_assert!(split)
            }
            _ => prop_assert_eq!(ext, Extension::Inert),
        }
    }

    #[test]
    fn conjugate_and_norm((f, y) in field().prop_flat_map(|f| (Just(f), quad(f)))) {
        let c = y.conjugate();
        prop_assert_eq!(c.a(), y.a());
        prop_assert_eq!(c.b(), &-y.b().clone());
        prop_assert_eq!(y.norm(), y.a() * y.a() - Rational::from_integer(f.d().into()) * y.b() * y.b());
        prop_assert!(!y.is_zero());
    }
}
