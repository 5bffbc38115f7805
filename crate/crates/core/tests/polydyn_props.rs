use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use orbitweil::exactnum::{rat, LogMag, Rational};
use orbitweil::lab::config::SampleSpec;
use orbitweil::lab::sample_points;
use orbitweil::polydyn::{
    exponents_of_degree, height, iterate, normalize, pullback, pullback_iterate, HomogPoly, Morphism, ProjPoint,
    DEFAULT_COMPOSITION_CAP,
};
use proptest::prelude::*;

fn point(nvars: usize, bound: i64) -> impl Strategy<Value = ProjPoint> {
    prop::collection::vec(-bound..=bound, nvars)
        .prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
        .prop_map(|c| ProjPoint::from_i64(&c).unwrap())
}

fn form(nvars: usize, degree: u32) -> impl Strategy<Value = HomogPoly<Rational>> {
    let exps = exponents_of_degree(nvars, degree);
    prop::collection::vec((-5i64..=5, 1i64..=3), exps.len())
        .prop_map(move |cs| {
            let terms = exps
                .iter()
                .cloned()
                .zip(cs)
                .map(|(e, (n, d))| (e, Rational::new(n.into(), d.into())));
            HomogPoly::from_terms(nvars, (), terms).unwrap()
        })
        .prop_filter("nonzero", |g| !g.is_zero())
}

/// Maps of P^1 with no common zero of the two forms, so every orbit is defined.
fn morphism_p1() -> impl Strategy<Value = Morphism> {
    (1u32..=3)
        .prop_flat_map(|d| (form(2, d), form(2, d)))
        .prop_map(|(a, b)| Morphism::new(vec![a, b]))
        .prop_filter_map("degenerate", |m| m.ok())
        .prop_filter("resultant", |f| {
            let ps: Vec<ProjPoint> = (-6i64..=6)
                .flat_map(|a| (0i64..=6).map(move |b| (a, b)))
                .filter_map(|(a, b)| ProjPoint::from_i64(&[a, b]).ok())
                .collect();
            ps.iter().all(|p| f.evaluate(p).is_ok())
        })
}

fn totient(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

fn eval_raw(forms: &[HomogPoly<Rational>], x: &[Rational]) -> Vec<Rational> {
    forms.iter().map(|g| g.eval_rational(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projective_invariance(x in point(3, 50), n in -40i64..=40, d in 1i64..=40) {
        prop_assume!(n != 0);
        let lambda = Rational::new(n.into(), d.into());
        let scaled: Vec<Rational> = x.as_rationals().iter().map(|c| c * &lambda).collect();
        let y = normalize(&scaled).unwrap();
        prop_assert_eq!(&y, &x);
        prop_assert_eq!(height(&y).exact_eq(&height(&x)), Some(true));
    }

    #[test]
    fn points_are_canonical(c in prop::collection::vec(-1000i64..=1000, 1..5)) {
        prop_assume!(c.iter().any(|&x| x != 0));
        let p = ProjPoint::from_i64(&c).unwrap();
        let g = p.coords().iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        prop_assert!(g.is_one());
        prop_assert!(p.coords().iter().find(|x| !x.is_zero()).unwrap().is_positive());
    }

    #[test]
    fn pullback_functoriality(f in morphism_p1(), g in (1u32..=2).prop_flat_map(|d| form(2, d))) {
        let twice = pullback(&f, &pullback(&f, &g).unwrap()).unwrap();
        prop_assert_eq!(&twice, &pullback_iterate(&f, &g, 2, DEFAULT_COMPOSITION_CAP).unwrap());
        for a in -5i64..=4 {
            for b in 1i64..=5 {
                let x = vec![rat(a), rat(b)];
                let fx = eval_raw(f.forms(), &x);
                let ffx = eval_raw(f.forms(), &fx);
                prop_assert_eq!(twice.eval_rational(&x), g.eval_rational(&ffx));
            }
        }
    }

    #[test]
    fn resumability(f in morphism_p1(), x in point(2, 20), n in 0usize..4, k in 0usize..4) {
        let mut r = iterate(&f, &x, n).unwrap();
        r.extend(&f, n + k).unwrap();
        prop_assert_eq!(r, iterate(&f, &x, n + k).unwrap());
    }

    #[test]
    fn orbit_record_invariants(f in morphism_p1(), x in point(2, 20)) {
        let r = iterate(&f, &x, 4).unwrap();
        prop_assert_eq!(&r.steps()[0].point, &x);
        for w in r.steps().windows(2) {
            prop_assert_eq!(&w[1].point, &f.evaluate(&w[0].point).unwrap());
        }
        for s in r.steps() {
            prop_assert_eq!(s.h.exact_eq(&height(&s.point)), Some(true));
        }
    }
}

#[test]
fn squaring_heights_double() {
    let f = Morphism::parse(&["x0^2", "x1^2"]).unwrap();
    let r = iterate(&f, &ProjPoint::from_i64(&[2, 1]).unwrap(), 20).unwrap();
    for s in r.steps() {
        let expected = LogMag::ln(Rational::from_integer(BigInt::from(2).pow(1u32 << s.n))).unwrap();
        assert_eq!(s.h.exact_eq(&expected), Some(true), "n = {}", s.n);
    }
}

#[test]
fn northcott_count_for_bound_ten() {
    let pts = sample_points(
        2,
        &SampleSpec {
            height_bound: 10,
            size: None,
            seed: 0,
        },
    )
    .unwrap();
    // Primitive pairs with max(|a|, |b|) = m number 8 phi(m) for m >= 2 and 8 for m = 1; halve for sign.
    let expected = 4 + 4 * (2..=10).map(totient).sum::<u64>();
    assert_eq!(pts.len() as u64, expected);
    let bound = LogMag::ln(rat(10)).unwrap();
    assert!(pts
        .iter()
        .all(|p| height(p).cmp_value(&bound) != Some(std::cmp::Ordering::Greater)));
    let mut sorted = pts.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), pts.len());
}
