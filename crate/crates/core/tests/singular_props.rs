use orbitweil::exactnum::{rat, Rational};
use orbitweil::polydyn::{HomogPoly, Morphism};
use orbitweil::singular::{
    efd_estimate, family_max_ord, lct_lower_bound_canonical, lct_monomial, lct_valuation_search, ExponentMatrix,
    MonomialIdeal, Threshold, ValuationFamily,
};
use proptest::prelude::*;

fn ideal(max_vars: usize) -> impl Strategy<Value = MonomialIdeal> {
    (1..=max_vars)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(prop::collection::vec(0u32..=6, n), 1..=4),
            )
        })
        .prop_map(|(n, gens)| MonomialIdeal::new(n, gens).unwrap())
        .prop_filter("unit ideal", |i| !i.is_unit())
}

fn lct(i: &MonomialIdeal) -> Rational {
    match lct_monomial(i).value() {
        Some(Threshold::Finite(q)) => q.clone(),
        other => panic!("no exact lct for {i}: {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// In two variables every facet normal of the Newton polygon has entries
    /// bounded by the generator exponents, so the bounded search is exact.
    #[test]
    fn howald_matches_valuation_search_in_two_variables(i in ideal(2)) {
        let (lp, search) = (lct_monomial(&i), lct_valuation_search(&i, 6));
        prop_assert_eq!(lp.value(), search.value());
    }

    /// In three variables the bounded search is an upper bound that only
    /// improves with the bound.
    #[test]
    fn valuation_search_bounds_howald_from_above(i in ideal(3)) {
        let lp = lct(&i);
        let s6 = lct_valuation_search(&i, 6).ub;
        let s9 = lct_valuation_search(&i, 9).ub;
        prop_assert!(Threshold::Finite(lp) <= s9.clone());
        prop_assert!(s9 <= s6);
    }

    #[test]
    fn lct_is_monotone(j in ideal(3), bumps in prop::collection::vec(prop::collection::vec(0u32..=3, 3), 4)) {
        let gens: Vec<Vec<u32>> = j
            .generators()
            .iter()
            .zip(bumps.iter().cycle())
            .map(|(g, b)| g.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        let i = MonomialIdeal::new(j.nvars(), gens).unwrap();
        prop_assert!(i.is_contained_in(&j));
        prop_assert!(lct(&i) <= lct(&j));
    }

    #[test]
    fn lct_scales_inversely(i in ideal(3), k in 1u32..=5) {
        prop_assert_eq!(lct(&i.scaled(k)), lct(&i) / rat(k as i64));
    }

    #[test]
    fn family_bound_below_lct(i in ideal(3)) {
        let family = lct_lower_bound_canonical(&family_max_ord(&i)).unwrap();
        prop_assert!(family.lb <= Threshold::Finite(lct(&i)));
    }

    /// Entries of `A^(p+q)` are sums of `k` products of entries of `A^p` and `A^q`.
    #[test]
    fn monomial_orders_are_submultiplicative(a in prop::collection::vec(prop::collection::vec(0u32..=3, 3), 3)) {
        prop_assume!((0..3).all(|j| a.iter().any(|r| r[j] > 0)));
        let m = ExponentMatrix::new(a).unwrap();
        let cols: Vec<_> = (0..3).map(|j| m.column_sup(j, 8)).collect();
        let s: Vec<_> = (0..8).map(|n| cols.iter().map(|c| c[n].clone()).max().unwrap()).collect();
        for p in 1..=4 {
            for q in 1..=4 {
                prop_assert!(s[p + q - 1] <= &s[p - 1] * &s[q - 1] * 3u32);
            }
        }
    }
}

#[test]
fn family_orders_are_submultiplicative() {
    let cases = [
        (["x0^2", "x1^2"], "x0 - 3*x1"),
        (["x0^2", "x1^2"], "x1"),
        (["x0^2 + x1^2", "x0*x1"], "x0"),
        (["x0^2 - 2*x1^2", "x1^2"], "x0 + x1"),
        (["x1^2", "x0^2"], "x0"),
    ];
    let family = ValuationFamily::standard(2, 2);
    for (forms, div) in cases {
        let f = Morphism::parse(&forms).unwrap();
        let d = HomogPoly::parse(div, 2).unwrap();
        let s = efd_estimate(&f, &d, 4, &family, 6).unwrap().s;
        for p in 1..s.len() {
            for q in 1..=s.len() - p {
                assert!(s[p + q - 1] <= &s[p - 1] * &s[q - 1], "{forms:?}, {div}: s = {s:?}");
            }
        }
    }
}

#[test]
fn bounded_search_misses_a_large_facet_normal() {
    let i = MonomialIdeal::new(3, vec![vec![0, 4, 4], vec![4, 5, 2], vec![5, 1, 3]]).unwrap();
    let exact = Threshold::Finite(Rational::new(15.into(), 46.into()));
    assert_eq!(lct_monomial(&i).value(), Some(&exact));
    assert_eq!(
        lct_valuation_search(&i, 6).value(),
        Some(&Threshold::Finite(Rational::new(1.into(), 3.into())))
    );
    let wide = lct_valuation_search(&i, 17);
    assert_eq!(wide.value(), Some(&exact));
    assert_eq!(wide.valuation, Some(vec![7, 6, 17]));
}
