//! Desk-scale acceptance suite. Each test prints one line:
//! `criterion <k>: PASS|FAIL <summary> [elapsed / limit]`.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use orbitweil::degree::{
    alpha_estimate, growth_fit, growth_fit_values, ratio_bound_check, AlphaInput, DEFAULT_ELL_MAX,
};
use orbitweil::exactnum::{rat, LogMag, Place, QuadElem, QuadField, Rational, Scalar};
use orbitweil::lab::emit::ratio_csv;
use orbitweil::lab::{
    run_gap_experiment, run_ratio_experiment, thm14_hypothesis_report, Clause, ExperimentConfig, RunOptions,
};
use orbitweil::polydyn::{height, iterate, HomogPoly, Morphism, ProjPoint, DEFAULT_COMPOSITION_CAP};
use orbitweil::singular::{
    cn_calculator, efd_monomial_exact, family_max_ord, lct_lower_bound_canonical, lct_monomial, lct_valuation_search,
    remark44_m0, ExponentMatrix, MonomialIdeal, Threshold, ValuationFamily,
};
use orbitweil::weil::{galois_symmetrized_terms, weil_global};
use orbitweil::DivisorPresentation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check(k: u32, summary: &str, ok: bool, started: Instant, limit_secs: u64) {
    let elapsed = started.elapsed();
    let limit = Duration::from_secs(limit_secs);
    let pass = ok && elapsed < limit;
    println!(
        "criterion {k}: {} {summary} [{:.2} s / {limit_secs} s]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {k}: {summary}");
    assert!(
        elapsed < limit,
        "criterion {k}: {:.2} s exceeds {limit_secs} s",
        elapsed.as_secs_f64()
    );
}

fn squaring() -> Morphism {
    Morphism::parse(&["x0^2", "x1^2"]).unwrap()
}

fn pt(c: &[i64]) -> ProjPoint {
    ProjPoint::from_i64(c).unwrap()
}

fn ratio_f64(r: &orbitweil::exactnum::Ratio) -> f64 {
    r.exact.as_ref().and_then(|q| q.to_f64()).unwrap_or(r.approx)
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn random_point(rng: &mut ChaCha8Rng, nvars: usize, bound: i64) -> ProjPoint {
    loop {
        let c: Vec<i64> = (0..nvars).map(|_| rng.gen_range(-bound..=bound)).collect();
        if c.iter().any(|&x| x != 0) {
            return pt(&c);
        }
    }
}

fn ratio_config(divisor: &str, places: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{"map": {{"forms": ["x0^2", "x1^2"]}}, "seed": [2, 1],
            "divisor": {divisor}, "S": {places}, "N": 8,
            "eps": "1/2", "eps0": 1, "e": 1}}"#
    ))
    .unwrap()
}

#[test]
fn criterion_01_product_formula() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = 0;
    for _ in 0..1000 {
        let num = loop {
            let n: i64 = rng.gen_range(-1_000_000..=1_000_000);
            if n != 0 {
                break n;
            }
        };
        let den: i64 = rng.gen_range(1..=1_000_000);
        let q = Rational::new(num.into(), den.into());
        let mut places = vec![Place::infinite()];
        for p in prime_divisors(num.unsigned_abs() * den as u64) {
            places.push(Place::finite(p).unwrap());
        }
        let logs: Vec<LogMag> = places.iter().map(|v| q.log_abs(v).unwrap()).collect();
        if LogMag::sum(&logs).exact_eq(&LogMag::zero()) != Some(true) {
            failures += 1;
        }
    }
    check(
        1,
        &format!("1000 rationals, {failures} nonzero place sums"),
        failures == 0,
        t,
        5,
    );
}

fn random_form(rng: &mut ChaCha8Rng, nvars: usize, degree: u32) -> HomogPoly<Rational> {
    loop {
        let mut terms = Vec::new();
        for e in orbitweil::polydyn::exponents_of_degree(nvars, degree) {
            if rng.gen_bool(0.6) {
                let c = Rational::new(rng.gen_range(-12i64..=12).into(), rng.gen_range(1i64..=6).into());
                terms.push((e, c));
            }
        }
        let g = HomogPoly::from_terms(nvars, (), terms).unwrap();
        if !g.is_zero() && g.degree() == degree {
            return g;
        }
    }
}

#[test]
fn criterion_02_height_identity() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut done = 0;
    while done < 200 {
        let nvars = rng.gen_range(2..=3);
        let degree = rng.gen_range(1..=4);
        let d = DivisorPresentation::hypersurface(random_form(&mut rng, nvars, degree)).unwrap();
        let x = random_point(&mut rng, nvars, 40);
        if d.in_support(&x) {
            continue;
        }
        done += 1;
        let lhs = weil_global(&d, &x).unwrap();
        let rhs = height(&x).scale(&rat(degree as i64));
        if lhs.exact_eq(&rhs) != Some(true) {
            failures.push(format!("{} at {x}", d.sd()));
        }
    }
    check(
        2,
        &format!("200 pairs, {} mismatches {:?}", failures.len(), failures),
        failures.is_empty(),
        t,
        30,
    );
}

#[test]
fn criterion_03_quadratic_symmetrization() {
    let t = Instant::now();
    let field = QuadField::new(2).unwrap();
    let sd = HomogPoly::from_terms(
        2,
        field,
        [
            (vec![1, 0], QuadElem::from_rational(field, rat(1))),
            (vec![0, 1], -field.sqrt_d()),
        ],
    )
    .unwrap();
    let d = DivisorPresentation::hypersurface(sd).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = Vec::new();
    let mut worst = 0f64;
    for _ in 0..50 {
        let x = random_point(&mut rng, 2, 1000);
        let g = galois_symmetrized_terms(&d, &x).unwrap();
        let (a, b) = (&x.coords()[0], &x.coords()[1]);
        // Finite places see only the norm: sum_w (n_w/2)(-log|a - sqrt2 b|_w) = log|a^2 - 2b^2| / 2.
        let norm = (a * a - BigInt::from(2) * b * b).abs();
        let expected_non = LogMag::ln_root(Rational::from_integer(norm), 2).unwrap();
        let h = height(&x);
        let err = g.total.err_bound();
        worst = worst.max(4.0 * err);
        let within = g.total.within(&h, 4.0 * err) && 4.0 * err <= 1e-28;
        if !g.nonarchimedean.is_exact() || g.nonarchimedean.exact_eq(&expected_non) != Some(true) || !within {
            bad.push(x.to_string());
        }
    }
    check(
        3,
        &format!("50 points, 4*err <= {worst:.1e}, failures {bad:?}"),
        bad.is_empty(),
        t,
        30,
    );
}

#[test]
fn criterion_04_arithmetic_degree() {
    let t = Instant::now();
    let orbit = iterate(&squaring(), &pt(&[2, 1]), 20).unwrap();
    let est = alpha_estimate(&orbit).unwrap();
    let all_two = est
        .ratio_seq
        .iter()
        .all(|r| r.as_ref().and_then(|r| r.exact.clone()) == Some(rat(2)));
    let root20 = est.root_seq[19];
    let root_ok = (root20 - 2.0).abs() <= 0.05 * 2.0;
    check(
        4,
        &format!("ratios exactly 2: {all_two}, root estimate at n=20: {root20:.6}"),
        all_two && root_ok && est.exact_value() == Some(rat(2)),
        t,
        5,
    );
}

#[test]
fn criterion_05_growth_fit() {
    let t = Instant::now();
    let ln2 = std::f64::consts::LN_2;
    let pure: Vec<f64> = (0..=24).map(|n| 2f64.powi(n) * ln2).collect();
    let f0 = growth_fit_values(&pure, AlphaInput::Fit, DEFAULT_ELL_MAX).unwrap();
    let poly: Vec<f64> = (0..=24).map(|n| n as f64 * 2f64.powi(n)).collect();
    let f1 = growth_fit_values(&poly, AlphaInput::Fit, DEFAULT_ELL_MAX).unwrap();
    let orbit = iterate(&squaring(), &pt(&[2, 1]), 20).unwrap();
    let fit = growth_fit(&orbit, AlphaInput::Fit, DEFAULT_ELL_MAX).unwrap();
    let violations: usize = (1..=3)
        .map(|m| ratio_bound_check(&orbit, &fit, m).violations.len())
        .sum();
    let ok = f0.ell == 0 && (f0.alpha - 2.0).abs() <= 1e-6 && f1.ell == 1 && violations == 0;
    check(
        5,
        &format!(
            "pure: l={} alpha={:.9}; n*2^n: l={}; ratio-bound violations {violations}",
            f0.ell, f0.alpha, f1.ell
        ),
        ok,
        t,
        5,
    );
}

#[test]
fn criterion_06_lct() {
    let t = Instant::now();
    let finite = |q: &str| Some(Threshold::Finite(q.parse().unwrap()));
    let cusp = lct_monomial(&MonomialIdeal::new(2, vec![vec![2, 0], vec![0, 3]]).unwrap());
    let principal = lct_monomial(&MonomialIdeal::principal(vec![3, 2]));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut disagree = Vec::new();
    let mut family_above = Vec::new();
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        let gens: Vec<Vec<u32>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..=6)).collect()).collect();
        let ideal = MonomialIdeal::new(n, gens.clone()).unwrap();
        let lp = lct_monomial(&ideal);
        let search = lct_valuation_search(&ideal, 6);
        if lp.value().is_none() || lp.value() != search.value() {
            disagree.push(format!("{ideal}: lp {} vs search {}", lp.lb, search.lb));
        }
        if !ideal.is_unit() {
            let family = lct_lower_bound_canonical(&family_max_ord(&ideal)).unwrap();
            if family.lb > lp.lb {
                family_above.push(ideal.to_string());
            }
        }
    }
    let ok = cusp.value() == finite("5/6").as_ref()
        && principal.value() == finite("1/3").as_ref()
        && disagree.is_empty()
        && family_above.is_empty();
    check(
        6,
        &format!(
            "(x^2,y^3) -> {}, x^3y^2 -> {}, LP/search disagreements {disagree:?}, family bound above lct {family_above:?}",
            cusp.lb, principal.lb
        ),
        ok,
        t,
        60,
    );
}

#[test]
fn criterion_07_ramification_growth() {
    let t = Instant::now();
    let a = ExponentMatrix::new(vec![vec![2, 1], vec![0, 2]]).unwrap();
    let entries_ok = (1..=30).all(|n| a.power(n)[0][1] == num_bigint::BigUint::from(n as u64) << (n - 1));
    let sup = a.column_sup(1, 30);
    let sup_ok = sup.iter().enumerate().all(|(i, s)| {
        let n = i as u64 + 1;
        *s == (num_bigint::BigUint::from(n) << (n - 1)).max(num_bigint::BigUint::one() << n)
    });
    let r30 = sup[29].to_f64().unwrap() / sup[28].to_f64().unwrap();
    let spectral = efd_monomial_exact(&a, 1).unwrap();
    let diag = ExponentMatrix::new(vec![vec![2, 0], vec![0, 3]]).unwrap();
    let diag_exact = efd_monomial_exact(&diag, 1).unwrap();
    let diag_sup = diag.column_sup(1, 5);
    let diag_immediate = diag_sup
        .iter()
        .enumerate()
        .all(|(i, s)| *s == num_bigint::BigUint::from(3u32).pow(i as u32 + 1));
    let ok = entries_ok
        && sup_ok
        && (r30 - 2.0).abs() <= 0.07 * 2.0
        && spectral.exact == Some(rat(2))
        && diag_exact.exact == Some(rat(3))
        && diag_immediate;
    check(
        7,
        &format!(
            "(A^n)_12 = n 2^(n-1) for n<=30: {entries_ok}, ratio at 30 = {r30:.4}, spectral {:?}, diagonal {:?}",
            spectral.exact.map(|q| q.to_string()),
            diag_exact.exact.map(|q| q.to_string())
        ),
        ok,
        t,
        5,
    );
}

#[test]
fn criterion_08_m0_search() {
    let t = Instant::now();
    let f = squaring();
    let family = ValuationFamily::standard(2, 2);
    let eps = Rational::new(1.into(), 2.into());
    let moving = HomogPoly::parse("x0 - 3*x1", 2).unwrap();
    let invariant = HomogPoly::parse("x1", 2).unwrap();
    let a = remark44_m0(
        &rat(1),
        &eps,
        &f,
        &moving,
        DEFAULT_COMPOSITION_CAP,
        &family,
        DEFAULT_COMPOSITION_CAP,
    )
    .unwrap();
    let b = remark44_m0(
        &rat(1),
        &eps,
        &f,
        &invariant,
        DEFAULT_COMPOSITION_CAP,
        &family,
        DEFAULT_COMPOSITION_CAP,
    )
    .unwrap();
    check(
        8,
        &format!("x0 - 3x1: m0 = {:?}; x1: m0 = {:?} up to N = {}", a.m0, b.m0, b.depth),
        a.m0 == Some(1) && b.m0.is_none(),
        t,
        10,
    );
}

#[test]
fn criterion_09_ratio_experiment() {
    let t = Instant::now();
    let opts = RunOptions::default();
    let s = run_ratio_experiment(&ratio_config(r#"{"form": "x0 - 3*x1"}"#, r#"["inf", "3"]"#), &opts).unwrap();
    let r: Vec<f64> = s
        .rows
        .iter()
        .map(|row| ratio_f64(row.ratio.as_ref().unwrap()))
        .collect();
    let small = r[2..=8].iter().all(|&x| x < 1e-2);
    let decreasing = r[2..=8].windows(2).all(|w| w[1] < w[0]);

    let neg_cfg = ratio_config(r#"{"form": "x1"}"#, r#"["inf"]"#);
    let neg = run_ratio_experiment(&neg_cfg, &opts).unwrap();
    let exactly_one = neg
        .rows
        .iter()
        .all(|row| row.ratio.as_ref().and_then(|q| q.exact.clone()) == Some(rat(1)));
    let report = thm14_hypothesis_report(&neg_cfg, &opts).unwrap();
    let e_is_alpha = report.e_family.as_ref().and_then(|v| v.exact.clone()) == Some(rat(2))
        && report.alpha.as_ref().and_then(|v| v.exact.clone()) == Some(rat(2));
    let flagged = matches!(report.family_below_alpha, Clause::Fails) && !report.hypotheses_hold();
    check(
        9,
        &format!(
            "ratios n=2..8 {:?}: all < 1e-2 {small}, decreasing {decreasing}; control exactly 1 {exactly_one}, e_f = alpha flagged {}",
            r[2..=8].iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>(),
            e_is_alpha && flagged
        ),
        small && decreasing && exactly_one && e_is_alpha && flagged,
        t,
        30,
    );
}

/// Independent evaluation of `3 h(x) - sum_{p in {2,3,5}} lambda_p(x)` for
/// `D = {x=0} + {y=0} + {x=y}` at a primitive pair: negative iff the
/// `{2,3,5}`-part of `|ab(a-b)|` exceeds `max(|a|,|b|)^3`.
fn brute_force_negative(bound: i64) -> (usize, usize) {
    let mut points = 0;
    let mut negative = 0;
    for a in -bound..=bound {
        for b in -bound..=bound {
            let first = if a != 0 { a } else { b };
            if first <= 0 || a.gcd(&b) != 1 {
                continue;
            }
            points += 1;
            let mut v = (a * b * (a - b)).abs();
            if v == 0 {
                continue;
            }
            let mut s_part = 1i64;
            for p in [2, 3, 5] {
                while v % p == 0 {
                    v /= p;
                    s_part *= p;
                }
            }
            if s_part > a.abs().max(b.abs()).pow(3) {
                negative += 1;
            }
        }
    }
    (points, negative)
}

#[test]
fn criterion_10_gap_schmidt_regime() {
    let t = Instant::now();
    let cfg = ExperimentConfig::from_json(
        r#"{"map": {"forms": ["x0^2", "x1^2"]}, "seed": [2, 1],
            "divisor": {"hyperplanes": ["x0", "x1", "x0 - x1"]}, "S": ["2", "3", "5"],
            "N": 4, "eps_prime": 1, "sample": {"height_bound": 50}}"#,
    )
    .unwrap();
    let g = run_gap_experiment(&cfg, &RunOptions::default(), &rat(1)).unwrap();
    let sample = g.sample.as_ref().expect("hyperplane mode yields a sample");
    let (points, expected) = brute_force_negative(50);
    let evaluated = sample.rows.len() + sample.support_hits;
    let ok = evaluated == points && sample.negative.len() == expected && expected < sample.rows.len();
    check(
        10,
        &format!(
            "{evaluated} points of height <= 50, {} negative (brute force {expected}), closure {}",
            sample.negative.len(),
            sample.closure
        ),
        ok,
        t,
        60,
    );
}

#[test]
fn criterion_11_cn_calculator() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mismatches = 0;
    for _ in 0..20 {
        let len = rng.gen_range(1..=6);
        let ms: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=12)).collect();
        let dim = rng.gen_range(1..=4usize);
        let delta = Rational::new(rng.gen_range(1i64..=9).into(), rng.gen_range(1i64..=5).into());
        let m = rng.gen_range(1..=7u64);
        let n = rng.gen_range(1..=6u32);
        let (gamma, cn) = cn_calculator(&ms, dim, &delta, m, n).unwrap();
        let hand_gamma = rat((*ms.iter().max().unwrap() * (dim as u64 + 1)) as i64);
        let mut delta_n = rat(1);
        for _ in 0..n {
            delta_n *= &delta;
        }
        let hand_cn = (rat(ms.iter().sum::<u64>() as i64) - &hand_gamma) / (delta_n * rat(m as i64));
        if gamma != hand_gamma || cn != hand_cn {
            mismatches += 1;
        }
    }
    check(
        11,
        &format!("20 inputs, {mismatches} mismatches"),
        mismatches == 0,
        t,
        1,
    );
}

#[test]
fn criterion_12_determinism() {
    let t = Instant::now();
    let cfg = ratio_config(r#"{"form": "x0 - 3*x1"}"#, r#"["inf", "3"]"#);
    let a = ratio_csv(&run_ratio_experiment(&cfg, &RunOptions::default()).unwrap()).unwrap();
    let b = ratio_csv(&run_ratio_experiment(&cfg, &RunOptions::default()).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cached = RunOptions {
        depth: None,
        cache_dir: Some(dir.path().to_path_buf()),
    };
    let c = ratio_csv(&run_ratio_experiment(&cfg, &cached).unwrap()).unwrap();
    let d = ratio_csv(&run_ratio_experiment(&cfg, &cached).unwrap()).unwrap();
    let same = a == b && a == c && a == d;
    check(
        12,
        &format!("{} bytes, identical across 4 runs (2 cached): {same}", a.len()),
        same && !a.is_empty(),
        t,
        30,
    );
}
