use std::cmp::Ordering;
use std::fmt;

use num_traits::Signed;

use super::lp::{simplex_min, LpOutcome};
use crate::exactnum::{rat, Rational, Scalar};
use crate::polydyn::HomogPoly;
use crate::{Error, Result};

/// A monomial ideal, stored by its minimal generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    nvars: usize,
    gens: Vec<Vec<u32>>,
}

impl MonomialIdeal {
    pub fn new(nvars: usize, gens: Vec<Vec<u32>>) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::InvalidArgument("the zero ideal has no lct".into()));
        }
        if gens.iter().any(|g| g.len() != nvars) {
            return Err(Error::Shape(format!("generators must have {nvars} exponents")));
        }
        let divides = |a: &[u32], b: &[u32]| a.iter().zip(b).all(|(x, y)| x <= y);
        let mut sorted = gens;
        sorted.sort();
        sorted.dedup();
        let minimal: Vec<Vec<u32>> = sorted
            .iter()
            .filter(|g| !sorted.iter().any(|h| h != *g && divides(h, g)))
            .cloned()
            .collect();
        Ok(MonomialIdeal { nvars, gens: minimal })
    }

    pub fn principal(m: Vec<u32>) -> Self {
        let n = m.len();
        MonomialIdeal {
            nvars: n,
            gens: vec![m],
        }
    }

    /// Ideal generated by the monomials in the support of a polynomial.
    pub fn of_support<C: Scalar>(g: &HomogPoly<C>) -> Result<Self> {
        MonomialIdeal::new(g.nvars(), g.terms().map(|(e, _)| e.clone()).collect())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Vec<u32>] {
        &self.gens
    }

    pub fn is_unit(&self) -> bool {
        self.gens.iter().any(|g| g.iter().all(|&e| e == 0))
    }

    /// `ord_v(I) = min_g <v, g>`.
    pub fn ord(&self, v: &[u32]) -> u64 {
        self.gens
            .iter()
            .map(|g| g.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum())
            .min()
            .unwrap_or(0)
    }

    pub fn scaled(&self, k: u32) -> Self {
        MonomialIdeal {
            nvars: self.nvars,
            gens: self.gens.iter().map(|g| g.iter().map(|e| e * k).collect()).collect(),
        }
    }

    pub fn max_exponent(&self) -> u32 {
        self.gens.iter().flatten().copied().max().unwrap_or(0)
    }

    /// `I ⊆ J` for monomial ideals: every generator of `self` is divisible by one of `other`.
    pub fn is_contained_in(&self, other: &MonomialIdeal) -> bool {
        self.gens
            .iter()
            .all(|g| other.gens.iter().any(|h| h.iter().zip(g).all(|(a, b)| a <= b)))
    }

    /// Exact membership of a rational point in the Newton polyhedron.
    pub fn newton_contains(&self, p: &[Rational]) -> bool {
        let k = self.gens.len();
        let n = self.nvars;
        // variables: lambda_1..k, slack_1..n
        let mut a = Vec::with_capacity(n + 1);
        for i in 0..n {
            let mut row: Vec<Rational> = self.gens.iter().map(|g| rat(g[i] as i64)).collect();
            row.extend((0..n).map(|j| rat(i64::from(i == j))));
            a.push(row);
        }
        let mut sum: Vec<Rational> = vec![rat(1); k];
        sum.extend((0..n).map(|_| rat(0)));
        a.push(sum);
        let mut b = p.to_vec();
        b.push(rat(1));
        matches!(simplex_min(&a, &b, &vec![rat(0); k + n]), LpOutcome::Optimal { .. })
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self
            .gens
            .iter()
            .map(|g| {
                let parts: Vec<String> = g.iter().map(u32::to_string).collect();
                format!("[{}]", parts.join(","))
            })
            .collect();
        write!(f, "({})", gens.join(", "))
    }
}

/// A threshold value; `Infinite` is the unit-ideal sentinel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Threshold {
    Finite(Rational),
    Infinite,
}

impl Threshold {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Threshold::Finite(q) => Some(q),
            Threshold::Infinite => None,
        }
    }
}

impl PartialOrd for Threshold {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Threshold {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Threshold::Finite(a), Threshold::Finite(b)) => a.cmp(b),
            (Threshold::Finite(_), Threshold::Infinite) => Ordering::Less,
            (Threshold::Infinite, Threshold::Finite(_)) => Ordering::Greater,
            (Threshold::Infinite, Threshold::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(q) => write!(f, "{q}"),
            Threshold::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    HowaldLp,
    ValuationWitness,
    SncFormula,
    Interval,
    FamilyRestricted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LctResult {
    pub lb: Threshold,
    pub ub: Threshold,
    pub kind: CertificateKind,
    /// Optimal `(lambda, t)` of the Howald program.
    pub lp_vertex: Option<Vec<Rational>>,
    /// Minimising monomial valuation.
    pub valuation: Option<Vec<u32>>,
}

impl LctResult {
    fn exact(value: Threshold, kind: CertificateKind) -> Self {
        LctResult {
            lb: value.clone(),
            ub: value,
            kind,
            lp_vertex: None,
            valuation: None,
        }
    }

    /// The value when the bounds coincide.
    pub fn value(&self) -> Option<&Threshold> {
        (self.lb == self.ub).then_some(&self.lb)
    }

    pub fn is_exact(&self) -> bool {
        self.lb == self.ub
    }
}

/// `lct(I) = 1/t` with `t` minimal such that `t(1, .., 1)` lies in the Newton polyhedron.
pub fn lct_monomial(ideal: &MonomialIdeal) -> LctResult {
    if ideal.is_unit() {
        return LctResult::exact(Threshold::Infinite, CertificateKind::HowaldLp);
    }
    let k = ideal.gens.len();
    let n = ideal.nvars;
    // variables: lambda_1..k, t, slack_1..n
    let width = k + 1 + n;
    let mut a = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut row: Vec<Rational> = ideal.gens.iter().map(|g| rat(g[i] as i64)).collect();
        row.push(rat(-1));
        row.extend((0..n).map(|j| rat(i64::from(i == j))));
        a.push(row);
    }
    let mut sum = vec![rat(1); k];
    sum.extend((0..=n).map(|_| rat(0)));
    a.push(sum);
    let mut b = vec![rat(0); n];
    b.push(rat(1));
    let mut c = vec![rat(0); width];
    c[k] = rat(1);
    match simplex_min(&a, &b, &c) {
        LpOutcome::Optimal { x, value } => {
            debug_assert!(value.is_positive());
            let mut r = LctResult::exact(Threshold::Finite(value.recip()), CertificateKind::HowaldLp);
            r.lp_vertex = Some(x[..=k].to_vec());
            r
        }
        other => unreachable!("Howald program is feasible and bounded: {other:?}"),
    }
}

/// `min (sum v) / ord_v(I)` over nonzero `v in {0..B}^n`; an upper bound on lct.
pub fn lct_valuation_search(ideal: &MonomialIdeal, bound: u32) -> LctResult {
    let n = ideal.nvars;
    let mut best: Option<(Rational, Vec<u32>)> = None;
    let mut v = vec![0u32; n];
    'outer: loop {
        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                break 'outer;
            }
            if v[i] < bound {
                v[i] += 1;
                break;
            }
            v[i] = 0;
            i += 1;
        }
        let ord = ideal.ord(&v);
        if ord == 0 {
            continue;
        }
        let s: u64 = v.iter().map(|&x| x as u64).sum();
        let val = Rational::new(s.into(), ord.into());
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, v.clone()));
        }
    }
    match best {
        None => LctResult::exact(Threshold::Infinite, CertificateKind::ValuationWitness),
        Some((val, w)) => {
            let mut r = LctResult::exact(Threshold::Finite(val), CertificateKind::ValuationWitness);
            r.valuation = Some(w);
            r
        }
    }
}

/// lct of an SNC divisor `sum a_i D_i`: `min 1/a_i`.
pub fn lct_snc(coefficients: &[Rational]) -> Result<Rational> {
    if coefficients.is_empty() {
        return Err(Error::InvalidArgument("empty coefficient list".into()));
    }
    if let Some(a) = coefficients.iter().find(|a| !a.is_positive()) {
        return Err(Error::InvalidArgument(format!("coefficient {a} is not positive")));
    }
    Ok(coefficients.iter().map(Rational::recip).min().unwrap())
}

/// Family-restricted lower bound `1/M` for `M` the largest order seen in the family.
pub fn lct_lower_bound_canonical(max_ord: &Rational) -> Result<LctResult> {
    if *max_ord < rat(1) {
        return Err(Error::InvalidArgument(format!("maximal order {max_ord} must be >= 1")));
    }
    Ok(LctResult {
        lb: Threshold::Finite(max_ord.recip()),
        ub: Threshold::Infinite,
        kind: CertificateKind::FamilyRestricted,
        lp_vertex: None,
        valuation: None,
    })
}

/// Largest order of the monomial ideal along the generators' coordinate data:
/// the maximal exponent appearing in a minimal generator.
pub fn family_max_ord(ideal: &MonomialIdeal) -> Rational {
    rat(ideal.max_exponent() as i64)
}

/// Interval for the lct of a hypersurface `{G = 0}` in `P^n`:
/// `[1/M, min(valuation search, 1/(component multiplicity))]` where `M` bounds
/// the multiplicities seen at the chart origins and along components.
pub fn lct_form_interval<C: Scalar>(g: &HomogPoly<C>, bound: u32, component_multiplicity: usize) -> Result<LctResult> {
    if g.is_zero() {
        return Err(Error::InvalidArgument("the zero form".into()));
    }
    let n = g.nvars();
    let mut ub = Threshold::Finite(rat(1) / rat(component_multiplicity.max(1) as i64));
    let mut witness = None;
    let mut max_mult = component_multiplicity.max(1) as u64;
    for chart in 0..n {
        // affine exponents on the chart x_chart = 1
        let gens: Vec<Vec<u32>> = g
            .terms()
            .map(|(e, _)| {
                e.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != chart)
                    .map(|(_, &a)| a)
                    .collect()
            })
            .collect();
        let ideal = MonomialIdeal::new(n - 1, gens)?;
        if ideal.is_unit() {
            continue;
        }
        max_mult = max_mult.max(ideal.ord(&vec![1; n - 1]));
        let r = lct_valuation_search(&ideal, bound);
        if r.ub < ub {
            ub = r.ub.clone();
            witness = r.valuation.map(|mut v| {
                v.insert(chart, 0);
                v
            });
        }
    }
    let is_monomial = g.num_terms() == 1;
    if is_monomial {
        let e = g.terms().next().unwrap().0.clone();
        let max = *e.iter().max().unwrap();
        let v = if max == 0 {
            Threshold::Infinite
        } else {
            Threshold::Finite(rat(1) / rat(max as i64))
        };
        return Ok(LctResult::exact(v, CertificateKind::SncFormula));
    }
    Ok(LctResult {
        lb: Threshold::Finite(rat(1) / rat(max_mult as i64)),
        ub,
        kind: CertificateKind::Interval,
        lp_vertex: None,
        valuation: witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(n: usize, g: &[&[u32]]) -> MonomialIdeal {
        MonomialIdeal::new(n, g.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    fn q(a: i64, b: i64) -> Threshold {
        Threshold::Finite(Rational::new(a.into(), b.into()))
    }

    #[test]
    fn howald_examples() {
        assert_eq!(lct_monomial(&ideal(1, &[&[1]])).value(), Some(&q(1, 1)));
        assert_eq!(lct_monomial(&ideal(2, &[&[2, 0], &[0, 3]])).value(), Some(&q(5, 6)));
        assert_eq!(
            lct_monomial(&MonomialIdeal::principal(vec![3, 2])).value(),
            Some(&q(1, 3))
        );
        assert_eq!(
            lct_monomial(&ideal(2, &[&[0, 0], &[1, 1]])).value(),
            Some(&Threshold::Infinite)
        );
    }

    #[test]
    fn cusp_against_grid_membership() {
        // largest c = a/b, b <= 12, with (1,1) in c * Newt, i.e. (1/c, 1/c) in Newt
        let i = ideal(2, &[&[2, 0], &[0, 3]]);
        let mut best = rat(0);
        for b in 1..=12i64 {
            for a in 1..=2 * b {
                let c = Rational::new(a.into(), b.into());
                if i.newton_contains(&[c.recip(), c.recip()]) && c > best {
                    best = c;
                }
            }
        }
        assert_eq!(best, rat(5) / rat(6));
    }

    #[test]
    fn valuation_examples() {
        let r = lct_valuation_search(&ideal(2, &[&[2, 0], &[0, 3]]), 3);
        assert_eq!(r.value(), Some(&q(5, 6)));
        assert_eq!(r.valuation, Some(vec![3, 2]));
        assert_eq!(lct_valuation_search(&ideal(1, &[&[1]]), 1).value(), Some(&q(1, 1)));
        assert_eq!(lct_valuation_search(&ideal(2, &[&[1, 1]]), 2).value(), Some(&q(1, 1)));
    }

    #[test]
    fn snc_and_family_bounds() {
        assert_eq!(lct_snc(&[rat(1), rat(1), rat(1)]).unwrap(), rat(1));
        assert_eq!(lct_snc(&[rat(2), rat(3)]).unwrap(), rat(1) / rat(3));
        assert_eq!(lct_snc(&[rat(1) / rat(2)]).unwrap(), rat(2));
        assert!(lct_snc(&[rat(0)]).is_err());
        assert_eq!(lct_lower_bound_canonical(&rat(1)).unwrap().lb, q(1, 1));
        assert_eq!(lct_lower_bound_canonical(&rat(4)).unwrap().lb, q(1, 4));
        let cusp = ideal(2, &[&[2, 0], &[0, 3]]);
        let lb = lct_lower_bound_canonical(&family_max_ord(&cusp)).unwrap().lb;
        assert_eq!(lb, q(1, 3));
        assert!(lb <= lct_monomial(&cusp).lb);
    }

    #[test]
    fn minimal_generators() {
        let i = ideal(2, &[&[2, 0], &[3, 1], &[0, 3], &[2, 0]]);
        assert_eq!(i.generators(), &[vec![0, 3], vec![2, 0]]);
    }

    #[test]
    fn form_intervals() {
        let cusp = HomogPoly::parse("x1^2*x2 - x0^3", 3).unwrap();
        let r = lct_form_interval(&cusp, 4, 1).unwrap();
        assert_eq!(r.kind, CertificateKind::Interval);
        assert_eq!(r.ub, q(5, 6));
        assert!(r.lb <= r.ub);
        let mono = HomogPoly::parse("x0^3*x1", 2).unwrap();
        assert_eq!(lct_form_interval(&mono, 3, 3).unwrap().value(), Some(&q(1, 3)));
    }
}
