use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::univariate::UniPoly;
use crate::exactnum::{format_rational, parse_rational, rat, QuadElem, QuadField, Rational, Scalar};
use crate::{Error, Result};

/// Sparse homogeneous polynomial in `nvars` variables.
///
/// Every stored exponent vector sums to `degree` and no zero coefficient is
/// stored; the zero polynomial has no terms (but still a nominal degree).
#[derive(Clone, Debug, PartialEq)]
pub struct HomogPoly<C: Scalar> {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Vec<u32>, C>,
    ctx: C::Ctx,
}

impl<C: Scalar> HomogPoly<C> {
    pub fn zero(nvars: usize, degree: u32, ctx: C::Ctx) -> Self {
        HomogPoly {
            nvars,
            degree,
            terms: BTreeMap::new(),
            ctx,
        }
    }

    /// Builds a polynomial from terms; repeated exponents are summed.
    pub fn from_terms(nvars: usize, ctx: C::Ctx, terms: impl IntoIterator<Item = (Vec<u32>, C)>) -> Result<Self> {
        let mut degree = None;
        let mut map: BTreeMap<Vec<u32>, C> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Shape(format!(
                    "exponent {e:?} has {} entries, expected {nvars}",
                    e.len()
                )));
            }
            let d: u32 = e.iter().sum();
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => return Err(Error::Shape(format!("not homogeneous: degrees {d0} and {d}"))),
                _ => {}
            }
            let slot = map.remove(&e);
            let c = match slot {
                Some(old) => old + c,
                None => c,
            };
            if !c.vanishes() {
                map.insert(e, c);
            }
        }
        Ok(HomogPoly {
            nvars,
            degree: degree.unwrap_or(0),
            terms: map,
            ctx,
        })
    }

    pub fn monomial(exponent: Vec<u32>, coeff: C, ctx: C::Ctx) -> Self {
        let nvars = exponent.len();
        let degree = exponent.iter().sum();
        let mut terms = BTreeMap::new();
        if !coeff.vanishes() {
            terms.insert(exponent, coeff);
        }
        HomogPoly {
            nvars,
            degree,
            terms,
            ctx,
        }
    }

    pub fn var(nvars: usize, i: usize, ctx: C::Ctx) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let one = C::one(&ctx);
        Self::monomial(e, one, ctx)
    }

    pub fn constant(nvars: usize, c: C, ctx: C::Ctx) -> Self {
        Self::monomial(vec![0; nvars], c, ctx)
    }

    /// All monomials of the given degree in `nvars` variables, in lexicographic order.
    pub fn all_monomials(nvars: usize, degree: u32, ctx: C::Ctx) -> Vec<Self> {
        exponents_of_degree(nvars, degree)
            .into_iter()
            .map(|e| Self::monomial(e, C::one(&ctx), ctx.clone()))
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponent: &[u32]) -> C {
        self.terms.get(exponent).cloned().unwrap_or_else(|| C::zero(&self.ctx))
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Shape(format!(
                "variable count mismatch: {} vs {}",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(Error::Shape(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let v = match terms.remove(e) {
                Some(old) => old + c.clone(),
                None => c.clone(),
            };
            if !v.vanishes() {
                terms.insert(e.clone(), v);
            }
        }
        Ok(HomogPoly { terms, ..self.clone() })
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect();
        HomogPoly { terms, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.vanishes() {
            return Self::zero(self.nvars, self.degree, self.ctx.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.clone() * k.clone()))
            .collect();
        HomogPoly { terms, ..self.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let degree = self.degree + other.degree;
        let mut terms: BTreeMap<Vec<u32>, C> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let c = c1.clone() * c2.clone();
                let v = match terms.remove(&e) {
                    Some(old) => old + c,
                    None => c,
                };
                if !v.vanishes() {
                    terms.insert(e, v);
                }
            }
        }
        Ok(HomogPoly {
            nvars: self.nvars,
            degree,
            terms,
            ctx: self.ctx.clone(),
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, C::one(&self.ctx), self.ctx.clone());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same shape");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same shape");
            }
        }
        acc
    }

    /// `G(forms_0, ..., forms_n)`; all forms must share one degree.
    pub fn compose(&self, forms: &[HomogPoly<C>]) -> Result<Self> {
        if forms.len() != self.nvars {
            return Err(Error::Shape(format!(
                "substituting {} forms into a polynomial in {} variables",
                forms.len(),
                self.nvars
            )));
        }
        let target_nvars = forms.first().map(HomogPoly::nvars).unwrap_or(0);
        let inner_deg = forms.first().map(HomogPoly::degree).unwrap_or(0);
        if forms.iter().any(|f| f.nvars != target_nvars || f.degree != inner_deg) {
            return Err(Error::Shape("substituted forms must share nvars and degree".into()));
        }
        let mut powers: Vec<Vec<HomogPoly<C>>> = Vec::with_capacity(forms.len());
        for (i, f) in forms.iter().enumerate() {
            let top = self.terms.keys().map(|e| e[i]).max().unwrap_or(0);
            let mut ps = vec![HomogPoly::constant(target_nvars, C::one(&self.ctx), self.ctx.clone())];
            for k in 1..=top as usize {
                let next = ps[k - 1].mul(f)?;
                ps.push(next);
            }
            powers.push(ps);
        }
        let mut out = HomogPoly::zero(target_nvars, self.degree * inner_deg, self.ctx.clone());
        for (e, c) in &self.terms {
            let mut t = HomogPoly::constant(target_nvars, c.clone(), self.ctx.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&powers[i][k as usize])?;
                }
            }
            out = out.add(&t)?;
        }
        out.degree = self.degree * inner_deg;
        Ok(out)
    }

    /// Evaluation at a point with coordinates in `Q`.
    pub fn eval_rational(&self, x: &[Rational]) -> C {
        let mut acc = C::zero(&self.ctx);
        for (e, c) in &self.terms {
            let mut m = rat(1);
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    m *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc = acc + c.clone() * C::from_rational(&self.ctx, m);
        }
        acc
    }

    /// Evaluation at a point with coordinates in the coefficient ring.
    pub fn eval(&self, x: &[C]) -> C {
        let mut acc = C::zero(&self.ctx);
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    m = m * xi.clone();
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Largest `k` such that `x_i^k` divides the polynomial (`None` for zero).
    pub fn ord_var(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).min()
    }

    pub fn map_coeffs<D: Scalar>(&self, ctx: D::Ctx, f: impl Fn(&C) -> D) -> HomogPoly<D> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), f(c)))
            .filter(|(_, c)| !c.vanishes())
            .collect();
        HomogPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms,
            ctx,
        }
    }

    /// Coefficientwise Galois conjugate.
    pub fn conjugate(&self) -> Self {
        self.map_coeffs(self.ctx.clone(), |c| c.conj())
    }

    /// `G(t, 1)` for a binary form, as a univariate polynomial in `t`.
    pub fn dehomogenize_binary(&self) -> Result<UniPoly<C>> {
        if self.nvars != 2 {
            return Err(Error::Shape("dehomogenize_binary needs a binary form".into()));
        }
        let mut coeffs = vec![C::zero(&self.ctx); self.degree as usize + 1];
        for (e, c) in &self.terms {
            coeffs[e[0] as usize] = c.clone();
        }
        Ok(UniPoly::new(coeffs, self.ctx.clone()))
    }

    /// Restriction to the line `s*p + t*q`, as a binary form in `(s, t)`.
    pub fn restrict_to_line(&self, p: &[Rational], q: &[Rational]) -> Result<Self> {
        let lines: Vec<HomogPoly<C>> = p
            .iter()
            .zip(q)
            .map(|(a, b)| {
                HomogPoly::from_terms(
                    2,
                    self.ctx.clone(),
                    vec![
                        (vec![1, 0], C::from_rational(&self.ctx, a.clone())),
                        (vec![0, 1], C::from_rational(&self.ctx, b.clone())),
                    ],
                )
                .map(|mut l| {
                    l.degree = 1;
                    l
                })
            })
            .collect::<Result<_>>()?;
        self.compose(&lines)
    }
}

impl HomogPoly<Rational> {
    /// Lifts a form over `Q` to the quadratic field.
    pub fn to_quadratic(&self, field: QuadField) -> HomogPoly<QuadElem> {
        self.map_coeffs(field, |c| QuadElem::from_rational(field, c.clone()))
    }

    /// Common denominator of the coefficients.
    pub fn coefficient_denominator(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()))
    }

    /// Parses expressions such as `x0^2 - 3*x1^2 + 1/2*x0*x1` (variables
    /// `x0..`, or `x, y, z, w` for the first four). The zero polynomial needs
    /// an explicit degree and is not accepted here.
    pub fn parse(s: &str, nvars: usize) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("cannot parse polynomial {s:?}: {m}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut terms = Vec::new();
        let mut chunks = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') && !cur.ends_with('*') {
                chunks.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        chunks.push(cur);
        for chunk in chunks {
            let (sign, body) = match chunk.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, chunk.strip_prefix('+').unwrap_or(&chunk)),
            };
            let mut coeff = rat(sign);
            let mut e = vec![0u32; nvars];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor"));
                }
                let (base, pow) = match factor.split_once('^') {
                    Some((b, p)) => (b, p.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                    None => (factor, 1),
                };
                if let Some(idx) = var_index(base) {
                    if idx >= nvars {
                        return Err(bad("variable index out of range"));
                    }
                    e[idx] += pow;
                } else {
                    let c = parse_rational(base).map_err(|_| bad("bad coefficient"))?;
                    coeff *= num_traits::pow(c, pow as usize);
                }
            }
            terms.push((e, coeff));
        }
        let p = HomogPoly::from_terms(nvars, (), terms)?;
        if p.is_zero() {
            return Err(bad("polynomial is zero"));
        }
        Ok(p)
    }
}

fn var_index(s: &str) -> Option<usize> {
    match s {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        "w" => Some(3),
        _ => s.strip_prefix('x').and_then(|d| d.parse().ok()),
    }
}

/// All exponent vectors of length `nvars` summing to `degree`, lexicographically decreasing.
pub fn exponents_of_degree(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if nvars == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=degree).rev() {
            prefix.push(k);
            rec(nvars - 1, degree - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars > 0 {
        rec(nvars, degree, &mut Vec::new(), &mut out);
    }
    out
}

fn fmt_monomial(e: &[u32]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { format!("x{i}") } else { format!("x{i}^{k}") })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for HomogPoly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono = fmt_monomial(e);
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{}", format_rational(&mag))?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{}*{mono}", format_rational(&mag))?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for HomogPoly<QuadElem> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono = fmt_monomial(e);
                if mono.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{mono}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
