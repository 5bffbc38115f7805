//! Dense univariate polynomials over a [`Scalar`] field.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exactnum::{rat, Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<C: Scalar> {
    /// Low to high; no trailing zeros.
    coeffs: Vec<C>,
    ctx: C::Ctx,
}

impl<C: Scalar> UniPoly<C> {
    pub fn new(mut coeffs: Vec<C>, ctx: C::Ctx) -> Self {
        while coeffs.last().is_some_and(|c| c.vanishes()) {
            coeffs.pop();
        }
        UniPoly { coeffs, ctx }
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> &C {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * C::from_rational(&self.ctx, rat(i as i64)))
            .collect();
        UniPoly::new(coeffs, self.ctx.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = C::zero(&self.ctx);
        let coeffs = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&z).clone() - other.coeffs.get(i).unwrap_or(&z).clone())
            .collect();
        UniPoly::new(coeffs, self.ctx.clone())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lead().inv().expect("nonzero leading coefficient");
        let coeffs = self.coeffs.iter().map(|c| c.clone() * inv.clone()).collect();
        UniPoly::new(coeffs, self.ctx.clone())
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let inv = divisor.lead().inv().expect("field coefficient");
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (UniPoly::new(vec![], self.ctx.clone()), self.clone());
        }
        let mut quot = vec![C::zero(&self.ctx); n - dd];
        for i in (dd..n).rev() {
            let c = rem[i].clone() * inv.clone();
            if c.vanishes() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = rem[i - dd + j].clone() - c.clone() * dc.clone();
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (
            UniPoly::new(quot, self.ctx.clone()),
            UniPoly::new(rem, self.ctx.clone()),
        )
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Multiplicities occurring in the squarefree decomposition (Yun's
    /// algorithm, characteristic zero). Empty for constants.
    pub fn squarefree_multiplicities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push(i);
            }
            let nb = b.div_rem(&a).0;
            let nc = d.div_rem(&a).0;
            d = nc.sub(&nb.derivative());
            b = nb;
            i += 1;
        }
        out
    }

    /// Largest multiplicity of an irreducible factor (0 for constants).
    pub fn max_multiplicity(&self) -> usize {
        self.squarefree_multiplicities().into_iter().max().unwrap_or(0)
    }
}

impl UniPoly<Rational> {
    pub fn from_ints(c: &[i64]) -> Self {
        UniPoly::new(c.iter().map(|&x| rat(x)).collect(), ())
    }

    fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(UniPoly::new(r.coeffs.into_iter().map(|c| -c).collect(), ()));
        }
        chain
    }

    fn sign_changes(chain: &[Self], x: &Rational) -> usize {
        let signs: Vec<i32> = chain
            .iter()
            .map(|p| {
                let v = p.eval(x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in `(lo, hi]`.
    pub fn count_roots(&self, lo: &Rational, hi: &Rational) -> usize {
        let chain = self.sturm_chain();
        Self::sign_changes(&chain, lo).saturating_sub(Self::sign_changes(&chain, hi))
    }

    /// Cauchy bound: every complex root has modulus `< bound`.
    pub fn root_bound(&self) -> Rational {
        let lead = self.lead().abs();
        let m = self
            .coeffs
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(|| rat(0));
        m + rat(1)
    }

    /// Enclosure `[lo, hi]` of the largest real root with `hi - lo <= width`,
    /// or `None` if there is no real root. Collapses to a point when the root
    /// is found exactly during bisection.
    pub fn largest_real_root(&self, width: &Rational) -> Option<(Rational, Rational)> {
        let chain = self.sturm_chain();
        let bound = self.root_bound();
        let mut lo = -bound.clone();
        let mut hi = bound;
        let total = Self::sign_changes(&chain, &lo).saturating_sub(Self::sign_changes(&chain, &hi));
        if total == 0 {
            return None;
        }
        let v_hi = Self::sign_changes(&chain, &hi);
        while &hi - &lo > *width {
            let mid = (&lo + &hi) / rat(2);
            if num_traits::Zero::is_zero(&self.eval(&mid)) && Self::sign_changes(&chain, &mid) == v_hi {
                return Some((mid.clone(), mid));
            }
            if Self::sign_changes(&chain, &mid) > v_hi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some((lo, hi))
    }

    /// Rational roots via the rational root theorem, when the coefficients are
    /// small enough to enumerate divisors.
    pub fn rational_roots(&self) -> Option<Vec<Rational>> {
        let deg = self.degree()?;
        // clear denominators, strip zero roots
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
            .collect();
        let shift = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
        let mut roots = Vec::new();
        if shift > 0 {
            roots.push(rat(0));
        }
        let ints = &ints[shift..];
        if ints.len() <= 1 || deg == 0 {
            return Some(roots);
        }
        let a0 = ints[0].abs().to_u64()?;
        let an = ints.last().unwrap().abs().to_u64()?;
        if a0 > 1 << 24 || an > 1 << 24 {
            return None;
        }
        let divisors = |n: u64| (1..=n).filter(move |d| n.is_multiple_of(*d));
        for p in divisors(a0) {
            for q in divisors(an) {
                for s in [1i64, -1] {
                    let r = Rational::new(BigInt::from(s) * BigInt::from(p), BigInt::from(q));
                    if !roots.contains(&r) && num_traits::Zero::is_zero(&self.eval(&r)) {
                        roots.push(r);
                    }
                }
            }
        }
        Some(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{QuadElem, QuadField};

    #[test]
    fn gcd_and_division() {
        let a = UniPoly::from_ints(&[-1, 0, 1]); // t^2 - 1
        let b = UniPoly::from_ints(&[1, 1]); // t + 1
        assert_eq!(a.gcd(&b), UniPoly::from_ints(&[1, 1]));
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, UniPoly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn squarefree() {
        // (t-1)^3 (t+2)
        let p = UniPoly::from_ints(&[-2, 5, -3, -1, 1]);
        assert_eq!(p.squarefree_multiplicities(), vec![1, 3]);
        assert_eq!(UniPoly::from_ints(&[-3, 0, 1]).max_multiplicity(), 1);
        assert_eq!(UniPoly::from_ints(&[5]).max_multiplicity(), 0);
    }

    #[test]
    fn squarefree_over_quadratic_field() {
        let f = QuadField::new(2).unwrap();
        let q = |a: i64, b: i64| QuadElem::new(f, rat(a), rat(b));
        // (t - sqrt2)^2 = t^2 - 2 sqrt2 t + 2
        let p = UniPoly::new(vec![q(2, 0), q(0, -2), q(1, 0)], f);
        assert_eq!(p.max_multiplicity(), 2);
        // t^2 - 2 is squarefree
        let p = UniPoly::new(vec![q(-2, 0), q(0, 0), q(1, 0)], f);
        assert_eq!(p.max_multiplicity(), 1);
    }

    #[test]
    fn sturm_and_roots() {
        let p = UniPoly::from_ints(&[-1, -1, 1]); // t^2 - t - 1
        assert_eq!(p.count_roots(&rat(-10), &rat(10)), 2);
        let (lo, hi) = p
            .largest_real_root(&Rational::new(1.into(), BigInt::from(1u64 << 40)))
            .unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(lo.to_f64().unwrap() <= phi + 1e-12 && hi.to_f64().unwrap() >= phi - 1e-12);
        let p = UniPoly::from_ints(&[4, -4, 1]); // (t-2)^2
        let (lo, hi) = p.largest_real_root(&Rational::new(1.into(), 1000.into())).unwrap();
        assert!(lo <= rat(2) && hi >= rat(2));
        assert!(UniPoly::from_ints(&[1, 0, 1]).largest_real_root(&rat(1)).is_none());
        let mut r = UniPoly::from_ints(&[6, -5, 1]).rational_roots().unwrap();
        r.sort();
        assert_eq!(r, vec![rat(2), rat(3)]);
    }
}
