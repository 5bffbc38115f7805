//! `LogMag`: the value type of every local Weil function and height.
//!
//! A value is either an exact `ln(m) / r` for a positive rational `m` and a
//! positive integer `r`, or a certified real `mid +- err` stored in binary
//! fixed point with [`FRAC_BITS`] fractional bits.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{rat, Rational};
use crate::{Error, Result};

/// Fractional bits of [`Certified`] values; the error of a freshly computed
/// logarithm is a few hundred units of `2^-FRAC_BITS`, far below `1e-30`.
pub const FRAC_BITS: u32 = 320;
const GUARD: u32 = 32;
const WORK: u32 = FRAC_BITS + GUARD;
/// Exponentiation budget (in bits) for exact comparisons and ratio detection.
const POW_BUDGET: u64 = 1 << 23;

/// Exact value `ln(arg) / root`.
#[derive(Clone, Debug)]
pub struct ExactLog {
    arg: Rational,
    root: u64,
}

/// Certified value: the true value lies in `[mid - err, mid + err] * 2^-FRAC_BITS`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certified {
    mid: BigInt,
    err: BigUint,
}

#[derive(Clone, Debug)]
pub enum LogMag {
    Exact(ExactLog),
    Certified(Certified),
}

/// Quotient of two logarithmic magnitudes: exact when it could be proved
/// rational, always with a floating approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct Ratio {
    pub exact: Option<Rational>,
    pub approx: f64,
}

fn bits_of(q: &Rational) -> u64 {
    q.numer().bits().max(q.denom().bits())
}

fn pow_rational(q: &Rational, e: u64) -> Rational {
    let e = e as u32;
    Rational::new_raw(q.numer().pow(e), q.denom().pow(e))
}

fn perfect_root(n: &BigUint, k: u32) -> Option<BigUint> {
    let r = n.nth_root(k);
    (r.pow(k) == *n).then_some(r)
}

fn small_prime_factors(mut n: u64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p as u32);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n as u32);
    }
    out
}

impl ExactLog {
    pub fn new(arg: Rational, root: u64) -> Result<Self> {
        if !arg.is_positive() || root == 0 {
            return Err(Error::ZeroInput);
        }
        Ok(ExactLog { arg, root }.normalized())
    }

    pub fn zero() -> Self {
        ExactLog { arg: rat(1), root: 1 }
    }

    pub fn arg(&self) -> &Rational {
        &self.arg
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    fn normalized(mut self) -> Self {
        if self.arg.is_one() {
            self.root = 1;
            return self;
        }
        if self.root == 1 || bits_of(&self.arg) > 1 << 16 || self.root > u32::MAX as u64 {
            return self;
        }
        for q in small_prime_factors(self.root) {
            while self.root.is_multiple_of(q as u64) {
                let num = perfect_root(self.arg.numer().magnitude(), q);
                let den = perfect_root(self.arg.denom().magnitude(), q);
                match (num, den) {
                    (Some(n), Some(d)) => {
                        self.arg = Rational::new_raw(BigInt::from(n), BigInt::from(d));
                        self.root /= q as u64;
                    }
                    _ => break,
                }
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.arg.is_one()
    }

    pub fn signum(&self) -> Ordering {
        self.arg.cmp(&rat(1))
    }

    fn add(&self, other: &ExactLog) -> ExactLog {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let root = self.root.lcm(&other.root);
        let a = pow_rational(&self.arg, root / self.root);
        let b = pow_rational(&other.arg, root / other.root);
        ExactLog { arg: a * b, root }.normalized()
    }

    fn neg(&self) -> ExactLog {
        ExactLog {
            arg: num_traits::Inv::inv(self.arg.clone()),
            root: self.root,
        }
    }

    fn scale(&self, q: &Rational) -> ExactLog {
        if q.is_zero() || self.is_zero() {
            return ExactLog::zero();
        }
        let p = q.numer().magnitude().to_u64().expect("scale numerator too large");
        let s = q.denom().to_u64().expect("scale denominator too large");
        let mut arg = pow_rational(&self.arg, p);
        if q.is_negative() {
            arg = num_traits::Inv::inv(arg);
        }
        ExactLog {
            arg,
            root: self.root * s,
        }
        .normalized()
    }

    /// Exact comparison of the two real values.
    fn cmp_exact(&self, other: &ExactLog) -> Ordering {
        if self.root == other.root {
            return self.arg.cmp(&other.arg);
        }
        let a = pow_rational(&self.arg, other.root);
        let b = pow_rational(&other.arg, self.root);
        a.cmp(&b)
    }

    pub fn enclose(&self) -> Certified {
        if self.is_zero() {
            return Certified::zero();
        }
        ln_rational(&self.arg).div_int(self.root)
    }
}

impl Certified {
    pub fn zero() -> Self {
        Certified {
            mid: BigInt::zero(),
            err: BigUint::zero(),
        }
    }

    pub fn from_parts(mid: BigInt, err_ulps: BigUint) -> Self {
        Certified { mid, err: err_ulps }
    }

    pub fn mid_ulps(&self) -> &BigInt {
        &self.mid
    }

    pub fn err_ulps(&self) -> &BigUint {
        &self.err
    }

    pub fn mid_f64(&self) -> f64 {
        fixed_to_f64(&self.mid)
    }

    pub fn err_f64(&self) -> f64 {
        fixed_to_f64(&BigInt::from(self.err.clone()))
    }

    fn add(&self, other: &Certified) -> Certified {
        Certified {
            mid: &self.mid + &other.mid,
            err: &self.err + &other.err,
        }
    }

    fn neg(&self) -> Certified {
        Certified {
            mid: -&self.mid,
            err: self.err.clone(),
        }
    }

    fn div_int(&self, k: u64) -> Certified {
        if k == 1 {
            return self.clone();
        }
        let kb = BigInt::from(k);
        Certified {
            mid: self.mid.div_floor(&kb),
            err: self.err.div_ceil(&BigUint::from(k)) + 1u32,
        }
    }

    fn scale(&self, q: &Rational) -> Certified {
        let p = q.numer();
        let s = q.denom();
        let mid = (&self.mid * p).div_floor(s);
        let err = (&self.err * p.magnitude()).div_ceil(s.magnitude()) + 1u32;
        Certified { mid, err }
    }

    fn lo(&self) -> BigInt {
        &self.mid - BigInt::from(self.err.clone())
    }

    fn hi(&self) -> BigInt {
        &self.mid + BigInt::from(self.err.clone())
    }

    fn from_bounds(lo: BigInt, hi: BigInt) -> Certified {
        let sum = &lo + &hi;
        let mid = sum.div_floor(&BigInt::from(2));
        let err = (&hi - &mid).max(&mid - &lo);
        Certified {
            mid,
            err: err.magnitude().clone(),
        }
    }

    /// Sign of the value if the enclosure excludes zero (or is exactly zero).
    pub fn signum(&self) -> Option<Ordering> {
        if self.err.is_zero() && self.mid.is_zero() {
            return Some(Ordering::Equal);
        }
        if self.mid.magnitude() > &self.err {
            Some(if self.mid.is_positive() {
                Ordering::Greater
            } else {
                Ordering::Less
            })
        } else {
            None
        }
    }
}

fn fixed_to_f64(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        v.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(FRAC_BITS as i32))
    } else {
        let shift = bits - 900;
        (v >> shift).to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32 - FRAC_BITS as i32)
    }
}

/// `2 atanh(z / 2^WORK)` for `0 <= z < 2^WORK / 3`, with error in units of `2^-WORK`.
fn two_atanh(z: &BigUint) -> (BigUint, u64) {
    let z2 = (z * z) >> WORK;
    let mut power = z.clone();
    let mut sum = BigUint::zero();
    let mut j = 0u64;
    loop {
        let term = &power / (2 * j + 1);
        if term.is_zero() {
            break;
        }
        sum += term;
        power = (&power * &z2) >> WORK;
        j += 1;
    }
    (sum << 1u32, 8 * (j + 2) + 3)
}

fn ln2_work() -> &'static (BigUint, u64) {
    static LN2: OnceLock<(BigUint, u64)> = OnceLock::new();
    LN2.get_or_init(|| two_atanh(&((BigUint::one() << WORK) / 3u32)))
}

/// `ln(n)` at working precision, error in units of `2^-WORK`.
fn ln_biguint_work(n: &BigUint) -> (BigInt, BigUint) {
    assert!(!n.is_zero());
    if n.is_one() {
        return (BigInt::zero(), BigUint::zero());
    }
    let k = n.bits() - 1;
    let one = BigUint::one() << WORK;
    let m = if k >= WORK as u64 {
        n >> (k - WORK as u64)
    } else {
        n << (WORK as u64 - k)
    };
    let num = &m - &one;
    let den = &m + &one;
    let z = (num << WORK) / den;
    let (lnm, err_m) = two_atanh(&z);
    let (ln2, err2) = ln2_work();
    let mid = BigInt::from(lnm) + BigInt::from(ln2 * k);
    let err = BigUint::from(err_m + 2) + BigUint::from(*err2) * k;
    (mid, err)
}

fn work_to_certified(mid: BigInt, err: BigUint) -> Certified {
    let mid_f = mid >> GUARD;
    let err_f = (err >> GUARD) + 2u32;
    Certified { mid: mid_f, err: err_f }
}

/// Certified natural logarithm of a positive rational.
pub fn ln_rational(q: &Rational) -> Certified {
    assert!(q.is_positive(), "ln of non-positive rational");
    let (a, ea) = ln_biguint_work(q.numer().magnitude());
    let (b, eb) = ln_biguint_work(q.denom().magnitude());
    work_to_certified(a - b, ea + eb)
}

/// Certified `ln(t / 2^WORK_in)` for an integer approximation `t >= 2^work_in`
/// that is within `slack` units of the true value from below or above.
pub(crate) fn ln_fixed_point(t: &BigUint, work_in: u32, slack: u32) -> Certified {
    let (a, ea) = ln_biguint_work(t);
    let (ln2, e2) = ln2_work();
    let mid = a - BigInt::from(ln2 * work_in);
    // d ln(t) <= slack / t <= slack * 2^-work_in
    let rel = if work_in >= WORK {
        BigUint::from(slack) + 1u32
    } else {
        BigUint::from(slack) << (WORK - work_in)
    };
    let err = ea + BigUint::from(*e2) * work_in + rel;
    work_to_certified(mid, err)
}

impl LogMag {
    pub fn zero() -> Self {
        LogMag::Exact(ExactLog::zero())
    }

    /// `ln(m)` for a positive rational `m`.
    pub fn ln(m: Rational) -> Result<Self> {
        Ok(LogMag::Exact(ExactLog::new(m, 1)?))
    }

    /// `ln(m) / root`.
    pub fn ln_root(m: Rational, root: u64) -> Result<Self> {
        Ok(LogMag::Exact(ExactLog::new(m, root)?))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, LogMag::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&ExactLog> {
        match self {
            LogMag::Exact(e) => Some(e),
            LogMag::Certified(_) => None,
        }
    }

    pub fn enclose(&self) -> Certified {
        match self {
            LogMag::Exact(e) => e.enclose(),
            LogMag::Certified(c) => c.clone(),
        }
    }

    /// Absolute error bound (0 for exact values).
    pub fn err_bound(&self) -> f64 {
        match self {
            LogMag::Exact(_) => 0.0,
            LogMag::Certified(c) => c.err_f64(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose().mid_f64()
    }

    pub fn add(&self, other: &LogMag) -> LogMag {
        match (self, other) {
            (LogMag::Exact(a), LogMag::Exact(b)) => LogMag::Exact(a.add(b)),
            _ => LogMag::Certified(self.enclose().add(&other.enclose())),
        }
    }

    pub fn neg(&self) -> LogMag {
        match self {
            LogMag::Exact(a) => LogMag::Exact(a.neg()),
            LogMag::Certified(c) => LogMag::Certified(c.neg()),
        }
    }

    pub fn sub(&self, other: &LogMag) -> LogMag {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &Rational) -> LogMag {
        match self {
            LogMag::Exact(a) => LogMag::Exact(a.scale(q)),
            LogMag::Certified(c) => LogMag::Certified(c.scale(q)),
        }
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a LogMag>) -> LogMag {
        items.into_iter().fold(LogMag::zero(), |acc, x| acc.add(x))
    }

    /// Sign, when decidable.
    pub fn signum(&self) -> Option<Ordering> {
        match self {
            LogMag::Exact(e) => Some(e.signum()),
            LogMag::Certified(c) => c.signum(),
        }
    }

    /// Comparison; `None` when certified enclosures overlap.
    pub fn cmp_value(&self, other: &LogMag) -> Option<Ordering> {
        if let (LogMag::Exact(a), LogMag::Exact(b)) = (self, other) {
            let diff = a.enclose().add(&b.enclose().neg());
            if let Some(o) = diff.signum().filter(|o| *o != Ordering::Equal) {
                return Some(o);
            }
            return Some(a.cmp_exact(b));
        }
        self.sub(other).signum()
    }

    /// Exact equality for two exact values, `None` otherwise.
    pub fn exact_eq(&self, other: &LogMag) -> Option<bool> {
        match (self, other) {
            (LogMag::Exact(a), LogMag::Exact(b)) => Some(a.cmp_exact(b) == Ordering::Equal),
            _ => None,
        }
    }

    /// `|self - other| <= tol` decided from the enclosures.
    pub fn within(&self, other: &LogMag, tol: f64) -> bool {
        let diff = self.sub(other).enclose();
        diff.mid_f64().abs() + diff.err_f64() <= tol
    }

    pub fn max(&self, other: &LogMag) -> LogMag {
        match self.cmp_value(other) {
            Some(Ordering::Less) => other.clone(),
            Some(_) => self.clone(),
            None => {
                let (a, b) = (self.enclose(), other.enclose());
                LogMag::Certified(Certified::from_bounds(a.lo().max(b.lo()), a.hi().max(b.hi())))
            }
        }
    }

    pub fn min(&self, other: &LogMag) -> LogMag {
        self.neg().max(&other.neg()).neg()
    }

    /// `self / other`, proved rational when possible.
    pub fn ratio(&self, other: &LogMag) -> Ratio {
        let approx = self.to_f64() / other.to_f64();
        let exact = match (self, other) {
            (LogMag::Exact(a), LogMag::Exact(b)) if !b.is_zero() => exact_ratio(a, b, approx),
            _ => None,
        };
        Ratio { exact, approx }
    }

    /// Decimal rendering with `digits` fractional digits (round half away from zero).
    pub fn to_decimal(&self, digits: u32) -> String {
        let c = self.enclose();
        let scale = BigInt::from(10u32).pow(digits);
        let num = c.mid.abs() * scale;
        let half = BigInt::one() << (FRAC_BITS - 1);
        let rounded: BigInt = (num + half) >> FRAC_BITS;
        let negative = c.mid.is_negative() && !rounded.is_zero();
        let s = rounded.to_string();
        let s = if s.len() <= digits as usize {
            format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits as usize);
        let sign = if negative { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

fn exact_ratio(a: &ExactLog, b: &ExactLog, approx: f64) -> Option<Rational> {
    if a.is_zero() {
        return Some(rat(0));
    }
    if !approx.is_finite() {
        return None;
    }
    // value(a)/value(b) = (rb / ra) * ln(A)/ln(B); search p/q ~ ln A / ln B.
    let target = approx * a.root as f64 / b.root as f64;
    for (p, q) in convergents(target, 64) {
        if ((p as f64 / q as f64) - target).abs() > 1e-9 * (1.0 + target.abs()) {
            continue;
        }
        let pa = p.unsigned_abs();
        if bits_of(&a.arg) * q > POW_BUDGET || bits_of(&b.arg) * pa > POW_BUDGET {
            return None;
        }
        // A^q == B^p
        let lhs = pow_rational(&a.arg, q);
        let mut rhs = pow_rational(&b.arg, pa);
        if p < 0 {
            rhs = num_traits::Inv::inv(rhs);
        }
        if lhs == rhs {
            return Some(Rational::new(
                BigInt::from(p) * BigInt::from(b.root),
                BigInt::from(q) * BigInt::from(a.root),
            ));
        }
        return None;
    }
    None
}

fn convergents(x: f64, max_den: u64) -> Vec<(i64, u64)> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1).and_then(|t| t.checked_add(h0));
        let k2 = a.checked_mul(k1).and_then(|t| t.checked_add(k0));
        let (Some(h2), Some(k2)) = (h2, k2) else { break };
        if k2 as u64 > max_den {
            break;
        }
        out.push((h2, k2 as u64));
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    out
}

impl fmt::Display for LogMag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(12))
    }
}

impl PartialEq for LogMag {
    /// Exact values compare exactly; anything certified compares by enclosure overlap.
    fn eq(&self, other: &Self) -> bool {
        match self.exact_eq(other) {
            Some(b) => b,
            None => self.cmp_value(other).is_none_or(|o| o == Ordering::Equal),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn ln_matches_f64() {
        for (n, d) in [(2, 1), (3, 1), (1, 7), (16, 13), (1_000_003, 17), (5, 4)] {
            let c = ln_rational(&q(n, d));
            let expect = (n as f64 / d as f64).ln();
            assert!((c.mid_f64() - expect).abs() < 1e-14, "{n}/{d}");
            assert!(c.err_f64() < 1e-80);
        }
    }

    #[test]
    fn ln2_high_precision() {
        // ln 2 = 0.693147180559945309417232121458176568075500134360255254120680...
        let s = LogMag::ln(rat(2)).unwrap().to_decimal(60);
        assert_eq!(s, "0.693147180559945309417232121458176568075500134360255254120680");
    }

    #[test]
    fn huge_argument() {
        let big = Rational::from_integer(BigInt::one() << 100_000u32);
        let v = LogMag::ln(big).unwrap();
        let expect = 100_000.0 * std::f64::consts::LN_2;
        assert!((v.to_f64() - expect).abs() < 1e-9);
    }

    #[test]
    fn exact_arithmetic() {
        let l2 = LogMag::ln(rat(2)).unwrap();
        let l3 = LogMag::ln(rat(3)).unwrap();
        let l6 = LogMag::ln(rat(6)).unwrap();
        assert_eq!(l2.add(&l3).exact_eq(&l6), Some(true));
        let half = l2.scale(&q(1, 2));
        assert_eq!(half.add(&half).exact_eq(&l2), Some(true));
        let l4_half = LogMag::ln_root(rat(4), 2).unwrap();
        assert_eq!(l4_half.exact_eq(&l2), Some(true));
        assert_eq!(l4_half.as_exact().unwrap().root(), 1);
        assert_eq!(l2.sub(&l2).signum(), Some(Ordering::Equal));
        assert_eq!(l2.cmp_value(&l3), Some(Ordering::Less));
        let neg = l2.scale(&q(-3, 1));
        assert_eq!(neg.exact_eq(&LogMag::ln(q(1, 8)).unwrap()), Some(true));
    }

    #[test]
    fn ratio_detection() {
        let h1 = LogMag::ln(Rational::from_integer(BigInt::one() << 1024u32)).unwrap();
        let h2 = LogMag::ln(Rational::from_integer(BigInt::one() << 2048u32)).unwrap();
        assert_eq!(h2.ratio(&h1).exact, Some(rat(2)));
        let l3 = LogMag::ln(rat(3)).unwrap();
        let l2 = LogMag::ln(rat(2)).unwrap();
        let r = l3.ratio(&l2);
        assert_eq!(r.exact, None);
        assert!((r.approx - 3f64.ln() / 2f64.ln()).abs() < 1e-12);
        let minus = LogMag::ln(q(1, 4)).unwrap();
        assert_eq!(minus.ratio(&l2).exact, Some(rat(-2)));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(LogMag::zero().to_decimal(12), "0.000000000000");
        assert_eq!(LogMag::ln(q(1, 2)).unwrap().to_decimal(12), "-0.693147180560");
        assert_eq!(LogMag::ln(rat(16)).unwrap().to_decimal(3), "2.773");
    }

    #[test]
    fn certified_max_min() {
        let a = LogMag::ln(rat(2)).unwrap();
        let c = LogMag::Certified(a.enclose());
        let m = c.max(&a);
        assert!(m.within(&a, 1e-60));
        assert_eq!(a.min(&LogMag::zero()).exact_eq(&LogMag::zero()), Some(true));
    }
}
