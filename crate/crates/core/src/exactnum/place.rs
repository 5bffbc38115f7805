use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::logmag::{ln_fixed_point, Certified, LogMag, FRAC_BITS};
use super::primes::{is_prime, legendre, sqrt_mod};
use super::quad::{QuadElem, QuadField};
use super::rational::{ord_int, Rational};
use crate::{Error, Result};

/// Hard cap on the p-adic precision used for split-place valuations.
pub const SPLIT_PRECISION_CAP: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasePlace {
    Infinite,
    Finite(u64),
}

/// How a rational prime behaves in a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// Which extension `w | v` an absolute value uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extension {
    /// `sqrt d` maps to the canonical p-adic root `s` (`conjugate = false`) or to `-s`.
    /// For odd `p` the canonical root reduces to the smallest nonnegative square
    /// root of `d` mod `p`; for `p = 2` it is the root congruent to 1 mod 4.
    Split {
        conjugate: bool,
    },
    Inert,
    Ramified,
    /// `sqrt d` maps to the positive (`negative = false`) or negative real root.
    Real {
        negative: bool,
    },
    Complex,
}

/// A place of `Q`, optionally together with a chosen extension to a quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Place {
    base: BasePlace,
    ext: Option<(QuadField, Extension)>,
}

pub fn split_behaviour(p: u64, field: QuadField) -> Splitting {
    let d = field.d();
    if p == 2 {
        return match d.rem_euclid(8) {
            1 => Splitting::Split,
            5 => Splitting::Inert,
            _ => Splitting::Ramified,
        };
    }
    match legendre(d, p) {
        0 => Splitting::Ramified,
        1 => Splitting::Split,
        _ => Splitting::Inert,
    }
}

/// All extensions of `v` to `field`, canonical extension first.
pub fn places_above(v: BasePlace, field: QuadField) -> Vec<Place> {
    let mk = |ext| Place {
        base: v,
        ext: Some((field, ext)),
    };
    match v {
        BasePlace::Infinite if field.is_real() => vec![
            mk(Extension::Real { negative: false }),
            mk(Extension::Real { negative: true }),
        ],
        BasePlace::Infinite => vec![mk(Extension::Complex)],
        BasePlace::Finite(p) => match split_behaviour(p, field) {
            Splitting::Split => vec![
                mk(Extension::Split { conjugate: false }),
                mk(Extension::Split { conjugate: true }),
            ],
            Splitting::Inert => vec![mk(Extension::Inert)],
            Splitting::Ramified => vec![mk(Extension::Ramified)],
        },
    }
}

impl Place {
    pub fn infinite() -> Self {
        Place {
            base: BasePlace::Infinite,
            ext: None,
        }
    }

    pub fn finite(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Place {
            base: BasePlace::Finite(p),
            ext: None,
        })
    }

    pub fn base(&self) -> BasePlace {
        self.base
    }

    pub fn base_place(&self) -> Place {
        Place {
            base: self.base,
            ext: None,
        }
    }

    pub fn extension(&self) -> Option<(QuadField, Extension)> {
        self.ext
    }

    pub fn is_archimedean(&self) -> bool {
        self.base == BasePlace::Infinite
    }

    /// `[F_w : Q_v]`; 1 for places of `Q`.
    pub fn local_degree(&self) -> u32 {
        match self.ext {
            None => 1,
            Some((_, Extension::Split { .. } | Extension::Real { .. })) => 1,
            Some(_) => 2,
        }
    }

    /// The canonical extension of this place to `field` (identity if one is already chosen).
    pub fn canonical_extension(&self, field: QuadField) -> Result<Place> {
        match self.ext {
            Some((f, _)) if f == field => Ok(*self),
            Some(_) => Err(Error::PlaceMismatch {
                place: self.to_string(),
            }),
            None => Ok(places_above(self.base, field)[0]),
        }
    }

    /// Parses `inf`, `p`, or either followed by `:split0`, `:split1`, `:inert`,
    /// `:ramified`, `:real+`, `:real-`, `:complex`. A bare place is extended
    /// canonically when a field is given.
    pub fn parse(s: &str, field: Option<QuadField>) -> Result<Place> {
        let bad = || Error::InvalidArgument(format!("bad place {s:?}"));
        let (base, ext) = match s.split_once(':') {
            Some((b, e)) => (b.trim(), Some(e.trim())),
            None => (s.trim(), None),
        };
        let base = match base {
            "inf" | "infinity" | "oo" => BasePlace::Infinite,
            p => {
                let p: u64 = p.parse().map_err(|_| bad())?;
                if !is_prime(p) {
                    return Err(Error::NotPrime(p));
                }
                BasePlace::Finite(p)
            }
        };
        let plain = Place { base, ext: None };
        let Some(field) = field else {
            return if ext.is_none() { Ok(plain) } else { Err(bad()) };
        };
        let above = places_above(base, field);
        let Some(ext) = ext else { return Ok(above[0]) };
        let wanted = match ext {
            "split0" => Extension::Split { conjugate: false },
            "split1" => Extension::Split { conjugate: true },
            "inert" => Extension::Inert,
            "ramified" => Extension::Ramified,
            "real+" => Extension::Real { negative: false },
            "real-" => Extension::Real { negative: true },
            "complex" => Extension::Complex,
            _ => return Err(bad()),
        };
        above
            .into_iter()
            .find(|w| w.ext.map(|(_, e)| e) == Some(wanted))
            .ok_or_else(|| Error::PlaceMismatch { place: s.to_string() })
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.base {
            BasePlace::Infinite => write!(f, "inf")?,
            BasePlace::Finite(p) => write!(f, "{p}")?,
        }
        if let Some((_, e)) = self.ext {
            let tag = match e {
                Extension::Split { conjugate: false } => "split0",
                Extension::Split { conjugate: true } => "split1",
                Extension::Inert => "inert",
                Extension::Ramified => "ramified",
                Extension::Real { negative: false } => "real+",
                Extension::Real { negative: true } => "real-",
                Extension::Complex => "complex",
            };
            write!(f, ":{tag}")?;
        }
        Ok(())
    }
}

fn p_power(p: u64, e: i64) -> Rational {
    let pp = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(pp)
    } else {
        Rational::new_raw(BigInt::one(), pp)
    }
}

pub(crate) fn abs_value_rational(q: &Rational, v: &Place) -> Result<LogMag> {
    if q.is_zero() {
        return Err(Error::ZeroInput);
    }
    match v.base {
        BasePlace::Infinite => LogMag::ln(q.abs()),
        BasePlace::Finite(p) => {
            let ord = ord_int(q.numer().magnitude(), p) as i64 - ord_int(q.denom().magnitude(), p) as i64;
            LogMag::ln(p_power(p, -ord))
        }
    }
}

/// `s` with `s^2 = d` in `Z_p`, reduced modulo `p^prec`.
fn padic_sqrt(d: i64, p: u64, conjugate: bool, prec: u32) -> BigUint {
    let modulus = BigUint::from(p).pow(prec);
    let dd = BigInt::from(d);
    let s = if p == 2 {
        // x^2 = d mod 2^k with x = 1 mod 4, lifted one bit at a time.
        let mut x = BigInt::one();
        for k in 3..=prec + 1 {
            let m = BigInt::one() << (k + 1);
            if !(&x * &x - &dd).mod_floor(&m).is_zero() {
                x += BigInt::one() << (k - 1);
            }
        }
        x.mod_floor(&BigInt::from(modulus.clone()))
    } else {
        let r0 = sqrt_mod(d, p).expect("split prime has a square root");
        let mut x = BigInt::from(r0);
        let mut k = 1u32;
        while k < prec {
            k = (2 * k).min(prec);
            let m = BigInt::from(p).pow(k);
            let inv = (BigInt::from(2) * &x).modinv(&m).expect("2s invertible mod p^k");
            x = (&x - (&x * &x - &dd) * inv).mod_floor(&m);
        }
        x.mod_floor(&BigInt::from(modulus.clone()))
    };
    let s = s.to_biguint().expect("reduced residue is nonnegative");
    if conjugate {
        (&modulus - &s) % &modulus
    } else {
        s
    }
}

fn split_valuation(y: &QuadElem, p: u64, conjugate: bool) -> Result<i64> {
    let c = y.a().denom().lcm(y.b().denom());
    let a = y.a().numer() * (&c / y.a().denom());
    let b = y.b().numer() * (&c / y.b().denom());
    let c_ord = ord_int(c.magnitude(), p) as i64;
    let d = y.field().d();
    let norm = &a * &a - BigInt::from(d) * &b * &b;
    let mut prec = ord_int(norm.magnitude(), p) as u32 + 2;
    loop {
        if prec > SPLIT_PRECISION_CAP {
            return Err(Error::PrecisionCap {
                cap: SPLIT_PRECISION_CAP,
            });
        }
        let s = BigInt::from(padic_sqrt(d, p, conjugate, prec));
        let m = BigInt::from(p).pow(prec);
        let t = (&a + &b * s).mod_floor(&m);
        if !t.is_zero() {
            let ord = ord_int(t.magnitude(), p) as i64;
            return Ok(ord - c_ord);
        }
        prec *= 2;
    }
}

/// `ln(|A| + |B| sqrt d)` for integers not both zero, `d > 0` not a square.
fn ln_sum_with_sqrt(a: &BigInt, b: &BigInt, d: u64) -> Certified {
    let w = FRAC_BITS + 32;
    let t = (a.magnitude() << w) + ((b.magnitude() * b.magnitude() * d) << (2 * w)).sqrt();
    ln_fixed_point(&t, w, 1)
}

fn ln_real_embedding(y: &QuadElem, negative: bool) -> Result<LogMag> {
    let c = y.a().denom().lcm(y.b().denom());
    let a = y.a().numer() * (&c / y.a().denom());
    let mut b = y.b().numer() * (&c / y.b().denom());
    if negative {
        b = -b;
    }
    let d = y.field().d() as u64;
    let lnc = LogMag::ln(Rational::from_integer(c))?;
    let same_sign = a.is_zero() || b.is_zero() || a.is_positive() == b.is_positive();
    let ln_abs = if same_sign {
        LogMag::Certified(ln_sum_with_sqrt(&a, &b, d))
    } else {
        // |A + B sqrt d| = |A^2 - d B^2| / (|A| + |B| sqrt d)
        let norm = &a * &a - BigInt::from(d) * &b * &b;
        let ln_norm = LogMag::ln(Rational::from_integer(norm.abs()))?;
        ln_norm.sub(&LogMag::Certified(ln_sum_with_sqrt(&a, &b, d)))
    };
    Ok(ln_abs.sub(&lnc))
}

pub(crate) fn abs_value_quad(y: &QuadElem, v: &Place) -> Result<LogMag> {
    if y.is_zero() {
        return Err(Error::ZeroInput);
    }
    if y.is_rational() {
        return abs_value_rational(y.a(), v);
    }
    let (field, ext) = match v.ext {
        Some((f, e)) if f == y.field() => (f, e),
        _ => return Err(Error::PlaceMismatch { place: v.to_string() }),
    };
    debug_assert_eq!(field, y.field());
    match (v.base, ext) {
        (BasePlace::Finite(p), Extension::Inert | Extension::Ramified) => {
            let n = y.norm();
            let ord = ord_int(n.numer().magnitude(), p) as i64 - ord_int(n.denom().magnitude(), p) as i64;
            LogMag::ln_root(p_power(p, -ord), 2)
        }
        (BasePlace::Finite(p), Extension::Split { conjugate }) => {
            let ord = split_valuation(y, p, conjugate)?;
            LogMag::ln(p_power(p, -ord))
        }
        (BasePlace::Infinite, Extension::Real { negative }) => ln_real_embedding(y, negative),
        (BasePlace::Infinite, Extension::Complex) => LogMag::ln_root(y.norm(), 2),
        _ => Err(Error::PlaceMismatch { place: v.to_string() }),
    }
}
