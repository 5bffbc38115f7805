use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::rational::{format_rational, rat, Rational};
use crate::{Error, Result};

/// `F = Q(sqrt d)` for a squarefree `d` other than 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadField {
    d: i64,
}

fn squarefree(d: i64) -> bool {
    let n = d.unsigned_abs();
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !squarefree(d) {
            return Err(Error::InvalidField(d));
        }
        Ok(QuadField { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    pub fn sqrt_d(&self) -> QuadElem {
        QuadElem::new(*self, rat(0), rat(1))
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d)
    }
}

/// `a + b sqrt d` in a [`QuadField`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    field: QuadField,
    a: Rational,
    b: Rational,
}

impl QuadElem {
    pub fn new(field: QuadField, a: Rational, b: Rational) -> Self {
        QuadElem { field, a, b }
    }

    pub fn from_rational(field: QuadField, a: Rational) -> Self {
        QuadElem { field, a, b: rat(0) }
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QuadElem::new(self.field, self.a.clone(), -self.b.clone())
    }

    /// `a^2 - d b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - rat(self.field.d) * &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QuadElem::new(self.field, &self.a / &n, -(&self.b / &n)))
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.field, other.field, "arithmetic across different quadratic fields");
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", format_rational(&self.a));
        }
        let sd = format!("sqrt({})", self.field.d);
        let b = if self.b.is_one() {
            sd
        } else if self.b == -Rational::one() {
            format!("-{sd}")
        } else {
            format!("{}*{sd}", format_rational(&self.b))
        };
        if self.a.is_zero() {
            write!(f, "{b}")
        } else if b.starts_with('-') {
            write!(f, "{}{b}", format_rational(&self.a))
        } else {
            write!(f, "{}+{b}", format_rational(&self.a))
        }
    }
}

impl Add for QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: Self) -> Self {
        self.check(&rhs);
        QuadElem::new(self.field, self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: Self) -> Self {
        self.check(&rhs);
        QuadElem::new(self.field, self.a - rhs.a, self.b - rhs.b)
    }
}

impl Mul for QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: Self) -> Self {
        self.check(&rhs);
        let d = rat(self.field.d);
        let a = &self.a * &rhs.a + d * &self.b * &rhs.b;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadElem::new(self.field, a, b)
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> Self {
        QuadElem::new(self.field, -self.a, -self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_validation() {
        assert!(QuadField::new(2).is_ok());
        assert!(QuadField::new(-1).is_ok());
        assert!(QuadField::new(1).is_err());
        assert!(QuadField::new(0).is_err());
        assert!(QuadField::new(12).is_err());
        assert!(QuadField::new(-8).is_err());
    }

    #[test]
    fn norm_and_inverse() {
        let f = QuadField::new(2).unwrap();
        let y = QuadElem::new(f, rat(3), rat(1));
        assert_eq!(y.norm(), rat(7));
        assert_eq!(y.conjugate().norm(), rat(7));
        let prod = y.clone() * y.inv().unwrap();
        assert_eq!(prod, QuadElem::from_rational(f, rat(1)));
        assert_eq!((y.clone() * y.conjugate()).b().clone(), rat(0));
        assert_eq!(f.sqrt_d().to_string(), "sqrt(2)");
        assert_eq!(y.to_string(), "3+sqrt(2)");
    }
}
