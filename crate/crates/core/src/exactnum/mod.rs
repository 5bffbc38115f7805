//! Exact rational and quadratic-field arithmetic, places and absolute values.
//!
//! Absolute values are normalised so that their restriction to `Q` is the
//! usual one (`|p|_p = 1/p`, ordinary modulus at infinity); with this choice
//! the product formula holds exactly and is the anchor for every identity
//! checked downstream. All logarithms are natural logarithms.

pub mod linalg;
mod logmag;
mod place;
pub mod primes;
mod quad;
mod rational;

pub use logmag::{Certified, ExactLog, LogMag, Ratio, FRAC_BITS};
pub use place::{places_above, split_behaviour, BasePlace, Extension, Place, Splitting};
pub use quad::{QuadElem, QuadField};
pub use rational::{format_rational, padic_valuation, parse_rational, rat, rational_from_int, Rational};

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::Result;

/// Coefficient ring for polynomials: either `Q` or a fixed quadratic field.
///
/// `Ctx` carries whatever is needed to build constants (nothing for `Q`, the
/// field for `Q(sqrt d)`).
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Ctx: Clone + Debug + PartialEq + Send + Sync;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_rational(ctx: &Self::Ctx, q: Rational) -> Self;
    fn vanishes(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// `log |self|_v`, normalised with respect to `Q`.
    fn log_abs(&self, v: &Place) -> Result<LogMag>;
    /// Field norm down to `Q` (identity on `Q`).
    fn norm(&self) -> Rational;
    /// Galois conjugate (identity on `Q`).
    fn conj(&self) -> Self;
    /// Denominators of the coordinates, used to find bad primes.
    fn coordinate_denominators(&self) -> Vec<num_bigint::BigInt>;
    /// Rational upper bound for `|sigma(self)|` over every complex embedding.
    fn abs_upper_bound(&self) -> Rational;
    /// The quadratic field of the context, if any.
    fn field(ctx: &Self::Ctx) -> Option<QuadField>;
}

impl Scalar for Rational {
    type Ctx = ();

    fn zero(_: &()) -> Self {
        rat(0)
    }
    fn one(_: &()) -> Self {
        rat(1)
    }
    fn from_rational(_: &(), q: Rational) -> Self {
        q
    }
    fn vanishes(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        if Scalar::vanishes(self) {
            None
        } else {
            Some(num_traits::Inv::inv(self.clone()))
        }
    }
    fn log_abs(&self, v: &Place) -> Result<LogMag> {
        place::abs_value_rational(self, v)
    }
    fn norm(&self) -> Rational {
        self.clone()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn coordinate_denominators(&self) -> Vec<num_bigint::BigInt> {
        vec![self.denom().clone()]
    }
    fn abs_upper_bound(&self) -> Rational {
        num_traits::Signed::abs(self)
    }
    fn field(_: &()) -> Option<QuadField> {
        None
    }
}

impl Scalar for QuadElem {
    type Ctx = QuadField;

    fn zero(ctx: &QuadField) -> Self {
        QuadElem::from_rational(*ctx, rat(0))
    }
    fn one(ctx: &QuadField) -> Self {
        QuadElem::from_rational(*ctx, rat(1))
    }
    fn from_rational(ctx: &QuadField, q: Rational) -> Self {
        QuadElem::from_rational(*ctx, q)
    }
    fn vanishes(&self) -> bool {
        QuadElem::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        QuadElem::inv(self)
    }
    fn log_abs(&self, v: &Place) -> Result<LogMag> {
        place::abs_value_quad(self, v)
    }
    fn norm(&self) -> Rational {
        QuadElem::norm(self)
    }
    fn conj(&self) -> Self {
        self.conjugate()
    }
    fn coordinate_denominators(&self) -> Vec<num_bigint::BigInt> {
        vec![self.a().denom().clone(), self.b().denom().clone()]
    }
    fn abs_upper_bound(&self) -> Rational {
        use num_integer::Roots;
        use num_traits::Signed;
        let dd = self.field().d().unsigned_abs();
        let r = dd.sqrt();
        let s = if r * r == dd { r } else { r + 1 };
        self.a().abs() + self.b().abs() * rat(s as i64)
    }
    fn field(ctx: &QuadField) -> Option<QuadField> {
        Some(*ctx)
    }
}
