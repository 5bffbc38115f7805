//! Divisor presentations and local and global Weil functions.

mod global;
mod local;
mod presentation;

pub use global::{
    galois_symmetrized, galois_symmetrized_terms, weil_global, weil_global_terms, GlobalPlace, GlobalWeil,
};
pub use local::{weil_local, weil_sum};
pub(crate) use local::{weil_sum_evaluated, Evaluated};
pub use presentation::{DivisorPresentation, PresentationKind};

use crate::exactnum::{LogMag, Place, QuadElem, QuadField, Rational};
use crate::polydyn::ProjPoint;
use crate::{Error, Result};

/// A divisor over `Q` or over a quadratic field.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyDivisor {
    Rational(DivisorPresentation<Rational>),
    Quadratic(DivisorPresentation<QuadElem>),
}

impl AnyDivisor {
    pub fn field(&self) -> Option<QuadField> {
        match self {
            AnyDivisor::Rational(_) => None,
            AnyDivisor::Quadratic(d) => d.field(),
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            AnyDivisor::Rational(d) => d.nvars(),
            AnyDivisor::Quadratic(d) => d.nvars(),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            AnyDivisor::Rational(d) => d.degree(),
            AnyDivisor::Quadratic(d) => d.degree(),
        }
    }

    pub fn weight(&self) -> &Rational {
        match self {
            AnyDivisor::Rational(d) => d.weight(),
            AnyDivisor::Quadratic(d) => d.weight(),
        }
    }

    pub fn in_support(&self, x: &ProjPoint) -> bool {
        match self {
            AnyDivisor::Rational(d) => d.in_support(x),
            AnyDivisor::Quadratic(d) => d.in_support(x),
        }
    }

    pub fn weil_local(&self, x: &ProjPoint, v: &Place) -> Result<LogMag> {
        match self {
            AnyDivisor::Rational(d) => weil_local(d, x, v),
            AnyDivisor::Quadratic(d) => weil_local(d, x, v),
        }
    }

    /// Local values at each place of `s`, evaluating the sections once.
    pub fn weil_locals(&self, x: &ProjPoint, s: &[Place]) -> Result<Vec<LogMag>> {
        match self {
            AnyDivisor::Rational(d) => weil_sum_evaluated(d, &Evaluated::new(d, x)?, s),
            AnyDivisor::Quadratic(d) => weil_sum_evaluated(d, &Evaluated::new(d, x)?, s),
        }
    }

    pub fn weil_sum(&self, x: &ProjPoint, s: &[Place]) -> Result<LogMag> {
        Ok(LogMag::sum(&self.weil_locals(x, s)?))
    }

    /// Global sum over `Q`; refuses divisors over a quadratic field.
    pub fn weil_global(&self, x: &ProjPoint) -> Result<GlobalWeil> {
        match self {
            AnyDivisor::Rational(d) => weil_global_terms(d, x),
            AnyDivisor::Quadratic(_) => Err(Error::NeedsSymmetrization),
        }
    }

    /// [`galois_symmetrized`]; for a divisor over `Q` this is the global sum.
    pub fn symmetrized(&self, x: &ProjPoint) -> Result<GlobalWeil> {
        match self {
            AnyDivisor::Rational(d) => weil_global_terms(d, x),
            AnyDivisor::Quadratic(d) => galois_symmetrized_terms(d, x),
        }
    }
}
