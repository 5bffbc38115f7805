use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactnum::{LogMag, Rational};
use crate::{Error, Result};

/// A `Q`-rational point of `P^n` as a primitive integer tuple whose first
/// nonzero coordinate is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<BigInt>,
}

/// gcd of the absolute values, reducing the large entries modulo the small ones first.
pub(crate) fn multi_gcd(values: &[BigInt]) -> BigInt {
    let mut nonzero: Vec<&BigInt> = values.iter().filter(|v| !v.is_zero()).collect();
    nonzero.sort_by_key(|v| v.bits());
    let Some(first) = nonzero.first() else {
        return BigInt::zero();
    };
    let mut g = first.abs();
    for v in &nonzero[1..] {
        if g.is_one() {
            break;
        }
        let r = v.mod_floor(&g);
        g = g.gcd(&r);
    }
    g
}

impl ProjPoint {
    /// Canonical representative of an integer tuple.
    pub fn from_ints(mut coords: Vec<BigInt>) -> Result<Self> {
        let g = multi_gcd(&coords);
        if g.is_zero() {
            return Err(Error::ZeroTuple);
        }
        let negate = coords.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
        for c in coords.iter_mut() {
            if !g.is_one() {
                *c = &*c / &g;
            }
            if negate {
                *c = -&*c;
            }
        }
        Ok(ProjPoint { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        Self::from_ints(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Dimension `n` of the ambient `P^n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn as_rationals(&self) -> Vec<Rational> {
        self.coords.iter().map(|c| Rational::from_integer(c.clone())).collect()
    }

    /// Checks the primitive/sign-canonical invariant.
    pub fn is_canonical(&self) -> bool {
        let g = multi_gcd(&self.coords);
        g.is_one()
            && self
                .coords
                .iter()
                .find(|c| !c.is_zero())
                .is_some_and(|c| c.is_positive())
    }

    pub fn max_abs(&self) -> BigInt {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|c| {
                if c.bits() > 200 {
                    format!("<{} bits>", c.bits())
                } else {
                    c.to_string()
                }
            })
            .collect();
        write!(f, "({})", parts.join(":"))
    }
}

/// Canonical primitive integer representative of a rational tuple.
pub fn normalize(raw: &[Rational]) -> Result<ProjPoint> {
    let den = raw.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = raw.iter().map(|q| q.numer() * (&den / q.denom())).collect();
    ProjPoint::from_ints(ints)
}

/// Logarithmic Weil height attached to `O(1)`: for a primitive tuple all
/// nonarchimedean terms vanish and only `log max |x_i|` remains.
pub fn height(x: &ProjPoint) -> LogMag {
    LogMag::ln(Rational::from_integer(x.max_abs())).expect("primitive point has a nonzero coordinate")
}

/// Height attached to `O(e)`; `e = -(n+1)` gives the canonical height `h_{K_X}` on `P^n`.
pub fn height_twisted(x: &ProjPoint, e: i64) -> LogMag {
    height(x).scale(&Rational::from_integer(e.into()))
}

/// Canonical bundle twist `K_{P^n} = O(-n-1)`.
pub fn canonical_twist(n: usize) -> i64 {
    -(n as i64 + 1)
}
