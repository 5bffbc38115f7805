use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::local::{lambda_from, Evaluated};
use super::presentation::DivisorPresentation;
use crate::exactnum::primes::{block_exponent, support, SupportElem};
use crate::exactnum::{places_above, BasePlace, LogMag, Place, QuadElem, Rational, Scalar};
use crate::polydyn::ProjPoint;
use crate::{Error, Result};

/// A place of `Q`, or a block of primes whose contributions are summed as a unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalPlace {
    Infinite,
    Prime(u64),
    /// All primes dividing an unfactored cofactor.
    Block(BigUint),
}

impl fmt::Display for GlobalPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlobalPlace::Infinite => write!(f, "inf"),
            GlobalPlace::Prime(p) => write!(f, "{p}"),
            GlobalPlace::Block(c) => write!(f, "block({} bits)", c.bits()),
        }
    }
}

/// Place-by-place breakdown of a global sum of local Weil functions.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalWeil {
    pub total: LogMag,
    pub archimedean: LogMag,
    pub nonarchimedean: LogMag,
    /// Nonzero contributions, archimedean first.
    pub terms: Vec<(GlobalPlace, LogMag)>,
}

impl GlobalWeil {
    fn from_terms(terms: Vec<(GlobalPlace, LogMag)>) -> Self {
        let mut arch = LogMag::zero();
        let mut non = LogMag::zero();
        for (p, l) in &terms {
            match p {
                GlobalPlace::Infinite => arch = arch.add(l),
                _ => non = non.add(l),
            }
        }
        let terms = terms
            .into_iter()
            .filter(|(_, l)| l.exact_eq(&LogMag::zero()) != Some(true))
            .collect();
        GlobalWeil {
            total: arch.add(&non),
            archimedean: arch,
            nonarchimedean: non,
            terms,
        }
    }
}

fn push_rational(out: &mut Vec<BigUint>, q: &Rational) {
    if !Zero::is_zero(q) {
        out.push(q.numer().magnitude().clone());
        out.push(q.denom().magnitude().clone());
    }
}

/// `k` with `|q|_p = |c|_p^k` for every `p | c`.
fn rational_block_exponent(q: &Rational, c: &BigUint) -> i64 {
    block_exponent(q.numer().magnitude(), c) as i64 - block_exponent(q.denom().magnitude(), c) as i64
}

fn min_exponent<'a>(vals: impl Iterator<Item = &'a Rational>, c: &BigUint) -> i64 {
    vals.filter(|q| !Zero::is_zero(*q))
        .map(|q| rational_block_exponent(q, c))
        .min()
        .unwrap_or(0)
}

fn ln_block(c: &BigUint, k: Rational) -> Result<LogMag> {
    Ok(LogMag::ln(Rational::from_integer(BigInt::from(c.clone())))?.scale(&k))
}

/// `sum_v lambda_D(x, v)` over all places of `Q`, for a divisor over `Q`.
///
/// With the default presentation this is `deg(s_D) * h(x)` exactly.
pub fn weil_global(d: &DivisorPresentation<Rational>, x: &ProjPoint) -> Result<LogMag> {
    Ok(weil_global_terms(d, x)?.total)
}

pub fn weil_global_terms(d: &DivisorPresentation<Rational>, x: &ProjPoint) -> Result<GlobalWeil> {
    let ev = Evaluated::new(d, x)?;
    let mut ints = Vec::new();
    push_rational(&mut ints, &ev.sd);
    for q in ev.numer.iter().flatten().chain(&ev.denom) {
        push_rational(&mut ints, q);
    }
    let mut terms = vec![(GlobalPlace::Infinite, lambda_from(d, &ev, &Place::infinite())?)];
    for elem in support(&ints) {
        match elem {
            SupportElem::Prime(p) => {
                terms.push((GlobalPlace::Prime(p), lambda_from(d, &ev, &Place::finite(p)?)?));
            }
            SupportElem::Block(c) => {
                let ks = match &ev.numer {
                    None => 0,
                    Some(v) => min_exponent(v.iter(), &c),
                };
                let kt = min_exponent(ev.denom.iter(), &c);
                let kg = rational_block_exponent(&ev.sd, &c);
                let k = Rational::from_integer((kg + kt - ks).into()) * d.weight();
                terms.push((GlobalPlace::Block(c.clone()), ln_block(&c, k)?));
            }
        }
    }
    Ok(GlobalWeil::from_terms(terms))
}

/// `sum_v sum_{w | v} (n_w / 2) lambda_D(x, w)` for a divisor over a quadratic
/// field, `n_w` the local degree; equals `deg(s_D) * h(x)` for the default presentation.
pub fn galois_symmetrized(d: &DivisorPresentation<QuadElem>, x: &ProjPoint) -> Result<LogMag> {
    Ok(galois_symmetrized_terms(d, x)?.total)
}

pub fn galois_symmetrized_terms(d: &DivisorPresentation<QuadElem>, x: &ProjPoint) -> Result<GlobalWeil> {
    let field = d.field().expect("quadratic presentations carry their field");
    let ev = Evaluated::new(d, x)?;
    let half = Rational::new(1.into(), 2.into());
    let sd_norm = ev.sd.norm();
    if ev.rational_sections() {
        // sum_{w|v} n_w log|y|_w = log|N y|_v, and the section values are the
        // same at every w | v, so every place reduces to a computation over Q.
        let numer: Option<Vec<Rational>> = ev.numer.as_ref().map(|v| v.iter().map(|q| q.a().clone()).collect());
        let denom: Vec<Rational> = ev.denom.iter().map(|q| q.a().clone()).collect();
        let at = |v: &Place| -> Result<LogMag> {
            let top = match &numer {
                None => ev.numer_log(v)?,
                Some(vals) => max_rational_log(vals, v)?,
            };
            let bottom = max_rational_log(&denom, v)?;
            let g = sd_norm.log_abs(v)?.scale(&half);
            Ok(top.sub(&bottom).sub(&g).scale(d.weight()))
        };
        let mut ints = Vec::new();
        push_rational(&mut ints, &sd_norm);
        for q in numer.iter().flatten().chain(&denom) {
            push_rational(&mut ints, q);
        }
        let mut terms = vec![(GlobalPlace::Infinite, at(&Place::infinite())?)];
        for elem in support(&ints) {
            match elem {
                SupportElem::Prime(p) => terms.push((GlobalPlace::Prime(p), at(&Place::finite(p)?)?)),
                SupportElem::Block(c) => {
                    let ks = numer.as_ref().map_or(0, |v| min_exponent(v.iter(), &c));
                    let kt = min_exponent(denom.iter(), &c);
                    let kg = Rational::from_integer(rational_block_exponent(&sd_norm, &c).into());
                    let k = (kg * &half + Rational::from_integer((kt - ks).into())) * d.weight();
                    terms.push((GlobalPlace::Block(c.clone()), ln_block(&c, k)?));
                }
            }
        }
        return Ok(GlobalWeil::from_terms(terms));
    }
    let mut ints = Vec::new();
    let all: Vec<&QuadElem> = ev.numer.iter().flatten().chain(&ev.denom).chain([&ev.sd]).collect();
    for y in &all {
        if !y.is_zero() {
            push_rational(&mut ints, &y.norm());
            ints.extend(y.coordinate_denominators().iter().map(|b| b.magnitude().clone()));
        }
    }
    ints.retain(|n| !n.is_one());
    let over = |base: BasePlace| -> Result<LogMag> {
        let mut acc = LogMag::zero();
        for w in places_above(base, field) {
            let nw = Rational::from_integer(w.local_degree().into()) * &half;
            acc = acc.add(&lambda_from(d, &ev, &w)?.scale(&nw));
        }
        Ok(acc)
    };
    let mut terms = vec![(GlobalPlace::Infinite, over(BasePlace::Infinite)?)];
    for elem in support(&ints) {
        match elem {
            SupportElem::Prime(p) => terms.push((GlobalPlace::Prime(p), over(BasePlace::Finite(p))?)),
            SupportElem::Block(c) => {
                return Err(Error::Degenerate(format!(
                    "unfactored {}-bit cofactor with irrational section values",
                    c.bits()
                )))
            }
        }
    }
    Ok(GlobalWeil::from_terms(terms))
}

fn max_rational_log(vals: &[Rational], v: &Place) -> Result<LogMag> {
    let mut best: Option<LogMag> = None;
    for q in vals.iter().filter(|q| !Zero::is_zero(*q)) {
        let l = Scalar::log_abs(q, v)?;
        best = Some(best.map_or(l.clone(), |b| b.max(&l)));
    }
    best.ok_or_else(|| Error::Degenerate("all sections vanish at the point".into()))
}
