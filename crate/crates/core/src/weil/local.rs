use num_bigint::BigInt;
use num_traits::Signed;

use super::presentation::{DivisorPresentation, PresentationKind};
use crate::exactnum::{LogMag, Place, Rational, Scalar};
use crate::polydyn::ProjPoint;
use crate::{Error, Result};

/// Values of the sections of a presentation at one point.
pub(crate) struct Evaluated<C: Scalar> {
    /// `None` for the default presentation, whose monomial maximum is read
    /// off the coordinates directly.
    pub numer: Option<Vec<C>>,
    pub denom: Vec<C>,
    pub sd: C,
    pub max_coord: BigInt,
    pub e: u32,
}

impl<C: Scalar> Evaluated<C> {
    pub fn new(d: &DivisorPresentation<C>, x: &ProjPoint) -> Result<Self> {
        if x.coords().len() != d.nvars() {
            return Err(Error::Shape(format!(
                "point {x} does not match a divisor in {} variables",
                d.nvars()
            )));
        }
        let xs: Vec<Rational> = x.as_rationals();
        let sd = d.sd().eval_rational(&xs);
        if sd.vanishes() {
            return Err(Error::SupportHit(x.clone()));
        }
        let default = d.kind() == PresentationKind::Default;
        let numer = (!default).then(|| d.numer().iter().map(|f| f.eval_rational(&xs)).collect());
        let denom = if default {
            vec![C::one(d.sd().ctx())]
        } else {
            d.denom().iter().map(|f| f.eval_rational(&xs)).collect()
        };
        Ok(Evaluated {
            numer,
            denom,
            sd,
            max_coord: x.max_abs(),
            e: d.degree(),
        })
    }

    /// `max_j log|s_j(x)|_v`.
    pub fn numer_log(&self, v: &Place) -> Result<LogMag> {
        match &self.numer {
            None => {
                if v.is_archimedean() {
                    Ok(LogMag::ln(Rational::from_integer(self.max_coord.abs()))?
                        .scale(&Rational::from_integer(self.e.into())))
                } else {
                    // primitive integer coordinates: max_i |x_i|_p = 1
                    Ok(LogMag::zero())
                }
            }
            Some(vals) => max_log(vals, v, "numerator"),
        }
    }

    pub fn denom_log(&self, v: &Place) -> Result<LogMag> {
        max_log(&self.denom, v, "denominator")
    }

    pub fn rational_sections(&self) -> bool {
        let rational = |c: &C| c.conj() == *c;
        self.numer.as_ref().is_none_or(|v| v.iter().all(rational)) && self.denom.iter().all(rational)
    }
}

fn max_log<C: Scalar>(vals: &[C], v: &Place, which: &str) -> Result<LogMag> {
    let mut best: Option<LogMag> = None;
    for y in vals.iter().filter(|y| !y.vanishes()) {
        let l = y.log_abs(v)?;
        best = Some(match best {
            None => l,
            Some(b) => b.max(&l),
        });
    }
    best.ok_or_else(|| Error::Degenerate(format!("all {which} sections vanish at the point")))
}

pub(crate) fn lambda_from<C: Scalar>(d: &DivisorPresentation<C>, ev: &Evaluated<C>, v: &Place) -> Result<LogMag> {
    let v = d.place_for(v)?;
    let raw = ev.numer_log(&v)?.sub(&ev.denom_log(&v)?).sub(&ev.sd.log_abs(&v)?);
    Ok(raw.scale(d.weight()))
}

/// Local Weil function `weight * (max_j log|s_j(x)|_v - max_i log|t_i(x)|_v - log|s_D(x)|_v)`.
///
/// For a divisor over a quadratic field, a bare place of `Q` is extended canonically.
pub fn weil_local<C: Scalar>(d: &DivisorPresentation<C>, x: &ProjPoint, v: &Place) -> Result<LogMag> {
    lambda_from(d, &Evaluated::new(d, x)?, v)
}

/// `sum_{v in S} lambda_D(x, v)`.
pub fn weil_sum<C: Scalar>(d: &DivisorPresentation<C>, x: &ProjPoint, s: &[Place]) -> Result<LogMag> {
    let ev = Evaluated::new(d, x)?;
    let mut acc = LogMag::zero();
    for v in s {
        acc = acc.add(&lambda_from(d, &ev, v)?);
    }
    Ok(acc)
}

pub(crate) fn weil_sum_evaluated<C: Scalar>(
    d: &DivisorPresentation<C>,
    ev: &Evaluated<C>,
    s: &[Place],
) -> Result<Vec<LogMag>> {
    s.iter().map(|v| lambda_from(d, ev, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, QuadElem, QuadField};
    use crate::polydyn::HomogPoly;

    fn line() -> DivisorPresentation {
        DivisorPresentation::hypersurface(HomogPoly::parse("x0 - 3*x1", 2).unwrap()).unwrap()
    }

    fn p(n: u64) -> Place {
        Place::finite(n).unwrap()
    }

    #[test]
    fn local_examples() {
        let d = line();
        let x = ProjPoint::from_i64(&[16, 1]).unwrap();
        assert_eq!(
            weil_local(&d, &x, &Place::infinite()).unwrap(),
            LogMag::ln(rat(16) / rat(13)).unwrap()
        );
        assert_eq!(weil_local(&d, &x, &p(13)).unwrap(), LogMag::ln(rat(13)).unwrap());
        assert_eq!(weil_local(&d, &x, &p(2)).unwrap(), LogMag::zero());
    }

    #[test]
    fn sum_examples() {
        let d = line();
        let x = ProjPoint::from_i64(&[16, 1]).unwrap();
        assert_eq!(
            weil_sum(&d, &x, &[Place::infinite(), p(13)]).unwrap(),
            LogMag::ln(rat(16)).unwrap()
        );
        assert_eq!(weil_sum(&d, &x, &[p(2), p(5)]).unwrap(), LogMag::zero());
        assert_eq!(weil_sum(&d, &x, &[]).unwrap(), LogMag::zero());
    }

    #[test]
    fn support_hit() {
        let x = ProjPoint::from_i64(&[3, 1]).unwrap();
        match weil_local(&line(), &x, &Place::infinite()) {
            Err(Error::SupportHit(y)) => assert_eq!(y, x),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weight_is_linear() {
        let d = line();
        let dq = line().with_weight(rat(3) / rat(7)).unwrap();
        let x = ProjPoint::from_i64(&[10, 3]).unwrap();
        for v in [Place::infinite(), p(2), p(5)] {
            let a = weil_local(&d, &x, &v).unwrap().scale(&(rat(3) / rat(7)));
            assert_eq!(weil_local(&dq, &x, &v).unwrap(), a);
        }
    }

    #[test]
    fn custom_matches_default_for_line() {
        let g = HomogPoly::parse("x0 - 3*x1", 2).unwrap();
        let s = vec![
            HomogPoly::parse("x0^2", 2).unwrap(),
            HomogPoly::parse("x1^2", 2).unwrap(),
        ];
        let t = vec![HomogPoly::parse("x0", 2).unwrap(), HomogPoly::parse("x1", 2).unwrap()];
        let c = DivisorPresentation::custom(g, s, t, rat(1)).unwrap();
        let x = ProjPoint::from_i64(&[16, 1]).unwrap();
        for v in [Place::infinite(), p(13), p(2)] {
            assert_eq!(weil_local(&c, &x, &v).unwrap(), weil_local(&line(), &x, &v).unwrap());
        }
    }

    #[test]
    fn quadratic_divisor_at_split_places() {
        // x - sqrt(2) y at (3, 1): value 3 - sqrt 2 of norm 7; 7 splits in Q(sqrt 2)
        let f = QuadField::new(2).unwrap();
        let g = HomogPoly::parse("x0 - x1", 2).unwrap().to_quadratic(f);
        let g = g
            .add(&HomogPoly::monomial(vec![0, 1], QuadElem::new(f, rat(1), rat(-1)), f))
            .unwrap();
        let d = DivisorPresentation::hypersurface(g).unwrap();
        let x = ProjPoint::from_i64(&[3, 1]).unwrap();
        let w0 = Place::parse("7:split0", Some(f)).unwrap();
        let w1 = Place::parse("7:split1", Some(f)).unwrap();
        let l0 = weil_local(&d, &x, &w0).unwrap();
        let l1 = weil_local(&d, &x, &w1).unwrap();
        assert_eq!(l0.add(&l1), LogMag::ln(rat(7)).unwrap());
        assert!(l0.is_exact() && l1.is_exact());
    }
}
