use num_traits::Signed;

use crate::exactnum::{rat, LogMag, Place, QuadField, Rational, Scalar};
use crate::polydyn::{HomogPoly, ProjPoint};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresentationKind {
    /// `s` = all monomials of degree `e`, `t` = {1}.
    Default,
    Custom,
}

/// A presentation `(s_D; s; t)` of an effective divisor, scaled by `weight`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorPresentation<C: Scalar = Rational> {
    sd: HomogPoly<C>,
    numer: Vec<HomogPoly<C>>,
    denom: Vec<HomogPoly<C>>,
    weight: Rational,
    kind: PresentationKind,
    c_arch: Option<LogMag>,
}

impl<C: Scalar> DivisorPresentation<C> {
    /// Default presentation of the hypersurface `{G = 0}`.
    pub fn hypersurface(sd: HomogPoly<C>) -> Result<Self> {
        if sd.is_zero() {
            return Err(Error::InvalidArgument("the zero form does not define a divisor".into()));
        }
        let ctx = sd.ctx().clone();
        let numer = HomogPoly::all_monomials(sd.nvars(), sd.degree(), ctx.clone());
        let denom = vec![HomogPoly::constant(sd.nvars(), C::one(&ctx), ctx)];
        let bound = sd.terms().fold(rat(0), |acc, (_, c)| acc + c.abs_upper_bound());
        let c_arch = Some(LogMag::ln(bound)?);
        Ok(DivisorPresentation {
            sd,
            numer,
            denom,
            weight: rat(1),
            kind: PresentationKind::Default,
            c_arch,
        })
    }

    /// Presentation with explicit generating sections; `deg s - deg t = deg s_D`.
    ///
    /// Global generation of `numer` and `denom` is the caller's responsibility;
    /// a common zero met during evaluation is reported as degenerate.
    pub fn custom(
        sd: HomogPoly<C>,
        numer: Vec<HomogPoly<C>>,
        denom: Vec<HomogPoly<C>>,
        weight: Rational,
    ) -> Result<Self> {
        if sd.is_zero() {
            return Err(Error::InvalidArgument("the zero form does not define a divisor".into()));
        }
        if numer.is_empty() || denom.is_empty() {
            return Err(Error::InvalidArgument("section lists must be nonempty".into()));
        }
        let n = sd.nvars();
        if numer.iter().chain(&denom).any(|f| f.nvars() != n) {
            return Err(Error::Shape(format!("every section must be in {n} variables")));
        }
        let en = numer[0].degree();
        let em = denom[0].degree();
        if numer.iter().any(|f| f.degree() != en) || denom.iter().any(|f| f.degree() != em) {
            return Err(Error::Shape("sections in one list must share a degree".into()));
        }
        if en as i64 - em as i64 != sd.degree() as i64 {
            return Err(Error::Shape(format!(
                "section degrees {en} - {em} do not match deg s_D = {}",
                sd.degree()
            )));
        }
        let mut p = DivisorPresentation {
            sd,
            numer,
            denom,
            weight: rat(1),
            kind: PresentationKind::Custom,
            c_arch: None,
        };
        p.set_weight(weight)?;
        Ok(p)
    }

    pub fn with_weight(mut self, weight: Rational) -> Result<Self> {
        self.set_weight(weight)?;
        Ok(self)
    }

    fn set_weight(&mut self, weight: Rational) -> Result<()> {
        if !weight.is_positive() {
            return Err(Error::InvalidArgument(format!("weight {weight} must be positive")));
        }
        if let Some(c) = &self.c_arch {
            self.c_arch = Some(c.scale(&(&weight / &self.weight)));
        }
        self.weight = weight;
        Ok(())
    }

    pub fn sd(&self) -> &HomogPoly<C> {
        &self.sd
    }

    pub fn numer(&self) -> &[HomogPoly<C>] {
        &self.numer
    }

    pub fn denom(&self) -> &[HomogPoly<C>] {
        &self.denom
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn kind(&self) -> PresentationKind {
        self.kind
    }

    /// `e = deg s_D`.
    pub fn degree(&self) -> u32 {
        self.sd.degree()
    }

    pub fn nvars(&self) -> usize {
        self.sd.nvars()
    }

    pub fn field(&self) -> Option<QuadField> {
        C::field(self.sd.ctx())
    }

    pub fn conjugate(&self) -> Self {
        DivisorPresentation {
            sd: self.sd.conjugate(),
            numer: self.numer.iter().map(HomogPoly::conjugate).collect(),
            denom: self.denom.iter().map(HomogPoly::conjugate).collect(),
            weight: self.weight.clone(),
            kind: self.kind,
            c_arch: self.c_arch.clone(),
        }
    }

    /// Archimedean constant `c` with `lambda >= -c` at every archimedean place
    /// (default presentations only): `weight * log(sum |coeff|)`.
    pub fn arch_constant(&self) -> Option<&LogMag> {
        self.c_arch.as_ref()
    }

    /// Lower-bound constant at `v`: `lambda(x, v) >= -c` for all `x` off the support.
    pub fn presentation_constant(&self, v: &Place) -> Result<Option<LogMag>> {
        if self.kind != PresentationKind::Default {
            return Ok(None);
        }
        if v.is_archimedean() {
            return Ok(self.c_arch.clone());
        }
        let v = self.place_for(v)?;
        let mut c = LogMag::zero();
        for (_, a) in self.sd.terms() {
            c = c.max(&a.log_abs(&v)?);
        }
        Ok(Some(c.scale(&self.weight)))
    }

    /// `s_D(x) = 0`, decided exactly in the coefficient field.
    pub fn in_support(&self, x: &ProjPoint) -> bool {
        self.sd.eval_rational(&x.as_rationals()).vanishes()
    }

    /// Attaches the canonical extension when the divisor lives over a quadratic field.
    pub(crate) fn place_for(&self, v: &Place) -> Result<Place> {
        match self.field() {
            Some(f) => v.canonical_extension(f),
            None => Ok(*v),
        }
    }
}
