//! JSON experiment configuration.
//!
//! The accepted shape is published in `schema/experiment.schema.json`; serde
//! enforces the structure and [`ExperimentConfig::validate`] the cross-field
//! constraints (primes, arity, degrees).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::exactnum::{parse_rational, rat, Place, QuadElem, QuadField, Rational};
use crate::polydyn::{normalize, HomogPoly, Morphism, ProjPoint};
use crate::weil::{AnyDivisor, DivisorPresentation};
use crate::{Error, Result};

/// The published JSON schema for experiment configs.
pub const SCHEMA: &str = include_str!("../../schema/experiment.schema.json");

/// A rational written as a JSON integer or as a string such as `"-3/4"` or `"0.25"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RatSpec {
    Int(i64),
    Text(String),
}

impl RatSpec {
    pub fn value(&self) -> Result<Rational> {
        match self {
            RatSpec::Int(n) => Ok(rat(*n)),
            RatSpec::Text(s) => parse_rational(s).map_err(|e| Error::Config(e.to_string())),
        }
    }
}

/// A coefficient: rational, or `a + b sqrt d` as `{"a": .., "b": ..}`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CoeffSpec {
    Rational(RatSpec),
    Quadratic { a: RatSpec, b: RatSpec },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exp: Vec<u32>,
    pub coeff: CoeffSpec,
}

/// A form: an expression string over `Q` or an explicit term list.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FormSpec {
    Text(String),
    Terms(Vec<TermSpec>),
}

impl FormSpec {
    pub fn rational(&self, nvars: usize) -> Result<HomogPoly<Rational>> {
        match self {
            FormSpec::Text(s) => HomogPoly::parse(s, nvars),
            FormSpec::Terms(ts) => {
                let terms = ts
                    .iter()
                    .map(|t| match &t.coeff {
                        CoeffSpec::Rational(q) => Ok((t.exp.clone(), q.value()?)),
                        CoeffSpec::Quadratic { .. } => Err(Error::Config(
                            "quadratic coefficient in a form over Q (set divisor.field)".into(),
                        )),
                    })
                    .collect::<Result<Vec<_>>>()?;
                nonzero(HomogPoly::from_terms(nvars, (), terms)?)
            }
        }
    }

    pub fn quadratic(&self, nvars: usize, field: QuadField) -> Result<HomogPoly<QuadElem>> {
        match self {
            FormSpec::Text(s) => Ok(HomogPoly::parse(s, nvars)?.to_quadratic(field)),
            FormSpec::Terms(ts) => {
                let terms = ts
                    .iter()
                    .map(|t| {
                        let c = match &t.coeff {
                            CoeffSpec::Rational(q) => QuadElem::from_rational(field, q.value()?),
                            CoeffSpec::Quadratic { a, b } => QuadElem::new(field, a.value()?, b.value()?),
                        };
                        Ok((t.exp.clone(), c))
                    })
                    .collect::<Result<Vec<_>>>()?;
                nonzero(HomogPoly::from_terms(nvars, field, terms)?)
            }
        }
    }
}

fn nonzero<C: crate::exactnum::Scalar>(p: HomogPoly<C>) -> Result<HomogPoly<C>> {
    if p.is_zero() {
        Err(Error::Config("form is zero".into()))
    } else {
        Ok(p)
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PowerSpec {
    pub nvars: usize,
    pub degree: u32,
}

/// Exactly one of `forms`, `exponent_matrix`, `power`.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub forms: Option<Vec<String>>,
    pub exponent_matrix: Option<Vec<Vec<u32>>>,
    pub power: Option<PowerSpec>,
}

impl MapSpec {
    pub fn build(&self) -> Result<Morphism> {
        match (&self.forms, &self.exponent_matrix, &self.power) {
            (Some(forms), None, None) => {
                let refs: Vec<&str> = forms.iter().map(String::as_str).collect();
                Morphism::parse(&refs)
            }
            (None, Some(a), None) => Morphism::from_exponent_matrix(a),
            (None, None, Some(p)) => {
                if p.nvars < 2 || p.degree == 0 {
                    return Err(Error::Config("power map needs nvars >= 2 and degree >= 1".into()));
                }
                Ok(Morphism::power_map(p.nvars, p.degree))
            }
            _ => Err(Error::Config(
                "map needs exactly one of forms, exponent_matrix, power".into(),
            )),
        }
    }
}

/// Exactly one of `form`, `hyperplanes`; `numer`/`denom` give a custom presentation.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    /// `d` for coefficients in `Q(sqrt d)`.
    pub field: Option<i64>,
    pub form: Option<FormSpec>,
    pub hyperplanes: Option<Vec<FormSpec>>,
    pub weight: Option<RatSpec>,
    pub numer: Option<Vec<FormSpec>>,
    pub denom: Option<Vec<FormSpec>>,
}

/// A resolved divisor; `hyperplanes` is set when it was given as distinct hyperplanes.
#[derive(Clone, Debug)]
pub struct ResolvedDivisor {
    pub divisor: AnyDivisor,
    pub hyperplane_mode: bool,
}

impl DivisorSpec {
    pub fn field(&self) -> Result<Option<QuadField>> {
        self.field.map(QuadField::new).transpose()
    }

    pub fn build(&self, nvars: usize) -> Result<ResolvedDivisor> {
        let weight = self.weight.as_ref().map(RatSpec::value).transpose()?.unwrap_or(rat(1));
        let divisor = match self.field()? {
            None => AnyDivisor::Rational(self.build_with(nvars, weight, |f| f.rational(nvars))?),
            Some(k) => AnyDivisor::Quadratic(self.build_with(nvars, weight, |f| f.quadratic(nvars, k))?),
        };
        Ok(ResolvedDivisor {
            divisor,
            hyperplane_mode: self.hyperplanes.is_some(),
        })
    }

    fn build_with<C: crate::exactnum::Scalar>(
        &self,
        nvars: usize,
        weight: Rational,
        lift: impl Fn(&FormSpec) -> Result<HomogPoly<C>>,
    ) -> Result<DivisorPresentation<C>> {
        let sd = match (&self.form, &self.hyperplanes) {
            (Some(f), None) => lift(f)?,
            (None, Some(hs)) => {
                let hs = hs.iter().map(&lift).collect::<Result<Vec<_>>>()?;
                hyperplane_product(nvars, &hs)?
            }
            _ => return Err(Error::Config("divisor needs exactly one of form, hyperplanes".into())),
        };
        match (&self.numer, &self.denom) {
            (None, None) => DivisorPresentation::hypersurface(sd)?.with_weight(weight),
            (Some(n), Some(d)) => {
                let numer = n.iter().map(&lift).collect::<Result<Vec<_>>>()?;
                let denom = d.iter().map(&lift).collect::<Result<Vec<_>>>()?;
                DivisorPresentation::custom(sd, numer, denom, weight)
            }
            _ => Err(Error::Config("custom presentations need both numer and denom".into())),
        }
    }
}

fn hyperplane_product<C: crate::exactnum::Scalar>(nvars: usize, hs: &[HomogPoly<C>]) -> Result<HomogPoly<C>> {
    let Some(first) = hs.first() else {
        return Err(Error::Config("hyperplane list is empty".into()));
    };
    for h in hs {
        if h.degree() != 1 {
            return Err(Error::Config(format!("hyperplane {h:?} is not linear")));
        }
    }
    for (i, a) in hs.iter().enumerate() {
        for b in &hs[i + 1..] {
            if proportional(nvars, a, b) {
                return Err(Error::Config("hyperplanes must be distinct".into()));
            }
        }
    }
    hs[1..].iter().try_fold(first.clone(), |acc, h| acc.mul(h))
}

/// `a` and `b` are nonzero linear forms; proportional iff every 2x2 minor vanishes.
fn proportional<C: crate::exactnum::Scalar>(nvars: usize, a: &HomogPoly<C>, b: &HomogPoly<C>) -> bool {
    let unit = |i: usize| {
        let mut e = vec![0u32; nvars];
        e[i] = 1;
        e
    };
    let ca: Vec<C> = (0..nvars).map(|i| a.coeff(&unit(i))).collect();
    let cb: Vec<C> = (0..nvars).map(|i| b.coeff(&unit(i))).collect();
    (0..nvars).all(|i| (0..nvars).all(|j| (ca[i].clone() * cb[j].clone() - ca[j].clone() * cb[i].clone()).vanishes()))
}

/// Point sample for hyperplane-mode gap runs.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    /// Multiplicative height bound on primitive integer coordinates.
    pub height_bound: u64,
    /// Number of distinct points drawn; all points when absent.
    pub size: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LctSpec {
    /// Generators of a monomial ideal, as exponent vectors.
    pub generators: Option<Vec<Vec<u32>>>,
    /// A form whose threshold is bracketed instead.
    pub form: Option<String>,
    pub nvars: Option<usize>,
    #[serde(default = "default_search_bound")]
    pub bound: u32,
}

fn default_search_bound() -> u32 {
    6
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CnSpec {
    pub multiplicities: Vec<u64>,
    pub dim: usize,
    pub delta: RatSpec,
    pub m: u64,
    pub n: u32,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EfdSpec {
    /// Exact spectral computation for a monomial map with this exponent matrix.
    pub exponent_matrix: Option<Vec<Vec<u32>>>,
    /// Target coordinate (0-based) of the exponent matrix.
    #[serde(default)]
    pub target: usize,
    /// Number of pullbacks for the family estimate.
    pub depth: Option<usize>,
    /// Chart valuation bound `B`.
    #[serde(default = "default_chart_bound")]
    pub bound: u32,
}

fn default_chart_bound() -> u32 {
    2
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub map: Option<MapSpec>,
    pub seed: Option<Vec<RatSpec>>,
    pub divisor: Option<DivisorSpec>,
    /// Place specs such as `"inf"`, `"3"`, `"7:split1"`.
    #[serde(default, rename = "S")]
    pub places: Vec<String>,
    /// `L = O(twist)`.
    #[serde(default = "default_twist")]
    pub twist: i64,
    #[serde(rename = "N")]
    pub depth: Option<usize>,
    pub eps: Option<RatSpec>,
    pub eps0: Option<RatSpec>,
    pub e: Option<RatSpec>,
    pub eps_prime: Option<RatSpec>,
    pub sample: Option<SampleSpec>,
    pub lct: Option<LctSpec>,
    pub cn: Option<CnSpec>,
    pub efd: Option<EfdSpec>,
    pub wellformed_trials: Option<usize>,
    pub outputs: Option<OutputSpec>,
}

fn default_twist() -> i64 {
    1
}

pub const DEFAULT_DEPTH: usize = 8;
pub const DEFAULT_WELLFORMED_TRIALS: usize = 32;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Cross-field checks; everything that can be decided without iterating.
    pub fn validate(&self) -> Result<()> {
        if self.twist < 1 {
            return Err(Error::Config(format!("twist {} must be at least 1", self.twist)));
        }
        let field = self.divisor.as_ref().map(DivisorSpec::field).transpose()?.flatten();
        self.places(field)?;
        for q in [&self.eps, &self.eps0, &self.e].into_iter().flatten() {
            if q.value()? <= rat(0) {
                return Err(Error::Config("eps, eps0 and e must be positive".into()));
            }
        }
        if let Some(q) = &self.eps_prime {
            if q.value()? < rat(0) {
                return Err(Error::Config("eps_prime must be nonnegative".into()));
            }
        }
        if let Some(map) = &self.map {
            let f = map.build()?;
            if let Some(seed) = &self.seed {
                if seed.len() != f.nvars() {
                    return Err(Error::Config(format!(
                        "seed has {} coordinates, map acts on P^{}",
                        seed.len(),
                        f.dim()
                    )));
                }
            }
            if let Some(d) = &self.divisor {
                d.build(f.nvars())?;
            }
        }
        if let Some(lct) = &self.lct {
            if lct.generators.is_some() == lct.form.is_some() {
                return Err(Error::Config("lct needs exactly one of generators, form".into()));
            }
        }
        Ok(())
    }

    pub fn morphism(&self) -> Result<Morphism> {
        self.map.as_ref().ok_or_else(|| missing("map"))?.build()
    }

    pub fn seed_point(&self) -> Result<ProjPoint> {
        let seed = self.seed.as_ref().ok_or_else(|| missing("seed"))?;
        normalize(&seed.iter().map(RatSpec::value).collect::<Result<Vec<_>>>()?)
    }

    pub fn resolved_divisor(&self, nvars: usize) -> Result<ResolvedDivisor> {
        self.divisor.as_ref().ok_or_else(|| missing("divisor"))?.build(nvars)
    }

    pub fn places(&self, field: Option<QuadField>) -> Result<Vec<Place>> {
        self.places
            .iter()
            .map(|s| Place::parse(s, field).map_err(|e| Error::Config(format!("place {s:?}: {e}"))))
            .collect()
    }

    pub fn rational(&self, which: &str) -> Result<Option<Rational>> {
        let spec = match which {
            "eps" => &self.eps,
            "eps0" => &self.eps0,
            "e" => &self.e,
            "eps_prime" => &self.eps_prime,
            _ => return Err(Error::InvalidArgument(format!("unknown parameter {which}"))),
        };
        spec.as_ref().map(RatSpec::value).transpose()
    }

    pub fn depth_or_default(&self) -> usize {
        self.depth.unwrap_or(DEFAULT_DEPTH)
    }
}

fn missing(what: &str) -> Error {
    Error::Config(format!("config has no {what}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARING: &str = r#"{
        "map": {"forms": ["x0^2", "x1^2"]},
        "seed": [2, 1],
        "divisor": {"form": "x0 - 3*x1"},
        "S": ["inf", "3"],
        "N": 8
    }"#;

    #[test]
    fn parses_basic_config() {
        let cfg = ExperimentConfig::from_json(SQUARING).unwrap();
        let f = cfg.morphism().unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(cfg.seed_point().unwrap(), ProjPoint::from_i64(&[2, 1]).unwrap());
        assert_eq!(cfg.places(None).unwrap().len(), 2);
        assert_eq!(cfg.resolved_divisor(2).unwrap().divisor.degree(), 1);
    }

    #[test]
    fn rejects_composite_place() {
        let bad = SQUARING.replace("\"3\"", "\"9\"");
        assert!(matches!(ExperimentConfig::from_json(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_arity_mismatch() {
        let bad = SQUARING.replace("[2, 1]", "[2, 1, 1]");
        assert!(ExperimentConfig::from_json(&bad).is_err());
        let bad = SQUARING.replace("x0 - 3*x1", "x0 - 3*x2");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = SQUARING.replace("\"N\": 8", "\"N\": 8, \"depth\": 3");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn quadratic_coefficients() {
        let text = r#"{
            "map": {"power": {"nvars": 2, "degree": 2}},
            "seed": ["1/2", 3],
            "divisor": {"field": 2, "form": [
                {"exp": [1, 0], "coeff": 1},
                {"exp": [0, 1], "coeff": {"a": 0, "b": -1}}
            ]},
            "S": ["7:split1", "inf:real-"]
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.seed_point().unwrap(), ProjPoint::from_i64(&[1, 6]).unwrap());
        let d = cfg.resolved_divisor(2).unwrap().divisor;
        assert_eq!(d.field().map(|k| k.d()), Some(2));
        assert!(cfg.places(d.field()).is_ok());
    }

    #[test]
    fn hyperplanes_must_be_distinct_and_linear() {
        let with = |hs: &str| SQUARING.replace(r#"{"form": "x0 - 3*x1"}"#, &format!(r#"{{"hyperplanes": {hs}}}"#));
        let cfg = ExperimentConfig::from_json(&with(r#"["x0", "x1", "x0 - x1"]"#)).unwrap();
        let d = cfg.resolved_divisor(2).unwrap();
        assert!(d.hyperplane_mode);
        assert_eq!(d.divisor.degree(), 3);
        assert!(ExperimentConfig::from_json(&with(r#"["x0", "2*x0"]"#)).is_err());
        assert!(ExperimentConfig::from_json(&with(r#"["x0^2"]"#)).is_err());
    }

    #[test]
    fn schema_is_valid_json() {
        let v: serde_json::Value = serde_json::from_str(SCHEMA).unwrap();
        assert!(v["properties"]["map"].is_object());
    }
}
