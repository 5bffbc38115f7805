use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::point::ProjPoint;
use super::poly::HomogPoly;
use crate::exactnum::{linalg, primes::is_prime, rat, Rational};
use crate::{Error, Result};

/// How much is known about the absence of common zeros of the forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Wellformedness {
    Verified,
    Probabilistic { trials: usize },
    Unchecked,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WellformedOutcome {
    /// No common zero over `Q-bar` (nonzero resultant).
    Verified,
    /// No common zero was found; not a proof.
    Probabilistic { trials: usize },
    /// A common zero exists; `witness` is a rational one when it could be found.
    Refuted { witness: Option<ProjPoint> },
}

/// Self-map of `P^n` given by `n + 1` forms over `Q` of a common degree `d >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Morphism {
    forms: Vec<HomogPoly<Rational>>,
    /// Same forms scaled by a common denominator, for integer evaluation.
    int_forms: Vec<Vec<(Vec<u32>, BigInt)>>,
    wellformedness: Wellformedness,
}

impl Morphism {
    /// Builds the map without checking for common zeros.
    pub fn new(forms: Vec<HomogPoly<Rational>>) -> Result<Self> {
        let n1 = forms.len();
        if n1 < 2 {
            return Err(Error::Shape("a self-map of P^n needs at least two forms".into()));
        }
        if forms.iter().any(|f| f.nvars() != n1) {
            return Err(Error::Shape(format!("every form must be in {n1} variables")));
        }
        let d = forms[0].degree();
        if d == 0 || forms.iter().any(|f| f.degree() != d) {
            return Err(Error::Shape("forms must share a degree >= 1".into()));
        }
        if forms.iter().all(HomogPoly::is_zero) {
            return Err(Error::Shape("all forms are zero".into()));
        }
        let den = forms
            .iter()
            .fold(BigInt::from(1), |acc, f| acc.lcm(&f.coefficient_denominator()));
        let int_forms = forms
            .iter()
            .map(|f| {
                f.terms()
                    .map(|(e, c)| (e.clone(), (c * Rational::from_integer(den.clone())).to_integer()))
                    .collect()
            })
            .collect();
        Ok(Morphism {
            forms,
            int_forms,
            wellformedness: Wellformedness::Unchecked,
        })
    }

    /// Builds the map and runs [`wellformed_check`]; refuses maps with a common zero.
    pub fn checked(forms: Vec<HomogPoly<Rational>>, trials: usize) -> Result<Self> {
        let mut f = Morphism::new(forms)?;
        match wellformed_check(&f, trials) {
            WellformedOutcome::Verified => f.wellformedness = Wellformedness::Verified,
            WellformedOutcome::Probabilistic { trials } => f.wellformedness = Wellformedness::Probabilistic { trials },
            WellformedOutcome::Refuted { witness } => {
                return Err(Error::InvalidArgument(match witness {
                    Some(w) => format!("forms have a common zero at {w}"),
                    None => "forms have a common zero over an extension".into(),
                }))
            }
        }
        Ok(f)
    }

    /// Parses one expression per coordinate (see [`HomogPoly::parse`]).
    pub fn parse(forms: &[&str]) -> Result<Self> {
        let n1 = forms.len();
        Morphism::new(forms.iter().map(|s| HomogPoly::parse(s, n1)).collect::<Result<_>>()?)
    }

    /// `x_i -> x_i^d`.
    pub fn power_map(nvars: usize, d: u32) -> Self {
        let forms = (0..nvars)
            .map(|i| {
                let mut e = vec![0; nvars];
                e[i] = d;
                HomogPoly::monomial(e, rat(1), ())
            })
            .collect();
        Morphism::new(forms).expect("power map is well formed")
    }

    pub fn identity(nvars: usize) -> Self {
        Self::power_map(nvars, 1)
    }

    /// Homogenisation on `P^k` (chart `x_0 = 1`) of the monomial map
    /// `u_j -> prod_i u_i^{A_ij}` of the torus `(u_1, .., u_k)`.
    pub fn from_exponent_matrix(a: &[Vec<u32>]) -> Result<Self> {
        let k = a.len();
        if k == 0 || a.iter().any(|r| r.len() != k) {
            return Err(Error::Shape("exponent matrix must be square and nonempty".into()));
        }
        let col_sums: Vec<u32> = (0..k).map(|j| (0..k).map(|i| a[i][j]).sum()).collect();
        let d = col_sums.iter().copied().max().unwrap_or(0).max(1);
        let mut forms = Vec::with_capacity(k + 1);
        let mut e0 = vec![0; k + 1];
        e0[0] = d;
        forms.push(HomogPoly::monomial(e0, rat(1), ()));
        for j in 0..k {
            let mut e = vec![0; k + 1];
            e[0] = d - col_sums[j];
            for i in 0..k {
                e[i + 1] = a[i][j];
            }
            forms.push(HomogPoly::monomial(e, rat(1), ()));
        }
        Morphism::new(forms)
    }

    pub fn forms(&self) -> &[HomogPoly<Rational>] {
        &self.forms
    }

    pub fn nvars(&self) -> usize {
        self.forms.len()
    }

    /// `n` for a self-map of `P^n`.
    pub fn dim(&self) -> usize {
        self.forms.len() - 1
    }

    pub fn degree(&self) -> u32 {
        self.forms[0].degree()
    }

    pub fn wellformedness(&self) -> &Wellformedness {
        &self.wellformedness
    }

    pub(crate) fn record_outcome(&mut self, outcome: &WellformedOutcome) {
        self.wellformedness = match outcome {
            WellformedOutcome::Verified => Wellformedness::Verified,
            WellformedOutcome::Probabilistic { trials } => Wellformedness::Probabilistic { trials: *trials },
            WellformedOutcome::Refuted { .. } => Wellformedness::Unchecked,
        };
    }

    /// Stable content hash (hex SHA-256 of a canonical rendering of the forms).
    pub fn id(&self) -> String {
        let mut s = format!("orbitweil-morphism-v1;{};{}", self.nvars(), self.degree());
        for f in &self.forms {
            s.push('|');
            for (e, c) in f.terms() {
                let exps: Vec<String> = e.iter().map(u32::to_string).collect();
                let _ = write!(s, "{}:{}/{};", exps.join(","), c.numer(), c.denom());
            }
        }
        hex::encode(Sha256::digest(s.as_bytes()))
    }

    /// Raw (unnormalised) integer image of a point.
    pub fn evaluate_raw(&self, x: &ProjPoint) -> Vec<BigInt> {
        let d = self.degree() as usize;
        let powers: Vec<Vec<BigInt>> = x
            .coords()
            .iter()
            .map(|c| {
                let mut p = Vec::with_capacity(d + 1);
                p.push(BigInt::from(1));
                for k in 1..=d {
                    let next = &p[k - 1] * c;
                    p.push(next);
                }
                p
            })
            .collect();
        self.int_forms
            .iter()
            .map(|terms| {
                let mut acc = BigInt::zero();
                for (e, c) in terms {
                    let mut t = c.clone();
                    for (i, &k) in e.iter().enumerate() {
                        if k > 0 {
                            t *= &powers[i][k as usize];
                        }
                    }
                    acc += t;
                }
                acc
            })
            .collect()
    }

    /// `f(x)` in canonical form; a zero image means `f` is not defined at `x`.
    pub fn evaluate(&self, x: &ProjPoint) -> Result<ProjPoint> {
        if x.coords().len() != self.nvars() {
            return Err(Error::Shape(format!("point {x} does not live in P^{}", self.dim())));
        }
        ProjPoint::from_ints(self.evaluate_raw(x)).map_err(|_| Error::Indeterminate {
            step: 0,
            point: x.to_string(),
        })
    }
}

fn eval_mod(terms: &[(Vec<u32>, BigInt)], x: &[u64], p: u64) -> u64 {
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let mut acc = 0u64;
    for (e, c) in terms {
        let mut t = c.mod_floor(&BigInt::from(p)).to_u64().unwrap();
        for (xi, &k) in x.iter().zip(e) {
            for _ in 0..k {
                t = mul(t, *xi);
            }
        }
        acc = ((acc as u128 + t as u128) % p as u128) as u64;
    }
    acc
}

fn small_points(nvars: usize, bound: i64) -> Vec<ProjPoint> {
    let mut out = Vec::new();
    let width = (2 * bound + 1) as usize;
    let total = width.pow(nvars as u32);
    for mut idx in 0..total {
        let mut c = Vec::with_capacity(nvars);
        for _ in 0..nvars {
            c.push((idx % width) as i64 - bound);
            idx /= width;
        }
        if let Ok(p) = ProjPoint::from_i64(&c) {
            if p.coords().iter().zip(&c).all(|(a, b)| *a == BigInt::from(*b)) {
                out.push(p);
            }
        }
    }
    out
}

/// Checks that the forms of `f` have no common zero.
///
/// On `P^1` this is exact: the Sylvester resultant of the two binary forms.
/// On `P^n`, `n >= 2`, it searches small rational points exactly for a common
/// zero and evaluates the forms at `trials` pseudorandom points modulo three
/// 62-bit primes; a clean result is labelled probabilistic.
pub fn wellformed_check(f: &Morphism, trials: usize) -> WellformedOutcome {
    let common_zero = |x: &ProjPoint| f.evaluate_raw(x).iter().all(Zero::is_zero);
    if f.nvars() == 2 {
        let d = f.degree() as usize;
        let coeffs = |g: &HomogPoly<Rational>| -> Vec<Rational> {
            (0..=d).rev().map(|k| g.coeff(&[k as u32, (d - k) as u32])).collect()
        };
        let (a, b) = (coeffs(&f.forms[0]), coeffs(&f.forms[1]));
        let n = 2 * d;
        let mut m = vec![vec![rat(0); n]; n];
        for r in 0..d {
            for (j, c) in a.iter().enumerate() {
                m[r][r + j] = c.clone();
            }
            for (j, c) in b.iter().enumerate() {
                m[d + r][r + j] = c.clone();
            }
        }
        if !linalg::det(&m).is_zero() {
            return WellformedOutcome::Verified;
        }
        let inf = ProjPoint::from_i64(&[1, 0]).unwrap();
        if common_zero(&inf) {
            return WellformedOutcome::Refuted { witness: Some(inf) };
        }
        let (Ok(pa), Ok(pb)) = (f.forms[0].dehomogenize_binary(), f.forms[1].dehomogenize_binary()) else {
            return WellformedOutcome::Refuted { witness: None };
        };
        let g = pa.gcd(&pb);
        let witness = g
            .rational_roots()
            .and_then(|r| r.into_iter().next())
            .and_then(|t| super::point::normalize(&[t, rat(1)]).ok());
        return WellformedOutcome::Refuted { witness };
    }
    if f.nvars() <= 5 {
        for x in small_points(f.nvars(), 2) {
            if common_zero(&x) {
                return WellformedOutcome::Refuted { witness: Some(x) };
            }
        }
    }
    let mut rng = ChaCha8Rng::from_seed(seed_from_id(&f.id()));
    let primes: Vec<u64> = {
        let mut ps = Vec::new();
        let mut q = (1u64 << 62) - 1;
        while ps.len() < 3 {
            if is_prime(q) {
                ps.push(q);
            }
            q -= 2;
        }
        ps
    };
    for &p in &primes {
        for _ in 0..trials {
            let x: Vec<u64> = (0..f.nvars()).map(|_| rng.gen_range(0..p)).collect();
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            if f.int_forms.iter().all(|t| eval_mod(t, &x, p) == 0) {
                // a common zero modulo p at a random point means the forms share a factor
                return WellformedOutcome::Refuted { witness: None };
            }
        }
    }
    WellformedOutcome::Probabilistic { trials }
}

pub(crate) fn seed_from_id(id: &str) -> [u8; 32] {
    let digest = Sha256::digest(id.as_bytes());
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    seed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let sq = Morphism::parse(&["x0^2", "x1^2"]).unwrap();
        let x = ProjPoint::from_i64(&[2, 1]).unwrap();
        assert_eq!(sq.evaluate(&x).unwrap(), ProjPoint::from_i64(&[4, 1]).unwrap());
        let one = ProjPoint::from_i64(&[1, 1]).unwrap();
        assert_eq!(sq.evaluate(&one).unwrap(), one);
        let g = Morphism::parse(&["x0^2 + x1^2", "x0*x1"]).unwrap();
        assert_eq!(
            g.evaluate(&ProjPoint::from_i64(&[1, 2]).unwrap()).unwrap(),
            ProjPoint::from_i64(&[5, 2]).unwrap()
        );
    }

    #[test]
    fn rational_coefficients_evaluate_projectively() {
        let f = Morphism::parse(&["1/2*x0^2", "1/3*x1^2"]).unwrap();
        let x = ProjPoint::from_i64(&[1, 1]).unwrap();
        assert_eq!(f.evaluate(&x).unwrap(), ProjPoint::from_i64(&[3, 2]).unwrap());
    }

    #[test]
    fn indeterminacy() {
        let f = Morphism::parse(&["x0*x1", "x1^2"]).unwrap();
        let err = f.evaluate(&ProjPoint::from_i64(&[1, 0]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Indeterminate { .. }));
    }

    #[test]
    fn wellformed_examples() {
        let sq = Morphism::parse(&["x0^2", "x1^2"]).unwrap();
        assert_eq!(wellformed_check(&sq, 10), WellformedOutcome::Verified);
        let bad = Morphism::parse(&["x0*x1", "x1^2"]).unwrap();
        assert_eq!(
            wellformed_check(&bad, 10),
            WellformedOutcome::Refuted {
                witness: Some(ProjPoint::from_i64(&[1, 0]).unwrap())
            }
        );
        let shared = Morphism::parse(&["x0^2 - 4*x1^2", "x0*x1 - 2*x1^2"]).unwrap();
        assert_eq!(
            wellformed_check(&shared, 10),
            WellformedOutcome::Refuted {
                witness: Some(ProjPoint::from_i64(&[2, 1]).unwrap())
            }
        );
        let p2 = Morphism::parse(&["x0^2 + x1^2 + x2^2", "x0*x1", "x2^2"]).unwrap();
        assert_eq!(
            wellformed_check(&p2, 25),
            WellformedOutcome::Probabilistic { trials: 25 }
        );
        let mono = Morphism::from_exponent_matrix(&[vec![2, 1], vec![0, 2]]).unwrap();
        assert!(matches!(
            wellformed_check(&mono, 5),
            WellformedOutcome::Refuted { witness: Some(_) }
        ));
        assert!(Morphism::checked(bad.forms().to_vec(), 5).is_err());
    }

    #[test]
    fn ids_are_stable_and_distinct() {
        let a = Morphism::parse(&["x0^2", "x1^2"]).unwrap();
        let b = Morphism::power_map(2, 2);
        assert_eq!(a.id(), b.id());
        assert_eq!(a.id().len(), 64);
        assert_ne!(a.id(), Morphism::identity(2).id());
    }

    #[test]
    fn exponent_matrix_realisation() {
        let f = Morphism::from_exponent_matrix(&[vec![2, 1], vec![0, 2]]).unwrap();
        assert_eq!(f.degree(), 3);
        assert_eq!(f.forms()[2].to_string(), "x1*x2^2");
        assert_eq!(f.forms()[1].to_string(), "x0*x1^2");
    }
}
