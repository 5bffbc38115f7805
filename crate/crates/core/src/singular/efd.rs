use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{rat, Rational, Scalar};
use crate::polydyn::{pullback, pullback_iterate, HomogPoly, Morphism, UniPoly};
use crate::{Error, Result};

use super::lct::MonomialIdeal;

/// Exponent matrix of the torus monomial map `u_j -> prod_i u_i^{A_ij}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMatrix {
    a: Vec<Vec<u32>>,
}

impl ExponentMatrix {
    pub fn new(a: Vec<Vec<u32>>) -> Result<Self> {
        let k = a.len();
        if k == 0 || a.iter().any(|r| r.len() != k) {
            return Err(Error::Shape("exponent matrix must be square and nonempty".into()));
        }
        if (0..k).any(|j| a.iter().all(|r| r[j] == 0)) {
            return Err(Error::InvalidArgument("exponent matrix has a zero column".into()));
        }
        Ok(ExponentMatrix { a })
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.a
    }

    pub fn size(&self) -> usize {
        self.a.len()
    }

    /// `A^n` for `n >= 0`, exactly.
    pub fn power(&self, n: usize) -> Vec<Vec<BigUint>> {
        let k = self.size();
        let mut acc: Vec<Vec<BigUint>> = (0..k)
            .map(|i| (0..k).map(|j| BigUint::from(u32::from(i == j))).collect())
            .collect();
        for _ in 0..n {
            acc = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| (0..k).fold(BigUint::zero(), |s, l| s + &acc[i][l] * self.a[l][j]))
                        .collect()
                })
                .collect();
        }
        acc
    }

    /// `max_i (A^n)_{ij}` for `n = 1..=depth`.
    pub fn column_sup(&self, j: usize, depth: usize) -> Vec<BigUint> {
        let k = self.size();
        let mut col: Vec<BigUint> = (0..k).map(|i| BigUint::from(u32::from(i == j))).collect();
        let mut out = Vec::with_capacity(depth);
        for _ in 0..depth {
            // (A^{n+1})_{.j} = A (A^n)_{.j}
            col = (0..k)
                .map(|i| (0..k).fold(BigUint::zero(), |s, l| s + self.a[i][l] * &col[l]))
                .collect();
            out.push(col.iter().max().cloned().unwrap_or_default());
        }
        out
    }

    /// Indices `i` from which `j` is reachable (including `j`).
    pub fn reaching(&self, j: usize) -> Vec<usize> {
        let reach = self.closure();
        (0..self.size()).filter(|&i| i == j || reach[i][j]).collect()
    }

    /// Transitive closure of the support graph `i -> l` when `A_il > 0`.
    fn closure(&self) -> Vec<Vec<bool>> {
        let k = self.size();
        let mut r: Vec<Vec<bool>> = self.a.iter().map(|row| row.iter().map(|&x| x > 0).collect()).collect();
        for m in 0..k {
            for i in 0..k {
                if r[i][m] {
                    for l in 0..k {
                        if r[m][l] {
                            r[i][l] = true;
                        }
                    }
                }
            }
        }
        r
    }
}

/// Characteristic polynomial `det(tI - M)` (Faddeev–LeVerrier), coefficients low to high.
pub fn characteristic_polynomial(m: &[Vec<Rational>]) -> UniPoly<Rational> {
    let n = m.len();
    let mut coeffs = vec![rat(0); n + 1];
    coeffs[n] = rat(1);
    let mut mk = vec![vec![rat(0); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![rat(0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = rat(0);
                for l in 0..n {
                    s += &m[i][l] * &mk[l][j];
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = rat(0);
        for i in 0..n {
            for l in 0..n {
                tr += &m[i][l] * &mk[l][i];
            }
        }
        coeffs[n - k] = -tr / rat(k as i64);
    }
    UniPoly::new(coeffs, ())
}

/// Growth rate of the pullbacks of one coordinate divisor under a monomial map.
#[derive(Clone, Debug, PartialEq)]
pub struct EfdExact {
    /// The exact value when it is an integer (always when the reaching block is triangular).
    pub exact: Option<Rational>,
    /// Certified enclosure of the spectral radius.
    pub lo: Rational,
    pub hi: Rational,
    /// No growth: `e_f = 1` by convention.
    pub no_growth: bool,
    pub reaching: Vec<usize>,
    pub charpoly: UniPoly<Rational>,
}

impl EfdExact {
    pub fn value_f64(&self) -> f64 {
        match &self.exact {
            Some(q) => q.to_f64().unwrap_or(f64::NAN),
            None => ((&self.lo + &self.hi) / rat(2)).to_f64().unwrap_or(f64::NAN),
        }
    }
}

/// Spectral radius of `A` restricted to the indices reaching `target`.
pub fn efd_monomial_exact(a: &ExponentMatrix, target: usize) -> Result<EfdExact> {
    if target >= a.size() {
        return Err(Error::InvalidArgument(format!("column {target} out of range")));
    }
    let reaching = a.reaching(target);
    let sub: Vec<Vec<Rational>> = reaching
        .iter()
        .map(|&i| reaching.iter().map(|&j| rat(a.rows()[i][j] as i64)).collect())
        .collect();
    let charpoly = characteristic_polynomial(&sub);
    let closure = a.closure();
    let triangular = reaching
        .iter()
        .all(|&i| reaching.iter().all(|&j| i == j || !(closure[i][j] && closure[j][i])));
    let (mut exact, mut lo, mut hi) = (None, rat(0), rat(0));
    if triangular {
        let d = reaching.iter().map(|&i| a.rows()[i][i]).max().unwrap_or(0);
        exact = Some(rat(d as i64));
        lo = rat(d as i64);
        hi = lo.clone();
    } else {
        let width = rat(1) / rat(1i64 << 40);
        if let Some((l, h)) = charpoly.largest_real_root(&width) {
            let bound = charpoly.root_bound();
            for cand in [l.floor(), h.ceil()] {
                if charpoly.eval(&cand).is_zero() && charpoly.count_roots(&cand, &bound) == 0 {
                    exact = Some(cand.clone());
                }
            }
            match &exact {
                Some(q) => {
                    lo = q.clone();
                    hi = q.clone();
                }
                None => {
                    lo = l;
                    hi = h;
                }
            }
        }
    }
    let no_growth = hi <= rat(1);
    if no_growth {
        exact = Some(rat(1));
        lo = rat(1);
        hi = rat(1);
    }
    Ok(EfdExact {
        exact,
        lo,
        hi,
        no_growth,
        reaching,
        charpoly,
    })
}

/// Largest `k` with `x_i^k | (f^m)^* G`.
pub fn ord_pullback_hyperplane<C: Scalar>(
    f: &Morphism,
    g: &HomogPoly<C>,
    m: usize,
    i: usize,
    cap: usize,
) -> Result<u32> {
    if i >= g.nvars() {
        return Err(Error::InvalidArgument(format!("coordinate {i} out of range")));
    }
    let h = pullback_iterate(f, g, m, cap)?;
    h.ord_var(i)
        .ok_or_else(|| Error::Degenerate("pullback vanishes identically".into()))
}

/// The explicit family of divisors over `P^n` used to estimate `e_f(D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuationFamily {
    /// Coordinate hyperplanes `x_i = 0` in the family.
    pub hyperplanes: Vec<usize>,
    /// Include the components of the pullback (multiplicity of factors).
    pub components: bool,
    /// Monomial valuations `v in {0..B}^n` at each chart origin, normalised by `sum v`.
    pub chart_bound: Option<u32>,
    /// Random lines used to read off component multiplicities on `P^n`, `n >= 2`.
    pub line_trials: usize,
}

impl ValuationFamily {
    pub fn standard(nvars: usize, bound: u32) -> Self {
        ValuationFamily {
            hyperplanes: (0..nvars).collect(),
            components: true,
            chart_bound: Some(bound),
            line_trials: 3,
        }
    }
}

/// Maximal multiplicity of a component of `{G = 0}`; exact on `P^1`.
pub fn component_multiplicity<C: Scalar>(g: &HomogPoly<C>, trials: usize, seed: u64) -> Result<(usize, bool)> {
    fn binary<C: Scalar>(b: &HomogPoly<C>) -> Result<usize> {
        let at_inf = b.ord_var(1).unwrap_or(0) as usize;
        Ok(at_inf.max(b.dehomogenize_binary()?.max_multiplicity()))
    }
    if g.is_zero() {
        return Err(Error::Degenerate("zero form".into()));
    }
    if g.nvars() == 2 {
        return Ok((binary(g)?, true));
    }
    let n = g.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<usize> = None;
    let mut attempts = 0;
    while best.is_none() || attempts < trials {
        attempts += 1;
        if attempts > trials + 50 {
            break;
        }
        let p: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-7..=7))).collect();
        let q: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-7..=7))).collect();
        let line = g.restrict_to_line(&p, &q)?;
        if line.is_zero() {
            continue;
        }
        let m = binary(&line)?;
        best = Some(best.map_or(m, |b| b.min(m)));
    }
    best.map(|m| (m, false))
        .ok_or_else(|| Error::Degenerate("every sampled line lies in the divisor".into()))
}

/// Largest normalised monomial order `ord_v(G) / sum v` over the charts.
fn chart_valuation_max<C: Scalar>(g: &HomogPoly<C>, bound: u32) -> Result<Rational> {
    let n = g.nvars();
    let mut best = rat(0);
    for chart in 0..n {
        let gens: Vec<Vec<u32>> = g
            .terms()
            .map(|(e, _)| {
                e.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != chart)
                    .map(|(_, &a)| a)
                    .collect()
            })
            .collect();
        let ideal = MonomialIdeal::new(n - 1, gens)?;
        if ideal.is_unit() {
            continue;
        }
        let mut v = vec![0u32; n - 1];
        'odometer: loop {
            let mut i = 0;
            loop {
                if i == v.len() {
                    break 'odometer;
                }
                if v[i] < bound {
                    v[i] += 1;
                    break;
                }
                v[i] = 0;
                i += 1;
            }
            let s: u64 = v.iter().map(|&x| x as u64).sum();
            let val = Rational::new(ideal.ord(&v).into(), s.into());
            if val > best {
                best = val;
            }
        }
    }
    Ok(best)
}

/// Largest order of `G` over the family.
pub fn family_order<C: Scalar>(g: &HomogPoly<C>, family: &ValuationFamily, seed: u64) -> Result<(Rational, bool)> {
    let mut best = rat(0);
    let mut exact = true;
    for &i in &family.hyperplanes {
        if i >= g.nvars() {
            return Err(Error::InvalidArgument(format!("hyperplane x{i} out of range")));
        }
        best = best.max(rat(g.ord_var(i).unwrap_or(0) as i64));
    }
    if family.components {
        let (m, ex) = component_multiplicity(g, family.line_trials, seed)?;
        exact &= ex;
        best = best.max(rat(m as i64));
    }
    if let Some(b) = family.chart_bound {
        best = best.max(chart_valuation_max(g, b)?);
    }
    Ok((best, exact))
}

/// Family-restricted estimate of `e_f(D)` from the orders `s_n` of `(f^n)^* D`.
#[derive(Clone, Debug, PartialEq)]
pub struct EfdEstimate {
    /// `s_1, .., s_N`.
    pub s: Vec<Rational>,
    /// `s_{n+1} / s_n`.
    pub ratios: Vec<Rational>,
    /// `s_n^{1/n}`.
    pub roots: Vec<f64>,
    pub estimate: f64,
    /// All `s_n <= 1`: reported as `e = 1`.
    pub no_growth: bool,
    /// Component multiplicities were read off random lines.
    pub probabilistic: bool,
}

pub fn efd_estimate<C: Scalar>(
    f: &Morphism,
    d: &HomogPoly<C>,
    depth: usize,
    family: &ValuationFamily,
    cap: usize,
) -> Result<EfdEstimate> {
    if depth > cap {
        return Err(Error::CompositionCap { requested: depth, cap });
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut g = d.clone();
    let mut s = Vec::with_capacity(depth);
    let mut probabilistic = false;
    for n in 1..=depth {
        g = pullback(f, &g)?;
        if g.is_zero() {
            return Err(Error::Degenerate(format!("pullback by f^{n} vanishes identically")));
        }
        let (ord, exact) = family_order(&g, family, n as u64)?;
        probabilistic |= !exact;
        s.push(ord);
    }
    let ratios: Vec<Rational> = s
        .windows(2)
        .map(|w| if w[0].is_zero() { rat(0) } else { &w[1] / &w[0] })
        .collect();
    let roots: Vec<f64> = s
        .iter()
        .enumerate()
        .map(|(i, q)| q.to_f64().unwrap_or(f64::INFINITY).powf(1.0 / (i + 1) as f64))
        .collect();
    let no_growth = s.iter().all(|q| *q <= rat(1));
    let estimate = if no_growth {
        1.0
    } else {
        ratios.last().and_then(|r| r.to_f64()).unwrap_or(roots[0])
    };
    Ok(EfdEstimate {
        s,
        ratios,
        roots,
        estimate,
        no_growth,
        probabilistic,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct M0Report {
    /// Smallest `m0` with `s_m <= (e + eps)^m` for all `m0 <= m <= N`.
    pub m0: Option<usize>,
    pub depth: usize,
    /// `(m, 1/s_m, 1/(e+eps)^m, holds)`.
    pub rows: Vec<(usize, Rational, Rational, bool)>,
}

/// The `m0` search on a precomputed order sequence `s_1..s_N`.
pub fn remark44_m0_from_sequence(e: &Rational, eps: &Rational, s: &[Rational]) -> Result<M0Report> {
    if *eps <= rat(0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let base = e + eps;
    let mut rows = Vec::with_capacity(s.len());
    let mut pow = rat(1);
    for (i, sm) in s.iter().enumerate() {
        pow *= &base;
        let lb = if sm.is_zero() { rat(1) } else { sm.recip() };
        let target = pow.recip();
        let holds = lb >= target;
        rows.push((i + 1, lb, target, holds));
    }
    let m0 = match rows.iter().rposition(|r| !r.3) {
        None if !rows.is_empty() => Some(1),
        None => None,
        Some(k) if k + 1 < rows.len() => Some(k + 2),
        Some(_) => None,
    };
    Ok(M0Report {
        m0,
        depth: s.len(),
        rows,
    })
}

pub fn remark44_m0<C: Scalar>(
    e: &Rational,
    eps: &Rational,
    f: &Morphism,
    d: &HomogPoly<C>,
    depth: usize,
    family: &ValuationFamily,
    cap: usize,
) -> Result<M0Report> {
    let est = efd_estimate(f, d, depth, family, cap)?;
    remark44_m0_from_sequence(e, eps, &est.s)
}

/// `gamma = max(m_i) (dim X + 1)` and `c_n = (sum m_i - gamma) / (delta^n m)`.
pub fn cn_calculator(
    m_list: &[u64],
    dim_x: usize,
    delta: &Rational,
    m: u64,
    n_iter: u32,
) -> Result<(Rational, Rational)> {
    if m_list.is_empty() {
        return Err(Error::InvalidArgument("empty multiplicity list".into()));
    }
    if m_list.contains(&0) || m == 0 || n_iter == 0 || *delta <= rat(0) {
        return Err(Error::InvalidArgument("inputs must be positive".into()));
    }
    let max = *m_list.iter().max().unwrap();
    let gamma = Rational::from_integer((max as u128 * (dim_x as u128 + 1)).into());
    let sum = Rational::from_integer(m_list.iter().map(|&x| x as u128).sum::<u128>().into());
    let denom = num_traits::pow(delta.clone(), n_iter as usize) * Rational::from_integer(m.into());
    Ok((gamma.clone(), (sum - gamma) / denom))
}
