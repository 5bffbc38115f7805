use super::morphism::Morphism;
use super::point::{height, ProjPoint};
use super::poly::HomogPoly;
use crate::exactnum::{LogMag, Scalar};
use crate::{Error, Result};

/// Default cap on symbolic composition depth for `(f^m)^* G`.
pub const DEFAULT_COMPOSITION_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitStep {
    pub n: usize,
    pub point: ProjPoint,
    pub h: LogMag,
}

/// A computed forward orbit prefix `x, f(x), .., f^N(x)` with heights.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    map_id: String,
    seed: ProjPoint,
    steps: Vec<OrbitStep>,
}

impl OrbitRecord {
    pub fn new(f: &Morphism, seed: ProjPoint) -> Result<Self> {
        if seed.coords().len() != f.nvars() {
            return Err(Error::Shape(format!("seed {seed} does not live in P^{}", f.dim())));
        }
        let h = height(&seed);
        Ok(OrbitRecord {
            map_id: f.id(),
            seed: seed.clone(),
            steps: vec![OrbitStep { n: 0, point: seed, h }],
        })
    }

    /// Assembles a record from stored points; heights are recomputed.
    pub(crate) fn from_points(map_id: String, points: Vec<ProjPoint>) -> Result<Self> {
        let seed = points.first().cloned().ok_or(Error::TooShort { needed: 1, have: 0 })?;
        let steps = points
            .into_iter()
            .enumerate()
            .map(|(n, point)| {
                let h = height(&point);
                OrbitStep { n, point, h }
            })
            .collect();
        Ok(OrbitRecord { map_id, seed, steps })
    }

    pub fn map_id(&self) -> &str {
        &self.map_id
    }

    pub fn seed(&self) -> &ProjPoint {
        &self.seed
    }

    pub fn steps(&self) -> &[OrbitStep] {
        &self.steps
    }

    /// Index of the last computed step.
    pub fn depth(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn last(&self) -> &ProjPoint {
        &self.steps.last().expect("orbit records are never empty").point
    }

    pub fn truncated(&self, depth: usize) -> OrbitRecord {
        let mut r = self.clone();
        r.steps.truncate(depth + 1);
        r
    }

    /// Extends the record in place until it has `depth + 1` steps.
    pub fn extend(&mut self, f: &Morphism, depth: usize) -> Result<()> {
        if f.id() != self.map_id {
            return Err(Error::InvalidArgument("orbit record belongs to a different map".into()));
        }
        while self.depth() < depth {
            let n = self.steps.len();
            let point = f.evaluate(self.last()).map_err(|e| match e {
                Error::Indeterminate { point, .. } => Error::Indeterminate { step: n - 1, point },
                other => other,
            })?;
            let h = height(&point);
            self.steps.push(OrbitStep { n, point, h });
        }
        Ok(())
    }
}

/// Forward orbit of `x` under `f` to depth `n`.
pub fn iterate(f: &Morphism, x: &ProjPoint, n: usize) -> Result<OrbitRecord> {
    let mut r = OrbitRecord::new(f, x.clone())?;
    r.extend(f, n)?;
    Ok(r)
}

/// `f^* G = G(f_0, .., f_n)` for `G` over `Q` or a quadratic field.
pub fn pullback<C: Scalar>(f: &Morphism, g: &HomogPoly<C>) -> Result<HomogPoly<C>> {
    if g.nvars() != f.nvars() {
        return Err(Error::Shape(format!(
            "form in {} variables cannot be pulled back by a map of P^{}",
            g.nvars(),
            f.dim()
        )));
    }
    let ctx = g.ctx().clone();
    let forms: Vec<HomogPoly<C>> = f
        .forms()
        .iter()
        .map(|p| p.map_coeffs(ctx.clone(), |q| C::from_rational(&ctx, q.clone())))
        .collect();
    g.compose(&forms)
}

/// `(f^m)^* G` by repeated single-step pullback, refusing depths beyond `cap`.
pub fn pullback_iterate<C: Scalar>(f: &Morphism, g: &HomogPoly<C>, m: usize, cap: usize) -> Result<HomogPoly<C>> {
    if m > cap {
        return Err(Error::CompositionCap { requested: m, cap });
    }
    let mut acc = g.clone();
    for _ in 0..m {
        acc = pullback(f, &acc)?;
    }
    Ok(acc)
}
