//! Orbit experiments: the ratio series, the gap functional, and the
//! hypothesis and conclusion checks built on them.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cache::{obtain_orbit, CacheOutcome, OrbitCache};
use super::closure::{closure_proxy, ClosureProxy};
use super::config::{ExperimentConfig, ResolvedDivisor, SampleSpec, DEFAULT_WELLFORMED_TRIALS};
use crate::degree::{alpha_estimate, tail_window, AlphaEstimate, CONVERGENCE_TOL};
use crate::exactnum::{places_above, rat, LogMag, Place, Ratio, Rational};
use crate::polydyn::{
    height, wellformed_check, Morphism, OrbitRecord, ProjPoint, WellformedOutcome, DEFAULT_COMPOSITION_CAP,
};
use crate::singular::{efd_estimate, remark44_m0_from_sequence, EfdEstimate, M0Report, ValuationFamily};
use crate::weil::{AnyDivisor, PresentationKind};
use crate::{Error, Result};

/// Relative spread below which a tail is called convergent.
pub const TREND_TOL: f64 = CONVERGENCE_TOL;
/// Last ratio below which a strictly decreasing tail is called trending to zero.
pub const ZERO_THRESHOLD: f64 = 1e-2;
/// Usable rows required before a liminf tail is estimated.
pub const MIN_LIMINF_ROWS: usize = 5;
/// Largest full enumeration of a point sample.
pub const MAX_ENUMERATION: u64 = 4_000_000;
/// Tolerance of the height-identity audit when an exact comparison is unavailable.
const AUDIT_TOL: f64 = 1e-20;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the config depth `N`.
    pub depth: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

/// A validated config resolved into the objects an orbit experiment needs.
#[derive(Clone, Debug)]
pub struct Setup {
    pub map: Morphism,
    pub wellformed: WellformedOutcome,
    pub seed: ProjPoint,
    pub divisor: Option<ResolvedDivisor>,
    pub places: Vec<Place>,
    pub twist: i64,
    pub depth: usize,
    pub cache: Option<OrbitCache>,
    pub warnings: Vec<String>,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Self> {
        let mut map = cfg.morphism()?;
        let trials = cfg.wellformed_trials.unwrap_or(DEFAULT_WELLFORMED_TRIALS);
        let wellformed = wellformed_check(&map, trials);
        map.record_outcome(&wellformed);
        let mut warnings = Vec::new();
        if let WellformedOutcome::Probabilistic { trials } = wellformed {
            warnings.push(format!(
                "map well-formedness is probabilistic ({trials} trials without a common zero)"
            ));
        }
        let seed = cfg.seed_point()?;
        if seed.coords().len() != map.nvars() {
            return Err(Error::Config(format!("seed {seed} does not live in P^{}", map.dim())));
        }
        let divisor = cfg.divisor.as_ref().map(|d| d.build(map.nvars())).transpose()?;
        let field = divisor.as_ref().and_then(|d| d.divisor.field());
        let cache = opts.cache_dir.as_ref().map(OrbitCache::new).transpose()?;
        Ok(Setup {
            places: cfg.places(field)?,
            map,
            wellformed,
            seed,
            divisor,
            twist: cfg.twist,
            depth: opts.depth.unwrap_or_else(|| cfg.depth_or_default()),
            cache,
            warnings,
        })
    }

    pub fn divisor(&self) -> Result<&AnyDivisor> {
        self.divisor
            .as_ref()
            .map(|d| &d.divisor)
            .ok_or_else(|| Error::Config("config has no divisor".into()))
    }

    fn require_wellformed(&self) -> Result<()> {
        match &self.wellformed {
            WellformedOutcome::Refuted { witness } => Err(Error::Config(match witness {
                Some(w) => format!("map is not a morphism: common zero at {w}"),
                None => "map is not a morphism: common zero over an extension".into(),
            })),
            _ => Ok(()),
        }
    }

    pub fn orbit(&self) -> Result<(OrbitRecord, Option<CacheOutcome>)> {
        self.require_wellformed()?;
        obtain_orbit(self.cache.as_ref(), &self.map, &self.seed, self.depth)
    }

    fn h_l(&self, h: &LogMag) -> LogMag {
        h.scale(&rat(self.twist))
    }
}

fn positive(x: &LogMag) -> bool {
    x.signum() == Some(Ordering::Greater)
}

fn ratio_value(r: &Ratio) -> f64 {
    r.exact.as_ref().and_then(|q| q.to_f64()).unwrap_or(r.approx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub n: usize,
    pub point: ProjPoint,
    pub h_l: LogMag,
    /// `sum_{v in S} lambda_D(f^n x, v)`; absent on support hits.
    pub lambda_s: Option<LogMag>,
    /// Sum over all places (Galois-symmetrised over a quadratic field).
    pub lambda_all: Option<LogMag>,
    /// `lambda_s / h_l`, defined when `h_l > 0` and the step is not skipped.
    pub ratio: Option<Ratio>,
    pub skipped: bool,
    /// Proper closed sets containing the point.
    pub annotations: Vec<String>,
    /// Local values at each extension `w` above the places of `S` (quadratic divisors only).
    pub per_w: Vec<Option<LogMag>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RatioVerdict {
    /// Strictly decreasing tail ending below [`ZERO_THRESHOLD`]; `rate` is the mean
    /// per-step factor over the tail.
    TrendingToZero {
        rate: f64,
    },
    TrendingTo {
        value: f64,
        spread: f64,
    },
    Inconclusive {
        spread: f64,
    },
    /// More than `N/2` support hits.
    Degenerate {
        skipped: usize,
    },
}

#[derive(Clone, Debug)]
pub struct RatioSeries {
    pub rows: Vec<RatioRow>,
    pub skipped: usize,
    pub verdict: RatioVerdict,
    pub window: usize,
    pub per_w_labels: Vec<String>,
    /// Whether the height identity was audited on every usable row.
    pub audited: bool,
    pub cache: Option<CacheOutcome>,
    pub warnings: Vec<String>,
}

impl RatioSeries {
    pub fn usable(&self) -> impl Iterator<Item = &RatioRow> {
        self.rows.iter().filter(|r| r.ratio.is_some())
    }
}

pub fn run_ratio_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RatioSeries> {
    ratio_series(&Setup::new(cfg, opts)?)
}

fn extension_places(setup: &Setup, d: &AnyDivisor) -> Vec<Place> {
    let Some(field) = d.field() else { return Vec::new() };
    let mut bases = Vec::new();
    for v in &setup.places {
        if !bases.contains(&v.base()) {
            bases.push(v.base());
        }
    }
    bases.into_iter().flat_map(|b| places_above(b, field)).collect()
}

pub fn ratio_series(setup: &Setup) -> Result<RatioSeries> {
    let d = setup.divisor()?;
    let (orbit, cache) = setup.orbit()?;
    let per_w_places = extension_places(setup, d);
    let audited = match d {
        AnyDivisor::Rational(p) => p.kind() == PresentationKind::Default,
        AnyDivisor::Quadratic(p) => p.kind() == PresentationKind::Default,
    };
    let mut warnings = setup.warnings.clone();
    if !audited {
        warnings.push("height identity audit skipped: custom presentation".into());
    }
    let expected_factor = d.weight() * rat(d.degree() as i64);
    let rows = orbit
        .steps()
        .par_iter()
        .map(|step| -> Result<RatioRow> {
            let h_l = setup.h_l(&step.h);
            if d.in_support(&step.point) {
                return Ok(RatioRow {
                    n: step.n,
                    point: step.point.clone(),
                    h_l,
                    lambda_s: None,
                    lambda_all: None,
                    ratio: None,
                    skipped: true,
                    annotations: vec!["support of D".into()],
                    per_w: vec![None; per_w_places.len()],
                });
            }
            let lambda_s = d.weil_sum(&step.point, &setup.places)?;
            let lambda_all = d.symmetrized(&step.point)?.total;
            if audited {
                let expected = step.h.scale(&expected_factor);
                let ok = match lambda_all.exact_eq(&expected) {
                    Some(eq) => eq,
                    None => lambda_all.within(&expected, AUDIT_TOL),
                };
                if !ok {
                    return Err(Error::SelfCheck(format!(
                        "height identity violated at n = {}: sum of local values {} vs deg(D) h = {}",
                        step.n, lambda_all, expected
                    )));
                }
            }
            let per_w = per_w_places.iter().map(|w| d.weil_local(&step.point, w).ok()).collect();
            let ratio = positive(&h_l).then(|| lambda_s.ratio(&h_l));
            Ok(RatioRow {
                n: step.n,
                point: step.point.clone(),
                h_l,
                lambda_s: Some(lambda_s),
                lambda_all: Some(lambda_all),
                ratio,
                skipped: false,
                annotations: Vec::new(),
                per_w,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let skipped = rows.iter().filter(|r| r.skipped).count();
    if skipped == rows.len() {
        return Err(Error::Degenerate("every orbit step lies in the support of D".into()));
    }
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio.as_ref().map(ratio_value)).collect();
    let window = tail_window(ratios.len().max(1));
    let verdict = if 2 * skipped > setup.depth {
        RatioVerdict::Degenerate { skipped }
    } else {
        ratio_verdict(&ratios)
    };
    Ok(RatioSeries {
        rows,
        skipped,
        verdict,
        window,
        per_w_labels: per_w_places.iter().map(|w| format!("lambda({w})/h")).collect(),
        audited,
        cache,
        warnings,
    })
}

fn spread(tail: &[f64]) -> f64 {
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = hi.abs().max(lo.abs());
    if scale == 0.0 {
        0.0
    } else {
        (hi - lo) / scale
    }
}

/// Verdict on the last `ceil(len/3)` usable ratios.
pub fn ratio_verdict(ratios: &[f64]) -> RatioVerdict {
    if ratios.len() < 2 {
        return RatioVerdict::Inconclusive { spread: f64::NAN };
    }
    let w = tail_window(ratios.len()).max(2);
    let tail = &ratios[ratios.len() - w..];
    let last = tail[w - 1];
    let decreasing = tail.windows(2).all(|p| p[1] < p[0]);
    if decreasing && (0.0..ZERO_THRESHOLD).contains(&last) {
        let rate = (last / tail[0]).powf(1.0 / (w - 1) as f64);
        return RatioVerdict::TrendingToZero { rate };
    }
    let s = spread(tail);
    if s < TREND_TOL {
        RatioVerdict::TrendingTo { value: last, spread: s }
    } else {
        RatioVerdict::Inconclusive { spread: s }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
    /// The enclosure straddles zero.
    Unresolved,
}

fn sign_of(x: &LogMag) -> Sign {
    match x.signum() {
        Some(Ordering::Less) => Sign::Negative,
        Some(Ordering::Equal) => Sign::Zero,
        Some(Ordering::Greater) => Sign::Positive,
        None => Sign::Unresolved,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapRow {
    pub n: usize,
    pub h_l: LogMag,
    pub lambda_s: Option<LogMag>,
    /// `eps' h_L - sum_S lambda_D - h_K`, with `h_K = -(n + 1) h` on `P^n`.
    pub gap: Option<LogMag>,
    pub sign: Option<Sign>,
    pub skipped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRow {
    pub point: ProjPoint,
    pub h_l: LogMag,
    pub lambda_s: LogMag,
    pub gap: LogMag,
    pub sign: Sign,
}

#[derive(Clone, Debug)]
pub struct SampleReport {
    pub rows: Vec<SampleRow>,
    /// Sampled points lying on `D`, left out.
    pub support_hits: usize,
    pub negative: Vec<ProjPoint>,
    pub closure: ClosureProxy,
}

#[derive(Clone, Debug)]
pub struct GapSeries {
    pub eps_prime: Rational,
    pub rows: Vec<GapRow>,
    pub orbit_negative: Vec<usize>,
    pub orbit_closure: ClosureProxy,
    pub sample: Option<SampleReport>,
    pub warnings: Vec<String>,
}

pub fn run_gap_experiment(cfg: &ExperimentConfig, opts: &RunOptions, eps_prime: &Rational) -> Result<GapSeries> {
    gap_series(&Setup::new(cfg, opts)?, cfg.sample.as_ref(), eps_prime)
}

/// `eps' h_L(x) - lambda_S(x) + (n + 1) h(x)`.
fn gap_value(setup: &Setup, eps_prime: &Rational, h: &LogMag, lambda_s: &LogMag, nvars: usize) -> LogMag {
    let coeff = eps_prime * rat(setup.twist) + rat(nvars as i64);
    h.scale(&coeff).sub(lambda_s)
}

pub fn gap_series(setup: &Setup, sample: Option<&SampleSpec>, eps_prime: &Rational) -> Result<GapSeries> {
    if *eps_prime < rat(0) {
        return Err(Error::InvalidArgument("eps' must be nonnegative".into()));
    }
    let d = setup.divisor()?;
    let (orbit, _) = setup.orbit()?;
    let nvars = setup.map.nvars();
    let rows = orbit
        .steps()
        .par_iter()
        .map(|step| -> Result<GapRow> {
            let h_l = setup.h_l(&step.h);
            if d.in_support(&step.point) {
                return Ok(GapRow {
                    n: step.n,
                    h_l,
                    lambda_s: None,
                    gap: None,
                    sign: None,
                    skipped: true,
                });
            }
            let lambda_s = d.weil_sum(&step.point, &setup.places)?;
            let gap = gap_value(setup, eps_prime, &step.h, &lambda_s, nvars);
            Ok(GapRow {
                n: step.n,
                h_l,
                sign: Some(sign_of(&gap)),
                lambda_s: Some(lambda_s),
                gap: Some(gap),
                skipped: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.iter().all(|r| r.skipped) {
        return Err(Error::Degenerate("every orbit step lies in the support of D".into()));
    }
    let orbit_negative: Vec<usize> = rows
        .iter()
        .filter(|r| r.sign == Some(Sign::Negative))
        .map(|r| r.n)
        .collect();
    let negative_points: Vec<ProjPoint> = orbit_negative.iter().map(|&n| orbit.steps()[n].point.clone()).collect();
    let hyperplane_mode = setup.divisor.as_ref().is_some_and(|d| d.hyperplane_mode);
    let mut warnings = setup.warnings.clone();
    let sample = match (sample, hyperplane_mode) {
        (Some(spec), true) => Some(sample_gaps(setup, d, spec, eps_prime)?),
        (Some(_), false) => {
            warnings.push("point sample ignored: divisor is not given as distinct hyperplanes".into());
            None
        }
        (None, _) => None,
    };
    Ok(GapSeries {
        eps_prime: eps_prime.clone(),
        rows,
        orbit_negative,
        orbit_closure: closure_proxy(&negative_points),
        sample,
        warnings,
    })
}

/// Points of `P^{nvars-1}` with primitive coordinates of absolute value at most `bound`.
pub fn sample_points(nvars: usize, spec: &SampleSpec) -> Result<Vec<ProjPoint>> {
    let b = spec.height_bound as i64;
    if b < 1 {
        return Err(Error::InvalidArgument("height bound must be at least 1".into()));
    }
    match spec.size {
        None => {
            let total = (2 * spec.height_bound + 1)
                .checked_pow(nvars as u32)
                .unwrap_or(u64::MAX);
            if total > MAX_ENUMERATION {
                return Err(Error::InvalidArgument(format!(
                    "{total} tuples to enumerate; give a sample size"
                )));
            }
            Ok(all_points(nvars, b))
        }
        Some(size) => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut seen = BTreeSet::new();
            let mut out = Vec::with_capacity(size);
            let mut attempts = 0usize;
            while out.len() < size && attempts < size.saturating_mul(100) {
                attempts += 1;
                let c: Vec<BigInt> = (0..nvars).map(|_| BigInt::from(rng.gen_range(-b..=b))).collect();
                if c.iter().all(Zero::is_zero) {
                    continue;
                }
                let p = ProjPoint::from_ints(c)?;
                if seen.insert(p.clone()) {
                    out.push(p);
                }
            }
            Ok(out)
        }
    }
}

fn all_points(nvars: usize, b: i64) -> Vec<ProjPoint> {
    let mut out = Vec::new();
    let mut c = vec![-b; nvars];
    loop {
        let first = c.iter().find(|&&x| x != 0);
        if first.is_some_and(|&x| x > 0) && c.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1 {
            out.push(ProjPoint::from_i64(&c).expect("nonzero tuple"));
        }
        let mut i = nvars;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < b {
                c[i] += 1;
                break;
            }
            c[i] = -b;
        }
    }
}

fn sample_gaps(setup: &Setup, d: &AnyDivisor, spec: &SampleSpec, eps_prime: &Rational) -> Result<SampleReport> {
    let nvars = setup.map.nvars();
    let points = sample_points(nvars, spec)?;
    let evaluated = points
        .par_iter()
        .map(|p| -> Result<Option<SampleRow>> {
            if d.in_support(p) {
                return Ok(None);
            }
            let h = height(p);
            let lambda_s = d.weil_sum(p, &setup.places)?;
            let gap = gap_value(setup, eps_prime, &h, &lambda_s, nvars);
            Ok(Some(SampleRow {
                point: p.clone(),
                h_l: setup.h_l(&h),
                sign: sign_of(&gap),
                lambda_s,
                gap,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let support_hits = evaluated.iter().filter(|r| r.is_none()).count();
    let rows: Vec<SampleRow> = evaluated.into_iter().flatten().collect();
    let negative: Vec<ProjPoint> = rows
        .iter()
        .filter(|r| r.sign == Sign::Negative)
        .map(|r| r.point.clone())
        .collect();
    Ok(SampleReport {
        closure: closure_proxy(&negative),
        rows,
        support_hits,
        negative,
    })
}

/// Outcome of one hypothesis clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clause {
    Holds,
    Fails,
    /// Could not be decided from the computed data.
    Unverified(String),
}

impl Clause {
    fn from_bool(b: bool) -> Self {
        if b {
            Clause::Holds
        } else {
            Clause::Fails
        }
    }
}

/// An arithmetic-degree value: exact when the ratio tail proved it.
#[derive(Clone, Debug, PartialEq)]
pub struct Value {
    pub exact: Option<Rational>,
    pub approx: f64,
}

impl Value {
    fn exact(q: Rational) -> Self {
        Value {
            approx: q.to_f64().unwrap_or(f64::NAN),
            exact: Some(q),
        }
    }

    /// Sign of `self - q`, or `None` when too close to call.
    fn cmp_rational(&self, q: &Rational) -> Option<Ordering> {
        match &self.exact {
            Some(a) => Some(a.cmp(q)),
            None => {
                let b = q.to_f64()?;
                let tol = 1e-6 * b.abs().max(1.0);
                if (self.approx - b).abs() <= tol {
                    None
                } else {
                    self.approx.partial_cmp(&b)
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Thm14Report {
    pub degree: u32,
    pub alpha: Option<Value>,
    pub alpha_estimate: Option<AlphaEstimate>,
    pub e_family: Option<Value>,
    pub efd: Option<EfdEstimate>,
    /// `e` used in the clauses (config value, else the family estimate).
    pub e: Option<Rational>,
    pub eps: Rational,
    pub eps0: Rational,
    pub alpha_gt_one: Clause,
    pub e_covers_family: Clause,
    pub family_below_alpha: Clause,
    pub clause_i: Clause,
    pub clause_ii: Clause,
    /// Smallest `m0` satisfying (ii).
    pub m0_ii: Option<usize>,
    pub m0_search: Option<M0Report>,
    /// Proper closed sets met by the orbit prefix.
    pub genericity: Vec<String>,
    pub orbit_closure: Option<ClosureProxy>,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl Thm14Report {
    pub fn hypotheses_hold(&self) -> bool {
        [
            &self.alpha_gt_one,
            &self.e_covers_family,
            &self.family_below_alpha,
            &self.clause_i,
            &self.clause_ii,
        ]
        .iter()
        .all(|c| **c == Clause::Holds)
    }
}

fn sd_efd(f: &Morphism, d: &AnyDivisor, depth: usize, family: &ValuationFamily) -> Result<EfdEstimate> {
    match d {
        AnyDivisor::Rational(p) => efd_estimate(f, p.sd(), depth, family, DEFAULT_COMPOSITION_CAP),
        AnyDivisor::Quadratic(p) => efd_estimate(f, p.sd(), depth, family, DEFAULT_COMPOSITION_CAP),
    }
}

fn family_value(est: &EfdEstimate) -> Value {
    if est.no_growth {
        return Value::exact(rat(1));
    }
    match est.ratios.as_slice() {
        [.., a, b] if a == b => Value::exact(b.clone()),
        [r] => Value {
            exact: None,
            approx: r.to_f64().unwrap_or(f64::NAN),
        },
        _ => Value {
            exact: None,
            approx: est.estimate,
        },
    }
}

pub fn thm14_hypothesis_report(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Thm14Report> {
    let setup = Setup::new(cfg, opts)?;
    let eps = cfg
        .rational("eps")?
        .ok_or_else(|| Error::Config("thm14 needs eps".into()))?;
    let eps0 = cfg
        .rational("eps0")?
        .ok_or_else(|| Error::Config("thm14 needs eps0".into()))?;
    let d = setup.divisor()?;
    let mut notes = setup.warnings.clone();
    let mut violations = Vec::new();
    let mut genericity = Vec::new();

    if let WellformedOutcome::Refuted { witness } = &setup.wellformed {
        genericity.push(match witness {
            Some(w) => format!("indeterminacy point {w} of the map"),
            None => "indeterminacy locus over an extension".into(),
        });
    }
    let orbit = match setup.orbit() {
        Ok((o, _)) => Some(o),
        Err(e) => {
            notes.push(format!("orbit unavailable: {e}"));
            None
        }
    };

    let alpha_estimate = orbit.as_ref().and_then(|o| match alpha_estimate(o) {
        Ok(a) => Some(a),
        Err(e) => {
            notes.push(format!("alpha not estimated: {e}"));
            None
        }
    });
    let alpha = alpha_estimate.as_ref().map(|a| match a.exact_value() {
        Some(q) => Value::exact(q),
        None => Value {
            exact: None,
            approx: a
                .verdict
                .value()
                .unwrap_or_else(|| a.ratio_seq.iter().rev().flatten().next().map_or(f64::NAN, ratio_value)),
        },
    });
    if let Some(a) = &alpha_estimate {
        if a.verdict.value().is_none() {
            notes.push("alpha ratio tail did not converge; the last ratio is used".into());
        }
    }

    let efd_depth = cfg
        .efd
        .as_ref()
        .and_then(|e| e.depth)
        .unwrap_or_else(|| setup.depth.clamp(1, DEFAULT_COMPOSITION_CAP));
    let bound = cfg.efd.as_ref().map_or(2, |e| e.bound);
    let family = ValuationFamily::standard(setup.map.nvars(), bound);
    let efd = match sd_efd(&setup.map, d, efd_depth, &family) {
        Ok(e) => Some(e),
        Err(e) => {
            notes.push(format!("e_f(D) family estimate unavailable: {e}"));
            None
        }
    };
    if efd.as_ref().is_some_and(|e| e.probabilistic) {
        notes.push("component multiplicities were read off random lines".into());
    }
    let e_family = efd.as_ref().map(family_value);
    let e = match cfg.rational("e")? {
        Some(e) => Some(e),
        None => e_family.as_ref().and_then(|v| v.exact.clone()),
    };

    let unverified = |what: &str| Clause::Unverified(format!("{what} unavailable"));
    let alpha_gt_one = match &alpha {
        None => unverified("alpha"),
        Some(a) => match a.cmp_rational(&rat(1)) {
            Some(Ordering::Greater) => Clause::Holds,
            Some(_) => Clause::Fails,
            None => Clause::Unverified("alpha indistinguishable from 1".into()),
        },
    };
    if alpha_gt_one == Clause::Fails {
        violations.push("hypothesis alpha_f(x) > 1 violated".into());
    }

    let e_covers_family = match (&e, &e_family) {
        (Some(e), Some(fam)) => match fam.cmp_rational(e) {
            Some(Ordering::Greater) => Clause::Fails,
            Some(_) => Clause::Holds,
            None => Clause::Unverified("family estimate indistinguishable from e".into()),
        },
        (None, _) => unverified("e"),
        (_, None) => unverified("family estimate"),
    };
    if e_covers_family == Clause::Fails {
        violations.push(format!(
            "e = {} is below the family estimate {} of e_f(D)",
            e.as_ref().unwrap(),
            e_family.as_ref().map_or(f64::NAN, |v| v.approx)
        ));
    }

    // e_f(D) + eps < alpha for some eps > 0 requires e_f(D) < alpha.
    let family_below_alpha = match (&e_family, &alpha) {
        (Some(fam), Some(a)) => match (&fam.exact, &a.exact) {
            (Some(p), Some(q)) => Clause::from_bool(p < q),
            _ if (fam.approx - a.approx).abs() <= 1e-6 * a.approx.abs() => {
                Clause::Unverified("family estimate indistinguishable from alpha".into())
            }
            _ => Clause::from_bool(fam.approx < a.approx),
        },
        _ => unverified("family estimate or alpha"),
    };
    if family_below_alpha == Clause::Fails {
        violations.push("e_f(D) >= alpha_f(x): (i) fails for every eps > 0".into());
    }

    let (clause_i, clause_ii, m0_ii) = match (&e, &alpha) {
        (Some(e), Some(a)) => {
            let base = e + &eps;
            let i = match a.cmp_rational(&base) {
                Some(Ordering::Greater) => Clause::Holds,
                Some(_) => Clause::Fails,
                None => Clause::Unverified("e + eps indistinguishable from alpha".into()),
            };
            let m0 = smallest_m0(&base, a, &eps0, setup.depth.max(64));
            let ii = match (&m0, &a.exact) {
                (Some(_), Some(_)) => Clause::Holds,
                (Some(_), None) => Clause::Unverified("(ii) holds for the alpha estimate only".into()),
                (None, Some(_)) => Clause::Fails,
                (None, None) => Clause::Unverified("no m0 found for the alpha estimate".into()),
            };
            (i, ii, m0)
        }
        _ => (unverified("e or alpha"), unverified("e or alpha"), None),
    };
    if clause_i == Clause::Fails {
        violations.push("clause (i) e + eps < alpha fails".into());
    }
    if clause_ii == Clause::Fails {
        violations.push("clause (ii) has no m0".into());
    }

    let m0_search = match (&e, &efd) {
        (Some(e), Some(est)) => Some(remark44_m0_from_sequence(e, &eps, &est.s)?),
        _ => None,
    };

    let mut orbit_closure = None;
    if let Some(o) = &orbit {
        let pts: Vec<ProjPoint> = o.steps().iter().map(|s| s.point.clone()).collect();
        for s in o.steps() {
            if d.in_support(&s.point) {
                genericity.push(format!("step {} lies in the support of D", s.n));
            }
        }
        if let Some((i, j)) = first_repeat(&pts) {
            genericity.push(format!("orbit is preperiodic: step {j} repeats step {i}"));
        }
        let c = closure_proxy(&pts);
        if !matches!(
            c.containment,
            super::closure::Containment::FinitePoints | super::closure::Containment::NoLowDegree
        ) {
            genericity.push(format!("orbit prefix: {c}"));
        }
        orbit_closure = Some(c);
    }

    Ok(Thm14Report {
        degree: setup.map.degree(),
        alpha,
        alpha_estimate,
        e_family,
        efd,
        e,
        eps,
        eps0,
        alpha_gt_one,
        e_covers_family,
        family_below_alpha,
        clause_i,
        clause_ii,
        m0_ii,
        m0_search,
        genericity,
        orbit_closure,
        violations,
        notes,
    })
}

fn first_repeat(points: &[ProjPoint]) -> Option<(usize, usize)> {
    (1..points.len()).find_map(|j| points[..j].iter().position(|p| *p == points[j]).map(|i| (i, j)))
}

/// Smallest `m <= cap` with `base^m < alpha^m eps0`.
fn smallest_m0(base: &Rational, alpha: &Value, eps0: &Rational, cap: usize) -> Option<usize> {
    match &alpha.exact {
        Some(a) => {
            let (mut lhs, mut rhs) = (rat(1), eps0.clone());
            (1..=cap).find(|_| {
                lhs *= base;
                rhs *= a;
                lhs < rhs
            })
        }
        None => {
            let (b, e0) = (base.to_f64()?, eps0.to_f64()?);
            (1..=cap).find(|&m| (m as f64) * (b.ln() - alpha.approx.ln()) < e0.ln())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thm17Row {
    pub n: usize,
    /// `sum_{v not in S} lambda / h_L`.
    pub complement: Ratio,
    /// `sum_v lambda / h_L`.
    pub all: Ratio,
    pub in_tail: bool,
    pub flagged: bool,
}

#[derive(Clone, Debug)]
pub struct Thm17Report {
    pub eps: Rational,
    pub liminf: Value,
    pub window: usize,
    pub rows: Vec<Thm17Row>,
    /// Steps in the displayed set, over the whole computed prefix.
    pub flagged: Vec<usize>,
    /// Flagged steps inside the tail window.
    pub flagged_tail: Vec<usize>,
    pub closure: ClosureProxy,
    pub warnings: Vec<String>,
}

pub fn thm17_set_membership(cfg: &ExperimentConfig, opts: &RunOptions, eps: &Rational) -> Result<Thm17Report> {
    let series = ratio_series(&Setup::new(cfg, opts)?)?;
    thm17_from_series(&series, eps)
}

pub fn thm17_from_series(series: &RatioSeries, eps: &Rational) -> Result<Thm17Report> {
    if *eps <= rat(0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let usable: Vec<&RatioRow> = series.usable().collect();
    if usable.len() < MIN_LIMINF_ROWS {
        return Err(Error::TooShort {
            needed: MIN_LIMINF_ROWS,
            have: usable.len(),
        });
    }
    let window = tail_window(usable.len());
    let parts: Vec<(LogMag, LogMag, &RatioRow)> = usable
        .iter()
        .map(|r| {
            let all = r.lambda_all.clone().expect("usable rows carry lambda_all");
            let comp = all.sub(r.lambda_s.as_ref().expect("usable rows carry lambda_S"));
            (all, comp, *r)
        })
        .collect();
    let tail_all: Vec<Ratio> = parts[parts.len() - window..]
        .iter()
        .map(|(a, _, r)| a.ratio(&r.h_l))
        .collect();
    let liminf = if tail_all.iter().all(|q| q.exact.is_some()) {
        Value::exact(
            tail_all
                .iter()
                .filter_map(|q| q.exact.clone())
                .min()
                .expect("nonempty tail"),
        )
    } else {
        Value {
            exact: None,
            approx: tail_all.iter().map(ratio_value).fold(f64::INFINITY, f64::min),
        }
    };
    let first_tail = parts.len() - window;
    let mut rows = Vec::with_capacity(parts.len());
    for (i, (all, comp, r)) in parts.iter().enumerate() {
        let flagged = match &liminf.exact {
            // comp <= (liminf - eps) h_L
            Some(q) => match comp.sub(&r.h_l.scale(&(q - eps))).signum() {
                Some(o) => o != Ordering::Greater,
                None => ratio_value(&comp.ratio(&r.h_l)) <= liminf.approx - eps.to_f64().unwrap_or(0.0),
            },
            None => ratio_value(&comp.ratio(&r.h_l)) <= liminf.approx - eps.to_f64().unwrap_or(0.0),
        };
        rows.push(Thm17Row {
            n: r.n,
            complement: comp.ratio(&r.h_l),
            all: all.ratio(&r.h_l),
            in_tail: i >= first_tail,
            flagged,
        });
    }
    let flagged: Vec<usize> = rows.iter().filter(|r| r.flagged).map(|r| r.n).collect();
    let flagged_tail: Vec<usize> = rows.iter().filter(|r| r.flagged && r.in_tail).map(|r| r.n).collect();
    let points: Vec<ProjPoint> = series
        .rows
        .iter()
        .filter(|r| flagged.contains(&r.n))
        .map(|r| r.point.clone())
        .collect();
    Ok(Thm17Report {
        eps: eps.clone(),
        liminf,
        window,
        rows,
        flagged,
        flagged_tail,
        closure: closure_proxy(&points),
        warnings: series.warnings.clone(),
    })
}
