//! Arithmetic degree estimates and the polynomial-exponential growth model
//! `C1 n^l alpha^n <= h(f^n x) <= C2 n^l alpha^n`.

use num_traits::ToPrimitive;

use crate::exactnum::{LogMag, Ratio, Rational};
use crate::polydyn::OrbitRecord;
use crate::{Error, Result};

/// Relative tail spread below which a sequence counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-6;
pub const DEFAULT_ELL_MAX: u32 = 3;

/// Tail window: the last `ceil(len / 3)` entries (at least one).
pub fn tail_window(len: usize) -> usize {
    len.div_ceil(3).max(1).min(len)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Converged { value: f64, spread: f64 },
    Inconclusive { spread: f64 },
}

impl Verdict {
    pub fn value(&self) -> Option<f64> {
        match self {
            Verdict::Converged { value, .. } => Some(*value),
            Verdict::Inconclusive { .. } => None,
        }
    }
}

fn verdict(tail: &[f64], tol: f64) -> Verdict {
    let finite: Vec<f64> = tail.iter().copied().filter(|x| x.is_finite()).collect();
    if finite.len() < tail.len() || finite.is_empty() {
        return Verdict::Inconclusive { spread: f64::INFINITY };
    }
    let max = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = finite.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = finite.iter().sum::<f64>() / finite.len() as f64;
    let spread = if mean == 0.0 {
        max - min
    } else {
        (max - min) / mean.abs()
    };
    if spread < tol {
        Verdict::Converged {
            value: *finite.last().unwrap(),
            spread,
        }
    } else {
        Verdict::Inconclusive { spread }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaEstimate {
    /// `h+(f^n x)^{1/n}` for `n = 1..=N`.
    pub root_seq: Vec<f64>,
    /// `h(f^{n+1} x) / h(f^n x)` for `n = 0..N`; `None` where `h(f^n x) = 0`.
    pub ratio_seq: Vec<Option<Ratio>>,
    pub window: usize,
    pub verdict: Verdict,
    pub root_verdict: Verdict,
}

impl AlphaEstimate {
    /// The ratio estimate as an exact rational, when every tail ratio is that rational.
    pub fn exact_value(&self) -> Option<Rational> {
        let tail = &self.ratio_seq[self.ratio_seq.len() - self.window..];
        let first = tail.first()?.as_ref()?.exact.clone()?;
        tail.iter()
            .all(|r| r.as_ref().and_then(|r| r.exact.as_ref()) == Some(&first))
            .then_some(first)
    }
}

pub fn alpha_estimate(orbit: &OrbitRecord) -> Result<AlphaEstimate> {
    let h: Vec<LogMag> = orbit.steps().iter().map(|s| s.h.clone()).collect();
    alpha_estimate_heights(&h, CONVERGENCE_TOL)
}

pub fn alpha_estimate_heights(h: &[LogMag], tol: f64) -> Result<AlphaEstimate> {
    if h.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            have: h.len(),
        });
    }
    let root_seq: Vec<f64> = h
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, x)| x.to_f64().max(1.0).powf(1.0 / n as f64))
        .collect();
    let ratio_seq: Vec<Option<Ratio>> = h
        .windows(2)
        .map(|w| (w[0].signum() == Some(std::cmp::Ordering::Greater)).then(|| w[1].ratio(&w[0])))
        .collect();
    let window = tail_window(ratio_seq.len());
    let ratios: Vec<f64> = ratio_seq[ratio_seq.len() - window..]
        .iter()
        .map(|r| {
            r.as_ref().map_or(f64::NAN, |r| {
                r.exact.as_ref().and_then(|q| q.to_f64()).unwrap_or(r.approx)
            })
        })
        .collect();
    let rw = tail_window(root_seq.len());
    Ok(AlphaEstimate {
        verdict: verdict(&ratios, tol),
        root_verdict: verdict(&root_seq[root_seq.len() - rw..], tol),
        root_seq,
        ratio_seq,
        window,
    })
}

/// How `alpha` enters a growth fit.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaInput {
    Given(f64),
    /// Regress `log h - l log n = c + n log alpha` for each `l`.
    Fit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFit {
    pub ell: u32,
    pub alpha: f64,
    /// Spread of the per-step growth `(h_{n+1}/h_n) ((n)/(n+1))^l` over the fitted range.
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub c1: f64,
    pub c2: f64,
    /// First and last step of the fitted range.
    pub range: (usize, usize),
    /// Steps whose normalised value lies beyond 3 IQR of the rest.
    pub suspects: Vec<usize>,
    /// Variance of `log(h_n / (n^l alpha^n))` over the fitted range.
    pub variance: f64,
}

/// Least-squares line through `(x, y)`; returns `(intercept, slope, residual variance)`.
fn regress(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let c = my - slope * mx;
    let var = xs.iter().zip(ys).map(|(x, y)| (y - c - slope * x).powi(2)).sum::<f64>() / n;
    (c, slope, var)
}

fn variance(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
}

fn quartiles(v: &[f64]) -> (f64, f64, f64) {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| {
        let pos = p * (s.len() - 1) as f64;
        let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
        s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
    };
    (q(0.25), q(0.5), q(0.75))
}

pub fn growth_fit(orbit: &OrbitRecord, alpha: AlphaInput, ell_max: u32) -> Result<GrowthFit> {
    let h: Vec<f64> = orbit.steps().iter().map(|s| s.h.to_f64()).collect();
    growth_fit_values(&h, alpha, ell_max)
}

/// Growth fit on a height sequence `h_0, h_1, ..`, over the tail window
/// (at least 5 steps when available) of the steps `n >= 1` with `h_n > 0`.
pub fn growth_fit_values(h: &[f64], alpha: AlphaInput, ell_max: u32) -> Result<GrowthFit> {
    if let AlphaInput::Given(a) = alpha {
        if !(a > 0.0) {
            return Err(Error::InvalidArgument(format!("alpha = {a} must be positive")));
        }
        if a > 1.0 && h.len() > 1 && h.iter().all(|x| *x == h[0]) {
            return Err(Error::Degenerate(
                "constant heights cannot grow like alpha^n with alpha > 1".into(),
            ));
        }
    }
    let usable = h.len().saturating_sub(1);
    if usable < 3 {
        return Err(Error::TooShort {
            needed: 4,
            have: h.len(),
        });
    }
    let len = tail_window(usable).max(5).min(usable);
    let start = h.len() - len;
    let steps: Vec<usize> = (start..h.len()).filter(|&n| h[n] > 0.0).collect();
    if steps.len() < 3 {
        return Err(Error::Degenerate(
            "fewer than three positive heights in the fitted range".into(),
        ));
    }
    let fit_for = |ell: u32, idx: &[usize]| -> (f64, Vec<f64>) {
        let xs: Vec<f64> = idx.iter().map(|&n| n as f64).collect();
        let ys: Vec<f64> = idx.iter().map(|&n| h[n].ln() - ell as f64 * (n as f64).ln()).collect();
        let log_alpha = match alpha {
            AlphaInput::Given(a) => a.ln(),
            AlphaInput::Fit => regress(&xs, &ys).1,
        };
        let normalised: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - x * log_alpha).collect();
        (log_alpha, normalised)
    };
    let choose = |idx: &[usize]| -> (u32, f64, Vec<f64>, f64) {
        let mut best: Option<(u32, f64, Vec<f64>, f64)> = None;
        for ell in 0..=ell_max {
            let (la, norm) = fit_for(ell, idx);
            let var = variance(&norm);
            let better = match &best {
                None => true,
                Some((_, _, _, bv)) => var < *bv - 1e-12 * (1.0 + bv.abs()),
            };
            if better {
                best = Some((ell, la, norm, var));
            }
        }
        best.unwrap()
    };
    let (_, _, norm, _) = choose(&steps);
    let (q1, med, q3) = quartiles(&norm);
    let fence = (3.0 * (q3 - q1)).max(1e-9 * (1.0 + med.abs()));
    let suspects: Vec<usize> = steps
        .iter()
        .zip(&norm)
        .filter(|(_, v)| **v < q1 - fence || **v > q3 + fence)
        .map(|(n, _)| *n)
        .collect();
    let kept: Vec<usize> = steps.iter().copied().filter(|n| !suspects.contains(n)).collect();
    let kept = if kept.len() >= 3 { kept } else { steps.clone() };
    let (ell, log_alpha, _, var) = choose(&kept);
    let alpha_v = match alpha {
        AlphaInput::Given(a) => a,
        AlphaInput::Fit => log_alpha.exp(),
    };
    let values: Vec<f64> = kept
        .iter()
        .map(|&n| h[n] / ((n as f64).powi(ell as i32) * alpha_v.powi(n as i32)))
        .collect();
    let c1 = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let c2 = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let per_step: Vec<f64> = kept
        .windows(2)
        .filter(|w| w[1] == w[0] + 1)
        .map(|w| {
            let (a, b) = (w[0] as f64, w[1] as f64);
            h[w[1]] / h[w[0]] * (a / b).powi(ell as i32)
        })
        .collect();
    let (alpha_lo, alpha_hi) = match alpha {
        AlphaInput::Given(a) => (a, a),
        AlphaInput::Fit if per_step.is_empty() => (alpha_v, alpha_v),
        AlphaInput::Fit => (
            per_step.iter().cloned().fold(f64::INFINITY, f64::min).min(alpha_v),
            per_step.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(alpha_v),
        ),
    };
    Ok(GrowthFit {
        ell,
        alpha: alpha_v,
        alpha_lo,
        alpha_hi,
        c1,
        c2,
        range: (start, h.len() - 1),
        suspects,
        variance: var,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundViolation {
    pub n: usize,
    pub lhs: f64,
    pub bound: f64,
    pub at_suspect: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioBoundReport {
    pub m: usize,
    pub checked: usize,
    pub violations: Vec<BoundViolation>,
}

/// Checks `h_{n-m}/h_n <= (C2/C1) ((n-m)/n)^l alpha^{-m}` (relative slack 1e-9)
/// over the fitted range.
pub fn ratio_bound_check(orbit: &OrbitRecord, fit: &GrowthFit, m: usize) -> RatioBoundReport {
    let h: Vec<f64> = orbit.steps().iter().map(|s| s.h.to_f64()).collect();
    ratio_bound_check_values(&h, fit, m)
}

pub fn ratio_bound_check_values(h: &[f64], fit: &GrowthFit, m: usize) -> RatioBoundReport {
    let (lo, hi) = fit.range;
    let mut checked = 0;
    let mut violations = Vec::new();
    for n in (lo + m).max(1)..=hi.min(h.len().saturating_sub(1)) {
        let k = n - m;
        if k < lo || h[n] <= 0.0 || (fit.ell > 0 && k == 0) {
            continue;
        }
        checked += 1;
        let lhs = h[k] / h[n];
        let bound = fit.c2 / fit.c1 * (k as f64 / n as f64).powi(fit.ell as i32) * fit.alpha.powi(-(m as i32));
        if lhs > bound * (1.0 + 1e-9) {
            violations.push(BoundViolation {
                n,
                lhs,
                bound,
                at_suspect: fit.suspects.contains(&n) || fit.suspects.contains(&k),
            });
        }
    }
    RatioBoundReport { m, checked, violations }
}
