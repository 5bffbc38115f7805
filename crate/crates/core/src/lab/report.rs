//! JSON renderings of reports, with the same fixed decimals as the CSV output.

use serde_json::{json, Value as Json};

use super::closure::ClosureProxy;
use super::emit::{quotient_decimal, rational_decimal, DIGITS};
use super::experiments::{Clause, GapSeries, RatioSeries, RatioVerdict, Sign, Thm14Report, Thm17Report, Value};
use crate::degree::{AlphaEstimate, GrowthFit, RatioBoundReport, Verdict};
use crate::exactnum::{format_rational, LogMag, Ratio, Rational};
use crate::polydyn::{OrbitRecord, ProjPoint};
use crate::singular::{EfdEstimate, EfdExact, LctResult, M0Report};
use crate::weil::GlobalWeil;

pub fn rational(q: &Rational) -> Json {
    json!(format_rational(q))
}

pub fn logmag(x: &LogMag) -> Json {
    json!(x.to_decimal(DIGITS))
}

pub fn point(p: &ProjPoint) -> Json {
    json!(p.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

fn ratio(r: &Ratio) -> Json {
    match &r.exact {
        Some(q) => json!({ "exact": format_rational(q), "decimal": rational_decimal(q, DIGITS) }),
        None => json!({ "approx": r.approx }),
    }
}

fn value(v: &Value) -> Json {
    json!({ "exact": v.exact.as_ref().map(format_rational), "approx": v.approx })
}

fn clause(c: &Clause) -> Json {
    match c {
        Clause::Holds => json!("holds"),
        Clause::Fails => json!("fails"),
        Clause::Unverified(why) => json!({ "unverified": why }),
    }
}

fn verdict(v: &Verdict) -> Json {
    match v {
        Verdict::Converged { value, spread } => json!({ "converged": value, "spread": spread }),
        Verdict::Inconclusive { spread } => json!({ "inconclusive": true, "spread": spread }),
    }
}

pub fn closure(c: &ClosureProxy) -> Json {
    json!({ "points": c.points, "containment": c.to_string() })
}

pub fn ratio_verdict(v: &RatioVerdict) -> Json {
    match v {
        RatioVerdict::TrendingToZero { rate } => json!({ "trending_to_zero": { "rate": rate } }),
        RatioVerdict::TrendingTo { value, spread } => {
            json!({ "trending_to": { "value": value, "spread": spread } })
        }
        RatioVerdict::Inconclusive { spread } => json!({ "inconclusive": { "spread": spread } }),
        RatioVerdict::Degenerate { skipped } => json!({ "degenerate": { "skipped": skipped } }),
    }
}

pub fn ratio_series(s: &RatioSeries) -> Json {
    let rows: Vec<Json> = s
        .rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "h": logmag(&r.h_l),
                "lambda_S": r.lambda_s.as_ref().map(logmag),
                "lambda_all": r.lambda_all.as_ref().map(logmag),
                "ratio": r.ratio.as_ref().and_then(|q| {
                    quotient_decimal(r.lambda_s.as_ref()?, &r.h_l, q.exact.as_ref(), DIGITS)
                }),
                "skipped": r.skipped,
                "annotations": r.annotations,
                "per_w": r.per_w.iter().map(|l| l.as_ref().map(logmag)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "verdict": ratio_verdict(&s.verdict),
        "window": s.window,
        "skipped": s.skipped,
        "height_identity_audited": s.audited,
        "per_w_labels": s.per_w_labels,
        "warnings": s.warnings,
        "rows": rows,
    })
}

fn sign(s: Sign) -> &'static str {
    match s {
        Sign::Negative => "negative",
        Sign::Zero => "zero",
        Sign::Positive => "positive",
        Sign::Unresolved => "unresolved",
    }
}

pub fn gap_series(g: &GapSeries) -> Json {
    let rows: Vec<Json> = g
        .rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "h": logmag(&r.h_l),
                "lambda_S": r.lambda_s.as_ref().map(logmag),
                "gap": r.gap.as_ref().map(logmag),
                "sign": r.sign.map(sign),
                "skipped": r.skipped,
            })
        })
        .collect();
    let sample = g.sample.as_ref().map(|s| {
        json!({
            "evaluated": s.rows.len(),
            "support_hits": s.support_hits,
            "negative": s.negative.iter().map(point).collect::<Vec<_>>(),
            "closure": closure(&s.closure),
        })
    });
    json!({
        "eps_prime": rational(&g.eps_prime),
        "orbit_negative": g.orbit_negative,
        "orbit_closure": closure(&g.orbit_closure),
        "sample": sample,
        "warnings": g.warnings,
        "rows": rows,
    })
}

fn m0_report(r: &M0Report) -> Json {
    json!({
        "m0": r.m0,
        "depth": r.depth,
        "rows": r.rows.iter().map(|(m, lb, target, holds)| json!({
            "m": m, "inverse_s_m": format_rational(lb), "target": format_rational(target), "holds": holds,
        })).collect::<Vec<_>>(),
    })
}

pub fn efd_estimate(e: &EfdEstimate) -> Json {
    json!({
        "s": e.s.iter().map(format_rational).collect::<Vec<_>>(),
        "ratios": e.ratios.iter().map(format_rational).collect::<Vec<_>>(),
        "roots": e.roots,
        "estimate": e.estimate,
        "no_growth": e.no_growth,
        "probabilistic": e.probabilistic,
    })
}

pub fn efd_exact(e: &EfdExact) -> Json {
    json!({
        "exact": e.exact.as_ref().map(format_rational),
        "enclosure": [format_rational(&e.lo), format_rational(&e.hi)],
        "value": e.value_f64(),
        "no_growth": e.no_growth,
        "reaching": e.reaching,
        "charpoly": e.charpoly.coeffs().iter().map(format_rational).collect::<Vec<_>>(),
    })
}

pub fn alpha(est: &AlphaEstimate) -> Json {
    json!({
        "exact": est.exact_value().as_ref().map(format_rational),
        "verdict": verdict(&est.verdict),
        "root_verdict": verdict(&est.root_verdict),
        "window": est.window,
        "ratio_seq": est.ratio_seq.iter().map(|r| r.as_ref().map(ratio)).collect::<Vec<_>>(),
        "root_seq": est.root_seq,
    })
}

pub fn growth_fit(fit: &GrowthFit) -> Json {
    json!({
        "ell": fit.ell,
        "alpha": fit.alpha,
        "alpha_range": [fit.alpha_lo, fit.alpha_hi],
        "c1": fit.c1,
        "c2": fit.c2,
        "range": [fit.range.0, fit.range.1],
        "suspects": fit.suspects,
        "variance": fit.variance,
        "status": "range-consistent",
    })
}

pub fn ratio_bound(r: &RatioBoundReport) -> Json {
    json!({
        "m": r.m,
        "checked": r.checked,
        "violations": r.violations.iter().map(|v| json!({
            "n": v.n, "lhs": v.lhs, "bound": v.bound, "at_suspect": v.at_suspect,
        })).collect::<Vec<_>>(),
    })
}

pub fn thm14(r: &Thm14Report) -> Json {
    json!({
        "degree": r.degree,
        "alpha": r.alpha.as_ref().map(value),
        "alpha_estimate": r.alpha_estimate.as_ref().map(alpha),
        "e_family": r.e_family.as_ref().map(value),
        "efd": r.efd.as_ref().map(efd_estimate),
        "e": r.e.as_ref().map(format_rational),
        "eps": rational(&r.eps),
        "eps0": rational(&r.eps0),
        "clauses": {
            "alpha_gt_one": clause(&r.alpha_gt_one),
            "e_covers_family": clause(&r.e_covers_family),
            "family_below_alpha": clause(&r.family_below_alpha),
            "i": clause(&r.clause_i),
            "ii": clause(&r.clause_ii),
        },
        "m0_ii": r.m0_ii,
        "m0_search": r.m0_search.as_ref().map(m0_report),
        "hypotheses_hold": r.hypotheses_hold(),
        "genericity": r.genericity,
        "orbit_closure": r.orbit_closure.as_ref().map(closure),
        "violations": r.violations,
        "notes": r.notes,
    })
}

pub fn thm17(r: &Thm17Report) -> Json {
    json!({
        "eps": rational(&r.eps),
        "liminf_tail": value(&r.liminf),
        "window": r.window,
        "flagged": r.flagged,
        "flagged_tail": r.flagged_tail,
        "closure": closure(&r.closure),
        "warnings": r.warnings,
        "rows": r.rows.iter().map(|row| json!({
            "n": row.n,
            "complement_ratio": ratio(&row.complement),
            "all_ratio": ratio(&row.all),
            "in_tail": row.in_tail,
            "flagged": row.flagged,
        })).collect::<Vec<_>>(),
    })
}

pub fn lct(r: &LctResult) -> Json {
    json!({
        "lb": r.lb.to_string(),
        "ub": r.ub.to_string(),
        "exact": r.is_exact(),
        "certificate": format!("{:?}", r.kind),
        "lp_vertex": r.lp_vertex.as_ref().map(|v| v.iter().map(format_rational).collect::<Vec<_>>()),
        "valuation": r.valuation,
    })
}

pub fn global_weil(g: &GlobalWeil) -> Json {
    json!({
        "total": logmag(&g.total),
        "archimedean": logmag(&g.archimedean),
        "nonarchimedean": logmag(&g.nonarchimedean),
        "terms": g.terms.iter().map(|(p, l)| json!({ "place": p.to_string(), "value": logmag(l) }))
            .collect::<Vec<_>>(),
    })
}

pub fn orbit(o: &OrbitRecord) -> Json {
    json!({
        "map_id": o.map_id(),
        "depth": o.depth(),
        "steps": o.steps().iter().map(|s| json!({ "n": s.n, "point": point(&s.point), "h": logmag(&s.h) }))
            .collect::<Vec<_>>(),
    })
}
