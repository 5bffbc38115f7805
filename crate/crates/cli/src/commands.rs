use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_traits::ToPrimitive;
use orbitweil::degree::{alpha_estimate, growth_fit, ratio_bound_check, AlphaInput, DEFAULT_ELL_MAX};
use orbitweil::exactnum::{parse_rational, rat, Rational};
use orbitweil::lab::config::OutputSpec;
use orbitweil::lab::emit::{gap_csv, orbit_csv, ratio_csv, ratio_svg, sample_csv, write_file};
use orbitweil::lab::{
    gap_series, ratio_series, report, thm14_hypothesis_report, thm17_from_series, ExperimentConfig, RunOptions, Setup,
};
use orbitweil::polydyn::{HomogPoly, DEFAULT_COMPOSITION_CAP};
use orbitweil::singular::{
    cn_calculator, component_multiplicity, efd_estimate, efd_monomial_exact, family_max_ord, lct_form_interval,
    lct_lower_bound_canonical, lct_monomial, lct_valuation_search, ExponentMatrix, MonomialIdeal, ValuationFamily,
};
use orbitweil::weil::AnyDivisor;
use serde_json::{json, Value as Json};

use crate::{Command, Common};

/// Depth of the column-sup sequence printed by `efd` for monomial maps.
const EFD_SEQUENCE_DEPTH: usize = 10;

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Orbit(c) => orbit(&c),
        Command::Weil(c) => weil(&c),
        Command::Alpha(c) => alpha(&c),
        Command::Lct(c) => lct(&c),
        Command::Efd(c) => efd(&c),
        Command::Cn(c) => cn(&c),
        Command::Ratio { common, svg } => ratio(&common, svg),
        Command::Gap { common, eps_prime } => gap(&common, eps_prime.as_deref()),
        Command::Thm14(c) => thm14(&c),
        Command::Thm17 { common, eps } => thm17(&common, eps.as_deref()),
    }
}

fn load(c: &Common) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig::load(&c.config)?)
}

fn options(c: &Common) -> RunOptions {
    RunOptions {
        depth: c.depth,
        cache_dir: c.cache_dir.clone(),
    }
}

fn outputs(cfg: &ExperimentConfig) -> OutputSpec {
    cfg.outputs.clone().unwrap_or_default()
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            write_file(p, text)?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(c: &Common, cfg: &ExperimentConfig, value: &Json) -> Result<()> {
    let path = c.out.clone().or(outputs(cfg).json);
    emit(path.as_deref(), &format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn rational_arg(s: &str) -> Result<Rational> {
    parse_rational(s).with_context(|| format!("bad rational {s:?}"))
}

fn orbit(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let setup = Setup::new(&cfg, &options(c))?;
    let (orbit, cached) = setup.orbit()?;
    if let Some(o) = cached {
        eprintln!("cache: {o:?}");
    }
    let path = c.out.clone().or(outputs(&cfg).csv);
    emit(path.as_deref(), &orbit_csv(&orbit))
}

fn weil(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let opts = RunOptions {
        depth: Some(c.depth.unwrap_or(0)),
        cache_dir: c.cache_dir.clone(),
    };
    let setup = Setup::new(&cfg, &opts)?;
    let d = setup.divisor()?;
    let (orbit, _) = setup.orbit()?;
    let expected_factor = d.weight() * rat(d.degree() as i64);
    let mut rows = Vec::new();
    for step in orbit.steps() {
        if d.in_support(&step.point) {
            rows.push(json!({ "n": step.n, "point": report::point(&step.point), "support_hit": true }));
            continue;
        }
        let locals = d.weil_locals(&step.point, &setup.places)?;
        let per_place: Vec<Json> = setup
            .places
            .iter()
            .zip(&locals)
            .map(|(v, l)| json!({ "place": v.to_string(), "lambda": report::logmag(l) }))
            .collect();
        let global = d.symmetrized(&step.point)?;
        rows.push(json!({
            "n": step.n,
            "point": report::point(&step.point),
            "h": report::logmag(&step.h),
            "local": per_place,
            "lambda_S": report::logmag(&orbitweil::LogMag::sum(&locals)),
            "global": report::global_weil(&global),
            "deg_D_times_h": report::logmag(&step.h.scale(&expected_factor)),
            "support_hit": false,
        }));
    }
    emit_json(c, &cfg, &json!({ "warnings": setup.warnings, "rows": rows }))
}

fn alpha(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let setup = Setup::new(&cfg, &options(c))?;
    let (orbit, _) = setup.orbit()?;
    let est = alpha_estimate(&orbit)?;
    let fit = growth_fit(&orbit, AlphaInput::Fit, DEFAULT_ELL_MAX);
    let value = match &fit {
        Ok(fit) => {
            let bounds: Vec<Json> = (1..=3)
                .map(|m| report::ratio_bound(&ratio_bound_check(&orbit, fit, m)))
                .collect();
            json!({ "alpha": report::alpha(&est), "growth_fit": report::growth_fit(fit), "ratio_bounds": bounds })
        }
        Err(e) => json!({ "alpha": report::alpha(&est), "growth_fit": { "error": e.to_string() } }),
    };
    emit_json(c, &cfg, &value)
}

fn lct(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let Some(spec) = &cfg.lct else {
        bail!("config has no lct block")
    };
    let value = if let Some(gens) = &spec.generators {
        let nvars = gens.first().map_or(0, Vec::len);
        let ideal = MonomialIdeal::new(nvars, gens.clone())?;
        let lp = lct_monomial(&ideal);
        let search = lct_valuation_search(&ideal, spec.bound);
        let family = if ideal.is_unit() {
            None
        } else {
            Some(lct_lower_bound_canonical(&family_max_ord(&ideal))?)
        };
        json!({
            "ideal": ideal.to_string(),
            "howald_lp": report::lct(&lp),
            "valuation_search": report::lct(&search),
            "search_bound": spec.bound,
            "agree": lp.value() == search.value(),
            "family_lower_bound": family.as_ref().map(report::lct),
        })
    } else {
        let form = spec.form.as_deref().expect("validated");
        let nvars = spec.nvars.ok_or_else(|| anyhow::anyhow!("lct.form needs lct.nvars"))?;
        let g = HomogPoly::parse(form, nvars)?;
        let (mult, exact) = component_multiplicity(&g, 3, 0)?;
        let interval = lct_form_interval(&g, spec.bound, mult)?;
        json!({
            "form": g.to_string(),
            "component_multiplicity": mult,
            "multiplicity_exact": exact,
            "interval": report::lct(&interval),
        })
    };
    emit_json(c, &cfg, &value)
}

fn efd(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let spec = cfg.efd.clone();
    let value = match spec.as_ref().and_then(|s| s.exponent_matrix.clone()) {
        Some(a) => {
            let target = spec.as_ref().map_or(0, |s| s.target);
            let m = ExponentMatrix::new(a)?;
            let exact = efd_monomial_exact(&m, target)?;
            let depth = c
                .depth
                .or(spec.as_ref().and_then(|s| s.depth))
                .unwrap_or(EFD_SEQUENCE_DEPTH);
            let sup = m.column_sup(target, depth);
            let ratios: Vec<f64> = sup
                .windows(2)
                .map(|w| match (w[0].to_f64(), w[1].to_f64()) {
                    (Some(a), Some(b)) if a > 0.0 => b / a,
                    _ => f64::NAN,
                })
                .collect();
            json!({
                "spectral": report::efd_exact(&exact),
                "column_sup": sup.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "ratios": ratios,
            })
        }
        None => {
            let f = cfg.morphism()?;
            let d = cfg.resolved_divisor(f.nvars())?.divisor;
            let depth = c
                .depth
                .or(spec.as_ref().and_then(|s| s.depth))
                .unwrap_or(DEFAULT_COMPOSITION_CAP.min(cfg.depth_or_default()).max(1));
            let bound = spec.as_ref().map_or(2, |s| s.bound);
            let family = ValuationFamily::standard(f.nvars(), bound);
            let est = match &d {
                AnyDivisor::Rational(p) => efd_estimate(&f, p.sd(), depth, &family, DEFAULT_COMPOSITION_CAP)?,
                AnyDivisor::Quadratic(p) => efd_estimate(&f, p.sd(), depth, &family, DEFAULT_COMPOSITION_CAP)?,
            };
            json!({ "family_estimate": report::efd_estimate(&est), "chart_bound": bound })
        }
    };
    emit_json(c, &cfg, &value)
}

fn cn(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let Some(spec) = &cfg.cn else {
        bail!("config has no cn block")
    };
    let (gamma, cn) = cn_calculator(&spec.multiplicities, spec.dim, &spec.delta.value()?, spec.m, spec.n)?;
    emit_json(
        c,
        &cfg,
        &json!({ "gamma": report::rational(&gamma), "c_n": report::rational(&cn) }),
    )
}

fn ratio(c: &Common, svg: Option<PathBuf>) -> Result<()> {
    let cfg = load(c)?;
    let series = ratio_series(&Setup::new(&cfg, &options(c))?)?;
    for w in &series.warnings {
        eprintln!("warning: {w}");
    }
    let out = outputs(&cfg);
    let csv_path = c.out.clone().or(out.csv);
    emit(csv_path.as_deref(), &ratio_csv(&series)?)?;
    if let Some(p) = svg.or(out.svg) {
        emit(Some(&p), &ratio_svg(&series)?)?;
    }
    eprintln!("verdict: {}", report::ratio_verdict(&series.verdict));
    Ok(())
}

fn gap(c: &Common, eps_prime: Option<&str>) -> Result<()> {
    let cfg = load(c)?;
    let eps_prime = match eps_prime {
        Some(s) => rational_arg(s)?,
        None => cfg
            .rational("eps_prime")?
            .ok_or_else(|| anyhow::anyhow!("gap needs eps_prime"))?,
    };
    let series = gap_series(&Setup::new(&cfg, &options(c))?, cfg.sample.as_ref(), &eps_prime)?;
    let out = outputs(&cfg);
    let csv_path = c.out.clone().or(out.csv);
    emit(csv_path.as_deref(), &gap_csv(&series)?)?;
    if let Some(s) = &series.sample {
        match &csv_path {
            Some(p) => emit(Some(&sibling(p, ".sample.csv")), &sample_csv(&s.rows)?)?,
            None => print!("{}", sample_csv(&s.rows)?),
        }
    }
    let mut summary = report::gap_series(&series);
    summary.as_object_mut().expect("object").remove("rows");
    eprintln!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

fn thm14(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let r = thm14_hypothesis_report(&cfg, &options(c))?;
    emit_json(c, &cfg, &report::thm14(&r))
}

fn thm17(c: &Common, eps: Option<&str>) -> Result<()> {
    let cfg = load(c)?;
    let eps = match eps {
        Some(s) => rational_arg(s)?,
        None => cfg.rational("eps")?.ok_or_else(|| anyhow::anyhow!("thm17 needs eps"))?,
    };
    let series = ratio_series(&Setup::new(&cfg, &options(c))?)?;
    let r = thm17_from_series(&series, &eps)?;
    emit_json(c, &cfg, &report::thm17(&r))
}
