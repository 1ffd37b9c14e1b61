//! The six subcommands.

use nvmix::ghd::{RULE_GH_LOG_CONCAVE, RULE_GH_LOG_CONVEX_HALVES, RULE_GH_MODE_AT_MU, RULE_GH_TAILS, RULE_GH_UNIMODAL};
use nvmix::gig::{RULE_GIG_DECREASING, RULE_GIG_LOG_CONCAVE, RULE_GIG_LOG_CONVEX, RULE_GIG_UNIMODAL};
use nvmix::mixture::{
    mgh_shape, mixture_shape, mv_mode, mvnvmm_logpdf, mvnvmm_sample, nvmm_logpdf, nvmm_mode, nvmm_sample,
    RULE_MGH_CONVEX_CONTOURS, RULE_MGH_LOG_CONCAVE, RULE_MGH_LOG_CONVEX_RAYS, RULE_MGH_MODE_AT_MU,
    RULE_MIX_LOG_CONCAVE, RULE_MIX_LOG_CONVEX_HALVES, RULE_MIX_MODE_AT_MU, RULE_MIX_UNIMODAL, RULE_MV_SINGLE_MAX,
};
use nvmix::shapecheck::{
    certify_logconcave_logvalues, certify_logconvex_logvalues, certify_unimodal, convex_contours_check, linspace,
    GridFunction,
};
use nvmix::sichel::{gigp_shape, RULE_GIGP_DECREASING, RULE_GIGP_LOG_CONCAVE, RULE_GIGP_LOG_CONVEX, RULE_GIGP_UNIMODAL};
use nvmix::{GhParams, ShapeClass};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Command, Family, Grid, ParamValue, RunConfig};
use crate::model::{build, Model};
use crate::report::{curvature_witness, flags_json, num, nums, unimodal_witness, Check, Flag, Report, Table};
use crate::RunError;

/// Cited for the shape of a tabulated mixing density.
pub const RULE_TABLE_SHAPE: &str = "table: shape of the tabulated mixing density, read exactly from its log-linear pieces and tails";

fn core(e: nvmix::Error) -> RunError {
    RunError::field("computation", e.to_string())
}

/// Grid used when `--grid` is absent.
pub fn default_grid(model: &Model) -> Grid {
    match model {
        Model::Gh(gh) => Grid { lo: gh.mu() - 10.0, hi: gh.mu() + 10.0, n: 401 },
        Model::Gig(_) => Grid { lo: 0.01, hi: 10.0, n: 400 },
        Model::Mgh { .. } => Grid { lo: -10.0, hi: 10.0, n: 201 },
        Model::Gigp { .. } => Grid { lo: 0.0, hi: 0.0, n: 0 },
        Model::Custom { mu, .. } => Grid { lo: mu - 10.0, hi: mu + 10.0, n: 401 },
    }
}

fn gh_logpdf(gh: &GhParams<f64>, y: f64) -> Result<f64, RunError> {
    match gh.logpdf(y) {
        Ok(v) => Ok(v),
        Err(nvmix::Error::Pole { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(core(e)),
    }
}

fn par_eval(xs: &[f64], f: impl Fn(f64) -> Result<f64, RunError> + Sync) -> Result<Vec<f64>, RunError> {
    xs.par_iter().map(|&x| f(x)).collect()
}

fn along(mu: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    mu.iter().zip(dir).map(|(m, d)| m + d * t).collect()
}

fn mgh_logf(spec: &nvmix::MvMixtureSpec<f64>, y: &[f64]) -> f64 {
    match mvnvmm_logpdf(spec, y) {
        Ok(v) => v,
        Err(nvmix::Error::Pole { .. }) => f64::INFINITY,
        Err(_) => f64::NAN,
    }
}

pub fn run_command(cfg: &RunConfig) -> Result<Report, RunError> {
    if cfg.command == Command::Sweep {
        // every point builds its own model
        return sweep(cfg);
    }
    let model = &build(cfg, &cfg.params)?;
    let grid = cfg.grid.unwrap_or_else(|| default_grid(model));
    match cfg.command {
        Command::Eval => eval(model, &grid),
        Command::Sample => sample(cfg, model),
        Command::Mode => mode(model),
        Command::Classify => {
            let (flags, extra) = classify(model);
            let mut r = Report::default();
            r.results.insert("flags".into(), flags_json(&flags));
            r.results.extend(extra);
            r.cite(&flags);
            if let Model::Custom { table, .. } = model {
                r.cite(&mixing_flags(&table.shape()));
            }
            Ok(r)
        }
        Command::Certify => certify(cfg, model, &grid),
        Command::Sweep => unreachable!("handled above"),
    }
}

fn eval(model: &Model, grid: &Grid) -> Result<Report, RunError> {
    let mut r = Report::default();
    let mut table = Table::default();
    match model {
        Model::Gh(gh) => {
            let ys = grid.points();
            let ls = par_eval(&ys, |y| gh_logpdf(gh, y))?;
            table.columns = vec!["y".into(), "log_f".into()];
            table.rows = ys.iter().zip(&ls).map(|(&y, &l)| vec![num(y), num(l)]).collect();
        }
        Model::Gig(g) => {
            let xs = grid.points();
            let ls = par_eval(&xs, |x| g.logpdf(x).map_err(core))?;
            table.columns = vec!["x".into(), "log_g".into()];
            table.rows = xs.iter().zip(&ls).map(|(&x, &l)| vec![num(x), num(l)]).collect();
        }
        Model::Gigp { params, ymax } => {
            table.columns = vec!["y".into(), "log_p".into()];
            table.rows = (0..=*ymax).map(|y| vec![json!(y), num(params.logpmf(y))]).collect();
        }
        Model::Custom { mixing, mu, beta, sigma, .. } => {
            let ys = grid.points();
            let ls = par_eval(&ys, |y| nvmm_logpdf(mixing, *mu, *beta, *sigma, y).map_err(core))?;
            table.columns = vec!["y".into(), "log_f".into()];
            table.rows = ys.iter().zip(&ls).map(|(&y, &l)| vec![num(y), num(l)]).collect();
        }
        Model::Mgh { spec, direction, .. } => {
            let ts = grid.points();
            let ls = par_eval(&ts, |t| Ok(mgh_logf(spec, &along(spec.mu(), direction, t))))?;
            table.columns = std::iter::once("t".to_string())
                .chain((1..=spec.dim()).map(|i| format!("y{i}")))
                .chain(std::iter::once("log_f".to_string()))
                .collect();
            table.rows = ts
                .iter()
                .zip(&ls)
                .map(|(&t, &l)| {
                    let y = along(spec.mu(), direction, t);
                    std::iter::once(num(t)).chain(y.into_iter().map(num)).chain(std::iter::once(num(l))).collect()
                })
                .collect();
            r.diagnostics.insert("direction".into(), nums(direction));
        }
    }
    r.diagnostics.insert("points".into(), json!(table.rows.len()));
    r.table = Some(table);
    Ok(r)
}

fn sample(cfg: &RunConfig, model: &Model) -> Result<Report, RunError> {
    let seed = cfg.seed.expect("validated: sample has a seed");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.count;
    let mut r = Report::default();
    let draws: Value = match model {
        Model::Gh(gh) => nums(&gh.sample_n(&mut rng, n)),
        Model::Gig(g) => nums(&g.sample_n(&mut rng, n)),
        Model::Gigp { params, .. } => json!(params.sample_n(&mut rng, n)),
        Model::Custom { mixing, mu, beta, sigma, .. } => {
            nums(&nvmm_sample(mixing, *mu, *beta, *sigma, &mut rng, n).map_err(core)?)
        }
        Model::Mgh { spec, .. } => {
            let ys = mvnvmm_sample(spec, &mut rng, n).map_err(core)?;
            Value::Array(ys.iter().map(|y| nums(y)).collect())
        }
    };
    r.results.insert("samples".into(), draws);
    r.results.insert("count".into(), json!(n));
    r.diagnostics.insert("rng".into(), json!("ChaCha8"));
    Ok(r)
}

fn mode(model: &Model) -> Result<Report, RunError> {
    let mut r = Report::default();
    let flags = match model {
        Model::Gh(gh) => {
            let m = gh.mode();
            let s = gh.shape_classify();
            r.results.insert("mode".into(), num(m.location));
            r.results.insert("pole".into(), json!(m.pole));
            vec![Flag::new("unimodal", true, RULE_GH_UNIMODAL), Flag::new("mode_at_mu", s.mode_at_mu, RULE_GH_MODE_AT_MU)]
        }
        Model::Gig(g) => {
            let s = g.shape_class();
            r.results.insert("mode".into(), num(g.mode()));
            vec![
                Flag::new("unimodal", true, RULE_GIG_UNIMODAL),
                Flag::new("decreasing_on_support", s.decreasing_on_support, RULE_GIG_DECREASING),
            ]
        }
        Model::Gigp { params, ymax } => {
            let reach = params.truncation_point().unwrap_or(*ymax).max(*ymax);
            let s = gigp_shape(params, reach);
            r.results.insert("mode".into(), json!(s.mode));
            vec![Flag::new("unimodal", true, RULE_GIGP_UNIMODAL), Flag::new("decreasing", s.decreasing, RULE_GIGP_DECREASING)]
        }
        Model::Custom { table, mixing, mu, beta, sigma } => {
            let m = nvmm_mode(mixing, *mu, *beta, *sigma).map_err(core)?;
            let s = mixture_shape(Some(&table.shape()), *beta);
            r.results.insert("mode".into(), num(m));
            vec![
                Flag { name: "unimodal", value: s.unimodal, rule: RULE_MIX_UNIMODAL },
                Flag { name: "mode_at_mu", value: s.mode_at_mu, rule: RULE_MIX_MODE_AT_MU },
            ]
        }
        Model::Mgh { spec, gig, .. } => {
            let m = mv_mode(spec).map_err(core)?;
            let s = mgh_shape(gig, spec.beta());
            r.results.insert("mode".into(), nums(&m));
            vec![Flag::new("on_drift_line", true, RULE_MV_SINGLE_MAX), Flag::new("mode_at_mu", s.mode_at_mu, RULE_MGH_MODE_AT_MU)]
        }
    };
    r.results.insert("flags".into(), flags_json(&flags));
    r.cite(&flags);
    Ok(r)
}

fn shape_flags(s: &ShapeClass<f64>, rules: [&'static str; 4]) -> Vec<Flag> {
    vec![
        Flag::new("unimodal", s.unimodal, rules[0]),
        Flag::new("decreasing_on_support", s.decreasing_on_support, rules[1]),
        Flag::new("log_concave", s.log_concave, rules[2]),
        Flag::new("log_convex", s.log_convex, rules[3]),
    ]
}

/// Shape of a tabulated mixing density, named apart from the mixture's flags.
fn mixing_flags(s: &ShapeClass<f64>) -> Vec<Flag> {
    vec![
        Flag::new("mixing_unimodal", s.unimodal, RULE_TABLE_SHAPE),
        Flag::new("mixing_decreasing_on_support", s.decreasing_on_support, RULE_TABLE_SHAPE),
        Flag::new("mixing_log_concave", s.log_concave, RULE_TABLE_SHAPE),
        Flag::new("mixing_log_convex", s.log_convex, RULE_TABLE_SHAPE),
    ]
}

/// Flags in a fixed order, plus family-specific extras.
pub fn classify(model: &Model) -> (Vec<Flag>, serde_json::Map<String, Value>) {
    let mut extra = serde_json::Map::new();
    let flags = match model {
        Model::Gh(gh) => {
            let s = gh.shape_classify();
            extra.insert("mode".into(), json!({ "location": num(s.mode.location), "pole": s.mode.pole }));
            extra.insert(
                "tails".into(),
                json!({
                    "left": { "power": num(s.left_tail.power), "rate": num(s.left_tail.rate) },
                    "right": { "power": num(s.right_tail.power), "rate": num(s.right_tail.rate) },
                    "rule": RULE_GH_TAILS,
                }),
            );
            vec![
                Flag::new("unimodal", s.unimodal, RULE_GH_UNIMODAL),
                Flag::new("mode_at_mu", s.mode_at_mu, RULE_GH_MODE_AT_MU),
                Flag::new("log_concave", s.log_concave, RULE_GH_LOG_CONCAVE),
                Flag::new("log_convex_halves", s.log_convex_halves, RULE_GH_LOG_CONVEX_HALVES),
            ]
        }
        Model::Gig(g) => {
            extra.insert("mode".into(), num(g.mode()));
            shape_flags(&g.shape_class(), [RULE_GIG_UNIMODAL, RULE_GIG_DECREASING, RULE_GIG_LOG_CONCAVE, RULE_GIG_LOG_CONVEX])
        }
        Model::Gigp { params, .. } => {
            let reach = params.truncation_point().unwrap_or(100).max(1);
            let s = gigp_shape(params, reach);
            extra.insert("mode".into(), json!(s.mode));
            vec![
                Flag::new("unimodal", s.unimodal, RULE_GIGP_UNIMODAL),
                Flag::new("decreasing", s.decreasing, RULE_GIGP_DECREASING),
                Flag::new("log_concave", s.log_concave, RULE_GIGP_LOG_CONCAVE),
                Flag { name: "log_convex", value: s.log_convex, rule: RULE_GIGP_LOG_CONVEX },
            ]
        }
        Model::Custom { table, beta, .. } => {
            let g = table.shape();
            extra.insert("mixing_shape".into(), flags_json(&mixing_flags(&g)));
            let s = mixture_shape(Some(&g), *beta);
            vec![
                Flag { name: "unimodal", value: s.unimodal, rule: RULE_MIX_UNIMODAL },
                Flag { name: "mode_at_mu", value: s.mode_at_mu, rule: RULE_MIX_MODE_AT_MU },
                Flag { name: "log_concave", value: s.log_concave, rule: RULE_MIX_LOG_CONCAVE },
                Flag { name: "log_convex_halves", value: s.log_convex_halves, rule: RULE_MIX_LOG_CONVEX_HALVES },
            ]
        }
        Model::Mgh { spec, gig, .. } => {
            let s = mgh_shape(gig, spec.beta());
            extra.insert("dimension".into(), json!(spec.dim()));
            vec![
                Flag::new("convex_contours", s.convex_contours, RULE_MGH_CONVEX_CONTOURS),
                Flag::new("mode_at_mu", s.mode_at_mu, RULE_MGH_MODE_AT_MU),
                Flag::new("log_concave", s.log_concave, RULE_MGH_LOG_CONCAVE),
                Flag::new("log_convex_rays", s.log_convex_rays, RULE_MGH_LOG_CONVEX_RAYS),
            ]
        }
    };
    (flags, extra)
}

fn finite_part(xs: &[f64], ls: &[f64]) -> GridFunction<f64> {
    let (x, l): (Vec<f64>, Vec<f64>) = xs.iter().zip(ls).filter(|(_, l)| l.is_finite()).map(|(a, b)| (*a, *b)).unzip();
    GridFunction::new(x, l).expect("grid stays sorted")
}

fn curvature_check(
    name: &'static str,
    rule: &'static str,
    predicted: Option<bool>,
    xs: &[f64],
    ls: &[f64],
    tol: f64,
    convex: bool,
) -> Check {
    let g = finite_part(xs, ls);
    let (ok, w) = if g.len() < 3 {
        (true, None)
    } else if convex {
        certify_logconvex_logvalues(&g, tol)
    } else {
        certify_logconcave_logvalues(&g, tol)
    };
    Check { name, rule, predicted, observed: ok, decisive: false, witness: curvature_witness(&w) }
}

/// Log-convexity on each side of `mu`, the point itself excluded.
fn halves_check(name: &'static str, rule: &'static str, predicted: Option<bool>, ys: &[f64], ls: &[f64], mu: f64, tol: f64) -> Check {
    let split = |keep: &dyn Fn(f64) -> bool| -> (Vec<f64>, Vec<f64>) {
        ys.iter().zip(ls).filter(|(y, _)| keep(**y)).map(|(a, b)| (*a, *b)).unzip()
    };
    let (ly, ll) = split(&|y| y < mu);
    let (ry, rl) = split(&|y| y > mu);
    let left = curvature_check(name, rule, predicted, &ly, &ll, tol, true);
    let right = curvature_check(name, rule, predicted, &ry, &rl, tol, true);
    let observed = left.observed && right.observed;
    let witness = if !left.observed {
        json!({ "side": "left", "at": left.witness })
    } else if !right.observed {
        json!({ "side": "right", "at": right.witness })
    } else {
        Value::Null
    };
    Check { name, rule, predicted, observed, decisive: false, witness }
}

fn unimodal_check(rule: &'static str, predicted: Option<bool>, xs: &[f64], ls: &[f64]) -> Check {
    let cert = certify_unimodal(&GridFunction::new(xs.to_vec(), ls.to_vec()).expect("grid stays sorted"));
    Check { name: "unimodal", rule, predicted, observed: cert.passed, decisive: false, witness: unimodal_witness(&cert) }
}

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn certify(cfg: &RunConfig, model: &Model, grid: &Grid) -> Result<Report, RunError> {
    let mut r = Report::default();
    let curv = cfg.tolerance("curvature");
    let mode_tol = cfg.tolerance("mode");
    match model {
        Model::Gh(gh) => {
            let s = gh.shape_classify();
            let ys = grid.points();
            let ls = par_eval(&ys, |y| gh_logpdf(gh, y))?;
            r.add_check(unimodal_check(RULE_GH_UNIMODAL, Some(true), &ys, &ls));
            let m = gh.numeric_mode().location;
            r.add_check(Check {
                name: "mode_at_mu",
                rule: RULE_GH_MODE_AT_MU,
                predicted: Some(s.mode_at_mu),
                observed: near(m, gh.mu(), mode_tol),
                decisive: true,
                witness: json!({ "numeric_mode": num(m) }),
            });
            r.add_check(curvature_check("log_concave", RULE_GH_LOG_CONCAVE, Some(s.log_concave), &ys, &ls, curv, false));
            r.add_check(halves_check("log_convex_halves", RULE_GH_LOG_CONVEX_HALVES, Some(s.log_convex_halves), &ys, &ls, gh.mu(), curv));
        }
        Model::Gig(g) => {
            let s = g.shape_class();
            let xs = grid.points();
            let ls = par_eval(&xs, |x| g.logpdf(x).map_err(core))?;
            r.add_check(unimodal_check(RULE_GIG_UNIMODAL, Some(true), &xs, &ls));
            let falls = ls.windows(2).position(|w| w[1] > w[0]);
            r.add_check(Check {
                name: "decreasing_on_support",
                rule: RULE_GIG_DECREASING,
                predicted: Some(s.decreasing_on_support),
                observed: falls.is_none(),
                decisive: false,
                witness: falls.map(|i| json!({ "index": i + 1, "x": num(xs[i + 1]) })).unwrap_or(Value::Null),
            });
            r.add_check(curvature_check("log_concave", RULE_GIG_LOG_CONCAVE, Some(s.log_concave), &xs, &ls, curv, false));
            r.add_check(curvature_check("log_convex", RULE_GIG_LOG_CONVEX, Some(s.log_convex), &xs, &ls, curv, true));
        }
        Model::Gigp { params, ymax } => {
            let s = gigp_shape(params, *ymax);
            r.add_check(Check {
                name: "unimodal",
                rule: RULE_GIGP_UNIMODAL,
                predicted: Some(true),
                observed: s.unimodal_on_grid,
                decisive: false,
                witness: Value::Null,
            });
            let rise = (0..*ymax).find(|&y| params.log_ratio(y) > 0.0);
            r.add_check(Check {
                name: "decreasing",
                rule: RULE_GIGP_DECREASING,
                predicted: Some(s.decreasing),
                observed: rise.is_none(),
                decisive: true,
                witness: rise.map(|y| json!({ "y": y + 1 })).unwrap_or(Value::Null),
            });
            r.add_check(Check {
                name: "log_concave",
                rule: RULE_GIGP_LOG_CONCAVE,
                predicted: Some(s.log_concave),
                observed: s.log_concave_on_grid,
                decisive: false,
                witness: s.log_concave_violation.map(|y| json!({ "y": y })).unwrap_or(Value::Null),
            });
            r.diagnostics.insert("ymax".into(), json!(ymax));
        }
        Model::Custom { table, mixing, mu, beta, sigma } => {
            let g = table.shape();
            let s = mixture_shape(Some(&g), *beta);
            let ys = grid.points();
            let ls = par_eval(&ys, |y| nvmm_logpdf(mixing, *mu, *beta, *sigma, y).map_err(core))?;
            r.add_check(unimodal_check(RULE_MIX_UNIMODAL, s.unimodal, &ys, &ls));
            let m = nvmm_mode(mixing, *mu, *beta, *sigma).map_err(core)?;
            r.add_check(Check {
                name: "mode_at_mu",
                rule: RULE_MIX_MODE_AT_MU,
                predicted: s.mode_at_mu,
                observed: near(m, *mu, mode_tol),
                decisive: false,
                witness: json!({ "numeric_mode": num(m) }),
            });
            r.add_check(curvature_check("log_concave", RULE_MIX_LOG_CONCAVE, s.log_concave, &ys, &ls, curv, false));
            r.add_check(halves_check("log_convex_halves", RULE_MIX_LOG_CONVEX_HALVES, s.log_convex_halves, &ys, &ls, *mu, curv));
            let mixing = mixing_flags(&g);
            r.diagnostics.insert("mixing_shape".into(), flags_json(&mixing));
            r.cite(&mixing);
        }
        Model::Mgh { spec, gig, .. } => certify_mgh(cfg, &mut r, spec, gig, grid)?,
    }
    let checks: serde_json::Map<String, Value> = r.checks.iter().map(|c| (c.name.to_string(), c.json())).collect();
    r.results.insert("checks".into(), Value::Object(checks));
    r.results.insert("passed".into(), json!(!r.certification_failed()));
    if cfg.family != Family::Gigp {
        r.diagnostics.insert("grid".into(), json!({ "lo": num(grid.lo), "hi": num(grid.hi), "n": grid.n }));
    }
    Ok(r)
}

fn unit(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..p).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn certify_mgh(
    cfg: &RunConfig,
    r: &mut Report,
    spec: &nvmix::MvMixtureSpec<f64>,
    gig: &nvmix::GigParams<f64>,
    grid: &Grid,
) -> Result<(), RunError> {
    let s = mgh_shape(gig, spec.beta());
    let p = spec.dim();
    let seed = cfg.seed.unwrap_or(0);
    let trials = cfg.tolerance("trials").round().max(1.0) as usize;
    let radius = cfg.tolerance("radius");
    let curv = cfg.tolerance("curvature");
    let logf = |y: &[f64]| mgh_logf(spec, y);

    let mode = mv_mode(spec).map_err(core)?;
    let (contours_ok, line) = convex_contours_check(logf, &mode, radius, trials, seed);
    r.add_check(Check {
        name: "convex_contours",
        rule: RULE_MGH_CONVEX_CONTOURS,
        predicted: Some(true),
        observed: contours_ok,
        decisive: false,
        witness: line
            .map(|w| json!({ "trial": w.trial, "point": nums(&w.point), "direction": nums(&w.direction) }))
            .unwrap_or(Value::Null),
    });

    // stationarity at the mode, split along and across the drift
    let at_mode = logf(&mode);
    let grad: Vec<f64> = (0..p)
        .map(|i| {
            let h = 1e-4 * (1.0 + mode[i].abs());
            let mut a = mode.clone();
            let mut b = mode.clone();
            a[i] += h;
            b[i] -= h;
            (logf(&a) - logf(&b)) / (2.0 * h)
        })
        .collect();
    let bn = spec.beta().iter().map(|v| v * v).sum::<f64>().sqrt();
    let along_beta = if bn > 0.0 { grad.iter().zip(spec.beta()).map(|(g, b)| g * b).sum::<f64>() / bn } else { 0.0 };
    let across: f64 = if bn > 0.0 {
        grad.iter().zip(spec.beta()).map(|(g, b)| (g - along_beta * b / bn).powi(2)).sum::<f64>().sqrt()
    } else {
        grad.iter().map(|g| g * g).sum::<f64>().sqrt()
    };
    let offset: Vec<f64> = mode.iter().zip(spec.mu()).map(|(m, u)| m - u).collect();
    let t = if bn > 0.0 { offset.iter().zip(spec.beta()).map(|(o, b)| o * b).sum::<f64>() / (bn * bn) } else { 0.0 };
    let off_line = offset.iter().zip(spec.beta()).map(|(o, b)| (o - t * b).powi(2)).sum::<f64>().sqrt();
    let pole = at_mode == f64::INFINITY;
    r.add_check(Check {
        name: "mode_on_drift_line",
        rule: RULE_MV_SINGLE_MAX,
        predicted: Some(true),
        observed: pole || (across < cfg.tolerance("gradient") && off_line <= 1e-12 * (1.0 + t.abs() * bn)),
        decisive: false,
        witness: json!({ "mode": nums(&mode), "t": num(t), "gradient_across": num(across), "gradient_along": num(along_beta), "pole": pole }),
    });
    let dist = offset.iter().map(|o| o * o).sum::<f64>().sqrt();
    let mu_norm = spec.mu().iter().map(|v| v * v).sum::<f64>().sqrt();
    r.add_check(Check {
        name: "mode_at_mu",
        rule: RULE_MGH_MODE_AT_MU,
        predicted: Some(s.mode_at_mu),
        observed: dist <= cfg.tolerance("mode") * (1.0 + mu_norm),
        decisive: true,
        witness: json!({ "distance": num(dist) }),
    });

    // log-concavity along random lines through the ball, log-convexity along rays from mu
    let ts = grid.points();
    let concave_fail = (0..trials).into_par_iter().find_map_first(|trial| {
        let mut rng = trial_rng(seed.wrapping_add(1), trial);
        let dir = unit(&mut rng, p);
        let off = unit(&mut rng, p);
        let base: Vec<f64> = mode.iter().zip(&off).map(|(m, o)| m + radius * 0.5 * o).collect();
        let ls: Vec<f64> = ts.iter().map(|&t| logf(&along(&base, &dir, t))).collect();
        let c = curvature_check("log_concave", RULE_MGH_LOG_CONCAVE, None, &ts, &ls, curv, false);
        (!c.observed).then(|| json!({ "trial": trial, "point": nums(&base), "direction": nums(&dir), "at": c.witness }))
    });
    r.add_check(Check {
        name: "log_concave",
        rule: RULE_MGH_LOG_CONCAVE,
        predicted: Some(s.log_concave),
        observed: concave_fail.is_none(),
        decisive: false,
        witness: concave_fail.unwrap_or(Value::Null),
    });
    let pos: Vec<f64> = {
        let v: Vec<f64> = ts.iter().copied().filter(|&t| t > 0.0).collect();
        if v.len() >= 3 {
            v
        } else {
            let hi = grid.hi.abs().max(grid.lo.abs());
            linspace(hi / grid.n as f64, hi, grid.n)
        }
    };
    let convex_fail = (0..trials).into_par_iter().find_map_first(|trial| {
        let mut rng = trial_rng(seed.wrapping_add(2), trial);
        let dir = unit(&mut rng, p);
        let ls: Vec<f64> = pos.iter().map(|&t| logf(&along(spec.mu(), &dir, t))).collect();
        let c = curvature_check("log_convex_rays", RULE_MGH_LOG_CONVEX_RAYS, None, &pos, &ls, curv, true);
        (!c.observed).then(|| json!({ "trial": trial, "direction": nums(&dir), "at": c.witness }))
    });
    r.add_check(Check {
        name: "log_convex_rays",
        rule: RULE_MGH_LOG_CONVEX_RAYS,
        predicted: Some(s.log_convex_rays),
        observed: convex_fail.is_none(),
        decisive: false,
        witness: convex_fail.unwrap_or(Value::Null),
    });
    r.diagnostics.insert("trials".into(), json!(trials));
    r.diagnostics.insert("seed".into(), json!(seed));
    Ok(())
}

fn sweep(cfg: &RunConfig) -> Result<Report, RunError> {
    let sw = cfg.sweep.as_ref().expect("validated: sweep range present");
    let values = sw.values();
    let rows: Vec<(Vec<Flag>, Option<String>)> = values
        .par_iter()
        .map(|&v| {
            let mut params = cfg.params.clone();
            params.insert(sw.param.clone(), ParamValue::Scalar(v));
            match build(cfg, &params) {
                Ok(model) => (classify(&model).0, None),
                Err(e) => (Vec::new(), Some(e.message)),
            }
        })
        .collect();
    let names: Vec<&'static str> = rows.iter().find(|(f, _)| !f.is_empty()).map(|(f, _)| f.iter().map(|f| f.name).collect()).unwrap_or_default();
    let mut table = Table {
        columns: std::iter::once(sw.param.clone())
            .chain(names.iter().map(|n| n.to_string()))
            .chain(std::iter::once("error".to_string()))
            .collect(),
        rows: Vec::new(),
    };
    let mut r = Report::default();
    for (v, (flags, err)) in values.iter().zip(&rows) {
        let mut row = vec![num(*v)];
        if flags.is_empty() {
            row.extend(names.iter().map(|_| Value::Null));
        } else {
            row.extend(flags.iter().map(|f| json!(f.value)));
            r.cite(flags);
        }
        row.push(err.as_ref().map(|e| json!(e)).unwrap_or(Value::Null));
        table.rows.push(row);
    }
    r.diagnostics.insert("invalid_points".into(), json!(rows.iter().filter(|(_, e)| e.is_some()).count()));
    r.table = Some(table);
    Ok(r)
}
