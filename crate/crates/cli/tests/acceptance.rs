//! Acceptance run: each criterion prints one PASS/FAIL line, and any
//! failure makes the process exit nonzero.

// `ensure!` negates comparisons so that a NaN measurement fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use nvmix::gof::{ks_test, Support};
use nvmix::linalg::SquareMatrix;
use nvmix::mixture::{kernel_integral, kernel_k, mgh_shape, mv_mode, mvnvmm_logpdf, nvmm_logpdf, nvmm_mean_sd};
use nvmix::quad::PeakHint;
use nvmix::shapecheck::{
    certify_logconcave_logvalues, certify_logconvex_logvalues, convex_contours_check, linspace, tp_minors,
    variation_diminish_check, GridFunction,
};
use nvmix::sichel::{gigp_shape, poisson_mixture_logpmf};
use nvmix::specfun::log_bessel_k;
use nvmix::{GhParams, GigPParams, GigParams, MixingDensity, MvMixtureSpec, TableDensity};
use nvmix_cli::run_args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use statrs::function::gamma::ln_gamma;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// `|exp(a - b) - 1|`: relative error of `e^a` against `e^b`.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).exp_m1().abs()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bessel() -> Outcome {
    let zs: Vec<f64> = (0..1000).map(|i| (1e-4f64.ln() + (500f64.ln() - 1e-4f64.ln()) * i as f64 / 999.0).exp()).collect();
    let mut worst = 0.0f64;
    for &z in &zs {
        let half = 0.5 * (PI / (2.0 * z)).ln() - z;
        let forms = [(0.5, half), (1.5, half + (1.0 / z).ln_1p()), (2.5, half + (3.0 / z + 3.0 / (z * z)).ln_1p())];
        for (nu, exact) in forms {
            let got = log_bessel_k(nu, z).map_err(|e| e.to_string())?;
            let r = rel(got, exact);
            ensure!(r <= 1e-12, "K_{nu}({z}) relative error {r:e}");
            worst = worst.max(r);
        }
    }

    let mut r = rng(1);
    let mut sym = 0.0f64;
    for _ in 0..1000 {
        let nu = r.random_range(0.0..20.0);
        let z = 10f64.powf(r.random_range(-4.0..2.7));
        let a = log_bessel_k(nu, z).map_err(|e| e.to_string())?;
        let b = log_bessel_k(-nu, z).map_err(|e| e.to_string())?;
        sym = sym.max(rel(a, b));
    }
    ensure!(sym <= 1e-13, "symmetry error {sym:e}");

    // z^nu K_nu(z) -> 2^(nu-1) Gamma(nu); for nu >= 1/2 the remainder at
    // z = 1e-6 is far below the tolerance
    let z = 1e-6f64;
    let mut limit = 0.0f64;
    for nu in [0.5, 1.0, 1.5, 2.3, 5.0] {
        let got = nu * z.ln() + log_bessel_k(nu, z).map_err(|e| e.to_string())?;
        let want = (nu - 1.0) * 2f64.ln() + ln_gamma(nu);
        limit = limit.max(rel(got, want));
    }
    // K_0(z) ~ -ln(z/2) - Euler gamma
    let k0 = log_bessel_k(0.0, z).map_err(|e| e.to_string())?.exp();
    limit = limit.max((k0 / (-(z / 2.0).ln() - 0.577_215_664_901_532_9) - 1.0).abs());
    ensure!(limit <= 1e-4, "small-argument limit error {limit:e}");

    // K_{nu+1} = K_{nu-1} + (2 nu / z) K_nu, residual relative to the largest term
    let mut rec = 0.0f64;
    for _ in 0..1000 {
        let nu = r.random_range(-30.0..30.0);
        let z = 10f64.powf(r.random_range(-3.0..2.7));
        let up = log_bessel_k(nu + 1.0, z).map_err(|e| e.to_string())?;
        let down = log_bessel_k(nu - 1.0, z).map_err(|e| e.to_string())?;
        let mid = log_bessel_k(nu, z).map_err(|e| e.to_string())? + (2.0 * nu.abs() / z).ln();
        let top = up.max(down).max(mid);
        let res = (up - top).exp() - (down - top).exp() - nu.signum() * (mid - top).exp();
        rec = rec.max(res.abs());
    }
    ensure!(rec <= 1e-10, "recurrence residual {rec:e}");
    Ok(format!(
        "closed forms {worst:.1e}, symmetry {sym:.1e}, small-z limit {limit:.1e}, recurrence {rec:.1e}"
    ))
}

fn kernel_identity() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let beta = 5.0 * (1.0 - r.random::<f64>());
        let y = r.random_range(0.0..=50.0);
        let v = kernel_integral(y, beta).map_err(|e| e.to_string())?;
        let err = (v * beta - 1.0).abs();
        ensure!(err <= 1e-8, "integral at y = {y}, beta = {beta} is {v}, want {}", 1.0 / beta);
        worst = worst.max(err);
    }
    Ok(format!("200 draws, max |beta * integral - 1| = {worst:.1e}"))
}

fn gh_vs_mixture() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    let mut lambdas = (f64::INFINITY, f64::NEG_INFINITY);
    for set in 0..50 {
        let gh = if set < 45 {
            let lambda = -3.0 + 6.0 * set as f64 / 44.0;
            let alpha = r.random_range(0.5..3.0);
            let beta = alpha * r.random_range(-0.9..0.9);
            GhParams::new(r.random_range(-2.0..2.0), lambda, alpha, beta, r.random_range(0.2..3.0))
        } else {
            let alpha = r.random_range(0.5..3.0);
            GhParams::new(r.random_range(-2.0..2.0), r.random_range(0.8..3.0), alpha, alpha * r.random_range(-0.9..0.9), 0.0)
        }
        .map_err(|e| e.to_string())?;
        lambdas = (lambdas.0.min(gh.lambda()), lambdas.1.max(gh.lambda()));
        let g = MixingDensity::gig(gh.mixing());
        for y in linspace(gh.mu() - 15.0, gh.mu() + 15.0, 201) {
            let a = gh.logpdf(y).map_err(|e| e.to_string())?;
            let b = nvmm_logpdf(&g, gh.mu(), gh.beta(), 1.0, y).map_err(|e| format!("{gh:?} at {y}: {e}"))?;
            let err = rel(a, b);
            ensure!(err <= 1e-6, "{gh:?} at y = {y}: closed form {a}, quadrature {b}");
            worst = worst.max(err);
        }
    }
    Ok(format!("50 sets, lambda in [{:.2}, {:.2}], max relative error {worst:.1e}", lambdas.0, lambdas.1))
}

/// Grid argmax of the log-density lands on `mu` (the grid contains `mu`).
fn grid_mode_at_mu(gh: &GhParams<f64>) -> bool {
    let ys = linspace(gh.mu() - 20.0, gh.mu() + 20.0, 40001);
    let centre = 20000;
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &y) in ys.iter().enumerate() {
        let v = gh.logpdf(y).unwrap_or(f64::INFINITY);
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0 == centre
}

fn gh_shape_matrix() -> Outcome {
    let mut cases = 0;
    // mode at mu exactly when beta = 0 or (delta = 0 and 0 < lambda <= 1)
    for beta in [0.0, 0.3, -0.4] {
        for delta in [0.0, 1.0] {
            for lambda in [-1.0, 0.3, 0.5, 0.8, 1.0, 1.5, 3.0] {
                if delta == 0.0 && lambda <= 0.0 {
                    continue;
                }
                let gh = GhParams::new(0.5, lambda, 1.0, beta, delta).map_err(|e| e.to_string())?;
                let expected = beta == 0.0 || (delta == 0.0 && lambda > 0.0 && lambda <= 1.0);
                let flag = gh.shape_classify().mode_at_mu;
                let observed = grid_mode_at_mu(&gh);
                ensure!(
                    flag == expected && observed == expected,
                    "mode at mu for lambda {lambda}, beta {beta}, delta {delta}: flag {flag}, grid {observed}, rule {expected}"
                );
                if delta > 0.0 && beta != 0.0 {
                    let h = 1e-5;
                    let slope = (gh.logpdf(gh.mu() + h).unwrap() - gh.logpdf(gh.mu() - h).unwrap()) / (2.0 * h);
                    ensure!((slope - beta).abs() <= 1e-4, "log-slope at mu is {slope}, want {beta} (lambda {lambda})");
                }
                cases += 1;
            }
        }
    }

    // log-concavity on grids, alpha = 1, beta = 0.3, delta = 1
    let grids: Vec<Vec<f64>> = vec![
        linspace(-5.0, 5.0, 2001),
        linspace(-20.0, 20.0, 201),
        linspace(-100.0, 100.0, 201),
        linspace(-400.0, 400.0, 201),
        linspace(-1000.0, 1000.0, 201),
    ];
    let concave_on = |gh: &GhParams<f64>, ys: &[f64]| -> Result<bool, String> {
        let ls: Vec<f64> = ys.iter().map(|&y| gh.logpdf(y)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let f = GridFunction::new(ys.to_vec(), ls).map_err(|e| e.to_string())?;
        Ok(certify_logconcave_logvalues(&f, 1e-9).0)
    };
    for lambda in [1.0, 1.5, 3.0, 0.99, 0.5, -0.5] {
        let gh = GhParams::new(0.0, lambda, 1.0, 0.3, 1.0).map_err(|e| e.to_string())?;
        let mut all = true;
        for ys in &grids {
            all &= concave_on(&gh, ys)?;
        }
        let expected = lambda >= 1.0;
        ensure!(all == expected, "lambda {lambda}: log-concave on every grid = {all}, rule says {expected}");
        ensure!(gh.shape_classify().log_concave == expected, "log_concave flag wrong for lambda {lambda}");
        cases += 1;
    }

    // log-convex on each side of mu iff delta = 0 and 0 < lambda <= 1
    for (lambda, delta) in [(0.3, 0.0), (0.5, 0.0), (0.8, 0.0), (1.0, 0.0), (1.5, 0.0), (2.0, 0.0), (0.5, 1.0), (1.0, 1.0), (2.0, 1.0)] {
        let gh = GhParams::new(0.0, lambda, 1.0, 0.3, delta).map_err(|e| e.to_string())?;
        let mut both = true;
        for side in [1.0, -1.0] {
            let mut ys: Vec<f64> = (1..=300).map(|i| side * 0.1 * i as f64).collect();
            ys.sort_by(f64::total_cmp);
            let ls: Vec<f64> = ys.iter().map(|&y| gh.logpdf(y)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            let f = GridFunction::new(ys, ls).map_err(|e| e.to_string())?;
            both &= certify_logconvex_logvalues(&f, 1e-9).0;
        }
        let expected = delta == 0.0 && lambda > 0.0 && lambda <= 1.0;
        ensure!(both == expected, "lambda {lambda}, delta {delta}: log-convex halves observed {both}, rule says {expected}");
        ensure!(gh.shape_classify().log_convex_halves == expected, "log_convex_halves flag wrong for lambda {lambda}");
        cases += 1;
    }
    Ok(format!("{cases} cases agree with the rules in both directions"))
}

/// Log-concave table: slopes decrease and both tails bend down.
fn concave_table(r: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, f64, f64) {
    let n = 20;
    let mut xs = vec![r.random_range(0.05..0.5)];
    for _ in 1..n {
        let last = xs[xs.len() - 1];
        xs.push(last + r.random_range(0.1..1.0));
    }
    let mut slope: f64 = r.random_range(0.5..3.0);
    let first = slope;
    let mut logs = vec![0.0];
    for i in 1..n {
        logs.push(logs[i - 1] + slope * (xs[i] - xs[i - 1]));
        slope -= r.random_range(0.05..1.0);
    }
    let last: f64 = (logs[n - 1] - logs[n - 2]) / (xs[n - 1] - xs[n - 2]);
    let a = (first * xs[0]).max(0.0) + r.random_range(0.0..1.0);
    let rate = (-last).max(0.0) + r.random_range(0.1..1.0);
    (xs, logs, a, rate)
}

/// Unimodal table whose slopes rise somewhere, so it is not log-concave.
fn unimodal_table(r: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, f64, f64) {
    let up = r.random_range(3..8);
    let down = r.random_range(5..12);
    let mut slopes: Vec<f64> = (0..up).map(|_| r.random_range(0.1..2.0)).collect();
    slopes.extend((0..down).map(|_| -r.random_range(0.1..2.0)));
    let mut xs = vec![r.random_range(0.05..0.5)];
    let mut logs = vec![0.0];
    for s in slopes {
        let dx = r.random_range(0.1..1.0);
        let (x, l) = (xs[xs.len() - 1], logs[logs.len() - 1]);
        xs.push(x + dx);
        logs.push(l + s * dx);
    }
    (xs, logs, r.random_range(0.0..2.0), r.random_range(0.1..2.0))
}

fn table_genericity() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut r = rng(5);
    let mut made = 0;
    let mut attempts = 0;
    while made < 20 {
        attempts += 1;
        ensure!(attempts < 1000, "could not generate tables");
        let want_concave = made < 10;
        let (xs, logs, a, rate) = if want_concave { concave_table(&mut r) } else { unimodal_table(&mut r) };
        let table = TableDensity::new(xs.clone(), logs.clone(), a, rate).map_err(|e| e.to_string())?;
        let shape = table.shape();
        if !shape.unimodal || shape.log_concave != want_concave {
            continue;
        }
        let (mu, beta, sigma) = (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(0.5..2.0));
        let (mean, sd) = nvmm_mean_sd(&table.into_mixing(), mu, beta, sigma).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("g{made}.txt"));
        let text: String = xs.iter().zip(&logs).map(|(x, l)| format!("{x:.17e} {l:.17e}\n")).collect();
        std::fs::write(&path, format!("# mixing table {made}\n{text}")).map_err(|e| e.to_string())?;
        let args = vec![
            "certify".to_string(),
            "--family".into(),
            "custom".into(),
            "--table".into(),
            path.display().to_string(),
            "--left-power".into(),
            a.to_string(),
            "--right-rate".into(),
            rate.to_string(),
            "--mu".into(),
            mu.to_string(),
            "--beta".into(),
            beta.to_string(),
            "--sigma".into(),
            sigma.to_string(),
            "--grid".into(),
            format!("{},{},401", mean - 10.0 * sd, mean + 10.0 * sd),
        ];
        let out = run_args(&args);
        let doc: Value = serde_json::from_str(&out.document).map_err(|e| e.to_string())?;
        ensure!(out.exit_code == 0, "table {made}: exit {}\n{}", out.exit_code, out.document);
        let checks = &doc["results"]["checks"];
        ensure!(checks["unimodal"]["status"] == "pass", "table {made}: unimodal check {}", checks["unimodal"]);
        if want_concave {
            ensure!(checks["log_concave"]["status"] == "pass", "table {made}: log_concave check {}", checks["log_concave"]);
        }
        made += 1;
    }
    Ok("10 log-concave and 10 unimodal tables certified through the CLI".into())
}

type RandomModel = (MvMixtureSpec<f64>, GigParams<f64>, Vec<f64>);

fn random_spec(r: &mut ChaCha8Rng, p: usize) -> Result<RandomModel, String> {
    let gig = GigParams::new(r.random_range(-2.0..3.0), r.random_range(0.2..3.0), r.random_range(0.2..3.0)).map_err(|e| e.to_string())?;
    let noise: Vec<f64> = (0..p * p).map(|_| 0.4 * r.random_range(-1.0..1.0)).collect();
    let a = SquareMatrix::from_fn(p, |i, j| if i == j { 1.0 } else { 0.0 } + noise[i * p + j]);
    // beta = A b, so the standardized drift b is known exactly
    let b: Vec<f64> = (0..p).map(|_| r.random_range(-1.0..1.0)).collect();
    let beta = a.mul_vec(&b);
    let mu: Vec<f64> = (0..p).map(|_| r.random_range(-1.0..1.0)).collect();
    let spec = MvMixtureSpec::new(mu, beta, a, MixingDensity::gig(gig)).map_err(|e| e.to_string())?;
    Ok((spec, gig, b))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Random vector orthogonal to `b`.
fn orthogonal(r: &mut ChaCha8Rng, b: &[f64]) -> Vec<f64> {
    let v: Vec<f64> = b.iter().map(|_| r.random_range(-1.0..1.0)).collect();
    let k = dot(&v, b) / dot(b, b);
    v.iter().zip(b).map(|(x, y)| x - k * y).collect()
}

fn multivariate() -> Outcome {
    let mut r = rng(6);
    let mut specs = Vec::new();
    for i in 0..10 {
        specs.push(random_spec(&mut r, 2 + i % 2)?);
    }
    let mut eq = 0.0f64;
    let mut grad = 0.0f64;
    for (k, (spec, _, b)) in specs.iter().enumerate() {
        let f = |y: &[f64]| mvnvmm_logpdf(spec, y).map_err(|e| e.to_string());
        for _ in 0..20 {
            let t = r.random_range(-2.0..2.0);
            let v1 = orthogonal(&mut r, b);
            let v2 = orthogonal(&mut r, b);
            let s = (dot(&v1, &v1) / dot(&v2, &v2)).sqrt();
            let v2: Vec<f64> = v2.iter().map(|x| x * s).collect();
            let point = |v: &[f64]| -> Vec<f64> {
                let z = spec.a().mul_vec(v);
                (0..spec.dim()).map(|i| spec.mu()[i] + spec.beta()[i] * t + z[i]).collect()
            };
            let (a1, a2) = (f(&point(&v1))?, f(&point(&v2))?);
            eq = eq.max(rel(a1, a2));
        }
        ensure!(eq <= 1e-8, "model {k}: hyperplane values differ by {eq:e}");

        let m = mv_mode(spec).map_err(|e| e.to_string())?;
        let d: Vec<f64> = m.iter().zip(spec.mu()).map(|(a, b)| a - b).collect();
        let beta = spec.beta();
        let along = dot(&d, beta) / dot(beta, beta);
        let off = d.iter().zip(beta).map(|(x, y)| (x - along * y).powi(2)).sum::<f64>().sqrt();
        ensure!(off <= 1e-9 * (1.0 + along.abs()), "model {k}: mode is {off:e} off the drift line");
        let h = 1e-4;
        let g: Vec<f64> = (0..spec.dim())
            .map(|i| {
                let mut up = m.clone();
                let mut dn = m.clone();
                up[i] += h;
                dn[i] -= h;
                Ok((f(&up)? - f(&dn)?) / (2.0 * h))
            })
            .collect::<Result<_, String>>()?;
        let ga = dot(&g, beta) / dot(beta, beta);
        let perp = g.iter().zip(beta).map(|(x, y)| (x - ga * y).abs()).fold(0.0f64, f64::max);
        ensure!(perp < 1e-5, "model {k}: orthogonal gradient component {perp:e} at the mode");
        grad = grad.max(perp);

        let logf = |y: &[f64]| mvnvmm_logpdf(spec, y).unwrap_or(f64::NEG_INFINITY);
        let (ok, witness) = convex_contours_check(logf, &m, 3.0, 100, 100 + k as u64);
        ensure!(ok, "model {k}: level set not convex, {witness:?}");
    }

    // log-concave at p = 2 iff lambda >= 3/2
    let a = SquareMatrix::from_rows(&[vec![1.0, 0.3], vec![0.0, 1.0]]).unwrap();
    let mut verdicts = Vec::new();
    for lambda in [2.0, 1.0] {
        let gig = GigParams::new(lambda, 1.0, 1.0).map_err(|e| e.to_string())?;
        let beta = vec![0.5, -0.3];
        let spec = MvMixtureSpec::new(vec![0.0, 0.0], beta.clone(), a.clone(), MixingDensity::gig(gig)).map_err(|e| e.to_string())?;
        let mut lr = rng(7);
        let mut concave = true;
        for _ in 0..50 {
            let dir: Vec<f64> = {
                let v: Vec<f64> = (0..2).map(|_| lr.random_range(-1.0..1.0)).collect();
                let n = dot(&v, &v).sqrt();
                v.iter().map(|x| x / n).collect()
            };
            let start: Vec<f64> = (0..2).map(|_| lr.random_range(-2.0..2.0)).collect();
            let ts = linspace(-10.0, 10.0, 201);
            let ls: Vec<f64> = ts
                .iter()
                .map(|&t| mvnvmm_logpdf(&spec, &[start[0] + t * dir[0], start[1] + t * dir[1]]))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            concave &= certify_logconcave_logvalues(&GridFunction::new(ts, ls).map_err(|e| e.to_string())?, 1e-9).0;
        }
        let expected = lambda >= 1.5;
        ensure!(concave == expected, "p = 2, lambda {lambda}: log-concave on lines {concave}, rule says {expected}");
        ensure!(mgh_shape(&gig, &beta).log_concave == expected, "mgh log_concave flag wrong for lambda {lambda}");
        verdicts.push(concave);
    }
    Ok(format!(
        "hyperplane equality {eq:.1e}, orthogonal gradient {grad:.1e}, 1000 contour lines, p = 2 log-concavity {verdicts:?}"
    ))
}

fn random_gigp(r: &mut ChaCha8Rng, i: usize) -> Result<GigPParams<f64>, String> {
    let (lambda, chi, psi) = match i % 10 {
        7 => (r.random_range(0.2..3.0), 0.0, r.random_range(0.05..5.0)),
        8 => (r.random_range(-5.0..-3.0), r.random_range(0.5..5.0), 0.0),
        _ => (r.random_range(-3.0..3.0), r.random_range(0.05..5.0), r.random_range(0.05..5.0)),
    };
    GigPParams::new(lambda, chi, psi).map_err(|e| e.to_string())
}

fn sichel() -> Outcome {
    let mut r = rng(8);
    let mut quad = 0.0f64;
    let mut mass = 0.0f64;
    for i in 0..50 {
        let p = random_gigp(&mut r, i)?;
        let g = MixingDensity::gig(p.mixing());
        for y in 0..=100 {
            let q = poisson_mixture_logpmf(&g, y).map_err(|e| e.to_string())?;
            let err = rel(p.logpmf(y), q);
            ensure!(err <= 1e-10, "{p:?} at y = {y}: closed form {}, quadrature {q}", p.logpmf(y));
            quad = quad.max(err);
        }
        let top = p.truncation_point().ok_or_else(|| format!("{p:?}: no truncation point"))?;
        let total: f64 = (0..=top).map(|y| p.pmf(y)).sum();
        ensure!((total - 1.0).abs() <= 1e-9, "{p:?}: pmf sums to {total} over 0..={top}");
        mass = mass.max((total - 1.0).abs());
    }

    // chi = 0 gives the negative binomial with r = lambda, p = psi / (psi + 2)
    let mut nb = 0.0f64;
    for (lambda, psi) in [(0.3, 0.5), (1.0, 1.0), (2.5, 0.2), (7.0, 4.0), (0.05, 3.0)] {
        let p = GigPParams::new(lambda, 0.0, psi).map_err(|e| e.to_string())?;
        let mut log_coef = 0.0;
        for y in 0..=100u64 {
            if y > 0 {
                log_coef += ((lambda + (y - 1) as f64) / y as f64).ln();
            }
            let want = log_coef + lambda * (psi / (psi + 2.0)).ln() + y as f64 * (2.0 / (psi + 2.0)).ln();
            let err = rel(p.logpmf(y), want);
            ensure!(err <= 1e-12, "negative binomial r = {lambda}, psi = {psi}, y = {y}: error {err:e}");
            nb = nb.max(err);
        }
    }

    // the decreasing flag against elementwise monotonicity
    let mut seen = [0usize; 2];
    for i in 0..60 {
        let p = random_gigp(&mut r, i)?;
        let flag = gigp_shape(&p, 200).decreasing;
        let monotone = (0..200).all(|y| p.logpmf(y + 1) <= p.logpmf(y));
        ensure!(flag == monotone, "{p:?}: decreasing flag {flag}, pmf monotone to 200 {monotone}");
        seen[flag as usize] += 1;
    }
    ensure!(seen[0] > 0 && seen[1] > 0, "decreasing draws not mixed: {seen:?}");

    // discrete log-concavity iff lambda >= 1
    let tol = 1e-12f64.ln_1p();
    let mut cases = 0;
    let mut late = Vec::new();
    for &(chi, psi) in &[(1.0, 1.0), (2.0, 0.5), (0.2, 3.0), (0.0, 1.0), (5.0, 0.1)] {
        for lambda in [1.0, 1.2, 2.0, 5.0, 0.99, 0.9, 0.5, 0.0, -0.5, -2.0] {
            if chi == 0.0 && lambda <= 0.0 {
                continue;
            }
            let p = GigPParams::new(lambda, chi, psi).map_err(|e| e.to_string())?;
            let l: Vec<f64> = (0..=501).map(|y| p.logpmf(y)).collect();
            let mut violation = (1..=500).find(|&y| l[y + 1] - 2.0 * l[y] + l[y - 1] > tol);
            let expected = lambda >= 1.0;
            if violation.is_none() && !expected {
                // near lambda = 1 the first violation sits around chi / (1 - lambda)
                let l: Vec<f64> = (0..=5001).map(|y| p.logpmf(y)).collect();
                violation = (501..=5000).find(|&y| l[y + 1] - 2.0 * l[y] + l[y - 1] > tol);
                if let Some(y) = violation {
                    late.push(format!("({lambda}, {chi}, {psi}) at y = {y}"));
                }
            }
            ensure!(
                violation.is_none() == expected,
                "lambda {lambda}, chi {chi}, psi {psi}: first violation {violation:?}, rule says log-concave = {expected}"
            );
            ensure!(gigp_shape(&p, 500).log_concave == expected, "log_concave flag wrong for lambda {lambda}");
            cases += 1;
        }
    }
    Ok(format!(
        "quadrature {quad:.1e}, mass {mass:.1e}, negative binomial {nb:.1e}, decreasing {}/{} split, {cases} log-concavity cases, violations past 500: {}",
        seen[1],
        seen[0],
        if late.is_empty() { "none".to_string() } else { late.join("; ") }
    ))
}

fn samplers() -> Outcome {
    let n = 100_000;
    let mut worst = 0.0f64;
    let gigs = [(0.5, 1.0, 1.0), (-1.5, 2.0, 0.5), (3.0, 0.3, 4.0), (2.0, 0.0, 1.0), (-2.5, 3.0, 0.0)];
    for (i, &(l, c, p)) in gigs.iter().enumerate() {
        let g = GigParams::new(l, c, p).map_err(|e| e.to_string())?;
        let xs = g.sample_n(&mut rng(900 + i as u64), n);
        let res = ks_test(&xs, |x| g.logpdf(x).unwrap_or(f64::NEG_INFINITY), Support::Positive, &g.peak_hint())
            .map_err(|e| e.to_string())?;
        ensure!(res.statistic < 0.006, "GIG({l}, {c}, {p}): D = {}", res.statistic);
        worst = worst.max(res.statistic);
    }
    let ghs = [
        (0.0, -0.5, 2.0, 1.0, 1.0),
        (1.0, 1.0, 1.5, -0.5, 0.7),
        (0.0, 2.0, 1.5, 0.5, 0.0),
        (-1.0, -2.0, 0.5, 0.2, 2.0),
        (0.0, 3.0, 1.0, 0.6, 0.5),
    ];
    for (i, &(mu, l, a, b, d)) in ghs.iter().enumerate() {
        let gh = GhParams::new(mu, l, a, b, d).map_err(|e| e.to_string())?;
        let ys = gh.sample_n(&mut rng(950 + i as u64), n);
        let hint = PeakHint::at(gh.mode().location, 1.0 + d);
        let res = ks_test(&ys, |y| gh.logpdf(y).unwrap_or(f64::NEG_INFINITY), Support::Line, &hint).map_err(|e| e.to_string())?;
        ensure!(res.statistic < 0.006, "{gh:?}: D = {}", res.statistic);
        worst = worst.max(res.statistic);
    }
    Ok(format!("10 samplers at n = {n}, max D = {worst:.4}"))
}

fn total_positivity() -> Outcome {
    let mut r = rng(10);
    let mut worst = f64::INFINITY;
    let mut grids = vec![(linspace(0.1f64.ln(), 10f64.ln(), 8).into_iter().map(f64::exp).collect::<Vec<_>>(), linspace(0.0, 10.0, 8))];
    for _ in 0..3 {
        let mut xs: Vec<f64> = (0..8).map(|_| r.random_range(0.1..10.0)).collect();
        let mut ys: Vec<f64> = (0..8).map(|_| r.random_range(0.0..10.0)).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        grids.push((xs, ys));
    }
    for beta in [0.5, 1.0, 2.0] {
        let k = |x: f64, y: f64| kernel_k(x, y, beta).unwrap_or(f64::NAN);
        for (xs, ys) in &grids {
            for m in 1..=4 {
                let rep = tp_minors(k, xs, ys, m).map_err(|e| e.to_string())?;
                ensure!(rep.min_minor >= -1e-12, "beta {beta}, m {m}: minor {} at {:?} x {:?}", rep.min_minor, rep.x_indices, rep.y_indices);
                worst = worst.min(rep.min_minor);
            }
        }
    }

    let xs = linspace(0.05, 20.0, 200);
    let ys = linspace(0.0, 10.0, 101);
    let mut equal = 0;
    for trial in 0..100 {
        let changes = r.random_range(0..=3usize);
        let mut cuts: Vec<f64> = (0..changes).map(|_| r.random_range(0.5..15.0)).collect();
        cuts.sort_by(f64::total_cmp);
        let start = if r.random::<bool>() { 1.0 } else { -1.0 };
        let mags: Vec<f64> = (0..=changes).map(|_| r.random_range(0.2..3.0)).collect();
        let hv: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let piece = cuts.iter().filter(|&&c| x > c).count();
                let sign = if piece % 2 == 0 { start } else { -start };
                sign * mags[piece] * (1.0 + 0.5 * (x * 0.7).sin())
            })
            .collect();
        let beta = [0.5, 1.0, 2.0][trial % 3];
        let h = GridFunction::new(xs.clone(), hv).map_err(|e| e.to_string())?;
        let rep = variation_diminish_check(|x, y| kernel_k(x, y, beta).unwrap_or(f64::NAN), &h, &ys).map_err(|e| e.to_string())?;
        ensure!(
            rep.passed,
            "trial {trial}: input {} output {}",
            rep.input.to_string_compact(),
            rep.output.to_string_compact()
        );
        if rep.input.changes == rep.output.changes {
            equal += 1;
        }
    }
    Ok(format!("minors >= {worst:.1e} for m <= 4 on 12 grids; 100 sign patterns, {equal} preserved exactly"))
}

fn strings(args: &[&str]) -> Vec<String> {
    args.iter().map(|s| s.to_string()).collect()
}

/// Checks that every flag and check in `v` names its rule and that the
/// rule is cited.
fn cited(v: &Value, citations: &Value, found: &mut usize) -> Result<(), String> {
    if let Value::Object(map) = v {
        for (k, child) in map {
            if let Value::Object(inner) = child {
                if inner.contains_key("rule") && (inner.contains_key("value") || inner.contains_key("status")) {
                    let rule = inner["rule"].as_str().unwrap_or("");
                    ensure!(!rule.is_empty(), "{k} has no rule");
                    ensure!(citations[k].as_str() == Some(rule), "{k} is not cited as {rule:?}");
                    *found += 1;
                }
            }
            cited(child, citations, found)?;
        }
    }
    Ok(())
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let table = dir.path().join("g.txt");
    std::fs::write(&table, "0.5 0\n1 0.4\n2 0.5\n3 0.2\n5 -1\n").map_err(|e| e.to_string())?;
    let table = table.display().to_string();
    let gh = ["--family", "gh", "--lambda", "1.5", "--alpha", "1", "--beta", "0.3", "--delta", "1"];
    let gig = ["--family", "gig", "--lambda", "0.5", "--chi", "1", "--psi", "2"];
    let gigp = ["--family", "gigp", "--lambda", "0.5", "--chi", "1", "--psi", "1", "--ymax", "300"];
    let mgh = ["--family", "mgh", "--lambda", "2", "--chi", "1", "--psi", "1", "--mu-vec", "0,0", "--beta-vec", "0.5,-0.3"];
    let custom = ["--family", "custom", "--table", &table, "--left-power", "1", "--right-rate", "2", "--beta", "0.4"];
    let mut runs: Vec<Vec<String>> = Vec::new();
    for fam in [&gh[..], &gig[..], &gigp[..], &mgh[..], &custom[..]] {
        for cmd in ["classify", "mode", "certify"] {
            let mut a = strings(&[cmd]);
            a.extend(strings(fam));
            if cmd == "certify" {
                a.extend(strings(&["--seed", "11"]));
            }
            runs.push(a);
        }
        if fam[1] != "custom" {
            let mut a = strings(&["sample", "--seed", "7", "--count", "200"]);
            a.extend(strings(fam));
            runs.push(a);
        }
    }
    runs.push(strings(&["sweep", "--family", "gh", "--sweep", "lambda=-1,3,9", "--alpha", "1", "--beta", "0.3", "--delta", "1"]));
    runs.push(strings(&["sweep", "--family", "gig", "--sweep", "chi=-1,2,4", "--lambda", "1", "--psi", "1", "--output", "csv"]));
    runs.push(strings(&["sweep", "--family", "gigp", "--sweep", "lambda=0,2,5", "--chi", "1", "--psi", "1"]));

    let bin = env!("CARGO_BIN_EXE_nvmix");
    let mut flags = 0;
    for args in &runs {
        let first = run_args(args);
        let second = run_args(args);
        ensure!(first.document == second.document, "output differs between runs of {args:?}");
        ensure!(first.exit_code == 0, "{args:?} exited {}:\n{}", first.exit_code, first.document);
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        ensure!(out.stdout == first.document.as_bytes(), "binary output differs from library output for {args:?}");
        ensure!(out.status.code() == Some(first.exit_code), "binary exit code differs for {args:?}");
        if args.iter().any(|a| a == "csv") || args[0] == "sample" {
            continue;
        }
        let doc: Value = serde_json::from_str(&first.document).map_err(|e| e.to_string())?;
        let citations = &doc["rule_citations"];
        ensure!(citations.as_object().is_some_and(|m| !m.is_empty()), "{args:?}: no rule citations");
        let before = flags;
        if args[0] == "sweep" {
            for col in doc["results"]["table"]["columns"].as_array().into_iter().flatten().skip(1) {
                let col = col.as_str().unwrap_or("");
                if col != "error" {
                    ensure!(citations[col].as_str().is_some_and(|s| !s.is_empty()), "{args:?}: column {col} uncited");
                    flags += 1;
                }
            }
        } else {
            cited(&doc["results"], citations, &mut flags)?;
            cited(&doc["diagnostics"], citations, &mut flags)?;
        }
        ensure!(flags > before, "{args:?}: no classifications found");
    }
    let a = run_args(strings(&["sample", "--seed", "1", "--count", "20", "--family", "gig", "--lambda", "1", "--chi", "1", "--psi", "1"]));
    let b = run_args(strings(&["sample", "--seed", "2", "--count", "20", "--family", "gig", "--lambda", "1", "--chi", "1", "--psi", "1"]));
    ensure!(a.document != b.document, "different seeds gave the same samples");
    Ok(format!("{} commands repeated byte-identically in process and via the binary, {flags} cited classifications", runs.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("bessel core", bessel),
        ("kernel identity", kernel_identity),
        ("gh against mixture quadrature", gh_vs_mixture),
        ("gh shape matrix", gh_shape_matrix),
        ("table mixing genericity", table_genericity),
        ("multivariate", multivariate),
        ("gig-poisson", sichel),
        ("samplers", samplers),
        ("total positivity", total_positivity),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why}) [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
