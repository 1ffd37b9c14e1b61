//! Normal variance-mean mixtures `Y = μ + βX + σ√X Z` over an arbitrary
//! mixing density on `(0, ∞)`, and the multivariate version
//! `Y = μ + βX + √X A Z`.
//!
//! Densities are obtained by adaptive quadrature over `u = ln x`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::gig::{gig_kernel_mode, gig_kernel_shape, GigParams, ShapeClass};
use crate::linalg::SquareMatrix;
use crate::quad::{golden_max, log_integrate_positive, PeakHint, QuadConfig};
use crate::real::{c, Real};
use crate::sampling::std_normal;
use crate::shapecheck::{certify_unimodal, GridFunction};

pub type LogDensityFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
pub type SamplerFn<T> = Arc<dyn Fn(&mut dyn RngCore) -> T + Send + Sync>;

/// Largest condition number accepted for the scale matrix `A`.
pub const MAX_CONDITION: f64 = 1e12;

/// A density `g` on `(0, ∞)`, held through its logarithm.
///
/// Unnormalised inputs are fine: the mass is found by one quadrature the
/// first time a normalised quantity is needed, then cached.
#[derive(Clone)]
pub struct MixingDensity<T: Real> {
    log_density: LogDensityFn<T>,
    normalized: bool,
    sampler: Option<SamplerFn<T>>,
    declared_shape: Option<ShapeClass<T>>,
    hint: PeakHint<T>,
    /// `(λ, χ, ψ)` when `g ∝ x^{λ-1} exp(-(χ/x + ψx)/2)`.
    gig_form: Option<(T, T, T)>,
    log_mass: Arc<OnceLock<T>>,
}

impl<T: Real> fmt::Debug for MixingDensity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MixingDensity")
            .field("normalized", &self.normalized)
            .field("has_sampler", &self.sampler.is_some())
            .field("declared_shape", &self.declared_shape)
            .field("hint", &self.hint)
            .field("gig_form", &self.gig_form)
            .finish()
    }
}

impl<T: Real> MixingDensity<T> {
    pub fn new(log_density: impl Fn(T) -> T + Send + Sync + 'static, normalized: bool) -> Self {
        Self {
            log_density: Arc::new(log_density),
            normalized,
            sampler: None,
            declared_shape: None,
            hint: PeakHint::none(),
            gig_form: None,
            log_mass: Arc::new(OnceLock::new()),
        }
    }

    pub fn with_sampler(mut self, sampler: impl Fn(&mut dyn RngCore) -> T + Send + Sync + 'static) -> Self {
        self.sampler = Some(Arc::new(sampler));
        self
    }

    pub fn with_declared_shape(mut self, shape: ShapeClass<T>) -> Self {
        self.declared_shape = Some(shape);
        self
    }

    /// Location hint on the `x` scale for the quadrature peak search.
    pub fn with_hint(mut self, hint: PeakHint<T>) -> Self {
        self.hint = hint;
        self
    }

    /// The normalised GIG density, with its sampler and shape.
    pub fn gig(p: GigParams<T>) -> Self {
        let ln_c = p.log_normalizer();
        Self::new(move |x: T| if x > T::zero() { ln_c + p.log_kernel(x) } else { T::neg_infinity() }, true)
            .with_sampler(move |rng: &mut dyn RngCore| p.sample(rng))
            .with_declared_shape(p.shape_class())
            .with_hint(p.peak_hint())
            .with_gig_form(p.lambda(), p.chi(), p.psi())
    }

    /// The unnormalised kernel `x^{λ-1} exp(-(χ/x + ψx)/2)` for any real
    /// `λ` and `χ, ψ ≥ 0`; it need not be integrable.
    pub fn gig_kernel(lambda: T, chi: T, psi: T) -> Self {
        let lm1 = lambda - T::one();
        let half = c::<T>(0.5);
        Self::new(
            move |x: T| {
                if x > T::zero() {
                    lm1 * x.ln() - half * (chi / x + psi * x)
                } else {
                    T::neg_infinity()
                }
            },
            false,
        )
        .with_declared_shape(gig_kernel_shape(lambda, chi, psi))
        .with_hint(gig_like_hint(lambda, chi, psi))
        .with_gig_form(lambda, chi, psi)
    }

    fn with_gig_form(mut self, lambda: T, chi: T, psi: T) -> Self {
        self.gig_form = Some((lambda, chi, psi));
        self
    }

    /// `ln g(x)` as supplied (unnormalised if `normalized` is false);
    /// `-∞` off the support.
    #[inline]
    pub fn log_density(&self, x: T) -> T {
        if x > T::zero() {
            (self.log_density)(x)
        } else {
            T::neg_infinity()
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn declared_shape(&self) -> Option<&ShapeClass<T>> {
        self.declared_shape.as_ref()
    }

    pub fn hint(&self) -> &PeakHint<T> {
        &self.hint
    }

    /// `(λ, χ, ψ)` when the density is a GIG kernel.
    pub fn gig_form(&self) -> Option<(T, T, T)> {
        self.gig_form
    }

    pub fn has_sampler(&self) -> bool {
        self.sampler.is_some()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<T> {
        let s = self.sampler.as_ref().ok_or(Error::MissingSampler)?;
        Ok(s(rng))
    }

    /// `ln ∫ g`; zero for normalised densities.
    pub fn log_mass(&self) -> Result<T> {
        if self.normalized {
            return Ok(T::zero());
        }
        if let Some(&m) = self.log_mass.get() {
            return Ok(m);
        }
        let m = match self.gig_form {
            Some((l, chi, psi)) if GigParams::new(l, chi, psi).is_ok() => {
                -GigParams::new(l, chi, psi)?.log_normalizer()
            }
            _ => log_integrate_positive(|x| self.log_density(x), &self.hint, &QuadConfig::default())?.log_value,
        };
        let _ = self.log_mass.set(m);
        Ok(m)
    }

    /// Normalised `ln g(x)`.
    pub fn logpdf(&self, x: T) -> Result<T> {
        Ok(self.log_density(x) - self.log_mass()?)
    }

    /// `E[X]` and `E[X²]` by quadrature.
    pub fn moments(&self) -> Result<(T, T)> {
        let cfg = QuadConfig::default();
        let m0 = self.log_mass()?;
        let m1 = log_integrate_positive(|x| self.log_density(x) + x.ln(), &self.hint, &cfg)?.log_value;
        let m2 = log_integrate_positive(|x| self.log_density(x) + c::<T>(2.0) * x.ln(), &self.hint, &cfg)?.log_value;
        Ok(((m1 - m0).exp(), (m2 - m0).exp()))
    }
}

/// Peak hint on the `x` scale for `∫ x^{λ-1} exp(-(χ/x + ψx)/2) dx`
/// integrated on `ln x`.
fn gig_like_hint<T: Real>(lambda: T, chi: T, psi: T) -> PeakHint<T> {
    if chi <= T::zero() && psi <= T::zero() {
        return PeakHint::none();
    }
    // mass of x·kernel on the log scale
    let x = gig_kernel_mode(lambda + T::one(), chi, psi);
    if !(x > T::zero()) || !x.is_finite() {
        return PeakHint::none();
    }
    let curvature = c::<T>(0.5) * (chi / x + psi * x);
    let width_u = T::one() / curvature.max(c(1e-6)).sqrt();
    PeakHint::at(x, x * width_u.min(T::one()))
}

fn check_positive_x<T: Real>(x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("kernel needs finite x > 0, got {x}")))
    }
}

/// `ln k(x, y) = -ln(2πx)/2 - (y - βx)²/(2x)`.
pub fn log_kernel_k<T: Real>(x: T, y: T, beta: T) -> Result<T> {
    check_positive_x(x)?;
    let r = y - beta * x;
    Ok(-c::<T>(0.5) * (c::<T>(2.0) * T::PI() * x).ln() - r * r / (c::<T>(2.0) * x))
}

/// `k(x, y) = (2πx)^{-1/2} exp(-(y - βx)²/(2x))`.
pub fn kernel_k<T: Real>(x: T, y: T, beta: T) -> Result<T> {
    Ok(log_kernel_k(x, y, beta)?.exp())
}

/// `∫₀^∞ k(x, y) dx`, which equals `1/β` for `β > 0, y ≥ 0`. With `β = 0`
/// the drift vanishes and the integral diverges.
pub fn kernel_integral<T: Real>(y: T, beta: T) -> Result<T> {
    if beta == T::zero() {
        return Err(Error::Divergent("kernel integral over x needs beta != 0".into()));
    }
    let (l, chi, psi) = (c::<T>(0.5), y * y, beta * beta);
    let hint = gig_like_hint(l, chi, psi);
    let r = log_integrate_positive(
        |x| log_kernel_k(x, y, beta).unwrap_or(T::neg_infinity()),
        &hint,
        &QuadConfig::default(),
    )?;
    Ok(r.log_value.exp())
}

fn validate_scalar<T: Real>(name: &str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}

/// Hint for the mixing integral at a point with squared scaled distance
/// `dist2` and squared scaled drift `drift2`; `p` is the dimension.
fn mixing_integral_hint<T: Real>(g: &MixingDensity<T>, dist2: T, drift2: T, p: usize) -> PeakHint<T> {
    let half_p = c::<T>(0.5) * T::from_usize_lossy(p);
    if let Some((l, chi, psi)) = g.gig_form {
        let h = gig_like_hint(l - half_p, chi + dist2, psi + drift2);
        if h.center.is_some() {
            return h;
        }
    }
    let mut hint = g.hint.clone();
    if dist2 > T::zero() || drift2 > T::zero() {
        let k = gig_like_hint(T::one() - half_p, dist2, drift2);
        if let Some(x) = k.center {
            hint.breakpoints.push(x);
        }
    }
    hint
}

/// Log-density of `μ + βX + σ√X Z` at `y`, `X ~ g`.
pub fn nvmm_logpdf<T: Real>(g: &MixingDensity<T>, mu: T, beta: T, sigma: T, y: T) -> Result<T> {
    nvmm_logpdf_with(g, mu, beta, sigma, y, &QuadConfig::default())
}

pub fn nvmm_logpdf_with<T: Real>(
    g: &MixingDensity<T>,
    mu: T,
    beta: T,
    sigma: T,
    y: T,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    validate_scalar("mu", mu)?;
    validate_scalar("beta", beta)?;
    validate_scalar("y", y)?;
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
    }
    let d = (y - mu) / sigma;
    let b = beta / sigma;
    let half = c::<T>(0.5);
    let ln_2pi = (c::<T>(2.0) * T::PI()).ln();
    let hint = mixing_integral_hint(g, d * d, b * b, 1);
    let integrand = |x: T| {
        let r = d - b * x;
        let quad = if b == T::zero() { d * d / (c::<T>(2.0) * x) } else { r * r / (c::<T>(2.0) * x) };
        g.log_density(x) - half * (ln_2pi + x.ln()) - quad
    };
    let r = log_integrate_positive(integrand, &hint, cfg)?;
    Ok(r.log_value - sigma.ln() - g.log_mass()?)
}

/// Log-density on every point of `ys`.
pub fn nvmm_log_grid<T: Real>(g: &MixingDensity<T>, mu: T, beta: T, sigma: T, ys: &[T]) -> Result<Vec<T>> {
    ys.iter().map(|&y| nvmm_logpdf(g, mu, beta, sigma, y)).collect()
}

/// `n` draws of `μ + βX + σ√X Z`.
pub fn nvmm_sample<T: Real, R: Rng>(
    g: &MixingDensity<T>,
    mu: T,
    beta: T,
    sigma: T,
    rng: &mut R,
    n: usize,
) -> Result<Vec<T>> {
    if !g.has_sampler() {
        return Err(Error::MissingSampler);
    }
    (0..n)
        .map(|_| {
            let x = g.sample(rng)?;
            let z: T = std_normal(rng);
            Ok(mu + beta * x + sigma * x.sqrt() * z)
        })
        .collect()
}

/// Mean and standard deviation of the mixture, from the moments of `g`.
pub fn nvmm_mean_sd<T: Real>(g: &MixingDensity<T>, mu: T, beta: T, sigma: T) -> Result<(T, T)> {
    let (m1, m2) = g.moments()?;
    let var_x = (m2 - m1 * m1).max(T::zero());
    Ok((mu + beta * m1, (sigma * sigma * m1 + beta * beta * var_x).sqrt()))
}

/// Mode of the univariate mixture by grid scan and golden section.
///
/// With `β = 0` every component is centred at `μ`, so the mode is `μ`.
pub fn nvmm_mode<T: Real>(g: &MixingDensity<T>, mu: T, beta: T, sigma: T) -> Result<T> {
    if beta == T::zero() {
        return Ok(mu);
    }
    let xc = g.hint.center.unwrap_or(T::one());
    let spread = sigma * xc.sqrt();
    let drift = beta * xc;
    let lo = mu + drift.min(T::zero()) * c(4.0) - spread * c(10.0);
    let hi = mu + drift.max(T::zero()) * c(4.0) + spread * c(10.0);
    let n = 201;
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    let f = |y: T| nvmm_logpdf(g, mu, beta, sigma, y).unwrap_or(T::neg_infinity());
    let mut best = (0, T::neg_infinity());
    for i in 0..n {
        let v = f(lo + step * T::from_usize_lossy(i));
        if v > best.1 {
            best = (i, v);
        }
    }
    if best.1 == T::neg_infinity() {
        return Err(Error::Domain("mixture density vanished on the search window".into()));
    }
    let a = lo + step * T::from_usize_lossy(best.0.saturating_sub(1));
    let b = lo + step * T::from_usize_lossy((best.0 + 1).min(n - 1));
    let (y, _) = golden_max(f, a, b, step * c(1e-9));
    Ok(y)
}

/// `g*(x) = x^{-(p-1)/2} g(x)`, unnormalised.
///
/// GIG kernels stay GIG kernels with `λ' = λ - (p-1)/2`. For other
/// densities only the facts that survive multiplication by a decreasing
/// power are kept in the declared shape.
pub fn transform_gstar<T: Real>(g: &MixingDensity<T>, p: usize) -> Result<MixingDensity<T>> {
    if p == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if p == 1 {
        return Ok(g.clone());
    }
    let shift = c::<T>(0.5) * T::from_usize_lossy(p - 1);
    if let Some((l, chi, psi)) = g.gig_form {
        return Ok(MixingDensity::gig_kernel(l - shift, chi, psi));
    }
    let inner = g.log_density.clone();
    let mut out = MixingDensity::new(
        move |x: T| if x > T::zero() { inner(x) - shift * x.ln() } else { T::neg_infinity() },
        false,
    )
    .with_hint(g.hint.clone());
    if let Some(s) = g.declared_shape.filter(|s| s.decreasing_on_support) {
        out = out.with_declared_shape(ShapeClass {
            unimodal: true,
            decreasing_on_support: true,
            log_concave: false,
            log_convex: s.log_convex,
            mode: T::zero(),
        });
    }
    Ok(out)
}

/// `Y = μ + βX + √X A Z` in dimension `p`.
#[derive(Debug, Clone)]
pub struct MvMixtureSpec<T: Real> {
    mu: Vec<T>,
    beta: Vec<T>,
    a: SquareMatrix<T>,
    mixing: MixingDensity<T>,
    a_inv: SquareMatrix<T>,
    log_abs_det: T,
    /// `A⁻¹β`
    b: Vec<T>,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

impl<T: Real> MvMixtureSpec<T> {
    pub fn new(mu: Vec<T>, beta: Vec<T>, a: SquareMatrix<T>, mixing: MixingDensity<T>) -> Result<Self> {
        let p = a.dim();
        if p == 0 || mu.len() != p || beta.len() != p {
            return Err(Error::InvalidParams(format!(
                "dimension mismatch: mu has {}, beta has {}, A is {p}x{p}",
                mu.len(),
                beta.len()
            )));
        }
        if mu.iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("mu and beta must be finite".into()));
        }
        let cond = a.condition_number();
        if !(cond <= c(MAX_CONDITION)) {
            return Err(Error::IllConditioned { condition: cond.to_f64_lossy() });
        }
        let a_inv = a.inverse().ok_or(Error::IllConditioned { condition: f64::INFINITY })?;
        let b = a_inv.mul_vec(&beta);
        let log_abs_det = a.log_abs_determinant();
        Ok(Self { mu, beta, a, mixing, a_inv, log_abs_det, b })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    pub fn a(&self) -> &SquareMatrix<T> {
        &self.a
    }

    pub fn mixing(&self) -> &MixingDensity<T> {
        &self.mixing
    }

    /// `w = A⁻¹(y - μ)`
    pub fn standardize(&self, y: &[T]) -> Vec<T> {
        let d: Vec<T> = y.iter().zip(&self.mu).map(|(&a, &b)| a - b).collect();
        self.a_inv.mul_vec(&d)
    }

    /// `ln ∫ (2πx)^{-p/2} g(x) exp(-‖w‖²/(2x) + w·b - ‖b‖²x/2) dx`
    /// (without the Jacobian or the mass of `g`), from `‖w‖²` and `w·b`.
    fn log_integral(&self, w2: T, wb: T, extra_power: T) -> Result<T> {
        let p = self.dim();
        let half_p = c::<T>(0.5) * T::from_usize_lossy(p);
        let b2 = dot(&self.b, &self.b);
        let ln_2pi = (c::<T>(2.0) * T::PI()).ln();
        let g = &self.mixing;
        let hint = mixing_integral_hint(g, w2, b2, p);
        let integrand = |x: T| {
            g.log_density(x) - half_p * (ln_2pi + x.ln()) - w2 / (c::<T>(2.0) * x) + wb
                - c::<T>(0.5) * b2 * x
                + extra_power * x.ln()
        };
        Ok(log_integrate_positive(integrand, &hint, &QuadConfig::default())?.log_value)
    }

    fn log_integral_along_line(&self, t: T, extra_power: T) -> Result<T> {
        let b2 = dot(&self.b, &self.b);
        self.log_integral(t * t * b2, t * b2, extra_power)
    }
}

/// Log-density of the multivariate mixture at `y`.
pub fn mvnvmm_logpdf<T: Real>(spec: &MvMixtureSpec<T>, y: &[T]) -> Result<T> {
    if y.len() != spec.dim() {
        return Err(Error::Domain(format!("point has dimension {}, expected {}", y.len(), spec.dim())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("point must be finite".into()));
    }
    let w = spec.standardize(y);
    let v = spec.log_integral(dot(&w, &w), dot(&w, &spec.b), T::zero())?;
    Ok(v - spec.log_abs_det - spec.mixing.log_mass()?)
}

/// Grid size used to verify unimodality of `g*` when nothing is declared.
const GSTAR_GRID: usize = 401;

fn gstar_unimodality<T: Real>(gstar: &MixingDensity<T>) -> Result<bool> {
    // returns whether g* is decreasing; errors when it is not unimodal
    if let Some(s) = gstar.declared_shape {
        if !s.unimodal {
            return Err(Error::Shape("g* is declared non-unimodal".into()));
        }
        return Ok(s.decreasing_on_support);
    }
    let centre = gstar.hint.center.unwrap_or(T::one()).ln();
    let us: Vec<T> = (0..GSTAR_GRID)
        .map(|i| centre + c::<T>(-25.0) + c::<T>(50.0) * T::from_usize_lossy(i) / T::from_usize_lossy(GSTAR_GRID - 1))
        .collect();
    let mut breaks: Vec<T> = gstar.hint.breakpoints.iter().filter(|x| **x > T::zero()).map(|x| x.ln()).collect();
    let mut all = us;
    all.append(&mut breaks);
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup();
    let values: Vec<T> = all.iter().map(|&u| gstar.log_density(u.exp())).collect();
    let finite_max = values.iter().copied().fold(T::neg_infinity(), T::max);
    let grid = GridFunction::new(all, values.clone())?;
    let cert = certify_unimodal(&grid);
    if !cert.passed {
        let at = cert.witness.and_then(|w| w.dip_x).map(|u| u.exp());
        return Err(Error::Shape(format!(
            "g*(x) = x^(-(p-1)/2) g(x) is not unimodal on the check grid (dip near x = {})",
            at.map(|x| x.to_string()).unwrap_or_else(|| "?".into())
        )));
    }
    Ok(values[0] == finite_max)
}

/// Mode of the multivariate mixture. It lies on the line `μ + βt`; `t`
/// solves `t E_t[1/X] = 1`, where `E_t` is the posterior mean given the
/// point `μ + βt`.
///
/// Needs `g*(x) = x^{-(p-1)/2} g(x)` unimodal; a decreasing `g*` puts the
/// mode at `μ`.
pub fn mv_mode<T: Real>(spec: &MvMixtureSpec<T>) -> Result<Vec<T>> {
    if spec.beta.iter().all(|&b| b == T::zero()) {
        return Ok(spec.mu.clone());
    }
    let gstar = transform_gstar(&spec.mixing, spec.dim())?;
    if gstar_unimodality(&gstar)? {
        return Ok(spec.mu.clone());
    }
    // ln t + ln E_t[1/X], negative below the root
    let score = |t: T| -> Result<T> {
        let l0 = spec.log_integral_along_line(t, T::zero())?;
        let l1 = spec.log_integral_along_line(t, -T::one())?;
        Ok(t.ln() + l1 - l0)
    };
    let mut lo = T::zero();
    let mut hi = spec.mixing.hint.center.unwrap_or(T::one()).max(c(1e-8));
    let mut grown = 0;
    while score(hi)? < T::zero() {
        lo = hi;
        hi = hi * c(2.0);
        grown += 1;
        if grown > 200 {
            return Err(Error::Domain("mode search along the drift line did not bracket".into()));
        }
    }
    for _ in 0..200 {
        let mid = c::<T>(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if score(mid)? < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * c::<T>(4.0) * hi {
            break;
        }
    }
    let t = c::<T>(0.5) * (lo + hi);
    Ok(spec.mu.iter().zip(&spec.beta).map(|(&m, &b)| m + b * t).collect())
}

/// Hessian of `(y - βx)²/(2x)` in `(x, y)`.
pub fn quadratic_term_hessian<T: Real>(x: T, y: T, _beta: T) -> [[T; 2]; 2] {
    let x2 = x * x;
    [[y * y / (x2 * x), -y / x2], [-y / x2, T::one() / x]]
}

/// Grid point where `ln u(x, y)` failed to be concave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianWitness<T> {
    pub x: T,
    pub y: T,
    pub max_eigenvalue: T,
}

fn second_derivative<T: Real>(f: impl Fn(T) -> T, x: T) -> T {
    let h = x * c(1e-3);
    let f0 = f(x);
    let (p1, m1, p2, m2) = (f(x + h), f(x - h), f(x + h * c(2.0)), f(x - h * c(2.0)));
    (-p2 + c::<T>(16.0) * p1 - c::<T>(30.0) * f0 + c::<T>(16.0) * m1 - m2) / (c::<T>(12.0) * h * h)
}

/// Negative semidefiniteness of the Hessian of
/// `ln u(x, y) = ln g(x) - ln(x)/2 - (y - βx)²/(2x)` over `xs × ys`.
///
/// The quadratic part is differentiated exactly; `ln g(x) - ln(x)/2` by a
/// five-point stencil with step `10⁻³x`.
pub fn joint_logconcavity_check<T: Real>(
    g: &MixingDensity<T>,
    beta: T,
    xs: &[T],
    ys: &[T],
) -> (bool, Option<HessianWitness<T>>) {
    let half = c::<T>(0.5);
    let lg = |x: T| g.log_density(x) - half * x.ln();
    for &x in xs.iter().filter(|x| **x > T::zero()) {
        let d2 = second_derivative(lg, x);
        let noise_scale = lg(x).abs() / (x * x);
        for &y in ys {
            let q = quadratic_term_hessian(x, y, beta);
            let (a, b, d) = (d2 - q[0][0], -q[0][1], -q[1][1]);
            let mid = half * (a + d);
            let rad = (half * (a - d)).hypot(b);
            let top = mid + rad;
            let scale = a.abs().max(b.abs()).max(d.abs()).max(noise_scale);
            if !(top <= c::<T>(1e-8) * scale) {
                return (false, Some(HessianWitness { x, y, max_eigenvalue: top }));
            }
        }
    }
    (true, None)
}

pub const RULE_MIX_UNIMODAL: &str = "mixture: a unimodal mixing density gives a unimodal mixture";
pub const RULE_MIX_MODE_AT_MU: &str = "mixture: if g decreases on (0, inf) or beta = 0, the only mode is mu";
pub const RULE_MIX_LOG_CONCAVE: &str = "mixture: a log-concave mixing density gives a log-concave mixture";
pub const RULE_MIX_LOG_CONVEX_HALVES: &str =
    "mixture: a log-convex mixing density gives a mixture log-convex on each side of mu";
pub const RULE_MV_SINGLE_MAX: &str =
    "mv mixture: if g* = x^(-(p-1)/2) g is unimodal, the only local maximum lies on mu + beta t";
pub const RULE_MV_MODE_AT_MU: &str = "mv mixture: if g* decreases on (0, inf) or beta = 0, the only local maximum is mu";
pub const RULE_MV_LOG_CONCAVE: &str = "mv mixture: a log-concave g* gives a log-concave density";
pub const RULE_MV_LOG_CONVEX_RAYS: &str =
    "mv mixture: a log-convex g* makes f(mu + b t) log-convex in t > 0 for every b != 0";
pub const RULE_MGH_CONVEX_CONTOURS: &str = "mgh: every MGH density has convex contours";
pub const RULE_MGH_MODE_AT_MU: &str = "mgh: mode at mu iff beta = 0 or (chi = 0 and 0 < lambda <= (p+1)/2)";
pub const RULE_MGH_LOG_CONCAVE: &str = "mgh: log-concave iff lambda >= (p+1)/2";
pub const RULE_MGH_LOG_CONVEX_RAYS: &str =
    "mgh: f(mu + b t) log-convex in t > 0 for all b != 0 iff chi = 0 and 0 < lambda <= (p+1)/2";

/// What the shape of `g` guarantees for the univariate mixture.
///
/// The implications run one way only, so a flag is `Some(true)` when its
/// premise holds and `None` (no claim) otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureShape {
    pub unimodal: Option<bool>,
    pub mode_at_mu: Option<bool>,
    pub log_concave: Option<bool>,
    pub log_convex_halves: Option<bool>,
    pub rules: Vec<(&'static str, &'static str)>,
}

fn claim(premise: bool) -> Option<bool> {
    premise.then_some(true)
}

/// Shape guarantees for `μ + βX + σ√X Z` from the declared shape of `g`.
pub fn mixture_shape<T: Real>(g: Option<&ShapeClass<T>>, beta: T) -> MixtureShape {
    let has = |f: fn(&ShapeClass<T>) -> bool| g.map(f).unwrap_or(false);
    MixtureShape {
        unimodal: claim(has(|s| s.unimodal)),
        mode_at_mu: claim(beta == T::zero() || has(|s| s.decreasing_on_support)),
        log_concave: claim(has(|s| s.log_concave)),
        log_convex_halves: claim(has(|s| s.log_convex)),
        rules: vec![
            ("unimodal", RULE_MIX_UNIMODAL),
            ("mode_at_mu", RULE_MIX_MODE_AT_MU),
            ("log_concave", RULE_MIX_LOG_CONCAVE),
            ("log_convex_halves", RULE_MIX_LOG_CONVEX_HALVES),
        ],
    }
}

/// Shape guarantees for the multivariate mixture from the declared shape
/// of `g* = x^{-(p-1)/2} g`; one-way, like [`MixtureShape`].
#[derive(Debug, Clone, PartialEq)]
pub struct MvMixtureShape {
    pub single_local_max: Option<bool>,
    pub mode_at_mu: Option<bool>,
    pub log_concave: Option<bool>,
    pub log_convex_rays: Option<bool>,
    pub rules: Vec<(&'static str, &'static str)>,
}

pub fn mv_mixture_shape<T: Real>(gstar: Option<&ShapeClass<T>>, beta: &[T]) -> MvMixtureShape {
    let has = |f: fn(&ShapeClass<T>) -> bool| gstar.map(f).unwrap_or(false);
    MvMixtureShape {
        single_local_max: claim(has(|s| s.unimodal)),
        mode_at_mu: claim(beta.iter().all(|&b| b == T::zero()) || has(|s| s.decreasing_on_support)),
        log_concave: claim(has(|s| s.log_concave)),
        log_convex_rays: claim(has(|s| s.log_convex)),
        rules: vec![
            ("single_local_max", RULE_MV_SINGLE_MAX),
            ("mode_at_mu", RULE_MV_MODE_AT_MU),
            ("log_concave", RULE_MV_LOG_CONCAVE),
            ("log_convex_rays", RULE_MV_LOG_CONVEX_RAYS),
        ],
    }
}

/// Exact shape classification of the MGH density (GIG mixing) in
/// dimension `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MghShape {
    pub convex_contours: bool,
    pub mode_at_mu: bool,
    pub log_concave: bool,
    pub log_convex_rays: bool,
    pub rules: Vec<(&'static str, &'static str)>,
}

pub fn mgh_shape<T: Real>(mixing: &GigParams<T>, beta: &[T]) -> MghShape {
    let p = beta.len();
    let bound = c::<T>(0.5) * T::from_usize_lossy(p + 1);
    let l = mixing.lambda();
    let flat = mixing.chi() == T::zero() && l > T::zero() && l <= bound;
    MghShape {
        convex_contours: true,
        mode_at_mu: beta.iter().all(|&b| b == T::zero()) || flat,
        log_concave: l >= bound,
        log_convex_rays: flat,
        rules: vec![
            ("convex_contours", RULE_MGH_CONVEX_CONTOURS),
            ("mode_at_mu", RULE_MGH_MODE_AT_MU),
            ("log_concave", RULE_MGH_LOG_CONCAVE),
            ("log_convex_rays", RULE_MGH_LOG_CONVEX_RAYS),
        ],
    }
}

/// `n` draws of `μ + βX + √X A Z`.
pub fn mvnvmm_sample<T: Real, R: Rng>(spec: &MvMixtureSpec<T>, rng: &mut R, n: usize) -> Result<Vec<Vec<T>>> {
    if !spec.mixing.has_sampler() {
        return Err(Error::MissingSampler);
    }
    let p = spec.dim();
    (0..n)
        .map(|_| {
            let x = spec.mixing.sample(rng)?;
            let z: Vec<T> = (0..p).map(|_| std_normal(rng)).collect();
            let az = spec.a.mul_vec(&z);
            let s = x.sqrt();
            Ok((0..p).map(|i| spec.mu[i] + spec.beta[i] * x + s * az[i]).collect())
        })
        .collect()
}
