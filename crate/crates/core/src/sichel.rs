//! Poisson mixtures over a mixing density on `(0, ∞)`, and the GIG-Poisson
//! (Sichel) family in closed form.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gig::GigParams;
use crate::mixture::MixingDensity;
use crate::quad::{log_integrate_positive, PeakHint, QuadConfig};
use crate::real::{c, Real};
use crate::sampling::poisson;
use crate::specfun::{ln_gamma, ln_k_ratio};

pub const RULE_GIGP_UNIMODAL: &str = "gigp: every GIG-Poisson pmf is unimodal";
pub const RULE_GIGP_DECREASING: &str = "gigp: decreasing iff f(0) >= f(1)";
pub const RULE_GIGP_LOG_CONCAVE: &str = "gigp: log-concave iff lambda >= 1";
pub const RULE_GIGP_LOG_CONVEX: &str = "gigp: log-convexity not characterised (reported as unknown)";

/// Log-pmf of `Y | X ~ Poisson(X)`, `X ~ g`, at `y`.
pub fn poisson_mixture_logpmf<T: Real>(g: &MixingDensity<T>, y: u64) -> Result<T> {
    poisson_mixture_logpmf_with(g, y, &QuadConfig::default())
}

pub fn poisson_mixture_logpmf_with<T: Real>(g: &MixingDensity<T>, y: u64, cfg: &QuadConfig<T>) -> Result<T> {
    let yt = T::from_u64(y).ok_or_else(|| Error::Domain(format!("count {y} not representable")))?;
    let ln_fact = ln_gamma(yt + T::one());
    let hint = match g.gig_form() {
        Some((l, chi, psi)) => {
            // x^{λ+y-1} e^{-(χ/x + (ψ+2)x)/2}, mass of x times that on ln x
            let x = crate::gig::gig_kernel_mode(l + yt + T::one(), chi, psi + c(2.0));
            let curv = c::<T>(0.5) * (chi / x + (psi + c::<T>(2.0)) * x);
            PeakHint::at(x, x / curv.max(c(1e-6)).sqrt().max(T::one()))
        }
        None => {
            let mut h = g.hint().clone();
            h.breakpoints.push(yt + T::one());
            h
        }
    };
    let r = log_integrate_positive(|x| g.log_density(x) - x + yt * x.ln(), &hint, cfg)?;
    Ok(r.log_value - ln_fact - g.log_mass()?)
}

/// GIG-Poisson parameters: the GIG mixing law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigPParams<T> {
    mixing: GigParams<T>,
}

impl<T: Real> GigPParams<T> {
    pub fn new(lambda: T, chi: T, psi: T) -> Result<Self> {
        Ok(Self { mixing: GigParams::new(lambda, chi, psi)? })
    }

    pub fn from_mixing(mixing: GigParams<T>) -> Self {
        Self { mixing }
    }

    pub fn mixing(&self) -> GigParams<T> {
        self.mixing
    }

    /// `χ = 0`: negative binomial with size `λ` and success probability
    /// `ψ/(ψ+2)`.
    pub fn is_negative_binomial(&self) -> bool {
        self.mixing.chi() == T::zero()
    }

    fn shifted(&self, y: T) -> Result<GigParams<T>> {
        let m = self.mixing;
        GigParams::new(m.lambda() + y, m.chi(), m.psi() + c(2.0))
    }

    /// Closed form: the mixing integral is a GIG normaliser with
    /// `(λ + y, χ, ψ + 2)`.
    pub fn logpmf(&self, y: u64) -> T {
        let yt = T::from_u64(y).unwrap_or(T::infinity());
        let shifted = self.shifted(yt).expect("shifted GIG parameters are valid");
        self.mixing.log_normalizer() - shifted.log_normalizer() - ln_gamma(yt + T::one())
    }

    pub fn pmf(&self, y: u64) -> T {
        self.logpmf(y).exp()
    }

    /// `ln f(y+1) - ln f(y)`, from a Bessel ratio rather than a difference
    /// of log-pmfs.
    pub fn log_ratio(&self, y: u64) -> T {
        let m = self.mixing;
        let yt = T::from_u64(y).unwrap_or(T::infinity());
        let l = m.lambda() + yt;
        let psi2 = m.psi() + c(2.0);
        let tail = -(yt + T::one()).ln();
        if m.chi() == T::zero() {
            // (λ+y) · 2/(ψ+2) / (y+1)
            return l.ln() + (c::<T>(2.0) / psi2).ln() + tail;
        }
        let z = (m.chi() * psi2).sqrt();
        ln_k_ratio(l, z) + c::<T>(0.5) * (m.chi() / psi2).ln() + tail
    }

    /// `E[Y] = E[X]`; infinite when the mixing mean is.
    pub fn mean(&self) -> T {
        self.mixing.mean()
    }

    /// Upper summation limit: the smallest `Y > mean` with
    /// `f(Y) · mean/(Y - mean) < 1e-14`, doubled. `None` without a finite mean.
    pub fn truncation_point(&self) -> Option<u64> {
        let mean = self.mean();
        if !mean.is_finite() {
            return None;
        }
        let start = mean.floor().to_u64()? + 1;
        let mut lf = self.logpmf(start);
        let mut y = start;
        loop {
            let yt = T::from_u64(y)?;
            if lf + (mean / (yt - mean)).ln() < c::<T>(1e-14).ln() {
                return Some(2 * y);
            }
            lf = lf + self.log_ratio(y);
            y += 1;
            if y > 1 << 40 {
                return None;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let x = self.mixing.sample(rng);
        poisson(x, rng)
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<u64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

pub fn gigp_logpmf<T: Real>(p: &GigPParams<T>, y: u64) -> T {
    p.logpmf(y)
}

/// Shape report for a GIG-Poisson pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct GigPShape {
    pub unimodal: bool,
    /// Mode of the pmf (first maximiser).
    pub mode: u64,
    /// Evaluated `f(0) >= f(1)`.
    pub decreasing: bool,
    /// `λ ≥ 1`.
    pub log_concave: bool,
    /// `f(y)² ≥ f(y-1) f(y+1)` for every `1 ≤ y ≤ y_max` (ratio tolerance `1e-12`).
    pub log_concave_on_grid: bool,
    /// First `y` where the discrete log-concavity inequality fails.
    pub log_concave_violation: Option<u64>,
    /// Left unclassified.
    pub log_convex: Option<bool>,
    /// Whether the pmf grid `0..=y_max` is unimodal (no rise after a fall).
    pub unimodal_on_grid: bool,
    pub rules: Vec<(&'static str, &'static str)>,
}

/// Classifies the pmf and verifies the claims on `0..=y_max`.
pub fn gigp_shape<T: Real>(p: &GigPParams<T>, y_max: u64) -> GigPShape {
    let ratios: Vec<T> = (0..y_max.max(1)).map(|y| p.log_ratio(y)).collect();
    let mut fell = false;
    let mut unimodal_on_grid = true;
    let mut mode = 0;
    let mut best = T::zero();
    let mut cum = T::zero();
    for (y, &r) in ratios.iter().enumerate() {
        if r < T::zero() {
            fell = true;
        } else if r > T::zero() && fell {
            unimodal_on_grid = false;
        }
        cum = cum + r;
        if cum > best {
            best = cum;
            mode = y as u64 + 1;
        }
    }
    let tol = c::<T>(1e-12);
    let violation = ratios.windows(2).position(|w| w[1] > w[0] + tol).map(|i| i as u64 + 1);
    GigPShape {
        unimodal: true,
        mode,
        decreasing: p.logpmf(0) >= p.logpmf(1),
        log_concave: p.mixing.lambda() >= T::one(),
        log_concave_on_grid: violation.is_none(),
        log_concave_violation: violation,
        log_convex: None,
        unimodal_on_grid,
        rules: vec![
            ("unimodal", RULE_GIGP_UNIMODAL),
            ("decreasing", RULE_GIGP_DECREASING),
            ("log_concave", RULE_GIGP_LOG_CONCAVE),
            ("log_convex", RULE_GIGP_LOG_CONVEX),
        ],
    }
}
