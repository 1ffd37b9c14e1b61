//! Univariate generalized hyperbolic distribution.
//!
//! Unnormalised density
//! `e^{β(y-μ)} (δ² + (y-μ)²)^{(λ-1/2)/2} K_{λ-1/2}(α √(δ² + (y-μ)²))`,
//! the normal variance-mean mixture with `σ = 1` over
//! `GIG(λ, χ = δ², ψ = α² - β²)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gig::GigParams;
use crate::quad::golden_max;
use crate::real::{c, Real};
use crate::sampling::std_normal;
use crate::specfun::{ln_gamma, ln_k};

pub const RULE_GH_UNIMODAL: &str = "gh: every GH density is unimodal";
pub const RULE_GH_MODE_AT_MU: &str = "gh: mode at mu iff beta = 0 or (delta = 0 and 0 < lambda <= 1)";
pub const RULE_GH_LOG_CONCAVE: &str = "gh: log-concave iff lambda >= 1";
pub const RULE_GH_LOG_CONVEX_HALVES: &str =
    "gh: log-convex on each side of mu iff delta = 0 and 0 < lambda <= 1";
pub const RULE_GH_TAILS: &str = "gh: tails behave like |y|^(lambda-1) exp((beta -/+ alpha) y)";

/// GH parameters `(μ, λ, α, β, δ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhParams<T> {
    mu: T,
    lambda: T,
    alpha: T,
    beta: T,
    delta: T,
}

/// Which closed form the density uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    /// `δ > 0`, `|β| < α`
    General,
    /// `δ = 0` (variance gamma)
    ZeroDelta,
    /// `|β| = α > 0`, `λ < 0`
    BoundarySkew,
    /// `α = β = 0`, `λ < 0` (Student t)
    ZeroAlpha,
}

/// Mode of a GH density; `pole` marks the unbounded variance-gamma case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhMode<T> {
    pub location: T,
    pub pole: bool,
}

/// Tail behaviour `|y-μ|^power · exp(rate · (y-μ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail<T> {
    pub power: T,
    pub rate: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GhShapeReport<T> {
    pub mode: GhMode<T>,
    pub unimodal: bool,
    pub mode_at_mu: bool,
    pub log_concave: bool,
    pub log_convex_halves: bool,
    pub left_tail: Tail<T>,
    pub right_tail: Tail<T>,
    /// `(flag, rule)` pairs naming the rule behind each flag.
    pub rules: Vec<(&'static str, &'static str)>,
}

impl<T: Real> GhParams<T> {
    /// Validates against the allowable-parameter table:
    /// `λ > 0: δ ≥ 0, |β| < α`; `λ = 0: δ > 0, |β| < α`; `λ < 0: δ > 0, |β| ≤ α`.
    pub fn new(mu: T, lambda: T, alpha: T, beta: T, delta: T) -> Result<Self> {
        if ![mu, lambda, alpha, beta, delta].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams("GH parameters must be finite".into()));
        }
        if alpha < T::zero() {
            return Err(Error::InvalidParams(format!("GH needs alpha >= 0, got {alpha}")));
        }
        if lambda > T::zero() {
            if delta < T::zero() || !(beta.abs() < alpha) {
                return Err(Error::InvalidParams(format!(
                    "lambda > 0 requires delta >= 0 and |beta| < alpha (delta={delta}, beta={beta}, alpha={alpha})"
                )));
            }
        } else if lambda == T::zero() {
            if !(delta > T::zero()) || !(beta.abs() < alpha) {
                return Err(Error::InvalidParams(format!(
                    "lambda = 0 requires delta > 0 and |beta| < alpha (delta={delta}, beta={beta}, alpha={alpha})"
                )));
            }
        } else if !(delta > T::zero()) || !(beta.abs() <= alpha) {
            return Err(Error::InvalidParams(format!(
                "lambda < 0 requires delta > 0 and |beta| <= alpha (delta={delta}, beta={beta}, alpha={alpha})"
            )));
        }
        Ok(Self { mu, lambda, alpha, beta, delta })
    }

    /// Normal inverse Gaussian: `λ = -1/2`.
    pub fn nig(mu: T, alpha: T, beta: T, delta: T) -> Result<Self> {
        Self::new(mu, c(-0.5), alpha, beta, delta)
    }

    /// Hyperbolic: `λ = 1`.
    pub fn hyperbolic(mu: T, alpha: T, beta: T, delta: T) -> Result<Self> {
        Self::new(mu, T::one(), alpha, beta, delta)
    }

    /// Variance gamma: `δ = 0`, `λ > 0`.
    pub fn variance_gamma(mu: T, lambda: T, alpha: T, beta: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(Error::InvalidParams(format!("variance gamma needs lambda > 0, got {lambda}")));
        }
        Self::new(mu, lambda, alpha, beta, T::zero())
    }

    /// Symmetric Student t with `nu` degrees of freedom: `λ = -ν/2`,
    /// `α = β = 0`, `δ = √ν`.
    pub fn student_t(mu: T, nu: T) -> Result<Self> {
        if !(nu > T::zero()) {
            return Err(Error::InvalidParams(format!("Student t needs nu > 0, got {nu}")));
        }
        Self::new(mu, -nu * c(0.5), T::zero(), T::zero(), nu.sqrt())
    }

    /// Laplace `(α/2) e^{-α|y-μ|}`: `λ = 1`, `δ = 0`, `β = 0`.
    pub fn laplace(mu: T, alpha: T) -> Result<Self> {
        Self::new(mu, T::one(), alpha, T::zero(), T::zero())
    }

    pub fn mu(&self) -> T {
        self.mu
    }
    pub fn lambda(&self) -> T {
        self.lambda
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn delta(&self) -> T {
        self.delta
    }

    /// `√(α² - β²)`
    pub fn gamma(&self) -> T {
        (self.alpha * self.alpha - self.beta * self.beta).max(T::zero()).sqrt()
    }

    /// The mixing law: `GIG(λ, δ², α² - β²)`.
    pub fn mixing(&self) -> GigParams<T> {
        let g = self.gamma();
        GigParams::new(self.lambda, self.delta * self.delta, g * g)
            .expect("valid GH parameters map to valid GIG parameters")
    }

    fn branch(&self) -> Branch {
        if self.alpha == T::zero() {
            Branch::ZeroAlpha
        } else if self.delta == T::zero() {
            Branch::ZeroDelta
        } else if self.gamma() == T::zero() {
            Branch::BoundarySkew
        } else {
            Branch::General
        }
    }

    fn has_pole(&self) -> bool {
        self.delta == T::zero() && self.lambda <= c(0.5)
    }

    /// Log of the constant that normalises the unnormalised density above.
    ///
    /// For `α = 0` the Bessel factor degenerates; the constant then
    /// normalises the limiting kernel `e^{β(y-μ)} (δ² + (y-μ)²)^{λ-1/2}`.
    pub fn lognorm(&self) -> T {
        let (l, a, d) = (self.lambda, self.alpha, self.delta);
        let half = c::<T>(0.5);
        let ln2 = c::<T>(2.0).ln();
        let ln_2pi = (c::<T>(2.0) * T::PI()).ln();
        match self.branch() {
            Branch::General => {
                let g = self.gamma();
                l * (g / d).ln() - half * ln_2pi - ln_k(l, d * g) + (half - l) * a.ln()
            }
            Branch::ZeroDelta => {
                let g = self.gamma();
                c::<T>(2.0) * l * g.ln() - ln_gamma(l) - (l - T::one()) * ln2 - half * ln_2pi
                    + (half - l) * a.ln()
            }
            Branch::BoundarySkew => {
                -c::<T>(2.0) * l * d.ln() - ln_gamma(-l) + (l + T::one()) * ln2 - half * ln_2pi
                    + (half - l) * a.ln()
            }
            Branch::ZeroAlpha => {
                -c::<T>(2.0) * l * d.ln() - ln_gamma(-l) + (l + T::one()) * ln2 - half * ln_2pi
                    + ln_gamma(half - l)
                    - (l + half) * ln2
            }
        }
    }

    /// Log of the unnormalised density (see [`GhParams::lognorm`]).
    pub fn log_kernel(&self, y: T) -> Result<T> {
        let dy = y - self.mu;
        let q2 = self.delta * self.delta + dy * dy;
        let nu = self.lambda - c(0.5);
        if self.branch() == Branch::ZeroAlpha {
            return Ok(nu * q2.ln());
        }
        if q2 == T::zero() {
            if self.has_pole() {
                return Err(Error::Pole { at: y.to_f64_lossy() });
            }
            // q^ν K_ν(αq) -> 2^{ν-1} Γ(ν) α^{-ν} as q -> 0
            return Ok((nu - T::one()) * c::<T>(2.0).ln() + ln_gamma(nu) - nu * self.alpha.ln());
        }
        let q = q2.sqrt();
        Ok(self.beta * dy + nu * q.ln() + ln_k(nu, self.alpha * q))
    }

    /// Normalised log-density; `Err(Pole)` at `y = μ` when `δ = 0, λ ≤ 1/2`.
    pub fn logpdf(&self, y: T) -> Result<T> {
        if !y.is_finite() {
            return Err(Error::Domain(format!("GH density needs finite y, got {y}")));
        }
        Ok(self.lognorm() + self.log_kernel(y)?)
    }

    /// Tail behaviour on each side of `μ`.
    pub fn tails(&self) -> (Tail<T>, Tail<T>) {
        if self.alpha == T::zero() {
            let power = c::<T>(2.0) * self.lambda - T::one();
            let t = Tail { power, rate: T::zero() };
            return (t, t);
        }
        let power = self.lambda - T::one();
        (
            Tail { power, rate: self.beta + self.alpha },
            Tail { power, rate: self.beta - self.alpha },
        )
    }

    /// `log f(y) - [power ln|y-μ| + rate (y-μ)]`, which tends to a constant
    /// in each tail.
    pub fn tail_logratio(&self, y: T) -> Result<T> {
        let (left, right) = self.tails();
        let dy = y - self.mu;
        let t = if dy >= T::zero() { right } else { left };
        Ok(self.logpdf(y)? - t.power * dy.abs().ln() - t.rate * dy)
    }

    /// The mode. `β = 0` and the pole case return `μ` directly; otherwise
    /// golden-section search on a geometrically grown bracket.
    pub fn mode(&self) -> GhMode<T> {
        if self.has_pole() {
            return GhMode { location: self.mu, pole: true };
        }
        if self.beta == T::zero() {
            return GhMode { location: self.mu, pole: false };
        }
        self.numeric_mode()
    }

    /// Mode by bracketed golden-section search only, with no shortcuts
    /// other than the pole.
    pub fn numeric_mode(&self) -> GhMode<T> {
        if self.has_pole() {
            return GhMode { location: self.mu, pole: true };
        }
        let f = |y: T| self.logpdf(y).unwrap_or(T::neg_infinity());
        let base = c::<T>(10.0) + self.delta;
        let left_den = self.alpha - self.beta;
        let right_den = self.alpha + self.beta;
        let mut wl = if left_den > T::zero() { base / left_den } else { base };
        let mut wr = if right_den > T::zero() { base / right_den } else { base };
        for _ in 0..200 {
            let lo = self.mu - wl;
            let hi = self.mu + wr;
            let mid = c::<T>(0.5) * (lo + hi);
            let fm = f(mid).max(f(self.mu));
            let grow_left = f(lo) >= fm;
            let grow_right = f(hi) >= fm;
            if !grow_left && !grow_right {
                break;
            }
            if grow_left {
                wl = wl * c(2.0);
            }
            if grow_right {
                wr = wr * c(2.0);
            }
        }
        let tol = c::<T>(1e-10) * (T::one() + wl + wr);
        let (location, _) = golden_max(f, self.mu - wl, self.mu + wr, tol);
        GhMode { location, pole: false }
    }

    pub fn shape_classify(&self) -> GhShapeReport<T> {
        let l = self.lambda;
        let zero_delta_small_lambda = self.delta == T::zero() && l > T::zero() && l <= T::one();
        let (left_tail, right_tail) = self.tails();
        GhShapeReport {
            mode: self.mode(),
            unimodal: true,
            mode_at_mu: self.beta == T::zero() || zero_delta_small_lambda,
            log_concave: l >= T::one(),
            log_convex_halves: zero_delta_small_lambda,
            left_tail,
            right_tail,
            rules: vec![
                ("unimodal", RULE_GH_UNIMODAL),
                ("mode_at_mu", RULE_GH_MODE_AT_MU),
                ("log_concave", RULE_GH_LOG_CONCAVE),
                ("log_convex_halves", RULE_GH_LOG_CONVEX_HALVES),
                ("tails", RULE_GH_TAILS),
            ],
        }
    }

    /// One draw of `μ + βX + √X Z`, `X ~ GIG(λ, δ², α² - β²)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let x = self.mixing().sample(rng);
        let z: T = std_normal(rng);
        self.mu + self.beta * x + x.sqrt() * z
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<T> {
        let mixing = self.mixing();
        (0..n)
            .map(|_| {
                let x = mixing.sample(rng);
                let z: T = std_normal(rng);
                self.mu + self.beta * x + x.sqrt() * z
            })
            .collect()
    }

    /// `E[Y] = μ + β E[X]`.
    pub fn mean(&self) -> T {
        self.mu + self.beta * self.mixing().mean()
    }
}

/// Named sub-families of the GH distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhFamily {
    Nig,
    Hyperbolic,
    VarianceGamma,
    StudentT,
    Laplace,
}

impl GhFamily {
    /// Builds the family from named natural parameters; `mu` defaults to 0.
    ///
    /// * `nig`, `hyperbolic`: `alpha`, `beta`, `delta`
    /// * `variance_gamma`: `lambda`, `alpha`, `beta`
    /// * `student_t`: `nu`
    /// * `laplace`: `alpha`
    pub fn build<T: Real>(self, get: impl Fn(&str) -> Option<T>) -> Result<GhParams<T>> {
        let need = |k: &str| get(k).ok_or_else(|| Error::InvalidParams(format!("{self} needs parameter `{k}`")));
        let mu = get("mu").unwrap_or_else(T::zero);
        match self {
            GhFamily::Nig => GhParams::nig(mu, need("alpha")?, need("beta")?, need("delta")?),
            GhFamily::Hyperbolic => GhParams::hyperbolic(mu, need("alpha")?, need("beta")?, need("delta")?),
            GhFamily::VarianceGamma => {
                GhParams::variance_gamma(mu, need("lambda")?, need("alpha")?, need("beta")?)
            }
            GhFamily::StudentT => GhParams::student_t(mu, need("nu")?),
            GhFamily::Laplace => GhParams::laplace(mu, need("alpha")?),
        }
    }
}

impl fmt::Display for GhFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GhFamily::Nig => "nig",
            GhFamily::Hyperbolic => "hyperbolic",
            GhFamily::VarianceGamma => "variance_gamma",
            GhFamily::StudentT => "student_t",
            GhFamily::Laplace => "laplace",
        })
    }
}

impl FromStr for GhFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nig" => Ok(GhFamily::Nig),
            "hyperbolic" => Ok(GhFamily::Hyperbolic),
            "variance_gamma" | "vg" => Ok(GhFamily::VarianceGamma),
            "student_t" | "t" => Ok(GhFamily::StudentT),
            "laplace" => Ok(GhFamily::Laplace),
            other => Err(Error::InvalidParams(format!("unknown GH family `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{log_integrate_line, PeakHint, QuadConfig};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{Continuous, StudentsT};

    fn total_mass(p: &GhParams<f64>) -> f64 {
        let m = p.mode().location;
        let mut hint = PeakHint::at(m, 1.0 + p.delta());
        hint.breakpoints.push(p.mu());
        let r = log_integrate_line(|y| p.logpdf(y).unwrap_or(f64::NEG_INFINITY), &hint, &QuadConfig::default())
            .unwrap_or_else(|e| panic!("{p:?}: {e}"));
        r.log_value.exp()
    }

    #[test]
    fn allowable_parameter_table() {
        assert!(GhParams::new(0.0, 1.0, 1.0, 0.5, 0.0).is_ok());
        assert!(GhParams::new(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(GhParams::new(0.0, 0.0, 1.0, 0.5, 0.0).is_err());
        assert!(GhParams::new(0.0, 0.0, 1.0, 0.5, 1.0).is_ok());
        assert!(GhParams::new(0.0, -1.0, 1.0, 1.0, 1.0).is_ok());
        assert!(GhParams::new(0.0, -1.0, 1.0, 1.0, 0.0).is_err());
        assert!(GhParams::new(0.0, -1.0, 0.0, 0.0, 1.0).is_ok());
        assert!(GhParams::new(0.0, 1.0, -1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn symmetric_when_beta_zero() {
        let p = GhParams::new(1.3, -0.7, 2.0, 0.0, 0.8).unwrap();
        for &t in &[0.1, 1.0, 4.0, 25.0] {
            assert_relative_eq!(p.logpdf(1.3 + t).unwrap(), p.logpdf(1.3 - t).unwrap(), epsilon = 1e-13);
        }
    }

    #[test]
    fn laplace_closed_form() {
        let p = GhParams::laplace(0.0, 1.0).unwrap();
        for &y in &[-3.0, -0.2, 0.0, 0.5, 10.0] {
            assert_relative_eq!(p.logpdf(y).unwrap(), -(2f64.ln()) - f64::abs(y), epsilon = 1e-13);
        }
        for &y in &[0.5, 3.0, 40.0] {
            assert_relative_eq!(p.tail_logratio(y).unwrap(), -(2f64.ln()), epsilon = 1e-12);
        }
    }

    #[test]
    fn laplace_as_delta_vanishes() {
        let p = GhParams::new(0.0, 1.0, 1.5, 0.0, 1e-8).unwrap();
        let lap = GhParams::laplace(0.0, 1.5).unwrap();
        for &y in &[-2.0, 0.3, 4.0] {
            assert_relative_eq!(p.logpdf(y).unwrap(), lap.logpdf(y).unwrap(), epsilon = 1e-7);
        }
    }

    #[test]
    fn nig_closed_form() {
        // f(y) = αδ K_1(α q) / (π q) e^{δγ + β(y-μ)}
        let (a, b, d, mu): (f64, f64, f64, f64) = (2.0, 1.0, 1.0, 0.3);
        let p = GhParams::nig(mu, a, b, d).unwrap();
        let g = (a * a - b * b).sqrt();
        for &y in &[-5.0, -1.0, 0.3, 2.0, 9.0] {
            let q = (d * d + (y - mu) * (y - mu)).sqrt();
            let want = (a * d).ln() + ln_k(1.0, a * q) - (std::f64::consts::PI * q).ln() + d * g + b * (y - mu);
            assert_relative_eq!(p.logpdf(y).unwrap(), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn student_t_matches_textbook() {
        let p = GhParams::student_t(0.0, 4.0).unwrap();
        assert_eq!((p.lambda(), p.alpha(), p.beta(), p.delta()), (-2.0, 0.0, 0.0, 2.0));
        let t = StudentsT::new(0.0, 1.0, 4.0).unwrap();
        for i in 0..=40 {
            let y = -10.0 + 0.5 * i as f64;
            assert_relative_eq!(p.logpdf(y).unwrap(), t.ln_pdf(y), epsilon = 1e-8);
        }
    }

    #[test]
    fn normalisation_by_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let lambda = rng.random_range(-3.0..3.0);
            let alpha = rng.random_range(0.3..4.0);
            let beta = alpha * rng.random_range(-0.9..0.9);
            let delta = rng.random_range(0.1..3.0);
            let p = GhParams::new(rng.random_range(-2.0..2.0), lambda, alpha, beta, delta).unwrap();
            assert_relative_eq!(total_mass(&p), 1.0, epsilon = 1e-7);
        }
        for p in [
            GhParams::variance_gamma(0.0, 1.7, 1.0, 0.4).unwrap(),
            GhParams::variance_gamma(0.0, 0.8, 2.0, -0.5).unwrap(),
            GhParams::new(0.0, -1.5, 1.0, 1.0, 1.0).unwrap(),
            GhParams::student_t(0.0, 3.0).unwrap(),
        ] {
            assert_relative_eq!(total_mass(&p), 1.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn pole_is_flagged() {
        let p = GhParams::variance_gamma(0.5, 0.4, 1.0, 0.2).unwrap();
        assert!(matches!(p.logpdf(0.5), Err(Error::Pole { .. })));
        assert!(p.logpdf(0.5f64 + 1e-9).unwrap().is_finite());
        assert_eq!(p.mode(), GhMode { location: 0.5, pole: true });
        // λ > 1/2 keeps the density finite at μ
        let q = GhParams::variance_gamma(0.0, 0.8, 1.0, 0.3).unwrap();
        let at = q.logpdf(0.0).unwrap();
        assert_relative_eq!(at, q.logpdf(1e-12).unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn mode_examples() {
        let p = GhParams::new(2.0, -0.5, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(p.mode().location, 2.0);
        assert_relative_eq!(p.numeric_mode().location, 2.0, epsilon = 1e-7);
        let vg = GhParams::variance_gamma(0.0f64, 0.8, 1.0, 0.3).unwrap();
        assert!(vg.mode().location.abs() < 1e-7);
        let hyp = GhParams::new(0.0, 1.0, 1.0, 0.5, 1.0).unwrap();
        let m = hyp.mode().location;
        assert!(m > 0.1);
        let h = 1e-5;
        let slope = (hyp.logpdf(h).unwrap() - hyp.logpdf(-h).unwrap()) / (2.0 * h);
        assert_relative_eq!(slope, 0.5, epsilon = 1e-6);
        for eps in [1e-3, 1e-2] {
            let lm = hyp.logpdf(m).unwrap();
            assert!(hyp.logpdf(m + eps * 2.0).unwrap() < lm);
            assert!(hyp.logpdf(m - eps * 2.0).unwrap() < lm);
        }
    }

    #[test]
    fn classification_examples() {
        let r = GhParams::new(0.0, 2.0, 1.0, 0.3, 1.0).unwrap().shape_classify();
        assert!(r.log_concave && !r.log_convex_halves && !r.mode_at_mu);
        let r = GhParams::variance_gamma(0.0, 0.5, 1.0, 0.2).unwrap().shape_classify();
        assert!(r.log_convex_halves && r.mode_at_mu && !r.log_concave);
        let r = GhParams::new(0.0, -0.5, 1.0, 0.0, 1.0).unwrap().shape_classify();
        assert!(!r.log_concave && !r.log_convex_halves && r.mode_at_mu);
        let r = GhParams::laplace(0.0, 1.0).unwrap().shape_classify();
        assert!(r.log_concave && r.log_convex_halves);
        assert!(r.rules.iter().any(|(k, _)| *k == "log_concave"));
    }

    #[test]
    fn tail_ratio_settles() {
        let p = GhParams::new(0.0, -0.5, 1.0, 0.0, 1.0).unwrap();
        // next-order term is -1/(8y)
        let a: f64 = p.tail_logratio(100.0).unwrap();
        let b = p.tail_logratio(200.0).unwrap();
        assert!((a - b).abs() < 1e-3);
        assert_relative_eq!(p.tail_logratio(-200.0).unwrap(), b, epsilon = 1e-12);
    }

    #[test]
    fn families() {
        let h = GhFamily::Hyperbolic.build(|k| match k {
            "alpha" => Some(2.0),
            "beta" => Some(1.0),
            "delta" => Some(1.0),
            _ => None,
        });
        let h = h.unwrap();
        assert_eq!(h.lambda(), 1.0);
        assert!(h.shape_classify().log_concave);
        assert!(GhFamily::Nig.build::<f64>(|_| None).is_err());
        assert_eq!("student_t".parse::<GhFamily>().unwrap(), GhFamily::StudentT);
        assert!("cauchy".parse::<GhFamily>().is_err());
    }

    #[test]
    fn sample_mean_matches_mixing_moment() {
        let p = GhParams::new(0.5, 1.5, 2.0, 0.7, 1.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 100_000;
        let xs = p.sample_n(&mut rng, n);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - p.mean()).abs() < 3.0 * (var / n as f64).sqrt(), "{mean} vs {}", p.mean());
    }
}
