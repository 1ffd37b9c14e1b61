//! Generalized inverse Gaussian distribution
//! `g(x) ∝ x^{λ-1} exp(-(χ/x + ψx)/2)` on `x > 0`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::quad::PeakHint;
use crate::real::{c, Real};
use crate::sampling::{open_unit, std_gamma};
use crate::specfun::{ln_gamma, ln_k, ln_k_ratio};

/// Shape facts about a density on `(0, ∞)` (or a pmf on `0, 1, …`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeClass<T> {
    pub unimodal: bool,
    pub decreasing_on_support: bool,
    pub log_concave: bool,
    pub log_convex: bool,
    pub mode: T,
}

pub const RULE_GIG_UNIMODAL: &str = "gig: every GIG density is unimodal";
pub const RULE_GIG_DECREASING: &str = "gig: decreasing on (0, inf) iff chi = 0 and lambda <= 1";
pub const RULE_GIG_LOG_CONCAVE: &str = "gig: log-concave iff lambda >= 1";
pub const RULE_GIG_LOG_CONVEX: &str = "gig: log-convex iff chi = 0 and lambda <= 1";

/// Flag name and rule for each field of a GIG [`ShapeClass`].
pub const GIG_RULES: [(&str, &str); 4] = [
    ("unimodal", RULE_GIG_UNIMODAL),
    ("decreasing_on_support", RULE_GIG_DECREASING),
    ("log_concave", RULE_GIG_LOG_CONCAVE),
    ("log_convex", RULE_GIG_LOG_CONVEX),
];

/// GIG parameters `(λ, χ, ψ)`.
///
/// Valid combinations: `χ > 0, ψ > 0` with any `λ`; `χ = 0, ψ > 0, λ > 0`
/// (gamma limit); `χ > 0, ψ = 0, λ < 0` (inverse-gamma limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigParams<T> {
    lambda: T,
    chi: T,
    psi: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Full,
    Gamma,
    InverseGamma,
}

impl<T: Real> GigParams<T> {
    pub fn new(lambda: T, chi: T, psi: T) -> Result<Self> {
        if !(lambda.is_finite() && chi.is_finite() && psi.is_finite()) {
            return Err(Error::InvalidParams("GIG parameters must be finite".into()));
        }
        if chi < T::zero() || psi < T::zero() {
            return Err(Error::InvalidParams(format!("GIG needs chi >= 0 and psi >= 0 (chi={chi}, psi={psi})")));
        }
        let ok = (chi > T::zero() && psi > T::zero())
            || (chi == T::zero() && psi > T::zero() && lambda > T::zero())
            || (chi > T::zero() && psi == T::zero() && lambda < T::zero());
        if !ok {
            return Err(Error::InvalidParams(format!(
                "GIG needs chi>0,psi>0; or chi=0,psi>0,lambda>0; or chi>0,psi=0,lambda<0 (got lambda={lambda}, chi={chi}, psi={psi})"
            )));
        }
        Ok(Self { lambda, chi, psi })
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn chi(&self) -> T {
        self.chi
    }

    pub fn psi(&self) -> T {
        self.psi
    }

    fn regime(&self) -> Regime {
        if self.chi == T::zero() {
            Regime::Gamma
        } else if self.psi == T::zero() {
            Regime::InverseGamma
        } else {
            Regime::Full
        }
    }

    /// Log of the normalising constant of `x^{λ-1} exp(-(χ/x + ψx)/2)`.
    pub fn log_normalizer(&self) -> T {
        let (l, chi, psi) = (self.lambda, self.chi, self.psi);
        match self.regime() {
            Regime::Full => {
                c::<T>(0.5) * l * (psi / chi).ln() - c::<T>(2.0).ln() - ln_k(l, (chi * psi).sqrt())
            }
            Regime::Gamma => l * (psi * c(0.5)).ln() - ln_gamma(l),
            Regime::InverseGamma => -l * (chi * c(0.5)).ln() - ln_gamma(-l),
        }
    }

    /// Unnormalised log-density `(λ-1) ln x - (χ/x + ψx)/2`.
    #[inline]
    pub fn log_kernel(&self, x: T) -> T {
        (self.lambda - T::one()) * x.ln() - c::<T>(0.5) * (self.chi / x + self.psi * x)
    }

    /// Normalised log-density.
    pub fn logpdf(&self, x: T) -> Result<T> {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(Error::Domain(format!("GIG density needs finite x > 0, got {x}")));
        }
        Ok(self.log_normalizer() + self.log_kernel(x))
    }

    /// Location of the maximum of the density (0 when decreasing).
    pub fn mode(&self) -> T {
        gig_kernel_mode(self.lambda, self.chi, self.psi)
    }

    pub fn shape_class(&self) -> ShapeClass<T> {
        gig_kernel_shape(self.lambda, self.chi, self.psi)
    }

    /// `E[X]`; infinite in the inverse-gamma regime with `λ ≥ -1`.
    pub fn mean(&self) -> T {
        match self.regime() {
            Regime::Full => {
                let w = (self.chi * self.psi).sqrt();
                (self.chi / self.psi).sqrt() * ln_k_ratio(self.lambda, w).exp()
            }
            Regime::Gamma => c::<T>(2.0) * self.lambda / self.psi,
            Regime::InverseGamma => {
                if self.lambda < -T::one() {
                    self.chi * c(0.5) / (-self.lambda - T::one())
                } else {
                    T::infinity()
                }
            }
        }
    }

    /// Where the mass of `x g(x)` sits on the log scale, for quadrature.
    pub fn peak_hint(&self) -> PeakHint<T> {
        let m = self.mode();
        let x = if m > T::zero() {
            m
        } else {
            // decreasing density: mass of x·g(x) peaks near λ/ψ·2
            (c::<T>(2.0) * self.lambda / self.psi).max(c(1e-300))
        };
        let curvature = c::<T>(0.5) * (self.chi / x + self.psi * x);
        let width_u = T::one() / curvature.max(c(1e-6)).sqrt();
        PeakHint::at(x, x * width_u.min(T::one()))
    }

    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self.regime() {
            Regime::Gamma => std_gamma(self.lambda, rng) * c(2.0) / self.psi,
            Regime::InverseGamma => self.chi * c(0.5) / std_gamma(-self.lambda, rng),
            Regime::Full => {
                let lambda = self.lambda.abs();
                let omega = (self.chi * self.psi).sqrt();
                let alpha = (self.chi / self.psi).sqrt();
                let y = standard_gig(lambda, omega, rng);
                if self.lambda < T::zero() {
                    alpha / y
                } else {
                    alpha * y
                }
            }
        }
    }

    /// `n` independent draws.
    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<T> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// Maximiser of `x^{λ-1} exp(-(χ/x + ψx)/2)` on `[0, ∞)` for any real `λ`
/// with `χ, ψ ≥ 0` not both zero; the kernel need not be integrable.
pub fn gig_kernel_mode<T: Real>(lambda: T, chi: T, psi: T) -> T {
    let lm1 = lambda - T::one();
    if chi == T::zero() {
        return if lm1 > T::zero() { lm1 / psi } else { T::zero() };
    }
    if psi == T::zero() {
        return chi / (c::<T>(2.0) * (T::one() - lambda));
    }
    let root = (lm1 * lm1 + chi * psi).sqrt();
    if lm1 >= T::zero() {
        (lm1 + root) / psi
    } else {
        chi / (root - lm1)
    }
}

/// Shape of the kernel `x^{λ-1} exp(-(χ/x + ψx)/2)` for any real `λ`.
///
/// Log-concave iff `λ ≥ 1`; log-convex and decreasing iff `χ = 0, λ ≤ 1`.
pub fn gig_kernel_shape<T: Real>(lambda: T, chi: T, psi: T) -> ShapeClass<T> {
    let flat_left = chi == T::zero() && lambda <= T::one();
    ShapeClass {
        unimodal: true,
        decreasing_on_support: flat_left,
        log_concave: lambda >= T::one(),
        log_convex: flat_left,
        mode: gig_kernel_mode(lambda, chi, psi),
    }
}

fn gig_mode_standard<T: Real>(lambda: T, omega: T) -> T {
    if lambda >= T::one() {
        ((lambda - T::one()) * (lambda - T::one()) + omega * omega).sqrt() / omega + (lambda - T::one()) / omega
    } else {
        omega / (((T::one() - lambda) * (T::one() - lambda) + omega * omega).sqrt() + (T::one() - lambda))
    }
}

/// Draw from `y^{λ-1} exp(-ω(y + 1/y)/2)`, `λ ≥ 0`, `ω > 0`, using the
/// Hörmann–Leydold selection of rejection methods (uniformly bounded
/// rejection constants over the whole parameter range).
fn standard_gig<T: Real, R: Rng + ?Sized>(lambda: T, omega: T, rng: &mut R) -> T {
    if lambda > c(2.0) || omega > c(3.0) {
        rou_shift(lambda, omega, rng)
    } else if lambda >= T::one() - c::<T>(2.25) * omega * omega || omega > c(0.2) {
        rou_noshift(lambda, omega, rng)
    } else {
        concave_hat(lambda, omega, rng)
    }
}

fn rou_noshift<T: Real, R: Rng + ?Sized>(lambda: T, omega: T, rng: &mut R) -> T {
    let t = c::<T>(0.5) * (lambda - T::one());
    let s = c::<T>(0.25) * omega;
    let xm = gig_mode_standard(lambda, omega);
    let nc = t * xm.ln() - s * (xm + T::one() / xm);
    let lp1 = lambda + T::one();
    let ym = (lp1 + (lp1 * lp1 + omega * omega).sqrt()) / omega;
    let um = (c::<T>(0.5) * lp1 * ym.ln() - s * (ym + T::one() / ym) - nc).exp();
    loop {
        let u = um * open_unit(rng);
        let v: T = open_unit(rng);
        let x = u / v;
        if v.ln() <= t * x.ln() - s * (x + T::one() / x) - nc {
            return x;
        }
    }
}

fn rou_shift<T: Real, R: Rng + ?Sized>(lambda: T, omega: T, rng: &mut R) -> T {
    let t = c::<T>(0.5) * (lambda - T::one());
    let s = c::<T>(0.25) * omega;
    let xm = gig_mode_standard(lambda, omega);
    let nc = t * xm.ln() - s * (xm + T::one() / xm);
    // roots of y^3 + a y^2 + b y + cc = 0 bracket the mode
    let a = -(c::<T>(2.0) * (lambda + T::one()) / omega + xm);
    let b = c::<T>(2.0) * (lambda - T::one()) * xm / omega - T::one();
    let cc = xm;
    let p = b - a * a / c(3.0);
    let q = c::<T>(2.0) * a * a * a / c(27.0) - a * b / c(3.0) + cc;
    let fi = (-q / (c::<T>(2.0) * (-(p * p * p) / c(27.0)).sqrt())).acos();
    let fak = c::<T>(2.0) * (-p / c(3.0)).sqrt();
    let y1 = fak * (fi / c(3.0)).cos() - a / c(3.0);
    let y2 = fak * (fi / c(3.0) + c::<T>(4.0 / 3.0) * T::PI()).cos() - a / c(3.0);
    let uplus = (y1 - xm) * (t * y1.ln() - s * (y1 + T::one() / y1) - nc).exp();
    let uminus = (y2 - xm) * (t * y2.ln() - s * (y2 + T::one() / y2) - nc).exp();
    loop {
        let u = uminus + open_unit::<T, R>(rng) * (uplus - uminus);
        let v: T = open_unit(rng);
        let x = u / v + xm;
        if x > T::zero() && v.ln() <= t * x.ln() - s * (x + T::one() / x) - nc {
            return x;
        }
    }
}

/// Rejection from a three-piece hat (constant, power, exponential) for
/// `0 ≤ λ < 1`, small `ω`, where the density is not T-concave.
fn concave_hat<T: Real, R: Rng + ?Sized>(lambda: T, omega: T, rng: &mut R) -> T {
    let one = T::one();
    let two = c::<T>(2.0);
    let xm = gig_mode_standard(lambda, omega);
    let x0 = omega / (one - lambda);
    let k0 = ((lambda - one) * xm.ln() - c::<T>(0.5) * omega * (xm + one / xm)).exp();
    let a0 = k0 * x0;
    let (k1, a1, k2, a2);
    if x0 >= two / omega {
        k1 = T::zero();
        a1 = T::zero();
        k2 = x0.powf(lambda - one);
        a2 = k2 * two * (-omega * x0 / two).exp() / omega;
    } else {
        k1 = (-omega).exp();
        a1 = if lambda == T::zero() {
            k1 * (two / (omega * omega)).ln()
        } else {
            k1 / lambda * ((two / omega).powf(lambda) - x0.powf(lambda))
        };
        k2 = (two / omega).powf(lambda - one);
        a2 = k2 * two * (-one).exp() / omega;
    }
    let total = a0 + a1 + a2;
    loop {
        let mut v = total * open_unit(rng);
        let (x, hx);
        if v <= a0 {
            x = x0 * v / a0;
            hx = k0;
        } else {
            v = v - a0;
            if v <= a1 {
                if lambda == T::zero() {
                    x = omega * (omega.exp() * v).exp();
                    hx = k1 / x;
                } else {
                    x = (x0.powf(lambda) + lambda / k1 * v).powf(one / lambda);
                    hx = k1 * x.powf(lambda - one);
                }
            } else {
                v = v - a1;
                let a = x0.max(two / omega);
                x = -two / omega * ((-omega / two * a).exp() - omega / (two * k2) * v).ln();
                hx = k2 * (-omega / two * x).exp();
            }
        }
        let u = open_unit::<T, R>(rng) * hx;
        if u.ln() <= (lambda - one) * x.ln() - omega / two * (x + one / x) {
            return x;
        }
    }
}
