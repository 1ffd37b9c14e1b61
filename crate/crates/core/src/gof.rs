//! One-sample Kolmogorov–Smirnov tests against densities known only
//! through their log-density, with the CDF built by quadrature.

use crate::error::{Error, Result};
use crate::quad::{integrate_abs, log_integrate_line, log_integrate_positive, PeakHint, QuadConfig};
use crate::real::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// The whole real line.
    Line,
    /// `(0, ∞)`.
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult<T> {
    /// `sup |F_n - F|`.
    pub statistic: T,
    pub n: usize,
    /// Asymptotic Kolmogorov p-value.
    pub p_value: T,
    /// `F(x_(n))` plus the upper tail beyond it; should be 1.
    pub total_mass: T,
}

/// `D = max_i max(i/n - F_i, F_i - (i-1)/n)` for CDF values at the
/// order statistics.
pub fn ks_statistic<T: Real>(cdf_sorted: &[T]) -> T {
    let n = T::from_usize_lossy(cdf_sorted.len());
    cdf_sorted.iter().enumerate().fold(T::zero(), |d, (i, &f)| {
        let i = T::from_usize_lossy(i);
        d.max((i + T::one()) / n - f).max(f - i / n)
    })
}

/// `P(D_n > d)` from the Kolmogorov limit law with the Stephens
/// small-sample correction.
pub fn kolmogorov_p_value<T: Real>(d: T, n: usize) -> T {
    let sn = T::from_usize_lossy(n).sqrt();
    let lam = (sn + c(0.12) + c::<T>(0.11) / sn) * d;
    if lam < c(0.2) {
        return T::one();
    }
    let mut sum = T::zero();
    for k in 1..=100 {
        let kt = T::from_usize_lossy(k);
        let term = (-c::<T>(2.0) * kt * kt * lam * lam).exp();
        sum = if k % 2 == 1 { sum + term } else { sum - term };
        if term < c(1e-16) {
            break;
        }
    }
    (c::<T>(2.0) * sum).max(T::zero()).min(T::one())
}

fn log_mass_beyond<T: Real, F: Fn(T) -> T>(
    logpdf: &F,
    cut: T,
    upper: bool,
    support: Support,
    hint: &PeakHint<T>,
) -> Result<T> {
    let cfg = QuadConfig::default();
    let h = |u: T| {
        let keep = if upper { u >= cut } else { u <= cut };
        if keep {
            logpdf(u)
        } else {
            T::neg_infinity()
        }
    };
    let mut hint = hint.clone();
    hint.breakpoints.push(cut);
    let r = match support {
        Support::Line => log_integrate_line(h, &hint, &cfg),
        Support::Positive => log_integrate_positive(h, &hint, &cfg),
    };
    match r {
        Ok(v) => Ok(v.log_value),
        Err(Error::Quadrature { .. }) | Err(Error::Divergent(_)) => Err(Error::Quadrature {
            achieved: f64::INFINITY,
            requested: cfg.rel_tol.to_f64_lossy(),
        }),
        Err(e) => Err(e),
    }
}

/// CDF at each point of `sorted` (ascending): the lower tail below the
/// first point, then short integrals between consecutive points.
pub fn cdf_at_sorted<T: Real, F: Fn(T) -> T>(
    sorted: &[T],
    logpdf: F,
    support: Support,
    hint: &PeakHint<T>,
) -> Result<Vec<T>> {
    if sorted.is_empty() {
        return Ok(Vec::new());
    }
    if sorted.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("points must be sorted ascending".into()));
    }
    if support == Support::Positive && !(sorted[0] > T::zero()) {
        return Err(Error::Domain("samples on (0, inf) must be positive".into()));
    }
    let pdf = |x: T| {
        let v = logpdf(x).exp();
        if v.is_finite() {
            v
        } else {
            T::zero()
        }
    };
    let mut out = Vec::with_capacity(sorted.len());
    let mut f = log_mass_beyond(&logpdf, sorted[0], false, support, hint)?.exp();
    out.push(f);
    let abs_tol = c::<T>(1e-14);
    for w in sorted.windows(2) {
        if w[1] > w[0] {
            let (v, _) = integrate_abs(pdf, w[0], w[1], abs_tol, 200)?;
            f = f + v;
        }
        out.push(f);
    }
    Ok(out)
}

/// KS test of `samples` against the density `exp(logpdf)`.
pub fn ks_test<T: Real, F: Fn(T) -> T>(
    samples: &[T],
    logpdf: F,
    support: Support,
    hint: &PeakHint<T>,
) -> Result<KsResult<T>> {
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cdf = cdf_at_sorted(&sorted, &logpdf, support, hint)?;
    let upper = log_mass_beyond(&logpdf, sorted[sorted.len() - 1], true, support, hint)?.exp();
    let statistic = ks_statistic(&cdf);
    Ok(KsResult {
        statistic,
        n: sorted.len(),
        p_value: kolmogorov_p_value(statistic, sorted.len()),
        total_mass: cdf[cdf.len() - 1] + upper,
    })
}
