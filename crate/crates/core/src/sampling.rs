//! Elementary random variates used by the samplers.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use crate::real::Real;

/// Uniform on the open interval `(0, 1)`.
pub(crate) fn open_unit<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return T::lit(u);
        }
    }
}

pub(crate) fn std_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Gamma(shape, 1).
pub(crate) fn std_gamma<T: Real, R: Rng + ?Sized>(shape: T, rng: &mut R) -> T {
    let d = Gamma::new(shape.to_f64_lossy(), 1.0).expect("gamma shape is positive and finite");
    T::lit(d.sample(rng))
}

/// Poisson draw. Rates past what `rand_distr` accepts are far beyond
/// `u64` resolution anyway and use the normal approximation.
pub(crate) fn poisson<T: Real, R: Rng + ?Sized>(mean: T, rng: &mut R) -> u64 {
    let m = mean.to_f64_lossy();
    match Poisson::new(m) {
        Ok(d) => d.sample(rng) as u64,
        Err(_) if m > 0.0 => (m + m.sqrt() * rng.sample::<f64, _>(StandardNormal)).max(0.0) as u64,
        Err(_) => 0,
    }
}
