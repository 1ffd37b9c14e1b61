//! Tabulated mixing densities: `ln g` given at nodes, linear in `x`
//! between them, with a power tail `x^a` below the first node and an
//! exponential tail `e^{-r x}` beyond the last.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::gig::ShapeClass;
use crate::mixture::MixingDensity;
use crate::quad::PeakHint;
use crate::real::{c, Real};
use crate::sampling::open_unit;

#[derive(Debug, Clone, PartialEq)]
pub struct TableDensity<T> {
    xs: Vec<T>,
    logs: Vec<T>,
    left_power: T,
    right_rate: T,
    /// `ln` of the mass of each piece: left tail, segments, right tail.
    piece_log_mass: Vec<T>,
    log_mass: T,
}

fn log_sum_exp<T: Real>(v: &[T]) -> T {
    let m = v.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() {
        return m;
    }
    m + v.iter().map(|&x| (x - m).exp()).sum::<T>().ln()
}

/// `ln ∫_0^w e^{l0 + (l1 - l0) t / w} dt`
fn log_segment_mass<T: Real>(w: T, l0: T, l1: T) -> T {
    let d = (l1 - l0).abs();
    let top = l0.max(l1);
    if d < c(1e-10) {
        return w.ln() + top - c::<T>(0.5) * d;
    }
    w.ln() + top + (-(-d).exp_m1() / d).ln()
}

impl<T: Real> TableDensity<T> {
    /// `left_power > -1` and `right_rate > 0` keep the tails integrable.
    pub fn new(xs: Vec<T>, logs: Vec<T>, left_power: T, right_rate: T) -> Result<Self> {
        if xs.len() < 2 || xs.len() != logs.len() {
            return Err(Error::InvalidParams(format!(
                "table needs at least two rows with one log value each (got {} x, {} log g)",
                xs.len(),
                logs.len()
            )));
        }
        if !(xs[0] > T::zero()) {
            return Err(Error::InvalidParams(format!("table abscissae must be positive, first is {}", xs[0])));
        }
        if let Some(i) = xs.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParams(format!("table x values must be strictly increasing (row {})", i + 2)));
        }
        if let Some(i) = xs.iter().chain(&logs).position(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("table entry {} is not finite", i % xs.len() + 1)));
        }
        if !(left_power > -T::one()) || !left_power.is_finite() {
            return Err(Error::InvalidParams(format!("left tail power must exceed -1, got {left_power}")));
        }
        if !(right_rate > T::zero()) || !right_rate.is_finite() {
            return Err(Error::InvalidParams(format!("right tail rate must be positive, got {right_rate}")));
        }
        let n = xs.len();
        let mut pieces = Vec::with_capacity(n + 1);
        pieces.push(logs[0] + xs[0].ln() - (left_power + T::one()).ln());
        for i in 0..n - 1 {
            pieces.push(log_segment_mass(xs[i + 1] - xs[i], logs[i], logs[i + 1]));
        }
        pieces.push(logs[n - 1] - right_rate.ln());
        let log_mass = log_sum_exp(&pieces);
        Ok(Self { xs, logs, left_power, right_rate, piece_log_mass: pieces, log_mass })
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn log_values(&self) -> &[T] {
        &self.logs
    }

    pub fn left_power(&self) -> T {
        self.left_power
    }

    pub fn right_rate(&self) -> T {
        self.right_rate
    }

    /// `ln ∫ g` of the tabulated (unnormalised) values.
    pub fn log_mass(&self) -> T {
        self.log_mass
    }

    /// Unnormalised `ln g(x)`.
    pub fn log_density(&self, x: T) -> T {
        let n = self.xs.len();
        if !(x > T::zero()) {
            return T::neg_infinity();
        }
        if x <= self.xs[0] {
            return self.logs[0] + self.left_power * (x / self.xs[0]).ln();
        }
        if x >= self.xs[n - 1] {
            return self.logs[n - 1] - self.right_rate * (x - self.xs[n - 1]);
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.logs[i] + (self.logs[i + 1] - self.logs[i]) * t
    }

    pub fn logpdf(&self, x: T) -> T {
        self.log_density(x) - self.log_mass
    }

    fn slopes(&self) -> Vec<T> {
        self.xs.windows(2).zip(self.logs.windows(2)).map(|(x, l)| (l[1] - l[0]) / (x[1] - x[0])).collect()
    }

    /// Exact shape of the piecewise density.
    pub fn shape(&self) -> ShapeClass<T> {
        let a = self.left_power;
        let r = self.right_rate;
        let s = self.slopes();
        let left_slope = a / self.xs[0];
        let first = s[0];
        let last = s[s.len() - 1];
        // ascent-then-descent over the sequence of slopes, tails included
        let mut signs = vec![a];
        signs.extend(s.iter().copied());
        signs.push(-r);
        let mut fell = false;
        let mut unimodal = true;
        for v in signs {
            if v < T::zero() {
                fell = true;
            } else if v > T::zero() && fell {
                unimodal = false;
            }
        }
        let decreasing = a <= T::zero() && s.iter().all(|&v| v <= T::zero());
        let log_concave = a >= T::zero()
            && left_slope >= first
            && s.windows(2).all(|w| w[1] <= w[0])
            && -r <= last;
        let log_convex = a <= T::zero()
            && left_slope <= first
            && s.windows(2).all(|w| w[1] >= w[0])
            && -r >= last;
        let mode = if decreasing {
            T::zero()
        } else {
            let (i, _) = self
                .logs
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |best, (i, &l)| if l > best.1 { (i, l) } else { best });
            self.xs[i]
        };
        ShapeClass { unimodal, decreasing_on_support: decreasing, log_concave, log_convex, mode }
    }

    /// One exact draw by choosing a piece and inverting within it.
    pub fn sample(&self, rng: &mut dyn RngCore) -> T {
        let n = self.xs.len();
        let u: T = open_unit(rng);
        let mut acc = T::zero();
        let mut piece = self.piece_log_mass.len() - 1;
        for (k, &lm) in self.piece_log_mass.iter().enumerate() {
            acc = acc + (lm - self.log_mass).exp();
            if u <= acc {
                piece = k;
                break;
            }
        }
        let v: T = open_unit(rng);
        if piece == 0 {
            return self.xs[0] * v.powf(T::one() / (self.left_power + T::one()));
        }
        if piece == n {
            return self.xs[n - 1] - v.ln() / self.right_rate;
        }
        let i = piece - 1;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let w = x1 - x0;
        let d = self.logs[i + 1] - self.logs[i];
        if d.abs() < c(1e-12) {
            return x0 + v * w;
        }
        let s = d / w;
        let x = if d < T::zero() {
            x0 + (v * d.exp_m1()).ln_1p() / s
        } else {
            x1 + (v + (T::one() - v) * (-d).exp()).ln() / s
        };
        x.max(x0).min(x1)
    }

    /// Wraps the table as a normalised mixing density with an exact sampler.
    pub fn into_mixing(self) -> MixingDensity<T> {
        let shape = self.shape();
        let centre = self
            .xs
            .iter()
            .zip(&self.logs)
            .fold((self.xs[0], T::neg_infinity()), |best, (&x, &l)| {
                let v = l + x.ln();
                if v > best.1 {
                    (x, v)
                } else {
                    best
                }
            })
            .0;
        let hint = PeakHint { center: Some(centre), width: None, breakpoints: self.xs.clone() };
        let sampler = self.clone();
        MixingDensity::new(move |x: T| self.logpdf(x), true)
            .with_sampler(move |rng: &mut dyn RngCore| sampler.sample(rng))
            .with_declared_shape(shape)
            .with_hint(hint)
    }
}

/// Reads `x  log_g` rows: whitespace separated, `#` starts a comment,
/// blank lines ignored. Errors name the offending line.
pub fn parse_table<T: Real>(text: &str) -> Result<(Vec<T>, Vec<T>)> {
    let mut xs = Vec::new();
    let mut logs = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Domain(format!("line {}: expected 2 columns (x log_g), found {}", k + 1, fields.len())));
        }
        let mut parsed = [T::zero(); 2];
        for (slot, (name, f)) in parsed.iter_mut().zip(["x", "log_g"].iter().zip(&fields)) {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::Domain(format!("line {}: field {name}: cannot parse {f:?} as a number", k + 1)))?;
            *slot = T::lit(v);
        }
        if let Some(&prev) = xs.last() {
            if !(parsed[0] > prev) {
                return Err(Error::Domain(format!("line {}: x = {} is not greater than previous x = {prev}", k + 1, parsed[0])));
            }
        }
        xs.push(parsed[0]);
        logs.push(parsed[1]);
    }
    Ok((xs, logs))
}
