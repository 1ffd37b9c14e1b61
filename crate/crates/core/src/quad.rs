//! Adaptive Gauss–Kronrod quadrature, including a log-space driver for
//! positive integrands on the whole line or on `(0, ∞)`.
//!
//! The log-space driver locates the peak of the log-integrand, integrates
//! `exp(h - h_max)` on a core window around it, then grows tail panels
//! geometrically until their contribution falls below `tail_tol` of the
//! running total.

use crate::error::{Error, Result};
use crate::real::{c, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig<T> {
    /// Target relative error of the integral.
    pub rel_tol: T,
    /// Absolute error that is always acceptable (finite-interval driver only).
    pub abs_tol: T,
    /// A tail panel is negligible once it adds less than this fraction.
    pub tail_tol: T,
    /// Upper bound on the number of subintervals.
    pub max_segments: usize,
    /// Integration variable is never pushed beyond `±max_abs_u`.
    pub max_abs_u: T,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::quad_rel_tol(),
            abs_tol: T::zero(),
            tail_tol: c::<T>(1e-14).max(T::epsilon()),
            max_segments: 4000,
            max_abs_u: c(740.0),
        }
    }
}

/// Location information that helps the peak search find narrow integrands.
#[derive(Debug, Clone, Default)]
pub struct PeakHint<T> {
    /// Approximate location of the peak.
    pub center: Option<T>,
    /// Approximate width of the peak.
    pub width: Option<T>,
    /// Points where the integrand has kinks; used as panel boundaries.
    pub breakpoints: Vec<T>,
}

impl<T: Real> PeakHint<T> {
    pub fn none() -> Self {
        Self { center: None, width: None, breakpoints: Vec::new() }
    }

    pub fn at(center: T, width: T) -> Self {
        Self { center: Some(center), width: Some(width), breakpoints: Vec::new() }
    }

    /// Maps a hint given on `x > 0` to the `u = ln x` scale.
    pub fn to_log_scale(&self) -> Self {
        let center = self.center.filter(|x| *x > T::zero()).map(|x| x.ln());
        let width = match (self.center, self.width) {
            (Some(x), Some(w)) if x > T::zero() => Some((w / x).min(c(1.0))),
            _ => None,
        };
        let breakpoints =
            self.breakpoints.iter().filter(|x| **x > T::zero()).map(|x| x.ln()).collect();
        Self { center, width, breakpoints }
    }
}

/// `ln ∫ exp(h)` together with the estimated relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogIntegral<T> {
    pub log_value: T,
    pub rel_error: T,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Segment<T> {
    let center = c::<T>(0.5) * (a + b);
    let half = c::<T>(0.5) * (b - a);
    let fc = f(center);
    let mut res_k = fc * c(WGK[7]);
    let mut res_g = fc * c(WG[3]);
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half * c(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + c::<T>(WGK[j]) * (f1 + f2);
        if j % 2 == 1 {
            res_g = res_g + c::<T>(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * c(0.5);
    let mut res_asc = c::<T>(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + c::<T>(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != T::zero() && error != T::zero() {
        let scaled = (c::<T>(200.0) * error / res_asc).powf(c(1.5));
        error = res_asc * scaled.min(T::one());
    }
    let roundoff = c::<T>(50.0) * T::epsilon() * value.abs();
    if roundoff > error {
        error = roundoff;
    }
    Segment { a, b, value, error }
}

struct Adaptive<T> {
    segments: Vec<Segment<T>>,
}

impl<T: Real> Adaptive<T> {
    fn new() -> Self {
        Self { segments: Vec::new() }
    }

    fn add_panel<F: Fn(T) -> T>(&mut self, f: &F, a: T, b: T) {
        if b > a {
            self.segments.push(gk15(f, a, b));
        }
    }

    fn total(&self) -> (T, T) {
        let value = self.segments.iter().map(|s| s.value).sum::<T>();
        let error = self.segments.iter().map(|s| s.error).sum::<T>();
        (value, error)
    }

    /// Bisects the worst segment until the error budget is met.
    fn refine<F: Fn(T) -> T>(&mut self, f: &F, rel_tol: T, abs_floor: T, max_segments: usize) -> bool {
        loop {
            let (value, error) = self.total();
            if error <= (rel_tol * value.abs()).max(abs_floor) {
                return true;
            }
            if self.segments.len() >= max_segments {
                return false;
            }
            let (idx, worst) = self
                .segments
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(i, s)| (i, *s))
                .expect("nonempty");
            let mid = c::<T>(0.5) * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // interval exhausted at machine resolution
                self.segments[idx].error = T::zero();
                continue;
            }
            self.segments[idx] = gk15(f, worst.a, mid);
            self.segments.push(gk15(f, mid, worst.b));
        }
    }
}

/// Adaptive GK15 integral of `f` over the finite interval `[a, b]`.
///
/// Returns `(value, estimated_absolute_error)`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<(T, T)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite".into()));
    }
    let (lo, hi, sign) = if a <= b { (a, b, T::one()) } else { (b, a, -T::one()) };
    let mut work = Adaptive::new();
    let pieces = 16;
    for i in 0..pieces {
        let a = lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(pieces);
        let b = if i + 1 == pieces { hi } else { lo + (hi - lo) * T::from_usize_lossy(i + 1) / T::from_usize_lossy(pieces) };
        work.add_panel(&f, a, b);
    }
    let ok = work.refine(&f, cfg.rel_tol, cfg.abs_tol.max(T::min_positive_value()), cfg.max_segments);
    let (value, error) = work.total();
    if !ok {
        return Err(Error::Quadrature {
            achieved: (error / value.abs()).to_f64_lossy(),
            requested: cfg.rel_tol.to_f64_lossy(),
        });
    }
    Ok((sign * value, error))
}

/// Adaptive GK15 on `[a, b]` starting from a single panel and stopping
/// once the estimated absolute error is below `abs_tol`. Cheap for the
/// many short, smooth intervals of a cumulative sum.
pub fn integrate_abs<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, abs_tol: T, max_segments: usize) -> Result<(T, T)> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::Domain("integration limits must be finite and ordered".into()));
    }
    let mut work = Adaptive::new();
    work.add_panel(&f, a, b);
    let ok = work.refine(&f, T::zero(), abs_tol, max_segments);
    let (value, error) = work.total();
    if !ok {
        return Err(Error::Quadrature { achieved: error.to_f64_lossy(), requested: abs_tol.to_f64_lossy() });
    }
    Ok((value, error))
}

fn finite_or_neg_inf<T: Real>(v: T) -> T {
    if v.is_nan() {
        T::neg_infinity()
    } else {
        v
    }
}

/// Golden-section maximiser of a unimodal function on `[a, b]`.
pub fn golden_max<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let inv_phi = c::<T>(0.618_033_988_749_894_9);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `ln ∫_{-∞}^{∞} exp(h(u)) du` for a log-integrand `h`.
///
/// Algebraic tails that survive past `±max_abs_u` are integrated on `ln|u|`.
pub fn log_integrate_line<T: Real, H: Fn(T) -> T>(
    h: H,
    hint: &PeakHint<T>,
    cfg: &QuadConfig<T>,
) -> Result<LogIntegral<T>> {
    line_impl(h, hint, cfg, true)
}

fn line_impl<T: Real, H: Fn(T) -> T>(
    h: H,
    hint: &PeakHint<T>,
    cfg: &QuadConfig<T>,
    power_tails: bool,
) -> Result<LogIntegral<T>> {
    let h = |u: T| finite_or_neg_inf(h(u));
    let limit = cfg.max_abs_u;

    // coarse peak search
    let mut best_u = T::zero();
    let mut best_h = T::neg_infinity();
    let mut consider = |u: T, v: T| {
        if v > best_h {
            best_h = v;
            best_u = u;
        }
    };
    let coarse_half = c::<T>(60.0).min(limit);
    let coarse_step = c::<T>(0.5);
    let n_coarse = (c::<T>(2.0) * coarse_half / coarse_step).to_usize().unwrap_or(0);
    for i in 0..=n_coarse {
        let u = -coarse_half + coarse_step * T::from_usize_lossy(i);
        consider(u, h(u));
    }
    let mut fine_step = coarse_step;
    if let Some(center) = hint.center {
        let w = hint.width.unwrap_or(c(0.1)).max(c(1e-12));
        fine_step = fine_step.min(w * c(0.5));
        for k in -24i32..=24 {
            let u = center + w * c::<T>(0.5 * k as f64);
            consider(u, h(u));
        }
    }
    for &bp in &hint.breakpoints {
        consider(bp, h(bp));
    }
    if best_h == T::infinity() {
        return Err(Error::Divergent(format!("integrand is infinite near u = {best_u}")));
    }
    // walk outward while the maximum sits on the edge of the coarse scan
    if best_h.is_finite() && (best_u.abs() >= coarse_half - coarse_step) {
        let dir = best_u.signum();
        let mut u = best_u;
        let mut step = c::<T>(1.0);
        loop {
            let next = u + dir * step;
            if next.abs() > limit {
                return Err(Error::Divergent(format!(
                    "log-integrand still increasing at u = {u} (limit {limit})"
                )));
            }
            let v = h(next);
            if v >= best_h {
                best_h = v;
                best_u = next;
                u = next;
                step = step * c(2.0);
            } else {
                break;
            }
        }
    }
    if best_h == T::neg_infinity() {
        return Ok(LogIntegral { log_value: T::neg_infinity(), rel_error: T::zero() });
    }

    // local refinement of the peak
    let span = fine_step.max(c(1e-12)) * c(2.0);
    let (pu, ph) = golden_max(h, best_u - span, best_u + span, span * c(1e-6));
    if ph > best_h {
        best_u = pu;
        best_h = ph;
    }
    let peak = best_u;
    let peak_h = best_h;

    // width on each side: distance at which h falls by 2
    let min_width = hint.width.map(|w| w * c(0.25)).unwrap_or(c(1e-4)).max(c(1e-12));
    let side_width = |dir: T| -> T {
        let mut s = min_width;
        while s < c(64.0) {
            let u = peak + dir * s;
            if u.abs() > limit || h(u) < peak_h - c(2.0) {
                break;
            }
            s = s * c(2.0);
        }
        s
    };
    let wl = side_width(-T::one());
    let wr = side_width(T::one());
    let mut lo = (peak - c::<T>(8.0) * wl).max(-limit);
    let mut hi = (peak + c::<T>(8.0) * wr).min(limit);

    let g = |u: T| (h(u) - peak_h).exp();
    let mut work = Adaptive::new();
    let mut cuts: Vec<T> = Vec::new();
    let panels_per_side = 8;
    for i in 0..=panels_per_side {
        let t = T::from_usize_lossy(i) / T::from_usize_lossy(panels_per_side);
        cuts.push(lo + (peak - lo) * t);
        cuts.push(peak + (hi - peak) * t);
    }
    cuts.extend(hint.breakpoints.iter().copied().filter(|b| *b > lo && *b < hi));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    for w in cuts.windows(2) {
        work.add_panel(&g, w[0], w[1]);
    }
    let abs_floor = T::min_positive_value();
    let mut ok = work.refine(&g, cfg.rel_tol, abs_floor, cfg.max_segments);

    // tails
    for dir in [-T::one(), T::one()] {
        let mut length = (hi - lo) * c(0.5);
        loop {
            let (edge, at_limit) = if dir < T::zero() { (lo, lo <= -limit) } else { (hi, hi >= limit) };
            let edge_h = h(edge);
            if at_limit {
                if edge_h - peak_h > cfg.tail_tol.ln() + c(10.0) && power_tails {
                    let ok_tail = power_tail(&h, dir, limit, peak_h, &mut work, cfg)?;
                    ok &= ok_tail;
                    break;
                }
                if edge_h - peak_h > cfg.tail_tol.ln() + c(10.0) {
                    return Err(Error::Divergent(format!(
                        "integrand has not decayed at u = {edge} (log ratio {})",
                        edge_h - peak_h
                    )));
                }
                break;
            }
            let outer = if dir < T::zero() { (edge - length).max(-limit) } else { (edge + length).min(limit) };
            let (a, b) = if dir < T::zero() { (outer, edge) } else { (edge, outer) };
            let mut panel = Adaptive::new();
            panel.add_panel(&g, a, b);
            let (running, _) = work.total();
            ok &= panel.refine(&g, cfg.rel_tol, cfg.rel_tol * running.abs(), cfg.max_segments / 4);
            let (contrib, _) = panel.total();
            work.segments.extend(panel.segments);
            if dir < T::zero() {
                lo = outer;
            } else {
                hi = outer;
            }
            let (running, _) = work.total();
            let outer_h = h(outer);
            if contrib <= cfg.tail_tol * running && outer_h - peak_h < c(-30.0) {
                break;
            }
            length = length * c(2.0);
        }
    }

    let (value, error) = work.total();
    if value <= T::zero() || !value.is_finite() {
        return Err(Error::Quadrature { achieved: f64::INFINITY, requested: cfg.rel_tol.to_f64_lossy() });
    }
    let rel_error = error / value;
    if !ok && rel_error > cfg.rel_tol {
        return Err(Error::Quadrature {
            achieved: rel_error.to_f64_lossy(),
            requested: cfg.rel_tol.to_f64_lossy(),
        });
    }
    Ok(LogIntegral { log_value: peak_h + value.ln(), rel_error })
}

// Tail beyond |u| = limit on t = ln|u|.
fn power_tail<T: Real, H: Fn(T) -> T>(
    h: &H,
    dir: T,
    limit: T,
    peak_h: T,
    work: &mut Adaptive<T>,
    cfg: &QuadConfig<T>,
) -> Result<bool> {
    let g = |t: T| (h(dir * t.exp()) + t - peak_h).exp();
    let t_max = c::<T>(0.95) * T::max_value().ln();
    let mut t0 = limit.ln();
    let mut length = T::one();
    let mut ok = true;
    loop {
        if t0 >= t_max {
            return Err(Error::Divergent(format!(
                "integrand has not decayed at u = {}",
                dir * t0.exp()
            )));
        }
        let t1 = (t0 + length).min(t_max);
        let mut panel = Adaptive::new();
        panel.add_panel(&g, t0, t1);
        let (running, _) = work.total();
        ok &= panel.refine(&g, cfg.rel_tol, cfg.rel_tol * running.abs(), cfg.max_segments / 4);
        let (contrib, _) = panel.total();
        work.segments.extend(panel.segments);
        let (running, _) = work.total();
        let outer = h(dir * t1.exp()) + t1 - peak_h;
        if contrib <= cfg.tail_tol * running && outer < c(-30.0) {
            return Ok(ok);
        }
        t0 = t1;
        length = length * c(2.0);
    }
}

/// `ln ∫_0^∞ exp(log_f(x)) dx`, integrated on `u = ln x`.
///
/// `hint` is expressed on the `x` scale.
pub fn log_integrate_positive<T: Real, F: Fn(T) -> T>(
    log_f: F,
    hint: &PeakHint<T>,
    cfg: &QuadConfig<T>,
) -> Result<LogIntegral<T>> {
    let h = |u: T| log_f(u.exp()) + u;
    line_impl(h, &hint.to_log_scale(), cfg, false)
}
