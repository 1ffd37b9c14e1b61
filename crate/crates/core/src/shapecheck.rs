//! Grid certificates for shape properties: sign changes, property S,
//! unimodality, log-concavity, total positivity and variation diminishing.
//!
//! Everything here is a finite-grid surrogate for statements about
//! functions on intervals. A pass says the sampled values behave; it is
//! not a proof about the continuum.

use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::real::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Signs of a sequence after discarding (near-)zero terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    pub changes: usize,
    /// Signs with consecutive repeats collapsed.
    pub pattern: Vec<Sign>,
    pub zeros_discarded: usize,
}

impl SignPattern {
    pub fn to_string_compact(&self) -> String {
        self.pattern.iter().map(|s| s.symbol()).collect()
    }
}

/// `1e-12 · max|v|`.
pub fn default_zero_tolerance<T: Real>(values: &[T]) -> T {
    let m = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    m * c(1e-12)
}

/// Count sign changes, treating `|v| <= zero_tolerance` as zero.
pub fn sign_changes<T: Real>(values: &[T], zero_tolerance: T) -> SignPattern {
    let mut pattern = Vec::new();
    let mut zeros = 0;
    for &v in values {
        if v.is_nan() || v.abs() <= zero_tolerance {
            zeros += 1;
            continue;
        }
        let s = if v > T::zero() { Sign::Plus } else { Sign::Minus };
        if pattern.last() != Some(&s) {
            pattern.push(s);
        }
    }
    SignPattern { changes: pattern.len().saturating_sub(1), pattern, zeros_discarded: zeros }
}

fn pattern_has_s(p: &SignPattern) -> bool {
    match p.changes {
        0 | 1 => true,
        2 => p.pattern == [Sign::Minus, Sign::Plus, Sign::Minus],
        _ => false,
    }
}

/// At most two sign changes, and `-, +, -` when there are exactly two.
pub fn has_property_s<T: Real>(values: &[T], zero_tolerance: T) -> bool {
    pattern_has_s(&sign_changes(values, zero_tolerance))
}

/// Values sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    abscissae: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(abscissae: Vec<T>, values: Vec<T>) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::Domain(format!(
                "grid has {} abscissae but {} values",
                abscissae.len(),
                values.len()
            )));
        }
        if let Some(i) = abscissae.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::Domain(format!("abscissae not strictly increasing at index {}", i + 1)));
        }
        Ok(Self { abscissae, values })
    }

    pub fn from_fn(abscissae: Vec<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = abscissae.iter().map(|&x| f(x)).collect();
        Self::new(abscissae, values)
    }

    pub fn abscissae(&self) -> &[T] {
        &self.abscissae
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    (0..n).map(|i| if i == n - 1 { hi } else { lo + step * T::from_usize_lossy(i) }).collect()
}

/// Where a grid function fails to be unimodal.
#[derive(Debug, Clone, PartialEq)]
pub struct UnimodalWitness<T> {
    /// A level `c` for which `f - c` has the pattern `+, -, +`.
    pub level: Option<T>,
    /// Index of an interior dip: values fall into it and rise out of it.
    pub dip_index: Option<usize>,
    pub dip_x: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnimodalCertificate<T> {
    pub passed: bool,
    /// Verdict of the level sweep (property S of `f - c` for every level tried).
    pub level_route: bool,
    /// Verdict of the first-difference route.
    pub direct_route: bool,
    pub witness: Option<UnimodalWitness<T>>,
}

impl<T> UnimodalCertificate<T> {
    pub fn routes_agree(&self) -> bool {
        self.level_route == self.direct_route
    }
}

fn first_dip<T: Real>(values: &[T]) -> Option<usize> {
    // index of the lowest point between the last descent and the next ascent
    let mut falling_seen = false;
    let mut dip = 0;
    for i in 1..values.len() {
        let d = values[i] - values[i - 1];
        if d < T::zero() {
            falling_seen = true;
            dip = i;
        } else if d > T::zero() && falling_seen {
            return Some(dip);
        }
    }
    None
}

fn level_sweep<T: Real>(values: &[T]) -> Option<T> {
    let finite: Vec<T> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return None;
    }
    let mut sorted = finite.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    let mut levels: Vec<T> = (0..64).map(|k| lo + (hi - lo) * c::<T>((k as f64 + 0.5) / 64.0)).collect();
    levels.extend(sorted.windows(2).map(|w| w[0] + (w[1] - w[0]) * c(0.5)));
    let mut shifted = vec![T::zero(); values.len()];
    for level in levels {
        for (s, &v) in shifted.iter_mut().zip(values) {
            *s = v - level;
        }
        if !has_property_s(&shifted, T::zero()) {
            return Some(level);
        }
    }
    None
}

/// Grid unimodality by two independent routes: property S of `f - c`
/// over a sweep of levels, and the sign sequence of first differences.
///
/// Comparisons are exact; equal neighbours are plateaus, not dips. The
/// level sweep includes every midpoint between adjacent distinct values,
/// so the two routes agree on every finite sequence.
pub fn certify_unimodal<T: Real>(f: &GridFunction<T>) -> UnimodalCertificate<T> {
    let v = f.values();
    let dip = first_dip(v);
    let level = level_sweep(v);
    let direct_route = dip.is_none();
    let level_route = level.is_none();
    let witness = if direct_route && level_route {
        None
    } else {
        Some(UnimodalWitness { level, dip_index: dip, dip_x: dip.map(|i| f.abscissae()[i]) })
    };
    UnimodalCertificate { passed: direct_route && level_route, level_route, direct_route, witness }
}

/// First triple `(i-1, i, i+1)` breaking the requested curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureWitness<T> {
    pub index: usize,
    pub x: T,
    /// Scaled second difference of the log-values at `index`.
    pub second_difference: T,
}

fn log_curvature<T: Real>(xs: &[T], logs: &[T], sign: T, tolerance: T) -> Option<CurvatureWitness<T>> {
    for i in 1..logs.len().saturating_sub(1) {
        let (h0, h1) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
        let s0 = (logs[i] - logs[i - 1]) / h0;
        let s1 = (logs[i + 1] - logs[i]) / h1;
        // equals the plain second difference on a uniform grid
        let d2 = (s1 - s0) * (h0 + h1) * c(0.5);
        let scale = logs[i - 1].abs().max(logs[i].abs()).max(logs[i + 1].abs()).max(T::one());
        if sign * d2 > tolerance * scale {
            return Some(CurvatureWitness { index: i, x: xs[i], second_difference: d2 });
        }
    }
    None
}

fn positive_logs<T: Real>(f: &GridFunction<T>) -> Result<Vec<T>> {
    f.values()
        .iter()
        .zip(f.abscissae())
        .map(|(&v, &x)| {
            if v > T::zero() && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(Error::Domain(format!("log-curvature needs positive values, got {v} at x = {x}")))
            }
        })
        .collect()
}

/// Concavity of `ln f` on the grid: every second difference of the log
/// values is at most `tolerance · max(1, |ln f|)`.
pub fn certify_logconcave<T: Real>(
    f: &GridFunction<T>,
    tolerance: T,
) -> Result<(bool, Option<CurvatureWitness<T>>)> {
    let logs = positive_logs(f)?;
    let w = log_curvature(f.abscissae(), &logs, T::one(), tolerance);
    Ok((w.is_none(), w))
}

/// Mirror of [`certify_logconcave`] for log-convexity.
pub fn certify_logconvex<T: Real>(
    f: &GridFunction<T>,
    tolerance: T,
) -> Result<(bool, Option<CurvatureWitness<T>>)> {
    let logs = positive_logs(f)?;
    let w = log_curvature(f.abscissae(), &logs, -T::one(), tolerance);
    Ok((w.is_none(), w))
}

/// [`certify_logconcave`] for a grid that already holds `ln f`.
pub fn certify_logconcave_logvalues<T: Real>(
    log_f: &GridFunction<T>,
    tolerance: T,
) -> (bool, Option<CurvatureWitness<T>>) {
    let w = log_curvature(log_f.abscissae(), log_f.values(), T::one(), tolerance);
    (w.is_none(), w)
}

/// [`certify_logconvex`] for a grid that already holds `ln f`.
pub fn certify_logconvex_logvalues<T: Real>(
    log_f: &GridFunction<T>,
    tolerance: T,
) -> (bool, Option<CurvatureWitness<T>>) {
    let w = log_curvature(log_f.abscissae(), log_f.values(), -T::one(), tolerance);
    (w.is_none(), w)
}

/// Smallest minor found and where.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorReport<T> {
    /// Minimum minor after flushing values under the noise floor to zero.
    pub min_minor: T,
    /// The same minor divided by the product of its row norms.
    pub min_normalized: T,
    pub x_indices: Vec<usize>,
    pub y_indices: Vec<usize>,
    pub minors_checked: usize,
}

/// Grids up to this size are searched exhaustively by [`tp_minors`].
pub const TP_EXHAUSTIVE_LIMIT: usize = 8;
const TP_RANDOM_DRAWS: usize = 20_000;

fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..m).collect();
    if m > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - m {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        if idx[i] == i + n - m {
            return out;
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn sorted_subset<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<usize> {
    let mut v = sample(rng, n, m).into_vec();
    v.sort_unstable();
    v
}

/// Minimum `m × m` minor of `[k(x_i, y_j)]` over increasing index subsets.
///
/// Exhaustive when both grids have at most [`TP_EXHAUSTIVE_LIMIT`]
/// points, otherwise a seeded random sample of subsets. Minors smaller in
/// magnitude than `1e-14 ×` the product of row norms count as zero.
pub fn tp_minors<T: Real, K: Fn(T, T) -> T>(kernel: K, xs: &[T], ys: &[T], m: usize) -> Result<MinorReport<T>> {
    tp_minors_seeded(kernel, xs, ys, m, 0)
}

/// [`tp_minors`] with an explicit seed for the random-subset regime.
pub fn tp_minors_seeded<T: Real, K: Fn(T, T) -> T>(
    kernel: K,
    xs: &[T],
    ys: &[T],
    m: usize,
    seed: u64,
) -> Result<MinorReport<T>> {
    for (name, g) in [("xs", xs), ("ys", ys)] {
        if g.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain(format!("{name} must be strictly increasing")));
        }
    }
    if m == 0 || m > xs.len() || m > ys.len() {
        return Err(Error::Domain(format!(
            "minor order {m} needs 1 <= m <= min({}, {})",
            xs.len(),
            ys.len()
        )));
    }
    let table: Vec<Vec<T>> = xs.iter().map(|&x| ys.iter().map(|&y| kernel(x, y)).collect()).collect();
    let mut best = MinorReport {
        min_minor: T::infinity(),
        min_normalized: T::infinity(),
        x_indices: Vec::new(),
        y_indices: Vec::new(),
        minors_checked: 0,
    };
    let mut visit = |ri: &[usize], ci: &[usize]| {
        let mat = SquareMatrix::from_fn(m, |i, j| table[ri[i]][ci[j]]);
        let norms = (0..m).fold(T::one(), |acc, i| {
            acc * (0..m).map(|j| mat.get(i, j) * mat.get(i, j)).sum::<T>().sqrt()
        });
        let mut det = mat.determinant();
        if det.abs() < c::<T>(1e-14) * norms || norms == T::zero() {
            det = T::zero();
        }
        let normalized = if norms > T::zero() { det / norms } else { T::zero() };
        best.minors_checked += 1;
        if det < best.min_minor || (det == best.min_minor && normalized < best.min_normalized) {
            best.min_minor = det;
            best.min_normalized = normalized;
            best.x_indices = ri.to_vec();
            best.y_indices = ci.to_vec();
        }
    };
    if xs.len() <= TP_EXHAUSTIVE_LIMIT && ys.len() <= TP_EXHAUSTIVE_LIMIT {
        let rows = combinations(xs.len(), m);
        let cols = combinations(ys.len(), m);
        for r in &rows {
            for col in &cols {
                visit(r, col);
            }
        }
    } else {
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..TP_RANDOM_DRAWS {
            let r = sorted_subset(xs.len(), m, &mut rng);
            let col = sorted_subset(ys.len(), m, &mut rng);
            visit(&r, &col);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariationReport<T> {
    pub passed: bool,
    pub input: SignPattern,
    pub output: SignPattern,
    /// `q(y_j)` for each point of the output grid.
    pub q: Vec<T>,
}

/// Trapezoid-rule surrogate of `q(y) = ∫ k(x, y) h(x) dx` on the grid of
/// `h`, checked for variation diminishing: `q` has no more sign changes
/// than `h`, and the same pattern when the counts are equal.
///
/// A TP kernel makes this exact for the discrete sum, so a failure means
/// either the kernel is not TP on these points or a value is not finite.
pub fn variation_diminish_check<T: Real, K: Fn(T, T) -> T>(
    kernel: K,
    h: &GridFunction<T>,
    y_grid: &[T],
) -> Result<VariationReport<T>> {
    let xs = h.abscissae();
    let n = xs.len();
    if n < 2 {
        return Err(Error::Domain("variation check needs at least two abscissae".into()));
    }
    let weights: Vec<T> = (0..n)
        .map(|i| {
            let left = if i > 0 { xs[i] - xs[i - 1] } else { T::zero() };
            let right = if i + 1 < n { xs[i + 1] - xs[i] } else { T::zero() };
            (left + right) * c(0.5)
        })
        .collect();
    let mut q = Vec::with_capacity(y_grid.len());
    for &y in y_grid {
        let mut sum = T::zero();
        let mut mass = T::zero();
        for i in 0..n {
            let t = weights[i] * kernel(xs[i], y) * h.values()[i];
            sum = sum + t;
            mass = mass + t.abs();
        }
        if !sum.is_finite() {
            return Err(Error::Quadrature { achieved: f64::INFINITY, requested: 0.0 });
        }
        q.push(if sum.abs() <= c::<T>(1e-10) * mass { T::zero() } else { sum });
    }
    let input = sign_changes(h.values(), default_zero_tolerance(h.values()));
    let output = sign_changes(&q, T::zero());
    let passed = output.changes < input.changes
        || (output.changes == input.changes && output.pattern == input.pattern);
    Ok(VariationReport { passed, input, output, q })
}

/// A line `a + b t` on which the function was not unimodal.
#[derive(Debug, Clone, PartialEq)]
pub struct LineWitness<T> {
    pub trial: usize,
    pub point: Vec<T>,
    pub direction: Vec<T>,
    pub certificate: UnimodalCertificate<T>,
}

/// Points per line in [`convex_contours_check`].
pub const CONTOUR_LINE_POINTS: usize = 201;

/// Unimodality of `f` along `trials` random lines through the ball of
/// the given radius about `center`. Unimodal on every line means the
/// upper level sets are convex.
///
/// `f` may be any increasing transform of the density (the log-density
/// works and avoids underflow). Trials run in parallel; each uses its own
/// stream derived from `seed`, so the verdict is order-independent.
pub fn convex_contours_check<T: Real, F: Fn(&[T]) -> T + Sync>(
    f: F,
    center: &[T],
    radius: T,
    trials: usize,
    seed: u64,
) -> (bool, Option<LineWitness<T>>) {
    let p = center.len();
    let failures: Vec<LineWitness<T>> = (0..trials)
        .into_par_iter()
        .filter_map(|trial| {
            let mut rng = StdRng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let dir = unit_vector::<T, _>(p, &mut rng);
            let offset_dir = unit_vector::<T, _>(p, &mut rng);
            let r: T = radius * T::lit(rng.random::<f64>()).powf(T::one() / T::from_usize_lossy(p));
            let point: Vec<T> = center.iter().zip(&offset_dir).map(|(&c0, &o)| c0 + r * o).collect();
            let ts = linspace(-c::<T>(2.0) * radius, c::<T>(2.0) * radius, CONTOUR_LINE_POINTS);
            let values: Vec<T> = ts
                .iter()
                .map(|&t| {
                    let y: Vec<T> = point.iter().zip(&dir).map(|(&a, &b)| a + b * t).collect();
                    f(&y)
                })
                .collect();
            let grid = GridFunction::new(ts, values).expect("linspace is increasing");
            let cert = certify_unimodal(&grid);
            if cert.passed {
                None
            } else {
                Some(LineWitness { trial, point, direction: dir, certificate: cert })
            }
        })
        .collect();
    let first = failures.into_iter().min_by_key(|w| w.trial);
    (first.is_none(), first)
}

fn unit_vector<T: Real, R: Rng>(p: usize, rng: &mut R) -> Vec<T> {
    loop {
        let v: Vec<T> = (0..p).map(|_| crate::sampling::std_normal::<T, _>(rng)).collect();
        let n = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if n > c(1e-12) {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn normal_pdf(x: f64, m: f64) -> f64 {
        (-(x - m) * (x - m) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    #[test]
    fn sign_change_examples() {
        let p = sign_changes(&[-1.0, 0.0, 2.0, 0.0, -3.0], 0.0);
        assert_eq!(p.changes, 2);
        assert_eq!(p.pattern, vec![Sign::Minus, Sign::Plus, Sign::Minus]);
        assert_eq!(p.zeros_discarded, 2);
        let p = sign_changes(&[0.0f64; 5], 0.0);
        assert_eq!((p.changes, p.pattern.len()), (0, 0));
        let p = sign_changes(&[1.0, -1e-18, 2.0], 1e-12);
        assert_eq!(p.changes, 0);
        assert_eq!(p.pattern, vec![Sign::Plus]);
    }

    #[test]
    fn property_s_examples() {
        assert!(has_property_s(&[-1.0, 2.0, -1.0], 0.0));
        assert!(!has_property_s(&[1.0, -1.0, 1.0], 0.0));
        assert!(has_property_s(&[3.0, 2.0, 1.0], 0.0));
    }

    #[test]
    fn bimodal_blend_rejected() {
        let xs = linspace(-8.0, 8.0, 401);
        let f = GridFunction::from_fn(xs, |x| 0.5 * normal_pdf(x, -3.0) + 0.5 * normal_pdf(x, 3.0)).unwrap();
        let cert = certify_unimodal(&f);
        assert!(!cert.passed && cert.routes_agree());
        let w = cert.witness.unwrap();
        // the separating level sits between the saddle and the peaks
        let saddle = normal_pdf(0.0, 3.0);
        let level = w.level.unwrap();
        assert!(level > saddle && level < 0.5 * normal_pdf(3.0, 3.0) + 0.5 * normal_pdf(3.0, -3.0));
        assert!(w.dip_x.unwrap().abs() < 0.05);
    }

    #[test]
    fn monotone_and_normal_pass() {
        let f = GridFunction::new(linspace(0.0, 1.0, 5), vec![5.0, 4.0, 4.0, 2.0, 1.0]).unwrap();
        assert!(certify_unimodal(&f).passed);
        let g = GridFunction::from_fn(linspace(-6.0, 6.0, 201), |x| normal_pdf(x, 0.0)).unwrap();
        assert!(certify_unimodal(&g).passed);
        assert!(certify_logconcave(&g, 1e-10).unwrap().0);
        assert!(!certify_logconvex(&g, 1e-10).unwrap().0);
    }

    #[test]
    fn logconcave_needs_positive_values() {
        let f = GridFunction::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(certify_logconcave(&f, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn nonuniform_grid_curvature() {
        // exp(-x^2) on a geometric grid is log-concave, exp(x^2) is log-convex
        let xs: Vec<f64> = (0..60).map(|i| 0.01 * 1.1f64.powi(i)).collect();
        let f = GridFunction::from_fn(xs.clone(), |x| (-x * x).exp()).unwrap();
        assert!(certify_logconcave(&f, 1e-12).unwrap().0);
        let g = GridFunction::from_fn(xs, |x| (x * x).exp()).unwrap();
        let (ok, w) = certify_logconcave(&g, 1e-12).unwrap();
        assert!(!ok && w.unwrap().index == 1);
        assert!(certify_logconvex(&g, 1e-12).unwrap().0);
    }

    #[test]
    fn grid_validation() {
        assert!(GridFunction::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn combinations_enumerated() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(8, 4).len(), 70);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
        for comb in combinations(6, 3) {
            assert!(comb.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rank_one_minors_vanish() {
        let xs = linspace(0.1, 2.0, 6);
        let ys = linspace(0.0, 3.0, 6);
        let r = tp_minors(|x: f64, y: f64| (x + 1.0) * (2.0 + y.sin()), &xs, &ys, 2).unwrap();
        assert_eq!(r.min_minor, 0.0);
        assert_eq!(r.minors_checked, 225);
    }

    #[test]
    fn exponential_kernel_is_tp() {
        let xs = linspace(0.0, 1.0, 5);
        let ys = linspace(0.0, 1.0, 5);
        for m in 1..=3 {
            let r = tp_minors(|x: f64, y: f64| (x * y).exp(), &xs, &ys, m).unwrap();
            assert!(r.min_minor > 0.0, "m = {m}: {r:?}");
        }
        // reversing one argument turns 2x2 minors negative
        let r = tp_minors(|x: f64, y: f64| (-x * y).exp(), &xs, &ys, 2).unwrap();
        assert!(r.min_minor < 0.0);
    }

    #[test]
    fn random_subsets_for_large_grids() {
        let xs = linspace(0.0, 1.0, 12);
        let a = tp_minors_seeded(|x: f64, y: f64| (x * y).exp(), &xs, &xs, 3, 7).unwrap();
        let b = tp_minors_seeded(|x: f64, y: f64| (x * y).exp(), &xs, &xs, 3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.minors_checked, TP_RANDOM_DRAWS);
        assert!(a.min_minor > 0.0);
    }

    #[test]
    fn variation_diminishing_gaussian_kernel() {
        let xs = linspace(-3.0, 3.0, 121);
        let h = GridFunction::from_fn(xs, |x: f64| if x.abs() < 1.0 { 1.0 } else { -0.3 }).unwrap();
        let ys = linspace(-3.0, 3.0, 61);
        let r = variation_diminish_check(|x: f64, y: f64| (-(x - y) * (x - y)).exp(), &h, &ys).unwrap();
        assert!(r.passed);
        assert_eq!(r.input.changes, 2);
        // a non-TP kernel can add sign changes
        let r = variation_diminish_check(|x: f64, y: f64| (5.0 * x * y).cos(), &h, &ys).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn contours_of_gaussians() {
        let sph = |y: &[f64]| -0.5 * y.iter().map(|v| v * v).sum::<f64>();
        assert!(convex_contours_check(sph, &[0.0, 0.0], 3.0, 50, 1).0);
        let two = |y: &[f64]| {
            let a = (-0.5 * ((y[0] - 3.0).powi(2) + y[1] * y[1])).exp();
            let b = (-0.5 * ((y[0] + 3.0).powi(2) + y[1] * y[1])).exp();
            a + b
        };
        let (ok, w) = convex_contours_check(two, &[0.0, 0.0], 4.0, 100, 2);
        assert!(!ok);
        let w = w.unwrap();
        assert!(!w.certificate.passed);
        assert_eq!(convex_contours_check(two, &[0.0, 0.0], 4.0, 100, 2).1.unwrap().trial, w.trial);
    }

    proptest! {
        #[test]
        fn routes_agree(v in prop::collection::vec(prop_oneof![-3i32..3, Just(0)], 3..40)) {
            let xs: Vec<f64> = (0..v.len()).map(|i| i as f64).collect();
            let vals: Vec<f64> = v.iter().map(|&k| k as f64).collect();
            let cert = certify_unimodal(&GridFunction::new(xs, vals).unwrap());
            prop_assert!(cert.routes_agree());
        }

        #[test]
        fn routes_agree_continuous(v in prop::collection::vec(-1.0f64..1.0, 3..60)) {
            let xs: Vec<f64> = (0..v.len()).map(|i| i as f64).collect();
            let cert = certify_unimodal(&GridFunction::new(xs, v).unwrap());
            prop_assert!(cert.routes_agree());
        }

        #[test]
        fn sign_changes_scale_free(v in prop::collection::vec(-10.0f64..10.0, 0..50), s in 1e-6f64..1e6) {
            let a = sign_changes(&v, default_zero_tolerance(&v));
            let scaled: Vec<f64> = v.iter().map(|x| x * s).collect();
            let b = sign_changes(&scaled, default_zero_tolerance(&scaled));
            prop_assert_eq!(a.pattern, b.pattern);
        }

        #[test]
        fn sub_tolerance_noise_ignored(
            v in prop::collection::vec(prop_oneof![-10.0f64..-0.1, 0.1f64..10.0], 1..30),
            noise in prop::collection::vec((0usize..30, -1e-15f64..1e-15), 0..10),
        ) {
            let a = sign_changes(&v, 1e-12);
            let mut w = v.clone();
            for (pos, eps) in noise {
                w.insert(pos.min(w.len()), eps);
            }
            prop_assert_eq!(sign_changes(&w, 1e-12).pattern, a.pattern);
        }
    }
}
