//! Small dense square matrices: determinants, inverses and condition
//! estimates for the `p × p` scale matrices and TP minors.

use crate::real::Real;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = T::one();
        }
        Self { n, data }
    }

    /// Builds from rows; `None` if the rows are ragged or not square.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Self { n, data: rows.iter().flatten().copied().collect() })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| (0..self.n).map(|k| self.get(i, k) * other.get(k, j)).sum())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Determinant by Gaussian elimination with full pivoting.
    pub fn determinant(&self) -> T {
        let n = self.n;
        let mut a = self.clone();
        let mut det = T::one();
        for k in 0..n {
            let (mut pi, mut pj, mut best) = (k, k, T::zero());
            for i in k..n {
                for j in k..n {
                    let v = a.get(i, j).abs();
                    if v > best {
                        best = v;
                        pi = i;
                        pj = j;
                    }
                }
            }
            if best == T::zero() {
                return T::zero();
            }
            if pi != k {
                for j in 0..n {
                    let t = a.get(k, j);
                    a.set(k, j, a.get(pi, j));
                    a.set(pi, j, t);
                }
                det = -det;
            }
            if pj != k {
                for i in 0..n {
                    let t = a.get(i, k);
                    a.set(i, k, a.get(i, pj));
                    a.set(i, pj, t);
                }
                det = -det;
            }
            let pivot = a.get(k, k);
            det = det * pivot;
            for i in (k + 1)..n {
                let factor = a.get(i, k) / pivot;
                for j in (k + 1)..n {
                    a.set(i, j, a.get(i, j) - factor * a.get(k, j));
                }
            }
        }
        det
    }

    /// Natural log of `|det|`.
    pub fn log_abs_determinant(&self) -> T {
        self.determinant().abs().ln()
    }

    /// Inverse by Gauss–Jordan with partial pivoting; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a.get(x, k).abs().partial_cmp(&a.get(y, k).abs()).unwrap())?;
            if a.get(p, k) == T::zero() || !a.get(p, k).is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let t = a.get(k, j);
                    a.set(k, j, a.get(p, j));
                    a.set(p, j, t);
                    let t = inv.get(k, j);
                    inv.set(k, j, inv.get(p, j));
                    inv.set(p, j, t);
                }
            }
            let pivot = a.get(k, k);
            for j in 0..n {
                a.set(k, j, a.get(k, j) / pivot);
                inv.set(k, j, inv.get(k, j) / pivot);
            }
            for i in 0..n {
                if i != k {
                    let f = a.get(i, k);
                    if f != T::zero() {
                        for j in 0..n {
                            a.set(i, j, a.get(i, j) - f * a.get(k, j));
                            inv.set(i, j, inv.get(i, j) - f * inv.get(k, j));
                        }
                    }
                }
            }
        }
        Some(inv)
    }

    /// `‖A‖₁ ‖A⁻¹‖₁`, infinite for singular matrices.
    pub fn condition_number(&self) -> T {
        match self.inverse() {
            Some(inv) => self.norm1() * inv.norm1(),
            None => T::infinity(),
        }
    }
}
