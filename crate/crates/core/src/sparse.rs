//! Minimal sparse kernel: CSR storage for assembled operators and a skyline
//! LDL^T factorization for the (possibly indefinite) symmetric solves.
//!
//! The structured polar meshes produce narrow-profile matrices, so a profile
//! factorization is both simple and fast at the scales this crate targets.
//! LDL^T also exposes the inertia of the shifted operator, which the solver
//! reports instead of guessing about definiteness.

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Build from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut counts = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (r, c, v) in triplets {
            debug_assert!(r < n && c < n);
            if last == Some((r, c)) {
                let tail = vals.last_mut().unwrap();
                *tail = *tail + v;
            } else {
                cols.push(c);
                vals.push(v);
                counts[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            counts[r + 1] += counts[r];
        }
        CsrMatrix {
            n,
            row_ptr: counts,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Entries of row `i` as (column, value) pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.cols[lo..hi]
            .iter()
            .copied()
            .zip(self.vals[lo..hi].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map(|(_, v)| v)
            .unwrap_or_else(T::zero)
    }

    /// y = A x.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            let mut acc = T::zero();
            for (c, v) in self.row(i) {
                acc = acc + v * x[c];
            }
            y[i] = acc;
        }
        y
    }

    /// x^T A y.
    pub fn quadratic_form(&self, x: &[T], y: &[T]) -> T {
        let ay = self.matvec(y);
        x.iter()
            .zip(ay)
            .fold(T::zero(), |s, (&xi, ayi)| s + xi * ayi)
    }

    /// alpha * self + beta * other, merging sparsity patterns.
    pub fn linear_combination(&self, alpha: T, other: &CsrMatrix<T>, beta: T) -> CsrMatrix<T> {
        assert_eq!(self.n, other.n);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                triplets.push((i, c, alpha * v));
            }
            for (c, v) in other.row(i) {
                triplets.push((i, c, beta * v));
            }
        }
        CsrMatrix::from_triplets(self.n, triplets)
    }

    /// Largest relative deviation from symmetry, `max |a_ij - a_ji| / max |a_ij|`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut scale = 0.0f64;
        let mut defect = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                let v = to_f64(v);
                scale = scale.max(v.abs());
                defect = defect.max((v - to_f64(self.get(j, i))).abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// Restriction to the index set where `keep[i]`, in increasing order.
    pub fn restrict(&self, keep: &[bool]) -> CsrMatrix<T> {
        assert_eq!(keep.len(), self.n);
        let mut map = vec![usize::MAX; self.n];
        let mut m = 0;
        for i in 0..self.n {
            if keep[i] {
                map[i] = m;
                m += 1;
            }
        }
        let mut triplets = Vec::new();
        for i in 0..self.n {
            if !keep[i] {
                continue;
            }
            for (c, v) in self.row(i) {
                if keep[c] {
                    triplets.push((map[i], map[c], v));
                }
            }
        }
        CsrMatrix::from_triplets(m, triplets)
    }

    /// Sum of the entries of row `i`.
    pub fn row_sum(&self, i: usize) -> T {
        self.row(i).fold(T::zero(), |s, (_, v)| s + v)
    }

    /// Sum of all entries.
    pub fn total_sum(&self) -> T {
        (0..self.n).fold(T::zero(), |s, i| s + self.row_sum(i))
    }
}

/// Signs of the pivots of an LDL^T factorization; by Sylvester's law this is
/// the inertia of the factored matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Skyline (variable-band) LDL^T factorization of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SkylineLdlt<T> {
    n: usize,
    first: Vec<usize>,
    offset: Vec<usize>,
    lower: Vec<T>,
    diag: Vec<T>,
    inertia: Inertia,
    smallest_pivot: f64,
}

impl<T: Real> SkylineLdlt<T> {
    /// Factor a symmetric matrix given in CSR form (full pattern; only the
    /// lower triangle is read). Fails on a pivot that is zero relative to the
    /// matrix scale.
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let mut first = vec![0usize; n];
        let mut scale = 0.0f64;
        for i in 0..n {
            let mut fi = i;
            for (c, v) in a.row(i) {
                if c < fi {
                    fi = c;
                }
                scale = scale.max(to_f64(v).abs());
            }
            first[i] = fi;
        }
        // Fill stays inside the envelope described by `first`.
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i]);
        }
        let mut lower = vec![T::zero(); offset[n]];
        let mut diag = vec![T::zero(); n];
        for i in 0..n {
            for (c, v) in a.row(i) {
                if c < i {
                    lower[offset[i] + (c - first[i])] = v;
                } else if c == i {
                    diag[i] = v;
                }
            }
        }

        let pivot_floor = scale * f64::EPSILON * 1e-2;
        let mut smallest = f64::INFINITY;
        let mut inertia = Inertia {
            positive: 0,
            negative: 0,
            zero: 0,
        };
        for i in 0..n {
            let fi = first[i];
            // l[i][j] = (a[i][j] - sum_k l[i][k] d[k] l[j][k]) / d[j]
            for j in fi..i {
                let fj = first[j];
                let kmin = fi.max(fj);
                let mut s = lower[offset[i] + (j - fi)];
                for k in kmin..j {
                    s = s - lower[offset[i] + (k - fi)] * diag[k] * lower[offset[j] + (k - fj)];
                }
                lower[offset[i] + (j - fi)] = s / diag[j];
            }
            let mut d = diag[i];
            for k in fi..i {
                let lik = lower[offset[i] + (k - fi)];
                d = d - lik * lik * diag[k];
            }
            let dab = to_f64(d).abs();
            if dab <= pivot_floor || !dab.is_finite() {
                return Err(Error::Singular {
                    pivot: to_f64(d),
                    index: i,
                });
            }
            smallest = smallest.min(dab);
            if d > T::zero() {
                inertia.positive += 1;
            } else {
                inertia.negative += 1;
            }
            diag[i] = d;
        }
        Ok(SkylineLdlt {
            n,
            first,
            offset,
            lower,
            diag,
            inertia,
            smallest_pivot: smallest,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn smallest_pivot(&self) -> f64 {
        self.smallest_pivot
    }

    /// Solve A x = b via L D L^T.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n);
        let mut x = b.to_vec();
        // forward: L z = b
        for i in 0..self.n {
            let fi = self.first[i];
            let mut s = x[i];
            for k in fi..i {
                s = s - self.lower[self.offset[i] + (k - fi)] * x[k];
            }
            x[i] = s;
        }
        // diagonal
        for i in 0..self.n {
            x[i] = x[i] / self.diag[i];
        }
        // backward: L^T x = z
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let xi = x[i];
            for k in fi..i {
                x[k] = x[k] - self.lower[self.offset[i] + (k - fi)] * xi;
            }
        }
        x
    }
}
