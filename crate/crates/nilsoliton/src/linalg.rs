//! Dense linear algebra over a [`Scalar`] field.
//!
//! Everything downstream (derivation spaces, curvature, eigenspace
//! splitting, projections) reduces to row reduction, solving, kernels and
//! positive-definiteness checks on small dense matrices. In exact mode
//! these are decided with no rounding.

use crate::scalar::Scalar;
use std::fmt;

#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.clone() * other[(k, j)].clone();
                    out[(i, j)] += &t;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![S::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self[(i, j)].is_zero() || v[j].is_zero() {
                    continue;
                }
                let t = self[(i, j)].clone() * v[j].clone();
                out[i] += &t;
            }
        }
        out
    }

    pub fn add(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn scale(&self, s: &S) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * s.clone())
    }

    pub fn trace(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let mut t = S::zero();
        for i in 0..self.rows {
            t += &self[(i, i)];
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if !(self[(i, j)].clone() - self[(j, i)].clone()).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// In-place reduced row echelon form. Returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r >= self.rows {
                break;
            }
            // Pick the entry of largest magnitude for stability; in exact
            // mode this also keeps intermediate numerators small.
            let mut best: Option<(usize, f64)> = None;
            for i in r..self.rows {
                if !self[(i, c)].is_zero() {
                    let mag = self[(i, c)].to_f64().abs();
                    if best.map_or(true, |(_, m)| mag > m) {
                        best = Some((i, mag));
                    }
                }
            }
            let Some((p, _)) = best else { continue };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let t = self[(r, j)].clone() * inv.clone();
                self[(r, j)] = t;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let t = f.clone() * self[(r, j)].clone();
                        self[(i, j)] -= &t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel (null space).
    pub fn kernel(&self) -> Vec<Vec<S>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![S::zero(); self.cols];
            v[fc] = S::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[(ri, fc)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `self * x = b`; `None` if inconsistent. For underdetermined
    /// systems returns the solution with free variables set to zero.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(self.rows, b.len());
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the RHS column
        }
        let mut x = vec![S::zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[(ri, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Option<Mat<S>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| aug[(i, n + j)].clone()))
    }

    /// Positive definiteness of a symmetric matrix, by symmetric Gaussian
    /// elimination: all pivots must be strictly positive.
    pub fn is_positive_definite(&self) -> bool {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        for k in 0..n {
            if !m[(k, k)].is_positive() {
                return false;
            }
            let inv = m[(k, k)].recip();
            for i in (k + 1)..n {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let f = m[(i, k)].clone() * inv.clone();
                for j in (k + 1)..n {
                    let t = f.clone() * m[(k, j)].clone();
                    m[(i, j)] -= &t;
                }
            }
        }
        true
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// --- vector helpers ---------------------------------------------------------

pub fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + y.clone())
        .collect()
}

pub fn vec_sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() - y.clone())
        .collect()
}

pub fn vec_scale<S: Scalar>(a: &[S], s: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

/// `a += s * b`
pub fn vec_axpy<S: Scalar>(a: &mut [S], s: &S, b: &[S]) {
    for (x, y) in a.iter_mut().zip(b) {
        let t = s.clone() * y.clone();
        *x += &t;
    }
}

pub fn vec_is_zero<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Plain coordinate dot product (no metric).
pub fn vec_dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let t = x.clone() * y.clone();
        acc += &t;
    }
    acc
}

/// Gram inner product `a^T G b`.
pub fn gram_dot<S: Scalar>(gram: &Mat<S>, a: &[S], b: &[S]) -> S {
    let gb = gram.matvec(b);
    vec_dot(a, &gb)
}

/// Stack vectors as matrix rows.
pub fn rows_from<S: Scalar>(vs: &[Vec<S>]) -> Mat<S> {
    Mat::from_rows(vs.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn m(rows: Vec<Vec<i64>>) -> Mat<Exact> {
        Mat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Exact::from_int).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_and_rank() {
        let a = m(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn kernel_solves() {
        let a = m(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        for v in a.kernel() {
            assert!(vec_is_zero(&a.matvec(&v)));
        }
        assert_eq!(a.kernel().len(), 1);
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(vec![vec![2, 1], vec![1, 1]]);
        let x = a
            .solve(&[Exact::from_int(3), Exact::from_int(2)])
            .unwrap();
        assert_eq!(x, vec![Exact::from_int(1), Exact::from_int(1)]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Mat::identity(2));
    }

    #[test]
    fn inconsistent_system() {
        let a = m(vec![vec![1, 1], vec![1, 1]]);
        assert!(a.solve(&[Exact::from_int(1), Exact::from_int(2)]).is_none());
    }

    #[test]
    fn positive_definite() {
        assert!(m(vec![vec![2, 1], vec![1, 2]]).is_positive_definite());
        assert!(!m(vec![vec![1, 2], vec![2, 1]]).is_positive_definite());
    }
}
