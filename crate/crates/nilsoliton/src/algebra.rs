//! Finite-dimensional real Lie algebras with inner products.
//!
//! A [`MetricLieAlgebra`] is a structure-constant table together with the
//! Gram matrix of an inner product on the chosen basis. Bases are not
//! assumed orthonormal anywhere: all geometric formulas downstream are
//! written against the Gram matrix, which is what keeps exact mode exact.
//!
//! Antisymmetry, the Jacobi identity and positive definiteness of the Gram
//! matrix are checked at construction, so failures surface at a single
//! diagnosis point.

use crate::linalg::{gram_dot, vec_is_zero, Mat};
use crate::scalar::{Dd, Exact, Scalar};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },
    #[error("span is not closed under the bracket; witness pair ({0}, {1})", witness.0, witness.1)]
    NotASubalgebra { witness: (usize, usize) },
    #[error("Gram matrix is not symmetric positive definite")]
    GramNotPositiveDefinite,
    #[error("structure constants violate antisymmetry")]
    AntisymmetryViolated,
    #[error("Jacobi identity violated (max residual {residual:e})")]
    JacobiViolated { residual: f64 },
    #[error("dump parse error: {0}")]
    ParseError(String),
}

/// Endomorphisms of an algebra are plain matrices on its basis.
pub type LinearMap<S> = Mat<S>;

/// A Lie algebra over `S` with structure constants `[e_i, e_j] = sum_k
/// c[i][j][k] e_k` (stored sparsely) and a positive definite Gram matrix.
#[derive(Clone)]
pub struct MetricLieAlgebra<S> {
    dim: usize,
    /// `table[i * dim + j]` holds the sparse coordinates of `[e_i, e_j]`.
    table: Vec<Vec<(usize, S)>>,
    gram: Mat<S>,
    gram_inv: Mat<S>,
}

impl<S: Scalar> MetricLieAlgebra<S> {
    /// Build from the brackets of basis pairs `i < j`; antisymmetry is
    /// filled in, and Jacobi / Gram positivity are verified.
    pub fn new(
        dim: usize,
        mut bracket_of: impl FnMut(usize, usize) -> Vec<S>,
        gram: Mat<S>,
    ) -> Result<Self, AlgebraError> {
        let mut table = vec![Vec::new(); dim * dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = bracket_of(i, j);
                if v.len() != dim {
                    return Err(AlgebraError::DimensionError {
                        expected: dim,
                        got: v.len(),
                    });
                }
                let sparse: Vec<(usize, S)> = v
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                table[j * dim + i] = sparse
                    .iter()
                    .map(|(k, c)| (*k, -(c.clone())))
                    .collect();
                table[i * dim + j] = sparse;
            }
        }
        Self::from_table(dim, table, gram)
    }

    pub(crate) fn from_table(
        dim: usize,
        table: Vec<Vec<(usize, S)>>,
        gram: Mat<S>,
    ) -> Result<Self, AlgebraError> {
        if gram.nrows() != dim || gram.ncols() != dim {
            return Err(AlgebraError::DimensionError {
                expected: dim,
                got: gram.nrows(),
            });
        }
        if !gram.is_symmetric() || !gram.is_positive_definite() {
            return Err(AlgebraError::GramNotPositiveDefinite);
        }
        let gram_inv = gram.inverse().ok_or(AlgebraError::GramNotPositiveDefinite)?;
        let alg = MetricLieAlgebra {
            dim,
            table,
            gram,
            gram_inv,
        };
        alg.check_antisymmetry()?;
        alg.check_jacobi()?;
        Ok(alg)
    }

    fn check_antisymmetry(&self) -> Result<(), AlgebraError> {
        for i in 0..self.dim {
            if !self.table[i * self.dim + i].is_empty() {
                return Err(AlgebraError::AntisymmetryViolated);
            }
            for j in 0..self.dim {
                let mut v = vec![S::zero(); self.dim];
                for (k, c) in &self.table[i * self.dim + j] {
                    v[*k] += c;
                }
                for (k, c) in &self.table[j * self.dim + i] {
                    v[*k] += c;
                }
                if !vec_is_zero(&v) {
                    return Err(AlgebraError::AntisymmetryViolated);
                }
            }
        }
        Ok(())
    }

    fn check_jacobi(&self) -> Result<(), AlgebraError> {
        let mut worst = 0.0f64;
        let scale = self.max_structure_constant();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let bij = self.bracket_basis(i, j).to_dense(self.dim);
                for k in (j + 1)..self.dim {
                    let mut acc = self.bracket(&bij, &self.basis_vector(k)).unwrap();
                    let t =
                        self.bracket(&self.bracket_basis(j, k).to_dense(self.dim), &self.basis_vector(i));
                    for (a, b) in acc.iter_mut().zip(t.unwrap()) {
                        *a += &b;
                    }
                    let t = self
                        .bracket(&self.bracket_basis(k, i).to_dense(self.dim), &self.basis_vector(j))
                        .unwrap();
                    for (a, b) in acc.iter_mut().zip(t) {
                        *a += &b;
                    }
                    if S::exact() {
                        if !vec_is_zero(&acc) {
                            return Err(AlgebraError::JacobiViolated { residual: f64::NAN });
                        }
                    } else {
                        for c in &acc {
                            worst = worst.max(c.to_f64().abs());
                        }
                    }
                }
            }
        }
        if !S::exact() && worst > 1e-15 * scale.max(1.0) {
            return Err(AlgebraError::JacobiViolated { residual: worst });
        }
        Ok(())
    }

    fn max_structure_constant(&self) -> f64 {
        self.table
            .iter()
            .flatten()
            .map(|(_, c)| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &Mat<S> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &Mat<S> {
        &self.gram_inv
    }

    pub fn basis_vector(&self, i: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim];
        v[i] = S::one();
        v
    }

    /// Sparse `[e_i, e_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseRef<'_, S> {
        SparseRef(&self.table[i * self.dim + j])
    }

    /// Structure constant `c_{ij}^k`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> S {
        self.table[i * self.dim + j]
            .iter()
            .find(|(l, _)| *l == k)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(S::zero)
    }

    /// `[x, y]` for coordinate vectors.
    pub fn bracket(&self, x: &[S], y: &[S]) -> Result<Vec<S>, AlgebraError> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(AlgebraError::DimensionError {
                expected: self.dim,
                got: x.len().max(y.len()),
            });
        }
        let mut out = vec![S::zero(); self.dim];
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if y[j].is_zero() {
                    continue;
                }
                let f = x[i].clone() * y[j].clone();
                for (k, c) in &self.table[i * self.dim + j] {
                    let t = f.clone() * c.clone();
                    out[*k] += &t;
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad(x) = [x, -]` on the basis.
    pub fn ad(&self, x: &[S]) -> LinearMap<S> {
        let mut m = Mat::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let col = self.bracket(x, &self.basis_vector(j)).unwrap();
            for (k, val) in col.into_iter().enumerate() {
                m[(k, j)] = val;
            }
        }
        m
    }

    pub fn inner(&self, x: &[S], y: &[S]) -> S {
        gram_dot(&self.gram, x, y)
    }

    pub fn norm2(&self, x: &[S]) -> S {
        self.inner(x, x)
    }

    /// Killing form `B(X, Y) = tr(ad X ad Y)` as a bilinear-form matrix.
    pub fn killing_form(&self) -> Mat<S> {
        let d = self.dim;
        let mut b = Mat::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                // sum_{k,l} c_{ik}^l c_{jl}^k
                let mut acc = S::zero();
                for k in 0..d {
                    for (l, v1) in &self.table[i * d + k] {
                        for (kk, v2) in &self.table[j * d + l] {
                            if *kk == k {
                                let t = v1.clone() * v2.clone();
                                acc += &t;
                            }
                        }
                    }
                }
                b[(i, j)] = acc.clone();
                b[(j, i)] = acc;
            }
        }
        b
    }

    /// Basis of the space of derivations, by exact kernel computation on
    /// the linear system `D[e_i,e_j] = [De_i,e_j] + [e_i,De_j]`.
    pub fn derivation_space(&self) -> Vec<LinearMap<S>> {
        let d = self.dim;
        let unknowns = d * d; // D_{m,l}: column index m*d + l
        let mut rows: Vec<Vec<S>> = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                for m in 0..d {
                    let mut row = vec![S::zero(); unknowns];
                    // + sum_l c_{ij}^l D_{m,l}
                    for (l, c) in &self.table[i * d + j] {
                        row[m * d + l] += c;
                    }
                    // - sum_k D_{k,i} c_{kj}^m
                    for k in 0..d {
                        let ckj = self.c(k, j, m);
                        if !ckj.is_zero() {
                            row[k * d + i] -= &ckj;
                        }
                        let cik = self.c(i, k, m);
                        if !cik.is_zero() {
                            row[k * d + j] -= &cik;
                        }
                    }
                    if !vec_is_zero(&row) {
                        rows.push(row);
                    }
                }
            }
        }
        if rows.is_empty() {
            // Abelian: every linear map is a derivation.
            let mut basis = Vec::with_capacity(unknowns);
            for m in 0..d {
                for l in 0..d {
                    let mut mat = Mat::zeros(d, d);
                    mat[(m, l)] = S::one();
                    basis.push(mat);
                }
            }
            return basis;
        }
        let sys = Mat::from_rows(rows);
        sys.kernel()
            .into_iter()
            .map(|v| Mat::from_fn(d, d, |m, l| v[m * d + l].clone()))
            .collect()
    }

    /// Defect family `defect(i,j) = D[e_i,e_j] - [De_i,e_j] - [e_i,De_j]`
    /// for all `i < j`; `D` is a derivation iff every entry vanishes.
    pub fn derivation_defect(&self, map: &LinearMap<S>) -> Result<Vec<((usize, usize), Vec<S>)>, AlgebraError> {
        if map.nrows() != self.dim || map.ncols() != self.dim {
            return Err(AlgebraError::DimensionError {
                expected: self.dim,
                got: map.nrows(),
            });
        }
        let d = self.dim;
        let mut out = Vec::new();
        let cols: Vec<Vec<S>> = (0..d).map(|j| map.col(j)).collect();
        for i in 0..d {
            for j in (i + 1)..d {
                let mut v = map.matvec(&self.bracket_basis(i, j).to_dense(d));
                let t = self.bracket(&cols[i], &self.basis_vector(j))?;
                for (a, b) in v.iter_mut().zip(t) {
                    *a -= &b;
                }
                let t = self.bracket(&self.basis_vector(i), &cols[j])?;
                for (a, b) in v.iter_mut().zip(t) {
                    *a -= &b;
                }
                out.push(((i, j), v));
            }
        }
        Ok(out)
    }

    pub fn is_derivation(&self, map: &LinearMap<S>) -> bool {
        self.derivation_defect(map)
            .map(|def| def.iter().all(|(_, v)| vec_is_zero(v)))
            .unwrap_or(false)
    }

    /// The algebra spanned by the given independent vectors, with induced
    /// structure constants and Gram. Fails with a witness pair when the
    /// span is not bracket-closed.
    pub fn subalgebra_restrict(&self, basis: &[Vec<S>]) -> Result<MetricLieAlgebra<S>, AlgebraError> {
        let k = basis.len();
        for v in basis {
            if v.len() != self.dim {
                return Err(AlgebraError::DimensionError {
                    expected: self.dim,
                    got: v.len(),
                });
            }
        }
        // Columns are the basis vectors; expansion solves span * x = w.
        let span = Mat::from_fn(self.dim, k, |i, j| basis[j][i].clone());
        let mut gram = Mat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                gram[(i, j)] = self.inner(&basis[i], &basis[j]);
            }
        }
        let mut table = vec![Vec::new(); k * k];
        for i in 0..k {
            for j in (i + 1)..k {
                let w = self.bracket(&basis[i], &basis[j])?;
                let x = span
                    .solve(&w)
                    .ok_or(AlgebraError::NotASubalgebra { witness: (i, j) })?;
                // solve() zero-fills free variables; confirm the residual.
                let back = span.matvec(&x);
                if !vec_is_zero(&crate::linalg::vec_sub(&back, &w)) {
                    return Err(AlgebraError::NotASubalgebra { witness: (i, j) });
                }
                let sparse: Vec<(usize, S)> = x
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                table[j * k + i] = sparse.iter().map(|(m, c)| (*m, -(c.clone()))).collect();
                table[i * k + j] = sparse;
            }
        }
        MetricLieAlgebra::from_table(k, table, gram)
    }

    /// Length of the lower central series (1 for abelian), `None` when the
    /// series stalls at a nonzero term.
    pub fn nilpotency_degree(&self) -> Option<usize> {
        let mut current: Vec<Vec<S>> = (0..self.dim).map(|i| self.basis_vector(i)).collect();
        let mut degree = 0;
        loop {
            degree += 1;
            let mut next: Vec<Vec<S>> = Vec::new();
            for i in 0..self.dim {
                for w in &current {
                    let b = self.bracket(&self.basis_vector(i), w).unwrap();
                    if !vec_is_zero(&b) {
                        next.push(b);
                    }
                }
            }
            if next.is_empty() {
                return Some(degree);
            }
            let mut red = Mat::from_rows(next);
            let pivots = red.rref();
            let basis: Vec<Vec<S>> = (0..pivots.len()).map(|ri| red.row(ri).to_vec()).collect();
            // Lower central terms are ideals, so a dimension that fails to
            // drop means the series stabilized away from zero.
            if basis.len() >= current.len() {
                return None;
            }
            current = basis;
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_degree().is_some()
    }

    /// Same structure constants with a different inner product.
    pub fn with_gram(&self, gram: Mat<S>) -> Result<MetricLieAlgebra<S>, AlgebraError> {
        MetricLieAlgebra::from_table(self.dim, self.table.clone(), gram)
    }

    /// Replace the Gram matrix by `t * G` (t > 0): same algebra, rescaled
    /// metric.
    pub fn scale_gram(&self, t: &S) -> MetricLieAlgebra<S> {
        assert!(t.is_positive());
        let gram = self.gram.scale(t);
        let gram_inv = self.gram_inv.scale(&t.recip());
        MetricLieAlgebra {
            dim: self.dim,
            table: self.table.clone(),
            gram,
            gram_inv,
        }
    }

    /// Gram-orthogonal projection coefficients onto a line `R v`.
    pub fn project_line(&self, v: &[S], x: &[S]) -> S {
        self.inner(x, v) / self.inner(v, v)
    }

    pub fn dump(&self) -> AlgebraDump {
        let mut c = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                for (k, val) in &self.table[i * self.dim + j] {
                    c.push((i, j, *k, val.render()));
                }
            }
        }
        let gram = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.gram[(i, j)].render()).collect())
            .collect();
        AlgebraDump {
            dim: self.dim,
            mode: if S::exact() { "exact" } else { "float" }.into(),
            c,
            gram,
        }
    }
}

impl<S: Scalar> std::fmt::Debug for MetricLieAlgebra<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MetricLieAlgebra(dim {})", self.dim)
    }
}

impl MetricLieAlgebra<Exact> {
    pub fn to_float(&self) -> MetricLieAlgebra<Dd> {
        let conv = |x: &Exact| -> Dd {
            let hi = <Dd as Scalar>::from_rational(x.rat_part());
            if x.is_rational() {
                hi
            } else {
                let b = <Dd as Scalar>::from_rational(x.quad_part());
                hi + b * Dd::from_f64(x.radicand() as f64).sqrt()
            }
        };
        let table = self
            .table
            .iter()
            .map(|cell| cell.iter().map(|(k, v)| (*k, conv(v))).collect())
            .collect();
        let gram = Mat::from_fn(self.dim, self.dim, |i, j| conv(&self.gram[(i, j)]));
        let gram_inv = gram.inverse().expect("positive definite Gram");
        MetricLieAlgebra {
            dim: self.dim,
            table,
            gram,
            gram_inv,
        }
    }

    pub fn from_dump(dump: &AlgebraDump) -> Result<Self, AlgebraError> {
        if dump.mode != "exact" {
            return Err(AlgebraError::ParseError("only exact dumps load".into()));
        }
        let d = dump.dim;
        let mut table = vec![Vec::new(); d * d];
        for (i, j, k, val) in &dump.c {
            let v = parse_exact(val)?;
            table[i * d + j].push((*k, v.clone()));
            table[j * d + i].push((*k, -v));
        }
        let mut gram = Mat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                gram[(i, j)] = parse_exact(&dump.gram[i][j])?;
            }
        }
        MetricLieAlgebra::from_table(d, table, gram)
    }
}

/// Parse the `render()` format of [`Exact`]: `p/q`, `b*sD`, or `a+b*sD`.
pub fn parse_exact(s: &str) -> Result<Exact, AlgebraError> {
    let err = |m: &str| AlgebraError::ParseError(format!("{m}: {s}"));
    let parse_rat = |t: &str| -> Result<BigRational, AlgebraError> {
        BigRational::from_str(t).map_err(|_| err("bad rational"))
    };
    if let Some(star) = s.find("*s") {
        let d: u64 = s[star + 2..].parse().map_err(|_| err("bad radicand"))?;
        let head = &s[..star];
        // Split the rational part off "a+b" at the first sign after the
        // leading character; a negative b renders as "a+-b".
        let split = head
            .char_indices()
            .skip(1)
            .find(|(_, ch)| *ch == '+' || *ch == '-')
            .map(|(idx, _)| idx);
        return match split {
            Some(idx) => {
                let a = parse_rat(&head[..idx])?;
                let b = parse_rat(head[idx..].trim_start_matches('+'))?;
                Ok(Exact::quadratic(a, b, d))
            }
            None => Ok(Exact::quadratic(
                BigRational::from_integer(0.into()),
                parse_rat(head)?,
                d,
            )),
        };
    }
    Ok(Exact::rational(parse_rat(s)?))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraDump {
    pub dim: usize,
    pub mode: String,
    pub c: Vec<(usize, usize, usize, String)>,
    pub gram: Vec<Vec<String>>,
}

/// Borrowed sparse coordinate vector.
pub struct SparseRef<'a, S>(&'a [(usize, S)]);

impl<'a, S: Scalar> SparseRef<'a, S> {
    pub fn to_dense(&self, dim: usize) -> Vec<S> {
        let mut v = vec![S::zero(); dim];
        for (k, c) in self.0 {
            v[*k] += c;
        }
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, S)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

// --- standard small algebras used across tests ------------------------------

/// Heisenberg algebra `[e1, e2] = e3` with orthonormal Gram.
pub fn heisenberg3<S: Scalar>() -> MetricLieAlgebra<S> {
    MetricLieAlgebra::new(
        3,
        |i, j| {
            let mut v = vec![S::zero(); 3];
            if (i, j) == (0, 1) {
                v[2] = S::one();
            }
            v
        },
        Mat::identity(3),
    )
    .unwrap()
}

/// `sl(2, R)` with basis `(H, E, F)` and orthonormal Gram.
pub fn sl2<S: Scalar>() -> MetricLieAlgebra<S> {
    MetricLieAlgebra::new(
        3,
        |i, j| {
            let mut v = vec![S::zero(); 3];
            match (i, j) {
                (0, 1) => v[1] = S::from_i64(2),  // [H,E] = 2E
                (0, 2) => v[2] = S::from_i64(-2), // [H,F] = -2F
                (1, 2) => v[0] = S::one(),        // [E,F] = H
                _ => {}
            }
            v
        },
        Mat::identity(3),
    )
    .unwrap()
}

/// Abelian algebra of the given dimension with identity Gram.
pub fn abelian<S: Scalar>(dim: usize) -> MetricLieAlgebra<S> {
    MetricLieAlgebra::new(dim, |_, _| vec![S::zero(); dim], Mat::identity(dim)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn e(n: i64) -> Exact {
        Exact::from_int(n)
    }

    #[test]
    fn bracket_antisymmetry_and_heisenberg() {
        let h = heisenberg3::<Exact>();
        let x = vec![e(2), e(3), e(5)];
        assert!(vec_is_zero(&h.bracket(&x, &x).unwrap()));
        let b = h
            .bracket(&h.basis_vector(0), &h.basis_vector(1))
            .unwrap();
        assert_eq!(b, vec![e(0), e(0), e(1)]);
    }

    #[test]
    fn sl2_bracket_matches_matrix_commutator() {
        // Oracle: H = diag(1,-1), E = E12, F = E21 as explicit 2x2
        // matrices; [E, F] computed by matrix arithmetic equals H.
        let h = [[1i64, 0], [0, -1]];
        let e_m = [[0i64, 1], [0, 0]];
        let f_m = [[0i64, 0], [1, 0]];
        let comm = |a: [[i64; 2]; 2], b: [[i64; 2]; 2]| {
            let mut c = [[0i64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        c[i][j] += a[i][k] * b[k][j] - b[i][k] * a[k][j];
                    }
                }
            }
            c
        };
        assert_eq!(comm(e_m, f_m), h);
        let alg = sl2::<Exact>();
        let b = alg
            .bracket(&alg.basis_vector(1), &alg.basis_vector(2))
            .unwrap();
        assert_eq!(b, vec![e(1), e(0), e(0)]);
    }

    #[test]
    fn killing_nilpotent_vanishes() {
        let h = heisenberg3::<Exact>();
        let b = h.killing_form();
        assert_eq!(b, Mat::zeros(3, 3));
    }

    #[test]
    fn killing_sl2() {
        // B(H, H) = tr(ad H)^2 = 2^2 + (-2)^2 = 8, frozen by hand.
        let alg = sl2::<Exact>();
        let b = alg.killing_form();
        assert_eq!(b[(0, 0)], e(8));
        assert_eq!(b[(1, 2)], e(4));
        assert_eq!(b[(1, 1)], e(0));
    }

    #[test]
    fn derivation_space_dimensions() {
        // Frozen oracle values: abelian n=2 -> 4 = n^2; Heisenberg -> 6
        // (by hand: D e3 = (d11+d22) e3 forces d13 = d23 = 0, leaving
        // d11,d12,d21,d22,d31,d32 free); sl2 -> 3 (semisimple: Der = ad).
        assert_eq!(abelian::<Exact>(2).derivation_space().len(), 4);
        assert_eq!(heisenberg3::<Exact>().derivation_space().len(), 6);
        assert_eq!(sl2::<Exact>().derivation_space().len(), 3);
    }

    #[test]
    fn derivation_space_members_have_zero_defect() {
        for alg in [heisenberg3::<Exact>(), sl2::<Exact>()] {
            let basis = alg.derivation_space();
            // Random-ish linear combination.
            let mut combo = Mat::zeros(alg.dim(), alg.dim());
            for (idx, d) in basis.iter().enumerate() {
                combo = combo.add(&d.scale(&e(idx as i64 + 2)));
            }
            assert!(alg.is_derivation(&combo));
        }
    }

    #[test]
    fn derivation_defect_examples() {
        let h = heisenberg3::<Exact>();
        // D = 0: zero defect.
        assert!(h.is_derivation(&Mat::zeros(3, 3)));
        // D = id: defect(1,2) = -e3.
        let id = Mat::identity(3);
        let def = h.derivation_defect(&id).unwrap();
        let (_, v) = def.iter().find(|((i, j), _)| (*i, *j) == (0, 1)).unwrap();
        assert_eq!(*v, vec![e(0), e(0), e(-1)]);
        // D = diag(1,1,2): the grading derivation.
        let mut d = Mat::identity(3);
        d[(2, 2)] = e(2);
        assert!(h.is_derivation(&d));
    }

    #[test]
    fn subalgebra_restriction() {
        let h = heisenberg3::<Exact>();
        // span{e1, e3} is abelian.
        let sub = h
            .subalgebra_restrict(&[h.basis_vector(0), h.basis_vector(2)])
            .unwrap();
        assert_eq!(sub.dim(), 2);
        assert!(vec_is_zero(
            &sub.bracket(&sub.basis_vector(0), &sub.basis_vector(1)).unwrap()
        ));
        // span{e1, e2} is not closed; witness (0, 1).
        let err = h
            .subalgebra_restrict(&[h.basis_vector(0), h.basis_vector(1)])
            .unwrap_err();
        assert_eq!(err, AlgebraError::NotASubalgebra { witness: (0, 1) });
    }

    #[test]
    fn restriction_commutes_with_ambient_bracket() {
        let h = heisenberg3::<Exact>();
        let basis = vec![h.basis_vector(1), h.basis_vector(2)];
        let sub = h.subalgebra_restrict(&basis).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let inner = sub
                    .bracket(&sub.basis_vector(i), &sub.basis_vector(j))
                    .unwrap();
                // Push forward and compare with ambient bracket.
                let mut push = vec![e(0); 3];
                for (k, c) in inner.iter().enumerate() {
                    for (a, b) in push.iter_mut().zip(&basis[k]) {
                        let t = c.clone() * b.clone();
                        *a += &t;
                    }
                }
                let amb = h.bracket(&basis[i], &basis[j]).unwrap();
                assert_eq!(push, amb);
            }
        }
    }

    #[test]
    fn nilpotency() {
        assert_eq!(abelian::<Exact>(3).nilpotency_degree(), Some(1));
        assert_eq!(heisenberg3::<Exact>().nilpotency_degree(), Some(2));
        assert_eq!(sl2::<Exact>().nilpotency_degree(), None);
    }

    #[test]
    fn degenerate_gram_rejected() {
        let gram = Mat::from_rows(vec![vec![e(1), e(1)], vec![e(1), e(1)]]);
        let res = MetricLieAlgebra::new(2, |_, _| vec![e(0), e(0)], gram);
        assert_eq!(res.unwrap_err(), AlgebraError::GramNotPositiveDefinite);
    }

    #[test]
    fn dump_roundtrip_bit_exact() {
        let alg = sl2::<Exact>();
        let dump = alg.dump();
        let json = serde_json::to_string(&dump).unwrap();
        let back = MetricLieAlgebra::from_dump(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.dump(), dump);
    }

    #[test]
    fn parse_exact_forms() {
        assert_eq!(parse_exact("3/4").unwrap(), Exact::ratio(3, 4));
        assert_eq!(parse_exact("-2").unwrap(), Exact::from_int(-2));
        let v = parse_exact("1/2*s2").unwrap();
        assert_eq!(v.clone() * v, Exact::ratio(1, 2));
        let w = parse_exact("1+-1*s2").unwrap();
        assert!(w.is_negative());
    }
}
