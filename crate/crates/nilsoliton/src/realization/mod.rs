//! Concrete models of real semisimple Lie algebras with Cartan data.
//!
//! Two constructors feed the rest of the crate:
//!
//! * [`build_matrix_realization`] — classical families realized as
//!   constraint kernels inside real matrices (complex and quaternionic
//!   entries become 2x2 / 4x4 real blocks), with Cartan involution
//!   `theta(X) = -X^T`.
//! * [`build_split_realization`] — split forms on an abstract Chevalley
//!   basis `{h_i} u {e_r, f_r}` with structure constants `+-(p+1)`,
//!   including split G2.
//!
//! Either way the result is a [`CartanPackage`]: the algebra with its
//! `B_theta` inner product, the involution, and a maximal abelian
//! subspace `a` of `p`, ready for the restricted root space decomposition.

pub mod families;
pub mod split;

use crate::algebra::MetricLieAlgebra;
use crate::linalg::{vec_is_zero, Mat};
use crate::rootsys::{
    build_root_system, identify_kind, Kind, Root, RootSystemData, SimpleSystem,
};
use crate::scalar::{Exact, Scalar};
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RealizationError {
    #[error("unsupported real form: {0}")]
    UnsupportedRealForm(String),
    #[error("candidate Cartan subspace is not maximal abelian in p")]
    MaximalityFailure,
    #[error("construction error: {0}")]
    ConstructionError(String),
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
}

/// Identifier of a supported realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealFormDescriptor {
    SlReal(usize),
    SlComplex(usize),
    SlQuaternion(usize),
    SuPQ(usize, usize),
    SoPQ(usize, usize),
    SpPQ(usize, usize),
    SoComplex(usize),
    Split(Kind, usize),
}

/// A realization of `g` with Cartan involution and maximal abelian
/// `a c p`, carrying the invariant form used for root duality.
pub struct CartanPackage {
    pub label: String,
    /// Bracket = realization commutator; Gram = `<X,Y> = -B(X, theta Y)`.
    pub g: MetricLieAlgebra<Exact>,
    pub theta: Mat<Exact>,
    /// Coordinates (in the `g` basis) of a basis of `a`.
    pub a_basis: Vec<Vec<Exact>>,
    /// The invariant form `B` backing the Gram matrix and the duality
    /// `B(H_l, H) = l(H)`; the Killing form up to an optional rational
    /// scale (scaling is observable only through reported constants).
    pub b_form: Mat<Exact>,
}

impl CartanPackage {
    /// Assemble and verify a package from raw structure data.
    ///
    /// `bracket_of(i, j)` gives `[e_i, e_j]` for `i < j`; `theta` is the
    /// involution matrix; `a_basis` spans the candidate Cartan subspace.
    pub fn assemble(
        label: &str,
        dim: usize,
        bracket_of: impl FnMut(usize, usize) -> Vec<Exact>,
        theta: Mat<Exact>,
        a_basis: Vec<Vec<Exact>>,
        b_scale: &Exact,
    ) -> Result<CartanPackage, RealizationError> {
        let cerr = |m: String| RealizationError::ConstructionError(m);
        // First pass with identity Gram runs antisymmetry and Jacobi.
        let probe = MetricLieAlgebra::new(dim, bracket_of, Mat::identity(dim))
            .map_err(|e| cerr(format!("{label}: {e}")))?;
        let b_form = probe.killing_form().scale(b_scale);
        // Gram_{ij} = -B(e_i, theta e_j) = -(B Theta)_{ij}
        let gram = b_form.matmul(&theta).scale(&Exact::from_int(-1));
        if !gram.is_symmetric() {
            return Err(cerr(format!("{label}: B_theta not symmetric")));
        }
        let g = probe
            .with_gram(gram)
            .map_err(|e| cerr(format!("{label}: {e}")))?;
        let pkg = CartanPackage {
            label: label.to_string(),
            g,
            theta,
            a_basis,
            b_form,
        };
        pkg.verify()?;
        Ok(pkg)
    }

    /// Structural checks: `theta^2 = id`, `theta` a bracket automorphism,
    /// `a` abelian with `theta = -id` on it.
    fn verify(&self) -> Result<(), RealizationError> {
        let d = self.g.dim();
        let cerr = |m: &str| RealizationError::ConstructionError(format!("{}: {m}", self.label));
        if self.theta.matmul(&self.theta) != Mat::identity(d) {
            return Err(cerr("theta^2 != id"));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let lhs = self
                    .theta
                    .matvec(&self.g.bracket_basis(i, j).to_dense(d));
                let rhs = self
                    .g
                    .bracket(&self.theta.col(i), &self.theta.col(j))
                    .unwrap();
                if !vec_is_zero(&crate::linalg::vec_sub(&lhs, &rhs)) {
                    return Err(cerr("theta is not an automorphism"));
                }
            }
        }
        for x in &self.a_basis {
            let tx = self.theta.matvec(x);
            if !vec_is_zero(&crate::linalg::vec_add(&tx, x)) {
                return Err(cerr("theta != -id on a"));
            }
            for y in &self.a_basis {
                if !vec_is_zero(&self.g.bracket(x, y).unwrap()) {
                    return Err(cerr("a is not abelian"));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.a_basis.len()
    }

    /// `B(x, y)` under the stored invariant form.
    pub fn b(&self, x: &[Exact], y: &[Exact]) -> Exact {
        crate::linalg::gram_dot(&self.b_form, x, y)
    }

    /// Rescale the invariant form by `t > 0`: the metric side of the
    /// scaling-invariance property. Root duality and lengths rescale
    /// consistently when the decomposition is rebuilt.
    pub fn scale_form(&self, t: &Exact) -> CartanPackage {
        assert!(t.is_positive());
        let b_form = self.b_form.scale(t);
        let gram = b_form.matmul(&self.theta).scale(&Exact::from_int(-1));
        let g = self.g.with_gram(gram).expect("scaled Gram stays pd");
        CartanPackage {
            label: self.label.clone(),
            g,
            theta: self.theta.clone(),
            a_basis: self.a_basis.clone(),
            b_form,
        }
    }
}

/// Dispatch a descriptor to its family constructor.
pub fn build_matrix_realization(
    desc: &RealFormDescriptor,
) -> Result<CartanPackage, RealizationError> {
    match desc {
        RealFormDescriptor::SlReal(n) => families::sl_real(*n),
        RealFormDescriptor::SlComplex(n) => families::sl_complex(*n),
        RealFormDescriptor::SlQuaternion(n) => families::sl_quaternion(*n),
        RealFormDescriptor::SuPQ(p, q) => families::su_pq(*p, *q),
        RealFormDescriptor::SoPQ(p, q) => families::so_pq(*p, *q),
        RealFormDescriptor::SpPQ(p, q) => families::sp_pq(*p, *q),
        RealFormDescriptor::SoComplex(n) => families::so_complex(*n),
        RealFormDescriptor::Split(kind, rank) => {
            let simple = SimpleSystem::new(*kind, *rank).map_err(|e| {
                RealizationError::UnsupportedRealForm(format!("split: {e}"))
            })?;
            build_split_realization(&simple)
        }
    }
}

/// Split form on an abstract Chevalley basis; see [`split`].
pub fn build_split_realization(
    simple: &SimpleSystem,
) -> Result<CartanPackage, RealizationError> {
    split::build(simple)
}

/// A subspace in row-reduced echelon form: expansion of a member vector
/// reads its coefficients off the pivot columns.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub basis: Vec<Vec<Exact>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_vectors(vecs: &[Vec<Exact>]) -> Subspace {
        if vecs.is_empty() {
            return Subspace {
                basis: vec![],
                pivots: vec![],
            };
        }
        let mut m = Mat::from_rows(vecs.to_vec());
        let pivots = m.rref();
        let basis = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
        Subspace { basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coefficients of `v` over the echelon basis, `None` if `v` is
    /// outside the span.
    pub fn expand(&self, v: &[Exact]) -> Option<Vec<Exact>> {
        let coeffs: Vec<Exact> = self.pivots.iter().map(|&c| v[c].clone()).collect();
        let mut residual = v.to_vec();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            crate::linalg::vec_axpy(&mut residual, &(-c.clone()), b);
        }
        if vec_is_zero(&residual) {
            Some(coeffs)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Exact]) -> bool {
        self.expand(v).is_some()
    }
}

/// The restricted root space decomposition of a [`CartanPackage`].
pub struct RestrictedDecomposition {
    /// Canonical abstract system with multiplicities filled in.
    pub roots: RootSystemData,
    /// `B(H_l, H_l)` per positive root, in the realization normalization.
    /// Proportional to the canonical `|l|^2` by one global factor.
    pub len2_b: Vec<Exact>,
    /// `H_l` (g-coordinates) per positive root: `B(H_l, H) = l(H)`.
    pub h_vectors: Vec<Vec<Exact>>,
    /// Basis of `g_l` per positive root, orthogonalized within the space.
    pub pos_spaces: Vec<Vec<Vec<Exact>>>,
    /// Basis of `g_{-l}`: exactly `theta` of the positive one.
    pub neg_spaces: Vec<Vec<Vec<Exact>>>,
    pub k0_basis: Vec<Vec<Exact>>,
    /// Change of basis: columns are `[a | k0 | pos blocks | neg blocks]`.
    decomp_cols: Mat<Exact>,
    decomp_inv: Mat<Exact>,
    /// Column offsets: (a, k0, pos_start per root, neg_start per root).
    a_off: usize,
    k0_off: usize,
    pos_off: Vec<usize>,
    neg_off: Vec<usize>,
}

impl RestrictedDecomposition {
    /// The ratio `len2_b / canonical len2`, constant across roots.
    pub fn length_scale(&self) -> Exact {
        let canon = self.roots.len2(&self.roots.positive_roots[0]);
        self.len2_b[0].clone() * Exact::rational(canon).recip()
    }

    pub fn root_count(&self) -> usize {
        self.roots.positive_roots.len()
    }

    pub fn multiplicity(&self, idx: usize) -> usize {
        self.pos_spaces[idx].len()
    }

    /// Decomposition coordinates of `v` (see `decomp_cols` layout).
    pub fn decompose(&self, v: &[Exact]) -> Vec<Exact> {
        self.decomp_inv.matvec(v)
    }

    pub fn recompose(&self, coords: &[Exact]) -> Vec<Exact> {
        self.decomp_cols.matvec(coords)
    }

    /// `B_theta`-orthogonal projection onto `n = sum of positive root
    /// spaces`. The decomposition blocks are mutually orthogonal, so
    /// zeroing the complementary coordinates is the metric projection.
    pub fn project_n(&self, v: &[Exact]) -> Vec<Exact> {
        self.project_blocks(v, |off| off.0)
    }

    /// Orthogonal projection onto `a`.
    pub fn project_a(&self, v: &[Exact]) -> Vec<Exact> {
        self.project_blocks(v, |off| off.1)
    }

    /// Orthogonal projection onto `k0`.
    pub fn project_k0(&self, v: &[Exact]) -> Vec<Exact> {
        self.project_blocks(v, |off| off.2)
    }

    fn project_blocks(
        &self,
        v: &[Exact],
        select: impl Fn((bool, bool, bool)) -> bool,
    ) -> Vec<Exact> {
        let mut coords = self.decompose(v);
        for (idx, c) in coords.iter_mut().enumerate() {
            let in_a = idx >= self.a_off && idx < self.k0_off;
            let in_k0 = idx >= self.k0_off && idx < self.pos_off[0];
            let in_n = idx >= self.pos_off[0] && idx < self.neg_off[0];
            if !select((in_n, in_a, in_k0)) {
                *c = Exact::zero();
            }
        }
        self.recompose(&coords)
    }

    /// Column range of the `a` block in decomposition coordinates.
    pub fn a_col_range(&self) -> (usize, usize) {
        (self.a_off, self.k0_off)
    }

    /// Column range of the `k0` block.
    pub fn k0_col_range(&self) -> (usize, usize) {
        (self.k0_off, self.pos_off[0])
    }

    /// Column range covering all positive root spaces (the `n` block).
    pub fn n_col_range(&self) -> (usize, usize) {
        (self.pos_off[0], self.neg_off[0])
    }

    /// Column range of the positive root space `idx`.
    pub fn pos_col_range(&self, idx: usize) -> (usize, usize) {
        let start = self.pos_off[idx];
        let end = if idx + 1 < self.pos_off.len() {
            self.pos_off[idx + 1]
        } else {
            self.neg_off[0]
        };
        (start, end)
    }

    /// Index of the positive-root block containing column `col`, if any.
    pub fn pos_block_of_col(&self, col: usize) -> Option<usize> {
        if col < self.pos_off[0] || col >= self.neg_off[0] {
            return None;
        }
        let mut idx = 0;
        for (i, &off) in self.pos_off.iter().enumerate() {
            if col >= off {
                idx = i;
            }
        }
        Some(idx)
    }

    /// The component of `v` in the positive root space `idx`.
    pub fn component_in_pos_space(&self, v: &[Exact], idx: usize) -> Vec<Exact> {
        let coords = self.decompose(v);
        let start = self.pos_off[idx];
        let end = if idx + 1 < self.pos_off.len() {
            self.pos_off[idx + 1]
        } else {
            self.neg_off[0]
        };
        let mut out = vec![Exact::zero(); coords.len()];
        out[start..end].clone_from_slice(&coords[start..end]);
        self.recompose(&out)
    }
}

/// Compute the restricted root space decomposition: simultaneous exact
/// eigenspaces of `ad(H)`, `H` in the `a`-basis, identified against a
/// canonical abstract system.
pub fn restricted_decomposition(
    pkg: &CartanPackage,
) -> Result<RestrictedDecomposition, RealizationError> {
    let d = pkg.g.dim();
    let rank = pkg.rank();
    let nerr = |m: String| RealizationError::NumericalDegeneracy(m);

    // 1. Joint eigenspaces of the commuting family ad(a).
    let full = Subspace::from_vectors(&(0..d).map(|i| pkg.g.basis_vector(i)).collect::<Vec<_>>());
    let mut spaces: Vec<(Vec<Exact>, Subspace)> = vec![(vec![], full)];
    for h in &pkg.a_basis {
        let ad_h = pkg.g.ad(h);
        let mut refined = Vec::new();
        for (weight, space) in spaces {
            let k = space.dim();
            // Restriction matrix of ad_h on the space.
            let mut restr = Mat::zeros(k, k);
            for (j, bas) in space.basis.iter().enumerate() {
                let img = ad_h.matvec(bas);
                let coeffs = space.expand(&img).ok_or_else(|| {
                    nerr("ad(a) does not preserve a joint eigenspace".into())
                })?;
                for (i, c) in coeffs.into_iter().enumerate() {
                    restr[(i, j)] = c;
                }
            }
            // Integer eigenvalue candidates: ad of a +-1/0 diagonal-style
            // element on matrix entries has eigenvalues in [-4, 4].
            let mut found = 0;
            for cand in -4..=4i64 {
                let mu = Exact::from_int(cand);
                let shifted = restr.sub(&Mat::identity(k).scale(&mu));
                let kern = shifted.kernel();
                if kern.is_empty() {
                    continue;
                }
                found += kern.len();
                let vecs: Vec<Vec<Exact>> = kern
                    .iter()
                    .map(|coeffs| {
                        let mut v = vec![Exact::zero(); d];
                        for (c, b) in coeffs.iter().zip(&space.basis) {
                            crate::linalg::vec_axpy(&mut v, c, b);
                        }
                        v
                    })
                    .collect();
                let mut w = weight.clone();
                w.push(mu);
                refined.push((w, Subspace::from_vectors(&vecs)));
            }
            if found != k {
                return Err(nerr(format!(
                    "ad(H) not diagonalizable over candidates (found {found} of {k})"
                )));
            }
        }
        spaces = refined;
    }

    // 2. Separate g_0; check a is maximal abelian in p.
    let zero_w = vec![Exact::zero(); rank];
    let mut g0: Option<Subspace> = None;
    let mut weighted: Vec<(Vec<Exact>, Subspace)> = Vec::new();
    for (w, s) in spaces {
        if w == zero_w {
            g0 = Some(s);
        } else {
            weighted.push((w, s));
        }
    }
    let g0 = g0.ok_or_else(|| nerr("no zero weight space".into()))?;
    for a in &pkg.a_basis {
        if !g0.contains(a) {
            return Err(nerr("a not inside g_0".into()));
        }
    }
    // k0 = theta-fixed part of g_0.
    let mut k0_gens = Vec::new();
    for b in &g0.basis {
        let mut v = pkg.theta.matvec(b);
        for (x, y) in v.iter_mut().zip(b) {
            *x += y;
        }
        if !vec_is_zero(&v) {
            k0_gens.push(v);
        }
    }
    let k0 = Subspace::from_vectors(&k0_gens);
    if k0.dim() + rank != g0.dim() {
        // g_0 meets p outside a: the candidate a was not maximal.
        return Err(RealizationError::MaximalityFailure);
    }

    // 3. Positivity (lexicographic on weight vectors) and +- pairing.
    let sign_of = |w: &[Exact]| -> i32 {
        for c in w {
            let s = c.signum();
            if s != 0 {
                return s;
            }
        }
        0
    };
    let mut pos: Vec<(Vec<Exact>, Subspace)> = Vec::new();
    let mut neg: Vec<(Vec<Exact>, Subspace)> = Vec::new();
    for (w, s) in weighted {
        match sign_of(&w) {
            1 => pos.push((w, s)),
            -1 => neg.push((w, s)),
            _ => return Err(nerr("null nonzero weight".into())),
        }
    }
    if pos.len() != neg.len() {
        return Err(nerr("positive/negative root spaces unpaired".into()));
    }

    // 4. H_l vectors from B-duality on a: solve B(H, A_j) = l(A_j).
    let bgram_a = Mat::from_fn(rank, rank, |i, j| pkg.b(&pkg.a_basis[i], &pkg.a_basis[j]));
    let h_of = |w: &[Exact]| -> Vec<Exact> {
        let coeffs = bgram_a.solve(w).expect("B positive definite on a");
        let mut h = vec![Exact::zero(); d];
        for (c, a) in coeffs.iter().zip(&pkg.a_basis) {
            crate::linalg::vec_axpy(&mut h, c, a);
        }
        h
    };
    let inner_w = |w1: &[Exact], w2: &[Exact]| -> Exact {
        // <l, m> = B(H_l, H_m) = l(H_m): evaluate w1 on h(w2) coefficients.
        let coeffs = bgram_a.solve(w2).expect("pd");
        let mut acc = Exact::zero();
        for (c, v) in coeffs.iter().zip(w1) {
            let t = c.clone() * v.clone();
            acc += &t;
        }
        acc
    };

    // 5. Simple roots: positive roots that are not sums of two positives.
    let weight_set: Vec<&Vec<Exact>> = pos.iter().map(|(w, _)| w).collect();
    let is_root = |w: &[Exact]| weight_set.iter().any(|u| u.as_slice() == w);
    let mut simple_idx = Vec::new();
    for (i, (w, _)) in pos.iter().enumerate() {
        let mut decomposable = false;
        'search: for (w1, _) in &pos {
            for (w2, _) in &pos {
                let sum: Vec<Exact> = w1
                    .iter()
                    .zip(w2)
                    .map(|(a, b)| a.clone() + b.clone())
                    .collect();
                if sum.as_slice() == w.as_slice() {
                    decomposable = true;
                    break 'search;
                }
            }
        }
        if !decomposable {
            simple_idx.push(i);
        }
    }
    if simple_idx.len() != rank {
        return Err(nerr(format!(
            "found {} simple roots at rank {rank}",
            simple_idx.len()
        )));
    }

    // Cartan integers of the computed simples.
    let cartan_of = |i: usize, j: usize| -> i64 {
        let wi = &pos[simple_idx[i]].0;
        let wj = &pos[simple_idx[j]].0;
        let v = inner_w(wi, wj).clone() * Exact::from_int(2) * inner_w(wi, wi).recip();
        let r = v.as_rational().expect("rational Cartan integer").clone();
        assert!(r.is_integer());
        i64::try_from(&r.to_integer()).unwrap()
    };
    let computed_cartan: Vec<Vec<i64>> = (0..rank)
        .map(|i| (0..rank).map(|j| cartan_of(i, j)).collect())
        .collect();
    let has_doubles = pos.iter().any(|(w, _)| {
        let half: Vec<Exact> = w
            .iter()
            .map(|c| c.clone() * Exact::ratio(1, 2))
            .collect();
        is_root(&half)
    });
    let (kind, _, perm) = identify_kind(&computed_cartan, has_doubles).ok_or_else(|| {
        nerr(format!(
            "unrecognized restricted system (cartan {computed_cartan:?})"
        ))
    })?;
    // canonical index -> computed simple position
    let mut canon_simple = vec![0usize; rank];
    for (i, &p) in perm.iter().enumerate() {
        canon_simple[p] = simple_idx[i];
    }

    // 6. Express every positive weight in simple coordinates.
    let simple_weight_mat = Mat::from_fn(rank, rank, |r, c| {
        // columns: canonical simple weights evaluated on a-basis index r
        pos[canon_simple[c]].0[r].clone()
    });
    let coords_of = |w: &[Exact]| -> Result<Vec<i64>, RealizationError> {
        let x = simple_weight_mat
            .solve(w)
            .ok_or_else(|| nerr("root outside simple lattice".into()))?;
        x.iter()
            .map(|c| {
                let r = c
                    .as_rational()
                    .filter(|r| r.is_integer())
                    .ok_or_else(|| nerr("non-integer root coordinate".into()))?;
                Ok(i64::try_from(&r.to_integer()).unwrap())
            })
            .collect()
    };

    // 7. Build the canonical abstract system and align.
    let simple_sys = SimpleSystem::new_unchecked(kind, rank)
        .map_err(|e| nerr(format!("canonical system: {e}")))?;
    let mut data = build_root_system(&simple_sys).map_err(|e| nerr(format!("{e}")))?;
    if data.positive_roots.len() != pos.len() {
        return Err(nerr(format!(
            "generated {} positive roots, realization has {}",
            data.positive_roots.len(),
            pos.len()
        )));
    }
    let mut order: Vec<usize> = Vec::with_capacity(pos.len()); // canonical idx -> pos idx
    let mut pos_coords: Vec<Vec<i64>> = Vec::new();
    for (w, _) in &pos {
        pos_coords.push(coords_of(w)?);
    }
    for root in &data.positive_roots {
        let found = pos_coords
            .iter()
            .position(|c| c == &root.coords)
            .ok_or_else(|| nerr(format!("root {:?} missing in realization", root.coords)))?;
        order.push(found);
    }

    // 8. Multiplicities, H-vectors, lengths; orthogonalize space bases.
    let mut mults = Vec::new();
    let mut h_vectors = Vec::new();
    let mut len2_b = Vec::new();
    let mut pos_spaces = Vec::new();
    let mut neg_spaces = Vec::new();
    for &pi in &order {
        let (w, space) = &pos[pi];
        mults.push(space.dim() as u32);
        h_vectors.push(h_of(w));
        len2_b.push(inner_w(w, w));
        let ortho = orthogonalize(&pkg.g, &space.basis);
        let negs: Vec<Vec<Exact>> = ortho.iter().map(|v| pkg.theta.matvec(v)).collect();
        pos_spaces.push(ortho);
        neg_spaces.push(negs);
    }
    data.set_multiplicities(mults);

    // Verify the length proportionality between B-lengths and canonical.
    let scale = {
        let canon = data.len2(&data.positive_roots[0]);
        len2_b[0].clone() * Exact::rational(canon).recip()
    };
    for (i, root) in data.positive_roots.iter().enumerate() {
        let expect = Exact::rational(data.len2(root)) * scale.clone();
        if expect != len2_b[i] {
            return Err(nerr("root lengths not proportional to canonical".into()));
        }
    }

    // 9. Assemble the change-of-basis for block projections.
    let mut cols: Vec<Vec<Exact>> = Vec::with_capacity(d);
    let a_off = 0usize;
    cols.extend(pkg.a_basis.iter().cloned());
    let k0_off = cols.len();
    cols.extend(k0.basis.iter().cloned());
    let mut pos_off = Vec::new();
    for sp in &pos_spaces {
        pos_off.push(cols.len());
        cols.extend(sp.iter().cloned());
    }
    let mut neg_off = Vec::new();
    for sp in &neg_spaces {
        neg_off.push(cols.len());
        cols.extend(sp.iter().cloned());
    }
    if cols.len() != d {
        return Err(nerr("decomposition does not fill g".into()));
    }
    let decomp_cols = Mat::from_fn(d, d, |i, j| cols[j][i].clone());
    let decomp_inv = decomp_cols
        .inverse()
        .ok_or_else(|| nerr("decomposition basis singular".into()))?;

    Ok(RestrictedDecomposition {
        roots: data,
        len2_b,
        h_vectors,
        pos_spaces,
        neg_spaces,
        k0_basis: k0.basis,
        decomp_cols,
        decomp_inv,
        a_off,
        k0_off,
        pos_off,
        neg_off,
    })
}

/// Gram-Schmidt within a subspace, unnormalized (rational), followed by a
/// square-free rescale so each vector has square-free `B_theta` norm.
fn orthogonalize(g: &MetricLieAlgebra<Exact>, basis: &[Vec<Exact>]) -> Vec<Vec<Exact>> {
    let mut out: Vec<Vec<Exact>> = Vec::with_capacity(basis.len());
    for v in basis {
        let mut w = v.clone();
        for u in &out {
            let c = g.inner(&w, u) * g.inner(u, u).recip();
            crate::linalg::vec_axpy(&mut w, &(-c), u);
        }
        assert!(!vec_is_zero(&w), "independent input expected");
        // Clear denominators / common factors, then rescale so the norm
        // squared is square-free: w / s where <w,w> = s^2 * f.
        let n2 = g.inner(&w, &w);
        let rat = n2.as_rational().expect("rational norms in exact pipeline");
        if let Some((_, r)) = crate::scalar::rational_squarefree_part(rat) {
            let inv = Exact::rational(r).recip();
            w = w.iter().map(|x| x.clone() * inv.clone()).collect();
        }
        out.push(w);
    }
    out
}

/// True when every positive restricted root space is one-dimensional.
pub fn is_split(dec: &RestrictedDecomposition) -> bool {
    dec.pos_spaces.iter().all(|s| s.len() == 1)
}

/// Convenience: canonical positive root list with multiplicities, for
/// report embedding.
pub fn root_table(dec: &RestrictedDecomposition) -> Vec<(Root, u32, BigRational)> {
    dec.roots
        .positive_roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            (
                r.clone(),
                dec.multiplicity(i) as u32,
                dec.roots.len2(r),
            )
        })
        .collect()
}
