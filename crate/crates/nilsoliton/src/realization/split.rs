//! Split real forms on an abstract Chevalley basis.
//!
//! Basis `{h_i} u {e_r : r in Sigma}` with
//!
//! * `[h_i, e_r] = <r, a_i^v> e_r`,
//! * `[e_r, e_{-r}] = h_r` (the coroot),
//! * `[e_r, e_s] = N_{r,s} e_{r+s}` with `N_{r,s} = +-(p+1)`.
//!
//! Signs are seeded on extraspecial pairs (`+` on the minimal first
//! member) and propagated by the zero-sum and Jacobi relations; they are
//! never taken from a table. The assembled algebra re-verifies the Jacobi
//! identity exactly, so a propagation bug cannot survive construction —
//! this is the detection point the `ConstructionError` variant reports.
//!
//! The Cartan involution is `theta(e_r) = -e_{-r}`, `theta(h) = -h`, and
//! `f_r := -theta(e_r) = e_{-r}` completes the `{h, e, f}` presentation.

use super::{CartanPackage, RealizationError};
use crate::linalg::Mat;
use crate::rootsys::{build_root_system, cartan_integer, Root, SimpleSystem};
use crate::scalar::{Exact, Scalar};
use std::collections::BTreeMap;

/// Signed root: positive roots as generated, negatives mirrored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct SRoot(Vec<i64>);

impl SRoot {
    fn neg(&self) -> SRoot {
        SRoot(self.0.iter().map(|c| -c).collect())
    }
    fn add(&self, other: &SRoot) -> SRoot {
        SRoot(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

pub fn build(simple: &SimpleSystem) -> Result<CartanPackage, RealizationError> {
    let cerr = |m: String| RealizationError::ConstructionError(m);
    if simple.doubled_short {
        return Err(RealizationError::UnsupportedRealForm(
            "split forms exist for reduced systems only".into(),
        ));
    }
    let data = build_root_system(simple).map_err(|e| cerr(format!("{e}")))?;
    let rank = simple.rank;
    let positives: Vec<SRoot> = data
        .positive_roots
        .iter()
        .map(|r| SRoot(r.coords.clone()))
        .collect();
    let mut all: Vec<SRoot> = positives.clone();
    all.extend(positives.iter().map(|r| r.neg()));
    let index: BTreeMap<SRoot, usize> = all
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), i))
        .collect();
    let is_root = |r: &SRoot| index.contains_key(r);
    let len2 = |r: &SRoot| -> Exact {
        Exact::rational(simple.inner(&r.0, &r.0))
    };

    // String count p(r, s) = max k with s - k r a root.
    let string_p = |r: &SRoot, s: &SRoot| -> i64 {
        let mut k = 0i64;
        loop {
            let probe = SRoot(
                s.0.iter()
                    .zip(&r.0)
                    .map(|(a, b)| a - (k + 1) * b)
                    .collect(),
            );
            if probe.is_zero() || !is_root(&probe) {
                return k;
            }
            k += 1;
        }
    };

    // --- determine the structure constants N ---------------------------
    let mut n_const: BTreeMap<(usize, usize), Exact> = BTreeMap::new();
    let pairs: Vec<(usize, usize)> = {
        let mut v = Vec::new();
        for (i, r) in all.iter().enumerate() {
            for (j, s) in all.iter().enumerate() {
                if i != j && !r.add(s).is_zero() && is_root(&r.add(s)) {
                    v.push((i, j));
                }
            }
        }
        v
    };

    // Seed: extraspecial pairs get +(p+1). For each non-simple positive
    // root the extraspecial pair is the decomposition with the minimal
    // first member in (level, coords) order.
    for rho in &positives {
        let mut best: Option<(usize, usize)> = None;
        for (pi, a) in positives.iter().enumerate() {
            let b = SRoot(rho.0.iter().zip(&a.0).map(|(r, x)| r - x).collect());
            if b.0.iter().all(|&c| c >= 0) && !b.is_zero() && is_root(&b) {
                let bi = index[&b];
                match best {
                    None => best = Some((pi, bi)),
                    Some((cur, _)) => {
                        if positives[pi] < positives[cur].clone() {
                            best = Some((pi, bi));
                        }
                    }
                }
            }
        }
        if let Some((ai, bi)) = best {
            let p = string_p(&all[ai], &all[bi]);
            n_const.insert((ai, bi), Exact::from_int(p + 1));
        }
    }

    // Propagate by antisymmetry, negation, zero-sum triples and Jacobi.
    loop {
        let mut progress = false;
        let known = |m: &BTreeMap<(usize, usize), Exact>, i: usize, j: usize| m.get(&(i, j)).cloned();
        let insert = |m: &mut BTreeMap<(usize, usize), Exact>,
                          i: usize,
                          j: usize,
                          v: Exact,
                          progress: &mut bool| {
            match m.get(&(i, j)) {
                Some(old) => assert_eq!(*old, v, "inconsistent structure constant"),
                None => {
                    m.insert((i, j), v);
                    *progress = true;
                }
            }
        };
        // R1 / R2: antisymmetry and negation.
        for &(i, j) in &pairs {
            if let Some(v) = known(&n_const, i, j) {
                insert(&mut n_const, j, i, -v.clone(), &mut progress);
                let (ni, nj) = (index[&all[i].neg()], index[&all[j].neg()]);
                insert(&mut n_const, ni, nj, -v, &mut progress);
            }
        }
        // R3: zero-sum triples A + B + C = 0:
        // N_{B,C} = N_{A,B} |A|^2/|C|^2, N_{C,A} = N_{A,B} |B|^2/|C|^2.
        for (ai, a) in all.iter().enumerate() {
            for (bi, b) in all.iter().enumerate() {
                let ab = a.add(b);
                if ab.is_zero() || !is_root(&ab) {
                    continue;
                }
                let c = ab.neg();
                let ci = index[&c];
                if let Some(v) = known(&n_const, ai, bi) {
                    let la = len2(a);
                    let lb = len2(b);
                    let lc = len2(&c);
                    insert(
                        &mut n_const,
                        bi,
                        ci,
                        v.clone() * la * lc.clone().recip(),
                        &mut progress,
                    );
                    insert(&mut n_const, ci, ai, v * lb * lc.recip(), &mut progress);
                }
            }
        }
        // R4: Jacobi on triples with A+B+D a root and no opposite pair:
        // N_{A,B} N_{A+B,D} + N_{B,D} N_{B+D,A} + N_{D,A} N_{D+A,B} = 0.
        for (ai, a) in all.iter().enumerate() {
            for (bi, b) in all.iter().enumerate() {
                if ai == bi || a.add(b).is_zero() {
                    continue;
                }
                for (di, dd) in all.iter().enumerate() {
                    if di == ai || di == bi {
                        continue;
                    }
                    if b.add(dd).is_zero() || dd.add(a).is_zero() {
                        continue;
                    }
                    let total = a.add(b).add(dd);
                    if total.is_zero() || !is_root(&total) {
                        continue;
                    }
                    // Term list: (first pair, outer pair)
                    let mut terms = Vec::new();
                    for (x, y, z, xi, yi, zi) in [
                        (a, b, dd, ai, bi, di),
                        (b, dd, a, bi, di, ai),
                        (dd, a, b, di, ai, bi),
                    ] {
                        let xy = x.add(y);
                        let _ = z;
                        if is_root(&xy) {
                            terms.push(((xi, yi), (index[&xy], zi)));
                        }
                    }
                    // Solve when exactly one factor is unknown.
                    let mut unknown: Option<(usize, usize)> = None;
                    let mut unknown_partner = Exact::zero();
                    let mut acc = Exact::zero();
                    let mut solvable = true;
                    for (p1, p2) in &terms {
                        let v1 = known(&n_const, p1.0, p1.1);
                        let v2 = known(&n_const, p2.0, p2.1);
                        match (v1, v2) {
                            (Some(x), Some(y)) => {
                                let t = x * y;
                                acc += &t;
                            }
                            (None, Some(y)) if unknown.is_none() && !Scalar::is_zero(&y) => {
                                unknown = Some(*p1);
                                unknown_partner = y;
                            }
                            (Some(x), None) if unknown.is_none() && !Scalar::is_zero(&x) => {
                                unknown = Some(*p2);
                                unknown_partner = x;
                            }
                            _ => {
                                solvable = false;
                                break;
                            }
                        }
                    }
                    if solvable {
                        if let Some(key) = unknown {
                            let v = -(acc * unknown_partner.recip());
                            insert(&mut n_const, key.0, key.1, v, &mut progress);
                        }
                    }
                }
            }
        }
        if !progress {
            break;
        }
    }
    for &(i, j) in &pairs {
        let v = n_const
            .get(&(i, j))
            .ok_or_else(|| cerr("sign propagation did not determine all constants".into()))?;
        let p = string_p(&all[i], &all[j]);
        let expect = Exact::from_int(p + 1);
        if !(v.clone() * v.clone() - expect.clone() * expect).is_zero() {
            return Err(cerr(format!(
                "|N| != p+1 at pair ({:?}, {:?})",
                all[i].0, all[j].0
            )));
        }
    }

    // --- assemble the algebra ------------------------------------------
    let nroots = all.len();
    let dim = rank + nroots;
    let e_idx = |k: usize| rank + k;
    // Coroot expansion over the simple coroots: for r = sum m_i a_i,
    // r^v = sum m_i |a_i|^2 / |r|^2 a_i^v.
    let coroot_coeffs = |r: &SRoot| -> Vec<Exact> {
        let l2 = len2(r);
        (0..rank)
            .map(|i| {
                Exact::from_int(r.0[i])
                    * Exact::rational(simple.squared_lengths[i].clone())
                    * l2.clone().recip()
            })
            .collect()
    };
    let root_of = |k: usize| Root {
        coords: all[k].0.clone(),
    };

    let bracket = |i: usize, j: usize| -> Vec<Exact> {
        let mut out = vec![Exact::zero(); dim];
        if i < rank && j < rank {
            return out; // Cartan is abelian
        }
        if i < rank {
            // [h_i, e_s] = <s, a_i^v> e_s
            let k = j - rank;
            let a_i = Root::simple(rank, i);
            let coeff = cartan_integer(simple, &a_i, &root_of(k));
            out[e_idx(k)] = Exact::from_int(coeff);
            return out;
        }
        if j < rank {
            let k = i - rank;
            let a_j = Root::simple(rank, j);
            let coeff = -cartan_integer(simple, &a_j, &root_of(k));
            out[e_idx(k)] = Exact::from_int(coeff);
            return out;
        }
        let (ki, kj) = (i - rank, j - rank);
        let sum = all[ki].add(&all[kj]);
        if sum.is_zero() {
            // [e_r, e_{-r}] = h_r
            let coeffs = coroot_coeffs(&all[ki]);
            out[..rank].clone_from_slice(&coeffs);
            return out;
        }
        if let Some(&ks) = index.get(&sum) {
            out[e_idx(ks)] = n_const[&(ki, kj)].clone();
        }
        out
    };

    // theta: h -> -h, e_r -> -e_{-r}.
    let mut theta = Mat::zeros(dim, dim);
    for i in 0..rank {
        theta[(i, i)] = Exact::from_int(-1);
    }
    for (k, r) in all.iter().enumerate() {
        let nk = index[&r.neg()];
        theta[(e_idx(nk), e_idx(k))] = Exact::from_int(-1);
    }
    let a_basis: Vec<Vec<Exact>> = (0..rank)
        .map(|i| {
            let mut v = vec![Exact::zero(); dim];
            v[i] = Exact::from_int(1);
            v
        })
        .collect();
    CartanPackage::assemble(
        &format!("split:{}", simple.label()),
        dim,
        bracket,
        theta,
        a_basis,
        &Exact::from_int(1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::restricted_decomposition;
    use crate::rootsys::Kind;

    fn split_of(kind: Kind, rank: usize) -> CartanPackage {
        build(&SimpleSystem::new(kind, rank).unwrap()).unwrap()
    }

    #[test]
    fn a2_split_is_sl3r_shaped() {
        let pkg = split_of(Kind::A, 2);
        assert_eq!(pkg.g.dim(), 8);
        let dec = restricted_decomposition(&pkg).unwrap();
        assert_eq!(dec.roots.simple.kind, Kind::A);
        assert!((0..dec.root_count()).all(|i| dec.multiplicity(i) == 1));
        assert!(dec.k0_basis.is_empty());
    }

    #[test]
    fn b2_split_dimension_ten() {
        // 2 * (4 positive roots) + rank 2.
        let pkg = split_of(Kind::B, 2);
        assert_eq!(pkg.g.dim(), 10);
        let dec = restricted_decomposition(&pkg).unwrap();
        assert_eq!(dec.roots.simple.kind, Kind::B);
        assert_eq!(dec.root_count(), 4);
    }

    #[test]
    fn g2_split_dimension_fourteen() {
        // 2 * 6 + 2; six positive roots all multiplicity one.
        let pkg = split_of(Kind::G2, 2);
        assert_eq!(pkg.g.dim(), 14);
        let dec = restricted_decomposition(&pkg).unwrap();
        assert_eq!(dec.roots.simple.kind, Kind::G2);
        assert_eq!(dec.root_count(), 6);
        assert!((0..6).all(|i| dec.multiplicity(i) == 1));
    }

    #[test]
    fn larger_split_forms_assemble() {
        for (kind, rank, dim) in [
            (Kind::A, 3, 15),
            (Kind::A, 4, 24),
            (Kind::B, 3, 21),
            (Kind::B, 4, 36),
            (Kind::C, 3, 21),
            (Kind::C, 4, 36),
            (Kind::D, 4, 28),
        ] {
            let pkg = split_of(kind, rank);
            assert_eq!(pkg.g.dim(), dim, "{kind}{rank}");
        }
    }

    #[test]
    fn chevalley_presentation() {
        // e_r, f_r = -theta(e_r), h_r satisfy [e, f] = h, [h, e] = 2e.
        let pkg = split_of(Kind::A, 2);
        let d = pkg.g.dim();
        let rank = 2;
        // First positive root vector lives at index rank.
        let e = pkg.g.basis_vector(rank);
        let f: Vec<Exact> = pkg
            .theta
            .matvec(&e)
            .into_iter()
            .map(|x| -x)
            .collect();
        let h = pkg.g.bracket(&e, &f).unwrap();
        let he = pkg.g.bracket(&h, &e).unwrap();
        let two_e: Vec<Exact> = e.iter().map(|x| x.clone() * Exact::from_int(2)).collect();
        assert_eq!(he, two_e);
        let hf = pkg.g.bracket(&h, &f).unwrap();
        let m2f: Vec<Exact> = f.iter().map(|x| x.clone() * Exact::from_int(-2)).collect();
        assert_eq!(hf, m2f);
        let _ = d;
    }
}
