//! Abstract restricted root systems with multiplicities.
//!
//! Generation of the positive roots from a simple system, Cartan integers,
//! root strings, levels, and the summed-string identity used by the mean
//! curvature computation. Multiplicities (`dim g_lambda`) are not known at
//! this level; they are filled in from a concrete realization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootSystemError {
    #[error("unsupported kind/rank: {0}")]
    UnsupportedSystem(String),
    #[error("roots are proportional")]
    ProportionalRoots,
    #[error("multiplicities have not been populated")]
    MultiplicitiesUnset,
}

/// Irreducible kinds supported for restricted root systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    A,
    B,
    C,
    D,
    BC,
    G2,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::A => write!(f, "A"),
            Kind::B => write!(f, "B"),
            Kind::C => write!(f, "C"),
            Kind::D => write!(f, "D"),
            Kind::BC => write!(f, "BC"),
            Kind::G2 => write!(f, "G"),
        }
    }
}

/// A set of simple roots: Cartan matrix plus squared lengths.
///
/// Normalization: the short simple root has squared length 2. Everything
/// downstream is scaling covariant, so this choice is visible only through
/// reported constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleSystem {
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    pub squared_lengths: Vec<BigRational>,
    pub kind: Kind,
    /// BC only: true for the length class whose roots have doubles.
    pub doubled_short: bool,
}

impl SimpleSystem {
    /// Canonical simple system of the given kind and rank (rank <= 4).
    pub fn new(kind: Kind, rank: usize) -> Result<Self, RootSystemError> {
        if rank > 4 {
            return Err(RootSystemError::UnsupportedSystem(format!(
                "{kind}{rank}: rank > 4"
            )));
        }
        Self::new_unchecked(kind, rank)
    }

    /// Like [`SimpleSystem::new`] without the rank cap. Higher ranks are
    /// needed internally as folding ambients (A5, A7, D5).
    pub(crate) fn new_unchecked(kind: Kind, rank: usize) -> Result<Self, RootSystemError> {
        let bad = |m: &str| RootSystemError::UnsupportedSystem(format!("{kind}{rank}: {m}"));
        let two = BigRational::from_integer(BigInt::from(2));
        let four = BigRational::from_integer(BigInt::from(4));
        let chain = |n: usize| -> Vec<Vec<i64>> {
            let mut a = vec![vec![0i64; n]; n];
            for (i, row) in a.iter_mut().enumerate() {
                row[i] = 2;
            }
            for i in 0..n.saturating_sub(1) {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
            a
        };
        let (cartan, lens, doubled) = match kind {
            Kind::A => {
                if rank < 1 {
                    return Err(bad("rank >= 1 required"));
                }
                (chain(rank), vec![two.clone(); rank], false)
            }
            Kind::B | Kind::BC => {
                if kind == Kind::BC && rank == 1 {
                    // BC1: one short simple root with a double.
                    (vec![vec![2]], vec![two.clone()], true)
                } else {
                    if rank < 2 {
                        return Err(bad("rank >= 2 required"));
                    }
                    let mut a = chain(rank);
                    a[rank - 1][rank - 2] = -2;
                    let mut lens = vec![four.clone(); rank];
                    lens[rank - 1] = two.clone();
                    (a, lens, kind == Kind::BC)
                }
            }
            Kind::C => {
                if rank < 2 {
                    return Err(bad("rank >= 2 required"));
                }
                let mut a = chain(rank);
                a[rank - 2][rank - 1] = -2;
                let mut lens = vec![two.clone(); rank];
                lens[rank - 1] = four.clone();
                (a, lens, false)
            }
            Kind::D => {
                if rank < 4 {
                    return Err(bad("rank >= 4 required"));
                }
                let mut a = chain(rank - 1);
                for row in a.iter_mut() {
                    row.push(0);
                }
                let mut last = vec![0i64; rank];
                last[rank - 1] = 2;
                a.push(last);
                a[rank - 3][rank - 1] = -1;
                a[rank - 1][rank - 3] = -1;
                (a, vec![two.clone(); rank], false)
            }
            Kind::G2 => {
                if rank != 2 {
                    return Err(bad("rank must be 2"));
                }
                let a = vec![vec![2, -1], vec![-3, 2]];
                let six = BigRational::from_integer(BigInt::from(6));
                (a, vec![six, two.clone()], false)
            }
        };
        let sys = SimpleSystem {
            rank,
            cartan,
            squared_lengths: lens,
            kind,
            doubled_short: doubled,
        };
        sys.check_consistency();
        Ok(sys)
    }

    /// `A_ij |a_i|^2 = A_ji |a_j|^2` (both equal `2<a_i, a_j>`).
    fn check_consistency(&self) {
        for i in 0..self.rank {
            assert_eq!(self.cartan[i][i], 2);
            for j in 0..self.rank {
                if i == j {
                    continue;
                }
                assert!((-3..=0).contains(&self.cartan[i][j]));
                assert_eq!((self.cartan[i][j] == 0), (self.cartan[j][i] == 0));
                let lhs = &self.squared_lengths[i]
                    * BigRational::from_integer(BigInt::from(self.cartan[i][j]));
                let rhs = &self.squared_lengths[j]
                    * BigRational::from_integer(BigInt::from(self.cartan[j][i]));
                assert_eq!(lhs, rhs, "length/Cartan inconsistency at ({i},{j})");
            }
        }
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.kind, self.rank)
    }

    /// `<a_i, a_j>` = `A_ij |a_i|^2 / 2`.
    pub fn simple_inner(&self, i: usize, j: usize) -> BigRational {
        &self.squared_lengths[i] * BigRational::new(BigInt::from(self.cartan[i][j]), BigInt::from(2))
    }

    /// Inner product of two coordinate vectors over the simple roots.
    pub fn inner(&self, x: &[i64], y: &[i64]) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..self.rank {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                if y[j] == 0 {
                    continue;
                }
                acc += self.simple_inner(i, j)
                    * BigRational::from_integer(BigInt::from(x[i] * y[j]));
            }
        }
        acc
    }

    /// Shortest squared length among the simple roots.
    pub fn short_len2(&self) -> BigRational {
        self.squared_lengths.iter().min().unwrap().clone()
    }
}

/// A positive root with integer coordinates over the simple roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub coords: Vec<i64>,
}

impl Root {
    pub fn simple(rank: usize, i: usize) -> Self {
        let mut coords = vec![0i64; rank];
        coords[i] = 1;
        Root { coords }
    }

    pub fn level(&self) -> i64 {
        self.coords.iter().sum()
    }

    pub fn add(&self, other: &Root) -> Root {
        Root {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scaled(&self, k: i64) -> Root {
        Root {
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn is_proportional_to(&self, other: &Root) -> bool {
        // Both vectors are nonzero with all-nonnegative coords here.
        let mut ratio: Option<(i64, i64)> = None;
        for (&a, &b) in self.coords.iter().zip(&other.coords) {
            match (a, b) {
                (0, 0) => {}
                (0, _) | (_, 0) => return false,
                (a, b) => match ratio {
                    None => ratio = Some((a, b)),
                    Some((p, q)) => {
                        if a * q != b * p {
                            return false;
                        }
                    }
                },
            }
        }
        true
    }
}

/// The positive roots of a system, ordered by (level, coords), with
/// optional multiplicities.
#[derive(Debug, Clone)]
pub struct RootSystemData {
    pub simple: SimpleSystem,
    pub positive_roots: Vec<Root>,
    multiplicities: Option<Vec<u32>>,
}

/// Generate the positive roots of a simple system by string closure.
///
/// Standard level-by-level generation: for a known positive root `l` and a
/// simple root `a`, `l + a` is a root iff `q = p - A(a, l) > 0` where `p`
/// counts how far the string extends backwards. BC systems then gain the
/// doubles `2l` of every shortest-length root.
pub fn build_root_system(simple: &SimpleSystem) -> Result<RootSystemData, RootSystemError> {
    let rank = simple.rank;
    let mut roots: Vec<Root> = (0..rank).map(|i| Root::simple(rank, i)).collect();
    let mut seen: std::collections::HashSet<Vec<i64>> =
        roots.iter().map(|r| r.coords.clone()).collect();
    let mut frontier = roots.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for lam in &frontier {
            for i in 0..rank {
                let alpha = Root::simple(rank, i);
                if lam.is_proportional_to(&alpha) {
                    // The doubled roots of BC systems are appended at the
                    // end; within the reduced part nothing grows here.
                    continue;
                }
                // p: steps backwards along alpha while staying a root.
                let mut p = 0i64;
                loop {
                    let mut back = lam.coords.clone();
                    back[i] -= p + 1;
                    if back[i] < 0 || !seen.contains(&back) {
                        break;
                    }
                    p += 1;
                }
                let a_int = cartan_integer_coords(simple, &alpha.coords, &lam.coords);
                let q = p - a_int;
                if q > 0 {
                    let up = lam.add(&alpha);
                    if seen.insert(up.coords.clone()) {
                        roots.push(up.clone());
                        next.push(up);
                    }
                }
            }
        }
        frontier = next;
    }
    if simple.doubled_short {
        let short = simple.short_len2();
        let mut doubles = Vec::new();
        for r in &roots {
            if simple.inner(&r.coords, &r.coords) == short {
                let d = r.scaled(2);
                if seen.insert(d.coords.clone()) {
                    doubles.push(d);
                }
            }
        }
        roots.extend(doubles);
    }
    roots.sort_by_key(|r| (r.level(), r.coords.clone()));
    Ok(RootSystemData {
        simple: simple.clone(),
        positive_roots: roots,
        multiplicities: None,
    })
}

/// `A(a, l) = 2 <a, l> / |a|^2`, always an integer for roots.
pub fn cartan_integer(simple: &SimpleSystem, alpha: &Root, lambda: &Root) -> i64 {
    cartan_integer_coords(simple, &alpha.coords, &lambda.coords)
}

fn cartan_integer_coords(simple: &SimpleSystem, alpha: &[i64], lambda: &[i64]) -> i64 {
    let num = simple.inner(alpha, lambda) * BigRational::from_integer(BigInt::from(2));
    let den = simple.inner(alpha, alpha);
    let q = num / den;
    assert!(q.is_integer(), "Cartan integer not integral");
    let v = q.to_integer();
    i64::try_from(&v).expect("Cartan integer out of range")
}

impl RootSystemData {
    pub fn rank(&self) -> usize {
        self.simple.rank
    }

    pub fn contains(&self, coords: &[i64]) -> bool {
        let all_nonneg = coords.iter().all(|&c| c >= 0);
        let all_nonpos = coords.iter().all(|&c| c <= 0);
        let probe: Vec<i64> = if all_nonneg {
            coords.to_vec()
        } else if all_nonpos {
            coords.iter().map(|&c| -c).collect()
        } else {
            return false;
        };
        if probe.iter().all(|&c| c == 0) {
            return false;
        }
        self.positive_roots.iter().any(|r| r.coords == probe)
    }

    pub fn index_of(&self, root: &Root) -> Option<usize> {
        self.positive_roots.iter().position(|r| r == root)
    }

    pub fn len2(&self, root: &Root) -> BigRational {
        self.simple.inner(&root.coords, &root.coords)
    }

    pub fn is_simple(&self, root: &Root) -> bool {
        root.level() == 1
    }

    pub fn simple_roots(&self) -> Vec<Root> {
        (0..self.simple.rank)
            .map(|i| Root::simple(self.simple.rank, i))
            .collect()
    }

    pub fn set_multiplicities(&mut self, mults: Vec<u32>) {
        assert_eq!(mults.len(), self.positive_roots.len());
        assert!(mults.iter().all(|&m| m > 0));
        self.multiplicities = Some(mults);
    }

    pub fn multiplicity(&self, root: &Root) -> Result<u32, RootSystemError> {
        let mults = self
            .multiplicities
            .as_ref()
            .ok_or(RootSystemError::MultiplicitiesUnset)?;
        let idx = self
            .index_of(root)
            .unwrap_or_else(|| panic!("root {:?} not in system", root.coords));
        Ok(mults[idx])
    }

    /// `dim g_{2a}`, zero when `2a` is not a root.
    pub fn multiplicity_double(&self, root: &Root) -> Result<u32, RootSystemError> {
        if self.multiplicities.is_none() {
            return Err(RootSystemError::MultiplicitiesUnset);
        }
        match self.index_of(&root.scaled(2)) {
            Some(i) => Ok(self.multiplicities.as_ref().unwrap()[i]),
            None => Ok(0),
        }
    }

    pub fn has_multiplicities(&self) -> bool {
        self.multiplicities.is_some()
    }

    /// Largest `(p, q)` with `l - p a, ..., l + q a` all roots.
    pub fn root_string(&self, alpha: &Root, lambda: &Root) -> Result<(i64, i64), RootSystemError> {
        if alpha.is_proportional_to(lambda) {
            return Err(RootSystemError::ProportionalRoots);
        }
        let step = |dir: i64| -> i64 {
            let mut k = 0;
            loop {
                let probe: Vec<i64> = lambda
                    .coords
                    .iter()
                    .zip(&alpha.coords)
                    .map(|(l, a)| l + dir * (k + 1) * a)
                    .collect();
                if !self.contains(&probe) {
                    break;
                }
                k += 1;
            }
            k
        };
        let p = step(-1);
        let q = step(1);
        debug_assert_eq!(
            p - q,
            cartan_integer(&self.simple, alpha, lambda),
            "string length must satisfy p - q = A(alpha, lambda)"
        );
        Ok((p, q))
    }

    /// Both sides of the summed-string identity
    /// `sum_gamma dim g_gamma A(a, gamma) = 2 dim g_a + 4 dim g_{2a}`
    /// for a simple root `a`. The caller asserts equality.
    pub fn sum_strings_identity(&self, alpha: &Root) -> Result<(i64, i64), RootSystemError> {
        if self.multiplicities.is_none() {
            return Err(RootSystemError::MultiplicitiesUnset);
        }
        assert!(self.is_simple(alpha), "alpha must be simple");
        let mut lhs = 0i64;
        for gamma in &self.positive_roots {
            let m = self.multiplicity(gamma)? as i64;
            lhs += m * cartan_integer(&self.simple, alpha, gamma);
        }
        let rhs = 2 * self.multiplicity(alpha)? as i64 + 4 * self.multiplicity_double(alpha)? as i64;
        Ok((lhs, rhs))
    }

    /// Reduced positive roots (doubles excluded).
    pub fn reduced_positive_roots(&self) -> Vec<Root> {
        self.positive_roots
            .iter()
            .filter(|r| {
                let half: Option<Vec<i64>> = r
                    .coords
                    .iter()
                    .map(|&c| if c % 2 == 0 { Some(c / 2) } else { None })
                    .collect();
                match half {
                    Some(h) if self.contains(&h) => false,
                    _ => true,
                }
            })
            .cloned()
            .collect()
    }

    pub fn serializable(&self) -> RootSystemDump {
        let mults = self.multiplicities.clone();
        let reduced = self.reduced_positive_roots();
        let roots = reduced
            .iter()
            .map(|r| {
                let idx = self.index_of(r).unwrap();
                let mult = mults.as_ref().map(|m| m[idx]).unwrap_or(0);
                let mult2 = if self.multiplicities.is_some() {
                    self.multiplicity_double(r).unwrap()
                } else {
                    0
                };
                RootDump {
                    coords: r.coords.clone(),
                    length2: self.len2(r).to_string(),
                    mult,
                    mult2,
                }
            })
            .collect();
        RootSystemDump {
            kind: self.simple.label(),
            rank: self.simple.rank,
            roots,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RootDump {
    pub coords: Vec<i64>,
    pub length2: String,
    pub mult: u32,
    pub mult2: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RootSystemDump {
    pub kind: String,
    pub rank: usize,
    pub roots: Vec<RootDump>,
}

/// Match a computed pairing matrix against the canonical kinds, returning
/// the kind and the permutation sending computed index -> canonical index.
///
/// `cartan[i][j]` must already be the Cartan integers of the computed
/// simple roots; `has_doubles` distinguishes BC from B.
pub fn identify_kind(
    cartan: &[Vec<i64>],
    has_doubles: bool,
) -> Option<(Kind, usize, Vec<usize>)> {
    let rank = cartan.len();
    let candidates: Vec<Kind> = if has_doubles {
        vec![Kind::BC]
    } else {
        vec![Kind::A, Kind::B, Kind::C, Kind::D, Kind::G2]
    };
    for kind in candidates {
        let Ok(canon) = SimpleSystem::new_unchecked(kind, rank) else {
            continue;
        };
        for perm in permutations(rank) {
            // perm[i] = canonical index of computed root i
            let mut ok = true;
            'outer: for i in 0..rank {
                for j in 0..rank {
                    if cartan[i][j] != canon.cartan[perm[i]][perm[j]] {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            if ok {
                return Some((kind, rank, perm));
            }
        }
    }
    None
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..n {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Sorted map root -> multiplicity, for report embedding.
pub fn multiplicity_table(data: &RootSystemData) -> BTreeMap<Vec<i64>, u32> {
    let mut m = BTreeMap::new();
    if let Some(mults) = &data.multiplicities {
        for (r, &mu) in data.positive_roots.iter().zip(mults) {
            m.insert(r.coords.clone(), mu);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(kind: Kind, rank: usize) -> RootSystemData {
        build_root_system(&SimpleSystem::new(kind, rank).unwrap()).unwrap()
    }

    /// Independent oracle: generate the root system as the closure of the
    /// simple roots under all simple reflections
    /// `s_i(v) = v - A(a_i, v) a_i`, which never consults the string
    /// closure used by the implementation. BC doubles come from also
    /// reflecting twice the shortest simples.
    fn reflection_orbit_positive(simple: &SimpleSystem) -> Vec<Vec<i64>> {
        let rank = simple.rank;
        let mut seeds: Vec<Vec<i64>> = (0..rank)
            .map(|i| Root::simple(rank, i).coords)
            .collect();
        if simple.doubled_short {
            let short = simple.short_len2();
            for i in 0..rank {
                let s = Root::simple(rank, i);
                if simple.inner(&s.coords, &s.coords) == short {
                    seeds.push(s.scaled(2).coords);
                }
            }
        }
        let mut all: std::collections::HashSet<Vec<i64>> = seeds.iter().cloned().collect();
        let mut frontier = seeds;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for v in &frontier {
                for i in 0..rank {
                    let ai = Root::simple(rank, i).coords;
                    let a_int = {
                        let num =
                            simple.inner(&ai, v) * BigRational::from_integer(BigInt::from(2));
                        let den = simple.inner(&ai, &ai);
                        (num / den).to_integer()
                    };
                    let k = i64::try_from(&a_int).unwrap();
                    let mut w = v.clone();
                    w[i] -= k;
                    if all.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        let mut pos: Vec<Vec<i64>> = all
            .into_iter()
            .filter(|v| v.iter().all(|&c| c >= 0) && v.iter().any(|&c| c > 0))
            .collect();
        pos.sort();
        pos
    }

    #[test]
    fn a2_has_three_positive_roots() {
        let d = sys(Kind::A, 2);
        assert_eq!(d.positive_roots.len(), 3);
        assert!(d.contains(&[1, 1]));
    }

    #[test]
    fn b2_positive_roots_match_paper() {
        // lambda + 2 alpha is a root, but not 2 lambda + alpha.
        let d = sys(Kind::B, 2);
        assert_eq!(d.positive_roots.len(), 4);
        assert!(d.contains(&[1, 1]));
        assert!(d.contains(&[1, 2]));
        assert!(!d.contains(&[2, 1]));
    }

    #[test]
    fn counts_match_reflection_oracle() {
        // (kind, rank) -> frozen count from the reflection-orbit oracle.
        for (kind, rank, expected) in [
            (Kind::A, 1, 1),
            (Kind::A, 2, 3),
            (Kind::A, 3, 6),
            (Kind::A, 4, 10),
            (Kind::B, 2, 4),
            (Kind::B, 3, 9),
            (Kind::B, 4, 16),
            (Kind::C, 3, 9),
            (Kind::C, 4, 16),
            (Kind::D, 4, 12),
            (Kind::BC, 2, 6),
            (Kind::BC, 3, 12),
            (Kind::G2, 2, 6),
        ] {
            let simple = SimpleSystem::new(kind, rank).unwrap();
            let built = build_root_system(&simple).unwrap();
            let oracle = reflection_orbit_positive(&simple);
            assert_eq!(
                built.positive_roots.len(),
                expected,
                "{kind}{rank} count vs frozen"
            );
            let mut got: Vec<Vec<i64>> = built
                .positive_roots
                .iter()
                .map(|r| r.coords.clone())
                .collect();
            got.sort();
            assert_eq!(got, oracle, "{kind}{rank} set vs reflection oracle");
        }
    }

    #[test]
    fn bc2_has_doubled_root() {
        let d = sys(Kind::BC, 2);
        assert_eq!(d.positive_roots.len(), 6);
        // 2*alpha2 and 2*(alpha1+alpha2) are both roots.
        assert!(d.contains(&[0, 2]));
        assert!(d.contains(&[2, 2]));
        assert_eq!(d.reduced_positive_roots().len(), 4);
    }

    #[test]
    fn cartan_integers() {
        let a2 = sys(Kind::A, 2);
        let (a, l) = (Root::simple(2, 0), Root::simple(2, 1));
        assert_eq!(cartan_integer(&a2.simple, &a, &l), -1);
        assert_eq!(cartan_integer(&a2.simple, &l, &a), -1);
        assert_eq!(cartan_integer(&a2.simple, &a, &a), 2);

        // B2: alpha short (index 1), lambda long (index 0).
        let b2 = sys(Kind::B, 2);
        let (lam, al) = (Root::simple(2, 0), Root::simple(2, 1));
        assert_eq!(cartan_integer(&b2.simple, &al, &lam), -2);
        assert_eq!(cartan_integer(&b2.simple, &lam, &al), -1);
    }

    #[test]
    fn root_strings() {
        let a2 = sys(Kind::A, 2);
        let (a, l) = (Root::simple(2, 0), Root::simple(2, 1));
        assert_eq!(a2.root_string(&a, &l).unwrap(), (0, 1));

        let b2 = sys(Kind::B, 2);
        let (lam, al) = (Root::simple(2, 0), Root::simple(2, 1));
        assert_eq!(b2.root_string(&al, &lam).unwrap(), (0, 2));

        let g2 = sys(Kind::G2, 2);
        let (lam, al) = (Root::simple(2, 0), Root::simple(2, 1));
        assert_eq!(g2.root_string(&al, &lam).unwrap(), (0, 3));

        assert_eq!(
            a2.root_string(&a, &a).unwrap_err(),
            RootSystemError::ProportionalRoots
        );
    }

    #[test]
    fn string_property_all_pairs() {
        for (kind, rank) in [
            (Kind::A, 3),
            (Kind::B, 3),
            (Kind::C, 3),
            (Kind::D, 4),
            (Kind::BC, 2),
            (Kind::G2, 2),
        ] {
            let d = sys(kind, rank);
            for i in 0..rank {
                let a = Root::simple(rank, i);
                for lam in &d.positive_roots {
                    if lam.is_proportional_to(&a) {
                        continue;
                    }
                    let (p, q) = d.root_string(&a, lam).unwrap();
                    assert_eq!(p - q, cartan_integer(&d.simple, &a, lam));
                }
            }
        }
    }

    #[test]
    fn sum_strings_b2() {
        // B2 with m(short) = n, m(long) = 1, alpha the short simple:
        // term-by-term: A over {lambda, alpha, lambda+alpha, lambda+2alpha}
        // = (-2)*1 + 2*n + 0*n + 2*1 = 2n; rhs = 2n.
        for n in [1u32, 2, 3, 6] {
            let mut d = sys(Kind::B, 2);
            let mults: Vec<u32> = d
                .positive_roots
                .clone()
                .iter()
                .map(|r| {
                    if d.len2(r) == d.simple.short_len2() {
                        n
                    } else {
                        1
                    }
                })
                .collect();
            d.set_multiplicities(mults);
            let alpha = Root::simple(2, 1);
            let (lhs, rhs) = d.sum_strings_identity(&alpha).unwrap();
            assert_eq!(lhs, 2 * n as i64);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn sum_strings_a2_a1() {
        let mut a2 = sys(Kind::A, 2);
        a2.set_multiplicities(vec![1; 3]);
        let (lhs, rhs) = a2.sum_strings_identity(&Root::simple(2, 0)).unwrap();
        assert_eq!((lhs, rhs), (2, 2));

        let mut a1 = sys(Kind::A, 1);
        a1.set_multiplicities(vec![1]);
        let (lhs, rhs) = a1.sum_strings_identity(&Root::simple(1, 0)).unwrap();
        assert_eq!((lhs, rhs), (2, 2));
    }

    #[test]
    fn sum_strings_identity_everywhere() {
        // Identity holds for arbitrary string-constant multiplicity
        // assignments (equal along every alpha-string per length class);
        // constant multiplicity per length class is such an assignment.
        for (kind, rank) in [
            (Kind::A, 4),
            (Kind::B, 4),
            (Kind::C, 4),
            (Kind::D, 4),
            (Kind::BC, 3),
            (Kind::G2, 2),
        ] {
            let mut d = sys(kind, rank);
            let lens: Vec<BigRational> =
                d.positive_roots.iter().map(|r| d.len2(r)).collect();
            let mults: Vec<u32> = lens
                .iter()
                .map(|l| {
                    // distinct multiplicity per length class
                    let mut classes: Vec<BigRational> = lens.clone();
                    classes.sort();
                    classes.dedup();
                    (classes.iter().position(|c| c == l).unwrap() as u32 + 1) * 2
                })
                .collect();
            d.set_multiplicities(mults);
            for i in 0..rank {
                let (lhs, rhs) = d.sum_strings_identity(&Root::simple(rank, i)).unwrap();
                assert_eq!(lhs, rhs, "{kind}{rank} simple {i}");
            }
        }
    }

    #[test]
    fn unsupported_rank_rejected() {
        assert!(matches!(
            SimpleSystem::new(Kind::A, 5),
            Err(RootSystemError::UnsupportedSystem(_))
        ));
    }

    #[test]
    fn identify_kinds_roundtrip() {
        for (kind, rank) in [
            (Kind::A, 3),
            (Kind::B, 3),
            (Kind::C, 3),
            (Kind::D, 4),
            (Kind::G2, 2),
        ] {
            let s = SimpleSystem::new(kind, rank).unwrap();
            // Shuffle indices, then identify.
            let perm: Vec<usize> = (0..rank).rev().collect();
            let shuffled: Vec<Vec<i64>> = (0..rank)
                .map(|i| (0..rank).map(|j| s.cartan[perm[i]][perm[j]]).collect())
                .collect();
            let (k2, r2, p) = identify_kind(&shuffled, false).unwrap();
            assert_eq!((k2, r2), (kind, rank));
            // p must map shuffled indices back onto the canonical matrix.
            for i in 0..rank {
                for j in 0..rank {
                    assert_eq!(shuffled[i][j], s.cartan[p[i]][p[j]]);
                }
            }
        }
        let bc = SimpleSystem::new(Kind::BC, 2).unwrap();
        let (k, _, _) = identify_kind(&bc.cartan, true).unwrap();
        assert_eq!(k, Kind::BC);
    }

    #[test]
    fn serialization_shape() {
        let mut d = sys(Kind::BC, 2);
        d.set_multiplicities(vec![2, 2, 2, 1, 2, 1]);
        let dump = d.serializable();
        assert_eq!(dump.rank, 2);
        assert_eq!(dump.roots.len(), 4); // reduced roots only
        let json = serde_json::to_string(&dump).unwrap();
        let back: RootSystemDump = serde_json::from_str(&json).unwrap();
        assert_eq!(back, dump);
    }
}
