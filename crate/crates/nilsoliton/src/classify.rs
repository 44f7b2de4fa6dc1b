//! Catalog runner: enumerate candidate normal-vector specs per space, run
//! both decision paths, and compare against the golden verdict table of
//! the classification theorem.
//!
//! Every verified entry must match; a mismatch is a hard failure carrying
//! full diagnostics. Octonionic spaces have no matrix model here and are
//! carried as `expected_unverified`, reported in a separate section.

use crate::hypersurface::{self, FormulaVerdict, Hypersurface, NormalVectorSpec};
use crate::iwasawa::{build_iwasawa, IwasawaPackage};
use crate::realization::{build_matrix_realization, is_split, RealFormDescriptor};
use crate::rootsys::Kind;
use crate::scalar::{Dd, Exact, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("unknown space identifier: {0}")]
    UnknownSpace(String),
    #[error("spec parse error: {0}")]
    SpecParse(String),
    #[error("catalog mismatch at {space} {spec}: got {got}, expected {expected}")]
    Mismatch {
        space: String,
        spec: String,
        got: String,
        expected: String,
    },
    #[error("derived-corollary observation violated: {0}")]
    ObservationViolated(String),
    #[error(transparent)]
    Realization(#[from] crate::realization::RealizationError),
    #[error(transparent)]
    Iwasawa(#[from] crate::iwasawa::IwasawaError),
    #[error(transparent)]
    Hypersurface(#[from] hypersurface::HypersurfaceError),
}

/// All catalog identifiers with their descriptors, in report order.
pub fn catalog_spaces() -> Vec<(&'static str, RealFormDescriptor)> {
    use RealFormDescriptor::*;
    vec![
        ("sl2r", SlReal(2)),
        ("sl3r", SlReal(3)),
        ("sl4r", SlReal(4)),
        ("sl3c", SlComplex(3)),
        ("sl4c", SlComplex(4)),
        ("sl3h", SlQuaternion(3)),
        ("sl4h", SlQuaternion(4)),
        ("so13", SoPQ(1, 3)),
        ("so14", SoPQ(1, 4)),
        ("so15", SoPQ(1, 5)),
        ("so23", SoPQ(2, 3)),
        ("so24", SoPQ(2, 4)),
        ("so25", SoPQ(2, 5)),
        ("so26", SoPQ(2, 6)),
        ("so27", SoPQ(2, 7)),
        ("so28", SoPQ(2, 8)),
        ("so46", SoPQ(4, 6)),
        ("so5c", SoComplex(5)),
        ("su21", SuPQ(1, 2)),
        ("su31", SuPQ(1, 3)),
        ("su41", SuPQ(1, 4)),
        ("su23", SuPQ(2, 3)),
        ("sp21", SpPQ(2, 1)),
        ("sp31", SpPQ(3, 1)),
        ("split:A1", Split(Kind::A, 1)),
        ("split:A2", Split(Kind::A, 2)),
        ("split:A3", Split(Kind::A, 3)),
        ("split:A4", Split(Kind::A, 4)),
        ("split:B2", Split(Kind::B, 2)),
        ("split:B3", Split(Kind::B, 3)),
        ("split:B4", Split(Kind::B, 4)),
        ("split:C3", Split(Kind::C, 3)),
        ("split:C4", Split(Kind::C, 4)),
        ("split:D4", Split(Kind::D, 4)),
        ("split:G2", Split(Kind::G2, 2)),
    ]
}

pub fn descriptor_of(space: &str) -> Result<RealFormDescriptor, ClassifyError> {
    catalog_spaces()
        .into_iter()
        .find(|(id, _)| *id == space)
        .map(|(_, d)| d)
        .ok_or_else(|| ClassifyError::UnknownSpace(space.into()))
}

/// Shared per-space construction cache.
#[derive(Default)]
pub struct SpaceCache {
    spaces: std::sync::Mutex<BTreeMap<String, Arc<IwasawaPackage>>>,
}

impl SpaceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, space: &str) -> Result<Arc<IwasawaPackage>, ClassifyError> {
        {
            let guard = self.spaces.lock().unwrap();
            if let Some(p) = guard.get(space) {
                return Ok(p.clone());
            }
        }
        let desc = descriptor_of(space)?;
        let iw = Arc::new(build_iwasawa(build_matrix_realization(&desc)?)?);
        self.spaces
            .lock()
            .unwrap()
            .insert(space.to_string(), iw.clone());
        Ok(iw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Soliton,
    NotSoliton,
    ExpectedUnverified,
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Soliton => write!(f, "soliton"),
            Expectation::NotSoliton => write!(f, "not_soliton"),
            Expectation::ExpectedUnverified => write!(f, "expected_unverified"),
        }
    }
}

/// One golden-table row.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub space: String,
    pub spec: Option<NormalVectorSpec>,
    pub expected: Expectation,
    /// Main-Theorem item or negative-proposition tag.
    pub provenance: &'static str,
}

impl CatalogEntry {
    fn new(
        space: &str,
        spec: NormalVectorSpec,
        expected: Expectation,
        provenance: &'static str,
    ) -> Self {
        CatalogEntry {
            space: space.into(),
            spec: Some(spec),
            expected,
            provenance,
        }
    }

    fn unverified(space: &str, provenance: &'static str) -> Self {
        CatalogEntry {
            space: space.into(),
            spec: None,
            expected: Expectation::ExpectedUnverified,
            provenance,
        }
    }
}

fn one() -> Exact {
    Exact::from_int(1)
}

fn int(n: i64) -> Exact {
    Exact::from_int(n)
}

/// The golden verdict table of the classification theorem, spanning all
/// six items plus the negative controls of the rigidity propositions.
pub fn golden_table() -> Vec<CatalogEntry> {
    use Expectation::*;
    let single = NormalVectorSpec::single;
    let pair = |a: usize, ca: i64, b: usize, cb: i64| {
        NormalVectorSpec::pair(a, int(ca), b, int(cb))
    };
    let mut t = Vec::new();

    // Item (i): hyperbolic spaces. Real hyperbolic S is abelian; the
    // complex series and the quaternionic plane come from the rank-one
    // classification. HH^3 is absent from the item-(i) list.
    for space in ["so13", "so14", "so15", "su21", "su31", "su41", "sp21"] {
        t.push(CatalogEntry::new(space, single(0), Soliton, "main(i)"));
    }
    t.push(CatalogEntry::new(
        "su31",
        single(0).with_seed(2),
        Soliton,
        "main(i)",
    ));
    t.push(CatalogEntry::new("sp31", single(0), NotSoliton, "main(i) absence"));
    t.push(CatalogEntry::unverified("oh2", "main(i) octonionic"));

    // Item (ii): rank >= 2, g_alpha = R xi.
    for root in 0..3 {
        t.push(CatalogEntry::new("sl4r", single(root), Soliton, "main(ii)"));
    }
    t.push(CatalogEntry::new("so23", single(0), Soliton, "main(ii)"));
    t.push(CatalogEntry::new("so23", single(1), Soliton, "main(ii)"));
    t.push(CatalogEntry::new("so25", single(0), Soliton, "main(ii)"));
    t.push(CatalogEntry::new("split:G2", single(0), Soliton, "main(ii)"));
    t.push(CatalogEntry::new("split:G2", single(1), Soliton, "main(ii)"));
    t.push(CatalogEntry::new("split:D4", single(1), Soliton, "main(ii)"));
    t.push(CatalogEntry::new("split:B3", single(0), Soliton, "main(ii)"));
    t.push(CatalogEntry::new("so46", single(0), Soliton, "main(ii)"));

    // Item (iii): SL3(H) (and E6^{-26}, unverified), xi in a simple root
    // space of dimension > 1.
    t.push(CatalogEntry::new("sl3h", single(0), Soliton, "main(iii)"));
    t.push(CatalogEntry::new(
        "sl3h",
        single(1).with_seed(1),
        Soliton,
        "main(iii)",
    ));
    t.push(CatalogEntry::unverified("e6m26", "main(iii) octonionic"));

    // Item (iv): SO5(C) and SO(2, 2+n), n >= 2, shortest simple root.
    t.push(CatalogEntry::new("so5c", single(1), Soliton, "main(iv)"));
    for space in ["so24", "so25", "so26"] {
        t.push(CatalogEntry::new(space, single(1), Soliton, "main(iv)"));
    }

    // Item (v): SL3(R), SL3(C), SO(2,3): every codimension-one subgroup.
    for (ca, cl) in [(1i64, 1i64), (3, 4), (4, 3)] {
        t.push(CatalogEntry::new("sl3r", pair(0, ca, 1, cl), Soliton, "main(v)"));
    }
    for (ca, cl) in [(1i64, 1i64), (3, 4)] {
        t.push(CatalogEntry::new("sl3c", pair(0, ca, 1, cl), Soliton, "main(v)"));
    }
    for (ca, cl) in [
        (1i64, 1i64),
        (1, 2),
        (2, 1),
        (3, 4),
        (4, 3),
        (1, 3),
        (3, 1),
        (2, 3),
        (5, 12),
    ] {
        t.push(CatalogEntry::new("so23", pair(0, ca, 1, cl), Soliton, "main(v)"));
    }

    // Item (vi): A3 spaces with xi = (xi_a + xi_b)/sqrt(2) on the
    // orthogonal pair of simple roots.
    for space in ["sl4r", "sl4c", "sl4h"] {
        t.push(CatalogEntry::new(space, pair(0, 1, 2, 1), Soliton, "main(vi)"));
    }

    // Negative controls.
    t.push(CatalogEntry::new(
        "sl4r",
        pair(0, 3, 2, 4),
        NotSoliton,
        "rigidity a=1/sqrt2",
    ));
    t.push(CatalogEntry::new(
        "sl4r",
        pair(0, 4, 2, 3),
        NotSoliton,
        "rigidity a=1/sqrt2",
    ));
    t.push(CatalogEntry::new(
        "sl4r",
        pair(0, 1, 1, 1),
        NotSoliton,
        "connected pair needs A2",
    ));
    t.push(CatalogEntry::new(
        "sl3h",
        pair(0, 1, 1, 1),
        NotSoliton,
        "A2 with dim g >= 4",
    ));
    for (ca, cl) in [(1i64, 1i64), (3, 4), (2, 1)] {
        t.push(CatalogEntry::new(
            "so25",
            pair(0, ca, 1, cl),
            NotSoliton,
            "B2 with m(short)=3",
        ));
    }
    t.push(CatalogEntry::new(
        "so5c",
        single(0),
        NotSoliton,
        "long root with m=2",
    ));
    t.push(CatalogEntry::new("su23", single(0), NotSoliton, "BC2"));
    t.push(CatalogEntry::new("su23", single(1), NotSoliton, "BC2"));
    t.push(CatalogEntry::new(
        "su23",
        pair(0, 1, 1, 1),
        NotSoliton,
        "BC2 pair",
    ));
    t.push(CatalogEntry::new(
        "split:G2",
        pair(0, 1, 1, 1),
        NotSoliton,
        "G2 full Phi",
    ));
    t.push(CatalogEntry::new(
        "split:C3",
        pair(0, 1, 1, 1),
        NotSoliton,
        "connected pair needs A2",
    ));
    t.push(CatalogEntry::new(
        "split:A4",
        pair(0, 1, 2, 1),
        NotSoliton,
        "orthogonal pair needs A3",
    ));
    t.push(CatalogEntry::new(
        "so46",
        single(3),
        NotSoliton,
        "short root m=2 at rank 4",
    ));
    t
}

/// Per-case record of the structured report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRecord {
    pub space: String,
    pub phi: Vec<String>,
    pub coeffs: Vec<String>,
    pub seed: u64,
    pub is_soliton: bool,
    pub verdict_formula: bool,
    pub verdict_oracle: bool,
    /// The classification-formula constant (`D(c)` parameter).
    pub c: Option<String>,
    /// The soliton-equation constant (`Ric = D + c id`).
    pub c_soliton: Option<String>,
    pub residual: String,
    pub mode: String,
    pub dim_s: usize,
    pub paths_agree: bool,
    pub expected: String,
    #[serde(rename = "match")]
    pub matched: bool,
    pub nilpotency_degree: usize,
    pub provenance: String,
    pub runtime_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnverifiedRecord {
    pub space: String,
    pub expected: String,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub cases: Vec<CaseRecord>,
    pub unverified: Vec<UnverifiedRecord>,
    pub all_match: bool,
}

impl Report {
    /// The canonical form used by the determinism guarantee: identical
    /// inputs and seeds give byte-identical canonical reports (timings
    /// are the one non-deterministic field).
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        for c in &mut clone.cases {
            c.runtime_ms = 0;
        }
        serde_json::to_string_pretty(&clone).expect("serializable")
    }
}

fn phi_names(spec: &NormalVectorSpec) -> Vec<String> {
    spec.phi.iter().map(|i| format!("alpha{}", i + 1)).collect()
}

fn coeff_strings(spec: &NormalVectorSpec) -> Vec<String> {
    spec.coeffs.iter().map(|c| c.render()).collect()
}

/// Run one case in the requested scalar mode.
fn run_case<S: Scalar>(
    iw: &IwasawaPackage,
    spec: &NormalVectorSpec,
) -> Result<(FormulaVerdict<S>, usize, usize), ClassifyError> {
    let h: Hypersurface<S> = hypersurface::make_hypersurface(iw, spec)?;
    let v = h.soliton_decide_formula(iw)?;
    Ok((v, h.s_dim(), h.nilpotency_degree()))
}

/// Evaluate one catalog entry into a case record (verified entries only).
pub fn evaluate_entry(
    cache: &SpaceCache,
    entry: &CatalogEntry,
    float_mode: bool,
) -> Result<CaseRecord, ClassifyError> {
    let spec = entry.spec.as_ref().expect("verified entry");
    let start = std::time::Instant::now();
    let iw = cache.get(&entry.space)?;
    let (is_soliton, c, c_sol, residual, mode, dim_s, degree, oracle_verdict) = if float_mode {
        let (v, dim_s, degree) = run_case::<Dd>(&iw, spec)?;
        (
            v.is_soliton,
            v.c_formula.map(|c| c.render()),
            v.c_soliton.map(|c| c.render()),
            v.oracle.residual_render(),
            "float",
            dim_s,
            degree,
            v.oracle.is_soliton,
        )
    } else {
        let (v, dim_s, degree) = run_case::<Exact>(&iw, spec)?;
        (
            v.is_soliton,
            v.c_formula.map(|c| c.render()),
            v.c_soliton.map(|c| c.render()),
            v.oracle.residual_render(),
            "exact",
            dim_s,
            degree,
            v.oracle.is_soliton,
        )
    };
    let expected_soliton = matches!(entry.expected, Expectation::Soliton);
    let matched = is_soliton == expected_soliton;
    if !matched {
        return Err(ClassifyError::Mismatch {
            space: entry.space.clone(),
            spec: format!("{:?}", spec),
            got: if is_soliton { "soliton" } else { "not_soliton" }.into(),
            expected: entry.expected.to_string(),
        });
    }
    Ok(CaseRecord {
        space: entry.space.clone(),
        phi: phi_names(spec),
        coeffs: coeff_strings(spec),
        seed: spec.seed,
        is_soliton,
        verdict_formula: is_soliton,
        verdict_oracle: oracle_verdict,
        c,
        c_soliton: c_sol,
        residual,
        mode: mode.into(),
        dim_s,
        paths_agree: true,
        expected: entry.expected.to_string(),
        matched,
        nilpotency_degree: degree,
        provenance: entry.provenance.into(),
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Run the whole table. Mismatches abort with full diagnostics; octonionic
/// rows are collected separately and never fail the run.
pub fn run_catalog(
    entries: &[CatalogEntry],
    float_mode: bool,
    jobs: usize,
) -> Result<Report, ClassifyError> {
    let cache = SpaceCache::new();
    run_catalog_with(&cache, entries, float_mode, jobs)
}

/// Like [`run_catalog`] but reusing a shared space cache.
pub fn run_catalog_with(
    cache: &SpaceCache,
    entries: &[CatalogEntry],
    float_mode: bool,
    jobs: usize,
) -> Result<Report, ClassifyError> {
    let (verified, unverified): (Vec<_>, Vec<_>) =
        entries.iter().partition(|e| e.spec.is_some());
    let run = |entry: &&CatalogEntry| evaluate_entry(cache, entry, float_mode);
    let results: Vec<Result<CaseRecord, ClassifyError>> = if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| verified.par_iter().map(run).collect())
    } else {
        verified.iter().map(run).collect()
    };
    let mut cases = Vec::new();
    for r in results {
        cases.push(r?);
    }
    let unverified = unverified
        .into_iter()
        .map(|e| UnverifiedRecord {
            space: e.space.clone(),
            expected: e.expected.to_string(),
            provenance: e.provenance.into(),
        })
        .collect();
    Ok(Report {
        all_match: cases.iter().all(|c| c.matched),
        cases,
        unverified,
    })
}

/// Derived-corollary checks over a finished report.
///
/// Mirrors the rank corollary: a non-split space of rank >= 4 admits no
/// codimension-one soliton subgroup apart from the `Phi = {alpha}`,
/// `dim g_alpha = 1` nilradical family, and every other soliton found has
/// nilpotency degree <= 3.
pub fn rank_observations(cache: &SpaceCache, report: &Report) -> Result<(), ClassifyError> {
    for case in &report.cases {
        if !case.is_soliton {
            continue;
        }
        let iw = cache.get(&case.space)?;
        let rank = iw.rank();
        let split = is_split(&iw.dec);
        // Tamaru nilradical family: Phi = {alpha} with dim g_alpha = 1.
        let tamaru = case.phi.len() == 1 && {
            let idx: usize = case.phi[0]
                .trim_start_matches("alpha")
                .parse::<usize>()
                .unwrap()
                - 1;
            let root = crate::rootsys::Root::simple(rank, idx);
            let ri = iw.dec.roots.index_of(&root).unwrap();
            iw.dec.multiplicity(ri) == 1
        };
        if !split && rank >= 4 && !tamaru {
            return Err(ClassifyError::ObservationViolated(format!(
                "non-split rank-{rank} space {} admits a non-nilradical soliton",
                case.space
            )));
        }
        if !tamaru && case.nilpotency_degree > 3 {
            return Err(ClassifyError::ObservationViolated(format!(
                "soliton in {} has nilpotency degree {} > 3",
                case.space, case.nilpotency_degree
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// CLI-facing helpers: spec parsing and single verdicts
// ---------------------------------------------------------------------------

/// Parse the CLI coefficient syntax: decimals (`0.6`), rationals (`1/2`),
/// and `sqrt 2` multiples (`s2`, `s2/2`, `3*s2/4`).
pub fn parse_coeff(s: &str) -> Result<Exact, ClassifyError> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let err = |m: &str| ClassifyError::SpecParse(format!("{m}: {s}"));
    let t = s.trim();
    if t.contains("s2") {
        // forms: s2, s2/q, p*s2, p*s2/q
        let (mult, rest) = match t.split_once("*s2") {
            Some((p, rest)) => (p.to_string(), rest.to_string()),
            None => {
                let rest = t.strip_prefix("s2").ok_or_else(|| err("bad sqrt form"))?;
                ("1".into(), rest.to_string())
            }
        };
        let num: BigInt = mult.parse().map_err(|_| err("bad multiplier"))?;
        let den: BigInt = if rest.is_empty() {
            BigInt::from(1)
        } else {
            rest.strip_prefix('/')
                .ok_or_else(|| err("bad denominator"))?
                .parse()
                .map_err(|_| err("bad denominator"))?
        };
        return Ok(Exact::quadratic(
            BigRational::from_integer(0.into()),
            BigRational::new(num, den),
            2,
        ));
    }
    if let Some((p, q)) = t.split_once('/') {
        let num: BigInt = p.parse().map_err(|_| err("bad numerator"))?;
        let den: BigInt = q.parse().map_err(|_| err("bad denominator"))?;
        return Ok(Exact::rational(BigRational::new(num, den)));
    }
    if let Some((int_part, frac)) = t.split_once('.') {
        let digits = format!("{int_part}{frac}");
        let num: BigInt = digits.parse().map_err(|_| err("bad decimal"))?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Exact::rational(BigRational::new(num, den)));
    }
    let num: BigInt = t.parse().map_err(|_| err("bad integer"))?;
    Ok(Exact::rational(BigRational::from_integer(num)))
}

/// Parse `"alpha1=0.6,alpha3=0.8"` into a spec.
pub fn parse_xi_spec(s: &str, seed: u64) -> Result<NormalVectorSpec, ClassifyError> {
    let err = |m: String| ClassifyError::SpecParse(m);
    let mut phi = Vec::new();
    let mut coeffs = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| err(format!("expected alphaK=value, got {part}")))?;
        let idx: usize = name
            .trim()
            .strip_prefix("alpha")
            .ok_or_else(|| err(format!("root names are alphaK, got {name}")))?
            .parse()
            .map_err(|_| err(format!("bad root index in {name}")))?;
        if idx == 0 {
            return Err(err("root indices are 1-based".into()));
        }
        phi.push(idx - 1);
        coeffs.push(parse_coeff(value)?);
    }
    if phi.is_empty() {
        return Err(err("empty spec".into()));
    }
    Ok(NormalVectorSpec { phi, coeffs, seed })
}

/// The JSON verdict of `check` (field names are part of the interface).
#[derive(Debug, Serialize, Deserialize)]
pub struct VerdictJson {
    pub space: String,
    pub phi: Vec<String>,
    pub coeffs: Vec<String>,
    pub seed: u64,
    pub is_soliton: bool,
    pub c: String,
    pub residual: String,
    pub mode: String,
    pub dim_s: usize,
    pub paths_agree: bool,
}

pub fn check_single(
    cache: &SpaceCache,
    space: &str,
    spec: &NormalVectorSpec,
    float_mode: bool,
) -> Result<VerdictJson, ClassifyError> {
    let iw = cache.get(space)?;
    let (is_soliton, c, residual, mode, dim_s) = if float_mode {
        let (v, d, _) = run_case::<Dd>(&iw, spec)?;
        (
            v.is_soliton,
            v.c_formula.map(|c| c.render()).unwrap_or_default(),
            v.oracle.residual_render(),
            "float",
            d,
        )
    } else {
        let (v, d, _) = run_case::<Exact>(&iw, spec)?;
        (
            v.is_soliton,
            v.c_formula.map(|c| c.render()).unwrap_or_default(),
            v.oracle.residual_render(),
            "exact",
            d,
        )
    };
    Ok(VerdictJson {
        space: space.into(),
        phi: phi_names(spec),
        coeffs: coeff_strings(spec),
        seed: spec.seed,
        is_soliton,
        c,
        residual,
        mode: mode.into(),
        dim_s,
        paths_agree: true,
    })
}

/// Sweep the Phi-families of one space: all singletons, all pairs with a
/// rational coefficient grid, and (rank <= 3) the full simplex.
///
/// The grid is configuration: rational points on the unit circle from the
/// half-angle parametrization, `(m^2 - k^2, 2mk)` for `k = 1..K`, plus
/// the special equal-coefficient point.
pub fn classify_space(
    cache: &SpaceCache,
    space: &str,
    grid: usize,
    float_mode: bool,
) -> Result<Vec<VerdictJson>, ClassifyError> {
    let iw = cache.get(space)?;
    let rank = iw.rank();
    let mut out = Vec::new();
    let mut specs: Vec<NormalVectorSpec> = Vec::new();
    for i in 0..rank {
        specs.push(NormalVectorSpec::single(i));
    }
    let m = grid as i64 + 1;
    for i in 0..rank {
        for j in (i + 1)..rank {
            specs.push(NormalVectorSpec::pair(i, one(), j, one()));
            for k in 1..=grid as i64 {
                let (a, b) = (m * m - k * k, 2 * m * k);
                specs.push(NormalVectorSpec::pair(i, int(a), j, int(b)));
            }
        }
    }
    if (2..=3).contains(&rank) && rank == 3 {
        // Full simplex for rank 3: a few interior points.
        for (a, b, c) in [(1i64, 1, 1), (1, 2, 2), (2, 1, 2)] {
            specs.push(NormalVectorSpec {
                phi: vec![0, 1, 2],
                coeffs: vec![int(a), int(b), int(c)],
                seed: 0,
            });
        }
    }
    for spec in specs {
        if iw.n_dim() <= 1 {
            continue;
        }
        out.push(check_single(cache, space, &spec, float_mode)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_coeffs() {
        assert_eq!(parse_coeff("3/5").unwrap(), Exact::ratio(3, 5));
        assert_eq!(parse_coeff("0.6").unwrap(), Exact::ratio(3, 5));
        assert_eq!(parse_coeff("2").unwrap(), Exact::from_int(2));
        let s22 = parse_coeff("s2/2").unwrap();
        assert_eq!(s22.clone() * s22, Exact::ratio(1, 2));
        assert!(parse_coeff("nonsense").is_err());
    }

    #[test]
    fn parse_specs() {
        let spec = parse_xi_spec("alpha1=0.70710678, alpha3=0.70710678", 0).unwrap();
        assert_eq!(spec.phi, vec![0, 2]);
        assert_eq!(spec.coeffs[0], Exact::ratio(70710678, 100000000));
        assert!(parse_xi_spec("beta1=1", 0).is_err());
        assert!(parse_xi_spec("alpha0=1", 0).is_err());
    }

    #[test]
    fn golden_table_shape() {
        let table = golden_table();
        let verified = table.iter().filter(|e| e.spec.is_some()).count();
        let negatives = table
            .iter()
            .filter(|e| e.expected == Expectation::NotSoliton)
            .count();
        let unverified = table.iter().filter(|e| e.spec.is_none()).count();
        assert!(verified >= 20, "need >= 20 verified entries, have {verified}");
        assert!(negatives >= 5, "need >= 5 negative controls, have {negatives}");
        assert_eq!(unverified, 2);
        // All six Main Theorem items appear.
        for item in ["main(i)", "main(ii)", "main(iii)", "main(iv)", "main(v)", "main(vi)"] {
            assert!(
                table.iter().any(|e| e.provenance.starts_with(item)),
                "missing {item}"
            );
        }
    }

    #[test]
    fn empty_entry_list_gives_empty_report() {
        let rep = run_catalog(&[], false, 1).unwrap();
        assert!(rep.cases.is_empty());
        assert!(rep.all_match);
    }

    #[test]
    fn single_catalog_entry_so23() {
        let entry = CatalogEntry::new(
            "so23",
            NormalVectorSpec::pair(0, Exact::from_int(1), 1, Exact::from_int(1)),
            Expectation::Soliton,
            "main(v)",
        );
        let rep = run_catalog(&[entry], false, 1).unwrap();
        assert!(rep.all_match);
        assert_eq!(rep.cases[0].dim_s, 3);
        assert!(rep.cases[0].c.is_some());
    }

    #[test]
    fn mismatch_aborts_with_diagnostics() {
        let entry = CatalogEntry::new(
            "so23",
            NormalVectorSpec::pair(0, Exact::from_int(1), 1, Exact::from_int(1)),
            Expectation::NotSoliton, // deliberately wrong
            "test",
        );
        let err = run_catalog(&[entry], false, 1).unwrap_err();
        assert!(matches!(err, ClassifyError::Mismatch { .. }));
    }
}
