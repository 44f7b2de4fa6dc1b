//! Command-line interface for the soliton classification engine.

use clap::{Parser, Subcommand};
use nilsoliton::classify::{
    self, catalog_spaces, golden_table, rank_observations, run_catalog_with, SpaceCache,
};
use nilsoliton::geometry;
use nilsoliton::hypersurface::{self, NormalVectorSpec};
use nilsoliton::iwasawa::ricci_n_lemma_check;
use nilsoliton::lemmas::lemma_suite;
use nilsoliton::scalar::Exact;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nilsoliton",
    about = "Classify codimension-one Ricci soliton subgroups of nilpotent Iwasawa groups",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the catalog of space identifiers.
    ListSpaces,
    /// Decide one normal-vector spec on one space.
    Check {
        #[arg(long)]
        space: String,
        /// Normal vector, e.g. "alpha1=0.70710678,alpha3=0.70710678";
        /// exact coefficients accepted as "1/2" or "s2/2".
        #[arg(long)]
        xi: String,
        /// Exact arithmetic (default).
        #[arg(long, conflicts_with = "float")]
        exact: bool,
        /// Double-double floating arithmetic.
        #[arg(long)]
        float: bool,
        /// Seed for randomized unit choices inside root spaces (0 =
        /// deterministic default).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Sweep all Phi-families of one space over a coefficient grid.
    Classify {
        #[arg(long)]
        space: String,
        /// Number of off-special grid points per coefficient pair.
        #[arg(long, default_value_t = 3)]
        grid: usize,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        float: bool,
    },
    /// Run the full golden verdict table; exit 0 iff every verified entry
    /// matches.
    CatalogRun {
        /// Write the structured report to this path.
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        float: bool,
    },
    /// Structural identity suites.
    Verify {
        /// lemmas | geometry | all
        #[arg(long)]
        suite: String,
        #[arg(long)]
        space: String,
        /// Samples per randomized identity.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::ListSpaces => {
            let cache = SpaceCache::new();
            println!(
                "{:<10} {:>5} {:>6}  {}",
                "id", "rank", "dim n", "restricted system"
            );
            for (id, _) in catalog_spaces() {
                match cache.get(id) {
                    Ok(iw) => {
                        let kinds: Vec<String> = iw
                            .dec
                            .roots
                            .positive_roots
                            .iter()
                            .enumerate()
                            .filter(|(_, r)| r.level() == 1)
                            .map(|(i, r)| {
                                format!(
                                    "alpha{}: m={}",
                                    r.coords.iter().position(|&c| c == 1).unwrap() + 1,
                                    iw.dec.multiplicity(i)
                                )
                            })
                            .collect();
                        println!(
                            "{:<10} {:>5} {:>6}  {} ({})",
                            id,
                            iw.rank(),
                            iw.n_dim(),
                            iw.dec.roots.simple.label(),
                            kinds.join(", ")
                        );
                    }
                    Err(e) => println!("{id:<10} construction failed: {e}"),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            space,
            xi,
            float,
            seed,
            json,
            ..
        } => {
            let cache = SpaceCache::new();
            let spec = classify::parse_xi_spec(&xi, seed)?;
            let verdict = classify::check_single(&cache, &space, &spec, float)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&verdict)?);
            } else {
                println!(
                    "{} xi on {:?} with coeffs {:?}: {} (mode {}, dim s = {})",
                    verdict.space,
                    verdict.phi,
                    verdict.coeffs,
                    if verdict.is_soliton {
                        format!("RICCI SOLITON, c = {}", verdict.c)
                    } else {
                        format!("not a soliton (residual {})", verdict.residual)
                    },
                    verdict.mode,
                    verdict.dim_s
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify {
            space,
            grid,
            json,
            float,
        } => {
            let cache = SpaceCache::new();
            let verdicts = classify::classify_space(&cache, &space, grid, float)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&verdicts)?);
            } else {
                for v in &verdicts {
                    println!(
                        "{:<10} {:?} {:?} seed={} -> {}{}",
                        v.space,
                        v.phi,
                        v.coeffs,
                        v.seed,
                        if v.is_soliton { "soliton" } else { "not a soliton" },
                        if v.is_soliton {
                            format!(" (c = {})", v.c)
                        } else {
                            String::new()
                        }
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CatalogRun { out, jobs, float } => {
            let cache = SpaceCache::new();
            let table = golden_table();
            let report = run_catalog_with(&cache, &table, float, jobs)?;
            rank_observations(&cache, &report)?;
            for c in &report.cases {
                println!(
                    "{:<10} {:?} {:?} -> {} [{}; expected {}] {}",
                    c.space,
                    c.phi,
                    c.coeffs,
                    if c.is_soliton { "soliton" } else { "not_soliton" },
                    c.mode,
                    c.expected,
                    if c.matched { "ok" } else { "MISMATCH" }
                );
            }
            for u in &report.unverified {
                println!(
                    "{:<10} expected (unverified): {} [{}]",
                    u.space, u.expected, u.provenance
                );
            }
            println!(
                "{} verified cases, {} unverified; all match: {}",
                report.cases.len(),
                report.unverified.len(),
                report.all_match
            );
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
                println!("report written to {path}");
            }
            Ok(if report.all_match {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Verify {
            suite,
            space,
            samples,
        } => {
            if !["lemmas", "geometry", "all"].contains(&suite.as_str()) {
                return Err(format!("unknown suite {suite}; use lemmas|geometry|all").into());
            }
            let cache = SpaceCache::new();
            let iw = cache.get(&space)?;
            let mut ok = true;
            if suite == "lemmas" || suite == "all" {
                // A default hypersurface for the xi-dependent identities.
                let hyper = if iw.n_dim() > 1 {
                    let spec = if iw.rank() >= 2 {
                        NormalVectorSpec::pair(0, Exact::from_int(1), 1, Exact::from_int(1))
                    } else {
                        NormalVectorSpec::single(0)
                    };
                    hypersurface::make_exact(&iw, &spec).ok()
                } else {
                    None
                };
                let rep = lemma_suite(&iw, hyper.as_ref(), samples, 17);
                for e in &rep.entries {
                    println!(
                        "lemma {:<24} {}",
                        e.name,
                        if e.skipped {
                            "skipped (hypotheses not met)".to_string()
                        } else {
                            format!(
                                "{} ({} samples, max residual {:.1e})",
                                if e.passed { "pass" } else { "FAIL" },
                                e.samples,
                                e.max_residual
                            )
                        }
                    );
                }
                ok &= rep.all_passed();
            }
            if suite == "geometry" || suite == "all" {
                let conn = geometry::levi_civita(&iw.an_algebra);
                let t = conn.torsion_residual(&iw.an_algebra);
                let m = conn.metric_compat_residual(&iw.an_algebra);
                println!("geometry torsion residual        {t:.1e}");
                println!("geometry metric compat residual  {m:.1e}");
                let closed = iw.an_connection_check();
                println!("geometry AN closed form residual {closed:.1e}");
                let ric = geometry::ricci_operator(&iw.n_algebra);
                let sym = iw.n_algebra.gram().matmul(&ric).is_symmetric();
                println!(
                    "geometry Ricci self-adjoint      {}",
                    if sym { "pass" } else { "FAIL" }
                );
                let (k, res) = iw.ricci_n_structure()?;
                println!("geometry Ric^N = k id + ad(H)    pass (k = {k}, residual {res:.1e})");
                let lem = ricci_n_lemma_check(&iw);
                println!("geometry (R^T + S^2)|n residual  {lem:.1e}");
                ok &= sym && t == 0.0 && m == 0.0 && closed == 0.0 && lem == 0.0;
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
