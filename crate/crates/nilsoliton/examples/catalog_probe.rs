use nilsoliton::classify::{golden_table, run_catalog, rank_observations, SpaceCache};

fn main() {
    let t0 = std::time::Instant::now();
    let table = golden_table();
    println!("table: {} entries", table.len());
    match run_catalog(&table, false, 1) {
        Ok(rep) => {
            println!("ALL MATCH: {} ({} cases, {} unverified) in {:?}",
                rep.all_match, rep.cases.len(), rep.unverified.len(), t0.elapsed());
            for c in &rep.cases {
                println!("  {:10} phi={:?} coeffs={:?} seed={} soliton={} c={:?} deg={} [{}ms] {}",
                    c.space, c.phi, c.coeffs, c.seed, c.is_soliton, c.c, c.nilpotency_degree, c.runtime_ms, c.provenance);
            }
            let cache = SpaceCache::new();
            match rank_observations(&cache, &rep) {
                Ok(()) => println!("rank observations OK"),
                Err(e) => println!("rank observations FAILED: {e}"),
            }
        }
        Err(e) => println!("CATALOG FAILED: {e}"),
    }
    println!("total {:?}", t0.elapsed());
}
