//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. The rank-seven run is skipped unless `GHK_EXTENDED=1`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ghk_core::bialgebra::{cobracket, compatibility_defect, lemma_report, CompatibilitySign};
use ghk_core::canonical::{normal_form, CanonicalGraph};
use ghk_core::cli::{render_table, Format};
use ghk_core::complex::{ChainComplex, HomologyTable, Mode};
use ghk_core::enumerate::{closure, cubic_no_cut, oracle_cubic};
use ghk_core::exactrank::RankConfig;
use ghk_core::multigraph::named::theta;
use ghk_core::orient::ContractionSign;
use ghk_core::verify::{verify_cut_acyclic, verify_quasi_iso};
use rayon::prelude::*;

type Outcome = Result<String, String>;

struct Expected {
    rank: usize,
    dims: &'static [usize],
    ranks: &'static [usize],
    betti: &'static [(usize, usize)],
}

// dimensions top degree first; ranks exclude the map out of degree two
const TABLES: [Expected; 6] = [
    Expected {
        rank: 2,
        dims: &[1],
        ranks: &[],
        betti: &[(2, 1)],
    },
    Expected {
        rank: 3,
        dims: &[2, 1, 0],
        ranks: &[1, 0],
        betti: &[(4, 1)],
    },
    Expected {
        rank: 4,
        dims: &[4, 3, 0, 1, 1],
        ranks: &[3, 0, 0, 1],
        betti: &[(6, 1)],
    },
    Expected {
        rank: 5,
        dims: &[14, 19, 12, 12, 10, 3, 0],
        ranks: &[12, 7, 5, 7, 3, 0],
        betti: &[(8, 2)],
    },
    Expected {
        rank: 6,
        dims: &[54, 128, 177, 218, 177, 72, 12, 2, 1],
        ranks: &[52, 76, 101, 116, 61, 11, 1, 1],
        betti: &[(10, 2), (7, 1)],
    },
    Expected {
        rank: 7,
        dims: &[298, 1123, 2388, 3530, 3362, 1933, 678, 173, 41, 6, 0],
        ranks: &[295, 828, 1560, 1969, 1393, 540, 138, 35, 6, 0],
        betti: &[(12, 3), (9, 1)],
    },
];

fn expected(rank: usize) -> &'static Expected {
    TABLES.iter().find(|e| e.rank == rank).expect("tabulated rank")
}

fn table(rank: usize) -> Result<HomologyTable, String> {
    ChainComplex::new(rank, Mode::Quotient)
        .and_then(|cx| cx.homology(&RankConfig::default()))
        .map_err(|e| e.to_string())
}

fn compare_table(t: &HomologyTable, e: &Expected, with_ranks: bool) -> Result<(), String> {
    if t.dims() != e.dims {
        return Err(format!("rank {}: dims {:?}, expected {:?}", e.rank, t.dims(), e.dims));
    }
    if with_ranks && t.boundary_ranks() != e.ranks {
        return Err(format!("rank {}: ranks {:?}, expected {:?}", e.rank, t.boundary_ranks(), e.ranks));
    }
    Ok(())
}

fn within(label: &str, elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed > limit {
        Err(format!("{label} took {elapsed:.1?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn small_tables() -> Outcome {
    let start = Instant::now();
    for n in 3..=5 {
        compare_table(&table(n)?, expected(n), true)?;
    }
    let elapsed = start.elapsed();
    within("ranks 3-5", elapsed, Duration::from_secs(60))?;
    Ok(format!("ranks 3, 4, 5 dims and boundary ranks exact ({elapsed:.2?})"))
}

fn rank_six_table() -> Outcome {
    let start = Instant::now();
    compare_table(&table(6)?, expected(6), true)?;
    let elapsed = start.elapsed();
    within("rank 6", elapsed, Duration::from_secs(3600))?;
    Ok(format!("rank 6 dims and boundary ranks exact ({elapsed:.2?})"))
}

fn betti_numbers() -> Outcome {
    let mut found = Vec::new();
    for n in 2..=6 {
        let t = table(n)?;
        let got = t.nonzero_betti();
        if got != expected(n).betti {
            return Err(format!("rank {n}: nonzero Betti {got:?}, expected {:?}", expected(n).betti));
        }
        found.extend(got.iter().map(|&(k, b)| format!("H{k}(r{n})={b}")));
    }
    Ok(format!("all other Betti numbers vanish; nonzero: {}", found.join(" ")))
}

fn rank_seven() -> Option<Outcome> {
    if std::env::var("GHK_EXTENDED").map_or(true, |v| v != "1") {
        return None;
    }
    Some((|| {
        let start = Instant::now();
        let t = table(7)?;
        let e = expected(7);
        compare_table(&t, e, true)?;
        if t.nonzero_betti() != e.betti {
            return Err(format!("nonzero Betti {:?}, expected {:?}", t.nonzero_betti(), e.betti));
        }
        Ok(format!("rank 7 dims, ranks and Betti exact ({:.1?})", start.elapsed()))
    })())
}

fn dsquared() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 2..=6 {
        for mode in Mode::ALL {
            let r = ChainComplex::new(n, mode)
                .and_then(|cx| cx.dsquared(ContractionSign::Positional))
                .map_err(|e| e.to_string())?;
            if !r.passed() {
                return Err(format!("rank {n} {mode}: {:?}", r.failures));
            }
            checked += 1;
        }
    }
    let control = ChainComplex::new(5, Mode::Full)
        .and_then(|cx| cx.dsquared(ContractionSign::Unsigned))
        .map_err(|e| e.to_string())?;
    if control.passed() {
        return Err("unsigned-contraction control passed at rank 5".into());
    }
    Ok(format!(
        "d^2 = 0 with split and anticommutation for {checked} (rank, mode) pairs; unsigned control rejected ({:.2?})",
        start.elapsed()
    ))
}

fn theorems() -> Outcome {
    let start = Instant::now();
    let cfg = RankConfig::default();
    for n in 3..=4 {
        let a = verify_cut_acyclic(n, &cfg).map_err(|e| e.to_string())?;
        if !a.passed {
            return Err(format!("cut-vertex subcomplex not acyclic at rank {n}"));
        }
        let q = verify_quasi_iso(n, &cfg).map_err(|e| e.to_string())?;
        if !q.passed {
            return Err(format!("full and quotient homology differ at rank {n}"));
        }
    }
    let elapsed = start.elapsed();
    within("theorem checks", elapsed, Duration::from_secs(600))?;
    Ok(format!("cut-vertex subcomplex acyclic and quotient quasi-isomorphic at ranks 3, 4 ({elapsed:.2?})"))
}

fn oracle() -> Outcome {
    let mut counts = Vec::new();
    for n in 2..=5 {
        let generated = cubic_no_cut(n).map_err(|e| e.to_string())?;
        let filtered: Vec<CanonicalGraph> = oracle_cubic(n)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|c| !c.graph().has_bridge() && !c.graph().has_cut_vertex())
            .collect();
        if generated != filtered {
            return Err(format!("rank {n}: {} generated, {} from oracle", generated.len(), filtered.len()));
        }
        counts.push(generated.len());
    }
    Ok(format!("generated cubic classes equal filtered oracle for ranks 2-5, counts {counts:?}"))
}

fn generators(max_rank: usize, mode: Mode) -> Result<Vec<CanonicalGraph>, String> {
    let mut out = Vec::new();
    for n in 2..=max_rank {
        out.extend(closure(n, mode).map_err(|e| e.to_string())?.nonzero.into_iter().flatten());
    }
    Ok(out)
}

fn compatibility(gens: &[CanonicalGraph], max_sum: usize, sign: CompatibilitySign) -> Result<(usize, usize), String> {
    let pairs: Vec<(&CanonicalGraph, &CanonicalGraph)> = gens
        .iter()
        .flat_map(|g| gens.iter().map(move |h| (g, h)))
        .filter(|(g, h)| g.rank() + h.rank() <= max_sum)
        .collect();
    let bad = pairs
        .par_iter()
        .map(|(g, h)| compatibility_defect(g, h, sign).map(|d| usize::from(!d.is_zero())))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok((pairs.len(), bad.iter().sum()))
}

fn bialgebra() -> Outcome {
    // rank 5 is included since every rank-4 graph with a cut vertex is zero
    for mode in [Mode::Quotient, Mode::Full] {
        for max in [4, 5] {
            let r = lemma_report(&generators(max, mode)?);
            if !r.passed() {
                return Err(format!("{mode} rank <= {max}: {r:?}"));
            }
        }
    }
    let gens = generators(5, Mode::Quotient)?;
    let (pairs, bad) = compatibility(&gens, 5, CompatibilitySign::Standard)?;
    if bad > 0 {
        return Err(format!("compatibility fails on {bad} of {pairs} pairs with rank sum <= 5"));
    }
    // the identity is degenerate at small rank sums, so the sign control
    // needs the larger range
    let (wide, wide_bad) = compatibility(&gens, 7, CompatibilitySign::Standard)?;
    if wide_bad > 0 {
        return Err(format!("compatibility fails on {wide_bad} of {wide} pairs with rank sum <= 7"));
    }
    let (_, control) = compatibility(&gens, 7, CompatibilitySign::Flipped)?;
    if control == 0 {
        return Err("flipped-sign control satisfied the identity".into());
    }
    let t = normal_form(&theta()).0;
    if !cobracket(&t).map_err(|e| e.to_string())?.is_zero() {
        return Err("cobracket of theta is nonzero".into());
    }
    Ok(format!(
        "lemmas hold to rank 5; identity holds on {pairs} pairs (sum <= 5) and {wide} pairs (sum <= 7); \
         flipped control fails on {control}; cobracket(theta) = 0"
    ))
}

fn determinism() -> Outcome {
    let mut sizes = Vec::new();
    for n in [5, 6] {
        let mut outputs = Vec::new();
        for threads in [1, 4, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| e.to_string())?;
            let t = pool.install(|| table(n))?;
            let bytes: Vec<String> = [Format::Csv, Format::Json, Format::Table]
                .into_iter()
                .map(|f| render_table(&t, f))
                .collect();
            outputs.push(bytes);
        }
        if outputs.iter().any(|o| *o != outputs[0]) {
            return Err(format!("rank {n}: outputs differ across thread counts"));
        }
        sizes.push(outputs[0].iter().map(String::len).sum::<usize>());
    }
    Ok(format!("rank 5 and 6 tables byte-identical across 1, 4, 8 threads ({sizes:?} bytes)"))
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panic: {msg}"))
    });
    match outcome {
        Ok(detail) => {
            println!("criterion {id} [{name}]: PASS - {detail}");
            true
        }
        Err(detail) => {
            println!("criterion {id} [{name}]: FAIL - {detail}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run(1, "quotient tables, ranks 3-5", small_tables);
    ok &= run(2, "quotient table, rank 6", rank_six_table);
    ok &= run(3, "Betti numbers, ranks 2-6", betti_numbers);
    match rank_seven() {
        Some(outcome) => ok &= run(4, "quotient table, rank 7", || outcome),
        None => println!("criterion 4 [quotient table, rank 7]: SKIP - extended run; set GHK_EXTENDED=1"),
    }
    ok &= run(5, "d^2 = 0, ranks <= 6, all modes", dsquared);
    ok &= run(6, "acyclicity and quasi-isomorphism, ranks 3-4", theorems);
    ok &= run(7, "generator versus oracle, ranks <= 5", oracle);
    ok &= run(8, "bracket and cobracket", bialgebra);
    ok &= run(9, "thread-count determinism", determinism);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
