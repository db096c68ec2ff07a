//! Rank of sparse integer matrices over the rationals.
//!
//! Elimination is sparse with a Markowitz-style choice: the column with the
//! fewest live entries, then the shortest row in it. Ranks modulo several
//! random primes near `2^31` are compared; small matrices, and any matrix on
//! which the primes disagree, are confirmed by fraction-free elimination
//! over the integers.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::BoundaryMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankConfig {
    /// Number of primes for the modular consensus.
    pub primes: usize,
    /// Seed of the prime sampler.
    pub seed: u64,
    /// Matrices with `max(rows, cols)` at most this are always confirmed
    /// exactly.
    pub exact_threshold: usize,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            primes: 3,
            seed: 0x6768_6b5f_7261_6e6b,
            exact_threshold: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub rank: usize,
    pub modular: Vec<(u64, usize)>,
    pub exact: bool,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `count` distinct primes in `[2^31 - 2^24, 2^31)`, reproducible from
/// `seed`.
pub fn select_primes(count: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<u64> = Vec::with_capacity(count);
    while out.len() < count {
        let mut c: u64 = rng.gen_range((1u64 << 31) - (1 << 24)..(1u64 << 31)) | 1;
        while !is_prime(c) {
            c += 2;
        }
        if c < (1u64 << 31) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

type SparseRow<T> = Vec<(u32, T)>;

/// Shared elimination skeleton. `combine(pivot, target, col)` returns the
/// target row with `col` eliminated and no stored zeros.
fn sparse_rank<T, F>(mut rows: Vec<SparseRow<T>>, ncols: usize, combine: F) -> usize
where
    F: Fn(&[(u32, T)], &[(u32, T)], u32) -> SparseRow<T>,
{
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for &(c, _) in r {
            col_rows[c as usize].push(i as u32);
        }
    }
    let mut active = vec![true; rows.len()];
    let mut done = vec![false; ncols];
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> = col_rows
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(c, l)| Reverse((l.len(), c as u32)))
        .collect();
    let mut rank = 0;
    while let Some(Reverse((len, c))) = heap.pop() {
        let cu = c as usize;
        if done[cu] {
            continue;
        }
        let mut live = std::mem::take(&mut col_rows[cu]);
        live.sort_unstable();
        live.dedup();
        live.retain(|&r| {
            active[r as usize] && rows[r as usize].binary_search_by_key(&c, |e| e.0).is_ok()
        });
        if live.is_empty() {
            done[cu] = true;
            continue;
        }
        if live.len() != len {
            heap.push(Reverse((live.len(), c)));
            col_rows[cu] = live;
            continue;
        }
        let &p = live
            .iter()
            .min_by_key(|&&r| (rows[r as usize].len(), r))
            .expect("nonempty");
        active[p as usize] = false;
        done[cu] = true;
        rank += 1;
        let pivot = std::mem::take(&mut rows[p as usize]);
        for &i in &live {
            if i == p {
                continue;
            }
            let old = &rows[i as usize];
            let new = combine(&pivot, old, c);
            for &(nc, _) in &new {
                if old.binary_search_by_key(&nc, |e| e.0).is_err() {
                    let l = &mut col_rows[nc as usize];
                    l.push(i);
                    heap.push(Reverse((l.len(), nc)));
                }
            }
            rows[i as usize] = new;
        }
    }
    rank
}

fn merge<T: Clone>(
    a: &[(u32, T)],
    b: &[(u32, T)],
    f: impl Fn(Option<&T>, Option<&T>) -> Option<T>,
) -> Vec<(u32, T)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (c, x, y) = match (a.get(i), b.get(j)) {
            (Some(p), Some(q)) if p.0 == q.0 => {
                i += 1;
                j += 1;
                (p.0, Some(&p.1), Some(&q.1))
            }
            (Some(p), Some(q)) if p.0 < q.0 => {
                i += 1;
                (p.0, Some(&p.1), None)
            }
            (Some(p), None) => {
                i += 1;
                (p.0, Some(&p.1), None)
            }
            (_, Some(q)) => {
                j += 1;
                (q.0, None, Some(&q.1))
            }
            (None, None) => unreachable!(),
        };
        if let Some(v) = f(x, y) {
            out.push((c, v));
        }
    }
    out
}

fn entry<T>(row: &[(u32, T)], c: u32) -> &T {
    let k = row.binary_search_by_key(&c, |e| e.0).expect("entry present");
    &row[k].1
}

fn rows_of(m: &BoundaryMatrix) -> Vec<Vec<(u32, i64)>> {
    let mut rows: Vec<Vec<(u32, i64)>> = vec![Vec::new(); m.rows];
    for &(i, j, v) in &m.entries {
        if v != 0 {
            rows[i].push((j as u32, v));
        }
    }
    for r in &mut rows {
        r.sort_unstable_by_key(|e| e.0);
    }
    rows
}

/// Rank over `F_p`. Requires `p` prime and larger than every entry's
/// magnitude, so no entry vanishes on reduction.
pub fn rank_modp(m: &BoundaryMatrix, p: u64) -> Result<usize> {
    let max = m.max_abs();
    if p <= max {
        return Err(Error::PrimeTooSmall { p, max_entry: max });
    }
    let rows: Vec<Vec<(u32, u64)>> = rows_of(m)
        .into_iter()
        .map(|r| r.into_iter().map(|(c, v)| (c, v.rem_euclid(p as i64) as u64)).collect())
        .collect();
    Ok(sparse_rank(rows, m.cols, |pivot, target, c| {
        let f = mul_mod(*entry(target, c), pow_mod(*entry(pivot, c), p - 2, p), p);
        let nf = (p - f) % p;
        merge(target, pivot, |t, q| {
            let v = (t.copied().unwrap_or(0) + mul_mod(nf, q.copied().unwrap_or(0), p)) % p;
            (v != 0).then_some(v)
        })
    }))
}

/// Rank over the integers (hence the rationals) by fraction-free sparse
/// elimination; each updated row is divided by the gcd of its entries.
pub fn rank_fraction_free(m: &BoundaryMatrix) -> usize {
    let rows: Vec<Vec<(u32, BigInt)>> = rows_of(m)
        .into_iter()
        .map(|r| r.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect())
        .collect();
    sparse_rank(rows, m.cols, |pivot, target, c| {
        let a = entry(pivot, c).clone();
        let b = entry(target, c).clone();
        let mut out = merge(target, pivot, |t, q| {
            let v = t.map(|x| x * &a).unwrap_or_default() - q.map(|x| x * &b).unwrap_or_default();
            (!v.is_zero()).then_some(v)
        });
        let g = out.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v));
        if g > BigInt::from(1) {
            for (_, v) in &mut out {
                *v /= &g;
            }
        }
        out
    })
}

/// Rank over the rationals under `cfg`, with the evidence used.
pub fn rank_with(m: &BoundaryMatrix, cfg: &RankConfig) -> Result<RankReport> {
    if m.entries.is_empty() {
        return Ok(RankReport {
            rank: 0,
            modular: Vec::new(),
            exact: true,
        });
    }
    let mut modular = Vec::with_capacity(cfg.primes);
    for p in select_primes(cfg.primes, cfg.seed) {
        modular.push((p, rank_modp(m, p)?));
    }
    let agree = modular.windows(2).all(|w| w[0].1 == w[1].1);
    let small = m.rows.max(m.cols) <= cfg.exact_threshold;
    if agree && !small && !modular.is_empty() {
        return Ok(RankReport {
            rank: modular[0].1,
            modular,
            exact: false,
        });
    }
    let rank = rank_fraction_free(m);
    debug_assert!(modular.iter().all(|&(_, r)| r <= rank));
    Ok(RankReport {
        rank,
        modular,
        exact: true,
    })
}

/// Rank over the rationals with the default configuration.
pub fn rank_exact(m: &BoundaryMatrix) -> Result<usize> {
    Ok(rank_with(m, &RankConfig::default())?.rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};

    fn dense_rank(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> usize {
        let mut a = vec![vec![BigRational::zero(); cols]; rows];
        for &(i, j, v) in entries {
            a[i][j] += BigRational::from_integer(v.into());
        }
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in 0..rows {
                if r != rank && !a[r][c].is_zero() {
                    let f = &a[r][c] / &a[rank][c];
                    for k in c..cols {
                        let t = &a[rank][k] * &f;
                        a[r][k] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn matrix(rows: usize, cols: usize, entries: Vec<(usize, usize, i64)>) -> BoundaryMatrix {
        BoundaryMatrix::from_entries(rows, cols, entries)
    }

    #[test]
    fn primes() {
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
        assert!(!is_prime(1));
        // strong pseudoprime to the bases 2, 3, 5 and 7
        assert!(!is_prime(3_215_031_751));
        let ps = select_primes(5, 7);
        assert_eq!(ps, select_primes(5, 7));
        assert!(ps.iter().all(|&p| is_prime(p) && p < 1 << 31 && p > (1 << 31) - (1 << 24)));
    }

    #[test]
    fn trivial_ranks() {
        let zero = matrix(3, 4, vec![]);
        assert_eq!(rank_exact(&zero).unwrap(), 0);
        assert_eq!(rank_modp(&zero, 101).unwrap(), 0);
        let id = matrix(5, 5, (0..5).map(|i| (i, i, 1)).collect());
        assert_eq!(rank_exact(&id).unwrap(), 5);
        assert_eq!(matrix(0, 7, vec![]).rows, 0);
        assert_eq!(rank_exact(&matrix(0, 7, vec![])).unwrap(), 0);
    }

    #[test]
    fn small_prime_rejected() {
        let m = matrix(1, 1, vec![(0, 0, 7)]);
        assert!(matches!(rank_modp(&m, 7), Err(Error::PrimeTooSmall { p: 7, max_entry: 7 })));
        assert_eq!(rank_modp(&m, 11).unwrap(), 1);
    }

    #[test]
    fn unlucky_prime_lowers_rank() {
        // determinant 5
        let m = matrix(2, 2, vec![(0, 0, 1), (0, 1, 2), (1, 0, 3), (1, 1, 1)]);
        assert_eq!(rank_modp(&m, 5).unwrap(), 1);
        assert_eq!(rank_exact(&m).unwrap(), 2);
    }

    #[test]
    fn random_dense_against_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut entries = Vec::new();
            for i in 0..20 {
                for j in 0..20 {
                    entries.push((i, j, rng.gen_range(-9..=9)));
                }
            }
            // force a rank deficiency half of the time
            if rng.gen_bool(0.5) {
                for j in 0..20 {
                    let v: i64 = entries[j].2 * 2 - entries[20 + j].2;
                    entries.push((19, j, v - entries[19 * 20 + j].2));
                }
            }
            let expected = dense_rank(20, 20, &entries);
            let m = matrix(20, 20, entries);
            assert_eq!(rank_fraction_free(&m), expected);
            assert_eq!(rank_exact(&m).unwrap(), expected);
        }
    }

    proptest! {
        #[test]
        fn sparse_agrees_with_dense(
            rows in 1usize..14,
            cols in 1usize..14,
            raw in proptest::collection::vec((0usize..14, 0usize..14, -3i64..=3), 0..60),
        ) {
            let entries: Vec<_> = raw.into_iter().filter(|e| e.0 < rows && e.1 < cols).collect();
            let expected = dense_rank(rows, cols, &entries);
            let m = matrix(rows, cols, entries);
            prop_assert_eq!(rank_fraction_free(&m), expected);
            let p = select_primes(1, 3)[0];
            prop_assert!(rank_modp(&m, p).unwrap() <= expected);
            let cfg = RankConfig { exact_threshold: 0, ..RankConfig::default() };
            prop_assert_eq!(rank_with(&m, &cfg).unwrap().rank, expected);
        }
    }
}
