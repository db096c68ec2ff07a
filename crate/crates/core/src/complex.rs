//! Chain groups, boundary matrices and homology tables.
//!
//! The degree of a graph is its number of vertices and the boundary lowers
//! it by one. Matrix entries are integers: signs of collapses, summed when
//! several collapses give the same class.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalGraph;
pub use crate::enumerate::Mode;
use crate::enumerate::{closure, Closure};
use crate::error::{Error, Result};
use crate::exactrank::{rank_with, RankConfig};
use crate::orient::{is_zero, reference_orientation, signed_contract_with, ContractionSign, SignedGraph};

/// Which edges the boundary collapses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeFilter {
    All,
    /// Bridges only.
    Separating,
    /// Edges that are not bridges.
    NonSeparating,
}

/// Sparse rational chain in one chain group, indexed by basis position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainVector {
    pub rank: usize,
    pub degree: usize,
    pub mode: Mode,
    pub entries: BTreeMap<usize, Rational64>,
}

impl ChainVector {
    pub fn new(rank: usize, degree: usize, mode: Mode) -> Self {
        ChainVector {
            rank,
            degree,
            mode,
            entries: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, index: usize, coeff: Rational64) {
        let slot = self.entries.entry(index).or_insert_with(Rational64::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.entries.remove(&index);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(canonical key, numerator, denominator)` triples.
    pub fn to_triples(&self, basis: &[CanonicalGraph]) -> Vec<(String, i64, i64)> {
        self.entries
            .iter()
            .map(|(&i, c)| (basis[i].key(), *c.numer(), *c.denom()))
            .collect()
    }
}

/// Sparse integer matrix. Entries are 0-based `(row, col, value)`, sorted by
/// column then row, nonzero and without repeated positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, i64)>,
}

impl BoundaryMatrix {
    /// Sums repeated positions and drops zeros.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<(usize, usize, i64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (i, j, v) in entries {
            assert!(i < rows && j < cols, "entry ({i}, {j}) outside {rows}x{cols}");
            *acc.entry((j, i)).or_insert(0) += v;
        }
        BoundaryMatrix {
            rows,
            cols,
            entries: acc
                .into_iter()
                .filter(|&(_, v)| v != 0)
                .map(|((j, i), v)| (i, j, v))
                .collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        BoundaryMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn max_abs(&self) -> u64 {
        self.entries.iter().map(|e| e.2.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &BoundaryMatrix) -> BoundaryMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut by_col: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.cols];
        for &(i, j, v) in &self.entries {
            by_col[j].push((i, v));
        }
        let mut out = Vec::new();
        for &(k, j, w) in &rhs.entries {
            for &(i, v) in &by_col[k] {
                out.push((i, j, v * w));
            }
        }
        BoundaryMatrix::from_entries(self.rows, rhs.cols, out)
    }

    pub fn add(&self, rhs: &BoundaryMatrix) -> BoundaryMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        let mut all = self.entries.clone();
        all.extend_from_slice(&rhs.entries);
        BoundaryMatrix::from_entries(self.rows, self.cols, all)
    }

    /// Reorders rows and columns: row `i` moves to `row_perm[i]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> BoundaryMatrix {
        let entries = self
            .entries
            .iter()
            .map(|&(i, j, v)| (row_perm[i], col_perm[j], v))
            .collect();
        BoundaryMatrix::from_entries(self.rows, self.cols, entries)
    }

    /// Header `rows cols`, 1-based triplets `i j v`, terminator `0 0 0`.
    pub fn write_text<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.rows, self.cols)?;
        for &(i, j, v) in &self.entries {
            writeln!(out, "{} {} {}", i + 1, j + 1, v)?;
        }
        writeln!(out, "0 0 0")
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<BoundaryMatrix> {
        let parse_err = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = input.lines().enumerate();
        let (rows, cols) = loop {
            let Some((n, line)) = lines.next() else {
                return Err(parse_err(0, "missing header"));
            };
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 2 {
                return Err(parse_err(n + 1, "header must be `rows cols`"));
            }
            let r = f[0].parse().map_err(|_| parse_err(n + 1, "bad row count"))?;
            let c = f[1].parse().map_err(|_| parse_err(n + 1, "bad column count"))?;
            break (r, c);
        };
        let mut entries = Vec::new();
        for (n, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(n + 1, "triplet must be `i j v`"));
            }
            let i: usize = f[0].parse().map_err(|_| parse_err(n + 1, "bad row index"))?;
            let j: usize = f[1].parse().map_err(|_| parse_err(n + 1, "bad column index"))?;
            let v: i64 = f[2].parse().map_err(|_| parse_err(n + 1, "bad value"))?;
            if (i, j, v) == (0, 0, 0) {
                return Ok(BoundaryMatrix::from_entries(rows, cols, entries));
            }
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(parse_err(n + 1, "index out of range"));
            }
            entries.push((i - 1, j - 1, v));
        }
        Err(parse_err(0, "missing `0 0 0` terminator"))
    }
}

/// Collapses every edge of `c` passing `filter`, in the reference
/// orientation. Zero results (per `zero`) are dropped; the remaining terms
/// are summed by class and zero sums removed.
pub fn collapse_terms(
    c: &CanonicalGraph,
    filter: EdgeFilter,
    rule: ContractionSign,
    zero: &dyn Fn(&CanonicalGraph) -> bool,
) -> Result<BTreeMap<CanonicalGraph, i64>> {
    let g = c.graph();
    let or = reference_orientation(g);
    let bridges: HashSet<usize> = match filter {
        EdgeFilter::All => HashSet::new(),
        _ => g.bridges().into_iter().collect(),
    };
    let mut out: BTreeMap<CanonicalGraph, i64> = BTreeMap::new();
    for e in 0..g.num_edges() {
        if g.is_loop(e) {
            continue;
        }
        let take = match filter {
            EdgeFilter::All => true,
            EdgeFilter::Separating => bridges.contains(&e),
            EdgeFilter::NonSeparating => !bridges.contains(&e),
        };
        if !take {
            continue;
        }
        if let Some((d, s)) = signed_contract_with(g, &or, e, zero, rule)? {
            *out.entry(d).or_insert(0) += s;
        }
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

/// Boundary of a single basis graph. In the quotient, terms with a cut
/// vertex are dropped.
pub fn boundary_graph(c: &CanonicalGraph, mode: Mode, filter: EdgeFilter) -> Result<Vec<SignedGraph>> {
    let terms = collapse_terms(c, filter, ContractionSign::Positional, &is_zero)?;
    Ok(terms
        .into_iter()
        .filter(|(d, _)| mode != Mode::Quotient || !d.graph().has_cut_vertex())
        .map(|(graph, s)| SignedGraph {
            graph,
            coeff: Rational64::from_integer(s),
        })
        .collect())
}

/// Outcome of the `d^2 = 0` checks on one complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DsquaredReport {
    pub rank: usize,
    pub mode: String,
    pub full: bool,
    pub separating: bool,
    pub anticommute: bool,
    pub split: bool,
    pub failures: Vec<String>,
}

impl DsquaredReport {
    pub fn passed(&self) -> bool {
        self.full && self.separating && self.anticommute && self.split
    }
}

/// One row of a homology table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyRow {
    pub rank: usize,
    pub degree: usize,
    pub dim: usize,
    pub boundary_rank_out: usize,
    pub betti: usize,
}

/// Dimensions, boundary ranks and Betti numbers, top degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTable {
    pub rank: usize,
    pub mode: String,
    pub rows: Vec<HomologyRow>,
}

/// Builds the table from `dims[k] = dim C_k` and `ranks[k] = rank of the
/// boundary out of C_k`, both indexed by degree.
pub fn betti(rank: usize, mode: Mode, dims: &[usize], ranks: &[usize]) -> Result<HomologyTable> {
    let top = 2 * rank - 2;
    if dims.len() != top + 1 || ranks.len() != top + 1 {
        return Err(Error::SizeBound(format!(
            "expected {} degrees, got dims {} and ranks {}",
            top + 1,
            dims.len(),
            ranks.len()
        )));
    }
    let mut rows = Vec::new();
    for k in (2..=top).rev() {
        let incoming = if k < top { ranks[k + 1] } else { 0 };
        let b = dims[k] as i64 - ranks[k] as i64 - incoming as i64;
        if b < 0 || (k == 2 && ranks[k] != 0) {
            return Err(Error::SizeBound(format!(
                "inconsistent ranks at degree {k}: dim {} out {} in {incoming}",
                dims[k], ranks[k]
            )));
        }
        rows.push(HomologyRow {
            rank,
            degree: k,
            dim: dims[k],
            boundary_rank_out: ranks[k],
            betti: b as usize,
        });
    }
    Ok(HomologyTable {
        rank,
        mode: mode.name().to_string(),
        rows,
    })
}

impl HomologyTable {
    /// Dimensions, top degree first.
    pub fn dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.dim).collect()
    }

    /// Ranks of the boundary maps between consecutive nonempty-range
    /// degrees, top degree first, excluding the map out of degree two.
    pub fn boundary_ranks(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.degree > 2)
            .map(|r| r.boundary_rank_out)
            .collect()
    }

    /// `(degree, betti)` for the nonzero Betti numbers, top degree first.
    pub fn nonzero_betti(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .filter(|r| r.betti > 0)
            .map(|r| (r.degree, r.betti))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,degree,dim,boundary_rank_out,betti\n");
        for r in &self.rows {
            writeln!(s, "{},{},{},{},{}", r.rank, r.degree, r.dim, r.boundary_rank_out, r.betti)
                .expect("string write");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// One-line chain diagram, e.g. `C4[2] -1-> C3[1] -0-> C2[0]`.
    pub fn diagram(&self) -> String {
        let mut s = String::new();
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(s, " -{}-> ", self.rows[i - 1].boundary_rank_out).expect("string write");
            }
            write!(s, "C{}[{}]", r.degree, r.dim).expect("string write");
        }
        s
    }
}

/// A chain complex of fixed rank with its bases in every degree.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    closure: Closure,
    index: Vec<HashMap<CanonicalGraph, usize>>,
    zero: HashSet<CanonicalGraph>,
}

impl ChainComplex {
    pub fn new(rank: usize, mode: Mode) -> Result<Self> {
        Ok(Self::from_closure(closure(rank, mode)?))
    }

    pub fn from_closure(closure: Closure) -> Self {
        let index = closure
            .nonzero
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect())
            .collect();
        let zero = closure.zero.iter().flatten().cloned().collect();
        ChainComplex { closure, index, zero }
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    pub fn rank(&self) -> usize {
        self.closure.rank
    }

    pub fn mode(&self) -> Mode {
        self.closure.mode
    }

    pub fn top_degree(&self) -> usize {
        self.closure.top_degree()
    }

    /// Basis of `C_k`; empty outside `2..=top`.
    pub fn basis(&self, k: usize) -> &[CanonicalGraph] {
        self.closure.nonzero.get(k).map_or(&[], |b| b.as_slice())
    }

    pub fn dim(&self, k: usize) -> usize {
        self.basis(k).len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.closure.dims()
    }

    pub fn index_of(&self, k: usize, c: &CanonicalGraph) -> Option<usize> {
        self.index.get(k).and_then(|m| m.get(c).copied())
    }

    fn known_zero(&self, c: &CanonicalGraph) -> bool {
        c.graph().has_loop() || self.zero.contains(c)
    }

    /// Boundary of basis element `j` of `C_k` as a sparse column.
    pub fn boundary_column(
        &self,
        k: usize,
        j: usize,
        filter: EdgeFilter,
        rule: ContractionSign,
    ) -> Result<Vec<(usize, i64)>> {
        let c = &self.basis(k)[j];
        let terms = collapse_terms(c, filter, rule, &|d| self.known_zero(d))?;
        let mut col = Vec::with_capacity(terms.len());
        for (d, s) in terms {
            match self.index_of(k - 1, &d) {
                Some(i) => col.push((i, s)),
                None if self.mode() == Mode::Quotient && d.graph().has_cut_vertex() => {}
                None if is_zero(&d) => {}
                None => return Err(Error::MissingBasisElement(d.key())),
            }
        }
        col.sort_unstable();
        Ok(col)
    }

    pub fn boundary_vector(&self, k: usize, j: usize, filter: EdgeFilter) -> Result<ChainVector> {
        let mut v = ChainVector::new(self.rank(), k - 1, self.mode());
        for (i, s) in self.boundary_column(k, j, filter, ContractionSign::Positional)? {
            v.add_term(i, Rational64::from_integer(s));
        }
        Ok(v)
    }

    /// Matrix of the boundary `C_k -> C_{k-1}`; columns follow the basis of
    /// `C_k`.
    pub fn boundary_matrix(&self, k: usize, filter: EdgeFilter, rule: ContractionSign) -> Result<BoundaryMatrix> {
        let rows = if k >= 1 { self.dim(k - 1) } else { 0 };
        let cols = self.dim(k);
        if rows == 0 || cols == 0 {
            return Ok(BoundaryMatrix::zeros(rows, cols));
        }
        let columns: Vec<Result<Vec<(usize, i64)>>> = (0..cols)
            .into_par_iter()
            .map(|j| self.boundary_column(k, j, filter, rule))
            .collect();
        let mut entries = Vec::new();
        for (j, col) in columns.into_iter().enumerate() {
            entries.extend(col?.into_iter().map(|(i, v)| (i, j, v)));
        }
        Ok(BoundaryMatrix::from_entries(rows, cols, entries))
    }

    /// Checks `d^2 = 0` for the full boundary, for the bridge part alone,
    /// the anticommutation of the bridge and non-bridge parts, and that the
    /// two parts sum to the full boundary.
    pub fn dsquared(&self, rule: ContractionSign) -> Result<DsquaredReport> {
        let top = self.top_degree();
        let mats = |filter| -> Result<Vec<BoundaryMatrix>> {
            (0..=top)
                .into_par_iter()
                .map(|k| self.boundary_matrix(k, filter, rule))
                .collect()
        };
        let all = mats(EdgeFilter::All)?;
        let sep = mats(EdgeFilter::Separating)?;
        let non = mats(EdgeFilter::NonSeparating)?;
        let mut report = DsquaredReport {
            rank: self.rank(),
            mode: self.mode().name().to_string(),
            full: true,
            separating: true,
            anticommute: true,
            split: true,
            failures: Vec::new(),
        };
        for k in 2..=top {
            if sep[k].add(&non[k]) != all[k] {
                report.split = false;
                report.failures.push(format!("degree {k}: bridge and non-bridge parts do not sum"));
            }
            if k < 3 {
                continue;
            }
            if !all[k - 1].mul(&all[k]).is_zero() {
                report.full = false;
                report.failures.push(format!("degree {k}: d^2 != 0"));
            }
            if !sep[k - 1].mul(&sep[k]).is_zero() {
                report.separating = false;
                report.failures.push(format!("degree {k}: bridge part squares to nonzero"));
            }
            if !sep[k - 1].mul(&non[k]).add(&non[k - 1].mul(&sep[k])).is_zero() {
                report.anticommute = false;
                report.failures.push(format!("degree {k}: parts do not anticommute"));
            }
        }
        Ok(report)
    }

    /// Ranks of all boundary maps, indexed by source degree.
    pub fn boundary_ranks(&self, cfg: &RankConfig) -> Result<Vec<usize>> {
        let top = self.top_degree();
        (0..=top)
            .into_par_iter()
            .map(|k| {
                let m = self.boundary_matrix(k, EdgeFilter::All, ContractionSign::Positional)?;
                Ok(rank_with(&m, cfg)?.rank)
            })
            .collect()
    }

    pub fn homology(&self, cfg: &RankConfig) -> Result<HomologyTable> {
        let ranks = self.boundary_ranks(cfg)?;
        betti(self.rank(), self.mode(), &self.dims(), &ranks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::normal_form;
    use crate::exactrank::rank_exact;
    use crate::multigraph::named::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn theta_and_k4_boundaries() {
        let t = normal_form(&theta()).0;
        assert!(boundary_graph(&t, Mode::Quotient, EdgeFilter::All).unwrap().is_empty());
        let k = normal_form(&k4()).0;
        let terms = boundary_graph(&k, Mode::Quotient, EdgeFilter::All).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].coeff.numer().abs(), 6);
    }

    #[test]
    fn small_tables() {
        let cfg = RankConfig::default();
        let t3 = ChainComplex::new(3, Mode::Quotient).unwrap().homology(&cfg).unwrap();
        assert_eq!(t3.dims(), vec![2, 1, 0]);
        assert_eq!(t3.boundary_ranks(), vec![1, 0]);
        assert_eq!(t3.nonzero_betti(), vec![(4, 1)]);
        let t2 = ChainComplex::new(2, Mode::Quotient).unwrap().homology(&cfg).unwrap();
        assert_eq!(t2.nonzero_betti(), vec![(2, 1)]);
        assert_eq!(t3.diagram(), "C4[2] -1-> C3[1] -0-> C2[0]");
        assert!(t3.to_csv().starts_with("rank,degree,dim,boundary_rank_out,betti\n3,4,2,1,1\n"));
        let back: HomologyTable = serde_json::from_str(&t3.to_json()).unwrap();
        assert_eq!(back, t3);
    }

    #[test]
    fn betti_from_known_numbers() {
        // rank 5: dims 14,19,12,12,10,3,0 and ranks 12,7,5,7,3,0 from degree 8 down
        let mut dims = vec![0; 9];
        let mut ranks = vec![0; 9];
        for (k, d) in (2..=8).rev().zip([14, 19, 12, 12, 10, 3, 0]) {
            dims[k] = d;
        }
        for (k, r) in (3..=8).rev().zip([12, 7, 5, 7, 3, 0]) {
            ranks[k] = r;
        }
        let t = betti(5, Mode::Quotient, &dims, &ranks).unwrap();
        assert_eq!(t.nonzero_betti(), vec![(8, 2)]);
        ranks[8] = 15;
        assert!(betti(5, Mode::Quotient, &dims, &ranks).is_err());
    }

    #[test]
    fn dsquared_small_ranks() {
        for n in 2..=4 {
            for mode in Mode::ALL {
                let r = ChainComplex::new(n, mode).unwrap().dsquared(ContractionSign::Positional).unwrap();
                assert!(r.passed(), "{n} {mode}: {:?}", r.failures);
            }
        }
    }

    #[test]
    fn unsigned_rule_breaks_dsquared() {
        // at rank 4 every composite of quotient boundaries passes through
        // an empty chain group, so the control needs rank 5
        let c = ChainComplex::new(5, Mode::Quotient).unwrap();
        let r = c.dsquared(ContractionSign::Unsigned).unwrap();
        assert!(!r.full);
    }

    #[test]
    fn quotient_boundary_is_projected_full_boundary() {
        for n in 3..=4 {
            let full = ChainComplex::new(n, Mode::Full).unwrap();
            let quot = ChainComplex::new(n, Mode::Quotient).unwrap();
            for k in 3..=2 * n - 2 {
                let bf = full.boundary_matrix(k, EdgeFilter::All, ContractionSign::Positional).unwrap();
                let bq = quot.boundary_matrix(k, EdgeFilter::All, ContractionSign::Positional).unwrap();
                let mut projected = Vec::new();
                for &(i, j, v) in &bf.entries {
                    let (src, dst) = (&full.basis(k)[j], &full.basis(k - 1)[i]);
                    if let (Some(jq), Some(iq)) = (quot.index_of(k, src), quot.index_of(k - 1, dst)) {
                        projected.push((iq, jq, v));
                    }
                }
                assert_eq!(BoundaryMatrix::from_entries(bq.rows, bq.cols, projected), bq);
            }
        }
    }

    #[test]
    fn ranks_ignore_basis_order() {
        let c = ChainComplex::new(5, Mode::Quotient).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 3..=8 {
            let m = c.boundary_matrix(k, EdgeFilter::All, ContractionSign::Positional).unwrap();
            let mut rp: Vec<usize> = (0..m.rows).collect();
            let mut cp: Vec<usize> = (0..m.cols).collect();
            rp.shuffle(&mut rng);
            cp.shuffle(&mut rng);
            assert_eq!(rank_exact(&m).unwrap(), rank_exact(&m.permuted(&rp, &cp)).unwrap());
        }
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = BoundaryMatrix::from_entries(3, 2, vec![(2, 1, -2), (0, 0, 1), (0, 0, 2), (1, 1, 0)]);
        assert_eq!(m.to_text(), "3 2\n1 1 3\n3 2 -2\n0 0 0\n");
        assert_eq!(BoundaryMatrix::read_text(m.to_text().as_bytes()).unwrap(), m);
        assert!(BoundaryMatrix::read_text("3 2\n1 1 3\n".as_bytes()).is_err());
        assert!(BoundaryMatrix::read_text("3 2\n4 1 3\n0 0 0\n".as_bytes()).is_err());
        let empty = BoundaryMatrix::zeros(0, 4);
        assert_eq!(BoundaryMatrix::read_text(empty.to_text().as_bytes()).unwrap(), empty);
    }

    #[test]
    fn chain_vector_cancels() {
        let mut v = ChainVector::new(3, 3, Mode::Quotient);
        v.add_term(0, Rational64::from_integer(2));
        v.add_term(0, Rational64::from_integer(-2));
        assert!(v.is_zero());
    }
}
