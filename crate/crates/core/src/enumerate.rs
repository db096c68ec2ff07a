//! Chain-group bases.
//!
//! Cubic graphs without cut vertices are grown from the theta graph by two
//! local moves; lower degrees are reached by collapsing edges. An
//! independent matching-based enumerator of all connected cubic graphs
//! serves as an oracle and as the seed of the unreduced complex.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::canonical::{normal_form, CanonicalGraph};
use crate::error::{Error, Result};
use crate::multigraph::{named, read_records, EdgeId, Multigraph, Vertex};
use crate::orient::is_zero;

/// Which chain complex a basis belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Graphs without cut vertices; the quotient by the cut-vertex subcomplex.
    Quotient,
    /// All connected graphs with every valence at least three.
    Full,
    /// Graphs with at least one cut vertex.
    CutOnly,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Quotient, Mode::Full, Mode::CutOnly];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Quotient => "quotient",
            Mode::Full => "full",
            Mode::CutOnly => "cut_only",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "quotient" => Ok(Mode::Quotient),
            "full" => Ok(Mode::Full),
            "cut_only" | "cut" => Ok(Mode::CutOnly),
            other => Err(format!("unknown mode `{other}` (expected quotient, full or cut-only)")),
        }
    }
}

/// Largest rank accepted by [`oracle_cubic`].
pub const ORACLE_MAX_RANK: usize = 6;

/// Subdivides `e1` and `e2` by new vertices `V` and `V+1` and joins them.
/// Each subdivided edge keeps its id for the half next to its tail; the
/// halves next to the heads are appended, followed by the new edge.
pub fn bridge_insert(g: &Multigraph, e1: EdgeId, e2: EdgeId) -> Result<Multigraph> {
    for e in [e1, e2] {
        if e >= g.num_edges() {
            return Err(Error::EdgeOutOfRange {
                edge: e,
                num_edges: g.num_edges(),
            });
        }
    }
    if e1 == e2 {
        return Err(Error::SameEdge);
    }
    let n = g.num_vertices();
    let (a, b) = (n, n + 1);
    let mut edges: Vec<(Vertex, Vertex)> = (0..g.num_edges()).map(|e| g.endpoints(e)).collect();
    let (t1, h1) = edges[e1];
    let (t2, h2) = edges[e2];
    edges[e1] = (t1, a);
    edges[e2] = (t2, b);
    edges.extend([(a, h1), (b, h2), (a, b)]);
    Multigraph::new(n + 2, &edges)
}

/// Replaces edge `e = (t, h)` by the path `t - a - b - h` and doubles the
/// middle edge.
pub fn doubled_edge_insert(g: &Multigraph, e: EdgeId) -> Result<Multigraph> {
    if e >= g.num_edges() {
        return Err(Error::EdgeOutOfRange {
            edge: e,
            num_edges: g.num_edges(),
        });
    }
    let n = g.num_vertices();
    let (a, b) = (n, n + 1);
    let mut edges: Vec<(Vertex, Vertex)> = (0..g.num_edges()).map(|e| g.endpoints(e)).collect();
    let (t, h) = edges[e];
    edges[e] = (t, a);
    edges.extend([(a, b), (b, h), (a, b)]);
    Multigraph::new(n + 2, &edges)
}

fn check_rank(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::RankOutOfRange(n))
    } else {
        Ok(())
    }
}

/// Children of one parent under both moves, canonized.
fn grow(g: &Multigraph) -> Vec<CanonicalGraph> {
    let m = g.num_edges();
    let mut out = Vec::with_capacity(m * (m + 1) / 2);
    for e1 in 0..m {
        for e2 in e1 + 1..m {
            let child = bridge_insert(g, e1, e2).expect("distinct edges");
            out.push(normal_form(&child).0);
        }
        out.push(normal_form(&doubled_edge_insert(g, e1).expect("edge in range")).0);
    }
    out
}

/// All cubic connected graphs of rank `n` without cut vertices (zero
/// graphs included), grown from the theta graph. Sorted.
pub fn cubic_no_cut(n: usize) -> Result<Vec<CanonicalGraph>> {
    check_rank(n)?;
    let mut level = vec![normal_form(&named::theta()).0];
    for _ in 2..n {
        let children: Vec<Vec<CanonicalGraph>> = level.par_iter().map(|c| grow(c.graph())).collect();
        let set: BTreeSet<CanonicalGraph> = children
            .into_iter()
            .flatten()
            .filter(|c| !c.graph().has_cut_vertex())
            .collect();
        level = set.into_iter().collect();
    }
    Ok(level)
}

struct Matcher {
    free: Vec<u8>,
    edges: Vec<(Vertex, Vertex)>,
    discovered: usize,
    out: Vec<Multigraph>,
}

impl Matcher {
    fn run(&mut self) {
        let n = self.free.len();
        let Some(v) = (0..n).find(|&v| self.free[v] > 0) else {
            self.out.push(Multigraph::new(n, &self.edges).expect("valid edges"));
            return;
        };
        if v >= self.discovered {
            // every discovered vertex is saturated: a second component
            return;
        }
        self.free[v] -= 1;
        let limit = (self.discovered + 1).min(n);
        for w in v..limit {
            if self.free[w] == 0 {
                continue;
            }
            let newly = w == self.discovered;
            self.free[w] -= 1;
            if newly {
                self.discovered += 1;
            }
            self.edges.push((v, w));
            self.run();
            self.edges.pop();
            if newly {
                self.discovered -= 1;
            }
            self.free[w] += 1;
        }
        self.free[v] += 1;
    }
}

/// All connected cubic multigraphs of rank `n`, loops and cut vertices
/// included, by exhaustive pairing of the half-edges of `2n - 2` tripods.
/// The smallest free half-edge of the lowest unsaturated vertex is paired
/// with an already reached vertex or the next unreached one, which keeps
/// every partial graph connected.
pub fn oracle_cubic(n: usize) -> Result<Vec<CanonicalGraph>> {
    check_rank(n)?;
    if n > ORACLE_MAX_RANK {
        return Err(Error::SizeBound(format!(
            "matching enumeration is limited to rank {ORACLE_MAX_RANK}, got {n}"
        )));
    }
    let v = 2 * n - 2;
    // split on the partners of the first half-edge to parallelize
    let firsts: Vec<Vertex> = (0..v.min(2)).collect();
    let shards: Vec<BTreeSet<CanonicalGraph>> = firsts
        .par_iter()
        .map(|&w| {
            let mut m = Matcher {
                free: vec![3; v],
                edges: vec![(0, w)],
                discovered: 1,
                out: Vec::new(),
            };
            m.free[0] -= 1;
            m.free[w] -= 1;
            if w == 1 {
                m.discovered = 2;
            }
            m.run();
            m.out.iter().map(|g| normal_form(g).0).collect()
        })
        .collect();
    let all: BTreeSet<CanonicalGraph> = shards.into_iter().flatten().collect();
    Ok(all.into_iter().collect())
}

/// Bases of one complex in every degree, with the zero classes met along the
/// way. Index `k` of each list holds the graphs with `k` vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    pub rank: usize,
    pub mode: Mode,
    pub nonzero: Vec<Vec<CanonicalGraph>>,
    /// Loop-free zero graphs of every degree, plus graphs with loops among
    /// the cubic seeds.
    pub zero: Vec<Vec<CanonicalGraph>>,
}

impl Closure {
    pub fn top_degree(&self) -> usize {
        2 * self.rank - 2
    }

    pub fn basis(&self, k: usize) -> Result<&[CanonicalGraph]> {
        check_degree(self.rank, k)?;
        Ok(&self.nonzero[k])
    }

    pub fn dims(&self) -> Vec<usize> {
        self.nonzero.iter().map(Vec::len).collect()
    }
}

fn check_degree(n: usize, k: usize) -> Result<()> {
    let max = 2 * n - 2;
    if k < 2 || k > max {
        Err(Error::DegreeOutOfRange { rank: n, degree: k, max })
    } else {
        Ok(())
    }
}

/// Closes the cubic seeds of a complex under edge collapse. Graphs with
/// loops stay loopy under collapse and are never expanded; cut vertices
/// likewise persist, so the quotient closure keeps only cut-free graphs.
/// Zero graphs are expanded, since their collapses can be nonzero.
pub fn closure(n: usize, mode: Mode) -> Result<Closure> {
    check_rank(n)?;
    let seeds = match mode {
        Mode::Quotient => cubic_no_cut(n)?,
        Mode::Full | Mode::CutOnly => oracle_cubic(n)?,
    };
    let top = 2 * n - 2;
    let mut nonzero = vec![Vec::new(); top + 1];
    let mut zero = vec![Vec::new(); top + 1];
    let keep = |c: &CanonicalGraph| mode != Mode::Quotient || !c.graph().has_cut_vertex();

    let mut frontier: Vec<CanonicalGraph> = Vec::new();
    for c in seeds {
        if c.graph().has_loop() {
            zero[top].push(c);
        } else {
            frontier.push(c);
        }
    }
    for k in (2..=top).rev() {
        let flags: Vec<bool> = frontier.par_iter().map(is_zero).collect();
        for (c, z) in frontier.iter().zip(flags) {
            if z {
                zero[k].push(c.clone());
            } else if mode != Mode::CutOnly || c.graph().has_cut_vertex() {
                nonzero[k].push(c.clone());
            }
        }
        if k == 2 {
            break;
        }
        let children: Vec<Vec<CanonicalGraph>> = frontier
            .par_iter()
            .map(|c| {
                let g = c.graph();
                (0..g.num_edges())
                    .filter(|&e| !g.is_loop(e))
                    .map(|e| normal_form(&g.contract_edge(e).expect("non-loop edge")).0)
                    .filter(|d| !d.graph().has_loop() && keep(d))
                    .collect()
            })
            .collect();
        let set: BTreeSet<CanonicalGraph> = children.into_iter().flatten().collect();
        frontier = set.into_iter().collect();
    }
    Ok(Closure {
        rank: n,
        mode,
        nonzero,
        zero,
    })
}

/// Nonzero basis of `C_k` for rank `n`, sorted.
pub fn basis(n: usize, k: usize, mode: Mode) -> Result<Vec<CanonicalGraph>> {
    check_rank(n)?;
    check_degree(n, k)?;
    Ok(closure(n, mode)?.nonzero.swap_remove(k))
}

pub fn basis_file_name(n: usize, k: usize, mode: Mode) -> String {
    format!("basis_r{n}_d{k}_{mode}.txt")
}

pub fn basis_path(dir: &Path, n: usize, k: usize, mode: Mode) -> PathBuf {
    dir.join(basis_file_name(n, k, mode))
}

pub fn write_basis<W: Write>(out: &mut W, basis: &[CanonicalGraph]) -> std::io::Result<()> {
    for c in basis {
        c.graph().write_record(out)?;
    }
    Ok(())
}

/// Reads a basis file back; graphs are re-canonized and must already be in
/// sorted normal form.
pub fn read_basis<R: BufRead>(input: R) -> Result<Vec<CanonicalGraph>> {
    let graphs = read_records(input)?;
    let mut out = Vec::with_capacity(graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        let c = normal_form(g).0;
        if out.last().is_some_and(|p: &CanonicalGraph| p >= &c) {
            return Err(Error::Parse {
                line: i + 1,
                msg: "basis records must be distinct and sorted".into(),
            });
        }
        out.push(c);
    }
    Ok(out)
}
