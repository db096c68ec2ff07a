//! Small-rank confirmations: the cut-vertex subcomplex is acyclic, the
//! quotient map is a quasi-isomorphism, and blow-up complexes of graphs with
//! cut vertices are acyclic.
//!
//! A blow-up of a cut vertex `v` is indexed by a set of pairwise compatible
//! 2-block partitions of the components of `G - v`. A partition is stored as
//! the bitmask of its block avoiding component 0 (its cluster); two clusters
//! are compatible iff they are nested or disjoint.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::canonical::{normal_form, CanonicalGraph};
use crate::complex::{collapse_terms, BoundaryMatrix, ChainComplex, EdgeFilter, HomologyTable, Mode};
use crate::error::{Error, Result};
use crate::exactrank::{rank_with, RankConfig};
use crate::multigraph::{Multigraph, Vertex};
use crate::orient::{is_zero, ContractionSign};

/// Largest rank accepted by the complex-level checks.
pub const VERIFY_MAX_RANK: usize = 6;
/// Largest number of components at a cut vertex for blow-ups.
pub const MAX_BLOWUP_COMPONENTS: usize = 5;
/// Largest number of partition-set tuples in one blow-up complex.
pub const MAX_BLOWUP_CELLS: usize = 200_000;

fn check_verify_rank(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::RankOutOfRange(n));
    }
    if n > VERIFY_MAX_RANK {
        return Err(Error::SizeBound(format!("verification is limited to rank {VERIFY_MAX_RANK}, got {n}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcyclicityReport {
    pub rank: usize,
    pub table: HomologyTable,
    pub passed: bool,
}

/// Homology of the subcomplex spanned by graphs with a cut vertex; passes
/// iff every Betti number vanishes.
pub fn verify_cut_acyclic(n: usize, cfg: &RankConfig) -> Result<AcyclicityReport> {
    check_verify_rank(n)?;
    let table = ChainComplex::new(n, Mode::CutOnly)?.homology(cfg)?;
    let passed = table.rows.iter().all(|r| r.betti == 0);
    Ok(AcyclicityReport { rank: n, table, passed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiIsoReport {
    pub rank: usize,
    pub full: HomologyTable,
    pub quotient: HomologyTable,
    pub passed: bool,
}

/// Compares Betti numbers of the full complex and of the quotient by the
/// cut-vertex subcomplex, degree by degree.
pub fn verify_quasi_iso(n: usize, cfg: &RankConfig) -> Result<QuasiIsoReport> {
    check_verify_rank(n)?;
    let full = ChainComplex::new(n, Mode::Full)?.homology(cfg)?;
    let quotient = ChainComplex::new(n, Mode::Quotient)?.homology(cfg)?;
    let betti = |t: &HomologyTable| t.rows.iter().map(|r| (r.degree, r.betti)).collect::<Vec<_>>();
    let passed = betti(&full) == betti(&quotient);
    Ok(QuasiIsoReport {
        rank: n,
        full,
        quotient,
        passed,
    })
}

/// Two clusters are compatible iff nested or disjoint.
pub fn clusters_compatible(a: u32, b: u32) -> bool {
    a & b == 0 || a & b == a || a & b == b
}

/// A set of 2-block partitions of `ground` components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PartitionSet {
    pub ground: usize,
    /// Clusters, sorted.
    pub partitions: Vec<u32>,
}

impl PartitionSet {
    pub fn is_pairwise_compatible(&self) -> bool {
        self.partitions
            .iter()
            .enumerate()
            .all(|(i, &a)| self.partitions[i + 1..].iter().all(|&b| clusters_compatible(a, b)))
    }

    /// The two blocks of each partition as component lists.
    pub fn blocks(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        self.partitions
            .iter()
            .map(|&m| {
                let (y, x): (Vec<usize>, Vec<usize>) = (0..self.ground).partition(|&c| m >> c & 1 == 1);
                (x, y)
            })
            .collect()
    }
}

/// All clusters for `l` components: nonempty subsets avoiding component 0.
pub fn all_clusters(l: usize) -> Vec<u32> {
    (1..1u32 << l).filter(|m| m & 1 == 0).collect()
}

/// All pairwise compatible sets of clusters, the empty set included, in
/// order of size then lexicographically.
pub fn compatible_sets(l: usize) -> Vec<Vec<u32>> {
    let clusters = all_clusters(l);
    let mut out = Vec::new();
    fn extend(clusters: &[u32], start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        for i in start..clusters.len() {
            if cur.iter().all(|&c| clusters_compatible(c, clusters[i])) {
                cur.push(clusters[i]);
                extend(clusters, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    extend(&clusters, 0, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

/// Components of `G - v` seen from each half-edge at `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutVertexSplits {
    pub vertex: Vertex,
    pub num_components: usize,
    /// `(half-edge at v, component index)`.
    pub half_edge_component: Vec<(usize, usize)>,
}

fn cut_vertex_splits(g: &Multigraph, v: Vertex) -> CutVertexSplits {
    // components of G - v, numbered by smallest vertex
    let n = g.num_vertices();
    let inc = g.incidence();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for s in 0..n {
        if s == v || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &h in &inc[u] {
                let w = g.half_edge_vertex(h ^ 1);
                if w != v && comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    let half_edge_component = inc[v].iter().map(|&h| (h, comp[g.half_edge_vertex(h ^ 1)])).collect();
    CutVertexSplits {
        vertex: v,
        num_components: count,
        half_edge_component,
    }
}

/// The graph obtained by blowing up each cut vertex `cuts[i].vertex` into
/// the tree of `sets[i]`. The cut vertex becomes the root of its tree, the
/// node holding component 0; every other tree node is appended.
pub fn blowup_graph(g: &Multigraph, cuts: &[CutVertexSplits], sets: &[Vec<u32>]) -> Multigraph {
    let mut ends: Vec<Vertex> = g.half_edge_vertices().to_vec();
    let mut extra_edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut next = g.num_vertices();
    for (cut, set) in cuts.iter().zip(sets) {
        let node: Vec<Vertex> = set
            .iter()
            .map(|_| {
                next += 1;
                next - 1
            })
            .collect();
        // smallest cluster containing `mask`, strictly larger when `strict`
        let owner = |mask: u32, strict: bool| -> Vertex {
            set.iter()
                .enumerate()
                .filter(|&(_, &c)| c & mask == mask && !(strict && c == mask))
                .min_by_key(|&(_, &c)| c.count_ones())
                .map_or(cut.vertex, |(i, _)| node[i])
        };
        for (i, &c) in set.iter().enumerate() {
            extra_edges.push((owner(c, true), node[i]));
        }
        for &(h, comp) in &cut.half_edge_component {
            ends[h] = owner(1 << comp, false);
        }
    }
    let mut edges: Vec<(Vertex, Vertex)> = ends.chunks(2).map(|p| (p[0], p[1])).collect();
    edges.extend(extra_edges);
    Multigraph::new(next, &edges).expect("blow-up is well formed")
}

/// The complex of blow-ups of `G` with the bridge-collapsing differential,
/// on isomorphism classes of oriented graphs (zero classes dropped).
#[derive(Clone, Debug)]
pub struct BlowupComplex {
    pub base: CanonicalGraph,
    pub cuts: Vec<CutVertexSplits>,
    /// Number of tuples of compatible partition sets, by total size.
    pub cells_by_size: Vec<usize>,
    /// Classes by number of vertices.
    pub bases: BTreeMap<usize, Vec<CanonicalGraph>>,
}

fn check_blowup_input(g: &Multigraph) -> Result<Vec<Vertex>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if let Some(e) = (0..g.num_edges()).find(|&e| g.is_loop(e)) {
        return Err(Error::LoopEdge(e));
    }
    if g.has_bridge() {
        return Err(Error::HasBridge);
    }
    let cuts = g.cut_vertices()?;
    if cuts.is_empty() {
        return Err(Error::NoCutVertex);
    }
    Ok(cuts)
}

fn all_tuples(cuts: &[CutVertexSplits]) -> Result<Vec<Vec<Vec<u32>>>> {
    let per: Vec<Vec<Vec<u32>>> = cuts.iter().map(|c| compatible_sets(c.num_components)).collect();
    let total: usize = per.iter().map(Vec::len).product();
    if total > MAX_BLOWUP_CELLS {
        return Err(Error::SizeBound(format!("{total} blow-up cells exceed {MAX_BLOWUP_CELLS}")));
    }
    let mut tuples: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for options in &per {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                options.iter().map(move |o| {
                    let mut t = t.clone();
                    t.push(o.clone());
                    t
                })
            })
            .collect();
    }
    Ok(tuples)
}

pub fn blowup_complex(g: &Multigraph) -> Result<BlowupComplex> {
    let cut_list = check_blowup_input(g)?;
    let cuts: Vec<CutVertexSplits> = cut_list.iter().map(|&v| cut_vertex_splits(g, v)).collect();
    if let Some(c) = cuts.iter().find(|c| c.num_components > MAX_BLOWUP_COMPONENTS) {
        return Err(Error::SizeBound(format!(
            "{} components at vertex {} exceed {MAX_BLOWUP_COMPONENTS}",
            c.num_components, c.vertex
        )));
    }
    let tuples = all_tuples(&cuts)?;
    let mut cells_by_size = Vec::new();
    for t in &tuples {
        let s: usize = t.iter().map(Vec::len).sum();
        if cells_by_size.len() <= s {
            cells_by_size.resize(s + 1, 0);
        }
        cells_by_size[s] += 1;
    }
    let graphs: Vec<CanonicalGraph> = tuples
        .par_iter()
        .map(|t| normal_form(&blowup_graph(g, &cuts, t)).0)
        .collect();
    let mut bases: BTreeMap<usize, BTreeSet<CanonicalGraph>> = BTreeMap::new();
    for c in graphs {
        let k = c.num_vertices();
        let slot = bases.entry(k).or_default();
        if !slot.contains(&c) && !is_zero(&c) {
            slot.insert(c);
        }
    }
    Ok(BlowupComplex {
        base: normal_form(g).0,
        cuts,
        cells_by_size,
        bases: bases.into_iter().map(|(k, s)| (k, s.into_iter().collect())).collect(),
    })
}

impl BlowupComplex {
    pub fn degrees(&self) -> std::ops::RangeInclusive<usize> {
        let lo = self.base.num_vertices();
        let hi = *self.bases.keys().max().unwrap_or(&lo);
        lo..=hi
    }

    pub fn basis(&self, k: usize) -> &[CanonicalGraph] {
        self.bases.get(&k).map_or(&[], |b| b.as_slice())
    }

    /// Matrix of the bridge-collapsing differential out of degree `k`.
    pub fn matrix(&self, k: usize) -> Result<BoundaryMatrix> {
        let (src, dst) = (self.basis(k), self.basis(k.wrapping_sub(1)));
        let index: HashMap<&CanonicalGraph, usize> = dst.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut entries = Vec::new();
        for (j, c) in src.iter().enumerate() {
            for (d, s) in collapse_terms(c, EdgeFilter::Separating, ContractionSign::Positional, &is_zero)? {
                let i = *index.get(&d).ok_or_else(|| Error::MissingBasisElement(d.key()))?;
                entries.push((i, j, s));
            }
        }
        Ok(BoundaryMatrix::from_entries(dst.len(), src.len(), entries))
    }
}

/// Augmented chain complex of compatible partition sets, as a tensor
/// product over cut vertices; returns its Betti numbers by total size.
pub fn labeled_partition_betti(component_counts: &[usize], cfg: &RankConfig) -> Result<Vec<usize>> {
    let fake: Vec<CutVertexSplits> = component_counts
        .iter()
        .map(|&l| CutVertexSplits {
            vertex: 0,
            num_components: l,
            half_edge_component: Vec::new(),
        })
        .collect();
    let tuples = all_tuples(&fake)?;
    let size = |t: &Vec<Vec<u32>>| t.iter().map(Vec::len).sum::<usize>();
    let top = tuples.iter().map(size).max().unwrap_or(0);
    let mut by_size: Vec<Vec<&Vec<Vec<u32>>>> = vec![Vec::new(); top + 1];
    for t in &tuples {
        by_size[size(t)].push(t);
    }
    let index: Vec<HashMap<&Vec<Vec<u32>>, usize>> = by_size
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, &t)| (t, i)).collect())
        .collect();
    let mut ranks = vec![0; top + 2];
    for s in 1..=top {
        let mut entries = Vec::new();
        for (j, t) in by_size[s].iter().enumerate() {
            let mut before = 0;
            for (f, set) in t.iter().enumerate() {
                for r in 0..set.len() {
                    let mut face = (*t).clone();
                    face[f].remove(r);
                    let sign = if (before + r) % 2 == 0 { 1 } else { -1 };
                    entries.push((index[s - 1][&face], j, sign));
                }
                before += set.len();
            }
        }
        let m = BoundaryMatrix::from_entries(by_size[s - 1].len(), by_size[s].len(), entries);
        ranks[s] = rank_with(&m, cfg)?.rank;
    }
    Ok((0..=top).map(|s| by_size[s].len() - ranks[s] - ranks[s + 1]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupReport {
    pub graph: String,
    pub cut_vertices: Vec<Vertex>,
    pub components: Vec<usize>,
    pub cone: bool,
    pub cells_by_size: Vec<usize>,
    pub labeled_betti: Vec<usize>,
    pub class_dims: Vec<(usize, usize)>,
    pub class_betti: Vec<(usize, usize)>,
    pub dsquared: bool,
    pub passed: bool,
}

/// Builds the blow-up complex of `g`, checks that each cut vertex's
/// partition complex is a cone on `{c_0 | rest}`, that `d^2 = 0`, and that
/// both the labeled and the class complexes are acyclic.
pub fn verify_rg_acyclic(g: &Multigraph, cfg: &RankConfig) -> Result<BlowupReport> {
    let bc = blowup_complex(g)?;
    let components: Vec<usize> = bc.cuts.iter().map(|c| c.num_components).collect();
    let cone = components.iter().all(|&l| {
        let apex = all_clusters(l).into_iter().max().expect("at least two components");
        apex.count_ones() as usize == l - 1 && all_clusters(l).iter().all(|&c| clusters_compatible(apex, c))
    });
    let labeled_betti = labeled_partition_betti(&components, cfg)?;
    let degrees: Vec<usize> = bc.degrees().collect();
    let mats: Vec<BoundaryMatrix> = degrees.iter().map(|&k| bc.matrix(k)).collect::<Result<_>>()?;
    let mut dsquared = true;
    for w in mats.windows(2) {
        if !w[0].mul(&w[1]).is_zero() {
            dsquared = false;
        }
    }
    let ranks: Vec<usize> = mats.iter().map(|m| rank_with(m, cfg).map(|r| r.rank)).collect::<Result<_>>()?;
    let mut class_betti = Vec::new();
    let mut class_dims = Vec::new();
    for (i, &k) in degrees.iter().enumerate() {
        let dim = bc.basis(k).len();
        let out = ranks[i];
        let inc = ranks.get(i + 1).copied().unwrap_or(0);
        class_dims.push((k, dim));
        class_betti.push((k, dim - out - inc));
    }
    let passed = cone && dsquared && labeled_betti.iter().all(|&b| b == 0) && class_betti.iter().all(|&(_, b)| b == 0);
    Ok(BlowupReport {
        graph: bc.base.key(),
        cut_vertices: bc.cuts.iter().map(|c| c.vertex).collect(),
        components,
        cone,
        cells_by_size: bc.cells_by_size,
        labeled_betti,
        class_dims,
        class_betti,
        dsquared,
        passed,
    })
}

/// Runs [`verify_rg_acyclic`] on every loop-free, bridgeless graph with a
/// cut vertex of rank `n`, zero classes included, skipping those over the
/// size bounds.
pub fn verify_rg_rank(n: usize, cfg: &RankConfig) -> Result<Vec<BlowupReport>> {
    check_verify_rank(n)?;
    let cx = ChainComplex::new(n, Mode::CutOnly)?;
    let closure = cx.closure();
    let candidates: Vec<CanonicalGraph> = closure
        .nonzero
        .iter()
        .chain(&closure.zero)
        .flatten()
        .filter(|c| {
            let g = c.graph();
            !g.has_loop() && !g.has_bridge() && g.has_cut_vertex()
        })
        .cloned()
        .collect();
    let results: Vec<Result<BlowupReport>> = candidates.par_iter().map(|c| verify_rg_acyclic(c.graph(), cfg)).collect();
    let mut out = Vec::new();
    for r in results {
        match r {
            Ok(rep) => out.push(rep),
            Err(Error::SizeBound(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::named::*;

    #[test]
    fn compatibility_matches_block_inclusion() {
        // X1 ⊂ X2, X1 ⊂ Y2, Y1 ⊂ X2 or Y1 ⊂ Y2
        for l in 2..=5 {
            let full = (1u32 << l) - 1;
            for &a in &all_clusters(l) {
                for &b in &all_clusters(l) {
                    let (x1, y1, x2, y2) = (full ^ a, a, full ^ b, b);
                    let sub = |p: u32, q: u32| p & q == p;
                    let direct = sub(x1, x2) || sub(x1, y2) || sub(y1, x2) || sub(y1, y2);
                    assert_eq!(direct, clusters_compatible(a, b));
                }
            }
        }
    }

    #[test]
    fn three_components_form_a_triangle() {
        let sets = compatible_sets(3);
        let by_size: Vec<usize> = (0..=3).map(|s| sets.iter().filter(|x| x.len() == s).count()).collect();
        assert_eq!(by_size, vec![1, 3, 3, 1]);
        assert_eq!(compatible_sets(2).len(), 2);
        let p = PartitionSet { ground: 3, partitions: vec![2, 4] };
        assert!(p.is_pairwise_compatible());
        assert_eq!(p.blocks()[0], (vec![0, 2], vec![1]));
        let q = PartitionSet { ground: 4, partitions: vec![6, 10] };
        assert!(!q.is_pairwise_compatible());
    }

    #[test]
    fn labeled_complexes_are_acyclic() {
        let cfg = RankConfig::default();
        for l in 2..=5 {
            assert!(labeled_partition_betti(&[l], &cfg).unwrap().iter().all(|&b| b == 0));
        }
        assert!(labeled_partition_betti(&[2, 3], &cfg).unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn theta_bouquets() {
        let cfg = RankConfig::default();
        for count in 2..=3 {
            let r = verify_rg_acyclic(&theta_bouquet(count), &cfg).unwrap();
            assert!(r.passed, "{r:?}");
            assert_eq!(r.components, vec![count]);
        }
        assert!(matches!(verify_rg_acyclic(&theta(), &cfg), Err(Error::NoCutVertex)));
        let bridged = Multigraph::new(4, &[(0, 1), (0, 1), (0, 1), (1, 2), (2, 3), (2, 3), (2, 3)]).unwrap();
        assert!(matches!(verify_rg_acyclic(&bridged, &cfg), Err(Error::HasBridge)));
    }

    #[test]
    fn blowup_of_single_split() {
        let g = theta_bouquet(2);
        let cuts = vec![cut_vertex_splits(&g, 0)];
        let h = blowup_graph(&g, &cuts, &[vec![2]]);
        assert_eq!((h.num_vertices(), h.num_edges()), (4, 7));
        assert_eq!(h.bridges().len(), 1);
        assert!(normal_form(&h.contract_edge(h.bridges()[0]).unwrap()).0 == normal_form(&g).0);
    }

    #[test]
    fn small_rank_theorems() {
        let cfg = RankConfig::default();
        for n in 2..=4 {
            assert!(verify_cut_acyclic(n, &cfg).unwrap().passed);
            assert!(verify_quasi_iso(n, &cfg).unwrap().passed);
        }
        assert!(matches!(verify_cut_acyclic(VERIFY_MAX_RANK + 1, &cfg), Err(Error::SizeBound(_))));
    }

    #[test]
    fn rank_four_and_five_blowups() {
        let cfg = RankConfig::default();
        assert_eq!(verify_rg_rank(4, &cfg).unwrap().len(), 3);
        let five = verify_rg_rank(5, &cfg).unwrap();
        assert!(five.iter().all(|r| r.passed));
        // some class complexes are nonzero
        assert!(five.iter().any(|r| r.class_dims.iter().any(|&(_, d)| d > 0)));
        assert!(five.iter().any(|r| r.cut_vertices.len() == 2));
    }
}
