//! Normal forms, isomorphism tests and automorphism groups.
//!
//! The normal form of a graph is the vertex ordering whose adjacency matrix,
//! read row by row along the upper triangle (diagonal included), is latest in
//! lexicographic order. Vertices are first blocked by type and valence and
//! only permuted within their block. The search places one vertex per
//! position; once the vertex at position `i` is fixed, its row is maximized
//! by sorting the remaining cells by adjacency to it, so every branch is
//! compared row by row against the best ordering found so far.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::multigraph::{AdjacencyMatrix, HalfEdge, Multigraph, Vertex};

/// Ordered by precedence: a vertex in both a multi-edge and a triangle is
/// `InMultiEdge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexType {
    InMultiEdge,
    InTriangle,
    Plain,
}

pub fn vertex_types(g: &Multigraph) -> Vec<VertexType> {
    let adj = dense(g);
    let n = g.num_vertices();
    (0..n)
        .map(|v| {
            let multi = adj[v * n + v] >= 2 || (0..n).any(|w| w != v && adj[v * n + w] >= 2);
            if multi {
                return VertexType::InMultiEdge;
            }
            let nbrs: Vec<usize> = (0..n).filter(|&w| w != v && adj[v * n + w] > 0).collect();
            let triangle = nbrs
                .iter()
                .any(|&a| nbrs.iter().any(|&b| a < b && adj[a * n + b] > 0));
            if triangle {
                VertexType::InTriangle
            } else {
                VertexType::Plain
            }
        })
        .collect()
}

fn dense(g: &Multigraph) -> Vec<u32> {
    let n = g.num_vertices();
    let mut a = vec![0u32; n * n];
    for e in 0..g.num_edges() {
        let (u, v) = g.endpoints(e);
        a[u * n + v] += 1;
        if u != v {
            a[v * n + u] += 1;
        }
    }
    a
}

/// A graph in normal form. Equality, hashing and ordering only look at the
/// adjacency matrix; `graph` is the multigraph rebuilt from it with edges in
/// lexicographic `(min endpoint, max endpoint, parallel index)` order.
#[derive(Clone, Debug)]
pub struct CanonicalGraph {
    adj: AdjacencyMatrix,
    graph: Multigraph,
}

impl CanonicalGraph {
    /// Trusts that `adj` already is a normal form.
    pub fn from_normal_matrix(adj: AdjacencyMatrix) -> Self {
        let graph = Multigraph::from_adjacency(&adj);
        CanonicalGraph { adj, graph }
    }

    /// Parses a key and re-normalizes it, so any labeling is accepted.
    pub fn from_key(key: &str) -> Result<Self> {
        let adj = AdjacencyMatrix::parse_key(key)?;
        Ok(normal_form(&Multigraph::from_adjacency(&adj)).0)
    }

    pub fn adjacency(&self) -> &AdjacencyMatrix {
        &self.adj
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn key(&self) -> String {
        self.adj.key()
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.n()
    }

    pub fn rank(&self) -> usize {
        self.graph.fundamental_rank()
    }
}

impl PartialEq for CanonicalGraph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for CanonicalGraph {}

impl Hash for CanonicalGraph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.adj.hash(state)
    }
}

impl PartialOrd for CanonicalGraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalGraph {
    fn cmp(&self, other: &Self) -> Ordering {
        self.adj.cmp(&other.adj)
    }
}

impl fmt::Display for CanonicalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// A graph together with an explicit isomorphism onto its normal form.
#[derive(Clone, Debug)]
pub struct Canonized {
    pub canonical: CanonicalGraph,
    /// `vertex_map[v]` is the position of `v` in the normal form.
    pub vertex_map: Vec<Vertex>,
    /// Half-edge bijection from the input onto `canonical.graph()`.
    pub half_edge_map: Vec<HalfEdge>,
}

struct Search<'a> {
    n: usize,
    a: &'a [u32],
    best: Option<Vec<u32>>,
    leaves: Vec<Vec<Vertex>>,
    collect_all: bool,
}

impl Search<'_> {
    fn run(&mut self, order: &mut Vec<Vertex>, cells: Vec<Vec<Vertex>>, seq: &mut Vec<u32>) {
        let n = self.n;
        if order.len() == n {
            match self.best.as_ref().map(|b| seq.as_slice().cmp(b.as_slice())) {
                None | Some(Ordering::Greater) => {
                    self.best = Some(seq.clone());
                    self.leaves.clear();
                    self.leaves.push(order.clone());
                }
                Some(Ordering::Equal) => {
                    if self.collect_all {
                        self.leaves.push(order.clone());
                    }
                }
                Some(Ordering::Less) => {}
            }
            return;
        }
        let first = &cells[0];
        for (idx, &u) in first.iter().enumerate() {
            // cells after placing u, each refined by adjacency to u (descending)
            let mut next: Vec<Vec<Vertex>> = Vec::with_capacity(cells.len() + 2);
            let mut rest0: Vec<Vertex> = first.clone();
            rest0.remove(idx);
            let row_start = seq.len();
            seq.push(self.a[u * n + u]);
            for cell in std::iter::once(&rest0).chain(cells[1..].iter()) {
                if cell.is_empty() {
                    continue;
                }
                let mut c = cell.clone();
                c.sort_by(|&x, &y| self.a[u * n + y].cmp(&self.a[u * n + x]));
                let mut start = 0;
                while start < c.len() {
                    let val = self.a[u * n + c[start]];
                    let mut end = start + 1;
                    while end < c.len() && self.a[u * n + c[end]] == val {
                        end += 1;
                    }
                    seq.extend(std::iter::repeat(val).take(end - start));
                    next.push(c[start..end].to_vec());
                    start = end;
                }
            }
            let prune = match &self.best {
                Some(b) => seq.as_slice() < &b[..seq.len()],
                None => false,
            };
            if !prune {
                order.push(u);
                self.run(order, next, seq);
                order.pop();
            }
            seq.truncate(row_start);
        }
    }
}

fn initial_cells(g: &Multigraph) -> Vec<Vec<Vertex>> {
    let types = vertex_types(g);
    let val = g.valences();
    let mut verts: Vec<Vertex> = (0..g.num_vertices()).collect();
    let block = |v: Vertex| (types[v], std::cmp::Reverse(val[v]));
    verts.sort_by_key(|&v| (block(v), v));
    let mut cells: Vec<Vec<Vertex>> = Vec::new();
    for v in verts {
        match cells.last_mut() {
            Some(c) if block(c[0]) == block(v) => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    cells
}

/// All optimal orderings (position -> vertex) and the normal-form matrix.
fn search(g: &Multigraph, collect_all: bool) -> (AdjacencyMatrix, Vec<Vec<Vertex>>) {
    let n = g.num_vertices();
    if n == 0 {
        return (AdjacencyMatrix::zeros(0), vec![Vec::new()]);
    }
    let a = dense(g);
    let mut s = Search {
        n,
        a: &a,
        best: None,
        leaves: Vec::new(),
        collect_all,
    };
    let mut seq = Vec::with_capacity(n * (n + 1) / 2);
    s.run(&mut Vec::with_capacity(n), initial_cells(g), &mut seq);
    let best = s.best.expect("search visits at least one leaf");
    let adj = AdjacencyMatrix::from_upper(n, best).expect("sequence has triangle length");
    (adj, s.leaves)
}

fn invert(order: &[Vertex]) -> Vec<Vertex> {
    let mut inv = vec![0; order.len()];
    for (p, &v) in order.iter().enumerate() {
        inv[v] = p;
    }
    inv
}

/// Extends a vertex isomorphism `g -> target` to half-edges. Parallel edges
/// are matched in increasing id order; an edge whose endpoints arrive in the
/// opposite orientation is matched with its halves swapped.
pub fn extend_to_half_edges(
    g: &Multigraph,
    vertex_map: &[Vertex],
    target: &Multigraph,
) -> Vec<HalfEdge> {
    use std::collections::HashMap;
    let mut slots: HashMap<(Vertex, Vertex), Vec<usize>> = HashMap::new();
    for f in (0..target.num_edges()).rev() {
        let (u, v) = target.endpoints(f);
        slots.entry((u.min(v), u.max(v))).or_default().push(f);
    }
    let mut map = vec![0; g.num_half_edges()];
    for e in 0..g.num_edges() {
        let (t, h) = g.endpoints(e);
        let (mt, mh) = (vertex_map[t], vertex_map[h]);
        let f = slots
            .get_mut(&(mt.min(mh), mt.max(mh)))
            .and_then(Vec::pop)
            .expect("vertex map is an isomorphism");
        if target.half_edge_vertex(2 * f) == mt {
            map[2 * e] = 2 * f;
            map[2 * e + 1] = 2 * f + 1;
        } else {
            map[2 * e] = 2 * f + 1;
            map[2 * e + 1] = 2 * f;
        }
    }
    map
}

pub fn canonize(g: &Multigraph) -> Canonized {
    let (adj, leaves) = search(g, false);
    let canonical = CanonicalGraph::from_normal_matrix(adj);
    let vertex_map = invert(&leaves[0]);
    let half_edge_map = extend_to_half_edges(g, &vertex_map, canonical.graph());
    Canonized {
        canonical,
        vertex_map,
        half_edge_map,
    }
}

/// Normal form and one witness relabeling (`perm[v]` = new position of `v`).
pub fn normal_form(g: &Multigraph) -> (CanonicalGraph, Vec<Vertex>) {
    let c = canonize(g);
    (c.canonical, c.vertex_map)
}

pub fn is_isomorphic(g: &Multigraph, h: &Multigraph) -> bool {
    g.num_vertices() == h.num_vertices()
        && g.num_edges() == h.num_edges()
        && normal_form(g).0 == normal_form(h).0
}

/// Vertex permutations preserving all edge multiplicities.
pub fn vertex_automorphisms(g: &Multigraph) -> Vec<Vec<Vertex>> {
    let (_, leaves) = search(g, true);
    let inv0 = invert(&leaves[0]);
    let mut auts: Vec<Vec<Vertex>> = leaves
        .iter()
        .map(|order| inv0.iter().map(|&p| order[p]).collect())
        .collect();
    auts.sort();
    auts.dedup();
    auts
}

/// Default cap on the number of half-edge automorphisms enumerated.
pub const AUTOMORPHISM_BOUND: usize = 200_000;

/// Every half-edge bijection preserving incidence and the edge pairing,
/// including permutations of parallel edges and reversals of loops.
pub fn automorphisms(g: &Multigraph, bound: usize) -> Result<Vec<Vec<HalfEdge>>> {
    let vauts = vertex_automorphisms(g);
    // classes of edges by unordered endpoint pair
    let mut classes: std::collections::BTreeMap<(Vertex, Vertex), Vec<usize>> =
        std::collections::BTreeMap::new();
    for e in 0..g.num_edges() {
        let (u, v) = g.endpoints(e);
        classes.entry((u.min(v), u.max(v))).or_default().push(e);
    }
    let per_vertex_map: usize = classes
        .iter()
        .map(|(&(u, v), es)| {
            let f = factorial(es.len());
            if u == v {
                f.saturating_mul(1usize << es.len().min(60))
            } else {
                f
            }
        })
        .fold(1usize, |a, b| a.saturating_mul(b));
    let total = per_vertex_map.saturating_mul(vauts.len());
    if total > bound {
        return Err(Error::SizeBound(format!(
            "{total} automorphisms exceed the bound {bound}"
        )));
    }
    let mut out = Vec::with_capacity(total);
    for sigma in &vauts {
        // choices per class: a permutation of targets and, for loops, flips
        let mut partial: Vec<Vec<HalfEdge>> = vec![vec![usize::MAX; g.num_half_edges()]];
        for (&(u, v), es) in &classes {
            let (su, sv) = (sigma[u], sigma[v]);
            let targets = &classes[&(su.min(sv), su.max(sv))];
            let mut next = Vec::new();
            for perm in permutations(es.len()) {
                let flip_count = if u == v { 1usize << es.len() } else { 1 };
                for flips in 0..flip_count {
                    for base in &partial {
                        let mut m = base.clone();
                        for (k, &e) in es.iter().enumerate() {
                            let f = targets[perm[k]];
                            let (t, _) = g.endpoints(e);
                            let straight = if u == v {
                                flips >> k & 1 == 0
                            } else {
                                g.half_edge_vertex(2 * f) == sigma[t]
                            };
                            // target of the tail half-edge
                            let tail_target = if straight { 2 * f } else { 2 * f + 1 };
                            m[2 * e] = tail_target;
                            m[2 * e + 1] = tail_target ^ 1;
                        }
                        next.push(m);
                    }
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    Ok(out)
}

fn factorial(n: usize) -> usize {
    (1..=n).fold(1usize, |a, b| a.saturating_mul(b))
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::named::*;

    /// Brute-force maximum over all block-respecting orderings.
    fn brute_normal(g: &Multigraph) -> AdjacencyMatrix {
        let n = g.num_vertices();
        let cells = initial_cells(g);
        let block_of: Vec<usize> = {
            let mut b = vec![0; n];
            for (i, c) in cells.iter().enumerate() {
                for &v in c {
                    b[v] = i;
                }
            }
            b
        };
        let mut best: Option<AdjacencyMatrix> = None;
        for order in permutations(n) {
            // positions must be filled block by block
            let blocks: Vec<usize> = order.iter().map(|&v| block_of[v]).collect();
            if blocks.windows(2).any(|w| w[0] > w[1]) {
                continue;
            }
            let perm = invert(&order);
            let m = g.relabel_vertices(&perm).to_adjacency();
            if best.as_ref().is_none_or(|b| m.entries() > b.entries()) {
                best = Some(m);
            }
        }
        best.unwrap()
    }

    #[test]
    fn theta_normal_form() {
        let (c, _) = normal_form(&theta());
        assert_eq!(c.adjacency().get(0, 1), 3);
        assert_eq!(c.key(), "2:0,3,0");
    }

    #[test]
    fn search_matches_brute_force() {
        let graphs = [
            theta(),
            k4(),
            dumbbell(),
            doubled_square(),
            theta_bouquet(3),
            Multigraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (1, 3), (1, 1)])
                .unwrap(),
        ];
        for g in &graphs {
            assert_eq!(normal_form(g).0.adjacency(), &brute_normal(g), "{g}");
        }
    }

    #[test]
    fn relabeled_k4_has_same_key() {
        let g = k4();
        let key = normal_form(&g).0;
        for perm in permutations(4) {
            assert_eq!(normal_form(&g.relabel_vertices(&perm)).0, key);
        }
    }

    #[test]
    fn isomorphism_examples() {
        let g = doubled_square();
        assert!(is_isomorphic(&g, &g.relabel_vertices(&[2, 0, 3, 1])));
        assert!(!is_isomorphic(&theta(), &dumbbell()));
        // K4 minus an edge plus a double edge
        let other =
            Multigraph::new(4, &[(0, 1), (0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(other.num_edges(), 6);
        assert!(!is_isomorphic(&k4(), &other));
    }

    #[test]
    fn vertex_types_follow_precedence() {
        let g = Multigraph::new(4, &[(0, 1), (0, 1), (1, 2), (0, 2), (2, 3), (3, 3)]).unwrap();
        let t = vertex_types(&g);
        assert_eq!(t[0], VertexType::InMultiEdge);
        assert_eq!(t[1], VertexType::InMultiEdge);
        assert_eq!(t[2], VertexType::InTriangle);
        assert_eq!(t[3], VertexType::Plain);
        assert!(vertex_types(&k4()).iter().all(|&t| t == VertexType::InTriangle));
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&k4(), AUTOMORPHISM_BOUND).unwrap().len(), 24);
        assert_eq!(automorphisms(&theta(), AUTOMORPHISM_BOUND).unwrap().len(), 12);
        let loop1 = Multigraph::new(1, &[(0, 0)]).unwrap();
        assert_eq!(automorphisms(&loop1, AUTOMORPHISM_BOUND).unwrap().len(), 2);
        assert!(automorphisms(&banana(9), 1000).is_err());
    }

    #[test]
    fn canonized_map_is_an_isomorphism() {
        let g = doubled_square().relabel_vertices(&[3, 1, 0, 2]);
        let c = canonize(&g);
        let target = c.canonical.graph();
        for h in 0..g.num_half_edges() {
            let t = c.half_edge_map[h];
            assert_eq!(c.half_edge_map[h ^ 1], t ^ 1);
            assert_eq!(c.vertex_map[g.half_edge_vertex(h)], target.half_edge_vertex(t));
        }
    }
}
