//! Half-edge multigraphs.
//!
//! Edge `e` owns the half-edges `2e` and `2e + 1`; the partner of a half-edge
//! `h` is `h ^ 1`. The edge is directed from the vertex of `2e` (tail) to the
//! vertex of `2e + 1` (head). Loops and parallel edges are ordinary edges.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type EdgeId = usize;
pub type HalfEdge = usize;

#[inline]
pub fn partner(h: HalfEdge) -> HalfEdge {
    h ^ 1
}

#[inline]
pub fn edge_of(h: HalfEdge) -> EdgeId {
    h >> 1
}

/// Loop counts on the diagonal, multiplicities above it, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdjacencyMatrix {
    n: usize,
    entries: Vec<u32>,
}

impl AdjacencyMatrix {
    pub fn zeros(n: usize) -> Self {
        AdjacencyMatrix {
            n,
            entries: vec![0; n * (n + 1) / 2],
        }
    }

    /// Builds a matrix from its serialized upper triangle (diagonal included).
    pub fn from_upper(n: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != n * (n + 1) / 2 {
            return Err(Error::MalformedMatrix(format!(
                "expected {} entries for n = {}, got {}",
                n * (n + 1) / 2,
                n,
                entries.len()
            )));
        }
        Ok(AdjacencyMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // rows 0..i hold n + (n - 1) + ... + (n - i + 1) entries
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u32) {
        let k = self.index(i, j);
        self.entries[k] = value;
    }

    pub fn num_edges(&self) -> usize {
        self.entries.iter().map(|&m| m as usize).sum()
    }

    /// `n:e00,e01,...` with the row-major upper triangle.
    pub fn key(&self) -> String {
        let body: Vec<String> = self.entries.iter().map(u32::to_string).collect();
        format!("{}:{}", self.n, body.join(","))
    }

    pub fn parse_key(key: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            line: 0,
            msg: format!("bad canonical key {key:?}: {msg}"),
        };
        let (n, body) = key.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let n: usize = n.trim().parse().map_err(|_| bad("vertex count"))?;
        let entries = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|_| bad("entry")))
                .collect::<Result<Vec<_>>>()?
        };
        AdjacencyMatrix::from_upper(n, entries)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multigraph {
    num_vertices: usize,
    ends: Vec<Vertex>,
}

impl Multigraph {
    pub fn empty() -> Self {
        Multigraph {
            num_vertices: 0,
            ends: Vec::new(),
        }
    }

    /// Builds a graph from `(tail, head)` pairs; edge ids follow slice order.
    pub fn new(num_vertices: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut ends = Vec::with_capacity(2 * edges.len());
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= num_vertices {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        num_vertices,
                    });
                }
            }
            ends.push(u);
            ends.push(v);
        }
        Ok(Multigraph { num_vertices, ends })
    }

    pub(crate) fn from_ends(num_vertices: usize, ends: Vec<Vertex>) -> Self {
        debug_assert!(ends.len() % 2 == 0);
        debug_assert!(ends.iter().all(|&v| v < num_vertices));
        Multigraph { num_vertices, ends }
    }

    /// Edges are created row by row, `i <= j`, with `a_ij` parallel copies,
    /// each directed from `i` to `j`.
    pub fn from_adjacency(m: &AdjacencyMatrix) -> Self {
        let n = m.n();
        let mut ends = Vec::with_capacity(2 * m.num_edges());
        for i in 0..n {
            for j in i..n {
                for _ in 0..m.get(i, j) {
                    ends.push(i);
                    ends.push(j);
                }
            }
        }
        Multigraph {
            num_vertices: n,
            ends,
        }
    }

    pub fn to_adjacency(&self) -> AdjacencyMatrix {
        let mut m = AdjacencyMatrix::zeros(self.num_vertices);
        for e in 0..self.num_edges() {
            let (u, v) = self.endpoints(e);
            let k = m.get(u, v);
            m.set(u, v, k + 1);
        }
        m
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.ends.len() / 2
    }

    pub fn num_half_edges(&self) -> usize {
        self.ends.len()
    }

    pub fn half_edge_vertex(&self, h: HalfEdge) -> Vertex {
        self.ends[h]
    }

    pub fn half_edge_vertices(&self) -> &[Vertex] {
        &self.ends
    }

    /// `(tail, head)`.
    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        (self.ends[2 * e], self.ends[2 * e + 1])
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.ends[2 * e] == self.ends[2 * e + 1]
    }

    pub fn has_loop(&self) -> bool {
        (0..self.num_edges()).any(|e| self.is_loop(e))
    }

    pub fn valence(&self, v: Vertex) -> usize {
        self.ends.iter().filter(|&&w| w == v).count()
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.num_vertices];
        for &v in &self.ends {
            val[v] += 1;
        }
        val
    }

    pub fn min_valence(&self) -> usize {
        self.valences().into_iter().min().unwrap_or(0)
    }

    pub fn loops_at(&self, v: Vertex) -> usize {
        (0..self.num_edges())
            .filter(|&e| self.endpoints(e) == (v, v))
            .count()
    }

    pub fn half_edges_at(&self, v: Vertex) -> impl Iterator<Item = HalfEdge> + '_ {
        self.ends
            .iter()
            .enumerate()
            .filter(move |&(_, &w)| w == v)
            .map(|(h, _)| h)
    }

    /// Incidence lists: for each vertex, its half-edges in increasing order.
    pub fn incidence(&self) -> Vec<Vec<HalfEdge>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (h, &v) in self.ends.iter().enumerate() {
            inc[v].push(h);
        }
        inc
    }

    /// Component id per vertex, numbered in order of smallest vertex.
    pub fn components(&self) -> Vec<usize> {
        self.components_avoiding(None, None).0
    }

    /// Components after removing an optional vertex (with all incident
    /// edges) and an optional edge. The removed vertex gets `usize::MAX`.
    fn components_avoiding(
        &self,
        skip_vertex: Option<Vertex>,
        skip_edge: Option<EdgeId>,
    ) -> (Vec<usize>, usize) {
        let n = self.num_vertices;
        let inc = self.incidence();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX || Some(s) == skip_vertex {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &h in &inc[u] {
                    if Some(edge_of(h)) == skip_edge {
                        continue;
                    }
                    let w = self.ends[partner(h)];
                    if Some(w) == skip_vertex || comp[w] != usize::MAX {
                        continue;
                    }
                    comp[w] = count;
                    stack.push(w);
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn num_components(&self) -> usize {
        self.components_avoiding(None, None).1
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    /// `E - V + #components`.
    pub fn fundamental_rank(&self) -> usize {
        self.num_edges() + self.num_components() - self.num_vertices
    }

    /// Vertices whose removal disconnects the graph. Removing a vertex
    /// leaves each of its loops behind as a separate open arc, so a vertex
    /// carrying a loop is a cut vertex as soon as anything else is attached
    /// to it.
    pub fn cut_vertices(&self) -> Result<Vec<Vertex>> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let n = self.num_vertices;
        let mut is_cut = vec![false; n];
        let ap = self.lowlink();
        for v in 0..n {
            let loops = self.loops_at(v);
            if ap.articulation[v] || (loops > 0 && self.valence(v) > 2) {
                is_cut[v] = true;
            }
        }
        Ok((0..n).filter(|&v| is_cut[v]).collect())
    }

    pub fn has_cut_vertex(&self) -> bool {
        self.cut_vertices().map(|c| !c.is_empty()).unwrap_or(false)
    }

    /// Edges whose deletion disconnects their component.
    pub fn bridges(&self) -> Vec<EdgeId> {
        let ll = self.lowlink();
        let mut b: Vec<EdgeId> = (0..self.num_edges()).filter(|&e| ll.bridge[e]).collect();
        b.sort_unstable();
        b
    }

    pub fn has_bridge(&self) -> bool {
        self.lowlink().bridge.iter().any(|&b| b)
    }

    /// Iterative Tarjan low-link over the loop-free part; parallel edges
    /// are distinguished by edge id.
    fn lowlink(&self) -> LowLink {
        let n = self.num_vertices;
        let m = self.num_edges();
        let inc = self.incidence();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut articulation = vec![false; n];
        let mut bridge = vec![false; m];
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // (vertex, half-edge used to enter, next incidence index)
            let mut stack: Vec<(Vertex, Option<HalfEdge>, usize)> = vec![(root, None, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut root_children = 0;
            while let Some(&mut (u, entered, ref mut idx)) = stack.last_mut() {
                if *idx < inc[u].len() {
                    let h = inc[u][*idx];
                    *idx += 1;
                    let e = edge_of(h);
                    if self.is_loop(e) || entered.map(edge_of) == Some(e) {
                        continue;
                    }
                    let w = self.ends[partner(h)];
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        if u == root {
                            root_children += 1;
                        }
                        stack.push((w, Some(partner(h)), 0));
                    } else {
                        low[u] = low[u].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[u]);
                        if low[u] > disc[p] {
                            bridge[edge_of(entered.unwrap())] = true;
                        }
                        if p != root && low[u] >= disc[p] {
                            articulation[p] = true;
                        }
                    }
                }
            }
            if root_children > 1 {
                articulation[root] = true;
            }
        }
        LowLink {
            articulation,
            bridge,
        }
    }

    /// Collapses a non-loop edge. The merged vertex takes the smaller of the
    /// two endpoint ids, the larger id is removed and higher ids shift down.
    /// The remaining edges keep their relative order and directions.
    pub fn contract_edge(&self, e: EdgeId) -> Result<Multigraph> {
        if e >= self.num_edges() {
            return Err(Error::EdgeOutOfRange {
                edge: e,
                num_edges: self.num_edges(),
            });
        }
        let (a, b) = self.endpoints(e);
        if a == b {
            return Err(Error::LoopEdge(e));
        }
        let (keep, gone) = (a.min(b), a.max(b));
        let relabel = |v: Vertex| {
            if v == gone {
                keep
            } else if v > gone {
                v - 1
            } else {
                v
            }
        };
        let mut ends = Vec::with_capacity(self.ends.len() - 2);
        for (h, &v) in self.ends.iter().enumerate() {
            if edge_of(h) != e {
                ends.push(relabel(v));
            }
        }
        Ok(Multigraph::from_ends(self.num_vertices - 1, ends))
    }

    /// Vertices and edges of `other` follow those of `self`.
    pub fn disjoint_union(&self, other: &Multigraph) -> Multigraph {
        let mut ends = self.ends.clone();
        ends.extend(other.ends.iter().map(|&v| v + self.num_vertices));
        Multigraph::from_ends(self.num_vertices + other.num_vertices, ends)
    }

    /// `perm[v]` is the new id of vertex `v`; edges keep their ids.
    pub fn relabel_vertices(&self, perm: &[Vertex]) -> Multigraph {
        let ends = self.ends.iter().map(|&v| perm[v]).collect();
        Multigraph::from_ends(self.num_vertices, ends)
    }

    /// Sorted `(min, max)` endpoint pairs.
    pub fn sorted_edge_list(&self) -> Vec<(Vertex, Vertex)> {
        let mut edges: Vec<(Vertex, Vertex)> = (0..self.num_edges())
            .map(|e| {
                let (u, v) = self.endpoints(e);
                (u.min(v), u.max(v))
            })
            .collect();
        edges.sort_unstable();
        edges
    }

    /// One record of the graph text format.
    pub fn write_record<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "g {} {} {}",
            self.num_vertices,
            self.num_edges(),
            self.fundamental_rank()
        )?;
        for (u, v) in self.sorted_edge_list() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_record(&self) -> String {
        let mut buf = Vec::new();
        self.write_record(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("ascii")
    }
}

impl fmt::Display for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_record().trim_end())
    }
}

struct LowLink {
    articulation: Vec<bool>,
    bridge: Vec<bool>,
}

/// Parses every record of the graph text format. Blank lines and lines
/// starting with `#` are ignored.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<Multigraph>> {
    let mut graphs = Vec::new();
    let mut pending: Option<(usize, usize, usize, usize, Vec<(Vertex, Vertex)>)> = None;
    let finish = |p: (usize, usize, usize, usize, Vec<(Vertex, Vertex)>)| -> Result<Multigraph> {
        let (line, v, e, r, edges) = p;
        if edges.len() != e {
            return Err(Error::Parse {
                line,
                msg: format!("record declares {e} edges but lists {}", edges.len()),
            });
        }
        let g = Multigraph::new(v, &edges).map_err(|err| Error::Parse {
            line,
            msg: err.to_string(),
        })?;
        if g.fundamental_rank() != r {
            return Err(Error::Parse {
                line,
                msg: format!("declared rank {r} but graph has rank {}", g.fundamental_rank()),
            });
        }
        Ok(g)
    };
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let parse = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("expected a non-negative integer, found {s:?}"),
            })
        };
        if fields[0] == "g" {
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "header must be `g V E R`".into(),
                });
            }
            if let Some(p) = pending.take() {
                graphs.push(finish(p)?);
            }
            pending = Some((
                lineno,
                parse(fields[1])?,
                parse(fields[2])?,
                parse(fields[3])?,
                Vec::new(),
            ));
        } else {
            let Some(p) = pending.as_mut() else {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "edge line before any `g` header".into(),
                });
            };
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "edge line must be `u v`".into(),
                });
            }
            let (u, v) = (parse(fields[0])?, parse(fields[1])?);
            if u > v {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("edge endpoints must satisfy u <= v, found {u} {v}"),
                });
            }
            p.4.push((u, v));
        }
    }
    if let Some(p) = pending.take() {
        graphs.push(finish(p)?);
    }
    Ok(graphs)
}

/// Small named graphs used throughout the tests and examples.
pub mod named {
    use super::Multigraph;

    pub fn theta() -> Multigraph {
        Multigraph::new(2, &[(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    pub fn k4() -> Multigraph {
        Multigraph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// Two vertices joined by one edge, with a loop at each.
    pub fn dumbbell() -> Multigraph {
        Multigraph::new(2, &[(0, 0), (0, 1), (1, 1)]).unwrap()
    }

    /// Four vertices on a cycle with edges `01` and `23` doubled.
    pub fn doubled_square() -> Multigraph {
        Multigraph::new(4, &[(0, 1), (0, 1), (1, 2), (2, 3), (2, 3), (0, 3)]).unwrap()
    }

    /// `n` parallel edges between two vertices.
    pub fn banana(n: usize) -> Multigraph {
        Multigraph::new(2, &vec![(0, 1); n]).unwrap()
    }

    /// Thetas glued at a common vertex 0.
    pub fn theta_bouquet(count: usize) -> Multigraph {
        let mut edges = Vec::new();
        for i in 0..count {
            for _ in 0..3 {
                edges.push((0, i + 1));
            }
        }
        Multigraph::new(count + 1, &edges).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn adjacency_round_trip_and_examples() {
        let mut m = AdjacencyMatrix::zeros(2);
        m.set(0, 1, 3);
        let g = Multigraph::from_adjacency(&m);
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.to_adjacency(), m);

        let mut one = AdjacencyMatrix::zeros(1);
        one.set(0, 0, 1);
        let g = Multigraph::from_adjacency(&one);
        assert_eq!(g.valence(0), 2);

        let k4 = k4();
        assert_eq!(k4.num_edges(), 6);
        assert!(k4.valences().iter().all(|&v| v == 3));
        assert_eq!(Multigraph::from_adjacency(&k4.to_adjacency()).to_adjacency(), k4.to_adjacency());
    }

    #[test]
    fn matrix_index_layout() {
        let mut m = AdjacencyMatrix::zeros(4);
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                m.set(i, j, k);
                k += 1;
            }
        }
        assert_eq!(m.entries(), &(0..10).collect::<Vec<u32>>()[..]);
        assert_eq!(m.get(3, 1), m.get(1, 3));
    }

    #[test]
    fn malformed_matrix_is_rejected() {
        assert!(AdjacencyMatrix::from_upper(3, vec![0; 5]).is_err());
        assert!(Multigraph::new(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn key_round_trip() {
        let m = theta().to_adjacency();
        assert_eq!(m.key(), "2:0,3,0");
        assert_eq!(AdjacencyMatrix::parse_key(&m.key()).unwrap(), m);
    }

    #[test]
    fn ranks() {
        assert_eq!(theta().fundamental_rank(), 2);
        assert_eq!(k4().fundamental_rank(), 3);
        let two_loops = Multigraph::new(1, &[(0, 0), (0, 0)]).unwrap();
        assert_eq!(two_loops.fundamental_rank(), 2);
    }

    #[test]
    fn cut_vertex_examples() {
        assert!(theta().cut_vertices().unwrap().is_empty());
        assert_eq!(dumbbell().cut_vertices().unwrap(), vec![0, 1]);
        let bowtie =
            Multigraph::new(5, &[(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)]).unwrap();
        assert_eq!(bowtie.cut_vertices().unwrap(), vec![0]);
        let disconnected = theta().disjoint_union(&theta());
        assert!(matches!(disconnected.cut_vertices(), Err(Error::Disconnected)));
    }

    #[test]
    fn bridge_examples() {
        assert_eq!(dumbbell().bridges(), vec![1]);
        assert!(theta().bridges().is_empty());
        let two_triangles = Multigraph::new(
            6,
            &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)],
        )
        .unwrap();
        assert_eq!(two_triangles.bridges(), vec![3]);
        // parallel edges are never bridges
        assert!(Multigraph::new(2, &[(0, 1), (0, 1)]).unwrap().bridges().is_empty());
    }

    #[test]
    fn contraction_examples() {
        let t = theta().contract_edge(0).unwrap();
        assert_eq!((t.num_vertices(), t.num_edges()), (1, 2));
        assert_eq!(t.loops_at(0), 2);

        let k = k4().contract_edge(0).unwrap();
        assert_eq!((k.num_vertices(), k.num_edges()), (3, 5));
        let adj = k.to_adjacency();
        let doubles = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .filter(|&(i, j)| adj.get(i, j) == 2)
            .count();
        assert_eq!(doubles, 2);

        let d = dumbbell().contract_edge(1).unwrap();
        assert_eq!((d.num_vertices(), d.num_edges(), d.loops_at(0)), (1, 2, 2));
        assert!(matches!(dumbbell().contract_edge(0), Err(Error::LoopEdge(0))));
    }

    #[test]
    fn disjoint_union_examples() {
        let u = theta().disjoint_union(&theta());
        assert_eq!((u.num_vertices(), u.num_edges(), u.num_components()), (4, 6, 2));
        assert_eq!(k4().disjoint_union(&Multigraph::empty()), k4());
        assert_eq!(
            u.disjoint_union(&k4()).num_components(),
            u.num_components() + k4().num_components()
        );
    }

    #[test]
    fn text_format() {
        let rec = doubled_square().to_record();
        assert_eq!(rec, "g 4 6 3\n0 1\n0 1\n0 3\n1 2\n2 3\n2 3\n");
        let parsed = read_records(std::io::Cursor::new(format!("{rec}{}", theta().to_record())))
            .unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].sorted_edge_list(), doubled_square().sorted_edge_list());
        assert!(read_records(std::io::Cursor::new("g 2 1 0\n1 0\n")).is_err());
        assert!(read_records(std::io::Cursor::new("0 1\n")).is_err());
        assert!(read_records(std::io::Cursor::new("g 2 2 2\n0 1\n")).is_err());
    }
}
