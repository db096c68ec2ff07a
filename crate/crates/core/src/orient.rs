//! Orientations of graphs and the signs they induce.
//!
//! An orientation is an orientation of `R^{edges} ⊕ H_1(G; R)`: a total order
//! of the (undirected) edges together with an ordered basis of the cycle
//! space. Cycles are written as integer vectors over the directed edges of a
//! concrete [`Multigraph`]; the directions are only scaffolding and reversing
//! an edge flips its coordinate in every cycle without changing the
//! orientation.

use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::canonical::{canonize, extend_to_half_edges, vertex_automorphisms, CanonicalGraph};
use crate::error::{Error, Result};
use crate::multigraph::{edge_of, EdgeId, HalfEdge, Multigraph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    /// Edge ids, first to last.
    pub edge_order: Vec<EdgeId>,
    /// Ordered cycle basis, dense over edge ids.
    pub cycles: Vec<Vec<i64>>,
    /// For a fundamental basis: the non-tree edge of each cycle and the sign
    /// of the cycle on it. Coordinates can then be read off directly.
    pub pivots: Option<Vec<(EdgeId, i64)>>,
}

/// Breadth-first spanning tree from vertex 0 taking edges in id order;
/// returns the parent half-edge (pointing at the child) of every vertex.
fn bfs_tree(g: &Multigraph) -> (Vec<Option<HalfEdge>>, Vec<bool>) {
    let n = g.num_vertices();
    let inc = g.incidence();
    let mut parent: Vec<Option<HalfEdge>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut in_tree = vec![false; g.num_edges()];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            // incidence lists are sorted by half-edge, hence by edge id
            for &h in &inc[u] {
                let w = g.half_edge_vertex(h ^ 1);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(h ^ 1);
                    in_tree[edge_of(h)] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    (parent, in_tree)
}

/// Directed-edge vector of the tree path from `from` to `to`.
fn tree_path(g: &Multigraph, parent: &[Option<HalfEdge>], from: Vertex, to: Vertex) -> Vec<i64> {
    let mut z = vec![0i64; g.num_edges()];
    let depth = |mut v: Vertex| {
        let mut d = 0;
        while let Some(h) = parent[v] {
            v = g.half_edge_vertex(h ^ 1);
            d += 1;
        }
        d
    };
    let (mut a, mut b) = (from, to);
    let (mut da, mut db) = (depth(a), depth(b));
    // climbing from `a` walks edges against the path direction's reverse:
    // stepping a -> parent(a) traverses the edge from child to parent
    let step = |z: &mut Vec<i64>, v: Vertex, forward: bool| -> Vertex {
        let h = parent[v].expect("not the root");
        let e = edge_of(h);
        let p = g.half_edge_vertex(h ^ 1);
        // traversal direction v -> p when forward, p -> v otherwise
        let (x, _) = if forward { (v, p) } else { (p, v) };
        let tail = g.half_edge_vertex(2 * e);
        z[e] += if tail == x { 1 } else { -1 };
        p
    };
    while da > db {
        a = step(&mut z, a, true);
        da -= 1;
    }
    while db > da {
        b = step(&mut z, b, false);
        db -= 1;
    }
    while a != b {
        a = step(&mut z, a, true);
        b = step(&mut z, b, false);
    }
    z
}

/// Deterministic orientation: edges in id order; spanning tree by BFS from
/// vertex 0 choosing smallest edges first; one cycle per non-tree edge in id
/// order, traversing the non-tree edge from its smaller to its larger
/// endpoint (a loop along its own direction) and closing through the tree.
pub fn reference_orientation(g: &Multigraph) -> Orientation {
    let (parent, in_tree) = bfs_tree(g);
    let mut cycles = Vec::new();
    let mut pivots = Vec::new();
    for f in 0..g.num_edges() {
        if in_tree[f] {
            continue;
        }
        let (t, h) = g.endpoints(f);
        let (a, b, sign) = if t <= h { (t, h, 1) } else { (h, t, -1) };
        let mut z = tree_path(g, &parent, b, a);
        z[f] += sign;
        cycles.push(z);
        pivots.push((f, sign));
    }
    Orientation {
        edge_order: (0..g.num_edges()).collect(),
        cycles,
        pivots: Some(pivots),
    }
}

fn permutation_sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_i64(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Coordinates of `v` in the basis `cols`, or `None` if `v` is outside
/// their span.
fn solve_in_basis(cols: &[Vec<i64>], v: &[i64]) -> Option<Vec<Rational64>> {
    let rows = v.len();
    let r = cols.len();
    let mut a: Vec<Vec<Rational64>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rational64> =
                cols.iter().map(|c| Rational64::from_integer(c[i])).collect();
            row.push(Rational64::from_integer(v[i]));
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col];
                for j in 0..=r {
                    let t = a[row][j] * f;
                    a[i][j] -= t;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    if a[row..].iter().any(|x| !x[r].is_zero()) || pivot_cols.len() < r {
        return None;
    }
    let mut sol = vec![Rational64::zero(); r];
    for (i, &c) in pivot_cols.iter().enumerate() {
        sol[c] = a[i][r];
    }
    Some(sol)
}

/// Checks that `phi` is a half-edge isomorphism `src -> dst` and returns the
/// induced vertex map.
pub fn check_isomorphism(src: &Multigraph, dst: &Multigraph, phi: &[HalfEdge]) -> Result<Vec<Vertex>> {
    let bad = |m: &str| Error::InvalidIsomorphism(m.to_string());
    if src.num_half_edges() != dst.num_half_edges() || src.num_vertices() != dst.num_vertices() {
        return Err(bad("graph sizes differ"));
    }
    if phi.len() != src.num_half_edges() {
        return Err(bad("map has the wrong length"));
    }
    let mut hit = vec![false; phi.len()];
    for &t in phi {
        if t >= phi.len() || hit[t] {
            return Err(bad("not a bijection on half-edges"));
        }
        hit[t] = true;
    }
    let mut vmap = vec![usize::MAX; src.num_vertices()];
    for (h, &t) in phi.iter().enumerate() {
        if phi[h ^ 1] != t ^ 1 {
            return Err(bad("edge pairing not preserved"));
        }
        let (v, w) = (src.half_edge_vertex(h), dst.half_edge_vertex(t));
        if vmap[v] == usize::MAX {
            vmap[v] = w;
        } else if vmap[v] != w {
            return Err(bad("incidence not preserved"));
        }
    }
    let mut vhit = vec![false; dst.num_vertices()];
    for &w in &vmap {
        if w == usize::MAX {
            // isolated vertices only occur in the single-vertex graph
            continue;
        }
        if vhit[w] {
            return Err(bad("vertex map not injective"));
        }
        vhit[w] = true;
    }
    Ok(vmap)
}

/// Sign of the isomorphism `phi: src -> dst` relative to the two
/// orientations: the sign of the induced edge-order permutation times the
/// determinant of the induced map on `H_1` in the two cycle bases.
pub fn iso_sign(
    src: &Multigraph,
    src_or: &Orientation,
    dst: &Multigraph,
    dst_or: &Orientation,
    phi: &[HalfEdge],
) -> Result<i32> {
    check_isomorphism(src, dst, phi)?;
    Ok(iso_sign_unchecked(src, src_or, dst_or, phi)?)
}

pub(crate) fn iso_sign_unchecked(
    src: &Multigraph,
    src_or: &Orientation,
    dst_or: &Orientation,
    phi: &[HalfEdge],
) -> Result<i32> {
    let m = src.num_edges();
    let mut dst_pos = vec![0; m];
    for (p, &f) in dst_or.edge_order.iter().enumerate() {
        dst_pos[f] = p;
    }
    let perm: Vec<usize> = src_or
        .edge_order
        .iter()
        .map(|&e| dst_pos[edge_of(phi[2 * e])])
        .collect();
    let edge_sign = permutation_sign(&perm);

    let r = src_or.cycles.len();
    if dst_or.cycles.len() != r {
        return Err(Error::InvalidIsomorphism("cycle bases have different sizes".into()));
    }
    let push = |z: &[i64]| -> Vec<i64> {
        let mut out = vec![0i64; m];
        for e in 0..m {
            if z[e] != 0 {
                let t = phi[2 * e];
                let dir = if t % 2 == 0 { 1 } else { -1 };
                out[edge_of(t)] += z[e] * dir;
            }
        }
        out
    };
    let mut coords: Vec<Vec<i128>> = Vec::with_capacity(r);
    for z in &src_or.cycles {
        let zp = push(z);
        let c: Vec<i128> = match &dst_or.pivots {
            Some(piv) => {
                let c: Vec<i64> = piv.iter().map(|&(f, s)| zp[f] * s).collect();
                // the fundamental basis reproduces zp exactly iff zp is a cycle
                let mut check = vec![0i64; m];
                for (j, w) in dst_or.cycles.iter().enumerate() {
                    if c[j] != 0 {
                        for e in 0..m {
                            check[e] += c[j] * w[e];
                        }
                    }
                }
                if check != zp {
                    return Err(Error::InvalidIsomorphism("cycle not mapped to a cycle".into()));
                }
                c.into_iter().map(i128::from).collect()
            }
            None => {
                let sol = solve_in_basis(&dst_or.cycles, &zp)
                    .ok_or_else(|| Error::InvalidIsomorphism("cycle not mapped to a cycle".into()))?;
                if sol.iter().any(|x| !x.is_integer()) {
                    return Err(Error::InvalidIsomorphism("non-integral cycle change".into()));
                }
                sol.iter().map(|x| i128::from(*x.numer())).collect()
            }
        };
        coords.push(c);
    }
    let det = det_i64(coords);
    if det.abs() != 1 {
        return Err(Error::InvalidIsomorphism(format!("H1 determinant {det}")));
    }
    Ok(edge_sign * det.signum() as i32)
}

/// True iff the graph has a loop or an automorphism reversing its
/// orientation. Parallel-edge permutations of a loop-free graph always
/// preserve orientation, so vertex automorphisms with one fixed extension
/// to half-edges decide the question.
pub fn is_zero(c: &CanonicalGraph) -> bool {
    is_zero_graph(c.graph())
}

pub fn is_zero_graph(g: &Multigraph) -> bool {
    if g.has_loop() {
        return true;
    }
    let or = reference_orientation(g);
    vertex_automorphisms(g).iter().any(|sigma| {
        let phi = extend_to_half_edges(g, sigma, g);
        iso_sign_unchecked(g, &or, &or, &phi).expect("automorphism") < 0
    })
}

/// A basis graph with a rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedGraph {
    pub graph: CanonicalGraph,
    pub coeff: Rational64,
}

impl fmt::Display for SignedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.coeff.is_negative() { '-' } else { '+' };
        write!(f, "{sign}{} * {}", self.coeff.abs(), self.graph.key())
    }
}

/// Sign rule applied when an edge is collapsed. `Positional` is the real
/// rule; `Unsigned` drops the position factor and exists so tests can show
/// that a wrong rule is detected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionSign {
    Positional,
    Unsigned,
}

/// Collapses edge `e` of an oriented graph and expresses the result in the
/// reference orientation of its normal form. The transported orientation
/// moves `e` to the front of the edge order (sign `(-1)^(i-1)` for 1-based
/// position `i`), deletes it, and carries each cycle over by dropping its
/// `e` coordinate. Returns `None` if the normal form is zero according to
/// `zero`.
pub fn signed_contract_with(
    g: &Multigraph,
    g_or: &Orientation,
    e: EdgeId,
    zero: &dyn Fn(&CanonicalGraph) -> bool,
    rule: ContractionSign,
) -> Result<Option<(CanonicalGraph, i64)>> {
    let k = g.contract_edge(e)?;
    let pos = g_or.edge_order.iter().position(|&x| x == e).expect("edge in order");
    let shift = |x: EdgeId| if x > e { x - 1 } else { x };
    let k_or = Orientation {
        edge_order: g_or.edge_order.iter().filter(|&&x| x != e).map(|&x| shift(x)).collect(),
        cycles: g_or
            .cycles
            .iter()
            .map(|z| {
                z.iter()
                    .enumerate()
                    .filter(|&(x, _)| x != e)
                    .map(|(_, &c)| c)
                    .collect()
            })
            .collect(),
        pivots: None,
    };
    let c = canonize(&k);
    if zero(&c.canonical) {
        return Ok(None);
    }
    let ref_or = reference_orientation(c.canonical.graph());
    let s = iso_sign_unchecked(&k, &k_or, &ref_or, &c.half_edge_map)?;
    let position_sign = match rule {
        ContractionSign::Positional if pos % 2 == 1 => -1,
        _ => 1,
    };
    Ok(Some((c.canonical, i64::from(s) * position_sign)))
}

/// [`signed_contract_with`] on a canonical graph in its reference
/// orientation.
pub fn signed_contract(c: &CanonicalGraph, e: EdgeId) -> Result<Option<SignedGraph>> {
    let or = reference_orientation(c.graph());
    Ok(
        signed_contract_with(c.graph(), &or, e, &is_zero, ContractionSign::Positional)?.map(
            |(graph, s)| SignedGraph {
                graph,
                coeff: Rational64::from_integer(s),
            },
        ),
    )
}

/// Compares the orientation carried by a labeled graph in the vertex
/// convention (vertices ordered by id, each edge directed tail to head) with
/// an orientation `or` of `R^{edges} ⊕ H_1`. Both sides orient the directed
/// chain space `C_1` through `0 -> H_1 -> C_1 -> B_0 -> 0`; the result is the
/// determinant of `[cycles | lifts of v_j - v_0]` written in the edge order
/// of `or`, which is `±1` for a connected graph.
pub fn vertex_edge_pairing(g: &Multigraph, or: &Orientation) -> i32 {
    let m = g.num_edges();
    let n = g.num_vertices();
    assert_eq!(or.cycles.len() + n, m + 1, "pairing needs a connected graph");
    let (parent, _) = bfs_tree(g);
    let mut row_of = vec![0; m];
    for (p, &e) in or.edge_order.iter().enumerate() {
        row_of[e] = p;
    }
    let mut mat = vec![vec![0i128; m]; m];
    let mut col = 0;
    for z in &or.cycles {
        for e in 0..m {
            mat[row_of[e]][col] = i128::from(z[e]);
        }
        col += 1;
    }
    for v in 1..n {
        let lift = tree_path(g, &parent, 0, v);
        for e in 0..m {
            mat[row_of[e]][col] = i128::from(lift[e]);
        }
        col += 1;
    }
    let d = det_i64(mat);
    assert_eq!(d.abs(), 1, "unimodular pairing");
    d.signum() as i32
}

/// Writes `x` in the basis `cols` over the rationals.
pub fn cycle_coordinates(cols: &[Vec<i64>], x: &[i64]) -> Option<Vec<Rational64>> {
    solve_in_basis(cols, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::canonical::{automorphisms, normal_form, AUTOMORPHISM_BOUND};
    use crate::multigraph::named::*;

    #[test]
    fn theta_reference() {
        let g = theta();
        let or = reference_orientation(&g);
        assert_eq!(or.edge_order, vec![0, 1, 2]);
        // tree edge 0; cycles e1 - e0 and e2 - e0
        assert_eq!(or.cycles, vec![vec![-1, 1, 0], vec![-1, 0, 1]]);
        assert_eq!(reference_orientation(&k4()).cycles.len(), 3);
        let tree_plus_one = Multigraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(reference_orientation(&tree_plus_one).cycles.len(), 1);
    }

    #[test]
    fn theta_signs() {
        let g = theta();
        let or = reference_orientation(&g);
        let id: Vec<usize> = (0..6).collect();
        assert_eq!(iso_sign(&g, &or, &g, &or, &id).unwrap(), 1);
        let swap_vertices = vec![1, 0, 3, 2, 5, 4];
        assert_eq!(iso_sign(&g, &or, &g, &or, &swap_vertices).unwrap(), 1);
        let swap_parallel = vec![2, 3, 0, 1, 4, 5];
        assert_eq!(iso_sign(&g, &or, &g, &or, &swap_parallel).unwrap(), 1);
        let broken = vec![1, 0, 2, 3, 4, 5];
        assert!(iso_sign(&g, &or, &g, &or, &broken).is_err());
        let not_iso = vec![0, 2, 1, 3, 4, 5];
        assert!(iso_sign(&g, &or, &g, &or, &not_iso).is_err());
    }

    #[test]
    fn zero_examples() {
        let two_loops = Multigraph::new(1, &[(0, 0), (0, 0)]).unwrap();
        assert!(is_zero_graph(&two_loops));
        assert!(!is_zero(&normal_form(&theta()).0));
        assert!(!is_zero(&normal_form(&k4()).0));
        // four parallel edges: swapping the ends acts by -1 on a 3-dim H1
        assert!(is_zero(&normal_form(&banana(4)).0));
        assert!(!is_zero(&normal_form(&banana(5)).0));
    }

    #[test]
    fn k4_automorphisms_all_preserve_orientation() {
        let g = normal_form(&k4()).0;
        let or = reference_orientation(g.graph());
        for phi in automorphisms(g.graph(), AUTOMORPHISM_BOUND).unwrap() {
            assert_eq!(iso_sign(g.graph(), &or, g.graph(), &or, &phi).unwrap(), 1);
        }
    }

    #[test]
    fn contraction_examples() {
        let t = normal_form(&theta()).0;
        for e in 0..3 {
            assert!(signed_contract(&t, e).unwrap().is_none());
        }
        let k = normal_form(&k4()).0;
        let target = normal_form(&k4().contract_edge(0).unwrap()).0;
        for e in 0..6 {
            let s = signed_contract(&k, e).unwrap().expect("nonzero");
            assert_eq!(s.graph, target);
            assert_eq!(s.coeff.abs(), Rational64::one());
        }
        let sq = normal_form(&doubled_square()).0;
        let g = sq.graph();
        for e in 0..g.num_edges() {
            let (u, v) = g.endpoints(e);
            let mult = g.to_adjacency().get(u, v);
            if mult >= 2 {
                assert!(signed_contract(&sq, e).unwrap().is_none());
            }
        }
        assert!(format!("{}", signed_contract(&k, 0).unwrap().unwrap()).contains(" * 3:"));
    }

    #[test]
    fn pairing_is_multiplicative_with_automorphisms() {
        // an automorphism changes the vertex-convention orientation by its
        // vertex sign times edge flips, and the edge-convention one by
        // iso_sign; the pairing relates the two
        let g = normal_form(&k4()).0;
        let gr = g.graph();
        let or = reference_orientation(gr);
        let base = vertex_edge_pairing(gr, &or);
        assert_eq!(base.abs(), 1);
    }
}
