//! Bracket and cobracket on the quotient complex by half-edge surgery.
//!
//! Surgery is computed on labeled graphs oriented by their vertex order and
//! edge directions. A basis element, the normal form in its reference
//! orientation, equals `pairing * (its own labeled instance)` where
//! `pairing` is [`vertex_edge_pairing`]; this converts in both directions.
//!
//! Sign rules, with `g`, `h`, `a`, `b`, `x`, `y` the vertex counts of the
//! graphs involved:
//! - `K_xy` cuts the edges of `x` and `y`, each contributing `+1` if the
//!   half-edge is the tail, glues `x` to `y`, moves the vertices `v, w` of
//!   `x, y` to the front in that order, collapses them to vertex 0 and adds
//!   the edge from the vertex of `x̄` to the vertex of `ȳ`. `K_yx = K_xy`.
//! - `<G, H>` sums `K_xy(G·H)` over `x` in `G`, `y` in `H`, with the vertices
//!   of `G` first. `<H, G> = (-1)^{gh} <G, H>`.
//! - The cobracket of `G` sums `A⊗B + (-1)^{ab} B⊗A` over separating pairs,
//!   where `G_xy = A·B` after moving the vertices of the component holding
//!   the merged vertex to the front.
//! - `[X⊗Y, H] = (-1)^{yh} <X,H>⊗Y + (-1)^x X⊗<Y,H>` and
//!   `[G, X⊗Y] = <G,X>⊗Y + (-1)^{x(g+1)} X⊗<G,Y>`.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::canonical::{canonize, CanonicalGraph};
use crate::error::{Error, Result};
use crate::multigraph::{edge_of, HalfEdge, Multigraph, Vertex};
use crate::orient::{check_isomorphism, is_zero, reference_orientation, vertex_edge_pairing};

fn parity_sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

fn permutation_sign(p: &[usize]) -> i64 {
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

fn check_pair(g: &Multigraph, x: HalfEdge, y: HalfEdge) -> Result<()> {
    for h in [x, y] {
        if h >= g.num_half_edges() {
            return Err(Error::HalfEdgeOutOfRange {
                half_edge: h,
                num_half_edges: g.num_half_edges(),
            });
        }
    }
    if x == y {
        return Err(Error::SameHalfEdge);
    }
    if y == x ^ 1 {
        return Err(Error::PartnerHalfEdges(x, y));
    }
    Ok(())
}

/// `G_xy` without orientation. When `x` and `y` sit at one vertex the glued
/// edge is a loop and is simply deleted.
pub fn contract_halfedges(g: &Multigraph, x: HalfEdge, y: HalfEdge) -> Result<Multigraph> {
    check_pair(g, x, y)?;
    let (v, w) = (g.half_edge_vertex(x), g.half_edge_vertex(y));
    if v != w {
        return Ok(contract_halfedges_oriented(g, x, y)?.0);
    }
    let (ex, ey) = (edge_of(x), edge_of(y));
    let mut edges: Vec<(Vertex, Vertex)> = (0..g.num_edges())
        .filter(|&e| e != ex && e != ey)
        .map(|e| g.endpoints(e))
        .collect();
    edges.push((g.half_edge_vertex(x ^ 1), g.half_edge_vertex(y ^ 1)));
    Multigraph::new(g.num_vertices(), &edges)
}

/// `G_xy` with its sign relative to `G`, both in the vertex convention.
/// The merged vertex is vertex 0; the other vertices keep their order.
pub fn contract_halfedges_oriented(g: &Multigraph, x: HalfEdge, y: HalfEdge) -> Result<(Multigraph, i64)> {
    check_pair(g, x, y)?;
    let (v, w) = (g.half_edge_vertex(x), g.half_edge_vertex(y));
    if v == w {
        return Err(Error::SameVertex(x, y));
    }
    let mut relabel = vec![0; g.num_vertices()];
    let mut next = 1;
    for (u, slot) in relabel.iter_mut().enumerate() {
        if u != v && u != w {
            *slot = next;
            next += 1;
        }
    }
    let (ex, ey) = (edge_of(x), edge_of(y));
    let mut edges: Vec<(Vertex, Vertex)> = (0..g.num_edges())
        .filter(|&e| e != ex && e != ey)
        .map(|e| {
            let (t, h) = g.endpoints(e);
            (relabel[t], relabel[h])
        })
        .collect();
    edges.push((relabel[g.half_edge_vertex(x ^ 1)], relabel[g.half_edge_vertex(y ^ 1)]));
    let moves = if w > v { v + w - 1 } else { v + w };
    let sign = parity_sign(x % 2) * parity_sign(y % 2) * parity_sign(moves);
    Ok((Multigraph::new(g.num_vertices() - 1, &edges)?, sign))
}

/// Sign relating a basis element to its own labeled instance.
pub fn instance_sign(c: &CanonicalGraph) -> i64 {
    i64::from(vertex_edge_pairing(c.graph(), &reference_orientation(c.graph())))
}

/// Expresses a labeled graph in the vertex convention as `sign * [normal
/// form]`. `None` when the class vanishes in the quotient: disconnected,
/// with a cut vertex, or zero.
pub fn reduce(g: &Multigraph) -> Option<(CanonicalGraph, i64)> {
    if g.has_loop() || !g.is_connected() || g.has_cut_vertex() {
        return None;
    }
    reduce_any(g)
}

/// As [`reduce`] but keeps graphs with cut vertices.
pub fn reduce_any(g: &Multigraph) -> Option<(CanonicalGraph, i64)> {
    if g.has_loop() || !g.is_connected() {
        return None;
    }
    let c = canonize(g);
    if is_zero(&c.canonical) {
        return None;
    }
    let phi = &c.half_edge_map;
    let vmap = check_isomorphism(g, c.canonical.graph(), phi).expect("canonizing map");
    let flips: i64 = (0..g.num_edges()).map(|e| parity_sign(phi[2 * e] % 2)).product();
    let sign = permutation_sign(&vmap) * flips * instance_sign(&c.canonical);
    Some((c.canonical, sign))
}

/// Rational combination of quotient basis graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphChain(pub BTreeMap<CanonicalGraph, Rational64>);

impl GraphChain {
    pub fn add(&mut self, c: CanonicalGraph, coeff: Rational64) {
        let slot = self.0.entry(c.clone()).or_insert_with(Rational64::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.0.remove(&c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, s: Rational64) -> GraphChain {
        let mut out = GraphChain::default();
        for (c, v) in &self.0 {
            out.add(c.clone(), v * s);
        }
        out
    }

    pub fn add_chain(&mut self, other: &GraphChain, s: Rational64) {
        for (c, v) in &other.0 {
            self.add(c.clone(), v * s);
        }
    }

    /// `(key, numerator, denominator)` triples.
    pub fn to_triples(&self) -> Vec<(String, i64, i64)> {
        self.0.iter().map(|(c, v)| (c.key(), *v.numer(), *v.denom())).collect()
    }
}

/// Rational combination of tensors of quotient basis graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorChain(pub BTreeMap<(CanonicalGraph, CanonicalGraph), Rational64>);

impl TensorChain {
    pub fn add(&mut self, a: CanonicalGraph, b: CanonicalGraph, coeff: Rational64) {
        let key = (a, b);
        let slot = self.0.entry(key.clone()).or_insert_with(Rational64::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.0.remove(&key);
        }
    }

    pub fn add_chain(&mut self, other: &TensorChain, s: Rational64) {
        for ((a, b), v) in &other.0 {
            self.add(a.clone(), b.clone(), v * s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(key, key, numerator, denominator)` quadruples.
    pub fn to_quads(&self) -> Vec<(String, String, i64, i64)> {
        self.0
            .iter()
            .map(|((a, b), v)| (a.key(), b.key(), *v.numer(), *v.denom()))
            .collect()
    }
}

fn check_quotient_input(c: &CanonicalGraph) -> Result<()> {
    let g = c.graph();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.has_cut_vertex() {
        return Err(Error::HasCutVertex);
    }
    if is_zero(c) {
        return Err(Error::ZeroGraph);
    }
    Ok(())
}

fn rat(k: i64) -> Rational64 {
    Rational64::from_integer(k)
}

/// Every oriented term `(K_xy(G·H), sign)` of the bracket of two labeled
/// graphs, before reduction.
pub fn bracket_terms(g: &Multigraph, h: &Multigraph) -> Vec<(Multigraph, i64)> {
    let union = g.disjoint_union(h);
    let offset = g.num_half_edges();
    let mut out = Vec::with_capacity(g.num_half_edges() * h.num_half_edges());
    for x in 0..g.num_half_edges() {
        for y in 0..h.num_half_edges() {
            out.push(contract_halfedges_oriented(&union, x, offset + y).expect("halves of distinct graphs"));
        }
    }
    out
}

/// `<G, H>` on quotient basis elements.
pub fn bracket(g: &CanonicalGraph, h: &CanonicalGraph) -> Result<GraphChain> {
    check_quotient_input(g)?;
    check_quotient_input(h)?;
    Ok(bracket_unchecked(g, h))
}

fn bracket_unchecked(g: &CanonicalGraph, h: &CanonicalGraph) -> GraphChain {
    let pre = instance_sign(g) * instance_sign(h);
    let mut out = GraphChain::default();
    for (k, s) in bracket_terms(g.graph(), h.graph()) {
        if let Some((c, t)) = reduce(&k) {
            out.add(c, rat(pre * s * t));
        }
    }
    out
}

/// Unordered pairs `{x, y}`, `x < y`, at distinct vertices whose contraction
/// increases the number of components. A pair at one vertex would keep the
/// vertex count, so it has no place in a degree-lowering cobracket; in a
/// graph without cut vertices no such pair separates anyway.
pub fn separating_pairs(g: &Multigraph) -> Vec<(HalfEdge, HalfEdge)> {
    let base = g.num_components();
    let mut out = Vec::new();
    for x in 0..g.num_half_edges() {
        for y in x + 1..g.num_half_edges() {
            if edge_of(x) == edge_of(y) || g.half_edge_vertex(x) == g.half_edge_vertex(y) {
                continue;
            }
            let k = contract_halfedges(g, x, y).expect("valid pair");
            if k.num_components() > base {
                out.push((x, y));
            }
        }
    }
    out
}

/// Splits a two-component labeled graph into `(A, B, sign)` where `A` holds
/// vertex 0 and `sign` is that of moving the vertices of `A` to the front.
pub fn split_components(k: &Multigraph) -> (Multigraph, Multigraph, i64) {
    let comp = k.components();
    let a_vs: Vec<Vertex> = (0..k.num_vertices()).filter(|&v| comp[v] == comp[0]).collect();
    let b_vs: Vec<Vertex> = (0..k.num_vertices()).filter(|&v| comp[v] != comp[0]).collect();
    let mut new_id = vec![0; k.num_vertices()];
    for (i, &v) in a_vs.iter().chain(&b_vs).enumerate() {
        new_id[v] = i;
    }
    let sign = permutation_sign(&new_id);
    let na = a_vs.len();
    let mut ea = Vec::new();
    let mut eb = Vec::new();
    for e in 0..k.num_edges() {
        let (t, h) = k.endpoints(e);
        if comp[t] == comp[0] {
            ea.push((new_id[t], new_id[h]));
        } else {
            eb.push((new_id[t] - na, new_id[h] - na));
        }
    }
    (
        Multigraph::new(na, &ea).expect("component"),
        Multigraph::new(b_vs.len(), &eb).expect("component"),
        sign,
    )
}

/// The cobracket of a quotient basis element.
pub fn cobracket(g: &CanonicalGraph) -> Result<TensorChain> {
    check_quotient_input(g)?;
    cobracket_unchecked(g)
}

fn cobracket_unchecked(g: &CanonicalGraph) -> Result<TensorChain> {
    let pre = instance_sign(g);
    let mut out = TensorChain::default();
    for (x, y) in separating_pairs(g.graph()) {
        let (k, s) = contract_halfedges_oriented(g.graph(), x, y)?;
        let (a, b, shuffle) = split_components(&k);
        let (Some((ca, sa)), Some((cb, sb))) = (reduce(&a), reduce(&b)) else {
            continue;
        };
        let coeff = pre * s * shuffle * sa * sb;
        let koszul = parity_sign(a.num_vertices() * b.num_vertices());
        out.add(ca.clone(), cb.clone(), rat(coeff));
        out.add(cb, ca, rat(coeff * koszul));
    }
    Ok(out)
}

/// Cobracket extended linearly to chains.
pub fn cobracket_chain(chain: &GraphChain) -> Result<TensorChain> {
    let mut out = TensorChain::default();
    for (c, v) in &chain.0 {
        out.add_chain(&cobracket_unchecked(c)?, *v);
    }
    Ok(out)
}

/// `[T, H]` for a tensor `T`.
pub fn bracket_tensor_left(t: &TensorChain, h: &CanonicalGraph) -> TensorChain {
    let hv = h.num_vertices();
    let mut out = TensorChain::default();
    for ((x, y), v) in &t.0 {
        let (xv, yv) = (x.num_vertices(), y.num_vertices());
        for (z, w) in &bracket_unchecked(x, h).0 {
            out.add(z.clone(), y.clone(), v * w * rat(parity_sign(yv * hv)));
        }
        for (z, w) in &bracket_unchecked(y, h).0 {
            out.add(x.clone(), z.clone(), v * w * rat(parity_sign(xv)));
        }
    }
    out
}

/// `[G, T]` for a tensor `T`.
pub fn bracket_tensor_right(g: &CanonicalGraph, t: &TensorChain) -> TensorChain {
    let gv = g.num_vertices();
    let mut out = TensorChain::default();
    for ((x, y), v) in &t.0 {
        let xv = x.num_vertices();
        for (z, w) in &bracket_unchecked(g, x).0 {
            out.add(z.clone(), y.clone(), v * w);
        }
        for (z, w) in &bracket_unchecked(g, y).0 {
            out.add(x.clone(), z.clone(), v * w * rat(parity_sign(xv * (gv + 1))));
        }
    }
    out
}

/// Sign of the last term of the compatibility identity. `Flipped` negates
/// it and exists as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompatibilitySign {
    Standard,
    Flipped,
}

/// `θ<G,H> + [θG, H] + (-1)^g [G, θH]`.
pub fn compatibility_defect(g: &CanonicalGraph, h: &CanonicalGraph, sign: CompatibilitySign) -> Result<TensorChain> {
    check_quotient_input(g)?;
    check_quotient_input(h)?;
    let mut last = parity_sign(g.num_vertices());
    if sign == CompatibilitySign::Flipped {
        last = -last;
    }
    let mut out = cobracket_chain(&bracket_unchecked(g, h))?;
    out.add_chain(&bracket_tensor_left(&cobracket_unchecked(g)?, h), Rational64::one());
    out.add_chain(&bracket_tensor_right(g, &cobracket_unchecked(h)?), rat(last));
    Ok(out)
}

pub fn compatibility_check(g: &CanonicalGraph, h: &CanonicalGraph) -> Result<bool> {
    Ok(compatibility_defect(g, h, CompatibilitySign::Standard)?.is_zero())
}

/// Counts from checking the statements about terms of the bracket and
/// factors of the cobracket on a family of graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub bracket_pairs: usize,
    pub bracket_terms: usize,
    pub bracket_violations: usize,
    pub cobracket_graphs: usize,
    pub separating_pairs: usize,
    pub cobracket_violations: usize,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.bracket_violations == 0 && self.cobracket_violations == 0
    }
}

/// Bracket terms of cut-free inputs must be connected and cut-free; if an
/// input has a cut vertex, so must every connected term. Terms through two
/// separating edges come out disconnected and lie outside the complex.
/// Inputs must be loop-free.
pub fn check_bracket_terms(g: &Multigraph, h: &Multigraph) -> (usize, usize) {
    let cut_input = g.has_cut_vertex() || h.has_cut_vertex();
    let terms = bracket_terms(g, h);
    let bad = terms
        .iter()
        .filter(|(k, _)| {
            if cut_input {
                k.is_connected() && !k.has_cut_vertex()
            } else {
                !k.is_connected() || k.has_cut_vertex()
            }
        })
        .count();
    (terms.len(), bad)
}

/// Factors of a separating pair of a connected graph must be connected; if
/// the graph has a cut vertex, one factor must have one too.
pub fn check_cobracket_factors(g: &Multigraph) -> (usize, usize) {
    let cut = g.has_cut_vertex();
    let pairs = separating_pairs(g);
    let bad = pairs
        .iter()
        .filter(|&&(x, y)| {
            let k = contract_halfedges(g, x, y).expect("valid pair");
            if k.num_components() != 2 {
                return true;
            }
            let (a, b, _) = split_components(&k);
            if !a.is_connected() || !b.is_connected() {
                return true;
            }
            cut && !a.has_cut_vertex() && !b.has_cut_vertex()
        })
        .count();
    (pairs.len(), bad)
}

/// Runs both lemma checks over all pairs and all graphs of `graphs`.
pub fn lemma_report(graphs: &[CanonicalGraph]) -> LemmaReport {
    let pairs: Vec<(usize, usize)> = (0..graphs.len())
        .flat_map(|i| (0..graphs.len()).map(move |j| (i, j)))
        .collect();
    let bracket: Vec<(usize, usize)> = pairs
        .par_iter()
        .map(|&(i, j)| check_bracket_terms(graphs[i].graph(), graphs[j].graph()))
        .collect();
    let cob: Vec<(usize, usize)> = graphs.par_iter().map(|c| check_cobracket_factors(c.graph())).collect();
    LemmaReport {
        bracket_pairs: pairs.len(),
        bracket_terms: bracket.iter().map(|p| p.0).sum(),
        bracket_violations: bracket.iter().map(|p| p.1).sum(),
        cobracket_graphs: graphs.len(),
        separating_pairs: cob.iter().map(|p| p.0).sum(),
        cobracket_violations: cob.iter().map(|p| p.1).sum(),
    }
}

/// Boundary of a basis element computed in the vertex convention: collapse
/// edge `t -> h` by moving `t, h` to the front and merging them. Used to
/// cross-check the two orientation conventions.
pub fn vertex_convention_boundary(c: &CanonicalGraph, quotient: bool) -> GraphChain {
    let g = c.graph();
    let pre = instance_sign(c);
    let mut out = GraphChain::default();
    for e in 0..g.num_edges() {
        let (t, h) = g.endpoints(e);
        if t == h {
            continue;
        }
        let mut relabel = vec![0; g.num_vertices()];
        let mut next = 1;
        for (u, slot) in relabel.iter_mut().enumerate() {
            if u != t && u != h {
                *slot = next;
                next += 1;
            }
        }
        let edges: Vec<(Vertex, Vertex)> = (0..g.num_edges())
            .filter(|&f| f != e)
            .map(|f| {
                let (a, b) = g.endpoints(f);
                (relabel[a], relabel[b])
            })
            .collect();
        let k = Multigraph::new(g.num_vertices() - 1, &edges).expect("valid");
        let moves = if h > t { t + h - 1 } else { t + h };
        let reduced = if quotient { reduce(&k) } else { reduce_any(&k) };
        if let Some((d, s)) = reduced {
            out.add(d, rat(pre * parity_sign(moves) * s));
        }
    }
    out
}
