//! Half-edge weighted graphs.
//!
//! A graph is a finite set `X = {0, .., n-1}` with an idempotent root map `r`
//! and an involution `i` fixing every vertex. Vertices are the fixed points of
//! `r`; every other element is a half-edge. A half-edge fixed by `i` is a leg,
//! the remaining half-edges pair up into finite edges (loops and parallel
//! edges allowed).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw serialized form of a graph, as read from or written to disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphData {
    pub half_edges: usize,
    pub root: Vec<usize>,
    pub involution: Vec<usize>,
    pub weights: BTreeMap<usize, u32>,
    #[serde(default)]
    pub legs: Vec<usize>,
}

/// Checks every graph axiom on raw data, reporting the first violation.
pub fn validate(data: &GraphData) -> Result<()> {
    let n = data.half_edges;
    let fail = |s: String| Err(Error::AxiomViolation(s));
    if data.root.len() != n {
        return fail(format!("root has length {}, expected {n}", data.root.len()));
    }
    if data.involution.len() != n {
        return fail(format!("involution has length {}, expected {n}", data.involution.len()));
    }
    if let Some(x) = (0..n).find(|&x| data.root[x] >= n || data.involution[x] >= n) {
        return fail(format!("element {x} maps outside X"));
    }
    let r = &data.root;
    let i = &data.involution;
    if let Some(x) = (0..n).find(|&x| r[r[x]] != r[x]) {
        return fail(format!("r∘r != r at {x}"));
    }
    if let Some(x) = (0..n).find(|&x| i[i[x]] != x) {
        return fail(format!("i∘i != id at {x}"));
    }
    // Read literally, r∘i = i∘r would force every edge to be a loop; the
    // usable condition is i∘r = r (the involution fixes vertices).
    if let Some(x) = (0..n).find(|&x| i[r[x]] != r[x]) {
        return fail(format!("i∘r != r at {x}"));
    }
    for (&v, _) in &data.weights {
        if v >= n || r[v] != v {
            return fail(format!("weight assigned to non-vertex {v}"));
        }
    }
    if let Some(v) = (0..n).find(|&x| r[x] == x && !data.weights.contains_key(&x)) {
        return fail(format!("vertex {v} has no weight"));
    }
    let mut seen = vec![false; n];
    for &l in &data.legs {
        if l >= n || r[l] == l || i[l] != l {
            return fail(format!("{l} is not a leg"));
        }
        if std::mem::replace(&mut seen[l], true) {
            return fail(format!("leg {l} listed twice"));
        }
    }
    let leg_count = (0..n).filter(|&x| r[x] != x && i[x] == x).count();
    if leg_count != data.legs.len() {
        return fail("leg order does not cover every leg".into());
    }
    if (0..n).filter(|&x| r[x] == x).count() == 0 {
        return fail("graph has no vertices".into());
    }
    if !connected(n, r, i) {
        return Err(Error::Disconnected);
    }
    Ok(())
}

fn connected(n: usize, r: &[usize], i: &[usize]) -> bool {
    let vertices: Vec<usize> = (0..n).filter(|&x| r[x] == x).collect();
    let mut dsu = Dsu::new(n);
    for h in 0..n {
        if r[h] != h {
            dsu.union(r[h], r[i[h]]);
        }
    }
    let first = dsu.find(vertices[0]);
    vertices.iter().all(|&v| dsu.find(v) == first)
}

/// Union-find over `0..n`.
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut y = x;
        while self.parent[y] != root {
            let next = self.parent[y];
            self.parent[y] = root;
            y = next;
        }
        root
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.parent[hi] = lo;
        }
    }
}

/// A validated, connected weighted graph.
///
/// Edge ids are assigned by sorting edges on their smaller half-edge; the
/// smaller half-edge is the edge's positive orientation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightedGraph {
    root: Vec<usize>,
    involution: Vec<usize>,
    weight: Vec<u32>,
    legs: Vec<usize>,
    vertices: Vec<usize>,
    edges: Vec<(usize, usize)>,
    edge_of: Vec<Option<usize>>,
}

impl WeightedGraph {
    pub fn new(data: GraphData) -> Result<Self> {
        validate(&data)?;
        let n = data.half_edges;
        let mut weight = vec![0; n];
        for (&v, &w) in &data.weights {
            weight[v] = w;
        }
        Ok(Self::assemble(data.root, data.involution, weight, data.legs))
    }

    fn assemble(root: Vec<usize>, involution: Vec<usize>, weight: Vec<u32>, legs: Vec<usize>) -> Self {
        let n = root.len();
        let vertices = (0..n).filter(|&x| root[x] == x).collect();
        let mut edges = Vec::new();
        let mut edge_of = vec![None; n];
        for h in 0..n {
            if root[h] != h && involution[h] > h {
                edge_of[h] = Some(edges.len());
                edge_of[involution[h]] = Some(edges.len());
                edges.push((h, involution[h]));
            }
        }
        WeightedGraph { root, involution, weight, legs, vertices, edges, edge_of }
    }

    pub fn to_data(&self) -> GraphData {
        GraphData {
            half_edges: self.size(),
            root: self.root.clone(),
            involution: self.involution.clone(),
            weights: self.vertices.iter().map(|&v| (v, self.weight[v])).collect(),
            legs: self.legs.clone(),
        }
    }

    /// |X|.
    pub fn size(&self) -> usize {
        self.root.len()
    }

    pub fn root(&self, x: usize) -> usize {
        self.root[x]
    }

    pub fn involution(&self, x: usize) -> usize {
        self.involution[x]
    }

    pub fn is_vertex(&self, x: usize) -> bool {
        x < self.size() && self.root[x] == x
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Edges as `(positive half-edge, negative half-edge)`, indexed by edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    /// Edge id of a half-edge, `None` for vertices and legs.
    pub fn edge_of(&self, h: usize) -> Option<usize> {
        self.edge_of.get(h).copied().flatten()
    }

    /// The endpoints `(r(h+), r(h-))` of an edge.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (a, b) = self.edges[e];
        (self.root[a], self.root[b])
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (a, b) = self.endpoints(e);
        a == b
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.weight[v]
    }

    /// Non-vertex elements rooted at `v`, in increasing order.
    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.size()).filter(|&h| h != v && self.root[h] == v).collect()
    }

    pub fn valence(&self, v: usize) -> Result<usize> {
        if !self.is_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        Ok((0..self.size()).filter(|&h| h != v && self.root[h] == v).count())
    }

    fn valence_unchecked(&self, v: usize) -> usize {
        (0..self.size()).filter(|&h| h != v && self.root[h] == v).count()
    }

    pub fn loop_count(&self, v: usize) -> usize {
        (0..self.edges.len()).filter(|&e| self.is_loop(e) && self.endpoints(e).0 == v).count()
    }

    pub fn total_weight(&self) -> u64 {
        self.vertices.iter().map(|&v| self.weight[v] as u64).sum()
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn betti(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn genus(&self) -> usize {
        self.betti() + self.total_weight() as usize
    }

    /// Every vertex satisfies `2h(v) - 2 + val(v) > 0`.
    pub fn is_stable(&self) -> bool {
        self.vertices
            .iter()
            .all(|&v| 2 * self.weight[v] as i64 - 2 + self.valence_unchecked(v) as i64 > 0)
    }

    /// Vertices on the other side of each edge at `v` (loops report `v`).
    pub fn neighbours(&self, v: usize) -> Vec<(usize, usize)> {
        self.half_edges_at(v)
            .into_iter()
            .filter_map(|h| self.edge_of(h).map(|e| (e, self.root[self.involution[h]])))
            .collect()
    }

    /// Relabels X by a bijection `perm: X -> X'`.
    pub fn relabel(&self, perm: &[usize]) -> WeightedGraph {
        let n = self.size();
        let mut root = vec![0; n];
        let mut inv = vec![0; n];
        let mut weight = vec![0; n];
        for x in 0..n {
            root[perm[x]] = perm[self.root[x]];
            inv[perm[x]] = perm[self.involution[x]];
            weight[perm[x]] = self.weight[x];
        }
        let legs = self.legs.iter().map(|&l| perm[l]).collect();
        Self::assemble(root, inv, weight, legs)
    }
}

impl fmt::Debug for WeightedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightedGraph {{ ")?;
        for &v in &self.vertices {
            write!(f, "v{v}[h={}] ", self.weight[v])?;
        }
        for (e, _) in self.edges.iter().enumerate() {
            let (a, b) = self.endpoints(e);
            write!(f, "e{e}:{a}-{b} ")?;
        }
        for &l in &self.legs {
            write!(f, "leg{l}@{} ", self.root[l])?;
        }
        write!(f, "}}")
    }
}

/// Builds graphs in the layout `[vertices.., edge half-edges.., legs..]`.
///
/// Each edge contributes two consecutive half-edges, the first rooted at the
/// first endpoint, so edge ids follow insertion order.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    weights: Vec<u32>,
    edges: Vec<(usize, usize)>,
    legs: Vec<usize>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex and returns its index among vertices (also its label in X).
    pub fn vertex(&mut self, weight: u32) -> usize {
        self.weights.push(weight);
        self.weights.len() - 1
    }

    pub fn edge(&mut self, a: usize, b: usize) -> &mut Self {
        self.edges.push((a, b));
        self
    }

    pub fn leg(&mut self, v: usize) -> &mut Self {
        self.legs.push(v);
        self
    }

    pub fn data(&self) -> GraphData {
        let nv = self.weights.len();
        let n = nv + 2 * self.edges.len() + self.legs.len();
        let mut root: Vec<usize> = (0..n).collect();
        let mut involution: Vec<usize> = (0..n).collect();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            let h = nv + 2 * k;
            root[h] = a;
            root[h + 1] = b;
            involution[h] = h + 1;
            involution[h + 1] = h;
        }
        let leg_base = nv + 2 * self.edges.len();
        for (k, &v) in self.legs.iter().enumerate() {
            root[leg_base + k] = v;
        }
        GraphData {
            half_edges: n,
            root,
            involution,
            weights: self.weights.iter().copied().enumerate().collect(),
            legs: (leg_base..n).collect(),
        }
    }

    pub fn build(&self) -> Result<WeightedGraph> {
        WeightedGraph::new(self.data())
    }
}

/// Small named graphs used throughout tests and examples.
pub mod named {
    use super::{GraphBuilder, WeightedGraph};

    /// Two weight-zero vertices joined by three edges.
    pub fn theta() -> WeightedGraph {
        let mut b = GraphBuilder::new();
        let (x, y) = (b.vertex(0), b.vertex(0));
        b.edge(x, y).edge(x, y).edge(x, y);
        b.build().unwrap()
    }

    /// Two loops joined by a bridge.
    pub fn dumbbell() -> WeightedGraph {
        let mut b = GraphBuilder::new();
        let (x, y) = (b.vertex(0), b.vertex(0));
        b.edge(x, x).edge(x, y).edge(y, y);
        b.build().unwrap()
    }

    /// `k` loops on one weight-zero vertex.
    pub fn rose(k: usize) -> WeightedGraph {
        let mut b = GraphBuilder::new();
        let v = b.vertex(0);
        for _ in 0..k {
            b.edge(v, v);
        }
        b.build().unwrap()
    }

    /// A single vertex of the given weight.
    pub fn point(weight: u32) -> WeightedGraph {
        let mut b = GraphBuilder::new();
        b.vertex(weight);
        b.build().unwrap()
    }

    /// One loop on a vertex of the given weight.
    pub fn loop_on(weight: u32) -> WeightedGraph {
        let mut b = GraphBuilder::new();
        let v = b.vertex(weight);
        b.edge(v, v);
        b.build().unwrap()
    }

    /// Two vertices of the given weights joined by one edge.
    pub fn bridge(w1: u32, w2: u32) -> WeightedGraph {
        let mut b = GraphBuilder::new();
        let (x, y) = (b.vertex(w1), b.vertex(w2));
        b.edge(x, y);
        b.build().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn theta_axioms_hold() {
        let g = theta();
        assert!(validate(&g.to_data()).is_ok());
        assert_eq!(g.genus(), 2);
        assert_eq!(g.valence(0).unwrap(), 3);
        assert_eq!(g.valence(1).unwrap(), 3);
        assert!(g.is_stable());
    }

    #[test]
    fn isolated_weight_two_vertex() {
        let data = GraphData {
            half_edges: 1,
            root: vec![0],
            involution: vec![0],
            weights: [(0, 2)].into_iter().collect(),
            legs: vec![],
        };
        let g = WeightedGraph::new(data).unwrap();
        assert_eq!(g.genus(), 2);
        assert_eq!(g.valence(0).unwrap(), 0);
        assert!(g.is_stable());
    }

    #[test]
    fn broken_involution_is_rejected() {
        let mut data = theta().to_data();
        // 2 -> 3 but 3 -> 4
        data.involution[3] = 4;
        assert!(matches!(validate(&data), Err(Error::AxiomViolation(_))));
    }

    #[test]
    fn root_not_idempotent() {
        let mut data = theta().to_data();
        data.root[2] = 3;
        assert!(matches!(validate(&data), Err(Error::AxiomViolation(_))));
    }

    #[test]
    fn disconnected_graph() {
        let data = GraphData {
            half_edges: 2,
            root: vec![0, 1],
            involution: vec![0, 1],
            weights: [(0, 1), (1, 1)].into_iter().collect(),
            legs: vec![],
        };
        assert_eq!(validate(&data), Err(Error::Disconnected));
    }

    #[test]
    fn missing_leg_in_order() {
        let mut b = GraphBuilder::new();
        let v = b.vertex(1);
        b.leg(v);
        let mut data = b.data();
        data.legs.clear();
        assert!(matches!(validate(&data), Err(Error::AxiomViolation(_))));
        assert!(b.build().is_ok());
    }

    #[test]
    fn genus_and_valence_examples() {
        assert_eq!(rose(2).genus(), 2);
        assert_eq!(rose(2).valence(0).unwrap(), 4);
        assert_eq!(point(2).valence(0).unwrap(), 0);
        assert_eq!(theta().valence(2), Err(Error::UnknownVertex(2)));
    }

    #[test]
    fn stability_examples() {
        assert!(!point(1).is_stable());
        assert!(!loop_on(0).is_stable());
        assert!(loop_on(1).is_stable());
        assert!(dumbbell().is_stable());
    }

    #[test]
    fn element_count_identity() {
        for g in [theta(), dumbbell(), rose(3), point(2), loop_on(1), bridge(1, 1)] {
            assert_eq!(g.size(), g.vertex_count() + 2 * g.edge_count() + g.legs().len());
        }
    }
}
