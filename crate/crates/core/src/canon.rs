//! Canonical forms, isomorphisms and automorphism groups of weighted graphs.
//!
//! Canonical labelling refines vertex colours by (weight, valence, loops,
//! legs) and neighbourhood multisets, then backtracks over individualised
//! vertices. Every discrete leaf yields a vertex order and an encoding; the
//! lexicographically least encoding is the certificate.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, WeightedGraph};

/// Byte string determined by the isomorphism class.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Certificate(pub Vec<u8>);

impl Certificate {
    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s)
            .map(Certificate)
            .map_err(|e| Error::Malformed(format!("certificate: {e}")))
    }

    fn values(&self) -> Result<Vec<u32>> {
        if self.0.len() % 4 != 0 {
            return Err(Error::Malformed("certificate length".into()));
        }
        Ok(self.0.chunks(4).map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]])).collect())
    }

    /// Rebuilds the canonical graph the certificate encodes.
    pub fn decode(&self) -> Result<WeightedGraph> {
        let vals = self.values()?;
        let bad = || Error::Malformed("truncated certificate".into());
        let nv = *vals.first().ok_or_else(bad)? as usize;
        let nl = *vals.get(2).ok_or_else(bad)? as usize;
        let mut at = 3;
        let mut b = GraphBuilder::new();
        for _ in 0..nv {
            b.vertex(*vals.get(at).ok_or_else(bad)?);
            at += 1;
        }
        for a in 0..nv {
            for c in a..nv {
                let m = *vals.get(at).ok_or_else(bad)?;
                at += 1;
                for _ in 0..m {
                    b.edge(a, c);
                }
            }
        }
        for _ in 0..nl {
            let v = *vals.get(at).ok_or_else(bad)? as usize;
            if v >= nv {
                return Err(bad());
            }
            b.leg(v);
            at += 1;
        }
        if at != vals.len() {
            return Err(Error::Malformed("trailing certificate data".into()));
        }
        b.build()
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Certificate({})", self.to_hex())
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// Bijection from X of the input graph to X of [`CanonicalForm::graph`].
    pub canonical_labeling: Vec<usize>,
    pub certificate: Certificate,
    /// The canonical representative, in builder layout.
    pub graph: WeightedGraph,
}

/// A bijection `X_src -> X_tgt` commuting with `r` and `i` and preserving
/// weights and the leg order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isomorphism {
    pub source: WeightedGraph,
    pub target: WeightedGraph,
    pub half_edge_map: Vec<usize>,
}

impl Isomorphism {
    pub fn identity(g: &WeightedGraph) -> Self {
        Isomorphism { source: g.clone(), target: g.clone(), half_edge_map: (0..g.size()).collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.half_edge_map[x]
    }

    pub fn inverse(&self) -> Isomorphism {
        let mut inv = vec![0; self.half_edge_map.len()];
        for (x, &y) in self.half_edge_map.iter().enumerate() {
            inv[y] = x;
        }
        Isomorphism { source: self.target.clone(), target: self.source.clone(), half_edge_map: inv }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Isomorphism) -> Isomorphism {
        Isomorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            half_edge_map: first.half_edge_map.iter().map(|&y| self.half_edge_map[y]).collect(),
        }
    }

    /// Checks the defining conditions directly.
    pub fn is_valid(&self) -> bool {
        is_isomorphism(&self.source, &self.target, &self.half_edge_map)
    }

    /// Edge id in the target of the image of source edge `e`.
    pub fn edge_image(&self, e: usize) -> usize {
        self.target.edge_of(self.apply(self.source.edges()[e].0)).expect("edge maps to edge")
    }
}

/// Whether `map` is an isomorphism `g1 -> g2`.
pub fn is_isomorphism(g1: &WeightedGraph, g2: &WeightedGraph, map: &[usize]) -> bool {
    let n = g1.size();
    if g2.size() != n || map.len() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for &y in map {
        if y >= n || std::mem::replace(&mut hit[y], true) {
            return false;
        }
    }
    (0..n).all(|x| {
        map[g1.root(x)] == g2.root(map[x])
            && map[g1.involution(x)] == g2.involution(map[x])
            && (!g1.is_vertex(x) || g1.weight(x) == g2.weight(map[x]))
    }) && g1.legs().len() == g2.legs().len()
        && g1.legs().iter().zip(g2.legs()).all(|(&a, &b)| map[a] == b)
}

/// Vertex-level view: vertices indexed `0..nv`, multiplicity matrix, legs.
struct VertexView {
    vertices: Vec<usize>,
    weight: Vec<u32>,
    mult: Vec<Vec<u32>>,
    legs_at: Vec<Vec<usize>>,
    leg_vertex: Vec<usize>,
}

impl VertexView {
    fn new(g: &WeightedGraph) -> Self {
        let vertices = g.vertices().to_vec();
        let nv = vertices.len();
        let index: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut mult = vec![vec![0; nv]; nv];
        for e in 0..g.edge_count() {
            let (a, b) = g.endpoints(e);
            let (a, b) = (index[&a], index[&b]);
            mult[a][b] += 1;
            if a != b {
                mult[b][a] += 1;
            }
        }
        let mut legs_at = vec![Vec::new(); nv];
        let mut leg_vertex = Vec::new();
        for (k, &l) in g.legs().iter().enumerate() {
            let v = index[&g.root(l)];
            legs_at[v].push(k);
            leg_vertex.push(v);
        }
        let weight = vertices.iter().map(|&v| g.weight(v)).collect();
        VertexView { vertices, weight, mult, legs_at, leg_vertex }
    }

    fn nv(&self) -> usize {
        self.vertices.len()
    }

    fn initial_signature(&self, v: usize) -> (u32, u32, u32, Vec<usize>) {
        let valence: u32 = (0..self.nv()).map(|w| if w == v { 2 * self.mult[v][v] } else { self.mult[v][w] }).sum::<u32>()
            + self.legs_at[v].len() as u32;
        (self.weight[v], valence, self.mult[v][v], self.legs_at[v].clone())
    }

    fn initial_colours(&self) -> Vec<usize> {
        let sigs: Vec<_> = (0..self.nv()).map(|v| self.initial_signature(v)).collect();
        rank(&sigs)
    }

    /// Iterates neighbourhood refinement to a stable colouring.
    fn refine(&self, mut colours: Vec<usize>) -> Vec<usize> {
        loop {
            let sigs: Vec<(usize, Vec<(usize, u32)>)> = (0..self.nv())
                .map(|v| {
                    let mut nb: Vec<(usize, u32)> = (0..self.nv())
                        .filter(|&w| w != v && self.mult[v][w] > 0)
                        .map(|w| (colours[w], self.mult[v][w]))
                        .collect();
                    nb.sort_unstable();
                    (colours[v], nb)
                })
                .collect();
            let next = rank(&sigs);
            let before = colours.iter().collect::<std::collections::BTreeSet<_>>().len();
            let after = next.iter().collect::<std::collections::BTreeSet<_>>().len();
            colours = next;
            if after == before {
                return colours;
            }
        }
    }

    fn encode(&self, order: &[usize]) -> Vec<u32> {
        let nv = self.nv();
        let mut pos = vec![0; nv];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let ne: u32 = (0..nv).map(|a| (a..nv).map(|b| self.mult[a][b]).sum::<u32>()).sum();
        let mut out = vec![nv as u32, ne, self.leg_vertex.len() as u32];
        out.extend(order.iter().map(|&v| self.weight[v]));
        for a in 0..nv {
            for b in a..nv {
                out.push(self.mult[order[a]][order[b]]);
            }
        }
        out.extend(self.leg_vertex.iter().map(|&v| pos[v] as u32));
        out
    }
}

fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    sigs.iter().map(|s| distinct.binary_search(s).unwrap()).collect()
}

fn search(view: &VertexView, colours: Vec<usize>, best: &mut Option<(Vec<u32>, Vec<usize>)>) {
    let colours = view.refine(colours);
    let nv = view.nv();
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..nv {
        cells.entry(colours[v]).or_default().push(v);
    }
    match cells.values().find(|c| c.len() > 1) {
        None => {
            let mut order: Vec<usize> = (0..nv).collect();
            order.sort_by_key(|&v| colours[v]);
            let code = view.encode(&order);
            let better = match best {
                None => true,
                Some((b, _)) => code.cmp(b) == Ordering::Less,
            };
            if better {
                *best = Some((code, order));
            }
        }
        Some(cell) => {
            for &v in cell {
                let individualised: Vec<usize> =
                    (0..nv).map(|w| 2 * colours[w] + usize::from(w != v)).collect();
                search(view, individualised, best);
            }
        }
    }
}

/// Canonical labelling and certificate.
pub fn canonical_form(g: &WeightedGraph) -> CanonicalForm {
    let view = VertexView::new(g);
    let mut best = None;
    search(&view, view.initial_colours(), &mut best);
    let (code, order) = best.expect("graph has at least one vertex");
    let certificate = Certificate(code.iter().flat_map(|v| v.to_be_bytes()).collect());

    let nv = view.nv();
    let mut b = GraphBuilder::new();
    for &v in &order {
        b.vertex(view.weight[v]);
    }
    let mut labeling = vec![usize::MAX; g.size()];
    for (k, &v) in order.iter().enumerate() {
        labeling[view.vertices[v]] = k;
    }
    let mut next = nv;
    for a in 0..nv {
        for c in a..nv {
            let (va, vc) = (view.vertices[order[a]], view.vertices[order[c]]);
            for e in 0..g.edge_count() {
                let (h, k) = g.edges()[e];
                let (ra, rb) = (g.root(h), g.root(k));
                if (ra, rb) == (va, vc) {
                    labeling[h] = next;
                    labeling[k] = next + 1;
                } else if (rb, ra) == (va, vc) {
                    labeling[k] = next;
                    labeling[h] = next + 1;
                } else {
                    continue;
                }
                b.edge(a, c);
                next += 2;
            }
        }
    }
    let mut pos = vec![0; nv];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    for (k, &l) in g.legs().iter().enumerate() {
        labeling[l] = next + k;
        b.leg(pos[view.leg_vertex[k]]);
    }
    let graph = b.build().expect("canonical relabelling is a graph");
    debug_assert!(is_isomorphism(g, &graph, &labeling));
    CanonicalForm { canonical_labeling: labeling, certificate, graph }
}

pub fn certificate(g: &WeightedGraph) -> Certificate {
    canonical_form(g).certificate
}

/// The isomorphism from `g` onto its canonical representative.
pub fn to_canonical(g: &WeightedGraph) -> Isomorphism {
    let cf = canonical_form(g);
    Isomorphism { source: g.clone(), target: cf.graph, half_edge_map: cf.canonical_labeling }
}

/// A witness isomorphism if one exists.
pub fn are_isomorphic(g1: &WeightedGraph, g2: &WeightedGraph) -> Option<Isomorphism> {
    let c1 = to_canonical(g1);
    let c2 = to_canonical(g2);
    if c1.target != c2.target {
        return None;
    }
    Some(c2.inverse().after(&c1))
}

/// Raw half-edge maps of every isomorphism `g1 -> g2`.
pub fn isomorphism_maps(g1: &WeightedGraph, g2: &WeightedGraph) -> Vec<Vec<usize>> {
    let (v1, v2) = (VertexView::new(g1), VertexView::new(g2));
    if v1.nv() != v2.nv() || g1.size() != g2.size() || g1.legs().len() != g2.legs().len() {
        return Vec::new();
    }
    let sig1: Vec<_> = (0..v1.nv()).map(|v| v1.initial_signature(v)).collect();
    let sig2: Vec<_> = (0..v2.nv()).map(|v| v2.initial_signature(v)).collect();
    let mut vertex_maps = Vec::new();
    let mut assign = vec![usize::MAX; v1.nv()];
    let mut used = vec![false; v2.nv()];
    vertex_bijections(&v1, &v2, &sig1, &sig2, 0, &mut assign, &mut used, &mut vertex_maps);

    let mut out = Vec::new();
    for sigma in vertex_maps {
        expand_half_edges(g1, g2, &v1, &v2, &sigma, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn vertex_bijections(
    v1: &VertexView,
    v2: &VertexView,
    sig1: &[(u32, u32, u32, Vec<usize>)],
    sig2: &[(u32, u32, u32, Vec<usize>)],
    k: usize,
    assign: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    if k == v1.nv() {
        out.push(assign.clone());
        return;
    }
    for t in 0..v2.nv() {
        if used[t] || sig1[k] != sig2[t] {
            continue;
        }
        if (0..k).any(|j| v1.mult[k][j] != v2.mult[t][assign[j]]) {
            continue;
        }
        assign[k] = t;
        used[t] = true;
        vertex_bijections(v1, v2, sig1, sig2, k + 1, assign, used, out);
        used[t] = false;
    }
    assign[k] = usize::MAX;
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn expand_half_edges(
    g1: &WeightedGraph,
    g2: &WeightedGraph,
    v1: &VertexView,
    v2: &VertexView,
    sigma: &[usize],
    out: &mut Vec<Vec<usize>>,
) {
    let nv = v1.nv();
    let mut base = vec![usize::MAX; g1.size()];
    for a in 0..nv {
        base[v1.vertices[a]] = v2.vertices[sigma[a]];
    }
    for (l1, l2) in g1.legs().iter().zip(g2.legs()) {
        base[*l1] = *l2;
    }
    // Each block lists alternative partial assignments for the edges between
    // one pair of vertices.
    let mut blocks: Vec<Vec<Vec<(usize, usize)>>> = Vec::new();
    let edges_between = |g: &WeightedGraph, x: usize, y: usize| -> Vec<usize> {
        (0..g.edge_count())
            .filter(|&e| {
                let (p, q) = g.endpoints(e);
                (p, q) == (x, y) || (q, p) == (x, y)
            })
            .collect()
    };
    let half_at = |g: &WeightedGraph, e: usize, x: usize| -> (usize, usize) {
        let (h, k) = g.edges()[e];
        if g.root(h) == x { (h, k) } else { (k, h) }
    };
    for a in 0..nv {
        for b in a..nv {
            let (xa, xb) = (v1.vertices[a], v1.vertices[b]);
            let (ya, yb) = (v2.vertices[sigma[a]], v2.vertices[sigma[b]]);
            let src = edges_between(g1, xa, xb);
            if src.is_empty() {
                continue;
            }
            let tgt = edges_between(g2, ya, yb);
            let mut options = Vec::new();
            for perm in permutations(src.len()) {
                if a == b {
                    for flips in 0..(1u32 << src.len()) {
                        let mut pairs = Vec::new();
                        for (k, &e) in src.iter().enumerate() {
                            let (h, hh) = g1.edges()[e];
                            let (t, tt) = g2.edges()[tgt[perm[k]]];
                            if flips >> k & 1 == 0 {
                                pairs.extend([(h, t), (hh, tt)]);
                            } else {
                                pairs.extend([(h, tt), (hh, t)]);
                            }
                        }
                        options.push(pairs);
                    }
                } else {
                    let mut pairs = Vec::new();
                    for (k, &e) in src.iter().enumerate() {
                        let (h, hh) = half_at(g1, e, xa);
                        let (t, tt) = half_at(g2, tgt[perm[k]], ya);
                        pairs.extend([(h, t), (hh, tt)]);
                    }
                    options.push(pairs);
                }
            }
            blocks.push(options);
        }
    }
    let mut idx = vec![0usize; blocks.len()];
    loop {
        let mut map = base.clone();
        for (block, &i) in blocks.iter().zip(&idx) {
            for &(x, y) in &block[i] {
                map[x] = y;
            }
        }
        out.push(map);
        let mut k = 0;
        loop {
            if k == blocks.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < blocks[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Every isomorphism `g1 -> g2`.
pub fn isomorphisms(g1: &WeightedGraph, g2: &WeightedGraph) -> Vec<Isomorphism> {
    isomorphism_maps(g1, g2)
        .into_iter()
        .map(|m| Isomorphism { source: g1.clone(), target: g2.clone(), half_edge_map: m })
        .collect()
}

/// The full automorphism group, identity first.
pub fn automorphisms(g: &WeightedGraph) -> Vec<Isomorphism> {
    let mut all = isomorphisms(g, g);
    let id: Vec<usize> = (0..g.size()).collect();
    let pos = all.iter().position(|a| a.half_edge_map == id).expect("identity is an automorphism");
    all.swap(0, pos);
    all[1..].sort_by(|a, b| a.half_edge_map.cmp(&b.half_edge_map));
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn theta_relabelled_has_same_certificate() {
        let g = theta();
        let perm = vec![1, 0, 7, 6, 3, 2, 5, 4];
        let h = g.relabel(&perm);
        assert_eq!(certificate(&g), certificate(&h));
        let w = are_isomorphic(&g, &h).unwrap();
        assert!(w.is_valid());
    }

    #[test]
    fn theta_and_dumbbell_differ() {
        assert_ne!(certificate(&theta()), certificate(&dumbbell()));
        assert!(are_isomorphic(&theta(), &dumbbell()).is_none());
    }

    #[test]
    fn weights_separate_classes() {
        let mut b = GraphBuilder::new();
        let v = b.vertex(0);
        let w = b.vertex(1);
        b.edge(v, v).edge(v, w);
        let g = b.build().unwrap();
        assert_eq!(g.genus(), 2);
        assert!(are_isomorphic(&rose(2), &loop_on(1)).is_none());
        assert!(are_isomorphic(&rose(2), &g).is_none());
    }

    #[test]
    fn certificate_is_deterministic_and_decodes() {
        let g = dumbbell();
        let c = certificate(&g);
        assert_eq!(c, certificate(&g));
        let back = c.decode().unwrap();
        assert_eq!(back, canonical_form(&g).graph);
        assert_eq!(Certificate::from_hex(&c.to_hex()).unwrap(), c);
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(automorphisms(&theta()).len(), 12);
        assert_eq!(automorphisms(&dumbbell()).len(), 8);
        assert_eq!(automorphisms(&point(2)).len(), 1);
        assert_eq!(automorphisms(&rose(2)).len(), 8);
        assert_eq!(automorphisms(&bridge(1, 1)).len(), 2);
        assert!(automorphisms(&theta()).iter().all(Isomorphism::is_valid));
    }

    #[test]
    fn legs_are_preserved_in_order() {
        let mut b = GraphBuilder::new();
        let (x, y) = (b.vertex(0), b.vertex(0));
        b.edge(x, y).edge(x, y).leg(x).leg(y);
        let g = b.build().unwrap();
        // swapping vertices would swap the ordered legs
        assert_eq!(automorphisms(&g).len(), 2);
    }
}
