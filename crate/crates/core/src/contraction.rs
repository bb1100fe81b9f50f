//! Weighted edge contractions: the morphisms between stable weighted graphs.

use std::collections::{BTreeMap, BTreeSet};

use crate::canon::{are_isomorphic, certificate, Isomorphism};
use crate::error::{Error, Result};
use crate::graph::{Dsu, GraphData, WeightedGraph};

/// A contraction `source -> target`.
///
/// `vertex_map` sends every source vertex to the target vertex absorbing it;
/// `half_edge_map` sends each target half-edge (including legs) back to its
/// unique preimage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeContraction {
    pub source: WeightedGraph,
    pub target: WeightedGraph,
    pub contracted: BTreeSet<usize>,
    pub vertex_map: BTreeMap<usize, usize>,
    pub half_edge_map: BTreeMap<usize, usize>,
}

/// Collapses every connected component of the subgraph spanned by `edges`.
///
/// Surviving elements keep their relative order: the target's X is the sorted
/// list of survivors (the least vertex of each component plus all uncontracted
/// half-edges), so contracting nothing is the identity.
pub fn contract(g: &WeightedGraph, edges: &BTreeSet<usize>) -> Result<(WeightedGraph, EdgeContraction)> {
    if let Some(&e) = edges.iter().find(|&&e| e >= g.edge_count()) {
        return Err(Error::UnknownEdge(e));
    }
    let n = g.size();
    let mut dsu = Dsu::new(n);
    for &e in edges {
        let (a, b) = g.endpoints(e);
        dsu.union(a, b);
    }
    // Dsu keeps the least element as representative.
    let mut survivors = Vec::new();
    for x in 0..n {
        let keep = if g.is_vertex(x) {
            dsu.find(x) == x
        } else {
            g.edge_of(x).is_none_or(|e| !edges.contains(&e))
        };
        if keep {
            survivors.push(x);
        }
    }
    let mut label = vec![usize::MAX; n];
    for (k, &x) in survivors.iter().enumerate() {
        label[x] = k;
    }
    let mut comp_vertices: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comp_edges: BTreeMap<usize, usize> = BTreeMap::new();
    let mut comp_weight: BTreeMap<usize, u64> = BTreeMap::new();
    for &v in g.vertices() {
        let c = dsu.find(v);
        *comp_vertices.entry(c).or_default() += 1;
        *comp_weight.entry(c).or_default() += g.weight(v) as u64;
    }
    for &e in edges {
        *comp_edges.entry(dsu.find(g.endpoints(e).0)).or_default() += 1;
    }
    let mut root = Vec::with_capacity(survivors.len());
    let mut involution = Vec::with_capacity(survivors.len());
    let mut weights = BTreeMap::new();
    for &x in &survivors {
        if g.is_vertex(x) {
            root.push(label[x]);
            involution.push(label[x]);
            let b1 = comp_edges.get(&x).copied().unwrap_or(0) + 1 - comp_vertices[&x];
            weights.insert(label[x], (comp_weight[&x] + b1 as u64) as u32);
        } else {
            root.push(label[dsu.find(g.root(x))]);
            involution.push(label[g.involution(x)]);
        }
    }
    let legs = g.legs().iter().map(|&l| label[l]).collect();
    let target = WeightedGraph::new(GraphData { half_edges: survivors.len(), root, involution, weights, legs })?;
    let vertex_map = g.vertices().iter().map(|&v| (v, label[dsu.find(v)])).collect();
    let half_edge_map = survivors.iter().filter(|&&x| !g.is_vertex(x)).map(|&x| (label[x], x)).collect();
    let c = EdgeContraction {
        source: g.clone(),
        target: target.clone(),
        contracted: edges.clone(),
        vertex_map,
        half_edge_map,
    };
    Ok((target, c))
}

impl EdgeContraction {
    pub fn identity(g: &WeightedGraph) -> Self {
        contract(g, &BTreeSet::new()).expect("empty contraction").1
    }

    pub fn is_identity(&self) -> bool {
        self.contracted.is_empty() && self.source == self.target && self.half_edge_map.iter().all(|(a, b)| a == b)
    }

    /// Follows the contraction by a relabelling of its target.
    pub fn then_iso(&self, iso: &Isomorphism) -> Result<EdgeContraction> {
        if iso.source != self.target {
            return Err(Error::Incomposable("isomorphism source is not the contraction target".into()));
        }
        let inv = iso.inverse();
        Ok(EdgeContraction {
            source: self.source.clone(),
            target: iso.target.clone(),
            contracted: self.contracted.clone(),
            vertex_map: self.vertex_map.iter().map(|(&v, &w)| (v, iso.apply(w))).collect(),
            half_edge_map: (0..iso.target.size())
                .filter(|&h| !iso.target.is_vertex(h))
                .map(|h| (h, self.half_edge_map[&inv.apply(h)]))
                .collect(),
        })
    }

    /// Source edge id of a target edge.
    pub fn edge_preimage(&self, target_edge: usize) -> usize {
        let h = self.target.edges()[target_edge].0;
        self.source.edge_of(self.half_edge_map[&h]).expect("edges lift to edges")
    }

    /// Target edge id of an uncontracted source edge.
    pub fn edge_image(&self, source_edge: usize) -> Option<usize> {
        if self.contracted.contains(&source_edge) {
            return None;
        }
        let h = self.source.edges()[source_edge].0;
        self.half_edge_map.iter().find(|(_, &s)| s == h).and_then(|(&t, _)| self.target.edge_of(t))
    }

    /// Source vertices collapsing onto `v`.
    pub fn preimage(&self, v: usize) -> Vec<usize> {
        self.vertex_map.iter().filter(|(_, &w)| w == v).map(|(&u, _)| u).collect()
    }

    /// Checks every contraction axiom directly against the two graphs.
    pub fn is_valid(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        if self.contracted.iter().any(|&e| e >= s.edge_count()) {
            return false;
        }
        // half_edge_map: bijection from target half-edges onto uncontracted source half-edges
        let target_half: BTreeSet<usize> = (0..t.size()).filter(|&x| !t.is_vertex(x)).collect();
        if self.half_edge_map.keys().copied().collect::<BTreeSet<_>>() != target_half {
            return false;
        }
        let images: BTreeSet<usize> = self.half_edge_map.values().copied().collect();
        let expected: BTreeSet<usize> = (0..s.size())
            .filter(|&x| !s.is_vertex(x) && s.edge_of(x).is_none_or(|e| !self.contracted.contains(&e)))
            .collect();
        if images != expected || images.len() != target_half.len() {
            return false;
        }
        if self.vertex_map.keys().copied().collect::<Vec<_>>() != s.vertices() {
            return false;
        }
        if self.vertex_map.values().any(|&w| !t.is_vertex(w)) {
            return false;
        }
        // compatibility with r and i
        for (&ht, &hs) in &self.half_edge_map {
            if self.vertex_map[&s.root(hs)] != t.root(ht) {
                return false;
            }
            if self.half_edge_map.get(&t.involution(ht)) != Some(&s.involution(hs)) {
                return false;
            }
        }
        // contracted edges stay inside one fibre
        for &e in &self.contracted {
            let (a, b) = s.endpoints(e);
            if self.vertex_map[&a] != self.vertex_map[&b] {
                return false;
            }
        }
        // leg order
        if s.legs().len() != t.legs().len() || t.legs().iter().zip(s.legs()).any(|(lt, ls)| self.half_edge_map[lt] != *ls) {
            return false;
        }
        // fibres are connected of genus h(v')
        for &v in t.vertices() {
            let fibre = self.preimage(v);
            if fibre.is_empty() {
                return false;
            }
            let fibre_edges: Vec<usize> = self
                .contracted
                .iter()
                .copied()
                .filter(|&e| fibre.contains(&s.endpoints(e).0))
                .collect();
            let mut dsu = Dsu::new(s.size());
            for &e in &fibre_edges {
                let (a, b) = s.endpoints(e);
                dsu.union(a, b);
            }
            let r0 = dsu.find(fibre[0]);
            if fibre.iter().any(|&u| dsu.find(u) != r0) {
                return false;
            }
            let weight: u64 = fibre.iter().map(|&u| s.weight(u) as u64).sum();
            let genus = weight + (fibre_edges.len() + 1 - fibre.len()) as u64;
            if genus != t.weight(v) as u64 {
                return false;
            }
        }
        s.genus() == t.genus()
    }
}

/// `outer ∘ inner`: contract by `inner`, then by `outer`.
pub fn compose(outer: &EdgeContraction, inner: &EdgeContraction) -> Result<EdgeContraction> {
    if inner.target != outer.source {
        return Err(Error::Incomposable("inner target differs from outer source".into()));
    }
    let mut contracted = inner.contracted.clone();
    for &e in &outer.contracted {
        contracted.insert(inner.edge_preimage(e));
    }
    Ok(EdgeContraction {
        source: inner.source.clone(),
        target: outer.target.clone(),
        contracted,
        vertex_map: inner.vertex_map.iter().map(|(&v, w)| (v, outer.vertex_map[w])).collect(),
        half_edge_map: outer.half_edge_map.iter().map(|(&h, m)| (h, inner.half_edge_map[m])).collect(),
    })
}

/// All stable one-edge expansions of `g`, one per isomorphism class, each with
/// the contraction back onto `g` itself.
pub fn uncontractions(g: &WeightedGraph) -> Vec<(WeightedGraph, EdgeContraction)> {
    let mut found: BTreeMap<crate::canon::Certificate, (WeightedGraph, EdgeContraction)> = BTreeMap::new();
    for expanded in expansions(g) {
        if !expanded.is_stable() {
            continue;
        }
        let cert = certificate(&expanded);
        if found.contains_key(&cert) {
            continue;
        }
        let new_edge = expanded.edge_count() - 1;
        let new_edge = (0..expanded.edge_count())
            .find(|&e| {
                let (h, _) = expanded.edges()[e];
                h >= g.size()
            })
            .unwrap_or(new_edge);
        let (image, c) = contract(&expanded, &BTreeSet::from([new_edge])).expect("edge exists");
        let iso = are_isomorphic(&image, g).expect("contracting the new edge recovers g");
        let c = c.then_iso(&iso).expect("composable");
        found.insert(cert, (expanded, c));
    }
    found.into_values().collect()
}

/// Raw one-edge expansions (not filtered for stability). New elements are
/// appended after the existing ones so the original labels survive.
fn expansions(g: &WeightedGraph) -> Vec<WeightedGraph> {
    let mut out = Vec::new();
    let base = g.to_data();
    let n = g.size();
    for &v in g.vertices() {
        let h = g.weight(v);
        if h > 0 {
            let mut d = base.clone();
            d.half_edges = n + 2;
            d.root.extend([v, v]);
            d.involution.extend([n + 1, n]);
            d.weights.insert(v, h - 1);
            out.push(WeightedGraph::new(d).expect("adding a loop keeps the axioms"));
        }
        let at = g.half_edges_at(v);
        for mask in 0u64..(1u64 << at.len()) {
            for h2 in 0..=h {
                let mut d = base.clone();
                // new vertex n, new half-edges n+1 (at v) and n+2 (at n)
                d.half_edges = n + 3;
                d.root.extend([n, v, n]);
                d.involution.extend([n, n + 2, n + 1]);
                for (k, &x) in at.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        d.root[x] = n;
                    }
                }
                d.weights.insert(v, h - h2);
                d.weights.insert(n, h2);
                out.push(WeightedGraph::new(d).expect("splitting a vertex keeps the axioms"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::are_isomorphic;
    use crate::graph::named::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn bridge_of_dumbbell() {
        let g = dumbbell();
        let bridge_id = (0..3).find(|&e| !g.is_loop(e)).unwrap();
        let (t, c) = contract(&g, &set(&[bridge_id])).unwrap();
        assert!(are_isomorphic(&t, &rose(2)).is_some());
        assert!(c.is_valid());
    }

    #[test]
    fn loop_of_rose_raises_weight() {
        let (t, c) = contract(&rose(2), &set(&[1])).unwrap();
        assert!(are_isomorphic(&t, &loop_on(1)).is_some());
        assert!(c.is_valid());
    }

    #[test]
    fn theta_to_point() {
        let (t, c) = contract(&theta(), &set(&[0, 1, 2])).unwrap();
        assert!(are_isomorphic(&t, &point(2)).is_some());
        assert!(c.is_valid());
    }

    #[test]
    fn unknown_edge() {
        assert_eq!(contract(&theta(), &set(&[3])).unwrap_err(), Error::UnknownEdge(3));
    }

    #[test]
    fn empty_contraction_is_identity() {
        let c = EdgeContraction::identity(&theta());
        assert!(c.is_identity());
        assert_eq!(c.target, theta());
    }

    #[test]
    fn composition_of_dumbbell_contractions() {
        let g = dumbbell();
        let bridge_id = (0..3).find(|&e| !g.is_loop(e)).unwrap();
        let (rose, inner) = contract(&g, &set(&[bridge_id])).unwrap();
        let (_, outer) = contract(&rose, &set(&[0])).unwrap();
        let c = compose(&outer, &inner).unwrap();
        assert!(c.is_valid());
        assert_eq!(c.contracted.len(), 2);
        assert!(c.contracted.contains(&bridge_id));
        assert!(are_isomorphic(&c.target, &loop_on(1)).is_some());

        let id = EdgeContraction::identity(&g);
        assert_eq!(compose(&inner, &id).unwrap(), inner);
        assert_eq!(compose(&EdgeContraction::identity(&rose), &inner).unwrap(), inner);
        assert!(matches!(compose(&inner, &outer), Err(Error::Incomposable(_))));
    }

    #[test]
    fn theta_two_step() {
        let (t1, inner) = contract(&theta(), &set(&[2])).unwrap();
        let (_, outer) = contract(&t1, &set(&[0])).unwrap();
        let c = compose(&outer, &inner).unwrap();
        assert_eq!(c.contracted.len(), 2);
        assert!(c.is_valid());
    }

    #[test]
    fn uncontractions_of_weight_two_point() {
        let ups = uncontractions(&point(2));
        let has = |h: &WeightedGraph| ups.iter().any(|(g, _)| are_isomorphic(g, h).is_some());
        assert!(has(&loop_on(1)));
        assert!(has(&bridge(1, 1)));
        assert_eq!(ups.len(), 2);
        for (up, c) in &ups {
            assert!(c.is_valid());
            assert_eq!(&c.source, up);
            assert_eq!(c.target, point(2));
        }
    }

    #[test]
    fn theta_has_no_stable_expansion() {
        assert!(uncontractions(&theta()).is_empty());
    }

    #[test]
    fn expansions_round_trip() {
        for g in [rose(2), loop_on(1), bridge(1, 1), point(3)] {
            for (up, c) in uncontractions(&g) {
                let (back, _) = contract(&up, &c.contracted).unwrap();
                assert!(are_isomorphic(&back, &g).is_some());
                assert_eq!(up.genus(), g.genus());
            }
        }
    }
}
