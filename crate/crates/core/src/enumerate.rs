//! Isomorphism classes of stable graphs of fixed genus and the poset of
//! contractions between them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::canon::{automorphisms, canonical_form, to_canonical, Certificate};
use crate::contraction::{contract, uncontractions, EdgeContraction};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{GraphBuilder, WeightedGraph};

/// One representative per class of connected stable genus-`genus` graphs
/// without legs, sorted by certificate.
pub fn enumerate_stable_graphs(genus: usize) -> Result<Vec<WeightedGraph>> {
    enumerate_stable_graphs_with(genus, Exec::default())
}

pub fn enumerate_stable_graphs_with(genus: usize, exec: Exec) -> Result<Vec<WeightedGraph>> {
    if genus < 2 {
        return Err(Error::UnsupportedGenus(genus));
    }
    let branches = weight_branches(genus);
    let found = exec.map(&branches, |weights| {
        let mut local = BTreeMap::new();
        for g in graphs_with_weights(genus, weights) {
            let cf = canonical_form(&g);
            local.entry(cf.certificate).or_insert(cf.graph);
        }
        local
    });
    let mut all: BTreeMap<Certificate, WeightedGraph> = BTreeMap::new();
    for part in found {
        all.extend(part);
    }
    Ok(all.into_values().collect())
}

/// Nonincreasing weight vectors on `1..=2g-2` vertices compatible with genus `g`.
fn weight_branches(genus: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, cap: u32, n: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for w in (0..=cap.min(left)).rev() {
            cur.push(w);
            rec(left - w, w, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for n in 1..=(2 * genus - 2) {
        let mut all = Vec::new();
        rec(genus as u32, genus as u32, n, &mut Vec::new(), &mut all);
        // |E| = g - W + n - 1 may not exceed 3g - 3
        out.extend(all.into_iter().filter(|w| {
            let total: usize = w.iter().map(|&x| x as usize).sum();
            genus - total + n - 1 <= 3 * genus - 3
        }));
    }
    out
}

/// All connected stable multigraphs with these vertex weights and genus.
fn graphs_with_weights(genus: usize, weights: &[u32]) -> Vec<WeightedGraph> {
    let n = weights.len();
    let total: usize = weights.iter().map(|&x| x as usize).sum();
    let m = genus - total + n - 1;
    let need: Vec<u32> = weights.iter().map(|&h| 3u32.saturating_sub(2 * h)).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut valence = vec![0u32; n];
    let mut chosen = vec![0u32; pairs.len()];
    edge_multisets(&pairs, 0, m as u32, &need, &mut valence, &mut chosen, &mut |mult| {
        let mut b = GraphBuilder::new();
        for &h in weights {
            b.vertex(h);
        }
        for (k, &(x, y)) in pairs.iter().enumerate() {
            for _ in 0..mult[k] {
                b.edge(x, y);
            }
        }
        if let Ok(g) = b.build() {
            if g.is_stable() {
                out.push(g);
            }
        }
    });
    out
}

fn edge_multisets(
    pairs: &[(usize, usize)],
    k: usize,
    left: u32,
    need: &[u32],
    valence: &mut Vec<u32>,
    chosen: &mut Vec<u32>,
    emit: &mut dyn FnMut(&[u32]),
) {
    let deficit: u32 = need.iter().zip(valence.iter()).map(|(&n, &v)| n.saturating_sub(v)).sum();
    if deficit > 2 * left {
        return;
    }
    if k == pairs.len() {
        if left == 0 {
            emit(chosen);
        }
        return;
    }
    let (a, b) = pairs[k];
    // once the last pair touching `a` is decided, its valence is final
    let closes_row = k + 1 == pairs.len() || pairs[k + 1].0 != a;
    for mult in 0..=left {
        let add = if a == b { 2 * mult } else { mult };
        valence[a] += add;
        if a != b {
            valence[b] += add;
        }
        chosen[k] = mult;
        if !(closes_row && valence[a] < need[a]) {
            edge_multisets(pairs, k + 1, left - mult, need, valence, chosen, emit);
        }
        valence[a] -= add;
        if a != b {
            valence[b] -= add;
        }
    }
    chosen[k] = 0;
}

/// Second enumeration path: closure of the weight-`genus` point under
/// stable one-edge expansions.
pub fn enumerate_by_splitting(genus: usize) -> Result<Vec<WeightedGraph>> {
    if genus < 2 {
        return Err(Error::UnsupportedGenus(genus));
    }
    let start = canonical_form(&crate::graph::named::point(genus as u32));
    let mut seen: BTreeMap<Certificate, WeightedGraph> = BTreeMap::new();
    seen.insert(start.certificate, start.graph.clone());
    let mut frontier = vec![start.graph];
    while let Some(g) = frontier.pop() {
        for (up, _) in uncontractions(&g) {
            let cf = canonical_form(&up);
            if !seen.contains_key(&cf.certificate) {
                seen.insert(cf.certificate, cf.graph.clone());
                frontier.push(cf.graph);
            }
        }
    }
    Ok(seen.into_values().collect())
}

/// A contraction class between two poset objects. Contractions differing only
/// by an automorphism of the target are identified, so a class is determined
/// by its contracted edge set.
#[derive(Clone, Debug)]
pub struct PosetMorphism {
    pub source: usize,
    pub target: usize,
    pub contraction: EdgeContraction,
}

#[derive(Clone, Debug)]
pub struct ContractionPoset {
    pub genus: usize,
    pub objects: Vec<WeightedGraph>,
    pub certificates: Vec<Certificate>,
    pub morphisms: Vec<PosetMorphism>,
}

pub fn contraction_poset(genus: usize) -> Result<ContractionPoset> {
    contraction_poset_with(genus, Exec::default())
}

pub fn contraction_poset_with(genus: usize, exec: Exec) -> Result<ContractionPoset> {
    if !(2..=4).contains(&genus) {
        return Err(Error::UnsupportedGenus(genus));
    }
    let objects = enumerate_stable_graphs_with(genus, exec)?;
    let certificates: Vec<Certificate> = objects.iter().map(|g| canonical_form(g).certificate).collect();
    let index: BTreeMap<&Certificate, usize> = certificates.iter().enumerate().map(|(k, c)| (c, k)).collect();
    let ids: Vec<usize> = (0..objects.len()).collect();
    let per_object = exec.map(&ids, |&s| {
        let g = &objects[s];
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << g.edge_count()) {
            let edges: BTreeSet<usize> = (0..g.edge_count()).filter(|&e| mask >> e & 1 == 1).collect();
            let (image, c) = contract(g, &edges).expect("edge ids in range");
            let iso = to_canonical(&image);
            let cert = canonical_form(&image).certificate;
            let t = index[&cert];
            let contraction = if edges.is_empty() { c } else { c.then_iso(&iso).expect("composable") };
            debug_assert_eq!(contraction.target, objects[t]);
            out.push(PosetMorphism { source: s, target: t, contraction });
        }
        out
    });
    Ok(ContractionPoset { genus, objects, certificates, morphisms: per_object.into_iter().flatten().collect() })
}

impl ContractionPoset {
    pub fn dimension(&self, object: usize) -> usize {
        self.objects[object].edge_count()
    }

    pub fn morphisms_between(&self, source: usize, target: usize) -> impl Iterator<Item = &PosetMorphism> {
        self.morphisms.iter().filter(move |m| m.source == source && m.target == target)
    }

    pub fn find(&self, g: &WeightedGraph) -> Option<usize> {
        let cert = canonical_form(g).certificate;
        self.certificates.iter().position(|c| *c == cert)
    }

    /// Classes of contractions `source -> target` up to automorphisms of the
    /// source as well: orbits of `Aut(source)` on the contracted edge sets.
    pub fn source_orbit_count(&self, source: usize, target: usize) -> usize {
        let g = &self.objects[source];
        let auts = automorphisms(g);
        let mut orbits: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for m in self.morphisms_between(source, target) {
            let rep = auts
                .iter()
                .map(|a| m.contraction.contracted.iter().map(|&e| a.edge_image(e)).collect::<BTreeSet<_>>())
                .min()
                .expect("identity present");
            orbits.insert(rep);
        }
        orbits.len()
    }

    /// DOT digraph: one node per object, one arc per non-identity morphism class.
    pub fn to_dot(&self) -> String {
        let mut s = format!("digraph contractions_g{} {{\n", self.genus);
        for (k, c) in self.certificates.iter().enumerate() {
            let _ = writeln!(s, "  n{k} [label=\"{}\\ndim {}\"];", c.to_hex(), self.dimension(k));
        }
        for m in &self.morphisms {
            if m.contraction.contracted.is_empty() {
                continue;
            }
            let edges: Vec<String> = m.contraction.contracted.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"];", m.source, m.target, edges.join(","));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_document(&self) -> PosetDocument {
        PosetDocument {
            genus: self.genus,
            objects: self
                .objects
                .iter()
                .zip(&self.certificates)
                .enumerate()
                .map(|(id, (g, c))| PosetObjectDoc {
                    id,
                    certificate: c.to_hex(),
                    dimension: g.edge_count(),
                    automorphisms: automorphisms(g).len(),
                })
                .collect(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| PosetMorphismDoc {
                    source: m.source,
                    target: m.target,
                    contracted: m.contraction.contracted.iter().copied().collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PosetDocument {
    pub genus: usize,
    pub objects: Vec<PosetObjectDoc>,
    pub morphisms: Vec<PosetMorphismDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PosetObjectDoc {
    pub id: usize,
    pub certificate: String,
    pub dimension: usize,
    pub automorphisms: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PosetMorphismDoc {
    pub source: usize,
    pub target: usize,
    pub contracted: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::are_isomorphic;
    use crate::graph::named::*;

    #[test]
    fn genus_two_count() {
        assert_eq!(enumerate_stable_graphs(2).unwrap().len(), 7);
        assert_eq!(enumerate_by_splitting(2).unwrap().len(), 7);
    }

    #[test]
    fn genus_one_is_rejected() {
        assert_eq!(enumerate_stable_graphs(1).unwrap_err(), Error::UnsupportedGenus(1));
        assert!(contraction_poset(5).is_err());
    }

    #[test]
    fn exactly_one_edgeless_class() {
        let gs = enumerate_stable_graphs(2).unwrap();
        let edgeless: Vec<_> = gs.iter().filter(|g| g.edge_count() == 0).collect();
        assert_eq!(edgeless.len(), 1);
        assert!(are_isomorphic(edgeless[0], &point(2)).is_some());
    }

    #[test]
    fn sequential_matches_parallel() {
        assert_eq!(
            enumerate_stable_graphs_with(3, Exec::Sequential).unwrap(),
            enumerate_stable_graphs_with(3, Exec::Parallel).unwrap()
        );
    }

    #[test]
    fn theta_one_edge_contractions() {
        let p = contraction_poset(2).unwrap();
        let theta_id = p.find(&theta()).unwrap();
        let rose_id = p.find(&rose(2)).unwrap();
        assert_eq!(p.morphisms_between(theta_id, rose_id).count(), 3);
        assert_eq!(p.source_orbit_count(theta_id, rose_id), 1);
    }

    #[test]
    fn dot_lists_every_object() {
        let p = contraction_poset(2).unwrap();
        let dot = p.to_dot();
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("[label=\"").count() - dot.matches("->").count(), 7);
    }
}
