//! Orthant cones, face maps between them and diagrams of cones.
//!
//! A diagram stands for the generalized cone complex obtained by gluing its
//! cones along the face maps; nothing is materialized beyond the diagram.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_rational::BigRational;
use serde::Serialize;

use crate::canon::certificate;
use crate::contraction::EdgeContraction;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::marking::{Marking, TopClass};

/// `R_{>=0}^labels`; the labels are the edge ids of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OrthantCone {
    pub labels: Vec<usize>,
}

impl OrthantCone {
    pub fn of_graph(g: &WeightedGraph) -> OrthantCone {
        OrthantCone { labels: (0..g.edge_count()).collect() }
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }
}

/// An injective coordinate map: label `coordinate_map[k]` of the target is
/// the image of label `source.labels[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FaceMap {
    pub source: OrthantCone,
    pub target: OrthantCone,
    pub coordinate_map: Vec<usize>,
}

impl FaceMap {
    pub fn identity(cone: &OrthantCone) -> FaceMap {
        FaceMap { source: cone.clone(), target: cone.clone(), coordinate_map: cone.labels.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.coordinate_map == self.source.labels
    }

    pub fn is_valid(&self) -> bool {
        let distinct: BTreeSet<_> = self.coordinate_map.iter().collect();
        self.coordinate_map.len() == self.source.dimension()
            && distinct.len() == self.coordinate_map.len()
            && self.coordinate_map.iter().all(|l| self.target.labels.contains(l))
    }

    fn image_of(&self, label: usize) -> usize {
        let k = self.source.labels.iter().position(|&l| l == label).expect("label of the source cone");
        self.coordinate_map[k]
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &FaceMap) -> Result<FaceMap> {
        if self.target != outer.source {
            return Err(Error::Incomposable("face maps do not meet".into()));
        }
        Ok(FaceMap {
            source: self.source.clone(),
            target: outer.target.clone(),
            coordinate_map: self.coordinate_map.iter().map(|&l| outer.image_of(l)).collect(),
        })
    }

    /// A contraction `G -> G'` includes the cone of `G'` into that of `G`
    /// along the uncontracted edges.
    pub fn from_contraction(c: &EdgeContraction) -> FaceMap {
        FaceMap {
            source: OrthantCone::of_graph(&c.target),
            target: OrthantCone::of_graph(&c.source),
            coordinate_map: (0..c.target.edge_count()).map(|e| c.edge_preimage(e)).collect(),
        }
    }
}

/// What an object of a diagram stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Graph(WeightedGraph),
    Marked { graph: WeightedGraph, class: TopClass, representative: Box<Marking> },
}

impl Payload {
    pub fn graph(&self) -> &WeightedGraph {
        match self {
            Payload::Graph(g) => g,
            Payload::Marked { graph, .. } => graph,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramObject {
    pub id: usize,
    pub cone: OrthantCone,
    pub payload: Payload,
}

/// Objects with cones and, for each ordered pair `(a, b)`, the face maps
/// from the cone of `a` into the cone of `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeDiagram {
    pub marked: bool,
    pub objects: Vec<DiagramObject>,
    pub homs: BTreeMap<(usize, usize), Vec<FaceMap>>,
}

impl ConeDiagram {
    pub fn object(&self, id: usize) -> Result<&DiagramObject> {
        self.objects.get(id).ok_or(Error::UnknownObject(id))
    }

    pub fn hom(&self, a: usize, b: usize) -> &[FaceMap] {
        self.homs.get(&(a, b)).map_or(&[], Vec::as_slice)
    }

    pub fn dimension(&self, id: usize) -> usize {
        self.objects[id].cone.dimension()
    }

    /// Every hom-set between distinct objects has at most one element and
    /// every object has only its identity.
    pub fn is_cone_complex(&self) -> bool {
        self.objects.iter().all(|o| {
            let auts = self.hom(o.id, o.id);
            auts.len() == 1 && auts[0].is_identity()
        }) && self.homs.iter().all(|(&(a, b), maps)| a == b || maps.len() <= 1)
    }

    /// Replaces each hom-set by the distinct coordinate maps it induces.
    pub fn coarse_space(&self) -> ConeDiagram {
        let homs = self
            .homs
            .iter()
            .map(|(&k, maps)| {
                let distinct: BTreeSet<Vec<usize>> = maps.iter().map(|m| m.coordinate_map.clone()).collect();
                let (src, tgt) = (&self.objects[k.0].cone, &self.objects[k.1].cone);
                let maps = distinct
                    .into_iter()
                    .map(|coordinate_map| FaceMap { source: src.clone(), target: tgt.clone(), coordinate_map })
                    .collect();
                (k, maps)
            })
            .collect();
        ConeDiagram { marked: self.marked, objects: self.objects.clone(), homs }
    }

    /// Distinct maps in each hom-set have distinct coordinate maps.
    pub fn has_faithful_monodromy(&self) -> bool {
        self.homs.values().all(|maps| {
            let distinct: BTreeSet<&Vec<usize>> = maps.iter().map(|m| &m.coordinate_map).collect();
            distinct.len() == maps.len()
        })
    }

    /// Identities present, face maps valid and matching their objects, and
    /// composites of coordinate maps landing in the right hom-set.
    pub fn check_structure(&self) -> Result<()> {
        for o in &self.objects {
            if !self.hom(o.id, o.id).iter().any(FaceMap::is_identity) {
                return Err(Error::Malformed(format!("object {} lacks its identity", o.id)));
            }
        }
        let coords: BTreeMap<(usize, usize), BTreeSet<&Vec<usize>>> =
            self.homs.iter().map(|(&k, maps)| (k, maps.iter().map(|m| &m.coordinate_map).collect())).collect();
        for (&(a, b), maps) in &self.homs {
            for m in maps {
                if !m.is_valid() || m.source != self.objects[a].cone || m.target != self.objects[b].cone {
                    return Err(Error::Malformed(format!("bad face map in hom({a}, {b})")));
                }
            }
            for (&(b2, c), outer) in self.homs.range((b, 0)..(b + 1, 0)) {
                debug_assert_eq!(b2, b);
                for m in maps {
                    for n in outer {
                        let comp = m.then(n)?;
                        if !coords.get(&(a, c)).is_some_and(|s| s.contains(&comp.coordinate_map)) {
                            return Err(Error::Malformed(format!("composite {a} -> {b} -> {c} missing")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of objects in each dimension `0..=max`.
    pub fn f_vector(&self) -> Vec<usize> {
        let max = self.objects.iter().map(|o| o.cone.dimension()).max().unwrap_or(0);
        let mut f = vec![0; if self.objects.is_empty() { 0 } else { max + 1 }];
        for o in &self.objects {
            f[o.cone.dimension()] += 1;
        }
        f
    }

    /// Objects with a face map into `id`, the identity included.
    pub fn faces(&self, id: usize) -> Result<Vec<(usize, FaceMap)>> {
        self.object(id)?;
        Ok(self
            .homs
            .iter()
            .filter(|(&(_, b), _)| b == id)
            .flat_map(|(&(a, _), maps)| maps.iter().map(move |m| (a, m.clone())))
            .collect())
    }

    /// Other objects that `id` maps into, at most `radius` dimensions higher.
    pub fn cofaces(&self, id: usize, radius: usize) -> Result<Vec<(usize, FaceMap)>> {
        let dim = self.object(id)?.cone.dimension();
        Ok(self
            .homs
            .range((id, 0)..(id + 1, 0))
            .filter(|(&(_, b), _)| b != id && self.dimension(b) <= dim + radius)
            .flat_map(|(&(_, b), maps)| maps.iter().map(move |m| (b, m.clone())))
            .collect())
    }

    pub fn find_graph(&self, g: &WeightedGraph) -> Option<usize> {
        let cert = certificate(g);
        self.objects.iter().position(|o| certificate(o.payload.graph()) == cert)
    }

    /// DOT digraph of the object poset: one arc per nonempty hom-set between
    /// distinct objects, labelled by its size.
    pub fn to_dot(&self) -> String {
        let mut s = String::from(if self.marked { "digraph marked_cones {\n" } else { "digraph cones {\n" });
        for o in &self.objects {
            let _ = write!(s, "  n{} [label=\"{}\\ndim {}", o.id, certificate(o.payload.graph()).to_hex(), o.cone.dimension());
            if let Payload::Marked { class, .. } = &o.payload {
                let _ = write!(s, "\\n({})", class.render().join(", "));
            }
            s.push_str("\"];\n");
        }
        for (&(a, b), maps) in &self.homs {
            if a != b && !maps.is_empty() {
                let _ = writeln!(s, "  n{a} -> n{b} [label=\"{}\"];", maps.len());
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_document(&self) -> DiagramDocument {
        DiagramDocument {
            marked: self.marked,
            cone_complex: self.is_cone_complex(),
            f_vector: self.f_vector(),
            objects: self
                .objects
                .iter()
                .map(|o| DiagramObjectDoc {
                    id: o.id,
                    dimension: o.cone.dimension(),
                    certificate: certificate(o.payload.graph()).to_hex(),
                    class: match &o.payload {
                        Payload::Marked { class, .. } => Some(class.render()),
                        Payload::Graph(_) => None,
                    },
                })
                .collect(),
            homs: self
                .homs
                .iter()
                .map(|(&(source, target), maps)| HomDoc {
                    source,
                    target,
                    maps: maps.iter().map(|m| m.coordinate_map.clone()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagramDocument {
    pub marked: bool,
    pub cone_complex: bool,
    pub f_vector: Vec<usize>,
    pub objects: Vec<DiagramObjectDoc>,
    pub homs: Vec<HomDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagramObjectDoc {
    pub id: usize,
    pub dimension: usize,
    pub certificate: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomDoc {
    pub source: usize,
    pub target: usize,
    pub maps: Vec<Vec<usize>>,
}

/// A coordinate of an extended cone: a nonnegative rational or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedValue {
    Finite(BigRational),
    Infinity,
}

impl ExtendedValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedValue::Infinity)
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(q) => write!(f, "{q}"),
            ExtendedValue::Infinity => f.write_str("inf"),
        }
    }
}

/// A point of the canonical extension of an object's cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedPoint {
    pub object: usize,
    /// Values indexed like the labels of the cone.
    pub coordinates: Vec<ExtendedValue>,
}

impl ExtendedPoint {
    /// Labels with coordinate `∞`: the face at infinity containing the point.
    pub fn face_at_infinity(&self, cone: &OrthantCone) -> Vec<usize> {
        cone.labels.iter().zip(&self.coordinates).filter(|(_, v)| v.is_infinite()).map(|(&l, _)| l).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{compose, contract};
    use crate::graph::named::*;

    fn single(g: WeightedGraph) -> ConeDiagram {
        let cone = OrthantCone::of_graph(&g);
        ConeDiagram {
            marked: false,
            objects: vec![DiagramObject { id: 0, cone: cone.clone(), payload: Payload::Graph(g) }],
            homs: BTreeMap::from([((0, 0), vec![FaceMap::identity(&cone)])]),
        }
    }

    #[test]
    fn contraction_face_maps() {
        let t = theta();
        let (_, c) = contract(&t, &BTreeSet::from([2])).unwrap();
        let f = FaceMap::from_contraction(&c);
        assert_eq!(f.coordinate_map, vec![0, 1]);
        assert!(f.is_valid());
        assert!(FaceMap::from_contraction(&EdgeContraction::identity(&t)).is_identity());
        let (g1, c1) = contract(&t, &BTreeSet::from([0])).unwrap();
        let (_, c2) = contract(&g1, &BTreeSet::from([0])).unwrap();
        let whole = compose(&c2, &c1).unwrap();
        let via = FaceMap::from_contraction(&c2).then(&FaceMap::from_contraction(&c1)).unwrap();
        assert_eq!(via, FaceMap::from_contraction(&whole));
    }

    #[test]
    fn single_object_is_a_cone_complex() {
        let d = single(theta());
        assert!(d.is_cone_complex());
        assert_eq!(d.coarse_space(), d);
        assert!(d.check_structure().is_ok());
        assert_eq!(d.f_vector(), vec![0, 0, 0, 1]);
        assert_eq!(d.faces(0).unwrap().len(), 1);
        assert!(d.cofaces(0, 3).unwrap().is_empty());
        assert_eq!(d.faces(1).unwrap_err(), Error::UnknownObject(1));
    }

    #[test]
    fn duplicate_maps_collapse() {
        let mut d = single(bridge(1, 1));
        let id = d.homs[&(0, 0)][0].clone();
        d.homs.get_mut(&(0, 0)).unwrap().push(id);
        assert!(!d.is_cone_complex());
        assert!(!d.has_faithful_monodromy());
        let c = d.coarse_space();
        assert!(c.is_cone_complex());
        assert_eq!(c.coarse_space(), c);
    }

    #[test]
    fn infinite_face() {
        let cone = OrthantCone { labels: vec![0, 1] };
        let p = ExtendedPoint {
            object: 0,
            coordinates: vec![ExtendedValue::Finite(BigRational::from_integer(2.into())), ExtendedValue::Infinity],
        };
        assert_eq!(p.face_at_infinity(&cone), vec![1]);
        assert_eq!(p.coordinates[1].to_string(), "inf");
    }
}
