//! Fundamental groups of the graphs of groups attached to weighted graphs,
//! Teichmüller markings and their topological classes.
//!
//! The graph of groups puts a free group of rank `h(v)` at each vertex and
//! trivial groups on edges. Its fundamental group at a base vertex is free of
//! rank `genus`, with a basis read off from a spanning tree: one loop per
//! non-tree edge followed by the vertex generators.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::canon::Isomorphism;
use crate::contraction::EdgeContraction;
use crate::error::{Error, Result};
use crate::free_group::{conjugacy_normal_form, tuples_conjugate, GroupMap, Word};
use crate::graph::WeightedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisElement {
    /// Tree path to the positive end of the edge, the edge, tree path back.
    LoopGen(usize),
    /// Tree path to the vertex, its `j`-th generator (from 1), path back.
    VertexGen(usize, usize),
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::LoopGen(e) => write!(f, "loop:{e}"),
            BasisElement::VertexGen(v, j) => write!(f, "vertex:{v}:{j}"),
        }
    }
}

/// One step of a walk in the graph of groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Cross the edge of half-edge `h`, from `r(h)` to `r(i(h))`.
    Traverse(usize),
    /// A generator of the vertex group at the current vertex.
    VertexLetter { vertex: usize, index: usize, inverse: bool },
}

fn invert_walk(walk: &[Step], g: &WeightedGraph) -> Vec<Step> {
    walk.iter()
        .rev()
        .map(|s| match *s {
            Step::Traverse(h) => Step::Traverse(g.involution(h)),
            Step::VertexLetter { vertex, index, inverse } => Step::VertexLetter { vertex, index, inverse: !inverse },
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Presentation {
    graph: WeightedGraph,
    base: usize,
    tree: BTreeSet<usize>,
    basis: Vec<BasisElement>,
    /// Half-edges of the tree path from the base to each vertex.
    path_table: BTreeMap<usize, Vec<usize>>,
    index: BTreeMap<BasisElement, usize>,
}

impl Pi1Presentation {
    /// Breadth-first spanning tree from `base`, edges taken in id order.
    pub fn new(graph: &WeightedGraph, base: usize) -> Result<Pi1Presentation> {
        if !graph.is_vertex(base) {
            return Err(Error::UnknownVertex(base));
        }
        if !graph.legs().is_empty() {
            return Err(Error::LegsUnsupported);
        }
        let mut path_table = BTreeMap::from([(base, Vec::new())]);
        let mut tree = BTreeSet::new();
        let mut queue = VecDeque::from([base]);
        while let Some(u) = queue.pop_front() {
            let mut out: Vec<(usize, usize)> = graph
                .half_edges_at(u)
                .into_iter()
                .filter_map(|h| graph.edge_of(h).map(|e| (e, h)))
                .collect();
            out.sort_unstable();
            for (e, h) in out {
                let w = graph.root(graph.involution(h));
                if !path_table.contains_key(&w) {
                    let mut p = path_table[&u].clone();
                    p.push(h);
                    path_table.insert(w, p);
                    tree.insert(e);
                    queue.push_back(w);
                }
            }
        }
        let mut basis: Vec<BasisElement> =
            (0..graph.edge_count()).filter(|e| !tree.contains(e)).map(BasisElement::LoopGen).collect();
        for &v in graph.vertices() {
            basis.extend((1..=graph.weight(v) as usize).map(|j| BasisElement::VertexGen(v, j)));
        }
        let index = basis.iter().enumerate().map(|(k, b)| (*b, k)).collect();
        Ok(Pi1Presentation { graph: graph.clone(), base, tree, basis, path_table, index })
    }

    /// The presentation every class is measured against: base at the least vertex.
    pub fn reference(graph: &WeightedGraph) -> Result<Pi1Presentation> {
        Pi1Presentation::new(graph, graph.vertices()[0])
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn tree(&self) -> &BTreeSet<usize> {
        &self.tree
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn loop_rank(&self) -> usize {
        self.basis.iter().filter(|b| matches!(b, BasisElement::LoopGen(_))).count()
    }

    pub fn tree_path(&self, v: usize) -> Result<&[usize]> {
        self.path_table.get(&v).map(Vec::as_slice).ok_or(Error::UnknownVertex(v))
    }

    /// The closed walk at the base representing `basis[k]`.
    pub fn basis_walk(&self, k: usize) -> Vec<Step> {
        let g = &self.graph;
        let to = |v: usize| self.path_table[&v].iter().map(|&h| Step::Traverse(h)).collect::<Vec<_>>();
        let back = |v: usize| invert_walk(&to(v), g);
        match self.basis[k] {
            BasisElement::LoopGen(e) => {
                let (hp, hm) = g.edges()[e];
                let mut w = to(g.root(hp));
                w.push(Step::Traverse(hp));
                w.extend(back(g.root(hm)));
                w
            }
            BasisElement::VertexGen(v, j) => {
                let mut w = to(v);
                w.push(Step::VertexLetter { vertex: v, index: j, inverse: false });
                w.extend(back(v));
                w
            }
        }
    }

    /// The basis word of a closed walk at the base. Tree edges are trivial,
    /// the tree paths in the basis loops cancel in between.
    pub fn word_of_walk(&self, walk: &[Step]) -> Result<Word> {
        let g = &self.graph;
        let mut at = self.base;
        let mut letters = Vec::new();
        for (k, step) in walk.iter().enumerate() {
            match *step {
                Step::Traverse(h) => {
                    if h >= g.size() || g.root(h) != at {
                        return Err(Error::BadPath(format!("step {k} does not leave vertex {at}")));
                    }
                    let e = g.edge_of(h).ok_or_else(|| Error::BadPath(format!("step {k} crosses a leg")))?;
                    if !self.tree.contains(&e) {
                        let pos = self.index[&BasisElement::LoopGen(e)] as i32 + 1;
                        letters.push(if g.edges()[e].0 == h { pos } else { -pos });
                    }
                    at = g.root(g.involution(h));
                }
                Step::VertexLetter { vertex, index, inverse } => {
                    let pos = self
                        .index
                        .get(&BasisElement::VertexGen(vertex, index))
                        .filter(|_| vertex == at)
                        .ok_or_else(|| Error::BadPath(format!("step {k}: no generator {index} at vertex {at}")))?;
                    let pos = *pos as i32 + 1;
                    letters.push(if inverse { -pos } else { pos });
                }
            }
        }
        if at != self.base {
            return Err(Error::BadPath(format!("walk ends at {at}, not at the base {}", self.base)));
        }
        Word::reduce(self.rank(), &letters)
    }
}

/// The topological class of a marking: the images of the standard generators
/// of `F_g` in the free group of the underlying graph, in conjugacy normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TopClass {
    pub rank_b: usize,
    pub words: Vec<Word>,
}

impl TopClass {
    pub fn cmp_key(&self) -> Vec<(usize, Vec<u32>)> {
        self.words
            .iter()
            .map(|w| (w.len(), w.letters().iter().map(|&l| 2 * l.unsigned_abs() - u32::from(l > 0)).collect()))
            .collect()
    }

    pub fn render(&self) -> Vec<String> {
        self.words.iter().map(|w| w.to_string()).collect()
    }
}

/// A marking `φ: π₁ -> F_g`; `images[k] = φ(basis[k])`. The inverse is cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marking {
    presentation: Pi1Presentation,
    images: GroupMap,
    inverse: GroupMap,
}

impl Marking {
    pub fn new(presentation: Pi1Presentation, images: GroupMap) -> Result<Marking> {
        let g = presentation.rank();
        if images.domain_rank() != g || images.codomain_rank() != g {
            return Err(Error::RankMismatch { expected: g, found: images.domain_rank() });
        }
        let inverse = images.invert()?;
        Ok(Marking { presentation, images, inverse })
    }

    pub fn canonical(presentation: &Pi1Presentation) -> Marking {
        let id = GroupMap::identity(presentation.rank());
        Marking { presentation: presentation.clone(), images: id.clone(), inverse: id }
    }

    pub fn presentation(&self) -> &Pi1Presentation {
        &self.presentation
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.presentation.graph
    }

    pub fn images(&self) -> &GroupMap {
        &self.images
    }

    pub fn inverse_images(&self) -> &GroupMap {
        &self.inverse
    }

    /// Post-composition `a ∘ φ`.
    pub fn act(&self, a: &GroupMap) -> Result<Marking> {
        let a_inv = a.invert()?;
        Ok(Marking {
            presentation: self.presentation.clone(),
            images: a.compose(&self.images)?,
            inverse: self.inverse.compose(&a_inv)?,
        })
    }

    /// The class measured in the reference presentation of the graph.
    pub fn top_class(&self) -> TopClass {
        let reference = Pi1Presentation::reference(self.graph()).expect("marked graphs have no legs");
        let m = if self.presentation.base == reference.base {
            self.clone()
        } else {
            let path = reference.tree_path(self.presentation.base).expect("vertex");
            let back: Vec<usize> = path.iter().rev().map(|&h| self.graph().involution(h)).collect();
            self.change_basepoint(&back).expect("tree path is a walk")
        };
        m.top_class_here()
    }

    fn top_class_here(&self) -> TopClass {
        let p = &self.presentation;
        let rank_b = p.loop_rank();
        // LoopGens come first in the basis, so they keep their positions
        let q = |w: &Word| {
            let kept: Vec<i32> = w.letters().iter().copied().filter(|l| (l.unsigned_abs() as usize) <= rank_b).collect();
            Word::reduce(rank_b, &kept).expect("letters below rank_b")
        };
        let words: Vec<Word> = self.inverse.images().iter().map(q).collect();
        TopClass { rank_b, words: conjugacy_normal_form(&words).words }
    }

    /// Topological equivalence: the two classes are simultaneously conjugate.
    pub fn top_equivalent(&self, other: &Marking) -> Result<bool> {
        if self.graph() != other.graph() {
            return Err(Error::PresentationMismatch);
        }
        let (a, b) = (self.top_class(), other.top_class());
        Ok(tuples_conjugate(&a.words, &b.words)?.is_some())
    }

    /// Literal equality of the induced surjections at the reference base,
    /// without conjugation.
    pub fn strictly_equivalent(&self, other: &Marking) -> Result<bool> {
        if self.graph() != other.graph() {
            return Err(Error::PresentationMismatch);
        }
        let raw = |m: &Marking| -> Vec<Word> {
            let p = &m.presentation;
            let rank_b = p.loop_rank();
            m.inverse
                .images()
                .iter()
                .map(|w| {
                    let kept: Vec<i32> = w.letters().iter().copied().filter(|l| (l.unsigned_abs() as usize) <= rank_b).collect();
                    Word::reduce(rank_b, &kept).expect("in range")
                })
                .collect()
        };
        let rebased = |m: &Marking| -> Result<Marking> {
            let reference = Pi1Presentation::reference(m.graph())?;
            if m.presentation.base == reference.base {
                return Ok(m.clone());
            }
            let path = reference.tree_path(m.presentation.base)?;
            let back: Vec<usize> = path.iter().rev().map(|&h| m.graph().involution(h)).collect();
            m.change_basepoint(&back)
        };
        Ok(raw(&rebased(self)?) == raw(&rebased(other)?))
    }

    /// `α = m2 ∘ m1^-1`, so that `m1.act(α) == m2`.
    pub fn difference(&self, other: &Marking) -> Result<GroupMap> {
        if self.presentation != other.presentation {
            return Err(Error::PresentationMismatch);
        }
        other.images.compose(&self.inverse)
    }

    /// Rebuilds the marking on `target`, given walk translations in both
    /// directions between closed walks at the two bases.
    fn transfer(
        &self,
        target: Pi1Presentation,
        forward: impl Fn(&[Step]) -> Vec<Step>,
        backward: impl Fn(&[Step]) -> Vec<Step>,
    ) -> Result<Marking> {
        let src = &self.presentation;
        let g = src.rank();
        if target.rank() != g {
            return Err(Error::RankMismatch { expected: g, found: target.rank() });
        }
        let t = (0..g).map(|k| target.word_of_walk(&forward(&src.basis_walk(k)))).collect::<Result<Vec<_>>>()?;
        let t_inv = (0..g).map(|k| src.word_of_walk(&backward(&target.basis_walk(k)))).collect::<Result<Vec<_>>>()?;
        let t = GroupMap::from_images(g, t)?;
        let t_inv = GroupMap::from_images(g, t_inv)?;
        debug_assert!(t.compose(&t_inv)?.is_identity());
        Ok(Marking { presentation: target, images: self.images.compose(&t_inv)?, inverse: t.compose(&self.inverse)? })
    }

    /// Moves the base along `path` (half-edges leaving the current base);
    /// loops `a` become `γ^-1 a γ`.
    pub fn change_basepoint(&self, path: &[usize]) -> Result<Marking> {
        let g = self.graph();
        let mut at = self.presentation.base;
        for (k, &h) in path.iter().enumerate() {
            if h >= g.size() || g.root(h) != at || g.edge_of(h).is_none() {
                return Err(Error::BadPath(format!("path step {k} does not leave vertex {at}")));
            }
            at = g.root(g.involution(h));
        }
        if path.is_empty() {
            return Ok(self.clone());
        }
        let target = Pi1Presentation::new(g, at)?;
        let gamma: Vec<Step> = path.iter().map(|&h| Step::Traverse(h)).collect();
        let gamma_inv = invert_walk(&gamma, g);
        let conj = |pre: &[Step], walk: &[Step], post: &[Step]| -> Vec<Step> {
            pre.iter().chain(walk).chain(post).copied().collect()
        };
        self.transfer(target, |w| conj(&gamma_inv, w, &gamma), |w| conj(&gamma, w, &gamma_inv))
    }

    /// The marking induced on `iso.target`, based at the image of the base.
    pub fn transport(&self, iso: &Isomorphism) -> Result<Marking> {
        if iso.source != *self.graph() {
            return Err(Error::SourceMismatch);
        }
        let target = Pi1Presentation::new(&iso.target, iso.apply(self.presentation.base))?;
        let inv = iso.inverse();
        let map = |f: &Isomorphism, w: &[Step]| -> Vec<Step> {
            w.iter()
                .map(|s| match *s {
                    Step::Traverse(h) => Step::Traverse(f.apply(h)),
                    Step::VertexLetter { vertex, index, inverse } => {
                        Step::VertexLetter { vertex: f.apply(vertex), index, inverse }
                    }
                })
                .collect()
        };
        self.transfer(target, |w| map(iso, w), |w| map(&inv, w))
    }

    /// Pushes the marking along a contraction, identifying the fundamental
    /// group of each collapsed subgraph with the absorbing vertex group.
    pub fn pushforward(&self, c: &EdgeContraction) -> Result<Marking> {
        if c.source != *self.graph() {
            return Err(Error::SourceMismatch);
        }
        let lift = ContractionLift::new(c);
        let mut m = self.clone();
        let root = lift.component_root(self.presentation.base);
        if root != self.presentation.base {
            let to_base = &lift.forest_path[&self.presentation.base];
            let back: Vec<usize> = to_base.iter().rev().map(|&h| c.source.involution(h)).collect();
            m = m.change_basepoint(&back)?;
        }
        let target = Pi1Presentation::new(&c.target, c.vertex_map[&root])?;
        m.transfer(target, |w| lift.push(w), |w| lift.pull(w))
    }

    /// Lifts a marking on `c.target` to `c.source`, based at the root of the
    /// component over the current base.
    pub fn pullback(&self, c: &EdgeContraction) -> Result<Marking> {
        if c.target != *self.graph() {
            return Err(Error::SourceMismatch);
        }
        let lift = ContractionLift::new(c);
        let root = lift.component_root(c.preimage(self.presentation.base)[0]);
        let source = Pi1Presentation::new(&c.source, root)?;
        self.transfer(source, |w| lift.pull(w), |w| lift.push(w))
    }
}

/// Walk translation across a contraction. Each collapsed component gets a
/// breadth-first forest from its least vertex; vertex generators of the
/// absorbing vertex are the inherited generators ordered by (vertex, index),
/// then the contracted non-forest edges by id.
struct ContractionLift<'a> {
    c: &'a EdgeContraction,
    root_of: BTreeMap<usize, usize>,
    forest: BTreeSet<usize>,
    forest_path: BTreeMap<usize, Vec<usize>>,
    index_of: BTreeMap<BasisElement, usize>,
    element_of: BTreeMap<(usize, usize), BasisElement>,
    source_half_edge: BTreeMap<usize, usize>,
}

impl<'a> ContractionLift<'a> {
    fn new(c: &'a EdgeContraction) -> Self {
        let g = &c.source;
        let mut root_of = BTreeMap::new();
        let mut forest = BTreeSet::new();
        let mut forest_path = BTreeMap::new();
        for &start in g.vertices() {
            if root_of.contains_key(&start) {
                continue;
            }
            root_of.insert(start, start);
            forest_path.insert(start, Vec::new());
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let mut out: Vec<(usize, usize)> = g
                    .half_edges_at(u)
                    .into_iter()
                    .filter_map(|h| g.edge_of(h).map(|e| (e, h)))
                    .filter(|(e, _)| c.contracted.contains(e))
                    .collect();
                out.sort_unstable();
                for (e, h) in out {
                    let w = g.root(g.involution(h));
                    if !root_of.contains_key(&w) {
                        root_of.insert(w, start);
                        let mut p: Vec<usize> = forest_path[&u].clone();
                        p.push(h);
                        forest_path.insert(w, p);
                        forest.insert(e);
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut index_of = BTreeMap::new();
        let mut element_of = BTreeMap::new();
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for &u in g.vertices() {
            let v = c.vertex_map[&u];
            for j in 1..=g.weight(u) as usize {
                let k = next.entry(v).or_insert(0);
                *k += 1;
                index_of.insert(BasisElement::VertexGen(u, j), *k);
                element_of.insert((v, *k), BasisElement::VertexGen(u, j));
            }
        }
        for &e in &c.contracted {
            if !forest.contains(&e) {
                let v = c.vertex_map[&g.root(g.edges()[e].0)];
                let k = next.entry(v).or_insert(0);
                *k += 1;
                index_of.insert(BasisElement::LoopGen(e), *k);
                element_of.insert((v, *k), BasisElement::LoopGen(e));
            }
        }
        let source_half_edge = c.half_edge_map.iter().map(|(&t, &s)| (s, t)).collect();
        ContractionLift { c, root_of, forest, forest_path, index_of, element_of, source_half_edge }
    }

    fn component_root(&self, u: usize) -> usize {
        self.root_of[&u]
    }

    /// Source walk to target walk: forest edges vanish, other contracted
    /// edges and inherited generators become vertex letters.
    fn push(&self, walk: &[Step]) -> Vec<Step> {
        let g = &self.c.source;
        let mut out = Vec::new();
        for s in walk {
            match *s {
                Step::Traverse(h) => {
                    let e = g.edge_of(h).expect("walks cross edges");
                    if let Some(&t) = self.source_half_edge.get(&h) {
                        out.push(Step::Traverse(t));
                    } else if !self.forest.contains(&e) {
                        let v = self.c.vertex_map[&g.root(h)];
                        let index = self.index_of[&BasisElement::LoopGen(e)];
                        out.push(Step::VertexLetter { vertex: v, index, inverse: g.edges()[e].0 != h });
                    }
                }
                Step::VertexLetter { vertex, index, inverse } => {
                    let v = self.c.vertex_map[&vertex];
                    let index = self.index_of[&BasisElement::VertexGen(vertex, index)];
                    out.push(Step::VertexLetter { vertex: v, index, inverse });
                }
            }
        }
        out
    }

    /// Target walk to source walk between component roots.
    fn pull(&self, walk: &[Step]) -> Vec<Step> {
        let g = &self.c.source;
        let to = |u: usize| self.forest_path[&u].iter().map(|&h| Step::Traverse(h)).collect::<Vec<_>>();
        let back = |u: usize| invert_walk(&to(u), g);
        let mut out = Vec::new();
        for s in walk {
            match *s {
                Step::Traverse(t) => {
                    let h = self.c.half_edge_map[&t];
                    out.extend(to(g.root(h)));
                    out.push(Step::Traverse(h));
                    out.extend(back(g.root(g.involution(h))));
                }
                Step::VertexLetter { vertex, index, inverse } => {
                    let mut piece = match self.element_of[&(vertex, index)] {
                        BasisElement::VertexGen(u, j) => {
                            let mut p = to(u);
                            p.push(Step::VertexLetter { vertex: u, index: j, inverse: false });
                            p.extend(back(u));
                            p
                        }
                        BasisElement::LoopGen(e) => {
                            let (hp, hm) = g.edges()[e];
                            let mut p = to(g.root(hp));
                            p.push(Step::Traverse(hp));
                            p.extend(back(g.root(hm)));
                            p
                        }
                    };
                    if inverse {
                        piece = invert_walk(&piece, g);
                    }
                    out.extend(piece);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::automorphisms;
    use crate::contraction::{compose, contract};
    use crate::graph::named::*;

    fn w(rank: usize, l: &[i32]) -> Word {
        Word::reduce(rank, l).unwrap()
    }

    #[test]
    fn presentation_examples() {
        let r = rose(2);
        let p = Pi1Presentation::new(&r, 0).unwrap();
        assert_eq!(p.basis(), &[BasisElement::LoopGen(0), BasisElement::LoopGen(1)]);
        let pt = point(2);
        let p = Pi1Presentation::new(&pt, 0).unwrap();
        assert_eq!(p.basis(), &[BasisElement::VertexGen(0, 1), BasisElement::VertexGen(0, 2)]);
        let t = theta();
        let a = t.vertices()[0];
        let p = Pi1Presentation::new(&t, a).unwrap();
        assert_eq!(p.tree(), &BTreeSet::from([0]));
        assert_eq!(p.basis(), &[BasisElement::LoopGen(1), BasisElement::LoopGen(2)]);
        assert_eq!(Pi1Presentation::new(&t, 99).unwrap_err(), Error::UnknownVertex(99));
    }

    #[test]
    fn canonical_marking_on_rose() {
        let p = Pi1Presentation::new(&rose(2), 0).unwrap();
        let m = Marking::canonical(&p);
        assert!(m.images().is_automorphism().unwrap());
        assert_eq!(m.top_class().words, vec![w(2, &[1]), w(2, &[2])]);
    }

    #[test]
    fn vertex_generators_die_in_the_class() {
        let p = Pi1Presentation::new(&point(2), 0).unwrap();
        let m = Marking::canonical(&p);
        let n = m.act(&GroupMap::from_letters(2, &[&[1, 2], &[2]]).unwrap()).unwrap();
        assert_eq!(m.top_class().rank_b, 0);
        assert!(m.top_class().words.iter().all(Word::is_identity));
        assert!(m.top_equivalent(&n).unwrap());
    }

    #[test]
    fn transvection_changes_class_on_rose() {
        let p = Pi1Presentation::new(&rose(2), 0).unwrap();
        let m = Marking::canonical(&p);
        let n = m.act(&GroupMap::from_letters(2, &[&[1, 2], &[2]]).unwrap()).unwrap();
        assert!(!m.top_equivalent(&n).unwrap());
    }

    #[test]
    fn inner_action_and_torsor() {
        let p = Pi1Presentation::new(&theta(), 0).unwrap();
        let m = Marking::canonical(&p);
        let inner = m.act(&GroupMap::inner(&w(2, &[1, -2]))).unwrap();
        assert_eq!(m.top_class(), inner.top_class());
        let a = GroupMap::from_letters(2, &[&[2, 1], &[-1]]).unwrap();
        let n = m.act(&a).unwrap();
        assert_eq!(m.difference(&n).unwrap(), a);
        assert_eq!(m.act(&m.difference(&n).unwrap()).unwrap(), n);
        assert!(m.difference(&m).unwrap().is_identity());
        let b = GroupMap::from_letters(2, &[&[2], &[1]]).unwrap();
        assert_eq!(n.act(&b).unwrap(), m.act(&b.compose(&a).unwrap()).unwrap());
    }

    #[test]
    fn base_change_round_trip() {
        let t = theta();
        let (a, b) = (t.vertices()[0], t.vertices()[1]);
        let m = Marking::canonical(&Pi1Presentation::new(&t, a).unwrap());
        let h = t.edges()[0].0;
        let there = m.change_basepoint(&[h]).unwrap();
        assert_eq!(there.presentation().base(), b);
        assert_eq!(there.top_class(), m.top_class());
        let back = there.change_basepoint(&[t.involution(h)]).unwrap();
        assert!(back.top_equivalent(&m).unwrap());
        assert_eq!(m.change_basepoint(&[]).unwrap(), m);
        assert!(matches!(m.change_basepoint(&[t.involution(h)]), Err(Error::BadPath(_))));
    }

    #[test]
    fn pushforward_contracting_a_rose_loop() {
        let r = rose(2);
        let m = Marking::canonical(&Pi1Presentation::new(&r, 0).unwrap());
        let (_, c) = contract(&r, &BTreeSet::from([1])).unwrap();
        let pushed = m.pushforward(&c).unwrap();
        let p = pushed.presentation();
        assert_eq!(p.basis(), &[BasisElement::LoopGen(0), BasisElement::VertexGen(p.base(), 1)]);
        assert_eq!(pushed.images(), &GroupMap::identity(2));
        assert_eq!(pushed.top_class().rank_b, 1);
        assert_eq!(m.pushforward(&EdgeContraction::identity(&r)).unwrap(), m);
    }

    #[test]
    fn pushforward_then_pullback_is_identity() {
        let d = dumbbell();
        let m = Marking::canonical(&Pi1Presentation::new(&d, d.vertices()[0]).unwrap())
            .act(&GroupMap::from_letters(2, &[&[2, 1], &[2]]).unwrap())
            .unwrap();
        for s in [BTreeSet::from([1]), BTreeSet::from([0, 1]), BTreeSet::from([0, 1, 2])] {
            let (_, c) = contract(&d, &s).unwrap();
            let pushed = m.pushforward(&c).unwrap();
            assert!(pushed.images().is_automorphism().unwrap());
            assert_eq!(pushed.pullback(&c).unwrap(), m);
        }
    }

    #[test]
    fn pushforward_is_functorial_on_dumbbell() {
        let d = dumbbell();
        let m = Marking::canonical(&Pi1Presentation::new(&d, d.vertices()[0]).unwrap());
        let (r2, bridge) = contract(&d, &BTreeSet::from([1])).unwrap();
        let (_, lp) = contract(&r2, &BTreeSet::from([0])).unwrap();
        let both = compose(&lp, &bridge).unwrap();
        let one = m.pushforward(&both).unwrap();
        let two = m.pushforward(&bridge).unwrap().pushforward(&lp).unwrap();
        assert!(one.top_equivalent(&two).unwrap());
    }

    #[test]
    fn transport_by_automorphisms_keeps_validity() {
        let t = theta();
        let m = Marking::canonical(&Pi1Presentation::new(&t, 0).unwrap());
        let mut classes = BTreeSet::new();
        for a in automorphisms(&t) {
            let moved = m.transport(&a).unwrap();
            assert!(moved.images().is_automorphism().unwrap());
            classes.insert(moved.top_class().cmp_key());
        }
        // the vertex swap acts as -1 on homology, which is not inner for rank 2
        assert_eq!(classes.len(), 12);
    }

    #[test]
    fn legs_are_rejected() {
        let mut b = crate::graph::GraphBuilder::new();
        let v = b.vertex(1);
        b.leg(v);
        let g = b.build().unwrap();
        assert_eq!(Pi1Presentation::new(&g, v).unwrap_err(), Error::LegsUnsupported);
    }
}
