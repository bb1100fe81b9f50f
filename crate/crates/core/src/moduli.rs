//! The moduli diagram of stable graphs, finite charts of the marked
//! (Teichmüller) diagram, and checks of the quotient by `Out(F_g)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canon::{automorphisms, canonical_form, to_canonical, Certificate};
use crate::cone_complex::{ConeDiagram, DiagramObject, FaceMap, OrthantCone, Payload};
use crate::contraction::{contract, uncontractions, EdgeContraction};
use crate::enumerate::{contraction_poset_with, enumerate_stable_graphs_with};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::free_group::{nielsen_generators, random_automorphism};
use crate::graph::WeightedGraph;
use crate::marking::{Marking, Pi1Presentation, TopClass};

/// Longest product of Nielsen generators used for random markings.
pub const RANDOM_WORD_LENGTH: usize = 8;

/// A canonical graph with a topological class of markings, normalized over
/// the automorphisms of the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedObject {
    pub graph: WeightedGraph,
    pub class: TopClass,
    pub representative: Marking,
}

type ObjectKey = (Certificate, Vec<(usize, Vec<u32>)>);

impl MarkedObject {
    /// Moves the marking to the canonical graph and picks, among the images
    /// under graph automorphisms, the one with the least class.
    pub fn from_marking(m: &Marking) -> Result<MarkedObject> {
        let to_can = to_canonical(m.graph());
        let on_canonical = m.transport(&to_can)?;
        let graph = to_can.target.clone();
        let mut best: Option<(Vec<(usize, Vec<u32>)>, TopClass, Marking)> = None;
        for a in automorphisms(&graph) {
            let moved = on_canonical.transport(&a)?;
            let class = moved.top_class();
            let key = class.cmp_key();
            if best.as_ref().map_or(true, |(k, _, _)| key < *k) {
                best = Some((key, class, moved));
            }
        }
        let (_, class, moved) = best.expect("identity automorphism");
        let reference = Pi1Presentation::reference(&graph)?;
        let representative = rebase(&moved, reference.base())?;
        Ok(MarkedObject { graph, class, representative })
    }

    pub fn key(&self) -> ObjectKey {
        (canonical_form(&self.graph).certificate, self.class.cmp_key())
    }
}

fn rebase(m: &Marking, base: usize) -> Result<Marking> {
    if m.presentation().base() == base {
        return Ok(m.clone());
    }
    let path = m.presentation().tree_path(base)?.to_vec();
    m.change_basepoint(&path)
}

pub fn forget_marking(obj: &MarkedObject) -> WeightedGraph {
    obj.graph.clone()
}

/// The canonical marking on `g` moved by a random product of Nielsen generators.
pub fn random_marking(g: &WeightedGraph, rng: &mut ChaCha8Rng) -> Result<Marking> {
    let p = Pi1Presentation::reference(g)?;
    let a = random_automorphism(p.rank(), RANDOM_WORD_LENGTH, rng);
    Marking::canonical(&p).act(&a)
}

/// `count` marked objects over uniformly chosen graph classes of the genus.
pub fn random_seeds(genus: usize, count: usize, seed: u64) -> Result<Vec<MarkedObject>> {
    let graphs = enumerate_stable_graphs_with(genus, Exec::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            use rand::Rng;
            let g = &graphs[rng.gen_range(0..graphs.len())];
            MarkedObject::from_marking(&random_marking(g, &mut rng)?)
        })
        .collect()
}

/// Every contraction map into a canonical target, one per edge set and
/// target automorphism.
fn contraction_maps(g: &WeightedGraph) -> Vec<EdgeContraction> {
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << g.edge_count()) {
        let edges: BTreeSet<usize> = (0..g.edge_count()).filter(|&e| mask >> e & 1 == 1).collect();
        let (image, c) = contract(g, &edges).expect("edge ids in range");
        let c = c.then_iso(&to_canonical(&image)).expect("composable");
        for a in automorphisms(&c.target) {
            out.push(c.then_iso(&a).expect("composable"));
        }
    }
    out
}

/// The diagram over the contraction poset with one face map per contraction
/// map, automorphisms included; hom-sets may repeat coordinate maps.
pub fn build_mg_raw(genus: usize, exec: Exec) -> Result<ConeDiagram> {
    let poset = contraction_poset_with(genus, exec)?;
    let objects: Vec<DiagramObject> = poset
        .objects
        .iter()
        .enumerate()
        .map(|(id, g)| DiagramObject { id, cone: OrthantCone::of_graph(g), payload: Payload::Graph(g.clone()) })
        .collect();
    let per_morphism = exec.map(&poset.morphisms, |m| {
        let target_auts = automorphisms(&poset.objects[m.target]);
        target_auts
            .iter()
            .map(|a| FaceMap::from_contraction(&m.contraction.then_iso(a).expect("composable")))
            .collect::<Vec<_>>()
    });
    let mut homs: BTreeMap<(usize, usize), Vec<FaceMap>> = BTreeMap::new();
    for (m, maps) in poset.morphisms.iter().zip(per_morphism) {
        homs.entry((m.target, m.source)).or_default().extend(maps);
    }
    for maps in homs.values_mut() {
        maps.sort_by(|a, b| a.coordinate_map.cmp(&b.coordinate_map));
    }
    Ok(ConeDiagram { marked: false, objects, homs })
}

/// The generalized cone complex of stable tropical curves of genus `genus`.
pub fn build_mg(genus: usize) -> Result<ConeDiagram> {
    Ok(build_mg_raw(genus, Exec::default())?.coarse_space())
}

/// Objects of the chart: the seeds, all their faces, and cofaces reached by
/// at most `radius` expansions.
fn chart_objects(seeds: &[MarkedObject], radius: usize, exec: Exec) -> Result<BTreeMap<ObjectKey, MarkedObject>> {
    let mut objects: BTreeMap<ObjectKey, MarkedObject> = BTreeMap::new();
    let canon_seeds = exec.map(seeds, |s| MarkedObject::from_marking(&s.representative));
    let mut seeds_here = Vec::new();
    for s in canon_seeds {
        let s = s?;
        seeds_here.push(s.clone());
        objects.insert(s.key(), s);
    }
    let faces = exec.map(&seeds_here, |s| -> Result<Vec<MarkedObject>> {
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << s.graph.edge_count()) {
            let edges: BTreeSet<usize> = (0..s.graph.edge_count()).filter(|&e| mask >> e & 1 == 1).collect();
            let (_, c) = contract(&s.graph, &edges)?;
            out.push(MarkedObject::from_marking(&s.representative.pushforward(&c)?)?);
        }
        Ok(out)
    });
    for f in faces {
        for o in f? {
            objects.entry(o.key()).or_insert(o);
        }
    }
    let mut frontier = seeds_here;
    for _ in 0..radius {
        let found = exec.map(&frontier, |b| marked_expansions(b));
        let mut next = Vec::new();
        for f in found {
            for o in f? {
                let key = o.key();
                if !objects.contains_key(&key) {
                    objects.insert(key, o.clone());
                    next.push(o);
                }
            }
        }
        frontier = next;
    }
    Ok(objects)
}

/// Marked one-edge expansions of `b`: the pullback of its marking along each
/// expansion, and its images under single Nielsen generators that still push
/// forward to the class of `b`.
fn marked_expansions(b: &MarkedObject) -> Result<Vec<MarkedObject>> {
    let mut out = Vec::new();
    let gens = nielsen_generators(b.representative.presentation().rank());
    let key = b.key();
    for (_, c) in uncontractions(&b.graph) {
        let lift = b.representative.pullback(&c)?;
        out.push(MarkedObject::from_marking(&lift)?);
        for a in &gens {
            let moved = lift.act(a)?;
            if MarkedObject::from_marking(&moved.pushforward(&c)?)?.key() == key {
                out.push(MarkedObject::from_marking(&moved)?);
            }
        }
    }
    Ok(out)
}

/// The full sub-diagram of marked objects spanned by the chart objects, with
/// one face map per contraction map whose pushforward hits the target class
/// exactly. Hom-sets may repeat coordinate maps.
pub fn build_tg_chart_raw(seeds: &[MarkedObject], radius: usize, exec: Exec) -> Result<ConeDiagram> {
    let found = chart_objects(seeds, radius, exec)?;
    let keys: Vec<ObjectKey> = found.keys().cloned().collect();
    let index: BTreeMap<&ObjectKey, usize> = keys.iter().enumerate().map(|(k, key)| (key, k)).collect();
    let marked: Vec<&MarkedObject> = found.values().collect();
    let per_object = exec.map(&marked, |a| -> Result<Vec<(usize, FaceMap)>> {
        let mut out = Vec::new();
        for c in contraction_maps(&a.graph) {
            let pushed = a.representative.pushforward(&c)?;
            let key = (canonical_form(&c.target).certificate, pushed.top_class().cmp_key());
            if let Some(&b) = index.get(&key) {
                out.push((b, FaceMap::from_contraction(&c)));
            }
        }
        Ok(out)
    });
    let mut homs: BTreeMap<(usize, usize), Vec<FaceMap>> = BTreeMap::new();
    for (a, maps) in per_object.into_iter().enumerate() {
        for (b, f) in maps? {
            homs.entry((b, a)).or_default().push(f);
        }
    }
    for maps in homs.values_mut() {
        maps.sort_by(|x, y| x.coordinate_map.cmp(&y.coordinate_map));
    }
    let objects = found
        .into_values()
        .enumerate()
        .map(|(id, o)| DiagramObject {
            id,
            cone: OrthantCone::of_graph(&o.graph),
            payload: Payload::Marked { graph: o.graph, class: o.class, representative: Box::new(o.representative) },
        })
        .collect();
    Ok(ConeDiagram { marked: true, objects, homs })
}

/// Chart of the marked diagram around the seeds, in coarse form.
pub fn build_tg_chart(seeds: &[MarkedObject], radius: usize) -> Result<ConeDiagram> {
    Ok(build_tg_chart_raw(seeds, radius, Exec::default())?.coarse_space())
}

/// Objects whose vertex weights all vanish: the cell types of Outer space.
pub fn cv_locus(d: &ConeDiagram) -> Vec<usize> {
    d.objects
        .iter()
        .filter(|o| {
            let g = o.payload.graph();
            g.vertices().iter().all(|&v| g.weight(v) == 0)
        })
        .map(|o| o.id)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub counterexamples: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub genus: usize,
    pub samples: usize,
    pub seed: u64,
    pub objects: usize,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

const CHECKS: [&str; 5] = ["torsor", "pushforward_valid", "class_hit", "equivariance", "round_trip"];
const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Default)]
struct Tally {
    passed: [usize; 5],
    failed: [usize; 5],
    examples: [Vec<String>; 5],
}

impl Tally {
    fn record(&mut self, check: usize, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.passed[check] += 1;
        } else {
            self.failed[check] += 1;
            if self.examples[check].len() < MAX_COUNTEREXAMPLES {
                self.examples[check].push(detail());
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        for k in 0..CHECKS.len() {
            self.passed[k] += other.passed[k];
            self.failed[k] += other.failed[k];
            let room = MAX_COUNTEREXAMPLES - self.examples[k].len();
            self.examples[k].extend(other.examples[k].iter().take(room).cloned());
        }
    }
}

/// Per stable graph, `samples` random marking pairs: the difference is an
/// automorphism carrying one to the other, and every contraction pushes each
/// marking to a valid marking whose class lies in the orbit of the canonical
/// one, compatibly with the action and with pulling back.
pub fn verify_quotient(genus: usize, samples: usize, seed: u64) -> Result<QuotientReport> {
    verify_quotient_with(genus, samples, seed, Exec::default())
}

pub fn verify_quotient_with(genus: usize, samples: usize, seed: u64, exec: Exec) -> Result<QuotientReport> {
    if !(2..=3).contains(&genus) {
        return Err(Error::UnsupportedGenus(genus));
    }
    let graphs = enumerate_stable_graphs_with(genus, exec)?;
    let ids: Vec<usize> = (0..graphs.len()).collect();
    let tallies = exec.map(&ids, |&k| check_object(&graphs[k], k, samples, seed));
    let mut total = Tally::default();
    for t in tallies {
        total.merge(t?);
    }
    let checks: Vec<CheckResult> = CHECKS
        .iter()
        .enumerate()
        .map(|(k, name)| CheckResult {
            name: name.to_string(),
            passed: total.passed[k],
            failed: total.failed[k],
            counterexamples: total.examples[k].clone(),
        })
        .collect();
    let passed = checks.iter().all(|c| c.failed == 0);
    Ok(QuotientReport { genus, samples, seed, objects: graphs.len(), checks, passed })
}

fn check_object(g: &WeightedGraph, index: usize, samples: usize, seed: u64) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let p = Pi1Presentation::reference(g)?;
    let canonical = Marking::canonical(&p);
    let contractions = contraction_maps(g);
    let cert = canonical_form(g).certificate.to_hex();
    let mut t = Tally::default();
    for sample in 0..samples {
        let a1 = random_automorphism(p.rank(), RANDOM_WORD_LENGTH, &mut rng);
        let a2 = random_automorphism(p.rank(), RANDOM_WORD_LENGTH, &mut rng);
        let m1 = canonical.act(&a1)?;
        let m2 = canonical.act(&a2)?;
        let alpha = m1.difference(&m2)?;
        let ok = alpha.is_automorphism()? && m1.act(&alpha)? == m2;
        t.record(0, ok, || format!("{cert} sample {sample}: {} -> {}", m1.images(), m2.images()));
        for c in &contractions {
            let what = || format!("{cert} sample {sample}, contracting {:?}", c.contracted);
            let pushed = m1.pushforward(c)?;
            let valid = pushed.graph() == &c.target && pushed.images().is_automorphism()?;
            t.record(1, valid, what);
            let target_canonical = Marking::canonical(pushed.presentation());
            let beta = target_canonical.difference(&pushed)?;
            let hit = target_canonical.act(&beta)?.top_class() == pushed.top_class();
            t.record(2, hit, what);
            let equivariant = m2.pushforward(c)? == pushed.act(&m1.difference(&m2)?)?;
            t.record(3, equivariant, what);
            t.record(4, pushed.pullback(c)? == m1, what);
        }
    }
    Ok(t)
}
