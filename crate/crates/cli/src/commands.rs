//! The subcommands. Each returns the text it would write, so callers decide
//! where it goes; suite runs also return whether everything passed.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tropteich::canon::{are_isomorphic, automorphisms, canonical_form, certificate};
use tropteich::cone_complex::ConeDiagram;
use tropteich::contraction::{contract, uncontractions};
use tropteich::enumerate::{contraction_poset, enumerate_by_splitting, enumerate_stable_graphs};
use tropteich::free_group::{random_automorphism, GroupMap, Word};
use tropteich::graph::WeightedGraph;
use tropteich::marking::{Marking, Pi1Presentation};
use tropteich::moduli::{
    build_mg, build_tg_chart, cv_locus, random_marking, random_seeds, verify_quotient, CheckResult, MarkedObject,
};
use tropteich::tropicalize::{dual_tropical_curve, locate_cell, CurveDocument, ValuationSpec};

use crate::formats::{parse_model, parse_seeds, to_json, GraphList, MarkingDocument};
use crate::{CliError, Config, Format, VERSION};

fn cache_path(cfg: &Config) -> PathBuf {
    cfg.cache_dir.join(format!("enumerate-g{}-v{}.json", cfg.genus, VERSION))
}

/// The graph list of the genus, read from the cache when a valid entry exists.
pub fn cmd_enumerate(cfg: &Config) -> Result<String, CliError> {
    let path = cache_path(cfg);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(list) = serde_json::from_str::<GraphList>(&text) {
            if list.genus == cfg.genus && list.version == VERSION && to_json(&list) == text {
                return Ok(text);
            }
        }
    }
    let text = fresh_enumeration(cfg.genus)?;
    fs::create_dir_all(&cfg.cache_dir).map_err(|e| CliError::io(&cfg.cache_dir, e))?;
    fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
    Ok(text)
}

fn fresh_enumeration(genus: usize) -> Result<String, CliError> {
    Ok(to_json(&GraphList::new(genus, &enumerate_stable_graphs(genus)?)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    #[value(name = "Mg", alias = "mg")]
    Mg,
    #[value(name = "Tg-chart", alias = "tg-chart")]
    TgChart,
    #[value(name = "CV", alias = "cv")]
    Cv,
}

/// Where the seeds of a chart come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedSource {
    File(PathBuf),
    Random(usize),
    /// The canonical marking on the top-dimensional graph with the most
    /// automorphisms (theta in genus 2).
    Default,
}

pub struct SpaceOutput {
    pub text: String,
    pub verdict: Option<bool>,
}

pub fn cmd_space(cfg: &Config, which: Which, seeds: &SeedSource) -> Result<SpaceOutput, CliError> {
    match which {
        Which::Mg => Ok(SpaceOutput { text: render(&build_mg(cfg.genus)?, cfg.format), verdict: None }),
        Which::Cv => {
            let d = build_mg(cfg.genus)?;
            let ids = cv_locus(&d);
            let text = match cfg.format {
                Format::Structured => to_json(&CvDocument {
                    genus: cfg.genus,
                    count: ids.len(),
                    objects: ids
                        .iter()
                        .map(|&k| CvEntry {
                            id: k,
                            dimension: d.dimension(k),
                            certificate: certificate(d.objects[k].payload.graph()).to_hex(),
                        })
                        .collect(),
                }),
                Format::Dot => restricted_dot(&d, &ids),
            };
            Ok(SpaceOutput { text, verdict: None })
        }
        Which::TgChart => {
            let seeds = load_seeds(cfg, seeds)?;
            let chart = build_tg_chart(&seeds, cfg.radius)?;
            Ok(SpaceOutput { text: render(&chart, cfg.format), verdict: Some(chart.is_cone_complex()) })
        }
    }
}

fn render(d: &ConeDiagram, format: Format) -> String {
    match format {
        Format::Structured => to_json(&d.to_document()),
        Format::Dot => d.to_dot(),
    }
}

fn restricted_dot(d: &ConeDiagram, ids: &[usize]) -> String {
    let keep: BTreeSet<usize> = ids.iter().copied().collect();
    let full = d.to_dot();
    full.lines()
        .filter(|line| {
            let nodes: Vec<usize> = line
                .split(|c: char| !c.is_ascii_alphanumeric())
                .filter_map(|t| t.strip_prefix('n').and_then(|n| n.parse().ok()))
                .collect();
            nodes.iter().all(|n| keep.contains(n))
        })
        .map(|l| format!("{l}\n"))
        .collect()
}

#[derive(Serialize)]
struct CvDocument {
    genus: usize,
    count: usize,
    objects: Vec<CvEntry>,
}

#[derive(Serialize)]
struct CvEntry {
    id: usize,
    dimension: usize,
    certificate: String,
}

fn load_seeds(cfg: &Config, source: &SeedSource) -> Result<Vec<MarkedObject>, CliError> {
    match source {
        SeedSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let seeds = parse_seeds(&text)?;
            if let Some(s) = seeds.iter().find(|s| s.graph.genus() != cfg.genus) {
                return Err(CliError::Usage(format!("seed of genus {} in a genus-{} chart", s.graph.genus(), cfg.genus)));
            }
            Ok(seeds)
        }
        SeedSource::Random(count) => Ok(random_seeds(cfg.genus, *count, cfg.seed)?),
        SeedSource::Default => {
            let graphs = enumerate_stable_graphs(cfg.genus)?;
            let top = 3 * cfg.genus - 3;
            let g = graphs
                .iter()
                .filter(|g| g.edge_count() == top)
                .max_by_key(|g| automorphisms(g).len())
                .expect("trivalent graphs exist");
            let p = Pi1Presentation::reference(g)?;
            Ok(vec![MarkedObject::from_marking(&Marking::canonical(&p))?])
        }
    }
}

/// The default chart seed as a marking document.
pub fn default_seed_document(genus: usize) -> Result<String, CliError> {
    let cfg = Config::new(genus);
    let seeds = load_seeds(&cfg, &SeedSource::Default)?;
    Ok(to_json(&seeds.iter().map(|s| MarkingDocument::from_marking(&s.representative)).collect::<Vec<_>>()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Graphs,
    Markings,
    Complex,
    Quotient,
    All,
}

#[derive(Serialize)]
pub struct SuiteReport {
    pub genus: usize,
    pub suite: String,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn add(&mut self, name: &str, outcomes: impl IntoIterator<Item = Result<(), String>>) {
        let mut r = CheckResult { name: name.into(), passed: 0, failed: 0, counterexamples: Vec::new() };
        for o in outcomes {
            match o {
                Ok(()) => r.passed += 1,
                Err(e) => {
                    r.failed += 1;
                    if r.counterexamples.len() < 5 {
                        r.counterexamples.push(e);
                    }
                }
            }
        }
        self.0.push(r);
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

pub fn cmd_verify(cfg: &Config, suite: Suite, samples: usize) -> Result<(String, bool), CliError> {
    let mut checks = Checks(Vec::new());
    if matches!(suite, Suite::Graphs | Suite::All) {
        graphs_suite(cfg, &mut checks)?;
    }
    if matches!(suite, Suite::Markings | Suite::All) {
        markings_suite(cfg, samples, &mut checks)?;
    }
    if matches!(suite, Suite::Complex | Suite::All) {
        complex_suite(cfg, samples, &mut checks)?;
    }
    if matches!(suite, Suite::Quotient | Suite::All) {
        if cfg.genus > 3 {
            return Err(CliError::Core(tropteich::Error::UnsupportedGenus(cfg.genus)));
        }
        checks.0.extend(verify_quotient(cfg.genus, samples, cfg.seed)?.checks);
    }
    let passed = checks.0.iter().all(|c| c.failed == 0);
    let name = format!("{suite:?}").to_lowercase();
    let report = SuiteReport { genus: cfg.genus, suite: name, samples, seed: cfg.seed, checks: checks.0, passed };
    Ok((to_json(&report), passed))
}

fn graphs_suite(cfg: &Config, checks: &mut Checks) -> Result<(), CliError> {
    let graphs = enumerate_stable_graphs(cfg.genus)?;
    let certs = |gs: &[WeightedGraph]| gs.iter().map(certificate).collect::<Vec<_>>();
    let split = enumerate_by_splitting(cfg.genus)?;
    checks.add("enumeration_paths_agree", [check(certs(&graphs) == certs(&split), || {
        format!("{} classes by partitions, {} by splitting", graphs.len(), split.len())
    })]);
    let cached = cmd_enumerate(cfg)?;
    let fresh = fresh_enumeration(cfg.genus)?;
    checks.add("cache_matches_fresh", [check(cached == fresh, || "cached enumeration differs".into())]);
    checks.add(
        "element_count",
        graphs.iter().map(|g| {
            check(g.size() == g.vertex_count() + 2 * g.edge_count() + g.legs().len(), || format!("{g:?}"))
        }),
    );
    checks.add(
        "automorphism_groups",
        graphs.iter().map(|g| {
            let auts = automorphisms(g);
            let maps: BTreeSet<Vec<usize>> = auts.iter().map(|a| a.half_edge_map.clone()).collect();
            let closed = auts.iter().all(|a| {
                maps.contains(&a.inverse().half_edge_map) && auts.iter().all(|b| maps.contains(&a.after(b).half_edge_map))
            });
            check(closed, || certificate(g).to_hex())
        }),
    );
    let mut stable = Vec::new();
    for g in &graphs {
        for mask in 1u64..(1u64 << g.edge_count()) {
            let s: BTreeSet<usize> = (0..g.edge_count()).filter(|&e| mask >> e & 1 == 1).collect();
            let (h, _) = contract(g, &s)?;
            stable.push(check(h.is_stable() && h.genus() == g.genus(), || format!("{} contracting {s:?}", certificate(g))));
        }
    }
    checks.add("stability_under_contraction", stable);
    let mut trips = Vec::new();
    for g in &graphs {
        for (up, c) in uncontractions(g) {
            let (down, _) = contract(&up, &c.contracted)?;
            trips.push(check(are_isomorphic(&down, g).is_some(), || certificate(g).to_hex()));
        }
    }
    checks.add("uncontraction_round_trip", trips);
    Ok(())
}

fn markings_suite(cfg: &Config, samples: usize, checks: &mut Checks) -> Result<(), CliError> {
    let graphs = enumerate_stable_graphs(cfg.genus)?;
    let mut ranks = Vec::new();
    for g in &graphs {
        let p = Pi1Presentation::reference(g)?;
        ranks.push(check(p.rank() == g.genus() && p.loop_rank() == g.betti(), || certificate(g).to_hex()));
    }
    checks.add("rank_law", ranks);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut inner, mut torsor, mut based) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..samples {
        let g = &graphs[rng.gen_range(0..graphs.len())];
        let m = random_marking(g, &mut rng)?;
        let rank = g.genus();
        let letters: Vec<i32> = (0..rng.gen_range(1..=6))
            .map(|_| {
                let k = rng.gen_range(1..=rank as i32);
                if rng.gen_bool(0.5) { k } else { -k }
            })
            .collect();
        let w = Word::reduce(rank, &letters)?;
        let conj = m.act(&GroupMap::inner(&w))?;
        inner.push(check(conj.top_class() == m.top_class(), || format!("{} by {w}", m.images())));
        let a = random_automorphism(rank, 8, &mut rng);
        let n = m.act(&a)?;
        let alpha = m.difference(&n)?;
        torsor.push(check(alpha.is_automorphism()? && m.act(&alpha)? == n, || format!("{} vs {}", m.images(), n.images())));
        let vs = g.vertices();
        let v = vs[rng.gen_range(0..vs.len())];
        let path = m.presentation().tree_path(v)?.to_vec();
        let moved = m.change_basepoint(&path)?;
        based.push(check(moved.top_class() == m.top_class(), || format!("{} moved to {v}", m.images())));
    }
    checks.add("inner_triviality", inner);
    checks.add("difference_torsor", torsor);
    checks.add("basepoint_independence", based);
    Ok(())
}

fn complex_suite(cfg: &Config, samples: usize, checks: &mut Checks) -> Result<(), CliError> {
    let d = build_mg(cfg.genus)?;
    let graphs = enumerate_stable_graphs(cfg.genus)?;
    let same_objects = d.objects.iter().map(|o| certificate(o.payload.graph())).collect::<Vec<_>>()
        == graphs.iter().map(certificate).collect::<Vec<_>>();
    checks.add("mg_objects", [check(same_objects, || "objects differ from the enumeration".into())]);
    checks.add("mg_structure", [d.check_structure().map_err(|e| e.to_string())]);
    checks.add("mg_faithful_monodromy", [check(d.has_faithful_monodromy(), || "repeated coordinate maps".into())]);
    let max = d.f_vector().len().saturating_sub(1);
    checks.add("mg_dimension", [check(max == 3 * cfg.genus - 3, || format!("max dimension {max}"))]);
    checks.add("mg_not_cone_complex", [check(!d.is_cone_complex(), || "M_g diagram has no symmetry".into())]);
    let seeds = random_seeds(cfg.genus, samples, cfg.seed)?;
    let mut charts = Vec::new();
    for s in &seeds {
        let chart = build_tg_chart(std::slice::from_ref(s), cfg.radius)?;
        charts.push(check(chart.is_cone_complex(), || {
            let bad: Vec<String> = chart
                .homs
                .iter()
                .filter(|(&(a, b), maps)| if a == b { maps.len() != 1 } else { maps.len() > 1 })
                .map(|(&(a, b), maps)| format!("hom({a},{b}) has {} maps", maps.len()))
                .collect();
            format!("seed {} {:?}: {}", certificate(&s.graph), s.class.render(), bad.join("; "))
        }));
    }
    checks.add("tg_chart_cone_complex", charts);
    Ok(())
}

#[derive(Serialize)]
struct TropicalizeDocument {
    genus: usize,
    curve: CurveDocument,
    notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    location: Option<LocationDocument>,
}

#[derive(Serialize)]
struct LocationDocument {
    object: usize,
    certificate: String,
    coordinates: Vec<String>,
    orbit_size: usize,
    face_at_infinity: Vec<usize>,
}

pub fn cmd_tropicalize(model_file: &Path, prime: Option<u64>, locate: bool) -> Result<String, CliError> {
    let text = fs::read_to_string(model_file).map_err(|e| CliError::io(model_file, e))?;
    let mut model = parse_model(&text)?;
    if let Some(p) = prime {
        model.valuation = ValuationSpec::PAdic { prime: p };
    }
    let curve = dual_tropical_curve(&model)?;
    let notes = curve
        .lengths()
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_infinite())
        .map(|(e, _)| format!("edge {e} has infinite length: its node persists in the generic fiber"))
        .collect();
    let genus = curve.graph().genus();
    let location = if locate {
        let space = build_mg(genus)?;
        let loc = locate_cell(&curve, &space)?;
        let id = loc.point.object;
        Some(LocationDocument {
            object: id,
            certificate: canonical_form(space.objects[id].payload.graph()).certificate.to_hex(),
            coordinates: loc.point.coordinates.iter().map(|c| c.to_string()).collect(),
            orbit_size: loc.orbit.len(),
            face_at_infinity: loc.face_at_infinity,
        })
    } else {
        None
    };
    Ok(to_json(&TropicalizeDocument { genus, curve: curve.to_document(), notes, location }))
}

pub fn cmd_export(cfg: &Config) -> Result<String, CliError> {
    let poset = contraction_poset(cfg.genus)?;
    Ok(match cfg.format {
        Format::Dot => poset.to_dot(),
        Format::Structured => to_json(&poset.to_document()),
    })
}
