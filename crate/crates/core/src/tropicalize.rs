//! Dual tropical curves of stable models with exact valuations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::canon::are_isomorphic;
use crate::cone_complex::{ConeDiagram, ExtendedPoint, ExtendedValue};
use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, GraphData, WeightedGraph};

/// Valuation of a rational: an integer, or `∞` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if p % q == 0 {
            return p == q;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let (mut d, mut s) = (p - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // these bases decide primality for every 64-bit integer
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == p - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == p - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// The exact `p`-adic valuation of `q`.
pub fn padic_valuation(q: &BigRational, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if q.is_zero() {
        return Ok(Valuation::Infinity);
    }
    let p = BigInt::from(p);
    Ok(Valuation::Finite(int_valuation(q.numer(), &p) - int_valuation(q.denom(), &p)))
}

/// A node parameter: a nonzero rational, or zero for a node that persists in
/// the generic fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parameter {
    Value(BigRational),
    Zero,
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Parameter> {
        let s = s.trim();
        if s == "ZERO" {
            return Ok(Parameter::Zero);
        }
        let q = parse_rational(s)?;
        Ok(if q.is_zero() { Parameter::Zero } else { Parameter::Value(q) })
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parameter::Value(q) => write!(f, "{q}"),
            Parameter::Zero => f.write_str("ZERO"),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Malformed(format!("`{s}` is not a rational number"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn parse_extended(s: &str) -> Result<ExtendedValue> {
    match s.trim() {
        "inf" | "∞" => Ok(ExtendedValue::Infinity),
        other => Ok(ExtendedValue::Finite(parse_rational(other)?)),
    }
}

fn string_serde<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Serialize for Parameter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        string_serde(self, s)
    }
}

impl<'de> Deserialize<'de> for Parameter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Parameter, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub id: String,
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub between: (String, String),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<Parameter>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum ValuationSpec {
    /// Lengths are `p`-adic valuations of the node parameters.
    PAdic { prime: u64 },
    /// Lengths given per node, as rationals or `inf`.
    Explicit(Vec<String>),
    /// Lengths given per node as exponents of a uniformizer.
    TAdic(Vec<u64>),
}

/// Special fiber of a stable model: components with geometric genera and
/// nodes with parameters, plus how to value the parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableModel {
    pub components: Vec<Component>,
    pub nodes: Vec<Node>,
    pub valuation: ValuationSpec,
}

/// A stable graph with edge lengths in `Q_{>0} ∪ {∞}`, indexed by edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurveExt {
    graph: WeightedGraph,
    lengths: Vec<ExtendedValue>,
}

impl TropicalCurveExt {
    pub fn new(graph: WeightedGraph, lengths: Vec<ExtendedValue>) -> Result<TropicalCurveExt> {
        if lengths.len() != graph.edge_count() {
            return Err(Error::LengthMismatch(graph.edge_count(), lengths.len()));
        }
        for (e, l) in lengths.iter().enumerate() {
            if let ExtendedValue::Finite(q) = l {
                if q.is_zero() {
                    return Err(Error::ZeroLengthNode(e));
                }
                if q.is_negative() {
                    return Err(Error::NegativeValuation(e));
                }
            }
        }
        Ok(TropicalCurveExt { graph, lengths })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn lengths(&self) -> &[ExtendedValue] {
        &self.lengths
    }

    pub fn to_document(&self) -> CurveDocument {
        CurveDocument {
            graph: self.graph.to_data(),
            lengths: self.lengths.iter().map(|l| l.to_string()).collect(),
        }
    }

    pub fn from_document(doc: &CurveDocument) -> Result<TropicalCurveExt> {
        let graph = WeightedGraph::new(doc.graph.clone())?;
        let lengths = doc.lengths.iter().map(|s| parse_extended(s)).collect::<Result<Vec<_>>>()?;
        TropicalCurveExt::new(graph, lengths)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDocument {
    pub graph: GraphData,
    pub lengths: Vec<String>,
}

fn node_length(model: &StableModel, k: usize) -> Result<ExtendedValue> {
    let node = &model.nodes[k];
    if node.parameter == Some(Parameter::Zero) {
        return Ok(ExtendedValue::Infinity);
    }
    let value = match &model.valuation {
        ValuationSpec::PAdic { prime } => {
            let Some(Parameter::Value(q)) = &node.parameter else {
                return Err(Error::Malformed(format!("nodes[{k}].parameter is required for p-adic valuation")));
            };
            match padic_valuation(q, *prime)? {
                Valuation::Infinity => ExtendedValue::Infinity,
                Valuation::Finite(v) => ExtendedValue::Finite(BigRational::from_integer(v.into())),
            }
        }
        ValuationSpec::Explicit(values) => {
            let s = values.get(k).ok_or_else(|| Error::Malformed(format!("valuation.explicit has no entry {k}")))?;
            parse_extended(s)?
        }
        ValuationSpec::TAdic(exps) => {
            let e = exps.get(k).ok_or_else(|| Error::Malformed(format!("valuation.t-adic has no entry {k}")))?;
            ExtendedValue::Finite(BigRational::from_integer((*e).into()))
        }
    };
    if let ExtendedValue::Finite(q) = &value {
        if q.is_zero() {
            return Err(Error::ZeroLengthNode(k));
        }
        if q.is_negative() {
            return Err(Error::NegativeValuation(k));
        }
    }
    Ok(value)
}

/// One vertex per component weighted by its geometric genus, one edge per
/// node; a zero parameter gives an edge of infinite length.
pub fn dual_tropical_curve(model: &StableModel) -> Result<TropicalCurveExt> {
    let mut b = GraphBuilder::new();
    let mut vertex_of = BTreeMap::new();
    for c in &model.components {
        let v = b.vertex(c.genus);
        if vertex_of.insert(c.id.clone(), v).is_some() {
            return Err(Error::Malformed(format!("duplicate component id `{}`", c.id)));
        }
    }
    if model.components.is_empty() {
        return Err(Error::Malformed("components is empty".into()));
    }
    let mut lengths = Vec::new();
    for (k, n) in model.nodes.iter().enumerate() {
        let end = |id: &String| {
            vertex_of.get(id).copied().ok_or_else(|| Error::Malformed(format!("nodes[{k}] names unknown component `{id}`")))
        };
        b.edge(end(&n.between.0)?, end(&n.between.1)?);
        lengths.push(node_length(model, k)?);
    }
    let graph = b.build()?;
    if !graph.is_stable() {
        return Err(Error::UnstableDualGraph);
    }
    debug_assert!((0..graph.edge_count()).all(|e| graph.edges()[e].0 < graph.edges()[e].1));
    TropicalCurveExt::new(graph, lengths)
}

/// Where a tropical curve sits in a diagram of cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellLocation {
    pub point: ExtendedPoint,
    /// All coordinate vectors of the point under the object's self-maps.
    pub orbit: Vec<Vec<ExtendedValue>>,
    pub face_at_infinity: Vec<usize>,
}

/// Finds the object isomorphic to the curve's graph and its coordinates.
/// The reported point is the least member of the orbit.
pub fn locate_cell(curve: &TropicalCurveExt, space: &ConeDiagram) -> Result<CellLocation> {
    let g = curve.graph();
    let no_cell = || Error::NoMatchingCell(format!("no object of the diagram matches a genus-{} graph", g.genus()));
    if !g.is_stable() {
        return Err(no_cell());
    }
    let (id, iso) = space
        .objects
        .iter()
        .find_map(|o| are_isomorphic(g, o.payload.graph()).map(|iso| (o.id, iso)))
        .ok_or_else(no_cell)?;
    let target = &space.objects[id];
    let mut coords = vec![ExtendedValue::Infinity; target.cone.dimension()];
    for e in 0..g.edge_count() {
        coords[iso.edge_image(e)] = curve.lengths[e].clone();
    }
    let mut orbit: BTreeSet<Vec<ExtendedValue>> = BTreeSet::new();
    for m in space.hom(id, id) {
        let mut moved = coords.clone();
        for (k, &l) in m.coordinate_map.iter().enumerate() {
            moved[l] = coords[m.source.labels[k]].clone();
        }
        orbit.insert(moved);
    }
    orbit.insert(coords);
    let orbit: Vec<_> = orbit.into_iter().collect();
    let point = ExtendedPoint { object: id, coordinates: orbit[0].clone() };
    let face_at_infinity = point.face_at_infinity(&target.cone);
    Ok(CellLocation { point, orbit, face_at_infinity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::build_mg;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn model(components: &[(&str, u32)], nodes: &[(&str, &str, &str)], valuation: ValuationSpec) -> StableModel {
        StableModel {
            components: components.iter().map(|(id, g)| Component { id: id.to_string(), genus: *g }).collect(),
            nodes: nodes
                .iter()
                .map(|(a, b, p)| Node { between: (a.to_string(), b.to_string()), parameter: Some(p.parse().unwrap()) })
                .collect(),
            valuation,
        }
    }

    fn fin(n: i64) -> ExtendedValue {
        ExtendedValue::Finite(q(n, 1))
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic_valuation(&q(4, 6), 2).unwrap(), Valuation::Finite(1));
        assert_eq!(padic_valuation(&q(7, 1), 7).unwrap(), Valuation::Finite(1));
        assert_eq!(padic_valuation(&q(0, 1), 3).unwrap(), Valuation::Infinity);
        assert_eq!(padic_valuation(&q(1, 9), 3).unwrap(), Valuation::Finite(-2));
        assert_eq!(padic_valuation(&q(1, 1), 4).unwrap_err(), Error::NotPrime(4));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(1));
    }

    #[test]
    fn two_elliptic_components() {
        let m = model(&[("A", 1), ("B", 1)], &[("A", "B", "3")], ValuationSpec::PAdic { prime: 3 });
        let c = dual_tropical_curve(&m).unwrap();
        assert_eq!(c.lengths(), &[fin(1)]);
        assert_eq!(c.graph().genus(), 2);
    }

    #[test]
    fn three_self_nodes() {
        let m = model(&[("C", 0)], &[("C", "C", "5"), ("C", "C", "25"), ("C", "C", "125")], ValuationSpec::PAdic { prime: 5 });
        let c = dual_tropical_curve(&m).unwrap();
        assert_eq!(c.lengths(), &[fin(1), fin(2), fin(3)]);
        assert_eq!(c.graph().genus(), 3);
    }

    #[test]
    fn persisting_node_has_infinite_length() {
        let m = model(&[("E", 1)], &[("E", "E", "ZERO")], ValuationSpec::PAdic { prime: 2 });
        let c = dual_tropical_curve(&m).unwrap();
        assert_eq!(c.lengths(), &[ExtendedValue::Infinity]);
    }

    #[test]
    fn model_errors() {
        let unit = model(&[("A", 1), ("B", 1)], &[("A", "B", "2")], ValuationSpec::PAdic { prime: 3 });
        assert_eq!(dual_tropical_curve(&unit).unwrap_err(), Error::ZeroLengthNode(0));
        let neg = model(&[("A", 1), ("B", 1)], &[("A", "B", "1/3")], ValuationSpec::PAdic { prime: 3 });
        assert_eq!(dual_tropical_curve(&neg).unwrap_err(), Error::NegativeValuation(0));
        let split = model(&[("A", 2), ("B", 2)], &[], ValuationSpec::PAdic { prime: 3 });
        assert_eq!(dual_tropical_curve(&split).unwrap_err(), Error::Disconnected);
        let rational_tail = model(&[("A", 2), ("B", 0)], &[("A", "B", "3")], ValuationSpec::PAdic { prime: 3 });
        assert_eq!(dual_tropical_curve(&rational_tail).unwrap_err(), Error::UnstableDualGraph);
        let explicit = model(&[("A", 1), ("B", 1)], &[("A", "B", "2")], ValuationSpec::Explicit(vec!["0".into()]));
        assert_eq!(dual_tropical_curve(&explicit).unwrap_err(), Error::ZeroLengthNode(0));
        let t = model(&[("A", 1), ("B", 1)], &[("A", "B", "2")], ValuationSpec::TAdic(vec![4]));
        assert_eq!(dual_tropical_curve(&t).unwrap().lengths(), &[fin(4)]);
    }

    #[test]
    fn locate_theta_points() {
        let space = build_mg(2).unwrap();
        let theta = crate::graph::named::theta();
        let sym = TropicalCurveExt::new(theta.clone(), vec![fin(1), fin(1), fin(1)]).unwrap();
        let loc = locate_cell(&sym, &space).unwrap();
        assert_eq!(loc.orbit.len(), 1);
        assert_eq!(loc.point.coordinates, vec![fin(1), fin(1), fin(1)]);
        let generic = TropicalCurveExt::new(theta, vec![fin(1), fin(2), fin(3)]).unwrap();
        assert_eq!(locate_cell(&generic, &space).unwrap().orbit.len(), 6);
    }

    #[test]
    fn locate_infinite_loop() {
        let space = build_mg(2).unwrap();
        let m = model(&[("E", 1)], &[("E", "E", "ZERO")], ValuationSpec::PAdic { prime: 2 });
        let loc = locate_cell(&dual_tropical_curve(&m).unwrap(), &space).unwrap();
        assert_eq!(space.dimension(loc.point.object), 1);
        assert_eq!(loc.face_at_infinity, vec![0]);
        let three = model(&[("C", 0)], &[("C", "C", "5"), ("C", "C", "25"), ("C", "C", "125")], ValuationSpec::PAdic { prime: 5 });
        assert!(matches!(locate_cell(&dual_tropical_curve(&three).unwrap(), &space), Err(Error::NoMatchingCell(_))));
    }

    #[test]
    fn model_document_round_trip() {
        let m = model(&[("A", 1), ("B", 1)], &[("A", "B", "9/2")], ValuationSpec::PAdic { prime: 3 });
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<StableModel>(&text).unwrap(), m);
        let c = dual_tropical_curve(&m).unwrap();
        assert_eq!(TropicalCurveExt::from_document(&c.to_document()).unwrap(), c);
    }
}
