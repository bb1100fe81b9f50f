//! File formats: graph lists, marking documents, stable models.

use serde::{Deserialize, Serialize};
use tropteich::canon::{canonical_form, Certificate};
use tropteich::free_group::{GroupMap, Word};
use tropteich::graph::{GraphData, WeightedGraph};
use tropteich::marking::{Marking, Pi1Presentation};
use tropteich::moduli::MarkedObject;
use tropteich::tropicalize::StableModel;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEntry {
    pub certificate: String,
    pub vertices: usize,
    pub edges: usize,
    pub automorphisms: usize,
    pub graph: GraphData,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphList {
    pub genus: usize,
    pub version: String,
    pub count: usize,
    pub graphs: Vec<GraphEntry>,
}

impl GraphList {
    pub fn new(genus: usize, graphs: &[WeightedGraph]) -> GraphList {
        GraphList {
            genus,
            version: crate::VERSION.to_string(),
            count: graphs.len(),
            graphs: graphs
                .iter()
                .map(|g| GraphEntry {
                    certificate: canonical_form(g).certificate.to_hex(),
                    vertices: g.vertex_count(),
                    edges: g.edge_count(),
                    automorphisms: tropteich::canon::automorphisms(g).len(),
                    graph: g.to_data(),
                })
                .collect(),
        }
    }

    pub fn to_graphs(&self) -> Result<Vec<WeightedGraph>, CliError> {
        Ok(self.graphs.iter().map(|e| WeightedGraph::new(e.graph.clone())).collect::<Result<Vec<_>, _>>()?)
    }
}

/// A marking on the canonical graph of `certificate`, based at `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkingDocument {
    pub certificate: String,
    pub base: usize,
    pub basis: Vec<String>,
    pub images: Vec<String>,
}

impl MarkingDocument {
    pub fn from_marking(m: &Marking) -> MarkingDocument {
        let p = m.presentation();
        MarkingDocument {
            certificate: canonical_form(p.graph()).certificate.to_hex(),
            base: p.base(),
            basis: p.basis().iter().map(|b| b.to_string()).collect(),
            images: m.images().images().iter().map(|w| w.to_string()).collect(),
        }
    }

    /// Rebuilds the marking; the graph must be the canonical one and the
    /// images must form an automorphism.
    pub fn to_marking(&self) -> Result<Marking, CliError> {
        let graph = Certificate::from_hex(&self.certificate)?.decode()?;
        let p = Pi1Presentation::new(&graph, self.base)?;
        let listed: Vec<String> = p.basis().iter().map(|b| b.to_string()).collect();
        if listed != self.basis {
            return Err(CliError::Parse(format!(
                "field `basis`: expected [{}] for this graph and base",
                listed.join(", ")
            )));
        }
        let g = p.rank();
        let words = self
            .images
            .iter()
            .map(|s| Word::parse(g, s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Parse(format!("field `images`: {e}")))?;
        let images = GroupMap::from_images(g, words)?;
        Ok(Marking::new(p, images)?)
    }
}

pub fn parse_seeds(text: &str) -> Result<Vec<MarkedObject>, CliError> {
    let docs: Vec<MarkingDocument> = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("seeds: {e}")))?;
    docs.iter().map(|d| Ok(MarkedObject::from_marking(&d.to_marking()?)?)).collect()
}

pub fn parse_model(text: &str) -> Result<StableModel, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("model: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use tropteich::graph::named::theta;

    #[test]
    fn marking_document_round_trip() {
        let g = canonical_form(&theta()).graph;
        let p = Pi1Presentation::reference(&g).unwrap();
        let m = Marking::canonical(&p).act(&GroupMap::from_letters(2, &[&[1, 2], &[-2]]).unwrap()).unwrap();
        let doc = MarkingDocument::from_marking(&m);
        let text = to_json(&doc);
        let back: MarkingDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_marking().unwrap(), m);
        assert_eq!(to_json(&back), text);
    }

    #[test]
    fn non_automorphism_is_rejected() {
        let g = canonical_form(&theta()).graph;
        let p = Pi1Presentation::reference(&g).unwrap();
        let mut doc = MarkingDocument::from_marking(&Marking::canonical(&p));
        doc.images = vec!["x1".into(), "x1".into()];
        assert!(matches!(doc.to_marking(), Err(CliError::Core(tropteich::Error::NotAnAutomorphism))));
        doc.images = vec!["x1".into(), "y2".into()];
        assert!(matches!(doc.to_marking(), Err(CliError::Parse(_))));
    }

    #[test]
    fn model_parse_error_names_field() {
        let err = parse_model(r#"{"nodes": [], "valuation": {"p-adic": {"prime": 2}}}"#).unwrap_err();
        assert!(err.to_string().contains("components"), "{err}");
    }
}
