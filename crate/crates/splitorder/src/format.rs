//! JSON documents for matroids, partitions, orderings and basis sequences.
//!
//! Elements are referred to by string labels. A document without an
//! `elements` list uses the labels `"0"`, .., `"n-1"`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use splitorder_core::matroid::{ExplicitBases, Graphic, Uniform};
use splitorder_core::split::normalize_and_validate;
use splitorder_core::{
    direct_sum, BasisPartition, CyclicOrdering, ElementSet, Hyperedge, Matroid, MatroidOracle,
};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0:?} (expected \"1\")")]
    Version(String),
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("element list has {found} labels but n = {n}")]
    LabelCount { n: usize, found: usize },
    #[error("{kind} document needs the field `{field}`")]
    MissingField { kind: &'static str, field: &'static str },
    #[error("declared rank {declared} differs from the computed rank {computed}")]
    RankMismatch { declared: usize, computed: usize },
    #[error("{0}")]
    Core(#[from] splitorder_core::Error),
}

impl FormatError {
    pub fn is_input_error(&self) -> bool {
        match self {
            FormatError::Core(e) => e.is_input_error(),
            _ => true,
        }
    }
}

/// Element labels and their positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Labels {
    pub fn new(names: Vec<String>) -> Result<Self, FormatError> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(FormatError::DuplicateLabel(name.clone()));
            }
        }
        Ok(Labels { names, index })
    }

    pub fn numbered(n: usize) -> Self {
        Labels::new((0..n).map(|i| i.to_string()).collect()).expect("distinct")
    }

    fn from_document(n: usize, names: Option<&Vec<String>>) -> Result<Self, FormatError> {
        match names {
            None => Ok(Labels::numbered(n)),
            Some(names) if names.len() != n => Err(FormatError::LabelCount { n, found: names.len() }),
            Some(names) => Labels::new(names.clone()),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_numbered(&self) -> bool {
        self.names.iter().enumerate().all(|(i, s)| *s == i.to_string())
    }

    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    pub fn resolve(&self, label: &str) -> Result<usize, FormatError> {
        self.index.get(label).copied().ok_or_else(|| FormatError::UnknownLabel(label.to_string()))
    }

    pub fn resolve_set(&self, labels: &[String]) -> Result<ElementSet, FormatError> {
        let mut set = ElementSet::EMPTY;
        for l in labels {
            if !set.insert(self.resolve(l)?) {
                return Err(FormatError::DuplicateLabel(l.clone()));
            }
        }
        Ok(set)
    }

    pub fn resolve_list(&self, labels: &[String]) -> Result<Vec<usize>, FormatError> {
        labels.iter().map(|l| self.resolve(l)).collect()
    }

    pub fn names_of(&self, set: ElementSet) -> Vec<String> {
        set.iter().map(|e| self.names[e].clone()).collect()
    }

    pub fn names_of_list(&self, list: &[usize]) -> Vec<String> {
        list.iter().map(|&e| self.names[e].clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentKind {
    ElementarySplit,
    Uniform,
    Graphic,
    ExplicitBases,
    DirectSum,
}

impl DocumentKind {
    fn name(self) -> &'static str {
        match self {
            DocumentKind::ElementarySplit => "elementary_split",
            DocumentKind::Uniform => "uniform",
            DocumentKind::Graphic => "graphic",
            DocumentKind::ExplicitBases => "explicit_bases",
            DocumentKind::DirectSum => "direct_sum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperedgeDocument {
    pub members: Vec<String>,
    pub capacity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDocument {
    /// Global label of each of the component's elements, in order.
    pub embedding: Vec<String>,
    pub matroid: MatroidDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatroidDocument {
    pub format_version: String,
    pub kind: DocumentKind,
    pub n: usize,
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperedges: Option<Vec<HyperedgeDocument>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    /// Edge `i` is element `i`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentDocument>>,
}

/// A matroid loaded from a document.
#[derive(Debug, Clone)]
pub struct LoadedMatroid {
    pub oracle: MatroidOracle,
    pub labels: Labels,
    /// Input positions of hyperedges dropped as vacuous.
    pub dropped: Vec<usize>,
}

fn check_version(v: &str) -> Result<(), FormatError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FormatError::Version(v.to_string()))
    }
}

impl MatroidDocument {
    fn bare(kind: DocumentKind, n: usize, r: usize, labels: &Labels) -> Self {
        MatroidDocument {
            format_version: FORMAT_VERSION.into(),
            kind,
            n,
            r,
            elements: (!labels.is_numbered()).then(|| labels.names().to_vec()),
            hyperedges: None,
            vertices: None,
            edges: None,
            bases: None,
            components: None,
        }
    }

    pub fn load(&self) -> Result<LoadedMatroid, FormatError> {
        check_version(&self.format_version)?;
        let labels = Labels::from_document(self.n, self.elements.as_ref())?;
        let kind = self.kind.name();
        let mut dropped = Vec::new();
        let oracle: MatroidOracle = match self.kind {
            DocumentKind::ElementarySplit => {
                let raw = self.hyperedges.as_ref().ok_or(FormatError::MissingField { kind, field: "hyperedges" })?;
                let hyperedges = raw
                    .iter()
                    .map(|h| Ok(Hyperedge::new(labels.resolve_set(&h.members)?, h.capacity)))
                    .collect::<Result<Vec<_>, FormatError>>()?;
                let normalized = normalize_and_validate(self.n, self.r, hyperedges)?;
                dropped = normalized.dropped;
                normalized.rep.into()
            }
            DocumentKind::Uniform => Uniform::new(self.n, self.r)?.into(),
            DocumentKind::Graphic => {
                let vertices = self.vertices.ok_or(FormatError::MissingField { kind, field: "vertices" })?;
                let edges = self.edges.as_ref().ok_or(FormatError::MissingField { kind, field: "edges" })?;
                if edges.len() != self.n {
                    return Err(FormatError::LabelCount { n: self.n, found: edges.len() });
                }
                Graphic::new(vertices, edges.iter().map(|&[u, v]| (u, v)).collect())?.into()
            }
            DocumentKind::ExplicitBases => {
                let raw = self.bases.as_ref().ok_or(FormatError::MissingField { kind, field: "bases" })?;
                let bases = raw.iter().map(|b| labels.resolve_set(b)).collect::<Result<Vec<_>, _>>()?;
                ExplicitBases::new(self.n, bases)?.into()
            }
            DocumentKind::DirectSum => {
                let raw = self.components.as_ref().ok_or(FormatError::MissingField { kind, field: "components" })?;
                let mut parts = Vec::with_capacity(raw.len());
                for c in raw {
                    let inner = c.matroid.load()?;
                    parts.push((inner.oracle, labels.resolve_list(&c.embedding)?));
                }
                direct_sum(self.n, parts)?
            }
        };
        if oracle.full_rank() != self.r {
            return Err(FormatError::RankMismatch { declared: self.r, computed: oracle.full_rank() });
        }
        Ok(LoadedMatroid { oracle, labels, dropped })
    }

    /// Document describing `oracle` with the given labels.
    pub fn from_oracle(oracle: &MatroidOracle, labels: &Labels) -> Self {
        let (n, r) = (oracle.ground_size(), oracle.full_rank());
        match oracle {
            MatroidOracle::ElementarySplit(rep) => MatroidDocument {
                hyperedges: Some(
                    rep.hyperedges()
                        .iter()
                        .map(|h| HyperedgeDocument { members: labels.names_of(h.set), capacity: h.capacity })
                        .collect(),
                ),
                ..Self::bare(DocumentKind::ElementarySplit, n, r, labels)
            },
            MatroidOracle::Uniform(_) => Self::bare(DocumentKind::Uniform, n, r, labels),
            MatroidOracle::Graphic(g) => MatroidDocument {
                vertices: Some(g.vertices()),
                edges: Some(g.edges().iter().map(|&(u, v)| [u, v]).collect()),
                ..Self::bare(DocumentKind::Graphic, n, r, labels)
            },
            MatroidOracle::ExplicitBases(m) => MatroidDocument {
                bases: Some(m.bases().iter().map(|&b| labels.names_of(b)).collect()),
                ..Self::bare(DocumentKind::ExplicitBases, n, r, labels)
            },
            MatroidOracle::DirectSum(sum) => MatroidDocument {
                components: Some(
                    sum.components()
                        .iter()
                        .map(|c| ComponentDocument {
                            embedding: labels.names_of_list(&c.embedding),
                            matroid: MatroidDocument::from_oracle(&c.matroid, &Labels::numbered(c.embedding.len())),
                        })
                        .collect(),
                ),
                ..Self::bare(DocumentKind::DirectSum, n, r, labels)
            },
        }
    }
}

/// A list of element sets: the parts of a basis partition or the blocks
/// constraining an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDocument {
    pub format_version: String,
    pub parts: Vec<Vec<String>>,
}

impl PartitionDocument {
    pub fn new(parts: &[ElementSet], labels: &Labels) -> Self {
        PartitionDocument {
            format_version: FORMAT_VERSION.into(),
            parts: parts.iter().map(|&p| labels.names_of(p)).collect(),
        }
    }

    pub fn sets(&self, labels: &Labels) -> Result<Vec<ElementSet>, FormatError> {
        check_version(&self.format_version)?;
        self.parts.iter().map(|p| labels.resolve_set(p)).collect()
    }

    pub fn partition<M: Matroid + ?Sized>(&self, m: &M, labels: &Labels) -> Result<BasisPartition, FormatError> {
        Ok(BasisPartition::new(m, self.sets(labels)?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderingDocument {
    pub format_version: String,
    pub order: Vec<String>,
    /// Consecutive blocks of `order`; empty when the ordering has none.
    #[serde(default)]
    pub blocks: Vec<Vec<String>>,
    /// Position of every label in the ground set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
}

impl OrderingDocument {
    pub fn new(ordering: &CyclicOrdering, labels: &Labels) -> Self {
        OrderingDocument {
            format_version: FORMAT_VERSION.into(),
            order: labels.names_of_list(ordering.order()),
            blocks: ordering.blocks().map(|b| labels.names_of_list(b)).collect(),
            elements: Some(labels.names().to_vec()),
        }
    }

    pub fn ordering(&self, labels: &Labels) -> Result<CyclicOrdering, FormatError> {
        check_version(&self.format_version)?;
        let order = labels.resolve_list(&self.order)?;
        let mut bounds = Vec::new();
        if !self.blocks.is_empty() {
            bounds.push(0);
            let flat: Vec<&String> = self.blocks.iter().flatten().collect();
            if flat.len() != self.order.len() || flat.iter().zip(&self.order).any(|(a, b)| *a != b) {
                return Err(FormatError::Core(splitorder_core::Error::InvalidInput(
                    "blocks do not concatenate to the order".into(),
                )));
            }
            for b in &self.blocks {
                bounds.push(bounds.last().unwrap() + b.len());
            }
        }
        Ok(CyclicOrdering::new(order, bounds))
    }
}

/// Two basis sequences for exchange-distance queries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequencePairDocument {
    pub format_version: String,
    pub from: Vec<Vec<String>>,
    pub to: Vec<Vec<String>>,
}

pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text =
        fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn to_pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use splitorder_core::fixtures;

    fn round_trip(oracle: MatroidOracle, labels: Labels) {
        let doc = MatroidDocument::from_oracle(&oracle, &labels);
        let text = to_pretty(&doc);
        let back: MatroidDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        let loaded = back.load().unwrap();
        assert_eq!(loaded.oracle, oracle);
        assert_eq!(loaded.labels, labels);
    }

    #[test]
    fn matroid_documents_round_trip() {
        round_trip(fixtures::sparse_paving_6().into(), Labels::numbered(6));
        round_trip(fixtures::example_ten().into(), Labels::new((1..=10).map(|i| format!("a{i}")).collect()).unwrap());
        round_trip(fixtures::uniform_2_6().into(), Labels::numbered(6));
        round_trip(fixtures::k4_graphic().into(), Labels::numbered(6));
        round_trip(ExplicitBases::from_matroid(&fixtures::k4_paving()).into(), Labels::numbered(6));
        let sum = direct_sum(
            5,
            vec![
                (fixtures::uniform_2_6().into(), vec![0, 1, 2, 3, 4, 5][..0].to_vec()),
            ],
        );
        assert!(sum.is_err());
        let sum = direct_sum(
            4,
            vec![(Uniform::new(2, 1).unwrap().into(), vec![0, 2]), (Uniform::new(2, 2).unwrap().into(), vec![1, 3])],
        )
        .unwrap();
        round_trip(sum, Labels::new(vec!["w".into(), "x".into(), "y".into(), "z".into()]).unwrap());
    }

    #[test]
    fn partition_and_ordering_round_trip() {
        let labels = Labels::new(["a", "b", "c", "d", "e", "f"].map(String::from).to_vec()).unwrap();
        let parts = vec![ElementSet::from_iter([0, 2]), ElementSet::from_iter([1, 4]), ElementSet::from_iter([3, 5])];
        let doc = PartitionDocument::new(&parts, &labels);
        assert_eq!(doc.parts[1], vec!["b", "e"]);
        let back: PartitionDocument = serde_json::from_str(&to_pretty(&doc)).unwrap();
        assert_eq!(back.sets(&labels).unwrap(), parts);

        let ordering = CyclicOrdering::with_uniform_blocks(vec![0, 2, 1, 4, 3, 5], 2);
        let doc = OrderingDocument::new(&ordering, &labels);
        let back: OrderingDocument = serde_json::from_str(&to_pretty(&doc)).unwrap();
        assert_eq!(back.ordering(&labels).unwrap(), ordering);
    }

    #[test]
    fn rejects_bad_documents() {
        let mut doc = MatroidDocument::from_oracle(&fixtures::sparse_paving_6().into(), &Labels::numbered(6));
        doc.format_version = "2".into();
        assert!(matches!(doc.load(), Err(FormatError::Version(_))));
        let mut doc = MatroidDocument::from_oracle(&fixtures::sparse_paving_6().into(), &Labels::numbered(6));
        doc.hyperedges.as_mut().unwrap()[0].members.push("9".into());
        assert!(matches!(doc.load(), Err(FormatError::UnknownLabel(_))));
        let mut doc = MatroidDocument::from_oracle(&fixtures::k4_graphic().into(), &Labels::numbered(6));
        doc.r = 2;
        assert!(matches!(doc.load(), Err(FormatError::RankMismatch { .. })));
        let text = r#"{"format_version":"1","kind":"uniform","n":3,"r":1,"extra":true}"#;
        assert!(serde_json::from_str::<MatroidDocument>(text).is_err());
        let text = r#"{"format_version":"1","kind":"uniform","n":3,"r":1,"elements":["a","a","b"]}"#;
        let doc: MatroidDocument = serde_json::from_str(text).unwrap();
        assert!(matches!(doc.load(), Err(FormatError::DuplicateLabel(_))));
    }

    #[test]
    fn vacuous_hyperedges_are_reported() {
        let text = r#"{"format_version":"1","kind":"elementary_split","n":4,"r":2,
            "hyperedges":[{"members":["0","1"],"capacity":1},{"members":["2","3"],"capacity":2}]}"#;
        let doc: MatroidDocument = serde_json::from_str(text).unwrap();
        let loaded = doc.load().unwrap();
        assert_eq!(loaded.dropped, vec![1]);
    }
}
