//! Input objects: alphabets, words, labeled graphs and the three kinds of
//! shift presentation, plus their JSON document format.
//!
//! Every presentation is compiled to one essential labeled graph on which
//! the rest of the crate operates. Forbidden-word lists become the labeled
//! graph of admissible `(m-1)`-blocks, where `m` is the longest forbidden
//! word.

mod graph;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use graph::{Edge, LabeledGraph};
pub(crate) use graph::tarjan;

use crate::error::{Error, Result};
use crate::report::Report;

/// Ordered finite set of symbol tokens. Declaration order is the order used
/// by every lexicographic construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, u32>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::Malformed(format!("invalid symbol token {s:?}")));
            }
            if index.insert(s.clone(), i as u32).is_some() {
                return Err(Error::Malformed(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, s: u32) -> &str {
        &self.symbols[s as usize]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    /// Splits `text` into symbols. Whitespace-separated text is split on
    /// whitespace; otherwise the text must have exactly one segmentation into
    /// alphabet tokens.
    pub fn tokenize(&self, text: &str) -> Result<Vec<u32>> {
        let trimmed = text.trim();
        if trimmed.split_whitespace().nth(1).is_some() {
            return trimmed
                .split_whitespace()
                .map(|t| self.index_of(t).ok_or_else(|| Error::UndeclaredLabel(t.to_string())))
                .collect();
        }
        let bytes = trimmed.as_bytes();
        let n = bytes.len();
        // ways[i] = number of segmentations of text[i..] (saturating at 2)
        let mut ways = vec![0u8; n + 1];
        let mut choice = vec![None; n + 1];
        ways[n] = 1;
        for i in (0..n).rev() {
            if !trimmed.is_char_boundary(i) {
                continue;
            }
            for (tok, &id) in &self.index {
                if trimmed[i..].starts_with(tok.as_str()) {
                    let w = ways[i + tok.len()];
                    if w > 0 {
                        ways[i] = ways[i].saturating_add(w).min(2);
                        choice[i] = Some((id, tok.len()));
                    }
                }
            }
        }
        match ways[0] {
            0 => Err(Error::Tokenize { text: text.to_string(), reason: "no segmentation into alphabet symbols".into() }),
            1 => {
                let mut out = Vec::new();
                let mut i = 0;
                while i < n {
                    let (id, len) = choice[i].expect("segmentation");
                    out.push(id);
                    i += len;
                }
                Ok(out)
            }
            _ => Err(Error::Tokenize { text: text.to_string(), reason: "ambiguous segmentation; separate symbols with spaces".into() }),
        }
    }

    /// Inverse of [`Alphabet::tokenize`]: symbols are concatenated when every
    /// token is a single character, and space-separated otherwise.
    pub fn render(&self, word: &[u32]) -> String {
        let sep = if self.symbols.iter().all(|s| s.chars().count() == 1) { "" } else { " " };
        word.iter().map(|&s| self.symbol(s)).collect::<Vec<_>>().join(sep)
    }
}

/// A finite block of symbols with the coordinate of its first symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub symbols: Vec<u32>,
    pub origin: i64,
}

impl Word {
    pub fn new(symbols: Vec<u32>) -> Self {
        Word { symbols, origin: 1 }
    }

    pub fn with_origin(symbols: Vec<u32>, origin: i64) -> Self {
        Word { symbols, origin }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Coordinate of the last symbol (`origin - 1` when empty).
    pub fn end(&self) -> i64 {
        self.origin + self.symbols.len() as i64 - 1
    }

    pub fn at(&self, coordinate: i64) -> Option<u32> {
        let i = coordinate - self.origin;
        (i >= 0).then(|| self.symbols.get(i as usize).copied()).flatten()
    }

    /// Sub-block over `[from, to]`, if fully contained.
    pub fn slice(&self, from: i64, to: i64) -> Option<Word> {
        if from < self.origin || to > self.end() || to < from - 1 {
            return None;
        }
        let a = (from - self.origin) as usize;
        let b = (to - self.origin + 1) as usize;
        Some(Word::with_origin(self.symbols[a..b].to_vec(), from))
    }
}

/// Consecutive edges of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub edges: Vec<usize>,
}

impl Path {
    pub fn new(graph: &LabeledGraph, edges: Vec<usize>) -> Result<Self> {
        for &e in &edges {
            if e >= graph.edge_count() {
                return Err(Error::Malformed(format!("edge id {e} out of range")));
            }
        }
        for w in edges.windows(2) {
            if graph.edge(w[0]).trg != graph.edge(w[1]).src {
                return Err(Error::Malformed(format!("edges {} and {} are not consecutive", w[0], w[1])));
            }
        }
        Ok(Path { edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn src(&self, graph: &LabeledGraph) -> Option<usize> {
        self.edges.first().map(|&e| graph.edge(e).src)
    }

    pub fn trg(&self, graph: &LabeledGraph) -> Option<usize> {
        self.edges.last().map(|&e| graph.edge(e).trg)
    }

    pub fn labels(&self, graph: &LabeledGraph) -> Vec<u32> {
        self.edges.iter().map(|&e| graph.edge(e).label).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PresentationKind {
    #[serde(rename = "edge-shift")]
    EdgeShift,
    #[serde(rename = "labeled-sofic")]
    LabeledSofic,
    #[serde(rename = "forbidden")]
    Forbidden,
}

/// A validated shift presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    kind: PresentationKind,
    declared: Option<LabeledGraph>,
    forbidden: Vec<Vec<u32>>,
    essential: LabeledGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct EdgeDoc {
    pub src: String,
    pub trg: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct PresentationDoc {
    pub alphabet: Vec<String>,
    pub kind: PresentationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<String>>,
}

/// Parses the JSON presentation document.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let doc: PresentationDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    Presentation::from_doc(doc)
}

impl Presentation {
    pub(crate) fn from_doc(doc: PresentationDoc) -> Result<Self> {
        let alphabet = Alphabet::new(doc.alphabet)?;
        match doc.kind {
            PresentationKind::Forbidden => {
                if doc.vertices.is_some() || doc.edges.is_some() {
                    return Err(Error::Malformed("forbidden kind takes no vertices or edges".into()));
                }
                let list = doc.forbidden.ok_or_else(|| Error::Malformed("missing field `forbidden`".into()))?;
                let words = list.iter().map(|w| alphabet.tokenize(w)).collect::<Result<Vec<_>>>()?;
                Presentation::forbidden(alphabet, words)
            }
            kind => {
                if doc.forbidden.is_some() {
                    return Err(Error::Malformed("graph kinds take no forbidden list".into()));
                }
                let vertices = doc.vertices.ok_or_else(|| Error::Malformed("missing field `vertices`".into()))?;
                let edge_docs = doc.edges.ok_or_else(|| Error::Malformed("missing field `edges`".into()))?;
                let mut vindex = HashMap::new();
                for (i, v) in vertices.iter().enumerate() {
                    if vindex.insert(v.clone(), i).is_some() {
                        return Err(Error::Malformed(format!("duplicate vertex {v:?}")));
                    }
                }
                let mut edges = Vec::with_capacity(edge_docs.len());
                for e in &edge_docs {
                    let src = *vindex.get(&e.src).ok_or_else(|| Error::UndeclaredVertex(e.src.clone()))?;
                    let trg = *vindex.get(&e.trg).ok_or_else(|| Error::UndeclaredVertex(e.trg.clone()))?;
                    let label = alphabet.index_of(&e.label).ok_or_else(|| Error::UndeclaredLabel(e.label.clone()))?;
                    edges.push(Edge { src, trg, label });
                }
                let graph = LabeledGraph::new(vertices, edges);
                Presentation::from_graph(alphabet, kind, graph)
            }
        }
    }

    /// Builds a graph presentation. For the edge-shift kind every edge must
    /// carry its own distinct name as label.
    pub fn from_graph(alphabet: Alphabet, kind: PresentationKind, graph: LabeledGraph) -> Result<Self> {
        if kind == PresentationKind::Forbidden {
            return Err(Error::Malformed("use Presentation::forbidden".into()));
        }
        for e in graph.edges() {
            if e.src >= graph.vertex_count() || e.trg >= graph.vertex_count() {
                return Err(Error::UndeclaredVertex(format!("#{}", e.src.max(e.trg))));
            }
            if e.label as usize >= alphabet.len() {
                return Err(Error::UndeclaredLabel(format!("#{}", e.label)));
            }
        }
        if kind == PresentationKind::EdgeShift {
            let mut seen = vec![false; alphabet.len()];
            for e in graph.edges() {
                if std::mem::replace(&mut seen[e.label as usize], true) {
                    return Err(Error::Malformed(format!(
                        "edge-shift edge name {:?} used twice",
                        alphabet.symbol(e.label)
                    )));
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::Malformed("edge-shift alphabet must equal the set of edge names".into()));
            }
        }
        let (essential, removed, removed_edges) = graph.trim();
        if !removed.is_empty() || !removed_edges.is_empty() {
            log::warn!(
                "trimmed {} stranded vertices ({}) and {} edges",
                removed.len(),
                removed.join(", "),
                removed_edges.len()
            );
        }
        Ok(Presentation { alphabet, kind, declared: Some(graph), forbidden: Vec::new(), essential })
    }

    /// The subshift of finite type avoiding every word of `forbidden`.
    pub fn forbidden(alphabet: Alphabet, forbidden: Vec<Vec<u32>>) -> Result<Self> {
        if forbidden.iter().any(Vec::is_empty) {
            return Err(Error::Malformed("empty forbidden word".into()));
        }
        if forbidden.iter().flatten().any(|&s| s as usize >= alphabet.len()) {
            return Err(Error::UndeclaredLabel("forbidden word symbol".into()));
        }
        let graph = block_graph(&alphabet, &forbidden);
        let (essential, _, _) = graph.trim();
        Ok(Presentation { alphabet, kind: PresentationKind::Forbidden, declared: None, forbidden, essential })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> PresentationKind {
        self.kind
    }

    /// The graph as declared (graph kinds only), before trimming.
    pub fn declared_graph(&self) -> Option<&LabeledGraph> {
        self.declared.as_ref()
    }

    pub fn forbidden_words(&self) -> &[Vec<u32>] {
        &self.forbidden
    }

    /// The essential labeled graph all algorithms run on. For the
    /// forbidden kind this is the trimmed graph of admissible blocks.
    pub fn graph(&self) -> &LabeledGraph {
        &self.essential
    }

    /// True when labels determine paths (edge shifts and block graphs), so
    /// label-sequence counts coincide with path counts.
    pub fn labels_are_edges(&self) -> bool {
        matches!(self.kind, PresentationKind::EdgeShift | PresentationKind::Forbidden)
    }

    pub(crate) fn to_doc(&self) -> PresentationDoc {
        let alphabet = self.alphabet.symbols.clone();
        match &self.declared {
            Some(g) => PresentationDoc {
                alphabet,
                kind: self.kind,
                vertices: Some(g.vertex_names().to_vec()),
                edges: Some(
                    g.edges()
                        .iter()
                        .map(|e| EdgeDoc {
                            src: g.vertex_name(e.src).to_string(),
                            trg: g.vertex_name(e.trg).to_string(),
                            label: self.alphabet.symbol(e.label).to_string(),
                        })
                        .collect(),
                ),
                forbidden: None,
            },
            None => PresentationDoc {
                alphabet,
                kind: self.kind,
                vertices: None,
                edges: None,
                forbidden: Some(self.forbidden.iter().map(|w| self.alphabet.render(w)).collect()),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("presentation serializes")
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("presentation serializes")
    }
}

/// Graph of admissible `(m-1)`-blocks; the edge `b -> b[1..]σ` carries `σ`.
fn block_graph(alphabet: &Alphabet, forbidden: &[Vec<u32>]) -> LabeledGraph {
    let m = forbidden.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let k = alphabet.len() as u32;
    let clean_suffixes = |w: &[u32]| forbidden.iter().all(|f| !w.ends_with(f));
    // enumerate admissible (m-1)-blocks in lexicographic order
    let mut blocks: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..m - 1 {
        let mut next = Vec::new();
        for b in &blocks {
            for s in 0..k {
                let mut w = b.clone();
                w.push(s);
                if clean_suffixes(&w) {
                    next.push(w);
                }
            }
        }
        blocks = next;
    }
    let index: HashMap<&[u32], usize> = blocks.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();
    let mut edges = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        for s in 0..k {
            let mut w = b.clone();
            w.push(s);
            if !clean_suffixes(&w) {
                continue;
            }
            let t = &w[1..];
            if let Some(&j) = index.get(t) {
                edges.push(Edge { src: i, trg: j, label: s });
            }
        }
    }
    let names = blocks.iter().map(|b| if b.is_empty() { "ε".to_string() } else { alphabet.render(b) }).collect();
    LabeledGraph::new(names, edges)
}

/// Structural diagnostics for a presentation.
pub fn validate(p: &Presentation) -> Report {
    let mut report = Report::new("validate");
    match &p.declared {
        Some(g) => {
            let (_, removed, removed_edges) = g.trim();
            report.push(
                "essential",
                removed.is_empty() && removed_edges.is_empty(),
                json!({ "stranded_vertices": removed, "stranded_edges": removed_edges }),
            );
        }
        None => report.push("essential", true, json!({ "compiled_from": "forbidden" })),
    }
    report.push(
        "nonempty",
        p.essential.edge_count() > 0,
        json!({ "essential_vertices": p.essential.vertex_count(), "essential_edges": p.essential.edge_count() }),
    );
    let graph = p.declared.as_ref().unwrap_or(&p.essential);
    let violation = graph.right_resolving_violation();
    report.push(
        "right_resolving",
        violation.is_none(),
        match violation {
            Some((v, label, e1, e2)) => json!({
                "vertex": graph.vertex_name(v),
                "label": p.alphabet.symbol(label),
                "edges": [e1, e2],
            }),
            None => json!(null),
        },
    );
    report
}

/// Edge-count matrix of a graph, rows and columns in vertex order.
pub fn adjacency_matrix(g: &LabeledGraph) -> Vec<Vec<u64>> {
    g.adjacency_matrix()
}
