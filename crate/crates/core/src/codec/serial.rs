//! JSON form of an embedding code. Loading re-verifies every stored
//! certificate and structural property; nothing is trusted.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::orbits::{OrbitMatch, OrbitPair};
use super::{EmbeddingCode, WindowCalibration};
use crate::error::{Error, Result};
use crate::fischer::FischerCover;
use crate::invariants::periodic_word_present;
use crate::language::LanguageIndex;
use crate::marker::{
    certificates, payload_index, AvoidanceIndex, BlockLengthChoice, ConnectorTable, MarkerCase, MarkerKit, MarkerPath,
    PayloadContext, CONNECTOR_SEARCH_BOUND,
};
use crate::necklace::{least_rotation, primitive_period};
use crate::presentations::{Presentation, PresentationDoc};

/// Largest block length a code may declare.
pub const MAX_ELL: usize = 64;
/// Largest window radius a code may declare.
pub const MAX_WINDOW: usize = 1 << 20;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeDoc {
    x: Value,
    cover: Value,
    marker: MarkerDoc,
    connectors: ConnectorDoc,
    ell: usize,
    orbit_match: Vec<PairDoc>,
    window: usize,
    certificates: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkerDoc {
    edges: Vec<usize>,
    label: String,
    #[serde(rename = "L")]
    l: usize,
    #[serde(default)]
    cycle: Vec<usize>,
    #[serde(default)]
    case: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectorDoc {
    #[serde(rename = "K")]
    k: usize,
    table: BTreeMap<String, Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    n: usize,
    from: Vec<String>,
    to: Vec<usize>,
    phase: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificatesDoc {
    block_lengths: Vec<Value>,
    pumped: usize,
    window: WindowDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowDoc {
    radius: usize,
    slack: usize,
    samples: usize,
    sliding_checks: usize,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidCode(msg.into())
}

impl EmbeddingCode {
    pub fn to_value(&self) -> Value {
        let c = &self.cover;
        let kit = &self.kit;
        let mut marker = kit.marker.to_value(c);
        marker["cycle"] = json!(kit.marker.cycle);
        marker["case"] = json!(match kit.marker.case {
            MarkerCase::Loop => "loop",
            MarkerCase::Cycle => "cycle",
        });
        let alphabet = self.x.alphabet();
        let pairs: Vec<Value> = self
            .orbit_match
            .pairs
            .iter()
            .map(|p| {
                json!({
                    "n": p.n,
                    "from": p.from.iter().map(|&s| alphabet.symbol(s)).collect::<Vec<_>>(),
                    "to": p.to,
                    "phase": p.phase,
                })
            })
            .collect();
        let cal = &self.calibration;
        json!({
            "x": self.x.to_value(),
            "cover": c.to_value(),
            "marker": marker,
            "connectors": kit.connectors.to_value(c),
            "ell": kit.choice.ell,
            "orbit_match": pairs,
            "window": self.window,
            "certificates": {
                "block_lengths": kit.choice.certificates.iter().map(|c| c.to_value()).collect::<Vec<_>>(),
                "pumped": kit.pumped,
                "window": {
                    "radius": cal.radius,
                    "slack": cal.slack,
                    "samples": cal.samples,
                    "sliding_checks": cal.sliding_checks,
                },
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("code serializes")
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let doc: CodeDoc = serde_json::from_value(value.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
        let xdoc: PresentationDoc = serde_json::from_value(doc.x).map_err(|e| Error::Malformed(e.to_string()))?;
        let x = Presentation::from_doc(xdoc)?;
        if x.graph().edge_count() == 0 {
            return Err(invalid("X is empty"));
        }
        let cover = FischerCover::from_value(&doc.cover)?;
        let marker = load_marker(&cover, &doc.marker)?;
        let connectors = load_connectors(&cover, &marker, &doc.connectors)?;
        let ell = doc.ell;
        let (lm, k) = (marker.len(), connectors.k);
        if ell > MAX_ELL || ell <= 2 * (lm + k) {
            return Err(invalid(format!("block length {ell} outside ({}, {MAX_ELL}]", 2 * (lm + k))));
        }
        let certs: CertificatesDoc =
            serde_json::from_value(doc.certificates).map_err(|e| Error::Malformed(e.to_string()))?;
        let words = LanguageIndex::new(&x, 4 * ell);
        let max_pay = 4 * ell - lm - 2 * k;
        let plain = AvoidanceIndex::paths(&cover, &marker, max_pay);
        let usable = payload_index(&cover, &marker, &connectors, &PayloadContext::Marker, max_pay);
        let fresh = certificates(&words, &plain, &usable, ell, lm, k)
            .map_err(|l| invalid(format!("certificate fails at block length {l}")))?;
        let stored: Vec<Value> = fresh.iter().map(|c| c.to_value()).collect();
        if stored != certs.block_lengths {
            return Err(invalid("stored certificates differ from recomputed ones"));
        }
        let choice = BlockLengthChoice { ell, marker_len: lm, k, certificates: fresh };
        let kit = MarkerKit { marker, connectors, choice, pumped: certs.pumped };
        let mut pairs = Vec::new();
        for p in &doc.orbit_match {
            let from = p
                .from
                .iter()
                .map(|t| x.alphabet().index_of(t).ok_or_else(|| Error::UndeclaredLabel(t.clone())))
                .collect::<Result<Vec<u32>>>()?;
            pairs.push(OrbitPair { n: p.n, from, to: p.to.clone(), phase: p.phase });
        }
        let orbit_match = OrbitMatch { pairs };
        check_orbit_match(&x, &cover, ell, &orbit_match)?;
        if doc.window < 3 * ell || doc.window > MAX_WINDOW {
            return Err(invalid(format!("window {} outside [{}, {MAX_WINDOW}]", doc.window, 3 * ell)));
        }
        let w = certs.window;
        Ok(EmbeddingCode {
            x,
            cover,
            kit,
            orbit_match,
            window: doc.window,
            calibration: WindowCalibration {
                radius: w.radius,
                slack: w.slack,
                samples: w.samples,
                sliding_checks: w.sliding_checks,
            },
            runtime: OnceLock::new(),
        })
    }
}

/// Parses and re-verifies a serialized embedding code.
pub fn parse_embedding_code(text: &str) -> Result<EmbeddingCode> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    EmbeddingCode::from_value(&value)
}

fn load_marker(c: &FischerCover, doc: &MarkerDoc) -> Result<MarkerPath> {
    if doc.edges.len() > 4 * MAX_ELL || doc.cycle.len() > 4 * MAX_ELL {
        return Err(invalid("marker too long"));
    }
    let case = match doc.case.as_deref() {
        Some("loop") => MarkerCase::Loop,
        Some("cycle") | None => MarkerCase::Cycle,
        Some(other) => return Err(invalid(format!("unknown marker case {other:?}"))),
    };
    if doc.cycle.iter().any(|&e| e >= c.edge_count()) {
        return Err(invalid("marker cycle edge out of range"));
    }
    let m = MarkerPath::from_edges(c, doc.edges.clone(), doc.cycle.clone(), case)?;
    if !m.is_valid() {
        return Err(invalid("marker is not prefix-suffix-free and synchronizing"));
    }
    if m.len() != doc.l || c.alphabet().render(&m.label) != doc.label {
        return Err(invalid("marker length or label disagrees with its edges"));
    }
    Ok(m)
}

fn load_connectors(c: &FischerCover, a: &MarkerPath, doc: &ConnectorDoc) -> Result<ConnectorTable> {
    let g = c.graph();
    let n = c.vertex_count();
    if doc.k > CONNECTOR_SEARCH_BOUND {
        return Err(invalid("connector length exceeds the search bound"));
    }
    if doc.table.len() != n * n {
        return Err(invalid("connector table must list every ordered pair of vertices"));
    }
    let names: HashMap<&str, usize> = (0..n).map(|v| (g.vertex_name(v), v)).collect();
    let mut paths = vec![vec![None; n]; n];
    for (key, edges) in &doc.table {
        let split = key
            .match_indices('|')
            .map(|(i, _)| (&key[..i], &key[i + 1..]))
            .find_map(|(u, w)| Some((*names.get(u)?, *names.get(w)?)))
            .ok_or_else(|| invalid(format!("connector key {key:?} names no vertex pair")))?;
        let (u, w) = split;
        let path = crate::presentations::Path::new(g, edges.clone())?;
        let ends_ok = if edges.is_empty() { u == w } else { path.src(g) == Some(u) && path.trg(g) == Some(w) };
        if edges.len() != doc.k || !ends_ok {
            return Err(invalid(format!("connector {key:?} is not a path of length {} between its ends", doc.k)));
        }
        let kmp = crate::marker::Kmp::new(a.label.clone());
        if !kmp.occurrences(&path.labels(g)).is_empty() {
            return Err(invalid(format!("connector {key:?} contains the marker label")));
        }
        if paths[u][w].replace(edges.clone()).is_some() {
            return Err(invalid(format!("connector {key:?} listed twice")));
        }
    }
    let paths = paths.into_iter().map(|row| row.into_iter().map(|p| p.expect("all pairs present")).collect()).collect();
    Ok(ConnectorTable::from_paths(doc.k, paths))
}

/// Structural checks on an orbit matching: periods within `[1, ℓ]`, Lyndon
/// sources that are periodic points of `X`, closed primitive target cycles,
/// no source listed twice.
pub(crate) fn check_orbit_match(x: &Presentation, c: &FischerCover, ell: usize, m: &OrbitMatch) -> Result<()> {
    let g = c.graph();
    let mut seen = std::collections::HashSet::new();
    for p in &m.pairs {
        let n = p.n;
        if n == 0 || n > ell || p.from.len() != n || p.to.len() != n || p.phase >= n {
            return Err(invalid(format!("orbit pair of period {n} has inconsistent lengths")));
        }
        if least_rotation(&p.from) != 0 || primitive_period(&p.from) != n {
            return Err(invalid("orbit source is not a Lyndon word"));
        }
        if !periodic_word_present(x.graph(), &p.from) {
            return Err(invalid("orbit source is not a periodic point of X"));
        }
        if p.to.iter().any(|&e| e >= c.edge_count()) {
            return Err(invalid("orbit target edge out of range"));
        }
        let closed = (0..n).all(|k| g.edge(p.to[k]).trg == g.edge(p.to[(k + 1) % n]).src);
        if !closed || primitive_period(&c.labels(&p.to)) != n {
            return Err(invalid("orbit target is not a cycle whose label has the stated least period"));
        }
        if !seen.insert(p.from.clone()) {
            return Err(invalid("orbit source matched twice"));
        }
    }
    Ok(())
}
