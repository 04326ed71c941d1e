//! The right Fischer cover of an irreducible sofic shift: the minimal
//! right-resolving presentation, whose vertices are the follower sets of
//! synchronizing words.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::language::SubsetDfa;
use crate::necklace::for_each_lyndon;
use crate::presentations::{
    tarjan, Alphabet, Edge, EdgeDoc, LabeledGraph, Presentation, PresentationKind, Word,
};
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FischerCover {
    alphabet: Alphabet,
    graph: LabeledGraph,
    delta: Vec<Vec<Option<usize>>>,
    back_map: Vec<Vec<u32>>,
    separation_depth: usize,
}

/// Partition refinement of a partial deterministic automaton: states are
/// equivalent iff they accept the same words. Returns the class of every
/// state and the number of rounds that split some class, which bounds the
/// length of the shortest distinguishing word.
pub(crate) fn refine(states: usize, symbols: usize, step: impl Fn(usize, u32) -> Option<usize>) -> (Vec<usize>, usize) {
    let mut class = vec![0usize; states];
    let mut count = usize::from(states > 0);
    let mut rounds = 0;
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = Vec::with_capacity(states);
        for q in 0..states {
            let mut sig = Vec::with_capacity(symbols + 1);
            sig.push(class[q]);
            sig.extend((0..symbols as u32).map(|s| step(q, s).map_or(usize::MAX, |t| class[t])));
            let fresh = ids.len();
            next.push(*ids.entry(sig).or_insert(fresh));
        }
        if ids.len() == count {
            return (class, rounds);
        }
        count = ids.len();
        class = next;
        rounds += 1;
    }
}

/// Builds the Fischer cover of an irreducible presentation.
pub fn build_fischer_cover(p: &Presentation) -> Result<FischerCover> {
    let g = p.graph();
    if g.edge_count() == 0 {
        return Err(Error::EmptyLanguage);
    }
    let sccs = g.strongly_connected_components();
    if sccs.len() > 1 {
        return Err(Error::Reducible {
            components: sccs.len(),
            condensation: sccs
                .iter()
                .rev()
                .map(|c| c.iter().map(|&v| g.vertex_name(v).to_string()).collect())
                .collect(),
        });
    }
    let k = p.alphabet().len();
    let dfa = SubsetDfa::new(g, k);
    let (class, _) = refine(dfa.state_count(), k, |q, s| dfa.step(q, s));
    let classes = class.iter().max().map_or(0, |m| m + 1);
    let mut rep = vec![usize::MAX; classes];
    for q in 0..dfa.state_count() {
        let c = class[q];
        if rep[c] == usize::MAX || dfa.vertices(q).len() < dfa.vertices(rep[c]).len() {
            rep[c] = q;
        }
    }
    let qstep = |c: usize, s: u32| dfa.step(rep[c], s).map(|t| class[t]);
    let succ: Vec<Vec<usize>> = (0..classes).map(|c| (0..k as u32).filter_map(|s| qstep(c, s)).collect()).collect();
    let comps = tarjan(&succ);
    let mut comp_of = vec![0; classes];
    for (i, comp) in comps.iter().enumerate() {
        for &c in comp {
            comp_of[c] = i;
        }
    }
    let terminal: Vec<usize> =
        (0..comps.len()).filter(|&i| comps[i].iter().all(|&c| succ[c].iter().all(|&t| comp_of[t] == i))).collect();
    let [terminal] = terminal[..] else {
        return Err(Error::DegenerateCover(format!("{} terminal components in the follower automaton", terminal.len())));
    };

    // number cover vertices in breadth-first discovery order from the start
    let mut order = vec![usize::MAX; classes];
    let mut members = Vec::new();
    let mut seen = vec![false; classes];
    let mut queue = VecDeque::from([class[0]]);
    seen[class[0]] = true;
    while let Some(c) = queue.pop_front() {
        if comp_of[c] == terminal {
            order[c] = members.len();
            members.push(c);
        }
        for s in 0..k as u32 {
            if let Some(t) = qstep(c, s) {
                if !std::mem::replace(&mut seen[t], true) {
                    queue.push_back(t);
                }
            }
        }
    }

    let mut names: Vec<String> = members
        .iter()
        .map(|&c| {
            let set: Vec<&str> = dfa.vertices(rep[c]).iter().map(|&v| g.vertex_name(v)).collect();
            format!("{{{}}}", set.join(","))
        })
        .collect();
    dedup_names(&mut names);
    let mut edges = Vec::new();
    for &c in &members {
        for s in 0..k as u32 {
            if let Some(t) = qstep(c, s) {
                edges.push(Edge { src: order[c], trg: order[t], label: s });
            }
        }
    }
    let graph = LabeledGraph::new(names, edges);
    FischerCover::assemble(p.alphabet().clone(), graph)
}

fn dedup_names(names: &mut [String]) {
    let mut seen: HashMap<String, usize> = HashMap::new();
    for name in names.iter_mut() {
        let n = seen.entry(name.clone()).or_insert(0);
        *n += 1;
        if *n > 1 {
            name.push_str(&format!("#{n}"));
        }
    }
}

impl FischerCover {
    /// Completes a right-resolving, follower-separated, strongly connected
    /// graph into a cover: fills δ, the separation depth and the back map.
    fn assemble(alphabet: Alphabet, graph: LabeledGraph) -> Result<Self> {
        let k = alphabet.len();
        let mut delta = vec![vec![None; k]; graph.vertex_count()];
        for (i, e) in graph.edges().iter().enumerate() {
            if e.label as usize >= k {
                return Err(Error::UndeclaredLabel(format!("#{}", e.label)));
            }
            let slot = &mut delta[e.src][e.label as usize];
            if slot.is_some() {
                return Err(Error::DegenerateCover(format!(
                    "vertex {} has two out-edges labeled {}",
                    graph.vertex_name(e.src),
                    alphabet.symbol(e.label)
                )));
            }
            *slot = Some(i);
        }
        let (class, rounds) = refine(graph.vertex_count(), k, |v, s| delta[v][s as usize].map(|e| graph.edge(e).trg));
        if class.iter().enumerate().any(|(v, &c)| v != c) {
            return Err(Error::DegenerateCover("two vertices have equal follower sets".into()));
        }
        if !graph.is_strongly_connected() || graph.edge_count() == 0 {
            return Err(Error::DegenerateCover("cover is not strongly connected".into()));
        }
        let mut cover = FischerCover { alphabet, graph, delta, back_map: Vec::new(), separation_depth: rounds };
        cover.back_map = cover.synchronizing_words()?;
        Ok(cover)
    }

    /// Shortest word (lexicographically least among shortest) whose image
    /// of the whole vertex set is exactly `{v}`, for each vertex `v`.
    fn synchronizing_words(&self) -> Result<Vec<Vec<u32>>> {
        let n = self.vertex_count();
        let all: Vec<usize> = (0..n).collect();
        let mut found: Vec<Option<Vec<u32>>> = vec![None; n];
        let mut remaining = n;
        let mut seen: HashMap<Vec<usize>, ()> = HashMap::from([(all.clone(), ())]);
        let mut queue = VecDeque::from([(all, Vec::new())]);
        while let Some((set, word)) = queue.pop_front() {
            if let [v] = set[..] {
                if found[v].is_none() {
                    found[v] = Some(word.clone());
                    remaining -= 1;
                    if remaining == 0 {
                        break;
                    }
                }
            }
            for s in 0..self.alphabet.len() as u32 {
                let next = self.image(&set, &[s]);
                if !next.is_empty() && seen.insert(next.clone(), ()).is_none() {
                    let mut w = word.clone();
                    w.push(s);
                    queue.push_back((next, w));
                }
            }
        }
        found
            .into_iter()
            .enumerate()
            .map(|(v, w)| {
                w.ok_or_else(|| {
                    Error::DegenerateCover(format!("no synchronizing word lands on {}", self.graph.vertex_name(v)))
                })
            })
            .collect()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// The out-edge of `v` labeled `s`, if any.
    pub fn edge_from(&self, v: usize, s: u32) -> Option<usize> {
        self.delta[v].get(s as usize).copied().flatten()
    }

    pub fn step(&self, v: usize, s: u32) -> Option<usize> {
        self.edge_from(v, s).map(|e| self.graph.edge(e).trg)
    }

    /// Iterated δ.
    pub fn transition(&self, v: usize, w: &[u32]) -> Option<usize> {
        w.iter().try_fold(v, |v, &s| self.step(v, s))
    }

    /// The path from `v` labeled `w`, as edge ids.
    pub fn path_from(&self, v: usize, w: &[u32]) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(w.len());
        let mut v = v;
        for &s in w {
            let e = self.edge_from(v, s)?;
            out.push(e);
            v = self.graph.edge(e).trg;
        }
        Some(out)
    }

    /// φ: edge to label.
    pub fn label(&self, e: usize) -> u32 {
        self.graph.edge(e).label
    }

    pub fn labels(&self, path: &[usize]) -> Vec<u32> {
        path.iter().map(|&e| self.label(e)).collect()
    }

    /// Image of a vertex set under reading `w`, sorted.
    pub fn image(&self, from: &[usize], w: &[u32]) -> Vec<usize> {
        let mut out: Vec<usize> = from.iter().filter_map(|&v| self.transition(v, w)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn image_of_all(&self, w: &[u32]) -> Vec<usize> {
        let all: Vec<usize> = (0..self.vertex_count()).collect();
        self.image(&all, w)
    }

    /// Synchronizing word landing on each vertex.
    pub fn back_map(&self) -> &[Vec<u32>] {
        &self.back_map
    }

    /// Length of the longest word needed to separate two vertices.
    pub fn separation_depth(&self) -> usize {
        self.separation_depth
    }

    /// The cover viewed as a labeled-sofic presentation of the same shift.
    pub fn presentation(&self) -> Presentation {
        Presentation::from_graph(self.alphabet.clone(), PresentationKind::LabeledSofic, self.graph.clone())
            .expect("cover graph is a valid presentation")
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self.to_doc()).expect("cover serializes")
    }

    fn to_doc(&self) -> CoverDoc {
        let g = &self.graph;
        CoverDoc {
            alphabet: self.alphabet.symbols().to_vec(),
            kind: PresentationKind::LabeledSofic,
            vertices: g.vertex_names().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    src: g.vertex_name(e.src).to_string(),
                    trg: g.vertex_name(e.trg).to_string(),
                    label: self.alphabet.symbol(e.label).to_string(),
                })
                .collect(),
            back_map: (0..g.vertex_count())
                .map(|v| (g.vertex_name(v).to_string(), self.alphabet.render(&self.back_map[v])))
                .collect(),
        }
    }

    /// Loads a serialized cover and re-verifies every cover property:
    /// right-resolving, follower-separated, strongly connected, and each
    /// back-map word synchronizing onto its vertex.
    pub fn from_value(value: &Value) -> Result<Self> {
        let doc: CoverDoc = serde_json::from_value(value.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
        if doc.kind != PresentationKind::LabeledSofic {
            return Err(Error::Malformed("cover must be of kind labeled-sofic".into()));
        }
        let alphabet = Alphabet::new(doc.alphabet)?;
        let mut vindex = HashMap::new();
        for (i, v) in doc.vertices.iter().enumerate() {
            if vindex.insert(v.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate vertex {v:?}")));
            }
        }
        let mut edges = Vec::new();
        for e in &doc.edges {
            edges.push(Edge {
                src: *vindex.get(&e.src).ok_or_else(|| Error::UndeclaredVertex(e.src.clone()))?,
                trg: *vindex.get(&e.trg).ok_or_else(|| Error::UndeclaredVertex(e.trg.clone()))?,
                label: alphabet.index_of(&e.label).ok_or_else(|| Error::UndeclaredLabel(e.label.clone()))?,
            });
        }
        let graph = LabeledGraph::new(doc.vertices.clone(), edges);
        let mut cover = FischerCover::assemble(alphabet, graph)?;
        if doc.back_map.len() != cover.vertex_count() {
            return Err(Error::Malformed("back_map must name every vertex".into()));
        }
        for (name, word) in &doc.back_map {
            let v = *vindex.get(name).ok_or_else(|| Error::UndeclaredVertex(name.clone()))?;
            let w = cover.alphabet.tokenize(word)?;
            if cover.image_of_all(&w) != [v] {
                return Err(Error::Malformed(format!("back_map word for {name} is not synchronizing onto it")));
            }
            cover.back_map[v] = w;
        }
        Ok(cover)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverDoc {
    alphabet: Vec<String>,
    kind: PresentationKind,
    vertices: Vec<String>,
    edges: Vec<EdgeDoc>,
    back_map: BTreeMap<String, String>,
}

pub fn cover_transition(c: &FischerCover, v: usize, w: &Word) -> Option<usize> {
    c.transition(v, &w.symbols)
}

fn edge_witness(c: &FischerCover, v: usize, label: u32, e1: usize, e2: usize) -> Value {
    let g = c.graph();
    json!({
        "vertex": g.vertex_name(v),
        "label": c.alphabet().symbol(label),
        "edges": [e1, e2],
        "ends": [
            [g.vertex_name(g.edge(e1).src), g.vertex_name(g.edge(e1).trg)],
            [g.vertex_name(g.edge(e2).src), g.vertex_name(g.edge(e2).trg)],
        ],
    })
}

/// Structural verdicts of a cover. `left_closing` is diagnostic only.
pub fn structural_report(c: &FischerCover) -> Report {
    let g = c.graph();
    let mut r = Report::new("structure");
    let right = g.right_resolving_violation();
    r.push(
        "right_resolving",
        right.is_none(),
        right.map_or(Value::Null, |(v, s, e1, e2)| edge_witness(c, v, s, e1, e2)),
    );
    let left = g.left_resolving_violation();
    r.push(
        "left_resolving",
        left.is_none(),
        left.map_or(Value::Null, |(v, s, e1, e2)| edge_witness(c, v, s, e1, e2)),
    );
    r.push("follower_separated", true, json!({ "separation_depth": c.separation_depth() }));
    let sccs = g.strongly_connected_components();
    r.push(
        "strongly_connected",
        sccs.len() == 1,
        json!({ "components": sccs.iter().map(|s| s.iter().map(|&v| g.vertex_name(v)).collect::<Vec<_>>()).collect::<Vec<_>>() }),
    );
    let period = g.period();
    r.push(
        "aperiodic",
        period == 1,
        json!({ "period": period, "cycle_lengths": g.closed_walk_lengths(2 * g.vertex_count().max(1)) }),
    );
    let closing = left_closing_violation(c);
    r.note("left_closing", closing.is_none(), closing.unwrap_or(Value::Null));
    r
}

/// Searches the pair graph for two distinct left-infinite paths with equal
/// labels ending at a common vertex: an off-diagonal cycle from which an
/// off-diagonal pair with equally labeled edges into one vertex is
/// reachable.
fn left_closing_violation(c: &FischerCover) -> Option<Value> {
    let g = c.graph();
    let n = g.vertex_count();
    let id = |u: usize, v: usize| u * n + v;
    let mut succ = vec![Vec::new(); n * n];
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            for s in 0..c.alphabet().len() as u32 {
                if let (Some(a), Some(b)) = (c.step(u, s), c.step(v, s)) {
                    if a != b {
                        succ[id(u, v)].push((id(a, b), s));
                    }
                }
            }
        }
    }
    // merging pairs: u != v with out-edges of equal label into one vertex
    let merging = |p: usize| {
        let (u, v) = (p / n, p % n);
        if u == v {
            return None;
        }
        (0..c.alphabet().len() as u32)
            .find(|&s| matches!((c.step(u, s), c.step(v, s)), (Some(a), Some(b)) if a == b))
            .map(|s| (s, c.step(u, s).unwrap()))
    };
    let plain: Vec<Vec<usize>> = succ.iter().map(|l| l.iter().map(|&(t, _)| t).collect()).collect();
    for comp in tarjan(&plain) {
        let cyclic = comp.len() > 1 || plain[comp[0]].contains(&comp[0]);
        if !cyclic || comp[0] / n == comp[0] % n {
            continue;
        }
        // BFS from the cycle to a merging pair
        let start = comp[0];
        let mut parent: HashMap<usize, usize> = HashMap::from([(start, start)]);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            if let Some((s, w)) = merging(p) {
                let mut route = vec![p];
                let mut q = p;
                while q != start {
                    q = parent[&q];
                    route.push(q);
                }
                route.reverse();
                let name = |p: usize| format!("({},{})", g.vertex_name(p / n), g.vertex_name(p % n));
                let cycle = cycle_through(&plain, &comp, start);
                return Some(json!({
                    "cycle": cycle.iter().map(|&p| name(p)).collect::<Vec<_>>(),
                    "route": route.iter().map(|&p| name(p)).collect::<Vec<_>>(),
                    "merging_pair": name(p),
                    "label": c.alphabet().symbol(s),
                    "into": g.vertex_name(w),
                }));
            }
            for &t in &plain[p] {
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(t) {
                    e.insert(p);
                    queue.push_back(t);
                }
            }
        }
    }
    None
}

/// A closed walk from `start` inside its strongly connected component.
fn cycle_through(succ: &[Vec<usize>], comp: &[usize], start: usize) -> Vec<usize> {
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(p) = queue.pop_front() {
        for &t in &succ[p] {
            if t == start {
                let mut cycle = vec![p];
                let mut q = p;
                while q != start {
                    q = parent[&q];
                    cycle.push(q);
                }
                cycle.reverse();
                return cycle;
            }
            if comp.binary_search(&t).is_ok() && !parent.contains_key(&t) {
                parent.insert(t, p);
                queue.push_back(t);
            }
        }
    }
    vec![start]
}

/// Outcome of the lift test for one primitive label word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftRecord {
    /// Lyndon representative of the orbit.
    pub word: Vec<u32>,
    /// Cover vertex `v` with `δ(v, word) = v`, if any.
    pub lift: Option<usize>,
}

/// For each `n <= max_n`, every Lyndon word `w` of length `n` with
/// `w^∞ ∈ Y`, and whether it lifts to a cover cycle of length `n`.
pub fn lift_table(c: &FischerCover, max_n: usize) -> Vec<Vec<LiftRecord>> {
    let k = c.alphabet().len() as u32;
    (1..=max_n)
        .map(|n| {
            let mut out = Vec::new();
            for_each_lyndon(
                k,
                n,
                |prefix| !c.image_of_all(prefix).is_empty(),
                |w| {
                    let stable = stable_set(c, w);
                    if !stable.is_empty() {
                        let lift = stable.iter().copied().find(|&v| c.transition(v, w) == Some(v));
                        out.push(LiftRecord { word: w.to_vec(), lift });
                    }
                },
            );
            out
        })
        .collect()
}

/// Limit of the decreasing sequence `S, δ(S,w), δ(δ(S,w),w), …` from the
/// full vertex set; nonempty iff `w^∞` is a point of the shift.
pub fn stable_set(c: &FischerCover, w: &[u32]) -> Vec<usize> {
    let mut s: Vec<usize> = (0..c.vertex_count()).collect();
    loop {
        let next = c.image(&s, w);
        if next == s {
            return s;
        }
        s = next;
    }
}

/// Whether every periodic label point of least period `n <= max_n` is the
/// image of a cover cycle of the same least period.
pub fn lift_hypothesis_check(c: &FischerCover, max_n: usize) -> Report {
    let mut r = Report::new("lift");
    let a = c.alphabet();
    for (i, records) in lift_table(c, max_n).into_iter().enumerate() {
        let n = i + 1;
        let failures: Vec<String> = records.iter().filter(|r| r.lift.is_none()).map(|r| a.render(&r.word)).collect();
        let lifts: BTreeMap<String, &str> = records
            .iter()
            .filter_map(|r| r.lift.map(|v| (a.render(&r.word), c.graph().vertex_name(v))))
            .collect();
        r.push(format!("lift_{n}"), failures.is_empty(), json!({ "orbits": records.len(), "lifts": lifts, "failures": failures }));
    }
    r
}
