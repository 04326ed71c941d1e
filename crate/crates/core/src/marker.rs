//! Marker path `a`, connectors `c(U,W)`, counting and ranking of paths that
//! avoid `a`, the block length `ℓ`, and the injections `Ξ_l`.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fischer::FischerCover;
use crate::invariants::{entropy_any, DEFAULT_TOL};
use crate::language::LanguageIndex;
use crate::presentations::{Path, Presentation, Word};

/// Knuth–Morris–Pratt automaton for one pattern. States are `0..=L`;
/// state `L` means the pattern has just been completed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kmp {
    pattern: Vec<u32>,
    fail: Vec<usize>,
}

impl Kmp {
    pub fn new(pattern: Vec<u32>) -> Self {
        assert!(!pattern.is_empty(), "empty pattern");
        let mut fail = vec![0; pattern.len()];
        let mut k = 0;
        for i in 1..pattern.len() {
            while k > 0 && pattern[i] != pattern[k] {
                k = fail[k - 1];
            }
            if pattern[i] == pattern[k] {
                k += 1;
            }
            fail[i] = k;
        }
        Kmp { pattern, fail }
    }

    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pattern(&self) -> &[u32] {
        &self.pattern
    }

    /// Longest proper prefix that is also a suffix.
    pub fn border(&self) -> usize {
        self.fail[self.pattern.len() - 1]
    }

    pub fn step(&self, state: usize, s: u32) -> usize {
        let l = self.pattern.len();
        let mut k = if state == l { self.fail[l - 1] } else { state };
        loop {
            if self.pattern[k] == s {
                return k + 1;
            }
            if k == 0 {
                return 0;
            }
            k = self.fail[k - 1];
        }
    }

    /// Final state and the index of the first symbol completing a match.
    pub fn run(&self, mut state: usize, word: &[u32]) -> (usize, Option<usize>) {
        let mut first = None;
        for (i, &s) in word.iter().enumerate() {
            state = self.step(state, s);
            if state == self.pattern.len() && first.is_none() {
                first = Some(i);
            }
        }
        (state, first)
    }

    /// Start indices of all occurrences in `word`.
    pub fn occurrences(&self, word: &[u32]) -> Vec<usize> {
        let l = self.pattern.len();
        let mut state = 0;
        let mut out = Vec::new();
        for (i, &s) in word.iter().enumerate() {
            state = self.step(state, s);
            if state == l {
                out.push(i + 1 - l);
            }
        }
        out
    }

    /// State after reading a word in which no match has ended.
    pub fn state_after(&self, word: &[u32]) -> usize {
        self.run(0, word).0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerCase {
    /// `a = b·α^m` around a loop `α`.
    Loop,
    /// `a = d·(αb)^m` around a cycle `αb` whose first edge can be followed
    /// by distinct edges.
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerPath {
    pub edges: Vec<usize>,
    pub label: Vec<u32>,
    /// The repeated cycle; pumping appends it once more.
    pub cycle: Vec<usize>,
    pub case: MarkerCase,
    pub prefix_suffix_free: bool,
    pub synchronizing: bool,
}

impl MarkerPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn src(&self, c: &FischerCover) -> usize {
        c.graph().edge(self.edges[0]).src
    }

    pub fn trg(&self, c: &FischerCover) -> usize {
        c.graph().edge(*self.edges.last().expect("nonempty marker")).trg
    }

    /// Re-derives both flags from the edges.
    pub fn from_edges(c: &FischerCover, edges: Vec<usize>, cycle: Vec<usize>, case: MarkerCase) -> Result<Self> {
        let path = Path::new(c.graph(), edges)?;
        if path.is_empty() {
            return Err(Error::InvalidCode("empty marker".into()));
        }
        let label = path.labels(c.graph());
        let edges = path.edges;
        let edge_word: Vec<u32> = edges.iter().map(|&e| e as u32).collect();
        let prefix_suffix_free = Kmp::new(edge_word).border() == 0;
        let synchronizing = c.image_of_all(&label).len() == 1;
        Ok(MarkerPath { edges, label, cycle, case, prefix_suffix_free, synchronizing })
    }

    pub fn is_valid(&self) -> bool {
        self.prefix_suffix_free && self.synchronizing
    }

    /// Appends the cycle once; both flags are recomputed.
    pub fn pumped(&self, c: &FischerCover) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.extend(&self.cycle);
        MarkerPath::from_edges(c, edges, self.cycle.clone(), self.case)
    }

    pub fn to_value(&self, c: &FischerCover) -> Value {
        json!({
            "edges": self.edges,
            "label": c.alphabet().render(&self.label),
            "L": self.len(),
        })
    }
}

pub const MARKER_SEARCH_BOUND: usize = 12;

/// Searches for a marker path: a prefix `d` ending at the base of a cycle,
/// followed by a power of the cycle, such that the edge word has no border
/// and the label word is synchronizing. Loops are tried first.
pub fn build_marker(c: &FischerCover) -> Result<MarkerPath> {
    let g = c.graph();
    if g.edge_count() < 2 {
        return Err(Error::DegenerateCover("the cover is a single loop".into()));
    }
    if g.period() != 1 {
        return Err(Error::DegenerateCover(format!("the cover has period {}", g.period())));
    }
    let loops: Vec<usize> = (0..g.edge_count()).filter(|&e| g.edge(e).src == g.edge(e).trg).collect();
    let mut cycles: Vec<(Vec<usize>, MarkerCase)> = loops.iter().map(|&e| (vec![e], MarkerCase::Loop)).collect();
    if cycles.is_empty() {
        for alpha in 0..g.edge_count() {
            let t = g.edge(alpha).trg;
            if g.out_edges(t).len() < 2 {
                continue;
            }
            if let Some(back) = shortest_path(c, t, g.edge(alpha).src) {
                let mut cyc = vec![alpha];
                cyc.extend(back);
                cycles.push((cyc, MarkerCase::Cycle));
            }
        }
    }
    let bound = MARKER_SEARCH_BOUND.max(2 * g.vertex_count() + 2);
    for (cycle, case) in &cycles {
        let base = g.edge(cycle[0]).src;
        let last = *cycle.last().expect("cycle");
        // prefixes d ending at the base, breadth first, edge ids ascending
        let mut queue: VecDeque<Vec<usize>> = g.in_edges(base).iter().map(|&e| vec![e]).collect();
        let mut tried = 0usize;
        while let Some(d) = queue.pop_front() {
            tried += 1;
            if tried > 200_000 {
                break;
            }
            if *d.last().expect("nonempty") != last {
                let d_fwd: Vec<usize> = d.iter().rev().copied().collect();
                for power in 1..=d.len() + 1 {
                    let mut edges = d_fwd.clone();
                    for _ in 0..power {
                        edges.extend(cycle);
                    }
                    let m = MarkerPath::from_edges(c, edges, cycle.clone(), *case)?;
                    if m.is_valid() {
                        return Ok(m);
                    }
                }
            }
            if d.len() < bound {
                let head = g.edge(*d.last().expect("nonempty")).src;
                for &e in g.in_edges(head) {
                    let mut next = d.clone();
                    next.push(e);
                    queue.push_back(next);
                }
            }
        }
    }
    Err(Error::MarkerSearchExhausted { bound })
}

/// Shortest path from `u` to `w` (lexicographically least edge ids among
/// shortest), as edges; empty when `u == w`.
fn shortest_path(c: &FischerCover, u: usize, w: usize) -> Option<Vec<usize>> {
    let g = c.graph();
    let mut parent = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    seen[u] = true;
    let mut queue = VecDeque::from([u]);
    while let Some(v) = queue.pop_front() {
        if v == w {
            let mut path = Vec::new();
            let mut x = w;
            while let Some(e) = parent[x] {
                path.push(e);
                x = g.edge(e).src;
            }
            path.reverse();
            return Some(path);
        }
        let mut outs = g.out_edges(v).to_vec();
        outs.sort_unstable();
        for e in outs {
            let t = g.edge(e).trg;
            if !seen[t] {
                seen[t] = true;
                parent[t] = Some(e);
                queue.push_back(t);
            }
        }
    }
    None
}

/// `c(U,W)` for every ordered vertex pair, all of length `K`, all with
/// label words free of the marker label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectorTable {
    pub k: usize,
    paths: Vec<Vec<Vec<usize>>>,
}

impl ConnectorTable {
    pub fn get(&self, u: usize, w: usize) -> &[usize] {
        &self.paths[u][w]
    }

    pub fn vertex_count(&self) -> usize {
        self.paths.len()
    }

    pub(crate) fn from_paths(k: usize, paths: Vec<Vec<Vec<usize>>>) -> Self {
        ConnectorTable { k, paths }
    }

    pub fn to_value(&self, c: &FischerCover) -> Value {
        let g = c.graph();
        let mut table = BTreeMap::new();
        for u in 0..self.paths.len() {
            for w in 0..self.paths.len() {
                table.insert(format!("{}|{}", g.vertex_name(u), g.vertex_name(w)), self.paths[u][w].clone());
            }
        }
        json!({ "K": self.k, "table": table })
    }
}

pub const CONNECTOR_SEARCH_BOUND: usize = 64;

/// Smallest uniform `K` admitting marker-label-free paths of length exactly
/// `K` between all ordered pairs; each connector is the lexicographically
/// least such path. `K = 0` only for a single-vertex cover.
pub fn build_connectors(c: &FischerCover, a: &MarkerPath) -> Result<ConnectorTable> {
    let n = c.vertex_count();
    if n == 1 {
        return Ok(ConnectorTable { k: 0, paths: vec![vec![Vec::new()]] });
    }
    let kmp = Kmp::new(a.label.clone());
    let bound = CONNECTOR_SEARCH_BOUND.max(4 * n + 2 * a.len());
    'k: for k in 1..=bound {
        let mut paths = vec![vec![Vec::new(); n]; n];
        for w in 0..n {
            // ok[r][v][s]: from vertex v in KMP state s, a clean walk of
            // exactly r edges ends at w
            let l = kmp.len();
            let mut ok = vec![vec![vec![false; l]; n]; k + 1];
            ok[0][w] = vec![true; l];
            for r in 1..=k {
                for v in 0..n {
                    for s in 0..l {
                        ok[r][v][s] = c.graph().out_edges(v).iter().any(|&e| {
                            let t = kmp.step(s, c.label(e));
                            t < l && ok[r - 1][c.graph().edge(e).trg][t]
                        });
                    }
                }
            }
            for u in 0..n {
                if !ok[k][u][0] {
                    continue 'k;
                }
                let (mut v, mut s) = (u, 0);
                let mut path = Vec::with_capacity(k);
                for r in (0..k).rev() {
                    let mut outs = c.graph().out_edges(v).to_vec();
                    outs.sort_unstable();
                    let e = outs
                        .into_iter()
                        .find(|&e| {
                            let t = kmp.step(s, c.label(e));
                            t < l && ok[r][c.graph().edge(e).trg][t]
                        })
                        .expect("feasible step");
                    s = kmp.step(s, c.label(e));
                    v = c.graph().edge(e).trg;
                    path.push(e);
                }
                paths[u][w] = path;
            }
        }
        return Ok(ConnectorTable { k, paths });
    }
    Err(Error::ConnectorSearchExhausted { bound })
}

/// Counting and ranking of the paths accepted by a product of the cover
/// with a KMP automaton. State 0 is a virtual start state; paths are
/// ordered lexicographically by edge id.
#[derive(Debug, Clone)]
pub struct AvoidanceIndex {
    trans: Vec<Vec<(usize, usize)>>,
    accept: Vec<bool>,
    counts: Vec<Vec<BigUint>>,
}

impl AvoidanceIndex {
    /// `D_n(a)`: all paths of the cover with no occurrence of the edge word
    /// of `a`, for `n <= max_n`.
    pub fn paths(c: &FischerCover, a: &MarkerPath, max_n: usize) -> Self {
        let kmp = Kmp::new(a.edges.iter().map(|&e| e as u32).collect());
        let n = c.vertex_count();
        let l = kmp.len();
        let id = |v: usize, s: usize| 1 + v * l + s;
        let mut trans = vec![Vec::new(); 1 + n * l];
        for e in 0..c.edge_count() {
            let t = kmp.step(0, e as u32);
            if t < l {
                trans[0].push((e, id(c.graph().edge(e).trg, t)));
            }
        }
        for v in 0..n {
            let mut outs = c.graph().out_edges(v).to_vec();
            outs.sort_unstable();
            for s in 0..l {
                for &e in &outs {
                    let t = kmp.step(s, e as u32);
                    if t < l {
                        trans[id(v, s)].push((e, id(c.graph().edge(e).trg, t)));
                    }
                }
            }
        }
        let accept = vec![true; trans.len()];
        Self::from_parts(trans, accept, max_n)
    }

    /// Payload paths for a block context: the path starts at any vertex `U`
    /// after `a·c(trg a, U)`, and its end `W` must satisfy `accept_end`
    /// (given `W` and the label-KMP state). Marker-label occurrences are
    /// excluded throughout, including across the leading connector.
    pub(crate) fn payload(
        c: &FischerCover,
        kmp: &Kmp,
        a: &MarkerPath,
        conn: &ConnectorTable,
        accept_end: impl Fn(usize, usize) -> bool,
        max_n: usize,
    ) -> Self {
        let n = c.vertex_count();
        let l = kmp.len();
        let id = |v: usize, s: usize| 1 + v * l + s;
        let mut trans = vec![Vec::new(); 1 + n * l];
        let mut accept = vec![false; trans.len()];
        let entry: Vec<Option<usize>> = (0..n)
            .map(|u| {
                let (s, hit) = kmp.run(l, &c.labels(conn.get(a.trg(c), u)));
                // state `l` only survives an empty connector; it continues
                // like its border
                hit.is_none().then_some(if s == l { kmp.border() } else { s })
            })
            .collect();
        let mut first: Vec<(usize, usize)> = Vec::new();
        for e in 0..c.edge_count() {
            let edge = c.graph().edge(e);
            if let Some(s) = entry[edge.src] {
                let t = kmp.step(s, edge.label);
                if t < l {
                    first.push((e, id(edge.trg, t)));
                }
            }
        }
        trans[0] = first;
        for v in 0..n {
            let mut outs = c.graph().out_edges(v).to_vec();
            outs.sort_unstable();
            for s in 0..l {
                accept[id(v, s)] = accept_end(v, s);
                for &e in &outs {
                    let t = kmp.step(s, c.label(e));
                    if t < l {
                        trans[id(v, s)].push((e, id(c.graph().edge(e).trg, t)));
                    }
                }
            }
        }
        // an empty payload would leave the connector glued to itself
        accept[0] = false;
        Self::from_parts(trans, accept, max_n)
    }

    fn from_parts(trans: Vec<Vec<(usize, usize)>>, accept: Vec<bool>, max_n: usize) -> Self {
        let k = trans.len();
        let mut counts = vec![accept.iter().map(|&b| if b { BigUint::one() } else { BigUint::zero() }).collect::<Vec<_>>()];
        for r in 1..=max_n {
            let prev = &counts[r - 1];
            let row = (0..k).map(|q| trans[q].iter().map(|&(_, t)| &prev[t]).sum()).collect();
            counts.push(row);
        }
        AvoidanceIndex { trans, accept, counts }
    }

    pub fn max_len(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, n: usize) -> BigUint {
        self.counts.get(n).map_or_else(BigUint::zero, |row| row[0].clone())
    }

    pub fn rank(&self, path: &[usize]) -> Result<BigUint> {
        let n = path.len();
        if n > self.max_len() {
            return Err(Error::WrongLength { expected: self.max_len(), actual: n });
        }
        let mut q = 0;
        let mut rank = BigUint::zero();
        for (i, &e) in path.iter().enumerate() {
            let rest = n - i - 1;
            let mut next = None;
            for &(f, t) in &self.trans[q] {
                if f == e {
                    next = Some(t);
                    break;
                }
                rank += &self.counts[rest][t];
            }
            q = next.ok_or(Error::Inadmissible)?;
        }
        if !self.accept[q] {
            return Err(Error::Inadmissible);
        }
        Ok(rank)
    }

    pub fn unrank(&self, n: usize, index: &BigUint) -> Result<Vec<usize>> {
        let total = self.count(n);
        if n > self.max_len() || *index >= total {
            return Err(Error::IndexOutOfRange { index: index.to_string(), count: total.to_string() });
        }
        let mut rest = index.clone();
        let mut q = 0;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let r = n - i - 1;
            for &(e, t) in &self.trans[q] {
                let c = &self.counts[r][t];
                if rest < *c {
                    out.push(e);
                    q = t;
                    break;
                }
                rest -= c;
            }
        }
        Ok(out)
    }
}

pub fn avoidance_count(idx: &AvoidanceIndex, n: usize) -> BigUint {
    idx.count(n)
}

pub fn avoid_rank(idx: &AvoidanceIndex, path: &Path) -> Result<BigUint> {
    idx.rank(&path.edges)
}

pub fn avoid_unrank(idx: &AvoidanceIndex, n: usize, i: &BigUint) -> Result<Path> {
    idx.unrank(n, i).map(|edges| Path { edges })
}

/// What follows a payload block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PayloadContext {
    /// Block between two markers: `c(W, src a)` then `a`.
    Marker,
    /// Block entering a periodic stretch at vertex `V` whose first `L-1`
    /// labels are `z`: `c(W, V)` then `z`.
    Periodic { vertex: usize, lead: Vec<u32> },
}

/// The payload index of a context: paths that keep the marker label out
/// of the whole block and its junctions.
pub fn payload_index(
    c: &FischerCover,
    a: &MarkerPath,
    conn: &ConnectorTable,
    ctx: &PayloadContext,
    max_n: usize,
) -> AvoidanceIndex {
    let kmp = Kmp::new(a.label.clone());
    let l = kmp.len();
    match ctx {
        PayloadContext::Marker => {
            let src = a.src(c);
            AvoidanceIndex::payload(
                c,
                &kmp,
                a,
                conn,
                |w, s| {
                    let mut tail = c.labels(conn.get(w, src));
                    tail.extend(&a.label);
                    kmp.run(s, &tail).1 == Some(tail.len() - 1)
                },
                max_n,
            )
        }
        PayloadContext::Periodic { vertex, lead } => AvoidanceIndex::payload(
            c,
            &kmp,
            a,
            conn,
            |w, s| {
                let mut tail = c.labels(conn.get(w, *vertex));
                tail.extend(lead);
                kmp.run(s, &tail).1.is_none() && l > 0
            },
            max_n,
        ),
    }
}

/// Feasibility evidence for one block length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub l: usize,
    pub words: BigUint,
    pub payload: usize,
    /// `card D_{pay(l)}(a)`.
    pub avoiding: BigUint,
    /// Size of the payload set actually used between markers.
    pub usable: BigUint,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.words <= self.usable && self.usable <= self.avoiding
    }

    pub fn to_value(&self) -> Value {
        json!({
            "l": self.l,
            "words": self.words.to_string(),
            "payload": self.payload,
            "avoiding": self.avoiding.to_string(),
            "usable": self.usable.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLengthChoice {
    pub ell: usize,
    pub marker_len: usize,
    pub k: usize,
    pub certificates: Vec<Certificate>,
}

impl BlockLengthChoice {
    pub fn pay(&self, l: usize) -> usize {
        l - self.marker_len - 2 * self.k
    }

    pub fn is_valid(&self) -> bool {
        self.ell > 2 * (self.marker_len + self.k)
            && self.certificates.len() == 3 * self.ell + 1
            && self.certificates.iter().zip(self.ell..).all(|(c, l)| c.l == l && c.payload == self.pay(l) && c.holds())
    }
}

/// Marker, connectors and block length that together satisfy every
/// counting certificate.
#[derive(Debug, Clone)]
pub struct MarkerKit {
    pub marker: MarkerPath,
    pub connectors: ConnectorTable,
    pub choice: BlockLengthChoice,
    /// How many times the marker cycle was appended beyond the search result.
    pub pumped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockOptions {
    pub max_ell: usize,
    pub max_pump: usize,
    /// Smallest `ℓ` to consider (raised by later stages).
    pub min_ell: usize,
}

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions { max_ell: 64, max_pump: 12, min_ell: 0 }
    }
}

/// Certificates for every `l` in `[ℓ, 4ℓ]`, or the first failing `l`.
pub fn certificates(
    words: &LanguageIndex,
    plain: &AvoidanceIndex,
    usable: &AvoidanceIndex,
    ell: usize,
    marker_len: usize,
    k: usize,
) -> std::result::Result<Vec<Certificate>, usize> {
    (ell..=4 * ell)
        .map(|l| {
            let payload = l - marker_len - 2 * k;
            let cert = Certificate {
                l,
                words: words.count_len(l),
                payload,
                avoiding: plain.count(payload),
                usable: usable.count(payload),
            };
            if cert.holds() {
                Ok(cert)
            } else {
                Err(l)
            }
        })
        .collect()
}

/// The least `ℓ > 2(L+K)` whose certificates all hold. The marker is pumped
/// (and connectors re-searched) while no `ℓ` up to the bound works.
pub fn select_block_length(
    x: &Presentation,
    c: &FischerCover,
    a: &MarkerPath,
    opts: &BlockOptions,
) -> Result<MarkerKit> {
    let h_x = entropy_any(x, DEFAULT_TOL)?.value;
    let h_y = crate::invariants::entropy(&c.presentation(), DEFAULT_TOL)?.value;
    if h_y - h_x <= crate::invariants::ENTROPY_MARGIN {
        return Err(Error::NoEntropyMargin { h_x, h_y });
    }
    let words = LanguageIndex::new(x, 4 * opts.max_ell);
    let mut marker = a.clone();
    let mut last_growth = 0.0;
    for pumped in 0..=opts.max_pump {
        if pumped > 0 {
            marker = marker.pumped(c)?;
            if !marker.is_valid() {
                continue;
            }
        }
        let conn = match build_connectors(c, &marker) {
            Ok(conn) => conn,
            Err(Error::ConnectorSearchExhausted { .. }) if pumped < opts.max_pump => continue,
            Err(e) => return Err(e),
        };
        let (lm, k) = (marker.len(), conn.k);
        let max_pay = (4 * opts.max_ell).saturating_sub(lm + 2 * k);
        let plain = AvoidanceIndex::paths(c, &marker, max_pay);
        let usable = payload_index(c, &marker, &conn, &PayloadContext::Marker, max_pay);
        let first = (2 * (lm + k) + 1).max(opts.min_ell);
        let mut ell = first;
        while ell <= opts.max_ell {
            match certificates(&words, &plain, &usable, ell, lm, k) {
                Ok(certificates) => {
                    let choice = BlockLengthChoice { ell, marker_len: lm, k, certificates };
                    return Ok(MarkerKit { marker, connectors: conn, choice, pumped });
                }
                // every ℓ' in (ℓ, l] would contain the failing l as well,
                // unless it passes l; skip ahead
                Err(l) => ell = if l >= ell { (l + 1).max(ell + 1) } else { ell + 1 },
            }
        }
        let top = usable.count(max_pay);
        last_growth = if max_pay > 0 { crate::invariants::log_ratio(&top, max_pay) } else { 0.0 };
    }
    Err(Error::BlockLengthExhausted { bound: opts.max_ell, h_x, h_avoid: last_growth })
}

/// The injections `Ξ_l` between marker blocks: rank among words of `X`,
/// unrank among usable payload paths.
#[derive(Debug, Clone)]
pub struct Xi {
    pub(crate) words: LanguageIndex,
    pub(crate) payload: AvoidanceIndex,
    pub(crate) choice: BlockLengthChoice,
}

impl Xi {
    pub fn new(x: &Presentation, c: &FischerCover, kit: &MarkerKit) -> Self {
        let ell = kit.choice.ell;
        Xi {
            words: LanguageIndex::new(x, 4 * ell),
            payload: payload_index(c, &kit.marker, &kit.connectors, &PayloadContext::Marker, kit.choice.pay(4 * ell)),
            choice: kit.choice.clone(),
        }
    }

    fn check_len(&self, l: usize) -> Result<()> {
        let ell = self.choice.ell;
        if l < ell || l > 4 * ell {
            return Err(Error::BlockLengthOutOfRange { l, lo: ell, hi: 4 * ell });
        }
        Ok(())
    }

    pub fn encode(&self, w: &Word) -> Result<Path> {
        let l = w.len();
        self.check_len(l)?;
        let r = self.words.rank(&w.symbols)?;
        self.payload.unrank(self.choice.pay(l), &r).map(|edges| Path { edges })
    }

    pub fn decode(&self, l: usize, path: &Path) -> Result<Word> {
        self.check_len(l)?;
        if path.len() != self.choice.pay(l) {
            return Err(Error::WrongLength { expected: self.choice.pay(l), actual: path.len() });
        }
        let r = self.payload.rank(&path.edges)?;
        if r >= self.words.count_len(l) {
            return Err(Error::NotInImage(format!("payload rank {r} exceeds the word count")));
        }
        self.words.unrank_len(l, &r).map(Word::new)
    }
}

pub fn xi_encode(xi: &Xi, w: &Word) -> Result<Path> {
    xi.encode(w)
}

pub fn xi_decode(xi: &Xi, l: usize, p: &Path) -> Result<Word> {
    xi.decode(l, p)
}

/// Growth proxy used in the divergence witness: paths that traverse `a`,
/// relative to the words of `X`.
pub fn traversing_ratio(total: &BigUint, avoiding: &BigUint, words: &BigUint) -> f64 {
    let diff = total - avoiding;
    let num = diff.to_f64().unwrap_or(f64::MAX);
    let den = words.to_f64().unwrap_or(f64::MAX).max(1.0);
    num / den
}

/// Distinct edge words `a` must not be confused with: every occurrence of
/// the marker label inside `word` starting at an index in `allowed`.
pub fn stray_occurrences(a: &MarkerPath, labels: &[u32], allowed: &HashSet<usize>) -> Vec<usize> {
    Kmp::new(a.label.clone()).occurrences(labels).into_iter().filter(|i| !allowed.contains(i)).collect()
}
