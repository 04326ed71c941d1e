//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the automata of the library; words and paths are enumerated directly.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use sofic::presentations::{parse_presentation, LabeledGraph, Presentation, PresentationKind};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(format!("{name}.json"))
}

pub fn corpus(name: &str) -> Presentation {
    let text = std::fs::read_to_string(corpus_path(name)).unwrap();
    parse_presentation(&text).unwrap()
}

/// All words of length `n` over `k` symbols, lexicographically.
pub fn all_words(k: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

fn contains_factor(w: &[u32], f: &[u32]) -> bool {
    f.len() <= w.len() && w.windows(f.len()).any(|x| x == f)
}

/// Whether some path of the declared graph carries `w`, by depth-first
/// search over edges.
pub fn graph_reads(g: &LabeledGraph, w: &[u32]) -> bool {
    fn go(g: &LabeledGraph, v: usize, w: &[u32]) -> bool {
        w.is_empty()
            || g.edges().iter().any(|e| e.src == v && e.label == w[0] && go(g, e.trg, &w[1..]))
    }
    (0..g.vertex_count()).any(|v| go(g, v, w))
}

/// Whether a closed path from `v` back to `v` carries `w`.
pub fn graph_closes(g: &LabeledGraph, v: usize, w: &[u32]) -> bool {
    fn go(g: &LabeledGraph, u: usize, target: usize, w: &[u32]) -> bool {
        if w.is_empty() {
            return u == target;
        }
        g.edges().iter().any(|e| e.src == u && e.label == w[0] && go(g, e.trg, target, &w[1..]))
    }
    go(g, v, v, w)
}

/// Graph of a presentation as declared (corpus graphs are essential).
fn declared(p: &Presentation) -> Option<&LabeledGraph> {
    p.declared_graph()
}

/// Membership of `w` in the language, from the definition of the kind.
pub fn admissible(p: &Presentation, w: &[u32]) -> bool {
    match p.kind() {
        PresentationKind::Forbidden => p.forbidden_words().iter().all(|f| !contains_factor(w, f)),
        _ => graph_reads(declared(p).unwrap(), w),
    }
}

pub fn language(p: &Presentation, n: usize) -> BTreeSet<Vec<u32>> {
    match p.declared_graph() {
        // labels of all paths; cheaper than filtering every word
        Some(g) => all_paths(g, n).iter().map(|q| q.iter().map(|&e| g.edge(e).label).collect()).collect(),
        None => all_words(p.alphabet().len() as u32, n).into_iter().filter(|w| admissible(p, w)).collect(),
    }
}

/// Whether `w^∞` is a point of the shift.
pub fn periodic_point(p: &Presentation, w: &[u32]) -> bool {
    match p.kind() {
        PresentationKind::Forbidden => {
            let m = p.forbidden_words().iter().map(Vec::len).max().unwrap_or(0);
            let reps = m.div_ceil(w.len()) + 1;
            let long: Vec<u32> = w.iter().copied().cycle().take(reps * w.len()).collect();
            admissible(p, &long)
        }
        _ => {
            // a bi-infinite path reads w^∞ iff a closed path reads some w^k
            // with k at most the number of vertices
            let g = declared(p).unwrap();
            (1..=g.vertex_count()).any(|k| {
                let wk: Vec<u32> = w.iter().copied().cycle().take(k * w.len()).collect();
                (0..g.vertex_count()).any(|v| graph_closes(g, v, &wk))
            })
        }
    }
}

/// `card P_n` by enumeration.
pub fn periodic_points(p: &Presentation, n: usize) -> usize {
    all_words(p.alphabet().len() as u32, n).into_iter().filter(|w| periodic_point(p, w)).count()
}

pub fn least_period(w: &[u32]) -> usize {
    (1..=w.len()).find(|&d| w.len() % d == 0 && (0..w.len()).all(|i| w[i] == w[i % d])).unwrap()
}

/// Every path of length `n` of a graph, as edge ids, lexicographically.
pub fn all_paths(g: &LabeledGraph, n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = if n == 0 { vec![Vec::new()] } else { (0..g.edge_count()).map(|e| vec![e]).collect() };
    for _ in 1..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                let t = g.edge(*p.last().unwrap()).trg;
                (0..g.edge_count()).filter(move |&e| g.edge(e).src == t).map(move |e| {
                    let mut q = p.clone();
                    q.push(e);
                    q
                })
            })
            .collect();
    }
    out
}

/// Paths of length exactly `d` from `v`, as label words.
pub fn followers(g: &LabeledGraph, v: usize, d: usize) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    fn go(g: &LabeledGraph, u: usize, d: usize, acc: &mut Vec<u32>, out: &mut BTreeSet<Vec<u32>>) {
        out.insert(acc.clone());
        if d == 0 {
            return;
        }
        for e in g.edges().iter().filter(|e| e.src == u) {
            acc.push(e.label);
            go(g, e.trg, d - 1, acc, out);
            acc.pop();
        }
    }
    go(g, v, d, &mut Vec::new(), &mut out);
    out
}

/// Smallest delay `D <= max_d` at which two equally labeled paths of
/// length `D+1` into one vertex always share their last edge.
pub fn left_closing_delay(g: &LabeledGraph, max_d: usize) -> Option<usize> {
    (0..=max_d).find(|&d| {
        let paths = all_paths(g, d + 1);
        let key = |p: &Vec<usize>| (g.edge(*p.last().unwrap()).trg, p.iter().map(|&e| g.edge(e).label).collect::<Vec<_>>());
        let mut seen = std::collections::HashMap::new();
        paths.iter().all(|p| {
            let last = *p.last().unwrap();
            *seen.entry(key(p)).or_insert(last) == last
        })
    })
}

/// Terminal vertices of all paths reading `w`.
pub fn delta_image(g: &LabeledGraph, w: &[u32]) -> BTreeSet<usize> {
    all_paths(g, w.len())
        .into_iter()
        .filter(|p| p.iter().map(|&e| g.edge(e).label).eq(w.iter().copied()))
        .map(|p| g.edge(*p.last().unwrap()).trg)
        .collect()
}

pub fn golden_ratio_log() -> f64 {
    // positive root of t^2 - t - 1
    ((1.0 + 5f64.sqrt()) / 2.0).ln()
}

/// Vertices lying on some bi-infinite path: reachable by a walk of length
/// `|V|` and starting one.
pub fn essential_vertices(g: &LabeledGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let step = |set: &Vec<bool>, forward: bool| -> Vec<bool> {
        let mut out = vec![false; n];
        for e in g.edges() {
            let (a, b) = if forward { (e.src, e.trg) } else { (e.trg, e.src) };
            if set[a] {
                out[b] = true;
            }
        }
        out
    };
    let (mut ahead, mut behind) = (vec![true; n], vec![true; n]);
    for _ in 0..n {
        ahead = step(&ahead, true);
        behind = step(&behind, false);
    }
    (0..n).filter(|&v| ahead[v] && behind[v]).collect()
}

/// Words of length `n` read along bi-infinite paths.
pub fn essential_language(g: &LabeledGraph, n: usize) -> BTreeSet<Vec<u32>> {
    let live = essential_vertices(g);
    let k = g.edges().iter().map(|e| e.label + 1).max().unwrap_or(0);
    // vertex sets reachable by reading a word from the live vertices
    let step = |set: &BTreeSet<usize>, s: u32| -> BTreeSet<usize> {
        g.edges().iter().filter(|e| e.label == s && set.contains(&e.src) && live.contains(&e.trg)).map(|e| e.trg).collect()
    };
    let start: BTreeSet<usize> = live.iter().copied().collect();
    if start.is_empty() {
        return BTreeSet::new();
    }
    let mut out = BTreeSet::new();
    let mut frontier = vec![(Vec::new(), start)];
    while let Some((w, set)) = frontier.pop() {
        if w.len() == n {
            out.insert(w);
            continue;
        }
        for s in 0..k {
            let next = step(&set, s);
            if !next.is_empty() {
                let mut v = w.clone();
                v.push(s);
                frontier.push((v, next));
            }
        }
    }
    out
}

/// Whether the essential part of `g` is nonempty and strongly connected.
pub fn irreducible(g: &LabeledGraph) -> bool {
    let live = essential_vertices(g);
    if live.is_empty() {
        return false;
    }
    let reach = |from: usize| {
        let mut seen = vec![false; g.vertex_count()];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for e in g.edges().iter().filter(|e| e.src == v && live.contains(&e.trg)) {
                if !std::mem::replace(&mut seen[e.trg], true) {
                    stack.push(e.trg);
                }
            }
        }
        seen
    };
    live.iter().all(|&v| {
        let r = reach(v);
        live.iter().all(|&w| r[w])
    })
}

pub mod strategy {
    use proptest::prelude::*;
    use sofic::presentations::{Alphabet, Edge, LabeledGraph, Presentation, PresentationKind};

    /// Labeled graphs with up to `max_v` vertices over `k` labels.
    pub fn graph(max_v: usize, max_e: usize, k: u32) -> impl Strategy<Value = LabeledGraph> {
        (1..=max_v).prop_flat_map(move |v| {
            prop::collection::vec((0..v, 0..v, 0..k), 1..=max_e).prop_map(move |es| {
                let names = (0..v).map(|i| format!("v{i}")).collect();
                LabeledGraph::new(names, es.into_iter().map(|(src, trg, label)| Edge { src, trg, label }).collect())
            })
        })
    }

    pub fn sofic(g: LabeledGraph, k: u32) -> Presentation {
        let alphabet = Alphabet::new((0..k).map(|i| ((b'a' + i as u8) as char).to_string())).unwrap();
        Presentation::from_graph(alphabet, PresentationKind::LabeledSofic, g).unwrap()
    }
}
