use std::collections::VecDeque;

use num_integer::Integer;

/// A labeled edge `src --label--> trg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub trg: usize,
    pub label: u32,
}

/// Finite directed multigraph with symbol-labeled edges.
///
/// Vertices are indexed `0..vertex_count()`; edges keep their insertion
/// index, which is the "edge id" used by paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl LabeledGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Self {
        let n = vertices.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            out[e.src].push(i);
            inc[e.trg].push(i);
        }
        for list in out.iter_mut() {
            list.sort_by_key(|&i| (edges[i].label, edges[i].trg, i));
        }
        for list in inc.iter_mut() {
            list.sort_by_key(|&i| (edges[i].label, edges[i].src, i));
        }
        LabeledGraph { vertices, edges, out, inc }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    /// Out-edge ids of `v`, ordered by label.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// In-edge ids of `v`, ordered by label.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    /// `entry[u][v]` = number of edges `u -> v`.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.vertex_count();
        let mut m = vec![vec![0u64; n]; n];
        for e in &self.edges {
            m[e.src][e.trg] += 1;
        }
        m
    }

    /// First `(vertex, label, e1, e2)` where two out-edges share a label.
    pub fn right_resolving_violation(&self) -> Option<(usize, u32, usize, usize)> {
        for v in 0..self.vertex_count() {
            for w in self.out[v].windows(2) {
                if self.edges[w[0]].label == self.edges[w[1]].label {
                    return Some((v, self.edges[w[0]].label, w[0], w[1]));
                }
            }
        }
        None
    }

    /// First `(vertex, label, e1, e2)` where two in-edges share a label.
    pub fn left_resolving_violation(&self) -> Option<(usize, u32, usize, usize)> {
        for v in 0..self.vertex_count() {
            for w in self.inc[v].windows(2) {
                if self.edges[w[0]].label == self.edges[w[1]].label {
                    return Some((v, self.edges[w[0]].label, w[0], w[1]));
                }
            }
        }
        None
    }

    /// Repeatedly removes vertices without in- or out-edges. Returns the
    /// essential subgraph together with the names of removed vertices and
    /// the ids (in `self`) of removed edges.
    pub fn trim(&self) -> (LabeledGraph, Vec<String>, Vec<usize>) {
        let n = self.vertex_count();
        let mut alive_v = vec![true; n];
        let mut alive_e = vec![true; self.edge_count()];
        let mut outdeg: Vec<usize> = self.out.iter().map(Vec::len).collect();
        let mut indeg: Vec<usize> = self.inc.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| outdeg[v] == 0 || indeg[v] == 0).collect();
        while let Some(v) = queue.pop_front() {
            if !alive_v[v] {
                continue;
            }
            alive_v[v] = false;
            for &e in self.out[v].iter().chain(&self.inc[v]) {
                if !alive_e[e] {
                    continue;
                }
                alive_e[e] = false;
                let Edge { src, trg, .. } = self.edges[e];
                outdeg[src] -= 1;
                indeg[trg] -= 1;
                for u in [src, trg] {
                    if alive_v[u] && (outdeg[u] == 0 || indeg[u] == 0) {
                        queue.push_back(u);
                    }
                }
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut names = Vec::new();
        let mut removed = Vec::new();
        for v in 0..n {
            if alive_v[v] {
                remap[v] = names.len();
                names.push(self.vertices[v].clone());
            } else {
                removed.push(self.vertices[v].clone());
            }
        }
        let mut edges = Vec::new();
        let mut removed_edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if alive_e[i] {
                edges.push(Edge { src: remap[e.src], trg: remap[e.trg], label: e.label });
            } else {
                removed_edges.push(i);
            }
        }
        (LabeledGraph::new(names, edges), removed, removed_edges)
    }

    /// Strongly connected components in reverse topological order of the
    /// condensation (sinks first).
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let succ: Vec<Vec<usize>> =
            (0..self.vertex_count()).map(|v| self.out[v].iter().map(|&e| self.edges[e].trg).collect()).collect();
        tarjan(&succ)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.vertex_count() > 0 && self.strongly_connected_components().len() == 1
    }

    /// Period of a strongly connected graph: gcd of all cycle lengths.
    /// Returns 0 for a graph without edges.
    pub fn period(&self) -> usize {
        let n = self.vertex_count();
        if n == 0 || self.edge_count() == 0 {
            return 0;
        }
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        let mut g = 0usize;
        while let Some(v) = queue.pop_front() {
            for &e in &self.out[v] {
                let w = self.edges[e].trg;
                if level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                } else {
                    let diff = (level[v] as i64 + 1 - level[w] as i64).unsigned_abs() as usize;
                    g = g.gcd(&diff);
                }
            }
        }
        g
    }

    /// Lengths `k <= bound` for which a closed walk of length `k` exists.
    pub fn closed_walk_lengths(&self, bound: usize) -> Vec<usize> {
        let n = self.vertex_count();
        // reach[u] = set of vertices reachable from u in exactly k steps
        let mut reach: Vec<Vec<bool>> = (0..n)
            .map(|u| {
                let mut r = vec![false; n];
                r[u] = true;
                r
            })
            .collect();
        let mut lengths = Vec::new();
        for k in 1..=bound {
            for r in reach.iter_mut() {
                let mut next = vec![false; n];
                for (v, _) in r.iter().enumerate().filter(|(_, &b)| b) {
                    for &e in &self.out[v] {
                        next[self.edges[e].trg] = true;
                    }
                }
                *r = next;
            }
            if (0..n).any(|u| reach[u][u]) {
                lengths.push(k);
            }
        }
        lengths
    }

    pub fn reversed(&self) -> LabeledGraph {
        let edges = self.edges.iter().map(|e| Edge { src: e.trg, trg: e.src, label: e.label }).collect();
        LabeledGraph::new(self.vertices.clone(), edges)
    }
}

/// Iterative Tarjan SCC over a successor list.
pub(crate) fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0usize;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}
