//! Matching periodic orbits of `X` with least period `n <= ℓ` to cover
//! cycles whose label orbits have the same least period.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::fischer::{stable_set, FischerCover};
use crate::invariants::periodic_word_present;
use crate::language::{LanguageIndex, SubsetDfa};
use crate::marker::{payload_index, Kmp, MarkerKit, PayloadContext};
use crate::necklace::for_each_lyndon;
use crate::presentations::Presentation;

/// One matched orbit: the Lyndon word of an `X`-orbit and a cover cycle of
/// the same length; index `k` of `from` corresponds to edge `k` of `to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPair {
    pub n: usize,
    pub from: Vec<u32>,
    pub to: Vec<usize>,
    pub phase: usize,
}

impl OrbitPair {
    /// Cycle edge aligned with index `k` of `from`.
    pub fn edge(&self, k: usize) -> usize {
        self.to[(k + self.phase) % self.n]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrbitMatch {
    pub pairs: Vec<OrbitPair>,
}

/// Per-stage counts reported when matching fails.
pub(crate) struct Eligibility<'a> {
    cover: &'a FischerCover,
    kit: &'a MarkerKit,
    kmp: Kmp,
    words: BigUint,
    ctx_ok: HashMap<PayloadContext, bool>,
    windows: HashSet<Vec<u32>>,
    m: usize,
}

impl<'a> Eligibility<'a> {
    pub(crate) fn new(x: &Presentation, cover: &'a FischerCover, kit: &'a MarkerKit) -> Self {
        let ell = kit.choice.ell;
        Eligibility {
            cover,
            kit,
            kmp: Kmp::new(kit.marker.label.clone()),
            words: LanguageIndex::new(x, ell + 1).count_len(ell + 1),
            ctx_ok: HashMap::new(),
            windows: HashSet::new(),
            m: identification_length(kit),
        }
    }

    /// Whether the cycle can carry a periodic stretch: its label sequence
    /// avoids the marker label, every exit into a marker is clean, every
    /// entry context admits enough payloads, and its identification
    /// windows are new. On success the windows are reserved.
    pub(crate) fn admit(&mut self, cycle: &[usize]) -> bool {
        let c = self.cover;
        let n = cycle.len();
        let labels = c.labels(cycle);
        let l = self.kmp.len();
        let a = &self.kit.marker;
        let conn = &self.kit.connectors;
        let periodic = |from: usize, len: usize| -> Vec<u32> { (0..len).map(|k| labels[(from + k) % n]).collect() };
        // cyclic avoidance
        if self.kmp.run(0, &periodic(0, n + l + n)).1.is_some() {
            return false;
        }
        for p in 0..n {
            let v = c.graph().edge(cycle[p]).src;
            // exit at phase p: the last L-1 labels fix the automaton state
            let state = self.kmp.state_after(&periodic(p + n * l - (l - 1), l - 1));
            let mut tail = c.labels(conn.get(v, a.src(c)));
            tail.extend(&a.label);
            if self.kmp.run(state, &tail).1 != Some(tail.len() - 1) {
                return false;
            }
        }
        for p in 0..n {
            let ctx = PayloadContext::Periodic { vertex: c.graph().edge(cycle[p]).src, lead: periodic(p, l - 1) };
            let ok = match self.ctx_ok.get(&ctx) {
                Some(&ok) => ok,
                None => {
                    let pay = self.kit.choice.pay(self.kit.choice.ell + 1);
                    let idx = payload_index(c, a, conn, &ctx, pay);
                    let ok = idx.count(pay) >= self.words;
                    self.ctx_ok.insert(ctx, ok);
                    ok
                }
            };
            if !ok {
                return false;
            }
        }
        let windows: Vec<Vec<u32>> = (0..n).map(|p| periodic(p, self.m)).collect();
        if windows.iter().any(|w| self.windows.contains(w)) {
            return false;
        }
        self.windows.extend(windows);
        true
    }
}

/// Length of the label windows that identify a periodic stretch.
pub fn identification_length(kit: &MarkerKit) -> usize {
    2 * kit.choice.ell - kit.connectors.k
}

/// Lyndon words of the orbits of `X` with least period `n`.
pub fn x_orbits(x: &Presentation, n: usize) -> Vec<Vec<u32>> {
    let dfa = SubsetDfa::new(x.graph(), x.alphabet().len());
    let mut out = Vec::new();
    for_each_lyndon(x.alphabet().len() as u32, n, |p| dfa.run(0, p).is_some(), |w| {
        if periodic_word_present(x.graph(), w) {
            out.push(w.to_vec());
        }
    });
    out
}

/// Label Lyndon words of length `n` with every cover cycle of length `n`
/// carrying them, each read from its lifting vertex. Distinct lifts of one
/// label orbit have the same image, so at most one of them may be used.
pub fn lifted_cycles(c: &FischerCover, n: usize) -> Vec<(Vec<u32>, Vec<Vec<usize>>)> {
    let mut out = Vec::new();
    for_each_lyndon(c.alphabet().len() as u32, n, |p| !c.image_of_all(p).is_empty(), |w| {
        let lifts: Vec<Vec<usize>> = stable_set(c, w)
            .into_iter()
            .filter(|&v| c.transition(v, w) == Some(v))
            .map(|v| c.path_from(v, w).expect("lift"))
            .collect();
        if !lifts.is_empty() {
            out.push((w.to_vec(), lifts));
        }
    });
    out
}

/// Greedy matching in lexicographic order for every `n <= ℓ`.
pub fn match_periodic_orbits(x: &Presentation, cover: &FischerCover, kit: &MarkerKit) -> Result<OrbitMatch> {
    let ell = kit.choice.ell;
    let mut elig = Eligibility::new(x, cover, kit);
    let mut pairs = Vec::new();
    for n in 1..=ell {
        let sources = x_orbits(x, n);
        if sources.is_empty() {
            continue;
        }
        let targets = lifted_cycles(cover, n);
        if targets.len() < sources.len() {
            return Err(Error::InsufficientOrbits { n, needed: sources.len(), eligible: 0, available: targets.len() });
        }
        let mut targets = targets.into_iter();
        let mut eligible = 0;
        for from in &sources {
            let to = loop {
                match targets.next() {
                    Some((_, lifts)) => {
                        if let Some(cycle) = lifts.into_iter().find(|cycle| elig.admit(cycle)) {
                            eligible += 1;
                            break cycle;
                        }
                    }
                    None => {
                        return Err(Error::InsufficientOrbits {
                            n,
                            needed: sources.len(),
                            eligible,
                            available: lifted_cycles(cover, n).len(),
                        })
                    }
                }
            };
            pairs.push(OrbitPair { n, from: from.clone(), to, phase: 0 });
        }
    }
    Ok(OrbitMatch { pairs })
}
