//! The finite languages `𝓛_n` of a presentation: counting, lexicographic
//! ranking, word periods, follower sets and synchronizing words.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fischer::FischerCover;
use crate::presentations::{LabeledGraph, Presentation, Word};

/// Deterministic automaton recognizing the admissible words of a labeled
/// graph: states are the nonempty vertex sets reachable from the set of
/// all vertices, state 0 is the start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetDfa {
    states: Vec<Vec<usize>>,
    trans: Vec<Vec<Option<usize>>>,
    symbols: usize,
}

impl SubsetDfa {
    pub fn new(graph: &LabeledGraph, symbols: usize) -> Self {
        Self::from_start(graph, symbols, (0..graph.vertex_count()).collect())
    }

    pub fn from_start(graph: &LabeledGraph, symbols: usize, start: Vec<usize>) -> Self {
        let mut states = vec![start.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(start, 0)]);
        let mut trans = Vec::new();
        let mut q = 0;
        while q < states.len() {
            let mut row = vec![None; symbols];
            for (s, slot) in row.iter_mut().enumerate() {
                let image = image(graph, &states[q], s as u32);
                if image.is_empty() {
                    continue;
                }
                let next = states.len();
                let id = *index.entry(image.clone()).or_insert(next);
                if id == next {
                    states.push(image);
                }
                *slot = Some(id);
            }
            trans.push(row);
            q += 1;
        }
        SubsetDfa { states, trans, symbols }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn vertices(&self, q: usize) -> &[usize] {
        &self.states[q]
    }

    pub fn step(&self, q: usize, s: u32) -> Option<usize> {
        self.trans[q][s as usize]
    }

    pub fn run(&self, q: usize, w: &[u32]) -> Option<usize> {
        w.iter().try_fold(q, |q, &s| self.step(q, s))
    }
}

/// Vertices reached from `from` by one edge labeled `s`, sorted.
pub(crate) fn image(graph: &LabeledGraph, from: &[usize], s: u32) -> Vec<usize> {
    let mut out: Vec<usize> = from
        .iter()
        .flat_map(|&v| graph.out_edges(v).iter().map(|&e| graph.edge(e)))
        .filter(|e| e.label == s)
        .map(|e| e.trg)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Completion-count tables over a [`SubsetDfa`]: `counts[r][q]` is the number
/// of words of length `r` readable from state `q`.
#[derive(Debug, Clone)]
pub struct LanguageIndex {
    dfa: SubsetDfa,
    n: usize,
    counts: Vec<Vec<BigUint>>,
}

impl LanguageIndex {
    pub fn new(p: &Presentation, n: usize) -> Self {
        Self::from_dfa(SubsetDfa::new(p.graph(), p.alphabet().len()), n)
    }

    pub fn from_dfa(dfa: SubsetDfa, n: usize) -> Self {
        let k = dfa.state_count();
        let mut counts = vec![vec![BigUint::one(); k]];
        for r in 1..=n {
            let prev = &counts[r - 1];
            let row = (0..k)
                .map(|q| dfa.trans[q].iter().flatten().map(|&t| &prev[t]).sum())
                .collect();
            counts.push(row);
        }
        LanguageIndex { dfa, n, counts }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.count().is_zero()
    }

    pub fn dfa(&self) -> &SubsetDfa {
        &self.dfa
    }

    /// Number of admissible words of the indexed length.
    pub fn count(&self) -> BigUint {
        self.count_len(self.n)
    }

    pub fn count_len(&self, len: usize) -> BigUint {
        self.counts[len][0].clone()
    }

    /// Lexicographic rank of `w` among admissible words of length `|w|`.
    pub fn rank(&self, w: &[u32]) -> Result<BigUint> {
        if w.len() > self.n {
            return Err(Error::WrongLength { expected: self.n, actual: w.len() });
        }
        let mut q = 0;
        let mut rank = BigUint::zero();
        for (i, &s) in w.iter().enumerate() {
            if s as usize >= self.dfa.symbols {
                return Err(Error::Inadmissible);
            }
            let rest = w.len() - i - 1;
            for t in 0..s {
                if let Some(next) = self.dfa.step(q, t) {
                    rank += &self.counts[rest][next];
                }
            }
            q = self.dfa.step(q, s).ok_or(Error::Inadmissible)?;
        }
        Ok(rank)
    }

    pub fn unrank(&self, index: &BigUint) -> Result<Vec<u32>> {
        self.unrank_len(self.n, index)
    }

    pub fn unrank_len(&self, len: usize, index: &BigUint) -> Result<Vec<u32>> {
        if len > self.n || *index >= self.counts[len][0] {
            return Err(Error::IndexOutOfRange {
                index: index.to_string(),
                count: self.counts.get(len).map_or_else(|| "0".into(), |c| c[0].to_string()),
            });
        }
        let mut rest = index.clone();
        let mut q = 0;
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            let r = len - i - 1;
            for s in 0..self.dfa.symbols as u32 {
                let Some(next) = self.dfa.step(q, s) else { continue };
                let c = &self.counts[r][next];
                if rest < *c {
                    out.push(s);
                    q = next;
                    break;
                }
                rest -= c;
            }
        }
        Ok(out)
    }
}

/// Exact number of admissible words of length `n`.
pub fn count_words(p: &Presentation, n: usize) -> BigUint {
    LanguageIndex::new(p, n).count()
}

pub fn rank_word(idx: &LanguageIndex, w: &Word) -> Result<BigUint> {
    if w.len() != idx.len() {
        return Err(Error::WrongLength { expected: idx.len(), actual: w.len() });
    }
    idx.rank(&w.symbols)
}

pub fn unrank_word(idx: &LanguageIndex, i: &BigUint) -> Result<Word> {
    idx.unrank(i).map(Word::new)
}

/// Least period of a length-`2ℓ` window, if it is at most `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodVerdict {
    pub period: Option<usize>,
}

impl PeriodVerdict {
    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }
}

pub fn word_period(w: &Word, ell: usize) -> Result<PeriodVerdict> {
    if w.len() != 2 * ell {
        return Err(Error::WrongLength { expected: 2 * ell, actual: w.len() });
    }
    Ok(PeriodVerdict { period: least_period_upto(&w.symbols, ell) })
}

/// Least `q` in `[1, max]` with `w[i] = w[i+q]` wherever both sides exist.
pub fn least_period_upto(w: &[u32], max: usize) -> Option<usize> {
    if w.is_empty() {
        return Some(1).filter(|_| max >= 1);
    }
    // failure function: least period of w is |w| - border(w)
    let mut fail = vec![0usize; w.len()];
    let mut k = 0;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = fail[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = w.len() - fail[w.len() - 1];
    (p <= max).then_some(p)
}

/// All length-`m` words `u` with `a·u` admissible.
pub fn follower_words(p: &Presentation, a: &Word, m: usize) -> Result<BTreeSet<Vec<u32>>> {
    let dfa = SubsetDfa::new(p.graph(), p.alphabet().len());
    let q = dfa.run(0, &a.symbols).ok_or(Error::Inadmissible)?;
    Ok(words_from(&dfa, q, m))
}

/// All length-`m` words `u` with `u·a` admissible.
pub fn predecessor_words(p: &Presentation, a: &Word, m: usize) -> Result<BTreeSet<Vec<u32>>> {
    let dfa = SubsetDfa::new(&p.graph().reversed(), p.alphabet().len());
    let rev: Vec<u32> = a.symbols.iter().rev().copied().collect();
    let q = dfa.run(0, &rev).ok_or(Error::Inadmissible)?;
    Ok(words_from(&dfa, q, m)
        .into_iter()
        .map(|mut w| {
            w.reverse();
            w
        })
        .collect())
}

fn words_from(dfa: &SubsetDfa, q: usize, m: usize) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    let mut queue = VecDeque::from([(q, Vec::new())]);
    while let Some((q, w)) = queue.pop_front() {
        if w.len() == m {
            out.insert(w);
            continue;
        }
        for s in 0..dfa.symbols as u32 {
            if let Some(t) = dfa.step(q, s) {
                let mut next = w.clone();
                next.push(s);
                queue.push_back((t, next));
            }
        }
    }
    out
}

/// Whether `c` is synchronizing: reading it from every cover vertex leads
/// to exactly one vertex.
pub fn is_synchronizing(cover: &FischerCover, c: &Word) -> Result<bool> {
    match cover.image_of_all(&c.symbols).len() {
        0 => Err(Error::Inadmissible),
        n => Ok(n == 1),
    }
}
