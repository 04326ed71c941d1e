//! Marker positions: the greedy selection of non-periodic `2ℓ`-windows in
//! increasing catalog order, and the local periodic structure between them.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::language::{least_period_upto, LanguageIndex};
use crate::necklace::least_rotation;
use crate::presentations::{Presentation, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerStatus {
    /// The window at this position has a period `<= ℓ`.
    Periodic,
    /// Non-periodic, blocked by a selected position with a smaller window.
    Rejected,
    Selected,
    /// Depends on context outside the supplied word.
    Provisional,
    /// The window at this position is not fully supplied.
    Unknown,
}

impl MarkerStatus {
    pub fn is_stable(self) -> bool {
        matches!(self, MarkerStatus::Periodic | MarkerStatus::Rejected | MarkerStatus::Selected)
    }
}

/// Marker statuses of every position of a finite word.
#[derive(Debug, Clone)]
pub struct MarkerScan {
    origin: i64,
    ell: usize,
    status: Vec<MarkerStatus>,
    /// Positions (as indices) whose status was consulted, transitively:
    /// `[lo, hi)` in coordinates.
    spans: Vec<(i64, i64)>,
}

impl MarkerScan {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn status(&self, coord: i64) -> MarkerStatus {
        let i = coord - self.origin;
        if i < 0 {
            return MarkerStatus::Unknown;
        }
        self.status.get(i as usize).copied().unwrap_or(MarkerStatus::Unknown)
    }

    pub fn is_selected(&self, coord: i64) -> bool {
        self.status(coord) == MarkerStatus::Selected
    }

    /// Coordinates whose status is fixed and selected.
    pub fn selected(&self) -> Vec<i64> {
        self.positions(MarkerStatus::Selected)
    }

    pub fn provisional(&self) -> Vec<i64> {
        self.positions(MarkerStatus::Provisional)
    }

    fn positions(&self, s: MarkerStatus) -> Vec<i64> {
        (0..self.status.len()).filter(|&i| self.status[i] == s).map(|i| self.origin + i as i64).collect()
    }

    /// Coordinate interval the status at `coord` depends on.
    pub fn span(&self, coord: i64) -> Option<(i64, i64)> {
        let i = coord - self.origin;
        (i >= 0).then(|| self.spans.get(i as usize).copied()).flatten()
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn is_empty(&self) -> bool {
        self.status.is_empty()
    }
}

/// Computes all marker statuses of `x`. A position is selected iff its
/// window is non-periodic and no selected position within distance `ℓ`
/// has a smaller window.
pub fn scan_markers(x: &Word, ell: usize) -> Result<MarkerScan> {
    let w = &x.symbols;
    let n = w.len();
    if n < 2 * ell || ell == 0 {
        return Err(Error::WindowTooShort { needed: 2 * ell, actual: n });
    }
    let visible = n + 1 - 2 * ell;
    let win = |i: usize| &w[i..i + 2 * ell];
    let mut status = vec![MarkerStatus::Unknown; n];
    let mut spans: Vec<(i64, i64)> = vec![(i64::MAX, i64::MIN); n];
    let mut order = Vec::new();
    for i in 0..visible {
        if least_period_upto(win(i), ell).is_some() {
            status[i] = MarkerStatus::Periodic;
            spans[i] = (i as i64, (i + 2 * ell) as i64);
        } else {
            order.push(i);
        }
    }
    order.sort_by(|&i, &j| win(i).cmp(win(j)));
    let ell_i = ell as i64;
    for &i in &order {
        // a single selected blocker settles a rejection; selection needs
        // every smaller neighbour settled
        let mut blocker: Option<(i64, i64)> = None;
        let mut uncertain = false;
        let mut lo = i as i64 - ell_i;
        let mut hi = i as i64 + 3 * ell_i;
        for j in i as i64 - ell_i..=i as i64 + ell_i {
            if j == i as i64 {
                continue;
            }
            if j < 0 {
                uncertain = true;
                continue;
            }
            let j = j as usize;
            if j >= visible {
                // partially supplied window: harmless only if already larger
                let part = &w[j.min(n)..];
                if part.cmp(&win(i)[..part.len()]) != Ordering::Greater {
                    uncertain = true;
                }
                continue;
            }
            if status[j] == MarkerStatus::Periodic || win(j) > win(i) {
                continue;
            }
            lo = lo.min(spans[j].0);
            hi = hi.max(spans[j].1);
            match status[j] {
                MarkerStatus::Selected => {
                    let (a, b) = (spans[j].0.min(i.min(j) as i64), spans[j].1.max((i.max(j) + 2 * ell) as i64));
                    if blocker.map_or(true, |(c, d)| b - a < d - c) {
                        blocker = Some((a, b));
                    }
                }
                MarkerStatus::Provisional => uncertain = true,
                _ => {}
            }
        }
        (status[i], spans[i]) = match blocker {
            Some(span) => (MarkerStatus::Rejected, span),
            None if uncertain => (MarkerStatus::Provisional, (lo, hi)),
            None => (MarkerStatus::Selected, (lo, hi)),
        };
    }
    let origin = x.origin;
    let spans = spans.into_iter().map(|(a, b)| (a.saturating_add(origin), b.saturating_add(origin))).collect();
    Ok(MarkerScan { origin, ell, status, spans })
}

/// Selected positions and positions whose selection depends on context
/// outside `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerPositions {
    pub selected: Vec<i64>,
    pub provisional: Vec<i64>,
}

pub fn marker_positions(x: &Word, ell: usize) -> Result<MarkerPositions> {
    let scan = scan_markers(x, ell)?;
    Ok(MarkerPositions { selected: scan.selected(), provisional: scan.provisional() })
}

/// The periodic structure of a periodic `2ℓ`-window: its least period, the
/// Lyndon word of the orbit, and the index of the window's first symbol
/// in that word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalPeriodic {
    pub lyndon: Vec<u32>,
    pub offset: usize,
}

impl LocalPeriodic {
    pub fn period(&self) -> usize {
        self.lyndon.len()
    }

    /// Symbol at coordinate `coord` of the periodic extension anchored so
    /// that the window start `start` carries index `offset`.
    pub fn index_at(&self, start: i64, coord: i64) -> usize {
        let n = self.lyndon.len() as i64;
        (self.offset as i64 + coord - start).rem_euclid(n) as usize
    }
}

/// The least-period word generating the window `x[start, start+2ℓ)`.
pub fn local_periodic_point(x: &Word, start: i64, ell: usize) -> Result<LocalPeriodic> {
    let window = x
        .slice(start, start + 2 * ell as i64 - 1)
        .ok_or(Error::WindowTooShort { needed: 2 * ell, actual: x.len() })?;
    let q = least_period_upto(&window.symbols, ell).ok_or_else(|| Error::NotPeriodic(format!("at {start}")))?;
    let base = &window.symbols[..q];
    let r = least_rotation(base);
    let lyndon = crate::necklace::rotate(base, r);
    Ok(LocalPeriodic { lyndon, offset: (q - r) % q })
}

/// The catalog `C` of non-periodic admissible `2ℓ`-words in lexicographic
/// order, ranked through the language index; periodic words are
/// materialized on first use.
#[derive(Debug)]
pub struct Catalog {
    ell: usize,
    words: LanguageIndex,
    periodic: OnceLock<Vec<BigUint>>,
}

/// Periodic words are enumerated only below this many candidates.
const CATALOG_LIMIT: u64 = 1 << 22;

impl Catalog {
    pub fn new(x: &Presentation, ell: usize) -> Self {
        Catalog { ell, words: LanguageIndex::new(x, 2 * ell), periodic: OnceLock::new() }
    }

    /// Language ranks of the admissible periodic `2ℓ`-words, ascending.
    fn periodic_ranks(&self) -> Result<&Vec<BigUint>> {
        if let Some(p) = self.periodic.get() {
            return Ok(p);
        }
        let mut budget = 0u64;
        for q in 1..=self.ell {
            budget += self.words.count_len(q).to_u64().unwrap_or(u64::MAX);
            if budget > CATALOG_LIMIT {
                return Err(Error::Overflow);
            }
        }
        let two = 2 * self.ell;
        let mut ranks = Vec::new();
        for q in 1..=self.ell {
            let total = self.words.count_len(q).to_u64().expect("bounded");
            for i in 0..total {
                let base = self.words.unrank_len(q, &BigUint::from(i))?;
                let w: Vec<u32> = (0..two).map(|k| base[k % q]).collect();
                if least_period_upto(&w, self.ell) == Some(q) {
                    if let Ok(r) = self.words.rank(&w) {
                        ranks.push(r);
                    }
                }
            }
        }
        ranks.sort();
        ranks.dedup();
        Ok(self.periodic.get_or_init(|| ranks))
    }

    pub fn len(&self) -> Result<BigUint> {
        Ok(self.words.count_len(2 * self.ell) - BigUint::from(self.periodic_ranks()?.len()))
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.len()?.is_zero())
    }

    pub fn rank(&self, w: &[u32]) -> Result<BigUint> {
        if w.len() != 2 * self.ell {
            return Err(Error::WrongLength { expected: 2 * self.ell, actual: w.len() });
        }
        if least_period_upto(w, self.ell).is_some() {
            return Err(Error::Precondition("periodic windows are not cataloged".into()));
        }
        let r = self.words.rank(w)?;
        let below = self.periodic_ranks()?.partition_point(|p| *p < r);
        Ok(r - BigUint::from(below))
    }

    pub fn unrank(&self, i: &BigUint) -> Result<Vec<u32>> {
        let len = self.len()?;
        if *i >= len {
            return Err(Error::IndexOutOfRange { index: i.to_string(), count: len.to_string() });
        }
        let mut k = i.clone();
        for p in self.periodic_ranks()? {
            if *p <= k {
                k += 1u32;
            } else {
                break;
            }
        }
        self.words.unrank_len(2 * self.ell, &k)
    }
}
