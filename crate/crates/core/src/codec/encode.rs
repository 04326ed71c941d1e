//! The encoder: every coordinate falls into exactly one case, decided by the
//! selected marker positions within distance `3ℓ`.

use std::collections::HashMap;

use rand::Rng;

use super::markers::{local_periodic_point, scan_markers, MarkerScan, MarkerStatus};
use super::sample::Sampler;
use super::{BuildOptions, EmbeddingCode, Runtime, WindowCalibration};
use crate::error::{Error, Result};
use crate::presentations::Word;

/// The case governing one output coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseKind {
    /// Between markers `i` and `i'` at distance at most `3ℓ`.
    Block { marker: i64, next: i64 },
    /// Within `ℓ+1` of a marker that starts a long gap.
    Head { marker: i64 },
    /// A matched periodic stretch.
    Periodic,
    /// Connector leaving a periodic stretch towards the marker at `next`.
    Exit { next: i64 },
}

pub(crate) struct Encoder<'a> {
    code: &'a EmbeddingCode,
    rt: &'a Runtime,
    x: &'a Word,
    scan: MarkerScan,
    blocks: HashMap<i64, Vec<usize>>,
}

impl<'a> Encoder<'a> {
    pub(crate) fn new(code: &'a EmbeddingCode, x: &'a Word) -> Result<Self> {
        let scan = scan_markers(x, code.ell())?;
        Ok(Encoder { code, rt: code.runtime(), x, scan, blocks: HashMap::new() })
    }

    pub(crate) fn scan(&self) -> &MarkerScan {
        &self.scan
    }

    fn ell(&self) -> i64 {
        self.code.ell() as i64
    }

    fn selected_in(&self, from: i64, to: i64) -> impl DoubleEndedIterator<Item = i64> + '_ {
        (from..=to).filter(|&k| self.scan.is_selected(k))
    }

    /// Context the case decision at `j` consulted, as a radius around `j`.
    pub(crate) fn radius(&self, j: i64) -> Result<i64> {
        let ell = self.ell();
        let mut r = 0;
        for k in j - 3 * ell..=j + 3 * ell {
            let (lo, hi) = self.scan.span(k).filter(|_| self.scan.status(k).is_stable()).ok_or(Error::UnstableMarker(k))?;
            r = r.max(j - lo).max(hi - j);
        }
        Ok(r)
    }

    pub(crate) fn case(&self, j: i64) -> Result<CaseKind> {
        let ell = self.ell();
        for k in j - 3 * ell..=j + 3 * ell {
            if !self.scan.status(k).is_stable() {
                return Err(Error::UnstableMarker(k));
            }
        }
        if let Some(i) = self.selected_in(j - 3 * ell, j).next_back() {
            if let Some(next) = self.selected_in(i + 1, i + 3 * ell).next() {
                assert!(next - i > ell, "selected markers {i} and {next} closer than ℓ");
                return Ok(CaseKind::Block { marker: i, next });
            }
            if j < i + ell + 1 {
                return Ok(CaseKind::Head { marker: i });
            }
        }
        let k = self.code.connector_len() as i64;
        Ok(match self.selected_in(j + 1, j + k).next() {
            Some(next) => CaseKind::Exit { next },
            None => CaseKind::Periodic,
        })
    }

    /// Pair and phase of the matched cycle at coordinate `q` of a periodic
    /// stretch.
    fn pbar(&self, q: i64) -> Result<(usize, usize)> {
        let ell = self.ell();
        let w0 = match self.selected_in(q + 1, q + ell).next() {
            Some(next) => next - ell - 1,
            None => q,
        };
        if self.scan.status(w0) != MarkerStatus::Periodic {
            return Err(Error::UnstableMarker(w0));
        }
        let lp = local_periodic_point(self.x, w0, self.code.ell())?;
        let &p = self.rt.orbit_of.get(&lp.lyndon).ok_or(Error::UnmatchedOrbit { coordinate: q })?;
        Ok((p, lp.index_at(w0, q)))
    }

    fn pbar_edge(&self, q: i64) -> Result<usize> {
        let (p, k) = self.pbar(q)?;
        Ok(self.code.orbit_match.pairs[p].edge(k))
    }

    fn block(&mut self, case: CaseKind) -> Result<&[usize]> {
        let (i, edges) = match case {
            CaseKind::Block { marker, next } => (marker, self.gap_block(marker, next)?),
            CaseKind::Head { marker } => (marker, self.head_block(marker)?),
            _ => unreachable!("only marker blocks are cached"),
        };
        Ok(self.blocks.entry(i).or_insert(edges))
    }

    fn gap_block(&self, i: i64, next: i64) -> Result<Vec<usize>> {
        if let Some(b) = self.blocks.get(&i) {
            return Ok(b.clone());
        }
        let c = &self.code.cover;
        let kit = &self.code.kit;
        let gap = self.x.slice(i, next - 1).ok_or(Error::UnstableMarker(next))?;
        let payload = self.rt.xi.encode(&gap)?.edges;
        let (u, w) = (c.graph().edge(payload[0]).src, c.graph().edge(*payload.last().expect("payload")).trg);
        let mut out = kit.marker.edges.clone();
        out.extend(kit.connectors.get(kit.marker.trg(c), u));
        out.extend(payload);
        out.extend(kit.connectors.get(w, kit.marker.src(c)));
        Ok(out)
    }

    fn head_block(&self, i: i64) -> Result<Vec<usize>> {
        if let Some(b) = self.blocks.get(&i) {
            return Ok(b.clone());
        }
        let c = &self.code.cover;
        let kit = &self.code.kit;
        let ell = self.code.ell();
        let start = i + ell as i64 + 1;
        let (p, k) = self.pbar(start)?;
        let ctx = self.code.context(p, k);
        let v = c.graph().edge(self.code.orbit_match.pairs[p].edge(k)).src;
        let head = self.x.slice(i, start - 1).ok_or(Error::UnstableMarker(i))?;
        let r = self.rt.xi.words.rank(&head.symbols)?;
        let index = self.rt.heads.get(&ctx).expect("context of a matched cycle");
        let payload = index.unrank(kit.choice.pay(ell + 1), &r)?;
        let (u, w) = (c.graph().edge(payload[0]).src, c.graph().edge(*payload.last().expect("payload")).trg);
        let mut out = kit.marker.edges.clone();
        out.extend(kit.connectors.get(kit.marker.trg(c), u));
        out.extend(payload);
        out.extend(kit.connectors.get(w, v));
        Ok(out)
    }

    pub(crate) fn edge_at(&mut self, j: i64) -> Result<usize> {
        let case = self.case(j)?;
        match case {
            CaseKind::Block { marker, .. } | CaseKind::Head { marker } => {
                Ok(self.block(case)?[(j - marker) as usize])
            }
            CaseKind::Periodic => self.pbar_edge(j),
            CaseKind::Exit { next } => {
                let c = &self.code.cover;
                let kit = &self.code.kit;
                let k = kit.connectors.k as i64;
                let v = c.graph().edge(self.pbar_edge(next - k)?).src;
                Ok(kit.connectors.get(v, kit.marker.src(c))[(j - (next - k)) as usize])
            }
        }
    }
}

fn covered_range(code: &EmbeddingCode, x: &Word) -> Result<(i64, i64)> {
    let w = code.window as i64;
    let (s, t) = (x.origin + w, x.end() - w);
    if s > t {
        return Err(Error::WindowTooShort { needed: 2 * code.window + 1, actual: x.len() });
    }
    Ok((s, t))
}

/// Cover edges assigned to coordinates `[from, to]`; `x` must supply
/// enough context around them.
pub fn encode_path(code: &EmbeddingCode, x: &Word, from: i64, to: i64) -> Result<Vec<usize>> {
    let mut enc = Encoder::new(code, x)?;
    (from..=to).map(|j| enc.edge_at(j)).collect()
}

/// Encodes `x` given over `[s − W, t + W]`; the result covers `[s, t]`.
pub fn encode_point(code: &EmbeddingCode, x: &Word) -> Result<Word> {
    let (s, t) = covered_range(code, x)?;
    let edges = encode_path(code, x, s, t)?;
    Ok(Word::with_origin(code.cover.labels(&edges), s))
}

/// Measures how far the case decisions reach on sampled words.
pub(crate) fn calibrate(code: &EmbeddingCode, opts: &BuildOptions) -> Result<WindowCalibration> {
    let ell = code.ell();
    let margin = 40 * ell;
    let core = 6 * ell;
    let periodic = code.orbit_match.pairs.iter().map(|p| p.from.clone()).collect();
    let mut sampler = Sampler::new(&code.x, periodic, ell, opts.seed ^ 0x5eed_ca1b);
    let mut radius = 0;
    let mut samples = 0;
    for _ in 0..opts.calibration_samples {
        let x = Word::with_origin(sampler.word(core + 2 * margin), -(margin as i64));
        let enc = Encoder::new(code, &x)?;
        let mut ok = true;
        for j in 0..core as i64 {
            match enc.radius(j) {
                Ok(r) => radius = radius.max(r),
                Err(Error::UnstableMarker(_)) => ok = false,
                Err(e) => return Err(e),
            }
        }
        samples += usize::from(ok);
    }
    let slack = 3 * ell + code.marker_len() + 2 * code.connector_len();
    Ok(WindowCalibration { radius: radius as usize, slack, samples, sliding_checks: 0 })
}

/// Re-encodes sampled windows with randomized context beyond `W` and with
/// a wider window; every output must agree.
pub(crate) fn certify_sliding_block(code: &mut EmbeddingCode, opts: &BuildOptions) -> Result<()> {
    let checks = sliding_block_mismatch(code, opts.sliding_checks, opts.seed ^ 0x51d1_b10c)?;
    if let Some(j) = checks.1 {
        return Err(Error::UnstableMarker(j));
    }
    code.calibration.sliding_checks = checks.0;
    Ok(())
}

/// Runs `n` perturbation checks; returns the count and the first
/// coordinate whose output changed.
pub(crate) fn sliding_block_mismatch(code: &EmbeddingCode, n: usize, seed: u64) -> Result<(usize, Option<i64>)> {
    let ell = code.ell();
    let w = code.window;
    let core = 4 * ell;
    let periodic = code.orbit_match.pairs.iter().map(|p| p.from.clone()).collect();
    let mut sampler = Sampler::new(&code.x, periodic, ell, seed);
    for _ in 0..n {
        let base = sampler.word(core + 2 * w);
        let x = Word::with_origin(base.clone(), -(w as i64));
        let reference = encode_path(code, &x, 0, core as i64 - 1)?;
        let extra = sampler.rng().gen_range(1..=2 * w.max(1));
        let wide = sampler.extend(&base, extra, extra);
        let y = Word::with_origin(wide, -((w + extra) as i64));
        let again = encode_path(code, &y, 0, core as i64 - 1)?;
        if let Some(j) = (0..core).find(|&j| reference[j] != again[j]) {
            return Ok((n, Some(j as i64)));
        }
    }
    Ok((n, None))
}
