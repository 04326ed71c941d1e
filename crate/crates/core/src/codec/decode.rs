//! The decoder: marker occurrences are located by their label word, blocks
//! are parsed along the cover from the synchronized marker end, and
//! periodic stretches are identified by a window of their labels.

use std::collections::HashMap;

use super::{EmbeddingCode, Runtime};
use crate::error::{Error, Result};
use crate::presentations::Word;

struct Decoder<'a> {
    code: &'a EmbeddingCode,
    rt: &'a Runtime,
    y: &'a Word,
    /// Start coordinates of marker label occurrences, ascending.
    markers: Vec<i64>,
    blocks: HashMap<i64, Vec<u32>>,
}

fn not_in_image(what: String) -> Error {
    Error::NotInImage(what)
}

impl<'a> Decoder<'a> {
    fn new(code: &'a EmbeddingCode, y: &'a Word) -> Self {
        let rt = code.runtime();
        let markers = rt.kmp.occurrences(&y.symbols).into_iter().map(|p| y.origin + p as i64).collect();
        Decoder { code, rt, y, markers, blocks: HashMap::new() }
    }

    fn ell(&self) -> i64 {
        self.code.ell() as i64
    }

    fn markers_in(&self, from: i64, to: i64) -> &[i64] {
        let a = self.markers.partition_point(|&m| m < from);
        let b = self.markers.partition_point(|&m| m <= to);
        &self.markers[a..b.max(a)]
    }

    fn labels(&self, from: i64, to: i64) -> Result<Vec<u32>> {
        self.y
            .slice(from, to)
            .map(|w| w.symbols)
            .ok_or(Error::WindowTooShort { needed: (to - from + 1).max(0) as usize, actual: self.y.len() })
    }

    /// Cover path read from the end of the marker at `i` up to coordinate
    /// `end` (exclusive), split into leading connector, payload and
    /// trailing connector into `into` (or the vertex reached).
    fn parse_block(&self, i: i64, end: i64, into: Option<usize>) -> Result<(Vec<usize>, usize)> {
        let c = &self.code.cover;
        let kit = &self.code.kit;
        let l = kit.marker.len() as i64;
        let k = kit.connectors.k;
        let labels = self.labels(i + l, end - 1)?;
        let start = kit.marker.trg(c);
        let path = c.path_from(start, &labels).ok_or_else(|| not_in_image(format!("no cover path after marker at {i}")))?;
        let reached = c.transition(start, &labels).expect("path exists");
        let trg = into.unwrap_or(reached);
        if reached != trg || path.len() < 2 * k + 1 {
            return Err(not_in_image(format!("block after marker at {i} does not close up")));
        }
        let payload = path[k..path.len() - k].to_vec();
        let u = c.graph().edge(payload[0]).src;
        let w = c.graph().edge(*payload.last().expect("payload")).trg;
        if path[..k] != *kit.connectors.get(start, u) || path[path.len() - k..] != *kit.connectors.get(w, trg) {
            return Err(not_in_image(format!("connector mismatch in block at {i}")));
        }
        Ok((payload, trg))
    }

    fn gap(&mut self, i: i64, next: i64) -> Result<&[u32]> {
        if !self.blocks.contains_key(&i) {
            let c = &self.code.cover;
            let (payload, _) = self.parse_block(i, next, Some(self.code.kit.marker.src(c)))?;
            let w = self.rt.xi.decode((next - i) as usize, &crate::presentations::Path { edges: payload })?;
            self.blocks.insert(i, w.symbols);
        }
        Ok(&self.blocks[&i])
    }

    fn head(&mut self, i: i64) -> Result<&[u32]> {
        if !self.blocks.contains_key(&i) {
            let code = self.code;
            let ell = code.ell();
            let start = i + ell as i64 + 1;
            let (payload, v) = self.parse_block(i, start, None)?;
            let lead = self.labels(start, start + code.marker_len() as i64 - 2)?;
            let ctx = crate::marker::PayloadContext::Periodic { vertex: v, lead };
            let index = self.rt.heads.get(&ctx).ok_or_else(|| not_in_image(format!("no periodic stretch enters at {start}")))?;
            let r = index.rank(&payload).map_err(|_| not_in_image(format!("head payload at {i}")))?;
            let words = &self.rt.xi.words;
            if r >= words.count_len(ell + 1) {
                return Err(not_in_image(format!("head payload rank {r} at {i}")));
            }
            self.blocks.insert(i, words.unrank_len(ell + 1, &r)?);
        }
        Ok(&self.blocks[&i])
    }

    fn symbol(&mut self, j: i64) -> Result<u32> {
        let ell = self.ell();
        let last = self.markers_in(j - 3 * ell - 1, j).last().copied();
        let mut w = j - 2 * ell;
        if let Some(i) = last {
            if let Some(&next) = self.markers_in(i + 1, i + 3 * ell).first() {
                if next - i <= ell {
                    return Err(not_in_image(format!("markers at {i} and {next} overlap")));
                }
                return Ok(self.gap(i, next)?[(j - i) as usize]);
            }
            if j < i + ell + 1 {
                return Ok(self.head(i)?[(j - i) as usize]);
            }
            w = i + ell + 1;
        }
        self.periodic(j, w)
    }

    fn periodic(&self, j: i64, w: i64) -> Result<u32> {
        let c = &self.code.cover;
        let kit = &self.code.kit;
        let window = self.labels(w, w + self.code.ident_len() as i64 - 1)?;
        let &(p, ph) = self.rt.ident.get(&window).ok_or_else(|| not_in_image(format!("periodic stretch at {w}")))?;
        let pair = &self.code.orbit_match.pairs[p];
        let n = pair.n as i64;
        let at = |q: i64| (ph as i64 + q - w).rem_euclid(n) as usize;
        let k = kit.connectors.k as i64;
        let expected = match self.markers_in(j + 1, j + k).first() {
            Some(&next) => {
                let v = c.graph().edge(pair.edge(at(next - k))).src;
                c.label(kit.connectors.get(v, kit.marker.src(c))[(j - (next - k)) as usize])
            }
            None => c.label(pair.edge(at(j))),
        };
        if self.y.at(j) != Some(expected) {
            return Err(not_in_image(format!("coordinate {j} leaves the periodic stretch")));
        }
        Ok(pair.from[at(j)])
    }
}

/// Decodes `y` given over `[s − W′, t + W′]`; the result covers `[s, t]`.
pub fn decode_point(code: &EmbeddingCode, y: &Word) -> Result<Word> {
    let margin = code.decode_window() as i64;
    let (s, t) = (y.origin + margin, y.end() - margin);
    if s > t {
        return Err(Error::WindowTooShort { needed: 2 * margin as usize + 1, actual: y.len() });
    }
    let mut dec = Decoder::new(code, y);
    let symbols = (s..=t).map(|j| dec.symbol(j)).collect::<Result<Vec<u32>>>()?;
    // every piece parsed on its own; the pieces must also join up in X
    if dec.rt.xi.words.dfa().run(0, &symbols).is_none() {
        return Err(not_in_image("decoded pieces do not form a word of X".into()));
    }
    Ok(Word::with_origin(symbols, s))
}
