//! End-to-end checks of an embedding code on periodic points and sampled
//! windows.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use super::encode::{encode_path, sliding_block_mismatch, CaseKind, Encoder};
use super::orbits::x_orbits;
use super::sample::Sampler;
use super::{decode_point, EmbeddingCode};
use crate::error::Result;
use crate::necklace::{least_rotation, primitive_period, rotate};
use crate::presentations::Word;
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Every periodic point of period up to this bound is checked.
    pub periods: usize,
    /// Random windows for round trip and marker placement.
    pub samples: usize,
    /// Samples also checked for shift-equivariance.
    pub equivariance: usize,
    /// Samples re-encoded with randomized outer context.
    pub sliding: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { periods: 8, samples: 1000, equivariance: 200, sliding: 100, seed: 0 }
    }
}

/// Failures of one verdict, keeping the first few witnesses.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: usize,
    witnesses: Vec<Value>,
}

impl Tally {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < 5 {
                self.witnesses.push(witness());
            }
        }
    }

    fn push(self, r: &mut Report, name: &str, extra: Value) {
        let mut w = json!({ "checked": self.checked, "failures": self.failures, "witnesses": self.witnesses });
        if let (Value::Object(m), Value::Object(e)) = (&mut w, extra) {
            m.extend(e);
        }
        r.push(name, self.failures == 0, w);
    }
}

fn consecutive(code: &EmbeddingCode, edges: &[usize]) -> bool {
    let g = code.cover.graph();
    edges.windows(2).all(|p| g.edge(p[0]).trg == g.edge(p[1]).src)
}

/// Periodic word with `x_q = u[q mod n]` over `[from, to]`.
fn periodic_word(u: &[u32], from: i64, to: i64) -> Word {
    let n = u.len() as i64;
    Word::with_origin((from..=to).map(|q| u[q.rem_euclid(n) as usize]).collect(), from)
}

pub fn verify_embedding(code: &EmbeddingCode, opts: &VerifyOptions) -> Report {
    let mut r = Report::new("verify");
    let alphabet = code.x.alphabet();
    let w = code.window as i64;
    let wd = code.decode_window() as i64;
    let ell = code.ell();
    let mut admissible = Tally::default();
    let mut injectivity = Tally::default();
    let mut round_trip = Tally::default();
    let mut equivariance = Tally::default();
    let mut placement = Tally::default();

    // periodic points, one representative per orbit
    let mut images: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
    let mut orbits = 0usize;
    let mut preserved = 0usize;
    for n in 1..=opts.periods {
        for u in x_orbits(&code.x, n) {
            orbits += 1;
            let ni = n as i64;
            let x = periodic_word(&u, -wd - w, 2 * ni - 1 + wd + w);
            let edges = match encode_path(code, &x, -wd, 2 * ni - 1 + wd) {
                Ok(e) => e,
                Err(e) => {
                    admissible.check(false, || json!({ "orbit": alphabet.render(&u), "error": e.to_string() }));
                    continue;
                }
            };
            admissible.check(consecutive(code, &edges), || json!({ "orbit": alphabet.render(&u) }));
            let labels = code.cover.labels(&edges);
            let y = Word::with_origin(labels, -wd);
            let block: Vec<u32> = (0..ni).map(|j| y.at(j).expect("encoded")).collect();
            let periodic = (0..ni).all(|j| y.at(j) == y.at(j + ni));
            let lp = primitive_period(&block);
            preserved += usize::from(periodic && lp == n);
            let canon = rotate(&block, least_rotation(&block));
            injectivity.check(periodic && lp == n, || {
                json!({ "orbit": alphabet.render(&u), "image": code.cover.alphabet().render(&block), "image_period": lp })
            });
            if let Some(other) = images.insert(canon.clone(), u.clone()) {
                injectivity.check(false, || {
                    json!({
                        "pair": [alphabet.render(&other), alphabet.render(&u)],
                        "image": code.cover.alphabet().render(&canon),
                    })
                });
            }
            let back = y.slice(-wd, ni - 1 + wd).map(|y| decode_point(code, &y));
            let ok = matches!(&back, Some(Ok(d)) if d.symbols == block_of(&u, ni));
            round_trip.check(ok, || {
                json!({ "orbit": alphabet.render(&u), "decoded": describe(&back.map(|b| b.map(|d| alphabet.render(&d.symbols)))) })
            });
        }
    }

    // random windows
    let core = 4 * ell as i64;
    let periodic = code.orbit_match.pairs.iter().map(|p| p.from.clone()).collect();
    let mut sampler = Sampler::new(&code.x, periodic, ell, opts.seed);
    let mut cases: BTreeMap<&str, usize> = BTreeMap::new();
    for s in 0..opts.samples {
        let x = Word::with_origin(sampler.word((core + 2 * (w + wd)) as usize), -(w + wd));
        let result = (|| -> Result<(Vec<usize>, Vec<i64>)> {
            let mut enc = Encoder::new(code, &x)?;
            for j in 0..core {
                let name = match enc.case(j)? {
                    CaseKind::Block { .. } => "block",
                    CaseKind::Head { .. } => "head",
                    CaseKind::Periodic => "periodic",
                    CaseKind::Exit { .. } => "exit",
                };
                *cases.entry(name).or_default() += 1;
            }
            let edges = (-wd..core + wd).map(|j| enc.edge_at(j)).collect::<Result<Vec<_>>>()?;
            let selected = enc.scan().selected().into_iter().filter(|&i| (0..core).contains(&i)).collect();
            Ok((edges, selected))
        })();
        let (edges, selected) = match result {
            Ok(v) => v,
            Err(e) => {
                admissible.check(false, || json!({ "sample": s, "error": e.to_string() }));
                continue;
            }
        };
        admissible.check(consecutive(code, &edges), || json!({ "sample": s }));
        let y = Word::with_origin(code.cover.labels(&edges), -wd);
        let truth = x.slice(0, core - 1).expect("core");
        let back = decode_point(code, &y);
        round_trip.check(matches!(&back, Ok(d) if *d == truth), || {
            json!({ "sample": s, "input": alphabet.render(&truth.symbols), "decoded": describe(&Some(back.clone().map(|d| alphabet.render(&d.symbols)))) })
        });
        let occurrences: Vec<i64> = code
            .runtime()
            .kmp
            .occurrences(&y.symbols)
            .into_iter()
            .map(|p| p as i64 - wd)
            .filter(|p| (0..core).contains(p))
            .collect();
        placement.check(occurrences == selected, || json!({ "sample": s, "designated": selected, "found": occurrences }));
        if s < opts.equivariance {
            // S x supplied through the window one step to the right
            let shifted = x.slice(1 - w, core + w).expect("margin");
            let sx = Word::with_origin(shifted.symbols, -w);
            let direct = encode_path(code, &sx, 0, core - 1);
            let expected = &edges[(wd + 1) as usize..(wd + 1 + core) as usize];
            equivariance.check(matches!(&direct, Ok(e) if e == expected), || json!({ "sample": s }));
        }
    }
    admissible.push(&mut r, "admissible", json!({}));
    injectivity.push(&mut r, "injectivity", json!({ "periods": opts.periods, "orbits": orbits, "least_period_preserved": preserved }));
    round_trip.push(&mut r, "round_trip", json!({ "samples": opts.samples }));
    equivariance.push(&mut r, "shift_equivariance", json!({}));
    placement.push(&mut r, "marker_placement", json!({}));
    let sliding = sliding_block_mismatch(code, opts.sliding, opts.seed ^ 0x51d1_b10c);
    match sliding {
        Ok((n, first)) => r.push("sliding_block", first.is_none(), json!({ "checked": n, "window": code.window, "first_mismatch": first })),
        Err(e) => r.push("sliding_block", false, json!({ "window": code.window, "error": e.to_string() })),
    }
    r.note("cases", true, json!(cases));
    r
}

fn block_of(u: &[u32], n: i64) -> Vec<u32> {
    (0..n).map(|q| u[q.rem_euclid(u.len() as i64) as usize]).collect()
}

fn describe(v: &Option<Result<String>>) -> Value {
    match v {
        Some(Ok(s)) => json!(s),
        Some(Err(e)) => json!({ "error": e.to_string() }),
        None => json!({ "error": "window" }),
    }
}
