//! Periodic-point counts, topological entropy and the embeddability
//! precondition.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fischer::{build_fischer_cover, lift_hypothesis_check, structural_report, FischerCover};
use crate::language::SubsetDfa;
use crate::necklace::for_each_lyndon;
use crate::presentations::{LabeledGraph, Presentation, PresentationKind};
use crate::report::Report;

/// `points[n-1]` = card P_n, `orbits[n-1]` = number of orbits of least
/// period `n`, for `n` in `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicCensus {
    pub points: Vec<BigUint>,
    pub orbits: Vec<BigUint>,
}

impl PeriodicCensus {
    pub fn max_n(&self) -> usize {
        self.points.len()
    }

    fn to_json(&self) -> Value {
        json!({
            "points": self.points.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "orbits": self.orbits.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

pub fn periodic_census(p: &Presentation, max_n: usize) -> PeriodicCensus {
    if p.labels_are_edges() {
        let points = traces(p.graph(), max_n);
        let orbits = mobius_orbits(&points).expect("trace sequences have integral orbit counts");
        PeriodicCensus { points, orbits }
    } else {
        let orbits = label_orbits(p.graph(), p.alphabet().len() as u32, max_n);
        let points = (1..=max_n)
            .map(|n| (1..=n).filter(|d| n % d == 0).map(|d| &orbits[d - 1] * BigUint::from(d)).sum())
            .collect();
        PeriodicCensus { points, orbits }
    }
}

/// Number of closed paths of each length `1..=max_n` in a graph, which is
/// `trace(A^n)`. For a cover these are the periodic points of the edge
/// shift, counted separately from label points.
pub fn cover_path_counts(c: &FischerCover, max_n: usize) -> Vec<BigUint> {
    traces(c.graph(), max_n)
}

fn traces(g: &LabeledGraph, max_n: usize) -> Vec<BigUint> {
    let a: Vec<Vec<BigUint>> = g.adjacency_matrix().into_iter().map(|r| r.into_iter().map(BigUint::from).collect()).collect();
    let n = a.len();
    let mut power = a.clone();
    let mut out = Vec::with_capacity(max_n);
    for k in 1..=max_n {
        if k > 1 {
            power = (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|m| &power[i][m] * &a[m][j]).sum()).collect())
                .collect();
        }
        out.push((0..n).map(|i| power[i][i].clone()).sum());
    }
    out
}

/// Orbit counts by Möbius inversion; `None` if some count is negative or
/// fractional.
pub fn mobius_orbits(points: &[BigUint]) -> Option<Vec<BigUint>> {
    (1..=points.len())
        .map(|n| {
            let mut sum = BigInt::zero();
            for d in (1..=n).filter(|d| n % d == 0) {
                let term = BigInt::from(points[d - 1].clone());
                match mobius(n / d) {
                    1 => sum += term,
                    -1 => sum -= term,
                    _ => {}
                }
            }
            let (q, r) = (&sum / BigInt::from(n), &sum % BigInt::from(n));
            (r.is_zero() && !q.is_negative()).then(|| q.to_biguint().expect("nonnegative"))
        })
        .collect()
}

fn mobius(mut n: usize) -> i32 {
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Counts primitive label cycles: Lyndon words `w` whose periodic point
/// `w^∞` is presented, decided by the decreasing stabilization of the
/// vertex set reachable by reading `w` repeatedly.
fn label_orbits(g: &LabeledGraph, k: u32, max_n: usize) -> Vec<BigUint> {
    let dfa = SubsetDfa::new(g, k as usize);
    (1..=max_n)
        .map(|n| {
            let mut count = 0u64;
            for_each_lyndon(k, n, |prefix| dfa.run(0, prefix).is_some(), |w| {
                if periodic_word_present(g, w) {
                    count += 1;
                }
            });
            BigUint::from(count)
        })
        .collect()
}

pub(crate) fn periodic_word_present(g: &LabeledGraph, w: &[u32]) -> bool {
    let mut s: Vec<usize> = (0..g.vertex_count()).collect();
    loop {
        let mut next = s.clone();
        for &sym in w {
            next = crate::language::image(g, &next, sym);
        }
        if next.is_empty() {
            return false;
        }
        if next == s {
            return true;
        }
        s = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// Natural-log entropy.
    pub value: f64,
    /// Width of the certified bracket around `value`.
    pub residual: f64,
    pub iterations: usize,
}

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 1_000_000;

/// Entropy of an irreducible presentation: log of the Perron eigenvalue of
/// its Fischer cover (or of the graph itself when labels determine edges).
pub fn entropy(p: &Presentation, tol: f64) -> Result<EntropyEstimate> {
    let g = p.graph();
    if g.edge_count() == 0 {
        return Err(Error::EmptyLanguage);
    }
    if !g.is_strongly_connected() {
        let sccs = g.strongly_connected_components();
        return Err(Error::Reducible {
            components: sccs.len(),
            condensation: sccs.iter().rev().map(|c| c.iter().map(|&v| g.vertex_name(v).to_string()).collect()).collect(),
        });
    }
    if p.labels_are_edges() {
        perron_log(g, tol)
    } else {
        perron_log(build_fischer_cover(p)?.graph(), tol)
    }
}

/// Entropy of any presentation: the maximum over its irreducible parts.
pub fn entropy_any(p: &Presentation, tol: f64) -> Result<EntropyEstimate> {
    let g = p.graph();
    if g.edge_count() == 0 {
        return Err(Error::EmptyLanguage);
    }
    if g.is_strongly_connected() {
        return entropy(p, tol);
    }
    let mut best: Option<EntropyEstimate> = None;
    for comp in g.strongly_connected_components() {
        let names = comp.iter().map(|&v| g.vertex_name(v).to_string()).collect();
        let edges = g
            .edges()
            .iter()
            .filter(|e| comp.contains(&e.src) && comp.contains(&e.trg))
            .map(|e| crate::presentations::Edge {
                src: comp.binary_search(&e.src).expect("member"),
                trg: comp.binary_search(&e.trg).expect("member"),
                label: e.label,
            })
            .collect::<Vec<_>>();
        if edges.is_empty() {
            continue;
        }
        let sub = LabeledGraph::new(names, edges);
        let est = if p.labels_are_edges() {
            perron_log(&sub, tol)?
        } else {
            let part = Presentation::from_graph(p.alphabet().clone(), PresentationKind::LabeledSofic, sub)?;
            perron_log(build_fischer_cover(&part)?.graph(), tol)?
        };
        if best.is_none_or(|b| est.value > b.value) {
            best = Some(est);
        }
    }
    best.ok_or(Error::EmptyLanguage)
}

/// Power iteration on `A^d` (`d` the period) from the all-ones vector,
/// bracketing the spectral radius by Collatz–Wielandt bounds.
fn perron_log(g: &LabeledGraph, tol: f64) -> Result<EntropyEstimate> {
    let d = g.period().max(1);
    let a: Vec<Vec<f64>> = g.adjacency_matrix().into_iter().map(|r| r.into_iter().map(|x| x as f64).collect()).collect();
    let n = a.len();
    let mul = |m: &[Vec<f64>], x: &[f64]| -> Vec<f64> { m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect() };
    let mut b = a.clone();
    for _ in 1..d {
        b = (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| b[i][k] * a[k][j]).sum()).collect()).collect();
    }
    let mut x = vec![1.0f64; n];
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let y = mul(&b, &x);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if hi == 0.0 {
            return Ok(EntropyEstimate { value: f64::NEG_INFINITY, residual: 0.0, iterations: it });
        }
        residual = (hi.ln() - lo.ln()) / d as f64;
        if residual <= tol {
            let value = (lo.ln() + hi.ln()) / (2.0 * d as f64);
            return Ok(EntropyEstimate { value: value.max(0.0), residual, iterations: it });
        }
        let top = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / top).collect();
        if x.iter().any(|&v| v == 0.0) {
            // underflow on a sparse block: restart from a fresh positive vector
            x = x.iter().map(|&v| v.max(f64::MIN_POSITIVE)).collect();
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, residual })
}

/// Margin below which two entropies are not considered strictly ordered.
pub const ENTROPY_MARGIN: f64 = 1e-9;

/// Hypotheses of the embedding construction for `x` into `y`, checked up to
/// period `max_n`.
pub fn embeddability_precondition(x: &Presentation, y: &Presentation, max_n: usize) -> Report {
    let mut r = Report::new("precondition");
    let hx = entropy_any(x, DEFAULT_TOL);
    let hy = entropy(y, DEFAULT_TOL);
    match (&hx, &hy) {
        (Ok(a), Ok(b)) => r.push(
            "entropy",
            b.value - a.value > ENTROPY_MARGIN + a.residual + b.residual,
            json!({ "h_x": a.value, "h_y": b.value, "margin": b.value - a.value, "units": "nat" }),
        ),
        _ => r.push(
            "entropy",
            false,
            json!({
                "h_x": hx.as_ref().map(|e| json!(e.value)).unwrap_or_else(|e| json!(e.to_string())),
                "h_y": hy.as_ref().map(|e| json!(e.value)).unwrap_or_else(|e| json!(e.to_string())),
            }),
        ),
    }
    let cx = periodic_census(x, max_n);
    let cy = periodic_census(y, max_n);
    let first = |a: &[BigUint], b: &[BigUint]| (0..max_n).find(|&i| a[i] > b[i]).map(|i| i + 1);
    let pv = first(&cx.points, &cy.points);
    r.push(
        "periodic_points",
        pv.is_none(),
        json!({ "x": cx.to_json()["points"], "y": cy.to_json()["points"], "first_violation": pv }),
    );
    let ov = first(&cx.orbits, &cy.orbits);
    r.push(
        "orbit_counts",
        ov.is_none(),
        json!({ "x": cx.to_json()["orbits"], "y": cy.to_json()["orbits"], "first_violation": ov }),
    );
    match build_fischer_cover(y) {
        Ok(cover) => {
            let s = structural_report(&cover);
            let aperiodic = s.verdict("aperiodic").expect("verdict").clone();
            r.push("aperiodic", aperiodic.pass, aperiodic.witness);
            let left = s.verdict("left_resolving").expect("verdict").clone();
            r.push("almost_markov", left.pass, left.witness);
            let closing = s.verdict("left_closing").expect("verdict").clone();
            r.note("left_closing", closing.pass, closing.witness);
            let lift = lift_hypothesis_check(&cover, max_n);
            let failures: Vec<Value> =
                lift.failed().map(|v| json!({ "n": v.name, "words": v.witness["failures"] })).collect();
            r.push("lift", lift.pass, json!({ "failures": failures }));
        }
        Err(e) => {
            for name in ["aperiodic", "almost_markov", "lift"] {
                r.push(name, false, json!({ "error": e.to_string() }));
            }
        }
    }
    r
}

/// Lower bound on `ln(count)/n` style ratios used in reports.
pub(crate) fn log_ratio(count: &BigUint, n: usize) -> f64 {
    if n == 0 || count.is_zero() {
        return 0.0;
    }
    let bits = count.bits();
    let shift = bits.saturating_sub(60);
    let top = (count >> shift).to_f64().unwrap_or(f64::MAX);
    (top.ln() + shift as f64 * std::f64::consts::LN_2) / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::parse_presentation;

    fn golden() -> Presentation {
        parse_presentation(r#"{"alphabet":["0","1"],"kind":"forbidden","forbidden":["11"]}"#).unwrap()
    }

    fn full2() -> Presentation {
        parse_presentation(
            r#"{"alphabet":["0","1"],"kind":"labeled-sofic","vertices":["V"],
                "edges":[{"src":"V","trg":"V","label":"0"},{"src":"V","trg":"V","label":"1"}]}"#,
        )
        .unwrap()
    }

    fn nums(v: &[BigUint]) -> Vec<u64> {
        v.iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn census_values() {
        assert_eq!(nums(&periodic_census(&golden(), 4).points), vec![1, 3, 4, 7]);
        assert_eq!(nums(&periodic_census(&full2(), 4).points), vec![2, 4, 8, 16]);
        assert_eq!(nums(&periodic_census(&full2(), 6).orbits), vec![2, 1, 2, 3, 6, 9]);
    }

    #[test]
    fn entropies() {
        let h = entropy(&full2(), DEFAULT_TOL).unwrap();
        assert!((h.value - 2f64.ln()).abs() < 1e-9);
        let h = entropy(&golden(), DEFAULT_TOL).unwrap();
        assert!((h.value - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-9);
        assert!(h.residual <= DEFAULT_TOL);
    }

    #[test]
    fn periodic_graph_entropy_uses_folding() {
        // a 2-cycle with a chord pair: period 2, Perron value sqrt(2)
        let p = parse_presentation(
            r#"{"alphabet":["a","b","c"],"kind":"labeled-sofic","vertices":["A","B"],
                "edges":[{"src":"A","trg":"B","label":"a"},{"src":"A","trg":"B","label":"b"},
                         {"src":"B","trg":"A","label":"c"}]}"#,
        )
        .unwrap();
        let h = entropy(&p, DEFAULT_TOL).unwrap();
        assert!((h.value - 2f64.sqrt().ln()).abs() < 1e-9);
    }

    #[test]
    fn precondition_verdicts() {
        assert!(embeddability_precondition(&golden(), &full2(), 6).pass);
        let r = embeddability_precondition(&full2(), &full2(), 4);
        assert!(!r.verdict("entropy").unwrap().pass);
        let r = embeddability_precondition(&full2(), &golden(), 4);
        assert!(!r.verdict("entropy").unwrap().pass);
        let pp = r.verdict("periodic_points").unwrap();
        assert!(!pp.pass);
        assert_eq!(pp.witness["first_violation"], 1);
    }

    #[test]
    fn mobius_rejects_impossible_counts() {
        assert!(mobius_orbits(&[BigUint::from(2u32), BigUint::from(3u32)]).is_none());
    }
}
