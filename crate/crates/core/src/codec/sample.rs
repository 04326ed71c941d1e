//! Seeded sampling of admissible words, with long periodic stretches mixed
//! in so that every encoder case occurs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::language::SubsetDfa;
use crate::presentations::Presentation;

/// Chance per step of attempting a periodic stretch.
const STICKY: f64 = 0.08;

pub struct Sampler {
    fwd: SubsetDfa,
    bwd: SubsetDfa,
    periodic: Vec<Vec<u32>>,
    /// Typical stretch length scale.
    scale: usize,
    rng: ChaCha8Rng,
}

impl Sampler {
    /// `periodic` lists words whose powers may be spliced in; `scale`
    /// bounds the length of those stretches (up to `8 * scale`).
    pub fn new(x: &Presentation, periodic: Vec<Vec<u32>>, scale: usize, seed: u64) -> Self {
        let k = x.alphabet().len();
        Sampler {
            fwd: SubsetDfa::new(x.graph(), k),
            bwd: SubsetDfa::new(&x.graph().reversed(), k),
            periodic: periodic.into_iter().filter(|w| !w.is_empty()).collect(),
            scale: scale.max(1),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A word of length `len` occurring in the shift.
    pub fn word(&mut self, len: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(len);
        let mut q = 0;
        self.grow(&mut out, &mut q, len, true);
        out
    }

    /// `core` with `left` random symbols prepended and `right` appended, so
    /// that the result occurs in the shift. `core` must occur in it.
    pub fn extend(&mut self, core: &[u32], left: usize, right: usize) -> Vec<u32> {
        let rev: Vec<u32> = core.iter().rev().copied().collect();
        let mut q = self.bwd.run(0, &rev).expect("core occurs in the shift");
        let mut prefix = rev;
        let target = core.len() + left;
        while prefix.len() < target {
            let choices: Vec<(u32, usize)> =
                (0..self.bwd.symbols() as u32).filter_map(|s| self.bwd.step(q, s).map(|t| (s, t))).collect();
            let &(s, t) = choices.choose(&mut self.rng).expect("essential graph");
            prefix.push(s);
            q = t;
        }
        prefix.reverse();
        let mut q = self.fwd.run(0, &prefix).expect("admissible");
        let total = prefix.len() + right;
        self.grow(&mut prefix, &mut q, total, false);
        prefix
    }

    fn grow(&mut self, out: &mut Vec<u32>, q: &mut usize, len: usize, sticky: bool) {
        while out.len() < len {
            if sticky && !self.periodic.is_empty() && self.rng.gen_bool(STICKY) {
                let u = self.periodic.choose(&mut self.rng).expect("nonempty").clone();
                let r = self.rng.gen_range(0..u.len());
                let reps = self.rng.gen_range(1..=8 * self.scale).div_ceil(u.len());
                let chunk: Vec<u32> = (0..reps * u.len()).map(|i| u[(r + i) % u.len()]).take(len - out.len()).collect();
                if let Some(t) = self.fwd.run(*q, &chunk) {
                    out.extend(chunk);
                    *q = t;
                    continue;
                }
            }
            let choices: Vec<(u32, usize)> =
                (0..self.fwd.symbols() as u32).filter_map(|s| self.fwd.step(*q, s).map(|t| (s, t))).collect();
            let &(s, t) = choices.choose(&mut self.rng).expect("essential graph");
            out.push(s);
            *q = t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::parse_presentation;

    #[test]
    fn samples_are_admissible() {
        let x = parse_presentation(r#"{"alphabet":["0","1"],"kind":"forbidden","forbidden":["11"]}"#).unwrap();
        let mut s = Sampler::new(&x, vec![vec![0, 1], vec![0]], 4, 7);
        for _ in 0..20 {
            let w = s.word(200);
            assert!(w.windows(2).all(|p| p != [1, 1]));
            let e = s.extend(&w[50..80], 30, 30);
            assert_eq!(&e[30..60], &w[50..80]);
            assert!(e.windows(2).all(|p| p != [1, 1]));
        }
    }
}
