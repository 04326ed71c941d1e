//! Lyndon words, one per primitive orbit, in lexicographic order.

/// Calls `emit` on every Lyndon word of length `n` over `0..k` whose
/// prefixes all satisfy `keep`, in lexicographic order. Subtrees whose
/// prefix fails `keep` are skipped.
pub fn for_each_lyndon<K, F>(k: u32, n: usize, mut keep: K, mut emit: F)
where
    K: FnMut(&[u32]) -> bool,
    F: FnMut(&[u32]),
{
    if n == 0 || k == 0 {
        return;
    }
    let mut a = vec![0u32; n + 1];
    gen(1, 1, k, n, &mut a, &mut keep, &mut emit);
}

fn gen<K, F>(t: usize, p: usize, k: u32, n: usize, a: &mut [u32], keep: &mut K, emit: &mut F)
where
    K: FnMut(&[u32]) -> bool,
    F: FnMut(&[u32]),
{
    if t > n {
        if p == n {
            emit(&a[1..=n]);
        }
        return;
    }
    a[t] = a[t - p];
    if keep(&a[1..=t]) {
        gen(t + 1, p, k, n, a, keep, emit);
    }
    for j in a[t - p] + 1..k {
        a[t] = j;
        if keep(&a[1..=t]) {
            gen(t + 1, t, k, n, a, keep, emit);
        }
    }
}

pub fn lyndon_words(k: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for_each_lyndon(k, n, |_| true, |w| out.push(w.to_vec()));
    out
}

/// Index of the lexicographically least rotation of `w`.
pub fn least_rotation(w: &[u32]) -> usize {
    let n = w.len();
    (0..n)
        .min_by(|&i, &j| {
            let a = w[i..].iter().chain(&w[..i]);
            let b = w[j..].iter().chain(&w[..j]);
            a.cmp(b)
        })
        .unwrap_or(0)
}

pub fn rotate(w: &[u32], r: usize) -> Vec<u32> {
    if w.is_empty() {
        return Vec::new();
    }
    let r = r % w.len();
    w[r..].iter().chain(&w[..r]).copied().collect()
}

/// Least `q` dividing `|w|` with `w` invariant under rotation by `q`.
pub fn primitive_period(w: &[u32]) -> usize {
    let n = w.len();
    (1..=n).find(|&q| n % q == 0 && (0..n).all(|i| w[i] == w[(i + q) % n])).unwrap_or(0)
}
