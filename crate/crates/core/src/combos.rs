//! Lexicographic k-subsets of `0..n` and deterministic parallel scans over them.
//!
//! Scans split the rank range `[0, C(n,k))` into fixed-size blocks. Hits are
//! merged in rank order, so the output never depends on the worker count.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::monomial::binomial;

/// Lexicographic iterator over the k-subsets of `0..n`.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    cur: Vec<usize>,
    first: bool,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            cur: (0..k).collect(),
            first: true,
            done: k > n,
        }
    }

    /// Starts at the given combination instead of the first one.
    pub fn starting_at(n: usize, start: Vec<usize>) -> Self {
        Combinations {
            n,
            done: start.len() > n,
            cur: start,
            first: true,
        }
    }

    /// Moves to the next combination in place; false once exhausted.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if self.first {
            self.first = false;
            return true;
        }
        let k = self.cur.len();
        let n = self.n;
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.cur[i] < n - k + i {
                self.cur[i] += 1;
                for j in i + 1..k {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                return true;
            }
        }
        self.done = true;
        false
    }

    pub fn current(&self) -> &[usize] {
        &self.cur
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().then(|| self.cur.clone())
    }
}

/// The combination of lexicographic rank `rank` among the k-subsets of `0..n`.
pub fn unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0usize;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            let block = binomial((n - next - 1) as u64, remaining as u64);
            if rank < block {
                out.push(next);
                next += 1;
                break;
            }
            rank -= block;
            next += 1;
        }
    }
    out
}

const BLOCK: u128 = 4096;

fn blocks(n: usize, k: usize) -> Vec<(u128, u128)> {
    let total = binomial(n as u64, k as u64);
    let mut out = Vec::new();
    let mut start = 0;
    while start < total {
        let end = (start + BLOCK).min(total);
        out.push((start, end));
        start = end;
    }
    out
}

fn scan_block<S, T, F>(n: usize, k: usize, (start, end): (u128, u128), state: &mut S, f: &F, first_only: bool) -> Vec<(Vec<usize>, T)>
where
    F: Fn(&mut S, &[usize]) -> Option<T>,
{
    let mut it = Combinations::starting_at(n, unrank(n, k, start));
    let mut hits = Vec::new();
    for _ in start..end {
        if !it.advance() {
            break;
        }
        if let Some(t) = f(state, it.current()) {
            hits.push((it.current().to_vec(), t));
            if first_only {
                break;
            }
        }
    }
    hits
}

fn with_pool<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(op),
        Err(_) => op(),
    }
}

/// Every k-subset on which `f` reports a hit, in lexicographic order.
/// `init` builds per-worker scratch state.
pub fn scan_all<S, T, I, F>(n: usize, k: usize, workers: usize, init: I, f: F) -> Vec<(Vec<usize>, T)>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &[usize]) -> Option<T> + Sync + Send,
{
    if k > n {
        return Vec::new();
    }
    let blocks = blocks(n, k);
    if workers <= 1 {
        let mut state = init();
        return blocks
            .into_iter()
            .flat_map(|b| scan_block(n, k, b, &mut state, &f, false))
            .collect();
    }
    with_pool(workers, || {
        blocks
            .into_par_iter()
            .map_init(&init, |state, b| scan_block(n, k, b, state, &f, false))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    })
}

/// The lexicographically first k-subset on which `f` reports a hit.
pub fn scan_first<S, T, I, F>(n: usize, k: usize, workers: usize, init: I, f: F) -> Option<(Vec<usize>, T)>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &[usize]) -> Option<T> + Sync + Send,
{
    if k > n {
        return None;
    }
    let blocks = blocks(n, k);
    if workers <= 1 {
        let mut state = init();
        return blocks
            .into_iter()
            .find_map(|b| scan_block(n, k, b, &mut state, &f, true).into_iter().next());
    }
    let best = AtomicUsize::new(usize::MAX);
    with_pool(workers, || {
        blocks
            .into_par_iter()
            .enumerate()
            .map_init(&init, |state, (i, b)| {
                if i > best.load(Ordering::Relaxed) {
                    return None;
                }
                let hit = scan_block(n, k, b, state, &f, true).into_iter().next();
                if hit.is_some() {
                    best.fetch_min(i, Ordering::Relaxed);
                }
                hit.map(|h| (i, h))
            })
            .flatten()
            .min_by_key(|(i, _)| *i)
            .map(|(_, h)| h)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerates_in_order() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn unrank_inverts_enumeration() {
        for (r, c) in Combinations::new(9, 4).enumerate() {
            assert_eq!(unrank(9, 4, r as u128), c);
        }
    }

    #[test]
    fn scans_are_worker_independent() {
        let pred = |_: &mut (), c: &[usize]| (c.iter().sum::<usize>() % 7 == 0).then_some(c[0]);
        let one = scan_all(20, 4, 1, || (), pred);
        let many = scan_all(20, 4, 4, || (), pred);
        assert_eq!(one.len() as u128, Combinations::new(20, 4).filter(|c| c.iter().sum::<usize>() % 7 == 0).count() as u128);
        assert_eq!(one.iter().map(|h| &h.0).collect::<Vec<_>>(), many.iter().map(|h| &h.0).collect::<Vec<_>>());

        let late = |_: &mut (), c: &[usize]| (c[0] >= 10).then_some(());
        assert_eq!(scan_first(20, 4, 1, || (), late).unwrap().0, vec![10, 11, 12, 13]);
        assert_eq!(scan_first(20, 4, 3, || (), late).unwrap().0, vec![10, 11, 12, 13]);
        assert!(scan_first(20, 4, 3, || (), |_: &mut (), _: &[usize]| None::<()>).is_none());
    }
}
