//! Exact maximum-rainbow-matching oracle.
//!
//! Pruned backtracking over colors: colors are processed in increasing index
//! order, edges within a color in (u, w) lexicographic order, and "skip this
//! color" is branched last so full matchings are found before partial ones of
//! equal promise. Two prunings only: a remaining-colors bound against the
//! incumbent, and bit-vector occupancy tests for edge admissibility. The
//! search is deterministic and returns the lexicographically first (by color
//! index, then edge order) maximum solution.

use crate::family::{Edge, MatchingFamily, RainbowMatching};

/// Fixed-width bit-vector set over vertex indices.
#[derive(Clone)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; (len + 63) / 64],
        }
    }

    #[inline]
    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    #[inline]
    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }
}

struct Search<'a> {
    family: &'a MatchingFamily,
    target: usize,
    used_u: BitSet,
    used_w: BitSet,
    chosen: Vec<Option<Edge>>,
    best: Vec<Option<Edge>>,
    best_size: usize,
    done: bool,
}

impl<'a> Search<'a> {
    fn dfs(&mut self, color0: usize, count: usize) {
        let n = self.family.n();
        if color0 == n {
            if count > self.best_size {
                self.best_size = count;
                self.best.clone_from(&self.chosen);
                if self.best_size >= self.target {
                    self.done = true;
                }
            }
            return;
        }
        // Upper bound: even taking every remaining color cannot beat the incumbent.
        if count + (n - color0) <= self.best_size {
            return;
        }
        for &e in self.family.matching(color0 + 1).edges() {
            if self.used_u.contains(e.u) || self.used_w.contains(e.w) {
                continue;
            }
            self.used_u.insert(e.u);
            self.used_w.insert(e.w);
            self.chosen[color0] = Some(e);
            self.dfs(color0 + 1, count + 1);
            self.chosen[color0] = None;
            self.used_u.remove(e.u);
            self.used_w.remove(e.w);
            if self.done {
                return;
            }
        }
        self.dfs(color0 + 1, count);
    }
}

/// Returns a rainbow matching of maximum size for `family`.
///
/// With `target` given, the search stops as soon as a rainbow matching of
/// size at least `target` is found.
pub fn max_rainbow_matching(family: &MatchingFamily, target: Option<usize>) -> RainbowMatching {
    let n = family.n();
    let target = target.unwrap_or(n).min(n);
    let mut search = Search {
        family,
        target,
        used_u: BitSet::new(family.u_size()),
        used_w: BitSet::new(family.w_size()),
        chosen: vec![None; n],
        best: vec![None; n],
        best_size: 0,
        done: target == 0,
    };
    if !search.done {
        search.dfs(0, 0);
    }
    let mut r = RainbowMatching::new();
    for (idx, e) in search.best.iter().enumerate() {
        if let Some(e) = e {
            r.assign(idx + 1, *e);
        }
    }
    r
}

/// True iff the family admits a rainbow matching representing every color.
pub fn has_full_rainbow_matching(family: &MatchingFamily) -> bool {
    max_rainbow_matching(family, Some(family.n())).size() == family.n()
}
