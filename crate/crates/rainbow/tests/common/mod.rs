//! Shared test helpers: a separately-coded naive enumerator used as an
//! independent oracle, and small instance builders.

use rainbow_matching::{Edge, MatchingFamily, RainbowMatching};

/// Maximum rainbow matching size by exhaustive enumeration of all
/// product(|F_i|+1) partial choice functions. Independent of the search in
/// the library: no pruning, no ordering assumptions.
pub fn naive_max_rainbow_size(family: &MatchingFamily) -> usize {
    fn rec(family: &MatchingFamily, color: usize, picked: &mut Vec<Edge>) -> usize {
        if color > family.n() {
            return picked.len();
        }
        // Skip this color.
        let mut best = rec(family, color + 1, picked);
        for &e in family.matching(color).edges() {
            if picked.iter().all(|p| p.disjoint(&e)) {
                picked.push(e);
                best = best.max(rec(family, color + 1, picked));
                picked.pop();
            }
        }
        best
    }
    rec(family, 1, &mut Vec::new())
}

/// True iff some full choice of pairwise disjoint edges exists, by the same
/// naive enumeration.
#[allow(dead_code)]
pub fn naive_has_full(family: &MatchingFamily) -> bool {
    naive_max_rainbow_size(family) == family.n()
}

#[allow(dead_code)]
pub fn fam(u: usize, w: usize, m: &[&[(usize, usize)]]) -> MatchingFamily {
    MatchingFamily::new(u, w, m.iter().map(|s| s.to_vec()).collect()).unwrap()
}

/// All matchings with at most `max_edges` edges in the u x w host, as raw
/// edge lists, built by simple backtracking over the edge list.
#[allow(dead_code)]
pub fn all_small_matchings(u: usize, w: usize, max_edges: usize) -> Vec<Vec<(usize, usize)>> {
    let edges: Vec<(usize, usize)> = (0..u).flat_map(|a| (0..w).map(move |b| (a, b))).collect();
    let mut out = vec![vec![]];
    fn rec(
        edges: &[(usize, usize)],
        start: usize,
        cur: &mut Vec<(usize, usize)>,
        max_edges: usize,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if cur.len() == max_edges {
            return;
        }
        for i in start..edges.len() {
            let e = edges[i];
            if cur.iter().all(|&(a, b)| a != e.0 && b != e.1) {
                cur.push(e);
                out.push(cur.clone());
                rec(edges, i + 1, cur, max_edges, out);
                cur.pop();
            }
        }
    }
    rec(&edges, 0, &mut Vec::new(), max_edges, &mut out);
    out
}

/// Asserts that `r` is a valid rainbow matching of the expected size.
#[allow(dead_code)]
pub fn assert_valid_of_size(family: &MatchingFamily, r: &RainbowMatching, size: usize) {
    rainbow_matching::check_rainbow_matching(family, r).expect("valid rainbow matching");
    assert_eq!(r.size(), size);
}
