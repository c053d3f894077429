//! Instance factories: the two-matchings-of-a-cycle extremal construction,
//! Latin-square colorings of K_{n,n}, and seeded random families.
//!
//! Everything here is a pure function of its arguments; randomized factories
//! take an explicit seed and are deterministic across platforms (seed mixing
//! and sampling use fixed-width integer arithmetic only).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::family::MatchingFamily;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not a Latin square: {0}")]
    NotLatin(String),
}

/// splitmix64 finalizer; the fixed mixing function behind all per-color and
/// per-trial sub-seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The extremal family built from the two perfect matchings of the cycle
/// C_{2n}: k copies of the odd matching and n-k copies of the even one.
///
/// Cycle layout: the cycle visits u_0, w_0, u_1, w_1, ...; the odd matching
/// is the identity {(i, i)} and the even matching is {(i, (i-1) mod n)}.
/// For 1 <= k <= n-1 the family has no full rainbow matching; for k = n all
/// colors coincide and a full rainbow matching exists.
pub fn cycle_family(n: usize, k: usize) -> Result<MatchingFamily, GenError> {
    if n < 2 {
        return Err(GenError::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if k < 1 || k > n {
        return Err(GenError::InvalidParameter(format!(
            "k must satisfy 1 <= k <= n, got k={k} for n={n}"
        )));
    }
    let odd: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    let even: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + n - 1) % n)).collect();
    let matchings = (0..n)
        .map(|c| if c < k { odd.clone() } else { even.clone() })
        .collect();
    Ok(MatchingFamily::new(n, n, matchings).expect("cycle construction is always valid"))
}

/// The 2n-2 variant: n-1 copies of the odd matching followed by n-1 copies
/// of the even matching, over the same host.
pub fn cycle_family_extended(n: usize) -> Result<MatchingFamily, GenError> {
    if n < 2 {
        return Err(GenError::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    let odd: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    let even: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + n - 1) % n)).collect();
    let matchings = (0..2 * n - 2)
        .map(|c| if c < n - 1 { odd.clone() } else { even.clone() })
        .collect();
    Ok(MatchingFamily::new(n, n, matchings).expect("cycle construction is always valid"))
}

/// An order-n Latin square: every row and column is a permutation of 0..n-1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatinSquare {
    order: usize,
    cells: Vec<Vec<usize>>,
}

impl LatinSquare {
    pub fn new(cells: Vec<Vec<usize>>) -> Result<Self, GenError> {
        let order = cells.len();
        if order == 0 {
            return Err(GenError::NotLatin("empty square".into()));
        }
        for (r, row) in cells.iter().enumerate() {
            if row.len() != order {
                return Err(GenError::NotLatin(format!(
                    "row {r} has length {}, expected {order}",
                    row.len()
                )));
            }
            let mut seen = vec![false; order];
            for &s in row {
                if s >= order {
                    return Err(GenError::NotLatin(format!("symbol {s} out of range in row {r}")));
                }
                if seen[s] {
                    return Err(GenError::NotLatin(format!("symbol {s} repeated in row {r}")));
                }
                seen[s] = true;
            }
        }
        for c in 0..order {
            let mut seen = vec![false; order];
            for (r, row) in cells.iter().enumerate() {
                let s = row[c];
                if seen[s] {
                    return Err(GenError::NotLatin(format!(
                        "symbol {s} repeated in column {c} (row {r})"
                    )));
                }
                seen[s] = true;
            }
        }
        Ok(LatinSquare { order, cells })
    }

    /// The cyclic square cells[r][c] = (r + c) mod n.
    pub fn cyclic(order: usize) -> Result<Self, GenError> {
        if order == 0 {
            return Err(GenError::InvalidParameter("order must be >= 1".into()));
        }
        let cells = (0..order)
            .map(|r| (0..order).map(|c| (r + c) % order).collect())
            .collect();
        Self::new(cells)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }
}

/// The family of symbol color classes of a Latin square: color s+1 holds the
/// cells bearing symbol s, a perfect matching of K_{n,n}; the n colors
/// partition all n^2 edges.
pub fn latin_square_family(square: &LatinSquare) -> MatchingFamily {
    let n = square.order();
    let mut matchings = vec![Vec::with_capacity(n); n];
    for (r, row) in square.cells().iter().enumerate() {
        for (c, &s) in row.iter().enumerate() {
            matchings[s].push((r, c));
        }
    }
    MatchingFamily::new(n, n, matchings).expect("Latin square classes are matchings")
}

/// All order-n Latin squares, in lexicographic order of their row-major cell
/// listing. Intended for small orders (576 squares at order 4).
pub fn enumerate_latin_squares(order: usize) -> Vec<LatinSquare> {
    let mut out = Vec::new();
    if order == 0 {
        return out;
    }
    let mut cells = vec![vec![0usize; order]; order];
    let mut row_used = vec![vec![false; order]; order];
    let mut col_used = vec![vec![false; order]; order];
    fn rec(
        pos: usize,
        order: usize,
        cells: &mut Vec<Vec<usize>>,
        row_used: &mut Vec<Vec<bool>>,
        col_used: &mut Vec<Vec<bool>>,
        out: &mut Vec<LatinSquare>,
    ) {
        if pos == order * order {
            out.push(LatinSquare::new(cells.clone()).unwrap());
            return;
        }
        let (r, c) = (pos / order, pos % order);
        for s in 0..order {
            if !row_used[r][s] && !col_used[c][s] {
                row_used[r][s] = true;
                col_used[c][s] = true;
                cells[r][c] = s;
                rec(pos + 1, order, cells, row_used, col_used, out);
                row_used[r][s] = false;
                col_used[c][s] = false;
            }
        }
    }
    rec(0, order, &mut cells, &mut row_used, &mut col_used, &mut out);
    out
}

/// A seeded random Latin square, found by hill-climbing: rows start as
/// random permutations (rows are always valid) and in-row swaps are accepted
/// whenever they do not increase the number of column conflicts, restarting
/// from fresh rows when progress stalls. The sampling is biased; that is
/// acceptable for desk-scale probing and documented here.
pub fn random_latin_square(order: usize, seed: u64) -> Result<LatinSquare, GenError> {
    if order == 0 {
        return Err(GenError::InvalidParameter("order must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x1a71));
    loop {
        let mut cells: Vec<Vec<usize>> = (0..order)
            .map(|_| {
                let mut row: Vec<usize> = (0..order).collect();
                row.shuffle(&mut rng);
                row
            })
            .collect();
        // col_count[c][s] = how many rows put symbol s in column c.
        let mut col_count = vec![vec![0usize; order]; order];
        for row in &cells {
            for (c, &s) in row.iter().enumerate() {
                col_count[c][s] += 1;
            }
        }
        let conflicts = |col_count: &Vec<Vec<usize>>| -> usize {
            col_count
                .iter()
                .flatten()
                .map(|&k| k.saturating_sub(1))
                .sum()
        };
        let mut cur = conflicts(&col_count);
        let mut stall = 0usize;
        let stall_limit = 200 * order * order;
        while cur > 0 && stall < stall_limit {
            let r = rng.gen_range(0..order);
            let c1 = rng.gen_range(0..order);
            let c2 = rng.gen_range(0..order);
            if c1 == c2 {
                continue;
            }
            let (s1, s2) = (cells[r][c1], cells[r][c2]);
            let before = [
                col_count[c1][s1].saturating_sub(1),
                col_count[c2][s2].saturating_sub(1),
                col_count[c1][s2].saturating_sub(1),
                col_count[c2][s1].saturating_sub(1),
            ]
            .iter()
            .sum::<usize>();
            col_count[c1][s1] -= 1;
            col_count[c2][s2] -= 1;
            col_count[c1][s2] += 1;
            col_count[c2][s1] += 1;
            let after = [
                col_count[c1][s1].saturating_sub(1),
                col_count[c2][s2].saturating_sub(1),
                col_count[c1][s2].saturating_sub(1),
                col_count[c2][s1].saturating_sub(1),
            ]
            .iter()
            .sum::<usize>();
            if after <= before {
                cells[r][c1] = s2;
                cells[r][c2] = s1;
                cur -= before - after;
                if after < before {
                    stall = 0;
                } else {
                    stall += 1;
                }
            } else {
                // revert
                col_count[c1][s2] -= 1;
                col_count[c2][s1] -= 1;
                col_count[c1][s1] += 1;
                col_count[c2][s2] += 1;
                stall += 1;
            }
        }
        if cur == 0 {
            return LatinSquare::new(cells);
        }
    }
}

/// A family of `n` independent uniform random matchings of exactly `size`
/// edges each in the K_{u_size,w_size} host.
///
/// Each matching is drawn by sampling `size` left vertices, `size` right
/// vertices, and pairing them in sampled order; the per-color RNG is seeded
/// with `mix_seed(seed, color)`, so the output is a pure function of the
/// arguments.
pub fn random_family(
    n: usize,
    size: usize,
    u_size: usize,
    w_size: usize,
    seed: u64,
) -> Result<MatchingFamily, GenError> {
    if n == 0 {
        return Err(GenError::InvalidParameter("n must be >= 1".into()));
    }
    if size > u_size.min(w_size) {
        return Err(GenError::InvalidParameter(format!(
            "matching size {size} exceeds host bound min({u_size},{w_size})"
        )));
    }
    let mut matchings = Vec::with_capacity(n);
    for color in 0..n as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, color));
        let lefts = sample_indices(&mut rng, u_size, size);
        let rights = sample_indices(&mut rng, w_size, size);
        matchings.push(lefts.into_iter().zip(rights).collect::<Vec<_>>());
    }
    Ok(MatchingFamily::new(u_size, w_size, matchings).expect("sampled matchings are valid"))
}

/// `amount` distinct values from 0..len via partial Fisher-Yates, in draw order.
fn sample_indices(rng: &mut ChaCha8Rng, len: usize, amount: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..len).collect();
    let mut out = Vec::with_capacity(amount);
    for i in 0..amount {
        let j = rng.gen_range(i..len);
        pool.swap(i, j);
        out.push(pool[i]);
    }
    out
}
