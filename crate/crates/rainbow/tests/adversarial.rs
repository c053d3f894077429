//! Structured worst-case instances that force the deep augmentation routes.
//!
//! Random families at the guaranteed size are almost always finished by a
//! spare edge or a single swap, so the scaffold, pair-swap, chain, and
//! terminal exchanges would stay untested. The builder here constructs
//! families at exactly the threshold size where those cheap exchanges
//! provably fail:
//!
//! * R is the diagonal r_i = (i-1, i-1) for colors 1..n-1; color n is spare.
//! * The spare color consists of anchor edges a_j = (j-1, y_j) for the
//!   anchored colors and blockers b_i = (x_i, i-1) for every color, so every
//!   spare edge meets R (no spare-edge route).
//! * Each color class is its R-edge plus cross edges into the covered
//!   vertex sets plus one "safe" free-free edge that re-blocks exactly the
//!   spare edges its R-edge was blocking, so no single swap ever frees a
//!   spare edge.
//! * The chain's walk is steered through a chosen color path by ordering
//!   the free left endpoints of the cross edges (the builder assigns the
//!   smallest admissible value to the intended next color at each step).
//!
//! Each deterministic test pins the route the augmentation machine must
//! take; the randomized test scrambles the steering to exercise the chain
//! machinery across many distinct instances.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use rainbow_matching::exact;
use rainbow_matching::family::{Edge, MatchingFamily, RainbowMatching};
use rainbow_matching::generators::mix_seed;
use rainbow_matching::solver::{
    augment_step_traced, compute_scaffold, guaranteed_size, verify_claims, AugmentRoute,
};
use rainbow_matching::Color;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Parameters for one adversarial instance. Colors 1..n-1 are represented
/// by the diagonal; `excluded` colors get no anchor edge in the spare color
/// (they can only be linked through reroute edges). `d_map[i][j]` is the
/// free left endpoint of color i's cross edge into covered right vertex
/// j-1; `c_map[i][j]` is the free right endpoint of color i's cross edge
/// from covered left vertex j-1 (absent entries are dropped edges).
struct Adversarial {
    n: usize,
    excluded: BTreeSet<Color>,
    d_map: BTreeMap<Color, BTreeMap<Color, usize>>,
    c_map: BTreeMap<Color, BTreeMap<Color, usize>>,
    /// Give every excluded color a free-free edge (enables the pair swap).
    pairswap_extra: bool,
    /// Replace this color's safe edge by one that fails to re-block its
    /// anchor, deliberately leaving a single swap open.
    leak: Option<(Color, usize)>,
}

fn free_pool(n: usize) -> Vec<usize> {
    ((n - 1)..=(2 * n - 3)).collect()
}

/// The dedicated free left endpoint of color i's blocker in the spare color.
fn x_of(n: usize, i: Color) -> usize {
    (n - 1) + (i - 1)
}

/// The dedicated free right endpoint of anchored color j's anchor edge.
fn y_of(n: usize, anchored: &[Color], j: Color) -> usize {
    let rank = anchored.iter().position(|&a| a == j).expect("anchored");
    (n - 1) + rank
}

impl Adversarial {
    fn anchored(&self) -> Vec<Color> {
        (1..self.n).filter(|c| !self.excluded.contains(c)).collect()
    }

    fn build(&self) -> (MatchingFamily, RainbowMatching) {
        let n = self.n;
        let host = 2 * n - 2;
        let anchored = self.anchored();
        let max_w = 2 * n - 3;

        let mut matchings: Vec<Vec<(usize, usize)>> = Vec::new();
        for i in 1..n {
            let mut edges = vec![(i - 1, i - 1)];
            for j in (1..n).filter(|&j| j != i) {
                if let Some(&c) = self.c_map[&i].get(&j) {
                    edges.push((j - 1, c));
                }
                edges.push((self.d_map[&i][&j], j - 1));
            }
            if let Some(&(_, w)) = self.leak.as_ref().filter(|&&(c, _)| c == i) {
                edges.push((x_of(n, i), w));
            } else if anchored.contains(&i) {
                edges.push((x_of(n, i), y_of(n, &anchored, i)));
            } else if self.pairswap_extra {
                edges.push((x_of(n, i), max_w));
            }
            matchings.push(edges);
        }
        let mut spare: Vec<(usize, usize)> = anchored
            .iter()
            .map(|&j| (j - 1, y_of(n, &anchored, j)))
            .collect();
        spare.extend((1..n).map(|i| (x_of(n, i), i - 1)));
        matchings.push(spare);

        let family = MatchingFamily::new(host, host, matchings).expect("valid adversarial family");
        let required = guaranteed_size(n);
        for c in 1..=n {
            assert!(
                family.matching(c).len() >= required,
                "color {c} has {} edges, need {required}",
                family.matching(c).len()
            );
        }
        let mut r = RainbowMatching::new();
        for i in 1..n {
            r.assign(i, Edge::new(i - 1, i - 1));
        }
        rainbow_matching::check_rainbow_matching(&family, &r).expect("valid start");
        (family, r)
    }
}

/// Ascending assignment of `values` to the colors in `domain`, with explicit
/// overrides applied first.
fn assign_map(
    domain: &[Color],
    values: &[usize],
    overrides: &BTreeMap<Color, usize>,
) -> BTreeMap<Color, usize> {
    let mut out = overrides.clone();
    let taken: BTreeSet<usize> = overrides.values().copied().collect();
    let mut rest = values.iter().filter(|v| !taken.contains(v));
    for &j in domain {
        if !out.contains_key(&j) {
            out.insert(j, *rest.next().expect("enough values"));
        }
    }
    out
}

/// Builds an instance whose chain walk follows `path` (a sequence of colors
/// starting at the smallest anchored one). With `closed_t = Some(t)` the
/// final path color's smallest admissible edge points back at the right
/// endpoint of the R-edge at path position t (1-based), closing the chain;
/// with `closed_t = None` the walk runs to exhaustion and the final path
/// color becomes the trailing color. `drops` removes the cross edge of
/// color i into covered left vertex j-1 (used to steer the terminal scan).
fn steered(
    n: usize,
    excluded: &[Color],
    path: &[Color],
    closed_t: Option<usize>,
    drops: &[(Color, Color)],
    pairswap_extra: bool,
) -> Adversarial {
    let excluded: BTreeSet<Color> = excluded.iter().copied().collect();
    let pool = free_pool(n);

    // Steering: walk the path, giving each step the smallest value that is
    // admissible for its color and still unused, assigned to the intended
    // next color; the closure step targets the path color at position t.
    let mut steps: Vec<(Color, Color)> = path.windows(2).map(|w| (w[0], w[1])).collect();
    if let Some(t) = closed_t {
        steps.push((*path.last().unwrap(), path[t - 1]));
    }
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut overrides: BTreeMap<Color, BTreeMap<Color, usize>> = BTreeMap::new();
    for &(cur, target) in &steps {
        let v = *pool
            .iter()
            .find(|&&v| v != x_of(n, cur) && !used.contains(&v))
            .expect("steering value available");
        used.insert(v);
        overrides.entry(cur).or_default().insert(target, v);
    }

    let mut d_map = BTreeMap::new();
    let mut c_map = BTreeMap::new();
    for i in 1..n {
        let domain: Vec<Color> = (1..n).filter(|&j| j != i).collect();
        let d_values: Vec<usize> = pool.iter().copied().filter(|&v| v != x_of(n, i)).collect();
        let empty = BTreeMap::new();
        let over = overrides.get(&i).unwrap_or(&empty);
        d_map.insert(i, assign_map(&domain, &d_values, over));

        let anchored: Vec<Color> = (1..n).filter(|c| !excluded.contains(c)).collect();
        let c_skip = if excluded.contains(&i) {
            *pool.last().unwrap()
        } else {
            y_of(n, &anchored, i)
        };
        let mut c_values: Vec<usize> = pool.iter().copied().filter(|&v| v != c_skip).collect();
        // Rotate per color so no single value sits at the same position in
        // every class (the pair swap needs differing reroute endpoints).
        if !excluded.contains(&i) {
            let shift = (i - 1) % c_values.len();
            c_values.rotate_left(shift);
        }
        let mut cm = assign_map(&domain, &c_values, &BTreeMap::new());
        cm.retain(|&j, _| !drops.contains(&(i, j)));
        c_map.insert(i, cm);
    }

    Adversarial { n, excluded, d_map, c_map, pairswap_extra, leak: None }
}

/// As [`steered`], but color 1 trades one cross edge for a free-free edge
/// that fails to re-block its anchor: the single-swap exchange then fires
/// before any scaffold is built.
fn steered_with_leak(n: usize, excluded: &[Color]) -> Adversarial {
    let mut adv = steered(n, excluded, &[1, 2], Some(1), &[], false);
    let (&drop_j, &freed_w) = adv.c_map[&1].iter().next().expect("color 1 has cross edges");
    adv.c_map.get_mut(&1).unwrap().remove(&drop_j);
    adv.leak = Some((1, freed_w));
    adv
}

/// Random steering: the cross-edge endpoint assignments are shuffled, so the
/// chain walk (and its termination case) varies per seed.
fn randomized(n: usize, excluded: &[Color], pairswap_extra: bool, seed: u64) -> Adversarial {
    let excluded_set: BTreeSet<Color> = excluded.iter().copied().collect();
    let pool = free_pool(n);
    let anchored: Vec<Color> = (1..n).filter(|c| !excluded_set.contains(c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d_map = BTreeMap::new();
    let mut c_map = BTreeMap::new();
    for i in 1..n {
        let domain: Vec<Color> = (1..n).filter(|&j| j != i).collect();
        let mut d_values: Vec<usize> =
            pool.iter().copied().filter(|&v| v != x_of(n, i)).collect();
        d_values.shuffle(&mut rng);
        d_map.insert(i, domain.iter().copied().zip(d_values).collect::<BTreeMap<_, _>>());
        let c_skip = if excluded_set.contains(&i) {
            *pool.last().unwrap()
        } else {
            y_of(n, &anchored, i)
        };
        let mut c_values: Vec<usize> = pool.iter().copied().filter(|&v| v != c_skip).collect();
        c_values.shuffle(&mut rng);
        c_map.insert(i, domain.iter().copied().zip(c_values).collect::<BTreeMap<_, _>>());
    }
    Adversarial { n, excluded: excluded_set, d_map, c_map, pairswap_extra, leak: None }
}

fn run(adv: &Adversarial) -> (AugmentRoute, Option<usize>, MatchingFamily) {
    let (family, start) = adv.build();
    let (full, trace) = augment_step_traced(&family, &start)
        .unwrap_or_else(|e| panic!("augmentation failed: {e}"));
    assert!(full.is_full(family.n()));
    rainbow_matching::check_rainbow_matching(&family, &full).expect("valid result");
    if let Some(claims) = &trace.claims {
        assert!(claims.all_hold(), "claim violations:\n{claims}");
    }
    if let Some(rc) = &trace.reroute_claims {
        assert!(rc.all_hold(), "reroute violations:\n{rc}");
    }
    (trace.route.expect("route recorded"), trace.chain_len, family)
}

#[test]
fn scaffold_structure_is_as_designed() {
    let adv = steered(8, &[7], &[1, 2, 3, 4, 5], None, &[], false);
    let (family, start) = adv.build();
    let s = compute_scaffold(&family, &start).unwrap();
    s.check_invariants().unwrap();
    assert_eq!(s.ell, 6);
    assert_eq!(s.anchored, (1..=6).collect());
    assert_eq!(s.linked, [7].into_iter().collect());
    assert_eq!(s.link_count, 1);
    assert_eq!(s.u_reach.len(), s.ell + 1);
    let report = verify_claims(&s);
    assert!(report.all_hold(), "{report}");
}

#[test]
fn chain_closes_and_swaps_through_an_anchored_segment() {
    // n=6: every color is anchored (no room for linked colors), the walk
    // 1 -> 2 immediately closes back on position 1.
    let adv = steered(6, &[], &[1, 2], Some(1), &[], false);
    let (route, chain_len, _) = run(&adv);
    assert_eq!(route, AugmentRoute::ChainClosed);
    assert_eq!(chain_len, Some(1));
}

#[test]
fn chain_closes_on_an_all_linked_segment() {
    // n=10 has two linked colors; the walk 1 -> 8 -> 9 closes back on
    // position 2, so the closed segment {8, 9} contains no anchored color
    // and the exchange must re-represent an anchored color from outside.
    let adv = steered(10, &[8, 9], &[1, 8, 9], Some(2), &[], false);
    let (route, chain_len, _) = run(&adv);
    assert_eq!(route, AugmentRoute::ChainClosed);
    assert_eq!(chain_len, Some(2));
}

#[test]
fn exhausted_chain_with_anchored_trailing_color() {
    // n=8, budget d+3 = 4: the walk 1 -> 2 -> 3 -> 4 -> 5 runs out with the
    // anchored color 5 trailing.
    let adv = steered(8, &[7], &[1, 2, 3, 4, 5], None, &[], false);
    let (route, chain_len, _) = run(&adv);
    assert_eq!(route, AugmentRoute::ChainExhaustedAnchored);
    assert_eq!(chain_len, Some(4));
}

#[test]
fn exhausted_chain_with_linked_trailing_color_blocked_in_chain() {
    // Same shape but steered into the linked color 7; its first edge into
    // the free right set starts at color 1's left vertex, which the chain
    // has already swapped out.
    let adv = steered(8, &[7], &[1, 2, 3, 4, 7], None, &[], false);
    let (route, chain_len, _) = run(&adv);
    assert_eq!(route, AugmentRoute::ChainExhaustedLinked);
    assert_eq!(chain_len, Some(4));
}

#[test]
fn exhausted_chain_with_linked_trailing_color_blocked_outside_chain() {
    // n=16, five linked colors, budget 8: the walk alternates through four
    // of them and trails at the fifth (color 15). Its cross edges into the
    // chain's anchored colors are dropped, so the first usable edge is
    // blocked by the still-present R-edge of color 5 — the exchange must
    // remove that edge and re-represent color 5 through a reroute.
    let n = 16;
    let path = [1, 11, 2, 12, 3, 13, 4, 14, 15];
    let drops = [(15, 1), (15, 2), (15, 3), (15, 4)];
    let adv = steered(n, &[11, 12, 13, 14, 15], &path, None, &drops, false);
    let (route, chain_len, _) = run(&adv);
    assert_eq!(route, AugmentRoute::ChainExhaustedLinked);
    assert_eq!(chain_len, Some(8));
}

#[test]
fn pair_swap_through_a_linked_color() {
    // Giving the linked color a free-free edge lets the cheaper pair
    // exchange preempt the chain entirely.
    let adv = steered(8, &[7], &[1, 2, 3, 4, 5], None, &[], true);
    let (route, chain_len, _) = run(&adv);
    assert_eq!(route, AugmentRoute::PairSwap);
    assert_eq!(chain_len, None);
}

#[test]
fn single_swap_fires_through_a_leaked_safe_edge() {
    // The leaked safe edge re-blocks only one of the two spare edges its
    // R-edge was holding back, so the single swap frees the other; n=8 is
    // the smallest size whose classes have the slack to drop a cross edge.
    let adv = steered_with_leak(8, &[7]);
    let (route, chain_len, _) = run(&adv);
    assert_eq!(route, AugmentRoute::SingleSwap);
    assert_eq!(chain_len, None);
}

#[test]
fn adversarial_instances_agree_with_the_oracle() {
    for (i, adv) in [
        steered(6, &[], &[1, 2], Some(1), &[], false),
        steered(8, &[7], &[1, 2, 3, 4, 5], None, &[], false),
        steered(8, &[7], &[1, 2, 3, 4, 7], None, &[], false),
        steered(10, &[8, 9], &[1, 8, 9], Some(2), &[], false),
    ]
    .iter()
    .enumerate()
    {
        let (family, _) = adv.build();
        assert!(
            exact::has_full_rainbow_matching(&family),
            "instance {i} must admit a full rainbow matching"
        );
    }
}

#[test]
fn randomized_steering_exercises_chain_invariants() {
    // 1200 scrambled instances; every one goes through scaffold, claims,
    // chain construction (invariant-checked inside the augmentation step),
    // and a terminal exchange. The route histogram must show both chain
    // terminations.
    let mut routes: BTreeMap<String, usize> = BTreeMap::new();
    let mut built = 0usize;
    for (case, &(n, excluded, extra)) in [
        (6usize, &[][..], false),
        (8, &[7][..], false),
        (8, &[7][..], true),
        (10, &[8, 9][..], false),
    ]
    .iter()
    .enumerate()
    {
        for trial in 0..300u64 {
            let seed = mix_seed(0xADE5, (case as u64) << 32 | trial);
            let adv = randomized(n, excluded, extra, seed);
            let (route, _, family) = run(&adv);
            assert_ne!(route, AugmentRoute::OracleRepair);
            *routes.entry(format!("{route:?}")).or_default() += 1;

            let (_, start) = adv.build();
            let s = compute_scaffold(&family, &start).unwrap();
            s.check_invariants().unwrap();
            assert!(verify_claims(&s).all_hold());
            built += 1;
        }
    }
    println!("adversarial route histogram over {built} instances: {routes:?}");
    assert!(routes.contains_key("ChainClosed"), "no closed chains seen");
    assert!(
        routes.contains_key("ChainExhaustedAnchored")
            || routes.contains_key("ChainExhaustedLinked"),
        "no exhausted chains seen"
    );
    assert!(!routes.contains_key("SpareEdge") && !routes.contains_key("SingleSwap"));
}
