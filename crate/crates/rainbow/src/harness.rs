//! Reproducible conjecture-probing campaigns.
//!
//! Each campaign runs a batch of instances, checks a rainbow-matching bound
//! on every one, and aggregates counts plus replayable witnesses into a
//! [`CampaignReport`]. Reports are deterministic functions of the campaign
//! parameters and seed: per-trial sub-seeds come from a fixed counter-mixing
//! scheme, trials are independent, and aggregation is order-independent, so
//! running with more worker threads never changes the output. Wall-clock
//! duration is tracked for operators but excluded from serialization to keep
//! repeated reports byte-identical.

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exact;
use crate::family::MatchingFamily;
use crate::generators::{
    cycle_family, enumerate_latin_squares, latin_square_family, mix_seed, random_family,
    random_latin_square, GenError,
};
use crate::solver::{self, find_full_rainbow_matching, greedy_rainbow_matching};

#[derive(Error, Debug)]
pub enum HarnessError {
    #[error("invalid campaign parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// How `check_upper_bound` tries to find a full rainbow matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// The augmentation pipeline (requires sizes >= ceil(3n/2)+1).
    Constructive,
    /// One greedy pass (guaranteed full only at sizes >= 2n-1).
    Greedy,
    /// The exact search.
    Exact,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Constructive => "constructive",
            Method::Greedy => "greedy",
            Method::Exact => "exact",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constructive" => Ok(Method::Constructive),
            "greedy" => Ok(Method::Greedy),
            "exact" => Ok(Method::Exact),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

/// Instance source for `check_near_full`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NearFullMode {
    /// Every Latin square of the given order (order <= 4 only).
    LatinExhaustive,
    /// Seeded random Latin squares.
    LatinRandom,
    /// Seeded random families of size floor(3n/2).
    Random,
    /// The cycle construction for every k in 1..n-1 (expects exactly n-1).
    Cycle,
}

impl NearFullMode {
    pub fn name(self) -> &'static str {
        match self {
            NearFullMode::LatinExhaustive => "latin-exhaustive",
            NearFullMode::LatinRandom => "latin-random",
            NearFullMode::Random => "random",
            NearFullMode::Cycle => "cycle",
        }
    }
}

impl std::str::FromStr for NearFullMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "latin-exhaustive" => Ok(NearFullMode::LatinExhaustive),
            "latin-random" => Ok(NearFullMode::LatinRandom),
            "random" => Ok(NearFullMode::Random),
            "cycle" => Ok(NearFullMode::Cycle),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

/// A replayable counterexample candidate: the instance, the bound it was
/// required to meet, and what was observed instead.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub trial: u64,
    pub seed: u64,
    pub observed: usize,
    pub required: usize,
    pub family: MatchingFamily,
}

/// Aggregated campaign outcome. Serialization deliberately omits `duration`
/// so identical parameters and seed produce byte-identical reports.
#[derive(Clone, Debug, Serialize)]
pub struct CampaignReport {
    pub kind: String,
    pub n: usize,
    pub size: usize,
    pub trials: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub instances_tested: u64,
    pub full_found: u64,
    pub near_full_found: u64,
    pub violations: u64,
    pub witnesses: Vec<Witness>,
    #[serde(skip)]
    pub duration: Duration,
}

impl CampaignReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The counts invariant: every tested instance is either a success for
    /// the campaign's bound or a recorded violation.
    pub fn counts_consistent(&self) -> bool {
        let successes = match self.kind.as_str() {
            "check-upper-bound" | "check-upper-bound-exhaustive" => self.full_found,
            "check-near-full" => self.near_full_found,
            "search-lower-bound" => self.instances_tested - self.violations,
            _ => return false,
        };
        successes + self.violations == self.instances_tested
            && self.violations == self.witnesses.len() as u64
    }
}

/// Runs `f` for trial indices `0..trials`, optionally across worker threads.
/// Results are collected in trial order, so the outcome is independent of
/// `jobs` and of scheduling.
fn run_trials<T: Send>(trials: u64, jobs: usize, f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    let jobs = jobs.max(1);
    if jobs == 1 || trials <= 1 {
        return (0..trials).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..trials).map(|_| None).collect();
    let chunk_size = (trials as usize).div_ceil(jobs);
    std::thread::scope(|scope| {
        for (ci, chunk) in slots.chunks_mut(chunk_size).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(f((ci * chunk_size + i) as u64));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("trial completed")).collect()
}

fn collect_witnesses(outcomes: Vec<Option<Witness>>) -> (u64, Vec<Witness>) {
    let witnesses: Vec<Witness> = outcomes.into_iter().flatten().collect();
    (witnesses.len() as u64, witnesses)
}

/// Checks that `trials` random families of the given color-class size all
/// admit a full rainbow matching via `method`. Host is `host` on both sides
/// (defaults to `size`). Violations carry the instance and the observed
/// maximum.
pub fn check_upper_bound(
    n: usize,
    size: usize,
    host: Option<usize>,
    trials: u64,
    seed: u64,
    method: Method,
    jobs: usize,
) -> Result<CampaignReport, HarnessError> {
    let start = Instant::now();
    if n == 0 {
        return Err(HarnessError::InvalidParameter("n must be at least 1".into()));
    }
    let host = host.unwrap_or(size);
    if host < size {
        return Err(HarnessError::InvalidParameter(format!(
            "host {host} is smaller than the color-class size {size}"
        )));
    }
    if method == Method::Constructive && size < solver::guaranteed_size(n) {
        return Err(HarnessError::InvalidParameter(format!(
            "constructive method needs size >= {}, got {size}",
            solver::guaranteed_size(n)
        )));
    }

    let outcomes = run_trials(trials, jobs, |trial| {
        let trial_seed = mix_seed(seed, trial);
        let family =
            random_family(n, size, host, host, trial_seed).expect("parameters pre-validated");
        let full = match method {
            Method::Constructive => find_full_rainbow_matching(&family)
                .ok()
                .filter(|r| r.is_full(n)),
            Method::Greedy => Some(greedy_rainbow_matching(&family)).filter(|r| r.is_full(n)),
            Method::Exact => {
                Some(exact::max_rainbow_matching(&family, Some(n))).filter(|r| r.is_full(n))
            }
        };
        match full {
            Some(_) => None,
            None => Some(Witness {
                trial,
                seed: trial_seed,
                observed: exact::max_rainbow_matching(&family, None).size(),
                required: n,
                family,
            }),
        }
    });
    let (violations, witnesses) = collect_witnesses(outcomes);
    let report = CampaignReport {
        kind: "check-upper-bound".into(),
        n,
        size,
        trials,
        seed,
        method: Some(method.name().into()),
        mode: None,
        instances_tested: trials,
        full_found: trials - violations,
        near_full_found: 0,
        violations,
        witnesses,
        duration: start.elapsed(),
    };
    debug_assert!(report.counts_consistent());
    Ok(report)
}

/// Exhaustively pins the two-color case at size 3: any two size-3 matchings
/// admit a full rainbow matching.
///
/// One edge of the second matching meets at most two edges of the first (one
/// per endpoint), so a disjoint partner always remains: that pigeonhole
/// argument needs no search. As a belt-and-braces check this enumerates
/// every instance over a K_{6,6} host anyway — 6 vertices per side suffice
/// because two size-3 matchings touch at most 6 per side, and independent
/// relabeling of rows and columns maps the first matching onto the diagonal
/// {(0,0),(1,1),(2,2)}, so only the second matching varies.
pub fn check_two_color_exhaustive() -> CampaignReport {
    let start = Instant::now();
    let first: Vec<(usize, usize)> = vec![(0, 0), (1, 1), (2, 2)];
    let mut instances = 0u64;
    let mut full_found = 0u64;
    let mut witnesses = Vec::new();

    // All ordered choices of 3 distinct left and 3 distinct right vertices.
    let mut second = Vec::new();
    for u0 in 0..6 {
        for u1 in 0..6 {
            for u2 in 0..6 {
                if u1 == u0 || u2 == u0 || u2 == u1 {
                    continue;
                }
                if !(u0 < u1 && u1 < u2) {
                    continue; // edge order inside a matching is irrelevant
                }
                for w0 in 0..6 {
                    for w1 in 0..6 {
                        for w2 in 0..6 {
                            if w1 == w0 || w2 == w0 || w2 == w1 {
                                continue;
                            }
                            second.push(vec![(u0, w0), (u1, w1), (u2, w2)]);
                        }
                    }
                }
            }
        }
    }
    for (trial, m2) in second.into_iter().enumerate() {
        let family = MatchingFamily::new(6, 6, vec![first.clone(), m2]).expect("valid pair");
        instances += 1;
        if exact::has_full_rainbow_matching(&family) {
            full_found += 1;
        } else {
            witnesses.push(Witness {
                trial: trial as u64,
                seed: 0,
                observed: exact::max_rainbow_matching(&family, None).size(),
                required: 2,
                family,
            });
        }
    }
    let report = CampaignReport {
        kind: "check-upper-bound-exhaustive".into(),
        n: 2,
        size: 3,
        trials: instances,
        seed: 0,
        method: Some("exact".into()),
        mode: None,
        instances_tested: instances,
        full_found,
        near_full_found: 0,
        violations: witnesses.len() as u64,
        witnesses,
        duration: start.elapsed(),
    };
    debug_assert!(report.counts_consistent());
    report
}

/// Replaces the edge at `index` in color `color` with a random valid edge of
/// the host, keeping the matching property and the class size.
fn mutate_family(family: &MatchingFamily, rng: &mut ChaCha8Rng) -> Option<MatchingFamily> {
    let n = family.n();
    let color = rng.gen_range(1..=n);
    let edges = family.matching(color).edges();
    if edges.is_empty() {
        return None;
    }
    let index = rng.gen_range(0..edges.len());
    let mut new_edges: Vec<(usize, usize)> =
        edges.iter().map(|e| (e.u, e.w)).collect();
    new_edges.remove(index);
    for _ in 0..32 {
        let u = rng.gen_range(0..family.u_size());
        let w = rng.gen_range(0..family.w_size());
        if new_edges.iter().all(|&(a, b)| a != u && b != w) {
            let mut matchings: Vec<Vec<(usize, usize)>> = family
                .matchings()
                .iter()
                .map(|m| m.edges().iter().map(|e| (e.u, e.w)).collect())
                .collect();
            let mut mutated = new_edges.clone();
            mutated.push((u, w));
            matchings[color - 1] = mutated;
            return MatchingFamily::new(family.u_size(), family.w_size(), matchings).ok();
        }
    }
    None
}

/// Re-hosts a family's edges into a larger square host.
fn embed(family: &MatchingFamily, host: usize) -> MatchingFamily {
    let matchings = family
        .matchings()
        .iter()
        .map(|m| m.edges().iter().map(|e| (e.u, e.w)).collect())
        .collect();
    MatchingFamily::new(host, host, matchings).expect("embedding preserves validity")
}

/// Local search for a family of n matchings of the given size with NO full
/// rainbow matching (a lower-bound witness). The population is seeded with
/// the cycle construction (when the size allows) and random families;
/// mutations swap single edges, the objective (maximum rainbow matching
/// size, via the exact search) is minimized, and the search restarts from a
/// fresh random family when stuck. Finding a witness is reported as one
/// "violation" so campaign tooling can signal it.
pub fn search_lower_bound(
    n: usize,
    size: usize,
    iterations: u64,
    seed: u64,
) -> Result<CampaignReport, HarnessError> {
    let start = Instant::now();
    if n == 0 || size == 0 {
        return Err(HarnessError::InvalidParameter(
            "n and size must be at least 1".into(),
        ));
    }
    let host = (size + 2).max(n);
    let objective = |family: &MatchingFamily| exact::max_rainbow_matching(family, Some(n)).size();

    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0));
    let mut tested = 0u64;
    let mut best: Option<(usize, MatchingFamily)> = None;

    fn consider(
        best: &mut Option<(usize, MatchingFamily)>,
        tested: &mut u64,
        score: usize,
        family: MatchingFamily,
    ) {
        *tested += 1;
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            *best = Some((score, family));
        }
    }

    // Seed population: cycle variants when they fit, then a random family.
    if size == n {
        for k in 1..n.max(2) {
            if let Ok(f) = cycle_family(n, k) {
                let f = embed(&f, host);
                let score = objective(&f);
                consider(&mut best, &mut tested, score, f);
            }
        }
    }
    let fresh = |rng: &mut ChaCha8Rng| {
        random_family(n, size, host, host, rng.gen::<u64>()).expect("valid parameters")
    };
    let mut current = match &best {
        Some((score, f)) if *score < n => (f.clone(), *score),
        _ => {
            let f = fresh(&mut rng);
            let score = objective(&f);
            consider(&mut best, &mut tested, score, f.clone());
            (f, score)
        }
    };

    let stall_limit = 40 + 4 * n as u64;
    let mut stalled = 0u64;
    for _ in 0..iterations {
        if best.as_ref().is_some_and(|(s, _)| *s < n) {
            break;
        }
        if stalled > stall_limit {
            let f = fresh(&mut rng);
            let score = objective(&f);
            consider(&mut best, &mut tested, score, f.clone());
            current = (f, score);
            stalled = 0;
            continue;
        }
        let Some(candidate) = mutate_family(&current.0, &mut rng) else {
            stalled += 1;
            continue;
        };
        let score = objective(&candidate);
        consider(&mut best, &mut tested, score, candidate.clone());
        if score <= current.1 {
            if score < current.1 {
                stalled = 0;
            }
            current = (candidate, score);
        } else {
            stalled += 1;
        }
    }

    let mut witnesses = Vec::new();
    if let Some((score, family)) = &best {
        if *score < n {
            witnesses.push(Witness {
                trial: tested - 1,
                seed,
                observed: *score,
                required: n,
                family: family.clone(),
            });
        }
    }
    let report = CampaignReport {
        kind: "search-lower-bound".into(),
        n,
        size,
        trials: iterations,
        seed,
        method: None,
        mode: None,
        instances_tested: tested,
        full_found: 0,
        near_full_found: 0,
        violations: witnesses.len() as u64,
        witnesses,
        duration: start.elapsed(),
    };
    debug_assert!(report.counts_consistent());
    Ok(report)
}

/// Checks the near-full guarantee (maximum rainbow matching >= n-1) over
/// the selected instance kind. Cycle instances must land on exactly n-1.
pub fn check_near_full(
    n: usize,
    mode: NearFullMode,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<CampaignReport, HarnessError> {
    let start = Instant::now();
    if n == 0 {
        return Err(HarnessError::InvalidParameter("n must be at least 1".into()));
    }
    let required = n.saturating_sub(1);

    let evaluate = |family: MatchingFamily, trial: u64, trial_seed: u64, exact_bound: bool| {
        let observed = exact::max_rainbow_matching(&family, Some(n)).size();
        let ok = if exact_bound {
            observed == required
        } else {
            observed >= required
        };
        let witness = if ok {
            None
        } else {
            Some(Witness { trial, seed: trial_seed, observed, required, family })
        };
        (observed, witness)
    };

    let (size, instances, outcomes): (usize, u64, Vec<(usize, Option<Witness>)>) = match mode {
        NearFullMode::LatinExhaustive => {
            if n > 4 {
                return Err(HarnessError::InvalidParameter(format!(
                    "latin-exhaustive is limited to order <= 4, got {n}"
                )));
            }
            let squares = enumerate_latin_squares(n);
            let count = squares.len() as u64;
            let outcomes = squares
                .into_iter()
                .enumerate()
                .map(|(i, sq)| evaluate(latin_square_family(&sq), i as u64, 0, false))
                .collect();
            (n, count, outcomes)
        }
        NearFullMode::LatinRandom => {
            let outcomes = run_trials(trials, jobs, |trial| {
                let trial_seed = mix_seed(seed, trial);
                let sq = random_latin_square(n, trial_seed).expect("order validated");
                evaluate(latin_square_family(&sq), trial, trial_seed, false)
            });
            (n, trials, outcomes)
        }
        NearFullMode::Random => {
            let size = solver::near_full_size(n).max(1);
            let outcomes = run_trials(trials, jobs, |trial| {
                let trial_seed = mix_seed(seed, trial);
                let family =
                    random_family(n, size, size.max(n), size.max(n), trial_seed)
                        .expect("valid parameters");
                evaluate(family, trial, trial_seed, false)
            });
            (size, trials, outcomes)
        }
        NearFullMode::Cycle => {
            if n < 2 {
                return Err(HarnessError::InvalidParameter(
                    "cycle mode needs n >= 2".into(),
                ));
            }
            let ks: Vec<usize> = (1..n).collect();
            let count = ks.len() as u64;
            let outcomes = ks
                .into_iter()
                .enumerate()
                .map(|(i, k)| {
                    let family = cycle_family(n, k).expect("parameters validated");
                    evaluate(family, i as u64, 0, true)
                })
                .collect();
            (n, count, outcomes)
        }
    };

    let near_full_found = outcomes
        .iter()
        .filter(|(_, w)| w.is_none())
        .count() as u64;
    let full_found = outcomes.iter().filter(|(obs, _)| *obs >= n).count() as u64;
    let (violations, witnesses) =
        collect_witnesses(outcomes.into_iter().map(|(_, w)| w).collect());
    let report = CampaignReport {
        kind: "check-near-full".into(),
        n,
        size,
        trials: instances,
        seed,
        method: None,
        mode: Some(mode.name().into()),
        instances_tested: instances,
        full_found,
        near_full_found,
        violations,
        witnesses,
        duration: start.elapsed(),
    };
    debug_assert!(report.counts_consistent());
    Ok(report)
}

/// Re-checks a witness: loading its family and re-running the exact search
/// must reproduce the recorded observation.
pub fn witness_replays(w: &Witness) -> bool {
    let observed = exact::max_rainbow_matching(&w.family, None).size();
    observed == w.observed && observed < w.required.max(w.observed + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_bound_constructive_zero_violations() {
        let r = check_upper_bound(4, 7, None, 50, 11, Method::Constructive, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.full_found, 50);
        assert!(r.counts_consistent());
    }

    #[test]
    fn upper_bound_greedy_at_2n_minus_1() {
        let r = check_upper_bound(4, 7, None, 50, 3, Method::Greedy, 1).unwrap();
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn upper_bound_rejects_undersized_constructive() {
        match check_upper_bound(4, 6, None, 5, 0, Method::Constructive, 1) {
            Err(HarnessError::InvalidParameter(_)) => {}
            other => panic!("expected InvalidParameter, got {other:?}"),
        }
    }

    #[test]
    fn upper_bound_parallel_equals_serial() {
        let a = check_upper_bound(3, 6, None, 40, 9, Method::Exact, 1).unwrap();
        let b = check_upper_bound(3, 6, None, 40, 9, Method::Exact, 4).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn two_color_exhaustive_is_clean() {
        let r = check_two_color_exhaustive();
        assert_eq!(r.instances_tested, 20 * 120);
        assert_eq!(r.violations, 0);
        assert!(r.counts_consistent());
    }

    #[test]
    fn lower_bound_search_finds_cycle_witness() {
        let r = search_lower_bound(3, 3, 100, 1).unwrap();
        assert_eq!(r.violations, 1);
        assert_eq!(r.witnesses[0].observed, 2);
        assert!(witness_replays(&r.witnesses[0]));
    }

    #[test]
    fn lower_bound_search_exhausts_on_two_colors_size_three() {
        // f(2)=3: no witness can exist at this size.
        let r = search_lower_bound(2, 3, 60, 5).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn lower_bound_search_finds_witness_without_cycle_seed() {
        // size != n, so the cycle seeds do not apply; n=2 matchings of
        // size 2 can still block each other.
        let r = search_lower_bound(2, 2, 400, 7).unwrap();
        assert_eq!(r.violations, 1);
        assert!(r.witnesses[0].observed < 2);
    }

    #[test]
    fn near_full_cycle_exact() {
        let r = check_near_full(6, NearFullMode::Cycle, 0, 0, 1).unwrap();
        assert_eq!(r.instances_tested, 5);
        assert_eq!(r.violations, 0);
        assert_eq!(r.full_found, 0);
    }

    #[test]
    fn near_full_latin_exhaustive_order_3() {
        let r = check_near_full(3, NearFullMode::LatinExhaustive, 0, 0, 1).unwrap();
        assert_eq!(r.instances_tested, 12);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn near_full_latin_exhaustive_rejects_large_orders() {
        assert!(check_near_full(5, NearFullMode::LatinExhaustive, 0, 0, 1).is_err());
    }

    #[test]
    fn near_full_random_probe() {
        let r = check_near_full(5, NearFullMode::Random, 60, 2, 2).unwrap();
        assert_eq!(r.size, 7);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let a = check_near_full(4, NearFullMode::LatinRandom, 10, 77, 1).unwrap();
        let b = check_near_full(4, NearFullMode::LatinRandom, 10, 77, 3).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = search_lower_bound(3, 3, 50, 4).unwrap();
        let d = search_lower_bound(3, 3, 50, 4).unwrap();
        assert_eq!(c.to_json(), d.to_json());
    }
}
