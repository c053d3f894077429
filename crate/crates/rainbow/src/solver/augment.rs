//! One augmentation step: from a rainbow matching of size n-1 to a full one.
//!
//! Every place where the underlying argument appeals to the maximality of
//! the input matching becomes a constructive branch here: if the cheap
//! exchange it forbids actually exists, we perform it and are done; if none
//! exists, the counting guarantees hold, the chain terminates, and one of
//! the terminal exchanges completes the matching. Candidate scans are
//! deterministic (ascending color, lexicographic edges) and every assembled
//! matching is verified explicitly before being returned.

use std::collections::BTreeSet;

use crate::exact;
use crate::family::{
    check_rainbow_matching, Color, Edge, MatchingFamily, RainbowMatching,
};
use crate::solver::chain::{build_chain, Chain, ChainCase};
use crate::solver::scaffold::{
    compute_scaffold, relabel_spare_last, verify_claims, verify_reroute_supply, ClaimReport,
    Scaffold,
};
use crate::solver::SolverError;

/// Which branch produced the augmented matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AugmentRoute {
    /// A spare-color edge was disjoint from R outright.
    SpareEdge,
    /// Swapping one color's edge freed room for a spare-color edge.
    SingleSwap,
    /// A linked color's free-free edge plus a reroute plus an anchor candidate.
    PairSwap,
    /// The chain closed early; its tail was exchanged wholesale.
    ChainClosed,
    /// Exhausted chain, trailing color anchored.
    ChainExhaustedAnchored,
    /// Exhausted chain, trailing color linked.
    ChainExhaustedLinked,
    /// A claim check failed and the exact oracle supplied the matching.
    OracleRepair,
}

/// Diagnostics collected along one augmentation step.
#[derive(Clone, Debug, Default)]
pub struct AugmentTrace {
    pub route: Option<AugmentRoute>,
    pub claims: Option<ClaimReport>,
    pub reroute_claims: Option<ClaimReport>,
    pub chain_len: Option<usize>,
}

/// Augments a rainbow matching of size n-1 to a full one.
pub fn augment_step(
    family: &MatchingFamily,
    r: &RainbowMatching,
) -> Result<RainbowMatching, SolverError> {
    augment_step_traced(family, r).map(|(rm, _)| rm)
}

/// As [`augment_step`], also returning the diagnostics trace.
pub fn augment_step_traced(
    family: &MatchingFamily,
    r: &RainbowMatching,
) -> Result<(RainbowMatching, AugmentTrace), SolverError> {
    let n = family.n();
    let required = (3 * n).div_ceil(2) + 1;
    for c in 1..=n {
        let size = family.matching(c).len();
        if size < required {
            return Err(SolverError::PreconditionViolated { color: c, size, required });
        }
    }
    let (relabeled, base_r, relabeling) = relabel_spare_last(family, r)?;
    let mut trace = AugmentTrace::default();

    let finish = |internal: RainbowMatching,
                  route: AugmentRoute,
                  trace: &mut AugmentTrace|
     -> Result<RainbowMatching, SolverError> {
        let restored = relabeling.restore(&internal);
        check_rainbow_matching(family, &restored)?;
        if restored.size() != n {
            return Err(SolverError::Fault(format!(
                "augmentation produced size {} instead of {n}",
                restored.size()
            )));
        }
        trace.route = Some(route);
        Ok(restored)
    };

    // A spare-color edge disjoint from R extends it directly.
    for &g in relabeled.matching(n).edges() {
        if !base_r.conflicts(g) {
            let mut out = base_r.clone();
            out.assign(n, g);
            let rm = finish(out, AugmentRoute::SpareEdge, &mut trace)?;
            return Ok((rm, trace));
        }
    }

    // Single swap: re-represent one color by a different edge, then add a
    // spare-color edge into the freed room.
    for c in 1..n {
        let mut without = base_r.clone();
        let rc = without.unassign(c).expect("color represented");
        for &e in relabeled.matching(c).edges() {
            if e == rc || without.conflicts(e) {
                continue;
            }
            for &g in relabeled.matching(n).edges() {
                if g.disjoint(&e) && !without.conflicts(g) {
                    let mut out = without.clone();
                    out.assign(c, e);
                    out.assign(n, g);
                    let rm = finish(out, AugmentRoute::SingleSwap, &mut trace)?;
                    return Ok((rm, trace));
                }
            }
        }
    }

    let scaffold = compute_scaffold(family, r)?;
    debug_assert_eq!(scaffold.relabeling.order(), relabeling.order());

    // Pair swap: a linked color j has a free-free edge e; the reroute edge f
    // that links j re-represents its anchored color i, the anchor candidate
    // of i covers the spare color, and e covers j.
    for &j in &scaffold.linked {
        let rj = scaffold.r_edge(j);
        for &e in relabeled.matching(j).edges() {
            if !scaffold.x_free.contains(&e.u) || !scaffold.y_free.contains(&e.w) {
                continue;
            }
            for &i in &scaffold.anchored {
                for &f in &scaffold.reroute[&i] {
                    if f.u != rj.u {
                        continue;
                    }
                    let ei = scaffold.anchor_edge[&i];
                    if e.w == f.w || e.w == ei.w {
                        continue;
                    }
                    let mut out = base_r.clone();
                    out.assign(i, f);
                    out.assign(j, e);
                    out.assign(n, ei);
                    if check_rainbow_matching(&relabeled, &out).is_ok() {
                        let rm = finish(out, AugmentRoute::PairSwap, &mut trace)?;
                        return Ok((rm, trace));
                    }
                }
            }
        }
    }

    let claims = verify_claims(&scaffold);
    let claims_ok = claims.all_hold();
    trace.claims = Some(claims);
    if !claims_ok {
        return oracle_repair(family, trace);
    }

    let chain = build_chain(&scaffold)?;
    trace.chain_len = Some(chain.m());
    if let Err(reason) = chain.check_invariants(&scaffold) {
        return Err(SolverError::Fault(format!("chain invariant broken: {reason}")));
    }

    let attempt = match chain.case.clone() {
        ChainCase::Closed { t, closing_f } => {
            augment_closed(&scaffold, &chain, t, closing_f, &base_r)
        }
        ChainCase::Exhausted => {
            let chain_u = chain.chain_u();
            let reroute_claims = verify_reroute_supply(&scaffold, &chain_u);
            let reroute_ok = reroute_claims.all_hold();
            trace.reroute_claims = Some(reroute_claims);
            if !reroute_ok {
                return oracle_repair(family, trace);
            }
            augment_exhausted(&scaffold, &chain, &base_r)
        }
    };
    match attempt {
        Some((out, route)) => {
            let rm = finish(out, route, &mut trace)?;
            Ok((rm, trace))
        }
        None => Err(augmentation_impossible(family, r)),
    }
}

/// Terminal exchange for a closed chain: replace the R-edges at positions
/// t..m+1 by the chain edges, then cover the spare color through an anchor.
fn augment_closed(
    s: &Scaffold,
    chain: &Chain,
    t: usize,
    closing_f: Edge,
    base_r: &RainbowMatching,
) -> Option<(RainbowMatching, AugmentRoute)> {
    let relabeled = &s.relabeled;
    let n = s.n();
    let tail = &chain.links[t - 1..];
    let mut swapped = base_r.clone();
    for link in tail {
        swapped.assign(link.color, link.f_edge);
    }
    swapped.assign(chain.last_color, closing_f);

    let seg_colors: Vec<Color> = tail
        .iter()
        .map(|l| l.color)
        .chain(std::iter::once(chain.last_color))
        .collect();

    // Some segment color is anchored: its candidate slots straight in.
    for &c in &seg_colors {
        if let Some(&ei) = s.anchor_edge.get(&c) {
            let mut out = swapped.clone();
            out.assign(n, ei);
            if check_rainbow_matching(relabeled, &out).is_ok() {
                return Some((out, AugmentRoute::ChainClosed));
            }
        }
    }

    // Otherwise every segment color is linked; re-represent the anchored
    // color whose reroute edge reaches the freed left vertex at position t.
    let u_t = chain.links[t - 1].r_edge.u;
    for &j in &s.anchored {
        for &e in &s.reroute[&j] {
            if e.u != u_t {
                continue;
            }
            let mut out = swapped.clone();
            out.assign(j, e);
            out.assign(n, s.anchor_edge[&j]);
            if check_rainbow_matching(relabeled, &out).is_ok() {
                return Some((out, AugmentRoute::ChainClosed));
            }
        }
    }
    None
}

/// Terminal exchanges for an exhausted chain (m = d+3): build the size-(n-2)
/// matching Q that swaps in all chain edges, then add two edges ending in Y.
fn augment_exhausted(
    s: &Scaffold,
    chain: &Chain,
    base_r: &RainbowMatching,
) -> Option<(RainbowMatching, AugmentRoute)> {
    let relabeled = &s.relabeled;
    let n = s.n();
    let mut q = base_r.clone();
    for link in &chain.links {
        q.assign(link.color, link.f_edge);
    }
    q.unassign(chain.last_color);

    let chain_u = chain.chain_u();
    let pos_colors = chain.colors();
    let anchors_in_chain: Vec<Color> = pos_colors
        .iter()
        .copied()
        .filter(|c| s.anchored.contains(c))
        .collect();
    let last = chain.last_color;

    if s.anchored.contains(&last) {
        // The trailing color has a reroute edge onto a freed chain vertex;
        // pair it with a disjoint anchor candidate from the chain.
        for &e in &s.reroute[&last] {
            if !chain_u.contains(&e.u) {
                continue;
            }
            for &cs in &anchors_in_chain {
                let ei = s.anchor_edge[&cs];
                if !ei.disjoint(&e) {
                    continue;
                }
                let mut out = q.clone();
                out.assign(last, e);
                out.assign(n, ei);
                if check_rainbow_matching(relabeled, &out).is_ok() {
                    return Some((out, AugmentRoute::ChainExhaustedAnchored));
                }
            }
        }
        return None;
    }

    // Trailing color is linked: take one of its edges into Y whose matched
    // left endpoint belongs to an anchored color.
    let link_colors: BTreeSet<Color> = chain.links.iter().map(|l| l.color).collect();
    let into_y: Vec<Edge> = relabeled
        .matching(last)
        .edges()
        .iter()
        .filter(|e| s.y_free.contains(&e.w) && !s.x_free.contains(&e.u))
        .copied()
        .collect();
    for &e in &into_y {
        let s_color = match s.color_at_u(e.u) {
            Some(c) => c,
            None => continue,
        };
        if !s.anchored.contains(&s_color) {
            continue;
        }
        if link_colors.contains(&s_color) {
            // The blocking R-edge was already swapped out of Q.
            for &cs in &anchors_in_chain {
                let ei = s.anchor_edge[&cs];
                if !ei.disjoint(&e) {
                    continue;
                }
                let mut out = q.clone();
                out.assign(last, e);
                out.assign(n, ei);
                if check_rainbow_matching(relabeled, &out).is_ok() {
                    return Some((out, AugmentRoute::ChainExhaustedLinked));
                }
            }
        } else {
            // The blocking R-edge is still in Q: remove it and re-represent
            // its color through a reroute edge onto a freed chain vertex.
            for &e2 in &s.reroute[&s_color] {
                if !chain_u.contains(&e2.u) || !e2.disjoint(&e) {
                    continue;
                }
                for &cs in &anchors_in_chain {
                    let ei = s.anchor_edge[&cs];
                    if !ei.disjoint(&e2) || ei.w == e.w || ei.u == e.u {
                        continue;
                    }
                    let mut out = q.clone();
                    out.assign(s_color, e2);
                    out.assign(last, e);
                    out.assign(n, ei);
                    if check_rainbow_matching(relabeled, &out).is_ok() {
                        return Some((out, AugmentRoute::ChainExhaustedLinked));
                    }
                }
            }
        }
    }
    None
}

/// Last-resort path when a counting check fails: treat it as evidence that
/// the input matching was not maximal and let the oracle finish the job.
fn oracle_repair(
    family: &MatchingFamily,
    mut trace: AugmentTrace,
) -> Result<(RainbowMatching, AugmentTrace), SolverError> {
    let full = exact::max_rainbow_matching(family, Some(family.n()));
    if full.is_full(family.n()) {
        trace.route = Some(AugmentRoute::OracleRepair);
        return Ok((full, trace));
    }
    let violations = trace
        .claims
        .iter()
        .chain(trace.reroute_claims.iter())
        .flat_map(|r| r.violations().into_iter().cloned())
        .collect::<Vec<_>>();
    Err(SolverError::ClaimViolation { violations })
}

/// Builds the `AugmentationImpossible` fault, cross-checking the oracle and
/// serializing a witness for triage.
fn augmentation_impossible(family: &MatchingFamily, r: &RainbowMatching) -> SolverError {
    let oracle_full = exact::has_full_rainbow_matching(family);
    let witness = serde_json::json!({
        "family": family,
        "near_full": r,
    })
    .to_string();
    SolverError::AugmentationImpossible { oracle_full, witness }
}
