//! The derived structure around a near-full rainbow matching.
//!
//! Given a family and a rainbow matching R of size n-1, the scaffold collects
//! everything the augmentation machine needs: the free vertex sets X and Y,
//! a truncated set of "candidate" edges of the spare color that end in Y, the
//! colors anchored by those candidates, per-color "reroute" edges back into Y,
//! and the reach closure of those reroutes. Internally colors are relabeled
//! so the unrepresented color is last; the permutation is stored and undone
//! on output.

use std::collections::{BTreeMap, BTreeSet};

use crate::family::{
    check_rainbow_matching, free_vertices, Color, Edge, MatchingFamily, RainbowMatching,
};
use crate::solver::SolverError;

/// The color permutation applied when normalizing an instance so that the
/// spare (unrepresented) color is the last one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorRelabeling {
    /// `to_original[i-1]` is the original color of internal color `i`.
    to_original: Vec<Color>,
}

impl ColorRelabeling {
    /// Identity on all colors except that `spare` is moved to position n.
    pub fn spare_last(n: usize, spare: Color) -> Self {
        let mut to_original: Vec<Color> = (1..=n).filter(|&c| c != spare).collect();
        to_original.push(spare);
        ColorRelabeling { to_original }
    }

    pub fn n(&self) -> usize {
        self.to_original.len()
    }

    pub fn to_original(&self, internal: Color) -> Color {
        self.to_original[internal - 1]
    }

    pub fn to_internal(&self, original: Color) -> Color {
        self.to_original
            .iter()
            .position(|&c| c == original)
            .map(|p| p + 1)
            .expect("color present in relabeling")
    }

    pub fn order(&self) -> &[Color] {
        &self.to_original
    }

    /// Maps an internally-indexed assignment back to original colors.
    pub fn restore(&self, r: &RainbowMatching) -> RainbowMatching {
        let mut out = RainbowMatching::new();
        for (c, e) in r.iter() {
            out.assign(self.to_original(c), e);
        }
        out
    }

    /// Maps an originally-indexed assignment into internal colors.
    pub fn internalize(&self, r: &RainbowMatching) -> RainbowMatching {
        let mut out = RainbowMatching::new();
        for (c, e) in r.iter() {
            out.assign(self.to_internal(c), e);
        }
        out
    }
}

/// Relabels an instance so the color unrepresented by `r` becomes the last.
///
/// `r` must be a valid rainbow matching of size n-1.
pub(crate) fn relabel_spare_last(
    family: &MatchingFamily,
    r: &RainbowMatching,
) -> Result<(MatchingFamily, RainbowMatching, ColorRelabeling), SolverError> {
    let n = family.n();
    check_rainbow_matching(family, r)?;
    if r.size() != n - 1 {
        return Err(SolverError::WrongInputSize {
            size: r.size(),
            expected: n - 1,
        });
    }
    let spare = (1..=n)
        .find(|&c| r.edge(c).is_none())
        .expect("size n-1 leaves one color unassigned");
    let relabeling = ColorRelabeling::spare_last(n, spare);
    let relabeled_family = family.reorder_colors(relabeling.order());
    let relabeled_r = relabeling.internalize(r);
    Ok((relabeled_family, relabeled_r, relabeling))
}

/// All derived sets for one augmentation step. Field vocabulary:
///
/// * `candidates` — the truncated set of spare-color edges ending in the free
///   right set Y (exactly `ell` of them);
/// * `anchored` — colors whose R-edge left endpoint is hit by a candidate;
/// * `anchor_edge[i]` — the candidate meeting color i's R-edge;
/// * `reroute[i]` — edges of color i from Y (minus its own anchor point)
///   back into matched left vertices;
/// * `reached` — colors whose R-edge left endpoint is hit by a candidate or
///   a reroute edge; `linked` = reached minus anchored, `link_count` its size.
#[derive(Clone, Debug)]
pub struct Scaffold {
    pub relabeled: MatchingFamily,
    pub relabeling: ColorRelabeling,
    /// The near-full rainbow matching, internal colors 1..n-1.
    pub near_full: RainbowMatching,
    pub x_free: BTreeSet<usize>,
    pub y_free: BTreeSet<usize>,
    pub candidates: Vec<Edge>,
    pub ell: usize,
    pub u_anchor: BTreeSet<usize>,
    pub w_anchor: BTreeSet<usize>,
    pub anchored: BTreeSet<Color>,
    pub anchor_edge: BTreeMap<Color, Edge>,
    pub reroute: BTreeMap<Color, Vec<Edge>>,
    pub u_reach: BTreeSet<usize>,
    pub w_reach: BTreeSet<usize>,
    pub reached: BTreeSet<Color>,
    pub linked: BTreeSet<Color>,
    pub link_count: usize,
    u_to_color: BTreeMap<usize, Color>,
    w_to_color: BTreeMap<usize, Color>,
}

impl Scaffold {
    pub fn n(&self) -> usize {
        self.relabeled.n()
    }

    /// The spare (unrepresented) internal color, always n.
    pub fn spare_color(&self) -> Color {
        self.n()
    }

    /// The R-edge of an internal color in 1..n-1.
    pub fn r_edge(&self, color: Color) -> Edge {
        self.near_full.edge(color).expect("color represented in R")
    }

    /// The color whose R-edge covers left vertex `u`, if any.
    pub fn color_at_u(&self, u: usize) -> Option<Color> {
        self.u_to_color.get(&u).copied()
    }

    /// The color whose R-edge covers right vertex `w`, if any.
    pub fn color_at_w(&self, w: usize) -> Option<Color> {
        self.w_to_color.get(&w).copied()
    }

    /// The anchor point of an anchored color: the Y endpoint of its candidate.
    pub fn anchor_y(&self, color: Color) -> usize {
        self.anchor_edge[&color].w
    }

    /// Structural self-checks; returns the first broken invariant.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.n();
        let ell = (n + 1) / 2 + 2;
        if self.ell != ell {
            return Err(format!("ell is {}, expected {}", self.ell, ell));
        }
        if self.candidates.len() != ell {
            return Err(format!(
                "{} candidates after truncation, expected {}",
                self.candidates.len(),
                ell
            ));
        }
        if self.u_anchor.len() != ell || self.w_anchor.len() != ell || self.anchored.len() != ell {
            return Err("anchor sets must all have exactly ell elements".into());
        }
        for e in &self.candidates {
            if self.x_free.contains(&e.u) || !self.y_free.contains(&e.w) {
                return Err(format!("candidate {e} must run from Y into matched left vertices"));
            }
        }
        if !self.u_anchor.is_subset(&self.u_reach) {
            return Err("u_anchor must be contained in u_reach".into());
        }
        if self.u_reach.iter().any(|u| self.x_free.contains(u)) {
            return Err("u_reach must avoid the free left set".into());
        }
        if !self.w_anchor.is_subset(&self.w_reach) {
            return Err("w_anchor must be contained in w_reach".into());
        }
        if self.w_reach.iter().any(|w| self.y_free.contains(w)) {
            return Err("w_reach must avoid the free right set".into());
        }
        if !self.anchored.is_subset(&self.reached) {
            return Err("anchored colors must be contained in reached colors".into());
        }
        if self.u_reach.len() != self.ell + self.link_count {
            return Err(format!(
                "u_reach has {} elements, expected ell + d = {}",
                self.u_reach.len(),
                self.ell + self.link_count
            ));
        }
        if self.linked.len() != self.link_count
            || self
                .linked
                .iter()
                .any(|c| self.anchored.contains(c) || !self.reached.contains(c))
        {
            return Err("linked must be reached minus anchored, of size d".into());
        }
        Ok(())
    }
}

/// Builds the scaffold around a rainbow matching of size n-1.
///
/// Fails with `ScaffoldImpossible` when the spare color has too few edges
/// into Y, or still has an edge with both endpoints free; under the size
/// hypothesis either condition signals a precondition breach (a non-maximal
/// input matching) or an upstream bug.
pub fn compute_scaffold(
    family: &MatchingFamily,
    r: &RainbowMatching,
) -> Result<Scaffold, SolverError> {
    let n = family.n();
    if n < 2 {
        return Err(SolverError::WrongInputSize {
            size: r.size(),
            expected: n.saturating_sub(1),
        });
    }
    let (relabeled, near_full, relabeling) = relabel_spare_last(family, r)?;
    let (x_free, y_free) = free_vertices(&relabeled, &near_full);
    let ell = (n + 1) / 2 + 2;

    let spare = relabeled.matching(n);
    let mut into_y: Vec<Edge> = Vec::new();
    for &e in spare.edges() {
        if y_free.contains(&e.w) {
            if x_free.contains(&e.u) {
                return Err(SolverError::ScaffoldImpossible {
                    reason: format!(
                        "spare color has edge {e} with both endpoints free; \
                         the input matching is not maximal"
                    ),
                });
            }
            into_y.push(e);
        }
    }
    if into_y.len() < ell {
        return Err(SolverError::ScaffoldImpossible {
            reason: format!(
                "spare color has only {} edges into the free right set, need {}",
                into_y.len(),
                ell
            ),
        });
    }
    // Truncate deterministically: keep the ell edges with smallest Y endpoint,
    // ties by left endpoint.
    into_y.sort_unstable_by_key(|e| (e.w, e.u));
    into_y.truncate(ell);
    let candidates = into_y;

    let mut u_to_color = BTreeMap::new();
    let mut w_to_color = BTreeMap::new();
    for (c, e) in near_full.iter() {
        u_to_color.insert(e.u, c);
        w_to_color.insert(e.w, c);
    }

    let u_anchor: BTreeSet<usize> = candidates.iter().map(|e| e.u).collect();
    let mut anchored = BTreeSet::new();
    let mut anchor_edge = BTreeMap::new();
    for &e in &candidates {
        let c = *u_to_color
            .get(&e.u)
            .expect("candidate left endpoint is matched");
        anchored.insert(c);
        anchor_edge.insert(c, e);
    }
    let w_anchor: BTreeSet<usize> = anchored.iter().map(|&c| near_full.edge(c).unwrap().w).collect();

    let mut reroute = BTreeMap::new();
    for &c in &anchored {
        let ay = anchor_edge[&c].w;
        let edges: Vec<Edge> = relabeled
            .matching(c)
            .edges()
            .iter()
            .filter(|e| y_free.contains(&e.w) && e.w != ay && !x_free.contains(&e.u))
            .copied()
            .collect();
        reroute.insert(c, edges);
    }

    let mut u_reach = u_anchor.clone();
    for edges in reroute.values() {
        for e in edges {
            u_reach.insert(e.u);
        }
    }
    let reached: BTreeSet<Color> = u_reach
        .iter()
        .map(|u| *u_to_color.get(u).expect("reached left vertex is matched"))
        .collect();
    let w_reach: BTreeSet<usize> = reached
        .iter()
        .map(|&c| near_full.edge(c).unwrap().w)
        .collect();
    let linked: BTreeSet<Color> = reached.difference(&anchored).copied().collect();
    let link_count = linked.len();

    let scaffold = Scaffold {
        relabeled,
        relabeling,
        near_full,
        x_free,
        y_free,
        candidates,
        ell,
        u_anchor,
        w_anchor,
        anchored,
        anchor_edge,
        reroute,
        u_reach,
        w_reach,
        reached,
        linked,
        link_count,
        u_to_color,
        w_to_color,
    };
    scaffold
        .check_invariants()
        .map_err(|reason| SolverError::Fault(format!("scaffold invariant broken: {reason}")))?;
    Ok(scaffold)
}

/// Which counting guarantee a check belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimId {
    /// Anchored colors keep at least ceil(n/2)+1 edges on each cross side
    /// (X to W\Y, and Y to U\X).
    AnchoredCross,
    /// Linked colors keep at least ceil(n/2) edges on each cross side.
    LinkedCross,
    /// Every reached color has at least d+3 edges from X into the reached
    /// right set.
    ChainSupply,
    /// Every anchored color has at least 2 reroute edges anchored on the
    /// chain's left vertices.
    RerouteSupply,
}

/// One verified inequality with its computed margin.
#[derive(Clone, Debug)]
pub struct ClaimCheck {
    pub id: ClaimId,
    pub color: Color,
    pub required: usize,
    pub actual: usize,
}

impl ClaimCheck {
    pub fn holds(&self) -> bool {
        self.actual >= self.required
    }
}

impl std::fmt::Display for ClaimCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:?} color {}: {} >= {} {}",
            self.id,
            self.color,
            self.actual,
            self.required,
            if self.holds() { "ok" } else { "VIOLATED" }
        )
    }
}

/// A list of inequality checks with their margins.
#[derive(Clone, Debug, Default)]
pub struct ClaimReport {
    pub checks: Vec<ClaimCheck>,
}

impl ClaimReport {
    pub fn violations(&self) -> Vec<&ClaimCheck> {
        self.checks.iter().filter(|c| !c.holds()).collect()
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(ClaimCheck::holds)
    }
}

impl std::fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Verifies the counting guarantees that hold for any scaffold built from a
/// maximal near-full matching under the size hypothesis: cross-edge supply
/// for anchored and linked colors, and chain supply for all reached colors.
pub fn verify_claims(s: &Scaffold) -> ClaimReport {
    let mut report = ClaimReport::default();
    let cross = |color: Color| -> (usize, usize) {
        let edges = s.relabeled.matching(color).edges();
        let x_to_w = edges
            .iter()
            .filter(|e| s.x_free.contains(&e.u) && !s.y_free.contains(&e.w))
            .count();
        let y_to_u = edges
            .iter()
            .filter(|e| s.y_free.contains(&e.w) && !s.x_free.contains(&e.u))
            .count();
        (x_to_w, y_to_u)
    };
    for &c in &s.anchored {
        let (x_to_w, y_to_u) = cross(c);
        let required = s.ell - 1;
        report.checks.push(ClaimCheck {
            id: ClaimId::AnchoredCross,
            color: c,
            required,
            actual: x_to_w,
        });
        report.checks.push(ClaimCheck {
            id: ClaimId::AnchoredCross,
            color: c,
            required,
            actual: y_to_u,
        });
    }
    for &c in &s.linked {
        let (x_to_w, y_to_u) = cross(c);
        let required = s.ell - 2;
        report.checks.push(ClaimCheck {
            id: ClaimId::LinkedCross,
            color: c,
            required,
            actual: x_to_w,
        });
        report.checks.push(ClaimCheck {
            id: ClaimId::LinkedCross,
            color: c,
            required,
            actual: y_to_u,
        });
    }
    for &c in &s.reached {
        let actual = s
            .relabeled
            .matching(c)
            .edges()
            .iter()
            .filter(|e| s.x_free.contains(&e.u) && s.w_reach.contains(&e.w))
            .count();
        report.checks.push(ClaimCheck {
            id: ClaimId::ChainSupply,
            color: c,
            required: s.link_count + 3,
            actual,
        });
    }
    report
}

/// Verifies the reroute-supply guarantee used once a maximal-length chain
/// has fixed its left vertices: every anchored color must keep at least two
/// reroute edges anchored on `chain_u`.
pub fn verify_reroute_supply(s: &Scaffold, chain_u: &BTreeSet<usize>) -> ClaimReport {
    let mut report = ClaimReport::default();
    for &c in &s.anchored {
        let actual = s.reroute[&c]
            .iter()
            .filter(|e| chain_u.contains(&e.u))
            .count();
        report.checks.push(ClaimCheck {
            id: ClaimId::RerouteSupply,
            color: c,
            required: 2,
            actual,
        });
    }
    report
}
