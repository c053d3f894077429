//! Instance representation: bipartite hosts, matchings, families of colored
//! matchings, and (partial) rainbow matchings.
//!
//! Vertices are plain 0-based indices into the two sides of the host graph;
//! `u_size`/`w_size` are stored explicitly so isolated vertices count as free.
//! Colors are 1-based indices into the family.
//!
//! All types here are immutable after validation and safe to share across
//! threads.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// 1-based index of a color class (one matching) within a family.
pub type Color = usize;

/// An edge of the bipartite host: left vertex `u`, right vertex `w`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Edge {
    pub u: usize,
    pub w: usize,
}

impl Edge {
    pub fn new(u: usize, w: usize) -> Self {
        Edge { u, w }
    }

    /// True when the two edges share no endpoint.
    pub fn disjoint(&self, other: &Edge) -> bool {
        self.u != other.u && self.w != other.w
    }
}

impl From<(usize, usize)> for Edge {
    fn from((u, w): (usize, usize)) -> Self {
        Edge { u, w }
    }
}

impl From<Edge> for (usize, usize) {
    fn from(e: Edge) -> Self {
        (e.u, e.w)
    }
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.u, self.w)
    }
}

/// A set of pairwise vertex-disjoint edges, kept sorted lexicographically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    /// Internal constructor; callers must pass a sorted, validated edge list.
    pub(crate) fn from_sorted(edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|p| p[0] < p[1]));
        Matching { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }
}

/// Which side of the bipartition a vertex lives on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("a family must contain at least one matching")]
    EmptyFamily,
    #[error("color {color}: edge ({u},{w}) out of range for host {u_size}x{w_size}")]
    InvalidVertex {
        color: Color,
        u: usize,
        w: usize,
        u_size: usize,
        w_size: usize,
    },
    #[error("color {color}: not a matching, {side} vertex {vertex} is used twice")]
    NotAMatching {
        color: Color,
        side: Side,
        vertex: usize,
    },
    #[error("color {color}: duplicate edge ({u},{w})")]
    DuplicateEdge { color: Color, u: usize, w: usize },
}

/// An ordered family of matchings F_1..F_n over a common bipartite host.
///
/// Distinct colors may contain identical edges; within one color, edges are
/// distinct and pairwise disjoint.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct MatchingFamily {
    u_size: usize,
    w_size: usize,
    matchings: Vec<Matching>,
}

/// Wire form of a family, also the JSON instance format:
/// `{"u_size": int, "w_size": int, "matchings": [[[u,w], ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct RawFamily {
    u_size: usize,
    w_size: usize,
    matchings: Vec<Vec<(usize, usize)>>,
}

impl TryFrom<RawFamily> for MatchingFamily {
    type Error = FamilyError;

    fn try_from(raw: RawFamily) -> Result<Self, FamilyError> {
        MatchingFamily::new(raw.u_size, raw.w_size, raw.matchings)
    }
}

impl From<MatchingFamily> for RawFamily {
    fn from(f: MatchingFamily) -> Self {
        RawFamily {
            u_size: f.u_size,
            w_size: f.w_size,
            matchings: f
                .matchings
                .into_iter()
                .map(|m| m.edges.into_iter().map(Into::into).collect())
                .collect(),
        }
    }
}

impl MatchingFamily {
    /// Validates raw instance data, returning an error naming the first
    /// violated invariant.
    pub fn new(
        u_size: usize,
        w_size: usize,
        matchings: Vec<Vec<(usize, usize)>>,
    ) -> Result<Self, FamilyError> {
        if matchings.is_empty() {
            return Err(FamilyError::EmptyFamily);
        }
        let mut validated = Vec::with_capacity(matchings.len());
        for (idx, list) in matchings.into_iter().enumerate() {
            let color = idx + 1;
            let mut edges: Vec<Edge> = list.into_iter().map(Into::into).collect();
            edges.sort_unstable();
            for e in &edges {
                if e.u >= u_size || e.w >= w_size {
                    return Err(FamilyError::InvalidVertex {
                        color,
                        u: e.u,
                        w: e.w,
                        u_size,
                        w_size,
                    });
                }
            }
            for p in edges.windows(2) {
                if p[0] == p[1] {
                    return Err(FamilyError::DuplicateEdge {
                        color,
                        u: p[0].u,
                        w: p[0].w,
                    });
                }
            }
            // Sorted by (u, w): a repeated left vertex shows up in adjacent edges.
            for p in edges.windows(2) {
                if p[0].u == p[1].u {
                    return Err(FamilyError::NotAMatching {
                        color,
                        side: Side::Left,
                        vertex: p[0].u,
                    });
                }
            }
            let mut seen_w = BTreeSet::new();
            for e in &edges {
                if !seen_w.insert(e.w) {
                    return Err(FamilyError::NotAMatching {
                        color,
                        side: Side::Right,
                        vertex: e.w,
                    });
                }
            }
            validated.push(Matching::from_sorted(edges));
        }
        Ok(MatchingFamily {
            u_size,
            w_size,
            matchings: validated,
        })
    }

    pub fn n(&self) -> usize {
        self.matchings.len()
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn w_size(&self) -> usize {
        self.w_size
    }

    /// The matching of the given 1-based color.
    pub fn matching(&self, color: Color) -> &Matching {
        &self.matchings[color - 1]
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    /// Size of the smallest color class.
    pub fn min_color_size(&self) -> usize {
        self.matchings.iter().map(Matching::len).min().unwrap_or(0)
    }

    /// A clone of the family with colors reordered so that new color `i`
    /// is old color `order[i-1]`.
    pub(crate) fn reorder_colors(&self, order: &[Color]) -> MatchingFamily {
        debug_assert_eq!(order.len(), self.n());
        MatchingFamily {
            u_size: self.u_size,
            w_size: self.w_size,
            matchings: order.iter().map(|&c| self.matching(c).clone()).collect(),
        }
    }
}

/// A partial assignment of one edge per color whose image is a matching.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RawAssignment", into = "RawAssignment")]
pub struct RainbowMatching {
    assignment: BTreeMap<Color, Edge>,
}

/// Wire form: `{"assignment": [[color, [u,w]], ...]}` with 1-based colors.
#[derive(Serialize, Deserialize)]
struct RawAssignment {
    assignment: Vec<(Color, Edge)>,
}

impl From<RawAssignment> for RainbowMatching {
    fn from(raw: RawAssignment) -> Self {
        RainbowMatching {
            assignment: raw.assignment.into_iter().collect(),
        }
    }
}

impl From<RainbowMatching> for RawAssignment {
    fn from(r: RainbowMatching) -> Self {
        RawAssignment {
            assignment: r.assignment.into_iter().collect(),
        }
    }
}

impl RainbowMatching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, color: Color, edge: Edge) {
        self.assignment.insert(color, edge);
    }

    pub fn unassign(&mut self, color: Color) -> Option<Edge> {
        self.assignment.remove(&color)
    }

    pub fn edge(&self, color: Color) -> Option<Edge> {
        self.assignment.get(&color).copied()
    }

    pub fn size(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_full(&self, n: usize) -> bool {
        self.assignment.len() == n
    }

    pub fn iter(&self) -> impl Iterator<Item = (Color, Edge)> + '_ {
        self.assignment.iter().map(|(&c, &e)| (c, e))
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        self.assignment.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.assignment.values().copied()
    }

    /// Left vertices covered by the image.
    pub fn covered_u(&self) -> BTreeSet<usize> {
        self.assignment.values().map(|e| e.u).collect()
    }

    /// Right vertices covered by the image.
    pub fn covered_w(&self) -> BTreeSet<usize> {
        self.assignment.values().map(|e| e.w).collect()
    }

    /// True when `edge` shares a vertex with some assigned edge.
    pub fn conflicts(&self, edge: Edge) -> bool {
        self.assignment.values().any(|e| !e.disjoint(&edge))
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RainbowViolation {
    #[error("color {color} out of range 1..={n}")]
    ColorOutOfRange { color: Color, n: usize },
    #[error("edge ({u},{w}) does not belong to color {color}")]
    WrongColor { color: Color, u: usize, w: usize },
    #[error("colors {color_a} and {color_b} overlap on {side} vertex {vertex}")]
    Overlap {
        color_a: Color,
        color_b: Color,
        side: Side,
        vertex: usize,
    },
}

/// Checks that `r` is a valid rainbow matching for `family`, reporting the
/// first violation (ascending by color) otherwise.
pub fn check_rainbow_matching(
    family: &MatchingFamily,
    r: &RainbowMatching,
) -> Result<(), RainbowViolation> {
    let n = family.n();
    let mut used_u: BTreeMap<usize, Color> = BTreeMap::new();
    let mut used_w: BTreeMap<usize, Color> = BTreeMap::new();
    for (color, edge) in r.iter() {
        if color == 0 || color > n {
            return Err(RainbowViolation::ColorOutOfRange { color, n });
        }
        if !family.matching(color).contains(&edge) {
            return Err(RainbowViolation::WrongColor {
                color,
                u: edge.u,
                w: edge.w,
            });
        }
        if let Some(&prev) = used_u.get(&edge.u) {
            return Err(RainbowViolation::Overlap {
                color_a: prev,
                color_b: color,
                side: Side::Left,
                vertex: edge.u,
            });
        }
        if let Some(&prev) = used_w.get(&edge.w) {
            return Err(RainbowViolation::Overlap {
                color_a: prev,
                color_b: color,
                side: Side::Right,
                vertex: edge.w,
            });
        }
        used_u.insert(edge.u, color);
        used_w.insert(edge.w, color);
    }
    Ok(())
}

/// Boolean form of [`check_rainbow_matching`].
pub fn is_rainbow_matching(family: &MatchingFamily, r: &RainbowMatching) -> bool {
    check_rainbow_matching(family, r).is_ok()
}

/// The free (unmatched) vertices of both sides: X on the left, Y on the right.
pub fn free_vertices(
    family: &MatchingFamily,
    r: &RainbowMatching,
) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let used_u = r.covered_u();
    let used_w = r.covered_w();
    let x = (0..family.u_size()).filter(|v| !used_u.contains(v)).collect();
    let y = (0..family.w_size()).filter(|v| !used_w.contains(v)).collect();
    (x, y)
}

/// The edges of `edges` with left endpoint in `a` and right endpoint in `b`.
pub fn edges_between(edges: &[Edge], a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> Vec<Edge> {
    edges
        .iter()
        .filter(|e| a.contains(&e.u) && b.contains(&e.w))
        .copied()
        .collect()
}
