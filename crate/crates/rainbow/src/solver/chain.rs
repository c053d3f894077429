//! The alternating chain used to free a left vertex for a candidate edge.
//!
//! Starting from the smallest anchored color, the builder repeatedly picks
//! for the current color the lexicographically smallest edge from an unused
//! free left vertex into the reached right set. That edge either lands on
//! the right endpoint of an earlier chain R-edge (the chain closes) or hands
//! over to the color matched there (the chain extends). Supply counting
//! guarantees the walk terminates within d+3 steps, so `ChainStuck` can only
//! signal an upstream fault.

use std::collections::BTreeSet;

use crate::family::{Color, Edge};
use crate::solver::scaffold::Scaffold;
use crate::solver::SolverError;

/// One completed step: the color, its R-edge, and the replacement edge
/// chosen from the free left set.
#[derive(Clone, Debug)]
pub struct ChainLink {
    pub color: Color,
    pub r_edge: Edge,
    pub f_edge: Edge,
}

/// How the walk terminated.
#[derive(Clone, Debug)]
pub enum ChainCase {
    /// The replacement edge for position m+1 landed back on the right
    /// endpoint of the chain R-edge at position `t` (1-based, t <= m).
    Closed { t: usize, closing_f: Edge },
    /// The walk completed d+3 links without closing.
    Exhausted,
}

/// The chain: `m = links.len()` completed links plus the trailing R-edge at
/// position m+1 (its color has no replacement edge yet).
#[derive(Clone, Debug)]
pub struct Chain {
    pub links: Vec<ChainLink>,
    pub last_color: Color,
    pub last_r: Edge,
    pub case: ChainCase,
}

impl Chain {
    pub fn m(&self) -> usize {
        self.links.len()
    }

    /// Left endpoints of the chain R-edges at positions 1..m.
    pub fn chain_u(&self) -> BTreeSet<usize> {
        self.links.iter().map(|l| l.r_edge.u).collect()
    }

    /// Colors at positions 1..m+1, in order.
    pub fn colors(&self) -> Vec<Color> {
        self.links
            .iter()
            .map(|l| l.color)
            .chain(std::iter::once(self.last_color))
            .collect()
    }

    /// Structural self-checks against the scaffold that produced the chain.
    pub fn check_invariants(&self, s: &Scaffold) -> Result<(), String> {
        let budget = s.link_count + 3;
        match &self.case {
            ChainCase::Closed { t, closing_f } => {
                if self.m() >= budget {
                    return Err(format!("closed chain has m={} >= d+3={}", self.m(), budget));
                }
                if *t < 1 || *t > self.m() {
                    return Err(format!("closing position t={t} out of 1..={}", self.m()));
                }
                if closing_f.w != self.links[*t - 1].r_edge.w {
                    return Err("closing edge must land on the R-edge at position t".into());
                }
                if !s.x_free.contains(&closing_f.u)
                    || self.links.iter().any(|l| l.f_edge.u == closing_f.u)
                {
                    return Err("closing edge must use a fresh free left vertex".into());
                }
            }
            ChainCase::Exhausted => {
                if self.m() != budget {
                    return Err(format!("exhausted chain has m={} != d+3={}", self.m(), budget));
                }
            }
        }
        let mut seen_u = BTreeSet::new();
        for (i, l) in self.links.iter().enumerate() {
            if s.near_full.edge(l.color) != Some(l.r_edge) {
                return Err(format!("link {i}: r_edge does not match R"));
            }
            if !s.relabeled.matching(l.color).contains(&l.f_edge) {
                return Err(format!("link {i}: f_edge not in its color"));
            }
            if !s.x_free.contains(&l.f_edge.u) || !seen_u.insert(l.f_edge.u) {
                return Err(format!("link {i}: f_edge left endpoint reused or not free"));
            }
            if !s.w_reach.contains(&l.f_edge.w) {
                return Err(format!("link {i}: f_edge right endpoint outside reach"));
            }
        }
        // Each link's f-edge hands over to the next position's R-edge.
        for i in 0..self.links.len() {
            let next_r = if i + 1 < self.links.len() {
                self.links[i + 1].r_edge
            } else {
                self.last_r
            };
            match &self.case {
                ChainCase::Closed { .. } if i + 1 == self.links.len() => {
                    if self.links[i].f_edge.w != self.last_r.w {
                        return Err("final link must hand over to the trailing R-edge".into());
                    }
                }
                _ => {
                    if self.links[i].f_edge.w != next_r.w {
                        return Err(format!("link {i} does not hand over to position {}", i + 2));
                    }
                }
            }
        }
        if s.near_full.edge(self.last_color) != Some(self.last_r) {
            return Err("trailing R-edge does not match R".into());
        }
        Ok(())
    }
}

/// Builds the chain for a scaffold whose supply guarantees have been checked.
pub fn build_chain(s: &Scaffold) -> Result<Chain, SolverError> {
    let start = *s
        .anchored
        .iter()
        .next()
        .ok_or_else(|| SolverError::ChainStuck {
            reason: "no anchored colors to start from".into(),
        })?;
    let budget = s.link_count + 3;
    let mut links: Vec<ChainLink> = Vec::new();
    let mut used_x: BTreeSet<usize> = BTreeSet::new();
    // R-edges at positions 1..i, current position last.
    let mut seq: Vec<(Color, Edge)> = vec![(start, s.r_edge(start))];
    loop {
        let (cur_color, cur_r) = *seq.last().expect("seq nonempty");
        let f = s
            .relabeled
            .matching(cur_color)
            .edges()
            .iter()
            .find(|e| {
                s.x_free.contains(&e.u) && !used_x.contains(&e.u) && s.w_reach.contains(&e.w)
            })
            .copied()
            .ok_or_else(|| SolverError::ChainStuck {
                reason: format!(
                    "color {cur_color} has no admissible edge at position {} (d={})",
                    links.len() + 1,
                    s.link_count
                ),
            })?;
        // Closing? The new edge lands on an earlier chain R-edge.
        if let Some(pos) = seq[..seq.len() - 1].iter().position(|(_, r)| r.w == f.w) {
            return Ok(Chain {
                links,
                last_color: cur_color,
                last_r: cur_r,
                case: ChainCase::Closed {
                    t: pos + 1,
                    closing_f: f,
                },
            });
        }
        used_x.insert(f.u);
        links.push(ChainLink {
            color: cur_color,
            r_edge: cur_r,
            f_edge: f,
        });
        let next_color = s.color_at_w(f.w).ok_or_else(|| {
            SolverError::Fault(format!("reached right vertex {} is unmatched", f.w))
        })?;
        let next_r = s.r_edge(next_color);
        debug_assert!(seq.iter().all(|&(c, _)| c != next_color));
        if links.len() == budget {
            return Ok(Chain {
                links,
                last_color: next_color,
                last_r: next_r,
                case: ChainCase::Exhausted,
            });
        }
        seq.push((next_color, next_r));
    }
}
