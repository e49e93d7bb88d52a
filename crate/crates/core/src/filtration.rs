//! Transfer filtrations: an edge ordering over a foundation of `b` vertices in which each
//! step adds one edge and at most one new vertex.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::{tight_line_graph, Hypergraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiltrationError {
    #[error("edge at step {step} never has exactly one vertex outside an earlier stage")]
    NoValidR { step: usize },
    #[error("invalid filtration: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// One step of a filtration: the edge added (0-based index into `Hypergraph::edges`)
/// and the vertex it introduces, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub edge: usize,
    pub adds: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferFiltration {
    pub foundation: Vec<usize>,
    pub steps: Vec<Step>,
    /// `r_map[i - 1] = r(i)` for steps `i = 1..=m`.
    #[serde(skip)]
    pub r_map: Vec<usize>,
    #[serde(skip)]
    pub radius: usize,
}

/// On-disk form; `r_map` and `radius` are always recomputed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationSpec {
    pub foundation: Vec<usize>,
    pub steps: Vec<Step>,
}

impl FiltrationSpec {
    pub fn build(self, g: &Hypergraph) -> Result<TransferFiltration, FiltrationError> {
        TransferFiltration::new(g, self.foundation, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// Condition 1: every edge appears exactly once and is present at its step.
    EdgeOrder,
    /// Condition 2: at most one new vertex per step.
    Growth,
    /// Condition 3: the new vertex lies in the step's edge.
    AddedOutsideEdge,
    /// Condition 4: the foundation is a set of `b` valid vertices.
    Foundation,
    /// Condition 5: every edge leaves the foundation.
    EdgeInsideFoundation,
    /// The last stage must contain every vertex of `G`.
    Incomplete,
    /// Stored `r_map` or `radius` disagree with the recomputed ones.
    RMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// 1-based step, when the violation is tied to one.
    pub step: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(s) => write!(f, "{:?} at step {s}: {}", self.kind, self.detail),
            None => write!(f, "{:?}: {}", self.kind, self.detail),
        }
    }
}

impl TransferFiltration {
    /// Computes `r_map` and `radius`, then rejects the result unless it validates.
    pub fn new(g: &Hypergraph, foundation: Vec<usize>, steps: Vec<Step>) -> Result<Self, FiltrationError> {
        let mut f = TransferFiltration { foundation, steps, r_map: Vec::new(), radius: 0 };
        let violations = structural_violations(g, &f);
        if !violations.is_empty() {
            return Err(FiltrationError::Invalid(violations));
        }
        f.r_map = compute_r(g, &f.foundation, &f.steps)?;
        f.radius = compute_radius(&f.r_map);
        Ok(f)
    }

    pub fn b(&self) -> usize {
        self.foundation.len()
    }

    pub fn m(&self) -> usize {
        self.steps.len()
    }

    pub fn spec(&self) -> FiltrationSpec {
        FiltrationSpec { foundation: self.foundation.clone(), steps: self.steps.clone() }
    }

    /// `added_at[v - 1]`: 0 for foundation vertices, the 1-based step for added ones,
    /// `None` for vertices never introduced.
    pub fn added_at(&self, n: usize) -> Vec<Option<usize>> {
        added_at(n, &self.foundation, &self.steps)
    }

    /// Distance of step `i` (1-based) from the foundation under `r`.
    pub fn depth(&self, i: usize) -> usize {
        let mut d = 0;
        let mut j = i;
        while j != 0 {
            j = self.r_map[j - 1];
            d += 1;
        }
        d
    }
}

fn added_at(n: usize, foundation: &[usize], steps: &[Step]) -> Vec<Option<usize>> {
    let mut at = vec![None; n];
    for &v in foundation {
        if (1..=n).contains(&v) {
            at[v - 1] = Some(0);
        }
    }
    for (i, s) in steps.iter().enumerate() {
        if let Some(v) = s.adds {
            if (1..=n).contains(&v) && at[v - 1].is_none() {
                at[v - 1] = Some(i + 1);
            }
        }
    }
    at
}

/// Minimal `r(i)`: the second-latest arrival among the edge's vertices, valid only when
/// the latest arrival is strictly later.
pub fn compute_r(g: &Hypergraph, foundation: &[usize], steps: &[Step]) -> Result<Vec<usize>, FiltrationError> {
    let at = added_at(g.n, foundation, steps);
    steps
        .iter()
        .enumerate()
        .map(|(idx, s)| {
            let step = idx + 1;
            let mut times: Vec<usize> = g.edges[s.edge]
                .iter()
                .map(|&v| at[v - 1].ok_or(FiltrationError::NoValidR { step }))
                .collect::<Result<_, _>>()?;
            times.sort_unstable();
            let last = *times.last().ok_or(FiltrationError::NoValidR { step })?;
            let second = if times.len() >= 2 { times[times.len() - 2] } else { 0 };
            if second < last && last <= step {
                Ok(second)
            } else {
                Err(FiltrationError::NoValidR { step })
            }
        })
        .collect()
}

/// Least `β` with `r^β ≡ 0`, i.e. the maximal chain length down to the foundation.
pub fn compute_radius(r_map: &[usize]) -> usize {
    let mut depth = vec![0usize; r_map.len() + 1];
    for i in 1..=r_map.len() {
        depth[i] = depth[r_map[i - 1]] + 1;
    }
    depth.into_iter().max().unwrap_or(0)
}

fn structural_violations(g: &Hypergraph, f: &TransferFiltration) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, step: Option<usize>, detail: String| out.push(Violation { kind, step, detail });

    let mut present = BTreeSet::new();
    for &v in &f.foundation {
        if v == 0 || v > g.n {
            push(ViolationKind::Foundation, None, format!("vertex {v} outside 1..={}", g.n));
        } else if !present.insert(v) {
            push(ViolationKind::Foundation, None, format!("vertex {v} repeated"));
        }
    }
    let foundation = present.clone();

    let mut used = vec![0usize; g.m()];
    for (idx, s) in f.steps.iter().enumerate() {
        let step = Some(idx + 1);
        if s.edge >= g.m() {
            push(ViolationKind::EdgeOrder, step, format!("edge index {} out of range", s.edge));
            continue;
        }
        used[s.edge] += 1;
        let edge = &g.edges[s.edge];
        if let Some(v) = s.adds {
            if present.contains(&v) {
                push(ViolationKind::Growth, step, format!("vertex {v} already present"));
            }
            if !edge.contains(&v) {
                push(ViolationKind::AddedOutsideEdge, step, format!("vertex {v} not in edge {}", s.edge));
            }
            present.insert(v);
        }
        if let Some(v) = edge.iter().find(|v| !present.contains(v)) {
            push(ViolationKind::EdgeOrder, step, format!("vertex {v} of edge {} not yet present", s.edge));
        }
        if edge.iter().all(|v| foundation.contains(v)) {
            push(ViolationKind::EdgeInsideFoundation, step, format!("edge {} lies in the foundation", s.edge));
        }
    }
    for (e, &count) in used.iter().enumerate() {
        if count != 1 {
            push(ViolationKind::EdgeOrder, None, format!("edge {e} appears {count} times"));
        }
    }
    if let Some(v) = (1..=g.n).find(|v| !present.contains(v)) {
        push(ViolationKind::Incomplete, None, format!("vertex {v} never added"));
    }
    out
}

/// Checks every defining condition plus consistency of the stored `r_map` and `radius`.
pub fn validate(g: &Hypergraph, f: &TransferFiltration) -> Vec<Violation> {
    let mut out = structural_violations(g, f);
    if !out.is_empty() {
        return out;
    }
    match compute_r(g, &f.foundation, &f.steps) {
        Ok(r) => {
            if r != f.r_map {
                out.push(Violation { kind: ViolationKind::RMap, step: None, detail: format!("r_map {:?} != {:?}", f.r_map, r) });
            } else if compute_radius(&r) != f.radius {
                out.push(Violation { kind: ViolationKind::RMap, step: None, detail: format!("radius {} != {}", f.radius, compute_radius(&r)) });
            }
        }
        Err(FiltrationError::NoValidR { step }) => out.push(Violation {
            kind: ViolationKind::RMap,
            step: Some(step),
            detail: "no valid r".into(),
        }),
        Err(e) => out.push(Violation { kind: ViolationKind::RMap, step: None, detail: e.to_string() }),
    }
    out
}

/// BFS over the tight line graph, one component at a time from its smallest edge.
/// An edge bringing several new vertices adds its last new vertex (in stored order) and
/// promotes the rest into the foundation; isolated vertices join the foundation last.
pub fn greedy_filtration(g: &Hypergraph) -> TransferFiltration {
    let order: Vec<usize> = match tight_line_graph(g) {
        Ok(lg) => {
            let mut seen = vec![false; g.m()];
            let mut order = Vec::with_capacity(g.m());
            for start in 0..g.m() {
                if seen[start] {
                    continue;
                }
                seen[start] = true;
                let mut queue = VecDeque::from([start]);
                while let Some(e) = queue.pop_front() {
                    order.push(e);
                    for &w in &lg.adj[e] {
                        if !seen[w] {
                            seen[w] = true;
                            queue.push_back(w);
                        }
                    }
                }
            }
            order
        }
        Err(_) => (0..g.m()).collect(),
    };

    let mut present = vec![false; g.n + 1];
    let mut foundation = Vec::new();
    let mut steps = Vec::with_capacity(g.m());
    for e in order {
        let fresh: Vec<usize> = g.edges[e].iter().copied().filter(|&v| !present[v]).collect();
        let adds = fresh.last().copied();
        for &v in fresh.iter().take(fresh.len().saturating_sub(1)) {
            foundation.push(v);
        }
        for &v in &fresh {
            present[v] = true;
        }
        steps.push(Step { edge: e, adds });
    }
    foundation.extend((1..=g.n).filter(|&v| !present[v]));

    let r_map = compute_r(g, &foundation, &steps).unwrap_or_default();
    let radius = compute_radius(&r_map);
    TransferFiltration { foundation, steps, r_map, radius }
}
