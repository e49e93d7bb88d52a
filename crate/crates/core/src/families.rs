//! Generators for the named hypergraph families, each with its canonical transfer
//! filtration (where one exists) and a human-readable label per vertex.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::filtration::{FiltrationError, Step, TransferFiltration};
use crate::hypergraph::Hypergraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Family {
    pub name: String,
    pub hypergraph: Hypergraph,
    pub filtration: Option<TransferFiltration>,
    /// `labels[v - 1]` names vertex `v`.
    pub labels: Vec<String>,
}

impl Family {
    pub fn n(&self) -> usize {
        self.hypergraph.n
    }

    pub fn m(&self) -> usize {
        self.hypergraph.m()
    }

    pub fn b(&self) -> Option<usize> {
        self.filtration.as_ref().map(TransferFiltration::b)
    }

    pub fn radius(&self) -> Option<usize> {
        self.filtration.as_ref().map(|f| f.radius)
    }
}

type Label = Vec<i64>;

fn show(label: &Label) -> String {
    let parts: Vec<String> = label.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

/// Assembles a family from labelled edges listed in filtration order. Labels are
/// canonicalized through `canon`, then numbered densely in lexicographic order; each
/// edge adds its one unseen vertex, if any.
fn assemble(
    name: String,
    foundation: &[Label],
    edges: &[Vec<Label>],
    canon: impl Fn(&Label) -> Label,
) -> Result<Family, FamilyError> {
    let mut all: BTreeSet<Label> = foundation.iter().map(&canon).collect();
    edges.iter().flatten().for_each(|l| {
        all.insert(canon(l));
    });
    let ids: BTreeMap<Label, usize> = all.iter().enumerate().map(|(i, l)| (l.clone(), i + 1)).collect();
    let id = |l: &Label| ids[&canon(l)];
    let mut present: BTreeSet<usize> = foundation.iter().map(id).collect();
    let found: Vec<usize> = foundation.iter().map(id).collect();
    let mut steps = Vec::with_capacity(edges.len());
    let mut out_edges = Vec::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        let vs: Vec<usize> = e.iter().map(id).collect();
        let fresh: Vec<usize> = vs.iter().copied().filter(|v| !present.contains(v)).collect();
        assert!(fresh.len() <= 1, "{name}: edge {i} introduces {} vertices", fresh.len());
        present.extend(&fresh);
        steps.push(Step { edge: i, adds: fresh.first().copied() });
        out_edges.push(vs);
    }
    let hypergraph = Hypergraph::new(ids.len(), out_edges)
        .map_err(|e| FamilyError::InvalidParameters(format!("{name}: {e}")))?;
    let filtration = TransferFiltration::new(&hypergraph, found, steps)?;
    Ok(Family { name, hypergraph, filtration: Some(filtration), labels: all.iter().map(show).collect() })
}

fn plain(name: &str, n: usize, edges: Vec<Vec<usize>>) -> Family {
    Family {
        name: name.into(),
        hypergraph: Hypergraph::new(n, edges).expect("fixed edge list"),
        filtration: None,
        labels: (1..=n).map(|v| format!("v{v}")).collect(),
    }
}

fn need(cond: bool, msg: impl Fn() -> String) -> Result<(), FamilyError> {
    if cond {
        Ok(())
    } else {
        Err(FamilyError::InvalidParameters(msg()))
    }
}

/// Sliding windows of width `k` over `t` consecutive vertices.
pub fn chain(t: usize, k: usize) -> Result<Family, FamilyError> {
    need(k >= 2 && t >= k, || format!("chain needs k >= 2 and t >= k, got t={t}, k={k}"))?;
    let foundation: Vec<Label> = (0..k as i64 - 1).map(|i| vec![i]).collect();
    let edges: Vec<Vec<Label>> = (0..=t - k).map(|i| (i..i + k).map(|v| vec![v as i64]).collect()).collect();
    let f = assemble(format!("chain_{t}_{k}"), &foundation, &edges, Clone::clone)?;
    assert_eq!((f.n(), f.m()), (t, t - k + 1));
    Ok(f)
}

/// All `t` cyclic windows of width `k` on `ℤ/t`.
pub fn cycle(t: usize, k: usize) -> Result<Family, FamilyError> {
    need(k >= 2 && t > k, || format!("cycle needs k >= 2 and t > k, got t={t}, k={k}"))?;
    let foundation: Vec<Label> = (0..k as i64 - 1).map(|i| vec![i]).collect();
    let edges: Vec<Vec<Label>> = (0..t).map(|i| (i..i + k).map(|v| vec![(v % t) as i64]).collect()).collect();
    let f = assemble(format!("cycle_{t}_{k}"), &foundation, &edges, Clone::clone)?;
    assert_eq!((f.n(), f.m()), (t, t));
    Ok(f)
}

/// `S_{t,k}`: windows `E_i = {i, …, i+k−1}` on `ℤ/t` for `0 ≤ i ≤ t−k+1`.
pub fn semicycle(t: usize, k: usize) -> Result<Family, FamilyError> {
    need(k >= 2 && t > k, || format!("semicycle needs k >= 2 and t > k, got t={t}, k={k}"))?;
    let foundation: Vec<Label> = (0..k as i64 - 1).map(|i| vec![i]).collect();
    let edges: Vec<Vec<Label>> = (0..=t - k + 1).map(|i| (i..i + k).map(|v| vec![(v % t) as i64]).collect()).collect();
    let f = assemble(format!("semicycle_{t}_{k}"), &foundation, &edges, Clone::clone)?;
    assert_eq!((f.n(), f.m(), f.b()), (t, t - k + 2, Some(k - 1)));
    Ok(f)
}

/// Tiling of the torus `ℤ/a₁ × ⋯ × ℤ/a_{k−1}`: one edge `{i, i+e₁, …, i+e_{k−1}}` per
/// vertex. The foundation is the layer with last coordinate 0.
pub fn torus(a: &[usize]) -> Result<Family, FamilyError> {
    need(a.len() >= 2 && a.iter().all(|&x| x >= 2), || format!("torus needs at least two sides >= 2, got {a:?}"))?;
    let d = a.len();
    let mut points: Vec<Label> = vec![vec![]];
    for &side in a {
        points = points.into_iter().flat_map(|p| (0..side as i64).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    let shift = |p: &Label, axis: usize| {
        let mut q = p.clone();
        q[axis] = (q[axis] + 1) % a[axis] as i64;
        q
    };
    // Layer by layer in the last coordinate.
    let mut bases = points.clone();
    bases.sort_by_key(|p| p[d - 1]);
    let edges: Vec<Vec<Label>> = bases
        .iter()
        .map(|p| std::iter::once(p.clone()).chain((0..d).map(|axis| shift(p, axis))).collect())
        .collect();
    let foundation: Vec<Label> = points.iter().filter(|p| p[d - 1] == 0).cloned().collect();
    let name = format!("torus_{}", a.iter().map(usize::to_string).collect::<Vec<_>>().join("x"));
    let f = assemble(name, &foundation, &edges, Clone::clone)?;
    let total: usize = a.iter().product();
    assert_eq!((f.n(), f.m(), f.b()), (total, total, Some(total / a[d - 1])));
    Ok(f)
}

/// Vertices and filtration-ordered edges of the triangular patch `G_{t,k}`.
fn triangle(t: usize, k: usize) -> (Vec<Label>, Vec<Vec<Label>>) {
    let (t, w) = (t as i64, k as i64 - 2);
    let vertices: Vec<Label> = (0..=t).flat_map(|q| (w * q..=w * t).map(move |p| vec![p, q])).collect();
    let edges = (0..t)
        .flat_map(|s| (w * s..=w * (t - 1)).map(move |r| (r, s)))
        .map(|(r, s)| (0..=w).map(|j| vec![r + j, s]).chain(std::iter::once(vec![r + w, s + 1])).collect())
        .collect();
    (vertices, edges)
}

/// `T_{t,k}`: the triangular patch with its three degree-1 corners identified.
pub fn modified_torus(t: usize, k: usize) -> Result<Family, FamilyError> {
    need(k >= 3 && t >= 2, || format!("modified torus needs k >= 3 and t >= 2, got t={t}, k={k}"))?;
    let (vertices, edges) = triangle(t, k);
    let w = (t * (k - 2)) as i64;
    let corners = [vec![0, 0], vec![w, 0], vec![w, t as i64]];
    let canon = |l: &Label| if corners.contains(l) { vec![0, 0] } else { l.clone() };
    let foundation: Vec<Label> = (0..w).map(|p| vec![p, 0]).collect();
    let f = assemble(format!("modified_torus_{t}_{k}"), &foundation, &edges, canon)?;
    let n = (t + 1) * (2 + t * (k - 2)) / 2 - 2;
    let m = t * (2 + (t - 1) * (k - 2)) / 2;
    assert_eq!(vertices.len() - 2, n);
    assert_eq!((f.n(), f.m(), f.b()), (n, m, Some(t * (k - 2))));
    Ok(f)
}

/// `H_{t,k}`: `k` triangular patches glued corner to corner in a ring, plus the apex
/// edge through their top corners.
pub fn fir_tree(t: usize, k: usize) -> Result<Family, FamilyError> {
    need(k >= 3 && t >= 1, || format!("fir tree needs k >= 3 and t >= 1, got t={t}, k={k}"))?;
    let (_, patch) = triangle(t, k);
    let w = (t * (k - 2)) as i64;
    let kk = k as i64;
    let tag = |i: i64, l: &Label| vec![i, l[0], l[1]];
    // (i, w, 0) is glued to (i+1, 0, 0); the class is named by its smaller label.
    let canon = move |l: &Label| {
        let (i, p, q) = (l[0], l[1], l[2]);
        if q == 0 && p == w {
            let other = vec![(i + 1) % kk, 0, 0];
            return other.min(l.clone());
        }
        if q == 0 && p == 0 {
            let other = vec![(i + kk - 1) % kk, w, 0];
            return other.min(l.clone());
        }
        l.clone()
    };
    let foundation: Vec<Label> = (0..kk).flat_map(|i| (0..w).map(move |p| vec![i, p, 0])).collect();
    let mut edges: Vec<Vec<Label>> = (0..kk).flat_map(|i| patch.iter().map(move |e| e.iter().map(|l| tag(i, l)).collect())).collect();
    edges.push((0..kk).map(|i| vec![i, w, t as i64]).collect());
    let f = assemble(format!("fir_tree_{t}_{k}"), &foundation, &edges, canon)?;
    let n = k * ((t + 1) * (2 + t * (k - 2)) / 2 - 1);
    let m = k * t * (2 + (t - 1) * (k - 2)) / 2 + 1;
    assert_eq!((f.n(), f.m(), f.b()), (n, m, Some(t * k * (k - 2))));
    Ok(f)
}

/// `C_{t,k}` over the alphabet `{1, …, k−1}`: leaves `Σ^t` hang off the two-letter
/// foundation, each shorter word joins its one-letter extensions, and the closing edge
/// joins `(0,1)` to the single letters.
pub fn crash(t: usize, k: usize) -> Result<Family, FamilyError> {
    need(k >= 3 && t >= 1, || format!("crash needs k >= 3 and t >= 1, got t={t}, k={k}"))?;
    let sigma: Vec<i64> = (1..k as i64).collect();
    let mut words: Vec<Vec<Label>> = vec![vec![vec![]]];
    for len in 1..=t {
        let next = words[len - 1].iter().flat_map(|w| sigma.iter().map(move |&a| [w.clone(), vec![a]].concat())).collect();
        words.push(next);
    }
    let v0: Vec<Label> = sigma.iter().map(|&a| vec![0, a]).collect();
    let mut edges: Vec<Vec<Label>> = Vec::new();
    for x in &words[t] {
        edges.push(std::iter::once(x.clone()).chain(v0.iter().cloned()).collect());
    }
    for len in (1..t).rev() {
        for x in &words[len] {
            edges.push(std::iter::once(x.clone()).chain(sigma.iter().map(|&a| [x.clone(), vec![a]].concat())).collect());
        }
    }
    edges.push(std::iter::once(vec![0, 1]).chain(words[1].iter().cloned()).collect());
    let f = assemble(format!("crash_{t}_{k}"), &v0, &edges, Clone::clone)?;
    let q = k - 1;
    let leaves_and_up = (q.pow(t as u32 + 1) - q) / (q - 1).max(1);
    let geometric = if q == 1 { t } else { leaves_and_up };
    assert_eq!((f.n(), f.m(), f.b()), (q + geometric, geometric + 1, Some(q)));
    Ok(f)
}

/// The 4-vertex 3-uniform cycle used throughout as the running example, with foundation
/// `{1, 2}`.
pub fn running_example() -> Family {
    let g = Hypergraph::new(4, vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]).expect("fixed");
    let steps = vec![
        Step { edge: 0, adds: Some(3) },
        Step { edge: 1, adds: Some(4) },
        Step { edge: 2, adds: None },
        Step { edge: 3, adds: None },
    ];
    let filtration = TransferFiltration::new(&g, vec![1, 2], steps).expect("valid");
    Family { name: "running_example".into(), hypergraph: g, filtration: Some(filtration), labels: (1..=4).map(|v| v.to_string()).collect() }
}

pub fn fano() -> Family {
    plain(
        "fano",
        7,
        vec![vec![1, 2, 3], vec![1, 4, 5], vec![1, 6, 7], vec![2, 4, 6], vec![2, 5, 7], vec![3, 4, 7], vec![3, 5, 6]],
    )
}

/// Edges of the interlinked cycle with the representative of each edge.
pub const ICYCLE_TABLE: [([usize; 3], usize); 28] = [
    ([1, 2, 28], 28),
    ([2, 3, 4], 2),
    ([4, 5, 6], 4),
    ([6, 7, 8], 8),
    ([8, 9, 10], 10),
    ([10, 11, 12], 12),
    ([12, 13, 14], 13),
    ([14, 15, 16], 14),
    ([16, 17, 18], 16),
    ([18, 19, 20], 18),
    ([20, 21, 22], 22),
    ([22, 23, 24], 24),
    ([24, 25, 26], 26),
    ([26, 27, 28], 27),
    ([5, 22, 28], 5),
    ([7, 20, 26], 7),
    ([9, 18, 24], 9),
    ([11, 16, 22], 11),
    ([8, 14, 19], 19),
    ([6, 12, 21], 21),
    ([4, 10, 23], 23),
    ([2, 8, 25], 25),
    ([10, 15, 20], 20),
    ([6, 15, 24], 15),
    ([3, 15, 27], 3),
    ([1, 6, 24], 6),
    ([1, 10, 20], 1),
    ([1, 13, 17], 17),
];

pub fn icycle() -> Family {
    plain("icycle", 28, ICYCLE_TABLE.iter().map(|(e, _)| e.to_vec()).collect())
}

pub fn icycle_sdr() -> Vec<usize> {
    ICYCLE_TABLE.iter().map(|&(_, v)| v).collect()
}

/// Three copies of `block` around a hub on `v1, …, v9`: rings `{3,4,7}`, `{2,5,8}`,
/// `{1,6,9}`, spokes `{1,2,3}`, `{4,5,6}`, `{7,8,9}`, and three link edges each joining
/// two different blocks through `v1`, `v6` or `v9`. Blocks use up their own vertices, so
/// the links take `v1`, `v6`, `v9` and the outer ring is left unmatched.
///
/// With `thin_hub` the inner two rings, the spokes `{4,5,6}`, `{7,8,9}` and the vertices
/// `v4, v5, v7, v8` are dropped.
pub fn no_sdr_counterexample(block: &Family, thin_hub: bool) -> Family {
    let bn = block.n();
    let hub: Vec<usize> = if thin_hub { vec![1, 2, 3, 6, 9] } else { (1..=9).collect() };
    let hub_id = |v: usize| hub.iter().position(|&h| h == v).expect("hub vertex") + 1;
    let offset = hub.len();
    let blk = |copy: usize, v: usize| offset + copy * bn + v;
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut hub_edges = vec![vec![1, 2, 3], vec![1, 6, 9]];
    if !thin_hub {
        hub_edges.extend([vec![4, 5, 6], vec![7, 8, 9], vec![3, 4, 7], vec![2, 5, 8]]);
    }
    edges.extend(hub_edges.iter().map(|e| e.iter().map(|&v| hub_id(v)).collect::<Vec<_>>()));
    edges.push(vec![blk(0, 1), hub_id(1), blk(1, 2)]);
    edges.push(vec![blk(1, 1), hub_id(6), blk(2, 2)]);
    edges.push(vec![blk(2, 1), hub_id(9), blk(0, 2)]);
    for copy in 0..3 {
        edges.extend(block.hypergraph.edges.iter().map(|e| e.iter().map(|&v| blk(copy, v)).collect::<Vec<_>>()));
    }
    let n = offset + 3 * bn;
    let mut labels: Vec<String> = hub.iter().map(|v| format!("v{v}")).collect();
    for copy in 0..3 {
        labels.extend(block.labels.iter().map(|l| format!("{}{copy}:{l}", block.name)));
    }
    let name = format!("no_sdr_{}{}", block.name, if thin_hub { "_thin" } else { "" });
    Family { name, hypergraph: Hypergraph::new(n, edges).expect("in range"), filtration: None, labels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{find_sdr, Matching, Sdr};

    #[test]
    fn crash_counts() {
        let c = crash(2, 3).unwrap();
        assert_eq!((c.n(), c.m(), c.b()), (8, 7, Some(2)));
        let c = crash(3, 3).unwrap();
        assert_eq!((c.n(), c.m(), c.b()), (16, 15, Some(2)));
        let c = crash(2, 4).unwrap();
        assert_eq!((c.n(), c.m(), c.b()), (15, 13, Some(3)));
    }

    #[test]
    fn crash_edge_forms() {
        let c = crash(2, 3).unwrap();
        let label = |v: usize| c.labels[v - 1].clone();
        let last = c.hypergraph.edges.last().unwrap();
        assert_eq!(last.iter().map(|&v| label(v)).collect::<Vec<_>>(), ["(0,1)", "(1)", "(2)"]);
        let first = &c.hypergraph.edges[0];
        assert_eq!(first.iter().map(|&v| label(v)).collect::<Vec<_>>(), ["(1,1)", "(0,1)", "(0,2)"]);
    }

    #[test]
    fn modified_torus_counts() {
        let f = modified_torus(2, 3).unwrap();
        assert_eq!((f.n(), f.m(), f.b()), (4, 3, Some(2)));
        let f = modified_torus(3, 3).unwrap();
        assert_eq!((f.n(), f.m(), f.b()), (8, 6, Some(3)));
    }

    #[test]
    fn fir_tree_counts() {
        let f = fir_tree(4, 3).unwrap();
        assert_eq!((f.n(), f.m(), f.b()), (42, 31, Some(12)));
        let f = fir_tree(2, 3).unwrap();
        assert_eq!((f.n(), f.m(), f.b()), (15, 10, Some(6)));
    }

    #[test]
    fn torus_three_by_three() {
        let f = torus(&[3, 3]).unwrap();
        assert_eq!((f.n(), f.m(), f.b()), (9, 9, Some(3)));
    }

    #[test]
    fn semicycle_identity() {
        for t in 4..9 {
            let f = semicycle(t, 3).unwrap();
            assert_eq!(f.b(), Some(f.n() - f.m() + 1));
        }
    }

    #[test]
    fn icycle_table_sdr_validates() {
        let f = icycle();
        assert_eq!((f.n(), f.m()), (28, 28));
        assert!(Sdr { assignment: icycle_sdr() }.is_valid_for(&f.hypergraph));
    }

    #[test]
    fn counterexample_has_no_sdr() {
        let g = no_sdr_counterexample(&fano(), false);
        assert_eq!((g.n(), g.m()), (30, 30));
        assert!(matches!(find_sdr(&g.hypergraph), Matching::Hall(_)));
        let g = no_sdr_counterexample(&icycle(), true);
        assert_eq!((g.n(), g.m()), (89, 89));
        assert!(matches!(find_sdr(&g.hypergraph), Matching::Hall(_)));
    }

    #[test]
    fn bad_parameters() {
        assert!(crash(0, 3).is_err());
        assert!(semicycle(3, 3).is_err());
        assert!(torus(&[1, 3]).is_err());
    }
}
