//! Hypergraphs with ordered edges, structural predicates and SDR (matching) algorithms.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("edge {edge} contains vertex {vertex} outside 1..={n}")]
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("edge {edge} repeats vertex {vertex}")]
    RepeatedVertex { edge: usize, vertex: usize },
    #[error("hypergraph is not uniform")]
    NotUniform,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// A hypergraph on vertices `1..=n`. Edge tuples keep their vertex order, which fixes
/// the slot order of the constraint living on that edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph")]
pub struct Hypergraph {
    pub n: usize,
    pub edges: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawHypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<RawHypergraph> for Hypergraph {
    type Error = HypergraphError;
    fn try_from(raw: RawHypergraph) -> Result<Self, Self::Error> {
        Hypergraph::new(raw.n, raw.edges)
    }
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self, HypergraphError> {
        for (e, edge) in edges.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &v in edge {
                if v == 0 || v > n {
                    return Err(HypergraphError::VertexOutOfRange { edge: e, vertex: v, n });
                }
                if !seen.insert(v) {
                    return Err(HypergraphError::RepeatedVertex { edge: e, vertex: v });
                }
            }
        }
        Ok(Hypergraph { n, edges })
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Sorted vertex set of edge `e`.
    pub fn vertex_set(&self, e: usize) -> Vec<usize> {
        let mut s = self.edges[e].clone();
        s.sort_unstable();
        s
    }

    /// Degree of every vertex, indexed by `v - 1`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for edge in &self.edges {
            for &v in edge {
                d[v - 1] += 1;
            }
        }
        d
    }

    /// For each vertex (index `v - 1`), the sorted list of edges containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (e, edge) in self.edges.iter().enumerate() {
            for &v in edge {
                inc[v - 1].push(e);
            }
        }
        inc
    }

    /// Edge size if all edges share it.
    pub fn uniformity(&self) -> Option<usize> {
        let k = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == k).then_some(k)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|v| b.contains(v)).count()
}

pub fn is_k_uniform(g: &Hypergraph, k: usize) -> bool {
    g.edges.iter().all(|e| e.len() == k)
}

/// Simple undirected graph on nodes `0..adj.len()`, adjacency lists sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Connected components, each sorted, listed by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        for s in 0..self.adj.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

fn graph_from_predicate(m: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Graph {
    let mut adj = vec![Vec::new(); m];
    for i in 0..m {
        for j in (i + 1)..m {
            if adjacent(i, j) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Graph { adj }
}

/// Edges are adjacent iff they share exactly `k - 1` vertices.
pub fn tight_line_graph(g: &Hypergraph) -> Result<Graph, HypergraphError> {
    let k = match g.uniformity() {
        Some(k) => k,
        None if g.edges.is_empty() => 0,
        None => return Err(HypergraphError::NotUniform),
    };
    Ok(graph_from_predicate(g.m(), |i, j| {
        k > 0 && intersection_size(&g.edges[i], &g.edges[j]) == k - 1
    }))
}

/// Edges are adjacent iff they share at least one vertex.
pub fn edge_intersection_graph(g: &Hypergraph) -> Graph {
    graph_from_predicate(g.m(), |i, j| intersection_size(&g.edges[i], &g.edges[j]) > 0)
}

/// Edge index to representative vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sdr {
    pub assignment: Vec<usize>,
}

impl Sdr {
    pub fn is_valid_for(&self, g: &Hypergraph) -> bool {
        if self.assignment.len() != g.m() {
            return false;
        }
        let mut used = BTreeSet::new();
        self.assignment
            .iter()
            .zip(&g.edges)
            .all(|(v, edge)| edge.contains(v) && used.insert(*v))
    }
}

/// A set of edges whose union is smaller than the set itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallCertificate {
    pub edge_subset: Vec<usize>,
    pub union_size: usize,
}

impl HallCertificate {
    pub fn is_valid_for(&self, g: &Hypergraph) -> bool {
        let union: BTreeSet<usize> = self
            .edge_subset
            .iter()
            .flat_map(|&e| g.edges[e].iter().copied())
            .collect();
        let distinct: BTreeSet<usize> = self.edge_subset.iter().copied().collect();
        distinct.len() == self.edge_subset.len()
            && union.len() == self.union_size
            && self.union_size < self.edge_subset.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matching {
    Sdr(Sdr),
    Hall(HallCertificate),
}

impl Matching {
    pub fn sdr(self) -> Option<Sdr> {
        match self {
            Matching::Sdr(s) => Some(s),
            Matching::Hall(_) => None,
        }
    }
}

/// Maximum edge-to-vertex matching by augmenting paths; edges processed in index order,
/// vertices tried smallest first.
pub fn find_sdr(g: &Hypergraph) -> Matching {
    let sorted: Vec<Vec<usize>> = (0..g.m()).map(|e| g.vertex_set(e)).collect();
    let mut match_vertex: Vec<Option<usize>> = vec![None; g.n + 1];
    let mut match_edge: Vec<Option<usize>> = vec![None; g.m()];

    fn augment(
        e: usize,
        sorted: &[Vec<usize>],
        visited: &mut [bool],
        match_vertex: &mut [Option<usize>],
        match_edge: &mut [Option<usize>],
    ) -> bool {
        for &v in &sorted[e] {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            let free = match match_vertex[v] {
                None => true,
                Some(other) => augment(other, sorted, visited, match_vertex, match_edge),
            };
            if free {
                match_vertex[v] = Some(e);
                match_edge[e] = Some(v);
                return true;
            }
        }
        false
    }

    let mut unmatched = None;
    for e in 0..g.m() {
        let mut visited = vec![false; g.n + 1];
        if !augment(e, &sorted, &mut visited, &mut match_vertex, &mut match_edge) && unmatched.is_none() {
            unmatched = Some(e);
        }
    }

    let Some(root) = unmatched else {
        return Matching::Sdr(Sdr {
            assignment: match_edge.into_iter().map(|v| v.expect("all matched")).collect(),
        });
    };

    // Edges reachable from the unmatched edge along alternating paths form a deficient set.
    let mut edge_seen = vec![false; g.m()];
    let mut vertex_seen = vec![false; g.n + 1];
    edge_seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(e) = queue.pop_front() {
        for &v in &sorted[e] {
            if vertex_seen[v] {
                continue;
            }
            vertex_seen[v] = true;
            if let Some(next) = match_vertex[v] {
                if !edge_seen[next] {
                    edge_seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    let edge_subset: Vec<usize> = (0..g.m()).filter(|&e| edge_seen[e]).collect();
    let union_size = vertex_seen.iter().filter(|&&s| s).count();
    Matching::Hall(HallCertificate { edge_subset, union_size })
}

/// Constructive SDR for hypergraphs with all edges of size at least 2 and all vertex
/// degrees at most 2: pair off doubly-intersecting edges, peel degree-1 vertices, then
/// orient a DFS tree of each remaining line-graph component so every edge receives a
/// distinct intersection vertex.
pub fn construct_sdr_deg2(g: &Hypergraph) -> Result<Sdr, HypergraphError> {
    if let Some(e) = g.edges.iter().position(|e| e.len() < 2) {
        return Err(HypergraphError::PreconditionViolated(format!("edge {e} has fewer than 2 vertices")));
    }
    if let Some(v) = g.degrees().iter().position(|&d| d > 2) {
        return Err(HypergraphError::PreconditionViolated(format!("vertex {} has degree above 2", v + 1)));
    }

    let sets: Vec<Vec<usize>> = (0..g.m()).map(|e| g.vertex_set(e)).collect();
    let mut assignment: Vec<Option<usize>> = vec![None; g.m()];
    let mut edge_alive = vec![true; g.m()];
    let mut vertex_alive = vec![true; g.n + 1];
    vertex_alive[0] = false;

    // Step 1: pairs of edges sharing at least two vertices.
    'pairs: loop {
        for i in 0..g.m() {
            if !edge_alive[i] {
                continue;
            }
            for j in (i + 1)..g.m() {
                if !edge_alive[j] {
                    continue;
                }
                let common: Vec<usize> = sets[i]
                    .iter()
                    .copied()
                    .filter(|v| vertex_alive[*v] && sets[j].contains(v))
                    .collect();
                if common.len() >= 2 {
                    assignment[i] = Some(common[0]);
                    assignment[j] = Some(common[1]);
                    vertex_alive[common[0]] = false;
                    vertex_alive[common[1]] = false;
                    edge_alive[i] = false;
                    edge_alive[j] = false;
                    continue 'pairs;
                }
            }
        }
        break;
    }

    let live_degree = |v: usize, edge_alive: &[bool]| {
        (0..g.m()).filter(|&e| edge_alive[e] && sets[e].contains(&v)).count()
    };

    // Step 2: vertices of degree 1 take their unique edge.
    while let Some(v) = (1..=g.n).find(|&v| vertex_alive[v] && live_degree(v, &edge_alive) == 1) {
        let e = (0..g.m()).find(|&e| edge_alive[e] && sets[e].contains(&v)).expect("degree 1");
        assignment[e] = Some(v);
        edge_alive[e] = false;
        vertex_alive[v] = false;
    }

    // Step 3: isolated vertices play no further role.
    for (v, alive) in vertex_alive.iter_mut().enumerate().skip(1) {
        if *alive && live_degree(v, &edge_alive) == 0 {
            *alive = false;
        }
    }

    // Steps 4-6 on the line graph of what remains.
    let rest: Vec<usize> = (0..g.m()).filter(|&e| edge_alive[e]).collect();
    let local = graph_from_predicate(rest.len(), |a, b| intersection_size(&sets[rest[a]], &sets[rest[b]]) > 0);
    for comp in local.components() {
        let root = cycle_vertex(&local, &comp).ok_or_else(|| {
            HypergraphError::PreconditionViolated("line-graph component without a cycle".into())
        })?;
        for (w, u) in reverse_sdr(&local, root) {
            let (ew, eu) = (rest[w], rest[u]);
            let shared = sets[ew].iter().copied().find(|v| sets[eu].contains(v)).expect("adjacent edges intersect");
            assignment[ew] = Some(shared);
        }
    }

    let assignment: Option<Vec<usize>> = assignment.into_iter().collect();
    let sdr = Sdr {
        assignment: assignment.ok_or_else(|| HypergraphError::PreconditionViolated("edge left unmatched".into()))?,
    };
    if !sdr.is_valid_for(g) {
        return Err(HypergraphError::PreconditionViolated("constructed assignment is not an SDR".into()));
    }
    Ok(sdr)
}

/// Smallest node of `comp` lying on a cycle, found from the first DFS back edge.
fn cycle_vertex(graph: &Graph, comp: &[usize]) -> Option<usize> {
    let start = *comp.first()?;
    let n = graph.node_count();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut stack = vec![(start, 0usize)];
    depth[start] = 0;
    while let Some((u, idx)) = stack.pop() {
        if idx < graph.adj[u].len() {
            stack.push((u, idx + 1));
            let w = graph.adj[u][idx];
            if w == parent[u] {
                continue;
            }
            if depth[w] == usize::MAX {
                depth[w] = depth[u] + 1;
                parent[w] = u;
                stack.push((w, 0));
            } else if depth[w] < depth[u] {
                // Back edge u -> w closes the cycle w .. u.
                let mut cycle = vec![u];
                let mut x = u;
                while x != w {
                    x = parent[x];
                    cycle.push(x);
                }
                return cycle.into_iter().min();
            }
        }
    }
    None
}

/// DFS from `root` that leaves the root unseen until an edge enters it. Returns
/// `(w, u)` for each edge `u -> w` reaching a previously unseen `w`. Tree edges are
/// never walked back towards the parent.
fn reverse_sdr(graph: &Graph, root: usize) -> Vec<(usize, usize)> {
    let mut seen = vec![false; graph.node_count()];
    let mut out = Vec::new();
    let mut stack = vec![(root, usize::MAX, 0usize)];
    while let Some((u, parent, idx)) = stack.pop() {
        if idx < graph.adj[u].len() {
            stack.push((u, parent, idx + 1));
            let w = graph.adj[u][idx];
            if w != parent && !seen[w] {
                seen[w] = true;
                out.push((w, u));
                if w != root {
                    stack.push((w, u, 0));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralPredicates {
    pub linear: bool,
    pub k_intersecting: Option<usize>,
    pub intersecting_family: bool,
    pub helly: bool,
    pub blocks: Vec<Vec<usize>>,
    pub t_stacked: Vec<Vec<usize>>,
}

/// Largest edge count for which every edge subset is examined for blocks.
pub const EXHAUSTIVE_BLOCK_LIMIT: usize = 16;

pub fn structural_predicates(g: &Hypergraph) -> StructuralPredicates {
    let m = g.m();
    let mut linear = true;
    let mut intersecting_family = true;
    let mut sizes = BTreeSet::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let s = intersection_size(&g.edges[i], &g.edges[j]);
            linear &= s <= 1;
            intersecting_family &= s >= 1;
            sizes.insert(s);
        }
    }
    let k_intersecting = if sizes.len() == 1 { sizes.first().copied() } else { None };

    StructuralPredicates {
        linear,
        k_intersecting,
        intersecting_family,
        helly: is_helly(g),
        blocks: blocks(g),
        t_stacked: t_stacked(g),
    }
}

/// Three-vertex criterion: for every vertex triple, the edges containing at least two
/// of them share a common vertex. O(n^3 m).
pub fn is_helly(g: &Hypergraph) -> bool {
    let sets: Vec<BTreeSet<usize>> = g.edges.iter().map(|e| e.iter().copied().collect()).collect();
    let inc = g.incidence();
    for a in 1..=g.n {
        for b in (a + 1)..=g.n {
            for c in (b + 1)..=g.n {
                let mut family: BTreeSet<usize> = BTreeSet::new();
                for (x, y) in [(a, b), (a, c), (b, c)] {
                    family.extend(inc[x - 1].iter().filter(|e| sets[**e].contains(&y)));
                }
                let mut iter = family.iter();
                let Some(&first) = iter.next() else { continue };
                let mut common = sets[first].clone();
                for &e in iter {
                    common.retain(|v| sets[e].contains(v));
                }
                if common.is_empty() {
                    return false;
                }
            }
        }
    }
    true
}

fn union_size(g: &Hypergraph, edges: impl IntoIterator<Item = usize>) -> usize {
    edges
        .into_iter()
        .flat_map(|e| g.edges[e].iter().copied())
        .collect::<BTreeSet<_>>()
        .len()
}

/// Edge subsets spanning exactly as many vertices as edges: unions of components of the
/// edge-intersection graph, plus an exhaustive sweep when `m <= EXHAUSTIVE_BLOCK_LIMIT`.
/// Only inclusion-maximal subsets are reported.
pub fn blocks(g: &Hypergraph) -> Vec<Vec<usize>> {
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let comps = edge_intersection_graph(g).components();
    let surplus: Vec<i64> = comps
        .iter()
        .map(|c| union_size(g, c.iter().copied()) as i64 - c.len() as i64)
        .collect();
    // Components with zero surplus are blocks; so is their union, and so is any union
    // that cancels positive and negative surpluses. Enumerate unions when few components.
    if comps.len() <= EXHAUSTIVE_BLOCK_LIMIT {
        for mask in 1u32..(1u32 << comps.len()) {
            let total: i64 = (0..comps.len()).filter(|i| mask >> i & 1 == 1).map(|i| surplus[i]).sum();
            if total == 0 {
                let mut edges: Vec<usize> = (0..comps.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .flat_map(|i| comps[i].iter().copied())
                    .collect();
                edges.sort_unstable();
                found.insert(edges);
            }
        }
    } else {
        let zero: Vec<usize> = (0..comps.len()).filter(|&i| surplus[i] == 0).collect();
        for &i in &zero {
            found.insert(comps[i].clone());
        }
    }
    if g.m() <= EXHAUSTIVE_BLOCK_LIMIT {
        for mask in 1u32..(1u32 << g.m()) {
            let edges: Vec<usize> = (0..g.m()).filter(|e| mask >> e & 1 == 1).collect();
            if union_size(g, edges.iter().copied()) == edges.len() {
                found.insert(edges);
            }
        }
    }
    let all: Vec<Vec<usize>> = found.into_iter().collect();
    all.iter()
        .filter(|a| !all.iter().any(|b| b.len() > a.len() && a.iter().all(|e| b.contains(e))))
        .cloned()
        .collect()
}

/// Maximal groups (size >= 2) of edges over identical vertex sets.
pub fn t_stacked(g: &Hypergraph) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for e in 0..g.m() {
        groups.entry(g.vertex_set(e)).or_default().push(e);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().filter(|v| v.len() >= 2).collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hg(n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    fn fano() -> Hypergraph {
        hg(7, &[&[1, 2, 3], &[1, 4, 5], &[1, 6, 7], &[2, 4, 6], &[2, 5, 7], &[3, 4, 7], &[3, 5, 6]])
    }

    #[test]
    fn rejects_bad_vertices() {
        assert!(matches!(
            Hypergraph::new(3, vec![vec![1, 4]]),
            Err(HypergraphError::VertexOutOfRange { vertex: 4, .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![1, 1]]),
            Err(HypergraphError::RepeatedVertex { vertex: 1, .. })
        ));
    }

    #[test]
    fn uniformity() {
        assert!(is_k_uniform(&fano(), 3));
        assert!(is_k_uniform(&hg(0, &[]), 5));
        assert!(!is_k_uniform(&hg(3, &[&[1, 2, 3], &[1, 2]]), 3));
    }

    #[test]
    fn single_edge_sdr_takes_smallest_vertex() {
        let g = hg(3, &[&[3, 1, 2]]);
        assert_eq!(find_sdr(&g), Matching::Sdr(Sdr { assignment: vec![1] }));
    }

    #[test]
    fn fano_has_sdr() {
        let sdr = find_sdr(&fano()).sdr().expect("fano is matchable");
        assert!(sdr.is_valid_for(&fano()));
    }

    #[test]
    fn hall_certificate_for_overfull_edges() {
        let g = hg(2, &[&[1, 2], &[1, 2], &[1, 2]]);
        match find_sdr(&g) {
            Matching::Hall(c) => {
                assert!(c.is_valid_for(&g));
                assert_eq!(c.union_size, 2);
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn deg2_disjoint_edges() {
        let g = hg(6, &[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(construct_sdr_deg2(&g).unwrap().assignment, vec![1, 4]);
    }

    #[test]
    fn deg2_triangle_graph() {
        let g = hg(3, &[&[1, 2], &[2, 3], &[3, 1]]);
        let sdr = construct_sdr_deg2(&g).unwrap();
        assert!(sdr.is_valid_for(&g));
    }

    #[test]
    fn deg2_rejects_high_degree() {
        let g = hg(4, &[&[1, 2], &[1, 3], &[1, 4]]);
        assert!(matches!(construct_sdr_deg2(&g), Err(HypergraphError::PreconditionViolated(_))));
        let g = hg(2, &[&[1]]);
        assert!(construct_sdr_deg2(&g).is_err());
    }

    #[test]
    fn line_graphs() {
        let four = hg(4, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]]);
        let tight = tight_line_graph(&four).unwrap();
        // Every pair of triples in K4^(3) shares two vertices.
        assert_eq!(tight.edge_count(), 6);
        let eig = edge_intersection_graph(&fano());
        assert_eq!(eig.edge_count(), 21);
        let disjoint = hg(6, &[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(tight_line_graph(&disjoint).unwrap().edge_count(), 0);
        assert_eq!(edge_intersection_graph(&disjoint).edge_count(), 0);
        assert_eq!(tight_line_graph(&hg(3, &[&[1, 2, 3], &[1, 2]])), Err(HypergraphError::NotUniform));
    }

    #[test]
    fn fano_predicates() {
        let p = structural_predicates(&fano());
        assert!(p.linear);
        assert!(p.intersecting_family);
        assert_eq!(p.k_intersecting, Some(1));
        assert!(!p.helly);
        assert_eq!(p.blocks, vec![(0..7).collect::<Vec<_>>()]);
        assert!(p.t_stacked.is_empty());
    }

    #[test]
    fn stacked_edges() {
        let g = hg(3, &[&[1, 2, 3], &[3, 2, 1]]);
        assert_eq!(structural_predicates(&g).t_stacked, vec![vec![0, 1]]);
    }

    #[test]
    fn json_round_trip() {
        let g = fano();
        let s = g.to_json();
        assert_eq!(s, r#"{"n":7,"edges":[[1,2,3],[1,4,5],[1,6,7],[2,4,6],[2,5,7],[3,4,7],[3,5,6]]}"#);
        assert_eq!(Hypergraph::from_json(&s).unwrap(), g);
        assert!(Hypergraph::from_json(r#"{"n":2,"edges":[[1,3]]}"#).is_err());
    }
}
