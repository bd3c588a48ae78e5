//! Weighted planar graphs and the primitive operations everything else is
//! built from: parsing, deterministic shortest paths, weighted neighborhoods,
//! depth (distance to the outer face), and removal of path neighborhoods.
//!
//! Determinism is load-bearing throughout the toolkit, so every operation
//! that could tie-break does so by lowest node id. In particular
//! [`WeightedPlanarGraph::shortest_path`] returns the unique shortest path in
//! which every node's predecessor is the lowest-id optimal predecessor.

use std::collections::BinaryHeap;
use std::collections::BTreeSet;
use std::cmp::Reverse;
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

/// Nodes are dense indices `0..n`.
pub type NodeId = usize;
/// Edge weights and distances; weights are integers `>= 1`.
pub type Weight = u64;
/// Ordered node set; ordered iteration keeps downstream output deterministic.
pub type NodeSet = BTreeSet<NodeId>;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph is not connected")]
    Disconnected,
    #[error("{m} edges exceed the planar bound for {n} nodes")]
    PlanarBound { n: usize, m: usize },
    #[error("{msg}")]
    Invalid { msg: String },
}

/// An undirected, connected, weighted planar graph with a designated outer
/// face. Planarity itself is the caller's responsibility; construction only
/// enforces the edge-count bound every planar graph satisfies.
#[derive(Debug)]
pub struct WeightedPlanarGraph {
    adj: Vec<Vec<(NodeId, Weight)>>,
    edges: Vec<(NodeId, NodeId, Weight)>,
    outer_face: Vec<NodeId>,
    outer_set: NodeSet,
    depths: OnceLock<Vec<Weight>>,
    diameter: OnceLock<Weight>,
}

impl WeightedPlanarGraph {
    pub fn new(
        n: usize,
        edges: Vec<(NodeId, NodeId, Weight)>,
        outer_face: Vec<NodeId>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Invalid { msg: "graph must have at least one node".into() });
        }
        let max_edges = match n {
            1 => 0,
            2 => 1,
            _ => 3 * n - 6,
        };
        if edges.len() > max_edges {
            return Err(GraphError::PlanarBound { n, m: edges.len() });
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(GraphError::Invalid {
                    msg: format!("edge ({u}, {v}) references a node outside 0..{n}"),
                });
            }
            if u == v {
                return Err(GraphError::Invalid { msg: format!("self-loop at node {u}") });
            }
            if w == 0 {
                return Err(GraphError::Invalid {
                    msg: format!("edge ({u}, {v}) has weight 0; weights must be >= 1"),
                });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::Invalid { msg: format!("duplicate edge ({u}, {v})") });
            }
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        if outer_face.is_empty() {
            return Err(GraphError::Invalid { msg: "outer face must list at least one node".into() });
        }
        let mut outer_set = NodeSet::new();
        for &v in &outer_face {
            if v >= n {
                return Err(GraphError::Invalid {
                    msg: format!("outer-face node {v} is outside 0..{n}"),
                });
            }
            outer_set.insert(v);
        }
        let mut sorted_edges: Vec<_> =
            edges.iter().map(|&(u, v, w)| (u.min(v), u.max(v), w)).collect();
        sorted_edges.sort_unstable();
        let g = WeightedPlanarGraph {
            adj,
            edges: sorted_edges,
            outer_face,
            outer_set,
            depths: OnceLock::new(),
            diameter: OnceLock::new(),
        };
        if !g.is_connected_subset(&(0..n).collect()) {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    /// Parses the plain-text graph format:
    ///
    /// ```text
    /// n m
    /// u v w      (m edge lines)
    /// outer: v1 v2 ...
    /// ```
    ///
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (header_line, header) = lines
            .next()
            .ok_or_else(|| GraphError::Parse { line: 1, msg: "empty graph file".into() })?;
        let mut it = header.split_whitespace();
        let n: usize = parse_token(it.next(), header_line, "node count")?;
        let m: usize = parse_token(it.next(), header_line, "edge count")?;
        if it.next().is_some() {
            return Err(GraphError::Parse {
                line: header_line,
                msg: "header must be exactly `n m`".into(),
            });
        }
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, text) = lines.next().ok_or_else(|| GraphError::Parse {
                line: header_line,
                msg: format!("expected {m} edge lines, found {}", edges.len()),
            })?;
            let mut it = text.split_whitespace();
            let u: usize = parse_token(it.next(), line, "edge endpoint")?;
            let v: usize = parse_token(it.next(), line, "edge endpoint")?;
            let w: i64 = parse_token(it.next(), line, "edge weight")?;
            if it.next().is_some() {
                return Err(GraphError::Parse {
                    line,
                    msg: "edge line must be exactly `u v w`".into(),
                });
            }
            if w < 1 {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("edge weight {w} must be >= 1"),
                });
            }
            if u >= n || v >= n {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("edge ({u}, {v}) references a node outside 0..{n}"),
                });
            }
            edges.push((u, v, w as Weight));
        }
        let (outer_line, outer_text) = lines.next().ok_or_else(|| GraphError::Parse {
            line: header_line,
            msg: "missing `outer:` line".into(),
        })?;
        let rest = outer_text.strip_prefix("outer:").ok_or_else(|| GraphError::Parse {
            line: outer_line,
            msg: "expected `outer: v1 v2 ...`".into(),
        })?;
        let mut outer = Vec::new();
        for tok in rest.split_whitespace() {
            let v: usize = tok.parse().map_err(|_| GraphError::Parse {
                line: outer_line,
                msg: format!("bad outer-face node `{tok}`"),
            })?;
            if v >= n {
                return Err(GraphError::Parse {
                    line: outer_line,
                    msg: format!("outer-face node {v} is not a graph node"),
                });
            }
            outer.push(v);
        }
        if let Some((line, _)) = lines.next() {
            return Err(GraphError::Parse { line, msg: "unexpected content after outer face".into() });
        }
        Self::new(n, edges, outer).map_err(|e| match e {
            GraphError::Invalid { msg } => GraphError::Parse { line: header_line, msg },
            other => other,
        })
    }

    /// Canonical round-trip serialisation of the graph; also the basis of the
    /// oracle cache key.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.node_count(), self.edges.len()));
        for &(u, v, w) in &self.edges {
            out.push_str(&format!("{u} {v} {w}\n"));
        }
        out.push_str("outer:");
        for &v in &self.outer_face {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
        out
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.node_count()
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(NodeId, NodeId, Weight)] {
        &self.edges
    }

    /// Neighbors of `v`, sorted by node id.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, Weight)] {
        &self.adj[v]
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<Weight> {
        self.adj[u].iter().find(|&&(x, _)| x == v).map(|&(_, w)| w)
    }

    /// Outer-face nodes in declaration order.
    pub fn outer_face(&self) -> &[NodeId] {
        &self.outer_face
    }

    pub fn is_outer(&self, v: NodeId) -> bool {
        self.outer_set.contains(&v)
    }

    /// The whole graph as a region; the region's boundary is the outer face.
    pub fn full_region(&self) -> Region {
        Region { nodes: self.nodes().collect(), externals: self.outer_set.clone() }
    }

    fn sssp(
        &self,
        sources: &[NodeId],
        within: Option<&NodeSet>,
        cutoff: Option<Weight>,
        target: Option<NodeId>,
    ) -> Sssp {
        let n = self.node_count();
        let mut dist: Vec<Option<Weight>> = vec![None; n];
        let mut settled = vec![false; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            if within.is_none_or(|set| set.contains(&s)) && dist[s].is_none() {
                dist[s] = Some(0);
                heap.push(Reverse((0, s)));
            }
        }
        while let Some(Reverse((d, v))) = heap.pop() {
            if settled[v] {
                continue;
            }
            settled[v] = true;
            if target == Some(v) {
                break;
            }
            for &(u, w) in &self.adj[v] {
                if settled[u] || !within.is_none_or(|set| set.contains(&u)) {
                    continue;
                }
                let nd = d + w;
                if cutoff.is_some_and(|c| nd > c) {
                    continue;
                }
                if dist[u].is_none_or(|old| nd < old) {
                    dist[u] = Some(nd);
                    heap.push(Reverse((nd, u)));
                }
            }
        }
        Sssp { dist, settled }
    }

    /// Weighted distance between two nodes. Panics if either id is out of
    /// range; the graph is connected so the distance always exists.
    pub fn dist(&self, u: NodeId, v: NodeId) -> Weight {
        self.dist_in_opt(None, u, v).expect("connected graph")
    }

    /// Weighted distance inside an induced subgraph, if `v` is reachable.
    pub fn dist_in(&self, within: &NodeSet, u: NodeId, v: NodeId) -> Option<Weight> {
        self.dist_in_opt(Some(within), u, v)
    }

    /// All distances from `src` inside an induced subgraph, dense by node id
    /// (`None` for unreachable or out-of-region nodes).
    pub fn distances_in(&self, within: &NodeSet, src: NodeId) -> Vec<Option<Weight>> {
        self.sssp(&[src], Some(within), None, None).dist
    }

    /// Reconstructs the shortest path to `target` out of a full distance
    /// table from [`Self::distances_in`], walking lowest-id optimal
    /// predecessors — the exact path [`Self::shortest_path_in`] would return
    /// for the table's source. `None` when `target` is unreachable.
    pub fn backtrack_path_in(
        &self,
        within: &NodeSet,
        dist: &[Option<Weight>],
        target: NodeId,
    ) -> Option<Path> {
        let length = dist[target]?;
        let mut rev = vec![target];
        let mut cur = target;
        while dist[cur] != Some(0) {
            let d = dist[cur].unwrap();
            let pred = self.adj[cur]
                .iter()
                .find(|&&(x, w)| {
                    within.contains(&x) && dist[x].is_some_and(|dx| dx + w == d)
                })
                .map(|&(x, _)| x)
                .expect("reachable node has an optimal predecessor");
            rev.push(pred);
            cur = pred;
        }
        rev.reverse();
        Some(Path { nodes: rev, length })
    }

    fn dist_in_opt(&self, within: Option<&NodeSet>, u: NodeId, v: NodeId) -> Option<Weight> {
        let run = self.sssp(&[u], within, None, Some(v));
        if run.settled[v] { run.dist[v] } else { None }
    }

    /// Deterministic shortest path from `u` to `v`: among equally short
    /// paths, every node's predecessor is the lowest-id optimal predecessor.
    pub fn shortest_path(&self, u: NodeId, v: NodeId) -> Path {
        self.shortest_path_in_opt(None, u, v).expect("connected graph")
    }

    /// Weighted shortest-path distance between two nodes.
    pub fn distance(&self, u: NodeId, v: NodeId) -> Weight {
        self.dist_in_opt(None, u, v).expect("connected graph")
    }

    /// Deterministic shortest path inside an induced subgraph.
    pub fn shortest_path_in(&self, within: &NodeSet, u: NodeId, v: NodeId) -> Option<Path> {
        self.shortest_path_in_opt(Some(within), u, v)
    }

    fn shortest_path_in_opt(
        &self,
        within: Option<&NodeSet>,
        u: NodeId,
        v: NodeId,
    ) -> Option<Path> {
        let run = self.sssp(&[u], within, None, Some(v));
        if !run.settled[v] {
            return None;
        }
        let length = run.dist[v].unwrap();
        let mut rev = vec![v];
        let mut cur = v;
        while cur != u {
            let d = run.dist[cur].unwrap();
            // Neighbors are sorted, so the first optimal predecessor is the
            // lowest-id one; optimal predecessors are always settled.
            let pred = self.adj[cur]
                .iter()
                .find(|&&(x, w)| {
                    run.settled[x]
                        && within.is_none_or(|set| set.contains(&x))
                        && run.dist[x].is_some_and(|dx| dx + w == d)
                })
                .map(|&(x, _)| x)
                .expect("settled node has an optimal predecessor");
            rev.push(pred);
            cur = pred;
        }
        rev.reverse();
        Some(Path { nodes: rev, length })
    }

    /// All nodes within weighted distance `k` of the source set.
    pub fn k_neighborhood(&self, sources: &NodeSet, k: Weight) -> NodeSet {
        let srcs: Vec<_> = sources.iter().copied().collect();
        let run = self.sssp(&srcs, None, Some(k), None);
        (0..self.node_count()).filter(|&v| run.settled[v]).collect()
    }

    /// All nodes of `within` at weighted distance `<= k` (inside the induced
    /// subgraph) from the source set.
    pub fn k_neighborhood_in(&self, within: &NodeSet, sources: &NodeSet, k: Weight) -> NodeSet {
        let srcs: Vec<_> = sources.iter().copied().collect();
        let run = self.sssp(&srcs, Some(within), Some(k), None);
        within.iter().copied().filter(|&v| run.settled[v]).collect()
    }

    fn depth_table(&self) -> &[Weight] {
        self.depths.get_or_init(|| {
            let srcs: Vec<_> = self.outer_set.iter().copied().collect();
            let run = self.sssp(&srcs, None, None, None);
            run.dist.iter().map(|d| d.expect("connected graph")).collect()
        })
    }

    /// Weighted distance from `v` to the nearest outer-face node.
    pub fn node_depth(&self, v: NodeId) -> Weight {
        self.depth_table()[v]
    }

    /// `max` over nodes of [`node_depth`](Self::node_depth).
    pub fn depth(&self) -> Weight {
        *self.depth_table().iter().max().expect("nonempty graph")
    }

    /// Depth of a region: the largest weighted distance from a region node to
    /// the region's external set, measured inside the region. `None` if the
    /// region has no externals or some node cannot reach them.
    pub fn region_depth(&self, region: &Region) -> Option<Weight> {
        if region.externals.is_empty() {
            return None;
        }
        let srcs: Vec<_> = region.externals.iter().copied().collect();
        let run = self.sssp(&srcs, Some(&region.nodes), None, None);
        let mut max = 0;
        for &v in &region.nodes {
            max = max.max(run.dist[v]?);
        }
        Some(max)
    }

    /// Removes the closed `k`-neighborhood of a path from a region and
    /// returns the remaining connected components, lowest node first. Each
    /// component inherits the parent region's externals and additionally
    /// marks every node that lost a neighbor to the removal as external.
    pub fn remove_closed_neighborhood(&self, region: &Region, p: &Path, k: Weight) -> Vec<Region> {
        let path_nodes: NodeSet = p.nodes().iter().copied().collect();
        let removed = self.k_neighborhood_in(&region.nodes, &path_nodes, k);
        let remaining: NodeSet = region.nodes.difference(&removed).copied().collect();
        self.components_of(&remaining)
            .into_iter()
            .map(|comp| {
                let mut externals: NodeSet =
                    region.externals.intersection(&comp).copied().collect();
                for &v in &comp {
                    if self.adj[v].iter().any(|&(u, _)| removed.contains(&u)) {
                        externals.insert(v);
                    }
                }
                Region { nodes: comp, externals }
            })
            .collect()
    }

    /// Connected components of an induced subgraph, ordered by lowest node.
    pub fn components_of(&self, nodes: &NodeSet) -> Vec<NodeSet> {
        let mut out = Vec::new();
        let mut visited = NodeSet::new();
        for &start in nodes {
            if visited.contains(&start) {
                continue;
            }
            let mut comp = NodeSet::new();
            let mut stack = vec![start];
            visited.insert(start);
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for &(u, _) in &self.adj[v] {
                    if nodes.contains(&u) && visited.insert(u) {
                        stack.push(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected_subset(&self, nodes: &NodeSet) -> bool {
        match nodes.first() {
            None => true,
            Some(_) => self.components_of(nodes).len() == 1,
        }
    }

    /// Weighted eccentricity inside `within` for each of `members`, aligned
    /// with the input order. `None` marks members that cannot reach all of
    /// `within` (a disconnected selection).
    pub fn eccentricities_in(&self, within: &NodeSet, members: &[NodeId]) -> Vec<Option<Weight>> {
        members
            .par_iter()
            .map(|&s| {
                let run = self.sssp(&[s], Some(within), None, None);
                let mut max = 0;
                for &v in within {
                    max = max.max(run.dist[v]?);
                }
                Some(max)
            })
            .collect()
    }

    /// The node of `within` farthest from `src` (inside the induced
    /// subgraph), ties broken by lowest id. Unreachable nodes are ignored.
    pub fn farthest_from(&self, within: &NodeSet, src: NodeId) -> (NodeId, Weight) {
        let run = self.sssp(&[src], Some(within), None, None);
        let mut best = (src, 0);
        for &v in within {
            if let Some(d) = run.dist[v] {
                if d > best.1 {
                    best = (v, d);
                }
            }
        }
        best
    }

    /// Exact weighted diameter (cached): the largest distance over all pairs.
    pub fn diameter(&self) -> Weight {
        *self.diameter.get_or_init(|| {
            let all: NodeSet = self.nodes().collect();
            let members: Vec<_> = self.nodes().collect();
            self.eccentricities_in(&all, &members)
                .into_iter()
                .map(|e| e.expect("connected graph"))
                .max()
                .unwrap_or(0)
        })
    }

    /// Lowest-id node of minimum weighted eccentricity within `within`;
    /// returns `(center, radius)`. `None` if the selection is disconnected.
    pub fn center_in(&self, within: &NodeSet) -> Option<(NodeId, Weight)> {
        let members: Vec<_> = within.iter().copied().collect();
        let eccs = self.eccentricities_in(within, &members);
        let mut best: Option<(NodeId, Weight)> = None;
        for (&v, ecc) in members.iter().zip(eccs) {
            let e = ecc?;
            if best.is_none_or(|(_, r)| e < r) {
                best = Some((v, e));
            }
        }
        best
    }
}

impl Clone for WeightedPlanarGraph {
    fn clone(&self) -> Self {
        WeightedPlanarGraph {
            adj: self.adj.clone(),
            edges: self.edges.clone(),
            outer_face: self.outer_face.clone(),
            outer_set: self.outer_set.clone(),
            depths: OnceLock::new(),
            diameter: OnceLock::new(),
        }
    }
}

fn parse_token<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, GraphError> {
    let tok = tok.ok_or_else(|| GraphError::Parse { line, msg: format!("missing {what}") })?;
    tok.parse().map_err(|_| GraphError::Parse { line, msg: format!("bad {what} `{tok}`") })
}

struct Sssp {
    dist: Vec<Option<Weight>>,
    settled: Vec<bool>,
}

/// A walk in the graph: consecutive nodes are adjacent. Walks may revisit
/// nodes (path concatenation never removes cycles), and `length` counts every
/// traversed edge with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    nodes: Vec<NodeId>,
    length: Weight,
}

impl Path {
    pub fn new(g: &WeightedPlanarGraph, nodes: Vec<NodeId>) -> Result<Self, GraphError> {
        if nodes.is_empty() {
            return Err(GraphError::Invalid { msg: "a path needs at least one node".into() });
        }
        let mut length = 0;
        for pair in nodes.windows(2) {
            length += g.edge_weight(pair[0], pair[1]).ok_or_else(|| GraphError::Invalid {
                msg: format!("path nodes {} and {} are not adjacent", pair[0], pair[1]),
            })?;
        }
        Ok(Path { nodes, length })
    }

    pub(crate) fn from_validated(nodes: Vec<NodeId>, length: Weight) -> Self {
        Path { nodes, length }
    }

    pub fn single(v: NodeId) -> Self {
        Path { nodes: vec![v], length: 0 }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Total weighted length, counting repeated edges with multiplicity.
    pub fn length(&self) -> Weight {
        self.length
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn reversed(&self) -> Path {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Path { nodes, length: self.length }
    }

    pub fn node_set(&self) -> NodeSet {
        self.nodes.iter().copied().collect()
    }
}

/// A connected induced subgraph together with its external (boundary) nodes:
/// inherited outer-face nodes plus nodes that lost a neighbor to removals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub nodes: NodeSet,
    pub externals: NodeSet,
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cycle(n: usize) -> WeightedPlanarGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
        WeightedPlanarGraph::new(n, edges, (0..n).collect()).unwrap()
    }

    pub(crate) fn path_graph(n: usize) -> WeightedPlanarGraph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1)).collect();
        WeightedPlanarGraph::new(n, edges, (0..n).collect()).unwrap()
    }

    fn triangle_text() -> &'static str {
        "# toy triangle\n3 3\n0 1 1\n1 2 1\n0 2 1\nouter: 0 1 2\n"
    }

    #[test]
    fn parses_triangle() {
        let g = WeightedPlanarGraph::parse(triangle_text()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.outer_face(), &[0, 1, 2]);
        assert_eq!(g.edge_weight(0, 2), Some(1));
    }

    #[test]
    fn parse_round_trips() {
        let g = WeightedPlanarGraph::parse(triangle_text()).unwrap();
        let text = g.to_file_string();
        let h = WeightedPlanarGraph::parse(&text).unwrap();
        assert_eq!(h.to_file_string(), text);
    }

    #[test]
    fn parse_rejects_bad_inputs() {
        let cases: &[(&str, &str)] = &[
            ("2 1\n0 1 0\nouter: 0 1\n", "weight"),
            ("2 1\n0 1\nouter: 0 1\n", "weight"),
            ("2 1\n0 3 1\nouter: 0 1\n", "outside"),
            ("3 1\n0 1 1\nouter: 0 1\n", "not connected"),
            ("2 1\n0 1 1\nouter: 0 5\n", "not a graph node"),
            // K5 has too many edges to be planar.
            (
                "5 10\n0 1 1\n0 2 1\n0 3 1\n0 4 1\n1 2 1\n1 3 1\n1 4 1\n2 3 1\n2 4 1\n3 4 1\nouter: 0\n",
                "planar bound",
            ),
        ];
        for (text, needle) in cases {
            let err = WeightedPlanarGraph::parse(text).unwrap_err().to_string();
            assert!(err.contains(needle), "error `{err}` should mention `{needle}`");
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = WeightedPlanarGraph::parse("2 1\n0 1 zero\nouter: 0 1\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }), "got {err:?}");
        let err = WeightedPlanarGraph::parse("2 1\n0 1 1\nouter: 0 9\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "got {err:?}");
    }

    #[test]
    fn shortest_path_prefers_low_ids() {
        // On a 4-cycle both routes 0-1-2 and 0-3-2 have length 2; the
        // deterministic rule picks the lowest-id predecessor chain.
        let g = cycle(4);
        let p = g.shortest_path(0, 2);
        assert_eq!(p.nodes(), &[0, 1, 2]);
        assert_eq!(p.length(), 2);
    }

    #[test]
    fn trivial_shortest_path() {
        let g = cycle(4);
        let p = g.shortest_path(3, 3);
        assert_eq!(p.nodes(), &[3]);
        assert_eq!(p.length(), 0);
    }

    #[test]
    fn shortest_path_respects_weights() {
        // 0-1-2 is longer by weight than the direct 0-2 edge.
        let g = WeightedPlanarGraph::new(3, vec![(0, 1, 1), (1, 2, 1), (0, 2, 3)], vec![0, 1, 2])
            .unwrap();
        assert_eq!(g.dist(0, 2), 2);
        assert_eq!(g.shortest_path(0, 2).nodes(), &[0, 1, 2]);
    }

    #[test]
    fn grid_distances() {
        let g = crate::generate::grid(5, 5, crate::generate::WeightRule::Unit);
        assert_eq!(g.dist(0, 24), 8);
        assert_eq!(g.diameter(), 8);
    }

    #[test]
    fn neighborhoods() {
        let g = path_graph(10);
        assert_eq!(g.k_neighborhood(&NodeSet::from([0]), 0), NodeSet::from([0]));
        assert_eq!(g.k_neighborhood(&NodeSet::from([0]), 1), NodeSet::from([0, 1]));
        let grid = crate::generate::grid(3, 3, crate::generate::WeightRule::Unit);
        assert_eq!(grid.k_neighborhood(&NodeSet::from([4]), 1), NodeSet::from([1, 3, 4, 5, 7]));
    }

    #[test]
    fn depth_of_grids() {
        let g3 = crate::generate::grid(3, 3, crate::generate::WeightRule::Unit);
        assert_eq!(g3.depth(), 1);
        let g5 = crate::generate::grid(5, 5, crate::generate::WeightRule::Unit);
        assert_eq!(g5.depth(), 2);
        assert_eq!(g5.node_depth(12), 2);
        assert_eq!(g5.node_depth(0), 0);
    }

    #[test]
    fn removal_on_cycle() {
        let g = cycle(8);
        let p = Path::new(&g, vec![0]).unwrap();
        let regions = g.remove_closed_neighborhood(&g.full_region(), &p, 1);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].nodes, NodeSet::from([2, 3, 4, 5, 6]));
        // Every survivor sat on the outer face, so all stay external.
        assert_eq!(regions[0].externals, regions[0].nodes);
    }

    #[test]
    fn removal_on_path_graph() {
        let g = path_graph(10);
        let p = Path::new(&g, vec![0]).unwrap();
        let regions = g.remove_closed_neighborhood(&g.full_region(), &p, 2);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].nodes, (3..10).collect::<NodeSet>());
    }

    #[test]
    fn removal_can_empty_the_region() {
        let g = cycle(4);
        let p = Path::new(&g, vec![0, 1]).unwrap();
        assert!(g.remove_closed_neighborhood(&g.full_region(), &p, 2).is_empty());
    }

    #[test]
    fn removal_marks_fresh_boundary() {
        // Interior survivors adjacent to removed nodes become external even
        // off the outer face.
        let g = crate::generate::grid(5, 5, crate::generate::WeightRule::Unit);
        let p = Path::new(&g, vec![0]).unwrap();
        let regions = g.remove_closed_neighborhood(&g.full_region(), &p, 1);
        assert_eq!(regions.len(), 1);
        let r = &regions[0];
        assert!(!r.nodes.contains(&0) && !r.nodes.contains(&1) && !r.nodes.contains(&5));
        assert!(r.externals.contains(&6), "node 6 lost neighbors 1 and 5");
    }

    #[test]
    fn region_depth_matches_depth_on_full_region() {
        let g = crate::generate::grid(5, 5, crate::generate::WeightRule::Unit);
        assert_eq!(g.region_depth(&g.full_region()), Some(2));
    }

    #[test]
    fn diameter_of_small_graphs() {
        assert_eq!(cycle(8).diameter(), 4);
        assert_eq!(path_graph(4).diameter(), 3);
    }

    #[test]
    fn centers() {
        let g = path_graph(3);
        assert_eq!(g.center_in(&(0..3).collect()), Some((1, 1)));
        let c8 = cycle(8);
        assert_eq!(c8.center_in(&(0..8).collect()), Some((0, 4)));
    }

    #[test]
    fn farthest_breaks_ties_low() {
        let c8 = cycle(8);
        let all: NodeSet = (0..8).collect();
        // Nodes 3 and 5 are both at distance 3 from node 0 on C8? No: the
        // antipode 4 is unique at distance 4.
        assert_eq!(c8.farthest_from(&all, 0), (4, 4));
        let c6 = cycle(6);
        let all6: NodeSet = (0..6).collect();
        assert_eq!(c6.farthest_from(&all6, 0), (3, 3));
        // Remove the antipode: 2 and 4 tie at distance 2; lowest id wins.
        let sub: NodeSet = [0, 1, 2, 4, 5].into_iter().collect();
        assert_eq!(c6.farthest_from(&sub, 0), (2, 2));
    }

    #[test]
    fn path_validation() {
        let g = cycle(4);
        assert!(Path::new(&g, vec![0, 2]).is_err());
        let p = Path::new(&g, vec![0, 1, 2]).unwrap();
        assert_eq!(p.length(), 2);
        assert_eq!(p.reversed().nodes(), &[2, 1, 0]);
    }
}
