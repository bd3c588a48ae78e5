//! The level structure on top of sparse covers, and the fixed routing paths
//! built from it.
//!
//! Levels run `0..=top_level`: level 0 is one singleton cluster per node,
//! the top level is a single cluster spanning the whole graph, and every
//! level in between is a validated planar cover whose locality grows
//! geometrically with `base`. Each cluster elects a leader, and each node
//! picks one satisfying cluster per level, which gives it a deterministic
//! chain of leaders from itself up to the global leader. A route between two
//! nodes climbs the source's chain to the level where one cluster already
//! satisfies both endpoints, then descends the destination's chain. Every
//! choice is deterministic, so the path for a pair is a pure function of the
//! graph — demand sets never influence it.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::cover::{
    cluster_radius, planar_cover, validate_cover, Cluster, Cover, CoverError, CoverValidation,
    Provenance,
};
use crate::graph::{NodeId, NodeSet, Path, Weight, WeightedPlanarGraph};

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error("base must be at least 2, got {0}")]
    BadBase(Weight),
    #[error("level {level} cover failed validation: {reason}")]
    InvalidLevel { level: usize, reason: String },
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("all-pairs table over {nodes} nodes exceeds the cap of {cap}")]
    TableTooLarge { nodes: usize, cap: usize },
}

/// How the common-leader level is picked for a pair at distance `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelRule {
    /// Smallest level whose locality is at least `2y`. The default: it is
    /// the rule under which the chosen cluster provably also half-satisfies
    /// the far endpoint.
    #[default]
    TwiceDistance,
    /// Smallest level whose locality is at least `y/2`; kept selectable for
    /// study because both variants circulate.
    HalfDistance,
}

/// Level-structure parameters. The published guarantees of [`planar_cover`]
/// fix the degree, stretch and color bounds; `base` defaults to four times
/// the stretch bound, which is what makes neighboring-level leaders share a
/// cluster, but can be overridden downward to get deeper hierarchies on
/// small test graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HierarchyParams {
    /// Highest level; `1 + ceil(log_base(diameter))` when defaulted.
    pub top_level: usize,
    /// Most clusters a node may belong to at one level.
    pub degree_bound: usize,
    /// Cluster radius at level `i` is at most `stretch_bound * locality(i)`.
    pub stretch_bound: Weight,
    /// Colors per level cover.
    pub color_bound: usize,
    /// Geometric growth factor of the per-level locality.
    pub base: Weight,
    /// Weighted diameter of the graph the params were made for.
    pub diameter: Weight,
    /// Rule used by [`find_path`] to pick the common-leader level.
    pub level_rule: LevelRule,
}

impl HierarchyParams {
    /// Locality of a level: `base^(level-1)` for levels >= 1, and 0 for the
    /// singleton level.
    pub fn locality(&self, level: usize) -> Weight {
        if level == 0 {
            0
        } else {
            self.base.saturating_pow(level as u32 - 1)
        }
    }
}

/// Optional deviations from the published constants, for experiments.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParamOverrides {
    pub base: Option<Weight>,
    pub level_rule: Option<LevelRule>,
}

/// Derives the level structure for a connected graph: the top level is the
/// smallest one whose locality reaches the diameter.
pub fn make_params(
    g: &WeightedPlanarGraph,
    overrides: ParamOverrides,
) -> Result<HierarchyParams, HierarchyError> {
    let stretch_bound: Weight = 24;
    let base = overrides.base.unwrap_or(4 * stretch_bound);
    if base < 2 {
        return Err(HierarchyError::BadBase(base));
    }
    let diameter = g.diameter();
    // ceil(log_base(diameter)) by repeated multiplication.
    let mut above = 0usize;
    let mut reach: Weight = 1;
    while reach < diameter {
        reach = reach.saturating_mul(base);
        above += 1;
    }
    Ok(HierarchyParams {
        top_level: 1 + above,
        degree_bound: 18,
        stretch_bound,
        color_bound: 18,
        base,
        diameter,
        level_rule: overrides.level_rule.unwrap_or_default(),
    })
}

/// One level: its cover with leaders filled in, the validation report (only
/// the intermediate planar-cover levels get one), and each node's chosen
/// satisfying cluster.
#[derive(Debug, Clone)]
pub struct Level {
    pub cover: Cover,
    pub validation: Option<CoverValidation>,
    /// Per node, the index into `cover.clusters` of the deterministically
    /// chosen satisfying cluster (lowest leader id, ties by cluster index).
    pub chosen: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CoverHierarchy {
    pub params: HierarchyParams,
    /// Indexed by level, `0..=params.top_level`.
    pub levels: Vec<Level>,
}

impl CoverHierarchy {
    /// The leader of `v`'s chosen cluster at a level. Level 0 is `v` itself;
    /// the top level is the global leader for every node.
    pub fn leader(&self, level: usize, v: NodeId) -> NodeId {
        let lv = &self.levels[level];
        lv.cover.clusters[lv.chosen[v]].leader.expect("hierarchy levels carry elected leaders")
    }

    /// Leader of the single top-level cluster.
    pub fn top_leader(&self) -> NodeId {
        self.leader(self.params.top_level, 0)
    }
}

/// Leader of a cluster: the lowest-id node with minimum weighted
/// eccentricity inside the induced subgraph.
pub fn elect_leader(g: &WeightedPlanarGraph, x: &Cluster) -> Result<NodeId, HierarchyError> {
    Ok(cluster_radius(g, &x.members)?.0)
}

fn validation_failure(v: &CoverValidation) -> Option<String> {
    if v.meets_planar_cover_bounds() {
        return None;
    }
    Some(format!(
        "unsatisfied={} disconnected={} degree={} radius={} (locality {}) \
         colors_in_range={} colors_used={} coloring_valid={}",
        v.unsatisfied.len(),
        v.disconnected.len(),
        v.degree,
        v.radius,
        v.locality,
        v.colors_in_range,
        v.coloring.colors_used,
        v.coloring.valid,
    ))
}

/// Builds all levels: singletons at level 0, validated planar covers in
/// between, one global cluster on top. Fails if any intermediate cover
/// misses its published bounds.
pub fn build_hierarchy(
    g: &WeightedPlanarGraph,
    params: HierarchyParams,
) -> Result<CoverHierarchy, HierarchyError> {
    let n = g.node_count();
    let blank = Provenance { zone: 0, tree_level: 0, path_id: 0, subpath: 0 };
    let mut levels = Vec::with_capacity(params.top_level + 1);

    let singletons: Vec<Cluster> = (0..n)
        .map(|v| Cluster {
            members: NodeSet::from([v]),
            leader: Some(v),
            color: 1,
            provenance: blank,
        })
        .collect();
    levels.push(Level {
        cover: Cover::new(g, singletons, 0),
        validation: None,
        chosen: (0..n).collect(),
    });

    for level in 1..params.top_level {
        let mut cover = planar_cover(g, params.locality(level))?;
        for c in &mut cover.clusters {
            c.leader = Some(cluster_radius(g, &c.members)?.0);
        }
        let validation = validate_cover(g, &cover);
        if let Some(reason) = validation_failure(&validation) {
            return Err(HierarchyError::InvalidLevel { level, reason });
        }
        let chosen = (0..n)
            .map(|v| {
                validation.satisfying[v]
                    .iter()
                    .copied()
                    .min_by_key(|&ci| (cover.clusters[ci].leader, ci))
                    .ok_or_else(|| HierarchyError::InvalidLevel {
                        level,
                        reason: format!("node {v} has no satisfying cluster"),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        levels.push(Level { cover, validation: Some(validation), chosen });
    }

    let global = Cluster {
        members: g.nodes().collect(),
        leader: Some(cluster_radius(g, &g.nodes().collect())?.0),
        color: 1,
        provenance: blank,
    };
    levels.push(Level {
        cover: Cover::new(g, vec![global], params.locality(params.top_level)),
        validation: None,
        chosen: vec![0; n],
    });

    Ok(CoverHierarchy { params, levels })
}

/// Text report of the level structure: one header line, then one line per
/// level with its locality, cluster count and how it was obtained.
pub fn hierarchy_report(h: &CoverHierarchy) -> String {
    let p = &h.params;
    let mut out = format!(
        "hierarchy levels {} top {} base {} diameter {}\n",
        p.top_level + 1,
        p.top_level,
        p.base,
        p.diameter
    );
    for (i, lv) in h.levels.iter().enumerate() {
        let status = if i == 0 {
            "singletons"
        } else if i == p.top_level {
            "global"
        } else {
            "validated"
        };
        out.push_str(&format!(
            "level {i} gamma {} clusters {} status {status}\n",
            p.locality(i),
            lv.cover.clusters.len()
        ));
    }
    out
}

/// Per-node auxiliary paths: `segment(v, i)` is the deterministic shortest
/// path from `v`'s level-`i` leader to its level-`i+1` leader, and the
/// concatenation of segments `0..i` is the prefix from `v` to its level-`i`
/// leader. Shortest paths between the same leader pair are computed once.
#[derive(Debug, Clone)]
pub struct AuxiliaryPaths {
    segments: Vec<Vec<Path>>,
}

impl AuxiliaryPaths {
    /// `q_i(v)`: from `v`'s level-`i` leader to its level-`i+1` leader.
    pub fn segment(&self, v: NodeId, i: usize) -> &Path {
        &self.segments[v][i]
    }

    /// Prefix of `v`'s auxiliary path up to its level-`i` leader; `i = 0`
    /// gives the single-node path `[v]`.
    pub fn prefix(&self, v: NodeId, i: usize) -> Path {
        let mut nodes = vec![v];
        let mut length = 0;
        for seg in &self.segments[v][..i] {
            append_path(&mut nodes, &mut length, seg);
        }
        Path::from_validated(nodes, length)
    }

    /// The whole auxiliary path, from `v` to the global leader.
    pub fn full(&self, v: NodeId) -> Path {
        self.prefix(v, self.segments[v].len())
    }
}

/// Extends a node sequence by a path, dropping the junction node when the
/// path starts where the sequence currently ends.
fn append_path(nodes: &mut Vec<NodeId>, length: &mut Weight, p: &Path) {
    *length += p.length();
    let rest =
        if nodes.last() == Some(&p.nodes()[0]) { &p.nodes()[1..] } else { p.nodes() };
    nodes.extend_from_slice(rest);
}

/// Computes every node's auxiliary path segments bottom-up: at each level
/// the segment runs from the current leader to the leader of the chosen
/// satisfying cluster one level up.
pub fn auxiliary_paths(g: &WeightedPlanarGraph, h: &CoverHierarchy) -> AuxiliaryPaths {
    let mut memo: HashMap<(NodeId, NodeId), Path> = HashMap::new();
    let segments = (0..g.node_count())
        .map(|v| {
            let mut segs = Vec::with_capacity(h.params.top_level);
            let mut x = v;
            for i in 0..h.params.top_level {
                let next = h.leader(i + 1, v);
                let seg = memo
                    .entry((x, next))
                    .or_insert_with(|| g.shortest_path(x, next))
                    .clone();
                segs.push(seg);
                x = next;
            }
            segs
        })
        .collect();
    AuxiliaryPaths { segments }
}

/// A fixed routing path with its analysis annotations: the level whose
/// cluster covers both endpoints, that cluster's leader, and the node
/// positions that partition the source and destination sides into
/// per-level subpaths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathEntry {
    pub path: Path,
    /// Common-leader level.
    pub level: usize,
    /// The common leader both sides meet at.
    pub leader: NodeId,
    /// `source_bounds[j]` is the position (index into `path`) of the source
    /// endpoint's level-`j` leader; the last entry is the common leader's
    /// position. The level-`j` source subpath spans positions
    /// `source_bounds[j] ..= source_bounds[j+1]`.
    pub source_bounds: Vec<usize>,
    /// Positions of the destination endpoint's leaders, `dest_bounds[j]`
    /// holding its level-`j` leader; `dest_bounds[level]` is the common
    /// leader again. The level-`j` destination subpath spans
    /// `dest_bounds[j+1] ..= dest_bounds[j]`.
    pub dest_bounds: Vec<usize>,
}

impl PathEntry {
    /// The same route read from the other end.
    pub fn mirrored(&self) -> PathEntry {
        let last = self.path.nodes().len() - 1;
        PathEntry {
            path: self.path.reversed(),
            level: self.level,
            leader: self.leader,
            source_bounds: self.dest_bounds.iter().map(|&p| last - p).collect(),
            dest_bounds: self.source_bounds.iter().map(|&p| last - p).collect(),
        }
    }

    /// Nodes of the level-`j` subpath on the source side, `j < level`.
    pub fn source_subpath(&self, j: usize) -> &[NodeId] {
        &self.path.nodes()[self.source_bounds[j]..=self.source_bounds[j + 1]]
    }

    /// Nodes of the level-`j` subpath on the destination side, in path
    /// order (from the level-`j+1` leader down to the level-`j` leader).
    pub fn dest_subpath(&self, j: usize) -> &[NodeId] {
        &self.path.nodes()[self.dest_bounds[j + 1]..=self.dest_bounds[j]]
    }

    /// Weighted lengths of the source-side subpaths, by level.
    pub fn source_subpath_lengths(&self, g: &WeightedPlanarGraph) -> Vec<Weight> {
        (0..self.level).map(|j| slice_length(g, self.source_subpath(j))).collect()
    }

    /// Weighted lengths of the destination-side subpaths, by level.
    pub fn dest_subpath_lengths(&self, g: &WeightedPlanarGraph) -> Vec<Weight> {
        (0..self.level).map(|j| slice_length(g, self.dest_subpath(j))).collect()
    }
}

fn slice_length(g: &WeightedPlanarGraph, nodes: &[NodeId]) -> Weight {
    nodes
        .windows(2)
        .map(|p| g.edge_weight(p[0], p[1]).expect("subpath nodes are adjacent"))
        .sum()
}

fn choose_level(params: &HierarchyParams, dist: Weight) -> usize {
    for i in 1..=params.top_level {
        let ok = match params.level_rule {
            LevelRule::TwiceDistance => params.locality(i) >= dist.saturating_mul(2),
            LevelRule::HalfDistance => params.locality(i).saturating_mul(2) >= dist,
        };
        if ok {
            return i;
        }
    }
    // The top locality reaches the diameter but not necessarily twice the
    // distance; the single global cluster still covers both endpoints.
    params.top_level
}

/// The fixed path for an ordered pair. The pair is canonicalized on the
/// smaller endpoint — the entry for the larger-first order is the exact
/// mirror — so both orders share one route, level and common leader.
///
/// The route climbs the source's leader chain to the common-leader level,
/// crosses to the destination's chain with a fresh deterministic shortest
/// path, and descends. Junction duplicates are dropped; nothing else is
/// simplified.
pub fn find_path(
    g: &WeightedPlanarGraph,
    h: &CoverHierarchy,
    aux: &AuxiliaryPaths,
    u: NodeId,
    v: NodeId,
) -> PathEntry {
    if u == v {
        return PathEntry {
            path: Path::single(u),
            level: 0,
            leader: u,
            source_bounds: vec![0],
            dest_bounds: vec![0],
        };
    }
    if u > v {
        return find_path(g, h, aux, v, u).mirrored();
    }
    let level = choose_level(&h.params, g.distance(u, v));
    let leader = h.leader(level, u);

    let mut nodes = vec![u];
    let mut length = 0;
    let mut source_bounds = Vec::with_capacity(level + 1);
    source_bounds.push(0);
    // Climb the source chain; the last climb segment ends at the common
    // leader because the chosen level-cluster of the pair is u's own.
    for j in 0..level {
        append_path(&mut nodes, &mut length, aux.segment(u, j));
        source_bounds.push(nodes.len() - 1);
    }

    let mut dest_bounds = vec![0; level + 1];
    dest_bounds[level] = nodes.len() - 1;
    append_path(&mut nodes, &mut length, &g.shortest_path(leader, h.leader(level - 1, v)));
    dest_bounds[level - 1] = nodes.len() - 1;
    for j in (0..level - 1).rev() {
        append_path(&mut nodes, &mut length, &aux.segment(v, j).reversed());
        dest_bounds[j] = nodes.len() - 1;
    }

    PathEntry {
        path: Path::from_validated(nodes, length),
        level,
        leader,
        source_bounds,
        dest_bounds,
    }
}

/// Routes for all ordered pairs.
#[derive(Debug, Clone)]
pub struct PathTable {
    pub entries: BTreeMap<(NodeId, NodeId), PathEntry>,
}

/// Node cap above which [`find_all_paths`] refuses to materialize a table.
pub const DEFAULT_TABLE_CAP: usize = 2000;

/// Materializes the route for every ordered pair of distinct nodes. Refuses
/// graphs above the cap — the table is quadratic — while single-pair queries
/// via [`find_path`] stay unbounded.
pub fn find_all_paths(
    g: &WeightedPlanarGraph,
    h: &CoverHierarchy,
    aux: &AuxiliaryPaths,
    cap: Option<usize>,
) -> Result<PathTable, HierarchyError> {
    let cap = cap.unwrap_or(DEFAULT_TABLE_CAP);
    let n = g.node_count();
    if n > cap {
        return Err(HierarchyError::TableTooLarge { nodes: n, cap });
    }
    let mut entries = BTreeMap::new();
    for u in 0..n {
        for v in u + 1..n {
            let e = find_path(g, h, aux, u, v);
            entries.insert((v, u), e.mirrored());
            entries.insert((u, v), e);
        }
    }
    Ok(PathTable { entries })
}

/// Serializes a path table, one line per ordered pair:
/// `path <u> <v> level <i> leader <l> nodes v0 v1 ...`.
pub fn dump_paths(table: &PathTable) -> String {
    let mut out = String::new();
    for ((u, v), e) in &table.entries {
        out.push_str(&format!("path {u} {v} level {} leader {}", e.level, e.leader));
        out.push_str(" nodes");
        for &x in e.path.nodes() {
            out.push_str(&format!(" {x}"));
        }
        out.push('\n');
    }
    out
}
