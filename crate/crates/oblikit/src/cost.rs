//! Fusion functions and routing-cost evaluation.
//!
//! A demand set is routed over fixed paths; an edge used by `x` demands
//! costs `f(x) * w` for a fusion function `f` that is zero at zero,
//! nondecreasing, concave and subadditive. This module evaluates total and
//! per-edge costs, splits them by hierarchy level along the path
//! annotations, and computes the analysis-side quantities: the per-level
//! upper bound `Q(i)`, the per-level lower bounds `R(i)` (and their
//! small-level variant), and the worst-case ratio constant.
//!
//! Costs are reals; whenever the fusion function is integer-valued the same
//! quantities are also tracked in exact integer arithmetic, so the level
//! decomposition inequality can be checked without float tolerance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{NodeId, Path, WeightedPlanarGraph};
use crate::hierarchy::{CoverHierarchy, HierarchyParams, PathEntry};

#[derive(Debug, Error)]
pub enum CostError {
    #[error("unknown fusion function {0:?}")]
    UnknownFusion(String),
    #[error("fusion function {name}: {msg}")]
    BadParameter { name: String, msg: String },
    #[error("demand line {line}: {msg}")]
    BadDemand { line: usize, msg: String },
    #[error("demand ({s}, {t}) has no path")]
    MissingPath { s: NodeId, t: NodeId },
    #[error("demand ({s}, {t}) got a path from {ps} to {pt}")]
    EndpointMismatch { s: NodeId, t: NodeId, ps: NodeId, pt: NodeId },
    #[error("{demands} demands but {paths} paths")]
    PathCount { demands: usize, paths: usize },
    #[error("path uses edge ({u}, {v}) which is not in the graph")]
    UnknownEdge { u: NodeId, v: NodeId },
    #[error("level {level} outside the valid range {lo}..={hi}")]
    LevelRange { level: usize, lo: usize, hi: usize },
}

#[derive(Clone)]
enum FusionKind {
    Identity,
    Power(f64),
    UnitStep,
    Saturating(u64),
    Log2P1,
    Custom(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

/// A fusion function: load (number of demands on an edge) to cost factor.
#[derive(Clone)]
pub struct FusionFunction {
    name: String,
    kind: FusionKind,
}

impl fmt::Debug for FusionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FusionFunction({})", self.name)
    }
}

impl fmt::Display for FusionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FusionFunction {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: u64) -> f64 {
        match &self.kind {
            FusionKind::Identity => x as f64,
            FusionKind::Power(a) => (x as f64).powf(*a),
            FusionKind::UnitStep => {
                if x == 0 {
                    0.0
                } else {
                    1.0
                }
            }
            FusionKind::Saturating(c) => x.min(*c) as f64,
            FusionKind::Log2P1 => ((x + 1) as f64).log2(),
            FusionKind::Custom(f) => f(x),
        }
    }

    /// Exact value for the integer-valued members of the catalog; `None`
    /// where the function is genuinely irrational.
    pub fn eval_exact(&self, x: u64) -> Option<u64> {
        match &self.kind {
            FusionKind::Identity => Some(x),
            FusionKind::UnitStep => Some(x.min(1)),
            FusionKind::Saturating(c) => Some(x.min(*c)),
            FusionKind::Power(a) if *a == 1.0 => Some(x),
            _ => None,
        }
    }

    /// An arbitrary evaluator, mainly for negative controls in tests.
    pub fn custom(
        name: &str,
        f: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> FusionFunction {
        FusionFunction { name: name.to_string(), kind: FusionKind::Custom(Arc::new(f)) }
    }

    /// Parses `name` or `name:param`, e.g. `identity`, `power:0.5`,
    /// `saturating:4`.
    pub fn parse(s: &str) -> Result<FusionFunction, CostError> {
        match s.split_once(':') {
            Some((name, p)) => {
                let param = p.parse::<f64>().map_err(|_| CostError::BadParameter {
                    name: name.to_string(),
                    msg: format!("parameter {p:?} is not a number"),
                })?;
                builtin_fusion(name, Some(param))
            }
            None => builtin_fusion(s, None),
        }
    }
}

/// The catalog: `identity`, `power` (exponent in `(0, 1]`), `unit-step`,
/// `saturating` (integer cap `>= 1`), `log2p1`.
pub fn builtin_fusion(name: &str, param: Option<f64>) -> Result<FusionFunction, CostError> {
    let no_param = |kind: FusionKind| -> Result<FusionFunction, CostError> {
        if param.is_some() {
            return Err(CostError::BadParameter {
                name: name.to_string(),
                msg: "takes no parameter".into(),
            });
        }
        Ok(FusionFunction { name: name.to_string(), kind })
    };
    match name {
        "identity" => no_param(FusionKind::Identity),
        "unit-step" => no_param(FusionKind::UnitStep),
        "log2p1" => no_param(FusionKind::Log2P1),
        "power" => {
            let a = param.ok_or_else(|| CostError::BadParameter {
                name: name.into(),
                msg: "needs an exponent, e.g. power:0.5".into(),
            })?;
            if !(a > 0.0 && a <= 1.0) {
                return Err(CostError::BadParameter {
                    name: name.into(),
                    msg: format!("exponent {a} outside (0, 1]"),
                });
            }
            Ok(FusionFunction { name: format!("power:{a}"), kind: FusionKind::Power(a) })
        }
        "saturating" => {
            let c = param.ok_or_else(|| CostError::BadParameter {
                name: name.into(),
                msg: "needs a cap, e.g. saturating:4".into(),
            })?;
            if c < 1.0 || c.fract() != 0.0 {
                return Err(CostError::BadParameter {
                    name: name.into(),
                    msg: format!("cap {c} must be an integer >= 1"),
                });
            }
            Ok(FusionFunction {
                name: format!("saturating:{}", c as u64),
                kind: FusionKind::Saturating(c as u64),
            })
        }
        other => Err(CostError::UnknownFusion(other.to_string())),
    }
}

/// Result of checking the canonical-fusion axioms over `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalReport {
    pub passed: bool,
    /// First axiom violation found, human-readable.
    pub violation: Option<String>,
}

/// Exhaustively checks `f(0) = 0`, monotonicity, integer concavity and
/// subadditivity over `[0, n]`.
pub fn validate_canonical(f: &FusionFunction, n: u64) -> CanonicalReport {
    const EPS: f64 = 1e-9;
    let vals: Vec<f64> = (0..=n).map(|x| f.eval(x)).collect();
    let fail = |violation: String| CanonicalReport { passed: false, violation: Some(violation) };
    if vals[0].abs() > EPS {
        return fail(format!("f(0) = {} instead of 0", vals[0]));
    }
    for x in 0..n as usize {
        if vals[x + 1] < vals[x] - EPS {
            return fail(format!("not nondecreasing at x={}: {} > {}", x, vals[x], vals[x + 1]));
        }
    }
    for x in 1..n as usize {
        let second = (vals[x + 1] - vals[x]) - (vals[x] - vals[x - 1]);
        if second > EPS {
            return fail(format!("concavity at x={x}: second difference {second}"));
        }
    }
    for a in 1..=n as usize {
        for b in a..=n as usize {
            if a + b > n as usize {
                break;
            }
            if vals[a + b] > vals[a] + vals[b] + EPS {
                return fail(format!(
                    "subadditivity at {a}+{b}: {} > {} + {}",
                    vals[a + b],
                    vals[a],
                    vals[b]
                ));
            }
        }
    }
    CanonicalReport { passed: true, violation: None }
}

/// One unit of demand between two distinct nodes. A demand set is a plain
/// slice; repeating a pair repeats the demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Demand {
    pub source: NodeId,
    pub target: NodeId,
}

impl Demand {
    pub fn new(source: NodeId, target: NodeId) -> Option<Demand> {
        (source != target).then_some(Demand { source, target })
    }
}

/// Parses demand lines `s t [count]`; blank lines and `#` comments are
/// skipped. Endpoints must be distinct nodes below `n`.
pub fn parse_demands(text: &str, n: usize) -> Result<Vec<Demand>, CostError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(CostError::BadDemand { line, msg: format!("expected `s t [count]`, got {l:?}") });
        }
        let num = |tok: &str| {
            tok.parse::<usize>().map_err(|_| CostError::BadDemand {
                line,
                msg: format!("{tok:?} is not a non-negative integer"),
            })
        };
        let (s, t) = (num(toks[0])?, num(toks[1])?);
        if s >= n || t >= n {
            return Err(CostError::BadDemand { line, msg: format!("node out of range 0..{n}") });
        }
        let count = if toks.len() == 3 { num(toks[2])? } else { 1 };
        let d = Demand::new(s, t)
            .ok_or(CostError::BadDemand { line, msg: "demand endpoints must differ".into() })?;
        out.extend(std::iter::repeat_n(d, count));
    }
    Ok(out)
}

/// The demand-file serialization of a set, one `s t` line per demand.
pub fn dump_demands(a: &[Demand]) -> String {
    a.iter().map(|d| format!("{} {}\n", d.source, d.target)).collect()
}

/// Per-edge demand counts. Each demand contributes at most once per edge,
/// however often its path revisits it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadMap {
    pub counts: BTreeMap<(NodeId, NodeId), usize>,
}

impl LoadMap {
    pub fn load(&self, u: NodeId, v: NodeId) -> usize {
        self.counts.get(&edge_key(u, v)).copied().unwrap_or(0)
    }
}

fn edge_key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn edge_set(nodes: &[NodeId]) -> BTreeSet<(NodeId, NodeId)> {
    nodes.windows(2).map(|w| edge_key(w[0], w[1])).collect()
}

/// Counts, per edge, the demands whose assigned path uses it. `paths` pairs
/// up with `a` by position.
pub fn edge_loads<'a, I>(a: &[Demand], paths: I) -> Result<LoadMap, CostError>
where
    I: IntoIterator<Item = &'a Path>,
{
    let mut counts = BTreeMap::new();
    let mut it = paths.into_iter();
    let mut used = 0;
    for d in a {
        let p = it
            .next()
            .ok_or(CostError::PathCount { demands: a.len(), paths: used })?;
        used += 1;
        if p.source() != d.source || p.target() != d.target {
            return Err(CostError::EndpointMismatch {
                s: d.source,
                t: d.target,
                ps: p.source(),
                pt: p.target(),
            });
        }
        for e in edge_set(p.nodes()) {
            *counts.entry(e).or_insert(0) += 1;
        }
    }
    let extra = it.count();
    if extra > 0 {
        return Err(CostError::PathCount { demands: a.len(), paths: used + extra });
    }
    Ok(LoadMap { counts })
}

/// Total and per-edge cost of routing `a` over the given paths.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCosts {
    pub total: f64,
    /// Present when the fusion function is integer-valued.
    pub total_exact: Option<u128>,
    pub per_edge: BTreeMap<(NodeId, NodeId), f64>,
    pub loads: LoadMap,
}

/// Evaluates `sum over edges of f(load) * weight`.
pub fn total_cost<'a, I>(
    g: &WeightedPlanarGraph,
    a: &[Demand],
    paths: I,
    f: &FusionFunction,
) -> Result<EdgeCosts, CostError>
where
    I: IntoIterator<Item = &'a Path>,
{
    let loads = edge_loads(a, paths)?;
    cost_of_loads(g, &loads, f)
}

fn cost_of_loads(
    g: &WeightedPlanarGraph,
    loads: &LoadMap,
    f: &FusionFunction,
) -> Result<EdgeCosts, CostError> {
    let mut total = 0.0;
    let mut exact: Option<u128> = Some(0);
    let mut per_edge = BTreeMap::new();
    for (&(u, v), &cnt) in &loads.counts {
        let w = g.edge_weight(u, v).ok_or(CostError::UnknownEdge { u, v })?;
        let c = f.eval(cnt as u64) * w as f64;
        per_edge.insert((u, v), c);
        total += c;
        exact = match (exact, f.eval_exact(cnt as u64)) {
            (Some(acc), Some(fx)) => Some(acc + fx as u128 * w as u128),
            _ => None,
        };
    }
    // Prefer the exact sum for display stability when it exists.
    if let Some(e) = exact {
        total = e as f64;
    }
    Ok(EdgeCosts { total, total_exact: exact, per_edge, loads: loads.clone() })
}

/// The per-level cost decomposition of a routed demand set.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCosts {
    /// Source-side level costs, index = level.
    pub source: Vec<f64>,
    /// Destination-side level costs.
    pub dest: Vec<f64>,
    /// Cost of the full paths.
    pub total: f64,
    /// Whether `total <= sum(source) + sum(dest)` — the level decomposition
    /// inequality that subadditivity promises.
    pub decomposition_holds: bool,
    /// True when the inequality was checked in exact integer arithmetic.
    pub exact: bool,
}

fn lookup<'a>(
    entries: &'a BTreeMap<(NodeId, NodeId), PathEntry>,
    d: &Demand,
) -> Result<&'a PathEntry, CostError> {
    entries
        .get(&(d.source, d.target))
        .ok_or(CostError::MissingPath { s: d.source, t: d.target })
}

/// Splits every demand's path into its per-level subpaths (source and
/// destination sides separately), prices each level on its own loads, and
/// checks the decomposition inequality against the full-path cost.
pub fn level_costs(
    g: &WeightedPlanarGraph,
    h: &CoverHierarchy,
    entries: &BTreeMap<(NodeId, NodeId), PathEntry>,
    a: &[Demand],
    f: &FusionFunction,
) -> Result<LevelCosts, CostError> {
    let top = h.params.top_level;
    let mut src_loads = vec![LoadMap::default(); top];
    let mut dst_loads = vec![LoadMap::default(); top];
    let mut paths = Vec::with_capacity(a.len());
    for d in a {
        let e = lookup(entries, d)?;
        for j in 0..e.level {
            for key in edge_set(e.source_subpath(j)) {
                *src_loads[j].counts.entry(key).or_insert(0) += 1;
            }
            for key in edge_set(e.dest_subpath(j)) {
                *dst_loads[j].counts.entry(key).or_insert(0) += 1;
            }
        }
        paths.push(&e.path);
    }
    let full = total_cost(g, a, paths, f)?;
    let mut source = Vec::with_capacity(top);
    let mut dest = Vec::with_capacity(top);
    let mut level_exact: Option<u128> = Some(0);
    for loads in src_loads.iter().chain(&dst_loads) {
        let c = cost_of_loads(g, loads, f)?;
        level_exact = match (level_exact, c.total_exact) {
            (Some(acc), Some(e)) => Some(acc + e),
            _ => None,
        };
        if source.len() < top {
            source.push(c.total);
        } else {
            dest.push(c.total);
        }
    }
    let level_sum: f64 = source.iter().chain(&dest).sum();
    let (decomposition_holds, exact) = match (full.total_exact, level_exact) {
        (Some(t), Some(l)) => (t <= l, true),
        _ => (full.total <= level_sum * (1.0 + 1e-9) + 1e-9, false),
    };
    Ok(LevelCosts { source, dest, total: full.total, decomposition_holds, exact })
}

/// For each level-`level` cluster, the number of demands whose source sits
/// in it and whose path climbs through its leader toward a higher level —
/// keyed by cluster index. Clusters no demand climbs through are absent.
pub fn extract_xa(
    h: &CoverHierarchy,
    entries: &BTreeMap<(NodeId, NodeId), PathEntry>,
    a: &[Demand],
    level: usize,
) -> Result<BTreeMap<usize, usize>, CostError> {
    let mut out = BTreeMap::new();
    if level >= h.levels.len() {
        return Ok(out);
    }
    for d in a {
        let e = lookup(entries, d)?;
        if e.level > level {
            *out.entry(h.levels[level].chosen[d.source]).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// The level-`level` upper bound: `sum over clusters of f(|X(A)|) * degree
/// * stretch * locality(level+1)`. Valid for levels `0..top`.
pub fn bound_q(
    h: &CoverHierarchy,
    entries: &BTreeMap<(NodeId, NodeId), PathEntry>,
    a: &[Demand],
    f: &FusionFunction,
    level: usize,
) -> Result<f64, CostError> {
    let p = &h.params;
    if level >= p.top_level {
        return Err(CostError::LevelRange { level, lo: 0, hi: p.top_level - 1 });
    }
    let xa = extract_xa(h, entries, a, level)?;
    let factor = p.degree_bound as f64
        * p.stretch_bound as f64
        * p.locality(level + 1) as f64;
    Ok(xa.values().map(|&c| f.eval(c as u64)).sum::<f64>() * factor)
}

/// The level-`level` lower bound on the optimal cost, with its per-color
/// split and the certified value `total / colors`.
#[derive(Debug, Clone, PartialEq)]
pub struct RBounds {
    pub total: f64,
    pub per_color: BTreeMap<usize, f64>,
    /// `total / color_bound` — the value actually certified below the
    /// optimum, since only same-colored clusters are provably independent.
    pub certified: f64,
}

/// `sum over clusters of f(|X(A)|) * locality(level) / 2`, split by cluster
/// color. Only levels `2..top` carry this bound.
pub fn bound_r(
    h: &CoverHierarchy,
    entries: &BTreeMap<(NodeId, NodeId), PathEntry>,
    a: &[Demand],
    f: &FusionFunction,
    level: usize,
) -> Result<RBounds, CostError> {
    let p = &h.params;
    if level < 2 || level + 1 > p.top_level {
        return Err(CostError::LevelRange { level, lo: 2, hi: p.top_level.saturating_sub(1) });
    }
    let xa = extract_xa(h, entries, a, level)?;
    let half = p.locality(level) as f64 / 2.0;
    let mut total = 0.0;
    let mut per_color = BTreeMap::new();
    for (&ci, &cnt) in &xa {
        let v = f.eval(cnt as u64) * half;
        total += v;
        *per_color.entry(h.levels[level].cover.clusters[ci].color).or_insert(0.0) += v;
    }
    Ok(RBounds { total, per_color, certified: total / p.color_bound as f64 })
}

/// The low-level counterpart of [`bound_r`] for levels 0 and 1: every
/// climbing demand pays at least unit length, so the bound is plain
/// `sum of f(|X(A)|)` with no locality factor.
pub fn bound_r_small(
    h: &CoverHierarchy,
    entries: &BTreeMap<(NodeId, NodeId), PathEntry>,
    a: &[Demand],
    f: &FusionFunction,
    level: usize,
) -> Result<f64, CostError> {
    if level > 1 || level >= h.params.top_level {
        return Err(CostError::LevelRange {
            level,
            lo: 0,
            hi: h.params.top_level.saturating_sub(1).min(1),
        });
    }
    let xa = extract_xa(h, entries, a, level)?;
    Ok(xa.values().map(|&c| f.eval(c as u64)).sum())
}

/// Largest number of distinct next-level leaders selected by the climbing
/// demands of any single level-`level` cluster. The analysis promises this
/// never exceeds the cover degree bound.
pub fn max_leader_fanout(
    h: &CoverHierarchy,
    entries: &BTreeMap<(NodeId, NodeId), PathEntry>,
    a: &[Demand],
    level: usize,
) -> Result<usize, CostError> {
    let p = &h.params;
    if level >= p.top_level {
        return Err(CostError::LevelRange { level, lo: 0, hi: p.top_level - 1 });
    }
    let mut fanout: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
    for d in a {
        let e = lookup(entries, d)?;
        if e.level > level {
            fanout
                .entry(h.levels[level].chosen[d.source])
                .or_default()
                .insert(h.leader(level + 1, d.source));
        }
    }
    Ok(fanout.values().map(|s| s.len()).max().unwrap_or(0))
}

/// The worst-case oblivious ratio the analysis guarantees:
/// `16 * top_level * degree * stretch^2 * colors`.
pub fn ratio_bound(p: &HierarchyParams) -> f64 {
    16.0 * p.top_level as f64
        * p.degree_bound as f64
        * (p.stretch_bound as f64).powi(2)
        * p.color_bound as f64
}

/// Everything the cost analysis produces for one routed demand set.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub instance: String,
    pub n: usize,
    pub top_level: usize,
    pub fusion: String,
    pub demands: usize,
    pub total: f64,
    pub per_edge: BTreeMap<(NodeId, NodeId), f64>,
    pub level_source: Vec<f64>,
    pub level_dest: Vec<f64>,
    pub q: Vec<f64>,
    /// Lower bounds for levels `2..top`, keyed by level.
    pub r: BTreeMap<usize, RBounds>,
    /// Low-level lower bounds for levels 0 and 1 (as far as they exist).
    pub r_small: Vec<f64>,
    pub ratio_bound: f64,
    pub decomposition_holds: bool,
}

/// Assembles the full report: total and per-edge costs, level split, and
/// all bound calculators.
pub fn cost_report(
    g: &WeightedPlanarGraph,
    h: &CoverHierarchy,
    entries: &BTreeMap<(NodeId, NodeId), PathEntry>,
    a: &[Demand],
    f: &FusionFunction,
    instance: &str,
) -> Result<CostReport, CostError> {
    let top = h.params.top_level;
    let levels = level_costs(g, h, entries, a, f)?;
    let paths: Vec<&Path> = a
        .iter()
        .map(|d| lookup(entries, d).map(|e| &e.path))
        .collect::<Result<_, _>>()?;
    let edge_costs = total_cost(g, a, paths, f)?;
    let q = (0..top)
        .map(|i| bound_q(h, entries, a, f, i))
        .collect::<Result<Vec<_>, _>>()?;
    let mut r = BTreeMap::new();
    for i in 2..top {
        r.insert(i, bound_r(h, entries, a, f, i)?);
    }
    let r_small = (0..top.min(2))
        .map(|i| bound_r_small(h, entries, a, f, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CostReport {
        instance: instance.to_string(),
        n: g.node_count(),
        top_level: top,
        fusion: f.name().to_string(),
        demands: a.len(),
        total: levels.total,
        per_edge: edge_costs.per_edge,
        level_source: levels.source,
        level_dest: levels.dest,
        q,
        r,
        r_small,
        ratio_bound: ratio_bound(&h.params),
        decomposition_holds: levels.decomposition_holds,
    })
}

impl CostReport {
    pub fn csv_header() -> &'static str {
        "instance,n,kappa,f,demands,C,C_star,ratio,bound"
    }

    /// One CSV row; the optimum column (and the ratio depending on it) stay
    /// empty when no oracle value is supplied.
    pub fn csv_row(&self, c_star: Option<f64>) -> String {
        let (cs, ratio) = match c_star {
            Some(c) if c > 0.0 => (format!("{c}"), format!("{}", self.total / c)),
            Some(c) => (format!("{c}"), String::new()),
            None => (String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.instance,
            self.n,
            self.top_level,
            self.fusion,
            self.demands,
            self.total,
            cs,
            ratio,
            self.ratio_bound
        )
    }

    /// Plain-text rendering, one quantity per line.
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "cost instance {} n {} kappa {} f {} demands {}\ntotal {}\n",
            self.instance, self.n, self.top_level, self.fusion, self.demands, self.total
        );
        for i in 0..self.top_level {
            out.push_str(&format!(
                "level {i} src {} dst {} q {}\n",
                self.level_source[i], self.level_dest[i], self.q[i]
            ));
        }
        for (i, v) in self.r_small.iter().enumerate() {
            out.push_str(&format!("rsmall {i} {v}\n"));
        }
        for (i, rb) in &self.r {
            out.push_str(&format!("r {i} {} certified {}\n", rb.total, rb.certified));
        }
        out.push_str(&format!(
            "ratio_bound {}\ndecomposition {}\n",
            self.ratio_bound,
            if self.decomposition_holds { "pass" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{grid, WeightRule};
    use crate::graph::Weight;
    use crate::hierarchy::{
        auxiliary_paths, build_hierarchy, find_all_paths, make_params, ParamOverrides,
    };

    fn triangle() -> WeightedPlanarGraph {
        WeightedPlanarGraph::new(3, vec![(0, 1, 1), (1, 2, 1), (0, 2, 1)], vec![0, 1, 2])
            .unwrap()
    }

    fn routed(
        g: &WeightedPlanarGraph,
        base: Option<Weight>,
    ) -> (CoverHierarchy, BTreeMap<(NodeId, NodeId), PathEntry>) {
        let params =
            make_params(g, ParamOverrides { base, level_rule: None }).unwrap();
        let h = build_hierarchy(g, params).unwrap();
        let aux = auxiliary_paths(g, &h);
        let table = find_all_paths(g, &h, &aux, None).unwrap();
        (h, table.entries)
    }

    #[test]
    fn catalog_values() {
        let f = builtin_fusion("identity", None).unwrap();
        assert_eq!(f.eval(5), 5.0);
        let f = builtin_fusion("unit-step", None).unwrap();
        assert_eq!((f.eval(0), f.eval(7)), (0.0, 1.0));
        let f = builtin_fusion("power", Some(0.5)).unwrap();
        assert_eq!(f.eval(4), 2.0);
        assert_eq!(f.name(), "power:0.5");
        let f = builtin_fusion("saturating", Some(3.0)).unwrap();
        assert_eq!((f.eval(2), f.eval(5)), (2.0, 3.0));
        let f = builtin_fusion("log2p1", None).unwrap();
        assert_eq!((f.eval(0), f.eval(1), f.eval(3), f.eval(7)), (0.0, 1.0, 2.0, 3.0));
    }

    #[test]
    fn catalog_rejects_bad_parameters() {
        assert!(matches!(builtin_fusion("frobnicate", None), Err(CostError::UnknownFusion(_))));
        assert!(builtin_fusion("power", Some(0.0)).is_err());
        assert!(builtin_fusion("power", Some(1.5)).is_err());
        assert!(builtin_fusion("power", None).is_err());
        assert!(builtin_fusion("saturating", Some(0.5)).is_err());
        assert!(builtin_fusion("identity", Some(2.0)).is_err());
        assert!(FusionFunction::parse("power:half").is_err());
        assert_eq!(FusionFunction::parse("power:1").unwrap().eval_exact(9), Some(9));
    }

    #[test]
    fn canonical_validation() {
        for name in ["identity", "unit-step", "log2p1"] {
            let f = builtin_fusion(name, None).unwrap();
            assert!(validate_canonical(&f, 64).passed, "{name}");
        }
        assert!(validate_canonical(&builtin_fusion("power", Some(0.5)).unwrap(), 64).passed);
        assert!(validate_canonical(&builtin_fusion("saturating", Some(4.0)).unwrap(), 64).passed);
        let sq = FusionFunction::custom("square", |x| (x * x) as f64);
        let rep = validate_canonical(&sq, 100);
        assert!(!rep.passed);
        assert_eq!(rep.violation.unwrap(), "concavity at x=1: second difference 2");
    }

    #[test]
    fn loads_use_set_semantics_per_demand() {
        let g = triangle();
        let d = Demand::new(0, 2).unwrap();
        let p = Path::new(&g, vec![0, 1, 2]).unwrap();
        let loads = edge_loads(&[d], [&p]).unwrap();
        assert_eq!(loads.load(0, 1), 1);
        assert_eq!(loads.load(1, 2), 1);
        assert_eq!(loads.load(0, 2), 0);

        let loads = edge_loads(&[d, d], [&p, &p]).unwrap();
        assert_eq!(loads.load(1, 0), 2);

        // A revisited edge still counts once for its demand.
        let wander = Path::new(&g, vec![0, 1, 0, 1, 2]).unwrap();
        let loads = edge_loads(&[d], [&wander]).unwrap();
        assert_eq!(loads.load(0, 1), 1);

        let wrong = Path::new(&g, vec![0, 1]).unwrap();
        assert!(matches!(
            edge_loads(&[d], [&wrong]),
            Err(CostError::EndpointMismatch { .. })
        ));
        assert!(matches!(edge_loads(&[d], []), Err(CostError::PathCount { .. })));
    }

    #[test]
    fn total_cost_examples() {
        let g = triangle();
        let d = Demand::new(0, 2).unwrap();
        let p = Path::new(&g, vec![0, 1, 2]).unwrap();
        let f = builtin_fusion("identity", None).unwrap();
        let c = total_cost(&g, &[d], [&p], &f).unwrap();
        assert_eq!(c.total, 2.0);
        assert_eq!(c.total_exact, Some(2));

        // Two demands fully sharing a weight-3 edge under square root.
        let g = WeightedPlanarGraph::new(2, vec![(0, 1, 3)], vec![0, 1]).unwrap();
        let d = Demand::new(0, 1).unwrap();
        let p = Path::new(&g, vec![0, 1]).unwrap();
        let f = builtin_fusion("power", Some(0.5)).unwrap();
        let c = total_cost(&g, &[d, d], [&p, &p], &f).unwrap();
        assert_eq!(c.total, 2.0_f64.sqrt() * 3.0);
        assert_eq!(c.total_exact, None);

        // 4-cycle, both demands on the same two unit edges, priced once.
        let g = WeightedPlanarGraph::new(
            4,
            vec![(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)],
            vec![0, 1, 2, 3],
        )
        .unwrap();
        let d = Demand::new(0, 2).unwrap();
        let p = Path::new(&g, vec![0, 1, 2]).unwrap();
        let f = builtin_fusion("unit-step", None).unwrap();
        let c = total_cost(&g, &[d, d], [&p, &p], &f).unwrap();
        assert_eq!(c.total, 2.0);

        // Dropping a repetition never raises the cost.
        let wander = Path::new(&g, vec![0, 1, 0, 1, 2]).unwrap();
        let id = builtin_fusion("identity", None).unwrap();
        let c_wander = total_cost(&g, &[d], [&wander], &id).unwrap();
        let c_plain = total_cost(&g, &[d], [&p], &id).unwrap();
        assert!(c_plain.total <= c_wander.total);
    }

    #[test]
    fn empty_demand_set_costs_nothing() {
        let g = triangle();
        let f = builtin_fusion("log2p1", None).unwrap();
        let c = total_cost(&g, &[], [], &f).unwrap();
        assert_eq!(c.total, 0.0);
    }

    #[test]
    fn level_split_covers_the_total() {
        let g = triangle();
        let (h, entries) = routed(&g, None);
        let f = builtin_fusion("identity", None).unwrap();
        let a = [Demand::new(1, 2).unwrap()];
        let lc = level_costs(&g, &h, &entries, &a, &f).unwrap();
        // Path [1, 0, 2]: one source edge, one destination edge.
        assert_eq!(lc.source, vec![1.0]);
        assert_eq!(lc.dest, vec![1.0]);
        assert_eq!(lc.total, 2.0);
        assert!(lc.decomposition_holds && lc.exact);

        let g = grid(10, 10, WeightRule::Unit);
        let (h, entries) = routed(&g, Some(4));
        let f = builtin_fusion("power", Some(0.5)).unwrap();
        let mut a = Vec::new();
        for k in 0..20usize {
            let (s, t) = (7 * k % 100, (13 * k + 31) % 100);
            if s != t {
                a.push(Demand::new(s, t).unwrap());
            }
        }
        let lc = level_costs(&g, &h, &entries, &a, &f).unwrap();
        assert!(lc.decomposition_holds && !lc.exact);
        assert!(lc.total > 0.0);
        for (i, (&cs, &cd)) in lc.source.iter().zip(&lc.dest).enumerate() {
            let q = bound_q(&h, &entries, &a, &f, i).unwrap();
            assert!(cs <= q + 1e-9 && cd <= q + 1e-9, "level {i}: {cs}/{cd} vs {q}");
        }
    }

    #[test]
    fn xa_counts_climbing_demands() {
        let g = triangle();
        let (h, entries) = routed(&g, None);
        let a = [Demand::new(1, 2).unwrap()];
        // Common level is 1: counted at level 0 under the singleton of the
        // source, nowhere above.
        let xa0 = extract_xa(&h, &entries, &a, 0).unwrap();
        assert_eq!(xa0, BTreeMap::from([(1, 1)]));
        assert!(extract_xa(&h, &entries, &a, 1).unwrap().is_empty());

        // Two sources sharing a level-1 leader, both meeting their targets
        // higher up, pool in that cluster.
        let g = grid(5, 5, WeightRule::Unit);
        let (h, entries) = routed(&g, Some(4));
        let mut demands = None;
        'outer: for s1 in g.nodes() {
            for s2 in g.nodes() {
                if s2 > s1
                    && h.levels[1].chosen[s1] == h.levels[1].chosen[s2]
                    && entries[&(s1, 24)].level >= 2
                    && entries[&(s2, 24)].level >= 2
                    && s2 != 24
                    && s1 != 24
                {
                    demands = Some([Demand::new(s1, 24).unwrap(), Demand::new(s2, 24).unwrap()]);
                    break 'outer;
                }
            }
        }
        let a = demands.expect("the grid has co-clustered sources");
        let xa1 = extract_xa(&h, &entries, &a, 1).unwrap();
        assert_eq!(xa1.get(&h.levels[1].chosen[a[0].source]), Some(&2));
    }

    #[test]
    fn q_bound_formula() {
        let g = triangle();
        let (h, entries) = routed(&g, None);
        let f = builtin_fusion("identity", None).unwrap();
        assert_eq!(bound_q(&h, &entries, &[], &f, 0).unwrap(), 0.0);
        let a = [Demand::new(1, 2).unwrap()];
        // One cluster with one climbing demand: f(1) * 18 * 24 * 1.
        assert_eq!(bound_q(&h, &entries, &a, &f, 0).unwrap(), 432.0);
        assert!(matches!(
            bound_q(&h, &entries, &a, &f, 1),
            Err(CostError::LevelRange { level: 1, lo: 0, hi: 0 })
        ));
    }

    #[test]
    fn r_bound_formula() {
        // Two nodes at distance 100 give three levels with localities
        // (1, 96, 9216); three duplicate demands all meet at the top.
        let g = WeightedPlanarGraph::new(2, vec![(0, 1, 100)], vec![0, 1]).unwrap();
        let (h, entries) = routed(&g, None);
        assert_eq!(h.params.top_level, 3);
        let f = builtin_fusion("identity", None).unwrap();
        let d = Demand::new(0, 1).unwrap();
        let a = [d, d, d];
        assert_eq!(entries[&(0, 1)].level, 3);

        let rb = bound_r(&h, &entries, &a, &f, 2).unwrap();
        assert_eq!(rb.total, 144.0); // f(3) * 96 / 2
        assert_eq!(rb.certified, 8.0);
        assert_eq!(rb.per_color.len(), 1);
        assert_eq!(rb.per_color.values().sum::<f64>(), 144.0);

        assert!(bound_r(&h, &entries, &a, &f, 1).is_err());
        assert!(bound_r(&h, &entries, &a, &f, 3).is_err());
        assert_eq!(bound_r(&h, &entries, &[], &f, 2).unwrap().total, 0.0);

        assert_eq!(bound_r_small(&h, &entries, &a, &f, 0).unwrap(), 3.0);
        assert_eq!(bound_r_small(&h, &entries, &a, &f, 1).unwrap(), 3.0);
        assert!(bound_r_small(&h, &entries, &a, &f, 2).is_err());
    }

    #[test]
    fn small_level_bound_is_not_universal() {
        // Two mutual-reverse demands across one unit edge both climb past
        // the singleton level, so the level-0 certificate under unit-step
        // is f(1) + f(1) = 2 — yet the cheapest assignment shares the lone
        // edge for a total of 1. The certificate only under-approximates
        // the optimum when climbing sources cannot pool their first edge;
        // the headline ratio constant has enough slack to absorb this, but
        // the raw number is not a lower bound on every demand set.
        let g = WeightedPlanarGraph::new(2, vec![(0, 1, 1)], vec![0, 1]).unwrap();
        let (h, entries) = routed(&g, None);
        let a = vec![
            Demand { source: 0, target: 1 },
            Demand { source: 1, target: 0 },
        ];
        let f = builtin_fusion("unit-step", None).unwrap();
        assert_eq!(bound_r_small(&h, &entries, &a, &f, 0).unwrap(), 2.0);
        let budget = crate::oracle::OracleBudget::default();
        let (c_star, _) = crate::oracle::optimal_cost(&g, &a, &f, &budget).unwrap();
        assert_eq!(c_star, 1.0);
    }

    #[test]
    fn fanout_stays_under_the_degree_bound() {
        let g = grid(5, 5, WeightRule::Unit);
        let (h, entries) = routed(&g, Some(4));
        let mut a = Vec::new();
        for s in g.nodes() {
            if s != 24 {
                a.push(Demand::new(s, 24).unwrap());
            }
        }
        for i in 0..h.params.top_level {
            let fan = max_leader_fanout(&h, &entries, &a, i).unwrap();
            assert!(fan <= h.params.degree_bound, "level {i} fan-out {fan}");
        }
    }

    #[test]
    fn ratio_bound_constants() {
        let g = triangle();
        let (h, _) = routed(&g, None);
        assert_eq!(ratio_bound(&h.params), 2_985_984.0);
        let g = WeightedPlanarGraph::new(2, vec![(0, 1, 100)], vec![0, 1]).unwrap();
        let (h, _) = routed(&g, None);
        assert_eq!(ratio_bound(&h.params), 8_957_952.0);
    }

    #[test]
    fn demand_parsing() {
        let a = parse_demands("0 2\n# comment\n\n1 2 3\n", 3).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a[0], Demand::new(0, 2).unwrap());
        assert_eq!(&a[1..], &[Demand::new(1, 2).unwrap(); 3]);
        assert_eq!(dump_demands(&a[..2]), "0 2\n1 2\n");

        assert!(parse_demands("1 1\n", 3).is_err());
        assert!(parse_demands("0 7\n", 3).is_err());
        assert!(parse_demands("0\n", 3).is_err());
        assert!(parse_demands("0 x\n", 3).is_err());
    }

    #[test]
    fn report_rendering_is_frozen() {
        let g = triangle();
        let (h, entries) = routed(&g, None);
        let f = builtin_fusion("identity", None).unwrap();
        let a = [Demand::new(1, 2).unwrap()];
        let rep = cost_report(&g, &h, &entries, &a, &f, "tri").unwrap();
        assert_eq!(CostReport::csv_header(), "instance,n,kappa,f,demands,C,C_star,ratio,bound");
        assert_eq!(rep.csv_row(Some(1.0)), "tri,3,1,identity,1,2,1,2,2985984");
        assert_eq!(rep.csv_row(None), "tri,3,1,identity,1,2,,,2985984");
        assert_eq!(
            rep.render_text(),
            "cost instance tri n 3 kappa 1 f identity demands 1\n\
             total 2\n\
             level 0 src 1 dst 1 q 432\n\
             rsmall 0 1\n\
             ratio_bound 2985984\n\
             decomposition pass\n"
        );
    }
}
