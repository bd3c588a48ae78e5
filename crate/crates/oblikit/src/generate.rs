//! Seeded instance generators. Both generators are bit-reproducible: the
//! same parameters and seed always yield the same graph, byte for byte.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{NodeId, Weight, WeightedPlanarGraph};

/// Edge-weight policy for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRule {
    Unit,
    /// Uniform integer weights in `1..=10`, drawn from a ChaCha8 stream.
    Uniform { seed: u64 },
}

/// `rows x cols` grid with the boundary cycle as the outer face. Nodes are
/// numbered row-major; edges are generated row-major (right, then down), and
/// random weights are drawn in that order.
pub fn grid(rows: usize, cols: usize, rule: WeightRule) -> WeightedPlanarGraph {
    assert!(rows >= 1 && cols >= 1, "grid needs at least one row and column");
    assert!(rows * cols >= 2, "grid needs at least two nodes");
    let id = |r: usize, c: usize| r * cols + c;
    let mut rng = rng_for(rule);
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1), draw(&mut rng)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c), draw(&mut rng)));
            }
        }
    }
    let mut outer = Vec::new();
    if rows == 1 {
        outer.extend((0..cols).map(|c| id(0, c)));
    } else if cols == 1 {
        outer.extend((0..rows).map(|r| id(r, 0)));
    } else {
        outer.extend((0..cols).map(|c| id(0, c)));
        outer.extend((1..rows).map(|r| id(r, cols - 1)));
        outer.extend((0..cols - 1).rev().map(|c| id(rows - 1, c)));
        outer.extend((1..rows - 1).rev().map(|r| id(r, 0)));
    }
    WeightedPlanarGraph::new(rows * cols, edges, outer).expect("grids are planar and connected")
}

/// Random maximal planar triangulation on `n >= 3` nodes with the initial
/// triangle `0 1 2` as the outer face: each new node is planted inside a
/// uniformly chosen existing internal face and joined to its three corners.
/// Weights are uniform in `1..=10`. Always has `3n - 6` edges.
pub fn triangulated(n: usize, seed: u64) -> WeightedPlanarGraph {
    assert!(n >= 3, "a triangulation needs at least 3 nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = |rng: &mut ChaCha8Rng| rng.random_range(1..=10 as Weight);
    let mut edges = vec![(0, 1, 0), (1, 2, 0), (0, 2, 0)];
    for e in &mut edges {
        e.2 = w(&mut rng);
    }
    let mut faces: Vec<(NodeId, NodeId, NodeId)> = vec![(0, 1, 2)];
    for v in 3..n {
        let idx = rng.random_range(0..faces.len());
        let (a, b, c) = faces[idx];
        edges.push((a, v, w(&mut rng)));
        edges.push((b, v, w(&mut rng)));
        edges.push((c, v, w(&mut rng)));
        faces[idx] = (a, b, v);
        faces.push((b, c, v));
        faces.push((a, c, v));
    }
    WeightedPlanarGraph::new(n, edges, vec![0, 1, 2])
        .expect("face splitting preserves planarity and connectivity")
}

fn rng_for(rule: WeightRule) -> Option<ChaCha8Rng> {
    match rule {
        WeightRule::Unit => None,
        WeightRule::Uniform { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
    }
}

fn draw(rng: &mut Option<ChaCha8Rng>) -> Weight {
    match rng {
        None => 1,
        Some(r) => r.random_range(1..=10),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grids() {
        let g = grid(2, 2, WeightRule::Unit);
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.outer_face(), &[0, 1, 3, 2]);

        let g = grid(3, 3, WeightRule::Unit);
        assert_eq!(g.node_count(), 9);
        assert_eq!(g.edge_count(), 12);
        assert_eq!(g.outer_face().len(), 8);
        assert!(!g.is_outer(4));
    }

    #[test]
    fn grid_edge_count_formula() {
        // m = 2rc - r - c.
        let g = grid(30, 30, WeightRule::Unit);
        assert_eq!(g.edge_count(), 1740);
        let g = grid(4, 7, WeightRule::Unit);
        assert_eq!(g.edge_count(), 2 * 4 * 7 - 4 - 7);
    }

    #[test]
    fn grid_random_weights_reproducible() {
        let a = grid(4, 4, WeightRule::Uniform { seed: 7 });
        let b = grid(4, 4, WeightRule::Uniform { seed: 7 });
        assert_eq!(a.to_file_string(), b.to_file_string());
        let c = grid(4, 4, WeightRule::Uniform { seed: 8 });
        assert_ne!(a.to_file_string(), c.to_file_string());
        assert!(a.edges().iter().all(|&(_, _, w)| (1..=10).contains(&w)));
    }

    #[test]
    fn triangulation_shape() {
        let g = triangulated(3, 1);
        assert_eq!((g.node_count(), g.edge_count()), (3, 3));
        let g = triangulated(10, 7);
        assert_eq!(g.edge_count(), 3 * 10 - 6);
        assert_eq!(g.outer_face(), &[0, 1, 2]);
        for n in [4, 12, 50] {
            let g = triangulated(n, 42);
            assert_eq!(g.edge_count(), 3 * n - 6);
        }
    }

    #[test]
    fn triangulation_reproducible() {
        let a = triangulated(25, 3).to_file_string();
        let b = triangulated(25, 3).to_file_string();
        assert_eq!(a, b);
        assert_ne!(a, triangulated(25, 4).to_file_string());
    }
}
