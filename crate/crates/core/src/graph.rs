//! Quantum labeled graphs and gate scheduling by conflict coloring.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::tensor::{SpaceLayout, Support};

/// Per-node label: the node's Hilbert space dimension and its quiescent basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeLabel {
    pub dim: usize,
    pub quiescent: usize,
}

impl NodeLabel {
    pub const fn new(dim: usize, quiescent: usize) -> Self {
        NodeLabel { dim, quiescent }
    }
}

/// Directed graph with a finite-dimensional quantum system at each node.
///
/// Neighborhoods are out-neighborhoods: `N_x = {y | (x, y) ∈ E}`. Self-loops
/// are never implied and must be listed explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantumLabeledGraph {
    nodes: Vec<NodeLabel>,
    edges: BTreeSet<(usize, usize)>,
}

impl QuantumLabeledGraph {
    pub fn new(nodes: Vec<NodeLabel>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        for (x, n) in nodes.iter().enumerate() {
            if n.dim == 0 {
                return Err(Error::ZeroDimension);
            }
            if n.quiescent >= n.dim {
                return Err(Error::InvalidQuiescent {
                    node: x,
                    dim: n.dim,
                    quiescent: n.quiescent,
                });
            }
        }
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        for &(x, y) in &edges {
            for v in [x, y] {
                if v >= nodes.len() {
                    return Err(Error::InvalidNode(v));
                }
            }
        }
        Ok(QuantumLabeledGraph { nodes, edges })
    }

    /// Cycle `Z_len` of `dim`-level nodes (quiescent 0) with edges `(x, x + o mod len)`
    /// for every offset `o`.
    pub fn ring(len: usize, dim: usize, offsets: &[isize]) -> Result<Self> {
        let n = len as isize;
        let edges = (0..n).flat_map(|x| offsets.iter().map(move |o| (x as usize, (x + o).rem_euclid(n) as usize)));
        Self::new(vec![NodeLabel::new(dim, 0); len], edges)
    }

    /// Nodes with the given dims (quiescent 0), self-loops only.
    pub fn isolated(dims: &[usize]) -> Result<Self> {
        let nodes = dims.iter().map(|&d| NodeLabel::new(d, 0)).collect();
        Self::new(nodes, (0..dims.len()).map(|x| (x, x)))
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeLabel] {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn dims(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.dim).collect()
    }

    pub fn quiescent(&self) -> Vec<usize> {
        self.nodes.iter().map(|n| n.quiescent).collect()
    }

    /// The node spaces on tape 0.
    pub fn layout(&self) -> SpaceLayout {
        SpaceLayout::qudits(&self.dims()).expect("dims validated at construction")
    }

    fn check_node(&self, x: usize) -> Result<()> {
        if x >= self.nodes.len() {
            return Err(Error::InvalidNode(x));
        }
        Ok(())
    }

    /// Out-neighbors of `x`, ascending.
    pub fn neighbors(&self, x: usize) -> Result<Vec<usize>> {
        self.check_node(x)?;
        Ok(self.edges.range((x, 0)..=(x, usize::MAX)).map(|e| e.1).collect())
    }

    /// `N_x` as a tape-0 support.
    pub fn neighborhood(&self, x: usize) -> Result<Support> {
        Ok(Support::nodes(self.neighbors(x)?))
    }

    /// Same nodes, every edge reversed.
    pub fn transpose(&self) -> Self {
        QuantumLabeledGraph {
            nodes: self.nodes.clone(),
            edges: self.edges.iter().map(|&(x, y)| (y, x)).collect(),
        }
    }

    /// Graph whose edges are the paths of length two in `self`.
    pub fn two_step(&self) -> Self {
        let mut edges = BTreeSet::new();
        for &(x, y) in &self.edges {
            for z in self.neighbors(y).expect("edge endpoints are valid") {
                edges.insert((x, z));
            }
        }
        QuantumLabeledGraph {
            nodes: self.nodes.clone(),
            edges,
        }
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let t = self.transpose();
        let mut stats = DegreeStats::default();
        for x in 0..self.num_nodes() {
            let out = self.neighbors(x).expect("valid node");
            let inn = t.neighbors(x).expect("valid node");
            let closed = inn.len() + usize::from(!inn.contains(&x));
            stats.max_out = stats.max_out.max(out.len());
            stats.max_in = stats.max_in.max(inn.len());
            stats.max_closed_in = stats.max_closed_in.max(closed);
        }
        stats
    }
}

/// Maximum neighborhood sizes: `|N_x|`, `|N^T_x|` and `|N^T_x ∪ {x}|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DegreeStats {
    pub max_out: usize,
    pub max_in: usize,
    pub max_closed_in: usize,
}

impl DegreeStats {
    /// Layer budget `deg²` with `deg = max |N^T_x ∪ {x}|`.
    pub fn layer_bound(&self) -> usize {
        self.max_closed_in * self.max_closed_in
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub assignment: Vec<usize>,
    pub num_colors: usize,
}

impl Coloring {
    /// Items grouped by color, each group ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_colors];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Whether equally colored supports are pairwise disjoint.
    pub fn is_proper(&self, supports: &[Support]) -> bool {
        self.classes().iter().all(|class| {
            class.iter().enumerate().all(|(k, &i)| {
                class[k + 1..].iter().all(|&j| !supports[i].intersects(&supports[j]))
            })
        })
    }
}

/// Greedy coloring of the support-intersection conflict graph: items in
/// ascending order, each takes the lowest color unused by earlier conflicting
/// items.
pub fn conflict_coloring(supports: &[Support]) -> Coloring {
    let mut assignment: Vec<usize> = Vec::with_capacity(supports.len());
    let mut num_colors = 0;
    for (i, s) in supports.iter().enumerate() {
        let taken: BTreeSet<usize> = (0..i)
            .filter(|&j| supports[j].intersects(s))
            .map(|j| assignment[j])
            .collect();
        let color = (0..).find(|c| !taken.contains(c)).expect("unbounded range");
        num_colors = num_colors.max(color + 1);
        assignment.push(color);
    }
    Coloring {
        assignment,
        num_colors,
    }
}

/// Largest number of other supports any support intersects.
pub fn max_conflict_degree(supports: &[Support]) -> usize {
    (0..supports.len())
        .map(|i| {
            (0..supports.len())
                .filter(|&j| j != i && supports[i].intersects(&supports[j]))
                .count()
        })
        .max()
        .unwrap_or(0)
}

/// Colors torus nodes by the parity of their coordinates: `2^n` colors.
///
/// Nodes are numbered mixed-radix over `axes` with axis 0 most significant;
/// the color is the parity vector read the same way. Every axis length must
/// be even so that parity classes tile the torus.
pub fn offset_coloring(axes: &[usize]) -> Result<Coloring> {
    if axes.is_empty() {
        return Err(Error::InvalidSchedule("torus needs at least one axis".into()));
    }
    if let Some(l) = axes.iter().find(|&&l| l % 2 != 0 || l == 0) {
        return Err(Error::InvalidSchedule(format!(
            "offset schedule needs even axis lengths, got {l}"
        )));
    }
    let total: usize = axes.iter().product();
    let assignment = (0..total)
        .map(|mut idx| {
            let mut color = 0;
            let mut bit = 1;
            for &l in axes.iter().rev() {
                color += bit * ((idx % l) % 2);
                idx /= l;
                bit *= 2;
            }
            color
        })
        .collect();
    Ok(Coloring {
        assignment,
        num_colors: 1 << axes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighborhoods() {
        let g = QuantumLabeledGraph::ring(3, 2, &[-1]).unwrap();
        assert_eq!(g.neighbors(0).unwrap(), vec![2]);
        let g = QuantumLabeledGraph::new(vec![NodeLabel::new(2, 0)], [(0, 0)]).unwrap();
        assert_eq!(g.neighborhood(0).unwrap(), Support::nodes([0]));
        assert_eq!(g.neighbors(1), Err(Error::InvalidNode(1)));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            QuantumLabeledGraph::new(vec![NodeLabel::new(2, 0)], [(0, 1)]),
            Err(Error::InvalidNode(1))
        );
        assert!(matches!(
            QuantumLabeledGraph::new(vec![NodeLabel::new(2, 2)], []),
            Err(Error::InvalidQuiescent { .. })
        ));
    }

    #[test]
    fn transpose_examples() {
        let g = QuantumLabeledGraph::new(vec![NodeLabel::new(2, 0); 3], []).unwrap();
        assert_eq!(g.transpose(), g);
        let g = QuantumLabeledGraph::new(vec![NodeLabel::new(2, 0); 2], [(0, 1)]).unwrap();
        assert_eq!(g.transpose().edges().iter().copied().collect::<Vec<_>>(), vec![(1, 0)]);

        // reversing (x, x-1) on Z_4 by enumeration
        let g = QuantumLabeledGraph::ring(4, 2, &[-1]).unwrap();
        let expected: BTreeSet<(usize, usize)> = g.edges().iter().map(|&(x, y)| (y, x)).collect();
        let t = g.transpose();
        assert_eq!(t.edges(), &expected);
        for x in 0..4 {
            assert_eq!(t.neighbors(x).unwrap(), vec![(x + 1) % 4]);
        }
        assert_eq!(t.transpose(), g);
    }

    #[test]
    fn degree_stats_examples() {
        let g = QuantumLabeledGraph::ring(4, 2, &[1]).unwrap();
        assert_eq!(
            g.degree_stats(),
            DegreeStats { max_out: 1, max_in: 1, max_closed_in: 2 }
        );
        let g = QuantumLabeledGraph::ring(4, 2, &[0, 1]).unwrap();
        assert_eq!(
            g.degree_stats(),
            DegreeStats { max_out: 2, max_in: 2, max_closed_in: 2 }
        );
    }

    #[test]
    fn two_step_composes_paths() {
        let g = QuantumLabeledGraph::ring(5, 2, &[0, 1]).unwrap();
        let g2 = g.two_step();
        assert_eq!(g2.neighbors(0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn greedy_coloring_examples() {
        let disjoint: Vec<Support> = (0..4).map(|x| Support::nodes([x])).collect();
        assert_eq!(conflict_coloring(&disjoint).num_colors, 1);

        let ring: Vec<Support> = (0..4).map(|x| Support::nodes([x, (x + 1) % 4])).collect();
        let col = conflict_coloring(&ring);
        assert_eq!(col.assignment, vec![0, 1, 0, 1]);
        assert!(col.is_proper(&ring));
        // brute force: no proper 1-coloring exists
        assert!(!Coloring { assignment: vec![0; 4], num_colors: 1 }.is_proper(&ring));
        assert!(conflict_coloring(&[]).assignment.is_empty());
    }

    #[test]
    fn offset_coloring_on_2d_torus() {
        let col = offset_coloring(&[2, 2]).unwrap();
        assert_eq!(col.num_colors, 4);
        assert_eq!(col.assignment, vec![0, 1, 2, 3]);
        let col = offset_coloring(&[4]).unwrap();
        assert_eq!(col.assignment, vec![0, 1, 0, 1]);
        assert!(offset_coloring(&[3]).is_err());
    }
}
