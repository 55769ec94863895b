//! Coupling graphs over the basis states of a single qudit.
//!
//! An edge `(j, k)` means the `x`/`y` Hamiltonians coupling `|j>` and `|k>`
//! are physically available. Connectivity of this graph is exactly the
//! condition for exact single-qudit universality, and a spanning tree with a
//! suitable node numbering drives the column-by-column QR elimination.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Result, SynthError};

/// Hardware capabilities shared by every edge of a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Capabilities {
    /// `x` and `y` couplings on one edge can be driven at the same time,
    /// so any equatorial rotation is a single pulse.
    pub simultaneous_xy: bool,
    /// `z` couplings are available directly instead of by conjugation.
    pub direct_z: bool,
}

impl Capabilities {
    pub const fn new(simultaneous_xy: bool, direct_z: bool) -> Self {
        Capabilities {
            simultaneous_xy,
            direct_z,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingGraph {
    d: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    caps: Capabilities,
}

impl CouplingGraph {
    /// Builds a graph on nodes `0..d`. Edges may be given in either
    /// orientation; self-loops, out-of-range endpoints and duplicates are
    /// rejected.
    pub fn new<I>(d: usize, edges: I, caps: Capabilities) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if d < 2 {
            return Err(SynthError::InvalidGraph(format!(
                "qudit dimension must be at least 2, got {d}"
            )));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= d || b >= d {
                return Err(SynthError::IndexOutOfRange {
                    index: a.max(b),
                    bound: d,
                });
            }
            if a == b {
                return Err(SynthError::InvalidGraph(format!("self-loop on node {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(SynthError::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
        }
        let mut adjacency = vec![Vec::new(); d];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(CouplingGraph {
            d,
            edges: set,
            adjacency,
            caps,
        })
    }

    /// The eight-level hyperfine ground manifold of rubidium-87 with its
    /// Raman-allowed couplings. Simultaneous `x`/`y` driving is available,
    /// direct `z` couplings are not.
    pub fn rb87() -> Self {
        Self::new(
            8,
            [(0, 5), (0, 6), (0, 7), (1, 4), (1, 6), (2, 3), (2, 4), (2, 5)],
            Capabilities::new(true, false),
        )
        .expect("rb87 preset is valid")
    }

    /// Path `0 - 1 - ... - (d-1)`.
    pub fn path(d: usize) -> Result<Self> {
        Self::new(d, (1..d).map(|k| (k - 1, k)), Capabilities::new(true, false))
    }

    /// All `d(d-1)/2` pairs coupled.
    pub fn complete(d: usize) -> Result<Self> {
        let edges: Vec<_> = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
        Self::new(d, edges, Capabilities::new(true, false))
    }

    /// Resolves the preset names `rb87`, `path-<d>` and `complete-<d>`.
    pub fn preset(name: &str) -> Result<Self> {
        let unknown = || SynthError::UnknownPreset(name.to_string());
        if name == "rb87" {
            return Ok(Self::rb87());
        }
        let (kind, d) = name.rsplit_once('-').ok_or_else(unknown)?;
        let d: usize = d.parse().map_err(|_| unknown())?;
        match kind {
            "path" => Self::path(d),
            "complete" => Self::complete(d),
            _ => Err(unknown()),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn capabilities(&self) -> Capabilities {
        self.caps
    }

    pub fn with_capabilities(mut self, caps: Capabilities) -> Self {
        self.caps = caps;
        self
    }

    /// Edges as `(low, high)` pairs in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Sorted neighbours of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node < self.d {
            Ok(())
        } else {
            Err(SynthError::IndexOutOfRange {
                index: node,
                bound: self.d,
            })
        }
    }

    /// Breadth-first predecessor map from `source`; `None` marks unreachable
    /// nodes and the source itself.
    fn bfs(&self, source: usize) -> (Vec<Option<usize>>, Vec<bool>) {
        let mut pred = vec![None; self.d];
        let mut seen = vec![false; self.d];
        let mut queue = VecDeque::from([source]);
        seen[source] = true;
        while let Some(n) = queue.pop_front() {
            for &m in &self.adjacency[n] {
                if !seen[m] {
                    seen[m] = true;
                    pred[m] = Some(n);
                    queue.push_back(m);
                }
            }
        }
        (pred, seen)
    }

    pub fn is_connected(&self) -> bool {
        self.bfs(0).1.into_iter().all(|s| s)
    }

    /// Whether the subgraph induced on `nodes` is connected. The empty set
    /// counts as connected.
    pub fn induces_connected(&self, nodes: &[usize]) -> bool {
        let Some(&start) = nodes.first() else {
            return true;
        };
        let mut inside = vec![false; self.d];
        for &n in nodes {
            inside[n] = true;
        }
        let mut seen = vec![false; self.d];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(n) = stack.pop() {
            for &m in &self.adjacency[n] {
                if inside[m] && !seen[m] {
                    seen[m] = true;
                    count += 1;
                    stack.push(m);
                }
            }
        }
        count == nodes.len()
    }

    /// A minimal-length path from `from` to `to`, both endpoints included.
    /// Neighbours are explored in index order, so the result is deterministic.
    pub fn shortest_path(&self, from: usize, to: usize) -> Result<Vec<usize>> {
        self.check_node(from)?;
        self.check_node(to)?;
        let (pred, seen) = self.bfs(from);
        if !seen[to] {
            return Err(SynthError::DisconnectedGraph);
        }
        let mut path = vec![to];
        let mut cur = to;
        while let Some(p) = pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(path)
    }

    /// Graph distance between two nodes.
    pub fn distance(&self, from: usize, to: usize) -> Result<usize> {
        Ok(self.shortest_path(from, to)?.len() - 1)
    }

    /// Builds a breadth-first spanning tree rooted at `root` and numbers its
    /// nodes by repeatedly deleting the lowest-indexed leaf. The root is
    /// deleted last, so it carries the highest number.
    pub fn spanning_tree(&self, root: usize) -> Result<SpanningTree> {
        self.check_node(root)?;
        let (pred, seen) = self.bfs(root);
        if !seen.iter().all(|&s| s) {
            return Err(SynthError::DisconnectedGraph);
        }
        let mut children = vec![0usize; self.d];
        for p in pred.iter().flatten() {
            children[*p] += 1;
        }
        let mut alive = vec![true; self.d];
        let mut deletion = Vec::with_capacity(self.d);
        while deletion.len() + 1 < self.d {
            let leaf = (0..self.d)
                .find(|&n| alive[n] && n != root && children[n] == 0)
                .expect("a tree with two or more nodes has a non-root leaf");
            alive[leaf] = false;
            deletion.push(leaf);
            if let Some(p) = pred[leaf] {
                children[p] -= 1;
            }
        }
        deletion.push(root);
        deletion.reverse();
        SpanningTree::new(self, pred, deletion)
    }
}

/// A rooted spanning tree together with an elimination order.
///
/// `order[0]` is the root; `order[i]` is the pivot of the `i`-th column
/// eliminated by the QR reduction. In the leaf-deletion numbering, node
/// `order[i]` carries number `d - i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    root: usize,
    parent: Vec<Option<usize>>,
    order: Vec<usize>,
    position: Vec<usize>,
}

impl SpanningTree {
    /// Validates that `parent` describes a spanning tree of `graph` whose
    /// root is `order[0]`, and that `order` is a permutation of the nodes.
    pub fn new(graph: &CouplingGraph, parent: Vec<Option<usize>>, order: Vec<usize>) -> Result<Self> {
        let d = graph.d();
        if parent.len() != d {
            return Err(SynthError::DimensionMismatch {
                expected: d,
                found: parent.len(),
            });
        }
        if order.len() != d {
            return Err(SynthError::DimensionMismatch {
                expected: d,
                found: order.len(),
            });
        }
        let mut position = vec![usize::MAX; d];
        for (i, &n) in order.iter().enumerate() {
            graph.check_node(n)?;
            if position[n] != usize::MAX {
                return Err(SynthError::InvalidGraph(format!(
                    "node {n} repeated in elimination order"
                )));
            }
            position[n] = i;
        }
        let root = order[0];
        for (n, p) in parent.iter().enumerate() {
            match (*p, n == root) {
                (None, true) => {}
                (Some(_), true) => {
                    return Err(SynthError::InvalidGraph(format!("root {root} has a parent")));
                }
                (None, false) => {
                    return Err(SynthError::InvalidGraph(format!("node {n} has no parent")));
                }
                (Some(p), false) => {
                    graph.check_node(p)?;
                    if !graph.has_edge(n, p) {
                        return Err(SynthError::InvalidGraph(format!(
                            "tree edge ({n}, {p}) is not a graph edge"
                        )));
                    }
                }
            }
        }
        // Every node must reach the root in fewer than d steps.
        for start in 0..d {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = parent[cur] {
                cur = p;
                steps += 1;
                if steps > d {
                    return Err(SynthError::InvalidGraph("parent map contains a cycle".into()));
                }
            }
            if cur != root {
                return Err(SynthError::InvalidGraph(format!(
                    "node {start} does not reach the root"
                )));
            }
        }
        Ok(SpanningTree {
            root,
            parent,
            order,
            position,
        })
    }

    /// The tree and logical ordering `{7,0,6,5,3,2,4,1}` used for the
    /// rubidium-87 preset: the graph with edge `(6,1)` removed, rooted at 7.
    pub fn rb87() -> Self {
        let g = CouplingGraph::rb87();
        let mut parent = vec![None; 8];
        for (child, p) in [(0, 7), (5, 0), (6, 0), (2, 5), (3, 2), (4, 2), (1, 4)] {
            parent[child] = Some(p);
        }
        Self::new(&g, parent, vec![7, 0, 6, 5, 3, 2, 4, 1]).expect("rb87 tree is valid")
    }

    pub fn d(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    /// Elimination order, root first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Position of `node` in the elimination order.
    pub fn position(&self, node: usize) -> usize {
        self.position[node]
    }

    /// Leaf-deletion number of `node`: 1 for the first deleted leaf, `d` for
    /// the root.
    pub fn number(&self, node: usize) -> usize {
        self.d() - self.position[node]
    }

    /// Tree edges as `(child, parent)`, sorted by child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (c, p)))
            .collect()
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.parent[a] == Some(b) || self.parent[b] == Some(a)
    }

    /// Nodes on the tree path from the root down to `node`.
    pub fn path_from_root(&self, node: usize) -> Vec<usize> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// The numbering property: the tree path from the root to any node `j`
    /// passes through no node numbered lower than `j`.
    pub fn satisfies_numbering_property(&self) -> bool {
        (0..self.d()).all(|j| {
            self.path_from_root(j)
                .iter()
                .all(|&n| self.number(n) >= self.number(j))
        })
    }

    /// Whether every suffix `order[i..]` induces a connected subgraph of
    /// `graph`, so that each column can be eliminated with direct edges only.
    pub fn suffixes_connected(&self, graph: &CouplingGraph) -> bool {
        (0..self.d()).all(|i| graph.induces_connected(&self.order[i..]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Capabilities {
        Capabilities::new(true, false)
    }

    #[test]
    fn rb87_is_connected() {
        let g = CouplingGraph::rb87();
        assert_eq!(g.d(), 8);
        assert_eq!(g.edge_count(), 8);
        assert!(g.is_connected());
    }

    #[test]
    fn empty_and_split_graphs_are_disconnected() {
        assert!(!CouplingGraph::new(3, [], caps()).unwrap().is_connected());
        assert!(!CouplingGraph::new(4, [(0, 1), (2, 3)], caps())
            .unwrap()
            .is_connected());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            CouplingGraph::new(3, [(1, 1)], caps()),
            Err(SynthError::InvalidGraph(_))
        ));
        assert!(matches!(
            CouplingGraph::new(3, [(0, 3)], caps()),
            Err(SynthError::IndexOutOfRange { index: 3, bound: 3 })
        ));
        assert!(matches!(
            CouplingGraph::new(3, [(0, 1), (1, 0)], caps()),
            Err(SynthError::InvalidGraph(_))
        ));
        assert!(CouplingGraph::new(1, [], caps()).is_err());
    }

    #[test]
    fn presets() {
        let p = CouplingGraph::preset("path-3").unwrap();
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(CouplingGraph::preset("complete-4").unwrap().edge_count(), 6);
        assert_eq!(CouplingGraph::preset("rb87").unwrap(), CouplingGraph::rb87());
        assert!(matches!(
            CouplingGraph::preset("ring-5"),
            Err(SynthError::UnknownPreset(_))
        ));
        assert!(matches!(
            CouplingGraph::preset("path-x"),
            Err(SynthError::UnknownPreset(_))
        ));
    }

    #[test]
    fn path_graph_tree() {
        let g = CouplingGraph::path(3).unwrap();
        let t = g.spanning_tree(2).unwrap();
        assert_eq!(t.parent(0), Some(1));
        assert_eq!(t.parent(1), Some(2));
        assert_eq!(t.parent(2), None);
        assert_eq!(t.order(), &[2, 1, 0]);
        assert_eq!(t.number(0), 1);
        assert!(t.satisfies_numbering_property());
    }

    #[test]
    fn star_tree_numbers_leaves_first() {
        let g = CouplingGraph::new(4, [(0, 1), (0, 2), (0, 3)], caps()).unwrap();
        let t = g.spanning_tree(0).unwrap();
        assert_eq!(t.order(), &[0, 3, 2, 1]);
        assert_eq!(t.number(0), 4);
        assert!(t.satisfies_numbering_property());
    }

    #[test]
    fn spanning_tree_of_disconnected_graph_fails() {
        let g = CouplingGraph::new(4, [(0, 1), (2, 3)], caps()).unwrap();
        assert_eq!(g.spanning_tree(3), Err(SynthError::DisconnectedGraph));
    }

    #[test]
    fn rb87_reference_tree() {
        let g = CouplingGraph::rb87();
        let t = SpanningTree::rb87();
        assert_eq!(t.root(), 7);
        assert_eq!(t.edges().len(), 7);
        assert!(!t.contains_edge(6, 1));
        assert!(t.edges().iter().all(|&(a, b)| g.has_edge(a, b)));
        assert_eq!(t.number(1), 1);
        assert_eq!(t.number(7), 8);
        // The logical ordering keeps every remaining node set connected in
        // the full graph, although it does not satisfy the numbering
        // property on this particular tree (path 7-0-5-2-3 visits 2 < 3).
        assert!(t.suffixes_connected(&g));
        assert!(!t.satisfies_numbering_property());
    }

    #[test]
    fn rb87_without_61_edge_has_a_valid_numbering() {
        let g = CouplingGraph::new(
            8,
            [(0, 5), (0, 6), (0, 7), (1, 4), (2, 3), (2, 4), (2, 5)],
            caps(),
        )
        .unwrap();
        let t = g.spanning_tree(7).unwrap();
        assert_eq!(t.order()[7], 1, "node 1 is deleted first");
        assert_eq!(t.order()[0], 7);
        assert!(t.satisfies_numbering_property());
    }

    #[test]
    fn shortest_paths() {
        let g = CouplingGraph::rb87();
        assert_eq!(g.shortest_path(7, 0).unwrap(), vec![7, 0]);
        assert_eq!(g.shortest_path(4, 4).unwrap(), vec![4]);
        assert_eq!(g.shortest_path(7, 3).unwrap(), vec![7, 0, 5, 2, 3]);
        assert_eq!(g.distance(7, 3).unwrap(), 4);
        assert!(matches!(
            g.shortest_path(7, 8),
            Err(SynthError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn tree_validation() {
        let g = CouplingGraph::path(3).unwrap();
        // (0, 2) is not an edge.
        assert!(SpanningTree::new(&g, vec![Some(2), Some(2), None], vec![2, 1, 0]).is_err());
        // Root with a parent.
        assert!(SpanningTree::new(&g, vec![Some(1), Some(2), Some(1)], vec![2, 1, 0]).is_err());
        // Repeated node in order.
        assert!(SpanningTree::new(&g, vec![Some(1), Some(2), None], vec![2, 1, 1]).is_err());
        // Valid tree, order that breaks suffix connectivity.
        let t = SpanningTree::new(&g, vec![Some(1), None, Some(1)], vec![1, 0, 2]).unwrap();
        assert!(!t.suffixes_connected(&g));
    }
}
