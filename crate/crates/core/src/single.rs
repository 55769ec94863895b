//! Single-qudit synthesis: graph-constrained QR reduction to a diagonal,
//! followed by a spanning-tree solve for the diagonal phases.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SynthError};
use crate::graph::{CouplingGraph, SpanningTree};
use crate::linalg::{
    apply_block_rows, lower_givens, z_by_conjugation, GivensGate, Pulse, StatePair, Unitary,
};
use crate::schedule::{Schedule, System};

/// Entries below this magnitude are treated as already eliminated.
pub const ELIMINATION_EPS: f64 = 1e-13;

/// Inputs may drift this far from unitarity before they are rejected.
pub const INPUT_UNITARY_TOL: f64 = 1e-10;

/// Rotation parameters that move all weight of `b` onto `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GivensParams {
    pub gamma: f64,
    pub phi: f64,
    /// Both entries were zero; the rotation is the identity.
    pub degenerate: bool,
}

/// Parameters `(γ, φ)` such that the Givens block on `(kept, zeroed)` maps
/// `(a, b)` to `(r, 0)` with `|r| = sqrt(|a|² + |b|²)`.
pub fn givens_params(a: Complex64, b: Complex64) -> GivensParams {
    if a.norm() == 0.0 && b.norm() == 0.0 {
        return GivensParams {
            gamma: 0.0,
            phi: 0.0,
            degenerate: true,
        };
    }
    let gamma = b.norm().atan2(a.norm());
    let phi = std::f64::consts::FRAC_PI_2 + a.arg() - b.arg();
    GivensParams {
        gamma,
        phi,
        degenerate: false,
    }
}

/// Outcome of [`qr_reduce`]: `G_ℓ ⋯ G_1 · V = diag(e^{iφ_0}, …)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QrResult {
    /// Gates in application order.
    #[serde(serialize_with = "serialize_gates")]
    pub gates: Vec<GivensGate>,
    pub residual_diagonal: Vec<f64>,
    /// Extra edge gates needed to route eliminations on non-adjacent pairs.
    pub swap_overhead: usize,
}

fn serialize_gates<S: serde::Serializer>(gates: &[GivensGate], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(gates.len()))?;
    for g in gates {
        seq.serialize_element(&(g.pair.0, g.pair.1, g.gamma, g.phi))?;
    }
    seq.end()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Spanning forest of the subgraph induced on `alive`, preferring tree
/// edges; returned as adjacency lists.
fn column_forest(g: &CouplingGraph, tree: &SpanningTree, alive: &[bool]) -> Vec<Vec<usize>> {
    let d = g.d();
    let live = |a: usize, b: usize| alive[a] && alive[b];
    let tree_edges: BTreeSet<(usize, usize)> = tree
        .edges()
        .into_iter()
        .map(|(c, p)| (c.min(p), c.max(p)))
        .filter(|&(a, b)| live(a, b))
        .collect();
    let other: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(a, b)| live(a, b) && !tree_edges.contains(&(a, b)))
        .collect();
    let mut uf = UnionFind::new(d);
    let mut adj = vec![Vec::new(); d];
    for &(a, b) in tree_edges.iter().chain(other.iter()) {
        if uf.union(a, b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    adj
}

/// Rooted BFS over a forest component: returns `(parent, members)`.
fn root_component(adj: &[Vec<usize>], root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut parent = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut members = vec![root];
    seen[root] = true;
    let mut i = 0;
    while i < members.len() {
        let n = members[i];
        for &m in &adj[n] {
            if !seen[m] {
                seen[m] = true;
                parent[m] = Some(n);
                members.push(m);
            }
        }
        i += 1;
    }
    (parent, members)
}

struct Reducer<'a> {
    m: DMatrix<Complex64>,
    tree: &'a SpanningTree,
    gates: Vec<GivensGate>,
}

impl Reducer<'_> {
    fn eliminate(&mut self, col: usize, kept: usize, zeroed: usize) {
        let b = self.m[(zeroed, col)];
        if b.norm() < ELIMINATION_EPS {
            return;
        }
        let p = givens_params(self.m[(kept, col)], b);
        let gate = GivensGate::new(kept, zeroed, p.gamma, p.phi);
        apply_block_rows(&mut self.m, gate.pair, &gate.block());
        self.gates.push(gate);
    }

    /// Reduces the component rooted at `root` onto `root`, leaves with the
    /// lowest elimination number first.
    fn reduce_component(&mut self, col: usize, parent: &[Option<usize>], members: &[usize]) {
        let mut children = vec![0usize; parent.len()];
        for &n in members {
            if let Some(p) = parent[n] {
                children[p] += 1;
            }
        }
        let mut leaves: BTreeSet<(usize, usize)> = members
            .iter()
            .filter(|&&n| parent[n].is_some() && children[n] == 0)
            .map(|&n| (usize::MAX - self.tree.position(n), n))
            .collect();
        while let Some((_, leaf)) = leaves.pop_first() {
            let p = parent[leaf].expect("non-root leaf");
            self.eliminate(col, p, leaf);
            children[p] -= 1;
            if children[p] == 0 && parent[p].is_some() {
                leaves.insert((usize::MAX - self.tree.position(p), p));
            }
        }
    }
}

/// Reduces `v` to a diagonal with Givens rotations on graph edges.
///
/// Columns are processed in the tree's elimination order. For each column the
/// remaining rows are reduced along a spanning forest of the induced
/// subgraph; a component that does not contain the pivot is first gathered
/// onto its node nearest the pivot and then eliminated with a routed
/// rotation.
pub fn qr_reduce(v: &Unitary, g: &CouplingGraph, tree: &SpanningTree) -> Result<QrResult> {
    let d = g.d();
    if v.dim() != d {
        return Err(SynthError::DimensionMismatch {
            expected: d,
            found: v.dim(),
        });
    }
    if tree.d() != d {
        return Err(SynthError::DimensionMismatch {
            expected: d,
            found: tree.d(),
        });
    }
    if !g.is_connected() {
        return Err(SynthError::DisconnectedGraph);
    }
    let deviation = v.unitarity_deviation();
    if deviation > INPUT_UNITARY_TOL {
        return Err(SynthError::NotUnitary { deviation });
    }
    let mut r = Reducer {
        m: v.matrix().clone(),
        tree,
        gates: Vec::new(),
    };
    let mut swap_overhead = 0;
    let mut alive = vec![true; d];
    for &pivot in tree.order() {
        let adj = column_forest(g, tree, &alive);
        let (parent, members) = root_component(&adj, pivot);
        r.reduce_component(pivot, &parent, &members);
        let mut covered = vec![false; d];
        members.iter().for_each(|&n| covered[n] = true);
        for start in 0..d {
            if !alive[start] || covered[start] {
                continue;
            }
            let (_, comp) = root_component(&adj, start);
            let rep = *comp
                .iter()
                .min_by_key(|&&n| (g.distance(pivot, n).unwrap_or(usize::MAX), n))
                .expect("component is non-empty");
            let (parent, members) = root_component(&adj, rep);
            r.reduce_component(pivot, &parent, &members);
            let before = r.gates.len();
            r.eliminate(pivot, pivot, rep);
            if r.gates.len() > before {
                swap_overhead += 2 * (g.distance(pivot, rep)? - 1);
            }
            members.iter().for_each(|&n| covered[n] = true);
        }
        alive[pivot] = false;
    }
    let residual_diagonal = (0..d).map(|j| r.m[(j, j)].arg()).collect();
    Ok(QrResult {
        gates: r.gates,
        residual_diagonal,
        swap_overhead,
    })
}

/// Tree-edge rotation angles realizing a diagonal phase pattern.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseSolve {
    /// `(child, parent)` pairs, one per row of the incidence matrix.
    pub tree_edges: Vec<(usize, usize)>,
    pub theta: Vec<f64>,
    /// Phases actually realized: the input minus its mean, so they sum to
    /// zero as every `z` rotation does.
    pub target: Vec<f64>,
    /// `phases = target + residual_global_phase` componentwise.
    pub residual_global_phase: f64,
    pub rank: usize,
}

impl PhaseSolve {
    /// The phases `Mᵀθ` produced by rotating each `(child, parent)` pair
    /// by `θ`, with `+θ` on the child and `-θ` on the parent.
    pub fn realized(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.target.len()];
        for (&(c, p), &t) in self.tree_edges.iter().zip(&self.theta) {
            out[c] += t;
            out[p] -= t;
        }
        out
    }

    /// `z` pulses on the tree edges, first-applied first.
    pub fn pulses(&self, caps: crate::graph::Capabilities) -> Vec<Pulse> {
        self.tree_edges
            .iter()
            .zip(&self.theta)
            .flat_map(|(&(c, p), &t)| z_by_conjugation(StatePair(c, p), -t, caps))
            .collect()
    }
}

/// Solves for the rotation angles on the tree edges that realize `phases`
/// up to a global phase.
///
/// A product of `z` rotations is traceless in the exponent, so the phases are
/// first centred; the reduced incidence system obtained by dropping node
/// `d-1` is then square with full rank `d-1` and solved by Gaussian
/// elimination.
pub fn diag_solve(phases: &[f64], tree: &SpanningTree) -> Result<PhaseSolve> {
    let d = tree.d();
    if phases.len() != d {
        return Err(SynthError::DimensionMismatch {
            expected: d,
            found: phases.len(),
        });
    }
    let mean = phases.iter().sum::<f64>() / d as f64;
    let target: Vec<f64> = phases.iter().map(|p| p - mean).collect();
    let tree_edges = tree.edges();
    let n = d - 1;
    // Row per node 0..d-2, column per edge.
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (e, &(c, p)) in tree_edges.iter().enumerate() {
        if c < n {
            a[(c, e)] += 1.0;
        }
        if p < n {
            a[(p, e)] -= 1.0;
        }
    }
    let rhs: Vec<f64> = target[..n].to_vec();
    let (theta, rank) = gauss_solve(a, rhs);
    if rank < n {
        return Err(SynthError::SingularSystem { rank, expected: n });
    }
    Ok(PhaseSolve {
        tree_edges,
        theta,
        target,
        residual_global_phase: mean,
        rank,
    })
}

/// Gaussian elimination with partial pivoting; returns the solution and the
/// numerical rank.
fn gauss_solve(mut a: DMatrix<f64>, mut b: Vec<f64>) -> (Vec<f64>, usize) {
    let n = b.len();
    let mut rank = 0;
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let best = (rank..n).max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()));
        let Some(p) = best.filter(|&p| a[(p, col)].abs() > 1e-12) else {
            continue;
        };
        a.swap_rows(rank, p);
        b.swap(rank, p);
        for r in rank + 1..n {
            let f = a[(r, col)] / a[(rank, col)];
            if f != 0.0 {
                for c in col..n {
                    a[(r, c)] -= f * a[(rank, c)];
                }
                b[r] -= f * b[rank];
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let mut x = vec![0.0; n];
    for (row, &col) in pivots.iter().enumerate().rev() {
        let s: f64 = (col + 1..n).map(|c| a[(row, c)] * x[c]).sum();
        x[col] = (b[row] - s) / a[(row, col)];
    }
    (x, rank)
}

/// Lowers a Givens rotation onto graph edges. A rotation on a non-adjacent
/// pair `(j, k)` is conjugated by a swap chain along the shortest path
/// `j = p_0, …, p_l = k` that carries `|k>` to `|p_1>`.
pub fn lower_on_graph(gate: &GivensGate, g: &CouplingGraph) -> Result<Vec<Pulse>> {
    let StatePair(j, k) = gate.pair;
    let caps = g.capabilities();
    if g.has_edge(j, k) {
        return Ok(lower_givens(gate, caps));
    }
    let path = g.shortest_path(j, k)?;
    let swaps: Vec<GivensGate> = (2..path.len())
        .rev()
        .map(|i| GivensGate::swap(path[i - 1], path[i]))
        .collect();
    let mut gates = swaps.clone();
    gates.push(GivensGate {
        pair: StatePair(j, path[1]),
        ..*gate
    });
    gates.extend(swaps.iter().rev().map(GivensGate::inverse));
    Ok(gates.iter().flat_map(|g| lower_givens(g, caps)).collect())
}

/// Count summary of a single-qudit synthesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SingleCounts {
    pub givens_gates: usize,
    pub swap_gates: usize,
    pub diagonal_rotations: usize,
    pub pulses: usize,
}

#[derive(Clone, Debug)]
pub struct SingleQuditSynthesis {
    pub schedule: Schedule,
    pub qr: QrResult,
    pub phases: PhaseSolve,
}

impl SingleQuditSynthesis {
    pub fn counts(&self) -> SingleCounts {
        SingleCounts {
            givens_gates: self.qr.gates.len(),
            swap_gates: self.qr.swap_overhead,
            diagonal_rotations: self
                .phases
                .theta
                .iter()
                .filter(|t| !crate::linalg::is_trivial_angle(-**t))
                .count(),
            pulses: self.schedule.len(),
        }
    }
}

/// Compiles `v` into a pulse schedule using the default spanning tree rooted
/// at `d-1`.
pub fn synthesize_single(v: &Unitary, g: &CouplingGraph) -> Result<SingleQuditSynthesis> {
    if !g.is_connected() {
        return Err(SynthError::DisconnectedGraph);
    }
    let tree = g.spanning_tree(g.d() - 1)?;
    synthesize_single_with_tree(v, g, &tree)
}

/// Compiles `v` with an explicit elimination tree.
///
/// From `G_ℓ ⋯ G_1 V = T` the schedule applies the diagonal first and then
/// `G_ℓ^†, …, G_1^†`. The dropped global phase is stored on the schedule.
pub fn synthesize_single_with_tree(
    v: &Unitary,
    g: &CouplingGraph,
    tree: &SpanningTree,
) -> Result<SingleQuditSynthesis> {
    let qr = qr_reduce(v, g, tree)?;
    let phases = diag_solve(&qr.residual_diagonal, tree)?;
    let mut schedule = Schedule::new(System::single(g.d()));
    for (&(c, p), &t) in phases.tree_edges.iter().zip(&phases.theta) {
        let pulses = z_by_conjugation(StatePair(c, p), -t, g.capabilities());
        schedule.extend(pulses, &format!("diag z({c},{p}) θ={t:.6}"))?;
    }
    for gate in qr.gates.iter().rev() {
        let inv = gate.inverse();
        schedule.extend(lower_on_graph(&inv, g)?, &format!("qr {gate}^-1"))?;
    }
    schedule.global_phase = phases.residual_global_phase;
    Ok(SingleQuditSynthesis { schedule, qr, phases })
}
