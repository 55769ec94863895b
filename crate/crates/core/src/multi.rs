//! Two-qudit constructions from the phase interaction: controlled
//! transpositions, the controlled increment, controlled single-qudit
//! unitaries, and the entangling test for diagonal couplings.
//!
//! Constructions are first assembled as a [`Circuit`] of exact local
//! unitaries and interaction stages; [`Circuit::lower`] then compiles every
//! local stage to pulses with single-qudit synthesis on the coupling graph.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SynthError};
use crate::graph::{CouplingGraph, SpanningTree};
use crate::linalg::{embed_block, GivensGate, Mat2, Pulse, StatePair, Unitary};
use crate::schedule::{Schedule, System};
use crate::single::{qr_reduce, synthesize_single};

/// Schedules on two qudits share the single-qudit schedule type.
pub type TwoQuditSchedule = Schedule;

/// One step of a two-qudit circuit.
#[derive(Clone, Debug, PartialEq)]
pub enum Stage {
    /// A `d×d` unitary on one qudit (0 = control, 1 = target).
    Local { qudit: usize, op: Unitary },
    /// `exp(-i H_int θ/ħΩ)`: phase `e^{iθ}` on `|d-1,d-1>`.
    Int { angle: f64 },
}

/// A two-qudit circuit of exact stages, first stage applied first.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    d: usize,
    stages: Vec<Stage>,
}

impl Circuit {
    pub fn new(d: usize) -> Self {
        Circuit {
            d,
            stages: Vec::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn int_count(&self) -> usize {
        self.stages
            .iter()
            .filter(|s| matches!(s, Stage::Int { .. }))
            .count()
    }

    /// Appends a local stage; consecutive stages on the same qudit merge.
    pub fn local(&mut self, qudit: usize, op: Unitary) -> &mut Self {
        assert_eq!(op.dim(), self.d, "local stage dimension");
        if let Some(Stage::Local { qudit: q, op: prev }) = self.stages.last_mut() {
            if *q == qudit {
                *prev = &op * prev;
                return self;
            }
        }
        self.stages.push(Stage::Local { qudit, op });
        self
    }

    pub fn target(&mut self, op: Unitary) -> &mut Self {
        self.local(1, op)
    }

    pub fn int(&mut self, angle: f64) -> &mut Self {
        self.stages.push(Stage::Int { angle });
        self
    }

    pub fn then(&mut self, other: &Circuit) -> &mut Self {
        assert_eq!(other.d, self.d, "circuit dimension");
        for s in &other.stages {
            match s {
                Stage::Local { qudit, op } => self.local(*qudit, op.clone()),
                Stage::Int { angle } => self.int(*angle),
            };
        }
        self
    }

    /// The exact `d²×d²` product of all stages.
    pub fn matrix(&self) -> Unitary {
        let d = self.d;
        let id = Unitary::identity(d);
        let mut acc = Unitary::identity(d * d);
        for s in &self.stages {
            let step = match s {
                Stage::Local { qudit: 0, op } => op.kron(&id),
                Stage::Local { op, .. } => id.kron(op),
                Stage::Int { angle } => {
                    let mut phases = vec![0.0; d * d];
                    phases[d * d - 1] = *angle;
                    Unitary::from_phases(&phases)
                }
            };
            acc = &step * &acc;
        }
        acc
    }

    /// Compiles the circuit into pulses allowed by `g`, tracking the global
    /// phases dropped by single-qudit synthesis.
    pub fn lower(&self, g: &CouplingGraph) -> Result<Schedule> {
        if g.d() != self.d {
            return Err(SynthError::DimensionMismatch {
                expected: self.d,
                found: g.d(),
            });
        }
        let mut s = Schedule::new(System::pair(self.d));
        for (i, stage) in self.stages.iter().enumerate() {
            match stage {
                Stage::Local { qudit, op } => {
                    let local = synthesize_single(op, g)?;
                    let tag = format!("stage {i} local q{qudit}");
                    s.extend(local.schedule.pulses.iter().map(|p| p.on_qudit(*qudit)), &tag)?;
                    s.global_phase += local.schedule.global_phase;
                }
                Stage::Int { angle } => s.push(Pulse::int(*angle), format!("stage {i} int"))?,
            }
        }
        Ok(s)
    }
}

/// Permutation of levels `a` and `b` (identity when equal).
pub fn level_swap(d: usize, a: usize, b: usize) -> Unitary {
    let mut perm: Vec<usize> = (0..d).collect();
    perm.swap(a, b);
    Unitary::from_permutation(&perm)
}

fn check_level(j: usize, bound: usize) -> Result<()> {
    if j >= bound {
        Err(SynthError::IndexOutOfRange { index: j, bound })
    } else {
        Ok(())
    }
}

/// `|j,k> -> |j, k+1 mod d>` when `j = d-1`, identity otherwise.
pub fn cinc_matrix(d: usize) -> Unitary {
    let perm: Vec<usize> = (0..d * d)
        .map(|i| {
            let (j, k) = (i / d, i % d);
            if j == d - 1 {
                d * j + (k + 1) % d
            } else {
                i
            }
        })
        .collect();
    Unitary::from_permutation(&perm)
}

/// Controlled transposition of target levels `p < q`.
///
/// Target-local `P` (swapping `q` and `d-1`) moves the interaction phase to
/// `|d-1,q>`, and `W = Y(π/4)` on `(p,q)` turns the reflection `I - 2|q><q|`
/// into the transposition. One interaction stage, no residual phase.
pub fn transposition_circuit(d: usize, p: usize, q: usize) -> Result<Circuit> {
    check_level(q, d)?;
    if p >= q {
        return Err(SynthError::IndexOutOfRange { index: p, bound: q });
    }
    let perm = level_swap(d, q, d - 1);
    let w = embed_block(
        d,
        StatePair(p, q),
        &Pulse::y(StatePair(p, q), FRAC_PI_4).block().expect("y block"),
    )?;
    let mut c = Circuit::new(d);
    c.target(&perm * &w.adjoint()).int(PI).target(&w * &perm);
    Ok(c)
}

/// `Λ₁[(j j+1)]` as a lowered schedule.
pub fn lambda1_transposition(d: usize, j: usize, g: &CouplingGraph) -> Result<TwoQuditSchedule> {
    check_level(j, d.saturating_sub(1))?;
    transposition_circuit(d, j, j + 1)?.lower(g)
}

/// The controlled increment as `Λ₁(0 1) ⋯ Λ₁(d-2 d-1)`, rightmost first.
pub fn cinc_circuit(d: usize) -> Result<Circuit> {
    let mut c = Circuit::new(d);
    for j in (0..d - 1).rev() {
        c.then(&transposition_circuit(d, j, j + 1)?);
    }
    Ok(c)
}

pub fn cinc_sequence(d: usize, g: &CouplingGraph) -> Result<TwoQuditSchedule> {
    cinc_circuit(d)?.lower(g)
}

fn rz(alpha: f64) -> Mat2 {
    let z = Complex64::new(0.0, 0.0);
    Mat2::new(
        Complex64::from_polar(1.0, -alpha / 2.0),
        z,
        z,
        Complex64::from_polar(1.0, alpha / 2.0),
    )
}

fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    Mat2::new(
        Complex64::new(c, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(c, 0.0),
    )
}

/// Factors `w ∈ SU(2)` as `w = a σˣ b σˣ c` with `abc = I`, from the split
/// `w = Rz(α) Ry(θ) Rz(β)`.
pub fn abc_decompose(w: &Mat2) -> Result<(Mat2, Mat2, Mat2)> {
    let det = w.determinant();
    if (det - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
        return Err(SynthError::NotSpecialUnitary {
            re: det.re,
            im: det.im,
        });
    }
    let (w00, w10) = (w[(0, 0)], w[(1, 0)]);
    let theta = 2.0 * w10.norm().atan2(w00.norm());
    let s = if w00.norm() > 0.0 { -w00.arg() } else { 0.0 };
    let t = if w10.norm() > 0.0 { w10.arg() } else { 0.0 };
    let (alpha, beta) = (s + t, s - t);
    let a = rz(alpha) * ry(theta / 2.0);
    let b = ry(-theta / 2.0) * rz(-(alpha + beta) / 2.0);
    let c = rz((beta - alpha) / 2.0);
    Ok((a, b, c))
}

/// `Λ₁(I_j ⊕ w ⊕ I_{d-j-2})` from two controlled transpositions of
/// `(j, j+1)` and the factors of [`abc_decompose`].
pub fn lambda1_circuit(d: usize, j: usize, w: &Mat2) -> Result<Circuit> {
    check_level(j, d.saturating_sub(1))?;
    let (a, b, c) = abc_decompose(w)?;
    let pair = StatePair(j, j + 1);
    let tau = transposition_circuit(d, j, j + 1)?;
    let mut out = Circuit::new(d);
    out.target(embed_block(d, pair, &c)?)
        .then(&tau)
        .target(embed_block(d, pair, &b)?)
        .then(&tau)
        .target(embed_block(d, pair, &a)?);
    Ok(out)
}

pub fn lambda1_unitary(d: usize, j: usize, w: &Mat2, g: &CouplingGraph) -> Result<TwoQuditSchedule> {
    lambda1_circuit(d, j, w)?.lower(g)
}

/// `Λ₁(v) = I_{d²-d} ⊕ v` for an arbitrary `v ∈ U(d)`.
///
/// `v` is reduced on the path graph so every Givens factor acts on adjacent
/// levels; `v = G_1^† ⋯ G_ℓ^† T`. The diagonal `T` is applied first, one
/// interaction stage per nonzero phase, then the controlled factors.
pub fn lambda1_general_circuit(v: &Unitary) -> Result<Circuit> {
    let d = v.dim();
    let path = CouplingGraph::path(d)?;
    let tree: SpanningTree = path.spanning_tree(d - 1)?;
    let qr = qr_reduce(v, &path, &tree)?;
    let mut out = Circuit::new(d);
    for (k, &phi) in qr.residual_diagonal.iter().enumerate() {
        if crate::linalg::is_trivial_angle(phi) {
            continue;
        }
        let perm = level_swap(d, k, d - 1);
        out.target(perm.clone()).int(phi).target(perm);
    }
    for gate in qr.gates.iter().rev() {
        let inv: GivensGate = gate.inverse();
        let StatePair(a, b) = inv.pair;
        let blk = inv.block();
        let (j, w) = if a < b {
            (a, blk)
        } else {
            (b, Mat2::new(blk[(1, 1)], blk[(1, 0)], blk[(0, 1)], blk[(0, 0)]))
        };
        out.then(&lambda1_circuit(d, j, &w)?);
    }
    Ok(out)
}

pub fn synthesize_lambda1(v: &Unitary, g: &CouplingGraph) -> Result<TwoQuditSchedule> {
    lambda1_general_circuit(v)?.lower(g)
}

/// `I_{d²-d} ⊕ v`, the reference for controlled constructions.
pub fn controlled(v: &Unitary) -> Unitary {
    let d = v.dim();
    let mut m = DMatrix::identity(d * d, d * d);
    m.view_mut((d * (d - 1), d * (d - 1)), (d, d))
        .copy_from(v.matrix());
    Unitary::from_matrix_unchecked(m)
}

/// Accumulated phases `Ω_{mn} t` of a diagonal two-qudit coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalCoupling {
    pub omega: DMatrix<f64>,
}

impl DiagonalCoupling {
    pub fn new(omega: DMatrix<f64>) -> Result<Self> {
        if omega.nrows() != omega.ncols() {
            return Err(SynthError::DimensionMismatch {
                expected: omega.nrows(),
                found: omega.ncols(),
            });
        }
        Ok(DiagonalCoupling { omega })
    }

    /// The phase interaction itself: `-π` on `|d-1,d-1>` only.
    pub fn h_int(d: usize) -> Self {
        let mut omega = DMatrix::zeros(d, d);
        omega[(d - 1, d - 1)] = -PI;
        DiagonalCoupling { omega }
    }

    pub fn d(&self) -> usize {
        self.omega.nrows()
    }
}

fn wrapped_distance(x: f64) -> f64 {
    (x - TAU * (x / TAU).round()).abs()
}

/// Whether `Ω` fails to split as `α_m + β_n` modulo 2π, i.e. some quadruple
/// has `Ω_mn + Ω_pq - Ω_mq - Ω_pn` farther than `tol` from a multiple of 2π.
pub fn is_entangling_diagonal(c: &DiagonalCoupling, tol: f64) -> bool {
    let d = c.d();
    let w = &c.omega;
    (0..d).any(|m| {
        (0..d).any(|p| {
            (0..d).any(|n| {
                (0..d).any(|q| wrapped_distance(w[(m, n)] + w[(p, q)] - w[(m, q)] - w[(p, n)]) > tol)
            })
        })
    })
}
