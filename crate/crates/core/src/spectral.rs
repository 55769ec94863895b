//! Spectral synthesis: `W = Π_j X(|λ_j>) V(λ_j) X(|λ_j>)^†`, where `X`
//! prepares an eigenvector from the fiducial state and `V` applies a phase
//! to the fiducial state only.
//!
//! The fiducial state is `|d-1>` for one qudit and `|d-1,d-1>` for two.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Result, SynthError};
use crate::graph::CouplingGraph;
use crate::linalg::{givens_matrix, is_trivial_angle, wrap_angle, GivensGate, Unitary};
use crate::multi::{level_swap, Circuit, TwoQuditSchedule};
use crate::schedule::{Schedule, System};
use crate::single::{diag_solve, lower_on_graph, INPUT_UNITARY_TOL};

/// A normalized pure state of one qudit.
///
/// When `c_{d-1} ≠ 0` its phase is normalized to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditState {
    amplitudes: Vec<Complex64>,
}

impl QuditState {
    /// Accepts amplitudes of unit norm (within 1e-12).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(SynthError::InvalidState(format!("norm {norm} differs from 1")));
        }
        Self::normalized(amplitudes)
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(SynthError::InvalidState(
                "a qudit state needs at least two levels".into(),
            ));
        }
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(SynthError::InvalidState(
                "amplitudes are zero or non-finite".into(),
            ));
        }
        let last = *amplitudes.last().expect("d >= 2");
        let phase = if last.norm() > 0.0 {
            last.conj() / last.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        amplitudes.iter_mut().for_each(|c| *c *= phase / norm);
        Ok(QuditState { amplitudes })
    }

    pub fn basis(d: usize, k: usize) -> Self {
        let mut a = vec![Complex64::new(0.0, 0.0); d];
        a[k] = Complex64::new(1.0, 0.0);
        QuditState { amplitudes: a }
    }

    pub fn d(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// One factor `U_{k,d-1}(γ_k, φ_k)` of the state-preparation product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrepAngle {
    pub k: usize,
    pub gamma: f64,
    pub phi: f64,
}

impl PrepAngle {
    pub fn gate(&self, d: usize) -> GivensGate {
        GivensGate::new(self.k, d - 1, self.gamma, self.phi)
    }
}

/// Angles with `U_{0,d-1}(γ_0,φ_0) ⋯ U_{d-2,d-1}(γ_{d-2},φ_{d-2}) |d-1> = |ψ>`,
/// listed for `k = d-2` down to `0`, which is also the application order.
///
/// The amplitudes satisfy `c_k = -i e^{iφ_k} sin γ_k Π_{l>k} cos γ_l`.
/// Each `γ_k` is computed as `atan2(|c_k|, ‖(c_0, …, c_{k-1}, c_{d-1})‖)`,
/// which equals the recursion's value without dividing by the running
/// cosine product.
pub fn state_prep_angles(psi: &QuditState) -> Vec<PrepAngle> {
    let c = psi.amplitudes();
    let d = c.len();
    // tail[k] = ‖(c_0..c_{k-1}, c_{d-1})‖²
    let mut tail = vec![c[d - 1].norm_sqr(); d];
    for k in 1..d {
        tail[k] = tail[k - 1] + c[k - 1].norm_sqr();
    }
    (0..d - 1)
        .rev()
        .map(|k| {
            let gamma = c[k].norm().atan2(tail[k].sqrt());
            let phi = if c[k].norm() > 0.0 {
                c[k].arg() + FRAC_PI_2
            } else {
                FRAC_PI_2
            };
            PrepAngle { k, gamma, phi }
        })
        .collect()
}

/// The unitary `X(|ψ>)` from [`state_prep_angles`].
pub fn state_prep_unitary(psi: &QuditState) -> Result<Unitary> {
    let d = psi.d();
    let mut u = Unitary::identity(d);
    for a in state_prep_angles(psi) {
        u = &givens_matrix(d, &a.gate(d))? * &u;
    }
    Ok(u)
}

/// Eigenphases in `[0, 2π)` with orthonormal eigenvectors.
pub fn spectral_factors(w: &Unitary) -> Result<Vec<(f64, DVector<Complex64>)>> {
    let deviation = w.unitarity_deviation();
    if deviation > INPUT_UNITARY_TOL {
        return Err(SynthError::NotUnitary { deviation });
    }
    let n = w.dim();
    let (q, t) = w.matrix().clone().schur().unpack();
    let factors: Vec<(f64, DVector<Complex64>)> = (0..n)
        .map(|j| (wrap_angle(t[(j, j)].arg()), q.column(j).into_owned()))
        .collect();
    let mut rebuilt = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for (lambda, v) in &factors {
        rebuilt += v * v.adjoint() * Complex64::from_polar(1.0, *lambda);
    }
    let residual = (rebuilt - w.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual > 1e-10 {
        return Err(SynthError::Numerical(format!(
            "spectral reconstruction residual {residual:.3e}"
        )));
    }
    Ok(factors)
}

/// A single interaction conjugated by target rotations on `(j, d-1)`:
/// `(1⊗U(γ/2+π, φ)) · INT(π) · (1⊗U(-γ/2+π, φ))`.
///
/// Controlled on `|d-1>` this applies `U_{j,d-1}(γ,φ)·(I - 2|d-1><d-1|)`
/// to the target. The extra reflection cannot be removed with one
/// interaction: it is what gives the controlled block the spectrum of a
/// single phase flip. For the fiducial column it is harmless, see
/// [`controlled_state_map`].
pub fn controlled_rotation_circuit(d: usize, j: usize, gamma: f64, phi: f64) -> Result<Circuit> {
    if j + 1 >= d {
        return Err(SynthError::IndexOutOfRange {
            index: j,
            bound: d - 1,
        });
    }
    let before = givens_matrix(d, &GivensGate::new(j, d - 1, -gamma / 2.0 + PI, phi))?;
    let after = givens_matrix(d, &GivensGate::new(j, d - 1, gamma / 2.0 + PI, phi))?;
    let mut c = Circuit::new(d);
    c.target(before).int(PI).target(after);
    Ok(c)
}

pub fn controlled_rotation(
    d: usize,
    j: usize,
    gamma: f64,
    phi: f64,
    g: &CouplingGraph,
) -> Result<TwoQuditSchedule> {
    controlled_rotation_circuit(d, j, gamma, phi)?.lower(g)
}

/// A circuit acting as the identity unless the control is `|d-1>`, and
/// sending `|d-1,d-1>` to `|d-1>⊗|ψ>`.
///
/// Each state-preparation factor uses [`controlled_rotation_circuit`] with
/// `(π-γ_k, φ_k+π)`; on the target's `|d-1>` component this equals
/// `U_{k,d-1}(γ_k, φ_k)` exactly. Factors with `γ_k = 0` are skipped.
pub fn controlled_state_map_circuit(psi: &QuditState) -> Result<Circuit> {
    let d = psi.d();
    let mut c = Circuit::new(d);
    for a in state_prep_angles(psi) {
        if a.gamma == 0.0 {
            continue;
        }
        c.then(&controlled_rotation_circuit(d, a.k, PI - a.gamma, a.phi + PI)?);
    }
    Ok(c)
}

pub fn controlled_state_map(psi: &QuditState, g: &CouplingGraph) -> Result<TwoQuditSchedule> {
    controlled_state_map_circuit(psi)?.lower(g)
}

/// Prepares a two-qudit state from `|d-1,d-1>`.
///
/// Writing `|λ> = Σ_m |m>⊗v_m`, a control rotation first prepares
/// `Σ_m ‖v_m‖ e^{iα_m} |m, d-1>` with `α_m = arg v_m[d-1]`; then each
/// branch is moved to control `|d-1>`, mapped to `v_m/(‖v_m‖e^{iα_m})` by
/// [`controlled_state_map_circuit`] and moved back.
pub fn two_qudit_prep_circuit(d: usize, lambda: &DVector<Complex64>) -> Result<Circuit> {
    if lambda.len() != d * d {
        return Err(SynthError::DimensionMismatch {
            expected: d * d,
            found: lambda.len(),
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    let branches: Vec<Vec<Complex64>> = (0..d)
        .map(|m| lambda.rows(d * m, d).iter().copied().collect())
        .collect();
    let weights: Vec<Complex64> = branches
        .iter()
        .map(|v| {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let last = v[d - 1];
            let phase = if last.norm() > 0.0 {
                last / last.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            phase * norm
        })
        .collect();
    let mut c = Circuit::new(d);
    c.local(0, state_prep_unitary(&QuditState::normalized(weights.clone())?)?);
    for m in 0..d {
        if weights[m] == zero || weights[m].norm() < 1e-15 {
            continue;
        }
        let branch: Vec<Complex64> = branches[m].iter().map(|z| z / weights[m]).collect();
        let map = controlled_state_map_circuit(&QuditState::normalized(branch)?)?;
        if map.stages().is_empty() {
            continue;
        }
        let swap = level_swap(d, m, d - 1);
        c.local(0, swap.clone()).then(&map).local(0, swap);
    }
    Ok(c)
}

/// Compiles `w` through its spectral decomposition.
///
/// One qudit: each factor is the routed state-preparation chain, a
/// diagonal-solve phase on `|d-1>`, and the inverse chain. Two qudits: the
/// fiducial phase is a single interaction pulse of angle `λ_j`.
pub fn spectral_synthesize(w: &Unitary, system: System, g: &CouplingGraph) -> Result<Schedule> {
    if w.dim() != system.dim() {
        return Err(SynthError::DimensionMismatch {
            expected: system.dim(),
            found: w.dim(),
        });
    }
    if g.d() != system.d {
        return Err(SynthError::DimensionMismatch {
            expected: system.d,
            found: g.d(),
        });
    }
    if !g.is_connected() {
        return Err(SynthError::DisconnectedGraph);
    }
    let d = system.d;
    let mut out = Schedule::new(system);
    for (idx, (lambda, v)) in spectral_factors(w)?.into_iter().enumerate() {
        if is_trivial_angle(lambda) {
            continue;
        }
        let prep = match system.n_qudits {
            1 => {
                let psi = QuditState::normalized(v.iter().copied().collect())?;
                let mut s = Schedule::new(system);
                for a in state_prep_angles(&psi).into_iter().filter(|a| a.gamma != 0.0) {
                    s.extend(
                        lower_on_graph(&a.gate(d), g)?,
                        &format!("eigvec {idx} prep U({},{})", a.k, d - 1),
                    )?;
                }
                s
            }
            2 => two_qudit_prep_circuit(d, &v)?.lower(g)?,
            n => {
                return Err(SynthError::InvalidPulse(format!(
                    "spectral synthesis on {n} qudits"
                )));
            }
        };
        out.append(&prep.inverse())?;
        if system.n_qudits == 1 {
            let mut phases = vec![0.0; d];
            phases[d - 1] = lambda;
            let tree = g.spanning_tree(d - 1)?;
            let solve = diag_solve(&phases, &tree)?;
            out.extend(
                solve.pulses(g.capabilities()),
                &format!("eigval {idx} phase {lambda:.6}"),
            )?;
            out.global_phase += solve.residual_global_phase;
        } else {
            out.push(
                crate::linalg::Pulse::int(lambda),
                format!("eigval {idx} phase {lambda:.6}"),
            )?;
        }
        out.append(&prep)?;
    }
    Ok(out)
}
