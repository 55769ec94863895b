//! Dense complex matrices, the primitive pulse generators and Givens
//! rotations.
//!
//! Conventions used throughout the crate:
//!
//! * a pulse with generator `H` and dimensionless angle `θ = Ωt` evolves as
//!   `exp(-i θ H / ħΩ)`;
//! * a Givens rotation on the ordered pair `(j, k)` acts on `span{|j>, |k>}`
//!   through the block
//!   `[[cos γ, -i e^{iφ} sin γ], [-i e^{-iφ} sin γ, cos γ]]`,
//!   with row/column `j` first. With suitable angles it zeroes the `k`
//!   component of a vector while keeping the `j` component.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, TAU};
use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Result, SynthError};
use crate::graph::Capabilities;

pub type Mat2 = Matrix2<Complex64>;

/// Default unitarity tolerance for checked construction.
pub const UNITARY_TOL: f64 = 1e-12;

/// Angles within this distance of a multiple of 2π are treated as zero when
/// pulses are pruned.
pub const ANGLE_EPS: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Whether `theta` is a multiple of 2π up to [`ANGLE_EPS`].
pub fn is_trivial_angle(theta: f64) -> bool {
    let w = wrap_angle(theta);
    w < ANGLE_EPS || TAU - w < ANGLE_EPS
}

/// A square complex matrix, unitary up to the tolerance it was checked at.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary(DMatrix<Complex64>);

impl Unitary {
    /// Checked constructor at [`UNITARY_TOL`].
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(m, UNITARY_TOL)
    }

    pub fn with_tolerance(m: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(SynthError::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let u = Unitary(m);
        let deviation = u.unitarity_deviation();
        if deviation <= tol {
            Ok(u)
        } else {
            Err(SynthError::NotUnitary { deviation })
        }
    }

    /// Wraps a matrix without checking unitarity; for intermediates whose
    /// unitarity follows from construction.
    pub fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "unitary must be square");
        Unitary(m)
    }

    pub fn identity(dim: usize) -> Self {
        Unitary(DMatrix::identity(dim, dim))
    }

    /// Diagonal unitary with entries `e^{i φ_j}`.
    pub fn from_phases(phases: &[f64]) -> Self {
        let n = phases.len();
        Unitary(DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::from_polar(1.0, phases[r])
            } else {
                ZERO
            }
        }))
    }

    /// Permutation matrix sending basis state `j` to `perm[j]`.
    pub fn from_permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, &t) in perm.iter().enumerate() {
            m[(t, j)] = ONE;
        }
        Unitary(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Unitary(self.0.adjoint())
    }

    pub fn kron(&self, other: &Unitary) -> Self {
        Unitary(self.0.kronecker(&other.0))
    }

    /// `max |U U^† - I|` over entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        let p = &self.0 * self.0.adjoint();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((p[(r, c)] - target).norm());
            }
        }
        worst
    }

    /// Largest off-diagonal magnitude.
    pub fn off_diagonal_max(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    worst = worst.max(self.0[(r, c)].norm());
                }
            }
        }
        worst
    }

    /// Arguments of the diagonal entries.
    pub fn diagonal_phases(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.0[(j, j)].arg()).collect()
    }

    /// The 2×2 block on rows/columns `(j, k)`, in that order.
    pub fn block(&self, pair: StatePair) -> Mat2 {
        let StatePair(j, k) = pair;
        Mat2::new(self.0[(j, j)], self.0[(j, k)], self.0[(k, j)], self.0[(k, k)])
    }
}

impl Mul<&Unitary> for &Unitary {
    type Output = Unitary;

    fn mul(self, rhs: &Unitary) -> Unitary {
        Unitary(&self.0 * &rhs.0)
    }
}

impl Mul for Unitary {
    type Output = Unitary;

    fn mul(self, rhs: Unitary) -> Unitary {
        &self * &rhs
    }
}

/// Identity of dimension `d` with `block` placed on rows/columns `(j, k)`.
pub fn embed_block(d: usize, pair: StatePair, block: &Mat2) -> Result<Unitary> {
    pair.check(d)?;
    let StatePair(j, k) = pair;
    let mut m = DMatrix::identity(d, d);
    m[(j, j)] = block[(0, 0)];
    m[(j, k)] = block[(0, 1)];
    m[(k, j)] = block[(1, 0)];
    m[(k, k)] = block[(1, 1)];
    Ok(Unitary(m))
}

/// Applies `block` on rows `(j, k)` of `m` from the left, in place.
pub fn apply_block_rows(m: &mut DMatrix<Complex64>, pair: StatePair, block: &Mat2) {
    let StatePair(j, k) = pair;
    for c in 0..m.ncols() {
        let a = m[(j, c)];
        let b = m[(k, c)];
        m[(j, c)] = block[(0, 0)] * a + block[(0, 1)] * b;
        m[(k, c)] = block[(1, 0)] * a + block[(1, 1)] * b;
    }
}

/// An ordered pair of distinct basis states `(j, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StatePair(pub usize, pub usize);

impl StatePair {
    pub fn check(self, d: usize) -> Result<()> {
        let StatePair(j, k) = self;
        if j >= d || k >= d {
            return Err(SynthError::IndexOutOfRange {
                index: j.max(k),
                bound: d,
            });
        }
        if j == k {
            return Err(SynthError::InvalidPulse(format!(
                "pair ({j}, {k}) is not distinct"
            )));
        }
        Ok(())
    }

    pub fn reversed(self) -> Self {
        StatePair(self.1, self.0)
    }
}

impl fmt::Display for StatePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// The logical rotation `U_{j,k}(γ, φ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GivensGate {
    pub pair: StatePair,
    pub gamma: f64,
    pub phi: f64,
}

impl GivensGate {
    pub fn new(j: usize, k: usize, gamma: f64, phi: f64) -> Self {
        GivensGate {
            pair: StatePair(j, k),
            gamma,
            phi,
        }
    }

    /// `U(π/2, π/2)`: sends `|k> -> |j>` and `|j> -> -|k>`.
    pub fn swap(j: usize, k: usize) -> Self {
        Self::new(j, k, FRAC_PI_2, FRAC_PI_2)
    }

    pub fn inverse(&self) -> Self {
        GivensGate {
            gamma: -self.gamma,
            ..*self
        }
    }

    pub fn block(&self) -> Mat2 {
        rotation_block(self.gamma, self.phi)
    }
}

impl fmt::Display for GivensGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}(γ={:.6}, φ={:.6})", self.pair, self.gamma, self.phi)
    }
}

fn rotation_block(gamma: f64, phi: f64) -> Mat2 {
    let (s, c) = gamma.sin_cos();
    Mat2::new(
        Complex64::new(c, 0.0),
        -I * Complex64::from_polar(s, phi),
        -I * Complex64::from_polar(s, -phi),
        Complex64::new(c, 0.0),
    )
}

/// The embedded Givens rotation `U_{j,k}(γ, φ)` on a `d`-level system.
pub fn givens_matrix(d: usize, gate: &GivensGate) -> Result<Unitary> {
    embed_block(d, gate.pair, &gate.block())
}

/// Which Hamiltonian a pulse switches on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Generator {
    /// `H^x_{jk} = ħΩ(|j><k| + |k><j|)`.
    X(StatePair),
    /// `H^y_{jk} = ħΩ(-i|j><k| + i|k><j|)`.
    Y(StatePair),
    /// `H^z_{jk} = ħΩ(|j><j| - |k><k|)`.
    Z(StatePair),
    /// Simultaneous `x`/`y` drive with axis phase `φ`; its evolution is the
    /// Givens block `U_{j,k}(θ, φ)`.
    Xy(StatePair, f64),
    /// Two-qudit phase coupling `-ħΩ |d-1,d-1><d-1,d-1|`.
    Int,
}

/// One primitive evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pulse {
    pub generator: Generator,
    /// Qudit the pulse acts on (0 = control, 1 = target); unused for `Int`.
    pub qudit: usize,
    /// Dimensionless `Ωt` in radians.
    pub angle: f64,
}

impl Pulse {
    pub fn x(pair: StatePair, angle: f64) -> Self {
        Pulse {
            generator: Generator::X(pair),
            qudit: 0,
            angle,
        }
    }

    pub fn y(pair: StatePair, angle: f64) -> Self {
        Pulse {
            generator: Generator::Y(pair),
            qudit: 0,
            angle,
        }
    }

    pub fn z(pair: StatePair, angle: f64) -> Self {
        Pulse {
            generator: Generator::Z(pair),
            qudit: 0,
            angle,
        }
    }

    pub fn xy(pair: StatePair, phi: f64, angle: f64) -> Self {
        Pulse {
            generator: Generator::Xy(pair, phi),
            qudit: 0,
            angle,
        }
    }

    pub fn int(angle: f64) -> Self {
        Pulse {
            generator: Generator::Int,
            qudit: 0,
            angle,
        }
    }

    pub fn on_qudit(mut self, qudit: usize) -> Self {
        self.qudit = qudit;
        self
    }

    pub fn is_int(&self) -> bool {
        matches!(self.generator, Generator::Int)
    }

    pub fn pair(&self) -> Option<StatePair> {
        match self.generator {
            Generator::X(p) | Generator::Y(p) | Generator::Z(p) | Generator::Xy(p, _) => Some(p),
            Generator::Int => None,
        }
    }

    /// Short generator tag as used in schedule files.
    pub fn tag(&self) -> &'static str {
        match self.generator {
            Generator::X(_) => "x",
            Generator::Y(_) => "y",
            Generator::Z(_) => "z",
            Generator::Xy(..) => "xy",
            Generator::Int => "int",
        }
    }

    /// Closed-form 2×2 evolution of a single-qudit pulse on its pair.
    pub fn block(&self) -> Option<Mat2> {
        let (s, c) = self.angle.sin_cos();
        let cr = Complex64::new(c, 0.0);
        Some(match self.generator {
            Generator::X(_) => Mat2::new(cr, -I * s, -I * s, cr),
            Generator::Y(_) => Mat2::new(cr, Complex64::new(-s, 0.0), Complex64::new(s, 0.0), cr),
            Generator::Z(_) => Mat2::new(
                Complex64::from_polar(1.0, -self.angle),
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, self.angle),
            ),
            Generator::Xy(_, phi) => rotation_block(self.angle, phi),
            Generator::Int => return None,
        })
    }

    /// The pulse undoing this one.
    pub fn inverse(&self) -> Self {
        Pulse {
            angle: wrap_angle(-self.angle),
            ..*self
        }
    }

    pub fn is_trivial(&self) -> bool {
        is_trivial_angle(self.angle)
    }
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.generator {
            Generator::Int => write!(f, "int({:.6})", self.angle),
            Generator::Xy(p, phi) => write!(f, "q{} xy{}[φ={:.6}]({:.6})", self.qudit, p, phi, self.angle),
            _ => write!(
                f,
                "q{} {}{}({:.6})",
                self.qudit,
                self.tag(),
                self.pair().unwrap(),
                self.angle
            ),
        }
    }
}

/// Angles `(a, b, c) ∈ [0, 2π)³` with `u = X(a)·Y(b)·X(c)` exactly, where
/// `X(θ) = exp(-iθσx)` and `Y(θ) = exp(-iθσy)`. `u` must be in SU(2).
///
/// Conjugating by the Hadamard maps the problem to a ZYZ split of `H u H`,
/// with `X -> Z` and `Y(θ) -> Y(-θ)`.
pub fn xyx_angles(u: &Mat2) -> (f64, f64, f64) {
    // A real SU(2) element is already a pure y rotation.
    if u.iter().all(|z| z.im.abs() < 1e-15) {
        return (0.0, wrap_angle(u[(1, 0)].re.atan2(u[(0, 0)].re)), 0.0);
    }
    let h = Mat2::new(ONE, ONE, ONE, -ONE) * Complex64::new(FRAC_1_SQRT_2, 0.0);
    let v = h * u * h;
    let (m00, m10) = (v[(0, 0)].norm(), v[(1, 0)].norm());
    let beta = m10.atan2(m00);
    // Z(a)Y(β)Z(c) = [[e^{-i(a+c)}cos β, ·], [e^{i(a-c)} sin β, ·]]
    let (a, c) = if m10 < 1e-15 {
        (-v[(0, 0)].arg(), 0.0)
    } else if m00 < 1e-15 {
        (v[(1, 0)].arg(), 0.0)
    } else {
        let sum = -v[(0, 0)].arg();
        let diff = v[(1, 0)].arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    (wrap_angle(a), wrap_angle(-beta), wrap_angle(c))
}

/// Lowers a Givens rotation into pulses, first-applied first. Pulses with a
/// trivial angle are dropped.
pub fn lower_givens(gate: &GivensGate, caps: Capabilities) -> Vec<Pulse> {
    let pair = gate.pair;
    let pulses = if caps.simultaneous_xy {
        vec![Pulse::xy(pair, wrap_angle(gate.phi), wrap_angle(gate.gamma))]
    } else {
        let (a, b, c) = xyx_angles(&gate.block());
        vec![Pulse::x(pair, c), Pulse::y(pair, b), Pulse::x(pair, a)]
    };
    pulses.into_iter().filter(|p| !p.is_trivial()).collect()
}

/// Pulses realizing `exp(-i γ H^z_{jk}/ħΩ) = diag(e^{-iγ}, e^{iγ})` on the
/// pair: one `Z` pulse when available, otherwise the `x` rotation
/// conjugated by `U_{j,k}(∓π/4, π/2)`.
pub fn z_by_conjugation(pair: StatePair, gamma: f64, caps: Capabilities) -> Vec<Pulse> {
    if is_trivial_angle(gamma) {
        return Vec::new();
    }
    if caps.direct_z {
        return vec![Pulse::z(pair, wrap_angle(gamma))];
    }
    let StatePair(j, k) = pair;
    [
        GivensGate::new(j, k, -FRAC_PI_4, FRAC_PI_2),
        GivensGate::new(j, k, gamma, 0.0),
        GivensGate::new(j, k, FRAC_PI_4, FRAC_PI_2),
    ]
    .iter()
    .flat_map(|g| lower_givens(g, caps))
    .collect()
}

/// `min_{|c|=1} ‖A − cB‖_F`.
///
/// The minimizer is `c = tr(B^†A)/|tr(B^†A)|`; when the trace vanishes every
/// phase gives the same value and `c = 1` is used.
pub fn distance_up_to_phase(a: &Unitary, b: &Unitary) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(SynthError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let (am, bm) = (a.matrix(), b.matrix());
    let overlap: Complex64 = bm.iter().zip(am.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    let sq: f64 = am
        .iter()
        .zip(bm.iter())
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum();
    Ok(sq.sqrt())
}

/// The phase `c` with `a ≈ c·b`, as used by [`distance_up_to_phase`].
pub fn relative_phase(a: &Unitary, b: &Unitary) -> f64 {
    let overlap: Complex64 = b
        .matrix()
        .iter()
        .zip(a.matrix().iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    if overlap.norm() > 1e-300 {
        overlap.arg()
    } else {
        0.0
    }
}

/// Product of the pulse blocks (first-applied first) of single-qudit pulses
/// that all act on the same pair.
pub fn block_product(pulses: &[Pulse]) -> Mat2 {
    pulses.iter().fold(Mat2::identity(), |acc, p| {
        p.block().expect("single-qudit pulse") * acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// exp(-iA) for Hermitian A by a truncated Taylor series with scaling
    /// and squaring; independent of the closed-form blocks.
    fn expm_minus_i(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = h.nrows();
        let scale = 2f64.powi(10);
        let a = h.map(|z| -I * z / scale);
        let mut term = DMatrix::<Complex64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &a / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..10 {
            sum = &sum * &sum;
        }
        sum
    }

    fn hx(d: usize, j: usize, k: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(d, d);
        m[(j, k)] = ONE;
        m[(k, j)] = ONE;
        m
    }

    fn hy(d: usize, j: usize, k: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(d, d);
        m[(j, k)] = -I;
        m[(k, j)] = I;
        m
    }

    #[test]
    fn givens_zero_angle_is_identity() {
        let g = givens_matrix(2, &GivensGate::new(0, 1, 0.0, 1.3)).unwrap();
        assert_eq!(g, Unitary::identity(2));
    }

    #[test]
    fn givens_swap_up_to_sign() {
        let g = givens_matrix(2, &GivensGate::swap(0, 1)).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]);
        let want = DMatrix::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO]);
        assert!((g.matrix() - want).norm() < 1e-15);
        assert!((g.matrix() - expected).norm() > 1.0);
    }

    #[test]
    fn givens_matches_matrix_exponential() {
        let gamma = FRAC_PI_4;
        let g = givens_matrix(3, &GivensGate::new(0, 2, gamma, 0.0)).unwrap();
        let oracle = expm_minus_i(&hx(3, 0, 2).map(|z| z * gamma));
        assert!((g.matrix() - oracle).norm() < 1e-12);
        // General φ: the block equals exp(-iγ(cos φ H^x - sin φ H^y)).
        let (gamma, phi) = (0.7, 1.1);
        let g = givens_matrix(3, &GivensGate::new(2, 1, gamma, phi)).unwrap();
        let h = hx(3, 2, 1).map(|z| z * (gamma * phi.cos())) - hy(3, 2, 1).map(|z| z * (gamma * phi.sin()));
        assert!((g.matrix() - expm_minus_i(&h)).norm() < 1e-12);
    }

    #[test]
    fn givens_rejects_bad_pairs() {
        assert!(matches!(
            givens_matrix(3, &GivensGate::new(0, 3, 0.1, 0.0)),
            Err(SynthError::IndexOutOfRange { .. })
        ));
        assert!(givens_matrix(3, &GivensGate::new(1, 1, 0.1, 0.0)).is_err());
    }

    #[test]
    fn pulse_blocks_match_exponentials() {
        let theta = 0.37;
        let p = StatePair(0, 1);
        let x = Pulse::x(p, theta).block().unwrap();
        let y = Pulse::y(p, theta).block().unwrap();
        let ex = expm_minus_i(&hx(2, 0, 1).map(|z| z * theta));
        let ey = expm_minus_i(&hy(2, 0, 1).map(|z| z * theta));
        assert!((DMatrix::from_iterator(2, 2, x.iter().copied()) - ex).norm() < 1e-12);
        assert!((DMatrix::from_iterator(2, 2, y.iter().copied()) - ey).norm() < 1e-12);
    }

    #[test]
    fn lower_pure_axes() {
        let caps = Capabilities::new(false, false);
        let gamma = 0.9;
        let px = lower_givens(&GivensGate::new(0, 1, gamma, 0.0), caps);
        assert_eq!(px.len(), 1);
        assert!(matches!(px[0].generator, Generator::X(_)));
        assert!((px[0].angle - gamma).abs() < 1e-12);

        let py = lower_givens(&GivensGate::new(0, 1, gamma, FRAC_PI_2), caps);
        assert_eq!(py.len(), 1);
        assert!(matches!(py[0].generator, Generator::Y(_)));
        // The Givens block with φ = π/2 is Y(-γ).
        assert!((py[0].angle - (TAU - gamma)).abs() < 1e-12);
    }

    #[test]
    fn lower_generic_three_pulses() {
        let gate = GivensGate::new(3, 1, 0.7, 1.1);
        let pulses = lower_givens(&gate, Capabilities::new(false, false));
        assert_eq!(pulses.len(), 3);
        assert!(pulses.iter().all(|p| (0.0..TAU).contains(&p.angle)));
        assert!(max_diff(&block_product(&pulses), &gate.block()) < 1e-12);
        let one = lower_givens(&gate, Capabilities::new(true, false));
        assert_eq!(one.len(), 1);
        assert!(max_diff(&block_product(&one), &gate.block()) < 1e-12);
    }

    #[test]
    fn lower_random_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let gate = GivensGate::new(0, 1, rng.random_range(-7.0..7.0), rng.random_range(-7.0..7.0));
            for caps in [Capabilities::new(false, false), Capabilities::new(true, false)] {
                let pulses = lower_givens(&gate, caps);
                assert!(max_diff(&block_product(&pulses), &gate.block()) < 1e-12);
            }
        }
    }

    #[test]
    fn lower_zero_gate_is_empty() {
        assert!(lower_givens(&GivensGate::new(0, 1, 0.0, 0.4), Capabilities::new(false, false)).is_empty());
        assert!(lower_givens(&GivensGate::new(0, 1, TAU, 0.4), Capabilities::new(true, false)).is_empty());
    }

    #[test]
    fn z_conjugation() {
        let p = StatePair(0, 1);
        assert!(z_by_conjugation(p, 0.0, Capabilities::new(true, false)).is_empty());
        let gamma = PI / 3.0;
        let want = Mat2::new(
            c(0.5, -(3f64.sqrt()) / 2.0),
            ZERO,
            ZERO,
            c(0.5, 3f64.sqrt() / 2.0),
        );
        for caps in [Capabilities::new(true, false), Capabilities::new(false, false)] {
            let pulses = z_by_conjugation(p, gamma, caps);
            assert_eq!(pulses.len(), 3);
            assert!(max_diff(&block_product(&pulses), &want) < 1e-12);
        }
        let direct = z_by_conjugation(p, gamma, Capabilities::new(true, true));
        assert_eq!(direct.len(), 1);
        assert!(matches!(direct[0].generator, Generator::Z(_)));
        assert!((direct[0].angle - gamma).abs() < 1e-15);
    }

    #[test]
    fn z_conjugation_is_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let gamma = rng.random_range(-4.0..4.0);
            let b = block_product(&z_by_conjugation(
                StatePair(2, 0),
                gamma,
                Capabilities::new(true, false),
            ));
            assert!(b[(0, 1)].norm() < 1e-12 && b[(1, 0)].norm() < 1e-12);
            assert!((b[(0, 0)] - Complex64::from_polar(1.0, -gamma)).norm() < 1e-12);
        }
    }

    #[test]
    fn distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = crate::random::haar_unitary(4, &mut rng);
        assert!(distance_up_to_phase(&u, &u).unwrap() < 1e-15);
        let shifted = Unitary::from_matrix_unchecked(u.matrix() * Complex64::from_polar(1.0, PI / 7.0));
        assert!(distance_up_to_phase(&shifted, &u).unwrap() < 1e-12);

        // A = I, B = diag(1,-1): scan the phase on a fine grid.
        let a = Unitary::identity(2);
        let b = Unitary::from_phases(&[0.0, PI]);
        let grid = (0..100_000)
            .map(|i| {
                let ph = Complex64::from_polar(1.0, TAU * i as f64 / 100_000.0);
                (a.matrix() - b.matrix() * ph).norm()
            })
            .fold(f64::INFINITY, f64::min);
        let got = distance_up_to_phase(&a, &b).unwrap();
        assert!((got - grid).abs() < 1e-9, "{got} vs {grid}");
        assert!((got - 2.0).abs() < 1e-12);

        assert!(matches!(
            distance_up_to_phase(&Unitary::identity(2), &Unitary::identity(3)),
            Err(SynthError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn checked_constructor() {
        let m = DMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(Unitary::new(m), Err(SynthError::NotUnitary { .. })));
        let rect = DMatrix::<Complex64>::zeros(2, 3);
        assert!(matches!(
            Unitary::new(rect),
            Err(SynthError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn xyx_handles_minus_identity() {
        let m = -Mat2::identity();
        let (a, b, c) = xyx_angles(&m);
        let p = StatePair(0, 1);
        let prod = block_product(&[Pulse::x(p, c), Pulse::y(p, b), Pulse::x(p, a)]);
        assert!(max_diff(&prod, &m) < 1e-12);
    }
}
