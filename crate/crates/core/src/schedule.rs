//! Pulse schedules and the reference simulator.
//!
//! Two-qudit states are indexed control-major: `|j,k> -> d·j + k`, with the
//! control as qudit 0.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SynthError};
use crate::linalg::{apply_block_rows, distance_up_to_phase, Generator, Pulse, StatePair, Unitary};

/// The Hilbert space a schedule acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct System {
    pub n_qudits: usize,
    pub d: usize,
}

impl System {
    pub fn single(d: usize) -> Self {
        System { n_qudits: 1, d }
    }

    pub fn pair(d: usize) -> Self {
        System { n_qudits: 2, d }
    }

    pub fn dim(&self) -> usize {
        self.d.pow(self.n_qudits as u32)
    }

    /// Checks that a pulse addresses valid levels and qudits of this system.
    pub fn check_pulse(&self, p: &Pulse) -> Result<()> {
        if !(1..=2).contains(&self.n_qudits) || self.d < 2 {
            return Err(SynthError::InvalidPulse(format!(
                "unsupported system: {} qudits of dimension {}",
                self.n_qudits, self.d
            )));
        }
        if !p.angle.is_finite() {
            return Err(SynthError::InvalidPulse(format!("non-finite angle in {p}")));
        }
        match p.generator {
            Generator::Int if self.n_qudits != 2 => {
                Err(SynthError::InvalidPulse("int pulse requires two qudits".into()))
            }
            Generator::Int => Ok(()),
            Generator::Xy(_, phi) if !phi.is_finite() => {
                Err(SynthError::InvalidPulse(format!("non-finite axis phase in {p}")))
            }
            _ => {
                if p.qudit >= self.n_qudits {
                    return Err(SynthError::InvalidPulse(format!(
                        "pulse on qudit {} of a {}-qudit system",
                        p.qudit, self.n_qudits
                    )));
                }
                p.pair()
                    .expect("local pulse has a pair")
                    .check(self.d)
                    .map_err(|e| SynthError::InvalidPulse(format!("{p}: {e}")))
            }
        }
    }
}

/// Pulse tallies by generator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScheduleCounts {
    pub pulses: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub xy: usize,
    pub int: usize,
}

impl ScheduleCounts {
    pub fn local_pulses(&self) -> usize {
        self.pulses - self.int
    }
}

/// An ordered pulse list, first pulse applied first.
///
/// `global_phase` records the phase dropped during synthesis: the target
/// equals `e^{i·global_phase}·simulate(self)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub system: System,
    pub pulses: Vec<Pulse>,
    /// Which synthesis step emitted each pulse; same length as `pulses`.
    pub provenance: Vec<String>,
    pub global_phase: f64,
}

impl Schedule {
    pub fn new(system: System) -> Self {
        Schedule {
            system,
            pulses: Vec::new(),
            provenance: Vec::new(),
            global_phase: 0.0,
        }
    }

    pub fn from_pulses(system: System, pulses: Vec<Pulse>) -> Result<Self> {
        let mut s = Schedule::new(system);
        for p in pulses {
            s.push(p, "input")?;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    pub fn push(&mut self, pulse: Pulse, provenance: impl Into<String>) -> Result<()> {
        self.system.check_pulse(&pulse)?;
        self.pulses.push(pulse);
        self.provenance.push(provenance.into());
        Ok(())
    }

    pub fn extend<I>(&mut self, pulses: I, provenance: &str) -> Result<()>
    where
        I: IntoIterator<Item = Pulse>,
    {
        for p in pulses {
            self.push(p, provenance)?;
        }
        Ok(())
    }

    /// Appends `other`, which is applied after `self`.
    pub fn append(&mut self, other: &Schedule) -> Result<()> {
        if other.system != self.system {
            return Err(SynthError::DimensionMismatch {
                expected: self.system.dim(),
                found: other.system.dim(),
            });
        }
        self.pulses.extend_from_slice(&other.pulses);
        self.provenance.extend(other.provenance.iter().cloned());
        self.global_phase += other.global_phase;
        Ok(())
    }

    /// The schedule realizing the adjoint.
    pub fn inverse(&self) -> Schedule {
        Schedule {
            system: self.system,
            pulses: self.pulses.iter().rev().map(Pulse::inverse).collect(),
            provenance: self
                .provenance
                .iter()
                .rev()
                .map(|p| format!("inverse {p}"))
                .collect(),
            global_phase: -self.global_phase,
        }
    }

    pub fn counts(&self) -> ScheduleCounts {
        let mut c = ScheduleCounts {
            pulses: self.pulses.len(),
            ..Default::default()
        };
        for p in &self.pulses {
            match p.generator {
                Generator::X(_) => c.x += 1,
                Generator::Y(_) => c.y += 1,
                Generator::Z(_) => c.z += 1,
                Generator::Xy(..) => c.xy += 1,
                Generator::Int => c.int += 1,
            }
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.provenance.len() != self.pulses.len() {
            return Err(SynthError::InvalidPulse(
                "provenance length differs from pulse count".into(),
            ));
        }
        self.pulses.iter().try_for_each(|p| self.system.check_pulse(p))
    }
}

/// Left-multiplies `m` (rows indexed by the system basis) by the pulse
/// evolution, in place.
pub fn apply_pulse(m: &mut DMatrix<Complex64>, p: &Pulse, system: System) -> Result<()> {
    system.check_pulse(p)?;
    let d = system.d;
    if let Generator::Int = p.generator {
        let phase = Complex64::from_polar(1.0, p.angle);
        let last = system.dim() - 1;
        m.row_mut(last).iter_mut().for_each(|z| *z *= phase);
        return Ok(());
    }
    let pair = p.pair().expect("local pulse has a pair");
    let block = p.block().expect("local pulse has a block");
    match (system.n_qudits, p.qudit) {
        (1, _) => apply_block_rows(m, pair, &block),
        (_, 0) => {
            for t in 0..d {
                apply_block_rows(m, StatePair(d * pair.0 + t, d * pair.1 + t), &block);
            }
        }
        _ => {
            for c in 0..d {
                apply_block_rows(m, StatePair(d * c + pair.0, d * c + pair.1), &block);
            }
        }
    }
    Ok(())
}

/// The full-space unitary of one pulse.
pub fn pulse_unitary(p: &Pulse, system: System) -> Result<Unitary> {
    let n = system.dim();
    let mut m = DMatrix::identity(n, n);
    apply_pulse(&mut m, p, system)?;
    Ok(Unitary::from_matrix_unchecked(m))
}

/// The product of all pulse evolutions, first pulse rightmost. The recorded
/// global phase is not applied.
pub fn simulate(s: &Schedule) -> Result<Unitary> {
    let n = s.system.dim();
    let mut m = DMatrix::identity(n, n);
    for p in &s.pulses {
        apply_pulse(&mut m, p, s.system)?;
    }
    Ok(Unitary::from_matrix_unchecked(m))
}

/// Outcome of comparing a schedule with its target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub target_distance: f64,
    pub pulse_count: usize,
    pub int_pulse_count: usize,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn verify(s: &Schedule, target: &Unitary, tol: f64) -> Result<VerifyReport> {
    if target.dim() != s.system.dim() {
        return Err(SynthError::DimensionMismatch {
            expected: s.system.dim(),
            found: target.dim(),
        });
    }
    let u = simulate(s)?;
    let target_distance = distance_up_to_phase(&u, target)?;
    let counts = s.counts();
    Ok(VerifyReport {
        target_distance,
        pulse_count: counts.pulses,
        int_pulse_count: counts.int,
        tolerance: tol,
        pass: target_distance <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_pulse(d: usize, two: bool, seed: (usize, usize, usize, f64, f64, usize)) -> Pulse {
        let (g, j, k, angle, phi, q) = seed;
        let j = j % d;
        let k = (j + 1 + k % (d - 1)) % d;
        let pair = StatePair(j, k);
        let p = match g % if two { 5 } else { 4 } {
            0 => Pulse::x(pair, angle),
            1 => Pulse::y(pair, angle),
            2 => Pulse::z(pair, angle),
            3 => Pulse::xy(pair, phi, angle),
            _ => Pulse::int(angle),
        };
        if two {
            p.on_qudit(q % 2)
        } else {
            p
        }
    }

    #[test]
    fn zero_angle_is_identity() {
        let u = pulse_unitary(&Pulse::x(StatePair(0, 2), 0.0), System::single(3)).unwrap();
        assert_eq!(u, Unitary::identity(3));
    }

    #[test]
    fn int_pi_is_controlled_z() {
        let u = pulse_unitary(&Pulse::int(PI), System::pair(2)).unwrap();
        let want = Unitary::from_phases(&[0.0, 0.0, 0.0, PI]);
        assert!((u.matrix() - want.matrix()).norm() < 1e-15);
    }

    #[test]
    fn y_half_pi_transfers() {
        let u = pulse_unitary(&Pulse::y(StatePair(1, 0), FRAC_PI_2), System::single(2)).unwrap();
        // rows/cols (1,0): |1> -> |0>, |0> -> -|1>
        assert!((u.get(0, 1) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((u.get(1, 0) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(u.get(0, 0).norm() < 1e-15 && u.get(1, 1).norm() < 1e-15);
    }

    #[test]
    fn two_qudit_locals_are_kronecker_products() {
        let d = 3;
        let p = Pulse::xy(StatePair(2, 0), 0.3, 1.1);
        let local = pulse_unitary(&p, System::single(d)).unwrap();
        let on_control = pulse_unitary(&p.on_qudit(0), System::pair(d)).unwrap();
        let on_target = pulse_unitary(&p.on_qudit(1), System::pair(d)).unwrap();
        assert!((on_control.matrix() - local.kron(&Unitary::identity(d)).matrix()).norm() < 1e-15);
        assert!((on_target.matrix() - Unitary::identity(d).kron(&local).matrix()).norm() < 1e-15);
    }

    #[test]
    fn invalid_pulses_rejected() {
        assert!(pulse_unitary(&Pulse::int(1.0), System::single(3)).is_err());
        assert!(pulse_unitary(&Pulse::x(StatePair(0, 3), 1.0), System::single(3)).is_err());
        assert!(pulse_unitary(&Pulse::x(StatePair(0, 1), 1.0).on_qudit(1), System::single(3)).is_err());
        assert!(pulse_unitary(&Pulse::x(StatePair(0, 1), f64::NAN), System::single(3)).is_err());
    }

    #[test]
    fn empty_schedule_is_identity() {
        let s = Schedule::new(System::pair(3));
        assert_eq!(simulate(&s).unwrap(), Unitary::identity(9));
    }

    #[test]
    fn inverse_pair_cancels() {
        let mut s = Schedule::new(System::single(4));
        s.push(Pulse::x(StatePair(0, 1), 0.77), "a").unwrap();
        s.push(Pulse::x(StatePair(0, 1), -0.77), "b").unwrap();
        let u = simulate(&s).unwrap();
        assert!((u.matrix() - Unitary::identity(4).matrix()).norm() < 1e-14);
    }

    #[test]
    fn verify_reports() {
        let mut s = Schedule::new(System::single(3));
        s.push(Pulse::xy(StatePair(0, 1), 0.4, 0.9), "a").unwrap();
        s.push(Pulse::z(StatePair(1, 2), 0.3), "b").unwrap();
        let target = simulate(&s).unwrap();
        let r = verify(&s, &target, 1e-9).unwrap();
        assert!(r.pass && r.target_distance < 1e-15 && r.pulse_count == 2);

        let shifted = Unitary::from_matrix_unchecked(target.matrix() * Complex64::from_polar(1.0, 0.4));
        assert!(verify(&s, &shifted, 1e-9).unwrap().target_distance < 1e-12);

        let mut bad = s.clone();
        bad.pulses[0].angle += 1e-3;
        let r = verify(&bad, &target, 1e-9).unwrap();
        assert!(!r.pass && r.target_distance > 1e-4);

        assert!(matches!(
            verify(&s, &Unitary::identity(4), 1e-9),
            Err(SynthError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn long_schedules_stay_unitary() {
        let mut s = Schedule::new(System::pair(4));
        for i in 0..10_000usize {
            let seed = (i * 7, i * 3, i * 5 + 1, (i as f64) * 0.618, (i as f64) * 1.3, i);
            s.push(random_pulse(4, true, seed), "r").unwrap();
        }
        assert!(simulate(&s).unwrap().unitarity_deviation() < 1e-10);
    }

    #[test]
    fn schedule_inverse_recovers_identity() {
        let mut s = Schedule::new(System::pair(3));
        for i in 0..40usize {
            let seed = (
                i * 11,
                i * 2,
                i + 4,
                (i as f64) * 0.37 - 3.0,
                (i as f64) * 0.51,
                i * 3,
            );
            s.push(random_pulse(3, true, seed), "r").unwrap();
        }
        let mut full = s.clone();
        full.append(&s.inverse()).unwrap();
        assert!((simulate(&full).unwrap().matrix() - Unitary::identity(9).matrix()).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn split_consistency(
            seeds in prop::collection::vec((0usize..5, 0usize..4, 0usize..4, -7.0f64..7.0, -4.0f64..4.0, 0usize..2), 1..60),
            cut in 0usize..60,
        ) {
            let system = System::pair(4);
            let pulses: Vec<Pulse> = seeds.into_iter().map(|s| random_pulse(4, true, s)).collect();
            let cut = cut.min(pulses.len());
            let full = simulate(&Schedule::from_pulses(system, pulses.clone()).unwrap()).unwrap();
            let first = simulate(&Schedule::from_pulses(system, pulses[..cut].to_vec()).unwrap()).unwrap();
            let second = simulate(&Schedule::from_pulses(system, pulses[cut..].to_vec()).unwrap()).unwrap();
            let composed = &second * &first;
            prop_assert!((composed.matrix() - full.matrix()).norm() < 1e-12);
        }

        #[test]
        fn x_inverse_is_exact(theta in -10.0f64..10.0, j in 0usize..5, k in 0usize..5) {
            prop_assume!(j != k);
            let system = System::single(5);
            let a = pulse_unitary(&Pulse::x(StatePair(j, k), theta), system).unwrap();
            let b = pulse_unitary(&Pulse::x(StatePair(j, k), -theta), system).unwrap();
            prop_assert!(((&a * &b).matrix() - Unitary::identity(5).matrix()).norm() < 1e-15);
        }
    }
}
