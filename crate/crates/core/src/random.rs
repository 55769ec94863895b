//! Random inputs for tests and benchmarks.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::graph::{Capabilities, CouplingGraph};
use crate::linalg::Unitary;
use crate::spectral::QuditState;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Unitary {
    let z = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    Unitary::new(q).expect("QR factor is unitary")
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let (a, b) = (gaussian(rng), gaussian(rng));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    Matrix2::new(a, -b.conj(), b, a.conj())
}

/// Uniformly random pure state.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> QuditState {
    let amps: Vec<Complex64> = (0..d).map(|_| gaussian(rng)).collect();
    QuditState::normalized(amps).expect("Gaussian vector is nonzero")
}

/// Random connected graph: a random spanning tree plus each remaining edge
/// with probability 1/3.
pub fn random_connected_graph<R: Rng + ?Sized>(d: usize, caps: Capabilities, rng: &mut R) -> CouplingGraph {
    let mut nodes: Vec<usize> = (0..d).collect();
    nodes.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..d {
        let j = rng.random_range(0..i);
        let (a, b) = (nodes[i], nodes[j]);
        edges.push((a.min(b), a.max(b)));
    }
    for a in 0..d {
        for b in a + 1..d {
            if !edges.contains(&(a, b)) && rng.random_bool(1.0 / 3.0) {
                edges.push((a, b));
            }
        }
    }
    CouplingGraph::new(d, edges, caps).expect("edges are valid")
}
