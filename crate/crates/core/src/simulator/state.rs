use num_complex::Complex64;

use super::{Op, SimGate};

/// Row-major 2×2 unitary.
pub type Matrix2 = [[Complex64; 2]; 2];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gate_matrix(g: SimGate) -> Matrix2 {
    use std::f64::consts::FRAC_1_SQRT_2 as R;
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let phase = |a: f64| [[one, zero], [zero, Complex64::from_polar(1.0, a)]];
    match g {
        SimGate::H => [[c(R, 0.0), c(R, 0.0)], [c(R, 0.0), c(-R, 0.0)]],
        SimGate::X => [[zero, one], [one, zero]],
        SimGate::Y => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
        SimGate::Z => phase(std::f64::consts::PI),
        SimGate::S => phase(std::f64::consts::FRAC_PI_2),
        SimGate::T => phase(std::f64::consts::FRAC_PI_4),
        SimGate::U1(a) => phase(a),
        SimGate::RX(a) => {
            let (s, co) = (a / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        SimGate::RY(a) => {
            let (s, co) = (a / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        SimGate::RZ(a) => [
            [Complex64::from_polar(1.0, -a / 2.0), zero],
            [zero, Complex64::from_polar(1.0, a / 2.0)],
        ],
    }
}

/// Amplitudes of `n` qubits; basis index bit `k` is qubit `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps, num_qubits }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn apply(&mut self, op: &Op) {
        self.apply_matrix(&gate_matrix(op.gate), &op.controls, op.target);
    }

    /// Applies `m` to `target` on the subspace where every control is 1.
    /// Only the `2^(n-1-controls)` affected amplitude pairs are visited.
    pub fn apply_matrix(&mut self, m: &Matrix2, controls: &[usize], target: usize) {
        let bit = 1usize << target;
        let cmask = controls.iter().fold(0usize, |acc, &q| acc | 1 << q);
        let mut fixed: Vec<usize> = controls.iter().copied().chain([target]).collect();
        fixed.sort_unstable();
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let diagonal = m[0][1] == zero && m[1][0] == zero;
        let free = self.num_qubits - fixed.len();
        for k in 0..1usize << free {
            let mut i0 = k;
            for &f in &fixed {
                let low = (1usize << f) - 1;
                i0 = (i0 & low) | ((i0 & !low) << 1);
            }
            i0 |= cmask;
            let i1 = i0 | bit;
            if diagonal {
                if m[0][0] != one {
                    self.amps[i0] *= m[0][0];
                }
                self.amps[i1] *= m[1][1];
            } else {
                let (a, b) = (self.amps[i0], self.amps[i1]);
                self.amps[i0] = m[0][0] * a + m[0][1] * b;
                self.amps[i1] = m[1][0] * a + m[1][1] * b;
            }
        }
    }
}
