//! Dense statevector simulation and seeded shot sampling.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::math;
use crate::pmf::{Pmf, PmfError};
use crate::rng::stream_rng;

/// Largest width the dense simulator accepts.
pub const MAX_WIDTH: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("width {0} exceeds the simulator limit of {MAX_WIDTH} qubits")]
    TooWide(usize),
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("qubit {0} listed twice")]
    DuplicateQubit(usize),
    #[error("shots must be at least 1")]
    NoShots,
    #[error(transparent)]
    Pmf(#[from] PmfError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    width: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `width` qubits.
    pub fn zero(width: usize) -> Result<Self, SimError> {
        Self::from_basis(width, 0)
    }

    pub fn from_basis(width: usize, index: usize) -> Result<Self, SimError> {
        if width > MAX_WIDTH {
            return Err(SimError::TooWide(width));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << width];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { width, amplitudes })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies a gate directly (multi-controlled gates act ideally).
    ///
    /// # Panics
    /// If an operand is outside the register; circuits validate this on push.
    pub fn apply(&mut self, gate: &Gate) {
        match *gate {
            Gate::X(q) => self.controlled_x(0, q),
            Gate::H(q) => {
                let h = core::f64::consts::FRAC_1_SQRT_2;
                self.single(q, [[h, h], [h, -h]].map(|r| r.map(|x| Complex64::new(x, 0.0))));
            }
            Gate::T(q) => self.phase(q, core::f64::consts::FRAC_PI_4),
            Gate::Tdg(q) => self.phase(q, -core::f64::consts::FRAC_PI_4),
            Gate::Ry { qubit, angle } => self.ry(0, qubit, angle),
            Gate::Cx { control, target } => self.controlled_x(1 << control, target),
            Gate::Ccx { c1, c2, target } => self.controlled_x((1 << c1) | (1 << c2), target),
            Gate::Mcry {
                ref controls,
                target,
                angle,
                ..
            } => {
                let mask = controls.iter().fold(0, |m, &c| m | (1 << c));
                self.ry(mask, target, angle);
            }
        }
    }

    fn single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in (0..self.amplitudes.len()).filter(|i| i & bit == 0) {
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
            self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn phase(&mut self, q: usize, angle: f64) {
        let p = Complex64::new(math::cos(angle), math::sin(angle));
        let bit = 1 << q;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & bit != 0 {
                *a *= p;
            }
        }
    }

    fn controlled_x(&mut self, mask: usize, target: usize) {
        let bit = 1 << target;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 && i & mask == mask {
                self.amplitudes.swap(i, i | bit);
            }
        }
    }

    fn ry(&mut self, mask: usize, target: usize, angle: f64) {
        let (c, s) = (math::cos(angle / 2.0), math::sin(angle / 2.0));
        let bit = 1 << target;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 && i & mask == mask {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                self.amplitudes[i] = a0 * c - a1 * s;
                self.amplitudes[i | bit] = a0 * s + a1 * c;
            }
        }
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<(), SimError> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.width {
                return Err(SimError::QubitOutOfRange {
                    qubit: q,
                    width: self.width,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(SimError::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Raw outcome probabilities of `qubits`; `qubits[j]` is bit `j` of the outcome.
    fn marginal_weights(&self, qubits: &[usize]) -> Result<Vec<f64>, SimError> {
        self.check_qubits(qubits)?;
        let mut out = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let outcome = qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &q)| acc | (((i >> q) & 1) << j));
            out[outcome] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Distribution of the listed qubits, little-endian in list order.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Pmf, SimError> {
        Ok(Pmf::new(self.marginal_weights(qubits)?)?)
    }

    /// `shots` i.i.d. outcomes of measuring `qubits`, drawn from stream 0 of `seed`.
    pub fn sample_outcomes(
        &self,
        qubits: &[usize],
        shots: usize,
        seed: u64,
    ) -> Result<Vec<usize>, SimError> {
        self.sample_outcomes_on(qubits, shots, seed, 0)
    }

    /// As [`StateVector::sample_outcomes`], on RNG stream `stream` of `seed`.
    pub fn sample_outcomes_on(
        &self,
        qubits: &[usize],
        shots: usize,
        seed: u64,
        stream: u64,
    ) -> Result<Vec<usize>, SimError> {
        if shots == 0 {
            return Err(SimError::NoShots);
        }
        let weights = self.marginal_weights(qubits)?;
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut total = 0.0;
        for w in &weights {
            total += w;
            cumulative.push(total);
        }
        let last_nonzero = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        let mut rng = stream_rng(seed, stream);
        Ok((0..shots)
            .map(|_| {
                let u = rng.random::<f64>() * total;
                cumulative.partition_point(|&c| c <= u).min(last_nonzero)
            })
            .collect())
    }

    pub fn sample(
        &self,
        qubits: &[usize],
        shots: usize,
        seed: u64,
    ) -> Result<EmpiricalPmf, SimError> {
        let outcomes = self.sample_outcomes(qubits, shots, seed)?;
        Ok(EmpiricalPmf::from_outcomes(1 << qubits.len(), &outcomes))
    }
}

/// Runs a circuit on `|0…0⟩`.
pub fn run(circuit: &Circuit) -> Result<StateVector, SimError> {
    run_from(circuit, 0)
}

/// Runs a circuit on the basis state `|index⟩`.
pub fn run_from(circuit: &Circuit, index: usize) -> Result<StateVector, SimError> {
    let mut state = StateVector::from_basis(circuit.width(), index)?;
    circuit.gates().iter().for_each(|g| state.apply(g));
    Ok(state)
}

/// Dense unitary of a gate list, row-major: entry `(r, c)` is `⟨r|U|c⟩`.
pub fn unitary(width: usize, gates: &[Gate]) -> Result<Vec<Complex64>, SimError> {
    let dim = 1usize << width;
    let mut u = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut state = StateVector::from_basis(width, col)?;
        gates.iter().for_each(|g| state.apply(g));
        for (row, a) in state.amplitudes.iter().enumerate() {
            u[row * dim + col] = *a;
        }
    }
    Ok(u)
}

/// Outcome counts over `counts.len()` possible outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmpiricalPmf {
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl EmpiricalPmf {
    pub fn from_outcomes(outcomes_len: usize, outcomes: &[usize]) -> Self {
        let mut counts = vec![0u64; outcomes_len];
        for &o in outcomes {
            counts[o] += 1;
        }
        EmpiricalPmf {
            counts,
            shots: outcomes.len() as u64,
        }
    }

    pub fn as_pmf(&self) -> Pmf {
        let shots = self.shots as f64;
        Pmf::new(self.counts.iter().map(|&c| c as f64 / shots).collect())
            .expect("counts sum to shots")
    }
}
