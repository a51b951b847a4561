//! Gate-level circuits, lowering passes and the depth metric.
//!
//! The native gate set is `{X, H, T, T†, Ry, CX, CCX, MCRY}`. `H`, `T` and
//! `T†` only appear once a Toffoli is lowered to one- and two-qubit gates.
//! Lowering is streamed gate by gate so the depth of very large circuits can
//! be measured without materialising them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("qubit {0} used twice in one gate")]
    DuplicateQubit(usize),
    #[error("register {0} overlaps another register or exceeds the width")]
    RegisterOverlap(String),
    #[error("VChain lowering needs {needed} ancillas, only {available} available")]
    InsufficientAncillas { needed: usize, available: usize },
    #[error("gate {0} is not in the hardware basis")]
    NotInBasis(&'static str),
}

/// How a multi-controlled Ry is lowered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "camelCase")
)]
pub enum McryMode {
    NoAncilla,
    VChain,
}

/// Lowering recorded on an MCRY gate. VChain ancillas occupy
/// `ancilla_base .. ancilla_base + k - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McryLowering {
    NoAncilla,
    VChain { ancilla_base: usize },
}

impl McryLowering {
    pub fn mode(&self) -> McryMode {
        match self {
            McryLowering::NoAncilla => McryMode::NoAncilla,
            McryLowering::VChain { .. } => McryMode::VChain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "camelCase")
)]
pub enum GateBasis {
    /// One-qubit gates, CX and CCX.
    Coarse,
    /// One-qubit gates and CX only.
    Hardware,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    H(usize),
    T(usize),
    Tdg(usize),
    Ry {
        qubit: usize,
        angle: f64,
    },
    Cx {
        control: usize,
        target: usize,
    },
    Ccx {
        c1: usize,
        c2: usize,
        target: usize,
    },
    Mcry {
        controls: Vec<usize>,
        target: usize,
        angle: f64,
        lowering: McryLowering,
    },
}

impl Gate {
    pub fn ry(qubit: usize, angle: f64) -> Gate {
        Gate::Ry { qubit, angle }
    }

    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::Cx { control, target }
    }

    pub fn ccx(c1: usize, c2: usize, target: usize) -> Gate {
        Gate::Ccx { c1, c2, target }
    }

    pub fn mcry(controls: Vec<usize>, target: usize, angle: f64, lowering: McryLowering) -> Gate {
        Gate::Mcry {
            controls,
            target,
            angle,
            lowering,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X(_) => "x",
            Gate::H(_) => "h",
            Gate::T(_) => "t",
            Gate::Tdg(_) => "tdg",
            Gate::Ry { .. } => "ry",
            Gate::Cx { .. } => "cx",
            Gate::Ccx { .. } => "ccx",
            Gate::Mcry { .. } => "mcry",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Ry { angle, .. } | Gate::Mcry { angle, .. } => Some(*angle),
            _ => None,
        }
    }

    /// Operand qubits; controls first, target last.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::H(q) | Gate::T(q) | Gate::Tdg(q) | Gate::Ry { qubit: q, .. } => {
                vec![*q]
            }
            Gate::Cx { control, target } => vec![*control, *target],
            Gate::Ccx { c1, c2, target } => vec![*c1, *c2, *target],
            Gate::Mcry {
                controls, target, ..
            } => {
                let mut q = controls.clone();
                q.push(*target);
                q
            }
        }
    }

    /// Ancillas a VChain lowering will touch, empty otherwise.
    pub fn ancillas(&self) -> core::ops::Range<usize> {
        match self {
            Gate::Mcry {
                controls,
                lowering: McryLowering::VChain { ancilla_base },
                ..
            } if controls.len() >= 2 => *ancilla_base..ancilla_base + controls.len() - 1,
            _ => 0..0,
        }
    }

    /// Operands plus lowering ancillas.
    pub fn footprint(&self) -> Vec<usize> {
        let mut q = self.qubits();
        q.extend(self.ancillas());
        q
    }

    pub fn in_basis(&self, basis: GateBasis) -> bool {
        match self {
            Gate::Mcry { .. } => false,
            Gate::Ccx { .. } => basis == GateBasis::Coarse,
            _ => true,
        }
    }
}

/// Named contiguous qubit range.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn qubits(&self) -> core::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    registers: Vec<Register>,
    measured: Vec<usize>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            ..Default::default()
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn measured(&self) -> &[usize] {
        &self.measured
    }

    pub fn add_register(&mut self, name: &str, start: usize, len: usize) -> Result<(), CircuitError> {
        let clash = start + len > self.width
            || self
                .registers
                .iter()
                .any(|r| start < r.start + r.len && r.start < start + len);
        if clash {
            return Err(CircuitError::RegisterOverlap(name.to_string()));
        }
        self.registers.push(Register {
            name: name.to_string(),
            start,
            len,
        });
        Ok(())
    }

    pub fn set_measured(&mut self, qubits: Vec<usize>) -> Result<(), CircuitError> {
        self.check_qubits(&qubits)?;
        self.measured = qubits;
        Ok(())
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<(), CircuitError> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.width {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    width: self.width,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// Appends a gate after checking its operands and lowering ancillas.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Gate::Mcry {
            controls,
            lowering: McryLowering::VChain { ancilla_base },
            ..
        } = &gate
        {
            let needed = controls.len().saturating_sub(1);
            if ancilla_base + needed > self.width {
                return Err(CircuitError::InsufficientAncillas {
                    needed,
                    available: self.width.saturating_sub(*ancilla_base),
                });
            }
        }
        self.check_qubits(&gate.footprint())?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<(), CircuitError> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// Copy with every gate lowered into `basis`.
    pub fn transpile(&self, basis: GateBasis) -> Circuit {
        let mut gates = Vec::new();
        for g in &self.gates {
            lower(g, basis, &mut |x| gates.push(x));
        }
        Circuit {
            width: self.width,
            gates,
            registers: self.registers.clone(),
            measured: self.measured.clone(),
        }
    }

    /// Longest chain of gates sharing qubits, native gates counting one layer.
    pub fn depth(&self) -> usize {
        let mut counter = DepthCounter::new(self.width);
        self.gates.iter().for_each(|g| counter.push(g));
        counter.depth()
    }

    /// Depth after lowering into `basis`, without building the lowered circuit.
    pub fn transpiled_depth(&self, basis: GateBasis) -> usize {
        let mut counter = DepthCounter::new(self.width);
        for g in &self.gates {
            lower(g, basis, &mut |x| counter.push(&x));
        }
        counter.depth()
    }

    /// Gate count after lowering into `basis`.
    pub fn transpiled_len(&self, basis: GateBasis) -> usize {
        let mut n = 0;
        for g in &self.gates {
            lower(g, basis, &mut |_| n += 1);
        }
        n
    }

    /// Qubits touched by a gate (including lowering ancillas) or a measurement.
    pub fn active_qubits(&self) -> usize {
        let mut touched = vec![false; self.width];
        for g in &self.gates {
            for q in g.footprint() {
                touched[q] = true;
            }
        }
        for &q in &self.measured {
            touched[q] = true;
        }
        touched.iter().filter(|&&t| t).count()
    }

    /// OpenQASM 2 text. Every gate must already be in the hardware basis.
    pub fn to_qasm(&self) -> Result<String, CircuitError> {
        let mut out = String::new();
        let _ = writeln!(out, "OPENQASM 2.0;\ninclude \"qelib1.inc\";");
        let _ = writeln!(out, "qreg q[{}];", self.width);
        if !self.measured.is_empty() {
            let _ = writeln!(out, "creg c[{}];", self.measured.len());
        }
        for g in &self.gates {
            let line = match *g {
                Gate::X(q) => format!("u3(pi,0,pi) q[{q}];"),
                Gate::H(q) => format!("u3(pi/2,0,pi) q[{q}];"),
                Gate::T(q) => format!("u3(0,0,pi/4) q[{q}];"),
                Gate::Tdg(q) => format!("u3(0,0,-pi/4) q[{q}];"),
                Gate::Ry { qubit, angle } => format!("u3({angle:?},0,0) q[{qubit}];"),
                Gate::Cx { control, target } => format!("cx q[{control}],q[{target}];"),
                ref other => return Err(CircuitError::NotInBasis(other.name())),
            };
            out.push_str(&line);
            out.push('\n');
        }
        for (i, q) in self.measured.iter().enumerate() {
            let _ = writeln!(out, "measure q[{q}] -> c[{i}];");
        }
        Ok(out)
    }
}

/// Streaming depth: each gate lands one layer above the deepest of its qubits.
#[derive(Debug, Clone)]
pub struct DepthCounter {
    levels: Vec<usize>,
    depth: usize,
}

impl DepthCounter {
    pub fn new(width: usize) -> Self {
        DepthCounter {
            levels: vec![0; width],
            depth: 0,
        }
    }

    pub fn push(&mut self, gate: &Gate) {
        let qubits = gate.qubits();
        let level = 1 + qubits.iter().map(|&q| self.levels[q]).max().unwrap_or(0);
        for q in qubits {
            self.levels[q] = level;
        }
        self.depth = self.depth.max(level);
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

fn lower(gate: &Gate, basis: GateBasis, sink: &mut dyn FnMut(Gate)) {
    match gate {
        Gate::Mcry {
            controls,
            target,
            angle,
            lowering,
        } => mcry_gates(controls, *target, *angle, *lowering, &mut |g| lower(&g, basis, sink)),
        Gate::Ccx { c1, c2, target } if basis == GateBasis::Hardware => {
            decompose_ccx(*c1, *c2, *target).into_iter().for_each(sink)
        }
        other => sink(other.clone()),
    }
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

fn controlled_ry(control: usize, target: usize, angle: f64, sink: &mut dyn FnMut(Gate)) {
    sink(Gate::ry(target, angle / 2.0));
    sink(Gate::cx(control, target));
    sink(Gate::ry(target, -angle / 2.0));
    sink(Gate::cx(control, target));
}

fn mcry_gates(
    controls: &[usize],
    target: usize,
    angle: f64,
    lowering: McryLowering,
    sink: &mut dyn FnMut(Gate),
) {
    let k = controls.len();
    match lowering {
        _ if k == 0 => sink(Gate::ry(target, angle)),
        _ if k == 1 => controlled_ry(controls[0], target, angle, sink),
        McryLowering::NoAncilla => {
            // uniformly controlled rotation with angle vector (0, …, 0, θ):
            // θ_i = (θ/N)(-1)^popcount((N-1) & gray(i))
            let n = 1usize << k;
            let all = n - 1;
            for i in 0..n {
                let sign = if (all & gray(i)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                sink(Gate::ry(target, sign * angle / n as f64));
                let flip = gray(i) ^ gray((i + 1) % n);
                sink(Gate::cx(controls[flip.trailing_zeros() as usize], target));
            }
        }
        McryLowering::VChain { ancilla_base } => {
            let anc = |j: usize| ancilla_base + j;
            let mut chain = Vec::with_capacity(k - 1);
            chain.push(Gate::ccx(controls[0], controls[1], anc(0)));
            for j in 1..k - 1 {
                chain.push(Gate::ccx(controls[j + 1], anc(j - 1), anc(j)));
            }
            for g in &chain {
                sink(g.clone());
            }
            controlled_ry(anc(k - 2), target, angle, sink);
            for g in chain.into_iter().rev() {
                sink(g);
            }
        }
    }
}

/// Lowers a multi-controlled Ry. NoAncilla gives `2^k` CX and `2^k` Ry;
/// VChain uses `k - 1` ancillas starting at `ancilla_base`.
pub fn decompose_mcry(
    controls: &[usize],
    target: usize,
    angle: f64,
    mode: McryMode,
    ancilla_base: usize,
) -> Vec<Gate> {
    let lowering = match mode {
        McryMode::NoAncilla => McryLowering::NoAncilla,
        McryMode::VChain => McryLowering::VChain { ancilla_base },
    };
    let mut out = Vec::new();
    mcry_gates(controls, target, angle, lowering, &mut |g| out.push(g));
    out
}

/// Standard Toffoli realisation with 6 CX and 9 one-qubit gates.
pub fn decompose_ccx(a: usize, b: usize, t: usize) -> [Gate; 15] {
    [
        Gate::H(t),
        Gate::cx(b, t),
        Gate::Tdg(t),
        Gate::cx(a, t),
        Gate::T(t),
        Gate::cx(b, t),
        Gate::Tdg(t),
        Gate::cx(a, t),
        Gate::T(b),
        Gate::T(t),
        Gate::H(t),
        Gate::cx(a, b),
        Gate::T(a),
        Gate::Tdg(b),
        Gate::cx(a, b),
    ]
}
