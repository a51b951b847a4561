//! Grover–Rudolph loading circuits, the unequal-width ripple adder and the
//! deconvolution pipeline that joins them.
//!
//! Grover–Rudolph fixes the most significant bit first: level `m` of the
//! angle tree rotates qubit `n - 1 - m` of the register, controlled on the
//! `m` bits above it. With qubit 0 as the least significant bit, basis state
//! `|x⟩` ends up with probability `pmf[x]`.

use alloc::format;
use alloc::vec::Vec;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, McryLowering, McryMode};
use crate::math;
use crate::pmf::Pmf;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrepError {
    #[error("adder needs 1 <= a <= b, got a = {a}, b = {b}")]
    AdderWidths { a: usize, b: usize },
    #[error("pipeline needs at least one factor")]
    NoFactors,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Rotation angles per level; level `m` holds `2^m` angles in `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTree {
    pub levels: Vec<Vec<f64>>,
}

impl AngleTree {
    /// Number of qubits the tree loads.
    pub fn qubits(&self) -> usize {
        self.levels.len()
    }
}

/// Qubits needed to hold a PMF of length `len`.
pub fn register_width(len: usize) -> usize {
    math::ceil_log2(len)
}

/// Conditional-probability angles `θ = 2 acos(√e)`, `e` being the share of a
/// region's mass in its left half. Empty regions get `θ = 0`.
pub fn gr_angles(pmf: &Pmf) -> AngleTree {
    let n = register_width(pmf.len());
    let padded = pmf.padded(1 << n);
    let mut levels = Vec::with_capacity(n);
    for m in 0..n {
        let span = 1usize << (n - m);
        let level = (0..1usize << m)
            .map(|i| {
                let region = &padded[i * span..(i + 1) * span];
                let left: f64 = region[..span / 2].iter().sum();
                let total = left + region[span / 2..].iter().sum::<f64>();
                if total <= 0.0 {
                    0.0
                } else {
                    2.0 * math::acos(math::sqrt((left / total).clamp(0.0, 1.0)))
                }
            })
            .collect();
        levels.push(level);
    }
    AngleTree { levels }
}

/// Appends the Grover–Rudolph gates of `tree` acting on `qubits` (least
/// significant first). VChain mode needs `qubits.len() - 2` ancillas from
/// `ancilla_base`.
pub fn append_gr(
    circuit: &mut Circuit,
    qubits: &[usize],
    tree: &AngleTree,
    mode: McryMode,
    ancilla_base: usize,
) -> Result<(), CircuitError> {
    let n = qubits.len();
    assert_eq!(tree.qubits(), n, "angle tree does not match register width");
    for (m, angles) in tree.levels.iter().enumerate() {
        let target = qubits[n - 1 - m];
        // control j sits on qubit n-1-j and must match bit m-1-j of the region
        let controls: Vec<usize> = (0..m).map(|j| qubits[n - 1 - j]).collect();
        let lowering = match mode {
            McryMode::VChain if m >= 2 => McryLowering::VChain { ancilla_base },
            _ => McryLowering::NoAncilla,
        };
        for (i, &angle) in angles.iter().enumerate() {
            if m == 0 {
                circuit.push(Gate::ry(target, angle))?;
                continue;
            }
            let flips: Vec<usize> = (0..m)
                .filter(|&j| (i >> (m - 1 - j)) & 1 == 0)
                .map(|j| controls[j])
                .collect();
            circuit.extend(flips.iter().map(|&q| Gate::X(q)))?;
            circuit.push(Gate::mcry(controls.clone(), target, angle, lowering))?;
            circuit.extend(flips.iter().map(|&q| Gate::X(q)))?;
        }
    }
    Ok(())
}

/// Ancillas a Grover–Rudolph preparation of `n` qubits needs in `mode`.
pub fn gr_ancillas(n: usize, mode: McryMode) -> usize {
    match mode {
        McryMode::VChain if n >= 3 => n - 2,
        _ => 0,
    }
}

/// Standalone Grover–Rudolph circuit: register `phi`, then VChain ancillas.
pub fn build_gr(pmf: &Pmf, mode: McryMode) -> Circuit {
    let tree = gr_angles(pmf);
    let n = tree.qubits();
    let extra = gr_ancillas(n, mode);
    let mut circuit = Circuit::new(n + extra);
    let qubits: Vec<usize> = (0..n).collect();
    circuit.add_register("phi", 0, n).expect("fresh circuit");
    if extra > 0 {
        circuit.add_register("ancillaVChain", n, extra).expect("fresh circuit");
    }
    append_gr(&mut circuit, &qubits, &tree, mode, n).expect("qubits in range");
    circuit.set_measured(qubits).expect("qubits in range");
    circuit
}

/// Qubit roles of one adder: `x` (width `a`) is added into `y` (width `b`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdderLayout {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    /// `b` qubits; the last one becomes the sum's most significant bit.
    pub ancilla: Vec<usize>,
}

impl AdderLayout {
    pub fn new(x: Vec<usize>, y: Vec<usize>, ancilla: Vec<usize>) -> Result<Self, PrepError> {
        let (a, b) = (x.len(), y.len());
        if a == 0 || a > b || ancilla.len() != b {
            return Err(PrepError::AdderWidths { a, b });
        }
        Ok(AdderLayout { x, y, ancilla })
    }

    pub fn a(&self) -> usize {
        self.x.len()
    }

    pub fn b(&self) -> usize {
        self.y.len()
    }

    /// `y[0..b]` followed by the final carry, least significant first.
    pub fn sum_qubits(&self) -> Vec<usize> {
        let mut s = self.y.clone();
        s.push(self.ancilla[self.b() - 1]);
        s
    }

    /// Ancillas left holding carries (never uncomputed).
    pub fn garbage(&self) -> &[usize] {
        &self.ancilla[..self.b() - 1]
    }
}

/// Appends the four-loop ripple adder. Bit `i` of `x` and `y` first writes its
/// generate bit into `ancilla[i]` and its propagate bit into `y[i]`; carries
/// then ripple up the ancillas and are folded back into `y`.
pub fn append_adder(circuit: &mut Circuit, layout: &AdderLayout) -> Result<(), CircuitError> {
    let (a, b) = (layout.a(), layout.b());
    let (x, y, anc) = (&layout.x, &layout.y, &layout.ancilla);
    for i in 0..a {
        circuit.push(Gate::ccx(x[i], y[i], anc[i]))?;
    }
    for i in (0..a).rev() {
        circuit.push(Gate::cx(x[i], y[i]))?;
    }
    for i in 1..b {
        circuit.push(Gate::ccx(y[i], anc[i - 1], anc[i]))?;
    }
    for i in 0..b - 1 {
        circuit.push(Gate::cx(anc[i], y[i + 1]))?;
    }
    Ok(())
}

/// Adder on `a + 2b` qubits: `phi1`, `phi2`, `ancillaAdder` (`b - 1`), `carry`.
pub fn build_adder(a: usize, b: usize) -> Result<Circuit, PrepError> {
    let layout = AdderLayout::new(
        (0..a).collect(),
        (a..a + b).collect(),
        (a + b..a + 2 * b).collect(),
    )?;
    let mut circuit = Circuit::new(a + 2 * b);
    circuit.add_register("phi1", 0, a)?;
    circuit.add_register("phi2", a, b)?;
    if b > 1 {
        circuit.add_register("ancillaAdder", a + b, b - 1)?;
    }
    circuit.add_register("carry", a + 2 * b - 1, 1)?;
    append_adder(&mut circuit, &layout)?;
    circuit.set_measured(layout.sum_qubits())?;
    Ok(circuit)
}

/// Loading circuit for the convolution of `factors`: each factor is prepared
/// on its own register (`phi1`, `phi2`, …) and the registers are summed by a
/// left fold of adders. Factors are loaded in order of register width.
///
/// The measured qubits are the final sum register. A single factor is just
/// its Grover–Rudolph preparation.
pub fn build_pipeline(factors: &[Pmf], mode: McryMode) -> Result<Circuit, PrepError> {
    if factors.is_empty() {
        return Err(PrepError::NoFactors);
    }
    let mut trees: Vec<AngleTree> = factors
        .iter()
        .map(|f| {
            // a length-1 factor still needs one qubit to feed the adder
            let f = if f.len() < 2 { f.padded(2) } else { f.clone() };
            gr_angles(&f)
        })
        .collect();
    trees.sort_by_key(AngleTree::qubits);
    let widths: Vec<usize> = trees.iter().map(AngleTree::qubits).collect();

    // phi registers, then adder ancillas per stage, then VChain ancillas
    let mut next = 0;
    let mut phis = Vec::new();
    for &w in &widths {
        phis.push((next..next + w).collect::<Vec<usize>>());
        next += w;
    }
    let mut stages = Vec::new();
    let mut acc = phis[0].clone();
    for phi in &phis[1..] {
        let (x, y) = if acc.len() <= phi.len() {
            (acc.clone(), phi.clone())
        } else {
            (phi.clone(), acc.clone())
        };
        let b = y.len();
        let layout = AdderLayout::new(x, y, (next..next + b).collect())?;
        next += b;
        acc = layout.sum_qubits();
        stages.push(layout);
    }
    let vchain_bases: Vec<usize> = widths
        .iter()
        .map(|&w| {
            let base = next;
            next += gr_ancillas(w, mode);
            base
        })
        .collect();

    let mut circuit = Circuit::new(next);
    for (i, phi) in phis.iter().enumerate() {
        circuit.add_register(&format!("phi{}", i + 1), phi[0], phi.len())?;
    }
    for (s, layout) in stages.iter().enumerate() {
        let b = layout.b();
        if b > 1 {
            circuit.add_register(&format!("ancillaAdder{}", s + 1), layout.ancilla[0], b - 1)?;
        }
        circuit.add_register(&format!("carry{}", s + 1), layout.ancilla[b - 1], 1)?;
    }
    for (i, (&w, &base)) in widths.iter().zip(&vchain_bases).enumerate() {
        let extra = gr_ancillas(w, mode);
        if extra > 0 {
            circuit.add_register(&format!("ancillaVChain{}", i + 1), base, extra)?;
        }
    }

    for ((tree, phi), &base) in trees.iter().zip(&phis).zip(&vchain_bases) {
        append_gr(&mut circuit, phi, tree, mode, base)?;
    }
    for layout in &stages {
        append_adder(&mut circuit, layout)?;
    }
    circuit.set_measured(acc)?;
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim;
    use alloc::vec;

    #[test]
    fn angle_examples() {
        let t = gr_angles(&Pmf::new(vec![0.5, 0.5]).unwrap());
        assert!((t.levels[0][0] - core::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let t = gr_angles(&Pmf::new(vec![1.0, 0.0]).unwrap());
        assert_eq!(t.levels, vec![vec![0.0]]);
        let t = gr_angles(&Pmf::new(vec![0.0, 1.0]).unwrap());
        assert!((t.levels[0][0] - core::f64::consts::PI).abs() < 1e-15);
        assert_eq!(gr_angles(&Pmf::delta(1, 0)).qubits(), 0);
    }

    #[test]
    fn two_qubit_shape() {
        let c = build_gr(&Pmf::new(vec![0.25, 0.5, 0.25, 0.0]).unwrap(), McryMode::NoAncilla);
        let names: Vec<&str> = c.gates().iter().map(Gate::name).collect();
        assert_eq!(names, ["ry", "x", "mcry", "x", "mcry"]);
        assert_eq!(c.gates()[0].qubits(), vec![1]);
        assert_eq!(c.gates()[2].qubits(), vec![1, 0]);
        let p = sim::run(&c).unwrap().probabilities();
        for (got, want) in p.iter().zip([0.25, 0.5, 0.25, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn delta_loads_zero_state() {
        let c = build_gr(&Pmf::delta(4, 0), McryMode::VChain);
        assert!(c.gates().iter().filter_map(Gate::angle).all(|a| a == 0.0));
        assert_eq!(sim::run(&c).unwrap().probabilities()[0], 1.0);
    }

    #[test]
    fn vchain_adds_ancillas_from_three_qubits() {
        let c = build_gr(&Pmf::uniform(8), McryMode::VChain);
        assert_eq!(c.width(), 4);
        assert_eq!(build_gr(&Pmf::uniform(4), McryMode::VChain).width(), 2);
        assert_eq!(build_gr(&Pmf::uniform(16), McryMode::VChain).width(), 6);
    }

    #[test]
    fn adder_rejects_bad_widths() {
        assert_eq!(build_adder(3, 2), Err(PrepError::AdderWidths { a: 3, b: 2 }));
        assert_eq!(build_adder(0, 2), Err(PrepError::AdderWidths { a: 0, b: 2 }));
    }

    #[test]
    fn adder_one_plus_one() {
        let c = build_adder(1, 1).unwrap();
        let s = sim::run_from(&c, 0b011).unwrap();
        let m = s.marginal(c.measured()).unwrap();
        assert_eq!(m[2], 1.0);
    }

    #[test]
    fn adder_column_order() {
        let c = build_adder(2, 3).unwrap();
        let names: Vec<&str> = c.gates().iter().map(Gate::name).collect();
        assert_eq!(names, ["ccx", "ccx", "cx", "cx", "ccx", "ccx", "cx", "cx"]);
        assert_eq!(c.measured(), &[2, 3, 4, 7]);
    }

    #[test]
    fn pipeline_trivial() {
        let coin = Pmf::new(vec![0.5, 0.5]).unwrap();
        let c = build_pipeline(&[coin.clone(), coin], McryMode::NoAncilla).unwrap();
        let m = sim::run(&c).unwrap().marginal(c.measured()).unwrap();
        for (got, want) in m.iter().zip([0.25, 0.5, 0.25, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        let d = Pmf::delta(2, 0);
        let c = build_pipeline(&[d.clone(), d], McryMode::NoAncilla).unwrap();
        let m = sim::run(&c).unwrap().marginal(c.measured()).unwrap();
        assert_eq!(m[0], 1.0);
        assert_eq!(build_pipeline(&[], McryMode::VChain), Err(PrepError::NoFactors));
    }
}
