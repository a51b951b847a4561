//! JSON netlists and CSV logs.

use std::io::Write;

use qdeconv_core::circuit::CircuitError;
use qdeconv_core::deconv::opt::TraceRecord;
use qdeconv_core::{Circuit, Gate, McryLowering, Register};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("unknown gate kind `{0}`")]
    UnknownKind(String),
    #[error("gate `{kind}` expects {expected} qubits, got {got}")]
    Arity {
        kind: String,
        expected: String,
        got: usize,
    },
    #[error("gate `{0}` needs an angle")]
    MissingAngle(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How a netlist MCRY is lowered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum LoweringSpec {
    NoAncilla,
    VChain { ancilla_base: usize },
}

impl From<McryLowering> for LoweringSpec {
    fn from(l: McryLowering) -> Self {
        match l {
            McryLowering::NoAncilla => LoweringSpec::NoAncilla,
            McryLowering::VChain { ancilla_base } => LoweringSpec::VChain { ancilla_base },
        }
    }
}

impl From<LoweringSpec> for McryLowering {
    fn from(l: LoweringSpec) -> Self {
        match l {
            LoweringSpec::NoAncilla => McryLowering::NoAncilla,
            LoweringSpec::VChain { ancilla_base } => McryLowering::VChain { ancilla_base },
        }
    }
}

/// One gate: operands are listed controls first, target last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lowering: Option<LoweringSpec>,
}

impl From<&Gate> for GateSpec {
    fn from(g: &Gate) -> Self {
        let lowering = match g {
            Gate::Mcry { lowering, .. } => Some((*lowering).into()),
            _ => None,
        };
        GateSpec {
            kind: g.name().to_string(),
            qubits: g.qubits(),
            angle: g.angle(),
            lowering,
        }
    }
}

impl TryFrom<&GateSpec> for Gate {
    type Error = FormatError;

    fn try_from(s: &GateSpec) -> Result<Gate, FormatError> {
        let arity = |n: usize| {
            if s.qubits.len() == n {
                Ok(())
            } else {
                Err(FormatError::Arity {
                    kind: s.kind.clone(),
                    expected: n.to_string(),
                    got: s.qubits.len(),
                })
            }
        };
        let angle = || s.angle.ok_or_else(|| FormatError::MissingAngle(s.kind.clone()));
        let q = &s.qubits;
        Ok(match s.kind.as_str() {
            "x" => arity(1).map(|_| Gate::X(q[0]))?,
            "h" => arity(1).map(|_| Gate::H(q[0]))?,
            "t" => arity(1).map(|_| Gate::T(q[0]))?,
            "tdg" => arity(1).map(|_| Gate::Tdg(q[0]))?,
            "ry" => {
                arity(1)?;
                Gate::ry(q[0], angle()?)
            }
            "cx" => arity(2).map(|_| Gate::cx(q[0], q[1]))?,
            "ccx" => arity(3).map(|_| Gate::ccx(q[0], q[1], q[2]))?,
            "mcry" => {
                let (&target, controls) = q.split_last().ok_or_else(|| FormatError::Arity {
                    kind: s.kind.clone(),
                    expected: "at least 1".into(),
                    got: 0,
                })?;
                let lowering = s.lowering.unwrap_or(LoweringSpec::NoAncilla).into();
                Gate::mcry(controls.to_vec(), target, angle()?, lowering)
            }
            other => return Err(FormatError::UnknownKind(other.to_string())),
        })
    }
}

/// Serialized circuit with its register map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    pub width: usize,
    pub registers: Vec<Register>,
    pub gates: Vec<GateSpec>,
    pub measured: Vec<usize>,
}

impl From<&Circuit> for Netlist {
    fn from(c: &Circuit) -> Self {
        Netlist {
            width: c.width(),
            registers: c.registers().to_vec(),
            gates: c.gates().iter().map(GateSpec::from).collect(),
            measured: c.measured().to_vec(),
        }
    }
}

impl TryFrom<&Netlist> for Circuit {
    type Error = FormatError;

    fn try_from(n: &Netlist) -> Result<Circuit, FormatError> {
        let mut c = Circuit::new(n.width);
        for r in &n.registers {
            c.add_register(&r.name, r.start, r.len)?;
        }
        for g in &n.gates {
            c.push(Gate::try_from(g)?)?;
        }
        c.set_measured(n.measured.clone())?;
        Ok(c)
    }
}

pub fn circuit_to_json(c: &Circuit) -> Result<String, FormatError> {
    Ok(serde_json::to_string_pretty(&Netlist::from(c))?)
}

pub fn circuit_from_json(text: &str) -> Result<Circuit, FormatError> {
    let netlist: Netlist = serde_json::from_str(text)?;
    Circuit::try_from(&netlist)
}

/// Iteration log with columns `iteration,cost,radius,gradNorm`.
pub fn write_trace<W: Write>(out: W, trace: &[TraceRecord]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    for record in trace {
        w.serialize(record)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ShotRow {
    shot: usize,
    outcome: usize,
}

/// Raw shot log with columns `shot,outcome`.
pub fn write_shot_log<W: Write>(out: W, outcomes: &[usize]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    for (shot, &outcome) in outcomes.iter().enumerate() {
        w.serialize(ShotRow { shot, outcome })?;
    }
    w.flush()?;
    Ok(())
}
