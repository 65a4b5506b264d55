//! The JSON circuit file format.

use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};
use crate::error::{ApxError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateFile {
    pub op: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub inputs: usize,
    pub gates: Vec<GateFile>,
    pub outputs: Vec<usize>,
}

impl From<&Circuit> for CircuitFile {
    fn from(c: &Circuit) -> Self {
        let gates = c
            .gates()
            .iter()
            .map(|g| {
                let (op, args, input) = match g {
                    Gate::And(a) => ("AND", a.clone(), None),
                    Gate::Or(a) => ("OR", a.clone(), None),
                    Gate::Xor(a) => ("XOR", a.clone(), None),
                    Gate::Not(a) => ("NOT", vec![*a], None),
                    Gate::Const(false) => ("CONST0", vec![], None),
                    Gate::Const(true) => ("CONST1", vec![], None),
                    Gate::Input(i) => ("INPUT", vec![], Some(*i)),
                };
                GateFile { op: op.to_string(), args, input }
            })
            .collect();
        CircuitFile { inputs: c.num_inputs(), gates, outputs: c.outputs().to_vec() }
    }
}

impl TryFrom<&CircuitFile> for Circuit {
    type Error = ApxError;

    fn try_from(f: &CircuitFile) -> Result<Circuit> {
        let gates = f
            .gates
            .iter()
            .enumerate()
            .map(|(k, g)| {
                let bad = |msg: &str| ApxError::Parse(format!("gate {k} ({}): {msg}", g.op));
                Ok(match g.op.to_ascii_uppercase().as_str() {
                    "AND" => Gate::And(g.args.clone()),
                    "OR" => Gate::Or(g.args.clone()),
                    "XOR" => Gate::Xor(g.args.clone()),
                    "NOT" => match g.args.as_slice() {
                        [a] => Gate::Not(*a),
                        _ => return Err(bad("NOT takes exactly one argument")),
                    },
                    "CONST0" => Gate::Const(false),
                    "CONST1" => Gate::Const(true),
                    "INPUT" => Gate::Input(g.input.ok_or_else(|| bad("missing input index"))?),
                    _ => return Err(bad("unknown op")),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Circuit::new(f.inputs, gates, f.outputs.clone())
    }
}

impl Serialize for Circuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CircuitFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Circuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = CircuitFile::deserialize(d)?;
        Circuit::try_from(&f).map_err(serde::de::Error::custom)
    }
}

impl Circuit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuits always serialize")
    }

    pub fn from_json(s: &str) -> Result<Circuit> {
        serde_json::from_str(s).map_err(|e| ApxError::Parse(e.to_string()))
    }
}
