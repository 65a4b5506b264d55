use super::{Circuit, Gate};

/// Incremental circuit construction; every method returns the new gate's index.
#[derive(Clone, Debug)]
pub struct Builder {
    num_inputs: usize,
    gates: Vec<Gate>,
    input_gate: Vec<Option<usize>>,
    const_gate: [Option<usize>; 2],
}

impl Builder {
    pub fn new(num_inputs: usize) -> Self {
        Builder { num_inputs, gates: Vec::new(), input_gate: vec![None; num_inputs + 1], const_gate: [None; 2] }
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    /// Gate reading `x_i` (1-based); shared between calls.
    pub fn input(&mut self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.num_inputs, "input {i} out of range");
        if let Some(g) = self.input_gate[i] {
            return g;
        }
        let g = self.push(Gate::Input(i));
        self.input_gate[i] = Some(g);
        g
    }

    pub fn inputs(&mut self, range: std::ops::RangeInclusive<usize>) -> Vec<usize> {
        range.map(|i| self.input(i)).collect()
    }

    pub fn constant(&mut self, b: bool) -> usize {
        if let Some(g) = self.const_gate[b as usize] {
            return g;
        }
        let g = self.push(Gate::Const(b));
        self.const_gate[b as usize] = Some(g);
        g
    }

    pub fn not(&mut self, a: usize) -> usize {
        self.push(Gate::Not(a))
    }

    pub fn and(&mut self, args: Vec<usize>) -> usize {
        self.push(Gate::And(args))
    }

    pub fn or(&mut self, args: Vec<usize>) -> usize {
        self.push(Gate::Or(args))
    }

    pub fn xor(&mut self, args: Vec<usize>) -> usize {
        self.push(Gate::Xor(args))
    }

    /// `a` when `positive`, else `¬a`.
    pub fn literal(&mut self, a: usize, positive: bool) -> usize {
        if positive {
            a
        } else {
            self.not(a)
        }
    }

    /// `[a = b]`.
    pub fn eq(&mut self, a: usize, b: usize) -> usize {
        let x = self.xor(vec![a, b]);
        self.not(x)
    }

    /// Copies `c`, wiring its `Input(i)` to `wires[i-1]`; returns the copied outputs.
    pub fn embed(&mut self, c: &Circuit, wires: &[usize]) -> Vec<usize> {
        assert_eq!(wires.len(), c.num_inputs(), "embed arity");
        let mut map = Vec::with_capacity(c.size());
        for g in c.gates() {
            let id = match g {
                Gate::Input(i) => wires[i - 1],
                Gate::Const(b) => self.constant(*b),
                Gate::Not(a) => self.push(Gate::Not(map[*a])),
                Gate::And(a) => self.push(Gate::And(a.iter().map(|&k| map[k]).collect())),
                Gate::Or(a) => self.push(Gate::Or(a.iter().map(|&k| map[k]).collect())),
                Gate::Xor(a) => self.push(Gate::Xor(a.iter().map(|&k| map[k]).collect())),
            };
            map.push(id);
        }
        c.outputs().iter().map(|&o| map[o]).collect()
    }

    /// Like [`Builder::embed`] for a single-output circuit.
    pub fn embed_bit(&mut self, c: &Circuit, wires: &[usize]) -> usize {
        let outs = self.embed(c, wires);
        assert_eq!(outs.len(), 1, "embed_bit needs a single-output circuit");
        outs[0]
    }

    pub fn finish(self, outputs: Vec<usize>) -> Circuit {
        assert!(!outputs.is_empty(), "a circuit needs at least one output");
        Circuit::from_parts_unchecked(self.num_inputs, self.gates, outputs)
    }

    pub fn finish_bit(self, output: usize) -> Circuit {
        self.finish(vec![output])
    }
}
