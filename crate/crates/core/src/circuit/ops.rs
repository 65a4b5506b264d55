//! Input relabelings, compositions and the named constructions.

use super::{Builder, Circuit};
use crate::bits::{expect_len, Bits};
use crate::error::{ApxError, Result};

/// Replacement for an `Input(i)` gate during relabeling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputSub {
    Input(usize),
    NotInput(usize),
    Const(bool),
}

/// A bijection on `[n]`, stored as 1-based images: `π(j) = images[j-1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v == 0 || v > n || seen[v] {
                return Err(ApxError::InvalidParameter(format!("{images:?} is not a permutation of 1..={n}")));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, j: usize) -> usize {
        self.images[j - 1]
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&j| self.apply(j)).collect() }
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }
}

impl Circuit {
    /// Rewrites every `Input(i)` as `sub(i)` in a circuit over `new_inputs` inputs.
    pub fn map_inputs(&self, new_inputs: usize, sub: impl Fn(usize) -> InputSub) -> Circuit {
        let mut b = Builder::new(new_inputs);
        let wires: Vec<usize> = (1..=self.num_inputs())
            .map(|i| match sub(i) {
                InputSub::Input(j) => b.input(j),
                InputSub::NotInput(j) => {
                    let g = b.input(j);
                    b.not(g)
                }
                InputSub::Const(v) => b.constant(v),
            })
            .collect();
        let outs = b.embed(self, &wires);
        b.finish(outs)
    }

    /// Fixes `xₙ := b`; the result reads `x₁..x_{n−1}`.
    pub fn fix_last(&self, b: bool) -> Result<Circuit> {
        let n = self.num_inputs();
        if n == 0 {
            return Err(ApxError::ZeroInputs);
        }
        Ok(self.map_inputs(n - 1, |i| if i == n { InputSub::Const(b) } else { InputSub::Input(i) }))
    }

    /// Fixes the rightmost `|z|` bits so that the result computes `x ↦ c(x∘z)`.
    pub fn fix_suffix(&self, z: &[bool]) -> Result<Circuit> {
        let n = self.num_inputs();
        if z.len() > n {
            return Err(ApxError::OutOfRange(format!("suffix of length {} on {n} inputs", z.len())));
        }
        let keep = n - z.len();
        Ok(self.map_inputs(keep, |i| if i <= keep { InputSub::Input(i) } else { InputSub::Const(z[i - keep - 1]) }))
    }

    /// Fixes the leftmost `|z|` bits so that the result computes `x ↦ c(z∘x)`.
    pub fn fix_prefix(&self, z: &[bool]) -> Result<Circuit> {
        let n = self.num_inputs();
        if z.len() > n {
            return Err(ApxError::OutOfRange(format!("prefix of length {} on {n} inputs", z.len())));
        }
        let k = z.len();
        Ok(self.map_inputs(n - k, |i| if i <= k { InputSub::Const(z[i - 1]) } else { InputSub::Input(i - k) }))
    }

    /// Swaps the `i`-th and `(i+1)`-th bits counted from the right, i.e. positions
    /// `n−i` and `n−i+1`.
    pub fn swap_adjacent(&self, i: usize) -> Result<Circuit> {
        let n = self.num_inputs();
        if i == 0 || i >= n {
            return Err(ApxError::OutOfRange(format!("swap index {i} on {n} inputs")));
        }
        let (a, b) = (n - i, n - i + 1);
        Ok(self.map_inputs(n, |j| {
            InputSub::Input(if j == a {
                b
            } else if j == b {
                a
            } else {
                j
            })
        }))
    }

    /// `(c∘π)(x) = c(y)` with `y_j = x_{π(j)}`.
    pub fn permute_inputs(&self, pi: &Permutation) -> Result<Circuit> {
        let n = self.num_inputs();
        if pi.len() != n {
            return Err(ApxError::LengthMismatch { expected: n, got: pi.len() });
        }
        Ok(self.map_inputs(n, |j| InputSub::Input(pi.apply(j))))
    }

    /// `r ↦ c(x⊕r)`.
    pub fn xor_shift(&self, x: &[bool]) -> Result<Circuit> {
        expect_len(x, self.num_inputs())?;
        Ok(self.map_inputs(self.num_inputs(), |i| if x[i - 1] { InputSub::NotInput(i) } else { InputSub::Input(i) }))
    }

    /// Output-wise negation.
    pub fn negate(&self) -> Circuit {
        let mut b = Builder::new(self.num_inputs());
        let wires = b.inputs(1..=self.num_inputs());
        let outs = b.embed(self, &wires);
        let negs = outs.into_iter().map(|o| b.not(o)).collect();
        b.finish(negs)
    }

    /// `u ↦ c(g(u))`.
    pub fn compose(&self, g: &Circuit) -> Result<Circuit> {
        if g.num_outputs() != self.num_inputs() {
            return Err(ApxError::ArityMismatch(format!(
                "inner circuit has {} outputs, outer reads {} inputs",
                g.num_outputs(),
                self.num_inputs()
            )));
        }
        let mut b = Builder::new(g.num_inputs());
        let wires = b.inputs(1..=g.num_inputs());
        let mid = b.embed(g, &wires);
        let outs = b.embed(self, &mid);
        Ok(b.finish(outs))
    }

    /// `(x₁,…,x_k) ↦ ⋁ c(x_j)` over `k` disjoint input blocks.
    pub fn or_amplify(&self, k: usize) -> Result<Circuit> {
        self.expect_single_output()?;
        if k == 0 {
            return Err(ApxError::InvalidParameter("amplification count must be positive".into()));
        }
        let n = self.num_inputs();
        let mut b = Builder::new(n * k);
        let copies = (0..k)
            .map(|j| {
                let wires = b.inputs(j * n + 1..=j * n + n);
                b.embed_bit(self, &wires)
            })
            .collect();
        let out = b.or(copies);
        Ok(b.finish_bit(out))
    }

    /// Circuits placed side by side on disjoint input blocks; outputs concatenated.
    pub fn parallel(parts: &[&Circuit]) -> Circuit {
        let total = parts.iter().map(|c| c.num_inputs()).sum();
        let mut b = Builder::new(total);
        let mut offset = 0;
        let mut outs = Vec::new();
        for c in parts {
            let wires = b.inputs(offset + 1..=offset + c.num_inputs());
            outs.extend(b.embed(c, &wires));
            offset += c.num_inputs();
        }
        b.finish(outs)
    }

    /// Accepts iff `c(x) = ⊕ᵢ xᵢ`.
    pub fn parity_tester(&self) -> Result<Circuit> {
        self.expect_single_output()?;
        let n = self.num_inputs();
        let mut b = Builder::new(n);
        let wires = b.inputs(1..=n);
        let out = b.embed_bit(self, &wires);
        let mut args = vec![out];
        args.extend(wires);
        let x = b.xor(args);
        let t = b.not(x);
        Ok(b.finish_bit(t))
    }

    /// Accepts iff the outputs equal `v`.
    pub fn indicator_eq(&self, v: &[bool]) -> Result<Circuit> {
        expect_len(v, self.num_outputs())?;
        let mut b = Builder::new(self.num_inputs());
        let wires = b.inputs(1..=self.num_inputs());
        let outs = b.embed(self, &wires);
        let lits = outs.into_iter().zip(v).map(|(o, &bit)| b.literal(o, bit)).collect();
        let t = b.and(lits);
        Ok(b.finish_bit(t))
    }

    /// Constant circuit on `n` inputs (`Null_n` or `True_n`).
    pub fn constant(n: usize, value: bool) -> Circuit {
        let mut b = Builder::new(n);
        let g = b.constant(value);
        b.finish_bit(g)
    }

    pub fn null(n: usize) -> Circuit {
        Circuit::constant(n, false)
    }

    pub fn truth(n: usize) -> Circuit {
        Circuit::constant(n, true)
    }

    /// `⊕_n`.
    pub fn parity(n: usize) -> Circuit {
        let mut b = Builder::new(n);
        let w = b.inputs(1..=n);
        let g = b.xor(w);
        b.finish_bit(g)
    }

    pub fn and_all(n: usize) -> Circuit {
        let mut b = Builder::new(n);
        let w = b.inputs(1..=n);
        let g = b.and(w);
        b.finish_bit(g)
    }

    pub fn or_all(n: usize) -> Circuit {
        let mut b = Builder::new(n);
        let w = b.inputs(1..=n);
        let g = b.or(w);
        b.finish_bit(g)
    }

    /// `x ↦ xᵢ` on `n` inputs.
    pub fn projection(n: usize, i: usize) -> Result<Circuit> {
        if i == 0 || i > n {
            return Err(ApxError::OutOfRange(format!("projection {i} on {n} inputs")));
        }
        let mut b = Builder::new(n);
        let g = b.input(i);
        Ok(b.finish_bit(g))
    }

    /// The `n`-output identity map.
    pub fn identity(n: usize) -> Circuit {
        let mut b = Builder::new(n);
        let w = b.inputs(1..=n);
        if w.is_empty() {
            let g = b.constant(false);
            return b.finish(vec![g]);
        }
        b.finish(w)
    }

    /// Accepts iff the integer index `Σ xᵢ2^{i−1}` is below `t`, for `0 ≤ t ≤ 2ⁿ`.
    pub fn threshold_less_than(n: usize, t: u128) -> Result<Circuit> {
        if n > 127 || t > (1u128 << n) {
            return Err(ApxError::OutOfRange(format!("threshold {t} outside 0..=2^{n}")));
        }
        if t == 0 || t == 1u128 << n {
            return Ok(Circuit::constant(n, t != 0));
        }
        // lt_j: the low j bits of x, read as an integer, are below the low j bits of t.
        let mut b = Builder::new(n);
        let mut lt = b.constant(false);
        for j in 1..=n {
            let x = b.input(j);
            let nx = b.not(x);
            lt = if (t >> (j - 1)) & 1 == 1 { b.or(vec![nx, lt]) } else { b.and(vec![nx, lt]) };
        }
        Ok(b.finish_bit(lt))
    }

    /// Circuit with `n_out` outputs computing `f` on all `2^{n_in}` inputs,
    /// as one DNF of minterms per output bit.
    pub fn from_function(n_in: usize, n_out: usize, cap: usize, f: impl Fn(&[bool]) -> Bits) -> Result<Circuit> {
        crate::bits::check_cap(n_in, cap)?;
        let mut b = Builder::new(n_in);
        let wires = b.inputs(1..=n_in);
        let negs: Vec<usize> = wires.iter().map(|&w| b.not(w)).collect();
        let mut terms: Vec<Vec<usize>> = vec![Vec::new(); n_out];
        for idx in 0..(1u64 << n_in) {
            let x = crate::bits::index_to_bits(idx, n_in);
            let y = f(&x);
            expect_len(&y, n_out)?;
            if !y.iter().any(|&v| v) {
                continue;
            }
            let lits = x.iter().enumerate().map(|(i, &v)| if v { wires[i] } else { negs[i] }).collect();
            let term = b.and(lits);
            for (k, &v) in y.iter().enumerate() {
                if v {
                    terms[k].push(term);
                }
            }
        }
        let outs = terms.into_iter().map(|t| b.or(t)).collect();
        Ok(b.finish(outs))
    }

    /// Random circuit with `size` fan-in-2 gates over the inputs and earlier
    /// gates; outputs are drawn from the last gates.
    pub fn random<R: rand::Rng + ?Sized>(n_in: usize, n_out: usize, size: usize, rng: &mut R) -> Circuit {
        let mut b = Builder::new(n_in);
        let mut pool = b.inputs(1..=n_in);
        if pool.is_empty() {
            pool.push(b.constant(rng.gen()));
        }
        for _ in 0..size {
            let p = pool[rng.gen_range(0..pool.len())];
            let q = pool[rng.gen_range(0..pool.len())];
            let g = match rng.gen_range(0..4) {
                0 => b.and(vec![p, q]),
                1 => b.or(vec![p, q]),
                2 => b.xor(vec![p, q]),
                _ => b.not(p),
            };
            pool.push(g);
        }
        let outs = (0..n_out).map(|k| pool[pool.len() - 1 - k % pool.len()]).collect();
        b.finish(outs)
    }
}
