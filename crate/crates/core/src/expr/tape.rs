use std::collections::HashMap;
use std::sync::Arc;

use super::{flat_exp, step, step_derivative, Node};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
enum Op {
    Var(usize),
    Const(f64),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
    Powi(usize, i32),
    Exp(usize),
    Sin(usize),
    Cos(usize),
    Atan(usize),
    Sqrt(usize),
    Square(usize),
    Step { arg: usize, lo: f64, hi: f64 },
    FlatExp { arg: usize, order: u32 },
    Gate(usize, usize),
}

impl Op {
    fn inputs(self) -> [Option<usize>; 2] {
        match self {
            Op::Var(_) | Op::Const(_) => [None, None],
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) | Op::Div(a, b) | Op::Gate(a, b) => {
                [Some(a), Some(b)]
            }
            Op::Neg(a)
            | Op::Powi(a, _)
            | Op::Exp(a)
            | Op::Sin(a)
            | Op::Cos(a)
            | Op::Atan(a)
            | Op::Sqrt(a)
            | Op::Square(a)
            | Op::Step { arg: a, .. }
            | Op::FlatExp { arg: a, .. } => [Some(a), None],
        }
    }
}

/// Topologically ordered instruction list; each DAG node appears once.
#[derive(Debug)]
pub(crate) struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
}

impl Tape {
    pub(crate) fn compile(roots: &[&Arc<Node>]) -> Tape {
        let mut tape = Tape {
            ops: Vec::new(),
            outputs: Vec::with_capacity(roots.len()),
        };
        let mut seen: HashMap<*const Node, usize> = HashMap::new();
        for root in roots {
            let slot = tape.emit(root, &mut seen);
            tape.outputs.push(slot);
        }
        tape
    }

    pub(crate) fn len(&self) -> usize {
        self.ops.len()
    }

    fn push(&mut self, op: Op) -> usize {
        self.ops.push(op);
        self.ops.len() - 1
    }

    fn emit(&mut self, node: &Arc<Node>, seen: &mut HashMap<*const Node, usize>) -> usize {
        let key = Arc::as_ptr(node);
        if let Some(&slot) = seen.get(&key) {
            return slot;
        }
        let op = match &**node {
            Node::Var(i) => Op::Var(*i),
            Node::Const(c) => Op::Const(*c),
            Node::Add(a, b) => Op::Add(self.emit(a, seen), self.emit(b, seen)),
            Node::Sub(a, b) => Op::Sub(self.emit(a, seen), self.emit(b, seen)),
            Node::Mul(a, b) => Op::Mul(self.emit(a, seen), self.emit(b, seen)),
            Node::Div(a, b) => Op::Div(self.emit(a, seen), self.emit(b, seen)),
            Node::Neg(a) => Op::Neg(self.emit(a, seen)),
            Node::Powi(a, k) => Op::Powi(self.emit(a, seen), *k),
            Node::Exp(a) => Op::Exp(self.emit(a, seen)),
            Node::Sin(a) => Op::Sin(self.emit(a, seen)),
            Node::Cos(a) => Op::Cos(self.emit(a, seen)),
            Node::Atan(a) => Op::Atan(self.emit(a, seen)),
            Node::Sqrt(a) => Op::Sqrt(self.emit(a, seen)),
            Node::Bump { arg, a, b } => {
                let t = self.emit(arg, seen);
                let sq = self.push(Op::Square(t));
                Op::Step {
                    arg: sq,
                    lo: a * a,
                    hi: b * b,
                }
            }
            Node::Step { arg, lo, hi } => Op::Step {
                arg: self.emit(arg, seen),
                lo: *lo,
                hi: *hi,
            },
            Node::FlatExp { arg, order } => Op::FlatExp {
                arg: self.emit(arg, seen),
                order: *order,
            },
            Node::Gate { weight, value } => Op::Gate(self.emit(weight, seen), self.emit(value, seen)),
        };
        let slot = self.push(op);
        seen.insert(key, slot);
        slot
    }

    fn value(op: Op, v: &[f64], x: &[f64]) -> Result<f64> {
        let out = match op {
            Op::Var(i) => x[i],
            Op::Const(c) => c,
            Op::Add(a, b) => v[a] + v[b],
            Op::Sub(a, b) => v[a] - v[b],
            Op::Mul(a, b) => v[a] * v[b],
            Op::Div(a, b) => {
                if v[b] == 0.0 {
                    return Err(Error::Guard {
                        op: "quotient",
                        value: v[b],
                    });
                }
                v[a] / v[b]
            }
            Op::Neg(a) => -v[a],
            Op::Powi(a, k) => {
                if k < 0 && v[a] == 0.0 {
                    return Err(Error::Guard {
                        op: "negative power",
                        value: v[a],
                    });
                }
                v[a].powi(k)
            }
            Op::Exp(a) => v[a].exp(),
            Op::Sin(a) => v[a].sin(),
            Op::Cos(a) => v[a].cos(),
            Op::Atan(a) => v[a].atan(),
            Op::Sqrt(a) => {
                if v[a] < 0.0 {
                    return Err(Error::Guard {
                        op: "sqrt",
                        value: v[a],
                    });
                }
                v[a].sqrt()
            }
            Op::Square(a) => v[a] * v[a],
            Op::Step { arg, lo, hi } => step(v[arg], lo, hi),
            Op::FlatExp { arg, order } => flat_exp(v[arg], order),
            Op::Gate(w, a) => v[w] * v[a],
        };
        if !out.is_finite() {
            return Err(Error::Guard {
                op: "non-finite result",
                value: out,
            });
        }
        Ok(out)
    }

    pub(crate) fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.run(x, false).map(|(vals, _)| vals)
    }

    /// Values and gradients of every output, by forward-mode propagation.
    pub(crate) fn eval_with_gradient(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        self.run(x, true)
    }

    /// Guard failures poison a slot instead of aborting: a gate whose weight
    /// vanishes (with its gradient, when gradients are wanted) never looks at
    /// its value, so a poisoned value there is harmless. A poisoned output is
    /// reported as the error that poisoned it.
    fn run(&self, x: &[f64], grad: bool) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = if grad { x.len() } else { 0 };
        let len = self.ops.len();
        let mut v = Vec::with_capacity(len);
        let mut g = vec![0.0; len * n];
        let mut poison: Vec<u32> = vec![0; len];
        let mut faults: Vec<Error> = Vec::new();
        for (slot, &op) in self.ops.iter().enumerate() {
            if let Op::Gate(w, _) = op {
                if poison[w] == 0 && v[w] == 0.0 && g[w * n..(w + 1) * n].iter().all(|d| *d == 0.0) {
                    v.push(0.0);
                    continue;
                }
            }
            if let Some(p) = op.inputs().into_iter().flatten().map(|i| poison[i]).find(|p| *p != 0) {
                poison[slot] = p;
                v.push(f64::NAN);
                continue;
            }
            let val = match Self::value(op, &v, x) {
                Ok(val) => val,
                Err(e) => {
                    faults.push(e);
                    poison[slot] = faults.len() as u32;
                    v.push(f64::NAN);
                    continue;
                }
            };
            v.push(val);
            if !grad {
                continue;
            }
            // local partial derivatives: d slot = ca·d a + cb·d b
            let (a, ca, b, cb) = match op {
                Op::Var(i) => {
                    g[slot * n + i] = 1.0;
                    continue;
                }
                Op::Const(_) => continue,
                Op::Add(a, b) => (a, 1.0, Some(b), 1.0),
                Op::Sub(a, b) => (a, 1.0, Some(b), -1.0),
                Op::Mul(a, b) | Op::Gate(a, b) => (a, v[b], Some(b), v[a]),
                Op::Div(a, b) => (a, 1.0 / v[b], Some(b), -val / v[b]),
                Op::Neg(a) => (a, -1.0, None, 0.0),
                Op::Powi(a, k) => (a, k as f64 * v[a].powi(k - 1), None, 0.0),
                Op::Exp(a) => (a, val, None, 0.0),
                Op::Sin(a) => (a, v[a].cos(), None, 0.0),
                Op::Cos(a) => (a, -v[a].sin(), None, 0.0),
                Op::Atan(a) => (a, 1.0 / (1.0 + v[a] * v[a]), None, 0.0),
                Op::Sqrt(a) => {
                    if val == 0.0 {
                        faults.push(Error::Guard {
                            op: "sqrt derivative",
                            value: v[a],
                        });
                        poison[slot] = faults.len() as u32;
                        continue;
                    }
                    (a, 0.5 / val, None, 0.0)
                }
                Op::Square(a) => (a, 2.0 * v[a], None, 0.0),
                Op::Step { arg, lo, hi } => (arg, step_derivative(v[arg], lo, hi), None, 0.0),
                Op::FlatExp { arg, order } => {
                    let t = v[arg];
                    let d = if t > 0.0 {
                        flat_exp(t, order + 2) - order as f64 * flat_exp(t, order + 1)
                    } else {
                        0.0
                    };
                    (arg, d, None, 0.0)
                }
            };
            for i in 0..n {
                let mut d = ca * g[a * n + i];
                if let Some(b) = b {
                    d += cb * g[b * n + i];
                }
                g[slot * n + i] = d;
            }
        }
        if let Some(&p) = self.outputs.iter().map(|&o| &poison[o]).find(|p| **p != 0) {
            return Err(faults.swap_remove(p as usize - 1));
        }
        let vals = self.outputs.iter().map(|&o| v[o]).collect();
        let grads = if grad {
            self.outputs
                .iter()
                .map(|&o| g[o * n..(o + 1) * n].to_vec())
                .collect()
        } else {
            Vec::new()
        };
        Ok((vals, grads))
    }
}
