//! Smooth expressions on `R^N`.
//!
//! A [`SmoothExpr`] is an immutable DAG of primitive nodes. Every node has an
//! exact derivative rule, and [`SmoothExpr::diff`] returns another
//! `SmoothExpr`, so derivatives of any order stay inside the class. Numerical
//! work goes through a compiled tape: shared subexpressions (partition
//! normalizers, for instance) are evaluated once per point, and
//! [`SmoothExpr::gradient`] / [`ExprVec::jacobian`] run forward-mode
//! differentiation with the same rules.
//!
//! Quotients, negative powers and square roots are guarded: evaluating them
//! outside their domain is an [`Error::Guard`], never a NaN.

mod parse;
mod tape;

use std::collections::HashMap;
use std::fmt;
use std::ops;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use tape::Tape;

pub use parse::parse_expr;

#[derive(Debug)]
pub(crate) enum Node {
    Var(usize),
    Const(f64),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Div(Arc<Node>, Arc<Node>),
    Neg(Arc<Node>),
    Powi(Arc<Node>, i32),
    Exp(Arc<Node>),
    Sin(Arc<Node>),
    Cos(Arc<Node>),
    Atan(Arc<Node>),
    Sqrt(Arc<Node>),
    /// `t ↦ step(t², a², b²)`: 1 for |t| ≤ a, 0 for |t| ≥ b.
    Bump { arg: Arc<Node>, a: f64, b: f64 },
    /// `s ↦ h(hi−s) / (h(hi−s) + h(s−lo))` with `h` the flat exponential.
    Step { arg: Arc<Node>, lo: f64, hi: f64 },
    /// `t ↦ e^(−1/t)·t^(−order)` for t > 0, else 0.
    FlatExp { arg: Arc<Node>, order: u32 },
    /// `weight·value`, read as 0 wherever the weight vanishes to first order,
    /// without evaluating `value` there.
    Gate { weight: Arc<Node>, value: Arc<Node> },
}

/// Kind of the root node, for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    Variable(usize),
    Constant(f64),
    Sum,
    Difference,
    Product,
    Quotient,
    Negation,
    Power(i32),
    Exp,
    Sin,
    Cos,
    Atan,
    Sqrt,
    Bump { a: f64, b: f64 },
    Step { lo: f64, hi: f64 },
    FlatExp { order: u32 },
    Gate,
}

/// Flat exponential `e^(−1/t)·t^(−order)`, extended by 0 for t ≤ 0.
pub fn flat_exp(t: f64, order: u32) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if order == 0 {
        (-1.0 / t).exp()
    } else {
        (-1.0 / t - order as f64 * t.ln()).exp()
    }
}

/// Smooth transition `h(hi−s)/(h(hi−s)+h(s−lo))`: 1 for s ≤ lo, 0 for s ≥ hi.
pub fn step(s: f64, lo: f64, hi: f64) -> f64 {
    if s <= lo {
        1.0
    } else if s >= hi {
        0.0
    } else {
        let r = (1.0 / (hi - s) - 1.0 / (s - lo)).exp();
        1.0 / (1.0 + r)
    }
}

/// Derivative of [`step`] with respect to `s`.
pub fn step_derivative(s: f64, lo: f64, hi: f64) -> f64 {
    if s <= lo || s >= hi {
        return 0.0;
    }
    let (a, b) = (hi - s, s - lo);
    let r = (1.0 / a - 1.0 / b).exp();
    if !r.is_finite() {
        return 0.0;
    }
    -(r / (1.0 + r)) / (1.0 + r) * (1.0 / (a * a) + 1.0 / (b * b))
}

/// A smooth real function on `R^ambient_dim`.
#[derive(Clone)]
pub struct SmoothExpr {
    dim: usize,
    root: Arc<Node>,
    tape: OnceLock<Arc<Tape>>,
}

impl fmt::Debug for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothExpr")
            .field("dim", &self.dim)
            .field("root", &self.kind())
            .finish()
    }
}

impl SmoothExpr {
    pub(crate) fn from_node(dim: usize, root: Arc<Node>) -> Self {
        SmoothExpr {
            dim,
            root,
            tape: OnceLock::new(),
        }
    }

    /// The coordinate function `x_{index+1}` (zero-based `index`).
    pub fn var(dim: usize, index: usize) -> Self {
        assert!(index < dim, "variable index {index} out of range for dim {dim}");
        Self::from_node(dim, Arc::new(Node::Var(index)))
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self::from_node(dim, Arc::new(Node::Const(value)))
    }

    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        parse_expr(text, dim)
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> NodeKind {
        match &*self.root {
            Node::Var(i) => NodeKind::Variable(*i),
            Node::Const(c) => NodeKind::Constant(*c),
            Node::Add(..) => NodeKind::Sum,
            Node::Sub(..) => NodeKind::Difference,
            Node::Mul(..) => NodeKind::Product,
            Node::Div(..) => NodeKind::Quotient,
            Node::Neg(..) => NodeKind::Negation,
            Node::Powi(_, k) => NodeKind::Power(*k),
            Node::Exp(_) => NodeKind::Exp,
            Node::Sin(_) => NodeKind::Sin,
            Node::Cos(_) => NodeKind::Cos,
            Node::Atan(_) => NodeKind::Atan,
            Node::Sqrt(_) => NodeKind::Sqrt,
            Node::Bump { a, b, .. } => NodeKind::Bump { a: *a, b: *b },
            Node::Step { lo, hi, .. } => NodeKind::Step { lo: *lo, hi: *hi },
            Node::FlatExp { order, .. } => NodeKind::FlatExp { order: *order },
            Node::Gate { .. } => NodeKind::Gate,
        }
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        self.tape().len()
    }

    /// Whether the expression is the literal constant zero.
    pub fn is_zero(&self) -> bool {
        matches!(*self.root, Node::Const(c) if c == 0.0)
    }

    fn tape(&self) -> &Tape {
        self.tape
            .get_or_init(|| Arc::new(Tape::compile(&[&self.root])))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, expression expects {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.tape().eval(x)?[0])
    }

    /// Value and exact gradient at `x`.
    pub fn gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_point(x)?;
        let (vals, grads) = self.tape().eval_with_gradient(x)?;
        Ok((vals[0], grads.into_iter().next().unwrap_or_default()))
    }

    /// Symbolic partial derivative with respect to the zero-based variable `index`.
    pub fn diff(&self, index: usize) -> SmoothExpr {
        assert!(index < self.dim);
        let mut memo = HashMap::new();
        let d = diff_node(&self.root, index, &mut memo);
        Self::from_node(self.dim, d)
    }

    pub fn powi(&self, k: i32) -> SmoothExpr {
        self.wrap(powi(&self.root, k))
    }
    pub fn exp(&self) -> SmoothExpr {
        self.wrap(unary(Node::Exp, &self.root, f64::exp))
    }
    pub fn sin(&self) -> SmoothExpr {
        self.wrap(unary(Node::Sin, &self.root, f64::sin))
    }
    pub fn cos(&self) -> SmoothExpr {
        self.wrap(unary(Node::Cos, &self.root, f64::cos))
    }
    pub fn atan(&self) -> SmoothExpr {
        self.wrap(unary(Node::Atan, &self.root, f64::atan))
    }
    pub fn sqrt(&self) -> SmoothExpr {
        self.wrap(Arc::new(Node::Sqrt(self.root.clone())))
    }
    pub fn flat_exp(&self) -> SmoothExpr {
        self.wrap(flat(&self.root, 0))
    }

    /// One-dimensional bump applied to this expression: 1 where |e| ≤ a, 0 where |e| ≥ b.
    pub fn bump(&self, a: f64, b: f64) -> Result<SmoothExpr> {
        if !(0.0 <= a && a < b) || !b.is_finite() {
            return Err(Error::InvalidBump { r_in: a, r_out: b });
        }
        Ok(self.wrap(Arc::new(Node::Bump {
            arg: self.root.clone(),
            a,
            b,
        })))
    }

    /// Smooth step of this expression: 1 where e ≤ lo, 0 where e ≥ hi.
    pub fn step(&self, lo: f64, hi: f64) -> Result<SmoothExpr> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidBump { r_in: lo, r_out: hi });
        }
        Ok(self.wrap(step_node(&self.root, lo, hi)))
    }

    /// `self · value`, extended by zero off the support of `self`.
    ///
    /// `value` is only evaluated where `self` (or, for derivatives, its
    /// gradient) is nonzero, so it may be a function defined only on an open
    /// set containing that support, such as a chart map multiplied by a
    /// cutoff inside the chart domain.
    pub fn gated(&self, value: &SmoothExpr) -> SmoothExpr {
        self.binary(value, gate)
    }

    fn wrap(&self, node: Arc<Node>) -> SmoothExpr {
        Self::from_node(self.dim, node)
    }

    fn binary(&self, rhs: &SmoothExpr, f: fn(&Arc<Node>, &Arc<Node>) -> Arc<Node>) -> SmoothExpr {
        assert_eq!(self.dim, rhs.dim, "ambient dimensions differ");
        self.wrap(f(&self.root, &rhs.root))
    }

    /// Sum of a list of expressions (zero for an empty list).
    pub fn sum<'a>(dim: usize, terms: impl IntoIterator<Item = &'a SmoothExpr>) -> SmoothExpr {
        terms
            .into_iter()
            .fold(SmoothExpr::constant(dim, 0.0), |acc, t| &acc + t)
    }
}

/// Bump function on `R^dim`: 1 on the closed ball `B(center, r_in)`, 0 outside
/// the open ball `B(center, r_out)`, smooth and radially nonincreasing.
///
/// Glued from the flat exponential in the squared radius,
/// `h(r_out²−‖x−c‖²) / (h(r_out²−‖x−c‖²) + h(‖x−c‖²−r_in²))`.
pub fn make_bump(dim: usize, center: &[f64], r_in: f64, r_out: f64) -> Result<SmoothExpr> {
    if center.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "bump center has {} coordinates, ambient dimension is {dim}",
            center.len()
        )));
    }
    if !(0.0 <= r_in && r_in < r_out) || !r_out.is_finite() {
        return Err(Error::InvalidBump { r_in, r_out });
    }
    let r2 = squared_distance(dim, center);
    r2.step(r_in * r_in, r_out * r_out)
}

/// `‖x − c‖²` as an expression.
pub fn squared_distance(dim: usize, center: &[f64]) -> SmoothExpr {
    let terms: Vec<SmoothExpr> = (0..dim)
        .map(|i| (&SmoothExpr::var(dim, i) - center[i]).powi(2))
        .collect();
    SmoothExpr::sum(dim, &terms)
}

// --- node builders with light constant folding -------------------------------

fn as_const(n: &Node) -> Option<f64> {
    match n {
        Node::Const(c) => Some(*c),
        _ => None,
    }
}

fn cnst(c: f64) -> Arc<Node> {
    Arc::new(Node::Const(c))
}

fn add(a: &Arc<Node>, b: &Arc<Node>) -> Arc<Node> {
    match (as_const(a), as_const(b)) {
        (Some(x), Some(y)) => cnst(x + y),
        (Some(x), _) if x == 0.0 => b.clone(),
        (_, Some(y)) if y == 0.0 => a.clone(),
        _ => Arc::new(Node::Add(a.clone(), b.clone())),
    }
}

fn sub(a: &Arc<Node>, b: &Arc<Node>) -> Arc<Node> {
    match (as_const(a), as_const(b)) {
        (Some(x), Some(y)) => cnst(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a.clone(),
        _ => Arc::new(Node::Sub(a.clone(), b.clone())),
    }
}

fn mul(a: &Arc<Node>, b: &Arc<Node>) -> Arc<Node> {
    match (as_const(a), as_const(b)) {
        (Some(x), Some(y)) => cnst(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => cnst(0.0),
        (Some(x), _) if x == 1.0 => b.clone(),
        (_, Some(y)) if y == 1.0 => a.clone(),
        _ => Arc::new(Node::Mul(a.clone(), b.clone())),
    }
}

fn div(a: &Arc<Node>, b: &Arc<Node>) -> Arc<Node> {
    match (as_const(a), as_const(b)) {
        (Some(x), Some(y)) if y != 0.0 => cnst(x / y),
        (_, Some(y)) if y == 1.0 => a.clone(),
        _ => Arc::new(Node::Div(a.clone(), b.clone())),
    }
}

fn gate(w: &Arc<Node>, v: &Arc<Node>) -> Arc<Node> {
    if as_const(w).is_some() || as_const(v).is_some() {
        return mul(w, v);
    }
    Arc::new(Node::Gate {
        weight: w.clone(),
        value: v.clone(),
    })
}

fn neg(a: &Arc<Node>) -> Arc<Node> {
    match &**a {
        Node::Const(c) => cnst(-c),
        Node::Neg(inner) => inner.clone(),
        _ => Arc::new(Node::Neg(a.clone())),
    }
}

fn powi(a: &Arc<Node>, k: i32) -> Arc<Node> {
    match (as_const(a), k) {
        (_, 0) => cnst(1.0),
        (_, 1) => a.clone(),
        (Some(c), _) if k > 0 || c != 0.0 => cnst(c.powi(k)),
        _ => Arc::new(Node::Powi(a.clone(), k)),
    }
}

fn unary(make: fn(Arc<Node>) -> Node, a: &Arc<Node>, fold: fn(f64) -> f64) -> Arc<Node> {
    match as_const(a) {
        Some(c) => cnst(fold(c)),
        None => Arc::new(make(a.clone())),
    }
}

fn flat(a: &Arc<Node>, order: u32) -> Arc<Node> {
    match as_const(a) {
        Some(c) => cnst(flat_exp(c, order)),
        None => Arc::new(Node::FlatExp {
            arg: a.clone(),
            order,
        }),
    }
}

fn step_node(a: &Arc<Node>, lo: f64, hi: f64) -> Arc<Node> {
    match as_const(a) {
        Some(c) => cnst(step(c, lo, hi)),
        None => Arc::new(Node::Step {
            arg: a.clone(),
            lo,
            hi,
        }),
    }
}

// --- symbolic differentiation ------------------------------------------------

fn diff_node(
    node: &Arc<Node>,
    var: usize,
    memo: &mut HashMap<*const Node, Arc<Node>>,
) -> Arc<Node> {
    let key = Arc::as_ptr(node);
    if let Some(d) = memo.get(&key) {
        return d.clone();
    }
    let d = match &**node {
        Node::Var(i) => cnst(if *i == var { 1.0 } else { 0.0 }),
        Node::Const(_) => cnst(0.0),
        Node::Add(a, b) => add(&diff_node(a, var, memo), &diff_node(b, var, memo)),
        Node::Sub(a, b) => sub(&diff_node(a, var, memo), &diff_node(b, var, memo)),
        Node::Mul(a, b) => {
            let da = diff_node(a, var, memo);
            let db = diff_node(b, var, memo);
            add(&mul(&da, b), &mul(a, &db))
        }
        Node::Div(a, b) => {
            // (a' − (a/b)·b') / b
            let da = diff_node(a, var, memo);
            let db = diff_node(b, var, memo);
            let inner = sub(&da, &mul(node, &db));
            div(&inner, b)
        }
        Node::Neg(a) => neg(&diff_node(a, var, memo)),
        Node::Powi(a, k) => {
            let da = diff_node(a, var, memo);
            let outer = mul(&cnst(*k as f64), &powi(a, k - 1));
            mul(&outer, &da)
        }
        Node::Exp(a) => mul(node, &diff_node(a, var, memo)),
        Node::Sin(a) => mul(&unary(Node::Cos, a, f64::cos), &diff_node(a, var, memo)),
        Node::Cos(a) => neg(&mul(
            &unary(Node::Sin, a, f64::sin),
            &diff_node(a, var, memo),
        )),
        Node::Atan(a) => {
            let denom = add(&cnst(1.0), &powi(a, 2));
            div(&diff_node(a, var, memo), &denom)
        }
        Node::Sqrt(a) => {
            let denom = mul(&cnst(2.0), node);
            div(&diff_node(a, var, memo), &denom)
        }
        Node::Bump { arg, a, b } => {
            let lowered = step_node(&powi(arg, 2), a * a, b * b);
            diff_node(&lowered, var, memo)
        }
        Node::Step { arg, lo, hi } => {
            // d/ds = −[h₂(hi−s)·q + p·h₂(s−lo)] / (p+q)², p = h(hi−s), q = h(s−lo)
            let da = diff_node(arg, var, memo);
            let up = sub(&cnst(*hi), arg);
            let dn = sub(arg, &cnst(*lo));
            let p = flat(&up, 0);
            let q = flat(&dn, 0);
            let num = add(&mul(&flat(&up, 2), &q), &mul(&p, &flat(&dn, 2)));
            let den = powi(&add(&p, &q), 2);
            neg(&mul(&div(&num, &den), &da))
        }
        Node::Gate { weight, value } => {
            let dw = diff_node(weight, var, memo);
            let dv = diff_node(value, var, memo);
            add(&gate(weight, &dv), &gate(&dw, value))
        }
        Node::FlatExp { arg, order } => {
            // d/dt h·t^(−k) = h·t^(−k−2) − k·h·t^(−k−1)
            let da = diff_node(arg, var, memo);
            let lead = flat(arg, order + 2);
            let outer = if *order == 0 {
                lead
            } else {
                sub(&lead, &mul(&cnst(*order as f64), &flat(arg, order + 1)))
            };
            mul(&outer, &da)
        }
    };
    memo.insert(key, d.clone());
    d
}

// --- operator sugar ----------------------------------------------------------

macro_rules! bin_ops {
    ($trait:ident, $method:ident, $builder:ident) => {
        impl ops::$trait<&SmoothExpr> for &SmoothExpr {
            type Output = SmoothExpr;
            fn $method(self, rhs: &SmoothExpr) -> SmoothExpr {
                self.binary(rhs, $builder)
            }
        }
        impl ops::$trait<SmoothExpr> for SmoothExpr {
            type Output = SmoothExpr;
            fn $method(self, rhs: SmoothExpr) -> SmoothExpr {
                (&self).binary(&rhs, $builder)
            }
        }
        impl ops::$trait<f64> for &SmoothExpr {
            type Output = SmoothExpr;
            fn $method(self, rhs: f64) -> SmoothExpr {
                self.wrap($builder(&self.root, &cnst(rhs)))
            }
        }
        impl ops::$trait<&SmoothExpr> for f64 {
            type Output = SmoothExpr;
            fn $method(self, rhs: &SmoothExpr) -> SmoothExpr {
                rhs.wrap($builder(&cnst(self), &rhs.root))
            }
        }
    };
}

bin_ops!(Add, add, add);
bin_ops!(Sub, sub, sub);
bin_ops!(Mul, mul, mul);
bin_ops!(Div, div, div);

impl ops::Neg for &SmoothExpr {
    type Output = SmoothExpr;
    fn neg(self) -> SmoothExpr {
        self.wrap(neg(&self.root))
    }
}

impl ops::Neg for SmoothExpr {
    type Output = SmoothExpr;
    fn neg(self) -> SmoothExpr {
        -&self
    }
}

/// A smooth map `R^ambient_dim → R^target_dim`.
#[derive(Clone)]
pub struct ExprVec {
    dim: usize,
    components: Vec<SmoothExpr>,
    tape: OnceLock<Arc<Tape>>,
}

impl fmt::Debug for ExprVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExprVec")
            .field("ambient_dim", &self.dim)
            .field("target_dim", &self.components.len())
            .finish()
    }
}

impl ExprVec {
    pub fn new(dim: usize, components: Vec<SmoothExpr>) -> Result<Self> {
        if let Some(bad) = components.iter().find(|c| c.dim != dim) {
            return Err(Error::DimensionMismatch(format!(
                "component has ambient dimension {}, expected {dim}",
                bad.dim
            )));
        }
        Ok(ExprVec {
            dim,
            components,
            tape: OnceLock::new(),
        })
    }

    pub fn parse(texts: &[impl AsRef<str>], dim: usize) -> Result<Self> {
        let comps = texts
            .iter()
            .map(|t| parse_expr(t.as_ref(), dim))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, comps)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, (0..dim).map(|i| SmoothExpr::var(dim, i)).collect())
            .expect("identity components share the ambient dimension")
    }

    pub fn zeros(dim: usize, target: usize) -> Self {
        Self::new(dim, vec![SmoothExpr::constant(dim, 0.0); target])
            .expect("constant components share the ambient dimension")
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SmoothExpr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &SmoothExpr {
        &self.components[i]
    }

    fn tape(&self) -> &Tape {
        self.tape.get_or_init(|| {
            let roots: Vec<&Arc<Node>> = self.components.iter().map(|c| &c.root).collect();
            Arc::new(Tape::compile(&roots))
        })
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, map expects {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        self.tape().eval(x)
    }

    /// Exact Jacobian (`target_dim × ambient_dim`) at `x`.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.eval_with_jacobian(x)?.1)
    }

    pub fn eval_with_jacobian(&self, x: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        self.check_point(x)?;
        let (vals, grads) = self.tape().eval_with_gradient(x)?;
        let jac = DMatrix::from_fn(self.components.len(), self.dim, |r, c| grads[r][c]);
        Ok((vals, jac))
    }

    /// Symbolic Jacobian: entry `(r, c)` is `∂ component_r / ∂ x_c`.
    pub fn symbolic_jacobian(&self) -> Vec<Vec<SmoothExpr>> {
        self.components
            .iter()
            .map(|c| (0..self.dim).map(|j| c.diff(j)).collect())
            .collect()
    }
}

/// Central finite-difference Jacobian of `f` at `x` with step `h`.
pub fn finite_difference_jacobian(f: &ExprVec, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
    let mut jac = DMatrix::zeros(f.target_dim(), f.ambient_dim());
    let mut xp = x.to_vec();
    for c in 0..f.ambient_dim() {
        xp[c] = x[c] + h;
        let fp = f.eval(&xp)?;
        xp[c] = x[c] - h;
        let fm = f.eval(&xp)?;
        xp[c] = x[c];
        for r in 0..f.target_dim() {
            jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    Ok(jac)
}
