//! Expression language for chart component functions.
//!
//! Expressions are immutable, reference-counted trees over the coordinates
//! `x1..xm`. Subtrees may be shared, so differentiation and evaluation memoize
//! on node identity; large generated expressions (the induced tangent-bundle
//! chart) stay cheap to evaluate.
//!
//! Construction goes through smart constructors that fold literal arithmetic
//! and drop additive/multiplicative identities. Nothing else is simplified.

mod parse;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub use parse::{parse, ParseError, ParseErrorKind};

use crate::jet::{Jet, JetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply_f64(self, a: f64) -> f64 {
        match self {
            Func::Exp => a.exp(),
            Func::Ln => a.ln(),
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Sqrt => a.sqrt(),
        }
    }
}

#[derive(Debug, PartialEq)]
pub enum Node {
    Const(f64),
    /// Zero-based coordinate index; printed as `x{index+1}`.
    Var(usize),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
}

/// Shared handle to an expression node. Equality is structural.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    fn wrap(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn constant(c: f64) -> Expr {
        Expr::wrap(Node::Const(c))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    /// Coordinate with zero-based index.
    pub fn var(index: usize) -> Expr {
        Expr::wrap(Node::Var(index))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn neg(a: Expr) -> Expr {
        if let Some(c) = a.as_const() {
            return Expr::constant(-c);
        }
        if let Node::Neg(inner) = a.node() {
            return inner.clone();
        }
        Expr::wrap(Node::Neg(a))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => Expr::wrap(Node::Add(a, b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x - y),
            (Some(0.0), _) => Expr::neg(b),
            (_, Some(0.0)) => a,
            _ => Expr::wrap(Node::Sub(a, b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::constant(x * y),
            (Some(0.0), _) => Expr::zero(),
            (_, Some(0.0)) => Expr::zero(),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            _ => Expr::wrap(Node::Mul(a, b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::constant(x / y),
            (Some(0.0), _) => Expr::zero(),
            (_, Some(1.0)) => a,
            _ => Expr::wrap(Node::Div(a, b)),
        }
    }

    pub fn pow(a: Expr, k: i32) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k == 1 {
            return a;
        }
        match a.as_const() {
            Some(c) if c != 0.0 || k > 0 => Expr::constant(c.powi(k)),
            _ => Expr::wrap(Node::Pow(a, k)),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        // Folding only where the result is exact.
        match (f, a.as_const()) {
            (Func::Exp, Some(0.0)) => Expr::one(),
            (Func::Ln, Some(1.0)) => Expr::zero(),
            (Func::Sin, Some(0.0)) => Expr::zero(),
            (Func::Cos, Some(0.0)) => Expr::one(),
            _ => Expr::wrap(Node::Call(f, a)),
        }
    }

    /// Sum with the same folding rules as [`Expr::add`].
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), Expr::add)
    }

    /// Largest coordinate index referenced (zero-based), if any.
    pub fn max_var(&self) -> Option<usize> {
        let mut best = None;
        self.visit(&mut |n| {
            if let Node::Var(i) = n {
                best = Some(best.map_or(*i, |b: usize| b.max(*i)));
            }
        });
        best
    }

    fn visit(&self, f: &mut impl FnMut(&Node)) {
        f(self.node());
        match self.node() {
            Node::Const(_) | Node::Var(_) => {}
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.visit(f),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Number of distinct nodes, counting shared subtrees once.
    pub fn dag_size(&self) -> usize {
        fn walk(e: &Expr, seen: &mut std::collections::HashSet<usize>) {
            if !seen.insert(e.key()) {
                return;
            }
            match e.node() {
                Node::Const(_) | Node::Var(_) => {}
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => walk(a, seen),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    walk(a, seen);
                    walk(b, seen);
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        walk(self, &mut seen);
        seen.len()
    }

    /// Plain floating-point evaluation at `point`; shared subtrees are
    /// evaluated once.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.eval_f64_memo(point, &mut HashMap::new())
    }

    fn eval_f64_memo(&self, point: &[f64], memo: &mut HashMap<usize, f64>) -> f64 {
        if let Some(&v) = memo.get(&self.key()) {
            return v;
        }
        let v = match self.node() {
            Node::Const(c) => *c,
            Node::Var(i) => point[*i],
            Node::Neg(a) => -a.eval_f64_memo(point, memo),
            Node::Add(a, b) => a.eval_f64_memo(point, memo) + b.eval_f64_memo(point, memo),
            Node::Sub(a, b) => a.eval_f64_memo(point, memo) - b.eval_f64_memo(point, memo),
            Node::Mul(a, b) => a.eval_f64_memo(point, memo) * b.eval_f64_memo(point, memo),
            Node::Div(a, b) => a.eval_f64_memo(point, memo) / b.eval_f64_memo(point, memo),
            Node::Pow(a, k) => a.eval_f64_memo(point, memo).powi(*k),
            Node::Call(f, a) => f.apply_f64(a.eval_f64_memo(point, memo)),
        };
        memo.insert(self.key(), v);
        v
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized form; `parse` reads it back to an equal tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => {
                if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Pow(a, k) => write!(f, "({a}^{k})"),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Exact symbolic partial derivative with respect to the zero-based coordinate `k`.
pub fn differentiate(e: &Expr, k: usize) -> Expr {
    let mut memo = HashMap::new();
    diff_memo(e, k, &mut memo)
}

fn diff_memo(e: &Expr, k: usize, memo: &mut HashMap<usize, Expr>) -> Expr {
    if let Some(d) = memo.get(&e.key()) {
        return d.clone();
    }
    let d = match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(i) => {
            if *i == k {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Neg(a) => Expr::neg(diff_memo(a, k, memo)),
        Node::Add(a, b) => Expr::add(diff_memo(a, k, memo), diff_memo(b, k, memo)),
        Node::Sub(a, b) => Expr::sub(diff_memo(a, k, memo), diff_memo(b, k, memo)),
        Node::Mul(a, b) => {
            let da = diff_memo(a, k, memo);
            let db = diff_memo(b, k, memo);
            Expr::add(Expr::mul(da, b.clone()), Expr::mul(a.clone(), db))
        }
        Node::Div(a, b) => {
            // (a/b)' = a'/b - a b' / b^2
            let da = diff_memo(a, k, memo);
            let db = diff_memo(b, k, memo);
            Expr::sub(
                Expr::div(da, b.clone()),
                Expr::div(Expr::mul(a.clone(), db), Expr::pow(b.clone(), 2)),
            )
        }
        Node::Pow(a, n) => {
            let da = diff_memo(a, k, memo);
            Expr::mul(
                Expr::mul(Expr::constant(*n as f64), Expr::pow(a.clone(), n - 1)),
                da,
            )
        }
        Node::Call(f, a) => {
            let da = diff_memo(a, k, memo);
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => Expr::div(Expr::one(), a.clone()),
                Func::Sin => Expr::call(Func::Cos, a.clone()),
                Func::Cos => Expr::neg(Expr::call(Func::Sin, a.clone())),
                Func::Sqrt => Expr::div(Expr::constant(0.5), e.clone()),
            };
            Expr::mul(outer, da)
        }
    };
    memo.insert(e.key(), d.clone());
    d
}

/// Evaluates expressions over a fixed jet environment, caching shared subtrees.
pub struct JetEvaluator<'a> {
    env: &'a [Jet],
    cache: HashMap<usize, Jet>,
    // Keeps cached nodes alive so their addresses are not reused.
    pins: Vec<Expr>,
}

impl<'a> JetEvaluator<'a> {
    pub fn new(env: &'a [Jet]) -> Result<Self, JetError> {
        if let Some(first) = env.first() {
            for j in env {
                if !j.same_shape(first) {
                    return Err(JetError::ShapeMismatch {
                        lhs_vars: first.num_vars(),
                        lhs_order: first.order(),
                        rhs_vars: j.num_vars(),
                        rhs_order: j.order(),
                    });
                }
            }
        } else {
            return Err(JetError::Unsupported("empty evaluation environment".into()));
        }
        Ok(JetEvaluator {
            env,
            cache: HashMap::new(),
            pins: Vec::new(),
        })
    }

    pub fn eval(&mut self, e: &Expr) -> Result<Jet, JetError> {
        if let Some(j) = self.cache.get(&e.key()) {
            return Ok(j.clone());
        }
        let jet = match e.node() {
            Node::Const(c) => self.env[0].constant_like(*c),
            Node::Var(i) => self
                .env
                .get(*i)
                .cloned()
                .ok_or_else(|| JetError::Unsupported(format!("x{} not in environment", i + 1)))?,
            Node::Neg(a) => self.eval(a)?.neg(),
            Node::Add(a, b) => self.eval(a)?.try_add(&self.eval(b)?)?,
            Node::Sub(a, b) => self.eval(a)?.try_sub(&self.eval(b)?)?,
            Node::Mul(a, b) => self.eval(a)?.try_mul(&self.eval(b)?)?,
            Node::Div(a, b) => self.eval(a)?.try_div(&self.eval(b)?)?,
            Node::Pow(a, k) => self.eval(a)?.powi(*k)?,
            Node::Call(f, a) => {
                let x = self.eval(a)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Ln => x.ln()?,
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => x.sqrt()?,
                }
            }
        };
        self.cache.insert(e.key(), jet.clone());
        self.pins.push(e.clone());
        Ok(jet)
    }
}

/// One-shot jet evaluation. Use [`JetEvaluator`] when evaluating many
/// expressions that share subtrees.
pub fn evaluate(e: &Expr, env: &[Jet]) -> Result<Jet, JetError> {
    JetEvaluator::new(env)?.eval(e)
}
