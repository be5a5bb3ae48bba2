//! Truncated multivariate Taylor arithmetic ("jets").
//!
//! A [`Jet`] of order `k` in `m` variables carries every Taylor coefficient
//! `∂^α f / α!` with `|α| ≤ k`. Arithmetic truncates exactly at the order, so
//! all partial derivatives up to `k` are exact up to floating-point rounding.
//!
//! Coefficients are stored densely in graded lexicographic order. Since the
//! order is graded, the coefficient table of an order `k-1` jet is a prefix of
//! the order `k` table, which makes truncation and differentiation cheap.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Largest supported number of jet variables.
pub const MAX_VARS: usize = 16;

/// Default jet order: enough for `∇R`, which needs third derivatives of the metric.
pub const DEFAULT_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet shape mismatch: ({lhs_vars} vars, order {lhs_order}) vs ({rhs_vars} vars, order {rhs_order})")]
    ShapeMismatch {
        lhs_vars: usize,
        lhs_order: usize,
        rhs_vars: usize,
        rhs_order: usize,
    },
    #[error("multi-index {index:?} does not fit a jet with {vars} vars and order {order}")]
    BadIndex {
        index: Vec<u8>,
        vars: usize,
        order: usize,
    },
    #[error("unsupported jet shape: {0}")]
    Unsupported(String),
    #[error("singularity: {0}")]
    Singularity(String),
}

/// Precomputed index tables for one `(num_vars, order)` pair.
#[derive(Debug)]
pub struct Layout {
    num_vars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    degrees: Vec<usize>,
    lookup: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` such that `exponents[i] + exponents[j] == exponents[k]`.
    products: Vec<(u32, u32, u32)>,
    /// `raise[v][i]` is the index of `exponents[i] + e_v`, for `degrees[i] < order`.
    raise: Vec<Vec<u32>>,
    /// Number of coefficients with total degree `≤ d`, for each `d ≤ order`.
    prefix_len: Vec<usize>,
}

impl Layout {
    fn build(num_vars: usize, order: usize) -> Self {
        let mut exponents = Vec::new();
        let mut prefix_len = Vec::with_capacity(order + 1);
        for degree in 0..=order {
            let mut current = vec![0u8; num_vars];
            push_graded(&mut exponents, &mut current, 0, degree);
            prefix_len.push(exponents.len());
        }
        let degrees: Vec<usize> = exponents
            .iter()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .collect();
        let lookup: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();

        let mut products = Vec::new();
        for (i, a) in exponents.iter().enumerate() {
            for (j, b) in exponents.iter().enumerate() {
                if degrees[i] + degrees[j] > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }

        let lower = if order == 0 { 0 } else { prefix_len[order - 1] };
        let raise = (0..num_vars)
            .map(|v| {
                (0..lower)
                    .map(|i| {
                        let mut e = exponents[i].clone();
                        e[v] += 1;
                        lookup[&e] as u32
                    })
                    .collect()
            })
            .collect();

        Layout {
            num_vars,
            order,
            exponents,
            degrees,
            lookup,
            products,
            raise,
            prefix_len,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exponents
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    /// Total degree of the `i`-th coefficient.
    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Number of coefficients of total degree `≤ d`.
    pub fn len_up_to(&self, d: usize) -> usize {
        self.prefix_len[d.min(self.order)]
    }
}

// Descending lexicographic enumeration of exponent vectors with fixed total degree.
fn push_graded(out: &mut Vec<Vec<u8>>, current: &mut [u8], var: usize, remaining: usize) {
    if var + 1 == current.len() {
        current[var] = remaining as u8;
        out.push(current.to_vec());
        current[var] = 0;
        return;
    }
    for take in (0..=remaining).rev() {
        current[var] = take as u8;
        push_graded(out, current, var + 1, remaining - take);
    }
    current[var] = 0;
}

type LayoutCache = HashMap<(usize, usize), Arc<Layout>>;

fn layout(num_vars: usize, order: usize) -> Result<Arc<Layout>, JetError> {
    if num_vars == 0 || num_vars > MAX_VARS {
        return Err(JetError::Unsupported(format!(
            "num_vars must be in 1..={MAX_VARS}, got {num_vars}"
        )));
    }
    if order > 8 {
        return Err(JetError::Unsupported(format!("order {order} > 8")));
    }
    static CACHE: OnceLock<Mutex<LayoutCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jet layout cache poisoned");
    Ok(guard
        .entry((num_vars, order))
        .or_insert_with(|| Arc::new(Layout::build(num_vars, order)))
        .clone())
}

/// Binary operations accepted by [`jet_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Elementary functions accepted by [`jet_func`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElemFunc {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    PowConst(f64),
}

/// Truncated multivariate Taylor polynomial.
#[derive(Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("num_vars", &self.layout.num_vars)
            .field("order", &self.layout.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other) && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn constant(value: f64, num_vars: usize, order: usize) -> Result<Self, JetError> {
        let layout = layout(num_vars, order)?;
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Ok(Jet { layout, coeffs })
    }

    /// The coordinate function `x_var` expanded around `value`.
    pub fn variable(value: f64, var: usize, num_vars: usize, order: usize) -> Result<Self, JetError> {
        let mut jet = Self::constant(value, num_vars, order)?;
        if var >= num_vars {
            return Err(JetError::Unsupported(format!(
                "variable index {var} out of range for {num_vars} vars"
            )));
        }
        if order > 0 {
            let mut e = vec![0u8; num_vars];
            e[var] = 1;
            let i = jet.layout.index_of(&e).expect("degree-one index");
            jet.coeffs[i] = 1.0;
        }
        Ok(jet)
    }

    /// Seeds `point` as independent variables: `x_i = point[i] + h_i`.
    pub fn seed(point: &[f64], order: usize) -> Result<Vec<Self>, JetError> {
        (0..point.len())
            .map(|i| Self::variable(point[i], i, point.len(), order))
            .collect()
    }

    pub fn from_coeffs(num_vars: usize, order: usize, coeffs: Vec<f64>) -> Result<Self, JetError> {
        let layout = layout(num_vars, order)?;
        if coeffs.len() != layout.len() {
            return Err(JetError::Unsupported(format!(
                "expected {} coefficients, got {}",
                layout.len(),
                coeffs.len()
            )));
        }
        Ok(Jet { layout, coeffs })
    }

    /// A zero jet with the same shape as `self`.
    pub fn zero_like(&self) -> Self {
        Jet {
            layout: self.layout.clone(),
            coeffs: vec![0.0; self.coeffs.len()],
        }
    }

    pub fn constant_like(&self, value: f64) -> Self {
        let mut z = self.zero_like();
        z.coeffs[0] = value;
        z
    }

    pub fn num_vars(&self) -> usize {
        self.layout.num_vars
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn same_shape(&self, other: &Jet) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout)
            || (self.layout.num_vars == other.layout.num_vars
                && self.layout.order == other.layout.order)
    }

    fn check_shape(&self, other: &Jet) -> Result<(), JetError> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(JetError::ShapeMismatch {
                lhs_vars: self.num_vars(),
                lhs_order: self.order(),
                rhs_vars: other.num_vars(),
                rhs_order: other.order(),
            })
        }
    }

    /// Normalized Taylor coefficient `∂^α f / α!`.
    pub fn coeff(&self, alpha: &[u8]) -> Result<f64, JetError> {
        self.index(alpha).map(|i| self.coeffs[i])
    }

    fn index(&self, alpha: &[u8]) -> Result<usize, JetError> {
        if alpha.len() != self.num_vars() {
            return Err(self.bad_index(alpha));
        }
        self.layout
            .index_of(alpha)
            .ok_or_else(|| self.bad_index(alpha))
    }

    fn bad_index(&self, alpha: &[u8]) -> JetError {
        JetError::BadIndex {
            index: alpha.to_vec(),
            vars: self.num_vars(),
            order: self.order(),
        }
    }

    /// The true partial derivative `∂^α f = α! · coeff(α)`.
    pub fn partial(&self, alpha: &[u8]) -> Result<f64, JetError> {
        let c = self.coeff(alpha)?;
        let factorial: f64 = alpha.iter().map(|&a| factorial(a as usize)).product();
        Ok(c * factorial)
    }

    /// `∂f/∂x_v` at the expansion point.
    pub fn d1(&self, v: usize) -> f64 {
        if self.order() == 0 {
            return 0.0;
        }
        let mut e = vec![0u8; self.num_vars()];
        e[v] = 1;
        self.coeffs[self.layout.index_of(&e).expect("degree-one index")]
    }

    /// `∂²f/∂x_v∂x_w` at the expansion point.
    pub fn d2(&self, v: usize, w: usize) -> f64 {
        if self.order() < 2 {
            return 0.0;
        }
        let mut e = vec![0u8; self.num_vars()];
        e[v] += 1;
        e[w] += 1;
        let c = self.coeffs[self.layout.index_of(&e).expect("degree-two index")];
        if v == w {
            2.0 * c
        } else {
            c
        }
    }

    /// Drops every coefficient of degree above `order`.
    pub fn truncate(&self, order: usize) -> Result<Jet, JetError> {
        if order > self.order() {
            return Err(JetError::Unsupported(format!(
                "cannot raise jet order {} to {order}",
                self.order()
            )));
        }
        let layout = layout(self.num_vars(), order)?;
        let n = self.layout.len_up_to(order);
        debug_assert_eq!(n, layout.len());
        Ok(Jet {
            layout,
            coeffs: self.coeffs[..n].to_vec(),
        })
    }

    /// Jet of `∂f/∂x_v`, one order lower.
    pub fn derivative(&self, v: usize) -> Result<Jet, JetError> {
        if self.order() == 0 {
            return Err(JetError::Unsupported(
                "cannot differentiate an order-0 jet".into(),
            ));
        }
        if v >= self.num_vars() {
            return Err(JetError::Unsupported(format!("variable {v} out of range")));
        }
        let lower = layout(self.num_vars(), self.order() - 1)?;
        let raise = &self.layout.raise[v];
        let coeffs = (0..lower.len())
            .map(|i| {
                let k = raise[i] as usize;
                self.layout.exponents[k][v] as f64 * self.coeffs[k]
            })
            .collect();
        Ok(Jet {
            layout: lower,
            coeffs,
        })
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(&other.recip()?))
    }

    fn add_unchecked(&self, other: &Jet) -> Jet {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Jet {
            layout: self.layout.clone(),
            coeffs,
        }
    }

    fn sub_unchecked(&self, other: &Jet) -> Jet {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Jet {
            layout: self.layout.clone(),
            coeffs,
        }
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let mut out = vec![0.0; self.coeffs.len()];
        for &(i, j, k) in &self.layout.products {
            out[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        Jet {
            layout: self.layout.clone(),
            coeffs: out,
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    /// In-place `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Jet) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// Evaluates `Σ_k series[k] · (self - value)^k`, truncated at the jet order.
    fn compose(&self, series: &[f64]) -> Jet {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let top = self.order().min(series.len() - 1);
        let mut acc = self.constant_like(series[top]);
        for k in (0..top).rev() {
            acc = acc.mul_unchecked(&h);
            acc.coeffs[0] += series[k];
        }
        acc
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let series: Vec<f64> = (0..=self.order()).map(|k| e / factorial(k)).collect();
        self.compose(&series)
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if a.is_nan() || a <= 0.0 {
            return Err(JetError::Singularity(format!("ln of non-positive value {a}")));
        }
        let mut series = vec![a.ln()];
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push(sign / (k as f64 * a.powi(k as i32)));
        }
        Ok(self.compose(&series))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let series: Vec<f64> = (0..=self.order()).map(|k| cycle[k % 4] / factorial(k)).collect();
        self.compose(&series)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let series: Vec<f64> = (0..=self.order()).map(|k| cycle[k % 4] / factorial(k)).collect();
        self.compose(&series)
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        if self.value().is_nan() || self.value() <= 0.0 {
            return Err(JetError::Singularity(format!(
                "sqrt of non-positive value {}",
                self.value()
            )));
        }
        self.pow_const(0.5)
    }

    /// `self^p` for a real constant `p`.
    pub fn pow_const(&self, p: f64) -> Result<Jet, JetError> {
        let a = self.value();
        let integral = p.fract() == 0.0;
        if integral && p >= 0.0 && p <= i32::MAX as f64 {
            return Ok(self.powi(p as i32).expect("non-negative power"));
        }
        if (!integral && (a.is_nan() || a <= 0.0)) || a == 0.0 {
            return Err(JetError::Singularity(format!("{a}^{p} is not analytic")));
        }
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut binom = 1.0;
        for k in 0..=self.order() {
            series.push(binom * a.powf(p - k as f64));
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        Ok(self.compose(&series))
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        if self.value() == 0.0 {
            return Err(JetError::Singularity(
                "division by a jet with zero constant term".into(),
            ));
        }
        self.pow_const(-1.0)
    }

    /// Integer power by repeated squaring; negative powers go through [`Jet::recip`].
    pub fn powi(&self, k: i32) -> Result<Jet, JetError> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        let mut result = self.constant_like(1.0);
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(result)
    }
}

/// Binary jet arithmetic with shape checking.
pub fn jet_arith(op: ArithOp, a: &Jet, b: &Jet) -> Result<Jet, JetError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.try_div(b),
    }
}

/// Composition of an elementary function with a jet.
pub fn jet_func(f: ElemFunc, a: &Jet) -> Result<Jet, JetError> {
    match f {
        ElemFunc::Exp => Ok(a.exp()),
        ElemFunc::Ln => a.ln(),
        ElemFunc::Sin => Ok(a.sin()),
        ElemFunc::Cos => Ok(a.cos()),
        ElemFunc::Sqrt => a.sqrt(),
        ElemFunc::PowConst(p) => a.pow_const(p),
    }
}

/// `∂^α a`; see [`Jet::partial`].
pub fn jet_partial(a: &Jet, alpha: &[u8]) -> Result<f64, JetError> {
    a.partial(alpha)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl std::ops::Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        assert!(self.same_shape(rhs), "jet shape mismatch");
        self.add_unchecked(rhs)
    }
}

impl std::ops::Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        assert!(self.same_shape(rhs), "jet shape mismatch");
        self.sub_unchecked(rhs)
    }
}

impl std::ops::Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert!(self.same_shape(rhs), "jet shape mismatch");
        self.mul_unchecked(rhs)
    }
}

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn layout_sizes_are_binomial() {
        for (m, k, n) in [(1, 3, 4), (4, 3, 35), (8, 2, 45), (16, 3, 969)] {
            assert_eq!(layout(m, k).unwrap().len(), n);
        }
    }

    #[test]
    fn graded_prefix_is_lower_order_layout() {
        let hi = layout(3, 3).unwrap();
        let lo = layout(3, 2).unwrap();
        assert_eq!(&hi.exponents[..lo.len()], &lo.exponents[..]);
        assert_eq!(hi.len_up_to(2), lo.len());
        assert!((0..hi.len()).all(|i| hi.degree(i) == hi.exponents[i].iter().map(|&e| e as usize).sum::<usize>()));
    }

    #[test]
    fn constants_multiply() {
        let a = Jet::constant(2.0, 2, 3).unwrap();
        let b = Jet::constant(3.0, 2, 3).unwrap();
        let c = &a * &b;
        assert_eq!(c.value(), 6.0);
        assert!(c.coeffs()[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn square_of_variable() {
        let x = Jet::variable(3.0, 0, 1, 2).unwrap();
        let sq = &x * &x;
        assert_eq!(sq.value(), 9.0);
        assert_eq!(sq.partial(&[1]).unwrap(), 6.0);
        assert_eq!(sq.coeff(&[2]).unwrap(), 1.0);
        assert_eq!(sq.partial(&[2]).unwrap(), 2.0);
    }

    #[test]
    fn tan_from_sin_over_cos() {
        let x0 = 0.3;
        let x = Jet::variable(x0, 0, 1, 3).unwrap();
        let tan = jet_arith(ArithOp::Div, &x.sin(), &x.cos()).unwrap();
        // Independent oracle: central differences of f64::tan, step 1e-4.
        let h = 1e-4;
        let f = |t: f64| t.tan();
        let d1 = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
        let d2 = (f(x0 + h) - 2.0 * f(x0) + f(x0 - h)) / (h * h);
        let d3 = (f(x0 + 2.0 * h) - 2.0 * f(x0 + h) + 2.0 * f(x0 - h) - f(x0 - 2.0 * h))
            / (2.0 * h * h * h);
        assert!(close(tan.value(), x0.tan(), 1e-15));
        assert!(close(tan.partial(&[1]).unwrap(), d1, 1e-7));
        assert!(close(tan.partial(&[2]).unwrap(), d2, 1e-5));
        assert!(close(tan.partial(&[3]).unwrap(), d3, 1e-3));
        // Closed-form tan derivatives (sec² etc.) for the 1e-13 claim.
        let t = x0.tan();
        let s2 = 1.0 + t * t;
        assert!(close(tan.partial(&[1]).unwrap(), s2, 1e-13));
        assert!(close(tan.partial(&[2]).unwrap(), 2.0 * t * s2, 1e-13));
        assert!(close(tan.partial(&[3]).unwrap(), 2.0 * s2 * (1.0 + 3.0 * t * t), 1e-13));
    }

    #[test]
    fn elementary_functions() {
        let z = Jet::constant(0.0, 1, 3).unwrap();
        assert_eq!(z.exp().value(), 1.0);
        assert!(z.exp().coeffs()[1..].iter().all(|&c| c == 0.0));

        let x = Jet::variable(0.5, 0, 1, 3).unwrap();
        let e2x = x.scale(2.0).exp();
        assert!(close(e2x.partial(&[1]).unwrap(), 2.0 * 1f64.exp(), 1e-12));
        assert!(close(e2x.partial(&[1]).unwrap(), 5.436563657, 1e-9));

        let x0 = Jet::variable(0.0, 0, 1, 3).unwrap();
        assert_eq!(x0.scale(2.0).exp().partial(&[2]).unwrap(), 4.0);
    }

    #[test]
    fn partial_edge_cases() {
        let c = Jet::constant(5.0, 2, 3).unwrap();
        assert_eq!(c.partial(&[1, 0]).unwrap(), 0.0);
        assert_eq!(c.partial(&[1, 2]).unwrap(), 0.0);
        let x = Jet::variable(-0.7, 0, 2, 2).unwrap();
        assert_eq!(x.partial(&[1, 0]).unwrap(), 1.0);
        assert!(matches!(
            x.partial(&[2, 1]),
            Err(JetError::BadIndex { .. })
        ));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = Jet::constant(1.0, 2, 3).unwrap();
        let b = Jet::constant(1.0, 2, 2).unwrap();
        let c = Jet::constant(1.0, 3, 3).unwrap();
        assert!(matches!(a.try_mul(&b), Err(JetError::ShapeMismatch { .. })));
        assert!(matches!(a.try_add(&c), Err(JetError::ShapeMismatch { .. })));
    }

    #[test]
    fn singular_operations() {
        let x = Jet::variable(0.0, 0, 1, 2).unwrap();
        let one = x.constant_like(1.0);
        assert!(matches!(
            jet_arith(ArithOp::Div, &one, &x),
            Err(JetError::Singularity(_))
        ));
        assert!(matches!(x.ln(), Err(JetError::Singularity(_))));
        assert!(matches!(x.scale(-1.0).sqrt(), Err(JetError::Singularity(_))));
        // x^3 at zero is fine
        assert_eq!(x.pow_const(3.0).unwrap().partial(&[2]).unwrap(), 0.0);
    }

    #[test]
    fn derivative_and_truncate() {
        let p = [0.2, -0.4];
        let v = Jet::seed(&p, 3).unwrap();
        // f = x^2 y + sin(y)
        let f = &(&(&v[0] * &v[0]) * &v[1]) + &v[1].sin();
        let fy = f.derivative(1).unwrap();
        assert_eq!(fy.order(), 2);
        assert!(close(fy.value(), 0.04 + (-0.4f64).cos(), 1e-15));
        assert!(close(fy.d1(0), 2.0 * 0.2, 1e-15));
        assert!(close(fy.d2(1, 1), -(-0.4f64).cos(), 1e-15));
        let t = f.truncate(1).unwrap();
        assert_eq!(t.coeffs(), &f.coeffs()[..3]);
    }
}
