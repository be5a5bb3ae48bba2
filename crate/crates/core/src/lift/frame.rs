//! Orthonormal J-bases of the base and adapted H-bases of `T_u(TM)`.
//!
//! On a Norden space, `C(x, y) = g(x, y) - i g(x, Jy)` is a symmetric
//! complex-bilinear form when `p + iq` acts as `p + qJ`. An orthonormal
//! J-basis is a `C`-orthonormal complex basis `e_1..e_n` followed by
//! `e_{n+i} = J e_i`; Gram-Schmidt for `C` produces it.

use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

use super::{Alpha, LiftVector, TangentBundlePoint};
use crate::base::PointGeometry;
use crate::linalg::Vector;
use crate::{Error, Result};

/// `C(v, v)` below this (relative to `|v|²`) rejects a seed.
const SEED_TOL: f64 = 1e-6;

fn complex_form(geom: &PointGeometry, x: &Vector, y: &Vector) -> (f64, f64) {
    (geom.metric(x, y), -geom.metric(x, &geom.j(y)))
}

/// `(p + iq) · v = p v + q Jv`.
fn complex_scale(geom: &PointGeometry, (p, q): (f64, f64), v: &Vector) -> Vector {
    v * p + geom.j(v) * q
}

/// Principal square root of the reciprocal of `p + iq`.
fn inv_sqrt((p, q): (f64, f64)) -> (f64, f64) {
    let r = p.hypot(q);
    let (sr, si) = (((r + p) / 2.0).sqrt(), ((r - p) / 2.0).sqrt().copysign(q));
    let m = sr * sr + si * si;
    (sr / m, -si / m)
}

/// Orthonormal J-basis `{e_1..e_n, Je_1..Je_n}` with `g(e_i, e_i) = 1`,
/// `g(Je_i, Je_i) = -1`. Seeds are the coordinate vectors, then pairwise sums.
pub fn j_basis(geom: &PointGeometry) -> Result<Vec<Vector>> {
    let dim = geom.dim();
    let n = dim / 2;
    let unit = |k: usize| {
        let mut v = Vector::zeros(dim);
        v[k] = 1.0;
        v
    };
    let mut seeds: Vec<Vector> = (0..dim).map(unit).collect();
    for a in 0..dim {
        for b in (a + 1)..dim {
            seeds.push(unit(a) + unit(b));
            seeds.push(unit(a) - unit(b));
        }
    }
    let mut basis: Vec<Vector> = Vec::with_capacity(n);
    for seed in seeds {
        if basis.len() == n {
            break;
        }
        let mut v = seed;
        for e in &basis {
            let c = complex_form(geom, &v, e);
            v = &v - &complex_scale(geom, c, e);
        }
        let c = complex_form(geom, &v, &v);
        let size = v.dot(&v) + geom.j(&v).dot(&geom.j(&v));
        if c.0.hypot(c.1) <= SEED_TOL * size {
            continue;
        }
        let e = complex_scale(geom, inv_sqrt(c), &v);
        basis.push(e);
    }
    if basis.len() < n {
        return Err(Error::Frame(format!(
            "found {} of {n} independent non-null complex directions",
            basis.len()
        )));
    }
    let js: Vec<Vector> = basis.iter().map(|e| geom.j(e)).collect();
    basis.extend(js);
    check_orthonormal(geom, &basis)?;
    Ok(basis)
}

fn check_orthonormal(geom: &PointGeometry, basis: &[Vector]) -> Result<()> {
    let n = basis.len() / 2;
    for (a, x) in basis.iter().enumerate() {
        for (b, y) in basis.iter().enumerate() {
            let expected = match (a == b, a < n) {
                (true, true) => 1.0,
                (true, false) => -1.0,
                _ => 0.0,
            };
            let got = geom.metric(x, y);
            if (got - expected).abs() > 1e-10 {
                return Err(Error::Frame(format!(
                    "g(e{a}, e{b}) = {got:e}, expected {expected}"
                )));
            }
        }
    }
    Ok(())
}

/// `ĝ(E_A, E_A)` for `{ξ_i, ξ_ī, η_i, η_ī}` with `n` vectors per block.
pub const FRAME_SIGNS: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// The adapted H-basis `ξ_i = (e_i^H + e_i^V)/√2`, `η_i = (e_i^H - e_i^V)/√2`
/// and their barred companions.
#[derive(Debug, Clone, Serialize)]
pub struct AdaptedFrame {
    pub n: usize,
    pub base: Vec<Vector>,
    /// `ξ_1..ξ_n, ξ_1̄..ξ_n̄, η_1..η_n, η_1̄..η_n̄`.
    pub vectors: Vec<LiftVector>,
    pub signs: Vec<f64>,
}

impl AdaptedFrame {
    pub fn xi(&self, i: usize) -> &LiftVector {
        &self.vectors[i]
    }

    pub fn xi_bar(&self, i: usize) -> &LiftVector {
        &self.vectors[self.n + i]
    }

    pub fn eta(&self, i: usize) -> &LiftVector {
        &self.vectors[2 * self.n + i]
    }

    pub fn eta_bar(&self, i: usize) -> &LiftVector {
        &self.vectors[3 * self.n + i]
    }

    /// Labels `ξ1, ξ1̄, η1, η1̄` (one-based) in frame order.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(4 * self.n);
        for (sym, bar) in [("ξ", ""), ("ξ", "̄"), ("η", ""), ("η", "̄")] {
            for i in 1..=self.n {
                out.push(format!("{sym}{i}{bar}"));
            }
        }
        out
    }
}

pub fn adapted_frame(tbp: &TangentBundlePoint) -> Result<AdaptedFrame> {
    let base = j_basis(&tbp.geom)?;
    let n = base.len() / 2;
    let mut vectors = Vec::with_capacity(4 * n);
    for e in &base {
        vectors.push(LiftVector::new(e * FRAC_1_SQRT_2, e * FRAC_1_SQRT_2));
    }
    for e in &base {
        vectors.push(LiftVector::new(e * FRAC_1_SQRT_2, e * -FRAC_1_SQRT_2));
    }
    let signs = FRAME_SIGNS
        .iter()
        .flat_map(|&s| std::iter::repeat_n(s, n))
        .collect();
    Ok(AdaptedFrame {
        n,
        base,
        vectors,
        signs,
    })
}

impl TangentBundlePoint {
    pub fn adapted_frame(&self) -> Result<AdaptedFrame> {
        adapted_frame(self)
    }

    /// Largest deviation of `J₁ξ_ī = η_i`, `J₁η_ī = ξ_i`, `J₂η_i = ξ_i`,
    /// `J₂η_ī = ξ_ī`, `J₃ξ_i = ξ_ī`, `J₃η_ī = η_i`.
    pub fn frame_relation_error(&self, f: &AdaptedFrame) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..f.n {
            let pairs = [
                (Alpha::One, f.xi_bar(i), f.eta(i)),
                (Alpha::One, f.eta_bar(i), f.xi(i)),
                (Alpha::Two, f.eta(i), f.xi(i)),
                (Alpha::Two, f.eta_bar(i), f.xi_bar(i)),
                (Alpha::Three, f.xi(i), f.xi_bar(i)),
                (Alpha::Three, f.eta_bar(i), f.eta(i)),
            ];
            for (a, from, to) in pairs {
                worst = worst.max(self.apply_j(a, from).sub(to).max_abs());
            }
        }
        worst
    }

    /// `ĝ(E_A, E_B)` over the adapted frame.
    pub fn frame_gram(&self, f: &AdaptedFrame) -> crate::linalg::Matrix {
        let m = f.vectors.len();
        crate::linalg::Matrix::from_shape_fn((m, m), |(a, b)| {
            self.ghat(&f.vectors[a], &f.vectors[b])
        })
    }
}
