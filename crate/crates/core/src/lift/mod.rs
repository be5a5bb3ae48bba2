//! Closed-form almost hypercomplex Hermitian-Norden structure on `TM`.
//!
//! A tangent vector to `TM` at `(p, u)` is stored as `X^H + Y^V`
//! ([`LiftVector`] with `h = X`, `v = Y`), horizontal lifts taken with
//! respect to the Levi-Civita connection of the base.

mod classify;
mod frame;
mod tensors;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::base::PointGeometry;
use crate::linalg::Vector;
use crate::{Error, Result};

pub use classify::{classify, ClassificationFlags, ClassificationReport, Flag};
pub use frame::{adapted_frame, j_basis, AdaptedFrame, FRAME_SIGNS};

/// Which of the three almost complex structures `J₁, J₂, J₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alpha {
    One,
    Two,
    Three,
}

impl Alpha {
    pub const ALL: [Alpha; 3] = [Alpha::One, Alpha::Two, Alpha::Three];

    pub fn index(self) -> usize {
        match self {
            Alpha::One => 1,
            Alpha::Two => 2,
            Alpha::Three => 3,
        }
    }
}

/// Horizontal or vertical lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lift {
    H,
    V,
}

impl Lift {
    pub const BOTH: [Lift; 2] = [Lift::H, Lift::V];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftVector {
    pub h: Vector,
    pub v: Vector,
}

impl LiftVector {
    pub fn new(h: Vector, v: Vector) -> Self {
        assert_eq!(h.len(), v.len(), "horizontal and vertical parts differ in length");
        LiftVector { h, v }
    }

    pub fn zero(dim: usize) -> Self {
        LiftVector::new(Array1::zeros(dim), Array1::zeros(dim))
    }

    pub fn horizontal(x: Vector) -> Self {
        let dim = x.len();
        LiftVector::new(x, Array1::zeros(dim))
    }

    pub fn vertical(y: Vector) -> Self {
        let dim = y.len();
        LiftVector::new(Array1::zeros(dim), y)
    }

    pub fn lift(kind: Lift, x: Vector) -> Self {
        match kind {
            Lift::H => Self::horizontal(x),
            Lift::V => Self::vertical(x),
        }
    }

    /// The `kind` part of `self`.
    pub fn part(&self, kind: Lift) -> &Vector {
        match kind {
            Lift::H => &self.h,
            Lift::V => &self.v,
        }
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn add(&self, o: &LiftVector) -> LiftVector {
        LiftVector::new(&self.h + &o.h, &self.v + &o.v)
    }

    pub fn sub(&self, o: &LiftVector) -> LiftVector {
        LiftVector::new(&self.h - &o.h, &self.v - &o.v)
    }

    pub fn scale(&self, s: f64) -> LiftVector {
        LiftVector::new(&self.h * s, &self.v * s)
    }

    pub fn neg(&self) -> LiftVector {
        self.scale(-1.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.h.iter().chain(self.v.iter()).fold(0.0, |a, &b| a.max(b.abs()))
    }

    /// Components in the order `(h, v)`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.h.iter().chain(self.v.iter()).copied().collect()
    }

    pub fn from_slice(c: &[f64]) -> Self {
        let d = c.len() / 2;
        LiftVector::new(Array1::from(c[..d].to_vec()), Array1::from(c[d..].to_vec()))
    }
}

/// A point `u ∈ T_pM` together with the base geometry at `p`.
#[derive(Debug, Clone)]
pub struct TangentBundlePoint {
    pub geom: PointGeometry,
    pub u: Vector,
}

impl TangentBundlePoint {
    pub fn new(geom: PointGeometry, u: Vector) -> Result<Self> {
        if u.len() != geom.dim() {
            return Err(Error::InvalidParameter(format!(
                "fibre vector has {} components, base dimension is {}",
                u.len(),
                geom.dim()
            )));
        }
        Ok(TangentBundlePoint { geom, u })
    }

    pub fn dim(&self) -> usize {
        self.geom.dim()
    }

    pub fn is_zero_section(&self) -> bool {
        self.u.iter().all(|&c| c == 0.0)
    }

    fn j(&self, x: &Vector) -> Vector {
        self.geom.j(x)
    }

    /// `J₁: (X, Y) ↦ (-JX, JY)`, `J₂: (X, Y) ↦ (-Y, X)`, `J₃: (X, Y) ↦ (JY, JX)`.
    pub fn apply_j(&self, alpha: Alpha, w: &LiftVector) -> LiftVector {
        match alpha {
            Alpha::One => LiftVector::new(-self.j(&w.h), self.j(&w.v)),
            Alpha::Two => LiftVector::new(-&w.v, w.h.clone()),
            Alpha::Three => LiftVector::new(self.j(&w.v), self.j(&w.h)),
        }
    }

    /// The complete lift `ĝ`: pairs horizontal with vertical parts through `g`.
    pub fn ghat(&self, a: &LiftVector, b: &LiftVector) -> f64 {
        self.geom.metric(&a.h, &b.v) + self.geom.metric(&a.v, &b.h)
    }

    /// `Φ̂ = ĝ(J₁·, ·)`.
    pub fn phi_hat(&self, a: &LiftVector, b: &LiftVector) -> f64 {
        self.ghat(&self.apply_j(Alpha::One, a), b)
    }

    /// `ĝ₂ = ĝ(J₂·, ·)`.
    pub fn g2_hat(&self, a: &LiftVector, b: &LiftVector) -> f64 {
        self.ghat(&self.apply_j(Alpha::Two, a), b)
    }

    /// `ĝ₃ = ĝ(J₃·, ·)`.
    pub fn g3_hat(&self, a: &LiftVector, b: &LiftVector) -> f64 {
        self.ghat(&self.apply_j(Alpha::Three, a), b)
    }

    /// `ĝ(J_α·, ·)` for `α = 1, 2, 3`.
    pub fn hat_form(&self, alpha: Alpha, a: &LiftVector, b: &LiftVector) -> f64 {
        self.ghat(&self.apply_j(alpha, a), b)
    }
}
