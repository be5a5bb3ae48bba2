//! Component formulas for `N_α`, `F_α`, `θ_α`, `∇̂`, brackets and `R̂` on lifts.
//!
//! Every multilinear map is defined on typed arguments (`X^H` or `X^V`) and
//! extended to general [`LiftVector`]s by splitting each argument into its
//! horizontal and vertical parts. Components absent from the closed forms
//! are exact zeros.

use super::{AdaptedFrame, Alpha, Lift, LiftVector, TangentBundlePoint};
use crate::linalg::Vector;
use crate::{Error, Result};

use Lift::{H, V};

/// `ξ^H` horizontal part and `η^V` vertical part.
fn hv(h: Vector, v: Vector) -> LiftVector {
    LiftVector::new(h, v)
}

impl TangentBundlePoint {
    /// `R(x, y)u`.
    fn ru(&self, x: &Vector, y: &Vector) -> Vector {
        self.geom.curvature_vec(x, y, &self.u)
    }

    /// `R(u, x, y, z)`.
    fn r_u(&self, x: &Vector, y: &Vector, z: &Vector) -> f64 {
        self.geom.curvature(&self.u, x, y, z)
    }

    fn nj(&self, x: &Vector, y: &Vector) -> Vector {
        self.geom.nabla_j_vec(x, y)
    }

    /// `N_α(X^{t1}, Y^{t2})`.
    pub fn nijenhuis_typed(&self, alpha: Alpha, t1: Lift, x: &Vector, t2: Lift, y: &Vector) -> LiftVector {
        let d = self.dim();
        let j = |v: &Vector| self.geom.j(v);
        let zero = || Vector::zeros(d);
        match (alpha, t1, t2) {
            (Alpha::One, H, H) => {
                let v = self.ru(&j(x), &j(y)) + j(&self.ru(&j(x), y)) + j(&self.ru(x, &j(y)))
                    - self.ru(x, y);
                hv(self.geom.nijenhuis_vec(x, y), v)
            }
            (Alpha::One, H, V) => hv(zero(), self.nj(&j(x), y) - self.nj(x, &j(y))),
            (Alpha::One, V, H) => hv(zero(), self.nj(y, &j(x)) - self.nj(&j(y), x)),
            (Alpha::One, V, V) => LiftVector::zero(d),
            (Alpha::Two, H, H) => hv(zero(), -self.ru(x, y)),
            (Alpha::Two, V, V) => hv(zero(), self.ru(x, y)),
            (Alpha::Two, H, V) | (Alpha::Two, V, H) => hv(-self.ru(x, y), zero()),
            (Alpha::Three, H, H) => hv(
                j(&self.nj(x, y)) - j(&self.nj(y, x)),
                -self.ru(x, y),
            ),
            (Alpha::Three, H, V) => hv(
                -j(&self.ru(x, &j(y))),
                j(&self.nj(x, y)) + self.nj(&j(y), x),
            ),
            (Alpha::Three, V, H) => hv(
                -j(&self.ru(&j(x), y)),
                -(self.nj(&j(x), y) + j(&self.nj(y, x))),
            ),
            (Alpha::Three, V, V) => hv(
                -(self.nj(&j(x), y) - self.nj(&j(y), x)),
                self.ru(&j(x), &j(y)),
            ),
        }
    }

    /// `N_α(w₁, w₂)` by bilinear extension.
    pub fn nijenhuis(&self, alpha: Alpha, a: &LiftVector, b: &LiftVector) -> LiftVector {
        let mut out = LiftVector::zero(self.dim());
        for t1 in Lift::BOTH {
            for t2 in Lift::BOTH {
                out = out.add(&self.nijenhuis_typed(alpha, t1, a.part(t1), t2, b.part(t2)));
            }
        }
        out
    }

    /// `F_α(X^{t1}, Y^{t2}, Z^{t3}) = ĝ((∇̂_X J_α)Y, Z)`.
    #[allow(clippy::too_many_arguments)]
    pub fn f_typed(
        &self,
        alpha: Alpha,
        t1: Lift,
        x: &Vector,
        t2: Lift,
        y: &Vector,
        t3: Lift,
        z: &Vector,
    ) -> f64 {
        let j = |v: &Vector| self.geom.j(v);
        let f = |a: &Vector, b: &Vector, c: &Vector| self.geom.f_form(a, b, c);
        match (alpha, t1, t2, t3) {
            (Alpha::One, H, H, H) => -self.r_u(x, &j(y), z) - self.r_u(x, y, &j(z)),
            (Alpha::One, H, H, V) => -f(x, y, z),
            (Alpha::One, H, V, H) => f(x, y, z),
            (Alpha::Two, H, H, V) => self.r_u(x, y, z),
            (Alpha::Two, H, V, H) => -self.r_u(x, y, z),
            (Alpha::Three, H, H, H) | (Alpha::Three, H, V, V) => f(x, y, z),
            (Alpha::Three, H, H, V) => -self.r_u(x, y, &j(z)),
            (Alpha::Three, H, V, H) => self.r_u(x, &j(y), z),
            _ => 0.0,
        }
    }

    /// `F_α(w₁, w₂, w₃)` by trilinear extension.
    pub fn f_lift(&self, alpha: Alpha, a: &LiftVector, b: &LiftVector, c: &LiftVector) -> f64 {
        let mut s = 0.0;
        for t2 in Lift::BOTH {
            for t3 in Lift::BOTH {
                // First slot vertical never contributes.
                s += self.f_typed(alpha, H, &a.h, t2, b.part(t2), t3, c.part(t3));
            }
        }
        s
    }

    /// `θ_α(Z^t)`: `θ₁(Z^H) = θ₃(Z^V) = θ(Z)`, `θ₂(Z^H) = -ρ(u, Z)`, `θ₃(Z^H) = ρ*(u, Z)`.
    pub fn lee_typed(&self, alpha: Alpha, t: Lift, z: &Vector) -> f64 {
        match (alpha, t) {
            (Alpha::One, H) | (Alpha::Three, V) => self.geom.lee(z),
            (Alpha::Two, H) => -self.geom.ricci(&self.u, z),
            (Alpha::Three, H) => self.geom.ricci_star(&self.u, z),
            _ => 0.0,
        }
    }

    pub fn lee_form(&self, alpha: Alpha, w: &LiftVector) -> f64 {
        self.lee_typed(alpha, H, &w.h) + self.lee_typed(alpha, V, &w.v)
    }

    /// `θ_α(w) = Σ_A ε_A F_α(E_A, E_A, w)` over the adapted frame.
    pub fn lee_frame_trace(&self, alpha: Alpha, w: &LiftVector) -> Result<f64> {
        Ok(self.lee_frame_trace_in(&self.adapted_frame()?, alpha, w))
    }

    /// [`Self::lee_frame_trace`] over a prebuilt frame.
    pub fn lee_frame_trace_in(&self, frame: &AdaptedFrame, alpha: Alpha, w: &LiftVector) -> f64 {
        frame
            .vectors
            .iter()
            .zip(&frame.signs)
            .map(|(e, s)| s * self.f_lift(alpha, e, e, w))
            .sum()
    }

    /// `∇̂_{X^{t1}} Y^{t2}` for coordinate-constant base fields `X`, `Y`.
    pub fn nabla_typed(&self, t1: Lift, x: &Vector, t2: Lift, y: &Vector) -> LiftVector {
        match (t1, t2) {
            (H, H) => hv(
                self.geom.covariant(x, y),
                self.geom.curvature_vec(&self.u, x, y),
            ),
            (H, V) => LiftVector::vertical(self.geom.covariant(x, y)),
            _ => LiftVector::zero(self.dim()),
        }
    }

    /// `[X^{t1}, Y^{t2}]` for coordinate-constant base fields `X`, `Y`.
    pub fn bracket_typed(&self, t1: Lift, x: &Vector, t2: Lift, y: &Vector) -> LiftVector {
        match (t1, t2) {
            (H, H) => LiftVector::vertical(-self.ru(x, y)),
            (H, V) => LiftVector::vertical(self.geom.covariant(x, y)),
            (V, H) => LiftVector::vertical(-self.geom.covariant(y, x)),
            (V, V) => LiftVector::zero(self.dim()),
        }
    }

    /// `R̂(X^{t1}, Y^{t2})Z^{t3}`. The listed components are
    /// `HHH`, `HHV`, `HVH`; `VHH` follows from antisymmetry in the first pair.
    pub fn curvature_typed(
        &self,
        t1: Lift,
        x: &Vector,
        t2: Lift,
        y: &Vector,
        t3: Lift,
        z: &Vector,
    ) -> LiftVector {
        match (t1, t2, t3) {
            (H, H, H) => hv(
                self.geom.curvature_vec(x, y, z),
                self.geom.nabla_curvature_vec(&self.u, x, y, z),
            ),
            (H, H, V) | (H, V, H) | (V, H, H) => {
                LiftVector::vertical(self.geom.curvature_vec(x, y, z))
            }
            _ => LiftVector::zero(self.dim()),
        }
    }

    pub fn curvature_hat(&self, a: &LiftVector, b: &LiftVector, c: &LiftVector) -> LiftVector {
        let mut out = LiftVector::zero(self.dim());
        for t1 in Lift::BOTH {
            for t2 in Lift::BOTH {
                for t3 in Lift::BOTH {
                    out = out.add(&self.curvature_typed(
                        t1,
                        a.part(t1),
                        t2,
                        b.part(t2),
                        t3,
                        c.part(t3),
                    ));
                }
            }
        }
        out
    }

    /// `R̂(a, b, c, d) = ĝ(R̂(a, b)c, d)`.
    pub fn curvature_form(&self, a: &LiftVector, b: &LiftVector, c: &LiftVector, d: &LiftVector) -> f64 {
        self.ghat(&self.curvature_hat(a, b, c), d)
    }

    /// `ρ̂(Y^H, Z^H) = 2ρ(Y, Z)`, other components zero.
    pub fn ricci_hat(&self, a: &LiftVector, b: &LiftVector) -> f64 {
        2.0 * self.geom.ricci(&a.h, &b.h)
    }

    /// Scalar curvature of `(TM, ĝ)`: identically zero.
    pub fn scalar_hat(&self) -> f64 {
        0.0
    }

    /// `π̂₁(a, b, b, a) = ĝ(b, b)ĝ(a, a) - ĝ(a, b)²`.
    pub fn plane_norm(&self, a: &LiftVector, b: &LiftVector) -> f64 {
        self.ghat(b, b) * self.ghat(a, a) - self.ghat(a, b).powi(2)
    }

    /// `k̂(a, b) = R̂(a, b, b, a) / π̂₁(a, b, b, a)`.
    pub fn sectional_hat(&self, a: &LiftVector, b: &LiftVector, null_tol: f64) -> Result<f64> {
        let pi = self.plane_norm(a, b);
        if pi.abs() < null_tol {
            return Err(Error::NullPlane(pi));
        }
        Ok(self.curvature_form(a, b, b, a) / pi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{point_geometry, ChartManifold, PointwiseModel};
    use ndarray::Array1;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv(rng: &mut ChaCha8Rng, d: usize) -> Vector {
        Array1::from_shape_fn(d, |_| rng.gen_range(-1.0..1.0))
    }

    fn rl(rng: &mut ChaCha8Rng, d: usize) -> LiftVector {
        LiftVector::new(rv(rng, d), rv(rng, d))
    }

    fn chart_tbp(name: &str, rng: &mut ChaCha8Rng) -> TangentBundlePoint {
        let m = ChartManifold::builtin(name).unwrap().unwrap();
        let p: Vec<f64> = (0..m.dim()).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let geom = point_geometry(&m, &p).unwrap();
        let d = m.dim();
        TangentBundlePoint::new(geom, rv(rng, d)).unwrap()
    }

    #[test]
    fn flat_kahler_norden_base_is_pseudo_hyper_kahler() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let geom = PointwiseModel::flat(2).unwrap().geometry().unwrap();
        let t = TangentBundlePoint::new(geom, rv(&mut rng, 4)).unwrap();
        for _ in 0..10 {
            let (a, b, c) = (rl(&mut rng, 4), rl(&mut rng, 4), rl(&mut rng, 4));
            for al in Alpha::ALL {
                assert_eq!(t.nijenhuis(al, &a, &b).max_abs(), 0.0);
                assert_eq!(t.f_lift(al, &a, &b, &c), 0.0);
                assert_eq!(t.lee_form(al, &a), 0.0);
            }
            assert_eq!(t.curvature_hat(&a, &b, &c).max_abs(), 0.0);
        }
    }

    #[test]
    fn n1_vanishes_on_vertical_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = chart_tbp("twisted-norden-4", &mut rng);
        let (x, y) = (rv(&mut rng, 4), rv(&mut rng, 4));
        assert_eq!(t.nijenhuis_typed(Alpha::One, V, &x, V, &y).max_abs(), 0.0);
    }

    #[test]
    fn nijenhuis_is_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for name in ["conformal-norden-4", "twisted-norden-4"] {
            let t = chart_tbp(name, &mut rng);
            for _ in 0..10 {
                let (a, b) = (rl(&mut rng, 4), rl(&mut rng, 4));
                for al in Alpha::ALL {
                    let s = t.nijenhuis(al, &a, &b).add(&t.nijenhuis(al, &b, &a));
                    assert!(s.max_abs() < 1e-12, "{name} {al:?}");
                }
            }
        }
    }

    #[test]
    fn structure_tensor_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for name in ["conformal-norden-4", "twisted-norden-4"] {
            let t = chart_tbp(name, &mut rng);
            for _ in 0..20 {
                let (a, b, c) = (rl(&mut rng, 4), rl(&mut rng, 4), rl(&mut rng, 4));
                let f1 = t.f_lift(Alpha::One, &a, &b, &c);
                let sum = t.f_lift(Alpha::Two, &a, &t.apply_j(Alpha::Three, &b), &c)
                    + t.f_lift(Alpha::Three, &a, &b, &t.apply_j(Alpha::Two, &c));
                assert!((f1 - sum).abs() < 1e-9);
                // Hermitian type for J₁, Norden type for J₂, J₃.
                let j1 = t.f_lift(
                    Alpha::One,
                    &a,
                    &t.apply_j(Alpha::One, &b),
                    &t.apply_j(Alpha::One, &c),
                );
                assert!((f1 + j1).abs() < 1e-9);
                assert!((f1 + t.f_lift(Alpha::One, &a, &c, &b)).abs() < 1e-9);
                for al in [Alpha::Two, Alpha::Three] {
                    let f = t.f_lift(al, &a, &b, &c);
                    let jj = t.f_lift(al, &a, &t.apply_j(al, &b), &t.apply_j(al, &c));
                    assert!((f - jj).abs() < 1e-9);
                    assert!((f - t.f_lift(al, &a, &c, &b)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn curvature_hat_has_curvature_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = chart_tbp("conformal-norden-4", &mut rng);
        for _ in 0..10 {
            let (a, b, c, d) = (rl(&mut rng, 4), rl(&mut rng, 4), rl(&mut rng, 4), rl(&mut rng, 4));
            let r = t.curvature_form(&a, &b, &c, &d);
            assert!((r + t.curvature_form(&b, &a, &c, &d)).abs() < 1e-10);
            assert!((r + t.curvature_form(&a, &b, &d, &c)).abs() < 1e-10);
            assert!((r - t.curvature_form(&c, &d, &a, &b)).abs() < 1e-10);
            let bianchi = r + t.curvature_form(&b, &c, &a, &d) + t.curvature_form(&c, &a, &b, &d);
            assert!(bianchi.abs() < 1e-10);
        }
    }

    #[test]
    fn lee_forms_on_hsphere() {
        let geom = PointwiseModel::hsphere(2, 3.0, 4.0).unwrap().geometry().unwrap();
        let e1 = Array1::from(vec![1.0, 0.0, 0.0, 0.0]);
        let t = TangentBundlePoint::new(geom, e1.clone()).unwrap();
        let th2 = t.lee_typed(Alpha::Two, H, &e1);
        assert!((th2 + 0.24).abs() < 1e-12);
        for al in Alpha::ALL {
            for z in 0..4 {
                let mut e = Array1::zeros(4);
                e[z] = 1.0;
                for kind in Lift::BOTH {
                    let w = LiftVector::lift(kind, e.clone());
                    let trace = t.lee_frame_trace(al, &w).unwrap();
                    assert!((trace - t.lee_form(al, &w)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn null_planes_are_rejected() {
        let geom = PointwiseModel::flat(2).unwrap().geometry().unwrap();
        let t = TangentBundlePoint::new(geom, Array1::zeros(4)).unwrap();
        let e1 = Array1::from(vec![1.0, 0.0, 0.0, 0.0]);
        let e2 = Array1::from(vec![0.0, 1.0, 0.0, 0.0]);
        let err = t
            .sectional_hat(&LiftVector::horizontal(e1), &LiftVector::horizontal(e2), 1e-12)
            .unwrap_err();
        assert!(matches!(err, Error::NullPlane(_)));
    }
}
