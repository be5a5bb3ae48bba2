//! Vanishing flags for `N_α`, `F_α`, `θ_α` and the labels they imply.

use serde::Serialize;

use super::{Alpha, Lift, LiftVector, TangentBundlePoint};
use crate::linalg::{self, Vector};

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Flag {
    pub vanishes: bool,
    pub max_violation: f64,
}

impl Flag {
    fn new(max_violation: f64, tol: f64) -> Self {
        Flag {
            vanishes: max_violation <= tol,
            max_violation,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationFlags {
    pub nijenhuis: [Flag; 3],
    pub structure: [Flag; 3],
    pub lee: [Flag; 3],
    pub base_flat: Flag,
    pub base_j_parallel: Flag,
    pub base_ricci_flat: Flag,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub points: usize,
    pub zero_section_points: usize,
    pub tolerance: f64,
    pub flags: ClassificationFlags,
    pub labels: Vec<String>,
    pub notes: Vec<String>,
}

fn lifted_basis(dim: usize) -> Vec<LiftVector> {
    let mut out = Vec::with_capacity(2 * dim);
    for kind in Lift::BOTH {
        for k in 0..dim {
            let mut e = Vector::zeros(dim);
            e[k] = 1.0;
            out.push(LiftVector::lift(kind, e));
        }
    }
    out
}

#[derive(Default, Clone, Copy)]
struct Maxima {
    n: [f64; 3],
    f: [f64; 3],
    theta: [f64; 3],
    r: f64,
    nj: f64,
    rho: f64,
}

fn point_maxima(t: &TangentBundlePoint) -> Maxima {
    let basis = lifted_basis(t.dim());
    let mut m = Maxima::default();
    for (ai, alpha) in Alpha::ALL.into_iter().enumerate() {
        for a in &basis {
            m.theta[ai] = m.theta[ai].max(t.lee_form(alpha, a).abs());
            for b in &basis {
                m.n[ai] = m.n[ai].max(t.nijenhuis(alpha, a, b).max_abs());
                for c in &basis {
                    m.f[ai] = m.f[ai].max(t.f_lift(alpha, a, b, c).abs());
                }
            }
        }
    }
    let mag = t.geom.magnitudes();
    m.r = mag.curvature;
    m.nj = mag.nabla_j;
    m.rho = linalg::max_abs(&t.geom.rho);
    m
}

/// Flags over all `points`; a flag holds when its largest violation is ≤ `tol`.
pub fn classify(points: &[TangentBundlePoint], tol: f64) -> ClassificationReport {
    use rayon::prelude::*;
    let all: Vec<Maxima> = points.par_iter().map(point_maxima).collect();
    let mut m = Maxima::default();
    for p in &all {
        for i in 0..3 {
            m.n[i] = m.n[i].max(p.n[i]);
            m.f[i] = m.f[i].max(p.f[i]);
            m.theta[i] = m.theta[i].max(p.theta[i]);
        }
        m.r = m.r.max(p.r);
        m.nj = m.nj.max(p.nj);
        m.rho = m.rho.max(p.rho);
    }
    let flags = ClassificationFlags {
        nijenhuis: m.n.map(|v| Flag::new(v, tol)),
        structure: m.f.map(|v| Flag::new(v, tol)),
        lee: m.theta.map(|v| Flag::new(v, tol)),
        base_flat: Flag::new(m.r, tol),
        base_j_parallel: Flag::new(m.nj, tol),
        base_ricci_flat: Flag::new(m.rho, tol),
    };

    let mut labels = Vec::new();
    for (i, f) in flags.nijenhuis.iter().enumerate() {
        if f.vanishes {
            labels.push(format!("J{} integrable", i + 1));
        }
    }
    if flags.nijenhuis.iter().all(|f| f.vanishes) {
        labels.push("hypercomplex".into());
    } else {
        labels.push("not hypercomplex".into());
    }
    if flags.structure.iter().all(|f| f.vanishes) {
        labels.push("pseudo-hyper-Kähler".into());
    }
    if flags.lee[0].vanishes {
        labels.push("semi-Kähler w.r.t. J1".into());
    }
    for i in [1, 2] {
        if flags.lee[i].vanishes {
            labels.push(format!("W2⊕W3 w.r.t. J{}", i + 1));
        }
    }

    let zero_section_points = points.iter().filter(|t| t.is_zero_section()).count();
    let mut notes = Vec::new();
    if zero_section_points > 0 {
        notes.push(format!(
            "zero-section point: {zero_section_points} sample(s) have u = 0, where all u-linear components vanish"
        ));
    }
    ClassificationReport {
        points: points.len(),
        zero_section_points,
        tolerance: tol,
        flags,
        labels,
        notes,
    }
}

impl ClassificationReport {
    pub fn has_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }
}
