//! Pointwise checks of the almost Norden axioms on a chart.

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use super::chart::ChartManifold;
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointValidation {
    pub point: Vec<f64>,
    pub checks: Vec<InvariantCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub manifold: String,
    pub tolerance: f64,
    pub points: Vec<PointValidation>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.checks.iter().all(|c| c.passed))
    }

    /// Largest violation of the named invariant over all points.
    pub fn max_violation(&self, name: &str) -> f64 {
        self.points
            .iter()
            .flat_map(|p| p.checks.iter())
            .filter(|c| c.name == name)
            .fold(0.0, |a, c| a.max(c.violation))
    }

    pub fn invariant_passed(&self, name: &str) -> bool {
        self.points
            .iter()
            .flat_map(|p| p.checks.iter())
            .filter(|c| c.name == name)
            .all(|c| c.passed)
    }
}

pub const INVARIANTS: [&str; 5] = ["symmetric", "nondegenerate", "signature", "j_squared", "norden"];

/// Checks each invariant at each sample. A degenerate metric is reported,
/// never raised.
pub fn validate_structure(m: &ChartManifold, samples: &[Vec<f64>], tol: f64) -> StructureReport {
    let points = samples
        .par_iter()
        .map(|p| PointValidation {
            point: p.clone(),
            checks: validate_point(m, p, tol),
        })
        .collect();
    StructureReport {
        manifold: m.name().to_string(),
        tolerance: tol,
        points,
    }
}

fn eval(exprs: &[Vec<crate::expr::Expr>], p: &[f64]) -> Matrix {
    let d = exprs.len();
    Array2::from_shape_fn((d, d), |(i, j)| exprs[i][j].eval_f64(p))
}

fn validate_point(m: &ChartManifold, p: &[f64], tol: f64) -> Vec<InvariantCheck> {
    let d = m.dim();
    let g = eval(m.metric(), p);
    let j = eval(m.structure(), p);
    let finite = g.iter().chain(j.iter()).all(|v| v.is_finite());
    let scale = linalg::max_abs(&g).max(1.0);
    let check = |name, violation: f64, passed: bool| InvariantCheck {
        name,
        passed: finite && passed,
        violation: if finite { violation } else { f64::INFINITY },
    };

    let asym = linalg::max_abs(&(&g - &g.t()));
    let sv = linalg::singular_values(&g);
    let smallest = sv.last().copied().unwrap_or(0.0);
    let rel = smallest / sv.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let (pos, neg, zero) = linalg::inertia(&g, 1e-12);
    let sig_violation = ((pos as f64) - (d / 2) as f64).abs() + ((neg as f64) - (d / 2) as f64).abs() + zero as f64;
    let j2 = j.dot(&j) + Array2::<f64>::eye(d);
    let norden = j.t().dot(&g).dot(&j) + &g;
    vec![
        check("symmetric", asym, asym <= tol * scale),
        check("nondegenerate", 1.0 - rel.min(1.0), rel > 1e-12),
        check("signature", sig_violation, sig_violation == 0.0),
        check("j_squared", linalg::max_abs(&j2), linalg::max_abs(&j2) <= tol * scale),
        check(
            "norden",
            linalg::max_abs(&norden),
            linalg::max_abs(&norden) <= tol * scale,
        ),
    ]
}
