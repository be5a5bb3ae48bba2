//! Synthetic "manifold at a point": numeric tensors with no chart behind them.

use ndarray::{Array2, Array3, Array4, Array5};
use serde::Serialize;

use super::chart::ChartManifold;
use super::geometry::PointGeometry;
use crate::expr::Expr;
use crate::hsphere::{pi_array, PiKind};
use crate::linalg::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Flat { n: usize },
    Hsphere { n: usize, a: f64, b: f64 },
    Custom,
}

/// h-sphere parameters with derived totally real curvatures `ν`, `ν*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HSphereParams {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub nu: f64,
    pub nu_star: f64,
}

impl HSphereParams {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("h-sphere needs n >= 2, got {n}")));
        }
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter("h-sphere parameters must be finite".into()));
        }
        let d = a * a + b * b;
        if d == 0.0 {
            return Err(Error::InvalidParameter("h-sphere parameters (a, b) = (0, 0)".into()));
        }
        Ok(HSphereParams {
            n,
            a,
            b,
            nu: a / d,
            nu_star: -b / d,
        })
    }
}

#[derive(Debug, Clone)]
pub struct PointwiseModel {
    pub g: Matrix,
    pub structure: Matrix,
    pub riemann: Array4<f64>,
    pub nabla_riemann: Array5<f64>,
    pub f: Array3<f64>,
    pub provenance: Provenance,
}

/// `g = diag(I_n, -I_n)` and `J e_i = e_{n+i}`, `J e_{n+i} = -e_i`.
pub fn standard_norden(n: usize) -> (Matrix, Matrix) {
    let dim = 2 * n;
    let g = Array2::from_shape_fn((dim, dim), |(i, j)| match (i == j, i < n) {
        (true, true) => 1.0,
        (true, false) => -1.0,
        _ => 0.0,
    });
    let j = Array2::from_shape_fn((dim, dim), |(k, l)| {
        if l < n && k == l + n {
            1.0
        } else if l >= n && k + n == l {
            -1.0
        } else {
            0.0
        }
    });
    (g, j)
}

impl PointwiseModel {
    pub fn flat(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("flat model needs n >= 1".into()));
        }
        let (g, structure) = standard_norden(n);
        let dim = 2 * n;
        Ok(PointwiseModel {
            g,
            structure,
            riemann: Array4::zeros((dim, dim, dim, dim)),
            nabla_riemann: Array5::zeros((dim, dim, dim, dim, dim)),
            f: Array3::zeros((dim, dim, dim)),
            provenance: Provenance::Flat { n },
        })
    }

    /// `R = ν(π₁ - π₂) + ν*π₃`, `∇R = 0`, `F = 0`.
    pub fn hsphere(n: usize, a: f64, b: f64) -> Result<Self> {
        let params = HSphereParams::new(n, a, b)?;
        let (g, structure) = standard_norden(n);
        let dim = 2 * n;
        let gt = g.dot(&structure);
        let p1 = pi_array(PiKind::One, &g, &gt);
        let p2 = pi_array(PiKind::Two, &g, &gt);
        let p3 = pi_array(PiKind::Three, &g, &gt);
        let riemann = (&p1 - &p2) * params.nu + p3 * params.nu_star;
        Ok(PointwiseModel {
            g,
            structure,
            riemann,
            nabla_riemann: Array5::zeros((dim, dim, dim, dim, dim)),
            f: Array3::zeros((dim, dim, dim)),
            provenance: Provenance::Hsphere { n, a, b },
        })
    }

    pub fn custom(
        g: Matrix,
        structure: Matrix,
        riemann: Array4<f64>,
        nabla_riemann: Array5<f64>,
        f: Array3<f64>,
    ) -> Result<Self> {
        let dim = g.nrows();
        let ok = g.ncols() == dim
            && structure.dim() == (dim, dim)
            && riemann.dim() == (dim, dim, dim, dim)
            && nabla_riemann.dim() == (dim, dim, dim, dim, dim)
            && f.dim() == (dim, dim, dim);
        if !ok || !dim.is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "pointwise tensors must share an even dimension".into(),
            ));
        }
        Ok(PointwiseModel {
            g,
            structure,
            riemann,
            nabla_riemann,
            f,
            provenance: Provenance::Custom,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn hsphere_params(&self) -> Option<HSphereParams> {
        match self.provenance {
            Provenance::Hsphere { n, a, b } => HSphereParams::new(n, a, b).ok(),
            _ => None,
        }
    }

    /// Geometry at the model point, taking `Γ = 0` there.
    pub fn geometry(&self) -> Result<PointGeometry> {
        let dim = self.dim();
        let g_inv = crate::linalg::inverse(&self.g)
            .ok_or_else(|| Error::SingularMetric(vec![0.0; dim]))?;
        let nabla_j = Array3::from_shape_fn((dim, dim, dim), |(i, k, j)| {
            (0..dim).map(|m| g_inv[[k, m]] * self.f[[i, j, m]]).sum()
        });
        PointGeometry::from_tensors(
            vec![0.0; dim],
            self.g.clone(),
            self.structure.clone(),
            Array3::zeros((dim, dim, dim)),
            self.riemann.clone(),
            self.nabla_riemann.clone(),
            nabla_j,
        )
    }

    /// A chart whose 3-jet at the origin reproduces `(g, R)` with `Γ = 0`
    /// and `∇R = 0` there: `g_ij(x) = g_ij + R(∂i, x, ∂j, x) / 3`, `J` constant.
    pub fn normal_chart(&self) -> Result<ChartManifold> {
        let dim = self.dim();
        let metric = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let mut terms = vec![Expr::constant(self.g[[i, j]])];
                        for k in 0..dim {
                            for l in 0..dim {
                                let c = self.riemann[[i, k, j, l]] / 3.0;
                                if c != 0.0 {
                                    terms.push(Expr::mul(
                                        Expr::constant(c),
                                        Expr::mul(Expr::var(k), Expr::var(l)),
                                    ));
                                }
                            }
                        }
                        Expr::sum(terms)
                    })
                    .collect()
            })
            .collect();
        let structure = (0..dim)
            .map(|k| (0..dim).map(|l| Expr::constant(self.structure[[k, l]])).collect())
            .collect();
        let name = match self.provenance {
            Provenance::Flat { n } => format!("flat-{n}-normal"),
            Provenance::Hsphere { n, a, b } => format!("hsphere-{n}-{a}-{b}-normal"),
            Provenance::Custom => "custom-normal".to_string(),
        };
        ChartManifold::new(&name, dim, metric, structure)?.with_samples(vec![vec![0.0; dim]])
    }
}
