//! Levi-Civita geometry of a chart at a point, computed from metric jets.
//!
//! Conventions (all arrays use zero-based coordinate indices):
//!
//! * `gamma[[k, i, j]] = Γ^k_ij`
//! * `riemann_up[[l, i, j, k]]` is the `l`-th component of `R(∂i, ∂j)∂k`, with
//!   `R(X, Y) = ∇_X ∇_Y - ∇_Y ∇_X - ∇_[X,Y]`
//! * `riemann[[i, j, k, l]] = R(∂i, ∂j, ∂k, ∂l) = g(R(∂i, ∂j)∂k, ∂l)`
//! * `nabla_riemann[[m, i, j, k, l]] = (∇_m R)(∂i, ∂j, ∂k, ∂l)`
//! * `structure[[k, j]] = J^k_j`, so `(J x)^k = J^k_j x^j`
//! * `nabla_j[[i, k, j]] = ((∇_i J) ∂j)^k`
//! * `f[[i, j, k]] = F(∂i, ∂j, ∂k) = g((∇_i J)∂j, ∂k)`
//! * `nijenhuis[[k, i, j]]` is the `k`-th component of
//!   `N(∂i, ∂j) = [∂i,∂j] + J[J∂i,∂j] + J[∂i,J∂j] - [J∂i,J∂j]`
//! * `rho(y, z) = g^{ij} R(∂i, y, z, ∂j)`, `rho_star(y, z) = g^{ij} R(∂i, y, z, J∂j)`
//! * `theta(z) = g^{ij} F(∂i, ∂j, z)`

use ndarray::{Array1, Array2, Array3, Array4, Array5};
use serde::Serialize;

use super::chart::ChartManifold;
use crate::expr::JetEvaluator;
use crate::jet::{Jet, DEFAULT_ORDER};
use crate::linalg::{self, Matrix, Vector};
use crate::{Error, Result};

/// Evaluates a matrix of expressions as jets of the given order around `point`.
pub fn eval_matrix_jets(
    exprs: &[Vec<crate::expr::Expr>],
    env: &[Jet],
    evaluator: &mut JetEvaluator<'_>,
) -> Result<Vec<Vec<Jet>>> {
    let _ = env;
    exprs
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| evaluator.eval(e).map_err(Error::from))
                .collect()
        })
        .collect()
}

/// Metric-only data at a point: connection, curvature and optionally `∇R`.
#[derive(Debug, Clone)]
pub struct Connection {
    pub g: Matrix,
    pub g_inv: Matrix,
    pub gamma: Array3<f64>,
    pub riemann_up: Array4<f64>,
    pub riemann: Array4<f64>,
    pub nabla_riemann: Option<Array5<f64>>,
}

impl Connection {
    /// Builds the Levi-Civita data from metric jets of order ≥ 2
    /// (≥ 3 when `with_nabla_r`).
    pub fn from_metric_jets(g: &[Vec<Jet>], point: &[f64], with_nabla_r: bool) -> Result<Self> {
        let dim = g.len();
        let order = g[0][0].order();
        let needed = if with_nabla_r { 3 } else { 2 };
        if order < needed {
            return Err(Error::Structural(format!(
                "jet order {order} too low: curvature{} needs order {needed}",
                if with_nabla_r { " derivative" } else { "" }
            )));
        }
        let g_inv = linalg::invert_jets(g, point)?;

        // Γ^k_ij as jets of order K-1.
        let dg: Vec<Vec<Vec<Jet>>> = (0..dim)
            .map(|c| {
                (0..dim)
                    .map(|a| (0..dim).map(|b| g[a][b].derivative(c)).collect())
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let g_inv_1 = truncate_all(&g_inv, order - 1)?;
        let zero1 = dg[0][0][0].zero_like();
        let mut gamma_lower = vec![vec![vec![zero1.clone(); dim]; dim]; dim];
        for l in 0..dim {
            for i in 0..dim {
                for j in i..dim {
                    let mut t = &dg[i][l][j] + &dg[j][l][i];
                    t = &t - &dg[l][i][j];
                    let t = t.scale(0.5);
                    gamma_lower[l][i][j] = t.clone();
                    gamma_lower[l][j][i] = t;
                }
            }
        }
        let mut gamma_j = vec![vec![vec![zero1.clone(); dim]; dim]; dim];
        for k in 0..dim {
            for i in 0..dim {
                for j in i..dim {
                    let mut acc = zero1.clone();
                    for l in 0..dim {
                        if is_zero(&g_inv_1[k][l]) || is_zero(&gamma_lower[l][i][j]) {
                            continue;
                        }
                        acc = &acc + &(&g_inv_1[k][l] * &gamma_lower[l][i][j]);
                    }
                    gamma_j[k][i][j] = acc.clone();
                    gamma_j[k][j][i] = acc;
                }
            }
        }

        // R^l_{ijk} as jets of order K-2.
        let d_gamma: Vec<Vec<Vec<Vec<Jet>>>> = (0..dim)
            .map(|c| {
                gamma_j
                    .iter()
                    .map(|plane| {
                        plane
                            .iter()
                            .map(|row| row.iter().map(|x| x.derivative(c)).collect())
                            .collect::<std::result::Result<Vec<Vec<Jet>>, _>>()
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let gamma_2: Vec<Vec<Vec<Jet>>> = gamma_j
            .iter()
            .map(|plane| truncate_all(plane, order - 2))
            .collect::<Result<_>>()?;
        let zero2 = gamma_2[0][0][0].zero_like();
        let mut rup = vec![vec![vec![vec![zero2.clone(); dim]; dim]; dim]; dim];
        for l in 0..dim {
            for i in 0..dim {
                for j in (i + 1)..dim {
                    for k in 0..dim {
                        let mut acc = &d_gamma[i][l][j][k] - &d_gamma[j][l][i][k];
                        for m in 0..dim {
                            if !is_zero(&gamma_2[l][i][m]) && !is_zero(&gamma_2[m][j][k]) {
                                acc = &acc + &(&gamma_2[l][i][m] * &gamma_2[m][j][k]);
                            }
                            if !is_zero(&gamma_2[l][j][m]) && !is_zero(&gamma_2[m][i][k]) {
                                acc = &acc - &(&gamma_2[l][j][m] * &gamma_2[m][i][k]);
                            }
                        }
                        rup[l][j][i][k] = acc.neg();
                        rup[l][i][j][k] = acc;
                    }
                }
            }
        }
        let g_2 = truncate_all(g, order - 2)?;
        let mut rlow = vec![vec![vec![vec![zero2.clone(); dim]; dim]; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let mut acc = zero2.clone();
                        for m in 0..dim {
                            if !is_zero(&g_2[l][m]) && !is_zero(&rup[m][i][j][k]) {
                                acc = &acc + &(&g_2[l][m] * &rup[m][i][j][k]);
                            }
                        }
                        rlow[i][j][k][l] = acc;
                    }
                }
            }
        }

        let gamma = Array3::from_shape_fn((dim, dim, dim), |(k, i, j)| gamma_j[k][i][j].value());
        let riemann_up =
            Array4::from_shape_fn((dim, dim, dim, dim), |(l, i, j, k)| rup[l][i][j][k].value());
        let riemann =
            Array4::from_shape_fn((dim, dim, dim, dim), |(i, j, k, l)| rlow[i][j][k][l].value());

        let nabla_riemann = if with_nabla_r {
            Some(Array5::from_shape_fn((dim, dim, dim, dim, dim), |(m, i, j, k, l)| {
                let mut v = rlow[i][j][k][l].d1(m);
                for p in 0..dim {
                    v -= gamma[[p, m, i]] * riemann[[p, j, k, l]]
                        + gamma[[p, m, j]] * riemann[[i, p, k, l]]
                        + gamma[[p, m, k]] * riemann[[i, j, p, l]]
                        + gamma[[p, m, l]] * riemann[[i, j, k, p]];
                }
                v
            }))
        } else {
            None
        };

        Ok(Connection {
            g: linalg::values(g),
            g_inv: linalg::values(&g_inv),
            gamma,
            riemann_up,
            riemann,
            nabla_riemann,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `(∇_i J)^k_j` from structure jets of order ≥ 1.
    pub fn nabla_structure(&self, structure: &[Vec<Jet>]) -> Array3<f64> {
        let dim = self.dim();
        let j = Array2::from_shape_fn((dim, dim), |(k, l)| structure[k][l].value());
        Array3::from_shape_fn((dim, dim, dim), |(i, k, jj)| {
            let mut v = structure[k][jj].d1(i);
            for l in 0..dim {
                v += self.gamma[[k, i, l]] * j[[l, jj]] - self.gamma[[l, i, jj]] * j[[k, l]];
            }
            v
        })
    }

    pub fn ricci(&self) -> Matrix {
        let dim = self.dim();
        Array2::from_shape_fn((dim, dim), |(j, k)| {
            let mut s = 0.0;
            for i in 0..dim {
                for l in 0..dim {
                    s += self.g_inv[[i, l]] * self.riemann[[i, j, k, l]];
                }
            }
            s
        })
    }

    pub fn scalar_curvature(&self) -> f64 {
        trace_with(&self.g_inv, &self.ricci())
    }
}

fn is_zero(j: &Jet) -> bool {
    j.coeffs().iter().all(|&c| c == 0.0)
}

fn truncate_all(m: &[Vec<Jet>], order: usize) -> Result<Vec<Vec<Jet>>> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|x| x.truncate(order).map_err(Error::from))
                .collect()
        })
        .collect()
}

/// `g^{ij} a_ij`.
pub fn trace_with(g_inv: &Matrix, a: &Matrix) -> f64 {
    g_inv.iter().zip(a.iter()).map(|(x, y)| x * y).sum()
}

/// All base-manifold tensors at one point.
#[derive(Debug, Clone, Serialize)]
pub struct PointGeometry {
    pub p: Vec<f64>,
    #[serde(skip)]
    pub g: Matrix,
    #[serde(skip)]
    pub g_inv: Matrix,
    #[serde(skip)]
    pub g_tilde: Matrix,
    #[serde(skip)]
    pub structure: Matrix,
    #[serde(skip)]
    pub gamma: Array3<f64>,
    #[serde(skip)]
    pub riemann: Array4<f64>,
    #[serde(skip)]
    pub riemann_up: Array4<f64>,
    #[serde(skip)]
    pub nabla_riemann: Array5<f64>,
    #[serde(skip)]
    pub nabla_j: Array3<f64>,
    #[serde(skip)]
    pub f: Array3<f64>,
    #[serde(skip)]
    pub rho: Matrix,
    #[serde(skip)]
    pub rho_star: Matrix,
    pub tau: f64,
    pub tau_star: f64,
    pub theta: Vec<f64>,
    #[serde(skip)]
    pub nijenhuis: Array3<f64>,
}

impl PointGeometry {
    /// Assembles derived tensors from the primary ones.
    ///
    /// `riemann` is the (0,4) tensor; `riemann_up` is recomputed from it.
    #[allow(clippy::too_many_arguments)]
    pub fn from_tensors(
        p: Vec<f64>,
        g: Matrix,
        structure: Matrix,
        gamma: Array3<f64>,
        riemann: Array4<f64>,
        nabla_riemann: Array5<f64>,
        nabla_j: Array3<f64>,
    ) -> Result<Self> {
        let dim = g.nrows();
        let g_inv = linalg::inverse(&g).ok_or_else(|| Error::SingularMetric(p.clone()))?;
        let g_tilde = g.dot(&structure);
        let riemann_up = Array4::from_shape_fn((dim, dim, dim, dim), |(l, i, j, k)| {
            (0..dim).map(|m| g_inv[[l, m]] * riemann[[i, j, k, m]]).sum()
        });
        let f = Array3::from_shape_fn((dim, dim, dim), |(i, j, k)| {
            (0..dim).map(|m| g[[k, m]] * nabla_j[[i, m, j]]).sum()
        });
        let rho = Array2::from_shape_fn((dim, dim), |(y, z)| {
            let mut s = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    s += g_inv[[i, j]] * riemann[[i, y, z, j]];
                }
            }
            s
        });
        // R(∂i, y, z, J∂j) = R_{i y z m} J^m_j
        let rho_star = Array2::from_shape_fn((dim, dim), |(y, z)| {
            let mut s = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    if g_inv[[i, j]] == 0.0 {
                        continue;
                    }
                    let r: f64 = (0..dim).map(|m| riemann[[i, y, z, m]] * structure[[m, j]]).sum();
                    s += g_inv[[i, j]] * r;
                }
            }
            s
        });
        let tau = trace_with(&g_inv, &rho);
        let tau_star = trace_with(&g_inv, &rho_star);
        let theta = (0..dim)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        s += g_inv[[i, j]] * f[[i, j, k]];
                    }
                }
                s
            })
            .collect();
        let nijenhuis = nijenhuis_from_nabla_j(&structure, &nabla_j);
        Ok(PointGeometry {
            p,
            g,
            g_inv,
            g_tilde,
            structure,
            gamma,
            riemann,
            riemann_up,
            nabla_riemann,
            nabla_j,
            f,
            rho,
            rho_star,
            tau,
            tau_star,
            theta,
            nijenhuis,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn metric(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&self.g.dot(y))
    }

    pub fn j(&self, x: &Vector) -> Vector {
        self.structure.dot(x)
    }

    /// `∇_X Y` for coordinate-constant fields `X`, `Y`.
    pub fn covariant(&self, x: &Vector, y: &Vector) -> Vector {
        contract3_vec(&self.gamma, x, y)
    }

    /// `R(x, y)z`.
    pub fn curvature_vec(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let dim = self.dim();
        Array1::from_shape_fn(dim, |l| {
            let mut s = 0.0;
            for i in 0..dim {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    if y[j] == 0.0 {
                        continue;
                    }
                    for k in 0..dim {
                        s += self.riemann_up[[l, i, j, k]] * x[i] * y[j] * z[k];
                    }
                }
            }
            s
        })
    }

    /// `R(x, y, z, w)`.
    pub fn curvature(&self, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> f64 {
        contract4(&self.riemann, x, y, z, w)
    }

    /// `(∇_u R)(x, y)z`.
    pub fn nabla_curvature_vec(&self, u: &Vector, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let dim = self.dim();
        let lowered = Array1::from_shape_fn(dim, |l| {
            let mut s = 0.0;
            for m in 0..dim {
                if u[m] == 0.0 {
                    continue;
                }
                for i in 0..dim {
                    for j in 0..dim {
                        for k in 0..dim {
                            s += self.nabla_riemann[[m, i, j, k, l]] * u[m] * x[i] * y[j] * z[k];
                        }
                    }
                }
            }
            s
        });
        self.g_inv.dot(&lowered)
    }

    /// `(∇_x J) y`.
    pub fn nabla_j_vec(&self, x: &Vector, y: &Vector) -> Vector {
        let dim = self.dim();
        Array1::from_shape_fn(dim, |k| {
            let mut s = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    s += self.nabla_j[[i, k, j]] * x[i] * y[j];
                }
            }
            s
        })
    }

    pub fn f_form(&self, x: &Vector, y: &Vector, z: &Vector) -> f64 {
        contract3(&self.f, x, y, z)
    }

    pub fn nijenhuis_vec(&self, x: &Vector, y: &Vector) -> Vector {
        let dim = self.dim();
        Array1::from_shape_fn(dim, |k| {
            let mut s = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    s += self.nijenhuis[[k, i, j]] * x[i] * y[j];
                }
            }
            s
        })
    }

    pub fn ricci(&self, y: &Vector, z: &Vector) -> f64 {
        y.dot(&self.rho.dot(z))
    }

    pub fn ricci_star(&self, y: &Vector, z: &Vector) -> f64 {
        y.dot(&self.rho_star.dot(z))
    }

    pub fn lee(&self, z: &Vector) -> f64 {
        self.theta.iter().zip(z.iter()).map(|(a, b)| a * b).sum()
    }

    /// Largest |component| of each diagnostic tensor.
    pub fn magnitudes(&self) -> BaseMagnitudes {
        let m = |it: &mut dyn Iterator<Item = &f64>| it.fold(0.0f64, |a, &b| a.max(b.abs()));
        BaseMagnitudes {
            curvature: m(&mut self.riemann.iter()),
            nabla_curvature: m(&mut self.nabla_riemann.iter()),
            nabla_j: m(&mut self.nabla_j.iter()),
            ricci: m(&mut self.rho.iter()),
            ricci_star: m(&mut self.rho_star.iter()),
            lee: m(&mut self.theta.iter()),
            nijenhuis: m(&mut self.nijenhuis.iter()),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BaseMagnitudes {
    pub curvature: f64,
    pub nabla_curvature: f64,
    pub nabla_j: f64,
    pub ricci: f64,
    pub ricci_star: f64,
    pub lee: f64,
    pub nijenhuis: f64,
}

/// `N(X,Y) = J(∇_X J)Y - J(∇_Y J)X - (∇_{JX} J)Y + (∇_{JY} J)X` on coordinate vectors.
pub fn nijenhuis_from_nabla_j(structure: &Matrix, nabla_j: &Array3<f64>) -> Array3<f64> {
    let dim = structure.nrows();
    Array3::from_shape_fn((dim, dim, dim), |(k, i, j)| {
        let mut s = 0.0;
        for m in 0..dim {
            s += structure[[k, m]] * (nabla_j[[i, m, j]] - nabla_j[[j, m, i]]);
            s += -structure[[m, i]] * nabla_j[[m, k, j]] + structure[[m, j]] * nabla_j[[m, k, i]];
        }
        s
    })
}

/// Nijenhuis tensor straight from coordinate derivatives of `J`:
/// `N(∂i,∂j)^k = J^k_l(∂_i J^l_j - ∂_j J^l_i) - J^m_i ∂_m J^k_j + J^m_j ∂_m J^k_i`.
pub fn nijenhuis_from_jets(structure: &[Vec<Jet>]) -> Array3<f64> {
    let dim = structure.len();
    Array3::from_shape_fn((dim, dim, dim), |(k, i, j)| {
        let mut s = 0.0;
        for l in 0..dim {
            s += structure[k][l].value() * (structure[l][j].d1(i) - structure[l][i].d1(j));
            s += -structure[l][i].value() * structure[k][j].d1(l)
                + structure[l][j].value() * structure[k][i].d1(l);
        }
        s
    })
}

pub fn contract3(t: &Array3<f64>, x: &Vector, y: &Vector, z: &Vector) -> f64 {
    let dim = x.len();
    let mut s = 0.0;
    for i in 0..dim {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..dim {
            if y[j] == 0.0 {
                continue;
            }
            for k in 0..dim {
                s += t[[i, j, k]] * x[i] * y[j] * z[k];
            }
        }
    }
    s
}

/// `v^k = t[[k, i, j]] x^i y^j`.
pub fn contract3_vec(t: &Array3<f64>, x: &Vector, y: &Vector) -> Vector {
    let dim = x.len();
    Array1::from_shape_fn(dim, |k| {
        let mut s = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                s += t[[k, i, j]] * x[i] * y[j];
            }
        }
        s
    })
}

pub fn contract4(t: &Array4<f64>, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> f64 {
    let dim = x.len();
    let mut s = 0.0;
    for i in 0..dim {
        if x[i] == 0.0 {
            continue;
        }
        for j in 0..dim {
            if y[j] == 0.0 {
                continue;
            }
            for k in 0..dim {
                if z[k] == 0.0 {
                    continue;
                }
                for l in 0..dim {
                    s += t[[i, j, k, l]] * x[i] * y[j] * z[k] * w[l];
                }
            }
        }
    }
    s
}

/// All base tensors of `m` at `p`, using jets of the default order.
pub fn point_geometry(m: &ChartManifold, p: &[f64]) -> Result<PointGeometry> {
    point_geometry_with_order(m, p, DEFAULT_ORDER)
}

/// As [`point_geometry`] with an explicit jet order (must be ≥ 3 for `∇R`).
pub fn point_geometry_with_order(
    m: &ChartManifold,
    p: &[f64],
    order: usize,
) -> Result<PointGeometry> {
    if p.len() != m.dim() {
        return Err(Error::InvalidParameter(format!(
            "point has {} coordinates, chart dimension is {}",
            p.len(),
            m.dim()
        )));
    }
    if order < 3 {
        return Err(Error::Structural(format!(
            "jet order {order} too low: the curvature derivative needs order 3"
        )));
    }
    let env = Jet::seed(p, order)?;
    let mut ev = JetEvaluator::new(&env)?;
    let g = eval_matrix_jets(m.metric(), &env, &mut ev)?;
    let j = eval_matrix_jets(m.structure(), &env, &mut ev)?;
    let conn = Connection::from_metric_jets(&g, p, true)?;
    let nabla_j = conn.nabla_structure(&j);
    let structure = linalg::values(&j);
    let Connection {
        g,
        gamma,
        riemann,
        nabla_riemann,
        ..
    } = conn;
    PointGeometry::from_tensors(
        p.to_vec(),
        g,
        structure,
        gamma,
        riemann,
        nabla_riemann.expect("requested"),
        nabla_j,
    )
}
