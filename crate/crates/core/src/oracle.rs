//! Brute-force ground truth for the lift formulas.
//!
//! `TM` is built as an ordinary chart in induced coordinates
//! `(x¹..x^m, y¹..y^m)` with the complete-lift metric
//!
//! ```text
//! ĝ(∂xi, ∂xj) = y^k ∂_k g_ij(x),   ĝ(∂xi, ∂yj) = g_ij(x),   ĝ(∂yi, ∂yj) = 0
//! ```
//!
//! and `J_α` transported from the horizontal/vertical splitting
//! `∂xi = (∂i)^H + Γ^k_ij y^j (∂k)^V`. All components are expression trees;
//! the Levi-Civita data, Nijenhuis tensors and structure tensors of the
//! `2m`-chart are then computed with the base-geometry machinery and
//! compared with the closed forms of [`crate::lift`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, Array3, Array4, ArrayD, Ix3, Ix4, IxDyn};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::base::geometry::{eval_matrix_jets, nijenhuis_from_jets, Connection};
use crate::base::{point_geometry, ChartManifold};
use crate::expr::{differentiate, Expr, JetEvaluator};
use crate::jet::Jet;
use crate::lift::{Alpha, Lift, LiftVector, TangentBundlePoint};
use crate::linalg::{self, Matrix, Vector};
use crate::{Error, Result};

type ExprMatrix = Vec<Vec<Expr>>;

/// `TM` of a base chart as a chart of twice the dimension.
#[derive(Debug, Clone)]
pub struct InducedChart {
    pub base: ChartManifold,
    /// Metric `ĝ`; its structure slot holds `J₂`.
    pub chart: ChartManifold,
    /// `Γ^k_ij(x)` of the base, indexed `[k][i][j]`.
    pub christoffel: Vec<Vec<Vec<Expr>>>,
    /// Coordinate matrices of `J₁, J₂, J₃`.
    pub structures: [ExprMatrix; 3],
}

fn zeros(d: usize) -> ExprMatrix {
    vec![vec![Expr::zero(); d]; d]
}

fn identity(d: usize) -> ExprMatrix {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect())
        .collect()
}

fn mat_mul(a: &ExprMatrix, b: &ExprMatrix) -> ExprMatrix {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| Expr::sum((0..d).map(|k| Expr::mul(a[i][k].clone(), b[k][j].clone()))))
                .collect()
        })
        .collect()
}

fn mat_zip(a: &ExprMatrix, b: &ExprMatrix, f: fn(Expr, Expr) -> Expr) -> ExprMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| f(x.clone(), y.clone())).collect())
        .collect()
}

fn mat_neg(a: &ExprMatrix) -> ExprMatrix {
    a.iter().map(|r| r.iter().map(|x| Expr::neg(x.clone())).collect()).collect()
}

/// Cofactor-expansion determinant of the submatrix on `rows × cols`.
fn minor(m: &ExprMatrix, rows: u32, cols: u32, memo: &mut HashMap<(u32, u32), Expr>) -> Expr {
    if rows == 0 {
        return Expr::one();
    }
    if let Some(e) = memo.get(&(rows, cols)) {
        return e.clone();
    }
    let r = rows.trailing_zeros() as usize;
    let mut terms = Vec::new();
    let mut position = 0;
    let mut rest = cols;
    while rest != 0 {
        let c = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if !m[r][c].is_zero() {
            let sub = minor(m, rows & !(1 << r), cols & !(1 << c), memo);
            let term = Expr::mul(m[r][c].clone(), sub);
            terms.push(if position % 2 == 0 { term } else { Expr::neg(term) });
        }
        position += 1;
    }
    let e = Expr::sum(terms);
    memo.insert((rows, cols), e.clone());
    e
}

/// Adjugate over determinant.
pub fn symbolic_inverse(m: &ExprMatrix) -> ExprMatrix {
    let d = m.len();
    assert!(d <= 16, "symbolic inverse limited to 16x16");
    let full = if d == 32 { u32::MAX } else { (1u32 << d) - 1 };
    let mut memo = HashMap::new();
    let det = minor(m, full, full, &mut memo);
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let cof = minor(m, full & !(1 << j), full & !(1 << i), &mut memo);
                    let cof = if (i + j) % 2 == 0 { cof } else { Expr::neg(cof) };
                    Expr::div(cof, det.clone())
                })
                .collect()
        })
        .collect()
}

/// Builds the induced chart of `TM`.
pub fn build_tm_chart(base: &ChartManifold) -> Result<InducedChart> {
    let m = base.dim();
    let g = base.metric();
    let dg: Vec<ExprMatrix> = (0..m)
        .map(|k| g.iter().map(|row| row.iter().map(|e| differentiate(e, k)).collect()).collect())
        .collect();
    let g_inv = symbolic_inverse(&g.to_vec());
    let christoffel: Vec<Vec<Vec<Expr>>> = (0..m)
        .map(|k| {
            (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            let terms = (0..m).map(|l| {
                                let koszul = Expr::sub(
                                    Expr::add(dg[i][l][j].clone(), dg[j][l][i].clone()),
                                    dg[l][i][j].clone(),
                                );
                                Expr::mul(g_inv[k][l].clone(), koszul)
                            });
                            Expr::mul(Expr::constant(0.5), Expr::sum(terms))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let y = |k: usize| Expr::var(m + k);
    // G^k_i = Γ^k_ij y^j
    let big_g: ExprMatrix = (0..m)
        .map(|k| {
            (0..m)
                .map(|i| Expr::sum((0..m).map(|j| Expr::mul(christoffel[k][i][j].clone(), y(j)))))
                .collect()
        })
        .collect();

    let mut metric = zeros(2 * m);
    for i in 0..m {
        for j in 0..m {
            metric[i][j] = Expr::sum((0..m).map(|k| Expr::mul(y(k), dg[k][i][j].clone())));
            metric[i][m + j] = g[i][j].clone();
            metric[m + i][j] = g[i][j].clone();
        }
    }

    let jm = base.structure().to_vec();
    let (z, id) = (zeros(m), identity(m));
    // (A, B, C, D) blocks acting on (h, v).
    let blocks = [
        (mat_neg(&jm), z.clone(), z.clone(), jm.clone()),
        (z.clone(), mat_neg(&id), id.clone(), z.clone()),
        (z.clone(), jm.clone(), jm.clone(), z.clone()),
    ];
    // T⁻¹ L T with T = [[I, 0], [G, I]].
    let structures = blocks.map(|(a, b, c, d)| {
        let top_left = mat_zip(&a, &mat_mul(&b, &big_g), Expr::add);
        let bottom_left = mat_zip(
            &mat_zip(&c, &mat_mul(&d, &big_g), Expr::add),
            &mat_mul(&big_g, &top_left),
            Expr::sub,
        );
        let bottom_right = mat_zip(&d, &mat_mul(&big_g, &b), Expr::sub);
        let mut out = zeros(2 * m);
        for i in 0..m {
            for j in 0..m {
                out[i][j] = top_left[i][j].clone();
                out[i][m + j] = b[i][j].clone();
                out[m + i][j] = bottom_left[i][j].clone();
                out[m + i][m + j] = bottom_right[i][j].clone();
            }
        }
        out
    });
    let chart = ChartManifold::new(
        format!("T{}", base.name()),
        2 * m,
        metric,
        structures[1].clone(),
    )?;
    Ok(InducedChart {
        base: base.clone(),
        chart,
        christoffel,
        structures,
    })
}

/// Which oracle comparisons to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Quantity {
    #[serde(rename = "g_hat")]
    GHat,
    #[serde(rename = "brackets")]
    Brackets,
    #[serde(rename = "nabla_hat")]
    NablaHat,
    #[serde(rename = "N_alpha")]
    NAlpha,
    #[serde(rename = "F_alpha")]
    FAlpha,
    #[serde(rename = "R_hat")]
    RHat,
    #[serde(rename = "ricci_hat")]
    RicciHat,
    #[serde(rename = "scalar_hat")]
    ScalarHat,
    #[serde(rename = "einstein_check")]
    EinsteinCheck,
}

impl Quantity {
    pub const ALL: [Quantity; 9] = [
        Quantity::GHat,
        Quantity::Brackets,
        Quantity::NablaHat,
        Quantity::NAlpha,
        Quantity::FAlpha,
        Quantity::RHat,
        Quantity::RicciHat,
        Quantity::ScalarHat,
        Quantity::EinsteinCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::GHat => "g_hat",
            Quantity::Brackets => "brackets",
            Quantity::NablaHat => "nabla_hat",
            Quantity::NAlpha => "N_alpha",
            Quantity::FAlpha => "F_alpha",
            Quantity::RHat => "R_hat",
            Quantity::RicciHat => "ricci_hat",
            Quantity::ScalarHat => "scalar_hat",
            Quantity::EinsteinCheck => "einstein_check",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown oracle quantity {s:?}")))
    }
}

/// Largest deviation between closed form and oracle for one quantity.
#[derive(Debug, Clone, Serialize)]
pub struct Deviation {
    pub quantity: Quantity,
    pub comparisons: usize,
    pub max_abs: f64,
    /// `|Δ| / max(1, |oracle|)`.
    pub max_rel: f64,
    pub worst: String,
}

impl Deviation {
    fn new(quantity: Quantity) -> Self {
        Deviation {
            quantity,
            comparisons: 0,
            max_abs: 0.0,
            max_rel: 0.0,
            worst: String::new(),
        }
    }

    fn record(&mut self, closed: f64, oracle: f64, what: impl FnOnce() -> String) {
        self.comparisons += 1;
        let d = (closed - oracle).abs();
        let rel = d / oracle.abs().max(1.0);
        if d > self.max_abs || d.is_nan() {
            self.max_abs = d;
            self.worst = what();
        }
        self.max_rel = self.max_rel.max(rel);
        if rel.is_nan() {
            self.max_rel = f64::NAN;
        }
    }

    fn record_vec(&mut self, closed: &LiftVector, oracle: &LiftVector, what: impl Fn() -> String) {
        for (c, o) in closed.to_vec().into_iter().zip(oracle.to_vec()) {
            self.record(c, o, &what);
        }
    }

    fn merge(&mut self, o: &Deviation) {
        self.comparisons += o.comparisons;
        if o.max_abs > self.max_abs || o.max_abs.is_nan() {
            self.max_abs = o.max_abs;
            self.worst = o.worst.clone();
        }
        self.max_rel = if o.max_rel.is_nan() { f64::NAN } else { self.max_rel.max(o.max_rel) };
    }

    /// Passes when the relative deviation is within `tol` (`NaN` fails).
    pub fn passed(&self, tol: f64) -> bool {
        self.max_rel <= tol
    }
}

/// Measurements the closed forms do not assert.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Unlisted {
    /// Largest oracle `R̂` component with two or more vertical arguments.
    pub r_hat: f64,
    /// Largest oracle `ρ̂` component with a vertical argument.
    pub ricci_hat: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SamplePoint {
    pub p: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub base: String,
    pub points: Vec<SamplePoint>,
    pub skipped: Vec<String>,
    pub deviations: Vec<Deviation>,
    pub unlisted: Unlisted,
    /// Largest `|τ̂|` of the oracle.
    pub scalar_max: f64,
    /// Largest `max|ρ̂ - τ̂ ĝ / dim TM|` of the oracle.
    pub einstein_max: f64,
    /// Largest `|ρ|` of the base over the sampled points.
    pub base_ricci_max: f64,
}

impl OracleReport {
    pub fn deviation(&self, q: Quantity) -> Option<&Deviation> {
        self.deviations.iter().find(|d| d.quantity == q)
    }

    /// Einstein iff the base is Ricci-flat, both judged at `tol`.
    pub fn einstein_consistent(&self, tol: f64) -> bool {
        (self.einstein_max <= tol) == (self.base_ricci_max <= tol)
    }
}

/// Oracle tensors at one point, expressed in the lifted coordinate basis
/// `E_A = (∂_A)^H` for `A < m` and `E_{m+A} = (∂_A)^V`.
#[derive(Debug, Clone)]
pub struct OracleSample {
    pub g_hat: Matrix,
    pub brackets: Vec<Vec<LiftVector>>,
    pub nabla: Vec<Vec<LiftVector>>,
    pub nijenhuis: [Array3<f64>; 3],
    pub structure_tensors: [Array3<f64>; 3],
    /// `r_hat[[L, A, B, C]]`: `L`-th lift component of `R̂(E_A, E_B)E_C`.
    pub r_hat: Array4<f64>,
    pub ricci: Matrix,
    pub scalar: f64,
}

/// Applies `q` along `axis`: `out[.., a, ..] = Σ_i q[a, i] t[.., i, ..]`.
fn apply_axis(t: ArrayD<f64>, axis: usize, q: &Matrix) -> ArrayD<f64> {
    let nd = t.ndim();
    let mut t = t;
    t.swap_axes(axis, nd - 1);
    let shape = t.shape().to_vec();
    let n = shape[nd - 1];
    let rows = t.len() / n;
    let flat = t
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((rows, n))
        .expect("contiguous");
    let out = flat.dot(&q.t());
    let mut out = out.into_shape_with_order(IxDyn(&shape)).expect("same size");
    out.swap_axes(axis, nd - 1);
    out.as_standard_layout().into_owned()
}

fn transform(t: ArrayD<f64>, mats: &[&Matrix]) -> ArrayD<f64> {
    mats.iter().enumerate().fold(t, |acc, (ax, q)| apply_axis(acc, ax, q))
}

fn env_for(p: &[f64], u: &[f64], order: usize) -> Result<Vec<Jet>> {
    let point: Vec<f64> = p.iter().chain(u).copied().collect();
    Ok(Jet::seed(&point, order)?)
}

impl InducedChart {
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `T`: lift components `(h, v) = (a, b + G a)` of coordinate components `(a, b)`.
    pub fn lift_map(&self, p: &[f64], u: &[f64]) -> Matrix {
        let m = self.base.dim();
        let point: Vec<f64> = p.iter().chain(u).copied().collect();
        let mut t = Array2::eye(2 * m);
        for k in 0..m {
            for i in 0..m {
                t[[m + k, i]] = (0..m)
                    .map(|j| self.christoffel[k][i][j].eval_f64(&point) * u[j])
                    .sum();
            }
        }
        t
    }

    /// All oracle tensors at `(p, u)`.
    pub fn sample(&self, p: &[f64], u: &[f64]) -> Result<OracleSample> {
        let m = self.base.dim();
        let d = 2 * m;
        let point: Vec<f64> = p.iter().chain(u).copied().collect();
        let env = env_for(p, u, 2)?;
        let mut ev = JetEvaluator::new(&env)?;
        let g = eval_matrix_jets(self.chart.metric(), &env, &mut ev)?;
        let conn = Connection::from_metric_jets(&g, &point, false)?;
        let j_jets: Vec<Vec<Vec<Jet>>> = self
            .structures
            .iter()
            .map(|s| eval_matrix_jets(s, &env, &mut ev))
            .collect::<Result<_>>()?;
        let gamma_jets: Vec<Vec<Vec<Jet>>> = self
            .christoffel
            .iter()
            .map(|plane| eval_matrix_jets(plane, &env, &mut ev))
            .collect::<Result<_>>()?;

        let t = self.lift_map(p, u);
        let pm = linalg::inverse(&t).ok_or_else(|| Error::SingularMetric(point.clone()))?;
        let pt = pm.t().to_owned();
        let to_lift = |c: &Vector| LiftVector::from_slice(t.dot(c).as_slice().expect("contiguous"));

        // Basis fields E_A as coordinate-component jets.
        let fields: Vec<Vec<Jet>> = (0..d)
            .map(|a| {
                let mut comps: Vec<Jet> = (0..d).map(|_| env[0].constant_like(0.0)).collect();
                if a < m {
                    comps[a] = env[0].constant_like(1.0);
                    for c in 0..m {
                        let mut s = env[0].constant_like(0.0);
                        for j in 0..m {
                            s = &s - &(&gamma_jets[c][a][j] * &env[m + j]);
                        }
                        comps[m + c] = s;
                    }
                } else {
                    comps[a] = env[0].constant_like(1.0);
                }
                comps
            })
            .collect();
        let value = |f: &[Jet]| Array1::from_iter(f.iter().map(Jet::value));

        let brackets = (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| {
                        let (fa, fb) = (&fields[a], &fields[b]);
                        let c = Array1::from_shape_fn(d, |c| {
                            (0..d)
                                .map(|k| fa[k].value() * fb[c].d1(k) - fb[k].value() * fa[c].d1(k))
                                .sum()
                        });
                        to_lift(&c)
                    })
                    .collect()
            })
            .collect();
        let nabla = (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| {
                        let (va, vb) = (value(&fields[a]), value(&fields[b]));
                        let fb = &fields[b];
                        let c = Array1::from_shape_fn(d, |c| {
                            (0..d)
                                .map(|k| {
                                    let gamma: f64 =
                                        (0..d).map(|l| conn.gamma[[c, k, l]] * vb[l]).sum();
                                    va[k] * (fb[c].d1(k) + gamma)
                                })
                                .sum()
                        });
                        to_lift(&c)
                    })
                    .collect()
            })
            .collect();

        let to3 = |a: ArrayD<f64>| a.into_dimensionality::<Ix3>().expect("rank 3");
        let nijenhuis = [0, 1, 2].map(|k| {
            let n = nijenhuis_from_jets(&j_jets[k]).into_dyn();
            to3(transform(n, &[&t, &pt, &pt]))
        });
        let structure_tensors = [0, 1, 2].map(|k| {
            let nj = conn.nabla_structure(&j_jets[k]);
            let f = Array3::from_shape_fn((d, d, d), |(i, j, k)| {
                (0..d).map(|l| conn.g[[k, l]] * nj[[i, l, j]]).sum()
            });
            to3(transform(f.into_dyn(), &[&pt, &pt, &pt]))
        });
        let r_hat = transform(conn.riemann_up.clone().into_dyn(), &[&t, &pt, &pt, &pt])
            .into_dimensionality::<Ix4>()
            .expect("rank 4");
        let ricci_coord = conn.ricci();
        let ricci = pt.dot(&ricci_coord).dot(&pm);
        let g_hat = pt.dot(&conn.g).dot(&pm);
        Ok(OracleSample {
            g_hat,
            brackets,
            nabla,
            nijenhuis,
            structure_tensors,
            r_hat,
            ricci,
            scalar: conn.scalar_curvature(),
        })
    }
}

fn basis_lift(m: usize, a: usize) -> (Lift, Vector, LiftVector) {
    let kind = if a < m { Lift::H } else { Lift::V };
    let mut e = Vector::zeros(m);
    e[a % m] = 1.0;
    (kind, e.clone(), LiftVector::lift(kind, e))
}

fn label(m: usize, a: usize) -> String {
    format!("∂{}^{}", a % m + 1, if a < m { "H" } else { "V" })
}

fn compare_point(
    ic: &InducedChart,
    p: &[f64],
    u: &[f64],
    quantities: &BTreeSet<Quantity>,
) -> Result<(Vec<Deviation>, Unlisted, f64, f64, f64)> {
    let m = ic.base.dim();
    let d = 2 * m;
    let o = ic.sample(p, u)?;
    let geom = point_geometry(&ic.base, p)?;
    let base_ricci = linalg::max_abs(&geom.rho);
    let tbp = TangentBundlePoint::new(geom, Array1::from(u.to_vec()))?;
    let basis: Vec<_> = (0..d).map(|a| basis_lift(m, a)).collect();
    let at = || format!("p={p:?} u={u:?}");
    let mut devs = Vec::new();
    let mut unlisted = Unlisted::default();

    for &q in quantities {
        let mut dev = Deviation::new(q);
        match q {
            Quantity::GHat => {
                for a in 0..d {
                    for b in 0..d {
                        let closed = tbp.ghat(&basis[a].2, &basis[b].2);
                        dev.record(closed, o.g_hat[[a, b]], || {
                            format!("ĝ({}, {}) at {}", label(m, a), label(m, b), at())
                        });
                    }
                }
            }
            Quantity::Brackets | Quantity::NablaHat => {
                for a in 0..d {
                    for b in 0..d {
                        let (ka, ea, _) = &basis[a];
                        let (kb, eb, _) = &basis[b];
                        let (closed, oracle, sym) = if q == Quantity::Brackets {
                            (tbp.bracket_typed(*ka, ea, *kb, eb), &o.brackets[a][b], "[,]")
                        } else {
                            (tbp.nabla_typed(*ka, ea, *kb, eb), &o.nabla[a][b], "∇̂")
                        };
                        dev.record_vec(&closed, oracle, || {
                            format!("{sym}({}, {}) at {}", label(m, a), label(m, b), at())
                        });
                    }
                }
            }
            Quantity::NAlpha => {
                for (k, alpha) in Alpha::ALL.into_iter().enumerate() {
                    for a in 0..d {
                        for b in 0..d {
                            let closed = tbp.nijenhuis(alpha, &basis[a].2, &basis[b].2);
                            let oracle: Vec<f64> = (0..d).map(|l| o.nijenhuis[k][[l, a, b]]).collect();
                            dev.record_vec(&closed, &LiftVector::from_slice(&oracle), || {
                                format!("N{}({}, {}) at {}", k + 1, label(m, a), label(m, b), at())
                            });
                        }
                    }
                }
            }
            Quantity::FAlpha => {
                for (k, alpha) in Alpha::ALL.into_iter().enumerate() {
                    for a in 0..d {
                        for b in 0..d {
                            for c in 0..d {
                                let closed = tbp.f_lift(alpha, &basis[a].2, &basis[b].2, &basis[c].2);
                                dev.record(closed, o.structure_tensors[k][[a, b, c]], || {
                                    format!(
                                        "F{}({}, {}, {}) at {}",
                                        k + 1,
                                        label(m, a),
                                        label(m, b),
                                        label(m, c),
                                        at()
                                    )
                                });
                            }
                        }
                    }
                }
            }
            Quantity::RHat => {
                for a in 0..d {
                    for b in 0..d {
                        for c in 0..d {
                            let oracle: Vec<f64> = (0..d).map(|l| o.r_hat[[l, a, b, c]]).collect();
                            let oracle = LiftVector::from_slice(&oracle);
                            let verticals = [a, b, c].iter().filter(|&&x| x >= m).count();
                            if verticals >= 2 {
                                unlisted.r_hat = unlisted.r_hat.max(oracle.max_abs());
                                continue;
                            }
                            let (ka, ea, _) = &basis[a];
                            let (kb, eb, _) = &basis[b];
                            let (kc, ec, _) = &basis[c];
                            let closed = tbp.curvature_typed(*ka, ea, *kb, eb, *kc, ec);
                            dev.record_vec(&closed, &oracle, || {
                                format!(
                                    "R̂({}, {}){} at {}",
                                    label(m, a),
                                    label(m, b),
                                    label(m, c),
                                    at()
                                )
                            });
                        }
                    }
                }
            }
            Quantity::RicciHat => {
                for a in 0..d {
                    for b in 0..d {
                        if a >= m || b >= m {
                            unlisted.ricci_hat = unlisted.ricci_hat.max(o.ricci[[a, b]].abs());
                            continue;
                        }
                        let closed = tbp.ricci_hat(&basis[a].2, &basis[b].2);
                        dev.record(closed, o.ricci[[a, b]], || {
                            format!("ρ̂({}, {}) at {}", label(m, a), label(m, b), at())
                        });
                    }
                }
            }
            Quantity::ScalarHat => {
                dev.record(tbp.scalar_hat(), o.scalar, || format!("τ̂ at {}", at()));
            }
            Quantity::EinsteinCheck => {}
        }
        if q != Quantity::EinsteinCheck {
            devs.push(dev);
        }
    }
    let einstein = linalg::max_abs(&(&o.ricci - &(&o.g_hat * (o.scalar / d as f64))));
    Ok((devs, unlisted, o.scalar.abs(), einstein, base_ricci))
}

/// Compares closed forms and oracle over `points`, in parallel per point.
/// Points where evaluation fails (outside the chart domain) are skipped
/// and listed in the report.
pub fn oracle_compare(
    ic: &InducedChart,
    points: &[SamplePoint],
    quantities: &BTreeSet<Quantity>,
) -> OracleReport {
    let results: Vec<_> = points
        .par_iter()
        .map(|s| (s, compare_point(ic, &s.p, &s.u, quantities)))
        .collect();
    let mut deviations: Vec<Deviation> = quantities
        .iter()
        .filter(|&&q| q != Quantity::EinsteinCheck)
        .map(|&q| Deviation::new(q))
        .collect();
    let mut report = OracleReport {
        base: ic.base.name().to_string(),
        points: Vec::new(),
        skipped: Vec::new(),
        deviations: Vec::new(),
        unlisted: Unlisted::default(),
        scalar_max: 0.0,
        einstein_max: 0.0,
        base_ricci_max: 0.0,
    };
    for (s, r) in results {
        match r {
            Ok((devs, unl, scalar, einstein, base_ricci)) => {
                for (acc, d) in deviations.iter_mut().zip(&devs) {
                    acc.merge(d);
                }
                report.unlisted.r_hat = report.unlisted.r_hat.max(unl.r_hat);
                report.unlisted.ricci_hat = report.unlisted.ricci_hat.max(unl.ricci_hat);
                report.scalar_max = report.scalar_max.max(scalar);
                report.einstein_max = report.einstein_max.max(einstein);
                report.base_ricci_max = report.base_ricci_max.max(base_ricci);
                report.points.push(s.clone());
            }
            Err(e) => report
                .skipped
                .push(format!("skipped p={:?} u={:?}: {e}", s.p, s.u)),
        }
    }
    report.deviations = deviations;
    report
}

/// `count` points with `p` drawn from `[-1, 1]^m` (or the origin when
/// `origin_only`) and `u` from `[-1, 1]^m` outside the ball of radius 0.1.
pub fn random_points(m: usize, count: usize, rng: &mut impl Rng, origin_only: bool) -> Vec<SamplePoint> {
    (0..count)
        .map(|_| {
            let p = if origin_only {
                vec![0.0; m]
            } else {
                (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect()
            };
            let u = loop {
                let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                if u.iter().map(|c| c * c).sum::<f64>() > 0.01 {
                    break u;
                }
            };
            SamplePoint { p, u }
        })
        .collect()
}
