//! Curvature-like tensors `π₁, π₂, π₃`, sectional curvatures, 2-plane types
//! and the sectional-curvature table of `TM` over the adapted H-basis.

use ndarray::{Array2, Array4};
use rayon::prelude::*;
use serde::Serialize;

use crate::base::geometry::contract4;
use crate::base::HSphereParams;
use crate::lift::{LiftVector, TangentBundlePoint};
use crate::linalg::{self, Matrix, Vector};
use crate::{Error, Result};

/// Below this `|π₁(x, y, y, x)|` a plane is null.
pub const NULL_PLANE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiKind {
    One,
    Two,
    Three,
}

/// `π(x, y, z, w)` for the metric `g` and associated metric `g̃`.
#[allow(clippy::too_many_arguments)]
pub fn pi_tensor(kind: PiKind, g: &Matrix, gt: &Matrix, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> f64 {
    let b = |m: &Matrix, a: &Vector, c: &Vector| a.dot(&m.dot(c));
    match kind {
        PiKind::One => b(g, y, z) * b(g, x, w) - b(g, x, z) * b(g, y, w),
        PiKind::Two => b(gt, y, z) * b(gt, x, w) - b(gt, x, z) * b(gt, y, w),
        PiKind::Three => {
            -b(g, y, z) * b(gt, x, w) + b(g, x, z) * b(gt, y, w) - b(gt, y, z) * b(g, x, w)
                + b(gt, x, z) * b(g, y, w)
        }
    }
}

/// `π(∂i, ∂j, ∂k, ∂l)` as an array.
pub fn pi_array(kind: PiKind, g: &Matrix, gt: &Matrix) -> Array4<f64> {
    let d = g.nrows();
    Array4::from_shape_fn((d, d, d, d), |(x, y, z, w)| match kind {
        PiKind::One => g[[y, z]] * g[[x, w]] - g[[x, z]] * g[[y, w]],
        PiKind::Two => gt[[y, z]] * gt[[x, w]] - gt[[x, z]] * gt[[y, w]],
        PiKind::Three => {
            -g[[y, z]] * gt[[x, w]] + g[[x, z]] * gt[[y, w]] - gt[[y, z]] * g[[x, w]]
                + gt[[x, z]] * g[[y, w]]
        }
    })
}

fn plane_norm(g: &Matrix, x: &Vector, y: &Vector) -> Result<f64> {
    let pi = y.dot(&g.dot(y)) * x.dot(&g.dot(x)) - x.dot(&g.dot(y)).powi(2);
    if pi.abs() < NULL_PLANE_TOL {
        return Err(Error::NullPlane(pi));
    }
    Ok(pi)
}

/// `k(x, y) = R(x, y, y, x) / π₁(x, y, y, x)`.
pub fn sectional_curvature(r: &Array4<f64>, g: &Matrix, x: &Vector, y: &Vector) -> Result<f64> {
    let pi = plane_norm(g, x, y)?;
    Ok(contract4(r, x, y, y, x) / pi)
}

/// `k*(x, y) = R(x, y, y, Jx) / π₁(x, y, y, x)`.
pub fn sectional_curvature_star(
    r: &Array4<f64>,
    g: &Matrix,
    j: &Matrix,
    x: &Vector,
    y: &Vector,
) -> Result<f64> {
    let pi = plane_norm(g, x, y)?;
    Ok(contract4(r, x, y, y, &j.dot(x)) / pi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneType {
    Holomorphic,
    TotallyReal,
    Generic,
}

/// Holomorphic iff `span{Jx, Jy} = span{x, y}` (rank test at 1e-9), totally
/// real iff `g(a, Jb) = 0` for all basis pairs and not holomorphic.
pub fn classify_plane(x: &Vector, y: &Vector, j: &Matrix, g: &Matrix) -> PlaneType {
    let (jx, jy) = (j.dot(x), j.dot(y));
    let d = x.len();
    let m = Array2::from_shape_fn((d, 4), |(r, c)| [x[r], y[r], jx[r], jy[r]][c]);
    let sv = linalg::singular_values(&m);
    let rank = sv.iter().filter(|&&s| s > 1e-9 * sv[0]).count();
    if rank <= 2 {
        return PlaneType::Holomorphic;
    }
    let scale = (x.dot(x) * y.dot(y)).sqrt().max(f64::MIN_POSITIVE);
    let orth = [(x, &jx), (x, &jy), (y, &jx), (y, &jy)]
        .iter()
        .all(|(a, b)| a.dot(&g.dot(*b)).abs() <= 1e-9 * scale);
    if orth {
        PlaneType::TotallyReal
    } else {
        PlaneType::Generic
    }
}

/// Frame vector of the adapted H-basis: `ξ`/`η`, index, barred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrameIndex {
    pub eta: bool,
    pub i: usize,
    pub bar: bool,
}

impl FrameIndex {
    fn label(self) -> String {
        format!(
            "{}{}{}",
            if self.eta { "η" } else { "ξ" },
            self.i + 1,
            if self.bar { "̄" } else { "" }
        )
    }

    fn position(self, n: usize) -> usize {
        (self.eta as usize) * 2 * n + (self.bar as usize) * n + self.i
    }
}

/// Position of a basic plane in the inventory of special planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneClass {
    /// `J_α`-totally-real for `α = 1, 2, 3`.
    TotallyReal,
    /// `J_α`-holomorphic for the stored `α`, totally real for the others.
    Holomorphic(u8),
}

impl PlaneClass {
    pub fn tags(self) -> String {
        match self {
            PlaneClass::TotallyReal => "J1-totally-real;J2-totally-real;J3-totally-real".into(),
            PlaneClass::Holomorphic(a) => {
                let others: Vec<String> = (1..=3u8)
                    .filter(|&b| b != a)
                    .map(|b| format!("J{b}-totally-real"))
                    .collect();
                format!("J{a}-holomorphic;{}", others.join(";"))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub plane: String,
    pub first: FrameIndex,
    pub second: FrameIndex,
    pub class: PlaneClass,
    pub tags: String,
    /// `None` for null planes.
    pub k_hat: Option<f64>,
    pub expected: Option<f64>,
    pub abs_diff: Option<f64>,
}

/// Sectional curvatures of the base special planes `{e_a, e_b}` in a J-basis.
#[derive(Debug, Clone, Serialize)]
pub struct BasePlaneRow {
    pub plane: String,
    pub kind: PlaneType,
    pub k: Option<f64>,
    pub k_star: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionalTable {
    pub n: usize,
    pub hsphere: Option<HSphereParams>,
    pub rows: Vec<TableRow>,
    pub base_rows: Vec<BasePlaneRow>,
}

const XI: fn(usize, bool) -> FrameIndex = |i, bar| FrameIndex { eta: false, i, bar };
const ETA: fn(usize, bool) -> FrameIndex = |i, bar| FrameIndex { eta: true, i, bar };

/// The basic special 2-planes of `T_u(TM)`: ten totally real families for
/// `i ≠ j` and six holomorphic ones for each `i`.
pub fn basic_planes(n: usize) -> Vec<(FrameIndex, FrameIndex, PlaneClass)> {
    let mut out = Vec::new();
    let tr = PlaneClass::TotallyReal;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if i < j {
                out.push((XI(i, false), XI(j, false), tr));
                out.push((XI(i, true), XI(j, true), tr));
                out.push((ETA(i, false), ETA(j, false), tr));
                out.push((ETA(i, true), ETA(j, true), tr));
            }
            out.push((XI(i, false), XI(j, true), tr));
            out.push((XI(i, false), ETA(j, false), tr));
            out.push((XI(i, false), ETA(j, true), tr));
            out.push((XI(i, true), ETA(j, false), tr));
            out.push((XI(i, true), ETA(j, true), tr));
            out.push((ETA(i, false), ETA(j, true), tr));
        }
    }
    for i in 0..n {
        out.push((XI(i, true), ETA(i, false), PlaneClass::Holomorphic(1)));
        out.push((ETA(i, true), XI(i, false), PlaneClass::Holomorphic(1)));
        out.push((ETA(i, false), XI(i, false), PlaneClass::Holomorphic(2)));
        out.push((ETA(i, true), XI(i, true), PlaneClass::Holomorphic(2)));
        out.push((XI(i, false), XI(i, true), PlaneClass::Holomorphic(3)));
        out.push((ETA(i, true), ETA(i, false), PlaneClass::Holomorphic(3)));
    }
    out
}

/// Closed value on the h-sphere: `ν` on `ξξ` planes, `-ν` on `ηη` planes,
/// `0` on mixed and holomorphic planes.
fn hsphere_expected(a: FrameIndex, b: FrameIndex, class: PlaneClass, nu: f64) -> f64 {
    match class {
        PlaneClass::Holomorphic(_) => 0.0,
        PlaneClass::TotallyReal => match (a.eta, b.eta) {
            (false, false) => nu,
            (true, true) => -nu,
            _ => 0.0,
        },
    }
}

/// `k̂` for every basic plane, plus the base special planes.
pub fn tm_sectional_table(tbp: &TangentBundlePoint, hsphere: Option<HSphereParams>) -> Result<SectionalTable> {
    let frame = tbp.adapted_frame()?;
    let n = frame.n;
    let vec_of = |f: FrameIndex| -> &LiftVector { &frame.vectors[f.position(n)] };
    let rows = basic_planes(n)
        .into_par_iter()
        .map(|(a, b, class)| {
            let k_hat = tbp.sectional_hat(vec_of(a), vec_of(b), NULL_PLANE_TOL).ok();
            let expected = hsphere.map(|h| hsphere_expected(a, b, class, h.nu));
            let abs_diff = match (k_hat, expected) {
                (Some(k), Some(e)) => Some((k - e).abs()),
                _ => None,
            };
            TableRow {
                plane: format!("{{{},{}}}", a.label(), b.label()),
                first: a,
                second: b,
                class,
                tags: class.tags(),
                k_hat,
                expected,
                abs_diff,
            }
        })
        .collect();

    let geom = &tbp.geom;
    let e = &frame.base;
    let label = |k: usize| {
        if k < n {
            format!("e{}", k + 1)
        } else {
            format!("e{}̄", k - n + 1)
        }
    };
    let mut base_rows = Vec::new();
    for a in 0..2 * n {
        for b in (a + 1)..2 * n {
            let (x, y) = (&e[a], &e[b]);
            base_rows.push(BasePlaneRow {
                plane: format!("{{{},{}}}", label(a), label(b)),
                kind: classify_plane(x, y, &geom.structure, &geom.g),
                k: sectional_curvature(&geom.riemann, &geom.g, x, y).ok(),
                k_star: sectional_curvature_star(&geom.riemann, &geom.g, &geom.structure, x, y).ok(),
            });
        }
    }
    Ok(SectionalTable {
        n,
        hsphere,
        rows,
        base_rows,
    })
}

impl SectionalTable {
    pub fn row(&self, a: FrameIndex, b: FrameIndex) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.first == a && r.second == b)
    }

    pub fn k_hat(&self, a: FrameIndex, b: FrameIndex) -> Option<f64> {
        self.row(a, b).and_then(|r| r.k_hat)
    }

    /// Largest `|k̂ - expected|` over non-null rows with an expected value.
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().filter_map(|r| r.abs_diff).fold(0.0, f64::max)
    }

    pub fn null_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.k_hat.is_none()).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("table serializes")
    }

    /// CSV with columns `plane, tags, k_hat, expected, abs_diff`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["plane", "tags", "k_hat", "expected", "abs_diff"])
            .expect("in-memory write");
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.15e}")).unwrap_or_else(|| "null".into());
        for r in &self.rows {
            w.write_record([
                r.plane.clone(),
                r.tags.clone(),
                fmt(r.k_hat),
                r.expected.map(|x| format!("{x:.15e}")).unwrap_or_default(),
                r.abs_diff.map(|x| format!("{x:.3e}")).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Markdown grouped like the plane inventory: totally real planes, then
    /// the holomorphic ones per structure.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        if let Some(h) = self.hsphere {
            s.push_str(&format!(
                "h-sphere n = {}, a = {}, b = {}: ν = {}, ν* = {}\n\n",
                h.n, h.a, h.b, h.nu, h.nu_star
            ));
        }
        let groups: [(&str, fn(PlaneClass) -> bool); 4] = [
            ("J_α-totally-real 2-planes (α = 1, 2, 3)", |c| c == PlaneClass::TotallyReal),
            ("J1-holomorphic, J2/J3-totally-real", |c| c == PlaneClass::Holomorphic(1)),
            ("J2-holomorphic, J1/J3-totally-real", |c| c == PlaneClass::Holomorphic(2)),
            ("J3-holomorphic, J1/J2-totally-real", |c| c == PlaneClass::Holomorphic(3)),
        ];
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_else(|| "null".into());
        for (title, pick) in groups {
            s.push_str(&format!("### {title}\n\n| plane | k̂ | expected | abs diff |\n|---|---|---|---|\n"));
            for r in self.rows.iter().filter(|r| pick(r.class)) {
                s.push_str(&format!(
                    "| {} | {} | {} | {} |\n",
                    r.plane,
                    fmt(r.k_hat),
                    r.expected.map(|x| format!("{x:.12}")).unwrap_or_else(|| "-".into()),
                    r.abs_diff.map(|x| format!("{x:.1e}")).unwrap_or_else(|| "-".into()),
                ));
            }
            s.push('\n');
        }
        s.push_str("### Base special planes\n\n| plane | type | k | k* |\n|---|---|---|---|\n");
        for r in &self.base_rows {
            s.push_str(&format!(
                "| {} | {:?} | {} | {} |\n",
                r.plane,
                r.kind,
                fmt(r.k),
                fmt(r.k_star)
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{PointwiseModel, ChartManifold, point_geometry};
    use crate::base::pointwise::standard_norden;
    use ndarray::{array, Array1};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(k: usize) -> Vector {
        let mut v = Array1::zeros(4);
        v[k] = 1.0;
        v
    }

    #[test]
    fn pi_tensor_examples() {
        let (g, j) = standard_norden(2);
        let gt = g.dot(&j);
        assert_eq!(pi_tensor(PiKind::One, &g, &gt, &e(0), &e(1), &e(1), &e(0)), 1.0);
        assert_eq!(pi_tensor(PiKind::Two, &g, &gt, &e(0), &e(1), &e(1), &e(0)), 0.0);
        let x = array![0.3, -1.0, 2.0, 0.5];
        let (z, w) = (array![1.0, 2.0, 3.0, 4.0], array![-1.0, 0.5, 0.0, 2.0]);
        assert_eq!(pi_tensor(PiKind::One, &g, &gt, &x, &x, &z, &w), 0.0);
        let arr = pi_array(PiKind::Three, &g, &gt);
        let direct = pi_tensor(PiKind::Three, &g, &gt, &x, &z, &w, &e(2));
        assert!((contract4(&arr, &x, &z, &w, &e(2)) - direct).abs() < 1e-12);
    }

    #[test]
    fn hsphere_base_sectional_curvatures() {
        let m = PointwiseModel::hsphere(2, 1.0, 0.0).unwrap();
        let (g, j) = (&m.g, &m.structure);
        assert!((sectional_curvature(&m.riemann, g, &e(0), &e(1)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(sectional_curvature(&m.riemann, g, &e(0), &e(2)).unwrap(), 0.0);
        let m = PointwiseModel::hsphere(2, 3.0, 4.0).unwrap();
        let k = sectional_curvature(&m.riemann, g, &e(0), &e(1)).unwrap();
        let ks = sectional_curvature_star(&m.riemann, g, j, &e(0), &e(1)).unwrap();
        assert!((k - 0.12).abs() < 1e-15);
        assert!((ks + 0.16).abs() < 1e-15);
        let null = array![1.0, 0.0, 1.0, 0.0];
        assert!(matches!(
            sectional_curvature(&m.riemann, g, &null, &array![0.0, 1.0, 0.0, 1.0]),
            Err(Error::NullPlane(_))
        ));
    }

    #[test]
    fn sectional_curvature_is_basis_independent() {
        let m = ChartManifold::builtin("twisted-norden-4").unwrap().unwrap();
        let geom = point_geometry(&m, &[0.1, 0.2, -0.3, 0.4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = Array1::from_shape_fn(4, |_| rng.gen_range(-1.0..1.0));
            let y = Array1::from_shape_fn(4, |_| rng.gen_range(-1.0..1.0));
            let Ok(k) = sectional_curvature(&geom.riemann, &geom.g, &x, &y) else { continue };
            let (a, b, c, d): (f64, f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen(), rng.gen());
            if (a * d - b * c).abs() < 0.1 {
                continue;
            }
            let (x2, y2) = (&x * a + &y * b, &x * c + &y * d);
            let k2 = sectional_curvature(&geom.riemann, &geom.g, &x2, &y2).unwrap();
            assert!((k - k2).abs() <= 1e-9 * k.abs().max(1.0));
        }
    }

    #[test]
    fn plane_types() {
        let (g, j) = standard_norden(2);
        assert_eq!(classify_plane(&e(0), &e(2), &j, &g), PlaneType::Holomorphic);
        assert_eq!(classify_plane(&e(0), &e(1), &j, &g), PlaneType::TotallyReal);
        let y = (&e(1) + &e(2)) / 2f64.sqrt();
        assert_eq!(classify_plane(&e(0), &y, &j, &g), PlaneType::Generic);
    }

    #[test]
    fn hsphere_tm_table() {
        let model = PointwiseModel::hsphere(2, 3.0, 4.0).unwrap();
        let params = model.hsphere_params();
        let t = TangentBundlePoint::new(model.geometry().unwrap(), array![0.3, 0.1, -0.4, 0.2]).unwrap();
        let table = tm_sectional_table(&t, params).unwrap();
        assert_eq!(table.null_rows(), 0);
        assert!(table.max_deviation() < 1e-12);
        let k = table.k_hat(XI(0, false), XI(1, false)).unwrap();
        assert!((k - 0.12).abs() < 1e-12);
        let csv = table.to_csv();
        assert!(csv.starts_with("plane,tags,k_hat,expected,abs_diff"));
        assert!(table.to_markdown().contains("J2-holomorphic"));
    }
}
