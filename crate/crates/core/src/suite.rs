//! The verification suite: every check on one base, each reported with its
//! worst violation.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::base::{point_geometry, validate_structure, ChartManifold, PointGeometry, PointwiseModel};
use crate::lift::{classify, Alpha, ClassificationReport, LiftVector, TangentBundlePoint};
use crate::linalg::{self, Vector};
use crate::oracle::{build_tm_chart, oracle_compare, random_points, Quantity, SamplePoint};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 20;
/// Overrides below this are rejected.
pub const MIN_TOLERANCE: f64 = 1e-14;
/// Random lifted argument sets per sampled point.
const ARGS_PER_POINT: usize = 5;

/// A base given by a chart or by tensors at one point.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Target {
    Chart(ChartManifold),
    Pointwise(PointwiseModel),
}

impl Target {
    pub fn name(&self) -> String {
        match self {
            Target::Chart(c) => c.name().to_string(),
            Target::Pointwise(m) => match m.hsphere_params() {
                Some(h) => format!("hsphere(n={}, a={}, b={})", h.n, h.a, h.b),
                None => format!("pointwise-{}", m.dim()),
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Target::Chart(c) => c.dim(),
            Target::Pointwise(m) => m.dim(),
        }
    }

    /// The chart the oracle and structure validation run on. Pointwise
    /// models use their normal chart, which is exact at the origin only.
    pub fn chart(&self) -> Result<ChartManifold> {
        match self {
            Target::Chart(c) => Ok(c.clone()),
            Target::Pointwise(m) => m.normal_chart(),
        }
    }

    fn origin_only(&self) -> bool {
        matches!(self, Target::Pointwise(_))
    }

    pub fn geometry(&self, p: &[f64]) -> Result<PointGeometry> {
        match self {
            Target::Chart(c) => point_geometry(c, p),
            Target::Pointwise(m) => m.geometry(),
        }
    }

    /// Base points used when the caller supplies only `u`.
    pub fn base_points(&self) -> Vec<Vec<f64>> {
        match self {
            Target::Chart(c) => c.samples().to_vec(),
            Target::Pointwise(m) => vec![vec![0.0; m.dim()]],
        }
    }
}

/// Per-check tolerances, keyed by check family.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let pairs = [
            ("structure", 1e-10),
            ("hypercomplex", 1e-12),
            ("oracle", 1e-7),
            ("f_relation", 1e-9),
            ("lee", 1e-8),
            ("scalar_flat", 1e-7),
            ("classify", 1e-10),
            ("table", 1e-12),
        ];
        Tolerances(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.0.contains_key(name) {
            let known: Vec<_> = self.names().collect();
            return Err(Error::InvalidParameter(format!(
                "unknown tolerance {name:?} (known: {})",
                known.join(", ")
            )));
        }
        if !value.is_finite() || value < MIN_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "tolerance {name}={value} must be a finite number >= {MIN_TOLERANCE:e}"
            )));
        }
        self.0.insert(name.to_string(), value);
        Ok(())
    }

    /// Applies one `name=value` override.
    pub fn apply(&mut self, spec: &str) -> Result<()> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected name=value, got {spec:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad tolerance value in {spec:?}")))?;
        self.set(name.trim(), value)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub quantities: BTreeSet<Quantity>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            tolerances: Tolerances::default(),
            quantities: Quantity::ALL.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: impl Into<String>, max_violation: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            passed: max_violation <= tolerance,
            max_violation,
            tolerance,
            detail: None,
        }
    }

    fn failed(name: impl Into<String>, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            max_violation: f64::INFINITY,
            tolerance,
            detail: Some(detail),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub manifold: String,
    pub dim: usize,
    pub seed: u64,
    pub samples: Vec<SamplePoint>,
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn random_lift(rng: &mut ChaCha8Rng, d: usize) -> LiftVector {
    let mut v = || Vector::from_shape_fn(d, |_| rng.gen_range(-1.0..=1.0));
    LiftVector::new(v(), v())
}

/// Worst violations of the closed-form checks.
#[derive(Default, Clone, Copy)]
struct ClosedMaxima {
    square: f64,
    product: f64,
    compat: f64,
    f_relation: f64,
    lee: f64,
}

impl ClosedMaxima {
    fn max(self, o: ClosedMaxima) -> ClosedMaxima {
        ClosedMaxima {
            square: self.square.max(o.square),
            product: self.product.max(o.product),
            compat: self.compat.max(o.compat),
            f_relation: self.f_relation.max(o.f_relation),
            lee: self.lee.max(o.lee),
        }
    }
}

fn rel(d: f64, reference: f64) -> f64 {
    d.abs() / reference.abs().max(1.0)
}

/// Hypercomplex algebra, `ĝ` compatibilities, the `F` relation and the Lee
/// frame trace at one point over `args`.
fn closed_checks(t: &TangentBundlePoint, args: &[[LiftVector; 3]]) -> (ClosedMaxima, Result<f64>) {
    let mut m = ClosedMaxima::default();
    let frame = t.adapted_frame();
    let j = |a: Alpha, w: &LiftVector| t.apply_j(a, w);
    for [w, w2, w3] in args {
        for a in Alpha::ALL {
            m.square = m.square.max(j(a, &j(a, w)).add(w).max_abs());
        }
        let j3 = j(Alpha::Three, w);
        m.product = m
            .product
            .max(j(Alpha::One, &j(Alpha::Two, w)).sub(&j3).max_abs())
            .max(j(Alpha::Two, &j(Alpha::One, w)).add(&j3).max_abs());
        let base = t.ghat(w, w2);
        for (a, sign) in [(Alpha::One, 1.0), (Alpha::Two, -1.0), (Alpha::Three, -1.0)] {
            let lifted = t.ghat(&j(a, w), &j(a, w2));
            m.compat = m.compat.max(rel(lifted - sign * base, base));
        }
        let f1 = t.f_lift(Alpha::One, w, w2, w3);
        let rhs = t.f_lift(Alpha::Two, w, &j(Alpha::Three, w2), w3)
            + t.f_lift(Alpha::Three, w, w2, &j(Alpha::Two, w3));
        m.f_relation = m.f_relation.max(rel(f1 - rhs, f1));
        if let Ok(frame) = &frame {
            for a in Alpha::ALL {
                let closed = t.lee_form(a, w);
                m.lee = m.lee.max(rel(closed - t.lee_frame_trace_in(frame, a, w), closed));
            }
        }
    }
    (m, frame.map(|_| m.lee))
}

/// Largest `|θ|`, `|ρ|`, `|ρ*|` of the base.
fn base_lee_data(g: &PointGeometry) -> [f64; 3] {
    let theta = g.theta.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    [theta, linalg::max_abs(&g.rho), linalg::max_abs(&g.rho_star)]
}

/// Runs the suite. Numerical failures become failed checks; only setup
/// errors (bad configuration) are returned as `Err`.
pub fn run_verify(target: &Target, cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is required".into()));
    }
    let tol = &cfg.tolerances;
    let m = target.dim();
    let chart = target.chart()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples = random_points(m, cfg.samples, &mut rng, target.origin_only());
    let args: Vec<Vec<[LiftVector; 3]>> = samples
        .iter()
        .map(|_| {
            (0..ARGS_PER_POINT)
                .map(|_| [(); 3].map(|_| random_lift(&mut rng, m)))
                .collect()
        })
        .collect();
    let mut checks = Vec::new();
    let mut warnings = Vec::new();

    let base_points: Vec<Vec<f64>> = samples.iter().map(|s| s.p.clone()).collect();
    let structure = validate_structure(&chart, &base_points, tol.get("structure"));
    for name in ["symmetric", "nondegenerate", "signature", "j_squared", "norden"] {
        let v = structure.max_violation(name);
        let mut c = CheckResult::new(format!("structure.{name}"), v, tol.get("structure"));
        c.passed = structure.invariant_passed(name);
        checks.push(c);
    }

    let (oracle, closed) = rayon::join(
        || {
            build_tm_chart(&chart).map(|ic| oracle_compare(&ic, &samples, &cfg.quantities))
        },
        || {
            samples
                .par_iter()
                .zip(&args)
                .map(|(s, a)| {
                    let geom = target.geometry(&s.p)?;
                    let lee = base_lee_data(&geom);
                    let t = TangentBundlePoint::new(geom, Vector::from(s.u.clone()))?;
                    let (mx, frame) = closed_checks(&t, a);
                    Ok((mx, frame, lee, t))
                })
                .collect::<Vec<Result<_>>>()
        },
    );

    let mut maxima = ClosedMaxima::default();
    let mut lee_base = [0.0f64; 3];
    let mut points = Vec::new();
    let mut closed_errors = Vec::new();
    let mut frame_errors = Vec::new();
    for (s, r) in samples.iter().zip(closed) {
        match r {
            Ok((mx, frame, lee, t)) => {
                maxima = maxima.max(mx);
                if let Err(e) = frame {
                    frame_errors.push(format!("p={:?} u={:?}: {e}", s.p, s.u));
                }
                for k in 0..3 {
                    lee_base[k] = lee_base[k].max(lee[k]);
                }
                points.push(t);
            }
            Err(e) => closed_errors.push(format!("p={:?} u={:?}: {e}", s.p, s.u)),
        }
    }
    let closed_ok = closed_errors.is_empty();
    let closed_check = |name: &str, v: f64, family: &str| {
        if closed_ok {
            CheckResult::new(name, v, tol.get(family))
        } else {
            CheckResult::failed(name, tol.get(family), closed_errors.join("; "))
        }
    };
    checks.push(closed_check("hypercomplex.squares", maxima.square, "hypercomplex"));
    checks.push(closed_check("hypercomplex.products", maxima.product, "hypercomplex"));
    checks.push(closed_check("hypercomplex.metric_compatibility", maxima.compat, "hypercomplex"));
    checks.push(closed_check("f_relation", maxima.f_relation, "f_relation"));
    let mut lee_check = closed_check("lee.frame_trace", maxima.lee, "lee");
    if closed_ok && !frame_errors.is_empty() {
        lee_check = CheckResult::failed("lee.frame_trace", tol.get("lee"), frame_errors.join("; "));
    }
    checks.push(lee_check);

    if closed_ok {
        let ctol = tol.get("classify");
        let report = classify(&points, ctol);
        let lee = report.flags.lee.map(|f| f.vanishes);
        let [theta, rho, rho_star] = lee_base.map(|v| v <= ctol);
        let expected = [theta, rho, theta && rho_star];
        let mismatches: Vec<String> = (0..3)
            .filter(|&k| lee[k] != expected[k])
            .map(|k| format!("theta{} vanishes: {}, base condition: {}", k + 1, lee[k], expected[k]))
            .collect();
        let mut c = CheckResult::new("lee.equivalences", mismatches.len() as f64, 0.0);
        if !mismatches.is_empty() {
            c = c.with_detail(mismatches.join("; "));
        }
        checks.push(c);
    } else {
        checks.push(CheckResult::failed("lee.equivalences", 0.0, closed_errors.join("; ")));
    }

    let otol = tol.get("oracle");
    match oracle {
        Ok(report) => {
            warnings.extend(report.skipped.iter().cloned());
            if report.points.is_empty() {
                checks.push(CheckResult::failed(
                    "oracle",
                    otol,
                    "no sample point could be evaluated".into(),
                ));
            } else {
                for d in &report.deviations {
                    let mut c = CheckResult::new(format!("oracle.{}", d.quantity), d.max_rel, otol);
                    if !d.worst.is_empty() {
                        c = c.with_detail(format!("{} comparisons, worst at {}", d.comparisons, d.worst));
                    }
                    checks.push(c);
                }
                if cfg.quantities.contains(&Quantity::EinsteinCheck) {
                    let mut c = CheckResult::new("oracle.einstein_check", report.einstein_max, otol);
                    c.passed = report.einstein_consistent(otol);
                    checks.push(c.with_detail(format!(
                        "Einstein deviation {:e}, base Ricci {:e}; Einstein iff base Ricci-flat",
                        report.einstein_max, report.base_ricci_max
                    )));
                }
                checks.push(CheckResult::new("scalar_flat", report.scalar_max, tol.get("scalar_flat")));
                if report.unlisted.r_hat > 0.0 || report.unlisted.ricci_hat > 0.0 {
                    warnings.push(format!(
                        "unasserted oracle components: R_hat with two vertical arguments up to {:e}, ricci_hat with a vertical argument up to {:e}",
                        report.unlisted.r_hat, report.unlisted.ricci_hat
                    ));
                }
            }
        }
        Err(e) => checks.push(CheckResult::failed("oracle", otol, e.to_string())),
    }

    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        manifold: target.name(),
        dim: m,
        seed: cfg.seed,
        samples,
        checks,
        warnings,
        passed,
    })
}

/// Classification flags at `u` over the target's base points.
pub fn classify_target(target: &Target, u: &[f64], tol: f64) -> Result<ClassificationReport> {
    if u.len() != target.dim() {
        return Err(Error::InvalidParameter(format!(
            "--u has {} components, base dimension is {}",
            u.len(),
            target.dim()
        )));
    }
    let points = target
        .base_points()
        .iter()
        .map(|p| TangentBundlePoint::new(target.geometry(p)?, Vector::from(u.to_vec())))
        .collect::<Result<Vec<_>>>()?;
    Ok(classify(&points, tol))
}
