//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines always print; exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use ndarray::{concatenate, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hnlift::base::{ChartManifold, PointGeometry, PointwiseModel};
use hnlift::expr::evaluate;
use hnlift::hsphere::{sectional_curvature, tm_sectional_table, FrameIndex, PlaneClass};
use hnlift::jet::Jet;
use hnlift::lift::{classify, j_basis, Alpha, Lift, LiftVector, TangentBundlePoint};
use hnlift::linalg::{self, Matrix, Vector};
use hnlift::oracle::{build_tm_chart, oracle_compare, random_points, Quantity};
use hnlift::suite::Target;

const SEED: u64 = 42;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn chart(name: &str) -> Target {
    Target::Chart(ChartManifold::builtin(name).unwrap().unwrap())
}

fn hsphere(n: usize, a: f64, b: f64) -> Target {
    Target::Pointwise(PointwiseModel::hsphere(n, a, b).unwrap())
}

fn test_bases() -> Vec<Target> {
    vec![
        chart("flat-norden-4"),
        chart("flat-norden-8"),
        chart("conformal-norden-4"),
        chart("twisted-norden-4"),
        hsphere(2, 3.0, 4.0),
        hsphere(2, 1.0, 0.0),
        hsphere(3, 0.5, -2.0),
    ]
}

fn rel(d: f64, reference: f64) -> f64 {
    d.abs() / reference.abs().max(1.0)
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

/// `(p, u)` samples and the lifted points built on them.
fn lifted_points(t: &Target, count: usize, rng: &mut ChaCha8Rng) -> Vec<TangentBundlePoint> {
    let origin = matches!(t, Target::Pointwise(_));
    random_points(t.dim(), count, rng, origin)
        .into_iter()
        .map(|s| TangentBundlePoint::new(t.geometry(&s.p).unwrap(), Vector::from(s.u)).unwrap())
        .collect()
}

fn random_lift(rng: &mut ChaCha8Rng, d: usize) -> LiftVector {
    let mut v = || Vector::from_shape_fn(d, |_| rng.gen_range(-1.0..=1.0));
    LiftVector::new(v(), v())
}

fn blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
    let top = concatenate(Axis(1), &[a.view(), b.view()]).unwrap();
    let bottom = concatenate(Axis(1), &[c.view(), d.view()]).unwrap();
    concatenate(Axis(0), &[top.view(), bottom.view()]).unwrap()
}

fn stack(w: &LiftVector) -> Vector {
    Vector::from(w.to_vec())
}

fn hypercomplex_algebra() -> Outcome {
    let mut rng = rng();
    let mut worst = 0.0f64;
    let mut triples = 0;
    for t in test_bases() {
        for tbp in lifted_points(&t, 100, &mut rng) {
            let g = &tbp.geom;
            let m = g.dim();
            let (j, z, id): (&Matrix, Matrix, Matrix) = (&g.structure, Array2::zeros((m, m)), Array2::eye(m));
            let l1 = blocks(&-j, &z, &z, j);
            let l2 = blocks(&z, &(-&id), &id, &z);
            let l3 = blocks(&z, j, j, &z);
            let gh = blocks(&z, &g.g, &g.g, &z);
            let eye = Array2::<f64>::eye(2 * m);
            let mut errs = vec![
                linalg::max_abs(&(l1.dot(&l1) + &eye)),
                linalg::max_abs(&(l2.dot(&l2) + &eye)),
                linalg::max_abs(&(l3.dot(&l3) + &eye)),
                linalg::max_abs(&(l1.dot(&l2) - &l3)),
                linalg::max_abs(&(l2.dot(&l1) + &l3)),
            ];
            let scale = linalg::max_abs(&gh).max(1.0);
            for (l, sign) in [(&l1, 1.0), (&l2, -1.0), (&l3, -1.0)] {
                errs.push(linalg::max_abs(&(l.t().dot(&gh).dot(l) - &gh * sign)) / scale);
            }
            let (w, w2) = (random_lift(&mut rng, m), random_lift(&mut rng, m));
            for (alpha, l) in [(Alpha::One, &l1), (Alpha::Two, &l2), (Alpha::Three, &l3)] {
                let d = stack(&tbp.apply_j(alpha, &w)) - l.dot(&stack(&w));
                errs.push(d.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
                let direct = tbp.hat_form(alpha, &w, &w2);
                errs.push(rel(direct - l.dot(&stack(&w)).dot(&gh.dot(&stack(&w2))), direct));
            }
            let gw = stack(&w).dot(&gh.dot(&stack(&w2)));
            errs.push(rel(tbp.ghat(&w, &w2) - gw, gw));
            worst = errs.into_iter().fold(worst, f64::max);
            triples += 1;
        }
    }
    Outcome::new(worst <= 1e-12, format!("{triples} (p,u,w) samples, max violation {worst:.2e} (tol 1e-12)"))
}

fn oracle_equivalence() -> Outcome {
    let Target::Chart(base) = chart("conformal-norden-4") else { unreachable!() };
    let ic = build_tm_chart(&base).unwrap();
    let points = random_points(4, 20, &mut rng(), false);
    let q: BTreeSet<Quantity> = [
        Quantity::NAlpha,
        Quantity::FAlpha,
        Quantity::Brackets,
        Quantity::NablaHat,
        Quantity::RHat,
        Quantity::RicciHat,
    ]
    .into_iter()
    .collect();
    let r = oracle_compare(&ic, &points, &q);
    let parts: Vec<String> = r
        .deviations
        .iter()
        .map(|d| format!("{} {:.1e}", d.quantity, d.max_rel))
        .collect();
    let passed = r.points.len() == 20 && r.deviations.iter().all(|d| d.passed(1e-7));
    Outcome::new(
        passed,
        format!("{} of 20 points; relative deviations: {} (tol 1e-7)", r.points.len(), parts.join(", ")),
    )
}

fn scalar_flatness() -> Outcome {
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    let mut names = Vec::new();
    let q: BTreeSet<Quantity> = [Quantity::ScalarHat].into_iter().collect();
    for t in [chart("flat-norden-4"), chart("conformal-norden-4"), chart("twisted-norden-4"), hsphere(2, 3.0, 4.0), hsphere(2, 1.0, 0.0)] {
        let ic = build_tm_chart(&t.chart().unwrap()).unwrap();
        let origin = matches!(t, Target::Pointwise(_));
        let points = random_points(t.dim(), 5, &mut rng(), origin);
        let r = oracle_compare(&ic, &points, &q);
        evaluated += r.points.len();
        worst = worst.max(r.scalar_max);
        names.push(t.name());
    }
    Outcome::new(
        worst < 1e-7 && evaluated == 25,
        format!("max |oracle scalar curvature| {worst:.2e} over {evaluated} points on {} (tol 1e-7)", names.join(", ")),
    )
}

fn lifted_basis(m: usize) -> Vec<LiftVector> {
    Lift::BOTH
        .into_iter()
        .flat_map(|kind| {
            (0..m).map(move |k| {
                let mut e = Vector::zeros(m);
                e[k] = 1.0;
                LiftVector::lift(kind, e)
            })
        })
        .collect()
}

fn flat_degeneration() -> Outcome {
    let mut rng = rng();
    let mut lines = Vec::new();
    let mut passed = true;
    for t in [chart("flat-norden-4"), Target::Pointwise(PointwiseModel::flat(2).unwrap())] {
        let points = lifted_points(&t, 20, &mut rng);
        let r = classify(&points, 1e-12);
        let f = &r.flags;
        let mut worst = [&f.nijenhuis, &f.structure, &f.lee]
            .iter()
            .flat_map(|s| s.iter().map(|fl| fl.max_violation))
            .fold(0.0f64, f64::max);
        let basis = lifted_basis(t.dim());
        for p in &points {
            for a in &basis {
                for b in &basis {
                    for c in &basis {
                        worst = worst.max(p.curvature_hat(a, b, c).max_abs());
                    }
                }
            }
        }
        let ok = worst <= 1e-12 && r.has_label("pseudo-hyper-Kähler");
        passed &= ok;
        lines.push(format!("{}: max |N,F,θ,R̂| {worst:.1e}, labels [{}]", t.name(), r.labels.join(", ")));
    }
    Outcome::new(passed, lines.join("; "))
}

fn g_tilde(g: &PointGeometry) -> Matrix {
    g.g.dot(&g.structure)
}

fn lee_forms() -> Outcome {
    let mut rng = rng();
    let mut worst = 0.0f64;
    let mut mismatches = Vec::new();
    for t in [chart("flat-norden-4"), chart("conformal-norden-4"), hsphere(2, 3.0, 4.0), hsphere(2, 1.0, 0.0), hsphere(3, 0.5, -2.0)] {
        let points = lifted_points(&t, 10, &mut rng);
        for p in &points {
            let g = &p.geom;
            let m = g.dim();
            let z = Vector::from_shape_fn(m, |_| rng.gen_range(-1.0..=1.0));
            let theta_z: f64 = g.theta.iter().zip(&z).map(|(a, b)| a * b).sum();
            let expected = [
                (Alpha::One, Lift::H, theta_z),
                (Alpha::Two, Lift::H, -p.u.dot(&g.rho.dot(&z))),
                (Alpha::Three, Lift::H, p.u.dot(&g.rho_star.dot(&z))),
                (Alpha::Three, Lift::V, theta_z),
                (Alpha::One, Lift::V, 0.0),
                (Alpha::Two, Lift::V, 0.0),
            ];
            for (alpha, kind, value) in expected {
                let w = LiftVector::lift(kind, z.clone());
                let traced = p.lee_frame_trace(alpha, &w).unwrap();
                worst = worst.max(rel(traced - value, value));
            }
        }
        if matches!(t, Target::Chart(_)) && t.name() != "flat-norden-4" {
            continue;
        }
        let r = classify(&points, 1e-10);
        let base = |f: fn(&PointGeometry) -> f64| points.iter().map(|p| f(&p.geom)).fold(0.0, f64::max) <= 1e-10;
        let theta = base(|g| g.theta.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
        let rho = base(|g| linalg::max_abs(&g.rho));
        let rho_star = base(|g| linalg::max_abs(&g.rho_star));
        let lee = r.flags.lee.map(|f| f.vanishes);
        for (k, cond) in [theta, rho, theta && rho_star].into_iter().enumerate() {
            if lee[k] != cond {
                mismatches.push(format!("{}: θ{} vanishes {} vs base condition {}", t.name(), k + 1, lee[k], cond));
            }
        }
    }
    Outcome::new(
        worst <= 1e-8 && mismatches.is_empty(),
        format!(
            "frame trace vs closed Lee forms max {worst:.2e} (tol 1e-8); equivalence mismatches: {}",
            if mismatches.is_empty() { "none".into() } else { mismatches.join("; ") }
        ),
    )
}

fn hsphere_closed_forms() -> Outcome {
    let model = PointwiseModel::hsphere(2, 3.0, 4.0).unwrap();
    let h = model.hsphere_params().unwrap();
    let g = model.geometry().unwrap();
    let n = 2.0;
    let gt = g_tilde(&g);
    let mut checks: Vec<(&str, f64)> = vec![
        ("ν", (h.nu - 0.12).abs()),
        ("ν*", (h.nu_star + 0.16).abs()),
        ("τ", (g.tau - 0.96).abs()),
        ("τ*", (g.tau_star + 1.28).abs()),
    ];
    let rho = (&g.g * h.nu - &gt * h.nu_star) * (2.0 * (n - 1.0));
    checks.push(("ρ", linalg::max_abs(&(&g.rho - &rho))));
    let rho_star_paper = (&gt * h.nu_star + &g.g * h.nu) * (2.0 * (n - 1.0));
    checks.push(("ρ*", linalg::max_abs(&(&g.rho_star - &rho_star_paper))));

    let e = j_basis(&g).unwrap();
    let mut holo = 0.0f64;
    let mut real = 0.0f64;
    for i in 0..2 {
        holo = holo.max(sectional_curvature(&g.riemann, &g.g, &e[i], &e[2 + i]).unwrap().abs());
        for jx in 0..2 {
            if i != jx {
                for (x, y) in [(&e[i], &e[jx]), (&e[i], &e[2 + jx]), (&e[2 + i], &e[2 + jx])] {
                    let k = sectional_curvature(&g.riemann, &g.g, x, y).unwrap();
                    real = real.max((k - h.nu).abs());
                }
            }
        }
    }
    checks.push(("holomorphic k", holo));
    checks.push(("totally-real k - ν", real));
    let failed: Vec<String> = checks
        .iter()
        .filter(|(_, d)| *d > 1e-12)
        .map(|(name, d)| format!("{name} off by {d:.3e}"))
        .collect();
    let trace_consistent = (&gt * h.nu + &g.g * h.nu_star) * (2.0 * (n - 1.0));
    let consistent = linalg::max_abs(&(&g.rho_star - &trace_consistent));
    let mut detail = format!(
        "ν, ν*, τ, τ*, ρ, base sectional curvatures max deviation {:.1e}",
        checks.iter().filter(|(name, _)| *name != "ρ*").map(|(_, d)| *d).fold(0.0, f64::max)
    );
    if !failed.is_empty() {
        detail.push_str(&format!(
            "; FAILED: {}. Computed ρ* = 2(n−1)(νg̃ + ν*g) to {consistent:.1e}; the stated 2(n−1)(ν*g̃ + νg) has trace 4n(n−1)ν = τ, which contradicts the stated τ* = 4n(n−1)ν* since g̃ is traceless",
            failed.join(", ")
        ));
    }
    Outcome::new(failed.is_empty(), detail)
}

fn hsphere_tm_table() -> Outcome {
    let (a, b) = (3.0, 4.0);
    let nu = a / (a * a + b * b);
    let model = PointwiseModel::hsphere(2, a, b).unwrap();
    let mut rng = rng();
    let mut us: Vec<Vector> = vec![Vector::from(vec![1.0, 0.0, 0.0, 0.0])];
    us.extend((0..5).map(|_| Vector::from_shape_fn(4, |_| rng.gen_range(-1.0..=1.0))));
    let (mut worst, mut rows, mut nulls, mut holo) = (0.0f64, 0, 0, 0.0f64);
    for u in us {
        let tbp = TangentBundlePoint::new(model.geometry().unwrap(), u).unwrap();
        let table = tm_sectional_table(&tbp, model.hsphere_params()).unwrap();
        for r in &table.rows {
            let Some(k) = r.k_hat else {
                nulls += 1;
                continue;
            };
            let expected = match (r.class, r.first.eta, r.second.eta) {
                (PlaneClass::Holomorphic(_), _, _) => {
                    holo = holo.max(k.abs());
                    0.0
                }
                (PlaneClass::TotallyReal, false, false) => nu,
                (PlaneClass::TotallyReal, true, true) => -nu,
                _ => 0.0,
            };
            worst = worst.max((k - expected).abs());
            rows += 1;
        }
    }
    Outcome::new(
        worst <= 1e-12 && nulls == 0,
        format!("{rows} rows over 6 fibre points, {nulls} null, max |k̂ - table| {worst:.1e}, max |k̂| on holomorphic planes {holo:.1e} (tol 1e-12)"),
    )
}

fn combination_identities() -> Outcome {
    let t = chart("conformal-norden-4");
    let mut rng = rng();
    let (mut worst, mut checked, mut skipped) = (0.0f64, 0, 0);
    for tbp in lifted_points(&t, 20, &mut rng) {
        let table = tm_sectional_table(&tbp, None).unwrap();
        let e = j_basis(&tbp.geom).unwrap();
        let xi = |i| FrameIndex { eta: false, i, bar: false };
        let eta = |i| FrameIndex { eta: true, i, bar: false };
        let k_hat = |a: FrameIndex, b: FrameIndex| table.k_hat(a, b).or_else(|| table.k_hat(b, a));
        for i in 0..2 {
            for j in 0..2 {
                if i == j {
                    continue;
                }
                let k = sectional_curvature(&tbp.geom.riemann, &tbp.geom.g, &e[i], &e[j]).ok();
                match (k_hat(xi(i), xi(j)), k_hat(eta(i), eta(j)), k_hat(xi(i), eta(j)), k) {
                    (Some(xx), Some(ee), Some(xe), Some(k)) => {
                        worst = worst.max(rel(xx + ee + 2.0 * xe, xx + ee));
                        worst = worst.max(rel(xx - ee - 2.0 * k, xx - ee));
                        checked += 2;
                    }
                    _ => skipped += 1,
                }
            }
            let xi_bar = FrameIndex { eta: false, i, bar: true };
            let eta_bar = FrameIndex { eta: true, i, bar: true };
            match (k_hat(xi_bar, eta(i)), k_hat(eta_bar, xi(i))) {
                (Some(x), Some(y)) => {
                    worst = worst.max(rel(x - y, x));
                    checked += 1;
                }
                _ => skipped += 1,
            }
        }
    }
    Outcome::new(
        worst <= 1e-8 && checked > 0,
        format!("{checked} identities at 20 points ({skipped} skipped for null planes), max deviation {worst:.2e} (tol 1e-8)"),
    )
}

fn structure_relation() -> Outcome {
    let mut rng = rng();
    let mut worst = 0.0f64;
    let mut count = 0;
    for t in test_bases() {
        for p in lifted_points(&t, 20, &mut rng) {
            let m = p.dim();
            for _ in 0..5 {
                let (a, b, c) = (random_lift(&mut rng, m), random_lift(&mut rng, m), random_lift(&mut rng, m));
                let f1 = p.f_lift(Alpha::One, &a, &b, &c);
                let rhs = p.f_lift(Alpha::Two, &a, &p.apply_j(Alpha::Three, &b), &c)
                    + p.f_lift(Alpha::Three, &a, &b, &p.apply_j(Alpha::Two, &c));
                worst = worst.max(rel(f1 - rhs, f1));
                count += 1;
            }
        }
    }
    Outcome::new(worst <= 1e-9, format!("{count} lifted triples on 7 bases, max deviation {worst:.2e} (tol 1e-9)"))
}

fn jet_layer() -> Outcome {
    let mut rng = rng();
    let corpus: Vec<_> = (0..200).map(|_| common::random_expr(&mut rng, 4)).collect();
    let mut fd = 0.0f64;
    for e in &corpus {
        let p = common::random_point(&mut rng);
        fd = fd.max(common::finite_difference_error(e, &p, 1e-4));
    }
    let mut exact = 0.0f64;
    for pair in corpus.chunks(2) {
        let p = common::random_point(&mut rng);
        let env = Jet::seed(&p, 2).unwrap();
        let f = evaluate(&pair[0], &env).unwrap();
        let g = evaluate(&pair[1], &env).unwrap();
        let prod = &f * &g;
        let ex = f.exp();
        let (fv, gv) = (f.value(), g.value());
        let e0 = fv.exp();
        for i in 0..3 {
            let leibniz = f.d1(i) * gv + fv * g.d1(i);
            exact = exact.max(rel(prod.d1(i) - leibniz, leibniz));
            let chain = e0 * f.d1(i);
            exact = exact.max(rel(ex.d1(i) - chain, chain));
            for j in 0..3 {
                let leibniz2 = f.d2(i, j) * gv + f.d1(i) * g.d1(j) + f.d1(j) * g.d1(i) + fv * g.d2(i, j);
                exact = exact.max(rel(prod.d2(i, j) - leibniz2, leibniz2));
                let chain2 = e0 * (f.d2(i, j) + f.d1(i) * f.d1(j));
                exact = exact.max(rel(ex.d2(i, j) - chain2, chain2));
            }
        }
    }
    Outcome::new(
        fd <= 1e-6 && exact <= 1e-13,
        format!("200 expressions: finite-difference deviation {fd:.2e} (tol 1e-6); Leibniz/chain deviation {exact:.2e} (tol 1e-13)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("hypercomplex algebra and metric compatibilities", hypercomplex_algebra),
        ("oracle equivalence on the conformal Norden 4-space", oracle_equivalence),
        ("scalar flatness of (TM, ĝ)", scalar_flatness),
        ("flat Kähler-Norden degeneration", flat_degeneration),
        ("Lee forms and their vanishing equivalences", lee_forms),
        ("h-sphere closed forms", hsphere_closed_forms),
        ("h-sphere TM sectional-curvature table", hsphere_tm_table),
        ("k̂ combination identities", combination_identities),
        ("structure-tensor relation F1 = F2(·,J3·,·) + F3(·,·,J2·)", structure_relation),
        ("jet layer against finite differences", jet_layer),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {title}: {} [{:.1}s]",
            k + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("{} of 10 criteria passed in {:.1}s", 10 - failures, start.elapsed().as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
