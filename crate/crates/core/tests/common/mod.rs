#![allow(dead_code)]

use hnlift::expr::{Expr, Func};
use rand::Rng;

pub const CORPUS_VARS: usize = 3;

/// A random expression in `x1..x3` that is smooth and finite on `[-1, 1]³`:
/// divisors, `ln` and `sqrt` arguments are kept away from zero.
pub fn random_expr(rng: &mut impl Rng, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.7) {
            Expr::var(rng.gen_range(0..CORPUS_VARS))
        } else {
            Expr::constant((rng.gen_range(-2.0..2.0f64) * 4.0).round() / 4.0)
        };
    }
    let sub = |rng: &mut _| random_expr(rng, depth - 1);
    let positive = |e: Expr| Expr::add(Expr::constant(1.5), Expr::call(Func::Sin, e));
    match rng.gen_range(0..9) {
        0 => Expr::add(sub(rng), sub(rng)),
        1 => Expr::sub(sub(rng), sub(rng)),
        2 | 3 => Expr::mul(sub(rng), sub(rng)),
        4 => {
            let num = sub(rng);
            let den = sub(rng);
            Expr::div(num, positive(den))
        }
        5 => Expr::pow(sub(rng), rng.gen_range(2..=3)),
        6 => {
            let f = [Func::Sin, Func::Cos][rng.gen_range(0..2)];
            Expr::call(f, sub(rng))
        }
        7 => {
            let inner = sub(rng);
            Expr::call(Func::Exp, Expr::call(Func::Sin, inner))
        }
        _ => {
            let f = [Func::Ln, Func::Sqrt][rng.gen_range(0..2)];
            let inner = sub(rng);
            Expr::call(f, positive(inner))
        }
    }
}

pub fn random_point(rng: &mut impl Rng) -> Vec<f64> {
    (0..CORPUS_VARS).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// Largest `|jet - central difference| / max(1, |jet|)` over all first and
/// second partials at `p`, with step `h`.
pub fn finite_difference_error(e: &Expr, p: &[f64], h: f64) -> f64 {
    use hnlift::expr::evaluate;
    use hnlift::jet::Jet;
    let jet = evaluate(e, &Jet::seed(p, 2).unwrap()).unwrap();
    let f = |dx: &[(usize, f64)]| {
        let mut q = p.to_vec();
        for &(k, s) in dx {
            q[k] += s;
        }
        e.eval_f64(&q)
    };
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1.0);
    let mut worst = 0.0f64;
    for i in 0..p.len() {
        let d1 = (f(&[(i, h)]) - f(&[(i, -h)])) / (2.0 * h);
        worst = worst.max(rel(jet.d1(i), d1));
        for j in i..p.len() {
            let d2 = if i == j {
                (f(&[(i, h)]) - 2.0 * f(&[]) + f(&[(i, -h)])) / (h * h)
            } else {
                (f(&[(i, h), (j, h)]) - f(&[(i, h), (j, -h)]) - f(&[(i, -h), (j, h)])
                    + f(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h)
            };
            worst = worst.max(rel(jet.d2(i, j), d2));
        }
    }
    worst
}
