mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hnlift::expr::{differentiate, evaluate, parse};
use hnlift::jet::Jet;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn random_jet(coeffs: &[f64], num_vars: usize, order: usize) -> Jet {
    let len = Jet::constant(0.0, num_vars, order).unwrap().coeffs().len();
    Jet::from_coeffs(num_vars, order, coeffs[..len].to_vec()).unwrap()
}

fn multi_indices(num_vars: usize, order: usize) -> Vec<Vec<u8>> {
    Jet::constant(0.0, num_vars, order).unwrap().layout().exponents().to_vec()
}

fn binomial(n: u8, k: u8) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_obeys_general_leibniz(
        a in prop::collection::vec(-2.0f64..2.0, 35),
        b in prop::collection::vec(-2.0f64..2.0, 35),
    ) {
        let (f, g) = (random_jet(&a, 3, 3), random_jet(&b, 3, 3));
        let fg = &f * &g;
        for alpha in multi_indices(3, 3) {
            let mut expected = 0.0;
            for beta in multi_indices(3, 3) {
                if beta.iter().zip(&alpha).any(|(b, a)| b > a) {
                    continue;
                }
                let rest: Vec<u8> = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
                let c: f64 = alpha.iter().zip(&beta).map(|(&a, &b)| binomial(a, b)).product();
                expected += c * f.partial(&beta).unwrap() * g.partial(&rest).unwrap();
            }
            prop_assert!(close(fg.partial(&alpha).unwrap(), expected, 1e-13));
        }
    }

    #[test]
    fn composition_obeys_chain_rule(a in prop::collection::vec(-1.0f64..1.0, 10)) {
        let f = random_jet(&a, 3, 2);
        let (v, s, c) = (f.value(), f.sin(), f.exp());
        for i in 0..3 {
            prop_assert!(close(s.d1(i), v.cos() * f.d1(i), 1e-13));
            prop_assert!(close(c.d1(i), v.exp() * f.d1(i), 1e-13));
            for j in 0..3 {
                let sin2 = v.cos() * f.d2(i, j) - v.sin() * f.d1(i) * f.d1(j);
                let exp2 = v.exp() * (f.d2(i, j) + f.d1(i) * f.d1(j));
                prop_assert!(close(s.d2(i, j), sin2, 1e-13));
                prop_assert!(close(c.d2(i, j), exp2, 1e-13));
            }
        }
    }

    #[test]
    fn printed_expressions_parse_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = common::random_expr(&mut rng, 4);
        let text = e.to_string();
        let back = parse(&text, common::CORPUS_VARS).unwrap();
        for _ in 0..3 {
            let p = common::random_point(&mut rng);
            prop_assert!(close(e.eval_f64(&p), back.eval_f64(&p), 1e-12), "{text}");
        }
    }

    #[test]
    fn symbolic_derivatives_match_jets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = common::random_expr(&mut rng, 4);
        let p = common::random_point(&mut rng);
        let jet = evaluate(&e, &Jet::seed(&p, 2).unwrap()).unwrap();
        for i in 0..common::CORPUS_VARS {
            let di = differentiate(&e, i);
            prop_assert!(close(di.eval_f64(&p), jet.d1(i), 1e-11));
            for j in 0..common::CORPUS_VARS {
                let dij = differentiate(&di, j);
                prop_assert!(close(dij.eval_f64(&p), jet.d2(i, j), 1e-10));
            }
        }
    }
}

#[test]
fn corpus_partials_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let e = common::random_expr(&mut rng, 3);
        let p = common::random_point(&mut rng);
        let err = common::finite_difference_error(&e, &p, 1e-4);
        assert!(err <= 1e-6, "{e}: {err:e}");
    }
}
