use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hnlift::base::{ChartManifold, PointwiseModel};
use hnlift::oracle::{build_tm_chart, oracle_compare, random_points, Quantity};

fn all() -> std::collections::BTreeSet<Quantity> {
    Quantity::ALL.into_iter().collect()
}

#[test]
fn twisted_base_matches_closed_forms() {
    let base = ChartManifold::builtin("twisted-norden-4").unwrap().unwrap();
    let ic = build_tm_chart(&base).unwrap();
    let points = random_points(4, 8, &mut ChaCha8Rng::seed_from_u64(42), false);
    let r = oracle_compare(&ic, &points, &all());
    assert!(r.skipped.is_empty(), "{:?}", r.skipped);
    for d in &r.deviations {
        assert!(d.passed(1e-7), "{d:?}");
    }
    assert!(r.scalar_max < 1e-7);
    assert!(r.base_ricci_max > 1e-3);
    assert!(r.einstein_max > 1e-3);
}

#[test]
fn hsphere_normal_chart_matches_closed_forms() {
    let model = PointwiseModel::hsphere(3, 0.5, -2.0).unwrap();
    let ic = build_tm_chart(&model.normal_chart().unwrap()).unwrap();
    let points = random_points(6, 3, &mut ChaCha8Rng::seed_from_u64(42), true);
    let r = oracle_compare(&ic, &points, &all());
    assert_eq!(r.points.len(), 3);
    for d in &r.deviations {
        assert!(d.passed(1e-7), "{d:?}");
    }
    assert!(r.einstein_consistent(1e-7));
}

#[test]
fn flat_base_tm_is_ricci_flat_hence_einstein() {
    let base = ChartManifold::builtin("flat-norden-8").unwrap().unwrap();
    let ic = build_tm_chart(&base).unwrap();
    let points = random_points(8, 2, &mut ChaCha8Rng::seed_from_u64(42), false);
    let q = [Quantity::RicciHat, Quantity::ScalarHat, Quantity::EinsteinCheck].into_iter().collect();
    let r = oracle_compare(&ic, &points, &q);
    assert_eq!(r.einstein_max, 0.0);
    assert!(r.einstein_consistent(1e-12));
}
