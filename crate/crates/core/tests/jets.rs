use adapted_geom::parse;
use adapted_geom_testkit::random::smooth_expr;
use adapted_geom_testkit::{fd, rng};
use proptest::prelude::*;
use rand::Rng;

const NAMES: [&str; 5] = ["x1", "x2", "x3", "x4", "x5"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_round_trips(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let e = smooth_expr(&mut r, n, 4);
        let text = e.display(&NAMES[..n]).to_string();
        let back = parse(&text, &NAMES[..n]).unwrap();
        prop_assert_eq!(back.display(&NAMES[..n]).to_string(), text.clone());
        let p: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let (a, b) = (e.eval(&p).unwrap(), back.eval(&p).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} vs {} for {}", a, b, text);
    }

    #[test]
    fn hessian_is_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = smooth_expr(&mut r, 3, 5);
        let p: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
        let j = e.eval_jet(&p).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                prop_assert_eq!(j.hess(i, k), j.hess(k, i));
            }
        }
    }

    #[test]
    fn jet_value_matches_eval(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = smooth_expr(&mut r, 4, 5);
        let p: Vec<f64> = (0..4).map(|_| r.gen_range(-1.0..1.0)).collect();
        let (a, b) = (e.eval_jet(&p).unwrap().value, e.eval(&p).unwrap());
        prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0), "{} vs {}", a, b);
    }
}

#[test]
fn jets_match_central_differences() {
    let mut r = rng(801);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = r.gen_range(1..=5);
        let e = smooth_expr(&mut r, n, 4);
        let p: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let j = e.eval_jet(&p).unwrap();
        for (a, b) in j.gradient.iter().zip(fd::gradient(&e, &p).unwrap()) {
            worst = worst.max((a - b).abs());
        }
        for (a, b) in j.hessian.iter().zip(fd::hessian(&e, &p).unwrap()) {
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst < 1e-6, "max discrepancy {worst:e}");
}
