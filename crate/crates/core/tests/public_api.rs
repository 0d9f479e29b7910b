use proptest::prelude::*;

use pinchsum_core::pinch::{
    corollary_residuals, lemma_first_decompose, lemma_second_decompose, theorem1_decompose,
    theorem2_decompose,
};
use pinchsum_core::scalar::rational;
use pinchsum_core::sums::{interval_sum, short_corr_average};
use pinchsum_core::verify::{read_grid_csv, run_grid, write_grid_csv};
use pinchsum_core::{FunctionSpec, FunctionWindow, GridConfig, ParameterTuple, RandomFunction, Scalar, SieveFunction};

fn random_sieve(seed: u64, q: u64) -> SieveFunction {
    SieveFunction::new(RandomFunction::new(seed, rational(1, 1)).unwrap().tabulate(q)).unwrap()
}

#[test]
fn spec_to_csv_and_back() {
    let spec = FunctionSpec::from_json(r#"{"kind":"convolution","left":{"kind":"builtin","name":"mobius"},"right":{"kind":"random","seed":9,"bound":"3/2"}}"#).unwrap();
    let config = GridConfig {
        identities: vec!["theorem2".parse().unwrap(), "corollary1".parse().unwrap()],
        f: spec,
        g_transform: FunctionSpec::random(4, rational(1, 1)),
        f_range: None,
        x: vec![3000],
        h: vec![3],
        shifts: vec![40],
        ranges: vec![90],
        range_multiple: None,
        big_n: vec![],
        epsilon: 0.1,
        c: 1.0,
        seed: 7,
        slack: 2.0,
    };
    let report = run_grid(&config, Some(2)).unwrap();
    let mut buf = Vec::new();
    write_grid_csv(&report.rows, &mut buf).unwrap();
    let rows = read_grid_csv(buf.as_slice()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.is_exact().unwrap()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The long-form main term splits into the harmonic piece and both lemma
    /// main terms.
    #[test]
    fn theorem1_main_composes(seed in any::<u64>(), x in 200u64..50_000, h in 1u64..8, extra in 0u64..40, q_extra in 1u64..80) {
        let shifts = h + extra;
        let q_max = shifts + q_extra;
        let g = random_sieve(seed, q_max);
        let f = RandomFunction::new(seed ^ 1, rational(1, 1)).unwrap();
        let t = ParameterTuple::short(x, h, shifts).with_range(q_max);
        let full = theorem1_decompose(&f, &g, &t).unwrap();
        let l1 = lemma_first_decompose(&f, g.transform(), &ParameterTuple::short(x, h, shifts)).unwrap();
        let l2 = lemma_second_decompose(&f, g.transform(), &t).unwrap();
        let sum_f = interval_sum(&f, x, h).unwrap();
        let harmonic: Scalar = (1..=h).map(|q| g.transform_at(q).mul_int(shifts as i64).div_int(q)).sum();
        prop_assert_eq!(full.main, &(&(&harmonic * &sum_f) + &l1.main) + &l2.main);
    }

    /// The four theorem2 terms and the two corollary residuals account for
    /// the same left side.
    #[test]
    fn theorem2_against_corollaries(seed in any::<u64>(), x in 200u64..50_000, h in 1u64..8, extra in 0u64..40, q_extra in 1u64..80) {
        let shifts = h + extra;
        let q_max = shifts + q_extra;
        let g = random_sieve(seed, q_max);
        let f = FunctionWindow::capture(&RandomFunction::new(seed ^ 2, rational(1, 1)).unwrap(), x + 1, x + h).unwrap();
        let t = ParameterTuple::short(x, h, shifts).with_range(q_max);
        let r = theorem2_decompose(&f, &g, &t).unwrap();
        prop_assert_eq!(&r.lhs, &short_corr_average(&f, &g, &t).unwrap());
        let (c1, c2) = corollary_residuals(&f, g.transform(), &ParameterTuple::short(x, h, shifts)).unwrap();
        // term_C is the exact left side of the first corollary
        prop_assert_eq!(r.term("term_C").unwrap(), &c1.lhs);
        prop_assert_eq!(r.term("term_B").unwrap(), &c2.main);
        prop_assert!(r.is_exact() && c1.is_exact() && c2.is_exact());
    }
}
