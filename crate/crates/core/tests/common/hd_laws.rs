//! Algebraic laws of the hypervector operations as proptest runs.

use intesn_core::hd::{bundle, HyperVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TRIALS: u32 = 1000;
pub const DIMS: [usize; 3] = [100, 1000, 10000];

// Vectors are expanded from a drawn seed; element-wise proptest strategies
// are too slow at N = 10000.
fn bipolar(n: usize) -> impl Strategy<Value = HyperVector> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        HyperVector::bipolar((0..n).map(|_| if rng.random() { 1 } else { -1 }).collect()).unwrap()
    })
}

fn integer(n: usize, bound: i16) -> impl Strategy<Value = HyperVector> {
    any::<u64>().prop_map(move |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        HyperVector::integer((0..n).map(|_| rng.random_range(-bound..=bound)).collect()).unwrap()
    })
}

fn check<S: Strategy>(strategy: S, law: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases: TRIALS, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, law).map_err(|e| {
        let text = e.to_string();
        text.chars().take(400).collect()
    })
}

pub fn permutation_is_an_isometry(n: usize) -> Result<(), String> {
    check((bipolar(n), integer(n, 20), any::<i64>()), |(a, b, k)| {
        prop_assert_eq!(a.cyclic_shift(k).dot(&b.cyclic_shift(k)).unwrap(), a.dot(&b).unwrap());
        prop_assert_eq!(a.cyclic_shift(k).dot(&a.cyclic_shift(k)).unwrap(), n as i64);
        Ok(())
    })
}

pub fn shifts_compose_additively(n: usize) -> Result<(), String> {
    check((integer(n, 5), -30_000i64..30_000, -30_000i64..30_000), |(a, j, k)| {
        prop_assert_eq!(a.cyclic_shift(j).cyclic_shift(k), a.cyclic_shift(j + k));
        prop_assert_eq!(a.cyclic_shift(n as i64), a.clone());
        prop_assert_eq!(a.cyclic_shift(k).cyclic_shift(-k), a);
        Ok(())
    })
}

pub fn bundle_similarity_is_linear(n: usize) -> Result<(), String> {
    check((bipolar(n), bipolar(n), bipolar(n), bipolar(n)), |(a, b, c, q)| {
        let s = bundle([&a, &b, &c]).unwrap();
        let expected = a.dot(&q).unwrap() + b.dot(&q).unwrap() + c.dot(&q).unwrap();
        prop_assert_eq!(s.dot(&q).unwrap(), expected);
        Ok(())
    })
}

pub fn clipping_is_idempotent(n: usize) -> Result<(), String> {
    check((integer(n, 40), 1i64..=30), |(x, kappa)| {
        let once = x.clip(kappa).unwrap();
        prop_assert_eq!(once.clip(kappa).unwrap(), once.clone());
        prop_assert!(once.max_abs() as i64 <= kappa);
        for (c, v) in once.as_slice().iter().zip(x.as_slice()) {
            if v.abs() as i64 <= kappa {
                prop_assert_eq!(c, v);
            }
        }
        Ok(())
    })
}

pub type Law = fn(usize) -> Result<(), String>;

pub const LAWS: [(&str, Law); 4] = [
    ("permutation is an isometry", permutation_is_an_isometry),
    ("shifts compose additively", shifts_compose_additively),
    ("bundle similarity is linear", bundle_similarity_is_linear),
    ("clipping is idempotent", clipping_is_idempotent),
];
