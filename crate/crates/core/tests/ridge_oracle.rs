mod common;

use common::{random_problem, relative_error, ridge_against_oracle, ridge_oracle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn ridge_matches_independent_oracle_on_200_problems() {
    let worst = ridge_against_oracle(2024, 200).unwrap();
    assert!(worst < 1e-8, "worst relative error {worst:e}");
}

#[test]
fn pseudo_inverse_oracle_agrees_with_small_lambda_limit() {
    // Cross-check of the two oracle routes: ridge solutions converge to the
    // minimum-norm solution as λ → 0.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (x, y) = random_problem(&mut rng);
        let pinv = ridge_oracle(&x, &y, 0.0);
        let tiny = ridge_oracle(&x, &y, 1e-9);
        assert!(relative_error(&tiny, &pinv) < 1e-4);
    }
}
