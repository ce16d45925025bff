//! Randomized algebraic laws of the hypervector operations, 1000 cases per
//! dimension.

mod common;

use common::hd_laws::{self, DIMS};

#[test]
fn permutation_is_an_isometry() {
    for n in DIMS {
        hd_laws::permutation_is_an_isometry(n).unwrap();
    }
}

#[test]
fn shifts_compose_additively() {
    for n in DIMS {
        hd_laws::shifts_compose_additively(n).unwrap();
    }
}

#[test]
fn bundle_similarity_is_linear() {
    for n in DIMS {
        hd_laws::bundle_similarity_is_linear(n).unwrap();
    }
}

#[test]
fn clipping_is_idempotent() {
    for n in DIMS {
        hd_laws::clipping_is_idempotent(n).unwrap();
    }
}
