//! Randomized property suite: 1000 seeded cases across ring axioms,
//! substitution multiplicativity, exp/log inverses, invariant symmetry, and
//! crossing telescopes.  Set `FLOPDT_SEED` to rerun with a different seed.

#[path = "support/properties.rs"]
mod properties;

#[test]
fn ring_axioms_hold_on_random_series() {
    properties::ring_axioms(200, 1);
}

#[test]
fn substitution_commutes_with_products() {
    properties::substitution_multiplicative(200, 2);
}

#[test]
fn log_inverts_products_of_exponentials() {
    properties::exp_log_inverse(200, 3);
}

#[test]
fn invariant_values_are_even_under_class_negation() {
    properties::invariant_symmetry(200, 4);
}

#[test]
fn crossings_telescope_under_sign_reversal() {
    properties::crossing_telescopes(200, 5);
}

#[test]
fn log_extraction_recovers_random_invariant_tables() {
    properties::log_extraction_round_trip(100, 6);
}
