//! Loading and validation of the bundled instances, plus the failure paths
//! of the validator.

use conelab_core::error::Error;
use conelab_core::exactq::QVec;
use conelab_core::instances;
use conelab_core::varmodel::{dual_span_rank_identity, load_and_validate, trivial_subspace};

#[test]
fn toy_vertical_loads_and_validates() {
    let (inst, summary) = instances::load("toy-vertical").unwrap();
    assert_eq!(summary.exceptional_divisor_count, 2);
    assert_eq!(summary.partition_members, 1);
    assert_eq!(summary.reducible_fibre_pairs, 1);
    assert_eq!(summary.trivial_subspace_dim, 0);
    assert!(inst.is_relative);
    let (t, _) = trivial_subspace(&inst);
    assert!(t.is_empty());
    assert!(dual_span_rank_identity(&inst));
}

#[test]
fn i2_chain_loads_and_validates() {
    let (inst, summary) = instances::load("i2-chain").unwrap();
    assert_eq!(summary.exceptional_divisor_count, 0);
    assert_eq!(summary.reducible_fibre_pairs, 1);
    assert_eq!(inst.group_generators.len(), 1);
    assert!(dual_span_rank_identity(&inst));
}

#[test]
fn quadric_net_loads_with_28_reducible_fibres() {
    let (inst, summary) = instances::load("quadric-net").unwrap();
    assert_eq!(summary.reducible_fibre_pairs, 28);
    assert_eq!(summary.exceptional_divisor_count, 0);
    assert_eq!(summary.quotient_dim, 8);
    assert_eq!(summary.trivial_subspace_dim, 1);
    // T(X/S) is spanned by the pullback class 2H - sum(E).
    let (t, _) = trivial_subspace(&inst);
    assert_eq!(t.len(), 1);
    let tau = QVec::from_i64(&[2, -1, -1, -1, -1, -1, -1, -1, -1]);
    let found = t[0].primitive();
    assert!(found == tau || found == tau.neg(), "got {found:?}");
    assert_eq!(inst.group_generators.len(), 7);
}

#[test]
fn flipped_pairing_sign_is_reported_with_the_identity_name() {
    let text = instances::TOY_VERTICAL.replace(
        "\"vertical_divisors\": [[\"-1\", \"1\"], [\"1\", \"-1\"]]",
        "\"vertical_divisors\": [[\"1\", \"1\"], [\"1\", \"-1\"]]",
    );
    let err = load_and_validate(&text, "toy-broken").unwrap_err();
    match err {
        Error::Validation { violations } => {
            assert!(
                violations.iter().any(|v| v == "D_i·F_i < 0 violated at i=1"),
                "got {violations:?}"
            );
        }
        other => panic!("expected validation error, got {other}"),
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let text = instances::TOY_VERTICAL.replace("\"rank\": 2,", "\"rank\": 2, \"extra\": 1,");
    let err = load_and_validate(&text, "toy-unknown").unwrap_err();
    assert!(matches!(err, Error::Parse { .. }), "got {err}");
}

#[test]
fn trivial_subspace_single_fibral_class() {
    // An instance whose only fibral datum is F itself: T is the kernel of
    // one functional, dimension rank - 1.
    let text = r#"{
      "rank": 3,
      "divisor_basis": ["A1", "A2", "A3"],
      "curve_basis": ["C1", "C2", "C3"],
      "pairing": [["1","0","0"],["0","1","0"],["0","0","1"]],
      "canonical_class": ["0","0","0"],
      "iitaka_dim": 2,
      "fibre_class": ["1","0","0"],
      "fibral_classes": [],
      "vertical_divisors": [],
      "partition": [],
      "multiplicities_m": [],
      "pullback_coeffs_mu": [],
      "ample_pullbacks": [],
      "k_negative_rays": [],
      "flop_rule": {"reflection_form": [["0","0","0"],["0","-2","0"],["0","0","-2"]]},
      "seed_chamber": {"wall_frame": [["1","0","0"]]},
      "group_generators": [],
      "metadata": {},
      "is_relative": false
    }"#;
    let (inst, summary) = load_and_validate(text, "single-f").unwrap();
    assert_eq!(summary.trivial_subspace_dim, 2);
    assert_eq!(inst.quotient_dim(), 1);
}
