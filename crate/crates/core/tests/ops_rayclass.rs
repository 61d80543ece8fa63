//! Classification of extremal-ray records and the finiteness checks.

use conelab_core::exactq::QVec;
use conelab_core::instances;
use conelab_core::rayclass::{
    classify_ray, k_trivial_face, records_from_instance, type_finiteness_check, CoarseClass,
    DeclaredType, RayRecord,
};
use conelab_core::varmodel::MoriType;

fn qv(e: &[i64]) -> QVec {
    QVec::from_i64(e)
}

#[test]
fn quadric_blowup_rays_are_divisorial_type_two() {
    let (inst, _) = instances::load("quadric-net").unwrap();
    for record in records_from_instance(&inst) {
        let verdict = classify_ray(&inst, &record).unwrap();
        assert!(verdict.consistent, "notes: {:?}", verdict.notes);
        match record.declared {
            DeclaredType::Mori(MoriType::Type2) => {
                assert_eq!(verdict.coarse, CoarseClass::Divisorial);
                assert_eq!(verdict.k_pairing, conelab_core::exactq::rat_i(-2));
            }
            DeclaredType::Mori(MoriType::Fibre) => {
                assert_eq!(verdict.coarse, CoarseClass::FibreType);
                assert_eq!(verdict.k_pairing, conelab_core::exactq::rat_i(-4));
            }
            other => panic!("unexpected declared type {other:?}"),
        }
    }
}

#[test]
fn k_trivial_and_invalid_records() {
    let (inst, _) = instances::load("quadric-net").unwrap();
    // A fibral wall class is K-trivial.
    let wall = inst.seed_frame[0].clone();
    let rec = RayRecord {
        curve: wall,
        declared: DeclaredType::KTrivial,
        exceptional_divisor: None,
    };
    let verdict = classify_ray(&inst, &rec).unwrap();
    assert_eq!(verdict.coarse, CoarseClass::KTrivial);
    assert!(verdict.consistent);

    // Declaring a divisorial type without a divisor is inconsistent.
    let bad = RayRecord {
        curve: qv(&[0, 1, 0, 0, 0, 0, 0, 0, 0]),
        declared: DeclaredType::Mori(MoriType::Type3),
        exceptional_divisor: None,
    };
    let verdict = classify_ray(&inst, &bad).unwrap();
    assert!(!verdict.consistent);

    // K.c > 0 is outside the modeled dichotomy.
    let pos = RayRecord {
        curve: qv(&[-1, 0, 0, 0, 0, 0, 0, 0, 0]),
        declared: DeclaredType::KTrivial,
        exceptional_divisor: None,
    };
    assert!(classify_ray(&inst, &pos).is_err());
}

#[test]
fn classification_is_scale_invariant() {
    let (inst, _) = instances::load("quadric-net").unwrap();
    let rec = records_from_instance(&inst).swap_remove(0);
    let scaled = RayRecord {
        curve: rec.curve.scale(&conelab_core::exactq::rat_i(7)),
        ..rec.clone()
    };
    let a = classify_ray(&inst, &rec).unwrap();
    let b = classify_ray(&inst, &scaled).unwrap();
    assert_eq!(a.coarse, b.coarse);
    assert_eq!(a.consistent, b.consistent);
}

#[test]
fn quadric_k_trivial_face_equals_the_fibral_cone() {
    let (inst, _) = instances::load("quadric-net").unwrap();
    let verdict = k_trivial_face(&inst).unwrap();
    assert!(verdict.equal, "witness: {:?}", verdict.witness);
}

#[test]
fn synthetic_extra_k_trivial_generator_breaks_face_equality() {
    let (mut inst, _) = instances::load("quadric-net").unwrap();
    // Adjoin l - 2 e1: K-trivial (2*1 + (-2) = 0 against the K functional)
    // but outside the fibral cone, certified by the functional of H - E1
    // which is nonnegative on every wall yet negative here.
    inst.fibration.k_negative_rays.push(conelab_core::varmodel::KNegativeRay {
        curve: qv(&[1, -2, 0, 0, 0, 0, 0, 0, 0]),
        mori_type: MoriType::Fibre,
        exceptional_divisor: None,
    });
    let verdict = k_trivial_face(&inst).unwrap();
    assert!(!verdict.equal);
    assert!(verdict.witness.is_some());
}

#[test]
fn empty_k_negative_rays_compares_whole_curve_cone() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    // With no listed K-negative rays the curve cone is the fibral frame
    // cone, and K = 0 makes K-perp everything: the face is the whole cone.
    let verdict = k_trivial_face(&inst).unwrap();
    assert!(verdict.equal);
}

#[test]
fn type_finiteness_on_the_eight_blowup_divisors() {
    let (inst, _) = instances::load("quadric-net").unwrap();
    let records: Vec<RayRecord> = records_from_instance(&inst)
        .into_iter()
        .filter(|r| r.exceptional_divisor.is_some())
        .collect();
    assert_eq!(records.len(), 8);
    let report = type_finiteness_check(&inst, &records).unwrap();
    assert!(report.flagged_pairs.is_empty());
    assert_eq!(report.independent_rank, 8);
    assert_eq!(report.rank_bound, 8);
    assert!(!report.rank_bound_exceeded);
}

#[test]
fn shared_divisor_class_is_flagged_symmetrically() {
    let (inst, _) = instances::load("quadric-net").unwrap();
    let mut records: Vec<RayRecord> = records_from_instance(&inst)
        .into_iter()
        .filter(|r| r.exceptional_divisor.is_some())
        .take(2)
        .collect();
    // Duplicate the first divisor class onto the second record.
    records[1].exceptional_divisor = records[0].exceptional_divisor.clone();
    let report = type_finiteness_check(&inst, &records).unwrap();
    assert_eq!(report.flagged_pairs, vec![(0, 1)]);
}

#[test]
fn crossing_exceptional_divisors_are_flagged() {
    let (inst, _) = instances::load("quadric-net").unwrap();
    let e1 = qv(&[0, 1, 0, 0, 0, 0, 0, 0, 0]);
    let e2 = qv(&[0, 0, 1, 0, 0, 0, 0, 0, 0]);
    let records = vec![
        RayRecord {
            curve: e1.clone(),
            declared: DeclaredType::Mori(MoriType::Type2),
            exceptional_divisor: Some(qv(&[0, -1, 0, 0, 0, 0, 0, 0, 0])),
        },
        RayRecord {
            curve: e2,
            declared: DeclaredType::Mori(MoriType::Type2),
            // Pairs nonzero with the first record's curve class.
            exceptional_divisor: Some(qv(&[1, -1, -1, 0, 0, 0, 0, 0, 0])),
        },
    ];
    let report = type_finiteness_check(&inst, &records).unwrap();
    assert_eq!(report.flagged_pairs, vec![(0, 1)]);
}
