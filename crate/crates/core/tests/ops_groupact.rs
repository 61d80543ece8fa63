//! Group element validation, slice translations, orbit reduction, and the
//! fundamental-domain predicates.

use conelab_core::error::Error;
use conelab_core::exactq::{parse_rational, rat_i, QMat, QVec};
use conelab_core::groupact::{
    fundamental_domain_check, orbit_reduce_point, quotient_translation, validate_group_element,
    TranslationLattice,
};
use conelab_core::instances;
use conelab_core::polycone::{build_dual_pair, ConeInput};

fn qv(e: &[i64]) -> QVec {
    QVec::from_i64(e)
}

fn qm(rows: &[&[i64]]) -> QMat {
    QMat::from_i64(rows)
}

#[test]
fn identity_is_always_valid() {
    for name in instances::NAMES {
        let (inst, _) = instances::load(name).unwrap();
        assert!(validate_group_element(&inst, &QMat::identity(inst.rank())).is_empty());
    }
}

#[test]
fn i2_translation_validates_and_translates_by_one() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    let tau = &inst.group_generators[0].matrix;
    assert!(validate_group_element(&inst, tau).is_empty());
    let cert = quotient_translation(&inst, tau).unwrap();
    assert_eq!(cert.vector.entries(), &[rat_i(1)]);

    let cert_inv = quotient_translation(&inst, &tau.inverse().unwrap()).unwrap();
    assert_eq!(cert_inv.vector.entries(), &[rat_i(-1)]);
}

#[test]
fn broken_elements_are_reported() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    // Sign flip on the diagonal: the dual action no longer fixes F.
    let flipped = qm(&[&[-1, 0], &[1, 1]]);
    let violations = validate_group_element(&inst, &flipped);
    assert!(
        violations
            .iter()
            .any(|v| v.contains("does not fix the fibre class")),
        "got {violations:?}"
    );

    // F-degree preserved but the movable octant is sheared off itself.
    let (toy, _) = instances::load("toy-vertical").unwrap();
    let shear = qm(&[&[2, 1], &[-1, 0]]);
    let violations = validate_group_element(&toy, &shear);
    assert_eq!(violations, vec!["does not preserve movable cone".to_string()]);
}

#[test]
fn non_translation_element_is_rejected_by_certificate() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    // x2 -> -x2 is a valid involution of the chain but inverts W.
    let inv = qm(&[&[1, 0], &[0, -1]]);
    assert!(validate_group_element(&inst, &inv).is_empty());
    match quotient_translation(&inst, &inv) {
        Err(Error::NotATranslation(_)) => {}
        other => panic!("expected NotATranslation, got {other:?}"),
    }
}

#[test]
fn toy_translations_live_on_a_point() {
    let (inst, _) = instances::load("toy-vertical").unwrap();
    // W(X/S) is zero-dimensional: every valid element translates by zero.
    let cert = quotient_translation(&inst, &QMat::identity(2)).unwrap();
    assert_eq!(cert.vector.dim(), 0);
}

#[test]
fn certificates_compose_additively_over_random_words() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
    for name in ["i2-chain", "quadric-net"] {
        let (inst, _) = instances::load(name).unwrap();
        if inst.group_generators.is_empty() {
            continue;
        }
        let certs: Vec<QVec> = inst
            .group_generators
            .iter()
            .map(|g| quotient_translation(&inst, &g.matrix).unwrap().vector)
            .collect();
        for _ in 0..25 {
            let len = rng.gen_range(1..=4);
            let mut word = QMat::identity(inst.rank());
            let mut expected = QVec::zero(certs[0].dim());
            for _ in 0..len {
                let k = rng.gen_range(0..inst.group_generators.len());
                let invert = rng.gen_bool(0.5);
                let m = if invert {
                    inst.group_generators[k].matrix.inverse().unwrap()
                } else {
                    inst.group_generators[k].matrix.clone()
                };
                word = m.mul_mat(&word);
                let delta = if invert { certs[k].neg() } else { certs[k].clone() };
                expected = expected.add(&delta);
            }
            let cert = quotient_translation(&inst, &word).unwrap();
            assert_eq!(cert.vector, expected);
        }
    }
}

#[test]
fn orbit_reduce_is_idempotent_and_orbit_constant() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    let lattice = TranslationLattice::build(&inst).unwrap();
    let base = QVec::new(vec![parse_rational("1/2").unwrap()]);
    // Chamber-7 interior point reduces by tau^-7.
    let p = QVec::new(vec![rat_i(1), parse_rational("15/2").unwrap()]);
    let red = orbit_reduce_point(&inst, &lattice, &p, &base).unwrap();
    assert_eq!(red.exponents, vec![-7]);
    assert_eq!(
        lattice.chart.slice_coords(&red.representative).unwrap(),
        QVec::new(vec![parse_rational("1/2").unwrap()])
    );
    // Idempotence.
    let red2 = orbit_reduce_point(&inst, &lattice, &red.representative, &base).unwrap();
    assert_eq!(red2.exponents, vec![0]);
    assert_eq!(red2.representative, red.representative);
    // Orbit constancy across translates.
    for k in [-3i64, 2, 9] {
        let shifted = QVec::new(vec![
            rat_i(1),
            parse_rational(&format!("{}/2", 15 + 2 * k)).unwrap(),
        ]);
        let red_k = orbit_reduce_point(&inst, &lattice, &shifted, &base).unwrap();
        assert_eq!(red_k.representative, red.representative);
    }
}

#[test]
fn point_already_in_cell_reduces_trivially() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    let lattice = TranslationLattice::build(&inst).unwrap();
    let base = QVec::new(vec![parse_rational("1/2").unwrap()]);
    let p = QVec::new(vec![rat_i(2), rat_i(1)]);
    let red = orbit_reduce_point(&inst, &lattice, &p, &base).unwrap();
    assert_eq!(red.exponents, vec![0]);
    assert_eq!(red.representative, p);
}

#[test]
fn fundamental_domain_chamber_zero_passes() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    let pi = build_dual_pair(
        ConeInput::Generators(vec![qv(&[1, 0]), qv(&[1, 1])]),
        2,
    )
    .unwrap();
    let report = fundamental_domain_check(&inst, &pi, 200, 5, 7).unwrap();
    assert_eq!(report.coverage_hits, 200);
    assert!(report.coverage_failures.is_empty());
    assert!(report.disjointness_violations.is_empty());
    // Words tau^{±1..±5} were all checked.
    assert_eq!(report.words_checked, 10);
    assert!(report.verdict.contains("consistent"));
}

#[test]
fn fundamental_domain_double_chamber_fails_disjointness_at_word_one() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    let pi = build_dual_pair(
        ConeInput::Generators(vec![qv(&[1, 0]), qv(&[1, 2])]),
        2,
    )
    .unwrap();
    let report = fundamental_domain_check(&inst, &pi, 50, 5, 7).unwrap();
    assert!(report.disjointness_violations.contains(&"g1".to_string()));
    assert!(report.verdict.contains("not a fundamental domain"));
}

#[test]
fn fundamental_domain_trivial_group_whole_cone() {
    let (inst, _) = instances::load("toy-vertical").unwrap();
    let pi = build_dual_pair(
        ConeInput::Generators(vec![qv(&[1, 0]), qv(&[0, 1])]),
        2,
    )
    .unwrap();
    let report = fundamental_domain_check(&inst, &pi, 100, 5, 7).unwrap();
    assert_eq!(report.coverage_hits, 100);
    assert!(report.disjointness_violations.is_empty());
}

#[test]
fn non_translation_group_falls_back_to_word_search() {
    // Adjoin the slice inversion to the i2 translation: an infinite dihedral
    // group, outside the translation-lattice machinery.
    let text = instances::I2_CHAIN.replace(
        "[[[\"1\", \"0\"], [\"1\", \"1\"]]]",
        "[[[\"1\", \"0\"], [\"1\", \"1\"]], [[\"1\", \"0\"], [\"0\", \"-1\"]]]",
    );
    let (inst, _) =
        conelab_core::varmodel::load_and_validate(&text, "i2-dihedral").unwrap();

    // Coverage and disjointness still run, flagged as budget-limited.
    // Chamber 0 is NOT a fundamental domain for the dihedral group: the
    // word tau.sigma acts by y -> 1 - y, a self-symmetry of the chamber,
    // and the exact check catches that overlap.
    let pi = build_dual_pair(
        ConeInput::Generators(vec![qv(&[1, 0]), qv(&[1, 1])]),
        2,
    )
    .unwrap();
    let report = fundamental_domain_check(&inst, &pi, 40, 4, 9).unwrap();
    assert!(report.word_budget_limited);
    assert!(report.coverage_hits > 0);
    assert!(!report.disjointness_violations.is_empty());

    // The half chamber [0, 1/2] is a genuine fundamental domain for the
    // dihedral action; no word in the budget overlaps it.
    let half = build_dual_pair(
        ConeInput::Generators(vec![qv(&[1, 0]), qv(&[2, 1])]),
        2,
    )
    .unwrap();
    let report = fundamental_domain_check(&inst, &half, 40, 4, 9).unwrap();
    assert!(report.disjointness_violations.is_empty(), "{report:?}");

    // Orbit enumeration reduces by word search and flags it.
    let result = conelab_core::chamberwalk::enumerate_up_to_group(&inst, 200, 4, 10_000).unwrap();
    assert!(result.word_budget_limited);
    assert!(!result.representatives.is_empty());
}

#[test]
fn quadric_translation_lattice_has_full_rank() {
    let (inst, _) = instances::load("quadric-net").unwrap();
    let lattice = TranslationLattice::build(&inst).unwrap();
    assert_eq!(lattice.chart.dim(), 7);
    assert_eq!(lattice.rank(), 7);
    // Closest-vector reduction round-trips on a lattice point.
    let mut target = QVec::zero(7);
    for (i, b) in lattice.basis.iter().enumerate() {
        target = target.add(&b.scale(&rat_i((i as i64 % 3) - 1)));
    }
    let (lambda, _) = lattice.closest(&target);
    assert_eq!(lambda, target);
}
