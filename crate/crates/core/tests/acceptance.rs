//! Acceptance suite: the ten verifiable claims of this engine, one test per
//! criterion, each printing a pass/fail line. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use conelab_core::chamberwalk::{
    enumerate_chambers, enumerate_up_to_group, make_nef, movable_precheck, Chamber,
    DEFAULT_CHAMBER_GUARD, DEFAULT_FLOP_GUARD,
};
use conelab_core::conestruct::{
    build_k, build_u, effective_membership, pullback_witness, relative_effective_predicate,
    relative_movable_cone, verify_u_translates, EffectivePiece, PullbackOutcome, SlicePolytope,
    DEFAULT_LIFT_M, DEFAULT_LIFT_NU,
};
use conelab_core::exactq::{parse_rational, rat_i, QVec, Rational};
use conelab_core::groupact::{fundamental_domain_check, quotient_translation, TranslationLattice};
use conelab_core::instances;
use conelab_core::polycone::{build_dual_pair, dual, ConeInput, MembershipMode};
use conelab_core::rayclass::{k_trivial_face, records_from_instance, type_finiteness_check};
use conelab_core::varmodel::load_and_validate;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn qv(e: &[i64]) -> QVec {
    QVec::from_i64(e)
}

fn pass(n: usize, what: &str) {
    println!("criterion {n}: PASS — {what}");
}

#[test]
fn criterion_01_duality_round_trip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let dim = rng.gen_range(2..=5);
        let count = rng.gen_range(1..=10);
        let gens: Vec<QVec> = (0..count)
            .map(|_| {
                QVec::from_i64(
                    &(0..dim)
                        .map(|_| rng.gen_range(-9i64..=9))
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let cone = build_dual_pair(ConeInput::Generators(gens), dim).unwrap();
        let round = dual(&dual(&cone).unwrap()).unwrap();
        assert_eq!(round, cone, "case {case}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    pass(1, &format!("200 random cones dual-dual exact in {elapsed:?}"));
}

#[test]
fn criterion_02_toy_relative_cones_and_grid_oracle() {
    let (inst, _) = instances::load("toy-vertical").unwrap();
    let movable = relative_movable_cone(&inst).unwrap();
    assert_eq!(movable.base.inequalities(), &[qv(&[0, 1]), qv(&[1, 0])]);
    assert_eq!(movable.strict_functionals, vec![qv(&[1, 1])]);

    let pred = relative_effective_predicate(&inst).unwrap();
    let step = parse_rational("1/10").unwrap();
    let mut mismatches = 0usize;
    for i in 0..=40 {
        for j in 0..=40 {
            let x = QVec::new(vec![
                rat_i(-2) + rat_i(i) * &step,
                rat_i(-2) + rat_i(j) * &step,
            ]);
            // Independent evaluation of the three-piece union.
            let f_val = x.get(0) + x.get(1);
            let on_ray_line = f_val.is_zero(); // R+{(-1,1),(1,-1)} is x1 + x2 = 0
            let expected = if x.is_zero() {
                Some(EffectivePiece::Zero)
            } else if f_val.is_positive() {
                Some(EffectivePiece::Strict)
            } else if on_ray_line {
                Some(EffectivePiece::Ray)
            } else {
                None
            };
            if effective_membership(&pred, &x) != expected {
                mismatches += 1;
            }
        }
    }
    assert_eq!(mismatches, 0);
    pass(2, "toy-vertical cones match the formula and 41x41 grid oracle (0 mismatches)");
}

#[test]
fn criterion_03_negativity_dichotomy() {
    let (inst, _) = instances::load("toy-vertical").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let r: Vec<Rational> = (0..2)
            .map(|_| {
                Rational::new(
                    rng.gen_range(-20i64..=20).into(),
                    rng.gen_range(1i64..=6).into(),
                )
            })
            .collect();
        // Direct linear solve oracle: x = sum r_i D_i has pairings
        // (r2 - r1, r1 - r2); nonnegative iff r1 == r2, and then zero.
        let expect_witness = r[0] == r[1];
        match pullback_witness(&inst, &r).unwrap() {
            PullbackOutcome::Witness { lambdas } => {
                assert!(expect_witness);
                assert_eq!(lambdas, vec![r[0].clone()]);
                let x = inst.fibration.vertical_divisors[0]
                    .scale(&r[0])
                    .add(&inst.fibration.vertical_divisors[1].scale(&r[1]));
                for fj in &inst.fibration.fibral_classes {
                    assert!(inst.pair(&x, fj).is_zero());
                }
            }
            PullbackOutcome::Violation { .. } => assert!(!expect_witness),
        }
    }
    pass(3, "pullback dichotomy exact on 500 random coefficient vectors");
}

#[test]
fn criterion_04_make_nef_paths() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    for (q, expected) in [("1/2", 0usize), ("3/2", 1), ("7/2", 3), ("99/2", 49)] {
        let d = QVec::new(vec![rat_i(1), parse_rational(q).unwrap()]);
        let (ch, path) = make_nef(&inst, &d, DEFAULT_FLOP_GUARD).unwrap();
        assert_eq!(path.len(), expected, "q = {q}");
        assert!(ch.nef_cone(&inst).unwrap().contains(&d));
    }
    pass(4, "make-nef path lengths {0,1,3,49} with closed membership, guard untouched");
}

#[test]
fn criterion_05_local_finiteness() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    let sigma = build_dual_pair(ConeInput::Generators(vec![qv(&[1, 0]), qv(&[1, 5])]), 2).unwrap();
    let start = Instant::now();
    let chambers =
        enumerate_chambers(&inst, &sigma, DEFAULT_CHAMBER_GUARD, DEFAULT_FLOP_GUARD).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(chambers.len(), 5);
    for i in 0..chambers.len() {
        for j in (i + 1)..chambers.len() {
            let a = chambers[i].nef_cone(&inst).unwrap();
            let b = chambers[j].nef_cone(&inst).unwrap();
            let inter = conelab_core::polycone::intersect(&a, &b).unwrap();
            assert!(inter.dim() <= 1, "chambers {i},{j} overlap");
        }
    }
    assert!(elapsed.as_millis() < 1000, "took {elapsed:?}");
    pass(5, &format!("exactly 5 pairwise-disjoint chambers in {elapsed:?}"));
}

#[test]
fn criterion_06_group_quotient() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    let result = enumerate_up_to_group(&inst, 1000, 5, DEFAULT_FLOP_GUARD).unwrap();
    assert!(result.complete);
    assert_eq!(result.representatives.len(), 1);

    let text = instances::I2_CHAIN.replace(
        "[[[\"1\", \"0\"], [\"1\", \"1\"]]]",
        "[[[\"1\", \"0\"], [\"2\", \"1\"]]]",
    );
    let (by_two, _) = load_and_validate(&text, "i2-by-2").unwrap();
    let result2 = enumerate_up_to_group(&by_two, 1000, 5, DEFAULT_FLOP_GUARD).unwrap();
    assert!(result2.complete);
    assert_eq!(result2.representatives.len(), 2);
    pass(6, "orbit counts 1 (translation) and 2 (translation-by-two), complete frontiers");
}

#[test]
fn criterion_07_translation_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut words_checked = 0usize;
    for name in instances::NAMES {
        let (inst, _) = instances::load(name).unwrap();
        let mut certs = Vec::new();
        for g in &inst.group_generators {
            // quotient_translation asserts the identity linear part.
            certs.push(quotient_translation(&inst, &g.matrix).unwrap().vector);
        }
        if inst.group_generators.is_empty() {
            continue;
        }
        while words_checked < 50 {
            let len = rng.gen_range(1..=4);
            let mut word = conelab_core::exactq::QMat::identity(inst.rank());
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
            assert_eq!(quotient_translation(&inst, &word).unwrap().vector, expected);
            words_checked += 1;
            if words_checked % 25 == 0 {
                break; // split the budget across the instances with groups
            }
        }
    }
    assert!(words_checked >= 50);
    pass(7, "all bundled generators are W-translations; vectors additive over 50 words");
}

#[test]
fn criterion_08_cone_u_on_i2() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    let lattice = TranslationLattice::build(&inst).unwrap();
    let center = QVec::new(vec![parse_rational("1/2").unwrap()]);
    let pi = SlicePolytope::dirichlet(&lattice, &center).unwrap();
    let k = build_k(&inst, &pi).unwrap();
    let u = build_u(
        &inst,
        &k,
        DEFAULT_LIFT_M,
        DEFAULT_LIFT_NU,
        DEFAULT_CHAMBER_GUARD,
        DEFAULT_FLOP_GUARD,
    )
    .unwrap();
    assert_eq!(u.chambers.len(), 1, "U meets exactly one chamber");

    let mut targets = Vec::new();
    for kk in 0..=10i64 {
        let d = QVec::new(vec![rat_i(2), rat_i(2 * kk + 1)]);
        let (ch, _) = make_nef(&inst, &d, DEFAULT_FLOP_GUARD).unwrap();
        targets.push(ch);
    }
    let witnesses = verify_u_translates(&inst, &u.u, &targets).unwrap();
    for (kk, w) in witnesses.iter().enumerate() {
        assert!(w.found, "no witness for chamber {kk}");
    }
    pass(8, "U covers one chamber; translates reach the interiors of chambers 0..10");
}

#[test]
fn criterion_09_quadric_net() {
    let (inst, summary) = instances::load("quadric-net").unwrap();
    assert_eq!(summary.reducible_fibre_pairs, 28);

    let face = k_trivial_face(&inst).unwrap();
    assert!(face.equal, "K-trivial face mismatch: {:?}", face.witness);

    let records: Vec<_> = records_from_instance(&inst)
        .into_iter()
        .filter(|r| r.exceptional_divisor.is_some())
        .collect();
    assert_eq!(records.len(), 8);
    let report = type_finiteness_check(&inst, &records).unwrap();
    assert!(report.flagged_pairs.is_empty());
    assert!(!report.rank_bound_exceeded);

    let tau = qv(&[2, -1, -1, -1, -1, -1, -1, -1, -1]);
    assert!(movable_precheck(&inst, &tau).0);
    assert!(!movable_precheck(&inst, &qv(&[-1, 0, 0, 0, 0, 0, 0, 0, 0])).0);

    let sigma_rays: Vec<QVec> = inst.metadata["bundled_sigma"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            QVec::new(
                r.as_array()
                    .unwrap()
                    .iter()
                    .map(|s| parse_rational(s.as_str().unwrap()).unwrap())
                    .collect(),
            )
        })
        .collect();
    let projected: Vec<QVec> = sigma_rays.iter().map(|r| inst.project_divisor(r)).collect();
    let sigma = build_dual_pair(ConeInput::Generators(projected), inst.quotient_dim()).unwrap();
    let first =
        enumerate_chambers(&inst, &sigma, DEFAULT_CHAMBER_GUARD, DEFAULT_FLOP_GUARD).unwrap();
    let second =
        enumerate_chambers(&inst, &sigma, DEFAULT_CHAMBER_GUARD, DEFAULT_FLOP_GUARD).unwrap();
    assert!(!first.is_empty());
    assert_eq!(first.len(), second.len());
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(a.frame(), b.frame());
    }
    pass(
        9,
        &format!(
            "quadric-net: 28 reducible fibres, K-trivial face equal, 8 divisors disjoint, precheck split, {} chamber(s) stable",
            first.len()
        ),
    );
}

#[test]
fn criterion_10_fundamental_domain_predicates() {
    let (inst, _) = instances::load("i2-chain").unwrap();
    let chamber0 = Chamber::seed(&inst).nef_cone(&inst).unwrap();
    let report = fundamental_domain_check(&inst, &chamber0, 1000, 5, 11).unwrap();
    assert_eq!(report.coverage_hits, 1000);
    assert!(report.coverage_failures.is_empty());
    assert!(report.disjointness_violations.is_empty());

    let broken = build_dual_pair(ConeInput::Generators(vec![qv(&[1, 0]), qv(&[1, 2])]), 2).unwrap();
    let broken_report = fundamental_domain_check(&inst, &broken, 100, 5, 11).unwrap();
    // The length-one word already overlaps the doubled chamber.
    assert!(broken_report.disjointness_violations.contains(&"g1".to_string()));
    pass(10, "chamber-0 closure: 1000/1000 coverage, disjoint to budget 5; doubled domain fails at word length 1");
}
