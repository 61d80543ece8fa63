//! Numerical classification of extremal-ray records and the K-trivial-face
//! and type-finiteness checks on them.
//!
//! The fine contraction types (1-5 on the classification list) are declared
//! instance data validated for numerical consistency, never inferred: the
//! lattice data cannot distinguish, say, the two quadric contractions.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactq::{QMat, QVec, Rational};
use crate::polycone::{build_dual_pair, intersect, ConeInput, PolyCone};
use crate::varmodel::{MoriType, VarietyInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum DeclaredType {
    #[serde(rename = "k_trivial")]
    KTrivial,
    #[serde(rename = "mori")]
    Mori(MoriType),
}

#[derive(Debug, Clone)]
pub struct RayRecord {
    pub curve: QVec,
    pub declared: DeclaredType,
    pub exceptional_divisor: Option<QVec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CoarseClass {
    #[serde(rename = "k_trivial")]
    KTrivial,
    #[serde(rename = "divisorial")]
    Divisorial,
    #[serde(rename = "fibre_type")]
    FibreType,
}

#[derive(Debug, Clone)]
pub struct RayVerdict {
    pub k_pairing: Rational,
    pub coarse: CoarseClass,
    pub consistent: bool,
    pub notes: Vec<String>,
}

/// Coarse class from the numerics plus a consistency verdict against the
/// declared type. Rays with K.c > 0 fall outside the dichotomy this engine
/// models and are rejected.
pub fn classify_ray(inst: &VarietyInstance, ray: &RayRecord) -> Result<RayVerdict> {
    if ray.curve.is_zero() {
        return Err(Error::input("ray curve class is zero".to_string()));
    }
    let k = inst.pair(&inst.canonical_class, &ray.curve);
    if k.is_positive() {
        return Err(Error::input(
            "not a K-negative or K-trivial ray (K.c > 0)".to_string(),
        ));
    }
    let coarse = if k.is_zero() {
        CoarseClass::KTrivial
    } else {
        match &ray.exceptional_divisor {
            Some(d) if inst.pair(d, &ray.curve).is_negative() => CoarseClass::Divisorial,
            _ => CoarseClass::FibreType,
        }
    };
    let mut notes = Vec::new();
    let consistent = match ray.declared {
        DeclaredType::KTrivial => {
            if coarse != CoarseClass::KTrivial {
                notes.push("declared K-trivial but K.c < 0".to_string());
            }
            coarse == CoarseClass::KTrivial
        }
        DeclaredType::Mori(t) => {
            let mut ok = true;
            if k.is_zero() {
                notes.push("declared a K-negative type but K.c = 0".to_string());
                ok = false;
            }
            if t.is_divisorial() {
                match &ray.exceptional_divisor {
                    None => {
                        notes.push(
                            "divisorial type declared without an exceptional divisor".to_string(),
                        );
                        ok = false;
                    }
                    Some(d) => {
                        if !inst.pair(d, &ray.curve).is_negative() {
                            notes.push("exceptional divisor pairs nonnegatively with the ray"
                                .to_string());
                            ok = false;
                        }
                    }
                }
            } else if ray.exceptional_divisor.is_some() {
                notes.push("fibre type declared with an exceptional divisor".to_string());
                ok = false;
            }
            ok
        }
    };
    Ok(RayVerdict {
        k_pairing: k,
        coarse,
        consistent,
        notes,
    })
}

#[derive(Debug, Clone)]
pub struct KTrivialFaceVerdict {
    pub face: PolyCone,
    pub relative_cone: PolyCone,
    pub equal: bool,
    pub witness: Option<QVec>,
}

/// Intersect the supplied curve cone with the hyperplane K-perp and compare
/// against the relative curve cone spanned by the fibral frame.
pub fn k_trivial_face(inst: &VarietyInstance) -> Result<KTrivialFaceVerdict> {
    let rank = inst.rank();
    let mut gens: Vec<QVec> = inst
        .fibration
        .k_negative_rays
        .iter()
        .map(|r| r.curve.clone())
        .collect();
    gens.extend(inst.seed_frame.iter().cloned());
    let curve_cone = build_dual_pair(ConeInput::Generators(gens), rank)?;
    // K as a functional on curve classes.
    let k_func = inst
        .lattice
        .pairing
        .transpose()
        .mul_vec(&inst.canonical_class);
    let k_perp = build_dual_pair(
        ConeInput::Inequalities(vec![k_func.clone(), k_func.neg()]),
        rank,
    )?;
    let face = intersect(&curve_cone, &k_perp)?;
    let relative_cone = build_dual_pair(
        ConeInput::Generators(inst.seed_frame.to_vec()),
        rank,
    )?;
    let equal = face == relative_cone;
    let witness = if equal {
        None
    } else {
        face.generators()
            .iter()
            .find(|g| !relative_cone.contains(g))
            .or_else(|| {
                relative_cone
                    .generators()
                    .iter()
                    .find(|g| !face.contains(g))
            })
            .cloned()
    };
    Ok(KTrivialFaceVerdict {
        face,
        relative_cone,
        equal,
        witness,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TypeFinitenessReport {
    pub records: usize,
    /// Pairs (i, j) of records violating the mutual-disjointness identity
    /// D_i.c_j = D_j.c_i = 0, or sharing a divisor class.
    pub flagged_pairs: Vec<(usize, usize)>,
    pub independent_rank: usize,
    pub rank_bound: usize,
    pub rank_bound_exceeded: bool,
}

/// Pairwise numerical disjointness of the exceptional divisors of the
/// declared type 2-5 contractions, plus the linear-independence count bound.
pub fn type_finiteness_check(
    inst: &VarietyInstance,
    records: &[RayRecord],
) -> Result<TypeFinitenessReport> {
    for (i, r) in records.iter().enumerate() {
        if r.exceptional_divisor.is_none() {
            return Err(Error::input(format!(
                "record {} has no exceptional divisor",
                i + 1
            )));
        }
    }
    let mut flagged = Vec::new();
    for i in 0..records.len() {
        for j in (i + 1)..records.len() {
            let di = records[i].exceptional_divisor.as_ref().unwrap();
            let dj = records[j].exceptional_divisor.as_ref().unwrap();
            let shared = di.primitive() == dj.primitive();
            let cross = !inst.pair(di, &records[j].curve).is_zero()
                || !inst.pair(dj, &records[i].curve).is_zero();
            if shared || cross {
                flagged.push((i, j));
            }
        }
    }
    let rows: Vec<QVec> = records
        .iter()
        .map(|r| r.exceptional_divisor.clone().unwrap())
        .collect();
    let independent_rank = if rows.is_empty() {
        0
    } else {
        QMat::new(rows, inst.rank())?.rank()
    };
    let rank_bound = inst.rank() - 1;
    Ok(TypeFinitenessReport {
        records: records.len(),
        flagged_pairs: flagged,
        independent_rank,
        rank_bound,
        rank_bound_exceeded: independent_rank > rank_bound,
    })
}

/// Build ray records from the instance's listed K-negative rays.
pub fn records_from_instance(inst: &VarietyInstance) -> Vec<RayRecord> {
    inst.fibration
        .k_negative_rays
        .iter()
        .map(|r| RayRecord {
            curve: r.curve.clone(),
            declared: DeclaredType::Mori(r.mori_type),
            exceptional_divisor: r.exceptional_divisor.clone(),
        })
        .collect()
}
