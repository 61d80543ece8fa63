//! Wall crossings, the make-nef walk, chamber enumeration inside big
//! subcones, and quotient enumeration up to a group.
//!
//! A chamber is a marked nef cone: the frame of fibral curve classes dual to
//! its walls, in fixed curve coordinates, together with the crossing path
//! from the seed. Crossing a wall applies the instance's flop rule,
//! conjugated along the path, to every frame class; the rule map sends the
//! crossed class to its negative and fixes the fibre class, so frame
//! decompositions of F are preserved.

use std::collections::{HashSet, VecDeque};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::exactq::{QMat, QVec, Rational};
use crate::groupact::{self, TranslationLattice};
use crate::polycone::{build_dual_pair, meets_interior_with, ConeInput, PolyCone};
use crate::varmodel::{KNegativeRay, VarietyInstance};

pub const DEFAULT_FLOP_GUARD: usize = 10_000;
pub const DEFAULT_CHAMBER_GUARD: usize = 100_000;

/// A marked nef chamber.
#[derive(Debug, Clone)]
pub struct Chamber {
    /// Wall frame: fibral curve classes, primitive, sorted (the canonical
    /// chamber identity).
    frame: Vec<QVec>,
    /// Wall classes crossed from the seed, in crossing order.
    path: Vec<QVec>,
    /// Composite frame transport from the seed frame.
    transport: QMat,
    transport_inv: QMat,
}

/// One wall crossing: the crossed class and the curve-class involution. The
/// divisor-side identification of a flop is the identity, so no divisor
/// action is stored.
#[derive(Debug, Clone)]
pub struct FlopStep {
    pub wall_class: QVec,
    pub map_on_curves: QMat,
}

impl Chamber {
    pub fn seed(inst: &VarietyInstance) -> Chamber {
        let mut frame: Vec<QVec> = inst.seed_frame.iter().map(QVec::primitive).collect();
        frame.sort();
        let rank = inst.rank();
        Chamber {
            frame,
            path: Vec::new(),
            transport: QMat::identity(rank),
            transport_inv: QMat::identity(rank),
        }
    }

    pub fn frame(&self) -> &[QVec] {
        &self.frame
    }

    pub fn path_from_seed(&self) -> &[QVec] {
        &self.path
    }

    pub fn transport(&self) -> &QMat {
        &self.transport
    }

    /// Canonical identity: the sorted primitive frame.
    pub fn identity(&self) -> &[QVec] {
        &self.frame
    }

    /// Nef cone in quotient coordinates: frame functionals plus the ambient
    /// movable constraints.
    pub fn nef_cone(&self, inst: &VarietyInstance) -> Result<PolyCone> {
        build_dual_pair(
            ConeInput::Inequalities(chamber_inequalities(inst, self)?),
            inst.quotient_dim(),
        )
    }

    /// Apply a validated group element's dual action to the frame (the image
    /// chamber under the group action).
    pub fn translate(&self, dual_on_curves: &QMat) -> Chamber {
        let mut frame: Vec<QVec> = self
            .frame
            .iter()
            .map(|g| dual_on_curves.mul_vec(g).primitive())
            .collect();
        frame.sort();
        Chamber {
            frame,
            path: self.path.clone(),
            transport: dual_on_curves.mul_mat(&self.transport),
            transport_inv: self
                .transport_inv
                .mul_mat(&dual_on_curves.inverse().expect("unimodular dual action")),
        }
    }
}

/// Raw inequality list of a chamber's nef cone (frame functionals plus the
/// ambient movable constraints), unminimized.
fn chamber_inequalities(inst: &VarietyInstance, ch: &Chamber) -> Result<Vec<QVec>> {
    let mut ineqs: Vec<QVec> = Vec::with_capacity(ch.frame.len());
    for g in &ch.frame {
        ineqs.push(inst.curve_functional(g)?);
    }
    for fc in &inst.fibration.fibral_classes {
        ineqs.push(inst.curve_functional(fc)?);
    }
    Ok(ineqs)
}

/// The curve-class map for crossing `wall` from `ch`: the instance rule on
/// the wall pulled back to seed coordinates, conjugated by the transport.
pub fn flop_step(inst: &VarietyInstance, ch: &Chamber, wall: &QVec) -> Result<FlopStep> {
    let wall = wall.primitive();
    let wall_seed = ch.transport_inv.mul_vec(&wall).primitive();
    let base = inst.flop_rule.map_for_wall(&wall_seed)?;
    let map = ch.transport.mul_mat(&base).mul_mat(&ch.transport_inv);
    Ok(FlopStep {
        wall_class: wall,
        map_on_curves: map,
    })
}

/// Cross a wall of the chamber. The wall must be a frame class whose
/// hyperplane is a facet of the nef cone; divisorial walls (the F_i, pulled
/// back along the path) bound the movable cone and cannot be crossed.
pub fn cross_wall(inst: &VarietyInstance, ch: &Chamber, wall: &QVec) -> Result<Chamber> {
    let cone = ch.nef_cone(inst)?;
    cross_wall_with_cone(inst, ch, wall, &cone)
}

/// As [`cross_wall`] with the chamber's nef cone already computed (the
/// enumeration loops reuse one cone for all walls of a chamber).
fn cross_wall_with_cone(
    inst: &VarietyInstance,
    ch: &Chamber,
    wall: &QVec,
    cone: &PolyCone,
) -> Result<Chamber> {
    let wall = wall.primitive();
    if !ch.frame.contains(&wall) {
        return Err(Error::input(format!(
            "wall {:?} is not a frame class of the chamber",
            wall.to_strings()
        )));
    }
    let wall_seed = ch.transport_inv.mul_vec(&wall).primitive();
    if inst.is_divisorial_wall(&wall_seed) {
        return Err(Error::BoundaryWall(format!("{:?}", wall.to_strings())));
    }
    let wall_func = inst.curve_functional(&wall)?.primitive();
    if !cone.inequalities().contains(&wall_func) {
        return Err(Error::NotAFacet(format!("{:?}", wall.to_strings())));
    }
    let step = flop_step(inst, ch, &wall)?;
    let mut frame: Vec<QVec> = ch
        .frame
        .iter()
        .map(|g| step.map_on_curves.mul_vec(g).primitive())
        .collect();
    frame.sort();
    debug_assert!(frame.contains(&wall.neg()));
    let mut path = ch.path.clone();
    path.push(wall.clone());
    Ok(Chamber {
        frame,
        path,
        transport: step.map_on_curves.mul_mat(&ch.transport),
        transport_inv: ch.transport_inv.mul_mat(&step.map_on_curves),
    })
}

/// Movability precheck: a movable class pairs nonnegatively with every listed
/// K-negative extremal ray. Vacuously true when no rays are listed.
pub fn movable_precheck<'a>(
    inst: &'a VarietyInstance,
    divisor: &QVec,
) -> (bool, Option<&'a KNegativeRay>) {
    for ray in &inst.fibration.k_negative_rays {
        if inst.pair(divisor, &ray.curve).is_negative() {
            return (false, Some(ray));
        }
    }
    (true, None)
}

/// Walk from the seed chamber to a chamber whose closed nef cone contains
/// the quotient-space point, crossing at each step the lexicographically
/// smallest frame class the point is negative on. Zero-pairings are never
/// crossed, so points on walls settle on the seed-path side.
///
/// No facet test is needed along the way: a redundant frame inequality is a
/// nonnegative combination of the facet inequalities, so a class the point
/// pairs negatively with is automatically a facet.
fn walk_to(inst: &VarietyInstance, x_quot: &QVec, guard: usize) -> Result<Chamber> {
    let psi = inst.pairing_functional(x_quot);
    let mut ch = Chamber::seed(inst);
    for _ in 0..guard {
        let mut worst: Option<&QVec> = None;
        for g in &ch.frame {
            if psi.dot(g).is_negative() && worst.is_none_or(|w| g < w) {
                worst = Some(g);
            }
        }
        match worst {
            None => return Ok(ch),
            Some(wall) => {
                let wall = wall.clone();
                let wall_seed = ch.transport_inv.mul_vec(&wall).primitive();
                if inst.is_divisorial_wall(&wall_seed) {
                    return Err(Error::BoundaryWall(format!("{:?}", wall.to_strings())));
                }
                let step = flop_step(inst, &ch, &wall)?;
                let mut frame: Vec<QVec> = ch
                    .frame
                    .iter()
                    .map(|g| step.map_on_curves.mul_vec(g).primitive())
                    .collect();
                frame.sort();
                let mut path = ch.path;
                path.push(wall);
                ch = Chamber {
                    frame,
                    path,
                    transport: step.map_on_curves.mul_mat(&ch.transport),
                    transport_inv: ch.transport_inv.mul_mat(&step.map_on_curves),
                };
            }
        }
    }
    Err(Error::GuardTripped {
        guard: "flop",
        limit: guard,
    })
}

/// Make-nef: flop until the divisor class lies in the closed nef cone of a
/// chamber, returning the chamber and the crossing path.
pub fn make_nef(inst: &VarietyInstance, divisor: &QVec, guard: usize) -> Result<(Chamber, Vec<QVec>)> {
    let (ok, witness) = movable_precheck(inst, divisor);
    if !ok {
        return Err(Error::input(format!(
            "movability precheck failed: negative on listed K-negative ray {:?}",
            witness.map(|r| r.curve.to_strings()).unwrap_or_default()
        )));
    }
    let x = inst.project_divisor(divisor);
    let f_val = inst.f_functional().dot(&x);
    if !f_val.is_positive() {
        return Err(Error::input(
            "divisor is outside the relative movable cone (x.F <= 0)".to_string(),
        ));
    }
    for fc in &inst.fibration.fibral_classes {
        if inst.curve_functional(fc)?.dot(&x).is_negative() {
            return Err(Error::input(
                "divisor is outside the relative movable cone (negative on a divisorial wall)"
                    .to_string(),
            ));
        }
    }
    let ch = walk_to(inst, &x, guard)?;
    let path = ch.path.clone();
    Ok((ch, path))
}

/// Breadth-first chamber enumeration inside a big subcone `sigma` (quotient
/// coordinates). A chamber is reported when `sigma` meets its interior;
/// chambers touching `sigma` only along proper faces are crossed but not
/// reported. Finiteness holds for data arising from genuine geometry and is
/// guarded by `cap` regardless.
pub fn enumerate_chambers(
    inst: &VarietyInstance,
    sigma: &PolyCone,
    cap: usize,
    flop_guard: usize,
) -> Result<Vec<Chamber>> {
    if sigma.ambient_dim() != inst.quotient_dim() {
        return Err(Error::input(format!(
            "sigma has ambient dim {}, expected quotient dim {}",
            sigma.ambient_dim(),
            inst.quotient_dim()
        )));
    }
    let f = inst.f_functional();
    if !sigma.lineality().is_empty() {
        return Err(Error::input(
            "sigma must lie in the open big region {x.F > 0} plus the origin".to_string(),
        ));
    }
    for g in sigma.generators() {
        if !f.dot(g).is_positive() {
            return Err(Error::input(
                "sigma generator violates the big-cone surrogate x.F > 0".to_string(),
            ));
        }
    }
    if sigma.is_trivial() {
        return Ok(Vec::new());
    }

    // Start at a chamber meeting sigma: walk the generator sum inward.
    let probe = sigma.relative_interior_point();
    let start = walk_to(inst, &probe, flop_guard)?;

    let mut visited: HashSet<Vec<QVec>> = HashSet::new();
    let mut queue: VecDeque<Chamber> = VecDeque::new();
    let mut reported: Vec<Chamber> = Vec::new();
    visited.insert(start.frame.clone());
    queue.push_back(start);

    let sigma_h = sigma.inequalities_with_equalities();
    let start_frame = queue.front().map(|c| c.frame.clone());
    while let Some(ch) = queue.pop_front() {
        if visited.len() > cap {
            return Err(Error::GuardTripped {
                guard: "chamber",
                limit: cap,
            });
        }
        // The sigma inequalities go first: the probe cone is thin, so the
        // intermediate ray sets stay small before the chamber walls arrive.
        let mut hs = sigma_h.clone();
        hs.extend(chamber_inequalities(inst, &ch)?);
        let (inter_rays, inter_lin) =
            crate::polycone::v_rep_from_inequalities(inst.quotient_dim(), &hs);
        if inter_rays.is_empty() && inter_lin.is_empty() {
            continue;
        }
        let mut span = inter_rays;
        span.extend(inter_lin);
        let cone = ch.nef_cone(inst)?;
        let counted = meets_interior_with(&cone, &span);
        if counted {
            reported.push(ch.clone());
        }
        // Chambers meeting sigma's points only along proper faces need no
        // expansion: any two chambers whose interiors meet the convex sigma
        // are wall-connected through chambers of the same kind (walk a
        // generic segment between interior points). The start chamber is
        // expanded unconditionally so a boundary start cannot strand the
        // search.
        if !counted && Some(&ch.frame) != start_frame.as_ref() {
            continue;
        }
        for wall in ch.frame.clone() {
            let wall_seed = ch.transport_inv.mul_vec(&wall).primitive();
            if inst.is_divisorial_wall(&wall_seed) {
                continue;
            }
            let wall_func = inst.curve_functional(&wall)?.primitive();
            if !cone.inequalities().contains(&wall_func) {
                continue;
            }
            let next = cross_wall_with_cone(inst, &ch, &wall, &cone)?;
            if visited.insert(next.frame.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(reported)
}

/// Result of the orbit enumeration.
#[derive(Debug, Clone)]
pub struct OrbitEnumeration {
    pub representatives: Vec<Chamber>,
    /// For every visited chamber: its frame, the index of its orbit
    /// representative, and the exponents of the reducing element over the
    /// instance generators (empty in the general word-search case).
    pub assignments: Vec<(Vec<QVec>, usize, Vec<i64>)>,
    pub complete: bool,
    /// Set when canonicalization fell back to budgeted word search because
    /// the group has non-translation elements; orbits may then be
    /// under-merged and the representative count is an upper bound.
    pub word_budget_limited: bool,
}

/// Enumerate chambers up to the instance group: breadth-first crossing with
/// each new chamber canonicalized to an orbit representative. Translation
/// subgroups reduce exactly through the lattice; otherwise the
/// canonical form is the minimum over group words up to `word_budget`,
/// flagged as possibly incomplete. Terminates when the frontier is exhausted
/// modulo the group, or reports a partial result when the budget is hit.
pub fn enumerate_up_to_group(
    inst: &VarietyInstance,
    budget: usize,
    word_budget: usize,
    flop_guard: usize,
) -> Result<OrbitEnumeration> {
    let lattice = match TranslationLattice::build(inst) {
        Ok(l) => Some(l),
        Err(Error::NotATranslation(_)) => None,
        Err(e) => return Err(e),
    };
    let seed = Chamber::seed(inst);
    let word_budget_limited = lattice.is_none();
    let base = match &lattice {
        Some(l) if l.rank() > 0 => Some(chamber_slice_point(inst, l, &seed)?),
        _ => None,
    };
    // Dual actions of the word ball, for the general fallback.
    let word_duals: Vec<QMat> = if lattice.is_none() {
        let mut duals = vec![QMat::identity(inst.rank())];
        for (_, w) in groupact::group_words(inst, word_budget) {
            duals.push(groupact::dual_action(inst, &w)?);
        }
        duals
    } else {
        Vec::new()
    };

    let reduce = |ch: &Chamber| -> Result<(Chamber, Vec<i64>)> {
        match (&lattice, &base) {
            (Some(lattice), Some(base)) => {
                let y = chamber_slice_point(inst, lattice, ch)?;
                let (_, exps) = lattice.closest(&y.sub(base));
                let neg: Vec<i64> = exps.iter().map(|e| -e).collect();
                let g = lattice.element_for_exponents(inst, &neg);
                let dual = groupact::dual_action(inst, &g)?;
                Ok((ch.translate(&dual), neg))
            }
            (Some(_), None) => Ok((ch.clone(), vec![0; inst.group_generators.len()])),
            (None, _) => {
                // Minimize the canonical frame over the word ball.
                let mut best = ch.clone();
                for dual in &word_duals {
                    let cand = ch.translate(dual);
                    if cand.frame < best.frame {
                        best = cand;
                    }
                }
                Ok((best, Vec::new()))
            }
        }
    };

    let (seed_rep, _) = reduce(&seed)?;
    let mut reps: Vec<Chamber> = vec![seed_rep.clone()];
    let mut rep_index: Vec<(Vec<QVec>, usize)> = vec![(seed_rep.frame.clone(), 0)];
    let mut assignments: Vec<(Vec<QVec>, usize, Vec<i64>)> = Vec::new();
    let mut queue: VecDeque<Chamber> = VecDeque::new();
    queue.push_back(seed_rep);
    let mut complete = true;
    let mut expansions = 0usize;

    while let Some(ch) = queue.pop_front() {
        if expansions >= budget {
            // Open frontier, budget spent: the result is partial.
            complete = false;
            break;
        }
        expansions += 1;
        let cone = ch.nef_cone(inst)?;
        for wall in ch.frame.clone() {
            let wall_seed = ch.transport_inv.mul_vec(&wall).primitive();
            if inst.is_divisorial_wall(&wall_seed) {
                continue;
            }
            let wall_func = inst.curve_functional(&wall)?.primitive();
            if !cone.inequalities().contains(&wall_func) {
                continue;
            }
            let next = cross_wall_with_cone(inst, &ch, &wall, &cone)?;
            let (next_rep, exps) = reduce(&next)?;
            let known = rep_index.iter().find(|(f, _)| *f == next_rep.frame);
            match known {
                Some((_, idx)) => assignments.push((next.frame.clone(), *idx, exps)),
                None => {
                    let idx = reps.len();
                    rep_index.push((next_rep.frame.clone(), idx));
                    assignments.push((next.frame.clone(), idx, exps));
                    reps.push(next_rep.clone());
                    queue.push_back(next_rep);
                }
            }
        }
        let _ = flop_guard;
    }
    Ok(OrbitEnumeration {
        representatives: reps,
        assignments,
        complete,
        word_budget_limited,
    })
}

/// Slice coordinates of a chamber's interior representative point.
pub fn chamber_slice_point(
    inst: &VarietyInstance,
    lattice: &TranslationLattice,
    ch: &Chamber,
) -> Result<QVec> {
    let cone = ch.nef_cone(inst)?;
    let p = cone.relative_interior_point();
    if p.is_zero() {
        return Err(Error::input("chamber cone has no interior point".to_string()));
    }
    lattice.chart.slice_coords(&p)
}

/// Every distinct pair of enumerated chambers has interiors meeting nowhere:
/// their intersection is a cone of strictly smaller dimension.
pub fn pairwise_interior_disjoint(inst: &VarietyInstance, chambers: &[Chamber]) -> Result<bool> {
    for i in 0..chambers.len() {
        for j in (i + 1)..chambers.len() {
            let a = chambers[i].nef_cone(inst)?;
            let b = chambers[j].nef_cone(inst)?;
            let inter = crate::polycone::intersect(&a, &b)?;
            if inter.dim() >= a.ambient_dim() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Frame consistency: per-partition sums with multiplicities still equal F.
/// For instances without vertical divisors this checks the frame pair
/// decompositions instead.
pub fn frame_sums_to_fibre(inst: &VarietyInstance, ch: &Chamber) -> bool {
    let f = &inst.fibration.fibre_class;
    if inst.fibration.partition.is_empty() {
        return crate::varmodel::reducible_fibre_pairs(&ch.frame, f)
            == crate::varmodel::reducible_fibre_pairs(&inst.seed_frame, f);
    }
    // Partition members index the F_i; their transported images must sum to F.
    inst.fibration.partition.iter().all(|member| {
        let mut sum = QVec::zero(inst.rank());
        for &i in member {
            let img = ch
                .transport
                .mul_vec(&inst.fibration.fibral_classes[i]);
            sum = sum.add(&img.scale(&Rational::from_integer(
                inst.fibration.multiplicities[i].into(),
            )));
        }
        sum == *f
    })
}
