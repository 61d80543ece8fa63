//! The relative movable and effective cones, the negativity-lemma pullback
//! test, lifting to the absolute movable cone, and the cones K and U.

use num_traits::{One, Signed, Zero};

use crate::chamberwalk::{self, Chamber};
use crate::error::{Error, Result};
use crate::exactq::{solve_linear, QMat, QVec, Rational};
use crate::groupact::{SliceChart, TranslationLattice};
use crate::polycone::{
    build_dual_pair, full_space, ConeInput, ConeWithOpenFaces, PolyCone,
};
use crate::varmodel::VarietyInstance;

/// The relative effective cone `{x.F > 0} ∪ R+{[D_i]} ∪ {0}`: a union of
/// pieces, never a single convex cone.
#[derive(Debug, Clone)]
pub struct RelativeEffectivePredicate {
    pub strict_piece: ConeWithOpenFaces,
    pub ray_piece: PolyCone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum EffectivePiece {
    #[serde(rename = "strict")]
    Strict,
    #[serde(rename = "ray")]
    Ray,
    #[serde(rename = "zero")]
    Zero,
}

/// The relative movable cone `{x.F > 0, x.F_i >= 0}` in quotient
/// coordinates, with the origin handled by the explicit union at callers.
pub fn relative_movable_cone(inst: &VarietyInstance) -> Result<ConeWithOpenFaces> {
    Ok(ConeWithOpenFaces::new(
        inst.relative_movable_base()?,
        vec![inst.f_functional()],
    ))
}

pub fn relative_effective_predicate(inst: &VarietyInstance) -> Result<RelativeEffectivePredicate> {
    let q = inst.quotient_dim();
    let strict_piece = ConeWithOpenFaces::new(full_space(q), vec![inst.f_functional()]);
    let d_images: Vec<QVec> = inst
        .fibration
        .vertical_divisors
        .iter()
        .map(|d| inst.project_divisor(d))
        .collect();
    let ray_piece = build_dual_pair(ConeInput::Generators(d_images), q)?;
    Ok(RelativeEffectivePredicate {
        strict_piece,
        ray_piece,
    })
}

/// Membership in the three-piece union, tagged with the piece that matched.
pub fn effective_membership(
    pred: &RelativeEffectivePredicate,
    x: &QVec,
) -> Option<EffectivePiece> {
    if x.is_zero() {
        return Some(EffectivePiece::Zero);
    }
    if pred
        .strict_piece
        .membership(x, crate::polycone::MembershipMode::Closed)
    {
        return Some(EffectivePiece::Strict);
    }
    if pred.ray_piece.contains(x) {
        return Some(EffectivePiece::Ray);
    }
    None
}

/// Outcome of the negativity-lemma dichotomy on a sum of the exceptional
/// divisors over the base.
#[derive(Debug, Clone)]
pub enum PullbackOutcome {
    /// All F_j pairings are nonnegative; the class is a pullback, with one
    /// scalar per partition member (and all pairings vanish).
    Witness { lambdas: Vec<Rational> },
    /// Some F_j pairing is negative (0-based index into the divisor list).
    Violation { index: usize },
}

pub fn pullback_witness(inst: &VarietyInstance, coeffs: &[Rational]) -> Result<PullbackOutcome> {
    let fib = &inst.fibration;
    let n = fib.vertical_divisors.len();
    if coeffs.len() != n {
        return Err(Error::input(format!(
            "expected {n} coefficients, got {}",
            coeffs.len()
        )));
    }
    let mut x = QVec::zero(inst.rank());
    for (i, r) in coeffs.iter().enumerate() {
        x = x.add(&fib.vertical_divisors[i].scale(r));
    }
    for (j, fj) in fib.fibral_classes.iter().enumerate() {
        if inst.pair(&x, fj).is_negative() {
            return Ok(PullbackOutcome::Violation { index: j });
        }
    }
    // Nonnegative on every F_j forces proportionality to the pullback
    // coefficients member by member.
    let mut lambdas = Vec::with_capacity(fib.partition.len());
    for member in &fib.partition {
        let i0 = member[0];
        let lambda = &coeffs[i0] / &fib.pullback_coeffs[i0];
        for &i in member {
            if coeffs[i] != &lambda * &fib.pullback_coeffs[i] {
                return Err(Error::DichotomyViolated(format!(
                    "coefficients on partition member containing index {} are not proportional to mu",
                    i0 + 1
                )));
            }
        }
        lambdas.push(lambda);
    }
    for fj in &fib.fibral_classes {
        if !inst.pair(&x, fj).is_zero() {
            return Err(Error::DichotomyViolated(
                "nonnegative pairings did not all vanish".to_string(),
            ));
        }
    }
    Ok(PullbackOutcome::Witness { lambdas })
}

/// Report of a successful lift to the absolute movable cone.
#[derive(Debug, Clone)]
pub struct LiftReport {
    pub input_class: QVec,
    pub lifted_class: QVec,
    pub m: u32,
    pub nus: Vec<u32>,
}

pub const DEFAULT_LIFT_M: u32 = 32;
pub const DEFAULT_LIFT_NU: u32 = 64;

/// Find the smallest `m` and pullback multiples `nu_k` such that
/// `m * preimage + sum nu_k f*(A_k)` passes the movability precheck. The
/// search is bounded; exhaustion is a diagnostic, not a refutation.
pub fn lift_to_absolute(
    inst: &VarietyInstance,
    rel_class: &QVec,
    max_m: u32,
    max_nu: u32,
) -> Result<LiftReport> {
    if inst.is_relative {
        // The instance already lives on the relative side; lifting is the
        // identity provided the class is movable.
        let movable = relative_movable_cone(inst)?;
        if !movable.membership(rel_class, crate::polycone::MembershipMode::Closed) {
            return Err(Error::input(
                "class is outside the relative movable cone".to_string(),
            ));
        }
        return Ok(LiftReport {
            input_class: rel_class.clone(),
            lifted_class: rel_class.clone(),
            m: 1,
            nus: Vec::new(),
        });
    }
    if inst.fibration.ample_pullbacks.is_empty() {
        return Err(Error::input(
            "lift needs at least one ample pullback class".to_string(),
        ));
    }
    let movable = relative_movable_cone(inst)?;
    if !movable.membership(rel_class, crate::polycone::MembershipMode::Closed) {
        return Err(Error::input(
            "class is outside the relative movable cone".to_string(),
        ));
    }
    let (pre, _) = solve_linear(&inst.quotient.map, rel_class)?;
    let mut pre = pre.ok_or_else(|| Error::input("class has no preimage".to_string()))?;
    let pullbacks = &inst.fibration.ample_pullbacks;
    let k = pullbacks.len();
    // The preimage is only determined modulo T(X/S), and the ample pullbacks
    // lie in T. Recenter it so the worst precheck deficit is already paid,
    // computing the exact shift instead of scanning for it.
    let amp = &pullbacks[0];
    let mut shift = Rational::zero();
    for ray in &inst.fibration.k_negative_rays {
        let base_val = inst.pair(&pre, &ray.curve);
        let amp_val = inst.pair(amp, &ray.curve);
        if base_val.is_negative() && amp_val.is_positive() {
            let needed = -base_val / amp_val;
            if needed > shift {
                shift = needed;
            }
        }
    }
    if shift.is_positive() {
        let t = shift.ceil();
        pre = pre.add(&amp.scale(&t));
    }
    for m in 1..=max_m {
        let base = pre.scale(&Rational::from_integer(m.into()));
        // Lexicographic scan over the nu tuples.
        let mut nus = vec![0u32; k];
        loop {
            let mut cand = base.clone();
            for (i, nu) in nus.iter().enumerate() {
                cand = cand.add(&pullbacks[i].scale(&Rational::from_integer((*nu).into())));
            }
            let (ok, _) = chamberwalk::movable_precheck(inst, &cand);
            if ok {
                debug_assert_eq!(
                    inst.project_divisor(&cand),
                    rel_class.scale(&Rational::from_integer(m.into()))
                );
                return Ok(LiftReport {
                    input_class: rel_class.clone(),
                    lifted_class: cand,
                    m,
                    nus,
                });
            }
            // increment
            let mut carry = 0usize;
            loop {
                if carry == k {
                    break;
                }
                if nus[carry] < max_nu {
                    nus[carry] += 1;
                    for n in nus.iter_mut().take(carry) {
                        *n = 0;
                    }
                    break;
                }
                carry += 1;
            }
            if carry == k {
                break;
            }
        }
    }
    Err(Error::LiftNotFound { max_m, max_nu })
}

/// A polytope on the slice W(X/S), described by affine inequalities
/// `normal . y <= bound` in chart coordinates.
#[derive(Debug, Clone)]
pub struct SlicePolytope {
    pub normals: Vec<QVec>,
    pub bounds: Vec<Rational>,
    /// Chart center the polytope was built around.
    pub center: QVec,
}

impl SlicePolytope {
    /// The Dirichlet cell of the translation lattice around `center`: for
    /// each Voronoi candidate vector lambda the bisector constraint
    /// `2 (y - center).lambda <= lambda.lambda`. The candidates cover every
    /// relevant vector (one minimal vector per nonzero class of L/2L), so
    /// the cell is exact and its lattice translates tile the slice.
    pub fn dirichlet(lattice: &TranslationLattice, center: &QVec) -> Result<SlicePolytope> {
        if lattice.basis.is_empty() {
            return Ok(SlicePolytope {
                normals: Vec::new(),
                bounds: Vec::new(),
                center: center.clone(),
            });
        }
        let mut normals = Vec::new();
        let mut bounds = Vec::new();
        for lam in lattice.voronoi_candidates() {
            if lam.is_zero() {
                continue;
            }
            normals.push(lam.scale(&crate::exactq::rat_i(2)));
            bounds.push(lam.dot(&lam).clone() + lam.scale(&crate::exactq::rat_i(2)).dot(center));
        }
        Ok(SlicePolytope {
            normals,
            bounds,
            center: center.clone(),
        })
    }

    /// Intersect with a cone's slice section: each cone inequality becomes an
    /// affine constraint in chart coordinates. Only meaningful when the
    /// vertical space is zero (the chart projection is the identity), which
    /// holds for every bundled instance with a nontrivial slice.
    pub fn restrict_to_cone(mut self, chart: &SliceChart, cone: &PolyCone) -> SlicePolytope {
        if chart.m_proj.is_identity() {
            for v in cone.inequalities_with_equalities() {
                // v.(base + sum y_j d_j) >= 0.
                let normal = QVec::new(chart.dirs.iter().map(|d| -v.dot(d)).collect());
                let bound = v.dot(&chart.base);
                self.normals.push(normal);
                self.bounds.push(bound);
            }
        }
        self
    }

    /// Hull form of an explicit vertex list (computed through the double
    /// description of the homogenization).
    pub fn from_vertices(vertices: &[QVec], dim: usize) -> Result<SlicePolytope> {
        if vertices.is_empty() {
            return Err(Error::input("polytope needs at least one vertex".to_string()));
        }
        let gens: Vec<QVec> = vertices
            .iter()
            .map(|v| {
                let mut e = vec![Rational::one()];
                e.extend(v.entries().iter().cloned());
                QVec::new(e)
            })
            .collect();
        let hom = build_dual_pair(ConeInput::Generators(gens), dim + 1)?;
        let mut normals = Vec::new();
        let mut bounds = Vec::new();
        for ineq in hom.inequalities_with_equalities() {
            // c0 + c.y >= 0  <=>  (-c).y <= c0
            let c0 = ineq.get(0).clone();
            let c = QVec::new(ineq.entries()[1..].to_vec());
            normals.push(c.neg());
            bounds.push(c0);
        }
        let mut center = QVec::zero(dim);
        for v in vertices {
            center = center.add(v);
        }
        center = center.scale(&Rational::new(1.into(), (vertices.len() as i64).into()));
        Ok(SlicePolytope {
            normals,
            bounds,
            center,
        })
    }
}

/// Build the cone K: the cone over the preimage of the slice polytope
/// intersected with the relative movable cone. Errors when the intersection
/// fails the boundedness certificate (a ray with zero F-value).
pub fn build_k(inst: &VarietyInstance, pi: &SlicePolytope) -> Result<PolyCone> {
    let chart = SliceChart::build(inst)?;
    let q = inst.quotient_dim();
    let f = inst.f_functional();

    // Linear expression of the homogenized chart coordinates: for x with
    // t = x.F, the slice point of x/t has coordinates y with
    // dirs_matrix . y = m_proj(x) - t * base. Solving row by row gives
    // y = Y x for a matrix Y of linear functionals paired with t.
    let w = chart.dim();
    let mut y_rows: Vec<QVec> = Vec::new();
    if w > 0 {
        let dirs_cols = QMat::from_rows(chart.dirs.clone()).transpose();
        // For each unit x, compute homogenized y: solve dirs * y = Rx - (f.x) base.
        // Linearity lets us solve per basis vector.
        for unit in (0..q).map(|i| QVec::unit(q, i)) {
            let rhs = chart
                .m_proj
                .mul_vec(&unit)
                .sub(&chart.base.scale(&f.dot(&unit)));
            let (sol, _) = solve_linear(&dirs_cols, &rhs)?;
            let sol = sol.ok_or_else(|| {
                Error::input("chart directions do not span the slice image".to_string())
            })?;
            y_rows.push(sol);
        }
    }
    // y(x) = Y^T x with Y columns per unit vector.
    let y_mat = if w > 0 {
        QMat::from_rows(y_rows).transpose()
    } else {
        QMat::new(Vec::new(), q)?
    };

    let mut ineqs: Vec<QVec> = Vec::new();
    // Homogenized polytope constraints: normal . y(x) <= bound * (f.x).
    for (normal, bound) in pi.normals.iter().zip(&pi.bounds) {
        let lin = if w > 0 {
            y_mat.transpose().mul_vec(normal)
        } else {
            QVec::zero(q)
        };
        ineqs.push(f.scale(bound).sub(&lin));
    }
    ineqs.push(f.clone());
    for fc in &inst.fibration.fibral_classes {
        ineqs.push(inst.curve_functional(fc)?);
    }
    let k = build_dual_pair(ConeInput::Inequalities(ineqs), q)?;
    // Boundedness certificate: the slice section of K is compact exactly
    // when no ray or lineality direction has zero F-value.
    if !k.lineality().is_empty() {
        return Err(Error::Unbounded(
            "cone over the polytope preimage contains a line".to_string(),
        ));
    }
    for g in k.generators() {
        if f.dot(g).is_zero() {
            return Err(Error::Unbounded(format!(
                "ray {:?} has zero F-value",
                g.to_strings()
            )));
        }
    }
    Ok(k)
}

/// Data of the cone U and its verification record.
#[derive(Debug, Clone)]
pub struct UData {
    /// U in quotient coordinates (the fibre-pullback directions are
    /// relatively trivial, so chambers see exactly this image).
    pub u: PolyCone,
    /// Lifted generators in instance coordinates.
    pub lifted_generators: Vec<QVec>,
    /// The ample element adjoined to the lifted cone.
    pub ample: QVec,
    /// Chambers of the decomposition meeting U's interior.
    pub chambers: Vec<Chamber>,
}

/// Build U = cone(lifted K generators, ample pullback) and enumerate the
/// finitely many chambers it meets.
pub fn build_u(
    inst: &VarietyInstance,
    k: &PolyCone,
    max_m: u32,
    max_nu: u32,
    chamber_cap: usize,
    flop_guard: usize,
) -> Result<UData> {
    let mut lifted: Vec<QVec> = Vec::new();
    for ray in k.generators() {
        let report = lift_to_absolute(inst, ray, max_m, max_nu)?;
        let mut cand = report.lifted_class;
        // Bigness adjustment: push the lift strictly inside the precheck
        // region by adding ample pullbacks.
        if !inst.is_relative {
            let amp = &inst.fibration.ample_pullbacks[0];
            let mut tries = 0;
            while inst
                .fibration
                .k_negative_rays
                .iter()
                .any(|r| !inst.pair(&cand, &r.curve).is_positive())
            {
                cand = cand.add(amp);
                tries += 1;
                if tries > 64 {
                    return Err(Error::input(
                        "bigness adjustment did not terminate".to_string(),
                    ));
                }
            }
        }
        lifted.push(cand);
    }
    // The ample element: the first ample pullback, or for relative instances
    // the F-dual base point of the slice chart.
    let ample = if inst.is_relative {
        let chart = SliceChart::build(inst)?;
        let section = {
            let m = chart.m_proj.nrows();
            let mut cols = Vec::with_capacity(m);
            for i in 0..m {
                let (sol, _) = solve_linear(&chart.m_proj, &QVec::unit(m, i))?;
                cols.push(sol.ok_or_else(|| Error::input("projection not surjective".to_string()))?);
            }
            QMat::from_rows(cols).transpose()
        };
        section.mul_vec(&chart.base).primitive()
    } else {
        inst.fibration.ample_pullbacks[0].clone()
    };

    let mut u_gens: Vec<QVec> = lifted.iter().map(|g| inst.project_divisor(g)).collect();
    let ample_quot = inst.project_divisor(&ample);
    if !ample_quot.is_zero() {
        u_gens.push(ample_quot);
    }
    let u = build_dual_pair(ConeInput::Generators(u_gens), inst.quotient_dim())?;
    let chambers = chamberwalk::enumerate_chambers(inst, &u, chamber_cap, flop_guard)?;
    Ok(UData {
        u,
        lifted_generators: lifted,
        ample,
        chambers,
    })
}

/// Witness that a group translate of U reaches a target chamber's interior.
#[derive(Debug, Clone)]
pub struct UTranslateWitness {
    pub chamber_frame: Vec<QVec>,
    pub exponents: Vec<i64>,
    pub point: QVec,
    pub image: QVec,
    pub found: bool,
}

/// For each target chamber, exhibit a group element and an interior point of
/// U whose image lands in that chamber's interior.
pub fn verify_u_translates(
    inst: &VarietyInstance,
    u: &PolyCone,
    targets: &[Chamber],
) -> Result<Vec<UTranslateWitness>> {
    let lattice = TranslationLattice::build(inst)?;
    // A deterministic interior point of U off the translation walls: weight
    // the generators unevenly.
    let mut point = QVec::zero(u.ambient_dim());
    for (i, g) in u.generators().iter().enumerate() {
        point = point.add(&g.scale(&Rational::from_integer(((i + 1) as i64).into())));
    }
    let y_u = lattice.chart.slice_coords(&point)?;
    let mut out = Vec::new();
    for ch in targets {
        let cone = ch.nef_cone(inst)?;
        let y_ch = chamberwalk::chamber_slice_point(inst, &lattice, ch)?;
        let (_, exps) = lattice.closest(&y_ch.sub(&y_u));
        // Candidate exponent offsets around the closest vector.
        let mut found = None;
        'search: for delta in exponent_offsets(exps.len()) {
            let trial: Vec<i64> = exps.iter().zip(&delta).map(|(e, d)| e + d).collect();
            let g = lattice.element_for_exponents(inst, &trial);
            let gq = crate::groupact::quotient_action(inst, &g)?;
            let image = gq.mul_vec(&point);
            if cone.contains_interior(&image) {
                found = Some((trial, image));
                break 'search;
            }
        }
        match found {
            Some((exponents, image)) => out.push(UTranslateWitness {
                chamber_frame: ch.frame().to_vec(),
                exponents,
                point: point.clone(),
                image,
                found: true,
            }),
            None => out.push(UTranslateWitness {
                chamber_frame: ch.frame().to_vec(),
                exponents: exps.clone(),
                point: point.clone(),
                image: QVec::zero(u.ambient_dim()),
                found: false,
            }),
        }
    }
    Ok(out)
}

fn exponent_offsets(k: usize) -> Vec<Vec<i64>> {
    // 0 first, then +/-1 in each coordinate singly.
    let mut out = vec![vec![0i64; k]];
    for i in 0..k {
        for s in [1i64, -1] {
            let mut v = vec![0i64; k];
            v[i] = s;
            out.push(v);
        }
    }
    out
}
