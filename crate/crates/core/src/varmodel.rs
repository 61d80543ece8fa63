//! Instance schema and structural validation.
//!
//! An instance file carries everything the engine assumes about the geometry:
//! the divisor/curve lattice pair with its intersection pairing, the canonical
//! class, the elliptic-fibration data (fibre class, fibral components of
//! exceptional divisors over the base, partition by image curve, the
//! associated multiplicities and pullback coefficients), the wall-crossing
//! rule, a seed chamber, and group generators. Loading validates every
//! identity the theory imposes on this data and reports all violations at
//! once, not just the first.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactq::{
    format_rational, kernel_basis, parse_rational, solve_linear, QMat, QVec, Rational,
};
use crate::polycone::{build_dual_pair, ConeInput, PolyCone};

// ---------------------------------------------------------------------------
// Wire format
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    rank: usize,
    divisor_basis: Vec<String>,
    curve_basis: Vec<String>,
    pairing: Vec<Vec<String>>,
    canonical_class: Vec<String>,
    iitaka_dim: i64,
    fibre_class: Vec<String>,
    fibral_classes: Vec<Vec<String>>,
    vertical_divisors: Vec<Vec<String>>,
    partition: Vec<Vec<usize>>,
    multiplicities_m: Vec<i64>,
    pullback_coeffs_mu: Vec<String>,
    ample_pullbacks: Vec<Vec<String>>,
    k_negative_rays: Vec<KNegativeRayFile>,
    flop_rule: FlopRuleFile,
    seed_chamber: SeedChamberFile,
    group_generators: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    metadata: serde_json::Value,
    is_relative: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KNegativeRayFile {
    curve: Vec<String>,
    mori_type: serde_json::Value,
    #[serde(default)]
    exceptional_divisor: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlopRuleFile {
    #[serde(default)]
    reflection_form: Option<Vec<Vec<String>>>,
    #[serde(default)]
    explicit: Option<Vec<ExplicitMapFile>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitMapFile {
    wall: Vec<String>,
    matrix: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedChamberFile {
    wall_frame: Vec<Vec<String>>,
}

// ---------------------------------------------------------------------------
// Validated model
// ---------------------------------------------------------------------------

/// The numerical lattice pair N1/N_1 with its intersection pairing
/// (divisor . curve = d^T P c).
#[derive(Debug, Clone)]
pub struct LatticePair {
    pub rank: usize,
    pub divisor_basis_labels: Vec<String>,
    pub curve_basis_labels: Vec<String>,
    pub pairing: QMat,
}

impl LatticePair {
    pub fn pair(&self, divisor: &QVec, curve: &QVec) -> Rational {
        self.pairing.mul_vec(curve).dot(divisor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MoriType {
    #[serde(rename = "1")]
    Type1,
    #[serde(rename = "2")]
    Type2,
    #[serde(rename = "3")]
    Type3,
    #[serde(rename = "4")]
    Type4,
    #[serde(rename = "5")]
    Type5,
    #[serde(rename = "fibre")]
    Fibre,
}

impl MoriType {
    fn from_value(v: &serde_json::Value) -> Option<MoriType> {
        match v {
            serde_json::Value::Number(n) => match n.as_i64()? {
                1 => Some(MoriType::Type1),
                2 => Some(MoriType::Type2),
                3 => Some(MoriType::Type3),
                4 => Some(MoriType::Type4),
                5 => Some(MoriType::Type5),
                _ => None,
            },
            serde_json::Value::String(s) if s == "fibre" => Some(MoriType::Fibre),
            _ => None,
        }
    }

    pub fn is_divisorial(self) -> bool {
        matches!(
            self,
            MoriType::Type1 | MoriType::Type2 | MoriType::Type3 | MoriType::Type4 | MoriType::Type5
        )
    }
}

#[derive(Debug, Clone)]
pub struct KNegativeRay {
    pub curve: QVec,
    pub mori_type: MoriType,
    pub exceptional_divisor: Option<QVec>,
}

/// Rule producing the curve-class involution of a wall crossing. Either a
/// symmetric bilinear form on N_1 (the map is the associated reflection) or
/// an explicit table of wall/matrix pairs.
#[derive(Debug, Clone)]
pub enum FlopRule {
    ReflectionForm(QMat),
    Explicit(Vec<(QVec, QMat)>),
}

impl FlopRule {
    /// The curve-class map for crossing `wall`, in seed coordinates.
    pub fn map_for_wall(&self, wall: &QVec) -> Result<QMat> {
        let wall = wall.primitive();
        match self {
            FlopRule::ReflectionForm(b) => {
                let bw = b.mul_vec(&wall);
                let norm = bw.dot(&wall);
                if norm.is_zero() {
                    return Err(Error::MissingFlopRule(format!(
                        "{:?} (isotropic for the reflection form)",
                        wall.to_strings()
                    )));
                }
                let n = wall.dim();
                let coef = Rational::from_integer(2.into()) / norm;
                let rows = (0..n)
                    .map(|i| {
                        QVec::new(
                            (0..n)
                                .map(|j| {
                                    let mut v = -(wall.get(i) * bw.get(j) * &coef);
                                    if i == j {
                                        v += Rational::one();
                                    }
                                    v
                                })
                                .collect(),
                        )
                    })
                    .collect();
                Ok(QMat::from_rows(rows))
            }
            FlopRule::Explicit(table) => table
                .iter()
                .find(|(w, _)| *w == wall)
                .map(|(_, m)| m.clone())
                .ok_or_else(|| Error::MissingFlopRule(format!("{:?}", wall.to_strings()))),
        }
    }
}

/// Linear data of the projection onto the relative space N1(X/S) = N1 / T.
/// Relative instances carry the identity here.
#[derive(Debug, Clone)]
pub struct Quotient {
    /// Basis of T(X/S) in divisor coordinates.
    pub t_basis: Vec<QVec>,
    /// q x rank projection matrix.
    pub map: QMat,
    /// Curve-side basis of the fibral span (rows), used to express fibral
    /// curve classes as functionals on the quotient. Empty for relative
    /// instances where the pairing itself serves.
    fibral_basis: Vec<QVec>,
    /// q x rank matrix sending a fibral curve class to its functional on
    /// quotient coordinates (the pairing matrix itself for relative
    /// instances). Off the fibral span its output is meaningless, which the
    /// checked accessor guards against.
    functional_map: QMat,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct FibrationData {
    pub fibre_class: QVec,
    pub fibral_classes: Vec<QVec>,
    pub vertical_divisors: Vec<QVec>,
    pub partition: Vec<Vec<usize>>,
    pub multiplicities: Vec<i64>,
    pub pullback_coeffs: Vec<Rational>,
    pub ample_pullbacks: Vec<QVec>,
    pub k_negative_rays: Vec<KNegativeRay>,
}

#[derive(Debug, Clone)]
pub struct GroupElement {
    pub label: String,
    pub matrix: QMat,
    pub provenance: String,
}

#[derive(Debug, Clone)]
pub struct VarietyInstance {
    pub label: String,
    pub lattice: LatticePair,
    pub canonical_class: QVec,
    pub iitaka_dim: i64,
    pub fibration: FibrationData,
    pub flop_rule: FlopRule,
    pub seed_frame: Vec<QVec>,
    pub group_generators: Vec<GroupElement>,
    pub metadata: serde_json::Value,
    pub is_relative: bool,
    pub quotient: Quotient,
}

/// Summary facts computed while validating, reported alongside the instance.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub exceptional_divisor_count: usize,
    pub partition_members: usize,
    pub reducible_fibre_pairs: usize,
    pub trivial_subspace_dim: usize,
    pub quotient_dim: usize,
}

impl VarietyInstance {
    pub fn rank(&self) -> usize {
        self.lattice.rank
    }

    pub fn pair(&self, divisor: &QVec, curve: &QVec) -> Rational {
        self.lattice.pair(divisor, curve)
    }

    pub fn quotient_dim(&self) -> usize {
        self.quotient.dim
    }

    /// Image of a divisor class in the relative space N1(X/S).
    pub fn project_divisor(&self, x: &QVec) -> QVec {
        self.quotient.map.mul_vec(x)
    }

    /// The functional on quotient coordinates induced by pairing with a
    /// fibral curve class: `project_divisor(x) . f == x . gamma` for all x.
    pub fn curve_functional(&self, gamma: &QVec) -> Result<QVec> {
        let kappa = self.quotient.functional_map.mul_vec(gamma);
        if !self.is_relative {
            // Recompose to reject classes outside the fibral span.
            let mut back = QVec::zero(self.rank());
            for (i, b) in self.quotient.fibral_basis.iter().enumerate() {
                back = back.add(&b.scale(kappa.get(i)));
            }
            if back != *gamma {
                return Err(Error::input(format!(
                    "curve class {:?} is not fibral (outside the span of the fibre data)",
                    gamma.to_strings()
                )));
            }
        }
        Ok(kappa)
    }

    /// The functional on curve classes induced by pairing with a fixed
    /// quotient-space point: `pairing_functional(x) . gamma == x . gamma`
    /// for every fibral gamma. One vector, so walks evaluate walls by plain
    /// dot products.
    pub fn pairing_functional(&self, x_quot: &QVec) -> QVec {
        self.quotient.functional_map.transpose().mul_vec(x_quot)
    }

    /// Functional of the fibre class F on quotient coordinates.
    pub fn f_functional(&self) -> QVec {
        self.curve_functional(&self.fibration.fibre_class)
            .expect("fibre class is fibral by construction")
    }

    /// The closed base of the relative movable cone in quotient coordinates:
    /// `{x : x.F_i >= 0 for all i}` (the whole space when there are no
    /// exceptional divisors over the base).
    pub fn relative_movable_base(&self) -> Result<PolyCone> {
        let ineqs: Result<Vec<QVec>> = self
            .fibration
            .fibral_classes
            .iter()
            .map(|g| self.curve_functional(g))
            .collect();
        build_dual_pair(ConeInput::Inequalities(ineqs?), self.quotient_dim())
    }

    /// Fibral curve classes spanning the relative curve cone data: F, the
    /// F_i, and the seed chamber frame.
    pub fn fibral_span_classes(&self) -> Vec<QVec> {
        let mut v = vec![self.fibration.fibre_class.clone()];
        v.extend(self.fibration.fibral_classes.iter().cloned());
        v.extend(self.seed_frame.iter().cloned());
        v
    }

    /// Is this wall a boundary wall of the movable cone: one of the F_i, or
    /// a multiple of the fibre class itself (the hyperplane x.F = 0)?
    pub fn is_divisorial_wall(&self, wall: &QVec) -> bool {
        let w = wall.primitive();
        w == self.fibration.fibre_class.primitive()
            || self
                .fibration
                .fibral_classes
                .iter()
                .any(|f| f.primitive() == w)
    }
}

// ---------------------------------------------------------------------------
// Loading and validation
// ---------------------------------------------------------------------------

fn parse_vec(raw: &[String], dim: usize, path: &str) -> Result<QVec> {
    if raw.len() != dim {
        return Err(Error::Parse {
            path: path.to_string(),
            message: format!("expected {dim} entries, found {}", raw.len()),
        });
    }
    let entries: std::result::Result<Vec<Rational>, Error> =
        raw.iter().map(|s| parse_rational(s)).collect();
    Ok(QVec::new(entries.map_err(|e| Error::Parse {
        path: path.to_string(),
        message: e.to_string(),
    })?))
}

fn parse_mat(raw: &[Vec<String>], nrows: usize, ncols: usize, path: &str) -> Result<QMat> {
    if raw.len() != nrows {
        return Err(Error::Parse {
            path: path.to_string(),
            message: format!("expected {nrows} rows, found {}", raw.len()),
        });
    }
    let rows: Result<Vec<QVec>> = raw
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vec(r, ncols, &format!("{path}[{i}]")))
        .collect();
    QMat::new(rows?, ncols)
}

/// Compute T(X/S) and the projection, choosing a deterministic fibral basis.
fn build_quotient(
    rank: usize,
    pairing: &QMat,
    fibral_classes: &[QVec],
    is_relative: bool,
) -> Quotient {
    if is_relative {
        return Quotient {
            t_basis: Vec::new(),
            map: QMat::identity(rank),
            fibral_basis: Vec::new(),
            functional_map: pairing.clone(),
            dim: rank,
        };
    }
    // Greedy independent subset of the fibral classes, in input order.
    let mut basis: Vec<QVec> = Vec::new();
    for c in fibral_classes {
        let mut cand = basis.clone();
        cand.push(c.clone());
        if QMat::new(cand.clone(), rank).map(|m| m.rank()).unwrap_or(0) > basis.len() {
            basis = cand;
        }
    }
    // Functional rows (P b_i)^T define both the projection and T as its kernel.
    let func_rows: Vec<QVec> = basis.iter().map(|b| pairing.mul_vec(b)).collect();
    let map = QMat::new(func_rows, rank).expect("functional rows of width rank");
    let t_basis = kernel_basis(&map);
    let dim = basis.len();
    // Left inverse of the basis-column matrix: sends a fibral class to its
    // coefficient vector over the basis.
    let basis_rows = QMat::new(basis.clone(), rank).expect("basis rows");
    let mut w_rows = Vec::with_capacity(dim);
    for i in 0..dim {
        let (sol, _) =
            solve_linear(&basis_rows, &QVec::unit(dim, i)).expect("well-formed system");
        w_rows.push(sol.expect("fibral basis has full row rank"));
    }
    let functional_map = QMat::new(w_rows, rank).expect("functional map rows");
    Quotient {
        t_basis,
        map,
        fibral_basis: basis,
        functional_map,
        dim,
    }
}

/// Count unordered pairs of distinct frame classes summing to the fibre
/// class: the reducible-fibre decompositions visible in the frame.
pub fn reducible_fibre_pairs(frame: &[QVec], fibre: &QVec) -> usize {
    let mut count = 0;
    for i in 0..frame.len() {
        for j in (i + 1)..frame.len() {
            if frame[i].add(&frame[j]) == *fibre {
                count += 1;
            }
        }
    }
    count
}

pub fn load_and_validate(text: &str, label: &str) -> Result<(VarietyInstance, ValidationSummary)> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: label.to_string(),
        message: e.to_string(),
    })?;

    let rank = file.rank;
    if rank == 0 {
        return Err(Error::Parse {
            path: format!("{label}.rank"),
            message: "rank must be positive".to_string(),
        });
    }
    if file.divisor_basis.len() != rank || file.curve_basis.len() != rank {
        return Err(Error::Parse {
            path: format!("{label}.divisor_basis/curve_basis"),
            message: "basis label lists must have length rank".to_string(),
        });
    }
    let pairing = parse_mat(&file.pairing, rank, rank, &format!("{label}.pairing"))?;
    let canonical_class =
        parse_vec(&file.canonical_class, rank, &format!("{label}.canonical_class"))?;
    let fibre_class = parse_vec(&file.fibre_class, rank, &format!("{label}.fibre_class"))?;

    let n = file.fibral_classes.len();
    if file.vertical_divisors.len() != n
        || file.multiplicities_m.len() != n
        || file.pullback_coeffs_mu.len() != n
    {
        return Err(Error::Parse {
            path: format!("{label}.fibral_classes"),
            message: "fibral_classes, vertical_divisors, multiplicities_m and pullback_coeffs_mu must have equal length".to_string(),
        });
    }
    let fibral_classes: Vec<QVec> = file
        .fibral_classes
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vec(r, rank, &format!("{label}.fibral_classes[{i}]")))
        .collect::<Result<_>>()?;
    let vertical_divisors: Vec<QVec> = file
        .vertical_divisors
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vec(r, rank, &format!("{label}.vertical_divisors[{i}]")))
        .collect::<Result<_>>()?;
    let pullback_coeffs: Vec<Rational> = file
        .pullback_coeffs_mu
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_>>()?;
    let ample_pullbacks: Vec<QVec> = file
        .ample_pullbacks
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vec(r, rank, &format!("{label}.ample_pullbacks[{i}]")))
        .collect::<Result<_>>()?;

    let mut k_negative_rays = Vec::new();
    for (i, r) in file.k_negative_rays.iter().enumerate() {
        let mori_type = MoriType::from_value(&r.mori_type).ok_or_else(|| Error::Parse {
            path: format!("{label}.k_negative_rays[{i}].mori_type"),
            message: "expected 1..5 or \"fibre\"".to_string(),
        })?;
        let curve = parse_vec(&r.curve, rank, &format!("{label}.k_negative_rays[{i}].curve"))?;
        let exceptional_divisor = r
            .exceptional_divisor
            .as_ref()
            .map(|d| {
                parse_vec(
                    d,
                    rank,
                    &format!("{label}.k_negative_rays[{i}].exceptional_divisor"),
                )
            })
            .transpose()?;
        k_negative_rays.push(KNegativeRay {
            curve,
            mori_type,
            exceptional_divisor,
        });
    }

    let flop_rule = match (&file.flop_rule.reflection_form, &file.flop_rule.explicit) {
        (Some(form), None) => FlopRule::ReflectionForm(parse_mat(
            form,
            rank,
            rank,
            &format!("{label}.flop_rule.reflection_form"),
        )?),
        (None, Some(maps)) => {
            let mut table = Vec::new();
            for (i, m) in maps.iter().enumerate() {
                let wall =
                    parse_vec(&m.wall, rank, &format!("{label}.flop_rule.explicit[{i}].wall"))?
                        .primitive();
                let matrix = parse_mat(
                    &m.matrix,
                    rank,
                    rank,
                    &format!("{label}.flop_rule.explicit[{i}].matrix"),
                )?;
                table.push((wall, matrix));
            }
            FlopRule::Explicit(table)
        }
        _ => {
            return Err(Error::Parse {
                path: format!("{label}.flop_rule"),
                message: "exactly one of reflection_form / explicit is required".to_string(),
            })
        }
    };

    let seed_frame: Vec<QVec> = file
        .seed_chamber
        .wall_frame
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vec(r, rank, &format!("{label}.seed_chamber.wall_frame[{i}]")))
        .collect::<Result<_>>()?;

    let group_generators: Vec<GroupElement> = file
        .group_generators
        .iter()
        .enumerate()
        .map(|(i, m)| {
            Ok(GroupElement {
                label: format!("g{}", i + 1),
                matrix: parse_mat(m, rank, rank, &format!("{label}.group_generators[{i}]"))?,
                provenance: file
                    .metadata
                    .get("group_provenance")
                    .and_then(|v| v.as_str())
                    .unwrap_or("instance data")
                    .to_string(),
            })
        })
        .collect::<Result<_>>()?;

    if !(1..=3).contains(&file.iitaka_dim) {
        return Err(Error::Parse {
            path: format!("{label}.iitaka_dim"),
            message: "must be 1, 2 or 3".to_string(),
        });
    }

    // Partition sanity is structural, checked before the identity pass.
    let mut seen = vec![false; n];
    for (p, member) in file.partition.iter().enumerate() {
        for &i in member {
            if i >= n {
                return Err(Error::Parse {
                    path: format!("{label}.partition[{p}]"),
                    message: format!("index {i} out of range (n = {n})"),
                });
            }
            if seen[i] {
                return Err(Error::Parse {
                    path: format!("{label}.partition[{p}]"),
                    message: format!("index {i} appears in two members"),
                });
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Parse {
            path: format!("{label}.partition"),
            message: "partition must cover every exceptional divisor index".to_string(),
        });
    }

    let lattice = LatticePair {
        rank,
        divisor_basis_labels: file.divisor_basis.clone(),
        curve_basis_labels: file.curve_basis.clone(),
        pairing,
    };
    let fibration = FibrationData {
        fibre_class,
        fibral_classes,
        vertical_divisors,
        partition: file.partition.clone(),
        multiplicities: file.multiplicities_m.clone(),
        pullback_coeffs,
        ample_pullbacks,
        k_negative_rays,
    };

    let mut inst = VarietyInstance {
        label: label.to_string(),
        lattice,
        canonical_class,
        iitaka_dim: file.iitaka_dim,
        fibration,
        flop_rule,
        seed_frame,
        group_generators,
        metadata: file.metadata,
        is_relative: file.is_relative,
        quotient: Quotient {
            t_basis: Vec::new(),
            map: QMat::identity(rank),
            fibral_basis: Vec::new(),
            functional_map: QMat::identity(rank),
            dim: rank,
        },
    };
    let fibral_span = inst.fibral_span_classes();
    inst.quotient = build_quotient(rank, &inst.lattice.pairing, &fibral_span, inst.is_relative);

    let violations = validate_identities(&inst);
    if !violations.is_empty() {
        return Err(Error::Validation { violations });
    }

    let summary = ValidationSummary {
        exceptional_divisor_count: inst.fibration.fibral_classes.len(),
        partition_members: inst.fibration.partition.len(),
        reducible_fibre_pairs: reducible_fibre_pairs(&inst.seed_frame, &inst.fibration.fibre_class),
        trivial_subspace_dim: inst.quotient.t_basis.len(),
        quotient_dim: inst.quotient.dim,
    };
    Ok((inst, summary))
}

/// Every identity the fibration data must satisfy; all failures collected.
fn validate_identities(inst: &VarietyInstance) -> Vec<String> {
    let mut out = Vec::new();
    let fib = &inst.fibration;
    let lat = &inst.lattice;
    let f = &fib.fibre_class;
    let n = fib.fibral_classes.len();

    if lat.pairing.rank() < lat.rank {
        out.push("pairing matrix is degenerate".to_string());
    }
    if f.is_zero() {
        out.push("fibre class F is zero".to_string());
    }

    for (i, m) in fib.multiplicities.iter().enumerate() {
        if *m <= 0 {
            out.push(format!("multiplicity m_{} must be positive", i + 1));
        }
    }
    for (i, mu) in fib.pullback_coeffs.iter().enumerate() {
        if !mu.is_positive() {
            out.push(format!("pullback coefficient mu_{} must be positive", i + 1));
        }
    }

    // Per-member identities.
    for (p, member) in fib.partition.iter().enumerate() {
        let mut sum_f = QVec::zero(lat.rank);
        let mut sum_mu_d = QVec::zero(lat.rank);
        for &i in member {
            sum_f = sum_f.add(
                &fib.fibral_classes[i]
                    .scale(&Rational::from_integer(fib.multiplicities[i].into())),
            );
            sum_mu_d = sum_mu_d.add(&fib.vertical_divisors[i].scale(&fib.pullback_coeffs[i]));
        }
        if sum_f != *f {
            out.push(format!("Σ m_i F_i ≠ F in partition member {}", p + 1));
        }
        // Σ mu_i D_i must pair to zero with every fibral class.
        for gamma in inst.fibral_span_classes() {
            if !lat.pair(&sum_mu_d, &gamma).is_zero() {
                out.push(format!(
                    "Σ μ_i D_i not relatively trivial in partition member {}",
                    p + 1
                ));
                break;
            }
        }
    }

    // Pairings of the vertical divisors against the fibral classes.
    for i in 0..n {
        let d = &fib.vertical_divisors[i];
        if !lat.pair(d, f).is_zero() {
            out.push(format!("D_i·F = 0 violated at i={}", i + 1));
        }
        if !lat.pair(d, &fib.fibral_classes[i]).is_negative() {
            out.push(format!("D_i·F_i < 0 violated at i={}", i + 1));
        }
    }
    for member in &fib.partition {
        for &i in member {
            for &j in member {
                if i != j
                    && lat
                        .pair(&fib.vertical_divisors[i], &fib.fibral_classes[j])
                        .is_negative()
                {
                    out.push(format!(
                        "D_i·F_j ≥ 0 violated at (i,j)=({},{})",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
    }

    // Listed K-negative rays must actually be K-negative.
    for (i, ray) in fib.k_negative_rays.iter().enumerate() {
        if !lat.pair(&inst.canonical_class, &ray.curve).is_negative() {
            out.push(format!("K·c ≥ 0 at k_negative_rays[{}]", i + 1));
        }
        if ray.mori_type.is_divisorial() && ray.exceptional_divisor.is_none() {
            out.push(format!(
                "k_negative_rays[{}] declares a divisorial type without an exceptional divisor",
                i + 1
            ));
        }
    }

    // The canonical class is trivial on all fibral curve classes (the walls
    // crossed by flops are K-trivial).
    for gamma in inst.fibral_span_classes() {
        if !lat.pair(&inst.canonical_class, &gamma).is_zero() {
            out.push(format!(
                "canonical class not relatively trivial: K·{:?} ≠ 0",
                gamma.to_strings()
            ));
            break;
        }
    }

    // Seed chamber checks.
    for (i, w) in inst.seed_frame.iter().enumerate() {
        if !w.is_integral() || *w != w.primitive() {
            out.push(format!(
                "seed frame class {} is not a primitive integer vector",
                i + 1
            ));
        }
    }
    for (i, fc) in fib.fibral_classes.iter().enumerate() {
        if !inst.seed_frame.contains(fc) {
            out.push(format!(
                "seed frame does not contain divisorial wall class F_{}",
                i + 1
            ));
        }
    }

    // Flop maps on the crossable seed walls.
    for wall in &inst.seed_frame {
        if inst.is_divisorial_wall(wall) {
            continue;
        }
        match inst.flop_rule.map_for_wall(wall) {
            Err(e) => out.push(format!("flop rule unavailable for seed wall: {e}")),
            Ok(t) => {
                let wall_p = wall.primitive();
                if !t.is_integral() {
                    out.push(format!(
                        "flop map for wall {:?} has non-integer entries",
                        wall_p.to_strings()
                    ));
                }
                if t.mul_vec(&wall_p) != wall_p.neg() {
                    out.push(format!(
                        "flop map for wall {:?} does not send the wall to its negative",
                        wall_p.to_strings()
                    ));
                }
                if t.mul_vec(f) != *f {
                    out.push(format!(
                        "flop map for wall {:?} does not fix the fibre class",
                        wall_p.to_strings()
                    ));
                }
                if !t.mul_mat(&t).is_identity() {
                    out.push(format!(
                        "flop map for wall {:?} is not an involution",
                        wall_p.to_strings()
                    ));
                }
                if let FlopRule::ReflectionForm(b) = &inst.flop_rule {
                    if b != &b.transpose() {
                        out.push("reflection form is not symmetric".to_string());
                    } else if t.transpose().mul_mat(b).mul_mat(&t) != *b {
                        out.push(format!(
                            "flop map for wall {:?} does not preserve the reflection form",
                            wall_p.to_strings()
                        ));
                    }
                }
            }
        }
    }

    // Seed nef cone must have nonempty interior in the quotient.
    match seed_nef_cone(inst) {
        Ok(c) => {
            if !c.is_full_dim() {
                out.push("seed chamber nef cone has empty interior".to_string());
            }
        }
        Err(e) => out.push(format!("seed chamber nef cone construction failed: {e}")),
    }

    // Group generators.
    for g in &inst.group_generators {
        for v in crate::groupact::validate_group_element(inst, &g.matrix) {
            out.push(format!("group generator {}: {}", g.label, v));
        }
    }

    out
}

/// The seed chamber's nef cone in quotient coordinates.
pub fn seed_nef_cone(inst: &VarietyInstance) -> Result<PolyCone> {
    let ineqs: Result<Vec<QVec>> = inst
        .seed_frame
        .iter()
        .map(|g| inst.curve_functional(g))
        .collect();
    build_dual_pair(ConeInput::Inequalities(ineqs?), inst.quotient_dim())
}

/// Basis of T(X/S) (divisor classes pairing to zero with every fibral curve
/// class) together with the induced projection matrix onto N1(X/S).
pub fn trivial_subspace(inst: &VarietyInstance) -> (Vec<QVec>, QMat) {
    if inst.is_relative {
        // The relative model has already quotiented T out; recompute from the
        // fibral span anyway so synthetic data is reported faithfully.
        let rows: Vec<QVec> = inst
            .fibral_span_classes()
            .iter()
            .map(|g| inst.lattice.pairing.mul_vec(g))
            .collect();
        let mat = QMat::new(rows, inst.rank()).expect("functional rows");
        (kernel_basis(&mat), inst.quotient.map.clone())
    } else {
        (inst.quotient.t_basis.clone(), inst.quotient.map.clone())
    }
}

/// Rank identity behind the dual-span corollary: the images of the F_i span
/// the quotient of N_1(X/S) dual to the vertical divisor space. The image of
/// a fibral class gamma in that quotient has coordinates (D_j . gamma)_j, so
/// the claim is that the matrix (D_j . F_i) has the same rank as the space of
/// D_j-functionals on N_1(X/S).
pub fn dual_span_rank_identity(inst: &VarietyInstance) -> bool {
    let fib = &inst.fibration;
    let n = fib.vertical_divisors.len();
    if n == 0 {
        // No vertical divisors: both sides are zero.
        return true;
    }
    let image_rows: Vec<QVec> = fib
        .fibral_classes
        .iter()
        .map(|g| {
            QVec::new(
                fib.vertical_divisors
                    .iter()
                    .map(|d| inst.pair(d, g))
                    .collect(),
            )
        })
        .collect();
    let rank_images = QMat::new(image_rows, n).map(|m| m.rank()).unwrap_or(0);
    // D_j as functionals on the fibral span N_1(X/S): exactly the quotient
    // projections of the D_j.
    let d_rows: Vec<QVec> = fib
        .vertical_divisors
        .iter()
        .map(|d| inst.project_divisor(d))
        .collect();
    let rank_d = QMat::new(d_rows, inst.quotient_dim())
        .map(|m| m.rank())
        .unwrap_or(0);
    rank_images == rank_d
}

// ---------------------------------------------------------------------------
// Report serialization helpers
// ---------------------------------------------------------------------------

pub fn cone_to_json(c: &PolyCone) -> serde_json::Value {
    let vecs = |vs: &[QVec]| -> Vec<Vec<String>> { vs.iter().map(QVec::to_strings).collect() };
    serde_json::json!({
        "ambient_dim": c.ambient_dim(),
        "generators": vecs(c.generators()),
        "lineality": vecs(c.lineality()),
        "inequalities": vecs(c.inequalities()),
        "equalities": vecs(c.equalities()),
    })
}

pub fn qvec_to_json(v: &QVec) -> serde_json::Value {
    serde_json::json!(v.to_strings())
}

pub fn qmat_to_json(m: &QMat) -> serde_json::Value {
    serde_json::json!(m.rows().iter().map(|r| r.to_strings()).collect::<Vec<_>>())
}

pub fn rational_to_json(r: &Rational) -> serde_json::Value {
    serde_json::json!(format_rational(r))
}
