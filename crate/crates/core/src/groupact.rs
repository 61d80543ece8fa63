//! Group elements acting on the divisor lattice: validation, the induced
//! translations on the affine quotient slice W(X/S), exact lattice reduction
//! to canonical orbit representatives, and the fundamental-domain predicates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactq::{kernel_basis, rref_primitive, solve_linear, QMat, QVec, Rational};
use crate::polycone::{build_dual_pair, intersect, map_cone, ConeInput, PolyCone};
use crate::varmodel::VarietyInstance;

// ---------------------------------------------------------------------------
// Slice chart
// ---------------------------------------------------------------------------

/// Affine chart on W(X/S) = { z in N1(X/S)/V(X/S) : z.F = 1 }.
///
/// `m_proj` maps quotient coordinates onto M = N1(X/S)/V; `phi` is the fibre
/// functional on M; `base` is a fixed point of the slice and `dirs` a basis of
/// its direction space, so slice points get coordinates in Q^w.
#[derive(Debug, Clone)]
pub struct SliceChart {
    pub m_proj: QMat,
    pub phi: QVec,
    pub base: QVec,
    pub dirs: Vec<QVec>,
}

impl SliceChart {
    pub fn build(inst: &VarietyInstance) -> Result<SliceChart> {
        let q = inst.quotient_dim();
        let v_rows: Vec<QVec> = inst
            .fibration
            .vertical_divisors
            .iter()
            .map(|d| inst.project_divisor(d))
            .collect();
        let v_rows = rref_primitive(&v_rows, q);
        let m_proj = if v_rows.is_empty() {
            QMat::identity(q)
        } else {
            QMat::from_rows(kernel_basis(&QMat::new(v_rows, q)?))
        };
        let m = m_proj.nrows();
        let f_func = inst.f_functional();
        // phi solves m_proj^T phi = f_F; consistent because the fibre
        // functional annihilates the vertical space.
        let (phi, _) = solve_linear(&m_proj.transpose(), &f_func)?;
        let phi = phi.ok_or_else(|| {
            Error::input("fibre functional does not descend to the vertical quotient".to_string())
        })?;
        let phi_mat = QMat::new(vec![phi.clone()], m)?;
        let (base, _) = solve_linear(&phi_mat, &QVec::new(vec![Rational::one()]))?;
        let base = base.ok_or_else(|| Error::input("fibre functional vanishes on W".to_string()))?;
        let dirs = kernel_basis(&phi_mat);
        Ok(SliceChart {
            m_proj,
            phi,
            base,
            dirs,
        })
    }

    /// Dimension of the slice.
    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    /// Slice coordinates of a quotient-space point with positive F-value.
    pub fn slice_coords(&self, x_quot: &QVec) -> Result<QVec> {
        let m = self.m_proj.mul_vec(x_quot);
        let f_val = self.phi.dot(&m);
        if !f_val.is_positive() {
            return Err(Error::input(
                "slice coordinates need a point with x.F > 0".to_string(),
            ));
        }
        let z = m.scale(&(Rational::one() / f_val));
        self.coords_on_slice(&z)
    }

    /// The M-space point of given slice coordinates (the quotient-space
    /// point whenever the vertical space is trivial).
    pub fn point_from_slice(&self, y: &QVec) -> QVec {
        let mut p = self.base.clone();
        for (j, d) in self.dirs.iter().enumerate() {
            p = p.add(&d.scale(y.get(j)));
        }
        p
    }

    fn coords_on_slice(&self, z: &QVec) -> Result<QVec> {
        let diff = z.sub(&self.base);
        if self.dirs.is_empty() {
            return Ok(QVec::zero(0));
        }
        let cols = QMat::from_rows(self.dirs.clone()).transpose();
        let (y, _) = solve_linear(&cols, &diff)?;
        y.ok_or_else(|| Error::input("point is not on the slice".to_string()))
    }

    /// Affine action on the slice induced by a quotient-space matrix, as a
    /// linear part plus translation vector in chart coordinates.
    pub fn induced_affine(&self, g_quot: &QMat) -> Result<(QMat, QVec)> {
        let m = self.m_proj.nrows();
        // H on M: H . m_proj = m_proj . g.
        let section = right_inverse(&self.m_proj)?;
        let h = self.m_proj.mul_mat(g_quot).mul_mat(&section);
        if h.mul_mat(&self.m_proj) != self.m_proj.mul_mat(g_quot) {
            return Err(Error::NotATranslation(
                "element does not preserve the vertical subspace".to_string(),
            ));
        }
        // H must preserve the F-level sets.
        let phi_h = h.transpose().mul_vec(&self.phi);
        if phi_h != self.phi {
            return Err(Error::NotATranslation(
                "element does not preserve the fibre functional on W".to_string(),
            ));
        }
        let w = self.dirs.len();
        if w == 0 {
            return Ok((QMat::identity(0), QVec::zero(0)));
        }
        let mut lin_cols = Vec::with_capacity(w);
        for d in &self.dirs {
            let img = h.mul_vec(d);
            let cols = QMat::from_rows(self.dirs.clone()).transpose();
            let (c, _) = solve_linear(&cols, &img)?;
            lin_cols.push(c.ok_or_else(|| {
                Error::NotATranslation("image of slice direction leaves the slice".to_string())
            })?);
        }
        let lin = QMat::from_rows(lin_cols).transpose();
        let shift = h.mul_vec(&self.base).sub(&self.base);
        let vec = self.coords_on_slice(&self.base.add(&shift))?;
        let _ = m;
        Ok((lin, vec))
    }
}

/// Right inverse of a full-row-rank matrix (a section of the projection).
fn right_inverse(a: &QMat) -> Result<QMat> {
    let m = a.nrows();
    let mut cols = Vec::with_capacity(m);
    for i in 0..m {
        let (sol, _) = solve_linear(a, &QVec::unit(m, i))?;
        cols.push(sol.ok_or_else(|| Error::input("projection is not surjective".to_string()))?);
    }
    Ok(QMat::from_rows(cols).transpose())
}

// ---------------------------------------------------------------------------
// Group element validation
// ---------------------------------------------------------------------------

/// Dual action on curve classes: the map g_vee with (g x).(g_vee c) = x.c.
pub fn dual_action(inst: &VarietyInstance, g: &QMat) -> Result<QMat> {
    let p = &inst.lattice.pairing;
    let g_inv_t = g.inverse()?.transpose();
    Ok(p.inverse()?.mul_mat(&g_inv_t).mul_mat(p))
}

/// Induced matrix on quotient coordinates. Errors when g does not preserve
/// T(X/S).
pub fn quotient_action(inst: &VarietyInstance, g: &QMat) -> Result<QMat> {
    let q = &inst.quotient.map;
    let section = right_inverse(q)?;
    let gq = q.mul_mat(g).mul_mat(&section);
    if gq.mul_mat(q) != q.mul_mat(g) {
        return Err(Error::input(
            "element does not preserve the relatively trivial subspace".to_string(),
        ));
    }
    Ok(gq)
}

/// Check every invariant a group element must satisfy; the returned list is
/// empty exactly when the element is valid.
pub fn validate_group_element(inst: &VarietyInstance, g: &QMat) -> Vec<String> {
    let mut out = Vec::new();
    if g.nrows() != inst.rank() || g.ncols() != inst.rank() {
        return vec!["matrix size does not match the lattice rank".to_string()];
    }
    if !g.is_integral() {
        out.push("matrix has non-integer entries".to_string());
    }
    let det = g.det();
    if det != crate::exactq::rat_i(1) && det != crate::exactq::rat_i(-1) {
        out.push("determinant is not ±1".to_string());
        return out;
    }
    let dual = match dual_action(inst, g) {
        Ok(d) => d,
        Err(_) => {
            out.push("dual action is not defined".to_string());
            return out;
        }
    };
    if !dual.is_integral() {
        out.push("dual action on curve classes is not integral".to_string());
    }
    if dual.mul_vec(&inst.fibration.fibre_class) != inst.fibration.fibre_class {
        out.push("dual action does not fix the fibre class F".to_string());
    }
    if g.mul_vec(&inst.canonical_class) != inst.canonical_class {
        out.push("does not fix the canonical class K".to_string());
    }
    let gq = match quotient_action(inst, g) {
        Ok(m) => m,
        Err(_) => {
            out.push("does not preserve the relatively trivial subspace T(X/S)".to_string());
            return out;
        }
    };
    // Closure of the relative movable cone, including the F-halfspace.
    let movable = (|| -> Result<PolyCone> {
        let mut ineqs = vec![inst.f_functional()];
        for fc in &inst.fibration.fibral_classes {
            ineqs.push(inst.curve_functional(fc)?);
        }
        build_dual_pair(ConeInput::Inequalities(ineqs), inst.quotient_dim())
    })();
    match movable {
        Ok(cone) => match map_cone(&cone, &gq) {
            Ok(img) if img == cone => {}
            _ => out.push("does not preserve movable cone".to_string()),
        },
        Err(e) => out.push(format!("movable cone construction failed: {e}")),
    }
    out
}

/// Result of the translation analysis of a validated element.
#[derive(Debug, Clone)]
pub struct TranslationCertificate {
    pub label: String,
    pub vector: QVec,
}

/// Compute the induced map on the slice W(X/S) and certify that its linear
/// part is the identity, returning the translation vector.
pub fn quotient_translation(inst: &VarietyInstance, g: &QMat) -> Result<TranslationCertificate> {
    let chart = SliceChart::build(inst)?;
    let gq = quotient_action(inst, g)
        .map_err(|e| Error::NotATranslation(e.to_string()))?;
    let (lin, vec) = chart.induced_affine(&gq)?;
    if !lin.is_identity() {
        return Err(Error::NotATranslation(
            "induced linear part on W is not the identity".to_string(),
        ));
    }
    Ok(TranslationCertificate {
        label: String::new(),
        vector: vec,
    })
}

// ---------------------------------------------------------------------------
// Translation lattice and exact closest-vector reduction
// ---------------------------------------------------------------------------

/// The lattice of slice translations generated by the instance's group
/// generators, with bookkeeping to express lattice vectors as generator
/// exponents.
#[derive(Debug, Clone)]
pub struct TranslationLattice {
    pub chart: SliceChart,
    pub gen_vectors: Vec<QVec>,
    /// Independent basis rows of the lattice (slice coordinates).
    pub basis: Vec<QVec>,
    /// Exponent expression of each basis row over the generators.
    pub basis_exponents: Vec<Vec<i64>>,
    dim: usize,
}

/// Hermite-style integer row reduction tracking a unimodular transform. The
/// nonzero rows of the result are a basis of the row lattice; the same rows
/// of the transform express them over the input rows.
fn integer_row_reduce(mut a: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut u: Vec<Vec<BigInt>> = (0..nrows)
        .map(|i| {
            (0..nrows)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut row = 0usize;
    for col in 0..ncols {
        loop {
            // Smallest nonzero entry in this column at or below `row`.
            let mut pivot: Option<usize> = None;
            for i in row..nrows {
                if !a[i][col].is_zero()
                    && pivot.is_none_or(|p| a[i][col].magnitude() < a[p][col].magnitude())
                {
                    pivot = Some(i);
                }
            }
            let Some(p) = pivot else { break };
            a.swap(row, p);
            u.swap(row, p);
            let mut any = false;
            for i in (row + 1)..nrows {
                if a[i][col].is_zero() {
                    continue;
                }
                let qout = {
                    let (qv, _) = a[i][col].div_rem(&a[row][col]);
                    qv
                };
                if !qout.is_zero() {
                    for j in 0..ncols {
                        let sub = &qout * &a[row][j];
                        a[i][j] -= sub;
                    }
                    for j in 0..nrows {
                        let sub = &qout * &u[row][j];
                        u[i][j] -= sub;
                    }
                }
                if !a[i][col].is_zero() {
                    any = true;
                }
            }
            if !any {
                row += 1;
                break;
            }
        }
        if row == nrows {
            break;
        }
    }
    (a, u)
}

impl TranslationLattice {
    /// Build from the instance's generators. Errors if any generator fails
    /// the translation analysis.
    pub fn build(inst: &VarietyInstance) -> Result<TranslationLattice> {
        let chart = SliceChart::build(inst)?;
        let w = chart.dim();
        let mut gen_vectors = Vec::new();
        for g in &inst.group_generators {
            let cert = quotient_translation(inst, &g.matrix)?;
            gen_vectors.push(cert.vector);
        }
        if gen_vectors.is_empty() || w == 0 {
            return Ok(TranslationLattice {
                chart,
                gen_vectors,
                basis: Vec::new(),
                basis_exponents: Vec::new(),
                dim: w,
            });
        }
        // Scale to a common denominator and reduce over the integers.
        let mut denom = BigInt::one();
        for v in &gen_vectors {
            for e in v.entries() {
                denom = denom.lcm(e.denom());
            }
        }
        let int_rows: Vec<Vec<BigInt>> = gen_vectors
            .iter()
            .map(|v| {
                v.entries()
                    .iter()
                    .map(|e| e.numer() * (&denom / e.denom()))
                    .collect()
            })
            .collect();
        let (reduced, transform) = integer_row_reduce(int_rows);
        let mut basis = Vec::new();
        let mut basis_exponents = Vec::new();
        for (i, r) in reduced.iter().enumerate() {
            if r.iter().all(Zero::is_zero) {
                continue;
            }
            basis.push(QVec::new(
                r.iter()
                    .map(|x| Rational::new(x.clone(), denom.clone()))
                    .collect(),
            ));
            basis_exponents.push(
                transform[i]
                    .iter()
                    .map(|x| i64::try_from(x.clone()).expect("small exponents"))
                    .collect(),
            );
        }
        Ok(TranslationLattice {
            chart,
            gen_vectors,
            basis,
            basis_exponents,
            dim: w,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Exact closest lattice vector to `target` (Euclidean metric in chart
    /// coordinates; ties broken by lexicographically smallest lattice
    /// vector). Returns the lattice vector and its generator exponents.
    pub fn closest(&self, target: &QVec) -> (QVec, Vec<i64>) {
        let n_gens = self.gen_vectors.len();
        if self.basis.is_empty() {
            return (QVec::zero(self.dim), vec![0; n_gens]);
        }
        let (v, basis_coeffs) = closest_lattice_vector(&self.basis, target);
        let mut exps = vec![0i64; n_gens];
        for (i, c) in basis_coeffs.iter().enumerate() {
            let ci = i64::try_from(c.clone()).expect("small coefficient");
            for (k, e) in self.basis_exponents[i].iter().enumerate() {
                exps[k] += ci * e;
            }
        }
        (v, exps)
    }

    /// The Voronoi-relevant vector candidates of the lattice: one minimal
    /// vector per nonzero class of L/2L (with its negative). The Dirichlet
    /// cell is exactly the intersection of the bisector halfspaces of these.
    pub fn voronoi_candidates(&self) -> Vec<QVec> {
        let r = self.basis.len();
        if r == 0 {
            return Vec::new();
        }
        let doubled: Vec<QVec> = self
            .basis
            .iter()
            .map(|b| b.scale(&Rational::from_integer(2.into())))
            .collect();
        let mut out = Vec::new();
        for mask in 1u32..(1 << r) {
            let mut w = QVec::zero(self.dim);
            for (i, b) in self.basis.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    w = w.add(b);
                }
            }
            let (nearest, _) = closest_lattice_vector(&doubled, &w);
            let v = w.sub(&nearest);
            out.push(v.clone());
            out.push(v.neg());
        }
        out
    }

    /// The group element realizing translation by `-lambda` where lambda has
    /// generator exponents `exps` (used to pull a point back into the cell).
    pub fn element_for_exponents(&self, inst: &VarietyInstance, exps: &[i64]) -> QMat {
        let rank = inst.rank();
        let mut g = QMat::identity(rank);
        for (k, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let gen = &inst.group_generators[k].matrix;
            let m = if e > 0 {
                gen.clone()
            } else {
                gen.inverse().expect("unimodular generator")
            };
            for _ in 0..e.unsigned_abs() {
                g = m.mul_mat(&g);
            }
        }
        g
    }
}

fn round_nearest(r: &Rational) -> BigInt {
    // floor(r + 1/2): deterministic half-up rounding.
    let shifted = r + Rational::new(BigInt::one(), BigInt::from(2));
    shifted.numer().div_floor(shifted.denom())
}

/// Exact closest vector in the lattice spanned by the (independent) basis
/// rows: Schnorr-Euchner enumeration over rational Gram-Schmidt data, ties
/// broken by the lexicographically smallest lattice vector. Returns the
/// lattice vector and its basis coefficients.
pub fn closest_lattice_vector(basis: &[QVec], target: &QVec) -> (QVec, Vec<BigInt>) {
    let r = basis.len();
    assert!(r > 0, "closest_lattice_vector needs a nonempty basis");
    let mut mu = vec![vec![Rational::zero(); r]; r];
    let mut star: Vec<QVec> = Vec::with_capacity(r);
    let mut star_norm: Vec<Rational> = Vec::with_capacity(r);
    for i in 0..r {
        let mut v = basis[i].clone();
        for j in 0..i {
            let c = basis[i].dot(&star[j]) / &star_norm[j];
            mu[i][j] = c.clone();
            v = v.sub(&star[j].scale(&c));
        }
        let n = v.dot(&v);
        assert!(!n.is_zero(), "lattice basis is independent");
        star.push(v);
        star_norm.push(n);
    }
    let t_coords: Vec<Rational> = (0..r)
        .map(|j| target.dot(&star[j]) / &star_norm[j])
        .collect();

    struct Ctx<'a> {
        basis: &'a [QVec],
        mu: Vec<Vec<Rational>>,
        star_norm: Vec<Rational>,
        t_coords: Vec<Rational>,
        target: &'a QVec,
        best: Option<(Rational, QVec, Vec<BigInt>)>,
    }

    fn search(ctx: &mut Ctx<'_>, level: isize, coeffs: &mut Vec<BigInt>, partial: Rational) {
        let r = ctx.basis.len();
        if level < 0 {
            let mut v = QVec::zero(ctx.target.dim());
            for (i, c) in coeffs.iter().enumerate() {
                v = v.add(&ctx.basis[i].scale(&Rational::from_integer(c.clone())));
            }
            let d = ctx.target.sub(&v);
            let dist = d.dot(&d);
            let better = match &ctx.best {
                None => true,
                Some((bd, bv, _)) => dist < *bd || (dist == *bd && v < *bv),
            };
            if better {
                ctx.best = Some((dist, v, coeffs.clone()));
            }
            return;
        }
        let i = level as usize;
        let mut center = ctx.t_coords[i].clone();
        for j in (i + 1)..r {
            center -= &ctx.mu[j][i] * Rational::from_integer(coeffs[j].clone());
        }
        let c0 = round_nearest(&center);
        // Zigzag outwards until every candidate at the current offset prunes.
        let mut step = 0i64;
        loop {
            let candidates: Vec<BigInt> = if step == 0 {
                vec![c0.clone()]
            } else {
                vec![&c0 + BigInt::from(step), &c0 - BigInt::from(step)]
            };
            let mut alive = false;
            for cand in candidates {
                let diff = Rational::from_integer(cand.clone()) - &center;
                let add = &diff * &diff * &ctx.star_norm[i];
                let total = &partial + &add;
                let prune = match &ctx.best {
                    Some((bd, _, _)) => total > *bd,
                    None => false,
                };
                if !prune {
                    alive = true;
                    coeffs[i] = cand;
                    search(ctx, level - 1, coeffs, total);
                }
            }
            if !alive && step > 0 {
                break;
            }
            step += 1;
        }
        coeffs[i] = BigInt::zero();
    }

    let mut ctx = Ctx {
        basis,
        mu,
        star_norm,
        t_coords,
        target,
        best: None,
    };
    let mut coeffs = vec![BigInt::zero(); r];
    search(&mut ctx, (r - 1) as isize, &mut coeffs, Rational::zero());
    let (_, v, basis_coeffs) = ctx.best.expect("nonempty enumeration");
    (v, basis_coeffs)
}

// ---------------------------------------------------------------------------
// Orbit reduction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct OrbitReduction {
    /// The reducing element acting on divisor classes (apply to the input to
    /// get the representative).
    pub element: QMat,
    /// Exponents of the element over the instance generators. The element is
    /// the product of the generators raised to the negated exponents of the
    /// closest lattice vector.
    pub exponents: Vec<i64>,
    /// Representative in quotient coordinates (for point inputs).
    pub representative: QVec,
}

/// Reduce a quotient-space point with positive F-value into the Dirichlet
/// cell of the translation lattice around `base` (slice coordinates).
pub fn orbit_reduce_point(
    inst: &VarietyInstance,
    lattice: &TranslationLattice,
    x_quot: &QVec,
    base: &QVec,
) -> Result<OrbitReduction> {
    let y = lattice.chart.slice_coords(x_quot)?;
    let (lambda, exps) = lattice.closest(&y.sub(base));
    let neg_exps: Vec<i64> = exps.iter().map(|e| -e).collect();
    let g = lattice.element_for_exponents(inst, &neg_exps);
    let gq = quotient_action(inst, &g)?;
    let reduced = gq.mul_vec(x_quot);
    // The reduced slice image is y - lambda by the translation property.
    debug_assert_eq!(lattice.chart.slice_coords(&reduced)?, y.sub(&lambda));
    Ok(OrbitReduction {
        element: g,
        exponents: neg_exps,
        representative: reduced,
    })
}

// ---------------------------------------------------------------------------
// Fundamental domain predicates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct FundamentalDomainReport {
    pub samples: usize,
    pub coverage_hits: usize,
    pub coverage_failures: Vec<usize>,
    pub words_checked: usize,
    pub disjointness_violations: Vec<String>,
    pub verdict: String,
    /// Set when the group has non-translation elements and reductions fell
    /// back to budgeted word search: the report is budget-limited, never a
    /// completeness claim.
    pub word_budget_limited: bool,
}

/// All nontrivial group words up to the length budget, deduplicated by their
/// matrices, labeled by the generator word.
pub fn group_words(inst: &VarietyInstance, budget: usize) -> Vec<(String, QMat)> {
    let rank = inst.rank();
    let mut letters: Vec<(String, QMat)> = Vec::new();
    for g in &inst.group_generators {
        letters.push((g.label.clone(), g.matrix.clone()));
        if let Ok(inv) = g.matrix.inverse() {
            letters.push((format!("{}^-1", g.label), inv));
        }
    }
    let mut seen: Vec<QMat> = vec![QMat::identity(rank)];
    let mut out: Vec<(String, QMat)> = Vec::new();
    let mut frontier: Vec<(String, QMat)> = vec![(String::new(), QMat::identity(rank))];
    for _ in 0..budget {
        let mut next = Vec::new();
        for (word, m) in &frontier {
            for (l, lm) in &letters {
                let nm = lm.mul_mat(m);
                if seen.contains(&nm) {
                    continue;
                }
                let nw = if word.is_empty() {
                    l.clone()
                } else {
                    format!("{l}·{word}")
                };
                seen.push(nm.clone());
                out.push((nw.clone(), nm.clone()));
                next.push((nw, nm));
            }
        }
        frontier = next;
    }
    out
}

/// Sample-based coverage and exact word-budgeted interior disjointness for a
/// candidate fundamental domain `pi` (a cone in quotient coordinates) inside
/// the relative movable cone.
pub fn fundamental_domain_check(
    inst: &VarietyInstance,
    pi: &PolyCone,
    samples: usize,
    word_budget: usize,
    seed: u64,
) -> Result<FundamentalDomainReport> {
    // Translation subgroups reduce exactly through the lattice; groups with
    // other elements fall back to budgeted word search for the coverage
    // reductions, and the report says so.
    let lattice = match TranslationLattice::build(inst) {
        Ok(l) => Some(l),
        Err(Error::NotATranslation(_)) => None,
        Err(e) => return Err(e),
    };
    let word_budget_limited = lattice.is_none();

    let movable = inst.relative_movable_base()?;
    let f_func = inst.f_functional();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut failures = Vec::new();
    match &lattice {
        Some(lattice) => {
            // Reduction base: barycenter of pi's slice image.
            let base = pi_slice_barycenter(inst, &lattice.chart, pi)?;
            for idx in 0..samples {
                let x = sample_movable_point(&movable, &f_func, &mut rng);
                let red = orbit_reduce_point(inst, &lattice, &x, &base)?;
                if pi.contains(&red.representative) {
                    hits += 1;
                } else {
                    failures.push(idx);
                }
            }
        }
        None => {
            let words = group_words(inst, word_budget);
            for idx in 0..samples {
                let x = sample_movable_point(&movable, &f_func, &mut rng);
                let mut covered = pi.contains(&x);
                if !covered {
                    for (_, w) in &words {
                        let Ok(wq) = quotient_action(inst, w) else {
                            continue;
                        };
                        if pi.contains(&wq.mul_vec(&x)) {
                            covered = true;
                            break;
                        }
                    }
                }
                if covered {
                    hits += 1;
                } else {
                    failures.push(idx);
                }
            }
        }
    }

    let mut violations = Vec::new();
    let mut words_checked = 0usize;
    // Translation groups over a trivial vertical space admit an exact
    // midpoint criterion once the domain's slice section is centrally
    // symmetric: Int A and Int A + lambda meet exactly when the midpoint
    // c + lambda/2 is interior. That reduces each word to one membership
    // test and lets the word ball be enumerated as exponent vectors.
    let symmetric_center = match &lattice {
        Some(lattice) if lattice.chart.m_proj.is_identity() && lattice.rank() > 0 => {
            slice_symmetry_center(&lattice.chart, pi)
        }
        _ => None,
    };
    match symmetric_center {
        Some(center) if pi.is_full_dim() => {
            let lattice = lattice.as_ref().expect("symmetric path needs the lattice");
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            for exps in exponent_ball(inst.group_generators.len(), word_budget) {
                let mut lambda = QVec::zero(lattice.chart.dim());
                for (k, &e) in exps.iter().enumerate() {
                    lambda = lambda.add(
                        &lattice.gen_vectors[k].scale(&Rational::from_integer(e.into())),
                    );
                }
                if lambda.is_zero() {
                    continue;
                }
                words_checked += 1;
                let mid = center.add(&lambda.scale(&half));
                let point = lattice.chart.point_from_slice(&mid);
                if pi.contains_interior(&point) {
                    violations.push(word_label(inst, &exps));
                }
            }
        }
        _ => {
            let words = group_words(inst, word_budget);
            for (label, w) in &words {
                let wq = match quotient_action(inst, w) {
                    Ok(m) => m,
                    Err(_) => continue,
                };
                if wq.is_identity() {
                    continue;
                }
                words_checked += 1;
                let image = map_cone(pi, &wq)?;
                let inter = intersect(pi, &image)?;
                if pi.is_full_dim() && inter.is_full_dim() {
                    violations.push(label.clone());
                }
            }
        }
    }

    violations.sort();
    violations.dedup();
    let verdict = if failures.is_empty() && violations.is_empty() {
        format!("consistent with fundamental domain up to word budget {word_budget}")
    } else {
        "not a fundamental domain".to_string()
    };
    Ok(FundamentalDomainReport {
        samples,
        coverage_hits: hits,
        coverage_failures: failures,
        words_checked,
        disjointness_violations: violations,
        verdict,
        word_budget_limited,
    })
}

/// Center of symmetry of the cone's slice section, when its vertex set is
/// centrally symmetric; None otherwise.
fn slice_symmetry_center(chart: &SliceChart, pi: &PolyCone) -> Option<QVec> {
    let mut verts = Vec::new();
    for g in pi.generators() {
        verts.push(chart.slice_coords(g).ok()?);
    }
    if verts.is_empty() || !pi.lineality().is_empty() {
        return None;
    }
    let mut center = QVec::zero(chart.dim());
    for v in &verts {
        center = center.add(v);
    }
    center = center.scale(&Rational::new(BigInt::one(), BigInt::from(verts.len())));
    let doubled = center.scale(&Rational::from_integer(2.into()));
    let mut mirrored: Vec<QVec> = verts.iter().map(|v| doubled.sub(v)).collect();
    let mut sorted = verts;
    sorted.sort();
    mirrored.sort();
    (sorted == mirrored).then_some(center)
}

/// Exponent vectors of l1-norm between 1 and `budget`.
fn exponent_ball(gens: usize, budget: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; gens];
    fn rec(i: usize, remaining: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == cur.len() {
            if cur.iter().any(|&e| e != 0) {
                out.push(cur.clone());
            }
            return;
        }
        for e in -remaining..=remaining {
            cur[i] = e;
            rec(i + 1, remaining - e.abs(), cur, out);
        }
        cur[i] = 0;
    }
    if gens > 0 {
        rec(0, budget as i64, &mut cur, &mut out);
    }
    out
}

fn word_label(inst: &VarietyInstance, exps: &[i64]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(k, &e)| {
            let name = &inst.group_generators[k].label;
            if e == 1 {
                name.clone()
            } else {
                format!("{name}^{e}")
            }
        })
        .collect();
    parts.join("·")
}

/// Barycenter of the slice points of a cone's F-positive generators.
pub fn pi_slice_barycenter(
    inst: &VarietyInstance,
    chart: &SliceChart,
    pi: &PolyCone,
) -> Result<QVec> {
    let _ = inst;
    let mut pts = Vec::new();
    for g in pi.generators() {
        if let Ok(y) = chart.slice_coords(g) {
            pts.push(y);
        }
    }
    if pts.is_empty() {
        return Ok(QVec::zero(chart.dim()));
    }
    let mut sum = QVec::zero(chart.dim());
    for p in &pts {
        sum = sum.add(p);
    }
    Ok(sum.scale(&Rational::new(BigInt::one(), BigInt::from(pts.len()))))
}

/// A random rational point of the relative movable cone with positive
/// F-value (rejection sampling on the F-sign).
pub fn sample_movable_point(movable: &PolyCone, f_func: &QVec, rng: &mut ChaCha8Rng) -> QVec {
    let dim = movable.ambient_dim();
    loop {
        let mut x = QVec::zero(dim);
        for g in movable.generators() {
            let num = rng.gen_range(0i64..=20);
            let den = rng.gen_range(1i64..=4);
            x = x.add(&g.scale(&Rational::new(num.into(), den.into())));
        }
        for l in movable.lineality() {
            let num = rng.gen_range(-40i64..=40);
            let den = rng.gen_range(1i64..=4);
            x = x.add(&l.scale(&Rational::new(num.into(), den.into())));
        }
        if f_func.dot(&x).is_positive() {
            return x;
        }
    }
}
