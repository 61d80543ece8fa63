//! Rational polyhedral cones with synchronized generator (V) and inequality
//! (H) descriptions.
//!
//! Conversion runs the double description method with incremental inequality
//! insertion and the rank adjacency test. Lineality is carried explicitly:
//! quotient lattices make images non-pointed, so nothing here assumes
//! pointedness. Generators are stored as primitive integer vectors and sorted,
//! so cone equality is literal field equality and frames hash canonically.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactq::{rref_primitive, QMat, QVec, Rational};

/// A closed rational polyhedral cone.
///
/// `generators` are the extremal rays (primitive, lexicographically sorted),
/// `lineality` is a canonical basis of the largest linear subspace contained
/// in the cone, `inequalities` are the facet normals of the minimal
/// H-description and `equalities` a canonical basis of the implicit equations
/// (nonempty exactly when the cone is not full-dimensional).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyCone {
    ambient_dim: usize,
    generators: Vec<QVec>,
    lineality: Vec<QVec>,
    inequalities: Vec<QVec>,
    equalities: Vec<QVec>,
}

/// Input to [`build_dual_pair`]: one of the two descriptions.
pub enum ConeInput {
    Generators(Vec<QVec>),
    Inequalities(Vec<QVec>),
}

impl PolyCone {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[QVec] {
        &self.generators
    }

    pub fn lineality(&self) -> &[QVec] {
        &self.lineality
    }

    pub fn inequalities(&self) -> &[QVec] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[QVec] {
        &self.equalities
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        self.ambient_dim - self.equalities.len()
    }

    pub fn is_full_dim(&self) -> bool {
        self.equalities.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty() && self.lineality.is_empty()
    }

    /// Closed membership.
    pub fn contains(&self, x: &QVec) -> bool {
        self.equalities.iter().all(|e| e.dot(x).is_zero())
            && self.inequalities.iter().all(|v| v.dot(x) >= Rational::zero())
    }

    /// Topological interior membership. Lower-dimensional cones have empty
    /// interior, so this is false whenever implicit equalities exist.
    pub fn contains_interior(&self, x: &QVec) -> bool {
        self.is_full_dim()
            && self.inequalities.iter().all(|v| v.dot(x) > Rational::zero())
    }

    /// A deterministic point of the relative interior (sum of the extremal
    /// rays; zero for the trivial cone).
    pub fn relative_interior_point(&self) -> QVec {
        let mut p = QVec::zero(self.ambient_dim);
        for g in &self.generators {
            p = p.add(g);
        }
        p
    }

    /// All vectors spanning the cone: extremal rays plus lineality basis.
    pub fn span_vectors(&self) -> Vec<QVec> {
        let mut v = self.generators.clone();
        v.extend(self.lineality.iter().cloned());
        v
    }

    /// The H-description as a single inequality list, with each implicit
    /// equality expanded into an opposite pair.
    pub fn inequalities_with_equalities(&self) -> Vec<QVec> {
        let mut out = self.inequalities.clone();
        for e in &self.equalities {
            out.push(e.clone());
            out.push(e.neg());
        }
        out
    }
}

/// Ray of the incremental double description computation.
struct Ray {
    v: QVec,
    /// Indices of the processed inequalities tight at this ray.
    zero_set: Vec<bool>,
}

struct DdState {
    dim: usize,
    lineality: Vec<QVec>,
    rays: Vec<Ray>,
    processed: Vec<QVec>,
}

impl DdState {
    fn new(dim: usize) -> Self {
        DdState {
            dim,
            lineality: (0..dim).map(|i| QVec::unit(dim, i)).collect(),
            rays: Vec::new(),
            processed: Vec::new(),
        }
    }

    fn insert(&mut self, a: &QVec) {
        let idx = self.processed.len();
        self.processed.push(a.clone());
        if a.is_zero() {
            for r in &mut self.rays {
                r.zero_set.push(true);
            }
            return;
        }

        // If the inequality is not identically zero on the lineality space,
        // split off a pivot direction: the lineality drops by one and the
        // pivot becomes a ray on the positive side. Existing rays are shifted
        // into the hyperplane, which leaves all earlier tight sets unchanged.
        if let Some(pi) = self.lineality.iter().position(|l| !a.dot(l).is_zero()) {
            let mut l0 = self.lineality.remove(pi);
            if a.dot(&l0) < Rational::zero() {
                l0 = l0.neg();
            }
            let al0 = a.dot(&l0);
            for l in &mut self.lineality {
                let c = l.dot(a);
                if !c.is_zero() {
                    *l = l.scale(&al0).sub(&l0.scale(&c)).primitive();
                }
            }
            for r in &mut self.rays {
                let c = r.v.dot(a);
                if !c.is_zero() {
                    r.v = r.v.scale(&al0).sub(&l0.scale(&c)).primitive();
                }
                r.zero_set.push(true);
            }
            let mut zs = vec![true; idx];
            zs.push(false);
            self.rays.push(Ray {
                v: l0.primitive(),
                zero_set: zs,
            });
            return;
        }

        let vals: Vec<Rational> = self.rays.iter().map(|r| r.v.dot(a)).collect();
        let pos: Vec<usize> = (0..self.rays.len())
            .filter(|&i| vals[i] > Rational::zero())
            .collect();
        let neg: Vec<usize> = (0..self.rays.len())
            .filter(|&i| vals[i] < Rational::zero())
            .collect();

        let mut new_rays = Vec::new();
        for (i, r) in self.rays.iter().enumerate() {
            if vals[i] >= Rational::zero() {
                let mut zs = r.zero_set.clone();
                zs.push(vals[i].is_zero());
                new_rays.push(Ray {
                    v: r.v.clone(),
                    zero_set: zs,
                });
            }
        }
        for &p in &pos {
            for &n in &neg {
                if !self.adjacent(p, n) {
                    continue;
                }
                let rp = &self.rays[p];
                let rn = &self.rays[n];
                let combo = rn.v.scale(&vals[p]).sub(&rp.v.scale(&vals[n])).primitive();
                let mut zs: Vec<bool> = rp
                    .zero_set
                    .iter()
                    .zip(&rn.zero_set)
                    .map(|(x, y)| *x && *y)
                    .collect();
                zs.push(true);
                new_rays.push(Ray { v: combo, zero_set: zs });
            }
        }
        self.rays = new_rays;
    }

    /// Rank adjacency test: two extremal rays are adjacent exactly when the
    /// inequalities tight at both have rank `d - dim(lineality) - 2`.
    fn adjacent(&self, p: usize, n: usize) -> bool {
        let target = self.dim - self.lineality.len() - 2;
        // Tight sets cover the inequalities processed before the current one.
        let seen = self.rays[p].zero_set.len();
        let common: Vec<QVec> = (0..seen)
            .filter(|&k| self.rays[p].zero_set[k] && self.rays[n].zero_set[k])
            .map(|k| self.processed[k].clone())
            .collect();
        if common.len() < target {
            return false;
        }
        QMat::from_rows(common).rank() == target
    }
}

/// Run double description on an inequality list, producing the extremal rays
/// and a lineality basis of `{x : a.x >= 0 for all a}`.
fn dd_v_from_h(dim: usize, ineqs: &[QVec]) -> (Vec<QVec>, Vec<QVec>) {
    let mut st = DdState::new(dim);
    for a in ineqs {
        st.insert(a);
    }
    let rays = st.rays.into_iter().map(|r| r.v).collect();
    (rays, st.lineality)
}

/// V-description (extremal rays, lineality basis) of an inequality system,
/// without minimizing the H-side. Cheaper than [`build_dual_pair`] when only
/// the point set matters (emptiness and span tests in enumeration loops).
pub fn v_rep_from_inequalities(dim: usize, ineqs: &[QVec]) -> (Vec<QVec>, Vec<QVec>) {
    dd_v_from_h(dim, ineqs)
}

fn sort_dedupe(mut v: Vec<QVec>) -> Vec<QVec> {
    v.sort();
    v.dedup();
    v
}

/// Reduce a vector modulo the span of canonical (RREF, primitive) rows by
/// clearing its pivot-column entries. Rays are only well defined modulo the
/// lineality space, and facet normals modulo the implicit equalities; this
/// fixes one representative per class so cone equality is field equality.
fn reduce_mod_rows(v: &QVec, rows: &[QVec]) -> QVec {
    let mut out = v.clone();
    for row in rows {
        let pivot = row
            .entries()
            .iter()
            .position(|x| !x.is_zero())
            .expect("canonical rows are nonzero");
        let c = out.get(pivot) / row.get(pivot);
        if !c.is_zero() {
            out = out.sub(&row.scale(&c));
        }
    }
    out.primitive()
}

fn canonical_rays(rays: Vec<QVec>, modulus: &[QVec]) -> Vec<QVec> {
    sort_dedupe(
        rays.into_iter()
            .map(|r| reduce_mod_rows(&r, modulus))
            .collect(),
    )
}

/// Build a fully synchronized cone from either description. Both output
/// representations are minimal: extremal rays plus canonical lineality on the
/// V side, facet normals plus canonical implicit equalities on the H side.
pub fn build_dual_pair(input: ConeInput, ambient_dim: usize) -> Result<PolyCone> {
    let check = |vs: &[QVec]| -> Result<()> {
        for v in vs {
            if v.dim() != ambient_dim {
                return Err(Error::input(format!(
                    "vector of dim {} in ambient dim {}",
                    v.dim(),
                    ambient_dim
                )));
            }
        }
        Ok(())
    };
    let cone = match input {
        ConeInput::Inequalities(hs) => {
            check(&hs)?;
            from_inequality_list(ambient_dim, &hs)
        }
        ConeInput::Generators(gs) => {
            check(&gs)?;
            // C* has H-description given by the generators; its V-description
            // is the minimal H-data of C, and dualizing once more gives the
            // minimal V-data of C.
            let (ineqs, eqs) = dd_v_from_h(ambient_dim, &gs);
            let mut hs: Vec<QVec> = ineqs;
            for e in &eqs {
                hs.push(e.clone());
                hs.push(e.neg());
            }
            from_inequality_list(ambient_dim, &hs)
        }
    };
    debug_assert!(cross_check(&cone));
    Ok(cone)
}

fn from_inequality_list(ambient_dim: usize, hs: &[QVec]) -> PolyCone {
    let hs: Vec<QVec> = hs.iter().map(QVec::primitive).collect();
    let (rays, lin) = dd_v_from_h(ambient_dim, &hs);
    // Dualize back to obtain the minimal H-description.
    let mut dual_input: Vec<QVec> = rays.clone();
    for l in &lin {
        dual_input.push(l.clone());
        dual_input.push(l.neg());
    }
    let (facets, implicit) = dd_v_from_h(ambient_dim, &dual_input);
    let lineality = rref_primitive(&lin, ambient_dim);
    let equalities = rref_primitive(&implicit, ambient_dim);
    PolyCone {
        ambient_dim,
        generators: canonical_rays(rays, &lineality),
        lineality,
        inequalities: canonical_rays(facets, &equalities),
        equalities,
    }
}

/// Every generator satisfies every inequality; lineality is annihilated.
fn cross_check(c: &PolyCone) -> bool {
    c.generators.iter().all(|g| c.contains(g))
        && c.lineality.iter().all(|l| {
            c.inequalities.iter().all(|v| v.dot(l).is_zero())
                && c.equalities.iter().all(|e| e.dot(l).is_zero())
        })
}

/// The whole ambient space as a cone.
pub fn full_space(dim: usize) -> PolyCone {
    PolyCone {
        ambient_dim: dim,
        generators: Vec::new(),
        lineality: (0..dim).map(|i| QVec::unit(dim, i)).collect(),
        inequalities: Vec::new(),
        equalities: Vec::new(),
    }
}

/// The dual cone `{y : x.y >= 0 for all x in c}`.
pub fn dual(c: &PolyCone) -> Result<PolyCone> {
    let mut hs = c.generators().to_vec();
    for l in c.lineality() {
        hs.push(l.clone());
        hs.push(l.neg());
    }
    build_dual_pair(ConeInput::Inequalities(hs), c.ambient_dim())
}

/// Intersection: concatenate H-descriptions and minimize.
pub fn intersect(a: &PolyCone, b: &PolyCone) -> Result<PolyCone> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::input(format!(
            "intersect: ambient dims {} vs {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    let mut hs = a.inequalities_with_equalities();
    hs.extend(b.inequalities_with_equalities());
    build_dual_pair(ConeInput::Inequalities(hs), a.ambient_dim())
}

/// Image of a cone under an invertible linear map: generators map directly,
/// inequalities by the inverse transpose. Minimality is preserved, so no
/// re-conversion is needed.
pub fn map_cone(c: &PolyCone, m: &QMat) -> Result<PolyCone> {
    let n = c.ambient_dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::input("map_cone: matrix size mismatch".to_string()));
    }
    let minv = m
        .inverse()
        .map_err(|_| Error::input("map_cone: singular matrix".to_string()))?;
    let minv_t = minv.transpose();
    let lin = rref_primitive(
        &c.lineality()
            .iter()
            .map(|l| m.mul_vec(l))
            .collect::<Vec<_>>(),
        n,
    );
    let eqs = rref_primitive(
        &c.equalities()
            .iter()
            .map(|e| minv_t.mul_vec(e))
            .collect::<Vec<_>>(),
        n,
    );
    let gens = canonical_rays(
        c.generators().iter().map(|g| m.mul_vec(g)).collect(),
        &lin,
    );
    let ineqs = canonical_rays(
        c.inequalities().iter().map(|v| minv_t.mul_vec(v)).collect(),
        &eqs,
    );
    let out = PolyCone {
        ambient_dim: n,
        generators: gens,
        lineality: lin,
        inequalities: ineqs,
        equalities: eqs,
    };
    debug_assert!(cross_check(&out));
    Ok(out)
}

/// A cone together with functionals that must be strictly positive for
/// membership (the open-face pieces of the relative cones).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeWithOpenFaces {
    pub base: PolyCone,
    pub strict_functionals: Vec<QVec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipMode {
    Closed,
    Interior,
}

impl ConeWithOpenFaces {
    pub fn new(base: PolyCone, strict_functionals: Vec<QVec>) -> Self {
        ConeWithOpenFaces {
            base,
            strict_functionals,
        }
    }

    /// Closed mode: base membership plus all strict functionals > 0.
    /// Interior mode: every functional of a full-dimensional base strictly
    /// positive (and the strict functionals as well).
    pub fn membership(&self, x: &QVec, mode: MembershipMode) -> bool {
        match mode {
            MembershipMode::Closed => {
                self.base.contains(x)
                    && self
                        .strict_functionals
                        .iter()
                        .all(|f| f.dot(x) > Rational::zero())
            }
            MembershipMode::Interior => {
                self.base.contains_interior(x)
                    && self
                        .strict_functionals
                        .iter()
                        .all(|f| f.dot(x) > Rational::zero())
            }
        }
    }
}

/// Does the (convex) cone `probe` contain a point of the interior of `c`?
/// Since a convex set inside the boundary of `c` must lie inside a single
/// facet hyperplane, it suffices to check that no facet annihilates all of
/// the intersection.
pub fn meets_interior(c: &PolyCone, probe: &PolyCone) -> Result<bool> {
    let inter = intersect(c, probe)?;
    Ok(meets_interior_with(c, &inter.span_vectors()))
}

/// As [`meets_interior`], with the intersection's spanning vectors (rays and
/// lineality) already computed.
pub fn meets_interior_with(c: &PolyCone, intersection_span: &[QVec]) -> bool {
    if !c.is_full_dim() || intersection_span.is_empty() {
        return false;
    }
    !c.inequalities()
        .iter()
        .any(|f| intersection_span.iter().all(|g| f.dot(g).is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::rat_i;

    fn gens(c: &PolyCone) -> Vec<Vec<i64>> {
        c.generators()
            .iter()
            .map(|g| {
                g.entries()
                    .iter()
                    .map(|r| {
                        assert!(r.denom() == &num_bigint::BigInt::from(1));
                        i64::try_from(r.numer().clone()).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn octant_is_self_dual() {
        let c = build_dual_pair(
            ConeInput::Generators(vec![
                QVec::from_i64(&[1, 0, 0]),
                QVec::from_i64(&[0, 1, 0]),
                QVec::from_i64(&[0, 0, 1]),
            ]),
            3,
        )
        .unwrap();
        assert_eq!(gens(&c), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        let mut ineqs = c.inequalities().to_vec();
        ineqs.sort();
        assert_eq!(
            ineqs,
            vec![
                QVec::from_i64(&[0, 0, 1]),
                QVec::from_i64(&[0, 1, 0]),
                QVec::from_i64(&[1, 0, 0])
            ]
        );
        assert!(c.equalities().is_empty() && c.lineality().is_empty());
    }

    #[test]
    fn two_dim_wedge_inequalities() {
        let c = build_dual_pair(
            ConeInput::Generators(vec![QVec::from_i64(&[1, 0]), QVec::from_i64(&[1, 1])]),
            2,
        )
        .unwrap();
        // {y >= 0, x - y >= 0}
        assert_eq!(
            c.inequalities(),
            &[QVec::from_i64(&[0, 1]), QVec::from_i64(&[1, -1])]
        );
    }

    /// Independent oracle: enumerate candidate rays from all (d-1)-subsets of
    /// the inequalities, keep members whose tight set has rank d-1.
    fn brute_force_rays(dim: usize, ineqs: &[QVec]) -> Vec<QVec> {
        let n = ineqs.len();
        let mut found: Vec<QVec> = Vec::new();
        let mut subset = vec![0usize; dim - 1];
        fn rec(
            start: usize,
            k: usize,
            n: usize,
            subset: &mut Vec<usize>,
            depth: usize,
            dim: usize,
            ineqs: &[QVec],
            found: &mut Vec<QVec>,
        ) {
            if depth == k {
                let rows: Vec<QVec> = subset.iter().map(|&i| ineqs[i].clone()).collect();
                let mat = QMat::from_rows(rows);
                let ker = crate::exactq::kernel_basis(&mat);
                if ker.len() != 1 {
                    return;
                }
                for cand in [ker[0].primitive(), ker[0].primitive().neg()] {
                    if ineqs.iter().all(|v| v.dot(&cand) >= Rational::zero()) {
                        let tight: Vec<QVec> = ineqs
                            .iter()
                            .filter(|v| v.dot(&cand).is_zero())
                            .cloned()
                            .collect();
                        if QMat::from_rows(tight).rank() == dim - 1
                            && !found.contains(&cand)
                        {
                            found.push(cand);
                        }
                    }
                }
                return;
            }
            for i in start..n {
                subset[depth] = i;
                rec(i + 1, k, n, subset, depth + 1, dim, ineqs, found);
            }
        }
        rec(0, dim - 1, n, &mut subset, 0, dim, ineqs, &mut found);
        found.sort();
        found
    }

    #[test]
    fn extremal_rays_from_inequalities_match_brute_force() {
        let ineqs = vec![
            QVec::from_i64(&[1, 0, 0]),
            QVec::from_i64(&[0, 1, 0]),
            QVec::from_i64(&[0, 0, 1]),
            QVec::from_i64(&[1, -1, -1]),
        ];
        let expected = brute_force_rays(3, &ineqs);
        assert_eq!(
            expected,
            vec![
                QVec::from_i64(&[1, 0, 0]),
                QVec::from_i64(&[1, 0, 1]),
                QVec::from_i64(&[1, 1, 0])
            ]
        );
        let c = build_dual_pair(ConeInput::Inequalities(ineqs), 3).unwrap();
        assert_eq!(c.generators(), expected.as_slice());
    }

    #[test]
    fn trivial_and_full_cones() {
        let trivial = build_dual_pair(ConeInput::Generators(vec![]), 3).unwrap();
        assert!(trivial.is_trivial());
        assert_eq!(trivial.dim(), 0);
        assert!(trivial.contains(&QVec::zero(3)));
        assert!(!trivial.contains(&QVec::from_i64(&[1, 0, 0])));

        let full = build_dual_pair(ConeInput::Inequalities(vec![]), 2).unwrap();
        assert_eq!(full.dim(), 2);
        assert_eq!(full.lineality().len(), 2);
        assert!(full.contains(&QVec::from_i64(&[-5, 3])));
    }

    #[test]
    fn intersect_idempotent_and_lineality() {
        let octant = build_dual_pair(
            ConeInput::Inequalities(vec![
                QVec::from_i64(&[1, 0, 0]),
                QVec::from_i64(&[0, 1, 0]),
                QVec::from_i64(&[0, 0, 1]),
            ]),
            3,
        )
        .unwrap();
        assert_eq!(intersect(&octant, &octant).unwrap(), octant);

        let a = build_dual_pair(ConeInput::Inequalities(vec![QVec::from_i64(&[1, 0])]), 2).unwrap();
        let b = build_dual_pair(ConeInput::Inequalities(vec![QVec::from_i64(&[-1, 0])]), 2).unwrap();
        let line = intersect(&a, &b).unwrap();
        assert!(line.generators().is_empty());
        assert_eq!(line.lineality(), &[QVec::from_i64(&[0, 1])]);
        assert_eq!(line.dim(), 1);
    }

    #[test]
    fn intersect_two_wedges() {
        let c1 = build_dual_pair(
            ConeInput::Generators(vec![QVec::from_i64(&[1, 0]), QVec::from_i64(&[1, 2])]),
            2,
        )
        .unwrap();
        let c2 = build_dual_pair(
            ConeInput::Generators(vec![QVec::from_i64(&[1, 1]), QVec::from_i64(&[0, 1])]),
            2,
        )
        .unwrap();
        let inter = intersect(&c1, &c2).unwrap();
        assert_eq!(gens(&inter), vec![vec![1, 1], vec![1, 2]]);
        // Brute-force membership consistency on a small integer grid.
        for x in -4i64..=4 {
            for y in -4i64..=4 {
                let p = QVec::from_i64(&[x, y]);
                assert_eq!(
                    inter.contains(&p),
                    c1.contains(&p) && c2.contains(&p),
                    "mismatch at ({x},{y})"
                );
            }
        }
    }

    #[test]
    fn map_cone_examples() {
        let c = build_dual_pair(
            ConeInput::Generators(vec![QVec::from_i64(&[1, 0]), QVec::from_i64(&[0, 1])]),
            2,
        )
        .unwrap();
        let id = QMat::identity(2);
        assert_eq!(map_cone(&c, &id).unwrap(), c);

        let m = QMat::from_i64(&[&[1, 0], &[1, 1]]);
        let img = map_cone(&c, &m).unwrap();
        assert_eq!(gens(&img), vec![vec![0, 1], vec![1, 1]]);

        let sing = QMat::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(map_cone(&c, &sing).is_err());
    }

    #[test]
    fn membership_modes() {
        let octant = build_dual_pair(
            ConeInput::Inequalities(vec![
                QVec::from_i64(&[1, 0, 0]),
                QVec::from_i64(&[0, 1, 0]),
                QVec::from_i64(&[0, 0, 1]),
            ]),
            3,
        )
        .unwrap();
        let cone = ConeWithOpenFaces::new(octant, vec![]);
        assert!(cone.membership(&QVec::from_i64(&[1, 1, 1]), MembershipMode::Interior));
        assert!(!cone.membership(&QVec::from_i64(&[1, 0, 1]), MembershipMode::Interior));
        assert!(cone.membership(&QVec::from_i64(&[1, 0, 1]), MembershipMode::Closed));

        // Strict functional fails at the origin.
        let base = build_dual_pair(
            ConeInput::Inequalities(vec![QVec::from_i64(&[1, 0]), QVec::from_i64(&[0, 1])]),
            2,
        )
        .unwrap();
        let with_strict = ConeWithOpenFaces::new(base, vec![QVec::from_i64(&[1, 1])]);
        assert!(!with_strict.membership(&QVec::zero(2), MembershipMode::Closed));
        assert!(with_strict.membership(&QVec::from_i64(&[1, 0]), MembershipMode::Closed));
    }

    #[test]
    fn interior_implies_closed_and_needs_full_dim() {
        // A 1-dimensional cone in the plane has empty interior.
        let ray = build_dual_pair(ConeInput::Generators(vec![QVec::from_i64(&[1, 1])]), 2).unwrap();
        assert!(!ray.is_full_dim());
        assert!(!ray.contains_interior(&QVec::from_i64(&[1, 1])));
        assert!(ray.contains(&QVec::from_i64(&[2, 2])));
    }

    #[test]
    fn extremal_rays_are_tight_on_dim_minus_one_facets() {
        let c = build_dual_pair(
            ConeInput::Inequalities(vec![
                QVec::from_i64(&[1, 0, 0]),
                QVec::from_i64(&[0, 1, 0]),
                QVec::from_i64(&[0, 0, 1]),
                QVec::from_i64(&[1, -1, -1]),
            ]),
            3,
        )
        .unwrap();
        for g in c.generators() {
            let tight: Vec<QVec> = c
                .inequalities()
                .iter()
                .filter(|v| v.dot(g).is_zero())
                .cloned()
                .collect();
            assert_eq!(QMat::from_rows(tight).rank(), 2);
        }
    }

    #[test]
    fn meets_interior_distinguishes_boundary_contact() {
        let chamber = build_dual_pair(
            ConeInput::Generators(vec![QVec::from_i64(&[1, 0]), QVec::from_i64(&[1, 1])]),
            2,
        )
        .unwrap();
        let inner_ray =
            build_dual_pair(ConeInput::Generators(vec![QVec::from_i64(&[2, 1])]), 2).unwrap();
        let wall_ray =
            build_dual_pair(ConeInput::Generators(vec![QVec::from_i64(&[1, 1])]), 2).unwrap();
        assert!(meets_interior(&chamber, &inner_ray).unwrap());
        assert!(!meets_interior(&chamber, &wall_ray).unwrap());
    }

    #[test]
    fn dual_of_dual_on_lineality_cone() {
        let c = build_dual_pair(
            ConeInput::Generators(vec![
                QVec::from_i64(&[1, 0]),
                QVec::from_i64(&[-1, 0]),
                QVec::from_i64(&[0, 1]),
            ]),
            2,
        )
        .unwrap();
        assert_eq!(c.lineality(), &[QVec::from_i64(&[1, 0])]);
        assert_eq!(gens(&c), vec![vec![0, 1]]);
        let dd = dual(&dual(&c).unwrap()).unwrap();
        assert_eq!(dd, c);
    }

    #[test]
    fn scaled_generators_normalize() {
        let c = build_dual_pair(
            ConeInput::Generators(vec![
                QVec::new(vec![rat_i(2) / rat_i(3), rat_i(0)]),
                QVec::from_i64(&[4, 0]),
                QVec::from_i64(&[0, 5]),
            ]),
            2,
        )
        .unwrap();
        assert_eq!(gens(&c), vec![vec![0, 1], vec![1, 0]]);
    }
}
