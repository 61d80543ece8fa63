//! Arbitrary-precision rational scalars, vectors and matrices, plus the exact
//! linear-algebra kernels (rank, kernel, solve) everything else is built on.
//!
//! All elimination goes through a single fraction-free Bareiss echelon pass
//! over integer rows; rational inputs are cleared row-wise first. There is no
//! floating point anywhere and no epsilon.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parse a rational from the wire format `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::input(format!("invalid rational numerator in {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::input(format!("invalid rational denominator in {s:?}")))?;
    if d.is_zero() {
        return Err(Error::input(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Serialize a rational to `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_i(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Dense rational vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QVec {
    entries: Vec<Rational>,
}

impl QVec {
    pub fn new(entries: Vec<Rational>) -> Self {
        QVec { entries }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        QVec::new(entries.iter().map(|&x| rat_i(x)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        QVec::new(vec![Rational::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![Rational::zero(); dim];
        v[i] = Rational::one();
        QVec::new(v)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &QVec) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dims");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &QVec) -> QVec {
        assert_eq!(self.dim(), other.dim());
        QVec::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &QVec) -> QVec {
        assert_eq!(self.dim(), other.dim());
        QVec::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> QVec {
        QVec::new(self.entries.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> QVec {
        QVec::new(self.entries.iter().map(|a| -a).collect())
    }

    /// Clear denominators and divide by the gcd of the entries. The sign of
    /// the vector is preserved; the zero vector stays zero.
    pub fn primitive(&self) -> QVec {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = self
            .entries
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = self
            .entries
            .iter()
            .map(|r| r.numer() * (&lcm / r.denom()))
            .collect();
        let gcd = ints
            .iter()
            .fold(BigInt::zero(), |acc, n| acc.gcd(n));
        QVec::new(
            ints.into_iter()
                .map(|n| Rational::from_integer(n / &gcd))
                .collect(),
        )
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|r| r.denom().is_one())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.entries.iter().map(format_rational).collect()
    }
}

/// Dense rational matrix held as a list of rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QMat {
    rows: Vec<QVec>,
    ncols: usize,
}

impl QMat {
    pub fn new(rows: Vec<QVec>, ncols: usize) -> Result<Self> {
        for r in &rows {
            if r.dim() != ncols {
                return Err(Error::input(format!(
                    "matrix row of dim {} in {}-column matrix",
                    r.dim(),
                    ncols
                )));
            }
        }
        Ok(QMat { rows, ncols })
    }

    pub fn from_rows(rows: Vec<QVec>) -> Self {
        let ncols = rows.first().map_or(0, QVec::dim);
        QMat::new(rows, ncols).expect("rows of equal length")
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        QMat::from_rows(rows.iter().map(|r| QVec::from_i64(r)).collect())
    }

    pub fn identity(n: usize) -> Self {
        QMat::from_rows((0..n).map(|i| QVec::unit(n, i)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[QVec] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        self.rows[i].get(j)
    }

    pub fn transpose(&self) -> QMat {
        let rows = (0..self.ncols)
            .map(|j| QVec::new(self.rows.iter().map(|r| r.get(j).clone()).collect()))
            .collect();
        QMat {
            rows,
            ncols: self.nrows(),
        }
    }

    pub fn mul_vec(&self, v: &QVec) -> QVec {
        assert_eq!(self.ncols, v.dim(), "matrix-vector dim mismatch");
        QVec::new(self.rows.iter().map(|r| r.dot(v)).collect())
    }

    pub fn mul_mat(&self, other: &QMat) -> QMat {
        assert_eq!(self.ncols, other.nrows());
        let ot = other.transpose();
        let rows = self
            .rows
            .iter()
            .map(|r| QVec::new(ot.rows.iter().map(|c| r.dot(c)).collect()))
            .collect();
        QMat {
            rows,
            ncols: other.ncols,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.nrows() == self.ncols
            && self.rows.iter().enumerate().all(|(i, r)| {
                r.entries()
                    .iter()
                    .enumerate()
                    .all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
            })
    }

    pub fn is_integral(&self) -> bool {
        self.rows.iter().all(QVec::is_integral)
    }

    pub fn rank(&self) -> usize {
        echelon(self).pivot_cols.len()
    }

    pub fn det(&self) -> Rational {
        assert_eq!(self.nrows(), self.ncols, "determinant of non-square matrix");
        let ech = echelon(self);
        if ech.pivot_cols.len() < self.ncols {
            return Rational::zero();
        }
        // Bareiss leaves det(A) = +/- last pivot / denominator scaling.
        let mut det = ech.last_pivot.clone();
        if ech.row_swaps % 2 == 1 {
            det = -det;
        }
        det / &ech.denom_scale
    }

    pub fn inverse(&self) -> Result<QMat> {
        let n = self.nrows();
        if n != self.ncols {
            return Err(Error::input("inverse of non-square matrix".to_string()));
        }
        let mut cols = Vec::with_capacity(n);
        for i in 0..n {
            let (sol, _) = solve_linear(self, &QVec::unit(n, i))?;
            match sol {
                Some(x) => cols.push(x),
                None => return Err(Error::input("singular matrix".to_string())),
            }
        }
        Ok(QMat::from_rows(cols).transpose())
    }
}

struct Echelon {
    /// Integer echelon rows (Bareiss), one per pivot, in pivot order.
    rows: Vec<Vec<BigInt>>,
    pivot_cols: Vec<usize>,
    row_swaps: usize,
    /// Product of the row scalings applied while clearing denominators.
    denom_scale: Rational,
    last_pivot: Rational,
}

/// Fraction-free Bareiss echelon form. Rational rows are cleared to integer
/// rows first (a positive scaling per row, which changes neither kernel nor
/// row space).
fn echelon(m: &QMat) -> Echelon {
    let ncols = m.ncols();
    let mut denom_scale = Rational::one();
    let mut rows: Vec<Vec<BigInt>> = m
        .rows()
        .iter()
        .map(|r| {
            let lcm = r
                .entries()
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            denom_scale *= Rational::from_integer(lcm.clone());
            r.entries()
                .iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();

    let nrows = rows.len();
    let mut pivot_cols = Vec::new();
    let mut row_swaps = 0usize;
    let mut prev_pivot = BigInt::one();
    let mut rank = 0usize;

    for col in 0..ncols {
        let Some(pr) = (rank..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        if pr != rank {
            rows.swap(pr, rank);
            row_swaps += 1;
        }
        let pivot = rows[rank][col].clone();
        // One-step Bareiss: every row below the pivot is updated, zero entry
        // or not, so the division by the previous pivot stays exact.
        for i in (rank + 1)..nrows {
            let factor = rows[i][col].clone();
            for j in 0..ncols {
                let val = &pivot * &rows[i][j] - &factor * &rows[rank][j];
                rows[i][j] = &val / &prev_pivot;
            }
        }
        prev_pivot = pivot;
        pivot_cols.push(col);
        rank += 1;
        if rank == nrows {
            break;
        }
    }

    rows.truncate(rank);
    Echelon {
        rows,
        pivot_cols,
        row_swaps,
        denom_scale,
        last_pivot: Rational::from_integer(prev_pivot),
    }
}

/// Back-substitute the integer echelon rows into exact rational vectors that
/// solve `rows * x = rhs` on the pivot coordinates, with the free coordinates
/// fixed by `free_assign`.
fn back_substitute(ech: &Echelon, ncols: usize, rhs: &[Rational], free_assign: &[Rational]) -> QVec {
    let mut x = vec![Rational::zero(); ncols];
    let mut free_iter = free_assign.iter();
    let pivot_set: std::collections::HashSet<usize> = ech.pivot_cols.iter().copied().collect();
    for j in 0..ncols {
        if !pivot_set.contains(&j) {
            x[j] = free_iter.next().cloned().unwrap_or_else(Rational::zero);
        }
    }
    for (k, &pc) in ech.pivot_cols.iter().enumerate().rev() {
        let row = &ech.rows[k];
        let mut acc = rhs[k].clone();
        for j in (pc + 1)..ncols {
            if !row[j].is_zero() {
                acc -= Rational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[pc] = acc / Rational::from_integer(row[pc].clone());
    }
    QVec::new(x)
}

/// Solve `A x = b` exactly. Returns one solution (free variables set to zero)
/// when the system is consistent, plus a basis of `ker(A)` in either case.
pub fn solve_linear(a: &QMat, b: &QVec) -> Result<(Option<QVec>, Vec<QVec>)> {
    if a.nrows() != b.dim() {
        return Err(Error::input(format!(
            "solve_linear: {} rows vs rhs dim {}",
            a.nrows(),
            b.dim()
        )));
    }
    let ncols = a.ncols();
    // Augment [A | b] and run the same elimination so consistency falls out.
    let aug_rows: Vec<QVec> = a
        .rows()
        .iter()
        .zip(b.entries())
        .map(|(r, bi)| {
            let mut e = r.entries().to_vec();
            e.push(bi.clone());
            QVec::new(e)
        })
        .collect();
    let aug = QMat::new(aug_rows, ncols + 1)?;
    let ech = echelon(&aug);

    let kernel = kernel_from_echelon(&echelon(a), ncols);
    if ech.pivot_cols.contains(&ncols) {
        return Ok((None, kernel));
    }
    let rhs: Vec<Rational> = ech
        .rows
        .iter()
        .map(|r| Rational::from_integer(r[ncols].clone()))
        .collect();
    // Strip the augmented column before substitution.
    let stripped = Echelon {
        rows: ech.rows.iter().map(|r| r[..ncols].to_vec()).collect(),
        pivot_cols: ech.pivot_cols.clone(),
        row_swaps: ech.row_swaps,
        denom_scale: ech.denom_scale.clone(),
        last_pivot: ech.last_pivot.clone(),
    };
    let x = back_substitute(&stripped, ncols, &rhs, &[]);
    debug_assert_eq!(a.mul_vec(&x), b.clone());
    Ok((Some(x), kernel))
}

fn kernel_from_echelon(ech: &Echelon, ncols: usize) -> Vec<QVec> {
    let pivot_set: std::collections::HashSet<usize> = ech.pivot_cols.iter().copied().collect();
    let free_cols: Vec<usize> = (0..ncols).filter(|j| !pivot_set.contains(j)).collect();
    let zeros = vec![Rational::zero(); ech.pivot_cols.len()];
    free_cols
        .iter()
        .map(|&fc| {
            let assign: Vec<Rational> = free_cols
                .iter()
                .map(|&j| {
                    if j == fc {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            back_substitute(ech, ncols, &zeros, &assign)
        })
        .collect()
}

/// Basis of the kernel of `A`: independent vectors annihilated by `A`
/// spanning `ker(A)`.
pub fn kernel_basis(a: &QMat) -> Vec<QVec> {
    kernel_from_echelon(&echelon(a), a.ncols())
}

/// Reduced row echelon form over the rationals with rows scaled to primitive
/// integer vectors (positive leading entry). Canonical for a given row space,
/// so usable as a subspace fingerprint.
pub fn rref_primitive(rows: &[QVec], dim: usize) -> Vec<QVec> {
    let mut mat: Vec<Vec<Rational>> = rows
        .iter()
        .filter(|r| !r.is_zero())
        .map(|r| r.entries().to_vec())
        .collect();
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(pr) = (rank..mat.len()).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(pr, rank);
        let pivot = mat[rank][col].clone();
        for j in 0..dim {
            mat[rank][j] = &mat[rank][j] / &pivot;
        }
        for i in 0..mat.len() {
            if i != rank && !mat[i][col].is_zero() {
                let f = mat[i][col].clone();
                for j in 0..dim {
                    let sub = &f * &mat[rank][j];
                    mat[i][j] = &mat[i][j] - &sub;
                }
            }
        }
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    mat.truncate(rank);
    mat.into_iter()
        .map(|r| QVec::new(r).primitive())
        .collect()
}
