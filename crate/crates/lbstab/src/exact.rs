//! Exact integer, rational, and quadratic-extension arithmetic.
//!
//! These routines back the floating-point pipeline with exact cross-checks:
//! rank and determinant decisions that must not depend on rounding are
//! re-derived here in arbitrary precision. Background velocities of the form
//! `(p, q, r)/√3` with rational `p, q, r` produce constraint matrices with
//! entries in the field `Q(√3) = {a + b√3}`, so that field is implemented
//! directly.

use num::{BigInt, BigRational, One, Signed, Zero};

/// Fraction-free (Bareiss) elimination on an integer matrix.
///
/// Returns `(rank, det)` where `det` is the exact determinant for square
/// inputs and zero when the matrix is rank-deficient. For non-square inputs
/// the determinant slot is meaningless and returned as zero.
pub fn int_rank_det(matrix: &[Vec<i64>]) -> (usize, BigInt) {
    let rows = matrix.len();
    if rows == 0 {
        return (0, BigInt::one());
    }
    let cols = matrix[0].len();
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();

    let square = rows == cols;
    let mut prev = BigInt::one();
    let mut sign = 1i8;
    let mut rank = 0usize;
    let mut pivot_row = 0usize;

    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // Find a non-zero pivot in this column at or below pivot_row.
        let found = (pivot_row..rows).find(|&r| !a[r][col].is_zero());
        let Some(found) = found else { continue };
        if found != pivot_row {
            a.swap(found, pivot_row);
            sign = -sign;
        }
        for r in pivot_row + 1..rows {
            for c in col + 1..cols {
                let num = &a[pivot_row][col] * &a[r][c] - &a[r][col] * &a[pivot_row][c];
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[pivot_row][col].clone();
        pivot_row += 1;
        rank += 1;
    }

    let det = if square && rank == rows {
        if sign < 0 {
            -prev
        } else {
            prev
        }
    } else {
        BigInt::zero()
    };
    (rank, det)
}

/// Rank of a matrix with exact rational entries.
pub fn rational_rank(matrix: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = matrix.to_vec();
    eliminate_rational(&mut a).len()
}

/// Exact null-space basis of a rational matrix. Each returned vector `v`
/// satisfies `A v = 0` exactly; the basis has `cols − rank(A)` elements.
pub fn rational_kernel_basis(matrix: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let cols = matrix.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<BigRational>> = matrix.to_vec();
    let pivots = eliminate_rational(&mut a);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();

    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        // Back-substitute: rows are in reduced echelon form.
        for &(r, pc) in pivots.iter().rev() {
            // a[r][pc] == 1 after reduction.
            let mut s = BigRational::zero();
            for c in pc + 1..cols {
                if !a[r][c].is_zero() && !v[c].is_zero() {
                    s += &a[r][c] * &v[c];
                }
            }
            v[pc] = -s;
        }
        basis.push(v);
    }
    basis
}

/// Gauss-Jordan elimination to reduced row-echelon form.
/// Returns the list of `(row, col)` pivot positions.
fn eliminate_rational(a: &mut [Vec<BigRational>]) -> Vec<(usize, usize)> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut pr = 0usize;
    for col in 0..cols {
        if pr == rows {
            break;
        }
        let Some(found) = (pr..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(found, pr);
        let inv = a[pr][col].recip();
        for c in col..cols {
            let scaled = &a[pr][c] * &inv;
            a[pr][c] = scaled;
        }
        for r in 0..rows {
            if r == pr || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..cols {
                let delta = &factor * &a[pr][c];
                a[r][c] -= delta;
            }
        }
        pivots.push((pr, col));
        pr += 1;
    }
    pivots
}

/// An element `a + b·√3` of the real quadratic field `Q(√3)`.
///
/// Arithmetic is exact; `√3` is never evaluated numerically. The field is
/// closed under the products that arise when background velocities carry a
/// `1/√3` scale factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Sqrt3Ext {
    pub a: BigRational,
    pub b: BigRational,
}

impl Sqrt3Ext {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    /// The rational number `p/q` as a field element.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::zero(),
        )
    }

    /// The element `(p/q)·√3`.
    pub fn from_sqrt3_multiple(p: i64, q: i64) -> Self {
        Self::new(
            BigRational::zero(),
            BigRational::new(BigInt::from(p), BigInt::from(q)),
        )
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        // (a + b√3)(c + d√3) = (ac + 3bd) + (ad + bc)√3
        let three = BigRational::from(BigInt::from(3));
        Self::new(
            &self.a * &rhs.a + &three * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.a.clone(), -self.b.clone())
    }

    /// Multiplicative inverse: `(a − b√3) / (a² − 3b²)`.
    ///
    /// The norm `a² − 3b²` never vanishes for non-zero elements because `√3`
    /// is irrational, so this only panics on a zero input.
    pub fn recip(&self) -> Self {
        let three = BigRational::from(BigInt::from(3));
        let norm = &self.a * &self.a - &three * &self.b * &self.b;
        assert!(!norm.is_zero(), "inverse of zero in Q(sqrt3)");
        Self::new(&self.a / &norm, -(&self.b / &norm))
    }

    /// Numerical value, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.a) + ratio_to_f64(&self.b) * 3f64.sqrt()
    }

    /// Exact sign test: is `a + b·√3 < 0`?
    pub fn is_negative(&self) -> bool {
        !self.is_zero() && !self.is_positive()
    }

    /// Exact sign test: is `a + b·√3 > 0`?
    ///
    /// When the two parts disagree in sign the comparison reduces to
    /// `a² ⋛ 3b²`, which is decidable in rational arithmetic; the two sides
    /// can only be equal when both parts vanish, because `√3` is irrational.
    pub fn is_positive(&self) -> bool {
        let a_pos = self.a.is_positive();
        let a_neg = self.a.is_negative();
        let b_pos = self.b.is_positive();
        let b_neg = self.b.is_negative();
        if !a_neg && !b_neg {
            return a_pos || b_pos;
        }
        if !a_pos && !b_pos {
            return false;
        }
        let three = BigRational::from(BigInt::from(3));
        let a2 = &self.a * &self.a;
        let b2_3 = three * &self.b * &self.b;
        if a_pos {
            // a > 0, b < 0: positive iff a exceeds |b|·√3.
            a2 > b2_3
        } else {
            // a < 0, b > 0: positive iff b·√3 exceeds |a|.
            b2_3 > a2
        }
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // Adequate for diagnostics: magnitudes here are far below 2^52.
    let numer = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let denom = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    numer / denom
}

/// Rank of a matrix over `Q(√3)` by exact Gaussian elimination.
pub fn sqrt3_rank(matrix: &[Vec<Sqrt3Ext>]) -> usize {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<Sqrt3Ext>> = matrix.to_vec();
    let mut rank = 0usize;
    let mut pr = 0usize;
    for col in 0..cols {
        if pr == rows {
            break;
        }
        let Some(found) = (pr..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(found, pr);
        let inv = a[pr][col].recip();
        for c in col..cols {
            a[pr][c] = a[pr][c].mul(&inv);
        }
        for r in pr + 1..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..cols {
                let delta = factor.mul(&a[pr][c]);
                a[r][c] = a[r][c].sub(&delta);
            }
        }
        rank += 1;
        pr += 1;
    }
    rank
}

/// Convenience: a rational number from a signed numerator and denominator.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// The arithmetic needed by the exact simplex: an ordered field.
///
/// Implementations must be exact — no rounding anywhere — so that a verdict
/// produced by [`exact_phase1`] is a proof, not an approximation. Method
/// names carry a `fld_` prefix to stay clear of the `num` operator traits.
pub trait OrderedField: Clone {
    fn fld_zero() -> Self;
    fn fld_one() -> Self;
    fn fld_is_zero(&self) -> bool;
    /// Strictly greater than zero.
    fn fld_is_positive(&self) -> bool;
    fn fld_add(&self, rhs: &Self) -> Self;
    fn fld_sub(&self, rhs: &Self) -> Self;
    fn fld_mul(&self, rhs: &Self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn fld_recip(&self) -> Self;
    fn fld_neg(&self) -> Self;

    fn fld_is_negative(&self) -> bool {
        !self.fld_is_zero() && !self.fld_is_positive()
    }
    fn fld_lt(&self, other: &Self) -> bool {
        other.fld_sub(self).fld_is_positive()
    }
}

impl OrderedField for BigRational {
    fn fld_zero() -> Self {
        Zero::zero()
    }
    fn fld_one() -> Self {
        One::one()
    }
    fn fld_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn fld_is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn fld_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn fld_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn fld_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn fld_recip(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero rational");
        BigRational::new(self.denom().clone(), self.numer().clone())
    }
    fn fld_neg(&self) -> Self {
        -self
    }
}

impl OrderedField for Sqrt3Ext {
    fn fld_zero() -> Self {
        Sqrt3Ext::zero()
    }
    fn fld_one() -> Self {
        Sqrt3Ext::from_ratio(1, 1)
    }
    fn fld_is_zero(&self) -> bool {
        Sqrt3Ext::is_zero(self)
    }
    fn fld_is_positive(&self) -> bool {
        Sqrt3Ext::is_positive(self)
    }
    fn fld_add(&self, rhs: &Self) -> Self {
        Sqrt3Ext::add(self, rhs)
    }
    fn fld_sub(&self, rhs: &Self) -> Self {
        Sqrt3Ext::sub(self, rhs)
    }
    fn fld_mul(&self, rhs: &Self) -> Self {
        Sqrt3Ext::mul(self, rhs)
    }
    fn fld_recip(&self) -> Self {
        Sqrt3Ext::recip(self)
    }
    fn fld_neg(&self) -> Self {
        Sqrt3Ext::neg(self)
    }
}

/// Outcome of an exact phase-1 feasibility decision.
pub struct ExactLpResult<F> {
    /// Whether `{x ≥ 0 : Cx = d}` is non-empty. Exact — a `false` here is a
    /// certificate of emptiness (the phase-1 optimum is strictly positive).
    pub feasible: bool,
    /// A feasible point when one exists.
    pub witness: Option<Vec<F>>,
}

/// Decide exactly whether `{x ≥ 0 : Cx = d}` is non-empty.
///
/// Runs a phase-1 simplex with Bland's anti-cycling rule entirely in the
/// given ordered field: one artificial variable per row, minimize their sum.
/// Termination is guaranteed by Bland's rule; the verdict is exact because
/// no arithmetic step rounds.
pub fn exact_phase1<F: OrderedField>(constraints: &[Vec<F>], rhs: &[F]) -> ExactLpResult<F> {
    let m = constraints.len();
    let n = constraints.first().map_or(0, |r| r.len());
    assert_eq!(rhs.len(), m, "rhs length mismatch");
    let width = n + m + 1;

    // Rows with negative right-hand side are negated so the artificial basis
    // starts feasible.
    let mut tab: Vec<Vec<F>> = Vec::with_capacity(m);
    for i in 0..m {
        assert_eq!(constraints[i].len(), n, "ragged constraint matrix");
        let flip = rhs[i].fld_is_negative();
        let mut row: Vec<F> = Vec::with_capacity(width);
        for j in 0..n {
            row.push(if flip {
                constraints[i][j].fld_neg()
            } else {
                constraints[i][j].clone()
            });
        }
        for k in 0..m {
            row.push(if k == i { F::fld_one() } else { F::fld_zero() });
        }
        row.push(if flip { rhs[i].fld_neg() } else { rhs[i].clone() });
        tab.push(row);
    }

    // Reduced-cost row for the phase-1 objective (sum of artificials), with
    // the artificial basis already priced out: structural and rhs entries are
    // the negated column sums, artificial entries are zero.
    let mut cost: Vec<F> = vec![F::fld_zero(); width];
    for (j, slot) in cost.iter_mut().enumerate() {
        if j >= n && j < n + m {
            continue;
        }
        let mut sum = F::fld_zero();
        for row in &tab {
            sum = sum.fld_add(&row[j]);
        }
        *slot = sum.fld_neg();
    }

    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        // Bland: entering variable = lowest index with negative reduced cost.
        let Some(enter) = (0..n + m).find(|&j| cost[j].fld_is_negative()) else {
            break;
        };
        // Ratio test, ties broken by lowest basis index (Bland).
        let mut leave: Option<usize> = None;
        let mut best: Option<F> = None;
        for i in 0..m {
            if !tab[i][enter].fld_is_positive() {
                continue;
            }
            let ratio = tab[i][width - 1].fld_mul(&tab[i][enter].fld_recip());
            let better = match &best {
                None => true,
                Some(b) => {
                    ratio.fld_lt(b) || (!b.fld_lt(&ratio) && basis[i] < basis[leave.unwrap()])
                }
            };
            if better {
                best = Some(ratio);
                leave = Some(i);
            }
        }
        let li = leave.expect("phase-1 objective is bounded below; a pivot row must exist");

        // Pivot: normalize the pivot row, then eliminate the entering column
        // from every other row and from the cost row.
        let inv = tab[li][enter].fld_recip();
        for j in 0..width {
            tab[li][j] = tab[li][j].fld_mul(&inv);
        }
        for i in 0..m {
            if i == li || tab[i][enter].fld_is_zero() {
                continue;
            }
            let factor = tab[i][enter].clone();
            for j in 0..width {
                let delta = factor.fld_mul(&tab[li][j]);
                tab[i][j] = tab[i][j].fld_sub(&delta);
            }
        }
        if !cost[enter].fld_is_zero() {
            let factor = cost[enter].clone();
            for j in 0..width {
                let delta = factor.fld_mul(&tab[li][j]);
                cost[j] = cost[j].fld_sub(&delta);
            }
        }
        basis[li] = enter;
    }

    // cost[width-1] carries the negated objective value.
    let feasible = cost[width - 1].fld_is_zero();
    let witness = feasible.then(|| {
        let mut x = vec![F::fld_zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = tab[i][width - 1].clone();
            }
        }
        x
    });
    ExactLpResult { feasible, witness }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_diagonal_matrix() {
        let m = vec![vec![2, 0, 0], vec![0, -3, 0], vec![0, 0, 5]];
        let (rank, det) = int_rank_det(&m);
        assert_eq!(rank, 3);
        assert_eq!(det, BigInt::from(-30));
    }

    #[test]
    fn determinant_tracks_row_swaps() {
        // Permutation matrix with one swap: determinant −1.
        let m = vec![vec![0, 1], vec![1, 0]];
        let (rank, det) = int_rank_det(&m);
        assert_eq!(rank, 2);
        assert_eq!(det, BigInt::from(-1));
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        let (rank, det) = int_rank_det(&m);
        assert_eq!(rank, 2);
        assert!(det.is_zero());
    }

    #[test]
    fn rational_kernel_matches_rank_nullity() {
        // 2x4 rank-2 matrix: kernel dimension 2.
        let m: Vec<Vec<BigRational>> = vec![
            vec![ratio(1, 1), ratio(0, 1), ratio(2, 1), ratio(-1, 1)],
            vec![ratio(0, 1), ratio(1, 1), ratio(1, 2), ratio(1, 3)],
        ];
        assert_eq!(rational_rank(&m), 2);
        let basis = rational_kernel_basis(&m);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            for row in &m {
                let mut s = BigRational::zero();
                for (a, b) in row.iter().zip(v) {
                    s += a * b;
                }
                assert!(s.is_zero(), "kernel vector not annihilated exactly");
            }
        }
    }

    #[test]
    fn sqrt3_product_of_conjugates() {
        // (1 + √3)(1 − √3) = 1 − 3 = −2
        let x = Sqrt3Ext::new(ratio(1, 1), ratio(1, 1));
        let y = Sqrt3Ext::new(ratio(1, 1), ratio(-1, 1));
        let p = x.mul(&y);
        assert_eq!(p, Sqrt3Ext::new(ratio(-2, 1), ratio(0, 1)));
    }

    #[test]
    fn sqrt3_reciprocal_roundtrip() {
        let x = Sqrt3Ext::new(ratio(3, 7), ratio(-2, 5));
        let r = x.recip();
        let p = x.mul(&r);
        assert_eq!(p, Sqrt3Ext::new(ratio(1, 1), ratio(0, 1)));
    }

    #[test]
    fn sqrt3_rank_detects_proportional_rows() {
        // Row2 = √3 · Row1, so the rank is 1.
        let r1 = vec![
            Sqrt3Ext::from_ratio(1, 1),
            Sqrt3Ext::from_sqrt3_multiple(1, 1),
        ];
        let r2 = vec![
            Sqrt3Ext::from_sqrt3_multiple(1, 1),
            Sqrt3Ext::from_ratio(3, 1),
        ];
        assert_eq!(sqrt3_rank(&[r1, r2]), 1);
    }

    #[test]
    fn sqrt3_numeric_value() {
        let x = Sqrt3Ext::new(ratio(1, 2), ratio(1, 3));
        let expected = 0.5 + 3f64.sqrt() / 3.0;
        assert!((x.to_f64() - expected).abs() < 1e-15);
    }

    #[test]
    fn sqrt3_sign_test_on_mixed_parts() {
        // 2 − √3 > 0 (since 4 > 3), and √3 − 2 < 0.
        assert!(Sqrt3Ext::new(ratio(2, 1), ratio(-1, 1)).is_positive());
        assert!(!Sqrt3Ext::new(ratio(-2, 1), ratio(1, 1)).is_positive());
        // 5 − 3√3 < 0 (25 < 27), and 3√3 − 5 > 0.
        assert!(!Sqrt3Ext::new(ratio(5, 1), ratio(-3, 1)).is_positive());
        assert!(Sqrt3Ext::new(ratio(-5, 1), ratio(3, 1)).is_positive());
        // Pure signs and zero.
        assert!(Sqrt3Ext::from_ratio(1, 9).is_positive());
        assert!(Sqrt3Ext::from_sqrt3_multiple(1, 9).is_positive());
        assert!(!Sqrt3Ext::zero().is_positive());
        assert!(Sqrt3Ext::from_ratio(-1, 9).is_negative());
    }

    #[test]
    fn phase1_finds_feasible_point() {
        // x1 + x2 = 1, x1 − x2 = 0 → x = (1/2, 1/2) ≥ 0.
        let c: Vec<Vec<BigRational>> = vec![
            vec![ratio(1, 1), ratio(1, 1)],
            vec![ratio(1, 1), ratio(-1, 1)],
        ];
        let d = vec![ratio(1, 1), ratio(0, 1)];
        let out = exact_phase1(&c, &d);
        assert!(out.feasible);
        let x = out.witness.unwrap();
        assert_eq!(&x[0] + &x[1], ratio(1, 1));
        assert_eq!(&x[0] - &x[1], ratio(0, 1));
        assert!(!x[0].is_negative() && !x[1].is_negative());
    }

    #[test]
    fn phase1_certifies_empty_polytope() {
        // x1 + x2 = −1 has no solution with x ≥ 0.
        let c: Vec<Vec<BigRational>> = vec![vec![ratio(1, 1), ratio(1, 1)]];
        let d = vec![ratio(-1, 1)];
        assert!(!exact_phase1(&c, &d).feasible);
    }

    #[test]
    fn phase1_handles_redundant_rows() {
        // Same hyperplane three times; still feasible.
        let row: Vec<BigRational> = vec![ratio(2, 1), ratio(3, 1), ratio(-1, 1)];
        let c = vec![row.clone(), row.clone(), row];
        let d = vec![ratio(6, 1), ratio(6, 1), ratio(6, 1)];
        let out = exact_phase1(&c, &d);
        assert!(out.feasible);
        let x = out.witness.unwrap();
        let lhs = ratio(2, 1) * &x[0] + ratio(3, 1) * &x[1] - &x[2];
        assert_eq!(lhs, ratio(6, 1));
    }

    #[test]
    fn phase1_infeasible_over_quadratic_field() {
        // x1·√3 + x2·√3 = −√3 has no non-negative solution.
        let s = Sqrt3Ext::from_sqrt3_multiple(1, 1);
        let c = vec![vec![s.clone(), s.clone()]];
        let d = vec![s.neg()];
        assert!(!exact_phase1(&c, &d).feasible);
    }

    #[test]
    fn phase1_feasible_over_quadratic_field() {
        // √3·x1 − x2 = 1, x1 + x2 = √3 → x1 = (1+√3)/(1+√3) ... solved exactly.
        let c = vec![
            vec![Sqrt3Ext::from_sqrt3_multiple(1, 1), Sqrt3Ext::from_ratio(-1, 1)],
            vec![Sqrt3Ext::from_ratio(1, 1), Sqrt3Ext::from_ratio(1, 1)],
        ];
        let d = vec![Sqrt3Ext::from_ratio(1, 1), Sqrt3Ext::from_sqrt3_multiple(1, 1)];
        let out = exact_phase1(&c, &d);
        assert!(out.feasible);
        let x = out.witness.unwrap();
        // Verify both equations exactly.
        let e1 = Sqrt3Ext::from_sqrt3_multiple(1, 1)
            .mul(&x[0])
            .sub(&x[1])
            .sub(&Sqrt3Ext::from_ratio(1, 1));
        let e2 = x[0].add(&x[1]).sub(&Sqrt3Ext::from_sqrt3_multiple(1, 1));
        assert!(e1.is_zero() && e2.is_zero());
        assert!(!x[0].is_negative() && !x[1].is_negative());
    }
}
