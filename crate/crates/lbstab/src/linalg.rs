//! Small dense matrices in row-major `f64` storage.
//!
//! Everything here targets the `n = 33` construction pipeline: simplicity and
//! reproducibility over asymptotic speed. The solvers are deterministic
//! (fixed pivoting orders) so repeated runs produce bit-identical artifacts.

use crate::error::{Error, Result};
use crate::tolerances;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(
            rows.iter().all(|row| row.len() == c),
            "ragged rows in Mat::from_rows"
        );
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// The first `k` columns as a new `rows × k` matrix.
    pub fn leading_columns(&self, k: usize) -> Mat {
        let mut out = Mat::zeros(self.rows, k);
        for i in 0..self.rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[..k]);
        }
        out
    }

    /// The first `k` rows as a new `k × cols` matrix.
    pub fn leading_rows(&self, k: usize) -> Mat {
        let mut out = Mat::zeros(k, self.cols);
        for i in 0..k {
            out.row_mut(i).copy_from_slice(self.row(i));
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = out.row_mut(i);
                for j in 0..rhs.cols {
                    orow[j] += a * rrow[j];
                }
            }
        }
        out
    }

    /// `self · v` for a vector `v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Inverse via LU with partial pivoting plus one step of iterative
    /// refinement per column, which pushes `‖A·A⁻¹ − I‖` to a few ulps for
    /// the well-conditioned matrices this pipeline produces.
    pub fn invert(&self) -> Result<Mat> {
        assert_eq!(self.rows, self.cols, "invert requires a square matrix");
        let n = self.rows;
        let lu = LuFactors::new(self)?;
        let mut inv = Mat::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let mut x = lu.solve(&e);
            // One refinement pass: x += A⁻¹ (e − A x).
            let r: Vec<f64> = self
                .matvec(&x)
                .iter()
                .zip(&e)
                .map(|(ax, ei)| ei - ax)
                .collect();
            let dx = lu.solve(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
            for i in 0..n {
                inv[(i, j)] = x[i];
            }
        }
        Ok(inv)
    }

    /// Numerical rank via complete-pivoting elimination, together with the
    /// pivot-ratio condition estimate `|largest pivot| / |smallest pivot|`.
    ///
    /// Pivots below `RANK_PIVOT_REL` times the largest pivot are treated as
    /// zero. The estimate is a cheap growth-factor proxy, not a singular
    /// value ratio; it is reported for regularity diagnostics only.
    pub fn rank_and_cond(&self) -> (usize, f64) {
        let mut a = self.clone();
        let (rows, cols) = (a.rows, a.cols);
        let mut rank = 0usize;
        let mut max_piv = 0.0f64;
        let mut min_piv = f64::INFINITY;
        let mut row_active: Vec<usize> = (0..rows).collect();
        let mut col_active: Vec<usize> = (0..cols).collect();

        while rank < rows.min(cols) {
            // Complete pivoting over the active submatrix.
            let mut best = (0usize, 0usize, 0.0f64);
            for (ri, &r) in row_active.iter().enumerate().skip(rank) {
                for (ci, &c) in col_active.iter().enumerate().skip(rank) {
                    let v = a[(r, c)].abs();
                    if v > best.2 {
                        best = (ri, ci, v);
                    }
                }
            }
            let threshold = if max_piv == 0.0 {
                0.0
            } else {
                tolerances::RANK_PIVOT_REL * max_piv
            };
            if best.2 <= threshold {
                break;
            }
            row_active.swap(rank, best.0);
            col_active.swap(rank, best.1);
            let (pr, pc) = (row_active[rank], col_active[rank]);
            let piv = a[(pr, pc)];
            max_piv = max_piv.max(piv.abs());
            min_piv = min_piv.min(piv.abs());
            for &r in row_active.iter().skip(rank + 1) {
                let f = a[(r, pc)] / piv;
                if f == 0.0 {
                    continue;
                }
                for &c in col_active.iter().skip(rank + 1) {
                    a[(r, c)] -= f * a[(pr, c)];
                }
                a[(r, pc)] = 0.0;
            }
            rank += 1;
        }

        let cond = if rank == 0 || min_piv == 0.0 {
            f64::INFINITY
        } else {
            max_piv / min_piv
        };
        (rank, cond)
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, kept for repeated solves.
pub struct LuFactors {
    lu: Mat,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &Mat) -> Result<Self> {
        assert_eq!(a.rows, a.cols, "LU requires a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|r| (r, lu[(r, k)].abs()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty pivot search");
            if pivot_abs == 0.0 {
                return Err(Error::Construction(format!(
                    "singular matrix: no pivot in column {k}"
                )));
            }
            if pivot_row != k {
                perm.swap(pivot_row, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
            }
            let piv = lu[(k, k)];
            for r in k + 1..n {
                let f = lu[(r, k)] / piv;
                lu[(r, k)] = f;
                if f == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    lu[(r, j)] -= f * lu[(k, j)];
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }
}

/// Max-abs difference between two equally sized matrices.
pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.sub(b).max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Mat {
        Mat::from_rows(vec![
            vec![4.0, -2.0, 1.0],
            vec![3.0, 6.0, -4.0],
            vec![2.0, 1.0, 8.0],
        ])
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = sample();
        let inv = a.invert().unwrap();
        let prod = a.matmul(&inv);
        assert!(max_abs_diff(&prod, &Mat::identity(3)) < 1e-14);
    }

    #[test]
    fn inverse_matches_nalgebra() {
        let a = sample();
        let na = nalgebra::DMatrix::from_fn(3, 3, |i, j| a[(i, j)]);
        let na_inv = na.try_inverse().expect("invertible");
        let inv = a.invert().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((inv[(i, j)] - na_inv[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(a.invert().is_err());
    }

    #[test]
    fn rank_of_duplicated_row() {
        let a = Mat::from_rows(vec![
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 3.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let (rank, _) = a.rank_and_cond();
        assert_eq!(rank, 2);
    }

    #[test]
    fn rank_of_identity_with_cond_one() {
        let (rank, cond) = Mat::identity(5).rank_and_cond();
        assert_eq!(rank, 5);
        assert_eq!(cond, 1.0);
    }

    #[test]
    fn lu_solves_linear_system() {
        let a = sample();
        let lu = LuFactors::new(&a).unwrap();
        let x = lu.solve(&[1.0, -2.0, 3.0]);
        let b = a.matvec(&x);
        assert!((b[0] - 1.0).abs() < 1e-13);
        assert!((b[1] + 2.0).abs() < 1e-13);
        assert!((b[2] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn matmul_identity_is_noop() {
        let a = sample();
        let i = Mat::identity(3);
        assert_eq!(a.matmul(&i), a);
        assert_eq!(i.matmul(&a), a);
    }
}
