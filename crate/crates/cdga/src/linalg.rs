//! Exact linear algebra over Q.
//!
//! Matrices are stored as sparse column lists; elimination clears row
//! denominators and runs the fraction-free Gauss-Jordan step
//! `row_i <- (p_k * row_i - a_ik * row_k) / p_{k-1}` (exact division by the
//! previous pivot), with the pivot chosen among candidate rows by smallest
//! numerator magnitude to keep entries from blowing up. Dividing each pivot
//! row by its pivot at the end yields the reduced row echelon form, which
//! is unique — so representatives, kernels and solutions derived from it do
//! not depend on pivoting choices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A sparse matrix over Q, column-major: `columns[j]` lists the nonzero
/// `(row, value)` entries of column `j` in increasing row order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, BigRational)>>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, BigRational)>>) -> Self {
        for col in &columns {
            debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(col.iter().all(|(r, v)| *r < rows && !v.is_zero()));
        }
        RationalMatrix { rows, columns }
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, BigRational)] {
        &self.columns[j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: BigRational) {
        assert!(i < self.rows && j < self.columns.len());
        let col = &mut self.columns[j];
        match col.binary_search_by_key(&i, |&(r, _)| r) {
            Ok(pos) => {
                if v.is_zero() {
                    col.remove(pos);
                } else {
                    col[pos].1 = v;
                }
            }
            Err(pos) => {
                if !v.is_zero() {
                    col.insert(pos, (i, v));
                }
            }
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        self.columns[j]
            .binary_search_by_key(&i, |&(r, _)| r)
            .map(|pos| self.columns[j][pos].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    fn to_dense_rows(&self) -> Vec<Vec<BigRational>> {
        let mut rows = vec![vec![BigRational::zero(); self.num_cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                rows[*i][j] = v.clone();
            }
        }
        rows
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Rref {
        rref_of_rows(self.to_dense_rows(), self.num_cols())
    }

    /// Basis of the null space (kernel) in column-coordinate space, one
    /// vector per free column, in free-column order. Each vector has a 1 at
    /// its free column; the RREF makes this basis canonical.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let rref = self.rref();
        let n = self.num_cols();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; n];
            for (row, &col) in rref.pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..n {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut vec = vec![BigRational::zero(); n];
            vec[free] = BigRational::one();
            for (row, &col) in rref.pivots.iter().enumerate() {
                let coeff = &rref.rows[row][free];
                if !coeff.is_zero() {
                    vec[col] = -coeff.clone();
                }
            }
            basis.push(vec);
        }
        basis
    }

    /// One exact solution of `self * x = rhs` with all free variables set
    /// to zero (the RREF-minimal solution), or `None` when inconsistent.
    pub fn solve(&self, rhs: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(rhs.len(), self.rows);
        let n = self.num_cols();
        let mut rows = self.to_dense_rows();
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(rhs[i].clone());
        }
        let rref = rref_of_rows(rows, n + 1);
        if rref.pivots.contains(&n) {
            return None;
        }
        let mut x = vec![BigRational::zero(); n];
        for (row, &col) in rref.pivots.iter().enumerate() {
            x[col] = rref.rows[row][n].clone();
        }
        Some(x)
    }
}

/// Reduced row echelon form: nonzero rows only, with `pivots[i]` the pivot
/// column of row `i` (strictly increasing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<BigRational>>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce a vector against these rows: subtract multiples so that every
    /// pivot coordinate of the result is zero. Returns the reduced vector.
    pub fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut out = v.to_vec();
        for (row, &col) in self.pivots.iter().enumerate() {
            let c = out[col].clone();
            if c.is_zero() {
                continue;
            }
            for (j, val) in self.rows[row].iter().enumerate() {
                if !val.is_zero() {
                    out[j] = &out[j] - &(val * &c);
                }
            }
        }
        out
    }
}

/// RREF of a dense row list via fraction-free Gauss-Jordan elimination.
#[allow(clippy::needless_range_loop)] // updates row i against row pivot_row in place
pub fn rref_of_rows(rows: Vec<Vec<BigRational>>, width: usize) -> Rref {
    // Clear denominators row by row; row scaling changes neither the row
    // space nor the RREF.
    let mut work: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|row| {
            debug_assert_eq!(row.len(), width);
            let lcm = row.iter().fold(BigInt::one(), |acc, v| {
                if v.is_zero() {
                    acc
                } else {
                    num_integer::lcm(acc, v.denom().clone())
                }
            });
            row.into_iter()
                .map(|v| {
                    if v.is_zero() {
                        BigInt::zero()
                    } else {
                        v.numer() * (&lcm / v.denom())
                    }
                })
                .collect()
        })
        .collect();

    let m = work.len();
    let mut pivot_row = 0usize;
    let mut pivots = Vec::new();
    let mut prev_pivot = BigInt::one();

    for col in 0..width {
        if pivot_row >= m {
            break;
        }
        // Pivot: smallest nonzero magnitude among candidate rows.
        let mut best: Option<(usize, BigInt)> = None;
        for (r, row) in work.iter().enumerate().skip(pivot_row) {
            let v = &row[col];
            if v.is_zero() {
                continue;
            }
            let mag = v.abs();
            match &best {
                None => best = Some((r, mag)),
                Some((_, m0)) if mag < *m0 => best = Some((r, mag)),
                _ => {}
            }
        }
        let Some((r, _)) = best else { continue };
        work.swap(pivot_row, r);
        let pivot = work[pivot_row][col].clone();
        for i in 0..m {
            if i == pivot_row || work[i][col].is_zero() {
                // Rows with a zero in the pivot column still need the
                // p_k / p_{k-1} rescaling to keep the invariant exact.
                if i != pivot_row {
                    for j in 0..width {
                        if !work[i][j].is_zero() {
                            let num = &work[i][j] * &pivot;
                            debug_assert!((&num % &prev_pivot).is_zero());
                            work[i][j] = num / &prev_pivot;
                        }
                    }
                }
                continue;
            }
            let factor = work[i][col].clone();
            for j in 0..width {
                let num = &work[i][j] * &pivot - &factor * &work[pivot_row][j];
                debug_assert!((&num % &prev_pivot).is_zero());
                work[i][j] = num / &prev_pivot;
            }
        }
        prev_pivot = pivot;
        pivots.push(col);
        pivot_row += 1;
    }

    // Normalize pivot rows to leading 1 and drop zero rows.
    let mut out_rows = Vec::with_capacity(pivots.len());
    for (row, &col) in pivots.iter().enumerate() {
        let pivot = work[row][col].clone();
        let normalized: Vec<BigRational> = work[row]
            .iter()
            .map(|v| BigRational::new(v.clone(), pivot.clone()))
            .collect();
        out_rows.push(normalized);
    }
    Rref {
        pivots,
        rows: out_rows,
    }
}

/// Rank of a set of row vectors.
pub fn row_space_rank(rows: &[Vec<BigRational>], width: usize) -> usize {
    rref_of_rows(rows.to_vec(), width).rank()
}

/// Do two row sets span the same subspace? Checked by three rank
/// computations: rank(A) = rank(B) = rank(A stacked on B).
pub fn same_row_space(a: &[Vec<BigRational>], b: &[Vec<BigRational>], width: usize) -> bool {
    let ra = row_space_rank(a, width);
    let rb = row_space_rank(b, width);
    if ra != rb {
        return false;
    }
    let mut stacked = a.to_vec();
    stacked.extend_from_slice(b);
    row_space_rank(&stacked, width) == ra
}

/// Is `v` in the row space of `rows`?
pub fn in_row_space(rows: &Rref, v: &[BigRational]) -> bool {
    rows.reduce(v).iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn qi(n: i64) -> BigRational {
        q(n, 1)
    }

    fn dense(rows: &[&[i64]]) -> RationalMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = RationalMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.set_entry(i, j, qi(v));
                }
            }
        }
        m
    }

    #[test]
    fn rank_and_rref_basic() {
        let m = dense(&[&[1, 2, 1], &[2, 4, 0], &[3, 6, 0]]);
        assert_eq!(m.rank(), 2);
        let rref = m.rref();
        assert_eq!(rref.pivots, vec![0, 2]);
        assert_eq!(rref.rows[0], vec![qi(1), qi(2), qi(0)]);
        assert_eq!(rref.rows[1], vec![qi(0), qi(0), qi(1)]);
    }

    #[test]
    fn rref_with_fractions() {
        let mut m = RationalMatrix::zero(2, 2);
        m.set_entry(0, 0, q(1, 2));
        m.set_entry(0, 1, q(1, 3));
        m.set_entry(1, 0, q(1, 4));
        m.set_entry(1, 1, q(1, 6));
        // Second row is half the first: rank 1.
        assert_eq!(m.rank(), 1);
        let rref = m.rref();
        assert_eq!(rref.rows[0], vec![qi(1), q(2, 3)]);
    }

    #[test]
    fn kernel_of_sum_map() {
        // [1 1] has kernel spanned by (1, -1) with the free column second:
        // basis vector has 1 at column 1.
        let m = dense(&[&[1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![qi(-1), qi(1)]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = dense(&[&[1, 2], &[0, 0]]);
        let sol = m.solve(&[qi(3), qi(0)]).unwrap();
        // Free variable (column 1) is zero in the RREF-minimal solution.
        assert_eq!(sol, vec![qi(3), qi(0)]);
        assert!(m.solve(&[qi(0), qi(1)]).is_none());
    }

    #[test]
    fn same_row_space_detects_equality_and_difference() {
        let a = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
        let b = vec![vec![qi(1), qi(1)], vec![qi(1), qi(-1)]];
        assert!(same_row_space(&a, &b, 2));
        let c = vec![vec![qi(1), qi(1)]];
        assert!(!same_row_space(&a, &c, 2));
    }

    #[test]
    fn reduce_against_rref() {
        let m = dense(&[&[1, 0, 2], &[0, 1, 3]]);
        let rref = m.rref();
        let reduced = rref.reduce(&[qi(2), qi(1), qi(7)]);
        assert_eq!(reduced, vec![qi(0), qi(0), qi(0)]);
        let reduced = rref.reduce(&[qi(0), qi(0), qi(1)]);
        assert_eq!(reduced, vec![qi(0), qi(0), qi(1)]);
    }

    #[test]
    fn fraction_free_exactness_on_awkward_matrix() {
        // A matrix engineered to produce large intermediate products.
        let m = dense(&[
            &[3, 1, 4, 1],
            &[5, 9, 2, 6],
            &[5, 3, 5, 8],
            &[9, 7, 9, 3],
        ]);
        assert_eq!(m.rank(), 4);
        let id = m.rref();
        assert_eq!(id.pivots, vec![0, 1, 2, 3]);
        for (i, row) in id.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { qi(1) } else { qi(0) });
            }
        }
    }
}
