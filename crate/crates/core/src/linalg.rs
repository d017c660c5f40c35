//! Sparse exact matrices and column reduction.

use nalgebra::DMatrix;

use crate::field::{Field, Rational};
use crate::par;

/// Column-major sparse matrix. Each column holds `(row, value)` pairs sorted
/// by row with no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<F> {
    nrows: usize,
    cols: Vec<Vec<(usize, F)>>,
}

pub type SparseRationalMatrix = SparseMatrix<Rational>;

/// Sparse column vector, sorted by row, no zeros.
pub type SparseColumn<F> = Vec<(usize, F)>;

impl<F: Field> SparseMatrix<F> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, cols: vec![Vec::new(); ncols] }
    }

    /// Builds a matrix from unsorted columns; duplicate rows are summed and
    /// zeros dropped. Panics if a row index is out of range.
    pub fn from_columns(nrows: usize, cols: Vec<Vec<(usize, F)>>) -> Self {
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c.sort_by_key(|e| e.0);
                let mut out: SparseColumn<F> = Vec::with_capacity(c.len());
                for (r, v) in c {
                    assert!(r < nrows, "row {r} out of range for {nrows} rows");
                    match out.last_mut() {
                        Some(last) if last.0 == r => last.1 = last.1.add(&v),
                        _ => out.push((r, v)),
                    }
                }
                out.retain(|e| !e.1.is_zero());
                out
            })
            .collect();
        Self { nrows, cols }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let cols = (0..ncols)
            .map(|j| (0..nrows).filter(|&i| rows[i][j] != 0).map(|i| (i, F::from_i64(rows[i][j]))).collect())
            .collect();
        Self { nrows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, F)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseColumn<F>] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        match self.cols[j].binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.cols[j][k].1.clone(),
            Err(_) => F::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<SparseColumn<F>> = vec![Vec::new(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                cols[*i].push((j, v.clone()));
            }
        }
        Self { nrows: self.cols.len(), cols }
    }

    /// `self * rhs`. Panics on a dimension mismatch.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols(), rhs.nrows, "dimension mismatch in product");
        let cols = par::map(&rhs.cols, |rc| {
            let mut acc: Vec<(usize, F)> = Vec::new();
            for (k, v) in rc {
                for (i, w) in &self.cols[*k] {
                    acc.push((*i, w.mul(v)));
                }
            }
            acc
        });
        Self::from_columns(self.nrows, cols)
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Self {
        Self { nrows: self.nrows, cols: keep.iter().map(|&j| self.cols[j].clone()).collect() }
    }

    /// Keeps the listed rows (ascending), renumbered `0..keep.len()`.
    pub fn select_rows(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.nrows];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let cols = self
            .cols
            .iter()
            .map(|c| c.iter().filter(|(i, _)| map[*i] != usize::MAX).map(|(i, v)| (map[*i], v.clone())).collect())
            .collect();
        let mut out = Self { nrows: keep.len(), cols };
        if !keep.windows(2).all(|w| w[0] < w[1]) {
            out.cols.iter_mut().for_each(|c| c.sort_by_key(|e| e.0));
        }
        out
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> SparseMatrix<G> {
        SparseMatrix::from_columns(
            self.nrows,
            self.cols.iter().map(|c| c.iter().map(|(i, v)| (*i, f(v))).collect()).collect(),
        )
    }

    pub fn to_dense_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.cols.len());
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                m[(*i, j)] = v.to_f64();
            }
        }
        m
    }

    /// Rank by column reduction.
    pub fn rank(&self) -> usize {
        reduce(self, false).rank()
    }

    /// A basis of the null space, one dense vector of length `ncols` each.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let red = reduce(self, true);
        let v = red.v.expect("tracked");
        red.r
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_empty())
            .map(|(j, _)| {
                let mut dense = vec![F::zero(); self.ncols()];
                for (i, x) in &v[j] {
                    dense[*i] = x.clone();
                }
                dense
            })
            .collect()
    }
}

/// `target += factor * source` on sorted sparse columns.
pub fn axpy<F: Field>(target: &[(usize, F)], factor: &F, source: &[(usize, F)]) -> SparseColumn<F> {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut a, mut b) = (0, 0);
    while a < target.len() || b < source.len() {
        let next = match (target.get(a), source.get(b)) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                a += 1;
                b += 1;
                (x.0, x.1.add(&factor.mul(&y.1)))
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                a += 1;
                x.clone()
            }
            (Some(x), None) => {
                a += 1;
                x.clone()
            }
            (_, Some(y)) => {
                b += 1;
                (y.0, factor.mul(&y.1))
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    out
}

/// Result of left-to-right column reduction `R = M V`, where every nonzero
/// column of `R` has a distinct lowest row.
#[derive(Debug, Clone)]
pub struct Reduction<F> {
    pub r: Vec<SparseColumn<F>>,
    pub v: Option<Vec<SparseColumn<F>>>,
    /// For each row, the column whose lowest entry sits there.
    pub pivot_col: Vec<Option<usize>>,
}

impl<F> Reduction<F> {
    pub fn rank(&self) -> usize {
        self.r.iter().filter(|c| !c.is_empty()).count()
    }

    /// Lowest row of a reduced column.
    pub fn low(&self, j: usize) -> Option<usize> {
        self.r[j].last().map(|e| e.0)
    }
}

/// Standard persistence reduction: for each column, repeatedly cancel its
/// lowest entry against the earlier column owning that pivot row.
pub fn reduce<F: Field>(m: &SparseMatrix<F>, track_v: bool) -> Reduction<F> {
    let n = m.ncols();
    let mut r: Vec<SparseColumn<F>> = Vec::with_capacity(n);
    let mut v: Option<Vec<SparseColumn<F>>> = track_v.then(|| Vec::with_capacity(n));
    let mut pivot_col: Vec<Option<usize>> = vec![None; m.nrows()];
    for j in 0..n {
        let mut col = m.cols[j].clone();
        let mut vcol: SparseColumn<F> = vec![(j, F::one())];
        while let Some((low, val)) = col.last().cloned() {
            let Some(k) = pivot_col[low] else { break };
            let pivot = &r[k].last().expect("pivot column is nonzero").1;
            let factor = val.mul(&pivot.inv()).neg();
            col = axpy(&col, &factor, &r[k]);
            if let Some(vs) = v.as_ref() {
                vcol = axpy(&vcol, &factor, &vs[k]);
            }
        }
        if let Some((low, _)) = col.last() {
            pivot_col[*low] = Some(j);
        }
        r.push(col);
        if let Some(vs) = v.as_mut() {
            vs.push(vcol);
        }
    }
    Reduction { r, v, pivot_col }
}
