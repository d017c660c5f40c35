//! The interaction chain complex of a family of filtered complexes.
//!
//! A basis cell is a tuple `(s_1, ..., s_n)` with `s_i` a simplex of the
//! `i`-th complex and a nonempty common vertex set. Its degree is the sum of
//! the factor dimensions and its birth the largest factor birth. Tuples with
//! an empty intersection are zero in the quotient, so they never appear in a
//! basis and are dropped from boundaries.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{boundary_chain, FilteredComplex, Simplex};
use crate::field::{Field, Rational};
use crate::linalg::SparseMatrix;
use crate::par;

#[derive(Debug, Error, PartialEq)]
pub enum InteractionError {
    #[error("an interaction needs at least two complexes, got {0}")]
    TooFewFactors(usize),
}

/// Basis element of the interaction chain complex. Factors are indices into
/// the complexes of the owning [`GradedBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionCell {
    factors: Vec<usize>,
    degree: usize,
    birth: f64,
}

impl InteractionCell {
    pub fn factor_indices(&self) -> &[usize] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn birth(&self) -> f64 {
        self.birth
    }

    fn order(&self, other: &Self) -> Ordering {
        self.birth.total_cmp(&other.birth).then_with(|| self.factors.cmp(&other.factors))
    }
}

/// Interaction cells graded by degree, each degree sorted by
/// `(birth, factor simplices)`.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    complexes: Arc<Vec<FilteredComplex>>,
    max_degree: usize,
    cells: Vec<Vec<InteractionCell>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

/// Enumerates the interaction cells of `complexes` up to total degree
/// `max_degree` and birth `max_scale`.
///
/// Every cell contains some shared vertex `v`; cells are generated from the
/// stars of each shared vertex and kept only at the smallest vertex of their
/// common intersection, so no cell is produced twice.
pub fn enumerate_cells(
    complexes: &[FilteredComplex],
    max_degree: usize,
    max_scale: f64,
) -> Result<GradedBasis, InteractionError> {
    if complexes.len() < 2 {
        return Err(InteractionError::TooFewFactors(complexes.len()));
    }
    Ok(GradedBasis::build(complexes.to_vec(), max_degree, max_scale))
}

fn smallest_common_vertex(complexes: &[FilteredComplex], factors: &[usize]) -> Option<usize> {
    let (first, rest) = factors.split_first()?;
    complexes[0].simplex(*first).vertices().iter().copied().find(|&v| {
        rest.iter().enumerate().all(|(k, &f)| complexes[k + 1].simplex(f).contains(v))
    })
}

impl GradedBasis {
    /// The ordinary simplicial chain complex of one filtered complex, as the
    /// one-factor case of the same construction.
    pub fn simplicial(complex: FilteredComplex, max_degree: usize, max_scale: f64) -> Self {
        Self::build(vec![complex], max_degree, max_scale)
    }

    fn build(complexes: Vec<FilteredComplex>, max_degree: usize, max_scale: f64) -> Self {
        let n = complexes.len();
        let mut universe = complexes[0].vertex_set();
        for k in &complexes[1..] {
            universe.retain(|v| !k.star_of(*v).is_empty());
        }

        let per_pivot: Vec<Vec<InteractionCell>> = par::map(&universe, |&v| {
            let stars: Vec<Vec<usize>> = complexes
                .iter()
                .map(|k| {
                    k.star_of(v)
                        .iter()
                        .copied()
                        .filter(|&i| k.simplex(i).dim() <= max_degree && k.birth(i) <= max_scale)
                        .collect()
                })
                .collect();
            let mut out = Vec::new();
            let mut tuple = Vec::with_capacity(n);
            expand(&complexes, &stars, v, max_degree, 0, 0.0, &mut tuple, &mut out);
            out
        });

        let mut cells: Vec<Vec<InteractionCell>> = vec![Vec::new(); max_degree + 1];
        for cell in per_pivot.into_iter().flatten() {
            cells[cell.degree].push(cell);
        }
        for level in &mut cells {
            level.sort_by(InteractionCell::order);
        }
        let index = cells
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, c)| (c.factors.clone(), i)).collect())
            .collect();
        Self { complexes: Arc::new(complexes), max_degree, cells, index }
    }

    pub fn complexes(&self) -> &[FilteredComplex] {
        &self.complexes
    }

    pub fn n_factors(&self) -> usize {
        self.complexes.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Cells of degree `p`; empty beyond `max_degree`.
    pub fn cells(&self, p: usize) -> &[InteractionCell] {
        self.cells.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn dim(&self, p: usize) -> usize {
        self.cells(p).len()
    }

    /// Number of cells per degree `0..=max_degree`.
    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Vec::is_empty)
    }

    /// Position of the cell with the given factor simplices, if present.
    pub fn position(&self, factors: &[Simplex]) -> Option<(usize, usize)> {
        if factors.len() != self.n_factors() {
            return None;
        }
        let idx: Option<Vec<usize>> = factors.iter().zip(self.complexes.iter()).map(|(s, k)| k.index_of(s)).collect();
        let idx = idx?;
        let degree = factors.iter().map(Simplex::dim).sum::<usize>();
        self.index.get(degree)?.get(&idx).map(|&i| (degree, i))
    }

    pub fn factor_simplices(&self, cell: &InteractionCell) -> Vec<&Simplex> {
        cell.factors.iter().zip(self.complexes.iter()).map(|(&i, k)| k.simplex(i)).collect()
    }

    /// Number of degree-`p` cells born at or before `scale`. Cells are sorted
    /// by birth, so these form a prefix.
    pub fn prefix_len(&self, p: usize, scale: f64) -> usize {
        self.cells(p).partition_point(|c| c.birth <= scale)
    }

    /// The sub-basis of cells born at or before `scale`.
    pub fn sublevel(&self, scale: f64) -> Self {
        let cells: Vec<Vec<InteractionCell>> = (0..=self.max_degree)
            .map(|p| self.cells[p][..self.prefix_len(p, scale)].to_vec())
            .collect();
        let index = cells
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, c)| (c.factors.clone(), i)).collect())
            .collect();
        Self { complexes: Arc::clone(&self.complexes), max_degree: self.max_degree, cells, index }
    }

    /// The same cells with births recomputed from new factor filtrations.
    /// The complexes must have the same simplices as the current ones.
    pub fn refiltered(&self, complexes: Vec<FilteredComplex>) -> Self {
        assert_eq!(complexes.len(), self.n_factors());
        for (a, b) in complexes.iter().zip(self.complexes.iter()) {
            assert_eq!(a.simplices(), b.simplices(), "refiltered basis needs identical simplices");
        }
        let mut cells = self.cells.clone();
        for level in &mut cells {
            for c in level.iter_mut() {
                c.birth = c.factors.iter().zip(&complexes).map(|(&i, k)| k.birth(i)).fold(f64::NEG_INFINITY, f64::max);
            }
            level.sort_by(InteractionCell::order);
        }
        let index = cells
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, c)| (c.factors.clone(), i)).collect())
            .collect();
        Self { complexes: Arc::new(complexes), max_degree: self.max_degree, cells, index }
    }

    /// Integer boundary columns of `d_p`: one column per degree-`p` cell with
    /// entries on degree-`(p-1)` rows.
    pub(crate) fn boundary_columns(&self, p: usize) -> Vec<Vec<(usize, i64)>> {
        if p == 0 {
            return vec![Vec::new(); self.dim(0)];
        }
        let lower = self.index.get(p - 1);
        par::map(self.cells(p), |cell| {
            let lower = lower.expect("degree p-1 exists whenever degree p does");
            let mut col = Vec::new();
            let mut koszul = 0usize;
            for (i, &fi) in cell.factors.iter().enumerate() {
                let k = &self.complexes[i];
                let simplex = k.simplex(fi);
                let sign = if koszul.is_multiple_of(2) { 1 } else { -1 };
                for (c, face) in boundary_chain(simplex) {
                    let face_idx = k.index_of(&face).expect("complexes are face-closed");
                    let mut factors = cell.factors.clone();
                    factors[i] = face_idx;
                    if smallest_common_vertex(&self.complexes, &factors).is_none() {
                        continue;
                    }
                    let row = *lower.get(&factors).expect("faces of a basis cell are born no later than the cell");
                    col.push((row, sign * c));
                }
                koszul += simplex.dim();
            }
            col.sort_unstable();
            col
        })
    }

    /// One line per cell: `p=<degree> birth=<value> (<factor>|<factor>|...)`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (p, level) in self.cells.iter().enumerate() {
            for cell in level {
                let factors: Vec<String> = self.factor_simplices(cell).iter().map(|s| s.to_string()).collect();
                let _ = writeln!(out, "p={p} birth={} ({})", cell.birth, factors.join("|"));
            }
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn expand(
    complexes: &[FilteredComplex],
    stars: &[Vec<usize>],
    pivot: usize,
    budget: usize,
    degree: usize,
    birth: f64,
    tuple: &mut Vec<usize>,
    out: &mut Vec<InteractionCell>,
) {
    let i = tuple.len();
    if i == complexes.len() {
        if smallest_common_vertex(complexes, tuple) == Some(pivot) {
            out.push(InteractionCell { factors: tuple.clone(), degree, birth });
        }
        return;
    }
    let k = &complexes[i];
    for &s in &stars[i] {
        let d = k.simplex(s).dim();
        if degree + d > budget {
            // Stars are sorted by dimension.
            break;
        }
        tuple.push(s);
        expand(complexes, stars, pivot, budget, degree + d, birth.max(k.birth(s)), tuple, out);
        tuple.pop();
    }
}

/// Matrix of `d_p` over the rationals: columns are degree-`p` cells, rows
/// degree-`(p-1)` cells. For `p = 0` the matrix has no rows.
pub fn boundary_matrix(basis: &GradedBasis, p: usize) -> SparseMatrix<Rational> {
    boundary_matrix_over(basis, p)
}

/// [`boundary_matrix`] over an arbitrary coefficient field.
pub fn boundary_matrix_over<F: Field>(basis: &GradedBasis, p: usize) -> SparseMatrix<F> {
    let rows = if p == 0 { 0 } else { basis.dim(p - 1) };
    let cols = basis.boundary_columns(p).into_iter().map(|c| c.into_iter().map(|(i, v)| (i, F::from_i64(v))).collect()).collect();
    SparseMatrix::from_columns(rows, cols)
}

/// Checks `d_{p-1} d_p = 0` exactly for every degree of the basis.
pub fn verify_chain_complex(basis: &GradedBasis) -> bool {
    (2..=basis.max_degree()).all(|p| boundary_matrix(basis, p - 1).mul(&boundary_matrix(basis, p)).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(maximal: &[&[usize]]) -> FilteredComplex {
        FilteredComplex::from_maximal(&maximal.iter().map(|m| m.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn star() -> GradedBasis {
        enumerate_cells(&[k(&[&[0, 1], &[0, 2], &[0, 3]]), k(&[&[0]])], 3, f64::INFINITY).unwrap()
    }

    #[test]
    fn star_generators() {
        let b = star();
        assert_eq!(b.counts(), vec![1, 3, 0, 0]);
        assert_eq!(
            b.dump(),
            "p=0 birth=0 ({0}|{0})\np=1 birth=0 ({0,1}|{0})\np=1 birth=0 ({0,2}|{0})\np=1 birth=0 ({0,3}|{0})\n"
        );
        let d1 = boundary_matrix(&b, 1);
        for j in 0..3 {
            assert_eq!(d1.get(0, j), Rational::from_i64(-1));
        }
    }

    #[test]
    fn boundary_triangle_counts() {
        let tri = k(&[&[0, 1], &[0, 2], &[1, 2]]);
        let b = enumerate_cells(&[tri.clone(), tri], 4, f64::INFINITY).unwrap();
        assert_eq!(b.counts(), vec![3, 12, 9, 0, 0]);
        let full = FilteredComplex::standard_simplex(2);
        let b = enumerate_cells(&[full.clone(), full], 4, f64::INFINITY).unwrap();
        assert_eq!(b.counts(), vec![3, 12, 15, 6, 1]);
    }

    #[test]
    fn edge_squared_top_boundary() {
        let e = FilteredComplex::standard_simplex(1);
        let b = enumerate_cells(&[e.clone(), e], 2, f64::INFINITY).unwrap();
        let rows: Vec<(usize, usize)> = [
            [s(&[0]), s(&[0, 1])],
            [s(&[1]), s(&[0, 1])],
            [s(&[0, 1]), s(&[0])],
            [s(&[0, 1]), s(&[1])],
        ]
        .iter()
        .map(|f| b.position(f).unwrap())
        .collect();
        let top = b.position(&[s(&[0, 1]), s(&[0, 1])]).unwrap();
        let d2 = boundary_matrix(&b, 2);
        let col: Vec<i64> = rows.iter().map(|&(_, r)| if d2.get(r, top.1) == Rational::from_i64(1) { 1 } else { -1 }).collect();
        assert_eq!(col, vec![-1, 1, 1, -1]);
    }

    #[test]
    fn disjoint_groups_have_no_cells() {
        let b = enumerate_cells(&[k(&[&[0, 1]]), k(&[&[2, 3]])], 2, f64::INFINITY).unwrap();
        assert!(b.is_empty());
        assert!(verify_chain_complex(&b));
    }

    #[test]
    fn degree_zero_cells_are_shared_vertices() {
        let b = enumerate_cells(&[k(&[&[0, 1, 2]]), k(&[&[1, 2, 3]]), k(&[&[2, 3, 1]])], 3, f64::INFINITY).unwrap();
        let zero: Vec<Vec<&Simplex>> = b.cells(0).iter().map(|c| b.factor_simplices(c)).collect();
        assert_eq!(zero, vec![vec![&s(&[1]); 3], vec![&s(&[2]); 3]]);
        assert!(verify_chain_complex(&b));
    }

    #[test]
    fn rejects_single_factor() {
        assert_eq!(enumerate_cells(&[k(&[&[0]])], 1, 1.0).unwrap_err(), InteractionError::TooFewFactors(1));
    }

    #[test]
    fn swap_symmetry_of_counts() {
        let a = k(&[&[0, 1, 2], &[2, 3]]);
        let b = k(&[&[1, 2, 3], &[0, 3]]);
        let ab = enumerate_cells(&[a.clone(), b.clone()], 4, f64::INFINITY).unwrap();
        let ba = enumerate_cells(&[b, a], 4, f64::INFINITY).unwrap();
        assert_eq!(ab.counts(), ba.counts());
    }
}
