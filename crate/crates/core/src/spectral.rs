//! Interaction Laplacians, persistent interaction Laplacians and their
//! spectra along a filtration.
//!
//! Matrices use the standard basis of interaction cells, which is orthonormal
//! for the product inner product. With `B_p` the matrix of `d_p` (columns are
//! degree-`p` cells), `L_p = B_p^T B_p + B_{p+1} B_{p+1}^T`.

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::complex::vr_filtration;
use crate::field::{Field, Rational};
use crate::geometry::{select_groups, DistanceMatrix, GeometryError, GroupingSpec, PointCloud};
use crate::interaction::{enumerate_cells, GradedBasis};
use crate::linalg::SparseMatrix;
use crate::par;

/// Largest tolerated `|L - L^T|` entry before an eigensolve.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Default relative tolerance under which an eigenvalue counts as zero.
pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not symmetric (max deviation {0:e})")]
    Asymmetric(f64),
    #[error("persistent Laplacian needs a <= b, got a = {a}, b = {b}")]
    BadInterval { a: f64, b: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("an interaction needs at least two groups, got {0}")]
    TooFewGroups(usize),
}

/// Dense Laplacian on the degree-`p` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    pub p: usize,
    pub matrix: DMatrix<f64>,
}

/// `Delta_p^{a,b}` on the degree-`p` cells born by `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistentLaplacian {
    pub p: usize,
    pub a: f64,
    pub b: f64,
    pub matrix: DMatrix<f64>,
    /// Matrix of `d_{p+1}^{a,b}` in an orthonormal basis of the
    /// `(p+1)`-chains born by `b` whose boundary is born by `a`.
    pub up_boundary: DMatrix<f64>,
}

type Column = Vec<(usize, i64)>;

/// `down_cols` are columns of `B_p`, `up_cols` columns of `B_{p+1}`; only
/// rows below `n` may appear in `up_cols`.
fn assemble(n: usize, down_cols: &[Column], up_cols: &[Column]) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    // Down part: (B_p^T B_p)_{ij} = sum_r B_{ri} B_{rj}, accumulated per row r.
    let rows = down_cols.iter().flat_map(|c| c.iter().map(|e| e.0)).max().map_or(0, |r| r + 1);
    let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); rows];
    for (j, col) in down_cols.iter().enumerate() {
        for &(r, v) in col {
            by_row[r].push((j, v));
        }
    }
    for entries in by_row.iter().chain(up_cols.iter()) {
        for &(i, x) in entries {
            for &(j, y) in entries {
                m[(i, j)] += (x * y) as f64;
            }
        }
    }
    m
}

/// `L_p` of the whole basis. Empty (0x0) when degree `p` has no cells.
pub fn laplacian(basis: &GradedBasis, p: usize) -> LaplacianMatrix {
    let cache = BoundaryCache::new(basis, p);
    LaplacianMatrix { p, matrix: cache.laplacian_prefix(basis.dim(p), basis.dim(p + 1)) }
}

/// Sorted eigenvalues of a symmetric matrix.
pub fn spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>, SpectralError> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let dev = (m - m.transpose()).amax();
    if dev > SYMMETRY_TOLERANCE {
        return Err(SpectralError::Asymmetric(dev));
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Relative zero test for eigenvalues: `lambda <= tol * max(1, lambda_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTolerance(pub f64);

impl Default for ZeroTolerance {
    fn default() -> Self {
        Self(DEFAULT_ZERO_TOLERANCE)
    }
}

impl ZeroTolerance {
    pub fn threshold(&self, sorted_eigenvalues: &[f64]) -> f64 {
        self.0 * sorted_eigenvalues.last().copied().unwrap_or(0.0).max(1.0)
    }

    pub fn nullity(&self, sorted_eigenvalues: &[f64]) -> usize {
        let t = self.threshold(sorted_eigenvalues);
        sorted_eigenvalues.iter().filter(|&&x| x <= t).count()
    }

    /// Smallest eigenvalue above the zero threshold, or 0 if there is none.
    pub fn gap(&self, sorted_eigenvalues: &[f64]) -> f64 {
        let t = self.threshold(sorted_eigenvalues);
        sorted_eigenvalues.iter().copied().find(|&x| x > t).unwrap_or(0.0)
    }
}

/// Boundary columns of `d_p` and `d_{p+1}` for one basis, reused across
/// filtration values by taking prefixes.
struct BoundaryCache {
    down: Vec<Column>,
    up: Vec<Column>,
}

impl BoundaryCache {
    fn new(basis: &GradedBasis, p: usize) -> Self {
        let down = if p == 0 { vec![Vec::new(); basis.dim(0)] } else { basis.boundary_columns(p) };
        let up = if p < basis.max_degree() { basis.boundary_columns(p + 1) } else { Vec::new() };
        Self { down, up }
    }

    fn laplacian_prefix(&self, n_p: usize, n_up: usize) -> DMatrix<f64> {
        assemble(n_p, &self.down[..n_p], &self.up[..n_up.min(self.up.len())])
    }
}

/// `Delta_p^{a,b}` from a basis containing every cell born by `b`.
///
/// The `(p+1)`-cells born by `b` span `C_{p+1}(b)`; those chains whose
/// boundary avoids cells born after `a` form the null space of the
/// corresponding row block of `B_{p+1}`. That null space is found exactly
/// and orthonormalized in floating point.
pub fn persistent_laplacian(basis: &GradedBasis, a: f64, b: f64, p: usize) -> Result<PersistentLaplacian, SpectralError> {
    if a > b || a.is_nan() || b.is_nan() {
        return Err(SpectralError::BadInterval { a, b });
    }
    let n_a = basis.prefix_len(p, a);
    let n_b = basis.prefix_len(p, b);
    let up_cols: Vec<Column> = if p < basis.max_degree() {
        let m = basis.prefix_len(p + 1, b);
        basis.boundary_columns(p + 1).into_iter().take(m).collect()
    } else {
        Vec::new()
    };
    let down_cols: Vec<Column> = if p == 0 { vec![Vec::new(); n_a] } else { basis.boundary_columns(p).into_iter().take(n_a).collect() };

    let up_boundary = if n_b == n_a {
        let mut m = DMatrix::zeros(n_a, up_cols.len());
        for (j, col) in up_cols.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = v as f64;
            }
        }
        m
    } else {
        let b_up: SparseMatrix<Rational> = SparseMatrix::from_columns(
            n_b,
            up_cols.iter().map(|c| c.iter().map(|&(i, v)| (i, Rational::from_i64(v))).collect()).collect(),
        );
        let outside: Vec<usize> = (n_a..n_b).collect();
        let kernel = b_up.select_rows(&outside).kernel_basis();
        if kernel.is_empty() {
            DMatrix::zeros(n_a, 0)
        } else {
            let k = DMatrix::from_fn(up_cols.len(), kernel.len(), |i, j| kernel[j][i].to_f64());
            let z = k.qr().q();
            let inside: Vec<usize> = (0..n_a).collect();
            b_up.select_rows(&inside).to_dense_f64() * z
        }
    };

    let mut matrix = assemble(n_a, &down_cols, &[]);
    matrix += &up_boundary * up_boundary.transpose();
    Ok(PersistentLaplacian { p, a, b, matrix, up_boundary })
}

/// Filtration parameter of one spectrum entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameter {
    Snapshot { t: f64 },
    Pair { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    #[serde(flatten)]
    pub parameter: Parameter,
    pub degree: usize,
    pub nullity: usize,
    pub gap: f64,
    pub eigenvalues: Vec<f64>,
}

/// Spectra of one degree along a parameter grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumSeries {
    pub degree: usize,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumSeries {
    pub fn gaps(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.gap).collect()
    }
}

fn entry(parameter: Parameter, degree: usize, eigenvalues: Vec<f64>, tol: ZeroTolerance) -> SpectrumEntry {
    SpectrumEntry { parameter, degree, nullity: tol.nullity(&eigenvalues), gap: tol.gap(&eigenvalues), eigenvalues }
}

/// Grid of filtration parameters for a curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveGrid {
    /// `Delta_p` of the complex at each `t`.
    Snapshot(Vec<f64>),
    /// `Delta_p^{a,b}` for each pair.
    Pairs(Vec<(f64, f64)>),
}

impl CurveGrid {
    fn max_scale(&self) -> f64 {
        match self {
            Self::Snapshot(ts) => ts.iter().copied().fold(0.0, f64::max),
            Self::Pairs(ps) => ps.iter().map(|p| p.1).fold(0.0, f64::max),
        }
    }
}

/// Critical values with the midpoints between consecutive ones.
pub fn auto_grid(critical: &[f64]) -> Vec<f64> {
    let mut grid = Vec::with_capacity(2 * critical.len());
    for (k, &c) in critical.iter().enumerate() {
        grid.push(c);
        if let Some(&next) = critical.get(k + 1) {
            grid.push(0.5 * (c + next));
        }
    }
    grid
}

/// Snapshot spectra of `basis` at each grid value.
///
/// The complex at `t` depends only on which cells are born by `t`, so grid
/// values that select the same prefixes share one eigensolve.
pub fn snapshot_curve(basis: &GradedBasis, p: usize, grid: &[f64], tol: ZeroTolerance) -> Result<SpectrumSeries, SpectralError> {
    let cache = BoundaryCache::new(basis, p);
    let keys: Vec<(usize, usize)> = grid
        .iter()
        .map(|&t| (basis.prefix_len(p, t), if p < basis.max_degree() { basis.prefix_len(p + 1, t) } else { 0 }))
        .collect();
    let mut unique = keys.clone();
    unique.sort_unstable();
    unique.dedup();
    let spectra: Vec<Result<Vec<f64>, SpectralError>> =
        par::map(&unique, |&(n_p, n_up)| spectrum(&cache.laplacian_prefix(n_p, n_up)));
    let spectra: Vec<Vec<f64>> = spectra.into_iter().collect::<Result<_, _>>()?;
    let entries = grid
        .iter()
        .zip(&keys)
        .map(|(&t, key)| {
            let idx = unique.binary_search(key).expect("key was inserted");
            entry(Parameter::Snapshot { t }, p, spectra[idx].clone(), tol)
        })
        .collect();
    Ok(SpectrumSeries { degree: p, entries })
}

/// Persistent spectra of `basis` for each `(a, b)` pair.
pub fn pairs_curve(basis: &GradedBasis, p: usize, pairs: &[(f64, f64)], tol: ZeroTolerance) -> Result<SpectrumSeries, SpectralError> {
    let results: Vec<Result<SpectrumEntry, SpectralError>> = par::map(pairs, |&(a, b)| {
        let pl = persistent_laplacian(basis, a, b, p)?;
        Ok(entry(Parameter::Pair { a, b }, p, spectrum(&pl.matrix)?, tol))
    });
    Ok(SpectrumSeries { degree: p, entries: results.into_iter().collect::<Result<_, _>>()? })
}

/// Point groups over a shared distance matrix.
#[derive(Debug, Clone)]
pub struct InteractionSystem {
    dmat: DistanceMatrix,
    groups: Vec<Vec<usize>>,
}

impl InteractionSystem {
    pub fn new(dmat: DistanceMatrix, groups: Vec<Vec<usize>>) -> Result<Self, SpectralError> {
        if groups.len() < 2 {
            return Err(SpectralError::TooFewGroups(groups.len()));
        }
        if let Some(g) = groups.iter().position(Vec::is_empty) {
            return Err(GeometryError::EmptyGroup { group: g }.into());
        }
        Ok(Self { dmat, groups })
    }

    pub fn from_cloud(cloud: &PointCloud, spec: &GroupingSpec) -> Result<Self, SpectralError> {
        let groups = select_groups(cloud, spec)?;
        Self::new(crate::geometry::distance_matrix(cloud), groups)
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dmat
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Sorted union of point ids over all groups.
    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.groups.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Distinct within-group distances (and 0): the only values at which
    /// the interaction filtration changes.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.groups.iter().flat_map(|g| self.dmat.critical_values(g)).collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }

    /// Interaction basis up to `max_degree`, with every factor's Rips
    /// complex truncated at `max_scale` and dimension `max_degree`.
    pub fn basis(&self, max_degree: usize, max_scale: f64) -> GradedBasis {
        let complexes: Vec<_> = self.groups.iter().map(|g| vr_filtration(g, &self.dmat, max_degree, max_scale)).collect();
        enumerate_cells(&complexes, max_degree, max_scale).expect("at least two groups")
    }

    /// Ordinary Rips chain complex of the union of all groups.
    pub fn union_basis(&self, max_degree: usize, max_scale: f64) -> GradedBasis {
        GradedBasis::simplicial(vr_filtration(&self.union(), &self.dmat, max_degree, max_scale), max_degree, max_scale)
    }
}

/// Spectral-gap curve of the interaction Laplacian in degree `p`.
pub fn gap_curve(system: &InteractionSystem, p: usize, grid: &CurveGrid, tol: ZeroTolerance) -> Result<SpectrumSeries, SpectralError> {
    let basis = system.basis(p + 1, grid.max_scale());
    match grid {
        CurveGrid::Snapshot(ts) => snapshot_curve(&basis, p, ts, tol),
        CurveGrid::Pairs(pairs) => pairs_curve(&basis, p, pairs, tol),
    }
}

/// Spectral-gap curve of the ordinary Rips Laplacian on the points `ids`.
pub fn classic_laplacian_curve(
    dmat: &DistanceMatrix,
    ids: &[usize],
    p: usize,
    grid: &[f64],
    tol: ZeroTolerance,
) -> Result<SpectrumSeries, SpectralError> {
    let scale = grid.iter().copied().fold(0.0, f64::max);
    let basis = GradedBasis::simplicial(vr_filtration(ids, dmat, p + 1, scale), p + 1, scale);
    snapshot_curve(&basis, p, grid, tol)
}
