#![allow(dead_code, clippy::needless_range_loop)]

use intertopo::complex::FilteredComplex;
use intertopo::geometry::{distance_matrix, PointCloud};
use intertopo::interaction::{boundary_matrix, enumerate_cells, GradedBasis};
use intertopo::spectral::InteractionSystem;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub const INF: f64 = f64::INFINITY;

pub fn k(maximal: &[&[usize]]) -> FilteredComplex {
    FilteredComplex::from_maximal(&maximal.iter().map(|m| m.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn full(factors: &[FilteredComplex]) -> GradedBasis {
    let top = factors.iter().map(|f| f.max_dim().unwrap_or(0)).sum();
    enumerate_cells(factors, top, INF).unwrap()
}

pub fn star() -> GradedBasis {
    full(&[k(&[&[0, 1], &[0, 2], &[0, 3]]), k(&[&[0]])])
}

pub fn simplex_pair(n: usize) -> GradedBasis {
    full(&[FilteredComplex::standard_simplex(n), FilteredComplex::standard_simplex(n)])
}

pub fn hollow_triangle() -> FilteredComplex {
    k(&[&[0, 1], &[0, 2], &[1, 2]])
}

pub fn zig_zag() -> GradedBasis {
    full(&[k(&[&[0, 1], &[1, 2]]), k(&[&[1, 2], &[2, 3]])])
}

pub fn squares() -> GradedBasis {
    full(&[k(&[&[0, 1], &[0, 2], &[1, 3], &[2, 3]]), k(&[&[2, 3], &[2, 4], &[3, 5], &[4, 5]])])
}

/// Two planar triples sharing the points `(1,0)` and `(1,1)`.
pub fn example_system() -> InteractionSystem {
    let coords = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [2.0, 1.0]];
    let cloud = PointCloud::new(coords.iter().map(|c| ("P", c.to_vec()))).unwrap();
    InteractionSystem::new(distance_matrix(&cloud), vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap()
}

pub fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
    let mut want = want.to_vec();
    want.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
    }
}

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Dense integer matrix of `d_p`: rows are degree-`(p-1)` cells.
pub fn dense_boundary(basis: &GradedBasis, p: usize) -> Vec<Vec<i64>> {
    let rows = if p == 0 { 0 } else { basis.dim(p - 1) };
    let b = boundary_matrix(basis, p);
    (0..rows)
        .map(|i| (0..basis.dim(p)).map(|j| b.get(i, j).to_i64().unwrap()).collect())
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(r) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, r);
        let inv = Q::one() / m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..ncols {
                    let delta = f.clone() * m[row][c].clone();
                    m[r][c] = m[r][c].clone() - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

pub fn rank_q(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : M x = 0}` for an `r x ncols` matrix.
pub fn nullspace_q(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::zero(); ncols];
            v[free] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

/// `beta_p^{a,b} = dim Z_p(a) - dim(Z_p(a) ∩ B_p(b))` by exact linear algebra.
pub fn persistent_betti_oracle(basis: &GradedBasis, a: f64, b: f64, p: usize) -> usize {
    let n_a = basis.prefix_len(p, a);
    let n_b = basis.prefix_len(p, b);
    let dp = dense_boundary(basis, p);
    let z_rows: Vec<Vec<Q>> = dp.iter().map(|r| r[..n_a].iter().map(|&v| q(v)).collect()).collect();
    let cycles = if p == 0 {
        (0..n_a).map(|i| (0..n_a).map(|j| q(i64::from(i == j))).collect()).collect()
    } else {
        nullspace_q(&z_rows, n_a)
    };
    let up = dense_boundary(basis, p + 1);
    let m_b = basis.prefix_len(p + 1, b);
    // Columns of [Z_a | B_{p+1}(b)] in C_p(b), stored as rows of the transpose.
    let mut gens: Vec<Vec<Q>> = cycles
        .iter()
        .map(|z| (0..n_b).map(|i| if i < n_a { z[i].clone() } else { Q::zero() }).collect())
        .collect();
    let n_bound = gens.len();
    for j in 0..m_b {
        gens.push((0..n_b).map(|i| q(up[i][j])).collect());
    }
    let sum = rank_q(&gens, n_b);
    let boundaries = rank_q(&gens[n_bound..], n_b);
    let z = cycles.len();
    // dim(Z ∩ B) = dim Z + dim B - dim(Z + B)
    z - (z + boundaries - sum)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

