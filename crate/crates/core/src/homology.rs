//! Betti numbers, persistence barcodes, the Wu characteristic and the
//! bottleneck distance between barcodes.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::complex::FilteredComplex;
use crate::field::{Field, Rational};
use crate::interaction::{boundary_matrix_over, enumerate_cells, GradedBasis};
use crate::linalg::{reduce, SparseMatrix};
use crate::par;

#[derive(Debug, Error, PartialEq)]
pub enum HomologyError {
    #[error("persistence query needs a <= b, got a = {a}, b = {b}")]
    BadInterval { a: f64, b: f64 },
    #[error("the Wu characteristic needs exactly two identical complexes")]
    UnsupportedWu,
    #[error("basis is truncated at degree {0}; the Wu characteristic needs all degrees")]
    Truncated(usize),
}

/// Interaction Betti numbers for degrees `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiVector(Vec<usize>);

impl BettiVector {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    /// `beta_p`, zero outside the computed range.
    pub fn get(&self, p: usize) -> usize {
        self.0.get(p).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn alternating_sum(&self) -> i64 {
        self.0.iter().enumerate().map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }
}

/// Degrees whose homology the basis determines exactly. The top degree of a
/// truncated basis is missing its higher boundaries, so it is excluded.
pub fn exact_degrees(basis: &GradedBasis) -> usize {
    if is_complete(basis) {
        basis.max_degree() + 1
    } else {
        basis.max_degree()
    }
}

/// True when no cell exists above `max_degree`.
pub fn is_complete(basis: &GradedBasis) -> bool {
    let top: usize = basis.complexes().iter().map(|k| k.max_dim().unwrap_or(0)).sum();
    top <= basis.max_degree()
}

/// Exact Betti numbers over the rationals.
pub fn betti(basis: &GradedBasis) -> BettiVector {
    betti_over::<Rational>(basis)
}

/// `beta_p = dim C_p - rank B_p - rank B_{p+1}` over the field `F`.
pub fn betti_over<F: Field>(basis: &GradedBasis) -> BettiVector {
    let top = basis.max_degree();
    let ranks: Vec<usize> = par::map_range(top + 2, |p| {
        if p == 0 || p > top {
            0
        } else {
            boundary_matrix_over::<F>(basis, p).rank()
        }
    });
    BettiVector((0..exact_degrees(basis)).map(|p| basis.dim(p) - ranks[p] - ranks[p + 1]).collect())
}

/// A half-open persistence interval `[birth, death)`; `death` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    /// Alive over the whole of `[a, b]` with the half-open convention.
    pub fn spans(&self, a: f64, b: f64) -> bool {
        self.birth <= a && self.death > b
    }
}

/// Bars per degree, sorted by `(birth, death)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Barcode {
    bars: Vec<Vec<Bar>>,
}

impl Barcode {
    pub fn from_bars(mut bars: Vec<Vec<Bar>>) -> Self {
        for level in &mut bars {
            level.sort_by(|x, y| x.birth.total_cmp(&y.birth).then(x.death.total_cmp(&y.death)));
        }
        Self { bars }
    }

    /// Number of degrees covered.
    pub fn degrees(&self) -> usize {
        self.bars.len()
    }

    pub fn bars(&self, p: usize) -> &[Bar] {
        self.bars.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.bars.iter().all(Vec::is_empty)
    }

    /// Every finite endpoint, sorted and deduplicated.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .bars
            .iter()
            .flatten()
            .flat_map(|b| [b.birth, b.death])
            .filter(|x| x.is_finite())
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// Persistence barcode over the rationals.
pub fn persistent_barcode(basis: &GradedBasis) -> Barcode {
    persistent_barcode_over::<Rational>(basis)
}

/// Column reduction of the filtration-ordered boundary matrix of all degrees.
///
/// Cells are ordered by birth, then degree, then their order within the
/// degree. Zero-length pairs are dropped from the output.
pub fn persistent_barcode_over<F: Field>(basis: &GradedBasis) -> Barcode {
    let top = basis.max_degree();
    let mut order: Vec<(f64, usize, usize)> = (0..=top)
        .flat_map(|p| basis.cells(p).iter().enumerate().map(move |(i, c)| (c.birth(), p, i)))
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut offsets: Vec<Vec<usize>> = (0..=top).map(|p| vec![0; basis.dim(p)]).collect();
    for (g, &(_, p, i)) in order.iter().enumerate() {
        offsets[p][i] = g;
    }

    let blocks: Vec<SparseMatrix<F>> = par::map_range(top + 1, |p| boundary_matrix_over::<F>(basis, p));
    let mut columns = vec![Vec::new(); order.len()];
    for (p, block) in blocks.iter().enumerate() {
        for (i, col) in block.columns().iter().enumerate() {
            columns[offsets[p][i]] = col.iter().map(|(r, v)| (offsets[p - 1][*r], v.clone())).collect();
        }
    }
    let global = SparseMatrix::from_columns(order.len(), columns);
    let red = reduce(&global, false);

    let exact = exact_degrees(basis);
    let mut bars = vec![Vec::new(); exact];
    let mut paired = HashSet::new();
    for j in 0..order.len() {
        if let Some(i) = red.low(j) {
            paired.insert(i);
            paired.insert(j);
            let (birth, p, _) = order[i];
            let death = order[j].0;
            if p < exact && death > birth {
                bars[p].push(Bar::new(birth, death));
            }
        }
    }
    for (j, &(birth, p, _)) in order.iter().enumerate() {
        if p < exact && !paired.contains(&j) {
            bars[p].push(Bar::new(birth, f64::INFINITY));
        }
    }
    Barcode::from_bars(bars)
}

/// `beta_p^{a,b}`: degree-`p` bars born by `a` and still alive at `b`.
pub fn persistent_betti(barcode: &Barcode, a: f64, b: f64, p: usize) -> Result<usize, HomologyError> {
    if a > b || a.is_nan() || b.is_nan() {
        return Err(HomologyError::BadInterval { a, b });
    }
    Ok(barcode.bars(p).iter().filter(|bar| bar.spans(a, b)).count())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WuReport {
    pub omega: i64,
    /// Intersecting pairs `(s, t)` counted by `dim s + dim t`.
    pub pair_counts: Vec<usize>,
    pub betti_alternating_sum: i64,
    pub consistent: bool,
}

/// Counts intersecting simplex pairs of `K` directly and compares the
/// alternating sum with that of the self-interaction Betti numbers.
pub fn wu_characteristic(basis: &GradedBasis, betti: &BettiVector) -> Result<WuReport, HomologyError> {
    let ks = basis.complexes();
    if ks.len() != 2 || ks[0].simplices() != ks[1].simplices() {
        return Err(HomologyError::UnsupportedWu);
    }
    if !is_complete(basis) {
        return Err(HomologyError::Truncated(basis.max_degree()));
    }
    let k = &ks[0];
    let top = 2 * k.max_dim().unwrap_or(0);
    let mut pair_counts = vec![0usize; top + 1];
    for s in k.simplices() {
        for t in k.simplices() {
            if s.vertices().iter().any(|&v| t.contains(v)) {
                pair_counts[s.dim() + t.dim()] += 1;
            }
        }
    }
    while pair_counts.len() > 1 && pair_counts.last() == Some(&0) {
        pair_counts.pop();
    }
    if k.is_empty() {
        pair_counts.clear();
    }
    let omega = pair_counts.iter().enumerate().map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) }).sum();
    let betti_alternating_sum = betti.alternating_sum();
    Ok(WuReport { omega, pair_counts, betti_alternating_sum, consistent: omega == betti_alternating_sum })
}

/// Wu report for a complex interacting with itself.
pub fn wu_of_complex(k: &FilteredComplex) -> WuReport {
    let top = 2 * k.max_dim().unwrap_or(0);
    let basis = enumerate_cells(&[k.clone(), k.clone()], top, f64::INFINITY).expect("two factors");
    let b = betti(&basis);
    wu_characteristic(&basis, &b).expect("identical complete factors")
}

/// Bottleneck distance between the degree-`p` diagrams of two barcodes.
pub fn bottleneck_distance(a: &Barcode, b: &Barcode, p: usize) -> f64 {
    bottleneck_bars(a.bars(p), b.bars(p))
}

/// Bottleneck distance between two multisets of bars. Infinite bars are
/// matched only with infinite bars; unequal counts give infinity.
pub fn bottleneck_bars(a: &[Bar], b: &[Bar]) -> f64 {
    let mut ai: Vec<f64> = a.iter().filter(|x| x.is_infinite()).map(|x| x.birth).collect();
    let mut bi: Vec<f64> = b.iter().filter(|x| x.is_infinite()).map(|x| x.birth).collect();
    if ai.len() != bi.len() {
        return f64::INFINITY;
    }
    ai.sort_by(f64::total_cmp);
    bi.sort_by(f64::total_cmp);
    let essential = ai.iter().zip(&bi).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let af: Vec<Bar> = a.iter().copied().filter(|x| !x.is_infinite()).collect();
    let bf: Vec<Bar> = b.iter().copied().filter(|x| !x.is_infinite()).collect();
    let linf = |x: &Bar, y: &Bar| (x.birth - y.birth).abs().max((x.death - y.death).abs());
    let half = |x: &Bar| (x.death - x.birth) / 2.0;

    let mut candidates = vec![0.0];
    candidates.extend(af.iter().map(half));
    candidates.extend(bf.iter().map(half));
    for x in &af {
        for y in &bf {
            candidates.push(linf(x, y));
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let (na, nb) = (af.len(), bf.len());
    let feasible = |delta: f64| -> bool {
        // Left: a-points then diagonal copies of b-points.
        // Right: b-points then diagonal copies of a-points.
        let adj: Vec<Vec<usize>> = (0..na + nb)
            .map(|l| {
                if l < na {
                    let mut v: Vec<usize> = (0..nb).filter(|&r| linf(&af[l], &bf[r]) <= delta).collect();
                    if half(&af[l]) <= delta {
                        v.push(nb + l);
                    }
                    v
                } else {
                    let j = l - na;
                    let mut v: Vec<usize> = if half(&bf[j]) <= delta { vec![j] } else { vec![] };
                    v.extend(nb..nb + na);
                    v
                }
            })
            .collect();
        max_matching(&adj, na + nb) == na + nb
    };

    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo].max(essential)
}

/// Maximum bipartite matching by augmenting paths.
fn max_matching(adj: &[Vec<usize>], n_right: usize) -> usize {
    fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &adj[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; n_right];
    let mut size = 0;
    for l in 0..adj.len() {
        let mut seen = vec![false; n_right];
        if augment(l, adj, &mut seen, &mut owner) {
            size += 1;
        }
    }
    size
}
