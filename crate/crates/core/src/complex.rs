//! Simplices, filtered simplicial complexes and Vietoris–Rips filtrations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::geometry::DistanceMatrix;
use crate::par;

#[derive(Debug, Error, PartialEq)]
pub enum ComplexError {
    #[error("simplex must have at least one vertex")]
    EmptySimplex,
    #[error("face {face} of {simplex} is born at {face_birth}, after its coface ({birth})")]
    NotMonotone { simplex: Simplex, birth: f64, face: Simplex, face_birth: f64 },
    #[error("expected {expected} filtration values, got {got}")]
    BirthCount { expected: usize, got: usize },
    #[error("filtration value {0} is not finite")]
    NonFinite(f64),
}

/// A simplex as a strictly increasing list of vertex ids.
///
/// Simplices order by dimension first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts and deduplicates `vertices`.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self, ComplexError> {
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(ComplexError::EmptySimplex);
        }
        Ok(Self(vertices))
    }

    pub fn vertex(v: usize) -> Self {
        Self(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Codimension-one faces, the `j`-th with vertex `j` removed.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |j| {
            let mut v = self.0.clone();
            v.remove(j);
            Simplex(v)
        })
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Simplicial boundary `sum_j (-1)^j (s minus its j-th vertex)`. Empty for vertices.
pub fn boundary_chain(s: &Simplex) -> Vec<(i64, Simplex)> {
    s.facets().enumerate().map(|(j, f)| (if j % 2 == 0 { 1 } else { -1 }, f)).collect()
}

/// A face-closed simplicial complex with a monotone filtration value per simplex.
///
/// Simplices are stored in [`Simplex`] order, so an index into
/// [`simplices`](Self::simplices) compares the same way the simplices do.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    simplices: Vec<Simplex>,
    births: Vec<f64>,
    index: HashMap<Simplex, usize>,
    /// For each vertex id, indices of the simplices containing it.
    star: BTreeMap<usize, Vec<usize>>,
}

impl PartialEq for FilteredComplex {
    fn eq(&self, other: &Self) -> bool {
        self.simplices == other.simplices && self.births == other.births
    }
}

impl FilteredComplex {
    /// Builds a complex from simplices and their births, adding any missing
    /// faces. A missing face inherits the smallest birth among its listed
    /// cofaces; a listed face born after one of its cofaces is an error.
    pub fn from_simplices<I>(simplices: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = (Simplex, f64)>,
    {
        let mut births: BTreeMap<Simplex, f64> = BTreeMap::new();
        for (s, b) in simplices {
            if !b.is_finite() {
                return Err(ComplexError::NonFinite(b));
            }
            let e = births.entry(s).or_insert(b);
            *e = e.min(b);
        }
        let given: std::collections::BTreeSet<Simplex> = births.keys().cloned().collect();
        // Cofaces sort after their faces, so a descending walk settles every
        // simplex's birth before its facets are visited.
        let mut cursor = births.keys().next_back().cloned();
        while let Some(s) = cursor {
            let b = births[&s];
            for f in s.facets() {
                if given.contains(&f) {
                    let fb = births[&f];
                    if fb > b {
                        return Err(ComplexError::NotMonotone { simplex: s.clone(), birth: b, face: f, face_birth: fb });
                    }
                } else {
                    births.entry(f).and_modify(|e| *e = e.min(b)).or_insert(b);
                }
            }
            cursor = births.range(..&s).next_back().map(|(k, _)| k.clone());
        }
        let (simplices, births): (Vec<Simplex>, Vec<f64>) = births.into_iter().unzip();
        Ok(Self::assemble(simplices, births))
    }

    /// The closure of `maximal`, every simplex born at 0.
    pub fn from_maximal(maximal: &[Vec<usize>]) -> Result<Self, ComplexError> {
        let simplices = maximal.iter().map(|v| Simplex::new(v.clone()).map(|s| (s, 0.0))).collect::<Result<Vec<_>, _>>()?;
        Self::from_simplices(simplices)
    }

    /// The full simplex on `0..=n` (all faces born at 0).
    pub fn standard_simplex(n: usize) -> Self {
        Self::from_maximal(&[(0..=n).collect()]).expect("nonempty")
    }

    /// Sorted, face-closed input. Callers guarantee order, closure and monotonicity.
    fn assemble(simplices: Vec<Simplex>, births: Vec<f64>) -> Self {
        debug_assert!(simplices.windows(2).all(|w| w[0] < w[1]));
        let index = simplices.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut star: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, s) in simplices.iter().enumerate() {
            for &v in s.vertices() {
                star.entry(v).or_default().push(i);
            }
        }
        Self { simplices, births, index, star }
    }

    /// Same simplices with new filtration values, checked for monotonicity.
    pub fn with_births(&self, births: Vec<f64>) -> Result<Self, ComplexError> {
        if births.len() != self.simplices.len() {
            return Err(ComplexError::BirthCount { expected: self.simplices.len(), got: births.len() });
        }
        if let Some(&b) = births.iter().find(|b| !b.is_finite()) {
            return Err(ComplexError::NonFinite(b));
        }
        for (i, s) in self.simplices.iter().enumerate() {
            for f in s.facets() {
                let fi = self.index[&f];
                if births[fi] > births[i] {
                    return Err(ComplexError::NotMonotone {
                        simplex: s.clone(),
                        birth: births[i],
                        face: f,
                        face_birth: births[fi],
                    });
                }
            }
        }
        Ok(Self { births, ..self.clone() })
    }

    /// Simplices born at or before `scale`.
    pub fn sublevel(&self, scale: f64) -> Self {
        let (simplices, births) = self
            .simplices
            .iter()
            .zip(&self.births)
            .filter(|(_, &b)| b <= scale)
            .map(|(s, &b)| (s.clone(), b))
            .unzip();
        Self::assemble(simplices, births)
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn births(&self) -> &[f64] {
        &self.births
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, i: usize) -> &Simplex {
        &self.simplices[i]
    }

    pub fn birth(&self, i: usize) -> f64 {
        self.births[i]
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.last().map(Simplex::dim)
    }

    /// Vertex ids, ascending.
    pub fn vertex_set(&self) -> Vec<usize> {
        self.star.keys().copied().collect()
    }

    /// Indices of simplices containing `v`, ascending.
    pub fn star_of(&self, v: usize) -> &[usize] {
        self.star.get(&v).map_or(&[], Vec::as_slice)
    }

    /// Number of simplices per dimension.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim().map_or(0, |d| d + 1)];
        for s in &self.simplices {
            counts[s.dim()] += 1;
        }
        counts
    }
}

/// Vietoris–Rips filtration on `ids`: every simplex of dimension at most
/// `max_dim` whose diameter is at most `max_scale`, born at its diameter.
///
/// Cliques are grown from their smallest vertex, one independent task per
/// starting vertex, and the result is sorted, so the output does not depend
/// on scheduling.
pub fn vr_filtration(ids: &[usize], dmat: &DistanceMatrix, max_dim: usize, max_scale: f64) -> FilteredComplex {
    let mut verts = ids.to_vec();
    verts.sort_unstable();
    verts.dedup();
    // Forward neighbours (larger id within scale), per position in `verts`.
    let forward: Vec<Vec<usize>> = par::map_range(verts.len(), |a| {
        ((a + 1)..verts.len()).filter(|&b| dmat.get(verts[a], verts[b]) <= max_scale).collect()
    });

    let per_root: Vec<Vec<(Simplex, f64)>> = par::map_range(verts.len(), |root| {
        let mut out = vec![(Simplex(vec![verts[root]]), 0.0)];
        let mut stack: Vec<(Vec<usize>, f64, Vec<usize>)> = vec![(vec![root], 0.0, forward[root].clone())];
        while let Some((clique, diam, candidates)) = stack.pop() {
            if clique.len() > max_dim {
                continue;
            }
            for (k, &c) in candidates.iter().enumerate() {
                let d = clique.iter().map(|&q| dmat.get(verts[q], verts[c])).fold(diam, f64::max);
                let mut next = clique.clone();
                next.push(c);
                out.push((Simplex(next.iter().map(|&q| verts[q]).collect()), d));
                let rest: Vec<usize> =
                    candidates[k + 1..].iter().copied().filter(|&x| forward[c].binary_search(&x).is_ok()).collect();
                stack.push((next, d, rest));
            }
        }
        out
    });

    let mut all: Vec<(Simplex, f64)> = per_root.into_iter().flatten().collect();
    all.sort_by(|a, b| a.0.cmp(&b.0));
    let (simplices, births) = all.into_iter().unzip();
    FilteredComplex::assemble(simplices, births)
}
