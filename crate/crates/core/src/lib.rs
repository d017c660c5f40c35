//! Persistent interaction homology and persistent interaction Laplacians.
//!
//! Given a point cloud split into `n` (possibly overlapping) groups, each group
//! spans its own Vietoris–Rips filtration. Tuples of simplices, one per group,
//! whose vertex sets share a common point form the basis of the interaction
//! chain complex. This crate builds that complex, computes its exact Betti
//! numbers and persistence barcodes, and the spectra of its (persistent)
//! Hodge Laplacians.
//!
//! ```
//! use intertopo::complex::FilteredComplex;
//! use intertopo::interaction::enumerate_cells;
//! use intertopo::homology::betti;
//!
//! // A star on vertex 0 interacting with the single vertex 0.
//! let star = FilteredComplex::from_maximal(&[vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
//! let point = FilteredComplex::from_maximal(&[vec![0]]).unwrap();
//! let basis = enumerate_cells(&[star, point], 3, f64::INFINITY).unwrap();
//! assert_eq!(betti(&basis).values(), &[0, 2, 0, 0]);
//! ```

pub mod complex;
pub mod export;
pub mod field;
pub mod geometry;
pub mod homology;
pub mod interaction;
pub mod linalg;
mod par;
pub mod spectral;

pub use complex::{FilteredComplex, Simplex};
pub use geometry::{DistanceMatrix, GroupingSpec, PointCloud};
pub use homology::{Bar, Barcode, BettiVector, WuReport};
pub use interaction::{GradedBasis, InteractionCell};
pub use par::is_parallel;
pub use spectral::{LaplacianMatrix, PersistentLaplacian, SpectrumSeries};
