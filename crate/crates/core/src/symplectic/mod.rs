//! Conley-Zehnder indices of paths of symplectic matrices.
//!
//! The index is the Robbin-Salamon index of the graph of the path, computed
//! from crossing forms: at each time `t` with `ker(A(t) - I) != 0`, the form
//! `Q(v) = omega(A v, A' v)` on the kernel contributes its signature, halved
//! at the two ends of every segment.

mod index;
mod matrix;
mod path;
pub mod pathfile;

pub use index::{
    cz_index, cz_index_report, cz_rational, determinant_loop_degree, small_extension_bound, Crossing,
    ExtensionBoundReport, IndexReport, IndexValue,
};
pub use matrix::{
    identity_exact, is_symplectic_exact, standard_form_exact, symplectic_inverse_exact, RationalMatrix,
};
pub use path::{
    PathSegment, RotationBlock, Sample, SegmentEvaluator, SegmentKind, ShearBlock, SymplecticPath,
};

/// Numerical thresholds for sampled and exponential segments. Closed-form
/// segments never consult them.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingTolerances {
    /// Relative symplecticity defect allowed for samples.
    pub symplectic: f64,
    /// Relative gap allowed between consecutive segment endpoints.
    pub continuity: f64,
    /// Smallest crossing-form eigenvalue magnitude accepted as nondegenerate.
    pub eigenvalue: f64,
    /// Operator-norm radius for extensions in `small_extension_bound`.
    pub neighborhood: f64,
    /// Scan points per numeric segment.
    pub grid: usize,
    /// Singular value below which `A - I` is treated as singular.
    pub kernel: f64,
}

impl Default for CrossingTolerances {
    fn default() -> Self {
        CrossingTolerances {
            symplectic: 1e-9,
            continuity: 1e-9,
            eigenvalue: 1e-7,
            neighborhood: 1e-2,
            grid: 1024,
            kernel: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CzError {
    #[error("path has no segments")]
    EmptyPath,
    #[error("segment {segment}: {reason}")]
    InvalidSegment { segment: usize, reason: String },
    #[error("segment {segment} is not symplectic: {detail}")]
    NonSymplecticSegment { segment: usize, detail: String },
    #[error("segment {segment} does not start where the previous one ends (gap {gap:.3e})")]
    Discontinuous { segment: usize, gap: f64 },
    #[error("degenerate crossing in segment {segment} at local time {time:.12}: crossing form eigenvalue {eigenvalue:.3e}")]
    DegenerateCrossing {
        segment: usize,
        time: f64,
        eigenvalue: f64,
    },
    #[error("paths do not meet: endpoint distance {distance:.3e}")]
    EndpointMismatch { distance: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("time change must be increasing from (0, 0) to (1, 1)")]
    InvalidReparameterization,
    #[error("path leaves the unitary group (defect {defect:.3e} at time {time:.6})")]
    NotUnitary { time: f64, defect: f64 },
    #[error("path is not a loop (endpoint distance {distance:.3e})")]
    NotALoop { distance: f64 },
    #[error("extension leaves the neighborhood of the endpoint (distance {distance:.3e} > {radius:.3e})")]
    ExtensionLeavesNeighborhood { distance: f64, radius: f64 },
    #[error("multiplicity N must be positive")]
    ZeroMultiplicity,
}
