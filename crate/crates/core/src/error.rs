use thiserror::Error;

use crate::geom::Signature;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signature mismatch: {left:?} vs {right:?}")]
    SignatureMismatch { left: Signature, right: Signature },

    #[error("points are not on a common projective line (relative residual {residual:.3e})")]
    NotCollinear { residual: f64 },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(&'static str),

    #[error("potential is not harmonic: laplacian {residual:.3e} at (u, v) = ({u}, {v})")]
    NotHarmonic { u: f64, v: f64, residual: f64 },

    #[error("degenerate deformation parameter lambda = {lambda}: (p+, p-) = -2(1 - 2 lambda) vanishes")]
    DegenerateParameter { lambda: f64 },

    #[error("potential overflows the exponential: |phi| = {value:.3e} at (u, v) = ({u}, {v})")]
    PotentialOverflow { u: f64, v: f64, value: f64 },

    #[error("invalid grid domain: {0}")]
    InvalidDomain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("fixed spheres span a contact element: (q+, q-) = {product:.3e}")]
    ContactSpanDegenerate { product: f64 },

    #[error("sphere congruence becomes a point sphere at {count} grid point(s), first at ({i}, {j})")]
    PointSphereEncountered { i: usize, j: usize, count: usize },

    #[error("Calapso transport diverged at lambda = {lambda}: orthogonality drift {drift:.3e}")]
    TransportDiverged { lambda: f64, drift: f64 },

    #[error("invalid potential term: {0}")]
    InvalidTerm(String),
}
