//! Shared fixtures for the benchmarks under `benches/`.

use flatfront::front::FrameOptions;
use flatfront::{BaseSurface, GridDomain, HarmonicPotential};

/// Reference potential on `[−1, 1]²` with `n × n` nodes.
pub fn reference(n: usize) -> (HarmonicPotential, GridDomain) {
    (HarmonicPotential::reference(), GridDomain::square(-1.0, 1.0, n).expect("valid grid"))
}

pub fn base_surface(n: usize) -> BaseSurface {
    let (phi, dom) = reference(n);
    BaseSurface::new(&phi, &dom, &FrameOptions::default()).expect("reference potential is admissible")
}
