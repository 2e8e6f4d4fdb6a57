//! Fixtures shared by the benchmarks.

use eklab_core::agflow::{Domain, DomainKind, StreamFunction};
use eklab_core::{make_canonical_field, AngleField, CanonicalKind, Grid2, Mask};

/// Vortex centered slightly off the origin on `[-1, 1]²`.
pub fn vortex(n: usize) -> AngleField {
    let g = Grid2::square(-1.0, 1.0, n).expect("grid");
    make_canonical_field(CanonicalKind::Vortex { center: [1e-3, 2e-3] }, &g, &Mask::full(&g)).expect("field")
}

/// Noisy initial stream function on the unit disk.
pub fn disk_stream(n: usize) -> StreamFunction {
    let d = Domain::new(DomainKind::unit_disk(), n, 3).expect("domain");
    StreamFunction::initial(&d, 0.01, 1).expect("stream")
}
