//! Aviles-Giga energy on divergence-free fields `m = ∇^⊥u`, ε-continuation
//! with a frozen tangential boundary layer, and the entropy lower-bound comparator.

mod continuation;
mod domain;
mod energy;
mod minimize;

pub use continuation::{
    angular_rms_to_vortex, continuation_csv, continuation_run, entropy_energy_comparison, mollified_vortex,
    vortex_energy_ratio, wall_profile, ContinuationRung, EntropyComparison,
};
pub use domain::{Domain, DomainKind};
pub use energy::{ag_energy, AgEnergy, StreamEnergy, StreamFunction};
pub use minimize::{minimize_stream, MinimizeConfig, MinimizeOutcome, StopReason, TraceStep};
