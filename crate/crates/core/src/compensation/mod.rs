//! Test kernels, the compensation functional `Δ` and its identity.

mod arcs;
mod bootstrap;
mod discrete;
mod fields;
mod gh;
mod kernel;
mod residual;
mod xi;

pub use bootstrap::{besov_bootstrap, BootstrapRow, BootstrapTable};
pub use discrete::{CellTerms, DiscreteEngine, EnginePath};
pub use fields::{a_bound_ratio, a_field, delta_field, discrete_fields, i3_parametric, i_field, IInput};
pub use gh::{g_func, gh_identity_check, h_bound_ratio, h_func};
pub use kernel::{TestKernel, DEFAULT_EPS};
pub use residual::{comp_identity_residual, comp_identity_residual_with, ResidualReport};
pub use xi::{
    beta_grid, coercivity_report, half_separation, omega, xi_closed, xi_closed_deriv, xi_double,
    xi_phi, CoercivityReport, XiMethod, XiTable,
};
