//! Ground truth for checking the sampler: exact enumeration, goodness of fit,
//! the exact relaxed program, and the lower-bound configuration.

pub mod enumerate;
pub mod gof;
pub mod lowerbound;
pub mod lp_vertices;

pub use enumerate::{
    complete_graph_colorings, count_colorings, cycle_colorings, enumerate_colorings,
    tree_colorings, ColoringIndex,
};
pub use gof::{binomial_sigma, chi_square_sf, chi_square_uniform, goodness_of_fit, ks_uniform, GofReport};
pub use lowerbound::{
    audit_coupling_at_worst_case, build_worst_case, lower_bound_value, AuditCoupling, AuditReport,
    LowerBoundInstance,
};
pub use lp_vertices::{full_lp_feasible_exact, relaxed_optimum, relaxed_vertices, ExactLaw};
