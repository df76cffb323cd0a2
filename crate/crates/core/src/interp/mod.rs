//! Multivariate polynomial and rational interpolation from black-box
//! evaluations, with degree discovery and the final passage to exact
//! rational coefficients.

pub mod multi;
pub mod rat;
pub mod tripoly;
pub mod uni;

pub use multi::{interp_poly_multi, TensorInterpolator};
pub use rat::{
    discover_degrees, exactify_poly, exactify_rat, interp_rat_tri, line_degrees, BlackBox, DegreeProfile,
    DiscoveryConfig, FnBlackBox, NodeGeometry, RatInterpConfig,
};
pub use tripoly::{Mono, TriPoly, TriRat};
pub use uni::{
    cauchy_interp_uni, circle_nodes, fit_rational, interp_poly_uni, normalize_constant, AxisInterpolator, Normalization,
    RationalFit,
};
