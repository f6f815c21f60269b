//! Triangular arrays on tori and in the plane: centering, convergence
//! diagnostics and finite-`n` checks of limit theorems.

mod array;
mod center;
mod report;

pub use array::{
    compound_planar, constant_array, flip_array, gaussian, gaussian_planar, perturb_array,
    perturbation_budget, poisson, poisson_planar, poisson_torus, wrap_array, ArraySource, IidArray,
    IidMode, MeasureGenerator, PerturbationFn, PlanarGenerator, PlanarRow, RowLength,
    TorusGenerator, TorusRow, TriangularArray, DEFAULT_THETA,
};
pub use center::{
    additive_center_row, center_row, classical_product_char, AdditiveCenteredRow, CenteredRow,
};
pub use report::{
    condition_report, limit_check, nudge_eps, re_im_bound_check, re_im_constant, ConditionReport,
    EpsEntry, LimitPoint, LimitReport, PlanarConditionReport, PlanarEpsEntry, ReImReport,
    TorusConditionReport, TrendEntry, DEFAULT_EPS,
};
