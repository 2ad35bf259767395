//! Exact and approximate finite-time dynamics of a driven two-level system
//! along bounded paths in the `(x, z)` parameter plane.

pub mod analytic;
pub mod approx;
pub mod error;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod quad;
pub mod specfun;

pub use analytic::{
    evolve_series, evolve_series_with, initial_state, solve_path_a, solve_path_b, solve_path_c, AmplitudePair,
    EvolutionSeries, SolverKind, SolverOptions,
};
pub use error::{Error, Result};
pub use model::{ParamPoint, PathSpec, Variant};
pub use num_complex::Complex64;
pub use observables::{final_infidelity, instantaneous_infidelity, InfidelityPoint, ZeroList};
pub use oracle::{GeneralPath, IntegratorControl};
pub use specfun::SeriesControl;
