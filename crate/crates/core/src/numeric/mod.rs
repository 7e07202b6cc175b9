//! Complex-plane numerics shared by every other module.

mod deriv;
mod enclosing;
mod grid;
mod holomap;
mod limit;
mod region;

pub use deriv::{
    cauchy_derivative, checked_first_derivative, pre_schwarzian, schwarzian, CAUCHY_POINTS, SINGULAR_THRESHOLD,
};
pub use enclosing::{min_enclosing_disk, min_ratio_disk};
pub use grid::{Grid, Layout};
pub use holomap::{ComplexFn, Domain, HoloMap};
pub use limit::{
    angular_limit_at_infinity, default_ray_samples, richardson_at_infinity, tends_to_infinity,
    LimitEstimate, DEFAULT_BASE_RADIUS,
};
pub use region::{hyperbolic_distance, EuclideanDisk, HyperbolicDisk, Region, UkRegion};

pub type C64 = num_complex::Complex64;
