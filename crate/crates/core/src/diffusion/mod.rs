//! Hyperbolic Brownian motion, the heat kernel and Monte Carlo heat diffusions.

pub mod field;
pub mod kernel;
pub mod ops;
pub mod sampler;

pub use field::{
    fd_laplacian, laplacian_or_fd, Constant, Distance, DistanceSquared, ExpDecay, FnField, LaplacianOf, RealPart,
    ScalarField, SmoothDistance, FD_SPACING,
};
pub use kernel::{heat_kernel, heat_kernel_mass};
pub use ops::{
    check_circle_vs_diffusion, check_dynkin, check_semigroup, circle_average, diffuse, diffuse_from, CircleReport,
    CircleRow, DynkinOptions, DynkinReport, SemigroupReport, CIRCLE_DIRS, SEMIGROUP_INNER,
};
pub use sampler::{increment, sample_path, walk_endpoint, walk_polar, LeafPath, DEFAULT_STEP, MAX_STEP};
