//! Boundary discretizations: quadrature samples carrying a measure and the
//! mean curvature, plus perimeter and quermassintegral computations.

mod convex;
mod cookie;
mod curve;
mod mesh;
mod revolution;

pub use convex::{
    alexandrov_fenchel_check, quermassintegral, AlexandrovFenchelReport, AF_EQUALITY_TOL,
};
pub use cookie::{cookie_boundary, cookie_perimeter, solve_cookie_radius, CookieSpec};
pub use curve::{
    circle_mesh, discretize_parametric_curve, ellipse_mesh, Circle, ClosedCurve, CurveJet, Ellipse,
    PolarCurve,
};
pub use mesh::{fmt17, BoundaryMesh, Sample};
pub use revolution::{
    discretize_sphere, discretize_surface_of_revolution, spheroid_mesh, RevolutionProfile, Spheroid,
};
