//! Shared numeric machinery: quadrature, special functions, root finding,
//! small dense linear algebra, an adaptive Runge-Kutta integrator, and a
//! dyadic big-float for the operations that need more than f64.

pub mod dyadic;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod special;
