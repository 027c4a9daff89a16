//! Small numerical kernels: quadrature, scalar minimization, special
//! functions, dense linear algebra and nonlinear least squares.

mod gamma;
mod linalg;
mod lm;
mod minimize;
mod quad;

pub use gamma::ln_gamma;
pub use linalg::{invert, solve};
pub use lm::{levenberg_marquardt, LmOptions, LmReport, ParamSpec};
pub use minimize::{brent_minimize, Minimum};
pub use quad::{integrate, integrate_to_infinity};
