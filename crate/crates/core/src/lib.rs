//! Numerical laboratory for the Dirichlet reaction-diffusion inclusion
//! `u_t - u_xx ∈ H₀(u)` on `(0, 1)`, where `H₀` is the set-valued Heaviside
//! (sign) map.
//!
//! The crate covers the whole chain from the explicit equilibria `v₀`, `vₙ±`
//! to the saddle-point structure around them:
//!
//! * [`discretize`]: aligned P1 meshes, tridiagonal assembly and solves, and
//!   the discrete `L²`, `H₀¹` and `H⁻¹` norms.
//! * [`equilibria`]: the closed-form fixed points, their zeros, Heaviside
//!   image and Lyapunov energy.
//! * [`spectral`]: the linearized operator `L = -d²/dx² - 4n Σ δ_{k/n}`
//!   through transfer-matrix shooting, closed-form transcendental equations
//!   and a finite-element pencil, plus spectral projections.
//! * [`inclusion`]: a semi-implicit integrator for the inclusion and the
//!   nonlinear remainder `g(z)` of the linearization.
//! * [`lab`]: rate, exponent and tangency experiments with reproducible
//!   reports.
//! * [`cli`]: the `inclusion-lab` command line.

pub mod cli;
pub mod discretize;
pub mod equilibria;
pub mod error;
pub mod inclusion;
pub mod io;
pub mod lab;
pub mod roots;
pub mod spectral;

pub use error::{Error, Result};
