//! Spectrum of the linearization `L = -d²/dx² - 4n Σ_{k=1}^{n-1} δ_{k/n}`
//! at `vₙ±` with Dirichlet conditions, by three routes that check each
//! other: transfer-matrix shooting, the closed-form equations for
//! `n = 2, 3`, and the aligned finite-element pencil.

pub mod closed_form;
pub mod decomposition;
pub mod eigen;
pub mod fem;
pub mod projection;
pub mod transfer;
pub mod zero_mode;

pub use closed_form::{
    closed_form_negative_roots, closed_form_positive_equation_n3, closed_form_spectrum,
};
pub use decomposition::{InnerProduct, Method, SpectralDecomposition};
pub use eigen::{eigenfunction, find_eigenvalues, perturbation_direction, EigenSearch};
pub use fem::fem_spectrum;
pub use projection::{projections, SpectralProjector};
pub use transfer::{characteristic, CharacteristicEvaluator, ShotProfile};
pub use zero_mode::{zero_mode_matrix, zero_not_eigenvalue, ZeroModeSystem, ZeroModeVerdict};
