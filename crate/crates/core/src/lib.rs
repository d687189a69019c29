//! Spectral analysis, pointwise observability, HUM steering and feedback
//! stabilization for the linearized coupled KdV system
//!
//! ```text
//!     u_t + u_xxx + a v_xxx = f(t) δ_{x₀},
//!     v_t + (r/c) v_x + (1/c) v_xxx + (d/c) u_xxx = g(t) δ_{x₀},      x ∈ 𝕋 = ℝ/2πℤ,
//! ```
//!
//! with controls `f`, `g` acting through a Dirac mass at a single point `x₀`.
//! All computations are carried out on the Fourier truncation `|k| ≤ N`, where
//! the dynamics are diagonal in a real eigenbasis and every time integral is an
//! exponential moment with a closed form.

pub mod error;
pub mod gram;
pub mod hum;
pub mod integrals;
pub mod linalg;
pub mod modal;
pub mod signal;
pub mod spectral;
pub mod stabilization;

pub use error::{Error, Result};
pub use modal::{AdjointState, ForcingProfile, GridFunction, ModalState};
pub use signal::{ExpTerm, ExponentialSignal};
pub use spectral::{Branch, EigenPair, ModeBranch, PhysicalParams, Spectrum};
