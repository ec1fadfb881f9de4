//! Weierstrass `℘` and its degenerations as solutions of the three-point
//! determinant functional equation
//!
//! ```text
//! | 1      1      1     |
//! | f(x)   g(y)   h(z)  | = 0,   x + y + z = 0.
//! | f'(x)  g'(y)  h'(z) |
//! ```
//!
//! * [`elliptic`] evaluates `℘`, `℘′`, `σ`, `ζ` and their jets.
//! * [`jet`] is an exact differential-polynomial engine that certifies the
//!   symbolic identities behind the reduction to `w′² = p₃w³ + p₂w² + p₁w + p₀`.
//! * [`verify`] checks the functional equations numerically on sampled triples.
//! * [`classify`] fits the necessary ODE to samples and names the family.

pub mod elliptic;
pub mod jet;
pub mod verify;
pub mod classify;

pub use num_complex::Complex64;
