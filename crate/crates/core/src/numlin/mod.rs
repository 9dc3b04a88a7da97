//! Exact polynomial and matrix algebra over Q, ball arithmetic, and
//! certified root enclosures.

pub mod ball;
pub mod factor;
pub mod matrix;
pub mod intgcd;
pub mod poly;
pub mod roots;
pub mod spectral;

pub use ball::{rat, rat_int, BallReal, BigRat, DEFAULT_PRECISION, MAX_PRECISION};
pub use factor::factor_rational;
pub use matrix::{CMMatrix, RatMatrix, RatVec};
pub use poly::{squarefree_decomposition, RatPoly};
pub use roots::{root_enclosures, ComplexBall};
pub use spectral::{
    growth_exponent_oracle, perron_eigenvector, spectral_data, spectral_data_cm,
    spectral_data_with_hints, Certification, Cone, DominantFactor, Dominance, PerronVector,
    SpectralData,
};
