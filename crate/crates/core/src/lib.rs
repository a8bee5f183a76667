//! Exact computer algebra for Kac-Schwarz operators on scalar and vector
//! Sato Grassmannians.

pub mod error;
pub mod exact;
pub mod laurent;
pub mod lie;
pub mod ks;
pub mod blending;
pub mod grassmann;
pub mod random;
pub mod rigidity;
pub mod selftest;
pub mod text;

pub use error::{KsError, Result};
pub use exact::{int, rat, RatMatrix, Rational};
pub use laurent::{MatrixSeries, ScalarSeries, Series};
pub use lie::{AlgebraData, Gradation, LieType};
