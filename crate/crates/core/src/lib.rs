//! Quantum channels on finite-dimensional systems and the environments
//! that implement them.
//!
//! The crate covers Kraus and Choi representations of completely positive
//! trace-preserving maps, unitary dilations with pure or mixed environment
//! states, the generalized depolarizing family on a qubit, and numerical
//! searches for the smallest environment that reproduces a channel.
//!
//! Linear algebra and channel types are generic over [`Real`] (`f32` or
//! `f64`); the aliases below fix the double-precision versions that the
//! search and CLI code use. Geometry on the depolarizing tetrahedron only
//! needs field arithmetic and also works over exact rationals.

pub mod channel;
pub mod depolarizing;
pub mod dilation;
pub mod error;
pub mod io;
pub mod matrix;
pub mod optim;
pub mod scalar;
pub mod search;

pub use num_complex::Complex;

pub use channel::{ChoiMatrix, QuantumChannel, DEFAULT_TOLERANCE};
pub use depolarizing::{GeneralizedDepolarizing, QubitEnvAngles, TetraPoint, TwoPauliParam};
pub use dilation::{DilationModel, EnvironmentSpec, GroupedKraus};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, HermitianEigen};
pub use scalar::Real;
pub use search::{PolySystemPoint, SearchConfig, SearchResult};

pub type C64 = Complex<f64>;
pub type CMatrix = ComplexMatrix<f64>;
pub type Channel = QuantumChannel<f64>;
pub type Choi = ChoiMatrix<f64>;
pub type Dilation = DilationModel<f64>;
pub type Environment = EnvironmentSpec<f64>;
pub type Grouped = GroupedKraus<f64>;
pub type Depolarizing = GeneralizedDepolarizing<f64>;
