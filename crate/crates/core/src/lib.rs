//! Secret and plausibly deniable joint information structures.
//!
//! A sender adds a message `y` on top of a public baseline signal `x ~ f(·|ω)`.
//! This crate builds and checks joint structures `h(x, y|ω)` whose `y` is
//! uninformative on its own (secrecy) and whose every `(x, y)` pair only
//! induces actions that `x` alone could have justified (plausible
//! deniability). It also compares structures by garbling and by value of
//! information under single-crossing utilities.
//!
//! All types are generic over [`Scalar`]. The defaults and the aliases below
//! use exact rationals; `f64` and `f32` work for exploratory use.

pub mod deniability;
pub mod dominance;
pub mod error;
pub mod fixtures;
pub mod frontier;
pub mod generate;
pub mod lp;
pub mod model;
pub mod rationalize;
pub mod sampling;
pub mod scalar;
pub mod signalrep;
pub mod utility;

pub use error::{Error, Result};
pub use model::{
    apply_garbling, classify_messages, posterior, ActionSpace, BaselineStructure, Garbling, JointStructure,
    MessageClass, MessageClassification, Posterior, Prior,
};
pub use scalar::Scalar;
pub use signalrep::SignalRepresentation;
pub use utility::UtilityMatrix;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type PriorF64 = Prior<f64>;
pub type BaselineF64 = BaselineStructure<f64>;
pub type JointF64 = JointStructure<f64>;
pub type UtilityF64 = UtilityMatrix<f64>;

/// `num / den` as an exact rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

