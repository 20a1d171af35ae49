//! Exact symbolic calculus for fiber-wise polynomial differential operators
//! on the total space of a vector bundle, in a single trivializing chart.

pub mod diffop;
pub mod doc;
pub mod error;
pub mod lbundle;
pub mod linearize;
pub mod multivec;
pub mod symcore;
pub mod verify;

pub use diffop::{DerivKey, DiffOp};
pub use error::{Error, Result};
pub use lbundle::{FrameDerivation, LDerivation, LMultivector, LPair};
pub use multivec::{PolyVectorField, Section, SectionRole, SymMultivector};
pub use symcore::{Chart, MultiIndex, Poly, Rational, Space, Var, VarKind};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    pub mod polynomials {}
    #[doc = include_str!("../../../book/src/operators.md")]
    pub mod operators {}
    #[doc = include_str!("../../../book/src/multivectors.md")]
    pub mod multivectors {}
    #[doc = include_str!("../../../book/src/line-bundle.md")]
    pub mod line_bundle {}
    #[doc = include_str!("../../../book/src/linearization.md")]
    pub mod linearization {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
